use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// `n`-th refinement choice taken from the Thue–Morse word (`n ≥ 1`):
/// `t(n − 1)`, the parity of the popcount of `n − 1`. Yields 0,1,1,0,1,0,0,1,…
pub fn thue_morse_bit(n: u64) -> u8 {
    assert!(n >= 1, "steps are 1-indexed");
    ((n - 1).count_ones() % 2) as u8
}

/// `n`-th bit (`n ≥ 1`) of the Fibonacci word 0100101001001…, the fixed point
/// of 0 → 01, 1 → 0.
pub fn fibonacci_bit(n: u64) -> u8 {
    assert!(n >= 1, "steps are 1-indexed");
    let n = n as usize;
    let mut prev = vec![0u8];
    let mut cur = vec![0u8, 1];
    while cur.len() < n {
        let next = [cur.as_slice(), prev.as_slice()].concat();
        prev = cur;
        cur = next;
    }
    cur[n - 1]
}

/// Choice of option at each refinement step: bit 0 selects the first option,
/// bit 1 the second.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DrivingSequence {
    ThueMorse,
    Fibonacci,
    /// A finite prefix; no choice is defined past its end.
    Explicit(Vec<u8>),
    /// The given block repeated forever (for control runs).
    Periodic(Vec<u8>),
}

impl DrivingSequence {
    pub fn bit(&self, n: u64) -> Option<u8> {
        if n == 0 {
            return None;
        }
        match self {
            DrivingSequence::ThueMorse => Some(thue_morse_bit(n)),
            DrivingSequence::Fibonacci => Some(fibonacci_bit(n)),
            DrivingSequence::Explicit(bits) => bits.get(n as usize - 1).copied(),
            DrivingSequence::Periodic(block) => block.get((n as usize - 1) % block.len()).copied(),
        }
    }

    /// Recognized infinite aperiodic generators.
    pub fn is_aperiodic(&self) -> bool {
        matches!(self, DrivingSequence::ThueMorse | DrivingSequence::Fibonacci)
    }

    pub fn is_eventually_periodic(&self) -> bool {
        matches!(self, DrivingSequence::Periodic(_))
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, DrivingSequence::Explicit(_))
    }

    /// Warnings that apply to every result derived from this sequence.
    pub fn caveats(&self) -> Vec<String> {
        match self {
            DrivingSequence::ThueMorse | DrivingSequence::Fibonacci => Vec::new(),
            DrivingSequence::Explicit(bits) => vec![format!(
                "finite driving prefix of {} bits: the parameter is only pinned to the last computed interval",
                bits.len()
            )],
            DrivingSequence::Periodic(_) => vec![
                "eventually periodic driving sequence: the limit is rational and the convex type count may stay finite".to_string(),
            ],
        }
    }
}

fn parse_bits(s: &str) -> Result<Vec<u8>> {
    s.chars()
        .filter(|c| !c.is_whitespace() && *c != '_')
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            _ => Err(Error::Parse(format!("bad bit {c:?} in driving sequence"))),
        })
        .collect()
}

impl FromStr for DrivingSequence {
    type Err = Error;

    /// `thue-morse`, `fibonacci`, `bits:0110…`, `periodic:01`, or `file:PATH`
    /// (a file of 0/1 characters, whitespace ignored).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "thue-morse" | "thue_morse" | "tm" => return Ok(DrivingSequence::ThueMorse),
            "fibonacci" => return Ok(DrivingSequence::Fibonacci),
            _ => {}
        }
        if let Some(bits) = s.strip_prefix("bits:") {
            return Ok(DrivingSequence::Explicit(parse_bits(bits)?));
        }
        if let Some(block) = s.strip_prefix("periodic:") {
            let block = parse_bits(block)?;
            if block.is_empty() {
                return Err(Error::Parse("empty periodic block".into()));
            }
            return Ok(DrivingSequence::Periodic(block));
        }
        if let Some(path) = s.strip_prefix("file:") {
            let text = std::fs::read_to_string(path)?;
            return Ok(DrivingSequence::Explicit(parse_bits(&text)?));
        }
        Err(Error::Parse(format!("unknown driving sequence {s:?}")))
    }
}

impl fmt::Display for DrivingSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let bits = |b: &[u8]| b.iter().map(|x| char::from(b'0' + x)).collect::<String>();
        match self {
            DrivingSequence::ThueMorse => write!(f, "thue-morse"),
            DrivingSequence::Fibonacci => write!(f, "fibonacci"),
            DrivingSequence::Explicit(b) => write!(f, "bits:{}", bits(b)),
            DrivingSequence::Periodic(b) => write!(f, "periodic:{}", bits(b)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Reference Thue–Morse by the recurrence t(0)=0, t(2k)=t(k), t(2k+1)=1−t(k).
    fn tm_recurrence(len: usize) -> Vec<u8> {
        let mut t = vec![0u8; len];
        for k in 1..len {
            t[k] = if k % 2 == 0 { t[k / 2] } else { 1 - t[k / 2] };
        }
        t
    }

    #[test]
    fn thue_morse_first_choices() {
        let first: Vec<u8> = (1..=5).map(thue_morse_bit).collect();
        assert_eq!(first, [0, 1, 1, 0, 1]);
        assert_eq!(thue_morse_bit(8), 1);
        let prefix: String = (1..=16).map(|n| char::from(b'0' + thue_morse_bit(n))).collect();
        assert_eq!(prefix, "0110100110010110");
        let reference = tm_recurrence(1000);
        for n in 1..=1000u64 {
            assert_eq!(thue_morse_bit(n), reference[n as usize - 1]);
        }
    }

    #[test]
    fn fibonacci_word() {
        let prefix: String = (1..=13).map(|n| char::from(b'0' + fibonacci_bit(n))).collect();
        assert_eq!(prefix, "0100101001001");
    }

    #[test]
    fn parse_forms() {
        assert_eq!("thue-morse".parse::<DrivingSequence>().unwrap(), DrivingSequence::ThueMorse);
        assert_eq!(
            "bits:0110".parse::<DrivingSequence>().unwrap(),
            DrivingSequence::Explicit(vec![0, 1, 1, 0])
        );
        let p: DrivingSequence = "periodic:01".parse().unwrap();
        assert_eq!(p.bit(3), Some(0));
        assert_eq!(p.bit(4), Some(1));
        assert!(p.is_eventually_periodic());
        assert!("bits:012".parse::<DrivingSequence>().is_err());
        assert!("periodic:".parse::<DrivingSequence>().is_err());
        assert!("nope".parse::<DrivingSequence>().is_err());
        assert_eq!(p.to_string(), "periodic:01");
    }

    #[test]
    fn explicit_prefix_runs_out() {
        let s = DrivingSequence::Explicit(vec![0, 0]);
        assert_eq!(s.bit(2), Some(0));
        assert_eq!(s.bit(3), None);
        assert!(!s.is_aperiodic());
    }

    #[test]
    fn file_source() {
        let dir = std::env::temp_dir().join(format!("sepkit-seq-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("bits.txt");
        std::fs::write(&path, "01 10\n1").unwrap();
        let s: DrivingSequence = format!("file:{}", path.display()).parse().unwrap();
        assert_eq!(s, DrivingSequence::Explicit(vec![0, 1, 1, 0, 1]));
        std::fs::remove_dir_all(&dir).ok();
    }
}
