//! Words over the IFS alphabet, equicontractive systems `S_i(x) = x/m + d_i`,
//! cylinder geometry and normalized relative displacements.
//!
//! Symbols are 1-indexed: map `k` in a 0-indexed naming is symbol `k + 1` here.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::arith::{AffineExpr, ParamPoint, Rational};
use crate::error::{Error, Result};

/// A finite word `s_1 s_2 … s_k` indexing the composition `S_{s_1} ∘ … ∘ S_{s_k}`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Word(Vec<u16>);

impl Word {
    pub fn new(symbols: Vec<u16>) -> Self {
        Word(symbols)
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn symbols(&self) -> &[u16] {
        &self.0
    }

    pub fn first(&self) -> Option<u16> {
        self.0.first().copied()
    }

    pub fn push(&mut self, symbol: u16) {
        self.0.push(symbol);
    }

    pub fn with(&self, symbol: u16) -> Word {
        let mut w = self.clone();
        w.push(symbol);
        w
    }

    pub fn prepend(&self, symbol: u16) -> Word {
        let mut v = Vec::with_capacity(self.len() + 1);
        v.push(symbol);
        v.extend_from_slice(&self.0);
        Word(v)
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn split_at(&self, mid: usize) -> (Word, Word) {
        let (a, b) = self.0.split_at(mid);
        (Word(a.to_vec()), Word(b.to_vec()))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.iter().all(|&s| s < 10) {
            for s in &self.0 {
                write!(f, "{s}")?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.0.iter().map(u16::to_string).collect();
            // a lone multi-digit symbol keeps a trailing comma so it reads back as one symbol
            let tail = if parts.len() == 1 { "," } else { "" };
            write!(f, "{}{tail}", parts.join(","))
        }
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{self}\"")
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("not a word: {s:?}"));
        if s.is_empty() {
            return Ok(Word::empty());
        }
        if s.contains(',') {
            s.trim_end_matches(',')
                .split(',')
                .map(|t| t.trim().parse::<u16>().map_err(|_| bad()))
                .collect::<Result<Vec<_>>>()
                .map(Word)
        } else {
            s.chars()
                .map(|c| c.to_digit(10).map(|d| d as u16).ok_or_else(bad))
                .collect::<Result<Vec<_>>>()
                .map(Word)
        }
    }
}

impl Serialize for Word {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// The interval `S_σ([0,1]) = [left, right]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Cylinder {
    pub word: Word,
    pub left: AffineExpr,
    pub right: AffineExpr,
}

/// An equicontractive, orientation-preserving system `S_i(x) = x/m + d_i`
/// with offsets affine in the parameter `a`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SystemWire")]
pub struct IfsSystem {
    ratio_denominator: u32,
    offsets: Vec<AffineExpr>,
}

#[derive(Deserialize)]
struct SystemWire {
    ratio_denominator: u32,
    offsets: Vec<AffineExpr>,
}

impl TryFrom<SystemWire> for IfsSystem {
    type Error = Error;
    fn try_from(w: SystemWire) -> Result<Self> {
        IfsSystem::new(w.ratio_denominator, w.offsets)
    }
}

impl IfsSystem {
    pub fn new(ratio_denominator: u32, offsets: Vec<AffineExpr>) -> Result<Self> {
        if ratio_denominator < 2 {
            return Err(Error::InvalidSystem(format!(
                "ratio denominator must be at least 2, got {ratio_denominator}"
            )));
        }
        if offsets.is_empty() {
            return Err(Error::InvalidSystem("no maps".into()));
        }
        if offsets.len() > u16::MAX as usize {
            return Err(Error::InvalidSystem("alphabet too large".into()));
        }
        Ok(IfsSystem {
            ratio_denominator,
            offsets,
        })
    }

    pub fn ratio_denominator(&self) -> u32 {
        self.ratio_denominator
    }

    /// `m` as a rational.
    pub fn m(&self) -> Rational {
        Rational::from_integer(BigInt::from(self.ratio_denominator))
    }

    /// `m^k`.
    pub fn m_pow(&self, k: usize) -> Rational {
        Rational::from_integer(BigInt::from(self.ratio_denominator).pow(k as u32))
    }

    pub fn alphabet_size(&self) -> usize {
        self.offsets.len()
    }

    pub fn offsets(&self) -> &[AffineExpr] {
        &self.offsets
    }

    pub fn symbols(&self) -> impl Iterator<Item = u16> {
        1..=self.offsets.len() as u16
    }

    pub fn offset(&self, symbol: u16) -> Result<&AffineExpr> {
        (symbol as usize)
            .checked_sub(1)
            .and_then(|i| self.offsets.get(i))
            .ok_or(Error::SymbolOutOfRange {
                symbol: symbol as usize,
                alphabet: self.offsets.len(),
            })
    }

    pub fn check_word(&self, w: &Word) -> Result<()> {
        w.symbols().iter().try_for_each(|&s| self.offset(s).map(|_| ()))
    }

    /// `S_σ(0) = Σ_i d_{s_i} / m^(i−1)`.
    pub fn map_at_zero(&self, w: &Word) -> Result<AffineExpr> {
        let inv_m = self.m().recip();
        let mut acc = AffineExpr::zero();
        for &s in w.symbols().iter().rev() {
            acc = self.offset(s)? + &acc.scale(&inv_m);
        }
        Ok(acc)
    }

    /// `a_{σ,τ} = m^k (S_τ(0) − S_σ(0))`, the translation amount of `S_σ⁻¹ ∘ S_τ`.
    pub fn translation_amount(&self, sigma: &Word, tau: &Word) -> Result<AffineExpr> {
        if sigma.len() != tau.len() {
            return Err(Error::LengthMismatch {
                left: sigma.len(),
                right: tau.len(),
            });
        }
        let diff = &self.map_at_zero(tau)? - &self.map_at_zero(sigma)?;
        Ok(diff.scale(&self.m_pow(sigma.len())))
    }

    /// Displacement of the pair `(σi, τj)` from that of `(σ, τ)`:
    /// `m·v + m·(d_j − d_i)`.
    pub fn child_displacement(&self, v: &AffineExpr, i: u16, j: u16) -> Result<AffineExpr> {
        let m = self.m();
        let step = self.offset(j)? - self.offset(i)?;
        Ok((v + &step).scale(&m))
    }

    pub fn cylinder(&self, w: &Word) -> Result<Cylinder> {
        let left = self.map_at_zero(w)?;
        let right = left.add_constant(&self.m_pow(w.len()).recip());
        Ok(Cylinder {
            word: w.clone(),
            left,
            right,
        })
    }

    /// All words of length `k` in lexicographic order.
    pub fn words(&self, k: usize) -> impl Iterator<Item = Word> {
        let n = self.offsets.len() as u16;
        let total = (n as usize).checked_pow(k as u32).unwrap_or(usize::MAX);
        (0..total).map(move |mut idx| {
            let mut v = vec![0u16; k];
            for slot in v.iter_mut().rev() {
                *slot = (idx % n as usize) as u16 + 1;
                idx /= n as usize;
            }
            Word(v)
        })
    }

    /// The same system with every offset evaluated at the point (exact points only).
    pub fn normalized(&self, pt: &ParamPoint) -> IfsSystem {
        IfsSystem {
            ratio_denominator: self.ratio_denominator,
            offsets: self.offsets.iter().map(|d| pt.normalize(d)).collect(),
        }
    }

    /// Checks `0 ≤ d_i ≤ 1 − 1/m` for every offset, `d_1 = 0` and `d_n = 1 − 1/m`.
    pub fn validate(&self, pt: &ParamPoint) -> Result<ValidationReport> {
        let upper = Rational::one() - self.m().recip();
        let mut offsets = Vec::with_capacity(self.offsets.len());
        let mut problems = Vec::new();
        for (idx, d) in self.offsets.iter().enumerate() {
            let symbol = idx as u16 + 1;
            let nonnegative = pt.sign(d)? != Ordering::Less;
            let within_upper = pt.sign(&d.add_constant(&-&upper))? != Ordering::Greater;
            if !nonnegative {
                problems.push(format!("offset of map {symbol} is negative"));
            }
            if !within_upper {
                problems.push(format!("offset of map {symbol} exceeds 1 - 1/m"));
            }
            offsets.push(OffsetCheck {
                symbol,
                offset: d.clone(),
                nonnegative,
                within_upper,
            });
        }
        let first_is_zero = pt.normalize(&self.offsets[0]).is_zero();
        let last = self.offsets.last().expect("non-empty");
        let last_is_max = pt.normalize(&last.add_constant(&-&upper)).is_zero();
        if !first_is_zero {
            problems.push("first offset is not 0, so 0 is not in the attractor".into());
        }
        if !last_is_max {
            problems.push("last offset is not 1 - 1/m, so 1 is not in the attractor".into());
        }
        Ok(ValidationReport {
            valid: problems.is_empty(),
            offsets,
            first_is_zero,
            last_is_max,
            problems,
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OffsetCheck {
    pub symbol: u16,
    pub offset: AffineExpr,
    pub nonnegative: bool,
    pub within_upper: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub valid: bool,
    pub offsets: Vec<OffsetCheck>,
    pub first_is_zero: bool,
    pub last_is_max: bool,
    pub problems: Vec<String>,
}

/// `S_σ(0)` for `sys` at word `σ`.
pub fn map_at_zero(sys: &IfsSystem, w: &Word) -> Result<AffineExpr> {
    sys.map_at_zero(w)
}

pub fn translation_amount(sys: &IfsSystem, sigma: &Word, tau: &Word) -> Result<AffineExpr> {
    sys.translation_amount(sigma, tau)
}

pub fn cylinder(sys: &IfsSystem, w: &Word) -> Result<Cylinder> {
    sys.cylinder(w)
}

pub fn validate_system(sys: &IfsSystem, pt: &ParamPoint) -> Result<ValidationReport> {
    sys.validate(pt)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use crate::examples::{example_one_system, example_two_system};
    use proptest::prelude::*;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn word_text_forms() {
        assert_eq!(w("132").symbols(), &[1, 3, 2]);
        assert_eq!(w("").len(), 0);
        assert_eq!(w("1,12,3").symbols(), &[1, 12, 3]);
        assert_eq!(Word::new(vec![1, 12]).to_string(), "1,12");
        assert_eq!(Word::new(vec![10]).to_string(), "10,");
        assert_eq!(w("10,").symbols(), &[10]);
        assert_eq!(w("21").to_string(), "21");
        assert!("1a".parse::<Word>().is_err());
    }

    #[test]
    fn map_at_zero_examples() {
        let one = example_one_system();
        assert_eq!(one.map_at_zero(&w("13")).unwrap(), AffineExpr::constant(rat(6, 49)));
        assert_eq!(one.map_at_zero(&w("21")).unwrap(), AffineExpr::param());
        let two = example_two_system();
        assert_eq!(two.map_at_zero(&w("23")).unwrap(), AffineExpr::constant(rat(15, 256)));
        assert!(matches!(
            one.map_at_zero(&w("14")),
            Err(Error::SymbolOutOfRange { symbol: 4, alphabet: 3 })
        ));
    }

    #[test]
    fn translation_examples() {
        let one = example_one_system();
        assert_eq!(
            one.translation_amount(&w("1"), &w("2")).unwrap(),
            AffineExpr::new(rat(0, 1), rat(7, 1))
        );
        assert!(one.translation_amount(&w("12"), &w("12")).unwrap().is_zero());
        let two = example_two_system();
        assert!(two.translation_amount(&w("15"), &w("23")).unwrap().is_zero());
        assert!(matches!(
            one.translation_amount(&w("1"), &w("12")),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn cylinder_examples() {
        let one = example_one_system();
        let c = one.cylinder(&w("3")).unwrap();
        assert_eq!((c.left, c.right), (AffineExpr::constant(rat(6, 7)), AffineExpr::constant(rat(1, 1))));
        let c = one.cylinder(&Word::empty()).unwrap();
        assert_eq!((c.left, c.right), (AffineExpr::zero(), AffineExpr::constant(rat(1, 1))));
        let c = example_two_system().cylinder(&w("4")).unwrap();
        assert_eq!(c.left, AffineExpr::constant(rat(11, 16)));
        assert_eq!(c.right, AffineExpr::constant(rat(12, 16)));
    }

    #[test]
    fn validation_flags_bad_offset() {
        let sys = IfsSystem::new(
            7,
            vec![
                AffineExpr::zero(),
                AffineExpr::constant(rat(2, 1)),
                AffineExpr::constant(rat(6, 7)),
            ],
        )
        .unwrap();
        let report = sys.validate(&ParamPoint::exact(rat(0, 1))).unwrap();
        assert!(!report.valid);
        assert!(!report.offsets[1].within_upper);
        assert!(IfsSystem::new(1, vec![AffineExpr::zero()]).is_err());
    }

    #[test]
    fn words_enumeration() {
        let sys = example_one_system();
        let all: Vec<String> = sys.words(2).map(|x| x.to_string()).collect();
        assert_eq!(all, ["11", "12", "13", "21", "22", "23", "31", "32", "33"]);
        assert_eq!(sys.words(0).collect::<Vec<_>>(), vec![Word::empty()]);
    }

    #[test]
    fn system_json_schema() {
        let sys = example_one_system();
        let text = serde_json::to_string(&sys).unwrap();
        assert!(text.starts_with(r#"{"ratio_denominator":7,"offsets":[{"p":"0/1","q":"0/1"}"#));
        let back: IfsSystem = serde_json::from_str(&text).unwrap();
        assert_eq!(back, sys);
        assert!(serde_json::from_str::<IfsSystem>(r#"{"ratio_denominator":1,"offsets":[]}"#).is_err());
    }

    /// Coefficient of `a` in `S_σ(0)` for Example 1: `Σ_{i : s_i = 2} 7^{-(i-1)}`.
    #[test]
    fn slope_formula() {
        let sys = example_one_system();
        for k in 1..=4 {
            for word in sys.words(k) {
                let expected: Rational = word
                    .symbols()
                    .iter()
                    .enumerate()
                    .filter(|(_, &s)| s == 2)
                    .map(|(i, _)| sys.m_pow(i).recip())
                    .sum();
                assert_eq!(sys.map_at_zero(&word).unwrap().q, expected, "{word}");
            }
        }
    }

    /// The recursive displacement rule agrees with direct computation on every
    /// pair of words up to length 4.
    #[test]
    fn cocycle_identity() {
        for sys in [example_one_system(), example_two_system()] {
            for k in 0..3 {
                for sigma in sys.words(k) {
                    for tau in sys.words(k) {
                        let base = sys.translation_amount(&sigma, &tau).unwrap();
                        for i in sys.symbols() {
                            for j in sys.symbols() {
                                let direct = sys.translation_amount(&sigma.with(i), &tau.with(j)).unwrap();
                                assert_eq!(direct, sys.child_displacement(&base, i, j).unwrap());
                            }
                        }
                    }
                }
            }
        }
        // full length-4 pairs for Example 1, via two steps of the rule
        let sys = example_one_system();
        for sigma in sys.words(4) {
            for tau in sys.words(4) {
                let (sp, ss) = sigma.split_at(2);
                let (tp, ts) = tau.split_at(2);
                let mut v = sys.translation_amount(&sp, &tp).unwrap();
                for (&i, &j) in ss.symbols().iter().zip(ts.symbols()) {
                    v = sys.child_displacement(&v, i, j).unwrap();
                }
                assert_eq!(v, sys.translation_amount(&sigma, &tau).unwrap());
            }
        }
    }

    fn arb_word_pair(n: u16, max_len: usize) -> impl Strategy<Value = (Word, Word)> {
        (0..=max_len).prop_flat_map(move |k| {
            (
                proptest::collection::vec(1..=n, k).prop_map(Word::new),
                proptest::collection::vec(1..=n, k).prop_map(Word::new),
            )
        })
    }

    proptest! {
        #[test]
        fn translation_is_antisymmetric((s, t) in arb_word_pair(5, 6)) {
            let sys = example_two_system();
            let forward = sys.translation_amount(&s, &t).unwrap();
            let backward = sys.translation_amount(&t, &s).unwrap();
            prop_assert_eq!(forward, -backward);
        }

        #[test]
        fn composition_matches_map_at_zero((s, t) in arb_word_pair(3, 5)) {
            // S_{st}(0) = S_s(S_t(0)) = S_s(0) + S_t(0)/m^{|s|}
            let sys = example_one_system();
            let lhs = sys.map_at_zero(&s.concat(&t)).unwrap();
            let rhs = &sys.map_at_zero(&s).unwrap()
                + &sys.map_at_zero(&t).unwrap().scale(&sys.m_pow(s.len()).recip());
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn word_text_round_trip(v in proptest::collection::vec(1u16..40, 0..8)) {
            let word = Word::new(v);
            prop_assert_eq!(word.to_string().parse::<Word>().unwrap(), word);
        }
    }

    #[test]
    fn cylinder_width_is_exact() {
        let sys = example_two_system();
        for word in sys.words(3) {
            let c = sys.cylinder(&word).unwrap();
            assert_eq!(&c.right - &c.left, AffineExpr::constant(sys.m_pow(3).recip()));
        }
    }
}
