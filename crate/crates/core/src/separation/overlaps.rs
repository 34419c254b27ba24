use std::collections::HashMap;

use serde::Serialize;

use crate::arith::AffineExpr;
use crate::error::{Error, Result};
use crate::ifs::{IfsSystem, Word};

/// Largest number of words of a single length the scan enumerates.
const WORD_LIMIT: usize = 2_000_000;

/// Two distinct words of equal length whose maps coincide for every value
/// of the parameter.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OverlapPair {
    pub sigma: Word,
    pub tau: Word,
    pub level: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct OverlapReport {
    pub max_level: usize,
    /// Pairs `σ < τ` that do not split into two shorter coinciding pairs.
    pub primitive: Vec<OverlapPair>,
    /// Number of coinciding pairs `σ < τ` per level, primitive or not.
    pub pairs_per_level: Vec<usize>,
}

/// Symbolic scan for exact overlaps `S_σ = S_τ`, `σ ≠ τ`, `|σ| = |τ| ≤ K`.
///
/// Maps of equal length coincide iff `S_σ(0) = S_τ(0)`, and the offsets are
/// compared as linear forms, so no parameter value is needed.
pub fn exact_overlap_scan(sys: &IfsSystem, max_level: usize) -> Result<OverlapReport> {
    let n = sys.alphabet_size();
    if n.checked_pow(max_level as u32).is_none_or(|c| c > WORD_LIMIT) {
        return Err(Error::LevelOutOfRange {
            requested: max_level,
            available: (1..).take_while(|&k| n.pow(k as u32) <= WORD_LIMIT).last().unwrap_or(0),
        });
    }
    let mut primitive = Vec::new();
    let mut pairs_per_level = Vec::with_capacity(max_level);
    for level in 1..=max_level {
        let mut groups: HashMap<AffineExpr, Vec<Word>> = HashMap::new();
        for w in sys.words(level) {
            groups.entry(sys.map_at_zero(&w)?).or_default().push(w);
        }
        let mut classes: Vec<Vec<Word>> = groups.into_values().filter(|g| g.len() > 1).collect();
        classes.sort();
        let mut count = 0;
        for class in &classes {
            for (a, sigma) in class.iter().enumerate() {
                for tau in &class[a + 1..] {
                    count += 1;
                    if !splits(sys, sigma, tau)? {
                        primitive.push(OverlapPair {
                            sigma: sigma.clone(),
                            tau: tau.clone(),
                            level,
                        });
                    }
                }
            }
        }
        pairs_per_level.push(count);
    }
    primitive.sort_by(|x, y| (x.level, &x.sigma, &x.tau).cmp(&(y.level, &y.sigma, &y.tau)));
    Ok(OverlapReport {
        max_level,
        primitive,
        pairs_per_level,
    })
}

/// Whether `σ = σ'σ''`, `τ = τ'τ''` with `S_σ' = S_τ'` and `S_σ'' = S_τ''`.
fn splits(sys: &IfsSystem, sigma: &Word, tau: &Word) -> Result<bool> {
    for cut in 1..sigma.len() {
        let (s1, s2) = sigma.split_at(cut);
        let (t1, t2) = tau.split_at(cut);
        if sys.map_at_zero(&s1)? == sys.map_at_zero(&t1)? && sys.map_at_zero(&s2)? == sys.map_at_zero(&t2)? {
            return Ok(true);
        }
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples::Example;

    #[test]
    fn example_two_has_one_primitive_overlap_at_level_two() {
        let report = exact_overlap_scan(&Example::Two.system(), 3).unwrap();
        let level_two: Vec<_> = report.primitive.iter().filter(|p| p.level == 2).collect();
        assert_eq!(level_two.len(), 1);
        assert_eq!(level_two[0].sigma, "15".parse().unwrap());
        assert_eq!(level_two[0].tau, "23".parse().unwrap());
        assert_eq!(report.pairs_per_level[0], 0);
        // every level-3 pair built from 15 ~ 23 by prefixing or suffixing is not primitive
        assert!(report.pairs_per_level[2] >= 10);
        assert!(report
            .primitive
            .iter()
            .all(|p| p.level != 3 || !(p.sigma.symbols()[..2] == [1, 5] && p.tau.symbols()[..2] == [2, 3])));
    }

    #[test]
    fn example_one_has_none() {
        let report = exact_overlap_scan(&Example::One.system(), 6).unwrap();
        assert!(report.primitive.is_empty());
        assert!(report.pairs_per_level.iter().all(|&c| c == 0));
    }

    #[test]
    fn oversized_scan_rejected() {
        assert!(matches!(
            exact_overlap_scan(&Example::Two.system(), 20),
            Err(Error::LevelOutOfRange { .. })
        ));
    }
}
