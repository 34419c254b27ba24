use std::cmp::Ordering;
use std::collections::HashMap;

use num_traits::One;
use serde::Serialize;

use super::{canonical_set, Valued};
use crate::arith::{AffineExpr, ParamPoint, Rational};
use crate::error::Result;
use crate::ifs::{IfsSystem, Word};

/// A normalized relative translation `a_{σ,τ}` with a pair realizing it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Displacement {
    pub value: AffineExpr,
    pub witness: Option<(Word, Word)>,
}

fn keep(pt: &ParamPoint, v: &AffineExpr, bound: &Rational, inclusive: bool) -> Result<bool> {
    Ok(match pt.abs_cmp(v, bound)? {
        Ordering::Less => true,
        Ordering::Equal => inclusive,
        Ordering::Greater => false,
    })
}

/// Sets `D_1 … D_K` of displacements `a_{σ,τ}` (`|σ| = |τ| = k`) with
/// `|a_{σ,τ}|` below `bound` (or at most `bound` when `inclusive`).
///
/// Built breadth-first via `a_{σi,τj} = m·a_{σ,τ} + m·(d_j − d_i)`. Pruning a
/// pair with `|a| ≥ bound ≥ 1` is safe: its children satisfy
/// `|a'| ≥ m|a| − (m − 1) ≥ bound`.
///
/// Every level comes back canonically ordered. The zero displacement keeps
/// a witness with `σ ≠ τ` whenever one exists (an exact overlap).
pub fn displacement_levels(
    sys: &IfsSystem,
    pt: &ParamPoint,
    max_level: usize,
    bound: &Rational,
    inclusive: bool,
) -> Result<Vec<Vec<Displacement>>> {
    assert!(bound >= &Rational::one(), "pruning needs a bound of at least 1");
    let sys = sys.normalized(pt);
    let mut frontier = vec![Displacement {
        value: AffineExpr::zero(),
        witness: Some((Word::empty(), Word::empty())),
    }];
    let mut levels = Vec::with_capacity(max_level);
    for _ in 0..max_level {
        let mut found: HashMap<AffineExpr, (Word, Word)> = HashMap::new();
        let mut order = Vec::new();
        for parent in &frontier {
            let (ps, pt_word) = parent.witness.clone().expect("BFS keeps witnesses");
            for i in sys.symbols() {
                for j in sys.symbols() {
                    let child = sys.child_displacement(&parent.value, i, j)?;
                    if !keep(pt, &child, bound, inclusive)? {
                        continue;
                    }
                    let mut witness = (ps.with(i), pt_word.with(j));
                    if child.is_zero() && witness.1 < witness.0 {
                        std::mem::swap(&mut witness.0, &mut witness.1);
                    }
                    match found.get_mut(&child) {
                        None => {
                            order.push(child.clone());
                            found.insert(child, witness);
                        }
                        Some(existing) => {
                            if child.is_zero() && existing.0 == existing.1 && witness.0 != witness.1 {
                                *existing = witness;
                            }
                        }
                    }
                }
            }
        }
        let sorted = canonical_set(order, pt)?;
        frontier = sorted
            .into_iter()
            .map(|value| {
                let witness = found.remove(&value);
                Displacement { value, witness }
            })
            .collect();
        levels.push(frontier.clone());
    }
    Ok(levels)
}

#[derive(Clone, Debug, Serialize)]
pub struct WspLevel {
    pub level: usize,
    /// Number of distinct displacements in `(−1, 1)`.
    pub displacements: usize,
    pub min_nonzero: Option<Valued>,
    pub witness: Option<(Word, Word)>,
    /// A pair `σ ≠ τ` with `S_σ = S_τ`, if the zero displacement has one.
    pub exact_overlap: Option<(Word, Word)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct WspReport {
    pub max_level: usize,
    pub levels: Vec<WspLevel>,
    /// Smallest nonzero `|a_{σ,τ}|` over all levels; `None` means every
    /// nonzero displacement has absolute value at least 1.
    pub min_nonzero: Option<Valued>,
    pub witness: Option<(Word, Word)>,
    pub caveats: Vec<String>,
}

impl WspReport {
    pub fn min_expr(&self) -> Option<&AffineExpr> {
        self.min_nonzero.as_ref().map(|v| &v.expr)
    }
}

/// Smallest nonzero normalized displacement up to level `max_level`.
pub fn wsp_min_displacement(sys: &IfsSystem, pt: &ParamPoint, max_level: usize) -> Result<WspReport> {
    let levels = displacement_levels(sys, pt, max_level, &Rational::one(), false)?;
    let mut best: Option<(AffineExpr, (Word, Word))> = None;
    let mut out = Vec::with_capacity(levels.len());
    for (idx, level) in levels.iter().enumerate() {
        let mut level_best: Option<(AffineExpr, (Word, Word))> = None;
        let mut exact_overlap = None;
        for d in level {
            let witness = d.witness.clone().expect("BFS keeps witnesses");
            if d.value.is_zero() {
                if witness.0 != witness.1 {
                    exact_overlap = Some(witness);
                }
                continue;
            }
            let abs = pt.abs(&d.value)?;
            let better = match &level_best {
                None => true,
                Some((cur, _)) => pt.compare(&abs, cur)? == Ordering::Less,
            };
            if better {
                let oriented = if abs == d.value { witness } else { (witness.1, witness.0) };
                level_best = Some((abs, oriented));
            }
        }
        if let Some((v, w)) = &level_best {
            let better = match &best {
                None => true,
                Some((cur, _)) => pt.compare(v, cur)? == Ordering::Less,
            };
            if better {
                best = Some((v.clone(), w.clone()));
            }
        }
        out.push(WspLevel {
            level: idx + 1,
            displacements: level.len(),
            min_nonzero: level_best.as_ref().map(|(v, _)| Valued::new(v.clone(), pt)),
            witness: level_best.map(|(_, w)| w),
            exact_overlap,
        });
    }
    let mut caveats = vec![format!(
        "finite search: displacements of words up to length {max_level} only"
    )];
    if out.iter().any(|l| l.exact_overlap.is_some()) {
        caveats.push("exact overlaps present: zero displacements from distinct words excluded".into());
    }
    Ok(WspReport {
        max_level,
        levels: out,
        min_nonzero: best.as_ref().map(|(v, _)| Valued::new(v.clone(), pt)),
        witness: best.map(|(_, w)| w),
        caveats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use crate::examples::Example;
    use std::collections::BTreeSet;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    /// All `a_{σ,τ}` at level `k` with `|a| < 1`, by enumerating every pair.
    fn brute_force(sys: &IfsSystem, pt: &ParamPoint, k: usize) -> BTreeSet<AffineExpr> {
        let sys = sys.normalized(pt);
        let starts: Vec<AffineExpr> = sys.words(k).map(|x| sys.map_at_zero(&x).unwrap()).collect();
        let scale = sys.m_pow(k);
        let mut out = BTreeSet::new();
        for s in &starts {
            for t in &starts {
                let v = (t - s).scale(&scale);
                if pt.abs_cmp(&v, &Rational::one()).unwrap() == Ordering::Less {
                    out.insert(v);
                }
            }
        }
        out
    }

    #[test]
    fn bfs_matches_enumeration() {
        for (sys, pt, kmax) in [
            (Example::One.system(), Example::One.thue_morse_point(), 5),
            (Example::One.system(), ParamPoint::exact(rat(1, 8)), 5),
            (Example::Two.system(), Example::Two.thue_morse_point(), 3),
            (Example::Two.system(), ParamPoint::exact(rat(1, 20)), 3),
        ] {
            let levels = displacement_levels(&sys, &pt, kmax, &Rational::one(), false).unwrap();
            for k in 1..=kmax {
                let bfs: BTreeSet<AffineExpr> = levels[k - 1].iter().map(|d| d.value.clone()).collect();
                assert_eq!(bfs, brute_force(&sys, &pt, k), "level {k}");
            }
        }
    }

    #[test]
    fn witnesses_realize_values() {
        let sys = Example::One.system();
        let pt = Example::One.thue_morse_point();
        for level in displacement_levels(&sys, &pt, 4, &Rational::one(), false).unwrap() {
            for d in level {
                let (s, t) = d.witness.unwrap();
                assert_eq!(sys.translation_amount(&s, &t).unwrap(), d.value);
            }
        }
    }

    #[test]
    fn level_one_minimum_is_seven_a() {
        let pt = Example::One.thue_morse_point();
        let report = wsp_min_displacement(&Example::One.system(), &pt, 1).unwrap();
        assert_eq!(report.min_expr(), Some(&AffineExpr::new(rat(0, 1), rat(7, 1))));
        assert_eq!(report.witness, Some((w("1"), w("2"))));
        assert_eq!(report.min_nonzero.unwrap().decimal, "0.948252097479");
    }

    #[test]
    fn minimum_is_non_increasing() {
        let pt = Example::One.thue_morse_point();
        let sys = Example::One.system();
        let mut prev: Option<AffineExpr> = None;
        for k in 1..=7 {
            let cur = wsp_min_displacement(&sys, &pt, k).unwrap().min_expr().cloned().unwrap();
            if let Some(p) = &prev {
                assert_ne!(pt.compare(&cur, p).unwrap(), Ordering::Greater);
            }
            prev = Some(cur);
        }
    }

    #[test]
    fn example_two_exact_overlap_witness() {
        let pt = Example::Two.thue_morse_point();
        let report = wsp_min_displacement(&Example::Two.system(), &pt, 2).unwrap();
        assert_eq!(report.levels[0].exact_overlap, None);
        assert_eq!(report.levels[1].exact_overlap, Some((w("15"), w("23"))));
        let min = report.min_expr().unwrap();
        assert!(!min.is_zero());
        // nonzero minimum agrees with the enumeration
        let sys = Example::Two.system();
        let mut brute: Option<AffineExpr> = None;
        for k in 1..=2 {
            for v in brute_force(&sys, &pt, k) {
                if v.is_zero() {
                    continue;
                }
                let a = pt.abs(&v).unwrap();
                if brute.as_ref().is_none_or(|b| pt.compare(&a, b).unwrap() == Ordering::Less) {
                    brute = Some(a);
                }
            }
        }
        assert_eq!(Some(min), brute.as_ref());
    }
}
