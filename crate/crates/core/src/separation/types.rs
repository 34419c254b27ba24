use std::cmp::Ordering;
use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Serialize, Serializer};

use super::open_set::{OpenSetApprox, OverlapOracle};
use super::{canonical_set, Valued};
use crate::arith::{AffineExpr, ParamPoint, Rational};
use crate::error::Result;
use crate::ifs::{IfsSystem, Word};

/// The canonically ordered set of normalized displacements `a_{σ,τ}` of the
/// neighbours of a cylinder, always including `0` for the cylinder itself.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct NeighborhoodType {
    displacements: Vec<AffineExpr>,
}

impl NeighborhoodType {
    pub fn displacements(&self) -> &[AffineExpr] {
        &self.displacements
    }

    pub fn len(&self) -> usize {
        self.displacements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.displacements.is_empty()
    }

    pub fn contains(&self, v: &AffineExpr) -> bool {
        self.displacements.contains(v)
    }

    /// The type of the root cylinder.
    pub fn root() -> Self {
        NeighborhoodType {
            displacements: vec![AffineExpr::zero()],
        }
    }
}

fn biguint_string<S: Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

#[derive(Clone, Debug, Serialize)]
pub struct TypeEntry {
    #[serde(rename = "type")]
    pub ty: NeighborhoodType,
    pub decimals: Vec<String>,
    /// Number of words of this level with this type.
    #[serde(serialize_with = "biguint_string")]
    pub count: BigUint,
    /// Lexicographically first word of this level with this type.
    pub witness: Word,
}

#[derive(Clone, Debug, Serialize)]
pub struct LevelTypes {
    pub level: usize,
    pub distinct: usize,
    /// Ordered by witness word.
    pub types: Vec<TypeEntry>,
}

impl LevelTypes {
    pub fn type_of_witness(&self, w: &Word) -> Option<&NeighborhoodType> {
        self.types.iter().find(|t| &t.witness == w).map(|t| &t.ty)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TypeCensus {
    /// `"convex"` or a description of the approximated open set.
    pub open_set: String,
    pub levels: Vec<LevelTypes>,
    pub caveats: Vec<String>,
}

impl TypeCensus {
    pub fn distinct_counts(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.distinct).collect()
    }
}

/// Per-level convex types with counts and first witnesses, computed by
/// iterating the type automaton: the type of `σi` depends only on the type
/// of `σ` and on `i`.
struct TypeAutomaton<'a> {
    sys: &'a IfsSystem,
    pt: &'a ParamPoint,
    transitions: HashMap<(NeighborhoodType, u16), NeighborhoodType>,
}

impl<'a> TypeAutomaton<'a> {
    fn child(&mut self, parent: &NeighborhoodType, i: u16) -> Result<NeighborhoodType> {
        if let Some(t) = self.transitions.get(&(parent.clone(), i)) {
            return Ok(t.clone());
        }
        let one = Rational::one();
        let mut values = Vec::new();
        for v in &parent.displacements {
            for j in self.sys.symbols() {
                let c = self.sys.child_displacement(v, i, j)?;
                if self.pt.abs_cmp(&c, &one)? == Ordering::Less {
                    values.push(c);
                }
            }
        }
        let ty = NeighborhoodType {
            displacements: canonical_set(values, self.pt)?,
        };
        self.transitions.insert((parent.clone(), i), ty.clone());
        Ok(ty)
    }

    /// Levels `1..=max_level` as (type, count, witness) triples ordered by witness.
    fn run(&mut self, max_level: usize) -> Result<Vec<Vec<(NeighborhoodType, BigUint, Word)>>> {
        let mut current = vec![(NeighborhoodType::root(), BigUint::one(), Word::empty())];
        let mut out = Vec::with_capacity(max_level);
        for _ in 0..max_level {
            let mut index: HashMap<NeighborhoodType, usize> = HashMap::new();
            let mut next: Vec<(NeighborhoodType, BigUint, Word)> = Vec::new();
            // Parents are ordered by witness, so first insertion is the least witness.
            for (ty, count, witness) in &current {
                for i in self.sys.symbols() {
                    let child = self.child(ty, i)?;
                    match index.get(&child) {
                        Some(&k) => next[k].1 += count,
                        None => {
                            index.insert(child.clone(), next.len());
                            next.push((child, count.clone(), witness.with(i)));
                        }
                    }
                }
            }
            next.sort_by(|a, b| a.2.cmp(&b.2));
            out.push(next.clone());
            current = next;
        }
        Ok(out)
    }
}

fn entry(ty: NeighborhoodType, count: BigUint, witness: Word, pt: &ParamPoint) -> TypeEntry {
    let decimals = ty
        .displacements
        .iter()
        .map(|v| Valued::new(v.clone(), pt).decimal)
        .collect();
    TypeEntry {
        ty,
        decimals,
        count,
        witness,
    }
}

/// Neighbourhood types for the convex hull `(0, 1)`: cylinders of equal
/// length are neighbours iff their open hulls meet, i.e. `|a_{σ,τ}| < 1`.
pub fn convex_type_census(sys: &IfsSystem, pt: &ParamPoint, max_level: usize) -> Result<TypeCensus> {
    let sys = sys.normalized(pt);
    let levels = TypeAutomaton {
        sys: &sys,
        pt,
        transitions: HashMap::new(),
    }
    .run(max_level)?;
    let levels = levels
        .into_iter()
        .enumerate()
        .map(|(idx, lvl)| LevelTypes {
            level: idx + 1,
            distinct: lvl.len(),
            types: lvl.into_iter().map(|(t, c, w)| entry(t, c, w, pt)).collect(),
        })
        .collect();
    Ok(TypeCensus {
        open_set: "convex".into(),
        levels,
        caveats: Vec::new(),
    })
}

/// Neighbourhood types for the non-convex open set approximated by
/// `open_set`: the convex neighbours `τ` of `σ` whose images of the
/// truncated set meet that of `σ`.
///
/// A non-convex neighbour is always a convex one, so each type is the convex
/// type filtered through the overlap oracle.
pub fn constructed_v_type_census(
    sys: &IfsSystem,
    pt: &ParamPoint,
    open_set: &OpenSetApprox,
    max_level: usize,
) -> Result<TypeCensus> {
    let sys = sys.normalized(pt);
    let convex = TypeAutomaton {
        sys: &sys,
        pt,
        transitions: HashMap::new(),
    }
    .run(max_level)?;
    let mut oracle = OverlapOracle::new(&sys, pt, &open_set.seed);
    let mut keep: HashMap<AffineExpr, bool> = HashMap::new();
    let mut levels = Vec::with_capacity(max_level);
    for (idx, lvl) in convex.into_iter().enumerate() {
        let mut index: HashMap<NeighborhoodType, usize> = HashMap::new();
        let mut merged: Vec<(NeighborhoodType, BigUint, Word)> = Vec::new();
        for (ty, count, witness) in lvl {
            let mut kept = Vec::with_capacity(ty.len());
            for v in ty.displacements {
                let hit = match keep.get(&v) {
                    Some(&b) => b,
                    None => {
                        let b = v.is_zero() || oracle.translate_overlap(&v, open_set.depth)?.is_some();
                        keep.insert(v.clone(), b);
                        b
                    }
                };
                if hit {
                    kept.push(v);
                }
            }
            let filtered = NeighborhoodType { displacements: kept };
            match index.get(&filtered) {
                Some(&k) => merged[k].1 += count,
                None => {
                    index.insert(filtered.clone(), merged.len());
                    merged.push((filtered, count, witness));
                }
            }
        }
        levels.push(LevelTypes {
            level: idx + 1,
            distinct: merged.len(),
            types: merged.into_iter().map(|(t, c, w)| entry(t, c, w, pt)).collect(),
        });
    }
    let mut caveats = vec![format!(
        "open set truncated at depth {}: neighbour tests are for the finite union only",
        open_set.depth
    )];
    if open_set.depth < max_level + 2 {
        caveats.push(format!(
            "truncation depth {} is below level + 2 = {}",
            open_set.depth,
            max_level + 2
        ));
    }
    Ok(TypeCensus {
        open_set: open_set.to_string(),
        levels,
        caveats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use crate::examples::Example;
    use std::collections::{BTreeMap, BTreeSet};

    /// Types by direct definition: for each word, the set of `a_{σ,τ}` with `|a| < 1`.
    fn direct_types(sys: &IfsSystem, pt: &ParamPoint, k: usize) -> BTreeMap<Word, BTreeSet<AffineExpr>> {
        let sys = sys.normalized(pt);
        let words: Vec<Word> = sys.words(k).collect();
        let starts: Vec<AffineExpr> = words.iter().map(|w| sys.map_at_zero(w).unwrap()).collect();
        let scale = sys.m_pow(k);
        let mut out = BTreeMap::new();
        for (w, s) in words.iter().zip(&starts) {
            let set = starts
                .iter()
                .map(|t| (t - s).scale(&scale))
                .filter(|v| pt.abs_cmp(v, &Rational::one()).unwrap() == Ordering::Less)
                .collect();
            out.insert(w.clone(), set);
        }
        out
    }

    #[test]
    fn automaton_matches_definition() {
        for (sys, pt, kmax) in [
            (Example::One.system(), Example::One.thue_morse_point(), 5),
            (Example::One.system(), ParamPoint::exact(rat(1, 8)), 5),
            (Example::Two.system(), Example::Two.thue_morse_point(), 3),
        ] {
            let census = convex_type_census(&sys, &pt, kmax).unwrap();
            for k in 1..=kmax {
                let direct = direct_types(&sys, &pt, k);
                let distinct: BTreeSet<_> = direct.values().cloned().collect();
                let level = &census.levels[k - 1];
                assert_eq!(level.distinct, distinct.len(), "level {k}");
                let total: BigUint = level.types.iter().map(|t| t.count.clone()).sum();
                assert_eq!(total, BigUint::from(direct.len()));
                for t in &level.types {
                    let expect = &direct[&t.witness];
                    let got: BTreeSet<_> = t.ty.displacements().iter().cloned().collect();
                    assert_eq!(&got, expect);
                    let first = direct.iter().find(|(_, s)| *s == expect).unwrap().0;
                    assert_eq!(first, &t.witness);
                    let n = direct.values().filter(|s| *s == expect).count();
                    assert_eq!(t.count, BigUint::from(n));
                }
            }
        }
    }

    #[test]
    fn union_of_types_is_the_symmetric_displacement_set() {
        let pt = Example::One.thue_morse_point();
        let sys = Example::One.system();
        let census = convex_type_census(&sys, &pt, 6).unwrap();
        let bfs = super::super::displacement_levels(&sys, &pt, 6, &Rational::one(), false).unwrap();
        for (level, d) in census.levels.iter().zip(bfs) {
            let union: BTreeSet<AffineExpr> = level
                .types
                .iter()
                .flat_map(|t| t.ty.displacements().iter().cloned())
                .collect();
            let expect: BTreeSet<AffineExpr> = d.into_iter().map(|x| x.value).collect();
            assert_eq!(union, expect);
            assert!(union.iter().all(|v| union.contains(&-v)));
            assert!(level.types.iter().all(|t| t.ty.contains(&AffineExpr::zero())));
        }
    }

    #[test]
    fn convex_counts() {
        let pt = Example::One.thue_morse_point();
        let census = convex_type_census(&Example::One.system(), &pt, 8).unwrap();
        assert_eq!(census.distinct_counts(), [3, 5, 7, 9, 11, 13, 15, 17]);
        let control = convex_type_census(&Example::One.system(), &ParamPoint::exact(rat(1, 8)), 8).unwrap();
        assert_eq!(control.distinct_counts(), [3, 5, 7, 7, 7, 7, 7, 7]);
    }

    #[test]
    fn constructed_v_example_two() {
        let pt = Example::Two.thue_morse_point();
        let open = OpenSetApprox::new(Example::Two.open_set_seed(), 7).unwrap();
        let census = constructed_v_type_census(&Example::Two.system(), &pt, &open, 5).unwrap();
        let sixteen_a = AffineExpr::new(rat(0, 1), rat(16, 1));
        let expected: BTreeSet<Vec<AffineExpr>> = [
            vec![AffineExpr::zero()],
            vec![AffineExpr::zero(), sixteen_a.clone()],
            vec![-&sixteen_a, AffineExpr::zero()],
        ]
        .into_iter()
        .collect();
        for level in &census.levels {
            let got: BTreeSet<Vec<AffineExpr>> =
                level.types.iter().map(|t| t.ty.displacements().to_vec()).collect();
            assert_eq!(got, expected, "level {}", level.level);
        }
    }

    #[test]
    fn convex_seed_reproduces_convex_census() {
        let pt = Example::One.thue_morse_point();
        let sys = Example::One.system();
        let open = OpenSetApprox::new(crate::arith::RationalInterval::new(rat(0, 1), rat(1, 1)).unwrap(), 0).unwrap();
        let v = constructed_v_type_census(&sys, &pt, &open, 5).unwrap();
        let c = convex_type_census(&sys, &pt, 5).unwrap();
        assert_eq!(v.distinct_counts(), c.distinct_counts());
    }
}
