use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};
use std::fmt;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::arith::{AffineExpr, ParamPoint, Rational, RationalInterval};
use crate::error::{Error, Result};
use crate::ifs::{IfsSystem, Word};

/// Largest number of components enumerated for the containment check.
const CONTAINMENT_COMPONENT_LIMIT: usize = 300_000;

/// The finite union `V^(D) = ⋃_{|σ| ≤ D} S_σ(seed)` approximating a
/// non-convex open set, with `seed ⊂ (0, 1)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OpenSetApprox {
    pub seed: RationalInterval,
    pub depth: usize,
}

impl OpenSetApprox {
    pub fn new(seed: RationalInterval, depth: usize) -> Result<Self> {
        if seed.lo() < &Rational::zero() || seed.hi() > &Rational::one() {
            return Err(Error::InvalidSystem(format!("open set seed {seed} is not inside (0, 1)")));
        }
        Ok(OpenSetApprox { seed, depth })
    }
}

impl fmt::Display for OpenSetApprox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "union of S_w{} over |w| <= {}", self.seed, self.depth)
    }
}

type Interval = (AffineExpr, AffineExpr);

/// Decides whether pieces of a truncated union `V^(d)` meet, by recursing
/// through the maps instead of enumerating components. Results are memoized.
pub struct OverlapOracle<'a> {
    sys: &'a IfsSystem,
    pt: &'a ParamPoint,
    seed: Interval,
    unit: Interval,
    translate_memo: HashMap<(AffineExpr, usize), Option<(Word, Word)>>,
    hit_memo: HashMap<(Interval, usize), Option<Word>>,
}

impl<'a> OverlapOracle<'a> {
    pub fn new(sys: &'a IfsSystem, pt: &'a ParamPoint, seed: &RationalInterval) -> Self {
        OverlapOracle {
            sys,
            pt,
            seed: (
                AffineExpr::constant(seed.lo().clone()),
                AffineExpr::constant(seed.hi().clone()),
            ),
            unit: (AffineExpr::zero(), AffineExpr::constant(Rational::one())),
            translate_memo: HashMap::new(),
            hit_memo: HashMap::new(),
        }
    }

    /// Open intervals meet iff `max(lo) < min(hi)`.
    fn meets(&self, x: &Interval, y: &Interval) -> Result<bool> {
        Ok(self.pt.compare(&x.0, &y.1)? == Ordering::Less && self.pt.compare(&y.0, &x.1)? == Ordering::Less)
    }

    /// A component `S_w(seed)` of `V^(depth)` meeting the open interval, if any.
    pub fn hits(&mut self, interval: &Interval, depth: usize) -> Result<Option<Word>> {
        let key = (interval.clone(), depth);
        if let Some(r) = self.hit_memo.get(&key) {
            return Ok(r.clone());
        }
        let result = if !self.meets(interval, &self.unit)? {
            None
        } else if self.meets(interval, &self.seed)? {
            Some(Word::empty())
        } else if depth == 0 {
            None
        } else {
            let m = self.sys.m();
            let mut found = None;
            for j in self.sys.symbols() {
                let d = self.sys.offset(j)?;
                let pulled = ((&interval.0 - d).scale(&m), (&interval.1 - d).scale(&m));
                if let Some(w) = self.hits(&pulled, depth - 1)? {
                    found = Some(w.prepend(j));
                    break;
                }
            }
            found
        };
        self.hit_memo.insert(key, result.clone());
        Ok(result)
    }

    /// Whether `V^(depth)` meets `V^(depth) + x`, with component words
    /// `(A, B)` such that `S_A(seed)` meets `S_B(seed) + x`.
    pub fn translate_overlap(&mut self, x: &AffineExpr, depth: usize) -> Result<Option<(Word, Word)>> {
        let key = (x.clone(), depth);
        if let Some(r) = self.translate_memo.get(&key) {
            return Ok(r.clone());
        }
        let result = self.translate_overlap_uncached(x, depth)?;
        self.translate_memo.insert(key, result.clone());
        Ok(result)
    }

    fn translate_overlap_uncached(&mut self, x: &AffineExpr, depth: usize) -> Result<Option<(Word, Word)>> {
        if self.pt.abs_cmp(x, &Rational::one())? != Ordering::Less {
            return Ok(None);
        }
        let shifted_down = (&self.seed.0 - x, &self.seed.1 - x);
        if let Some(b) = self.hits(&shifted_down, depth)? {
            return Ok(Some((Word::empty(), b)));
        }
        let shifted_up = (&self.seed.0 + x, &self.seed.1 + x);
        if let Some(a) = self.hits(&shifted_up, depth)? {
            return Ok(Some((a, Word::empty())));
        }
        if depth == 0 {
            return Ok(None);
        }
        for i in self.sys.symbols() {
            for j in self.sys.symbols() {
                let y = self.sys.child_displacement(x, i, j)?;
                if let Some((a, b)) = self.translate_overlap(&y, depth - 1)? {
                    return Ok(Some((a.prepend(i), b.prepend(j))));
                }
            }
        }
        Ok(None)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OscPair {
    pub i: u16,
    pub j: u16,
    pub disjoint: bool,
    /// Words `(σ, τ)` with `S_σ(seed)` meeting `S_τ(seed)`, `σ` starting with `i`
    /// and `τ` with `j`.
    pub witness: Option<(Word, Word)>,
    /// Whether the two witness components coincide.
    pub identical_components: Option<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct OscReport {
    pub open_set: OpenSetApprox,
    pub containment: bool,
    /// Depth `d` for which `S_i(V^(d)) ⊆ V^(d+1)` was checked component by component.
    pub containment_depth: usize,
    pub pairs: Vec<OscPair>,
    pub first_violation: Option<(u16, u16)>,
    pub passed: bool,
    pub caveats: Vec<String>,
}

fn component(sys: &IfsSystem, seed: &RationalInterval, w: &Word) -> Result<Interval> {
    let start = sys.map_at_zero(w)?;
    let scale = sys.m_pow(w.len()).recip();
    Ok((start.add_constant(&(seed.lo() * &scale)), start.add_constant(&(seed.hi() * &scale))))
}

/// Checks containment `S_i(V) ⊆ V` and pairwise disjointness of the first-level
/// images `S_i(V)` for the truncated union `V = V^(D)`.
pub fn verify_osc_open_set(sys: &IfsSystem, pt: &ParamPoint, open_set: &OpenSetApprox) -> Result<OscReport> {
    let sys = sys.normalized(pt);
    let n = sys.alphabet_size();
    let mut caveats = vec![format!(
        "open set truncated at depth {}: results concern the finite union only",
        open_set.depth
    )];

    // Largest depth whose components (one level deeper) fit the enumeration limit.
    let mut containment_depth = 0;
    let mut total = 1 + n;
    while containment_depth < open_set.depth {
        let next = total.saturating_add(n.saturating_pow(containment_depth as u32 + 2));
        if next > CONTAINMENT_COMPONENT_LIMIT {
            break;
        }
        total = next;
        containment_depth += 1;
    }
    if containment_depth < open_set.depth {
        caveats.push(format!(
            "containment enumerated up to depth {containment_depth} only"
        ));
    }
    let mut known: HashSet<Interval> = HashSet::new();
    let mut inner = Vec::new();
    for k in 0..=containment_depth + 1 {
        for w in sys.words(k) {
            let c = component(&sys, &open_set.seed, &w)?;
            if k <= containment_depth {
                inner.push(c.clone());
            }
            known.insert(c);
        }
    }
    let inv_m = sys.m().recip();
    let mut containment = true;
    'outer: for c in &inner {
        for i in sys.symbols() {
            let d = sys.offset(i)?;
            let image = (d + &c.0.scale(&inv_m), d + &c.1.scale(&inv_m));
            if !known.contains(&image) {
                containment = false;
                break 'outer;
            }
        }
    }

    let mut oracle = OverlapOracle::new(&sys, pt, &open_set.seed);
    let mut pairs = Vec::new();
    let mut first_violation = None;
    for i in sys.symbols() {
        for j in sys.symbols().filter(|&j| j > i) {
            let x = sys.translation_amount(&Word::new(vec![i]), &Word::new(vec![j]))?;
            let hit = oracle.translate_overlap(&x, open_set.depth)?;
            let (witness, identical) = match hit {
                Some((a, b)) => {
                    let s = a.prepend(i);
                    let t = b.prepend(j);
                    let same = s.len() == t.len()
                        && component(&sys, &open_set.seed, &s)? == component(&sys, &open_set.seed, &t)?;
                    (Some((s, t)), Some(same))
                }
                None => (None, None),
            };
            if witness.is_some() && first_violation.is_none() {
                first_violation = Some((i, j));
            }
            pairs.push(OscPair {
                i,
                j,
                disjoint: witness.is_none(),
                witness,
                identical_components: identical,
            });
        }
    }
    Ok(OscReport {
        open_set: open_set.clone(),
        containment,
        containment_depth,
        passed: containment && first_violation.is_none(),
        pairs,
        first_violation,
        caveats,
    })
}
