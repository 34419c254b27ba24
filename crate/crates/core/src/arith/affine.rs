use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::rational::{parse_rational, rational_string, Rational};

/// The linear form `p + q·a` in the construction parameter `a`.
///
/// Every cylinder endpoint, relative displacement and gap function the
/// construction produces is of this shape. Equality is componentwise.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AffineExpr {
    pub p: Rational,
    pub q: Rational,
}

impl AffineExpr {
    pub fn new(p: Rational, q: Rational) -> Self {
        AffineExpr { p, q }
    }

    pub fn zero() -> Self {
        AffineExpr::new(Rational::zero(), Rational::zero())
    }

    pub fn constant(p: Rational) -> Self {
        AffineExpr::new(p, Rational::zero())
    }

    /// The parameter `a` itself.
    pub fn param() -> Self {
        AffineExpr::new(Rational::zero(), Rational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.p.is_zero() && self.q.is_zero()
    }

    pub fn is_constant(&self) -> bool {
        self.q.is_zero()
    }

    pub fn eval(&self, a: &Rational) -> Rational {
        &self.p + &self.q * a
    }

    /// The value of `a` where the form vanishes, if it is non-constant.
    pub fn root(&self) -> Option<Rational> {
        if self.q.is_zero() {
            None
        } else {
            Some(-&self.p / &self.q)
        }
    }

    pub fn scale(&self, k: &Rational) -> Self {
        AffineExpr::new(&self.p * k, &self.q * k)
    }

    pub fn add_constant(&self, c: &Rational) -> Self {
        AffineExpr::new(&self.p + c, self.q.clone())
    }
}

impl fmt::Debug for AffineExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for AffineExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.p.is_zero(), self.q.is_zero()) {
            (_, true) => write!(f, "{}", self.p),
            (true, false) => write!(f, "{}·a", self.q),
            (false, false) => {
                let op = if self.q.is_negative() { '-' } else { '+' };
                write!(f, "{} {} {}·a", self.p, op, self.q.abs())
            }
        }
    }
}

impl Add<&AffineExpr> for &AffineExpr {
    type Output = AffineExpr;
    fn add(self, rhs: &AffineExpr) -> AffineExpr {
        AffineExpr::new(&self.p + &rhs.p, &self.q + &rhs.q)
    }
}

impl Sub<&AffineExpr> for &AffineExpr {
    type Output = AffineExpr;
    fn sub(self, rhs: &AffineExpr) -> AffineExpr {
        AffineExpr::new(&self.p - &rhs.p, &self.q - &rhs.q)
    }
}

impl Add for AffineExpr {
    type Output = AffineExpr;
    fn add(self, rhs: AffineExpr) -> AffineExpr {
        &self + &rhs
    }
}

impl Sub for AffineExpr {
    type Output = AffineExpr;
    fn sub(self, rhs: AffineExpr) -> AffineExpr {
        &self - &rhs
    }
}

impl Neg for &AffineExpr {
    type Output = AffineExpr;
    fn neg(self) -> AffineExpr {
        AffineExpr::new(-&self.p, -&self.q)
    }
}

impl Neg for AffineExpr {
    type Output = AffineExpr;
    fn neg(self) -> AffineExpr {
        -&self
    }
}

impl Mul<&Rational> for &AffineExpr {
    type Output = AffineExpr;
    fn mul(self, k: &Rational) -> AffineExpr {
        self.scale(k)
    }
}

#[derive(Serialize, Deserialize)]
struct AffineWire {
    p: String,
    q: String,
}

impl Serialize for AffineExpr {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        AffineWire {
            p: rational_string(&self.p),
            q: rational_string(&self.q),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for AffineExpr {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let wire = AffineWire::deserialize(deserializer)?;
        let p = parse_rational(&wire.p).map_err(D::Error::custom)?;
        let q = parse_rational(&wire.q).map_err(D::Error::custom)?;
        Ok(AffineExpr::new(p, q))
    }
}
