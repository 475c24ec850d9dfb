//! Points, affine functions, hyperplanes, and axis-aligned boxes.
//!
//! An affine function is a pair `(v, b)` acting as `x -> <v, x> + b`. Two
//! affine functions that agree on a non-empty open set are equal, which makes
//! function equality decidable by comparing coefficients exactly. Boxes are
//! closed L-infinity balls `center + radius * B`, the only solid domains the
//! engine accepts.

use crate::rat::{format_rat, rat_serde, rat_vec_serde, Rat};
use crate::Error;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;

/// A point of R^m with exact rational coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point {
    #[serde(with = "rat_vec_serde")]
    pub coords: Vec<Rat>,
}

impl Point {
    pub fn new(coords: Vec<Rat>) -> Self {
        Point { coords }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn origin(m: usize) -> Self {
        Point {
            coords: vec![Rat::zero(); m],
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(format_rat).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// `x -> <v, x> + b` with exact rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct AffineFunction {
    #[serde(with = "rat_vec_serde")]
    pub v: Vec<Rat>,
    #[serde(with = "rat_serde")]
    pub b: Rat,
}

impl AffineFunction {
    pub fn new(v: Vec<Rat>, b: Rat) -> Self {
        AffineFunction { v, b }
    }

    /// The constant function `x -> c` on R^m.
    pub fn constant(m: usize, c: Rat) -> Self {
        AffineFunction {
            v: vec![Rat::zero(); m],
            b: c,
        }
    }

    pub fn zero(m: usize) -> Self {
        Self::constant(m, Rat::zero())
    }

    pub fn dim(&self) -> usize {
        self.v.len()
    }

    pub fn is_constant(&self) -> bool {
        self.v.iter().all(|c| c.is_zero())
    }

    /// Exact evaluation `<v, x> + b`.
    pub fn eval(&self, x: &Point) -> Result<Rat, Error> {
        if x.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.dim(),
            });
        }
        let mut acc = self.b.clone();
        for (vi, xi) in self.v.iter().zip(&x.coords) {
            acc += vi * xi;
        }
        Ok(acc)
    }

    /// Equality as functions; exact coefficient comparison.
    pub fn fn_eq(&self, other: &AffineFunction) -> Result<bool, Error> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(self == other)
    }

    /// Componentwise sum.
    pub fn add(&self, other: &AffineFunction) -> Result<AffineFunction, Error> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(AffineFunction {
            v: self
                .v
                .iter()
                .zip(&other.v)
                .map(|(a, b)| a + b)
                .collect(),
            b: &self.b + &other.b,
        })
    }

    pub fn sub(&self, other: &AffineFunction) -> Result<AffineFunction, Error> {
        self.add(&other.negated())
    }

    pub fn negated(&self) -> AffineFunction {
        AffineFunction {
            v: self.v.iter().map(|c| -c).collect(),
            b: -&self.b,
        }
    }

    pub fn scaled(&self, lambda: &Rat) -> AffineFunction {
        AffineFunction {
            v: self.v.iter().map(|c| c * lambda).collect(),
            b: &self.b * lambda,
        }
    }

    /// Exact `(min, max)` of this function over a closed box.
    ///
    /// `<v, x> + b` over `center + radius * B` attains its extremes at the
    /// corners matching the signs of `v`.
    pub fn range_on_box(&self, b: &SolidBox) -> Result<(Rat, Rat), Error> {
        let mid = self.eval(&b.center)?;
        let mut spread = Rat::zero();
        for vi in &self.v {
            spread += vi.abs();
        }
        spread *= &b.radius;
        Ok((&mid - &spread, mid + spread))
    }
}

impl fmt::Display for AffineFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, vi) in self.v.iter().enumerate() {
            if vi.is_zero() {
                continue;
            }
            if first {
                write!(f, "{}*x{}", format_rat(vi), i + 1)?;
                first = false;
            } else {
                write!(f, " + {}*x{}", format_rat(vi), i + 1)?;
            }
        }
        if first {
            write!(f, "{}", format_rat(&self.b))
        } else if !self.b.is_zero() {
            write!(f, " + {}", format_rat(&self.b))
        } else {
            Ok(())
        }
    }
}

/// The zero set `{g = 0}` of an affine function with nonzero gradient.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Hyperplane {
    pub g: AffineFunction,
}

impl Hyperplane {
    pub fn new(g: AffineFunction) -> Result<Self, Error> {
        if g.is_constant() {
            return Err(Error::InternalInconsistency(
                "hyperplane requires a nonzero gradient".into(),
            ));
        }
        Ok(Hyperplane { g })
    }

    pub fn dim(&self) -> usize {
        self.g.dim()
    }

    /// Canonical representative of the zero set: coefficients scaled to
    /// integers with content one, first nonzero gradient entry positive.
    /// Proportional defining functions map to the same value.
    pub fn canonical(&self) -> AffineFunction {
        canonical_direction(&self.g)
    }
}

/// Scale `(v, b)` by a positive rational so entries become coprime integers,
/// then fix the overall sign so the first nonzero gradient entry is positive.
pub(crate) fn canonical_direction(g: &AffineFunction) -> AffineFunction {
    use num_bigint::BigInt;
    use num_integer::Integer;
    let mut lcm = BigInt::from(1);
    for c in g.v.iter().chain(std::iter::once(&g.b)) {
        lcm = lcm.lcm(c.denom());
    }
    let ints: Vec<BigInt> = g
        .v
        .iter()
        .chain(std::iter::once(&g.b))
        .map(|c| c.numer() * (&lcm / c.denom()))
        .collect();
    let mut gcd = BigInt::zero();
    for c in &ints {
        gcd = gcd.gcd(c);
    }
    if gcd.is_zero() {
        gcd = BigInt::from(1);
    }
    let mut scaled: Vec<BigInt> = ints.iter().map(|c| c / &gcd).collect();
    if let Some(first) = scaled.iter().find(|c| !c.is_zero()) {
        if first.is_negative() {
            for c in &mut scaled {
                *c = -&*c;
            }
        }
    }
    let b = Rat::from_integer(scaled.pop().unwrap());
    AffineFunction {
        v: scaled.into_iter().map(Rat::from_integer).collect(),
        b,
    }
}

/// The agreement set `{f = g}` of two distinct affine functions: a hyperplane,
/// or empty when the two are parallel and never meet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AgreementSet {
    Hyperplane(Hyperplane),
    Empty,
}

/// Agreement set of two affine functions. Errors when the two are identical
/// (the set would be all of R^m, not a hyperplane).
pub fn difference_hyperplane(
    f: &AffineFunction,
    g: &AffineFunction,
) -> Result<AgreementSet, Error> {
    let d = f.sub(g)?;
    if d.is_constant() {
        if d.b.is_zero() {
            Err(Error::IdenticalComponents)
        } else {
            Ok(AgreementSet::Empty)
        }
    } else {
        Ok(AgreementSet::Hyperplane(Hyperplane { g: d }))
    }
}

/// Closed axis-aligned box `center + radius * B` with nonempty interior.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolidBox {
    pub center: Point,
    #[serde(with = "rat_serde")]
    pub radius: Rat,
}

impl SolidBox {
    pub fn new(center: Point, radius: Rat) -> Result<Self, Error> {
        if radius <= Rat::zero() {
            return Err(Error::InternalInconsistency(
                "box radius must be positive".into(),
            ));
        }
        Ok(SolidBox { center, radius })
    }

    /// The ball `Omega_n = n * B` centred at the origin.
    pub fn omega(m: usize, n: u32) -> Self {
        SolidBox {
            center: Point::origin(m),
            radius: Rat::from_integer(n.into()),
        }
    }

    pub fn dim(&self) -> usize {
        self.center.dim()
    }

    pub fn lo(&self, axis: usize) -> Rat {
        &self.center.coords[axis] - &self.radius
    }

    pub fn hi(&self, axis: usize) -> Rat {
        &self.center.coords[axis] + &self.radius
    }

    pub fn contains(&self, x: &Point) -> Result<bool, Error> {
        if x.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.dim(),
            });
        }
        Ok(self
            .center
            .coords
            .iter()
            .zip(&x.coords)
            .all(|(c, xi)| (xi - c).abs() <= self.radius))
    }

    pub fn contains_strictly(&self, x: &Point) -> Result<bool, Error> {
        if x.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.dim(),
            });
        }
        Ok(self
            .center
            .coords
            .iter()
            .zip(&x.coords)
            .all(|(c, xi)| (xi - c).abs() < self.radius))
    }

    /// Whether two closed boxes intersect.
    pub fn intersects(&self, other: &SolidBox) -> Result<bool, Error> {
        if other.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        let gap = &self.radius + &other.radius;
        Ok(self
            .center
            .coords
            .iter()
            .zip(&other.center.coords)
            .all(|(a, b)| (a - b).abs() <= gap))
    }

    /// Whether `other` is contained in this box.
    pub fn contains_box(&self, other: &SolidBox) -> Result<bool, Error> {
        if other.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        if other.radius > self.radius {
            return Ok(false);
        }
        let slack = &self.radius - &other.radius;
        Ok(self
            .center
            .coords
            .iter()
            .zip(&other.center.coords)
            .all(|(a, b)| (a - b).abs() <= slack))
    }

    /// Smallest box (cube) containing both.
    pub fn hull(&self, other: &SolidBox) -> Result<SolidBox, Error> {
        if other.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        let mut center = Vec::with_capacity(self.dim());
        let mut radius = Rat::zero();
        for i in 0..self.dim() {
            let lo = crate::rat::rat_min(self.lo(i), other.lo(i));
            let hi = crate::rat::rat_max(self.hi(i), other.hi(i));
            center.push((&lo + &hi) / Rat::from_integer(2.into()));
            let half = (&hi - &lo) / Rat::from_integer(2.into());
            if half > radius {
                radius = half;
            }
        }
        SolidBox::new(Point::new(center), radius)
    }

    /// Smallest cube containing the (closed) intersection, or `None` when the
    /// boxes are disjoint or touch in a degenerate set.
    pub fn intersection_hull(&self, other: &SolidBox) -> Result<Option<SolidBox>, Error> {
        if other.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        let mut center = Vec::with_capacity(self.dim());
        let mut radius = Rat::zero();
        for i in 0..self.dim() {
            let lo = crate::rat::rat_max(self.lo(i), other.lo(i));
            let hi = crate::rat::rat_min(self.hi(i), other.hi(i));
            if lo >= hi {
                return Ok(None);
            }
            center.push((&lo + &hi) / Rat::from_integer(2.into()));
            let half = (&hi - &lo) / Rat::from_integer(2.into());
            if half > radius {
                radius = half;
            }
        }
        Ok(Some(SolidBox::new(Point::new(center), radius)?))
    }

    /// The 2m strict inequalities describing the open interior,
    /// `radius - |x_i - c_i| > 0` split per side.
    pub fn interior_constraints(&self) -> Vec<AffineFunction> {
        let m = self.dim();
        let mut out = Vec::with_capacity(2 * m);
        for i in 0..m {
            // x_i < c_i + r  <=>  (c_i + r) - x_i > 0
            let mut v = vec![Rat::zero(); m];
            v[i] = -Rat::from_integer(1.into());
            out.push(AffineFunction::new(v, self.hi(i)));
            // x_i > c_i - r  <=>  x_i - (c_i - r) > 0
            let mut v = vec![Rat::zero(); m];
            v[i] = Rat::from_integer(1.into());
            out.push(AffineFunction::new(v, -self.lo(i)));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{int, rat};

    fn pt(coords: &[Rat]) -> Point {
        Point::new(coords.to_vec())
    }

    #[test]
    fn eval_affine_examples() {
        // f = (v=(1,2), b=3) at (1,1) -> 6
        let f = AffineFunction::new(vec![int(1), int(2)], int(3));
        assert_eq!(f.eval(&pt(&[int(1), int(1)])).unwrap(), int(6));
        // constant 5 at (7,-2) -> 5
        let f = AffineFunction::constant(2, int(5));
        assert_eq!(f.eval(&pt(&[int(7), int(-2)])).unwrap(), int(5));
        // f = (v=(2), b=-1) at (3/2) -> 2
        let f = AffineFunction::new(vec![int(2)], int(-1));
        assert_eq!(f.eval(&pt(&[rat(3, 2)])).unwrap(), int(2));
    }

    #[test]
    fn eval_dimension_mismatch() {
        let f = AffineFunction::new(vec![int(1)], int(0));
        assert!(matches!(
            f.eval(&pt(&[int(1), int(2)])),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn affine_equality_examples() {
        let t = AffineFunction::new(vec![int(1)], int(0));
        let neg_t = AffineFunction::new(vec![int(-1)], int(0));
        assert!(t.fn_eq(&t).unwrap());
        assert!(!t.fn_eq(&neg_t).unwrap());
        // proportional but distinct functions
        let f = AffineFunction::new(vec![int(2), int(4)], int(6));
        let g = AffineFunction::new(vec![int(1), int(2)], int(3));
        assert!(!f.fn_eq(&g).unwrap());
        // they differ at (1,0): 8 vs 4
        assert_eq!(f.eval(&pt(&[int(1), int(0)])).unwrap(), int(8));
        assert_eq!(g.eval(&pt(&[int(1), int(0)])).unwrap(), int(4));
    }

    #[test]
    fn difference_hyperplane_examples() {
        let t = AffineFunction::new(vec![int(1)], int(0));
        let neg_t = AffineFunction::new(vec![int(-1)], int(0));
        let one_fn = AffineFunction::constant(1, int(1));

        // {t = -t} is the hyperplane t = 0.
        match difference_hyperplane(&t, &neg_t).unwrap() {
            AgreementSet::Hyperplane(h) => {
                assert_eq!(h.g.eval(&pt(&[int(0)])).unwrap(), int(0));
                assert!(!h.g.eval(&pt(&[int(1)])).unwrap().is_zero());
            }
            AgreementSet::Empty => panic!("expected hyperplane"),
        }
        // {t = 1} is the hyperplane t = 1.
        match difference_hyperplane(&t, &one_fn).unwrap() {
            AgreementSet::Hyperplane(h) => {
                assert_eq!(h.g.eval(&pt(&[int(1)])).unwrap(), int(0));
            }
            AgreementSet::Empty => panic!("expected hyperplane"),
        }
        // t+1 and t+2 are parallel and never agree.
        let f = AffineFunction::new(vec![int(1)], int(1));
        let g = AffineFunction::new(vec![int(1)], int(2));
        assert_eq!(difference_hyperplane(&f, &g).unwrap(), AgreementSet::Empty);
        // identical functions error
        assert!(matches!(
            difference_hyperplane(&t, &t),
            Err(Error::IdenticalComponents)
        ));
    }

    #[test]
    fn agreement_evaluates_to_zero_on_hyperplane() {
        let f = AffineFunction::new(vec![int(2), int(-1)], int(3));
        let g = AffineFunction::new(vec![int(1), int(1)], int(1));
        if let AgreementSet::Hyperplane(h) = difference_hyperplane(&f, &g).unwrap() {
            // any point with f = g: x1 - 2*x2 + 2 = 0, e.g. (0, 1)
            let x = pt(&[int(0), int(1)]);
            assert_eq!(f.eval(&x).unwrap(), g.eval(&x).unwrap());
            assert_eq!(h.g.eval(&x).unwrap(), int(0));
        } else {
            panic!("expected hyperplane");
        }
    }

    #[test]
    fn box_range_of_affine() {
        // f(t) = 2t + 1 on [-1, 3]: range [-1, 7]
        let f = AffineFunction::new(vec![int(2)], int(1));
        let b = SolidBox::new(pt(&[int(1)]), int(2)).unwrap();
        assert_eq!(f.range_on_box(&b).unwrap(), (int(-1), int(7)));
    }

    #[test]
    fn canonical_direction_identifies_proportional_planes() {
        let a = AffineFunction::new(vec![rat(1, 2), int(-1)], rat(3, 2));
        let b = a.scaled(&rat(-4, 3));
        assert_eq!(canonical_direction(&a), canonical_direction(&b));
    }

    #[test]
    fn omega_boxes() {
        let b = SolidBox::omega(2, 3);
        assert!(b.contains(&pt(&[int(3), int(-3)])).unwrap());
        assert!(!b.contains(&pt(&[rat(7, 2), int(0)])).unwrap());
        assert!(!b.contains_strictly(&pt(&[int(3), int(0)])).unwrap());
    }

    #[test]
    fn sum_eval_is_eval_of_sum() {
        let f = AffineFunction::new(vec![int(1), int(2)], int(3));
        let g = AffineFunction::new(vec![int(-2), int(5)], rat(1, 2));
        let x = pt(&[rat(1, 3), int(2)]);
        let lhs = f.eval(&x).unwrap() + g.eval(&x).unwrap();
        let rhs = f.add(&g).unwrap().eval(&x).unwrap();
        assert_eq!(lhs, rhs);
    }
}
