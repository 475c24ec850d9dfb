//! Locally piecewise affine functions.
//!
//! An LPA function is carried as the sup (or inf) of a locally finite family
//! of boxed PA functions plus an optional global PA summand. Local finiteness
//! is structural: every member's support box sits inside `anchor + R * B` for
//! a family-wide radius bound `R`, so any bounded set meets finitely many
//! supports and every evaluation touches finitely many members.
//!
//! Families are either explicit member lists or lattice-generated: a pure
//! function from integer anchors to members, memoized, covering all of Z^m.
//! The box tiling of a nonnegative PA function is the canonical lattice
//! family: `f /\ bump` per unit box.

use crate::affine::{AffineFunction, Point, SolidBox};
use crate::cells::{
    bound_on_box_with, characteristic_pairs_with, CellComplex, CharacteristicPair,
};
use crate::expr::MinMaxExpr;
use crate::lp::{self, LpOutcome};
use crate::rat::{int, Rat};
use crate::{Error, Limits};
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

/// A PA function together with a declared support box: the expression
/// vanishes outside the support.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoxedPa {
    pub expr: MinMaxExpr,
    pub support: SolidBox,
    pub anchor: Vec<i64>,
}

impl BoxedPa {
    pub fn dim(&self) -> usize {
        self.expr.dim()
    }

    /// Smallest `R` with `support` contained in `anchor + R * B`.
    pub fn anchor_radius(&self) -> Rat {
        let mut r = Rat::zero();
        for (c, a) in self.support.center.coords.iter().zip(&self.anchor) {
            let d = (c - Rat::from_integer(BigInt::from(*a))).abs() + &self.support.radius;
            if d > r {
                r = d;
            }
        }
        r
    }

    /// Checks that the expression is assigned the zero component on every
    /// cell reaching outside the support, over a box one unit larger.
    pub fn verify_vanishing_with(&self, limits: &Limits) -> Result<bool, Error> {
        let outer = SolidBox::new(
            self.support.center.clone(),
            &self.support.radius + Rat::one(),
        )?;
        let complex = CellComplex::build_with(&self.expr, &outer, limits)?;
        let zero = AffineFunction::zero(self.dim());
        for (cell, &ci) in complex.cells.iter().zip(&complex.assignment) {
            if complex.components[ci] == zero {
                continue;
            }
            // Does the cell reach strictly outside the support box?
            for axis in 0..self.dim() {
                let mut coord = AffineFunction::zero(self.dim());
                coord.v[axis] = Rat::one();
                let hi = match lp::optimize_affine(&coord, &cell.constraints, true)? {
                    LpOutcome::Optimal { value, .. } => value,
                    _ => {
                        return Err(Error::InternalInconsistency(
                            "cell closure must be bounded".into(),
                        ))
                    }
                };
                let lo = match lp::optimize_affine(&coord, &cell.constraints, false)? {
                    LpOutcome::Optimal { value, .. } => value,
                    _ => {
                        return Err(Error::InternalInconsistency(
                            "cell closure must be bounded".into(),
                        ))
                    }
                };
                if hi > self.support.hi(axis) || lo < self.support.lo(axis) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Exact nonnegativity over the support (and everywhere, given the
    /// vanishing invariant).
    pub fn verify_nonnegative_with(&self, limits: &Limits) -> Result<bool, Error> {
        let (lo, _) = bound_on_box_with(&self.expr, &self.support, limits)?;
        Ok(lo >= Rat::zero())
    }
}

/// How far the family has certified its members' nonnegativity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum NonnegCertificate {
    /// A constant clause witnesses a global lower bound of zero.
    Global,
    /// Nonnegativity checked exactly on `Omega_n`.
    OnBox(u32),
}

type LatticeMake = Arc<dyn Fn(&[i64]) -> Result<BoxedPa, Error> + Send + Sync>;

/// Members generated per integer anchor; pure and memoized.
#[derive(Clone)]
pub struct LatticeGenerator {
    make: LatticeMake,
    cache: Arc<Mutex<HashMap<Vec<i64>, BoxedPa>>>,
}

impl LatticeGenerator {
    pub fn new(make: LatticeMake) -> Self {
        LatticeGenerator {
            make,
            cache: Arc::new(Mutex::new(HashMap::new())),
        }
    }

    pub fn member(&self, anchor: &[i64]) -> Result<BoxedPa, Error> {
        if let Some(hit) = self.cache.lock().unwrap().get(anchor) {
            return Ok(hit.clone());
        }
        let made = (self.make)(anchor)?;
        self.cache
            .lock()
            .unwrap()
            .insert(anchor.to_vec(), made.clone());
        Ok(made)
    }
}

#[derive(Clone)]
enum FamilyMembers {
    Explicit(Vec<BoxedPa>),
    Lattice(LatticeGenerator),
}

/// A locally finite family of boxed PA functions.
#[derive(Clone)]
pub struct LocallyFiniteFamily {
    members: FamilyMembers,
    m: usize,
    positive: bool,
    /// Every member's support is contained in `anchor + support_radius * B`.
    support_radius: Rat,
    certificate: Option<NonnegCertificate>,
}

impl fmt::Debug for LocallyFiniteFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match &self.members {
            FamilyMembers::Explicit(v) => format!("explicit[{}]", v.len()),
            FamilyMembers::Lattice(_) => "lattice".to_string(),
        };
        f.debug_struct("LocallyFiniteFamily")
            .field("members", &kind)
            .field("m", &self.m)
            .field("positive", &self.positive)
            .field("support_radius", &self.support_radius)
            .field("certificate", &self.certificate)
            .finish()
    }
}

fn rat_floor_i64(r: &Rat) -> Result<i64, Error> {
    r.floor()
        .to_integer()
        .to_i64()
        .ok_or_else(|| Error::InternalInconsistency("anchor range exceeds i64".into()))
}

fn rat_ceil_i64(r: &Rat) -> Result<i64, Error> {
    r.ceil()
        .to_integer()
        .to_i64()
        .ok_or_else(|| Error::InternalInconsistency("anchor range exceeds i64".into()))
}

/// Integer points of a product range, ordered by increasing L-infinity norm
/// and then lexicographically: a deterministic enumeration of the lattice.
fn lattice_points(ranges: &[(i64, i64)]) -> Vec<Vec<i64>> {
    let mut out: Vec<Vec<i64>> = vec![vec![]];
    for &(lo, hi) in ranges {
        let mut next = Vec::new();
        for prefix in &out {
            for c in lo..=hi {
                let mut p = prefix.clone();
                p.push(c);
                next.push(p);
            }
        }
        out = next;
    }
    out.sort_by(|a, b| {
        let na = a.iter().map(|c| c.abs()).max().unwrap_or(0);
        let nb = b.iter().map(|c| c.abs()).max().unwrap_or(0);
        na.cmp(&nb).then_with(|| a.cmp(b))
    });
    out
}

impl LocallyFiniteFamily {
    /// Finite family from explicit members; the anchor radius bound is
    /// computed from the members.
    pub fn explicit(members: Vec<BoxedPa>, m: usize, positive: bool) -> Result<Self, Error> {
        let mut support_radius = Rat::zero();
        for b in &members {
            if b.dim() != m || b.support.dim() != m || b.anchor.len() != m {
                return Err(Error::DimensionMismatch {
                    expected: m,
                    got: b.dim(),
                });
            }
            let r = b.anchor_radius();
            if r > support_radius {
                support_radius = r;
            }
        }
        Ok(LocallyFiniteFamily {
            members: FamilyMembers::Explicit(members),
            m,
            positive,
            support_radius,
            certificate: None,
        })
    }

    pub fn empty(m: usize) -> Self {
        LocallyFiniteFamily {
            members: FamilyMembers::Explicit(Vec::new()),
            m,
            positive: true,
            support_radius: Rat::zero(),
            certificate: None,
        }
    }

    /// Family with one generated member per integer anchor. `support_radius`
    /// must bound every generated support relative to its anchor.
    pub fn lattice(
        m: usize,
        positive: bool,
        support_radius: Rat,
        make: LatticeMake,
    ) -> Self {
        LocallyFiniteFamily {
            members: FamilyMembers::Lattice(LatticeGenerator::new(make)),
            m,
            positive,
            support_radius,
            certificate: None,
        }
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn is_positive(&self) -> bool {
        self.positive
    }

    pub fn support_radius(&self) -> &Rat {
        &self.support_radius
    }

    pub fn certificate(&self) -> Option<NonnegCertificate> {
        self.certificate
    }

    pub fn is_lattice(&self) -> bool {
        matches!(self.members, FamilyMembers::Lattice(_))
    }

    pub fn explicit_members(&self) -> Option<&[BoxedPa]> {
        match &self.members {
            FamilyMembers::Explicit(v) => Some(v),
            FamilyMembers::Lattice(_) => None,
        }
    }

    /// Members whose support box intersects the given box; always finite.
    pub fn members_meeting_box(&self, bx: &SolidBox) -> Result<Vec<BoxedPa>, Error> {
        if bx.dim() != self.m {
            return Err(Error::DimensionMismatch {
                expected: self.m,
                got: bx.dim(),
            });
        }
        match &self.members {
            FamilyMembers::Explicit(v) => {
                let mut out = Vec::new();
                for b in v {
                    if b.support.intersects(bx)? {
                        out.push(b.clone());
                    }
                }
                Ok(out)
            }
            FamilyMembers::Lattice(gen) => {
                let mut ranges = Vec::with_capacity(self.m);
                for i in 0..self.m {
                    let lo = rat_ceil_i64(&(bx.lo(i) - &self.support_radius))?;
                    let hi = rat_floor_i64(&(bx.hi(i) + &self.support_radius))?;
                    ranges.push((lo, hi));
                }
                let mut out = Vec::new();
                for anchor in lattice_points(&ranges) {
                    let member = gen.member(&anchor)?;
                    if member.support.intersects(bx)? {
                        out.push(member);
                    }
                }
                Ok(out)
            }
        }
    }

    /// Members whose support contains the point.
    pub fn members_covering(&self, x: &Point) -> Result<Vec<BoxedPa>, Error> {
        if x.dim() != self.m {
            return Err(Error::DimensionMismatch {
                expected: self.m,
                got: x.dim(),
            });
        }
        match &self.members {
            FamilyMembers::Explicit(v) => {
                let mut out = Vec::new();
                for b in v {
                    if b.support.contains(x)? {
                        out.push(b.clone());
                    }
                }
                Ok(out)
            }
            FamilyMembers::Lattice(gen) => {
                let mut ranges = Vec::with_capacity(self.m);
                for xi in &x.coords {
                    let lo = rat_ceil_i64(&(xi - &self.support_radius))?;
                    let hi = rat_floor_i64(&(xi + &self.support_radius))?;
                    ranges.push((lo, hi));
                }
                let mut out = Vec::new();
                for anchor in lattice_points(&ranges) {
                    let member = gen.member(&anchor)?;
                    if member.support.contains(x)? {
                        out.push(member);
                    }
                }
                Ok(out)
            }
        }
    }

    /// Whether some member of the family vanishes at `x` (its support does
    /// not contain `x`). Lattice families always have one.
    fn some_member_vanishes_at(&self, x: &Point) -> Result<bool, Error> {
        match &self.members {
            FamilyMembers::Lattice(_) => Ok(true),
            FamilyMembers::Explicit(v) => {
                for b in v {
                    if !b.support.contains(x)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
        }
    }

    /// Whether some member's support misses the box entirely (it vanishes
    /// identically there). Lattice families always have one.
    fn some_member_misses_box(&self, bx: &SolidBox) -> Result<bool, Error> {
        match &self.members {
            FamilyMembers::Lattice(_) => Ok(true),
            FamilyMembers::Explicit(v) => {
                for b in v {
                    if !b.support.intersects(bx)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
        }
    }
}

/// Whether the family combines by supremum or infimum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CombineMode {
    Sup,
    Inf,
}

/// An LPA function: sup or inf of a locally finite family, plus an optional
/// global PA summand.
#[derive(Clone, Debug)]
pub struct LpaFunction {
    pub mode: CombineMode,
    pub family: LocallyFiniteFamily,
    pub base: Option<MinMaxExpr>,
}

/// Supremum of a locally finite family.
pub fn sup_family(family: LocallyFiniteFamily) -> LpaFunction {
    LpaFunction {
        mode: CombineMode::Sup,
        family,
        base: None,
    }
}

/// Infimum of a locally finite family.
pub fn inf_family(family: LocallyFiniteFamily) -> LpaFunction {
    LpaFunction {
        mode: CombineMode::Inf,
        family,
        base: None,
    }
}

impl LpaFunction {
    pub fn dim(&self) -> usize {
        self.family.dim()
    }

    pub fn with_base(mut self, base: MinMaxExpr) -> Result<Self, Error> {
        if base.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: base.dim(),
            });
        }
        self.base = Some(base);
        Ok(self)
    }

    /// Exact pointwise value. Only members whose support contains `x`
    /// contribute their expression value; each member that vanishes at `x`
    /// contributes zero, and an empty combination is zero by convention.
    pub fn eval(&self, x: &Point) -> Result<Rat, Error> {
        let covering = self.family.members_covering(x)?;
        let mut acc: Option<Rat> = None;
        let mut fold = |v: Rat| {
            acc = Some(match (&self.mode, acc.take()) {
                (CombineMode::Sup, Some(cur)) => if v > cur { v } else { cur },
                (CombineMode::Inf, Some(cur)) => if v < cur { v } else { cur },
                (_, None) => v,
            });
        };
        for member in &covering {
            fold(member.expr.eval(x)?);
        }
        if self.family.some_member_vanishes_at(x)? || covering.is_empty() {
            fold(Rat::zero());
        }
        let mut value = acc.unwrap_or_else(Rat::zero);
        if let Some(base) = &self.base {
            value += base.eval(x)?;
        }
        Ok(value)
    }
}

/// Exact pointwise evaluation of an LPA function.
pub fn eval_lpa(h: &LpaFunction, x: &Point) -> Result<Rat, Error> {
    h.eval(x)
}

/// PA bump: equals `height` on `center + inner * B`, vanishes outside
/// `center + outer * B`, affine in the radial L-infinity direction between.
///
/// Built as `max(min(height, ramps), 0)` where the ramps rescale
/// `outer - |x_i - c_i|` per axis and side.
pub fn bump(center: &Point, inner: &Rat, outer: &Rat, height: &Rat) -> Result<MinMaxExpr, Error> {
    if !(inner.is_positive() && inner < outer && height.is_positive()) {
        return Err(Error::BadRadii);
    }
    let m = center.dim();
    let slope = height / (outer - inner);
    let mut clause = Vec::with_capacity(2 * m + 1);
    clause.push(AffineFunction::constant(m, height.clone()));
    for i in 0..m {
        // height * (outer - (x_i - c_i)) / (outer - inner)
        let mut v = vec![Rat::zero(); m];
        v[i] = -slope.clone();
        clause.push(AffineFunction::new(
            v,
            &slope * (outer + &center.coords[i]),
        ));
        // height * (outer + (x_i - c_i)) / (outer - inner)
        let mut v = vec![Rat::zero(); m];
        v[i] = slope.clone();
        clause.push(AffineFunction::new(
            v,
            &slope * (outer - &center.coords[i]),
        ));
    }
    MinMaxExpr::new(m, vec![clause, vec![AffineFunction::zero(m)]])
}

/// Restriction of an LPA function to `Omega_n` as a single PA expression.
///
/// Joins (or meets) the members whose support meets the box; a constant zero
/// enters the combination when some member vanishes identically on the box
/// or the family is positive.
pub fn restrict_to_box(h: &LpaFunction, n: u32) -> Result<MinMaxExpr, Error> {
    let m = h.dim();
    let bx = SolidBox::omega(m, n);
    let members = h.family.members_meeting_box(&bx)?;
    let include_zero = h.family.is_positive()
        || h.family.some_member_misses_box(&bx)?
        || members.is_empty();
    let mut acc: Option<MinMaxExpr> = None;
    let mut fold = |e: MinMaxExpr| -> Result<(), Error> {
        acc = Some(match acc.take() {
            Some(cur) => match h.mode {
                CombineMode::Sup => cur.join(&e)?,
                CombineMode::Inf => cur.meet(&e)?,
            },
            None => e,
        });
        Ok(())
    };
    for member in &members {
        fold(member.expr.clone())?;
    }
    if include_zero {
        fold(MinMaxExpr::zero(m))?;
    }
    let combined = acc.expect("at least the zero constant enters");
    let expr = match &h.base {
        Some(base) => combined.add(base)?,
        None => combined,
    };
    Ok(expr.structural_prune())
}

/// The box tiling of a nonnegative PA function: one member per integer
/// anchor `c`, equal to `f /\ bump(c, 1, 2, M_c)` with `M_c` exceeding `f`
/// on the unit box at `c`. Each member agrees with `f` on that box and
/// vanishes outside the doubled box; their sup recovers `f`.
///
/// `certify` controls the nonnegativity precondition: `None` skips the
/// check, `Some(n)` certifies `f >= 0` exactly on `Omega_n` (recorded in
/// the family), upgraded to a global certificate when a constant clause
/// bounds `f` below by zero.
pub fn tile_decompose(
    f: &MinMaxExpr,
    certify: Option<u32>,
) -> Result<LocallyFiniteFamily, Error> {
    tile_decompose_with(f, certify, &Limits::default())
}

pub fn tile_decompose_with(
    f: &MinMaxExpr,
    certify: Option<u32>,
    limits: &Limits,
) -> Result<LocallyFiniteFamily, Error> {
    let m = f.dim();
    let mut certificate = None;
    if let Some(n) = certify {
        let global = f.clauses().iter().any(|clause| {
            clause
                .iter()
                .all(|a| a.is_constant() && !a.b.is_negative())
        });
        if global {
            certificate = Some(NonnegCertificate::Global);
        } else {
            let (lo, _) = bound_on_box_with(f, &SolidBox::omega(m, n), limits)?;
            if lo.is_negative() {
                return Err(Error::NotNonnegative);
            }
            certificate = Some(NonnegCertificate::OnBox(n));
        }
    }
    let f = f.clone();
    let limits = limits.clone();
    let make: LatticeMake = Arc::new(move |anchor: &[i64]| {
        let center = Point::new(
            anchor
                .iter()
                .map(|&c| Rat::from_integer(BigInt::from(c)))
                .collect(),
        );
        let unit_box = SolidBox::new(center.clone(), Rat::one())?;
        let (_, hi) = bound_on_box_with(&f, &unit_box, &limits)?;
        let mut height = hi + Rat::one();
        if !height.is_positive() {
            height = Rat::one();
        }
        let cap = bump(&center, &Rat::one(), &int(2), &height)?;
        let expr = f.meet(&cap)?.structural_prune();
        let support = SolidBox::new(center, int(2))?;
        Ok(BoxedPa {
            expr,
            support,
            anchor: anchor.to_vec(),
        })
    });
    let mut family = LocallyFiniteFamily::lattice(m, true, int(2), make);
    family.certificate = certificate;
    Ok(family)
}

/// Number of members whose support box intersects `Omega_n`; always finite.
pub fn verify_locally_finite(family: &LocallyFiniteFamily, n: u32) -> Result<usize, Error> {
    let bx = SolidBox::omega(family.dim(), n);
    Ok(family.members_meeting_box(&bx)?.len())
}

/// Characteristic pairs of the restriction to `Omega_n`, with component
/// order stabilized across radii: components appearing on smaller balls come
/// first, mirroring the collection of components over growing boxes.
pub fn lpa_characteristic_pairs(
    h: &LpaFunction,
    n: u32,
) -> Result<Vec<CharacteristicPair>, Error> {
    lpa_characteristic_pairs_with(h, n, &Limits::default())
}

pub fn lpa_characteristic_pairs_with(
    h: &LpaFunction,
    n: u32,
    limits: &Limits,
) -> Result<Vec<CharacteristicPair>, Error> {
    let mut registry: Vec<AffineFunction> = Vec::new();
    let mut latest: Vec<CharacteristicPair> = Vec::new();
    for k in 1..=n {
        let expr = restrict_to_box(h, k)?;
        let pairs = characteristic_pairs_with(&expr, &SolidBox::omega(h.dim(), k), limits)?;
        for pair in &pairs {
            if !registry.contains(&pair.component) {
                registry.push(pair.component.clone());
            }
        }
        if k == n {
            latest = pairs;
        }
    }
    latest.sort_by_key(|pair| {
        registry
            .iter()
            .position(|c| c == &pair.component)
            .expect("every component is registered")
    });
    Ok(latest)
}

/// Pairwise joins of an explicit family's members, supports replaced by
/// hulls. Preserves structural local finiteness with a larger radius bound.
pub fn pairwise_joins(family: &LocallyFiniteFamily) -> Result<LocallyFiniteFamily, Error> {
    let members = family
        .explicit_members()
        .ok_or_else(|| Error::InternalInconsistency("pairwise_joins needs an explicit family".into()))?;
    let mut out = Vec::new();
    for i in 0..members.len() {
        for j in (i + 1)..members.len() {
            let expr = members[i].expr.join(&members[j].expr)?.structural_prune();
            let support = members[i].support.hull(&members[j].support)?;
            out.push(BoxedPa {
                expr,
                support,
                anchor: members[i].anchor.clone(),
            });
        }
    }
    LocallyFiniteFamily::explicit(out, family.dim(), family.is_positive())
}

/// Pairwise meets of an explicit family's members; supports shrink to
/// intersection hulls, members with disjoint supports become zero on a unit
/// box at their anchor.
pub fn pairwise_meets(family: &LocallyFiniteFamily) -> Result<LocallyFiniteFamily, Error> {
    let members = family
        .explicit_members()
        .ok_or_else(|| Error::InternalInconsistency("pairwise_meets needs an explicit family".into()))?;
    if !family.is_positive() {
        // min(f, g) of sign-changing members need not vanish outside the
        // support intersection; restrict to positive families.
        return Err(Error::InternalInconsistency(
            "pairwise_meets requires a positive family".into(),
        ));
    }
    let m = family.dim();
    let mut out = Vec::new();
    for i in 0..members.len() {
        for j in (i + 1)..members.len() {
            let anchor = members[i].anchor.clone();
            match members[i].support.intersection_hull(&members[j].support)? {
                Some(support) => {
                    let expr = members[i].expr.meet(&members[j].expr)?.structural_prune();
                    out.push(BoxedPa {
                        expr,
                        support,
                        anchor,
                    });
                }
                None => {
                    let center = Point::new(
                        anchor
                            .iter()
                            .map(|&c| Rat::from_integer(BigInt::from(c)))
                            .collect(),
                    );
                    out.push(BoxedPa {
                        expr: MinMaxExpr::zero(m),
                        support: SolidBox::new(center, Rat::one())?,
                        anchor,
                    });
                }
            }
        }
    }
    LocallyFiniteFamily::explicit(out, m, true)
}

/// Serialized LPA function: family members truncated to a stated anchor
/// radius, plus the optional base.
#[derive(Serialize, Deserialize)]
pub struct LpaDocument {
    pub mode: CombineMode,
    pub positivity: bool,
    pub members: Vec<MemberDocument>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub base: Option<MinMaxExpr>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truncation_radius: Option<u32>,
    pub m: usize,
}

#[derive(Serialize, Deserialize)]
pub struct MemberDocument {
    pub anchor: Vec<i64>,
    pub support: SolidBox,
    pub expr: MinMaxExpr,
}

impl LpaFunction {
    /// Serialize, materializing lattice members with anchors inside
    /// `radius * B` and recording the truncation.
    pub fn to_document(&self, radius: u32) -> Result<LpaDocument, Error> {
        let m = self.dim();
        let members = if self.family.is_lattice() {
            let bx = SolidBox::omega(m, radius);
            self.family.members_meeting_box(&bx)?
        } else {
            self.family.explicit_members().unwrap_or(&[]).to_vec()
        };
        Ok(LpaDocument {
            mode: self.mode,
            positivity: self.family.is_positive(),
            members: members
                .into_iter()
                .map(|b| MemberDocument {
                    anchor: b.anchor,
                    support: b.support,
                    expr: b.expr,
                })
                .collect(),
            base: self.base.clone(),
            truncation_radius: self.family.is_lattice().then_some(radius),
            m,
        })
    }

    pub fn from_document(doc: LpaDocument) -> Result<LpaFunction, Error> {
        let members = doc
            .members
            .into_iter()
            .map(|d| BoxedPa {
                expr: d.expr,
                support: d.support,
                anchor: d.anchor,
            })
            .collect();
        let family = LocallyFiniteFamily::explicit(members, doc.m, doc.positivity)?;
        let mut h = match doc.mode {
            CombineMode::Sup => sup_family(family),
            CombineMode::Inf => inf_family(family),
        };
        if let Some(base) = doc.base {
            h = h.with_base(base)?;
        }
        Ok(h)
    }
}
