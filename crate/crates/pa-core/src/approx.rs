//! Certified approximation of continuous functions by PA and LPA functions.
//!
//! Continuous targets enter as oracles: exact rational point samples plus
//! per-box Lipschitz bounds. Kuhn-triangulation interpolation turns an
//! oracle into a PA function with a certified uniform error `L * step` on
//! the box; bump-localized interpolants tile the plane into a locally
//! finite family whose sup approximates the target uniformly; shifted
//! interpolants build exact monotone under-approximations.

use crate::affine::{AffineFunction, Point, SolidBox};
use crate::cells::bound_on_box_with;
use crate::expr::MinMaxExpr;
use crate::lpa::{bump, sup_family, BoxedPa, LocallyFiniteFamily, LpaFunction};
use crate::rat::{int, rat_opt_serde, rat_serde, Rat};
use crate::{Error, Limits};
use num_bigint::BigInt;

use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

type EvalFn = Arc<dyn Fn(&Point) -> Result<Rat, Error> + Send + Sync>;
type LipschitzFn = Arc<dyn Fn(&SolidBox) -> Result<Rat, Error> + Send + Sync>;

/// A sampled continuous function with optional per-box Lipschitz data.
///
/// Values are exact rationals. When `nonnegative` is set, every sampled
/// value is checked on the way out. Without Lipschitz data the engine runs
/// best-effort: no certified bounds, observed errors only.
#[derive(Clone)]
pub struct ContinuousOracle {
    name: String,
    m: usize,
    evaluate: EvalFn,
    lipschitz: Option<LipschitzFn>,
    nonnegative: bool,
}

impl std::fmt::Debug for ContinuousOracle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ContinuousOracle")
            .field("name", &self.name)
            .field("m", &self.m)
            .field("lipschitz", &self.lipschitz.is_some())
            .field("nonnegative", &self.nonnegative)
            .finish()
    }
}

impl ContinuousOracle {
    pub fn new(
        name: impl Into<String>,
        m: usize,
        evaluate: EvalFn,
        lipschitz: Option<LipschitzFn>,
        nonnegative: bool,
    ) -> Self {
        ContinuousOracle {
            name: name.into(),
            m,
            evaluate,
            lipschitz,
            nonnegative,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn is_nonnegative(&self) -> bool {
        self.nonnegative
    }

    pub fn has_lipschitz(&self) -> bool {
        self.lipschitz.is_some()
    }

    pub fn eval(&self, x: &Point) -> Result<Rat, Error> {
        if x.dim() != self.m {
            return Err(Error::DimensionMismatch {
                expected: self.m,
                got: x.dim(),
            });
        }
        let v = (self.evaluate)(x)?;
        if self.nonnegative && v.is_negative() {
            return Err(Error::NotNonnegative);
        }
        Ok(v)
    }

    /// Upper Lipschitz bound on the box, when the oracle carries one.
    pub fn lipschitz(&self, bx: &SolidBox) -> Result<Option<Rat>, Error> {
        match &self.lipschitz {
            Some(l) => Ok(Some(l(bx)?)),
            None => Ok(None),
        }
    }

    /// `max(f, 0)`, flagged nonnegative; the Lipschitz bound carries over.
    pub fn positive_part(&self) -> ContinuousOracle {
        let inner = self.evaluate.clone();
        ContinuousOracle {
            name: format!("{}+", self.name),
            m: self.m,
            evaluate: Arc::new(move |x| {
                let v = inner(x)?;
                Ok(if v.is_negative() { Rat::zero() } else { v })
            }),
            lipschitz: self.lipschitz.clone(),
            nonnegative: true,
        }
    }

    /// `max(-f, 0)`, flagged nonnegative.
    pub fn negative_part(&self) -> ContinuousOracle {
        let inner = self.evaluate.clone();
        ContinuousOracle {
            name: format!("{}-", self.name),
            m: self.m,
            evaluate: Arc::new(move |x| {
                let v = -inner(x)?;
                Ok(if v.is_negative() { Rat::zero() } else { v })
            }),
            lipschitz: self.lipschitz.clone(),
            nonnegative: true,
        }
    }

    /// `|t|` on R, Lipschitz 1.
    pub fn abs() -> ContinuousOracle {
        ContinuousOracle::new(
            "abs",
            1,
            Arc::new(|x: &Point| Ok(x.coords[0].abs())),
            Some(Arc::new(|_: &SolidBox| Ok(Rat::one()))),
            true,
        )
    }

    /// `min(|t|, 1)` on R, Lipschitz 1.
    pub fn min_abs_one() -> ContinuousOracle {
        ContinuousOracle::new(
            "min-abs-1",
            1,
            Arc::new(|x: &Point| {
                let a = x.coords[0].abs();
                Ok(if a <= Rat::one() { a } else { Rat::one() })
            }),
            Some(Arc::new(|_: &SolidBox| Ok(Rat::one()))),
            true,
        )
    }

    /// `t^2` on R with `L([a, b]) = 2 max(|a|, |b|)`.
    pub fn quadratic() -> ContinuousOracle {
        ContinuousOracle::new(
            "quadratic",
            1,
            Arc::new(|x: &Point| Ok(&x.coords[0] * &x.coords[0])),
            Some(Arc::new(|bx: &SolidBox| {
                Ok(int(2) * (bx.center.coords[0].abs() + &bx.radius))
            })),
            true,
        )
    }

    /// Polynomial `sum c_k t^k` with the derivative-bound Lipschitz constant
    /// `sum k |c_k| M^(k-1)`, `M = max(|a|, |b|)`.
    pub fn poly(coeffs: Vec<Rat>) -> ContinuousOracle {
        let eval_coeffs = coeffs.clone();
        let lips_coeffs = coeffs.clone();
        let name = format!(
            "poly:{}",
            coeffs
                .iter()
                .map(crate::rat::format_rat)
                .collect::<Vec<_>>()
                .join(",")
        );
        ContinuousOracle::new(
            name,
            1,
            Arc::new(move |x: &Point| {
                let t = &x.coords[0];
                let mut acc = Rat::zero();
                for c in eval_coeffs.iter().rev() {
                    acc = acc * t + c;
                }
                Ok(acc)
            }),
            Some(Arc::new(move |bx: &SolidBox| {
                let m = bx.center.coords[0].abs() + &bx.radius;
                let mut bound = Rat::zero();
                let mut pow = Rat::one();
                for (k, c) in lips_coeffs.iter().enumerate().skip(1) {
                    if k > 1 {
                        pow *= &m;
                    }
                    bound += Rat::from_integer(BigInt::from(k)) * c.abs() * &pow;
                }
                Ok(bound)
            })),
            false,
        )
    }

    /// Registry lookup: `abs`, `min-abs-1`, `quadratic`, or
    /// `poly:c0,c1,...` with rational coefficients.
    pub fn by_name(spec: &str) -> Result<ContinuousOracle, Error> {
        match spec {
            "abs" => Ok(Self::abs()),
            "min-abs-1" => Ok(Self::min_abs_one()),
            "quadratic" => Ok(Self::quadratic()),
            _ => {
                if let Some(args) = spec.strip_prefix("poly:") {
                    let coeffs = args
                        .split(',')
                        .map(crate::rat::parse_rat)
                        .collect::<Result<Vec<_>, _>>()?;
                    if coeffs.is_empty() {
                        return Err(Error::Parse("poly needs coefficients".into()));
                    }
                    Ok(Self::poly(coeffs))
                } else {
                    Err(Error::Parse(format!("unknown oracle: {spec:?}")))
                }
            }
        }
    }
}

fn check_positive_eps(eps: &Rat) -> Result<(), Error> {
    if !eps.is_positive() {
        return Err(Error::Parse("epsilon must be positive".into()));
    }
    Ok(())
}

fn permutations(m: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for k in 0..m {
        let mut next = Vec::new();
        for p in &out {
            for slot in 0..=p.len() {
                let mut q = p.clone();
                q.insert(slot, k);
                next.push(q);
            }
        }
        out = next;
    }
    out
}

/// PA interpolant of an oracle on a box: sample on the regular grid of the
/// given pitch, interpolate affinely on each Kuhn simplex, and assemble the
/// global max-min form. The result matches the oracle exactly at every grid
/// vertex; with Lipschitz data `L` on the box the uniform error is at most
/// `L * step` there.
pub fn kuhn_interpolant(
    oracle: &ContinuousOracle,
    bx: &SolidBox,
    step: &Rat,
) -> Result<MinMaxExpr, Error> {
    kuhn_interpolant_with(oracle, bx, step, &Limits::default())
}

pub fn kuhn_interpolant_with(
    oracle: &ContinuousOracle,
    bx: &SolidBox,
    step: &Rat,
    limits: &Limits,
) -> Result<MinMaxExpr, Error> {
    let m = oracle.dim();
    if bx.dim() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: bx.dim(),
        });
    }
    if !step.is_positive() {
        return Err(Error::BadStep);
    }
    let edge = int(2) * &bx.radius;
    let count = &edge / step;
    if !count.is_integer() || count.is_zero() {
        return Err(Error::BadStep);
    }
    let k = count
        .to_integer()
        .to_u64()
        .ok_or(Error::BadStep)? as usize;
    let verts_per_axis = k + 1;
    let total: u128 = (verts_per_axis as u128)
        .checked_pow(m as u32)
        .unwrap_or(u128::MAX);
    if total > limits.grid_budget {
        return Err(Error::GridTooLarge {
            vertices: total,
            budget: limits.grid_budget,
        });
    }

    let lo: Vec<Rat> = (0..m).map(|i| bx.lo(i)).collect();
    let vertex_point = |idx: &[usize]| -> Point {
        Point::new(
            idx.iter()
                .zip(&lo)
                .map(|(&i, l)| l + step * Rat::from_integer(BigInt::from(i)))
                .collect(),
        )
    };

    // Sample all grid vertices.
    let mut values: HashMap<Vec<usize>, Rat> = HashMap::with_capacity(total as usize);
    let mut stack = vec![vec![]];
    while let Some(prefix) = stack.pop() {
        if prefix.len() == m {
            let v = oracle.eval(&vertex_point(&prefix))?;
            values.insert(prefix, v);
            continue;
        }
        for i in 0..verts_per_axis {
            let mut p = prefix.clone();
            p.push(i);
            stack.push(p);
        }
    }

    // One affine per Kuhn simplex: walking the permutation's axes from the
    // cube corner, consecutive vertices differ by `step` along one axis, so
    // gradients come from divided differences.
    let perms = permutations(m);
    struct Simplex {
        affine: AffineFunction,
        vertices: Vec<Vec<usize>>,
    }
    let mut simplices: Vec<Simplex> = Vec::new();
    let mut cube = vec![0usize; m];
    loop {
        for perm in &perms {
            let mut vertices = Vec::with_capacity(m + 1);
            vertices.push(cube.clone());
            for &axis in perm {
                let mut v = vertices.last().unwrap().clone();
                v[axis] += 1;
                vertices.push(v);
            }
            let mut grad = vec![Rat::zero(); m];
            for (j, &axis) in perm.iter().enumerate() {
                let f_hi = &values[&vertices[j + 1]];
                let f_lo = &values[&vertices[j]];
                grad[axis] = (f_hi - f_lo) / step;
            }
            let base_point = vertex_point(&vertices[0]);
            let mut b = values[&vertices[0]].clone();
            for (g, x) in grad.iter().zip(&base_point.coords) {
                b -= g * x;
            }
            simplices.push(Simplex {
                affine: AffineFunction::new(grad, b),
                vertices,
            });
        }
        // next cube index
        let mut carry = true;
        for slot in cube.iter_mut() {
            if carry {
                *slot += 1;
                if *slot == k {
                    *slot = 0;
                } else {
                    carry = false;
                }
            }
        }
        if carry || k == 0 {
            break;
        }
    }

    // Distinct components.
    let mut components: Vec<AffineFunction> = Vec::new();
    let mut seen: std::collections::HashSet<AffineFunction> = std::collections::HashSet::new();
    for s in &simplices {
        if seen.insert(s.affine.clone()) {
            components.push(s.affine.clone());
        }
    }

    // Clause per simplex: the components lying above the simplex's own
    // affine on it. An affine dominates another on a simplex iff it does at
    // all m+1 vertices.
    let mut clauses: Vec<Vec<AffineFunction>> = Vec::with_capacity(simplices.len());
    for s in &simplices {
        let own: Vec<Rat> = s
            .vertices
            .iter()
            .map(|v| values[v].clone())
            .collect();
        let mut clause = Vec::new();
        for comp in &components {
            let mut above = true;
            for (vertex, fv) in s.vertices.iter().zip(&own) {
                let cv = comp.eval(&vertex_point(vertex))?;
                if &cv < fv {
                    above = false;
                    break;
                }
            }
            if above {
                clause.push(comp.clone());
            }
        }
        if clause.is_empty() {
            return Err(Error::InternalInconsistency(
                "a simplex's dominating set must contain its own affine".into(),
            ));
        }
        clauses.push(clause);
    }
    MinMaxExpr::new(m, clauses)
}

/// Approximation run record.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ApproxReport {
    #[serde(with = "rat_serde")]
    pub epsilon: Rat,
    pub boxes_processed: usize,
    /// Grid pitch per anchor, keyed by comma-joined anchor coordinates.
    pub grid_steps: BTreeMap<String, String>,
    #[serde(with = "rat_serde")]
    pub max_observed_error: Rat,
    /// `L * step` based bound over the covered region; absent without
    /// Lipschitz data.
    #[serde(with = "rat_opt_serde")]
    pub certified_bound: Option<Rat>,
    /// The covered region is `Omega_(radius+1)`.
    pub covered_radius: u32,
}

/// Uniform LPA approximant of a continuous function, split into nonnegative
/// positive and negative parts. For oracles flagged nonnegative the negative
/// part is the empty family and the positive part alone is the approximant.
#[derive(Clone, Debug)]
pub struct UniformApproximant {
    pub positive: LpaFunction,
    pub negative: LpaFunction,
}

impl UniformApproximant {
    pub fn dim(&self) -> usize {
        self.positive.dim()
    }

    pub fn eval(&self, x: &Point) -> Result<Rat, Error> {
        Ok(self.positive.eval(x)? - self.negative.eval(x)?)
    }

    /// PA restriction of the approximant to `Omega_n`. The negative part is
    /// negated expression-side, so this is budget-guarded.
    pub fn restrict_to_box(&self, n: u32, limits: &Limits) -> Result<MinMaxExpr, Error> {
        let pos = crate::lpa::restrict_to_box(&self.positive, n)?;
        let neg = crate::lpa::restrict_to_box(&self.negative, n)?;
        pos.add(&neg.negate_with(limits)?)
    }
}

fn anchors_within(m: usize, radius: u32) -> Vec<Vec<i64>> {
    let r = radius as i64;
    let mut out: Vec<Vec<i64>> = vec![vec![]];
    for _ in 0..m {
        let mut next = Vec::new();
        for p in &out {
            for c in -r..=r {
                let mut q = p.clone();
                q.push(c);
                next.push(q);
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

/// Choose a grid pitch dividing the edge `4` of a doubled unit box with
/// `L * step <= eps/2`; without Lipschitz data fall back to `L = 1`.
fn pick_step(l: Option<&Rat>, eps: &Rat) -> Rat {
    let one = Rat::one();
    let l = l.unwrap_or(&one);
    let need = int(8) * l / eps; // subdivisions of the edge 4
    let k = if need <= Rat::one() {
        BigInt::one()
    } else {
        let c = need.ceil().to_integer();
        if c.is_zero() {
            BigInt::one()
        } else {
            c
        }
    };
    int(4) / Rat::from_integer(k)
}

/// Bump-localized interpolant family for a nonnegative oracle over the
/// anchors within `radius`. Returns the family plus per-anchor steps and the
/// worst certified interpolation bound.
fn part_family(
    oracle: &ContinuousOracle,
    eps: &Rat,
    radius: u32,
    limits: &Limits,
) -> Result<(LocallyFiniteFamily, BTreeMap<String, String>, Option<Rat>), Error> {
    let m = oracle.dim();
    let mut members = Vec::new();
    let mut steps = BTreeMap::new();
    let mut certified: Option<Rat> = Some(Rat::zero());
    for anchor in anchors_within(m, radius) {
        let center = Point::new(
            anchor
                .iter()
                .map(|&c| Rat::from_integer(BigInt::from(c)))
                .collect(),
        );
        let tile = SolidBox::new(center.clone(), int(2))?;
        let l = oracle.lipschitz(&tile)?;
        let step = pick_step(l.as_ref(), eps);
        match (&mut certified, &l) {
            (Some(worst), Some(l)) => {
                let bound = l * &step;
                if bound > *worst {
                    *worst = bound;
                }
            }
            _ => certified = None,
        }
        let interp = kuhn_interpolant_with(oracle, &tile, &step, limits)?;
        // Clamp below at zero so the localized member vanishes outside the
        // support; for a nonnegative target this cannot worsen the error.
        let clamped = interp.join(&MinMaxExpr::zero(m))?;
        let (_, hi) = bound_on_box_with(&clamped, &tile, limits)?;
        let mut height = hi + Rat::one();
        if !height.is_positive() {
            height = Rat::one();
        }
        let cap = bump(&center, &Rat::one(), &int(2), &height)?;
        let expr = clamped.meet(&cap)?.structural_prune();
        steps.insert(
            anchor
                .iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
                .join(","),
            crate::rat::format_rat(&step),
        );
        members.push(BoxedPa {
            expr,
            support: tile,
            anchor,
        });
    }
    let family = LocallyFiniteFamily::explicit(members, m, true)?;
    Ok((family, steps, certified))
}

fn sample_box_points(bx: &SolidBox, count: usize) -> Vec<Point> {
    // Deterministic low-tech sampling: an LCG over a denominator-64 grid.
    let m = bx.dim();
    let mut state: u64 = 0x9E3779B97F4A7C15;
    let mut next = || {
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        (state >> 33) % 129
    };
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let coords = (0..m)
            .map(|i| {
                let frac = Rat::new(BigInt::from(next()), BigInt::from(128u32));
                bx.lo(i) + (bx.hi(i) - bx.lo(i)) * frac
            })
            .collect();
        out.push(Point::new(coords));
    }
    out
}

/// Uniform approximation of a continuous function by an LPA function on the
/// covered region `Omega_(radius+1)`.
///
/// The target splits into nonnegative parts `f+` and `f-`; each part gets a
/// bump-localized Kuhn interpolant per anchor with per-box steps chosen so
/// `L * step <= eps/2`, and the part approximant is the sup of the family.
/// The result is the difference of the two parts; for oracles flagged
/// nonnegative the negative part is empty.
pub fn uniform_approx(
    oracle: &ContinuousOracle,
    eps: &Rat,
    radius: u32,
) -> Result<(UniformApproximant, ApproxReport), Error> {
    uniform_approx_with(oracle, eps, radius, &Limits::default())
}

pub fn uniform_approx_with(
    oracle: &ContinuousOracle,
    eps: &Rat,
    radius: u32,
    limits: &Limits,
) -> Result<(UniformApproximant, ApproxReport), Error> {
    check_positive_eps(eps)?;
    let m = oracle.dim();
    let (pos_oracle, neg_oracle) = if oracle.is_nonnegative() {
        (oracle.clone(), None)
    } else {
        (oracle.positive_part(), Some(oracle.negative_part()))
    };
    let (pos_family, steps, pos_cert) = part_family(&pos_oracle, eps, radius, limits)?;
    let mut boxes = steps.len();
    let (neg_family, neg_cert) = match &neg_oracle {
        Some(neg) => {
            let (family, neg_steps, cert) = part_family(neg, eps, radius, limits)?;
            boxes += neg_steps.len();
            (family, cert)
        }
        None => (LocallyFiniteFamily::empty(m), Some(Rat::zero())),
    };
    let approximant = UniformApproximant {
        positive: sup_family(pos_family),
        negative: sup_family(neg_family),
    };
    let certified_bound = match (pos_cert, neg_cert) {
        (Some(a), Some(b)) => Some(a + b),
        _ => None,
    };
    // Validate on the covered region.
    let covered = SolidBox::omega(m, radius + 1);
    let mut max_err = Rat::zero();
    for x in sample_box_points(&covered, 256) {
        let err = (oracle.eval(&x)? - approximant.eval(&x)?).abs();
        if err > max_err {
            max_err = err;
        }
    }
    if let Some(cb) = &certified_bound {
        if max_err > *cb {
            return Err(Error::InternalInconsistency(format!(
                "observed error {max_err} exceeds certified bound {cb}"
            )));
        }
    }
    let report = ApproxReport {
        epsilon: eps.clone(),
        boxes_processed: boxes,
        grid_steps: steps,
        max_observed_error: max_err,
        certified_bound,
        covered_radius: radius + 1,
    };
    Ok((approximant, report))
}

/// Monotone sequence `h_1 <= h_2 <= ... <= h_count` of PA functions under a
/// nonnegative oracle, converging on growing balls.
///
/// Step k interpolates on `Omega_(k+1)` with pitch `2^-k`, shifts down by
/// the interpolation bound so the result sits below the target, clamps at
/// zero, and localizes by meeting a tall bump that is flat on `Omega_k`.
/// Joining with the previous element keeps the sequence increasing; on
/// `Omega_k` the error is at most `2 * L(Omega_(k+1)) * 2^-k`.
pub fn monotone_under_approx(
    oracle: &ContinuousOracle,
    count: u32,
) -> Result<Vec<MinMaxExpr>, Error> {
    monotone_under_approx_with(oracle, count, &Limits::default())
}

pub fn monotone_under_approx_with(
    oracle: &ContinuousOracle,
    count: u32,
    limits: &Limits,
) -> Result<Vec<MinMaxExpr>, Error> {
    if !oracle.is_nonnegative() {
        return Err(Error::NotNonnegative);
    }
    if count == 0 {
        return Err(Error::Parse("count must be at least 1".into()));
    }
    let m = oracle.dim();
    let mut out = Vec::with_capacity(count as usize);
    let mut prev = MinMaxExpr::zero(m);
    let mut delta = Rat::one();
    for k in 1..=count {
        delta /= int(2); // 2^-k
        let bx = SolidBox::omega(m, k + 1);
        let l = oracle.lipschitz(&bx)?.ok_or_else(|| {
            Error::Parse("monotone approximation requires Lipschitz data".into())
        })?;
        let interp = kuhn_interpolant_with(oracle, &bx, &delta, limits)?;
        let shift = &l * &delta;
        let shifted = interp.add(&MinMaxExpr::constant(m, -shift))?;
        let lower = shifted.join(&MinMaxExpr::zero(m))?.structural_prune();
        let (_, hi) = bound_on_box_with(&lower, &bx, limits)?;
        let localized = if hi.is_positive() {
            let cap = bump(
                &Point::origin(m),
                &Rat::from_integer(BigInt::from(k)),
                &Rat::from_integer(BigInt::from(k + 1)),
                &hi,
            )?;
            lower.meet(&cap)?.structural_prune()
        } else {
            MinMaxExpr::zero(m)
        };
        let h = prev.join(&localized)?.structural_prune();
        out.push(h.clone());
        prev = h;
    }
    Ok(out)
}

/// Order-limit decomposition: monotone under-approximations of `f+` and
/// `f-` combined as `g_k - h_k`, converging to `f` on growing balls.
pub fn order_approx(oracle: &ContinuousOracle, count: u32) -> Result<Vec<MinMaxExpr>, Error> {
    order_approx_with(oracle, count, &Limits::default())
}

pub fn order_approx_with(
    oracle: &ContinuousOracle,
    count: u32,
    limits: &Limits,
) -> Result<Vec<MinMaxExpr>, Error> {
    let pos = monotone_under_approx_with(&oracle.positive_part(), count, limits)?;
    let neg = monotone_under_approx_with(&oracle.negative_part(), count, limits)?;
    pos.into_iter()
        .zip(neg)
        .map(|(g, h)| {
            let d = g.add(&h.negate_with(limits)?)?;
            Ok(d.structural_prune())
        })
        .collect()
}

/// A strictly positive PA minorant of a positive continuous function:
/// `0 < y <= f`, built as a bump of half the value at a point where the
/// oracle is positive, with radii from the Lipschitz bound.
pub fn positive_minorant(
    oracle: &ContinuousOracle,
    center: &Point,
) -> Result<MinMaxExpr, Error> {
    if !oracle.is_nonnegative() {
        return Err(Error::NotNonnegative);
    }
    let fc = oracle.eval(center)?;
    if !fc.is_positive() {
        return Err(Error::Parse(
            "positive minorant needs a point with a positive value".into(),
        ));
    }
    let half = &fc / int(2);
    // f >= f(c) - L r >= f(c)/2 within radius r = f(c) / (2 L).
    let probe = SolidBox::new(center.clone(), Rat::one())?;
    let l = oracle
        .lipschitz(&probe)?
        .ok_or_else(|| Error::Parse("positive minorant requires Lipschitz data".into()))?;
    let mut outer = if l.is_positive() {
        (&half / &l).min(Rat::one())
    } else {
        Rat::one()
    };
    // Keep the Lipschitz bound valid: the probe box has radius 1.
    if outer > Rat::one() {
        outer = Rat::one();
    }
    let inner = &outer / int(2);
    bump(center, &inner, &outer, &half)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cells::difference_bound_with;
    use crate::expr::semantic_equal;
    use crate::rat::rat;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pt1(x: Rat) -> Point {
        Point::new(vec![x])
    }

    /// Direct barycentric evaluation on the Kuhn grid: the independent
    /// oracle for interpolant values.
    fn kuhn_direct_eval(
        oracle: &ContinuousOracle,
        bx: &SolidBox,
        step: &Rat,
        x: &Point,
    ) -> Rat {
        let m = bx.dim();
        let k = ((int(2) * &bx.radius) / step).to_integer().to_u64().unwrap() as usize;
        // locate the cube
        let mut cube = Vec::with_capacity(m);
        let mut local = Vec::with_capacity(m);
        for i in 0..m {
            let rel = (&x.coords[i] - bx.lo(i)) / step;
            let mut cell = rel.floor().to_integer().to_i64().unwrap();
            if cell >= k as i64 {
                cell = k as i64 - 1;
            }
            if cell < 0 {
                cell = 0;
            }
            cube.push(cell as usize);
            local.push(&rel - Rat::from_integer(BigInt::from(cell)));
        }
        // sort axes by decreasing local coordinate: the Kuhn simplex
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| local[b].cmp(&local[a]));
        let vertex_value = |idx: &[usize]| -> Rat {
            let p = Point::new(
                idx.iter()
                    .enumerate()
                    .map(|(i, &j)| bx.lo(i) + step * Rat::from_integer(BigInt::from(j)))
                    .collect(),
            );
            oracle.eval(&p).unwrap()
        };
        let mut idx = cube.clone();
        let mut value = vertex_value(&idx);
        let mut prev = value.clone();
        for &axis in &order {
            idx[axis] += 1;
            let next = vertex_value(&idx);
            value += &local[axis] * (&next - &prev);
            let _ = std::mem::replace(&mut prev, next);
        }
        value
    }

    #[test]
    fn interpolant_reproduces_abs() {
        let oracle = ContinuousOracle::abs();
        let bx = SolidBox::omega(1, 1);
        let e = kuhn_interpolant(&oracle, &bx, &Rat::one()).unwrap();
        let abs = MinMaxExpr::new(
            1,
            vec![
                vec![AffineFunction::new(vec![int(1)], int(0))],
                vec![AffineFunction::new(vec![int(-1)], int(0))],
            ],
        )
        .unwrap();
        assert!(semantic_equal(&e, &abs, &bx).unwrap());
    }

    #[test]
    fn interpolant_reproduces_constant_and_affine() {
        let c = ContinuousOracle::new(
            "const",
            1,
            Arc::new(|_: &Point| Ok(rat(7, 3))),
            Some(Arc::new(|_: &SolidBox| Ok(Rat::zero()))),
            true,
        );
        let bx = SolidBox::omega(1, 2);
        let e = kuhn_interpolant(&c, &bx, &Rat::one()).unwrap();
        for x in [int(-2), int(0), rat(1, 2)] {
            assert_eq!(e.eval(&pt1(x)).unwrap(), rat(7, 3));
        }
        // affine reproduction in two dimensions
        let plane = ContinuousOracle::new(
            "x1+x2",
            2,
            Arc::new(|x: &Point| Ok(&x.coords[0] + &x.coords[1])),
            Some(Arc::new(|_: &SolidBox| Ok(int(2)))),
            false,
        );
        let bx2 = SolidBox::omega(2, 1);
        let e2 = kuhn_interpolant(&plane, &bx2, &Rat::one()).unwrap();
        let target = MinMaxExpr::from_affine(AffineFunction::new(vec![int(1), int(1)], int(0)));
        assert!(semantic_equal(&e2, &target, &bx2).unwrap());
    }

    #[test]
    fn interpolant_exact_at_vertices_and_matches_direct_eval() {
        let oracle = ContinuousOracle::quadratic();
        let bx = SolidBox::omega(1, 2);
        let step = rat(1, 2);
        let e = kuhn_interpolant(&oracle, &bx, &step).unwrap();
        // vertex exactness
        for j in 0..=8 {
            let x = bx.lo(0) + &step * int(j);
            assert_eq!(
                e.eval(&pt1(x.clone())).unwrap(),
                oracle.eval(&pt1(x)).unwrap()
            );
        }
        // interior points match the direct simplicial formula
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..100 {
            let x = pt1(rat(rng.gen_range(-32..=32), 16));
            assert_eq!(
                e.eval(&x).unwrap(),
                kuhn_direct_eval(&oracle, &bx, &step, &x)
            );
        }
        // certified error at sample points
        let l = oracle.lipschitz(&bx).unwrap().unwrap();
        let bound = &l * &step;
        for _ in 0..100 {
            let x = pt1(rat(rng.gen_range(-64..=64), 32));
            let err = (e.eval(&x).unwrap() - oracle.eval(&x).unwrap()).abs();
            assert!(err <= bound);
        }
    }

    #[test]
    fn direct_eval_matches_in_two_dims() {
        let pyramid = ContinuousOracle::new(
            "pyramid",
            2,
            Arc::new(|x: &Point| {
                let n = x.coords[0].abs().max(x.coords[1].abs());
                let v = Rat::one() - n;
                Ok(if v.is_negative() { Rat::zero() } else { v })
            }),
            Some(Arc::new(|_: &SolidBox| Ok(Rat::one()))),
            true,
        );
        let bx = SolidBox::omega(2, 2);
        let step = rat(1, 2);
        let e = kuhn_interpolant(&pyramid, &bx, &step).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for _ in 0..60 {
            let x = Point::new(vec![
                rat(rng.gen_range(-32..=32), 16),
                rat(rng.gen_range(-32..=32), 16),
            ]);
            assert_eq!(
                e.eval(&x).unwrap(),
                kuhn_direct_eval(&pyramid, &bx, &step, &x)
            );
        }
    }

    #[test]
    fn interpolant_rejects_bad_steps() {
        let oracle = ContinuousOracle::abs();
        let bx = SolidBox::omega(1, 1);
        assert!(matches!(
            kuhn_interpolant(&oracle, &bx, &rat(3, 7)),
            Err(Error::BadStep)
        ));
        let limits = Limits {
            grid_budget: 4,
            ..Limits::default()
        };
        assert!(matches!(
            kuhn_interpolant_with(&oracle, &bx, &rat(1, 4), &limits),
            Err(Error::GridTooLarge { .. })
        ));
    }

    #[test]
    fn uniform_approx_of_pa_oracle_is_exact_at_samples() {
        let oracle = ContinuousOracle::min_abs_one();
        let (h, report) = uniform_approx(&oracle, &rat(1, 2), 2).unwrap();
        assert!(report.certified_bound.clone().unwrap() <= rat(1, 2));
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        for _ in 0..100 {
            let x = pt1(rat(rng.gen_range(-48..=48), 16));
            let err = (h.eval(&x).unwrap() - oracle.eval(&x).unwrap()).abs();
            assert!(err <= rat(1, 2), "error {err} at {x:?}");
        }
        // PA target on compatible grids: exact at grid vertices
        for j in -12..=12 {
            let x = pt1(rat(j, 4));
            assert_eq!(h.eval(&x).unwrap(), oracle.eval(&x).unwrap());
        }
    }

    #[test]
    fn uniform_approx_constant_zero() {
        let zero = ContinuousOracle::new(
            "zero",
            1,
            Arc::new(|_: &Point| Ok(Rat::zero())),
            Some(Arc::new(|_: &SolidBox| Ok(Rat::zero()))),
            true,
        );
        let (h, report) = uniform_approx(&zero, &rat(1, 4), 1).unwrap();
        assert_eq!(report.max_observed_error, int(0));
        for x in [int(-1), rat(1, 2), int(2)] {
            assert_eq!(h.eval(&pt1(x)).unwrap(), int(0));
        }
    }

    #[test]
    fn uniform_approx_sign_changing_splits() {
        let id = ContinuousOracle::poly(vec![int(0), int(1)]);
        let (h, report) = uniform_approx(&id, &rat(1, 2), 1).unwrap();
        assert!(report.certified_bound.is_some());
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        for _ in 0..100 {
            let x = pt1(rat(rng.gen_range(-32..=32), 16));
            let err = (h.eval(&x).unwrap() - id.eval(&x).unwrap()).abs();
            assert!(err <= rat(1, 2), "error {err}");
        }
    }

    #[test]
    fn monotone_sequence_increases_and_stays_below() {
        let oracle = ContinuousOracle::abs();
        let hs = monotone_under_approx(&oracle, 3).unwrap();
        assert_eq!(hs.len(), 3);
        let limits = Limits::default().with_max_hyperplanes(2048);
        for w in hs.windows(2) {
            let (lo, _) =
                difference_bound_with(&w[1], &w[0], &SolidBox::omega(1, 4), &limits).unwrap();
            assert!(lo >= int(0), "monotonicity violated: {lo}");
        }
        let mut rng = ChaCha8Rng::seed_from_u64(59);
        for h in &hs {
            for _ in 0..60 {
                let x = pt1(rat(rng.gen_range(-64..=64), 16));
                let v = h.eval(&x).unwrap();
                assert!(v >= int(0));
                assert!(v <= oracle.eval(&x).unwrap());
            }
        }
        // squeeze at a zero of the target
        for h in &hs {
            assert_eq!(h.eval(&pt1(int(0))).unwrap(), int(0));
        }
        // rate at t = 1 for k = 3
        let err = oracle.eval(&pt1(int(1))).unwrap() - hs[2].eval(&pt1(int(1))).unwrap();
        assert!(err <= int(2) * rat(1, 8));
    }

    #[test]
    fn monotone_constant_is_reached_immediately() {
        let one = ContinuousOracle::new(
            "one",
            1,
            Arc::new(|_: &Point| Ok(Rat::one())),
            Some(Arc::new(|_: &SolidBox| Ok(Rat::zero()))),
            true,
        );
        let hs = monotone_under_approx(&one, 2).unwrap();
        // h_1 equals 1 on Omega_1 and 0 outside Omega_2
        for x in [int(-1), int(0), rat(1, 2), int(1)] {
            assert_eq!(hs[0].eval(&pt1(x)).unwrap(), int(1));
        }
        for x in [int(3), int(-5)] {
            assert_eq!(hs[0].eval(&pt1(x)).unwrap(), int(0));
        }
        // h_2 >= h_1 pointwise at samples
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        for _ in 0..50 {
            let x = pt1(rat(rng.gen_range(-64..=64), 16));
            assert!(hs[1].eval(&x).unwrap() >= hs[0].eval(&x).unwrap());
        }
    }

    #[test]
    fn order_approx_converges_to_identity() {
        let id = ContinuousOracle::poly(vec![int(0), int(1)]);
        let seq = order_approx(&id, 4).unwrap();
        assert_eq!(seq.len(), 4);
        // at 0 the two parts cancel exactly
        assert_eq!(seq[3].eval(&pt1(int(0))).unwrap(), int(0));
        // error at 1/2 bounded by the sum of one-sided bounds
        let err = (id.eval(&pt1(rat(1, 2))).unwrap()
            - seq[2].eval(&pt1(rat(1, 2))).unwrap())
        .abs();
        assert!(err <= int(4) * rat(1, 8));
        // non-increasing observed error along the sequence at fixed samples
        let mut rng = ChaCha8Rng::seed_from_u64(67);
        for _ in 0..40 {
            let x = pt1(rat(rng.gen_range(-32..=32), 16));
            let mut prev: Option<Rat> = None;
            for s in &seq {
                let err = (id.eval(&x).unwrap() - s.eval(&x).unwrap()).abs();
                if let Some(p) = prev {
                    assert!(err <= p);
                }
                prev = Some(err);
            }
        }
    }

    #[test]
    fn order_approx_of_negative_constant() {
        let neg = ContinuousOracle::poly(vec![int(-1)]);
        let seq = order_approx(&neg, 3).unwrap();
        // converges to -1 on growing balls; at 0 it is exact from k = 1
        assert_eq!(seq[2].eval(&pt1(int(0))).unwrap(), int(-1));
        assert_eq!(seq[2].eval(&pt1(rat(1, 2))).unwrap(), int(-1));
    }

    #[test]
    fn oracle_registry() {
        assert_eq!(ContinuousOracle::by_name("abs").unwrap().name(), "abs");
        assert!(ContinuousOracle::by_name("nope").is_err());
        let p = ContinuousOracle::by_name("poly:1,0,-2").unwrap();
        // 1 - 2 t^2 at 2 = -7
        assert_eq!(p.eval(&pt1(int(2))).unwrap(), int(-7));
        let q = ContinuousOracle::by_name("quadratic").unwrap();
        assert_eq!(q.eval(&pt1(rat(3, 2))).unwrap(), rat(9, 4));
        assert_eq!(
            q.lipschitz(&SolidBox::omega(1, 3)).unwrap().unwrap(),
            int(6)
        );
    }

    #[test]
    fn flagged_oracle_rejects_negative_samples() {
        let bad = ContinuousOracle::new(
            "bad",
            1,
            Arc::new(|x: &Point| Ok(-x.coords[0].clone())),
            None,
            true,
        );
        assert!(matches!(
            bad.eval(&pt1(int(1))),
            Err(Error::NotNonnegative)
        ));
    }

    #[test]
    fn positive_minorant_sits_between_zero_and_f() {
        let oracle = ContinuousOracle::min_abs_one();
        let center = pt1(rat(1, 2));
        let y = positive_minorant(&oracle, &center).unwrap();
        assert!(y.eval(&center).unwrap().is_positive());
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        for _ in 0..100 {
            let x = pt1(rat(rng.gen_range(-64..=64), 32));
            let v = y.eval(&x).unwrap();
            assert!(v >= int(0));
            assert!(v <= oracle.eval(&x).unwrap());
        }
    }
}
