//! Min-max normal form for piecewise affine functions.
//!
//! A [`MinMaxExpr`] is a max of min-clauses of affine functions: the normal
//! form of the sublattice of C(R^m) generated by the affine functions. Every
//! lattice and vector-space operation lands back in this form; the only
//! expansion that can grow quickly is negation, which is guarded by a clause
//! budget.

use crate::affine::{AffineFunction, Point, SolidBox};
use crate::rat::{rat_serde, Rat};
use crate::{Error, Limits};
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

/// Piecewise affine function as `max over clauses of min over members`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinMaxExpr {
    m: usize,
    clauses: Vec<Vec<AffineFunction>>,
}

#[derive(Serialize, Deserialize)]
struct RawExpr {
    m: usize,
    clauses: Vec<Vec<AffineFunction>>,
}

impl Serialize for MinMaxExpr {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        RawExpr {
            m: self.m,
            clauses: self.clauses.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for MinMaxExpr {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = RawExpr::deserialize(d)?;
        MinMaxExpr::new(raw.m, raw.clauses).map_err(serde::de::Error::custom)
    }
}

impl MinMaxExpr {
    /// Build an expression, deduplicating members within clauses and
    /// repeated clauses. Clauses and members must be non-empty and share the
    /// ambient dimension.
    pub fn new(m: usize, clauses: Vec<Vec<AffineFunction>>) -> Result<Self, Error> {
        if m == 0 {
            return Err(Error::Parse("ambient dimension must be at least 1".into()));
        }
        if clauses.is_empty() {
            return Err(Error::Parse("expression needs at least one clause".into()));
        }
        let mut deduped: Vec<Vec<AffineFunction>> = Vec::with_capacity(clauses.len());
        let mut seen_keys: std::collections::HashSet<Vec<AffineFunction>> =
            std::collections::HashSet::new();
        for clause in clauses {
            if clause.is_empty() {
                return Err(Error::Parse("clause needs at least one member".into()));
            }
            let mut members: Vec<AffineFunction> = Vec::with_capacity(clause.len());
            for f in clause {
                if f.dim() != m {
                    return Err(Error::DimensionMismatch {
                        expected: m,
                        got: f.dim(),
                    });
                }
                if !members.contains(&f) {
                    members.push(f);
                }
            }
            let mut key = members.clone();
            key.sort();
            if seen_keys.insert(key) {
                deduped.push(members);
            }
        }
        Ok(MinMaxExpr {
            m,
            clauses: deduped,
        })
    }

    pub fn from_affine(f: AffineFunction) -> Self {
        let m = f.dim();
        MinMaxExpr {
            m,
            clauses: vec![vec![f]],
        }
    }

    pub fn constant(m: usize, c: Rat) -> Self {
        Self::from_affine(AffineFunction::constant(m, c))
    }

    pub fn zero(m: usize) -> Self {
        Self::constant(m, Rat::zero())
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn clauses(&self) -> &[Vec<AffineFunction>] {
        &self.clauses
    }

    pub fn member_count(&self) -> usize {
        self.clauses.iter().map(|c| c.len()).sum()
    }

    /// Exact evaluation: max over clauses of min over members.
    pub fn eval(&self, x: &Point) -> Result<Rat, Error> {
        if x.dim() != self.m {
            return Err(Error::DimensionMismatch {
                expected: self.m,
                got: x.dim(),
            });
        }
        let mut best: Option<Rat> = None;
        for clause in &self.clauses {
            let mut low: Option<Rat> = None;
            for f in clause {
                let val = f.eval(x)?;
                low = Some(match low {
                    Some(cur) if cur <= val => cur,
                    _ => val,
                });
            }
            let low = low.expect("clauses are non-empty");
            best = Some(match best {
                Some(cur) if cur >= low => cur,
                _ => low,
            });
        }
        Ok(best.expect("expressions have at least one clause"))
    }

    fn check_dim(&self, other: &MinMaxExpr) -> Result<(), Error> {
        if self.m != other.m {
            return Err(Error::DimensionMismatch {
                expected: self.m,
                got: other.m,
            });
        }
        Ok(())
    }

    /// Pointwise maximum: clause-list concatenation.
    pub fn join(&self, other: &MinMaxExpr) -> Result<MinMaxExpr, Error> {
        self.check_dim(other)?;
        let mut clauses = self.clauses.clone();
        clauses.extend(other.clauses.iter().cloned());
        MinMaxExpr::new(self.m, clauses)
    }

    /// Pointwise minimum: distributivity turns `min(max, max)` into the max
    /// over pairwise clause unions.
    pub fn meet(&self, other: &MinMaxExpr) -> Result<MinMaxExpr, Error> {
        self.check_dim(other)?;
        let mut clauses = Vec::with_capacity(self.clauses.len() * other.clauses.len());
        for c1 in &self.clauses {
            for c2 in &other.clauses {
                let mut merged = c1.clone();
                merged.extend(c2.iter().cloned());
                clauses.push(merged);
            }
        }
        MinMaxExpr::new(self.m, clauses)
    }

    /// Pointwise sum: `min_p s_p + min_q t_q = min_{p,q} (s_p + t_q)` clause
    /// by clause.
    pub fn add(&self, other: &MinMaxExpr) -> Result<MinMaxExpr, Error> {
        self.check_dim(other)?;
        let mut clauses = Vec::with_capacity(self.clauses.len() * other.clauses.len());
        for c1 in &self.clauses {
            for c2 in &other.clauses {
                let mut sums = Vec::with_capacity(c1.len() * c2.len());
                for a in c1 {
                    for b in c2 {
                        sums.push(a.add(b)?);
                    }
                }
                clauses.push(sums);
            }
        }
        MinMaxExpr::new(self.m, clauses)
    }

    /// Pointwise negation via full distributive expansion.
    ///
    /// `-(max of mins)` is a min of maxes; re-expanding to max-of-mins takes
    /// one clause per choice function picking a member from every original
    /// clause. The pre-prune clause count is the product of clause sizes and
    /// is checked against the clause budget.
    pub fn negate(&self) -> Result<MinMaxExpr, Error> {
        self.negate_with(&Limits::default())
    }

    pub fn negate_with(&self, limits: &Limits) -> Result<MinMaxExpr, Error> {
        let mut product: u128 = 1;
        for clause in &self.clauses {
            product = product.saturating_mul(clause.len() as u128);
            if product > limits.clause_budget {
                return Err(Error::ExpressionTooLarge {
                    clauses: product,
                    budget: limits.clause_budget,
                });
            }
        }
        // Choice-function enumeration over clause members.
        let sizes: Vec<usize> = self.clauses.iter().map(|c| c.len()).collect();
        let mut idx = vec![0usize; sizes.len()];
        let mut clauses: Vec<Vec<AffineFunction>> = Vec::with_capacity(product as usize);
        loop {
            let mut members: Vec<AffineFunction> = Vec::with_capacity(sizes.len());
            for (p, &i) in idx.iter().enumerate() {
                let neg = self.clauses[p][i].negated();
                if !members.contains(&neg) {
                    members.push(neg);
                }
            }
            clauses.push(members);
            // increment mixed-radix counter
            let mut carry = true;
            for (slot, &size) in idx.iter_mut().zip(&sizes) {
                if carry {
                    *slot += 1;
                    if *slot == size {
                        *slot = 0;
                    } else {
                        carry = false;
                    }
                }
            }
            if carry {
                break;
            }
        }
        let expr = MinMaxExpr::new(self.m, clauses)?;
        Ok(expr.structural_prune())
    }

    /// Scalar multiple. Nonnegative factors scale members in place; negative
    /// factors route through negation.
    pub fn scale(&self, lambda: &Rat) -> Result<MinMaxExpr, Error> {
        self.scale_with(lambda, &Limits::default())
    }

    pub fn scale_with(&self, lambda: &Rat, limits: &Limits) -> Result<MinMaxExpr, Error> {
        if lambda.is_negative() {
            let neg = self.negate_with(limits)?;
            return neg.scale_with(&-lambda.clone(), limits);
        }
        let clauses = self
            .clauses
            .iter()
            .map(|c| c.iter().map(|f| f.scaled(lambda)).collect())
            .collect();
        MinMaxExpr::new(self.m, clauses)
    }

    /// Budget-free simplification that is valid on all of R^m: removes
    /// members dominated by a parallel member in the same clause, clauses
    /// that are supersets of another clause, and duplicates.
    pub fn structural_prune(&self) -> MinMaxExpr {
        let mut clauses: Vec<Vec<AffineFunction>> = Vec::with_capacity(self.clauses.len());
        for clause in &self.clauses {
            let mut kept: Vec<AffineFunction> = Vec::with_capacity(clause.len());
            for (i, f) in clause.iter().enumerate() {
                // Drop f when a parallel member sits (weakly) below it; the
                // min never picks f. Ties keep the earlier member.
                let dominated = clause.iter().enumerate().any(|(j, g)| {
                    j != i && g.v == f.v && (g.b < f.b || (g.b == f.b && j < i))
                });
                if !dominated {
                    kept.push(f.clone());
                }
            }
            clauses.push(kept);
        }
        // Global clause dominance: min(C_p) <= min(C_q) holds everywhere
        // whenever every member of C_q has a parallel member of C_p at or
        // below it. Such a clause never attains the max. Supersets and
        // duplicates are the special case of identical witnesses.
        let cl_le = |cp: &[AffineFunction], cq: &[AffineFunction]| -> bool {
            cq.iter()
                .all(|c| cp.iter().any(|d| d.v == c.v && d.b <= c.b))
        };
        let n = clauses.len();
        let mut keep = vec![true; n];
        for p in 0..n {
            for q in 0..n {
                if p == q {
                    continue;
                }
                if cl_le(&clauses[p], &clauses[q]) && (!cl_le(&clauses[q], &clauses[p]) || q < p)
                {
                    keep[p] = false;
                    break;
                }
            }
        }
        let clauses: Vec<Vec<AffineFunction>> = clauses
            .into_iter()
            .zip(keep)
            .filter_map(|(c, k)| k.then_some(c))
            .collect();
        MinMaxExpr {
            m: self.m,
            clauses,
        }
    }

    /// Evaluation-preserving simplification on a box.
    ///
    /// Removes clause members that lie above another member everywhere on
    /// the box (they never attain the min) and clauses whose min lies below
    /// another clause's min everywhere on the box (they never attain the
    /// max). Member dominance is decided by exact affine ranges over the
    /// box; clause dominance by exact LP.
    pub fn prune(&self, bx: &SolidBox) -> Result<MinMaxExpr, Error> {
        if bx.dim() != self.m {
            return Err(Error::DimensionMismatch {
                expected: self.m,
                got: bx.dim(),
            });
        }
        let mut clauses: Vec<Vec<AffineFunction>> = Vec::with_capacity(self.clauses.len());
        for clause in &self.clauses {
            let mut kept: Vec<AffineFunction> = Vec::new();
            for (i, f) in clause.iter().enumerate() {
                let mut dominated = false;
                for (j, g) in clause.iter().enumerate() {
                    if i == j {
                        continue;
                    }
                    // g <= f on the box makes f redundant in the min.
                    let (_, max) = g.sub(f)?.range_on_box(bx)?;
                    if max <= Rat::zero() {
                        // After dedup two distinct members cannot dominate
                        // each other on a solid box.
                        dominated = true;
                        break;
                    }
                }
                if !dominated {
                    kept.push(f.clone());
                }
            }
            clauses.push(kept);
        }

        let nclauses = clauses.len();
        if nclauses > 1 {
            let closed_box = bx.interior_constraints();
            // dom[p][q]: clause p's min <= clause q's min everywhere on box.
            let mut dom = vec![vec![false; nclauses]; nclauses];
            let corners = sample_points(bx);
            for p in 0..nclauses {
                'pair: for q in 0..nclauses {
                    if p == q {
                        continue;
                    }
                    // Quick refutation at sample points.
                    for x in &corners {
                        let mp = clause_min(&clauses[p], x)?;
                        let mq = clause_min(&clauses[q], x)?;
                        if mp > mq {
                            continue 'pair;
                        }
                    }
                    // min(C_p) <= min(C_q) iff min(C_p) <= a for every
                    // member a of C_q.
                    let mut all = true;
                    for a in &clauses[q] {
                        let diffs: Vec<AffineFunction> = clauses[p]
                            .iter()
                            .map(|f| f.sub(a))
                            .collect::<Result<_, _>>()?;
                        let dominated_by = if diffs.len() == 1 {
                            let (_, max) = diffs[0].range_on_box(bx)?;
                            max <= Rat::zero()
                        } else {
                            match crate::lp::max_of_min(&diffs, &closed_box)? {
                                crate::lp::LpOutcome::Optimal { value, .. } => {
                                    value <= Rat::zero()
                                }
                                _ => {
                                    return Err(Error::InternalInconsistency(
                                        "dominance LP must be bounded and feasible on a box"
                                            .into(),
                                    ))
                                }
                            }
                        };
                        if !dominated_by {
                            all = false;
                            break;
                        }
                    }
                    dom[p][q] = all;
                }
            }
            let mut keep = vec![true; nclauses];
            for p in 0..nclauses {
                for q in 0..nclauses {
                    if p != q && dom[p][q] && (!dom[q][p] || q < p) {
                        keep[p] = false;
                        break;
                    }
                }
            }
            clauses = clauses
                .into_iter()
                .zip(keep)
                .filter_map(|(c, k)| k.then_some(c))
                .collect();
        }
        MinMaxExpr::new(self.m, clauses)
    }
}

fn clause_min(clause: &[AffineFunction], x: &Point) -> Result<Rat, Error> {
    let mut low: Option<Rat> = None;
    for f in clause {
        let val = f.eval(x)?;
        low = Some(match low {
            Some(cur) if cur <= val => cur,
            _ => val,
        });
    }
    Ok(low.expect("clause non-empty"))
}

/// Center plus the 2m face midpoints: cheap exact refutation points.
fn sample_points(bx: &SolidBox) -> Vec<Point> {
    let m = bx.dim();
    let mut pts = vec![bx.center.clone()];
    for i in 0..m {
        for sgn in [1i64, -1i64] {
            let mut c = bx.center.coords.clone();
            c[i] = if sgn > 0 { bx.hi(i) } else { bx.lo(i) };
            pts.push(Point::new(c));
        }
    }
    pts
}

/// Exact equality of two expressions as functions on a box.
///
/// Delegates to the cell decomposition of the pair: on every cell of the
/// joint arrangement each expression agrees with a single affine component,
/// and the functions agree on the box iff those components coincide on every
/// cell.
pub fn semantic_equal(e1: &MinMaxExpr, e2: &MinMaxExpr, bx: &SolidBox) -> Result<bool, Error> {
    semantic_equal_with(e1, e2, bx, &Limits::default())
}

pub fn semantic_equal_with(
    e1: &MinMaxExpr,
    e2: &MinMaxExpr,
    bx: &SolidBox,
    limits: &Limits,
) -> Result<bool, Error> {
    crate::cells::exprs_agree_on_box(e1, e2, bx, limits)
}

/// Convenience wrapper mirroring the serialization schema.
#[derive(Serialize, Deserialize)]
pub struct ExprDocument {
    pub m: usize,
    pub clauses: Vec<Vec<AffineDocument>>,
}

#[derive(Serialize, Deserialize)]
pub struct AffineDocument {
    pub v: Vec<String>,
    #[serde(with = "rat_serde")]
    pub b: Rat,
}
