//! Exact rational linear programming.
//!
//! A dense two-phase simplex over arbitrary-precision rationals. Pivoting
//! uses Dantzig's rule and falls back to Bland's rule after a run of
//! degenerate pivots, which guarantees termination. All comparisons are
//! exact; there are no tolerances.
//!
//! The solver handles free variables by sign-splitting, so callers state
//! problems directly over R^n: maximize `c . y` subject to `a . y <= b`.

use crate::affine::{AffineFunction, Point};
use crate::rat::Rat;
use crate::Error;
use num_traits::{One, Signed, Zero};

/// Result of an LP solve.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal { value: Rat, point: Vec<Rat> },
    Unbounded,
    Infeasible,
}

/// Number of consecutive degenerate pivots before switching to Bland's rule.
const BLAND_TRIGGER: u32 = 8;

struct Tableau {
    /// m rows, each `ncols + 1` wide; the final entry is the rhs.
    rows: Vec<Vec<Rat>>,
    /// Basic column per row.
    basis: Vec<usize>,
    ncols: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize, obj: &mut Vec<Rat>) {
        let piv = self.rows[r][c].clone();
        debug_assert!(!piv.is_zero());
        let inv = Rat::one() / piv;
        for entry in self.rows[r].iter_mut() {
            *entry *= &inv;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let factor = row[c].clone();
            if factor.is_zero() {
                continue;
            }
            for (entry, p) in row.iter_mut().zip(&pivot_row) {
                *entry -= &factor * p;
            }
        }
        let factor = obj[c].clone();
        if !factor.is_zero() {
            for (entry, p) in obj.iter_mut().zip(&pivot_row) {
                *entry -= &factor * p;
            }
        }
        self.basis[r] = c;
    }

    /// Run simplex iterations until the reduced-cost row `obj` is
    /// nonnegative over `allowed` columns. Minimization convention: `obj[j]`
    /// is the reduced cost of column j, `obj[ncols]` holds minus the current
    /// objective value. Returns false on unboundedness.
    fn solve(&mut self, obj: &mut Vec<Rat>, allowed: &[bool]) -> bool {
        let mut degenerate_run: u32 = 0;
        loop {
            let use_bland = degenerate_run >= BLAND_TRIGGER;
            let mut entering: Option<usize> = None;
            if use_bland {
                for j in 0..self.ncols {
                    if allowed[j] && obj[j].is_negative() {
                        entering = Some(j);
                        break;
                    }
                }
            } else {
                let mut best: Option<(usize, &Rat)> = None;
                for j in 0..self.ncols {
                    if allowed[j] && obj[j].is_negative() {
                        match best {
                            Some((_, b)) if &obj[j] >= b => {}
                            _ => best = Some((j, &obj[j])),
                        }
                    }
                }
                entering = best.map(|(j, _)| j);
            }
            let Some(c) = entering else {
                return true;
            };
            // Ratio test; ties broken by smallest basic variable (Bland).
            let mut leave: Option<(usize, Rat)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][c];
                if a.is_positive() {
                    let ratio = &self.rows[i][self.ncols] / a;
                    match &leave {
                        Some((li, lr)) => {
                            if ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li]) {
                                leave = Some((i, ratio));
                            }
                        }
                        None => leave = Some((i, ratio)),
                    }
                }
            }
            let Some((r, ratio)) = leave else {
                return false; // unbounded direction
            };
            if ratio.is_zero() {
                degenerate_run += 1;
            } else {
                degenerate_run = 0;
            }
            self.pivot(r, c, obj);
        }
    }
}

/// Maximize `objective . y` over `{ y : row . y <= rhs for each constraint }`
/// with `y` free in R^n.
pub fn maximize(objective: &[Rat], constraints: &[(Vec<Rat>, Rat)]) -> Result<LpOutcome, Error> {
    let n = objective.len();
    for (row, _) in constraints {
        if row.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: row.len(),
            });
        }
    }
    let m = constraints.len();
    // Columns: y+ (n), y- (n), slack (m), artificial (m).
    let ncols = 2 * n + 2 * m;
    let mut rows = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    for (i, (row, rhs)) in constraints.iter().enumerate() {
        let flip = rhs.is_negative();
        let sign = if flip { -Rat::one() } else { Rat::one() };
        let mut t = vec![Rat::zero(); ncols + 1];
        for (j, a) in row.iter().enumerate() {
            t[j] = a * &sign;
            t[n + j] = -(a * &sign);
        }
        t[2 * n + i] = sign.clone(); // slack: +1, or -1 on flipped rows
        t[2 * n + m + i] = Rat::one(); // artificial
        t[ncols] = rhs * &sign;
        rows.push(t);
        basis.push(2 * n + m + i);
    }
    let mut tab = Tableau { rows, basis, ncols };

    // Phase 1: minimize the artificial sum. Reduced costs start as
    // c_j - sum over rows of column j (artificials are basic with cost 1).
    let mut obj = vec![Rat::zero(); ncols + 1];
    for j in 2 * n + m..ncols {
        obj[j] = Rat::one();
    }
    for row in &tab.rows {
        // The zip covers the rhs slot too, leaving -(artificial sum) there.
        for (o, a) in obj.iter_mut().zip(row.iter()) {
            *o -= a;
        }
    }
    let allowed: Vec<bool> = (0..ncols).map(|_| true).collect();
    if !tab.solve(&mut obj, &allowed) {
        return Err(Error::InternalInconsistency(
            "phase-1 objective unbounded".into(),
        ));
    }
    // Artificial sum = -obj[ncols].
    if obj[ncols].is_negative() {
        return Ok(LpOutcome::Infeasible);
    }
    // Drive remaining artificials out of the basis.
    let art_start = 2 * n + m;
    let mut drop_rows = Vec::new();
    for r in 0..tab.rows.len() {
        if tab.basis[r] >= art_start {
            let mut pivot_col = None;
            for j in 0..art_start {
                if !tab.rows[r][j].is_zero() {
                    pivot_col = Some(j);
                    break;
                }
            }
            match pivot_col {
                Some(c) => tab.pivot(r, c, &mut obj),
                None => drop_rows.push(r), // redundant constraint
            }
        }
    }
    for &r in drop_rows.iter().rev() {
        tab.rows.remove(r);
        tab.basis.remove(r);
    }

    // Phase 2: minimize -objective over the original columns.
    let mut obj2 = vec![Rat::zero(); ncols + 1];
    for j in 0..n {
        obj2[j] = -objective[j].clone();
        obj2[n + j] = objective[j].clone();
    }
    // Express reduced costs relative to the current basis.
    for (r, &b) in tab.basis.iter().enumerate() {
        let cb = obj2[b].clone();
        if cb.is_zero() {
            continue;
        }
        let row = tab.rows[r].clone();
        for (o, a) in obj2.iter_mut().zip(row.iter()) {
            *o -= &cb * a;
        }
    }
    let mut allowed: Vec<bool> = (0..ncols).map(|j| j < art_start).collect();
    for &b in &tab.basis {
        // A basic artificial can remain on a degenerate row; never re-enter.
        if b >= art_start {
            allowed[b] = false;
        }
    }
    if !tab.solve(&mut obj2, &allowed) {
        return Ok(LpOutcome::Unbounded);
    }
    // Read off the solution.
    let mut vals = vec![Rat::zero(); ncols];
    for (r, &b) in tab.basis.iter().enumerate() {
        vals[b] = tab.rows[r][ncols].clone();
    }
    let point: Vec<Rat> = (0..n).map(|j| &vals[j] - &vals[n + j]).collect();
    let mut value = Rat::zero();
    for (c, y) in objective.iter().zip(&point) {
        value += c * y;
    }
    Ok(LpOutcome::Optimal { value, point })
}

/// A strictly interior point of `{ x : g(x) > 0 for all g }`, or `None` when
/// the open polyhedron is empty.
///
/// Maximizes a slack `s` subject to `g(x) >= s` and `s <= 1`; the region has
/// an interior point exactly when the optimum is positive.
pub fn interior_point(constraints: &[AffineFunction]) -> Result<Option<Point>, Error> {
    let m = match constraints.first() {
        Some(g) => g.dim(),
        None => {
            return Err(Error::InternalInconsistency(
                "interior_point needs at least one constraint".into(),
            ))
        }
    };
    for g in constraints {
        if g.dim() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                got: g.dim(),
            });
        }
    }
    // Variables y = (x, s).
    let mut objective = vec![Rat::zero(); m + 1];
    objective[m] = Rat::one();
    let mut rows = Vec::with_capacity(constraints.len() + 1);
    for g in constraints {
        // v.x + b >= s  <=>  -v.x + s <= b
        let mut row: Vec<Rat> = g.v.iter().map(|c| -c).collect();
        row.push(Rat::one());
        rows.push((row, g.b.clone()));
    }
    let mut cap = vec![Rat::zero(); m + 1];
    cap[m] = Rat::one();
    rows.push((cap, Rat::one()));
    match maximize(&objective, &rows)? {
        LpOutcome::Optimal { value, mut point } => {
            if value.is_positive() {
                point.truncate(m);
                Ok(Some(Point::new(point)))
            } else {
                Ok(None)
            }
        }
        LpOutcome::Unbounded => Err(Error::InternalInconsistency(
            "slack objective cannot be unbounded".into(),
        )),
        // Unreachable: s is free below, so the system always admits a point.
        LpOutcome::Infeasible => Ok(None),
    }
}

/// Exact extremum of an affine function over the closed region
/// `{ x : g(x) >= 0 for all g }`. The region must be nonempty; unbounded
/// optima are reported as `LpOutcome::Unbounded`.
pub fn optimize_affine(
    objective: &AffineFunction,
    constraints: &[AffineFunction],
    want_max: bool,
) -> Result<LpOutcome, Error> {
    let m = objective.dim();
    let sign = if want_max { Rat::one() } else { -Rat::one() };
    let obj: Vec<Rat> = objective.v.iter().map(|c| c * &sign).collect();
    let rows: Vec<(Vec<Rat>, Rat)> = constraints
        .iter()
        .map(|g| {
            if g.dim() != m {
                return Err(Error::DimensionMismatch {
                    expected: m,
                    got: g.dim(),
                });
            }
            // v.x + b >= 0  <=>  -v.x <= b
            Ok((g.v.iter().map(|c| -c).collect(), g.b.clone()))
        })
        .collect::<Result<_, _>>()?;
    match maximize(&obj, &rows)? {
        LpOutcome::Optimal { value, point } => Ok(LpOutcome::Optimal {
            value: value * sign + &objective.b,
            point,
        }),
        other => Ok(other),
    }
}

/// Exact maximum of `min_i d_i(x)` over the closed region
/// `{ x : g(x) >= 0 }`. Used for deciding clause dominance over a box.
pub fn max_of_min(
    diffs: &[AffineFunction],
    constraints: &[AffineFunction],
) -> Result<LpOutcome, Error> {
    let m = match diffs.first() {
        Some(d) => d.dim(),
        None => {
            return Err(Error::InternalInconsistency(
                "max_of_min needs at least one function".into(),
            ))
        }
    };
    // Variables y = (x, s); maximize s subject to s <= d_i(x) and g >= 0.
    let mut objective = vec![Rat::zero(); m + 1];
    objective[m] = Rat::one();
    let mut rows = Vec::new();
    for d in diffs {
        if d.dim() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                got: d.dim(),
            });
        }
        // s - v.x <= b
        let mut row: Vec<Rat> = d.v.iter().map(|c| -c).collect();
        row.push(Rat::one());
        rows.push((row, d.b.clone()));
    }
    for g in constraints {
        if g.dim() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                got: g.dim(),
            });
        }
        let mut row: Vec<Rat> = g.v.iter().map(|c| -c).collect();
        row.push(Rat::zero());
        rows.push((row, g.b.clone()));
    }
    match maximize(&objective, &rows)? {
        LpOutcome::Optimal { value, mut point } => {
            point.truncate(m);
            Ok(LpOutcome::Optimal { value, point })
        }
        other => Ok(other),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{int, rat};

    #[test]
    fn simple_bounded_maximum() {
        // max x + y st x <= 2, y <= 3, -x <= 0, -y <= 0
        let out = maximize(
            &[int(1), int(1)],
            &[
                (vec![int(1), int(0)], int(2)),
                (vec![int(0), int(1)], int(3)),
                (vec![int(-1), int(0)], int(0)),
                (vec![int(0), int(-1)], int(0)),
            ],
        )
        .unwrap();
        assert_eq!(
            out,
            LpOutcome::Optimal {
                value: int(5),
                point: vec![int(2), int(3)]
            }
        );
    }

    #[test]
    fn unbounded_detected() {
        let out = maximize(&[int(1)], &[(vec![int(-1)], int(0))]).unwrap();
        assert_eq!(out, LpOutcome::Unbounded);
    }

    #[test]
    fn infeasible_detected() {
        // x <= -1 and -x <= -1 (x >= 1): empty
        let out = maximize(
            &[int(1)],
            &[(vec![int(1)], int(-1)), (vec![int(-1)], int(-1))],
        )
        .unwrap();
        assert_eq!(out, LpOutcome::Infeasible);
    }

    #[test]
    fn free_variables_handled() {
        // max -y st y >= -5 (i.e. -y <= 5): optimum 5 at y = -5
        let out = maximize(&[int(-1)], &[(vec![int(-1)], int(5))]).unwrap();
        assert_eq!(
            out,
            LpOutcome::Optimal {
                value: int(5),
                point: vec![int(-5)]
            }
        );
    }

    #[test]
    fn fractional_optimum_exact() {
        // max x st 3x <= 1: x = 1/3
        let out = maximize(&[int(1)], &[(vec![int(3)], int(1))]).unwrap();
        match out {
            LpOutcome::Optimal { value, point } => {
                assert_eq!(value, rat(1, 3));
                assert_eq!(point, vec![rat(1, 3)]);
            }
            other => panic!("unexpected outcome {other:?}"),
        }
    }

    fn aff(v: &[i64], b: i64) -> AffineFunction {
        AffineFunction::new(v.iter().map(|&c| int(c)).collect(), int(b))
    }

    #[test]
    fn interior_point_examples() {
        // {t > 0, t < 1}
        let w = interior_point(&[aff(&[1], 0), aff(&[-1], 1)]).unwrap().unwrap();
        let t = &w.coords[0];
        assert!(t > &int(0) && t < &int(1));
        // {t > 0, t < 0} is empty
        assert!(interior_point(&[aff(&[1], 0), aff(&[-1], 0)])
            .unwrap()
            .is_none());
        // {t > 1, t > 2, t < 3}: witness in (2, 3)
        let w = interior_point(&[aff(&[1], -1), aff(&[1], -2), aff(&[-1], 3)])
            .unwrap()
            .unwrap();
        let t = &w.coords[0];
        assert!(t > &int(2) && t < &int(3));
    }

    #[test]
    fn interior_point_closed_but_not_open() {
        // {t >= 0, t <= 0} has the single point 0: no interior point.
        assert!(interior_point(&[aff(&[1], 0), aff(&[-1], 0)])
            .unwrap()
            .is_none());
    }

    #[test]
    fn optimize_affine_over_triangle() {
        // triangle x >= 0, y >= 0, x + y <= 1; maximize x + 2y -> 2 at (0,1)
        let cons = [aff(&[1, 0], 0), aff(&[0, 1], 0), aff(&[-1, -1], 1)];
        let out = optimize_affine(&aff(&[1, 2], 0), &cons, true).unwrap();
        match out {
            LpOutcome::Optimal { value, .. } => assert_eq!(value, int(2)),
            other => panic!("unexpected {other:?}"),
        }
        let out = optimize_affine(&aff(&[1, 2], 5), &cons, false).unwrap();
        match out {
            LpOutcome::Optimal { value, .. } => assert_eq!(value, int(5)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn max_of_min_over_interval() {
        // max over [-1, 1] of min(t + 1, 1 - t) = 1 at t = 0
        let out = max_of_min(
            &[aff(&[1], 1), aff(&[-1], 1)],
            &[aff(&[1], 1), aff(&[-1], 1)],
        )
        .unwrap();
        match out {
            LpOutcome::Optimal { value, .. } => assert_eq!(value, int(1)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn degenerate_constraints_terminate() {
        // Heavily redundant constraints around the same vertex.
        let cons: Vec<(Vec<Rat>, Rat)> = (1..=10)
            .map(|k| (vec![int(k), int(k)], int(0)))
            .chain([(vec![int(-1), int(0)], int(0)), (vec![int(0), int(-1)], int(0))])
            .collect();
        let out = maximize(&[int(1), int(1)], &cons).unwrap();
        match out {
            LpOutcome::Optimal { value, .. } => assert_eq!(value, int(0)),
            other => panic!("unexpected {other:?}"),
        }
    }
}
