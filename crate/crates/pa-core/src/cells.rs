//! Cell decompositions of piecewise affine functions on boxes.
//!
//! The components of a min-max expression induce an arrangement of agreement
//! hyperplanes `{f_i = f_j}`. The open box minus those hyperplanes falls into
//! convex open cells; on each cell the expression agrees with exactly one
//! component. This module enumerates the cells with exact interior
//! witnesses, extracts characteristic pairs, bounds expressions over boxes,
//! and reconstructs a min-max form from the cell data.
//!
//! Enumeration inserts hyperplanes incrementally, splitting cells whose
//! interior the hyperplane actually crosses. An axis-range precheck settles
//! most cell/plane pairs without a feasibility solve; the rest go to the
//! exact rational LP. Dimension one short-circuits to sorted breakpoints.

use crate::affine::{
    difference_hyperplane, AffineFunction, AgreementSet, Hyperplane, Point,
    SolidBox,
};
use crate::expr::MinMaxExpr;
use crate::lp::{self, LpOutcome};
use crate::rat::{rat_max, rat_min, Rat};
use crate::{Error, Limits};
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

/// An open convex cell of an arrangement restricted to a box.
#[derive(Clone, Debug)]
pub struct Cell {
    /// Strict inequalities `g > 0` cutting the cell out of the open box
    /// interior (redundant arrangement constraints are omitted).
    pub constraints: Vec<AffineFunction>,
    /// A rational point strictly satisfying every constraint.
    pub witness: Point,
    /// One `+`/`-` per arrangement hyperplane, in arrangement order.
    pub sign_vector: String,
}

impl Cell {
    /// Whether `x` lies in the closed cell, decided from the sign vector
    /// against the full hyperplane list.
    pub fn closure_contains(
        &self,
        x: &Point,
        hyperplanes: &[Hyperplane],
        bx: &SolidBox,
    ) -> Result<bool, Error> {
        if !bx.contains(x)? {
            return Ok(false);
        }
        for (h, s) in hyperplanes.iter().zip(self.sign_vector.chars()) {
            let val = h.g.eval(x)?;
            match s {
                '+' if val.is_negative() => return Ok(false),
                '-' if val.is_positive() => return Ok(false),
                _ => {}
            }
        }
        Ok(true)
    }
}

/// One characteristic pair: an affine component together with the cells
/// whose closure union forms its region.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharacteristicPair {
    pub component: AffineFunction,
    pub region_cells: Vec<usize>,
}

/// Full cell decomposition of an expression on a box.
#[derive(Clone, Debug)]
pub struct CellComplex {
    pub bx: SolidBox,
    pub components: Vec<AffineFunction>,
    pub hyperplanes: Vec<Hyperplane>,
    pub cells: Vec<Cell>,
    /// Component index assigned to each cell.
    pub assignment: Vec<usize>,
}

/// Outcome of comparing a component against a cell's assigned component.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ComponentOrder {
    Below,
    Above,
    Equal,
}

/// Deduplicated affine members of an expression, in order of appearance.
/// A superset of the true components; the attained ones are determined by
/// cell assignment.
pub fn collect_components(e: &MinMaxExpr) -> Vec<AffineFunction> {
    let mut out: Vec<AffineFunction> = Vec::new();
    for clause in e.clauses() {
        for f in clause {
            if !out.contains(f) {
                out.push(f.clone());
            }
        }
    }
    out
}

/// Distinct agreement hyperplanes induced by pairwise component differences.
/// Parallel pairs (empty agreement sets) induce nothing. Hyperplanes equal as
/// sets are merged via their canonical direction.
pub fn induced_hyperplanes(components: &[AffineFunction]) -> Result<Vec<Hyperplane>, Error> {
    let mut planes: Vec<Hyperplane> = Vec::new();
    let mut keys: Vec<AffineFunction> = Vec::new();
    for i in 0..components.len() {
        for j in (i + 1)..components.len() {
            match difference_hyperplane(&components[i], &components[j])? {
                AgreementSet::Hyperplane(h) => {
                    let key = h.canonical();
                    if !keys.contains(&key) {
                        keys.push(key);
                        planes.push(h);
                    }
                }
                AgreementSet::Empty => {}
            }
        }
    }
    Ok(planes)
}

/// Exact interior point of `{x : g > 0 for all g}`, or `None` when the open
/// polyhedron is empty.
pub fn interior_witness(constraints: &[AffineFunction]) -> Result<Option<Point>, Error> {
    lp::interior_point(constraints)
}

fn range_over_intervals(f: &AffineFunction, intervals: &[(Rat, Rat)]) -> (Rat, Rat) {
    let mut lo = f.b.clone();
    let mut hi = f.b.clone();
    for (v, (a, b)) in f.v.iter().zip(intervals) {
        if v.is_zero() {
            continue;
        }
        let (x, y) = (v * a, v * b);
        if x <= y {
            lo += x;
            hi += y;
        } else {
            lo += y;
            hi += x;
        }
    }
    (lo, hi)
}

struct BuildCell {
    constraints: Vec<AffineFunction>,
    witness: Point,
    signs: String,
    /// Outer axis-aligned bounds; exact for axis constraints, a relaxation
    /// otherwise.
    outer: Vec<(Rat, Rat)>,
}

fn tighten_outer(outer: &mut [(Rat, Rat)], g: &AffineFunction) {
    // Only axis-aligned constraints tighten bounds exactly.
    let mut nz = None;
    for (i, v) in g.v.iter().enumerate() {
        if !v.is_zero() {
            if nz.is_some() {
                return;
            }
            nz = Some(i);
        }
    }
    let Some(i) = nz else { return };
    let root = -&g.b / &g.v[i];
    if g.v[i].is_positive() {
        if root > outer[i].0 {
            outer[i].0 = root;
        }
    } else if root < outer[i].1 {
        outer[i].1 = root;
    }
}

/// Enumerate the open cells cut out of the box interior by the agreement
/// hyperplanes of `components`.
pub fn enumerate_cells(
    components: &[AffineFunction],
    bx: &SolidBox,
) -> Result<Vec<Cell>, Error> {
    enumerate_cells_with(components, bx, &Limits::default())
}

pub fn enumerate_cells_with(
    components: &[AffineFunction],
    bx: &SolidBox,
    limits: &Limits,
) -> Result<Vec<Cell>, Error> {
    let planes = induced_hyperplanes(components)?;
    cells_of_arrangement(&planes, bx, limits)
}

/// Cells of an explicit hyperplane arrangement within a box.
pub fn cells_of_arrangement(
    planes: &[Hyperplane],
    bx: &SolidBox,
    limits: &Limits,
) -> Result<Vec<Cell>, Error> {
    if planes.len() > limits.max_hyperplanes {
        return Err(Error::TooManyHyperplanes {
            count: planes.len(),
            limit: limits.max_hyperplanes,
        });
    }
    let m = bx.dim();
    if m == 1 {
        return cells_on_interval(planes, bx);
    }

    let initial = BuildCell {
        constraints: bx.interior_constraints(),
        witness: bx.center.clone(),
        signs: String::new(),
        outer: (0..m).map(|i| (bx.lo(i), bx.hi(i))).collect(),
    };
    let mut cells = vec![initial];
    for h in planes {
        let g = &h.g;
        let mut next: Vec<BuildCell> = Vec::with_capacity(cells.len() + 4);
        for cell in cells {
            let (lo, hi) = range_over_intervals(g, &cell.outer);
            if lo >= Rat::zero() {
                // g > 0 on the whole open cell; no split, no new constraint.
                let mut c = cell;
                c.signs.push('+');
                next.push(c);
                continue;
            }
            if hi <= Rat::zero() {
                let mut c = cell;
                c.signs.push('-');
                next.push(c);
                continue;
            }
            let gw = g.eval(&cell.witness)?;
            for sign in ['+', '-'] {
                let side = if sign == '+' { g.clone() } else { g.negated() };
                let witness_on_side = if sign == '+' {
                    gw.is_positive()
                } else {
                    gw.is_negative()
                };
                let mut constraints = cell.constraints.clone();
                constraints.push(side.clone());
                let witness = if witness_on_side {
                    Some(cell.witness.clone())
                } else {
                    interior_witness(&constraints)?
                };
                if let Some(witness) = witness {
                    let mut signs = cell.signs.clone();
                    signs.push(sign);
                    let mut outer = cell.outer.clone();
                    tighten_outer(&mut outer, &side);
                    next.push(BuildCell {
                        constraints,
                        witness,
                        signs,
                        outer,
                    });
                }
            }
        }
        cells = next;
    }
    Ok(cells
        .into_iter()
        .map(|c| Cell {
            constraints: c.constraints,
            witness: c.witness,
            sign_vector: c.signs,
        })
        .collect())
}

/// Dimension-one arrangement: sorted breakpoints inside the interval.
fn cells_on_interval(planes: &[Hyperplane], bx: &SolidBox) -> Result<Vec<Cell>, Error> {
    let lo = bx.lo(0);
    let hi = bx.hi(0);
    let mut roots: Vec<Rat> = Vec::new();
    for h in planes {
        let root = -&h.g.b / &h.g.v[0];
        if root > lo && root < hi && !roots.contains(&root) {
            roots.push(root);
        }
    }
    roots.sort();
    let mut bounds = vec![lo.clone()];
    bounds.extend(roots);
    bounds.push(hi.clone());
    let two = Rat::from_integer(2.into());
    let mut cells = Vec::with_capacity(bounds.len() - 1);
    for w in bounds.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        let witness = Point::new(vec![(a + b) / &two]);
        let mut constraints = bx.interior_constraints();
        if a > &lo {
            constraints.push(AffineFunction::new(vec![Rat::one()], -a.clone()));
        }
        if b < &hi {
            constraints.push(AffineFunction::new(vec![-Rat::one()], b.clone()));
        }
        let mut signs = String::with_capacity(planes.len());
        for h in planes {
            let val = h.g.eval(&witness)?;
            debug_assert!(!val.is_zero());
            signs.push(if val.is_positive() { '+' } else { '-' });
        }
        cells.push(Cell {
            constraints,
            witness,
            sign_vector: signs,
        });
    }
    Ok(cells)
}

/// For each cell, the unique component the expression agrees with on it,
/// decided at the witness.
pub fn assign_components(e: &MinMaxExpr, cells: &[Cell]) -> Result<Vec<usize>, Error> {
    let components = collect_components(e);
    assign_against(e, &components, cells)
}

fn assign_against(
    e: &MinMaxExpr,
    components: &[AffineFunction],
    cells: &[Cell],
) -> Result<Vec<usize>, Error> {
    let mut out = Vec::with_capacity(cells.len());
    for cell in cells {
        let value = e.eval(&cell.witness)?;
        let mut found: Option<usize> = None;
        for (i, f) in components.iter().enumerate() {
            if f.eval(&cell.witness)? == value {
                if found.is_some() {
                    return Err(Error::InternalInconsistency(
                        "two components agree at a cell witness".into(),
                    ));
                }
                found = Some(i);
            }
        }
        match found {
            Some(i) => out.push(i),
            None => {
                return Err(Error::InternalInconsistency(
                    "no component matches the expression at a cell witness".into(),
                ))
            }
        }
    }
    Ok(out)
}

impl CellComplex {
    /// Decompose an expression on a box: components, hyperplanes, cells, and
    /// the per-cell component assignment.
    pub fn build(e: &MinMaxExpr, bx: &SolidBox) -> Result<CellComplex, Error> {
        Self::build_with(e, bx, &Limits::default())
    }

    pub fn build_with(e: &MinMaxExpr, bx: &SolidBox, limits: &Limits) -> Result<CellComplex, Error> {
        if bx.dim() != e.dim() {
            return Err(Error::DimensionMismatch {
                expected: e.dim(),
                got: bx.dim(),
            });
        }
        let components = collect_components(e);
        let hyperplanes = induced_hyperplanes(&components)?;
        let cells = cells_of_arrangement(&hyperplanes, bx, limits)?;
        let assignment = assign_against(e, &components, &cells)?;
        Ok(CellComplex {
            bx: bx.clone(),
            components,
            hyperplanes,
            cells,
            assignment,
        })
    }

    /// Characteristic pairs: cells grouped by assigned component, components
    /// attained on no cell dropped. Order follows the component list.
    pub fn pairs(&self) -> Vec<CharacteristicPair> {
        let mut out = Vec::new();
        for (ci, component) in self.components.iter().enumerate() {
            let region_cells: Vec<usize> = self
                .assignment
                .iter()
                .enumerate()
                .filter_map(|(cell, &a)| (a == ci).then_some(cell))
                .collect();
            if !region_cells.is_empty() {
                out.push(CharacteristicPair {
                    component: component.clone(),
                    region_cells,
                });
            }
        }
        out
    }
}

/// Characteristic pairs of `e` on a box.
pub fn characteristic_pairs(
    e: &MinMaxExpr,
    bx: &SolidBox,
) -> Result<Vec<CharacteristicPair>, Error> {
    Ok(CellComplex::build(e, bx)?.pairs())
}

pub fn characteristic_pairs_with(
    e: &MinMaxExpr,
    bx: &SolidBox,
    limits: &Limits,
) -> Result<Vec<CharacteristicPair>, Error> {
    Ok(CellComplex::build_with(e, bx, limits)?.pairs())
}

/// Compare a collected component against the cell's assigned component over
/// the open cell. The sign is constant on the cell, so the witness decides.
pub fn strict_order_on_cell(
    e: &MinMaxExpr,
    cell: &Cell,
    g: &AffineFunction,
) -> Result<ComponentOrder, Error> {
    let components = collect_components(e);
    if !components.contains(g) {
        return Err(Error::NotAComponent);
    }
    let value = e.eval(&cell.witness)?;
    let gv = g.eval(&cell.witness)?;
    if gv == value {
        Ok(ComponentOrder::Equal)
    } else if gv > value {
        Ok(ComponentOrder::Above)
    } else {
        Ok(ComponentOrder::Below)
    }
}

/// Exact `(min, max)` of an expression over a closed box, via per-cell LP
/// over cell closures.
pub fn bound_on_box(e: &MinMaxExpr, bx: &SolidBox) -> Result<(Rat, Rat), Error> {
    bound_on_box_with(e, bx, &Limits::default())
}

pub fn bound_on_box_with(
    e: &MinMaxExpr,
    bx: &SolidBox,
    limits: &Limits,
) -> Result<(Rat, Rat), Error> {
    let complex = CellComplex::build_with(e, bx, limits)?;
    let mut lo: Option<Rat> = None;
    let mut hi: Option<Rat> = None;
    for (cell, &ci) in complex.cells.iter().zip(&complex.assignment) {
        let f = &complex.components[ci];
        let (cmin, cmax) = optimize_over_closure(f, cell)?;
        lo = Some(match lo {
            Some(cur) => rat_min(cur, cmin),
            None => cmin,
        });
        hi = Some(match hi {
            Some(cur) => rat_max(cur, cmax),
            None => cmax,
        });
    }
    match (lo, hi) {
        (Some(lo), Some(hi)) => Ok((lo, hi)),
        _ => Err(Error::InternalInconsistency(
            "box decomposition produced no cells".into(),
        )),
    }
}

fn optimize_over_closure(f: &AffineFunction, cell: &Cell) -> Result<(Rat, Rat), Error> {
    let cmin = match lp::optimize_affine(f, &cell.constraints, false)? {
        LpOutcome::Optimal { value, .. } => value,
        _ => {
            return Err(Error::InternalInconsistency(
                "cell closure optimization must be bounded and feasible".into(),
            ))
        }
    };
    let cmax = match lp::optimize_affine(f, &cell.constraints, true)? {
        LpOutcome::Optimal { value, .. } => value,
        _ => {
            return Err(Error::InternalInconsistency(
                "cell closure optimization must be bounded and feasible".into(),
            ))
        }
    };
    Ok((cmin, cmax))
}

/// Rebuild a min-max expression from a cell complex: `max` over cells of
/// `min` over the components lying above the cell's assigned component on
/// that cell. The result agrees with the decomposed function on the box and
/// is defined on all of R^m.
///
/// Membership of `f_j` in a cell's clause is decided at the witness; the
/// sign of `f_j - f_i` is constant on a cell, so the witness comparison
/// equals the closure comparison.
pub fn max_min_from_pairs(complex: &CellComplex) -> Result<MinMaxExpr, Error> {
    let mut clauses: Vec<Vec<AffineFunction>> = Vec::with_capacity(complex.cells.len());
    for (cell, &ci) in complex.cells.iter().zip(&complex.assignment) {
        let fi = &complex.components[ci];
        let fiw = fi.eval(&cell.witness)?;
        let mut clause = Vec::new();
        for f in &complex.components {
            if f.eval(&cell.witness)? >= fiw {
                clause.push(f.clone());
            }
        }
        if clause.is_empty() {
            return Err(Error::InternalInconsistency(
                "a cell's dominating set must contain its own component".into(),
            ));
        }
        clauses.push(clause);
    }
    MinMaxExpr::new(complex.bx.dim(), clauses)
}

/// Cells of the joint arrangement of two expressions, with both per-cell
/// component assignments.
pub(crate) struct JointCells {
    pub cells: Vec<Cell>,
    pub comps1: Vec<AffineFunction>,
    pub comps2: Vec<AffineFunction>,
    pub assign1: Vec<usize>,
    pub assign2: Vec<usize>,
}

pub(crate) fn joint_cells(
    e1: &MinMaxExpr,
    e2: &MinMaxExpr,
    bx: &SolidBox,
    limits: &Limits,
) -> Result<JointCells, Error> {
    if e1.dim() != e2.dim() {
        return Err(Error::DimensionMismatch {
            expected: e1.dim(),
            got: e2.dim(),
        });
    }
    if bx.dim() != e1.dim() {
        return Err(Error::DimensionMismatch {
            expected: e1.dim(),
            got: bx.dim(),
        });
    }
    let comps1 = collect_components(e1);
    let comps2 = collect_components(e2);
    // Pairwise agreement hyperplanes within each expression pin down the
    // active component of both; cross pairs are not needed.
    let mut planes = induced_hyperplanes(&comps1)?;
    let mut keys: Vec<AffineFunction> = planes.iter().map(|h| h.canonical()).collect();
    for h in induced_hyperplanes(&comps2)? {
        let key = h.canonical();
        if !keys.contains(&key) {
            keys.push(key);
            planes.push(h);
        }
    }
    let cells = cells_of_arrangement(&planes, bx, limits)?;
    let assign1 = assign_against(e1, &comps1, &cells)?;
    let assign2 = assign_against(e2, &comps2, &cells)?;
    Ok(JointCells {
        cells,
        comps1,
        comps2,
        assign1,
        assign2,
    })
}

/// Exact pointwise equality of two expressions on a box: on every joint cell
/// the assigned components must coincide.
pub(crate) fn exprs_agree_on_box(
    e1: &MinMaxExpr,
    e2: &MinMaxExpr,
    bx: &SolidBox,
    limits: &Limits,
) -> Result<bool, Error> {
    let joint = joint_cells(e1, e2, bx, limits)?;
    for (a, b) in joint.assign1.iter().zip(&joint.assign2) {
        if joint.comps1[*a] != joint.comps2[*b] {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Exact `(min, max)` of `e1 - e2` over a closed box, without materializing
/// the difference expression: on each joint cell the difference is affine.
pub fn difference_bound(
    e1: &MinMaxExpr,
    e2: &MinMaxExpr,
    bx: &SolidBox,
) -> Result<(Rat, Rat), Error> {
    difference_bound_with(e1, e2, bx, &Limits::default())
}

pub fn difference_bound_with(
    e1: &MinMaxExpr,
    e2: &MinMaxExpr,
    bx: &SolidBox,
    limits: &Limits,
) -> Result<(Rat, Rat), Error> {
    let joint = joint_cells(e1, e2, bx, limits)?;
    let mut lo: Option<Rat> = None;
    let mut hi: Option<Rat> = None;
    for ((cell, &a), &b) in joint.cells.iter().zip(&joint.assign1).zip(&joint.assign2) {
        let d = joint.comps1[a].sub(&joint.comps2[b])?;
        let (cmin, cmax) = optimize_over_closure(&d, cell)?;
        lo = Some(match lo {
            Some(cur) => rat_min(cur, cmin),
            None => cmin,
        });
        hi = Some(match hi {
            Some(cur) => rat_max(cur, cmax),
            None => cmax,
        });
    }
    match (lo, hi) {
        (Some(lo), Some(hi)) => Ok((lo, hi)),
        _ => Err(Error::InternalInconsistency(
            "joint decomposition produced no cells".into(),
        )),
    }
}

/// Serialization schema for complexes:
/// `{"box": ..., "components": [...], "cells": [{"witness": [...],
///   "signs": "+-", "component": i}, ...]}`.
#[derive(Serialize, Deserialize)]
pub struct CellComplexDocument {
    #[serde(rename = "box")]
    pub bx: SolidBox,
    pub components: Vec<AffineFunction>,
    pub cells: Vec<CellDocument>,
}

#[derive(Serialize, Deserialize)]
pub struct CellDocument {
    pub witness: Point,
    pub signs: String,
    pub component: usize,
}

impl CellComplex {
    pub fn to_document(&self) -> CellComplexDocument {
        CellComplexDocument {
            bx: self.bx.clone(),
            components: self.components.clone(),
            cells: self
                .cells
                .iter()
                .zip(&self.assignment)
                .map(|(c, &a)| CellDocument {
                    witness: c.witness.clone(),
                    signs: c.sign_vector.clone(),
                    component: a,
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{int, rat};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn t() -> AffineFunction {
        AffineFunction::new(vec![int(1)], int(0))
    }

    fn neg_t() -> AffineFunction {
        AffineFunction::new(vec![int(-1)], int(0))
    }

    fn one() -> AffineFunction {
        AffineFunction::constant(1, int(1))
    }

    fn example_one() -> MinMaxExpr {
        MinMaxExpr::new(1, vec![vec![t(), one()], vec![neg_t(), one()]]).unwrap()
    }

    fn abs_expr() -> MinMaxExpr {
        MinMaxExpr::new(1, vec![vec![t()], vec![neg_t()]]).unwrap()
    }

    fn witness_value(c: &Cell) -> Rat {
        c.witness.coords[0].clone()
    }

    #[test]
    fn example_one_cells_on_omega2() {
        let comps = collect_components(&example_one());
        assert_eq!(comps, vec![t(), one(), neg_t()]);
        let cells = enumerate_cells(&comps, &SolidBox::omega(1, 2)).unwrap();
        assert_eq!(cells.len(), 4);
        let mut ws: Vec<Rat> = cells.iter().map(witness_value).collect();
        ws.sort();
        let intervals = [
            (int(-2), int(-1)),
            (int(-1), int(0)),
            (int(0), int(1)),
            (int(1), int(2)),
        ];
        for (w, (a, b)) in ws.iter().zip(&intervals) {
            assert!(w > a && w < b, "witness {w} outside ({a}, {b})");
        }
        // distinct sign vectors
        let mut signs: Vec<&str> = cells.iter().map(|c| c.sign_vector.as_str()).collect();
        signs.sort();
        signs.dedup();
        assert_eq!(signs.len(), 4);
    }

    #[test]
    fn single_component_gives_one_cell() {
        let cells = enumerate_cells(&[t()], &SolidBox::omega(1, 3)).unwrap();
        assert_eq!(cells.len(), 1);
        assert!(cells[0].sign_vector.is_empty());
    }

    #[test]
    fn two_plane_split_in_dim_two() {
        // components x1 and x2 on Omega_1: one hyperplane {x1 = x2}, 2 cells
        let x1 = AffineFunction::new(vec![int(1), int(0)], int(0));
        let x2 = AffineFunction::new(vec![int(0), int(1)], int(0));
        let cells = enumerate_cells(&[x1.clone(), x2.clone()], &SolidBox::omega(2, 1)).unwrap();
        assert_eq!(cells.len(), 2);
        for cell in &cells {
            let d = x1.sub(&x2).unwrap().eval(&cell.witness).unwrap();
            assert!(!d.is_zero());
            // the witness strictly satisfies every recorded constraint
            for g in &cell.constraints {
                assert!(g.eval(&cell.witness).unwrap().is_positive());
            }
        }
        let d0 = x1.sub(&x2).unwrap().eval(&cells[0].witness).unwrap();
        let d1 = x1.sub(&x2).unwrap().eval(&cells[1].witness).unwrap();
        assert!(d0.is_positive() != d1.is_positive());
    }

    #[test]
    fn interior_witness_wrapper() {
        let w = interior_witness(&[t(), AffineFunction::new(vec![int(-1)], int(1))])
            .unwrap()
            .unwrap();
        assert!(w.coords[0] > int(0) && w.coords[0] < int(1));
        assert!(interior_witness(&[t(), neg_t()]).unwrap().is_none());
    }

    #[test]
    fn assignment_on_example_one() {
        let e = example_one();
        let complex = CellComplex::build(&e, &SolidBox::omega(1, 2)).unwrap();
        for (cell, &a) in complex.cells.iter().zip(&complex.assignment) {
            let w = witness_value(cell);
            let expected = if w > int(0) && w < int(1) {
                t()
            } else if w > int(-1) && w < int(0) {
                neg_t()
            } else {
                one()
            };
            assert_eq!(complex.components[a], expected, "witness {w}");
        }
    }

    #[test]
    fn pairs_on_example_one() {
        let e = example_one();
        let complex = CellComplex::build(&e, &SolidBox::omega(1, 2)).unwrap();
        let pairs = complex.pairs();
        assert_eq!(pairs.len(), 3);
        for pair in &pairs {
            let expected_cells = if pair.component == one() { 2 } else { 1 };
            assert_eq!(
                pair.region_cells.len(),
                expected_cells,
                "component {}",
                pair.component
            );
        }
    }

    #[test]
    fn pairs_of_single_affine() {
        let e = MinMaxExpr::from_affine(t());
        let pairs = characteristic_pairs(&e, &SolidBox::omega(1, 5)).unwrap();
        assert_eq!(pairs.len(), 1);
        assert_eq!(pairs[0].component, t());
        assert_eq!(pairs[0].region_cells, vec![0]);
    }

    #[test]
    fn pairs_of_abs_on_omega1() {
        let pairs = characteristic_pairs(&abs_expr(), &SolidBox::omega(1, 1)).unwrap();
        assert_eq!(pairs.len(), 2);
        let comps: Vec<&AffineFunction> = pairs.iter().map(|p| &p.component).collect();
        assert!(comps.contains(&&t()) && comps.contains(&&neg_t()));
    }

    #[test]
    fn unattained_member_dropped_from_pairs() {
        // [[t, t+1]]: t+1 never attains the min
        let e = MinMaxExpr::new(
            1,
            vec![vec![t(), AffineFunction::new(vec![int(1)], int(1))]],
        )
        .unwrap();
        let pairs = characteristic_pairs(&e, &SolidBox::omega(1, 2)).unwrap();
        assert_eq!(pairs.len(), 1);
        assert_eq!(pairs[0].component, t());
    }

    #[test]
    fn strict_order_examples() {
        let e = example_one();
        let complex = CellComplex::build(&e, &SolidBox::omega(1, 2)).unwrap();
        let find_cell = |lo: i64, hi: i64| {
            complex
                .cells
                .iter()
                .find(|c| {
                    let w = witness_value(c);
                    w > int(lo) && w < int(hi)
                })
                .unwrap()
        };
        assert_eq!(
            strict_order_on_cell(&e, find_cell(0, 1), &one()).unwrap(),
            ComponentOrder::Above
        );
        assert_eq!(
            strict_order_on_cell(&e, find_cell(1, 2), &t()).unwrap(),
            ComponentOrder::Above
        );
        assert_eq!(
            strict_order_on_cell(&e, find_cell(0, 1), &t()).unwrap(),
            ComponentOrder::Equal
        );
        assert_eq!(
            strict_order_on_cell(&e, find_cell(0, 1), &neg_t()).unwrap(),
            ComponentOrder::Below
        );
        let not_comp = AffineFunction::new(vec![int(7)], int(7));
        assert!(matches!(
            strict_order_on_cell(&e, find_cell(0, 1), &not_comp),
            Err(Error::NotAComponent)
        ));
    }

    #[test]
    fn bounds_on_boxes() {
        assert_eq!(
            bound_on_box(&example_one(), &SolidBox::omega(1, 2)).unwrap(),
            (int(0), int(1))
        );
        let c5 = MinMaxExpr::constant(1, int(5));
        assert_eq!(
            bound_on_box(&c5, &SolidBox::omega(1, 7)).unwrap(),
            (int(5), int(5))
        );
        assert_eq!(
            bound_on_box(&abs_expr(), &SolidBox::omega(1, 3)).unwrap(),
            (int(0), int(3))
        );
    }

    #[test]
    fn max_min_reconstruction_example_one() {
        let e = example_one();
        let complex = CellComplex::build(&e, &SolidBox::omega(1, 2)).unwrap();
        let rebuilt = max_min_from_pairs(&complex).unwrap();
        // J sets collapse to two distinct clauses: {t, 1} and {-t, 1}
        assert_eq!(rebuilt.clauses().len(), 2);
        let at = |x: Rat| rebuilt.eval(&Point::new(vec![x])).unwrap();
        assert_eq!(at(rat(1, 2)), rat(1, 2));
        assert_eq!(at(int(2)), int(1));
        assert_eq!(at(int(-2)), int(1));
        // global extension: far outside the analysis box it still matches
        assert_eq!(at(int(100)), int(1));
    }

    #[test]
    fn max_min_reconstruction_single_affine() {
        let e = MinMaxExpr::from_affine(t());
        let complex = CellComplex::build(&e, &SolidBox::omega(1, 1)).unwrap();
        let rebuilt = max_min_from_pairs(&complex).unwrap();
        assert_eq!(rebuilt.clauses().len(), 1);
        assert_eq!(rebuilt.clauses()[0], vec![t()]);
    }

    #[test]
    fn max_min_reconstruction_abs() {
        let complex = CellComplex::build(&abs_expr(), &SolidBox::omega(1, 1)).unwrap();
        let rebuilt = max_min_from_pairs(&complex).unwrap();
        assert_eq!(rebuilt.clauses().len(), 2);
        for x in [int(-5), rat(-1, 2), int(0), rat(1, 3), int(7)] {
            let p = Point::new(vec![x.clone()]);
            assert_eq!(
                rebuilt.eval(&p).unwrap(),
                abs_expr().eval(&p).unwrap(),
                "at {x}"
            );
        }
    }

    #[test]
    fn semantic_equality_examples() {
        let bx2 = SolidBox::omega(1, 2);
        let bx1 = SolidBox::omega(1, 1);
        let abs = abs_expr();
        let redundant = MinMaxExpr::new(1, vec![vec![t(), t()], vec![neg_t(), neg_t()]]).unwrap();
        assert!(crate::expr::semantic_equal(&abs, &redundant, &bx2).unwrap());
        let e1 = example_one();
        assert!(!crate::expr::semantic_equal(&e1, &abs, &bx2).unwrap());
        assert!(crate::expr::semantic_equal(&e1, &abs, &bx1).unwrap());
    }

    #[test]
    fn difference_bound_abs_minus_t() {
        // |t| - t on [-1, 1]: min 0, max 2
        let e1 = abs_expr();
        let e2 = MinMaxExpr::from_affine(t());
        assert_eq!(
            difference_bound(&e1, &e2, &SolidBox::omega(1, 1)).unwrap(),
            (int(0), int(2))
        );
    }

    #[test]
    fn partition_and_disjointness_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let m = rng.gen_range(1..=3);
            let e = crate::expr::tests::random_expr(&mut rng, m);
            let bx = SolidBox::omega(m, 2);
            let complex = match CellComplex::build(&e, &bx) {
                Ok(c) => c,
                Err(Error::TooManyHyperplanes { .. }) => continue,
                Err(e) => panic!("{e}"),
            };
            // coverage: every sampled point lies in some cell closure
            for _ in 0..100 {
                let x = Point::new(
                    (0..m)
                        .map(|_| rat(rng.gen_range(-16..=16), 8))
                        .collect(),
                );
                let hit = complex
                    .cells
                    .iter()
                    .any(|c| c.closure_contains(&x, &complex.hyperplanes, &bx).unwrap());
                assert!(hit, "{x} not covered");
            }
            // disjointness: sign vectors pairwise distinct
            for i in 0..complex.cells.len() {
                for j in (i + 1)..complex.cells.len() {
                    assert_ne!(complex.cells[i].sign_vector, complex.cells[j].sign_vector);
                }
            }
            // witnesses strictly satisfy their constraints
            for cell in &complex.cells {
                for g in &cell.constraints {
                    assert!(g.eval(&cell.witness).unwrap().is_positive());
                }
            }
        }
    }

    #[test]
    fn round_trip_random_small() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let mut done = 0;
        while done < 10 {
            let m = rng.gen_range(1..=2);
            let e = crate::expr::tests::random_expr(&mut rng, m);
            let bx = SolidBox::omega(m, 2);
            let complex = match CellComplex::build(&e, &bx) {
                Ok(c) => c,
                Err(Error::TooManyHyperplanes { .. }) => continue,
                Err(e) => panic!("{e}"),
            };
            let rebuilt = max_min_from_pairs(&complex).unwrap();
            assert!(crate::expr::semantic_equal(&e, &rebuilt, &bx).unwrap());
            done += 1;
        }
    }

    #[test]
    fn too_many_hyperplanes_guard() {
        // gradients (k, k^2) give pairwise differences in distinct directions
        let comps: Vec<AffineFunction> = (0..20)
            .map(|k| AffineFunction::new(vec![int(k), int(k * k)], int(0)))
            .collect();
        let limits = Limits::default().with_max_hyperplanes(10);
        assert!(matches!(
            enumerate_cells_with(&comps, &SolidBox::omega(2, 1), &limits),
            Err(Error::TooManyHyperplanes { .. })
        ));
    }
}
