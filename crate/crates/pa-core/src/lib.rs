//! Exact engine for piecewise affine (PA) and locally piecewise affine (LPA)
//! functions on R^m.
//!
//! Everything runs on arbitrary-precision rationals: min-max normal forms and
//! their lattice algebra ([`expr`]), hyperplane-arrangement cell complexes and
//! characteristic pairs ([`cells`]), bump functions and locally finite
//! families ([`lpa`]), and certified approximation of continuous functions by
//! PA/LPA functions ([`approx`]). Floating point appears nowhere; decimal
//! output exists only for plotting.

pub mod affine;
pub mod approx;
pub mod cells;
pub mod expr;
pub mod lp;
pub mod lpa;
pub mod rat;

pub use affine::{difference_hyperplane, AffineFunction, AgreementSet, Hyperplane, Point, SolidBox};
pub use approx::{
    kuhn_interpolant, monotone_under_approx, order_approx, uniform_approx, ApproxReport,
    ContinuousOracle, UniformApproximant,
};
pub use cells::{
    assign_components, bound_on_box, characteristic_pairs, collect_components, difference_bound,
    enumerate_cells, interior_witness, max_min_from_pairs, strict_order_on_cell, Cell,
    CellComplex, CharacteristicPair, ComponentOrder,
};
pub use expr::{semantic_equal, MinMaxExpr};
pub use lpa::{
    bump, inf_family, lpa_characteristic_pairs, restrict_to_box, sup_family, tile_decompose,
    verify_locally_finite, BoxedPa, CombineMode, LocallyFiniteFamily, LpaFunction,
    NonnegCertificate,
};
pub use rat::Rat;

use once_cell::sync::Lazy;

/// Everything that can go wrong in the engine.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("identical components have no separating hyperplane")]
    IdenticalComponents,
    #[error("expression too large: {clauses} clauses exceeds budget {budget}")]
    ExpressionTooLarge { clauses: u128, budget: u128 },
    #[error("too many hyperplanes: {count} exceeds limit {limit}")]
    TooManyHyperplanes { count: usize, limit: usize },
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
    #[error("function is not a collected component of the expression")]
    NotAComponent,
    #[error("bump radii invalid: inner must be positive and less than outer")]
    BadRadii,
    #[error("function failed the nonnegativity certificate")]
    NotNonnegative,
    #[error("grid too large: {vertices} vertices exceeds budget {budget}")]
    GridTooLarge { vertices: u128, budget: u128 },
    #[error("step does not divide the box edge length")]
    BadStep,
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Stable machine-readable kind, used by the CLI's structured errors.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::IdenticalComponents => "identical_components",
            Error::ExpressionTooLarge { .. } => "expression_too_large",
            Error::TooManyHyperplanes { .. } => "too_many_hyperplanes",
            Error::InternalInconsistency(_) => "internal_inconsistency",
            Error::NotAComponent => "not_a_component",
            Error::BadRadii => "bad_radii",
            Error::NotNonnegative => "not_nonnegative",
            Error::GridTooLarge { .. } => "grid_too_large",
            Error::BadStep => "bad_step",
            Error::Parse(_) => "parse_error",
        }
    }
}

/// Resource limits for expression expansion, cell enumeration, and grids.
///
/// The process-wide defaults honor the `PA_CLAUSE_BUDGET` and
/// `PA_GRID_BUDGET` environment variables; the hyperplane limit defaults
/// to 64 and is raised per call site where an analysis legitimately needs a
/// finer arrangement.
#[derive(Clone, Debug)]
pub struct Limits {
    /// Max clause count produced by a distributive expansion, pre-pruning.
    pub clause_budget: u128,
    /// Max grid vertex count for interpolation.
    pub grid_budget: u128,
    /// Max induced hyperplane count in a cell enumeration.
    pub max_hyperplanes: usize,
}

impl Limits {
    pub fn with_max_hyperplanes(mut self, limit: usize) -> Self {
        self.max_hyperplanes = limit;
        self
    }
}

impl Default for Limits {
    fn default() -> Self {
        DEFAULT_LIMITS.clone()
    }
}

static DEFAULT_LIMITS: Lazy<Limits> = Lazy::new(|| {
    let env_u128 = |name: &str, default: u128| {
        std::env::var(name)
            .ok()
            .and_then(|s| s.parse::<u128>().ok())
            .unwrap_or(default)
    };
    Limits {
        clause_budget: env_u128("PA_CLAUSE_BUDGET", 1_000_000),
        grid_budget: env_u128("PA_GRID_BUDGET", 1_000_000),
        max_hyperplanes: 64,
    }
});
