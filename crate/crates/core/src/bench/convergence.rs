use rayon::prelude::*;
use serde::{Serialize, Serializer};

use super::{error_norms, ErrorNorms, Problem};
use crate::assembly::{apply_dirichlet, assemble, element_divergence_integrals, BoundaryData};
use crate::mesh::{corner_elements, generate_into_corners, generate_structured, Mesh, Pattern};
use crate::solver::{normalize_pressure, solve, Solution, SolveReport};
use crate::spaces::{build_dof_map, DofMap, PressureSpaceKind};
use crate::{Error, Result};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "STOKESLC_THREADS";

/// One benchmark configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CaseSpec {
    pub grid: usize,
    pub kind: PressureSpaceKind,
    pub pattern: Pattern,
    pub problem: Problem,
    pub nu: f64,
    /// Use the plain diagonal pattern even if it leaves elements with two
    /// boundary sides.
    pub allow_corners: bool,
}

impl CaseSpec {
    pub fn new(grid: usize, kind: PressureSpaceKind) -> CaseSpec {
        CaseSpec { grid, kind, pattern: Pattern::Right, problem: Problem::Griffiths, nu: 1.0, allow_corners: false }
    }
}

/// The unit-square mesh for a case. Without `allow_corners` the corner
/// cells are split through the domain corners; with it, plain LC on a mesh
/// with corner elements is refused because its pressure system is singular.
pub fn case_mesh(grid: usize, pattern: Pattern, kind: PressureSpaceKind, allow_corners: bool) -> Result<Mesh> {
    if !allow_corners {
        return generate_into_corners(grid, pattern);
    }
    let mesh = generate_structured(grid, pattern)?;
    let corners = corner_elements(&mesh)?;
    if kind == PressureSpaceKind::Lc && !corners.is_empty() {
        return Err(Error::UnsupportedGrid(format!(
            "{} elements have two boundary sides; with one constant each the LC continuity rows there are \
             linearly dependent and the pressure is not determined (use lctied or drop --allow-corners)",
            corners.len()
        )));
    }
    Ok(mesh)
}

/// A solved and measured case.
#[derive(Debug, Clone)]
pub struct CaseResult {
    pub spec: CaseSpec,
    pub mesh: Mesh,
    pub dofmap: DofMap,
    /// Solution with zero-mean pressure.
    pub solution: Solution,
    pub errors: ErrorNorms,
    /// Largest `|int_E div u|` over the elements.
    pub max_element_divergence: f64,
}

/// Solves the enclosed-flow problem on a given mesh with the exact velocity
/// as boundary data.
pub fn solve_problem(
    mesh: &Mesh,
    kind: PressureSpaceKind,
    problem: Problem,
    nu: f64,
) -> Result<(DofMap, Solution)> {
    let dofmap = build_dof_map(mesh, kind, true)?;
    let system = assemble(mesh, &dofmap, kind, nu, |x| problem.body_force(x, nu))?;
    let bc = BoundaryData::from_field(mesh, &dofmap, |x| problem.exact(x).v);
    let reduced = apply_dirichlet(&system, &dofmap, &bc)?;
    let solution = normalize_pressure(solve(&reduced)?, mesh);
    Ok((dofmap, solution))
}

pub fn run_case(spec: CaseSpec) -> Result<CaseResult> {
    let mesh = case_mesh(spec.grid, spec.pattern, spec.kind, spec.allow_corners)?;
    let (dofmap, solution) = solve_problem(&mesh, spec.kind, spec.problem, spec.nu)?;
    let errors = error_norms(&mesh, &solution, spec.problem);
    let max_element_divergence =
        element_divergence_integrals(&mesh, &solution.u).iter().fold(0.0, |m: f64, v| m.max(v.abs()));
    Ok(CaseResult { spec, mesh, dofmap, solution, errors, max_element_divergence })
}

/// Observed order between two grids, or `Exact` when the finer error is zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Order {
    Value(f64),
    Exact,
}

impl Order {
    pub fn value(self) -> Option<f64> {
        match self {
            Order::Value(v) => Some(v),
            Order::Exact => None,
        }
    }
}

impl Serialize for Order {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Order::Value(v) => s.serialize_f64(*v),
            Order::Exact => s.serialize_str("exact"),
        }
    }
}

impl std::fmt::Display for Order {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Order::Value(v) => write!(f, "{v:.4}"),
            Order::Exact => f.write_str("exact"),
        }
    }
}

/// `log(e_coarse / e_fine) / log(n_fine / n_coarse)`.
pub fn estimate_order(e_coarse: f64, e_fine: f64, n_coarse: usize, n_fine: usize) -> Order {
    if e_fine == 0.0 {
        return Order::Exact;
    }
    Order::Value((e_coarse / e_fine).ln() / (n_fine as f64 / n_coarse as f64).ln())
}

#[derive(Debug, Clone, Serialize)]
pub struct ErrorRow {
    pub grid: usize,
    pub element: String,
    #[serde(flatten)]
    pub errors: ErrorNorms,
    pub max_element_divergence: f64,
    pub solve: SolveReport,
    /// Relative deviation from the reference errors, when available.
    pub reference_deviation: Option<ErrorDeviation>,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ErrorDeviation {
    #[serde(rename = "p_l2_modR")]
    pub p_l2_mod_r: f64,
    pub v_h1: f64,
    pub v_l2: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct OrderRow {
    pub element: String,
    pub coarse: usize,
    pub fine: usize,
    #[serde(rename = "p_l2_modR")]
    pub p_l2_mod_r: Order,
    pub v_h1: Order,
    pub v_h1_semi: Order,
    pub v_l2: Order,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceTable {
    pub problem: Problem,
    pub pattern: Pattern,
    pub nu: f64,
    pub rows: Vec<ErrorRow>,
    pub orders: Vec<OrderRow>,
}

impl ConvergenceTable {
    /// Order between the two finest grids for `kind`.
    pub fn final_order(&self, kind: PressureSpaceKind) -> Option<&OrderRow> {
        self.orders.iter().filter(|o| o.element == kind.short_name()).last()
    }

    pub fn row(&self, kind: PressureSpaceKind, grid: usize) -> Option<&ErrorRow> {
        self.rows.iter().find(|r| r.element == kind.short_name() && r.grid == grid)
    }
}

/// Reference errors for the Griffiths problem on the default grids, as
/// `(p, |v|_H1, |v|_L2)`.
pub fn reference_errors(kind: PressureSpaceKind, grid: usize) -> Option<[f64; 3]> {
    match (kind, grid) {
        (PressureSpaceKind::TaylorHood, 4) => Some([0.4283, 0.4802, 0.01669]),
        (PressureSpaceKind::TaylorHood, 8) => Some([0.0975, 0.1189, 0.00239]),
        (PressureSpaceKind::TaylorHood, 16) => Some([0.0233, 0.0296, 0.00029]),
        (PressureSpaceKind::Lc, 4) => Some([0.4878, 0.4865, 0.01637]),
        (PressureSpaceKind::Lc, 8) => Some([0.1009, 0.1190, 0.00237]),
        (PressureSpaceKind::Lc, 16) => Some([0.0233, 0.0296, 0.00029]),
        _ => None,
    }
}

pub fn reference_deviation(kind: PressureSpaceKind, grid: usize, problem: Problem, e: &ErrorNorms) -> Option<ErrorDeviation> {
    if problem != Problem::Griffiths {
        return None;
    }
    let r = reference_errors(kind, grid)?;
    Some(ErrorDeviation {
        p_l2_mod_r: (e.p_l2_mod_r - r[0]).abs() / r[0],
        v_h1: (e.v_h1 - r[1]).abs() / r[1],
        v_l2: (e.v_l2 - r[2]).abs() / r[2],
    })
}

/// Worker count from [`THREADS_ENV`], defaulting to the available cores.
pub fn thread_limit() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

pub fn check_grids(grids: &[usize]) -> Result<()> {
    if grids.is_empty() {
        return Err(Error::InvalidArgument("no grids given".into()));
    }
    for w in grids.windows(2) {
        if w[1] != 2 * w[0] {
            return Err(Error::InvalidArgument(format!("grid {} does not double the previous grid {}", w[1], w[0])));
        }
    }
    Ok(())
}

/// Runs every grid for every element and estimates orders between
/// successive grids.
pub fn convergence_run(
    grids: &[usize],
    kinds: &[PressureSpaceKind],
    pattern: Pattern,
    problem: Problem,
    nu: f64,
    allow_corners: bool,
) -> Result<ConvergenceTable> {
    check_grids(grids)?;
    if kinds.is_empty() {
        return Err(Error::InvalidArgument("no element kinds given".into()));
    }
    let specs: Vec<CaseSpec> = kinds
        .iter()
        .flat_map(|&kind| grids.iter().map(move |&grid| CaseSpec { grid, kind, pattern, problem, nu, allow_corners }))
        .collect();
    let run = |spec: &CaseSpec| run_case(*spec).map(|r| (spec.kind, spec.grid, r.errors, r.max_element_divergence, r.solution.report));
    let threads = thread_limit();
    let results: Vec<_> = if threads <= 1 {
        specs.iter().map(run).collect::<Result<_>>()?
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
        pool.install(|| specs.par_iter().map(run).collect::<Result<_>>())?
    };

    let mut rows = Vec::new();
    let mut orders = Vec::new();
    for &kind in kinds {
        let block: Vec<_> = results.iter().filter(|r| r.0 == kind).collect();
        for (_, grid, errors, div, report) in &block {
            rows.push(ErrorRow {
                grid: *grid,
                element: kind.short_name().to_string(),
                errors: *errors,
                max_element_divergence: *div,
                solve: report.clone(),
                reference_deviation: reference_deviation(kind, *grid, problem, errors),
            });
        }
        for w in block.windows(2) {
            let (c, f) = (&w[0], &w[1]);
            orders.push(OrderRow {
                element: kind.short_name().to_string(),
                coarse: c.1,
                fine: f.1,
                p_l2_mod_r: estimate_order(c.2.p_l2_mod_r, f.2.p_l2_mod_r, c.1, f.1),
                v_h1: estimate_order(c.2.v_h1, f.2.v_h1, c.1, f.1),
                v_h1_semi: estimate_order(c.2.v_h1_semi, f.2.v_h1_semi, c.1, f.1),
                v_l2: estimate_order(c.2.v_l2, f.2.v_l2, c.1, f.1),
            });
        }
    }
    Ok(ConvergenceTable { problem, pattern, nu, rows, orders })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orders_from_reference_errors() {
        let o = estimate_order(0.0975, 0.0233, 8, 16).value().unwrap();
        assert!((o - 2.065).abs() < 1e-3);
        let o = estimate_order(0.00239, 0.00029, 8, 16).value().unwrap();
        assert!((o - 3.043).abs() < 1e-3);
        assert_eq!(estimate_order(0.5, 0.5, 4, 8), Order::Value(0.0));
        assert_eq!(estimate_order(0.0, 0.0, 4, 8), Order::Exact);
    }

    #[test]
    fn grids_must_double() {
        assert!(check_grids(&[4, 8, 16]).is_ok());
        assert!(check_grids(&[4, 6]).is_err());
        assert!(check_grids(&[]).is_err());
    }

    #[test]
    fn plain_lc_with_corners_is_refused() {
        let err = case_mesh(4, Pattern::Right, PressureSpaceKind::Lc, true).unwrap_err();
        assert!(matches!(err, Error::UnsupportedGrid(_)));
        assert!(case_mesh(4, Pattern::Right, PressureSpaceKind::LcTied, true).is_ok());
        let m = case_mesh(4, Pattern::Right, PressureSpaceKind::Lc, false).unwrap();
        assert!(corner_elements(&m).unwrap().is_empty());
    }

    #[test]
    fn single_grid_has_no_orders() {
        let t = convergence_run(&[2], &[PressureSpaceKind::TaylorHood], Pattern::Right, Problem::Poly, 1.0, false).unwrap();
        assert_eq!(t.rows.len(), 1);
        assert!(t.orders.is_empty());
        assert!(t.rows[0].errors.v_h1 < 1e-9);
    }
}
