//! Benchmark problems, error norms and convergence tables.

mod convergence;
mod norms;
mod problems;
mod report;

pub use convergence::{
    case_mesh, check_grids, convergence_run, estimate_order, reference_errors, reference_deviation, run_case,
    solve_problem, thread_limit, CaseResult, CaseSpec, ConvergenceTable, ErrorDeviation, ErrorRow, Order, OrderRow,
    THREADS_ENV,
};
pub use norms::{error_norms, ErrorNorms};
pub use problems::{griffiths_exact, poly_exact, ExactFields, Problem};
pub use report::{write_convergence_csv, write_errors_csv, write_json, CSV_HEADER};
