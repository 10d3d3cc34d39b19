//! Manufactured solutions, error norms, convergence and thickness sweeps,
//! and the structural invariant suite.

pub mod case;
pub mod config;
pub mod convergence;
pub mod norms;
pub mod verify;

use std::sync::Arc;

use crate::mesh::{generate_square_hole_mesh, refine_uniform, HoleBox, Mesh};
use crate::{Error, Result};

pub use case::{
    check_oracle, make_case, make_kirchhoff_case, make_rm_case, oracle_step, sample_points,
    CaseKind, ManufacturedCase, OracleReport,
};
pub use config::RunConfig;
pub use convergence::{
    run_bfs_levels, run_convergence, run_t_sweep, BfsTable, ConvergenceConfig, ConvergenceRow,
    ConvergenceTable, OutputFormat, TSweepTable, CSV_HEADER, ORACLE_MIN_T, ORACLE_TOL,
};
pub use norms::{error_norms, error_norms_with_degree, ErrorRecord};
pub use verify::{verify, VerifyReport};

fn refined(mut m: Mesh, level: usize) -> Arc<Mesh> {
    for _ in 0..level {
        m = refine_uniform(&m);
    }
    Arc::new(m)
}

/// `[0,3]^2` minus `[1,2]^2`, unit cells, refined `level` times.
pub fn canonical_mesh(level: usize) -> Result<Arc<Mesh>> {
    let m = generate_square_hole_mesh(3.0, &[HoleBox::new(1.0, 1.0, 2.0, 2.0)], 1)?;
    Ok(refined(m, level))
}

/// `[0,5]^2` minus `[1,2]^2` and `[3,4]^2`, unit cells, refined `level`
/// times.
pub fn two_hole_mesh(level: usize) -> Result<Arc<Mesh>> {
    let holes = [
        HoleBox::new(1.0, 1.0, 2.0, 2.0),
        HoleBox::new(3.0, 3.0, 4.0, 4.0),
    ];
    let m = generate_square_hole_mesh(5.0, &holes, 1)?;
    Ok(refined(m, level))
}

/// Thread pool capped by `PLATEMIX_THREADS` (all cores when unset).
pub fn worker_pool() -> Result<rayon::ThreadPool> {
    let n = match std::env::var("PLATEMIX_THREADS") {
        Ok(s) => s
            .trim()
            .parse::<usize>()
            .map_err(|_| Error::Parse(format!("PLATEMIX_THREADS='{s}' is not a count")))?,
        Err(_) => 0,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build()
        .map_err(|e| Error::Parse(e.to_string()))
}
