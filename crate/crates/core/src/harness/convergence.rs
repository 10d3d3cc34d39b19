use std::fmt::Write as _;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::case::{check_oracle, make_case, make_rm_case, oracle_step, sample_points, CaseKind};
use super::norms::{error_norms, ErrorRecord};
use super::{canonical_mesh, worker_pool};
use crate::forms::PlateMaterial;
use crate::schemes::{
    assemble_scheme, bfs_cross_check, solve_scheme, BfsReport, SchemeKind, SolutionFields,
};
use crate::{Error, Result};

/// Finest level used for the multiplier reference solution.
pub const MAX_REFERENCE_LEVEL: usize = 5;

/// Relative tolerance of the finite-difference check run on the loads
/// before any solve.
pub const ORACLE_TOL: f64 = 1e-6;
const ORACLE_SEED: u64 = 7;
pub const ORACLE_MIN_T: f64 = 1e-2;

pub const CSV_HEADER: &str =
    "level,h,ndofs,err_phi_h1,err_w_h1,err_zeta_xt,err_p_l2,err_y_h1,rate_phi,rate_w";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            _ => Err(Error::Parse(format!("unknown format '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceConfig {
    pub scheme: SchemeKind,
    pub case: CaseKind,
    pub t: f64,
    pub levels: usize,
    #[serde(skip)]
    pub material: PlateMaterial,
    /// Measure the multiplier errors against a finer solution.
    pub reference: bool,
}

impl ConvergenceConfig {
    pub fn new(scheme: SchemeKind, case: CaseKind, t: f64, levels: usize) -> Self {
        Self {
            scheme,
            case,
            t,
            levels,
            material: PlateMaterial::default(),
            reference: true,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
pub struct Rates {
    pub phi: f64,
    pub w: f64,
    pub zeta: f64,
    pub p: f64,
    pub y: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceRow {
    pub level: usize,
    pub h: f64,
    pub ndofs: usize,
    #[serde(flatten)]
    pub errors: ErrorRecord,
    /// `log2(e_{l-1} / e_l)`; NaN on the first row.
    pub rates: Rates,
    pub relative_residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceTable {
    pub scheme: SchemeKind,
    pub case: CaseKind,
    pub t: f64,
    pub reference_level: Option<usize>,
    pub rows: Vec<ConvergenceRow>,
}

fn rate(prev: f64, cur: f64) -> f64 {
    (prev / cur).log2()
}

fn fmt_num(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else {
        format!("{v:.6e}")
    }
}

impl ConvergenceTable {
    pub fn to_csv(&self) -> String {
        let mut s = String::from(CSV_HEADER);
        s.push('\n');
        for r in &self.rows {
            let e = &r.errors;
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{},{},{}",
                r.level,
                fmt_num(r.h),
                r.ndofs,
                fmt_num(e.err_phi_h1),
                fmt_num(e.err_w_h1),
                fmt_num(e.err_zeta_xt),
                fmt_num(e.err_p_l2),
                fmt_num(e.err_y_h1),
                fmt_num(r.rates.phi),
                fmt_num(r.rates.w),
            );
        }
        s
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn render(&self, format: OutputFormat) -> Result<String> {
        match format {
            OutputFormat::Csv => Ok(self.to_csv()),
            OutputFormat::Json => self.to_json(),
        }
    }

    pub fn last(&self) -> Option<&ConvergenceRow> {
        self.rows.last()
    }
}

pub(crate) fn solve_level(
    kind: SchemeKind,
    case: &super::ManufacturedCase,
    t: f64,
    level: usize,
) -> Result<SolutionFields> {
    let mesh = canonical_mesh(level)?;
    solve_scheme(&assemble_scheme(&mesh, &case.problem(t), kind)?)
}

/// Solve on levels `1..=levels` of the canonical mesh and tabulate errors
/// and rates. A zero thickness runs the Kirchhoff counterpart of an RM
/// scheme.
pub fn run_convergence(cfg: &ConvergenceConfig) -> Result<ConvergenceTable> {
    if cfg.levels == 0 {
        return Err(Error::InvalidDomain(
            "at least one level is required".into(),
        ));
    }
    if cfg.scheme == SchemeKind::BfsCheck {
        return Err(Error::InvalidDomain(
            "bfs-check has no error table; use run_bfs_levels".into(),
        ));
    }
    let kind = cfg.scheme.for_thickness(cfg.t);
    let t = if kind.is_kirchhoff() { 0.0 } else { cfg.t };
    if kind.is_rm() && !(t > 0.0) {
        return Err(Error::NonPositiveThickness(t));
    }
    let case_t = if cfg.case == CaseKind::Rm { cfg.t } else { 0.0 };
    let case = make_case(cfg.case, case_t, cfg.material)?;
    // Below this thickness the transverse line t^-2 (-lap w + div phi)
    // amplifies difference round-off by t^-2 and the oracle is inconclusive;
    // the loads come from the same closed form at every t.
    let gate = make_case(cfg.case, case_t.max(ORACLE_MIN_T), cfg.material)?;
    let oracle = check_oracle(&gate, &sample_points(100, ORACLE_SEED), oracle_step(&gate));
    if !(oracle.max() <= ORACLE_TOL) {
        return Err(Error::OracleMismatch(oracle.max()));
    }

    let mut sols = Vec::with_capacity(cfg.levels);
    for level in 1..=cfg.levels {
        sols.push(solve_level(kind, &case, t, level)?);
    }
    let reference_level = cfg
        .reference
        .then(|| (cfg.levels + 2).min(MAX_REFERENCE_LEVEL));
    let reference = match reference_level {
        Some(r) if r > 1 => Some(solve_level(kind, &case, t, r)?),
        _ => None,
    };

    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(cfg.levels);
    for (i, sol) in sols.iter().enumerate() {
        let level = i + 1;
        let r = reference.as_ref().filter(|_| Some(level) < reference_level);
        let errors = error_norms(sol, &case, r)?;
        let rates = match rows.last() {
            Some(p) => Rates {
                phi: rate(p.errors.err_phi_h1, errors.err_phi_h1),
                w: rate(p.errors.err_w_h1, errors.err_w_h1),
                zeta: rate(p.errors.err_zeta_xt, errors.err_zeta_xt),
                p: rate(p.errors.err_p_l2, errors.err_p_l2),
                y: rate(p.errors.err_y_h1, errors.err_y_h1),
            },
            None => Rates {
                phi: f64::NAN,
                w: f64::NAN,
                zeta: f64::NAN,
                p: f64::NAN,
                y: f64::NAN,
            },
        };
        rows.push(ConvergenceRow {
            level,
            h: sol.phi.dofmap().mesh().mesh_size(),
            ndofs: sol.raw.len(),
            errors,
            rates,
            relative_residual: sol.report.relative_residual,
        });
    }
    Ok(ConvergenceTable {
        scheme: kind,
        case: cfg.case,
        t,
        reference_level: reference.as_ref().and(reference_level),
        rows,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct BfsRow {
    pub level: usize,
    #[serde(flatten)]
    pub report: BfsReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct BfsTable {
    pub t: f64,
    pub rows: Vec<BfsRow>,
}

impl BfsTable {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("level,h");
        for n in BfsReport::NAMES {
            let _ = write!(s, ",gap_{n}");
        }
        s.push('\n');
        for BfsRow { level, report: r } in &self.rows {
            let _ = write!(s, "{level},{}", fmt_num(r.h));
            for g in r.relative {
                let _ = write!(s, ",{}", fmt_num(g));
            }
            s.push('\n');
        }
        s
    }

    pub fn max_relative(&self) -> f64 {
        self.rows
            .iter()
            .flat_map(|r| r.report.relative)
            .fold(0.0, f64::max)
    }
}

/// Relative gaps between the mixed solution and its alternative-multiplier
/// counterpart for the RM manufactured loads, on levels `1..=levels`.
pub fn run_bfs_levels(t: f64, levels: usize, material: PlateMaterial) -> Result<BfsTable> {
    let case = make_rm_case(t, material)?;
    let problem = case.problem(t);
    let rows = (1..=levels)
        .map(|level| {
            Ok(BfsRow {
                level,
                report: bfs_cross_check(&canonical_mesh(level)?, &problem)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BfsTable { t, rows })
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub t: f64,
    #[serde(flatten)]
    pub errors: ErrorRecord,
    pub xt_total: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct TSweepTable {
    pub scheme: SchemeKind,
    pub level: usize,
    pub rows: Vec<SweepRow>,
}

impl TSweepTable {
    /// `max / min` of the total X^t error over the sweep.
    pub fn spread(&self) -> f64 {
        let v = self.rows.iter().map(|r| r.xt_total);
        let max = v.clone().fold(f64::MIN, f64::max);
        let min = v.fold(f64::MAX, f64::min);
        max / min
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,err_phi_h1,err_w_h1,err_zeta_xt,xt_total\n");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{},{},{},{},{}",
                fmt_num(r.t),
                fmt_num(r.errors.err_phi_h1),
                fmt_num(r.errors.err_w_h1),
                fmt_num(r.errors.err_zeta_xt),
                fmt_num(r.xt_total)
            );
        }
        s
    }
}

/// Errors of the RM manufactured family at one level for several
/// thicknesses. Cells run concurrently on the capped worker pool.
pub fn run_t_sweep(
    kind: SchemeKind,
    t_list: &[f64],
    level: usize,
    material: PlateMaterial,
) -> Result<TSweepTable> {
    if !kind.is_rm() {
        return Err(Error::InvalidDomain(format!(
            "{kind} is not a Reissner-Mindlin scheme"
        )));
    }
    if let Some(&t) = t_list.iter().find(|t| !(**t > 0.0)) {
        return Err(Error::NonPositiveThickness(t));
    }
    let pool = worker_pool()?;
    let rows = pool.install(|| {
        t_list
            .par_iter()
            .map(|&t| {
                let case = make_rm_case(t, material)?;
                let sol = solve_level(kind, &case, t, level)?;
                let errors = error_norms(&sol, &case, None)?;
                Ok(SweepRow {
                    t,
                    xt_total: errors.xt_total(),
                    errors,
                })
            })
            .collect::<Result<Vec<_>>>()
    })?;
    Ok(TSweepTable {
        scheme: kind,
        level,
        rows,
    })
}
