//! Direct solves of symmetric indefinite systems.
//!
//! Strategy: symmetric Ruiz equilibration, then a supernodal sparse
//! Bunch-Kaufman factorization (pivoting inside supernodes). If that breaks
//! down or misses the tolerance after refinement, a sparse LU with partial
//! pivoting is tried, and finally a dense Bunch-Kaufman factorization for
//! systems of at most `dense_limit` unknowns.

use std::time::Instant;

use faer::dyn_stack::{MemBuffer, MemStack, StackReq};
use faer::linalg::solvers::Solve;
use faer::sparse::linalg::cholesky::{
    factorize_symbolic_cholesky, CholeskySymbolicParams, SymbolicCholesky, SymmetricOrdering,
};
use faer::sparse::linalg::SupernodalThreshold;
use faer::sparse::{SparseColMat, Triplet};
use faer::{Conj, Mat, Par, Side};
use serde::Serialize;

use crate::sparse::CsrMatrix;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveMethod {
    SparseBunchKaufman,
    RegularizedBunchKaufman,
    SparseLu,
    DenseBunchKaufman,
    Trivial,
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub tol: f64,
    pub max_refinement: usize,
    pub dense_limit: usize,
    pub equilibrate: bool,
    /// Diagonal shift for zero pivots, relative to the equilibrated matrix.
    pub regularization: f64,
    /// `+1` for primal unknowns, `-1` for multipliers. Without it every
    /// shifted row is treated as a multiplier.
    pub signs: Option<Vec<i8>>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_refinement: 8,
            dense_limit: 5000,
            equilibrate: true,
            regularization: 1e-8,
            signs: None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    #[serde(skip)]
    pub solution: Vec<f64>,
    pub n: usize,
    pub relative_residual: f64,
    pub method: SolveMethod,
    /// Nonzeros of the input matrix.
    pub nnz: usize,
    /// Stored entries of the factor, when the method exposes them.
    pub factor_nnz: Option<usize>,
    pub refinement_steps: usize,
    pub wall_time_secs: f64,
}

impl SolveReport {
    /// Fill ratio `factor_nnz / nnz`.
    pub fn fill(&self) -> Option<f64> {
        self.factor_nnz.map(|f| f as f64 / self.nnz.max(1) as f64)
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Symmetric Ruiz scaling: `D A D` has rows and columns of max-norm close
/// to one.
fn ruiz_scaling(a: &CsrMatrix, iterations: usize) -> Vec<f64> {
    let n = a.nrows();
    let mut d = vec![1.0; n];
    for _ in 0..iterations {
        let mut row_max = vec![0.0f64; n];
        for (i, j, v) in a.triplets() {
            row_max[i] = row_max[i].max((d[i] * v * d[j]).abs());
        }
        let mut done = true;
        for i in 0..n {
            if row_max[i] > 0.0 {
                let s = 1.0 / row_max[i].sqrt();
                if (s - 1.0).abs() > 1e-3 {
                    done = false;
                }
                d[i] *= s;
            }
        }
        if done {
            break;
        }
    }
    d
}

trait Factor {
    fn solve(&mut self, rhs: &[f64]) -> Vec<f64>;
}

struct SparseLblt {
    symbolic: SymbolicCholesky<usize>,
    values: Vec<f64>,
    subdiag: Vec<f64>,
    perm_fwd: Vec<usize>,
    perm_inv: Vec<usize>,
}

impl SparseLblt {
    fn new(a: &SparseColMat<usize, f64>) -> Option<Self> {
        let params = CholeskySymbolicParams {
            supernodal_flop_ratio_threshold: SupernodalThreshold::FORCE_SUPERNODAL,
            ..Default::default()
        };
        let symbolic =
            factorize_symbolic_cholesky(a.symbolic(), Side::Lower, SymmetricOrdering::Amd, params)
                .ok()?;
        let n = a.nrows();
        let mut values = vec![0.0; symbolic.len_val()];
        let mut subdiag = vec![0.0; n];
        let mut perm_fwd = vec![0usize; n];
        let mut perm_inv = vec![0usize; n];
        let req =
            symbolic.factorize_numeric_intranode_lblt_scratch::<f64>(Par::Seq, Default::default());
        let mut buf = MemBuffer::try_new(req).ok()?;
        symbolic.factorize_numeric_intranode_lblt(
            &mut values,
            &mut subdiag,
            &mut perm_fwd,
            &mut perm_inv,
            a.as_ref(),
            Side::Lower,
            Par::Seq,
            MemStack::new(&mut buf),
            Default::default(),
        );
        if values.iter().chain(&subdiag).any(|v| !v.is_finite()) {
            return None;
        }
        Some(Self {
            symbolic,
            values,
            subdiag,
            perm_fwd,
            perm_inv,
        })
    }
}

impl Factor for SparseLblt {
    fn solve(&mut self, rhs: &[f64]) -> Vec<f64> {
        let n = rhs.len();
        let mut x = Mat::from_fn(n, 1, |i, _| rhs[i]);
        let perm = unsafe { faer::perm::PermRef::new_unchecked(&self.perm_fwd, &self.perm_inv, n) };
        let f = faer::sparse::linalg::cholesky::IntranodeLbltRef::new(
            &self.symbolic,
            &self.values,
            &self.subdiag,
            perm,
        );
        let req = StackReq::any_of(&[self.symbolic.solve_in_place_scratch::<f64>(1, Par::Seq)]);
        let mut buf = MemBuffer::new(req);
        f.solve_in_place_with_conj(Conj::No, x.as_mut(), Par::Seq, MemStack::new(&mut buf));
        (0..n).map(|i| x[(i, 0)]).collect()
    }
}

struct SparseLu(faer::sparse::linalg::solvers::Lu<usize, f64>);

impl Factor for SparseLu {
    fn solve(&mut self, rhs: &[f64]) -> Vec<f64> {
        let b = Mat::from_fn(rhs.len(), 1, |i, _| rhs[i]);
        let x = self.0.solve(&b);
        (0..rhs.len()).map(|i| x[(i, 0)]).collect()
    }
}

struct DenseLblt(faer::linalg::solvers::Lblt<f64>);

impl Factor for DenseLblt {
    fn solve(&mut self, rhs: &[f64]) -> Vec<f64> {
        let b = Mat::from_fn(rhs.len(), 1, |i, _| rhs[i]);
        let x = self.0.solve(&b);
        (0..rhs.len()).map(|i| x[(i, 0)]).collect()
    }
}

/// Solve with a factorization of the scaled matrix `D A D` and refine
/// against the original system.
fn refine(
    a: &CsrMatrix,
    b: &[f64],
    d: &[f64],
    factor: &mut dyn Factor,
    opts: &SolveOptions,
) -> (Vec<f64>, f64, usize) {
    let bnorm = norm(b);
    let n = b.len();
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut best = (x.clone(), f64::INFINITY);
    let mut steps = 0;
    for step in 0..=opts.max_refinement {
        let scaled: Vec<f64> = r.iter().zip(d).map(|(ri, di)| ri * di).collect();
        let dy = factor.solve(&scaled);
        if dy.iter().any(|v| !v.is_finite()) {
            break;
        }
        for i in 0..n {
            x[i] += d[i] * dy[i];
        }
        let ax = a.mul_vec(&x);
        r = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
        let res = norm(&r) / bnorm;
        steps = step;
        if res < best.1 {
            best = (x.clone(), res);
        } else {
            break;
        }
        if res <= opts.tol * 1e-2 {
            break;
        }
    }
    (best.0, best.1, steps)
}

/// `D A D + diag(shift)` in faer's format; duplicate entries are summed.
fn to_faer(a: &CsrMatrix, d: &[f64], shift: &[(usize, f64)]) -> Option<SparseColMat<usize, f64>> {
    let trip: Vec<_> = a
        .triplets()
        .map(|(i, j, v)| Triplet::new(i, j, d[i] * v * d[j]))
        .chain(shift.iter().map(|&(i, v)| Triplet::new(i, i, v)))
        .collect();
    SparseColMat::try_new_from_triplets(a.nrows(), a.ncols(), &trip).ok()
}

/// Solve `A x = b` for symmetric (indefinite) `A` with the default strategy.
pub fn solve_symmetric_indefinite(a: &CsrMatrix, b: &[f64], tol: f64) -> Result<SolveReport> {
    solve_with_options(
        a,
        b,
        &SolveOptions {
            tol,
            ..Default::default()
        },
    )
}

pub fn solve_with_options(a: &CsrMatrix, b: &[f64], opts: &SolveOptions) -> Result<SolveReport> {
    let start = Instant::now();
    let n = a.nrows();
    if a.ncols() != n || b.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "matrix {}x{} with right-hand side of length {}",
            a.nrows(),
            a.ncols(),
            b.len()
        )));
    }
    if let Some(s) = opts.signs.as_ref().filter(|s| s.len() != n) {
        return Err(Error::DimensionMismatch(format!(
            "{} pivot signs for {n} unknowns",
            s.len()
        )));
    }
    let scale = a.max_abs();
    if a.asymmetry() > 1e-12 * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::Factorization(format!(
            "matrix is not symmetric (max |A - A^T| = {:e})",
            a.asymmetry()
        )));
    }
    let report = |solution, relative_residual, method, factor_nnz, refinement_steps| SolveReport {
        solution,
        n,
        relative_residual,
        method,
        nnz: a.nnz(),
        factor_nnz,
        refinement_steps,
        wall_time_secs: start.elapsed().as_secs_f64(),
    };
    if norm(b) == 0.0 {
        return Ok(report(vec![0.0; n], 0.0, SolveMethod::Trivial, None, 0));
    }
    // a structurally empty row cannot be solved by any method
    if let Some(i) = (0..n).find(|&i| a.row(i).all(|(_, v)| v == 0.0)) {
        return Err(Error::Factorization(format!(
            "row {i} is structurally zero"
        )));
    }
    let d = if opts.equilibrate {
        ruiz_scaling(a, 20)
    } else {
        vec![1.0; n]
    };
    let mut best: Option<SolveReport> = None;
    let mut consider = |r: SolveReport| -> bool {
        let ok = r.relative_residual <= opts.tol;
        if best
            .as_ref()
            .is_none_or(|b| r.relative_residual < b.relative_residual)
        {
            best = Some(r);
        }
        ok
    };

    if let Some(scaled) = to_faer(a, &d, &[]) {
        if let Some(mut f) = SparseLblt::new(&scaled) {
            let fill = f.symbolic.len_val();
            let (x, res, steps) = refine(a, b, &d, &mut f, opts);
            if consider(report(
                x,
                res,
                SolveMethod::SparseBunchKaufman,
                Some(fill),
                steps,
            )) {
                return Ok(best.unwrap());
            }
        }
        let shift: Vec<(usize, f64)> = (0..n)
            .filter(|&i| a.get(i, i) == 0.0)
            .map(|i| {
                let sign = opts
                    .signs
                    .as_ref()
                    .map_or(-1.0, |s| f64::from(s[i].signum()));
                (i, sign * opts.regularization)
            })
            .collect();
        if !shift.is_empty() {
            if let Some(mut f) = to_faer(a, &d, &shift).and_then(|m| SparseLblt::new(&m)) {
                let fill = f.symbolic.len_val();
                // the shift costs a factor ~regularization per step
                let more = SolveOptions {
                    max_refinement: opts.max_refinement.max(30),
                    ..opts.clone()
                };
                let (x, res, steps) = refine(a, b, &d, &mut f, &more);
                if consider(report(
                    x,
                    res,
                    SolveMethod::RegularizedBunchKaufman,
                    Some(fill),
                    steps,
                )) {
                    return Ok(best.unwrap());
                }
            }
        }
        if let Ok(lu) = scaled.sp_lu() {
            let mut f = SparseLu(lu);
            let (x, res, steps) = refine(a, b, &d, &mut f, opts);
            if consider(report(x, res, SolveMethod::SparseLu, None, steps)) {
                return Ok(best.unwrap());
            }
        }
    }
    if n <= opts.dense_limit {
        let dense = a.to_dense();
        let m = Mat::from_fn(n, n, |i, j| d[i] * dense[i][j] * d[j]);
        let mut f = DenseLblt(m.lblt(Side::Lower));
        let (x, res, steps) = refine(a, b, &d, &mut f, opts);
        if consider(report(
            x,
            res,
            SolveMethod::DenseBunchKaufman,
            Some(n * (n + 1) / 2),
            steps,
        )) {
            return Ok(best.unwrap());
        }
    }
    match best {
        Some(r) if r.relative_residual.is_finite() => Err(Error::ToleranceNotMet {
            residual: r.relative_residual,
            tol: opts.tol,
        }),
        _ => Err(Error::Factorization(
            "every factorization broke down".into(),
        )),
    }
}
