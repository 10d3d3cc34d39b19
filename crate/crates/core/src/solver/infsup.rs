//! Dense estimate of the inf-sup constant of the shear constraint.
//!
//! With `V = BR x RT x P1_0` and `Q = P1C x P0`, the constraint form is
//! `b((psi, eta, mu), (z, q)) = (t^2 eta - grad mu + psi, grad z)
//!  + (rot(t^2 eta + psi), q)`. The estimate is `beta = sqrt(lambda_min)`
//! of `B^T X^-1 B v = lambda M v`, where `X` is the Gram matrix of
//! `|psi|_1^2 + t^2 |eta|_0^2 + t^4 |rot eta|_0^2 + |mu|_1^2` and `M` the
//! Gram matrix of `|grad z|_0^2 + |q|_0^2`. `X` is block diagonal, so the
//! Schur complement is accumulated block by block.

use std::sync::Arc;

use faer::{Mat, Side};
use serde::Serialize;

use crate::forms::{assemble, assemble_local, quadrature, FormTag, LocalMatrix, DEFAULT_DEGREE};
use crate::mesh::Mesh;
use crate::spaces::field::local_basis;
use crate::spaces::{DofMap, SpaceSet};
use crate::sparse::CsrMatrix;
use crate::{Error, Result};

/// Largest `dim V` handled by the dense path.
pub const INFSUP_DENSE_LIMIT: usize = 6000;

#[derive(Debug, Clone, Serialize)]
pub struct InfSupEstimate {
    pub beta: f64,
    pub t: f64,
    /// Refinement level, filled in by callers that know it.
    pub level: Option<usize>,
    pub h: f64,
    pub n_v: usize,
    pub n_q: usize,
    /// `|S v - lambda M v| / |S v|` for the extremal pair.
    pub eig_residual: f64,
}

fn gram<F>(space: &DofMap, integrand: F) -> Result<CsrMatrix>
where
    F: Fn(&crate::spaces::basis::BasisEval, &crate::spaces::basis::BasisEval) -> f64 + Sync,
{
    let rule = quadrature(DEFAULT_DEGREE)?;
    let kind = space.kind();
    assemble_local(space, space, |_, g| {
        let n = kind.n_local();
        let mut m = LocalMatrix::zeros(n, n);
        for (b, w) in rule.points.iter().zip(&rule.weights) {
            let s = local_basis(kind, g, b);
            for i in 0..n {
                for j in 0..n {
                    m.add(i, j, w * g.area * integrand(&s[i], &s[j]));
                }
            }
        }
        Ok(m)
    })
}

fn dense(a: &CsrMatrix) -> Mat<f64> {
    let mut m = Mat::zeros(a.nrows(), a.ncols());
    for (i, j, v) in a.triplets() {
        m[(i, j)] += v;
    }
    m
}

/// Horizontal concatenation `[a, b]` of two blocks with equal row counts.
fn hcat(a: &CsrMatrix, b: Option<&CsrMatrix>, ncols: usize) -> Mat<f64> {
    let mut m = Mat::zeros(a.nrows(), ncols);
    for (i, j, v) in a.triplets() {
        m[(i, j)] += v;
    }
    if let Some(b) = b {
        for (i, j, v) in b.triplets() {
            m[(i, a.ncols() + j)] += v;
        }
    }
    m
}

fn factor_err<E: std::fmt::Debug>(what: &str) -> impl FnOnce(E) -> Error + '_ {
    move |e| Error::Factorization(format!("{what}: {e:?}"))
}

/// `B^T X^-1 B` for one block of `V`.
fn schur_part(x: &CsrMatrix, b: &Mat<f64>) -> Result<Mat<f64>> {
    let llt = dense(x).llt(Side::Lower).map_err(factor_err("X block"))?;
    let l = llt.L();
    let mut w = b.clone();
    l.solve_lower_triangular_in_place(w.as_mut());
    Ok(w.transpose() * &w)
}

pub fn estimate_infsup(mesh: &Arc<Mesh>, t: f64) -> Result<InfSupEstimate> {
    if !(t > 0.0) {
        return Err(Error::NonPositiveThickness(t));
    }
    if mesh.n_interior_vertices() == 0 {
        return Err(Error::InsufficientResolution);
    }
    let s = SpaceSet::new(mesh.clone());
    let n_v = s.br.n_dofs() + s.rt.n_dofs() + s.p1_zero.n_dofs();
    if n_v > INFSUP_DENSE_LIMIT {
        return Err(Error::TooLarge {
            n: n_v,
            limit: INFSUP_DENSE_LIMIT,
        });
    }
    let (nz, nq) = (s.p1_hole.n_dofs(), s.p0.n_dofs());
    let n_q = nz + nq;
    let (t2, t4) = (t * t, t.powi(4));

    let h1_full = |u: &crate::spaces::basis::BasisEval, v: &crate::spaces::basis::BasisEval| {
        let mut acc = u.value[0] * v.value[0] + u.value[1] * v.value[1];
        for i in 0..2 {
            for j in 0..2 {
                acc += u.grad[i][j] * v.grad[i][j];
            }
        }
        acc
    };
    let x_psi = gram(&s.br, h1_full)?;
    let x_eta = gram(&s.rt, |u, v| {
        t2 * (u.value[0] * v.value[0] + u.value[1] * v.value[1]) + t4 * u.rot() * v.rot()
    })?;
    let x_mu = gram(&s.p1_zero, h1_full)?;

    let b_psi = hcat(
        &assemble(&s.br, &s.p1_hole, FormTag::VecDotGrad)?,
        Some(&assemble(&s.br, &s.p0, FormTag::RotTimesP0)?),
        n_q,
    );
    let b_eta = hcat(
        &assemble(&s.rt, &s.p1_hole, FormTag::VecDotGrad)?.scale(t2),
        Some(&assemble(&s.rt, &s.p0, FormTag::RtRotP0)?.scale(t2)),
        n_q,
    );
    let b_mu = hcat(
        &assemble(&s.p1_zero, &s.p1_hole, FormTag::GradGrad)?.scale(-1.0),
        None,
        n_q,
    );

    let mut schur = schur_part(&x_psi, &b_psi)?;
    schur += schur_part(&x_eta, &b_eta)?;
    schur += schur_part(&x_mu, &b_mu)?;

    let mut m = Mat::<f64>::zeros(n_q, n_q);
    for (i, j, v) in assemble(&s.p1_hole, &s.p1_hole, FormTag::GradGrad)?.triplets() {
        m[(i, j)] += v;
    }
    for (i, j, v) in assemble(&s.p0, &s.p0, FormTag::MassScalar)?.triplets() {
        m[(nz + i, nz + j)] += v;
    }

    // C = L^-1 S L^-T with M = L L^T
    let llt = m.llt(Side::Lower).map_err(factor_err("Q Gram"))?;
    let l = llt.L();
    let mut w = schur.clone();
    l.solve_lower_triangular_in_place(w.as_mut());
    let mut c = w.transpose().to_owned();
    l.solve_lower_triangular_in_place(c.as_mut());
    let c = Mat::from_fn(n_q, n_q, |i, j| 0.5 * (c[(i, j)] + c[(j, i)]));

    let eig = c
        .self_adjoint_eigen(Side::Lower)
        .map_err(factor_err("eigen"))?;
    let vals: Vec<f64> = (0..n_q).map(|i| eig.S()[i]).collect();
    let lmax = vals.iter().copied().fold(0.0, f64::max);
    let (k, lmin) = vals
        .iter()
        .copied()
        .enumerate()
        .find(|&(_, v)| v >= 1e-12 * lmax)
        .ok_or_else(|| Error::Factorization("inf-sup pencil has no positive eigenvalue".into()))?;

    // residual of the generalized pair (S, M) with v = L^-T u
    let mut v = eig.U().col(k).to_owned();
    l.transpose().solve_upper_triangular_in_place(v.as_mut());
    let sv = &schur * &v;
    let mv = &m * &v;
    let r = (&sv - &mv * faer::Scale(lmin)).norm_l2();
    let eig_residual = r / sv.norm_l2().max(f64::MIN_POSITIVE);

    Ok(InfSupEstimate {
        beta: lmin.sqrt(),
        t,
        level: None,
        h: mesh.mesh_size(),
        n_v,
        n_q,
        eig_residual,
    })
}
