//! Polynomial manufactured solutions on the canonical domain.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::forms::PlateMaterial;
use crate::poly::{Poly2, PolyVec2};
use crate::schemes::PlateProblem;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CaseKind {
    Rm,
    Kirchhoff,
}

impl fmt::Display for CaseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CaseKind::Rm => "rm",
            CaseKind::Kirchhoff => "kirchhoff",
        })
    }
}

impl FromStr for CaseKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rm" => Ok(CaseKind::Rm),
            "kirchhoff" => Ok(CaseKind::Kirchhoff),
            _ => Err(Error::Parse(format!("unknown case '{s}'"))),
        }
    }
}

/// Exact fields and loads. For the Kirchhoff case `zeta` is `None` and
/// `thickness` is 0.
#[derive(Debug, Clone)]
pub struct ManufacturedCase {
    pub kind: CaseKind,
    pub thickness: f64,
    pub material: PlateMaterial,
    pub omega: Poly2,
    pub phi: PolyVec2,
    pub zeta: Option<PolyVec2>,
    pub f: PolyVec2,
    pub g: Poly2,
}

/// `u (3 - u) (u - 1) (u - 2)`: vanishes on the grid lines 0..3.
/// Expanded about the centre: with `s = u - 3/2`,
/// `q = -(s^2 - 9/4)(s^2 - 1/4) = -s^4 + 5/2 s^2 - 9/16`.
pub fn bump_1d() -> Poly2 {
    Poly2::in_x(&BUMP_COEFFS).with_origin(CENTRE)
}

const BUMP_COEFFS: [f64; 5] = [-0.5625, 0.0, 2.5, 0.0, -1.0];
const CENTRE: [f64; 2] = [1.5, 1.5];

/// `b = q(x) q(y)`.
pub fn bump() -> Poly2 {
    &bump_1d() * &Poly2::in_y(&BUMP_COEFFS).with_origin(CENTRE)
}

/// `C E(v)` as polynomials `[[s11, s12], [s21, s22]]`.
fn stress(v: &PolyVec2, mat: &PlateMaterial) -> [[Poly2; 2]; 2] {
    let j = v.jacobian();
    let d = mat.bending_factor();
    let nu = mat.poisson;
    let e11 = j[0][0].clone();
    let e22 = j[1][1].clone();
    let e12 = (&j[0][1] + &j[1][0]).scale(0.5);
    let tr = &e11 + &e22;
    let diag = |e: &Poly2| (&e.scale(1.0 - nu) + &tr.scale(nu)).scale(d);
    let off = e12.scale(d * (1.0 - nu));
    [[diag(&e11), off.clone()], [off, diag(&e22)]]
}

/// Row-wise divergence of a tensor field.
fn div_tensor(s: &[[Poly2; 2]; 2]) -> PolyVec2 {
    PolyVec2(&s[0][0].dx() + &s[0][1].dy(), &s[1][0].dx() + &s[1][1].dy())
}

fn neg(v: &PolyVec2) -> PolyVec2 {
    PolyVec2(-&v.0, -&v.1)
}

/// Reissner-Mindlin family: `omega = b^2`, `phi = grad omega + t^2 (b, b)`,
/// shear `zeta = t^-2 (grad omega - phi) = -(b, b)`.
pub fn make_rm_case(t: f64, material: PlateMaterial) -> Result<ManufacturedCase> {
    if !(t > 0.0) {
        return Err(Error::NonPositiveThickness(t));
    }
    let b = bump();
    let omega = &b * &b;
    let grad = PolyVec2::grad(&omega);
    let bb = PolyVec2(b.clone(), b.clone());
    let t2 = t * t;
    let phi = PolyVec2(&grad.0 + &b.scale(t2), &grad.1 + &b.scale(t2));
    let div_s = div_tensor(&stress(&phi, &material));
    let f = PolyVec2(&(-&div_s.0) + &b, &(-&div_s.1) + &b);
    let g = bb.div();
    Ok(ManufacturedCase {
        kind: CaseKind::Rm,
        thickness: t,
        material: material.with_thickness(t),
        zeta: Some(neg(&bb)),
        omega,
        phi,
        f,
        g,
    })
}

/// Kirchhoff case: `omega = b^2`, `phi = grad omega`, `f = 0`,
/// `g = div div (C grad^2 omega)`.
pub fn make_kirchhoff_case(material: PlateMaterial) -> ManufacturedCase {
    let b = bump();
    let omega = &b * &b;
    let phi = PolyVec2::grad(&omega);
    let s = stress(&phi, &material);
    let g = div_tensor(&s).div();
    ManufacturedCase {
        kind: CaseKind::Kirchhoff,
        thickness: 0.0,
        material: material.with_thickness(0.0),
        omega,
        phi,
        zeta: None,
        f: PolyVec2(Poly2::zero(), Poly2::zero()),
        g,
    }
}

pub fn make_case(kind: CaseKind, t: f64, material: PlateMaterial) -> Result<ManufacturedCase> {
    match kind {
        CaseKind::Rm => make_rm_case(t, material),
        CaseKind::Kirchhoff => Ok(make_kirchhoff_case(material)),
    }
}

impl ManufacturedCase {
    /// Loads as a plate problem at thickness `t` (which may differ from the
    /// case's own thickness, e.g. when a Kirchhoff case drives a scheme).
    pub fn problem(&self, t: f64) -> PlateProblem {
        let (f, g) = (self.f.clone(), self.g.clone());
        PlateProblem::new(
            self.material.with_thickness(t),
            Arc::new(move |x| f.eval(x[0], x[1])),
            Arc::new(move |x| g.eval(x[0], x[1])),
        )
    }

    /// `rot zeta`, when a shear exists.
    pub fn rot_zeta(&self) -> Option<Poly2> {
        self.zeta.as_ref().map(PolyVec2::rot)
    }
}

// ---------------------------------------------------------------------------
// Finite-difference oracle
//
// Central differences with nine points are exact for polynomials of degree
// <= 8 in the differentiated variable, which covers every field here, so the
// oracle error is pure round-off and a moderate step keeps it small even for
// nested fourth derivatives.

const FD_WEIGHTS: [f64; 4] = [4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0];

fn d1<F: Fn(f64, f64) -> f64>(f: &F, x: f64, y: f64, dir: usize, h: f64) -> f64 {
    let mut acc = 0.0;
    for (k, w) in FD_WEIGHTS.iter().enumerate() {
        let s = (k + 1) as f64 * h;
        let (p, m) = if dir == 0 {
            (f(x + s, y), f(x - s, y))
        } else {
            (f(x, y + s), f(x, y - s))
        };
        acc += w * (p - m);
    }
    acc / h
}

/// FD stress `C E(v)` at a point from point values of `v`.
fn fd_stress<V: Fn(f64, f64) -> [f64; 2]>(
    v: &V,
    x: f64,
    y: f64,
    h: f64,
    mat: &PlateMaterial,
) -> [[f64; 2]; 2] {
    let comp = |c: usize| move |a: f64, b: f64| v(a, b)[c];
    let j = |c: usize, d: usize| d1(&comp(c), x, y, d, h);
    let e = [
        [j(0, 0), 0.5 * (j(0, 1) + j(1, 0))],
        [0.5 * (j(0, 1) + j(1, 0)), j(1, 1)],
    ];
    crate::forms::apply_c(&e, mat)
}

fn fd_div_stress<V: Fn(f64, f64) -> [f64; 2]>(
    v: &V,
    x: f64,
    y: f64,
    h: f64,
    mat: &PlateMaterial,
) -> [f64; 2] {
    let s = |i: usize, j: usize| move |a: f64, b: f64| fd_stress(v, a, b, h, mat)[i][j];
    [
        d1(&s(0, 0), x, y, 0, h) + d1(&s(0, 1), x, y, 1, h),
        d1(&s(1, 0), x, y, 0, h) + d1(&s(1, 1), x, y, 1, h),
    ]
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleReport {
    pub points: usize,
    /// `max |f_fd - f| / max |f|` over the sample, per line of the strong
    /// form (moment equation, transverse equation).
    pub rel_err_f: f64,
    pub rel_err_g: f64,
}

impl OracleReport {
    pub fn max(&self) -> f64 {
        self.rel_err_f.max(self.rel_err_g)
    }
}

fn rel(errs: &[f64], refs: &[f64]) -> f64 {
    let e = errs.iter().copied().fold(0.0, f64::max);
    let r = refs.iter().copied().fold(0.0, f64::max);
    if r > 0.0 {
        e / r
    } else {
        e
    }
}

/// Random points in `[0,3]^2` minus the hole `[1,2]^2`, kept a little away
/// from the hole so the sample is interior.
pub fn sample_points(n: usize, seed: u64) -> Vec<[f64; 2]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let p = [rng.gen_range(0.01..2.99), rng.gen_range(0.01..2.99)];
        let inside_hole = (0.99..=2.01).contains(&p[0]) && (0.99..=2.01).contains(&p[1]);
        if !inside_hole {
            out.push(p);
        }
    }
    out
}

/// `q(u)` and `q'(u)` from the factored form.
fn q_factored(u: f64) -> (f64, f64) {
    let f = [u, 3.0 - u, u - 1.0, u - 2.0];
    let d = [1.0, -1.0, 1.0, 1.0];
    let val = f.iter().product();
    let der = (0..4)
        .map(|i| d[i] * (0..4).filter(|&j| j != i).map(|j| f[j]).product::<f64>())
        .sum();
    (val, der)
}

/// Point values of `omega = b^2` and `phi = grad omega + t^2 (b, b)`,
/// evaluated from the factored bump. Independent of the expanded
/// polynomials and free of their cancellation.
pub fn factored_fields(x: f64, y: f64, t: f64) -> (f64, [f64; 2]) {
    let ((qx, dqx), (qy, dqy)) = (q_factored(x), q_factored(y));
    let b = qx * qy;
    let t2 = t * t;
    (
        b * b,
        [2.0 * b * dqx * qy + t2 * b, 2.0 * b * qx * dqy + t2 * b],
    )
}

/// Check that the closed-form loads satisfy the strong equations, with all
/// derivatives of the exact fields taken by finite differences of point
/// values. RM: `-div C E(phi) - t^-2 (grad omega - phi) = f` and
/// `t^-2 (-lap omega + div phi) = g`. Kirchhoff: `div div C grad^2 omega
/// = g`.
pub fn check_oracle(case: &ManufacturedCase, points: &[[f64; 2]], h: f64) -> OracleReport {
    let mat = case.material;
    let t = case.thickness;
    let omega = |x: f64, y: f64| factored_fields(x, y, t).0;
    let phi = |x: f64, y: f64| factored_fields(x, y, t).1;
    let (mut ef, mut rf, mut eg, mut rg) = (vec![], vec![], vec![], vec![]);
    for &[x, y] in points {
        let f = case.f.eval(x, y);
        let g = case.g.eval(x, y);
        match case.kind {
            CaseKind::Rm => {
                let t2 = t * t;
                let ds = fd_div_stress(&phi, x, y, h, &mat);
                let gw = [d1(&omega, x, y, 0, h), d1(&omega, x, y, 1, h)];
                let p = phi(x, y);
                for c in 0..2 {
                    let lhs = -ds[c] - (gw[c] - p[c]) / t2;
                    ef.push((lhs - f[c]).abs());
                    rf.push(f[c].abs());
                }
                let dx = |a: f64, b: f64| d1(&omega, a, b, 0, h);
                let dy = |a: f64, b: f64| d1(&omega, a, b, 1, h);
                let lap = d1(&dx, x, y, 0, h) + d1(&dy, x, y, 1, h);
                let px = |a: f64, b: f64| phi(a, b)[0];
                let py = |a: f64, b: f64| phi(a, b)[1];
                let div = d1(&px, x, y, 0, h) + d1(&py, x, y, 1, h);
                let lhs = (-lap + div) / t2;
                eg.push((lhs - g).abs());
                rg.push(g.abs());
            }
            CaseKind::Kirchhoff => {
                // phi = grad omega by FD, then the nested divergences
                let grad = |a: f64, b: f64| [d1(&omega, a, b, 0, h), d1(&omega, a, b, 1, h)];
                let ds0 = |a: f64, b: f64| fd_div_stress(&grad, a, b, h, &mat)[0];
                let ds1 = |a: f64, b: f64| fd_div_stress(&grad, a, b, h, &mat)[1];
                let lhs = d1(&ds0, x, y, 0, h) + d1(&ds1, x, y, 1, h);
                eg.push((lhs - g).abs());
                rg.push(g.abs());
                ef.push(f.iter().map(|v| v.abs()).fold(0.0, f64::max));
                rf.push(0.0);
            }
        }
    }
    OracleReport {
        points: points.len(),
        rel_err_f: rel(&ef, &rf),
        rel_err_g: rel(&eg, &rg),
    }
}

/// Default oracle step. The stencil is exact for these degrees, so the
/// step only trades round-off between nesting depths.
pub fn oracle_step(case: &ManufacturedCase) -> f64 {
    match case.kind {
        CaseKind::Rm => 5e-2,
        CaseKind::Kirchhoff => 1e-1,
    }
}
