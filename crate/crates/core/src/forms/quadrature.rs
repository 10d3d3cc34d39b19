use crate::{Error, Result};

pub const MAX_DEGREE: usize = 30;

/// Triangle quadrature in barycentric coordinates. Weights sum to 1 and are
/// scaled by the triangle area at use.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub degree: usize,
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
}

/// Gauss-Legendre nodes and weights on `[0, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            // Legendre recurrence for P_n and its derivative
            let (mut p0, mut p1) = (1.0, x);
            if n == 1 {
                p1 = x;
                p0 = 1.0;
            } else {
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = 0.5 * (1.0 - x);
        weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
    // ascending order on [0, 1]
    (nodes, weights)
}

/// Rule exact for polynomials of total degree `degree` on any triangle.
///
/// Collapsed (Duffy) tensor product of Gauss-Legendre rules.
pub fn quadrature(degree: usize) -> Result<QuadratureRule> {
    if degree == 0 || degree > MAX_DEGREE {
        return Err(Error::UnsupportedQuadrature(degree));
    }
    let nu = (degree + 3) / 2;
    let nv = (degree + 2) / 2;
    let (xu, wu) = gauss_legendre(nu);
    let (xv, wv) = gauss_legendre(nv);
    let mut points = Vec::with_capacity(nu * nv);
    let mut weights = Vec::with_capacity(nu * nv);
    for (u, wu) in xu.iter().zip(&wu) {
        for (v, wv) in xv.iter().zip(&wv) {
            let x = *u;
            let y = (1.0 - u) * v;
            points.push([1.0 - x - y, x, y]);
            weights.push(2.0 * wu * wv * (1.0 - u));
        }
    }
    Ok(QuadratureRule {
        degree,
        points,
        weights,
    })
}

/// `rule` applied on each of the `4^splits` triangles of `splits` uniform
/// red refinements of the reference triangle. Same polynomial exactness,
/// error smaller by about `2^-(degree+1)` per split on smooth integrands.
pub fn composite(rule: &QuadratureRule, splits: usize) -> QuadratureRule {
    let mut tris: Vec<[[f64; 3]; 3]> = vec![[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]];
    for _ in 0..splits {
        let mid = |a: [f64; 3], b: [f64; 3]| {
            [
                0.5 * (a[0] + b[0]),
                0.5 * (a[1] + b[1]),
                0.5 * (a[2] + b[2]),
            ]
        };
        tris = tris
            .iter()
            .flat_map(|&[a, b, c]| {
                let (ab, bc, ca) = (mid(a, b), mid(b, c), mid(c, a));
                [[a, ab, ca], [ab, b, bc], [ca, bc, c], [bc, ca, ab]]
            })
            .collect();
    }
    let scale = 1.0 / tris.len() as f64;
    let mut points = Vec::with_capacity(tris.len() * rule.points.len());
    let mut weights = Vec::with_capacity(points.capacity());
    for v in &tris {
        for (b, w) in rule.points.iter().zip(&rule.weights) {
            points.push(std::array::from_fn(|i| {
                b[0] * v[0][i] + b[1] * v[1][i] + b[2] * v[2][i]
            }));
            weights.push(w * scale);
        }
    }
    QuadratureRule {
        degree: rule.degree,
        points,
        weights,
    }
}
