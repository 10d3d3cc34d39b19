//! Dense bivariate polynomials with exact differentiation.
//!
//! Used for manufactured solutions and for test fields whose derivatives
//! must be known in closed form.

use std::ops::{Add, Mul, Neg, Sub};

/// `sum c[i][j] (x - x0)^i (y - y0)^j`, stored row-major with `nx` powers of
/// x and `ny` powers of y. The origin defaults to zero; expanding about the
/// middle of the region of interest keeps high-degree evaluation accurate.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly2 {
    nx: usize,
    ny: usize,
    coeffs: Vec<f64>,
    origin: [f64; 2],
}

impl Poly2 {
    pub fn zero() -> Self {
        Self {
            nx: 1,
            ny: 1,
            coeffs: vec![0.0],
            origin: [0.0; 2],
        }
    }

    pub fn constant(c: f64) -> Self {
        Self {
            nx: 1,
            ny: 1,
            coeffs: vec![c],
            origin: [0.0; 2],
        }
    }

    /// Polynomial in x only, `coeffs[i]` multiplying `x^i`.
    pub fn in_x(coeffs: &[f64]) -> Self {
        let mut p = Self::with_shape(coeffs.len().max(1), 1);
        for (i, &c) in coeffs.iter().enumerate() {
            p.coeffs[i] = c;
        }
        p
    }

    /// Polynomial in y only, `coeffs[j]` multiplying `y^j`.
    pub fn in_y(coeffs: &[f64]) -> Self {
        let mut p = Self::with_shape(1, coeffs.len().max(1));
        for (j, &c) in coeffs.iter().enumerate() {
            p.coeffs[j] = c;
        }
        p
    }

    /// Build from a list of `(i, j, c)` monomials.
    pub fn from_terms(terms: &[(usize, usize, f64)]) -> Self {
        let nx = terms.iter().map(|t| t.0 + 1).max().unwrap_or(1);
        let ny = terms.iter().map(|t| t.1 + 1).max().unwrap_or(1);
        let mut p = Self::with_shape(nx, ny);
        for &(i, j, c) in terms {
            p.coeffs[i * ny + j] += c;
        }
        p
    }

    fn with_shape(nx: usize, ny: usize) -> Self {
        Self {
            nx,
            ny,
            coeffs: vec![0.0; nx * ny],
            origin: [0.0; 2],
        }
    }

    /// Reinterpret the coefficients as an expansion about `origin`.
    pub fn with_origin(mut self, origin: [f64; 2]) -> Self {
        self.origin = origin;
        self
    }

    pub fn origin(&self) -> [f64; 2] {
        self.origin
    }

    fn joint_origin(&self, other: &Self) -> [f64; 2] {
        if self.degree() == 0 {
            other.origin
        } else if other.degree() == 0 || self.origin == other.origin {
            self.origin
        } else {
            panic!(
                "polynomials expanded about {:?} and {:?}",
                self.origin, other.origin
            )
        }
    }

    #[inline]
    pub fn coeff(&self, i: usize, j: usize) -> f64 {
        if i < self.nx && j < self.ny {
            self.coeffs[i * self.ny + j]
        } else {
            0.0
        }
    }

    /// Total degree (0 for the zero polynomial).
    pub fn degree(&self) -> usize {
        let mut d = 0;
        for i in 0..self.nx {
            for j in 0..self.ny {
                if self.coeffs[i * self.ny + j] != 0.0 {
                    d = d.max(i + j);
                }
            }
        }
        d
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let (x, y) = (x - self.origin[0], y - self.origin[1]);
        let mut acc = 0.0;
        for i in (0..self.nx).rev() {
            let row = &self.coeffs[i * self.ny..(i + 1) * self.ny];
            let mut inner = 0.0;
            for &c in row.iter().rev() {
                inner = inner * y + c;
            }
            acc = acc * x + inner;
        }
        acc
    }

    pub fn dx(&self) -> Self {
        if self.nx == 1 {
            return Self::zero();
        }
        let mut p = Self::with_shape(self.nx - 1, self.ny);
        for i in 1..self.nx {
            for j in 0..self.ny {
                p.coeffs[(i - 1) * self.ny + j] = i as f64 * self.coeffs[i * self.ny + j];
            }
        }
        p.origin = self.origin;
        p
    }

    pub fn dy(&self) -> Self {
        if self.ny == 1 {
            return Self::zero();
        }
        let mut p = Self::with_shape(self.nx, self.ny - 1);
        for i in 0..self.nx {
            for j in 1..self.ny {
                p.coeffs[i * (self.ny - 1) + j - 1] = j as f64 * self.coeffs[i * self.ny + j];
            }
        }
        p.origin = self.origin;
        p
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            nx: self.nx,
            ny: self.ny,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
            origin: self.origin,
        }
    }

    fn combine(&self, other: &Self, sign: f64) -> Self {
        let nx = self.nx.max(other.nx);
        let ny = self.ny.max(other.ny);
        let mut p = Self::with_shape(nx, ny);
        for i in 0..nx {
            for j in 0..ny {
                p.coeffs[i * ny + j] = self.coeff(i, j) + sign * other.coeff(i, j);
            }
        }
        p.origin = self.joint_origin(other);
        p
    }
}

impl Add for &Poly2 {
    type Output = Poly2;
    fn add(self, rhs: &Poly2) -> Poly2 {
        self.combine(rhs, 1.0)
    }
}

impl Sub for &Poly2 {
    type Output = Poly2;
    fn sub(self, rhs: &Poly2) -> Poly2 {
        self.combine(rhs, -1.0)
    }
}

impl Neg for &Poly2 {
    type Output = Poly2;
    fn neg(self) -> Poly2 {
        self.scale(-1.0)
    }
}

impl Mul for &Poly2 {
    type Output = Poly2;
    fn mul(self, rhs: &Poly2) -> Poly2 {
        let nx = self.nx + rhs.nx - 1;
        let ny = self.ny + rhs.ny - 1;
        let mut p = Poly2::with_shape(nx, ny);
        for i in 0..self.nx {
            for j in 0..self.ny {
                let a = self.coeffs[i * self.ny + j];
                if a == 0.0 {
                    continue;
                }
                for k in 0..rhs.nx {
                    for l in 0..rhs.ny {
                        p.coeffs[(i + k) * ny + j + l] += a * rhs.coeffs[k * rhs.ny + l];
                    }
                }
            }
        }
        p.origin = self.joint_origin(rhs);
        p
    }
}

/// A vector field with polynomial components.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyVec2(pub Poly2, pub Poly2);

impl PolyVec2 {
    pub fn eval(&self, x: f64, y: f64) -> [f64; 2] {
        [self.0.eval(x, y), self.1.eval(x, y)]
    }

    /// Jacobian `J[c][d] = d v_c / d x_d`.
    pub fn jacobian(&self) -> [[Poly2; 2]; 2] {
        [[self.0.dx(), self.0.dy()], [self.1.dx(), self.1.dy()]]
    }

    /// `d v_2/dx - d v_1/dy`
    pub fn rot(&self) -> Poly2 {
        &self.1.dx() - &self.0.dy()
    }

    pub fn div(&self) -> Poly2 {
        &self.0.dx() + &self.1.dy()
    }

    pub fn grad(p: &Poly2) -> Self {
        Self(p.dx(), p.dy())
    }
}
