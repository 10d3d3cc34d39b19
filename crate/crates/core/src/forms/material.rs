use crate::{Error, Result};

pub type Tensor2 = [[f64; 2]; 2];

/// Plate material and thickness.
///
/// The shear coefficient is carried for completeness but every scheme uses
/// the value 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlateMaterial {
    pub young: f64,
    pub poisson: f64,
    pub shear_scale: f64,
    pub thickness: f64,
}

impl PlateMaterial {
    pub fn new(young: f64, poisson: f64, thickness: f64) -> Result<Self> {
        if !(young > 0.0) {
            return Err(Error::InvalidDomain(format!(
                "Young modulus must be positive, got {young}"
            )));
        }
        if !(0.0..0.5 - 1e-6).contains(&poisson) {
            return Err(Error::InvalidDomain(format!(
                "Poisson ratio must lie in [0, 0.5 - 1e-6), got {poisson}"
            )));
        }
        if !(thickness >= 0.0) {
            return Err(Error::NonPositiveThickness(thickness));
        }
        Ok(Self {
            young,
            poisson,
            shear_scale: 1.0,
            thickness,
        })
    }

    /// Bending stiffness factor `E / (12 (1 - nu^2))`.
    pub fn bending_factor(&self) -> f64 {
        self.young / (12.0 * (1.0 - self.poisson * self.poisson))
    }

    pub fn with_thickness(&self, thickness: f64) -> Self {
        Self { thickness, ..*self }
    }
}

impl Default for PlateMaterial {
    /// `E = 12`, `nu = 0.3`, `t = 1`.
    fn default() -> Self {
        Self::new(12.0, 0.3, 1.0).expect("valid default material")
    }
}

/// `C tau = E / (12 (1 - nu^2)) [(1 - nu) tau + nu tr(tau) I]`.
pub fn apply_c(tau: &Tensor2, mat: &PlateMaterial) -> Tensor2 {
    let d = mat.bending_factor();
    let nu = mat.poisson;
    let tr = tau[0][0] + tau[1][1];
    [
        [
            d * ((1.0 - nu) * tau[0][0] + nu * tr),
            d * (1.0 - nu) * tau[0][1],
        ],
        [
            d * (1.0 - nu) * tau[1][0],
            d * ((1.0 - nu) * tau[1][1] + nu * tr),
        ],
    ]
}

/// Symmetric part of a 2x2 gradient.
pub fn sym(g: &Tensor2) -> Tensor2 {
    let off = 0.5 * (g[0][1] + g[1][0]);
    [[g[0][0], off], [off, g[1][1]]]
}

pub fn ddot(a: &Tensor2, b: &Tensor2) -> f64 {
    a[0][0] * b[0][0] + a[0][1] * b[0][1] + a[1][0] * b[1][0] + a[1][1] * b[1][1]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &Tensor2, b: &Tensor2) -> bool {
        (0..2).all(|i| (0..2).all(|j| (a[i][j] - b[i][j]).abs() < 1e-14))
    }

    #[test]
    fn identity_law_for_e12_nu0() {
        let mat = PlateMaterial::new(12.0, 0.0, 1.0).unwrap();
        let tau = [[0.3, -1.2], [-1.2, 2.5]];
        assert!(close(&apply_c(&tau, &mat), &tau));
    }

    #[test]
    fn identity_tensor_scales_by_e_over_12_one_minus_nu() {
        let mat = PlateMaterial::new(7.0, 0.25, 1.0).unwrap();
        let s = 7.0 / (12.0 * 0.75);
        assert!(close(
            &apply_c(&[[1.0, 0.0], [0.0, 1.0]], &mat),
            &[[s, 0.0], [0.0, s]]
        ));
    }

    #[test]
    fn traceless_tensor_scales_by_e_over_12_one_plus_nu() {
        let mat = PlateMaterial::new(3.0, 0.4, 1.0).unwrap();
        let tau = [[1.5, 0.7], [0.7, -1.5]];
        let s = 3.0 / (12.0 * 1.4);
        let expect = [[s * 1.5, s * 0.7], [s * 0.7, -s * 1.5]];
        assert!(close(&apply_c(&tau, &mat), &expect));
    }

    #[test]
    fn rejects_incompressible_limit() {
        assert!(PlateMaterial::new(1.0, 0.5, 1.0).is_err());
        assert!(PlateMaterial::new(1.0, 0.3, -1.0).is_err());
    }
}
