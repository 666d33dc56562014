//! Least-squares polynomial fits used for derivative estimation.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// `p(x) = sum_j coeffs[j] * ((x - center) / scale)^j`
#[derive(Debug, Clone, PartialEq)]
pub struct PolyFit {
    pub center: f64,
    pub scale: f64,
    pub coeffs: Vec<f64>,
}

impl PolyFit {
    /// Fits a polynomial of `degree` by Householder QR on the scaled
    /// Vandermonde matrix.
    pub fn fit(x: &[f64], y: &[f64], degree: usize, center: f64, scale: f64) -> Result<Self> {
        let n = x.len();
        if n != y.len() {
            return Err(Error::InvalidInput("x and y lengths differ".into()));
        }
        if n < degree + 1 {
            return Err(Error::InvalidInput(format!(
                "{n} points cannot determine a degree {degree} polynomial"
            )));
        }
        let a = DMatrix::from_fn(n, degree + 1, |i, j| ((x[i] - center) / scale).powi(j as i32));
        let b = DVector::from_column_slice(y);
        let qr = a.qr();
        let qtb = qr.q().transpose() * b;
        let r = qr.r();
        let c = r
            .solve_upper_triangular(&qtb)
            .ok_or_else(|| Error::InvalidInput("singular least-squares system".into()))?;
        Ok(Self {
            center,
            scale,
            coeffs: c.iter().copied().collect(),
        })
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.derivative(x, 0)
    }

    /// `order`-th derivative at `x`.
    pub fn derivative(&self, x: f64, order: usize) -> f64 {
        let t = (x - self.center) / self.scale;
        let mut acc = 0.0;
        for (j, &c) in self.coeffs.iter().enumerate().skip(order).rev() {
            let mut fall = 1.0;
            for m in 0..order {
                fall *= (j - m) as f64;
            }
            acc = acc * t + c * fall;
        }
        acc / self.scale.powi(order as i32)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_polynomial_and_derivatives() {
        let x: Vec<f64> = (0..12).map(|i| 1.0 + 0.1 * i as f64).collect();
        let y: Vec<f64> = x.iter().map(|x| 2.0 - x + 0.5 * x.powi(3) - 0.1 * x.powi(4)).collect();
        let p = PolyFit::fit(&x, &y, 5, 1.5, 0.5).unwrap();
        let at = 1.3;
        assert!((p.eval(at) - (2.0 - at + 0.5 * at.powi(3) - 0.1 * at.powi(4))).abs() < 1e-12);
        assert!((p.derivative(at, 1) - (-1.0 + 1.5 * at * at - 0.4 * at.powi(3))).abs() < 1e-10);
        assert!((p.derivative(at, 3) - (3.0 - 2.4 * at)).abs() < 1e-8);
        assert!(p.derivative(at, 6).abs() < 1e-6);
    }

    #[test]
    fn too_few_points() {
        assert!(PolyFit::fit(&[0.0, 1.0], &[0.0, 1.0], 3, 0.0, 1.0).is_err());
    }
}
