//! Natural cubic spline interpolation over uniformly spaced knots on [0, 1].
//!
//! Each data sample's D discrete features become one C2-continuous function:
//! knot j sits at j/(D-1), so a position s in (0, 1) indexes the feature axis
//! directly (s = 0 is feature 1, s = 1 is feature D). Both the value and the
//! analytic first derivative are exposed, which is what lets index parameters
//! receive gradients during training.
//!
//! Boundary conditions are natural (zero second derivative at both ends) and
//! evaluation outside [0, 1] clamps to the boundary value with zero
//! derivative, so learned positions cannot escape the feature axis.

use crate::dataset::Dataset;
use crate::error::{Error, Result};

/// Natural cubic spline through `(j/(D-1), values[j])` for `j = 0..D-1`.
///
/// Knot positions are implied by the uniform grid and shared by every spline
/// fitted from the same dataset; only knot values and the second-derivative
/// moments are stored. Moments at both endpoints are exactly zero.
#[derive(Debug, Clone)]
pub struct CubicSpline {
    values: Vec<f64>,
    /// Second derivatives at the knots; endpoints are 0 (natural boundary).
    moments: Vec<f64>,
    /// Knot spacing 1/(D-1).
    h: f64,
}

impl CubicSpline {
    /// Number of knots (the original feature count D).
    pub fn num_knots(&self) -> usize {
        self.values.len()
    }

    /// Knot position for index `j`, i.e. `j/(D-1)`.
    pub fn knot_position(&self, j: usize) -> f64 {
        j as f64 * self.h
    }

    /// Values at the knots.
    pub fn knot_values(&self) -> &[f64] {
        &self.values
    }

    /// Second-derivative moments at the knots.
    pub fn second_derivatives(&self) -> &[f64] {
        &self.moments
    }
}

/// Fit a natural cubic spline to `values` placed on the uniform grid
/// `j/(D-1)`. With two points this degrades to the linear interpolant.
pub fn fit_natural_cubic(values: &[f64]) -> Result<CubicSpline> {
    let d = values.len();
    if d < 2 {
        return Err(Error::Data(format!(
            "need at least 2 values to interpolate, got {d}"
        )));
    }
    if let Some(j) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::Data(format!("non-finite value at knot {j}")));
    }
    let h = 1.0 / (d - 1) as f64;
    let mut moments = vec![0.0; d];
    if d > 2 {
        // Interior moments solve M[j-1] + 4 M[j] + M[j+1] = 6 (y[j+1] - 2 y[j] + y[j-1]) / h^2
        // with M[0] = M[d-1] = 0; Thomas algorithm on the tridiagonal system.
        let n = d - 2;
        let mut diag = vec![4.0; n];
        let mut rhs = vec![0.0; n];
        for i in 0..n {
            let j = i + 1;
            rhs[i] = 6.0 * (values[j + 1] - 2.0 * values[j] + values[j - 1]) / (h * h);
        }
        for i in 1..n {
            let w = 1.0 / diag[i - 1];
            diag[i] -= w;
            rhs[i] -= w * rhs[i - 1];
        }
        moments[n] = rhs[n - 1] / diag[n - 1];
        for i in (0..n - 1).rev() {
            moments[i + 1] = (rhs[i] - moments[i + 2]) / diag[i];
        }
    }
    Ok(CubicSpline {
        values: values.to_vec(),
        moments,
        h,
    })
}

impl CubicSpline {
    #[inline]
    fn segment(&self, x: f64) -> usize {
        let d = self.values.len();
        ((x / self.h) as usize).min(d - 2)
    }

    /// Evaluate the spline at `x`. Values outside [0, 1] clamp to the
    /// boundary. Exact at knots.
    pub fn eval(&self, x: f64) -> f64 {
        let x = x.clamp(0.0, 1.0);
        let j = self.segment(x);
        let h = self.h;
        let xl = j as f64 * h;
        let xr = (j + 1) as f64 * h;
        let a = xr - x;
        let b = x - xl;
        let (ml, mr) = (self.moments[j], self.moments[j + 1]);
        let (yl, yr) = (self.values[j], self.values[j + 1]);
        ml * a * a * a / (6.0 * h)
            + mr * b * b * b / (6.0 * h)
            + (yl / h - ml * h / 6.0) * a
            + (yr / h - mr * h / 6.0) * b
    }

    /// Analytic first derivative at `x`. Zero outside [0, 1] (the clamped
    /// extension is constant there).
    pub fn eval_deriv(&self, x: f64) -> f64 {
        if !(0.0..=1.0).contains(&x) {
            return 0.0;
        }
        let j = self.segment(x);
        let h = self.h;
        let xl = j as f64 * h;
        let xr = (j + 1) as f64 * h;
        let a = xr - x;
        let b = x - xl;
        let (ml, mr) = (self.moments[j], self.moments[j + 1]);
        let (yl, yr) = (self.values[j], self.values[j + 1]);
        -ml * a * a / (2.0 * h) + mr * b * b / (2.0 * h) + (yr - yl) / h - (mr - ml) * h / 6.0
    }

    /// Analytic second derivative at `x` (linear between moments).
    pub fn eval_second_deriv(&self, x: f64) -> f64 {
        if !(0.0..=1.0).contains(&x) {
            return 0.0;
        }
        let j = self.segment(x);
        let h = self.h;
        let a = (j + 1) as f64 * h - x;
        let b = x - j as f64 * h;
        (self.moments[j] * a + self.moments[j + 1] * b) / h
    }
}

/// One spline per sample, all sharing the same uniform knot grid.
#[derive(Debug, Clone)]
pub struct ContinuousDataset {
    splines: Vec<CubicSpline>,
    num_samples: usize,
    num_features: usize,
}

impl ContinuousDataset {
    pub fn splines(&self) -> &[CubicSpline] {
        &self.splines
    }

    pub fn spline(&self, i: usize) -> &CubicSpline {
        &self.splines[i]
    }

    pub fn num_samples(&self) -> usize {
        self.num_samples
    }

    pub fn num_features(&self) -> usize {
        self.num_features
    }
}

/// Fit one natural cubic spline per sample of `dataset`.
pub fn relax_dataset(dataset: &Dataset) -> Result<ContinuousDataset> {
    let mut splines = Vec::with_capacity(dataset.num_samples());
    for i in 0..dataset.num_samples() {
        splines.push(fit_natural_cubic(dataset.features().row(i))?);
    }
    Ok(ContinuousDataset {
        splines,
        num_samples: dataset.num_samples(),
        num_features: dataset.num_features(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    /// Independent textbook oracle: sets up the full dense moment system for
    /// a natural cubic spline on uniform knots and solves it by Gaussian
    /// elimination, then evaluates via the moment form. Shares no code with
    /// the production path.
    mod oracle {
        pub struct NaturalSpline {
            pub xs: Vec<f64>,
            pub ys: Vec<f64>,
            pub ms: Vec<f64>,
        }

        pub fn fit(ys: &[f64]) -> NaturalSpline {
            let d = ys.len();
            let xs: Vec<f64> = (0..d).map(|j| j as f64 / (d - 1) as f64).collect();
            // Dense (d x d) system A m = b with natural rows at the ends.
            let mut a = vec![vec![0.0; d]; d];
            let mut b = vec![0.0; d];
            a[0][0] = 1.0;
            a[d - 1][d - 1] = 1.0;
            for j in 1..d - 1 {
                let h0 = xs[j] - xs[j - 1];
                let h1 = xs[j + 1] - xs[j];
                a[j][j - 1] = h0 / 6.0;
                a[j][j] = (h0 + h1) / 3.0;
                a[j][j + 1] = h1 / 6.0;
                b[j] = (ys[j + 1] - ys[j]) / h1 - (ys[j] - ys[j - 1]) / h0;
            }
            // Gaussian elimination with partial pivoting.
            for col in 0..d {
                let pivot = (col..d)
                    .max_by(|&r1, &r2| a[r1][col].abs().total_cmp(&a[r2][col].abs()))
                    .unwrap();
                a.swap(col, pivot);
                b.swap(col, pivot);
                for row in col + 1..d {
                    let f = a[row][col] / a[col][col];
                    for k in col..d {
                        a[row][k] -= f * a[col][k];
                    }
                    b[row] -= f * b[col];
                }
            }
            let mut ms = vec![0.0; d];
            for row in (0..d).rev() {
                let mut s = b[row];
                for k in row + 1..d {
                    s -= a[row][k] * ms[k];
                }
                ms[row] = s / a[row][row];
            }
            NaturalSpline {
                xs,
                ys: ys.to_vec(),
                ms,
            }
        }

        impl NaturalSpline {
            pub fn eval(&self, x: f64) -> f64 {
                let d = self.xs.len();
                let mut j = d - 2;
                for k in 0..d - 1 {
                    if x <= self.xs[k + 1] {
                        j = k;
                        break;
                    }
                }
                let h = self.xs[j + 1] - self.xs[j];
                let a = self.xs[j + 1] - x;
                let b = x - self.xs[j];
                self.ms[j] * a * a * a / (6.0 * h)
                    + self.ms[j + 1] * b * b * b / (6.0 * h)
                    + (self.ys[j] - self.ms[j] * h * h / 6.0) * (a / h)
                    + (self.ys[j + 1] - self.ms[j + 1] * h * h / 6.0) * (b / h)
            }
        }
    }

    #[test]
    fn interpolates_knots_exactly() {
        let s = fit_natural_cubic(&[0.0, 1.0, 0.0]).unwrap();
        assert_eq!(s.eval(0.0), 0.0);
        assert!((s.eval(0.5) - 1.0).abs() < 1e-12);
        assert!(s.eval(1.0).abs() < 1e-12);
    }

    #[test]
    fn reproduces_affine_data() {
        let s = fit_natural_cubic(&[0.0, 0.5, 1.0]).unwrap();
        let mut x = 0.0;
        while x <= 1.0 {
            assert!((s.eval(x) - x).abs() < 1e-12, "deviation at x={x}");
            x += 1e-3;
        }
    }

    #[test]
    fn matches_independent_oracle() {
        let values = [0.0, 1.0, 0.0];
        let s = fit_natural_cubic(&values).unwrap();
        let o = oracle::fit(&values);
        for &x in &[0.25, 0.37, 0.1, 0.62, 0.9] {
            assert!(
                (s.eval(x) - o.eval(x)).abs() < 1e-10,
                "mismatch at x={x}: {} vs {}",
                s.eval(x),
                o.eval(x)
            );
        }
    }

    #[test]
    fn matches_oracle_on_random_data() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for d in [4usize, 7, 16, 33] {
            let values: Vec<f64> = (0..d).map(|_| rng.random_range(-2.0..2.0)).collect();
            let s = fit_natural_cubic(&values).unwrap();
            let o = oracle::fit(&values);
            for _ in 0..50 {
                let x: f64 = rng.random();
                assert!(
                    (s.eval(x) - o.eval(x)).abs() < 1e-10,
                    "d={d} mismatch at x={x}"
                );
            }
        }
    }

    #[test]
    fn two_point_fit_is_linear() {
        let s = fit_natural_cubic(&[1.0, 3.0]).unwrap();
        assert!((s.eval(0.5) - 2.0).abs() < 1e-12);
        assert!((s.eval_deriv(0.25) - 2.0).abs() < 1e-12);
        assert_eq!(s.second_derivatives(), &[0.0, 0.0]);
    }

    #[test]
    fn rejects_degenerate_input() {
        assert!(fit_natural_cubic(&[1.0]).is_err());
        assert!(fit_natural_cubic(&[1.0, f64::NAN, 0.0]).is_err());
    }

    #[test]
    fn clamps_outside_domain() {
        let s = fit_natural_cubic(&[0.0, 1.0, 0.5]).unwrap();
        assert_eq!(s.eval(1.2), s.eval(1.0));
        assert_eq!(s.eval(-0.3), s.eval(0.0));
        assert_eq!(s.eval_deriv(1.2), 0.0);
        assert_eq!(s.eval_deriv(-0.3), 0.0);
    }

    #[test]
    fn derivative_matches_central_difference() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let values: Vec<f64> = (0..12).map(|_| rng.random_range(-1.0..1.0)).collect();
        let s = fit_natural_cubic(&values).unwrap();
        let h = 1e-6;
        for _ in 0..100 {
            let x: f64 = rng.random_range(0.01..0.99);
            let fd = (s.eval(x + h) - s.eval(x - h)) / (2.0 * h);
            let an = s.eval_deriv(x);
            let rel = (an - fd).abs() / an.abs().max(1.0);
            assert!(rel < 1e-5, "x={x} analytic={an} fd={fd}");
        }
    }

    #[test]
    fn affine_derivative_is_constant() {
        let s = fit_natural_cubic(&[0.0, 0.5, 1.0]).unwrap();
        for &x in &[0.0, 0.2, 0.5, 0.77, 1.0] {
            assert!((s.eval_deriv(x) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn c1_continuity_at_interior_knots() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let values: Vec<f64> = (0..10).map(|_| rng.random_range(-1.0..1.0)).collect();
        let s = fit_natural_cubic(&values).unwrap();
        let d = values.len();
        let h = 1.0 / (d - 1) as f64;
        // One-sided derivatives computed from the segment formulas on either
        // side of each interior knot.
        for j in 1..d - 1 {
            let (yl, yj, yr) = (values[j - 1], values[j], values[j + 1]);
            let (ml, mj, mr) = (
                s.second_derivatives()[j - 1],
                s.second_derivatives()[j],
                s.second_derivatives()[j + 1],
            );
            let left = mj * h / 2.0 + (yj - yl) / h - (mj - ml) * h / 6.0;
            let right = -mj * h / 2.0 + (yr - yj) / h - (mr - mj) * h / 6.0;
            assert!(
                (left - right).abs() < 1e-9,
                "knot {j}: left={left} right={right}"
            );
        }
    }

    #[test]
    fn natural_boundary_moments_are_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        let values: Vec<f64> = (0..9).map(|_| rng.random_range(-1.0..1.0)).collect();
        let s = fit_natural_cubic(&values).unwrap();
        let d = values.len();
        assert_eq!(s.second_derivatives()[0], 0.0);
        assert_eq!(s.second_derivatives()[d - 1], 0.0);
        assert_eq!(s.eval_second_deriv(0.0), 0.0);
        // A one-sided second finite difference carries an O(h') bias of
        // h' * |S'''|, so it converges to zero linearly rather than hitting
        // machine precision; check the trend at a step where the bias bound
        // is known.
        let max_m = s
            .second_derivatives()
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()));
        let sppp_bound = 2.0 * max_m / (1.0 / (d - 1) as f64);
        for hp in [1e-3, 1e-4, 1e-5] {
            let fd0 = (s.eval(2.0 * hp) - 2.0 * s.eval(hp) + s.eval(0.0)) / (hp * hp);
            let fd1 = (s.eval(1.0) - 2.0 * s.eval(1.0 - hp) + s.eval(1.0 - 2.0 * hp)) / (hp * hp);
            assert!(
                fd0.abs() <= 2.0 * hp * sppp_bound + 1e-6,
                "hp={hp} fd0={fd0}"
            );
            assert!(
                fd1.abs() <= 2.0 * hp * sppp_bound + 1e-6,
                "hp={hp} fd1={fd1}"
            );
        }
    }

    #[test]
    fn second_derivative_is_piecewise_linear_in_moments() {
        let s = fit_natural_cubic(&[0.0, 1.0, 0.0, 0.5]).unwrap();
        for (j, &m) in s.second_derivatives().iter().enumerate() {
            let x = s.knot_position(j);
            assert!((s.eval_second_deriv(x) - m).abs() < 1e-9);
        }
    }
}
