//! Regression data with the centering convention used throughout the crate.
//!
//! The linear model is `y = 1*mu + X*alpha + eps` with every column of `X`
//! orthogonal to the unit vector. Centering makes the intercept independent
//! of the selected model and lets the likelihood split as
//!
//! ```text
//! ||y - 1*mu - X*alpha||^2 = N*(ybar - mu)^2 + ||y_c - X*alpha||^2
//! ```
//!
//! where `y_c = y - 1*ybar`. All sample variances use the divisor `N`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Relative tolerance for the column-sum check, scaled by `N`.
const CENTERING_TOL: f64 = 1e-10;

/// Response and centered design matrix with cached column statistics.
#[derive(Debug, Clone)]
pub struct Dataset {
    y: DVector<f64>,
    x: DMatrix<f64>,
    y_bar: f64,
    y_c: DVector<f64>,
    col_var: Vec<f64>,
    s_y2: f64,
    gram: DMatrix<f64>,
    xty: DVector<f64>,
}

impl Dataset {
    /// Builds a dataset from raw inputs, centering the design columns when
    /// `center` is set. With `center` unset the columns must already sum to
    /// zero within `1e-10 * N`; the residual means are still removed so the
    /// invariant holds exactly.
    pub fn load(raw_y: &[f64], raw_x: &DMatrix<f64>, center: bool) -> Result<Self> {
        let n = raw_x.nrows();
        let d = raw_x.ncols();
        if n != raw_y.len() {
            return Err(Error::DimensionMismatch {
                x_rows: n,
                y_len: raw_y.len(),
            });
        }
        if n < 2 || d < 1 {
            return Err(Error::TooSmall { n, d });
        }

        let tol = CENTERING_TOL * n as f64;
        let mut x = raw_x.clone();
        for j in 0..d {
            let sum: f64 = x.column(j).sum();
            if !center && sum.abs() > tol {
                return Err(Error::NotCentered {
                    column: j,
                    sum: sum.abs(),
                    tol,
                });
            }
            let mean = sum / n as f64;
            for i in 0..n {
                x[(i, j)] -= mean;
            }
        }

        // Zero-variance detection is relative to the raw column scale so a
        // constant column is rejected regardless of its magnitude.
        let mut col_var = Vec::with_capacity(d);
        for j in 0..d {
            let ssq: f64 = x.column(j).iter().map(|v| v * v).sum();
            let raw_msq: f64 =
                raw_x.column(j).iter().map(|v| v * v).sum::<f64>() / n as f64;
            let var = ssq / n as f64;
            if var <= 1e-14 * raw_msq.max(f64::MIN_POSITIVE) {
                return Err(Error::ZeroVarianceColumn { column: j });
            }
            col_var.push(var);
        }

        let y = DVector::from_column_slice(raw_y);
        let y_bar = y.sum() / n as f64;
        let y_c = y.map(|v| v - y_bar);
        let s_y2 = y_c.dot(&y_c) / n as f64;

        let gram = x.transpose() * &x;
        let xty = x.transpose() * &y_c;

        Ok(Self {
            y,
            x,
            y_bar,
            y_c,
            col_var,
            s_y2,
            gram,
            xty,
        })
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn d(&self) -> usize {
        self.x.ncols()
    }

    /// Original response vector.
    pub fn y(&self) -> &DVector<f64> {
        &self.y
    }

    /// Centered design matrix.
    pub fn x(&self) -> &DMatrix<f64> {
        &self.x
    }

    pub fn y_bar(&self) -> f64 {
        self.y_bar
    }

    /// Centered response `y - 1*ybar`.
    pub fn y_c(&self) -> &DVector<f64> {
        &self.y_c
    }

    /// Per-column sample variance `s_j^2 = x_j'x_j / N`.
    pub fn col_var(&self) -> &[f64] {
        &self.col_var
    }

    /// Sample variance of the response, `y_c'y_c / N`.
    pub fn s_y2(&self) -> f64 {
        self.s_y2
    }

    /// `y_c'y_c`.
    pub fn yty(&self) -> f64 {
        self.s_y2 * self.n() as f64
    }

    /// Cached Gram matrix `X'X`.
    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    /// Cached `X'y_c`.
    pub fn xty(&self) -> &DVector<f64> {
        &self.xty
    }

    /// Gram submatrix for the given column indices.
    pub fn gram_submatrix(&self, idx: &[usize]) -> DMatrix<f64> {
        let k = idx.len();
        DMatrix::from_fn(k, k, |r, c| self.gram[(idx[r], idx[c])])
    }

    /// Subvector of `X'y_c` for the given column indices.
    pub fn xty_subvector(&self, idx: &[usize]) -> DVector<f64> {
        DVector::from_fn(idx.len(), |r, _| self.xty[idx[r]])
    }
}
