//! Ordinary least squares with intercept over a subset of descriptor columns.
//!
//! The design matrix is factored with Householder QR. Columns are always
//! factored in ascending index order, so the same subset given in any order
//! yields bit-identical fit statistics.

use thiserror::Error;

use crate::dataset::Dataset;

/// Relative cutoff on |R_jj| against the largest design column norm.
pub const RANK_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RegressError {
    #[error("design matrix is rank deficient (column {column} of the sorted design)")]
    RankDeficient { column: usize },
    #[error("bad descriptor indices: {0}")]
    BadIndices(String),
    #[error("{rows} rows cannot support {params} parameters")]
    TooFewRows { rows: usize, params: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegressionModel {
    /// Descriptor indices in the order the caller supplied them.
    pub indices: Vec<usize>,
    /// Intercept first, then one coefficient per entry of `indices`.
    pub coefficients: Vec<f64>,
    /// Determination coefficient, clamped to [0, 1].
    pub r2: f64,
    pub residual_ss: f64,
    pub total_ss: f64,
}

impl RegressionModel {
    pub fn predict_row(&self, data: &Dataset, row: usize) -> f64 {
        self.coefficients[0]
            + self
                .indices
                .iter()
                .zip(&self.coefficients[1..])
                .map(|(&c, &b)| b * data.value(row, c))
                .sum::<f64>()
    }
}

fn check_indices(data: &Dataset, indices: &[usize]) -> Result<(), RegressError> {
    if indices.is_empty() {
        return Err(RegressError::BadIndices("empty subset".into()));
    }
    let m = data.n_descriptors();
    if let Some(&bad) = indices.iter().find(|&&i| i >= m) {
        return Err(RegressError::BadIndices(format!(
            "index {bad} out of range for {m} descriptors"
        )));
    }
    let mut sorted = indices.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(RegressError::BadIndices(format!(
            "repeated index in {indices:?}"
        )));
    }
    let params = indices.len() + 1;
    if data.n_rows() < params {
        return Err(RegressError::TooFewRows {
            rows: data.n_rows(),
            params,
        });
    }
    Ok(())
}

/// Householder factorization of the intercept-augmented design.
struct Qr {
    rows: usize,
    cols: usize,
    /// Column-major; upper triangle holds R after factoring.
    a: Vec<f64>,
    /// Householder vectors, one per column, each of length `rows - j`.
    reflectors: Vec<Vec<f64>>,
}

impl Qr {
    fn factor(data: &Dataset, sorted: &[usize]) -> Result<Self, RegressError> {
        let rows = data.n_rows();
        let cols = sorted.len() + 1;
        let mut a = vec![1.0; rows * cols];
        for (j, &c) in sorted.iter().enumerate() {
            for r in 0..rows {
                a[(j + 1) * rows + r] = data.value(r, c);
            }
        }
        let largest = (0..cols)
            .map(|j| norm(&a[j * rows..(j + 1) * rows]))
            .fold(0.0, f64::max);
        let cutoff = RANK_TOLERANCE * largest;

        let mut reflectors = Vec::with_capacity(cols);
        for j in 0..cols {
            let x = &a[j * rows + j..(j + 1) * rows];
            let nx = norm(x);
            if nx <= cutoff {
                return Err(RegressError::RankDeficient { column: j });
            }
            let alpha = if x[0] > 0.0 { -nx } else { nx };
            let mut v = x.to_vec();
            v[0] -= alpha;
            let vtv: f64 = v.iter().map(|t| t * t).sum();
            for jj in j..cols {
                let col = &mut a[jj * rows + j..(jj + 1) * rows];
                reflect(&v, vtv, col);
            }
            reflectors.push(v);
        }
        Ok(Self {
            rows,
            cols,
            a,
            reflectors,
        })
    }

    fn apply_qt(&self, y: &mut [f64]) {
        for (j, v) in self.reflectors.iter().enumerate() {
            let vtv: f64 = v.iter().map(|t| t * t).sum();
            reflect(v, vtv, &mut y[j..]);
        }
    }

    fn apply_q(&self, y: &mut [f64]) {
        for (j, v) in self.reflectors.iter().enumerate().rev() {
            let vtv: f64 = v.iter().map(|t| t * t).sum();
            reflect(v, vtv, &mut y[j..]);
        }
    }

    /// Back substitution R b = z for the leading `cols` entries of `z`.
    fn solve_r(&self, z: &[f64]) -> Vec<f64> {
        let (n, p) = (self.rows, self.cols);
        let mut b = vec![0.0; p];
        for i in (0..p).rev() {
            let mut s = z[i];
            for j in i + 1..p {
                s -= self.a[j * n + i] * b[j];
            }
            b[i] = s / self.a[i * n + i];
        }
        b
    }

    /// Diagonal of the hat matrix: squared row norms of the thin Q.
    fn leverages(&self) -> Vec<f64> {
        let mut h = vec![0.0; self.rows];
        let mut e = vec![0.0; self.rows];
        for j in 0..self.cols {
            e.iter_mut().for_each(|t| *t = 0.0);
            e[j] = 1.0;
            self.apply_q(&mut e);
            for (hi, qi) in h.iter_mut().zip(&e) {
                *hi += qi * qi;
            }
        }
        h
    }
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|t| t * t).sum::<f64>().sqrt()
}

fn reflect(v: &[f64], vtv: f64, x: &mut [f64]) {
    let dot: f64 = v.iter().zip(x.iter()).map(|(a, b)| a * b).sum();
    let s = 2.0 * dot / vtv;
    for (xi, vi) in x.iter_mut().zip(v) {
        *xi -= s * vi;
    }
}

fn total_ss(y: &[f64]) -> f64 {
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    y.iter().map(|v| (v - mean) * (v - mean)).sum()
}

/// Sorted copy of `indices` plus, for each sorted position, where it came
/// from in the caller's order.
fn sorted_with_origin(indices: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let mut order: Vec<usize> = (0..indices.len()).collect();
    order.sort_unstable_by_key(|&i| indices[i]);
    (order.iter().map(|&i| indices[i]).collect(), order)
}

/// Fits `y = b0 + Σ b_i x_{indices[i]}` by least squares.
pub fn fit_mlr(data: &Dataset, indices: &[usize]) -> Result<RegressionModel, RegressError> {
    check_indices(data, indices)?;
    let (sorted, origin) = sorted_with_origin(indices);
    let qr = Qr::factor(data, &sorted)?;
    let mut z = data.property().to_vec();
    qr.apply_qt(&mut z);
    let b_sorted = qr.solve_r(&z);
    let residual_ss: f64 = z[qr.cols..].iter().map(|t| t * t).sum();
    let total_ss = total_ss(data.property());

    let mut coefficients = vec![0.0; indices.len() + 1];
    coefficients[0] = b_sorted[0];
    for (pos, &from) in origin.iter().enumerate() {
        coefficients[from + 1] = b_sorted[pos + 1];
    }
    let r2 = (1.0 - residual_ss / total_ss).clamp(0.0, 1.0);
    Ok(RegressionModel {
        indices: indices.to_vec(),
        coefficients,
        r2,
        residual_ss,
        total_ss,
    })
}

/// Leave-one-out predictive determination coefficient `1 − PRESS/TSS`.
///
/// Reported alongside r² but never used as fitness. Returns `None` when some
/// observation has leverage numerically equal to 1 (its deleted residual is
/// undefined).
pub fn loo_q2(data: &Dataset, indices: &[usize]) -> Result<Option<f64>, RegressError> {
    check_indices(data, indices)?;
    let (sorted, _) = sorted_with_origin(indices);
    let qr = Qr::factor(data, &sorted)?;
    let mut z = data.property().to_vec();
    qr.apply_qt(&mut z);
    // Residual vector = Q [0; z_tail].
    z[..qr.cols].iter_mut().for_each(|t| *t = 0.0);
    qr.apply_q(&mut z);
    let mut press = 0.0;
    for (e, h) in z.iter().zip(qr.leverages()) {
        let denom = 1.0 - h;
        if denom <= 1e-12 {
            return Ok(None);
        }
        press += (e / denom).powi(2);
    }
    Ok(Some(1.0 - press / total_ss(data.property())))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn data(cols: &[&[f64]], y: &[f64]) -> Dataset {
        let n = y.len();
        let m = cols.len();
        let mut cells = vec![0.0; n * m];
        for (j, c) in cols.iter().enumerate() {
            for r in 0..n {
                cells[r * m + j] = c[r];
            }
        }
        Dataset::new(
            (0..n).map(|i| i.to_string()).collect(),
            (0..m).map(|j| format!("x{j}")).collect(),
            cells,
            y.to_vec(),
        )
        .unwrap()
    }

    #[test]
    fn exact_line() {
        let d = data(&[&[1.0, 2.0, 3.0], &[0.0, 1.0, 0.0]], &[2.0, 4.0, 6.0]);
        let m = fit_mlr(&d, &[0]).unwrap();
        assert!(m.coefficients[0].abs() < 1e-12);
        assert!((m.coefficients[1] - 2.0).abs() < 1e-12);
        assert_eq!(m.r2, 1.0);
    }

    #[test]
    fn constant_column_is_rank_deficient() {
        let d = data(&[&[3.0, 3.0, 3.0, 3.0], &[0.0, 1.0, 0.0, 2.0]], &[1.0, 2.0, 3.0, 5.0]);
        assert!(matches!(
            fit_mlr(&d, &[0]),
            Err(RegressError::RankDeficient { .. })
        ));
        assert!(matches!(
            fit_mlr(&d, &[1, 0]),
            Err(RegressError::RankDeficient { .. })
        ));
    }

    #[test]
    fn duplicated_column_is_rank_deficient() {
        let x = [0.5, 1.5, 2.0, 7.0, 3.0];
        let d = data(&[&x, &x], &[1.0, 2.0, 3.0, 5.0, 4.0]);
        assert!(matches!(
            fit_mlr(&d, &[0, 1]),
            Err(RegressError::RankDeficient { .. })
        ));
    }

    #[test]
    fn bad_indices() {
        let d = data(&[&[1.0, 2.0, 4.0], &[0.0, 1.0, 0.0]], &[2.0, 4.0, 6.0]);
        assert!(matches!(fit_mlr(&d, &[2]), Err(RegressError::BadIndices(_))));
        assert!(matches!(fit_mlr(&d, &[0, 0]), Err(RegressError::BadIndices(_))));
        assert!(matches!(fit_mlr(&d, &[]), Err(RegressError::BadIndices(_))));
    }

    #[test]
    fn five_point_fixture() {
        // Exact rational solution: b = (87/100, 99/100, 17/60), r² = 7423/7431.
        let d = data(
            &[&[0.0, 1.0, 2.0, 3.0, 4.0], &[1.0, 0.0, 1.0, 0.0, 1.0]],
            &[1.1, 1.9, 3.2, 3.8, 5.1],
        );
        let m = fit_mlr(&d, &[0, 1]).unwrap();
        assert!((m.r2 - 7423.0 / 7431.0).abs() < 1e-12);
        for (b, want) in m.coefficients.iter().zip([0.87, 0.99, 17.0 / 60.0]) {
            assert!((b - want).abs() < 1e-12);
        }
        let swapped = fit_mlr(&d, &[1, 0]).unwrap();
        assert_eq!(swapped.r2, m.r2);
        assert_eq!(swapped.coefficients[1], m.coefficients[2]);
    }

    #[test]
    fn q2_matches_explicit_leave_one_out() {
        let x1 = [0.0, 1.0, 2.0, 3.0, 4.0, 5.5];
        let x2 = [1.0, 0.0, 1.0, 0.0, 1.0, 0.3];
        let y = [1.1, 1.9, 3.2, 3.8, 5.1, 6.4];
        let d = data(&[&x1, &x2], &y);
        let q2 = loo_q2(&d, &[0, 1]).unwrap().unwrap();

        let mean = y.iter().sum::<f64>() / 6.0;
        let tss: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
        let mut press = 0.0;
        for out in 0..6 {
            let keep: Vec<usize> = (0..6).filter(|&i| i != out).collect();
            let sub = data(
                &[
                    &keep.iter().map(|&i| x1[i]).collect::<Vec<_>>(),
                    &keep.iter().map(|&i| x2[i]).collect::<Vec<_>>(),
                ],
                &keep.iter().map(|&i| y[i]).collect::<Vec<_>>(),
            );
            let m = fit_mlr(&sub, &[0, 1]).unwrap();
            let pred = m.coefficients[0] + m.coefficients[1] * x1[out] + m.coefficients[2] * x2[out];
            press += (y[out] - pred).powi(2);
        }
        assert!((q2 - (1.0 - press / tss)).abs() < 1e-10);
    }

    #[test]
    fn saturated_design_fits_exactly() {
        let d = data(&[&[0.0, 1.0, 2.0], &[1.0, 0.0, 5.0]], &[3.0, -1.0, 2.0]);
        let m = fit_mlr(&d, &[0, 1]).unwrap();
        assert!((m.r2 - 1.0).abs() < 1e-9);
        assert_eq!(loo_q2(&d, &[0, 1]).unwrap(), None);
    }
}
