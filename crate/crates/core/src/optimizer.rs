//! Data optimizer: covariance, eigendecomposition and projection onto the
//! leading principal components.
//!
//! The eigensolver is the cyclic Jacobi rotation method. Dimensions here
//! are small (a few dozen features), where Jacobi is simple, provably
//! convergent and deterministic: fixed sweep order, fixed sign convention,
//! so refitting on identical input reproduces the model bit for bit.

use crate::error::{Error, Result};
use crate::scalar::{self, Scalar};

/// Sample covariance (divisor N - 1) of row-major data. The upper triangle
/// is computed and mirrored, so the result is exactly symmetric.
pub fn covariance<F: Scalar>(data: &[Vec<F>]) -> Result<Vec<Vec<F>>> {
    let n = check_matrix(data, 2)?;
    let rows = scalar::from_usize::<F>(data.len());
    let mut mean = vec![F::zero(); n];
    for row in data {
        for (m, v) in mean.iter_mut().zip(row) {
            *m = *m + *v;
        }
    }
    for m in &mut mean {
        *m = *m / rows;
    }

    let divisor = scalar::from_usize::<F>(data.len() - 1);
    let mut cov = vec![vec![F::zero(); n]; n];
    for i in 0..n {
        for j in i..n {
            let mut acc = F::zero();
            for row in data {
                acc = acc + (row[i] - mean[i]) * (row[j] - mean[j]);
            }
            let c = acc / divisor;
            cov[i][j] = c;
            cov[j][i] = c;
        }
    }
    Ok(cov)
}

/// All eigenpairs of a symmetric matrix, sorted by eigenvalue descending
/// (ties keep the pre-sort order). Eigenvectors are unit norm with their
/// largest-magnitude entry positive.
pub fn eigen_decompose<F: Scalar>(m: &[Vec<F>]) -> Result<Vec<(F, Vec<F>)>> {
    let n = check_matrix(m, 1)?;
    if m.len() != n {
        return Err(Error::DimensionMismatch {
            expected: m.len(),
            got: n,
        });
    }
    let sym_tol = F::symmetry_tolerance();
    for i in 0..n {
        for j in (i + 1)..n {
            let delta = (m[i][j] - m[j][i]).abs();
            if delta > sym_tol {
                return Err(Error::Asymmetric {
                    i,
                    j,
                    delta: scalar::to_f64(delta),
                });
            }
        }
    }

    let mut a: Vec<Vec<F>> = m.to_vec();
    let mut v = identity::<F>(n);
    let tol = F::jacobi_tolerance();
    const MAX_SWEEPS: usize = 100;

    let mut converged = n < 2;
    let mut sweeps = 0;
    while !converged && sweeps < MAX_SWEEPS {
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
        sweeps += 1;
        converged = max_offdiag(&a) < tol;
    }
    if !converged {
        return Err(Error::NoConvergence {
            sweeps,
            residual: scalar::to_f64(max_offdiag(&a)),
        });
    }

    let mut pairs: Vec<(F, Vec<F>)> = (0..n)
        .map(|k| {
            let mut vec: Vec<F> = (0..n).map(|row| v[row][k]).collect();
            fix_sign(&mut vec);
            (a[k][k], vec)
        })
        .collect();
    pairs.sort_by(|x, y| y.0.partial_cmp(&x.0).expect("finite eigenvalues"));
    Ok(pairs)
}

/// One Jacobi rotation annihilating a[p][q], accumulated into v.
fn rotate<F: Scalar>(a: &mut [Vec<F>], v: &mut [Vec<F>], p: usize, q: usize) {
    let apq = a[p][q];
    if apq == F::zero() {
        return;
    }
    let two = scalar::from_f64::<F>(2.0);
    let theta = (a[q][q] - a[p][p]) / (two * apq);
    let t = {
        let root = (theta * theta + F::one()).sqrt();
        if theta >= F::zero() {
            F::one() / (theta + root)
        } else {
            F::one() / (theta - root)
        }
    };
    let c = F::one() / (t * t + F::one()).sqrt();
    let s = t * c;

    let n = a.len();
    let app = a[p][p];
    let aqq = a[q][q];
    a[p][p] = app - t * apq;
    a[q][q] = aqq + t * apq;
    a[p][q] = F::zero();
    a[q][p] = F::zero();
    for k in 0..n {
        if k != p && k != q {
            let akp = a[k][p];
            let akq = a[k][q];
            a[k][p] = c * akp - s * akq;
            a[p][k] = a[k][p];
            a[k][q] = s * akp + c * akq;
            a[q][k] = a[k][q];
        }
    }
    for row in v.iter_mut() {
        let vp = row[p];
        let vq = row[q];
        row[p] = c * vp - s * vq;
        row[q] = s * vp + c * vq;
    }
}

fn identity<F: Scalar>(n: usize) -> Vec<Vec<F>> {
    let mut v = vec![vec![F::zero(); n]; n];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = F::one();
    }
    v
}

fn max_offdiag<F: Scalar>(a: &[Vec<F>]) -> F {
    let n = a.len();
    let mut max = F::zero();
    for i in 0..n {
        for j in (i + 1)..n {
            if a[i][j].abs() > max {
                max = a[i][j].abs();
            }
        }
    }
    max
}

/// Flips the vector so its largest-magnitude entry is positive (first such
/// entry on ties).
fn fix_sign<F: Scalar>(v: &mut [F]) {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v[best] < F::zero() {
        for x in v.iter_mut() {
            *x = -*x;
        }
    }
}

fn check_matrix<F: Scalar>(data: &[Vec<F>], min_rows: usize) -> Result<usize> {
    if data.len() < min_rows {
        return Err(Error::TooFewRecords {
            needed: min_rows,
            got: data.len(),
        });
    }
    let n = data[0].len();
    if n == 0 {
        return Err(Error::invalid("matrix", "zero columns"));
    }
    for row in data {
        if row.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: row.len(),
            });
        }
        if row.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite { context: "matrix entry" });
        }
    }
    Ok(n)
}

/// How many leading components a fit keeps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ComponentSelection {
    Explicit(usize),
    /// Smallest p whose explained variance ratio reaches the threshold.
    VarianceRatio(f64),
}

impl Default for ComponentSelection {
    fn default() -> Self {
        ComponentSelection::VarianceRatio(0.95)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionModel<F: Scalar = f64> {
    pub mean: Vec<F>,
    /// Per-column standard deviations when the model z-scores its input
    /// first; zero-variance columns keep scale 1.
    pub scale: Option<Vec<F>>,
    /// Top-p eigenvalues, non-increasing, clamped at 0.
    pub eigenvalues: Vec<F>,
    /// p rows of length n, unit-norm and pairwise orthogonal.
    pub components: Vec<Vec<F>>,
    pub explained_variance_ratio: F,
}

impl<F: Scalar> ProjectionModel<F> {
    pub fn input_dims(&self) -> usize {
        self.mean.len()
    }

    pub fn output_dims(&self) -> usize {
        self.components.len()
    }
}

/// Fits a projection with an explicit component count on raw covariance.
pub fn fit_projection<F: Scalar>(data: &[Vec<F>], p: usize) -> Result<ProjectionModel<F>> {
    fit_projection_with(data, ComponentSelection::Explicit(p), false)
}

pub fn fit_projection_with<F: Scalar>(
    data: &[Vec<F>],
    selection: ComponentSelection,
    standardize: bool,
) -> Result<ProjectionModel<F>> {
    let n = check_matrix(data, 2)?;
    if let ComponentSelection::Explicit(p) = selection {
        if p == 0 || p > n {
            return Err(Error::ComponentRange { p, n });
        }
    }

    let rows = scalar::from_usize::<F>(data.len());
    let mut mean = vec![F::zero(); n];
    for row in data {
        for (m, v) in mean.iter_mut().zip(row) {
            *m = *m + *v;
        }
    }
    for m in &mut mean {
        *m = *m / rows;
    }

    let (scale, fit_data): (Option<Vec<F>>, Vec<Vec<F>>) = if standardize {
        let cov = covariance(data)?;
        let scale: Vec<F> = (0..n)
            .map(|i| {
                let sd = cov[i][i].max(F::zero()).sqrt();
                if sd > F::zero() {
                    sd
                } else {
                    F::one()
                }
            })
            .collect();
        let scaled = data
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .map(|(i, v)| (*v - mean[i]) / scale[i])
                    .collect()
            })
            .collect();
        (Some(scale), scaled)
    } else {
        (None, data.to_vec())
    };

    let cov = covariance(&fit_data)?;
    let pairs = eigen_decompose(&cov)?;
    let clamped: Vec<F> = pairs.iter().map(|(l, _)| l.max(F::zero())).collect();
    let total: F = clamped.iter().fold(F::zero(), |acc, l| acc + *l);

    let ratio_at = |p: usize| -> F {
        if total == F::zero() {
            F::one()
        } else {
            clamped[..p].iter().fold(F::zero(), |acc, l| acc + *l) / total
        }
    };
    let p = match selection {
        ComponentSelection::Explicit(p) => p,
        ComponentSelection::VarianceRatio(threshold) => {
            let threshold = scalar::from_f64::<F>(threshold);
            (1..=n).find(|&p| ratio_at(p) >= threshold).unwrap_or(n)
        }
    };

    Ok(ProjectionModel {
        mean,
        scale,
        eigenvalues: clamped[..p].to_vec(),
        components: pairs[..p].iter().map(|(_, v)| v.clone()).collect(),
        explained_variance_ratio: ratio_at(p),
    })
}

/// Projects a record: center (and rescale if the model standardizes), then
/// dot with each component row.
pub fn project<F: Scalar>(model: &ProjectionModel<F>, x: &[F]) -> Result<Vec<F>> {
    let n = model.input_dims();
    if x.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: x.len(),
        });
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite { context: "projection input" });
    }
    let centered: Vec<F> = match &model.scale {
        Some(scale) => (0..n).map(|i| (x[i] - model.mean[i]) / scale[i]).collect(),
        None => (0..n).map(|i| x[i] - model.mean[i]).collect(),
    };
    Ok(model
        .components
        .iter()
        .map(|comp| {
            comp.iter()
                .zip(&centered)
                .fold(F::zero(), |acc, (c, v)| acc + *c * *v)
        })
        .collect())
}
