//! Prompt text-feature analysis: token feature tensors, the reshape to a
//! flat feature matrix, a 2-D PCA projection, and per-group dispersion
//! statistics over the projected points.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::backends::{TokenEncoder, TokenFeatureTensor};
use crate::error::{Error, Result};
use crate::linalg::{self, Mat};

/// How `[n, l, d]` token tensors become `[n, D]` rows.
///
/// `Flatten` is the default row-major flatten (D = l*d). `AdjacentProduct`
/// multiplies neighbouring feature channels (D = l*(d-1)); both readings are
/// kept because they disagree on the output width and callers may want
/// either.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ReshapeMode {
    #[default]
    Flatten,
    AdjacentProduct,
}

impl fmt::Display for ReshapeMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReshapeMode::Flatten => f.write_str("flatten"),
            ReshapeMode::AdjacentProduct => f.write_str("adjacent-product"),
        }
    }
}

impl FromStr for ReshapeMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "flatten" => Ok(ReshapeMode::Flatten),
            "adjacent-product" | "adjacent_product" => Ok(ReshapeMode::AdjacentProduct),
            other => Err(Error::invalid(format!(
                "unknown reshape mode {other:?}; expected flatten|adjacent-product"
            ))),
        }
    }
}

/// Token features for a batch of texts; the named entry point the analysis
/// pipeline uses.
pub fn token_features(encoder: &dyn TokenEncoder, texts: &[String]) -> Result<TokenFeatureTensor> {
    encoder.encode_tokens(texts)
}

/// Reshape a token tensor into per-text rows.
pub fn reshape_features(tf: &TokenFeatureTensor, mode: ReshapeMode) -> Result<Mat> {
    let n = tf.n();
    let l = tf.token_len();
    let d = tf.dim();
    match mode {
        ReshapeMode::Flatten => {
            let mut rows = Vec::with_capacity(n);
            for i in 0..n {
                rows.push(tf.text_slice(i).to_vec());
            }
            Mat::from_rows(&rows)
        }
        ReshapeMode::AdjacentProduct => {
            if d < 2 {
                return Err(Error::invalid(
                    "adjacent-product reshape needs feature dimension >= 2",
                ));
            }
            let mut rows = Vec::with_capacity(n);
            for i in 0..n {
                let mut row = Vec::with_capacity(l * (d - 1));
                for j in 0..l {
                    for k in 0..d - 1 {
                        row.push(tf.get(i, j, k) * tf.get(i, j, k + 1));
                    }
                }
                rows.push(row);
            }
            Mat::from_rows(&rows)
        }
    }
}

/// 2-D PCA projection of grouped feature rows.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectedPoints {
    /// [n, 2] projected coordinates, column means zero.
    pub coordinates: Mat,
    /// Per-row group label.
    pub groups: Vec<String>,
    /// [D, 2] orthonormal projection basis.
    pub eigvecs: Mat,
    /// Top-2 eigenvalues of the feature covariance, descending.
    pub explained_variance: [f64; 2],
}

fn center_columns(rf: &Mat) -> Mat {
    let n = rf.rows();
    let d = rf.cols();
    let mut means = vec![0.0; d];
    for r in 0..n {
        for (c, m) in means.iter_mut().enumerate() {
            *m += rf.get(r, c);
        }
    }
    for m in means.iter_mut() {
        *m /= n as f64;
    }
    let mut centered = Mat::zeros(n, d);
    for r in 0..n {
        for (c, mean) in means.iter().enumerate() {
            centered.set(r, c, rf.get(r, c) - mean);
        }
    }
    centered
}

/// Flip each basis column so its largest-magnitude component is positive.
/// PCA signs are otherwise arbitrary; pinning them makes runs reproducible.
fn normalize_signs(basis: &mut Mat) {
    for c in 0..basis.cols() {
        let mut best = 0;
        let mut best_abs = -1.0;
        for r in 0..basis.rows() {
            let a = basis.get(r, c).abs();
            if a > best_abs {
                best_abs = a;
                best = r;
            }
        }
        if basis.get(best, c) < 0.0 {
            for r in 0..basis.rows() {
                basis.set(r, c, -basis.get(r, c));
            }
        }
    }
}

/// Project feature rows onto the top-2 principal directions.
///
/// When D > n the eigenproblem is solved on the n x n Gram matrix instead of
/// the D x D covariance; the spectra agree and the basis maps back through
/// the data matrix.
pub fn pca_2d(rf: &Mat, groups: &[String]) -> Result<ProjectedPoints> {
    let n = rf.rows();
    let dim = rf.cols();
    if n < 3 {
        return Err(Error::invalid(format!("pca needs at least 3 rows, got {n}")));
    }
    if dim < 2 {
        return Err(Error::invalid(format!("pca needs at least 2 columns, got {dim}")));
    }
    if groups.len() != n {
        return Err(Error::invalid("group labels must match row count"));
    }
    if !rf.is_finite() {
        return Err(Error::Numerical("non-finite feature values".into()));
    }

    let centered = center_columns(rf);
    let denom = (n - 1) as f64;
    let total_variance: f64 = centered.data().iter().map(|v| v * v).sum::<f64>() / denom;
    if total_variance <= f64::EPSILON {
        return Err(Error::Numerical(
            "zero-variance data has no principal directions".into(),
        ));
    }

    let (ev1, ev2, mut basis) = if dim <= n {
        let cov = centered
            .transpose()
            .matmul(&centered)?
            .scale(1.0 / denom)
            .symmetrize()?;
        let (eigenvalues, vectors) = linalg::sym_eigen(&cov)?;
        let mut basis = Mat::zeros(dim, 2);
        for c in 0..2 {
            for r in 0..dim {
                basis.set(r, c, vectors.get(r, c));
            }
        }
        (eigenvalues[0], eigenvalues[1], basis)
    } else {
        let gram = centered
            .matmul(&centered.transpose())?
            .scale(1.0 / denom)
            .symmetrize()?;
        let (eigenvalues, vectors) = linalg::sym_eigen(&gram)?;
        let xt = centered.transpose();
        let mut basis = Mat::zeros(dim, 2);
        for c in 0..2 {
            let lambda = eigenvalues[c].max(0.0);
            if lambda * denom > 1e-12 * eigenvalues[0].max(1e-300) * denom {
                let scale = 1.0 / (lambda * denom).sqrt();
                for r in 0..dim {
                    let mut v = 0.0;
                    for k in 0..n {
                        v += xt.get(r, k) * vectors.get(k, c);
                    }
                    basis.set(r, c, v * scale);
                }
            } else {
                // Degenerate second direction: complete the basis with the
                // canonical axis least aligned with the first column.
                let mut best_r = 0;
                let mut best_abs = f64::INFINITY;
                for r in 0..dim {
                    let a = basis.get(r, 0).abs();
                    if a < best_abs {
                        best_abs = a;
                        best_r = r;
                    }
                }
                let mut v: Vec<f64> = vec![0.0; dim];
                v[best_r] = 1.0;
                let proj: f64 = (0..dim).map(|r| v[r] * basis.get(r, 0)).sum();
                for (r, item) in v.iter_mut().enumerate() {
                    *item -= proj * basis.get(r, 0);
                }
                let norm = linalg::norm(&v);
                for (r, item) in v.iter().enumerate() {
                    basis.set(r, c, item / norm);
                }
            }
        }
        (eigenvalues[0], eigenvalues[1], basis)
    };

    normalize_signs(&mut basis);
    let coordinates = centered.matmul(&basis)?;
    Ok(ProjectedPoints {
        coordinates,
        groups: groups.to_vec(),
        eigvecs: basis,
        explained_variance: [ev1.max(0.0), ev2.max(0.0)],
    })
}

/// Mean distance of each group's points to the group centroid. Quantifies
/// how compact each prompt family sits in the projected plane.
pub fn dispersion_stats(points: &ProjectedPoints) -> Result<BTreeMap<String, f64>> {
    let mut members: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, g) in points.groups.iter().enumerate() {
        members.entry(g.as_str()).or_default().push(i);
    }
    let mut out = BTreeMap::new();
    for (group, rows) in members {
        if rows.len() < 2 {
            return Err(Error::invalid(format!(
                "group {group:?} needs at least 2 points, got {}",
                rows.len()
            )));
        }
        let mut cx = 0.0;
        let mut cy = 0.0;
        for &r in &rows {
            cx += points.coordinates.get(r, 0);
            cy += points.coordinates.get(r, 1);
        }
        cx /= rows.len() as f64;
        cy /= rows.len() as f64;
        let mean_dist = rows
            .iter()
            .map(|&r| {
                let dx = points.coordinates.get(r, 0) - cx;
                let dy = points.coordinates.get(r, 1) - cy;
                (dx * dx + dy * dy).sqrt()
            })
            .sum::<f64>()
            / rows.len() as f64;
        out.insert(group.to_string(), mean_dist);
    }
    Ok(out)
}
