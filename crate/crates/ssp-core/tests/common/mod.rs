//! Independent oracles and fixtures for the integration suites.
//!
//! Everything here recomputes expected values through a different route than
//! the library: nalgebra's eigensolver instead of the in-crate Jacobi, raw
//! trigram multiset counting instead of hashed buckets, index loops instead
//! of the reshape kernels, and brute-force nearest neighbour instead of
//! centroids.

#![allow(dead_code)]

use std::collections::BTreeMap;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ssp_core::corpus::{PromptRecord, Source};
use ssp_core::linalg::Mat;
use ssp_core::metrics::GaussianSummary;

pub fn to_dmatrix(m: &Mat) -> DMatrix<f64> {
    DMatrix::from_fn(m.rows(), m.cols(), |r, c| m.get(r, c))
}

/// PSD matrix square root via nalgebra's symmetric eigendecomposition.
pub fn sqrtm_oracle(m: &DMatrix<f64>) -> DMatrix<f64> {
    let eigen = SymmetricEigen::new(m.clone());
    let mut d = DMatrix::zeros(m.nrows(), m.ncols());
    for i in 0..m.nrows() {
        d[(i, i)] = eigen.eigenvalues[i].max(0.0).sqrt();
    }
    &eigen.eigenvectors * d * eigen.eigenvectors.transpose()
}

/// Fréchet distance recomputed end to end on nalgebra:
/// diff^2 + tr(S1) + tr(S2) - 2 tr((S1^{1/2} S2 S1^{1/2})^{1/2}).
pub fn frechet_oracle(g1: &GaussianSummary, g2: &GaussianSummary) -> f64 {
    let s1 = to_dmatrix(&g1.covariance);
    let s2 = to_dmatrix(&g2.covariance);
    let mean_term: f64 = g1
        .mean
        .iter()
        .zip(&g2.mean)
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    let sqrt1 = sqrtm_oracle(&s1);
    let inner = &sqrt1 * &s2 * &sqrt1;
    let inner = (&inner + inner.transpose()) * 0.5;
    let cross = sqrtm_oracle(&inner);
    mean_term + s1.trace() + s2.trace() - 2.0 * cross.trace()
}

/// Raw character-trigram multiset cosine: no hashing, no buckets.
pub fn trigram_cosine_oracle(a: &str, b: &str) -> f64 {
    fn counts(s: &str) -> BTreeMap<String, f64> {
        let chars: Vec<char> = s.chars().collect();
        let mut map = BTreeMap::new();
        if chars.len() < 3 {
            *map.entry(chars.iter().collect::<String>()).or_insert(0.0) += 1.0;
            return map;
        }
        for w in chars.windows(3) {
            *map.entry(w.iter().collect::<String>()).or_insert(0.0) += 1.0;
        }
        map
    }
    let ca = counts(a);
    let cb = counts(b);
    let dot: f64 = ca
        .iter()
        .filter_map(|(k, v)| cb.get(k).map(|w| v * w))
        .sum();
    let na: f64 = ca.values().map(|v| v * v).sum::<f64>().sqrt();
    let nb: f64 = cb.values().map(|v| v * v).sum::<f64>().sqrt();
    dot / (na * nb)
}

/// Full spectral PCA oracle: center, eigendecompose the covariance with
/// nalgebra, apply the same largest-component-positive sign convention, and
/// project. Returns (eigenvalues desc, [n,2] coordinates, [D,2] basis).
pub fn pca_oracle(rf: &Mat) -> (Vec<f64>, DMatrix<f64>, DMatrix<f64>) {
    let n = rf.rows();
    let d = rf.cols();
    let x = to_dmatrix(rf);
    let mut centered = x.clone();
    for c in 0..d {
        let mean = x.column(c).sum() / n as f64;
        for r in 0..n {
            centered[(r, c)] -= mean;
        }
    }
    let cov = (centered.transpose() * &centered) / (n as f64 - 1.0);
    let cov = (&cov + cov.transpose()) * 0.5;
    let eigen = SymmetricEigen::new(cov);
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| {
        eigen.eigenvalues[j]
            .partial_cmp(&eigen.eigenvalues[i])
            .unwrap()
            .then(i.cmp(&j))
    });
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eigen.eigenvalues[i]).collect();
    let mut basis = DMatrix::zeros(d, 2);
    for c in 0..2 {
        let src = order[c];
        for r in 0..d {
            basis[(r, c)] = eigen.eigenvectors[(r, src)];
        }
        let mut best = 0;
        let mut best_abs = -1.0;
        for r in 0..d {
            if basis[(r, c)].abs() > best_abs {
                best_abs = basis[(r, c)].abs();
                best = r;
            }
        }
        if basis[(best, c)] < 0.0 {
            for r in 0..d {
                basis[(r, c)] = -basis[(r, c)];
            }
        }
    }
    let coords = centered * &basis;
    (eigenvalues, coords, basis)
}

pub fn box_muller(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.random::<f64>().max(1e-300);
    let u2: f64 = rng.random::<f64>();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

pub fn cholesky(a: &Mat) -> Mat {
    let n = a.rows();
    let mut l = Mat::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let mut s = a.get(i, j);
            for k in 0..j {
                s -= l.get(i, k) * l.get(j, k);
            }
            if i == j {
                l.set(i, j, s.sqrt());
            } else {
                l.set(i, j, s / l.get(j, j));
            }
        }
    }
    l
}

/// Seeded multivariate normal sampler (Cholesky + Box-Muller).
pub fn sample_mvn(seed: u64, mean: &[f64], cov: &Mat, n: usize) -> Mat {
    let l = cholesky(cov);
    let d = mean.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(n);
    for _ in 0..n {
        let z: Vec<f64> = (0..d).map(|_| box_muller(&mut rng)).collect();
        let mut x = mean.to_vec();
        for (i, xi) in x.iter_mut().enumerate() {
            for (k, zk) in z.iter().take(i + 1).enumerate() {
                *xi += l.get(i, k) * zk;
            }
        }
        rows.push(x);
    }
    Mat::from_rows(&rows).unwrap()
}

/// Random symmetric positive-definite matrix A A^T / d + eps I.
pub fn random_psd(rng: &mut ChaCha8Rng, d: usize, scale: f64) -> Mat {
    let mut a = Mat::zeros(d, d);
    for r in 0..d {
        for c in 0..d {
            a.set(r, c, (rng.random::<f64>() - 0.5) * 2.0 * scale);
        }
    }
    let mut psd = a.matmul(&a.transpose()).unwrap().scale(1.0 / d as f64);
    for i in 0..d {
        psd.set(i, i, psd.get(i, i) + 0.05 * scale);
    }
    psd
}

pub fn random_gaussian_summary(rng: &mut ChaCha8Rng, d: usize) -> GaussianSummary {
    GaussianSummary {
        mean: (0..d).map(|_| (rng.random::<f64>() - 0.5) * 4.0).collect(),
        covariance: random_psd(rng, d, 1.0),
    }
}

/// Synthetic separable corpus: each theme draws words from its own disjoint
/// character alphabet, so trigram features never overlap across themes.
pub fn synthetic_theme_corpus(theme_count: usize, per_theme: usize, seed: u64) -> Vec<PromptRecord> {
    const ALPHABETS: [&str; 5] = ["abcde", "fghij", "klmno", "pqrst", "uvwxy"];
    assert!(theme_count <= ALPHABETS.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut records = Vec::new();
    for (theme, alphabet) in ALPHABETS.iter().take(theme_count).enumerate() {
        let alpha: Vec<char> = alphabet.chars().collect();
        for i in 0..per_theme {
            let word_count = rng.random_range(6..10);
            let words: Vec<String> = (0..word_count)
                .map(|_| {
                    let len = rng.random_range(4..8);
                    (0..len)
                        .map(|_| alpha[rng.random_range(0..alpha.len())])
                        .collect()
                })
                .collect();
            let mut r = PromptRecord::new(
                format!("theme{theme}-{i:03}"),
                Source::User,
                words.join(" "),
            );
            r.theme = Some(format!("theme{theme}"));
            records.push(r);
        }
    }
    records
}

/// Brute-force 1-NN by cosine over training rows. Ties break to the earliest
/// training row, mirroring a literal argmax scan.
pub fn nn_predict(train: &Mat, train_labels: &[u32], query: &[f64]) -> u32 {
    let mut best = 0;
    let mut best_c = f64::NEG_INFINITY;
    for i in 0..train.rows() {
        let c = cosine(train.row(i), query);
        if c > best_c {
            best_c = c;
            best = i;
        }
    }
    train_labels[best]
}

fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}
