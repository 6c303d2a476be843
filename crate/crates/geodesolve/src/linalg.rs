//! Dense symmetric linear algebra: cyclic-Jacobi eigendecomposition, Gram
//! factorization with PSD clipping, PCA rank reduction, and Laplacian spectra.
//!
//! Everything here is written for the desk-scale regime (matrices up to a few
//! thousand rows); no attempt is made at sparse or blocked kernels.

// dense kernels index in both dimensions; iterator forms obscure them
#![allow(clippy::needless_range_loop)]

use crate::types::Graph;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("Jacobi iteration did not converge within {0} sweeps")]
    NoConvergence(usize),
    #[error("matrix contains a non-finite entry")]
    NonFinite,
    #[error("cannot reduce {cols} columns to {k} components")]
    BadReduction { cols: usize, k: usize },
}

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend_from_slice(row);
        }
        Mat {
            rows: r,
            cols: c,
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// `self * other`, dimensions must agree.
    pub fn matmul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows);
        let mut out = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.get(k, j);
                }
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Symmetric matrix stored as a packed lower triangle, so symmetry is exact
/// by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    n: usize,
    tri: Vec<f64>,
}

#[inline]
fn tri_index(i: usize, j: usize) -> usize {
    // requires i >= j
    i * (i + 1) / 2 + j
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        SymMatrix {
            n,
            tri: vec![0.0; n * (n + 1) / 2],
        }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = SymMatrix::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                m.tri[tri_index(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Gram matrix `p pᵀ` of the rows of `p`.
    pub fn gram_of_rows(p: &Mat) -> Self {
        SymMatrix::from_fn(p.rows(), |i, j| {
            p.row(i).iter().zip(p.row(j)).map(|(a, b)| a * b).sum()
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i >= j {
            self.tri[tri_index(i, j)]
        } else {
            self.tri[tri_index(j, i)]
        }
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        if i >= j {
            self.tri[tri_index(i, j)] = v;
        } else {
            self.tri[tri_index(j, i)] = v;
        }
    }

    pub fn to_dense(&self) -> Mat {
        let mut m = Mat::zeros(self.n, self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                m.set(i, j, self.get(i, j));
            }
        }
        m
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.tri.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn frobenius(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                let v = self.get(i, j);
                s += v * v;
            }
        }
        s.sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.tri.iter().all(|v| v.is_finite())
    }

    /// Smallest eigenvalue, convenience wrapper around [`eigen_sym`].
    pub fn min_eigenvalue(&self) -> Result<f64, LinalgError> {
        let e = eigen_sym(self)?;
        Ok(e.eigenvalues.last().copied().unwrap_or(0.0))
    }
}

/// Result of [`eigen_sym`]: eigenvalues in non-increasing order and the
/// matching orthonormal eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Mat,
}

const JACOBI_MAX_SWEEPS: usize = 100;
const JACOBI_TOL: f64 = 1e-12;

/// Cyclic Jacobi eigendecomposition of a symmetric matrix. Deterministic for
/// a fixed input; fails only if the off-diagonal norm has not dropped below
/// `1e-12` (relative) after 100 sweeps.
pub fn eigen_sym(a: &SymMatrix) -> Result<EigenDecomposition, LinalgError> {
    if !a.is_finite() {
        return Err(LinalgError::NonFinite);
    }
    let n = a.n();
    if n == 0 {
        return Ok(EigenDecomposition {
            eigenvalues: vec![],
            eigenvectors: Mat::zeros(0, 0),
        });
    }
    let mut w = a.to_dense();
    let mut v = Mat::identity(n);
    let scale = a.frobenius().max(1.0);

    let off = |w: &Mat| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    let x = w.get(i, j);
                    s += x * x;
                }
            }
        }
        s.sqrt()
    };

    let mut converged = false;
    for _ in 0..JACOBI_MAX_SWEEPS {
        if off(&w) <= JACOBI_TOL * scale {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = w.get(p, q);
                if apq.abs() <= f64::MIN_POSITIVE {
                    continue;
                }
                let theta = (w.get(q, q) - w.get(p, p)) / (2.0 * apq);
                let t = {
                    let t = 1.0 / (theta.abs() + (theta * theta + 1.0).sqrt());
                    if theta < 0.0 {
                        -t
                    } else {
                        t
                    }
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                // rotate rows/columns p and q of the working matrix
                for k in 0..n {
                    let wkp = w.get(k, p);
                    let wkq = w.get(k, q);
                    w.set(k, p, c * wkp - s * wkq);
                    w.set(k, q, s * wkp + c * wkq);
                }
                for k in 0..n {
                    let wpk = w.get(p, k);
                    let wqk = w.get(q, k);
                    w.set(p, k, c * wpk - s * wqk);
                    w.set(q, k, s * wpk + c * wqk);
                }
                // accumulate eigenvectors
                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, c * vkp - s * vkq);
                    v.set(k, q, s * vkp + c * vkq);
                }
            }
        }
    }
    if !converged && off(&w) > JACOBI_TOL * scale {
        return Err(LinalgError::NoConvergence(JACOBI_MAX_SWEEPS));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| w.get(j, j).total_cmp(&w.get(i, i)).then(i.cmp(&j)));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| w.get(i, i)).collect();
    let mut vectors = Mat::zeros(n, n);
    for (new_col, &old_col) in order.iter().enumerate() {
        for r in 0..n {
            vectors.set(r, new_col, v.get(r, old_col));
        }
    }
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors: vectors,
    })
}

/// Factors a symmetric matrix as `points pointsᵀ` after clipping negative
/// eigenvalues to zero. Returns the `n x n` factor (rows are point vectors)
/// and the clipped mass, i.e. the total magnitude of discarded negative
/// eigenvalues. Indefinite inputs are accepted; the clipped mass reports how
/// far from PSD they were.
pub fn gram_factor(x: &SymMatrix) -> Result<(Mat, f64), LinalgError> {
    let e = eigen_sym(x)?;
    let n = x.n();
    let mut points = Mat::zeros(n, n);
    let mut clipped = 0.0;
    for (j, &lambda) in e.eigenvalues.iter().enumerate() {
        if lambda < 0.0 {
            clipped += -lambda;
            continue;
        }
        let root = lambda.sqrt();
        for i in 0..n {
            points.set(i, j, e.eigenvectors.get(i, j) * root);
        }
    }
    Ok((points, clipped))
}

/// Projects the rows of `points` onto their top-`k` principal directions,
/// after centering. Output is an `n x k` realization.
pub fn pca_reduce(points: &Mat, k: usize) -> Result<crate::types::Realization, LinalgError> {
    let (n, d) = (points.rows(), points.cols());
    if k > d {
        return Err(LinalgError::BadReduction { cols: d, k });
    }
    let mut mean = vec![0.0; d];
    for i in 0..n {
        for j in 0..d {
            mean[j] += points.get(i, j);
        }
    }
    for mj in mean.iter_mut() {
        *mj /= n.max(1) as f64;
    }
    let mut centered = Mat::zeros(n, d);
    for i in 0..n {
        for j in 0..d {
            centered.set(i, j, points.get(i, j) - mean[j]);
        }
    }
    let cov = SymMatrix::from_fn(d, |a, b| {
        (0..n)
            .map(|i| centered.get(i, a) * centered.get(i, b))
            .sum()
    });
    let e = eigen_sym(&cov)?;
    let mut out = vec![vec![0.0; k]; n];
    for i in 0..n {
        for (c, row) in out[i].iter_mut().enumerate() {
            *row = (0..d)
                .map(|j| centered.get(i, j) * e.eigenvectors.get(j, c))
                .sum();
        }
    }
    crate::types::Realization::new(out).map_err(|_| LinalgError::NonFinite)
}

/// Eigenvalues of the unweighted Laplacian `D - A`, in non-increasing order.
/// The smallest is zero (one zero per connected component).
pub fn laplacian_spectrum(g: &Graph) -> Vec<f64> {
    let n = g.n_vertices();
    let deg = g.degrees();
    let mut l = SymMatrix::from_fn(n, |i, j| if i == j { deg[i] as f64 } else { 0.0 });
    for e in g.edges() {
        l.set(e.u - 1, e.v - 1, -1.0);
    }
    eigen_sym(&l)
        .expect("Jacobi iteration converges on Laplacian matrices")
        .eigenvalues
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn reconstruction_residual(a: &SymMatrix, e: &EigenDecomposition) -> f64 {
        let n = a.n();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let mut s = 0.0;
                for k in 0..n {
                    s += e.eigenvectors.get(i, k) * e.eigenvalues[k] * e.eigenvectors.get(j, k);
                }
                worst = worst.max((s - a.get(i, j)).abs());
            }
        }
        worst
    }

    fn orthogonality_residual(e: &EigenDecomposition) -> f64 {
        let n = e.eigenvalues.len();
        let mut worst: f64 = 0.0;
        for a in 0..n {
            for b in 0..n {
                let dot: f64 = (0..n)
                    .map(|i| e.eigenvectors.get(i, a) * e.eigenvectors.get(i, b))
                    .sum();
                let want = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((dot - want).abs());
            }
        }
        worst
    }

    #[test]
    fn identity_eigenvalues() {
        let a = SymMatrix::from_fn(3, |i, j| if i == j { 1.0 } else { 0.0 });
        let e = eigen_sym(&a).unwrap();
        assert_eq!(e.eigenvalues, vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn analytic_2x2() {
        let a = SymMatrix::from_fn(2, |i, j| if i == j { 2.0 } else { 1.0 });
        let e = eigen_sym(&a).unwrap();
        assert!((e.eigenvalues[0] - 3.0).abs() < 1e-12);
        assert!((e.eigenvalues[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn random_gram_residual() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..5 {
            let p = Mat::from_rows(
                &(0..5)
                    .map(|_| (0..3).map(|_| rng.random_range(-2.0..2.0)).collect())
                    .collect::<Vec<_>>(),
            );
            let a = SymMatrix::gram_of_rows(&p);
            let e = eigen_sym(&a).unwrap();
            let tol = 1e-8 * (1.0 + a.max_abs());
            assert!(reconstruction_residual(&a, &e) <= tol);
            assert!(orthogonality_residual(&e) <= 1e-8);
            // non-increasing order
            for w in e.eigenvalues.windows(2) {
                assert!(w[0] >= w[1] - 1e-12);
            }
        }
    }

    #[test]
    fn eigen_trace_and_determinant() {
        // sum(lambda) = trace and prod(lambda) = det, with an analytic 3x3 determinant
        let a = SymMatrix::from_fn(3, |i, j| match (i.max(j), i.min(j)) {
            (0, 0) => 4.0,
            (1, 0) => 1.0,
            (1, 1) => 3.0,
            (2, 0) => -1.0,
            (2, 1) => 0.5,
            (2, 2) => 2.0,
            _ => unreachable!(),
        });
        let e = eigen_sym(&a).unwrap();
        let trace: f64 = (0..3).map(|i| a.get(i, i)).sum();
        let sum: f64 = e.eigenvalues.iter().sum();
        assert!((sum - trace).abs() <= 1e-8 * 3.0);

        let det = a.get(0, 0) * (a.get(1, 1) * a.get(2, 2) - a.get(1, 2) * a.get(2, 1))
            - a.get(0, 1) * (a.get(1, 0) * a.get(2, 2) - a.get(1, 2) * a.get(2, 0))
            + a.get(0, 2) * (a.get(1, 0) * a.get(2, 1) - a.get(1, 1) * a.get(2, 0));
        let prod: f64 = e.eigenvalues.iter().product();
        assert!((prod - det).abs() <= 1e-8 * det.abs().max(1.0));
    }

    #[test]
    fn gram_factor_rank_one() {
        // X = v v^T with v = (1, 2)
        let a = SymMatrix::from_fn(2, |i, j| {
            let v = [1.0, 2.0];
            v[i] * v[j]
        });
        let (points, clipped) = gram_factor(&a).unwrap();
        assert_eq!(clipped, 0.0);
        let back = SymMatrix::gram_of_rows(&points);
        for i in 0..2 {
            for j in 0..2 {
                assert!((back.get(i, j) - a.get(i, j)).abs() <= 1e-6);
            }
        }
        // rank 1: second column of the factor vanishes
        assert!(points.get(0, 1).abs() < 1e-9 && points.get(1, 1).abs() < 1e-9);
    }

    #[test]
    fn gram_factor_zero_and_indefinite() {
        let z = SymMatrix::zeros(3);
        let (points, clipped) = gram_factor(&z).unwrap();
        assert_eq!(clipped, 0.0);
        assert_eq!(points.max_abs(), 0.0);

        // [[1,-2],[-2,1]] has eigenvalues 3 and -1
        let a = SymMatrix::from_fn(2, |i, j| if i == j { 1.0 } else { -2.0 });
        let (_, clipped) = gram_factor(&a).unwrap();
        assert!((clipped - 1.0).abs() < 1e-10);
    }

    #[test]
    fn gram_factor_preserves_row_distances() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let p = Mat::from_rows(
            &(0..6)
                .map(|_| (0..2).map(|_| rng.random_range(-3.0..3.0)).collect())
                .collect::<Vec<_>>(),
        );
        let x = SymMatrix::gram_of_rows(&p);
        let (q, clipped) = gram_factor(&x).unwrap();
        assert!(clipped <= 1e-9);
        for i in 0..6 {
            for j in 0..6 {
                let orig: f64 = p
                    .row(i)
                    .iter()
                    .zip(p.row(j))
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum();
                let new: f64 = q
                    .row(i)
                    .iter()
                    .zip(q.row(j))
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum();
                assert!((orig - new).abs() <= 1e-8 * (1.0 + orig));
            }
        }
    }

    #[test]
    fn pca_exact_on_subspace() {
        // points already in a 2-dim subspace of R^3: distances preserved exactly
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let rows: Vec<Vec<f64>> = (0..7)
            .map(|_| {
                let a: f64 = rng.random_range(-1.0..1.0);
                let b: f64 = rng.random_range(-1.0..1.0);
                vec![a + b, a - b, 2.0 * a + 0.5 * b]
            })
            .collect();
        let m = Mat::from_rows(&rows);
        let red = pca_reduce(&m, 2).unwrap();
        for i in 0..7 {
            for j in i + 1..7 {
                let orig: f64 = rows[i]
                    .iter()
                    .zip(&rows[j])
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>();
                assert!((red.sq_dist(i, j) - orig).abs() <= 1e-9 * (1.0 + orig));
            }
        }
    }

    #[test]
    fn pca_collinear_to_1d() {
        let rows: Vec<Vec<f64>> = (0..5)
            .map(|i| vec![i as f64 * 0.7, i as f64 * 1.4])
            .collect();
        let m = Mat::from_rows(&rows);
        let red = pca_reduce(&m, 1).unwrap();
        for i in 0..5 {
            for j in i + 1..5 {
                let orig: f64 = rows[i]
                    .iter()
                    .zip(&rows[j])
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>();
                assert!((red.sq_dist(i, j) - orig).abs() <= 1e-9 * (1.0 + orig));
            }
        }
        assert!(pca_reduce(&m, 3).is_err());
    }

    /// Independent PCA oracle for 3-column data: eigenvalues of the centered
    /// covariance via the analytic cubic (trigonometric form), eigenvectors
    /// via inverse iteration on shifted systems.
    mod pca_oracle {
        pub fn sym3_eigenvalues(a: &[[f64; 3]; 3]) -> [f64; 3] {
            let p1 = a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2];
            let q = (a[0][0] + a[1][1] + a[2][2]) / 3.0;
            let p2 =
                (a[0][0] - q).powi(2) + (a[1][1] - q).powi(2) + (a[2][2] - q).powi(2) + 2.0 * p1;
            let p = (p2 / 6.0).sqrt();
            if p < 1e-300 {
                return [q, q, q];
            }
            let mut b = [[0.0; 3]; 3];
            for i in 0..3 {
                for j in 0..3 {
                    b[i][j] = (a[i][j] - if i == j { q } else { 0.0 }) / p;
                }
            }
            let detb = b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[2][1])
                - b[0][1] * (b[1][0] * b[2][2] - b[1][2] * b[2][0])
                + b[0][2] * (b[1][0] * b[2][1] - b[1][1] * b[2][0]);
            let r = (detb / 2.0).clamp(-1.0, 1.0);
            let phi = r.acos() / 3.0;
            let e1 = q + 2.0 * p * phi.cos();
            let e3 = q + 2.0 * p * (phi + 2.0 * std::f64::consts::PI / 3.0).cos();
            let e2 = 3.0 * q - e1 - e3;
            [e1, e2, e3] // non-increasing
        }

        pub fn eigenvector(a: &[[f64; 3]; 3], lambda: f64) -> [f64; 3] {
            // inverse iteration on (A - lambda I + eps I)
            let mut m = *a;
            for (i, row) in m.iter_mut().enumerate() {
                row[i] -= lambda - 1e-9;
            }
            let mut v = [1.0, 0.7, -0.3];
            for _ in 0..60 {
                let w = solve3(&m, &v);
                let norm = (w[0] * w[0] + w[1] * w[1] + w[2] * w[2]).sqrt();
                v = [w[0] / norm, w[1] / norm, w[2] / norm];
            }
            v
        }

        fn solve3(a: &[[f64; 3]; 3], b: &[f64; 3]) -> [f64; 3] {
            let mut m = [[0.0f64; 4]; 3];
            for i in 0..3 {
                m[i][..3].copy_from_slice(&a[i]);
                m[i][3] = b[i];
            }
            for col in 0..3 {
                let piv = (col..3)
                    .max_by(|&x, &y| m[x][col].abs().total_cmp(&m[y][col].abs()))
                    .unwrap();
                m.swap(col, piv);
                let d = m[col][col];
                for j in col..4 {
                    m[col][j] /= d;
                }
                for r in 0..3 {
                    if r != col {
                        let f = m[r][col];
                        for j in col..4 {
                            m[r][j] -= f * m[col][j];
                        }
                    }
                }
            }
            [m[0][3], m[1][3], m[2][3]]
        }
    }

    #[test]
    fn pca_matches_independent_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let rows: Vec<Vec<f64>> = (0..9)
            .map(|_| (0..3).map(|_| rng.random_range(-2.0..2.0)).collect())
            .collect();
        let n = rows.len() as f64;
        let mean: Vec<f64> = (0..3)
            .map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / n)
            .collect();
        let centered: Vec<Vec<f64>> = rows
            .iter()
            .map(|r| r.iter().zip(&mean).map(|(a, m)| a - m).collect())
            .collect();
        let mut cov = [[0.0f64; 3]; 3];
        for r in &centered {
            for i in 0..3 {
                for j in 0..3 {
                    cov[i][j] += r[i] * r[j];
                }
            }
        }
        let eig = pca_oracle::sym3_eigenvalues(&cov);
        let v0 = pca_oracle::eigenvector(&cov, eig[0]);
        let v1 = pca_oracle::eigenvector(&cov, eig[1]);
        let oracle: Vec<Vec<f64>> = centered
            .iter()
            .map(|r| {
                vec![
                    r[0] * v0[0] + r[1] * v0[1] + r[2] * v0[2],
                    r[0] * v1[0] + r[1] * v1[1] + r[2] * v1[2],
                ]
            })
            .collect();

        let red = pca_reduce(&Mat::from_rows(&rows), 2).unwrap();
        // compare pairwise distances: projection is unique up to sign flips
        for i in 0..rows.len() {
            for j in i + 1..rows.len() {
                let od: f64 = oracle[i]
                    .iter()
                    .zip(&oracle[j])
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum();
                assert!(
                    (red.sq_dist(i, j) - od).abs() <= 1e-7 * (1.0 + od),
                    "pair ({i},{j}): {} vs oracle {}",
                    red.sq_dist(i, j),
                    od
                );
            }
        }
    }

    #[test]
    fn laplacian_small_graphs() {
        let k2 = Graph::new(2, [(1, 2, 1.0)]).unwrap();
        let s = laplacian_spectrum(&k2);
        assert!((s[0] - 2.0).abs() < 1e-9 && s[1].abs() < 1e-9);

        let empty = Graph::new(3, []).unwrap();
        assert_eq!(laplacian_spectrum(&empty), vec![0.0, 0.0, 0.0]);

        let p3 = Graph::new(3, [(1, 2, 1.0), (2, 3, 1.0)]).unwrap();
        let s = laplacian_spectrum(&p3);
        assert!((s[0] - 3.0).abs() < 1e-9);
        assert!((s[1] - 1.0).abs() < 1e-9);
        assert!(s[2].abs() < 1e-8);
    }

    #[test]
    fn laplacian_relabel_invariant() {
        let g = Graph::new(
            5,
            [
                (1, 2, 1.0),
                (2, 3, 1.0),
                (3, 4, 1.0),
                (4, 5, 1.0),
                (1, 5, 1.0),
            ],
        )
        .unwrap();
        // relabel v -> 6 - v
        let h = Graph::new(
            5,
            g.edges()
                .iter()
                .map(|e| (6 - e.u, 6 - e.v, e.d))
                .collect::<Vec<_>>(),
        )
        .unwrap();
        let (sg, sh) = (laplacian_spectrum(&g), laplacian_spectrum(&h));
        for (a, b) in sg.iter().zip(&sh) {
            assert!((a - b).abs() <= 1e-9);
        }
    }
}
