use super::FlatMatrix;
use crate::error::{Error, Result};
use crate::scalar::{dot, Scalar};

/// Off-diagonal tolerance of the Jacobi sweeps, relative to the Frobenius norm.
const JACOBI_TOL: f64 = 1e-12;
const JACOBI_MAX_SWEEPS: usize = 100;

/// Singular values below this fraction of the largest are treated as zero.
pub const RANK_TOL: f64 = 1e-10;

/// Eigenpairs of a symmetric matrix, sorted by descending eigenvalue.
#[derive(Clone, Debug)]
pub struct Eigen<F> {
    pub values: Vec<F>,
    pub vectors: Vec<Vec<F>>,
}

/// Cyclic Jacobi eigendecomposition of the symmetric `n × n` row-major matrix `a`.
pub fn symmetric_eigen<F: Scalar>(a: &[F], n: usize) -> Result<Eigen<F>> {
    if a.len() != n * n {
        return Err(Error::DimMismatch { expected: n * n, actual: a.len() });
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("matrix"));
    }
    let mut m = a.to_vec();
    let mut v = vec![F::zero(); n * n];
    for i in 0..n {
        v[i * n + i] = F::one();
    }
    let tol = F::lit(JACOBI_TOL).max(F::epsilon());
    let frob = crate::scalar::norm(&m);
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut off = F::zero();
        for p in 0..n {
            for q in (p + 1)..n {
                off += m[p * n + q] * m[p * n + q];
            }
        }
        if off.sqrt() <= tol * frob || frob == F::zero() {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[p * n + q];
                if apq == F::zero() {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                let theta = (aqq - app) / (F::lit(2.0) * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + F::one()).sqrt());
                let t = if theta == F::zero() { F::one() } else { t };
                let c = F::one() / (t * t + F::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[k * n + p];
                    let mkq = m[k * n + q];
                    m[k * n + p] = c * mkp - s * mkq;
                    m[k * n + q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p * n + k];
                    let mqk = m[q * n + k];
                    m[p * n + k] = c * mpk - s * mqk;
                    m[q * n + k] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[j * n + j].partial_cmp(&m[i * n + i]).unwrap().then(i.cmp(&j)));
    let values = order.iter().map(|&i| m[i * n + i]).collect();
    let vectors = order
        .iter()
        .map(|&i| (0..n).map(|k| v[k * n + i]).collect())
        .collect();
    Ok(Eigen { values, vectors })
}

/// Leading left singular vectors with their singular values.
#[derive(Clone, Debug)]
pub struct SingularBasis<F> {
    pub values: Vec<F>,
    pub vectors: Vec<Vec<F>>,
}

/// Top `min(s, rank)` left singular vectors of `m`, from the eigenvectors
/// of the Gram matrix `M Mᵀ`. Directions whose singular value is below
/// [`RANK_TOL`] times the largest are dropped.
pub fn top_left_singular_vectors<F: Scalar>(m: &FlatMatrix<F>, s: usize) -> Result<SingularBasis<F>> {
    if s == 0 {
        return Err(Error::InvalidParam("number of singular vectors must be positive".into()));
    }
    if m.data.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("flattened matrix"));
    }
    let eig = symmetric_eigen(&m.gram(), m.rows)?;
    let top = eig.values.first().copied().unwrap_or(F::zero()).max(F::zero()).sqrt();
    let mut out = SingularBasis { values: Vec::new(), vectors: Vec::new() };
    if top == F::zero() {
        return Ok(out);
    }
    for (val, vec) in eig.values.into_iter().zip(eig.vectors).take(s) {
        let sigma = val.max(F::zero()).sqrt();
        if sigma <= F::lit(RANK_TOL) * top {
            break;
        }
        out.values.push(sigma);
        out.vectors.push(vec);
    }
    Ok(out)
}

/// Modified Gram–Schmidt with one re-orthogonalisation pass; vectors whose
/// residual falls below `tol` times their original norm are discarded.
pub fn orthonormalize<F: Scalar>(vectors: &[Vec<F>], tol: F) -> Vec<Vec<F>> {
    let mut basis: Vec<Vec<F>> = Vec::new();
    for v in vectors {
        let n0 = crate::scalar::norm(v);
        if n0 == F::zero() || !n0.is_finite() {
            continue;
        }
        let mut w = v.clone();
        for _ in 0..2 {
            for b in &basis {
                let c = dot(&w, b);
                w.iter_mut().zip(b).for_each(|(x, &y)| *x -= c * y);
            }
        }
        let n = crate::scalar::norm(&w);
        if n > tol * n0 {
            w.iter_mut().for_each(|x| *x /= n);
            basis.push(w);
        }
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn eigen_of_known_matrix() {
        let a = [2.0f64, 1.0, 1.0, 2.0];
        let e = symmetric_eigen(&a, 2).unwrap();
        assert!((e.values[0] - 3.0).abs() < 1e-14);
        assert!((e.values[1] - 1.0).abs() < 1e-14);
        let v = &e.vectors[0];
        assert!((v[0].abs() - 0.5f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn rank_one_recovers_direction() {
        let u = [1.0f64, 2.0, 2.0];
        let v = [0.5, -1.0, 3.0, 0.0];
        let data = u.iter().flat_map(|&a| v.iter().map(move |&b| a * b)).collect();
        let m = FlatMatrix::new(3, 4, data).unwrap();
        let sb = top_left_singular_vectors(&m, 3).unwrap();
        assert_eq!(sb.vectors.len(), 1);
        let got = &sb.vectors[0];
        let cos = dot(got, &u) / 3.0;
        assert!((cos.abs() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn diagonal_padded() {
        let mut data = vec![0.0f64; 3 * 5];
        data[0] = 3.0;
        data[5 + 1] = 2.0;
        data[10 + 2] = 1.0;
        let m = FlatMatrix::new(3, 5, data).unwrap();
        let sb = top_left_singular_vectors(&m, 2).unwrap();
        assert_eq!(sb.values.len(), 2);
        assert!((sb.values[0] - 3.0).abs() < 1e-12 && (sb.values[1] - 2.0).abs() < 1e-12);
        assert!((sb.vectors[0][0].abs() - 1.0).abs() < 1e-12);
        assert!((sb.vectors[1][1].abs() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_matrix_has_empty_basis() {
        let m = FlatMatrix::new(2, 3, vec![0.0f64; 6]).unwrap();
        assert!(top_left_singular_vectors(&m, 2).unwrap().vectors.is_empty());
    }

    #[test]
    fn rejects_nan() {
        let m = FlatMatrix::new(1, 2, vec![1.0, f64::NAN]).unwrap();
        assert!(matches!(top_left_singular_vectors(&m, 1), Err(Error::NonFinite(_))));
    }

    /// Independent oracle: power iteration with deflation on M Mᵀ.
    fn power_deflation(g: &[f64], n: usize, count: usize) -> Vec<f64> {
        let mut a = g.to_vec();
        let mut out = Vec::new();
        for c in 0..count {
            let mut v: Vec<f64> = (0..n).map(|i| 1.0 + (i * 7 + c) as f64 * 0.01).collect();
            let mut lambda = 0.0;
            for _ in 0..20_000 {
                let w: Vec<f64> = (0..n).map(|i| dot(&a[i * n..(i + 1) * n], &v)).collect();
                let nw = crate::scalar::norm(&w);
                lambda = nw;
                v = w.into_iter().map(|x| x / nw).collect();
            }
            out.push(lambda.sqrt());
            for i in 0..n {
                for j in 0..n {
                    a[i * n + j] -= lambda * v[i] * v[j];
                }
            }
        }
        out
    }

    #[test]
    fn random_matrix_against_power_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let data: Vec<f64> = (0..100).map(|_| rng.random_range(-1.0..1.0)).collect();
        let m = FlatMatrix::new(5, 20, data).unwrap();
        let sb = top_left_singular_vectors(&m, 5).unwrap();
        let oracle = power_deflation(&m.gram(), 5, 5);
        for (a, b) in sb.values.iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-8, "{a} vs {b}");
        }
        for i in 0..sb.vectors.len() {
            for j in 0..sb.vectors.len() {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((dot(&sb.vectors[i], &sb.vectors[j]) - want).abs() < 1e-10);
            }
        }
        // Optimality: Mᵀu_1 has norm σ_1 and no unit vector does better along the top block.
        let u = &sb.vectors[0];
        let mtu: Vec<f64> = (0..20).map(|c| (0..5).map(|r| m.data[r * 20 + c] * u[r]).sum()).collect();
        assert!((crate::scalar::norm(&mtu) - sb.values[0]).abs() < 1e-10);
    }

    #[test]
    fn orthonormalize_drops_dependent() {
        let vs = vec![vec![1.0f64, 0.0, 0.0], vec![2.0, 0.0, 0.0], vec![1.0, 1.0, 0.0]];
        let b = orthonormalize(&vs, 1e-8);
        assert_eq!(b.len(), 2);
        assert!((dot(&b[0], &b[1])).abs() < 1e-15);
    }
}
