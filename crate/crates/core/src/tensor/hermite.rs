use super::{decode_index, entry_count, sym_outer_with_cap, SymmetricTensor, DEFAULT_ENTRY_CAP};
use crate::error::Result;
use crate::scalar::{factorial, Scalar};

/// Probabilist's Hermite polynomial `h_k(x)` by the three-term recursion.
pub fn hermite_scalar<F: Scalar>(k: usize, x: F) -> F {
    let mut prev = F::one();
    if k == 0 {
        return prev;
    }
    let mut cur = x;
    for j in 1..k {
        let next = x * cur - F::from_usize_lossy(j) * prev;
        prev = cur;
        cur = next;
    }
    cur
}

pub fn hermite_tensor<F: Scalar>(k: usize, x: &[F]) -> Result<SymmetricTensor<F>> {
    hermite_tensor_with_cap(k, x, DEFAULT_ENTRY_CAP)
}

/// `H_k(x)` from `H_{j+1} = Sym(x ⊗ H_j) - j Sym(I ⊗ H_{j-1})`.
pub fn hermite_tensor_with_cap<F: Scalar>(k: usize, x: &[F], cap: usize) -> Result<SymmetricTensor<F>> {
    let dim = x.len();
    entry_count(dim, k, cap)?;
    let mut prev = SymmetricTensor::scalar(F::one(), dim);
    if k == 0 {
        return Ok(prev);
    }
    let xv = SymmetricTensor::vector(x);
    let id = SymmetricTensor::identity(dim);
    let mut cur = xv.clone();
    for j in 1..k {
        let mut next = sym_outer_with_cap(&xv, &cur, cap)?;
        let mut corr = sym_outer_with_cap(&id, &prev, cap)?;
        corr.scale(F::from_usize_lossy(j));
        next.sub_assign(&corr)?;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// Partial matchings of `0..k`: every way of grouping the positions into
/// pairs and singletons.
fn partial_matchings(k: usize) -> Vec<(Vec<(usize, usize)>, Vec<usize>)> {
    fn rec(
        free: &[usize],
        pairs: &mut Vec<(usize, usize)>,
        singles: &mut Vec<usize>,
        out: &mut Vec<(Vec<(usize, usize)>, Vec<usize>)>,
    ) {
        let Some(first) = free.first().copied() else {
            out.push((pairs.clone(), singles.clone()));
            return;
        };
        let rest: Vec<usize> = free[1..].to_vec();
        singles.push(first);
        rec(&rest, pairs, singles, out);
        singles.pop();
        for (pos, &q) in rest.iter().enumerate() {
            let mut r: Vec<usize> = rest.clone();
            r.remove(pos);
            pairs.push((first, q));
            rec(&r, pairs, singles, out);
            pairs.pop();
        }
    }
    let mut out = Vec::new();
    rec(&(0..k).collect::<Vec<_>>(), &mut Vec::new(), &mut Vec::new(), &mut out);
    out
}

/// `H_k(x)` as the sum over partitions of `[k]` into singletons (an `x`
/// factor each) and pairs (a `-I` factor each).
pub fn hermite_tensor_partition<F: Scalar>(k: usize, x: &[F]) -> Result<SymmetricTensor<F>> {
    let dim = x.len();
    let mut out = SymmetricTensor::zeros(k, dim)?;
    let terms = partial_matchings(k);
    let mut idx = vec![0usize; k];
    for (flat, slot) in out.data.iter_mut().enumerate() {
        decode_index(flat, dim, &mut idx);
        let mut acc = F::zero();
        'term: for (pairs, singles) in &terms {
            for &(a, b) in pairs {
                if idx[a] != idx[b] {
                    continue 'term;
                }
            }
            let sign = if pairs.len() % 2 == 0 { F::one() } else { -F::one() };
            acc += singles.iter().fold(sign, |p, &c| p * x[idx[c]]);
        }
        *slot = acc;
    }
    Ok(out)
}

/// `H_k(x)` from the coordinate factorisation: the entry at a multi-index in
/// which coordinate `j` appears `c_j` times is `∏_j h_{c_j}(x_j)`.
pub fn hermite_tensor_factored<F: Scalar>(k: usize, x: &[F]) -> Result<SymmetricTensor<F>> {
    let dim = x.len();
    let mut out = SymmetricTensor::zeros(k, dim)?;
    let table: Vec<F> = (0..=k)
        .flat_map(|c| x.iter().map(move |&xj| hermite_scalar(c, xj)))
        .collect();
    let mut idx = vec![0usize; k];
    for (flat, slot) in out.data.iter_mut().enumerate() {
        decode_index(flat, dim, &mut idx);
        idx.sort_unstable();
        let mut acc = F::one();
        let mut p = 0;
        while p < k {
            let j = idx[p];
            let mut run = 1;
            while p + run < k && idx[p + run] == j {
                run += 1;
            }
            acc *= table[run * dim + j];
            p += run;
        }
        *slot = acc;
    }
    Ok(out)
}

/// Normalised Hermite values `h_c(x_j) / sqrt(c!)` for `c = 0..=max_t`,
/// laid out as `[c * d + j]`.
pub fn hermite_table<F: Scalar>(x: &[F], max_t: usize) -> Vec<F> {
    let d = x.len();
    let mut out = vec![F::zero(); (max_t + 1) * d];
    for (j, &xj) in x.iter().enumerate() {
        let mut prev = F::one();
        out[j] = prev;
        if max_t == 0 {
            continue;
        }
        let mut cur = xj;
        out[d + j] = cur;
        for c in 1..max_t {
            // Normalised recursion: p_{c+1} = (x p_c - sqrt(c) p_{c-1}) / sqrt(c+1).
            let next = (xj * cur - F::from_usize_lossy(c).sqrt() * prev)
                / F::from_usize_lossy(c + 1).sqrt();
            prev = cur;
            cur = next;
            out[(c + 1) * d + j] = cur;
        }
    }
    out
}

/// `⟨H_t(x), H_t(y)⟩` for `t = 0..=max_t` from two [`hermite_table`]s.
///
/// The factorised entries give
/// `⟨H_t(x), H_t(y)⟩ = t! [z^t] ∏_j Σ_c p_c(x_j) p_c(y_j) z^c`
/// with `p_c = h_c / sqrt(c!)`.
pub fn hermite_kernel<F: Scalar>(tx: &[F], ty: &[F], dim: usize, max_t: usize, out: &mut [F]) {
    debug_assert_eq!(tx.len(), (max_t + 1) * dim);
    debug_assert!(out.len() > max_t);
    let poly = &mut out[..=max_t];
    poly.iter_mut().for_each(|p| *p = F::zero());
    poly[0] = F::one();
    let mut coef = [F::zero(); 2 * super::MAX_ORDER + 1];
    for j in 0..dim {
        for (c, slot) in coef.iter_mut().enumerate().take(max_t + 1) {
            *slot = tx[c * dim + j] * ty[c * dim + j];
        }
        for t in (1..=max_t).rev() {
            let mut acc = poly[t];
            for c in 1..=t {
                acc += coef[c] * poly[t - c];
            }
            poly[t] = acc;
        }
    }
    for (t, p) in poly.iter_mut().enumerate() {
        *p *= factorial::<F>(t).expect("order within factorial range");
    }
}
