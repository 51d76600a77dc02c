use super::{decode_index, SymmetricTensor};
use crate::error::{Error, Result};
use crate::scalar::{binomial, factorial, Scalar};

fn perfect_matchings(k: usize) -> Vec<Vec<(usize, usize)>> {
    fn rec(free: &[usize], cur: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
        let Some((&first, rest)) = free.split_first() else {
            out.push(cur.clone());
            return;
        };
        for (pos, &q) in rest.iter().enumerate() {
            let mut r = rest.to_vec();
            r.remove(pos);
            cur.push((first, q));
            rec(&r, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k.is_multiple_of(2) {
        rec(&(0..k).collect::<Vec<_>>(), &mut Vec::new(), &mut out);
    }
    out
}

/// `E_{Z~N(0,I)}[Z^{⊗k}]`: each entry counts the perfect matchings of the
/// positions whose paired indices agree (Isserlis).
pub fn gaussian_moment_tensor<F: Scalar>(k: usize, dim: usize) -> Result<SymmetricTensor<F>> {
    let mut out = SymmetricTensor::zeros(k, dim)?;
    if k % 2 == 1 {
        return Ok(out);
    }
    let matchings = perfect_matchings(k);
    let mut idx = vec![0usize; k];
    for (flat, slot) in out.data.iter_mut().enumerate() {
        decode_index(flat, dim, &mut idx);
        let count = matchings
            .iter()
            .filter(|m| m.iter().all(|&(a, b)| idx[a] == idx[b]))
            .count();
        *slot = F::from_usize_lossy(count);
    }
    Ok(out)
}

/// `E_{X~N(0,1)}[h_k(X + m)^2] = k! Σ_j C(k,j) m^{2j} / j!`.
pub fn expected_hksq<F: Scalar>(k: usize, m: F) -> Result<F> {
    let kf = factorial::<F>(k).ok_or(Error::FactorialRange(k))?;
    let m2 = m * m;
    let mut acc = F::zero();
    let mut pow = F::one();
    for j in 0..=k {
        let jf = factorial::<F>(j).ok_or(Error::FactorialRange(j))?;
        acc += F::lit(binomial(k, j)) * pow / jf;
        pow *= m2;
    }
    Ok(kf * acc)
}

fn subsets_of_size(k: usize, s: usize) -> Vec<Vec<usize>> {
    (0u32..(1 << k))
        .filter(|m| m.count_ones() as usize == s)
        .map(|m| (0..k).filter(|&p| m & (1 << p) != 0).collect())
        .collect()
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for (i, &x) in items.iter().enumerate() {
        let mut rest = items.to_vec();
        rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, x);
            out.push(p);
        }
    }
    out
}

/// One term of the second-moment expansion: identity factors linking
/// position `a` of the first copy to position `b` of the second, and `μ`
/// factors on the unmatched positions of each copy.
struct SecondMomentTerm {
    links: Vec<(usize, usize)>,
    free_left: Vec<usize>,
    free_right: Vec<usize>,
}

/// `E_{X~N(μ,I)}[H_k(X) ⊗ H_k(X)]` as the sum over equal-size subsets
/// `S_1, S_2 ⊆ [k]` and bijections between them of
/// `⊗ I^{(a, k+b)} ⊗_{c∉S_1} μ^{(c)} ⊗_{c∉S_2} μ^{(k+c)}`.
pub fn hermite_second_moment<F: Scalar>(k: usize, mu: &[F]) -> Result<SymmetricTensor<F>> {
    let dim = mu.len();
    let mut out = SymmetricTensor::zeros(2 * k, dim)?;
    let mut terms = Vec::new();
    for s in 0..=k {
        for s1 in subsets_of_size(k, s) {
            for s2 in subsets_of_size(k, s) {
                for perm in permutations(&s2) {
                    terms.push(SecondMomentTerm {
                        links: s1.iter().copied().zip(perm.iter().copied()).collect(),
                        free_left: (0..k).filter(|c| !s1.contains(c)).collect(),
                        free_right: (0..k).filter(|c| !s2.contains(c)).collect(),
                    });
                }
            }
        }
    }
    let mut idx = vec![0usize; 2 * k];
    for (flat, slot) in out.data.iter_mut().enumerate() {
        decode_index(flat, dim, &mut idx);
        let (left, right) = idx.split_at(k);
        let mut acc = F::zero();
        for term in &terms {
            if term.links.iter().any(|&(a, b)| left[a] != right[b]) {
                continue;
            }
            let l = term.free_left.iter().fold(F::one(), |p, &c| p * mu[left[c]]);
            let r = term.free_right.iter().fold(F::one(), |p, &c| p * mu[right[c]]);
            acc += l * r;
        }
        *slot = acc;
    }
    Ok(out)
}
