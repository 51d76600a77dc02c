use super::{decode_index, entry_count, SymmetricTensor, DEFAULT_ENTRY_CAP};
use crate::error::Result;
use crate::scalar::{binomial, factorial, Scalar};

/// Sorted multi-indices of one order, each stored once with the number of
/// index permutations it stands for.
///
/// Hermite entries are read off normalised [`super::hermite_table`]s:
/// the entry at a multi-index in which coordinate `j` appears `c_j` times is
/// `∏_j √(c_j!) · table[c_j·d + j]`.
#[derive(Clone, Debug)]
pub struct PackedLayout {
    dim: usize,
    order: usize,
    /// `(coordinate, count)` runs, `order` slots per index (unused slots have count 0).
    runs: Vec<(usize, usize)>,
    mult: Vec<f64>,
    scale: Vec<f64>,
}

impl PackedLayout {
    pub fn new(dim: usize, order: usize) -> Self {
        let mut runs = Vec::new();
        let mut mult = Vec::new();
        let mut scale = Vec::new();
        let mut cur = Vec::with_capacity(order);
        fn rec(dim: usize, order: usize, start: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
            if cur.len() == order {
                f(cur);
                return;
            }
            for j in start..dim {
                cur.push(j);
                rec(dim, order, j, cur, f);
                cur.pop();
            }
        }
        let of: f64 = factorial(order).unwrap_or(f64::INFINITY);
        rec(dim, order, 0, &mut cur, &mut |t: &[usize]| {
            let mut slots = Vec::with_capacity(order);
            let mut p = 0;
            while p < t.len() {
                let mut c = 1;
                while p + c < t.len() && t[p + c] == t[p] {
                    c += 1;
                }
                slots.push((t[p], c));
                p += c;
            }
            let denom: f64 = slots.iter().map(|&(_, c)| factorial::<f64>(c).unwrap()).product();
            mult.push(of / denom);
            scale.push(denom.sqrt());
            slots.resize(order, (0, 0));
            runs.extend(slots);
        });
        if order == 0 {
            mult = vec![1.0];
            scale = vec![1.0];
        }
        Self { dim, order, runs, mult, scale }
    }

    pub fn len(&self) -> usize {
        self.mult.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mult.is_empty()
    }

    pub fn multiplicities(&self) -> &[f64] {
        &self.mult
    }

    fn entry<F: Scalar>(&self, c: usize, table: &[F]) -> F {
        let d = self.dim;
        let mut acc = F::lit(self.scale[c]);
        for &(j, cnt) in &self.runs[c * self.order..(c + 1) * self.order] {
            if cnt == 0 {
                break;
            }
            acc *= table[cnt * d + j];
        }
        acc
    }

    /// `out += weight · H_order(x)` in packed form, from the table of `x`.
    pub fn accumulate<F: Scalar>(&self, table: &[F], weight: F, out: &mut [F]) {
        for (c, o) in out.iter_mut().enumerate() {
            *o += weight * self.entry(c, table);
        }
    }

    /// `⟨H_order(x), T⟩` for a packed symmetric `T`.
    pub fn dot_table<F: Scalar>(&self, table: &[F], packed: &[F]) -> F {
        packed
            .iter()
            .enumerate()
            .fold(F::zero(), |acc, (c, &v)| acc + F::lit(self.mult[c]) * self.entry(c, table) * v)
    }

    /// Frobenius norm of the dense tensor.
    pub fn norm<F: Scalar>(&self, packed: &[F]) -> F {
        packed
            .iter()
            .zip(&self.mult)
            .fold(F::zero(), |acc, (&v, &m)| acc + F::lit(m) * v * v)
            .sqrt()
    }

    /// Position of a sorted multi-index in the packed order.
    fn rank(&self, sorted: &[usize]) -> usize {
        let (d, t) = (self.dim, self.order);
        let mut rank = 0usize;
        let mut lo = 0;
        for (p, &a) in sorted.iter().enumerate() {
            let rest = t - p - 1;
            for v in lo..a {
                rank += binomial(d - v + rest - 1, rest) as usize;
            }
            lo = a;
        }
        rank
    }

    pub fn to_dense<F: Scalar>(&self, packed: &[F]) -> Result<SymmetricTensor<F>> {
        entry_count(self.dim, self.order, DEFAULT_ENTRY_CAP)?;
        let mut out = SymmetricTensor::zeros(self.order, self.dim)?;
        let mut idx = vec![0usize; self.order];
        for (flat, slot) in out.data.iter_mut().enumerate() {
            decode_index(flat, self.dim, &mut idx);
            idx.sort_unstable();
            *slot = packed[self.rank(&idx)];
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::{hermite_table, hermite_tensor};

    #[test]
    fn packed_matches_dense() {
        let x = [0.3f64, -1.2, 0.7, 2.0];
        let y = [1.1f64, 0.4, -0.5, 0.2];
        for t in 1..=4 {
            let layout = PackedLayout::new(4, t);
            assert_eq!(layout.len(), binomial(4 + t - 1, t) as usize);
            let tx = hermite_table(&x, t);
            let ty = hermite_table(&y, t);
            let mut acc = vec![0.0f64; layout.len()];
            layout.accumulate(&tx, 1.0, &mut acc);
            layout.accumulate(&ty, 0.5, &mut acc);
            let dense = layout.to_dense(&acc).unwrap();
            let mut want = hermite_tensor(t, &x).unwrap();
            let mut hy = hermite_tensor(t, &y).unwrap();
            hy.scale(0.5);
            want.add_assign(&hy).unwrap();
            assert!(dense.max_abs_diff(&want).unwrap() < 1e-12);
            assert!((layout.norm(&acc) - want.norm()).abs() < 1e-10);
            let hx = hermite_tensor(t, &x).unwrap();
            assert!((layout.dot_table(&tx, &acc) - hx.inner(&want).unwrap()).abs() < 1e-9);
        }
    }
}
