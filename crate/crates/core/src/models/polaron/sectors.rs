//! Multiset bases of the symmetric sectors on a one-dimensional grid.

use std::collections::HashMap;

/// Basis of `H^{(n)}`: pairs `(i, M)` of a distinguished grid index `i` and a
/// multiset `M` of `n` grid indices, ordered with `i` major.
#[derive(Clone, Debug, PartialEq)]
pub struct SectorBasis {
    pub n: usize,
    pub n_x: usize,
    /// Multisets as sorted index lists, in lexicographic order.
    multisets: Vec<Vec<u16>>,
    lookup: HashMap<Vec<u16>, usize>,
    /// `n! / prod_k m_k!` for each multiset.
    multiplicity: Vec<f64>,
}

fn enumerate(n_x: usize, n: usize) -> Vec<Vec<u16>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(n);
    fn rec(n_x: usize, left: usize, start: usize, cur: &mut Vec<u16>, out: &mut Vec<Vec<u16>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for k in start..n_x {
            cur.push(k as u16);
            rec(n_x, left - 1, k, cur, out);
            cur.pop();
        }
    }
    rec(n_x, n, 0, &mut cur, &mut out);
    out
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|j| j as f64).product()
}

/// `|M|! / prod_k m_k!` for a sorted multiset.
pub fn multiplicity(m: &[u16]) -> f64 {
    let mut denom = 1.0;
    let mut run = 0;
    for (k, v) in m.iter().enumerate() {
        run = if k > 0 && m[k - 1] == *v { run + 1 } else { 1 };
        denom *= run as f64;
    }
    factorial(m.len()) / denom
}

/// Number of multisets of size `n` over `n_x` points, `C(n_x + n - 1, n)`.
pub fn multiset_count(n_x: usize, n: usize) -> usize {
    let mut c: u128 = 1;
    for k in 0..n {
        c = c * (n_x + k) as u128 / (k + 1) as u128;
    }
    c as usize
}

impl SectorBasis {
    pub fn new(n_x: usize, n: usize) -> Self {
        let multisets = enumerate(n_x, n);
        let lookup = multisets.iter().enumerate().map(|(k, m)| (m.clone(), k)).collect();
        let multiplicity = multisets.iter().map(|m| multiplicity(m)).collect();
        Self { n, n_x, multisets, lookup, multiplicity }
    }

    /// Number of multisets, the inner dimension of the sector.
    pub fn inner(&self) -> usize {
        self.multisets.len()
    }

    pub fn dim(&self) -> usize {
        self.n_x * self.inner()
    }

    pub fn multiset(&self, k: usize) -> &[u16] {
        &self.multisets[k]
    }

    pub fn multiset_multiplicity(&self, k: usize) -> f64 {
        self.multiplicity[k]
    }

    pub fn position(&self, m: &[u16]) -> Option<usize> {
        self.lookup.get(m).copied()
    }

    /// Coordinate of `(i, multiset k)` within the sector.
    pub fn index(&self, i: usize, k: usize) -> usize {
        i * self.inner() + k
    }

    /// Quadrature weight `h^{n+1} mult(M)` of each coordinate.
    pub fn weights(&self, h: f64) -> Vec<f64> {
        let base = h.powi(self.n as i32 + 1);
        (0..self.n_x).flat_map(|_| self.multiplicity.iter().map(move |m| base * m)).collect()
    }
}

/// `M + {i}` as a sorted multiset.
pub fn with_point(m: &[u16], i: usize) -> Vec<u16> {
    let mut out = m.to_vec();
    let at = out.partition_point(|v| (*v as usize) <= i);
    out.insert(at, i as u16);
    out
}

/// `M - {j}` for `j ∈ M`.
pub fn without_point(m: &[u16], j: usize) -> Vec<u16> {
    let mut out = m.to_vec();
    let at = out.iter().position(|v| *v as usize == j).expect("point in multiset");
    out.remove(at);
    out
}

/// Distinct entries of a sorted multiset.
pub fn distinct(m: &[u16]) -> impl Iterator<Item = usize> + '_ {
    m.iter().enumerate().filter(move |(k, v)| *k == 0 || m[k - 1] != **v).map(|(_, v)| *v as usize)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_and_multiplicities() {
        assert_eq!(multiset_count(8, 2), 36);
        assert_eq!(multiset_count(16, 2), 136);
        assert_eq!(multiset_count(16, 0), 1);
        for (nx, n) in [(5, 0), (5, 1), (5, 3), (8, 2), (16, 2)] {
            let b = SectorBasis::new(nx, n);
            assert_eq!(b.inner(), multiset_count(nx, n));
            // multiplicities of all multisets count the ordered tuples
            let total: f64 = (0..b.inner()).map(|k| b.multiset_multiplicity(k)).sum();
            assert_eq!(total, (nx as f64).powi(n as i32));
            for k in 0..b.inner() {
                assert_eq!(b.position(b.multiset(k)), Some(k));
            }
        }
        assert_eq!(multiplicity(&[1, 1, 3]), 3.0);
        assert_eq!(multiplicity(&[2, 2, 2]), 1.0);
        assert_eq!(multiplicity(&[0, 1, 2]), 6.0);
    }

    #[test]
    fn insertion_and_removal() {
        assert_eq!(with_point(&[1, 3], 2), vec![1, 2, 3]);
        assert_eq!(with_point(&[1, 3], 3), vec![1, 3, 3]);
        assert_eq!(with_point(&[], 0), vec![0]);
        assert_eq!(without_point(&[1, 3, 3], 3), vec![1, 3]);
        assert_eq!(distinct(&[0, 0, 2, 5, 5]).collect::<Vec<_>>(), vec![0, 2, 5]);
    }

    #[test]
    fn weights_integrate_symmetric_tuples() {
        let b = SectorBasis::new(4, 2);
        let w = b.weights(0.5);
        assert_eq!(w.len(), 4 * 10);
        let total: f64 = w.iter().sum();
        assert!((total - 4.0f64.powi(3) * 0.5f64.powi(3)).abs() < 1e-14);
    }
}
