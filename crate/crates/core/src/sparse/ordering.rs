use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap};

use super::{CscMatrix, Scalar};

/// Minimum-degree fill-reducing ordering on the pattern of `A + Aᵀ`.
///
/// Plain (non-approximate) minimum degree on an explicit elimination graph.
/// Ties go to the lowest index, so the result is deterministic. Adequate for
/// the desk-scale circuit matrices handled here; the cost grows with fill.
pub fn minimum_degree<T: Scalar>(a: &CscMatrix<T>) -> Vec<usize> {
    assert_eq!(a.nrows(), a.ncols(), "ordering needs a square matrix");
    let n = a.nrows();
    let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for (i, j, _) in a.triplets() {
        if i != j {
            adj[i].insert(j);
            adj[j].insert(i);
        }
    }
    let mut heap: BinaryHeap<Reverse<(usize, usize)>> =
        (0..n).map(|v| Reverse((adj[v].len(), v))).collect();
    let mut eliminated = vec![false; n];
    let mut order = Vec::with_capacity(n);
    while let Some(Reverse((deg, v))) = heap.pop() {
        if eliminated[v] || deg != adj[v].len() {
            continue;
        }
        eliminated[v] = true;
        order.push(v);
        let nbrs: Vec<usize> = std::mem::take(&mut adj[v]).into_iter().collect();
        for &u in &nbrs {
            adj[u].remove(&v);
        }
        for (k, &u) in nbrs.iter().enumerate() {
            for &w in &nbrs[k + 1..] {
                adj[u].insert(w);
                adj[w].insert(u);
            }
        }
        for &u in &nbrs {
            heap.push(Reverse((adj[u].len(), u)));
        }
    }
    debug_assert_eq!(order.len(), n);
    order
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_is_a_permutation() {
        let t: Vec<(usize, usize, f64)> = (0..6)
            .flat_map(|i| [(i, i, 4.0), (i, (i + 1) % 6, -1.0)])
            .collect();
        let a = CscMatrix::from_triplets(6, 6, &t);
        let mut q = minimum_degree(&a);
        q.sort_unstable();
        assert_eq!(q, (0..6).collect::<Vec<_>>());
    }

    #[test]
    fn arrow_matrix_eliminates_hub_last() {
        // Node 0 connects to everything; eliminating it first would fill the
        // whole matrix.
        let n = 8;
        let mut t = vec![];
        for i in 0..n {
            t.push((i, i, 1.0));
            if i > 0 {
                t.push((0, i, 1.0));
                t.push((i, 0, 1.0));
            }
        }
        let a = CscMatrix::from_triplets(n, n, &t);
        let q = minimum_degree(&a);
        assert_ne!(q[0], 0);
        assert!(q.iter().position(|&v| v == 0).unwrap() >= n - 2);
    }
}
