//! Lexicographic indexing of edges and triangles of the full simplex on
//! vertices `1..=n`.

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

pub fn num_edges(n: usize) -> usize {
    binomial(n, 2)
}

pub fn num_triangles(n: usize) -> usize {
    binomial(n, 3)
}

/// Index of `{u, v}`, `1 <= u < v <= n`.
#[inline]
pub fn edge_index(n: usize, u: usize, v: usize) -> usize {
    debug_assert!(1 <= u && u < v && v <= n);
    (u - 1) * (2 * n - u) / 2 + (v - u - 1)
}

/// All edges in index order.
pub fn edges(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(num_edges(n));
    for u in 1..=n {
        for v in u + 1..=n {
            out.push((u, v));
        }
    }
    out
}

/// All triangles `[u, v, w]`, `u < v < w`, in index order.
pub fn triangles(n: usize) -> Vec<[usize; 3]> {
    let mut out = Vec::with_capacity(num_triangles(n));
    for u in 1..=n {
        for v in u + 1..=n {
            for w in v + 1..=n {
                out.push([u, v, w]);
            }
        }
    }
    out
}

/// Index of a sorted triangle in [`triangles`] order.
pub fn triangle_index(n: usize, t: [usize; 3]) -> usize {
    let [a, b, c] = t;
    debug_assert!(1 <= a && a < b && b < c && c <= n);
    let mut idx = 0;
    for x in 1..a {
        idx += binomial(n - x, 2);
    }
    for y in a + 1..b {
        idx += n - y;
    }
    idx + (c - b - 1)
}

/// The three edges of a sorted triangle, as `(u,v), (u,w), (v,w)`.
pub fn triangle_edges(t: [usize; 3]) -> [(usize, usize); 3] {
    let [u, v, w] = t;
    [(u, v), (u, w), (v, w)]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indices_are_positions() {
        for n in 2..9 {
            for (i, (u, v)) in edges(n).into_iter().enumerate() {
                assert_eq!(edge_index(n, u, v), i);
            }
            for (i, t) in triangles(n).into_iter().enumerate() {
                assert_eq!(triangle_index(n, t), i);
            }
            assert_eq!(triangles(n).len(), num_triangles(n));
        }
        assert_eq!(binomial(20, 10), 184_756);
    }
}
