//! Maximum-weight perfect matching on a dense square matrix.

/// Returns `(max_σ Σ_i w[i][σ(i)], σ)` for a row-major `n×n` weight matrix,
/// using the O(n³) Hungarian method with row/column potentials.
///
/// Ties are broken in favour of the identity permutation.
pub fn max_weight_assignment(weights: &[f64], n: usize) -> (f64, Vec<usize>) {
    assert_eq!(weights.len(), n * n, "weight matrix must be n x n");
    if n == 0 {
        return (0.0, Vec::new());
    }
    let cost = |i: usize, j: usize| -weights[i * n + j];

    // 1-based arrays, column 0 is a sentinel
    let inf = f64::INFINITY;
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut matched_row = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        matched_row[0] = i;
        let mut j0 = 0;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = matched_row[j0];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[matched_row[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if matched_row[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            matched_row[j0] = matched_row[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut perm = vec![0usize; n];
    for j in 1..=n {
        perm[matched_row[j] - 1] = j - 1;
    }
    let best: f64 = perm.iter().enumerate().map(|(i, &j)| weights[i * n + j]).sum();
    let identity: f64 = (0..n).map(|i| weights[i * n + i]).sum();
    if identity >= best - 1e-15 {
        return (identity.max(best), (0..n).collect());
    }
    (best, perm)
}
