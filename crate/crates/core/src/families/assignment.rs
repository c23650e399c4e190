//! Maximum-weight perfect matching on a complete bipartite weight matrix
//! (Hungarian method with potentials, O(k³)).

/// Returns `assignment[row] = col` maximizing the total weight of a dense
/// `k × k` matrix given row-major.
pub fn max_weight_assignment(k: usize, weight: &[f64]) -> Vec<usize> {
    debug_assert_eq!(weight.len(), k * k);
    if k == 0 {
        return Vec::new();
    }
    // minimise cost = -weight; 1-based arrays with a sentinel column 0
    let cost = |i: usize, j: usize| -weight[(i - 1) * k + (j - 1)];
    let mut u = vec![0.0; k + 1];
    let mut v = vec![0.0; k + 1];
    let mut matched_row = vec![0usize; k + 1];
    let mut way = vec![0usize; k + 1];
    let mut minv = vec![0.0; k + 1];
    let mut used = vec![false; k + 1];
    for i in 1..=k {
        matched_row[0] = i;
        let mut j0 = 0;
        minv.iter_mut().for_each(|x| *x = f64::INFINITY);
        used.iter_mut().for_each(|x| *x = false);
        loop {
            used[j0] = true;
            let i0 = matched_row[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=k {
                if !used[j] {
                    let cur = cost(i0, j) - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=k {
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
    let mut assignment = vec![0; k];
    for j in 1..=k {
        assignment[matched_row[j] - 1] = j - 1;
    }
    assignment
}
