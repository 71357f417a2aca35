//! Maximum-cardinality bipartite matching by augmenting paths.

/// `adjacency[left]` lists the right vertices compatible with `left`.
/// Returns matched `(left, right)` pairs sorted by `left`.
pub fn maximum_matching(adjacency: &[Vec<usize>], n_right: usize) -> Vec<(usize, usize)> {
    let mut owner = vec![usize::MAX; n_right];
    for left in 0..adjacency.len() {
        let mut seen = vec![false; n_right];
        augment(left, adjacency, &mut owner, &mut seen);
    }
    let mut pairs: Vec<(usize, usize)> = owner
        .iter()
        .enumerate()
        .filter(|(_, &l)| l != usize::MAX)
        .map(|(r, &l)| (l, r))
        .collect();
    pairs.sort_unstable();
    pairs
}

fn augment(left: usize, adjacency: &[Vec<usize>], owner: &mut [usize], seen: &mut [bool]) -> bool {
    for &right in &adjacency[left] {
        if seen[right] {
            continue;
        }
        seen[right] = true;
        if owner[right] == usize::MAX || augment(owner[right], adjacency, owner, seen) {
            owner[right] = left;
            return true;
        }
    }
    false
}
