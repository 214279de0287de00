use std::collections::VecDeque;

/// Reverse Cuthill–McKee ordering of a symmetric sparsity graph given as
/// adjacency lists. Returns `perm` with `perm[new] = old`.
///
/// Each connected component starts from a pseudo-peripheral vertex found by
/// repeated breadth-first sweeps from a minimum-degree vertex.
pub fn reverse_cuthill_mckee(adjacency: &[Vec<usize>]) -> Vec<usize> {
    let n = adjacency.len();
    let degree: Vec<usize> = adjacency.iter().map(Vec::len).collect();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut by_degree: Vec<usize> = (0..n).collect();
    by_degree.sort_by_key(|&v| (degree[v], v));

    for &seed in &by_degree {
        if visited[seed] {
            continue;
        }
        let start = pseudo_peripheral(adjacency, &degree, seed);
        let mut queue = VecDeque::from([start]);
        visited[start] = true;
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut next: Vec<usize> = adjacency[v].iter().copied().filter(|&w| !visited[w]).collect();
            next.sort_by_key(|&w| (degree[w], w));
            next.dedup();
            for w in next {
                visited[w] = true;
                queue.push_back(w);
            }
        }
    }
    order.reverse();
    order
}

fn pseudo_peripheral(adjacency: &[Vec<usize>], degree: &[usize], seed: usize) -> usize {
    let mut start = seed;
    let mut eccentricity = 0;
    for _ in 0..8 {
        let levels = bfs_levels(adjacency, start);
        let depth = *levels.iter().flatten().max().unwrap_or(&0);
        if depth <= eccentricity && start != seed {
            break;
        }
        eccentricity = depth;
        start = (0..adjacency.len())
            .filter(|&v| levels[v] == Some(depth))
            .min_by_key(|&v| (degree[v], v))
            .unwrap_or(start);
    }
    start
}

fn bfs_levels(adjacency: &[Vec<usize>], start: usize) -> Vec<Option<usize>> {
    let mut level = vec![None; adjacency.len()];
    level[start] = Some(0);
    let mut queue = VecDeque::from([start]);
    while let Some(v) = queue.pop_front() {
        let l = level[v].unwrap();
        for &w in &adjacency[v] {
            if level[w].is_none() {
                level[w] = Some(l + 1);
                queue.push_back(w);
            }
        }
    }
    level
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bandwidth(adj: &[Vec<usize>], perm: &[usize]) -> usize {
        let mut pos = vec![0; perm.len()];
        for (new, &old) in perm.iter().enumerate() {
            pos[old] = new;
        }
        adj.iter()
            .enumerate()
            .flat_map(|(v, ns)| ns.iter().map(move |&w| (v, w)))
            .map(|(v, w)| pos[v].abs_diff(pos[w]))
            .max()
            .unwrap_or(0)
    }

    #[test]
    fn grid_bandwidth_shrinks() {
        // 20x20 five-point grid numbered in a scrambled order
        let n = 20;
        let scramble = |i: usize| (i * 7919) % (n * n);
        let mut adj = vec![Vec::new(); n * n];
        for j in 0..n {
            for i in 0..n {
                let v = scramble(j * n + i);
                if i + 1 < n {
                    let w = scramble(j * n + i + 1);
                    adj[v].push(w);
                    adj[w].push(v);
                }
                if j + 1 < n {
                    let w = scramble((j + 1) * n + i);
                    adj[v].push(w);
                    adj[w].push(v);
                }
            }
        }
        let identity: Vec<usize> = (0..n * n).collect();
        let perm = reverse_cuthill_mckee(&adj);
        let mut sorted = perm.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, identity);
        assert!(bandwidth(&adj, &perm) <= n + 1, "bandwidth {}", bandwidth(&adj, &perm));
        assert!(bandwidth(&adj, &identity) > 5 * n);
    }

    #[test]
    fn handles_disconnected_graphs() {
        let adj = vec![vec![1], vec![0], vec![], vec![4], vec![3]];
        let mut p = reverse_cuthill_mckee(&adj);
        p.sort_unstable();
        assert_eq!(p, vec![0, 1, 2, 3, 4]);
    }
}
