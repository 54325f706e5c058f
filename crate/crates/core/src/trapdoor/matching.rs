//! Bipartite matching for the wreath-product transporter.

use std::collections::VecDeque;

const FREE: usize = usize::MAX;

/// Size of a maximum matching of the bipartite graph with `left` vertices
/// and adjacency lists into `0..right` (Hopcroft–Karp).
pub fn max_matching(adj: &[Vec<usize>], right: usize) -> (usize, Vec<usize>) {
    let left = adj.len();
    let mut match_l = vec![FREE; left];
    let mut match_r = vec![FREE; right];
    let mut dist = vec![0usize; left];
    let mut size = 0;
    loop {
        // Layer the free left vertices.
        let mut queue = VecDeque::new();
        for u in 0..left {
            if match_l[u] == FREE {
                dist[u] = 0;
                queue.push_back(u);
            } else {
                dist[u] = usize::MAX;
            }
        }
        let mut found = false;
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                let w = match_r[v];
                if w == FREE {
                    found = true;
                } else if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        if !found {
            return (size, match_l);
        }
        for u in 0..left {
            if match_l[u] == FREE && augment(u, adj, &mut match_l, &mut match_r, &mut dist) {
                size += 1;
            }
        }
    }
}

fn augment(u: usize, adj: &[Vec<usize>], ml: &mut [usize], mr: &mut [usize], dist: &mut [usize]) -> bool {
    for &v in &adj[u] {
        let w = mr[v];
        if w == FREE || (dist[w] == dist[u] + 1 && augment(w, adj, ml, mr, dist)) {
            ml[u] = v;
            mr[v] = u;
            return true;
        }
    }
    dist[u] = usize::MAX;
    false
}

/// The perfect matching whose image list `(k(0), k(1), ..)` is
/// lexicographically least, if one exists.
pub fn least_perfect_matching(adj: &[Vec<usize>]) -> Option<Vec<usize>> {
    let m = adj.len();
    if max_matching(adj, m).0 < m {
        return None;
    }
    let mut fixed: Vec<usize> = Vec::with_capacity(m);
    for i in 0..m {
        let mut options = adj[i].clone();
        options.sort_unstable();
        let pick = options.into_iter().find(|&j| {
            if fixed.contains(&j) {
                return false;
            }
            // Remaining graph after fixing rows 0..=i.
            let mut used = fixed.clone();
            used.push(j);
            let rest: Vec<Vec<usize>> =
                adj[i + 1..].iter().map(|row| row.iter().copied().filter(|c| !used.contains(c)).collect()).collect();
            max_matching(&rest, m).0 == rest.len()
        })?;
        fixed.push(pick);
    }
    Some(fixed)
}
