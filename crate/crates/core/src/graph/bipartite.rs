use std::collections::VecDeque;

use crate::error::{Error, Result};

const FREE: usize = usize::MAX;

/// Result of a bipartite perfect matching search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BipartiteOutcome {
    /// `mate[left] = right`.
    Perfect(Vec<usize>),
    /// A left set with fewer neighbours than members.
    Deficient { left: Vec<usize>, neighbours: Vec<usize> },
}

/// Hopcroft-Karp with neighbours scanned in ascending order.
///
/// When no perfect matching exists the witness is every left vertex reachable
/// by an alternating path from an unmatched left vertex; its neighbourhood is
/// matched entirely inside the set, so it is smaller by the number of free
/// vertices.
pub fn bipartite_perfect_matching(
    left_count: usize,
    right_count: usize,
    adjacency: &[Vec<usize>],
) -> Result<BipartiteOutcome> {
    if left_count != right_count {
        return Err(Error::usage(format!("bipartite sides differ: {left_count} left vs {right_count} right")));
    }
    if adjacency.len() != left_count {
        return Err(Error::usage(format!("adjacency lists {} left vertices, expected {left_count}", adjacency.len())));
    }
    let mut adj: Vec<Vec<usize>> = adjacency.to_vec();
    for list in &mut adj {
        list.sort_unstable();
        list.dedup();
        if list.iter().any(|&r| r >= right_count) {
            return Err(Error::usage("adjacency names a right vertex out of range"));
        }
    }

    let n = left_count;
    let mut mate_l = vec![FREE; n];
    let mut mate_r = vec![FREE; n];
    let mut dist = vec![0usize; n];
    loop {
        if !layer(&adj, &mate_l, &mate_r, &mut dist) {
            break;
        }
        for u in 0..n {
            if mate_l[u] == FREE {
                augment(u, &adj, &mut mate_l, &mut mate_r, &mut dist);
            }
        }
    }

    if mate_l.iter().all(|&r| r != FREE) {
        return Ok(BipartiteOutcome::Perfect(mate_l));
    }
    let mut seen_l = vec![false; n];
    let mut seen_r = vec![false; n];
    let mut queue: VecDeque<usize> = (0..n).filter(|&u| mate_l[u] == FREE).collect();
    for &u in &queue {
        seen_l[u] = true;
    }
    while let Some(u) = queue.pop_front() {
        for &r in &adj[u] {
            if !seen_r[r] {
                seen_r[r] = true;
                let w = mate_r[r];
                if w != FREE && !seen_l[w] {
                    seen_l[w] = true;
                    queue.push_back(w);
                }
            }
        }
    }
    Ok(BipartiteOutcome::Deficient {
        left: (0..n).filter(|&u| seen_l[u]).collect(),
        neighbours: (0..n).filter(|&r| seen_r[r]).collect(),
    })
}

/// BFS layering from free left vertices; true if a free right vertex is reachable.
fn layer(adj: &[Vec<usize>], mate_l: &[usize], mate_r: &[usize], dist: &mut [usize]) -> bool {
    let mut queue = VecDeque::new();
    for u in 0..adj.len() {
        if mate_l[u] == FREE {
            dist[u] = 0;
            queue.push_back(u);
        } else {
            dist[u] = FREE;
        }
    }
    let mut found = false;
    while let Some(u) = queue.pop_front() {
        for &r in &adj[u] {
            let w = mate_r[r];
            if w == FREE {
                found = true;
            } else if dist[w] == FREE {
                dist[w] = dist[u] + 1;
                queue.push_back(w);
            }
        }
    }
    found
}

fn augment(u: usize, adj: &[Vec<usize>], mate_l: &mut [usize], mate_r: &mut [usize], dist: &mut [usize]) -> bool {
    for &r in &adj[u] {
        let w = mate_r[r];
        let ok = w == FREE || (dist[w] == dist[u] + 1 && augment(w, adj, mate_l, mate_r, dist));
        if ok {
            mate_l[u] = r;
            mate_r[r] = u;
            return true;
        }
    }
    dist[u] = FREE;
    false
}
