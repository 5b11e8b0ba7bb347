//! Exact minimum set cover and maximum clique over `u64` masks.
//!
//! Shared by the minimal disambiguation search, covering numbers, and
//! hitting-set computation. Universe sizes are capped at 64 elements;
//! callers enforce their own capacity errors before reaching this module.

/// Minimum-cardinality selection of `candidates` whose union covers
/// `universe`. Returns `None` when the union of all candidates misses
/// part of the universe. Deterministic: candidates are tried in index
/// order and only strictly better solutions replace the incumbent.
///
/// `lower_bound` lets callers pass an external bound (an LP relaxation,
/// say) used purely to stop early once matched.
pub(crate) fn min_cover(universe: u64, candidates: &[u64], lower_bound: usize) -> Option<Vec<usize>> {
    if universe == 0 {
        return Some(Vec::new());
    }
    let reachable = candidates.iter().fold(0u64, |acc, c| acc | c);
    if reachable & universe != universe {
        return None;
    }

    // Greedy incumbent.
    let mut incumbent = Vec::new();
    let mut remaining = universe;
    while remaining != 0 {
        let (best_idx, best_gain) = candidates
            .iter()
            .enumerate()
            .map(|(i, c)| (i, (c & remaining).count_ones()))
            .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
            .expect("candidates nonempty when universe reachable");
        debug_assert!(best_gain > 0);
        incumbent.push(best_idx);
        remaining &= !candidates[best_idx];
    }
    incumbent.sort_unstable();
    if incumbent.len() <= lower_bound {
        return Some(incumbent);
    }

    fn search(
        universe: u64,
        candidates: &[u64],
        remaining: u64,
        chosen: &mut Vec<usize>,
        best: &mut Vec<usize>,
        lower_bound: usize,
    ) {
        if best.len() <= lower_bound {
            return;
        }
        if remaining == 0 {
            if chosen.len() < best.len() {
                *best = chosen.clone();
            }
            return;
        }
        // Optimistic bound: every further pick covers at most `max_gain`.
        let max_gain = candidates
            .iter()
            .map(|c| (c & remaining).count_ones() as usize)
            .max()
            .unwrap_or(0);
        if max_gain == 0 {
            return;
        }
        let needed = remaining.count_ones() as usize;
        if chosen.len() + needed.div_ceil(max_gain) >= best.len() {
            return;
        }
        // Branch on the lowest uncovered element.
        let element = remaining.trailing_zeros() as u64;
        let bit = 1u64 << element;
        for (i, c) in candidates.iter().enumerate() {
            if c & bit != 0 {
                chosen.push(i);
                search(universe, candidates, remaining & !c, chosen, best, lower_bound);
                chosen.pop();
                if best.len() <= lower_bound {
                    return;
                }
            }
        }
    }

    let mut best = incumbent;
    let mut chosen = Vec::new();
    search(universe, candidates, universe, &mut chosen, &mut best, lower_bound);
    best.sort_unstable();
    Some(best)
}

/// Maximum clique of the graph given by adjacency masks (vertex `i`
/// adjacent to the bits of `adj[i]`). Deterministic branch and bound.
pub(crate) fn max_clique(adj: &[u64]) -> Vec<usize> {
    let n = adj.len();
    let mut best: Vec<usize> = Vec::new();

    fn extend(adj: &[u64], candidates: u64, current: &mut Vec<usize>, best: &mut Vec<usize>) {
        if current.len() + candidates.count_ones() as usize <= best.len() {
            return;
        }
        if candidates == 0 {
            if current.len() > best.len() {
                *best = current.clone();
            }
            return;
        }
        let mut rest = candidates;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            if current.len() + 1 + rest.count_ones() as usize <= best.len() {
                return;
            }
            current.push(v);
            extend(adj, candidates & adj[v] & !((1u64 << v) | (1u64.wrapping_shl(v as u32) - 1)), current, best);
            current.pop();
        }
    }

    let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut current = Vec::new();
    extend(adj, all, &mut current, &mut best);
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn min_cover_small_cases() {
        assert_eq!(min_cover(0, &[], 0), Some(vec![]));
        assert_eq!(min_cover(0b111, &[0b011, 0b100, 0b111], 0), Some(vec![2]));
        assert_eq!(min_cover(0b111, &[0b011, 0b100], 0), Some(vec![0, 1]));
        assert_eq!(min_cover(0b11, &[0b01], 0), None);
    }

    #[test]
    fn min_cover_prefers_optimal_over_greedy() {
        // Greedy grabs the big middle set, optimum uses the two ends.
        let candidates = [0b00111, 0b11100, 0b01110];
        assert_eq!(min_cover(0b11111, &candidates, 0), Some(vec![0, 1]));
    }

    #[test]
    fn max_clique_triangle_plus_pendant() {
        // Vertices 0-1-2 form a triangle; 3 attaches to 2 only.
        let adj = [0b0110, 0b0101, 0b1011, 0b0100];
        assert_eq!(max_clique(&adj), vec![0, 1, 2]);
    }

    #[test]
    fn max_clique_empty_graph() {
        let adj = [0u64, 0, 0];
        assert_eq!(max_clique(&adj).len(), 1);
    }
}
