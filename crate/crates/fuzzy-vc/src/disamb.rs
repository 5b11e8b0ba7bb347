//! Strong disambiguation: crisp families that refine every member of a
//! fuzzy set system.
//!
//! A crisp set refines a fuzzy set when it contains the whole plus part
//! and misses the whole minus part. Three constructions are offered:
//! the per-set baseline, a greedy merge, and the exact minimum (branch
//! and bound over the crisp-set lattice, desk scale only).

use std::collections::BTreeSet;

use crate::cover::min_cover;
use crate::system::{FuzzySetSystem, SetSystem};
use crate::{Error, Result};

/// Ground-size limit for the exact minimal search (2^ground candidates).
pub const MINIMAL_GROUND_LIMIT: usize = 14;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DisambiguationMode {
    /// One crisp set per member: its plus part.
    Trivial,
    /// Repeatedly pick the merged plus-closure covering the most
    /// not-yet-refined members.
    Greedy,
    /// Exact minimum cardinality.
    Minimal,
}

/// True when every member of `system` is refined by some set of `crisp`.
pub fn verify_disambiguation(system: &FuzzySetSystem, crisp: &SetSystem) -> bool {
    crisp.ground_size() == system.ground_size()
        && system
            .sets()
            .iter()
            .all(|s| crisp.sets().iter().any(|c| s.refined_by(c)))
}

pub fn strong_disambiguation(
    system: &FuzzySetSystem,
    mode: DisambiguationMode,
) -> Result<SetSystem> {
    let out = match mode {
        DisambiguationMode::Trivial => trivial(system),
        DisambiguationMode::Greedy => greedy(system),
        DisambiguationMode::Minimal => minimal(system)?,
    };
    debug_assert!(verify_disambiguation(system, &out));
    Ok(out)
}

fn trivial(system: &FuzzySetSystem) -> SetSystem {
    let mut seen = BTreeSet::new();
    let mut sets = Vec::new();
    for s in system.sets() {
        if seen.insert(s.plus().to_vec()) {
            sets.push(s.plus().to_vec());
        }
    }
    SetSystem::new(system.ground_size(), sets).expect("plus parts are in range")
}

fn greedy(system: &FuzzySetSystem) -> SetSystem {
    let baseline = trivial(system);
    let mut remaining: Vec<usize> = (0..system.len()).collect();
    let mut chosen: Vec<Vec<usize>> = Vec::new();
    while !remaining.is_empty() {
        let mut best: Option<(usize, Vec<usize>)> = None;
        for &seed in &remaining {
            // Grow a compatible group around the seed, in index order.
            let mut plus: BTreeSet<usize> =
                system.sets()[seed].plus().iter().copied().collect();
            let mut minus: BTreeSet<usize> =
                system.sets()[seed].minus().iter().copied().collect();
            for &other in &remaining {
                if other == seed {
                    continue;
                }
                let o = &system.sets()[other];
                let compatible = o.plus().iter().all(|x| !minus.contains(x))
                    && o.minus().iter().all(|x| !plus.contains(x));
                if compatible {
                    plus.extend(o.plus().iter().copied());
                    minus.extend(o.minus().iter().copied());
                }
            }
            let candidate: Vec<usize> = plus.into_iter().collect();
            let covered = remaining
                .iter()
                .filter(|&&i| system.sets()[i].refined_by(&candidate))
                .count();
            let better = match &best {
                None => true,
                Some((c, _)) => covered > *c,
            };
            if better {
                best = Some((covered, candidate));
            }
        }
        let (_, candidate) = best.expect("remaining nonempty");
        remaining.retain(|&i| !system.sets()[i].refined_by(&candidate));
        chosen.push(candidate);
    }
    // The merge never needs to beat the baseline, but must never lose to it.
    if chosen.len() > baseline.len() {
        return baseline;
    }
    SetSystem::new(system.ground_size(), chosen).expect("unions of plus parts are in range")
}

fn minimal(system: &FuzzySetSystem) -> Result<SetSystem> {
    let ground = system.ground_size();
    if ground > MINIMAL_GROUND_LIMIT {
        return Err(Error::capacity(format!(
            "minimal disambiguation enumerates 2^{ground} crisp sets; limit is 2^{MINIMAL_GROUND_LIMIT}"
        )));
    }
    if system.len() > 64 {
        return Err(Error::capacity(format!(
            "minimal disambiguation supports at most 64 member sets, got {}",
            system.len()
        )));
    }
    if system.is_empty() {
        return SetSystem::new(ground, Vec::new());
    }

    // Plus and minus parts as ground bitmasks, per member.
    let member_masks: Vec<(u64, u64)> = system
        .sets()
        .iter()
        .map(|s| {
            let plus = s.plus().iter().fold(0u64, |m, &x| m | 1 << x);
            let minus = s.minus().iter().fold(0u64, |m, &x| m | 1 << x);
            (plus, minus)
        })
        .collect();

    // One representative crisp set per distinct coverage pattern: the
    // numerically smallest candidate, found by ascending enumeration.
    let universe: u64 = if system.len() == 64 {
        u64::MAX
    } else {
        (1u64 << system.len()) - 1
    };
    let mut coverages: Vec<u64> = Vec::new();
    let mut reps: Vec<u64> = Vec::new();
    let mut seen: BTreeSet<u64> = BTreeSet::new();
    for candidate in 0u64..(1u64 << ground) {
        let mut coverage = 0u64;
        for (i, &(plus, minus)) in member_masks.iter().enumerate() {
            if plus & candidate == plus && candidate & minus == 0 {
                coverage |= 1 << i;
            }
        }
        if coverage != 0 && seen.insert(coverage) {
            coverages.push(coverage);
            reps.push(candidate);
        }
    }

    let chosen = min_cover(universe, &coverages, 0).ok_or_else(|| {
        Error::Internal("every fuzzy set is refined by its own plus part".into())
    })?;
    let sets = chosen
        .into_iter()
        .map(|i| {
            let mask = reps[i];
            (0..ground).filter(|x| mask >> x & 1 == 1).collect()
        })
        .collect();
    SetSystem::new(ground, sets)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::FuzzySet;

    fn system(ground: usize, sets: Vec<FuzzySet>) -> FuzzySetSystem {
        FuzzySetSystem::new(ground, sets).unwrap()
    }

    #[test]
    fn crisp_set_disambiguates_itself() {
        let f = system(3, vec![FuzzySet::crisp([0], 3)]);
        let out = strong_disambiguation(&f, DisambiguationMode::Trivial).unwrap();
        assert_eq!(out.sets(), &[vec![0]]);
        assert_eq!(out.len(), 1);
    }

    #[test]
    fn opposite_fuzzy_sets_need_two_crisp_sets() {
        let f = system(
            1,
            vec![FuzzySet::new([0], []).unwrap(), FuzzySet::new([], [0]).unwrap()],
        );
        let out = strong_disambiguation(&f, DisambiguationMode::Minimal).unwrap();
        assert_eq!(out.len(), 2);
        assert!(verify_disambiguation(&f, &out));
    }

    #[test]
    fn indeterminate_set_merges_into_neighbor() {
        let f = system(
            1,
            vec![FuzzySet::indeterminate(), FuzzySet::new([0], []).unwrap()],
        );
        let out = strong_disambiguation(&f, DisambiguationMode::Minimal).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out.sets(), &[vec![0]]);
    }

    #[test]
    fn minimal_rejects_large_grounds() {
        let f = system(20, vec![FuzzySet::indeterminate()]);
        assert!(matches!(
            strong_disambiguation(&f, DisambiguationMode::Minimal),
            Err(Error::Capacity(_))
        ));
    }

    #[test]
    fn mode_sizes_are_ordered() {
        // Random-ish mixed instances; sizes must satisfy minimal <= greedy <= trivial.
        let cases = vec![
            system(
                4,
                vec![
                    FuzzySet::new([0], [3]).unwrap(),
                    FuzzySet::new([1], [3]).unwrap(),
                    FuzzySet::new([0, 1], []).unwrap(),
                    FuzzySet::new([3], [0, 1]).unwrap(),
                    FuzzySet::new([], [0]).unwrap(),
                ],
            ),
            system(
                3,
                vec![
                    FuzzySet::new([0], [1]).unwrap(),
                    FuzzySet::new([1], [0]).unwrap(),
                    FuzzySet::new([2], []).unwrap(),
                    FuzzySet::indeterminate(),
                ],
            ),
        ];
        for f in cases {
            let trivial = strong_disambiguation(&f, DisambiguationMode::Trivial).unwrap();
            let greedy = strong_disambiguation(&f, DisambiguationMode::Greedy).unwrap();
            let minimal = strong_disambiguation(&f, DisambiguationMode::Minimal).unwrap();
            for out in [&trivial, &greedy, &minimal] {
                assert!(verify_disambiguation(&f, out));
            }
            assert!(minimal.len() <= greedy.len());
            assert!(greedy.len() <= trivial.len());
        }
    }
}
