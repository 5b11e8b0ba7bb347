//! Transversal numbers of crisp set systems: the exact LP relaxation,
//! its packing dual, and the integer minimum by branch and bound.

use num_traits::{One, Zero};

use crate::cover::min_cover;
use crate::lp::{solve_lp, LpProblem, LpStatus, Relation, Sense};
use crate::rat::Rat;
use crate::system::SetSystem;
use crate::{Error, Result};

fn check_no_empty_sets(system: &SetSystem) -> Result<()> {
    if let Some(i) = system.sets().iter().position(|s| s.is_empty()) {
        return Err(Error::Infeasible(format!(
            "set {i} is empty, so no transversal exists"
        )));
    }
    Ok(())
}

/// Fractional transversal number: minimize total point weight subject to
/// every set carrying weight at least 1. Returns the exact optimum and
/// one optimal weight vector (deterministic).
pub fn fractional_transversal(system: &SetSystem) -> Result<(Rat, Vec<Rat>)> {
    check_no_empty_sets(system)?;
    if system.is_empty() {
        return Ok((Rat::zero(), vec![Rat::zero(); system.ground_size()]));
    }
    let n = system.ground_size();
    let mut p = LpProblem::new(Sense::Min, vec![Rat::one(); n]);
    for s in system.sets() {
        let mut row = vec![Rat::zero(); n];
        for &x in s {
            row[x] = Rat::one();
        }
        p.push_constraint(row, Relation::Ge, Rat::one());
    }
    let sol = solve_lp(&p)?;
    match sol.status {
        LpStatus::Optimal => Ok((sol.optimum, sol.primal)),
        status => Err(Error::Internal(format!(
            "transversal LP over nonempty sets reported {status:?}"
        ))),
    }
}

/// Fractional packing number: maximize total set weight subject to every
/// point carrying weight at most 1 — the LP dual of the fractional
/// transversal. The optimum is rational along with its weights.
pub fn fractional_packing(system: &SetSystem) -> Result<(Rat, Vec<Rat>)> {
    check_no_empty_sets(system)?;
    if system.is_empty() {
        return Ok((Rat::zero(), Vec::new()));
    }
    let k = system.len();
    let mut p = LpProblem::new(Sense::Max, vec![Rat::one(); k]);
    for x in 0..system.ground_size() {
        let mut row = vec![Rat::zero(); k];
        for (i, _) in system.sets().iter().enumerate().filter(|(i, _)| system.contains(*i, x)) {
            row[i] = Rat::one();
        }
        p.push_constraint(row, Relation::Le, Rat::one());
    }
    let sol = solve_lp(&p)?;
    match sol.status {
        LpStatus::Optimal => Ok((sol.optimum, sol.primal)),
        status => Err(Error::Internal(format!(
            "packing LP over nonempty sets reported {status:?}"
        ))),
    }
}

/// An exact minimum transversal (hitting set), by branch and bound with
/// the LP optimum as the root lower bound.
pub fn optimal_transversal(system: &SetSystem) -> Result<Vec<usize>> {
    check_no_empty_sets(system)?;
    if system.is_empty() {
        return Ok(Vec::new());
    }
    if system.len() > 64 {
        return Err(Error::capacity(format!(
            "hitting-set search supports at most 64 sets, got {}",
            system.len()
        )));
    }
    let universe: u64 = if system.len() == 64 {
        u64::MAX
    } else {
        (1u64 << system.len()) - 1
    };
    let candidates: Vec<u64> = (0..system.ground_size())
        .map(|x| {
            system
                .sets()
                .iter()
                .enumerate()
                .filter(|(i, _)| system.contains(*i, x))
                .fold(0u64, |m, (i, _)| m | 1 << i)
        })
        .collect();
    let (tau_star, _) = fractional_transversal(system)?;
    let lower = tau_star.ceil().to_integer();
    let lower: usize = lower.try_into().unwrap_or(0);
    min_cover(universe, &candidates, lower)
        .ok_or_else(|| Error::Internal("nonempty sets admit the full-ground transversal".into()))
}

/// Minimum transversal size.
pub fn transversal_number(system: &SetSystem) -> Result<usize> {
    Ok(optimal_transversal(system)?.len())
}

/// True when `points` meets every member set.
pub fn is_transversal(system: &SetSystem, points: &[usize]) -> bool {
    system
        .sets()
        .iter()
        .enumerate()
        .all(|(i, _)| points.iter().any(|&x| system.contains(i, x)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    fn triangle() -> SetSystem {
        SetSystem::new(3, vec![vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap()
    }

    #[test]
    fn triangle_fractional_values() {
        let (tau, weights) = fractional_transversal(&triangle()).unwrap();
        assert_eq!(tau, rat(3, 2));
        assert_eq!(weights, vec![rat(1, 2), rat(1, 2), rat(1, 2)]);
        let (nu, _) = fractional_packing(&triangle()).unwrap();
        assert_eq!(nu, rat(3, 2));
    }

    #[test]
    fn singleton_and_empty_families() {
        let single = SetSystem::new(1, vec![vec![0]]).unwrap();
        assert_eq!(fractional_transversal(&single).unwrap().0, rat(1, 1));

        let none = SetSystem::new(3, vec![]).unwrap();
        let (tau, weights) = fractional_transversal(&none).unwrap();
        assert_eq!(tau, rat(0, 1));
        assert!(weights.iter().all(|w| w.is_zero()));
        assert_eq!(fractional_packing(&none).unwrap().0, rat(0, 1));
    }

    #[test]
    fn duplicate_singletons_share_capacity() {
        let s = SetSystem::new(1, vec![vec![0], vec![0]]).unwrap();
        let (nu, weights) = fractional_packing(&s).unwrap();
        assert_eq!(nu, rat(1, 1));
        let total: Rat = weights.iter().fold(Rat::zero(), |a, w| a + w);
        assert_eq!(total, rat(1, 1));
    }

    #[test]
    fn empty_member_set_is_infeasible() {
        let s = SetSystem::new(2, vec![vec![0], vec![]]).unwrap();
        assert!(matches!(fractional_transversal(&s), Err(Error::Infeasible(_))));
        assert!(matches!(fractional_packing(&s), Err(Error::Infeasible(_))));
        assert!(matches!(transversal_number(&s), Err(Error::Infeasible(_))));
    }

    #[test]
    fn integer_transversals() {
        assert_eq!(transversal_number(&triangle()).unwrap(), 2);
        let disjoint = SetSystem::new(2, vec![vec![0], vec![1]]).unwrap();
        assert_eq!(transversal_number(&disjoint).unwrap(), 2);
        let one = SetSystem::new(3, vec![vec![0, 1, 2]]).unwrap();
        assert_eq!(transversal_number(&one).unwrap(), 1);
    }

    #[test]
    fn rounding_chain_holds() {
        let tri = triangle();
        let (tau_star, _) = fractional_transversal(&tri).unwrap();
        let tau = transversal_number(&tri).unwrap();
        let ceil: usize = tau_star.ceil().to_integer().try_into().unwrap();
        assert!(ceil <= tau);
    }
}
