//! ε-nets for fuzzy set systems and the net-based transversal pipeline.
//!
//! A set of points is an ε-net when it is not contained in the minus
//! part of any fuzzy set whose plus part carries mass at least ε. Nets
//! are produced three ways (seeded sampling at the dimension-driven
//! size, greedy covering, exhaustive minimum) and always re-verified on
//! construction.

use num_traits::{One, Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::approx::{find_eps_approximation, ApproxStrategy};
use crate::measure::DiscreteMeasure;
use crate::rat::{self, Rat};
use crate::system::FuzzySetSystem;
use crate::transversal::fractional_transversal;
use crate::FunctionClass;
use crate::{Error, Result};

/// Exhaustive net search enumerates all subsets of the ground set.
pub const EXHAUSTIVE_NET_GROUND_LIMIT: usize = 22;

/// Default multiplier for the sampled net size.
pub const DEFAULT_NET_CONSTANT: f64 = 16.0;
/// Default number of fresh sample streams before giving up.
pub const DEFAULT_NET_RETRIES: u32 = 64;

/// Entrywise clamp of a function class into `[r, s]`.
pub fn clamp_class(class: &FunctionClass, r: &Rat, s: &Rat) -> Result<FunctionClass> {
    class.clamped(r, s)
}

/// True when `points` is an ε-net for `system` with respect to `mu`:
/// every member whose plus part has mass at least `eps` fails to contain
/// the whole of `points` in its minus part.
pub fn is_eps_net(
    points: &[usize],
    system: &FuzzySetSystem,
    mu: &DiscreteMeasure,
    eps: &Rat,
) -> Result<bool> {
    if mu.len() != system.ground_size() {
        return Err(Error::domain("measure and system ground sizes differ"));
    }
    if let Some(&x) = points.iter().find(|&&x| x >= system.ground_size()) {
        return Err(Error::domain(format!(
            "net mentions point {x} outside ground 0..{}",
            system.ground_size()
        )));
    }
    for s in system.sets() {
        if &mu.mass(s.plus().iter().copied()) >= eps {
            let escapes = points.iter().any(|&x| !s.in_minus(x));
            if !escapes {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// A verified ε-net together with the verification statistics.
#[derive(Clone, Debug)]
pub struct NetCertificate {
    pub net: Vec<usize>,
    pub eps: Rat,
    pub checked_sets: usize,
    pub heavy_sets: usize,
}

impl NetCertificate {
    /// Builds the certificate by re-running the net check.
    pub fn verified(
        net: Vec<usize>,
        system: &FuzzySetSystem,
        mu: &DiscreteMeasure,
        eps: &Rat,
    ) -> Result<Self> {
        let mut net = net;
        net.sort_unstable();
        net.dedup();
        if !is_eps_net(&net, system, mu, eps)? {
            return Err(Error::Internal("candidate failed the net re-check".into()));
        }
        let heavy_sets = system
            .sets()
            .iter()
            .filter(|s| &mu.mass(s.plus().iter().copied()) >= eps)
            .count();
        Ok(NetCertificate {
            net,
            eps: eps.clone(),
            checked_sets: system.len(),
            heavy_sets,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NetStrategy {
    /// Draw `ceil(c · d · (1/eps) · ln(1/eps + e))` points from `mu`
    /// (`d` the VC-dimension), retrying on fresh seed-derived streams.
    Random { c: f64, seed: u64, retries: u32 },
    /// Repeatedly add the point escaping the most uncovered heavy sets.
    Greedy,
    /// Minimum-size net by subset enumeration.
    ExhaustiveMin,
}

impl NetStrategy {
    pub fn random(seed: u64) -> Self {
        NetStrategy::Random { c: DEFAULT_NET_CONSTANT, seed, retries: DEFAULT_NET_RETRIES }
    }
}

pub fn find_eps_net(
    system: &FuzzySetSystem,
    mu: &DiscreteMeasure,
    eps: &Rat,
    strategy: NetStrategy,
) -> Result<NetCertificate> {
    if !eps.is_positive() {
        return Err(Error::domain(format!(
            "eps must be positive, got {}",
            rat::format_rat(eps)
        )));
    }
    if mu.len() != system.ground_size() {
        return Err(Error::domain("measure and system ground sizes differ"));
    }
    let heavy: Vec<usize> = (0..system.len())
        .filter(|&i| &mu.mass(system.sets()[i].plus().iter().copied()) >= eps)
        .collect();
    if heavy.is_empty() {
        return NetCertificate::verified(Vec::new(), system, mu, eps);
    }
    match strategy {
        NetStrategy::Random { c, seed, retries } => {
            // Absent dimension (empty family) cannot reach here: an empty
            // family has no heavy sets.
            let d = system.vc_dimension().unwrap_or(0);
            let inv_eps = 1.0 / rat::rat_to_f64(eps);
            let size = (c * d as f64 * inv_eps * (inv_eps + std::f64::consts::E).ln()).ceil();
            let size = if size.is_finite() && size >= 0.0 { size as u64 } else { u64::MAX };
            for retry in 0..retries.max(1) {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(retry as u64);
                let draw: Vec<usize> = (0..size).map(|_| mu.sample(&mut rng)).collect();
                let mut candidate = draw;
                candidate.sort_unstable();
                candidate.dedup();
                if is_eps_net(&candidate, system, mu, eps)? {
                    return NetCertificate::verified(candidate, system, mu, eps);
                }
            }
            Err(Error::NotFound {
                reason: format!(
                    "no sampled net after {} retries of {} draws (d = {}, eps = {})",
                    retries.max(1),
                    size,
                    d,
                    rat::format_rat(eps)
                ),
                best_deviation: None,
            })
        }
        NetStrategy::Greedy => {
            let mut uncovered = heavy;
            let mut net = Vec::new();
            while !uncovered.is_empty() {
                let best = (0..system.ground_size())
                    .map(|x| {
                        let gain = uncovered
                            .iter()
                            .filter(|&&i| !system.sets()[i].in_minus(x))
                            .count();
                        (x, gain)
                    })
                    .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
                    .expect("ground is nonempty when heavy sets exist");
                let (x, gain) = best;
                if gain == 0 {
                    return Err(Error::Internal(
                        "heavy set with positive plus mass has full minus".into(),
                    ));
                }
                net.push(x);
                uncovered.retain(|&i| system.sets()[i].in_minus(x));
            }
            NetCertificate::verified(net, system, mu, eps)
        }
        NetStrategy::ExhaustiveMin => {
            let ground = system.ground_size();
            if ground > EXHAUSTIVE_NET_GROUND_LIMIT {
                return Err(Error::capacity(format!(
                    "exhaustive net search over 2^{ground} subsets; limit is 2^{EXHAUSTIVE_NET_GROUND_LIMIT}"
                )));
            }
            use itertools::Itertools;
            for size in 0..=ground {
                for candidate in (0..ground).combinations(size) {
                    if is_eps_net(&candidate, system, mu, eps)? {
                        return NetCertificate::verified(candidate, system, mu, eps);
                    }
                }
            }
            Err(Error::Internal(
                "the full ground set is an eps-net whenever heavy sets have nonempty plus".into(),
            ))
        }
    }
}

/// Builds an ε-net for the `(r, s)` slice of a function class out of a
/// δ-approximation of the clamped class, with `δ = (s - r)·eps/2`, half
/// the threshold under which the implication holds.
pub fn net_from_approximation(
    class: &FunctionClass,
    mu: &DiscreteMeasure,
    r: &Rat,
    s: &Rat,
    eps: &Rat,
    strategy: ApproxStrategy,
    size_cap: usize,
) -> Result<NetCertificate> {
    if !eps.is_positive() {
        return Err(Error::domain(format!(
            "eps must be positive, got {}",
            rat::format_rat(eps)
        )));
    }
    let clamped = class.clamped(r, s)?;
    let delta = (s - r) * eps / Rat::from_integer(2.into());
    let tuple = find_eps_approximation(&clamped, mu, &delta, strategy, size_cap)?;
    let slice = class.slice(r, s)?;
    NetCertificate::verified(tuple, &slice, mu, eps)
}

/// LP value, optimal weights, measure, and net behind a net-built
/// transversal.
#[derive(Clone, Debug)]
pub struct TransversalCertificate {
    pub tau_star_inner: Rat,
    pub weights: Vec<Rat>,
    pub measure: DiscreteMeasure,
    pub net: NetCertificate,
}

/// Produces a verified transversal of the outer system from an optimal
/// fractional transversal of the inner system: the weights normalize to
/// a measure under which every member's plus part is heavy, so any
/// (1/τ*)-net misses no member's complement.
pub fn transversal_via_net(
    system: &FuzzySetSystem,
    strategy: NetStrategy,
) -> Result<(Vec<usize>, TransversalCertificate)> {
    transversal_via_net_with_eps(system, None, strategy)
}

/// As [`transversal_via_net`], but with an externally supplied ε not
/// exceeding `1/τ*` of the inner system (a smaller ε only adds heavy
/// sets, so the net is still a transversal).
pub fn transversal_via_net_with_eps(
    system: &FuzzySetSystem,
    eps_override: Option<&Rat>,
    strategy: NetStrategy,
) -> Result<(Vec<usize>, TransversalCertificate)> {
    let inner = system.inner_system();
    if system.is_empty() {
        let mu = DiscreteMeasure::uniform(system.ground_size().max(1))?;
        let empty = FuzzySetSystem::new(mu.len(), Vec::new())?;
        let net = NetCertificate::verified(Vec::new(), &empty, &mu, &Rat::one())?;
        return Ok((
            Vec::new(),
            TransversalCertificate {
                tau_star_inner: Rat::zero(),
                weights: vec![Rat::zero(); system.ground_size()],
                measure: mu,
                net,
            },
        ));
    }
    let (tau_star, weights) = fractional_transversal(&inner)?;
    debug_assert!(tau_star >= Rat::one());
    let mu = DiscreteMeasure::new(weights.iter().map(|w| w / &tau_star).collect())?;
    let eps_from_tau = Rat::one() / &tau_star;
    let eps = match eps_override {
        Some(e) => {
            if e > &eps_from_tau {
                return Err(Error::domain(format!(
                    "override eps {} exceeds 1/tau* = {}",
                    rat::format_rat(e),
                    rat::format_rat(&eps_from_tau)
                )));
            }
            e.clone()
        }
        None => eps_from_tau,
    };
    let net = find_eps_net(system, &mu, &eps, strategy)?;
    // Postcondition replay: the net must meet every outer set.
    let outer = system.outer_system();
    if !crate::transversal::is_transversal(&outer, &net.net) {
        return Err(Error::Internal("net failed the outer-transversal replay".into()));
    }
    Ok((
        net.net.clone(),
        TransversalCertificate { tau_star_inner: tau_star, weights, measure: mu, net },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;
    use crate::system::FuzzySet;

    fn crisp_triangle() -> FuzzySetSystem {
        FuzzySetSystem::new(
            3,
            vec![
                FuzzySet::crisp([0, 1], 3),
                FuzzySet::crisp([1, 2], 3),
                FuzzySet::crisp([0, 2], 3),
            ],
        )
        .unwrap()
    }

    #[test]
    fn empty_net_iff_no_heavy_sets() {
        let singletons = FuzzySetSystem::new(
            10,
            (0..10).map(|i| FuzzySet::crisp([i], 10)).collect(),
        )
        .unwrap();
        let mu = DiscreteMeasure::uniform(10).unwrap();
        assert!(is_eps_net(&[], &singletons, &mu, &rat(1, 5)).unwrap());

        let heavy = FuzzySetSystem::new(3, vec![FuzzySet::new([0, 1], []).unwrap()]).unwrap();
        let mu3 = DiscreteMeasure::uniform(3).unwrap();
        assert!(!is_eps_net(&[], &heavy, &mu3, &rat(1, 2)).unwrap());
        assert!(is_eps_net(&[2], &heavy, &mu3, &rat(1, 2)).unwrap());
    }

    #[test]
    fn indeterminate_heavy_set_imposes_nothing() {
        // Zero plus mass keeps a set light no matter the eps.
        let f = FuzzySetSystem::new(
            2,
            vec![FuzzySet::indeterminate(), FuzzySet::crisp([0], 2)],
        )
        .unwrap();
        let mu = DiscreteMeasure::uniform(2).unwrap();
        let with = find_eps_net(&f, &mu, &rat(1, 2), NetStrategy::ExhaustiveMin).unwrap();
        let without = find_eps_net(
            &FuzzySetSystem::new(2, vec![FuzzySet::crisp([0], 2)]).unwrap(),
            &mu,
            &rat(1, 2),
            NetStrategy::ExhaustiveMin,
        )
        .unwrap();
        assert_eq!(with.net, without.net);
    }

    #[test]
    fn triangle_exhaustive_net_has_size_two() {
        let f = crisp_triangle();
        let mu = DiscreteMeasure::uniform(3).unwrap();
        let net = find_eps_net(&f, &mu, &rat(1, 3), NetStrategy::ExhaustiveMin).unwrap();
        assert_eq!(net.net.len(), 2);
        assert_eq!(net.heavy_sets, 3);
    }

    #[test]
    fn greedy_and_random_nets_verify() {
        let f = crisp_triangle();
        let mu = DiscreteMeasure::uniform(3).unwrap();
        let greedy = find_eps_net(&f, &mu, &rat(1, 3), NetStrategy::Greedy).unwrap();
        assert!(is_eps_net(&greedy.net, &f, &mu, &rat(1, 3)).unwrap());

        let random = find_eps_net(&f, &mu, &rat(1, 3), NetStrategy::random(5)).unwrap();
        let again = find_eps_net(&f, &mu, &rat(1, 3), NetStrategy::random(5)).unwrap();
        assert_eq!(random.net, again.net);
    }

    #[test]
    fn net_from_approximation_verifies() {
        let q = FunctionClass::new(2, vec![vec![rat(0, 1), rat(1, 1)]]).unwrap();
        let mu = DiscreteMeasure::uniform(2).unwrap();
        let cert = net_from_approximation(
            &q,
            &mu,
            &rat(0, 1),
            &rat(1, 1),
            &rat(3, 4),
            ApproxStrategy::ExhaustiveMin,
            4,
        )
        .unwrap();
        assert!(cert.net.len() <= 2);
        let slice = q.slice(&rat(0, 1), &rat(1, 1)).unwrap();
        assert!(is_eps_net(&cert.net, &slice, &mu, &rat(3, 4)).unwrap());
    }

    #[test]
    fn constant_zero_row_nets_on_any_support_point() {
        let q = FunctionClass::new(2, vec![vec![rat(0, 1), rat(0, 1)]]).unwrap();
        let mu = DiscreteMeasure::uniform(2).unwrap();
        let cert = net_from_approximation(
            &q,
            &mu,
            &rat(1, 4),
            &rat(3, 4),
            &rat(1, 2),
            ApproxStrategy::ExhaustiveMin,
            4,
        )
        .unwrap();
        assert_eq!(cert.net.len(), 1);
    }

    #[test]
    fn transversal_via_net_on_triangle() {
        let f = crisp_triangle();
        let (t, cert) = transversal_via_net(&f, NetStrategy::ExhaustiveMin).unwrap();
        assert_eq!(cert.tau_star_inner, rat(3, 2));
        assert_eq!(t.len(), 2);
        assert_eq!(cert.measure.weights(), &[rat(1, 3), rat(1, 3), rat(1, 3)]);
    }

    #[test]
    fn transversal_via_net_single_forced_point() {
        let f = FuzzySetSystem::new(1, vec![FuzzySet::new([0], []).unwrap()]).unwrap();
        let (t, cert) = transversal_via_net(&f, NetStrategy::Greedy).unwrap();
        assert_eq!(t, vec![0]);
        assert_eq!(cert.tau_star_inner, rat(1, 1));
        assert_eq!(cert.measure.weights(), &[rat(1, 1)]);
    }

    #[test]
    fn nets_are_monotone_in_eps_and_supersets() {
        let f = crisp_triangle();
        let mu = DiscreteMeasure::uniform(3).unwrap();
        // A net for eps stays a net for any larger eps, and supersets stay nets.
        let net = find_eps_net(&f, &mu, &rat(1, 3), NetStrategy::ExhaustiveMin).unwrap();
        assert!(is_eps_net(&net.net, &f, &mu, &rat(2, 3)).unwrap());
        let mut bigger = net.net.clone();
        bigger.push(2);
        bigger.sort_unstable();
        bigger.dedup();
        assert!(is_eps_net(&bigger, &f, &mu, &rat(1, 3)).unwrap());
    }
}
