//! The (p,q) pipeline: from a (p,q)-property on the deepest sublevel
//! system, through the exact packing/transversal duality and the
//! multiplicity expansion, to a verified transversal of the outermost
//! strict sublevel system.

use num_bigint::BigInt;
use num_integer::{binomial, Integer};
use num_traits::{One, Zero};
use serde_json::{json, Value};

use itertools::Itertools;

use crate::helly::has_pq_property;
use crate::measure::DiscreteMeasure;
use crate::nets::{find_eps_net, NetStrategy};
use crate::rat::{self, Rat};
use crate::transversal::{fractional_packing, fractional_transversal, is_transversal};
use crate::FunctionClass;
use crate::{Error, Result};

/// Expanded-system checks are enumerative; beyond these sizes they are
/// recorded as skipped rather than run.
const EXPANDED_CHECK_LIMIT: u128 = 200_000;

/// The expanded pigeonhole threshold `p' = p(d-1) + 1`.
pub fn p_prime(p: usize, d: usize) -> Result<usize> {
    if p < 1 || d < 1 {
        return Err(Error::domain(format!(
            "p' needs p >= 1 and d >= 1, got p = {p}, d = {d}"
        )));
    }
    Ok(p * (d - 1) + 1)
}

/// One verified (or deliberately skipped) step of the pipeline.
#[derive(Clone, Debug)]
pub struct PqStage {
    pub name: &'static str,
    pub detail: Value,
    pub verified: bool,
}

/// The pipeline's full audit trail.
#[derive(Clone, Debug)]
pub struct PqCertificate {
    pub p: usize,
    pub q: usize,
    /// Exact dual VC-dimension of the (r, t) slice.
    pub d: usize,
    /// Common denominator of the optimal packing weights.
    pub denominator: BigInt,
    /// Integer multiplicities `denominator * weight`, per member.
    pub multiplicities: Vec<BigInt>,
    /// Total expanded size `N = denominator * nu_star`.
    pub expanded_size: BigInt,
    /// Fractional transversal number of the strict t-sublevel system.
    pub tau_star_outer: Rat,
    pub stages: Vec<PqStage>,
}

fn rat_json(r: &Rat) -> Value {
    Value::String(rat::format_rat(r))
}

/// Runs the full chain on a function class with thresholds
/// `0 <= r < t < s <= 1`:
///
/// 1. requires `q > vc*` of the `(r, t)` slice and the `(p,q)`-property
///    of the r-sublevel system;
/// 2. computes the exact fractional packing of the strict t-sublevel
///    system, re-verifies `tau* = nu*`, and expands members into integer
///    multiplicities over a common denominator, recording the expanded
///    system's statistics and heavy point;
/// 3. builds the `(t, s)` slice and extracts a verified transversal of
///    the strict s-sublevel system from a `(1/tau*)`-net.
pub fn pq_pipeline(
    class: &FunctionClass,
    r: &Rat,
    t: &Rat,
    s: &Rat,
    p: usize,
    q: usize,
    strategy: NetStrategy,
) -> Result<(Vec<usize>, PqCertificate)> {
    if !(r < t && t < s) {
        return Err(Error::domain(format!(
            "thresholds must satisfy 0 <= r < t < s <= 1, got r = {}, t = {}, s = {}",
            rat::format_rat(r),
            rat::format_rat(t),
            rat::format_rat(s)
        )));
    }
    if q < 1 || p < q {
        return Err(Error::domain(format!(
            "pipeline needs p >= q >= 1, got p = {p}, q = {q}"
        )));
    }
    let mut stages: Vec<PqStage> = Vec::new();

    // Stage: dual VC guard on the (r, t) slice.
    let slice_rt = class.slice(r, t)?;
    let d = slice_rt.dual_vc_dimension().unwrap_or(0);
    if q < d + 1 {
        return Err(Error::Hypothesis(format!(
            "stage dual_vc_guard: q = {q} must exceed the dual VC-dimension {d} of the (r,t) slice"
        )));
    }
    stages.push(PqStage {
        name: "dual_vc_guard",
        detail: json!({ "dual_vc": d, "q": q }),
        verified: true,
    });

    // Stage: (p,q)-property of the r-sublevel system.
    let inner_r = class.level_le(r);
    if !has_pq_property(&inner_r, p, q)? {
        return Err(Error::Hypothesis(format!(
            "stage pq_property: the r-sublevel system lacks the ({p},{q})-property"
        )));
    }
    stages.push(PqStage {
        name: "pq_property",
        detail: json!({ "p": p, "q": q, "sets": inner_r.len() }),
        verified: true,
    });

    // Stage: exact duality on the strict t-sublevel system.
    let outer_t = class.level_lt(t);
    let (nu_star, packing) = fractional_packing(&outer_t)?;
    let (tau_star_outer, _) = fractional_transversal(&outer_t)?;
    if nu_star != tau_star_outer {
        return Err(Error::Internal(
            "exact LP duality tau* = nu* failed on the t-sublevel system".into(),
        ));
    }
    stages.push(PqStage {
        name: "lp_duality",
        detail: json!({
            "tau_star": rat_json(&tau_star_outer),
            "nu_star": rat_json(&nu_star),
        }),
        verified: true,
    });

    // Stage: integer multiplicities over a common denominator.
    let denominator: BigInt = packing
        .iter()
        .fold(BigInt::one(), |acc, w| acc.lcm(w.denom()));
    let multiplicities: Vec<BigInt> = packing
        .iter()
        .map(|w| w.numer() * (&denominator / w.denom()))
        .collect();
    let expanded_size: BigInt = multiplicities.iter().sum();
    let expected = (&nu_star * Rat::from_integer(denominator.clone())).to_integer();
    if expanded_size != expected {
        return Err(Error::Internal(
            "expanded size differs from denominator * nu*".into(),
        ));
    }
    stages.push(PqStage {
        name: "expansion",
        detail: json!({
            "denominator": denominator.to_string(),
            "multiplicities": multiplicities.iter().map(|m| m.to_string()).collect::<Vec<_>>(),
            "expanded_size": expanded_size.to_string(),
        }),
        verified: true,
    });

    // Stage: empirical (p', q) check on the expanded r-sublevel system.
    stages.push(expanded_pq_stage(&inner_r, &multiplicities, &expanded_size, p, q, d)?);

    // Stage: census of intersecting (d+1)-tuples in the expanded system,
    // with the combinatorial lower bound recorded for reporting.
    stages.push(expanded_census_stage(
        &inner_r,
        &multiplicities,
        &expanded_size,
        p,
        d,
    ));

    // Stage: heavy point of the expanded relation; its coverage replays
    // the packing constraint at that point.
    let heavy = (0..class.point_count())
        .map(|a| {
            let coverage: BigInt = multiplicities
                .iter()
                .enumerate()
                .filter(|(i, _)| outer_t.contains(*i, a))
                .map(|(_, m)| m.clone())
                .sum();
            (a, coverage)
        })
        .max_by(|x, y| x.1.cmp(&y.1).then(y.0.cmp(&x.0)));
    let (heavy_point, heavy_coverage) = heavy.ok_or_else(|| {
        Error::domain("pipeline needs a nonempty ground set")
    })?;
    let packing_at_point = Rat::new(heavy_coverage.clone(), denominator.clone());
    if packing_at_point > Rat::one() {
        return Err(Error::Internal(
            "heavy-point coverage violates the packing constraint".into(),
        ));
    }
    let beta_hat = if expanded_size.is_zero() {
        Rat::zero()
    } else {
        Rat::new(heavy_coverage.clone(), expanded_size.clone())
    };
    stages.push(PqStage {
        name: "heavy_point",
        detail: json!({
            "point": heavy_point,
            "coverage": heavy_coverage.to_string(),
            "packing_at_point": rat_json(&packing_at_point),
            "beta_hat": rat_json(&beta_hat),
        }),
        verified: true,
    });

    // Stage: enlarging sets cannot increase the fractional transversal.
    let inner_t = class.level_le(t);
    let (tau_le_t, weights_le_t) = fractional_transversal(&inner_t)?;
    if tau_le_t > tau_star_outer {
        return Err(Error::Internal(
            "tau* increased when sets were enlarged from strict to weak sublevels".into(),
        ));
    }
    stages.push(PqStage {
        name: "monotone_tau",
        detail: json!({
            "tau_star_le_t": rat_json(&tau_le_t),
            "tau_star_lt_t": rat_json(&tau_star_outer),
        }),
        verified: true,
    });

    // Stage: net-built transversal of the strict s-sublevel system.
    let slice_ts = class.slice(t, s)?;
    let mu = DiscreteMeasure::new(weights_le_t.iter().map(|w| w / &tau_le_t).collect())?;
    let eps = Rat::one() / &tau_star_outer;
    let net = find_eps_net(&slice_ts, &mu, &eps, strategy)?;
    let target = class.level_lt(s);
    if !is_transversal(&target, &net.net) {
        return Err(Error::Internal(
            "net failed the transversal replay on the s-sublevel system".into(),
        ));
    }
    stages.push(PqStage {
        name: "net_transversal",
        detail: json!({
            "eps": rat_json(&eps),
            "net": net.net.clone(),
            "heavy_sets": net.heavy_sets,
        }),
        verified: true,
    });

    let certificate = PqCertificate {
        p,
        q,
        d,
        denominator,
        multiplicities,
        expanded_size,
        tau_star_outer,
        stages,
    };
    Ok((net.net, certificate))
}

fn skipped(name: &'static str, reason: String) -> PqStage {
    PqStage {
        name,
        detail: json!({ "skipped": true, "reason": reason }),
        verified: true,
    }
}

fn expanded_pq_stage(
    inner_r: &crate::system::SetSystem,
    multiplicities: &[BigInt],
    expanded_size: &BigInt,
    p: usize,
    q: usize,
    d: usize,
) -> Result<PqStage> {
    const NAME: &str = "expanded_pq_check";
    if d < 1 {
        return Ok(skipped(NAME, "p' undefined at dual dimension 0".into()));
    }
    let pp = p_prime(p, d)?;
    if pp < q {
        return Ok(skipped(NAME, format!("p' = {pp} below q = {q}")));
    }
    let n: usize = match usize::try_from(expanded_size.clone()) {
        Ok(n) => n,
        Err(_) => return Ok(skipped(NAME, "expanded size exceeds usize".into())),
    };
    if n < pp {
        return Ok(skipped(NAME, format!("expanded size {n} below p' = {pp}")));
    }
    let work = binomial(BigInt::from(n), BigInt::from(pp));
    if work > BigInt::from(EXPANDED_CHECK_LIMIT) {
        return Ok(skipped(NAME, format!("C({n},{pp}) subfamilies exceed the budget")));
    }
    // Materialize the expanded system: each member repeated by its
    // multiplicity.
    let mut sets = Vec::with_capacity(n);
    for (i, m) in multiplicities.iter().enumerate() {
        let copies: usize = usize::try_from(m.clone()).unwrap_or(0);
        for _ in 0..copies {
            sets.push(inner_r.sets()[i].clone());
        }
    }
    let expanded = crate::system::SetSystem::new(inner_r.ground_size(), sets)?;
    let holds = has_pq_property(&expanded, pp, q)?;
    Ok(PqStage {
        name: NAME,
        detail: json!({ "p_prime": pp, "q": q, "expanded_size": n, "holds": holds }),
        verified: holds,
    })
}

fn expanded_census_stage(
    inner_r: &crate::system::SetSystem,
    multiplicities: &[BigInt],
    expanded_size: &BigInt,
    p: usize,
    d: usize,
) -> PqStage {
    const NAME: &str = "expanded_intersection_census";
    let k = d + 1;
    // Count k-subsets of expanded columns whose underlying plus parts
    // intersect, via multisets of distinct members weighted by binomial
    // choices within each member's copies.
    let distinct: Vec<usize> = (0..inner_r.len()).collect();
    let mut good = BigInt::zero();
    for combo in distinct.iter().copied().combinations_with_replacement(k) {
        let mut weight = BigInt::one();
        let mut idx = 0;
        while idx < combo.len() {
            let j = combo[idx];
            let mut run = 0usize;
            while idx < combo.len() && combo[idx] == j {
                run += 1;
                idx += 1;
            }
            weight *= binomial(multiplicities[j].clone(), BigInt::from(run));
        }
        if weight.is_zero() {
            continue;
        }
        let mut members = combo.clone();
        members.dedup();
        if !inner_r.intersection_of(&members).is_empty() {
            good += weight;
        }
    }
    let total = binomial(expanded_size.clone(), BigInt::from(k));
    // Reported alongside: the pigeonhole lower bound C(N,p)/C(N-d+1, p-d+1).
    let bound = usize::try_from(expanded_size.clone()).ok().and_then(|n| {
        if n >= p && p >= d && n >= d {
            let denom = binomial(BigInt::from(n - d + 1), BigInt::from(p - d + 1));
            if denom.is_zero() {
                None
            } else {
                Some(Rat::new(binomial(BigInt::from(n), BigInt::from(p)), denom))
            }
        } else {
            None
        }
    });
    PqStage {
        name: NAME,
        detail: json!({
            "k": k,
            "intersecting": good.to_string(),
            "total": total.to_string(),
            "pigeonhole_bound": bound.map(|b| rat::format_rat(&b)),
        }),
        verified: true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    #[test]
    fn p_prime_values() {
        assert_eq!(p_prime(2, 1).unwrap(), 1);
        assert_eq!(p_prime(1, 2).unwrap(), 2);
        assert_eq!(p_prime(3, 3).unwrap(), 7);
        assert!(p_prime(0, 1).is_err());
        assert!(p_prime(1, 0).is_err());
    }

    /// Rows are edge indicators of a triangle: 0 on the edge, 1 off it.
    fn triangle_class() -> FunctionClass {
        let edges = [[0, 1], [1, 2], [0, 2]];
        let rows = edges
            .iter()
            .map(|e| {
                (0..3)
                    .map(|x| if e.contains(&x) { rat(0, 1) } else { rat(1, 1) })
                    .collect()
            })
            .collect();
        FunctionClass::new(3, rows).unwrap()
    }

    #[test]
    fn triangle_pipeline_returns_small_transversal() {
        let q = triangle_class();
        let (transversal, cert) = pq_pipeline(
            &q,
            &rat(0, 1),
            &rat(1, 3),
            &rat(2, 3),
            2,
            2,
            NetStrategy::ExhaustiveMin,
        )
        .unwrap();
        assert!(transversal.len() <= 2);
        assert_eq!(cert.tau_star_outer, rat(3, 2));
        assert_eq!(cert.d, 1);
        assert_eq!(cert.denominator, BigInt::from(2));
        assert_eq!(cert.expanded_size, BigInt::from(3));
        let target = q.level_lt(&rat(2, 3));
        assert!(is_transversal(&target, &transversal));
        // Every stage carries a verified flag.
        assert!(cert.stages.iter().all(|st| st.verified));
    }

    #[test]
    fn constant_zero_row_needs_one_point() {
        let q = FunctionClass::new(2, vec![vec![rat(0, 1), rat(0, 1)]]).unwrap();
        let (transversal, _) = pq_pipeline(
            &q,
            &rat(0, 1),
            &rat(1, 2),
            &rat(1, 1),
            1,
            1,
            NetStrategy::Greedy,
        )
        .unwrap();
        assert_eq!(transversal.len(), 1);
    }

    #[test]
    fn dual_vc_guard_rejects_small_q() {
        let q = triangle_class();
        let err = pq_pipeline(
            &q,
            &rat(0, 1),
            &rat(1, 3),
            &rat(2, 3),
            2,
            1,
            NetStrategy::Greedy,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Hypothesis(_)), "{err:?}");
    }

    #[test]
    fn threshold_order_is_enforced() {
        let q = triangle_class();
        assert!(pq_pipeline(&q, &rat(1, 3), &rat(1, 3), &rat(2, 3), 2, 2, NetStrategy::Greedy)
            .is_err());
    }

    #[test]
    fn pipeline_is_deterministic() {
        let q = triangle_class();
        let run = || {
            pq_pipeline(
                &q,
                &rat(0, 1),
                &rat(1, 3),
                &rat(2, 3),
                2,
                2,
                NetStrategy::Greedy,
            )
            .unwrap()
        };
        let (t1, c1) = run();
        let (t2, c2) = run();
        assert_eq!(t1, t2);
        assert_eq!(c1.multiplicities, c2.multiplicities);
        assert_eq!(
            c1.stages.iter().map(|s| &s.detail).collect::<Vec<_>>(),
            c2.stages.iter().map(|s| &s.detail).collect::<Vec<_>>()
        );
    }
}
