//! The self-test battery behind `fuzzyvc selftest`: seeded, reduced-scale
//! replays of the crate's combinatorial guarantees, one suite per
//! theorem-shaped property. Every suite is deterministic in the root
//! seed, so reports are byte-stable.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::approx::{self, ApproxStrategy};
use crate::covering::{self, CoveringMethod};
use crate::generate::{generate, GenKind, GenParams};
use crate::helly;
use crate::instance::InstanceFile;
use crate::measure::DiscreteMeasure;
use crate::nets::{self, NetStrategy};
use crate::pq;
use crate::rat::{self, rat, Rat};
use crate::system::{sauer_bound, FuzzyRelation, FuzzySet, FuzzySetSystem, Mark, SetSystem};
use crate::transversal;
use crate::width::{mean_width, width_profile, WidthDist, WidthMode};
use crate::FunctionClass;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Budget {
    Small,
    Medium,
}

impl Budget {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "small" => Ok(Budget::Small),
            "medium" => Ok(Budget::Medium),
            other => Err(Error::domain(format!("unknown budget {other:?}"))),
        }
    }

    fn cases(&self, small: usize, medium: usize) -> usize {
        match self {
            Budget::Small => small,
            Budget::Medium => medium,
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Budget::Small => "small",
            Budget::Medium => "medium",
        }
    }
}

struct Suite {
    name: &'static str,
    cases: usize,
    failures: Vec<String>,
}

impl Suite {
    fn new(name: &'static str) -> Self {
        Suite { name, cases: 0, failures: Vec::new() }
    }

    fn case(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures.push(detail());
        }
    }

    fn error(&mut self, e: &Error) {
        self.cases += 1;
        self.failures.push(format!("error: {e}"));
    }

    fn to_value(&self) -> Value {
        json!({
            "name": self.name,
            "cases": self.cases,
            "failures": self.failures,
            "pass": self.failures.is_empty(),
        })
    }
}

fn fuzzy_instance(seed: u64, n: usize, k: usize) -> FuzzySetSystem {
    let params = GenParams { n, k, ..GenParams::default() };
    match generate(GenKind::RandomFuzzy, &params, seed).expect("valid params") {
        InstanceFile::FuzzySystem(f) => f,
        _ => unreachable!(),
    }
}

fn matrix_instance(seed: u64, n: usize, k: usize, grid: u64) -> FunctionClass {
    let params = GenParams { n, k, grid, ..GenParams::default() };
    match generate(GenKind::RandomFunctionMatrix, &params, seed).expect("valid params") {
        InstanceFile::FunctionClass(q) => q,
        _ => unreachable!(),
    }
}

fn sauer_suite(seed: u64, cases: usize) -> Suite {
    let mut suite = Suite::new("sauer_shelah");
    for i in 0..cases {
        let f = fuzzy_instance(seed ^ (i as u64), 5 + i % 2, 6 + i % 5);
        let Some(d) = f.vc_dimension() else {
            suite.case(true, String::new);
            continue;
        };
        let mut ok = true;
        for n in 0..=f.ground_size() {
            let pi = f.shatter_function(n).expect("in range");
            if BigInt::from(pi) > sauer_bound(d, n) {
                ok = false;
            }
        }
        suite.case(ok, || format!("case {i}: shatter exceeded the polynomial bound"));
    }
    suite
}

fn fat_sandwich_suite(seed: u64, cases: usize) -> Suite {
    let mut suite = Suite::new("fat_sandwich");
    for i in 0..cases {
        let q = matrix_instance(seed.wrapping_add(i as u64), 4, 5, 8);
        for eps in [rat(1, 8), rat(1, 4), rat(1, 2)] {
            let two_eps = &eps * Rat::from_integer(2.into());
            let lhs = q.vc_eps(&two_eps).expect("valid eps");
            let fat = q.fat_shattering(&eps).expect("valid eps");
            let factor = {
                let c = (Rat::one() / &eps).ceil().to_integer();
                let c: usize = c.try_into().unwrap_or(usize::MAX);
                2 * c - 1
            };
            let rhs = factor * q.vc_eps(&eps).expect("valid eps");
            suite.case(lhs <= fat && fat <= rhs, || {
                format!(
                    "case {i} eps {}: vc2 = {lhs}, fat = {fat}, bound = {rhs}",
                    rat::format_rat(&eps)
                )
            });
        }
    }
    suite
}

fn width_sandwich_suite(seed: u64, cases: usize) -> Suite {
    let mut suite = Suite::new("width_sandwich");
    let samples = 20_000u64;
    for i in 0..cases {
        let dims = 2 + (i % 3);
        let q = matrix_instance(seed.wrapping_add(1000 + i as u64), dims, 4, 8);
        let points: Vec<Vec<Rat>> = q.rows().to_vec();
        let exact = mean_width(&points, WidthDist::Rademacher, WidthMode::Exact)
            .expect("small dims");
        let mc = mean_width(
            &points,
            WidthDist::Gaussian,
            WidthMode::MonteCarlo { samples, seed: seed ^ (i as u64) },
        )
        .expect("sampling works");
        let wr = exact.value;
        let scale = (std::f64::consts::PI / 2.0).sqrt();
        let left_ok = wr <= scale * (mc.value + 3.0 * mc.std_error) + 1e-12;
        let right_ok = if wr == 0.0 && dims == 1 {
            true
        } else {
            scale * (mc.value - 3.0 * mc.std_error)
                <= 2.0 * (dims as f64).ln().max(0.0).sqrt() * wr + 1e-12
        };
        suite.case(left_ok && right_ok, || {
            format!("case {i}: wr = {wr}, wg = {} +- {}", mc.value, mc.std_error)
        });
    }
    suite
}

fn approx_existence_suite(seed: u64, cases: usize) -> Suite {
    let mut suite = Suite::new("approx_existence");
    for i in 0..cases {
        let q = matrix_instance(seed.wrapping_add(2000 + i as u64), 3, 4, 4);
        let mu = DiscreteMeasure::uniform(3).expect("nonempty");
        let n = 3 + i % 2;
        let profile = width_profile(&q, n, WidthDist::Rademacher, None, WidthMode::Exact)
            .expect("tiny instance");
        let ratio = profile.exact.expect("exact mode") / Rat::from_integer((n as u64).into());
        let eps = &ratio + rat(1, 50);
        match approx::find_eps_approximation(&q, &mu, &eps, ApproxStrategy::ExhaustiveMin, n) {
            Ok(xbar) => suite.case(
                xbar.len() <= n
                    && approx::is_eps_approximation(&xbar, &q, &mu, &eps).unwrap_or(false),
                || format!("case {i}: found tuple fails verification"),
            ),
            Err(e) => suite.error(&e),
        }
    }
    suite
}

fn qnet_lemma_suite(seed: u64, cases: usize) -> Suite {
    let mut suite = Suite::new("qnet_lemma");
    for i in 0..cases {
        let q = matrix_instance(seed.wrapping_add(3000 + i as u64), 3, 3, 8);
        let mu = DiscreteMeasure::uniform(3).expect("nonempty");
        let (r, s) = (rat(1, 4), rat(3, 4));
        let eps = rat(1, 2);
        let delta = (&s - &r) * &eps / Rat::from_integer(2.into());
        let clamped = q.clamped(&r, &s).expect("thresholds ordered");
        let slice = q.slice(&r, &s).expect("thresholds ordered");
        let mut ok = true;
        // Every delta-approximation of the clamped class, over all tuples
        // of size at most 2, must be an eps-net for the slice.
        for size in 1..=2usize {
            let mut tuple = vec![0usize; size];
            loop {
                let dev = approx::max_deviation(&clamped, &mu, &tuple).expect("valid tuple");
                if dev <= delta {
                    let net: Vec<usize> = {
                        let mut t = tuple.clone();
                        t.sort_unstable();
                        t.dedup();
                        t
                    };
                    if !nets::is_eps_net(&net, &slice, &mu, &eps).expect("valid net args") {
                        ok = false;
                    }
                }
                // Odometer over tuples.
                let mut pos = 0;
                while pos < size {
                    tuple[pos] += 1;
                    if tuple[pos] < 3 {
                        break;
                    }
                    tuple[pos] = 0;
                    pos += 1;
                }
                if pos == size {
                    break;
                }
            }
        }
        suite.case(ok, || format!("case {i}: a delta-approximation missed a heavy set"));
    }
    suite
}

fn separation_suite(seed: u64, cases: usize) -> Suite {
    let mut suite = Suite::new("covering_separation");
    for i in 0..cases {
        let q = matrix_instance(seed.wrapping_add(4000 + i as u64), 3, 5, 8);
        let (r, s) = (rat(1, 4), rat(5, 8));
        let gap = &s - &r;
        let slice = q.slice(&r, &s).expect("ordered");
        let xbar: Vec<usize> = (0..q.point_count()).collect();
        // Rows fully determinate on xbar, keyed by their trace pattern.
        let mut reps: Vec<(u64, usize)> = Vec::new();
        'rows: for (row_idx, _) in q.rows().iter().enumerate() {
            let mut mask = 0u64;
            for (bit, &x) in xbar.iter().enumerate() {
                match slice.sets()[row_idx].mark(x) {
                    Mark::Plus => mask |= 1 << bit,
                    Mark::Minus => {}
                    Mark::Star => continue 'rows,
                }
            }
            if !reps.iter().any(|&(m, _)| m == mask) {
                reps.push((mask, row_idx));
            }
        }
        let mut ok = true;
        for a in 0..reps.len() {
            for b in a + 1..reps.len() {
                let d = covering::linf_distance(
                    &q.rows()[reps[a].1],
                    &q.rows()[reps[b].1],
                );
                if d < gap {
                    ok = false;
                }
            }
        }
        let eps = &gap / Rat::from_integer(4.into());
        let cover = covering::covering_number(&q, &xbar, &eps, CoveringMethod::Internal)
            .expect("small instance");
        suite.case(ok && reps.len() <= cover, || {
            format!("case {i}: traces {} vs cover {cover}", reps.len())
        });
    }
    suite
}

fn lp_duality_suite(seed: u64, cases: usize) -> Suite {
    let mut suite = Suite::new("lp_duality");
    for i in 0..cases {
        let params = GenParams { n: 5 + i % 3, k: 4 + i % 4, ..GenParams::default() };
        let inst = generate(GenKind::CrispIntervals, &params, seed.wrapping_add(i as u64))
            .expect("valid params");
        let InstanceFile::SetSystem(s) = inst else { unreachable!() };
        let s = drop_empty_sets(&s);
        if s.is_empty() {
            suite.case(true, String::new);
            continue;
        }
        match (
            transversal::fractional_transversal(&s),
            transversal::fractional_packing(&s),
        ) {
            (Ok((tau, _)), Ok((nu, _))) => {
                suite.case(tau == nu, || {
                    format!(
                        "case {i}: tau* = {} vs nu* = {}",
                        rat::format_rat(&tau),
                        rat::format_rat(&nu)
                    )
                });
            }
            (Err(e), _) | (_, Err(e)) => suite.error(&e),
        }
    }
    suite
}

fn drop_empty_sets(s: &SetSystem) -> SetSystem {
    SetSystem::new(
        s.ground_size(),
        s.sets().iter().filter(|m| !m.is_empty()).cloned().collect(),
    )
    .expect("subset of a valid system")
}

fn transversal_net_suite(seed: u64, cases: usize) -> Suite {
    let mut suite = Suite::new("transversal_via_net");
    for i in 0..cases {
        let params = GenParams { n: 6 + i % 3, k: 4, margin: 1, ..GenParams::default() };
        let inst =
            generate(GenKind::FuzzyMarginIntervals, &params, seed.wrapping_add(i as u64))
                .expect("valid params");
        let InstanceFile::FuzzySystem(f) = inst else { unreachable!() };
        if f.sets().iter().any(|s| s.plus().is_empty()) {
            suite.case(true, String::new);
            continue;
        }
        match nets::transversal_via_net(&f, NetStrategy::ExhaustiveMin) {
            Ok((t, cert)) => {
                let outer = f.outer_system();
                let verified = transversal::is_transversal(&outer, &t);
                let tau = transversal::transversal_number(&outer).expect("nonempty outers");
                let (tau_star, _) =
                    transversal::fractional_transversal(&outer).expect("nonempty outers");
                let ceil: usize = tau_star.ceil().to_integer().try_into().unwrap_or(0);
                suite.case(verified && tau >= ceil && cert.net.heavy_sets == f.len(), || {
                    format!("case {i}: verified={verified}, tau={tau}, ceil={ceil}")
                });
            }
            Err(e) => suite.error(&e),
        }
    }
    suite
}

/// Relations with few distinct rows keep the dual shatter function flat,
/// which is what the parameter search needs.
fn helly_relation(seed: u64, columns: usize) -> FuzzyRelation {
    let mut rng_state = seed | 1;
    let mut next = move || {
        rng_state ^= rng_state << 13;
        rng_state ^= rng_state >> 7;
        rng_state ^= rng_state << 17;
        rng_state
    };
    // Three row archetypes over the columns; eight points total.
    let archetypes: Vec<Vec<Mark>> = (0..3)
        .map(|a| {
            (0..columns)
                .map(|c| {
                    if a == 0 || (next() + c as u64) % 4 != 0 {
                        Mark::Plus
                    } else if a == 1 {
                        Mark::Minus
                    } else {
                        Mark::Star
                    }
                })
                .collect()
        })
        .collect();
    let entries: Vec<Vec<Mark>> = (0..8).map(|x| archetypes[x % 3].clone()).collect();
    FuzzyRelation::new(8, columns, entries).expect("shape matches")
}

fn helly_suite(seed: u64, cases: usize) -> Suite {
    let mut suite = Suite::new("fractional_helly");
    for i in 0..cases {
        let relation = helly_relation(seed.wrapping_add(i as u64), 12);
        let k = 2;
        let good = helly::count_intersecting_tuples(&relation, k).expect("k in range");
        let total = num_integer::binomial(BigInt::from(relation.y_size()), BigInt::from(k));
        if good.is_zero() {
            suite.case(true, String::new);
            continue;
        }
        let alpha = Rat::new(good, total);
        match helly::fractional_helly_witness(&relation, k, &alpha) {
            Ok(cert) => {
                let required = (&cert.beta * Rat::from_integer(cert.n.into()))
                    .ceil()
                    .to_integer()
                    .to_usize()
                    .unwrap_or(usize::MAX);
                suite.case(
                    cert.verify(&relation).is_ok() && cert.j.len() >= required,
                    || format!("case {i}: |J| = {} < required {required}", cert.j.len()),
                );
            }
            Err(e) => suite.error(&e),
        }
    }
    suite
}

fn pq_suite(seed: u64, cases: usize) -> Suite {
    let mut suite = Suite::new("pq_pipeline");
    for i in 0..cases {
        let params = GenParams {
            n: 5,
            k: 4,
            width: rat(1, 2),
            ..GenParams::default()
        };
        let inst = generate(GenKind::DistanceFunctions, &params, seed.wrapping_add(i as u64))
            .expect("valid params");
        let InstanceFile::FunctionClass(q) = inst else { unreachable!() };
        let (r, t, s) = (rat(1, 8), rat(3, 8), rat(3, 4));
        let inner = q.level_le(&r);
        if inner.sets().iter().any(|m| m.is_empty()) {
            suite.case(true, String::new);
            continue;
        }
        let d = q.slice(&r, &t).expect("ordered").dual_vc_dimension().unwrap_or(0);
        let qq = d + 1;
        let p = qq + 1;
        match helly::has_pq_property(&inner, p, qq) {
            Err(_) | Ok(false) => {
                suite.case(true, String::new);
                continue;
            }
            Ok(true) => {}
        }
        match pq::pq_pipeline(&q, &r, &t, &s, p, qq, NetStrategy::Greedy) {
            Ok((transversal_set, cert)) => {
                let target = q.level_lt(&s);
                let ok = transversal::is_transversal(&target, &transversal_set)
                    && cert.stages.iter().all(|st| st.verified);
                suite.case(ok, || format!("case {i}: pipeline stages failed"));
            }
            Err(e) => suite.error(&e),
        }
    }
    suite
}

fn deviation_suite(seed: u64, cases: usize) -> Suite {
    let mut suite = Suite::new("deviation_bound");
    for i in 0..cases {
        let q = matrix_instance(seed.wrapping_add(6000 + i as u64), 3, 4, 8);
        let mu = DiscreteMeasure::uniform(3).expect("nonempty");
        let eps = rat(1, 2);
        let eps_f = 0.5f64;
        let n = 8 + 64 * (i % 3);
        let trials = 200u64;
        let ncov = q.len() as f64;
        match (
            covering::deviation_bound(n, eps_f, ncov),
            approx::deviation_estimate(&q, &mu, n, &eps, trials, seed ^ (i as u64)),
        ) {
            (Ok(bound), Ok(estimate)) => {
                let se = (estimate * (1.0 - estimate) / trials as f64).sqrt();
                suite.case(bound.min(1.0) >= estimate - 3.0 * se, || {
                    format!("case {i}: bound {bound} vs estimate {estimate}")
                });
            }
            (Err(e), _) | (_, Err(e)) => suite.error(&e),
        }
    }
    suite
}

fn disamb_suite(seed: u64, cases: usize) -> Suite {
    use crate::disamb::{strong_disambiguation, verify_disambiguation, DisambiguationMode};
    let mut suite = Suite::new("strong_disambiguation");
    for i in 0..cases {
        let f = fuzzy_instance(seed.wrapping_add(7000 + i as u64), 5, 5);
        let trivial = strong_disambiguation(&f, DisambiguationMode::Trivial);
        let greedy = strong_disambiguation(&f, DisambiguationMode::Greedy);
        let minimal = strong_disambiguation(&f, DisambiguationMode::Minimal);
        match (trivial, greedy, minimal) {
            (Ok(t), Ok(g), Ok(m)) => {
                let ok = verify_disambiguation(&f, &t)
                    && verify_disambiguation(&f, &g)
                    && verify_disambiguation(&f, &m)
                    && m.len() <= g.len()
                    && g.len() <= t.len();
                suite.case(ok, || format!("case {i}: size order or verification failed"));
            }
            (Err(e), _, _) | (_, Err(e), _) | (_, _, Err(e)) => suite.error(&e),
        }
    }
    suite
}

fn vc_conventions_suite() -> Suite {
    let mut suite = Suite::new("vc_conventions");
    // The fully indeterminate set pins the "all n <= d" clause.
    let f = FuzzySetSystem::new(2, vec![FuzzySet::indeterminate()]).expect("valid");
    suite.case(
        f.shatter_function(1).expect("in range") < f.shatter_function(0).expect("in range"),
        || "shatter function failed to dip below pi(0)".to_string(),
    );
    suite.case(f.vc_dimension() == Some(0), || "vc of the indeterminate singleton".into());
    let empty = FuzzySetSystem::new(3, Vec::new()).expect("valid");
    suite.case(empty.vc_dimension().is_none(), || "vc of the empty family".into());
    suite
}

/// Runs every suite and returns the aggregate report payload.
pub fn run_selftest(seed: u64, budget: Budget) -> Value {
    let suites = vec![
        sauer_suite(seed, budget.cases(20, 60)),
        vc_conventions_suite(),
        disamb_suite(seed, budget.cases(8, 24)),
        fat_sandwich_suite(seed, budget.cases(8, 30)),
        width_sandwich_suite(seed, budget.cases(6, 20)),
        approx_existence_suite(seed, budget.cases(6, 20)),
        qnet_lemma_suite(seed, budget.cases(8, 25)),
        separation_suite(seed, budget.cases(10, 30)),
        lp_duality_suite(seed, budget.cases(20, 60)),
        transversal_net_suite(seed, budget.cases(10, 30)),
        helly_suite(seed, budget.cases(6, 20)),
        pq_suite(seed, budget.cases(5, 15)),
        deviation_suite(seed, budget.cases(5, 12)),
    ];
    let pass = suites.iter().all(|s| s.failures.is_empty());
    json!({
        "budget": budget.name(),
        "pass": pass,
        "suites": suites.iter().map(Suite::to_value).collect::<Vec<_>>(),
    })
}
