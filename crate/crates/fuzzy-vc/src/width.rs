//! Rademacher and Gaussian mean widths of finite point sets, and the
//! width profiles/complexities of function classes.
//!
//! The Rademacher width of a finite rational point set is computed
//! exactly by enumerating all sign vectors. Gaussian widths have no
//! finite enumeration and are always Monte Carlo, with a reported
//! standard error; normal variates come from `rand_distr`'s ziggurat
//! over a seeded ChaCha stream, so estimates are reproducible.

use itertools::Itertools;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::measure::DiscreteMeasure;
use crate::rat::{self, Rat};
use crate::FunctionClass;
use crate::{Error, Result};

/// Sign-vector enumeration limit for exact widths.
pub const EXACT_SIGN_LIMIT: usize = 20;
/// Column-multiset / support-tuple enumeration limit for exact profiles.
pub const EXACT_TUPLE_LIMIT: u128 = 200_000;
/// Inner Monte Carlo budget when a profile draw cannot be exact.
const INNER_MC_SAMPLES: u64 = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WidthDist {
    Rademacher,
    Gaussian,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WidthMode {
    Exact,
    MonteCarlo { samples: u64, seed: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EstimateKind {
    Exact,
    MonteCarlo,
}

/// A width value with its provenance. Exact estimates carry the full
/// rational and a zero standard error.
#[derive(Clone, Debug)]
pub struct WidthEstimate {
    pub value: f64,
    pub exact: Option<Rat>,
    pub std_error: f64,
    pub samples: u64,
    pub seed: u64,
    pub kind: EstimateKind,
}

impl WidthEstimate {
    fn exact(value: Rat, samples: u64) -> Self {
        WidthEstimate {
            value: rat::rat_to_f64(&value),
            exact: Some(value),
            std_error: 0.0,
            samples,
            seed: 0,
            kind: EstimateKind::Exact,
        }
    }
}

fn check_points(points: &[Vec<Rat>]) -> Result<usize> {
    let first = points
        .first()
        .ok_or_else(|| Error::domain("mean width needs a nonempty point set"))?;
    let dim = first.len();
    if points.iter().any(|p| p.len() != dim) {
        return Err(Error::domain("points must share one dimension"));
    }
    Ok(dim)
}

/// Exact Rademacher mean width: the average over all sign vectors of the
/// maximum signed coordinate sum.
fn rademacher_width_exact(points: &[Vec<Rat>], dim: usize) -> Result<Rat> {
    if dim > EXACT_SIGN_LIMIT {
        return Err(Error::capacity(format!(
            "exact width enumerates 2^{dim} sign vectors; limit is 2^{EXACT_SIGN_LIMIT}"
        )));
    }
    if dim == 0 {
        return Ok(Rat::zero());
    }
    let mut total = Rat::zero();
    for signs in 0u64..(1u64 << dim) {
        let best = points
            .iter()
            .map(|p| {
                let mut dot = Rat::zero();
                for (i, c) in p.iter().enumerate() {
                    if signs >> i & 1 == 1 {
                        dot += c;
                    } else {
                        dot -= c;
                    }
                }
                dot
            })
            .max()
            .expect("nonempty point set");
        total += best;
    }
    Ok(total / Rat::from_integer((1u64 << dim).into()))
}

fn to_f64_matrix(points: &[Vec<Rat>]) -> Vec<Vec<f64>> {
    points
        .iter()
        .map(|p| p.iter().map(rat::rat_to_f64).collect())
        .collect()
}

/// One Monte Carlo pass over `samples` sign draws; returns mean and
/// standard error of the supremum.
fn mc_width(points: &[Vec<f64>], dim: usize, dist: WidthDist, samples: u64, rng: &mut ChaCha8Rng) -> (f64, f64) {
    let mut mean = 0.0f64;
    let mut m2 = 0.0f64;
    let mut sigma = vec![0.0f64; dim];
    for k in 1..=samples {
        for s in sigma.iter_mut() {
            *s = match dist {
                WidthDist::Rademacher => {
                    if rng.gen::<bool>() {
                        1.0
                    } else {
                        -1.0
                    }
                }
                WidthDist::Gaussian => StandardNormal.sample(rng),
            };
        }
        let sup = points
            .iter()
            .map(|p| p.iter().zip(&sigma).map(|(a, s)| a * s).sum::<f64>())
            .fold(f64::NEG_INFINITY, f64::max);
        let delta = sup - mean;
        mean += delta / k as f64;
        m2 += delta * (sup - mean);
    }
    let std_error = if samples > 1 {
        (m2 / (samples - 1) as f64 / samples as f64).sqrt()
    } else {
        0.0
    };
    (mean, std_error)
}

/// Mean width of a finite point set under random sign vectors.
pub fn mean_width(points: &[Vec<Rat>], dist: WidthDist, mode: WidthMode) -> Result<WidthEstimate> {
    let dim = check_points(points)?;
    match mode {
        WidthMode::Exact => {
            if dist == WidthDist::Gaussian {
                return Err(Error::domain(
                    "gaussian widths have no finite enumeration; use monte carlo",
                ));
            }
            let value = rademacher_width_exact(points, dim)?;
            Ok(WidthEstimate::exact(value, 1u64 << dim.min(63)))
        }
        WidthMode::MonteCarlo { samples, seed } => {
            if samples == 0 {
                return Err(Error::domain("monte carlo needs at least one sample"));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let matrix = to_f64_matrix(points);
            let (value, std_error) = mc_width(&matrix, dim, dist, samples, &mut rng);
            Ok(WidthEstimate {
                value,
                exact: None,
                std_error,
                samples,
                seed,
                kind: EstimateKind::MonteCarlo,
            })
        }
    }
}

fn multiset_count(points: usize, n: usize) -> u128 {
    // C(points + n - 1, n), saturating.
    let mut result: u128 = 1;
    for i in 0..n {
        result = result.saturating_mul((points + i) as u128);
        result /= (i + 1) as u128;
        if result > EXACT_TUPLE_LIMIT * 4 {
            return u128::MAX;
        }
    }
    result
}

/// Width profile of a function class.
///
/// Without a measure this is the supremum over `n`-point tuples of the
/// mean width of the evaluated class (exact mode enumerates column
/// multisets; coordinate permutations permute sign vectors, so order
/// does not matter). With a measure it is the normalized expected width
/// `E[w(Q(x̄))]/n` under `n` independent draws.
pub fn width_profile(
    class: &FunctionClass,
    n: usize,
    dist: WidthDist,
    mu: Option<&DiscreteMeasure>,
    mode: WidthMode,
) -> Result<WidthEstimate> {
    if n == 0 {
        return Err(Error::domain("profile size n must be at least 1"));
    }
    if class.is_empty() || class.point_count() == 0 {
        return Err(Error::domain("width profile needs a nonempty class on nonempty ground"));
    }
    if let Some(mu) = mu {
        if mu.len() != class.point_count() {
            return Err(Error::domain("measure and class ground sizes differ"));
        }
    }
    match mode {
        WidthMode::Exact => {
            if dist == WidthDist::Gaussian {
                return Err(Error::domain(
                    "gaussian widths have no finite enumeration; use monte carlo",
                ));
            }
            if n > EXACT_SIGN_LIMIT {
                return Err(Error::capacity(format!(
                    "exact profile enumerates 2^{n} sign vectors; limit is 2^{EXACT_SIGN_LIMIT}"
                )));
            }
            match mu {
                None => {
                    if multiset_count(class.point_count(), n) > EXACT_TUPLE_LIMIT {
                        return Err(Error::capacity(
                            "too many column multisets for an exact profile",
                        ));
                    }
                    let mut best = Rat::zero();
                    let mut first = true;
                    let mut enumerated = 0u64;
                    for xbar in (0..class.point_count()).combinations_with_replacement(n) {
                        let rows = class.restrict(&xbar)?;
                        let w = rademacher_width_exact(&rows, n)?;
                        if first || w > best {
                            best = w;
                            first = false;
                        }
                        enumerated += 1;
                    }
                    Ok(WidthEstimate::exact(best, enumerated << n.min(63)))
                }
                Some(mu) => {
                    let support = mu.support();
                    let tuples = (support.len() as u128).checked_pow(n as u32);
                    if tuples.is_none() || tuples.unwrap() > EXACT_TUPLE_LIMIT {
                        return Err(Error::capacity(
                            "too many support tuples for an exact complexity",
                        ));
                    }
                    let mut total = Rat::zero();
                    let mut stack: Vec<(Vec<usize>, Rat)> =
                        vec![(Vec::new(), Rat::from_integer(1.into()))];
                    while let Some((tuple, weight)) = stack.pop() {
                        if tuple.len() == n {
                            let rows = class.restrict(&tuple)?;
                            total += rademacher_width_exact(&rows, n)? * weight;
                            continue;
                        }
                        for &x in &support {
                            let mut next = tuple.clone();
                            next.push(x);
                            stack.push((next, &weight * mu.weight(x)));
                        }
                    }
                    let value = total / Rat::from_integer((n as u64).into());
                    Ok(WidthEstimate::exact(value, 0))
                }
            }
        }
        WidthMode::MonteCarlo { samples, seed } => {
            if samples == 0 {
                return Err(Error::domain("monte carlo needs at least one sample"));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let inner_exact = dist == WidthDist::Rademacher && n <= 10;
            let draw_tuple = |rng: &mut ChaCha8Rng| -> Vec<usize> {
                (0..n)
                    .map(|_| match mu {
                        Some(mu) => mu.sample(rng),
                        None => rng.gen_range(0..class.point_count()),
                    })
                    .collect()
            };
            if mu.is_none() {
                // Random search: a certified lower bound on the supremum.
                let mut best = f64::NEG_INFINITY;
                let mut best_se = 0.0;
                for _ in 0..samples {
                    let xbar = draw_tuple(&mut rng);
                    let rows = class.restrict(&xbar)?;
                    let (value, se) = if inner_exact {
                        let w = rademacher_width_exact(&rows, n)?;
                        (rat::rat_to_f64(&w), 0.0)
                    } else {
                        let inner_seed = rng.gen::<u64>();
                        let mut inner = ChaCha8Rng::seed_from_u64(inner_seed);
                        mc_width(&to_f64_matrix(&rows), n, dist, INNER_MC_SAMPLES, &mut inner)
                    };
                    if value > best {
                        best = value;
                        best_se = se;
                    }
                }
                Ok(WidthEstimate {
                    value: best,
                    exact: None,
                    std_error: best_se,
                    samples,
                    seed,
                    kind: EstimateKind::MonteCarlo,
                })
            } else {
                let mut mean = 0.0f64;
                let mut m2 = 0.0f64;
                for k in 1..=samples {
                    let xbar = draw_tuple(&mut rng);
                    let rows = class.restrict(&xbar)?;
                    let value = if inner_exact {
                        rat::rat_to_f64(&rademacher_width_exact(&rows, n)?)
                    } else {
                        let inner_seed = rng.gen::<u64>();
                        let mut inner = ChaCha8Rng::seed_from_u64(inner_seed);
                        mc_width(&to_f64_matrix(&rows), n, dist, INNER_MC_SAMPLES, &mut inner).0
                    };
                    let delta = value - mean;
                    mean += delta / k as f64;
                    m2 += delta * (value - mean);
                }
                let std_error = if samples > 1 {
                    (m2 / (samples - 1) as f64 / samples as f64).sqrt() / n as f64
                } else {
                    0.0
                };
                Ok(WidthEstimate {
                    value: mean / n as f64,
                    exact: None,
                    std_error,
                    samples,
                    seed,
                    kind: EstimateKind::MonteCarlo,
                })
            }
        }
    }
}
