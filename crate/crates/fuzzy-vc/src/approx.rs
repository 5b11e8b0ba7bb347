//! ε-approximations: tuples whose empirical averages match expectations
//! within ε for every function of a class, plus the Monte Carlo
//! deviation estimator.

use itertools::Itertools;
use num_traits::{Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::measure::DiscreteMeasure;
use crate::rat::{self, Rat};
use crate::FunctionClass;
use crate::{Error, Result};

/// Enumeration guard for the exhaustive search.
const EXHAUSTIVE_TUPLE_LIMIT: u128 = 2_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ApproxStrategy {
    /// Independent draws from the measure, one candidate per size.
    Random { seed: u64 },
    /// Smallest size admitting an approximation, by support enumeration.
    ExhaustiveMin,
}

/// Empirical average of row `row` over the tuple `xbar`.
pub fn average(class: &FunctionClass, row: usize, xbar: &[usize]) -> Rat {
    let sum = xbar
        .iter()
        .fold(Rat::zero(), |acc, &x| acc + class.value(row, x));
    sum / Rat::from_integer((xbar.len() as u64).into())
}

fn check_inputs(class: &FunctionClass, mu: &DiscreteMeasure, xbar: &[usize]) -> Result<()> {
    if mu.len() != class.point_count() {
        return Err(Error::domain("measure and class ground sizes differ"));
    }
    if xbar.is_empty() {
        return Err(Error::domain("tuple must be nonempty"));
    }
    if let Some(&x) = xbar.iter().find(|&&x| x >= class.point_count()) {
        return Err(Error::domain(format!(
            "tuple mentions point {x} outside ground 0..{}",
            class.point_count()
        )));
    }
    Ok(())
}

/// Largest deviation |Av - E| over the rows, exactly.
pub fn max_deviation(class: &FunctionClass, mu: &DiscreteMeasure, xbar: &[usize]) -> Result<Rat> {
    check_inputs(class, mu, xbar)?;
    let mut worst = Rat::zero();
    for row in 0..class.len() {
        let av = average(class, row, xbar);
        let ex = mu.expectation(&class.rows()[row])?;
        let dev = (av - ex).abs();
        if dev > worst {
            worst = dev;
        }
    }
    Ok(worst)
}

/// True when `xbar` is an ε-approximation for the class with respect to
/// `mu`: every row's average over the tuple is within `eps` of its
/// expectation, compared exactly.
pub fn is_eps_approximation(
    xbar: &[usize],
    class: &FunctionClass,
    mu: &DiscreteMeasure,
    eps: &Rat,
) -> Result<bool> {
    Ok(max_deviation(class, mu, xbar)? <= *eps)
}

/// Finds a verified ε-approximation drawn from the support of `mu`.
pub fn find_eps_approximation(
    class: &FunctionClass,
    mu: &DiscreteMeasure,
    eps: &Rat,
    strategy: ApproxStrategy,
    size_cap: usize,
) -> Result<Vec<usize>> {
    if !eps.is_positive() {
        return Err(Error::domain(format!(
            "eps must be positive, got {}",
            rat::format_rat(eps)
        )));
    }
    if mu.len() != class.point_count() {
        return Err(Error::domain("measure and class ground sizes differ"));
    }
    let support = mu.support();
    let mut best: Option<Rat> = None;
    let mut consider = |dev: Rat| {
        if best.as_ref().is_none_or(|b| dev < *b) {
            best = Some(dev);
        }
    };
    match strategy {
        ApproxStrategy::Random { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for size in 1..=size_cap {
                let xbar: Vec<usize> = (0..size).map(|_| mu.sample(&mut rng)).collect();
                let dev = max_deviation(class, mu, &xbar)?;
                if dev <= *eps {
                    return Ok(xbar);
                }
                consider(dev);
            }
        }
        ApproxStrategy::ExhaustiveMin => {
            for size in 1..=size_cap {
                let count = multiset_count(support.len(), size);
                if count > EXHAUSTIVE_TUPLE_LIMIT {
                    return Err(Error::capacity(format!(
                        "exhaustive search at size {size} needs {count} support multisets"
                    )));
                }
                // Averages are symmetric in the tuple, so multisets suffice.
                for xbar in support.iter().copied().combinations_with_replacement(size) {
                    let dev = max_deviation(class, mu, &xbar)?;
                    if dev <= *eps {
                        return Ok(xbar);
                    }
                    consider(dev);
                }
            }
        }
    }
    Err(Error::NotFound {
        reason: format!("no eps-approximation of size <= {size_cap}"),
        best_deviation: best,
    })
}

fn multiset_count(points: usize, n: usize) -> u128 {
    let mut result: u128 = 1;
    for i in 0..n {
        result = result.saturating_mul((points + i) as u128);
        result /= (i + 1) as u128;
        if result > EXHAUSTIVE_TUPLE_LIMIT * 4 {
            return u128::MAX;
        }
    }
    result
}

/// Monte Carlo estimate of the one-sided deviation probability
/// P[sup over rows of (Av(x̄) - E) > eps] under `n` independent draws
/// from `mu`. Per-trial comparisons are exact.
pub fn deviation_estimate(
    class: &FunctionClass,
    mu: &DiscreteMeasure,
    n: usize,
    eps: &Rat,
    trials: u64,
    seed: u64,
) -> Result<f64> {
    if trials == 0 {
        return Err(Error::domain("need at least one trial"));
    }
    if n == 0 {
        return Err(Error::domain("sample size n must be at least 1"));
    }
    if mu.len() != class.point_count() {
        return Err(Error::domain("measure and class ground sizes differ"));
    }
    let expectations: Vec<Rat> = (0..class.len())
        .map(|row| mu.expectation(&class.rows()[row]))
        .collect::<Result<_>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut exceed = 0u64;
    for _ in 0..trials {
        let xbar: Vec<usize> = (0..n).map(|_| mu.sample(&mut rng)).collect();
        let hit = (0..class.len()).any(|row| {
            let av = average(class, row, &xbar);
            &(av - &expectations[row]) > eps
        });
        if hit {
            exceed += 1;
        }
    }
    Ok(exceed as f64 / trials as f64)
}
