//! Finitely supported probability measures with exact rational weights.

use num_bigint::{BigInt, BigUint, RandBigInt};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::Rng;

use crate::rat::{self, Rat};
use crate::{Error, Result};

/// A probability measure on `0..len`: nonnegative rational weights that
/// sum to exactly 1. Sampling is exact: a uniform integer below the
/// common denominator is compared against cumulative scaled weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiscreteMeasure {
    weights: Vec<Rat>,
    cumulative_scaled: Vec<BigUint>,
    denominator: BigUint,
}

impl DiscreteMeasure {
    pub fn new(weights: Vec<Rat>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::domain("measure needs at least one point"));
        }
        let mut total = Rat::zero();
        for (i, w) in weights.iter().enumerate() {
            if w.is_negative() {
                return Err(Error::domain(format!("weight {i} is negative")));
            }
            total += w;
        }
        if !total.is_one() {
            return Err(Error::domain(format!(
                "weights sum to {}, expected 1/1",
                rat::format_rat(&total)
            )));
        }
        let denominator: BigInt = weights
            .iter()
            .fold(BigInt::one(), |acc, w| acc.lcm(w.denom()));
        let mut cumulative_scaled = Vec::with_capacity(weights.len());
        let mut acc = BigInt::zero();
        for w in &weights {
            acc += w.numer() * (&denominator / w.denom());
            cumulative_scaled.push(acc.to_biguint().expect("nonnegative cumulative"));
        }
        let denominator = denominator.to_biguint().expect("positive denominator");
        debug_assert_eq!(cumulative_scaled.last(), Some(&denominator));
        Ok(DiscreteMeasure { weights, cumulative_scaled, denominator })
    }

    pub fn uniform(len: usize) -> Result<Self> {
        if len == 0 {
            return Err(Error::domain("uniform measure needs at least one point"));
        }
        Self::new(vec![rat::rat(1, len as i64); len])
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn weights(&self) -> &[Rat] {
        &self.weights
    }

    pub fn weight(&self, x: usize) -> &Rat {
        &self.weights[x]
    }

    /// Points with strictly positive mass.
    pub fn support(&self) -> Vec<usize> {
        (0..self.weights.len())
            .filter(|&x| self.weights[x].is_positive())
            .collect()
    }

    /// Total mass of a set of points.
    pub fn mass(&self, points: impl IntoIterator<Item = usize>) -> Rat {
        points
            .into_iter()
            .fold(Rat::zero(), |acc, x| acc + &self.weights[x])
    }

    /// Expectation of a function given by its value vector.
    pub fn expectation(&self, values: &[Rat]) -> Result<Rat> {
        if values.len() != self.weights.len() {
            return Err(Error::domain(format!(
                "expectation over {} values against a measure on {} points",
                values.len(),
                self.weights.len()
            )));
        }
        Ok(values
            .iter()
            .zip(&self.weights)
            .fold(Rat::zero(), |acc, (v, w)| acc + v * w))
    }

    /// Draws one point with exactly the declared probabilities.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> usize {
        let draw = rng.gen_biguint_below(&self.denominator);
        self.cumulative_scaled
            .iter()
            .position(|c| &draw < c)
            .expect("cumulative ends at the denominator")
    }
}
