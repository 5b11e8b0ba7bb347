//! Seeded, deterministic instance generators.
//!
//! The families are chosen so that the hypotheses of the combinatorial
//! pipelines hold by construction: interval systems have small
//! VC-dimension, margin intervals nest their inner sets inside their
//! outer sets, and distance functions give Lipschitz rows on a rational
//! grid.

use num_bigint::BigInt;
use num_traits::{One, Signed};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::instance::InstanceFile;
use crate::measure::DiscreteMeasure;
use crate::rat::{self, Rat};
use crate::system::{FuzzySet, FuzzySetSystem, SetSystem};
use crate::FunctionClass;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GenKind {
    /// `k` integer intervals over `n` points on a line.
    CrispIntervals,
    /// Intervals with an indeterminate margin of `margin` points.
    FuzzyMarginIntervals,
    /// Rows `min(1, |x - c| / width)` over the grid `j/(n-1)`.
    DistanceFunctions,
    /// Independent `{+,-,*}` entries with given probabilities.
    RandomFuzzy,
    /// Independent grid rationals `u/grid`.
    RandomFunctionMatrix,
}

impl GenKind {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "crisp_intervals" => Ok(GenKind::CrispIntervals),
            "fuzzy_margin_intervals" => Ok(GenKind::FuzzyMarginIntervals),
            "distance_functions" => Ok(GenKind::DistanceFunctions),
            "random_fuzzy" => Ok(GenKind::RandomFuzzy),
            "random_function_matrix" => Ok(GenKind::RandomFunctionMatrix),
            other => Err(Error::domain(format!("unknown generator kind {other:?}"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct GenParams {
    /// Ground points (or grid points).
    pub n: usize,
    /// Sets or rows.
    pub k: usize,
    /// Indeterminacy margin, in points.
    pub margin: usize,
    /// Width of the distance cones.
    pub width: Rat,
    /// Denominator of the value grid.
    pub grid: u64,
    pub p_plus: Rat,
    pub p_minus: Rat,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            n: 6,
            k: 4,
            margin: 1,
            width: rat::rat(1, 2),
            grid: 8,
            p_plus: rat::rat(1, 3),
            p_minus: rat::rat(1, 3),
        }
    }
}

impl GenParams {
    /// Parses `"n=6,k=4,width=1/2"`-style overrides onto the defaults.
    pub fn parse_str(text: &str) -> Result<Self> {
        let mut params = GenParams::default();
        if text.trim().is_empty() {
            return Ok(params);
        }
        for piece in text.split(',') {
            let (key, value) = piece
                .split_once('=')
                .ok_or_else(|| Error::domain(format!("bad parameter {piece:?}, want key=value")))?;
            let uint = |v: &str| {
                v.parse::<usize>()
                    .map_err(|_| Error::domain(format!("parameter {key} must be an integer")))
            };
            match key {
                "n" => params.n = uint(value)?,
                "k" => params.k = uint(value)?,
                "margin" => params.margin = uint(value)?,
                "grid" => params.grid = uint(value)? as u64,
                "width" => params.width = rat::parse_rat(value, "width")?,
                "p_plus" => params.p_plus = rat::parse_rat(value, "p_plus")?,
                "p_minus" => params.p_minus = rat::parse_rat(value, "p_minus")?,
                other => return Err(Error::domain(format!("unknown parameter {other:?}"))),
            }
        }
        Ok(params)
    }
}

fn interval(rng: &mut ChaCha8Rng, n: usize) -> (usize, usize) {
    let a = rng.gen_range(0..n);
    let b = rng.gen_range(0..n);
    (a.min(b), a.max(b))
}

/// Deterministic instance generation: identical `(kind, params, seed)`
/// produce identical files.
pub fn generate(kind: GenKind, params: &GenParams, seed: u64) -> Result<InstanceFile> {
    if params.n == 0 {
        return Err(Error::domain("generator needs n >= 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match kind {
        GenKind::CrispIntervals => {
            let sets = (0..params.k)
                .map(|_| {
                    let (a, b) = interval(&mut rng, params.n);
                    (a..=b).collect()
                })
                .collect();
            Ok(InstanceFile::SetSystem(SetSystem::new(params.n, sets)?))
        }
        GenKind::FuzzyMarginIntervals => {
            let w = params.margin;
            let sets = (0..params.k)
                .map(|_| {
                    let (a, b) = interval(&mut rng, params.n);
                    let plus: Vec<usize> = if a + w <= b.saturating_sub(w) && b >= w {
                        (a + w..=b - w).collect()
                    } else {
                        Vec::new()
                    };
                    let minus: Vec<usize> = (0..params.n)
                        .filter(|&x| x + w < a || x > b + w)
                        .collect();
                    FuzzySet::new(plus, minus)
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(InstanceFile::FuzzySystem(FuzzySetSystem::new(params.n, sets)?))
        }
        GenKind::DistanceFunctions => {
            if params.n < 2 {
                return Err(Error::domain("distance functions need n >= 2 grid points"));
            }
            if !params.width.is_positive() {
                return Err(Error::domain("distance functions need a positive width"));
            }
            let denom = BigInt::from((params.n - 1) as u64);
            let grid: Vec<Rat> = (0..params.n)
                .map(|j| Rat::new(BigInt::from(j as u64), denom.clone()))
                .collect();
            let rows = (0..params.k)
                .map(|_| {
                    let c = grid[rng.gen_range(0..params.n)].clone();
                    grid.iter()
                        .map(|x| {
                            let d = (x - &c).abs() / &params.width;
                            d.min(Rat::one())
                        })
                        .collect()
                })
                .collect();
            Ok(InstanceFile::FunctionClass(FunctionClass::new(params.n, rows)?))
        }
        GenKind::RandomFuzzy => {
            let rest = Rat::one() - &params.p_plus - &params.p_minus;
            if params.p_plus.is_negative() || params.p_minus.is_negative() || rest.is_negative() {
                return Err(Error::domain(
                    "random fuzzy probabilities must be nonnegative and sum to at most 1",
                ));
            }
            let categorical =
                DiscreteMeasure::new(vec![params.p_plus.clone(), params.p_minus.clone(), rest])?;
            let sets = (0..params.k)
                .map(|_| {
                    let mut plus = Vec::new();
                    let mut minus = Vec::new();
                    for x in 0..params.n {
                        match categorical.sample(&mut rng) {
                            0 => plus.push(x),
                            1 => minus.push(x),
                            _ => {}
                        }
                    }
                    FuzzySet::new(plus, minus)
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(InstanceFile::FuzzySystem(FuzzySetSystem::new(params.n, sets)?))
        }
        GenKind::RandomFunctionMatrix => {
            if params.grid == 0 {
                return Err(Error::domain("value grid must have a positive denominator"));
            }
            let rows = (0..params.k)
                .map(|_| {
                    (0..params.n)
                        .map(|_| {
                            let u = rng.gen_range(0..=params.grid);
                            Rat::new(BigInt::from(u), BigInt::from(params.grid))
                        })
                        .collect()
                })
                .collect();
            Ok(InstanceFile::FunctionClass(FunctionClass::new(params.n, rows)?))
        }
    }
}

#[cfg(test)]
mod tests {
    use num_traits::Zero;
    use super::*;
    use crate::instance::canonical_json;

    #[test]
    fn generation_is_deterministic() {
        let params = GenParams::default();
        for kind in [
            GenKind::CrispIntervals,
            GenKind::FuzzyMarginIntervals,
            GenKind::DistanceFunctions,
            GenKind::RandomFuzzy,
            GenKind::RandomFunctionMatrix,
        ] {
            let a = generate(kind, &params, 41).unwrap();
            let b = generate(kind, &params, 41).unwrap();
            assert_eq!(canonical_json(&a), canonical_json(&b));
            let c = generate(kind, &params, 42).unwrap();
            let _ = c; // different seeds may coincide on tiny instances
        }
    }

    #[test]
    fn crisp_intervals_have_small_vc() {
        let params = GenParams { n: 5, k: 3, ..GenParams::default() };
        for seed in 0..10 {
            let inst = generate(GenKind::CrispIntervals, &params, seed).unwrap();
            let InstanceFile::SetSystem(s) = inst else { panic!("wrong type") };
            let vc = s.to_fuzzy().vc_dimension().unwrap();
            assert!(vc <= 2, "interval system with vc {vc}");
        }
    }

    #[test]
    fn margin_intervals_nest_inner_in_outer() {
        let params = GenParams { n: 8, k: 6, margin: 2, ..GenParams::default() };
        for seed in 0..10 {
            let inst = generate(GenKind::FuzzyMarginIntervals, &params, seed).unwrap();
            let InstanceFile::FuzzySystem(f) = inst else { panic!("wrong type") };
            for s in f.sets() {
                for &x in s.plus() {
                    assert!(!s.in_minus(x));
                }
            }
        }
    }

    #[test]
    fn distance_rows_live_on_the_grid() {
        let params = GenParams { n: 5, k: 4, width: rat::rat(1, 2), ..GenParams::default() };
        let inst = generate(GenKind::DistanceFunctions, &params, 3).unwrap();
        let InstanceFile::FunctionClass(q) = inst else { panic!("wrong type") };
        assert_eq!(q.point_count(), 5);
        assert_eq!(q.len(), 4);
        // Every row touches 0 at its center.
        for row in q.rows() {
            assert!(row.iter().any(|v| v.is_zero()));
        }
    }

    #[test]
    fn params_parse_and_reject() {
        let p = GenParams::parse_str("n=9,k=2,width=1/4").unwrap();
        assert_eq!(p.n, 9);
        assert_eq!(p.k, 2);
        assert_eq!(p.width, rat::rat(1, 4));
        assert!(GenParams::parse_str("bogus").is_err());
        assert!(GenParams::parse_str("n=x").is_err());
        assert!(GenParams::parse_str("mystery=1").is_err());
    }

    #[test]
    fn random_fuzzy_respects_probability_bounds() {
        let params = GenParams {
            p_plus: rat::rat(2, 3),
            p_minus: rat::rat(2, 3),
            ..GenParams::default()
        };
        assert!(generate(GenKind::RandomFuzzy, &params, 0).is_err());
    }
}
