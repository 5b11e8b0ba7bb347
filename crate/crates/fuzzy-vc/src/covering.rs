//! ℓ∞ covering and packing numbers of evaluated function classes, and
//! the closed-form covering/deviation bound calculators.
//!
//! The unconstrained external covering number ranges over a continuum of
//! centers, so it is bracketed instead of computed: `Internal` restricts
//! centers to the evaluated rows (an upper bound on the external number),
//! `Grid` restricts them to a step lattice, and `Packing` counts rows
//! pairwise further than `2·eps` apart (a lower bound for every variant,
//! since such rows cannot share an ε-ball).

use num_traits::{One, Signed, Zero};

use crate::cover::{max_clique, min_cover};
use crate::rat::{self, Rat};
use crate::FunctionClass;
use crate::{Error, Result};

/// Grid covering is exponential in the tuple length.
pub const GRID_DIMENSION_LIMIT: usize = 4;
const GRID_CENTER_LIMIT: u128 = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoveringMethod {
    /// Exact minimum cover with centers among the evaluated rows.
    Internal,
    /// Exact minimum cover with centers on the `step`-lattice of the cube.
    Grid { step: Rat },
    /// Maximum number of rows pairwise more than `2·eps` apart.
    Packing,
}

/// ℓ∞ distance between equal-length rational vectors.
pub fn linf_distance(a: &[Rat], b: &[Rat]) -> Rat {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .max()
        .unwrap_or_else(Rat::zero)
}

pub fn covering_number(
    class: &FunctionClass,
    xbar: &[usize],
    eps: &Rat,
    method: CoveringMethod,
) -> Result<usize> {
    if !eps.is_positive() {
        return Err(Error::domain(format!(
            "eps must be positive, got {}",
            rat::format_rat(eps)
        )));
    }
    let rows = class.restrict(xbar)?;
    if rows.is_empty() {
        return Ok(0);
    }
    if rows.len() > 64 {
        return Err(Error::capacity(format!(
            "covering computations support at most 64 rows, got {}",
            rows.len()
        )));
    }
    let universe: u64 = if rows.len() == 64 {
        u64::MAX
    } else {
        (1u64 << rows.len()) - 1
    };
    match method {
        CoveringMethod::Internal => {
            let candidates: Vec<u64> = rows
                .iter()
                .map(|center| {
                    rows.iter()
                        .enumerate()
                        .filter(|(_, row)| linf_distance(center, row) <= *eps)
                        .fold(0u64, |m, (j, _)| m | 1 << j)
                })
                .collect();
            let cover = min_cover(universe, &candidates, 0)
                .expect("every row covers itself at distance 0");
            Ok(cover.len())
        }
        CoveringMethod::Grid { step } => {
            if xbar.len() > GRID_DIMENSION_LIMIT {
                return Err(Error::capacity(format!(
                    "grid covering supports tuples of length <= {GRID_DIMENSION_LIMIT}, got {}",
                    xbar.len()
                )));
            }
            if !step.is_positive() || !(Rat::one() / &step).is_integer() {
                return Err(Error::domain(format!(
                    "grid step must be positive and divide 1, got {}",
                    rat::format_rat(&step)
                )));
            }
            let levels: u128 = ((Rat::one() / &step).to_integer())
                .try_into()
                .map_err(|_| Error::capacity("grid step too fine"))?;
            let levels = levels + 1;
            let total = levels.checked_pow(xbar.len() as u32).unwrap_or(u128::MAX);
            if total > GRID_CENTER_LIMIT {
                return Err(Error::capacity(format!(
                    "grid covering would enumerate {total} centers"
                )));
            }
            let dim = xbar.len();
            let mut candidates: Vec<u64> = Vec::new();
            let mut center = vec![0u128; dim];
            loop {
                let center_vec: Vec<Rat> = center
                    .iter()
                    .map(|&i| Rat::from_integer(i.into()) * &step)
                    .collect();
                let mask = rows
                    .iter()
                    .enumerate()
                    .filter(|(_, row)| linf_distance(&center_vec, row) <= *eps)
                    .fold(0u64, |m, (j, _)| m | 1 << j);
                if mask != 0 {
                    candidates.push(mask);
                }
                // Odometer increment over the lattice.
                let mut pos = 0;
                loop {
                    if pos == dim {
                        break;
                    }
                    center[pos] += 1;
                    if center[pos] < levels {
                        break;
                    }
                    center[pos] = 0;
                    pos += 1;
                }
                if pos == dim {
                    break;
                }
                if dim == 0 {
                    break;
                }
            }
            match min_cover(universe, &candidates, 0) {
                Some(cover) => Ok(cover.len()),
                None => Err(Error::domain(
                    "grid too coarse to cover every row at this eps",
                )),
            }
        }
        CoveringMethod::Packing => {
            let threshold = eps * Rat::from_integer(2.into());
            let adjacency: Vec<u64> = rows
                .iter()
                .map(|a| {
                    rows.iter()
                        .enumerate()
                        .filter(|(_, b)| linf_distance(a, b) > threshold)
                        .fold(0u64, |m, (j, _)| m | 1 << j)
                })
                .collect();
            Ok(max_clique(&adjacency).len())
        }
    }
}

/// The quasi-polynomial covering bound
/// `2 · (4n/eps²)^(d · ln(2en/(d·eps)))`, evaluated with natural logs.
pub fn covering_bound(d: usize, n: usize, eps: f64) -> Result<f64> {
    if d < 1 || n < 1 {
        return Err(Error::domain("covering bound needs d >= 1 and n >= 1"));
    }
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::domain(format!("eps must lie in (0,1], got {eps}")));
    }
    let base = 4.0 * n as f64 / (eps * eps);
    let exponent = d as f64 * (2.0 * std::f64::consts::E * n as f64 / (d as f64 * eps)).ln();
    Ok(2.0 * base.powf(exponent))
}

/// The tail bound `12·n·ncov·exp(-eps²·n/36)`, valid under the sampling
/// hypothesis `n >= 2/eps²`.
pub fn deviation_bound(n: usize, eps: f64, ncov: f64) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(Error::domain(format!("eps must be positive, got {eps}")));
    }
    if ncov < 0.0 {
        return Err(Error::domain("covering number must be nonnegative"));
    }
    if (n as f64) < 2.0 / (eps * eps) {
        return Err(Error::domain(format!(
            "hypothesis n >= 2/eps^2 fails: n = {n}, 2/eps^2 = {}",
            2.0 / (eps * eps)
        )));
    }
    Ok(12.0 * n as f64 * ncov * (-eps * eps * n as f64 / 36.0).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    fn two_values() -> FunctionClass {
        FunctionClass::new(1, vec![vec![rat(0, 1)], vec![rat(1, 1)]]).unwrap()
    }

    #[test]
    fn internal_cover_of_separated_points() {
        let q = two_values();
        assert_eq!(
            covering_number(&q, &[0], &rat(2, 5), CoveringMethod::Internal).unwrap(),
            2
        );
        assert_eq!(
            covering_number(&q, &[0], &rat(1, 2), CoveringMethod::Internal).unwrap(),
            2
        );
        assert_eq!(
            covering_number(&q, &[0], &rat(1, 1), CoveringMethod::Internal).unwrap(),
            1
        );
    }

    #[test]
    fn grid_cover_uses_midpoint_center() {
        let q = two_values();
        assert_eq!(
            covering_number(&q, &[0], &rat(1, 2), CoveringMethod::Grid { step: rat(1, 2) })
                .unwrap(),
            1
        );
    }

    #[test]
    fn grid_rejects_bad_steps_and_high_dimension() {
        let q = two_values();
        assert!(covering_number(&q, &[0], &rat(1, 2), CoveringMethod::Grid { step: rat(2, 3) })
            .is_err());
        let wide = FunctionClass::new(5, vec![vec![rat(0, 1); 5]]).unwrap();
        assert!(matches!(
            covering_number(&wide, &[0, 1, 2, 3, 4], &rat(1, 2), CoveringMethod::Grid {
                step: rat(1, 2)
            }),
            Err(Error::Capacity(_))
        ));
    }

    #[test]
    fn packing_counts_far_rows() {
        let q = FunctionClass::new(
            1,
            vec![vec![rat(0, 1)], vec![rat(1, 2)], vec![rat(1, 1)]],
        )
        .unwrap();
        // At eps = 1/5 the far graph (distance > 2/5) links 0-1/2-1.
        assert_eq!(
            covering_number(&q, &[0], &rat(1, 5), CoveringMethod::Packing).unwrap(),
            3
        );
        // At eps = 1/4 only the endpoints stay far apart.
        assert_eq!(
            covering_number(&q, &[0], &rat(1, 4), CoveringMethod::Packing).unwrap(),
            2
        );
    }

    #[test]
    fn packing_lower_bounds_internal_and_grid() {
        let q = FunctionClass::new(
            2,
            vec![
                vec![rat(0, 1), rat(1, 4)],
                vec![rat(1, 2), rat(3, 4)],
                vec![rat(1, 1), rat(1, 8)],
                vec![rat(1, 4), rat(1, 2)],
            ],
        )
        .unwrap();
        let xbar = [0, 1];
        for eps in [rat(1, 8), rat(1, 4), rat(3, 8)] {
            let packing =
                covering_number(&q, &xbar, &eps, CoveringMethod::Packing).unwrap();
            let internal =
                covering_number(&q, &xbar, &eps, CoveringMethod::Internal).unwrap();
            let grid = covering_number(&q, &xbar, &eps, CoveringMethod::Grid {
                step: rat(1, 8),
            })
            .unwrap();
            assert!(packing <= internal, "eps {eps:?}");
            assert!(packing <= grid, "eps {eps:?}");
        }
    }

    #[test]
    fn covering_monotone_in_eps() {
        let q = FunctionClass::new(
            1,
            vec![vec![rat(0, 1)], vec![rat(1, 3)], vec![rat(2, 3)], vec![rat(1, 1)]],
        )
        .unwrap();
        let mut last = usize::MAX;
        for eps in [rat(1, 8), rat(1, 4), rat(1, 2), rat(1, 1)] {
            let n = covering_number(&q, &[0], &eps, CoveringMethod::Internal).unwrap();
            assert!(n <= last);
            last = n;
        }
    }

    #[test]
    fn covering_bound_value_and_monotonicity() {
        let v = covering_bound(1, 1, 1.0).unwrap();
        assert!((v - 20.912_510_523_241_58).abs() < 1e-9, "got {v}");
        assert!(covering_bound(1, 2, 1.0).unwrap() > v);
        assert!(covering_bound(1, 1, 0.5).unwrap() > v);
    }

    #[test]
    fn deviation_bound_values() {
        let v = deviation_bound(36, 1.0, 1.0).unwrap();
        assert!((v - 432.0 / std::f64::consts::E).abs() < 1e-9);
        let w = deviation_bound(288, 1.0, 1.0).unwrap();
        assert!((w - 12.0 * 288.0 * (-8.0f64).exp()).abs() < 1e-9);
        assert_eq!(deviation_bound(100, 1.0, 0.0).unwrap(), 0.0);
        assert!(deviation_bound(1, 1.0, 1.0).is_err());
    }
}
