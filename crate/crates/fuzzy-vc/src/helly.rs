//! The (p,q) property and the fractional Helly witness search.

use num_bigint::BigInt;
use num_integer::binomial;
use num_traits::{One, Signed, Zero};

use itertools::Itertools;

use crate::rat::{self, Rat};
use crate::system::{FuzzyRelation, Mark, SetSystem};
use crate::{Error, Result};

/// Default ceiling for the dual-shatter parameter search.
pub const DEFAULT_M_MAX: usize = 32;

/// True when among any `p` members (by index, multiplicities respected)
/// some `q` share a common point. Exhaustive over all index p-subsets;
/// `q` sets intersect exactly when some point lies in at least `q` of
/// the chosen members.
pub fn has_pq_property(system: &SetSystem, p: usize, q: usize) -> Result<bool> {
    if q < 1 || p < q {
        return Err(Error::domain(format!(
            "(p,q) needs p >= q >= 1, got p = {p}, q = {q}"
        )));
    }
    if system.len() < p {
        return Err(Error::domain(format!(
            "(p,q) check needs at least p = {p} sets, got {}",
            system.len()
        )));
    }
    let ground = system.ground_size();
    for subfamily in (0..system.len()).combinations(p) {
        let mut depth = vec![0usize; ground];
        let mut witnessed = false;
        'outer: for &i in &subfamily {
            for &x in &system.sets()[i] {
                depth[x] += 1;
                if depth[x] >= q {
                    witnessed = true;
                    break 'outer;
                }
            }
        }
        if !witnessed {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Exact binomial as a rational.
fn binom_rat(n: usize, k: usize) -> Rat {
    if k > n {
        return Rat::zero();
    }
    Rat::from_integer(binomial(BigInt::from(n), BigInt::from(k)))
}

/// Smallest `m` in `[k, m_max]` whose dual shatter value drops below
/// `alpha/4 · C(m, k)`, paired with `beta = 1/(2m)`.
pub fn helly_parameters(
    mut dual_shatter: impl FnMut(usize) -> Result<usize>,
    k: usize,
    alpha: &Rat,
    m_max: usize,
) -> Result<Option<(usize, Rat)>> {
    if k < 1 {
        return Err(Error::domain("helly parameter k must be at least 1"));
    }
    if !alpha.is_positive() || alpha > &Rat::one() {
        return Err(Error::domain(format!(
            "alpha must lie in (0,1], got {}",
            rat::format_rat(alpha)
        )));
    }
    let quarter_alpha = alpha / Rat::from_integer(4.into());
    for m in k..=m_max {
        let pi = dual_shatter(m)?;
        let threshold = &quarter_alpha * binom_rat(m, k);
        if Rat::from_integer(pi.into()) < threshold {
            let beta = Rat::new(BigInt::one(), BigInt::from(2 * m as u64));
            return Ok(Some((m, beta)));
        }
    }
    Ok(None)
}

/// A verified fractional-Helly witness: a point avoiding the minus part
/// of at least `ceil(beta·n)` columns, under the `alpha`-fraction
/// intersection hypothesis.
#[derive(Clone, Debug)]
pub struct HellyCertificate {
    pub k: usize,
    pub alpha: Rat,
    pub m: usize,
    pub beta: Rat,
    pub n: usize,
    pub good_fraction: Rat,
    pub j: Vec<usize>,
    pub witness: usize,
}

impl HellyCertificate {
    /// Re-checks every recorded claim against the relation.
    pub fn verify(&self, relation: &FuzzyRelation) -> Result<()> {
        let fail = |msg: String| Err(Error::Internal(format!("helly certificate: {msg}")));
        if self.beta != Rat::new(BigInt::one(), BigInt::from(2 * self.m as u64)) {
            return fail("beta differs from 1/(2m)".into());
        }
        if self.good_fraction < self.alpha {
            return fail("good fraction below alpha".into());
        }
        let required = required_j(&self.beta, self.n);
        if self.j.len() < required {
            return fail(format!("|J| = {} below required {required}", self.j.len()));
        }
        for &col in &self.j {
            if relation.mark(self.witness, col) == Mark::Minus {
                return fail(format!("witness sits in the minus part of column {col}"));
            }
        }
        Ok(())
    }
}

fn required_j(beta: &Rat, n: usize) -> usize {
    let need = beta * Rat::from_integer((n as u64).into());
    let ceil = need.ceil().to_integer();
    ceil.try_into().unwrap_or(usize::MAX)
}

/// Counts column k-tuples whose plus parts share a point.
pub fn count_intersecting_tuples(relation: &FuzzyRelation, k: usize) -> Result<BigInt> {
    let n = relation.y_size();
    if k < 1 || k > n {
        return Err(Error::domain(format!(
            "tuple size k must satisfy 1 <= k <= {n}, got {k}"
        )));
    }
    let mut count = BigInt::zero();
    for tuple in (0..n).combinations(k) {
        let nonempty = (0..relation.x_size()).any(|x| {
            tuple
                .iter()
                .all(|&y| relation.mark(x, y) == Mark::Plus)
        });
        if nonempty {
            count += 1;
        }
    }
    Ok(count)
}

/// Runs the fractional-Helly pipeline on a fuzzy relation with the
/// default parameter ceiling.
pub fn fractional_helly_witness(
    relation: &FuzzyRelation,
    k: usize,
    alpha: &Rat,
) -> Result<HellyCertificate> {
    fractional_helly_witness_with_m_max(relation, k, alpha, DEFAULT_M_MAX)
}

/// (1) checks the `alpha`-fraction hypothesis on intersecting k-tuples
/// of plus columns, (2) finds the dual-shatter parameters `(m, beta)`,
/// (3) returns the point avoiding the most minus columns, provided it
/// reaches `ceil(beta·n)` of them.
///
/// The dual shatter function is evaluated exactly up to the column
/// count; beyond it there are no probe sets and the value is taken as 0.
pub fn fractional_helly_witness_with_m_max(
    relation: &FuzzyRelation,
    k: usize,
    alpha: &Rat,
    m_max: usize,
) -> Result<HellyCertificate> {
    let n = relation.y_size();
    if n == 0 || relation.x_size() == 0 {
        return Err(Error::domain("relation must have rows and columns"));
    }
    if k > n {
        return Err(Error::domain(format!("k = {k} exceeds column count {n}")));
    }
    let good = count_intersecting_tuples(relation, k)?;
    let total = binom_rat(n, k);
    let good_fraction = Rat::from_integer(good) / &total;
    if &good_fraction < alpha {
        return Err(Error::Hypothesis(format!(
            "intersecting k-tuple fraction {} is below alpha = {}",
            rat::format_rat(&good_fraction),
            rat::format_rat(alpha)
        )));
    }

    let column_side = relation.row_system();
    let params = helly_parameters(
        |m| {
            if m <= n {
                column_side.shatter_function(m)
            } else {
                Ok(0)
            }
        },
        k,
        alpha,
        m_max,
    )?;
    let Some((m, beta)) = params else {
        return Err(Error::NotFound {
            reason: format!("no m <= {m_max} satisfies the dual-shatter threshold"),
            best_deviation: None,
        });
    };

    let (witness, j) = (0..relation.x_size())
        .map(|x| {
            let j: Vec<usize> = (0..n)
                .filter(|&y| relation.mark(x, y) != Mark::Minus)
                .collect();
            (x, j)
        })
        .max_by(|a, b| a.1.len().cmp(&b.1.len()).then(b.0.cmp(&a.0)))
        .expect("x side is nonempty");
    let required = required_j(&beta, n);
    if j.len() < required {
        return Err(Error::NotFound {
            reason: format!(
                "best witness avoids only {} of the required {required} minus columns",
                j.len()
            ),
            best_deviation: None,
        });
    }
    let certificate = HellyCertificate {
        k,
        alpha: alpha.clone(),
        m,
        beta,
        n,
        good_fraction,
        j,
        witness,
    };
    certificate.verify(relation)?;
    Ok(certificate)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;
    use crate::system::FuzzySetSystem;

    fn triangle_sets() -> SetSystem {
        SetSystem::new(3, vec![vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap()
    }

    #[test]
    fn pq_property_on_triangle() {
        let tri = triangle_sets();
        assert!(has_pq_property(&tri, 2, 2).unwrap());
        assert!(!has_pq_property(&tri, 3, 3).unwrap());
        assert!(has_pq_property(&tri, 3, 2).unwrap());
    }

    #[test]
    fn pq_property_base_cases() {
        let tri = triangle_sets();
        assert!(has_pq_property(&tri, 1, 1).unwrap());
        assert!(has_pq_property(&tri, 2, 1).unwrap());

        let with_empty = SetSystem::new(2, vec![vec![0], vec![]]).unwrap();
        assert!(!has_pq_property(&with_empty, 1, 1).unwrap());

        assert!(has_pq_property(&tri, 4, 2).is_err());
        assert!(has_pq_property(&tri, 1, 2).is_err());
    }

    #[test]
    fn pq_monotone_in_p() {
        let tri = triangle_sets();
        // (2,2) holds, so (3,2) must as well.
        assert!(has_pq_property(&tri, 2, 2).unwrap());
        assert!(has_pq_property(&tri, 3, 2).unwrap());
    }

    #[test]
    fn helly_parameters_linear_growth() {
        let (m, beta) = helly_parameters(|m| Ok(m + 1), 2, &rat(1, 1), 32)
            .unwrap()
            .unwrap();
        assert_eq!(m, 10);
        assert_eq!(beta, rat(1, 20));
    }

    #[test]
    fn helly_parameters_exponential_growth_is_absent() {
        let out = helly_parameters(
            |m| Ok(1usize.checked_shl(m as u32).unwrap_or(usize::MAX)),
            3,
            &rat(1, 2),
            16,
        )
        .unwrap();
        assert!(out.is_none());
    }

    #[test]
    fn helly_parameters_zero_shatter() {
        let (m, beta) = helly_parameters(|_| Ok(0), 1, &rat(1, 1), 32)
            .unwrap()
            .unwrap();
        assert_eq!(m, 1);
        assert_eq!(beta, rat(1, 2));
    }

    fn relation_from_columns(x_size: usize, plus: &[&[usize]], minus: &[&[usize]]) -> FuzzyRelation {
        let y = plus.len();
        let entries = (0..x_size)
            .map(|x| {
                (0..y)
                    .map(|c| {
                        if plus[c].contains(&x) {
                            Mark::Plus
                        } else if minus[c].contains(&x) {
                            Mark::Minus
                        } else {
                            Mark::Star
                        }
                    })
                    .collect()
            })
            .collect();
        FuzzyRelation::new(x_size, y, entries).unwrap()
    }

    #[test]
    fn single_point_meets_everything() {
        let r = relation_from_columns(1, &[&[0], &[0], &[0]], &[&[], &[], &[]]);
        let cert = fractional_helly_witness(&r, 2, &rat(1, 1)).unwrap();
        assert_eq!(cert.witness, 0);
        assert_eq!(cert.j, vec![0, 1, 2]);
        cert.verify(&r).unwrap();
    }

    #[test]
    fn triangle_incidence_witness() {
        // Columns are triangle edges over the vertex ground.
        let tri = triangle_sets().to_fuzzy().to_relation();
        let cert = fractional_helly_witness(&tri, 2, &rat(1, 1)).unwrap();
        assert_eq!(cert.j.len(), 2);
        assert_eq!(cert.witness, 0);
        cert.verify(&tri).unwrap();
    }

    #[test]
    fn hypothesis_guard_fires() {
        // No pair of plus columns intersects.
        let r = relation_from_columns(2, &[&[0], &[1]], &[&[1], &[0]]);
        assert!(matches!(
            fractional_helly_witness(&r, 2, &rat(1, 2)),
            Err(Error::Hypothesis(_))
        ));
    }

    #[test]
    fn small_n_singleton_clause() {
        // Whenever n <= 2m^2 and some plus column is nonempty, the best
        // witness avoids at least one minus column.
        let f = FuzzySetSystem::new(
            4,
            vec![
                crate::system::FuzzySet::new([0, 1], [2]).unwrap(),
                crate::system::FuzzySet::new([1, 2], [0]).unwrap(),
                crate::system::FuzzySet::new([0, 3], []).unwrap(),
            ],
        )
        .unwrap();
        let r = f.to_relation();
        let cert = fractional_helly_witness(&r, 2, &rat(1, 3)).unwrap();
        assert!(cert.n <= 2 * cert.m * cert.m);
        assert!(!cert.j.is_empty());
    }
}
