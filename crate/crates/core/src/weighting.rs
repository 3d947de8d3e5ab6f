//! Priority vectors derived from a pairwise comparison matrix.
//!
//! The eigenvector routines run power iteration from the uniform start
//! vector, renormalizing to unit sum every step. For a positive matrix the
//! Perron root is simple and strictly dominant, so the iteration converges
//! from any positive start, and the fixed start makes results reproducible
//! bit for bit.

use crate::error::{Error, Result};
use crate::matrix::{normalize_as, PCMatrix, Provenance, WeightVector};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenSolverConfig {
    pub max_iterations: usize,
    /// Stop once the largest relative componentwise change between two
    /// iterates, and the relative eigen-residual, are both at most this.
    pub convergence_tol: f64,
}

impl EigenSolverConfig {
    pub fn new(max_iterations: usize, convergence_tol: f64) -> Result<Self> {
        if max_iterations < 1 {
            return Err(Error::InvalidConfig("max_iterations must be at least 1".into()));
        }
        if !(convergence_tol > 0.0 && convergence_tol <= 1e-3) {
            return Err(Error::InvalidConfig(format!(
                "convergence_tol {convergence_tol} not in (0, 1e-3]"
            )));
        }
        Ok(Self {
            max_iterations,
            convergence_tol,
        })
    }
}

impl Default for EigenSolverConfig {
    fn default() -> Self {
        Self {
            max_iterations: 10_000,
            convergence_tol: 1e-12,
        }
    }
}

/// Perron vector of a matrix together with its eigenvalue.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenResult {
    pub weights: WeightVector,
    pub lambda_max: f64,
    pub iterations: usize,
    /// `max_i |(A w)_i - lambda_max w_i| / w_i` at return.
    pub residual: f64,
}

/// Power iteration on `A` (or `A^T` when `transposed`).
fn power_iteration(a: &PCMatrix, transposed: bool, cfg: &EigenSolverConfig) -> Result<(Vec<f64>, f64, usize, f64)> {
    let n = a.order();
    let entries = a.as_slice();
    let mut w = vec![1.0 / n as f64; n];
    let mut y = vec![0.0; n];
    let mut residual = f64::INFINITY;

    for iteration in 1..=cfg.max_iterations {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = if transposed {
                (0..n).map(|k| entries[k * n + i] * w[k]).sum()
            } else {
                entries[i * n..(i + 1) * n].iter().zip(&w).map(|(a, x)| a * x).sum()
            };
        }

        // y_i / w_i estimates lambda_max componentwise.
        let lambda = y.iter().zip(&w).map(|(yi, wi)| yi / wi).sum::<f64>() / n as f64;
        residual = y
            .iter()
            .zip(&w)
            .map(|(yi, wi)| (yi / wi - lambda).abs())
            .fold(0.0, f64::max);

        let total: f64 = y.iter().sum();
        let mut change: f64 = 0.0;
        for (yi, wi) in y.iter_mut().zip(&w) {
            *yi /= total;
            change = change.max((*yi - wi).abs() / *yi);
        }

        if residual <= cfg.convergence_tol * lambda && change <= cfg.convergence_tol {
            return Ok((w, lambda, iteration, residual));
        }
        std::mem::swap(&mut w, &mut y);
    }
    Err(Error::NoConvergence {
        iterations: cfg.max_iterations,
        residual,
    })
}

fn eigen(a: &PCMatrix, transposed: bool, cfg: &EigenSolverConfig) -> Result<EigenResult> {
    let (w, lambda_max, iterations, residual) = power_iteration(a, transposed, cfg)?;
    let provenance = if transposed { Provenance::Left } else { Provenance::Right };
    Ok(EigenResult {
        weights: normalize_as(&w, provenance)?,
        lambda_max,
        iterations,
        residual,
    })
}

/// Right Perron eigenvector `A w = lambda_max w`, normalized to unit sum.
pub fn right_eigenvector(a: &PCMatrix, cfg: &EigenSolverConfig) -> Result<EigenResult> {
    eigen(a, false, cfg)
}

/// Left Perron eigenvector `w A = lambda_max w`, normalized to unit sum.
pub fn left_eigenvector(a: &PCMatrix, cfg: &EigenSolverConfig) -> Result<EigenResult> {
    eigen(a, true, cfg)
}

fn invert(left: &WeightVector) -> Result<WeightVector> {
    let inv: Vec<f64> = left.as_slice().iter().map(|v| 1.0 / v).collect();
    normalize_as(&inv, Provenance::InverseLeft)
}

/// Componentwise reciprocal of the left eigenvector, renormalized.
pub fn inverse_left(a: &PCMatrix, cfg: &EigenSolverConfig) -> Result<WeightVector> {
    invert(&left_eigenvector(a, cfg)?.weights)
}

/// How the right and inverse-left vectors are combined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RlCombination {
    /// `w_i = w^R_i * w^-L_i`, renormalized.
    #[default]
    Product,
    /// `w_i = sqrt(w^R_i * w^-L_i)`, renormalized.
    GeometricMean,
}

pub fn combine_rl(right: &WeightVector, inverse_left: &WeightVector, how: RlCombination) -> Result<WeightVector> {
    if right.len() != inverse_left.len() {
        return Err(Error::DimensionMismatch {
            expected: right.len(),
            found: inverse_left.len(),
        });
    }
    let r = right.sum_one();
    let l = inverse_left.sum_one();
    let raw: Vec<f64> = r
        .iter()
        .zip(&l)
        .map(|(a, b)| match how {
            RlCombination::Product => a * b,
            RlCombination::GeometricMean => (a * b).sqrt(),
        })
        .collect();
    normalize_as(&raw, Provenance::RlCombined)
}

/// Product of the right and inverse-left vectors, renormalized.
pub fn rl_combined(a: &PCMatrix, cfg: &EigenSolverConfig) -> Result<WeightVector> {
    rl_combined_with(a, cfg, RlCombination::Product)
}

pub fn rl_combined_with(a: &PCMatrix, cfg: &EigenSolverConfig, how: RlCombination) -> Result<WeightVector> {
    let pair = EigenPair::compute(a, cfg)?;
    combine_rl(&pair.right.weights, &pair.inverse_left, how)
}

/// Row geometric mean (logarithmic least squares) priorities.
pub fn row_geometric_mean(a: &PCMatrix) -> WeightVector {
    let n = a.order();
    let raw: Vec<f64> = (0..n)
        .map(|i| (a.row(i).iter().map(|v| v.ln()).sum::<f64>() / n as f64).exp())
        .collect();
    normalize_as(&raw, Provenance::RowGeometricMean).expect("row geometric means of a positive matrix are positive")
}

/// Right and left eigenvectors of one matrix, with the eigenvalue agreement
/// checked.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub right: EigenResult,
    pub left: EigenResult,
    pub inverse_left: WeightVector,
}

/// Largest relative gap tolerated between the left and right eigenvalues.
pub const EIGENVALUE_AGREEMENT: f64 = 1e-9;

impl EigenPair {
    pub fn compute(a: &PCMatrix, cfg: &EigenSolverConfig) -> Result<Self> {
        let right = right_eigenvector(a, cfg)?;
        let left = left_eigenvector(a, cfg)?;
        if (right.lambda_max - left.lambda_max).abs() > EIGENVALUE_AGREEMENT * right.lambda_max {
            return Err(Error::EigenvalueMismatch {
                right: right.lambda_max,
                left: left.lambda_max,
            });
        }
        let inverse_left = invert(&left.weights)?;
        Ok(Self {
            right,
            left,
            inverse_left,
        })
    }

    /// Dominant eigenvalue, as reported by the right-eigenvector run.
    pub fn lambda_max(&self) -> f64 {
        self.right.lambda_max
    }
}

/// Entrywise geometric mean of several judgment matrices of equal order.
pub fn aggregate_matrices_geometric(matrices: &[PCMatrix]) -> Result<PCMatrix> {
    let first = matrices.first().ok_or(Error::EmptyList)?;
    let n = first.order();
    for m in matrices {
        if m.order() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: m.order(),
            });
        }
    }
    if matrices.len() == 1 {
        return Ok(first.clone());
    }
    let k = matrices.len() as f64;
    let mut entries = vec![1.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let mean_log = matrices.iter().map(|m| m.get(i, j).ln()).sum::<f64>() / k;
            let value = mean_log.exp();
            entries[i * n + j] = value;
            entries[j * n + i] = 1.0 / value;
        }
    }
    Ok(PCMatrix::from_entries_unchecked(n, entries))
}

/// Componentwise geometric mean of several priority vectors, renormalized.
pub fn aggregate_priorities_geometric(vectors: &[WeightVector]) -> Result<WeightVector> {
    let first = vectors.first().ok_or(Error::EmptyList)?;
    let n = first.len();
    for v in vectors {
        if v.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: v.len(),
            });
        }
    }
    let scaled: Vec<Vec<f64>> = vectors.iter().map(WeightVector::sum_one).collect();
    let k = vectors.len() as f64;
    let raw: Vec<f64> = (0..n)
        .map(|i| (scaled.iter().map(|v| v[i].ln()).sum::<f64>() / k).exp())
        .collect();
    normalize_as(&raw, Provenance::Aggregated)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{consistent_from_weights, validate, Normalization, ReciprocityPolicy};

    fn assert_close(actual: &[f64], expected: &[f64], tol: f64) {
        assert_eq!(actual.len(), expected.len());
        for (i, (a, e)) in actual.iter().zip(expected).enumerate() {
            assert!((a - e).abs() <= tol, "component {i}: {a} vs {e} (tol {tol})");
        }
    }

    fn deturck() -> PCMatrix {
        validate(
            &[
                [1.0, 8.0 / 5.0, 0.25, 4.0],
                [5.0 / 8.0, 1.0, 5.0 / 8.0, 10.0],
                [4.0, 8.0 / 5.0, 1.0, 4.0],
                [0.25, 0.1, 0.25, 1.0],
            ],
            ReciprocityPolicy::programmatic(),
        )
        .unwrap()
    }

    fn johnson() -> PCMatrix {
        validate(
            &[
                [1.0, 3.0, 1.0 / 3.0, 0.5],
                [1.0 / 3.0, 1.0, 1.0 / 6.0, 2.0],
                [3.0, 6.0, 1.0, 1.0],
                [2.0, 0.5, 1.0, 1.0],
            ],
            ReciprocityPolicy::programmatic(),
        )
        .unwrap()
    }

    #[test]
    fn right_eigenvector_of_consistent_matrix() {
        let cfg = EigenSolverConfig::default();
        let r = right_eigenvector(&consistent_from_weights(&[4.0, 2.0, 1.0]).unwrap(), &cfg).unwrap();
        assert_close(r.weights.as_slice(), &[4.0 / 7.0, 2.0 / 7.0, 1.0 / 7.0], 1e-12);
        assert!((r.lambda_max - 3.0).abs() < 1e-12);
        assert!(r.residual <= cfg.convergence_tol * r.lambda_max);
    }

    #[test]
    fn deturck_right_and_left() {
        let cfg = EigenSolverConfig::default();
        let b = deturck();
        let r = right_eigenvector(&b, &cfg).unwrap();
        assert_close(r.weights.as_slice(), &[2.0 / 9.0, 5.0 / 18.0, 4.0 / 9.0, 1.0 / 18.0], 1e-6);
        let l = left_eigenvector(&b, &cfg).unwrap();
        let total = 0.25 + 0.2 + 0.125 + 1.0;
        let expected: Vec<f64> = [0.25, 0.2, 0.125, 1.0].iter().map(|v| v / total).collect();
        for (a, e) in l.weights.as_slice().iter().zip(&expected) {
            assert!(((a - e) / e).abs() < 1e-6);
        }
        assert!(((l.lambda_max - r.lambda_max) / r.lambda_max).abs() < 1e-9);
        let inv = inverse_left(&b, &cfg).unwrap();
        assert_close(inv.as_slice(), r.weights.as_slice(), 1e-6);
    }

    #[test]
    fn johnson_vectors() {
        let cfg = EigenSolverConfig::default();
        let a = johnson();
        let r = right_eigenvector(&a, &cfg).unwrap();
        assert_close(r.weights.as_slice(), &[0.1844, 0.1519, 0.4364, 0.2273], 5e-4);
        let l = left_eigenvector(&a, &cfg).unwrap();
        assert_close(l.weights.as_slice(), &[0.2482, 0.3878, 0.1049, 0.2591], 5e-4);
        let inv = inverse_left(&a, &cfg).unwrap();
        assert_close(inv.as_slice(), &[0.2014, 0.1289, 0.4767, 0.1929], 5e-4);
        // alternative 4 above 1 by the right vector, below it by the inverse left one
        assert!(r.weights.as_slice()[3] > r.weights.as_slice()[0]);
        assert!(inv.as_slice()[0] > inv.as_slice()[3]);
    }

    #[test]
    fn ones_gives_uniform() {
        let cfg = EigenSolverConfig::default();
        let ones = PCMatrix::ones(4);
        let l = left_eigenvector(&ones, &cfg).unwrap();
        assert_close(l.weights.as_slice(), &[0.25; 4], 1e-15);
        assert_close(rl_combined(&ones, &cfg).unwrap().as_slice(), &[0.25; 4], 1e-15);
        assert_close(row_geometric_mean(&PCMatrix::ones(5)).as_slice(), &[0.2; 5], 1e-15);
    }

    #[test]
    fn rl_combined_squares_on_reciprocal_cases() {
        let cfg = EigenSolverConfig::default();
        let consistent = consistent_from_weights(&[4.0, 2.0, 1.0]).unwrap();
        let rl = rl_combined(&consistent, &cfg).unwrap();
        assert_close(rl.as_slice(), &[16.0 / 21.0, 4.0 / 21.0, 1.0 / 21.0], 1e-12);
        let sqrt = rl_combined_with(&consistent, &cfg, RlCombination::GeometricMean).unwrap();
        assert_close(sqrt.as_slice(), &[4.0 / 7.0, 2.0 / 7.0, 1.0 / 7.0], 1e-12);

        let rl = rl_combined(&deturck(), &cfg).unwrap();
        assert_close(rl.as_slice(), &[16.0 / 106.0, 25.0 / 106.0, 64.0 / 106.0, 1.0 / 106.0], 1e-6);
    }

    #[test]
    fn row_geometric_mean_matches_direct_products() {
        let a = johnson();
        // direct evaluation of the row products
        let products = [1.0 * 3.0 / 3.0 * 0.5, 1.0 / 3.0 / 6.0 * 2.0, 3.0 * 6.0, 1.0f64];
        let roots: Vec<f64> = products.iter().map(|p: &f64| p.powf(0.25)).collect();
        let total: f64 = roots.iter().sum();
        let expected: Vec<f64> = roots.iter().map(|r| r / total).collect();
        assert_close(row_geometric_mean(&a).as_slice(), &expected, 1e-14);
        let c = row_geometric_mean(&consistent_from_weights(&[4.0, 2.0, 1.0]).unwrap());
        assert_close(c.as_slice(), &[4.0 / 7.0, 2.0 / 7.0, 1.0 / 7.0], 1e-15);
    }

    #[test]
    fn no_convergence_is_reported() {
        let cfg = EigenSolverConfig::new(1, 1e-12).unwrap();
        assert!(matches!(
            right_eigenvector(&johnson(), &cfg),
            Err(Error::NoConvergence { iterations: 1, .. })
        ));
        assert!(EigenSolverConfig::new(0, 1e-12).is_err());
        assert!(EigenSolverConfig::new(10, 0.1).is_err());
    }

    #[test]
    fn aggregation_of_opposite_judgments() {
        let a = validate(
            &[
                [1.0, 1.0, 1.0, 9.0],
                [1.0, 1.0, 2.0, 5.0],
                [1.0, 0.5, 1.0, 9.0],
                [1.0 / 9.0, 0.2, 1.0 / 9.0, 1.0],
            ],
            ReciprocityPolicy::programmatic(),
        )
        .unwrap();
        let b = a.transpose();
        let agg = aggregate_matrices_geometric(&[a.clone(), b.clone()]).unwrap();
        assert_close(agg.as_slice(), &[1.0; 16], 1e-12);

        let cfg = EigenSolverConfig::default();
        let wa = right_eigenvector(&a, &cfg).unwrap().weights;
        let wb = right_eigenvector(&b, &cfg).unwrap().weights;
        assert_close(
            wa.rescaled(Normalization::SumHundred).as_slice(),
            &[32.42, 35.02, 28.21, 4.35],
            5e-3,
        );
        assert_close(
            wb.rescaled(Normalization::SumHundred).as_slice(),
            &[8.86, 9.05, 11.04, 71.05],
            5e-3,
        );
        let aip = aggregate_priorities_geometric(&[wa.clone(), wb]).unwrap();
        assert!(aip.as_slice()[1] > aip.as_slice()[0]);

        assert_eq!(aggregate_matrices_geometric(std::slice::from_ref(&a)).unwrap(), a);
        assert_close(
            aggregate_matrices_geometric(&[a.clone(), a.clone()]).unwrap().as_slice(),
            a.as_slice(),
            1e-12,
        );
        assert_close(aggregate_priorities_geometric(std::slice::from_ref(&wa)).unwrap().as_slice(), wa.as_slice(), 1e-15);
    }

    #[test]
    fn aggregation_errors() {
        assert_eq!(aggregate_matrices_geometric(&[]), Err(Error::EmptyList));
        assert_eq!(aggregate_priorities_geometric(&[]), Err(Error::EmptyList));
        let r = aggregate_matrices_geometric(&[PCMatrix::ones(3), PCMatrix::ones(4)]);
        assert!(matches!(r, Err(Error::DimensionMismatch { expected: 3, found: 4 })));
    }

    #[test]
    fn reversed_priorities_aggregate_to_uniform_when_symmetric() {
        let v = crate::matrix::normalize(&[1.0, 2.0, 3.0, 2.0, 1.0], Normalization::SumOne).unwrap();
        let rev = v.permute(&[4, 3, 2, 1, 0]);
        // v is a palindrome, so aggregating with its reversal returns v itself
        let agg = aggregate_priorities_geometric(&[v.clone(), rev]).unwrap();
        assert_close(agg.as_slice(), v.as_slice(), 1e-15);

        let u = crate::matrix::normalize(&[1.0, 2.0, 3.0, 4.0], Normalization::SumOne).unwrap();
        let agg = aggregate_priorities_geometric(&[u.clone(), u.permute(&[3, 2, 1, 0])]).unwrap();
        // the reversal pairs 1 with 4 and 2 with 3, so the result is not uniform
        assert!((agg.as_slice()[0] - 0.25).abs() > 1e-3);
        // uniform exactly when v_i * v_(n-1-i) is the same for every i
        let geometric = crate::matrix::normalize(&[1.0, 2.0, 4.0], Normalization::SumOne).unwrap();
        let agg = aggregate_priorities_geometric(&[geometric.clone(), geometric.permute(&[2, 1, 0])]).unwrap();
        assert_close(agg.as_slice(), &[1.0 / 3.0; 3], 1e-15);
        let flat = crate::matrix::normalize(&[1.0; 4], Normalization::SumOne).unwrap();
        let agg = aggregate_priorities_geometric(&[flat.clone(), flat.permute(&[3, 2, 1, 0])]).unwrap();
        assert_close(agg.as_slice(), &[0.25; 4], 1e-15);
    }
}
