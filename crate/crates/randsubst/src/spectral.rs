//! Perron–Frobenius data of the substitution matrix, plus exact length vectors.
//!
//! Power iteration is entirely adequate here: substitution matrices are tiny
//! primitive integer matrices, so the dominant eigenvalue is simple and the
//! iteration contracts geometrically. Everything is deterministic — the
//! starting vector is uniform and no randomisation is involved.

use crate::error::{Error, Result};
use crate::substitution::SubstitutionMatrix;

/// Default convergence tolerance for the eigenvector iteration.
pub const DEFAULT_TOLERANCE: f64 = 1e-12;

const MAX_ITERATIONS: u64 = 1_000_000;

/// Dominant eigenvalue with its right and left eigenvectors.
///
/// Normalisation: `right` sums to 1 (statistical normalisation), and `left`
/// is rescaled so that `left · right = 1`.
#[derive(Debug, Clone)]
pub struct PerronData {
    pub lambda: f64,
    pub right: Vec<f64>,
    pub left: Vec<f64>,
    /// Max-norm residual of the two eigen-equations at the returned vectors.
    pub residual: f64,
    /// Total iterations spent across the right and left runs.
    pub iterations: u64,
    pub tolerance: f64,
}

fn apply(matrix: &SubstitutionMatrix, v: &[f64], transpose: bool) -> Vec<f64> {
    let n = matrix.size();
    let mut out = vec![0.0; n];
    for i in 0..n {
        let mut acc = 0.0;
        for j in 0..n {
            let m = if transpose {
                matrix.entry(j, i)
            } else {
                matrix.entry(i, j)
            };
            acc += m as f64 * v[j];
        }
        out[i] = acc;
    }
    out
}

/// Iterate `v <- Mv / |Mv|_1` from the uniform vector until successive
/// iterates agree to `tol` in the max norm.
fn power_iterate(
    matrix: &SubstitutionMatrix,
    transpose: bool,
    tol: f64,
) -> Result<(Vec<f64>, u64)> {
    let n = matrix.size();
    let mut v = vec![1.0 / n as f64; n];
    for k in 1..=MAX_ITERATIONS {
        let w = apply(matrix, &v, transpose);
        let sum: f64 = w.iter().sum();
        let w: Vec<f64> = w.iter().map(|x| x / sum).collect();
        let diff = w
            .iter()
            .zip(&v)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        v = w;
        if diff < tol {
            return Ok((v, k));
        }
    }
    Err(Error::NoConvergence {
        iterations: MAX_ITERATIONS,
        tolerance: tol,
    })
}

/// Compute the Perron–Frobenius data of a primitive matrix.
///
/// Errors on non-primitive input, on a dominant eigenvalue at or below 1
/// (the entropy bound denominators vanish there), and on the iteration cap.
pub fn perron_data(matrix: &SubstitutionMatrix, tol: f64) -> Result<PerronData> {
    if !matrix.is_primitive() {
        return Err(Error::NotPrimitive);
    }

    let (right, right_iters) = power_iterate(matrix, false, tol)?;
    // Rayleigh-style quotient: with |right|_1 = 1 this is just 1ᵀ M right.
    let lambda: f64 = apply(matrix, &right, false).iter().sum();
    if lambda <= 1.0 + 1e-9 {
        return Err(Error::DegenerateInflation { lambda });
    }

    let (left_raw, left_iters) = power_iterate(matrix, true, tol)?;
    let dot: f64 = left_raw.iter().zip(&right).map(|(l, r)| l * r).sum();
    let left: Vec<f64> = left_raw.iter().map(|l| l / dot).collect();

    let res_right = apply(matrix, &right, false)
        .iter()
        .zip(&right)
        .map(|(mv, v)| (mv - lambda * v).abs())
        .fold(0.0, f64::max);
    let res_left = apply(matrix, &left, true)
        .iter()
        .zip(&left)
        .map(|(mv, v)| (mv - lambda * v).abs())
        .fold(0.0, f64::max);

    Ok(PerronData {
        lambda,
        right,
        left,
        residual: res_right.max(res_left),
        iterations: right_iters + left_iters,
        tolerance: tol,
    })
}

/// Exact image lengths per letter at `level`: the row vector 1ᵀ Mᵐ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LengthVector {
    pub level: u32,
    pub entries: Vec<u64>,
}

/// Compute 1ᵀ Mᵐ with checked 64-bit arithmetic; overflow is an error rather
/// than a silently wrong length.
pub fn length_vector(matrix: &SubstitutionMatrix, level: u32) -> Result<LengthVector> {
    if level == 0 {
        return Err(Error::LevelZero);
    }
    let n = matrix.size();
    let mut row = vec![1u64; n];
    for step in 1..=level {
        let mut next = vec![0u64; n];
        for j in 0..n {
            let mut acc: u64 = 0;
            for i in 0..n {
                let term = row[i]
                    .checked_mul(matrix.entry(i, j))
                    .ok_or(Error::LengthOverflow { level: step })?;
                acc = acc
                    .checked_add(term)
                    .ok_or(Error::LengthOverflow { level: step })?;
            }
            next[j] = acc;
        }
        row = next;
    }
    Ok(LengthVector {
        level,
        entries: row,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::substitution::RandomSubstitution;

    fn matrix_of(text: &str) -> SubstitutionMatrix {
        RandomSubstitution::parse(text).unwrap().matrix().unwrap()
    }

    #[test]
    fn fibonacci_eigendata() {
        let m = matrix_of("alphabet = a b\na -> ab | ba\nb -> a\n");
        let p = perron_data(&m, DEFAULT_TOLERANCE).unwrap();
        let tau = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((p.lambda - tau).abs() < 1e-10);
        assert!((p.right[0] - tau / (1.0 + tau)).abs() < 1e-10);
        assert!((p.right[1] - 1.0 / (1.0 + tau)).abs() < 1e-10);
        let dot: f64 = p.left.iter().zip(&p.right).map(|(l, r)| l * r).sum();
        assert!((dot - 1.0).abs() < 1e-12);
        assert!(p.residual < 1e-10);
    }

    #[test]
    fn constant_length_left_vector_is_all_ones() {
        let m = matrix_of("alphabet = a b\na -> ab | ba\nb -> ba\n");
        let p = perron_data(&m, DEFAULT_TOLERANCE).unwrap();
        assert!((p.lambda - 2.0).abs() < 1e-12);
        for l in &p.left {
            assert!((l - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn non_primitive_matrix_is_rejected() {
        let m = matrix_of("alphabet = a b\na -> b\nb -> a\n");
        assert!(matches!(
            perron_data(&m, DEFAULT_TOLERANCE),
            Err(Error::NotPrimitive)
        ));
    }

    #[test]
    fn trivial_single_letter_substitution_is_degenerate() {
        let m = matrix_of("alphabet = a\na -> a\n");
        assert!(matches!(
            perron_data(&m, DEFAULT_TOLERANCE),
            Err(Error::DegenerateInflation { .. })
        ));
    }

    #[test]
    fn length_vectors_of_fibonacci() {
        let m = matrix_of("alphabet = a b\na -> ab | ba\nb -> a\n");
        assert_eq!(length_vector(&m, 1).unwrap().entries, vec![2, 1]);
        assert_eq!(length_vector(&m, 2).unwrap().entries, vec![3, 2]);
        assert_eq!(length_vector(&m, 5).unwrap().entries, vec![13, 8]);
        assert!(matches!(length_vector(&m, 0), Err(Error::LevelZero)));
    }

    #[test]
    fn length_vector_overflow_is_detected() {
        let m = matrix_of("alphabet = a\na -> aaaaaaaa\n"); // lengths are 8^m
        let err = length_vector(&m, 30).unwrap_err();
        assert!(matches!(err, Error::LengthOverflow { .. }));
    }
}
