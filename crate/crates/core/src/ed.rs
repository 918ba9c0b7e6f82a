//! Dense diagonalization of the chain in the full product basis.
//!
//! The chain Hamiltonian acts on (C^m)^{tensor N} as
//!
//! ```text
//! H = sum_{i<j} 2 h_ij (1 - eps S_ij),
//! ```
//!
//! with `S_ij` the operator swapping the spin values at sites `i` and `j` and
//! `h_ij` the geometric couplings.  Basis states are base-m digit strings
//! `|s_1,...,s_N>`, indexed by `sum_i s_i m^(i-1)`.  This module builds the
//! dense symmetric matrix, diagonalizes it with the shared tridiagonal
//! solver, and compares the eigenvalue multiset against a motif spectrum
//! table — the two routes to the spectrum share no code, so agreement checks
//! both.

use num_traits::ToPrimitive;

use crate::error::{FiError, Result};
use crate::geometry::ChainGeometry;
use crate::linalg::{symmetric_eigenvalues, SymMatrix};
use crate::motif::{Epsilon, SpectrumTable};

/// Default Hilbert-space dimension cap for the dense build.
pub const DEFAULT_DIM_CAP: usize = 4096;

/// `m^N` as a checked dimension.
pub fn basis_dim(n: usize, m: usize) -> Option<usize> {
    m.checked_pow(u32::try_from(n).ok()?)
}

fn digit(state: usize, site: usize, stride: &[usize], m: usize) -> usize {
    state / stride[site] % m
}

fn with_swapped_digits(state: usize, i: usize, j: usize, stride: &[usize], m: usize) -> usize {
    let (si, sj) = (digit(state, i, stride, m), digit(state, j, stride, m));
    state + si * stride[j] + sj * stride[i] - si * stride[i] - sj * stride[j]
}

/// Dense chain Hamiltonian on the product basis, default cap.
pub fn build_hamiltonian(geom: &ChainGeometry, m: usize, epsilon: Epsilon) -> Result<SymMatrix> {
    build_hamiltonian_capped(geom, m, epsilon, DEFAULT_DIM_CAP)
}

pub fn build_hamiltonian_capped(
    geom: &ChainGeometry,
    m: usize,
    epsilon: Epsilon,
    max_dim: usize,
) -> Result<SymMatrix> {
    if m == 0 {
        return Err(FiError::domain("spin-value count m must be at least 1"));
    }
    let n = geom.spec().n();
    let dim = basis_dim(n, m)
        .filter(|&d| d <= max_dim)
        .ok_or_else(|| FiError::resource(format!("m^N = {m}^{n} exceeds the dense cap {max_dim}")))?;
    let stride: Vec<usize> = (0..n).map(|site| m.pow(site as u32)).collect();
    let eps = epsilon.sign() as f64;
    let mut h = SymMatrix::zeros(dim);
    for state in 0..dim {
        for i in 0..n {
            for j in (i + 1)..n {
                let coupling = 2.0 * geom.coupling(i, j);
                if digit(state, i, &stride, m) == digit(state, j, &stride, m) {
                    *h.at_mut(state, state) += coupling * (1.0 - eps);
                } else {
                    *h.at_mut(state, state) += coupling;
                    let partner = with_swapped_digits(state, i, j, &stride, m);
                    if state < partner {
                        *h.at_mut(state, partner) -= eps * coupling;
                        *h.at_mut(partner, state) -= eps * coupling;
                    }
                }
            }
        }
    }
    Ok(h)
}

/// Ascending eigenvalues of a chain Hamiltonian.
pub fn chain_eigenvalues(h: SymMatrix) -> Result<Vec<f64>> {
    symmetric_eigenvalues(h)
}

/// Outcome of matching diagonalized eigenvalues to a motif table.
#[derive(Debug, Clone)]
pub struct EdComparison {
    pub dim: usize,
    pub max_abs_err: f64,
    pub tol: f64,
    pub passed: bool,
}

/// Tolerance used for the eigenvalue match: relative to the spectral span.
pub fn ed_tolerance(e_max_abs: f64) -> f64 {
    1e-7 * e_max_abs.max(1.0)
}

/// Greedy sorted-multiset match of eigenvalues against table levels.
/// A count mismatch is a hard error; a value mismatch is reported.
pub fn verify_against_motifs(
    table: &SpectrumTable,
    eigs: &[f64],
    tol: f64,
) -> Result<EdComparison> {
    let mut expected = Vec::with_capacity(eigs.len());
    for level in table.levels() {
        let value = level.value.to_f64().ok_or_else(|| {
            FiError::verification("table energy does not fit in an f64")
        })?;
        let mult = level.degeneracy.to_usize().ok_or_else(|| {
            FiError::resource("level degeneracy exceeds the dense dimension range")
        })?;
        expected.extend(std::iter::repeat(value).take(mult));
    }
    if expected.len() != eigs.len() {
        return Err(FiError::verification(format!(
            "table holds {} states but the matrix has {}",
            expected.len(),
            eigs.len()
        )));
    }
    // Both lists ascending: table iteration is sorted, eigenvalues come
    // sorted from the solver.
    let mut max_abs_err = 0.0f64;
    for (e, x) in expected.iter().zip(eigs.iter()) {
        max_abs_err = max_abs_err.max((e - x).abs());
    }
    Ok(EdComparison { dim: eigs.len(), max_abs_err, tol, passed: max_abs_err <= tol })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_geometry, LatticeSpec};
    use crate::motif::spectrum;
    use crate::rational::Rational;
    use num_bigint::BigInt;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn rat(v: i64) -> Rational {
        Rational::from_integer(BigInt::from(v))
    }

    fn chain(n: usize, beta: i64) -> ChainGeometry {
        build_geometry(&LatticeSpec::new(n, rat(beta)).unwrap()).unwrap()
    }

    #[test]
    fn two_site_eigenvalues_split_by_exchange_symmetry() {
        // N = 2, beta = 6 has h_12 = 1.  Antiferro: singlet 0, triplet 4;
        // ferro: the reflected multiplicities.
        let geom = chain(2, 6);
        let h = build_hamiltonian(&geom, 2, Epsilon::Antiferro).unwrap();
        let eigs = chain_eigenvalues(h).unwrap();
        let expect = [0.0, 4.0, 4.0, 4.0];
        for (e, x) in eigs.iter().zip(expect) {
            assert!((e - x).abs() < 1e-9, "got {eigs:?}");
        }
        let h = build_hamiltonian(&geom, 2, Epsilon::Ferro).unwrap();
        let eigs = chain_eigenvalues(h).unwrap();
        let expect = [0.0, 0.0, 0.0, 4.0];
        for (e, x) in eigs.iter().zip(expect) {
            assert!((e - x).abs() < 1e-9, "got {eigs:?}");
        }
    }

    #[test]
    fn single_site_matrix_is_zero() {
        let geom = chain(1, 5);
        let h = build_hamiltonian(&geom, 3, Epsilon::Antiferro).unwrap();
        assert_eq!(h.n, 3);
        assert_eq!(h.max_abs(), 0.0);
    }

    #[test]
    fn dimension_cap_is_enforced() {
        let geom = chain(4, 10);
        let err = build_hamiltonian_capped(&geom, 2, Epsilon::Antiferro, 8).unwrap_err();
        assert!(matches!(err, FiError::Resource(_)));
    }

    #[test]
    fn trace_matches_the_closed_form_mean() {
        // trace H = m^N mu with mu = (1 - eps/m) sum_{i != j} h_ij.
        for (n, m, beta) in [(3usize, 2usize, 8i64), (4, 2, 10), (3, 3, 9)] {
            let geom = chain(n, beta);
            for eps in [Epsilon::Ferro, Epsilon::Antiferro] {
                let h = build_hamiltonian(&geom, m, eps).unwrap();
                let mut trace = 0.0;
                for k in 0..h.n {
                    trace += h.at(k, k);
                }
                let mu = (1.0 - eps.sign() as f64 / m as f64) * geom.coupling_sum();
                let expect = (m as f64).powi(n as i32) * mu;
                assert!(
                    (trace - expect).abs() <= 1e-8 * expect.abs().max(1.0),
                    "trace {trace} vs {expect} at N={n}, m={m}, eps={eps:?}"
                );
            }
        }
    }

    #[test]
    fn hamiltonian_commutes_with_value_relabeling() {
        // Swapping two spin VALUES everywhere permutes basis states without
        // changing matrix elements.
        let mut rng = StdRng::seed_from_u64(23);
        for (n, m) in [(4usize, 2usize), (3, 3)] {
            let geom = chain(n, 3 * n as i64);
            let dim = basis_dim(n, m).unwrap();
            let stride: Vec<usize> = (0..n).map(|s| m.pow(s as u32)).collect();
            for eps in [Epsilon::Ferro, Epsilon::Antiferro] {
                let h = build_hamiltonian(&geom, m, eps).unwrap();
                let a = rng.gen_range(0..m);
                let b = (a + 1 + rng.gen_range(0..m - 1)) % m;
                let relabel = |state: usize| -> usize {
                    let mut out = 0;
                    for site in 0..n {
                        let d = digit(state, site, &stride, m);
                        let d = if d == a { b } else if d == b { a } else { d };
                        out += d * stride[site];
                    }
                    out
                };
                let mut worst = 0.0f64;
                for x in 0..dim {
                    for y in 0..dim {
                        worst = worst.max((h.at(relabel(x), relabel(y)) - h.at(x, y)).abs());
                    }
                }
                assert!(worst <= 1e-10, "relabeling asymmetry {worst}");
            }
        }
    }

    #[test]
    fn eigenvalues_match_the_motif_table() {
        for (n, m, beta) in [(2usize, 2usize, 6i64), (4, 2, 10), (3, 3, 8)] {
            let geom = chain(n, beta);
            for eps in [Epsilon::Ferro, Epsilon::Antiferro] {
                let table = spectrum(n, m, eps, &rat(beta)).unwrap();
                let h = build_hamiltonian(&geom, m, eps).unwrap();
                let eigs = chain_eigenvalues(h).unwrap();
                let e_max = table.max_level().unwrap().value.to_f64().unwrap();
                let cmp = verify_against_motifs(&table, &eigs, ed_tolerance(e_max)).unwrap();
                assert!(
                    cmp.passed,
                    "mismatch {:.3e} at N={n}, m={m}, eps={eps:?}",
                    cmp.max_abs_err
                );
            }
        }
    }

    #[test]
    fn wrong_beta_is_reported_not_fatal() {
        let geom = chain(4, 10);
        let h = build_hamiltonian(&geom, 2, Epsilon::Antiferro).unwrap();
        let eigs = chain_eigenvalues(h).unwrap();
        let table = spectrum(4, 2, Epsilon::Antiferro, &rat(11)).unwrap();
        let cmp = verify_against_motifs(&table, &eigs, 1e-7).unwrap();
        assert!(!cmp.passed);
        assert!(cmp.max_abs_err > 0.5);
    }

    #[test]
    fn state_count_mismatch_is_a_hard_error() {
        let geom = chain(2, 6);
        let h = build_hamiltonian(&geom, 2, Epsilon::Antiferro).unwrap();
        let eigs = chain_eigenvalues(h).unwrap();
        let table = spectrum(3, 2, Epsilon::Antiferro, &rat(8)).unwrap();
        assert!(verify_against_motifs(&table, &eigs, 1e-7).is_err());
    }
}
