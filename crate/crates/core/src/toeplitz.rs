//! Assembly of truncated Toeplitz matrices: additive truncations
//! {φ̂(ξⱼ−ξᵢ)} over finite frequency sets and multiplicative truncations
//! {φ̂(j/i)} over finite sets of positive integers.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::indexing::{IndexSet, MultiIndex, PrimeTable};
use crate::symbol::Symbol;

/// Default cap on truncation dimension; the O(N³) eigensolve downstream is
/// what this protects.
pub const DEFAULT_DIM_CAP: usize = 4096;

/// A dense Hermitian matrix. Entries are filled for i ≤ j and mirrored by
/// conjugation, so the invariant holds exactly by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    inner: DMatrix<Complex64>,
}

impl HermitianMatrix {
    /// Builds from an entry oracle for the upper triangle (i ≤ j). The
    /// diagonal's imaginary part must vanish.
    pub fn from_upper_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Result<Self> {
        let mut inner = DMatrix::from_element(n, n, Complex64::default());
        for i in 0..n {
            for j in i..n {
                let v = f(i, j);
                if i == j && v.im != 0.0 {
                    return Err(Error::NonHermitian { max_asymmetry: v.im.abs() });
                }
                inner[(i, j)] = v;
                inner[(j, i)] = v.conj();
            }
        }
        Ok(HermitianMatrix { inner })
    }

    /// Validates an existing dense matrix against the Hermitian invariant.
    pub fn try_new(inner: DMatrix<Complex64>, tol: f64) -> Result<Self> {
        if inner.nrows() != inner.ncols() {
            return Err(Error::Invalid("matrix must be square".into()));
        }
        let mut max_asym = 0.0f64;
        for i in 0..inner.nrows() {
            for j in i..inner.ncols() {
                max_asym = max_asym.max((inner[(i, j)] - inner[(j, i)].conj()).norm());
            }
        }
        if max_asym > tol {
            return Err(Error::NonHermitian { max_asymmetry: max_asym });
        }
        Ok(HermitianMatrix { inner })
    }

    pub fn dim(&self) -> usize {
        self.inner.nrows()
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.inner[(i, j)]
    }

    pub fn dense(&self) -> &DMatrix<Complex64> {
        &self.inner
    }

    /// Σ |entries|², the squared Hilbert–Schmidt norm.
    pub fn hs_norm_sq(&self) -> f64 {
        self.inner.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Real trace (the diagonal is real by the invariant).
    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.inner[(i, i)].re).sum()
    }

    /// Largest |entry|, a cheap scale proxy for residual tolerances.
    pub fn max_abs_entry(&self) -> f64 {
        self.inner.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// True when every entry is exactly real, which unlocks the real
    /// symmetric eigensolver path.
    pub fn is_real(&self) -> bool {
        self.inner.iter().all(|c| c.im == 0.0)
    }
}

fn check_dim(n: usize, cap: usize) -> Result<()> {
    if n > cap {
        Err(Error::Capacity {
            what: format!("{n}×{n} truncation"),
            required: n as u64,
            limit: cap as u64,
        })
    } else {
        Ok(())
    }
}

/// T_σφ = {φ̂(ξⱼ − ξᵢ)} for an additive index set.
pub fn assemble_additive(s: &Symbol, sigma: &IndexSet, dim_cap: usize) -> Result<HermitianMatrix> {
    let IndexSet::Additive(labels) = sigma else {
        return Err(Error::Invalid("assemble_additive needs an additive index set".into()));
    };
    check_dim(labels.len(), dim_cap)?;
    HermitianMatrix::from_upper_fn(labels.len(), |i, j| s.coeff(&labels[j].sub(&labels[i])))
}

/// T_σφ = {φ̂(j/i)} for a multiplicative index set, using the prime table to
/// map ratios to exponent vectors.
pub fn assemble_multiplicative(
    s: &Symbol,
    sigma: &IndexSet,
    table: &PrimeTable,
    dim_cap: usize,
) -> Result<HermitianMatrix> {
    let IndexSet::Multiplicative(labels) = sigma else {
        return Err(Error::Invalid(
            "assemble_multiplicative needs a multiplicative index set".into(),
        ));
    };
    check_dim(labels.len(), dim_cap)?;
    let alphas: Vec<MultiIndex> = labels
        .iter()
        .map(|&n| table.factorize(n))
        .collect::<Result<_>>()?;
    HermitianMatrix::from_upper_fn(labels.len(), |i, j| s.coeff(&alphas[j].sub(&alphas[i])))
}

/// Mode dispatch over the two assembly routes.
pub fn assemble(s: &Symbol, sigma: &IndexSet, table: &PrimeTable, dim_cap: usize) -> Result<HermitianMatrix> {
    match sigma {
        IndexSet::Additive(_) => assemble_additive(s, sigma, dim_cap),
        IndexSet::Multiplicative(_) => assemble_multiplicative(s, sigma, table, dim_cap),
    }
}

/// (1/N)·‖T‖²_HS, the normalized Hilbert–Schmidt square bounded by ‖φ‖₂².
pub fn normalized_hs_sq(m: &HermitianMatrix) -> f64 {
    m.hs_norm_sq() / m.dim() as f64
}

/// Entry dump as `row,col,re,im` CSV lines for cross-language oracle checks.
pub fn matrix_csv(m: &HermitianMatrix) -> String {
    let mut out = String::from("row,col,re,im\r\n");
    for i in 0..m.dim() {
        for j in 0..m.dim() {
            let e = m.entry(i, j);
            out.push_str(&format!("{i},{j},{},{}\r\n", e.re, e.im));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::indexing::{folner_box, multiplicative_folner};
    use proptest::prelude::*;

    fn two_plus_cos() -> Symbol {
        Symbol::from_real_coefficients(&[(vec![], 2.0), (vec![1], 0.5)]).unwrap()
    }

    fn table() -> PrimeTable {
        PrimeTable::new(10_000)
    }

    #[test]
    fn additive_tridiagonal_example() {
        let sigma = IndexSet::additive(vec![
            MultiIndex::zero(),
            MultiIndex::new(vec![1]),
            MultiIndex::new(vec![2]),
        ]);
        let m = assemble_additive(&two_plus_cos(), &sigma, DEFAULT_DIM_CAP).unwrap();
        for i in 0..3 {
            assert_eq!(m.entry(i, i), Complex64::new(2.0, 0.0));
        }
        assert_eq!(m.entry(0, 1), Complex64::new(0.5, 0.0));
        assert_eq!(m.entry(1, 0), Complex64::new(0.5, 0.0));
        assert_eq!(m.entry(0, 2), Complex64::default());
    }

    #[test]
    fn constant_symbol_gives_identity_times_c() {
        let sigma = IndexSet::natural(5);
        let m = assemble_multiplicative(&Symbol::constant(3.0), &sigma, &table(), DEFAULT_DIM_CAP).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                let want = if i == j { 3.0 } else { 0.0 };
                assert_eq!(m.entry(i, j), Complex64::new(want, 0.0));
            }
        }
        assert_eq!(m.hs_norm_sq(), 5.0 * 9.0);
    }

    #[test]
    fn multiplicative_example_n3() {
        let sigma = IndexSet::natural(3);
        let m = assemble_multiplicative(&two_plus_cos(), &sigma, &table(), DEFAULT_DIM_CAP).unwrap();
        let want = [
            [2.0, 0.5, 0.0],
            [0.5, 2.0, 0.0],
            [0.0, 0.0, 2.0],
        ];
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(m.entry(i, j).re, want[i][j], "({i},{j})");
                assert_eq!(m.entry(i, j).im, 0.0);
            }
        }
        assert_eq!(m.hs_norm_sq(), 12.5);
    }

    #[test]
    fn embedding_powers_of_two_match_additive_box() {
        let s = two_plus_cos();
        let t = table();
        let l = 6usize;
        let mult = multiplicative_folner(1, l - 1, &t).unwrap();
        let mm = assemble_multiplicative(&s, &mult, &t, DEFAULT_DIM_CAP).unwrap();
        let add = folner_box(1, l, DEFAULT_DIM_CAP).unwrap();
        let ma = assemble_additive(&s, &add, DEFAULT_DIM_CAP).unwrap();
        assert_eq!(mm.dim(), ma.dim());
        for i in 0..mm.dim() {
            for j in 0..mm.dim() {
                assert_eq!(mm.entry(i, j), ma.entry(i, j));
            }
        }
    }

    #[test]
    fn dimension_cap_enforced() {
        let sigma = IndexSet::natural(100);
        assert!(matches!(
            assemble_multiplicative(&two_plus_cos(), &sigma, &table(), 64),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn hermitian_invariant_with_complex_coefficients() {
        let s = Symbol::from_coefficients(vec![
            (MultiIndex::zero(), Complex64::new(2.0, 0.0)),
            (MultiIndex::new(vec![1]), Complex64::new(0.25, 0.4)),
        ])
        .unwrap();
        let sigma = IndexSet::natural(8);
        let m = assemble_multiplicative(&s, &sigma, &table(), DEFAULT_DIM_CAP).unwrap();
        assert!(HermitianMatrix::try_new(m.dense().clone(), 0.0).is_ok());
        assert!(!m.is_real());
        assert!(two_plus_cos_matrix_is_real());
    }

    fn two_plus_cos_matrix_is_real() -> bool {
        let sigma = IndexSet::natural(8);
        assemble_multiplicative(&two_plus_cos(), &sigma, &table(), DEFAULT_DIM_CAP)
            .unwrap()
            .is_real()
    }

    #[test]
    fn try_new_rejects_asymmetry() {
        let mut raw = DMatrix::from_element(2, 2, Complex64::default());
        raw[(0, 1)] = Complex64::new(1.0, 0.0);
        raw[(1, 0)] = Complex64::new(0.5, 0.0);
        assert!(matches!(
            HermitianMatrix::try_new(raw, 1e-12),
            Err(Error::NonHermitian { .. })
        ));
    }

    #[test]
    fn hs_bound_for_natural_truncations() {
        let s = two_plus_cos();
        let t = table();
        for n in [8u64, 32, 128] {
            let m = assemble_multiplicative(&s, &IndexSet::natural(n), &t, DEFAULT_DIM_CAP).unwrap();
            assert!(normalized_hs_sq(&m) <= s.l2_norm_sq() + 1e-12, "N={n}");
        }
    }

    proptest! {
        /// The multiplicative-Toeplitz law: equal ratios give equal entries.
        #[test]
        fn multiplicative_consistency(seed_labels in proptest::collection::btree_set(1u64..400, 3..12)) {
            let labels: Vec<u64> = seed_labels.into_iter().collect();
            let sigma = IndexSet::multiplicative(labels.clone()).unwrap();
            let t = PrimeTable::new(10_000);
            let s = Symbol::from_coefficients(vec![
                (MultiIndex::zero(), Complex64::new(2.0, 0.0)),
                (MultiIndex::new(vec![1]), Complex64::new(0.5, 0.1)),
                (MultiIndex::new(vec![-1, 1]), Complex64::new(0.25, -0.3)),
            ]).unwrap();
            let m = assemble_multiplicative(&s, &sigma, &t, DEFAULT_DIM_CAP).unwrap();
            for (i, &a) in labels.iter().enumerate() {
                for (j, &b) in labels.iter().enumerate() {
                    for (l, &c) in labels.iter().enumerate() {
                        for (k, &d) in labels.iter().enumerate() {
                            // b/a = d/c  ⇔  b·c = a·d
                            if b * c == a * d {
                                prop_assert_eq!(m.entry(i, j), m.entry(l, k));
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn csv_dump_shape() {
        let m = assemble_multiplicative(&two_plus_cos(), &IndexSet::natural(2), &table(), 16).unwrap();
        let csv = matrix_csv(&m);
        let lines: Vec<&str> = csv.trim_end().split("\r\n").collect();
        assert_eq!(lines[0], "row,col,re,im");
        assert_eq!(lines.len(), 1 + 4);
        assert_eq!(lines[2], "0,1,0.5,0");
    }
}
