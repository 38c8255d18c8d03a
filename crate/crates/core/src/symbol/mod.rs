//! Symbols on the torus: finitely supported Fourier coefficient maps with
//! Hermitian symmetry (real trigonometric polynomials), their grid-sampled
//! form, nonlinear pointwise images, and controlled quadrature for the Haar
//! integrals on the right-hand side of every limit statement.

mod functions;
mod grid;

pub use functions::ScalarFn;
pub use grid::GridSymbol;

use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::indexing::MultiIndex;

/// Required margin when certifying strict positivity on the sampling grid.
pub const DEFAULT_POSITIVITY_MARGIN: f64 = 1e-8;

/// Hard cap on total grid points for any single tensor grid.
pub const GRID_POINT_CAP: usize = 1 << 22;

/// Convergence tolerance for the grid-doubling quadrature.
pub const QUADRATURE_TOL: f64 = 1e-10;

/// A real trigonometric polynomial on T^k given by its Fourier coefficients.
///
/// The map always stores both κ and −κ with conjugate values, so every
/// constructor yields a real-valued symbol by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Symbol {
    coeffs: BTreeMap<MultiIndex, Complex64>,
}

impl Symbol {
    /// Builds a symbol from coefficient pairs, closing up under Hermitian
    /// symmetry. Listing both κ and −κ is allowed only if consistent.
    pub fn from_coefficients(pairs: Vec<(MultiIndex, Complex64)>) -> Result<Self> {
        let mut coeffs: BTreeMap<MultiIndex, Complex64> = BTreeMap::new();
        for (kappa, c) in pairs {
            if kappa.is_zero() && c.im != 0.0 {
                return Err(Error::Invalid(format!(
                    "coefficient at 0 must be real, got imaginary part {}",
                    c.im
                )));
            }
            for (key, value) in [(kappa.clone(), c), (kappa.negate(), c.conj())] {
                match coeffs.get(&key) {
                    None => {
                        coeffs.insert(key, value);
                    }
                    Some(&existing) if existing == value => {}
                    Some(&existing) => {
                        return Err(Error::Invalid(format!(
                            "conflicting coefficients at {key}: {existing} vs {value}"
                        )));
                    }
                }
            }
        }
        Ok(Symbol { coeffs })
    }

    /// Convenience constructor for real coefficient data.
    pub fn from_real_coefficients(pairs: &[(Vec<i32>, f64)]) -> Result<Self> {
        Symbol::from_coefficients(
            pairs
                .iter()
                .map(|(k, v)| (MultiIndex::new(k.clone()), Complex64::new(*v, 0.0)))
                .collect(),
        )
    }

    pub fn constant(c: f64) -> Self {
        Symbol::from_coefficients(vec![(MultiIndex::zero(), Complex64::new(c, 0.0))]).expect("constant is Hermitian")
    }

    /// Fourier coefficient at κ (zero off the support).
    pub fn coeff(&self, kappa: &MultiIndex) -> Complex64 {
        self.coeffs.get(kappa).copied().unwrap_or_default()
    }

    /// The mean ∫ φ dm = φ̂(0).
    pub fn mean(&self) -> f64 {
        self.coeff(&MultiIndex::zero()).re
    }

    pub fn support(&self) -> impl Iterator<Item = (&MultiIndex, &Complex64)> {
        self.coeffs.iter()
    }

    pub fn support_len(&self) -> usize {
        self.coeffs.len()
    }

    /// Number of torus variables the symbol actually depends on.
    pub fn variable_count(&self) -> usize {
        self.coeffs
            .iter()
            .filter(|(_, c)| **c != Complex64::default())
            .map(|(k, _)| k.dimension())
            .max()
            .unwrap_or(0)
    }

    /// Largest |κᵢ| over the support: the per-axis bandwidth.
    pub fn bandwidth(&self) -> usize {
        self.coeffs
            .iter()
            .filter(|(_, c)| **c != Complex64::default())
            .map(|(k, _)| k.max_abs() as usize)
            .max()
            .unwrap_or(0)
    }

    /// Parseval: ‖φ‖₂² = Σ |φ̂(κ)|².
    pub fn l2_norm_sq(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm_sqr()).sum()
    }

    /// Point evaluation Σ φ̂(κ) e^{iκ·θ}. Hermitian symmetry keeps the
    /// imaginary residue at rounding level; it is checked and discarded.
    pub fn evaluate(&self, point: &[f64]) -> Result<f64> {
        if point.len() < self.variable_count() {
            return Err(Error::Invalid(format!(
                "evaluation point has {} angles, symbol depends on {}",
                point.len(),
                self.variable_count()
            )));
        }
        let mut acc = Complex64::default();
        let mut scale = 0.0;
        for (kappa, c) in &self.coeffs {
            let phase: f64 = kappa
                .exponents()
                .iter()
                .zip(point)
                .map(|(&e, &theta)| e as f64 * theta)
                .sum();
            acc += c * Complex64::new(0.0, phase).exp();
            scale += c.norm();
        }
        if acc.im.abs() > 1e-10 * (1.0 + scale) {
            return Err(Error::Numerical(format!(
                "imaginary residue {} in point evaluation",
                acc.im
            )));
        }
        Ok(acc.re)
    }

    /// Samples the symbol on the uniform R^k grid. Requires the alias-free
    /// resolution R ≥ 2·bandwidth + 1.
    pub fn to_grid(&self, resolution: usize) -> Result<GridSymbol> {
        let b = self.bandwidth();
        if resolution < 2 * b + 1 {
            return Err(Error::Invalid(format!(
                "resolution {resolution} below alias-free bound {} for bandwidth {b}",
                2 * b + 1
            )));
        }
        let k = self.variable_count().max(1);
        let total = checked_grid_len(k, resolution)?;
        let mut data = vec![Complex64::default(); total];
        for (kappa, c) in &self.coeffs {
            let mut idx = 0usize;
            for axis in 0..k {
                let e = kappa.exponent(axis);
                idx = idx * resolution + e.rem_euclid(resolution as i32) as usize;
            }
            data[idx] += c;
        }
        grid::fft_all_axes(&mut data, k, resolution, &grid::plan_inverse(resolution));
        let scale: f64 = self.coeffs.values().map(|c| c.norm()).sum();
        let mut values = Vec::with_capacity(total);
        for v in data {
            if v.im.abs() > 1e-9 * (1.0 + scale) {
                return Err(Error::Numerical(format!("imaginary residue {} on grid", v.im)));
            }
            values.push(v.re);
        }
        GridSymbol::new(k, resolution, values)
    }
}

/// Discrete Fourier coefficients of a grid function, truncated to the
/// alias-free frequencies |κᵢ| ≤ ⌊(R−1)/2⌋ and symmetrized.
pub fn from_grid(g: &GridSymbol) -> Result<Symbol> {
    let r = g.resolution();
    let k = g.variable_count();
    let total = g.values().len();
    let mut data: Vec<Complex64> = g.values().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    grid::fft_all_axes(&mut data, k, r, &grid::plan_forward(r));
    let norm = total as f64;
    let half = (r - 1) / 2;
    let mut raw: BTreeMap<MultiIndex, Complex64> = BTreeMap::new();
    let mut index = vec![0usize; k];
    for (flat, value) in data.iter().enumerate() {
        // decode the row-major flat index into per-axis frequencies
        let mut rem = flat;
        for axis in (0..k).rev() {
            index[axis] = rem % r;
            rem /= r;
        }
        let mut kappa = Vec::with_capacity(k);
        let mut keep = true;
        for &i in &index {
            let freq = if i <= half { i as i32 } else { i as i32 - r as i32 };
            if freq.unsigned_abs() as usize > half {
                keep = false;
                break;
            }
            kappa.push(freq);
        }
        if keep {
            raw.insert(MultiIndex::new(kappa), value / norm);
        }
        let _ = flat;
    }
    // kill rounding asymmetry so the Hermitian invariant holds exactly
    let mut pairs = Vec::with_capacity(raw.len());
    for (kappa, c) in &raw {
        let mirror = raw.get(&kappa.negate()).copied().unwrap_or_default();
        let sym = (c + mirror.conj()) / 2.0;
        let sym = if kappa.is_zero() {
            Complex64::new(sym.re, 0.0)
        } else {
            sym
        };
        pairs.push((kappa.clone(), sym));
    }
    Symbol::from_coefficients(pairs)
}

fn checked_grid_len(k: usize, resolution: usize) -> Result<usize> {
    let total = resolution
        .checked_pow(k as u32)
        .filter(|&t| t <= GRID_POINT_CAP)
        .ok_or_else(|| Error::Capacity {
            what: format!("tensor grid {resolution}^{k}"),
            required: (resolution as u64).saturating_pow(k as u32),
            limit: GRID_POINT_CAP as u64,
        })?;
    Ok(total)
}

// ---------------------------------------------------------------------------
// Positivity certification and converged quadrature
// ---------------------------------------------------------------------------

/// Certificate that a symbol is strictly positive on an oversampled grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PositivityCert {
    pub grid_min: f64,
    pub grid_max: f64,
    pub resolution: usize,
}

/// Checks strict positivity by sampling at four times the bandwidth; trig
/// polynomials can dip between coarse samples, so the oversampling plus a
/// required margin bounds that risk.
pub fn certify_positive(s: &Symbol, margin: f64) -> Result<PositivityCert> {
    let resolution = (4 * s.bandwidth() + 1).max(8);
    let g = s.to_grid(resolution)?;
    let grid_min = g.min_value();
    if grid_min < margin {
        return Err(Error::Positivity {
            grid_min,
            required: margin,
        });
    }
    Ok(PositivityCert {
        grid_min,
        grid_max: g.max_value(),
        resolution,
    })
}

/// Result of the grid-doubling quadrature for ∫ f(φ) dm.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub resolution: usize,
    pub converged: bool,
}

/// Computes ∫ f(φ) dm by doubling the grid until the mean moves less than
/// `tol`. Nonlinear images of φ are not band-limited, so a fixed grid has no
/// exactness guarantee; the doubling check supplies the control.
///
/// `floor` clamps grid values from below before applying f; it is the
/// ε-regularization used for log integrands that vanish on null sets.
pub fn mean_converged(s: &Symbol, f: &ScalarFn, tol: f64, floor: Option<f64>) -> Result<QuadratureResult> {
    let k = s.variable_count().max(1);
    let mut resolution = ((2 * s.bandwidth() + 1).max(16)).next_power_of_two();
    let mut previous: Option<f64> = None;
    loop {
        let g = s.to_grid(resolution)?;
        let g = match floor {
            Some(eps) => g.clamp_max(eps),
            None => g,
        };
        let value = g.mean_of(f)?;
        if let Some(prev) = previous {
            if (value - prev).abs() < tol {
                return Ok(QuadratureResult {
                    value,
                    resolution,
                    converged: true,
                });
            }
        }
        previous = Some(value);
        if checked_grid_len(k, resolution * 2).is_err() {
            return Ok(QuadratureResult {
                value,
                resolution,
                converged: false,
            });
        }
        resolution *= 2;
    }
}

/// ∫ log φ dm for a positivity-certified symbol.
pub fn log_mean(s: &Symbol) -> Result<QuadratureResult> {
    mean_converged(s, &ScalarFn::Log, QUADRATURE_TOL, None)
}

// ---------------------------------------------------------------------------
// JSON representation
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct CoeffRepr {
    kappa: Vec<i32>,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct SymbolRepr {
    k: usize,
    coeffs: Vec<CoeffRepr>,
}

/// κ = 0 or the first nonzero exponent positive: the stored representative
/// of each ±κ pair.
fn is_canonical(kappa: &MultiIndex) -> bool {
    match kappa.exponents().iter().find(|&&e| e != 0) {
        None => true,
        Some(&e) => e > 0,
    }
}

impl Serialize for Symbol {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let coeffs = self
            .coeffs
            .iter()
            .filter(|(kappa, _)| is_canonical(kappa))
            .map(|(kappa, c)| CoeffRepr {
                kappa: kappa.exponents().to_vec(),
                re: c.re,
                im: c.im,
            })
            .collect();
        SymbolRepr {
            k: self.variable_count(),
            coeffs,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Symbol {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = SymbolRepr::deserialize(deserializer)?;
        let mut pairs = Vec::with_capacity(repr.coeffs.len());
        let mut seen: BTreeMap<MultiIndex, ()> = BTreeMap::new();
        for c in repr.coeffs {
            let kappa = MultiIndex::new(c.kappa);
            if seen.insert(kappa.clone(), ()).is_some() || seen.insert(kappa.negate(), ()).is_some() && !kappa.is_zero()
            {
                return Err(D::Error::custom(format!(
                    "coefficient at {kappa} (or its mirror) listed twice"
                )));
            }
            pairs.push((kappa, Complex64::new(c.re, c.im)));
        }
        let symbol = Symbol::from_coefficients(pairs).map_err(D::Error::custom)?;
        if symbol.variable_count() != repr.k {
            return Err(D::Error::custom(format!(
                "declared k={} but support spans {} variables",
                repr.k,
                symbol.variable_count()
            )));
        }
        Ok(symbol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_plus_cos() -> Symbol {
        Symbol::from_real_coefficients(&[(vec![], 2.0), (vec![1], 0.5)]).unwrap()
    }

    #[test]
    fn hermitian_closure_on_construction() {
        let s = two_plus_cos();
        assert_eq!(s.coeff(&MultiIndex::new(vec![-1])), Complex64::new(0.5, 0.0));
        assert_eq!(s.support_len(), 3);
        assert_eq!(s.variable_count(), 1);
        assert_eq!(s.bandwidth(), 1);
    }

    #[test]
    fn complex_coefficient_mirrors_conjugate() {
        let s = Symbol::from_coefficients(vec![
            (MultiIndex::zero(), Complex64::new(3.0, 0.0)),
            (MultiIndex::new(vec![1, -1]), Complex64::new(0.25, 0.5)),
        ])
        .unwrap();
        assert_eq!(s.coeff(&MultiIndex::new(vec![-1, 1])), Complex64::new(0.25, -0.5));
        // real-valued on the torus
        let v = s.evaluate(&[0.3, 1.1]).unwrap();
        let direct = 3.0 + 2.0 * (0.25 * f64::cos(0.3 - 1.1) - 0.5 * f64::sin(0.3 - 1.1));
        assert!((v - direct).abs() < 1e-12);
    }

    #[test]
    fn rejects_imaginary_mean_and_conflicts() {
        assert!(Symbol::from_coefficients(vec![(MultiIndex::zero(), Complex64::new(1.0, 0.5))]).is_err());
        assert!(Symbol::from_coefficients(vec![
            (MultiIndex::new(vec![1]), Complex64::new(1.0, 0.0)),
            (MultiIndex::new(vec![-1]), Complex64::new(0.5, 0.0)),
        ])
        .is_err());
    }

    #[test]
    fn evaluate_examples() {
        assert_eq!(Symbol::constant(5.0).evaluate(&[]).unwrap(), 5.0);
        let s = two_plus_cos();
        assert!((s.evaluate(&[0.0]).unwrap() - 3.0).abs() < 1e-12);
        assert!((s.evaluate(&[std::f64::consts::FRAC_PI_2]).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn grid_round_trip_is_identity_for_alias_free_resolution() {
        let s = two_plus_cos();
        let g = s.to_grid(8).unwrap();
        let back = from_grid(&g).unwrap();
        for (kappa, c) in s.support() {
            assert!((back.coeff(kappa) - c).norm() < 1e-12, "coefficient at {kappa}");
        }
        for (kappa, c) in back.support() {
            assert!((s.coeff(kappa) - c).norm() < 1e-12, "spurious coefficient at {kappa}");
        }
    }

    #[test]
    fn constant_grid() {
        let g = Symbol::constant(5.0).to_grid(2).unwrap();
        assert_eq!(g.values(), &[5.0, 5.0]);
    }

    #[test]
    fn to_grid_rejects_aliased_resolution() {
        assert!(two_plus_cos().to_grid(2).is_err());
        assert!(two_plus_cos().to_grid(3).is_ok());
    }

    #[test]
    fn grid_round_trip_two_variables() {
        let s = Symbol::from_coefficients(vec![
            (MultiIndex::zero(), Complex64::new(4.0, 0.0)),
            (MultiIndex::new(vec![1, 2]), Complex64::new(0.5, -0.25)),
            (MultiIndex::new(vec![0, 1]), Complex64::new(0.0, 0.75)),
        ])
        .unwrap();
        let back = from_grid(&s.to_grid(7).unwrap()).unwrap();
        for (kappa, c) in s.support() {
            assert!((back.coeff(kappa) - c).norm() < 1e-12);
        }
    }

    #[test]
    fn mean_of_examples() {
        let s = two_plus_cos();
        let g = s.to_grid(8).unwrap();
        // zero Fourier coefficient of (2+cos)² is 4 + 1/2
        assert!((g.mean_of(&ScalarFn::Power(2)).unwrap() - 4.5).abs() < 1e-12);
        assert_eq!(Symbol::constant(3.0).to_grid(4).unwrap().mean(), 3.0);
    }

    #[test]
    fn log_mean_matches_closed_form() {
        // ∫ log(a + cos θ) dm = log((a + √(a²−1))/2) for a > 1; at a = 2 the
        // value is log((2+√3)/2). Cross-checked below by raw high-resolution
        // quadrature.
        let s = two_plus_cos();
        let closed = ((2.0 + 3f64.sqrt()) / 2.0).ln();
        let q = log_mean(&s).unwrap();
        assert!(q.converged);
        assert!((q.value - closed).abs() < 1e-9, "{} vs {closed}", q.value);

        let brute = s.to_grid(1 << 16).unwrap().mean_of(&ScalarFn::Log).unwrap();
        assert!((brute - closed).abs() < 1e-11);
    }

    #[test]
    fn jensen_inequality_strict_for_nonconstant() {
        let s = two_plus_cos();
        let log_of_mean = s.mean().ln();
        let mean_of_log = log_mean(&s).unwrap().value;
        assert!(mean_of_log < log_of_mean - 1e-3);

        let c = Symbol::constant(2.5);
        assert!((log_mean(&c).unwrap().value - 2.5f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn parseval_norm() {
        assert!((two_plus_cos().l2_norm_sq() - 4.5).abs() < 1e-15);
        let g = two_plus_cos().to_grid(8).unwrap();
        assert!((g.l1_norm() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn positivity_certificate() {
        let cert = certify_positive(&two_plus_cos(), DEFAULT_POSITIVITY_MARGIN).unwrap();
        assert!(cert.grid_min >= 1.0 - 1e-12);
        assert!(cert.grid_max <= 3.0 + 1e-12);

        let dips = Symbol::from_real_coefficients(&[(vec![], 1.0), (vec![1], 0.5)]).unwrap();
        assert!(matches!(
            certify_positive(&dips, DEFAULT_POSITIVITY_MARGIN),
            Err(Error::Positivity { .. })
        ));
    }

    #[test]
    fn json_round_trip_stores_one_of_each_pair() {
        let s = Symbol::from_coefficients(vec![
            (MultiIndex::zero(), Complex64::new(2.0, 0.0)),
            (MultiIndex::new(vec![-1, 1]), Complex64::new(0.25, 0.5)),
        ])
        .unwrap();
        let json = serde_json::to_string(&s).unwrap();
        let parsed: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(parsed["coeffs"].as_array().unwrap().len(), 2);
        let back: Symbol = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn json_rejects_mirror_duplicates() {
        let bad = r#"{"k":1,"coeffs":[
            {"kappa":[0],"re":2.0,"im":0.0},
            {"kappa":[1],"re":0.5,"im":0.0},
            {"kappa":[-1],"re":0.5,"im":0.0}
        ]}"#;
        assert!(serde_json::from_str::<Symbol>(bad).is_err());
    }

    #[test]
    fn clamp_below_max_changes_grid() {
        let g = two_plus_cos().to_grid(8).unwrap();
        let clamped = g.clamp_min(2.0);
        for (&v, &w) in g.values().iter().zip(clamped.values()) {
            assert_eq!(w, v.min(2.0));
        }
    }
}
