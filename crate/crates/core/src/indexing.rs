//! Prime and lattice infrastructure: factorization through a smallest-prime-factor
//! sieve, the exponent-vector picture of positive rationals, smooth/coprime index
//! sets, lattice point counts and the Følner families used by the truncation
//! experiments.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;

use crate::error::{Error, Result};

/// Default sieve limit for [`PrimeTable::new`] callers that take the library default.
pub const DEFAULT_SIEVE_LIMIT: usize = 2_000_000;

/// Default cap on lattice enumeration size.
pub const DEFAULT_LATTICE_CAP: u64 = 100_000_000;

// ---------------------------------------------------------------------------
// MultiIndex
// ---------------------------------------------------------------------------

/// A finitely supported integer exponent vector.
///
/// Doubles as a frequency label on the infinite torus and, through prime
/// exponents, as a label for a positive rational. Canonical form: the stored
/// sequence never ends with a zero, so structural equality is semantic
/// equality and the value can serve as a map key.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct MultiIndex {
    exponents: Vec<i32>,
}

impl MultiIndex {
    /// Builds a multi-index, stripping trailing zeros.
    pub fn new(mut exponents: Vec<i32>) -> Self {
        while exponents.last() == Some(&0) {
            exponents.pop();
        }
        MultiIndex { exponents }
    }

    /// The identity element (empty exponent vector).
    pub fn zero() -> Self {
        MultiIndex::default()
    }

    pub fn is_zero(&self) -> bool {
        self.exponents.is_empty()
    }

    /// Number of stored entries; the last stored entry is nonzero.
    pub fn dimension(&self) -> usize {
        self.exponents.len()
    }

    /// Exponent at `pos` (0-based), zero beyond the stored prefix.
    pub fn exponent(&self, pos: usize) -> i32 {
        self.exponents.get(pos).copied().unwrap_or(0)
    }

    pub fn exponents(&self) -> &[i32] {
        &self.exponents
    }

    pub fn is_nonnegative(&self) -> bool {
        self.exponents.iter().all(|&e| e >= 0)
    }

    /// Largest absolute exponent, i.e. the per-axis bandwidth of the label.
    pub fn max_abs(&self) -> i32 {
        self.exponents.iter().map(|e| e.abs()).max().unwrap_or(0)
    }

    pub fn negate(&self) -> Self {
        MultiIndex::new(self.exponents.iter().map(|e| -e).collect())
    }

    pub fn add(&self, other: &MultiIndex) -> Self {
        let n = self.dimension().max(other.dimension());
        MultiIndex::new((0..n).map(|i| self.exponent(i) + other.exponent(i)).collect())
    }

    pub fn sub(&self, other: &MultiIndex) -> Self {
        let n = self.dimension().max(other.dimension());
        MultiIndex::new((0..n).map(|i| self.exponent(i) - other.exponent(i)).collect())
    }
}

impl Ord for MultiIndex {
    /// Lexicographic order with implied trailing zeros.
    fn cmp(&self, other: &Self) -> Ordering {
        let n = self.dimension().max(other.dimension());
        for i in 0..n {
            match self.exponent(i).cmp(&other.exponent(i)) {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
        Ordering::Equal
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.exponents.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

impl From<&[i32]> for MultiIndex {
    fn from(s: &[i32]) -> Self {
        MultiIndex::new(s.to_vec())
    }
}

// ---------------------------------------------------------------------------
// PrimeTable
// ---------------------------------------------------------------------------

/// Smallest-prime-factor sieve with the ascending prime list.
///
/// Built once, shared read-only; factorization of any `n ≤ limit` is then a
/// walk down the stored factor indices.
pub struct PrimeTable {
    limit: u64,
    /// `spf_index[n]` = index into `primes` of the smallest prime factor of n (n ≥ 2).
    spf_index: Vec<u32>,
    primes: Vec<u64>,
}

impl PrimeTable {
    /// Linear sieve up to `limit` inclusive.
    pub fn new(limit: usize) -> Self {
        assert!(limit >= 2, "sieve limit must be at least 2");
        let mut spf_index = vec![u32::MAX; limit + 1];
        let mut primes: Vec<u64> = Vec::new();
        for n in 2..=limit {
            if spf_index[n] == u32::MAX {
                spf_index[n] = primes.len() as u32;
                primes.push(n as u64);
            }
            let spf_i = spf_index[n] as usize;
            for (i, &p) in primes.iter().enumerate().take(spf_i + 1) {
                let m = n * p as usize;
                if m > limit {
                    break;
                }
                spf_index[m] = i as u32;
            }
        }
        PrimeTable {
            limit: limit as u64,
            spf_index,
            primes,
        }
    }

    pub fn with_default_limit() -> Self {
        PrimeTable::new(DEFAULT_SIEVE_LIMIT)
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    /// Smallest prime factor of `n` (2 ≤ n ≤ limit).
    pub fn smallest_prime_factor(&self, n: u64) -> Result<u64> {
        self.check_capacity(n)?;
        if n < 2 {
            return Err(Error::Invalid(format!("no prime factor of {n}")));
        }
        Ok(self.primes[self.spf_index[n as usize] as usize])
    }

    fn check_capacity(&self, n: u64) -> Result<()> {
        if n > self.limit {
            Err(Error::Capacity {
                what: format!("factorization of {n}"),
                required: n,
                limit: self.limit,
            })
        } else {
            Ok(())
        }
    }

    /// Prime exponent vector of `n ≥ 1`; `factorize(1)` is the empty index.
    pub fn factorize(&self, n: u64) -> Result<MultiIndex> {
        self.check_capacity(n)?;
        if n == 0 {
            return Err(Error::Invalid("cannot factorize 0".into()));
        }
        let mut exps: Vec<i32> = Vec::new();
        let mut m = n as usize;
        while m > 1 {
            let idx = self.spf_index[m] as usize;
            if exps.len() <= idx {
                exps.resize(idx + 1, 0);
            }
            exps[idx] += 1;
            m /= self.primes[idx] as usize;
        }
        Ok(MultiIndex::new(exps))
    }

    /// Exponent vector of the rational `j/i`, i.e. `α(j) − α(i)`.
    pub fn ratio_index(&self, j: u64, i: u64) -> Result<MultiIndex> {
        Ok(self.factorize(j)?.sub(&self.factorize(i)?))
    }

    /// Evaluates `∏ pᵢ^{κᵢ}` for a nonnegative index, the inverse of `factorize`.
    pub fn compose(&self, kappa: &MultiIndex) -> Result<u64> {
        if !kappa.is_nonnegative() {
            return Err(Error::Invalid(format!("compose of negative index {kappa}")));
        }
        if kappa.dimension() > self.primes.len() {
            return Err(Error::Capacity {
                what: format!("prime #{} needed by {kappa}", kappa.dimension()),
                required: kappa.dimension() as u64,
                limit: self.primes.len() as u64,
            });
        }
        let mut value: u64 = 1;
        for (i, &e) in kappa.exponents().iter().enumerate() {
            for _ in 0..e {
                value = value.checked_mul(self.primes[i]).ok_or_else(|| Error::Capacity {
                    what: format!("compose of {kappa} overflows"),
                    required: u64::MAX,
                    limit: u64::MAX,
                })?;
            }
        }
        Ok(value)
    }
}

impl fmt::Debug for PrimeTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PrimeTable")
            .field("limit", &self.limit)
            .field("prime_count", &self.primes.len())
            .finish()
    }
}

/// The first `k` primes, independent of any sieve table.
pub fn first_primes(k: usize) -> Vec<u64> {
    let mut primes: Vec<u64> = Vec::with_capacity(k);
    let mut n: u64 = 2;
    while primes.len() < k {
        if primes.iter().all(|&p| n % p != 0) {
            primes.push(n);
        }
        n += 1;
    }
    primes
}

// ---------------------------------------------------------------------------
// IndexSet
// ---------------------------------------------------------------------------

/// An ordered finite truncation set: frequency labels in Z^d, or positive
/// integers in the multiplicative picture.
#[derive(Debug, Clone, PartialEq)]
pub enum IndexSet {
    /// Distinct multi-indices in lexicographic order.
    Additive(Vec<MultiIndex>),
    /// Distinct positive integers in ascending order.
    Multiplicative(Vec<u64>),
}

impl IndexSet {
    /// Sorts, deduplicates and wraps additive labels.
    pub fn additive(mut labels: Vec<MultiIndex>) -> Self {
        labels.sort();
        labels.dedup();
        IndexSet::Additive(labels)
    }

    /// Sorts, deduplicates and wraps multiplicative labels (all ≥ 1).
    pub fn multiplicative(mut labels: Vec<u64>) -> Result<Self> {
        if labels.iter().any(|&n| n == 0) {
            return Err(Error::Invalid("multiplicative labels must be positive".into()));
        }
        labels.sort_unstable();
        labels.dedup();
        Ok(IndexSet::Multiplicative(labels))
    }

    /// The non-Følner truncation {1, …, N}.
    pub fn natural(n: u64) -> Self {
        IndexSet::Multiplicative((1..=n).collect())
    }

    pub fn len(&self) -> usize {
        match self {
            IndexSet::Additive(v) => v.len(),
            IndexSet::Multiplicative(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_multiplicative(&self) -> bool {
        matches!(self, IndexSet::Multiplicative(_))
    }
}

/// The box {0, …, L−1}^d in lexicographic order.
///
/// For a shift ξ the overlap ratio |(ξ+σ)∩σ|/|σ| equals ∏ max(0, 1−|ξᵢ|/L),
/// which is what makes the family Følner.
pub fn folner_box(d: usize, side: usize, dim_cap: usize) -> Result<IndexSet> {
    if d == 0 || side == 0 {
        return Err(Error::Invalid("folner_box needs d ≥ 1 and L ≥ 1".into()));
    }
    let size = (side as u64).checked_pow(d as u32).unwrap_or(u64::MAX);
    if size > dim_cap as u64 {
        return Err(Error::Capacity {
            what: format!("box {{0..{}}}^{d}", side - 1),
            required: size,
            limit: dim_cap as u64,
        });
    }
    let mut labels = Vec::with_capacity(size as usize);
    let mut current = vec![0i32; d];
    loop {
        labels.push(MultiIndex::new(current.clone()));
        // lexicographic increment on the rightmost axis
        let mut axis = d;
        loop {
            if axis == 0 {
                return Ok(IndexSet::Additive(labels));
            }
            axis -= 1;
            current[axis] += 1;
            if (current[axis] as usize) < side {
                break;
            }
            current[axis] = 0;
        }
    }
}

/// The exponent-box multiplicative Følner set {p₁^{a₁}⋯p_k^{a_k} : 0 ≤ aᵢ ≤ M},
/// ascending. For a multiplier q = ∏ pᵢ^{bᵢ} the overlap ratio of qσ with σ is
/// exactly ∏ (1 − bᵢ/(M+1)).
pub fn multiplicative_folner(k: usize, m: usize, table: &PrimeTable) -> Result<IndexSet> {
    if k == 0 {
        return Err(Error::Invalid("multiplicative_folner needs k ≥ 1".into()));
    }
    let primes = first_primes(k);
    // largest element ∏ p_i^M must fit in the factorization table
    let mut largest: u64 = 1;
    for &p in &primes {
        for _ in 0..m {
            largest = largest.checked_mul(p).unwrap_or(u64::MAX);
        }
    }
    if largest > table.limit() {
        return Err(Error::Capacity {
            what: format!("multiplicative Følner box k={k}, M={m}"),
            required: largest,
            limit: table.limit(),
        });
    }
    let mut labels = vec![1u64];
    for &p in &primes {
        let mut next = Vec::with_capacity(labels.len() * (m + 1));
        for &v in &labels {
            let mut w = v;
            next.push(w);
            for _ in 0..m {
                w *= p;
                next.push(w);
            }
        }
        labels = next;
    }
    IndexSet::multiplicative(labels)
}

/// Exact overlap ratio |(ξ+σ)∩σ|/|σ| for an additive set.
pub fn additive_overlap_ratio(sigma: &IndexSet, shift: &MultiIndex) -> Result<f64> {
    let IndexSet::Additive(labels) = sigma else {
        return Err(Error::Invalid("additive overlap ratio needs an additive set".into()));
    };
    let set: HashSet<&MultiIndex> = labels.iter().collect();
    let hits = labels.iter().filter(|l| set.contains(&l.add(shift))).count();
    Ok(hits as f64 / labels.len() as f64)
}

/// Exact overlap ratio |(qσ)∩σ|/|σ| for a multiplicative set.
pub fn multiplicative_overlap_ratio(sigma: &IndexSet, q: u64) -> Result<f64> {
    let IndexSet::Multiplicative(labels) = sigma else {
        return Err(Error::Invalid(
            "multiplicative overlap ratio needs a multiplicative set".into(),
        ));
    };
    let set: HashSet<u64> = labels.iter().copied().collect();
    let hits = labels
        .iter()
        .filter(|&&l| l.checked_mul(q).is_some_and(|ql| set.contains(&ql)))
        .count();
    Ok(hits as f64 / labels.len() as f64)
}

// ---------------------------------------------------------------------------
// Coprime and smooth sets
// ---------------------------------------------------------------------------

/// E_k ∩ [1, bound]: positive integers coprime with the first k primes, ascending.
pub fn coprime_residuals(k: usize, bound: u64) -> Vec<u64> {
    let primes = first_primes(k);
    (1..=bound).filter(|n| primes.iter().all(|p| n % p != 0)).collect()
}

/// Y_N for k primes: exponent tuples (n₁,…,n_k) with ∏ pᵢ^{nᵢ} ≤ N,
/// in lexicographic order.
pub fn smooth_set(k: usize, n: u64) -> Vec<MultiIndex> {
    assert!(k >= 1, "smooth_set needs k ≥ 1");
    assert!(n >= 1, "smooth_set needs N ≥ 1");
    let primes = first_primes(k);
    let mut out = Vec::new();
    let mut tuple = vec![0i32; k];
    descend_smooth(&primes, 0, n, &mut tuple, &mut out);
    out
}

fn descend_smooth(primes: &[u64], axis: usize, budget: u64, tuple: &mut Vec<i32>, out: &mut Vec<MultiIndex>) {
    if axis == primes.len() {
        out.push(MultiIndex::new(tuple.clone()));
        return;
    }
    let p = primes[axis];
    let mut remaining = budget;
    let mut e = 0i32;
    loop {
        tuple[axis] = e;
        descend_smooth(primes, axis + 1, remaining, tuple, out);
        if remaining < p {
            break;
        }
        remaining /= p;
        e += 1;
    }
    tuple[axis] = 0;
}

/// F_{1,N}: the p₁..p_k-smooth positive integers ≤ N, ascending.
pub fn smooth_values(k: usize, n: u64) -> Vec<u64> {
    let primes = first_primes(k);
    let mut values = vec![1u64];
    for &p in &primes {
        let mut next = Vec::with_capacity(values.len() * 2);
        for &v in &values {
            let mut w = v;
            loop {
                next.push(w);
                match w.checked_mul(p) {
                    Some(wp) if wp <= n => w = wp,
                    _ => break,
                }
            }
        }
        values = next;
    }
    values.sort_unstable();
    values
}

/// |Y_N| without materializing the set.
pub fn smooth_count(k: usize, n: u64) -> u64 {
    let primes = first_primes(k);
    fn go(primes: &[u64], budget: u64) -> u64 {
        match primes {
            [] => 1,
            [p, rest @ ..] => {
                let mut total = 0;
                let mut remaining = budget;
                loop {
                    total += go(rest, remaining);
                    if remaining < *p {
                        break;
                    }
                    remaining /= p;
                }
                total
            }
        }
    }
    go(&primes, n)
}

// ---------------------------------------------------------------------------
// Lattice counting
// ---------------------------------------------------------------------------

/// Exhaustive count of {n ∈ Z₊^m : Σ nⱼxⱼ ≤ t} together with the volume main
/// term t^m/(m!·∏xⱼ).
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeCount {
    pub weights: Vec<f64>,
    pub bound: f64,
    pub count: u64,
    pub main_term: f64,
}

impl LatticeCount {
    /// Q_m(t) = 1 + t + … + t^{m−1}, the error-term weight.
    pub fn q_m(&self) -> f64 {
        let m = self.weights.len();
        (0..m).map(|j| self.bound.powi(j as i32)).sum()
    }
}

/// Counts lattice points under a linear constraint by nested enumeration,
/// refusing to enumerate more than `cap` points.
pub fn lattice_count(weights: &[f64], t: f64, cap: u64) -> Result<LatticeCount> {
    if weights.is_empty() || weights.iter().any(|&x| x <= 0.0) || t <= 0.0 {
        return Err(Error::Invalid("lattice_count needs positive weights and bound".into()));
    }
    let mut count: u64 = 0;
    count_rec(weights, t, cap, &mut count)?;
    let m = weights.len();
    // t^m / (m! ∏ x_j), folding the factorial into the product
    let mut main = t.powi(m as i32);
    for (j, &x) in weights.iter().enumerate() {
        main /= (j + 1) as f64 * x;
    }
    Ok(LatticeCount {
        weights: weights.to_vec(),
        bound: t,
        count,
        main_term: main,
    })
}

fn count_rec(weights: &[f64], budget: f64, cap: u64, count: &mut u64) -> Result<()> {
    match weights {
        [] => {
            *count += 1;
            if *count > cap {
                return Err(Error::Capacity {
                    what: "lattice enumeration".into(),
                    required: *count,
                    limit: cap,
                });
            }
            Ok(())
        }
        [x, rest @ ..] => {
            let mut used = 0.0;
            while budget - used >= 0.0 {
                count_rec(rest, budget - used, cap, count)?;
                used += x;
            }
            Ok(())
        }
    }
}
