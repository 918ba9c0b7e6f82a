//! Spectral statistics of the chain: closed-form moments, Gaussian
//! level-density comparison, unfolding, the analytic spacings law, and
//! regime diagnostics.
//!
//! The degeneracy-weighted mean and variance of the spectrum have closed
//! forms,
//!
//! ```text
//! mu      = (1 - eps/m) N(N-1)(3 beta - 4N + 2) / 12,
//! sigma^2 = (1 - 1/m^2) N(N-1) [16N^3 - N^2(25 beta - 6)
//!           + N(10 beta^2 - 35 beta + 26) + (5 beta - 6)(5 beta + 4)] / 360,
//! ```
//!
//! the variance independent of the coupling sign.  For large chains the
//! level density approaches the Gaussian with these moments, so levels are
//! unfolded through its cumulative distribution, `eta_i = (1/2)[1 +
//! erf((E_i - mu)/(sqrt 2 sigma))]`, and consecutive-level spacings are
//! rescaled to unit mean.  The spacings distribution is then captured by
//!
//! ```text
//! P(s) = 1 - (2 / (sqrt(pi) s_max)) sqrt(log(s_max / s)),
//! s_max = (E_max - E_min) / (sqrt(2 pi) sigma),
//! ```
//!
//! valid on `[s_0, s_max]` with `s_0 = s_max exp(-(pi/4) s_max^2)` the zero
//! of `P`.  Because reflecting the spectrum about its midpoint swaps the
//! coupling sign while preserving both the span and the variance, the law
//! is the same for either sign.
//!
//! Moments are computed in exact rational arithmetic; only the Gaussian
//! comparison, unfolding, and the law itself live in floating point.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};

use crate::error::{FiError, Result};
use crate::motif::{extremes, Epsilon, SpectrumTable};
use crate::rational::Rational;

fn rat(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// Which route produced a moment report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentSource {
    ClosedForm,
    Empirical,
}

/// Exact mean and variance of the degeneracy-weighted spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentReport {
    pub mu: Rational,
    pub sigma2: Rational,
    pub source: MomentSource,
}

impl MomentReport {
    pub fn mu_f64(&self) -> f64 {
        self.mu.to_f64().expect("finite rational")
    }

    pub fn sigma2_f64(&self) -> f64 {
        self.sigma2.to_f64().expect("finite rational")
    }

    pub fn sigma_f64(&self) -> f64 {
        self.sigma2_f64().sqrt()
    }
}

fn validate_chain(n: usize, m: usize) -> Result<()> {
    if n == 0 || m == 0 {
        return Err(FiError::domain("chain needs N >= 1 sites and m >= 1 species"));
    }
    Ok(())
}

/// Closed-form spectral moments.  Polynomial identities in `beta`, exact
/// for any rational value.
pub fn closed_form_moments(
    n: usize,
    m: usize,
    beta: &Rational,
    epsilon: Epsilon,
) -> Result<MomentReport> {
    validate_chain(n, m)?;
    let (nn, mm) = (rat(n as i64), rat(m as i64));
    let pair_count = &nn * (&nn - rat(1));
    let mu = (rat(1) - rat(epsilon.sign()) / &mm) * &pair_count
        * (rat(3) * beta - rat(4) * &nn + rat(2))
        / rat(12);
    let bracket = rat(16) * &nn * &nn * &nn
        - &nn * &nn * (rat(25) * beta - rat(6))
        + &nn * (rat(10) * beta * beta - rat(35) * beta + rat(26))
        + (rat(5) * beta - rat(6)) * (rat(5) * beta + rat(4));
    let sigma2 = (rat(1) - rat(1) / (&mm * &mm)) * pair_count * bracket / rat(360);
    Ok(MomentReport { mu, sigma2, source: MomentSource::ClosedForm })
}

/// Distinct level values with total degeneracies, ascending.
fn distinct_levels(table: &SpectrumTable) -> Vec<(Rational, BigUint)> {
    let mut acc: BTreeMap<Rational, BigUint> = BTreeMap::new();
    for level in table.levels() {
        let entry = acc.entry(level.value.clone()).or_insert_with(BigUint::zero);
        *entry += level.degeneracy;
    }
    acc.into_iter().collect()
}

/// Degeneracy-weighted mean and variance computed directly from a table.
pub fn empirical_moments(table: &SpectrumTable) -> Result<MomentReport> {
    let levels = distinct_levels(table);
    if levels.is_empty() {
        return Err(FiError::domain("empirical moments need a nonempty table"));
    }
    let total = Rational::from_integer(BigInt::from(table.total_degeneracy()));
    let mut first = Rational::zero();
    let mut second = Rational::zero();
    for (value, degeneracy) in &levels {
        let weight = Rational::from_integer(BigInt::from(degeneracy.clone()));
        first += &weight * value;
        second += weight * value * value;
    }
    let mu = first / &total;
    let sigma2 = second / total - &mu * &mu;
    Ok(MomentReport { mu, sigma2, source: MomentSource::Empirical })
}

/// Gaussian cumulative distribution with the given mean and deviation.
pub fn gaussian_cdf(x: f64, mu: f64, sigma: f64) -> f64 {
    0.5 * (1.0 + libm::erf((x - mu) / (std::f64::consts::SQRT_2 * sigma)))
}

/// Sup-distance between the cumulative level density and the Gaussian law.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianComparison {
    pub sup_distance: f64,
    /// Level value attaining the supremum.
    pub sup_location: f64,
    pub mu: f64,
    pub sigma: f64,
    pub distinct_levels: usize,
}

/// `D = sup_E |F(E) - G(E)|` with `F` the exact cumulative degeneracy
/// fraction and `G` the Gaussian with closed-form moments.  The supremum
/// over the real line is attained at a jump of `F`, so both one-sided
/// values are inspected at every level.
pub fn gaussian_comparison(table: &SpectrumTable) -> Result<GaussianComparison> {
    let moments = closed_form_moments(table.n(), table.m(), table.beta(), table.epsilon())?;
    if moments.sigma2 <= Rational::zero() {
        return Err(FiError::domain(
            "Gaussian comparison needs positive spectral variance",
        ));
    }
    let (mu, sigma) = (moments.mu_f64(), moments.sigma_f64());
    let total = Rational::from_integer(BigInt::from(table.total_degeneracy()));
    let mut cumulative = Rational::zero();
    let mut sup = 0.0f64;
    let mut location = 0.0f64;
    let mut count = 0usize;
    for (value, degeneracy) in distinct_levels(table) {
        count += 1;
        let below = (&cumulative / &total).to_f64().expect("finite fraction");
        cumulative += Rational::from_integer(BigInt::from(degeneracy));
        let above = (&cumulative / &total).to_f64().expect("finite fraction");
        let x = value.to_f64().expect("finite level");
        let g = gaussian_cdf(x, mu, sigma);
        for candidate in [(below - g).abs(), (above - g).abs()] {
            if candidate > sup {
                sup = candidate;
                location = x;
            }
        }
    }
    Ok(GaussianComparison {
        sup_distance: sup,
        sup_location: location,
        mu,
        sigma,
        distinct_levels: count,
    })
}

fn kahan_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut carry = 0.0f64;
    for v in values {
        let y = v - carry;
        let t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    sum
}

/// Distinct levels mapped through the Gaussian cumulative distribution,
/// with unit-mean normalized spacings.
#[derive(Debug, Clone, PartialEq)]
pub struct UnfoldedSpectrum {
    /// Ascending distinct level values `E_1 < ... < E_{L+1}`.
    pub levels: Vec<f64>,
    /// Their images `eta_i` in (0, 1), strictly increasing.
    pub eta: Vec<f64>,
    /// `s_i = L (eta_{i+1} - eta_i) / (eta_{L+1} - eta_1)`, sample mean 1.
    pub spacings: Vec<f64>,
}

/// Normalizes consecutive differences of a strictly increasing sequence to
/// unit sample mean.
pub fn normalized_spacings(eta: &[f64]) -> Result<Vec<f64>> {
    if eta.len() < 3 {
        return Err(FiError::domain("unfolding needs at least 3 distinct levels"));
    }
    for pair in eta.windows(2) {
        if pair[1] <= pair[0] {
            return Err(FiError::verification(format!(
                "unfolded sequence not strictly increasing at {} -> {} \
                 (Gaussian tail saturated in floating point)",
                pair[0], pair[1]
            )));
        }
    }
    let l = eta.len() - 1;
    let span = eta[l] - eta[0];
    let spacings: Vec<f64> =
        eta.windows(2).map(|pair| (pair[1] - pair[0]) * l as f64 / span).collect();
    let mean = kahan_sum(spacings.iter().copied()) / l as f64;
    if (mean - 1.0).abs() > 1e-12 {
        return Err(FiError::verification(format!(
            "normalized spacings mean {mean} deviates from 1 beyond 1e-12"
        )));
    }
    Ok(spacings)
}

/// Unfolds a spectrum through the Gaussian with closed-form moments.
pub fn unfold_and_spacings(table: &SpectrumTable) -> Result<UnfoldedSpectrum> {
    let moments = closed_form_moments(table.n(), table.m(), table.beta(), table.epsilon())?;
    if moments.sigma2 <= Rational::zero() {
        return Err(FiError::domain("unfolding needs positive spectral variance"));
    }
    let (mu, sigma) = (moments.mu_f64(), moments.sigma_f64());
    let levels: Vec<f64> = distinct_levels(table)
        .into_iter()
        .map(|(value, _)| value.to_f64().expect("finite level"))
        .collect();
    if levels.len() < 3 {
        return Err(FiError::domain("unfolding needs at least 3 distinct levels"));
    }
    let eta: Vec<f64> = levels.iter().map(|&x| gaussian_cdf(x, mu, sigma)).collect();
    let spacings = normalized_spacings(&eta)?;
    Ok(UnfoldedSpectrum { levels, eta, spacings })
}

/// Parameters of the analytic spacings law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpacingsLawParams {
    /// `(E_max - E_min) / (sqrt(2 pi) sigma)`.
    pub s_max: f64,
    /// `s_max exp(-(pi/4) s_max^2)`, the zero of the law.
    pub s0: f64,
}

/// Computes the law parameters from the closed-form span and variance.
/// The span is reflection-invariant, so the result holds for both signs
/// of the coupling.
pub fn spacings_law_params(n: usize, m: usize, beta: &Rational) -> Result<SpacingsLawParams> {
    let ext = extremes(n, m, beta)?;
    let span = (&ext.e_max_value - &ext.e_min_value).to_f64().expect("finite span");
    let moments = closed_form_moments(n, m, beta, Epsilon::Antiferro)?;
    if moments.sigma2 <= Rational::zero() || span <= 0.0 {
        return Err(FiError::domain(
            "spacings law needs positive spectral span and variance",
        ));
    }
    let s_max = span / ((2.0 * std::f64::consts::PI).sqrt() * moments.sigma_f64());
    let s0 = s_max * (-std::f64::consts::FRAC_PI_4 * s_max * s_max).exp();
    Ok(SpacingsLawParams { s_max, s0 })
}

/// Cumulative spacings law `P(s) = 1 - (2/(sqrt(pi) s_max))
/// sqrt(log(s_max/s))`, clamped to `[0, 1]`.  Defined for `s` in
/// `(0, s_max]`; the clamp is active below `s_0`, where the law crosses
/// zero.
pub fn spacings_law(s: f64, params: &SpacingsLawParams) -> Result<f64> {
    if !(s > 0.0 && s <= params.s_max) {
        return Err(FiError::domain(format!(
            "spacing {s} outside the law domain (0, {}]",
            params.s_max
        )));
    }
    let raw = 1.0
        - (2.0 / (std::f64::consts::PI.sqrt() * params.s_max))
            * (params.s_max / s).ln().sqrt();
    Ok(raw.clamp(0.0, 1.0))
}

/// RMS deviation between the empirical cumulative spacings distribution
/// (midpoint convention, ranked within the full sample) and the analytic
/// law, over the law's validity window `[s_0, s_max]`.
pub fn spacings_cdf_rms(spacings: &[f64], params: &SpacingsLawParams) -> Result<f64> {
    if spacings.is_empty() {
        return Err(FiError::domain("RMS comparison needs at least one spacing"));
    }
    let mut sorted = spacings.to_vec();
    sorted.sort_by(|x, y| x.partial_cmp(y).expect("finite spacings"));
    let l = sorted.len() as f64;
    let mut sum = 0.0f64;
    let mut used = 0usize;
    for (k, &s) in sorted.iter().enumerate() {
        if s < params.s0 || s > params.s_max {
            continue;
        }
        let empirical = (k as f64 + 0.5) / l;
        let diff = empirical - spacings_law(s, params)?;
        sum += diff * diff;
        used += 1;
    }
    if used == 0 {
        return Err(FiError::domain(
            "no spacings inside the law window [s0, s_max]",
        ));
    }
    Ok((sum / used as f64).sqrt())
}

/// One bin of a level-difference histogram.
#[derive(Debug, Clone, PartialEq)]
pub struct HistogramBin {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

/// Freedman-Diaconis histogram (nearest-rank quartiles).  Returns no bins
/// when the spread is degenerate (fewer than two values or zero
/// interquartile range); exact difference counts cover that regime.
pub fn fd_histogram(values: &[f64]) -> Vec<HistogramBin> {
    if values.len() < 2 {
        return Vec::new();
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|x, y| x.partial_cmp(y).expect("finite values"));
    let l = sorted.len();
    let iqr = sorted[(3 * l) / 4 - 1] - sorted[l / 4];
    let width = 2.0 * iqr * (l as f64).powf(-1.0 / 3.0);
    if !(width > 0.0) {
        return Vec::new();
    }
    let (min, max) = (sorted[0], sorted[l - 1]);
    let bins = ((max - min) / width).ceil().max(1.0) as usize;
    let mut out: Vec<HistogramBin> = (0..bins)
        .map(|k| HistogramBin {
            lo: min + width * k as f64,
            hi: min + width * (k + 1) as f64,
            count: 0,
        })
        .collect();
    for &v in &sorted {
        let k = (((v - min) / width) as usize).min(bins - 1);
        out[k].count += 1;
    }
    out
}

/// Levels grouped by the lattice mode-sum component of their keys.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterSummary {
    /// Mode-weighted occupation sum `j`; at large coupling the cluster
    /// centers sit near `beta j` plus an O(1) offset.
    pub j: u64,
    /// Number of distinct (value, key) pairs in the cluster.
    pub keys: usize,
    pub degeneracy: BigUint,
}

/// Raw-difference and cluster diagnostics for the lattice regimes.
#[derive(Debug, Clone, PartialEq)]
pub struct RegimeDiagnostics {
    /// Consecutive differences of distinct levels, exact.
    pub differences: Vec<Rational>,
    /// `(difference, multiplicity)`, most frequent first.
    pub difference_counts: Vec<(Rational, usize)>,
    pub dominant_difference: Option<Rational>,
    /// Multiplicity of the dominant difference over the total count.
    pub dominant_fraction: f64,
    /// `((E_i - mu)/sigma, dE_i)` pairs for scatter output.
    pub scatter: Vec<(f64, f64)>,
    pub histogram: Vec<HistogramBin>,
    pub clusters: Vec<ClusterSummary>,
    /// Key-component range implied by the extremal motifs for this
    /// coupling sign.
    pub expected_j_range: (u64, u64),
    /// All observed clusters lie in the expected range and both endpoints
    /// are attained.
    pub j_range_consistent: bool,
}

/// Computes difference statistics, scatter data, the difference histogram,
/// and the key-component cluster decomposition of a spectrum table.
pub fn regime_diagnostics(table: &SpectrumTable) -> Result<RegimeDiagnostics> {
    let levels = distinct_levels(table);
    if levels.is_empty() {
        return Err(FiError::domain("diagnostics need a nonempty table"));
    }
    let differences: Vec<Rational> =
        levels.windows(2).map(|pair| &pair[1].0 - &pair[0].0).collect();
    let mut counts: BTreeMap<Rational, usize> = BTreeMap::new();
    for d in &differences {
        *counts.entry(d.clone()).or_insert(0) += 1;
    }
    let mut difference_counts: Vec<(Rational, usize)> = counts.into_iter().collect();
    difference_counts.sort_by(|x, y| y.1.cmp(&x.1).then_with(|| x.0.cmp(&y.0)));
    let dominant_difference = difference_counts.first().map(|(d, _)| d.clone());
    let dominant_fraction = difference_counts
        .first()
        .map(|&(_, c)| c as f64 / differences.len() as f64)
        .unwrap_or(0.0);

    let moments = closed_form_moments(table.n(), table.m(), table.beta(), table.epsilon())?;
    let scatter = if moments.sigma2 > Rational::zero() {
        let (mu, sigma) = (moments.mu_f64(), moments.sigma_f64());
        levels
            .iter()
            .zip(differences.iter())
            .map(|((value, _), d)| {
                (
                    (value.to_f64().expect("finite level") - mu) / sigma,
                    d.to_f64().expect("finite difference"),
                )
            })
            .collect()
    } else {
        Vec::new()
    };
    let histogram = fd_histogram(
        &differences.iter().map(|d| d.to_f64().expect("finite difference")).collect::<Vec<_>>(),
    );

    let mut cluster_map: BTreeMap<u64, (usize, BigUint)> = BTreeMap::new();
    for (value, _) in &levels {
        let slots = table.constituents(value).expect("known level");
        for (key, degeneracy) in slots {
            let entry = cluster_map.entry(key.a).or_insert_with(|| (0, BigUint::zero()));
            entry.0 += 1;
            entry.1 += degeneracy.clone();
        }
    }
    let clusters: Vec<ClusterSummary> = cluster_map
        .into_iter()
        .map(|(j, (keys, degeneracy))| ClusterSummary { j, keys, degeneracy })
        .collect();
    let ext = extremes(table.n(), table.m(), table.beta())?;
    let expected_j_range = match table.epsilon() {
        Epsilon::Antiferro => ext.j_range,
        Epsilon::Ferro => (0, ext.j_range.1 - ext.j_range.0),
    };
    let j_range_consistent = !clusters.is_empty()
        && clusters.iter().all(|c| c.j >= expected_j_range.0 && c.j <= expected_j_range.1)
        && clusters.first().map(|c| c.j) == Some(expected_j_range.0)
        && clusters.last().map(|c| c.j) == Some(expected_j_range.1);

    Ok(RegimeDiagnostics {
        differences,
        difference_counts,
        dominant_difference,
        dominant_fraction,
        scatter,
        histogram,
        clusters,
        expected_j_range,
        j_range_consistent,
    })
}
