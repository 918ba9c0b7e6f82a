//! Motif combinatorics and exact spectrum tables for the chain.
//!
//! Every eigenvalue of the chain is a sum of dispersion terms over a motif, a
//! binary word `delta` of length N-1 obtained from an occupancy sequence
//! `kappa in {0..m-1}^N` by comparing neighbours:
//!
//! ```text
//! ferro (eps = +1):        delta_i = 1  iff  kappa_{i+1} >  kappa_i
//! antiferro (eps = -1):    delta_i = 1  iff  kappa_{i+1} <= kappa_i
//! E(delta) = sum_i delta_i F(i),    F(j) = j (beta - 2N + j + 1).
//! ```
//!
//! `F(j)` is affine in `beta`, so every level is an exact lattice point
//! `A beta + B` with integers `A = sum delta_i i` and `B = sum delta_i
//! i(i+1-2N)`; the tables here store levels as exact rationals keyed by those
//! lattice pairs, with big-integer degeneracies.  Two independent generators
//! are provided: a transfer dynamic programme over the current occupancy
//! value (states = m, cost O(N m^2 L)) and a direct sweep over all m^N
//! occupancy sequences.  They must agree entry for entry.
//!
//! Levels with equal exact energy are presented merged by default; the table
//! still records every contributing lattice pair with its own count, which
//! keeps duality and the unmerged presentation (for approximated irrational
//! `beta`) exact rather than representative-dependent.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_integer::binomial;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{FiError, Result};
use crate::rational::Rational;

/// Cap on stored (energy, lattice key) pairs across a table or DP state.
pub const DEFAULT_KEY_CAP: usize = 10_000_000;
/// Cap on occupancy sequences visited by the brute-force generator.
pub const DEFAULT_PATH_CAP: u64 = 1 << 24;

/// Sign of the spin-exchange term: `Ferro` is `eps = +1`, `Antiferro` is
/// `eps = -1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Epsilon {
    Ferro,
    Antiferro,
}

impl Epsilon {
    pub fn sign(self) -> i64 {
        match self {
            Epsilon::Ferro => 1,
            Epsilon::Antiferro => -1,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Epsilon::Ferro => Epsilon::Antiferro,
            Epsilon::Antiferro => Epsilon::Ferro,
        }
    }

    pub fn from_sign(sign: i64) -> Result<Self> {
        match sign {
            1 => Ok(Epsilon::Ferro),
            -1 => Ok(Epsilon::Antiferro),
            other => Err(FiError::domain(format!("epsilon must be +1 or -1, got {other}"))),
        }
    }
}

/// Lattice form of an energy: `E = a * beta + b` with non-negative `a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EnergyKey {
    pub a: u64,
    pub b: i64,
}

impl EnergyKey {
    pub const ZERO: EnergyKey = EnergyKey { a: 0, b: 0 };

    pub fn value(&self, beta: &Rational) -> Rational {
        Rational::from_integer(BigInt::from(self.a)) * beta
            + Rational::from_integer(BigInt::from(self.b))
    }

    pub fn value_f64(&self, beta: f64) -> f64 {
        self.a as f64 * beta + self.b as f64
    }

    pub fn plus(&self, other: &EnergyKey) -> EnergyKey {
        EnergyKey { a: self.a + other.a, b: self.b + other.b }
    }

    /// `total - self`; total must dominate the `a` component.
    pub fn reflected_in(&self, total: &EnergyKey) -> EnergyKey {
        debug_assert!(self.a <= total.a, "reflection requires a dominating total key");
        EnergyKey { a: total.a - self.a, b: total.b - self.b }
    }
}

/// Single-mode dispersion families.  `Fi` is the chain's own quadratic
/// dispersion (affine in `beta`); the Haldane-Shastry and
/// Polychronakos-Frahm forms are provided for comparison work.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DispersionFamily {
    Fi,
    HaldaneShastry,
    PolychronakosFrahm,
}

/// Dispersion at mode `j`, `1 <= j <= N-1`, as a lattice key.
pub fn dispersion(family: DispersionFamily, j: usize, n: usize) -> Result<EnergyKey> {
    if j == 0 || j >= n {
        return Err(FiError::domain(format!(
            "dispersion mode j = {j} outside 1..=N-1 for N = {n}"
        )));
    }
    let (j_i, n_i) = (j as i64, n as i64);
    Ok(match family {
        DispersionFamily::Fi => EnergyKey { a: j as u64, b: j_i * (j_i + 1 - 2 * n_i) },
        DispersionFamily::HaldaneShastry => EnergyKey { a: 0, b: j_i * (n_i - j_i) },
        DispersionFamily::PolychronakosFrahm => EnergyKey { a: 0, b: j_i },
    })
}

/// Bond word of a spectrum level; bit `i` (1-based bond) multiplies `F(i)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Motif {
    bits: Vec<bool>,
}

impl Motif {
    pub fn new(bits: Vec<bool>) -> Motif {
        Motif { bits }
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Chain size this motif belongs to.
    pub fn n(&self) -> usize {
        self.bits.len() + 1
    }

    pub fn all_ones(n: usize) -> Motif {
        Motif { bits: vec![true; n.saturating_sub(1)] }
    }

    pub fn all_zeros(n: usize) -> Motif {
        Motif { bits: vec![false; n.saturating_sub(1)] }
    }
}

fn bond_bit(prev: usize, next: usize, epsilon: Epsilon) -> bool {
    match epsilon {
        Epsilon::Ferro => next > prev,
        Epsilon::Antiferro => next <= prev,
    }
}

/// Motif of an occupancy sequence under the given sign rule.
pub fn motif_from_occupancies(kappa: &[usize], m: usize, epsilon: Epsilon) -> Result<Motif> {
    if m == 0 {
        return Err(FiError::domain("occupancy alphabet size m must be at least 1"));
    }
    if kappa.is_empty() {
        return Err(FiError::domain("occupancy sequence must be nonempty"));
    }
    if let Some(&bad) = kappa.iter().find(|&&v| v >= m) {
        return Err(FiError::domain(format!("occupancy value {bad} outside 0..{m}")));
    }
    let bits = kappa.windows(2).map(|w| bond_bit(w[0], w[1], epsilon)).collect();
    Ok(Motif { bits })
}

/// Energy key of a motif under the chain dispersion.
pub fn motif_energy(motif: &Motif) -> EnergyKey {
    let n = motif.n();
    let mut key = EnergyKey::ZERO;
    for (idx, &bit) in motif.bits.iter().enumerate() {
        if bit {
            key = key.plus(&dispersion(DispersionFamily::Fi, idx + 1, n).expect("bond in range"));
        }
    }
    key
}

/// Ordered composition `k_1 + ... + k_r = N`, all parts >= 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Composition {
    parts: Vec<usize>,
}

impl Composition {
    pub fn new(parts: Vec<usize>) -> Result<Composition> {
        if parts.is_empty() || parts.iter().any(|&p| p == 0) {
            return Err(FiError::domain("composition parts must be positive and nonempty"));
        }
        Ok(Composition { parts })
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn total(&self) -> usize {
        self.parts.iter().sum()
    }

    /// Partial sums `K_1 < ... < K_r = N`.
    pub fn partial_sums(&self) -> Vec<usize> {
        let mut acc = 0;
        self.parts
            .iter()
            .map(|&p| {
                acc += p;
                acc
            })
            .collect()
    }

    /// Composition encoded by a boundary mask: bit `t` set places a block
    /// boundary after position `t + 1`, for `t = 0..N-2`.
    pub fn from_boundary_mask(n: usize, mask: u64) -> Composition {
        let mut parts = Vec::new();
        let mut len = 0usize;
        for pos in 0..n {
            len += 1;
            let boundary = pos + 1 < n && (mask >> pos) & 1 == 1;
            if boundary || pos + 1 == n {
                parts.push(len);
                len = 0;
            }
        }
        Composition { parts }
    }
}

/// Internal-state count of one composition block structure:
/// `prod binom(m + k_i - 1, k_i)` for `eps = +1`, `prod binom(m, k_i)` for
/// `eps = -1` (zero when any part exceeds `m`).
pub fn composition_degeneracy(comp: &Composition, m: usize, epsilon: Epsilon) -> BigUint {
    let mut d = BigUint::one();
    for &k in comp.parts() {
        let factor = match epsilon {
            Epsilon::Ferro => binomial(BigUint::from(m + k - 1), BigUint::from(k)),
            Epsilon::Antiferro => {
                if k > m {
                    return BigUint::zero();
                }
                binomial(BigUint::from(m), BigUint::from(k))
            }
        };
        d *= factor;
    }
    d
}

/// Per-energy storage: contributing lattice keys, sorted, with their counts.
type Slot = Vec<(EnergyKey, BigUint)>;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
struct KeyedLevels {
    map: BTreeMap<Rational, Slot>,
    key_count: usize,
}

impl KeyedLevels {
    fn add(&mut self, value: Rational, key: EnergyKey, count: BigUint) {
        let slot = self.map.entry(value).or_default();
        match slot.binary_search_by(|(k, _)| k.cmp(&key)) {
            Ok(i) => slot[i].1 += count,
            Err(i) => {
                slot.insert(i, (key, count));
                self.key_count += 1;
            }
        }
    }

    /// New container with every entry translated by one dispersion term.
    /// Order is preserved, so the maps are rebuilt without re-sorting.
    fn shifted(&self, dkey: &EnergyKey, dvalue: &Rational) -> KeyedLevels {
        let map = self
            .map
            .iter()
            .map(|(value, slot)| {
                let new_slot: Slot =
                    slot.iter().map(|(k, c)| (k.plus(dkey), c.clone())).collect();
                (value + dvalue, new_slot)
            })
            .collect();
        KeyedLevels { map, key_count: self.key_count }
    }

    fn absorb(&mut self, other: &KeyedLevels) {
        for (value, slot) in other.map.iter() {
            for (key, count) in slot {
                self.add(value.clone(), *key, count.clone());
            }
        }
    }

    fn check_cap(&self, cap: usize) -> Result<()> {
        if self.key_count > cap {
            Err(FiError::resource(format!(
                "level table would exceed the key cap ({} > {cap})",
                self.key_count
            )))
        } else {
            Ok(())
        }
    }
}

/// One presented level of a table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Level {
    pub value: Rational,
    pub key: EnergyKey,
    pub degeneracy: BigUint,
}

/// Exact spectrum table.  Iteration order is ascending exact energy (then
/// ascending lattice key in the unmerged presentation).
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumTable {
    n: usize,
    m: usize,
    epsilon: Epsilon,
    beta: Rational,
    merged: bool,
    levels: KeyedLevels,
}

/// Generation options: presentation mode and the stored-key cap.
#[derive(Debug, Clone)]
pub struct SpectrumOptions {
    pub merge_equal_energies: bool,
    pub max_keys: usize,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        SpectrumOptions { merge_equal_energies: true, max_keys: DEFAULT_KEY_CAP }
    }
}

impl SpectrumTable {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn epsilon(&self) -> Epsilon {
        self.epsilon
    }

    pub fn beta(&self) -> &Rational {
        &self.beta
    }

    pub fn merged(&self) -> bool {
        self.merged
    }

    /// Number of presented levels.
    pub fn len(&self) -> usize {
        if self.merged {
            self.levels.map.len()
        } else {
            self.levels.key_count
        }
    }

    pub fn is_empty(&self) -> bool {
        self.levels.map.is_empty()
    }

    /// Presented levels, ascending.  Merged tables report one level per
    /// exact energy (key = smallest contributing lattice pair); unmerged
    /// tables report one level per lattice pair.
    pub fn levels(&self) -> Vec<Level> {
        let mut out = Vec::with_capacity(self.len());
        for (value, slot) in self.levels.map.iter() {
            if self.merged {
                let mut total = BigUint::zero();
                for (_, c) in slot {
                    total += c;
                }
                out.push(Level { value: value.clone(), key: slot[0].0, degeneracy: total });
            } else {
                for (key, count) in slot {
                    out.push(Level { value: value.clone(), key: *key, degeneracy: count.clone() });
                }
            }
        }
        out
    }

    /// All contributing lattice keys of the level at `value`, with counts.
    pub fn constituents(&self, value: &Rational) -> Option<&[(EnergyKey, BigUint)]> {
        self.levels.map.get(value).map(|s| s.as_slice())
    }

    pub fn total_degeneracy(&self) -> BigUint {
        let mut total = BigUint::zero();
        for slot in self.levels.map.values() {
            for (_, c) in slot {
                total += c;
            }
        }
        total
    }

    pub fn min_level(&self) -> Option<Level> {
        self.levels().into_iter().next()
    }

    pub fn max_level(&self) -> Option<Level> {
        self.levels().into_iter().last()
    }

    /// `sum_levels deg * q^E`.
    pub fn partition_value(&self, q: f64) -> f64 {
        let mut z = 0.0f64;
        for (value, slot) in self.levels.map.iter() {
            let e = value.to_f64().expect("energy fits in f64");
            let mut deg = BigUint::zero();
            for (_, c) in slot {
                deg += c;
            }
            z += deg.to_f64().expect("degeneracy fits in f64") * q.powf(e);
        }
        z
    }
}

fn validate_chain_params(n: usize, m: usize) -> Result<()> {
    if n == 0 {
        return Err(FiError::domain("chain size N must be at least 1"));
    }
    if m == 0 {
        return Err(FiError::domain("internal-state count m must be at least 1"));
    }
    Ok(())
}

fn finish_table(
    n: usize,
    m: usize,
    epsilon: Epsilon,
    beta: &Rational,
    opts: &SpectrumOptions,
    levels: KeyedLevels,
) -> Result<SpectrumTable> {
    let table = SpectrumTable {
        n,
        m,
        epsilon,
        beta: beta.clone(),
        merged: opts.merge_equal_energies,
        levels,
    };
    let expected = BigUint::from(m).pow(n as u32);
    let total = table.total_degeneracy();
    if total != expected {
        return Err(FiError::verification(format!(
            "table degeneracies sum to {total}, expected m^N = {expected}"
        )));
    }
    Ok(table)
}

/// Spectrum by the occupancy-value transfer DP.
pub fn spectrum(n: usize, m: usize, epsilon: Epsilon, beta: &Rational) -> Result<SpectrumTable> {
    spectrum_with(n, m, epsilon, beta, &SpectrumOptions::default())
}

pub fn spectrum_with(
    n: usize,
    m: usize,
    epsilon: Epsilon,
    beta: &Rational,
    opts: &SpectrumOptions,
) -> Result<SpectrumTable> {
    validate_chain_params(n, m)?;
    // State per current occupancy value: partial-energy distribution of all
    // occupancy prefixes ending in that value.
    let mut states: Vec<KeyedLevels> = (0..m)
        .map(|_| {
            let mut kl = KeyedLevels::default();
            kl.add(Rational::zero(), EnergyKey::ZERO, BigUint::one());
            kl
        })
        .collect();
    for bond in 1..n {
        let f_key = dispersion(DispersionFamily::Fi, bond, n)?;
        let f_value = f_key.value(beta);
        let mut next: Vec<KeyedLevels> = vec![KeyedLevels::default(); m];
        for (next_val, slot) in next.iter_mut().enumerate() {
            for (prev_val, state) in states.iter().enumerate() {
                if bond_bit(prev_val, next_val, epsilon) {
                    slot.absorb(&state.shifted(&f_key, &f_value));
                } else {
                    slot.absorb(state);
                }
            }
            slot.check_cap(opts.max_keys)?;
        }
        states = next;
    }
    let mut merged = KeyedLevels::default();
    for state in states.iter() {
        merged.absorb(state);
    }
    merged.check_cap(opts.max_keys)?;
    finish_table(n, m, epsilon, beta, opts, merged)
}

/// Spectrum by direct enumeration of all `m^N` occupancy sequences.
/// Independent of the DP; used to cross-validate it.
pub fn spectrum_bruteforce(
    n: usize,
    m: usize,
    epsilon: Epsilon,
    beta: &Rational,
) -> Result<SpectrumTable> {
    spectrum_bruteforce_with(n, m, epsilon, beta, &SpectrumOptions::default(), DEFAULT_PATH_CAP)
}

pub fn spectrum_bruteforce_with(
    n: usize,
    m: usize,
    epsilon: Epsilon,
    beta: &Rational,
    opts: &SpectrumOptions,
    max_paths: u64,
) -> Result<SpectrumTable> {
    validate_chain_params(n, m)?;
    let paths = (m as u64).checked_pow(n as u32).filter(|&p| p <= max_paths).ok_or_else(|| {
        FiError::resource(format!("m^N = {m}^{n} exceeds the enumeration cap {max_paths}"))
    })?;
    // Dispersion values per bond, computed once.
    let mut f_keys = vec![EnergyKey::ZERO; n];
    let mut f_values = vec![Rational::zero(); n];
    for bond in 1..n {
        f_keys[bond] = dispersion(DispersionFamily::Fi, bond, n)?;
        f_values[bond] = f_keys[bond].value(beta);
    }
    let mut levels = KeyedLevels::default();
    let mut kappa = vec![0usize; n];
    for _ in 0..paths {
        let mut key = EnergyKey::ZERO;
        let mut value = Rational::zero();
        for bond in 1..n {
            if bond_bit(kappa[bond - 1], kappa[bond], epsilon) {
                key = key.plus(&f_keys[bond]);
                value += &f_values[bond];
            }
        }
        levels.add(value, key, BigUint::one());
        levels.check_cap(opts.max_keys)?;
        // Increment the base-m counter.
        for digit in kappa.iter_mut().rev() {
            *digit += 1;
            if *digit < m {
                break;
            }
            *digit = 0;
        }
    }
    finish_table(n, m, epsilon, beta, opts, levels)
}

/// Key of the all-ones motif: `sum_{i=1}^{N-1} F(i)`, the additive total of
/// the spectrum under duality.
pub fn full_motif_key(n: usize) -> EnergyKey {
    motif_energy(&Motif::all_ones(n))
}

/// Reflection `E -> E_sum - E` of a table; exactly the table of the opposite
/// sign rule.  Degeneracies and per-key counts are carried through unchanged.
pub fn dual_spectrum(table: &SpectrumTable) -> SpectrumTable {
    let total = full_motif_key(table.n);
    let total_value = total.value(&table.beta);
    let mut levels = KeyedLevels::default();
    for (value, slot) in table.levels.map.iter() {
        let new_value = &total_value - value;
        // Reflection reverses the key order within a slot.
        for (key, count) in slot.iter().rev() {
            levels.add(new_value.clone(), key.reflected_in(&total), count.clone());
        }
    }
    SpectrumTable {
        n: table.n,
        m: table.m,
        epsilon: table.epsilon.flipped(),
        beta: table.beta.clone(),
        merged: table.merged,
        levels,
    }
}

/// Spectral extremes of the antiferromagnetic chain.
#[derive(Debug, Clone, PartialEq)]
pub struct Extremes {
    pub e_min: EnergyKey,
    pub e_max: EnergyKey,
    pub e_min_value: Rational,
    pub e_max_value: Rational,
    pub min_motif: Motif,
    /// Range of the lattice `a` component (mode-weighted sum `sum delta_i i`)
    /// across the spectrum: `(a of E_min, a of E_max)`.
    pub j_range: (u64, u64),
}

/// Extremal levels of the antiferromagnetic spectrum and the motif realizing
/// the minimum.  The closed forms are asserted against the motif energies.
pub fn extremes(n: usize, m: usize, beta: &Rational) -> Result<Extremes> {
    validate_chain_params(n, m)?;
    // Minimal motif: (N-1) mod m leading zeros, then blocks 1 0^{m-1}.
    let lead = (n - 1) % m;
    let mut bits = vec![false; n - 1];
    let mut pos = lead;
    while pos < n - 1 {
        bits[pos] = true;
        pos += m;
    }
    let min_motif = Motif::new(bits);
    let e_min = motif_energy(&min_motif);
    let e_max = full_motif_key(n);
    // Closed form for the minimum, with n' = floor(N/m):
    // (n'/6) [m^2 (n'+1)(2n'+1) - 3m (n'+1)(beta+1) + 6N (beta - N + 1)].
    let np = (n / m) as i64;
    let (n_i, m_i) = (n as i64, m as i64);
    let rat = |v: i64| Rational::from_integer(BigInt::from(v));
    let closed_min = rat(np) / rat(6)
        * (rat(m_i * m_i * (np + 1) * (2 * np + 1)) - rat(3 * m_i * (np + 1)) * (beta + rat(1))
            + rat(6 * n_i) * (beta - rat(n_i) + rat(1)));
    let e_min_value = e_min.value(beta);
    if closed_min != e_min_value {
        return Err(FiError::verification(format!(
            "minimal motif energy {e_min_value} disagrees with its closed form {closed_min}"
        )));
    }
    let j_min_closed = (np * (2 * n_i - m_i - m_i * np) / 2) as u64;
    if e_min.a != j_min_closed {
        return Err(FiError::verification(format!(
            "minimal motif mode sum {} disagrees with its closed form {j_min_closed}",
            e_min.a
        )));
    }
    let e_max_value = e_max.value(beta);
    Ok(Extremes {
        j_range: (e_min.a, e_max.a),
        e_min_value,
        e_max_value,
        e_min,
        e_max,
        min_motif,
    })
}

/// Partition function evaluated by two independent routes.
#[derive(Debug, Clone)]
pub struct PartitionEval {
    pub q: f64,
    /// Composition sum: `sum_k d(k) q^{sum F(K_i)} prod_{K'} (1 - q^{F(K')})`.
    pub z_composition: f64,
    /// Direct table sum `sum deg q^E`.
    pub z_table: f64,
    pub rel_diff: f64,
}

/// Largest chain size for the exponential composition route.
const COMPOSITION_ROUTE_MAX_N: usize = 26;

/// Evaluates the partition function at `0 < q < 1` by the composition
/// formula and by the table sum, and reports their relative difference.
pub fn partition_eval(table: &SpectrumTable, q: f64) -> Result<PartitionEval> {
    if !(q > 0.0 && q < 1.0) {
        return Err(FiError::domain(format!("q must lie strictly inside (0, 1), got {q}")));
    }
    let n = table.n();
    if n > COMPOSITION_ROUTE_MAX_N {
        return Err(FiError::resource(format!(
            "composition route enumerates 2^(N-1) terms; N = {n} exceeds {COMPOSITION_ROUTE_MAX_N}"
        )));
    }
    let beta = table.beta().to_f64().expect("beta fits in f64");
    // Dispersion values and their (1 - q^F) factors per bond.
    let mut f_val = vec![0.0f64; n];
    let mut one_minus = vec![0.0f64; n];
    for bond in 1..n {
        f_val[bond] = dispersion(DispersionFamily::Fi, bond, n)?.value_f64(beta);
        one_minus[bond] = 1.0 - q.powf(f_val[bond]);
    }
    let mut z_comp = 0.0f64;
    for mask in 0u64..(1u64 << (n - 1)) {
        let comp = Composition::from_boundary_mask(n, mask);
        let d = composition_degeneracy(&comp, table.m(), table.epsilon());
        if d.is_zero() {
            continue;
        }
        let mut term = d.to_f64().expect("degeneracy fits in f64");
        // Interior partial sums K_1..K_{r-1} are exactly the mask bits + 1.
        for bond in 1..n {
            if (mask >> (bond - 1)) & 1 == 1 {
                term *= q.powf(f_val[bond]);
            } else {
                term *= one_minus[bond];
            }
        }
        z_comp += term;
    }
    let z_table = table.partition_value(q);
    let rel_diff = (z_comp - z_table).abs() / z_table.abs().max(1.0);
    Ok(PartitionEval { q, z_composition: z_comp, z_table, rel_diff })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::parse_rational;
    use proptest::prelude::*;

    fn rat(v: i64) -> Rational {
        Rational::from_integer(BigInt::from(v))
    }

    fn table_from_entries(
        n: usize,
        m: usize,
        epsilon: Epsilon,
        beta: &Rational,
        entries: &[(u64, i64, u64)],
    ) -> Vec<(Rational, EnergyKey, BigUint)> {
        let _ = (n, m, epsilon);
        entries
            .iter()
            .map(|&(a, b, d)| {
                let key = EnergyKey { a, b };
                (key.value(beta), key, BigUint::from(d))
            })
            .collect()
    }

    fn assert_table_is(table: &SpectrumTable, entries: &[(u64, i64, u64)]) {
        let expect =
            table_from_entries(table.n(), table.m(), table.epsilon(), table.beta(), entries);
        let levels = table.levels();
        assert_eq!(levels.len(), expect.len(), "level count mismatch");
        for (level, (value, key, deg)) in levels.iter().zip(expect.iter()) {
            assert_eq!(&level.value, value);
            assert_eq!(&level.key, key);
            assert_eq!(&level.degeneracy, deg);
        }
    }

    #[test]
    fn dispersion_families() {
        // Chain dispersion at N = 4, beta = 10: F(1) = 4, F(2) = 10, F(3) = 18.
        let beta = rat(10);
        for (j, expect) in [(1u64, 4i64), (2, 10), (3, 18)] {
            let key = dispersion(DispersionFamily::Fi, j as usize, 4).unwrap();
            assert_eq!(key.a, j);
            assert_eq!(key.value(&beta), rat(expect));
        }
        assert_eq!(
            dispersion(DispersionFamily::HaldaneShastry, 2, 4).unwrap(),
            EnergyKey { a: 0, b: 4 }
        );
        assert_eq!(
            dispersion(DispersionFamily::PolychronakosFrahm, 3, 4).unwrap(),
            EnergyKey { a: 0, b: 3 }
        );
        assert!(dispersion(DispersionFamily::Fi, 0, 4).is_err());
        assert!(dispersion(DispersionFamily::Fi, 4, 4).is_err());
    }

    #[test]
    fn motif_rules_follow_neighbour_comparisons() {
        let motif = motif_from_occupancies(&[0, 1, 0], 2, Epsilon::Ferro).unwrap();
        assert_eq!(motif.bits(), &[true, false]);
        let motif = motif_from_occupancies(&[0, 0, 0, 0], 2, Epsilon::Antiferro).unwrap();
        assert_eq!(motif.bits(), &[true, true, true]);
        assert!(motif_from_occupancies(&[0, 2], 2, Epsilon::Ferro).is_err());
        assert!(motif_from_occupancies(&[], 2, Epsilon::Ferro).is_err());
    }

    #[test]
    fn motif_energy_sums_dispersion_terms() {
        // N = 4, motif (1,0,1): F(1) + F(3) = (1,-6) + (3,-12) = (4,-18).
        let motif = Motif::new(vec![true, false, true]);
        assert_eq!(motif_energy(&motif), EnergyKey { a: 4, b: -18 });
        assert_eq!(motif_energy(&Motif::all_zeros(4)), EnergyKey::ZERO);
        assert_eq!(full_motif_key(4), EnergyKey { a: 6, b: -28 });
    }

    #[test]
    fn two_site_tables_match_closed_form() {
        // N = 2, m = 2: antiferro {0:1, beta-2:3}, ferro {0:3, beta-2:1}.
        let beta = rat(6);
        let anti = spectrum(2, 2, Epsilon::Antiferro, &beta).unwrap();
        assert_table_is(&anti, &[(0, 0, 1), (1, -2, 3)]);
        let ferro = spectrum(2, 2, Epsilon::Ferro, &beta).unwrap();
        assert_table_is(&ferro, &[(0, 0, 3), (1, -2, 1)]);
        // Same structure at rational beta.
        let beta = parse_rational("13/2").unwrap();
        let anti = spectrum(2, 2, Epsilon::Antiferro, &beta).unwrap();
        assert_table_is(&anti, &[(0, 0, 1), (1, -2, 3)]);
    }

    #[test]
    fn single_site_table_is_trivial() {
        let table = spectrum(1, 3, Epsilon::Ferro, &rat(5)).unwrap();
        assert_table_is(&table, &[(0, 0, 3)]);
    }

    #[test]
    fn four_site_frozen_tables() {
        let beta = rat(10);
        let anti = spectrum(4, 2, Epsilon::Antiferro, &beta).unwrap();
        assert_table_is(
            &anti,
            &[(2, -10, 1), (3, -16, 3), (4, -18, 4), (5, -22, 3), (6, -28, 5)],
        );
        let ferro = spectrum(4, 2, Epsilon::Ferro, &beta).unwrap();
        assert_table_is(&ferro, &[(0, 0, 5), (1, -6, 3), (2, -10, 4), (3, -12, 3), (4, -18, 1)]);
        // Energies: antiferro {10,14,22,28,32}, ferro {0,4,10,18,22}.
        let vals: Vec<i64> = anti
            .levels()
            .iter()
            .map(|l| l.value.to_integer().to_string().parse().unwrap())
            .collect();
        assert_eq!(vals, vec![10, 14, 22, 28, 32]);
    }

    #[test]
    fn dp_equals_bruteforce_on_a_grid() {
        for n in 2..=7usize {
            for m in [2usize, 3] {
                for eps in [Epsilon::Ferro, Epsilon::Antiferro] {
                    let betas = [
                        rat(2 * n as i64 + 1),
                        rat(2 * n as i64 + 2),
                        Rational::new(BigInt::from(4 * n as i64 + 1), BigInt::from(2)),
                    ];
                    for beta in betas {
                        let dp = spectrum(n, m, eps, &beta).unwrap();
                        let bf = spectrum_bruteforce(n, m, eps, &beta).unwrap();
                        assert_eq!(dp, bf, "mismatch at N={n}, m={m}, eps={eps:?}, beta={beta}");
                    }
                }
            }
        }
    }

    #[test]
    fn total_degeneracy_is_enforced() {
        let t = spectrum(6, 3, Epsilon::Antiferro, &rat(14)).unwrap();
        assert_eq!(t.total_degeneracy(), BigUint::from(3u32).pow(6));
    }

    #[test]
    fn duality_reflects_tables_exactly() {
        for n in [2usize, 3, 5, 6] {
            for m in [2usize, 3] {
                let beta = rat(2 * n as i64 + 2);
                let ferro = spectrum(n, m, Epsilon::Ferro, &beta).unwrap();
                let anti = spectrum(n, m, Epsilon::Antiferro, &beta).unwrap();
                assert_eq!(dual_spectrum(&ferro), anti);
                assert_eq!(dual_spectrum(&anti), ferro);
                assert_eq!(dual_spectrum(&dual_spectrum(&ferro)), ferro);
            }
        }
    }

    #[test]
    fn duality_on_rational_beta() {
        let beta = parse_rational("21/2").unwrap();
        let ferro = spectrum(5, 2, Epsilon::Ferro, &beta).unwrap();
        let anti = spectrum(5, 2, Epsilon::Antiferro, &beta).unwrap();
        assert_eq!(dual_spectrum(&ferro), anti);
    }

    #[test]
    fn extremes_frozen_case() {
        let beta = rat(10);
        let ext = extremes(4, 2, &beta).unwrap();
        assert_eq!(ext.min_motif.bits(), &[false, true, false]);
        assert_eq!(ext.e_min_value, rat(10));
        assert_eq!(ext.e_max_value, rat(32));
        assert_eq!(ext.j_range, (2, 6));
        // The DP table's extremal levels agree.
        let table = spectrum(4, 2, Epsilon::Antiferro, &beta).unwrap();
        assert_eq!(table.min_level().unwrap().value, ext.e_min_value);
        assert_eq!(table.max_level().unwrap().value, ext.e_max_value);
    }

    #[test]
    fn extremes_vanish_when_m_reaches_n() {
        // m >= N admits a strictly increasing occupancy sequence: E_min = 0.
        for (n, m) in [(2usize, 2usize), (3, 3), (3, 5)] {
            let ext = extremes(n, m, &rat(3 * n as i64)).unwrap();
            assert_eq!(ext.e_min_value, Rational::zero());
            assert_eq!(ext.j_range.1, (n * (n - 1) / 2) as u64);
        }
    }

    #[test]
    fn extreme_levels_bound_every_table() {
        for n in 2..=7usize {
            for m in [2usize, 3] {
                let beta = rat(2 * n as i64 + 1);
                let ext = extremes(n, m, &beta).unwrap();
                let table = spectrum(n, m, Epsilon::Antiferro, &beta).unwrap();
                assert_eq!(table.min_level().unwrap().value, ext.e_min_value);
                assert_eq!(table.max_level().unwrap().value, ext.e_max_value);
            }
        }
    }

    #[test]
    fn partition_routes_agree() {
        for (n, m, eps) in [
            (4usize, 2usize, Epsilon::Antiferro),
            (4, 2, Epsilon::Ferro),
            (6, 3, Epsilon::Antiferro),
            (8, 2, Epsilon::Ferro),
        ] {
            let beta = rat(2 * n as i64 + 2);
            let table = spectrum(n, m, eps, &beta).unwrap();
            for q in [1e-3, 0.2, 0.5, 0.9, 0.999] {
                let eval = partition_eval(&table, q).unwrap();
                assert!(
                    eval.rel_diff <= 1e-10,
                    "route disagreement {:.3e} at N={n}, m={m}, q={q}",
                    eval.rel_diff
                );
            }
        }
    }

    #[test]
    fn partition_two_site_closed_form() {
        // Z = 1 + 3 q^{beta-2} for the antiferro two-site chain.
        let beta = rat(6);
        let table = spectrum(2, 2, Epsilon::Antiferro, &beta).unwrap();
        for q in [0.1, 0.5, 0.8] {
            let eval = partition_eval(&table, q).unwrap();
            let expect = 1.0 + 3.0 * q.powf(4.0);
            assert!((eval.z_table - expect).abs() <= 1e-12 * expect);
            assert!((eval.z_composition - expect).abs() <= 1e-10 * expect);
        }
    }

    #[test]
    fn partition_small_q_is_dominated_by_the_ground_level() {
        let beta = rat(10);
        let table = spectrum(4, 2, Epsilon::Antiferro, &beta).unwrap();
        let ground = table.min_level().unwrap();
        let q = 1e-3;
        let eval = partition_eval(&table, q).unwrap();
        let leading = ground.degeneracy.to_f64().unwrap()
            * q.powf(ground.value.to_f64().unwrap());
        assert!((eval.z_table / leading - 1.0).abs() < 1e-3);
    }

    #[test]
    fn partition_rejects_degenerate_q() {
        let table = spectrum(3, 2, Epsilon::Ferro, &rat(8)).unwrap();
        assert!(partition_eval(&table, 0.0).is_err());
        assert!(partition_eval(&table, 1.0).is_err());
        assert!(partition_eval(&table, 1.5).is_err());
    }

    #[test]
    fn composition_partial_sum_identity() {
        // The composition exponent sum telescopes to the dispersion at each
        // partial sum: sum_{j<=i} k_j (2 K_j - k_j + 1) = K_i (K_i + 1).
        for n in 2..=8usize {
            for mask in 0u64..(1 << (n - 1)) {
                let comp = Composition::from_boundary_mask(n, mask);
                assert_eq!(comp.total(), n);
                let sums = comp.partial_sums();
                let mut acc = 0i64;
                for (part, k_i) in comp.parts().iter().zip(sums.iter()) {
                    let (p, k) = (*part as i64, *k_i as i64);
                    acc += p * (2 * k - p + 1);
                    assert_eq!(acc, k * (k + 1));
                }
            }
        }
    }

    #[test]
    fn composition_degeneracies() {
        let comp = Composition::new(vec![1, 1]).unwrap();
        assert_eq!(composition_degeneracy(&comp, 2, Epsilon::Antiferro), BigUint::from(4u32));
        let comp = Composition::new(vec![2]).unwrap();
        assert_eq!(composition_degeneracy(&comp, 2, Epsilon::Antiferro), BigUint::from(1u32));
        assert_eq!(composition_degeneracy(&comp, 2, Epsilon::Ferro), BigUint::from(3u32));
        let comp = Composition::new(vec![3]).unwrap();
        assert_eq!(composition_degeneracy(&comp, 2, Epsilon::Antiferro), BigUint::zero());
    }

    #[test]
    fn parity_and_lattice_invariants() {
        for (n, m, eps) in [
            (5usize, 2usize, Epsilon::Antiferro),
            (6, 3, Epsilon::Ferro),
            (7, 2, Epsilon::Ferro),
        ] {
            for beta in [rat(2 * n as i64 + 1), rat(2 * n as i64 + 2)] {
                let table = spectrum(n, m, eps, &beta).unwrap();
                let even_beta = beta.to_integer().to_string().parse::<i64>().unwrap() % 2 == 0;
                for level in table.levels() {
                    // B components are always even; a bounded by the full motif.
                    assert_eq!(level.key.b.rem_euclid(2), 0);
                    assert!(level.key.a <= full_motif_key(n).a);
                    // Integer beta gives integer energies, even beta even ones.
                    assert!(level.value.is_integer());
                    if even_beta {
                        let v: BigInt = level.value.to_integer();
                        assert!((&v % BigInt::from(2)).is_zero());
                    }
                }
            }
        }
    }

    #[test]
    fn unmerged_mode_splits_lattice_collisions() {
        // At beta = 2N + 2 the dispersion is F(j) = j(j+3), so F(4) = F(2) +
        // F(3) = 28.  For N = 6, m = 3 the antiferro-realizable motifs
        // {1,4,5} and {1,2,3,5} then collide at E = 72 with lattice keys of
        // different mode sums (10 vs 11).
        let beta = rat(14);
        let opts =
            SpectrumOptions { merge_equal_energies: false, max_keys: DEFAULT_KEY_CAP };
        let merged = spectrum(6, 3, Epsilon::Antiferro, &beta).unwrap();
        let unmerged = spectrum_with(6, 3, Epsilon::Antiferro, &beta, &opts).unwrap();
        assert!(unmerged.len() > merged.len());
        assert_eq!(merged.total_degeneracy(), unmerged.total_degeneracy());
        // The merged level at the collision carries both lattice keys and
        // presents the smaller one.
        let value = rat(72);
        let slot = merged.constituents(&value).expect("expected a level at E = 72");
        assert!(slot.len() >= 2, "expected a lattice collision at E = 72");
        let keys: Vec<u64> = slot.iter().map(|(k, _)| k.a).collect();
        assert!(keys.contains(&10) && keys.contains(&11));
        let merged_level =
            merged.levels().into_iter().find(|l| l.value == value).unwrap();
        assert_eq!(merged_level.key.a, 10);
    }

    #[test]
    fn level_cap_is_enforced() {
        let opts = SpectrumOptions { merge_equal_energies: true, max_keys: 3 };
        let err = spectrum_with(6, 2, Epsilon::Antiferro, &rat(14), &opts).unwrap_err();
        assert!(matches!(err, FiError::Resource(_)));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn dp_matches_bruteforce_randomized(
            n in 2usize..7,
            m in 2usize..4,
            ferro in proptest::bool::ANY,
            beta_pick in 0usize..3,
        ) {
            let eps = if ferro { Epsilon::Ferro } else { Epsilon::Antiferro };
            let beta = match beta_pick {
                0 => rat(2 * n as i64 + 1),
                1 => rat(2 * n as i64 + 2),
                _ => Rational::new(BigInt::from(4 * n as i64 + 1), BigInt::from(2)),
            };
            let dp = spectrum(n, m, eps, &beta).unwrap();
            let bf = spectrum_bruteforce(n, m, eps, &beta).unwrap();
            prop_assert_eq!(dp, bf);
        }
    }
}
