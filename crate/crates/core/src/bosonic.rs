//! Exact quantum output distribution, sampling from it, and an independent
//! Fock-space brute-force oracle.
//!
//! The oracle never touches a permanent: it builds the second-quantized
//! Hamiltonian in the full n-boson Fock basis and evolves the initial basis
//! state directly. Agreement with the permanent route is the repo's central
//! correctness property.

use std::collections::HashMap;
use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;

use crate::dynamics::{expm_hermitian, HoppingSchedule, Propagator};
use crate::lattice::Configuration;
use crate::permanent::{permanent, submatrix_for_transition};
use crate::{Error, Result};

/// Enumeration guard for full distributions.
pub const ENUMERATION_GUARD: u64 = 1_000_000;
/// Fock-dimension guard for the brute-force oracle.
pub const FOCK_GUARD: u64 = 5_000;
/// Boson-count guard for single transition probabilities.
pub const BOSON_GUARD: usize = 10;

/// Probability table over all n-boson outcomes, in lexicographic
/// occupation order.
#[derive(Debug, Clone)]
pub struct OutcomeDistribution {
    pub n: u32,
    pub m: usize,
    pub entries: Vec<(Configuration, f64)>,
}

impl OutcomeDistribution {
    pub fn total_probability(&self) -> f64 {
        self.entries.iter().map(|(_, p)| p).sum()
    }

    pub fn probability_of(&self, cfg: &Configuration) -> f64 {
        self.entries
            .iter()
            .find(|(c, _)| c == cfg)
            .map_or(0.0, |(_, p)| *p)
    }

    /// CSV with header `occ,probability`, rows in lexicographic order.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("occ,probability\n");
        for (cfg, p) in &self.entries {
            writeln!(out, "{},{}", cfg.to_key(), p).unwrap();
        }
        out
    }
}

/// C(m+n-1, n), saturating at u64::MAX.
pub fn configuration_count(m: usize, n: u32) -> u64 {
    let mut acc: u64 = 1;
    for k in 1..=(n as u64) {
        let num = (m as u64 - 1 + k).min(u64::MAX);
        acc = match acc.checked_mul(num) {
            Some(v) => v / k,
            None => return u64::MAX,
        };
    }
    acc
}

/// All occupation vectors of `n` bosons on `m` modes in lexicographic order.
pub fn enumerate_configurations(m: usize, n: u32) -> Vec<Configuration> {
    let mut out = Vec::new();
    let mut current = vec![0u32; m];
    fill(&mut out, &mut current, 0, n);
    out
}

fn fill(out: &mut Vec<Configuration>, current: &mut Vec<u32>, pos: usize, remaining: u32) {
    if pos == current.len() - 1 {
        current[pos] = remaining;
        out.push(Configuration::new(current.clone()));
        current[pos] = 0;
        return;
    }
    for k in 0..=remaining {
        current[pos] = k;
        fill(out, current, pos + 1, remaining - k);
    }
    current[pos] = 0;
}

/// `|Per(A)|^2 / (r! s!)` for the transition `r -> s` under `prop`.
pub fn transition_probability(
    prop: &Propagator,
    r: &Configuration,
    s: &Configuration,
) -> Result<f64> {
    let n = r.total() as usize;
    if n > BOSON_GUARD {
        return Err(Error::TooManyBosons(n, BOSON_GUARD));
    }
    let sub = submatrix_for_transition(prop, r, s)?;
    let per = permanent(&sub.a)?;
    let norm = (r.occupation_factorial() * s.occupation_factorial()) as f64;
    Ok(per.norm_sqr() / norm)
}

/// The full distribution D_U over all n-boson outcomes.
pub fn exact_distribution(prop: &Propagator, r: &Configuration) -> Result<OutcomeDistribution> {
    let m = prop.num_modes();
    let n = r.total();
    if n as usize > BOSON_GUARD {
        return Err(Error::TooManyBosons(n as usize, BOSON_GUARD));
    }
    let count = configuration_count(m, n);
    if count > ENUMERATION_GUARD {
        return Err(Error::EnumerationGuard(count, ENUMERATION_GUARD));
    }
    let configs = enumerate_configurations(m, n);
    let entries: Vec<(Configuration, f64)> = configs
        .into_par_iter()
        .map(|s| {
            let p = transition_probability(prop, r, &s)?;
            Ok((s, p))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(OutcomeDistribution { n, m, entries })
}

/// Inverse-CDF sampling over the fixed lexicographic order.
pub fn sample_exact(
    dist: &OutcomeDistribution,
    seed: u64,
    count: usize,
) -> Result<Vec<Configuration>> {
    if dist.entries.is_empty() {
        return Err(Error::EmptyDistribution);
    }
    let total = dist.total_probability();
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let u: f64 = rng.gen_range(0.0..total);
        let mut acc = 0.0;
        let mut chosen = &dist.entries[dist.entries.len() - 1].0;
        for (cfg, p) in &dist.entries {
            acc += p;
            if u < acc {
                chosen = cfg;
                break;
            }
        }
        out.push(chosen.clone());
    }
    Ok(out)
}

/// First-principles many-body evolution in the Fock basis.
pub fn fock_oracle_distribution(
    sched: &HoppingSchedule,
    r: &Configuration,
) -> Result<OutcomeDistribution> {
    let m = r.occ.len();
    let n = r.total();
    let dim = configuration_count(m, n);
    if dim > FOCK_GUARD {
        return Err(Error::FockGuard(dim, FOCK_GUARD));
    }
    let basis = enumerate_configurations(m, n);
    let index: HashMap<&Configuration, usize> =
        basis.iter().enumerate().map(|(i, c)| (c, i)).collect();
    let dim = basis.len();

    let start = *index
        .get(r)
        .ok_or_else(|| Error::Config("initial configuration outside basis".into()))?;
    let mut state = DVector::<Complex64>::zeros(dim);
    state[start] = Complex64::new(1.0, 0.0);

    for seg in &sched.segments {
        if seg.j.nrows() != m {
            return Err(Error::DimensionMismatch { expected: m, got: seg.j.nrows() });
        }
        let h = fock_hamiltonian(&basis, &index, &seg.j);
        let u = expm_hermitian(&h, seg.duration)?;
        state = u * state;
    }

    let entries: Vec<(Configuration, f64)> = basis
        .iter()
        .enumerate()
        .map(|(i, cfg)| (cfg.clone(), state[i].norm_sqr()))
        .collect();
    Ok(OutcomeDistribution { n, m, entries })
}

/// Second-quantized hopping Hamiltonian in the given basis: off-diagonal
/// element `J_ij sqrt(s_j (s_i + 1))` between states differing by one hop,
/// diagonal `sum_i J_ii s_i`.
fn fock_hamiltonian(
    basis: &[Configuration],
    index: &HashMap<&Configuration, usize>,
    j: &DMatrix<Complex64>,
) -> DMatrix<Complex64> {
    let dim = basis.len();
    let m = j.nrows();
    let mut h = DMatrix::<Complex64>::zeros(dim, dim);
    for (col, cfg) in basis.iter().enumerate() {
        let mut diag = Complex64::new(0.0, 0.0);
        for site in 0..m {
            diag += j[(site, site)] * cfg.occ[site] as f64;
        }
        h[(col, col)] += diag;
        for src in 0..m {
            if cfg.occ[src] == 0 {
                continue;
            }
            for dst in 0..m {
                if dst == src || j[(dst, src)].norm() == 0.0 {
                    continue;
                }
                // a_dst^dagger a_src |cfg>
                let amp = ((cfg.occ[src] as f64) * (cfg.occ[dst] as f64 + 1.0)).sqrt();
                let mut hopped = cfg.occ.clone();
                hopped[src] -= 1;
                hopped[dst] += 1;
                let target = index[&Configuration::new(hopped)];
                h[(target, col)] += j[(dst, src)] * amp;
            }
        }
    }
    h
}
