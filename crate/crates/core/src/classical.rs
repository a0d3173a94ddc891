//! The distinguishable-particle sampler and its exact output distribution.
//!
//! Each boson walks independently for one step of the Markov process
//! `P_kl = |R_kl|^2`; the resulting distribution D_DP is the classical
//! stand-in for D_U at short times.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;

use crate::bosonic::{
    configuration_count, enumerate_configurations, OutcomeDistribution, ENUMERATION_GUARD,
};
use crate::dynamics::Propagator;
use crate::lattice::Configuration;
use crate::permanent::permanent_real;
use crate::{Error, Result};

pub const STOCHASTIC_TOL: f64 = 1e-8;

/// Doubly stochastic matrix of one-step hop probabilities.
#[derive(Debug, Clone)]
pub struct MarkovMatrix {
    pub p: DMatrix<f64>,
}

impl MarkovMatrix {
    pub fn num_sites(&self) -> usize {
        self.p.nrows()
    }

    /// Max deviation of any row or column sum from 1.
    pub fn stochastic_defect(&self) -> f64 {
        let m = self.p.nrows();
        let mut max = 0.0f64;
        for i in 0..m {
            let row: f64 = (0..m).map(|j| self.p[(i, j)]).sum();
            let col: f64 = (0..m).map(|j| self.p[(j, i)]).sum();
            max = max.max((row - 1.0).abs()).max((col - 1.0).abs());
        }
        max
    }
}

/// `P[k][l] = |R[k][l]|^2`. Rejects non-unitary input.
pub fn markov_matrix(prop: &Propagator) -> Result<MarkovMatrix> {
    let p = prop.r.map(|z| z.norm_sqr());
    let mm = MarkovMatrix { p };
    let defect = mm.stochastic_defect();
    if defect > STOCHASTIC_TOL {
        return Err(Error::NotUnitary(defect));
    }
    Ok(mm)
}

/// One sample from D_DP: each input boson draws its destination from the
/// categorical distribution on its row of P, by inverse CDF over
/// increasing site index.
pub fn sample_dp(p: &MarkovMatrix, r: &Configuration, seed: u64) -> Configuration {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    sample_dp_with(p, r, &mut rng)
}

/// As `sample_dp`, drawing from a caller-owned generator.
pub fn sample_dp_with(p: &MarkovMatrix, r: &Configuration, rng: &mut ChaCha12Rng) -> Configuration {
    let m = p.num_sites();
    let mut occ = vec![0u32; m];
    for site in r.site_list() {
        let u: f64 = rng.gen_range(0.0..1.0);
        let mut acc = 0.0;
        let mut dest = m - 1;
        for l in 0..m {
            acc += p.p[(site, l)];
            if u < acc {
                dest = l;
                break;
            }
        }
        occ[dest] += 1;
    }
    Configuration::new(occ)
}

/// The exact distribution D_DP over all outcomes: `Per(B)/s!` where B takes
/// `s_l` copies of column l and one row per input boson from P.
pub fn dp_distribution(p: &MarkovMatrix, r: &Configuration) -> Result<OutcomeDistribution> {
    let m = p.num_sites();
    let n = r.total();
    let count = configuration_count(m, n);
    if count > ENUMERATION_GUARD {
        return Err(Error::EnumerationGuard(count, ENUMERATION_GUARD));
    }
    let ins = r.site_list();
    let entries: Vec<(Configuration, f64)> = enumerate_configurations(m, n)
        .into_par_iter()
        .map(|s| {
            let outs = s.site_list();
            let b = DMatrix::from_fn(ins.len(), ins.len(), |row, col| p.p[(ins[row], outs[col])]);
            let per = permanent_real(&b)?;
            let prob = per / s.occupation_factorial() as f64;
            Ok((s, prob))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(OutcomeDistribution { n, m, entries })
}
