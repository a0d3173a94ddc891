//! End-to-end acceptance battery. Each test prints one PASS/FAIL line
//! (visible with `cargo test --test acceptance -- --nocapture`).

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use bosonlab::bosonic::{
    exact_distribution, fock_oracle_distribution, sample_exact, OutcomeDistribution,
};
use bosonlab::bounds::{
    lattice_tail_sum, localization_check, lr_envelope_check, scaled_lattice_sum, tvd, BoundParams,
};
use bosonlab::classical::{dp_distribution, markov_matrix, sample_dp_with, MarkovMatrix};
use bosonlab::compiler::{circuit_to_schedule, clements_decompose, haar_unitary, reconstruct};
use bosonlab::dynamics::{
    anderson_hopping, beamsplitter_schedule, evolve, random_hopping, validate_schedule,
    HoppingSchedule, Propagator, Segment,
};
use bosonlab::lattice::{Configuration, LatticeSpec};
use bosonlab::permanent::{permanent, permanent_real};

fn report(id: usize, name: &str, pass: bool) {
    println!(
        "ACCEPTANCE {id:2} ({name}): {}",
        if pass { "PASS" } else { "FAIL" }
    );
}

fn max_abs_diff(p: &OutcomeDistribution, q: &OutcomeDistribution) -> f64 {
    p.entries
        .iter()
        .zip(&q.entries)
        .map(|((ca, pa), (cb, pb))| {
            assert_eq!(ca, cb);
            (pa - pb).abs()
        })
        .fold(0.0, f64::max)
}

fn clean_chain_tvd(m: usize, positions: &[usize], t: f64) -> f64 {
    let spec = LatticeSpec::chain(m, positions).unwrap();
    let mut occ = vec![0u32; m];
    for &p in positions {
        occ[p] = 1;
    }
    let r = Configuration::new(occ);
    let j = anderson_hopping(&spec, 0.0, 0);
    let prop = evolve(&HoppingSchedule::single(j, t)).unwrap();
    let du = exact_distribution(&prop, &r).unwrap();
    let ddp = dp_distribution(&markov_matrix(&prop).unwrap(), &r).unwrap();
    tvd(&du, &ddp).unwrap()
}

#[test]
fn acceptance_01_hong_ou_mandel_ground_truth() {
    let start = std::time::Instant::now();
    let prop = evolve(&beamsplitter_schedule(2, 0, 1).unwrap()).unwrap();
    let r = Configuration::new(vec![1, 1]);
    let du = exact_distribution(&prop, &r).unwrap();
    let ddp = dp_distribution(&markov_matrix(&prop).unwrap(), &r).unwrap();

    let expect_u = [
        (Configuration::new(vec![2, 0]), 0.5),
        (Configuration::new(vec![0, 2]), 0.5),
        (Configuration::new(vec![1, 1]), 0.0),
    ];
    let expect_dp = [
        (Configuration::new(vec![2, 0]), 0.25),
        (Configuration::new(vec![0, 2]), 0.25),
        (Configuration::new(vec![1, 1]), 0.5),
    ];
    let mut pass = true;
    for (cfg, p) in &expect_u {
        pass &= (du.probability_of(cfg) - p).abs() < 1e-12;
    }
    for (cfg, p) in &expect_dp {
        pass &= (ddp.probability_of(cfg) - p).abs() < 1e-12;
    }
    let distance = tvd(&du, &ddp).unwrap();
    pass &= (distance - 0.5).abs() < 1e-12;
    pass &= start.elapsed().as_secs_f64() < 1.0;
    report(1, "Hong-Ou-Mandel ground truth", pass);
    assert!(pass, "tvd = {distance}");
}

#[test]
fn acceptance_02_oracle_equivalence() {
    let mut worst = 0.0f64;
    for trial in 0..20u64 {
        let m = 4 + (trial % 3) as usize; // 4..6
        let n = 2 + (trial % 2) as usize; // 2..3
        let spec = LatticeSpec::chain(m, &[0]).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(900 + trial);
        let segments: Vec<Segment> = (0..3)
            .map(|k| Segment {
                duration: rng.gen_range(0.2..0.9),
                j: random_hopping(&spec, trial * 10 + k),
            })
            .collect();
        let sched = HoppingSchedule::new(segments);
        let mut occ = vec![0u32; m];
        occ[0] = 1;
        occ[m - 1] += 1;
        if n == 3 {
            occ[m / 2] += 1;
        }
        let r = Configuration::new(occ);
        let prop = evolve(&sched).unwrap();
        let exact = exact_distribution(&prop, &r).unwrap();
        let oracle = fock_oracle_distribution(&sched, &r).unwrap();
        worst = worst.max(max_abs_diff(&exact, &oracle));
    }
    let pass = worst <= 1e-8;
    report(2, "permanent formula vs Fock-space oracle", pass);
    assert!(pass, "max entrywise difference {worst}");
}

/// Direct sum over permutations, O(k! k).
fn naive_permanent(a: &DMatrix<Complex64>) -> Complex64 {
    let k = a.nrows();
    let mut idx: Vec<usize> = (0..k).collect();
    let mut total = Complex64::new(0.0, 0.0);
    // Heap's algorithm, iterative.
    let mut c = vec![0usize; k];
    let term = |idx: &[usize]| -> Complex64 {
        idx.iter()
            .enumerate()
            .map(|(i, &j)| a[(i, j)])
            .product()
    };
    total += term(&idx);
    let mut i = 0;
    while i < k {
        if c[i] < i {
            if i % 2 == 0 {
                idx.swap(0, i);
            } else {
                idx.swap(c[i], i);
            }
            total += term(&idx);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    total
}

#[test]
fn acceptance_03_permanent_kernel() {
    let mut rng = ChaCha12Rng::seed_from_u64(42);
    let mut pass = true;
    for _ in 0..100 {
        let k = rng.gen_range(1..=6);
        let a = DMatrix::from_fn(k, k, |_, _| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let fast = permanent(&a).unwrap();
        let slow = naive_permanent(&a);
        let rel = (fast - slow).norm() / slow.norm().max(1e-300);
        pass &= rel <= 1e-10;
    }
    let big = DMatrix::from_fn(20, 20, |_, _| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    let start = std::time::Instant::now();
    let value = permanent(&big).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    pass &= value.norm() > 0.0 && elapsed < 5.0;
    report(3, "permanent kernel vs naive expansion", pass);
    assert!(pass, "k=20 took {elapsed}s");
}

#[test]
fn acceptance_04_dp_bookkeeping() {
    let mut worst = 0.0f64;
    for trial in 0..20u64 {
        let m = 4 + (trial % 3) as usize;
        let n = 2 + (trial % 2) as usize;
        let spec = LatticeSpec::chain(m, &[0]).unwrap();
        let prop = evolve(&HoppingSchedule::single(
            random_hopping(&spec, 700 + trial),
            1.1,
        ))
        .unwrap();
        let p = markov_matrix(&prop).unwrap();
        let mut occ = vec![0u32; m];
        occ[0] += 1;
        occ[m - 1] += 1;
        if n == 3 {
            occ[0] += 1; // repeated input site exercises r! bookkeeping
        }
        let r = Configuration::new(occ);
        let dist = dp_distribution(&p, &r).unwrap();
        let oracle = dp_tuple_oracle(&p, &r);
        for (cfg, prob) in &dist.entries {
            let expect = oracle.probability_of(cfg);
            worst = worst.max((prob - expect).abs());
        }
    }
    let pass = worst <= 1e-12;
    report(4, "distinguishable distribution vs tuple oracle", pass);
    assert!(pass, "max difference {worst}");
}

/// Aggregate all m^n ordered destination tuples.
fn dp_tuple_oracle(p: &MarkovMatrix, r: &Configuration) -> OutcomeDistribution {
    use std::collections::HashMap;
    let m = p.num_sites();
    let ins = r.site_list();
    let n = ins.len();
    let mut acc: HashMap<Configuration, f64> = HashMap::new();
    let total = (m as u64).pow(n as u32);
    for code in 0..total {
        let mut rest = code;
        let mut occ = vec![0u32; m];
        let mut prob = 1.0;
        for &src in &ins {
            let dest = (rest % m as u64) as usize;
            rest /= m as u64;
            prob *= p.p[(src, dest)];
            occ[dest] += 1;
        }
        *acc.entry(Configuration::new(occ)).or_default() += prob;
    }
    let entries = acc.into_iter().collect();
    OutcomeDistribution { n: r.total(), m, entries }
}

#[test]
fn acceptance_05_samplers_match_exact() {
    use std::collections::HashMap;
    let m = 5;
    let spec = LatticeSpec::chain(m, &[0]).unwrap();
    let prop = evolve(&HoppingSchedule::single(random_hopping(&spec, 5), 1.4)).unwrap();
    let r = Configuration::new(vec![1, 0, 0, 1, 0]);
    let total = 100_000usize;

    let du = exact_distribution(&prop, &r).unwrap();
    assert!(du.entries.len() <= 500);
    let samples = sample_exact(&du, 123, total).unwrap();
    let mut counts: HashMap<&Configuration, usize> = HashMap::new();
    for s in &samples {
        *counts.entry(s).or_default() += 1;
    }
    let tvd_exact: f64 = du
        .entries
        .iter()
        .map(|(cfg, p)| (p - *counts.get(cfg).unwrap_or(&0) as f64 / total as f64).abs())
        .sum::<f64>()
        / 2.0;

    let p = markov_matrix(&prop).unwrap();
    let ddp = dp_distribution(&p, &r).unwrap();
    let mut rng = ChaCha12Rng::seed_from_u64(321);
    let mut counts_dp: HashMap<Configuration, usize> = HashMap::new();
    for _ in 0..total {
        *counts_dp.entry(sample_dp_with(&p, &r, &mut rng)).or_default() += 1;
    }
    let tvd_dp: f64 = ddp
        .entries
        .iter()
        .map(|(cfg, p)| (p - *counts_dp.get(cfg).unwrap_or(&0) as f64 / total as f64).abs())
        .sum::<f64>()
        / 2.0;

    let pass = tvd_exact < 0.02 && tvd_dp < 0.02;
    report(5, "samplers track their exact distributions", pass);
    assert!(pass, "empirical tvd exact {tvd_exact}, dp {tvd_dp}");
}

#[test]
fn acceptance_06_unitarity_and_convention() {
    let m = 6;
    let spec = LatticeSpec::chain(m, &[0]).unwrap();
    let mut rng = ChaCha12Rng::seed_from_u64(606);
    let mut worst = 0.0f64;
    for trial in 0..100u64 {
        let segments: Vec<Segment> = (0..20)
            .map(|k| Segment {
                duration: rng.gen_range(0.05..0.5),
                j: random_hopping(&spec, trial * 100 + k),
            })
            .collect();
        let prop = evolve(&HoppingSchedule::new(segments)).unwrap();
        worst = worst.max(prop.unitarity_defect());
    }
    let mut pass = worst <= 1e-9;

    // Sign and ordering convention pinned by the balanced beamsplitter.
    let bs = evolve(&beamsplitter_schedule(2, 0, 1).unwrap()).unwrap();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let expect = [[s, -s], [s, s]];
    for i in 0..2 {
        for j in 0..2 {
            pass &= (bs.r[(i, j)] - Complex64::new(expect[i][j], 0.0)).norm() < 1e-12;
        }
    }
    report(6, "unitarity and propagator convention", pass);
    assert!(pass, "max unitarity defect {worst}");
}

/// A full d-dimensional grid as a LatticeSpec (every cell an ordinary site).
fn grid_spec(side: usize) -> LatticeSpec {
    let mut coords = Vec::new();
    for x in 0..side {
        for y in 0..side {
            coords.push(vec![x as i64, y as i64]);
        }
    }
    let m = coords.len();
    LatticeSpec {
        d: 2,
        n: 1,
        beta: 1.0,
        c1: m as f64,
        m,
        side,
        coords,
        ancilla_coords: Vec::new(),
        occupied: vec![0],
        length_scale: side as f64 / 2.0,
    }
}

#[test]
fn acceptance_07_lieb_robinson_envelope() {
    let times = [0.5, 1.0, 2.0, 5.0];
    let mut pass = true;
    let mut total_violations = 0usize;

    let chain = LatticeSpec::chain(40, &[0]).unwrap();
    let params1 = BoundParams::for_dimension(1);
    for seed in 0..3u64 {
        let j = random_hopping(&chain, seed);
        for &t in &times {
            let prop = evolve(&HoppingSchedule::single(j.clone(), t)).unwrap();
            let rep = lr_envelope_check(&prop, t, &params1, &chain).unwrap();
            total_violations += rep.violations.len();
        }
    }

    let grid = grid_spec(6);
    let params2 = BoundParams::for_dimension(2);
    for seed in 0..3u64 {
        let j = random_hopping(&grid, 50 + seed);
        for &t in &times {
            let prop = evolve(&HoppingSchedule::single(j.clone(), t)).unwrap();
            let rep = lr_envelope_check(&prop, t, &params2, &grid).unwrap();
            total_violations += rep.violations.len();
        }
    }
    pass &= total_violations == 0;
    report(7, "Lieb-Robinson light cone never violated", pass);
    assert!(pass, "{total_violations} envelope violations");
}

#[test]
fn acceptance_08_easy_regime_decay() {
    let start = std::time::Instant::now();
    // Clean chain, n = 2, t = 1: distance between bosons set directly.
    let tvds: Vec<f64> = [6usize, 10, 14]
        .iter()
        .map(|&sep| clean_chain_tvd(21, &[3, 3 + sep], 1.0))
        .collect();
    let mut pass = tvds[0] > tvds[1] && tvds[1] > tvds[2];
    pass &= tvds[2] <= 0.1 * tvds[0];
    pass &= start.elapsed().as_secs_f64() < 120.0;
    report(8, "tvd decays exponentially with separation", pass);
    assert!(pass, "tvd at separations 6/10/14: {tvds:?}");
}

#[test]
fn acceptance_09_crossover_trend() {
    let early = clean_chain_tvd(23, &[3, 19], 1.0);
    let late = clean_chain_tvd(23, &[3, 19], 20.0);
    let pass = late >= 100.0 * early;
    report(9, "easy-to-hard crossover in time", pass);
    assert!(pass, "tvd(t=1) = {early}, tvd(t=20) = {late}");
}

#[test]
fn acceptance_10_anderson_easiness() {
    let m = 41;
    let w = 10.0;
    let times = [10.0, 25.0, 50.0];
    let seeds: Vec<u64> = (0..10).collect();

    let median = |mut v: Vec<f64>| -> f64 {
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v[v.len() / 2]
    };

    let run = |positions: &[usize]| -> (Vec<f64>, Vec<f64>) {
        let spec = LatticeSpec::chain(m, positions).unwrap();
        let mut occ = vec![0u32; m];
        for &p in positions {
            occ[p] = 1;
        }
        let r = Configuration::new(occ);
        let mut tvds = Vec::new();
        let mut xi_medians = Vec::new();
        for &t in &times {
            let mut xis = Vec::new();
            for &seed in &seeds {
                let j = anderson_hopping(&spec, w, seed);
                let prop = evolve(&HoppingSchedule::single(j, t)).unwrap();
                let du = exact_distribution(&prop, &r).unwrap();
                let ddp = dp_distribution(&markov_matrix(&prop).unwrap(), &r).unwrap();
                tvds.push(tvd(&du, &ddp).unwrap());
                xis.push(localization_check(&prop, &spec).unwrap().fitted_xi);
            }
            xi_medians.push(median(xis));
        }
        (tvds, xi_medians)
    };

    let (far_tvds, far_xis) = run(&[10, 30]); // separation 20
    let (near_tvds, _) = run(&[18, 22]); // separation 4

    let far_median = median(far_tvds);
    let near_median = median(near_tvds);
    let mut pass = far_median <= 0.1 * near_median;

    let mean_xi: f64 = far_xis.iter().sum::<f64>() / far_xis.len() as f64;
    for xi in &far_xis {
        pass &= (xi - mean_xi).abs() <= 0.2 * mean_xi;
    }
    report(10, "disorder keeps distant bosons classical", pass);
    assert!(
        pass,
        "median tvd far {far_median} vs near {near_median}; xi by time {far_xis:?}"
    );
}

#[test]
fn acceptance_11_lattice_sum_numerics() {
    let mut pass = true;
    // d = 1 closed form: ratio = 2 / (1 - e^{-1}).
    let closed = 2.0 / (1.0 - (-1.0f64).exp());
    for l in [5.0, 10.0, 20.0, 40.0] {
        let (_, ratio) = lattice_tail_sum(l, 1.0, 1);
        pass &= (ratio - closed).abs() < 1e-9;
    }
    // Rescaled sum: ratio = 2 e^{-2L} e^{2L} / (1 - e^{-2L}) = 2/(1 - e^{-2L}).
    for l in [1.0, 2.0, 3.0, 5.0] {
        let (_, ratio) = scaled_lattice_sum(l, 1.0, 1);
        let envelope = 2.1 / (1.0 - (-2.0 * l).exp());
        pass &= ratio <= envelope;
        if l >= 3.0 {
            pass &= ratio <= 2.1;
        }
    }
    // d in {2, 3}: ratio bounded over the L grid (max/min < 3).
    for d in [2usize, 3] {
        let ratios: Vec<f64> = [5.0, 10.0, 20.0, 40.0]
            .iter()
            .map(|&l| lattice_tail_sum(l, 1.0, d).1)
            .collect();
        let max = ratios.iter().cloned().fold(f64::MIN, f64::max);
        let min = ratios.iter().cloned().fold(f64::MAX, f64::min);
        pass &= max / min < 3.0;
    }
    report(11, "lattice tail sums match closed forms", pass);
    assert!(pass);
}

#[test]
fn acceptance_12_compiler_round_trip() {
    let mut pass = true;
    let mut worst_rec = 0.0f64;
    let mut worst_sched = 0.0f64;
    for trial in 0..50u64 {
        let m = [4usize, 8, 12][(trial % 3) as usize];
        let u = haar_unitary(m, 1200 + trial);
        let circuit = clements_decompose(&u).unwrap();
        pass &= circuit.gate_count() == m * (m - 1) / 2;
        pass &= circuit.depth() <= m;

        let rec = reconstruct(&circuit).unwrap();
        let rec_err = (&rec - &u).iter().map(|z| z.norm()).fold(0.0, f64::max);
        worst_rec = worst_rec.max(rec_err);

        let sched = circuit_to_schedule(&circuit).unwrap();
        let spec = LatticeSpec::chain(m, &[0]).unwrap();
        pass &= validate_schedule(&sched, &spec).unwrap().is_empty();
        let prop = evolve(&sched).unwrap();
        let sched_err = (&prop.r - &u).iter().map(|z| z.norm()).fold(0.0, f64::max);
        worst_sched = worst_sched.max(sched_err);
    }
    pass &= worst_rec <= 1e-8 && worst_sched <= 1e-8;
    report(12, "Clements mesh round trip", pass);
    assert!(
        pass,
        "reconstruction {worst_rec}, schedule {worst_sched}"
    );
}

#[test]
fn propagator_identity_sanity() {
    // Smoke check that the shared helpers behave on the trivial instance.
    let id = Propagator::identity(3);
    let r = Configuration::new(vec![1, 0, 1]);
    let du = exact_distribution(&id, &r).unwrap();
    assert!((du.probability_of(&r) - 1.0).abs() < 1e-12);
    let _ = permanent_real(&DMatrix::from_element(1, 1, 1.0)).unwrap();
}
