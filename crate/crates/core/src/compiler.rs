//! Decompose arbitrary unitaries into nearest-neighbor two-mode gates plus
//! phase gates, pack them into layers, and synthesize hopping schedules.
//!
//! Rectangular (Clements-style) mesh: m(m-1)/2 two-mode gates in at most m
//! layers, followed by one layer of single-mode phases. The gate
//! parametrization is fixed so that theta = pi/4, phi = 0 is the balanced
//! beamsplitter `(1/sqrt2) [[1, -1], [1, 1]]`.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::dynamics::{unitarity_defect, HoppingSchedule, Segment};
use crate::{Error, Result};

pub const MAX_COMPILE_SIZE: usize = 64;
pub const COMPILE_UNITARITY_TOL: f64 = 1e-10;

/// A two-mode gate on the adjacent pair `(pair, pair + 1)`.
///
/// Matrix on the pair: `[[e^{i phi} cos t, -sin t], [e^{i phi} sin t, cos t]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoModeGate {
    pub pair: usize,
    pub theta: f64,
    pub phi: f64,
}

/// Layered nearest-neighbor gate program targeting an m-mode unitary.
#[derive(Debug, Clone, PartialEq)]
pub struct CompiledCircuit {
    pub m: usize,
    /// Layers in application order; gates within a layer act on disjoint
    /// modes.
    pub layers: Vec<Vec<TwoModeGate>>,
    /// Final phase layer, applied last: mode k picks up `e^{i phases[k]}`.
    pub phases: Vec<f64>,
}

impl CompiledCircuit {
    pub fn gate_count(&self) -> usize {
        self.layers.iter().map(|l| l.len()).sum()
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    /// One line per gate: `layer,kind,i,j,theta,phi`.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        for (layer, gates) in self.layers.iter().enumerate() {
            for g in gates {
                writeln!(
                    out,
                    "{},bs,{},{},{},{}",
                    layer,
                    g.pair,
                    g.pair + 1,
                    g.theta,
                    g.phi
                )
                .unwrap();
            }
        }
        for (k, &alpha) in self.phases.iter().enumerate() {
            if alpha != 0.0 {
                writeln!(out, "{},phase,{},{},0,{}", self.layers.len(), k, k, alpha).unwrap();
            }
        }
        out
    }
}

fn gate_matrix(theta: f64, phi: f64) -> [[Complex64; 2]; 2] {
    let (s, c) = theta.sin_cos();
    let e = (Complex64::i() * phi).exp();
    [
        [e * c, Complex64::new(-s, 0.0)],
        [e * s, Complex64::new(c, 0.0)],
    ]
}

fn apply_gate_left(u: &mut DMatrix<Complex64>, g: &TwoModeGate) {
    let gm = gate_matrix(g.theta, g.phi);
    let (a, b) = (g.pair, g.pair + 1);
    for col in 0..u.ncols() {
        let top = u[(a, col)];
        let bot = u[(b, col)];
        u[(a, col)] = gm[0][0] * top + gm[0][1] * bot;
        u[(b, col)] = gm[1][0] * top + gm[1][1] * bot;
    }
}

/// Multiply the gate embeddings layer by layer (then the phase layer).
pub fn reconstruct(circuit: &CompiledCircuit) -> Result<DMatrix<Complex64>> {
    let m = circuit.m;
    if circuit.phases.len() != m {
        return Err(Error::InvalidCircuit(format!(
            "phase layer has {} entries for {} modes",
            circuit.phases.len(),
            m
        )));
    }
    let mut u = DMatrix::<Complex64>::identity(m, m);
    for (idx, layer) in circuit.layers.iter().enumerate() {
        let mut used = vec![false; m];
        for g in layer {
            if g.pair + 1 >= m {
                return Err(Error::InvalidCircuit(format!(
                    "gate pair ({}, {}) outside {} modes",
                    g.pair,
                    g.pair + 1,
                    m
                )));
            }
            if used[g.pair] || used[g.pair + 1] {
                return Err(Error::OverlappingGates(idx));
            }
            used[g.pair] = true;
            used[g.pair + 1] = true;
            apply_gate_left(&mut u, g);
        }
    }
    for (k, &alpha) in circuit.phases.iter().enumerate() {
        let phase = (Complex64::i() * alpha).exp();
        for col in 0..m {
            u[(k, col)] *= phase;
        }
    }
    Ok(u)
}

/// Decompose a unitary into the rectangular nearest-neighbor mesh.
pub fn clements_decompose(u: &DMatrix<Complex64>) -> Result<CompiledCircuit> {
    let m = u.nrows();
    if u.ncols() != m {
        return Err(Error::NotSquare { rows: m, cols: u.ncols() });
    }
    if m > MAX_COMPILE_SIZE {
        return Err(Error::InvalidCircuit(format!(
            "size {m} exceeds compile guard {MAX_COMPILE_SIZE}"
        )));
    }
    let defect = unitarity_defect(u);
    if defect > COMPILE_UNITARITY_TOL {
        return Err(Error::NotUnitary(defect));
    }
    if m == 0 {
        return Ok(CompiledCircuit { m, layers: Vec::new(), phases: Vec::new() });
    }

    let mut w = u.clone();
    let mut right_ops: Vec<TwoModeGate> = Vec::new();
    let mut left_ops: Vec<TwoModeGate> = Vec::new();

    // Zig-zag nulling of the lower triangle, antidiagonal by antidiagonal.
    for i in 0..m.saturating_sub(1) {
        if i % 2 == 0 {
            for j in 0..=i {
                let row = m - 1 - j;
                let col = i - j;
                // W <- W * G^dagger on columns (col, col+1); zero (row, col).
                let a = w[(row, col)];
                let b = w[(row, col + 1)];
                let (theta, phi) = if a.norm() == 0.0 {
                    (0.0, 0.0)
                } else {
                    (a.norm().atan2(b.norm()), a.arg() - b.arg())
                };
                let g = TwoModeGate { pair: col, theta, phi };
                apply_gate_right_adjoint(&mut w, &g);
                right_ops.push(g);
            }
        } else {
            for j in 0..=i {
                let row = m - 1 - i + j;
                let col = j;
                // W <- G * W on rows (row-1, row); zero (row, col).
                let a = w[(row, col)];
                let b = w[(row - 1, col)];
                let (theta, phi) = if a.norm() == 0.0 {
                    (0.0, 0.0)
                } else {
                    (a.norm().atan2(b.norm()), (-a).arg() - b.arg())
                };
                let g = TwoModeGate { pair: row - 1, theta, phi };
                apply_gate_left(&mut w, &g);
                left_ops.push(g);
            }
        }
    }

    // W is now diagonal: U = L_1^t ... L_p^t D R_q ... R_1.
    let mut diag: Vec<f64> = (0..m).map(|k| w[(k, k)].arg()).collect();

    // Pull each left gate's adjoint through the diagonal:
    // G^t(theta, phi) D = D' G(theta, phi') with
    //   phi' = alpha - beta + pi, alpha' = beta - phi + pi, beta' = beta.
    let mut pulled: Vec<TwoModeGate> = Vec::with_capacity(left_ops.len());
    for g in left_ops.iter().rev() {
        if g.theta == 0.0 && g.phi == 0.0 {
            continue;
        }
        let alpha = diag[g.pair];
        let beta = diag[g.pair + 1];
        let phi_new = wrap_angle(alpha - beta + std::f64::consts::PI);
        diag[g.pair] = wrap_angle(beta - g.phi + std::f64::consts::PI);
        diag[g.pair + 1] = beta;
        pulled.push(TwoModeGate { pair: g.pair, theta: g.theta, phi: phi_new });
    }

    // Applied order: right ops first, then the pulled left ops innermost
    // first, then the phase layer.
    let mut ordered: Vec<TwoModeGate> = right_ops;
    ordered.extend(pulled);
    ordered.retain(|g| g.theta != 0.0 || g.phi != 0.0);

    // Greedy ASAP layer packing.
    let mut layers: Vec<Vec<TwoModeGate>> = Vec::new();
    let mut next_free = vec![0usize; m];
    for g in ordered {
        let layer = next_free[g.pair].max(next_free[g.pair + 1]);
        if layer == layers.len() {
            layers.push(Vec::new());
        }
        layers[layer].push(g);
        next_free[g.pair] = layer + 1;
        next_free[g.pair + 1] = layer + 1;
    }

    let phases: Vec<f64> = diag
        .into_iter()
        .map(|a| if a.abs() < 1e-15 { 0.0 } else { a })
        .collect();
    Ok(CompiledCircuit { m, layers, phases })
}

fn apply_gate_right_adjoint(u: &mut DMatrix<Complex64>, g: &TwoModeGate) {
    // U <- U * G^dagger on columns (pair, pair+1).
    let gm = gate_matrix(g.theta, g.phi);
    let (a, b) = (g.pair, g.pair + 1);
    for row in 0..u.nrows() {
        let left = u[(row, a)];
        let right = u[(row, b)];
        // G^dagger columns: conj-transpose of gm.
        u[(row, a)] = left * gm[0][0].conj() + right * gm[0][1].conj();
        u[(row, b)] = left * gm[1][0].conj() + right * gm[1][1].conj();
    }
}

fn wrap_angle(x: f64) -> f64 {
    let mut y = x % std::f64::consts::TAU;
    if y > std::f64::consts::PI {
        y -= std::f64::consts::TAU;
    } else if y <= -std::f64::consts::PI {
        y += std::f64::consts::TAU;
    }
    y
}

/// Synthesize a hopping schedule realizing the circuit.
///
/// Each gate G(theta, phi) factors as the theta-rotation after a phase
/// `e^{i phi}` on its first mode; a layer shares one diagonal segment and
/// one rotation segment (couplings scaled so |J_ij| <= 1).
pub fn circuit_to_schedule(circuit: &CompiledCircuit) -> Result<HoppingSchedule> {
    let m = circuit.m;
    let mut segments: Vec<Segment> = Vec::new();
    for (idx, layer) in circuit.layers.iter().enumerate() {
        let mut used = vec![false; m];
        for g in layer {
            if g.pair + 1 >= m || used[g.pair] || used[g.pair + 1] {
                return Err(Error::OverlappingGates(idx));
            }
            used[g.pair] = true;
            used[g.pair + 1] = true;
        }
        // Phase part: diag(e^{i phi}) on first modes, via J_kk = -phi.
        if layer.iter().any(|g| g.phi != 0.0) {
            let mut j = DMatrix::<Complex64>::zeros(m, m);
            for g in layer {
                j[(g.pair, g.pair)] = Complex64::new(-g.phi, 0.0);
            }
            segments.push(Segment { duration: 1.0, j });
        }
        // Rotation part: shared segment of duration max(theta).
        let tau = layer.iter().map(|g| g.theta).fold(0.0f64, f64::max);
        if tau > 0.0 {
            let mut j = DMatrix::<Complex64>::zeros(m, m);
            for g in layer {
                let coupling = g.theta / tau;
                j[(g.pair, g.pair + 1)] = -Complex64::i() * coupling;
                j[(g.pair + 1, g.pair)] = Complex64::i() * coupling;
            }
            segments.push(Segment { duration: tau, j });
        }
    }
    if circuit.phases.iter().any(|&a| a != 0.0) {
        let mut j = DMatrix::<Complex64>::zeros(m, m);
        for (k, &alpha) in circuit.phases.iter().enumerate() {
            j[(k, k)] = Complex64::new(-alpha, 0.0);
        }
        segments.push(Segment { duration: 1.0, j });
    }
    Ok(HoppingSchedule::new(segments))
}

/// Depth and timing bookkeeping, with the hardness scale for context.
#[derive(Debug, Clone)]
pub struct DepthReport {
    pub layers: usize,
    pub gate_count: usize,
    pub schedule_time: f64,
    pub t_hard_scale: f64,
}

pub fn depth_report(
    circuit: &CompiledCircuit,
    n: usize,
    beta: f64,
    d: usize,
) -> Result<DepthReport> {
    let schedule = circuit_to_schedule(circuit)?;
    Ok(DepthReport {
        layers: circuit.depth(),
        gate_count: circuit.gate_count(),
        schedule_time: schedule.total_time(),
        t_hard_scale: (n as f64).powf(1.0 + beta / d as f64),
    })
}

/// Haar-random unitary from QR of a seeded complex Gaussian matrix.
pub fn haar_unitary(m: usize, seed: u64) -> DMatrix<Complex64> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut gauss = DMatrix::<Complex64>::zeros(m, m);
    for i in 0..m {
        for j in 0..m {
            // Box-Muller.
            let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
            let u2: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let r = (-2.0 * u1.ln()).sqrt();
            gauss[(i, j)] = Complex64::new(r * u2.cos(), r * u2.sin());
        }
    }
    let qr = gauss.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..m {
        let diag = r[(j, j)];
        let phase = if diag.norm() > 0.0 {
            diag / diag.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..m {
            q[(i, j)] *= phase;
        }
    }
    q
}
