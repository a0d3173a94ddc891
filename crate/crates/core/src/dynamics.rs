//! Piecewise-constant hopping Hamiltonians and the single-particle
//! propagator R(t).
//!
//! Convention, pinned by the beamsplitter test: `a(t) = R * a(0)` with
//! `R = exp(-i J_k t_k) ... exp(-i J_1 t_1)` (later segments compose on the
//! left). Each exponential goes through a Hermitian eigendecomposition, so
//! unitarity holds to roundoff.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::lattice::LatticeSpec;
use crate::{Error, Result};

pub const HERMITICITY_TOL: f64 = 1e-12;
pub const UNITARITY_TOL: f64 = 1e-10;

/// One piecewise-constant segment: hop for `duration` under `j`.
#[derive(Debug, Clone)]
pub struct Segment {
    pub duration: f64,
    pub j: DMatrix<Complex64>,
}

/// Ordered sequence of hopping segments.
#[derive(Debug, Clone, Default)]
pub struct HoppingSchedule {
    pub segments: Vec<Segment>,
}

impl HoppingSchedule {
    pub fn new(segments: Vec<Segment>) -> Self {
        HoppingSchedule { segments }
    }

    pub fn single(j: DMatrix<Complex64>, duration: f64) -> Self {
        HoppingSchedule {
            segments: vec![Segment { duration, j }],
        }
    }

    pub fn total_time(&self) -> f64 {
        self.segments.iter().map(|s| s.duration).sum()
    }

    /// Mode count, from the first segment (0 when empty).
    pub fn num_modes(&self) -> usize {
        self.segments.first().map_or(0, |s| s.j.nrows())
    }

    /// Append the segments of `other` after this schedule's.
    pub fn concat(&self, other: &HoppingSchedule) -> HoppingSchedule {
        let mut segments = self.segments.clone();
        segments.extend(other.segments.iter().cloned());
        HoppingSchedule { segments }
    }
}

/// The m x m unitary mapping mode operators, `a(t) = R * a(0)`.
#[derive(Debug, Clone)]
pub struct Propagator {
    pub r: DMatrix<Complex64>,
    pub t: f64,
}

impl Propagator {
    pub fn identity(m: usize) -> Self {
        Propagator {
            r: DMatrix::identity(m, m),
            t: 0.0,
        }
    }

    pub fn num_modes(&self) -> usize {
        self.r.nrows()
    }

    /// Max entrywise deviation of R†R from the identity.
    pub fn unitarity_defect(&self) -> f64 {
        unitarity_defect(&self.r)
    }
}

pub fn unitarity_defect(r: &DMatrix<Complex64>) -> f64 {
    let m = r.nrows();
    let prod = r.adjoint() * r;
    let mut max = 0.0f64;
    for i in 0..m {
        for j in 0..m {
            let target = if i == j { 1.0 } else { 0.0 };
            let dev = (prod[(i, j)] - Complex64::new(target, 0.0)).norm();
            if dev > max {
                max = dev;
            }
        }
    }
    max
}

/// One constraint violation found by `validate_schedule`.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NonHermitian { segment: usize, i: usize, j: usize, deviation: f64 },
    NonAdjacentHop { segment: usize, i: usize, j: usize },
    MagnitudeExceeded { segment: usize, i: usize, j: usize, magnitude: f64 },
    NonPositiveDuration { segment: usize, duration: f64 },
}

/// Check a schedule against the lattice constraints: Hermitian segments,
/// hops only between adjacent sites, |J_ij| <= 1 off the diagonal.
pub fn validate_schedule(sched: &HoppingSchedule, spec: &LatticeSpec) -> Result<Vec<Violation>> {
    let m = spec.num_sites();
    let mut report = Vec::new();
    for (k, seg) in sched.segments.iter().enumerate() {
        if seg.j.nrows() != m || seg.j.ncols() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                got: seg.j.nrows(),
            });
        }
        if !(seg.duration > 0.0) {
            report.push(Violation::NonPositiveDuration {
                segment: k,
                duration: seg.duration,
            });
        }
        for i in 0..m {
            for j in i..m {
                let dev = (seg.j[(i, j)] - seg.j[(j, i)].conj()).norm();
                if dev > HERMITICITY_TOL {
                    report.push(Violation::NonHermitian { segment: k, i, j, deviation: dev });
                }
                if i != j {
                    let mag = seg.j[(i, j)].norm();
                    if mag > 0.0 && !spec.adjacent(i, j) {
                        report.push(Violation::NonAdjacentHop { segment: k, i, j });
                    }
                    if mag > 1.0 + 1e-12 {
                        report.push(Violation::MagnitudeExceeded { segment: k, i, j, magnitude: mag });
                    }
                }
            }
        }
    }
    Ok(report)
}

/// Matrix exponential `exp(-i J t)` of a Hermitian `J` via eigendecomposition.
pub fn expm_hermitian(j: &DMatrix<Complex64>, t: f64) -> Result<DMatrix<Complex64>> {
    let m = j.nrows();
    if j.ncols() != m {
        return Err(Error::NotSquare { rows: m, cols: j.ncols() });
    }
    let mut max_dev = 0.0f64;
    for a in 0..m {
        for b in a..m {
            let dev = (j[(a, b)] - j[(b, a)].conj()).norm();
            if dev > max_dev {
                max_dev = dev;
            }
        }
    }
    if max_dev > HERMITICITY_TOL {
        return Err(Error::InvalidSchedule(format!(
            "segment matrix is not Hermitian (max deviation {max_dev:.3e})"
        )));
    }
    // Symmetrize to kill roundoff asymmetry before the eigensolve.
    let sym = (j + j.adjoint()).scale(0.5);
    let eig = SymmetricEigen::new(sym);
    let phases: Vec<Complex64> = eig
        .eigenvalues
        .iter()
        .map(|&ev| (-Complex64::i() * ev * t).exp())
        .collect();
    let v = eig.eigenvectors;
    let mut scaled = v.clone();
    for (col, phase) in phases.iter().enumerate() {
        for row in 0..m {
            scaled[(row, col)] *= phase;
        }
    }
    Ok(scaled * v.adjoint())
}

/// Evolve a schedule into its propagator.
pub fn evolve(sched: &HoppingSchedule) -> Result<Propagator> {
    let m = sched.num_modes();
    let mut r = DMatrix::identity(m, m);
    for seg in &sched.segments {
        if seg.j.nrows() != m || seg.j.ncols() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                got: seg.j.nrows(),
            });
        }
        r = expm_hermitian(&seg.j, seg.duration)? * r;
    }
    let p = Propagator {
        r,
        t: sched.total_time(),
    };
    let defect = p.unitarity_defect();
    if defect > UNITARITY_TOL {
        return Err(Error::NotUnitary(defect));
    }
    Ok(p)
}

/// The balanced-beamsplitter segment on modes `(i, j)` of an `m`-mode system:
/// `J[i][j] = -i`, `J[j][i] = i`, duration pi/4.
pub fn beamsplitter_schedule(m: usize, i: usize, j: usize) -> Result<HoppingSchedule> {
    rotation_schedule(m, i, j, std::f64::consts::FRAC_PI_4)
}

/// Beamsplitter coupling run for an arbitrary rotation angle `theta`.
pub fn rotation_schedule(m: usize, i: usize, j: usize, theta: f64) -> Result<HoppingSchedule> {
    if i >= m || j >= m {
        return Err(Error::SiteOutOfRange { index: i.max(j), m });
    }
    if i == j {
        return Err(Error::NotAdjacent(i, j));
    }
    let mut jm = DMatrix::zeros(m, m);
    jm[(i, j)] = -Complex64::i();
    jm[(j, i)] = Complex64::i();
    Ok(HoppingSchedule::single(jm, theta))
}

/// Phase-gate segment: duration 1, `J[k][k] = phi`; evolving it multiplies
/// mode `k` by `exp(-i phi)`.
pub fn phase_schedule(m: usize, k: usize, phi: f64) -> Result<HoppingSchedule> {
    if k >= m {
        return Err(Error::SiteOutOfRange { index: k, m });
    }
    if !phi.is_finite() {
        return Err(Error::InvalidSchedule("phase must be finite".into()));
    }
    let mut jm = DMatrix::zeros(m, m);
    jm[(k, k)] = Complex64::new(phi, 0.0);
    Ok(HoppingSchedule::single(jm, 1.0))
}

/// Anderson Hamiltonian: all adjacent hops 1, i.i.d. diagonal uniform in
/// [-W, W] from a seeded generator. Returned with unit duration; rescale the
/// segment duration as needed.
pub fn anderson_hopping(spec: &LatticeSpec, w: f64, seed: u64) -> DMatrix<Complex64> {
    let m = spec.num_sites();
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut j = DMatrix::zeros(m, m);
    for a in 0..m {
        for b in (a + 1)..m {
            if spec.adjacent(a, b) {
                j[(a, b)] = Complex64::new(1.0, 0.0);
                j[(b, a)] = Complex64::new(1.0, 0.0);
            }
        }
    }
    for a in 0..m {
        let x: f64 = if w > 0.0 { rng.gen_range(-w..=w) } else { 0.0 };
        j[(a, a)] = Complex64::new(x, 0.0);
    }
    j
}

/// Random valid hopping matrix: adjacent entries of uniform magnitude <= 1
/// and uniform phase, Hermitian, zero elsewhere. Test-input generator.
pub fn random_hopping(spec: &LatticeSpec, seed: u64) -> DMatrix<Complex64> {
    let m = spec.num_sites();
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut j = DMatrix::zeros(m, m);
    for a in 0..m {
        for b in (a + 1)..m {
            if spec.adjacent(a, b) {
                let mag: f64 = rng.gen_range(0.0..=1.0);
                let phase: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                let z = Complex64::from_polar(mag, phase);
                j[(a, b)] = z;
                j[(b, a)] = z.conj();
            }
        }
    }
    for a in 0..m {
        let x: f64 = rng.gen_range(-1.0..=1.0);
        j[(a, a)] = Complex64::new(x, 0.0);
    }
    j
}
