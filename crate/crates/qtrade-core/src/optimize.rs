//! Seeded multi-restart local search over isometry parameterizations.
//!
//! Isometries of shape `m × r` are the first `r` columns of an `m × m`
//! unitary. The search moves the unitary through a local chart
//! `U ← U·exp(iH(θ))` with `H` Hermitian, using a coordinate-wise
//! finite-difference gradient and a backtracking line search. Restarts are
//! one deterministic identity start plus Haar-random unitaries from the
//! seeded generator; the best result is reduced in restart order, so the
//! outcome is identical whether restarts run sequentially or in parallel.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::parallel::{maybe_par_map_indices, mix_seed};
use crate::qstate::{haar_random_unitary, CMat};

/// Finite-difference half-step for gradient probes.
const FD_STEP: f64 = 1e-5;
/// Armijo sufficient-decrease constant.
const ARMIJO_C: f64 = 1e-4;
/// Gradient norm below which a restart is declared stationary. Central
/// differences at `FD_STEP` resolve gradients down to ~1e-10, so stopping at
/// 1e-7 leaves value errors of order `1e-14/curvature`.
const GRAD_EPS: f64 = 1e-7;
/// Maximum step halvings per line search.
const MAX_BACKTRACK: usize = 40;
/// Cap on the warm-started line-search scale.
const STEP_MAX: f64 = 4.0;
/// Consecutive sub-`tol` sweeps before a restart is declared converged.
const STALL_SWEEPS: usize = 3;

/// Optimization direction for the scalar objective.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Min,
    Max,
}

/// Multi-restart local-search configuration.
#[derive(Debug, Clone, Serialize)]
pub struct OptConfig {
    /// Number of restarts (the first is always the identity start).
    pub restarts: usize,
    /// Iteration cap per restart.
    pub max_iters: usize,
    /// Stop a restart once a full sweep improves the objective by less than
    /// this.
    pub tol: f64,
    /// Seed for all restart initializations.
    pub seed: u64,
    /// Optional cap on decomposition / measurement cardinality used by the
    /// measures built on top of this optimizer.
    pub m_outcomes: Option<usize>,
}

impl Default for OptConfig {
    fn default() -> Self {
        Self {
            restarts: 20,
            max_iters: 2000,
            tol: 1e-8,
            seed: 0,
            m_outcomes: None,
        }
    }
}

impl OptConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 || self.max_iters == 0 {
            return Err(Error::InvalidParam(
                "restarts and max_iters must be positive".into(),
            ));
        }
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(Error::InvalidParam(format!(
                "tolerance must be positive, got {}",
                self.tol
            )));
        }
        if self.m_outcomes == Some(0) {
            return Err(Error::InvalidParam("m_outcomes must be positive".into()));
        }
        Ok(())
    }

    /// Copy with a derived seed; used to give each optimization inside a
    /// larger computation its own independent stream.
    pub fn with_stream(&self, stream: u64) -> Self {
        let mut c = self.clone();
        c.seed = mix_seed(self.seed, stream);
        c
    }
}

/// Outcome of one multi-restart optimization.
#[derive(Debug, Clone, Serialize)]
pub struct OptResult {
    /// Best objective value found (in the caller's orientation).
    pub value: f64,
    /// The optimizing `m × r` isometry.
    #[serde(skip)]
    pub argument: CMat,
    /// Iterations used by the winning restart.
    pub iterations: usize,
    pub restarts_used: usize,
    /// Final value of every restart, in restart order.
    pub per_restart_values: Vec<f64>,
    pub seed: u64,
}

/// Hermitian matrix from a real parameter vector of length `m²`: the first
/// `m` entries fill the diagonal, the rest fill the off-diagonal pairs
/// (real, imaginary) in row-major order.
pub fn hermitian_from_params(theta: &[f64], m: usize) -> Result<CMat> {
    if theta.len() != m * m {
        return Err(Error::InvalidParam(format!(
            "expected {} parameters for a {m}x{m} Hermitian matrix, got {}",
            m * m,
            theta.len()
        )));
    }
    let mut h = CMat::zeros(m, m);
    for i in 0..m {
        h[(i, i)] = Complex64::new(theta[i], 0.0);
    }
    let mut k = m;
    for i in 0..m {
        for j in (i + 1)..m {
            let z = Complex64::new(theta[k], theta[k + 1]);
            h[(i, j)] = z;
            h[(j, i)] = z.conj();
            k += 2;
        }
    }
    Ok(h)
}

/// `exp(iH)` for Hermitian `H`, via its spectral decomposition.
pub fn exp_i_hermitian(h: &CMat) -> CMat {
    let se = nalgebra::SymmetricEigen::new(h.clone());
    let phases = se.eigenvalues.map(|l| Complex64::new(0.0, l).exp());
    &se.eigenvectors * DMatrix::from_diagonal(&phases) * se.eigenvectors.adjoint()
}

/// Smooth surjective chart onto the unitary group: `θ ↦ exp(i H(θ))` with
/// `H` Hermitian. `θ = 0` maps to the identity.
pub fn param_to_unitary(theta: &[f64]) -> Result<CMat> {
    let m = (theta.len() as f64).sqrt().round() as usize;
    if m * m != theta.len() {
        return Err(Error::InvalidParam(format!(
            "parameter vector length {} is not a perfect square",
            theta.len()
        )));
    }
    Ok(exp_i_hermitian(&hermitian_from_params(theta, m)?))
}

/// One local chart coordinate. Coordinates whose generator touches only the
/// unused columns (`≥ r`) of the unitary leave the isometry invariant and
/// are omitted from the search.
#[derive(Debug, Clone, Copy)]
enum Coord {
    Diag(usize),
    OffRe(usize, usize),
    OffIm(usize, usize),
}

fn relevant_coords(m: usize, r: usize) -> Vec<Coord> {
    let mut coords = Vec::new();
    for i in 0..r {
        coords.push(Coord::Diag(i));
    }
    for i in 0..m {
        for j in (i + 1)..m {
            if i < r {
                coords.push(Coord::OffRe(i, j));
                coords.push(Coord::OffIm(i, j));
            }
        }
    }
    coords
}

fn herm_from_coords(coords: &[Coord], values: &[f64], m: usize) -> CMat {
    let mut h = CMat::zeros(m, m);
    for (c, &v) in coords.iter().zip(values) {
        match *c {
            Coord::Diag(i) => h[(i, i)] = Complex64::new(v, 0.0),
            Coord::OffRe(i, j) => {
                h[(i, j)] += Complex64::new(v, 0.0);
                h[(j, i)] += Complex64::new(v, 0.0);
            }
            Coord::OffIm(i, j) => {
                h[(i, j)] += Complex64::new(0.0, v);
                h[(j, i)] += Complex64::new(0.0, -v);
            }
        }
    }
    h
}

/// Writes the first `r` columns of `u · exp(i h E_c)` into `probe`, where
/// `E_c` is the generator of one coordinate. The exponential of a single
/// generator only mixes columns `i` and `j`, so this is an O(m) update.
fn write_probe(u: &CMat, iso: &CMat, probe: &mut CMat, c: Coord, h: f64) {
    probe.copy_from(iso);
    let r = iso.ncols();
    match c {
        Coord::Diag(i) => {
            let phase = Complex64::new(0.0, h).exp();
            for row in 0..u.nrows() {
                probe[(row, i)] = iso[(row, i)] * phase;
            }
        }
        Coord::OffRe(i, j) => {
            let (ch, ish) = (h.cos(), Complex64::new(0.0, h.sin()));
            for row in 0..u.nrows() {
                let ui = u[(row, i)];
                let uj = u[(row, j)];
                probe[(row, i)] = ui * ch + uj * ish;
                if j < r {
                    probe[(row, j)] = ui * ish + uj * ch;
                }
            }
        }
        Coord::OffIm(i, j) => {
            // generator [[0, i], [-i, 0]] exponentiates to a real rotation
            let (ch, sh) = (h.cos(), h.sin());
            for row in 0..u.nrows() {
                let ui = u[(row, i)];
                let uj = u[(row, j)];
                probe[(row, i)] = ui * ch + uj * sh;
                if j < r {
                    probe[(row, j)] = uj * ch - ui * sh;
                }
            }
        }
    }
}

struct RestartOutcome {
    value: f64,
    argument: CMat,
    iterations: usize,
}

fn run_restart<F>(
    f: &F,
    to_internal: f64,
    start: CMat,
    r: usize,
    max_iters: usize,
    tol: f64,
) -> Result<RestartOutcome>
where
    F: Fn(&CMat) -> f64 + Sync,
{
    let m = start.nrows();
    let eval = |iso: &CMat| -> Result<f64> {
        let v = f(iso) * to_internal;
        if !v.is_finite() {
            return Err(Error::Numerical(
                "objective returned a non-finite value".into(),
            ));
        }
        Ok(v)
    };

    let mut u = start;
    let mut iso = u.columns(0, r).into_owned();
    let mut value = eval(&iso)?;
    let coords = relevant_coords(m, r);
    let mut grad = vec![0.0f64; coords.len()];
    let mut probe = iso.clone();
    let mut step = 1.0f64;
    let mut iterations = 0usize;
    // A sweep only counts as converged once several consecutive iterations
    // fail to improve by `tol`; a single one can just be a warm step that
    // overshot and got backtracked to something tiny.
    let mut stalled = 0usize;
    // gradient and accepted step length of the previous sweep, for the
    // Barzilai-Borwein step-size seed
    let mut previous: Option<(Vec<f64>, f64, f64)> = None;

    for _ in 0..max_iters {
        iterations += 1;
        let mut gnorm2 = 0.0;
        for (k, &c) in coords.iter().enumerate() {
            write_probe(&u, &iso, &mut probe, c, FD_STEP);
            let fp = eval(&probe)?;
            write_probe(&u, &iso, &mut probe, c, -FD_STEP);
            let fm = eval(&probe)?;
            let g = (fp - fm) / (2.0 * FD_STEP);
            grad[k] = g;
            gnorm2 += g * g;
        }
        if gnorm2.sqrt() < GRAD_EPS {
            break;
        }
        // Barzilai-Borwein seed: with previous step s = -t·g_prev and
        // y = g - g_prev, use t_bb = (s·s)/(s·y); fall back to the doubled
        // last step when curvature information is unusable. The chart is
        // re-centered every sweep, so this is the transport-free
        // approximation, which backtracking makes safe.
        let mut t = step;
        if let Some((g_prev, t_prev, gnorm2_prev)) = &previous {
            let dot: f64 = grad.iter().zip(g_prev.iter()).map(|(a, b)| a * b).sum();
            let denom = gnorm2_prev - dot;
            if denom > 0.0 {
                t = (t_prev * gnorm2_prev / denom).clamp(1e-9, STEP_MAX);
            }
        }
        let descent: Vec<f64> = grad.iter().map(|g| -g).collect();
        let dir = herm_from_coords(&coords, &descent, m);
        let se = nalgebra::SymmetricEigen::new(dir);
        let mut accepted = None;
        for _ in 0..MAX_BACKTRACK {
            let phases = se.eigenvalues.map(|l| Complex64::new(0.0, l * t).exp());
            let rot =
                &se.eigenvectors * DMatrix::from_diagonal(&phases) * se.eigenvectors.adjoint();
            let u_try = &u * rot;
            let iso_try = u_try.columns(0, r).into_owned();
            let f_try = eval(&iso_try)?;
            if f_try <= value - ARMIJO_C * t * gnorm2 {
                accepted = Some((u_try, iso_try, f_try, t));
                break;
            }
            t *= 0.5;
        }
        match accepted {
            Some((u_new, iso_new, f_new, t_used)) => {
                let improvement = value - f_new;
                u = u_new;
                iso = iso_new;
                value = f_new;
                previous = Some((grad.clone(), t_used, gnorm2));
                step = (t_used * 2.0).min(STEP_MAX);
                if improvement < tol {
                    stalled += 1;
                    if stalled >= STALL_SWEEPS {
                        break;
                    }
                } else {
                    stalled = 0;
                }
            }
            None => {
                stalled += 1;
                previous = None;
                step = (step * 0.25).max(1e-8);
                if stalled >= STALL_SWEEPS {
                    break;
                }
            }
        }
    }
    Ok(RestartOutcome {
        value,
        argument: iso,
        iterations,
    })
}

/// Optimize `objective` over `m × r` isometries.
///
/// Deterministic given the config seed: restart `k` draws its start point
/// from an independent stream derived from `(seed, k)`, so the result is
/// independent of scheduling and of the total restart count up to `k`.
pub fn optimize<F>(
    objective: &F,
    direction: Direction,
    shape: (usize, usize),
    config: &OptConfig,
) -> Result<OptResult>
where
    F: Fn(&CMat) -> f64 + Sync,
{
    config.validate()?;
    let (m, r) = shape;
    if r == 0 || m < r {
        return Err(Error::InvalidParam(format!(
            "invalid isometry shape ({m}, {r})"
        )));
    }
    let to_internal = match direction {
        Direction::Min => 1.0,
        Direction::Max => -1.0,
    };
    let outcomes: Vec<Result<RestartOutcome>> = maybe_par_map_indices(config.restarts, |k| {
        let start = if k == 0 {
            CMat::identity(m, m)
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(config.seed, k as u64));
            haar_random_unitary(m, &mut rng)
        };
        run_restart(
            objective,
            to_internal,
            start,
            r,
            config.max_iters,
            config.tol,
        )
    });

    let mut best: Option<(usize, RestartOutcome)> = None;
    let mut per_restart_values = Vec::with_capacity(config.restarts);
    for (k, outcome) in outcomes.into_iter().enumerate() {
        let outcome = outcome?;
        per_restart_values.push(outcome.value * to_internal);
        let better = match &best {
            None => true,
            Some((_, b)) => outcome.value < b.value,
        };
        if better {
            best = Some((k, outcome));
        }
    }
    let (_, best) = best.expect("at least one restart");
    Ok(OptResult {
        value: best.value * to_internal,
        argument: best.argument,
        iterations: best.iterations,
        restarts_used: config.restarts,
        per_restart_values,
        seed: config.seed,
    })
}
