//! The Tsallis-q entropy family.
//!
//! `S_q(ρ) = (Σ_i λ_i^q − 1)/(1−q)` over the spectrum, in natural-log units,
//! with the von Neumann entropy `−Σ λ ln λ` as the `q → 1` limit. The
//! parameter is carried by [`QParam`], which switches to the von Neumann
//! branch automatically inside a window around `q = 1` where the `(1−q)`
//! denominators would cancel catastrophically.

use crate::ensemble::MixedEnsemble;
use crate::error::{Error, Result};
use crate::qstate::{DensityMatrix, EIG_ZERO_CLAMP};

/// Half-width of the window around `q = 1` in which the von Neumann branch
/// is used instead of the generalized formula.
pub const Q_ONE_WINDOW: f64 = 1e-9;

/// Accepted deviation of ensemble weights from summing to one.
pub const WEIGHT_SUM_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QMode {
    General,
    VonNeumann,
}

/// The entropy-family parameter `q ≥ 0` plus the evaluation branch derived
/// from it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QParam {
    q: f64,
    mode: QMode,
}

impl QParam {
    pub fn new(q: f64) -> Result<Self> {
        if !q.is_finite() || q < 0.0 {
            return Err(Error::InvalidParam(format!(
                "entropy parameter must satisfy q >= 0, got {q}"
            )));
        }
        let mode = if (q - 1.0).abs() < Q_ONE_WINDOW {
            QMode::VonNeumann
        } else {
            QMode::General
        };
        Ok(Self { q, mode })
    }

    /// Exactly `q = 1` (the von Neumann branch).
    pub fn one() -> Self {
        Self {
            q: 1.0,
            mode: QMode::VonNeumann,
        }
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn mode(&self) -> QMode {
        self.mode
    }

    pub fn is_von_neumann(&self) -> bool {
        self.mode == QMode::VonNeumann
    }

    /// The q-expectation weight `p^q` (plain `p` on the von Neumann branch).
    pub fn weight(&self, p: f64) -> f64 {
        match self.mode {
            QMode::VonNeumann => p,
            QMode::General => p.powf(self.q),
        }
    }
}

/// Generalized logarithm `ln_q x = (x^{1−q} − 1)/(1−q)`; natural log at the
/// von Neumann branch.
pub fn q_log(x: f64, qp: &QParam) -> Result<f64> {
    if x.is_nan() || x <= 0.0 {
        return Err(Error::InvalidParam(format!(
            "generalized logarithm requires x > 0, got {x}"
        )));
    }
    Ok(match qp.mode {
        QMode::VonNeumann => x.ln(),
        // expm1 keeps the (1−q)-cancellation exact near q = 1.
        QMode::General => ((1.0 - qp.q) * x.ln()).exp_m1() / (1.0 - qp.q),
    })
}

/// Snap spectral weights to exact 0/1 within the clamp window. `0^q := 0`
/// for q > 0, so clamped eigenvalues contribute nothing, and a numerically
/// pure spectrum yields an entropy of exactly zero.
fn snap(lambda: f64) -> f64 {
    if lambda < EIG_ZERO_CLAMP {
        0.0
    } else if (1.0 - lambda) < EIG_ZERO_CLAMP {
        1.0
    } else {
        lambda
    }
}

/// Tsallis-q entropy of a probability spectrum (clamping applied here).
pub fn entropy_from_eigenvalues(eigenvalues: &[f64], qp: &QParam) -> f64 {
    match qp.mode {
        QMode::VonNeumann => {
            let mut acc = 0.0;
            for &l in eigenvalues {
                let l = snap(l);
                if l > 0.0 {
                    acc -= l * l.ln();
                }
            }
            // -0.0 from a pure spectrum
            acc + 0.0
        }
        QMode::General => {
            // Σ λ^q − 1 evaluated as Σ λ·expm1((q−1) ln λ): exact at the
            // pure spectrum and free of cancellation for q near 1.
            let mut acc = 0.0;
            for &l in eigenvalues {
                let l = snap(l);
                if l > 0.0 {
                    acc += l * ((qp.q - 1.0) * l.ln()).exp_m1();
                }
            }
            acc / (1.0 - qp.q) + 0.0
        }
    }
}

/// Tsallis-q entropy of a density matrix.
pub fn tsallis_entropy(rho: &DensityMatrix, qp: &QParam) -> Result<f64> {
    let spec = rho.spectral()?;
    Ok(entropy_from_eigenvalues(&spec.eigenvalues, qp))
}

fn bipartite(rho: &DensityMatrix, what: &str) -> Result<()> {
    if rho.dims().len() != 2 {
        return Err(Error::DimMismatch(format!(
            "{what} requires a bipartite state, got dims {:?}",
            rho.dims()
        )));
    }
    Ok(())
}

/// `S_q(ρ_AB) − S_q(ρ_B)`. May be negative.
pub fn conditional_entropy(rho_ab: &DensityMatrix, qp: &QParam) -> Result<f64> {
    bipartite(rho_ab, "conditional entropy")?;
    let s_ab = tsallis_entropy(rho_ab, qp)?;
    let s_b = tsallis_entropy(&rho_ab.partial_trace(&[1])?, qp)?;
    Ok(s_ab - s_b)
}

/// `S_q(ρ_A) + S_q(ρ_B) − S_q(ρ_AB)`.
pub fn mutual_entropy(rho_ab: &DensityMatrix, qp: &QParam) -> Result<f64> {
    bipartite(rho_ab, "mutual entropy")?;
    let s_a = tsallis_entropy(&rho_ab.partial_trace(&[0])?, qp)?;
    let s_b = tsallis_entropy(&rho_ab.partial_trace(&[1])?, qp)?;
    let s_ab = tsallis_entropy(rho_ab, qp)?;
    Ok(s_a + s_b - s_ab)
}

/// Tsallis-q difference of an ensemble `{p_i, ρ_i}`:
/// `S_q(Σ p_i ρ_i) − Σ p_i^q S_q(ρ_i)`. Nonnegative for q ≥ 1 by concavity.
pub fn tsallis_difference(ens: &MixedEnsemble, qp: &QParam) -> Result<f64> {
    ens.validate()?;
    let mixture = ens.mixture();
    let s_mix = tsallis_entropy(&mixture, qp)?;
    let mut acc = 0.0;
    for (w, rho) in ens.iter() {
        acc += qp.weight(w) * tsallis_entropy(rho, qp)?;
    }
    Ok(s_mix - acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{
        canonical_state, haar_random_pure, random_mixed, CMat, CVec, CanonicalState, DensityMatrix,
        PureState,
    };
    use num_complex::Complex64;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn q(v: f64) -> QParam {
        QParam::new(v).unwrap()
    }

    fn bell_density() -> DensityMatrix {
        let w = c(std::f64::consts::FRAC_1_SQRT_2);
        let amps = CVec::from_vec(vec![w, c(0.0), c(0.0), w]);
        PureState::new(amps, vec![2, 2]).unwrap().to_density()
    }

    #[test]
    fn q_param_mode_selection() {
        assert!(q(2.0).mode() == QMode::General);
        assert!(q(1.0).is_von_neumann());
        assert!(q(1.0 + 0.5e-9).is_von_neumann());
        assert!(q(1.0 + 2e-9).mode() == QMode::General);
        assert!(QParam::new(-0.1).is_err());
        assert!(QParam::new(f64::NAN).is_err());
    }

    #[test]
    fn q_log_values() {
        assert_eq!(q_log(1.0, &q(0.5)).unwrap(), 0.0);
        assert_eq!(q_log(1.0, &q(3.0)).unwrap(), 0.0);
        assert!((q_log(2.0, &q(2.0)).unwrap() - 0.5).abs() < 1e-15);
        assert!((q_log(std::f64::consts::E, &q(1.0)).unwrap() - 1.0).abs() < 1e-15);
        assert!(q_log(0.0, &q(2.0)).is_err());
        assert!(q_log(-1.0, &q(2.0)).is_err());
    }

    #[test]
    fn entropy_of_maximally_mixed_q2() {
        let half = DensityMatrix::maximally_mixed(vec![2]).unwrap();
        let s = tsallis_entropy(&half, &q(2.0)).unwrap();
        assert_eq!(s, 0.5);
    }

    #[test]
    fn entropy_of_pure_state_is_exactly_zero() {
        let pure = PureState::basis(vec![2], 0).unwrap().to_density();
        for qv in [0.5, 1.0, 1.7, 2.0, 3.0, 5.0] {
            assert_eq!(tsallis_entropy(&pure, &q(qv)).unwrap(), 0.0);
        }
        // also for a rotated pure state where the solver introduces noise
        let psi = haar_random_pure(&[2, 2], 3).unwrap().to_density();
        for qv in [1.0, 2.0] {
            assert_eq!(tsallis_entropy(&psi, &q(qv)).unwrap(), 0.0);
        }
    }

    #[test]
    fn w_marginal_entropy_matches_binary_entropy_oracle() {
        let w = canonical_state(CanonicalState::W, &[2, 2, 2]).unwrap();
        let rho_a = w.to_density().partial_trace(&[0]).unwrap();
        let s = tsallis_entropy(&rho_a, &q(1.0)).unwrap();
        // independent closed forms for h(2/3, 1/3)
        let p: f64 = 2.0 / 3.0;
        let oracle = -p * p.ln() - (1.0 - p) * (1.0 - p).ln();
        let algebraic = 3f64.ln() - (2.0 / 3.0) * 2f64.ln();
        assert!((oracle - algebraic).abs() < 1e-15);
        assert!((s - oracle).abs() < 1e-12, "{s} vs {oracle}");
    }

    #[test]
    fn conditional_entropy_examples() {
        let half = DensityMatrix::maximally_mixed(vec![2]).unwrap();
        let prod = half.tensor(&half);
        assert!((conditional_entropy(&prod, &q(2.0)).unwrap() - 0.25).abs() < 1e-14);

        let bell = bell_density();
        let ln2 = 2f64.ln();
        assert!((conditional_entropy(&bell, &q(1.0)).unwrap() + ln2).abs() < 1e-12);
        assert!((conditional_entropy(&bell, &q(2.0)).unwrap() + 0.5).abs() < 1e-12);

        let tri = DensityMatrix::maximally_mixed(vec![2, 2, 2]).unwrap();
        assert!(conditional_entropy(&tri, &q(2.0)).is_err());
    }

    #[test]
    fn mutual_entropy_examples() {
        let half = DensityMatrix::maximally_mixed(vec![2]).unwrap();
        let prod = half.tensor(&half);
        assert!((mutual_entropy(&prod, &q(1.0)).unwrap()).abs() < 1e-12);
        assert!((mutual_entropy(&prod, &q(2.0)).unwrap() - 0.25).abs() < 1e-14);

        let bell = bell_density();
        assert!((mutual_entropy(&bell, &q(1.0)).unwrap() - 2.0 * 2f64.ln()).abs() < 1e-12);
        assert!((mutual_entropy(&bell, &q(2.0)).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tsallis_difference_examples() {
        let z0 = PureState::basis(vec![2], 0).unwrap().to_density();
        let z1 = PureState::basis(vec![2], 1).unwrap().to_density();

        let single = MixedEnsemble::new(vec![1.0], vec![z0.clone()]).unwrap();
        assert_eq!(tsallis_difference(&single, &q(2.0)).unwrap(), 0.0);

        let ens = MixedEnsemble::new(vec![0.5, 0.5], vec![z0, z1]).unwrap();
        assert!((tsallis_difference(&ens, &q(1.0)).unwrap() - 2f64.ln()).abs() < 1e-12);
        assert!((tsallis_difference(&ens, &q(2.0)).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn ensemble_validation_rejects_bad_weights_and_dims() {
        let z0 = PureState::basis(vec![2], 0).unwrap().to_density();
        let z1 = PureState::basis(vec![2], 1).unwrap().to_density();
        let trit = PureState::basis(vec![3], 0).unwrap().to_density();
        assert!(MixedEnsemble::new(vec![0.6, 0.6], vec![z0.clone(), z1.clone()]).is_err());
        assert!(MixedEnsemble::new(vec![0.5, -0.5], vec![z0.clone(), z1]).is_err());
        assert!(MixedEnsemble::new(vec![0.5, 0.5], vec![z0, trit]).is_err());
    }

    #[test]
    fn pseudoadditivity_on_random_pairs() {
        let mut worst = 0.0f64;
        for seed in 0..500 {
            let rho = random_mixed(2, 2, seed).unwrap();
            let sigma = random_mixed(3, 2, seed + 10_000).unwrap();
            let joint = rho.tensor(&sigma);
            for qv in [1.5, 2.0, 3.0] {
                let qp = q(qv);
                let s_r = tsallis_entropy(&rho, &qp).unwrap();
                let s_s = tsallis_entropy(&sigma, &qp).unwrap();
                let s_j = tsallis_entropy(&joint, &qp).unwrap();
                let dev = (s_j - s_r - s_s - (1.0 - qv) * s_r * s_s).abs();
                worst = worst.max(dev);
            }
        }
        assert!(worst <= 1e-9, "pseudoadditivity deviation {worst:e}");
    }

    #[test]
    fn concavity_spot_check() {
        for seed in 0..100 {
            let rho = random_mixed(4, 4, seed).unwrap();
            let sigma = random_mixed(4, 4, seed + 500).unwrap();
            for qv in [1.0, 2.0, 3.0] {
                let qp = q(qv);
                for lam in [0.25, 0.5, 0.75] {
                    let mix = DensityMatrix::from_parts_unchecked(
                        rho.matrix() * c(lam) + sigma.matrix() * c(1.0 - lam),
                        vec![4],
                    );
                    let lhs = tsallis_entropy(&mix, &qp).unwrap();
                    let rhs = lam * tsallis_entropy(&rho, &qp).unwrap()
                        + (1.0 - lam) * tsallis_entropy(&sigma, &qp).unwrap();
                    assert!(lhs >= rhs - 1e-10, "q={qv} lam={lam}: {lhs} < {rhs}");
                }
            }
        }
    }

    #[test]
    fn continuity_at_q_one() {
        for seed in 0..50 {
            let rho = random_mixed(4, 3, seed).unwrap();
            let s1 = tsallis_entropy(&rho, &q(1.0)).unwrap();
            for qv in [1.0 - 1e-6, 1.0 + 1e-6] {
                let s = tsallis_entropy(&rho, &q(qv)).unwrap();
                assert!((s - s1).abs() <= 1e-4, "seed {seed} q {qv}: {s} vs {s1}");
            }
        }
    }

    #[test]
    fn tsallis_difference_nonnegative_for_q_ge_one() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        for trial in 0..1000 {
            let k = 2 + (trial % 3);
            let mut weights: Vec<f64> = (0..k).map(|_| rng.gen_range(0.05..1.0)).collect();
            let total: f64 = weights.iter().sum();
            weights.iter_mut().for_each(|w| *w /= total);
            let states: Vec<DensityMatrix> = (0..k)
                .map(|j| random_mixed(3, 2, rng.gen::<u64>() ^ j as u64).unwrap())
                .collect();
            let ens = MixedEnsemble::new(weights, states).unwrap();
            for qv in [1.0, 1.5, 2.0, 3.0] {
                let d = tsallis_difference(&ens, &q(qv)).unwrap();
                assert!(d >= -1e-10, "trial {trial} q {qv}: {d}");
            }
        }
    }

    #[test]
    fn general_branch_matches_direct_formula() {
        // the expm1 form must agree with the textbook (Σλ^q − 1)/(1−q)
        let eigs: [f64; 4] = [0.4, 0.35, 0.15, 0.1];
        for qv in [0.3, 0.5, 2.0, 3.0, 5.0] {
            let qp = q(qv);
            let direct = (eigs.iter().map(|l| l.powf(qv)).sum::<f64>() - 1.0) / (1.0 - qv);
            let got = entropy_from_eigenvalues(&eigs, &qp);
            assert!((got - direct).abs() < 1e-12, "q={qv}: {got} vs {direct}");
        }
    }

    #[test]
    fn entropy_nonnegative_for_sub_unit_q() {
        let m = CMat::identity(3, 3) * c(1.0 / 3.0);
        let rho = DensityMatrix::new(m, vec![3]).unwrap();
        for qv in [0.0, 0.3, 0.9] {
            assert!(tsallis_entropy(&rho, &q(qv)).unwrap() >= 0.0);
        }
    }
}
