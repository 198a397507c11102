//! The six generalized correlation measures.
//!
//! Every measure acts on a bipartite state and, by the arrow convention,
//! measurements act on the *second* subsystem while ensembles live on the
//! first. Minimizations report an `Upper` bound on the true value,
//! maximizations a `Lower` bound; pure inputs take closed-form paths and are
//! `Exact`. Decomposition searches run over the isometry chart of the
//! eigen-decomposition with cardinality capped at `rank²` by default;
//! measurement searches run over rank-1 POVMs with at most `dim(B)²`
//! outcomes by default. The caps are recorded in every report.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::ensemble::{
    hjw_ensemble, measure_induced_a_ensemble, Ensemble, RankOnePovm, ZERO_WEIGHT,
};
use crate::entropy::{
    entropy_from_eigenvalues, mutual_entropy, tsallis_difference, tsallis_entropy, QParam,
};
use crate::error::{Error, Result};
use crate::optimize::{optimize, Direction, OptConfig, OptResult};
use crate::qstate::{hermitian_eigenvalues, CMat, DensityMatrix};

/// States with `tr(ρ²) ≥ 1 − PURITY_TOL` take the closed-form pure paths.
pub const PURITY_TOL: f64 = 1e-9;

const MAX_KEPT_DIM: usize = 8;

/// Which correlation measure a report carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Measure {
    /// Minimum q-expected marginal entropy over decompositions.
    #[serde(rename = "q-entanglement")]
    Entanglement,
    /// Maximum q-expected marginal entropy over decompositions.
    #[serde(rename = "q-eoa")]
    EntanglementOfAssistance,
    /// Maximum Tsallis-q difference over rank-1 measurements on B.
    #[serde(rename = "q-cc")]
    ClassicalCorrelation,
    /// Minimum Tsallis-q difference over rank-1 measurements on B.
    #[serde(rename = "q-ue")]
    UnlocalizableEntanglement,
    /// Tsallis-q mutual entropy minus the classical q-correlation.
    #[serde(rename = "q-discord")]
    Discord,
    /// Tsallis-q mutual entropy minus the unlocalizable q-entanglement.
    #[serde(rename = "q-ud")]
    UnlocalizableDiscord,
}

impl Measure {
    pub fn as_str(&self) -> &'static str {
        match self {
            Measure::Entanglement => "q-entanglement",
            Measure::EntanglementOfAssistance => "q-eoa",
            Measure::ClassicalCorrelation => "q-cc",
            Measure::UnlocalizableEntanglement => "q-ue",
            Measure::Discord => "q-discord",
            Measure::UnlocalizableDiscord => "q-ud",
        }
    }
}

impl std::str::FromStr for Measure {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "q-entanglement" => Measure::Entanglement,
            "q-eoa" => Measure::EntanglementOfAssistance,
            "q-cc" => Measure::ClassicalCorrelation,
            "q-ue" => Measure::UnlocalizableEntanglement,
            "q-discord" => Measure::Discord,
            "q-ud" => Measure::UnlocalizableDiscord,
            other => return Err(Error::InvalidParam(format!("unknown measure `{other}`"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundSide {
    Upper,
    Lower,
    Exact,
}

/// The optimizing object behind a reported value, if any.
#[derive(Debug, Clone)]
pub enum Certificate {
    None,
    Ensemble(Ensemble),
    Povm(RankOnePovm),
}

impl Certificate {
    pub fn is_none(&self) -> bool {
        matches!(self, Certificate::None)
    }
}

/// Serializable digest of an optimizer run (the argument itself lives in the
/// certificate).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OptSummary {
    pub value: f64,
    pub per_restart_values: Vec<f64>,
    pub iterations: usize,
    pub restarts_used: usize,
    pub seed: u64,
}

impl From<&OptResult> for OptSummary {
    fn from(r: &OptResult) -> Self {
        Self {
            value: r.value,
            per_restart_values: r.per_restart_values.clone(),
            iterations: r.iterations,
            restarts_used: r.restarts_used,
            seed: r.seed,
        }
    }
}

/// A computed measure value together with its certificate and diagnostics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeasureReport {
    pub measure: Measure,
    pub q: f64,
    pub value: f64,
    pub bound_side: BoundSide,
    /// Cardinality cap the search ran under; `None` on closed-form paths.
    pub m_outcomes: Option<usize>,
    pub certificate: Certificate,
    pub opt: Option<OptSummary>,
}

fn require_bipartite(rho: &DensityMatrix) -> Result<()> {
    if rho.dims().len() != 2 {
        return Err(Error::DimMismatch(format!(
            "measures act on bipartite states, got dims {:?}",
            rho.dims()
        )));
    }
    Ok(())
}

fn require_q_ge_one(qp: &QParam) -> Result<()> {
    if qp.q() < 1.0 && !qp.is_von_neumann() {
        return Err(Error::InvalidParam(format!(
            "correlation measures are only defined for q >= 1, got q = {}",
            qp.q()
        )));
    }
    Ok(())
}

fn is_pure(rho: &DensityMatrix) -> bool {
    rho.purity() >= 1.0 - PURITY_TOL
}

/// Entropy of `σ/p` for a small Hermitian block `σ` stored row-major in a
/// stack buffer. Closed-form eigenvalues for 1x1 and 2x2.
fn entropy_of_block(block: &[Complex64], dk: usize, p: f64, qp: &QParam) -> f64 {
    match dk {
        1 => 0.0,
        2 => {
            let a = block[0].re / p;
            let d = block[3].re / p;
            let b = block[1] / p;
            let mid = 0.5 * (a + d);
            let disc = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
            entropy_from_eigenvalues(&[mid + disc, mid - disc], qp)
        }
        _ => {
            let m = CMat::from_fn(dk, dk, |i, j| block[i * dk + j] / p);
            let eigs = hermitian_eigenvalues(&m);
            entropy_from_eigenvalues(&eigs, qp)
        }
    }
}

/// Precomputed context for decomposition searches: the q-expected marginal
/// entropy `Σ_x p_x^q S_q(tr_B ψ_x)` of the ensemble defined by an isometry.
///
/// With `s_i = √λ_i e_i` reshaped to `d_A × d_B` matrices `M_i`, the
/// unnormalized marginal of member `x` is the Gram matrix
/// `G_x = Σ_{i,i'} u_{xi} conj(u_{xi'}) K_{ii'}` with `K_{ii'} = M_i M_{i'}†`
/// precomputed once per state.
struct DecompContext {
    k_mats: Vec<CMat>,
    rank: usize,
    d_keep: usize,
    qp: QParam,
}

impl DecompContext {
    fn new(rho_ab: &DensityMatrix, qp: &QParam) -> Result<(Self, usize)> {
        let spec = rho_ab.spectral()?;
        let rank = spec.rank().max(1);
        let d_keep = rho_ab.dims()[0];
        let d_other = rho_ab.dims()[1];
        if d_keep > MAX_KEPT_DIM {
            return Err(Error::InvalidParam(format!(
                "kept subsystem dimension {d_keep} exceeds supported maximum {MAX_KEPT_DIM}"
            )));
        }
        // reshape √λ e_i into d_keep × d_other
        let mats: Vec<CMat> = (0..rank)
            .map(|i| {
                let v = spec.eigenvector(i) * Complex64::new(spec.eigenvalues[i].sqrt(), 0.0);
                CMat::from_fn(d_keep, d_other, |a, b| v[a * d_other + b])
            })
            .collect();
        let mut k_mats = Vec::with_capacity(rank * rank);
        for i in 0..rank {
            for j in 0..rank {
                k_mats.push(&mats[i] * mats[j].adjoint());
            }
        }
        Ok((
            Self {
                k_mats,
                rank,
                d_keep,
                qp: *qp,
            },
            rank,
        ))
    }

    /// `Σ_x p_x^q S_q(G_x / p_x)` over the members encoded by the isometry
    /// rows. Members with `p_x` below the zero-weight threshold contribute
    /// nothing.
    fn eval(&self, iso: &CMat) -> f64 {
        let dk = self.d_keep;
        let mut block = [Complex64::default(); MAX_KEPT_DIM * MAX_KEPT_DIM];
        let mut total = 0.0;
        for x in 0..iso.nrows() {
            block[..dk * dk].fill(Complex64::default());
            for i in 0..self.rank {
                let ui = iso[(x, i)];
                for j in 0..self.rank {
                    let w = ui * iso[(x, j)].conj();
                    if w.norm_sqr() < 1e-60 {
                        continue;
                    }
                    let k = &self.k_mats[i * self.rank + j];
                    for a in 0..dk {
                        for b in 0..dk {
                            block[a * dk + b] += w * k[(a, b)];
                        }
                    }
                }
            }
            let p: f64 = (0..dk).map(|a| block[a * dk + a].re).sum();
            if p < ZERO_WEIGHT {
                continue;
            }
            total += self.qp.weight(p) * entropy_of_block(&block[..dk * dk], dk, p, &self.qp);
        }
        total
    }
}

/// Precomputed context for rank-1 measurement searches on the second
/// subsystem: blocks `R_{ab}[s,t] = ρ[(a,s),(b,t)]` so the unnormalized
/// conditional state of outcome `x` is `σ_x[a,b] = ⟨v_x|R_{ab}|v_x⟩`.
struct PovmContext {
    blocks: Vec<CMat>,
    d_keep: usize,
    d_meas: usize,
    qp: QParam,
}

impl PovmContext {
    fn new(rho_ab: &DensityMatrix, qp: &QParam) -> Result<Self> {
        let d_keep = rho_ab.dims()[0];
        let d_meas = rho_ab.dims()[1];
        if d_keep > MAX_KEPT_DIM {
            return Err(Error::InvalidParam(format!(
                "kept subsystem dimension {d_keep} exceeds supported maximum {MAX_KEPT_DIM}"
            )));
        }
        let m = rho_ab.matrix();
        let mut blocks = Vec::with_capacity(d_keep * d_keep);
        for a in 0..d_keep {
            for b in 0..d_keep {
                blocks.push(CMat::from_fn(d_meas, d_meas, |s, t| {
                    m[(a * d_meas + s, b * d_meas + t)]
                }));
            }
        }
        Ok(Self {
            blocks,
            d_keep,
            d_meas,
            qp: *qp,
        })
    }

    /// `Σ_x p_x^q S_q(σ_x / p_x)` for the measurement encoded by the rows of
    /// an `m × d_meas` isometry.
    fn eval(&self, iso: &CMat) -> f64 {
        let dk = self.d_keep;
        let dm = self.d_meas;
        let mut block = [Complex64::default(); MAX_KEPT_DIM * MAX_KEPT_DIM];
        let mut total = 0.0;
        for x in 0..iso.nrows() {
            for a in 0..dk {
                for b in a..dk {
                    let r = &self.blocks[a * dk + b];
                    let mut acc = Complex64::default();
                    for s in 0..dm {
                        let left = iso[(x, s)].conj();
                        for t in 0..dm {
                            acc += left * r[(s, t)] * iso[(x, t)];
                        }
                    }
                    block[a * dk + b] = acc;
                    if a != b {
                        block[b * dk + a] = acc.conj();
                    }
                }
            }
            let p: f64 = (0..dk).map(|a| block[a * dk + a].re).sum();
            if p < ZERO_WEIGHT {
                continue;
            }
            total += self.qp.weight(p) * entropy_of_block(&block[..dk * dk], dk, p, &self.qp);
        }
        total
    }
}

fn marginal_entropy(rho_ab: &DensityMatrix, keep: usize, qp: &QParam) -> Result<f64> {
    tsallis_entropy(&rho_ab.partial_trace(&[keep])?, qp)
}

fn exact_report(measure: Measure, qp: &QParam, value: f64) -> MeasureReport {
    MeasureReport {
        measure,
        q: qp.q(),
        value,
        bound_side: BoundSide::Exact,
        m_outcomes: None,
        certificate: Certificate::None,
        opt: None,
    }
}

fn decomposition_cap(rank: usize, cfg: &OptConfig) -> Result<usize> {
    match cfg.m_outcomes {
        None => Ok((rank * rank).max(1)),
        Some(m) if m >= rank => Ok(m),
        Some(m) => Err(Error::InvalidParam(format!(
            "cardinality cap {m} below state rank {rank}"
        ))),
    }
}

fn measurement_cap(d_meas: usize, cfg: &OptConfig) -> Result<usize> {
    match cfg.m_outcomes {
        None => Ok(d_meas * d_meas),
        Some(m) if m >= d_meas => Ok(m),
        Some(m) => Err(Error::InvalidParam(format!(
            "outcome cap {m} below measured dimension {d_meas}"
        ))),
    }
}

fn decomposition_search(
    measure: Measure,
    rho_ab: &DensityMatrix,
    qp: &QParam,
    cfg: &OptConfig,
    direction: Direction,
    bound: BoundSide,
) -> Result<MeasureReport> {
    let (ctx, rank) = DecompContext::new(rho_ab, qp)?;
    let m = decomposition_cap(rank, cfg)?;
    let objective = |iso: &CMat| ctx.eval(iso);
    let opt = optimize(&objective, direction, (m, rank), cfg)?;
    let ens = hjw_ensemble(rho_ab, &opt.argument)?;
    Ok(MeasureReport {
        measure,
        q: qp.q(),
        value: snap_nonnegative(opt.value),
        bound_side: bound,
        m_outcomes: Some(m),
        certificate: Certificate::Ensemble(ens),
        opt: Some(OptSummary::from(&opt)),
    })
}

/// These measures are nonnegative for q >= 1; rounding can put the searched
/// value a few ulp below zero when the optimum is exactly zero. Snapping
/// inside the fp-noise window keeps the sign contract while staying within
/// 1e-10 of the optimizer's raw value (which `opt` still carries).
fn snap_nonnegative(value: f64) -> f64 {
    if value < 0.0 && value > -1e-10 {
        0.0
    } else {
        value
    }
}

/// q-expected entanglement: minimum of `Σ p_x^q S_q(tr_B ψ_x)` over
/// decompositions; `S_q(ρ_A)` exactly on pure inputs.
pub fn q_entanglement(
    rho_ab: &DensityMatrix,
    qp: &QParam,
    cfg: &OptConfig,
) -> Result<MeasureReport> {
    require_bipartite(rho_ab)?;
    require_q_ge_one(qp)?;
    if is_pure(rho_ab) {
        return Ok(exact_report(
            Measure::Entanglement,
            qp,
            marginal_entropy(rho_ab, 0, qp)?,
        ));
    }
    decomposition_search(
        Measure::Entanglement,
        rho_ab,
        qp,
        cfg,
        Direction::Min,
        BoundSide::Upper,
    )
}

/// q-expected entanglement of assistance: the dual maximum.
pub fn q_eoa(rho_ab: &DensityMatrix, qp: &QParam, cfg: &OptConfig) -> Result<MeasureReport> {
    require_bipartite(rho_ab)?;
    require_q_ge_one(qp)?;
    if is_pure(rho_ab) {
        return Ok(exact_report(
            Measure::EntanglementOfAssistance,
            qp,
            marginal_entropy(rho_ab, 0, qp)?,
        ));
    }
    decomposition_search(
        Measure::EntanglementOfAssistance,
        rho_ab,
        qp,
        cfg,
        Direction::Max,
        BoundSide::Lower,
    )
}

fn measurement_search(
    measure: Measure,
    rho_ab: &DensityMatrix,
    qp: &QParam,
    cfg: &OptConfig,
    direction: Direction,
    bound: BoundSide,
) -> Result<MeasureReport> {
    let s_a = marginal_entropy(rho_ab, 0, qp)?;
    let ctx = PovmContext::new(rho_ab, qp)?;
    let m = measurement_cap(ctx.d_meas, cfg)?;
    // the Tsallis-q difference of the induced ensemble
    let objective = |iso: &CMat| s_a - ctx.eval(iso);
    let opt = optimize(&objective, direction, (m, ctx.d_meas), cfg)?;
    let povm = RankOnePovm::from_isometry_rows(&opt.argument)?;
    Ok(MeasureReport {
        measure,
        q: qp.q(),
        value: snap_nonnegative(opt.value),
        bound_side: bound,
        m_outcomes: Some(m),
        certificate: Certificate::Povm(povm),
        opt: Some(OptSummary::from(&opt)),
    })
}

/// One-way classical q-correlation: maximum Tsallis-q difference of the
/// ensemble induced on A by rank-1 measurements on B. The rank-1 restriction
/// is lossless for q ≥ 1 since refining a measurement never decreases the
/// difference. On pure inputs every rank-1 measurement induces pure
/// conditionals, so the value is `S_q(ρ_A)` exactly.
pub fn q_cc(rho_ab: &DensityMatrix, qp: &QParam, cfg: &OptConfig) -> Result<MeasureReport> {
    require_bipartite(rho_ab)?;
    require_q_ge_one(qp)?;
    if is_pure(rho_ab) {
        return Ok(exact_report(
            Measure::ClassicalCorrelation,
            qp,
            marginal_entropy(rho_ab, 0, qp)?,
        ));
    }
    measurement_search(
        Measure::ClassicalCorrelation,
        rho_ab,
        qp,
        cfg,
        Direction::Max,
        BoundSide::Lower,
    )
}

/// One-way unlocalizable q-entanglement: the dual minimum over rank-1
/// measurements on B.
pub fn q_ue(rho_ab: &DensityMatrix, qp: &QParam, cfg: &OptConfig) -> Result<MeasureReport> {
    require_bipartite(rho_ab)?;
    require_q_ge_one(qp)?;
    if is_pure(rho_ab) {
        return Ok(exact_report(
            Measure::UnlocalizableEntanglement,
            qp,
            marginal_entropy(rho_ab, 0, qp)?,
        ));
    }
    measurement_search(
        Measure::UnlocalizableEntanglement,
        rho_ab,
        qp,
        cfg,
        Direction::Min,
        BoundSide::Upper,
    )
}

/// Quantum q-discord: Tsallis-q mutual entropy minus the classical
/// q-correlation. May be negative for q > 1; no sign is asserted.
pub fn q_discord(rho_ab: &DensityMatrix, qp: &QParam, cfg: &OptConfig) -> Result<MeasureReport> {
    require_bipartite(rho_ab)?;
    require_q_ge_one(qp)?;
    let mutual = mutual_entropy(rho_ab, qp)?;
    let cc = q_cc(rho_ab, qp, cfg)?;
    let bound = match cc.bound_side {
        BoundSide::Exact => BoundSide::Exact,
        // an under-estimated subtrahend over-estimates the difference
        _ => BoundSide::Upper,
    };
    Ok(MeasureReport {
        measure: Measure::Discord,
        q: qp.q(),
        value: mutual - cc.value,
        bound_side: bound,
        m_outcomes: cc.m_outcomes,
        certificate: cc.certificate,
        opt: cc.opt,
    })
}

/// One-way unlocalizable quantum q-discord: mutual entropy minus the
/// unlocalizable q-entanglement. On a pure bipartite state any measurement
/// on B leaves nothing unlocalized and the value is `S_q(ρ_B)` exactly.
pub fn q_ud(rho_ab: &DensityMatrix, qp: &QParam, cfg: &OptConfig) -> Result<MeasureReport> {
    require_bipartite(rho_ab)?;
    require_q_ge_one(qp)?;
    if is_pure(rho_ab) {
        return Ok(exact_report(
            Measure::UnlocalizableDiscord,
            qp,
            marginal_entropy(rho_ab, 1, qp)?,
        ));
    }
    let mutual = mutual_entropy(rho_ab, qp)?;
    let ue = q_ue(rho_ab, qp, cfg)?;
    let bound = match ue.bound_side {
        BoundSide::Exact => BoundSide::Exact,
        _ => BoundSide::Lower,
    };
    Ok(MeasureReport {
        measure: Measure::UnlocalizableDiscord,
        q: qp.q(),
        value: mutual - ue.value,
        bound_side: bound,
        m_outcomes: ue.m_outcomes,
        certificate: ue.certificate,
        opt: ue.opt,
    })
}

/// Evaluate a measure by name.
pub fn compute_measure(
    measure: Measure,
    rho_ab: &DensityMatrix,
    qp: &QParam,
    cfg: &OptConfig,
) -> Result<MeasureReport> {
    match measure {
        Measure::Entanglement => q_entanglement(rho_ab, qp, cfg),
        Measure::EntanglementOfAssistance => q_eoa(rho_ab, qp, cfg),
        Measure::ClassicalCorrelation => q_cc(rho_ab, qp, cfg),
        Measure::UnlocalizableEntanglement => q_ue(rho_ab, qp, cfg),
        Measure::Discord => q_discord(rho_ab, qp, cfg),
        Measure::UnlocalizableDiscord => q_ud(rho_ab, qp, cfg),
    }
}

/// The q-expected marginal entropy of a decomposition, evaluated through the
/// public ensemble path (used to cross-check certificates).
pub fn ensemble_objective_value(ens: &Ensemble, qp: &QParam) -> Result<f64> {
    let mut acc = 0.0;
    for (p, member) in ens.iter() {
        let marginal = member.to_density().partial_trace(&[0])?;
        acc += qp.weight(p) * tsallis_entropy(&marginal, qp)?;
    }
    Ok(acc)
}

/// The Tsallis-q difference induced by a rank-1 measurement on B, evaluated
/// through the public measurement path.
pub fn povm_objective_value(
    rho_ab: &DensityMatrix,
    povm: &RankOnePovm,
    qp: &QParam,
) -> Result<f64> {
    let induced = measure_induced_a_ensemble(rho_ab, &povm.clone().into())?;
    tsallis_difference(&induced, qp)
}

/// Recompute a report's value from its certificate through the public module
/// paths. Exact-path reports are recomputed from their closed forms.
pub fn evaluate_certificate(rho_ab: &DensityMatrix, report: &MeasureReport) -> Result<f64> {
    let qp = QParam::new(report.q)?;
    match (&report.certificate, report.measure) {
        (Certificate::Ensemble(ens), _) => ensemble_objective_value(ens, &qp),
        (Certificate::Povm(povm), Measure::ClassicalCorrelation)
        | (Certificate::Povm(povm), Measure::UnlocalizableEntanglement) => {
            povm_objective_value(rho_ab, povm, &qp)
        }
        (Certificate::Povm(povm), Measure::Discord)
        | (Certificate::Povm(povm), Measure::UnlocalizableDiscord) => {
            Ok(mutual_entropy(rho_ab, &qp)? - povm_objective_value(rho_ab, povm, &qp)?)
        }
        (Certificate::Povm(_), _) => Err(Error::InvalidParam(
            "measurement certificate on a decomposition measure".into(),
        )),
        (Certificate::None, Measure::UnlocalizableDiscord)
        | (Certificate::None, Measure::Discord) => marginal_entropy(rho_ab, 1, &qp),
        (Certificate::None, _) => marginal_entropy(rho_ab, 0, &qp),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{canonical_state, CVec, CanonicalState, PureState};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn q(v: f64) -> QParam {
        QParam::new(v).unwrap()
    }

    fn bell() -> DensityMatrix {
        let w = c(std::f64::consts::FRAC_1_SQRT_2);
        PureState::new(CVec::from_vec(vec![w, c(0.0), c(0.0), w]), vec![2, 2])
            .unwrap()
            .to_density()
    }

    fn cfg(seed: u64) -> OptConfig {
        OptConfig {
            seed,
            ..OptConfig::default()
        }
    }

    #[test]
    fn rejects_q_below_one() {
        let rho = bell();
        let qp = q(0.5);
        assert!(q_entanglement(&rho, &qp, &cfg(0)).is_err());
        assert!(q_cc(&rho, &qp, &cfg(0)).is_err());
        assert!(q_discord(&rho, &qp, &cfg(0)).is_err());
    }

    #[test]
    fn bell_state_exact_values() {
        let rho = bell();
        let e2 = q_entanglement(&rho, &q(2.0), &cfg(0)).unwrap();
        assert_eq!(e2.value, 0.5);
        assert_eq!(e2.bound_side, BoundSide::Exact);
        assert!(e2.certificate.is_none());

        let eoa1 = q_eoa(&rho, &q(1.0), &cfg(0)).unwrap();
        assert!((eoa1.value - 2f64.ln()).abs() < 1e-12);

        let ud2 = q_ud(&rho, &q(2.0), &cfg(0)).unwrap();
        assert_eq!(ud2.value, 0.5);
        assert_eq!(ud2.bound_side, BoundSide::Exact);

        // discord of a maximally entangled pure state: 2 ln 2 − ln 2
        let d1 = q_discord(&rho, &QParam::one(), &cfg(0)).unwrap();
        assert!((d1.value - 2f64.ln()).abs() < 1e-12);
        assert_eq!(d1.bound_side, BoundSide::Exact);
    }

    #[test]
    fn ghz_marginal_ac_has_zero_entanglement() {
        let ghz = canonical_state(CanonicalState::Ghz, &[2, 2, 2]).unwrap();
        let rho_ac = ghz.to_density().partial_trace(&[0, 2]).unwrap();
        for qv in [1.0, 2.0] {
            let rep = q_entanglement(&rho_ac, &q(qv), &cfg(3)).unwrap();
            assert!(rep.value.abs() <= 1e-8, "q={qv}: {}", rep.value);
            assert_eq!(rep.bound_side, BoundSide::Upper);
            // the certificate reproduces the value
            let again = evaluate_certificate(&rho_ac, &rep).unwrap();
            assert!((again - rep.value).abs() < 1e-10);
        }
    }

    #[test]
    fn pure_product_measures_vanish() {
        let product = canonical_state(CanonicalState::Product, &[2, 2, 2]).unwrap();
        let rho_ab = product.to_density().partial_trace(&[0, 1]).unwrap();
        for qv in [1.0, 2.0, 3.0] {
            let qp = q(qv);
            assert_eq!(q_cc(&rho_ab, &qp, &cfg(0)).unwrap().value, 0.0);
            assert_eq!(q_ue(&rho_ab, &qp, &cfg(0)).unwrap().value, 0.0);
            assert_eq!(q_entanglement(&rho_ab, &qp, &cfg(0)).unwrap().value, 0.0);
        }
    }

    #[test]
    fn mixed_product_measures_vanish_at_q_one() {
        // ρ_A ⊗ ρ_B with both marginals mixed: conditionals all equal ρ_A,
        // so at q = 1 the difference is zero for every measurement.
        let rho_a = DensityMatrix::new(
            CMat::from_row_slice(2, 2, &[c(0.7), c(0.0), c(0.0), c(0.3)]),
            vec![2],
        )
        .unwrap();
        let rho_b = DensityMatrix::new(
            CMat::from_row_slice(2, 2, &[c(0.6), c(0.1), c(0.1), c(0.4)]),
            vec![2],
        )
        .unwrap();
        let prod = rho_a.tensor(&rho_b);
        let qp = QParam::one();
        let cc = q_cc(&prod, &qp, &cfg(5)).unwrap();
        assert!(cc.value.abs() < 1e-7, "cc {}", cc.value);
        let ue = q_ue(&prod, &qp, &cfg(5)).unwrap();
        assert!(ue.value.abs() < 1e-7, "ue {}", ue.value);
        let d = q_discord(&prod, &qp, &cfg(5)).unwrap();
        assert!(d.value.abs() < 1e-7, "discord {}", d.value);
        let ud = q_ud(&prod, &qp, &cfg(5)).unwrap();
        assert!(ud.value.abs() < 1e-7, "ud {}", ud.value);
    }

    #[test]
    fn ghz_marginal_classical_correlation_saturates_marginal_entropy() {
        let ghz = canonical_state(CanonicalState::Ghz, &[2, 2, 2]).unwrap();
        let rho_ab = ghz.to_density().partial_trace(&[0, 1]).unwrap();
        for qv in [1.0, 1.5, 2.0, 3.0] {
            let qp = q(qv);
            let expect = if (qv - 1.0).abs() < 1e-12 {
                2f64.ln()
            } else {
                (1.0 - (2f64).powf(1.0 - qv)) / (qv - 1.0)
            };
            let rep = q_cc(&rho_ab, &qp, &cfg(11)).unwrap();
            assert!(
                (rep.value - expect).abs() < 1e-7,
                "q={qv}: {} vs {expect}",
                rep.value
            );
        }
    }

    #[test]
    fn ghz_marginal_ue_and_ud_at_q_one() {
        let ghz = canonical_state(CanonicalState::Ghz, &[2, 2, 2]).unwrap();
        let rho_ab = ghz.to_density().partial_trace(&[0, 1]).unwrap();
        let qp = QParam::one();
        let ue = q_ue(&rho_ab, &qp, &cfg(7)).unwrap();
        assert!(ue.value.abs() < 1e-7, "ue {}", ue.value);
        let ud = q_ud(&rho_ab, &qp, &cfg(7)).unwrap();
        assert!((ud.value - 2f64.ln()).abs() < 1e-6, "ud {}", ud.value);
        let d = q_discord(&rho_ab, &qp, &cfg(7)).unwrap();
        assert!(d.value.abs() < 1e-6, "discord {}", d.value);
    }

    #[test]
    fn classical_classical_state_has_zero_discord() {
        // Σ_i (1/2)|ii⟩⟨ii|
        let mut m = CMat::zeros(4, 4);
        m[(0, 0)] = c(0.5);
        m[(3, 3)] = c(0.5);
        let rho = DensityMatrix::new(m, vec![2, 2]).unwrap();
        let d = q_discord(&rho, &QParam::one(), &cfg(2)).unwrap();
        assert!(d.value.abs() < 1e-7, "discord {}", d.value);
    }

    #[test]
    fn eoa_of_maximally_mixed_two_qubits() {
        let rho = DensityMatrix::maximally_mixed(vec![2, 2]).unwrap();
        let mut config = cfg(13);
        config.m_outcomes = Some(4);
        let rep = q_eoa(&rho, &QParam::one(), &config).unwrap();
        assert!(
            (rep.value - 2f64.ln()).abs() < 1e-5,
            "eoa {} vs ln2",
            rep.value
        );
        let again = evaluate_certificate(&rho, &rep).unwrap();
        assert!((again - rep.value).abs() < 1e-10);
    }

    #[test]
    fn ghz_marginal_eoa_reaches_bell_mixture() {
        let ghz = canonical_state(CanonicalState::Ghz, &[2, 2, 2]).unwrap();
        let rho_ac = ghz.to_density().partial_trace(&[0, 2]).unwrap();
        let rep = q_eoa(&rho_ac, &QParam::one(), &cfg(17)).unwrap();
        assert!((rep.value - 2f64.ln()).abs() < 1e-6, "eoa {}", rep.value);
    }

    #[test]
    fn pure_path_consistency() {
        for seed in 0..10 {
            let psi = crate::qstate::haar_random_pure(&[2, 3], seed).unwrap();
            let rho = psi.to_density();
            let qp = q(1.5);
            let e = q_entanglement(&rho, &qp, &cfg(0)).unwrap().value;
            let a = q_eoa(&rho, &qp, &cfg(0)).unwrap().value;
            let u = q_ue(&rho, &qp, &cfg(0)).unwrap().value;
            let ud = q_ud(&rho, &qp, &cfg(0)).unwrap().value;
            let s_a = marginal_entropy(&rho, 0, &qp).unwrap();
            let s_b = marginal_entropy(&rho, 1, &qp).unwrap();
            assert_eq!(e, a);
            assert_eq!(e, u);
            assert!((e - s_a).abs() < 1e-12);
            assert!((ud - s_b).abs() < 1e-12);
            assert!((s_a - s_b).abs() <= 1e-9, "marginal spectra differ");
        }
    }

    #[test]
    fn ue_never_exceeds_cc() {
        for seed in 0..6 {
            let rho = crate::qstate::random_mixed(4, 3, 800 + seed)
                .unwrap()
                .with_dims(vec![2, 2])
                .unwrap();
            for qv in [1.0, 2.0] {
                let qp = q(qv);
                let ue = q_ue(&rho, &qp, &cfg(seed)).unwrap().value;
                let cc = q_cc(&rho, &qp, &cfg(seed)).unwrap().value;
                assert!(ue <= cc + 1e-9, "seed {seed} q {qv}: ue {ue} cc {cc}");
                assert!(ue >= 0.0 && cc >= 0.0, "sign contract: ue {ue} cc {cc}");
            }
        }
    }

    #[test]
    fn eoa_dominates_entanglement_under_shared_cap() {
        for seed in 0..6 {
            let rho = crate::qstate::random_mixed(4, 2, 900 + seed)
                .unwrap()
                .with_dims(vec![2, 2])
                .unwrap();
            for qv in [1.0, 2.0] {
                let qp = q(qv);
                let e = q_entanglement(&rho, &qp, &cfg(seed)).unwrap();
                let a = q_eoa(&rho, &qp, &cfg(seed)).unwrap();
                assert_eq!(e.m_outcomes, a.m_outcomes);
                assert!(a.value >= e.value - 1e-9, "seed {seed} q {qv}");
            }
        }
    }

    #[test]
    fn q_limit_continuity_of_measures() {
        for seed in 0..3 {
            let rho = crate::qstate::random_mixed(4, 2, 700 + seed)
                .unwrap()
                .with_dims(vec![2, 2])
                .unwrap();
            let qp_one = QParam::one();
            let qp_near = q(1.0 + 1e-6);
            for measure in [
                Measure::Entanglement,
                Measure::ClassicalCorrelation,
                Measure::UnlocalizableEntanglement,
                Measure::Discord,
            ] {
                let at_one = compute_measure(measure, &rho, &qp_one, &cfg(seed))
                    .unwrap()
                    .value;
                let near = compute_measure(measure, &rho, &qp_near, &cfg(seed))
                    .unwrap()
                    .value;
                assert!(
                    (at_one - near).abs() <= 1e-3,
                    "{measure:?} seed {seed}: {at_one} vs {near}"
                );
            }
        }
    }

    #[test]
    fn reports_are_deterministic() {
        let rho = crate::qstate::random_mixed(4, 2, 42)
            .unwrap()
            .with_dims(vec![2, 2])
            .unwrap();
        let a = q_cc(&rho, &q(2.0), &cfg(9)).unwrap();
        let b = q_cc(&rho, &q(2.0), &cfg(9)).unwrap();
        assert_eq!(a.value, b.value);
        assert_eq!(
            a.opt.as_ref().unwrap().per_restart_values,
            b.opt.as_ref().unwrap().per_restart_values
        );
    }
}
