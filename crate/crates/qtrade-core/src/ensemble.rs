//! Pure-state decompositions, rank-1 measurements, and the correspondence
//! between them.
//!
//! For a tripartite pure state, rank-1 measurements on the middle party are
//! in one-to-one correspondence with pure-state decompositions of the
//! reduced state on the outer parties; [`povm_to_ensemble`] and
//! [`ensemble_to_povm`] realize the two directions. [`hjw_ensemble`]
//! parameterizes all decompositions of a density matrix by isometries acting
//! on its eigen-decomposition.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::qstate::{
    haar_random_unitary, CMat, CVec, DensityMatrix, PureState, EIG_ZERO_CLAMP, PSD_TOL,
};

/// Ensemble members with weight below this are dropped: they carry no
/// q-expectation mass and would force normalization of null vectors.
pub const ZERO_WEIGHT: f64 = 1e-12;
/// Accepted max-elementwise deviation of `Σ_x M_x` from the identity.
pub const POVM_COMPLETENESS_TOL: f64 = 1e-9;
/// Accepted max-elementwise deviation of an ensemble mixture from its target.
pub const MIXTURE_TOL: f64 = 1e-9;
/// Accepted deviation of isometry columns from orthonormality.
pub const ISOMETRY_TOL: f64 = 1e-10;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Fix the global phase so the largest-magnitude amplitude is real positive.
fn canonical_phase(v: &mut CVec) {
    let mut best = 0usize;
    let mut mag = -1.0f64;
    for (k, z) in v.iter().enumerate() {
        let m = z.norm_sqr();
        if m > mag {
            mag = m;
            best = k;
        }
    }
    let z = v[best];
    let norm = z.norm();
    if norm > 0.0 {
        let phase = (z / norm).conj();
        for e in v.iter_mut() {
            *e *= phase;
        }
    }
}

/// A weighted list of pure states mixing to a target density matrix.
///
/// Members are canonicalized: descending weight, ties broken by the
/// lexicographic order of amplitude real parts, phases fixed so the
/// largest-magnitude amplitude of each member is real positive.
#[derive(Debug, Clone)]
pub struct Ensemble {
    weights: Vec<f64>,
    states: Vec<PureState>,
    target: DensityMatrix,
}

impl Ensemble {
    pub fn new(weights: Vec<f64>, states: Vec<PureState>, target: DensityMatrix) -> Result<Self> {
        if weights.len() != states.len() || weights.is_empty() {
            return Err(Error::InvalidParam(format!(
                "ensemble has {} weights and {} states",
                weights.len(),
                states.len()
            )));
        }
        if weights.iter().any(|&w| w.is_nan() || w <= 0.0) {
            return Err(Error::InvalidParam(
                "ensemble weights must be positive".into(),
            ));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidParam(format!(
                "ensemble weights sum to {total}, expected 1"
            )));
        }
        for s in &states {
            if s.dims() != target.dims() {
                return Err(Error::DimMismatch(format!(
                    "member dims {:?} != target dims {:?}",
                    s.dims(),
                    target.dims()
                )));
            }
        }
        let mut ens = Self {
            weights,
            states,
            target,
        };
        ens.canonicalize();
        let dev = ens.mixture_deviation();
        if dev > MIXTURE_TOL {
            return Err(Error::InvalidState(format!(
                "ensemble mixture deviates from target by {dev:e}"
            )));
        }
        Ok(ens)
    }

    fn canonicalize(&mut self) {
        for s in &mut self.states {
            let mut amps = s.amplitudes().clone();
            canonical_phase(&mut amps);
            *s = PureState::from_parts_unchecked(amps, s.dims().to_vec());
        }
        let mut order: Vec<usize> = (0..self.weights.len()).collect();
        order.sort_by(|&a, &b| {
            self.weights[b].total_cmp(&self.weights[a]).then_with(|| {
                let sa = self.states[a].amplitudes();
                let sb = self.states[b].amplitudes();
                for k in 0..sa.len() {
                    let ord = sa[k].re.total_cmp(&sb[k].re);
                    if ord != std::cmp::Ordering::Equal {
                        return ord;
                    }
                }
                std::cmp::Ordering::Equal
            })
        });
        self.weights = order.iter().map(|&k| self.weights[k]).collect();
        self.states = order.iter().map(|&k| self.states[k].clone()).collect();
    }

    /// Max-elementwise distance between `Σ w_i |ψ_i⟩⟨ψ_i|` and the target.
    pub fn mixture_deviation(&self) -> f64 {
        let n = self.target.total_dim();
        let mut acc = CMat::zeros(n, n);
        for (w, s) in self.iter() {
            acc += (s.amplitudes() * s.amplitudes().adjoint()) * c(w);
        }
        max_abs(&(acc - self.target.matrix()))
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn states(&self) -> &[PureState] {
        &self.states
    }

    pub fn target(&self) -> &DensityMatrix {
        &self.target
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &PureState)> {
        self.weights.iter().copied().zip(self.states.iter())
    }
}

/// A weighted list of density matrices (a probability ensemble of a mixed
/// state, e.g. the conditional states induced by a measurement).
#[derive(Debug, Clone)]
pub struct MixedEnsemble {
    weights: Vec<f64>,
    states: Vec<DensityMatrix>,
}

impl MixedEnsemble {
    pub fn new(weights: Vec<f64>, states: Vec<DensityMatrix>) -> Result<Self> {
        let ens = Self { weights, states };
        ens.validate()?;
        Ok(ens)
    }

    pub fn validate(&self) -> Result<()> {
        if self.weights.len() != self.states.len() || self.weights.is_empty() {
            return Err(Error::InvalidParam(format!(
                "ensemble has {} weights and {} states",
                self.weights.len(),
                self.states.len()
            )));
        }
        if self.weights.iter().any(|&w| w.is_nan() || w <= 0.0) {
            return Err(Error::InvalidParam(
                "ensemble weights must be positive".into(),
            ));
        }
        let total: f64 = self.weights.iter().sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidParam(format!(
                "ensemble weights sum to {total}, expected 1"
            )));
        }
        let dims = self.states[0].dims();
        for s in &self.states {
            if s.dims() != dims {
                return Err(Error::DimMismatch(
                    "ensemble members have mixed dimensions".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn mixture(&self) -> DensityMatrix {
        let n = self.states[0].total_dim();
        let mut acc = CMat::zeros(n, n);
        for (w, s) in self.iter() {
            acc += s.matrix() * c(w);
        }
        DensityMatrix::from_parts_unchecked(acc, self.states[0].dims().to_vec())
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn states(&self) -> &[DensityMatrix] {
        &self.states
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &DensityMatrix)> {
        self.weights.iter().copied().zip(self.states.iter())
    }
}

/// A rank-1 measurement `{|v_x⟩⟨v_x|}` on one subsystem, stored by its
/// (unnormalized) vectors.
#[derive(Debug, Clone)]
pub struct RankOnePovm {
    vectors: Vec<CVec>,
    dim: usize,
}

impl RankOnePovm {
    pub fn new(vectors: Vec<CVec>) -> Result<Self> {
        if vectors.is_empty() {
            return Err(Error::InvalidParam("empty measurement".into()));
        }
        let dim = vectors[0].len();
        if vectors.iter().any(|v| v.len() != dim) {
            return Err(Error::DimMismatch(
                "measurement vectors have mixed dimensions".into(),
            ));
        }
        if vectors.iter().any(|v| v.norm_squared() < ZERO_WEIGHT) {
            return Err(Error::InvalidParam(
                "rank-1 measurement elements must be nonzero".into(),
            ));
        }
        let mut acc = CMat::zeros(dim, dim);
        for v in &vectors {
            acc += v * v.adjoint();
        }
        let dev = max_abs(&(acc - CMat::identity(dim, dim)));
        if dev > POVM_COMPLETENESS_TOL {
            return Err(Error::InvalidState(format!(
                "measurement completeness deviates from identity by {dev:e}"
            )));
        }
        Ok(Self { vectors, dim })
    }

    /// Rows of an `m × d` isometry as measurement vectors, dropping
    /// zero rows. `V†V = I_d` is exactly the completeness relation.
    pub fn from_isometry_rows(iso: &CMat) -> Result<Self> {
        let d = iso.ncols();
        let mut vectors = Vec::with_capacity(iso.nrows());
        for x in 0..iso.nrows() {
            let v = CVec::from_fn(d, |k, _| iso[(x, k)]);
            if v.norm_squared() >= ZERO_WEIGHT {
                vectors.push(v);
            }
        }
        Self::new(vectors)
    }

    /// The computational-basis projective measurement.
    pub fn computational(dim: usize) -> Self {
        let vectors = (0..dim)
            .map(|k| {
                let mut v = CVec::zeros(dim);
                v[k] = c(1.0);
                v
            })
            .collect();
        Self { vectors, dim }
    }

    /// Projective measurement onto the columns of a unitary.
    pub fn from_unitary_columns(u: &CMat) -> Result<Self> {
        let vectors = (0..u.ncols())
            .map(|k| CVec::from_column_slice(u.column(k).as_slice()))
            .collect();
        Self::new(vectors)
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vectors(&self) -> &[CVec] {
        &self.vectors
    }

    /// The POVM element `|v_x⟩⟨v_x|`.
    pub fn element(&self, x: usize) -> CMat {
        &self.vectors[x] * self.vectors[x].adjoint()
    }

    pub fn to_general(&self) -> GeneralPovm {
        GeneralPovm {
            operators: (0..self.len()).map(|x| self.element(x)).collect(),
            dim: self.dim,
        }
    }
}

/// A measurement with arbitrary positive-semidefinite elements.
#[derive(Debug, Clone)]
pub struct GeneralPovm {
    operators: Vec<CMat>,
    dim: usize,
}

impl GeneralPovm {
    pub fn new(operators: Vec<CMat>) -> Result<Self> {
        if operators.is_empty() {
            return Err(Error::InvalidParam("empty measurement".into()));
        }
        let dim = operators[0].nrows();
        let mut acc = CMat::zeros(dim, dim);
        for op in &operators {
            if op.nrows() != dim || op.ncols() != dim {
                return Err(Error::DimMismatch(
                    "measurement operators have mixed dimensions".into(),
                ));
            }
            let herm = crate::qstate::hermiticity_deviation(op);
            if !herm.is_finite() || herm > 1e-10 {
                return Err(Error::InvalidState(format!(
                    "measurement operator deviates from hermiticity by {herm:e}"
                )));
            }
            let raw_min = nalgebra::SymmetricEigen::new(op.clone())
                .eigenvalues
                .iter()
                .copied()
                .fold(f64::INFINITY, f64::min);
            if raw_min < -PSD_TOL {
                return Err(Error::InvalidState(format!(
                    "measurement operator has eigenvalue {raw_min:e}"
                )));
            }
            acc += op;
        }
        let dev = max_abs(&(acc - CMat::identity(dim, dim)));
        if dev > POVM_COMPLETENESS_TOL {
            return Err(Error::InvalidState(format!(
                "measurement completeness deviates from identity by {dev:e}"
            )));
        }
        Ok(Self { operators, dim })
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn operators(&self) -> &[CMat] {
        &self.operators
    }
}

impl From<RankOnePovm> for GeneralPovm {
    fn from(p: RankOnePovm) -> Self {
        p.to_general()
    }
}

/// Pure-state decomposition of `rho` from an isometry acting on its
/// eigen-decomposition: members `|ψ̃_x⟩ = Σ_i u[x][i] √λ_i |e_i⟩` with
/// weights `p_x = ⟨ψ̃_x|ψ̃_x⟩`.
///
/// `mixing` must have `rank(rho)` orthonormal columns and at least that many
/// rows. Zero-weight members are dropped.
pub fn hjw_ensemble(rho: &DensityMatrix, mixing: &CMat) -> Result<Ensemble> {
    let spec = rho.spectral()?;
    let r = spec.rank();
    if mixing.ncols() != r {
        return Err(Error::DimMismatch(format!(
            "mixing has {} columns, state has rank {r}",
            mixing.ncols()
        )));
    }
    if mixing.nrows() < r {
        return Err(Error::DimMismatch(format!(
            "mixing has {} rows, need at least rank {r}",
            mixing.nrows()
        )));
    }
    let gram = mixing.adjoint() * mixing;
    let dev = max_abs(&(gram - CMat::identity(r, r)));
    if dev > ISOMETRY_TOL {
        return Err(Error::InvalidParam(format!(
            "mixing columns deviate from orthonormality by {dev:e}"
        )));
    }
    let n = rho.total_dim();
    let scaled: Vec<CVec> = (0..r)
        .map(|i| spec.eigenvector(i) * c(spec.eigenvalues[i].sqrt()))
        .collect();
    let mut weights = Vec::new();
    let mut states = Vec::new();
    for x in 0..mixing.nrows() {
        let mut v = CVec::zeros(n);
        for (i, s) in scaled.iter().enumerate() {
            v += s * mixing[(x, i)];
        }
        let p = v.norm_squared();
        if p < ZERO_WEIGHT {
            continue;
        }
        weights.push(p);
        states.push(PureState::from_parts_unchecked(
            v / c(p.sqrt()),
            rho.dims().to_vec(),
        ));
    }
    Ensemble::new(weights, states, rho.clone())
}

fn require_tripartite(psi: &PureState) -> Result<()> {
    if psi.dims().len() != 3 {
        return Err(Error::DimMismatch(format!(
            "expected a tripartite state, got dims {:?}",
            psi.dims()
        )));
    }
    Ok(())
}

/// The decomposition of `ρ_AC` induced by a rank-1 measurement on `B`:
/// `p_x = ‖(I ⊗ ⟨v_x| ⊗ I)|ψ⟩‖²` with the projected vectors as members.
pub fn povm_to_ensemble(psi: &PureState, povm: &RankOnePovm) -> Result<Ensemble> {
    require_tripartite(psi)?;
    if povm.dim() != psi.dims()[1] {
        return Err(Error::DimMismatch(format!(
            "measurement dimension {} != middle subsystem dimension {}",
            povm.dim(),
            psi.dims()[1]
        )));
    }
    let member_dims = psi.complement_dims(&[1]);
    let mut weights = Vec::new();
    let mut states = Vec::new();
    for v in povm.vectors() {
        let w = psi.project_subset(&[1], v)?;
        let p = w.norm_squared();
        if p < ZERO_WEIGHT {
            continue;
        }
        weights.push(p);
        states.push(PureState::from_parts_unchecked(
            w / c(p.sqrt()),
            member_dims.clone(),
        ));
    }
    let target = psi.to_density().partial_trace(&[0, 2])?;
    Ensemble::new(weights, states, target)
}

/// The rank-1 measurement on `B` inducing a given decomposition of `ρ_AC`.
///
/// Writes `|ψ⟩ = Σ_i √λ_i |e_i⟩_AC |f_i⟩_B` over the eigenbasis of `ρ_AC`,
/// reads off the mixing coefficients of the ensemble relative to that basis,
/// and maps them to measurement vectors on `B`. Elements supported on the
/// kernel of `ρ_B` are appended so the measurement resolves the full
/// identity; they never fire on `|ψ⟩`.
pub fn ensemble_to_povm(psi: &PureState, ens: &Ensemble) -> Result<RankOnePovm> {
    require_tripartite(psi)?;
    let rho_ac = psi.to_density().partial_trace(&[0, 2])?;
    let dev = max_abs(&(ens.target().matrix() - rho_ac.matrix()));
    if dev > 1e-8 {
        return Err(Error::DimMismatch(format!(
            "ensemble target deviates from tr_B of the state by {dev:e}"
        )));
    }
    let spec = rho_ac.spectral()?;
    let r = spec.rank();
    let d_b = psi.dims()[1];
    // B-side Schmidt frame, phase-locked to the AC eigenvectors through ψ.
    let mut frame: Vec<CVec> = Vec::with_capacity(r);
    for i in 0..r {
        let e = spec.eigenvector(i);
        let f = psi.project_subset(&[0, 2], &e)?;
        frame.push(f / c(spec.eigenvalues[i].sqrt()));
    }
    let mut vectors = Vec::with_capacity(ens.len());
    for (p, member) in ens.iter() {
        let mut v = CVec::zeros(d_b);
        for (i, f) in frame.iter().enumerate() {
            // u[x][i] = √p ⟨e_i|φ^x⟩ / √λ_i
            let overlap = spec.eigenvector(i).dotc(member.amplitudes());
            let u = overlap * c((p / spec.eigenvalues[i]).sqrt());
            v += f * u.conj();
        }
        vectors.push(v);
    }
    // Complete to the identity on ker(ρ_B) by Gram-Schmidt over the frame.
    let mut kernel: Vec<CVec> = Vec::new();
    for b in 0..d_b {
        if frame.len() + kernel.len() >= d_b {
            break;
        }
        let mut g = CVec::zeros(d_b);
        g[b] = c(1.0);
        for f in frame.iter().chain(kernel.iter()) {
            let overlap = f.dotc(&g);
            g -= f * overlap;
        }
        let norm = g.norm();
        if norm > 1e-6 {
            kernel.push(g / c(norm));
        }
    }
    vectors.extend(kernel);
    RankOnePovm::new(vectors)
}

/// The probability ensemble of conditional `A`-states induced by measuring
/// `B` of a bipartite state: `{p_x, tr_B[(I ⊗ M_x) ρ_AB] / p_x}`.
/// Zero-probability outcomes are dropped.
pub fn measure_induced_a_ensemble(
    rho_ab: &DensityMatrix,
    povm: &GeneralPovm,
) -> Result<MixedEnsemble> {
    if rho_ab.dims().len() != 2 {
        return Err(Error::DimMismatch(format!(
            "expected a bipartite state, got dims {:?}",
            rho_ab.dims()
        )));
    }
    if povm.dim() != rho_ab.dims()[1] {
        return Err(Error::DimMismatch(format!(
            "measurement dimension {} != second subsystem dimension {}",
            povm.dim(),
            rho_ab.dims()[1]
        )));
    }
    let dims_a = vec![rho_ab.dims()[0]];
    let mut weights = Vec::new();
    let mut states = Vec::new();
    for m in povm.operators() {
        let sigma = rho_ab.reduce_with_operator(&[1], m)?;
        let p = sigma.trace().re;
        if p < ZERO_WEIGHT {
            continue;
        }
        states.push(DensityMatrix::from_parts_unchecked(
            sigma / c(p),
            dims_a.clone(),
        ));
        weights.push(p);
    }
    MixedEnsemble::new(weights, states)
}

/// Split every measurement operator into rank-1 pieces via its spectral
/// decomposition. Returns the refined measurement together with the index of
/// the original operator each element came from.
pub fn refine_to_rank1(povm: &GeneralPovm) -> Result<(RankOnePovm, Vec<usize>)> {
    let mut vectors = Vec::new();
    let mut origin = Vec::new();
    for (x, op) in povm.operators().iter().enumerate() {
        let se = nalgebra::SymmetricEigen::new(op.clone());
        for k in 0..op.nrows() {
            let lam = se.eigenvalues[k];
            if lam > EIG_ZERO_CLAMP {
                let v = CVec::from_column_slice(se.eigenvectors.column(k).as_slice());
                vectors.push(v * c(lam.sqrt()));
                origin.push(x);
            }
        }
    }
    Ok((RankOnePovm::new(vectors)?, origin))
}

/// Haar-random rank-1 measurement with `m` outcomes on a `dim`-dimensional
/// subsystem: rows of the first `dim` columns of a Haar unitary on `m`.
pub fn random_rank1_povm<R: Rng>(dim: usize, m: usize, rng: &mut R) -> Result<RankOnePovm> {
    if m < dim {
        return Err(Error::InvalidParam(format!(
            "a rank-1 measurement needs at least {dim} outcomes, got {m}"
        )));
    }
    let u = haar_random_unitary(m, rng);
    let iso = u.columns(0, dim).into_owned();
    RankOnePovm::from_isometry_rows(&iso)
}

/// Random general measurement built by grouping the elements of a random
/// rank-1 measurement into `groups` coarse operators.
pub fn random_general_povm<R: Rng>(dim: usize, groups: usize, rng: &mut R) -> Result<GeneralPovm> {
    let m = (2 * dim).max(groups);
    let fine = random_rank1_povm(dim, m, rng)?;
    let mut ops = vec![CMat::zeros(dim, dim); groups];
    for (x, v) in fine.vectors().iter().enumerate() {
        let g = if x < groups {
            x
        } else {
            rng.gen_range(0..groups)
        };
        ops[g] += v * v.adjoint();
    }
    // grouping may leave an operator empty when m == groups collides
    let ops: Vec<CMat> = ops.into_iter().filter(|op| max_abs(op) > 1e-14).collect();
    GeneralPovm::new(ops)
}
