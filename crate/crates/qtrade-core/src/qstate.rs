//! Dense complex linear algebra for small multipartite quantum states.
//!
//! States carry an ordered list of subsystem dimensions. Basis ordering is
//! the standard Kronecker convention: the first subsystem is the most
//! significant digit of the linear index, so `tensor(a, b)` is literally the
//! Kronecker product with concatenated dimension lists. Partial traces and
//! projections are index-set based and work on any subset of subsystems.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

/// Maximum elementwise deviation from hermiticity accepted on construction.
pub const HERM_TOL: f64 = 1e-12;
/// Accepted deviation of the trace from one.
pub const TRACE_TOL: f64 = 1e-12;
/// Accepted deviation of a pure-state norm from one.
pub const NORM_TOL: f64 = 1e-12;
/// Eigenvalues above `-PSD_TOL` count as nonnegative.
pub const PSD_TOL: f64 = 1e-10;
/// Spectral weights below this are treated as exact zeros (and weights
/// within the same distance of one as exact ones). Spectral noise dominates
/// below this scale at the dimensions this crate targets.
pub const EIG_ZERO_CLAMP: f64 = 1e-12;
/// Default cap on the total Hilbert-space dimension. The identity checks
/// this crate exists for are exact, so small dimensions suffice; the cap is
/// a guard against accidentally huge inputs, not a hard algorithmic limit.
pub const DEFAULT_DIM_CAP: usize = 64;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn check_dims(dims: &[usize], cap: usize) -> Result<usize> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::InvalidParam(format!(
            "subsystem dimensions must be positive, got {dims:?}"
        )));
    }
    let total: usize = dims.iter().product();
    if total > cap {
        return Err(Error::InvalidParam(format!(
            "total dimension {total} exceeds cap {cap}"
        )));
    }
    Ok(total)
}

/// Row-major strides for a dimension list (first subsystem most significant).
fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1usize; dims.len()];
    for j in (0..dims.len().saturating_sub(1)).rev() {
        s[j] = s[j + 1] * dims[j + 1];
    }
    s
}

/// For every linear index over `dims[subset]` (row-major within the subset),
/// the contribution to the full linear index.
fn subset_offsets(dims: &[usize], subset: &[usize]) -> Vec<usize> {
    let full = strides(dims);
    let sub_dims: Vec<usize> = subset.iter().map(|&k| dims[k]).collect();
    let total: usize = sub_dims.iter().product();
    let mut offsets = vec![0usize; total];
    for (lin, off) in offsets.iter_mut().enumerate() {
        let mut rem = lin;
        let mut acc = 0usize;
        for (j, &d) in sub_dims.iter().enumerate().rev() {
            acc += (rem % d) * full[subset[j]];
            rem /= d;
        }
        *off = acc;
    }
    offsets
}

fn validate_subset(dims: &[usize], subset: &[usize]) -> Result<()> {
    if subset.is_empty() {
        return Err(Error::InvalidParam("subsystem subset is empty".into()));
    }
    for w in subset.windows(2) {
        if w[0] >= w[1] {
            return Err(Error::InvalidParam(format!(
                "subsystem subset must be strictly increasing, got {subset:?}"
            )));
        }
    }
    if *subset.last().unwrap() >= dims.len() {
        return Err(Error::InvalidParam(format!(
            "subsystem index {} out of range for {} subsystems",
            subset.last().unwrap(),
            dims.len()
        )));
    }
    Ok(())
}

fn complement(n: usize, subset: &[usize]) -> Vec<usize> {
    (0..n).filter(|k| !subset.contains(k)).collect()
}

/// A normalized pure state with an ordered subsystem factorization.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: CVec,
    dims: Vec<usize>,
}

impl PureState {
    pub fn new(amplitudes: CVec, dims: Vec<usize>) -> Result<Self> {
        Self::with_dim_cap(amplitudes, dims, DEFAULT_DIM_CAP)
    }

    pub fn with_dim_cap(amplitudes: CVec, dims: Vec<usize>, cap: usize) -> Result<Self> {
        let total = check_dims(&dims, cap)?;
        if amplitudes.len() != total {
            return Err(Error::DimMismatch(format!(
                "amplitude length {} != product of dims {total}",
                amplitudes.len()
            )));
        }
        let norm = amplitudes.norm();
        if !norm.is_finite() || (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!(
                "pure state norm {norm} deviates from 1 beyond {NORM_TOL:e}"
            )));
        }
        Ok(Self { amplitudes, dims })
    }

    /// Skips validation; for internal construction where the invariants hold
    /// by the algebra that produced the amplitudes.
    pub(crate) fn from_parts_unchecked(amplitudes: CVec, dims: Vec<usize>) -> Self {
        Self { amplitudes, dims }
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(dims: Vec<usize>, index: usize) -> Result<Self> {
        let total = check_dims(&dims, DEFAULT_DIM_CAP)?;
        if index >= total {
            return Err(Error::InvalidParam(format!(
                "basis index {index} out of range for dimension {total}"
            )));
        }
        let mut amps = CVec::zeros(total);
        amps[index] = c(1.0);
        Ok(Self {
            amplitudes: amps,
            dims,
        })
    }

    pub fn amplitudes(&self) -> &CVec {
        &self.amplitudes
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn total_dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn to_density(&self) -> DensityMatrix {
        let m = &self.amplitudes * self.amplitudes.adjoint();
        DensityMatrix {
            matrix: m,
            dims: self.dims.clone(),
        }
    }

    /// Kronecker product, concatenating the dimension lists.
    pub fn tensor(&self, other: &PureState) -> PureState {
        let n = self.amplitudes.len();
        let m = other.amplitudes.len();
        let mut amps = CVec::zeros(n * m);
        for i in 0..n {
            let a = self.amplitudes[i];
            for j in 0..m {
                amps[i * m + j] = a * other.amplitudes[j];
            }
        }
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        PureState {
            amplitudes: amps,
            dims,
        }
    }

    /// Reorders subsystems: new subsystem `j` is old subsystem `perm[j]`.
    pub fn permute_subsystems(&self, perm: &[usize]) -> Result<PureState> {
        check_permutation(perm, self.dims.len())?;
        let new_dims: Vec<usize> = perm.iter().map(|&k| self.dims[k]).collect();
        let old_strides = strides(&self.dims);
        let new_strides = strides(&new_dims);
        let mut amps = CVec::zeros(self.total_dim());
        for old in 0..self.total_dim() {
            let mut new_idx = 0usize;
            for (j, &k) in perm.iter().enumerate() {
                let digit = (old / old_strides[k]) % self.dims[k];
                new_idx += digit * new_strides[j];
            }
            amps[new_idx] = self.amplitudes[old];
        }
        Ok(PureState {
            amplitudes: amps,
            dims: new_dims,
        })
    }

    /// `(I ⊗ ⟨v|_S)|ψ⟩`: contracts subsystems `subset` against `v`, returning
    /// the (unnormalized) vector on the complementary subsystems.
    pub fn project_subset(&self, subset: &[usize], v: &CVec) -> Result<CVec> {
        validate_subset(&self.dims, subset)?;
        let s_off = subset_offsets(&self.dims, subset);
        if v.len() != s_off.len() {
            return Err(Error::DimMismatch(format!(
                "projector length {} != subset dimension {}",
                v.len(),
                s_off.len()
            )));
        }
        let comp = complement(self.dims.len(), subset);
        if comp.is_empty() {
            return Err(Error::InvalidParam(
                "cannot project out every subsystem".into(),
            ));
        }
        let c_off = subset_offsets(&self.dims, &comp);
        let mut out = CVec::zeros(c_off.len());
        for (ci, &co) in c_off.iter().enumerate() {
            let mut acc = Complex64::default();
            for (si, &so) in s_off.iter().enumerate() {
                acc += v[si].conj() * self.amplitudes[co + so];
            }
            out[ci] = acc;
        }
        Ok(out)
    }

    /// Dimensions of the subsystems not in `subset`, in ascending order.
    pub fn complement_dims(&self, subset: &[usize]) -> Vec<usize> {
        complement(self.dims.len(), subset)
            .iter()
            .map(|&k| self.dims[k])
            .collect()
    }
}

fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    if perm.len() != n {
        return Err(Error::InvalidParam(format!(
            "permutation length {} != {n}",
            perm.len()
        )));
    }
    let mut seen = vec![false; n];
    for &k in perm {
        if k >= n || seen[k] {
            return Err(Error::InvalidParam(format!("invalid permutation {perm:?}")));
        }
        seen[k] = true;
    }
    Ok(())
}

/// A Hermitian, positive semidefinite, unit-trace matrix with an ordered
/// subsystem factorization.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: CMat,
    dims: Vec<usize>,
}

impl DensityMatrix {
    pub fn new(matrix: CMat, dims: Vec<usize>) -> Result<Self> {
        Self::with_dim_cap(matrix, dims, DEFAULT_DIM_CAP)
    }

    pub fn with_dim_cap(matrix: CMat, dims: Vec<usize>, cap: usize) -> Result<Self> {
        let total = check_dims(&dims, cap)?;
        if matrix.nrows() != total || matrix.ncols() != total {
            return Err(Error::DimMismatch(format!(
                "matrix is {}x{}, expected {total}x{total}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let herm_dev = hermiticity_deviation(&matrix);
        if !herm_dev.is_finite() || herm_dev > HERM_TOL {
            return Err(Error::InvalidState(format!(
                "hermiticity deviation {herm_dev:e} exceeds {HERM_TOL:e}"
            )));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!(
                "trace {tr} deviates from 1 beyond {TRACE_TOL:e}"
            )));
        }
        let dm = Self { matrix, dims };
        let min_eig = dm.spectral_unchecked().eigenvalues_raw_min;
        if min_eig < -PSD_TOL {
            return Err(Error::InvalidState(format!(
                "minimum eigenvalue {min_eig:e} below -{PSD_TOL:e}"
            )));
        }
        Ok(dm)
    }

    pub(crate) fn from_parts_unchecked(matrix: CMat, dims: Vec<usize>) -> Self {
        Self { matrix, dims }
    }

    /// `I/d` on the given subsystem layout.
    pub fn maximally_mixed(dims: Vec<usize>) -> Result<Self> {
        let total = check_dims(&dims, DEFAULT_DIM_CAP)?;
        let m = CMat::identity(total, total) * c(1.0 / total as f64);
        Ok(Self { matrix: m, dims })
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn total_dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// tr(ρ²); equals 1 exactly on pure states.
    pub fn purity(&self) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.matrix.nrows() {
            for j in 0..self.matrix.ncols() {
                acc += (self.matrix[(i, j)] * self.matrix[(j, i)]).re;
            }
        }
        acc
    }

    /// Reinterpret the subsystem factorization (product must be unchanged).
    pub fn with_dims(self, dims: Vec<usize>) -> Result<Self> {
        let total = check_dims(&dims, DEFAULT_DIM_CAP)?;
        if total != self.matrix.nrows() {
            return Err(Error::DimMismatch(format!(
                "cannot reinterpret {}-dimensional state as {dims:?}",
                self.matrix.nrows()
            )));
        }
        Ok(Self {
            matrix: self.matrix,
            dims,
        })
    }

    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        let m = self.matrix.kronecker(&other.matrix);
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        DensityMatrix { matrix: m, dims }
    }

    /// Partial trace keeping the subsystems in `keep` (strictly increasing).
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        validate_subset(&self.dims, keep)?;
        let traced = complement(self.dims.len(), keep);
        if traced.is_empty() {
            return Ok(self.clone());
        }
        let k_off = subset_offsets(&self.dims, keep);
        let t_off = subset_offsets(&self.dims, &traced);
        let dk = k_off.len();
        let mut out = CMat::zeros(dk, dk);
        for (r, &ro) in k_off.iter().enumerate() {
            for (s, &so) in k_off.iter().enumerate() {
                let mut acc = Complex64::default();
                for &to in &t_off {
                    acc += self.matrix[(ro + to, so + to)];
                }
                out[(r, s)] = acc;
            }
        }
        let dims = keep.iter().map(|&k| self.dims[k]).collect();
        Ok(DensityMatrix { matrix: out, dims })
    }

    pub fn permute_subsystems(&self, perm: &[usize]) -> Result<DensityMatrix> {
        check_permutation(perm, self.dims.len())?;
        let new_dims: Vec<usize> = perm.iter().map(|&k| self.dims[k]).collect();
        let old_strides = strides(&self.dims);
        let new_strides = strides(&new_dims);
        let n = self.total_dim();
        let mut map = vec![0usize; n];
        for (old, slot) in map.iter_mut().enumerate() {
            let mut new_idx = 0usize;
            for (j, &k) in perm.iter().enumerate() {
                let digit = (old / old_strides[k]) % self.dims[k];
                new_idx += digit * new_strides[j];
            }
            *slot = new_idx;
        }
        let mut out = CMat::zeros(n, n);
        for r in 0..n {
            for s in 0..n {
                out[(map[r], map[s])] = self.matrix[(r, s)];
            }
        }
        Ok(DensityMatrix {
            matrix: out,
            dims: new_dims,
        })
    }

    /// `tr_S[(I ⊗ M_S) ρ]` for an operator `M` on the subsystems `subset`;
    /// returns the (unnormalized) conditional operator on the complement.
    pub fn reduce_with_operator(&self, subset: &[usize], m: &CMat) -> Result<CMat> {
        validate_subset(&self.dims, subset)?;
        let s_off = subset_offsets(&self.dims, subset);
        let ds = s_off.len();
        if m.nrows() != ds || m.ncols() != ds {
            return Err(Error::DimMismatch(format!(
                "operator is {}x{}, subset dimension is {ds}",
                m.nrows(),
                m.ncols()
            )));
        }
        let comp = complement(self.dims.len(), subset);
        if comp.is_empty() {
            return Err(Error::InvalidParam(
                "operator acts on every subsystem; use plain matrix algebra".into(),
            ));
        }
        let c_off = subset_offsets(&self.dims, &comp);
        let dc = c_off.len();
        let mut out = CMat::zeros(dc, dc);
        for (a, &ao) in c_off.iter().enumerate() {
            for (b, &bo) in c_off.iter().enumerate() {
                let mut acc = Complex64::default();
                for (s, &so) in s_off.iter().enumerate() {
                    for (t, &uo) in s_off.iter().enumerate() {
                        acc += m[(s, t)] * self.matrix[(ao + uo, bo + so)];
                    }
                }
                out[(a, b)] = acc;
            }
        }
        Ok(out)
    }

    /// `(I ⊗ ⟨v|_S) ρ (I ⊗ |v⟩_S)`: the rank-1 special case of
    /// [`Self::reduce_with_operator`], on the hot path of every measurement
    /// optimization.
    pub fn sandwich_subset(&self, subset: &[usize], v: &CVec) -> Result<CMat> {
        validate_subset(&self.dims, subset)?;
        let s_off = subset_offsets(&self.dims, subset);
        if v.len() != s_off.len() {
            return Err(Error::DimMismatch(format!(
                "vector length {} != subset dimension {}",
                v.len(),
                s_off.len()
            )));
        }
        let comp = complement(self.dims.len(), subset);
        if comp.is_empty() {
            return Err(Error::InvalidParam(
                "cannot sandwich every subsystem".into(),
            ));
        }
        let c_off = subset_offsets(&self.dims, &comp);
        let dc = c_off.len();
        let mut out = CMat::zeros(dc, dc);
        for (a, &ao) in c_off.iter().enumerate() {
            for (b, &bo) in c_off.iter().enumerate() {
                let mut acc = Complex64::default();
                for (s, &so) in s_off.iter().enumerate() {
                    let left = v[s].conj();
                    for (t, &uo) in s_off.iter().enumerate() {
                        acc += left * self.matrix[(ao + so, bo + uo)] * v[t];
                    }
                }
                out[(a, b)] = acc;
            }
        }
        Ok(out)
    }

    /// Spectral decomposition with eigenvalues sorted descending and clamped
    /// to `[0, 1]`. Errors if the matrix is not Hermitian within tolerance or
    /// has an eigenvalue below `-PSD_TOL`.
    pub fn spectral(&self) -> Result<Spectrum> {
        let herm_dev = hermiticity_deviation(&self.matrix);
        if !herm_dev.is_finite() || herm_dev > HERM_TOL {
            return Err(Error::InvalidState(format!(
                "hermiticity deviation {herm_dev:e} exceeds {HERM_TOL:e}"
            )));
        }
        let spec = self.spectral_unchecked();
        if spec.eigenvalues_raw_min < -PSD_TOL {
            return Err(Error::InvalidState(format!(
                "minimum eigenvalue {:e} below -{PSD_TOL:e}",
                spec.eigenvalues_raw_min
            )));
        }
        Ok(spec.spectrum)
    }

    fn spectral_unchecked(&self) -> SpectralRaw {
        let se = nalgebra::SymmetricEigen::new(self.matrix.clone());
        let n = self.total_dim();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| se.eigenvalues[b].total_cmp(&se.eigenvalues[a]));
        let mut eigenvalues = Vec::with_capacity(n);
        let mut eigenvectors = CMat::zeros(n, n);
        let mut raw_min = f64::INFINITY;
        for (slot, &k) in order.iter().enumerate() {
            let lam = se.eigenvalues[k];
            raw_min = raw_min.min(lam);
            eigenvalues.push(lam.clamp(0.0, 1.0));
            eigenvectors
                .column_mut(slot)
                .copy_from(&se.eigenvectors.column(k));
        }
        SpectralRaw {
            spectrum: Spectrum {
                eigenvalues,
                eigenvectors,
            },
            eigenvalues_raw_min: raw_min,
        }
    }
}

struct SpectralRaw {
    spectrum: Spectrum,
    eigenvalues_raw_min: f64,
}

pub(crate) fn hermiticity_deviation(m: &CMat) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            let d = m[(i, j)] - m[(j, i)].conj();
            worst = worst.max(d.norm());
        }
    }
    worst
}

/// Eigendecomposition of a density matrix: descending nonnegative
/// eigenvalues and orthonormal eigenvector columns.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMat,
}

impl Spectrum {
    /// Number of eigenvalues above the zero clamp.
    pub fn rank(&self) -> usize {
        self.eigenvalues
            .iter()
            .filter(|&&l| l > EIG_ZERO_CLAMP)
            .count()
    }

    pub fn eigenvector(&self, k: usize) -> CVec {
        CVec::from_column_slice(self.eigenvectors.column(k).as_slice())
    }
}

/// Eigenvalues of a small Hermitian matrix, descending. Closed form for
/// 1x1/2x2 (the dominant case in measurement objectives), solver otherwise.
pub fn hermitian_eigenvalues(m: &CMat) -> Vec<f64> {
    match m.nrows() {
        0 => Vec::new(),
        1 => vec![m[(0, 0)].re],
        2 => {
            let a = m[(0, 0)].re;
            let d = m[(1, 1)].re;
            let b = m[(0, 1)];
            let mid = 0.5 * (a + d);
            let disc = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
            vec![mid + disc, mid - disc]
        }
        _ => {
            let se = nalgebra::SymmetricEigen::new(m.clone());
            let mut v: Vec<f64> = se.eigenvalues.iter().copied().collect();
            v.sort_by(|x, y| y.total_cmp(x));
            v
        }
    }
}

/// Haar-random pure state: a complex-normal vector, normalized. The
/// distribution is unitarily invariant; deterministic for a given seed.
pub fn haar_random_pure(dims: &[usize], seed: u64) -> Result<PureState> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    haar_random_pure_with_rng(dims, &mut rng)
}

pub fn haar_random_pure_with_rng<R: Rng>(dims: &[usize], rng: &mut R) -> Result<PureState> {
    let total = check_dims(dims, DEFAULT_DIM_CAP)?;
    let mut amps = CVec::zeros(total);
    for k in 0..total {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        amps[k] = Complex64::new(re, im);
    }
    let norm = amps.norm();
    if norm == 0.0 {
        // Probability zero; resample rather than divide by zero.
        return haar_random_pure_with_rng(dims, rng);
    }
    amps /= c(norm);
    Ok(PureState::from_parts_unchecked(amps, dims.to_vec()))
}

/// Haar-distributed random unitary: QR of a Ginibre matrix with the phases
/// of the R diagonal absorbed into Q.
pub fn haar_random_unitary<R: Rng>(n: usize, rng: &mut R) -> CMat {
    let g = CMat::from_fn(n, n, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let qr = g.qr();
    let r_diag = qr.r().diagonal().map(|z| {
        let m = z.norm();
        if m > 0.0 {
            z / m
        } else {
            Complex64::new(1.0, 0.0)
        }
    });
    qr.q() * CMat::from_diagonal(&r_diag)
}

/// Random mixed state of bounded rank: partial trace of a Haar-random
/// purification on `dim × rank`.
pub fn random_mixed(dim: usize, rank: usize, seed: u64) -> Result<DensityMatrix> {
    if rank == 0 || rank > dim {
        return Err(Error::InvalidParam(format!(
            "rank {rank} out of range 1..={dim}"
        )));
    }
    let purification = haar_random_pure(&[dim, rank], seed)?;
    purification.to_density().partial_trace(&[0])
}

/// Canonical small states used as the fixed test corpus.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CanonicalState {
    /// `(|0..0⟩ + |1..1⟩ + ... + |d-1..d-1⟩)/√d` on `[d, d, d]`.
    Ghz,
    /// `(|001⟩ + |010⟩ + |100⟩)/√3` on `[2, 2, 2]`.
    W,
    /// `|00...0⟩` on any dimension list.
    Product,
    /// `Bell ⊗ |0⟩` on `[2, 2, d]`.
    BellTensorZero,
}

impl CanonicalState {
    pub fn id(&self) -> &'static str {
        match self {
            CanonicalState::Ghz => "ghz",
            CanonicalState::W => "w",
            CanonicalState::Product => "product",
            CanonicalState::BellTensorZero => "bell0",
        }
    }
}

pub fn canonical_state(which: CanonicalState, dims: &[usize]) -> Result<PureState> {
    let unsupported = |msg: String| Err(Error::InvalidParam(msg));
    match which {
        CanonicalState::Ghz => {
            if dims.len() != 3 || dims[0] != dims[1] || dims[1] != dims[2] {
                return unsupported(format!("GHZ requires dims [d,d,d], got {dims:?}"));
            }
            let d = dims[0];
            let total = check_dims(dims, DEFAULT_DIM_CAP)?;
            let mut amps = CVec::zeros(total);
            let w = c(1.0 / (d as f64).sqrt());
            for k in 0..d {
                amps[k * d * d + k * d + k] = w;
            }
            Ok(PureState::from_parts_unchecked(amps, dims.to_vec()))
        }
        CanonicalState::W => {
            if dims != [2, 2, 2] {
                return unsupported(format!("W requires dims [2,2,2], got {dims:?}"));
            }
            let mut amps = CVec::zeros(8);
            let w = c(1.0 / 3f64.sqrt());
            amps[0b001] = w;
            amps[0b010] = w;
            amps[0b100] = w;
            Ok(PureState::from_parts_unchecked(amps, dims.to_vec()))
        }
        CanonicalState::Product => PureState::basis(dims.to_vec(), 0),
        CanonicalState::BellTensorZero => {
            if dims.len() != 3 || dims[0] != 2 || dims[1] != 2 {
                return unsupported(format!("Bell⊗|0⟩ requires dims [2,2,d], got {dims:?}"));
            }
            let total = check_dims(dims, DEFAULT_DIM_CAP)?;
            let dc = dims[2];
            let mut amps = CVec::zeros(total);
            let w = c(std::f64::consts::FRAC_1_SQRT_2);
            amps[0] = w; // |00⟩|0⟩
            amps[3 * dc] = w; // |11⟩|0⟩
            Ok(PureState::from_parts_unchecked(amps, dims.to_vec()))
        }
    }
}
