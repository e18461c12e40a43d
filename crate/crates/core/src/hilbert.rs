//! Dense finite-dimensional quantum mechanics.
//!
//! States, operators and density matrices carry the list of tensor-factor
//! dimensions they live on, so that Kronecker products and partial traces can
//! check their arguments. Time evolution is always `e^{-iHt}` (ħ = 1) and is
//! synthesised from the Hermitian eigendecomposition of `H`, so a single
//! [`SpectralDecomp`] can be reused across a whole time grid.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::{Error, Result};

/// Absolute tolerance on `max |M - M†|` for an operator to count as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Tolerance on `|‖ψ‖ - 1|` for a state to count as normalized.
pub const NORM_TOL: f64 = 1e-10;
/// Tolerance on `|tr ρ - 1|` for a density matrix.
pub const TRACE_TOL: f64 = 1e-10;
/// Smallest eigenvalue accepted for a density matrix.
pub const POSITIVITY_TOL: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

fn check_dims(dims: &[usize], len: usize) -> Result<()> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::InvalidSpec(format!("bad tensor factor dims {dims:?}")));
    }
    let product = dims
        .iter()
        .try_fold(1usize, |acc, &d| acc.checked_mul(d))
        .ok_or_else(|| Error::InvalidSpec("tensor dimension overflows".into()))?;
    if product != len {
        return Err(Error::DimensionMismatch { expected: product, found: len });
    }
    Ok(())
}

/// Largest entry of `|M - M†|`.
pub fn hermitian_deviation(m: &DMatrix<Complex64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// A normalized pure state with tensor-factor metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: DVector<Complex64>,
    dims: Vec<usize>,
}

impl StateVector {
    /// Wraps amplitudes that must already be normalized.
    pub fn new(amplitudes: Vec<Complex64>, dims: Vec<usize>) -> Result<Self> {
        check_dims(&dims, amplitudes.len())?;
        let state = Self { amplitudes: DVector::from_vec(amplitudes), dims };
        let norm = state.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm });
        }
        Ok(state)
    }

    /// Rescales arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(amplitudes: Vec<Complex64>, dims: Vec<usize>) -> Result<Self> {
        check_dims(&dims, amplitudes.len())?;
        let mut amplitudes = DVector::from_vec(amplitudes);
        let norm = amplitudes.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::NotNormalized { norm });
        }
        amplitudes.unscale_mut(norm);
        Ok(Self { amplitudes, dims })
    }

    /// Single-factor state from real amplitudes, normalized on the way in.
    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        let amps = amplitudes.iter().map(|&a| Complex64::new(a, 0.0)).collect::<Vec<_>>();
        let dim = amps.len();
        Self::normalized(amps, vec![dim])
    }

    /// Computational basis state `|k⟩` in dimension `dim`.
    pub fn basis(dim: usize, k: usize) -> Result<Self> {
        if k >= dim {
            return Err(Error::BadFactorIndex { index: k, factors: dim });
        }
        let mut amps = vec![ZERO; dim];
        amps[k] = ONE;
        Ok(Self { amplitudes: DVector::from_vec(amps), dims: vec![dim] })
    }

    /// `cos θ |0⟩ + sin θ |1⟩`.
    pub fn qubit_angle(theta: f64) -> Self {
        Self {
            amplitudes: DVector::from_vec(vec![Complex64::new(theta.cos(), 0.0), Complex64::new(theta.sin(), 0.0)]),
            dims: vec![2],
        }
    }

    /// Skips the normalization check. Callers guarantee the invariant.
    pub(crate) fn from_raw(amplitudes: DVector<Complex64>, dims: Vec<usize>) -> Self {
        debug_assert_eq!(amplitudes.len(), dims.iter().product::<usize>());
        Self { amplitudes, dims }
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    /// `|self⟩ ⊗ |other⟩`, factor lists concatenated.
    pub fn tensor(&self, other: &StateVector) -> StateVector {
        let amplitudes = self.amplitudes.kronecker(&other.amplitudes);
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self { amplitudes, dims }
    }

    /// Tensor product of a nonempty list of states.
    pub fn product(states: &[StateVector]) -> Result<StateVector> {
        let (first, rest) = states.split_first().ok_or_else(|| Error::InvalidSpec("empty product state".into()))?;
        Ok(rest.iter().fold(first.clone(), |acc, s| acc.tensor(s)))
    }

    pub fn with_global_phase(&self, theta: f64) -> StateVector {
        let phase = Complex64::from_polar(1.0, theta);
        Self { amplitudes: self.amplitudes.map(|a| a * phase), dims: self.dims.clone() }
    }

    pub fn density_matrix(&self) -> DensityMatrix {
        DensityMatrix { entries: &self.amplitudes * self.amplitudes.adjoint(), dims: self.dims.clone() }
    }

    /// Reduced state on the factors in `keep`, computed without forming
    /// the full density matrix.
    pub fn reduced(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let split = FactorSplit::new(&self.dims, keep)?;
        let psi = &self.amplitudes;
        let mut entries = DMatrix::zeros(split.kept_dim, split.kept_dim);
        for a in 0..split.kept_dim {
            for b in a..split.kept_dim {
                let mut acc = ZERO;
                for r in 0..split.traced_dim {
                    acc += psi[split.index(a, r)] * psi[split.index(b, r)].conj();
                }
                entries[(a, b)] = acc;
                entries[(b, a)] = acc.conj();
            }
        }
        Ok(DensityMatrix { entries, dims: split.kept_dims })
    }
}

/// A square operator with tensor-factor metadata and a Hermiticity flag.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    entries: DMatrix<Complex64>,
    dims: Vec<usize>,
    hermitian: bool,
}

impl Operator {
    /// A general (not necessarily Hermitian) operator.
    pub fn new(entries: DMatrix<Complex64>, dims: Vec<usize>) -> Result<Self> {
        if !entries.is_square() {
            return Err(Error::DimensionMismatch { expected: entries.nrows(), found: entries.ncols() });
        }
        check_dims(&dims, entries.nrows())?;
        Ok(Self { entries, dims, hermitian: false })
    }

    /// A Hermitian operator. The flag is only set after the check passes.
    pub fn hermitian(entries: DMatrix<Complex64>, dims: Vec<usize>) -> Result<Self> {
        let mut op = Self::new(entries, dims)?;
        let deviation = hermitian_deviation(&op.entries);
        if deviation > HERMITIAN_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        op.hermitian = true;
        Ok(op)
    }

    /// Single-factor Hermitian operator from a real symmetric row-major matrix.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidSpec("matrix rows must all have length n".into()));
        }
        let m = DMatrix::from_fn(n, n, |i, j| Complex64::new(rows[i][j], 0.0));
        Self::hermitian(m, vec![n])
    }

    pub fn identity(dim: usize) -> Self {
        Self { entries: DMatrix::identity(dim, dim), dims: vec![dim], hermitian: true }
    }

    pub fn zeros(dim: usize) -> Self {
        Self { entries: DMatrix::zeros(dim, dim), dims: vec![dim], hermitian: true }
    }

    pub fn sigma_x() -> Self {
        Self::from_entries_2x2([[ZERO, ONE], [ONE, ZERO]])
    }

    pub fn sigma_y() -> Self {
        Self::from_entries_2x2([[ZERO, -I], [I, ZERO]])
    }

    pub fn sigma_z() -> Self {
        Self::from_entries_2x2([[ONE, ZERO], [ZERO, -ONE]])
    }

    fn from_entries_2x2(rows: [[Complex64; 2]; 2]) -> Self {
        Self { entries: DMatrix::from_fn(2, 2, |i, j| rows[i][j]), dims: vec![2], hermitian: true }
    }

    pub(crate) fn from_raw(entries: DMatrix<Complex64>, dims: Vec<usize>, hermitian: bool) -> Self {
        Self { entries, dims, hermitian }
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    /// Real multiple; keeps the Hermiticity flag.
    pub fn scale(&self, factor: f64) -> Operator {
        Self { entries: &self.entries * Complex64::new(factor, 0.0), ..self.clone() }
    }

    pub fn add(&self, other: &Operator) -> Result<Operator> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        Ok(Self {
            entries: &self.entries + &other.entries,
            dims: self.dims.clone(),
            hermitian: self.hermitian && other.hermitian,
        })
    }

    /// `self · other`. The product of Hermitian operators is not Hermitian in
    /// general, so the flag is cleared.
    pub fn matmul(&self, other: &Operator) -> Result<Operator> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        Ok(Self { entries: &self.entries * &other.entries, dims: self.dims.clone(), hermitian: false })
    }

    /// `[self, other]`.
    pub fn commutator(&self, other: &Operator) -> Result<Operator> {
        let ab = self.matmul(other)?;
        let ba = other.matmul(self)?;
        Ok(Self { entries: ab.entries - ba.entries, ..ab })
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    pub fn apply(&self, psi: &StateVector) -> Result<DVector<Complex64>> {
        if self.dim() != psi.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: psi.dim() });
        }
        Ok(&self.entries * &psi.amplitudes)
    }

    /// `I ⊗ … ⊗ self ⊗ … ⊗ I` with `self` on factor `site` of `dims`.
    pub fn embed(&self, site: usize, dims: &[usize]) -> Result<Operator> {
        let &local = dims.get(site).ok_or(Error::BadFactorIndex { index: site, factors: dims.len() })?;
        if local != self.dim() {
            return Err(Error::DimensionMismatch { expected: local, found: self.dim() });
        }
        let left: usize = dims[..site].iter().product();
        let right: usize = dims[site + 1..].iter().product();
        let entries =
            DMatrix::<Complex64>::identity(left, left)
                .kronecker(&self.entries)
                .kronecker(&DMatrix::<Complex64>::identity(right, right));
        Ok(Self { entries, dims: dims.to_vec(), hermitian: self.hermitian })
    }
}

/// Kronecker product. The left factor indexes the coarse blocks.
pub fn kron(a: &Operator, b: &Operator) -> Operator {
    let mut dims = a.dims.clone();
    dims.extend_from_slice(&b.dims);
    Operator { entries: a.entries.kronecker(&b.entries), dims, hermitian: a.hermitian && b.hermitian }
}

/// Eigenvalues in ascending order with the matching unitary of eigenvectors.
#[derive(Debug, Clone)]
pub struct SpectralDecomp {
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<Complex64>,
    dims: Vec<usize>,
}

/// Hermitian eigendecomposition. The Hermiticity check is redone here even
/// when the flag is set.
pub fn herm_eigen(h: &Operator) -> Result<SpectralDecomp> {
    let deviation = hermitian_deviation(&h.entries);
    if !h.hermitian || deviation > HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    let symmetric = (&h.entries + h.entries.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = symmetric.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let n = order.len();
    let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let eigenvectors = DMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok(SpectralDecomp { eigenvalues, eigenvectors, dims: h.dims.clone() })
}

impl SpectralDecomp {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Columns are the eigenvectors.
    pub fn eigenvectors(&self) -> &DMatrix<Complex64> {
        &self.eigenvectors
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Eigenvector `k` as a state.
    pub fn eigenstate(&self, k: usize) -> StateVector {
        StateVector::from_raw(self.eigenvectors.column(k).into_owned(), self.dims.clone())
    }

    /// Smallest gap between consecutive eigenvalues, `+∞` in dimension 1.
    pub fn min_gap(&self) -> f64 {
        self.eigenvalues.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
    }

    /// `U · diag(f(λ)) · U†`.
    pub fn synthesize(&self, f: impl Fn(f64) -> Complex64) -> DMatrix<Complex64> {
        let mut scaled = self.eigenvectors.clone();
        for (k, &lambda) in self.eigenvalues.iter().enumerate() {
            let w = f(lambda);
            for z in scaled.column_mut(k).iter_mut() {
                *z *= w;
            }
        }
        scaled * self.eigenvectors.adjoint()
    }

    /// `U · diag(λ) · U†`.
    pub fn reconstruct(&self) -> DMatrix<Complex64> {
        self.synthesize(|l| Complex64::new(l, 0.0))
    }

    /// `e^{-iHt}` as a dense matrix.
    pub fn propagator(&self, t: f64) -> DMatrix<Complex64> {
        self.synthesize(|l| Complex64::from_polar(1.0, -l * t))
    }

    /// `e^{-iHt}|ψ⟩`, applied as `U · diag · (U†ψ)` in `O(dim²)`.
    pub fn evolve(&self, psi: &StateVector, t: f64) -> Result<StateVector> {
        if psi.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: psi.dim() });
        }
        let mut coeffs = self.eigenvectors.adjoint() * &psi.amplitudes;
        for (c, &lambda) in coeffs.iter_mut().zip(&self.eigenvalues) {
            *c *= Complex64::from_polar(1.0, -lambda * t);
        }
        Ok(StateVector::from_raw(&self.eigenvectors * coeffs, psi.dims.clone()))
    }

    /// Matrix of `m` in this eigenbasis, `U† m U`.
    pub fn to_eigenbasis(&self, m: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
        if m.nrows() != self.dim() || m.ncols() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: m.nrows() });
        }
        Ok(self.eigenvectors.adjoint() * m * &self.eigenvectors)
    }
}

/// `e^{-iHt}|ψ⟩` through the spectral decomposition of `h`.
pub fn evolve(h: &Operator, psi: &StateVector, t: f64) -> Result<StateVector> {
    if h.dim() != psi.dim() {
        return Err(Error::DimensionMismatch { expected: h.dim(), found: psi.dim() });
    }
    herm_eigen(h)?.evolve(psi, t)
}

/// `⟨ψ|A|ψ⟩`.
pub fn expectation(a: &Operator, psi: &StateVector) -> Result<Complex64> {
    let a_psi = a.apply(psi)?;
    Ok(psi.amplitudes.dotc(&a_psi))
}

/// A density matrix: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    entries: DMatrix<Complex64>,
    dims: Vec<usize>,
}

impl DensityMatrix {
    /// Checks Hermiticity, trace and positivity.
    pub fn new(entries: DMatrix<Complex64>, dims: Vec<usize>) -> Result<Self> {
        let op = Operator::hermitian(entries, dims)?;
        let trace = op.entries.trace();
        if (trace.re - 1.0).abs() > TRACE_TOL || trace.im.abs() > TRACE_TOL {
            return Err(Error::InvalidSpec(format!("density matrix trace {trace}")));
        }
        let min = herm_eigen(&op)?.eigenvalues[0];
        if min < -POSITIVITY_TOL {
            return Err(Error::InvalidSpec(format!("density matrix eigenvalue {min:e} < 0")));
        }
        Ok(Self { entries: op.entries, dims: op.dims })
    }

    pub(crate) fn from_raw(entries: DMatrix<Complex64>, dims: Vec<usize>) -> Self {
        Self { entries, dims }
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn trace(&self) -> Complex64 {
        self.entries.trace()
    }

    pub fn purity(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Spectrum of the (symmetrized) matrix, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let op = Operator::from_raw(self.entries.clone(), self.dims.clone(), true);
        let symmetric = (&op.entries + op.entries.adjoint()) * Complex64::new(0.5, 0.0);
        let mut values: Vec<f64> = symmetric.symmetric_eigenvalues().iter().copied().collect();
        values.sort_by(f64::total_cmp);
        values
    }

    pub fn as_operator(&self) -> Operator {
        Operator::from_raw(self.entries.clone(), self.dims.clone(), true)
    }

    /// Reduced density matrix on the factors listed in `keep`.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let split = FactorSplit::new(&self.dims, keep)?;
        let mut entries = DMatrix::zeros(split.kept_dim, split.kept_dim);
        for a in 0..split.kept_dim {
            for b in 0..split.kept_dim {
                let mut acc = ZERO;
                for r in 0..split.traced_dim {
                    acc += self.entries[(split.index(a, r), split.index(b, r))];
                }
                entries[(a, b)] = acc;
            }
        }
        Ok(DensityMatrix { entries, dims: split.kept_dims })
    }
}

/// `½ Σ |eig(ρ₁ - ρ₂)|`.
pub fn trace_distance(r1: &DensityMatrix, r2: &DensityMatrix) -> Result<f64> {
    if r1.dim() != r2.dim() {
        return Err(Error::DimensionMismatch { expected: r1.dim(), found: r2.dim() });
    }
    let diff = &r1.entries - &r2.entries;
    let symmetric = (&diff + diff.adjoint()) * Complex64::new(0.5, 0.0);
    Ok(0.5 * symmetric.symmetric_eigenvalues().iter().map(|l| l.abs()).sum::<f64>())
}

/// Index bookkeeping for splitting a tensor product into kept and traced
/// factors. Full index of (kept multi-index `a`, traced multi-index `r`) is
/// `full[a * traced_dim + r]`.
struct FactorSplit {
    kept_dims: Vec<usize>,
    kept_dim: usize,
    traced_dim: usize,
    full: Vec<usize>,
}

impl FactorSplit {
    fn new(dims: &[usize], keep: &[usize]) -> Result<Self> {
        let mut keep = keep.to_vec();
        keep.sort_unstable();
        keep.dedup();
        if keep.is_empty() {
            return Err(Error::InvalidSpec("partial trace must keep at least one factor".into()));
        }
        if let Some(&bad) = keep.iter().find(|&&k| k >= dims.len()) {
            return Err(Error::BadFactorIndex { index: bad, factors: dims.len() });
        }
        let traced: Vec<usize> = (0..dims.len()).filter(|k| !keep.contains(k)).collect();
        // Row-major strides: the first factor is the most significant digit.
        let mut strides = vec![1usize; dims.len()];
        for k in (0..dims.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * dims[k + 1];
        }
        let kept_dims: Vec<usize> = keep.iter().map(|&k| dims[k]).collect();
        let kept_dim: usize = kept_dims.iter().product();
        let traced_dim: usize = traced.iter().map(|&k| dims[k]).product();
        let offsets = |factors: &[usize], count: usize| -> Vec<usize> {
            (0..count)
                .map(|mut idx| {
                    let mut offset = 0;
                    for &f in factors.iter().rev() {
                        offset += (idx % dims[f]) * strides[f];
                        idx /= dims[f];
                    }
                    offset
                })
                .collect()
        };
        let kept_off = offsets(&keep, kept_dim);
        let traced_off = offsets(&traced, traced_dim);
        let full = kept_off.iter().flat_map(|&a| traced_off.iter().map(move |&r| a + r)).collect();
        Ok(Self { kept_dims, kept_dim, traced_dim, full })
    }

    #[inline]
    fn index(&self, a: usize, r: usize) -> usize {
        self.full[a * self.traced_dim + r]
    }
}
