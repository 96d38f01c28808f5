//! Dense state vectors and operators over mixed-dimension registers.
//!
//! Amplitudes are indexed in mixed radix with the leftmost subsystem as the
//! most significant digit, so that for `dims = [2, 2, 3]` the ket `|0,1,1⟩`
//! lives at index `0·6 + 1·3 + 1 = 4`. The protocol code always orders the
//! registers as Alice's qubit, Bob's qubit, then the ancilla.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use thiserror::Error;

pub type C64 = Complex64;

/// Tolerance for "this state is normalized" and for unitarity defects.
pub const NORM_TOL: f64 = 1e-12;

/// Tolerance for fidelity comparisons between states produced by different
/// routes (headroom for rounding across a dozen matrix applications).
pub const FIDELITY_TOL: f64 = 1e-10;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HilbertError {
    #[error("subsystem dimensions must be positive and non-empty, got {0:?}")]
    InvalidDims(Vec<usize>),
    #[error("expected {expected} amplitudes for dims {dims:?}, found {found}")]
    LengthMismatch {
        dims: Vec<usize>,
        expected: usize,
        found: usize,
    },
    #[error("dimension mismatch: expected {expected:?}, found {found:?}")]
    DimensionMismatch { expected: Vec<usize>, found: Vec<usize> },
    #[error("target subsystem {target} out of range for {subsystems} subsystems")]
    TargetOutOfRange { target: usize, subsystems: usize },
    #[error("target subsystem {0} listed more than once")]
    RepeatedTarget(usize),
    #[error("basis digit {digit} out of range for subsystem {subsystem} of dimension {dim}")]
    DigitOutOfRange {
        subsystem: usize,
        digit: usize,
        dim: usize,
    },
    #[error("all-zero marginal on subsystem {0}; the state is not normalized")]
    ZeroMarginal(usize),
    #[error("bipartition must leave both sides non-empty")]
    InvalidBipartition,
}

pub type Result<T> = std::result::Result<T, HilbertError>;

fn check_dims(dims: &[usize]) -> Result<usize> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(HilbertError::InvalidDims(dims.to_vec()));
    }
    Ok(dims.iter().product())
}

/// Place values of each subsystem digit.
fn strides(dims: &[usize]) -> Vec<usize> {
    let mut strides = vec![1; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        strides[k] = strides[k + 1] * dims[k + 1];
    }
    strides
}

fn index_of(dims: &[usize], digits: &[usize]) -> Result<usize> {
    if digits.len() != dims.len() {
        return Err(HilbertError::DimensionMismatch {
            expected: dims.to_vec(),
            found: digits.to_vec(),
        });
    }
    let mut index = 0;
    for (subsystem, (&digit, &dim)) in digits.iter().zip(dims).enumerate() {
        if digit >= dim {
            return Err(HilbertError::DigitOutOfRange {
                subsystem,
                digit,
                dim,
            });
        }
        index = index * dim + digit;
    }
    Ok(index)
}

fn digits_of(dims: &[usize], mut index: usize) -> Vec<usize> {
    let mut digits = vec![0; dims.len()];
    for k in (0..dims.len()).rev() {
        digits[k] = index % dims[k];
        index /= dims[k];
    }
    digits
}

fn validate_targets(n_subsystems: usize, targets: &[usize]) -> Result<()> {
    for (i, &t) in targets.iter().enumerate() {
        if t >= n_subsystems {
            return Err(HilbertError::TargetOutOfRange {
                target: t,
                subsystems: n_subsystems,
            });
        }
        if targets[..i].contains(&t) {
            return Err(HilbertError::RepeatedTarget(t));
        }
    }
    Ok(())
}

/// Pure state over a register of qudits.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    dims: Vec<usize>,
    amps: Vec<C64>,
}

impl StateVector {
    pub fn new(dims: Vec<usize>, amps: Vec<C64>) -> Result<Self> {
        let expected = check_dims(&dims)?;
        if amps.len() != expected {
            return Err(HilbertError::LengthMismatch {
                dims,
                expected,
                found: amps.len(),
            });
        }
        Ok(Self { dims, amps })
    }

    pub fn zeros(dims: &[usize]) -> Result<Self> {
        let len = check_dims(dims)?;
        Ok(Self {
            dims: dims.to_vec(),
            amps: vec![ZERO; len],
        })
    }

    /// Computational basis ket `|digits⟩`.
    pub fn basis(dims: &[usize], digits: &[usize]) -> Result<Self> {
        let mut state = Self::zeros(dims)?;
        let idx = index_of(dims, digits)?;
        state.amps[idx] = ONE;
        Ok(state)
    }

    /// `c0|0⟩ + c1|1⟩` on a single qubit, left unnormalized.
    pub fn qubit(c0: C64, c1: C64) -> Self {
        Self {
            dims: vec![2],
            amps: vec![c0, c1],
        }
    }

    /// Builds a state from `(digits, amplitude)` terms; repeated kets add up.
    pub fn from_terms<'a, I>(dims: &[usize], terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a [usize], C64)>,
    {
        let mut state = Self::zeros(dims)?;
        for (digits, amp) in terms {
            let idx = index_of(dims, digits)?;
            state.amps[idx] += amp;
        }
        Ok(state)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn amp(&self, digits: &[usize]) -> Result<C64> {
        Ok(self.amps[index_of(&self.dims, digits)?])
    }

    pub fn digits(&self, index: usize) -> Vec<usize> {
        digits_of(&self.dims, index)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() < NORM_TOL
    }

    /// Returns the normalized state, or `None` for the zero vector.
    pub fn normalized(&self) -> Option<Self> {
        let norm = self.norm_sqr().sqrt();
        if norm == 0.0 {
            return None;
        }
        Some(self.scaled(C64::new(1.0 / norm, 0.0)))
    }

    pub fn scaled(&self, factor: C64) -> Self {
        Self {
            dims: self.dims.clone(),
            amps: self.amps.iter().map(|a| a * factor).collect(),
        }
    }

    /// Entry-wise sum of two states over the same register.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.require_same_dims(other)?;
        Ok(Self {
            dims: self.dims.clone(),
            amps: self.amps.iter().zip(&other.amps).map(|(a, b)| a + b).collect(),
        })
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Result<C64> {
        self.require_same_dims(other)?;
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    fn require_same_dims(&self, other: &Self) -> Result<()> {
        if self.dims != other.dims {
            return Err(HilbertError::DimensionMismatch {
                expected: self.dims.clone(),
                found: other.dims.clone(),
            });
        }
        Ok(())
    }

    /// Born weights of each basis value of one subsystem.
    pub fn marginal(&self, subsystem: usize) -> Result<Vec<f64>> {
        validate_targets(self.dims.len(), &[subsystem])?;
        let dim = self.dims[subsystem];
        let stride = strides(&self.dims)[subsystem];
        let mut weights = vec![0.0; dim];
        for (i, a) in self.amps.iter().enumerate() {
            weights[(i / stride) % dim] += a.norm_sqr();
        }
        Ok(weights)
    }

    /// The (unnormalized) branch where `subsystem` holds `value`, with that
    /// subsystem removed from the register.
    pub fn branch(&self, subsystem: usize, value: usize) -> Result<Self> {
        validate_targets(self.dims.len(), &[subsystem])?;
        let dim = self.dims[subsystem];
        if value >= dim {
            return Err(HilbertError::DigitOutOfRange {
                subsystem,
                digit: value,
                dim,
            });
        }
        if self.dims.len() == 1 {
            return Err(HilbertError::InvalidBipartition);
        }
        let stride = strides(&self.dims)[subsystem];
        let amps = self
            .amps
            .iter()
            .enumerate()
            .filter(|(i, _)| (i / stride) % dim == value)
            .map(|(_, a)| *a)
            .collect();
        let mut dims = self.dims.clone();
        dims.remove(subsystem);
        Ok(Self { dims, amps })
    }

    /// Human-readable ket expansion, skipping amplitudes below `tol`.
    pub fn ket_string(&self, tol: f64) -> String {
        let mut terms = Vec::new();
        for (i, a) in self.amps.iter().enumerate() {
            if a.norm() > tol {
                let label: String = self.digits(i).iter().map(|d| d.to_string()).collect();
                terms.push(format!("({:.6}{:+.6}i)|{}⟩", a.re, a.im, label));
            }
        }
        if terms.is_empty() {
            "0".to_string()
        } else {
            terms.join(" + ")
        }
    }
}

impl fmt::Display for StateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.ket_string(1e-12))
    }
}

/// Dense square operator, row-major, indexed like [`StateVector`].
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    dims: Vec<usize>,
    size: usize,
    entries: Vec<C64>,
}

impl Operator {
    pub fn new(dims: Vec<usize>, entries: Vec<C64>) -> Result<Self> {
        let size = check_dims(&dims)?;
        if entries.len() != size * size {
            return Err(HilbertError::LengthMismatch {
                dims,
                expected: size * size,
                found: entries.len(),
            });
        }
        Ok(Self { dims, size, entries })
    }

    pub fn zeros(dims: &[usize]) -> Result<Self> {
        let size = check_dims(dims)?;
        Ok(Self {
            dims: dims.to_vec(),
            size,
            entries: vec![ZERO; size * size],
        })
    }

    pub fn identity(dims: &[usize]) -> Result<Self> {
        let mut op = Self::zeros(dims)?;
        for i in 0..op.size {
            op.entries[i * op.size + i] = ONE;
        }
        Ok(op)
    }

    /// Single-qubit operator from its rows.
    pub fn qubit(rows: [[C64; 2]; 2]) -> Self {
        Self {
            dims: vec![2],
            size: 2,
            entries: vec![rows[0][0], rows[0][1], rows[1][0], rows[1][1]],
        }
    }

    /// `Σ coeff · |out⟩⟨in|` over basis labels.
    pub fn from_outer_products<'a, I>(dims: &[usize], terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a [usize], &'a [usize], C64)>,
    {
        let mut op = Self::zeros(dims)?;
        for (out, inp, coeff) in terms {
            let r = index_of(dims, out)?;
            let c = index_of(dims, inp)?;
            op.entries[r * op.size + c] += coeff;
        }
        Ok(op)
    }

    /// Operator that maps each basis ket to exactly one basis ket.
    pub fn from_basis_map<F>(dims: &[usize], mut map: F) -> Result<Self>
    where
        F: FnMut(&[usize]) -> Vec<usize>,
    {
        let mut op = Self::zeros(dims)?;
        for c in 0..op.size {
            let out = map(&digits_of(dims, c));
            let r = index_of(dims, &out)?;
            op.entries[r * op.size + c] += ONE;
        }
        Ok(op)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.entries[row * self.size + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: C64) {
        self.entries[row * self.size + col] = value;
    }

    /// Matrix element `⟨out|self|in⟩` by basis labels.
    pub fn element(&self, out: &[usize], inp: &[usize]) -> Result<C64> {
        let r = index_of(&self.dims, out)?;
        let c = index_of(&self.dims, inp)?;
        Ok(self.get(r, c))
    }

    /// Matrix product `self · rhs` (rhs acts first).
    pub fn compose(&self, rhs: &Self) -> Result<Self> {
        if self.dims != rhs.dims {
            return Err(HilbertError::DimensionMismatch {
                expected: self.dims.clone(),
                found: rhs.dims.clone(),
            });
        }
        let n = self.size;
        let mut entries = vec![ZERO; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.entries[i * n + k];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    entries[i * n + j] += a * rhs.entries[k * n + j];
                }
            }
        }
        Ok(Self {
            dims: self.dims.clone(),
            size: n,
            entries,
        })
    }

    pub fn adjoint(&self) -> Self {
        let n = self.size;
        let mut entries = vec![ZERO; n * n];
        for i in 0..n {
            for j in 0..n {
                entries[j * n + i] = self.entries[i * n + j].conj();
            }
        }
        Self {
            dims: self.dims.clone(),
            size: n,
            entries,
        }
    }

    pub fn scaled(&self, factor: C64) -> Self {
        Self {
            dims: self.dims.clone(),
            size: self.size,
            entries: self.entries.iter().map(|e| e * factor).collect(),
        }
    }

    /// Same matrix relabeled with a different register layout of equal size.
    pub fn with_dims(mut self, dims: Vec<usize>) -> Result<Self> {
        let size = check_dims(&dims)?;
        if size != self.size {
            return Err(HilbertError::DimensionMismatch {
                expected: self.dims,
                found: dims,
            });
        }
        self.dims = dims;
        Ok(self)
    }

    /// Max-norm distance to another operator of the same shape.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.entries.len() != other.entries.len() {
            return f64::INFINITY;
        }
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `‖U†U − I‖∞` (entry-wise max norm).
    pub fn unitarity_defect(&self) -> f64 {
        let product = self.adjoint().compose(self).expect("same dims");
        let identity = Self::identity(&self.dims).expect("valid dims");
        product.max_abs_diff(&identity)
    }

    pub fn is_unitary(&self) -> bool {
        self.unitarity_defect() < NORM_TOL
    }

    /// True when every column holds a single entry equal to one and every
    /// other entry is zero, with no two columns hitting the same row.
    pub fn is_permutation(&self) -> bool {
        let n = self.size;
        let mut seen = vec![false; n];
        for c in 0..n {
            let mut hit = None;
            for r in 0..n {
                let e = self.entries[r * n + c];
                if e == ONE {
                    if hit.is_some() {
                        return false;
                    }
                    hit = Some(r);
                } else if e != ZERO {
                    return false;
                }
            }
            match hit {
                Some(r) if !seen[r] => seen[r] = true,
                _ => return false,
            }
        }
        true
    }

    /// Image of a basis ket under a permutation operator.
    pub fn permute_basis(&self, digits: &[usize]) -> Result<Vec<usize>> {
        let c = index_of(&self.dims, digits)?;
        let r = (0..self.size)
            .find(|&r| self.entries[r * self.size + c] != ZERO)
            .unwrap_or(c);
        Ok(digits_of(&self.dims, r))
    }

    /// Full matrix-vector product on a state with identical dims.
    pub fn apply_full(&self, state: &StateVector) -> Result<StateVector> {
        if self.dims != state.dims {
            return Err(HilbertError::DimensionMismatch {
                expected: self.dims.clone(),
                found: state.dims.clone(),
            });
        }
        let n = self.size;
        let amps = (0..n)
            .map(|r| {
                self.entries[r * n..(r + 1) * n]
                    .iter()
                    .zip(&state.amps)
                    .map(|(e, a)| e * a)
                    .sum()
            })
            .collect();
        Ok(StateVector {
            dims: state.dims.clone(),
            amps,
        })
    }
}

/// Kronecker product with concatenated dims.
pub trait Tensor: Sized {
    fn tensor(&self, rhs: &Self) -> Self;
}

impl Tensor for StateVector {
    fn tensor(&self, rhs: &Self) -> Self {
        let mut amps = Vec::with_capacity(self.len() * rhs.len());
        for a in &self.amps {
            for b in &rhs.amps {
                amps.push(a * b);
            }
        }
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&rhs.dims);
        Self { dims, amps }
    }
}

impl Tensor for Operator {
    fn tensor(&self, rhs: &Self) -> Self {
        let (n, m) = (self.size, rhs.size);
        let size = n * m;
        let mut entries = vec![ZERO; size * size];
        for i in 0..n {
            for j in 0..n {
                let a = self.entries[i * n + j];
                if a == ZERO {
                    continue;
                }
                for k in 0..m {
                    for l in 0..m {
                        entries[(i * m + k) * size + j * m + l] = a * rhs.entries[k * m + l];
                    }
                }
            }
        }
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&rhs.dims);
        Self { dims, size, entries }
    }
}

pub fn tensor<T: Tensor>(a: &T, b: &T) -> T {
    a.tensor(b)
}

/// Applies `op` to the listed subsystems of `state` (identity elsewhere).
/// The operator's dims must equal the targeted subsystem dims in order.
pub fn apply(op: &Operator, state: &StateVector, targets: &[usize]) -> Result<StateVector> {
    validate_targets(state.dims.len(), targets)?;
    let target_dims: Vec<usize> = targets.iter().map(|&t| state.dims[t]).collect();
    if target_dims != op.dims {
        return Err(HilbertError::DimensionMismatch {
            expected: target_dims,
            found: op.dims.clone(),
        });
    }
    let full_strides = strides(&state.dims);
    // Offset of each target sub-index inside the full index space.
    let offsets: Vec<usize> = (0..op.size)
        .map(|k| {
            digits_of(&op.dims, k)
                .iter()
                .zip(targets)
                .map(|(d, &t)| d * full_strides[t])
                .sum()
        })
        .collect();

    let mut out = vec![ZERO; state.len()];
    let mut gathered = vec![ZERO; op.size];
    for base in 0..state.len() {
        let on_target = targets
            .iter()
            .any(|&t| !(base / full_strides[t]).is_multiple_of(state.dims[t]));
        if on_target {
            continue;
        }
        for (g, off) in gathered.iter_mut().zip(&offsets) {
            *g = state.amps[base + off];
        }
        for (r, off) in offsets.iter().enumerate() {
            let row = &op.entries[r * op.size..(r + 1) * op.size];
            out[base + off] = row.iter().zip(&gathered).map(|(e, a)| e * a).sum();
        }
    }
    Ok(StateVector {
        dims: state.dims.clone(),
        amps: out,
    })
}

/// Result of a projective computational-basis measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct Measurement {
    pub outcome: usize,
    /// Post-measurement state, renormalized, same register layout.
    pub collapsed: StateVector,
    /// Exact Born weight of the sampled outcome.
    pub probability: f64,
}

/// Collapses `state` onto `subsystem = value` and renormalizes.
pub fn project(state: &StateVector, subsystem: usize, value: usize) -> Result<Measurement> {
    let weights = state.marginal(subsystem)?;
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return Err(HilbertError::ZeroMarginal(subsystem));
    }
    let dim = state.dims[subsystem];
    if value >= dim {
        return Err(HilbertError::DigitOutOfRange {
            subsystem,
            digit: value,
            dim,
        });
    }
    let weight = weights[value];
    if weight <= 0.0 {
        return Err(HilbertError::ZeroMarginal(subsystem));
    }
    let stride = strides(&state.dims)[subsystem];
    let scale = 1.0 / weight.sqrt();
    let amps = state
        .amps
        .iter()
        .enumerate()
        .map(|(i, a)| {
            if (i / stride) % dim == value {
                a * scale
            } else {
                ZERO
            }
        })
        .collect();
    Ok(Measurement {
        outcome: value,
        collapsed: StateVector {
            dims: state.dims.clone(),
            amps,
        },
        probability: weight / total,
    })
}

/// Samples a computational-basis measurement of one subsystem.
pub fn measure<R: Rng + ?Sized>(state: &StateVector, subsystem: usize, rng: &mut R) -> Result<Measurement> {
    let weights = state.marginal(subsystem)?;
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return Err(HilbertError::ZeroMarginal(subsystem));
    }
    let draw = rng.gen::<f64>() * total;
    let mut acc = 0.0;
    let mut outcome = None;
    for (k, w) in weights.iter().enumerate() {
        if *w <= 0.0 {
            continue;
        }
        acc += w;
        outcome = Some(k);
        if draw < acc {
            break;
        }
    }
    project(state, subsystem, outcome.expect("positive total weight"))
}

/// `|⟨a|b⟩|²`; insensitive to global phase.
pub fn fidelity(a: &StateVector, b: &StateVector) -> Result<f64> {
    Ok(a.inner(b)?.norm_sqr())
}

fn bipartition_matrix(state: &StateVector, left: &[usize]) -> Result<DMatrix<C64>> {
    let n = state.dims.len();
    validate_targets(n, left)?;
    if left.is_empty() || left.len() == n {
        return Err(HilbertError::InvalidBipartition);
    }
    let right: Vec<usize> = (0..n).filter(|k| !left.contains(k)).collect();
    let left_dims: Vec<usize> = left.iter().map(|&k| state.dims[k]).collect();
    let right_dims: Vec<usize> = right.iter().map(|&k| state.dims[k]).collect();
    let rows: usize = left_dims.iter().product();
    let cols: usize = right_dims.iter().product();
    let mut matrix = DMatrix::from_element(rows, cols, ZERO);
    for (i, a) in state.amps.iter().enumerate() {
        let digits = state.digits(i);
        let l: Vec<usize> = left.iter().map(|&k| digits[k]).collect();
        let r: Vec<usize> = right.iter().map(|&k| digits[k]).collect();
        let row = index_of(&left_dims, &l)?;
        let col = index_of(&right_dims, &r)?;
        matrix[(row, col)] = *a;
    }
    Ok(matrix)
}

/// Schmidt coefficients across `left | rest`, sorted descending.
pub fn schmidt_coefficients(state: &StateVector, left: &[usize]) -> Result<Vec<f64>> {
    let matrix = bipartition_matrix(state, left)?;
    let mut values: Vec<f64> = matrix.singular_values().iter().copied().collect();
    values.sort_by(|a, b| b.total_cmp(a));
    Ok(values)
}

/// Number of Schmidt coefficients above `tolerance` across `left | rest`.
pub fn schmidt_rank(state: &StateVector, left: &[usize], tolerance: f64) -> Result<usize> {
    Ok(schmidt_coefficients(state, left)?
        .into_iter()
        .filter(|s| *s > tolerance)
        .count())
}

/// Leading Schmidt pair `(left factor, right factor)`, each normalized.
/// For a product state this recovers both factors up to global phase.
pub fn leading_factors(state: &StateVector, left: &[usize]) -> Result<(StateVector, StateVector)> {
    let matrix = bipartition_matrix(state, left)?;
    let svd = matrix.svd(true, true);
    let (u, v_t) = (svd.u.expect("requested"), svd.v_t.expect("requested"));
    let best = (0..svd.singular_values.len())
        .max_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]))
        .expect("non-empty");
    let left_dims: Vec<usize> = left.iter().map(|&k| state.dims[k]).collect();
    let right_dims: Vec<usize> = (0..state.dims.len())
        .filter(|k| !left.contains(k))
        .map(|k| state.dims[k])
        .collect();
    let l = StateVector::new(left_dims, u.column(best).iter().copied().collect())?;
    let r = StateVector::new(right_dims, v_t.row(best).iter().copied().collect())?;
    Ok((l, r))
}
