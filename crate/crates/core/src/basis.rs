//! Truncated circle basis `e_n(φ) = e^{inφ}`, `n ∈ [−n_max, n_max]`.
//!
//! Wave functions are coefficient vectors and operators are dense matrices
//! with a declared bandwidth. Products of banded operators are exact on the
//! infinite lattice only away from the window edge; every operator carries a
//! `reliable` radius so that contamination by the truncation is observable.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{potential_operator, PendulumModel, Potential};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[inline]
fn index(n_max: usize, n: i64) -> Option<usize> {
    let shifted = n + n_max as i64;
    if shifted < 0 || shifted > 2 * n_max as i64 {
        None
    } else {
        Some(shifted as usize)
    }
}

/// Truncated Fourier expansion `ψ(φ) = Σ_n c_n e^{inφ}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "WaveFunctionDoc", into = "WaveFunctionDoc")]
pub struct WaveFunction {
    n_max: usize,
    coeffs: DVector<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct WaveFunctionDoc {
    n_max: usize,
    coeffs: Vec<[f64; 2]>,
}

impl TryFrom<WaveFunctionDoc> for WaveFunction {
    type Error = Error;

    fn try_from(doc: WaveFunctionDoc) -> Result<Self> {
        let coeffs = doc.coeffs.iter().map(|c| Complex64::new(c[0], c[1])).collect();
        WaveFunction::new(doc.n_max, coeffs)
    }
}

impl From<WaveFunction> for WaveFunctionDoc {
    fn from(psi: WaveFunction) -> Self {
        WaveFunctionDoc { n_max: psi.n_max, coeffs: psi.coeffs.iter().map(|c| [c.re, c.im]).collect() }
    }
}

impl WaveFunction {
    /// Coefficients ordered `c_{−n_max}, …, c_{n_max}`.
    pub fn new(n_max: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != 2 * n_max + 1 {
            return Err(Error::Parameter(format!(
                "expected {} coefficients for n_max = {n_max}, got {}",
                2 * n_max + 1,
                coeffs.len()
            )));
        }
        if coeffs.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::Parameter("coefficients must be finite".into()));
        }
        Ok(Self { n_max, coeffs: DVector::from_vec(coeffs) })
    }

    pub fn from_vector(n_max: usize, coeffs: DVector<Complex64>) -> Result<Self> {
        Self::new(n_max, coeffs.iter().copied().collect())
    }

    pub fn zero(n_max: usize) -> Self {
        Self { n_max, coeffs: DVector::from_element(2 * n_max + 1, ZERO) }
    }

    /// Basis state `e_m`.
    pub fn basis(n_max: usize, m: i64) -> Result<Self> {
        let mut psi = Self::zero(n_max);
        let i = index(n_max, m)
            .ok_or_else(|| Error::Parameter(format!("mode {m} outside window [-{n_max}, {n_max}]")))?;
        psi.coeffs[i] = Complex64::new(1.0, 0.0);
        Ok(psi)
    }

    /// `c_n = f(n)` for every `n` in the window.
    pub fn from_fn<F: FnMut(i64) -> Complex64>(n_max: usize, mut f: F) -> Self {
        let n = n_max as i64;
        Self { n_max, coeffs: DVector::from_iterator(2 * n_max + 1, (-n..=n).map(&mut f)) }
    }

    /// Normalized superposition `Σ_j w_j e_{m_j}`.
    pub fn superposition(n_max: usize, terms: &[(i64, Complex64)]) -> Result<Self> {
        let mut psi = Self::zero(n_max);
        for &(m, w) in terms {
            let i = index(n_max, m)
                .ok_or_else(|| Error::Parameter(format!("mode {m} outside window [-{n_max}, {n_max}]")))?;
            psi.coeffs[i] += w;
        }
        psi.normalized()
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn coeffs(&self) -> &DVector<Complex64> {
        &self.coeffs
    }

    /// `c_n`, zero outside the window.
    pub fn coeff(&self, n: i64) -> Complex64 {
        index(self.n_max, n).map_or(ZERO, |i| self.coeffs[i])
    }

    /// Iterator over `(n, c_n)`.
    pub fn modes(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let n = self.n_max as i64;
        (-n..=n).zip(self.coeffs.iter().copied())
    }

    pub fn norm_squared(&self) -> f64 {
        self.coeffs.norm_squared()
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.norm()
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm_squared() - 1.0).abs() <= tol
    }

    pub fn normalized(&self) -> Result<Self> {
        let norm = self.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::Parameter("cannot normalize a zero wave function".into()));
        }
        Ok(Self { n_max: self.n_max, coeffs: self.coeffs.unscale(norm) })
    }

    /// Zero-padded copy on a window of at least `n_max`.
    pub fn padded(&self, n_max: usize) -> Self {
        if n_max <= self.n_max {
            return self.clone();
        }
        Self::from_fn(n_max, |n| self.coeff(n))
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self { n_max: self.n_max, coeffs: self.coeffs.map(|c| c * factor) }
    }

    /// `ψ(φ) = Σ c_n e^{inφ}`.
    pub fn evaluate(&self, phi: f64) -> Complex64 {
        self.modes().map(|(n, c)| c * Complex64::cis(n as f64 * phi)).sum()
    }

    /// `ψ'(φ) = Σ i n c_n e^{inφ}`.
    pub fn derivative(&self, phi: f64) -> Complex64 {
        self.modes().map(|(n, c)| c * Complex64::new(0.0, n as f64) * Complex64::cis(n as f64 * phi)).sum()
    }

    /// Largest `|n|` with a nonzero coefficient.
    pub fn support_radius(&self) -> usize {
        self.modes().filter(|(_, c)| *c != ZERO).map(|(n, _)| n.unsigned_abs() as usize).max().unwrap_or(0)
    }
}

/// `(ψ2, ψ1) = Σ conj(c²_n) c¹_n`, zero-padding the shorter vector.
pub fn inner_product(psi2: &WaveFunction, psi1: &WaveFunction) -> Complex64 {
    let n = psi2.n_max.min(psi1.n_max) as i64;
    (-n..=n).map(|m| psi2.coeff(m).conj() * psi1.coeff(m)).sum()
}

/// `ψ(φ)` for any real `φ`; the expansion is `2π`-periodic.
pub fn evaluate(psi: &WaveFunction, phi: f64) -> Complex64 {
    psi.evaluate(phi)
}

/// Complex operator on the truncated basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BandedOperatorDoc", into = "BandedOperatorDoc")]
pub struct BandedOperator {
    n_max: usize,
    bandwidth: usize,
    hermitian: bool,
    reliable: usize,
    matrix: DMatrix<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct BandedOperatorDoc {
    n_max: usize,
    bandwidth: usize,
    #[serde(default)]
    hermitian: bool,
    entries: Vec<[f64; 2]>,
}

impl TryFrom<BandedOperatorDoc> for BandedOperator {
    type Error = Error;

    fn try_from(doc: BandedOperatorDoc) -> Result<Self> {
        let width = 2 * doc.bandwidth + 1;
        let rows = 2 * doc.n_max + 1;
        if doc.entries.len() != rows * width {
            return Err(Error::Format(format!(
                "band storage needs {} entries ({rows} rows x {width}), got {}",
                rows * width,
                doc.entries.len()
            )));
        }
        let n = doc.n_max as i64;
        let bw = doc.bandwidth as i64;
        let mut matrix = DMatrix::from_element(rows, rows, ZERO);
        for (r, m) in (-n..=n).enumerate() {
            for d in 0..width {
                let col = m + d as i64 - bw;
                let [re, im] = doc.entries[r * width + d];
                match index(doc.n_max, col) {
                    Some(j) => matrix[(r, j)] = Complex64::new(re, im),
                    None if re != 0.0 || im != 0.0 => {
                        return Err(Error::Format(format!("nonzero entry at ({m}, {col}) outside the window")))
                    }
                    None => {}
                }
            }
        }
        let op = BandedOperator::from_matrix(doc.n_max, matrix)?;
        if op.bandwidth > doc.bandwidth {
            return Err(Error::Format("entries exceed the declared bandwidth".into()));
        }
        let op = BandedOperator { bandwidth: doc.bandwidth.min(2 * doc.n_max), ..op };
        if doc.hermitian {
            op.with_hermitian_flag()
        } else {
            Ok(op)
        }
    }
}

impl From<BandedOperator> for BandedOperatorDoc {
    fn from(op: BandedOperator) -> Self {
        let n = op.n_max as i64;
        let bw = op.bandwidth as i64;
        let mut entries = Vec::with_capacity((2 * op.n_max + 1) * (2 * op.bandwidth + 1));
        for m in -n..=n {
            for col in m - bw..=m + bw {
                let v = op.get(m, col);
                entries.push([v.re, v.im]);
            }
        }
        BandedOperatorDoc { n_max: op.n_max, bandwidth: op.bandwidth, hermitian: op.hermitian, entries }
    }
}

impl BandedOperator {
    /// `A_mn = f(m, n)` for `|m − n| ≤ bandwidth`, zero elsewhere.
    pub fn from_fn<F: FnMut(i64, i64) -> Complex64>(n_max: usize, bandwidth: usize, mut f: F) -> Result<Self> {
        if bandwidth > 2 * n_max {
            return Err(Error::Parameter(format!("bandwidth {bandwidth} exceeds 2*n_max = {}", 2 * n_max)));
        }
        let dim = 2 * n_max + 1;
        let n = n_max as i64;
        let mut matrix = DMatrix::from_element(dim, dim, ZERO);
        for m in -n..=n {
            for col in (m - bandwidth as i64).max(-n)..=(m + bandwidth as i64).min(n) {
                matrix[((m + n) as usize, (col + n) as usize)] = f(m, col);
            }
        }
        Ok(Self { n_max, bandwidth, hermitian: false, reliable: n_max, matrix })
    }

    /// Wraps a dense matrix; the bandwidth is the widest nonzero diagonal.
    pub fn from_matrix(n_max: usize, matrix: DMatrix<Complex64>) -> Result<Self> {
        let dim = 2 * n_max + 1;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::Dimension { expected: n_max, found: (matrix.nrows().max(1) - 1) / 2 });
        }
        let mut bandwidth = 0;
        for j in 0..dim {
            for i in 0..dim {
                if matrix[(i, j)] != ZERO {
                    bandwidth = bandwidth.max(i.abs_diff(j));
                }
            }
        }
        Ok(Self { n_max, bandwidth, hermitian: false, reliable: n_max, matrix })
    }

    pub fn identity(n_max: usize) -> Self {
        let dim = 2 * n_max + 1;
        Self { n_max, bandwidth: 0, hermitian: true, reliable: n_max, matrix: DMatrix::identity(dim, dim) }
    }

    pub fn zero(n_max: usize) -> Self {
        let dim = 2 * n_max + 1;
        Self { n_max, bandwidth: 0, hermitian: true, reliable: n_max, matrix: DMatrix::from_element(dim, dim, ZERO) }
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn dim(&self) -> usize {
        2 * self.n_max + 1
    }

    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    /// Whether the hermitian flag is set (it was validated exactly).
    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    /// Entries with `max(|m|, |n|)` up to this radius agree with the
    /// untruncated operator.
    pub fn reliable_radius(&self) -> usize {
        self.reliable
    }

    /// True when some entries are polluted by the window edge.
    pub fn truncation_contaminated(&self) -> bool {
        self.reliable < self.n_max
    }

    /// `A_mn`, zero outside the window.
    pub fn get(&self, m: i64, n: i64) -> Complex64 {
        match (index(self.n_max, m), index(self.n_max, n)) {
            (Some(i), Some(j)) => self.matrix[(i, j)],
            _ => ZERO,
        }
    }

    /// `max_mn |A_mn − conj(A_nm)|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let adj = self.matrix.adjoint();
        (&self.matrix - adj).iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn check_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    /// Sets the hermitian flag after an exact check.
    pub fn with_hermitian_flag(mut self) -> Result<Self> {
        if !self.check_hermitian(0.0) {
            return Err(Error::Validation(format!(
                "operator is not exactly hermitian (defect {:.3e})",
                self.hermiticity_defect()
            )));
        }
        self.hermitian = true;
        Ok(self)
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.n_max != other.n_max {
            return Err(Error::Dimension { expected: self.n_max, found: other.n_max });
        }
        Ok(())
    }

    fn derived(&self, matrix: DMatrix<Complex64>, bandwidth: usize, reliable: usize) -> Self {
        Self { n_max: self.n_max, bandwidth: bandwidth.min(2 * self.n_max), hermitian: false, reliable, matrix }
    }

    /// Matrix product on the window. The band widens to the sum of the
    /// factors' bands; entries within `min(bw)` of the edge are contaminated.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let reliable =
            self.reliable.min(other.reliable).saturating_sub(self.bandwidth.min(other.bandwidth));
        Ok(self.derived(&self.matrix * &other.matrix, self.bandwidth + other.bandwidth, reliable))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = self.derived(
            &self.matrix + &other.matrix,
            self.bandwidth.max(other.bandwidth),
            self.reliable.min(other.reliable),
        );
        out.hermitian = self.hermitian && other.hermitian;
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        let mut out = self.derived(self.matrix.map(|c| c * factor), self.bandwidth, self.reliable);
        out.hermitian = self.hermitian && factor.im == 0.0;
        out
    }

    pub fn adjoint(&self) -> Self {
        let mut out = self.derived(self.matrix.adjoint(), self.bandwidth, self.reliable);
        out.hermitian = self.hermitian;
        out
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    /// `[A, B] = AB − BA`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.mul(other)?.sub(&other.mul(self)?)
    }

    /// `{A, B} = AB + BA`; hermitian whenever both factors are.
    pub fn anticommutator(&self, other: &Self) -> Result<Self> {
        let mut out = self.mul(other)?.add(&other.mul(self)?)?;
        out.hermitian = self.hermitian && other.hermitian;
        Ok(out)
    }

    /// `A ψ` (with `ψ` zero-padded or truncated to the operator window).
    pub fn apply(&self, psi: &WaveFunction) -> WaveFunction {
        let v = DVector::from_iterator(self.dim(), (-(self.n_max as i64)..=self.n_max as i64).map(|n| psi.coeff(n)));
        WaveFunction { n_max: self.n_max, coeffs: &self.matrix * v }
    }

    /// Largest entry difference restricted to `max(|m|, |n|) ≤ radius`.
    pub fn max_diff_within(&self, other: &Self, radius: usize) -> f64 {
        let r = radius.min(self.n_max).min(other.n_max) as i64;
        let mut worst: f64 = 0.0;
        for m in -r..=r {
            for n in -r..=r {
                worst = worst.max((self.get(m, n) - other.get(m, n)).norm());
            }
        }
        worst
    }
}

/// `A·B` on the truncated space.
pub fn op_mul(a: &BandedOperator, b: &BandedOperator) -> Result<BandedOperator> {
    a.mul(b)
}

/// `A ψ`.
pub fn op_apply(a: &BandedOperator, psi: &WaveFunction) -> WaveFunction {
    a.apply(psi)
}

pub fn commutator(a: &BandedOperator, b: &BandedOperator) -> Result<BandedOperator> {
    a.commutator(b)
}

pub fn anticommutator(a: &BandedOperator, b: &BandedOperator) -> Result<BandedOperator> {
    a.anticommutator(b)
}

/// Named operators with closed-form matrix elements.
#[derive(Debug, Clone, PartialEq)]
pub enum StandardOperator {
    Identity,
    /// `cos φ`
    Cos,
    /// `sin φ`
    Sin,
    /// `L = −iħ∂_φ`
    AngularMomentum,
    /// `cos kφ`
    CosK(u32),
    /// `sin kφ`
    SinK(u32),
    /// `L²`
    AngularMomentumSquared,
    Hamiltonian(PendulumModel),
    Potential(Potential),
}

/// Matrix of a standard operator; `hbar` is used by `L` and `L²` only
/// (the Hamiltonian carries its own constants).
pub fn standard_operator(kind: &StandardOperator, n_max: usize, hbar: f64) -> Result<BandedOperator> {
    if n_max < 1 {
        return Err(Error::Parameter("n_max must be at least 1".into()));
    }
    if !(hbar > 0.0 && hbar.is_finite()) {
        return Err(Error::Parameter(format!("hbar must be positive, got {hbar}")));
    }
    let half = Complex64::new(0.5, 0.0);
    let minus_half_i = Complex64::new(0.0, -0.5);
    let op = match kind {
        StandardOperator::Identity => return Ok(BandedOperator::identity(n_max)),
        StandardOperator::Cos => return standard_operator(&StandardOperator::CosK(1), n_max, hbar),
        StandardOperator::Sin => return standard_operator(&StandardOperator::SinK(1), n_max, hbar),
        StandardOperator::AngularMomentum => {
            BandedOperator::from_fn(n_max, 0, |m, _| Complex64::new(hbar * m as f64, 0.0))?
        }
        StandardOperator::AngularMomentumSquared => {
            BandedOperator::from_fn(n_max, 0, |m, _| Complex64::new((hbar * m as f64).powi(2), 0.0))?
        }
        StandardOperator::CosK(k) | StandardOperator::SinK(k) => {
            let k = *k as usize;
            if k > 2 * n_max {
                return Err(Error::Parameter(format!("mode k = {k} must satisfy 0 <= k <= 2*n_max = {}", 2 * n_max)));
            }
            let is_cos = matches!(kind, StandardOperator::CosK(_));
            if k == 0 {
                return Ok(if is_cos { BandedOperator::identity(n_max) } else { BandedOperator::zero(n_max) });
            }
            let k = k as i64;
            BandedOperator::from_fn(n_max, k as usize, |m, n| match (m - n, is_cos) {
                (d, true) if d == k || d == -k => half,
                (d, false) if d == k => minus_half_i,
                (d, false) if d == -k => -minus_half_i,
                _ => ZERO,
            })?
        }
        StandardOperator::Hamiltonian(model) => return model.hamiltonian(n_max),
        StandardOperator::Potential(pot) => potential_operator(pot, n_max)?,
    };
    op.with_hermitian_flag()
}
