//! Dense complex vectors and matrices over [`Scalar`], with tensor products,
//! Gram matrices, and Schmidt analysis for states of C^2 x C^3.
//!
//! Dimensions stay small (2x2, 3x3, 6x6, length-6 states); everything is
//! stored dense and row-major. The supported bipartition is fixed at 2 x 3:
//! a state lists its amplitudes in the computational product order
//! |00'>, |01'>, |02'>, |10'>, |11'>, |12'>.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{Backend, CycloNumber, Rational, Scalar};

pub const STATE_DIM: usize = 6;
pub const STATE_ORDERING: &str = "row-major A\u{2297}B";

// ---------------------------------------------------------------------------
// OperatorMatrix
// ---------------------------------------------------------------------------

/// A dense complex matrix with a uniform scalar backend, row-major entries.
#[derive(Clone, PartialEq, Debug)]
pub struct OperatorMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Scalar>,
}

impl OperatorMatrix {
    pub fn from_entries(rows: usize, cols: usize, entries: Vec<Scalar>) -> Result<Self> {
        if entries.len() != rows * cols || rows == 0 || cols == 0 {
            return Err(Error::ShapeMismatch(format!(
                "expected {rows}x{cols} = {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        let backend = entries[0].backend();
        if entries.iter().any(|e| e.backend() != backend) {
            return Err(Error::MixedBackend);
        }
        Ok(OperatorMatrix {
            rows,
            cols,
            entries,
        })
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map(|row| row.len()).unwrap_or(0);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::ShapeMismatch("ragged rows".into()));
        }
        Self::from_entries(r, c, rows.into_iter().flatten().collect())
    }

    pub fn zeros(rows: usize, cols: usize, backend: Backend) -> Self {
        OperatorMatrix {
            rows,
            cols,
            entries: vec![Scalar::zero(backend); rows * cols],
        }
    }

    pub fn identity(n: usize, backend: Backend) -> Self {
        let mut m = Self::zeros(n, n, backend);
        for k in 0..n {
            *m.at_mut(k, k) = Scalar::one(backend);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn backend(&self) -> Backend {
        self.entries[0].backend()
    }

    pub fn at(&self, r: usize, c: usize) -> &Scalar {
        &self.entries[r * self.cols + c]
    }

    pub fn at_mut(&mut self, r: usize, c: usize) -> &mut Scalar {
        &mut self.entries[r * self.cols + c]
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.entries
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows, self.backend());
        for r in 0..self.rows {
            for c in 0..self.cols {
                *out.at_mut(c, r) = self.at(r, c).conj();
            }
        }
        out
    }

    pub fn matmul(&self, rhs: &OperatorMatrix) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let backend = self.backend();
        let mut out = Self::zeros(self.rows, rhs.cols, backend);
        for r in 0..self.rows {
            for c in 0..rhs.cols {
                let mut acc = Scalar::zero(backend);
                for k in 0..self.cols {
                    acc = &acc + &(self.at(r, k) * rhs.at(k, c));
                }
                *out.at_mut(r, c) = acc;
            }
        }
        Ok(out)
    }

    /// Kronecker product; the composite row index is `i * rhs.rows + k`.
    pub fn kron(&self, rhs: &OperatorMatrix) -> Self {
        let mut out = Self::zeros(self.rows * rhs.rows, self.cols * rhs.cols, self.backend());
        for i in 0..self.rows {
            for j in 0..self.cols {
                for k in 0..rhs.rows {
                    for l in 0..rhs.cols {
                        *out.at_mut(i * rhs.rows + k, j * rhs.cols + l) =
                            self.at(i, j) * rhs.at(k, l);
                    }
                }
            }
        }
        out
    }

    pub fn sub(&self, rhs: &OperatorMatrix) -> Result<Self> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::ShapeMismatch("sub".into()));
        }
        let entries = self
            .entries
            .iter()
            .zip(&rhs.entries)
            .map(|(a, b)| a - b)
            .collect();
        Ok(OperatorMatrix {
            rows: self.rows,
            cols: self.cols,
            entries,
        })
    }

    pub fn matvec(&self, v: &StateVector) -> Result<StateVector> {
        if self.cols != v.len() {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} * vec{}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        let backend = self.backend();
        let amps = (0..self.rows)
            .map(|r| {
                let mut acc = Scalar::zero(backend);
                for k in 0..self.cols {
                    acc = &acc + &(self.at(r, k) * &v.amps[k]);
                }
                acc
            })
            .collect();
        StateVector::from_amplitudes_unchecked(amps)
    }

    /// Max entry modulus of self - other, as a float.
    pub fn max_deviation(&self, other: &OperatorMatrix) -> f64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.distance_to(b))
            .fold(0.0, f64::max)
    }

    pub fn to_float(&self) -> Self {
        OperatorMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(Scalar::to_float).collect(),
        }
    }

    /// Entry-exact equality for exact matrices, tolerance for float ones.
    pub fn approx_eq(&self, other: &OperatorMatrix, tol: f64) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self
                .entries
                .iter()
                .zip(&other.entries)
                .all(|(a, b)| a.approx_eq(b, tol))
    }
}

impl Serialize for OperatorMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<&Scalar>> = (0..self.rows)
            .map(|r| (0..self.cols).map(|c| self.at(r, c)).collect())
            .collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for OperatorMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows: Vec<Vec<Scalar>> = Vec::deserialize(d)?;
        OperatorMatrix::from_rows(rows).map_err(serde::de::Error::custom)
    }
}

/// sigma_0 = I, sigma_1, sigma_2, sigma_3 in the standard convention.
pub fn pauli(index: usize, backend: Backend) -> OperatorMatrix {
    let z = || Scalar::zero(backend);
    let one = || Scalar::one(backend);
    let i = || match backend {
        Backend::Exact => Scalar::Exact(CycloNumber::i()),
        Backend::Float => Scalar::Float { re: 0.0, im: 1.0 },
    };
    let rows = match index {
        0 => vec![vec![one(), z()], vec![z(), one()]],
        1 => vec![vec![z(), one()], vec![one(), z()]],
        2 => vec![vec![z(), -&i()], vec![i(), z()]],
        3 => vec![vec![one(), z()], vec![z(), -&one()]],
        _ => panic!("pauli index out of range"),
    };
    OperatorMatrix::from_rows(rows).expect("static shape")
}

// ---------------------------------------------------------------------------
// StateVector
// ---------------------------------------------------------------------------

/// A length-6 state of C^2 x C^3 in the computational product ordering.
#[derive(Clone, PartialEq, Debug)]
pub struct StateVector {
    amps: Vec<Scalar>,
}

impl StateVector {
    pub fn new(amps: Vec<Scalar>) -> Result<Self> {
        if amps.len() != STATE_DIM {
            return Err(Error::ShapeMismatch(format!(
                "state needs {STATE_DIM} amplitudes, got {}",
                amps.len()
            )));
        }
        let backend = amps[0].backend();
        if amps.iter().any(|a| a.backend() != backend) {
            return Err(Error::MixedBackend);
        }
        Ok(StateVector { amps })
    }

    pub(crate) fn from_amplitudes_unchecked(amps: Vec<Scalar>) -> Result<Self> {
        Self::new(amps)
    }

    /// Tensor product of a 2-dim and a 3-dim part.
    pub fn product(u: &[Scalar; 2], w: &[Scalar; 3]) -> Self {
        let amps = (0..2)
            .flat_map(|a| (0..3).map(move |b| (a, b)))
            .map(|(a, b)| &u[a] * &w[b])
            .collect();
        StateVector { amps }
    }

    pub fn basis_state(alpha: usize, beta: usize, backend: Backend) -> Self {
        let mut amps = vec![Scalar::zero(backend); STATE_DIM];
        amps[3 * alpha + beta] = Scalar::one(backend);
        StateVector { amps }
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn backend(&self) -> Backend {
        self.amps[0].backend()
    }

    pub fn amp(&self, k: usize) -> &Scalar {
        &self.amps[k]
    }

    pub fn amplitudes(&self) -> &[Scalar] {
        &self.amps
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        StateVector {
            amps: self.amps.iter().map(|a| a * s).collect(),
        }
    }

    pub fn add(&self, other: &StateVector) -> Self {
        StateVector {
            amps: self
                .amps
                .iter()
                .zip(&other.amps)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    /// <self|other> with conjugation on the left argument.
    pub fn inner(&self, other: &StateVector) -> Scalar {
        let mut acc = Scalar::zero(self.backend());
        for (a, b) in self.amps.iter().zip(&other.amps) {
            acc = &acc + &(&a.conj() * b);
        }
        acc
    }

    /// Squared norm as a (real) scalar.
    pub fn norm2(&self) -> Scalar {
        self.inner(self)
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        match self.norm2() {
            Scalar::Exact(c) => c == CycloNumber::one(),
            n => (n.to_complex().0 - 1.0).abs() <= tol,
        }
    }

    pub fn to_float(&self) -> Self {
        StateVector {
            amps: self.amps.iter().map(Scalar::to_float).collect(),
        }
    }

    pub fn approx_eq(&self, other: &StateVector, tol: f64) -> bool {
        self.amps
            .iter()
            .zip(&other.amps)
            .all(|(a, b)| a.approx_eq(b, tol))
    }

    /// The 2x3 coefficient matrix M with v = sum_{ij} M_ij |i>|j'>.
    pub fn reshape_2x3(&self) -> OperatorMatrix {
        OperatorMatrix {
            rows: 2,
            cols: 3,
            entries: self.amps.clone(),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct StateRepr {
    ordering: String,
    amplitudes: Vec<Scalar>,
}

impl Serialize for StateVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        StateRepr {
            ordering: STATE_ORDERING.to_string(),
            amplitudes: self.amps.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for StateVector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = StateRepr::deserialize(d)?;
        if repr.ordering != STATE_ORDERING {
            return Err(serde::de::Error::custom(format!(
                "unsupported state ordering `{}`",
                repr.ordering
            )));
        }
        StateVector::new(repr.amplitudes).map_err(serde::de::Error::custom)
    }
}

/// Gram matrix G[i][j] = <s_i|s_j>.
pub fn gram(states: &[StateVector]) -> OperatorMatrix {
    let n = states.len();
    let backend = states[0].backend();
    let mut g = OperatorMatrix::zeros(n, n, backend);
    for i in 0..n {
        for j in 0..n {
            *g.at_mut(i, j) = states[i].inner(&states[j]);
        }
    }
    g
}

/// Outcome of a unitarity test: exact matrices decide by coefficient
/// equality of A^dagger A against I, float matrices by max entry deviation.
#[derive(Clone, Debug)]
pub struct UnitaryCheck {
    pub unitary: bool,
    pub residual: f64,
    pub worst_entry: (usize, usize),
}

pub fn is_unitary(a: &OperatorMatrix, tol: f64) -> Result<UnitaryCheck> {
    if a.rows() != a.cols() {
        return Err(Error::ShapeMismatch("unitarity needs a square matrix".into()));
    }
    let g = a.adjoint().matmul(a)?;
    let id = OperatorMatrix::identity(a.rows(), a.backend());
    let mut worst = 0.0;
    let mut worst_entry = (0, 0);
    let mut exact_ok = true;
    for r in 0..g.rows() {
        for c in 0..g.cols() {
            let dev = g.at(r, c).distance_to(id.at(r, c));
            if dev > worst {
                worst = dev;
                worst_entry = (r, c);
            }
            if g.at(r, c) != id.at(r, c) {
                exact_ok = false;
            }
        }
    }
    let unitary = match a.backend() {
        Backend::Exact => exact_ok,
        Backend::Float => worst <= tol,
    };
    Ok(UnitaryCheck {
        unitary,
        residual: worst,
        worst_entry,
    })
}

// ---------------------------------------------------------------------------
// Schmidt analysis
// ---------------------------------------------------------------------------

/// Schmidt coefficients (descending) and rank of a 2x3 state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchmidtProfile {
    pub coefficients: [f64; 2],
    pub rank: usize,
}

/// Singular values of a float 2x3 coefficient matrix via the 2x2 closed form.
///
/// The determinant of M M^dagger is accumulated as the sum of squared moduli
/// of the 2x2 minors of M (Cauchy-Binet), which is nonnegative term by term;
/// the small eigenvalue uses the 2D/(T + sqrt(..)) form. Both choices avoid
/// the cancellation that would otherwise swamp near-zero singular values.
pub fn singular_values_2x3(m: &[[(f64, f64); 3]; 2]) -> (f64, f64) {
    let mut trace = 0.0;
    for row in m {
        for &(re, im) in row {
            trace += re * re + im * im;
        }
    }
    let mut det = 0.0;
    for j in 0..3 {
        for k in (j + 1)..3 {
            let (a, b) = m[0][j];
            let (c, d) = m[1][k];
            let (e, f) = m[0][k];
            let (g, h) = m[1][j];
            // minor = M0j*M1k - M0k*M1j
            let re = (a * c - b * d) - (e * g - f * h);
            let im = (a * d + b * c) - (e * h + f * g);
            det += re * re + im * im;
        }
    }
    let disc = (trace * trace - 4.0 * det).max(0.0).sqrt();
    let hi = 0.5 * (trace + disc);
    let lo = if hi > 0.0 { det / hi } else { 0.0 };
    (hi.max(0.0).sqrt(), lo.max(0.0).sqrt())
}

fn float_coeff_matrix(v: &StateVector) -> [[(f64, f64); 3]; 2] {
    let mut m = [[(0.0, 0.0); 3]; 2];
    for (row, slots) in m.iter_mut().enumerate() {
        for (col, slot) in slots.iter_mut().enumerate() {
            *slot = v.amp(3 * row + col).to_complex();
        }
    }
    m
}

/// M M^dagger in the state's own backend (2x2 Hermitian).
pub fn coefficient_gram(v: &StateVector) -> OperatorMatrix {
    let m = v.reshape_2x3();
    m.matmul(&m.adjoint()).expect("static shape")
}

pub fn schmidt_profile(v: &StateVector, tol: f64) -> SchmidtProfile {
    let (hi, lo) = singular_values_2x3(&float_coeff_matrix(v));
    let rank = match v.backend() {
        Backend::Exact => {
            let h = coefficient_gram(v);
            let det = &(h.at(0, 0) * h.at(1, 1)) - &(h.at(0, 1) * h.at(1, 0));
            if h.entries().iter().all(Scalar::is_exactly_zero) {
                0
            } else if det.is_exactly_zero() {
                1
            } else {
                2
            }
        }
        Backend::Float => [hi, lo].iter().filter(|s| **s > tol).count(),
    };
    SchmidtProfile {
        coefficients: [hi, lo],
        rank,
    }
}

/// Decides "M M^dagger = I/2" -- maximal entanglement -- without radicals.
/// Exact states decide exactly; float states compare within `tol`.
pub fn max_entangled_check(v: &StateVector, tol: f64) -> (bool, f64) {
    let h = coefficient_gram(v);
    let half = Rational::new(1.into(), 2.into());
    let target = match v.backend() {
        Backend::Exact => {
            let half = Scalar::Exact(CycloNumber::from_rational(half));
            let mut t = OperatorMatrix::zeros(2, 2, Backend::Exact);
            *t.at_mut(0, 0) = half.clone();
            *t.at_mut(1, 1) = half;
            t
        }
        Backend::Float => {
            let mut t = OperatorMatrix::zeros(2, 2, Backend::Float);
            *t.at_mut(0, 0) = Scalar::Float { re: 0.5, im: 0.0 };
            *t.at_mut(1, 1) = Scalar::Float { re: 0.5, im: 0.0 };
            t
        }
    };
    let residual = h.max_deviation(&target);
    let pass = match v.backend() {
        Backend::Exact => h == target,
        Backend::Float => residual <= tol,
    };
    (pass, residual)
}
