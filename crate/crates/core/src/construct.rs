//! Builders for the basis family: the first basis and its transfer matrix F,
//! the W(theta) and S(theta') templates, the second basis, and a sampler for
//! the valid parameter family.
//!
//! The W template alone fixes the moduli and the intra-column phase locks;
//! whether W is unitary depends on the angles. The printed necessary
//! conditions (|theta1 - theta2| = pi/3, |theta4 - theta5| = pi, and a phase
//! sum involving theta3/theta6) do not pin the third column against both of
//! the first two, so the generator uses the full branch-aware closure derived
//! by solving <col1, col3> = <col2, col3> = 0 on the template:
//!
//! - theta5 = theta4 + pi (both branches);
//! - theta2 = theta1 + pi/3 forces theta6 = theta3 - theta1 + theta4 - 2pi/3;
//! - theta2 = theta1 - pi/3 forces theta6 = theta3 - theta1 + theta4 + 2pi/3,
//!
//! all mod 2pi. The printed conditions are still checked verbatim in the
//! verify module so reports can show where the two disagree.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{pauli, OperatorMatrix, StateVector};
use crate::scalar::{AngleFrac, Backend, CycloNumber, Scalar};

// ---------------------------------------------------------------------------
// Parameters
// ---------------------------------------------------------------------------

/// Which sign row the S template uses (upper or lower of the +/- pair), and
/// which side theta2 sits on relative to theta1 in the closure.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SignBranch {
    Plus,
    Minus,
}

impl Serialize for SignBranch {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            SignBranch::Plus => "+".serialize(s),
            SignBranch::Minus => "-".serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for SignBranch {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match String::deserialize(d)?.as_str() {
            "+" => Ok(SignBranch::Plus),
            "-" => Ok(SignBranch::Minus),
            other => Err(serde::de::Error::custom(format!(
                "sign branch must be \"+\" or \"-\", got \"{other}\""
            ))),
        }
    }
}

/// The free angles of the family: theta1..theta6 for W, theta1', theta2'
/// for S, plus the sign branch of the S template.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct ThetaParams {
    pub theta: [AngleFrac; 6],
    pub theta_prime: [AngleFrac; 2],
    pub s_branch: SignBranch,
}

fn third_pi() -> AngleFrac {
    AngleFrac::new(1, 3)
}

fn pi() -> AngleFrac {
    AngleFrac::new(1, 1)
}

fn two_thirds_pi() -> AngleFrac {
    AngleFrac::new(2, 3)
}

impl ThetaParams {
    /// Completes the free angles (theta1, theta3, theta4) to a full set that
    /// makes W provably unitary. `w_branch` selects theta2 = theta1 +/- pi/3.
    pub fn closure_from_free(
        theta1: AngleFrac,
        theta3: AngleFrac,
        theta4: AngleFrac,
        w_branch: SignBranch,
        theta_prime: [AngleFrac; 2],
        s_branch: SignBranch,
    ) -> Self {
        let theta2 = match w_branch {
            SignBranch::Plus => theta1.add(&third_pi()),
            SignBranch::Minus => theta1.sub(&third_pi()),
        };
        let theta5 = theta4.add(&pi());
        let base = theta3.sub(&theta1).add(&theta4);
        let theta6 = match w_branch {
            SignBranch::Plus => base.sub(&two_thirds_pi()),
            SignBranch::Minus => base.add(&two_thirds_pi()),
        };
        ThetaParams {
            theta: [theta1, theta2, theta3, theta4, theta5, theta6],
            theta_prime,
            s_branch,
        }
    }

    /// True when the angles satisfy the branch-aware unitarity closure.
    pub fn satisfies_closure(&self) -> bool {
        let [t1, t2, t3, t4, t5, t6] = &self.theta;
        if *t5 != t4.add(&pi()) {
            return false;
        }
        let base = t3.sub(t1).add(t4);
        let plus = *t2 == t1.add(&third_pi()) && *t6 == base.sub(&two_thirds_pi());
        let minus = *t2 == t1.sub(&third_pi()) && *t6 == base.add(&two_thirds_pi());
        plus || minus
    }

    /// True when every angle is a multiple of pi/12 (exact backend capable).
    pub fn is_embeddable(&self) -> bool {
        self.theta.iter().all(AngleFrac::is_embeddable)
            && self.theta_prime.iter().all(AngleFrac::is_embeddable)
    }

    /// The natural backend for these parameters.
    pub fn preferred_backend(&self) -> Backend {
        if self.is_embeddable() {
            Backend::Exact
        } else {
            Backend::Float
        }
    }
}

// ---------------------------------------------------------------------------
// First basis
// ---------------------------------------------------------------------------

/// The orthonormal completion pair (c, d) in C^2 used for members 4 and 5.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct FirstBasisSpec {
    pub c: [Scalar; 2],
    pub d: [Scalar; 2],
}

impl FirstBasisSpec {
    pub fn new(c: [Scalar; 2], d: [Scalar; 2], tol: f64) -> Result<Self> {
        let spec = FirstBasisSpec { c, d };
        spec.validate(tol)?;
        Ok(spec)
    }

    /// c = |0>, d = |1>.
    pub fn computational(backend: Backend) -> Self {
        FirstBasisSpec {
            c: [Scalar::one(backend), Scalar::zero(backend)],
            d: [Scalar::zero(backend), Scalar::one(backend)],
        }
    }

    /// The tilted completion c = (1/2)|0> + (sqrt(3)/2)|1>,
    /// d = (sqrt(3)/2)|0> - (1/2)|1>.
    pub fn tilted(backend: Backend) -> Self {
        let half = Scalar::from_rational_in(crate::scalar::rational(1, 2), backend);
        let half_sqrt3 = match backend {
            Backend::Exact => {
                Scalar::Exact(CycloNumber::sqrt3().scale(&crate::scalar::rational(1, 2)))
            }
            Backend::Float => Scalar::Float {
                re: 3f64.sqrt() / 2.0,
                im: 0.0,
            },
        };
        FirstBasisSpec {
            c: [half.clone(), half_sqrt3.clone()],
            d: [half_sqrt3, -&half],
        }
    }

    pub fn by_name(name: &str, backend: Backend) -> Result<Self> {
        match name {
            "default" | "computational" => Ok(Self::computational(backend)),
            "tilted" => Ok(Self::tilted(backend)),
            other => Err(Error::InvalidParams(format!(
                "unknown first-basis spec `{other}` (expected `default` or `tilted`)"
            ))),
        }
    }

    pub fn backend(&self) -> Backend {
        self.c[0].backend()
    }

    pub fn validate(&self, tol: f64) -> Result<()> {
        let backend = self.backend();
        if self
            .c
            .iter()
            .chain(self.d.iter())
            .any(|s| s.backend() != backend)
        {
            return Err(Error::MixedBackend);
        }
        let norm = |v: &[Scalar; 2]| -> Scalar { &v[0].abs2() + &v[1].abs2() };
        let one = Scalar::one(backend);
        let overlap = &(&self.c[0].conj() * &self.d[0]) + &(&self.c[1].conj() * &self.d[1]);
        let ok = match backend {
            Backend::Exact => {
                norm(&self.c) == one && norm(&self.d) == one && overlap.is_exactly_zero()
            }
            Backend::Float => {
                norm(&self.c).distance_to(&one) <= tol
                    && norm(&self.d).distance_to(&one) <= tol
                    && overlap.modulus() <= tol
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::NonOrthonormalCompletion(format!(
                "|c|^2 = {:.6}, |d|^2 = {:.6}, |<c|d>| = {:.3e}",
                norm(&self.c).to_complex().0,
                norm(&self.d).to_complex().0,
                overlap.modulus()
            )))
        }
    }

    /// True for the computational completion (c, d) = (|0>, |1>).
    pub fn is_computational(&self) -> bool {
        let close = |s: &Scalar, re: f64| {
            let (a, b) = s.to_complex();
            (a - re).abs() < 1e-12 && b.abs() < 1e-12
        };
        close(&self.c[0], 1.0)
            && close(&self.c[1], 0.0)
            && close(&self.d[0], 0.0)
            && close(&self.d[1], 1.0)
    }

    /// The 2x2 matrix with columns c and d; unitary by the validation.
    pub fn completion_matrix(&self) -> OperatorMatrix {
        OperatorMatrix::from_rows(vec![
            vec![self.c[0].clone(), self.d[0].clone()],
            vec![self.c[1].clone(), self.d[1].clone()],
        ])
        .expect("static shape")
    }

    pub fn to_float(&self) -> Self {
        FirstBasisSpec {
            c: [self.c[0].to_float(), self.c[1].to_float()],
            d: [self.d[0].to_float(), self.d[1].to_float()],
        }
    }
}

/// (|00'> + |11'>)/sqrt(2), the seed of the entangled members.
fn bell_state(backend: Backend) -> StateVector {
    let inv_sqrt2 = inv_sqrt2_scalar(backend);
    let z = Scalar::zero(backend);
    StateVector::new(vec![
        inv_sqrt2.clone(),
        z.clone(),
        z.clone(),
        z.clone(),
        inv_sqrt2,
        z,
    ])
    .expect("static shape")
}

/// Members 0..3 are (sigma_i x I3)(|00'> + |11'>)/sqrt(2); members 4 and 5
/// are c x |2'> and d x |2'>.
pub fn build_first_basis(spec: &FirstBasisSpec, tol: f64) -> Result<Vec<StateVector>> {
    spec.validate(tol)?;
    let backend = spec.backend();
    let bell = bell_state(backend);
    let i3 = OperatorMatrix::identity(3, backend);
    let mut members = Vec::with_capacity(6);
    for k in 0..4 {
        members.push(pauli(k, backend).kron(&i3).matvec(&bell)?);
    }
    let e2 = [
        Scalar::zero(backend),
        Scalar::zero(backend),
        Scalar::one(backend),
    ];
    members.push(StateVector::product(&spec.c, &e2));
    members.push(StateVector::product(&spec.d, &e2));
    Ok(members)
}

/// The unitary taking the computational product basis to the first basis:
/// column j holds the coordinates of member j.
pub fn build_f(spec: &FirstBasisSpec, tol: f64) -> Result<OperatorMatrix> {
    let members = build_first_basis(spec, tol)?;
    let backend = spec.backend();
    let mut f = OperatorMatrix::zeros(6, 6, backend);
    for (j, member) in members.iter().enumerate() {
        for r in 0..6 {
            *f.at_mut(r, j) = member.amp(r).clone();
        }
    }
    Ok(f)
}

fn inv_sqrt3_scalar(backend: Backend) -> Scalar {
    match backend {
        Backend::Exact => Scalar::Exact(CycloNumber::inv_sqrt3()),
        Backend::Float => Scalar::Float {
            re: 1.0 / 3f64.sqrt(),
            im: 0.0,
        },
    }
}

fn inv_sqrt2_scalar(backend: Backend) -> Scalar {
    match backend {
        Backend::Exact => Scalar::Exact(CycloNumber::inv_sqrt2()),
        Backend::Float => Scalar::Float {
            re: 0.5f64.sqrt(),
            im: 0.0,
        },
    }
}

/// W(theta) = (1/sqrt 3) [[e^{i t1}, e^{i(t2 + pi/2)}, e^{i t4}],
///                        [e^{i t2}, e^{i(t1 + pi/2)}, e^{i t5}],
///                        [e^{i t3}, e^{i(t3 - pi/2)}, e^{i t6}]].
pub fn build_w(theta: &[AngleFrac; 6], backend: Backend) -> Result<OperatorMatrix> {
    let half_pi = AngleFrac::new(1, 2);
    let [t1, t2, t3, t4, t5, t6] = theta;
    let angles = [
        t1.clone(),
        t2.add(&half_pi),
        t4.clone(),
        t2.clone(),
        t1.add(&half_pi),
        t5.clone(),
        t3.clone(),
        t3.sub(&half_pi),
        t6.clone(),
    ];
    let scale = inv_sqrt3_scalar(backend);
    let entries = angles
        .iter()
        .map(|a| Ok(&Scalar::phase_in(a, backend)? * &scale))
        .collect::<Result<Vec<_>>>()?;
    OperatorMatrix::from_entries(3, 3, entries)
}

/// S(theta') = (1/sqrt 2) [[e^{i t1'}, e^{i t2'}],
///                         [+-e^{i(t1' + pi/2)}, -+e^{i(t2' + pi/2)}]].
/// Unitary for every input by the +/- phase structure of the second row.
pub fn build_s(
    theta_prime: &[AngleFrac; 2],
    branch: SignBranch,
    backend: Backend,
) -> Result<OperatorMatrix> {
    let half_pi = AngleFrac::new(1, 2);
    let [t1, t2] = theta_prime;
    let scale = inv_sqrt2_scalar(backend);
    let top = [
        &Scalar::phase_in(t1, backend)? * &scale,
        &Scalar::phase_in(t2, backend)? * &scale,
    ];
    let lower = [
        &Scalar::phase_in(&t1.add(&half_pi), backend)? * &scale,
        &Scalar::phase_in(&t2.add(&half_pi), backend)? * &scale,
    ];
    let bottom = match branch {
        SignBranch::Plus => [lower[0].clone(), -&lower[1]],
        SignBranch::Minus => [-&lower[0], lower[1].clone()],
    };
    OperatorMatrix::from_entries(
        2,
        2,
        vec![
            top[0].clone(),
            top[1].clone(),
            bottom[0].clone(),
            bottom[1].clone(),
        ],
    )
}

/// The operator applied to the C^2 factor for members 4 and 5. The S template
/// maps the computational pair to the new completion (|a>, |b>); composing
/// with the adjoint of the completion matrix makes it act on (c, d) instead,
/// so that S_op c = |a> and S_op d = |b> for any first-basis spec.
pub fn s_operator(
    theta_prime: &[AngleFrac; 2],
    branch: SignBranch,
    spec: &FirstBasisSpec,
    backend: Backend,
) -> Result<OperatorMatrix> {
    let template = build_s(theta_prime, branch, backend)?;
    template.matmul(&spec.completion_matrix().adjoint())
}

/// psi_j = (I2 x W) phi_j for j = 0..3 and psi_j = (S x W) phi_j for j = 4, 5.
pub fn build_second_basis(
    first: &[StateVector],
    w: &OperatorMatrix,
    s_op: &OperatorMatrix,
) -> Result<Vec<StateVector>> {
    if w.rows() != 3 || w.cols() != 3 || s_op.rows() != 2 || s_op.cols() != 2 {
        return Err(Error::ShapeMismatch(
            "second basis needs W 3x3 and S 2x2".into(),
        ));
    }
    let backend = w.backend();
    let id_w = OperatorMatrix::identity(2, backend).kron(w);
    let s_w = s_op.kron(w);
    let mut second = Vec::with_capacity(6);
    for (j, phi) in first.iter().enumerate() {
        let op = if j < 4 { &id_w } else { &s_w };
        second.push(op.matvec(phi)?);
    }
    Ok(second)
}

// ---------------------------------------------------------------------------
// BasisPair
// ---------------------------------------------------------------------------

/// Construction provenance carried by files produced from parameters.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct Provenance {
    pub theta_params: ThetaParams,
    pub first_basis: FirstBasisSpec,
}

/// Two ordered 6-member bases. Member roles are positional: indices 0..3 are
/// the maximally entangled members, 4 and 5 the completion.
#[derive(Clone, PartialEq, Debug)]
pub struct BasisPair {
    pub backend: Backend,
    pub first: Vec<StateVector>,
    pub second: Vec<StateVector>,
    pub provenance: Option<Provenance>,
}

pub const ENTANGLED_MEMBERS: std::ops::Range<usize> = 0..4;
pub const COMPLETION_MEMBERS: std::ops::Range<usize> = 4..6;

#[derive(Serialize, Deserialize)]
struct BasisPairRepr {
    #[serde(skip_serializing_if = "Option::is_none")]
    params: Option<Provenance>,
    first: Vec<StateVector>,
    second: Vec<StateVector>,
    backend: Backend,
}

impl BasisPair {
    pub fn to_json(&self) -> String {
        let repr = BasisPairRepr {
            params: self.provenance.clone(),
            first: self.first.clone(),
            second: self.second.clone(),
            backend: self.backend,
        };
        serde_json::to_string_pretty(&repr).expect("serializable")
    }

    /// Parses and validates. Degenerate inputs (wrong counts, mixed
    /// backends, non-normalized states) are rejected, not repaired.
    pub fn from_json(text: &str, tol: f64) -> Result<Self> {
        let repr: BasisPairRepr =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if repr.first.len() != 6 || repr.second.len() != 6 {
            return Err(Error::Parse(format!(
                "a basis pair needs 6 + 6 states, got {} + {}",
                repr.first.len(),
                repr.second.len()
            )));
        }
        for (which, states) in [("first", &repr.first), ("second", &repr.second)] {
            for (k, s) in states.iter().enumerate() {
                if s.backend() != repr.backend {
                    return Err(Error::Parse(format!(
                        "{which}[{k}] does not match the declared `{:?}` backend",
                        repr.backend
                    )));
                }
                if !s.is_normalized(tol) {
                    return Err(Error::Parse(format!(
                        "{which}[{k}] is not normalized (|norm^2 - 1| = {:.3e})",
                        (s.norm2().to_complex().0 - 1.0).abs()
                    )));
                }
            }
        }
        if let Some(p) = &repr.params {
            p.first_basis.validate(tol)?;
        }
        Ok(BasisPair {
            backend: repr.backend,
            first: repr.first,
            second: repr.second,
            provenance: repr.params,
        })
    }

    pub fn to_float(&self) -> Self {
        BasisPair {
            backend: Backend::Float,
            first: self.first.iter().map(StateVector::to_float).collect(),
            second: self.second.iter().map(StateVector::to_float).collect(),
            provenance: self.provenance.as_ref().map(|p| Provenance {
                theta_params: p.theta_params.clone(),
                first_basis: p.first_basis.to_float(),
            }),
        }
    }
}

/// Builds the full pair from parameters. With `checked` set, parameters that
/// violate the unitarity closure are refused.
pub fn build_pair(
    params: &ThetaParams,
    spec: &FirstBasisSpec,
    backend: Backend,
    checked: bool,
    tol: f64,
) -> Result<BasisPair> {
    if checked && !params.satisfies_closure() {
        return Err(Error::InvalidParams(
            "angles violate the unitarity closure (pass unchecked to build anyway)".into(),
        ));
    }
    if backend == Backend::Exact && !params.is_embeddable() {
        return Err(Error::NotEmbeddable(
            "parameters contain angles off the pi/12 grid".into(),
        ));
    }
    if spec.backend() != backend {
        return Err(Error::MixedBackend);
    }
    let first = build_first_basis(spec, tol)?;
    let w = build_w(&params.theta, backend)?;
    let s_op = s_operator(&params.theta_prime, params.s_branch, spec, backend)?;
    let second = build_second_basis(&first, &w, &s_op)?;
    Ok(BasisPair {
        backend,
        first,
        second,
        provenance: Some(Provenance {
            theta_params: params.clone(),
            first_basis: spec.clone(),
        }),
    })
}

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

/// Draws `count` closure-valid parameter sets. Free angles are uniform over
/// multiples of pi/12 (`exact_grid`) or uniform over a fine rational grid
/// that lands on the float backend otherwise. Each sample uses its own
/// deterministic stream, so sample k is independent of `count`.
pub fn sample_valid_params(seed: u64, count: usize, exact_grid: bool) -> Vec<ThetaParams> {
    (0..count)
        .map(|k| {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let draw = |rng: &mut ChaCha12Rng| {
                if exact_grid {
                    AngleFrac::new(rng.random_range(0..24), 12)
                } else {
                    AngleFrac::new(rng.random_range(0..2_000_000), 1_000_000)
                }
            };
            let theta1 = draw(&mut rng);
            let theta3 = draw(&mut rng);
            let theta4 = draw(&mut rng);
            let theta_prime = [draw(&mut rng), draw(&mut rng)];
            let w_branch = if rng.random::<bool>() {
                SignBranch::Plus
            } else {
                SignBranch::Minus
            };
            let s_branch = if rng.random::<bool>() {
                SignBranch::Plus
            } else {
                SignBranch::Minus
            };
            ThetaParams::closure_from_free(theta1, theta3, theta4, w_branch, theta_prime, s_branch)
        })
        .collect()
}
