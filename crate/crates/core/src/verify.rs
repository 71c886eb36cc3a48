//! Predicates and independent brute-force oracles: orthonormality, maximal
//! entanglement, unextendibility, mutual unbiasedness, modulus patterns, and
//! the printed parameter conditions. Everything reports into an auditable
//! [`VerificationReport`].
//!
//! Mandatory checks decide the overall verdict: orthonormality of both
//! bases, maximal entanglement of members 0..3 of both bases, unextendibility
//! of both complements, and the 36-overlap mutual-unbiasedness condition.
//! The parameter conditions, perpendicularity relations, and modulus patterns
//! are advisory diagnostics attached when construction provenance is present;
//! in particular the printed angle conditions are checked verbatim while W
//! unitarity is reported separately as the ground truth, so disagreements
//! between the two are visible in the report.

use serde::{Deserialize, Serialize};

use crate::construct::{
    build_f, build_w, s_operator, BasisPair, FirstBasisSpec, ThetaParams, COMPLETION_MEMBERS,
    ENTANGLED_MEMBERS,
};
use crate::error::{Error, Result};
use crate::linalg::{
    gram, is_unitary, max_entangled_check, singular_values_2x3, OperatorMatrix, StateVector,
};
use crate::scalar::{rational, AngleFrac, Backend, CycloNumber, Scalar};

// ---------------------------------------------------------------------------
// Report types
// ---------------------------------------------------------------------------

/// Where a failed check attains its worst residual.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    IndexPair { i: usize, j: usize },
    MemberIndex { index: usize },
    Entry { row: usize, col: usize },
    GridPoint { t: f64, phi: f64 },
    Relation { name: String },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheckEntry {
    pub name: String,
    pub backend: Backend,
    pub pass: bool,
    pub residual: f64,
    pub witness: Option<Witness>,
    pub mandatory: bool,
}

/// Append-only audit record; `overall` holds iff every mandatory check passed.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerificationReport {
    pub checks: Vec<CheckEntry>,
    pub overall: bool,
    pub tool_version: String,
    pub input_hash: String,
}

impl VerificationReport {
    pub fn assemble(checks: Vec<CheckEntry>, input_hash: String) -> Self {
        let overall = checks.iter().filter(|c| c.mandatory).all(|c| c.pass);
        VerificationReport {
            checks,
            overall,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            input_hash,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    /// One line per check plus the verdict, for terminal output.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let tag = if c.pass { "PASS" } else { "FAIL" };
            let kind = if c.mandatory { "" } else { " [advisory]" };
            let witness = match &c.witness {
                Some(w) => format!("  witness={w:?}"),
                None => String::new(),
            };
            out.push_str(&format!(
                "{tag} {:-44} backend={:<5} residual={:.3e}{kind}{witness}\n",
                c.name,
                format!("{:?}", c.backend).to_lowercase(),
                c.residual,
            ));
        }
        out.push_str(&format!(
            "overall: {}\n",
            if self.overall { "PASS" } else { "FAIL" }
        ));
        out
    }

    pub fn worst_failure(&self) -> Option<&CheckEntry> {
        self.checks
            .iter()
            .filter(|c| !c.pass)
            .max_by(|a, b| a.residual.total_cmp(&b.residual))
    }
}

/// FNV-1a of the canonical input bytes; the report's `input_hash`.
pub fn input_hash(bytes: &[u8]) -> String {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    format!("{h:016x}")
}

// ---------------------------------------------------------------------------
// Options
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GridSpec {
    pub nt: usize,
    pub nphi: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { nt: 181, nphi: 360 }
    }
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub tol: f64,
    pub grid: GridSpec,
    /// Also run the numeric grid oracle when the product-span certificate
    /// already settles unextendibility.
    pub grid_oracle: bool,
    /// Margin below 1/sqrt(2) that the scanned minimum singular value must
    /// stay under for the complement to count as free of maximally
    /// entangled states.
    pub epsilon: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            tol: crate::scalar::DEFAULT_TOLERANCE,
            grid: GridSpec::default(),
            grid_oracle: true,
            epsilon: 1e-6,
        }
    }
}

// ---------------------------------------------------------------------------
// Individual checks
// ---------------------------------------------------------------------------

/// Gram matrix against the identity; the witness is the worst (i, j).
pub fn check_orthonormal(states: &[StateVector], name: &str, tol: f64) -> CheckEntry {
    let backend = states[0].backend();
    let g = gram(states);
    let id = OperatorMatrix::identity(states.len(), backend);
    let mut worst = 0.0;
    let mut at = (0, 0);
    let mut exact_ok = true;
    for i in 0..states.len() {
        for j in 0..states.len() {
            let dev = g.at(i, j).distance_to(id.at(i, j));
            if dev > worst {
                worst = dev;
                at = (i, j);
            }
            if g.at(i, j) != id.at(i, j) {
                exact_ok = false;
            }
        }
    }
    let pass = match backend {
        Backend::Exact => exact_ok,
        Backend::Float => worst <= tol,
    };
    CheckEntry {
        name: name.to_string(),
        backend,
        pass,
        residual: worst,
        witness: (!pass).then_some(Witness::IndexPair { i: at.0, j: at.1 }),
        mandatory: true,
    }
}

/// Maximal entanglement of one member: M M^dagger = I/2.
pub fn check_max_entangled(state: &StateVector, name: &str, tol: f64) -> CheckEntry {
    let (pass, residual) = max_entangled_check(state, tol);
    CheckEntry {
        name: name.to_string(),
        backend: state.backend(),
        pass,
        residual,
        witness: None,
        mandatory: true,
    }
}

/// Two orthonormal generators of the orthogonal complement of the four
/// entangled members.
#[derive(Clone, Debug)]
pub struct ComplementSubspace {
    pub generators: [StateVector; 2],
}

impl ComplementSubspace {
    /// Validates orthonormality of the generators and orthogonality to every
    /// member; a verifier must reject rather than repair its input.
    pub fn new(generators: [StateVector; 2], members: &[StateVector], tol: f64) -> Result<Self> {
        let exact = generators[0].backend() == Backend::Exact;
        let [v1, v2] = &generators;
        for (k, v) in [v1, v2].into_iter().enumerate() {
            if !v.is_normalized(tol) {
                return Err(Error::DegenerateComplement(format!(
                    "generator {k} is not normalized"
                )));
            }
        }
        let cross = v1.inner(v2);
        let cross_bad = if exact {
            !cross.is_exactly_zero()
        } else {
            cross.modulus() > tol
        };
        if cross_bad {
            return Err(Error::DegenerateComplement(format!(
                "generators overlap (|<v1|v2>| = {:.3e})",
                cross.modulus()
            )));
        }
        for (index, v) in [v1, v2].into_iter().enumerate() {
            for (member, m) in members.iter().enumerate() {
                let overlap = m.inner(v);
                let bad = if exact {
                    !overlap.is_exactly_zero()
                } else {
                    overlap.modulus() > tol
                };
                if bad {
                    return Err(Error::InvalidComplement {
                        index,
                        member,
                        overlap: overlap.modulus(),
                    });
                }
            }
        }
        Ok(ComplementSubspace {
            generators: generators.clone(),
        })
    }
}

/// Product-state test: every 2x2 minor of the coefficient matrix vanishes.
/// Returns the worst minor modulus; `None` when the state is not product.
fn product_minor_residual(v: &StateVector, tol: f64) -> Option<f64> {
    let m = v.reshape_2x3();
    let mut worst = 0.0f64;
    let mut exact_ok = true;
    for j in 0..3 {
        for k in (j + 1)..3 {
            let minor = &(m.at(0, j) * m.at(1, k)) - &(m.at(0, k) * m.at(1, j));
            worst = worst.max(minor.modulus());
            if !minor.is_exactly_zero() {
                exact_ok = false;
            }
        }
    }
    let is_product = match v.backend() {
        Backend::Exact => exact_ok,
        Backend::Float => worst <= tol,
    };
    is_product.then_some(worst)
}

/// The first row of the coefficient matrix with a nonzero entry: for a
/// product state u x w this is proportional to w.
fn second_factor_row(v: &StateVector, tol: f64) -> Option<[Scalar; 3]> {
    let m = v.reshape_2x3();
    for r in 0..2 {
        let row: [Scalar; 3] = std::array::from_fn(|c| m.at(r, c).clone());
        let size = row.iter().map(Scalar::modulus).fold(0.0, f64::max);
        let nonzero = match v.backend() {
            Backend::Exact => row.iter().any(|e| !e.is_exactly_zero()),
            Backend::Float => size > tol,
        };
        if nonzero {
            return Some(row);
        }
    }
    None
}

/// Cross products w1_j w2_k - w1_k w2_j; zero iff the factors are parallel
/// (equal up to phase once both are nonzero).
fn parallel_residual(w1: &[Scalar; 3], w2: &[Scalar; 3], backend: Backend, tol: f64) -> Option<f64> {
    let mut worst = 0.0f64;
    let mut exact_ok = true;
    for j in 0..3 {
        for k in (j + 1)..3 {
            let cross = &(&w1[j] * &w2[k]) - &(&w1[k] * &w2[j]);
            worst = worst.max(cross.modulus());
            if !cross.is_exactly_zero() {
                exact_ok = false;
            }
        }
    }
    let parallel = match backend {
        Backend::Exact => exact_ok,
        Backend::Float => worst <= tol,
    };
    parallel.then_some(worst)
}

/// Scans psi(t, phi) = cos t v1 + e^{i phi} sin t v2 and returns the largest
/// minimum singular value found, with its grid point, after one round of
/// local pattern refinement. Ties break toward the lowest index.
pub fn grid_max_min_singular(
    v1: &StateVector,
    v2: &StateVector,
    grid: GridSpec,
) -> (f64, (f64, f64)) {
    let a = float_matrix(v1);
    let b = float_matrix(v2);
    let eval = |t: f64, phi: f64| -> f64 {
        let (ct, st) = (t.cos(), t.sin());
        let (cp, sp) = (phi.cos(), phi.sin());
        let mut m = [[(0.0, 0.0); 3]; 2];
        for r in 0..2 {
            for c in 0..3 {
                let (ar, ai) = a[r][c];
                let (br, bi) = b[r][c];
                // ct*a + st*(cp + i sp)*b
                m[r][c] = (
                    ct * ar + st * (cp * br - sp * bi),
                    ct * ai + st * (cp * bi + sp * br),
                );
            }
        }
        singular_values_2x3(&m).1
    };
    let half_pi = std::f64::consts::FRAC_PI_2;
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut best = f64::NEG_INFINITY;
    let mut best_at = (0.0, 0.0);
    for it in 0..grid.nt {
        let t = half_pi * it as f64 / (grid.nt.max(2) - 1) as f64;
        for ip in 0..grid.nphi {
            let phi = two_pi * ip as f64 / grid.nphi as f64;
            let s = eval(t, phi);
            if s > best {
                best = s;
                best_at = (t, phi);
            }
        }
    }
    // Local refinement: shrink a pattern-search step around the best point.
    let (mut t, mut phi) = best_at;
    let mut dt = half_pi / (grid.nt.max(2) - 1) as f64;
    let mut dp = two_pi / grid.nphi as f64;
    for _ in 0..60 {
        let mut moved = false;
        for (nt, np) in [
            (t + dt, phi),
            (t - dt, phi),
            (t, phi + dp),
            (t, phi - dp),
        ] {
            let nt = nt.clamp(0.0, half_pi);
            let np = np.rem_euclid(two_pi);
            let s = eval(nt, np);
            if s > best {
                best = s;
                t = nt;
                phi = np;
                best_at = (nt, np);
                moved = true;
            }
        }
        if !moved {
            dt *= 0.5;
            dp *= 0.5;
            if dt < 1e-9 && dp < 1e-9 {
                break;
            }
        }
    }
    (best, best_at)
}

fn float_matrix(v: &StateVector) -> [[(f64, f64); 3]; 2] {
    let mut m = [[(0.0, 0.0); 3]; 2];
    for (row, slots) in m.iter_mut().enumerate() {
        for (col, slot) in slots.iter_mut().enumerate() {
            *slot = v.amp(3 * row + col).to_complex();
        }
    }
    m
}

/// Unextendibility of `members` given a complement: no state of the
/// complement span may be maximally entangled.
///
/// Fast path: when both generators are product states sharing the same
/// second factor up to phase, the whole span is product, so the minimum
/// singular value vanishes identically and the pass is certified without
/// scanning. The grid oracle then runs in addition when requested.
pub fn check_unextendible(
    members: &[StateVector],
    complement: &ComplementSubspace,
    label: &str,
    opts: &VerifyOptions,
) -> Vec<CheckEntry> {
    debug_assert!(
        members.iter().all(|m| complement
            .generators
            .iter()
            .all(|v| m.inner(v).modulus() <= opts.tol.max(1e-9))),
        "complement must already be validated against the members"
    );
    let backend = complement.generators[0].backend();
    let [v1, v2] = &complement.generators;
    let mut entries = Vec::new();

    let certificate = (|| {
        let m1 = product_minor_residual(v1, opts.tol)?;
        let m2 = product_minor_residual(v2, opts.tol)?;
        let w1 = second_factor_row(v1, opts.tol)?;
        let w2 = second_factor_row(v2, opts.tol)?;
        let par = parallel_residual(&w1, &w2, backend, opts.tol)?;
        Some(m1.max(m2).max(par))
    })();

    if let Some(residual) = certificate {
        entries.push(CheckEntry {
            name: format!("unextendible({label}, product-span certificate)"),
            backend,
            pass: true,
            residual,
            witness: None,
            mandatory: true,
        });
    }

    if certificate.is_none() || opts.grid_oracle {
        let (max_min_sv, (t, phi)) = grid_max_min_singular(v1, v2, opts.grid);
        let threshold = 0.5f64.sqrt() - opts.epsilon;
        let pass = max_min_sv < threshold;
        entries.push(CheckEntry {
            name: format!("unextendible({label}, grid oracle)"),
            backend: Backend::Float,
            pass,
            residual: max_min_sv,
            witness: (!pass).then_some(Witness::GridPoint { t, phi }),
            mandatory: true,
        });
    }
    entries
}

/// All 36 squared overlaps |<phi_i|psi_j>|^2 equal 1/6.
pub fn check_mutually_unbiased(
    first: &[StateVector],
    second: &[StateVector],
    tol: f64,
) -> CheckEntry {
    let backend = first[0].backend();
    let sixth = rational(1, 6);
    let sixth_exact = CycloNumber::from_rational(sixth.clone());
    let target = 1.0 / 6.0;
    let mut worst = 0.0;
    let mut at = (0, 0);
    let mut exact_ok = true;
    for (i, phi) in first.iter().enumerate() {
        for (j, psi) in second.iter().enumerate() {
            let overlap2 = phi.inner(psi).abs2();
            let dev = (overlap2.to_complex().0 - target).abs();
            if dev > worst {
                worst = dev;
                at = (i, j);
            }
            if let Scalar::Exact(c) = &overlap2 {
                if *c != sixth_exact {
                    exact_ok = false;
                }
            }
        }
    }
    let pass = match backend {
        Backend::Exact => exact_ok,
        Backend::Float => worst <= tol,
    };
    CheckEntry {
        name: "mutually-unbiased".to_string(),
        backend,
        pass,
        residual: worst,
        witness: (!pass).then_some(Witness::IndexPair { i: at.0, j: at.1 }),
        mandatory: true,
    }
}

/// Entry moduli of F^dagger (I2 x W) F on columns 0..3 and of
/// F^dagger (S x W) F on columns 4..5 must all be 1/sqrt(6).
pub fn check_modulus_pattern(
    f: &OperatorMatrix,
    w: &OperatorMatrix,
    s_op: &OperatorMatrix,
    tol: f64,
) -> Result<CheckEntry> {
    let backend = f.backend();
    let f_dag = f.adjoint();
    let i2 = OperatorMatrix::identity(2, backend);
    let id_w = f_dag.matmul(&i2.kron(w))?.matmul(f)?;
    let s_w = f_dag.matmul(&s_op.kron(w))?.matmul(f)?;
    let sixth = CycloNumber::from_rational(rational(1, 6));
    let target = 1.0 / 6.0;
    let mut worst = 0.0;
    let mut at = (0, 0);
    let mut exact_ok = true;
    let mut scan = |m: &OperatorMatrix, cols: std::ops::Range<usize>| {
        for r in 0..6 {
            for c in cols.clone() {
                let a2 = m.at(r, c).abs2();
                let dev = (a2.to_complex().0 - target).abs();
                if dev > worst {
                    worst = dev;
                    at = (r, c);
                }
                if let Scalar::Exact(v) = &a2 {
                    if *v != sixth {
                        exact_ok = false;
                    }
                }
            }
        }
    };
    scan(&id_w, 0..4);
    scan(&s_w, 4..6);
    let pass = match backend {
        Backend::Exact => exact_ok,
        Backend::Float => worst <= tol,
    };
    Ok(CheckEntry {
        name: "modulus-pattern".to_string(),
        backend,
        pass,
        residual: worst,
        witness: (!pass).then_some(Witness::Entry {
            row: at.0,
            col: at.1,
        }),
        mandatory: false,
    })
}

fn phase_sum_residual(a: &AngleFrac, b: &AngleFrac) -> f64 {
    // |e^{ia} + e^{ib}|
    let (ar, ai) = (a.to_radians().cos(), a.to_radians().sin());
    let (br, bi) = (b.to_radians().cos(), b.to_radians().sin());
    (ar + br).hypot(ai + bi)
}

/// The printed angle conditions, checked verbatim with circular differences,
/// plus W unitarity as the independent ground truth.
pub fn check_theta_conditions(
    params: &ThetaParams,
    backend: Backend,
    tol: f64,
) -> Result<Vec<CheckEntry>> {
    let [t1, t2, t3, t4, t5, t6] = &params.theta;
    let mut entries = Vec::new();

    let third = AngleFrac::new(1, 3);
    let neg_third = AngleFrac::new(-1, 3);
    let d12 = t1.sub(t2);
    let pass1 = d12 == third || d12 == neg_third;
    entries.push(CheckEntry {
        name: "params: |theta1 - theta2| = pi/3".to_string(),
        backend,
        pass: pass1,
        residual: d12
            .circular_distance(&third)
            .min(d12.circular_distance(&neg_third)),
        witness: (!pass1).then_some(Witness::Relation {
            name: format!("theta1 - theta2 = {d12}"),
        }),
        mandatory: false,
    });

    let pi = AngleFrac::new(1, 1);
    let d45 = t4.sub(t5);
    let pass2 = d45 == pi;
    entries.push(CheckEntry {
        name: "params: |theta4 - theta5| = pi".to_string(),
        backend,
        pass: pass2,
        residual: d45.circular_distance(&pi),
        witness: (!pass2).then_some(Witness::Relation {
            name: format!("theta4 - theta5 = {d45}"),
        }),
        mandatory: false,
    });

    // e^{i(theta1 - theta4)} e^{-i pi/3} + e^{i(theta3 - theta6)} = 0.
    let lhs = t1.sub(t4).sub(&third);
    let rhs = t3.sub(t6);
    let pass3 = lhs.sub(&rhs) == pi;
    entries.push(CheckEntry {
        name: "params: phase-sum condition".to_string(),
        backend,
        pass: pass3,
        residual: phase_sum_residual(&lhs, &rhs),
        witness: (!pass3).then_some(Witness::Relation {
            name: format!("(theta1-theta4-pi/3) - (theta3-theta6) = {}", lhs.sub(&rhs)),
        }),
        mandatory: false,
    });

    let w = build_w(&params.theta, backend)?;
    let check = is_unitary(&w, tol)?;
    entries.push(CheckEntry {
        name: "params: W unitarity (ground truth)".to_string(),
        backend,
        pass: check.unitary,
        residual: check.residual,
        witness: (!check.unitary).then_some(Witness::Entry {
            row: check.worst_entry.0,
            col: check.worst_entry.1,
        }),
        mandatory: false,
    });
    Ok(entries)
}

/// z1 perpendicular to z2 in the complex plane: Re(z1 conj(z2)) = 0.
fn perp_residual(z1: &Scalar, z2: &Scalar, exact_flag: &mut bool) -> f64 {
    let p = z1 * &z2.conj();
    match &p {
        Scalar::Exact(c) => {
            // Real part is (p + conj p)/2.
            let twice_re = c + &c.conj();
            if !twice_re.is_zero() {
                *exact_flag = false;
            }
            (twice_re.to_complex().0 / 2.0).abs()
        }
        Scalar::Float { re, .. } => {
            let _ = exact_flag;
            re.abs()
        }
    }
}

/// The perpendicularity relations appropriate to the first-basis variant,
/// plus the entry-modulus conditions |w_ij| = 1/sqrt3 and |s_ij| = 1/sqrt2.
pub fn check_perpendicularity(
    w: &OperatorMatrix,
    s_op: &OperatorMatrix,
    spec: &FirstBasisSpec,
    tol: f64,
) -> CheckEntry {
    let backend = w.backend();
    let mut worst = 0.0f64;
    let mut worst_name = String::new();
    let mut exact_ok = true;

    let mut relation = |name: &str, z1: &Scalar, z2: &Scalar, exact_ok: &mut bool| -> f64 {
        let r = perp_residual(z1, z2, exact_ok);
        if r > worst {
            worst = r;
            worst_name = name.to_string();
        }
        r
    };

    relation("w11 _|_ w22", w.at(0, 0), w.at(1, 1), &mut exact_ok);
    relation("w21 _|_ w12", w.at(1, 0), w.at(0, 1), &mut exact_ok);

    if spec.is_computational() {
        let pairs = [
            ("w13 s11 _|_ w23 s21", (0, 2, 0, 0), (1, 2, 1, 0)),
            ("w23 s11 _|_ w13 s21", (1, 2, 0, 0), (0, 2, 1, 0)),
            ("w13 s12 _|_ w23 s22", (0, 2, 0, 1), (1, 2, 1, 1)),
            ("w23 s12 _|_ w13 s22", (1, 2, 0, 1), (0, 2, 1, 1)),
        ];
        for (name, (wr1, wc1, sr1, sc1), (wr2, wc2, sr2, sc2)) in pairs {
            let z1 = w.at(wr1, wc1) * s_op.at(sr1, sc1);
            let z2 = w.at(wr2, wc2) * s_op.at(sr2, sc2);
            relation(name, &z1, &z2, &mut exact_ok);
        }
    } else {
        relation("w31 _|_ w32", w.at(2, 0), w.at(2, 1), &mut exact_ok);
        // Components of S c and of S d must each be perpendicular; for the
        // tilted completion these are the printed combined-entry relations.
        for (name, v) in [("(S c)1 _|_ (S c)2", &spec.c), ("(S d)1 _|_ (S d)2", &spec.d)] {
            let top = &(s_op.at(0, 0) * &v[0]) + &(s_op.at(0, 1) * &v[1]);
            let bottom = &(s_op.at(1, 0) * &v[0]) + &(s_op.at(1, 1) * &v[1]);
            relation(name, &top, &bottom, &mut exact_ok);
        }
    }

    // Modulus parts of the conditions.
    let third = CycloNumber::from_rational(rational(1, 3));
    let half = CycloNumber::from_rational(rational(1, 2));
    let mut modulus_scan = |m: &OperatorMatrix, target: &CycloNumber, tf: f64, label: &str| {
        for r in 0..m.rows() {
            for c in 0..m.cols() {
                let a2 = m.at(r, c).abs2();
                let dev = (a2.to_complex().0 - tf).abs();
                if dev > worst {
                    worst = dev;
                    worst_name = format!("{label}[{r}{c}] modulus");
                }
                if let Scalar::Exact(v) = &a2 {
                    if v != target {
                        exact_ok = false;
                    }
                }
            }
        }
    };
    modulus_scan(w, &third, 1.0 / 3.0, "w");
    modulus_scan(s_op, &half, 0.5, "s");

    let pass = match backend {
        Backend::Exact => exact_ok,
        Backend::Float => worst <= tol,
    };
    CheckEntry {
        name: "perpendicularity".to_string(),
        backend,
        pass,
        residual: worst,
        witness: (!pass).then_some(Witness::Relation { name: worst_name }),
        mandatory: false,
    }
}

// ---------------------------------------------------------------------------
// verify_pair
// ---------------------------------------------------------------------------

fn unextendibility_entries(
    states: &[StateVector],
    label: &str,
    opts: &VerifyOptions,
) -> Vec<CheckEntry> {
    let members = &states[ENTANGLED_MEMBERS];
    let generators = [
        states[COMPLETION_MEMBERS.start].clone(),
        states[COMPLETION_MEMBERS.start + 1].clone(),
    ];
    match ComplementSubspace::new(generators, members, opts.tol) {
        Ok(complement) => check_unextendible(members, &complement, label, opts),
        Err(e) => {
            let (witness, residual) = match &e {
                Error::InvalidComplement {
                    index,
                    member,
                    overlap,
                } => (
                    Some(Witness::IndexPair {
                        i: COMPLETION_MEMBERS.start + index,
                        j: *member,
                    }),
                    *overlap,
                ),
                _ => (None, f64::NAN),
            };
            vec![CheckEntry {
                name: format!("unextendible({label}, complement validity)"),
                backend: states[0].backend(),
                pass: false,
                residual,
                witness,
                mandatory: true,
            }]
        }
    }
}

/// Runs the mandatory checks on both bases and the cross conditions, plus
/// the advisory parameter diagnostics when provenance is present.
pub fn verify_pair(pair: &BasisPair, opts: &VerifyOptions) -> Result<VerificationReport> {
    let mut checks = Vec::new();
    checks.push(check_orthonormal(&pair.first, "orthonormal(first)", opts.tol));
    checks.push(check_orthonormal(
        &pair.second,
        "orthonormal(second)",
        opts.tol,
    ));
    for (label, states) in [("first", &pair.first), ("second", &pair.second)] {
        for k in ENTANGLED_MEMBERS {
            checks.push(check_max_entangled(
                &states[k],
                &format!("max-entangled({label}[{k}])"),
                opts.tol,
            ));
        }
    }
    checks.extend(unextendibility_entries(&pair.first, "first", opts));
    checks.extend(unextendibility_entries(&pair.second, "second", opts));
    checks.push(check_mutually_unbiased(&pair.first, &pair.second, opts.tol));

    if let Some(p) = &pair.provenance {
        checks.extend(check_theta_conditions(
            &p.theta_params,
            pair.backend,
            opts.tol,
        )?);
        let w = build_w(&p.theta_params.theta, pair.backend)?;
        let s_op = s_operator(
            &p.theta_params.theta_prime,
            p.theta_params.s_branch,
            &p.first_basis,
            pair.backend,
        )?;
        checks.push(check_perpendicularity(&w, &s_op, &p.first_basis, opts.tol));
        let f = build_f(&p.first_basis, opts.tol)?;
        checks.push(check_modulus_pattern(&f, &w, &s_op, opts.tol)?);
    }

    let hash = input_hash(pair.to_json().as_bytes());
    Ok(VerificationReport::assemble(checks, hash))
}

/// Runs exact and float verification of the same pair and appends both sets
/// of entries into one report (entries carry their backend tags).
pub fn verify_pair_both(pair: &BasisPair, opts: &VerifyOptions) -> Result<VerificationReport> {
    if pair.backend != Backend::Exact {
        return Err(Error::NotEmbeddable(
            "both-backend verification needs an exact input pair".into(),
        ));
    }
    let exact = verify_pair(pair, opts)?;
    let float = verify_pair(&pair.to_float(), opts)?;
    let mut checks = exact.checks;
    checks.extend(float.checks);
    let hash = input_hash(pair.to_json().as_bytes());
    Ok(VerificationReport::assemble(checks, hash))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{build_first_basis, build_pair, sample_valid_params};
    use crate::fixtures::example;
    use crate::linalg::StateVector;
    use crate::scalar::DEFAULT_TOLERANCE;

    const TOL: f64 = DEFAULT_TOLERANCE;

    fn example_pair(n: u8) -> BasisPair {
        let ex = example(n).unwrap();
        let spec = FirstBasisSpec::by_name(ex.first_basis_kind, Backend::Exact).unwrap();
        BasisPair {
            backend: Backend::Exact,
            first: build_first_basis(&spec, TOL).unwrap(),
            second: ex.second_basis_reference(),
            provenance: Some(crate::construct::Provenance {
                theta_params: ex.params.clone(),
                first_basis: spec,
            }),
        }
    }

    #[test]
    fn orthonormality_of_default_basis() {
        let spec = FirstBasisSpec::computational(Backend::Exact);
        let basis = build_first_basis(&spec, TOL).unwrap();
        let entry = check_orthonormal(&basis, "orthonormal", TOL);
        assert!(entry.pass);
        assert_eq!(entry.residual, 0.0);

        let mut degenerate = basis.clone();
        degenerate[1] = degenerate[0].clone();
        let entry = check_orthonormal(&degenerate, "orthonormal", TOL);
        assert!(!entry.pass);
        assert_eq!(entry.witness, Some(Witness::IndexPair { i: 0, j: 1 }));
    }

    #[test]
    fn example1_second_basis_is_exactly_orthonormal() {
        let pair = example_pair(1);
        let entry = check_orthonormal(&pair.second, "orthonormal(second)", TOL);
        assert!(entry.pass);
        assert_eq!(entry.residual, 0.0);
    }

    #[test]
    fn max_entanglement_of_basis_members() {
        let spec = FirstBasisSpec::computational(Backend::Exact);
        let basis = build_first_basis(&spec, TOL).unwrap();
        for member in &basis[0..4] {
            assert!(check_max_entangled(member, "m", TOL).pass);
        }
        assert!(!check_max_entangled(&basis[4], "m", TOL).pass);
    }

    #[test]
    fn unextendibility_certificate_on_both_first_bases() {
        for spec in [
            FirstBasisSpec::computational(Backend::Exact),
            FirstBasisSpec::tilted(Backend::Exact),
        ] {
            let basis = build_first_basis(&spec, TOL).unwrap();
            let entries = unextendibility_entries(&basis, "first", &VerifyOptions::default());
            assert_eq!(entries.len(), 2, "certificate + grid oracle");
            assert!(entries[0].name.contains("certificate"));
            assert!(entries[0].pass);
            assert_eq!(entries[0].residual, 0.0);
            assert!(entries[1].name.contains("grid"));
            assert!(entries[1].pass);
            assert!(
                entries[1].residual <= 1e-9,
                "grid oracle residual {} too large",
                entries[1].residual
            );
        }
    }

    #[test]
    fn adversarial_complement_fails_at_the_injected_state() {
        // Members: the three transformed entangled states plus |1>|2'>;
        // complement: the untransformed maximally entangled state plus
        // |0>|2'>. The injected first generator is maximally entangled and
        // sits at t = 0 of the scan.
        let spec = FirstBasisSpec::computational(Backend::Exact);
        let basis = build_first_basis(&spec, TOL).unwrap();
        let members = vec![
            basis[1].clone(),
            basis[2].clone(),
            basis[3].clone(),
            StateVector::basis_state(1, 2, Backend::Exact),
        ];
        let complement = ComplementSubspace::new(
            [basis[0].clone(), StateVector::basis_state(0, 2, Backend::Exact)],
            &members,
            TOL,
        )
        .unwrap();
        let opts = VerifyOptions::default();
        let entries = check_unextendible(&members, &complement, "first", &opts);
        assert_eq!(entries.len(), 1, "no product certificate applies");
        let grid_entry = &entries[0];
        assert!(!grid_entry.pass);
        assert!((grid_entry.residual - 0.5f64.sqrt()).abs() < 1e-9);
        match grid_entry.witness {
            Some(Witness::GridPoint { t, .. }) => assert!(t.abs() < 1e-3),
            ref w => panic!("expected grid witness, got {w:?}"),
        }
    }

    #[test]
    fn product_span_sharing_the_first_factor_passes_via_the_grid() {
        // span{|0>|0'>, |0>|1'>} is all product, but the generators share
        // the FIRST factor, so the second-factor certificate declines and
        // the grid oracle decides.
        let backend = Backend::Exact;
        let members = vec![
            StateVector::basis_state(0, 2, backend),
            StateVector::basis_state(1, 0, backend),
            StateVector::basis_state(1, 1, backend),
            StateVector::basis_state(1, 2, backend),
        ];
        let complement = ComplementSubspace::new(
            [
                StateVector::basis_state(0, 0, backend),
                StateVector::basis_state(0, 1, backend),
            ],
            &members,
            TOL,
        )
        .unwrap();
        let entries = check_unextendible(&members, &complement, "first", &VerifyOptions::default());
        assert_eq!(entries.len(), 1, "certificate must decline");
        assert!(entries[0].name.contains("grid"));
        assert!(entries[0].pass);
        assert!(entries[0].residual <= 1e-9);
    }

    #[test]
    fn interior_entangled_state_is_found_mid_grid() {
        // span{|00'>, |11'>} contains (|00'> + |11'>)/sqrt(2) at t = pi/4:
        // the scan must fail with the witness in the interior.
        let backend = Backend::Exact;
        let members = vec![
            StateVector::basis_state(0, 1, backend),
            StateVector::basis_state(0, 2, backend),
            StateVector::basis_state(1, 0, backend),
            StateVector::basis_state(1, 2, backend),
        ];
        let complement = ComplementSubspace::new(
            [
                StateVector::basis_state(0, 0, backend),
                StateVector::basis_state(1, 1, backend),
            ],
            &members,
            TOL,
        )
        .unwrap();
        let entries = check_unextendible(&members, &complement, "first", &VerifyOptions::default());
        assert_eq!(entries.len(), 1);
        let grid = &entries[0];
        assert!(!grid.pass);
        assert!((grid.residual - 0.5f64.sqrt()).abs() < 1e-9);
        match grid.witness {
            Some(Witness::GridPoint { t, .. }) => {
                assert!((t - std::f64::consts::FRAC_PI_4).abs() < 1e-3, "t = {t}")
            }
            ref w => panic!("expected grid witness, got {w:?}"),
        }
    }

    #[test]
    fn invalid_complement_is_rejected_with_the_clashing_pair() {
        let spec = FirstBasisSpec::computational(Backend::Exact);
        let basis = build_first_basis(&spec, TOL).unwrap();
        let err = ComplementSubspace::new(
            [basis[0].clone(), basis[4].clone()],
            &basis[0..4],
            TOL,
        )
        .unwrap_err();
        match err {
            Error::InvalidComplement { index, member, overlap } => {
                assert_eq!(index, 0);
                assert_eq!(member, 0);
                assert!((overlap - 1.0).abs() < 1e-12);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn example1_pair_is_mutually_unbiased_exactly() {
        let pair = example_pair(1);
        let entry = check_mutually_unbiased(&pair.first, &pair.second, TOL);
        assert!(entry.pass);
        assert_eq!(entry.residual, 0.0);
    }

    #[test]
    fn basis_against_itself_is_not_unbiased() {
        let spec = FirstBasisSpec::computational(Backend::Exact);
        let basis = build_first_basis(&spec, TOL).unwrap();
        let entry = check_mutually_unbiased(&basis, &basis, TOL);
        assert!(!entry.pass);
        assert_eq!(entry.witness, Some(Witness::IndexPair { i: 0, j: 0 }));
        assert!((entry.residual - (1.0 - 1.0 / 6.0)).abs() < 1e-12);
    }

    #[test]
    fn example1_full_verification_passes_exactly() {
        let pair = example_pair(1);
        let report = verify_pair(&pair, &VerifyOptions::default()).unwrap();
        assert!(report.overall, "report:\n{}", report.render_text());
        // Advisory diagnostics (angle conditions, perpendicularity, modulus
        // pattern) hold too for this instance.
        for c in &report.checks {
            assert!(c.pass, "{} failed:\n{}", c.name, report.render_text());
            if c.mandatory {
                assert!(c.residual <= 1e-9, "{} residual {}", c.name, c.residual);
            }
        }
    }

    #[test]
    fn modulus_pattern_holds_even_where_unitarity_fails() {
        // Computed outcome for the second and third examples: the entry
        // moduli of the transformed operators still form the required
        // pattern (they depend only on theta5 - theta4 = pi and the template
        // phase locks), even though W itself is not unitary.
        for n in [1u8, 2, 3] {
            let ex = example(n).unwrap();
            let spec = FirstBasisSpec::by_name(ex.first_basis_kind, Backend::Exact).unwrap();
            let f = build_f(&spec, TOL).unwrap();
            let entry =
                check_modulus_pattern(&f, &ex.w_reference, &ex.s_reference, TOL).unwrap();
            assert!(entry.pass, "example {n}: {entry:?}");
            assert_eq!(entry.residual, 0.0, "example {n}");
        }
    }

    #[test]
    fn modulus_pattern_identity_w_fails() {
        let spec = FirstBasisSpec::computational(Backend::Exact);
        let f = build_f(&spec, TOL).unwrap();
        let w = OperatorMatrix::identity(3, Backend::Exact);
        let s = OperatorMatrix::identity(2, Backend::Exact);
        let entry = check_modulus_pattern(&f, &w, &s, TOL).unwrap();
        assert!(!entry.pass);
    }

    #[test]
    fn theta_conditions_on_the_three_examples() {
        // Example 1: printed conditions and ground truth all hold.
        let ex1 = example(1).unwrap();
        let entries = check_theta_conditions(&ex1.params, Backend::Exact, TOL).unwrap();
        assert!(entries.iter().all(|e| e.pass), "{entries:#?}");

        // Examples 2 and 3: the printed conditions hold, the ground truth
        // does not -- the closure branch is inconsistent with theta6.
        for n in [2, 3] {
            let ex = example(n).unwrap();
            let entries = check_theta_conditions(&ex.params, Backend::Exact, TOL).unwrap();
            assert!(entries[0].pass, "example {n}: condition 1");
            assert!(entries[1].pass, "example {n}: condition 2");
            assert!(entries[2].pass, "example {n}: condition 3");
            assert!(
                !entries[3].pass,
                "example {n}: W unexpectedly unitary"
            );
            assert!(entries[3].residual > 0.5);
            assert!(!ex.params.satisfies_closure());
        }
    }

    #[test]
    fn theta_condition_fails_when_angles_coincide() {
        let mut params = example(1).unwrap().params;
        params.theta[1] = params.theta[0].clone();
        let entries = check_theta_conditions(&params, Backend::Exact, TOL).unwrap();
        assert!(!entries[0].pass);
    }

    #[test]
    fn perpendicularity_of_example1_and_a_flat_w() {
        let ex = example(1).unwrap();
        let spec = FirstBasisSpec::tilted(Backend::Exact);
        let entry =
            check_perpendicularity(&ex.w_reference, &ex.s_reference, &spec, TOL);
        assert!(entry.pass, "{entry:?}");

        // All-ones/sqrt3 matrix: moduli fine, perpendicularity broken.
        let inv_sqrt3 = Scalar::Exact(CycloNumber::inv_sqrt3());
        let flat = OperatorMatrix::from_entries(3, 3, vec![inv_sqrt3; 9]).unwrap();
        let entry = check_perpendicularity(&flat, &ex.s_reference, &spec, TOL);
        assert!(!entry.pass);
    }

    #[test]
    fn example3_s_under_tilted_relations_is_not_perpendicular() {
        // Computed outcome: the example-3 operator belongs to the default
        // completion; under the tilted-variant relations it fails.
        let ex = example(3).unwrap();
        let spec = FirstBasisSpec::tilted(Backend::Exact);
        let entry =
            check_perpendicularity(&ex.w_reference, &ex.s_reference, &spec, TOL);
        assert!(!entry.pass);
        assert!(entry.residual > 0.1);
    }

    #[test]
    fn closure_samples_verify_exactly() {
        let opts = VerifyOptions {
            grid_oracle: false,
            ..VerifyOptions::default()
        };
        for params in sample_valid_params(21, 10, true) {
            let spec = FirstBasisSpec::computational(Backend::Exact);
            let pair = build_pair(&params, &spec, Backend::Exact, true, TOL).unwrap();
            let report = verify_pair(&pair, &opts).unwrap();
            assert!(report.overall, "{}", report.render_text());
            for c in report.checks.iter().filter(|c| c.mandatory) {
                assert_eq!(c.residual, 0.0, "{}", c.name);
            }
        }
    }

    #[test]
    fn backend_verdicts_agree_on_grid_inputs() {
        let opts = VerifyOptions::default();
        for n in 1..=3 {
            let pair = example_pair(n);
            let exact = verify_pair(&pair, &opts).unwrap();
            let float = verify_pair(&pair.to_float(), &opts).unwrap();
            assert_eq!(exact.overall, float.overall, "example {n}");
            let verdicts = |r: &VerificationReport| -> Vec<(String, bool)> {
                r.checks.iter().map(|c| (c.name.clone(), c.pass)).collect()
            };
            assert_eq!(verdicts(&exact), verdicts(&float), "example {n}");
        }
    }

    #[test]
    fn mu_witness_reproduces_its_residual() {
        let spec = FirstBasisSpec::computational(Backend::Exact);
        let basis = build_first_basis(&spec, TOL).unwrap();
        let entry = check_mutually_unbiased(&basis, &basis, TOL);
        let Some(Witness::IndexPair { i, j }) = entry.witness else {
            panic!("expected witness");
        };
        let overlap2 = basis[i].inner(&basis[j]).abs2().to_complex().0;
        assert!(((overlap2 - 1.0 / 6.0).abs() - entry.residual).abs() < 1e-15);
    }

    #[test]
    fn report_json_has_the_documented_fields() {
        let pair = example_pair(1);
        let report = verify_pair(&pair, &VerifyOptions::default()).unwrap();
        let value: serde_json::Value = serde_json::from_str(&report.to_json()).unwrap();
        assert!(value["checks"].is_array());
        assert!(value["overall"].is_boolean());
        assert!(value["tool_version"].is_string());
        assert!(value["input_hash"].is_string());
        let first = &value["checks"][0];
        for key in ["name", "backend", "pass", "residual", "witness", "mandatory"] {
            assert!(first.get(key).is_some(), "missing {key}");
        }
    }

    /// Sensitivity map of the mutual-unbiasedness moduli: rebuilding the
    /// second basis from a singly perturbed angle moves the 36 overlaps only
    /// through theta4/theta5 (the template keeps every other angle a common
    /// phase inside each affected block). The orthonormality of the second
    /// basis, by contrast, reacts to theta1, theta2, theta3, and theta6.
    #[test]
    fn mu_residual_sensitivity_by_angle() {
        let ex = example(1).unwrap();
        let spec = FirstBasisSpec::by_name(ex.first_basis_kind, Backend::Float).unwrap();
        let first = build_first_basis(&spec, TOL).unwrap();
        let delta = AngleFrac::new(1, 10); // not pi/12-embeddable: float path
        for k in 0..6 {
            let mut params = ex.params.clone();
            params.theta[k] = params.theta[k].add(&delta);
            let pair = build_pair(&params, &spec, Backend::Float, false, TOL).unwrap();
            let mu = check_mutually_unbiased(&first, &pair.second, TOL);
            let ortho = check_orthonormal(&pair.second, "orthonormal(second)", TOL);
            match k {
                3 | 4 => {
                    assert!(!mu.pass, "theta{} should break unbiasedness", k + 1);
                    assert!(mu.residual > 1e-3);
                }
                _ => {
                    assert!(
                        mu.residual < 1e-12,
                        "theta{} unexpectedly moved the moduli: {}",
                        k + 1,
                        mu.residual
                    );
                    assert!(!ortho.pass, "theta{} should break orthonormality", k + 1);
                    assert!(ortho.residual > 1e-3);
                }
            }
        }
    }

    /// Residuals grow monotonically with the perturbation size on the
    /// angles that the moduli actually depend on.
    #[test]
    fn mu_residuals_increase_with_perturbation_size() {
        let ex = example(1).unwrap();
        let spec = FirstBasisSpec::by_name(ex.first_basis_kind, Backend::Float).unwrap();
        let first = build_first_basis(&spec, TOL).unwrap();
        for k in [3usize, 4usize] {
            let mut last = 0.0;
            for (num, den) in [(1i64, 1000i64), (1, 100), (1, 10)] {
                let mut params = ex.params.clone();
                params.theta[k] = params.theta[k].add(&AngleFrac::new(num, den));
                let pair = build_pair(&params, &spec, Backend::Float, false, TOL).unwrap();
                let mu = check_mutually_unbiased(&first, &pair.second, TOL);
                assert!(
                    mu.residual > last,
                    "theta{}: residual not increasing at {num}/{den}",
                    k + 1
                );
                last = mu.residual;
            }
        }
    }
}

