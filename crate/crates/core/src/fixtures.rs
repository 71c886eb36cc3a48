//! The three built-in worked examples, embedded as literal data rather than
//! regenerated through the construction code path, so audits compare two
//! independent routes.
//!
//! Entries are stored exactly as written in the source material: a complex
//! number (a + b sqrt3)/2 + i (c + d sqrt3)/2 per matrix slot, times a global
//! 1/sqrt2 or 1/sqrt3 prefactor where one is printed.

use crate::construct::{SignBranch, ThetaParams};
use crate::error::Result;
use crate::linalg::{pauli, OperatorMatrix, StateVector};
use crate::scalar::{rational, AngleFrac, Backend, CycloNumber, Scalar};

/// (a + b sqrt3)/2 + i (c + d sqrt3)/2, all arguments in half-units.
fn q(a: i64, b: i64, c: i64, d: i64) -> CycloNumber {
    let re = &CycloNumber::from_rational(rational(a, 2))
        + &CycloNumber::sqrt3().scale(&rational(b, 2));
    let im = &CycloNumber::from_rational(rational(c, 2))
        + &CycloNumber::sqrt3().scale(&rational(d, 2));
    &re + &(&im * &CycloNumber::i())
}

fn scaled_matrix(rows: usize, cols: usize, scale: CycloNumber, cells: &[CycloNumber]) -> OperatorMatrix {
    let entries = cells
        .iter()
        .map(|c| Scalar::Exact(c * &scale))
        .collect();
    OperatorMatrix::from_entries(rows, cols, entries).expect("static fixture shape")
}

fn scaled_vec3(scale: CycloNumber, cells: [CycloNumber; 3]) -> [Scalar; 3] {
    std::array::from_fn(|k| Scalar::Exact(&cells[k] * &scale))
}

fn scaled_vec2(scale: CycloNumber, cells: [CycloNumber; 2]) -> [Scalar; 2] {
    std::array::from_fn(|k| Scalar::Exact(&cells[k] * &scale))
}

/// One worked example: its parameters and the independently stored reference
/// matrices and states to audit the construction against.
pub struct Example {
    pub number: u8,
    pub params: ThetaParams,
    /// Name of the first-basis completion: "default" or "tilted".
    pub first_basis_kind: &'static str,
    /// Reference W, with the global 1/sqrt3 folded in.
    pub w_reference: OperatorMatrix,
    /// Reference operator acting on the completion pair (maps (c, d) to the
    /// new completion (a, b)); global 1/sqrt2 folded in.
    pub s_reference: OperatorMatrix,
    /// Reference transformed bases |x'>, |y'>, |z'> (columns of W).
    pub xyz_reference: [[Scalar; 3]; 3],
    /// Reference completion pair (a, b) of the second basis.
    pub ab_reference: [[Scalar; 2]; 2],
}

impl Example {
    /// The reference second basis, expanded from the stored vectors:
    /// members 0..3 are (sigma_j x I3)(|0 x'> + |1 y'>)/sqrt2, members 4, 5
    /// are a x z' and b x z'.
    pub fn second_basis_reference(&self) -> Vec<StateVector> {
        let backend = Backend::Exact;
        let [x, y, z] = &self.xyz_reference;
        let [a, b] = &self.ab_reference;
        let inv_sqrt2 = Scalar::Exact(CycloNumber::inv_sqrt2());
        let mut amps = Vec::with_capacity(6);
        amps.extend(x.iter().map(|s| s * &inv_sqrt2));
        amps.extend(y.iter().map(|s| s * &inv_sqrt2));
        let seed = StateVector::new(amps).expect("static shape");
        let i3 = OperatorMatrix::identity(3, backend);
        let mut members: Vec<StateVector> = (0..4)
            .map(|j| {
                pauli(j, backend)
                    .kron(&i3)
                    .matvec(&seed)
                    .expect("static shape")
            })
            .collect();
        members.push(StateVector::product(a, z));
        members.push(StateVector::product(b, z));
        members
    }
}

/// The built-in example `n` (1, 2, or 3).
pub fn example(n: u8) -> Result<Example> {
    match n {
        1 => Ok(example1()),
        2 => Ok(example2()),
        3 => Ok(example3()),
        other => Err(crate::error::Error::InvalidParams(format!(
            "no built-in example {other} (expected 1, 2, or 3)"
        ))),
    }
}

fn angles(t: [(i64, i64); 6], tp: [(i64, i64); 2], s_branch: SignBranch) -> ThetaParams {
    ThetaParams {
        theta: std::array::from_fn(|k| AngleFrac::new(t[k].0, t[k].1)),
        theta_prime: std::array::from_fn(|k| AngleFrac::new(tp[k].0, tp[k].1)),
        s_branch,
    }
}

fn example1() -> Example {
    let params = angles(
        [(0, 1), (1, 3), (0, 1), (1, 1), (0, 1), (1, 3)],
        // Derived for the tilted completion so that the composed operator
        // reproduces the reference S below; not part of the printed data.
        [(1, 3), (11, 6)],
        SignBranch::Minus,
    );
    let w = scaled_matrix(
        3,
        3,
        CycloNumber::inv_sqrt3(),
        &[
            q(2, 0, 0, 0), q(0, -1, 1, 0), q(-2, 0, 0, 0),
            q(1, 0, 0, 1), q(0, 0, 2, 0), q(2, 0, 0, 0),
            q(2, 0, 0, 0), q(0, 0, -2, 0), q(1, 0, 0, 1),
        ],
    );
    let s = scaled_matrix(
        2,
        2,
        CycloNumber::inv_sqrt2(),
        &[
            q(2, 0, 0, 0), q(0, 0, 2, 0),
            q(0, 1, 1, 0), q(1, 0, 0, -1),
        ],
    );
    let inv_sqrt3 = CycloNumber::inv_sqrt3();
    let xyz = [
        scaled_vec3(inv_sqrt3.clone(), [q(2, 0, 0, 0), q(1, 0, 0, 1), q(2, 0, 0, 0)]),
        scaled_vec3(inv_sqrt3.clone(), [q(0, -1, 1, 0), q(0, 0, 2, 0), q(0, 0, -2, 0)]),
        scaled_vec3(inv_sqrt3, [q(-2, 0, 0, 0), q(2, 0, 0, 0), q(1, 0, 0, 1)]),
    ];
    let inv_sqrt2 = CycloNumber::inv_sqrt2();
    let ab = [
        scaled_vec2(inv_sqrt2.clone(), [q(1, 0, 0, 1), q(0, 1, -1, 0)]),
        scaled_vec2(inv_sqrt2, [q(0, 1, -1, 0), q(1, 0, 0, 1)]),
    ];
    Example {
        number: 1,
        params,
        first_basis_kind: "tilted",
        w_reference: w,
        s_reference: s,
        xyz_reference: xyz,
        ab_reference: ab,
    }
}

fn example2() -> Example {
    let params = angles(
        [(1, 1), (2, 3), (0, 1), (0, 1), (1, 1), (1, 3)],
        [(0, 1), (1, 2)],
        SignBranch::Plus,
    );
    let w = scaled_matrix(
        3,
        3,
        CycloNumber::inv_sqrt3(),
        &[
            q(-2, 0, 0, 0), q(0, -1, -1, 0), q(2, 0, 0, 0),
            q(-1, 0, 0, 1), q(0, 0, -2, 0), q(-2, 0, 0, 0),
            q(2, 0, 0, 0), q(0, 0, -2, 0), q(1, 0, 0, 1),
        ],
    );
    let s = scaled_matrix(
        2,
        2,
        CycloNumber::inv_sqrt2(),
        &[
            q(2, 0, 0, 0), q(0, 0, 2, 0),
            q(0, 0, 2, 0), q(2, 0, 0, 0),
        ],
    );
    let inv_sqrt3 = CycloNumber::inv_sqrt3();
    let xyz = [
        scaled_vec3(inv_sqrt3.clone(), [q(-2, 0, 0, 0), q(-1, 0, 0, 1), q(2, 0, 0, 0)]),
        scaled_vec3(inv_sqrt3.clone(), [q(0, -1, -1, 0), q(0, 0, -2, 0), q(0, 0, -2, 0)]),
        scaled_vec3(inv_sqrt3, [q(2, 0, 0, 0), q(-2, 0, 0, 0), q(1, 0, 0, 1)]),
    ];
    let inv_sqrt2 = CycloNumber::inv_sqrt2();
    let ab = [
        scaled_vec2(inv_sqrt2.clone(), [q(2, 0, 0, 0), q(0, 0, 2, 0)]),
        scaled_vec2(inv_sqrt2, [q(0, 0, 2, 0), q(2, 0, 0, 0)]),
    ];
    Example {
        number: 2,
        params,
        first_basis_kind: "default",
        w_reference: w,
        s_reference: s,
        xyz_reference: xyz,
        ab_reference: ab,
    }
}

fn example3() -> Example {
    let params = angles(
        [(4, 3), (1, 1), (0, 1), (1, 1), (0, 1), (1, 1)],
        [(1, 3), (1, 6)],
        SignBranch::Plus,
    );
    let w = scaled_matrix(
        3,
        3,
        CycloNumber::inv_sqrt3(),
        &[
            q(-1, 0, 0, -1), q(0, 0, -2, 0), q(-2, 0, 0, 0),
            q(-2, 0, 0, 0), q(0, 1, -1, 0), q(2, 0, 0, 0),
            q(2, 0, 0, 0), q(0, 0, -2, 0), q(-2, 0, 0, 0),
        ],
    );
    let s = scaled_matrix(
        2,
        2,
        CycloNumber::inv_sqrt2(),
        &[
            q(1, 0, 0, 1), q(0, 1, 1, 0),
            q(0, -1, 1, 0), q(1, 0, 0, -1),
        ],
    );
    let inv_sqrt3 = CycloNumber::inv_sqrt3();
    let xyz = [
        scaled_vec3(inv_sqrt3.clone(), [q(-1, 0, 0, -1), q(-2, 0, 0, 0), q(2, 0, 0, 0)]),
        scaled_vec3(inv_sqrt3.clone(), [q(0, 0, -2, 0), q(0, 1, -1, 0), q(0, 0, -2, 0)]),
        scaled_vec3(inv_sqrt3, [q(-2, 0, 0, 0), q(2, 0, 0, 0), q(-2, 0, 0, 0)]),
    ];
    let inv_sqrt2 = CycloNumber::inv_sqrt2();
    let ab = [
        scaled_vec2(inv_sqrt2.clone(), [q(1, 0, 0, 1), q(0, -1, 1, 0)]),
        scaled_vec2(inv_sqrt2, [q(0, 1, 1, 0), q(1, 0, 0, -1)]),
    ];
    Example {
        number: 3,
        params,
        first_basis_kind: "default",
        w_reference: w,
        s_reference: s,
        xyz_reference: xyz,
        ab_reference: ab,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{build_w, s_operator, FirstBasisSpec};
    use crate::scalar::DEFAULT_TOLERANCE;

    #[test]
    fn reference_matrices_match_the_templates() {
        for n in 1..=3 {
            let ex = example(n).unwrap();
            let w = build_w(&ex.params.theta, Backend::Exact).unwrap();
            assert_eq!(w, ex.w_reference, "example {n}: W");
            let spec =
                FirstBasisSpec::by_name(ex.first_basis_kind, Backend::Exact).unwrap();
            let s = s_operator(
                &ex.params.theta_prime,
                ex.params.s_branch,
                &spec,
                Backend::Exact,
            )
            .unwrap();
            assert_eq!(s, ex.s_reference, "example {n}: S");
        }
    }

    #[test]
    fn reference_xyz_are_w_columns() {
        for n in 1..=3 {
            let ex = example(n).unwrap();
            for col in 0..3 {
                for row in 0..3 {
                    assert_eq!(
                        ex.xyz_reference[col][row],
                        *ex.w_reference.at(row, col),
                        "example {n}: column {col} row {row}"
                    );
                }
            }
        }
    }

    #[test]
    fn reference_ab_are_s_images_of_the_completion() {
        for n in 1..=3 {
            let ex = example(n).unwrap();
            let spec =
                FirstBasisSpec::by_name(ex.first_basis_kind, Backend::Exact).unwrap();
            for (k, v) in [&spec.c, &spec.d].into_iter().enumerate() {
                for row in 0..2 {
                    let image = &(ex.s_reference.at(row, 0) * &v[0])
                        + &(ex.s_reference.at(row, 1) * &v[1]);
                    assert_eq!(
                        image, ex.ab_reference[k][row],
                        "example {n}: member {k} row {row}"
                    );
                }
            }
        }
    }

    #[test]
    fn reference_second_bases_are_normalized_states() {
        for n in 1..=3 {
            let ex = example(n).unwrap();
            for (k, s) in ex.second_basis_reference().iter().enumerate() {
                assert!(
                    s.is_normalized(DEFAULT_TOLERANCE),
                    "example {n} member {k}"
                );
            }
        }
    }

    #[test]
    fn reference_member_schmidt_ranks() {
        // Members 0..3 are maximally entangled (rank 2, equal weights);
        // members 4 and 5 are products of a C^2 state with z' (rank 1).
        for n in 1..=3 {
            let ex = example(n).unwrap();
            let basis = ex.second_basis_reference();
            for (k, s) in basis.iter().enumerate() {
                let p = crate::linalg::schmidt_profile(s, DEFAULT_TOLERANCE);
                if k < 4 {
                    assert_eq!(p.rank, 2, "example {n} member {k}");
                    assert!((p.coefficients[0] - 0.5f64.sqrt()).abs() < 1e-12);
                } else {
                    assert_eq!(p.rank, 1, "example {n} member {k}");
                    assert!((p.coefficients[0] - 1.0).abs() < 1e-12);
                }
            }
        }
    }
}
