//! Constructors for every operator the protocols use.
//!
//! Multi-register operators are written as explicit sums of outer products
//! over basis labels so each one reads like its defining block expression.
//! Register layouts:
//!
//! * `[2, 3]`    Bob's qubit ⊗ ancilla qutrit (general protocol, Bob side)
//! * `[2, 2, 3]` Alice ⊗ Bob ⊗ ancilla qutrit
//! * `[2, 2]`    Alice ⊗ Bob, or Bob ⊗ ancilla qubit (Bell-type protocol)
//! * `[2, 2, 2]` Alice ⊗ Bob ⊗ ancilla qubit
//!
//! None of the operators Alice takes part in (`toffoli`, `q1`, `q2`, `q3`,
//! `tilde_q1`, `tilde_q2`) accept rotation angles.

use std::f64::consts::FRAC_1_SQRT_2;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hilbert::{Operator, Tensor, C64, ONE, ZERO};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GateError {
    #[error("measurement outcome m must be 0 or 1, got {0}")]
    OutcomeOutOfRange(u8),
    #[error("Bell class index must be 0 or 1, got {0}")]
    ClassOutOfRange(u8),
}

/// Euler angles of `U = Rz(phi) · Ry(theta) · Rz(varphi)`, in radians.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EulerAngles {
    pub phi: f64,
    pub theta: f64,
    pub varphi: f64,
}

impl EulerAngles {
    pub const fn new(phi: f64, theta: f64, varphi: f64) -> Self {
        Self { phi, theta, varphi }
    }

    pub fn is_finite(&self) -> bool {
        self.phi.is_finite() && self.theta.is_finite() && self.varphi.is_finite()
    }
}

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

pub fn identity() -> Operator {
    Operator::qubit([[ONE, ZERO], [ZERO, ONE]])
}

pub fn pauli_x() -> Operator {
    Operator::qubit([[ZERO, ONE], [ONE, ZERO]])
}

pub fn pauli_z() -> Operator {
    Operator::qubit([[ONE, ZERO], [ZERO, -ONE]])
}

pub fn hadamard() -> Operator {
    let h = re(FRAC_1_SQRT_2);
    Operator::qubit([[h, h], [h, -h]])
}

pub fn rotation_y(theta: f64) -> Operator {
    let (s, c) = (theta / 2.0).sin_cos();
    Operator::qubit([[re(c), re(-s)], [re(s), re(c)]])
}

pub fn rotation_z(varphi: f64) -> Operator {
    Operator::qubit([
        [C64::from_polar(1.0, -varphi / 2.0), ZERO],
        [ZERO, C64::from_polar(1.0, varphi / 2.0)],
    ])
}

pub fn euler_unitary(angles: EulerAngles) -> Operator {
    rotation_z(angles.phi)
        .compose(&rotation_y(angles.theta))
        .and_then(|op| op.compose(&rotation_z(angles.varphi)))
        .expect("2x2 operators compose")
}

/// `Rz(phi) · Ry((-1)^m theta) · Rz(varphi)`.
pub fn u_m(angles: EulerAngles, m: u8) -> Result<Operator, GateError> {
    let sign = match m {
        0 => 1.0,
        1 => -1.0,
        other => return Err(GateError::OutcomeOutOfRange(other)),
    };
    Ok(euler_unitary(EulerAngles {
        theta: sign * angles.theta,
        ..angles
    }))
}

/// `op^k` for `k ∈ {0, 1}`.
fn power01(op: &Operator, k: u8) -> Operator {
    if k == 0 {
        identity()
    } else {
        op.clone()
    }
}

/// `|c⟩⟨c|` on a `dim`-level system.
fn projector(dim: usize, c: usize) -> Operator {
    Operator::from_outer_products(&[dim], [(&[c][..], &[c][..], ONE)]).expect("valid label")
}

/// `Σ_c blocks[c] ⊗ |c⟩⟨c|` with `blocks[c]` a single-qubit operator.
fn qubit_controlled_by_level(blocks: &[Operator]) -> Operator {
    let dim = blocks.len();
    let mut acc = Operator::zeros(&[2, dim]).expect("valid dims");
    for (c, block) in blocks.iter().enumerate() {
        let term = block.tensor(&projector(dim, c));
        acc = sum(&acc, &term);
    }
    acc
}

fn sum(a: &Operator, b: &Operator) -> Operator {
    let entries = a.entries().iter().zip(b.entries()).map(|(x, y)| x + y).collect();
    Operator::new(a.dims().to_vec(), entries).expect("same shape")
}

/// `I ⊗ |0⟩⟨0| + U ⊗ |1⟩⟨1|` on target ⊗ control.
pub fn controlled_unitary(u: &Operator) -> Operator {
    if !u.is_unitary() {
        log::warn!(
            "controlled_unitary built from a non-unitary block (defect {:e})",
            u.unitarity_defect()
        );
    }
    qubit_controlled_by_level(&[identity(), u.clone()])
}

/// CNOT with Bob's qubit as control and a qubit ancilla as target, on `[2, 2]`.
pub fn cnot() -> Operator {
    Operator::from_basis_map(&[2, 2], |d| vec![d[0], d[1] ^ d[0]]).expect("valid map")
}

/// CNOT from Bob's qubit onto the ancilla qutrit: swaps `|0⟩_C ↔ |1⟩_C`
/// when B = 1 and leaves `|2⟩_C` alone. On `[2, 3]`.
pub fn cnot_to_qutrit() -> Operator {
    Operator::from_basis_map(&[2, 3], |d| {
        let c = match (d[0], d[1]) {
            (1, 0) => 1,
            (1, 1) => 0,
            (_, c) => c,
        };
        vec![d[0], c]
    })
    .expect("valid map")
}

/// Counterfactual Toffoli on `[2, 2, 3]`: flips B iff A = 1 and C = 1.
pub fn toffoli() -> Operator {
    Operator::from_basis_map(&[2, 2, 3], |d| {
        let flip = usize::from(d[0] == 1 && d[2] == 1);
        vec![d[0], d[1] ^ flip, d[2]]
    })
    .expect("valid map")
}

/// `I ⊗ |0⟩⟨0| + Rz(varphi)X ⊗ |1⟩⟨1| + I ⊗ |2⟩⟨2|` on `[2, 3]`.
pub fn v11(angles: EulerAngles) -> Operator {
    let rz_x = rotation_z(angles.varphi).compose(&pauli_x()).expect("2x2");
    qubit_controlled_by_level(&[identity(), rz_x, identity()])
}

/// `|0⟩⟨0| ⊗ I + |10⟩⟨10| + |12⟩⟨11| + |11⟩⟨12|` on `[2, 3]`.
pub fn v12() -> Operator {
    let mut terms: Vec<([usize; 2], [usize; 2])> = (0..3).map(|c| ([0, c], [0, c])).collect();
    terms.push(([1, 0], [1, 0]));
    terms.push(([1, 2], [1, 1]));
    terms.push(([1, 1], [1, 2]));
    Operator::from_outer_products(&[2, 3], terms.iter().map(|(o, i)| (&o[..], &i[..], ONE)))
        .expect("valid labels")
}

/// `I ⊗ |0⟩⟨0| + Rz(phi)Ry(theta) ⊗ (|1⟩⟨1| + |2⟩⟨2|)` on `[2, 3]`.
pub fn v13(angles: EulerAngles) -> Operator {
    let rz_ry = rotation_z(angles.phi)
        .compose(&rotation_y(angles.theta))
        .expect("2x2");
    qubit_controlled_by_level(&[identity(), rz_ry.clone(), rz_ry])
}

/// `I ⊗ (|0⟩⟨0| + |1⟩⟨1|) + X ⊗ |2⟩⟨2|` on `[2, 3]`.
pub fn v14() -> Operator {
    qubit_controlled_by_level(&[identity(), identity(), pauli_x()])
}

/// Bob's first local operation `V14 · V13 · V12 · V11` on `[2, 3]`.
pub fn v1(angles: EulerAngles) -> Operator {
    [v12(), v13(angles), v14()]
        .iter()
        .fold(v11(angles), |acc, next| next.compose(&acc).expect("same dims"))
}

/// Flips A exactly when (B, C) ∈ {(1,1), (1,2)}; on `[2, 2, 3]`.
pub fn q1() -> Operator {
    let x = [(0, 1), (1, 0)];
    let identity_bc = [(0, 0), (0, 1), (1, 0), (0, 2)];
    let flip_bc = [(1, 1), (1, 2)];
    let mut terms = Vec::new();
    for (b, c) in identity_bc {
        for a in 0..2 {
            terms.push(([a, b, c], [a, b, c]));
        }
    }
    for (b, c) in flip_bc {
        for (out, inp) in x {
            terms.push(([out, b, c], [inp, b, c]));
        }
    }
    Operator::from_outer_products(&[2, 2, 3], terms.iter().map(|(o, i)| (&o[..], &i[..], ONE)))
        .expect("valid labels")
}

/// Flips B exactly when (A, C) ∈ {(0,1), (1,2)}; on `[2, 2, 3]`.
pub fn q2() -> Operator {
    let mut terms = Vec::new();
    for b in 0..2 {
        // (|0⟩⟨0| + |1⟩⟨1|)_A ⊗ I ⊗ |0⟩⟨0|
        for a in 0..2 {
            terms.push(([a, b, 0], [a, b, 0]));
        }
        // |1⟩⟨1| ⊗ I ⊗ |1⟩⟨1| and |0⟩⟨0| ⊗ I ⊗ |2⟩⟨2|
        terms.push(([1, b, 1], [1, b, 1]));
        terms.push(([0, b, 2], [0, b, 2]));
        // |0⟩⟨0| ⊗ X ⊗ |1⟩⟨1| and |1⟩⟨1| ⊗ X ⊗ |2⟩⟨2|
        terms.push(([0, 1 - b, 1], [0, b, 1]));
        terms.push(([1, 1 - b, 2], [1, b, 2]));
    }
    Operator::from_outer_products(&[2, 2, 3], terms.iter().map(|(o, i)| (&o[..], &i[..], ONE)))
        .expect("valid labels")
}

/// `|0⟩⟨0| ⊗ I + |1⟩⟨1| ⊗ (|0⟩⟨1| + |1⟩⟨2| + |2⟩⟨0|)` on `[2, 3]`.
pub fn v2() -> Operator {
    let mut terms: Vec<([usize; 2], [usize; 2])> = (0..3).map(|c| ([0, c], [0, c])).collect();
    terms.push(([1, 0], [1, 1]));
    terms.push(([1, 1], [1, 2]));
    terms.push(([1, 2], [1, 0]));
    Operator::from_outer_products(&[2, 3], terms.iter().map(|(o, i)| (&o[..], &i[..], ONE)))
        .expect("valid labels")
}

/// Controlled-Z on `[2, 2]`.
pub fn controlled_z() -> Operator {
    controlled_unitary(&pauli_z())
}

/// Identity for m = 0; `(Z ⊗ X) · Zc · (I ⊗ X)` for m = 1. On `[2, 2]` (A ⊗ B).
pub fn q3(m: u8) -> Result<Operator, GateError> {
    match m {
        0 => Ok(Operator::identity(&[2, 2]).expect("valid dims")),
        1 => {
            let zx = pauli_z().tensor(&pauli_x());
            let ix = identity().tensor(&pauli_x());
            Ok(zx
                .compose(&controlled_z())
                .and_then(|op| op.compose(&ix))
                .expect("4x4"))
        }
        other => Err(GateError::OutcomeOutOfRange(other)),
    }
}

/// Hadamard on the `{|0⟩, |1⟩}` subspace of a qutrit, identity on `|2⟩`.
pub fn hadamard_on_qutrit() -> Operator {
    let h = re(FRAC_1_SQRT_2);
    Operator::new(vec![3], vec![h, h, ZERO, h, -h, ZERO, ZERO, ZERO, ONE]).expect("3x3")
}

/// `I ⊗ |0⟩⟨0| + X^{1-ℓ} U X^ℓ ⊗ |1⟩⟨1|` on `[2, 2]` (B ⊗ qubit ancilla).
pub fn tilde_v1_from_unitary(u: &Operator, ell: u8) -> Result<Operator, GateError> {
    if ell > 1 {
        return Err(GateError::ClassOutOfRange(ell));
    }
    let x = pauli_x();
    let block = power01(&x, 1 - ell)
        .compose(u)
        .and_then(|op| op.compose(&power01(&x, ell)))
        .expect("2x2");
    Ok(qubit_controlled_by_level(&[identity(), block]))
}

pub fn tilde_v1(angles: EulerAngles, ell: u8) -> Result<Operator, GateError> {
    tilde_v1_from_unitary(&euler_unitary(angles), ell)
}

/// Flips A exactly when (B, C) = (1, 1); on `[2, 2, 2]`.
pub fn tilde_q1() -> Operator {
    let mut terms = Vec::new();
    for (b, c) in [(0, 0), (0, 1), (1, 0)] {
        for a in 0..2 {
            terms.push(([a, b, c], [a, b, c]));
        }
    }
    terms.push(([1, 1, 1], [0, 1, 1]));
    terms.push(([0, 1, 1], [1, 1, 1]));
    Operator::from_outer_products(&[2, 2, 2], terms.iter().map(|(o, i)| (&o[..], &i[..], ONE)))
        .expect("valid labels")
}

/// On `[2, 2, 2]`: identity when C = 0; when C = 1 applies `X^{1-ℓ}` to B if
/// A = 1 and `X^ℓ` to B if A = 0.
pub fn tilde_q2(ell: u8) -> Result<Operator, GateError> {
    if ell > 1 {
        return Err(GateError::ClassOutOfRange(ell));
    }
    let ell = usize::from(ell);
    let mut terms = Vec::new();
    for b in 0..2 {
        for a in 0..2 {
            terms.push(([a, b, 0], [a, b, 0]));
        }
        terms.push(([1, b ^ (1 - ell), 1], [1, b, 1]));
        terms.push(([0, b ^ ell, 1], [0, b, 1]));
    }
    Ok(
        Operator::from_outer_products(&[2, 2, 2], terms.iter().map(|(o, i)| (&o[..], &i[..], ONE)))
            .expect("valid labels"),
    )
}

/// A named operator plus the structural property it is expected to have.
#[derive(Debug, Clone)]
pub struct NamedGate {
    pub name: &'static str,
    pub op: Operator,
    pub permutation: bool,
}

/// Every constructor instantiated at `angles`, for exhaustive structural checks.
pub fn catalog(angles: EulerAngles) -> Vec<NamedGate> {
    let mut gates = vec![
        ("rotation_y", rotation_y(angles.theta), false),
        ("rotation_z", rotation_z(angles.varphi), false),
        ("euler_unitary", euler_unitary(angles), false),
        ("u_m(0)", u_m(angles, 0).expect("valid m"), false),
        ("u_m(1)", u_m(angles, 1).expect("valid m"), false),
        (
            "controlled_unitary",
            controlled_unitary(&euler_unitary(angles)),
            false,
        ),
        ("cnot", cnot(), true),
        ("cnot_to_qutrit", cnot_to_qutrit(), true),
        ("v11", v11(angles), false),
        ("v12", v12(), true),
        ("v13", v13(angles), false),
        ("v14", v14(), true),
        ("v1", v1(angles), false),
        ("q1", q1(), true),
        ("q2", q2(), true),
        ("v2", v2(), true),
        ("q3(0)", q3(0).expect("valid m"), true),
        ("q3(1)", q3(1).expect("valid m"), false),
        ("toffoli", toffoli(), true),
        ("hadamard_on_qutrit", hadamard_on_qutrit(), false),
        ("tilde_q1", tilde_q1(), true),
    ];
    for ell in 0..2u8 {
        gates.push((
            if ell == 0 { "tilde_v1(0)" } else { "tilde_v1(1)" },
            tilde_v1(angles, ell).expect("valid ell"),
            false,
        ));
        gates.push((
            if ell == 0 { "tilde_q2(0)" } else { "tilde_q2(1)" },
            tilde_q2(ell).expect("valid ell"),
            true,
        ));
    }
    gates
        .into_iter()
        .map(|(name, op, permutation)| NamedGate {
            name,
            op,
            permutation,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{apply, StateVector};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    const EPS: f64 = 1e-15;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn close(a: &Operator, b: &Operator, tol: f64) -> bool {
        a.max_abs_diff(b) < tol
    }

    fn image(op: &Operator, digits: &[usize]) -> Vec<usize> {
        assert!(op.is_permutation());
        op.permute_basis(digits).unwrap()
    }

    #[test]
    fn rotation_y_special_angles() {
        assert!(close(&rotation_y(0.0), &identity(), EPS));
        let pi = Operator::qubit([[ZERO, -ONE], [ONE, ZERO]]);
        assert!(close(&rotation_y(PI), &pi, EPS));
        let h = FRAC_1_SQRT_2;
        let half = Operator::qubit([[c(h, 0.), c(-h, 0.)], [c(h, 0.), c(h, 0.)]]);
        assert!(close(&rotation_y(PI / 2.0), &half, EPS));
    }

    #[test]
    fn rotation_z_special_angles() {
        assert!(close(&rotation_z(0.0), &identity(), EPS));
        let diag = Operator::qubit([[c(0., -1.), ZERO], [ZERO, c(0., 1.)]]);
        assert!(close(&rotation_z(PI), &diag, EPS));
        assert!(close(&rotation_z(2.0 * PI), &identity().scaled(-ONE), EPS));
    }

    #[test]
    fn euler_unitary_matches_hand_product() {
        assert!(close(&euler_unitary(EulerAngles::default()), &identity(), EPS));
        assert!(close(
            &euler_unitary(EulerAngles::new(0.0, PI, 0.0)),
            &rotation_y(PI),
            EPS
        ));
        // Rz(a)Ry(b)Rz(g) entries multiplied out by hand.
        let (a, b, g) = (PI / 3.0, PI / 4.0, PI / 5.0);
        let (cb, sb) = ((b / 2.0).cos(), (b / 2.0).sin());
        let expected = Operator::qubit([
            [
                C64::from_polar(cb, -(a + g) / 2.0),
                C64::from_polar(-sb, (g - a) / 2.0),
            ],
            [
                C64::from_polar(sb, (a - g) / 2.0),
                C64::from_polar(cb, (a + g) / 2.0),
            ],
        ]);
        assert!(close(&euler_unitary(EulerAngles::new(a, b, g)), &expected, 1e-15));
    }

    #[test]
    fn u_m_flips_theta_for_odd_outcome() {
        let angles = EulerAngles::new(0.3, 1.1, -0.7);
        assert_eq!(u_m(angles, 0).unwrap(), euler_unitary(angles));
        let theta_only = EulerAngles::new(0.0, 0.9, 0.0);
        assert!(close(&u_m(theta_only, 1).unwrap(), &rotation_y(-0.9), EPS));
        let no_theta = EulerAngles::new(0.0, 0.0, 1.3);
        assert!(close(&u_m(no_theta, 1).unwrap(), &euler_unitary(no_theta), EPS));
        assert_eq!(u_m(angles, 2), Err(GateError::OutcomeOutOfRange(2)));
    }

    #[test]
    fn controlled_unitary_blocks() {
        assert_eq!(
            controlled_unitary(&identity()),
            Operator::identity(&[2, 2]).unwrap()
        );
        let cx = controlled_unitary(&pauli_x());
        assert_eq!(image(&cx, &[1, 1]), vec![0, 1]);
        // α|00⟩ + β|11⟩ under controlled-Ry(π) → α|00⟩ − β|01⟩.
        let (alpha, beta) = (c(0.6, 0.0), c(0.0, 0.8));
        let input = StateVector::from_terms(&[2, 2], [(&[0, 0][..], alpha), (&[1, 1][..], beta)]).unwrap();
        let out = controlled_unitary(&rotation_y(PI)).apply_full(&input).unwrap();
        assert!((out.amp(&[0, 0]).unwrap() - alpha).norm() < EPS);
        assert!((out.amp(&[0, 1]).unwrap() + beta).norm() < EPS);
        assert!(out.amp(&[1, 1]).unwrap().norm() < EPS);
    }

    #[test]
    fn v12_swaps_one_one_and_one_two() {
        let v = v12();
        assert_eq!(image(&v, &[1, 1]), vec![1, 2]);
        assert_eq!(image(&v, &[1, 2]), vec![1, 1]);
        assert_eq!(image(&v, &[1, 0]), vec![1, 0]);
        assert_eq!(image(&v, &[0, 2]), vec![0, 2]);
    }

    #[test]
    fn v14_flips_b_on_level_two() {
        assert_eq!(image(&v14(), &[0, 2]), vec![1, 2]);
        assert_eq!(image(&v14(), &[0, 1]), vec![0, 1]);
    }

    #[test]
    fn v11_with_zero_angles() {
        let expected = qubit_controlled_by_level(&[identity(), pauli_x(), identity()]);
        assert!(close(&v11(EulerAngles::default()), &expected, EPS));
    }

    #[test]
    fn v1_is_ordered_product() {
        let angles = EulerAngles::new(0.4, 2.2, -1.0);
        let manual = v14()
            .compose(&v13(angles))
            .unwrap()
            .compose(&v12())
            .unwrap()
            .compose(&v11(angles))
            .unwrap();
        assert!(close(&v1(angles), &manual, 1e-15));
    }

    #[test]
    fn q1_action() {
        let q = q1();
        assert_eq!(image(&q, &[0, 1, 1]), vec![1, 1, 1]);
        assert_eq!(image(&q, &[1, 1, 2]), vec![0, 1, 2]);
        assert_eq!(image(&q, &[0, 0, 0]), vec![0, 0, 0]);
        assert_eq!(image(&q, &[1, 0, 2]), vec![1, 0, 2]);
    }

    #[test]
    fn q1_columns_hold_single_unit_entry() {
        let q = q1();
        for col in 0..12 {
            let nonzero: Vec<C64> = (0..12).map(|r| q.get(r, col)).filter(|e| *e != ZERO).collect();
            assert_eq!(nonzero, vec![ONE], "column {col}");
        }
    }

    #[test]
    fn q2_action() {
        let q = q2();
        assert_eq!(image(&q, &[0, 0, 1]), vec![0, 1, 1]);
        assert_eq!(image(&q, &[1, 0, 1]), vec![1, 0, 1]);
        assert_eq!(image(&q, &[1, 0, 2]), vec![1, 1, 2]);
        assert_eq!(image(&q, &[0, 1, 2]), vec![0, 1, 2]);
        assert_eq!(image(&q, &[1, 1, 0]), vec![1, 1, 0]);
    }

    #[test]
    fn v2_action() {
        let v = v2();
        assert_eq!(image(&v, &[1, 1]), vec![1, 0]);
        assert_eq!(image(&v, &[0, 2]), vec![0, 2]);
        assert_eq!(image(&v, &[1, 0]), vec![1, 2]);
        assert_eq!(image(&v, &[1, 2]), vec![1, 1]);
    }

    #[test]
    fn q3_cases() {
        assert_eq!(q3(0).unwrap(), Operator::identity(&[2, 2]).unwrap());
        let q = q3(1).unwrap();
        let one_one = StateVector::basis(&[2, 2], &[1, 1]).unwrap();
        assert_eq!(q.apply_full(&one_one).unwrap(), one_one.scaled(-ONE));
        let zero_zero = StateVector::basis(&[2, 2], &[0, 0]).unwrap();
        assert_eq!(q.apply_full(&zero_zero).unwrap(), zero_zero);
        assert_eq!(q3(3), Err(GateError::OutcomeOutOfRange(3)));
    }

    #[test]
    fn q3_is_controlled_z_on_every_basis_vector() {
        let q = q3(1).unwrap();
        for a in 0..2 {
            for b in 0..2 {
                let ket = StateVector::basis(&[2, 2], &[a, b]).unwrap();
                let sign = if a == 1 && b == 1 { -ONE } else { ONE };
                assert_eq!(q.apply_full(&ket).unwrap(), ket.scaled(sign));
            }
        }
        assert_eq!(q, controlled_z());
    }

    #[test]
    fn toffoli_action() {
        let t = toffoli();
        assert_eq!(image(&t, &[1, 1, 1]), vec![1, 0, 1]);
        assert_eq!(image(&t, &[0, 1, 1]), vec![0, 1, 1]);
        assert_eq!(image(&t, &[1, 1, 0]), vec![1, 1, 0]);
        assert_eq!(image(&t, &[1, 0, 2]), vec![1, 0, 2]);
        // Same action through subsystem application.
        let ket = StateVector::basis(&[2, 2, 3], &[1, 1, 1]).unwrap();
        let out = apply(&t, &ket, &[0, 1, 2]).unwrap();
        assert_eq!(out, StateVector::basis(&[2, 2, 3], &[1, 0, 1]).unwrap());
    }

    #[test]
    fn qutrit_hadamard() {
        let h = hadamard_on_qutrit();
        let zero = StateVector::basis(&[3], &[0]).unwrap();
        let out = h.apply_full(&zero).unwrap();
        assert!((out.amps()[0] - c(FRAC_1_SQRT_2, 0.)).norm() < EPS);
        assert!((out.amps()[1] - c(FRAC_1_SQRT_2, 0.)).norm() < EPS);
        let two = StateVector::basis(&[3], &[2]).unwrap();
        assert_eq!(h.apply_full(&two).unwrap(), two);
        assert!(close(
            &h.compose(&h).unwrap(),
            &Operator::identity(&[3]).unwrap(),
            1e-15
        ));
    }

    #[test]
    fn tilde_v1_cases() {
        let cx = qubit_controlled_by_level(&[identity(), pauli_x()]);
        assert!(close(&tilde_v1_from_unitary(&identity(), 0).unwrap(), &cx, EPS));
        assert!(close(&tilde_v1_from_unitary(&identity(), 1).unwrap(), &cx, EPS));
        let trivial = Operator::identity(&[2, 2]).unwrap();
        assert!(close(
            &tilde_v1_from_unitary(&pauli_x(), 0).unwrap(),
            &trivial,
            EPS
        ));
        assert_eq!(
            tilde_v1(EulerAngles::default(), 2),
            Err(GateError::ClassOutOfRange(2))
        );
    }

    #[test]
    fn tilde_q1_action() {
        let q = tilde_q1();
        assert_eq!(image(&q, &[0, 1, 1]), vec![1, 1, 1]);
        assert_eq!(image(&q, &[0, 1, 0]), vec![0, 1, 0]);
        assert_eq!(q.compose(&q).unwrap(), Operator::identity(&[2, 2, 2]).unwrap());
    }

    #[test]
    fn tilde_q2_action() {
        let one = tilde_q2(1).unwrap();
        assert_eq!(image(&one, &[1, 0, 1]), vec![1, 0, 1]);
        assert_eq!(image(&one, &[0, 0, 1]), vec![0, 1, 1]);
        let zero = tilde_q2(0).unwrap();
        assert_eq!(image(&zero, &[1, 0, 1]), vec![1, 1, 1]);
        assert_eq!(image(&zero, &[0, 0, 1]), vec![0, 0, 1]);
        assert_eq!(image(&zero, &[1, 1, 0]), vec![1, 1, 0]);
        assert_eq!(tilde_q2(5), Err(GateError::ClassOutOfRange(5)));
    }

    #[test]
    fn cnot_to_qutrit_action() {
        let cx = cnot_to_qutrit();
        assert_eq!(image(&cx, &[1, 0]), vec![1, 1]);
        assert_eq!(image(&cx, &[1, 2]), vec![1, 2]);
        assert_eq!(image(&cx, &[0, 1]), vec![0, 1]);
    }

    #[test]
    fn catalog_structure() {
        for gate in catalog(EulerAngles::new(0.7, -2.1, 4.4)) {
            assert!(gate.op.unitarity_defect() < 1e-12, "{} not unitary", gate.name);
            if gate.permutation {
                assert!(gate.op.is_permutation(), "{} not a permutation", gate.name);
            }
        }
    }

    fn angles() -> impl Strategy<Value = EulerAngles> {
        (-10.0..10.0f64, -10.0..10.0f64, -10.0..10.0f64).prop_map(|(a, b, g)| EulerAngles::new(a, b, g))
    }

    proptest! {
        #[test]
        fn every_parameterized_gate_is_unitary(a in angles()) {
            for gate in catalog(a) {
                prop_assert!(gate.op.unitarity_defect() < 1e-12, "{}", gate.name);
            }
        }

        #[test]
        fn euler_unitary_is_product_of_constructors(a in angles()) {
            let manual = rotation_z(a.phi)
                .compose(&rotation_y(a.theta)).unwrap()
                .compose(&rotation_z(a.varphi)).unwrap();
            prop_assert_eq!(euler_unitary(a), manual);
        }

        #[test]
        fn tilde_v1_class_symmetry(a in angles(), ell in 0u8..2) {
            let u = euler_unitary(a);
            let xux = pauli_x().compose(&u).unwrap().compose(&pauli_x()).unwrap();
            let lhs = tilde_v1_from_unitary(&u, ell).unwrap();
            let rhs = tilde_v1_from_unitary(&xux, 1 - ell).unwrap();
            prop_assert!(close(&lhs, &rhs, 1e-15));
        }
    }
}
