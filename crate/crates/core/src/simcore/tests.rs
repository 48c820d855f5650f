use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use proptest::prelude::*;

use super::*;
use crate::error::Error;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn layout(n: usize, m: usize, anc: usize, q: usize) -> RegisterLayout {
    RegisterLayout::new(n, m, anc, q).unwrap()
}

fn random_state(layout: RegisterLayout, seed: u64) -> StateVector {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let amps = (0..layout.dim())
        .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    StateVector::normalized(layout, amps).unwrap()
}

fn assert_amps(state: &StateVector, expected: &[Complex64], tol: f64) {
    assert_eq!(state.dim(), expected.len());
    for (i, (a, e)) in state.amplitudes().iter().zip(expected).enumerate() {
        assert!((a - e).norm() <= tol, "amplitude {i}: {a} vs {e}");
    }
}

#[test]
fn basis_state_examples() {
    let s = StateVector::new_basis_state(layout(1, 1, 1, 0), 0).unwrap();
    assert_eq!(s.amplitude(0), c(1.0, 0.0));
    assert!(s.amplitudes()[1..].iter().all(|a| *a == c(0.0, 0.0)));

    let s = StateVector::new_basis_state(layout(2, 0, 0, 0), 3).unwrap();
    assert_eq!(s.amplitude(3), c(1.0, 0.0));

    assert!(matches!(
        StateVector::new_basis_state(layout(1, 2, 1, 0), 1 << 4),
        Err(Error::BasisOutOfRange { .. })
    ));
}

#[test]
fn gate_examples() {
    let l = layout(1, 0, 0, 0);
    let mut s = StateVector::zero(l);
    s.apply_gate(&GateSpec::new(GateKind::H, 0)).unwrap();
    assert_amps(&s, &[c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)], 1e-15);

    // XZX flips the sign of |0⟩ only.
    for (start, expected) in [(0usize, [c(-1.0, 0.0), c(0.0, 0.0)]), (1, [c(0.0, 0.0), c(1.0, 0.0)])] {
        let mut s = StateVector::new_basis_state(l, start).unwrap();
        for k in [GateKind::X, GateKind::Z, GateKind::X] {
            s.apply_gate(&GateSpec::new(k, 0)).unwrap();
        }
        assert_amps(&s, &expected, 1e-15);
    }

    let mut s = StateVector::zero(l);
    s.apply_gate(&GateSpec::new(GateKind::Rz(0.7), 0)).unwrap();
    assert_amps(&s, &[Complex64::from_polar(1.0, -0.35), c(0.0, 0.0)], 1e-15);
}

#[test]
fn controlled_gate_respects_controls() {
    let l = layout(2, 0, 0, 0);
    let mut s = StateVector::new_basis_state(l, 0b01).unwrap();
    s.apply_gate(&GateSpec::new(GateKind::X, 1).controlled(0, true)).unwrap();
    assert_eq!(s.amplitude(0b11), c(1.0, 0.0));
    s.apply_gate(&GateSpec::new(GateKind::X, 1).controlled(0, false)).unwrap();
    assert_eq!(s.amplitude(0b11), c(1.0, 0.0));
}

#[test]
fn non_unitary_custom_gate_rejected() {
    let mut s = StateVector::zero(layout(1, 0, 0, 0));
    let m = Matrix2([[c(2.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]]);
    assert!(matches!(
        s.apply_gate(&GateSpec::new(GateKind::Custom(m), 0)),
        Err(Error::NonUnitary(_))
    ));
}

#[test]
fn hadamard_register_examples() {
    let mut s = StateVector::zero(layout(2, 1, 1, 0));
    s.hadamard_register(Register::Index).unwrap();
    for i in 0..4 {
        assert!((s.amplitude(i) - c(0.5, 0.0)).norm() < 1e-15);
    }
    let before = random_state(layout(2, 1, 1, 0), 3);
    let mut after = before.clone();
    after.hadamard_register(Register::Index).unwrap();
    after.hadamard_register(Register::Index).unwrap();
    assert!(after.distance(&before).unwrap() <= 1e-12);

    let mut s = StateVector::zero(layout(3, 0, 0, 0));
    s.hadamard_register(Register::Index).unwrap();
    assert_amps(&s, &[c(1.0 / 8f64.sqrt(), 0.0); 8], 1e-15);
}

#[test]
fn qft_examples() {
    let mut s = StateVector::new_basis_state(layout(1, 0, 0, 0), 1).unwrap();
    s.qft_register(Register::Index, QftDirection::Forward).unwrap();
    assert_amps(&s, &[c(FRAC_1_SQRT_2, 0.0), c(-FRAC_1_SQRT_2, 0.0)], 1e-15);

    let mut s = StateVector::new_basis_state(layout(2, 0, 0, 0), 3).unwrap();
    s.qft_register(Register::Index, QftDirection::Forward).unwrap();
    assert_amps(&s, &[c(0.5, 0.0), c(0.0, -0.5), c(-0.5, 0.0), c(0.0, 0.5)], 1e-15);

    let before = random_state(layout(2, 3, 1, 2), 9);
    let mut after = before.clone();
    after.qft_register(Register::Value, QftDirection::Forward).unwrap();
    after.qft_register(Register::Value, QftDirection::Inverse).unwrap();
    assert!(after.distance(&before).unwrap() <= 1e-12);
}

#[test]
fn qft_matches_explicit_dft() {
    // Register placed in the middle of the layout to exercise strided gathers.
    for width in 1..=5 {
        let l = layout(2, width, 1, 0);
        let f = dft_matrix(width);
        let span = l.span(Register::Value).unwrap();
        for dir in [QftDirection::Forward, QftDirection::Inverse] {
            let input = random_state(l, width as u64);
            let mut got = input.clone();
            got.qft_register(Register::Value, dir).unwrap();
            let mut worst: f64 = 0.0;
            for idx in 0..l.dim() {
                let k = span.read(idx) as usize;
                let expected: Complex64 = (0..span.dim())
                    .map(|j| {
                        let entry = match dir {
                            QftDirection::Forward => f[k][j],
                            QftDirection::Inverse => f[j][k].conj(),
                        };
                        entry * input.amplitude(span.write(idx, j as u64))
                    })
                    .sum();
                worst = worst.max((got.amplitude(idx) - expected).norm());
            }
            assert!(worst <= 1e-12, "width {width} {dir:?}: {worst}");
        }
    }
}

#[test]
fn controlled_qft_only_touches_selected_branch() {
    let l = layout(0, 0, 1, 2);
    let anc = l.qubit(Register::Ancilla).unwrap();
    // ancilla 0, phase |11⟩
    let idx = l.span(Register::Phase).unwrap().write(0, 3);
    let mut s = StateVector::new_basis_state(l, idx).unwrap();
    s.controlled_qft_register(Register::Phase, QftDirection::Forward, (anc, true)).unwrap();
    assert_eq!(s.amplitude(idx), c(1.0, 0.0));
    s.controlled_qft_register(Register::Phase, QftDirection::Inverse, (anc, false)).unwrap();
    // inverse transform of |11⟩: (1/2) Σ e^(+2πik/4) |k⟩
    let span = l.span(Register::Phase).unwrap();
    for k in 0..4u64 {
        let expected = Complex64::from_polar(0.5, 2.0 * PI * k as f64 / 4.0);
        assert!((s.amplitude(span.write(0, k)) - expected).norm() < 1e-15);
    }
    assert!(s
        .controlled_qft_register(Register::Phase, QftDirection::Forward, (span.offset, true))
        .is_err());
}

#[test]
fn reflect_zero_examples() {
    let l = layout(1, 0, 0, 0);
    let mut s = StateVector::zero(l);
    s.reflect_zero(&[Register::Index]).unwrap();
    assert_eq!(s.amplitude(0), c(-1.0, 0.0));
    let mut s = StateVector::new_basis_state(l, 1).unwrap();
    s.reflect_zero(&[Register::Index]).unwrap();
    assert_eq!(s.amplitude(1), c(1.0, 0.0));

    let l = layout(2, 0, 0, 0);
    let mut s = StateVector::from_amplitudes(l, vec![c(0.5, 0.0); 4]).unwrap();
    s.reflect_zero(&[Register::Index]).unwrap();
    assert_amps(&s, &[c(-0.5, 0.0), c(0.5, 0.0), c(0.5, 0.0), c(0.5, 0.0)], 0.0);

    let before = random_state(layout(2, 2, 1, 0), 1);
    let mut after = before.clone();
    after.reflect_zero(&[Register::Index, Register::Ancilla]).unwrap();
    after.reflect_zero(&[Register::Index, Register::Ancilla]).unwrap();
    assert!(after.distance(&before).unwrap() <= 1e-12);
}

#[test]
fn postselect_examples() {
    // (|0⟩|0⟩ + |1⟩|1⟩)/√2 with the second qubit as the ancilla.
    let l = layout(1, 0, 1, 0);
    let h = c(FRAC_1_SQRT_2, 0.0);
    let bell = StateVector::from_amplitudes(l, vec![h, c(0.0, 0.0), c(0.0, 0.0), h]).unwrap();
    let (p, collapsed) = bell.postselect(Register::Ancilla, 0).unwrap();
    assert!((p - 0.5).abs() < 1e-15);
    assert_amps(&collapsed, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)], 1e-15);

    let mut t = StateVector::zero(layout(2, 0, 1, 0));
    t.hadamard_register(Register::Index).unwrap();
    t.hadamard_register(Register::Ancilla).unwrap();
    let (p, _) = t.postselect(Register::Ancilla, 0).unwrap();
    assert!((p - 0.5).abs() < 1e-15);

    let zero = StateVector::zero(layout(1, 0, 1, 0));
    assert!(matches!(
        zero.postselect(Register::Ancilla, 1),
        Err(Error::ImpossiblePostselection { .. })
    ));
}

#[test]
fn fidelity_examples() {
    let psi = random_state(layout(3, 0, 1, 0), 5);
    assert!((fidelity_mod_phase(&psi, &psi).unwrap() - 1.0).abs() < 1e-12);
    let mut rotated = psi.clone();
    rotated.scale(Complex64::from_polar(1.0, 1.234));
    assert!((fidelity_mod_phase(&psi, &rotated).unwrap() - 1.0).abs() < 1e-12);

    let l = layout(1, 0, 0, 0);
    let zero = StateVector::new_basis_state(l, 0).unwrap();
    let one = StateVector::new_basis_state(l, 1).unwrap();
    assert_eq!(fidelity_mod_phase(&zero, &one).unwrap(), 0.0);

    let other = StateVector::zero(layout(2, 0, 0, 0));
    assert!(matches!(fidelity_mod_phase(&zero, &other), Err(Error::LayoutMismatch)));
}

#[test]
fn subspace_residual_examples() {
    let l = layout(2, 0, 0, 0);
    let b0 = StateVector::new_basis_state(l, 0).unwrap();
    let b1 = StateVector::new_basis_state(l, 1).unwrap();
    assert!(subspace_residual(&b0, &[&b0, &b1]).unwrap() < 1e-15);
    let outside = StateVector::new_basis_state(l, 3).unwrap();
    assert!((subspace_residual(&outside, &[&b0, &b1]).unwrap() - 1.0).abs() < 1e-15);
    let mixed = StateVector::from_amplitudes(l, vec![c(0.6, 0.0), c(0.0, 0.8), c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
    assert!(subspace_residual(&mixed, &[&b0, &b1]).unwrap() < 1e-15);
    assert!(matches!(
        subspace_residual(&mixed, &[&b0, &b0]),
        Err(Error::NonOrthonormalBasis(_))
    ));
}

#[test]
fn slice_extracts_pinned_register() {
    let l = layout(2, 1, 1, 0);
    let mut s = StateVector::zero(l);
    s.hadamard_register(Register::Index).unwrap();
    s.apply_gate(&GateSpec::new(GateKind::X, l.qubit(Register::Ancilla).unwrap())).unwrap();
    let idx = s.slice(Register::Index, &[(Register::Ancilla, 1)]).unwrap();
    assert_eq!(idx.layout().total_width(), 2);
    assert_amps(&idx, &[c(0.5, 0.0); 4], 1e-15);
    assert!(s.slice(Register::Index, &[(Register::Ancilla, 0)]).is_err());
}

#[test]
fn parallel_and_sequential_agree_bitwise() {
    let l = layout(8, 4, 1, 3);
    let base = random_state(l, 77);
    let run = |policy| {
        let mut s = base.clone().with_policy(policy);
        s.hadamard_register(Register::Index).unwrap();
        s.qft_register(Register::Phase, QftDirection::Forward).unwrap();
        s.controlled_qft_register(Register::Value, QftDirection::Inverse, (12, true)).unwrap();
        s.reflect_zero(&[Register::Index, Register::Ancilla]).unwrap();
        s.permute_register(Register::Value, |idx, v| (v + (idx as u64 & 3)) % 16).unwrap();
        let p = s.register_probability(Register::Ancilla, 0).unwrap();
        (s, p)
    };
    let (a, pa) = run(ExecPolicy::Sequential);
    let (b, pb) = run(ExecPolicy::Parallel);
    assert_eq!(a.amplitudes(), b.amplitudes());
    assert_eq!(pa.to_bits(), pb.to_bits());
}

fn layout_strategy() -> impl Strategy<Value = RegisterLayout> {
    (0usize..4, 0usize..3, 0usize..3, 0usize..3)
        .prop_filter("non-empty", |(n, m, a, q)| n + m + a + q > 0)
        .prop_map(|(n, m, a, q)| layout(n, m, a, q))
}

fn present_registers(l: &RegisterLayout) -> Vec<Register> {
    [Register::Index, Register::Value, Register::Ancilla, Register::Extra, Register::Phase]
        .into_iter()
        .filter(|r| l.has(*r))
        .collect()
}

proptest! {
    #[test]
    fn operations_preserve_norm(l in layout_strategy(), seed in any::<u64>(), angle in -6.3f64..6.3) {
        let mut s = random_state(l, seed);
        let regs = present_registers(&l);
        for &r in &regs {
            s.hadamard_register(r).unwrap();
            s.qft_register(r, QftDirection::Forward).unwrap();
            s.reflect_zero(&[r]).unwrap();
            prop_assert!((s.norm() - 1.0).abs() <= 1e-12);
        }
        for q in 0..l.total_width() {
            s.apply_gate(&GateSpec::new(GateKind::Ry(angle), q)).unwrap();
            s.apply_gate(&GateSpec::new(GateKind::Rz(angle), q)).unwrap();
        }
        prop_assert!((s.norm() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn involutions(l in layout_strategy(), seed in any::<u64>()) {
        let before = random_state(l, seed);
        let mut s = before.clone();
        let regs = present_registers(&l);
        s.reflect_zero(&regs).unwrap();
        s.reflect_zero(&regs).unwrap();
        prop_assert!(s.distance(&before).unwrap() <= 1e-12);
        for q in 0..l.total_width() {
            for _ in 0..2 {
                for k in [GateKind::X, GateKind::Z, GateKind::X] {
                    s.apply_gate(&GateSpec::new(k, q)).unwrap();
                }
            }
            s.apply_gate(&GateSpec::new(GateKind::H, q)).unwrap();
            s.apply_gate(&GateSpec::new(GateKind::H, q)).unwrap();
        }
        prop_assert!(s.distance(&before).unwrap() <= 1e-12);
    }

    #[test]
    fn postselect_probabilities_sum_to_one(l in layout_strategy(), seed in any::<u64>()) {
        let s = random_state(l, seed);
        for r in present_registers(&l) {
            let dim = l.span(r).unwrap().dim() as u64;
            let total: f64 = (0..dim).map(|v| s.register_probability(r, v).unwrap()).sum();
            prop_assert!((total - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn fidelity_symmetric_and_phase_invariant(seed in any::<u64>(), gamma in -7.0f64..7.0) {
        let l = layout(2, 1, 1, 0);
        let a = random_state(l, seed);
        let b = random_state(l, seed.wrapping_add(1));
        let fab = fidelity_mod_phase(&a, &b).unwrap();
        prop_assert!((fab - fidelity_mod_phase(&b, &a).unwrap()).abs() <= 1e-14);
        let mut bp = b.clone();
        bp.scale(Complex64::from_polar(1.0, gamma));
        prop_assert!((fab - fidelity_mod_phase(&a, &bp).unwrap()).abs() <= 1e-12);
        prop_assert!((0.0..=1.0).contains(&fab));
    }
}
