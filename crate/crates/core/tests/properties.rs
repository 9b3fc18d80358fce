use fockeig::fock::{
    inner, kron, sector_project, FockVector, LadderKind, MatrixOperator, Mode, ModeCount,
    SectorSpec, TruncationSpec,
};
use fockeig::serial::StateFile;
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use proptest::prelude::*;

fn hash_c64(tag: u64, i: usize, j: usize) -> C64 {
    let t = (tag
        .wrapping_mul(0x9e37_79b9_7f4a_7c15)
        .wrapping_add((i as u64).wrapping_mul(0xc2b2_ae3d_27d4_eb4f))
        .wrapping_add((j as u64).wrapping_mul(0x1656_67b1_9e37_79f9))
        >> 11) as f64
        / (1u64 << 53) as f64;
    C64::new((t * 12.9898).sin(), (t * 78.233).cos())
}

fn banded(trunc: TruncationSpec, offsets: &[i64], tag: u64) -> MatrixOperator {
    let n = trunc.dim();
    let mut m = DMatrix::zeros(n, n);
    for (which, &off) in offsets.iter().enumerate() {
        for i in 0..n {
            let j = i as i64 - off;
            if (0..n as i64).contains(&j) {
                m[(i, j as usize)] = hash_c64(tag.wrapping_add(which as u64), i, j as usize);
            }
        }
    }
    MatrixOperator::from_matrix(trunc, ModeCount::One, m).unwrap()
}

fn vector(trunc: TruncationSpec, tag: u64) -> FockVector {
    let coeffs = (0..trunc.dim()).map(|n| hash_c64(tag, n, 0)).collect();
    FockVector::from_coeffs(trunc, coeffs).unwrap()
}

fn pick_offsets(tag: u64) -> Vec<i64> {
    let count = 1 + (tag % 3) as usize;
    (0..count)
        .map(|k| ((tag >> (5 * k)) % 9) as i64 - 4)
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn banded_mul_matches_dense_product(dim in 8..=24usize, tag_a: u64, tag_b: u64) {
        let trunc = TruncationSpec::new(dim, 2).unwrap();
        let a = banded(trunc, &pick_offsets(tag_a), tag_a);
        let b = banded(trunc, &pick_offsets(tag_b), tag_b);
        let got = a.mul(&b).unwrap();
        let want = a.matrix() * b.matrix();
        let diff = (got.matrix() - &want).camax();
        prop_assert!(diff <= 1e-13 * (1.0 + want.camax()), "mul deviates by {diff:.3e}");
    }

    #[test]
    fn dagger_is_an_involution(dim in 8..=24usize, tag: u64) {
        let trunc = TruncationSpec::new(dim, 2).unwrap();
        let a = banded(trunc, &pick_offsets(tag), tag);
        let back = a.dagger().dagger();
        prop_assert_eq!(back.matrix(), a.matrix());
        prop_assert_eq!(back.offsets(), a.offsets());
    }

    #[test]
    fn adjoint_moves_across_the_inner_product(dim in 8..=24usize, tag: u64) {
        let trunc = TruncationSpec::new(dim, 2).unwrap();
        let a = banded(trunc, &pick_offsets(tag), tag);
        let u = vector(trunc, tag.wrapping_add(1));
        let v = vector(trunc, tag.wrapping_add(2));
        let lhs = inner(&u, &a.apply(&v).unwrap()).unwrap();
        let rhs = inner(&a.dagger().apply(&u).unwrap(), &v).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-13 * (1.0 + lhs.norm()));
    }

    #[test]
    fn diagonal_operators_multiply_pointwise(dim in 8..=32usize, tag: u64) {
        let trunc = TruncationSpec::new(dim, 2).unwrap();
        let f = move |n: usize| hash_c64(tag, n, 1);
        let g = move |n: usize| hash_c64(tag, n, 2);
        let product = MatrixOperator::diag_fn(f, trunc)
            .mul(&MatrixOperator::diag_fn(g, trunc))
            .unwrap();
        let direct = MatrixOperator::diag_fn(move |n| f(n) * g(n), trunc);
        let diff = (product.matrix() - direct.matrix()).camax();
        prop_assert!(diff <= 1e-15, "pointwise product deviates by {diff:.3e}");
    }

    #[test]
    fn residue_projectors_partition_the_space(dim in 8..=32usize, tag: u64) {
        let trunc = TruncationSpec::new(dim, 2).unwrap();
        let v = vector(trunc, tag);
        let mut sum = FockVector::zero(trunc);
        for residue in 0..4 {
            let sector = SectorSpec::Residue { modulus: 4, residue };
            let once = sector_project(&v, &sector).unwrap();
            let twice = sector_project(&once, &sector).unwrap();
            prop_assert_eq!(twice.coeffs(), once.coeffs());
            sum = sum.add(&once).unwrap();
        }
        prop_assert_eq!(sum.coeffs(), v.coeffs());
    }

    #[test]
    fn number_commutator_is_the_identity_on_the_interior(
        dim in 8..=64usize,
        guard_frac in 0..=4usize,
    ) {
        let guard = guard_frac * dim / 16;
        let trunc = TruncationSpec::new(dim, guard).unwrap();
        let lower = MatrixOperator::ladder(Mode::A, LadderKind::Lower, trunc);
        let raise = MatrixOperator::ladder(Mode::A, LadderKind::Raise, trunc);
        let comm = lower.mul(&raise).unwrap().sub(&raise.mul(&lower).unwrap()).unwrap();
        for n in 0..=(dim - 2 - guard) {
            let basis = FockVector::basis_state(trunc, n).unwrap();
            let image = comm.apply(&basis).unwrap();
            // Ladder amplitudes are sqrt(n), so the product picks up a few
            // ulps of n before the cancellation.
            let tol = 4.0 * (n as f64 + 1.0) * f64::EPSILON;
            for m in 0..dim {
                let want = if m == n { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
                prop_assert!((image.coeff(m) - want).norm() <= tol);
            }
        }
    }

    #[test]
    fn kron_respects_the_mixed_product(dim in 4..=10usize, tag: u64) {
        let trunc = TruncationSpec::new(dim.max(8), 2).unwrap();
        let a = banded(trunc, &pick_offsets(tag), tag);
        let b = banded(trunc, &pick_offsets(tag >> 8), tag.wrapping_add(1));
        let c = banded(trunc, &pick_offsets(tag >> 16), tag.wrapping_add(2));
        let d = banded(trunc, &pick_offsets(tag >> 24), tag.wrapping_add(3));
        let lhs = kron(&a, &b).unwrap().mul(&kron(&c, &d).unwrap()).unwrap();
        let rhs = kron(&a.mul(&c).unwrap(), &b.mul(&d).unwrap()).unwrap();
        let diff = (lhs.matrix() - rhs.matrix()).camax();
        prop_assert!(diff <= 1e-12 * (1.0 + rhs.max_abs()), "mixed product deviates by {diff:.3e}");
    }

    #[test]
    fn state_json_round_trip_is_bit_exact(dim in 8..=24usize, tag: u64) {
        let trunc = TruncationSpec::new(dim, 2).unwrap();
        let v = vector(trunc, tag);
        let json = StateFile::from_single(&v).to_json().unwrap();
        let back = StateFile::from_json(&json).unwrap().to_single(2).unwrap();
        for n in 0..dim {
            prop_assert_eq!(back.coeff(n).re.to_bits(), v.coeff(n).re.to_bits());
            prop_assert_eq!(back.coeff(n).im.to_bits(), v.coeff(n).im.to_bits());
        }
        prop_assert_eq!(
            StateFile::from_single(&back).to_json().unwrap(),
            json
        );
    }
}
