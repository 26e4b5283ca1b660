mod common;

use common::*;
use dgiga::assembly::{Assembler, DgConfig, Scheme};
use dgiga::geometry::Orientation;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn sip_symmetric_and_reversal_invariant(
        k in 1usize..=3,
        nl in 1usize..=4,
        nr in 1usize..=4,
        al in 0.1f64..100.0,
        ar in 0.1f64..100.0,
        mu in 1.0f64..50.0,
    ) {
        let d = two_squares(k, nl, nr, [al, ar]);
        let a = Assembler::new(&d, DgConfig::new(Scheme::Sip, mu).unwrap()).unwrap();
        let m = a.assemble_matrix().unwrap();
        prop_assert!(m.symmetry_defect() <= 1e-12);
        let rev = dgiga::geometry::MultiPatchDomain::new(
            d.patches().to_vec(),
            d.solution_spaces().to_vec(),
            vec![d.interfaces()[0].reversed()],
            d.alpha().to_vec(),
        ).unwrap();
        let mr = Assembler::new(&rev, DgConfig::new(Scheme::Sip, mu).unwrap()).unwrap().assemble_matrix().unwrap();
        let scale = m.frobenius_norm();
        let (x, y) = (m.to_dense(), mr.to_dense());
        prop_assert!(x.iter().zip(&y).all(|(p, q)| (p - q).abs() <= 1e-12 * scale));
    }

    #[test]
    fn penalty_energy_is_nonnegative(
        k in 1usize..=2,
        nl in 1usize..=3,
        nr in 1usize..=3,
        v in proptest::collection::vec(-1.0f64..1.0, 64),
    ) {
        let d = two_squares(k, nl, nr, [1.0, 2.0]);
        let a = Assembler::new(&d, DgConfig::new(Scheme::Iip, 3.0).unwrap()).unwrap();
        let mut p = a.zero_matrix();
        a.assemble_penalty(&mut p).unwrap();
        let w: Vec<f64> = v.iter().cycle().take(p.nrows()).copied().collect();
        prop_assert!(p.bilinear(&w, &w) >= -1e-12);
    }

    #[test]
    fn orientation_maps_are_inverse(perm_swap in any::<bool>(), f0 in any::<bool>(), f1 in any::<bool>(), t0 in 0.0f64..1.0, t1 in 0.0f64..1.0) {
        let o = Orientation { permutation: if perm_swap { vec![1, 0] } else { vec![0, 1] }, flip: vec![f0, f1] };
        let t = [t0, t1];
        let back = o.to_left(&o.to_right(&t));
        prop_assert!((back[0] - t0).abs() < 1e-15 && (back[1] - t1).abs() < 1e-15);
    }
}
