use proptest::prelude::*;
use westervelt::analysis::eoc;
use westervelt::cases::Case;
use westervelt::timefe::{
    eval_modal, eval_modal_ds, l2_project_time, modal_derivative, modal_norm_sq, multiply_by_s, ptau_project, zeta,
    weight_phi_with, Side, TimePartition,
};
use westervelt::{solve_westervelt, FESpace, Mesh, ProblemConfig};

fn coeffs(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, 1..=max_len)
}

fn partition() -> impl Strategy<Value = TimePartition> {
    prop::collection::vec(0.05f64..1.0, 1..6).prop_map(|steps| {
        let mut b = vec![0.0];
        for s in steps {
            b.push(b.last().unwrap() + s);
        }
        TimePartition::new(b).unwrap()
    })
}

proptest! {
    #[test]
    fn legendre_projection_reproduces_its_range(a in coeffs(7)) {
        let r = a.len() - 1;
        let p = l2_project_time(r, |s| eval_modal(&a, s), 0.0, 1.0, r + 2);
        for (x, y) in p.iter().zip(&a) {
            prop_assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn modal_products_and_derivatives_match_pointwise(a in coeffs(8), s in 0.0f64..1.0) {
        let sa = multiply_by_s(&a);
        prop_assert!((eval_modal(&sa, s) - s * eval_modal(&a, s)).abs() < 1e-11);
        let da = modal_derivative(&a);
        prop_assert!((eval_modal(&da, s) - eval_modal_ds(&a, s)).abs() < 1e-9);
    }

    #[test]
    fn locate_is_consistent(part in partition(), frac in 0.0f64..=1.0) {
        let t = frac * part.t_final();
        for side in [Side::Left, Side::Right] {
            let (n, s) = part.locate(t, side);
            let (t0, t1) = part.slab(n);
            prop_assert!((0.0..=1.0).contains(&s));
            prop_assert!((t0 + s * (t1 - t0) - t).abs() < 1e-12);
        }
    }

    #[test]
    fn ptau_reproduces_degree_q_polynomials(part in partition(), q in 2usize..6, a in prop::collection::vec(-1.0f64..1.0, 6)) {
        let v = |t: f64| (0..=q).map(|i| a[i] * t.powi(i as i32)).sum::<f64>();
        let dv = |t: f64| (1..=q).map(|i| a[i] * i as f64 * t.powi(i as i32 - 1)).sum::<f64>();
        let p = ptau_project(q, v, dv, &part).unwrap();
        for i in 0..=20 {
            let t = part.t_final() * i as f64 / 20.0;
            prop_assert!((p.eval(t, Side::Left) - v(t)).abs() < 1e-9 * (1.0 + v(t).abs()));
        }
    }

    #[test]
    fn weight_function_first_bound(q in 2usize..7, tau in 1e-3f64..1.0, w in prop::collection::vec(-1.0f64..1.0, 6)) {
        let w = &w[..q];
        prop_assume!(modal_norm_sq(w) > 1e-8);
        let part = TimePartition::new(vec![0.0, tau]).unwrap();
        let phi = weight_phi_with(0, 1.0, zeta(q), &part).unwrap();
        let m = phi.modal();
        let sw = multiply_by_s(w);
        let defect = 2.0 * m[1] * sw[q];
        let lhs = (tau * defect * defect / (2.0 * q as f64 + 1.0)).sqrt();
        let wnorm = (tau * modal_norm_sq(w)).sqrt();
        prop_assert!(lhs <= zeta(q) * wnorm * (1.0 + 1e-12));
    }

    #[test]
    fn eoc_of_power_laws(c in 1e-6f64..1e3, r in 0.5f64..6.0, h0 in 0.01f64..1.0) {
        let hs = [h0, h0 / 2.0, h0 / 4.0];
        let e: Vec<f64> = hs.iter().map(|h| c * h.powf(r)).collect();
        for v in eoc(&e, &hs) {
            prop_assert!((v.unwrap() - r).abs() < 1e-9);
        }
    }

    #[test]
    fn interpolant_reproduces_linear_functions(n in 1usize..5, p in 1usize..5, a in -2.0f64..2.0, b in -2.0f64..2.0) {
        let space = FESpace::new(Mesh::unit_square(n).unwrap(), p).unwrap();
        let f = |x: [f64; 2]| 1.0 + a * x[0] + b * x[1];
        let ih = space.interpolate(f);
        prop_assert!(space.l2_error(&ih, space.error_degree(), f) < 1e-12);
        prop_assert_eq!(space.num_dofs(), (n * p + 1).pow(2));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn linear_solution_is_linear_in_the_data(scale in 0.1f64..10.0) {
        let mut base = Case::by_label("smooth").unwrap();
        base.physics.k = 0.0;
        let mut scaled = base.clone();
        scaled.scale_data(scale);
        let (u, _) = solve_westervelt(&ProblemConfig::new(base, 3, 2, 2, 0.25)).unwrap();
        let (v, _) = solve_westervelt(&ProblemConfig::new(scaled, 3, 2, 2, 0.25)).unwrap();
        for n in 0..u.partition().num_slabs() {
            let top = u.slab(n).iter().fold(0.0f64, |m, x| m.max(x.abs()));
            for (a, b) in u.slab(n).iter().zip(v.slab(n)) {
                prop_assert!((scale * a - b).abs() <= 1e-9 * scale * top);
            }
        }
    }

    #[test]
    fn trial_functions_are_continuous_in_time(n in 2usize..4, q in 2usize..4, k in -1.0f64..1.0) {
        let mut case = Case::by_label("smooth").unwrap();
        case.physics.k = k;
        let (u, rep) = solve_westervelt(&ProblemConfig::new(case, n, 1, q, 0.25)).unwrap();
        prop_assert!(rep.converged);
        prop_assert!(u.continuity_defect() < 1e-14);
    }
}
