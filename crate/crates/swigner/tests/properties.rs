use num_complex::Complex64 as C64;
use proptest::prelude::*;
use swigner::calculus::{smooth, weyl_apply, Coef, KProfile, Mode, WeylSymbol};
use swigner::dynamics::free_step;
use swigner::grid::{forward, inverse};
use swigner::io::{parse_kv, parse_symbol, read_phase_csv, symbol_to_text, write_phase_csv, Sidecar};
use swigner::signals::{gaussian_packet, superpose};
use swigner::wigner::{marginal_k, spectrogram, swt, wigner_transform, SmoothingParams};
use swigner::{ComplexField1D, Grid1D, PhaseField};

fn grid() -> Grid1D {
    Grid1D::new(256, 32.0, 0.0).unwrap()
}

prop_compose! {
    fn packet()(x0 in -1.5..1.5f64, k0 in -0.5..0.5f64, a in 1.2..1.6f64) -> ComplexField1D {
        gaussian_packet(grid(), x0, k0, a).unwrap()
    }
}

prop_compose! {
    fn coef()(c in -3.0..3.0f64, im in -1.0..1.0f64) -> C64 {
        C64::new(c, im)
    }
}

fn max_diff(a: &PhaseField, b: &PhaseField) -> f64 {
    a.values.iter().zip(&b.values).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 12, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn wigner_is_sesquilinear(f in packet(), g in packet(), h in packet(), a in coef(), b in coef()) {
        let mix = superpose(&[f.clone(), g.clone()], &[a, b]).unwrap();
        let lhs = wigner_transform(&mix, &h, 1.0).unwrap();
        let wf = wigner_transform(&f, &h, 1.0).unwrap();
        let wg = wigner_transform(&g, &h, 1.0).unwrap();
        let rhs = wf.scale(a).add(&wg.scale(b)).unwrap();
        prop_assert!(max_diff(&lhs, &rhs) < 1e-10 * (1.0 + rhs.sup()));

        let rhs2 = wigner_transform(&h, &mix, 1.0).unwrap();
        let lhs2 = wigner_transform(&h, &f, 1.0).unwrap().scale(a.conj())
            .add(&wigner_transform(&h, &g, 1.0).unwrap().scale(b.conj())).unwrap();
        prop_assert!(max_diff(&lhs2, &rhs2) < 1e-10 * (1.0 + rhs2.sup()));
    }

    #[test]
    fn spectrum_keeps_inner_products(f in packet(), g in packet()) {
        let dx = f.grid.dual().spacing();
        let ip: C64 = f.spectrum().iter().zip(&g.spectrum()).map(|(a, b)| a * b.conj()).sum::<C64>() * dx;
        prop_assert!((ip - f.inner(&g)).norm() < 1e-12 * f.norm_sq().max(g.norm_sq()));
    }

    #[test]
    fn wigner_swap_is_conjugate(f in packet(), g in packet()) {
        let fg = wigner_transform(&f, &g, 1.0).unwrap();
        let gf = wigner_transform(&g, &f, 1.0).unwrap();
        prop_assert!(max_diff(&fg.conj(), &gf) < 1e-10 * (1.0 + fg.sup()));
    }

    #[test]
    fn wigner_mass_and_marginal(f in packet(), eps in prop::sample::select(vec![0.5, 1.0])) {
        let w = wigner_transform(&f, &f, eps).unwrap();
        prop_assert!(w.real);
        prop_assert!((w.integral().re - f.norm_sq()).abs() < 1e-9 * f.norm_sq());
        let m = marginal_k(&w);
        let err = m.values.iter().zip(&f.values).map(|(a, v)| (a.re - v.norm_sqr()).abs()).fold(0.0, f64::max);
        prop_assert!(err < 1e-9);
    }

    #[test]
    fn swt_keeps_mass(f in packet(), sx in 0.2..1.0f64, sk in 0.2..1.0f64) {
        let p = SmoothingParams::new(sx, sk, 1.0).unwrap();
        let w = swt(&f, &f, &p).unwrap();
        prop_assert!((w.integral().re - f.norm_sq()).abs() < 1e-8 * f.norm_sq());
    }

    #[test]
    fn spectrogram_is_nonnegative(f in packet(), g in packet(), b in coef(), s in 0.5..2.0f64) {
        let u = superpose(&[f, g], &[C64::new(1.0, 0.0), b]).unwrap();
        let p = SmoothingParams::new(s, 1.0 / s, 1.0).unwrap();
        let w = spectrogram(&u, &p).unwrap();
        prop_assert!(w.min_real() >= -1e-12 * w.sup());
    }

    #[test]
    fn smoothing_is_a_semigroup(f in packet(), s1 in 0.1..0.6f64, s2 in 0.1..0.6f64) {
        let two = smooth(&smooth(&f, s1.sqrt()), s2.sqrt());
        let one = smooth(&f, (s1 + s2).sqrt());
        prop_assert!(two.rel_sup_err(&one) < 1e-10);
    }

    #[test]
    fn phase_csv_round_trip(f in packet()) {
        let w = wigner_transform(&f, &f, 1.0).unwrap();
        let side = Sidecar::of(&w);
        let side2 = Sidecar::parse(&side.to_text()).unwrap();
        prop_assert_eq!(&side, &side2);
        let mut buf = Vec::new();
        write_phase_csv(&w, &mut buf).unwrap();
        let back = read_phase_csv(&buf, &side2).unwrap();
        prop_assert_eq!(back.values, w.values);
    }

    #[test]
    fn kv_round_trip(entries in prop::collection::btree_map("[a-z][a-z0-9_]{0,6}", "[A-Za-z0-9.+-]{1,10}", 0..8)) {
        let text: String = entries.iter().map(|(k, v)| format!("{k} = {v}\n")).collect();
        prop_assert_eq!(parse_kv(&text).unwrap(), entries);
    }

    #[test]
    fn symbol_text_round_trip(
        c in prop::collection::vec(coef(), 1..4),
        h in 0.1..2.0f64, w in 0.3..2.0f64, u in 0.1..1.0f64, amp in coef(),
        pick in 0usize..3,
    ) {
        let sym = match pick {
            0 => WeylSymbol::Potential(Coef::Gaussian { height: h, center: u, width: w }),
            1 => WeylSymbol::PolyK(vec![Coef::Poly(c.clone()), Coef::Gaussian { height: h, center: 0.0, width: w }]),
            _ => WeylSymbol::Bandlimited {
                modes: vec![Mode { u, profile: KProfile { poly: c.clone(), gauss: 0.0, rate: amp } }],
                support: u,
            },
        };
        let text = symbol_to_text(&sym).unwrap();
        prop_assert_eq!(parse_symbol(&text).unwrap(), sym);
    }

    #[test]
    fn transform_round_trip(v in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 64)) {
        let g = Grid1D::new(64, 5.0, 0.7).unwrap();
        let v: Vec<C64> = v.into_iter().map(|(a, b)| C64::new(a, b)).collect();
        let back = inverse(&g, &forward(&g, &v));
        let err = back.iter().zip(&v).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        prop_assert!(err < 1e-12);
    }

    #[test]
    fn weyl_x_is_multiplication(f in packet(), eps in 0.1..1.0f64) {
        let xf = weyl_apply(&WeylSymbol::x(), &f, eps).unwrap();
        let want = ComplexField1D::from_fn(f.grid, |x| C64::new(x, 0.0));
        let want = want.zip_with(&f, |a, b| a * b).unwrap();
        prop_assert!(xf.values.iter().zip(&want.values).all(|(a, b)| (a - b).norm() < 1e-9));
    }

    #[test]
    fn free_flow_keeps_mass(f in packet(), t in 0.0..0.5f64) {
        let p = SmoothingParams::new(0.5, 0.5, 1.0).unwrap();
        let w = swt(&f, &f, &p).unwrap();
        let wt = free_step(&w, t, &p).unwrap();
        prop_assert!((wt.integral() - w.integral()).norm() < 1e-8 * f.norm_sq());
        prop_assert!(wt.real);
    }
}
