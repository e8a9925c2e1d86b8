mod common;

use std::f64::consts::PI;
use std::sync::OnceLock;

use common::{c, gaussian, rel_l2, sub, sup};
use distorted_fourier::oracle::discretize;
use distorted_fourier::transform::{
    intertwining_defect, plancherel_defect, roundtrip_defect, x_norm, xi_norm,
};
use distorted_fourier::{
    adjoint, build_eigenbasis, find_bound_states, forward, BoundStates, EigenBasis, GridSpec,
    Potential, TransformResult,
};
use num_complex::Complex64;
use proptest::prelude::*;

fn desk_grid() -> GridSpec {
    GridSpec::new(-20.0, 20.0, 1000).unwrap()
}

fn free() -> &'static (EigenBasis, BoundStates) {
    static B: OnceLock<(EigenBasis, BoundStates)> = OnceLock::new();
    B.get_or_init(|| {
        let g = desk_grid();
        (build_eigenbasis(&Potential::zero(), &g, 8.0, 256).unwrap(), BoundStates::empty(g))
    })
}

fn sech2() -> &'static (EigenBasis, BoundStates) {
    static B: OnceLock<(EigenBasis, BoundStates)> = OnceLock::new();
    B.get_or_init(|| {
        let g = desk_grid();
        let v = Potential::preset("sech2", &[2.0, 1.0]).unwrap();
        (build_eigenbasis(&v, &g, 8.0, 256).unwrap(), find_bound_states(&v, &g).unwrap())
    })
}

/// Wider in both variables: the sech² tail of f̃ for a unit Gaussian is still
/// 4e-6 at ξ = 8, and `P_ac f` inherits the `e^{-|x|}` tail of `e_1`.
fn sech2_wide() -> &'static (EigenBasis, BoundStates) {
    static B: OnceLock<(EigenBasis, BoundStates)> = OnceLock::new();
    B.get_or_init(|| {
        let g = GridSpec::new(-30.0, 30.0, 1500).unwrap();
        let v = Potential::preset("sech2", &[2.0, 1.0]).unwrap();
        (build_eigenbasis(&v, &g, 8.0 * 511.0 / 255.0, 512).unwrap(), find_bound_states(&v, &g).unwrap())
    })
}

fn square_well() -> &'static (EigenBasis, BoundStates) {
    static B: OnceLock<(EigenBasis, BoundStates)> = OnceLock::new();
    B.get_or_init(|| {
        let g = GridSpec::new(-30.0, 30.0, 1000).unwrap();
        let v = Potential::preset("square_well", &[1.0, 1.0]).unwrap();
        (build_eigenbasis(&v, &g, 8.0, 256).unwrap(), find_bound_states(&v, &g).unwrap())
    })
}

fn inner(a: &[Complex64], b: &[Complex64], w: &[f64]) -> Complex64 {
    a.iter().zip(b).zip(w).map(|((x, y), w)| x * y.conj() * *w).sum()
}

#[test]
fn free_gaussian_is_fixed() {
    let (b, _) = free();
    let f = gaussian(&b.x_grid, 0.0, 1.0);
    let ft = forward(&f, b).unwrap();
    let err = ft
        .xi_grid
        .iter()
        .zip(&ft.values)
        .fold(0.0f64, |m, (&xi, v)| m.max((v - c((-xi * xi / 2.0).exp())).norm()));
    assert!(err < 1e-6, "sup error {err:.3e}");
    let n = ft.values.len();
    for j in 0..n {
        assert!(ft.values[j].im.abs() < 1e-10);
        assert!((ft.values[j] - ft.values[n - 1 - j]).norm() < 1e-10);
    }
    assert_eq!(ft.window, 20.0);
}

#[test]
fn free_adjoint_inverts_the_gaussian() {
    let (b, _) = free();
    let g = TransformResult::from_fn(b, |xi| c((-xi * xi / 2.0).exp()));
    let back = adjoint(&g, b).unwrap();
    let exact = gaussian(&b.x_grid, 0.0, 1.0);
    assert!(sup(&sub(&back, &exact)) < 1e-6);
}

#[test]
fn masked_nodes_carry_nothing() {
    let (b, _) = sech2();
    let mut g = TransformResult::from_fn(b, |_| c(1.0));
    g.mask.iter_mut().for_each(|m| *m = true);
    assert!(sup(&adjoint(&g, b).unwrap()) == 0.0);
    let mut wrong = g.clone();
    wrong.xi_grid.pop();
    assert!(adjoint(&wrong, b).is_err());
}

#[test]
fn bound_state_is_annihilated() {
    let (b, s) = sech2();
    let e1: Vec<Complex64> = s.states[0].eigenfunction.iter().map(|&v| c(v)).collect();
    let ft = forward(&e1, b).unwrap();
    let n = xi_norm(b, &ft.values);
    assert!(n < 1e-3, "‖F e_1‖ = {n:.3e}");
    let ac = sub(&e1, &distorted_fourier::bound_states::point_projection(s, &e1).unwrap());
    assert!(x_norm(&b.x_grid, &ac) < 1e-3);
    assert!(plancherel_defect(&e1, b, s).unwrap() < 1e-3);
}

#[test]
fn plancherel_examples() {
    let (b0, s0) = free();
    let f = gaussian(&b0.x_grid, 0.0, 1.0);
    assert!(plancherel_defect(&f, b0, s0).unwrap() < 1e-6);

    let (b, s) = sech2_wide();
    let f = gaussian(&b.x_grid, 0.3, 1.0);
    assert!(plancherel_defect(&f, b, s).unwrap() < 1e-3);
}

#[test]
fn plancherel_requires_a_converged_frequency_window() {
    let (b, s) = free();
    // Width 0.2 leaves |f̃(8)| ≈ 0.2 e^{-1.28}.
    let f = gaussian(&b.x_grid, 0.0, 0.2);
    assert!(matches!(
        plancherel_defect(&f, b, s),
        Err(distorted_fourier::SpectralError::FrequencyWindow { .. })
    ));
}

#[test]
fn adjoint_recovers_the_continuous_part() {
    let (b, _) = sech2();
    let f = gaussian(&b.x_grid, 0.3, 1.0);
    let back = adjoint(&forward(&f, b).unwrap(), b).unwrap();
    let hd = discretize(&Potential::preset("sech2", &[2.0, 1.0]).unwrap(), &b.x_grid).unwrap();
    let pac = hd.continuous_projection(&f, 1e-6).unwrap();
    assert!(rel_l2(&b.x_grid, &back, &pac, &f) < 1e-3);
}

#[test]
fn roundtrip_examples() {
    let (b0, s0) = free();
    let (d1, d2) = roundtrip_defect(b0, s0, &gaussian(&b0.x_grid, 0.0, 1.0)).unwrap();
    assert!(d1 < 1e-6 && d2 < 1e-6, "{d1:.3e} {d2:.3e}");
    for (b, s, center) in [(&sech2().0, &sech2().1, 0.3), (&square_well().0, &square_well().1, 4.0)] {
        let (d1, d2) = roundtrip_defect(b, s, &gaussian(&b.x_grid, center, 1.0)).unwrap();
        assert!(d1 < 1e-2 && d2 < 1e-2, "{} {d1:.3e} {d2:.3e}", b.potential);
    }
}

#[test]
fn intertwining_examples() {
    let (b0, _) = free();
    assert!(intertwining_defect(&gaussian(&b0.x_grid, 0.0, 1.0), b0).unwrap() < 1e-4);
    let (b, _) = sech2();
    assert!(intertwining_defect(&gaussian(&b.x_grid, 0.3, 1.0), b).unwrap() < 1e-3);
    assert_eq!(intertwining_defect(&vec![c(0.0); b.n_x()], b).unwrap(), 0.0);
}

#[test]
fn projection_property() {
    let (b, s) = sech2_wide();
    let f = gaussian(&b.x_grid, 0.3, 1.0);
    let (_, d2) = roundtrip_defect(b, s, &f).unwrap();
    let p1 = adjoint(&forward(&f, b).unwrap(), b).unwrap();
    let p2 = adjoint(&forward(&p1, b).unwrap(), b).unwrap();
    let twice = rel_l2(&b.x_grid, &p2, &p1, &f);
    assert!(twice <= 2.0 * d2.max(1e-14), "twice {twice:.3e} single {d2:.3e}");
}

// Random inputs: a few complex Gaussian packets well inside the window.
fn packets() -> impl Strategy<Value = Vec<(f64, f64, f64, f64)>> {
    prop::collection::vec((-5.0..5.0f64, 0.7..2.0f64, -1.0..1.0f64, -1.0..1.0f64), 1..4)
}

fn synth(grid: &GridSpec, p: &[(f64, f64, f64, f64)]) -> Vec<Complex64> {
    grid.nodes()
        .iter()
        .map(|&x| {
            p.iter()
                .map(|&(m, w, re, im)| Complex64::new(re, im) * (-(x - m).powi(2) / (2.0 * w * w)).exp())
                .sum()
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn forward_is_linear(p in packets(), q in packets(), a in -2.0..2.0f64, bb in -2.0..2.0f64) {
        let (b, _) = sech2();
        let (f, g) = (synth(&b.x_grid, &p), synth(&b.x_grid, &q));
        let (a, bb) = (Complex64::new(a, 0.5), Complex64::new(0.25, bb));
        let mix: Vec<Complex64> = f.iter().zip(&g).map(|(x, y)| a * x + bb * y).collect();
        let lhs = forward(&mix, b).unwrap();
        let (tf, tg) = (forward(&f, b).unwrap(), forward(&g, b).unwrap());
        let scale = sup(&tf.values).max(sup(&tg.values)).max(1.0);
        for j in 0..lhs.values.len() {
            let rhs = a * tf.values[j] + bb * tg.values[j];
            prop_assert!((lhs.values[j] - rhs).norm() < 1e-12 * scale);
        }
    }

    #[test]
    fn forward_and_adjoint_are_adjoint(p in packets(), re in prop::collection::vec(-1.0..1.0f64, 256), im in prop::collection::vec(-1.0..1.0f64, 256)) {
        let (b, _) = sech2();
        let f = synth(&b.x_grid, &p);
        let mut g = TransformResult::from_fn(b, |_| c(0.0));
        for j in 0..256 {
            if !g.mask[j] {
                g.values[j] = Complex64::new(re[j], im[j]);
            }
        }
        let ft = forward(&f, b).unwrap();
        let lhs = inner(&ft.values, &g.values, &b.xi_weights());
        let rhs = inner(&f, &adjoint(&g, b).unwrap(), &b.x_weights());
        let scale = x_norm(&b.x_grid, &f) * xi_norm(b, &g.values);
        prop_assert!((lhs - rhs).norm() < 1e-10 * scale, "{:.3e}", (lhs - rhs).norm() / scale);
    }

    #[test]
    fn free_transform_is_the_fourier_quadrature(p in packets()) {
        let (b, _) = free();
        let f = synth(&b.x_grid, &p);
        let ft = forward(&f, b).unwrap();
        let xs = b.x_grid.nodes();
        let w = b.x_weights();
        for (j, &xi) in ft.xi_grid.iter().enumerate() {
            let direct: Complex64 = xs
                .iter()
                .zip(&f)
                .zip(&w)
                .map(|((&x, v), w)| v * Complex64::from_polar(*w, -x * xi))
                .sum::<Complex64>()
                / (2.0 * PI).sqrt();
            prop_assert!((ft.values[j] - direct).norm() < 1e-10);
        }
    }
}
