mod common;

use std::f64::consts::PI;

use common::{bump, c, gaussian, rel_l2, sub, sup};
use distorted_fourier::kernel::{kernel_ac, kernel_point};
use distorted_fourier::oracle::discretize;
use distorted_fourier::{
    apply_spectral, apply_via_transform, assemble_kernel, build_eigenbasis, find_bound_states,
    BoundStates, GridSpec, Kernel, Multiplier, Potential, SpectralError,
};
use num_complex::Complex64;

fn presets() -> Vec<Potential> {
    [
        ("zero", vec![]),
        ("sech2", vec![2.0, 1.0]),
        ("square_well", vec![1.0, 1.0]),
        ("gaussian_well", vec![1.0, 1.0]),
    ]
    .into_iter()
    .map(|(n, p)| Potential::preset(n, &p).unwrap())
    .collect()
}

fn sech2() -> Potential {
    Potential::preset("sech2", &[2.0, 1.0]).unwrap()
}

fn tent(center: f64, radius: f64) -> Multiplier {
    Multiplier::preset("tent", center, radius).unwrap()
}

#[test]
fn free_continuous_kernel_is_a_convolution() {
    let g = GridSpec::new(-10.0, 10.0, 201).unwrap();
    let b = build_eigenbasis(&Potential::zero(), &g, 4.0, 512).unwrap();
    let k = kernel_ac(&b, &tent(2.0, 1.0)).unwrap();
    // (1/π) ∫_1^{√3} (1 − |ξ² − 2|) dξ
    let exact = (2.0 / 3.0 + 2.0 * 3f64.sqrt() - 8.0 * 2f64.sqrt() / 3.0) / PI;
    for i in 0..g.len() {
        assert!((k.get(i, i) - c(exact)).norm() < 1e-3 * exact);
        assert!((k.get(i, i) - k.get(0, 0)).norm() < 1e-12);
    }
    for i in 0..g.len() - 1 {
        for j in (0..g.len() - 1).step_by(7) {
            assert!((k.get(i + 1, j + 1) - k.get(i, j)).norm() < 1e-12);
        }
    }
}

#[test]
fn point_kernel_of_the_sech2_state() {
    let g = GridSpec::new(-20.0, 20.0, 1001).unwrap();
    let s = find_bound_states(&sech2(), &g).unwrap();
    let b = build_eigenbasis(&sech2(), &g, 8.0, 256).unwrap();
    // tent(−1, ½) lies entirely below the continuum, so only K_p remains.
    let k = assemble_kernel(&b, &s, &tent(-1.0, 0.5)).unwrap();
    assert!(k.parts.point && !k.parts.ac);
    let xs = g.nodes();
    let mut err = 0.0f64;
    for (i, x) in xs.iter().enumerate() {
        for (j, y) in xs.iter().enumerate() {
            err = err.max((k.get(i, j).re - 0.5 / (x.cosh() * y.cosh())).abs());
        }
    }
    assert!(err < 1e-3, "entrywise {err:.3e}");
    let miss = kernel_point(&s, &tent(2.0, 1.0), &g).unwrap();
    assert!(miss.values().iter().all(|v| v.norm() == 0.0));
}

#[test]
fn zero_kernel_gives_zero() {
    let g = GridSpec::new(-10.0, 10.0, 101).unwrap();
    let out = apply_spectral(&Kernel::zeros(g), &gaussian(&g, 0.0, 1.0)).unwrap();
    assert!(sup(&out) == 0.0);
}

#[test]
fn free_multiplier_matches_fourier_quadrature() {
    let g = GridSpec::new(-20.0, 20.0, 1000).unwrap();
    let b = build_eigenbasis(&Potential::zero(), &g, 8.0, 256).unwrap();
    let phi = tent(2.0, 1.0);
    let k = assemble_kernel(&b, &BoundStates::empty(g), &phi).unwrap();
    let out = apply_spectral(&k, &gaussian(&g, 0.0, 1.0)).unwrap();
    // 𝓕⁻¹[φ(ξ²) f̂] on the same ξ-grid, with f̂ = e^{-ξ²/2} exact.
    let u = b.xi_weights();
    let expect: Vec<Complex64> = g
        .nodes()
        .iter()
        .map(|&x| {
            b.xi_grid
                .iter()
                .zip(&u)
                .map(|(&xi, &w)| Complex64::from_polar(w * phi.eval(xi * xi) * (-xi * xi / 2.0).exp(), x * xi))
                .sum::<Complex64>()
                / (2.0 * PI).sqrt()
        })
        .collect();
    assert!(sup(&sub(&out, &expect)) < 1e-6);
}

#[test]
fn sech2_kernel_matches_the_oracle() {
    let g = GridSpec::new(-20.0, 20.0, 1000).unwrap();
    let v = sech2();
    let b = build_eigenbasis(&v, &g, 8.0, 256).unwrap();
    let s = find_bound_states(&v, &g).unwrap();
    let hd = discretize(&v, &g).unwrap();
    let phi = tent(2.0, 1.0);
    let k = assemble_kernel(&b, &s, &phi).unwrap();
    let f = gaussian(&g, 0.3, 1.0);
    let err = rel_l2(&g, &apply_spectral(&k, &f).unwrap(), &hd.functional_calculus(&phi, &f).unwrap(), &f);
    assert!(err < 1e-2, "{err:.3e}");
}

#[test]
fn routes_agree_and_kernels_are_hermitian() {
    let g = GridSpec::new(-20.0, 20.0, 600).unwrap();
    for v in presets() {
        let b = build_eigenbasis(&v, &g, 8.0, 256).unwrap();
        let s = find_bound_states(&v, &g).unwrap();
        for phi in [tent(2.0, 1.0), Multiplier::preset("smooth_bump", 2.5, 1.5).unwrap()] {
            let k = assemble_kernel(&b, &s, &phi).unwrap();
            assert!(k.hermitian_defect() < 1e-10);
            for f in [gaussian(&g, 0.3, 1.0), bump(&g, 0.5, 3.0)] {
                let a = apply_spectral(&k, &f).unwrap();
                let t = apply_via_transform(&b, &s, &phi, &f).unwrap();
                let d = rel_l2(&g, &a, &t, &f);
                assert!(d < 1e-8, "{v}: {d:.3e}");
            }
        }
    }
}

#[test]
fn disjoint_supports_multiply_to_nearly_zero() {
    let g = GridSpec::new(-20.0, 20.0, 1000).unwrap();
    let v = sech2();
    let b = build_eigenbasis(&v, &g, 6.0, 512).unwrap();
    let s = find_bound_states(&v, &g).unwrap();
    let k1 = assemble_kernel(&b, &s, &tent(1.5, 0.5)).unwrap();
    let k2 = assemble_kernel(&b, &s, &tent(3.5, 0.5)).unwrap();
    let f = gaussian(&g, 0.3, 1.0);
    // φ₂(H)f decays only algebraically, so the outer product is summed directly.
    let h = apply_spectral(&k2, &f).unwrap();
    let w = g.weights();
    let out: Vec<Complex64> = (0..g.len())
        .map(|i| k1.row(i).iter().zip(&h).zip(&w).map(|((k, v), w)| k * v * *w).sum())
        .collect();
    let ratio = common::rel_l2(&g, &out, &vec![c(0.0); g.len()], &f);
    assert!(ratio < 1e-2, "{ratio:.3e}");
}

#[test]
fn small_instances_match_the_oracle() {
    // φ(H)f spreads well beyond the input; narrower boxes reflect it back.
    let g = GridSpec::new(-30.0, 30.0, 400).unwrap();
    for v in presets() {
        let b = build_eigenbasis(&v, &g, 8.0, 256).unwrap();
        let s = find_bound_states(&v, &g).unwrap();
        let hd = discretize(&v, &g).unwrap();
        for phi in [tent(2.0, 1.0), Multiplier::preset("smooth_bump", 2.5, 1.5).unwrap()] {
            let k = assemble_kernel(&b, &s, &phi).unwrap();
            let f = gaussian(&g, 0.3, 1.0);
            let err = rel_l2(&g, &apply_spectral(&k, &f).unwrap(), &hd.functional_calculus(&phi, &f).unwrap(), &f);
            assert!(err < 1e-2, "{v} {}: {err:.3e}", phi.kind_name());
        }
    }
}

#[test]
fn bound_state_channel_recovers_the_state() {
    let g = GridSpec::new(-20.0, 20.0, 1001).unwrap();
    let v = sech2();
    let b = build_eigenbasis(&v, &g, 8.0, 256).unwrap();
    let s = find_bound_states(&v, &g).unwrap();
    let e1: Vec<Complex64> = s.states[0].eigenfunction.iter().map(|&x| c(x)).collect();
    let phi = tent(-1.0, 0.5);
    let out = apply_via_transform(&b, &s, &phi, &e1).unwrap();
    assert!(sup(&sub(&out, &e1)) < 1e-3);
    let k = assemble_kernel(&b, &s, &phi).unwrap();
    assert!(sup(&sub(&apply_spectral(&k, &e1).unwrap(), &e1)) < 1e-3);
}

#[test]
fn unsupported_multipliers_are_rejected() {
    let g = GridSpec::new(-20.0, 20.0, 400).unwrap();
    let b = build_eigenbasis(&Potential::zero(), &g, 8.0, 256).unwrap();
    let s = BoundStates::empty(g);
    let support = |r: Result<Kernel, SpectralError>| matches!(r, Err(SpectralError::MultiplierSupport(_)));
    // Reaches λ ≤ 0.
    assert!(support(kernel_ac(&b, &tent(0.5, 1.0))));
    // Starts inside the excluded band around ξ = 0 plus its guard cell.
    assert!(support(kernel_ac(&b, &tent(0.5, 0.4999))));
    // Runs past ξ_max.
    assert!(support(assemble_kernel(&b, &s, &tent(70.0, 1.0))));
    assert!(matches!(
        kernel_ac(&b, &tent(4.0, 0.05)),
        Err(SpectralError::UnderResolved { .. })
    ));
    let f = gaussian(&g, 0.0, 1.0);
    assert!(apply_via_transform(&b, &s, &tent(4.0, 0.05), &f).is_err());
    let wide = vec![c(1.0); g.len()];
    let k = kernel_ac(&b, &tent(2.0, 1.0)).unwrap();
    assert!(matches!(apply_spectral(&k, &wide), Err(SpectralError::NotDecayed { .. })));
}
