use super::*;
use crate::analysis::energy;
use crate::grid::GridSpec;
use crate::init::{InitialCondition, StarBranch};
use crate::params::{default_params, Backend};
use proptest::prelude::*;

fn square(n: usize) -> GridSpec {
    GridSpec::unit_square(n).unwrap()
}

fn field_from_fn(spec: GridSpec, f: impl Fn(&[f64]) -> f64) -> ScalarField<f64> {
    let n = spec.n();
    let mut interior = Vec::new();
    if spec.dim() == 2 {
        for i in 0..n[0] {
            for j in 0..n[1] {
                interior.push(f(&[spec.center(0, i), spec.center(1, j)]));
            }
        }
    } else {
        for i in 0..n[0] {
            for j in 0..n[1] {
                for k in 0..n[2] {
                    interior.push(f(&[
                        spec.center(0, i),
                        spec.center(1, j),
                        spec.center(2, k),
                    ]));
                }
            }
        }
    }
    ScalarField::from_interior(spec, &interior).unwrap()
}

fn max_abs_diff(a: &ScalarField<f64>, b: &ScalarField<f64>) -> f64 {
    a.interior_values()
        .zip(b.interior_values())
        .fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

#[test]
fn kernel_weights_cancel() {
    for spec in [square(10), GridSpec::unit_cube(10).unwrap()] {
        let p = default_params(&spec, 4).unwrap();
        let k = StencilKernel::<f64>::new(&p);
        assert_eq!(k.center() + 2.0 * spec.dim() as f64 * k.neighbor(), 0.0);
        let w = k.weights();
        assert_eq!(w.len(), 3usize.pow(spec.dim() as u32));
        assert_eq!(w.iter().filter(|&&v| v != 0.0).count(), 2 * spec.dim() + 1);
        // dt = 0.1 h^2 makes every neighbor weight 0.1
        assert!((k.neighbor() - 0.1).abs() < 1e-15);
        let c = ScalarField::constant(spec, 0.7);
        let conv = conv_valid(&spec, c.as_slice(), &k);
        assert!(conv.iter().all(|&v| v.abs() < 1e-15));
    }
}

#[test]
fn laplacian_of_constant_is_zero() {
    let f = ScalarField::<f64>::constant(square(8), 3.0);
    assert!(laplacian_ref(&f).iter().all(|&v| v == 0.0));
}

#[test]
fn laplacian_of_linear_profile() {
    // phi = x along axis 0. Replication bends the profile in the first and
    // last interior columns: there the stencil sees one flat side, giving
    // +(x2 - x1)/h^2 = 1/h low and -1/h high.
    let spec = square(16);
    let h = spec.h();
    let f = field_from_fn(spec, |x| x[0]);
    let lap = laplacian_ref(&f);
    let n = 16;
    for i in 0..n {
        for j in 0..n {
            let v = lap[i * n + j];
            let expected = match i {
                0 => 1.0 / h,
                15 => -1.0 / h,
                _ => 0.0,
            };
            assert!((v - expected).abs() < 1e-9, "({i},{j}): {v}");
        }
    }
}

#[test]
fn laplacian_of_quadratic_is_exact() {
    let spec = square(64);
    let f = field_from_fn(spec, |x| x[0] * x[0] + x[1] * x[1]);
    let lap = laplacian_ref(&f);
    for i in 1..63 {
        for j in 1..63 {
            assert!((lap[i * 64 + j] - 4.0).abs() < 1e-9);
        }
    }
    let cube = GridSpec::unit_cube(24).unwrap();
    let f = field_from_fn(cube, |x| x.iter().map(|c| c * c).sum());
    let lap = laplacian_ref(&f);
    for i in 1..23 {
        for j in 1..23 {
            for k in 1..23 {
                assert!((lap[(i * 24 + j) * 24 + k] - 6.0).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn uniform_equilibria() {
    for spec in [square(12), GridSpec::unit_cube(8).unwrap()] {
        let p = default_params(&spec, 4).unwrap();
        let k = StencilKernel::new(&p);
        for c in [1.0, -1.0, 0.0] {
            let f = ScalarField::<f64>::constant(spec, c);
            let r = step_reference(&f, &p).unwrap();
            let s = step_stencil(&f, &p, &k).unwrap();
            let q = step_stencil_padcopy(&f, &p, &k).unwrap();
            for g in [&r, &s, &q] {
                assert!(g.as_slice().iter().all(|&v| v == c));
            }
        }
        let f = ScalarField::<f64>::constant(spec, 0.5);
        let expected = 0.5 + 0.375 * p.alpha();
        let r = step_reference(&f, &p).unwrap();
        assert!(r.interior_values().all(|v| (v - expected).abs() < 1e-15));
        let s = step_stencil(&f, &p, &k).unwrap();
        assert!(s.interior_values().all(|v| (v - expected).abs() < 1e-15));
    }
}

#[test]
fn divergence_names_the_offending_cell() {
    let spec = square(6);
    let p = default_params(&spec, 2).unwrap();
    let mut f = ScalarField::<f64>::constant(spec, 0.0);
    f.set(&[3, 2], f64::INFINITY);
    match step_reference(&f, &p) {
        Err(Error::Divergence { index, .. }) => assert_eq!(index, vec![1, 1]),
        other => panic!("expected divergence, got {other:?}"),
    }
    let k = StencilKernel::new(&p);
    assert!(matches!(
        step_stencil(&f, &p, &k),
        Err(Error::Divergence { .. })
    ));
}

#[test]
fn tanh_profile_barely_moves() {
    // The 1D tanh profile is a steady state of the continuous equation;
    // on the grid one step changes it by discretization error only.
    let spec = square(200);
    let p = default_params(&spec, 10).unwrap();
    let eps = p.eps();
    let f = field_from_fn(spec, |x| {
        ((x[0] - 0.5) / (std::f64::consts::SQRT_2 * eps)).tanh()
    });
    let r = step_reference(&f, &p).unwrap();
    let s = step_stencil(&f, &p, &StencilKernel::new(&p)).unwrap();
    let change = max_abs_diff(&r, &f);
    // Truncation error of the 5-point Laplacian on the profile scales like
    // alpha (h/eps)^2; the reference backend measured 2.4755e-4.
    let scale = p.alpha() * (spec.h() / eps).powi(2);
    assert!(change < 0.1 * scale, "max change {change} vs scale {scale}");
    assert!((change - 2.4755e-4).abs() < 1e-7, "max change {change}");
    assert!(max_abs_diff(&r, &s) <= 1e-13);
}

fn shapes(dim: usize) -> Vec<InitialCondition> {
    let mut v = vec![
        InitialCondition::Dumbbell { r0: 0.2 },
        InitialCondition::Star {
            branch: StarBranch::AsPrinted,
        },
        InitialCondition::Random {
            amplitude: 0.1,
            seed: 11,
        },
    ];
    if dim == 2 {
        v.push(InitialCondition::Circle { r0: 0.25 });
        v.push(InitialCondition::Torus { r1: 0.4, r2: 0.3 });
    } else {
        v.push(InitialCondition::Sphere { r0: 0.3 });
        v.push(InitialCondition::Torus { r1: 0.3, r2: 0.2 });
    }
    v
}

#[test]
fn backends_agree_step_by_step() {
    let grids = [
        square(32),
        square(64),
        GridSpec::unit_cube(16).unwrap(),
        GridSpec::unit_cube(32).unwrap(),
    ];
    for spec in grids {
        let p = default_params(&spec, 4).unwrap();
        for ic in shapes(spec.dim()) {
            let init: ScalarField<f64> = ic.generate(&spec, &p).unwrap();
            let mut r = Stepper::new(Backend::Reference, p, init.clone());
            let mut s = Stepper::new(Backend::Stencil, p, init.clone());
            let mut q = Stepper::new(Backend::StencilPadcopy, p, init);
            for step in 0..100 {
                r.advance();
                s.advance();
                q.advance();
                let d = max_abs_diff(r.field(), s.field());
                assert!(d <= 1e-13, "{} {:?} step {step}: {d}", ic.name(), spec.n());
                assert_eq!(s.field(), q.field(), "padcopy differs from fused stencil");
            }
        }
    }
}

#[test]
fn stencil_output_independent_of_thread_count() {
    let run_with = |threads: usize, spec: GridSpec| {
        let p = default_params(&spec, 4).unwrap();
        let init: ScalarField<f64> = InitialCondition::Random {
            amplitude: 0.1,
            seed: 5,
        }
        .generate(&spec, &p)
        .unwrap();
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        pool.install(|| {
            let mut s = Stepper::new(Backend::Stencil, p, init);
            for _ in 0..20 {
                s.advance();
            }
            s.into_field()
        })
    };
    for spec in [square(48), GridSpec::unit_cube(20).unwrap()] {
        let one = run_with(1, spec);
        let max = rayon::current_num_threads().max(4);
        for t in [2, max] {
            let other = run_with(t, spec);
            let a: Vec<u64> = one.as_slice().iter().map(|v| v.to_bits()).collect();
            let b: Vec<u64> = other.as_slice().iter().map(|v| v.to_bits()).collect();
            assert_eq!(a, b, "{t} threads");
        }
    }
}

#[test]
fn energy_decreases_and_values_stay_bounded() {
    for spec in [square(48), GridSpec::unit_cube(16).unwrap()] {
        let p = default_params(&spec, 4).unwrap();
        for ic in shapes(spec.dim()) {
            let init: ScalarField<f64> = ic.generate(&spec, &p).unwrap();
            let mut s = Stepper::new(Backend::Stencil, p, init);
            let mut last = energy(s.field(), &p);
            for _ in 0..200 {
                s.advance();
                let e = energy(s.field(), &p);
                assert!(e <= last * (1.0 + 1e-10), "{}: {e} > {last}", ic.name());
                last = e;
                assert!(s.field().interior_values().all(|v| v.abs() <= 1.0 + 1e-12));
            }
        }
    }
}

#[test]
fn f32_backends_stay_close() {
    let spec = square(32);
    let p = default_params(&spec, 4).unwrap();
    let init: ScalarField<f32> = InitialCondition::Circle { r0: 0.25 }
        .generate(&spec, &p)
        .unwrap();
    let mut r = Stepper::new(Backend::Reference, p, init.clone());
    let mut s = Stepper::new(Backend::Stencil, p, init);
    for _ in 0..50 {
        r.advance();
        s.advance();
    }
    let d = r
        .field()
        .interior_values()
        .zip(s.field().interior_values())
        .fold(0.0f32, |m, (a, b)| m.max((a - b).abs()));
    assert!(d < 1e-5, "{d}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn backends_agree_on_arbitrary_bounded_data(
        values in prop::collection::vec(-1.0f64..=1.0, 12 * 9),
        m in 2u32..8,
    ) {
        let spec = GridSpec::new(&[(0.0, 4.0 / 3.0), (0.0, 1.0)], &[12, 9]).unwrap();
        let p = default_params(&spec, m).unwrap();
        let f = ScalarField::from_interior(spec, &values).unwrap();
        let r = step_reference(&f, &p).unwrap();
        let s = step_stencil(&f, &p, &StencilKernel::new(&p)).unwrap();
        prop_assert!(max_abs_diff(&r, &s) <= 1e-13);
        prop_assert!(s.interior_values().all(|v| v.abs() <= 1.0 + 1e-12));
    }
}
