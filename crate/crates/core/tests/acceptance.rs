//! End-to-end acceptance checks. Each test prints one PASS/FAIL line to
//! stderr (bypassing the test harness capture) and then asserts.
//!
//! The tests share one lock so the timing check never competes with the
//! others for cores. The suite takes about two minutes on one core.

use std::io::Write;
use std::sync::Mutex;

use allencahn_core::analysis::exact_radius;
use allencahn_core::dump::{encode, DumpFormat};
use allencahn_core::harness::time_backend;
use allencahn_core::params::Backend;
use allencahn_core::preset::{preset, PRESETS};
use allencahn_core::stepper::conv_valid;
use allencahn_core::{
    default_params, run, run_dual, Diagnostics, GridSpec, InitialCondition, RunConfig, ScalarField,
    StencilKernel,
};

static LOCK: Mutex<()> = Mutex::new(());

fn report(id: u32, title: &str, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    let _ = writeln!(
        std::io::stderr(),
        "[criterion {id:>2}] {verdict}  {title}: {detail}"
    );
}

fn serial() -> std::sync::MutexGuard<'static, ()> {
    LOCK.lock().unwrap_or_else(|e| e.into_inner())
}

fn diagnostics_of(cfg: &RunConfig) -> Vec<Diagnostics> {
    run::<f64, _>(cfg, |_| Ok(())).unwrap().diagnostics
}

fn at_time(rows: &[Diagnostics], t: f64) -> &Diagnostics {
    rows.iter()
        .find(|d| (d.t - t).abs() < 1e-12)
        .unwrap_or_else(|| panic!("no diagnostics row at t = {t}"))
}

#[test]
fn c01_backend_equivalence() {
    let _g = serial();
    let mut worst: f64 = 0.0;
    let mut cells = Vec::new();
    for p in &PRESETS {
        let mut cfg = p.to_config(2).unwrap();
        cfg.diagnostics_stride = cfg.n_steps;
        let dual = run_dual::<f64>(&cfg).unwrap();
        worst = worst.max(dual.err);
        cells.push(format!("{}={:.1e}", p.name, dual.err));
    }
    // The published bound is 1e-6; same-precision backends should sit far below.
    let pass = worst <= 1e-12;
    report(
        1,
        "reference vs stencil Err, 12 presets at scale 2, f64",
        pass,
        &format!(
            "max Err {worst:.2e} (bound 1e-6, expected <= 1e-12); {}",
            cells.join(" ")
        ),
    );
    assert!(pass);
}

#[test]
fn c02_shrinking_circle() {
    let _g = serial();
    let mut cfg = preset("circle2d").unwrap().to_config(1).unwrap();
    cfg.diagnostics_stride = 2000;
    let rows = diagnostics_of(&cfg);
    let mut worst: f64 = 0.0;
    let mut cells = Vec::new();
    for t in [0.005, 0.01, 0.02] {
        let d = at_time(&rows, t);
        let exact = exact_radius(0.25, 2, t).unwrap();
        let rel = (d.radius.unwrap() - exact).abs() / exact;
        worst = worst.max(rel);
        cells.push(format!(
            "t={t}: r={:.5} exact={exact:.5} ({:.2}%)",
            d.radius.unwrap(),
            100.0 * rel
        ));
    }
    let pass = worst <= 0.05;
    report(
        2,
        "circle2d radius vs exact law (5%)",
        pass,
        &cells.join("; "),
    );
    assert!(pass);
}

#[test]
fn c03_eps_m_ordering() {
    let _g = serial();
    let spec = GridSpec::unit_square(200).unwrap();
    let t = 0.02;
    let exact = exact_radius(0.25, 2, t).unwrap();
    let mut dev = Vec::new();
    for m in [4u32, 6, 10] {
        let mut cfg = RunConfig::new(spec, m, InitialCondition::Circle { r0: 0.25 }, 8000).unwrap();
        cfg.diagnostics_stride = 8000;
        let rows = diagnostics_of(&cfg);
        dev.push((m, (at_time(&rows, t).radius.unwrap() - exact).abs()));
    }
    let pass = dev[2].1 < dev[0].1 && dev[2].1 < dev[1].1;
    let cells: Vec<String> = dev.iter().map(|(m, d)| format!("m={m}: {d:.2e}")).collect();
    report(
        3,
        "m=10 closest to exact radius at t=0.02",
        pass,
        &cells.join(", "),
    );
    assert!(pass);
}

#[test]
fn c04_shrinking_sphere() {
    let _g = serial();
    let mut cfg = preset("sphere3d").unwrap().to_config(2).unwrap();
    let r0 = cfg.init.initial_radius().unwrap();
    // dt = 4e-5 at scale 2: sample at steps 125 and 250
    cfg.diagnostics_stride = 125;
    let rows = diagnostics_of(&cfg);
    let mut worst: f64 = 0.0;
    let mut cells = Vec::new();
    for t in [0.005, 0.01] {
        let d = at_time(&rows, t);
        let exact = exact_radius(r0, 3, t).unwrap();
        let rel = (d.radius.unwrap() - exact).abs() / exact;
        worst = worst.max(rel);
        cells.push(format!(
            "t={t}: r={:.5} exact={exact:.5} ({:.2}%)",
            d.radius.unwrap(),
            100.0 * rel
        ));
    }
    let pass = worst <= 0.08;
    report(
        4,
        "sphere3d radius vs exact law at scale 2 (8%)",
        pass,
        &cells.join("; "),
    );
    assert!(pass);
}

#[test]
fn c05_maximum_principle() {
    let _g = serial();
    let mut worst: f64 = 0.0;
    let mut checked = Vec::new();
    for p in &PRESETS {
        let cfg = p.to_config(1).unwrap();
        let rows = diagnostics_of(&cfg);
        let initial = rows[0].min.abs().max(rows[0].max.abs());
        if initial > 1.0 {
            continue;
        }
        for d in &rows {
            worst = worst.max(d.min.abs().max(d.max.abs()));
        }
        checked.push(p.name);
    }
    let pass = worst <= 1.0 + 1e-12 && checked.len() == PRESETS.len();
    report(
        5,
        "max|phi| <= 1 + 1e-12 at every stride, all presets at full scale",
        pass,
        &format!(
            "{} presets checked, max|phi| - 1 = {:.2e}",
            checked.len(),
            worst - 1.0
        ),
    );
    assert!(pass);
}

#[test]
fn c06_energy_monotone() {
    let _g = serial();
    let mut cells = Vec::new();
    let mut pass = true;
    for name in ["circle2d", "star2d", "separation2d", "separation3d"] {
        let rows = diagnostics_of(&preset(name).unwrap().to_config(2).unwrap());
        let mut worst_rise: f64 = 0.0;
        for w in rows.windows(2) {
            worst_rise = worst_rise.max((w[1].energy - w[0].energy) / w[0].energy.abs());
        }
        pass &= worst_rise <= 1e-10;
        cells.push(format!(
            "{name}: {} strides, max relative rise {worst_rise:.1e}",
            rows.len() - 1
        ));
    }
    report(
        6,
        "energy non-increasing at every stride (scale 2)",
        pass,
        &cells.join("; "),
    );
    assert!(pass);
}

// Calibrated on reference-backend runs and frozen. Final separated_fraction:
// separation2d 0.8708 at scale 2, 0.9587 at full scale; separation3d 0.0 at
// scale 2 (extrema -0.46/0.56), 0.7611 at full scale. Coarsening doubles eps
// at a fixed end time, so the scale-2 3D run stops at a quarter of the
// full-scale T/eps^2 and has not separated yet; no threshold fixes that.
const SEPARATED_FRACTION_MIN: f64 = 0.85;

#[test]
fn c07_phase_separation() {
    let _g = serial();
    let mut cells = Vec::new();
    let mut pass = true;
    for name in ["separation2d", "separation3d"] {
        let rows = diagnostics_of(&preset(name).unwrap().to_config(2).unwrap());
        let last = rows.last().unwrap();
        let ok = last.separated_fraction >= SEPARATED_FRACTION_MIN
            && last.min <= -0.9
            && last.max >= 0.9;
        pass &= ok;
        cells.push(format!(
            "{name}: fraction {:.4}, min {:.4}, max {:.4}",
            last.separated_fraction, last.min, last.max
        ));
    }
    report(
        7,
        "separation presets reach pure phases (scale 2)",
        pass,
        &cells.join("; "),
    );
    assert!(pass);
}

#[test]
fn c08_stencil_speedup() {
    let _g = serial();
    let cfg = preset("circle2d").unwrap().to_config(1).unwrap();
    let reference = time_backend(&cfg, Backend::Reference, 2).unwrap();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(2)
        .build()
        .unwrap();
    let stencil = pool
        .install(|| time_backend(&cfg, Backend::Stencil, 2))
        .unwrap();
    let ratio = reference / stencil;
    let cores = std::thread::available_parallelism().map_or(1, |n| n.get());
    let pass = ratio >= 5.0;
    report(
        8,
        "stencil >= 5x faster than reference, circle2d full scale, 2 threads",
        pass,
        &format!(
            "reference {reference:.3}s, stencil {stencil:.3}s, speedup {ratio:.2}x ({cores} core(s) available)"
        ),
    );
    assert!(pass);
}

#[test]
fn c09_determinism_across_threads() {
    let _g = serial();
    let final_bytes = |cfg: &RunConfig, threads: usize| -> Vec<u8> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        pool.install(|| {
            let report = run::<f64, _>(cfg, |_| Ok(())).unwrap();
            encode(&report.final_field, DumpFormat::Binary)
        })
    };
    let mut mismatches = Vec::new();
    for p in &PRESETS {
        let cfg = p.to_config(2).unwrap();
        let first = final_bytes(&cfg, 1);
        for threads in [1, 2, 4] {
            if final_bytes(&cfg, threads) != first {
                mismatches.push(format!("{}@{threads}", p.name));
            }
        }
    }
    let mut cfg = preset("separation2d").unwrap().to_config(2).unwrap();
    cfg.precision = allencahn_core::Precision::F32;
    let f32_run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        pool.install(|| {
            encode(
                &run::<f32, _>(&cfg, |_| Ok(())).unwrap().final_field,
                DumpFormat::Binary,
            )
        })
    };
    if f32_run(1) != f32_run(3) {
        mismatches.push("separation2d/f32".into());
    }
    let pass = mismatches.is_empty();
    report(
        9,
        "bitwise-identical final dumps across repeats and 1/2/4 threads",
        pass,
        &format!("12 presets at scale 2 (f64) + separation2d f32; mismatches: {mismatches:?}"),
    );
    assert!(pass);
}

#[test]
fn c10_quadratic_laplacian() {
    let _g = serial();
    let mut worst: f64 = 0.0;
    for (spec, expected) in [
        (GridSpec::unit_square(64).unwrap(), 4.0),
        (
            GridSpec::new(&[(-1.0, 1.0); 3], &[30, 30, 30]).unwrap(),
            6.0,
        ),
    ] {
        let params = default_params(&spec, 4).unwrap();
        let n = spec.n().to_vec();
        let mut interior = Vec::with_capacity(spec.interior_len());
        let mut coords = vec![0usize; spec.dim()];
        for _ in 0..spec.interior_len() {
            interior.push(
                coords
                    .iter()
                    .enumerate()
                    .map(|(axis, &i)| spec.center(axis, i).powi(2))
                    .sum::<f64>(),
            );
            for axis in (0..spec.dim()).rev() {
                coords[axis] += 1;
                if coords[axis] < n[axis] {
                    break;
                }
                coords[axis] = 0;
            }
        }
        let field = ScalarField::from_interior(spec, &interior).unwrap();
        let kernel = StencilKernel::new(&params);
        let conv = conv_valid(&spec, field.as_slice(), &kernel);
        let reference = allencahn_core::stepper::laplacian_ref(&field);
        for (flat, (&c, &r)) in conv.iter().zip(&reference).enumerate() {
            let mut rest = flat;
            let mut away = true;
            for axis in (0..spec.dim()).rev() {
                let i = rest % n[axis];
                rest /= n[axis];
                away &= i > 0 && i + 1 < n[axis];
            }
            if away {
                worst = worst.max((c / params.dt() - expected).abs());
                worst = worst.max((r - expected).abs());
            }
        }
    }
    let pass = worst <= 1e-9;
    report(
        10,
        "Laplacian of a quadratic equals 2*dim away from the boundary",
        pass,
        &format!("max deviation {worst:.2e} (2D 64^2, 3D 30^3; stencil and reference)"),
    );
    assert!(pass);
}
