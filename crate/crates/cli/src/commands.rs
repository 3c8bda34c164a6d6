use std::fs;
use std::path::Path;

use allencahn_core::config::ConfigFile;
use allencahn_core::dump::{write_dump, DumpFormat};
use allencahn_core::harness::{bench_preset, table3_row, BenchTable};
use allencahn_core::output::{
    write_diagnostics, write_snapshot, write_snapshot_pair, DiagnosticsWriter,
};
use allencahn_core::params::Backend;
use allencahn_core::preset::{preset, presets_for_dim, PRESETS};
use allencahn_core::{run_dual_with, Error, Precision, Real, Result, RunConfig, RunReport};

use crate::{BenchArgs, RunArgs, Table3Args};

fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

fn resolve_run(args: &RunArgs) -> Result<RunConfig> {
    let file = match &args.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    let flags = ConfigFile {
        preset: args.preset.clone(),
        scale: args.common.scale,
        precision: args.common.precision,
        steps: args.steps,
        m: args.m,
        seed: args.seed,
        diagnostics_stride: args.diagnostics_stride,
        snapshot_stride: args.snapshots,
        backend: (args.backends.len() == 1).then(|| args.backends[0]),
        ..ConfigFile::default()
    };
    let merged = file.merge(flags);
    if merged.preset.is_none() && merged.n.is_none() {
        return Err(Error::Config("give --preset or a --config file".into()));
    }
    merged.resolve()
}

pub fn run(args: RunArgs) -> Result<()> {
    let cfg = resolve_run(&args)?;
    let label = args.preset.clone().unwrap_or_else(|| "custom".into());
    create_dir(&args.out)?;
    match args.backends.len() {
        0 | 1 => match cfg.precision {
            Precision::F64 => run_single::<f64>(&cfg, &args, &label),
            Precision::F32 => run_single::<f32>(&cfg, &args, &label),
        },
        2 => match cfg.precision {
            Precision::F64 => run_pair::<f64>(&cfg, &args, &label),
            Precision::F32 => run_pair::<f32>(&cfg, &args, &label),
        },
        n => Err(Error::Config(format!(
            "at most two --backend flags, got {n}"
        ))),
    }
}

fn dump_format(args: &RunArgs) -> DumpFormat {
    if args.text_dump {
        DumpFormat::Text
    } else {
        DumpFormat::Binary
    }
}

fn summary<T: Real>(label: &str, cfg: &RunConfig, report: &RunReport<T>) {
    let last = report.last();
    let radius = last.radius.map_or("-".to_string(), |r| format!("{r:.6}"));
    println!(
        "{label}: backend={} precision={} grid={:?} steps={} T={:.6} wall={:.3}s steps/s={:.1} \
         min={:.6} max={:.6} energy={:.6e} radius={radius}",
        report.backend,
        report.precision,
        cfg.grid.n(),
        report.n_steps,
        cfg.final_time(),
        report.wall_seconds,
        report.steps_per_second(),
        last.min,
        last.max,
        last.energy,
    );
}

fn run_single<T: Real>(cfg: &RunConfig, args: &RunArgs, label: &str) -> Result<()> {
    let snap_dir = args.out.join("snapshots");
    if cfg.snapshot_stride.is_some() {
        create_dir(&snap_dir)?;
    }
    let mut csv = DiagnosticsWriter::create(&args.out.join("diagnostics.csv"))?;
    let report = allencahn_core::run::<T, _>(cfg, |ev| {
        csv.write(ev.diagnostics)?;
        if ev.snapshot {
            write_snapshot_pair(ev.field, &snap_dir, &format!("step{:07}", ev.step))?;
        }
        Ok(())
    })?;
    csv.finish()?;
    write_dump(
        &report.final_field,
        &args.out.join("final.field"),
        dump_format(args),
    )?;
    write_snapshot(&report.final_field, &args.out.join("final.pgm"))?;
    summary(label, cfg, &report);
    Ok(())
}

fn run_pair<T: Real>(cfg: &RunConfig, args: &RunArgs, label: &str) -> Result<()> {
    let (a, b) = (args.backends[0], args.backends[1]);
    if a == b {
        return Err(Error::Config("the two --backend flags must differ".into()));
    }
    let dual = run_dual_with::<T, T>(cfg, a, b, 1)?;
    for report in [&dual.a, &dual.b] {
        let name = report.backend.as_str();
        write_diagnostics(
            &args.out.join(format!("diagnostics_{name}.csv")),
            &report.diagnostics,
        )?;
        write_dump(
            &report.final_field,
            &args.out.join(format!("final_{name}.field")),
            dump_format(args),
        )?;
        summary(label, cfg, report);
    }
    println!(
        "{label}: Err({a} vs {b}) = {:.3e}  max|diff| = {:.3e}",
        dual.err, dual.max_abs_diff
    );
    Ok(())
}

pub fn bench(args: BenchArgs) -> Result<()> {
    let presets = if args.presets.is_empty() {
        if args.dim != 2 && args.dim != 3 {
            return Err(Error::Config(format!(
                "--dim must be 2 or 3, got {}",
                args.dim
            )));
        }
        presets_for_dim(args.dim).collect()
    } else {
        args.presets
            .iter()
            .map(|name| preset(name))
            .collect::<Result<Vec<_>>>()?
    };
    let backends = if args.backends.is_empty() {
        Backend::ALL.to_vec()
    } else {
        args.backends.clone()
    };
    let scale = args.common.scale.unwrap_or(1);
    let precision = args.common.precision.unwrap_or(Precision::F64);
    let mut table = BenchTable::default();
    for p in presets {
        let recs = bench_preset(p, scale, precision, &backends, args.reps)?;
        for r in &recs {
            eprintln!(
                "{} {}: {:.3}s ({:.1} steps/s)",
                r.preset, r.backend, r.wall_seconds, r.steps_per_second
            );
        }
        table.records.extend(recs);
    }
    println!(
        "runtime (s), best of {}, scale {scale}, {precision}; parentheses: ratio to the fastest backend",
        args.reps
    );
    print!("{}", table.render_text());
    if let Some(path) = &args.csv {
        let file = fs::File::create(path).map_err(|e| Error::Io {
            path: path.clone(),
            source: e,
        })?;
        table.write_csv(file)?;
    }
    Ok(())
}

fn parse_pair(s: &str) -> Result<(Precision, Precision)> {
    let bad = || Error::Config(format!("precision pair must look like f64/f32, got `{s}`"));
    let (a, b) = s.split_once('/').ok_or_else(bad)?;
    Ok((a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?))
}

pub fn table3(args: Table3Args) -> Result<()> {
    if args.dim != 2 && args.dim != 3 {
        return Err(Error::Config(format!(
            "--dim must be 2 or 3, got {}",
            args.dim
        )));
    }
    let pair = parse_pair(&args.precision_pair)?;
    let row = table3_row(
        presets_for_dim(args.dim),
        args.scale.unwrap_or(1),
        pair,
        args.err_stride,
    )?;
    print!("{}", row.render_text());
    Ok(())
}

pub fn list_presets() {
    for p in &PRESETS {
        println!("{p}");
    }
}
