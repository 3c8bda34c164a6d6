//! Run configuration files.
//!
//! A config file is flat TOML. Every key is optional; a `preset` supplies
//! the baseline and the remaining keys override it. Without a preset, `n`,
//! `steps` and `init` are required. Example:
//!
//! ```toml
//! preset = "circle2d"
//! scale = 2
//! m = 6
//! backend = "reference"
//! diagnostics_stride = 50
//! ```
//!
//! Keys: `preset`, `scale`, `n` (array of 2 or 3 counts), `bounds` (array of
//! `[lo, hi]` pairs), `m`, `dt`, `steps`, `init` (circle, sphere, dumbbell,
//! star, torus, maze, random), `r0`, `r1`, `r2`, `amplitude`, `seed`,
//! `star_branch` (as-printed, origin), `backend` (reference, stencil,
//! stencil-padcopy), `precision` (f32, f64), `diagnostics_stride`,
//! `snapshot_stride`.

use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::init::{InitialCondition, StarBranch};
use crate::params::{default_m, Backend, RunConfig, SchemeParams};
use crate::preset::{preset, scaled_steps, SEPARATION_SEED};
use crate::real::Precision;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BranchKey {
    AsPrinted,
    Origin,
}

impl From<BranchKey> for StarBranch {
    fn from(b: BranchKey) -> Self {
        match b {
            BranchKey::AsPrinted => StarBranch::AsPrinted,
            BranchKey::Origin => StarBranch::Origin,
        }
    }
}

/// Raw, possibly partial configuration. Later layers win in [`merge`].
///
/// [`merge`]: ConfigFile::merge
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub preset: Option<String>,
    pub scale: Option<usize>,
    pub n: Option<Vec<usize>>,
    pub bounds: Option<Vec<(f64, f64)>>,
    pub m: Option<u32>,
    pub dt: Option<f64>,
    pub steps: Option<usize>,
    pub init: Option<String>,
    pub r0: Option<f64>,
    pub r1: Option<f64>,
    pub r2: Option<f64>,
    pub amplitude: Option<f64>,
    pub seed: Option<u64>,
    pub star_branch: Option<BranchKey>,
    pub backend: Option<Backend>,
    pub precision: Option<Precision>,
    pub diagnostics_stride: Option<usize>,
    pub snapshot_stride: Option<usize>,
}

macro_rules! overlay {
    ($self:ident, $other:ident; $($field:ident),*) => {
        $( if $other.$field.is_some() { $self.$field = $other.$field; } )*
    };
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// Overlays every key set in `other`.
    pub fn merge(mut self, other: ConfigFile) -> Self {
        overlay!(self, other; preset, scale, n, bounds, m, dt, steps, init, r0, r1, r2,
            amplitude, seed, star_branch, backend, precision, diagnostics_stride,
            snapshot_stride);
        self
    }

    pub fn resolve(&self) -> Result<RunConfig> {
        let base = self.preset.as_deref().map(preset).transpose()?;
        let n = match (&self.n, base) {
            (Some(n), _) => n.clone(),
            (None, Some(p)) => p.n.to_vec(),
            (None, None) => return Err(missing("n")),
        };
        let bounds = match (&self.bounds, base) {
            (Some(b), _) => b.clone(),
            (None, Some(p)) if p.n.len() == n.len() => p.bounds.to_vec(),
            _ => vec![(0.0, 1.0); n.len()],
        };
        let scale = self.scale.unwrap_or(1);
        if scale == 0 {
            return Err(Error::Config("scale must be at least 1".into()));
        }
        let grid = GridSpec::new(&bounds, &n)?.coarsened(scale)?;
        let m = self
            .m
            .or(base.map(|p| p.m))
            .unwrap_or_else(|| default_m(grid.dim()));
        let steps = self
            .steps
            .or(base.map(|p| p.iterations))
            .ok_or_else(|| missing("steps"))?;
        let init = self.initial_condition(base.map(|p| p.init))?;
        let mut cfg = RunConfig::new(grid, m, init, scaled_steps(steps, scale))?;
        if let Some(dt) = self.dt {
            cfg.params = SchemeParams::with_dt(&grid, m, dt * (scale * scale) as f64)?;
        }
        if let Some(b) = self.backend {
            cfg.backend = b;
        }
        if let Some(p) = self.precision {
            cfg.precision = p;
        }
        if let Some(s) = self.diagnostics_stride {
            cfg.diagnostics_stride = s;
        }
        cfg.snapshot_stride = self.snapshot_stride;
        cfg.validate()?;
        Ok(cfg)
    }

    fn initial_condition(&self, base: Option<InitialCondition>) -> Result<InitialCondition> {
        let name = match (&self.init, base) {
            (Some(name), _) => name.as_str(),
            (None, Some(b)) => b.name(),
            (None, None) => return Err(missing("init")),
        };
        // Shape parameters fall back to the base shape when it has the same
        // family, then to the published defaults.
        let same = base.filter(|b| b.name() == name);
        let (b_r0, b_r1, b_r2, b_amp, b_seed, b_branch) = match same {
            Some(InitialCondition::Circle { r0 })
            | Some(InitialCondition::Sphere { r0 })
            | Some(InitialCondition::Dumbbell { r0 }) => (Some(r0), None, None, None, None, None),
            Some(InitialCondition::Torus { r1, r2 }) => {
                (None, Some(r1), Some(r2), None, None, None)
            }
            Some(InitialCondition::Random { amplitude, seed }) => {
                (None, None, None, Some(amplitude), Some(seed), None)
            }
            Some(InitialCondition::Star { branch }) => (None, None, None, None, None, Some(branch)),
            _ => (None, None, None, None, None, None),
        };
        let r0 = self.r0.or(b_r0).unwrap_or(0.25);
        Ok(match name {
            "circle" => InitialCondition::Circle { r0 },
            "sphere" => InitialCondition::Sphere { r0 },
            "dumbbell" => InitialCondition::Dumbbell { r0: self.r0.or(b_r0).unwrap_or(0.2) },
            "star" => InitialCondition::Star {
                branch: self.star_branch.map(Into::into).or(b_branch).unwrap_or_default(),
            },
            "torus" => InitialCondition::Torus {
                r1: self.r1.or(b_r1).unwrap_or(0.4),
                r2: self.r2.or(b_r2).unwrap_or(0.3),
            },
            "maze" => InitialCondition::Maze,
            "random" | "separation" => InitialCondition::Random {
                amplitude: self.amplitude.or(b_amp).unwrap_or(0.1),
                seed: self.seed.or(b_seed).unwrap_or(SEPARATION_SEED),
            },
            other => {
                return Err(Error::Config(format!(
                    "unknown init `{other}` (expected circle, sphere, dumbbell, star, torus, maze or random)"
                )))
            }
        })
    }
}

fn missing(key: &str) -> Error {
    Error::Config(format!("`{key}` is required when no preset is given"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_with_overrides() {
        let cfg = ConfigFile::parse(
            r#"
            preset = "circle2d"
            scale = 2
            m = 6
            backend = "reference"
            diagnostics_stride = 50
            "#,
        )
        .unwrap()
        .resolve()
        .unwrap();
        assert_eq!(cfg.grid.n(), &[100, 100]);
        assert_eq!(cfg.n_steps, 3001);
        assert_eq!(cfg.params.m(), 6);
        assert_eq!(cfg.backend, Backend::Reference);
        assert_eq!(cfg.diagnostics_stride, 50);
        assert_eq!(cfg.init, InitialCondition::Circle { r0: 0.25 });
    }

    #[test]
    fn standalone_config() {
        let cfg = ConfigFile::parse(
            r#"
            n = [40, 20]
            bounds = [[0.0, 2.0], [0.0, 1.0]]
            steps = 10
            init = "torus"
            r1 = 0.35
            precision = "f32"
            snapshot_stride = 5
            "#,
        )
        .unwrap()
        .resolve()
        .unwrap();
        assert_eq!(cfg.grid.n(), &[40, 20]);
        assert_eq!(cfg.params.m(), 10);
        assert_eq!(cfg.init, InitialCondition::Torus { r1: 0.35, r2: 0.3 });
        assert_eq!(cfg.precision, Precision::F32);
        assert_eq!(cfg.snapshot_stride, Some(5));
    }

    #[test]
    fn shape_overrides_keep_preset_parameters() {
        let file = ConfigFile {
            preset: Some("separation3d".into()),
            amplitude: Some(0.05),
            ..Default::default()
        };
        let cfg = file.resolve().unwrap();
        assert_eq!(
            cfg.init,
            InitialCondition::Random {
                amplitude: 0.05,
                seed: SEPARATION_SEED
            }
        );
    }

    #[test]
    fn merge_prefers_later_layer() {
        let a = ConfigFile {
            preset: Some("star2d".into()),
            m: Some(4),
            ..Default::default()
        };
        let b = ConfigFile {
            m: Some(8),
            scale: Some(4),
            ..Default::default()
        };
        let merged = a.merge(b);
        assert_eq!(
            (merged.m, merged.scale, merged.preset.as_deref()),
            (Some(8), Some(4), Some("star2d"))
        );
    }

    #[test]
    fn user_dt_goes_through_the_stability_guard() {
        let file = ConfigFile {
            n: Some(vec![10, 10, 10]),
            steps: Some(1),
            init: Some("sphere".into()),
            dt: Some(0.1 * 0.1),
            ..Default::default()
        };
        assert!(matches!(file.resolve(), Err(Error::Config(_))));
    }

    #[test]
    fn errors() {
        assert!(matches!(
            ConfigFile::parse("nope = 1"),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            ConfigFile::parse("backend = \"gpu\""),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            ConfigFile::default().resolve(),
            Err(Error::Config(_))
        ));
        let file = ConfigFile {
            preset: Some("nope".into()),
            ..Default::default()
        };
        assert!(matches!(file.resolve(), Err(Error::UnknownPreset { .. })));
        let file = ConfigFile {
            preset: Some("circle2d".into()),
            steps: Some(0),
            ..Default::default()
        };
        assert!(file.resolve().is_err());
        let file = ConfigFile {
            preset: Some("circle2d".into()),
            init: Some("sphere".into()),
            ..Default::default()
        };
        assert!(matches!(file.resolve(), Err(Error::Dimension(_))));
    }
}
