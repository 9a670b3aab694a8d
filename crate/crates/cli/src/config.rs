//! Run configuration files.
//!
//! One `key = value` pair per line, dotted keys, `#` starts a comment.
//! Lists are comma separated. Unknown and repeated keys are errors.
//! See the README for the full key table.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;

use bfamily::equation::Parameters;
use bfamily::initdata::{FourierSeries, InitSpec, RandomModes, SignConstraint};
use bfamily::integrator::{Formulation, StepConfig};
use bfamily::spectral::{Dealias, Grid};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
#[error("{}{key}: {message}", line.map(|l| format!("line {l}: ")).unwrap_or_default())]
pub struct ConfigError {
    pub line: Option<usize>,
    pub key: String,
    pub message: String,
}

/// `(key, default)`; keys without a default are required.
const KEYS: &[(&str, Option<&str>)] = &[
    ("equation.b", None),
    ("equation.c", None),
    ("equation.p", None),
    ("grid.n", None),
    ("grid.dealias", Some("off")),
    ("step.dt", None),
    ("step.t_end", None),
    ("step.formulation", Some("nonlocal-u")),
    ("step.cfl_limit", Some("0.5")),
    ("step.max_value_guard", Some("1e6")),
    ("init.kind", None),
    ("init.offset", Some("0")),
    ("init.cos", Some("")),
    ("init.sin", Some("")),
    ("init.random_modes", Some("0")),
    ("init.random_amplitude", Some("0")),
    ("init.seed", Some("0")),
    ("init.sign", Some("any")),
    ("init.amplitude", Some("1")),
    ("init.center", Some("0.5")),
    ("init.width", Some("0.1")),
    ("init.energy", Some("")),
    ("observe.stride", Some("100")),
    ("observe.frame_stride", Some("1000")),
    ("output.dir", Some("bfamily-out")),
    ("checks.conservation", Some("true")),
    ("checks.drift_tolerance", Some("1e-7")),
    ("checks.sign", Some("true")),
    ("checks.characteristics", Some("false")),
    ("checks.growth", Some("false")),
    ("checks.continuation", Some("false")),
    ("characteristics.seeds", Some("64")),
    ("characteristics.frame_stride", Some("1")),
    ("characteristics.tolerance", Some("1e-5")),
    ("continuation.window", Some("0.0, 0.2")),
    ("continuation.delta", Some("1e-3")),
    ("breaking.threshold", Some("1e3")),
];

#[derive(Debug, Clone, PartialEq)]
pub struct CharacteristicsCheck {
    pub seeds: usize,
    /// Steps between stored frames; trajectories step `2·frame_stride·dt`.
    pub frame_stride: usize,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContinuationCheck {
    pub window: (f64, f64),
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Checks {
    /// Relative drift limit for every invariant the parameters conserve.
    pub drift_tolerance: Option<f64>,
    pub sign: bool,
    pub characteristics: Option<CharacteristicsCheck>,
    pub growth: bool,
    pub continuation: Option<ContinuationCheck>,
    pub breaking_threshold: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub parameters: Parameters,
    pub grid: Grid,
    pub dealias: Dealias,
    pub step: StepConfig,
    pub init: InitSpec,
    pub stride: usize,
    /// Steps between frame files; 0 writes none.
    pub frame_stride: usize,
    pub output_dir: PathBuf,
    pub checks: Checks,
    /// Every key with the value in effect, defaults included.
    pub echo: BTreeMap<String, String>,
}

struct Entries {
    values: BTreeMap<&'static str, (Option<usize>, String)>,
}

impl Entries {
    fn raw(&self, key: &'static str) -> (Option<usize>, &str) {
        let (line, v) = &self.values[key];
        (*line, v.as_str())
    }

    fn err(&self, key: &'static str, message: impl Into<String>) -> ConfigError {
        ConfigError { line: self.values[key].0, key: key.into(), message: message.into() }
    }

    fn get<T: FromStr>(&self, key: &'static str) -> Result<T, ConfigError>
    where
        T::Err: std::fmt::Display,
    {
        let (_, v) = self.raw(key);
        v.parse::<T>().map_err(|e| self.err(key, format!("cannot parse `{v}`: {e}")))
    }

    fn list(&self, key: &'static str) -> Result<Vec<f64>, ConfigError> {
        let (_, v) = self.raw(key);
        if v.is_empty() {
            return Ok(Vec::new());
        }
        v.split(',')
            .map(|s| {
                let s = s.trim();
                s.parse::<f64>().map_err(|e| self.err(key, format!("cannot parse list item `{s}`: {e}")))
            })
            .collect()
    }

    fn optional(&self, key: &'static str) -> Result<Option<f64>, ConfigError> {
        if self.raw(key).1.is_empty() {
            Ok(None)
        } else {
            self.get(key).map(Some)
        }
    }
}

fn parse_bool(v: &str) -> Result<bool, String> {
    match v {
        "true" | "on" | "yes" => Ok(true),
        "false" | "off" | "no" => Ok(false),
        _ => Err(format!("expected true or false, got `{v}`")),
    }
}

fn parse_lines(text: &str) -> Result<Entries, ConfigError> {
    let mut values: BTreeMap<&'static str, (Option<usize>, String)> = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((k, v)) = content.split_once('=') else {
            return Err(ConfigError {
                line: Some(line),
                key: content.into(),
                message: "expected `key = value`".into(),
            });
        };
        let (k, v) = (k.trim(), v.trim());
        let Some(&(key, _)) = KEYS.iter().find(|(name, _)| *name == k) else {
            return Err(ConfigError { line: Some(line), key: k.into(), message: "unknown key".into() });
        };
        if let Some((first, _)) = values.get(key) {
            return Err(ConfigError {
                line: Some(line),
                key: k.into(),
                message: format!("repeated key (first set on line {})", first.unwrap_or(0)),
            });
        }
        values.insert(key, (Some(line), v.to_string()));
    }
    for &(key, default) in KEYS {
        if values.contains_key(key) {
            continue;
        }
        match default {
            Some(d) => {
                values.insert(key, (None, d.to_string()));
            }
            None => {
                return Err(ConfigError { line: None, key: key.into(), message: "required key is missing".into() })
            }
        }
    }
    Ok(Entries { values })
}

fn init_spec(e: &Entries) -> Result<InitSpec, ConfigError> {
    let series = || -> Result<FourierSeries, ConfigError> {
        let modes: usize = e.get("init.random_modes")?;
        let amplitude: f64 = e.get("init.random_amplitude")?;
        let random = (modes > 0 && amplitude != 0.0)
            .then(|| -> Result<RandomModes, ConfigError> {
                Ok(RandomModes { count: modes, amplitude, seed: e.get("init.seed")? })
            })
            .transpose()?;
        Ok(FourierSeries {
            offset: e.get("init.offset")?,
            cos: e.list("init.cos")?,
            sin: e.list("init.sin")?,
            random,
        })
    };
    let kind = e.raw("init.kind").1;
    Ok(match kind {
        "fourier-modes" => InitSpec::FourierModes(series()?),
        "momentum-first" => InitSpec::MomentumFirst {
            momentum: series()?,
            sign: e.get::<SignConstraint>("init.sign")?,
        },
        "gaussian-bump-periodic" => {
            let width: f64 = e.get("init.width")?;
            if !(width > 0.0) {
                return Err(e.err("init.width", "must be positive"));
            }
            let energy = e.optional("init.energy")?;
            if energy.is_some_and(|v| !(v > 0.0)) {
                return Err(e.err("init.energy", "must be positive"));
            }
            InitSpec::GaussianBump {
                offset: e.get("init.offset")?,
                amplitude: e.get("init.amplitude")?,
                center: e.get("init.center")?,
                width,
                energy,
            }
        }
        "peakon-profile" => {
            InitSpec::PeakonProfile { amplitude: e.get("init.amplitude")?, center: e.get("init.center")? }
        }
        other => {
            return Err(e.err(
                "init.kind",
                format!(
                    "unknown kind `{other}`; expected fourier-modes, momentum-first, gaussian-bump-periodic or peakon-profile"
                ),
            ))
        }
    })
}

fn positive_count(e: &Entries, key: &'static str) -> Result<usize, ConfigError> {
    let v: usize = e.get(key)?;
    if v == 0 {
        return Err(e.err(key, "must be at least 1"));
    }
    Ok(v)
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let e = parse_lines(text)?;
        let parameters =
            Parameters::new(e.get("equation.b")?, e.get("equation.c")?, e.get("equation.p")?)
                .map_err(|err| {
                    let key = match err {
                        bfamily::equation::ParameterError::NegativeB(_) => "equation.b",
                        bfamily::equation::ParameterError::NonPositiveC(_) => "equation.c",
                        bfamily::equation::ParameterError::ZeroP(_) => "equation.p",
                    };
                    e.err(key, err.to_string())
                })?;
        let grid = Grid::new(e.get("grid.n")?).map_err(|err| e.err("grid.n", err.to_string()))?;
        let dealias = match e.raw("grid.dealias").1 {
            "off" => Dealias::Off,
            "padded" => Dealias::Padded,
            other => return Err(e.err("grid.dealias", format!("expected off or padded, got `{other}`"))),
        };
        let formulation: Formulation = e.get("step.formulation")?;
        let step = StepConfig::new(e.get("step.dt")?, e.get("step.t_end")?)
            .map_err(|err| {
                let key = match err {
                    bfamily::integrator::ConfigError::TEnd(_) => "step.t_end",
                    _ => "step.dt",
                };
                e.err(key, err.to_string())
            })?
            .with_formulation(formulation)
            .with_cfl_limit(e.get("step.cfl_limit")?)
            .map_err(|err| e.err("step.cfl_limit", err.to_string()))?
            .with_guard(e.get("step.max_value_guard")?)
            .map_err(|err| e.err("step.max_value_guard", err.to_string()))?;
        let init = init_spec(&e)?;

        let flag = |key: &'static str| parse_bool(e.raw(key).1).map_err(|m| e.err(key, m));
        let drift_tolerance: f64 = e.get("checks.drift_tolerance")?;
        if !(drift_tolerance > 0.0) {
            return Err(e.err("checks.drift_tolerance", "must be positive"));
        }
        let characteristics = if flag("checks.characteristics")? {
            let tolerance: f64 = e.get("characteristics.tolerance")?;
            if !(tolerance > 0.0) {
                return Err(e.err("characteristics.tolerance", "must be positive"));
            }
            Some(CharacteristicsCheck {
                seeds: positive_count(&e, "characteristics.seeds")?,
                frame_stride: positive_count(&e, "characteristics.frame_stride")?,
                tolerance,
            })
        } else {
            None
        };
        let growth = flag("checks.growth")?;
        if growth && !parameters.is_global_regime() {
            return Err(e.err("checks.growth", "the growth check needs equation.b = 0 and equation.p = 1"));
        }
        let continuation = if flag("checks.continuation")? {
            if !(parameters.is_h1() || parameters.is_h2()) {
                return Err(e.err(
                    "checks.continuation",
                    "the continuation probe needs p = 1 with b <= 3c, or b = p*c",
                ));
            }
            let w = e.list("continuation.window")?;
            if w.len() != 2 || !(0.0 <= w[0] && w[0] < w[1] && w[1] < 1.0) {
                return Err(e.err("continuation.window", "expected `a, b` with 0 <= a < b < 1"));
            }
            let delta: f64 = e.get("continuation.delta")?;
            if !(delta > 0.0) {
                return Err(e.err("continuation.delta", "must be positive"));
            }
            Some(ContinuationCheck { window: (w[0], w[1]), delta })
        } else {
            None
        };
        let breaking_threshold: f64 = e.get("breaking.threshold")?;
        if !(breaking_threshold > 0.0) {
            return Err(e.err("breaking.threshold", "must be positive"));
        }
        let checks = Checks {
            drift_tolerance: flag("checks.conservation")?.then_some(drift_tolerance),
            sign: flag("checks.sign")?,
            characteristics,
            growth,
            continuation,
            breaking_threshold,
        };

        let echo = e.values.iter().map(|(k, (_, v))| (k.to_string(), v.clone())).collect();
        Ok(Self {
            parameters,
            grid,
            dealias,
            step,
            init,
            stride: positive_count(&e, "observe.stride")?,
            frame_stride: e.get("observe.frame_stride")?,
            output_dir: PathBuf::from(e.raw("output.dir").1),
            checks,
            echo,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "equation.b = 2\nequation.c = 1\nequation.p = 1\ngrid.n = 64\nstep.dt = 1e-3\nstep.t_end = 0.1\ninit.kind = fourier-modes\n";

    #[test]
    fn minimal_config_fills_defaults() {
        let cfg = RunConfig::parse(MINIMAL).unwrap();
        assert_eq!(cfg.parameters, Parameters::camassa_holm());
        assert_eq!(cfg.grid.len(), 64);
        assert_eq!(cfg.stride, 100);
        assert_eq!(cfg.checks.drift_tolerance, Some(1e-7));
        assert!(cfg.checks.characteristics.is_none());
        assert_eq!(cfg.echo["init.sign"], "any");
        assert_eq!(cfg.echo.len(), KEYS.len());
        assert!(matches!(cfg.init, InitSpec::FourierModes(ref s) if s.offset == 0.0 && s.cos.is_empty()));
    }

    #[test]
    fn comments_and_lists() {
        let text = format!("{MINIMAL}# full-line comment\ninit.cos = 0.1, 0.02  # trailing\ninit.offset = 0.2\n");
        let cfg = RunConfig::parse(&text).unwrap();
        match cfg.init {
            InitSpec::FourierModes(s) => {
                assert_eq!(s.cos, vec![0.1, 0.02]);
                assert_eq!(s.offset, 0.2);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn errors_name_line_and_key() {
        let bad_b = MINIMAL.replace("equation.b = 2", "equation.b = -1");
        let err = RunConfig::parse(&bad_b).unwrap_err();
        assert_eq!((err.line, err.key.as_str()), (Some(1), "equation.b"));
        assert!(err.to_string().starts_with("line 1: equation.b:"));

        let err = RunConfig::parse(&format!("{MINIMAL}grid.m = 3\n")).unwrap_err();
        assert_eq!(err.message, "unknown key");
        let err = RunConfig::parse(&format!("{MINIMAL}grid.n = 32\n")).unwrap_err();
        assert!(err.message.contains("repeated"));
        let err = RunConfig::parse(&MINIMAL.replace("grid.n = 64\n", "")).unwrap_err();
        assert_eq!((err.line, err.key.as_str()), (None, "grid.n"));
        let err = RunConfig::parse(&MINIMAL.replace("grid.n = 64", "grid.n = 63")).unwrap_err();
        assert_eq!(err.key, "grid.n");
        let err = RunConfig::parse(&format!("{MINIMAL}just words\n")).unwrap_err();
        assert_eq!(err.line, Some(8));
    }

    #[test]
    fn check_toggles_validate_regime() {
        let err = RunConfig::parse(&format!("{MINIMAL}checks.growth = true\n")).unwrap_err();
        assert_eq!(err.key, "checks.growth");
        let global = MINIMAL.replace("equation.b = 2", "equation.b = 0");
        assert!(RunConfig::parse(&format!("{global}checks.growth = true\n")).unwrap().checks.growth);
        let h0 = MINIMAL.replace("equation.b = 2", "equation.b = 5");
        assert!(RunConfig::parse(&format!("{h0}checks.continuation = true\n")).is_err());
        let err = RunConfig::parse(&format!("{MINIMAL}checks.continuation = on\ncontinuation.window = 0.5, 0.2\n"))
            .unwrap_err();
        assert_eq!(err.key, "continuation.window");
    }

    #[test]
    fn init_kinds() {
        let with = |extra: &str| RunConfig::parse(&MINIMAL.replace("init.kind = fourier-modes\n", extra));
        let m = with("init.kind = momentum-first\ninit.offset = 1\ninit.cos = 0.5\ninit.sign = nonnegative\n").unwrap();
        assert!(matches!(m.init, InitSpec::MomentumFirst { sign: SignConstraint::NonNegative, .. }));
        let g = with("init.kind = gaussian-bump-periodic\ninit.energy = 0.5\n").unwrap();
        assert!(matches!(g.init, InitSpec::GaussianBump { energy: Some(e), .. } if e == 0.5));
        assert!(with("init.kind = gaussian-bump-periodic\ninit.width = 0\n").is_err());
        assert!(matches!(with("init.kind = peakon-profile\n").unwrap().init, InitSpec::PeakonProfile { .. }));
        assert_eq!(with("init.kind = soliton\n").unwrap_err().key, "init.kind");
        let r = with("init.kind = fourier-modes\ninit.random_modes = 4\ninit.random_amplitude = 0.1\ninit.seed = 9\n").unwrap();
        assert!(matches!(r.init, InitSpec::FourierModes(FourierSeries { random: Some(RandomModes { count: 4, seed: 9, .. }), .. })));
    }
}
