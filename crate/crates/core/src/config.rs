//! Flat `key = value` run configuration.
//!
//! ```text
//! # solitary wave, c = 0.1
//! scheme = "LICN"
//! example = "single_soliton"
//! c = 0.1
//! ```
//!
//! Values may be quoted; numbers accept a simple fraction such as `1/6`;
//! lists (`snapshot_times`, `waves`) are comma separated, with each wave
//! written as `c:x`. Every key left out falls back to the chosen example's
//! preset.

use std::fmt::Write as _;

use crate::error::{Result, RlwError};
use crate::experiments::{ExperimentSpec, InitialCondition};
use crate::grid::PeriodicGrid;
use crate::schemes::{NonlinearSolveConfig, SchemeId};

pub const KEYS: &[&str] = &[
    "scheme",
    "example",
    "c",
    "x0",
    "waves",
    "u0",
    "d",
    "a",
    "sigma",
    "gamma",
    "x_left",
    "x_right",
    "n_cells",
    "h",
    "tau",
    "t_end",
    "report_every",
    "snapshot_times",
    "outdir",
    "nl_tol",
    "nl_max_iter",
    "ic_file",
];

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunConfig {
    pub scheme: Option<SchemeId>,
    pub example: Option<String>,
    pub c: Option<f64>,
    pub x0: Option<f64>,
    pub waves: Option<Vec<(f64, f64)>>,
    pub u0: Option<f64>,
    pub d: Option<f64>,
    pub a: Option<f64>,
    pub sigma: Option<f64>,
    pub gamma: Option<f64>,
    pub x_left: Option<f64>,
    pub x_right: Option<f64>,
    pub n_cells: Option<usize>,
    pub h: Option<f64>,
    pub tau: Option<f64>,
    pub t_end: Option<f64>,
    /// Time between error-norm evaluations.
    pub report_every: Option<f64>,
    pub snapshot_times: Option<Vec<f64>>,
    pub outdir: Option<String>,
    pub nl_tol: Option<f64>,
    pub nl_max_iter: Option<usize>,
    pub ic_file: Option<String>,
}

const EXAMPLES: &[&str] = &["single_soliton", "three_wave", "maxwellian", "undular_bore", "custom"];

fn unquote(raw: &str) -> &str {
    let v = raw.trim();
    if v.len() >= 2 && ((v.starts_with('"') && v.ends_with('"')) || (v.starts_with('\'') && v.ends_with('\''))) {
        &v[1..v.len() - 1]
    } else {
        v
    }
}

fn parse_number(text: &str) -> std::result::Result<f64, String> {
    let t = text.trim();
    let value = match t.split_once('/') {
        Some((num, den)) => {
            let n: f64 = num.trim().parse().map_err(|_| format!("`{t}` is not a number"))?;
            let d: f64 = den.trim().parse().map_err(|_| format!("`{t}` is not a number"))?;
            n / d
        }
        None => t.parse().map_err(|_| format!("`{t}` is not a number"))?,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(format!("`{t}` is not finite"))
    }
}

fn parse_list(text: &str) -> std::result::Result<Vec<f64>, String> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(parse_number)
        .collect()
}

fn parse_waves(text: &str) -> std::result::Result<Vec<(f64, f64)>, String> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|w| {
            let (c, x) = w
                .split_once(':')
                .ok_or_else(|| format!("wave `{w}` must be written as c:x"))?;
            Ok((parse_number(c)?, parse_number(x)?))
        })
        .collect()
}

fn join<T: std::fmt::Display>(items: impl IntoIterator<Item = T>) -> String {
    items.into_iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", ")
}

impl RunConfig {
    /// Sets one key from its textual value; the same path serves files and
    /// command-line overrides.
    pub fn set(&mut self, key: &str, raw: &str) -> std::result::Result<(), RlwError> {
        self.set_inner(key, raw).map_err(|message| match message {
            SetError::Unknown => RlwError::UnknownKey { key: key.to_string() },
            SetError::Value(m) => RlwError::Parse {
                line: 0,
                message: format!("`{key}`: {m}"),
            },
        })
    }

    fn set_inner(&mut self, key: &str, raw: &str) -> std::result::Result<(), SetError> {
        let value = unquote(raw);
        let num = || parse_number(value).map_err(SetError::Value);
        let int = || {
            value
                .parse::<usize>()
                .map_err(|_| SetError::Value(format!("`{value}` is not a non-negative integer")))
        };
        match key {
            "scheme" => {
                self.scheme = Some(value.parse().map_err(|e: RlwError| SetError::Value(e.to_string()))?)
            }
            "example" => {
                if !EXAMPLES.contains(&value) {
                    return Err(SetError::Value(format!(
                        "unknown example `{value}` (expected one of {})",
                        EXAMPLES.join(", ")
                    )));
                }
                self.example = Some(value.to_string())
            }
            "c" => self.c = Some(num()?),
            "x0" => self.x0 = Some(num()?),
            "waves" => self.waves = Some(parse_waves(value).map_err(SetError::Value)?),
            "u0" => self.u0 = Some(num()?),
            "d" => self.d = Some(num()?),
            "a" => self.a = Some(num()?),
            "sigma" => self.sigma = Some(num()?),
            "gamma" => self.gamma = Some(num()?),
            "x_left" => self.x_left = Some(num()?),
            "x_right" => self.x_right = Some(num()?),
            "n_cells" => self.n_cells = Some(int()?),
            "h" => self.h = Some(num()?),
            "tau" => self.tau = Some(num()?),
            "t_end" => self.t_end = Some(num()?),
            "report_every" => self.report_every = Some(num()?),
            "snapshot_times" => self.snapshot_times = Some(parse_list(value).map_err(SetError::Value)?),
            "outdir" => self.outdir = Some(value.to_string()),
            "nl_tol" => self.nl_tol = Some(num()?),
            "nl_max_iter" => self.nl_max_iter = Some(int()?),
            "ic_file" => self.ic_file = Some(value.to_string()),
            _ => return Err(SetError::Unknown),
        }
        Ok(())
    }

    /// Applies a `key=value` override.
    pub fn apply_override(&mut self, assignment: &str) -> Result<()> {
        let (key, value) = assignment.split_once('=').ok_or_else(|| RlwError::Parse {
            line: 0,
            message: format!("override `{assignment}` must be key=value"),
        })?;
        self.set(key.trim(), value)
    }

    /// Writes the configuration back out; parsing the result gives an equal config.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        if let Some(v) = self.scheme {
            put("scheme", format!("\"{v}\""));
        }
        if let Some(v) = &self.example {
            put("example", format!("\"{v}\""));
        }
        let nums = [
            ("c", self.c),
            ("x0", self.x0),
            ("u0", self.u0),
            ("d", self.d),
            ("a", self.a),
            ("sigma", self.sigma),
            ("gamma", self.gamma),
            ("x_left", self.x_left),
            ("x_right", self.x_right),
            ("h", self.h),
            ("tau", self.tau),
            ("t_end", self.t_end),
            ("report_every", self.report_every),
            ("nl_tol", self.nl_tol),
        ];
        for (k, v) in nums {
            if let Some(v) = v {
                put(k, format!("{v:?}"));
            }
        }
        if let Some(v) = self.n_cells {
            put("n_cells", v.to_string());
        }
        if let Some(v) = self.nl_max_iter {
            put("nl_max_iter", v.to_string());
        }
        if let Some(v) = &self.waves {
            put("waves", format!("\"{}\"", join(v.iter().map(|(c, x)| format!("{c:?}:{x:?}")))));
        }
        if let Some(v) = &self.snapshot_times {
            put("snapshot_times", format!("\"{}\"", join(v.iter().map(|t| format!("{t:?}")))));
        }
        if let Some(v) = &self.outdir {
            put("outdir", format!("\"{v}\""));
        }
        if let Some(v) = &self.ic_file {
            put("ic_file", format!("\"{v}\""));
        }
        out
    }

    pub fn example_name(&self) -> &str {
        self.example.as_deref().unwrap_or("single_soliton")
    }

    /// Resolves the configuration against its example preset. `custom`
    /// needs the initial values from `ic_file`, passed in as `custom_values`.
    pub fn to_spec(&self, custom_values: Option<Vec<f64>>) -> Result<ExperimentSpec> {
        let scheme = self.scheme.unwrap_or(SchemeId::Licn);
        let mut spec = match self.example_name() {
            "single_soliton" => {
                let mut s = ExperimentSpec::single_soliton_table(scheme);
                s.ic = InitialCondition::SingleSoliton {
                    c: self.c.unwrap_or(0.1),
                    x0: self.x0.unwrap_or(0.0),
                };
                s
            }
            "three_wave" => {
                let mut s = ExperimentSpec::three_wave(scheme);
                if let Some(w) = &self.waves {
                    s.ic = InitialCondition::ThreeWave { waves: w.clone() };
                }
                s
            }
            "maxwellian" => ExperimentSpec::maxwellian(scheme, self.sigma.unwrap_or(0.01)),
            "undular_bore" => {
                let mut s = ExperimentSpec::undular_bore(scheme, self.d.unwrap_or(2.0));
                s.ic = InitialCondition::UndularBore {
                    u0: self.u0.unwrap_or(0.1),
                    x0: self.x0.unwrap_or(0.0),
                    d: self.d.unwrap_or(2.0),
                };
                s
            }
            "custom" => {
                let values = custom_values
                    .ok_or_else(|| RlwError::invalid("ic_file", "the custom example needs initial values from ic_file"))?;
                let mut s = ExperimentSpec::single_soliton_table(scheme);
                s.n_cells = values.len();
                s.report_every = 0;
                s.ic = InitialCondition::Custom { values };
                s
            }
            other => return Err(RlwError::invalid("example", format!("unknown example `{other}`"))),
        };

        if let Some(v) = self.a {
            spec.params.a = v;
        }
        if let Some(v) = self.sigma {
            spec.params.sigma = v;
        }
        if let Some(v) = self.gamma {
            spec.params.gamma = v;
        }
        let old_h = (spec.x_right - spec.x_left) / spec.n_cells as f64;
        if let Some(v) = self.x_left {
            spec.x_left = v;
        }
        if let Some(v) = self.x_right {
            spec.x_right = v;
        }
        if let Some(h) = self.h {
            if self.n_cells.is_some() {
                return Err(RlwError::invalid("h", "give either h or n_cells, not both"));
            }
            spec.n_cells = PeriodicGrid::with_spacing(spec.x_left, spec.x_right, h)?.n_cells;
        } else if let Some(n) = self.n_cells {
            spec.n_cells = n;
        } else if self.x_left.is_some() || self.x_right.is_some() {
            if matches!(spec.ic, InitialCondition::Custom { .. }) {
                // the file fixes the node count
            } else {
                spec.n_cells = PeriodicGrid::with_spacing(spec.x_left, spec.x_right, old_h)?.n_cells;
            }
        }
        let old_tau = spec.tau;
        if let Some(v) = self.tau {
            spec.tau = v;
        }
        if !(spec.tau.is_finite() && spec.tau > 0.0) {
            return Err(RlwError::invalid("tau", format!("must be positive, got {}", spec.tau)));
        }
        if let Some(v) = self.t_end {
            spec.t_end = v;
        }
        let interval = match self.report_every {
            Some(r) => Some(r),
            None if spec.report_every > 0 => Some(spec.report_every as f64 * old_tau),
            None => None,
        };
        spec.report_every = match interval {
            Some(r) if !(r.is_finite() && r > 0.0) => {
                return Err(RlwError::invalid("report_every", format!("must be positive, got {r}")))
            }
            Some(r) => ((r / spec.tau).round() as usize).max(1),
            None => 0,
        };
        if let Some(v) = &self.snapshot_times {
            spec.snapshot_times = v.clone();
        }
        spec.snapshot_times.retain(|t| *t <= spec.t_end + 1e-12);
        spec.nl = NonlinearSolveConfig {
            tol: self.nl_tol.unwrap_or(spec.nl.tol),
            max_iter: self.nl_max_iter.unwrap_or(spec.nl.max_iter),
        };
        spec.validate()?;
        Ok(spec)
    }
}

enum SetError {
    Unknown,
    Value(String),
}

/// Parses configuration text; errors carry the 1-based line number.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = strip_comment(raw).trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| RlwError::Parse {
            line,
            message: format!("expected `key = value`, found `{content}`"),
        })?;
        cfg.set(key.trim(), value).map_err(|e| match e {
            RlwError::Parse { message, .. } => RlwError::Parse { line, message },
            other => other,
        })?;
    }
    Ok(cfg)
}

/// Drops a `#` comment that is not inside quotes.
fn strip_comment(line: &str) -> &str {
    let mut quote = None;
    for (i, ch) in line.char_indices() {
        match (ch, quote) {
            ('"' | '\'', None) => quote = Some(ch),
            (c, Some(q)) if c == q => quote = None,
            ('#', None) => return &line[..i],
            _ => {}
        }
    }
    line
}

/// Reads nodal values for the custom example: one value per line, or
/// `x, u` pairs (the last column is used). `#` comments and a non-numeric
/// header line are skipped.
pub fn parse_values(text: &str) -> Result<Vec<f64>> {
    let mut values = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let content = strip_comment(raw).trim();
        if content.is_empty() {
            continue;
        }
        let last = content.rsplit([',', ' ', '\t']).next().unwrap_or(content).trim();
        match parse_number(last) {
            Ok(v) => values.push(v),
            Err(_) if values.is_empty() && idx == 0 => continue,
            Err(message) => return Err(RlwError::Parse { line: idx + 1, message }),
        }
    }
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_fills_table_defaults() {
        let cfg = parse_config("scheme = \"LICN\"\nexample = \"single_soliton\"\nc = 0.1\n").unwrap();
        let spec = cfg.to_spec(None).unwrap();
        assert_eq!(spec.scheme, SchemeId::Licn);
        assert_eq!(spec.tau, 0.1);
        assert_eq!((spec.x_left, spec.x_right), (-40.0, 60.0));
        assert_eq!(spec.n_cells, 800);
        assert_eq!(spec.t_end, 16.0);
        assert_eq!(spec.report_every, 40);
        assert_eq!(spec.params, crate::grid::ModelParams::default());
    }

    #[test]
    fn unknown_key_is_named() {
        let err = parse_config("shceme = LICN").unwrap_err();
        assert_eq!(err, RlwError::UnknownKey { key: "shceme".into() });
        assert!(err.to_string().contains("shceme"));
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = parse_config("# header\nscheme = LIEP\n\ntau = fast\n").unwrap_err();
        assert!(matches!(err, RlwError::Parse { line: 4, .. }), "{err:?}");
        let err = parse_config("scheme LIEP").unwrap_err();
        assert!(matches!(err, RlwError::Parse { line: 1, .. }));
        assert!(parse_config("example = bogus").is_err());
    }

    #[test]
    fn bad_tau_names_key() {
        let cfg = parse_config("tau = -0.1").unwrap();
        let err = cfg.to_spec(None).unwrap_err();
        assert!(matches!(err, RlwError::InvalidParameter { name: "tau", .. }));
    }

    #[test]
    fn serialize_round_trip() {
        let text = "scheme = LILF # trailing\nexample = undular_bore\nsigma = 1/6\ngamma = 1.5\n\
                    waves = \"1:-20, 0.5:15\"\nsnapshot_times = 0, 50, 100\nn_cells = 2000\noutdir = 'out dir'\n";
        let cfg = parse_config(text).unwrap();
        assert_eq!(cfg.sigma, Some(1.0 / 6.0));
        assert_eq!(cfg.waves, Some(vec![(1.0, -20.0), (0.5, 15.0)]));
        let again = parse_config(&cfg.serialize()).unwrap();
        assert_eq!(again, cfg);
    }

    #[test]
    fn overrides_and_grid_changes() {
        let mut cfg = parse_config("example = single_soliton").unwrap();
        cfg.apply_override("h=0.0625").unwrap();
        cfg.apply_override("t_end = 10").unwrap();
        let spec = cfg.to_spec(None).unwrap();
        assert_eq!(spec.n_cells, 1600);
        assert_eq!(spec.t_end, 10.0);
        assert!(cfg.apply_override("nonsense").is_err());
        cfg.apply_override("n_cells=100").unwrap();
        assert!(cfg.to_spec(None).is_err());
    }

    #[test]
    fn custom_needs_values() {
        let cfg = parse_config("example = custom\nx_left = 0\nx_right = 8").unwrap();
        assert!(cfg.to_spec(None).is_err());
        let values = parse_values("x,u\n0, 0.0\n1, 0.5\n2, 1.0\n3, 0.5\n4, 0.0\n5, 0\n6, 0\n7, 0\n").unwrap();
        assert_eq!(values.len(), 8);
        let spec = cfg.to_spec(Some(values)).unwrap();
        assert_eq!(spec.n_cells, 8);
    }
}
