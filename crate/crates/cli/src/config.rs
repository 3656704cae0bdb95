//! Run configuration: a plain `key = value` file, `--set` overrides and
//! per-command defaults, resolved into one ordered map.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};

use clap::ValueEnum;

use crate::error::{invalid, CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    CpbLevels,
    CpbDispersion,
    CpbAnharmonicity,
    JunctionLevels,
    JunctionCurrent,
    JunctionParity,
    BasisMap,
    OracleCompare,
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = self.to_possible_value().expect("no skipped variants");
        f.write_str(name.get_name())
    }
}

const CPB_KEYS: &[(&str, &str)] = &[
    ("e_c", "1"),
    ("ej_over_ec", "50"),
    ("n_g", "0"),
    ("phi_0", "1"),
    ("n_levels", "5"),
];

const JUNCTION_KEYS: &[(&str, &str)] = &[
    ("t", "1"),
    ("mu_s", "8"),
    ("delta", "2"),
    ("g", "1"),
    ("m", "4"),
    ("l_f", "2"),
    ("lambda", "0"),
    ("temperature", "0"),
    ("root_grid", "128"),
];

/// Parameters whose values must be whole numbers.
pub const INTEGER_KEYS: &[&str] = &[
    "n_levels",
    "m",
    "l_f",
    "root_grid",
    "n_phi",
    "channel_l",
    "channel_m",
    "level",
    "samples",
    "sc_layers",
    "n_phase",
    "n_g_steps",
];

impl Command {
    /// Every key the command understands, with its default.
    pub fn defaults(self) -> Vec<(&'static str, &'static str)> {
        let mut keys: Vec<(&str, &str)> = Vec::new();
        match self {
            Command::CpbLevels => {
                keys.extend(CPB_KEYS);
                keys.push(("method", "mathieu"));
            }
            Command::CpbDispersion | Command::CpbAnharmonicity => keys.extend(CPB_KEYS),
            Command::JunctionLevels => {
                keys.extend(JUNCTION_KEYS);
                keys.push(("phi", "0"));
            }
            Command::JunctionCurrent | Command::JunctionParity => {
                keys.extend(JUNCTION_KEYS);
                keys.push(("n_phi", "64"));
            }
            Command::BasisMap => {
                keys.extend(JUNCTION_KEYS);
                keys.extend([
                    ("phi", "1"),
                    ("channel_l", "1"),
                    ("channel_m", "3"),
                    ("level", "0"),
                    ("z", "mid"),
                    ("source", "junction"),
                    ("samples", "1000"),
                ]);
            }
            Command::OracleCompare => {
                keys.extend(CPB_KEYS);
                keys.extend(JUNCTION_KEYS);
                keys.extend([
                    ("target", "cpb"),
                    ("ratios", "1,20,25,50"),
                    ("n_g_steps", "11"),
                    ("sc_layers", "16"),
                    ("n_phase", "9"),
                    ("tolerance", "auto"),
                ]);
            }
        }
        keys
    }

    /// Sweep applied when the configuration names none.
    pub fn default_sweep(self) -> Option<Sweep> {
        let sweep = |key: &str, start: f64, stop: f64, steps: usize| {
            Some(Sweep {
                key: key.to_string(),
                start,
                stop,
                steps,
            })
        };
        match self {
            Command::CpbLevels => sweep("n_g", 0.0, 1.0, 101),
            Command::CpbDispersion => sweep("ej_over_ec", 1.0, 100.0, 100),
            Command::CpbAnharmonicity => sweep("ej_over_ec", 10.0, 100.0, 91),
            Command::JunctionLevels => sweep("phi", 0.0, 2.0 * PI, 65),
            Command::JunctionParity => sweep("l_f", 1.0, 4.0, 4),
            Command::JunctionCurrent | Command::BasisMap | Command::OracleCompare => None,
        }
    }

    /// Parameter shown on the x axis when nothing is swept.
    pub fn axis_key(self) -> &'static str {
        match self {
            Command::CpbLevels => "n_g",
            Command::CpbDispersion | Command::CpbAnharmonicity => "ej_over_ec",
            Command::JunctionLevels | Command::BasisMap => "phi",
            Command::JunctionCurrent => "l_f",
            Command::JunctionParity => "l_f",
            Command::OracleCompare => "ej_over_ec",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub key: String,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl Sweep {
    pub fn points(&self) -> Vec<f64> {
        let span = self.stop - self.start;
        (0..self.steps)
            .map(|i| {
                if i + 1 == self.steps {
                    self.stop
                } else {
                    self.start + span * i as f64 / (self.steps - 1) as f64
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub values: BTreeMap<String, String>,
    pub sweep: Option<Sweep>,
    pub seed: u64,
    pub out: PathBuf,
    pub svg: Option<PathBuf>,
}

/// Parses a number, accepting a `pi` suffix (`pi`, `2pi`, `0.5pi`).
pub fn parse_number(key: &str, raw: &str) -> CliResult<f64> {
    let s = raw.trim();
    let value = match s.strip_suffix("pi") {
        Some("") => Ok(PI),
        Some(prefix) => prefix.trim().parse::<f64>().map(|x| x * PI),
        None => s.parse::<f64>(),
    };
    match value {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(invalid(format!("{key}: `{raw}` is not a finite number"))),
    }
}

/// `key = value` lines; `#` starts a comment.
pub fn parse_pairs(text: &str, origin: &str) -> CliResult<Vec<(String, String)>> {
    let mut pairs = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(invalid(format!(
                "{origin}:{}: expected `key = value`, got `{line}`",
                lineno + 1
            )));
        };
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() {
            return Err(invalid(format!("{origin}:{}: empty key", lineno + 1)));
        }
        pairs.push((k.to_string(), v.to_string()));
    }
    Ok(pairs)
}

impl RunConfig {
    pub fn resolve(
        command: Command,
        config: Option<&Path>,
        overrides: &[String],
        seed: u64,
        out: PathBuf,
        svg: Option<PathBuf>,
    ) -> CliResult<Self> {
        let mut pairs = Vec::new();
        if let Some(path) = config {
            let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
                path: path.display().to_string(),
                source,
            })?;
            pairs.extend(parse_pairs(&text, &path.display().to_string())?);
        }
        for item in overrides {
            let Some((k, v)) = item.split_once('=') else {
                return Err(invalid(format!("--set expects key=value, got `{item}`")));
            };
            pairs.push((k.trim().to_string(), v.trim().to_string()));
        }

        let mut values: BTreeMap<String, String> = command
            .defaults()
            .into_iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect();
        let mut sweep_fields: BTreeMap<String, String> = BTreeMap::new();
        for (k, v) in pairs {
            if let Some(field) = k.strip_prefix("sweep.") {
                if !["key", "start", "stop", "steps"].contains(&field) {
                    return Err(invalid(format!("unknown sweep field `{k}`")));
                }
                sweep_fields.insert(field.to_string(), v);
            } else if values.contains_key(&k) {
                values.insert(k, v);
            } else {
                return Err(invalid(format!("unknown parameter `{k}` for {command}")));
            }
        }

        let sweep = if sweep_fields.is_empty() {
            command.default_sweep()
        } else if sweep_fields.get("key").map(String::as_str) == Some("none") {
            if sweep_fields.len() > 1 {
                return Err(invalid("sweep.key = none takes no other sweep fields"));
            }
            None
        } else {
            Some(parse_sweep(command, &sweep_fields)?)
        };
        if let Some(s) = &sweep {
            if !values.contains_key(&s.key) {
                return Err(invalid(format!("cannot sweep `{}`: not a parameter of {command}", s.key)));
            }
            if command == Command::OracleCompare {
                return Err(invalid("oracle-compare runs on a fixed grid and takes no sweep"));
            }
            if INTEGER_KEYS.contains(&s.key.as_str()) {
                for x in s.points() {
                    if x.fract() != 0.0 || x < 0.0 {
                        return Err(invalid(format!(
                            "sweep of integer parameter `{}` hits non-integer value {x}",
                            s.key
                        )));
                    }
                }
            }
        }

        let cfg = Self {
            command,
            values,
            sweep,
            seed,
            out,
            svg,
        };
        cfg.check_types()?;
        Ok(cfg)
    }

    fn check_types(&self) -> CliResult<()> {
        for (k, v) in &self.values {
            let numeric = !matches!(
                k.as_str(),
                "method" | "source" | "target" | "ratios" | "z" | "tolerance"
            );
            if numeric {
                let x = parse_number(k, v)?;
                if INTEGER_KEYS.contains(&k.as_str()) && (x.fract() != 0.0 || x < 0.0) {
                    return Err(invalid(format!("{k} must be a non-negative integer, got `{v}`")));
                }
            }
        }
        let choice = |key: &str, allowed: &[&str]| -> CliResult<()> {
            match self.values.get(key) {
                Some(v) if !allowed.contains(&v.as_str()) => Err(invalid(format!(
                    "{key} must be one of {allowed:?}, got `{v}`"
                ))),
                _ => Ok(()),
            }
        };
        choice("method", &["mathieu", "charge-basis"])?;
        choice("source", &["junction", "random"])?;
        choice("target", &["cpb", "junction"])?;
        if let Some(z) = self.values.get("z") {
            if z != "mid" {
                parse_number("z", z)?;
            }
        }
        if let Some(t) = self.values.get("tolerance") {
            if t != "auto" {
                parse_number("tolerance", t)?;
            }
        }
        if let Some(r) = self.values.get("ratios") {
            self.list("ratios", r)?;
        }
        Ok(())
    }

    fn list(&self, key: &str, raw: &str) -> CliResult<Vec<f64>> {
        raw.split(',').map(|x| parse_number(key, x)).collect()
    }

    pub fn raw(&self, key: &str) -> &str {
        self.values.get(key).map(String::as_str).unwrap_or_default()
    }

    /// Numeric value of `key`, taking `override_value` for the swept key.
    pub fn number(&self, key: &str, point: Option<(&str, f64)>) -> f64 {
        if let Some((k, x)) = point {
            if k == key {
                return x;
            }
        }
        parse_number(key, self.raw(key)).expect("validated in resolve")
    }

    pub fn integer(&self, key: &str, point: Option<(&str, f64)>) -> usize {
        self.number(key, point) as usize
    }

    pub fn numbers(&self, key: &str) -> Vec<f64> {
        self.list(key, self.raw(key)).expect("validated in resolve")
    }

    /// `(axis key, value)` for every row of the run.
    pub fn axis_points(&self) -> (String, Vec<f64>) {
        match &self.sweep {
            Some(s) => (s.key.clone(), s.points()),
            None => {
                let key = self.command.axis_key();
                (key.to_string(), vec![self.number(key, None)])
            }
        }
    }

    /// Comment block echoing the resolved configuration.
    pub fn echo(&self) -> Vec<String> {
        let mut lines = vec![format!("qspectra {}", self.command)];
        for (k, v) in &self.values {
            lines.push(format!("{k} = {v}"));
        }
        match &self.sweep {
            Some(s) => {
                lines.push(format!("sweep.key = {}", s.key));
                lines.push(format!("sweep.start = {}", s.start));
                lines.push(format!("sweep.stop = {}", s.stop));
                lines.push(format!("sweep.steps = {}", s.steps));
            }
            None => lines.push("sweep = none".to_string()),
        }
        lines.push(format!("seed = {}", self.seed));
        lines
    }
}

fn parse_sweep(command: Command, fields: &BTreeMap<String, String>) -> CliResult<Sweep> {
    let default = command.default_sweep();
    let get = |name: &str| fields.get(name).map(String::as_str);
    let key = match (get("key"), &default) {
        (Some(k), _) => k.to_string(),
        (None, Some(d)) => d.key.clone(),
        (None, None) => return Err(invalid("sweep.key is required")),
    };
    let same_key = default.as_ref().filter(|d| d.key == key);
    let number = |name: &str, fallback: Option<f64>| -> CliResult<f64> {
        match (get(name), fallback) {
            (Some(v), _) => parse_number(&format!("sweep.{name}"), v),
            (None, Some(f)) => Ok(f),
            (None, None) => Err(invalid(format!("sweep.{name} is required"))),
        }
    };
    let start = number("start", same_key.map(|d| d.start))?;
    let stop = number("stop", same_key.map(|d| d.stop))?;
    let steps = number("steps", same_key.map(|d| d.steps as f64))?;
    if steps.fract() != 0.0 || steps < 2.0 {
        return Err(invalid(format!("sweep.steps must be an integer >= 2, got {steps}")));
    }
    Ok(Sweep {
        key,
        start,
        stop,
        steps: steps as usize,
    })
}
