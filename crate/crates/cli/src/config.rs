//! Run configuration: a flat `key = value` file merged under command-line
//! flags.

use std::fmt;
use std::path::{Path, PathBuf};

use szilard_core::spectrum::X0_MIN_DEFAULT;
use szilard_core::units::{PhysicalUnits, BOLTZMANN_SI, HBAR_SI};

/// Bad input from the user. Maps to exit status 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage<T>(msg: impl Into<String>) -> Result<T, UsageError> {
    Err(UsageError(msg.into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    fn parse(s: &str) -> Result<Self, UsageError> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => usage(format!("unknown format '{other}' (expected csv or json)")),
        }
    }
}

pub const DEFAULT_THETA: f64 = 1.0;
pub const DEFAULT_G: f64 = 1.0;
pub const DEFAULT_POINTS: usize = 400;
pub const DEFAULT_LEVELS: usize = 8;
pub const MIN_LEVELS: usize = 4;
pub const DEFAULT_E_MAX: f64 = 8.0;

/// Every setting that can come from the file or a flag. `None` means
/// "not given here".
#[derive(Debug, Clone, Default)]
pub struct Settings {
    pub theta: Option<f64>,
    pub g: Option<f64>,
    pub x0_min: Option<f64>,
    pub x0_max: Option<f64>,
    pub points: Option<usize>,
    pub levels: Option<usize>,
    pub e_max: Option<f64>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub jobs: Option<usize>,
    pub quick: Option<bool>,
    pub no_timestamp: Option<bool>,
    pub mass: Option<f64>,
    pub omega: Option<f64>,
    pub temperature: Option<f64>,
    pub hbar: Option<f64>,
    pub k_b: Option<f64>,
}

fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, UsageError> {
    v.trim()
        .parse()
        .map_err(|_| UsageError(format!("config key '{key}': cannot parse '{}'", v.trim())))
}

fn boolean(key: &str, v: &str) -> Result<bool, UsageError> {
    match v.trim().to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        other => usage(format!("config key '{key}': '{other}' is not a boolean")),
    }
}

impl Settings {
    /// Parses `key = value` lines. `#` starts a comment; keys may use `-`
    /// or `_`.
    pub fn parse(text: &str) -> Result<Self, UsageError> {
        let mut s = Settings::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return usage(format!("config line {}: expected key = value", i + 1));
            };
            let key = k.trim().replace('-', "_");
            let v = v.trim();
            match key.as_str() {
                "theta" => s.theta = Some(num(&key, v)?),
                "g" => s.g = Some(num(&key, v)?),
                "x0_min" => s.x0_min = Some(num(&key, v)?),
                "x0_max" => s.x0_max = Some(num(&key, v)?),
                "points" => s.points = Some(num(&key, v)?),
                "levels" => s.levels = Some(num(&key, v)?),
                "e_max" => s.e_max = Some(num(&key, v)?),
                "format" => s.format = Some(Format::parse(v)?),
                "out" => s.out = Some(PathBuf::from(v)),
                "jobs" => s.jobs = Some(num(&key, v)?),
                "quick" => s.quick = Some(boolean(&key, v)?),
                "no_timestamp" => s.no_timestamp = Some(boolean(&key, v)?),
                "mass" => s.mass = Some(num(&key, v)?),
                "omega" => s.omega = Some(num(&key, v)?),
                "temperature" => s.temperature = Some(num(&key, v)?),
                "hbar" => s.hbar = Some(num(&key, v)?),
                "k_b" => s.k_b = Some(num(&key, v)?),
                _ => return usage(format!("config line {}: unknown key '{}'", i + 1, k.trim())),
            }
        }
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self, UsageError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| UsageError(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Values from `over` win.
    pub fn overlay(self, over: Settings) -> Settings {
        Settings {
            theta: over.theta.or(self.theta),
            g: over.g.or(self.g),
            x0_min: over.x0_min.or(self.x0_min),
            x0_max: over.x0_max.or(self.x0_max),
            points: over.points.or(self.points),
            levels: over.levels.or(self.levels),
            e_max: over.e_max.or(self.e_max),
            format: over.format.or(self.format),
            out: over.out.or(self.out),
            jobs: over.jobs.or(self.jobs),
            quick: over.quick.or(self.quick),
            no_timestamp: over.no_timestamp.or(self.no_timestamp),
            mass: over.mass.or(self.mass),
            omega: over.omega.or(self.omega),
            temperature: over.temperature.or(self.temperature),
            hbar: over.hbar.or(self.hbar),
            k_b: over.k_b.or(self.k_b),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub theta: f64,
    pub g: f64,
    pub x0_min: f64,
    pub x0_max: f64,
    pub points: usize,
    pub levels: usize,
    pub e_max: f64,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub jobs: Option<usize>,
    pub quick: bool,
    pub no_timestamp: bool,
    pub units: Option<PhysicalUnits>,
}

impl RunConfig {
    pub fn resolve(s: Settings) -> Result<Self, UsageError> {
        let units = match (s.mass, s.omega, s.temperature) {
            (None, None, None) => {
                if s.hbar.is_some() || s.k_b.is_some() {
                    return usage("hbar and k_b need mass, omega and temperature");
                }
                None
            }
            (Some(mass), Some(omega), Some(temperature)) => Some(
                PhysicalUnits {
                    mass,
                    omega,
                    hbar: s.hbar.unwrap_or(HBAR_SI),
                    temperature,
                    k_b: s.k_b.unwrap_or(BOLTZMANN_SI),
                }
                .validated()
                .map_err(|e| UsageError(e.to_string()))?,
            ),
            _ => return usage("physical units need all of mass, omega and temperature"),
        };
        let theta = match (units, s.theta) {
            (Some(u), None) => u.theta(),
            (Some(u), Some(t)) => {
                let derived = u.theta();
                if ((t - derived) / derived).abs() > 1e-9 {
                    return usage(format!(
                        "theta = {t} conflicts with theta = {derived} from the physical units"
                    ));
                }
                derived
            }
            (None, t) => t.unwrap_or(DEFAULT_THETA),
        };
        let cfg = RunConfig {
            theta,
            g: s.g.unwrap_or(DEFAULT_G),
            x0_min: s.x0_min.unwrap_or(X0_MIN_DEFAULT),
            x0_max: s.x0_max.unwrap_or(0.0),
            points: s.points.unwrap_or(DEFAULT_POINTS),
            levels: s.levels.unwrap_or(DEFAULT_LEVELS),
            e_max: s.e_max.unwrap_or(DEFAULT_E_MAX),
            format: s.format.unwrap_or(Format::Csv),
            out: s.out,
            jobs: s.jobs,
            quick: s.quick.unwrap_or(false),
            no_timestamp: s.no_timestamp.unwrap_or(false),
            units,
        };
        cfg.check()?;
        Ok(cfg)
    }

    fn check(&self) -> Result<(), UsageError> {
        if !(self.theta > 0.0 && self.theta.is_finite()) {
            return usage(format!(
                "theta = {} must be positive and finite",
                self.theta
            ));
        }
        if self.g.is_nan() || self.g < 0.0 {
            return usage(format!("g = {} must be >= 0", self.g));
        }
        if !(self.x0_min < self.x0_max && self.x0_max <= 0.0) {
            return usage(format!(
                "need x0_min < x0_max <= 0 (got {} and {})",
                self.x0_min, self.x0_max
            ));
        }
        if self.points < 2 {
            return usage("points must be at least 2");
        }
        if self.levels < MIN_LEVELS {
            return usage(format!("levels must be at least {MIN_LEVELS}"));
        }
        if !(self.e_max > 0.0 && self.e_max.is_finite()) {
            return usage("e_max must be positive");
        }
        if self.jobs == Some(0) {
            return usage("jobs must be at least 1");
        }
        Ok(())
    }

    /// Key/value pairs echoed into output headers. Output routing and
    /// worker count are left out so files do not depend on them.
    pub fn echo(&self) -> Vec<(&'static str, String)> {
        let mut v = vec![
            ("theta", self.theta.to_string()),
            ("g", self.g.to_string()),
            ("x0_min", self.x0_min.to_string()),
            ("x0_max", self.x0_max.to_string()),
            ("points", self.points.to_string()),
            ("levels", self.levels.to_string()),
            ("e_max", self.e_max.to_string()),
            ("quick", self.quick.to_string()),
        ];
        if let Some(u) = &self.units {
            v.extend([
                ("mass", u.mass.to_string()),
                ("omega", u.omega.to_string()),
                ("hbar", u.hbar.to_string()),
                ("temperature", u.temperature.to_string()),
                ("k_b", u.k_b.to_string()),
            ]);
        }
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_values_yield_to_flags() {
        let file =
            Settings::parse("theta = 2\n# comment\nx0-min = -5  # trailing\nformat = json\n")
                .unwrap();
        let flags = Settings {
            theta: Some(3.0),
            ..Default::default()
        };
        let cfg = RunConfig::resolve(file.overlay(flags)).unwrap();
        assert_eq!(cfg.theta, 3.0);
        assert_eq!(cfg.x0_min, -5.0);
        assert_eq!(cfg.format, Format::Json);
    }

    #[test]
    fn bad_input_is_rejected() {
        assert!(Settings::parse("colour = red").is_err());
        assert!(Settings::parse("theta 1").is_err());
        assert!(Settings::parse("points = many").is_err());
        let with = |s: Settings| RunConfig::resolve(s).is_err();
        assert!(with(Settings {
            theta: Some(0.0),
            ..Default::default()
        }));
        assert!(with(Settings {
            x0_max: Some(0.5),
            ..Default::default()
        }));
        assert!(with(Settings {
            levels: Some(3),
            ..Default::default()
        }));
        assert!(with(Settings {
            mass: Some(1.0),
            ..Default::default()
        }));
    }

    #[test]
    fn physical_units_set_theta() {
        let s =
            Settings::parse("mass = 1\nomega = 1\nhbar = 1\nk_b = 1\ntemperature = 0.25").unwrap();
        let cfg = RunConfig::resolve(s.clone()).unwrap();
        assert_eq!(cfg.theta, 4.0);
        let clash = s.overlay(Settings {
            theta: Some(1.0),
            ..Default::default()
        });
        assert!(RunConfig::resolve(clash).is_err());
    }
}
