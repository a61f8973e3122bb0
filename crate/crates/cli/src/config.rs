//! Run configuration: a flat `key=value` file merged with command-line
//! overrides.
//!
//! ```text
//! # comment
//! surface = whitney
//! t = 1.0
//! grid = 96x192
//! format = json
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use cp2_willmore::optim::NelderMeadOptions;
use cp2_willmore::suites::SuiteConfig;
use cp2_willmore::torus_opt::default_options;
use cp2_willmore::zoo::FamilySpec;
use cp2_willmore::Domain;

use crate::Failure;

pub const CONFIG_VERSION: u32 = 1;

const KEYS: &[&str] = &[
    "version", "surface", "t", "a", "b", "r1", "r2", "r3", "grid", "sphere_grid", "torus_grid", "format", "out",
    "seed", "points", "zero_tol", "max_iter", "step", "f_tol", "x_tol", "start", "param", "from", "to", "steps",
    "samples",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Text,
}

impl FromStr for Format {
    type Err = Failure;
    fn from_str(s: &str) -> Result<Self, Failure> {
        match s.trim().to_ascii_lowercase().as_str() {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "text" | "txt" => Ok(Format::Text),
            other => Err(Failure::config(format!("unknown format `{other}` (json, csv or text)"))),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Text => "text",
        })
    }
}

/// Merged settings, later sources overriding earlier ones.
#[derive(Clone, Debug, Default)]
pub struct Settings(pub BTreeMap<String, String>);

impl Settings {
    pub fn parse_file(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::config(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse_text(&text)
    }

    pub fn parse_text(text: &str) -> Result<Self, Failure> {
        let mut s = Settings::default();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            s.set_pair(line).map_err(|e| Failure::config(format!("line {}: {}", n + 1, e.message)))?;
        }
        Ok(s)
    }

    /// Applies one `key=value` pair.
    pub fn set_pair(&mut self, pair: &str) -> Result<(), Failure> {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| Failure::config(format!("expected key=value, got `{pair}`")))?;
        self.set(k, v)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), Failure> {
        let key = key.trim().to_ascii_lowercase();
        if !KEYS.contains(&key.as_str()) {
            return Err(Failure::config(format!("unknown key `{key}`")));
        }
        self.0.insert(key, value.trim().to_string());
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    pub fn parse<T: FromStr>(&self, key: &str) -> Result<Option<T>, Failure> {
        match self.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| Failure::config(format!("`{key}`: cannot parse `{v}`"))),
        }
    }

    pub fn positive(&self, key: &str, default: f64) -> Result<f64, Failure> {
        let v = self.parse::<f64>(key)?.unwrap_or(default);
        if !(v > 0.0) || !v.is_finite() {
            return Err(Failure::config(format!("`{key}` must be positive, got {v}")));
        }
        Ok(v)
    }
}

pub fn parse_grid(s: &str) -> Result<(usize, usize), Failure> {
    let bad = || Failure::config(format!("grid `{s}` must look like NxM"));
    let (a, b) = s.trim().split_once(['x', 'X']).ok_or_else(bad)?;
    let g = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
    if g.0 < 8 || g.1 < 8 {
        return Err(Failure::config(format!("grid resolutions must be ≥ 8, got {}x{}", g.0, g.1)));
    }
    Ok(g)
}

/// Parses `x,y,z` into squared-radius weights.
pub fn parse_triple(s: &str) -> Result<[f64; 3], Failure> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| Failure::config(format!("`{s}` must be three comma-separated numbers")))?;
    if v.len() != 3 || v.iter().any(|x| !(*x > 0.0) || !x.is_finite()) {
        return Err(Failure::config(format!("`{s}` must be three positive numbers")));
    }
    Ok([v[0], v[1], v[2]])
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub settings: Settings,
    pub format: Format,
    pub out: Option<String>,
    pub seed: u64,
    pub sphere_grid: (usize, usize),
    pub torus_grid: (usize, usize),
    pub points: usize,
    pub zero_tol: f64,
    pub optimizer: NelderMeadOptions,
    pub simplex_step: f64,
}

impl RunConfig {
    pub fn from_settings(settings: Settings) -> Result<Self, Failure> {
        if let Some(v) = settings.parse::<u32>("version")? {
            if v != CONFIG_VERSION {
                return Err(Failure::config(format!("config version {v} is not supported (expected {CONFIG_VERSION})")));
            }
        }
        let d = SuiteConfig::default();
        let grid = settings.get("grid").map(parse_grid).transpose()?;
        let sphere_grid = match settings.get("sphere_grid") {
            Some(g) => parse_grid(g)?,
            None => grid.unwrap_or(d.sphere_grid),
        };
        let torus_grid = match settings.get("torus_grid") {
            Some(g) => parse_grid(g)?,
            None => grid.unwrap_or(d.torus_grid),
        };
        let points = settings.parse::<usize>("points")?.unwrap_or(d.points);
        if points == 0 {
            return Err(Failure::config("`points` must be at least 1"));
        }
        let o = default_options();
        let max_iter = settings.parse::<usize>("max_iter")?.unwrap_or(o.max_iter);
        if max_iter == 0 {
            return Err(Failure::config("`max_iter` must be at least 1"));
        }
        Ok(RunConfig {
            format: settings.parse::<Format>("format")?.unwrap_or(Format::Json),
            out: settings.get("out").map(str::to_string),
            seed: settings.parse::<u64>("seed")?.unwrap_or(d.seed),
            sphere_grid,
            torus_grid,
            points,
            zero_tol: settings.positive("zero_tol", 1e-5)?,
            optimizer: NelderMeadOptions {
                max_iter,
                f_tol: settings.positive("f_tol", o.f_tol)?,
                x_tol: settings.positive("x_tol", o.x_tol)?,
            },
            simplex_step: settings.positive("step", 0.5)?,
            settings,
        })
    }

    pub fn surface(&self) -> Result<FamilySpec, Failure> {
        FamilySpec::from_settings(&self.settings.0).map_err(Failure::from)
    }

    pub fn grid_for(&self, domain: Domain) -> (usize, usize) {
        match domain {
            Domain::Sphere => self.sphere_grid,
            Domain::Torus => self.torus_grid,
        }
    }

    pub fn suite_config(&self) -> SuiteConfig {
        SuiteConfig { sphere_grid: self.sphere_grid, torus_grid: self.torus_grid, seed: self.seed, points: self.points }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_grammar() {
        let s = Settings::parse_text("# c\nsurface = whitney\n\nt=2 # trailing\nGRID=16x32\n").unwrap();
        let c = RunConfig::from_settings(s).unwrap();
        assert_eq!(c.sphere_grid, (16, 32));
        assert_eq!(c.surface().unwrap(), FamilySpec::Whitney { t: 2.0 });
    }

    #[test]
    fn rejects_bad_input() {
        assert!(Settings::parse_text("colour=red").is_err());
        assert!(Settings::parse_text("surface").is_err());
        assert!(parse_grid("4x4").is_err());
        assert!(parse_grid("16by16").is_err());
        let mut s = Settings::default();
        s.set("zero_tol", "-1").unwrap();
        assert!(RunConfig::from_settings(s).is_err());
        assert!(parse_triple("1,2").is_err());
        assert!(parse_triple("1,0,2").is_err());
    }
}
