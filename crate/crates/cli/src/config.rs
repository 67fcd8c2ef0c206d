//! Flat `section.key = value` run configuration.
//!
//! Blank lines and everything after `#` are ignored. Numbers may be written as
//! fractions such as `1/30`. Lists are comma separated; `sweep.gammas` also
//! accepts `start:step:end`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use stopline::{McParams, ModelSpec, Numerics, PathState, PowerUtility, Regime, RegimeDynamics, TabulatedDynamics};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: {reason}")]
    Syntax { line: usize, reason: String },

    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },

    #[error("line {line}: duplicate key `{key}`, first set on line {first}")]
    Duplicate { line: usize, key: String, first: usize },

    #[error("line {line}: bad value for `{key}`: {reason}")]
    Value { line: usize, key: String, reason: String },

    #[error("missing required key `{key}`")]
    Missing { key: String },
}

/// Which problem a simulation run values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Problem {
    Seller,
    Buyer,
}

impl Problem {
    pub fn name(self) -> &'static str {
        match self {
            Problem::Seller => "seller",
            Problem::Buyer => "buyer",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct McSpec {
    pub params: McParams,
    pub start: PathState,
    pub problem: Problem,
}

/// Output file names. Relative names are resolved against `dir`.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputSpec {
    pub dir: PathBuf,
    pub curves: PathBuf,
    pub csv: PathBuf,
    pub svg: PathBuf,
    pub report: PathBuf,
}

impl OutputSpec {
    pub fn resolve(&self, file: &Path) -> PathBuf {
        if file.is_absolute() {
            file.to_path_buf()
        } else {
            self.dir.join(file)
        }
    }
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("out"),
            curves: PathBuf::from("curves.csv"),
            csv: PathBuf::from("sweep.csv"),
            svg: PathBuf::from("sweep.svg"),
            report: PathBuf::from("report.txt"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub model: ModelSpec,
    pub utility: PowerUtility,
    pub numerics: Numerics,
    pub mc: McSpec,
    pub output: OutputSpec,
    /// Exponents for `sweep`; defaults to `utility.gamma` alone.
    pub gammas: Vec<f64>,
}

const REGIME_KEYS: [&str; 7] = ["kind", "mu", "c", "sigma2", "table_x", "table_drift", "table_variance"];

const OTHER_KEYS: [&str; 26] = [
    "model.L",
    "model.H",
    "model.r",
    "utility.gamma",
    "numerics.cells_per_unit",
    "numerics.max_cells",
    "numerics.tol_pasting",
    "numerics.boundary_tol",
    "numerics.tol_continuity",
    "numerics.scan_points",
    "numerics.x_max",
    "numerics.b_max",
    "numerics.threshold_search_hi",
    "mc.n_paths",
    "mc.dt",
    "mc.t_max",
    "mc.seed",
    "mc.start_x",
    "mc.start_regime",
    "mc.problem",
    "output.dir",
    "output.curves",
    "output.csv",
    "output.svg",
    "output.report",
    "sweep.gammas",
];

fn is_known(key: &str) -> bool {
    if OTHER_KEYS.contains(&key) {
        return true;
    }
    ["model.positive.", "model.negative."]
        .iter()
        .any(|p| key.strip_prefix(p).is_some_and(|rest| REGIME_KEYS.contains(&rest)))
}

struct Entries {
    map: BTreeMap<String, (usize, String)>,
    lines: BTreeMap<String, usize>,
}

impl Entries {
    fn take(&mut self, key: &str) -> Option<(usize, String)> {
        self.map.remove(key)
    }

    fn required(&mut self, key: &str) -> Result<(usize, String), ConfigError> {
        self.take(key).ok_or_else(|| ConfigError::Missing { key: key.to_string() })
    }

    fn number(&mut self, key: &str) -> Result<Option<f64>, ConfigError> {
        self.take(key).map(|(line, v)| parse_number(&v).map_err(|reason| bad(line, key, reason))).transpose()
    }

    fn required_number(&mut self, key: &str) -> Result<(usize, f64), ConfigError> {
        let (line, v) = self.required(key)?;
        Ok((line, parse_number(&v).map_err(|reason| bad(line, key, reason))?))
    }

    fn integer<T: std::str::FromStr>(&mut self, key: &str) -> Result<Option<T>, ConfigError>
    where
        T::Err: std::fmt::Display,
    {
        self.take(key).map(|(line, v)| v.parse::<T>().map_err(|e| bad(line, key, e.to_string()))).transpose()
    }

    fn auto_number(&mut self, key: &str) -> Result<Option<f64>, ConfigError> {
        match self.take(key) {
            Some((_, v)) if v == "auto" => Ok(None),
            Some((line, v)) => parse_number(&v).map(Some).map_err(|reason| bad(line, key, reason)),
            None => Ok(None),
        }
    }

    /// Blames a library validation error on the line that set the value.
    fn invalid(&self, section: &str, e: stopline::Error) -> ConfigError {
        let key = match &e {
            stopline::Error::InvalidParameter { name, .. } => format!("{section}.{name}"),
            _ => section.to_string(),
        };
        let line = self.lines.get(&key).copied().unwrap_or(0);
        bad(line, &key, e.to_string())
    }

    fn list(&mut self, key: &str) -> Result<Option<(usize, Vec<f64>)>, ConfigError> {
        self.take(key)
            .map(|(line, v)| parse_list(&v).map(|xs| (line, xs)).map_err(|reason| bad(line, key, reason)))
            .transpose()
    }
}

fn bad(line: usize, key: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Value { line, key: key.to_string(), reason: reason.into() }
}

fn parse_number(text: &str) -> Result<f64, String> {
    let parse = |s: &str| s.trim().parse::<f64>().map_err(|_| format!("`{}` is not a number", s.trim()));
    let value = match text.split_once('/') {
        Some((num, den)) => parse(num)? / parse(den)?,
        None => parse(text)?,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(format!("`{text}` is not finite"))
    }
}

fn parse_list(text: &str) -> Result<Vec<f64>, String> {
    let xs: Vec<f64> = text.split(',').map(parse_number).collect::<Result<_, _>>()?;
    if xs.is_empty() {
        return Err("empty list".into());
    }
    Ok(xs)
}

fn parse_gammas(text: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = text.split(':').collect();
    match parts.as_slice() {
        [single] => parse_list(single),
        [start, step, end] => {
            let (start, step, end) = (parse_number(start)?, parse_number(step)?, parse_number(end)?);
            if !(step > 0.0) || end < start {
                return Err("need step > 0 and start ≤ end".into());
            }
            let count = ((end - start) / step + 1e-9).floor() as usize;
            // rounding keeps `0.7:0.05:0.95` on the decimal grid
            Ok((0..=count).map(|i| ((start + i as f64 * step) * 1e12).round() / 1e12).collect())
        }
        _ => Err("expected a list or start:step:end".into()),
    }
}

fn split_lines(text: &str) -> Result<Entries, ConfigError> {
    let mut map: BTreeMap<String, (usize, String)> = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| ConfigError::Syntax { line, reason: format!("expected `key = value`, got `{content}`") })?;
        let (key, value) = (key.trim(), value.trim());
        if !is_known(key) {
            return Err(ConfigError::UnknownKey { line, key: key.to_string() });
        }
        if value.is_empty() {
            return Err(bad(line, key, "empty value"));
        }
        if let Some((first, _)) = map.get(key) {
            return Err(ConfigError::Duplicate { line, key: key.to_string(), first: *first });
        }
        map.insert(key.to_string(), (line, value.to_string()));
    }
    let lines = map.iter().map(|(k, (line, _))| (k.clone(), *line)).collect();
    Ok(Entries { map, lines })
}

fn regime_dynamics(entries: &mut Entries, side: &str) -> Result<RegimeDynamics, ConfigError> {
    let key = |k: &str| format!("model.{side}.{k}");
    let (kind_line, kind) = entries.required(&key("kind"))?;
    let dynamics = match kind.as_str() {
        "affine" => {
            let mu = entries.required_number(&key("mu"))?.1;
            let c = entries.number(&key("c"))?.unwrap_or(mu);
            let sigma2 = entries.required_number(&key("sigma2"))?.1;
            RegimeDynamics::Affine { mu, c, sigma2 }
        }
        "gbm" => {
            let mu = entries.required_number(&key("mu"))?.1;
            let sigma2 = entries.required_number(&key("sigma2"))?.1;
            RegimeDynamics::Gbm { mu, sigma2 }
        }
        "vasicek" | "cir" => {
            let c = entries.required_number(&key("c"))?.1;
            let mu = entries.required_number(&key("mu"))?.1;
            let sigma2 = entries.required_number(&key("sigma2"))?.1;
            if kind == "vasicek" {
                RegimeDynamics::Vasicek { c, mu, sigma2 }
            } else {
                RegimeDynamics::Cir { c, mu, sigma2 }
            }
        }
        "tabulated" => {
            let mut table = |k: &str| -> Result<Vec<f64>, ConfigError> {
                let name = key(k);
                entries.list(&name)?.map(|(_, xs)| xs).ok_or(ConfigError::Missing { key: name })
            };
            let (xs, drift, variance) = (table("table_x")?, table("table_drift")?, table("table_variance")?);
            let table =
                TabulatedDynamics::new(xs, drift, variance).map_err(|e| bad(kind_line, &key("kind"), e.to_string()))?;
            RegimeDynamics::Tabulated(table)
        }
        other => {
            return Err(bad(
                kind_line,
                &key("kind"),
                format!("`{other}` is not one of affine, gbm, vasicek, cir, tabulated"),
            ))
        }
    };
    // keys that the chosen kind does not read
    let prefix = format!("model.{side}.");
    if let Some((k, (line, _))) = entries.map.iter().find(|(k, _)| k.starts_with(&prefix)) {
        return Err(bad(*line, k, format!("not used by kind `{kind}`")));
    }
    dynamics.validate().map_err(|e| bad(kind_line, &key("kind"), e.to_string()))?;
    Ok(dynamics)
}

pub fn parse_config(text: &str) -> Result<RunSpec, ConfigError> {
    let mut entries = split_lines(text)?;
    let positive = regime_dynamics(&mut entries, "positive")?;
    let negative = regime_dynamics(&mut entries, "negative")?;
    let (l_line, lower) = entries.required_number("model.L")?;
    let (_, upper) = entries.required_number("model.H")?;
    let (r_line, rate) = entries.required_number("model.r")?;
    let model = ModelSpec::new(positive, negative, lower, upper, rate).map_err(|e| match e {
        stopline::Error::InvalidParameter { name: "r", reason } => bad(r_line, "model.r", reason),
        other => bad(l_line, "model.L", other.to_string()),
    })?;
    let (g_line, gamma) = entries.required_number("utility.gamma")?;
    let utility = PowerUtility::new(gamma).map_err(|e| bad(g_line, "utility.gamma", e.to_string()))?;

    let defaults = Numerics::default();
    let numerics = Numerics {
        cells_per_unit: entries.number("numerics.cells_per_unit")?.unwrap_or(defaults.cells_per_unit),
        max_cells: entries.integer("numerics.max_cells")?.unwrap_or(defaults.max_cells),
        tol_pasting: entries.number("numerics.tol_pasting")?.unwrap_or(defaults.tol_pasting),
        boundary_tol: entries.number("numerics.boundary_tol")?.unwrap_or(defaults.boundary_tol),
        tol_continuity: entries.number("numerics.tol_continuity")?.unwrap_or(defaults.tol_continuity),
        scan_points: entries.integer("numerics.scan_points")?.unwrap_or(defaults.scan_points),
        x_max: entries.auto_number("numerics.x_max")?,
        b_max: entries.auto_number("numerics.b_max")?,
        threshold_search_hi: entries.auto_number("numerics.threshold_search_hi")?,
    };
    numerics.validate().map_err(|e| entries.invalid("numerics", e))?;

    let defaults = McParams::default();
    let params = McParams {
        n_paths: entries.integer("mc.n_paths")?.unwrap_or(defaults.n_paths),
        dt: entries.number("mc.dt")?.unwrap_or(defaults.dt),
        t_max: entries.number("mc.t_max")?.unwrap_or(defaults.t_max),
        seed: entries.integer("mc.seed")?.unwrap_or(defaults.seed),
    };
    params.validate().map_err(|e| entries.invalid("mc", e))?;
    let start_x = entries.number("mc.start_x")?.unwrap_or(model.upper);
    let start_regime = match entries.take("mc.start_regime") {
        Some((line, v)) => v.parse::<Regime>().map_err(|reason| bad(line, "mc.start_regime", reason))?,
        None => Regime::Positive,
    };
    let problem = match entries.take("mc.problem") {
        None => Problem::Seller,
        Some((_, v)) if v == "seller" => Problem::Seller,
        Some((_, v)) if v == "buyer" => Problem::Buyer,
        Some((line, v)) => return Err(bad(line, "mc.problem", format!("`{v}` is not seller or buyer"))),
    };

    let defaults = OutputSpec::default();
    let mut path = |key: &str, default: PathBuf| entries.take(key).map(|(_, v)| PathBuf::from(v)).unwrap_or(default);
    let output = OutputSpec {
        dir: path("output.dir", defaults.dir),
        curves: path("output.curves", defaults.curves),
        csv: path("output.csv", defaults.csv),
        svg: path("output.svg", defaults.svg),
        report: path("output.report", defaults.report),
    };

    let gammas = match entries.take("sweep.gammas") {
        Some((line, v)) => {
            let gammas = parse_gammas(&v).map_err(|reason| bad(line, "sweep.gammas", reason))?;
            if let Some(g) = gammas.iter().find(|g| !(**g > 0.0)) {
                return Err(bad(line, "sweep.gammas", format!("exponents must be > 0, got {g}")));
            }
            gammas
        }
        None => vec![gamma],
    };
    debug_assert!(entries.map.is_empty(), "unconsumed keys: {:?}", entries.map.keys());

    Ok(RunSpec {
        model,
        utility,
        numerics,
        mc: McSpec { params, start: PathState::new(start_x, start_regime), problem },
        output,
        gammas,
    })
}

fn dynamics_lines(side: &str, d: &RegimeDynamics, out: &mut Vec<(String, String)>) {
    let mut push = |k: &str, v: String| out.push((format!("model.{side}.{k}"), v));
    push("kind", d.kind_name().to_string());
    match d {
        RegimeDynamics::Affine { mu, c, sigma2 } => {
            push("mu", mu.to_string());
            push("c", c.to_string());
            push("sigma2", sigma2.to_string());
        }
        RegimeDynamics::Gbm { mu, sigma2 } => {
            push("mu", mu.to_string());
            push("sigma2", sigma2.to_string());
        }
        RegimeDynamics::Vasicek { c, mu, sigma2 } | RegimeDynamics::Cir { c, mu, sigma2 } => {
            push("c", c.to_string());
            push("mu", mu.to_string());
            push("sigma2", sigma2.to_string());
        }
        RegimeDynamics::Tabulated(t) => {
            let join = |xs: &[f64]| xs.iter().map(f64::to_string).collect::<Vec<_>>().join(",");
            push("table_x", join(t.nodes()));
            push("table_drift", join(t.drift_values()));
            push("table_variance", join(t.variance_values()));
        }
    }
}

impl RunSpec {
    /// Every effective parameter as `(key, value)`, defaults included.
    /// Feeding these lines back through [`parse_config`] gives the same spec.
    pub fn effective(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        dynamics_lines("positive", &self.model.positive, &mut out);
        dynamics_lines("negative", &self.model.negative, &mut out);
        let n = &self.numerics;
        let auto = |v: Option<f64>| v.map_or("auto".to_string(), |x| x.to_string());
        let mc = &self.mc;
        let path = |p: &Path| p.display().to_string();
        let rest = [
            ("model.L", self.model.lower.to_string()),
            ("model.H", self.model.upper.to_string()),
            ("model.r", self.model.rate.to_string()),
            ("utility.gamma", self.utility.gamma().to_string()),
            ("numerics.cells_per_unit", n.cells_per_unit.to_string()),
            ("numerics.max_cells", n.max_cells.to_string()),
            ("numerics.tol_pasting", n.tol_pasting.to_string()),
            ("numerics.boundary_tol", n.boundary_tol.to_string()),
            ("numerics.tol_continuity", n.tol_continuity.to_string()),
            ("numerics.scan_points", n.scan_points.to_string()),
            ("numerics.x_max", auto(n.x_max)),
            ("numerics.b_max", auto(n.b_max)),
            ("numerics.threshold_search_hi", auto(n.threshold_search_hi)),
            ("mc.n_paths", mc.params.n_paths.to_string()),
            ("mc.dt", mc.params.dt.to_string()),
            ("mc.t_max", mc.params.t_max.to_string()),
            ("mc.seed", mc.params.seed.to_string()),
            ("mc.start_x", mc.start.price.to_string()),
            ("mc.start_regime", mc.start.regime.to_string()),
            ("mc.problem", mc.problem.name().to_string()),
            ("output.dir", path(&self.output.dir)),
            ("output.curves", path(&self.output.curves)),
            ("output.csv", path(&self.output.csv)),
            ("output.svg", path(&self.output.svg)),
            ("output.report", path(&self.output.report)),
            ("sweep.gammas", self.gammas.iter().map(f64::to_string).collect::<Vec<_>>().join(",")),
        ];
        out.extend(rest.into_iter().map(|(k, v)| (k.to_string(), v)));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fractions_and_lists() {
        assert_eq!(parse_number("1/30").unwrap(), 1.0 / 30.0);
        assert_eq!(parse_number(" 0.5 ").unwrap(), 0.5);
        assert!(parse_number("1/0").is_err());
        assert!(parse_number("abc").is_err());
        assert_eq!(parse_list("1, 2,3").unwrap(), vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn gamma_ranges_land_on_decimals() {
        let g = parse_gammas("0.70:0.05:0.95").unwrap();
        assert_eq!(g, vec![0.7, 0.75, 0.8, 0.85, 0.9, 0.95]);
        assert_eq!(parse_gammas("0.5:0.1:1.5").unwrap().len(), 11);
        assert!(parse_gammas("1:0:2").is_err());
        assert!(parse_gammas("1:2").is_err());
    }

    #[test]
    fn comments_and_blank_lines() {
        let entries = split_lines("# header\n\nmodel.L = 1 # trailing\n").unwrap();
        assert_eq!(entries.map["model.L"], (3, "1".to_string()));
    }

    #[test]
    fn known_keys() {
        assert!(is_known("model.positive.sigma2"));
        assert!(is_known("model.negative.table_x"));
        assert!(!is_known("model.middle.mu"));
        assert!(!is_known("numerics.speed"));
    }
}
