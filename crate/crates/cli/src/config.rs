//! Run configuration: a plain `key = value` file, overridden by flags.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use thiserror::Error;
use voronoi_core::identity::{FamilySpec, Mode};
use voronoi_core::precision::Context;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("{path}:{line}: expected `key = value`")]
    Syntax { path: PathBuf, line: usize },
    #[error("unknown config key {0:?}")]
    UnknownKey(String),
    #[error("invalid value {value:?} for {key}: {reason}")]
    Value { key: String, value: String, reason: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Table,
}

impl FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "table" => Ok(Format::Table),
            _ => Err(format!("{s:?} is not one of json, csv, table")),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Table => "table",
        })
    }
}

/// Everything a run depends on. Tolerances and scales stay decimal strings
/// and are parsed at the working precision when used.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub precision_bits: usize,
    /// Upper bound on the residue order K chosen by the planner.
    pub residue_order_max: usize,
    /// N_trunc of the linear system.
    pub truncation: u64,
    /// N_u; unknowns are a_2, …, a_{N_u}.
    pub unknowns: u64,
    /// N of the untwisted identity check.
    pub verify_terms: u64,
    pub oracle_n_max: u64,
    pub oracle_rows: u64,
    pub family: FamilySpec,
    pub quadrature_sigma0: String,
    /// Height T and steps M; both absent means sized automatically.
    pub quadrature_height: Option<String>,
    pub quadrature_steps: Option<usize>,
    pub transform_tol: String,
    pub verify_transform_tol: String,
    pub transform_check_tol: String,
    pub identity_tol: String,
    pub solve_tol: String,
    pub solve_tol_a2: String,
    pub calibration_threshold: String,
    pub twist_t_max: String,
    pub twist_n_lhs: u64,
    pub twist_c_max: u64,
    pub twist_q_max: u64,
    pub twist_atoms: Vec<(u32, String)>,
    pub mode: Mode,
    pub out_dir: PathBuf,
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            precision_bits: 160,
            residue_order_max: 4096,
            truncation: 50,
            unknowns: 50,
            verify_terms: 200,
            oracle_n_max: 50,
            oracle_rows: 1,
            family: FamilySpec::Default,
            quadrature_sigma0: "0.5".into(),
            quadrature_height: None,
            quadrature_steps: None,
            transform_tol: "1e-50".into(),
            verify_transform_tol: "1e-20".into(),
            transform_check_tol: "1e-10".into(),
            identity_tol: "1e-8".into(),
            solve_tol: "1e-2".into(),
            solve_tol_a2: "1e-3".into(),
            calibration_threshold: "1e-6".into(),
            twist_t_max: "20".into(),
            twist_n_lhs: 60,
            twist_c_max: 6,
            twist_q_max: 3,
            twist_atoms: vec![(12, "5.25".into()), (16, "7.5".into())],
            mode: Mode::Discovery,
            out_dir: PathBuf::from("voronoi-out"),
            format: Format::Json,
        }
    }
}

fn bad(key: &str, value: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Value { key: key.into(), value: value.into(), reason: reason.into() }
}

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T, ConfigError>
where
    T::Err: fmt::Display,
{
    value.parse().map_err(|e: T::Err| bad(key, value, e.to_string()))
}

fn parse_atoms(key: &str, value: &str) -> Result<Vec<(u32, String)>, ConfigError> {
    value
        .split(',')
        .map(|p| {
            let (m, x) = p.trim().split_once(':').ok_or_else(|| bad(key, value, "atoms are written m:X"))?;
            Ok((parse_num(key, m.trim())?, x.trim().to_string()))
        })
        .collect()
}

fn atoms_string(v: &[(u32, String)]) -> String {
    v.iter().map(|(m, x)| format!("{m}:{x}")).collect::<Vec<_>>().join(", ")
}

impl RunConfig {
    /// Defaults, then the file if given.
    pub fn load(path: Option<&Path>) -> Result<Self, ConfigError> {
        let mut cfg = RunConfig::default();
        if let Some(path) = path {
            let text = std::fs::read_to_string(path)
                .map_err(|source| ConfigError::Read { path: path.to_path_buf(), source })?;
            cfg.apply_text(&text, path)?;
        }
        Ok(cfg)
    }

    pub fn apply_text(&mut self, text: &str, path: &Path) -> Result<(), ConfigError> {
        // generated-family parameters may come in any order
        let mut generated: BTreeMap<String, String> = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or(ConfigError::Syntax { path: path.to_path_buf(), line: i + 1 })?;
            let (k, v) = (k.trim(), v.trim());
            if k.starts_with("family_") {
                generated.insert(k.to_string(), v.to_string());
            } else {
                self.set(k, v)?;
            }
        }
        for (k, v) in generated {
            self.set(&k, &v)?;
        }
        Ok(())
    }

    /// Sets one key.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        match key {
            "precision_bits" => self.precision_bits = parse_num(key, value)?,
            "residue_order_max" => self.residue_order_max = parse_num(key, value)?,
            "truncation" => self.truncation = parse_num(key, value)?,
            "unknowns" => self.unknowns = parse_num(key, value)?,
            "verify_terms" => self.verify_terms = parse_num(key, value)?,
            "oracle_n_max" => self.oracle_n_max = parse_num(key, value)?,
            "oracle_rows" => self.oracle_rows = parse_num(key, value)?,
            "family" => {
                self.family = match value {
                    "default" => FamilySpec::Default,
                    "generated" => FamilySpec::Generated { degrees: vec![12], x_lo: 4.0, x_hi: 10.0, count: 1 },
                    _ => FamilySpec::Explicit(parse_atoms(key, value)?),
                }
            }
            "family_degrees" | "family_x_lo" | "family_x_hi" | "family_count" => {
                let FamilySpec::Generated { degrees, x_lo, x_hi, count } = &mut self.family else {
                    return Err(bad(key, value, "only meaningful with family = generated"));
                };
                match key {
                    "family_degrees" => {
                        *degrees = value.split(',').map(|d| parse_num(key, d.trim())).collect::<Result<_, _>>()?
                    }
                    "family_x_lo" => *x_lo = parse_num(key, value)?,
                    "family_x_hi" => *x_hi = parse_num(key, value)?,
                    _ => *count = parse_num(key, value)?,
                }
            }
            "quadrature_sigma0" => self.quadrature_sigma0 = value.into(),
            "quadrature_height" => self.quadrature_height = (value != "auto").then(|| value.into()),
            "quadrature_steps" => {
                self.quadrature_steps = if value == "auto" { None } else { Some(parse_num(key, value)?) }
            }
            "transform_tol" => self.transform_tol = value.into(),
            "verify_transform_tol" => self.verify_transform_tol = value.into(),
            "transform_check_tol" => self.transform_check_tol = value.into(),
            "identity_tol" => self.identity_tol = value.into(),
            "solve_tol" => self.solve_tol = value.into(),
            "solve_tol_a2" => self.solve_tol_a2 = value.into(),
            "calibration_threshold" => self.calibration_threshold = value.into(),
            "twist_t_max" => self.twist_t_max = value.into(),
            "twist_n_lhs" => self.twist_n_lhs = parse_num(key, value)?,
            "twist_c_max" => self.twist_c_max = parse_num(key, value)?,
            "twist_q_max" => self.twist_q_max = parse_num(key, value)?,
            "twist_atoms" => self.twist_atoms = parse_atoms(key, value)?,
            "mode" => self.mode = value.parse().map_err(|e: voronoi_core::Error| bad(key, value, e.to_string()))?,
            "out_dir" => self.out_dir = PathBuf::from(value),
            "format" => self.format = value.parse().map_err(|e: String| bad(key, value, e))?,
            _ => return Err(ConfigError::UnknownKey(key.into())),
        }
        Ok(())
    }

    /// Every field checked; nothing is computed before this passes.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let p = self.precision_bits;
        if p < Context::MIN_BITS {
            return Err(bad("precision_bits", &p.to_string(), format!("must be at least {}", Context::MIN_BITS)));
        }
        let ctx = Context::new(p).expect("checked");
        let decimal = |key: &str, v: &str, positive: bool| -> Result<(), ConfigError> {
            let x = ctx.parse(v).map_err(|e| bad(key, v, e.to_string()))?;
            if x.is_negative() || (positive && x.is_zero()) {
                return Err(bad(key, v, if positive { "must be positive" } else { "must not be negative" }));
            }
            Ok(())
        };
        decimal("transform_tol", &self.transform_tol, true)?;
        decimal("verify_transform_tol", &self.verify_transform_tol, true)?;
        for (k, v) in [
            ("transform_check_tol", &self.transform_check_tol),
            ("identity_tol", &self.identity_tol),
            ("solve_tol", &self.solve_tol),
            ("solve_tol_a2", &self.solve_tol_a2),
            ("calibration_threshold", &self.calibration_threshold),
        ] {
            decimal(k, v, false)?;
        }
        decimal("twist_t_max", &self.twist_t_max, true)?;
        decimal("quadrature_sigma0", &self.quadrature_sigma0, true)?;
        if let Some(h) = &self.quadrature_height {
            decimal("quadrature_height", h, true)?;
        }
        if self.quadrature_height.is_some() != self.quadrature_steps.is_some() {
            return Err(bad("quadrature_steps", "", "height and steps are given together or both auto"));
        }
        if self.quadrature_steps == Some(0) {
            return Err(bad("quadrature_steps", "0", "must be positive"));
        }
        if self.residue_order_max == 0 {
            return Err(bad("residue_order_max", "0", "must be positive"));
        }
        if self.oracle_n_max == 0 {
            return Err(bad("oracle_n_max", "0", "the table needs n_max >= 1"));
        }
        if self.oracle_rows == 0 {
            return Err(bad("oracle_rows", "0", "must be positive"));
        }
        if self.verify_terms == 0 {
            return Err(bad("verify_terms", "0", "must be positive"));
        }
        if self.unknowns < 2 {
            return Err(bad("unknowns", &self.unknowns.to_string(), "at least a_2 must be unknown"));
        }
        if self.truncation < self.unknowns {
            return Err(bad("truncation", &self.truncation.to_string(), "must be at least the unknown count"));
        }
        if self.twist_n_lhs == 0 || self.twist_c_max == 0 || self.twist_q_max == 0 {
            return Err(bad("twist_*", "0", "twist bounds must be positive"));
        }
        match &self.family {
            FamilySpec::Explicit(v) => check_atoms("family", v, &ctx)?,
            FamilySpec::Generated { degrees, x_lo, x_hi, count } => {
                if degrees.is_empty() || degrees.iter().any(|d| d % 2 == 1) || *count == 0 {
                    return Err(bad("family", "generated", "needs even degrees and a positive count"));
                }
                if !(*x_lo > 0.0 && x_hi >= x_lo) {
                    return Err(bad("family", "generated", format!("bad scale range [{x_lo}, {x_hi}]")));
                }
            }
            FamilySpec::Default => {}
        }
        check_atoms("twist_atoms", &self.twist_atoms, &ctx)
    }

    /// The square-system requirement, checked by the solve command.
    pub fn check_square(&self) -> Result<(), ConfigError> {
        if self.family.len() as u64 + 1 != self.unknowns {
            return Err(bad(
                "unknowns",
                &self.unknowns.to_string(),
                format!("a family of {} atoms needs unknowns = {}", self.family.len(), self.family.len() + 1),
            ));
        }
        Ok(())
    }

    /// Resolved key/value pairs; written back as a config file they
    /// reproduce this run.
    pub fn to_pairs(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        let mut put = |k: &str, v: String| {
            m.insert(k.to_string(), v);
        };
        put("precision_bits", self.precision_bits.to_string());
        put("residue_order_max", self.residue_order_max.to_string());
        put("truncation", self.truncation.to_string());
        put("unknowns", self.unknowns.to_string());
        put("verify_terms", self.verify_terms.to_string());
        put("oracle_n_max", self.oracle_n_max.to_string());
        put("oracle_rows", self.oracle_rows.to_string());
        match &self.family {
            FamilySpec::Default => put("family", "default".into()),
            FamilySpec::Explicit(v) => put("family", atoms_string(v)),
            FamilySpec::Generated { degrees, x_lo, x_hi, count } => {
                put("family", "generated".into());
                put("family_degrees", degrees.iter().map(u32::to_string).collect::<Vec<_>>().join(", "));
                put("family_x_lo", x_lo.to_string());
                put("family_x_hi", x_hi.to_string());
                put("family_count", count.to_string());
            }
        }
        put("quadrature_sigma0", self.quadrature_sigma0.clone());
        put("quadrature_height", self.quadrature_height.clone().unwrap_or_else(|| "auto".into()));
        put("quadrature_steps", self.quadrature_steps.map_or_else(|| "auto".into(), |s| s.to_string()));
        put("transform_tol", self.transform_tol.clone());
        put("verify_transform_tol", self.verify_transform_tol.clone());
        put("transform_check_tol", self.transform_check_tol.clone());
        put("identity_tol", self.identity_tol.clone());
        put("solve_tol", self.solve_tol.clone());
        put("solve_tol_a2", self.solve_tol_a2.clone());
        put("calibration_threshold", self.calibration_threshold.clone());
        put("twist_t_max", self.twist_t_max.clone());
        put("twist_n_lhs", self.twist_n_lhs.to_string());
        put("twist_c_max", self.twist_c_max.to_string());
        put("twist_q_max", self.twist_q_max.to_string());
        put("twist_atoms", atoms_string(&self.twist_atoms));
        put("mode", self.mode.to_string());
        put("out_dir", self.out_dir.display().to_string());
        put("format", self.format.to_string());
        m
    }

    pub fn to_file_string(&self) -> String {
        self.to_pairs().into_iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }
}

fn check_atoms(key: &str, atoms: &[(u32, String)], ctx: &Context) -> Result<(), ConfigError> {
    for (m, x) in atoms {
        if m % 2 == 1 {
            return Err(bad(key, &format!("{m}:{x}"), "degrees must be even"));
        }
        let v = ctx.parse(x).map_err(|e| bad(key, x, e.to_string()))?;
        if v.is_negative() || v.is_zero() {
            return Err(bad(key, x, "scales must be positive"));
        }
    }
    Ok(())
}
