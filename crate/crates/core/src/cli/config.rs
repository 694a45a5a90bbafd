//! JSON configuration: schema, defaults and role resolution.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::CliError;
use crate::auxsearch::{default_card_u, SearchBudget};
use crate::binsim::{Margins, DEFAULT_DELTA};
use crate::probcore::{Alphabet, Axis, JointDistribution};
use crate::regions::Semantics;
use crate::vars::{A, B, C, E};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariableSpec {
    pub name: String,
    pub symbols: Vec<String>,
}

/// A Markov chain X - Y - Z over role names.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainSpec {
    pub x: Vec<String>,
    pub y: Vec<String>,
    pub z: Vec<String>,
}

impl ChainSpec {
    pub fn label(&self) -> String {
        format!("{} - {} - {}", self.x.join(","), self.y.join(","), self.z.join(","))
    }
}

/// Per-command options. Every field is optional in the input file; after
/// [`resolve`] the defaulted ones are filled in.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Options {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub margins: Option<Margins>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub card_u: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub restarts: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_resolution: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ra_grid: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rc_grid: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub block_lengths: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub semantics: Option<Semantics>,
    /// Rows of p(u|a), one per symbol of A.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u: Option<Vec<Vec<f64>>>,
    /// Partition of C's symbols defining V = g(C).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h_b: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    /// Rate point tested for membership: (R_A, R_C, Delta), (R_A, Delta) or
    /// (R_A, Delta_1, ..., Delta_K).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub point: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chains: Option<Vec<ChainSpec>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub variables: Vec<VariableSpec>,
    /// Row-major over `variables`, last variable fastest.
    pub distribution: Vec<f64>,
    /// Variable name to role.
    pub roles: BTreeMap<String, String>,
    #[serde(default)]
    pub options: Options,
}

/// Validated source with variables renamed to their roles.
#[derive(Debug, Clone, PartialEq)]
pub struct Source {
    pub joint: JointDistribution,
    /// Role to original variable name.
    pub roles: BTreeMap<String, String>,
}

/// A fully resolved configuration with the source it describes.
#[derive(Debug, Clone, PartialEq)]
pub struct Resolved {
    pub config: ConfigFile,
    pub source: Source,
}

impl Resolved {
    pub fn options(&self) -> &Options {
        &self.config.options
    }

    pub fn seed(&self) -> u64 {
        self.config.options.seed.unwrap_or(0)
    }

    pub fn budget(&self) -> SearchBudget {
        let o = &self.config.options;
        let d = SearchBudget::default();
        SearchBudget {
            restarts: o.restarts.unwrap_or(d.restarts),
            iterations: o.iterations.unwrap_or(d.iterations),
            grid_resolution: o.grid_resolution.unwrap_or(d.grid_resolution),
            seed: self.seed(),
        }
    }

    pub fn card_u(&self) -> usize {
        self.config.options.card_u.unwrap_or(1)
    }

    /// Lowercase hex SHA-256 of the canonical JSON of the resolved config.
    pub fn digest(&self) -> String {
        digest(&self.config)
    }
}

pub fn digest(config: &ConfigFile) -> String {
    let bytes = serde_json::to_vec(config).expect("config serializes");
    hex::encode(Sha256::digest(bytes))
}

pub fn parse_config_str(text: &str) -> Result<ConfigFile, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

pub fn parse_config(path: &std::path::Path) -> Result<ConfigFile, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_config_str(&text)
}

/// Maps a role string to its canonical variable name.
fn canonical_role(role: &str) -> Option<String> {
    let r = role.trim();
    let long = match r {
        "alice-source" => Some(A),
        "charlie-source" => Some(C),
        "bob-side-info" => Some(B),
        "eve-side-info" => Some(E),
        "A" | "C" | "B" | "E" => Some(r),
        _ => None,
    };
    if let Some(name) = long {
        return Some(name.to_string());
    }
    let mut chars = r.chars();
    let prefix = chars.next()?;
    let digits = chars.as_str();
    let digits = digits.strip_prefix('_').unwrap_or(digits);
    if (prefix == 'B' || prefix == 'E') && !digits.is_empty() && !digits.starts_with('0') {
        if let Ok(k) = digits.parse::<usize>() {
            return Some(format!("{prefix}{k}"));
        }
    }
    None
}

fn check_indexed(roles: &BTreeMap<String, String>, prefix: &str) -> Result<(), CliError> {
    let mut ks: Vec<usize> = roles
        .keys()
        .filter(|r| r.len() > 1 && r.starts_with(prefix))
        .filter_map(|r| r[1..].parse().ok())
        .collect();
    ks.sort_unstable();
    for (i, k) in ks.iter().enumerate() {
        if *k != i + 1 {
            return Err(CliError::Role(format!(
                "indexed roles {prefix}1..{prefix}K must be contiguous, missing {prefix}{}",
                i + 1
            )));
        }
    }
    Ok(())
}

fn validation(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

fn linspace(hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| hi * i as f64 / (n - 1) as f64).collect()
}

fn check_grid(name: &str, grid: &[f64]) -> Result<(), CliError> {
    if grid.is_empty() {
        return Err(validation(format!("options.{name} must not be empty")));
    }
    if grid.iter().any(|r| !r.is_finite() || *r < 0.0) {
        return Err(validation(format!("options.{name} entries must be finite and >= 0")));
    }
    Ok(())
}

fn build_source(cfg: &ConfigFile) -> Result<Source, CliError> {
    if cfg.variables.is_empty() {
        return Err(validation("at least one variable is required"));
    }
    let mut seen = BTreeSet::new();
    for v in &cfg.variables {
        if !seen.insert(v.name.as_str()) {
            return Err(validation(format!("variable `{}` is declared twice", v.name)));
        }
    }
    let expected = cfg
        .variables
        .iter()
        .try_fold(1usize, |acc, v| acc.checked_mul(v.symbols.len()))
        .ok_or_else(|| validation("joint alphabet size overflows"))?;
    if cfg.distribution.len() != expected {
        return Err(validation(format!(
            "distribution has {} entries, the declared variables require {expected}",
            cfg.distribution.len()
        )));
    }

    let mut roles: BTreeMap<String, String> = BTreeMap::new();
    for (var, role) in &cfg.roles {
        if !seen.contains(var.as_str()) {
            return Err(CliError::Role(format!("role assigned to undeclared variable `{var}`")));
        }
        let canon = canonical_role(role).ok_or_else(|| CliError::Role(format!("unknown role `{role}` for `{var}`")))?;
        if let Some(prev) = roles.insert(canon.clone(), var.clone()) {
            return Err(CliError::Role(format!("role {canon} assigned to both `{prev}` and `{var}`")));
        }
    }
    if !roles.contains_key(A) {
        return Err(CliError::Role("exactly one variable must have role A".into()));
    }
    if roles.contains_key(B) && roles.contains_key("B1") {
        return Err(CliError::Role("use either B or B1..BK, not both".into()));
    }
    if roles.contains_key(E) && roles.contains_key("E1") {
        return Err(CliError::Role("use either E or E1..EK, not both".into()));
    }
    check_indexed(&roles, B)?;
    check_indexed(&roles, E)?;

    let axes = cfg
        .variables
        .iter()
        .map(|v| Ok(Axis::new(v.name.clone(), Alphabet::new(v.name.clone(), v.symbols.clone())?)))
        .collect::<crate::Result<Vec<_>>>()?;
    let joint = JointDistribution::build(axes, cfg.distribution.clone())?;
    let keep: Vec<&str> = cfg
        .variables
        .iter()
        .map(|v| v.name.as_str())
        .filter(|n| roles.values().any(|r| r == n))
        .collect();
    let mut joint = joint.marginal(&keep)?;
    // two passes so that e.g. a variable called `A` can take role C
    for (role, var) in &roles {
        joint = joint.rename(var, &format!("\u{1}{role}"))?;
    }
    for role in roles.keys() {
        joint = joint.rename(&format!("\u{1}{role}"), role)?;
    }
    Ok(Source { joint, roles })
}

/// Validates the file, builds the source and fills every defaulted option.
/// `seed` overrides `options.seed`.
pub fn resolve(mut cfg: ConfigFile, seed: Option<u64>) -> Result<Resolved, CliError> {
    let source = build_source(&cfg)?;
    let j = &source.joint;
    let na = j.axis(A)?.size();
    let o = &mut cfg.options;
    if let Some(s) = seed {
        o.seed = Some(s);
    }
    o.seed.get_or_insert(0);
    let margins = *o.margins.get_or_insert_with(Margins::default);
    if margins.all().iter().any(|m| !(*m > 0.0) || !m.is_finite()) {
        return Err(validation("options.margins must be positive"));
    }
    let delta = *o.delta.get_or_insert(DEFAULT_DELTA);
    if !(delta > 0.0 && delta < 1.0) {
        return Err(validation(format!("options.delta = {delta} outside (0, 1)")));
    }
    if *o.card_u.get_or_insert(default_card_u(na)) == 0 {
        return Err(validation("options.card_u must be at least 1"));
    }
    let d = SearchBudget::default();
    o.restarts.get_or_insert(d.restarts);
    o.iterations.get_or_insert(d.iterations);
    o.grid_resolution.get_or_insert(d.grid_resolution);
    let ra_hi = (na as f64).log2();
    check_grid("ra_grid", o.ra_grid.get_or_insert_with(|| linspace(ra_hi, 5)))?;
    let rc_hi = j.axis(C).map(|ax| (ax.size() as f64).log2()).unwrap_or(0.0);
    check_grid("rc_grid", o.rc_grid.get_or_insert_with(|| linspace(rc_hi, 5)))?;
    let ns = o.block_lengths.get_or_insert_with(|| vec![8, 12]);
    if ns.is_empty() || ns.contains(&0) {
        return Err(validation("options.block_lengths must be nonempty and positive"));
    }
    if *o.trials.get_or_insert(1000) == 0 {
        return Err(validation("options.trials must be at least 1"));
    }
    o.semantics.get_or_insert(Semantics::AsWritten);
    if let Some(p) = &o.point {
        if p.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(validation("options.point entries must be finite and >= 0"));
        }
    }
    let resolved = Resolved { config: cfg, source };
    resolved.budget().validate()?;
    Ok(resolved)
}

#[cfg(test)]
mod tests {
    use super::*;

    const DSBS: &str = r#"{
        "variables": [{"name": "x", "symbols": ["0", "1"]}, {"name": "y", "symbols": ["0", "1"]}],
        "distribution": [0.45, 0.05, 0.05, 0.45],
        "roles": {"x": "A", "y": "charlie-source"}
    }"#;

    #[test]
    fn defaults_filled() {
        let r = resolve(parse_config_str(DSBS).unwrap(), None).unwrap();
        let o = r.options();
        assert_eq!(o.card_u, Some(4));
        assert_eq!(o.restarts, Some(32));
        assert_eq!(o.seed, Some(0));
        assert_eq!(o.delta, Some(0.15));
        assert_eq!(o.margins, Some(Margins::uniform(0.2)));
        assert_eq!(o.rc_grid.as_deref(), Some(&[0.0, 0.25, 0.5, 0.75, 1.0][..]));
        assert_eq!(r.source.joint.names(), vec!["A", "C"]);
    }

    #[test]
    fn round_trip_digest() {
        let r = resolve(parse_config_str(DSBS).unwrap(), Some(9)).unwrap();
        let text = serde_json::to_string_pretty(&r.config).unwrap();
        let again = resolve(parse_config_str(&text).unwrap(), None).unwrap();
        assert_eq!(again.config, r.config);
        assert_eq!(again.digest(), r.digest());
    }

    #[test]
    fn wrong_length() {
        let bad = DSBS.replace("0.45, 0.05, 0.05, 0.45", "0.5, 0.5");
        let err = resolve(parse_config_str(&bad).unwrap(), None).unwrap_err();
        assert!(matches!(&err, CliError::Validation(m) if m.contains("2 entries") && m.contains("require 4")));
    }

    #[test]
    fn duplicate_role() {
        let bad = DSBS.replace("charlie-source", "A");
        assert!(matches!(resolve(parse_config_str(&bad).unwrap(), None), Err(CliError::Role(_))));
    }

    #[test]
    fn parse_position() {
        let err = parse_config_str("{\n  \"variables\": [,]\n}").unwrap_err();
        assert!(matches!(err, CliError::Parse { line: 2, .. }));
    }

    #[test]
    fn swapped_names() {
        let cfg = DSBS.replace("\"x\"", "\"C\"").replace("\"y\"", "\"A\"");
        let r = resolve(parse_config_str(&cfg).unwrap(), None).unwrap();
        assert_eq!(r.source.roles.get(A).map(String::as_str), Some("C"));
        assert_eq!(r.source.joint.names(), vec!["A", "C"]);
    }

    #[test]
    fn indexed_roles() {
        assert_eq!(canonical_role("B_2").as_deref(), Some("B2"));
        assert_eq!(canonical_role("E1").as_deref(), Some("E1"));
        assert_eq!(canonical_role("B0"), None);
        assert_eq!(canonical_role("Z"), None);
    }
}
