//! INI-style experiment configuration.
//!
//! A config file holds `[section]` headers and `key = value` lines; `#`
//! starts a comment anywhere on a line. Parsing is strict: unknown
//! sections or keys, duplicate keys, and inconsistent combinations are all
//! rejected with the offending `section.key` and line number, so a typo
//! never silently falls back to a default.
//!
//! Each scenario kind reads its own key set (documented in the repository
//! README); `[scenario]` is shared by all of them.

use std::collections::HashSet;
use std::path::Path;

use super::HarnessError;
use crate::dynamics::{build_unmodeled_map, unmodeled_kinds, UnmodeledMap};

fn conf(msg: String) -> HarnessError {
    HarnessError::Config(msg)
}

// ---------------------------------------------------------------------------
// Raw INI layer
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
struct Entry {
    section: String,
    key: String,
    value: String,
    line: usize,
}

fn parse_ini(text: &str) -> Result<Vec<Entry>, HarnessError> {
    let mut entries = Vec::new();
    let mut section: Option<String> = None;
    let mut seen: HashSet<(String, String)> = HashSet::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let uncommented = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let line = uncommented.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('[') {
            let Some(name) = rest.strip_suffix(']') else {
                return Err(conf(format!("line {line_no}: unterminated section header `{line}`")));
            };
            let name = name.trim();
            if name.is_empty() {
                return Err(conf(format!("line {line_no}: empty section name")));
            }
            section = Some(name.to_string());
            continue;
        }
        let Some(eq) = line.find('=') else {
            return Err(conf(format!("line {line_no}: expected `key = value`, got `{line}`")));
        };
        let key = line[..eq].trim();
        let value = line[eq + 1..].trim();
        if key.is_empty() {
            return Err(conf(format!("line {line_no}: empty key")));
        }
        let Some(sec) = section.clone() else {
            return Err(conf(format!("line {line_no}: key `{key}` appears before any [section]")));
        };
        if !seen.insert((sec.clone(), key.to_string())) {
            return Err(conf(format!("line {line_no}: duplicate key `{sec}.{key}`")));
        }
        entries.push(Entry { section: sec, key: key.to_string(), value: value.to_string(), line: line_no });
    }
    Ok(entries)
}

/// Typed access over the raw entries, tracking which keys were consumed so
/// leftovers can be reported as unknown.
struct Bag {
    entries: Vec<Entry>,
    used: Vec<bool>,
}

impl Bag {
    fn new(entries: Vec<Entry>) -> Bag {
        let used = vec![false; entries.len()];
        Bag { entries, used }
    }

    fn take(&mut self, section: &str, key: &str) -> Option<(String, usize)> {
        for (i, e) in self.entries.iter().enumerate() {
            if !self.used[i] && e.section == section && e.key == key {
                self.used[i] = true;
                return Some((e.value.clone(), e.line));
            }
        }
        None
    }

    fn str_or(&mut self, section: &str, key: &str, default: &str) -> String {
        self.take(section, key).map_or_else(|| default.to_string(), |(v, _)| v)
    }

    fn str_opt(&mut self, section: &str, key: &str) -> Option<String> {
        self.take(section, key).map(|(v, _)| v)
    }

    fn f64_opt(&mut self, section: &str, key: &str) -> Result<Option<f64>, HarnessError> {
        match self.take(section, key) {
            None => Ok(None),
            Some((v, line)) => parse_f64(section, key, &v, line).map(Some),
        }
    }

    fn f64_or(&mut self, section: &str, key: &str, default: f64) -> Result<f64, HarnessError> {
        Ok(self.f64_opt(section, key)?.unwrap_or(default))
    }

    fn usize_opt(&mut self, section: &str, key: &str) -> Result<Option<usize>, HarnessError> {
        match self.take(section, key) {
            None => Ok(None),
            Some((v, line)) => v.parse::<usize>().map(Some).map_err(|_| {
                conf(format!("{section}.{key} (line {line}): cannot parse `{v}` as a nonnegative integer"))
            }),
        }
    }

    fn usize_or(&mut self, section: &str, key: &str, default: usize) -> Result<usize, HarnessError> {
        Ok(self.usize_opt(section, key)?.unwrap_or(default))
    }

    fn u64_or(&mut self, section: &str, key: &str, default: u64) -> Result<u64, HarnessError> {
        match self.take(section, key) {
            None => Ok(default),
            Some((v, line)) => v.parse::<u64>().map_err(|_| {
                conf(format!("{section}.{key} (line {line}): cannot parse `{v}` as a nonnegative integer"))
            }),
        }
    }

    fn bool_or(&mut self, section: &str, key: &str, default: bool) -> Result<bool, HarnessError> {
        match self.take(section, key) {
            None => Ok(default),
            Some((v, line)) => match v.as_str() {
                "true" => Ok(true),
                "false" => Ok(false),
                other => Err(conf(format!(
                    "{section}.{key} (line {line}): expected `true` or `false`, got `{other}`"
                ))),
            },
        }
    }

    fn f64_list_opt(&mut self, section: &str, key: &str) -> Result<Option<Vec<f64>>, HarnessError> {
        match self.take(section, key) {
            None => Ok(None),
            Some((v, line)) => parse_f64_list(section, key, &v, line).map(Some),
        }
    }

    fn usize_list_opt(
        &mut self,
        section: &str,
        key: &str,
    ) -> Result<Option<Vec<usize>>, HarnessError> {
        match self.take(section, key) {
            None => Ok(None),
            Some((v, line)) => {
                let mut out = Vec::new();
                for item in v.split(',') {
                    let item = item.trim();
                    let parsed = item.parse::<usize>().map_err(|_| {
                        conf(format!(
                            "{section}.{key} (line {line}): cannot parse `{item}` as a nonnegative integer"
                        ))
                    })?;
                    out.push(parsed);
                }
                if out.is_empty() {
                    return Err(conf(format!("{section}.{key} (line {line}): empty list")));
                }
                Ok(Some(out))
            }
        }
    }

    fn require(&mut self, section: &str, key: &str) -> Result<(String, usize), HarnessError> {
        self.take(section, key)
            .ok_or_else(|| conf(format!("missing required key {section}.{key}")))
    }

    fn require_f64_list(&mut self, section: &str, key: &str) -> Result<Vec<f64>, HarnessError> {
        let (v, line) = self.require(section, key)?;
        parse_f64_list(section, key, &v, line)
    }

    /// Every entry must have been consumed by now.
    fn finish(self) -> Result<(), HarnessError> {
        let mut unknown: Vec<String> = Vec::new();
        for (i, e) in self.entries.iter().enumerate() {
            if !self.used[i] {
                unknown.push(format!("{}.{} (line {})", e.section, e.key, e.line));
            }
        }
        if unknown.is_empty() {
            Ok(())
        } else {
            Err(conf(format!(
                "unknown key{} for this scenario: {}",
                if unknown.len() == 1 { "" } else { "s" },
                unknown.join(", ")
            )))
        }
    }
}

fn parse_f64(section: &str, key: &str, value: &str, line: usize) -> Result<f64, HarnessError> {
    let parsed: f64 = value.parse().map_err(|_| {
        conf(format!("{section}.{key} (line {line}): cannot parse `{value}` as a number"))
    })?;
    if !parsed.is_finite() {
        return Err(conf(format!("{section}.{key} (line {line}): value must be finite")));
    }
    Ok(parsed)
}

fn parse_f64_list(
    section: &str,
    key: &str,
    value: &str,
    line: usize,
) -> Result<Vec<f64>, HarnessError> {
    let mut out = Vec::new();
    for item in value.split(',') {
        let item = item.trim();
        out.push(parse_f64(section, key, item, line)?);
    }
    if out.is_empty() {
        return Err(conf(format!("{section}.{key} (line {line}): empty list")));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Typed configuration
// ---------------------------------------------------------------------------

/// The four built-in experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioKind {
    EstimationSweep,
    Regret,
    LowerBoundProbe,
    ActuatorDemo,
}

impl ScenarioKind {
    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::EstimationSweep => "estimation_sweep",
            ScenarioKind::Regret => "regret",
            ScenarioKind::LowerBoundProbe => "lower_bound_probe",
            ScenarioKind::ActuatorDemo => "actuator_demo",
        }
    }

    pub fn from_name(name: &str) -> Option<ScenarioKind> {
        match name {
            "estimation_sweep" => Some(ScenarioKind::EstimationSweep),
            "regret" => Some(ScenarioKind::Regret),
            "lower_bound_probe" => Some(ScenarioKind::LowerBoundProbe),
            "actuator_demo" => Some(ScenarioKind::ActuatorDemo),
            _ => None,
        }
    }
}

/// Keys shared by every scenario (`[scenario]` section).
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioCommon {
    pub kind: ScenarioKind,
    pub seed: u64,
    pub replications: usize,
    /// Output CSV path; may instead be supplied on the command line.
    pub output: Option<String>,
    /// Worker-thread count; `None` uses all available cores. Results do
    /// not depend on this value.
    pub workers: Option<usize>,
}

/// The `[unmodeled]` section: which residual map runs inside the plant.
#[derive(Debug, Clone, PartialEq)]
pub struct UnmodeledConfig {
    pub kind: String,
    pub alpha: f64,
    pub beta: f64,
    pub c: f64,
}

impl UnmodeledConfig {
    pub fn none() -> UnmodeledConfig {
        UnmodeledConfig { kind: "none".to_string(), alpha: 0.0, beta: 0.0, c: 0.0 }
    }

    /// Fresh map instance for one simulation run.
    pub fn build(&self, dim: usize) -> Box<dyn UnmodeledMap> {
        build_unmodeled_map(&self.kind, dim, self.alpha, self.beta, self.c)
            .expect("kind validated during config parsing")
    }
}

/// `estimation_sweep`: open-loop identification error versus input energy
/// (or horizon) for white-noise and multi-sine inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub common: ScenarioCommon,
    /// Companion-form last row of the plant.
    pub coeffs: Vec<f64>,
    pub sigma: f64,
    pub unmodeled: UnmodeledConfig,
    /// Multi-sine design frequencies (cycles per step, in (0, 1/2]).
    pub frequencies: Vec<f64>,
    pub energies: Vec<f64>,
    pub horizons: Vec<usize>,
}

impl SweepConfig {
    /// The swept axis: energies when several are given, otherwise horizons.
    pub fn sweeps_horizon(&self) -> bool {
        self.horizons.len() > 1
    }
}

/// Process-noise specification for the regret experiment.
#[derive(Debug, Clone, PartialEq)]
pub enum NoiseSpec {
    /// Fixed standard deviation.
    Sigma(f64),
    /// Noise-to-signal ratios; each becomes one experimental condition and
    /// is converted to a standard deviation by a noise-free pilot run.
    Ratios(Vec<f64>),
}

/// How long the adaptive run lasts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HorizonSpec {
    /// Exactly this many doubling epochs.
    Epochs(usize),
    /// Enough epochs to cover this many steps; per-step output rows are
    /// truncated to the requested count.
    TotalSteps(usize),
}

/// `regret`: the adaptive epoch-doubling controller against its
/// Gaussian-exploration twin.
#[derive(Debug, Clone, PartialEq)]
pub struct RegretConfig {
    pub common: ScenarioCommon,
    pub coeffs: Vec<f64>,
    pub noise: NoiseSpec,
    pub unmodeled: UnmodeledConfig,
    pub frequency_pool: Vec<f64>,
    /// State cost `Q = q I`.
    pub q: f64,
    /// Input cost `R = r I`.
    pub r: f64,
    pub t0: usize,
    pub amp_exponent: f64,
    pub base_amplitude: f64,
    pub horizon: HorizonSpec,
    pub perturb_scale: f64,
    pub optimize_frequencies: bool,
}

/// `lower_bound_probe`: the cross-term `tau` under white-noise versus
/// multi-sine inputs across horizons.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeConfig {
    pub common: ScenarioCommon,
    pub coeffs: Vec<f64>,
    pub sigma: f64,
    pub unmodeled: UnmodeledConfig,
    pub frequencies: Vec<f64>,
    pub energy: f64,
    pub horizons: Vec<usize>,
}

/// `actuator_demo`: first-order low-pass actuator attenuation of spectral
/// lines and whitening loss.
#[derive(Debug, Clone, PartialEq)]
pub struct ActuatorConfig {
    pub common: ScenarioCommon,
    pub lambda: f64,
    pub horizon: usize,
    /// Samples discarded before the analysis window.
    pub burn_in: usize,
    /// Analysis window length; every frequency must sit on its DFT grid.
    pub window: usize,
    pub frequencies: Vec<f64>,
    /// Per-cosine amplitude of the multi-sine arm.
    pub amplitude: f64,
    /// Standard deviation of the white-noise arm.
    pub noise_std: f64,
}

/// A parsed configuration for exactly one scenario.
#[derive(Debug, Clone, PartialEq)]
pub enum ExperimentConfig {
    Sweep(SweepConfig),
    Regret(RegretConfig),
    Probe(ProbeConfig),
    Actuator(ActuatorConfig),
}

impl ExperimentConfig {
    pub fn kind(&self) -> ScenarioKind {
        self.common().kind
    }

    pub fn common(&self) -> &ScenarioCommon {
        match self {
            ExperimentConfig::Sweep(c) => &c.common,
            ExperimentConfig::Regret(c) => &c.common,
            ExperimentConfig::Probe(c) => &c.common,
            ExperimentConfig::Actuator(c) => &c.common,
        }
    }

    pub fn common_mut(&mut self) -> &mut ScenarioCommon {
        match self {
            ExperimentConfig::Sweep(c) => &mut c.common,
            ExperimentConfig::Regret(c) => &mut c.common,
            ExperimentConfig::Probe(c) => &mut c.common,
            ExperimentConfig::Actuator(c) => &mut c.common,
        }
    }
}

// ---------------------------------------------------------------------------
// Section parsers
// ---------------------------------------------------------------------------

fn parse_common(bag: &mut Bag) -> Result<ScenarioCommon, HarnessError> {
    let (kind_name, line) = bag.require("scenario", "kind")?;
    let kind = ScenarioKind::from_name(&kind_name).ok_or_else(|| {
        conf(format!(
            "scenario.kind (line {line}): unknown scenario `{kind_name}` (expected one of \
             estimation_sweep, regret, lower_bound_probe, actuator_demo)"
        ))
    })?;
    let seed = bag.u64_or("scenario", "seed", 0)?;
    let replications = bag.usize_or("scenario", "replications", 1)?;
    if replications < 1 {
        return Err(conf("scenario.replications: must be at least 1".to_string()));
    }
    let output = bag.str_opt("scenario", "output");
    let workers = bag.usize_opt("scenario", "workers")?;
    if workers == Some(0) {
        return Err(conf("scenario.workers: must be at least 1".to_string()));
    }
    Ok(ScenarioCommon { kind, seed, replications, output, workers })
}

fn parse_coeffs(bag: &mut Bag) -> Result<Vec<f64>, HarnessError> {
    let coeffs = bag.require_f64_list("plant", "coeffs")?;
    Ok(coeffs)
}

fn check_frequencies(freqs: &[f64], context: &str) -> Result<(), HarnessError> {
    if freqs.is_empty() {
        return Err(conf(format!("{context}: needs at least one frequency")));
    }
    for f in freqs {
        if !(*f > 0.0 && *f <= 0.5) {
            return Err(conf(format!(
                "{context}: frequency {f} outside (0, 0.5] cycles per step"
            )));
        }
    }
    Ok(())
}

fn parse_unmodeled(
    bag: &mut Bag,
    default_kind: &str,
    defaults: Option<(f64, f64, f64)>,
) -> Result<UnmodeledConfig, HarnessError> {
    let kind = bag.str_or("unmodeled", "kind", default_kind);
    if !unmodeled_kinds().contains(&kind.as_str()) {
        return Err(conf(format!(
            "unmodeled.kind: unknown kind `{kind}` (expected one of {})",
            unmodeled_kinds().join(", ")
        )));
    }
    let alpha = bag.f64_opt("unmodeled", "alpha")?;
    let beta = bag.f64_opt("unmodeled", "beta")?;
    let c = bag.f64_opt("unmodeled", "c")?;
    if kind == "none" {
        if alpha.is_some() || beta.is_some() || c.is_some() {
            return Err(conf(
                "unmodeled.alpha/beta/c are set but unmodeled.kind is `none`".to_string(),
            ));
        }
        return Ok(UnmodeledConfig::none());
    }
    let (da, db, dc) = match defaults {
        Some(d) => d,
        None => {
            if alpha.is_none() || beta.is_none() || c.is_none() {
                return Err(conf(format!(
                    "unmodeled.kind = {kind} requires unmodeled.alpha, unmodeled.beta, and unmodeled.c"
                )));
            }
            (0.0, 0.0, 0.0)
        }
    };
    let alpha = alpha.unwrap_or(da);
    let beta = beta.unwrap_or(db);
    let c = c.unwrap_or(dc);
    if alpha.abs() >= 1.0 {
        return Err(conf(format!("unmodeled.alpha: filter pole must satisfy |alpha| < 1, got {alpha}")));
    }
    Ok(UnmodeledConfig { kind, alpha, beta, c })
}

fn parse_sweep(mut bag: Bag, common: ScenarioCommon) -> Result<SweepConfig, HarnessError> {
    let coeffs = parse_coeffs(&mut bag)?;
    let d = coeffs.len() + 1;
    let sigma = {
        let (v, line) = bag.require("plant", "sigma")?;
        parse_f64("plant", "sigma", &v, line)?
    };
    if sigma < 0.0 {
        return Err(conf("plant.sigma: must be nonnegative".to_string()));
    }
    let unmodeled = parse_unmodeled(&mut bag, "none", None)?;
    let frequencies = bag.require_f64_list("input", "frequencies")?;
    check_frequencies(&frequencies, "input.frequencies")?;
    let energies = bag
        .f64_list_opt("input", "energies")?
        .unwrap_or_else(|| vec![1.0, 5.0, 10.0, 50.0, 100.0, 500.0]);
    for e in &energies {
        if *e <= 0.0 {
            return Err(conf(format!("input.energies: energy must be positive, got {e}")));
        }
    }
    let horizons = bag.usize_list_opt("input", "horizons")?.unwrap_or_else(|| vec![500]);
    for h in &horizons {
        if *h < 2 * d {
            return Err(conf(format!(
                "input.horizons: horizon {h} too short to identify a {d}-dimensional regressor \
                 (need at least {})",
                2 * d
            )));
        }
    }
    if energies.len() > 1 && horizons.len() > 1 {
        return Err(conf(
            "the sweep varies one axis at a time: input.energies and input.horizons cannot both \
             list several values"
                .to_string(),
        ));
    }
    bag.finish()?;
    Ok(SweepConfig { common, coeffs, sigma, unmodeled, frequencies, energies, horizons })
}

fn parse_regret(mut bag: Bag, common: ScenarioCommon) -> Result<RegretConfig, HarnessError> {
    let coeffs = parse_coeffs(&mut bag)?;
    let d = coeffs.len() + 1;
    let sigma = bag.f64_opt("plant", "sigma")?;
    let ratios = bag.f64_list_opt("plant", "noise_ratio")?;
    let noise = match (sigma, ratios) {
        (Some(s), None) => {
            if s < 0.0 {
                return Err(conf("plant.sigma: must be nonnegative".to_string()));
            }
            NoiseSpec::Sigma(s)
        }
        (None, Some(rs)) => {
            for r in &rs {
                if *r <= 0.0 {
                    return Err(conf(format!(
                        "plant.noise_ratio: ratios must be positive, got {r}"
                    )));
                }
            }
            NoiseSpec::Ratios(rs)
        }
        (Some(_), Some(_)) => {
            return Err(conf(
                "set exactly one of plant.sigma and plant.noise_ratio, not both".to_string(),
            ))
        }
        (None, None) => {
            return Err(conf("set one of plant.sigma and plant.noise_ratio".to_string()))
        }
    };
    let unmodeled = parse_unmodeled(&mut bag, "none", None)?;
    let frequency_pool = bag.require_f64_list("input", "frequencies")?;
    check_frequencies(&frequency_pool, "input.frequencies")?;
    let needed = d.div_ceil(2);
    if frequency_pool.len() < needed {
        return Err(conf(format!(
            "input.frequencies: the doubling loop excites ceil(d/2) = {needed} lines for this \
             plant, got {} candidates",
            frequency_pool.len()
        )));
    }
    let q = bag.f64_or("control", "q", 1.0)?;
    if q < 0.0 {
        return Err(conf("control.q: must be nonnegative".to_string()));
    }
    let r = bag.f64_or("control", "r", 1.0)?;
    if r <= 0.0 {
        return Err(conf("control.r: must be positive".to_string()));
    }
    let t0 = bag.usize_or("control", "t0", 50)?;
    if t0 < 2 * d {
        return Err(conf(format!(
            "control.t0: base epoch length {t0} too short for this plant (need at least {})",
            2 * d
        )));
    }
    let amp_exponent = bag.f64_or("control", "amp_exponent", -0.25)?;
    let base_amplitude = bag.f64_or("control", "base_amplitude", 1.0)?;
    if base_amplitude <= 0.0 {
        return Err(conf("control.base_amplitude: must be positive".to_string()));
    }
    let num_epochs = bag.usize_opt("control", "num_epochs")?;
    let total_steps = bag.usize_opt("control", "total_steps")?;
    let horizon = match (num_epochs, total_steps) {
        (Some(e), None) => {
            if e < 1 {
                return Err(conf("control.num_epochs: must be at least 1".to_string()));
            }
            HorizonSpec::Epochs(e)
        }
        (None, Some(s)) => {
            if s < 1 {
                return Err(conf("control.total_steps: must be at least 1".to_string()));
            }
            HorizonSpec::TotalSteps(s)
        }
        (Some(_), Some(_)) => {
            return Err(conf(
                "set exactly one of control.num_epochs and control.total_steps, not both"
                    .to_string(),
            ))
        }
        (None, None) => {
            return Err(conf(
                "set one of control.num_epochs and control.total_steps".to_string(),
            ))
        }
    };
    let perturb_scale = bag.f64_or("control", "perturb_scale", 0.0)?;
    if perturb_scale < 0.0 {
        return Err(conf("control.perturb_scale: must be nonnegative".to_string()));
    }
    let optimize_frequencies = bag.bool_or("control", "optimize_frequencies", false)?;
    bag.finish()?;
    Ok(RegretConfig {
        common,
        coeffs,
        noise,
        unmodeled,
        frequency_pool,
        q,
        r,
        t0,
        amp_exponent,
        base_amplitude,
        horizon,
        perturb_scale,
        optimize_frequencies,
    })
}

fn parse_probe(mut bag: Bag, common: ScenarioCommon) -> Result<ProbeConfig, HarnessError> {
    let coeffs = parse_coeffs(&mut bag)?;
    let d = coeffs.len() + 1;
    let sigma = bag.f64_or("plant", "sigma", 0.0)?;
    if sigma < 0.0 {
        return Err(conf("plant.sigma: must be nonnegative".to_string()));
    }
    let unmodeled = parse_unmodeled(&mut bag, "high_pass_linear", Some((0.1, 0.9, 1.0)))?;
    let frequencies = bag.require_f64_list("input", "frequencies")?;
    check_frequencies(&frequencies, "input.frequencies")?;
    // At level E0 the white-noise arm has variance E0^2 while the
    // multi-sine carries realized energy T * E0, so the white-noise cross
    // term grows with E0 relative to the multi-sine's; the default sits
    // mid-grid where that contrast is decisive.
    let energy = bag.f64_or("input", "energy", 5.0)?;
    if energy <= 0.0 {
        return Err(conf("input.energy: must be positive".to_string()));
    }
    let horizons =
        bag.usize_list_opt("input", "horizons")?.unwrap_or_else(|| vec![500, 1000, 2000]);
    for h in &horizons {
        if *h < 2 * d {
            return Err(conf(format!(
                "input.horizons: horizon {h} too short for this plant (need at least {})",
                2 * d
            )));
        }
    }
    bag.finish()?;
    Ok(ProbeConfig { common, coeffs, sigma, unmodeled, frequencies, energy, horizons })
}

fn parse_actuator(mut bag: Bag, common: ScenarioCommon) -> Result<ActuatorConfig, HarnessError> {
    if common.replications != 1 {
        return Err(conf(
            "scenario.replications: the actuator demo runs a single replication".to_string(),
        ));
    }
    let lambda = bag.f64_or("actuator", "lambda", 0.3)?;
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(conf(format!("actuator.lambda: must lie in (0, 1], got {lambda}")));
    }
    let horizon = bag.usize_or("actuator", "horizon", 10_000)?;
    let burn_in = bag.usize_or("actuator", "burn_in", 1_000)?;
    let window = bag.usize_or("actuator", "window", 2_000)?;
    if window < 4 {
        return Err(conf("actuator.window: analysis window too short".to_string()));
    }
    if horizon < burn_in + window {
        return Err(conf(format!(
            "actuator.horizon: {horizon} steps cannot hold burn_in {burn_in} plus window {window}"
        )));
    }
    let frequencies =
        bag.f64_list_opt("input", "frequencies")?.unwrap_or_else(|| vec![0.01, 0.05]);
    check_frequencies(&frequencies, "input.frequencies")?;
    for f in &frequencies {
        let cycles = f * window as f64;
        if (cycles - cycles.round()).abs() > 1e-9 || cycles.round() < 1.0 {
            return Err(conf(format!(
                "input.frequencies: {f} is off the DFT grid of the {window}-sample analysis \
                 window, so its line estimate would leak"
            )));
        }
    }
    let amplitude = bag.f64_or("input", "amplitude", 1.0)?;
    if amplitude <= 0.0 {
        return Err(conf("input.amplitude: must be positive".to_string()));
    }
    let noise_std = bag.f64_or("input", "noise_std", 1.0)?;
    if noise_std <= 0.0 {
        return Err(conf("input.noise_std: must be positive".to_string()));
    }
    bag.finish()?;
    Ok(ActuatorConfig {
        common,
        lambda,
        horizon,
        burn_in,
        window,
        frequencies,
        amplitude,
        noise_std,
    })
}

/// Parse a configuration file's text into a typed scenario config.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, HarnessError> {
    let mut bag = Bag::new(parse_ini(text)?);
    let common = parse_common(&mut bag)?;
    match common.kind {
        ScenarioKind::EstimationSweep => parse_sweep(bag, common).map(ExperimentConfig::Sweep),
        ScenarioKind::Regret => parse_regret(bag, common).map(ExperimentConfig::Regret),
        ScenarioKind::LowerBoundProbe => parse_probe(bag, common).map(ExperimentConfig::Probe),
        ScenarioKind::ActuatorDemo => parse_actuator(bag, common).map(ExperimentConfig::Actuator),
    }
}

/// Read and parse a configuration file.
pub fn load_config(path: &Path) -> Result<ExperimentConfig, HarnessError> {
    let text = std::fs::read_to_string(path)?;
    parse_config(&text)
}
