//! JSON run configurations and their resolution into experiments.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::path::PathBuf;
use std::sync::Arc;

use multipulse::analysis::{grid_1d, grid_2d, log_grid, Axis, ErrorModel, Experiment, GridPoint};
use multipulse::encoded::{heisenberg_logical, p3_bb1, p3_sequence, Encoding, LogicalAxis};
use multipulse::pauli::{parse_coefficient, Hamiltonian};
use multipulse::sequence::{
    bb1_j, bb1_w, bb1_wj, wj_chain, ChainControls, ControlLabel, Pulse, PulseSequence,
};
use multipulse::unitary::{evolve, Subspace, Unitary};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A configuration problem; the CLI reports these as usage errors.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn bad(msg: impl Into<String>) -> ConfigError {
    ConfigError(msg.into())
}

/// An angle in radians that remembers how it was written, so `"pi/4"`
/// survives a round trip through a metadata sidecar.
#[derive(Debug, Clone, PartialEq)]
pub struct Angle {
    text: Option<String>,
    value: f64,
}

impl Angle {
    pub fn radians(value: f64) -> Self {
        Self { text: None, value }
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        Ok(Self {
            text: Some(text.to_string()),
            value: parse_angle(text)?,
        })
    }

    pub fn value(&self) -> f64 {
        self.value
    }
}

/// Radians as a number, `p/q`, or a rational multiple of π such as
/// `"pi/4"`, `"-3pi/4"`, `"3*pi/2"` or `"π"`.
pub fn parse_angle(text: &str) -> Result<f64, ConfigError> {
    let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let t = t.replace('π', "pi");
    let Some(at) = t.find("pi") else {
        return parse_coefficient(&t).map_err(|e| bad(format!("angle '{text}': {e}")));
    };
    let (head, tail) = (&t[..at], &t[at + 2..]);
    let head = head.strip_suffix('*').unwrap_or(head);
    let factor = match head {
        "" | "+" => 1.0,
        "-" => -1.0,
        h => parse_coefficient(h).map_err(|e| bad(format!("angle '{text}': {e}")))?,
    };
    let divisor = match tail {
        "" => 1.0,
        d => {
            let q = d
                .strip_prefix('/')
                .ok_or_else(|| bad(format!("angle '{text}': expected '/' after pi")))?;
            parse_coefficient(q).map_err(|e| bad(format!("angle '{text}': {e}")))?
        }
    };
    if divisor == 0.0 {
        return Err(bad(format!("angle '{text}': division by zero")));
    }
    Ok(factor * PI / divisor)
}

impl Serialize for Angle {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match &self.text {
            Some(t) => s.serialize_str(t),
            None => s.serialize_f64(self.value),
        }
    }
}

impl<'de> Deserialize<'de> for Angle {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Number(v) => Ok(Angle::radians(v)),
            Raw::Text(t) => Angle::parse(&t).map_err(D::Error::custom),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AxisName {
    Z,
    X,
}

impl From<AxisName> for LogicalAxis {
    fn from(a: AxisName) -> Self {
        match a {
            AxisName::Z => LogicalAxis::Z,
            AxisName::X => LogicalAxis::X,
        }
    }
}

fn default_axis() -> AxisName {
    AxisName::Z
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SequenceSpec {
    Uncorrected {
        theta: Angle,
        target: String,
    },
    Bb1W {
        theta: Angle,
        target: String,
        partner: String,
    },
    Bb1J {
        theta: Angle,
        target: String,
        partner: String,
    },
    /// `partner` and `third` form the BB1-W pair inside BB1-J.
    Bb1Wj {
        theta: Angle,
        target: String,
        partner: String,
        third: String,
    },
    /// Corrected `X_n`; uses the standard chain controls when none are given.
    WjChain {
        theta: Angle,
        n: usize,
    },
    /// `Z̄` rotation on the three-spin XY qubit.
    P3 {
        theta: Angle,
        #[serde(default)]
        corrected: bool,
    },
    Heisenberg {
        theta: Angle,
        #[serde(default = "default_axis")]
        axis: AxisName,
        #[serde(default)]
        corrected: bool,
    },
}

impl SequenceSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            Self::Uncorrected { .. } => "uncorrected",
            Self::Bb1W { .. } => "bb1_w",
            Self::Bb1J { .. } => "bb1_j",
            Self::Bb1Wj { .. } => "bb1_wj",
            Self::WjChain { .. } => "wj_chain",
            Self::P3 { .. } => "p3",
            Self::Heisenberg { .. } => "heisenberg",
        }
    }

    fn encoding(&self) -> Option<&'static str> {
        match self {
            Self::P3 { .. } => Some("xy3"),
            Self::Heisenberg { .. } => Some("heisenberg3"),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AxisSel {
    Eps1,
    Eps2,
}

fn one() -> f64 {
    1.0
}

fn is_one(x: &f64) -> bool {
    *x == 1.0
}

/// One shared-error group: follows a sweep axis (optionally scaled) or holds
/// a fixed value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupSpec {
    pub labels: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axis: Option<AxisSel>,
    #[serde(default = "one", skip_serializing_if = "is_one")]
    pub scale: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
}

impl GroupSpec {
    pub fn on(labels: &[&str], axis: AxisSel) -> Self {
        Self {
            labels: labels.iter().map(|s| s.to_string()).collect(),
            axis: Some(axis),
            scale: 1.0,
            value: None,
        }
    }

    pub fn fixed(labels: &[&str], value: f64) -> Self {
        Self {
            labels: labels.iter().map(|s| s.to_string()).collect(),
            axis: None,
            scale: 1.0,
            value: Some(value),
        }
    }

    pub fn scaled(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ErrorSpec {
    Groups(Vec<GroupSpec>),
    /// `±ε1` per label. Missing fields default to the global seed, all
    /// sequence labels, and the sequence's own correlated pair.
    RandomSign {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        labels: Option<Vec<String>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        correlated: Option<[String; 2]>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Values {
    List(Vec<f64>),
    /// `[from, to, points]`, logarithmically spaced.
    Log {
        log: (f64, f64, usize),
    },
}

impl Values {
    pub fn log(from: f64, to: f64, points: usize) -> Self {
        Self::Log {
            log: (from, to, points),
        }
    }

    pub fn resolve(&self) -> Vec<f64> {
        match self {
            Self::List(v) => v.clone(),
            Self::Log { log: (a, b, n) } => log_grid(*a, *b, *n),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub eps1: Values,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps2: Option<Values>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FitSpec {
    Enabled(bool),
    Window { window: (f64, f64) },
}

impl Default for FitSpec {
    fn default() -> Self {
        Self::Enabled(true)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Space {
    Full,
    Code,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Value of the `sequence` CSV column; defaults to the sequence kind.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_qubits: Option<usize>,
    /// Label to Hamiltonian expression, e.g. `"ZZ": "0.5*ZZ"`.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub controls: BTreeMap<String, String>,
    pub sequence: SequenceSpec,
    pub errors: ErrorSpec,
    pub grid: GridSpec,
    #[serde(default)]
    pub fit: FitSpec,
    /// Encoded sequences default to the code space.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub space: Option<Space>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(|e| bad(format!("invalid config: {e}")))
    }

    pub fn id(&self) -> String {
        self.id
            .clone()
            .unwrap_or_else(|| self.sequence.kind().to_string())
    }
}

/// A resolved configuration ready to sweep.
#[derive(Debug, Clone)]
pub struct Plan {
    pub experiment: Experiment,
    pub grid: Vec<GridPoint>,
    pub eps2: Option<Vec<f64>>,
    pub fit_window: Option<(f64, f64)>,
}

type Controls = BTreeMap<ControlLabel, Hamiltonian>;

fn parse_controls(cfg: &RunConfig) -> Result<Controls, ConfigError> {
    let mut out = Controls::new();
    let mut width = cfg.n_qubits;
    for (name, expr) in &cfg.controls {
        let label = ControlLabel::new(name.as_str()).map_err(|e| bad(format!("controls: {e}")))?;
        let h = Hamiltonian::parse(expr)
            .map_err(|e| bad(format!("controls.{name} = \"{expr}\": {e}")))?;
        match width {
            Some(n) if n != h.n_qubits() => {
                return Err(bad(format!(
                    "controls.{name} acts on {} qubits, expected {n}",
                    h.n_qubits()
                )))
            }
            _ => width = Some(h.n_qubits()),
        }
        out.insert(label, h);
    }
    Ok(out)
}

fn lookup<'a>(
    controls: &'a Controls,
    names: &[&String],
) -> Result<Vec<(ControlLabel, &'a Hamiltonian)>, ConfigError> {
    let missing: Vec<&str> = names
        .iter()
        .filter(|n| !controls.keys().any(|l| l.as_str() == n.as_str()))
        .map(|n| n.as_str())
        .collect();
    if !missing.is_empty() {
        return Err(bad(format!(
            "unresolved control labels: {}",
            missing.join(", ")
        )));
    }
    Ok(names
        .iter()
        .map(|n| {
            let (l, h) = controls
                .iter()
                .find(|(l, _)| l.as_str() == n.as_str())
                .expect("checked");
            (l.clone(), h)
        })
        .collect())
}

fn lib(e: multipulse::Error) -> ConfigError {
    bad(e.to_string())
}

fn build_sequence(
    spec: &SequenceSpec,
    controls: &Controls,
) -> Result<(PulseSequence, Unitary, Option<Subspace>), ConfigError> {
    let target_of = |theta: f64, h: &Hamiltonian| evolve(&[(theta, 0.0, h)]).map_err(lib);
    if spec.encoding().is_some() && !controls.is_empty() {
        return Err(bad(format!(
            "sequence kind {} uses built-in couplings; remove \"controls\"",
            spec.kind()
        )));
    }
    match spec {
        SequenceSpec::Uncorrected { theta, target } => {
            let c = lookup(controls, &[target])?;
            let (l, h) = &c[0];
            let seq = PulseSequence::from_pulses(vec![Pulse::single(
                l.clone(),
                theta.value(),
                Arc::new((*h).clone()),
            )
            .map_err(lib)?])
            .map_err(lib)?;
            Ok((seq, target_of(theta.value(), h)?, None))
        }
        SequenceSpec::Bb1W {
            theta,
            target,
            partner,
        }
        | SequenceSpec::Bb1J {
            theta,
            target,
            partner,
        } => {
            let c = lookup(controls, &[target, partner])?;
            let ((l1, h1), (l2, h2)) = (&c[0], &c[1]);
            let seq = if matches!(spec, SequenceSpec::Bb1W { .. }) {
                bb1_w(theta.value(), h1, h2, l1, l2)
            } else {
                bb1_j(theta.value(), h1, h2, l1, l2)
            }
            .map_err(lib)?;
            Ok((seq, target_of(theta.value(), h1)?, None))
        }
        SequenceSpec::Bb1Wj {
            theta,
            target,
            partner,
            third,
        } => {
            let c = lookup(controls, &[target, partner, third])?;
            let ((l1, h1), (l2, h2), (l4, h4)) = (&c[0], &c[1], &c[2]);
            let seq = bb1_wj(theta.value(), h1, h2, h4, l1, l2, l4).map_err(lib)?;
            Ok((seq, target_of(theta.value(), h1)?, None))
        }
        SequenceSpec::WjChain { theta, n } => {
            let chain = if controls.is_empty() {
                ChainControls::standard(*n)
            } else {
                ChainControls::from_controls(*n, controls)
            }
            .map_err(lib)?;
            let seq = wj_chain(*n, theta.value(), &chain).map_err(lib)?;
            let target = target_of(theta.value(), chain.target().1)?;
            Ok((seq, target, None))
        }
        SequenceSpec::P3 { theta, corrected } => {
            let enc = Encoding::xy3().map_err(lib)?;
            let seq = if *corrected {
                p3_bb1(theta.value())
            } else {
                p3_sequence(theta.value())
            }
            .map_err(lib)?;
            let target = enc.ideal(LogicalAxis::Z, theta.value()).map_err(lib)?;
            Ok((seq, target, Some(enc.code)))
        }
        SequenceSpec::Heisenberg {
            theta,
            axis,
            corrected,
        } => {
            let enc = Encoding::heisenberg3().map_err(lib)?;
            let seq = heisenberg_logical((*axis).into(), theta.value(), *corrected).map_err(lib)?;
            let target = enc.ideal((*axis).into(), theta.value()).map_err(lib)?;
            Ok((seq, target, Some(enc.code)))
        }
    }
}

fn sequence_label(seq: &PulseSequence, name: &str) -> Option<ControlLabel> {
    seq.labels().iter().find(|l| l.as_str() == name).cloned()
}

fn resolve_labels(seq: &PulseSequence, names: &[String]) -> Result<Vec<ControlLabel>, ConfigError> {
    let missing: Vec<&str> = names
        .iter()
        .filter(|n| sequence_label(seq, n).is_none())
        .map(String::as_str)
        .collect();
    if !missing.is_empty() {
        let known: Vec<&str> = seq.labels().iter().map(ControlLabel::as_str).collect();
        return Err(bad(format!(
            "unresolved error labels: {} (sequence uses {})",
            missing.join(", "),
            known.join(", ")
        )));
    }
    Ok(names
        .iter()
        .filter_map(|n| sequence_label(seq, n))
        .collect())
}

fn build_model(
    spec: &ErrorSpec,
    seq: &PulseSequence,
    default_seed: u64,
) -> Result<(ErrorModel, bool), ConfigError> {
    match spec {
        ErrorSpec::Groups(groups) => {
            let mut out = Vec::new();
            let mut uses_eps2 = false;
            for (i, g) in groups.iter().enumerate() {
                let labels = resolve_labels(seq, &g.labels)?;
                let axis = match (g.axis, g.value) {
                    (Some(AxisSel::Eps1), None) if g.scale == 1.0 => Axis::Eps1,
                    (Some(AxisSel::Eps1), None) => Axis::Eps1Scaled(g.scale),
                    (Some(AxisSel::Eps2), None) if g.scale == 1.0 => {
                        uses_eps2 = true;
                        Axis::Eps2
                    }
                    (Some(AxisSel::Eps2), None) => {
                        return Err(bad(format!(
                            "errors.groups[{i}]: scale is only supported on eps1"
                        )))
                    }
                    (None, Some(v)) if v.is_finite() => Axis::Fixed(v),
                    (None, Some(v)) => {
                        return Err(bad(format!("errors.groups[{i}]: value {v} is not finite")))
                    }
                    _ => {
                        return Err(bad(format!(
                            "errors.groups[{i}]: give exactly one of \"axis\" or \"value\""
                        )))
                    }
                };
                out.push((labels, axis));
            }
            let covered: Vec<&ControlLabel> = out.iter().flat_map(|(ls, _)| ls).collect();
            let uncovered: Vec<&str> = seq
                .labels()
                .iter()
                .filter(|l| !covered.contains(l))
                .map(ControlLabel::as_str)
                .collect();
            if !uncovered.is_empty() {
                return Err(bad(format!(
                    "labels without an error group: {}",
                    uncovered.join(", ")
                )));
            }
            Ok((ErrorModel::Groups(out), uses_eps2))
        }
        ErrorSpec::RandomSign {
            seed,
            labels,
            correlated,
        } => {
            let labels = match labels {
                Some(names) => resolve_labels(seq, names)?,
                None => seq.labels().to_vec(),
            };
            let correlated = match correlated {
                Some([a, b]) => {
                    let pair = resolve_labels(seq, &[a.clone(), b.clone()])?;
                    Some((pair[0].clone(), pair[1].clone()))
                }
                None => seq.correlated_pairs().next().cloned(),
            };
            Ok((
                ErrorModel::RandomSign {
                    seed: seed.unwrap_or(default_seed),
                    labels,
                    correlated,
                },
                false,
            ))
        }
    }
}

fn check_values(name: &str, v: &[f64]) -> Result<(), ConfigError> {
    if v.is_empty() {
        return Err(bad(format!("grid.{name} is empty")));
    }
    if let Some(x) = v.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
        return Err(bad(format!(
            "grid.{name} values must be finite and >= 0, got {x}"
        )));
    }
    if v.windows(2).any(|w| w[0] >= w[1]) {
        return Err(bad(format!("grid.{name} must be strictly ascending")));
    }
    Ok(())
}

/// Resolves labels, builds the sequence and validates the grid and fit.
pub fn plan(cfg: &RunConfig, default_seed: u64) -> Result<Plan, ConfigError> {
    let controls = parse_controls(cfg)?;
    let (seq, target, code) = build_sequence(&cfg.sequence, &controls)?;
    let subspace = match (cfg.space, code) {
        (Some(Space::Full), _) | (None, None) => None,
        (Some(Space::Code) | None, Some(code)) => Some(code),
        (Some(Space::Code), None) => {
            return Err(bad(format!(
                "\"space\": \"code\" needs an encoded sequence, not {}",
                cfg.sequence.kind()
            )))
        }
    };
    let (model, uses_eps2) = build_model(&cfg.errors, &seq, default_seed)?;
    let eps1 = cfg.grid.eps1.resolve();
    check_values("eps1", &eps1)?;
    let eps2 = cfg.grid.eps2.as_ref().map(Values::resolve);
    if let Some(e2) = &eps2 {
        check_values("eps2", e2)?;
    } else if uses_eps2 {
        return Err(bad("an error group follows eps2 but grid.eps2 is missing"));
    }
    let fit_window = match &cfg.fit {
        FitSpec::Enabled(false) => None,
        FitSpec::Enabled(true) => Some((eps1[0], eps1[eps1.len() - 1])),
        FitSpec::Window { window } => Some(*window),
    };
    if let Some((lo, hi)) = fit_window {
        let inside = eps1.iter().filter(|&&e| e >= lo && e <= hi).count();
        if inside < 4 {
            return Err(bad(format!(
                "≥4 points required for fit, found {inside} in window; set \"fit\": false to disable fitting"
            )));
        }
    }
    let grid = match &eps2 {
        Some(e2) => grid_2d(&eps1, e2),
        None => grid_1d(&eps1),
    };
    let mut experiment = Experiment::new(cfg.id(), seq, target, model);
    experiment.subspace = subspace;
    Ok(Plan {
        experiment,
        grid,
        eps2,
        fit_window,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angles() {
        let close = |t: &str, v: f64| assert!((parse_angle(t).unwrap() - v).abs() < 1e-15, "{t}");
        close("pi/4", PI / 4.0);
        close("-pi/2", -PI / 2.0);
        close("3pi/4", 3.0 * PI / 4.0);
        close("3*pi/2", 1.5 * PI);
        close("π", PI);
        close("0.25", 0.25);
        close("1/2", 0.5);
        assert!(parse_angle("pi/0").is_err());
        assert!(parse_angle("pi4").is_err());
        assert!(parse_angle("tau").is_err());
    }

    #[test]
    fn angle_text_round_trips() {
        let a: Angle = serde_json::from_str("\"pi/8\"").unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), "\"pi/8\"");
        let b: Angle = serde_json::from_str("0.5").unwrap();
        assert_eq!(b.value(), 0.5);
    }

    #[test]
    fn unknown_fields_rejected() {
        let text = r#"{"sequence": {"kind": "p3", "theta": "pi/4"}, "errors": {"groups": []},
                       "grid": {"eps1": [0.1]}, "colour": 3}"#;
        assert!(RunConfig::from_json(text).unwrap_err().0.contains("colour"));
    }
}
