//! Sectioned key-value experiment configuration.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use ini::Ini;
use scatter_core::lattice::PotentialSpec;
use scatter_core::propagation::{ChannelConvention, CutoffSpec};
use scatter_core::random::Packet;
use scatter_core::spectral::DENSE_LIMIT;
use scatter_core::{ClusterId, ThreeBodyModel};
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Experiment {
    Spectrum,
    Dispersion,
    Thresholds,
    Mourre,
    Partition,
    Evolve,
    LocalDecay,
    MinVelocity,
    Channels,
    VerifyAll,
}

impl Experiment {
    pub const ALL: [Experiment; 10] = [
        Experiment::Spectrum,
        Experiment::Dispersion,
        Experiment::Thresholds,
        Experiment::Mourre,
        Experiment::Partition,
        Experiment::Evolve,
        Experiment::LocalDecay,
        Experiment::MinVelocity,
        Experiment::Channels,
        Experiment::VerifyAll,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Spectrum => "spectrum",
            Experiment::Dispersion => "dispersion",
            Experiment::Thresholds => "thresholds",
            Experiment::Mourre => "mourre",
            Experiment::Partition => "partition",
            Experiment::Evolve => "evolve",
            Experiment::LocalDecay => "local-decay",
            Experiment::MinVelocity => "min-velocity",
            Experiment::Channels => "channels",
            Experiment::VerifyAll => "verify-all",
        }
    }

    /// Blocks that must be present for this experiment.
    pub fn required_blocks(self) -> &'static [&'static str] {
        match self {
            Experiment::Spectrum => &["model", "grid", "spectrum"],
            Experiment::Dispersion => &["model", "grid", "dispersion"],
            Experiment::Thresholds | Experiment::Partition => &["model", "grid"],
            Experiment::Mourre => &["model", "grid", "window"],
            Experiment::Evolve => &["model", "grid", "packet", "schedule"],
            Experiment::LocalDecay | Experiment::MinVelocity | Experiment::Channels => {
                &["model", "grid", "packet", "window", "cutoff", "schedule"]
            }
            Experiment::VerifyAll => &[],
        }
    }

    /// Number of particles on the experiment's grid.
    pub fn particles(self, spectrum: Option<&SpectrumBlock>) -> usize {
        match self {
            Experiment::Spectrum => match spectrum.map(|s| s.operator) {
                Some(Operator::Full) => 2,
                _ => 1,
            },
            Experiment::Dispersion | Experiment::Thresholds => 1,
            _ => 2,
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s.trim())
            .ok_or_else(|| {
                let names: Vec<_> = Experiment::ALL.iter().map(|e| e.name()).collect();
                format!(
                    "unknown experiment `{s}` (expected one of {})",
                    names.join(", ")
                )
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Zero,
    PoschlTeller,
    Gaussian,
}

impl Family {
    fn name(self) -> &'static str {
        match self {
            Family::Zero => "zero",
            Family::PoschlTeller => "poschl-teller",
            Family::Gaussian => "gaussian",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "zero" => Some(Family::Zero),
            "poschl-teller" => Some(Family::PoschlTeller),
            "gaussian" => Some(Family::Gaussian),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Potential {
    pub family: Family,
    pub strength: f64,
    pub width: f64,
}

impl Potential {
    pub const ZERO: Potential = Potential {
        family: Family::Zero,
        strength: 0.0,
        width: 1.0,
    };

    pub fn spec(&self) -> PotentialSpec {
        match self.family {
            Family::Zero => PotentialSpec::zero(),
            Family::PoschlTeller => PotentialSpec::poschl_teller(self.strength, self.width),
            Family::Gaussian => PotentialSpec::gaussian_well(self.strength, self.width),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelBlock {
    pub v12: Potential,
    pub v13: Potential,
    pub v23: Potential,
}

impl ModelBlock {
    pub fn model(&self) -> ThreeBodyModel {
        ThreeBodyModel {
            v12: self.v12.spec(),
            v13: self.v13.spec(),
            v23: self.v23.spec(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridBlock {
    pub points: usize,
    pub half_extent: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowBlock {
    pub lo: f64,
    pub hi: f64,
    pub energy: Option<f64>,
    pub sharpness: f64,
}

impl WindowBlock {
    pub fn bounds(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn center(&self) -> f64 {
        self.energy.unwrap_or(0.5 * (self.lo + self.hi))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffBlock {
    pub delta: f64,
    pub epsilon: f64,
    pub mu: f64,
    pub smoothing: f64,
    pub convention: ChannelConvention,
}

impl CutoffBlock {
    pub fn spec(&self) -> CutoffSpec {
        CutoffSpec {
            delta: self.delta,
            epsilon: self.epsilon,
            mu: self.mu,
            smoothing: self.smoothing,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleBlock {
    pub dt: f64,
    pub duration: Option<f64>,
    pub times: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ElectronState {
    /// Ground state of the electron-center subsystem.
    Bound,
    Packet(Packet),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PacketBlock {
    pub electron: ElectronState,
    pub photon: Packet,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Operator {
    Full,
    Subsystem(ClusterId),
    Fiber(ClusterId, f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Dense,
    ImaginaryTime,
    IterativeSubspace,
}

impl Method {
    fn name(self) -> &'static str {
        match self {
            Method::Dense => "dense",
            Method::ImaginaryTime => "imaginary-time",
            Method::IterativeSubspace => "iterative-subspace",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumBlock {
    pub operator: Operator,
    pub method: Method,
    pub count: usize,
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DispersionBlock {
    pub fibers: Vec<f64>,
    pub tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdsBlock {
    pub tol: f64,
    pub fallback: f64,
}

impl Default for ThresholdsBlock {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            fallback: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MourreBlock {
    pub samples: usize,
    pub epsilon: Option<f64>,
    pub boundary_tolerance: f64,
    pub seed_width: f64,
}

impl Default for MourreBlock {
    fn default() -> Self {
        Self {
            samples: 10,
            epsilon: None,
            boundary_tolerance: 1e-8,
            seed_width: 4.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartitionBlock {
    pub smoothing: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinVelocityBlock {
    pub theta: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    Desk,
    Smoke,
}

impl Profile {
    pub fn name(self) -> &'static str {
        match self {
            Profile::Desk => "desk",
            Profile::Smoke => "smoke",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyBlock {
    pub profile: Profile,
    pub criteria: Vec<u8>,
}

/// A complete, validated experiment description.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub seed: u64,
    pub output: Option<PathBuf>,
    pub model: Option<ModelBlock>,
    pub grid: Option<GridBlock>,
    pub window: Option<WindowBlock>,
    pub cutoff: Option<CutoffBlock>,
    pub schedule: Option<ScheduleBlock>,
    pub packet: Option<PacketBlock>,
    pub spectrum: Option<SpectrumBlock>,
    pub dispersion: Option<DispersionBlock>,
    pub thresholds: Option<ThresholdsBlock>,
    pub mourre: Option<MourreBlock>,
    pub partition: Option<PartitionBlock>,
    pub min_velocity: Option<MinVelocityBlock>,
    pub verify: Option<VerifyBlock>,
}

const SECTIONS: [&str; 15] = [
    "run",
    "model",
    "grid",
    "window",
    "cutoff",
    "schedule",
    "packet",
    "spectrum",
    "dispersion",
    "thresholds",
    "mourre",
    "partition",
    "min-velocity",
    "verify-all",
    "",
];

/// Line numbers of section headers and keys, for diagnostics.
#[derive(Debug, Default)]
struct LineIndex {
    sections: BTreeMap<String, usize>,
    keys: BTreeMap<(String, String), usize>,
}

impl LineIndex {
    fn scan(text: &str) -> Result<Self, CliError> {
        let mut idx = LineIndex::default();
        let mut section = String::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            let n = n + 1;
            if line.is_empty() || line.starts_with(';') || line.starts_with('#') {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                section = rest.trim_end_matches(']').trim().to_string();
                if idx.sections.insert(section.clone(), n).is_some() {
                    return Err(CliError::config(
                        Some(n),
                        format!("section [{section}] appears twice"),
                    ));
                }
                continue;
            }
            let key = line
                .split(['=', ':'])
                .next()
                .unwrap_or("")
                .trim()
                .to_string();
            if idx.keys.insert((section.clone(), key.clone()), n).is_some() {
                return Err(CliError::config(
                    Some(n),
                    format!("[{section}] {key}: key appears twice"),
                ));
            }
        }
        Ok(idx)
    }

    fn key(&self, section: &str, key: &str) -> Option<usize> {
        self.keys
            .get(&(section.to_string(), key.to_string()))
            .copied()
    }
}

/// Reads one section, remembering which keys were consumed.
struct Section<'a> {
    name: &'static str,
    props: &'a ini::Properties,
    lines: &'a LineIndex,
    used: BTreeSet<String>,
}

impl<'a> Section<'a> {
    fn err(&self, key: &str, msg: impl fmt::Display) -> CliError {
        CliError::config(
            self.lines.key(self.name, key),
            format!("[{}] {key}: {msg}", self.name),
        )
    }

    fn raw(&mut self, key: &str) -> Option<&'a str> {
        self.used.insert(key.to_string());
        self.props.get(key).map(str::trim)
    }

    fn parse<T: FromStr>(&mut self, key: &str, what: &str) -> Result<Option<T>, CliError> {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| self.err(key, format!("`{v}` is not {what}"))),
        }
    }

    fn f64(&mut self, key: &str) -> Result<Option<f64>, CliError> {
        let v: Option<f64> = self.parse(key, "a number")?;
        match v {
            Some(x) if !x.is_finite() => Err(self.err(key, "must be finite")),
            v => Ok(v),
        }
    }

    fn req_f64(&mut self, key: &str) -> Result<f64, CliError> {
        self.f64(key)?.ok_or_else(|| self.missing(key))
    }

    fn usize(&mut self, key: &str) -> Result<Option<usize>, CliError> {
        self.parse(key, "a nonnegative integer")
    }

    fn list(&mut self, key: &str) -> Result<Option<Vec<f64>>, CliError> {
        let Some(v) = self.raw(key) else {
            return Ok(None);
        };
        v.split(',')
            .map(|p| {
                p.trim()
                    .parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| self.err(key, format!("`{}` is not a number", p.trim())))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Some)
    }

    fn missing(&self, key: &str) -> CliError {
        CliError::config(
            self.lines.sections.get(self.name).copied(),
            format!("[{}] is missing required key `{key}`", self.name),
        )
    }

    fn finish(self) -> Result<(), CliError> {
        for (k, _) in self.props.iter() {
            if !self.used.contains(k) {
                return Err(self.err(k, "unknown key"));
            }
        }
        Ok(())
    }
}

fn parse_packet(s: &str) -> Option<Packet> {
    let v: Vec<f64> = s
        .split_whitespace()
        .map(|p| p.parse().ok().filter(|x: &f64| x.is_finite()))
        .collect::<Option<_>>()?;
    match v[..] {
        [c, k, w] if w > 0.0 => Some(Packet::new(c, k, w)),
        _ => None,
    }
}

fn parse_cluster(s: &str) -> Option<ClusterId> {
    s.parse().ok()
}

fn packet_text(p: &Packet) -> String {
    format!("{:?} {:?} {:?}", p.center, p.momentum, p.width)
}

fn list_text(v: &[f64]) -> String {
    v.iter()
        .map(|x| format!("{x:?}"))
        .collect::<Vec<_>>()
        .join(", ")
}

impl ExperimentConfig {
    /// Empty configuration for `experiment` with every block absent.
    pub fn empty(experiment: Experiment) -> Self {
        Self {
            experiment,
            seed: 0,
            output: None,
            model: None,
            grid: None,
            window: None,
            cutoff: None,
            schedule: None,
            packet: None,
            spectrum: None,
            dispersion: None,
            thresholds: None,
            mourre: None,
            partition: None,
            min_velocity: None,
            verify: None,
        }
    }

    /// Parse and validate. `experiment` overrides `[run] experiment`; they must agree if both are given.
    pub fn parse(text: &str, experiment: Option<Experiment>) -> Result<Self, CliError> {
        let lines = LineIndex::scan(text)?;
        let ini = Ini::load_from_str(text)
            .map_err(|e| CliError::config(Some(e.line), e.msg.to_string()))?;
        for (name, props) in ini.iter() {
            let name = name.unwrap_or("");
            if name.is_empty() {
                if let Some((k, _)) = props.iter().next() {
                    return Err(CliError::config(
                        lines.key("", k),
                        format!("key `{k}` is outside any section"),
                    ));
                }
                continue;
            }
            if !SECTIONS.contains(&name) {
                return Err(CliError::config(
                    lines.sections.get(name).copied(),
                    format!("unknown section [{name}]"),
                ));
            }
        }
        let empty = ini::Properties::new();
        let section = |name: &'static str| -> Option<Section<'_>> {
            ini.section(Some(name)).map(|props| Section {
                name,
                props,
                lines: &lines,
                used: BTreeSet::new(),
            })
        };

        let mut run = section("run").unwrap_or(Section {
            name: "run",
            props: &empty,
            lines: &lines,
            used: BTreeSet::new(),
        });
        let named = match run.raw("experiment") {
            Some(v) => Some(
                v.parse::<Experiment>()
                    .map_err(|m| run.err("experiment", m))?,
            ),
            None => None,
        };
        let experiment = match (experiment, named) {
            (Some(a), Some(b)) if a != b => {
                return Err(run.err(
                    "experiment",
                    format!("config is for `{b}` but `{a}` was requested"),
                ));
            }
            (Some(a), _) | (None, Some(a)) => a,
            (None, None) => return Err(run.missing("experiment")),
        };
        let mut cfg = ExperimentConfig::empty(experiment);
        cfg.seed = run.parse("seed", "a nonnegative integer")?.unwrap_or(0);
        cfg.output = run.raw("output").map(PathBuf::from);
        run.finish()?;

        if let Some(mut s) = section("model") {
            let pot = |s: &mut Section, name: &str| -> Result<Potential, CliError> {
                let family = match s.raw(name) {
                    None => Family::Zero,
                    Some(v) => Family::parse(v).ok_or_else(|| {
                        s.err(
                            name,
                            format!(
                                "unknown family `{v}` (expected zero, poschl-teller or gaussian)"
                            ),
                        )
                    })?,
                };
                let strength = s.f64(&format!("{name}_strength"))?;
                let width = s.f64(&format!("{name}_width"))?;
                if family == Family::Zero {
                    if strength.is_some() || width.is_some() {
                        return Err(s.err(name, "a zero potential takes no strength or width"));
                    }
                    return Ok(Potential::ZERO);
                }
                let strength = strength.ok_or_else(|| s.missing(&format!("{name}_strength")))?;
                let width = width.ok_or_else(|| s.missing(&format!("{name}_width")))?;
                if width <= 0.0 {
                    return Err(s.err(&format!("{name}_width"), "must be positive"));
                }
                Ok(Potential {
                    family,
                    strength,
                    width,
                })
            };
            let v12 = pot(&mut s, "v12")?;
            let v13 = pot(&mut s, "v13")?;
            let v23 = pot(&mut s, "v23")?;
            s.finish()?;
            cfg.model = Some(ModelBlock { v12, v13, v23 });
        }

        if let Some(mut s) = section("grid") {
            let points = s.usize("points")?.ok_or_else(|| s.missing("points"))?;
            if points < 8 || !points.is_power_of_two() {
                return Err(s.err("points", "must be a power of two of at least 8"));
            }
            let half_extent = s.req_f64("half_extent")?;
            if half_extent <= 0.0 {
                return Err(s.err("half_extent", "must be positive"));
            }
            s.finish()?;
            cfg.grid = Some(GridBlock {
                points,
                half_extent,
            });
        }

        if let Some(mut s) = section("window") {
            let lo = s.req_f64("lo")?;
            let hi = s.req_f64("hi")?;
            if lo >= hi {
                return Err(s.err("hi", "must exceed lo"));
            }
            let energy = s.f64("energy")?;
            if let Some(e) = energy {
                if e <= lo || e >= hi {
                    return Err(s.err("energy", "must lie strictly inside (lo, hi)"));
                }
            }
            let sharpness = s.f64("sharpness")?.unwrap_or(6.0);
            if sharpness <= 0.0 {
                return Err(s.err("sharpness", "must be positive"));
            }
            s.finish()?;
            cfg.window = Some(WindowBlock {
                lo,
                hi,
                energy,
                sharpness,
            });
        }

        if let Some(mut s) = section("cutoff") {
            let delta = s.req_f64("delta")?;
            let epsilon = s.req_f64("epsilon")?;
            let mu = s.req_f64("mu")?;
            let smoothing = s.f64("smoothing")?.unwrap_or(0.1);
            let convention = match s.raw("convention") {
                None | Some("internal") => ChannelConvention::Internal,
                Some("external") => ChannelConvention::External,
                Some(v) => {
                    return Err(s.err("convention", format!("`{v}` is not internal or external")))
                }
            };
            let block = CutoffBlock {
                delta,
                epsilon,
                mu,
                smoothing,
                convention,
            };
            block.spec().validate().map_err(|e| s.err("delta", e))?;
            s.finish()?;
            cfg.cutoff = Some(block);
        }

        if let Some(mut s) = section("schedule") {
            let dt = s.req_f64("dt")?;
            if dt <= 0.0 {
                return Err(s.err("dt", "must be positive"));
            }
            let duration = s.f64("duration")?;
            if matches!(duration, Some(d) if d <= 0.0) {
                return Err(s.err("duration", "must be positive"));
            }
            let times = s.list("times")?.unwrap_or_default();
            if !times.is_empty() && (times[0] < 1.0 || times.windows(2).any(|w| w[1] <= w[0])) {
                return Err(s.err(
                    "times",
                    "must be strictly increasing and start at 1 or later",
                ));
            }
            if duration.is_none() && times.is_empty() {
                return Err(s.missing("duration"));
            }
            s.finish()?;
            cfg.schedule = Some(ScheduleBlock {
                dt,
                duration,
                times,
            });
        }

        if let Some(mut s) = section("packet") {
            let electron = match s.raw("electron") {
                None => return Err(s.missing("electron")),
                Some("bound") => ElectronState::Bound,
                Some(v) => ElectronState::Packet(parse_packet(v).ok_or_else(|| {
                    s.err("electron", "expected `bound` or `center momentum width`")
                })?),
            };
            let photon = match s.raw("photon") {
                None => return Err(s.missing("photon")),
                Some(v) => parse_packet(v)
                    .ok_or_else(|| s.err("photon", "expected `center momentum width`"))?,
            };
            s.finish()?;
            cfg.packet = Some(PacketBlock { electron, photon });
        }

        if let Some(mut s) = section("spectrum") {
            let cluster = match s.raw("cluster") {
                None => None,
                Some(v) => Some(
                    parse_cluster(v)
                        .ok_or_else(|| s.err("cluster", format!("unknown cluster `{v}`")))?,
                ),
            };
            let fiber = s.f64("fiber")?;
            let operator = match s.raw("operator") {
                None | Some("full") => {
                    if cluster.is_some() || fiber.is_some() {
                        return Err(
                            s.err("operator", "the full operator takes no cluster or fiber")
                        );
                    }
                    Operator::Full
                }
                Some(kind @ ("subsystem" | "fiber")) => {
                    let a = cluster.ok_or_else(|| s.missing("cluster"))?;
                    if !a.is_two_cluster() {
                        return Err(s.err("cluster", "must be a two-cluster decomposition"));
                    }
                    if kind == "subsystem" {
                        if fiber.is_some() {
                            return Err(
                                s.err("fiber", "only the fiber operator takes a fiber momentum")
                            );
                        }
                        Operator::Subsystem(a)
                    } else {
                        Operator::Fiber(a, fiber.ok_or_else(|| s.missing("fiber"))?)
                    }
                }
                Some(v) => {
                    return Err(s.err("operator", format!("`{v}` is not full, subsystem or fiber")))
                }
            };
            let method = match s.raw("method") {
                None | Some("dense") => Method::Dense,
                Some("imaginary-time") => Method::ImaginaryTime,
                Some("iterative-subspace") => Method::IterativeSubspace,
                Some(v) => return Err(s.err("method", format!("unknown method `{v}`"))),
            };
            let count = s.usize("count")?.unwrap_or(8);
            if count == 0 {
                return Err(s.err("count", "must be positive"));
            }
            let tol = s.f64("tol")?.unwrap_or(1e-8);
            if tol <= 0.0 {
                return Err(s.err("tol", "must be positive"));
            }
            s.finish()?;
            cfg.spectrum = Some(SpectrumBlock {
                operator,
                method,
                count,
                tol,
            });
        }

        if let Some(mut s) = section("dispersion") {
            let fibers = s.list("fibers")?.ok_or_else(|| s.missing("fibers"))?;
            if fibers.is_empty() {
                return Err(s.err("fibers", "needs at least one fiber momentum"));
            }
            let tol = s.f64("tol")?.unwrap_or(1e-9);
            if tol <= 0.0 {
                return Err(s.err("tol", "must be positive"));
            }
            s.finish()?;
            cfg.dispersion = Some(DispersionBlock { fibers, tol });
        }

        if let Some(mut s) = section("thresholds") {
            let d = ThresholdsBlock::default();
            let tol = s.f64("tol")?.unwrap_or(d.tol);
            let fallback = s.f64("fallback")?.unwrap_or(d.fallback);
            if tol <= 0.0 {
                return Err(s.err("tol", "must be positive"));
            }
            if fallback <= 0.0 {
                return Err(s.err("fallback", "must be positive"));
            }
            s.finish()?;
            cfg.thresholds = Some(ThresholdsBlock { tol, fallback });
        }

        if let Some(mut s) = section("mourre") {
            let d = MourreBlock::default();
            let samples = s.usize("samples")?.unwrap_or(d.samples);
            if samples == 0 {
                return Err(s.err("samples", "must be positive"));
            }
            let epsilon = s.f64("epsilon")?;
            if matches!(epsilon, Some(e) if e <= 0.0) {
                return Err(s.err("epsilon", "must be positive"));
            }
            let boundary_tolerance = s.f64("boundary_tolerance")?.unwrap_or(d.boundary_tolerance);
            let seed_width = s.f64("seed_width")?.unwrap_or(d.seed_width);
            if boundary_tolerance <= 0.0 {
                return Err(s.err("boundary_tolerance", "must be positive"));
            }
            if seed_width <= 0.0 {
                return Err(s.err("seed_width", "must be positive"));
            }
            s.finish()?;
            cfg.mourre = Some(MourreBlock {
                samples,
                epsilon,
                boundary_tolerance,
                seed_width,
            });
        }

        if let Some(mut s) = section("partition") {
            let smoothing = s.req_f64("smoothing")?;
            if smoothing <= 0.0 {
                return Err(s.err("smoothing", "must be positive"));
            }
            s.finish()?;
            cfg.partition = Some(PartitionBlock { smoothing });
        }

        if let Some(mut s) = section("min-velocity") {
            let theta = s.f64("theta")?;
            if matches!(theta, Some(t) if t <= 0.0) {
                return Err(s.err("theta", "must be positive"));
            }
            s.finish()?;
            cfg.min_velocity = Some(MinVelocityBlock { theta });
        }

        if let Some(mut s) = section("verify-all") {
            let profile = match s.raw("profile") {
                None | Some("desk") => Profile::Desk,
                Some("smoke") => Profile::Smoke,
                Some(v) => return Err(s.err("profile", format!("`{v}` is not desk or smoke"))),
            };
            let criteria = match s.list("criteria")? {
                None => Vec::new(),
                Some(v) => v
                    .into_iter()
                    .map(|c| {
                        if c.fract() == 0.0 && (1.0..=14.0).contains(&c) {
                            Ok(c as u8)
                        } else {
                            Err(s.err(
                                "criteria",
                                format!("`{c}` is not a criterion number 1 to 14"),
                            ))
                        }
                    })
                    .collect::<Result<_, _>>()?,
            };
            s.finish()?;
            cfg.verify = Some(VerifyBlock { profile, criteria });
        }

        cfg.validate_with(&lines)?;
        Ok(cfg)
    }

    /// Cross-block checks.
    pub fn validate(&self) -> Result<(), CliError> {
        self.validate_with(&LineIndex::default())
    }

    fn validate_with(&self, lines: &LineIndex) -> Result<(), CliError> {
        let present = |b: &str| match b {
            "model" => self.model.is_some(),
            "grid" => self.grid.is_some(),
            "window" => self.window.is_some(),
            "cutoff" => self.cutoff.is_some(),
            "schedule" => self.schedule.is_some(),
            "packet" => self.packet.is_some(),
            "spectrum" => self.spectrum.is_some(),
            "dispersion" => self.dispersion.is_some(),
            _ => true,
        };
        for b in self.experiment.required_blocks() {
            if !present(b) {
                return Err(CliError::config(
                    None,
                    format!(
                        "missing [{b}] block, required by the {} experiment",
                        self.experiment
                    ),
                ));
            }
        }
        let at = |section: &str, key: &str| {
            lines
                .key(section, key)
                .or_else(|| lines.sections.get(section).copied())
        };
        let particles = self.experiment.particles(self.spectrum.as_ref());
        if let (Some(g), Some(sp)) = (&self.grid, &self.spectrum) {
            let sites = g.points.pow(particles as u32);
            if sp.method == Method::Dense && sites > DENSE_LIMIT {
                return Err(CliError::config(
                    at("spectrum", "method"),
                    format!("[spectrum] method: dense needs at most {DENSE_LIMIT} sites, the grid has {sites}"),
                ));
            }
        }
        if let Some(sch) = &self.schedule {
            let needs_duration = matches!(
                self.experiment,
                Experiment::Evolve | Experiment::LocalDecay | Experiment::MinVelocity
            );
            if needs_duration && sch.duration.is_none() {
                return Err(CliError::config(
                    at("schedule", "duration"),
                    "[schedule] is missing required key `duration`",
                ));
            }
            if self.experiment == Experiment::Channels && sch.times.is_empty() {
                return Err(CliError::config(
                    at("schedule", "times"),
                    "[schedule] is missing required key `times`",
                ));
            }
        }
        if matches!(self.experiment, Experiment::Mourre) {
            if let Some(w) = &self.window {
                if w.energy.is_none() {
                    return Err(CliError::config(
                        at("window", "energy"),
                        "[window] is missing required key `energy`",
                    ));
                }
            }
        }
        if self.experiment == Experiment::Channels {
            if let Some(p) = &self.packet {
                if p.electron != ElectronState::Bound {
                    return Err(CliError::config(
                        at("packet", "electron"),
                        "[packet] electron: channels needs `bound`",
                    ));
                }
            }
            if let Some(w) = &self.window {
                if w.hi >= 0.0 {
                    return Err(CliError::config(
                        at("window", "hi"),
                        "[window] hi: the channel window must be negative",
                    ));
                }
            }
        }
        if let (Some(p), Some(m)) = (&self.packet, &self.model) {
            if p.electron == ElectronState::Bound && m.v12.family == Family::Zero {
                return Err(CliError::config(
                    at("packet", "electron"),
                    "[packet] electron: `bound` needs a nonzero v12",
                ));
            }
        }
        Ok(())
    }

    /// Canonical text; `parse(to_ini_string())` reproduces `self`.
    pub fn to_ini_string(&self) -> String {
        self.render(true)
    }

    fn render(&self, with_output: bool) -> String {
        let mut ini = Ini::new();
        {
            let mut run = ini.with_section(Some("run"));
            run.set("experiment", self.experiment.name());
            run.set("seed", self.seed.to_string());
            if let (true, Some(o)) = (with_output, &self.output) {
                run.set("output", o.display().to_string());
            }
        }
        if let Some(m) = &self.model {
            let mut s = ini.with_section(Some("model"));
            for (name, p) in [("v12", m.v12), ("v13", m.v13), ("v23", m.v23)] {
                s.set(name, p.family.name());
                if p.family != Family::Zero {
                    s.set(format!("{name}_strength"), format!("{:?}", p.strength));
                    s.set(format!("{name}_width"), format!("{:?}", p.width));
                }
            }
        }
        if let Some(g) = &self.grid {
            ini.with_section(Some("grid"))
                .set("points", g.points.to_string())
                .set("half_extent", format!("{:?}", g.half_extent));
        }
        if let Some(w) = &self.window {
            let mut s = ini.with_section(Some("window"));
            s.set("lo", format!("{:?}", w.lo))
                .set("hi", format!("{:?}", w.hi));
            if let Some(e) = w.energy {
                s.set("energy", format!("{e:?}"));
            }
            s.set("sharpness", format!("{:?}", w.sharpness));
        }
        if let Some(c) = &self.cutoff {
            let convention = match c.convention {
                ChannelConvention::Internal => "internal",
                ChannelConvention::External => "external",
            };
            ini.with_section(Some("cutoff"))
                .set("delta", format!("{:?}", c.delta))
                .set("epsilon", format!("{:?}", c.epsilon))
                .set("mu", format!("{:?}", c.mu))
                .set("smoothing", format!("{:?}", c.smoothing))
                .set("convention", convention);
        }
        if let Some(sc) = &self.schedule {
            let mut s = ini.with_section(Some("schedule"));
            s.set("dt", format!("{:?}", sc.dt));
            if let Some(d) = sc.duration {
                s.set("duration", format!("{d:?}"));
            }
            if !sc.times.is_empty() {
                s.set("times", list_text(&sc.times));
            }
        }
        if let Some(p) = &self.packet {
            let electron = match &p.electron {
                ElectronState::Bound => "bound".to_string(),
                ElectronState::Packet(e) => packet_text(e),
            };
            ini.with_section(Some("packet"))
                .set("electron", electron)
                .set("photon", packet_text(&p.photon));
        }
        if let Some(sp) = &self.spectrum {
            let mut s = ini.with_section(Some("spectrum"));
            match sp.operator {
                Operator::Full => {
                    s.set("operator", "full");
                }
                Operator::Subsystem(a) => {
                    s.set("operator", "subsystem").set("cluster", a.slug());
                }
                Operator::Fiber(a, f) => {
                    s.set("operator", "fiber")
                        .set("cluster", a.slug())
                        .set("fiber", format!("{f:?}"));
                }
            }
            s.set("method", sp.method.name())
                .set("count", sp.count.to_string())
                .set("tol", format!("{:?}", sp.tol));
        }
        if let Some(d) = &self.dispersion {
            ini.with_section(Some("dispersion"))
                .set("fibers", list_text(&d.fibers))
                .set("tol", format!("{:?}", d.tol));
        }
        if let Some(t) = &self.thresholds {
            ini.with_section(Some("thresholds"))
                .set("tol", format!("{:?}", t.tol))
                .set("fallback", format!("{:?}", t.fallback));
        }
        if let Some(m) = &self.mourre {
            let mut s = ini.with_section(Some("mourre"));
            s.set("samples", m.samples.to_string());
            if let Some(e) = m.epsilon {
                s.set("epsilon", format!("{e:?}"));
            }
            s.set("boundary_tolerance", format!("{:?}", m.boundary_tolerance))
                .set("seed_width", format!("{:?}", m.seed_width));
        }
        if let Some(p) = &self.partition {
            ini.with_section(Some("partition"))
                .set("smoothing", format!("{:?}", p.smoothing));
        }
        if let Some(m) = &self.min_velocity {
            let s = ini
                .entry(Some("min-velocity".into()))
                .or_insert(ini::Properties::new());
            if let Some(t) = m.theta {
                s.insert("theta", format!("{t:?}"));
            }
        }
        if let Some(v) = &self.verify {
            let mut s = ini.with_section(Some("verify-all"));
            s.set("profile", v.profile.name());
            if !v.criteria.is_empty() {
                let c: Vec<String> = v.criteria.iter().map(|c| c.to_string()).collect();
                s.set("criteria", c.join(", "));
            }
        }
        let mut buf = Vec::new();
        ini.write_to(&mut buf)
            .expect("writing to memory cannot fail");
        String::from_utf8(buf).expect("ini output is utf-8")
    }

    /// Content hash over everything that affects the numbers (the output path is excluded).
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.render(false).as_bytes());
        digest.iter().take(6).map(|b| format!("{b:02x}")).collect()
    }

    pub fn model(&self) -> ThreeBodyModel {
        self.model
            .as_ref()
            .map(ModelBlock::model)
            .unwrap_or_default()
    }
}
