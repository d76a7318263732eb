//! Scenario configuration: the oscillating external field, beam and numerical
//! parameters, and the flat `key = value` config-file format.

use std::fmt;

use crate::error::{Error, Result};

/// Exactly represented positive rational, kept in lowest terms.
///
/// Frequencies are stored as rationals (or tagged irrational) rather than
/// floats because resonance detection on floats is ill-posed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ratio {
    num: u32,
    den: u32,
}

impl Ratio {
    pub fn new(num: u32, den: u32) -> Result<Self> {
        if num == 0 || den == 0 {
            return Err(Error::config("frequency ratio must be positive"));
        }
        let g = gcd(num, den);
        Ok(Ratio {
            num: num / g,
            den: den / g,
        })
    }

    pub fn num(&self) -> u32 {
        self.num
    }

    pub fn den(&self) -> u32 {
        self.den
    }

    pub fn value(&self) -> f64 {
        f64::from(self.num) / f64::from(self.den)
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

fn gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn parse_ratio(s: &str) -> Result<Ratio> {
    let parse_u32 = |t: &str| {
        t.trim()
            .parse::<u32>()
            .map_err(|_| Error::config(format!("invalid rational frequency `{s}`")))
    };
    match s.split_once('/') {
        Some((n, d)) => Ratio::new(parse_u32(n)?, parse_u32(d)?),
        None => Ratio::new(parse_u32(s)?, 1),
    }
}

/// Shape of the oscillating part of the external focusing field, as a
/// function of the fast phase tau = t/epsilon.
///
/// `Cos(w)` and `CosSquared(w)` are cos(w tau) and cos^2(w tau) with `w` an
/// exact rational; `Irrational(w)` is cos(w tau) with `w` declared irrational
/// in the config (never inferred from the float value).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum H1Kind {
    Zero,
    Cos(Ratio),
    CosSquared(Ratio),
    Irrational(f64),
}

impl H1Kind {
    /// Value of H1 at fast phase `tau`.
    pub fn eval(&self, tau: f64) -> f64 {
        match self {
            H1Kind::Zero => 0.0,
            H1Kind::Cos(w) => (w.value() * tau).cos(),
            H1Kind::CosSquared(w) => {
                let c = (w.value() * tau).cos();
                c * c
            }
            H1Kind::Irrational(w) => (w * tau).cos(),
        }
    }

    /// Fast-field frequency, if any.
    pub fn omega1(&self) -> Option<f64> {
        match self {
            H1Kind::Zero => None,
            H1Kind::Cos(w) | H1Kind::CosSquared(w) => Some(w.value()),
            H1Kind::Irrational(w) => Some(*w),
        }
    }

    fn keyword(&self) -> &'static str {
        match self {
            H1Kind::Zero => "zero",
            H1Kind::Cos(_) => "cos",
            H1Kind::CosSquared(_) => "cos2",
            H1Kind::Irrational(_) => "irrational",
        }
    }
}

/// Measure used to draw |r| when sampling the initial beam.
///
/// `Radial` draws |r| proportionally to r dr (the measure the radial Poisson
/// equation weighs charge by); `Planar` draws |r| uniformly, matching a flat
/// (r, v) phase-plane reading of the initial profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SamplingMeasure {
    Radial,
    Planar,
}

/// Full description of one simulation scenario.
///
/// The focusing constant H0 is fixed to 1 (so omega0 = 1); the radial
/// homogenized equations implemented here assume it.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    /// Scale ratio between the fast focusing period and the slow time.
    pub epsilon: f64,
    /// Oscillating external field shape (frequency included).
    pub h1_kind: H1Kind,
    /// Total beam charge; scales the self-field.
    pub intensity: f64,
    /// Thermal velocity of the initial Gaussian velocity profile.
    pub vth: f64,
    /// Support half-width `a` of the initial spatial profile.
    pub half_width: f64,
    /// Number of macro-particles (must be even: mirrored pairs).
    pub n_particles: usize,
    /// Number of radial grid nodes (odd, so 0 is a node).
    pub grid_nodes: usize,
    /// Grid extent R_max; nodes span [-R_max, R_max].
    pub grid_extent: f64,
    /// Quadrature nodes p for fast-angle averages.
    pub quad_nodes: usize,
    /// Slow time step.
    pub dt: f64,
    /// Final slow time.
    pub t_end: f64,
    /// RNG seed for initial sampling.
    pub seed: u64,
    /// Whether the self-consistent field is evaluated.
    pub self_field: bool,
    /// Measure for drawing |r| in the initial sampling.
    pub sampling: SamplingMeasure,
    /// Times at which phase-space snapshots are written.
    pub snapshots: Vec<f64>,
    /// Reference-solver time step; defaults to epsilon * dt.
    pub dt_ref: Option<f64>,
}

impl ScenarioConfig {
    /// Reference-solver step, defaulting to the paper's ratio dt_ref = eps * dt.
    pub fn dt_ref(&self) -> f64 {
        self.dt_ref.unwrap_or(self.epsilon * self.dt)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0) {
            return Err(Error::config("epsilon must be > 0"));
        }
        if !(self.dt > 0.0) {
            return Err(Error::config("dt must be > 0"));
        }
        if !(self.t_end >= 0.0) {
            return Err(Error::config("t_end must be >= 0"));
        }
        if self.quad_nodes < 1 {
            return Err(Error::config("quad_nodes must be >= 1"));
        }
        if self.grid_nodes < 3 {
            return Err(Error::config("grid_nodes must be >= 3"));
        }
        if self.grid_nodes.is_multiple_of(2) {
            return Err(Error::config("grid_nodes must be odd so that 0 is a node"));
        }
        if !(self.grid_extent > self.half_width) {
            return Err(Error::config("grid_extent must exceed half_width"));
        }
        if self.n_particles == 0 || !self.n_particles.is_multiple_of(2) {
            return Err(Error::config(
                "n_particles must be even (mirrored pairs) and non-zero",
            ));
        }
        if !(self.intensity > 0.0) {
            return Err(Error::config("intensity must be > 0"));
        }
        if !(self.vth >= 0.0) {
            return Err(Error::config("vth must be >= 0"));
        }
        if !(self.half_width > 0.0) {
            return Err(Error::config("half_width must be > 0"));
        }
        if let H1Kind::Irrational(w) = self.h1_kind {
            if !(w > 0.0) || !w.is_finite() {
                return Err(Error::config("omega1 must be a positive finite number"));
            }
        }
        if let Some(dt_ref) = self.dt_ref {
            if !(dt_ref > 0.0) {
                return Err(Error::config("dt_ref must be > 0"));
            }
        }
        if self.snapshots.iter().any(|t| !t.is_finite() || *t < 0.0) {
            return Err(Error::config("snapshot times must be finite and >= 0"));
        }
        Ok(())
    }
}

/// Builder holding raw key/value pairs before validation. Every key except
/// `epsilon`, `h1_kind` and `t_end` has a default.
#[derive(Debug, Clone, Default)]
struct RawConfig {
    epsilon: Option<f64>,
    h1_keyword: Option<String>,
    omega1: Option<String>,
    intensity: Option<f64>,
    vth: Option<f64>,
    half_width: Option<f64>,
    n_particles: Option<usize>,
    grid_nodes: Option<usize>,
    grid_extent: Option<f64>,
    quad_nodes: Option<usize>,
    dt: Option<f64>,
    t_end: Option<f64>,
    seed: Option<u64>,
    self_field: Option<bool>,
    sampling: Option<SamplingMeasure>,
    snapshots: Option<Vec<f64>>,
    dt_ref: Option<f64>,
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    v.parse::<f64>()
        .map_err(|_| Error::config(format!("key `{key}`: invalid number `{v}`")))
}

fn parse_usize(key: &str, v: &str) -> Result<usize> {
    v.parse::<usize>()
        .map_err(|_| Error::config(format!("key `{key}`: invalid integer `{v}`")))
}

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v {
        "true" | "on" | "1" => Ok(true),
        "false" | "off" | "0" => Ok(false),
        _ => Err(Error::config(format!("key `{key}`: invalid flag `{v}`"))),
    }
}

impl RawConfig {
    fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "epsilon" => self.epsilon = Some(parse_f64(key, value)?),
            "h1_kind" => self.h1_keyword = Some(value.to_string()),
            "omega1" => self.omega1 = Some(value.to_string()),
            "intensity" => self.intensity = Some(parse_f64(key, value)?),
            "vth" => self.vth = Some(parse_f64(key, value)?),
            "half_width" => self.half_width = Some(parse_f64(key, value)?),
            "n_particles" => self.n_particles = Some(parse_usize(key, value)?),
            "grid_nodes" => self.grid_nodes = Some(parse_usize(key, value)?),
            "grid_extent" => self.grid_extent = Some(parse_f64(key, value)?),
            "quad_nodes" => self.quad_nodes = Some(parse_usize(key, value)?),
            "dt" => self.dt = Some(parse_f64(key, value)?),
            "t_end" => self.t_end = Some(parse_f64(key, value)?),
            "seed" => {
                self.seed = Some(
                    value
                        .parse::<u64>()
                        .map_err(|_| Error::config(format!("key `seed`: invalid `{value}`")))?,
                )
            }
            "self_field" => self.self_field = Some(parse_bool(key, value)?),
            "sampling" => {
                self.sampling = Some(match value {
                    "radial" => SamplingMeasure::Radial,
                    "planar" => SamplingMeasure::Planar,
                    _ => {
                        return Err(Error::config(format!(
                            "key `sampling`: expected `radial` or `planar`, got `{value}`"
                        )))
                    }
                })
            }
            "snapshots" => {
                let mut times = Vec::new();
                for part in value.split(',') {
                    let part = part.trim();
                    if !part.is_empty() {
                        times.push(parse_f64(key, part)?);
                    }
                }
                self.snapshots = Some(times);
            }
            "dt_ref" => self.dt_ref = Some(parse_f64(key, value)?),
            _ => return Err(Error::config(format!("unknown config key `{key}`"))),
        }
        Ok(())
    }

    fn build(self) -> Result<ScenarioConfig> {
        let epsilon = self
            .epsilon
            .ok_or_else(|| Error::config("missing required key `epsilon`"))?;
        let t_end = self
            .t_end
            .ok_or_else(|| Error::config("missing required key `t_end`"))?;
        let keyword = self
            .h1_keyword
            .ok_or_else(|| Error::config("missing required key `h1_kind`"))?;

        let h1_kind = match keyword.as_str() {
            "zero" => H1Kind::Zero,
            "cos" | "cos2" => {
                let w = match &self.omega1 {
                    Some(s) => parse_ratio(s)?,
                    None => Ratio::new(1, 1)?,
                };
                if keyword == "cos" {
                    H1Kind::Cos(w)
                } else {
                    H1Kind::CosSquared(w)
                }
            }
            "irrational" => {
                let s = self.omega1.as_deref().ok_or_else(|| {
                    Error::config("h1_kind = irrational requires an explicit omega1")
                })?;
                H1Kind::Irrational(parse_f64("omega1", s)?)
            }
            _ => {
                return Err(Error::config(format!(
                    "key `h1_kind`: expected zero|cos|cos2|irrational, got `{keyword}`"
                )))
            }
        };

        let half_width = self.half_width.unwrap_or(defaults::HALF_WIDTH);
        let config = ScenarioConfig {
            epsilon,
            h1_kind,
            intensity: self.intensity.unwrap_or(defaults::INTENSITY),
            vth: self.vth.unwrap_or(defaults::VTH),
            half_width,
            n_particles: self.n_particles.unwrap_or(defaults::N_PARTICLES),
            grid_nodes: self.grid_nodes.unwrap_or(defaults::GRID_NODES),
            grid_extent: self
                .grid_extent
                .unwrap_or(defaults::GRID_EXTENT_FACTOR * half_width),
            quad_nodes: self.quad_nodes.unwrap_or(defaults::QUAD_NODES),
            dt: self.dt.unwrap_or(defaults::DT),
            t_end,
            seed: self.seed.unwrap_or(defaults::SEED),
            self_field: self.self_field.unwrap_or(true),
            sampling: self.sampling.unwrap_or(SamplingMeasure::Radial),
            snapshots: self.snapshots.unwrap_or_default(),
            dt_ref: self.dt_ref,
        };
        config.validate()?;
        Ok(config)
    }
}

/// Documented defaults for every optional config key.
pub mod defaults {
    pub const INTENSITY: f64 = 1.0;
    pub const VTH: f64 = 0.0727518214392;
    pub const HALF_WIDTH: f64 = 0.75;
    pub const N_PARTICLES: usize = 50_000;
    pub const GRID_NODES: usize = 129;
    /// grid_extent defaults to this factor times half_width.
    pub const GRID_EXTENT_FACTOR: f64 = 4.0;
    pub const QUAD_NODES: usize = 15;
    pub const DT: f64 = 0.05;
    pub const SEED: u64 = 1;
}

/// Parse a flat `key = value` config file. `#` starts a comment; blank lines
/// are ignored; unknown keys are errors.
pub fn parse_config(text: &str) -> Result<ScenarioConfig> {
    let mut raw = RawConfig::default();
    for (lineno, line) in text.lines().enumerate() {
        let line = match line.split_once('#') {
            Some((before, _)) => before,
            None => line,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::config(format!("line {}: expected `key = value`", lineno + 1)))?;
        raw.set(key.trim(), value.trim())?;
    }
    raw.build()
}

/// Serialize a config as a flat `key = value` file that `parse_config`
/// round-trips exactly (float values use shortest round-trip formatting).
pub fn serialize_config(config: &ScenarioConfig) -> String {
    let mut out = String::new();
    let mut push = |k: &str, v: String| {
        out.push_str(k);
        out.push_str(" = ");
        out.push_str(&v);
        out.push('\n');
    };
    push("epsilon", format!("{}", config.epsilon));
    push("h1_kind", config.h1_kind.keyword().to_string());
    match &config.h1_kind {
        H1Kind::Zero => {}
        H1Kind::Cos(w) | H1Kind::CosSquared(w) => push("omega1", w.to_string()),
        H1Kind::Irrational(w) => push("omega1", format!("{w}")),
    }
    push("intensity", format!("{}", config.intensity));
    push("vth", format!("{}", config.vth));
    push("half_width", format!("{}", config.half_width));
    push("n_particles", format!("{}", config.n_particles));
    push("grid_nodes", format!("{}", config.grid_nodes));
    push("grid_extent", format!("{}", config.grid_extent));
    push("quad_nodes", format!("{}", config.quad_nodes));
    push("dt", format!("{}", config.dt));
    push("t_end", format!("{}", config.t_end));
    push("seed", format!("{}", config.seed));
    push("self_field", format!("{}", config.self_field));
    push(
        "sampling",
        match config.sampling {
            SamplingMeasure::Radial => "radial".to_string(),
            SamplingMeasure::Planar => "planar".to_string(),
        },
    );
    if !config.snapshots.is_empty() {
        let times: Vec<String> = config.snapshots.iter().map(|t| format!("{t}")).collect();
        push("snapshots", times.join(", "));
    }
    if let Some(dt_ref) = config.dt_ref {
        push("dt_ref", format!("{dt_ref}"));
    }
    out
}
