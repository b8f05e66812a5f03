//! Flat `key = value` run configuration.
//!
//! Blank lines and text after `#` are ignored. Lists are comma separated,
//! tuples whitespace separated. Flux is φ/2π, either exact
//! (`flux_num`/`flux_den`) or real (`flux`).

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use hall_core::{c64, LatticeBox, StepShape};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Bulk,
    Edge,
    Topology,
    Harper,
    Diagnose,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Bulk => "bulk",
            Command::Edge => "edge",
            Command::Topology => "topology",
            Command::Harper => "harper",
            Command::Diagnose => "diagnose",
        }
    }
}

impl FromStr for Command {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        Ok(match s {
            "bulk" => Command::Bulk,
            "edge" => Command::Edge,
            "topology" => Command::Topology,
            "harper" => Command::Harper,
            "diagnose" => Command::Diagnose,
            _ => return Err(CliError::Config(format!("unknown command '{s}'"))),
        })
    }
}

/// Flux per plaquette in units of 2π.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Flux {
    Rational { num: i64, den: i64 },
    Real(f64),
}

impl Flux {
    pub fn phi(&self) -> f64 {
        match *self {
            Flux::Rational { num, den } => 2.0 * PI * num as f64 / den as f64,
            Flux::Real(f) => 2.0 * PI * f,
        }
    }
}

impl fmt::Display for Flux {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Flux::Rational { num, den } => write!(f, "{num}/{den}"),
            Flux::Real(x) => write!(f, "{x:?}"),
        }
    }
}

impl FromStr for Flux {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        let s = s.trim();
        if let Some((a, b)) = s.split_once('/') {
            let num = parse::<i64>("flux", a)?;
            let den = parse::<i64>("flux", b)?;
            if den <= 0 {
                return Err(CliError::Config(format!(
                    "flux denominator must be positive in '{s}'"
                )));
            }
            Ok(Flux::Rational { num, den })
        } else {
            Ok(Flux::Real(parse::<f64>("flux", s)?))
        }
    }
}

type Triangle = [(i64, i64); 3];

/// Every setting a run can use; unset keys take the defaults below.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub command: Option<Command>,
    pub name: Option<String>,
    pub flux: Flux,
    pub alpha: f64,
    pub seed: u64,
    pub bx: LatticeBox,
    pub mc_box: Option<LatticeBox>,
    pub edge_depths: Vec<i64>,
    pub window: i64,
    pub delta: Option<(f64, f64)>,
    pub rho_shape: StepShape,
    pub row_cut: Option<i64>,
    pub fermi_gap: Option<(f64, f64)>,
    pub lambda_grid: Vec<f64>,
    pub times: Vec<f64>,
    pub averaging_times: Vec<f64>,
    pub quad_nodes: usize,
    pub samples: usize,
    pub z: Option<c64>,
    pub neumann_flux: Vec<Flux>,
    pub radii: Vec<i64>,
    pub triangles: Vec<Triangle>,
    pub marker_inner: i64,
    pub marker_cutoff: i64,
    pub mu: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            command: None,
            name: None,
            flux: Flux::Rational { num: 1, den: 3 },
            alpha: 0.0,
            seed: 0,
            bx: LatticeBox::centered(16).unwrap(),
            mc_box: None,
            edge_depths: Vec::new(),
            window: 8,
            delta: None,
            rho_shape: StepShape::Bump,
            row_cut: None,
            fermi_gap: None,
            lambda_grid: Vec::new(),
            times: Vec::new(),
            averaging_times: Vec::new(),
            quad_nodes: 24,
            samples: 0,
            z: None,
            neumann_flux: Vec::new(),
            radii: Vec::new(),
            triangles: Vec::new(),
            marker_inner: 3,
            marker_cutoff: 12,
            mu: 1.0,
        }
    }
}

fn parse<T: FromStr>(key: &str, s: &str) -> Result<T, CliError> {
    s.trim()
        .parse::<T>()
        .map_err(|_| CliError::Config(format!("bad value '{}' for {key}", s.trim())))
}

fn list<T: FromStr>(key: &str, s: &str) -> Result<Vec<T>, CliError> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(|p| parse(key, p)).collect()
}

fn tuple<T: FromStr>(key: &str, s: &str, n: usize) -> Result<Vec<T>, CliError> {
    let v: Vec<T> = s
        .split_whitespace()
        .map(|p| parse(key, p))
        .collect::<Result<_, _>>()?;
    if v.len() != n {
        return Err(CliError::Config(format!(
            "{key} needs {n} values, got '{}'",
            s.trim()
        )));
    }
    Ok(v)
}

fn parse_box(key: &str, s: &str) -> Result<LatticeBox, CliError> {
    let v = tuple::<i64>(key, s, 4)?;
    LatticeBox::new((v[0], v[1]), (v[2], v[3])).map_err(|e| CliError::Config(format!("{key}: {e}")))
}

fn parse_pair(key: &str, s: &str) -> Result<(f64, f64), CliError> {
    let v = tuple::<f64>(key, s, 2)?;
    if !(v[0] < v[1]) {
        return Err(CliError::Config(format!(
            "{key} must be an increasing pair"
        )));
    }
    Ok((v[0], v[1]))
}

fn parse_shape(s: &str) -> Result<StepShape, CliError> {
    let s = s.trim();
    if s == "bump" {
        return Ok(StepShape::Bump);
    }
    if let Some(k) = s.strip_prefix("skewed:") {
        let k = parse::<f64>("rho_shape", k)?;
        if !(k.abs() < 1.0) {
            return Err(CliError::Config(format!("skew {k} outside (-1, 1)")));
        }
        return Ok(StepShape::Skewed(k));
    }
    Err(CliError::Config(format!("unknown rho_shape '{s}'")))
}

fn parse_triangles(s: &str) -> Result<Vec<Triangle>, CliError> {
    s.split(';')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            let v = tuple::<i64>("triangles", t, 6)?;
            Ok([(v[0], v[1]), (v[2], v[3]), (v[4], v[5])])
        })
        .collect()
}

fn join<T: fmt::Display>(v: &[T]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

fn join_f(v: &[f64]) -> String {
    v.iter()
        .map(|x| format!("{x:?}"))
        .collect::<Vec<_>>()
        .join(", ")
}

fn box_text(b: &LatticeBox) -> String {
    format!("{} {} {} {}", b.x1_min, b.x1_max, b.x2_min, b.x2_max)
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut c = Self::default();
        let mut seen = std::collections::BTreeSet::new();
        let (mut num, mut den) = (None, None);
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                CliError::Config(format!("line {}: expected 'key = value'", lineno + 1))
            })?;
            let (k, v) = (k.trim(), v.trim());
            if !seen.insert(k.to_string()) {
                return Err(CliError::Config(format!(
                    "line {}: duplicate key {k}",
                    lineno + 1
                )));
            }
            match k {
                "command" => c.command = Some(v.parse()?),
                "name" => {
                    if v.is_empty() || v.contains(['/', '\\']) {
                        return Err(CliError::Config(format!("bad output name '{v}'")));
                    }
                    c.name = Some(v.to_string())
                }
                "flux" => c.flux = v.parse()?,
                "flux_num" => num = Some(parse::<i64>(k, v)?),
                "flux_den" => den = Some(parse::<i64>(k, v)?),
                "alpha" => c.alpha = parse(k, v)?,
                "seed" => c.seed = parse(k, v)?,
                "box" => c.bx = parse_box(k, v)?,
                "mc_box" => c.mc_box = Some(parse_box(k, v)?),
                "edge_depths" => c.edge_depths = list(k, v)?,
                "window" => c.window = parse(k, v)?,
                "delta" => c.delta = Some(parse_pair(k, v)?),
                "rho_shape" => c.rho_shape = parse_shape(v)?,
                "row_cut" => c.row_cut = Some(parse(k, v)?),
                "fermi_gap" => c.fermi_gap = Some(parse_pair(k, v)?),
                "lambda_grid" => c.lambda_grid = list(k, v)?,
                "times" => c.times = list(k, v)?,
                "averaging_times" => c.averaging_times = list(k, v)?,
                "quad_nodes" => c.quad_nodes = parse(k, v)?,
                "samples" => c.samples = parse(k, v)?,
                "z" => {
                    let p = tuple::<f64>(k, v, 2)?;
                    c.z = Some(c64::new(p[0], p[1]));
                }
                "neumann_flux" => c.neumann_flux = list(k, v)?,
                "radii" => c.radii = list(k, v)?,
                "triangles" => c.triangles = parse_triangles(v)?,
                "marker_inner" => c.marker_inner = parse(k, v)?,
                "marker_cutoff" => c.marker_cutoff = parse(k, v)?,
                "mu" => c.mu = parse(k, v)?,
                _ => {
                    return Err(CliError::Config(format!(
                        "line {}: unknown key '{k}'",
                        lineno + 1
                    )))
                }
            }
        }
        match (num, den) {
            (None, None) => {}
            (Some(_), Some(_)) if seen.contains("flux") => {
                return Err(CliError::Config(
                    "give either flux or flux_num/flux_den".into(),
                ))
            }
            (Some(n), Some(d)) => c.flux = format!("{n}/{d}").parse()?,
            _ => return Err(CliError::Config("flux_num and flux_den go together".into())),
        }
        c.validate()?;
        Ok(c)
    }

    fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        if !self.alpha.is_finite() || self.alpha < 0.0 {
            return bad(format!(
                "alpha must be a nonnegative number, got {}",
                self.alpha
            ));
        }
        if self.window < 0 {
            return bad(format!("window must be nonnegative, got {}", self.window));
        }
        if self.quad_nodes < 2 {
            return bad(format!(
                "quad_nodes must be at least 2, got {}",
                self.quad_nodes
            ));
        }
        if self.averaging_times.iter().any(|&t| !(t > 0.0)) {
            return bad("averaging_times must be positive".into());
        }
        if self.edge_depths.iter().any(|&a| a < 0) {
            return bad("edge_depths must be nonnegative".into());
        }
        if !(self.mu > 0.0) {
            return bad(format!("mu must be positive, got {}", self.mu));
        }
        if let Some(z) = self.z {
            if z.im == 0.0 {
                return bad("z must have nonzero imaginary part".into());
            }
        }
        if self
            .lambda_grid
            .iter()
            .chain(&self.times)
            .any(|x| !x.is_finite())
        {
            return bad("grids must be finite".into());
        }
        Ok(())
    }

    /// Canonical text form; `parse(to_text())` reproduces the config exactly.
    pub fn to_text(&self) -> String {
        let mut out = Vec::new();
        if let Some(c) = self.command {
            out.push(format!("command = {}", c.name()));
        }
        if let Some(n) = &self.name {
            out.push(format!("name = {n}"));
        }
        match self.flux {
            Flux::Rational { num, den } => {
                out.push(format!("flux_num = {num}"));
                out.push(format!("flux_den = {den}"));
            }
            Flux::Real(x) => out.push(format!("flux = {x:?}")),
        }
        out.push(format!("alpha = {:?}", self.alpha));
        out.push(format!("seed = {}", self.seed));
        out.push(format!("box = {}", box_text(&self.bx)));
        if let Some(b) = &self.mc_box {
            out.push(format!("mc_box = {}", box_text(b)));
        }
        out.push(format!("edge_depths = {}", join(&self.edge_depths)));
        out.push(format!("window = {}", self.window));
        if let Some((a, b)) = self.delta {
            out.push(format!("delta = {a:?} {b:?}"));
        }
        out.push(format!(
            "rho_shape = {}",
            match self.rho_shape {
                StepShape::Bump => "bump".to_string(),
                StepShape::Skewed(k) => format!("skewed:{k:?}"),
            }
        ));
        if let Some(r) = self.row_cut {
            out.push(format!("row_cut = {r}"));
        }
        if let Some((a, b)) = self.fermi_gap {
            out.push(format!("fermi_gap = {a:?} {b:?}"));
        }
        out.push(format!("lambda_grid = {}", join_f(&self.lambda_grid)));
        out.push(format!("times = {}", join_f(&self.times)));
        out.push(format!(
            "averaging_times = {}",
            join_f(&self.averaging_times)
        ));
        out.push(format!("quad_nodes = {}", self.quad_nodes));
        out.push(format!("samples = {}", self.samples));
        if let Some(z) = self.z {
            out.push(format!("z = {:?} {:?}", z.re, z.im));
        }
        out.push(format!("neumann_flux = {}", join(&self.neumann_flux)));
        out.push(format!("radii = {}", join(&self.radii)));
        let tris: Vec<String> = self
            .triangles
            .iter()
            .map(|t| {
                format!(
                    "{} {} {} {} {} {}",
                    t[0].0, t[0].1, t[1].0, t[1].1, t[2].0, t[2].1
                )
            })
            .collect();
        out.push(format!("triangles = {}", tris.join("; ")));
        out.push(format!("marker_inner = {}", self.marker_inner));
        out.push(format!("marker_cutoff = {}", self.marker_cutoff));
        out.push(format!("mu = {:?}", self.mu));
        out.join("\n") + "\n"
    }

    pub fn phi(&self) -> f64 {
        self.flux.phi()
    }
}
