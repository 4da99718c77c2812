//! INI-style run configuration: `key = value` lines, `#` or `;` comments.
//!
//! Values are resolved in three layers: the named `preset` (if any), then
//! the file, then command-line overrides.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use tcollapse::fourier::invert_shifted_identity;
use tcollapse::initial::{pseudo_inverse_from_density, xi_from_pseudo_inverse};
use tcollapse::{
    sample_initial_data, Anchor, ForcingSpec, ForcingTable, FourierSeries, LagrangianState,
    NoiseKind, NoiseSpec, SchemeConfig, Velocity,
};

use crate::error::{CliError, CliResult};

/// Every key the parser accepts.
pub const KEYS: &[&str] = &[
    "preset",
    "h",
    "epsilon",
    "lambda",
    "L",
    "M",
    "noise",
    "forcing",
    "beta",
    "anchor",
    "T",
    "save_stride",
    "seed",
    "init_xi",
    "init_Z",
    "J",
    "ladder",
    "r_factor",
    "target",
    "ref_J",
    "ref_h",
    "ref_save",
    "omegas",
    "eps_list",
    "perturb",
];

const HEAT: &[(&str, &str)] = &[
    ("h", "1e-3"),
    ("epsilon", "0.05"),
    ("lambda", "0"),
    ("L", "100"),
    ("M", "200"),
    ("noise", "binary"),
    ("forcing", "none"),
    ("T", "0.1"),
    ("init_xi", "rho: 1, 0.5 cos 1"),
    ("init_Z", "zero"),
    ("ladder", "4e-3, 1e-3, 2.5e-4"),
    ("r_factor", "10"),
    ("target", "heat"),
];

const FIXEDPOINT: &[(&str, &str)] = &[
    ("h", "2^-12"),
    ("epsilon", "0.5"),
    ("lambda", "0"),
    ("L", "32"),
    ("M", "64"),
    ("noise", "binary"),
    ("forcing", "none"),
    ("T", "1"),
    ("init_xi", "zero"),
    ("init_Z", "zero"),
];

const NSP: &[(&str, &str)] = &[
    ("h", "2.5e-4"),
    ("epsilon", "0.05"),
    ("lambda", "1"),
    ("L", "400"),
    ("M", "800"),
    ("noise", "binary"),
    ("forcing", "poisson"),
    ("beta", "1"),
    ("T", "0.5"),
    ("save_stride", "100"),
    ("init_xi", "u: 0.05 sin 1"),
    ("init_Z", "zero"),
    ("ladder", "1e-3, 2.5e-4"),
    ("r_factor", "10"),
    ("target", "reference"),
    ("ref_J", "2048"),
    ("ref_h", "2.5e-5"),
    ("ref_save", "1000"),
];

pub fn preset(name: &str) -> Option<&'static [(&'static str, &'static str)]> {
    match name {
        "heat" => Some(HEAT),
        "fixedpoint" => Some(FIXEDPOINT),
        "nsp" => Some(NSP),
        _ => None,
    }
}

/// Initial positions, either `xi0(a)` directly or through `u0 = x + w(x)`.
#[derive(Debug, Clone, PartialEq)]
pub enum InitXi {
    Xi(FourierSeries),
    /// `w = u0 - x`; a density given as `rho:` is converted to this form.
    W(FourierSeries),
}

/// Second field: `Z0(a)` or the Lagrangian velocity `V0(a)`.
#[derive(Debug, Clone, PartialEq)]
pub enum InitZ {
    Z(FourierSeries),
    V(FourierSeries),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TargetKind {
    Heat,
    Reference,
}

/// A fully resolved configuration.
#[derive(Debug, Clone)]
pub struct Settings {
    pub scheme: SchemeConfig,
    pub seed: u64,
    pub init_xi: InitXi,
    pub init_z: InitZ,
    /// Eulerian cells for `fields.csv` and comparisons; `None` picks half
    /// the coarsest label grid.
    pub j_cells: Option<usize>,
    pub ladder: Vec<f64>,
    pub r_factor: f64,
    pub target: TargetKind,
    pub ref_cells: usize,
    pub ref_h: f64,
    pub ref_save: usize,
    pub omegas: Vec<f64>,
    pub eps_list: Vec<f64>,
    /// Added to `xi0` for the second member of the stability pair.
    pub perturb: FourierSeries,
    resolved: BTreeMap<String, String>,
}

/// Parses `key = value` lines. Unknown keys and malformed lines are errors.
pub fn parse_ini(text: &str) -> CliResult<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(CliError::config(
                format!("line {}", i + 1),
                format!("expected `key = value`, got `{line}`"),
            ));
        };
        out.push(check_key(k.trim(), v.trim())?);
    }
    Ok(out)
}

/// Parses a `key=value` override.
pub fn parse_override(s: &str) -> CliResult<(String, String)> {
    match s.split_once('=') {
        Some((k, v)) => check_key(k.trim(), v.trim()),
        None => Err(CliError::config(s, "expected key=value")),
    }
}

fn check_key(k: &str, v: &str) -> CliResult<(String, String)> {
    if !KEYS.contains(&k) {
        return Err(CliError::config(k, "unknown key"));
    }
    Ok((k.to_string(), v.to_string()))
}

impl Settings {
    /// Layers the preset, the optional file and the overrides, then resolves.
    pub fn load(path: Option<&Path>, overrides: &[(String, String)]) -> CliResult<Self> {
        let file = match path {
            Some(p) => {
                let text = fs::read_to_string(p)
                    .map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
                parse_ini(&text)?
            }
            None => Vec::new(),
        };
        Self::from_entries(&file, overrides)
    }

    pub fn from_entries(
        file: &[(String, String)],
        overrides: &[(String, String)],
    ) -> CliResult<Self> {
        let mut raw: BTreeMap<String, String> = BTreeMap::new();
        // A flag beats the file.
        let find = |list: &[(String, String)]| {
            list.iter()
                .rev()
                .find(|(k, _)| k == "preset")
                .map(|(_, v)| v.clone())
        };
        let preset_name = find(overrides).or_else(|| find(file));
        if let Some(name) = preset_name {
            let table = preset(&name).ok_or_else(|| {
                CliError::config(
                    "preset",
                    format!("unknown preset `{name}` (heat, fixedpoint, nsp)"),
                )
            })?;
            for (k, v) in table {
                raw.insert(k.to_string(), v.to_string());
            }
            raw.insert("preset".into(), name);
        }
        for (k, v) in file.iter().chain(overrides) {
            raw.insert(k.clone(), v.clone());
        }
        Resolver {
            raw,
            resolved: BTreeMap::new(),
        }
        .resolve()
    }

    /// The resolved configuration as INI text, one key per line in sorted
    /// order. Loading it back gives the same settings.
    pub fn to_ini(&self) -> String {
        self.resolved
            .iter()
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect()
    }

    pub fn resolved(&self) -> &BTreeMap<String, String> {
        &self.resolved
    }

    /// Eulerian cells for a run on `m` label cells.
    pub fn eulerian_cells(&self, m: usize) -> usize {
        self.j_cells.unwrap_or((m / 2).max(2))
    }

    /// `xi0` as a function of the label.
    pub fn xi0(&self) -> CliResult<Box<dyn Fn(f64) -> f64 + Send + Sync>> {
        match &self.init_xi {
            InitXi::Xi(s) => {
                let s = s.clone();
                Ok(Box::new(move |a| s.eval(a)))
            }
            InitXi::W(w) => Ok(Box::new(xi_from_pseudo_inverse(w)?)),
        }
    }

    /// `w0 = u0 - x` as a function of position.
    pub fn w0(&self) -> CliResult<Box<dyn Fn(f64) -> f64 + Send + Sync>> {
        match &self.init_xi {
            InitXi::W(w) => {
                let w = w.clone();
                Ok(Box::new(move |x| w.eval(x)))
            }
            InitXi::Xi(xi) => {
                let d = xi.derivative();
                if 1.0 + d.sampled_min(4096.max(64 * xi.max_mode())) <= 0.0 {
                    return Err(CliError::config("init_xi", "a + xi0(a) is not increasing"));
                }
                let xi = xi.clone();
                Ok(Box::new(move |x| invert_shifted_identity(&xi, &d, x) - x))
            }
        }
    }

    /// Initial density, available when positions are given through `u0`.
    pub fn rho0(&self) -> Option<FourierSeries> {
        match &self.init_xi {
            InitXi::W(w) => Some(FourierSeries::constant(1.0).plus(&w.derivative())),
            InitXi::Xi(_) => None,
        }
    }

    /// `Z0` as a function of the label (converted from `V0` if needed).
    pub fn z0(&self) -> CliResult<Box<dyn Fn(f64) -> f64 + Send + Sync>> {
        let xi0 = self.xi0()?;
        let lambda = self.scheme.lambda;
        match &self.init_z {
            InitZ::Z(s) => {
                let s = s.clone();
                Ok(Box::new(move |a| s.eval(a)))
            }
            InitZ::V(s) => {
                let s = s.clone();
                Ok(Box::new(move |a| s.eval(a) - lambda * xi0(a)))
            }
        }
    }

    /// Initial data on `m` cells with this configuration's `lambda`.
    pub fn initial_state(&self, m: usize) -> CliResult<LagrangianState> {
        let xi0 = self.xi0()?;
        let z0 = self.z0()?;
        Ok(sample_initial_data(
            &*xi0,
            Velocity::Z(&*z0),
            m,
            self.scheme.lambda,
        )?)
    }

    /// The second member of the stability pair.
    pub fn perturbed_state(&self, m: usize) -> CliResult<LagrangianState> {
        let xi0 = self.xi0()?;
        let z0 = self.z0()?;
        let p = self.perturb.clone();
        let xi1 = move |a: f64| xi0(a) + p.eval(a);
        sample_initial_data(&xi1, Velocity::Z(&*z0), m, self.scheme.lambda)
            .map_err(|e| CliError::config("perturb", e.to_string()))
    }
}

struct Resolver {
    raw: BTreeMap<String, String>,
    resolved: BTreeMap<String, String>,
}

impl Resolver {
    fn get(&mut self, key: &'static str, default: Option<&str>) -> CliResult<String> {
        let v = match (self.raw.get(key), default) {
            (Some(v), _) => v.clone(),
            (None, Some(d)) => d.to_string(),
            (None, None) => return Err(CliError::config(key, "missing required key")),
        };
        self.resolved.insert(key.to_string(), v.clone());
        Ok(v)
    }

    fn real(&mut self, key: &'static str, default: Option<&str>) -> CliResult<f64> {
        let v = self.get(key, default)?;
        parse_real(&v).ok_or_else(|| CliError::config(key, format!("expected a number, got `{v}`")))
    }

    fn count(&mut self, key: &'static str, default: Option<&str>) -> CliResult<usize> {
        let v = self.get(key, default)?;
        v.parse().map_err(|_| {
            CliError::config(key, format!("expected a non-negative integer, got `{v}`"))
        })
    }

    fn reals(&mut self, key: &'static str, default: &str) -> CliResult<Vec<f64>> {
        let v = self.get(key, Some(default))?;
        v.split(',')
            .map(|s| {
                parse_real(s.trim())
                    .ok_or_else(|| CliError::config(key, format!("expected numbers, got `{s}`")))
            })
            .collect()
    }

    fn resolve(mut self) -> CliResult<Settings> {
        let h = self.real("h", None)?;
        let epsilon = self.real("epsilon", None)?;
        let lambda = self.real("lambda", Some("0"))?;
        let frequency = self.count("L", None)?;
        let default_m = (2 * frequency).to_string();
        let cells = self.count("M", Some(&default_m))?;
        let horizon = self.real("T", None)?;
        let save_stride = self.count("save_stride", Some("1"))?;
        let seed_s = self.get("seed", Some("0"))?;
        let seed: u64 = seed_s.parse().map_err(|_| {
            CliError::config(
                "seed",
                format!("expected an unsigned integer, got `{seed_s}`"),
            )
        })?;

        let noise_s = self.get("noise", Some("binary"))?;
        let kind = parse_noise(&noise_s, seed)?;
        let noise = NoiseSpec::new(kind, frequency)?;

        let forcing_s = self.get("forcing", Some("none"))?;
        let forcing = match forcing_s.as_str() {
            "none" => ForcingSpec::None,
            "poisson" => {
                let beta = self.real("beta", None)?;
                ForcingSpec::poisson(beta)?
            }
            s => match call_args(s, "tabulated") {
                Some(args) => ForcingSpec::Tabulated(ForcingTable::new(parse_nodes(args)?)?),
                None => {
                    return Err(CliError::config(
                        "forcing",
                        format!("expected none, poisson or tabulated(y:F, ...), got `{s}`"),
                    ))
                }
            },
        };

        let anchor_s = self.get("anchor", Some("mean_closest"))?;
        let anchor = Anchor::from_name(&anchor_s).ok_or_else(|| {
            CliError::config(
                "anchor",
                format!("expected mean_closest, l2_input or zero_phase, got `{anchor_s}`"),
            )
        })?;

        let scheme = SchemeConfig {
            h,
            epsilon,
            lambda,
            cells,
            noise,
            forcing,
            anchor,
            horizon,
            save_stride,
        };
        scheme.validate()?;

        let init_xi_s = self.get("init_xi", Some("zero"))?;
        let init_xi = parse_init_xi(&init_xi_s)?;
        let init_z_s = self.get("init_Z", Some("zero"))?;
        let init_z = parse_init_z(&init_z_s)?;

        let j_cells = match self.get("J", Some("auto"))?.as_str() {
            "auto" => None,
            _ => {
                let j = self.count("J", None)?;
                if j < 2 {
                    return Err(CliError::config("J", "need at least 2 Eulerian cells"));
                }
                Some(j)
            }
        };
        let h_s = self.raw.get("h").cloned().unwrap_or_default();
        let ladder = self.reals("ladder", &h_s)?;
        let r_factor = self.real("r_factor", Some("10"))?;
        let default_target = if lambda == 0.0 && scheme.forcing.is_none() {
            "heat"
        } else {
            "reference"
        };
        let target = match self.get("target", Some(default_target))?.as_str() {
            "heat" => TargetKind::Heat,
            "reference" => TargetKind::Reference,
            other => {
                return Err(CliError::config(
                    "target",
                    format!("expected heat or reference, got `{other}`"),
                ))
            }
        };
        let ref_cells = self.count("ref_J", Some("1024"))?;
        let default_ref_h = format!("{}", h / 10.0);
        let ref_h = self.real("ref_h", Some(&default_ref_h))?;
        let ref_save = self.count("ref_save", Some("100"))?;
        let omegas = self.reals("omegas", "0.015625, 0.0625, 0.25")?;
        let eps_list = self.reals("eps_list", "0.01, 0.05, 0.2")?;
        let perturb_s = self.get("perturb", Some("0.02 sin 2"))?;
        let perturb = parse_fourier(&perturb_s).map_err(|r| CliError::config("perturb", r))?;
        if let Some(p) = self.raw.get("preset").cloned() {
            self.resolved.insert("preset".into(), p);
        }

        Ok(Settings {
            scheme,
            seed,
            init_xi,
            init_z,
            j_cells,
            ladder,
            r_factor,
            target,
            ref_cells,
            ref_h,
            ref_save,
            omegas,
            eps_list,
            perturb,
            resolved: self.resolved,
        })
    }
}

/// A real number, a fraction `p/q` or a power `b^e`.
pub fn parse_real(s: &str) -> Option<f64> {
    let s = s.trim();
    let v = if let Some((p, q)) = s.split_once('/') {
        p.trim().parse::<f64>().ok()? / q.trim().parse::<f64>().ok()?
    } else if let Some((b, e)) = s.split_once('^') {
        b.trim()
            .parse::<f64>()
            .ok()?
            .powf(e.trim().parse::<f64>().ok()?)
    } else {
        s.parse::<f64>().ok()?
    };
    v.is_finite().then_some(v)
}

/// `name(args)` returns `args`.
fn call_args<'a>(s: &'a str, name: &str) -> Option<&'a str> {
    s.strip_prefix(name)?
        .trim()
        .strip_prefix('(')?
        .strip_suffix(')')
}

fn parse_noise(s: &str, seed: u64) -> CliResult<NoiseKind> {
    match s {
        "binary" => Ok(NoiseKind::Binary),
        "stochastic" => Ok(NoiseKind::Stochastic { seed }),
        _ => {
            let args = call_args(s, "samples").ok_or_else(|| {
                CliError::config(
                    "noise",
                    format!("expected binary, stochastic or samples(...), got `{s}`"),
                )
            })?;
            args.split(',')
                .map(|v| {
                    parse_real(v)
                        .ok_or_else(|| CliError::config("noise", format!("bad sample `{v}`")))
                })
                .collect::<CliResult<Vec<_>>>()
                .map(NoiseKind::Samples)
        }
    }
}

fn parse_nodes(args: &str) -> CliResult<Vec<(f64, f64)>> {
    args.split(',')
        .map(|node| {
            let bad =
                || CliError::config("forcing", format!("expected y:F, got `{}`", node.trim()));
            let (y, f) = node.split_once(':').ok_or_else(bad)?;
            Ok((
                parse_real(y).ok_or_else(bad)?,
                parse_real(f).ok_or_else(bad)?,
            ))
        })
        .collect()
}

/// Comma-separated terms `c`, `A cos m` or `A sin m`; `zero` is the empty
/// series.
pub fn parse_fourier(s: &str) -> Result<FourierSeries, String> {
    let s = s.trim();
    let mut out = FourierSeries::zero();
    if s == "zero" || s.is_empty() {
        return Ok(out);
    }
    for term in s.split(',') {
        let parts: Vec<&str> = term.split_whitespace().collect();
        let bad = || format!("cannot read Fourier term `{}`", term.trim());
        let amp = parse_real(parts.first().ok_or_else(bad)?).ok_or_else(bad)?;
        match parts.as_slice() {
            [_] => out.mean += amp,
            [_, kind, mode] => {
                let mode: usize = mode.parse().map_err(|_| bad())?;
                if mode == 0 {
                    return Err(bad());
                }
                let one = match *kind {
                    "cos" => FourierSeries::cos_mode(mode, amp),
                    "sin" => FourierSeries::sin_mode(mode, amp),
                    _ => return Err(bad()),
                };
                out = out.plus(&one);
            }
            _ => return Err(bad()),
        }
    }
    Ok(out)
}

fn parse_init_xi(s: &str) -> CliResult<InitXi> {
    let err = |r: String| CliError::config("init_xi", r);
    if let Some(rest) = s.strip_prefix("u:") {
        return Ok(InitXi::W(parse_fourier(rest).map_err(err)?));
    }
    if let Some(rest) = s.strip_prefix("rho:") {
        let rho = parse_fourier(rest).map_err(err)?;
        let w = pseudo_inverse_from_density(&rho)
            .map_err(|e| CliError::config("init_xi", e.to_string()))?;
        return Ok(InitXi::W(w));
    }
    Ok(InitXi::Xi(parse_fourier(s).map_err(err)?))
}

fn parse_init_z(s: &str) -> CliResult<InitZ> {
    let err = |r: String| CliError::config("init_Z", r);
    if let Some(rest) = s.strip_prefix("v:") {
        return Ok(InitZ::V(parse_fourier(rest).map_err(err)?));
    }
    Ok(InitZ::Z(parse_fourier(s).map_err(err)?))
}
