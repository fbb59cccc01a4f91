use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::homogeneous::ReducedForm;
use crate::kinetic::{KineticTransport, MacroClosure};
use crate::model::{DimensionalParams, ModelParams, Squeeze};
use crate::pde::FluxScheme;
use crate::stability::JacobianForm;

/// Recognised keys per section, with their defaults as shown by `--help`.
pub const KEYS: &[(&str, &str, &str)] = &[
    ("", "preset", "none; `paper-pars` or `paper-dimensional`"),
    (
        "",
        "command",
        "none; subcommand to run when none is given on the command line",
    ),
    ("params", "beta", "required unless a preset is given"),
    ("params", "zeta", "required unless a preset is given"),
    ("params", "mu", "required unless a preset is given"),
    ("params", "delta", "required unless a preset is given"),
    ("params", "tau", "required unless a preset is given"),
    ("params", "xi", "required unless a preset is given"),
    ("params", "eta", "required unless a preset is given"),
    ("params", "phi", "required unless a preset is given"),
    ("params", "theta", "required unless a preset is given"),
    ("params", "Theta_cap", "required unless a preset is given"),
    ("params", "Omega_cap", "required unless a preset is given"),
    ("params", "Xi_cap", "required unless a preset is given"),
    ("params", "squeeze", "cosine; or `quadratic`"),
    ("dimensional", "alpha", "required unless a preset is given"),
    ("dimensional", "p12", "required unless a preset is given"),
    ("dimensional", "p31", "required unless a preset is given"),
    ("dimensional", "p21", "required unless a preset is given"),
    ("dimensional", "pC2", "required unless a preset is given"),
    ("dimensional", "d1", "required unless a preset is given"),
    ("dimensional", "d2", "required unless a preset is given"),
    ("dimensional", "d3", "required unless a preset is given"),
    ("dimensional", "dC", "required unless a preset is given"),
    ("dimensional", "d13", "required unless a preset is given"),
    ("dimensional", "d23", "required unless a preset is given"),
    ("dimensional", "b52", "required unless a preset is given"),
    ("dimensional", "b62", "required unless a preset is given"),
    ("dimensional", "r5", "required unless a preset is given"),
    ("dimensional", "r6", "required unless a preset is given"),
    ("dimensional", "R_M", "required unless a preset is given"),
    ("dimensional", "E_bar", "required unless a preset is given"),
    ("dimensional", "V_cap", "required unless a preset is given"),
    ("dimensional", "W_cap", "required unless a preset is given"),
    ("dimensional", "lambda", "required unless a preset is given"),
    ("dimensional", "sigma", "required unless a preset is given"),
    ("dimensional", "gamma", "required unless a preset is given"),
    ("dimensional", "n", "1"),
    ("dimensional", "squeeze", "cosine; or `quadratic`"),
    ("grid", "length", "7 pi"),
    ("grid", "cells", "256"),
    (
        "run",
        "t_end",
        "per command: simulate 500, ode 200, appendix-check 40",
    ),
    ("run", "snapshot_every", "1"),
    ("run", "dt_safety", "0.2"),
    ("run", "scheme", "central; or `upwind`"),
    ("run", "seed", "0"),
    ("run", "amplitude", "0.01"),
    ("run", "out", "out"),
    ("run", "fields", "R (E is always written)"),
    ("run", "wall_clock_budget", "none (seconds)"),
    ("run", "osc_min", "0.3"),
    ("run", "drift_max", "0.001"),
    ("run", "jacobian", "factored; or `consistent`"),
    ("run", "k2_max", "20"),
    ("run", "samples", "401"),
    ("run", "max_mode", "64"),
    ("run", "eps", "0.05"),
    ("run", "velocities", "16"),
    ("run", "transport", "central; or `upwind`"),
    ("run", "closure", "kinetic-limit; or `nominal`"),
    ("run", "t_probe", "1"),
    ("run", "dt", "0.001"),
    (
        "run",
        "initial",
        "equilibrium scaled by 1.1; five comma-separated values A,S,R,C,E",
    ),
    ("run", "volume", "7 pi"),
    ("run", "reduced", "nominal; or `corrected`"),
    ("run", "levels", "3"),
    ("sweep", "theta_min", "0"),
    ("sweep", "theta_max", "0.6"),
    ("sweep", "theta_points", "61"),
    ("sweep", "xi_min", "0"),
    ("sweep", "xi_max", "20"),
    ("sweep", "xi_points", "81"),
    ("sweep", "eps_list", "0.1,0.05,0.025"),
    ("sweep", "dt_list", "2,1,0.5,0.1,0.05,0.01"),
];

const SECTIONS: [&str; 5] = ["params", "dimensional", "grid", "run", "sweep"];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "values")]
pub enum ParamBlock {
    Dimensionless(ModelParams),
    Dimensional(DimensionalParams),
}

impl ParamBlock {
    /// Dimensionless coefficients, mapping a dimensional block through the
    /// nondimensionalisation.
    pub fn model(&self) -> Result<ModelParams> {
        match self {
            ParamBlock::Dimensionless(p) => Ok(*p),
            ParamBlock::Dimensional(d) => crate::model::nondimensionalize(d),
        }
    }

    /// Dimensional constants; a dimensionless block is lifted with unit
    /// scales.
    pub fn dimensional(&self) -> DimensionalParams {
        match self {
            ParamBlock::Dimensionless(p) => DimensionalParams::unit_scale(p),
            ParamBlock::Dimensional(d) => *d,
        }
    }

    /// Sets the dimensionless leukocyte death rate; on a dimensional block
    /// through `d2 = theta d3`.
    pub fn set_theta(&mut self, theta: f64) {
        match self {
            ParamBlock::Dimensionless(p) => p.theta = theta,
            ParamBlock::Dimensional(d) => d.d2 = theta * d.d3,
        }
    }

    /// Sets the dimensionless chemotactic sensitivity; on a dimensional
    /// block by rescaling `gamma`, which it is proportional to.
    pub fn set_xi(&mut self, xi: f64) -> Result<()> {
        match self {
            ParamBlock::Dimensionless(p) => p.xi = xi,
            ParamBlock::Dimensional(d) => {
                let unit =
                    crate::model::nondimensionalize(&DimensionalParams { gamma: 1.0, ..*d })?.xi;
                d.gamma = xi / unit;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    pub length: f64,
    pub cells: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSection {
    pub t_end: Option<f64>,
    pub snapshot_every: f64,
    pub dt_safety: f64,
    pub scheme: FluxScheme,
    pub seed: u64,
    pub amplitude: f64,
    pub out: PathBuf,
    pub fields: Vec<String>,
    pub wall_clock_budget: Option<f64>,
    pub osc_min: f64,
    pub drift_max: f64,
    pub jacobian: JacobianForm,
    pub k2_max: f64,
    pub samples: usize,
    pub max_mode: usize,
    pub eps: f64,
    pub velocities: usize,
    pub transport: KineticTransport,
    pub closure: MacroClosure,
    pub t_probe: f64,
    pub dt: f64,
    pub initial: Option<[f64; 5]>,
    pub volume: f64,
    pub reduced: ReducedForm,
    pub levels: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSection {
    pub theta_min: f64,
    pub theta_max: f64,
    pub theta_points: usize,
    pub xi_min: f64,
    pub xi_max: f64,
    pub xi_points: usize,
    pub eps_list: Vec<f64>,
    pub dt_list: Vec<f64>,
}

/// Everything a subcommand needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub preset: Option<String>,
    pub command: Option<String>,
    pub params: ParamBlock,
    pub grid: GridConfig,
    pub run: RunSection,
    pub sweep: SweepSection,
}

impl RunConfig {
    /// Defaults with the dimensionless reference parameters.
    pub fn preset(name: &str) -> Result<Self> {
        let params =
            preset_block(name).ok_or_else(|| Error::Invalid(format!("unknown preset `{name}`")))?;
        Ok(RunConfig {
            preset: Some(name.to_string()),
            command: None,
            params,
            grid: GridConfig {
                length: 7.0 * std::f64::consts::PI,
                cells: 256,
            },
            run: RunSection {
                t_end: None,
                snapshot_every: 1.0,
                dt_safety: crate::pde::DEFAULT_DT_SAFETY,
                scheme: FluxScheme::Central,
                seed: 0,
                amplitude: 0.01,
                out: PathBuf::from("out"),
                fields: vec!["R".into()],
                wall_clock_budget: None,
                osc_min: 0.3,
                drift_max: 1e-3,
                jacobian: JacobianForm::Factored,
                k2_max: 20.0,
                samples: 401,
                max_mode: 64,
                eps: 0.05,
                velocities: 16,
                transport: KineticTransport::Central,
                closure: MacroClosure::KineticLimit,
                t_probe: 1.0,
                dt: 1e-3,
                initial: None,
                volume: 7.0 * std::f64::consts::PI,
                reduced: ReducedForm::Nominal,
                levels: 3,
            },
            sweep: SweepSection {
                theta_min: 0.0,
                theta_max: 0.6,
                theta_points: 61,
                xi_min: 0.0,
                xi_max: 20.0,
                xi_points: 81,
                eps_list: vec![0.1, 0.05, 0.025],
                dt_list: vec![2.0, 1.0, 0.5, 0.1, 0.05, 0.01],
            },
        })
    }

    /// Canonical text form. Floats use the shortest representation that
    /// parses back to the same value, so the text re-creates `self` exactly.
    pub fn to_ini(&self) -> String {
        let mut s = String::new();
        if let Some(p) = &self.preset {
            writeln!(s, "preset = {p}").unwrap();
        }
        if let Some(c) = &self.command {
            writeln!(s, "command = {c}").unwrap();
        }
        match &self.params {
            ParamBlock::Dimensionless(p) => {
                s.push_str("\n[params]\n");
                for (k, v) in p.named() {
                    writeln!(s, "{k} = {v:?}").unwrap();
                }
                writeln!(s, "squeeze = {}", p.squeeze.name()).unwrap();
            }
            ParamBlock::Dimensional(d) => {
                s.push_str("\n[dimensional]\n");
                for (k, v) in d.named() {
                    writeln!(s, "{k} = {v:?}").unwrap();
                }
                writeln!(s, "n = {}", d.n).unwrap();
                writeln!(s, "squeeze = {}", d.squeeze.name()).unwrap();
            }
        }
        let g = &self.grid;
        write!(
            s,
            "\n[grid]\nlength = {:?}\ncells = {}\n",
            g.length, g.cells
        )
        .unwrap();
        let r = &self.run;
        s.push_str("\n[run]\n");
        if let Some(t) = r.t_end {
            writeln!(s, "t_end = {t:?}").unwrap();
        }
        writeln!(s, "snapshot_every = {:?}", r.snapshot_every).unwrap();
        writeln!(s, "dt_safety = {:?}", r.dt_safety).unwrap();
        writeln!(s, "scheme = {}", r.scheme.name()).unwrap();
        writeln!(s, "seed = {}", r.seed).unwrap();
        writeln!(s, "amplitude = {:?}", r.amplitude).unwrap();
        writeln!(s, "out = {}", r.out.display()).unwrap();
        writeln!(s, "fields = {}", r.fields.join(",")).unwrap();
        if let Some(b) = r.wall_clock_budget {
            writeln!(s, "wall_clock_budget = {b:?}").unwrap();
        }
        writeln!(s, "osc_min = {:?}", r.osc_min).unwrap();
        writeln!(s, "drift_max = {:?}", r.drift_max).unwrap();
        writeln!(s, "jacobian = {}", r.jacobian.name()).unwrap();
        writeln!(s, "k2_max = {:?}", r.k2_max).unwrap();
        writeln!(s, "samples = {}", r.samples).unwrap();
        writeln!(s, "max_mode = {}", r.max_mode).unwrap();
        writeln!(s, "eps = {:?}", r.eps).unwrap();
        writeln!(s, "velocities = {}", r.velocities).unwrap();
        writeln!(s, "transport = {}", r.transport.name()).unwrap();
        writeln!(s, "closure = {}", r.closure.name()).unwrap();
        writeln!(s, "t_probe = {:?}", r.t_probe).unwrap();
        writeln!(s, "dt = {:?}", r.dt).unwrap();
        if let Some(init) = r.initial {
            writeln!(s, "initial = {}", join_floats(&init)).unwrap();
        }
        writeln!(s, "volume = {:?}", r.volume).unwrap();
        writeln!(s, "reduced = {}", r.reduced.name()).unwrap();
        writeln!(s, "levels = {}", r.levels).unwrap();
        let w = &self.sweep;
        s.push_str("\n[sweep]\n");
        writeln!(
            s,
            "theta_min = {:?}\ntheta_max = {:?}\ntheta_points = {}",
            w.theta_min, w.theta_max, w.theta_points
        )
        .unwrap();
        writeln!(
            s,
            "xi_min = {:?}\nxi_max = {:?}\nxi_points = {}",
            w.xi_min, w.xi_max, w.xi_points
        )
        .unwrap();
        writeln!(s, "eps_list = {}", join_floats(&w.eps_list)).unwrap();
        writeln!(s, "dt_list = {}", join_floats(&w.dt_list)).unwrap();
        s
    }
}

fn join_floats(v: &[f64]) -> String {
    v.iter()
        .map(|x| format!("{x:?}"))
        .collect::<Vec<_>>()
        .join(",")
}

fn preset_block(name: &str) -> Option<ParamBlock> {
    match name {
        "paper-pars" => Some(ParamBlock::Dimensionless(ModelParams::paper())),
        "paper-dimensional" => Some(ParamBlock::Dimensional(DimensionalParams::paper_reference())),
        _ => None,
    }
}

#[derive(Debug, Clone)]
struct Entry {
    value: String,
    line: usize,
}

/// Raw `section -> key -> value` table with line numbers.
struct Table {
    path: String,
    entries: BTreeMap<(String, String), Entry>,
    section_lines: BTreeMap<String, usize>,
}

impl Table {
    fn err(&self, line: usize, message: impl Into<String>) -> Error {
        Error::Config {
            path: self.path.clone(),
            line,
            message: message.into(),
        }
    }

    fn parse(path: &str, text: &str) -> Result<Self> {
        let mut table = Table {
            path: path.to_string(),
            entries: BTreeMap::new(),
            section_lines: BTreeMap::new(),
        };
        let mut section = String::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split(['#', ';']).next().unwrap().trim();
            if content.is_empty() {
                continue;
            }
            if let Some(rest) = content.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| {
                        table.err(line, format!("malformed section header `{content}`"))
                    })?
                    .trim();
                if !SECTIONS.contains(&name) {
                    return Err(table.err(line, format!("unknown section [{name}]")));
                }
                if let Some(first) = table.section_lines.get(name) {
                    return Err(table.err(
                        line,
                        format!("section [{name}] repeated (first at line {first})"),
                    ));
                }
                table.section_lines.insert(name.to_string(), line);
                section = name.to_string();
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| {
                table.err(line, format!("expected `key = value`, got `{content}`"))
            })?;
            let (key, value) = (key.trim(), value.trim());
            if !KEYS.iter().any(|(s, k, _)| *s == section && *k == key) {
                let place = if section.is_empty() {
                    "top level".to_string()
                } else {
                    format!("[{section}]")
                };
                return Err(table.err(line, format!("unknown key `{key}` in {place}")));
            }
            if value.is_empty() {
                return Err(table.err(line, format!("key `{key}` has no value")));
            }
            let slot = (section.clone(), key.to_string());
            if let Some(prev) = table.entries.get(&slot) {
                return Err(table.err(
                    line,
                    format!("duplicate key `{key}` at lines {} and {line}", prev.line),
                ));
            }
            table.entries.insert(
                slot,
                Entry {
                    value: value.to_string(),
                    line,
                },
            );
        }
        Ok(table)
    }

    fn raw(&self, section: &str, key: &str) -> Option<&Entry> {
        self.entries.get(&(section.to_string(), key.to_string()))
    }

    fn get<T: FromStr>(&self, section: &str, key: &str, kind: &str) -> Result<Option<T>> {
        match self.raw(section, key) {
            None => Ok(None),
            Some(e) => e.value.parse::<T>().map(Some).map_err(|_| {
                self.err(e.line, format!("`{key}` expects {kind}, got `{}`", e.value))
            }),
        }
    }

    fn float(&self, section: &str, key: &str) -> Result<Option<f64>> {
        let v = self.get::<f64>(section, key, "a number")?;
        if let Some(x) = v {
            if !x.is_finite() {
                let line = self.raw(section, key).unwrap().line;
                return Err(self.err(line, format!("`{key}` must be finite")));
            }
        }
        Ok(v)
    }

    fn count(&self, section: &str, key: &str) -> Result<Option<usize>> {
        self.get::<usize>(section, key, "a non-negative integer")
    }

    fn floats(&self, section: &str, key: &str) -> Result<Option<Vec<f64>>> {
        match self.raw(section, key) {
            None => Ok(None),
            Some(e) => e
                .value
                .split(',')
                .map(|s| s.trim().parse::<f64>().ok().filter(|x| x.is_finite()))
                .collect::<Option<Vec<f64>>>()
                .map(Some)
                .ok_or_else(|| {
                    self.err(
                        e.line,
                        format!("`{key}` expects comma-separated numbers, got `{}`", e.value),
                    )
                }),
        }
    }

    fn choice<T>(&self, section: &str, key: &str, options: &[(&str, T)]) -> Result<Option<T>>
    where
        T: Copy,
    {
        match self.raw(section, key) {
            None => Ok(None),
            Some(e) => options
                .iter()
                .find(|(name, _)| *name == e.value)
                .map(|(_, v)| Some(*v))
                .ok_or_else(|| {
                    let names: Vec<&str> = options.iter().map(|(n, _)| *n).collect();
                    self.err(
                        e.line,
                        format!(
                            "`{key}` must be one of {}, got `{}`",
                            names.join(", "),
                            e.value
                        ),
                    )
                }),
        }
    }

    fn squeeze(&self, section: &str) -> Result<Option<Squeeze>> {
        match self.raw(section, "squeeze") {
            None => Ok(None),
            Some(e) => Squeeze::from_name(&e.value)
                .map(Some)
                .ok_or_else(|| self.err(e.line, format!("unknown squeeze `{}`", e.value))),
        }
    }
}

fn set_if<T>(slot: &mut T, v: Option<T>) {
    if let Some(v) = v {
        *slot = v;
    }
}

/// Parses configuration text. `preset_override` (from the command line)
/// takes the place of a `preset` key in the file.
pub fn parse_config_str(
    path: &str,
    text: &str,
    preset_override: Option<&str>,
) -> Result<RunConfig> {
    let t = Table::parse(path, text)?;
    let file_preset = t.raw("", "preset").map(|e| (e.value.clone(), e.line));
    let preset = preset_override.map(|p| (p.to_string(), 0)).or(file_preset);
    let has_params = t.section_lines.contains_key("params");
    let has_dim = t.section_lines.contains_key("dimensional");
    if has_params && has_dim {
        return Err(t.err(
            t.section_lines["dimensional"],
            format!(
                "exactly one parameter block is allowed; [params] already opened at line {}",
                t.section_lines["params"]
            ),
        ));
    }
    let mut cfg = match &preset {
        Some((name, line)) => {
            let cfg = RunConfig::preset(name).map_err(|e| t.err(*line, e.to_string()))?;
            let preset_dim = matches!(cfg.params, ParamBlock::Dimensional(_));
            if (has_params && preset_dim) || (has_dim && !preset_dim) {
                let sec = if has_params { "params" } else { "dimensional" };
                return Err(t.err(
                    t.section_lines[sec],
                    format!("[{sec}] conflicts with preset `{name}`: exactly one parameter block is allowed"),
                ));
            }
            cfg
        }
        None => {
            if !has_params && !has_dim {
                return Err(t.err(
                    0,
                    "no parameter block: give [params], [dimensional] or a preset",
                ));
            }
            let mut cfg = RunConfig::preset("paper-pars").unwrap();
            cfg.preset = None;
            cfg
        }
    };
    cfg.command = t.raw("", "command").map(|e| e.value.clone());

    match &mut cfg.params {
        ParamBlock::Dimensionless(p) => {
            if has_params {
                let line = t.section_lines["params"];
                let mut values = BTreeMap::new();
                for (name, current) in p.named() {
                    match t.float("params", name)? {
                        Some(v) => {
                            values.insert(name, v);
                        }
                        None if preset.is_some() => {
                            values.insert(name, current);
                        }
                        None => {
                            return Err(
                                t.err(line, format!("[params] is missing required key `{name}`"))
                            )
                        }
                    }
                }
                *p = ModelParams {
                    beta: values["beta"],
                    zeta: values["zeta"],
                    mu: values["mu"],
                    delta: values["delta"],
                    tau: values["tau"],
                    xi: values["xi"],
                    eta: values["eta"],
                    phi: values["phi"],
                    theta: values["theta"],
                    theta_cap: values["Theta_cap"],
                    omega_cap: values["Omega_cap"],
                    xi_cap: values["Xi_cap"],
                    squeeze: t.squeeze("params")?.unwrap_or(p.squeeze),
                };
            }
        }
        ParamBlock::Dimensional(d) => {
            if has_dim {
                let line = t.section_lines["dimensional"];
                let mut values = BTreeMap::new();
                for (name, current) in d.named() {
                    match t.float("dimensional", name)? {
                        Some(v) => {
                            values.insert(name, v);
                        }
                        None if preset.is_some() => {
                            values.insert(name, current);
                        }
                        None => {
                            return Err(t.err(
                                line,
                                format!("[dimensional] is missing required key `{name}`"),
                            ))
                        }
                    }
                }
                *d = DimensionalParams {
                    alpha: values["alpha"],
                    p12: values["p12"],
                    p31: values["p31"],
                    p21: values["p21"],
                    pc2: values["pC2"],
                    d1: values["d1"],
                    d2: values["d2"],
                    d3: values["d3"],
                    dc: values["dC"],
                    d13: values["d13"],
                    d23: values["d23"],
                    b52: values["b52"],
                    b62: values["b62"],
                    r5: values["r5"],
                    r6: values["r6"],
                    r_m: values["R_M"],
                    e_bar: values["E_bar"],
                    v_cap: values["V_cap"],
                    w_cap: values["W_cap"],
                    lambda: values["lambda"],
                    sigma: values["sigma"],
                    gamma: values["gamma"],
                    n: t.get::<u32>("dimensional", "n", "an integer")?
                        .unwrap_or(d.n),
                    squeeze: t.squeeze("dimensional")?.unwrap_or(d.squeeze),
                };
            }
        }
    }

    set_if(&mut cfg.grid.length, t.float("grid", "length")?);
    set_if(&mut cfg.grid.cells, t.count("grid", "cells")?);

    let r = &mut cfg.run;
    r.t_end = t.float("run", "t_end")?.or(r.t_end);
    set_if(&mut r.snapshot_every, t.float("run", "snapshot_every")?);
    set_if(&mut r.dt_safety, t.float("run", "dt_safety")?);
    set_if(
        &mut r.scheme,
        t.choice(
            "run",
            "scheme",
            &[
                ("central", FluxScheme::Central),
                ("upwind", FluxScheme::VolumeFillingUpwind),
                ("volume-filling-upwind", FluxScheme::VolumeFillingUpwind),
            ],
        )?,
    );
    set_if(
        &mut r.seed,
        t.get::<u64>("run", "seed", "an unsigned integer")?,
    );
    set_if(&mut r.amplitude, t.float("run", "amplitude")?);
    set_if(
        &mut r.out,
        t.raw("run", "out").map(|e| PathBuf::from(&e.value)),
    );
    set_if(
        &mut r.fields,
        t.raw("run", "fields")
            .map(|e| e.value.split(',').map(|s| s.trim().to_string()).collect()),
    );
    r.wall_clock_budget = t.float("run", "wall_clock_budget")?.or(r.wall_clock_budget);
    set_if(&mut r.osc_min, t.float("run", "osc_min")?);
    set_if(&mut r.drift_max, t.float("run", "drift_max")?);
    set_if(
        &mut r.jacobian,
        t.choice(
            "run",
            "jacobian",
            &[
                ("factored", JacobianForm::Factored),
                ("consistent", JacobianForm::Consistent),
            ],
        )?,
    );
    set_if(&mut r.k2_max, t.float("run", "k2_max")?);
    set_if(&mut r.samples, t.count("run", "samples")?);
    set_if(&mut r.max_mode, t.count("run", "max_mode")?);
    set_if(&mut r.eps, t.float("run", "eps")?);
    set_if(&mut r.velocities, t.count("run", "velocities")?);
    set_if(
        &mut r.transport,
        t.choice(
            "run",
            "transport",
            &[
                ("central", KineticTransport::Central),
                ("upwind", KineticTransport::Upwind),
            ],
        )?,
    );
    set_if(
        &mut r.closure,
        t.choice(
            "run",
            "closure",
            &[
                ("kinetic-limit", MacroClosure::KineticLimit),
                ("nominal", MacroClosure::Nominal),
            ],
        )?,
    );
    set_if(&mut r.t_probe, t.float("run", "t_probe")?);
    set_if(&mut r.dt, t.float("run", "dt")?);
    if let Some(v) = t.floats("run", "initial")? {
        let e = t.raw("run", "initial").unwrap();
        let arr: [f64; 5] = v
            .try_into()
            .map_err(|_| t.err(e.line, "`initial` expects exactly five values A,S,R,C,E"))?;
        r.initial = Some(arr);
    }
    set_if(&mut r.volume, t.float("run", "volume")?);
    set_if(
        &mut r.reduced,
        t.choice(
            "run",
            "reduced",
            &[
                ("nominal", ReducedForm::Nominal),
                ("corrected", ReducedForm::Corrected),
            ],
        )?,
    );
    set_if(&mut r.levels, t.count("run", "levels")?);

    let w = &mut cfg.sweep;
    set_if(&mut w.theta_min, t.float("sweep", "theta_min")?);
    set_if(&mut w.theta_max, t.float("sweep", "theta_max")?);
    set_if(&mut w.theta_points, t.count("sweep", "theta_points")?);
    set_if(&mut w.xi_min, t.float("sweep", "xi_min")?);
    set_if(&mut w.xi_max, t.float("sweep", "xi_max")?);
    set_if(&mut w.xi_points, t.count("sweep", "xi_points")?);
    set_if(&mut w.eps_list, t.floats("sweep", "eps_list")?);
    set_if(&mut w.dt_list, t.floats("sweep", "dt_list")?);
    Ok(cfg)
}

/// Reads and parses a configuration file.
pub fn parse_config(path: &Path, preset_override: Option<&str>) -> Result<RunConfig> {
    let name = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config {
        path: name.clone(),
        line: 0,
        message: format!("cannot read file: {e}"),
    })?;
    parse_config_str(&name, &text, preset_override)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line_of(err: Error) -> usize {
        match err {
            Error::Config { line, .. } => line,
            other => panic!("expected a config error, got {other:?}"),
        }
    }

    #[test]
    fn preset_loads_the_reference_values() {
        let cfg = parse_config_str("t", "preset = paper-pars\n", None).unwrap();
        let p = cfg.params.model().unwrap();
        assert_eq!(p, ModelParams::paper());
        assert_eq!(
            (p.beta, p.zeta, p.mu, p.tau, p.eta, p.phi, p.delta),
            (0.2, 2.0, 2.01, 0.5, 1.0, 1.0, 0.1)
        );
        assert_eq!((p.theta_cap, p.xi_cap, p.omega_cap), (30.0, 0.02, 0.001));
    }

    #[test]
    fn empty_sweep_is_fine() {
        let cfg = parse_config_str(
            "t",
            "preset = paper-pars\ncommand = simulate\n[sweep]\n",
            None,
        )
        .unwrap();
        assert_eq!(cfg.command.as_deref(), Some("simulate"));
    }

    #[test]
    fn duplicate_key_names_both_lines() {
        let err = parse_config_str(
            "t",
            "preset = paper-pars\n[run]\nseed = 1\n\nseed = 2\n",
            None,
        )
        .unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("lines 3 and 5"), "{msg}");
        assert_eq!(line_of(err), 5);
    }

    #[test]
    fn unknown_key_and_type_errors_carry_lines() {
        let err = parse_config_str(
            "t",
            "preset = paper-pars\n[grid]\ncells = 64\nwidth = 3\n",
            None,
        )
        .unwrap_err();
        assert_eq!(line_of(err), 4);
        let err =
            parse_config_str("t", "preset = paper-pars\n[grid]\ncells = many\n", None).unwrap_err();
        assert_eq!(line_of(err), 3);
        let err = parse_config_str("t", "[bogus]\n", None).unwrap_err();
        assert_eq!(line_of(err), 1);
    }

    #[test]
    fn incomplete_block_without_preset() {
        let err = parse_config_str("t", "[params]\nbeta = 0.2\n", None).unwrap_err();
        assert!(
            err.to_string().contains("missing required key `zeta`"),
            "{err}"
        );
        assert_eq!(line_of(err), 1);
        assert!(parse_config_str("t", "[grid]\ncells = 64\n", None).is_err());
    }

    #[test]
    fn one_parameter_block_only() {
        let err = parse_config_str("t", "preset = paper-pars\n[dimensional]\nalpha = 1\n", None)
            .unwrap_err();
        assert_eq!(line_of(err), 2);
        let text = "preset = paper-dimensional\n[params]\nbeta = 1\n";
        assert!(parse_config_str("t", text, None).is_err());
    }

    #[test]
    fn canonical_text_round_trips() {
        let mut cfg = RunConfig::preset("paper-pars").unwrap();
        cfg.params.set_theta(0.4100000000000001);
        cfg.run.initial = Some([0.1, 0.2, 0.3, 0.4, 0.5]);
        cfg.run.t_end = Some(12.5);
        cfg.command = Some("ode".into());
        let back = parse_config_str("t", &cfg.to_ini(), None).unwrap();
        assert_eq!(back, cfg);

        let dim = RunConfig::preset("paper-dimensional").unwrap();
        assert_eq!(parse_config_str("t", &dim.to_ini(), None).unwrap(), dim);
    }

    #[test]
    fn xi_override_on_dimensional_block() {
        let mut block = ParamBlock::Dimensional(DimensionalParams::paper_reference());
        block.set_xi(9.0).unwrap();
        block.set_theta(0.3);
        let p = block.model().unwrap();
        assert!((p.xi - 9.0).abs() < 1e-12 && (p.theta - 0.3).abs() < 1e-15);
    }

    #[test]
    fn every_key_is_documented_once() {
        for (i, (s, k, _)) in KEYS.iter().enumerate() {
            assert!(KEYS[i + 1..].iter().all(|(s2, k2, _)| (s2, k2) != (s, k)));
        }
    }
}
