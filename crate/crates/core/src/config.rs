//! Run configuration: an INI-style key-value format with sections
//! `[grid]`, `[model]`, `[stepper]`, `[initial]`, `[probes]`, `[output]`.
//!
//! Parsing is a single pass that reports every problem it finds — unknown
//! keys, missing keys, invariant violations — each with a line number,
//! instead of stopping at the first. A parsed configuration serializes
//! back to canonical text that re-parses to an identical structure.

use crate::grid::Field;
use crate::grid::GridSpec;
use crate::model::{Diffusion, ModelSpec, MonotoneTable, Sensitivity, SignalMode, Source};
use crate::reference::Barenblatt;
use crate::stepper::{ProbeConfig, StepperConfig};
use std::collections::BTreeMap;
use std::fmt;

/// A single located problem in a config file.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostic {
    /// 1-based line; 0 when the problem has no specific line (e.g. a
    /// missing section).
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigErrors(pub Vec<Diagnostic>);

impl fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.0 {
            if d.line > 0 {
                writeln!(f, "line {}: {}", d.line, d.message)?;
            } else {
                writeln!(f, "{}", d.message)?;
            }
        }
        Ok(())
    }
}

impl std::error::Error for ConfigErrors {}

/// Initial profile of a field, evaluated at cell centers.
#[derive(Debug, Clone, PartialEq)]
pub enum Profile {
    Constant {
        value: f64,
    },
    /// `offset + amplitude cos(pi x / Lx) [cos(pi y / Ly)]`
    CosineBump {
        offset: f64,
        amplitude: f64,
    },
    /// `floor + (base - floor) (1 - depth exp(-r^2 / (2 width^2)))` with
    /// `r` the distance to the domain center; dips to exactly `floor` at
    /// the center for depth 1.
    GaussianDip {
        base: f64,
        floor: f64,
        depth: f64,
        width: f64,
    },
    /// Self-similar porous-medium source profile at absolute time `t0`,
    /// centered in the domain. Density only; requires the porous-medium
    /// diffusion family.
    Barenblatt {
        c: f64,
        t0: f64,
    },
}

impl Profile {
    /// Analytic minimum of the profile over the box; the positivity
    /// floor used as delta0 for density profiles.
    pub fn floor(&self) -> f64 {
        match self {
            Profile::Constant { value } => *value,
            Profile::CosineBump { offset, amplitude } => offset - amplitude.abs(),
            Profile::GaussianDip {
                base, floor, depth, ..
            } => floor + (base - floor) * (1.0 - depth),
            Profile::Barenblatt { .. } => 0.0,
        }
    }

    /// Sample at cell centers. `pm_exponent` feeds the Barenblatt
    /// profile and must match the model's porous-medium exponent.
    pub fn evaluate(&self, grid: &GridSpec, pm_exponent: f64) -> Field {
        match self {
            Profile::Constant { value } => Field::constant(grid, *value),
            Profile::CosineBump { offset, amplitude } => {
                let pi = std::f64::consts::PI;
                let kx = pi / grid.length_x();
                let two_d = grid.dim() == 2;
                let ky = pi / grid.length_y();
                Field::from_fn(grid, |x, y| {
                    let mode = if two_d {
                        (kx * x).cos() * (ky * y).cos()
                    } else {
                        (kx * x).cos()
                    };
                    offset + amplitude * mode
                })
            }
            Profile::GaussianDip {
                base,
                floor,
                depth,
                width,
            } => {
                let cx = grid.length_x() / 2.0;
                let cy = grid.length_y() / 2.0;
                let two_d = grid.dim() == 2;
                Field::from_fn(grid, |x, y| {
                    let dx = x - cx;
                    let dy = if two_d { y - cy } else { 0.0 };
                    let r2 = dx * dx + dy * dy;
                    floor + (base - floor) * (1.0 - depth * (-r2 / (2.0 * width * width)).exp())
                })
            }
            Profile::Barenblatt { c, t0 } => Barenblatt {
                m: pm_exponent,
                c: *c,
            }
            .sample(grid, *t0),
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            Profile::Constant { .. } => "constant",
            Profile::CosineBump { .. } => "cosine_bump",
            Profile::GaussianDip { .. } => "gaussian_dip",
            Profile::Barenblatt { .. } => "barenblatt",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputConfig {
    pub directory: String,
    pub prefix: String,
}

/// A fully validated run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub grid: GridSpec,
    pub model: ModelSpec,
    pub stepper: StepperConfig,
    pub u0: Profile,
    pub v0: Profile,
    pub probes: ProbeConfig,
    pub output: OutputConfig,
}

impl RunConfig {
    /// Positivity floor of the density profile.
    pub fn delta0(&self) -> f64 {
        self.u0.floor()
    }

    fn pm_exponent(&self) -> f64 {
        match self.model.diffusion {
            Diffusion::PorousMedium { m } => m,
            _ => 2.0,
        }
    }

    /// Realize the initial fields on the configured grid.
    pub fn build_initial(&self) -> (Field, Field) {
        self.build_initial_on(&self.grid)
    }

    /// Realize the initial fields on another grid (refinement studies).
    pub fn build_initial_on(&self, grid: &GridSpec) -> (Field, Field) {
        (
            self.u0.evaluate(grid, self.pm_exponent()),
            self.v0.evaluate(grid, self.pm_exponent()),
        )
    }

    /// Canonical serialization; parsing it back yields an identical
    /// structure.
    pub fn to_ini_string(&self) -> String {
        let mut s = String::new();
        s.push_str("[grid]\n");
        s.push_str(&format!("dim = {}\n", self.grid.dim()));
        s.push_str(&format!("length_x = {}\n", self.grid.length_x()));
        s.push_str(&format!("cells_x = {}\n", self.grid.nx()));
        if self.grid.dim() == 2 {
            s.push_str(&format!("length_y = {}\n", self.grid.length_y()));
            s.push_str(&format!("cells_y = {}\n", self.grid.ny()));
        }
        s.push('\n');

        s.push_str("[model]\n");
        match &self.model.diffusion {
            Diffusion::PorousMedium { m } => {
                s.push_str("diffusion = \"porous_medium\"\n");
                s.push_str(&format!("m = {m}\n"));
            }
            Diffusion::Linear { d } => {
                s.push_str("diffusion = \"linear\"\n");
                s.push_str(&format!("d = {d}\n"));
            }
            Diffusion::Custom(table) => {
                s.push_str("diffusion = \"custom\"\n");
                let pairs: Vec<String> = sample_table_pairs(table)
                    .iter()
                    .map(|(a, b)| format!("{a}:{b}"))
                    .collect();
                s.push_str(&format!("table = \"{}\"\n", pairs.join(", ")));
            }
        }
        match &self.model.sensitivity {
            Sensitivity::Constant { chi } => {
                s.push_str(&format!("chi = {chi}\n"));
            }
            Sensitivity::Saturating { chi, kappa } => {
                s.push_str(&format!("chi = {chi}\n"));
                s.push_str(&format!("kappa = {kappa}\n"));
            }
        }
        match &self.model.source {
            Source::Zero => s.push_str("source = \"zero\"\n"),
            Source::Logistic { r, k } => {
                s.push_str("source = \"logistic\"\n");
                s.push_str(&format!("r = {r}\n"));
                s.push_str(&format!("K = {k}\n"));
            }
        }
        s.push_str(&format!(
            "signal_mode = \"{}\"\n",
            match self.model.signal_mode {
                SignalMode::Consumption => "consumption",
                SignalMode::KellerSegel => "keller_segel",
            }
        ));
        s.push_str(&format!("s0 = {}\n", self.model.s0));
        s.push_str(&format!("p = {}\n", self.model.p));
        s.push('\n');

        s.push_str("[stepper]\n");
        s.push_str(&format!("t_end = {}\n", self.stepper.t_end));
        s.push_str(&format!("cfl_safety = {}\n", self.stepper.cfl_safety));
        s.push_str(&format!("dt_max = {}\n", self.stepper.dt_max));
        s.push_str(&format!(
            "blowup_threshold = {}\n",
            self.stepper.blowup_threshold
        ));
        s.push_str(&format!(
            "deadcore_epsilon = {}\n",
            self.stepper.deadcore_epsilon
        ));
        s.push_str(&format!("solver_rtol = {}\n", self.stepper.solver_rtol));
        s.push_str(&format!(
            "halt_on_deadcore = {}\n",
            self.stepper.halt_on_deadcore
        ));
        s.push('\n');

        s.push_str("[initial]\n");
        push_profile(&mut s, "u0", &self.u0);
        push_profile(&mut s, "v0", &self.v0);
        s.push('\n');

        s.push_str("[probes]\n");
        s.push_str(&format!("record_every = {}\n", self.probes.record_every));
        let times: Vec<String> = self
            .probes
            .snapshot_times
            .iter()
            .map(|t| format!("{t}"))
            .collect();
        s.push_str(&format!("snapshot_times = \"{}\"\n", times.join(", ")));
        s.push('\n');

        s.push_str("[output]\n");
        s.push_str(&format!("directory = \"{}\"\n", self.output.directory));
        s.push_str(&format!("prefix = \"{}\"\n", self.output.prefix));
        s
    }
}

fn push_profile(s: &mut String, name: &str, p: &Profile) {
    s.push_str(&format!("{name} = \"{}\"\n", p.kind()));
    match p {
        Profile::Constant { value } => {
            s.push_str(&format!("{name}_value = {value}\n"));
        }
        Profile::CosineBump { offset, amplitude } => {
            s.push_str(&format!("{name}_offset = {offset}\n"));
            s.push_str(&format!("{name}_amplitude = {amplitude}\n"));
        }
        Profile::GaussianDip {
            base,
            floor,
            depth,
            width,
        } => {
            s.push_str(&format!("{name}_base = {base}\n"));
            s.push_str(&format!("{name}_floor = {floor}\n"));
            s.push_str(&format!("{name}_depth = {depth}\n"));
            s.push_str(&format!("{name}_width = {width}\n"));
        }
        Profile::Barenblatt { c, t0 } => {
            s.push_str(&format!("{name}_c = {c}\n"));
            s.push_str(&format!("{name}_t0 = {t0}\n"));
        }
    }
}

fn sample_table_pairs(table: &MonotoneTable) -> Vec<(f64, f64)> {
    table.knots()
}

// ---------------------------------------------------------------------
// parsing

struct Entry {
    value: String,
    line: usize,
    taken: std::cell::Cell<bool>,
}

struct Sections {
    map: BTreeMap<String, (usize, BTreeMap<String, Entry>)>,
}

struct Ctx {
    diags: Vec<Diagnostic>,
}

impl Ctx {
    fn report(&mut self, line: usize, message: impl Into<String>) {
        self.diags.push(Diagnostic {
            line,
            message: message.into(),
        });
    }
}

const KNOWN_SECTIONS: [&str; 6] = ["grid", "model", "stepper", "initial", "probes", "output"];

fn split_sections(text: &str, ctx: &mut Ctx) -> Sections {
    let mut map: BTreeMap<String, (usize, BTreeMap<String, Entry>)> = BTreeMap::new();
    let mut current: Option<String> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
            continue;
        }
        if line.starts_with('[') {
            if !line.ends_with(']') {
                ctx.report(line_no, format!("malformed section header `{line}`"));
                current = None;
                continue;
            }
            let name = line[1..line.len() - 1].trim().to_string();
            if !KNOWN_SECTIONS.contains(&name.as_str()) {
                ctx.report(line_no, format!("unknown section `[{name}]`"));
                current = None;
                continue;
            }
            match map.entry(name.clone()) {
                std::collections::btree_map::Entry::Occupied(_) => {
                    ctx.report(line_no, format!("duplicate section `[{name}]`"));
                }
                std::collections::btree_map::Entry::Vacant(slot) => {
                    slot.insert((line_no, BTreeMap::new()));
                }
            }
            current = Some(name);
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            ctx.report(line_no, format!("expected `key = value`, got `{line}`"));
            continue;
        };
        let key = key.trim().to_string();
        let value = unquote(value.trim()).to_string();
        match &current {
            None => ctx.report(line_no, format!("key `{key}` outside any section")),
            Some(section) => {
                let entries = &mut map.get_mut(section).unwrap().1;
                match entries.entry(key) {
                    std::collections::btree_map::Entry::Occupied(slot) => {
                        ctx.report(
                            line_no,
                            format!("duplicate key `{}` in [{section}]", slot.key()),
                        );
                    }
                    std::collections::btree_map::Entry::Vacant(slot) => {
                        slot.insert(Entry {
                            value,
                            line: line_no,
                            taken: std::cell::Cell::new(false),
                        });
                    }
                }
            }
        }
    }
    Sections { map }
}

fn unquote(v: &str) -> &str {
    if v.len() >= 2 && v.starts_with('"') && v.ends_with('"') {
        &v[1..v.len() - 1]
    } else {
        v
    }
}

struct SectionView<'a> {
    name: &'a str,
    line: usize,
    entries: Option<&'a BTreeMap<String, Entry>>,
}

impl<'a> SectionView<'a> {
    fn take(&self, key: &str) -> Option<(&'a str, usize)> {
        let e = self.entries?.get(key)?;
        e.taken.set(true);
        Some((e.value.as_str(), e.line))
    }

    fn req(&self, key: &str, ctx: &mut Ctx) -> Option<(&'a str, usize)> {
        let got = self.take(key);
        if got.is_none() {
            ctx.report(
                self.line,
                format!("missing required key `{key}` in [{}]", self.name),
            );
        }
        got
    }

    fn f64_opt(&self, key: &str, ctx: &mut Ctx) -> Option<f64> {
        let (raw, line) = self.take(key)?;
        match raw.parse::<f64>() {
            Ok(v) => Some(v),
            Err(_) => {
                ctx.report(line, format!("`{key}` expects a number, got `{raw}`"));
                None
            }
        }
    }

    fn f64_req(&self, key: &str, ctx: &mut Ctx) -> Option<f64> {
        let (raw, line) = self.req(key, ctx)?;
        match raw.parse::<f64>() {
            Ok(v) => Some(v),
            Err(_) => {
                ctx.report(line, format!("`{key}` expects a number, got `{raw}`"));
                None
            }
        }
    }

    fn usize_opt(&self, key: &str, ctx: &mut Ctx) -> Option<usize> {
        let (raw, line) = self.take(key)?;
        match raw.parse::<usize>() {
            Ok(v) => Some(v),
            Err(_) => {
                ctx.report(
                    line,
                    format!("`{key}` expects a nonnegative integer, got `{raw}`"),
                );
                None
            }
        }
    }

    fn bool_opt(&self, key: &str, ctx: &mut Ctx) -> Option<bool> {
        let (raw, line) = self.take(key)?;
        match raw {
            "true" => Some(true),
            "false" => Some(false),
            _ => {
                ctx.report(line, format!("`{key}` expects true or false, got `{raw}`"));
                None
            }
        }
    }

    fn leftovers(&self, ctx: &mut Ctx) {
        if let Some(entries) = self.entries {
            for (key, e) in entries {
                if !e.taken.get() {
                    ctx.report(e.line, format!("unknown key `{key}` in [{}]", self.name));
                }
            }
        }
    }
}

fn view<'a>(
    sections: &'a Sections,
    name: &'a str,
    required: bool,
    ctx: &mut Ctx,
) -> SectionView<'a> {
    match sections.map.get(name) {
        Some((line, entries)) => SectionView {
            name,
            line: *line,
            entries: Some(entries),
        },
        None => {
            if required {
                ctx.report(0, format!("missing required section [{name}]"));
            }
            SectionView {
                name,
                line: 0,
                entries: None,
            }
        }
    }
}

fn parse_table(raw: &str, line: usize, ctx: &mut Ctx) -> Option<Vec<(f64, f64)>> {
    let mut pairs = Vec::new();
    for piece in raw.split(',') {
        let piece = piece.trim();
        if piece.is_empty() {
            continue;
        }
        let Some((a, b)) = piece.split_once(':') else {
            ctx.report(line, format!("table entry `{piece}` is not `s:value`"));
            return None;
        };
        match (a.trim().parse::<f64>(), b.trim().parse::<f64>()) {
            (Ok(s), Ok(v)) => pairs.push((s, v)),
            _ => {
                ctx.report(line, format!("table entry `{piece}` has non-numeric parts"));
                return None;
            }
        }
    }
    Some(pairs)
}

fn parse_time_list(raw: &str, line: usize, ctx: &mut Ctx) -> Vec<f64> {
    let mut out = Vec::new();
    for piece in raw.split(',') {
        let piece = piece.trim();
        if piece.is_empty() {
            continue;
        }
        match piece.parse::<f64>() {
            Ok(t) => out.push(t),
            Err(_) => ctx.report(line, format!("snapshot time `{piece}` is not a number")),
        }
    }
    out
}

fn parse_profile(section: &SectionView, name: &str, ctx: &mut Ctx) -> Option<Profile> {
    let (kind, kind_line) = section.req(name, ctx)?;
    match kind {
        "constant" => Some(Profile::Constant {
            value: section.f64_req(&format!("{name}_value"), ctx)?,
        }),
        "cosine_bump" => Some(Profile::CosineBump {
            offset: section.f64_req(&format!("{name}_offset"), ctx)?,
            amplitude: section.f64_req(&format!("{name}_amplitude"), ctx)?,
        }),
        "gaussian_dip" => {
            let base = section.f64_req(&format!("{name}_base"), ctx)?;
            let floor = section.f64_req(&format!("{name}_floor"), ctx)?;
            let depth = section.f64_req(&format!("{name}_depth"), ctx)?;
            let width = section.f64_req(&format!("{name}_width"), ctx)?;
            if !(0.0..=1.0).contains(&depth) {
                ctx.report(
                    kind_line,
                    format!("{name}_depth must lie in [0, 1], got {depth}"),
                );
                return None;
            }
            if !(width > 0.0) {
                ctx.report(
                    kind_line,
                    format!("{name}_width must be positive, got {width}"),
                );
                return None;
            }
            if base < floor {
                ctx.report(kind_line, format!("{name}_base must be >= {name}_floor"));
                return None;
            }
            Some(Profile::GaussianDip {
                base,
                floor,
                depth,
                width,
            })
        }
        "barenblatt" => {
            let c = section.f64_req(&format!("{name}_c"), ctx)?;
            let t0 = section.f64_req(&format!("{name}_t0"), ctx)?;
            if !(c > 0.0 && t0 > 0.0) {
                ctx.report(
                    kind_line,
                    format!("{name}_c and {name}_t0 must be positive"),
                );
                return None;
            }
            Some(Profile::Barenblatt { c, t0 })
        }
        other => {
            ctx.report(
                kind_line,
                format!(
                    "unknown profile `{other}` for {name}; expected constant, \
                     cosine_bump, gaussian_dip or barenblatt"
                ),
            );
            None
        }
    }
}

/// Parse and fully validate a configuration, reporting every violation
/// found with its location.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigErrors> {
    let mut ctx = Ctx { diags: Vec::new() };
    let sections = split_sections(text, &mut ctx);

    let grid_s = view(&sections, "grid", true, &mut ctx);
    let model_s = view(&sections, "model", true, &mut ctx);
    let stepper_s = view(&sections, "stepper", true, &mut ctx);
    let initial_s = view(&sections, "initial", true, &mut ctx);
    let probes_s = view(&sections, "probes", false, &mut ctx);
    let output_s = view(&sections, "output", false, &mut ctx);

    // [grid]
    let dim = grid_s.usize_opt("dim", &mut ctx).unwrap_or(1);
    let grid = if dim == 2 {
        let lx = grid_s.f64_req("length_x", &mut ctx);
        let ly = grid_s.f64_req("length_y", &mut ctx);
        let nx = grid_s
            .req("cells_x", &mut ctx)
            .and_then(|(v, l)| parse_cells(v, l, &mut ctx));
        let ny = grid_s
            .req("cells_y", &mut ctx)
            .and_then(|(v, l)| parse_cells(v, l, &mut ctx));
        match (lx, ly, nx, ny) {
            (Some(lx), Some(ly), Some(nx), Some(ny)) => match GridSpec::new_2d(lx, ly, nx, ny) {
                Ok(g) => Some(g),
                Err(e) => {
                    ctx.report(grid_s.line, format!("invalid grid: {e}"));
                    None
                }
            },
            _ => None,
        }
    } else {
        if dim != 1 {
            ctx.report(grid_s.line, format!("dim must be 1 or 2, got {dim}"));
        }
        for key in ["length_y", "cells_y"] {
            if let Some((_, line)) = grid_s.take(key) {
                ctx.report(line, format!("`{key}` is only valid for dim = 2"));
            }
        }
        let lx = grid_s.f64_req("length_x", &mut ctx);
        let nx = grid_s
            .req("cells_x", &mut ctx)
            .and_then(|(v, l)| parse_cells(v, l, &mut ctx));
        match (lx, nx) {
            (Some(lx), Some(nx)) => match GridSpec::new_1d(lx, nx) {
                Ok(g) => Some(g),
                Err(e) => {
                    ctx.report(grid_s.line, format!("invalid grid: {e}"));
                    None
                }
            },
            _ => None,
        }
    };

    // [model]
    let diffusion = match model_s.req("diffusion", &mut ctx) {
        Some(("porous_medium", _)) => model_s
            .f64_req("m", &mut ctx)
            .map(|m| Diffusion::PorousMedium { m }),
        Some(("linear", _)) => model_s
            .f64_req("d", &mut ctx)
            .map(|d| Diffusion::Linear { d }),
        Some(("custom", _)) => model_s.req("table", &mut ctx).and_then(|(raw, line)| {
            let pairs = parse_table(raw, line, &mut ctx)?;
            match MonotoneTable::new(&pairs) {
                Ok(t) => Some(Diffusion::Custom(t)),
                Err(e) => {
                    ctx.report(line, format!("invalid diffusion table: {e}"));
                    None
                }
            }
        }),
        Some((other, line)) => {
            ctx.report(
                line,
                format!("unknown diffusion `{other}`; expected porous_medium, linear or custom"),
            );
            None
        }
        None => None,
    };
    let chi = model_s.f64_req("chi", &mut ctx);
    let sensitivity = match (chi, model_s.f64_opt("kappa", &mut ctx)) {
        (Some(chi), Some(kappa)) => Some(Sensitivity::Saturating { chi, kappa }),
        (Some(chi), None) => Some(Sensitivity::Constant { chi }),
        _ => None,
    };
    let source = match model_s.take("source") {
        None | Some(("zero", _)) => Some(Source::Zero),
        Some(("logistic", _)) => {
            let r = model_s.f64_req("r", &mut ctx);
            let k = model_s.f64_req("K", &mut ctx);
            match (r, k) {
                (Some(r), Some(k)) => Some(Source::Logistic { r, k }),
                _ => None,
            }
        }
        Some((other, line)) => {
            ctx.report(
                line,
                format!("unknown source `{other}`; expected zero or logistic"),
            );
            None
        }
    };
    let signal_mode = match model_s.take("signal_mode") {
        None | Some(("consumption", _)) => Some(SignalMode::Consumption),
        Some(("keller_segel", _)) => Some(SignalMode::KellerSegel),
        Some((other, line)) => {
            ctx.report(
                line,
                format!("unknown signal_mode `{other}`; expected consumption or keller_segel"),
            );
            None
        }
    };
    let s0 = model_s.f64_opt("s0", &mut ctx).unwrap_or(1.0);
    let default_p = match &diffusion {
        Some(Diffusion::PorousMedium { m }) => *m,
        _ => 2.0,
    };
    let p = model_s.f64_opt("p", &mut ctx).unwrap_or(default_p);
    let model = match (diffusion, sensitivity, source, signal_mode) {
        (Some(d), Some(s), Some(f), Some(mode)) => match ModelSpec::new(d, s, f, mode, s0, p) {
            Ok(m) => Some(m),
            Err(e) => {
                ctx.report(model_s.line, format!("invalid model: {e}"));
                None
            }
        },
        _ => None,
    };

    // [stepper]
    let stepper = stepper_s.f64_req("t_end", &mut ctx).map(|t_end| {
        let mut cfg = StepperConfig::new(t_end);
        if let Some(v) = stepper_s.f64_opt("cfl_safety", &mut ctx) {
            cfg.cfl_safety = v;
        }
        if let Some(v) = stepper_s.f64_opt("dt_max", &mut ctx) {
            cfg.dt_max = v;
        }
        if let Some(v) = stepper_s.f64_opt("blowup_threshold", &mut ctx) {
            cfg.blowup_threshold = v;
        }
        if let Some(v) = stepper_s.f64_opt("deadcore_epsilon", &mut ctx) {
            cfg.deadcore_epsilon = v;
        }
        if let Some(v) = stepper_s.f64_opt("solver_rtol", &mut ctx) {
            cfg.solver_rtol = v;
        }
        if let Some(v) = stepper_s.bool_opt("halt_on_deadcore", &mut ctx) {
            cfg.halt_on_deadcore = v;
        }
        cfg
    });
    if let Some(cfg) = &stepper {
        if !(cfg.t_end > 0.0) {
            ctx.report(
                stepper_s.line,
                format!("t_end must be positive, got {}", cfg.t_end),
            );
        }
        if !(cfg.cfl_safety > 0.0 && cfg.cfl_safety <= 1.0) {
            ctx.report(
                stepper_s.line,
                format!("cfl_safety must lie in (0, 1], got {}", cfg.cfl_safety),
            );
        }
        for (name, v) in [
            ("dt_max", cfg.dt_max),
            ("blowup_threshold", cfg.blowup_threshold),
            ("deadcore_epsilon", cfg.deadcore_epsilon),
            ("solver_rtol", cfg.solver_rtol),
        ] {
            if !(v > 0.0) {
                ctx.report(stepper_s.line, format!("{name} must be positive, got {v}"));
            }
        }
    }

    // [initial]
    let u0 = parse_profile(&initial_s, "u0", &mut ctx);
    let v0 = parse_profile(&initial_s, "v0", &mut ctx);
    if let Some(u0) = &u0 {
        let halting = stepper.as_ref().is_none_or(|s| s.halt_on_deadcore);
        if halting && !(u0.floor() > 0.0) {
            ctx.report(
                initial_s.line,
                format!(
                    "initial floor must be positive (u0 reaches {}); compactly \
                     supported data requires halt_on_deadcore = false",
                    u0.floor()
                ),
            );
        }
        if matches!(u0, Profile::Barenblatt { .. })
            && !matches!(
                model.as_ref().map(|m| &m.diffusion),
                Some(Diffusion::PorousMedium { .. })
            )
        {
            ctx.report(
                initial_s.line,
                "barenblatt initial data requires porous_medium diffusion".to_string(),
            );
        }
    }
    if let Some(v0) = &v0 {
        if matches!(v0, Profile::Barenblatt { .. }) {
            ctx.report(
                initial_s.line,
                "barenblatt profile is for u0 only".to_string(),
            );
        } else {
            if v0.floor() < 0.0 {
                ctx.report(
                    initial_s.line,
                    format!("v0 must be nonnegative (reaches {})", v0.floor()),
                );
            }
            let sup = match v0 {
                Profile::Constant { value } => *value,
                Profile::CosineBump { offset, amplitude } => offset + amplitude.abs(),
                Profile::GaussianDip { base, .. } => *base,
                Profile::Barenblatt { .. } => unreachable!(),
            };
            if !(sup > 0.0) {
                ctx.report(initial_s.line, "v0 must not vanish identically".to_string());
            }
        }
    }

    // [probes]
    let record_every = probes_s.usize_opt("record_every", &mut ctx).unwrap_or(10);
    if !(1..=20).contains(&record_every) {
        ctx.report(
            probes_s.line.max(1),
            format!(
                "record_every must lie in 1..=20 so certificate minima are \
                 sampled densely enough, got {record_every}"
            ),
        );
    }
    let snapshot_times = match probes_s.take("snapshot_times") {
        Some((raw, line)) => parse_time_list(raw, line, &mut ctx),
        None => Vec::new(),
    };
    let probes = ProbeConfig {
        record_every: record_every as u64,
        snapshot_times,
    };

    // [output]
    let directory = output_s
        .take("directory")
        .map(|(v, _)| v.to_string())
        .unwrap_or_else(|| "out".to_string());
    let prefix = output_s
        .take("prefix")
        .map(|(v, _)| v.to_string())
        .unwrap_or_else(|| "run".to_string());

    for s in [
        &grid_s, &model_s, &stepper_s, &initial_s, &probes_s, &output_s,
    ] {
        s.leftovers(&mut ctx);
    }

    match (grid, model, stepper, u0, v0) {
        (Some(grid), Some(model), Some(stepper), Some(u0), Some(v0)) if ctx.diags.is_empty() => {
            Ok(RunConfig {
                grid,
                model,
                stepper,
                u0,
                v0,
                probes,
                output: OutputConfig { directory, prefix },
            })
        }
        _ => {
            if ctx.diags.is_empty() {
                ctx.report(0, "configuration incomplete".to_string());
            }
            Err(ConfigErrors(ctx.diags))
        }
    }
}

fn parse_cells(raw: &str, line: usize, ctx: &mut Ctx) -> Option<usize> {
    match raw.parse::<usize>() {
        Ok(v) => Some(v),
        Err(_) => {
            ctx.report(
                line,
                format!("cell count expects a positive integer, got `{raw}`"),
            );
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
[grid]
dim = 1
length_x = 1
cells_x = 64

[model]
diffusion = "porous_medium"
m = 2
chi = 0.5

[stepper]
t_end = 0.5

[initial]
u0 = "cosine_bump"
u0_offset = 1.0
u0_amplitude = 0.5
v0 = "constant"
v0_value = 1.0
"#;

    #[test]
    fn minimal_config_fills_defaults() {
        let cfg = parse_config(MINIMAL).unwrap();
        assert_eq!(cfg.grid.nx(), 64);
        assert_eq!(cfg.stepper.cfl_safety, 0.4);
        assert_eq!(cfg.stepper.blowup_threshold, 1e6);
        assert_eq!(cfg.stepper.deadcore_epsilon, 1e-12);
        assert!(cfg.stepper.halt_on_deadcore);
        assert_eq!(cfg.probes.record_every, 10);
        assert_eq!(cfg.model.p, 2.0); // defaults to m
        assert_eq!(cfg.output.directory, "out");
        assert_eq!(cfg.delta0(), 0.5);
    }

    #[test]
    fn rejects_zero_initial_floor() {
        let text = MINIMAL.replace("u0_amplitude = 0.5", "u0_amplitude = 1.0");
        let err = parse_config(&text).unwrap_err();
        assert!(
            err.0
                .iter()
                .any(|d| d.message.contains("initial floor must be positive")),
            "{err}"
        );
    }

    #[test]
    fn rejects_vanishing_v0() {
        let text = MINIMAL.replace("v0_value = 1.0", "v0_value = 0");
        let err = parse_config(&text).unwrap_err();
        assert!(
            err.0.iter().any(|d| d.message.contains("must not vanish")),
            "{err}"
        );
    }

    #[test]
    fn reports_unknown_and_missing_keys_with_lines() {
        let text = MINIMAL.to_string() + "\n[probes]\nbogus_key = 3\n";
        let err = parse_config(&text).unwrap_err();
        let unknown = err
            .0
            .iter()
            .find(|d| d.message.contains("unknown key `bogus_key`"))
            .expect("unknown key reported");
        assert!(unknown.line > 0);

        let text = MINIMAL.replace("chi = 0.5", "");
        let err = parse_config(&text).unwrap_err();
        assert!(err
            .0
            .iter()
            .any(|d| d.message.contains("missing required key `chi`")));
    }

    #[test]
    fn reports_multiple_violations_in_one_pass() {
        let text = MINIMAL
            .replace("u0_amplitude = 0.5", "u0_amplitude = 2.0")
            .replace("v0_value = 1.0", "v0_value = 0");
        let err = parse_config(&text).unwrap_err();
        assert!(err.0.len() >= 2, "{err}");
    }

    #[test]
    fn round_trip_is_identity() {
        let cfg = parse_config(MINIMAL).unwrap();
        let text = cfg.to_ini_string();
        let cfg2 = parse_config(&text).unwrap();
        assert_eq!(cfg, cfg2);
        // and a second generation is byte-stable
        assert_eq!(text, cfg2.to_ini_string());
    }

    #[test]
    fn round_trip_custom_table_and_2d() {
        let text = r#"
[grid]
dim = 2
length_x = 1
length_y = 2
cells_x = 8
cells_y = 16

[model]
diffusion = "custom"
table = "0:0, 0.5:0.25, 1:1"
chi = 1
kappa = 0.5
source = "logistic"
r = 0.1
K = 2
signal_mode = "keller_segel"
s0 = 0.5
p = 1.5

[stepper]
t_end = 0.1

[initial]
u0 = "gaussian_dip"
u0_base = 1
u0_floor = 0.05
u0_depth = 1
u0_width = 0.1
v0 = "cosine_bump"
v0_offset = 0.5
v0_amplitude = 0.5

[probes]
record_every = 5
snapshot_times = "0.06, 0.08, 0.1"

[output]
directory = "results"
prefix = "trial"
"#;
        let cfg = parse_config(text).unwrap();
        let cfg2 = parse_config(&cfg.to_ini_string()).unwrap();
        assert_eq!(cfg, cfg2);
        assert_eq!(cfg.probes.snapshot_times, vec![0.06, 0.08, 0.1]);
    }

    #[test]
    fn barenblatt_needs_porous_medium_and_no_halting() {
        let text = r#"
[grid]
dim = 1
length_x = 2
cells_x = 64

[model]
diffusion = "linear"
d = 1
chi = 0

[stepper]
t_end = 0.25
halt_on_deadcore = false

[initial]
u0 = "barenblatt"
u0_c = 0.08
u0_t0 = 0.5
v0 = "constant"
v0_value = 0.01
"#;
        let err = parse_config(text).unwrap_err();
        assert!(
            err.0.iter().any(|d| d.message.contains("porous_medium")),
            "{err}"
        );

        let ok = text.replace(
            "diffusion = \"linear\"\nd = 1",
            "diffusion = \"porous_medium\"\nm = 2",
        );
        assert!(parse_config(&ok).is_ok());

        // with halting enabled the compactly supported profile is rejected
        let halting = ok.replace("halt_on_deadcore = false", "halt_on_deadcore = true");
        let err = parse_config(&halting).unwrap_err();
        assert!(
            err.0.iter().any(|d| d.message.contains("initial floor")),
            "{err}"
        );
    }

    #[test]
    fn record_every_is_bounded_for_certificates() {
        let text = MINIMAL.to_string() + "\n[probes]\nrecord_every = 21\n";
        let err = parse_config(&text).unwrap_err();
        assert!(
            err.0.iter().any(|d| d.message.contains("record_every")),
            "{err}"
        );
    }
}
