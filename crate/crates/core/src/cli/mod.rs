//! Batch front end: JSON configuration in, tables, JSON and CSV out.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::fields::{ChargeConfiguration, FieldConvention, Geometry};
use crate::oracle::{auto_cells, build_susy_pair, richardson, susy_algebra_check};
use crate::radial::{find_spectrum, Channel, PotentialConvention, RadialProblem, SpectrumReport};
use crate::slab::{build_slab_solution, degeneracy_family, k_max, radial_profile_csv, slab_residual, z_profile_csv};
use crate::units::{self, coupling_eta, CouplingSet, PhysicalConstants};
use crate::zeromode::{
    cylinder_zero_mode, first_order_coupling, slab_zero_mode, sphere_zero_mode, susy_status, zero_mode_residual,
    PiecewiseRadialFunction, ZeroModeForm,
};

/// Printed value of `4 pi eta rho0` for `rho0 = 2e6 esu/cm^3`, cm^-2.
pub const PAPER_SLAB_BOUND: f64 = 15.28;
/// Printed cylinder threshold, esu/cm.
pub const PAPER_LAMBDA_MIN: f64 = 60.62e6;
/// Density used for the printed slab bound, esu/cm^3.
pub const PAPER_SLAB_RHO0: f64 = 2.0e6;
/// Relative tolerance for a printed number to count as reproduced.
pub const REPRODUCTION_TOL: f64 = 0.015;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("config {path}: {message}")]
    Config { path: PathBuf, message: String },
    #[error("{0}")]
    Physics(#[from] crate::Error),
    #[error("csv: {0}")]
    Csv(String),
    #[error("{0}")]
    Usage(String),
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Csv(e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub constants: Option<PhysicalConstants>,
    pub geometry: ChargeConfiguration,
    #[serde(default)]
    pub strict_gauss: bool,
    #[serde(default)]
    pub zero_mode_form: ZeroModeForm,
    #[serde(default)]
    pub potential_convention: PotentialConvention,
    #[serde(default)]
    pub spectrum: SpectrumOptions,
    #[serde(default)]
    pub oracle: OracleOptions,
    #[serde(default)]
    pub slab: SlabOptions,
    #[serde(default)]
    pub profile: ProfileOptions,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectrumOptions {
    /// Defaults: `l <= 2` for the sphere, `|nu| <= 2` for the cylinder.
    pub channels: Option<Vec<Channel>>,
    /// cm^-2; defaults to `-50` energy scales.
    pub epsilon_min: Option<f64>,
    /// cm^-2
    pub epsilon_max: f64,
    pub n_grid: usize,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        Self {
            channels: None,
            epsilon_min: None,
            epsilon_max: 0.0,
            n_grid: 400,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OracleOptions {
    /// Minimum number of cells of the coarse grid.
    pub cells: usize,
    /// Outer wall in units of `r0`.
    pub r_max_factor: f64,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self {
            cells: 2000,
            r_max_factor: 40.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SlabOptions {
    pub nu: Vec<i32>,
    pub k_samples: usize,
}

impl Default for SlabOptions {
    fn default() -> Self {
        Self {
            nu: vec![0, 1, 2],
            k_samples: 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProfileOptions {
    /// Tabulation range in units of the configuration size.
    pub extent_factor: f64,
    pub points: usize,
}

impl Default for ProfileOptions {
    fn default() -> Self {
        Self {
            extent_factor: 5.0,
            points: 401,
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str, path: &Path) -> Result<Self, CliError> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| CliError::Config {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        cfg.validate().map_err(|e| CliError::Config {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text, path)
    }

    pub fn validate(&self) -> crate::Result<()> {
        self.geometry.validate()?;
        if let Some(c) = &self.constants {
            c.validate()?;
        }
        if self.spectrum.n_grid < 8 {
            return Err(crate::Error::InvalidParameter(
                "spectrum.n_grid must be at least 8".into(),
            ));
        }
        Ok(())
    }

    pub fn constants(&self) -> PhysicalConstants {
        self.constants.clone().unwrap_or_default()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Constants,
    ZeroMode,
    SusyStatus,
    Spectrum,
    Slab,
    Verify,
    ReproducePaper,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Constants => "constants",
            Command::ZeroMode => "zero-mode",
            Command::SusyStatus => "susy-status",
            Command::Spectrum => "spectrum",
            Command::Slab => "slab",
            Command::Verify => "verify",
            Command::ReproducePaper => "reproduce-paper",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Options {
    pub verify: bool,
    pub strict_gauss: bool,
    pub no_timestamp: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputFile {
    pub name: String,
    pub contents: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CommandOutput {
    pub summary: String,
    pub json: Value,
    pub files: Vec<OutputFile>,
}

impl CommandOutput {
    /// Pretty JSON with a trailing newline.
    pub fn json_text(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.json).expect("json");
        s.push('\n');
        s
    }
}

fn q(value: f64, unit: &str) -> Value {
    json!({ "value": value, "unit": unit })
}

fn convention(cfg: &RunConfig, opts: &Options) -> FieldConvention {
    if cfg.strict_gauss || opts.strict_gauss {
        FieldConvention::StrictGauss
    } else {
        FieldConvention::Printed
    }
}

/// Runs one command. The configuration may be omitted only for
/// `reproduce-paper`.
pub fn execute(cmd: Command, cfg: Option<&RunConfig>, opts: &Options) -> Result<CommandOutput, CliError> {
    let needs = || cfg.ok_or_else(|| CliError::Usage(format!("`{}` needs --config <path>", cmd.name())));
    let mut out = match cmd {
        Command::Constants => cmd_constants(needs()?, opts)?,
        Command::ZeroMode => cmd_zero_mode(needs()?, opts)?,
        Command::SusyStatus => cmd_susy_status(needs()?)?,
        Command::Spectrum => cmd_spectrum(needs()?, opts)?,
        Command::Slab => cmd_slab(needs()?, opts)?,
        Command::Verify => cmd_verify(needs()?, opts)?,
        Command::ReproducePaper => cmd_reproduce_paper(cfg)?,
    };
    if let Value::Object(map) = &mut out.json {
        map.insert("command".into(), json!(cmd.name()));
        if !opts.no_timestamp {
            let secs = SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0);
            map.insert("generated_unix_s".into(), json!(secs));
        }
    }
    Ok(out)
}

/// Writes `<command>.json` and every CSV of `out` into `dir`.
pub fn write_outputs(cmd: Command, out: &CommandOutput, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut written = Vec::new();
    let mut write = |name: &str, contents: &str| -> Result<(), CliError> {
        let path = dir.join(name);
        fs::write(&path, contents).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?;
        written.push(path);
        Ok(())
    };
    write(&format!("{}.json", cmd.name()), &out.json_text())?;
    for f in &out.files {
        write(&f.name, &f.contents)?;
    }
    Ok(written)
}

fn csv_string(header: &[&str], rows: Vec<Vec<String>>) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Csv(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("utf8"))
}

fn num(v: f64) -> String {
    format!("{v:.12e}")
}

pub fn cmd_constants(cfg: &RunConfig, _opts: &Options) -> Result<CommandOutput, CliError> {
    let c = cfg.constants();
    let eta = coupling_eta(&c);
    let set = CouplingSet::for_config(&cfg.geometry, &c);
    let lambda_min = units::lambda_threshold(&c);
    let mut summary = format!("constants: {}\neta = {eta:.6e} cm/esu\n", c.source_label);
    let mut j = json!({
        "constants": c,
        "eta": q(eta, "cm/esu"),
        "lambda_threshold": q(lambda_min, "esu/cm"),
        "geometry": cfg.geometry,
    });
    match cfg.geometry {
        ChargeConfiguration::Slab { rho0, .. } => {
            let bound = 4.0 * std::f64::consts::PI * eta * rho0;
            summary.push_str(&format!("4 pi eta rho0 = {bound:.6} cm^-2\n"));
            if rho0 == PAPER_SLAB_RHO0 {
                summary.push_str(&format!("paper: {PAPER_SLAB_BOUND}\n"));
            }
            j["slab_k_bound"] = q(bound, "cm^-2");
            j["slab_k_bound_paper"] = q(PAPER_SLAB_BOUND, "cm^-2");
            if bound > 0.0 {
                j["k_max"] = q(bound.sqrt(), "cm^-1");
            }
        }
        ChargeConfiguration::Sphere { r0, .. } => {
            summary.push_str(&format!(
                "beta = {:.6e} cm^-2, beta r0^2 = {:.6e}\n",
                set.beta,
                set.beta * r0 * r0
            ));
            j["beta"] = q(set.beta, "cm^-2");
            j["beta_r0_squared"] = q(set.beta * r0 * r0, "1");
        }
        ChargeConfiguration::Cylinder { rho, r0 } => {
            let lambda = units::linear_density(rho, r0);
            summary.push_str(&format!(
                "beta = {:.6e} cm^-2, beta r0^2 = {:.6e}\n",
                set.beta,
                set.beta * r0 * r0
            ));
            summary.push_str(&format!("lambda = {lambda:.6e} esu/cm\n"));
            j["beta"] = q(set.beta, "cm^-2");
            j["beta_r0_squared"] = q(set.beta * r0 * r0, "1");
            j["linear_density"] = q(lambda, "esu/cm");
        }
    }
    summary.push_str(&format!("lambda_min = {lambda_min:.6e} esu/cm\n"));
    Ok(CommandOutput {
        summary,
        json: j,
        files: vec![],
    })
}

fn zero_mode_profile(cfg: &RunConfig, opts: &Options) -> Result<PiecewiseRadialFunction, CliError> {
    let c = cfg.constants();
    let set = CouplingSet::for_config(&cfg.geometry, &c);
    Ok(match cfg.geometry {
        ChargeConfiguration::Sphere { r0, .. } => sphere_zero_mode(set.beta, r0, cfg.zero_mode_form)?,
        ChargeConfiguration::Cylinder { r0, .. } => cylinder_zero_mode(set.beta, r0)?,
        ChargeConfiguration::Slab { rho0, thickness } => {
            slab_zero_mode(0.0, rho0, thickness, &c, cfg.zero_mode_form, convention(cfg, opts))?
        }
    })
}

pub fn cmd_zero_mode(cfg: &RunConfig, opts: &Options) -> Result<CommandOutput, CliError> {
    let c = cfg.constants();
    let profile = zero_mode_profile(cfg, opts)?;
    let verdict = susy_status(&cfg.geometry, &c)?;
    let extent = cfg.profile.extent_factor * cfg.geometry.size();
    let rows = profile.tabulate(extent, cfg.profile.points);
    let coord = if cfg.geometry.geometry() == Geometry::Slab {
        "z_cm"
    } else {
        "r_cm"
    };
    let csv = csv_string(
        &[coord, "phi"],
        rows.iter().map(|(x, v)| vec![num(*x), num(*v)]).collect(),
    )?;
    let interfaces = profile.interfaces();
    let samples: Vec<f64> = (1..=1000)
        .map(|i| extent * i as f64 / 1001.0)
        .filter(|x| interfaces.iter().all(|b| (x - b).abs() > 1e-3 * extent))
        .collect();
    let residual = zero_mode_residual(
        &profile,
        first_order_coupling(&cfg.geometry, &c, convention(cfg, opts)),
        &samples,
    );
    let mut summary = format!(
        "zero mode ({:?} form): first-order residual {residual:.3e}\n",
        cfg.zero_mode_form
    );
    if cfg.zero_mode_form == ZeroModeForm::Printed && residual > 1e-6 {
        summary.push_str("  the printed closed form does not solve the first-order equation; set \"zero_mode_form\": \"consistent\" for the exact one\n");
    }
    summary.push_str(&format!("verdict: {:?} ({})\n", verdict.status, verdict.criterion));
    let j = json!({
        "geometry": cfg.geometry,
        "form": cfg.zero_mode_form,
        "verdict": verdict,
        "profile": profile,
        "first_order_residual": q(residual, "1"),
    });
    Ok(CommandOutput {
        summary,
        json: j,
        files: vec![OutputFile {
            name: "zero_mode_profile.csv".into(),
            contents: csv,
        }],
    })
}

pub fn cmd_susy_status(cfg: &RunConfig) -> Result<CommandOutput, CliError> {
    let verdict = susy_status(&cfg.geometry, &cfg.constants())?;
    let summary = format!("{:?}: {}\n", verdict.status, verdict.criterion);
    Ok(CommandOutput {
        summary,
        json: json!({ "geometry": cfg.geometry, "verdict": verdict }),
        files: vec![],
    })
}

fn default_channels(g: Geometry) -> Vec<Channel> {
    match g {
        Geometry::Sphere => {
            let mut v = Vec::new();
            for l in 0..=2u32 {
                if l > 0 {
                    v.push(Channel::Spherical { l, two_j: 2 * l - 1 });
                }
                v.push(Channel::Spherical { l, two_j: 2 * l + 1 });
            }
            v
        }
        _ => (-2..=2).map(|nu| Channel::Planar { nu }).collect(),
    }
}

fn channel_label(ch: &Channel) -> String {
    match ch {
        Channel::Spherical { l, two_j } => format!("l={l} 2j={two_j}"),
        Channel::Planar { nu } => format!("nu={nu}"),
    }
}

fn problems(cfg: &RunConfig) -> Result<Vec<RadialProblem>, CliError> {
    let g = cfg.geometry.geometry();
    if g == Geometry::Slab {
        return Err(CliError::Usage(
            "the slab geometry has no radial spectrum; use `slab`".into(),
        ));
    }
    let c = cfg.constants();
    let channels = cfg.spectrum.channels.clone().unwrap_or_else(|| default_channels(g));
    channels
        .into_iter()
        .map(|ch| Ok(RadialProblem::from_config(&cfg.geometry, &c, ch)?.with_convention(cfg.potential_convention)))
        .collect()
}

/// Adds Richardson-extrapolated grid eigenvalues to `report`, matched in
/// order.
pub fn attach_oracle(report: &mut SpectrumReport, oracle: &OracleOptions) -> crate::Result<()> {
    let p = report.problem;
    let r_max = oracle.r_max_factor * p.r0;
    let n = auto_cells(&p, r_max, oracle.cells);
    let m = report.bound_states.len();
    let ex = richardson(&p, n, r_max, m)?;
    for (s, e) in report.bound_states.iter_mut().zip(ex.extrapolated) {
        s.oracle_epsilon = Some(e);
    }
    Ok(())
}

pub fn cmd_spectrum(cfg: &RunConfig, opts: &Options) -> Result<CommandOutput, CliError> {
    let mut entries = Vec::new();
    let mut rows = Vec::new();
    let mut summary = String::new();
    for p in problems(cfg)? {
        let label = channel_label(&p.channel);
        let lo = cfg.spectrum.epsilon_min.unwrap_or(-50.0 * p.energy_scale());
        match find_spectrum(&p, lo, cfg.spectrum.epsilon_max, cfg.spectrum.n_grid) {
            Ok(mut rep) => {
                if opts.verify {
                    attach_oracle(&mut rep, &cfg.oracle)?;
                }
                summary.push_str(&format!("{label}: {} bound state(s)\n", rep.bound_states.len()));
                for s in &rep.bound_states {
                    let oracle = s.oracle_epsilon.map(num).unwrap_or_default();
                    summary.push_str(&format!(
                        "  eps = {:.9e} cm^-2  nodes = {}  zero_mode = {}{}\n",
                        s.epsilon,
                        s.node_count,
                        s.zero_mode,
                        if oracle.is_empty() {
                            String::new()
                        } else {
                            format!("  oracle = {oracle}")
                        }
                    ));
                    rows.push(vec![
                        label.clone(),
                        num(s.epsilon),
                        s.node_count.to_string(),
                        format!("{:.3e}", s.match_residual),
                        s.zero_mode.to_string(),
                        oracle,
                    ]);
                }
                entries.push(json!({ "channel": label, "outcome": "bound_states", "report": rep }));
            }
            Err(crate::Error::NoBoundStates) => {
                summary.push_str(&format!(
                    "{label}: NoBoundStates in [{lo:.3e}, {:.3e}] cm^-2\n",
                    cfg.spectrum.epsilon_max
                ));
                entries.push(json!({
                    "channel": label,
                    "outcome": "no_bound_states",
                    "problem": p,
                    "window": [q(lo, "cm^-2"), q(cfg.spectrum.epsilon_max, "cm^-2")],
                }));
            }
            Err(e) => return Err(e.into()),
        }
    }
    let csv = csv_string(
        &[
            "channel",
            "epsilon_cm^-2",
            "nodes",
            "residual",
            "zero_mode",
            "oracle_epsilon_cm^-2",
        ],
        rows,
    )?;
    let j = json!({ "geometry": cfg.geometry, "verify": opts.verify, "channels": entries });
    Ok(CommandOutput {
        summary,
        json: j,
        files: vec![OutputFile {
            name: "spectrum.csv".into(),
            contents: csv,
        }],
    })
}

pub fn cmd_slab(cfg: &RunConfig, opts: &Options) -> Result<CommandOutput, CliError> {
    let (rho0, thickness) = match cfg.geometry {
        ChargeConfiguration::Slab { rho0, thickness } => (rho0, thickness),
        _ => return Err(CliError::Usage("`slab` needs a slab geometry".into())),
    };
    let c = cfg.constants();
    let conv = convention(cfg, opts);
    let family = degeneracy_family(&cfg.geometry, &c, cfg.slab.k_samples.max(1))?;
    let top = k_max(&cfg.geometry, &c)?;
    let mut rows = Vec::new();
    let mut files = Vec::new();
    let mut solutions = Vec::new();
    for &nu in &cfg.slab.nu {
        for &k in &family {
            let sol = build_slab_solution(f64::from(nu), k, &cfg.geometry, &c, cfg.zero_mode_form, conv)?;
            let res = slab_residual(&sol, &cfg.geometry, &c)?;
            rows.push(vec![
                nu.to_string(),
                num(k),
                num(sol.k_prime),
                format!("{:.3e}", res.interior_max),
                format!("{:.3e}", res.exterior_max),
            ]);
            solutions.push(json!({
                "nu": nu, "k": q(k, "cm^-1"), "k_prime": q(sol.k_prime, "cm^-1"),
                "interior_residual": res.interior_max, "exterior_residual": res.exterior_max,
            }));
        }
    }
    let k_show = family.get(1).copied().unwrap_or(0.0);
    let extent = cfg.profile.extent_factor * thickness;
    let z_sol = build_slab_solution(0.0, k_show, &cfg.geometry, &c, cfg.zero_mode_form, conv)?;
    files.push(OutputFile {
        name: "slab_z_profile.csv".into(),
        contents: z_profile_csv(&z_sol, extent, cfg.profile.points),
    });
    for &nu in &cfg.slab.nu {
        let sol = build_slab_solution(f64::from(nu), k_show, &cfg.geometry, &c, cfg.zero_mode_form, conv)?;
        let r_ext = if k_show > 0.0 { 20.0 / k_show } else { extent };
        files.push(OutputFile {
            name: format!("slab_radial_nu{nu}.csv"),
            contents: radial_profile_csv(&sol, r_ext, cfg.profile.points),
        });
    }
    files.push(OutputFile {
        name: "slab_family.csv".into(),
        contents: csv_string(
            &[
                "nu",
                "k_cm^-1",
                "k_prime_cm^-1",
                "interior_residual",
                "exterior_residual",
            ],
            rows,
        )?,
    });
    let independence: Vec<Value> = [0.1, 1.0, 10.0, thickness]
        .iter()
        .map(|&l| {
            let g = ChargeConfiguration::Slab { rho0, thickness: l };
            Ok(json!({ "L": q(l, "cm"), "k_max": q(k_max(&g, &c)?, "cm^-1") }))
        })
        .collect::<crate::Result<_>>()?;
    let summary = format!(
        "4 pi eta rho0 = {:.6} cm^-2, k_max = {top:.6} cm^-1 (independent of L)\n{} solutions sampled; the family 0 <= k < k_max is continuous\n",
        top * top,
        solutions.len()
    );
    let j = json!({
        "geometry": cfg.geometry,
        "k_bound": q(top * top, "cm^-2"),
        "k_max": q(top, "cm^-1"),
        "family": family,
        "solutions": solutions,
        "thickness_independence": independence,
        "degeneracy": "continuous in k on [0, k_max)",
    });
    Ok(CommandOutput {
        summary,
        json: j,
        files,
    })
}

pub fn cmd_verify(cfg: &RunConfig, opts: &Options) -> Result<CommandOutput, CliError> {
    let c = cfg.constants();
    let mut checks = Vec::new();
    let mut summary = String::new();
    let mut push = |name: String, value: f64, limit: f64, pass: bool| {
        summary.push_str(&format!(
            "{} {name}: {value:.3e} (limit {limit:.1e})\n",
            if pass { "PASS" } else { "FAIL" }
        ));
        checks.push(json!({ "check": name, "value": value, "limit": limit, "pass": pass }));
    };
    if let (ZeroModeForm::Consistent, _) | (_, ChargeConfiguration::Cylinder { .. }) =
        (cfg.zero_mode_form, cfg.geometry)
    {
        let profile = zero_mode_profile(cfg, opts)?;
        let extent = cfg.profile.extent_factor * cfg.geometry.size();
        let interfaces = profile.interfaces();
        let samples: Vec<f64> = (1..=1000)
            .map(|i| extent * i as f64 / 1001.0)
            .filter(|x| interfaces.iter().all(|b| (x - b).abs() > 1e-3 * extent))
            .collect();
        let r = zero_mode_residual(
            &profile,
            first_order_coupling(&cfg.geometry, &c, convention(cfg, opts)),
            &samples,
        );
        push("zero-mode first-order residual".into(), r, 1e-8, r < 1e-8);
    }
    match cfg.geometry {
        ChargeConfiguration::Slab { rho0, .. } => {
            let a = k_max(&cfg.geometry, &c)?;
            let same = [0.1, 1.0, 10.0]
                .iter()
                .map(|&l| k_max(&ChargeConfiguration::Slab { rho0, thickness: l }, &c))
                .collect::<crate::Result<Vec<_>>>()?
                .iter()
                .all(|&b| b == a);
            push("k_max independent of L".into(), a, 0.0, same);
        }
        _ => {
            for p in problems(cfg)? {
                let label = channel_label(&p.channel);
                let r_max = cfg.oracle.r_max_factor * p.r0;
                let n = auto_cells(&p, r_max, cfg.oracle.cells);
                let check = susy_algebra_check(&build_susy_pair(&p, n, r_max)?);
                push(format!("{label} Q^2"), check.q2_norm, 0.0, check.q2_norm == 0.0);
                push(
                    format!("{label} spectrum of {{Q,Q+}} >= -1e-9 scale"),
                    check.lowest_bosonic[0].min(check.lowest_fermionic[0]) / check.scale,
                    -1e-9,
                    check.nonneg_spectrum_flag,
                );
                let lo = cfg.spectrum.epsilon_min.unwrap_or(-50.0 * p.energy_scale());
                match find_spectrum(&p, lo, cfg.spectrum.epsilon_max, cfg.spectrum.n_grid) {
                    Ok(mut rep) => {
                        attach_oracle(&mut rep, &cfg.oracle)?;
                        for s in &rep.bound_states {
                            let g = s.oracle_epsilon.unwrap_or(f64::NAN);
                            let dev = (s.epsilon - g).abs() / s.epsilon.abs().max(p.energy_scale());
                            push(
                                format!("{label} eps = {:.6e} shooting vs grid", s.epsilon),
                                dev,
                                1e-4,
                                dev < 1e-4,
                            );
                        }
                    }
                    Err(crate::Error::NoBoundStates) => {
                        let ex = richardson(&p, n, r_max, 1)?;
                        let lowest = ex.extrapolated[0] / p.energy_scale();
                        push(
                            format!("{label} no bound states; grid lowest / scale"),
                            lowest,
                            -1e-6,
                            lowest >= -1e-6,
                        );
                    }
                    Err(e) => return Err(e.into()),
                }
            }
        }
    }
    let all = checks.iter().all(|c| c["pass"] == json!(true));
    let j = json!({ "geometry": cfg.geometry, "checks": checks, "all_pass": all });
    Ok(CommandOutput {
        summary,
        json: j,
        files: vec![],
    })
}

pub fn cmd_reproduce_paper(cfg: Option<&RunConfig>) -> Result<CommandOutput, CliError> {
    let c = cfg.map(RunConfig::constants).unwrap_or_default();
    let bound = 4.0 * std::f64::consts::PI * coupling_eta(&c) * PAPER_SLAB_RHO0;
    let lambda = units::lambda_threshold(&c);
    let row = |name: &str, computed: f64, printed: f64, unit: &str| {
        let rel = (computed - printed).abs() / printed.abs();
        let flag = if rel <= REPRODUCTION_TOL { "OK" } else { "MISMATCH" };
        json!({
            "quantity": name,
            "computed": q(computed, unit),
            "printed": q(printed, unit),
            "relative_difference": rel,
            "flag": flag,
        })
    };
    let rows = vec![
        row("4 pi eta rho0 at rho0 = 2e6 esu/cm^3", bound, PAPER_SLAB_BOUND, "cm^-2"),
        row(
            "lambda_min = 4 pi M c^2 / |e kappa|",
            lambda,
            PAPER_LAMBDA_MIN,
            "esu/cm",
        ),
    ];
    let mut summary = format!("constants: {}\n", c.source_label);
    summary.push_str(&format!(
        "{:<40} {:>14} {:>14} {:>10}  flag\n",
        "quantity", "computed", "printed", "rel diff"
    ));
    for r in &rows {
        summary.push_str(&format!(
            "{:<40} {:>14.6e} {:>14.6e} {:>10.3e}  {}\n",
            r["quantity"].as_str().unwrap_or_default(),
            r["computed"]["value"].as_f64().unwrap_or(f64::NAN),
            r["printed"]["value"].as_f64().unwrap_or(f64::NAN),
            r["relative_difference"].as_f64().unwrap_or(f64::NAN),
            r["flag"].as_str().unwrap_or_default(),
        ));
    }
    summary.push_str("see README, \"Known discrepancies\", for the MISMATCH rows\n");
    let j = json!({ "constants": c, "rows": rows, "notes": "README: Known discrepancies" });
    Ok(CommandOutput {
        summary,
        json: j,
        files: vec![],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(text: &str) -> Result<RunConfig, CliError> {
        RunConfig::from_json(text, Path::new("test.json"))
    }

    #[test]
    fn schema_errors_name_the_key() {
        let e = cfg(r#"{"strict_gauss": true}"#).unwrap_err().to_string();
        assert!(e.contains("geometry"), "{e}");
        let e = cfg(r#"{"geometry": {"kind": "sphere", "rho": 1.0, "r0": 1.0}, "bogus": 1}"#)
            .unwrap_err()
            .to_string();
        assert!(e.contains("bogus"), "{e}");
        assert!(e.contains("line"), "{e}");
        let e = cfg(r#"{"geometry": {"kind": "sphere", "rho": 1.0, "r0": -1.0}}"#)
            .unwrap_err()
            .to_string();
        assert!(e.contains("r0"), "{e}");
    }

    #[test]
    fn reproduce_paper_flags() {
        let out = cmd_reproduce_paper(None).unwrap();
        assert_eq!(out.json["rows"][0]["flag"], "OK");
        assert_eq!(out.json["rows"][1]["flag"], "MISMATCH");
        let lambda = out.json["rows"][1]["computed"]["value"].as_f64().unwrap();
        assert!((lambda - 2.06e7).abs() < 0.02e7);
    }

    #[test]
    fn constants_override_changes_computed_column_only() {
        let c = cfg(r#"{"geometry": {"kind": "slab", "rho": 2e6, "L": 1.0},
                        "constants": {"e_esu": 4.8032e-10, "kappa_n": 3.826, "m_n_c2_erg": 1.5053e-3}}"#)
        .unwrap();
        let a = cmd_reproduce_paper(None).unwrap();
        let b = cmd_reproduce_paper(Some(&c)).unwrap();
        assert_eq!(a.json["rows"][0]["printed"], b.json["rows"][0]["printed"]);
        assert_ne!(a.json["rows"][0]["computed"], b.json["rows"][0]["computed"]);
    }

    #[test]
    fn deterministic_without_timestamp() {
        let c = cfg(r#"{"geometry": {"kind": "cylinder", "rho": 1e8, "r0": 1.0}}"#).unwrap();
        let opts = Options {
            no_timestamp: true,
            ..Options::default()
        };
        let a = execute(Command::ZeroMode, Some(&c), &opts).unwrap();
        let b = execute(Command::ZeroMode, Some(&c), &opts).unwrap();
        assert_eq!(a.json_text(), b.json_text());
        assert!(a.json.get("generated_unix_s").is_none());
        let t = execute(Command::SusyStatus, Some(&c), &Options::default()).unwrap();
        assert!(t.json.get("generated_unix_s").is_some());
    }

    #[test]
    fn missing_config_is_a_usage_error() {
        assert!(matches!(
            execute(Command::Constants, None, &Options::default()),
            Err(CliError::Usage(_))
        ));
        assert!(execute(Command::ReproducePaper, None, &Options::default()).is_ok());
    }
}
