use std::path::{Path, PathBuf};

use hypercube_pst::circuit::{coupling_parameter, CircuitParams};
use hypercube_pst::topology::{MAX_DENSE_DIMENSION, MAX_DIMENSION};
use hypercube_pst::units::ghz_to_angular;
use hypercube_pst::NodeLabel;
use serde::{Serialize, Serializer};

use crate::args::{Command, Format, Options};
use crate::error::{CliError, CliResult};

/// Largest `d` the master-equation integrator is run at.
pub const MAX_MASTER_DIMENSION: u32 = 10;
/// Largest `d` simulated node by node.
pub const MAX_NODE_DIMENSION: u32 = 16;

/// Circuit values in the units they are entered in.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CircuitInput {
    pub cx_pf: f64,
    pub cc_ff: f64,
    pub ic_ua: f64,
    pub bias_ua: f64,
}

impl CircuitInput {
    pub fn params(&self, dim: u32) -> CliResult<CircuitParams> {
        Ok(CircuitParams::uniform(dim, self.cx_pf * 1e-12, self.cc_ff * 1e-15, self.ic_ua * 1e-6, self.bias_ua * 1e-6)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Coupling {
    Direct { zeta: Vec<f64>, omega_ghz: f64 },
    Circuit(CircuitInput),
}

/// One network setting: `zeta` and `omega_0` in rad/s.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Network {
    pub zeta: f64,
    pub omega0: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DisorderGrid {
    pub values: Vec<f64>,
    /// Values are fractions of `zeta`.
    pub relative: bool,
}

impl DisorderGrid {
    pub fn absolute(&self, zeta: f64) -> Vec<f64> {
        self.values.iter().map(|v| if self.relative { v * zeta } else { *v }).collect()
    }
}

/// Fully resolved settings for one run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub d: Vec<u32>,
    pub coupling: Coupling,
    pub order: u32,
    pub corrected: bool,
    #[serde(serialize_with = "time_ns")]
    pub t1_ns: f64,
    #[serde(serialize_with = "time_ns")]
    pub tphi_ns: f64,
    pub disorder: DisorderGrid,
    pub trials: Option<usize>,
    pub seed: u64,
    pub a: Option<String>,
    pub b: Option<String>,
    pub detuning_factor: f64,
    pub points: usize,
    pub per_trial: bool,
    pub spectrum: bool,
    #[serde(skip)]
    pub format: Format,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    #[serde(skip)]
    pub threads: Option<usize>,
    #[serde(skip)]
    pub timestamp: bool,
}

fn time_ns<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else {
        s.serialize_str("inf")
    }
}

impl RunConfig {
    /// `(zeta, omega_0)` settings for dimension `dim`.
    pub fn networks(&self, dim: u32) -> CliResult<Vec<Network>> {
        coupling_networks(&self.coupling, dim)
    }

    /// The single network setting of commands that take one `zeta`.
    pub fn network(&self, dim: u32) -> CliResult<Network> {
        Ok(self.networks(dim)?[0])
    }

    pub fn t1(&self) -> f64 {
        self.t1_ns * 1e-9
    }

    pub fn t_phi(&self) -> f64 {
        self.tphi_ns * 1e-9
    }
}

pub fn read_config_file(path: &Path) -> CliResult<Options> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::validation(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::validation(format!("config {}: {e}", path.display())))
}

fn has_circuit(o: &Options) -> bool {
    o.cx_pf.is_some() || o.cc_ff.is_some() || o.ic_ua.is_some() || o.bias_ua.is_some()
}

/// Flags override file values. The coupling inputs (`zeta` or circuit
/// values) and the disorder grid are taken as a group from whichever source
/// sets them on the command line first.
pub fn merge(cli: Options, file: Options) -> Options {
    let cli_coupling = cli.zeta.is_some() || has_circuit(&cli);
    let cli_disorder = cli.delta_zeta.is_some() || cli.relative_delta.is_some();
    let pick = |own: bool, c: Option<f64>, f: Option<f64>| if own { c } else { f };
    Options {
        d: cli.d.or(file.d),
        zeta: if cli_coupling { cli.zeta } else { file.zeta },
        omega_ghz: cli.omega_ghz.or(file.omega_ghz),
        cx_pf: pick(cli_coupling, cli.cx_pf, file.cx_pf),
        cc_ff: pick(cli_coupling, cli.cc_ff, file.cc_ff),
        ic_ua: pick(cli_coupling, cli.ic_ua, file.ic_ua),
        bias_ua: pick(cli_coupling, cli.bias_ua, file.bias_ua),
        t1_ns: cli.t1_ns.or(file.t1_ns),
        tphi_ns: cli.tphi_ns.or(file.tphi_ns),
        delta_zeta: if cli_disorder { cli.delta_zeta } else { file.delta_zeta },
        relative_delta: if cli_disorder { cli.relative_delta } else { file.relative_delta },
        trials: cli.trials.or(file.trials),
        seed: cli.seed.or(file.seed),
        order: cli.order.or(file.order),
        corrected: cli.corrected || file.corrected,
        a: cli.a.or(file.a),
        b: cli.b.or(file.b),
        detuning_factor: cli.detuning_factor.or(file.detuning_factor),
        points: cli.points.or(file.points),
        per_trial: cli.per_trial || file.per_trial,
        spectrum: cli.spectrum || file.spectrum,
        out: cli.out.or(file.out),
        format: cli.format.or(file.format),
        threads: cli.threads.or(file.threads),
        no_timestamp: cli.no_timestamp || file.no_timestamp,
        config: cli.config,
    }
}

fn fail<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::validation(msg))
}

fn default_dims(command: Command) -> Vec<u32> {
    match command {
        Command::Topology | Command::Program => vec![3],
        Command::Fig2 | Command::Bound | Command::Disorder => vec![10],
        Command::Fig3 => vec![2, 10],
        Command::Fig4 => vec![6, 10, 16],
    }
}

fn default_zetas(command: Command) -> Vec<f64> {
    match command {
        Command::Fig2 => (1..=10).map(|k| f64::from(k) / 500.0).collect(),
        _ => vec![0.005],
    }
}

fn max_dim(command: Command, spectrum_only: bool) -> u32 {
    match command {
        Command::Topology if spectrum_only => MAX_DIMENSION,
        Command::Topology => MAX_DENSE_DIMENSION,
        Command::Fig2 | Command::Bound => MAX_DIMENSION,
        Command::Fig3 => MAX_MASTER_DIMENSION,
        Command::Fig4 | Command::Disorder | Command::Program => MAX_NODE_DIMENSION,
    }
}

pub fn resolve(command: Command, o: Options) -> CliResult<RunConfig> {
    let format = o.format.unwrap_or(Format::Csv);

    let mut d = o.d.clone().unwrap_or_else(|| default_dims(command));
    if command == Command::Program {
        let label_dim = o.a.as_deref().or(o.b.as_deref()).map(|s| s.trim().len() as u32);
        match (label_dim, &o.d) {
            (Some(n), Some(given)) if given.as_slice() != [n] => {
                return fail(format!("--d {given:?} does not match the {n}-bit labels"));
            }
            (Some(n), _) => d = vec![n],
            _ => {}
        }
    }
    if d.is_empty() {
        return fail("--d needs at least one value");
    }
    let limit = max_dim(command, o.spectrum);
    if let Some(bad) = d.iter().find(|&&x| x == 0 || x > limit) {
        return fail(format!("--d {bad} outside 1..={limit} for {}", command.name()));
    }
    if command == Command::Program && d.len() != 1 {
        return fail("program takes a single --d");
    }

    let coupling = match (&o.zeta, has_circuit(&o)) {
        (Some(_), true) => return fail("give either --zeta or circuit values (--cx-pf, --cc-ff, --ic-ua, --bias-ua), not both"),
        (_, true) => {
            let (Some(cx_pf), Some(cc_ff), Some(ic_ua), Some(bias_ua)) = (o.cx_pf, o.cc_ff, o.ic_ua, o.bias_ua) else {
                return fail("circuit input needs all of --cx-pf, --cc-ff, --ic-ua, --bias-ua");
            };
            if o.omega_ghz.is_some() {
                return fail("--omega-ghz cannot be combined with circuit values, which fix the frequency");
            }
            let c = CircuitInput { cx_pf, cc_ff, ic_ua, bias_ua };
            for &dim in &d {
                c.params(dim)?.frequencies()?;
            }
            Coupling::Circuit(c)
        }
        (zeta, false) => {
            let zeta = zeta.clone().unwrap_or_else(|| default_zetas(command));
            let omega_ghz = o.omega_ghz.unwrap_or(5.0);
            if !(omega_ghz > 0.0 && omega_ghz.is_finite()) {
                return fail("--omega-ghz must be positive");
            }
            if zeta.is_empty() {
                return fail("--zeta needs at least one value");
            }
            if command != Command::Fig2 && zeta.len() != 1 {
                return fail(format!("{} takes a single --zeta", command.name()));
            }
            let zero_ok = matches!(command, Command::Fig2 | Command::Topology);
            for &z in &zeta {
                if !(z.is_finite() && (z > 0.0 || (zero_ok && z == 0.0))) {
                    return fail(format!("--zeta {z} must be positive"));
                }
                if command == Command::Fig2 && z > 0.05 {
                    return fail(format!("--zeta {z} above 0.05 is outside the perturbative regime"));
                }
                for &dim in &d {
                    if z * f64::from(dim) >= 1.0 {
                        return fail(format!("zeta * d = {} must stay below 1", z * f64::from(dim)));
                    }
                }
            }
            Coupling::Direct { zeta, omega_ghz }
        }
    };

    let order = o.order.unwrap_or(if command == Command::Fig3 { 1 } else { 3 });
    if order == 0 {
        return fail("--order must be at least 1");
    }

    let t1_ns = o.t1_ns.unwrap_or(120.0);
    let tphi_ns = o.tphi_ns.unwrap_or(120.0);
    if !(t1_ns > 0.0) || !(tphi_ns > 0.0) {
        return fail("--t1-ns and --tphi-ns must be positive");
    }

    let disorder = match (&o.delta_zeta, &o.relative_delta) {
        (Some(_), Some(_)) => return fail("give either --delta-zeta or --relative-delta, not both"),
        (Some(v), None) => DisorderGrid { values: v.clone(), relative: false },
        (None, Some(v)) => DisorderGrid { values: v.clone(), relative: true },
        (None, None) if command == Command::Fig4 => {
            DisorderGrid { values: (0..=5).map(|k| f64::from(k) / 10.0).collect(), relative: true }
        }
        (None, None) => DisorderGrid { values: vec![0.1], relative: true },
    };
    if matches!(command, Command::Fig4 | Command::Disorder) {
        if disorder.values.is_empty() {
            return fail("disorder grid is empty");
        }
        for &dim in &d {
            for net in coupling_networks(&coupling, dim)? {
                for dz in disorder.absolute(net.zeta) {
                    if !(dz >= 0.0 && dz < net.zeta) {
                        return fail(format!("delta zeta {dz} must lie in [0, zeta = {})", net.zeta));
                    }
                }
            }
        }
    }

    if o.trials == Some(0) {
        return fail("--trials must be at least 1");
    }
    let points = o.points.unwrap_or(81);
    if points < 2 {
        return fail("--points must be at least 2");
    }
    let detuning_factor = o.detuning_factor.unwrap_or(hypercube_pst::dynamics::DEFAULT_DETUNING_FACTOR);
    if !(detuning_factor > 1.0 && detuning_factor.is_finite()) {
        return fail("--detuning-factor must exceed 1");
    }
    if o.threads == Some(0) {
        return fail("--threads must be at least 1");
    }
    if command == Command::Program {
        for label in [&o.a, &o.b].into_iter().flatten() {
            label.parse::<NodeLabel>().map_err(CliError::from)?;
        }
    }
    Ok(RunConfig {
        command,
        d,
        coupling,
        order,
        corrected: o.corrected,
        t1_ns,
        tphi_ns,
        disorder,
        trials: o.trials,
        seed: o.seed.unwrap_or(2024),
        a: o.a,
        b: o.b,
        detuning_factor,
        points,
        per_trial: o.per_trial,
        spectrum: o.spectrum,
        format,
        out: o.out,
        threads: o.threads,
        timestamp: !o.no_timestamp,
    })
}

fn coupling_networks(coupling: &Coupling, dim: u32) -> CliResult<Vec<Network>> {
    match coupling {
        Coupling::Direct { zeta, omega_ghz } => {
            Ok(zeta.iter().map(|&z| Network { zeta: z, omega0: ghz_to_angular(*omega_ghz) }).collect())
        }
        Coupling::Circuit(c) => {
            let p = c.params(dim)?;
            Ok(vec![Network { zeta: coupling_parameter(&p)?, omega0: p.frequencies()?[0] }])
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> Options {
        Options::default()
    }

    #[test]
    fn flags_override_file() {
        let cli = Options { d: Some(vec![4]), ..opts() };
        let file = Options { d: Some(vec![6]), seed: Some(3), corrected: true, ..opts() };
        let m = merge(cli, file);
        assert_eq!(m.d, Some(vec![4]));
        assert_eq!(m.seed, Some(3));
        assert!(m.corrected);
    }

    #[test]
    fn coupling_inputs_move_as_a_group() {
        let cli = Options { cx_pf: Some(1.0), ..opts() };
        let file = Options { zeta: Some(vec![0.01]), cc_ff: Some(5.0), ..opts() };
        let m = merge(cli, file);
        assert_eq!(m.zeta, None);
        assert_eq!(m.cc_ff, None);
        assert!(matches!(resolve(Command::Bound, m), Err(CliError::Validation(_))));
    }

    #[test]
    fn defaults_per_command() {
        let fig2 = resolve(Command::Fig2, opts()).unwrap();
        assert_eq!(fig2.d, [10]);
        assert_eq!(fig2.coupling, Coupling::Direct { zeta: (1..=10).map(|k| f64::from(k) / 500.0).collect(), omega_ghz: 5.0 });
        let fig3 = resolve(Command::Fig3, opts()).unwrap();
        assert_eq!((fig3.d.as_slice(), fig3.order, fig3.t1_ns, fig3.tphi_ns), (&[2, 10][..], 1, 120.0, 120.0));
        let fig4 = resolve(Command::Fig4, opts()).unwrap();
        assert_eq!(fig4.d, [6, 10, 16]);
        assert_eq!(fig4.disorder.values.len(), 6);
        assert_eq!(resolve(Command::Program, Options { a: Some("0110".into()), ..opts() }).unwrap().d, [4]);
    }

    #[test]
    fn rejects_bad_values() {
        let bad = [
            Options { zeta: Some(vec![0.2]), d: Some(vec![5]), ..opts() },
            Options { zeta: Some(vec![0.01, 0.02]), ..opts() },
            Options { trials: Some(0), ..opts() },
            Options { threads: Some(0), ..opts() },
            Options { detuning_factor: Some(0.5), ..opts() },
            Options { omega_ghz: Some(-1.0), ..opts() },
        ];
        for o in bad {
            assert!(matches!(resolve(Command::Disorder, o), Err(CliError::Validation(_))));
        }
    }
}
