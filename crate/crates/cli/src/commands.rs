use hypercube_pst::decoherence::{
    average_fidelity, closed_form_rho_bb, fidelity_lower_bound, integrate_master_equation_with, time_grid,
    transfer_fidelity_decoherent, transfer_time_fixed_capacitor, DecoherenceParams, MasterSolver,
};
use hypercube_pst::disorder::{
    default_trials, disorder_average_fidelity, fit_gaussian, fit_localization, DisorderConfig, DisorderEnsembleResult,
};
use hypercube_pst::dynamics::{
    analytic_corner_amplitude, error_scaling_model, peak_transfer_near, program_subcubes, programmed_hamiltonian,
    sweep_hamiltonian, transfer_fidelity, transfer_time, TransferSpec,
};
use hypercube_pst::linalg::SpectralPropagator;
use hypercube_pst::topology::{hypercube_adjacency, subcube_between, Hypercube};
use hypercube_pst::units::{angular_to_ghz, to_ns};
use hypercube_pst::NodeLabel;
use rayon::prelude::*;

use crate::args::Command;
use crate::config::{Network, RunConfig};
use crate::error::CliResult;
use crate::report::{Cell, Report, Table};
use crate::svg::{Plot, Series};

/// Largest `d` whose spectrum is also counted numerically.
const NUMERIC_SPECTRUM_MAX_DIM: u32 = 10;
/// Largest `d` for which `program` searches for the peak transfer time.
const PROGRAM_PEAK_MAX_DIM: u32 = 10;

pub fn execute(cfg: &RunConfig) -> CliResult<Report> {
    match cfg.command {
        Command::Topology => topology(cfg),
        Command::Fig2 => fig2(cfg),
        Command::Fig3 => fig3(cfg),
        Command::Fig4 => disorder(cfg, true),
        Command::Disorder => disorder(cfg, false),
        Command::Bound => bound(cfg),
        Command::Program => program(cfg),
    }
}

fn cells<const N: usize>(values: [Cell; N]) -> Vec<Cell> {
    Vec::from(values)
}

fn topology(cfg: &RunConfig) -> CliResult<Report> {
    let mut tables = Vec::new();
    let mut spectrum = Table::new("spectrum", &["d", "eigenvalue", "multiplicity", "numeric_count"]);
    let mut plot = Plot {
        title: "Adjacency spectrum".into(),
        x_label: "eigenvalue".into(),
        y_label: "multiplicity".into(),
        ..Plot::default()
    };
    for (i, &d) in cfg.d.iter().enumerate() {
        let cube = Hypercube::new(d)?;
        if !cfg.spectrum {
            let adj = hypercube_adjacency(d)?;
            let labels: Vec<String> = cube.nodes().map(|x| x.to_string()).collect();
            let mut columns = vec!["node"];
            columns.extend(labels.iter().map(String::as_str));
            let mut t = Table::new(&format!("adjacency-d{d}"), &columns);
            for (x, label) in labels.iter().enumerate() {
                let mut row = vec![Cell::Text(label.clone())];
                row.extend((0..labels.len()).map(|y| Cell::from(i64::from(adj.get(x, y)))));
                t.push(row);
            }
            tables.push(t);
        }
        let numeric = (d <= NUMERIC_SPECTRUM_MAX_DIM).then(|| {
            let m = hypercube_adjacency(d).map(|a| a.into_matrix());
            m.map(|m| SpectralPropagator::new(m).eigenvalues().iter().copied().collect::<Vec<f64>>())
        });
        let numeric = numeric.transpose()?;
        let mut points = Vec::new();
        for (value, mult) in cube.spectrum() {
            let count = numeric.as_ref().map(|ev| ev.iter().filter(|e| (*e - value as f64).abs() < 1e-6).count());
            spectrum.push(cells([d.into(), value.into(), Cell::Int(mult as i64), count.into()]));
            points.push((value as f64, mult as f64));
        }
        plot.series.push(Series { label: format!("d={d}"), points, dashed: false, color: i });
    }
    tables.push(spectrum);
    Ok(Report { tables, plot })
}

fn fig2(cfg: &RunConfig) -> CliResult<Report> {
    let variants: &[bool] = if cfg.corrected { &[true] } else { &[false, true] };
    let mut jobs: Vec<(u32, Network, bool)> = Vec::new();
    for &d in &cfg.d {
        for net in cfg.networks(d)? {
            for &c in variants {
                jobs.push((d, net, c));
            }
        }
    }
    let results: Vec<CliResult<(f64, Option<f64>)>> = jobs
        .par_iter()
        .map(|&(d, net, corrected)| {
            if net.zeta == 0.0 {
                return Ok((0.0, None));
            }
            let h = sweep_hamiltonian(d, net.omega0, net.zeta, cfg.order, corrected)?;
            let r = peak_transfer_near(&h, &TransferSpec::corner(d)?, transfer_time(net.zeta, net.omega0)?)?;
            Ok((1.0 - r.fidelity, Some(r.transfer_time)))
        })
        .collect();

    let mut table = Table::new(
        "fig2",
        &["d", "zeta", "omega_ghz", "corrected", "error", "model_uncorrected", "model_corrected", "peak_time_ns"],
    );
    let mut plot = Plot {
        title: "Transfer error against coupling".into(),
        x_label: "zeta".into(),
        y_label: "1 - F".into(),
        log_x: true,
        log_y: true,
        series: Vec::new(),
    };
    let mut groups: Vec<((u32, bool), Vec<(f64, f64)>)> = Vec::new();
    for (&(d, net, corrected), result) in jobs.iter().zip(results) {
        let (error, peak) = result?;
        table.push(cells([
            d.into(),
            net.zeta.into(),
            angular_to_ghz(net.omega0).into(),
            corrected.into(),
            error.into(),
            error_scaling_model(d, net.zeta, false).into(),
            error_scaling_model(d, net.zeta, true).into(),
            peak.map(to_ns).into(),
        ]));
        match groups.iter_mut().find(|g| g.0 == (d, corrected)) {
            Some(g) => g.1.push((net.zeta, error)),
            None => groups.push(((d, corrected), vec![(net.zeta, error)])),
        }
    }
    for (i, ((d, corrected), points)) in groups.into_iter().enumerate() {
        let name = if corrected { "corrected" } else { "uncorrected" };
        let model = points.iter().map(|&(z, _)| (z, error_scaling_model(d, z, corrected))).collect();
        plot.series.push(Series { label: format!("d={d} {name}"), points, dashed: false, color: i });
        plot.series.push(Series { label: format!("model d={d} {name}"), points: model, dashed: true, color: i });
    }
    Ok(Report { tables: vec![table], plot })
}

fn decoherence(cfg: &RunConfig) -> CliResult<DecoherenceParams> {
    Ok(DecoherenceParams::new(cfg.t1(), cfg.t_phi())?)
}

struct Trajectory {
    d: u32,
    rows: Vec<[f64; 5]>,
}

fn fig3(cfg: &RunConfig) -> CliResult<Report> {
    let dec = decoherence(cfg)?;
    let runs: Vec<CliResult<Trajectory>> = cfg
        .d
        .par_iter()
        .map(|&d| {
            let net = cfg.network(d)?;
            let h = hypercube_pst::EffectiveHamiltonian::uniform(d, net.omega0, net.zeta, cfg.order)?;
            let spec = TransferSpec::corner(d)?;
            let grid = time_grid(2.0 * transfer_time(net.zeta, net.omega0)?, cfg.points);
            let b = (1usize << d) - 1;
            let mut rows = Vec::with_capacity(grid.len());
            integrate_master_equation_with(&h, &spec, dec, &grid, MasterSolver::default(), |s| {
                let cf = closed_form_rho_bb(s.time, d, net.zeta, net.omega0, spec.beta, dec)?;
                let coherent = analytic_corner_amplitude(d, net.zeta, net.omega0, s.time).norm_sqr();
                rows.push([s.time, s.population(b), cf, s.rho00, coherent]);
                Ok(())
            })?;
            Ok(Trajectory { d, rows })
        })
        .collect();

    let mut table = Table::new(
        "fig3",
        &["d", "t_ns", "rho_bb_numeric", "rho_bb_closed_form", "deviation", "rho_00", "rho_bb_coherent"],
    );
    let mut summary = Table::new("fig3-summary", &["d", "max_deviation", "peak_rho_bb", "peak_time_ns"]);
    let mut plot = Plot {
        title: "Target population with decay and dephasing".into(),
        x_label: "t (ns)".into(),
        y_label: "rho_bb".into(),
        ..Plot::default()
    };
    for (i, run) in runs.into_iter().enumerate() {
        let Trajectory { d, rows } = run?;
        let mut worst: f64 = 0.0;
        let mut peak = (0.0, 0.0);
        for r in &rows {
            let dev = (r[1] - r[2]).abs();
            worst = worst.max(dev);
            if r[1] > peak.1 {
                peak = (r[0], r[1]);
            }
            table.push(cells([d.into(), to_ns(r[0]).into(), r[1].into(), r[2].into(), dev.into(), r[3].into(), r[4].into()]));
        }
        summary.push(cells([d.into(), worst.into(), peak.1.into(), to_ns(peak.0).into()]));
        let numeric = rows.iter().map(|r| (to_ns(r[0]), r[1])).collect();
        let closed = rows.iter().map(|r| (to_ns(r[0]), r[2])).collect();
        plot.series.push(Series { label: format!("d={d} integrated"), points: numeric, dashed: false, color: i });
        plot.series.push(Series { label: format!("d={d} closed form"), points: closed, dashed: true, color: i });
    }
    Ok(Report { tables: vec![table, summary], plot })
}

struct Ensemble {
    d: u32,
    zeta: f64,
    relative: f64,
    result: DisorderEnsembleResult,
}

fn disorder(cfg: &RunConfig, fits: bool) -> CliResult<Report> {
    let mut ensembles = Vec::new();
    for &d in &cfg.d {
        let net = cfg.network(d)?;
        for dz in cfg.disorder.absolute(net.zeta) {
            let config = DisorderConfig {
                dim: d,
                zeta: net.zeta,
                omega0: net.omega0,
                delta_zeta: dz,
                trials: cfg.trials.unwrap_or_else(|| default_trials(d)),
                seed: cfg.seed,
            };
            let result = disorder_average_fidelity(&config)?;
            ensembles.push(Ensemble { d, zeta: net.zeta, relative: dz / net.zeta, result });
        }
    }

    let mut table = Table::new(
        "ensembles",
        &["d", "zeta", "delta_zeta", "delta_zeta_over_zeta", "trials", "seed", "mean_fidelity", "std_error"],
    );
    let mut per_trial = Table::new("per-trial", &["d", "delta_zeta", "trial", "fidelity"]);
    for e in &ensembles {
        let r = &e.result;
        table.push(cells([
            e.d.into(),
            e.zeta.into(),
            r.config.delta_zeta.into(),
            e.relative.into(),
            r.config.trials.into(),
            Cell::Text(r.config.seed.to_string()),
            r.mean_fidelity.into(),
            r.std_error.into(),
        ]));
        if cfg.per_trial {
            for (k, f) in r.per_trial_fidelities.iter().enumerate() {
                per_trial.push(cells([e.d.into(), r.config.delta_zeta.into(), k.into(), (*f).into()]));
            }
        }
    }

    let mut plot = Plot {
        title: "Disorder-averaged fidelity".into(),
        x_label: "delta zeta / zeta".into(),
        y_label: "mean F".into(),
        ..Plot::default()
    };
    let mut tables = vec![table];
    let mut gaussian = Table::new("gaussian-fit", &["d", "amplitude", "width", "width_over_zeta", "r_squared"]);
    let mut localization = Table::new("localization-fit", &["delta_zeta_over_zeta", "length", "slope", "r_squared"]);
    for (i, &d) in cfg.d.iter().enumerate() {
        let group: Vec<&Ensemble> = ensembles.iter().filter(|e| e.d == d).collect();
        let points = group.iter().map(|e| (e.relative, e.result.mean_fidelity)).collect();
        plot.series.push(Series { label: format!("d={d}"), points, dashed: false, color: i });
        if !fits {
            continue;
        }
        let data: Vec<(f64, f64)> = group.iter().map(|e| (e.result.config.delta_zeta, e.result.mean_fidelity)).collect();
        if let Ok(fit) = fit_gaussian(&data) {
            let zeta = group[0].zeta;
            gaussian.push(cells([d.into(), fit.amplitude.into(), fit.width.into(), (fit.width / zeta).into(), fit.r_squared.into()]));
            let hi = group.iter().map(|e| e.relative).fold(0.0, f64::max);
            let curve = (0..=40).map(|k| hi * f64::from(k) / 40.0).map(|r| (r, fit.eval(r * zeta))).collect();
            plot.series.push(Series { label: format!("fit d={d}"), points: curve, dashed: true, color: i });
        }
    }
    if fits {
        let mut levels: Vec<f64> = Vec::new();
        for e in &ensembles {
            if !levels.iter().any(|l| (l - e.relative).abs() < 1e-12) {
                levels.push(e.relative);
            }
        }
        for level in levels {
            let points: Vec<(u32, f64)> = ensembles
                .iter()
                .filter(|e| (e.relative - level).abs() < 1e-12)
                .map(|e| (e.d, e.result.mean_fidelity))
                .collect();
            if let Ok(fit) = fit_localization(&points) {
                localization.push(cells([level.into(), fit.length.into(), fit.slope.into(), fit.r_squared.into()]));
            }
        }
        tables.push(gaussian);
        tables.push(localization);
    }
    if cfg.per_trial {
        tables.push(per_trial);
    }
    Ok(Report { tables, plot })
}

fn bound(cfg: &RunConfig) -> CliResult<Report> {
    let dec = decoherence(cfg)?;
    let mut table = Table::new(
        "bound",
        &[
            "d",
            "zeta",
            "transfer_time_ns",
            "fixed_capacitor_time_ns",
            "fixed_capacitor_ratio",
            "t1_ns",
            "t2_ns",
            "fidelity_excitation",
            "average_fidelity",
            "lower_bound",
        ],
    );
    let t2_ns = 1.0 / (0.5 / cfg.t1_ns + 1.0 / cfg.tphi_ns);
    let mut avg = Vec::new();
    let mut low = Vec::new();
    for &d in &cfg.d {
        let net = cfg.network(d)?;
        let t = transfer_time(net.zeta, net.omega0)?;
        let td = transfer_time_fixed_capacitor(d, net.zeta, t)?;
        let f = transfer_fidelity_decoherent(&TransferSpec::corner(d)?, net.zeta, net.omega0, dec)?;
        let a = average_fidelity(d, net.zeta, net.omega0, dec)?;
        let lb = fidelity_lower_bound(t, dec.t1(), dec.t2())?;
        table.push(cells([
            d.into(),
            net.zeta.into(),
            to_ns(t).into(),
            to_ns(td).into(),
            (td / t).into(),
            cfg.t1_ns.into(),
            t2_ns.into(),
            f.into(),
            a.into(),
            lb.into(),
        ]));
        avg.push((f64::from(d), a));
        low.push((f64::from(d), lb));
    }
    let plot = Plot {
        title: "Average fidelity and lower bound".into(),
        x_label: "d".into(),
        y_label: "fidelity".into(),
        series: vec![
            Series { label: "F_avg".into(), points: avg, dashed: false, color: 0 },
            Series { label: "lower bound".into(), points: low, dashed: true, color: 1 },
        ],
        ..Plot::default()
    };
    Ok(Report { tables: vec![table], plot })
}

fn program(cfg: &RunConfig) -> CliResult<Report> {
    let d = cfg.d[0];
    let a: NodeLabel = match &cfg.a {
        Some(s) => s.parse()?,
        None => NodeLabel::origin(d)?,
    };
    let b: NodeLabel = match &cfg.b {
        Some(s) => s.parse()?,
        None => NodeLabel::antipode(d)?,
    };
    let net = cfg.network(d)?;
    let sub = subcube_between(a, b)?;
    let freqs = program_subcubes(&[(a, b)], net.omega0, net.zeta, cfg.detuning_factor, cfg.corrected)?;
    let h = programmed_hamiltonian(d, freqs.clone(), net.omega0, net.zeta, cfg.order)?;
    let spec = TransferSpec::excitation(a, b)?;
    let t = transfer_time(net.zeta, net.omega0)?;
    let at_t = transfer_fidelity(&h, &spec, t)?;
    let peak = if d <= PROGRAM_PEAK_MAX_DIM { Some(peak_transfer_near(&h, &spec, t)?) } else { None };

    let mut nodes = Table::new("nodes", &["node", "in_subcube", "row", "frequency_ghz", "detuning_mhz"]);
    let mut points = Vec::new();
    for (x, &w) in freqs.iter().enumerate() {
        let label = NodeLabel::new(d, x as u32)?;
        let inside = sub.contains(label);
        nodes.push(cells([
            Cell::Text(label.to_string()),
            inside.into(),
            sub.row_of(label).into(),
            angular_to_ghz(w).into(),
            (1e3 * angular_to_ghz(w - net.omega0)).into(),
        ]));
        points.push((x as f64, angular_to_ghz(w)));
    }
    let mut summary = Table::new(
        "transfer",
        &["a", "b", "subcube_dim", "zeta", "transfer_time_ns", "fidelity_at_t", "peak_fidelity", "peak_time_ns"],
    );
    summary.push(cells([
        Cell::Text(a.to_string()),
        Cell::Text(b.to_string()),
        sub.dim().into(),
        net.zeta.into(),
        to_ns(t).into(),
        at_t.fidelity.into(),
        peak.map(|p| p.fidelity).into(),
        peak.map(|p| to_ns(p.transfer_time)).into(),
    ]));
    let plot = Plot {
        title: format!("Programmed frequencies, {a} to {b}"),
        x_label: "node index".into(),
        y_label: "frequency (GHz)".into(),
        series: vec![Series { label: "omega / 2 pi".into(), points, dashed: false, color: 0 }],
        ..Plot::default()
    };
    Ok(Report { tables: vec![nodes, summary], plot })
}
