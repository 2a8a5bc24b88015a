use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use dispersive_core::dispersive::shift_report;
use dispersive_core::exact::{self, build_hamiltonian, diagonalize, label_dressed_states, ProductSpace};
use dispersive_core::fit::{self, fit_g0, FitFixed, Observable};
use dispersive_core::lindblad::{
    evolve, fock_state, steady_state, thermal_state, EvolveOptions, LindbladGenerator, Mode,
};
use dispersive_core::rates::{self, driven_effective_rates, JumpOperator, Origin, PhotonOp, QubitOp, RateTable};
use dispersive_core::{Error, InteractionModel};
use rayon::prelude::*;
use serde::Serialize;

use crate::args::{Cli, Command, EvolveArgs, FitArgs, ModeArg, PlotArgs, SteadyArgs, Sweep, SweepArgs, SweepVar};
use crate::config::Config;
use crate::error::CliError;
use crate::plot::{Chart, Series};

/// Resonance window for analytic sweeps, in units of `g0`.
pub const ANALYTIC_EXCLUSION: f64 = 3.0;

/// Resonance window for fits, in units of `g0`.
pub const FIT_EXCLUSION: f64 = 1.5;

pub fn run(cli: Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Shifts(args) => shifts(&load(&cli)?, args, cli.out.as_deref()),
        Command::Rates { sweep, photons } => rates_cmd(&load(&cli)?, sweep, *photons, cli.out.as_deref()),
        Command::Exact { sweep, matrix } => {
            exact_cmd(&load(&cli)?, sweep.unwrap_or_default(), matrix.as_deref(), cli.out.as_deref())
        }
        Command::Fit(args) => fit_cmd(&load(&cli)?, args, cli.out.as_deref()),
        Command::Evolve(args) => evolve_cmd(&load(&cli)?, args, cli.out.as_deref()),
        Command::Steady(args) => steady_cmd(&load(&cli)?, args, cli.out.as_deref()),
        Command::Plot(args) => plot_cmd(args, cli.out.as_deref()),
    }
}

fn load(cli: &Cli) -> Result<Config, CliError> {
    let path = cli.config.as_ref().ok_or_else(|| CliError::Config("--config is required".into()))?;
    let mut cfg = Config::load(path)?;
    if let Some(m) = cli.model {
        cfg.model = m;
    }
    if let Some(n) = cli.nq {
        cfg.num_qubit_levels = n;
    }
    if let Some(m) = cli.nr {
        cfg.fock_truncation = m;
    }
    cfg.validated()?;
    Ok(cfg)
}

fn open_out(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => {
            Box::new(BufWriter::new(File::create(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?))
        }
        None => Box::new(io::stdout().lock()),
    })
}

fn num(v: f64) -> String {
    if v.is_nan() {
        "NaN".to_string()
    } else if v == 0.0 {
        format!("{:.16e}", 0.0)
    } else {
        format!("{v:.16e}")
    }
}

pub fn error_token(e: &Error) -> &'static str {
    match e {
        Error::NonPositiveSplitting { .. } => "non_positive_splitting",
        Error::Invalid(_) => "invalid_spec",
        Error::ResonantDivergence { .. } => "resonant_divergence",
        Error::NegativeFrequency(_) => "negative_frequency",
        Error::NegativePhotonNumber(_) => "negative_photon_number",
        Error::NegativeRate(_) => "negative_rate",
        Error::InvalidDissipator(_) => "invalid_dissipator",
        Error::DimensionOverflow { .. } => "dimension_overflow",
        Error::DimensionMismatch { .. } => "dimension_mismatch",
        Error::NotHermitian(_) => "not_hermitian",
        Error::ConvergenceFailure => "convergence_failure",
        Error::AmbiguousLabeling { .. } => "ambiguous_labeling",
        Error::TooFewPoints(_) => "too_few_points",
        Error::NoBracket => "no_bracket",
        Error::DegenerateCurvature(_) => "degenerate_curvature",
        Error::InvalidState(_) => "invalid_state",
        Error::StepUnderflow { .. } => "step_underflow",
        Error::DegenerateNullSpace => "degenerate_null_space",
        Error::TruncationTooSmall { .. } => "truncation_too_small",
    }
}

/// One sweep point: its configuration plus the leading CSV cells.
struct Point {
    cfg: Config,
    lead: Vec<f64>,
}

fn points(base: &Config, sweep: Sweep, exclude: Option<f64>) -> Vec<Point> {
    sweep
        .values()
        .into_iter()
        .filter_map(|v| {
            let mut cfg = base.clone();
            match sweep.var {
                SweepVar::Detuning => cfg.omega_10_ghz = cfg.omega_r_ghz + v,
                SweepVar::Coupling => cfg.g0_ghz = v,
                SweepVar::Temperature => cfg.set_temperature(v),
            }
            if let Some(f) = exclude {
                if cfg.detuning().abs() < f * cfg.g0_ghz - 1e-9 {
                    return None;
                }
            }
            let lead = match sweep.var {
                SweepVar::Detuning => vec![cfg.detuning()],
                _ => vec![v, cfg.detuning()],
            };
            Some(Point { cfg, lead })
        })
        .collect()
}

fn lead_header(sweep: Sweep) -> Vec<String> {
    match sweep.var {
        SweepVar::Detuning => vec!["delta0_ghz".into()],
        var => vec![var.column().into(), "delta0_ghz".into()],
    }
}

/// Values with an optional error; failed cells are NaN.
struct Row {
    values: Vec<f64>,
    error: Option<&'static str>,
}

impl Row {
    fn new(width: usize) -> Self {
        Self { values: vec![f64::NAN; width], error: None }
    }

    fn fill(&mut self, at: usize, r: Result<Vec<f64>, Error>) {
        match r {
            Ok(vs) => self.values[at..at + vs.len()].copy_from_slice(&vs),
            Err(e) => {
                self.error.get_or_insert(error_token(&e));
            }
        }
    }
}

fn write_table(out: Option<&Path>, header: &[String], points: &[Point], rows: &[Row]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(open_out(out)?);
    let mut full = header.to_vec();
    full.push("error".into());
    w.write_record(&full)?;
    for (p, r) in points.iter().zip(rows) {
        let mut rec: Vec<String> = p.lead.iter().chain(&r.values).map(|&v| num(v)).collect();
        rec.push(r.error.unwrap_or("").to_string());
        w.write_record(&rec)?;
    }
    w.flush()?;
    if let Some(first) = rows.first().and_then(|r| r.error) {
        if rows.iter().all(|r| r.error.is_some()) {
            return Err(CliError::AllRowsFailed(first.to_string()));
        }
    }
    Ok(())
}

fn ratio_error(analytic: f64, exact: f64) -> f64 {
    (analytic - exact) / exact
}

fn shifts(cfg: &Config, args: &SweepArgs, out: Option<&Path>) -> Result<(), CliError> {
    let sweep = args.sweep.unwrap_or_default();
    let pts = points(cfg, sweep, Some(args.exclude_window.unwrap_or(ANALYTIC_EXCLUSION)));
    let mut header = lead_header(sweep);
    header.extend(
        [
            "chi0",
            "xi0",
            "chi_tilde0",
            "pull_rabi",
            "pull_jc",
            "qshift_rabi",
            "qshift_jc",
            "exact_pull",
            "exact_qshift",
            "err_frac_rabi",
            "err_frac_jc",
            "qerr_frac_rabi",
            "qerr_frac_jc",
        ]
        .map(String::from),
    );
    let rows: Vec<Row> = pts
        .par_iter()
        .map(|p| {
            let mut row = Row::new(13);
            let spec = match p.cfg.spec() {
                Ok(s) => s,
                Err(e) => {
                    row.fill(0, Err(e));
                    return row;
                }
            };
            let analytic = shift_report(&spec).map(|r| {
                vec![
                    r.chi[0],
                    r.xi[0],
                    r.chi_tilde[0],
                    r.resonator_pull_rabi,
                    r.resonator_pull_jc,
                    r.qubit_shift_rabi,
                    r.qubit_shift_jc,
                ]
            });
            row.fill(0, analytic);
            row.fill(7, exact::exact_shifts(&spec, spec.model).map(|e| vec![e.resonator_pull, e.qubit_shift]));
            let v = &row.values;
            let errs = vec![
                ratio_error(v[3], v[7]),
                ratio_error(v[4], v[7]),
                ratio_error(v[5], v[8]),
                ratio_error(v[6], v[8]),
            ];
            row.values[9..13].copy_from_slice(&errs);
            row
        })
        .collect();
    write_table(out, &header, &pts, &rows)
}

fn rate_of(terms: &[rates::DissipatorTerm], jump: JumpOperator, origin: Origin) -> f64 {
    terms.iter().filter(|t| t.jump == jump && t.origin == origin).map(|t| t.rate).sum()
}

fn rates_cmd(cfg: &Config, args: &SweepArgs, photons: Option<f64>, out: Option<&Path>) -> Result<(), CliError> {
    use InteractionModel::{JaynesCummings as JC, Rabi};
    use PhotonOp::{Annihilate, Create};
    if let Some(n) = photons {
        if !(n >= 0.0) {
            return Err(CliError::Config(format!("--photons must be >= 0, got {n}")));
        }
    }
    let sweep = args.sweep.unwrap_or_default();
    let pts = points(cfg, sweep, Some(args.exclude_window.unwrap_or(ANALYTIC_EXCLUSION)));
    let mut header = lead_header(sweep);
    let mut names: Vec<&str> = vec!["p0_rabi", "p0_jc", "d0", "c0_rabi", "c0_jc", "a0_rabi", "a0_jc"];
    let with_baths = cfg.has_baths();
    if with_baths {
        names.extend([
            "gamma_down0",
            "gamma_up0",
            "gamma_phi1",
            "kappa_minus",
            "kappa_plus",
            "purcell_down0_rabi",
            "purcell_down0_jc",
            "purcell_up0_rabi",
            "purcell_up0_jc",
            "dd_down_plus0",
            "dd_up_minus0",
            "dd_down_minus0_rabi",
            "dd_up_plus0_rabi",
            "pad_minus0_rabi",
            "pad_plus0_rabi",
            "pad_minus0_jc",
            "pad_plus0_jc",
        ]);
    }
    if photons.is_some() {
        names.extend([
            "driven_down0_rabi",
            "driven_up0_rabi",
            "driven_phi0_rabi",
            "driven_phi1_rabi",
            "driven_down0_jc",
            "driven_up0_jc",
            "driven_phi0_jc",
            "driven_phi1_jc",
        ]);
    }
    header.extend(names.iter().map(|s| s.to_string()));
    let width = names.len();
    let rows: Vec<Row> = pts
        .par_iter()
        .map(|p| {
            let mut row = Row::new(width);
            let result = (|| -> Result<Vec<f64>, Error> {
                let spec = p.cfg.spec()?;
                let (d0, c0) = rates::dressed_dephasing_prefactors(&spec, 0, Rabi)?;
                let (_, c0_jc) = rates::dressed_dephasing_prefactors(&spec, 0, JC)?;
                let mut v = vec![
                    rates::purcell_prefactor(&spec, 0, Rabi)?,
                    rates::purcell_prefactor(&spec, 0, JC)?,
                    d0,
                    c0,
                    c0_jc,
                    rates::photon_assisted_dephasing_prefactor(&spec, 0, Rabi)?,
                    rates::photon_assisted_dephasing_prefactor(&spec, 0, JC)?,
                ];
                if with_baths || photons.is_some() {
                    let table = RateTable::compute(&spec, &spec.baths)?;
                    if with_baths {
                        let so = &table.second_order;
                        let (r, j) = (&table.rabi.terms, &table.jc.terms);
                        let q = |op| JumpOperator::qubit(op);
                        let qp = |op, ph| JumpOperator::new(op, ph);
                        v.extend([
                            rate_of(so, q(QubitOp::Lower(0)), Origin::SecondOrder),
                            rate_of(so, q(QubitOp::Raise(0)), Origin::SecondOrder),
                            rate_of(so, q(QubitOp::Project(1)), Origin::SecondOrder),
                            rate_of(so, JumpOperator::photon(Annihilate), Origin::SecondOrder),
                            rate_of(so, JumpOperator::photon(Create), Origin::SecondOrder),
                            rate_of(r, q(QubitOp::Lower(0)), Origin::Purcell),
                            rate_of(j, q(QubitOp::Lower(0)), Origin::Purcell),
                            rate_of(r, q(QubitOp::Raise(0)), Origin::Purcell),
                            rate_of(j, q(QubitOp::Raise(0)), Origin::Purcell),
                            rate_of(r, qp(QubitOp::Lower(0), Create), Origin::DressedDephasing),
                            rate_of(r, qp(QubitOp::Raise(0), Annihilate), Origin::DressedDephasing),
                            rate_of(r, qp(QubitOp::Lower(0), Annihilate), Origin::DressedDephasing),
                            rate_of(r, qp(QubitOp::Raise(0), Create), Origin::DressedDephasing),
                            rate_of(r, qp(QubitOp::Project(0), Annihilate), Origin::PhotonAssistedDephasing),
                            rate_of(r, qp(QubitOp::Project(0), Create), Origin::PhotonAssistedDephasing),
                            rate_of(j, qp(QubitOp::Project(0), Annihilate), Origin::PhotonAssistedDephasing),
                            rate_of(j, qp(QubitOp::Project(0), Create), Origin::PhotonAssistedDephasing),
                        ]);
                    }
                    if let Some(n) = photons {
                        for model in [Rabi, JC] {
                            let driven = driven_effective_rates(&table.fourth_order(model).terms, n)?;
                            for op in [QubitOp::Lower(0), QubitOp::Raise(0), QubitOp::Project(0), QubitOp::Project(1)] {
                                v.push(rate_of(&driven, JumpOperator::qubit(op), Origin::DrivenEffective));
                            }
                        }
                    }
                }
                Ok(v)
            })();
            row.fill(0, result);
            row
        })
        .collect();
    write_table(out, &header, &pts, &rows)
}

fn exact_cmd(cfg: &Config, sweep: Sweep, matrix: Option<&Path>, out: Option<&Path>) -> Result<(), CliError> {
    if let Some(path) = matrix {
        let h = build_hamiltonian(&cfg.spec()?, cfg.model)?;
        exact::write_matrix_csv(open_out(Some(path))?, &h)?;
    }
    let pts = points(cfg, sweep, None);
    let mut header = lead_header(sweep);
    header.extend(
        ["e00", "e01", "e10", "e11", "exact_pull", "exact_qshift", "overlap_01", "overlap_10"].map(String::from),
    );
    let rows: Vec<Row> = pts
        .par_iter()
        .map(|p| {
            let mut row = Row::new(8);
            let result = (|| -> Result<Vec<f64>, Error> {
                let spec = p.cfg.spec()?;
                let space = ProductSpace::of(&spec)?;
                let spectrum = diagonalize(&build_hamiltonian(&spec, spec.model)?)?;
                let labels = label_dressed_states(&spectrum, &spec, space)?;
                let e = |k, n| labels.get(k, n).map(|i| spectrum.eigenvalues[i]);
                let (e00, e01, e10, e11) = (e(0, 0)?, e(0, 1)?, e(1, 0)?, e(1, 1)?);
                Ok(vec![
                    e00,
                    e01,
                    e10,
                    e11,
                    e01 - e00 - spec.omega_r(),
                    e10 - e00 - spec.qubit.splitting(0).unwrap_or(f64::NAN),
                    labels.label(0, 1).overlap,
                    labels.label(1, 0).overlap,
                ])
            })();
            row.fill(0, result);
            row
        })
        .collect();
    write_table(out, &header, &pts, &rows)
}

#[derive(Debug, Serialize)]
struct FitReport {
    model: InteractionModel,
    observable: Observable,
    g0_ghz: f64,
    stderr_ghz: f64,
    rss_ghz2: f64,
    points: usize,
}

fn read_columns(path: &Path, x: &str, y: &[String]) -> Result<(Vec<f64>, Vec<Vec<f64>>), CliError> {
    let mut r = csv::Reader::from_path(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let headers = r.headers()?.clone();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CliError::Config(format!("column `{name}` not found in {}", path.display())))
    };
    let xi = find(x)?;
    let yi = y.iter().map(|c| find(c)).collect::<Result<Vec<_>, _>>()?;
    let (mut xs, mut ys) = (Vec::new(), vec![Vec::new(); y.len()]);
    for rec in r.records() {
        let rec = rec?;
        let parse = |i: usize| rec.get(i).and_then(|s| s.trim().parse::<f64>().ok()).unwrap_or(f64::NAN);
        xs.push(parse(xi));
        for (col, &i) in ys.iter_mut().zip(&yi) {
            col.push(parse(i));
        }
    }
    Ok((xs, ys))
}

/// Exact-diagonalization data for a fit: `(Δ0, shift)` on the sweep grid
/// outside `exclude·g0`. Points where the qubit ladder collapses are skipped.
pub fn exact_fit_data(
    cfg: &Config,
    sweep: Sweep,
    exclude: f64,
    observable: Observable,
) -> Result<Vec<(f64, f64)>, Error> {
    let grid = fit::detuning_grid(sweep.start, sweep.stop, sweep.count, exclude * cfg.g0_ghz);
    let rows: Vec<Option<(f64, f64)>> = grid
        .par_iter()
        .map(|&d| {
            let mut c = cfg.clone();
            c.omega_10_ghz = c.omega_r_ghz + d;
            let spec = match c.spec() {
                Ok(s) => s,
                Err(Error::NonPositiveSplitting { .. }) => return Ok(None),
                Err(e) => return Err(e),
            };
            let e = exact::exact_shifts(&spec, InteractionModel::Rabi)?;
            Ok(Some((
                d,
                match observable {
                    Observable::Resonator => e.resonator_pull,
                    Observable::Qubit => e.qubit_shift,
                },
            )))
        })
        .collect::<Result<_, Error>>()?;
    Ok(rows.into_iter().flatten().collect())
}

fn fit_cmd(cfg: &Config, args: &FitArgs, out: Option<&Path>) -> Result<(), CliError> {
    let data: Vec<(f64, f64)> = match &args.input {
        Some(path) => {
            let column = args.column.clone().unwrap_or_else(|| match args.observable {
                Observable::Resonator => "exact_pull".into(),
                Observable::Qubit => "exact_qshift".into(),
            });
            let (xs, ys) = read_columns(path, "delta0_ghz", &[column])?;
            xs.into_iter().zip(ys[0].iter().copied()).filter(|(x, y)| x.is_finite() && y.is_finite()).collect()
        }
        None => {
            let sweep = args.sweep.unwrap_or_default();
            if sweep.var != SweepVar::Detuning {
                return Err(CliError::Config("fits sweep the detuning only".into()));
            }
            exact_fit_data(cfg, sweep, args.exclude_window.unwrap_or(FIT_EXCLUSION), args.observable)?
        }
    };
    let fixed =
        FitFixed { omega_r: cfg.omega_r_ghz, anharmonicity: cfg.anharmonicity_ghz, num_levels: cfg.num_qubit_levels };
    let result = fit_g0(&data, cfg.model, args.observable, fixed)?;
    let report = FitReport {
        model: cfg.model,
        observable: args.observable,
        g0_ghz: result.g0,
        stderr_ghz: result.stderr,
        rss_ghz2: result.rss,
        points: data.len(),
    };
    println!(
        "g0 = {:.3} ± {:.3} MHz ({} model, {:?} data, {} points, rss {:.3e} GHz²)",
        result.g0 * 1e3,
        result.stderr * 1e3,
        cfg.model,
        args.observable,
        data.len(),
        result.rss
    );
    if let Some(path) = out {
        let mut w = open_out(Some(path))?;
        serde_json::to_writer_pretty(&mut w, &report).map_err(|e| CliError::Io(e.to_string()))?;
        writeln!(w)?;
    }
    if let Some(path) = &args.residuals {
        let mut w = csv::Writer::from_writer(open_out(Some(path))?);
        w.write_record(["delta0_ghz", "observed", "model", "residual"])?;
        for (&(d, y), r) in data.iter().zip(&result.residuals) {
            w.write_record([num(d), num(y), num(y + r), num(*r)])?;
        }
        w.flush()?;
    }
    Ok(())
}

fn generator(cfg: &Config, mode: ModeArg, photons: Option<f64>) -> Result<LindbladGenerator, CliError> {
    let spec = cfg.spec()?;
    let table = RateTable::compute(&spec, &spec.baths)?;
    let mode = match mode {
        ModeArg::Dressed => Mode::DressedAnalytic,
        ModeArg::Bare => Mode::BarePlusInteraction,
    };
    let mut gen = LindbladGenerator::assemble(&spec, &shift_report(&spec)?, &table, mode)?;
    if let Some(n) = photons {
        let driven = driven_effective_rates(&table.fourth_order(spec.model).terms, n)?;
        gen = gen.with_terms(&driven)?;
    }
    Ok(gen)
}

fn initial_state(
    cfg: &Config,
    space: ProductSpace,
    init: &str,
) -> Result<nalgebra::DMatrix<dispersive_core::lindblad::C64>, CliError> {
    let parts: Vec<&str> = init.split(':').collect();
    let bad = || CliError::Config(format!("unknown initial state `{init}` (ground, fock:K:N, thermal:T)"));
    match parts[..] {
        ["ground"] => Ok(fock_state(space, 0, 0)?),
        ["fock", k, n] => {
            let k = k.parse().map_err(|_| bad())?;
            let n = n.parse().map_err(|_| bad())?;
            fock_state(space, k, n).map_err(|e| CliError::Config(e.to_string()))
        }
        ["thermal", t] => Ok(thermal_state(&cfg.spec()?, space, t.parse().map_err(|_| bad())?)?),
        _ => Err(bad()),
    }
}

fn evolve_cmd(cfg: &Config, args: &EvolveArgs, out: Option<&Path>) -> Result<(), CliError> {
    if !(args.tmax >= 0.0) {
        return Err(CliError::Config(format!("--tmax must be >= 0, got {}", args.tmax)));
    }
    let gen = generator(cfg, args.mode, args.photons)?;
    let rho0 = initial_state(cfg, gen.space, &args.init)?;
    let opts = EvolveOptions { rtol: args.rtol, sample_interval: args.dt, ..Default::default() };
    let traj = evolve(&gen, &rho0, args.tmax, opts)?;
    let s = gen.space;
    let coherences = [(0, s.index(0, 1)), (0, s.index(1, 0))];
    traj.write_csv(open_out(out)?, s.fock_dim, &coherences)?;
    Ok(())
}

fn steady_cmd(cfg: &Config, args: &SteadyArgs, out: Option<&Path>) -> Result<(), CliError> {
    let gen = generator(cfg, args.mode, args.photons)?;
    let rho = steady_state(&gen)?;
    let residual = dispersive_core::lindblad::steady::residual(&gen, &rho);
    eprintln!("steady-state residual {residual:.3e}");
    let mut w = csv::Writer::from_writer(open_out(out)?);
    w.write_record(["level", "photons", "population"])?;
    for i in 0..gen.dim() {
        let (k, n) = gen.space.split(i);
        w.write_record([k.to_string(), n.to_string(), num(rho[(i, i)].re)])?;
    }
    w.flush()?;
    Ok(())
}

fn plot_cmd(args: &PlotArgs, out: Option<&Path>) -> Result<(), CliError> {
    if args.y.is_empty() {
        return Err(CliError::Config("--y needs at least one column".into()));
    }
    let (xs, ys) = read_columns(&args.input, &args.x, &args.y)?;
    let series = args
        .y
        .iter()
        .zip(ys)
        .map(|(name, col)| Series { name: name.clone(), points: xs.iter().copied().zip(col).collect() })
        .collect();
    let chart = Chart { x_label: args.x.clone(), series, log_y: args.log_y };
    let out: PathBuf = out.map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("plot.svg"));
    std::fs::write(&out, chart.render()).map_err(|e| CliError::Io(format!("{}: {e}", out.display())))?;
    Ok(())
}
