//! Command-line front end: every library capability behind one binary with
//! machine-readable output.
//!
//! Exit codes: 0 success, 2 argument/domain errors, 3 unwritable output,
//! 4 infeasible witness parameters, 5 LP infeasible, 6 iteration limit.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{bound_report, upper_bound, BoundReport};
use crate::certify::{
    cospow_coefficients, doubly_positive_check, CertifyConfig, DoublyPositiveReport,
    PdCertificate,
};
use crate::extremal::{
    make_atoms, primal_search, solve_central_lp, sweep_window_lp, ArithmeticMode,
    LpResult, PrimalResult, SolverConfig, WindowSweep,
};
use crate::piecewise::PiecewiseLinearFn;
use crate::quadrature::QuadratureConfig;
use crate::rational::Rational;
use crate::simplex::LpStatus;
use crate::witness::{
    central_window_ratio, choose_comb_params, cospow, counterexample_search, dip_train,
    sliding_window_ratio, verify_majorization, CounterexampleReport,
    MajorizationCertificate, WitnessEvaluation, DEFAULT_POWER_CAP,
};
use crate::Error;

const EXIT_USAGE: u8 = 2;
const EXIT_WRITE: u8 = 3;
const EXIT_INFEASIBLE_PARAMS: u8 = 4;
const EXIT_LP_INFEASIBLE: u8 = 5;
const EXIT_ITERATION_LIMIT: u8 = 6;

fn parse_rational(s: &str) -> Result<Rational, String> {
    Rational::parse(s).map_err(|e| e.to_string())
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
    Table,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum SolverMode {
    Exact,
    Float,
}

#[derive(Parser, Debug)]
#[command(
    name = "pdextremal",
    about = "Bounds, witnesses, certification and LP relaxations for window-integral \
             ratios of doubly positive functions",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: OutputFormat,

    /// Write output to this path instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Random seed (overrides PDEXTREMAL_SEED).
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Closed-form bound report for one window half-length.
    Bounds {
        /// Window half-length, exact: "3/2" or "1.5".
        #[arg(long, value_parser = parse_rational)]
        ell: Rational,
    },
    /// Bound reports over an inclusive range of half-lengths.
    Sweep {
        #[arg(long, value_parser = parse_rational)]
        from: Rational,
        #[arg(long, value_parser = parse_rational)]
        to: Rational,
        #[arg(long, value_parser = parse_rational)]
        step: Rational,
    },
    /// Witness constructions and their certificates.
    Witness {
        #[command(subcommand)]
        kind: WitnessKind,
    },
    /// Dual LP bounds and the primal ascent search.
    Solve {
        #[command(subcommand)]
        kind: SolveKind,
    },
    /// Positive definiteness / nonnegativity certification of a function.
    Certify(CertifyArgs),
}

#[derive(Subcommand, Debug)]
enum WitnessKind {
    /// Concentrated periodic witness: ratios plus double positivity.
    Comb {
        /// Target interval index.
        #[arg(long)]
        k: u32,
        /// Window excess over k, exact rational in (0, 1).
        #[arg(long, value_parser = parse_rational)]
        eps: Rational,
        /// Per-period stray-mass budget used to pick the cosine power.
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
        /// Largest cosine power the parameter search may use.
        #[arg(long, default_value_t = DEFAULT_POWER_CAP)]
        power_cap: u32,
        /// Quadrature relative tolerance for the ratio measurements.
        #[arg(long, default_value_t = 1e-8)]
        quad_tol: f64,
    },
    /// Exact majorization certificate for a dip train.
    Majorization {
        /// Window half-length whose construction parameters to use.
        #[arg(long, value_parser = parse_rational)]
        ell: Rational,
        /// Train anchor shift.
        #[arg(long, value_parser = parse_rational)]
        a: Rational,
    },
    /// Search for a window beating the central one on a two-bump
    /// autocorrelation (exact integrals).
    Counterexample {
        /// Candidate inner bump edges (comma separated).
        #[arg(long, value_parser = parse_rational, value_delimiter = ',', default_value = "2/5,1/2,3/5")]
        centers: Vec<Rational>,
        /// Candidate bump widths (comma separated).
        #[arg(long, value_parser = parse_rational, value_delimiter = ',', default_value = "2/5,1/2")]
        widths: Vec<Rational>,
        #[arg(long, value_parser = parse_rational, default_value = "1")]
        window_halfwidth: Rational,
    },
}

#[derive(Args, Debug, Clone)]
struct LpFlags {
    /// Append the closed-form construction progressions to the atom family.
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    construction_shifts: bool,
    #[arg(long, default_value_t = 12)]
    shift_count: u32,
    #[arg(long, default_value_t = 8)]
    dilation_count: u32,
    #[arg(long, value_enum, default_value = "exact")]
    mode: SolverMode,
    #[arg(long, default_value_t = 50_000)]
    max_iterations: usize,
}

#[derive(Subcommand, Debug)]
enum SolveKind {
    /// Centered-window dual bound (upper bound on the central ratio).
    Gamma {
        #[arg(long, value_parser = parse_rational)]
        ell: Rational,
        #[command(flatten)]
        lp: LpFlags,
    },
    /// Sliding-window dual bounds over a grid of window starts.
    Sigma {
        /// Window length (the bounded ratio has half-length ell/2).
        #[arg(long, value_parser = parse_rational)]
        ell: Rational,
        /// Grid "lo:hi:count" of window starts.
        #[arg(long)]
        a_grid: Option<String>,
        #[command(flatten)]
        lp: LpFlags,
    },
    /// Primal coordinate-ascent lower estimate of the central ratio.
    Primal {
        #[arg(long, value_parser = parse_rational)]
        ell: Rational,
        #[arg(long, default_value_t = 8)]
        harmonics: u32,
        #[arg(long, default_value_t = 16.0)]
        period: f64,
        #[arg(long, default_value_t = 20)]
        starts: u32,
        #[arg(long, default_value_t = 1e-8)]
        quad_tol: f64,
    },
}

#[derive(Args, Debug)]
struct CertifyArgs {
    /// Built-in function: triangle | gaussian | cospow:P:N |
    /// indicator:LO:HI | train:A:K:P.
    #[arg(long, conflicts_with = "samples")]
    function: Option<String>,
    /// Two-column CSV of samples (x,value); checked via linear
    /// interpolation.
    #[arg(long)]
    samples: Option<PathBuf>,
    #[arg(long)]
    step: Option<f64>,
    #[arg(long, default_value_t = 128)]
    lags: usize,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Sampling window "lo:hi" for the nonnegativity grid.
    #[arg(long)]
    window: Option<String>,
}

// Reports -----------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct CombReport {
    params: crate::witness::CombParams,
    evaluation: WitnessEvaluation,
}

#[derive(Serialize, Deserialize)]
struct GammaReport {
    /// The dual bound on the central ratio (= A_opt).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    bound: Option<Rational>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    closed_form_upper: Option<Rational>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    primal_estimate: Option<f64>,
    result: LpResult,
}

#[derive(Serialize, Deserialize)]
struct SigmaReport {
    /// Max over the grid of certified per-window bounds (bounds the sliding
    /// ratio at half-length ell/2).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    bound: Option<Rational>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    closed_form_upper: Option<Rational>,
    sweep: WindowSweep,
}

#[derive(Serialize, Deserialize)]
struct CertifyReport {
    function: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    construction: Option<PdCertificate>,
    report: DoublyPositiveReport,
}

/// Entry point used by `main`.
pub fn run() -> ExitCode {
    let cli = Cli::parse();
    let seed = cli.seed.or_else(|| {
        std::env::var("PDEXTREMAL_SEED")
            .ok()
            .and_then(|v| v.parse().ok())
    });
    match dispatch(&cli, seed.unwrap_or(0)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::InfeasibleConcentration { .. } => EXIT_INFEASIBLE_PARAMS,
                Error::Io(_) => EXIT_WRITE,
                _ => EXIT_USAGE,
            })
        }
    }
}

fn dispatch(cli: &Cli, seed: u64) -> Result<ExitCode, Error> {
    match &cli.command {
        Command::Bounds { ell } => {
            let report = bound_report(ell)?;
            emit_bounds(cli, std::slice::from_ref(&report))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Sweep { from, to, step } => {
            if from >= to || !step.is_positive() {
                return Err(Error::Domain(format!(
                    "sweep needs from < to and step > 0, got {from}..{to} step {step}"
                )));
            }
            let mut ells = Vec::new();
            let mut ell = from.clone();
            while ell <= *to {
                ells.push(ell.clone());
                ell = &ell + step;
            }
            let reports: Result<Vec<BoundReport>, Error> =
                ells.par_iter().map(bound_report).collect();
            emit_bounds(cli, &reports?)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Witness { kind } => run_witness(cli, kind),
        Command::Solve { kind } => run_solve(cli, kind, seed),
        Command::Certify(args) => run_certify(cli, args),
    }
}

fn run_witness(cli: &Cli, kind: &WitnessKind) -> Result<ExitCode, Error> {
    match kind {
        WitnessKind::Comb {
            k,
            eps,
            tol,
            power_cap,
            quad_tol,
        } => {
            let params = match choose_comb_params(*k, eps, *tol, *power_cap) {
                Ok(p) => p,
                Err(e) => {
                    eprintln!("error: {e}");
                    return Ok(ExitCode::from(EXIT_INFEASIBLE_PARAMS));
                }
            };
            let quad = QuadratureConfig::with_tolerance(*quad_tol);
            let f = params.witness();
            let ell_g = &Rational::integer(*k as i64) + eps;
            let g = central_window_ratio(f.as_fn(), &ell_g, &quad)?;
            let reach = 2.0 * (*k as f64 + 1.0);
            let c = sliding_window_ratio(
                f.as_fn(),
                &Rational::integer(*k as i64),
                -reach,
                reach,
                eps.to_f64() / 10.0,
                &quad,
            )?;
            let window = 2.0 * (*k as f64) + 2.0;
            let cert = doubly_positive_check(
                f.as_fn(),
                &CertifyConfig::for_window(-window, window),
            )?;
            let evaluation = WitnessEvaluation {
                description: format!(
                    "cosine-power comb witness: k={k}, eps={eps}, p={}, delta={}, power={}",
                    params.p, params.delta, params.power
                ),
                g_ratio: g.value,
                c_ratio: c.value,
                c_ratio_argmax: c.argmax,
                certified_pd: cert.pd.passed,
                certified_nonneg: cert.nonneg.passed,
                quadrature_converged: g.converged && c.converged,
            };
            let report = CombReport {
                params,
                evaluation: evaluation.clone(),
            };
            emit_serializable(cli, &report, || {
                format!(
                    "comb witness (k={k}, eps={eps})\n  power: {}\n  g_ratio:  {}\n  \
                     c_ratio:  {} (at a = {})\n  doubly positive: pd={} nonneg={}\n",
                    report.params.power,
                    approx(evaluation.g_ratio),
                    approx(evaluation.c_ratio),
                    approx(evaluation.c_ratio_argmax),
                    evaluation.certified_pd,
                    evaluation.certified_nonneg,
                )
            })?;
            if !(evaluation.certified_pd && evaluation.certified_nonneg) {
                return Ok(ExitCode::FAILURE);
            }
            Ok(ExitCode::SUCCESS)
        }
        WitnessKind::Majorization { ell, a } => {
            let (k, p) = crate::bounds::construction_params(ell)?;
            let cert: MajorizationCertificate = verify_majorization(a, k, &p)?;
            // Exercise the train builder on the same parameters so the
            // emitted certificate is self-consistent.
            debug_assert_eq!(dip_train(a, k, &p)?, cert.lhs);
            let holds = cert.holds;
            emit_serializable(cli, &cert, || {
                format!(
                    "majorization for ell={ell}: a={a}, k={k}, p={p}\n  band: [{}, {}]\n  \
                     holds: {}\n",
                    cert.band.0, cert.band.1, cert.holds
                )
            })?;
            if holds {
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::FAILURE)
            }
        }
        WitnessKind::Counterexample {
            centers,
            widths,
            window_halfwidth,
        } => {
            let report: CounterexampleReport =
                counterexample_search(centers, widths, window_halfwidth)?;
            emit_serializable(cli, &report, || {
                format!(
                    "two-bump counterexample search\n  success: {}\n  center={} width={} \
                     shift={}\n  window integral:  {}\n  central integral: {}\n  gap: {}\n",
                    report.success,
                    report.center,
                    report.width,
                    report.shift,
                    report.window_integral,
                    report.central_integral,
                    report.gap
                )
            })?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn solver_config(lp: &LpFlags) -> SolverConfig {
    SolverConfig {
        mode: match lp.mode {
            SolverMode::Exact => ArithmeticMode::Exact,
            SolverMode::Float => ArithmeticMode::Float,
        },
        max_iterations: lp.max_iterations,
    }
}

fn status_exit(status: LpStatus) -> ExitCode {
    match status {
        LpStatus::Optimal => ExitCode::SUCCESS,
        LpStatus::Infeasible => ExitCode::from(EXIT_LP_INFEASIBLE),
        LpStatus::IterationLimit => ExitCode::from(EXIT_ITERATION_LIMIT),
        LpStatus::Unbounded => ExitCode::FAILURE,
    }
}

fn run_solve(cli: &Cli, kind: &SolveKind, seed: u64) -> Result<ExitCode, Error> {
    match kind {
        SolveKind::Gamma { ell, lp } => {
            let family = make_atoms(ell, lp.shift_count, lp.dilation_count, lp.construction_shifts)?;
            let result = solve_central_lp(ell, &family, &solver_config(lp))?;
            let closed = upper_bound(ell).ok().map(|(u, _)| u);
            let primal = primal_search(
                ell,
                8,
                (4.0 * ell.to_f64().max(1.0)).max(16.0),
                8,
                seed,
                &QuadratureConfig::with_tolerance(1e-8),
            )
            .ok()
            .map(|p| p.lower_estimate);
            let status = result.status;
            let report = GammaReport {
                bound: result.a_opt.clone(),
                closed_form_upper: closed,
                primal_estimate: primal,
                result,
            };
            emit_serializable(cli, &report, || {
                format!(
                    "central dual bound at ell={ell}\n  LP bound:    {}\n  closed form: {}\n  \
                     primal est.: {}\n  status: {:?}, independent check: {:?}\n",
                    opt_rational(&report.bound),
                    opt_rational(&report.closed_form_upper),
                    report.primal_estimate.map(approx).unwrap_or_default(),
                    report.result.status,
                    report.result.independent_check,
                )
            })?;
            Ok(status_exit(status))
        }
        SolveKind::Sigma { ell, a_grid, lp } => {
            let grid = match a_grid {
                Some(raw) => parse_grid(raw)?,
                None => {
                    // Default: 17 points from 0 to 2*ell.
                    let hi = ell * &Rational::integer(2);
                    (0..17)
                        .map(|i| &(&hi * &Rational::integer(i)) / &Rational::integer(16))
                        .collect()
                }
            };
            let family = make_atoms(ell, lp.shift_count, lp.dilation_count, lp.construction_shifts)?;
            let sweep = sweep_window_lp(ell, &grid, &family, &solver_config(lp))?;
            let worst = sweep
                .per_a
                .iter()
                .map(|r| r.status)
                .max_by_key(|s| match s {
                    LpStatus::Optimal => 0,
                    LpStatus::Unbounded => 1,
                    LpStatus::Infeasible => 2,
                    LpStatus::IterationLimit => 3,
                })
                .unwrap_or(LpStatus::Optimal);
            let half = ell / &Rational::integer(2);
            let report = SigmaReport {
                bound: sweep.bound.clone(),
                closed_form_upper: upper_bound(&half).ok().map(|(u, _)| u),
                sweep,
            };
            emit_serializable(cli, &report, || {
                let mut s = format!(
                    "sliding-window dual bounds, window length {ell} (ratio half-length {half})\n"
                );
                for r in &report.sweep.per_a {
                    s.push_str(&format!(
                        "  a = {:>8}: bound = {} ({:?})\n",
                        r.a.as_ref().map(|a| a.to_string()).unwrap_or_default(),
                        opt_rational(&r.bound_sigma),
                        r.status
                    ));
                }
                s.push_str(&format!(
                    "  max bound: {}   closed form: {}\n",
                    opt_rational(&report.bound),
                    opt_rational(&report.closed_form_upper)
                ));
                s
            })?;
            Ok(status_exit(worst))
        }
        SolveKind::Primal {
            ell,
            harmonics,
            period,
            starts,
            quad_tol,
        } => {
            let result: PrimalResult = primal_search(
                ell,
                *harmonics,
                *period,
                *starts,
                seed,
                &QuadratureConfig::with_tolerance(*quad_tol),
            )?;
            emit_serializable(cli, &result, || {
                format!(
                    "primal lower estimate at ell={ell}\n  estimate: {}\n  harmonics: {}  \
                     period: {}  starts: {}  seed: {}\n",
                    approx(result.lower_estimate),
                    result.harmonics,
                    result.period,
                    result.starts,
                    result.seed
                )
            })?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn parse_grid(raw: &str) -> Result<Vec<Rational>, Error> {
    let parts: Vec<&str> = raw.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::Parse(format!(
            "grid must be lo:hi:count, got {raw:?}"
        )));
    }
    let lo = Rational::parse(parts[0])?;
    let hi = Rational::parse(parts[1])?;
    let count: usize = parts[2]
        .parse()
        .map_err(|_| Error::Parse(format!("bad grid count {:?}", parts[2])))?;
    if count == 0 || hi < lo {
        return Err(Error::Parse(format!("empty grid {raw:?}")));
    }
    if count == 1 {
        return Ok(vec![lo]);
    }
    let span = &hi - &lo;
    Ok((0..count)
        .map(|i| {
            &lo + &(&(&span * &Rational::integer(i as i64))
                / &Rational::integer(count as i64 - 1))
        })
        .collect())
}

fn run_certify(cli: &Cli, args: &CertifyArgs) -> Result<ExitCode, Error> {
    let name;
    let f: Box<dyn Fn(f64) -> f64>;
    let mut construction: Option<PdCertificate> = None;
    let mut support_hint: Option<(f64, f64)> = None;

    if let Some(raw) = &args.function {
        name = raw.clone();
        let fields: Vec<&str> = raw.split(':').collect();
        match fields[0] {
            "triangle" => {
                let t = PiecewiseLinearFn::triangle(&Rational::zero());
                support_hint = Some((-1.0, 1.0));
                construction = Some(PdCertificate::construction(
                    "autocorrelation of a unit indicator",
                ));
                f = Box::new(move |x| t.eval_f64(x));
            }
            "gaussian" => {
                support_hint = Some((-6.0, 6.0));
                f = Box::new(|x: f64| (-x * x).exp());
            }
            "cospow" => {
                if fields.len() != 3 {
                    return Err(Error::Parse("expected cospow:P:N".into()));
                }
                let p = Rational::parse(fields[1])?;
                let n: u32 = fields[2]
                    .parse()
                    .map_err(|_| Error::Parse("bad cosine power".into()))?;
                let handle = cospow(&p, n)?;
                if n <= 64 {
                    let coeffs = cospow_coefficients(n)?;
                    if coeffs.iter().all(|c| !c.is_negative()) {
                        construction = Some(PdCertificate::analytic(
                            "all cosine-expansion coefficients are nonnegative",
                        ));
                    }
                } else {
                    construction = Some(PdCertificate::construction(
                        "even power of a positive definite cosine",
                    ));
                }
                support_hint = Some((-4.0, 4.0));
                f = Box::new(move |x| handle.eval(x));
            }
            "indicator" => {
                if fields.len() != 3 {
                    return Err(Error::Parse("expected indicator:LO:HI".into()));
                }
                let lo = Rational::parse(fields[1])?;
                let hi = Rational::parse(fields[2])?;
                let ind = PiecewiseLinearFn::indicator(&lo, &hi)?;
                let (s0, s1) = (lo.to_f64(), hi.to_f64());
                support_hint = Some((s0.min(-s1) - 1.0, s1.max(-s0) + 1.0));
                f = Box::new(move |x| ind.eval_f64(x));
            }
            "train" => {
                if fields.len() != 4 {
                    return Err(Error::Parse("expected train:A:K:P".into()));
                }
                let a = Rational::parse(fields[1])?;
                let k: i64 = fields[2]
                    .parse()
                    .map_err(|_| Error::Parse("bad train order".into()))?;
                let p = Rational::parse(fields[3])?;
                let train = dip_train(&a, k, &p)?;
                if let Some((lo, hi)) = train.support() {
                    support_hint = Some((lo.to_f64(), hi.to_f64()));
                }
                construction = Some(PdCertificate::construction(
                    "finite sum of indicator-difference autocorrelations",
                ));
                f = Box::new(move |x| train.eval_f64(x));
            }
            other => {
                return Err(Error::Parse(format!("unknown built-in function {other:?}")));
            }
        }
    } else if let Some(path) = &args.samples {
        name = path.display().to_string();
        let table = read_sample_table(path)?;
        if let (Some(first), Some(last)) = (table.first(), table.last()) {
            support_hint = Some((first.0, last.0));
        }
        f = Box::new(move |x| interpolate(&table, x));
    } else {
        return Err(Error::Parse(
            "certify needs --function or --samples".into(),
        ));
    }

    let (lo, hi) = match &args.window {
        Some(raw) => {
            let parts: Vec<&str> = raw.split(':').collect();
            if parts.len() != 2 {
                return Err(Error::Parse("window must be lo:hi".into()));
            }
            let lo: f64 = parts[0]
                .parse()
                .map_err(|_| Error::Parse("bad window bound".into()))?;
            let hi: f64 = parts[1]
                .parse()
                .map_err(|_| Error::Parse("bad window bound".into()))?;
            (lo, hi)
        }
        None => support_hint.unwrap_or((-4.0, 4.0)),
    };
    let mut cfg = CertifyConfig::for_window(lo, hi);
    cfg.lags = args.lags;
    cfg.tol = args.tol;
    if let Some(step) = args.step {
        cfg.step = step;
    } else {
        cfg.step = lo.abs().max(hi.abs()).max(1e-6) / (args.lags as f64 - 1.0);
    }

    let report = doubly_positive_check(&f, &cfg)?;
    let out = CertifyReport {
        function: name,
        construction,
        report,
    };
    emit_serializable(cli, &out, || {
        format!(
            "certification of {}\n  toeplitz pd: {} (min/max eigenvalue ratio {})\n  \
             nonneg: {} (worst {} at x = {})\n  construction: {}\n",
            out.function,
            out.report.pd.passed,
            out.report
                .pd
                .min_eigenvalue_ratio
                .map(approx)
                .unwrap_or_default(),
            out.report.nonneg.passed,
            approx(out.report.nonneg.worst_value),
            approx(out.report.nonneg.worst_x),
            out.construction
                .as_ref()
                .map(|c| c.note.clone())
                .unwrap_or_else(|| "none".into()),
        )
    })?;
    Ok(ExitCode::SUCCESS)
}

fn read_sample_table(path: &PathBuf) -> Result<Vec<(f64, f64)>, Error> {
    let text = std::fs::read_to_string(path)?;
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split(',');
        let x = parts.next().map(str::trim).unwrap_or_default();
        let y = parts.next().map(str::trim).unwrap_or_default();
        match (x.parse::<f64>(), y.parse::<f64>()) {
            (Ok(x), Ok(y)) => rows.push((x, y)),
            _ if i == 0 => continue, // header row
            _ => {
                return Err(Error::Parse(format!(
                    "bad sample row {}: {line:?}",
                    i + 1
                )))
            }
        }
    }
    if rows.len() < 2 {
        return Err(Error::Parse("need at least two sample rows".into()));
    }
    rows.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    Ok(rows)
}

fn interpolate(table: &[(f64, f64)], x: f64) -> f64 {
    if x < table[0].0 || x > table[table.len() - 1].0 {
        return 0.0;
    }
    let i = table.partition_point(|(t, _)| *t < x);
    if i == 0 {
        return table[0].1;
    }
    if i >= table.len() {
        return table[table.len() - 1].1;
    }
    let (x0, y0) = table[i - 1];
    let (x1, y1) = table[i];
    if x1 == x0 {
        return y1;
    }
    y0 + (y1 - y0) * (x - x0) / (x1 - x0)
}

// Output plumbing ----------------------------------------------------------

fn approx(v: f64) -> String {
    // Human tables carry 20 significant digits, explicitly marked as
    // approximate; exact values appear only in JSON/CSV.
    format!("~{:.19e}", v)
}

fn opt_rational(v: &Option<Rational>) -> String {
    v.as_ref()
        .map(|r| format!("{r} ({})", approx(r.to_f64())))
        .unwrap_or_else(|| "-".into())
}

fn write_output(cli: &Cli, text: &str) -> Result<(), Error> {
    match &cli.out {
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            if !text.ends_with('\n') {
                stdout.write_all(b"\n")?;
            }
            Ok(())
        }
        Some(path) => {
            std::fs::write(path, text)?;
            Ok(())
        }
    }
}

fn emit_bounds(cli: &Cli, reports: &[BoundReport]) -> Result<(), Error> {
    let text = match cli.format {
        OutputFormat::Json => {
            if reports.len() == 1 {
                serde_json::to_string_pretty(&reports[0]).expect("serializable")
            } else {
                serde_json::to_string_pretty(reports).expect("serializable")
            }
        }
        OutputFormat::Csv => {
            let mut s = String::from(BoundReport::CSV_HEADER);
            s.push('\n');
            for r in reports {
                s.push_str(&r.csv_row());
                s.push('\n');
            }
            s
        }
        OutputFormat::Table => {
            let mut s = String::from(
                "ell          lower_G  lower_C  upper                      upper_simple  k   p\n",
            );
            for r in reports {
                let mark = if r.integer_ambiguity() { "*" } else { " " };
                s.push_str(&format!(
                    "{:<12}{mark}{:<8} {:<8} {:<26} {:<13} {:<3} {}\n",
                    r.ell.to_string(),
                    r.lower_g.to_string(),
                    r.lower_c.to_string(),
                    r.upper
                        .as_ref()
                        .map(|u| format!("{u} ({})", approx(u.to_f64())))
                        .unwrap_or_else(|| "-".into()),
                    r.upper_simple
                        .map(|v| v.to_string())
                        .unwrap_or_else(|| "-".into()),
                    r.k_opt.map(|v| v.to_string()).unwrap_or_else(|| "-".into()),
                    r.p_opt
                        .as_ref()
                        .map(|v| v.to_string())
                        .unwrap_or_else(|| "-".into()),
                ));
            }
            s.push_str("(*) integer half-length: exact value known only within the band\n");
            s
        }
    };
    write_output(cli, &text)
}

fn emit_serializable<T: Serialize>(
    cli: &Cli,
    value: &T,
    table: impl Fn() -> String,
) -> Result<(), Error> {
    let text = match cli.format {
        OutputFormat::Json => serde_json::to_string_pretty(value).expect("serializable"),
        OutputFormat::Table => table(),
        OutputFormat::Csv => {
            return Err(Error::Parse(
                "csv output is only available for bounds and sweep".into(),
            ))
        }
    };
    write_output(cli, &text)
}
