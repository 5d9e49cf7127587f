//! Command-line front end for `cyclic-thomae`.

pub mod config;
pub mod report;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cyclic_thomae::abeljacobi::AbelMap;
use cyclic_thomae::kernels::{canonical_bidifferential, cramer_decomposition_check, gz_coefficient, q_quadratic, szego_expansion};
use cyclic_thomae::periods::QuadSettings;
use cyclic_thomae::surface::Place;
use cyclic_thomae::thomae::{
    gradient_ratio, order_one_vectors, thomae_report, verify_nonvanishing, Exponents, ReportOptions, ThomaeReport,
};
use cyclic_thomae::{enumerate_admissible, tau_profile, Curve, ThomaeData};
use num_complex::Complex64;
use serde_json::{json, Value};

use config::{CurveConfig, InputError};
use report::{complex, complexes, envelope, matrix, rational_matrix, rationals};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "cyclic-thomae", version, about = "Periods, theta constants and Thomae identities for y^N = prod (x - l_i)^R_i")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: GlobalOpts,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalOpts {
    /// Relative tolerance for PASS/FAIL decisions.
    #[arg(long, global = true, default_value_t = 1e-4)]
    pub tol: f64,
    /// Gauss-Legendre nodes per panel.
    #[arg(long, global = true, default_value_t = 20)]
    pub quad_order: usize,
    /// Adaptive quadrature tolerance.
    #[arg(long, global = true, default_value_t = 1e-14)]
    pub quad_tol: f64,
    /// Truncation tolerance of theta sums.
    #[arg(long, global = true, default_value_t = 1e-14)]
    pub theta_tol: f64,
    /// Seed for the random divisors of the Riemann constant search.
    #[arg(long, global = true, default_value_t = 11)]
    pub seed: u64,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List admissible β (or every β satisfying the congruence with --all).
    Enumerate {
        config: PathBuf,
        #[arg(long)]
        all: bool,
    },
    /// Homology basis, period matrices and τ.
    Periods { config: PathBuf },
    /// Abel images of branch and infinite places, Riemann constant, e_β.
    Abel { config: PathBuf },
    /// θ[e_β](0): values, non-vanishing ratios and gradients.
    Theta {
        config: PathBuf,
        #[arg(long, value_parser = parse_beta)]
        beta: Option<BetaArg>,
    },
    /// Canonical bidifferential, G_z coefficients, determinant identities and Szegő series.
    Kernels {
        config: PathBuf,
        /// Point for the Szegő expansion, `re,im`.
        #[arg(long, value_parser = parse_point, default_value = "0.6,-0.45")]
        at: Complex64,
    },
    /// Thomae checks: non-vanishing, gradients, derivative identity, constancy.
    Verify {
        config: PathBuf,
        #[arg(long, value_parser = parse_beta, conflicts_with = "all_admissible")]
        beta: Option<BetaArg>,
        #[arg(long)]
        all_admissible: bool,
        /// Exponent table that decides PASS/FAIL.
        #[arg(long, value_enum, default_value_t = ExponentChoice::Centered)]
        exponents: ExponentChoice,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExponentChoice {
    /// `q + γ/2` over ordered pairs.
    Stated,
    /// `q - (N-1)²/(4N) + γ/2` over unordered pairs.
    Centered,
}

/// Comma-separated β, e.g. `0,1,1,2`.
#[derive(Debug, Clone)]
pub struct BetaArg(pub Vec<u32>);

fn parse_beta(s: &str) -> Result<BetaArg, String> {
    s.split(',')
        .map(|t| t.trim().parse::<u32>().map_err(|e| format!("bad beta entry `{t}`: {e}")))
        .collect::<Result<_, _>>()
        .map(BetaArg)
}

fn parse_point(s: &str) -> Result<Complex64, String> {
    let parts: Vec<&str> = s.split(',').collect();
    let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("bad coordinate `{t}`: {e}"));
    match parts.as_slice() {
        [re] => Ok(Complex64::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => Err(format!("expected `re,im`, got `{s}`")),
    }
}

enum Failure {
    Input(String),
    Numeric(String),
}

impl From<InputError> for Failure {
    fn from(e: InputError) -> Self {
        Failure::Input(e.0)
    }
}

impl From<cyclic_thomae::Error> for Failure {
    fn from(e: cyclic_thomae::Error) -> Self {
        match e {
            cyclic_thomae::Error::InvalidCurve(_) | cyclic_thomae::Error::InvalidBeta(_) => Failure::Input(e.to_string()),
            _ => Failure::Numeric(e.to_string()),
        }
    }
}

/// Parses `argv`, runs the subcommand and returns the process exit code.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok((report, pass)) => {
            let mut text = serde_json::to_string_pretty(&report).expect("reports are valid JSON");
            text.push('\n');
            let written = match &cli.opts.out {
                Some(path) => std::fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display())),
                None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| e.to_string()),
            };
            if let Err(e) = written {
                eprintln!("error: {e}");
                return EXIT_INPUT;
            }
            if pass {
                EXIT_OK
            } else {
                EXIT_FAIL
            }
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            EXIT_INPUT
        }
        Err(Failure::Numeric(msg)) => {
            eprintln!("numerical failure: {msg}");
            EXIT_FAIL
        }
    }
}

fn check_opts(o: &GlobalOpts) -> Result<QuadSettings<f64>, Failure> {
    for (name, v) in [("--tol", o.tol), ("--quad-tol", o.quad_tol), ("--theta-tol", o.theta_tol)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Failure::Input(format!("{name} must be positive")));
        }
    }
    if o.quad_order < 2 {
        return Err(Failure::Input("--quad-order must be at least 2".into()));
    }
    Ok(QuadSettings { order: o.quad_order, tol: o.quad_tol })
}

fn load(path: &std::path::Path) -> Result<(CurveConfig, Curve), Failure> {
    let cfg = CurveConfig::load(path)?;
    let spec = cfg.curve()?;
    Ok((cfg, spec))
}

fn execute(cli: &Cli) -> Result<(Value, bool), Failure> {
    let quad = check_opts(&cli.opts)?;
    let o = &cli.opts;
    match &cli.command {
        Command::Enumerate { config, all } => {
            let (_, spec) = load(config)?;
            let list = if *all {
                cyclic_thomae::divisors::enumerate_congruent(&spec)?
            } else {
                enumerate_admissible(&spec)?
            };
            let rd = spec.validate()?;
            let records: Vec<Value> = list
                .iter()
                .map(|b| json!({ "beta": b.beta, "tau": b.tau, "order": b.order }))
                .collect();
            let body = json!({
                "genus": rd.genus,
                "d": rd.d[1..].to_vec(),
                "admissible_only": !all,
                "count": records.len(),
                "records": records,
            });
            Ok((envelope("enumerate", &spec, true, body), true))
        }
        Command::Periods { config } => {
            let (_, spec) = load(config)?;
            let basis = cyclic_thomae::homology::build_basis(&spec)?;
            let pd = cyclic_thomae::periods::compute_periods(&spec, &basis, &quad)?;
            let sym = pd.symmetry_defect() / pd.tau.max_abs();
            let bil = pd.bilinear_defect() / (pd.a.max_abs() * pd.b.max_abs());
            let min_eig = cyclic_thomae::linalg::min_eigenvalue(&pd.tau.im());
            let pass = sym < o.tol && bil < o.tol && min_eig > 0.0;
            let cycles = |cs: &[cyclic_thomae::homology::Cycle]| -> Value {
                cs.iter().map(|c| json!({ "label": c.label, "coefficients": c.coeffs })).collect()
            };
            let body = json!({
                "columns": pd.columns,
                "branch_order": basis.order,
                "generators": basis.generators.iter().map(|g| json!({ "edge": [basis.edges[g.edge].from, basis.edges[g.edge].to], "sheet": g.sheet })).collect::<Vec<_>>(),
                "a_cycles": cycles(&basis.a),
                "b_cycles": cycles(&basis.b),
                "A": matrix(&pd.a),
                "B": matrix(&pd.b),
                "tau": matrix(&pd.tau),
                "det_c": complex(pd.det_c),
                "symmetry_defect": sym,
                "bilinear_defect": bil,
                "min_eigenvalue_im_tau": min_eig,
            });
            Ok((envelope("periods", &spec, pass, body), pass))
        }
        Command::Abel { config } => {
            let (_, spec) = load(config)?;
            let data = ThomaeData::new(&spec, quad.clone(), o.theta_tol, o.seed)?;
            let abel = AbelMap::new(&spec, &data.periods, quad)?;
            let branch: Vec<Value> = (0..spec.m())
                .map(|i| abel.map(&Place::Branch(i)).map(|u| complexes(&u)))
                .collect::<Result<_, _>>()?;
            let infinity: Vec<Value> = (0..spec.n)
                .map(|s| abel.map(&Place::Infinity(s)).map(|u| complexes(&u)))
                .collect::<Result<_, _>>()?;
            let rc = &data.riemann;
            let margin = rc.second / rc.best.max(f64::MIN_POSITIVE);
            let points: Vec<Value> = enumerate_admissible(&spec)?
                .iter()
                .map(|b| {
                    let p = data.divisors.divisor_point(&spec, &data.periods.tau, &b.beta)?;
                    Ok(json!({
                        "beta": b.beta,
                        "z": complexes(&p.z),
                        "a": rationals(&p.char_a.unwrap_or_default()),
                        "b": rationals(&p.char_b.unwrap_or_default()),
                    }))
                })
                .collect::<Result<_, cyclic_thomae::Error>>()?;
            let pass = margin >= 10.0;
            let body = json!({
                "branch_images": branch,
                "infinity_images": infinity,
                "riemann_constant": {
                    "k": complexes(&rc.k.z),
                    "half_period_a": rc.half_period.0,
                    "half_period_b": rc.half_period.1,
                    "best_residual": rc.best,
                    "second_residual": rc.second,
                    "margin": margin,
                },
                "divisor_points": points,
            });
            Ok((envelope("abel", &spec, pass, body), pass))
        }
        Command::Theta { config, beta } => {
            let (_, spec) = load(config)?;
            let data = ThomaeData::new(&spec, quad, o.theta_tol, o.seed)?;
            let betas: Vec<Vec<u32>> = match beta {
                Some(b) => vec![b.0.clone()],
                None => {
                    let mut v: Vec<Vec<u32>> = enumerate_admissible(&spec)?.into_iter().map(|b| b.beta).collect();
                    v.extend(order_one_vectors(&spec)?);
                    v
                }
            };
            let mut pass = true;
            let mut rows = Vec::new();
            for b in &betas {
                let profile = tau_profile(&spec, b)?;
                let nv = verify_nonvanishing(&data, b, 20, o.seed)?;
                let ok = nv.passed(1e-6);
                pass &= ok;
                let mut row = json!({
                    "beta": b,
                    "order": profile.order,
                    "normalized_abs": nv.value,
                    "scale": nv.scale,
                    "ratio": nv.ratio(),
                    "status": if ok { "PASS" } else { "FAIL" },
                });
                if profile.is_admissible() {
                    let ch = data.characteristics(b)?;
                    let theta = cyclic_thomae::theta::theta_char(
                        &ch.0.iter().map(|q| cyclic_thomae::scalar::rat(*q)).collect::<Vec<f64>>(),
                        &ch.1.iter().map(|q| cyclic_thomae::scalar::rat(*q)).collect::<Vec<f64>>(),
                        &vec![Complex64::new(0.0, 0.0); data.periods.genus()],
                        &data.periods.tau,
                        o.theta_tol,
                        cyclic_thomae::theta::Derivatives::None,
                    )?;
                    row["a"] = rationals(&ch.0);
                    row["b"] = rationals(&ch.1);
                    row["theta"] = complex(theta.value);
                    row["gradient_ratio"] = json!(gradient_ratio(&data, &ch)?);
                }
                rows.push(row);
            }
            Ok((envelope("theta", &spec, pass, json!({ "entries": rows })), pass))
        }
        Command::Kernels { config, at } => {
            let (_, spec) = load(config)?;
            let basis = cyclic_thomae::homology::build_basis(&spec)?;
            let pd = cyclic_thomae::periods::compute_periods(&spec, &basis, &quad)?;
            let om = canonical_bidifferential(&spec, &basis, &pd)?;
            let mut pass = om.m_asymmetry() < o.tol * (1.0 + om.m.max_abs()) && om.degree_defect < o.tol;
            let mut gz = Vec::new();
            for i in 0..spec.m() {
                let g = gz_coefficient(&om, i, 64)?;
                let expect = g.gamma_term - pd.dlog_det_jacobi(i) * spec.n as f64;
                let rel = (g.value - expect).norm() / expect.norm();
                pass &= rel < o.tol;
                gz.push(json!({
                    "branch": i,
                    "coefficient": complex(g.value),
                    "expected": complex(expect),
                    "relative_residual": rel,
                    "fit_residual": g.fit_residual,
                }));
            }
            let mut cramer = Vec::new();
            for i in 0..spec.m() {
                for l in 1..spec.n {
                    let (r1, r2) = cramer_decomposition_check(&spec, &pd, i, l)?.residuals();
                    pass &= r1 < o.tol && r2 < o.tol;
                    cramer.push(json!({ "branch": i, "l": l, "det_b_vs_det_c": r1, "det_bl_vs_sum": r2 }));
                }
            }
            let mut szego = Vec::new();
            for b in enumerate_admissible(&spec)? {
                let c = szego_expansion(&spec, &b.beta, *at, 2)?;
                szego.push(json!({
                    "beta": b.beta,
                    "coefficients": complexes(&c),
                    "q_formula": complex(q_quadratic(&spec, &b.beta, *at, false)),
                    "q_centered_formula": complex(q_quadratic(&spec, &b.beta, *at, true)),
                }));
            }
            let body = json!({
                "M": matrix(&om.m),
                "m_asymmetry": om.m_asymmetry(),
                "degree_defect": om.degree_defect,
                "gz": gz,
                "determinant_identities": cramer,
                "szego_point": complex(*at),
                "szego": szego,
            });
            Ok((envelope("kernels", &spec, pass, body), pass))
        }
        Command::Verify { config, beta, all_admissible, exponents } => {
            let (cfg, spec) = load(config)?;
            let betas: Vec<Vec<u32>> = match (beta, all_admissible) {
                (Some(BetaArg(b)), _) => {
                    if !tau_profile(&spec, b)?.is_admissible() {
                        return Err(Failure::Input(format!("--beta {b:?} is not admissible")));
                    }
                    vec![b.clone()]
                }
                (None, true) => enumerate_admissible(&spec)?.into_iter().map(|b| b.beta).collect(),
                (None, false) => return Err(Failure::Input("verify needs --beta or --all-admissible".into())),
            };
            let data = ThomaeData::new(&spec, quad, o.theta_tol, o.seed)?;
            let opts = ReportOptions {
                random_count: 20,
                seed: o.seed,
                rel_step: 1e-5,
                deformation: cfg.deformation_path(&spec),
            };
            let reports = parallel_map(&betas, |b| thomae_report(&data, b, &opts));
            let kind = match exponents {
                ExponentChoice::Stated => Exponents::Stated,
                ExponentChoice::Centered => Exponents::Centered,
            };
            let mut pass = true;
            let mut out = Vec::new();
            for r in reports {
                let r = r?;
                let (v, ok) = verify_entry(&r, kind, o.tol);
                pass &= ok;
                out.push(v);
            }
            let body = json!({
                "exponents": match kind { Exponents::Stated => "stated", Exponents::Centered => "centered" },
                "tolerance": o.tol,
                "reports": out,
            });
            Ok((envelope("verify", &spec, pass, body), pass))
        }
    }
}

fn verify_entry(r: &ThomaeReport<f64>, kind: Exponents, tol: f64) -> (Value, bool) {
    let nonvanishing = r.nonvanishing.passed(1e-6);
    let gradient = r.gradient_ratio < 1e-6;
    let residual = |d: &cyclic_thomae::thomae::DerivativeIdentity<f64>| match kind {
        Exponents::Stated => d.residual(),
        Exponents::Centered => d.residual_centered(),
    };
    let worst = r.derivative.iter().map(residual).fold(0.0, f64::max);
    let derivative_ok = worst < tol;
    let (drift, alpha) = match &r.constancy {
        Some(runs) => {
            let c = runs.iter().find(|c| c.kind == kind).expect("both tables are computed");
            (Some(c.drift()), Some(complexes(&c.alpha)))
        }
        None => (None, None),
    };
    let constancy_ok = drift.is_none_or(|d| d < tol);
    let ok = nonvanishing && gradient && derivative_ok && constancy_ok;
    let derivative: Vec<Value> = r
        .derivative
        .iter()
        .map(|d| {
            json!({
                "i": d.i,
                "lhs": complex(d.lhs),
                "lhs_heat_equation": complex(d.lhs_heat),
                "half_dlog_det_c": complex(d.half_dlog_det),
                "rhs_stated": complex(d.rhs_stated),
                "rhs_centered": complex(d.rhs_centered),
                "residual_stated": d.residual(),
                "residual_centered": d.residual_centered(),
            })
        })
        .collect();
    let v = json!({
        "beta": r.beta,
        "status": if ok { "PASS" } else { "FAIL" },
        "a": rationals(&r.char_a),
        "b": rationals(&r.char_b),
        "theta": complex(r.theta),
        "det_c": complex(r.det_c),
        "exponents_stated": rational_matrix(&r.exponents),
        "exponents_centered": rational_matrix(&r.exponents_centered),
        "nonvanishing": { "ratio": r.nonvanishing.ratio(), "pass": nonvanishing },
        "gradient_ratio": { "value": r.gradient_ratio, "pass": gradient },
        "derivative_identity": { "max_residual": worst, "pass": derivative_ok, "entries": derivative },
        "constancy": { "drift": drift, "alpha": alpha, "pass": constancy_ok },
    });
    (v, ok)
}

/// Order-preserving map over scoped worker threads.
fn parallel_map<A: Sync, B: Send, F: Fn(&A) -> B + Sync>(items: &[A], f: F) -> Vec<B> {
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(items.len().max(1));
    let chunk = items.len().div_ceil(workers).max(1);
    std::thread::scope(|s| {
        let handles: Vec<_> = items.chunks(chunk).map(|c| s.spawn(|| c.iter().map(&f).collect::<Vec<B>>())).collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    })
}
