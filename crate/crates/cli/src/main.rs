//! Command line front end.
//!
//! Exit codes: 0 on success (stability verdicts are results, not errors),
//! 1 when `validate` finds a failing check, 2 on I/O or parse problems,
//! 3 when an extrapolation or quadrature fails to converge.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use kstab_core::error::Error;
use kstab_core::functionals::{barycenter, evaluate, FunctionalReport};
use kstab_core::jsonio::rat_json;
use kstab_core::oracle;
use kstab_core::rat::{format_rat, parse_rat, rat_to_f64, Rat};
use kstab_core::stability::{criterion, destabilizer, soliton_solve, ScanParams};
use kstab_core::weight::{load_weight_str, positivity_witness, pullback, WeightFunction};
use kstab_core::{load_datum_str, load_tc_str, SphericalDatum, TestConfig};

#[derive(Parser)]
#[command(
    name = "kstab",
    about = "Exact rational K-stability engine for spherical Fano data",
    long_about = None,
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Args)]
struct DatumArg {
    /// Datum file (JSON).
    #[arg(long)]
    datum: PathBuf,
}

#[derive(Args)]
struct WeightArg {
    /// Weight file (JSON); polynomial weights run exactly.
    #[arg(long)]
    weight: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Run every structural check of a datum; exit 0 iff all pass.
    Validate { datum: PathBuf },
    /// Evaluate all functionals of a test configuration. CSV columns:
    /// V, Vg, E, J, D, L, M, M_boundary, Fut, Fut_closed,
    /// reduced_central_fibre, barycenter (semicolon-separated components).
    Functionals {
        #[command(flatten)]
        datum: DatumArg,
        /// Test-configuration file (JSON).
        #[arg(long)]
        tc: PathBuf,
        #[command(flatten)]
        weight: WeightArg,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Weighted barycenter and its offset from kappa_P.
    Barycenter {
        #[command(flatten)]
        datum: DatumArg,
        #[command(flatten)]
        weight: WeightArg,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Barycenter criterion verdict (with destabilizer when it fails).
    Check {
        #[command(flatten)]
        datum: DatumArg,
        #[command(flatten)]
        weight: WeightArg,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Exact LP destabilizer search.
    Destabilize {
        #[command(flatten)]
        datum: DatumArg,
        #[command(flatten)]
        weight: WeightArg,
    },
    /// Heuristic scan of the normalized cone for the worst D/J ratio.
    RatioScan {
        #[command(flatten)]
        datum: DatumArg,
        #[command(flatten)]
        weight: WeightArg,
    },
    /// Soliton parameter along a direction (exp-affine weight family).
    Soliton {
        #[command(flatten)]
        datum: DatumArg,
        /// Direction coefficients, comma separated (e.g. "1,1").
        #[arg(long)]
        direction: String,
        /// Bisection bracket, comma separated.
        #[arg(long, default_value = "-5,0")]
        bracket: String,
    },
    /// Lattice-point oracle runs.
    Oracle {
        #[command(subcommand)]
        op: OracleOp,
    },
    /// 1-dimensional marginal of the weighted density n! ghat pi along a
    /// torus axis, as binned slab masses. CSV columns: bin_lo, bin_hi, mass,
    /// density (mass divided by bin width).
    Dh {
        #[command(flatten)]
        datum: DatumArg,
        #[command(flatten)]
        weight: WeightArg,
        /// Torus axis index.
        #[arg(long, default_value_t = 0)]
        axis: usize,
        #[arg(long, default_value_t = 32)]
        bins: usize,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Randomized identity suites (exact; deterministic in the seed).
    Selfcheck {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 24)]
        cases: usize,
    },
}

#[derive(Subcommand)]
enum OracleOp {
    /// h0(k): total dimension at level k.
    Hilbert {
        #[command(flatten)]
        datum: DatumArg,
        #[arg(long)]
        k: usize,
    },
    /// Weighted total-weight sums (S1, S2) at level k.
    Ssums {
        #[command(flatten)]
        datum: DatumArg,
        #[arg(long)]
        tc: PathBuf,
        #[command(flatten)]
        weight: WeightArg,
        #[arg(long)]
        k: usize,
    },
    /// Extrapolated Futaki estimate over a geometric level range.
    Futaki {
        #[command(flatten)]
        datum: DatumArg,
        #[arg(long)]
        tc: PathBuf,
        #[command(flatten)]
        weight: WeightArg,
        #[arg(long, default_value_t = 64)]
        k_min: usize,
        #[arg(long, default_value_t = 4096)]
        k_max: usize,
    },
    /// Fibre-product integral identity for one multi-index.
    Fibre {
        #[command(flatten)]
        datum: DatumArg,
        /// Multi-index, comma separated (e.g. "2,1").
        #[arg(long)]
        kvec: String,
        /// Lift character, comma separated rationals.
        #[arg(long)]
        chi: String,
    },
}

fn read(path: &PathBuf) -> Result<String, Error> {
    fs::read_to_string(path).map_err(Error::Io)
}

fn load_datum_file(path: &PathBuf) -> Result<SphericalDatum, Error> {
    load_datum_str(&read(path)?)
}

fn load_tc_file(datum: &SphericalDatum, path: &PathBuf) -> Result<TestConfig, Error> {
    load_tc_str(datum, &read(path)?)
}

fn load_weight_file(path: &PathBuf) -> Result<WeightFunction, Error> {
    load_weight_str(&read(path)?)
}

fn parse_rat_list(s: &str, what: &str) -> Result<Vec<Rat>, Error> {
    s.split(',')
        .map(|x| {
            parse_rat(x).ok_or_else(|| Error::Invalid(format!("bad {what} entry `{x}`")))
        })
        .collect()
}

fn warn_if_not_positive(datum: &SphericalDatum, weight: &WeightFunction) {
    if let Ok(conformed) = weight.conform(datum.torus_rank()) {
        if let Ok(Some((point, value))) = positivity_witness(&conformed, datum) {
            eprintln!(
                "warning: weight is not positive at ({}) (value {value}); \
                 functional signs are unreliable",
                point.iter().map(format_rat).collect::<Vec<_>>().join(", ")
            );
        }
    }
}

fn print_report(report: &FunctionalReport, format: Format) {
    match format {
        Format::Json => {
            println!("{}", serde_json::to_string_pretty(&report.to_json()).unwrap());
        }
        Format::Csv => {
            println!("{}", FunctionalReport::csv_header());
            println!("{}", report.csv_row());
        }
        Format::Text => {
            for (name, value) in report.fields() {
                println!("{name:>11} = {}", value.render());
            }
            println!(
                "{:>11} = ({})",
                "barycenter",
                report
                    .barycenter
                    .iter()
                    .map(|b| b.render())
                    .collect::<Vec<_>>()
                    .join(", ")
            );
            println!(
                "{:>11} = {}",
                "reduced",
                report.reduced_central_fibre
            );
        }
    }
}

fn run() -> Result<u8, Error> {
    let cli = Cli::parse();
    match cli.command {
        Command::Validate { datum } => {
            // Structural mismatches are verdicts of this command, not I/O
            // failures: render them as a failing check.
            let d = match load_datum_file(&datum) {
                Ok(d) => d,
                Err(Error::DimensionMismatch(msg)) => {
                    println!("FAIL dimension: {msg}");
                    return Ok(1);
                }
                Err(e) => return Err(e),
            };
            let report = d.validate();
            for check in &report.checks {
                println!(
                    "{} {}: {}",
                    if check.passed { "pass" } else { "FAIL" },
                    check.name,
                    check.detail
                );
            }
            if report.all_passed() {
                println!("all checks passed");
                Ok(0)
            } else {
                Ok(1)
            }
        }
        Command::Functionals {
            datum,
            tc,
            weight,
            format,
        } => {
            let d = load_datum_file(&datum.datum)?;
            let t = load_tc_file(&d, &tc)?;
            let w = load_weight_file(&weight.weight)?;
            warn_if_not_positive(&d, &w);
            let report = evaluate(&d, &t, &w)?;
            print_report(&report, format);
            Ok(0)
        }
        Command::Barycenter {
            datum,
            weight,
            format,
        } => {
            let d = load_datum_file(&datum.datum)?;
            let w = load_weight_file(&weight.weight)?;
            let b = barycenter(&d, &w)?;
            match format {
                Format::Json => {
                    let mut m = serde_json::Map::new();
                    m.insert(
                        "barycenter".into(),
                        serde_json::Value::Array(b.iter().map(|x| x.to_json()).collect()),
                    );
                    m.insert(
                        "kappa_p".into(),
                        serde_json::Value::Array(
                            d.kappa_p.coords().iter().map(rat_json).collect(),
                        ),
                    );
                    println!(
                        "{}",
                        serde_json::to_string_pretty(&serde_json::Value::Object(m)).unwrap()
                    );
                }
                _ => {
                    println!(
                        "b_g = ({})",
                        b.iter().map(|x| x.render()).collect::<Vec<_>>().join(", ")
                    );
                    let offset: Vec<String> = b
                        .iter()
                        .zip(d.kappa_p.coords())
                        .map(|(x, k)| match x.exact() {
                            Some(r) => format_rat(&(r - k)),
                            None => format!("{:.12}", x.to_f64() - rat_to_f64(k)),
                        })
                        .collect();
                    println!("b_g - kappa_P = ({})", offset.join(", "));
                }
            }
            Ok(0)
        }
        Command::Check {
            datum,
            weight,
            format,
        } => {
            let d = load_datum_file(&datum.datum)?;
            let w = load_weight_file(&weight.weight)?;
            warn_if_not_positive(&d, &w);
            let verdict = criterion(&d, &w)?;
            match format {
                Format::Json => println!(
                    "{}",
                    serde_json::to_string_pretty(&verdict.to_json()).unwrap()
                ),
                _ => println!("{}", verdict.render()),
            }
            Ok(0)
        }
        Command::Destabilize { datum, weight } => {
            let d = load_datum_file(&datum.datum)?;
            let w = load_weight_file(&weight.weight)?;
            match destabilizer(&d, &w)? {
                Some((v, ding)) => println!(
                    "destabilizer v=({}), D={}",
                    v.coords().iter().map(format_rat).collect::<Vec<_>>().join(","),
                    format_rat(&ding)
                ),
                None => println!("none"),
            }
            Ok(0)
        }
        Command::RatioScan { datum, weight } => {
            let d = load_datum_file(&datum.datum)?;
            let w = load_weight_file(&weight.weight)?;
            let (ratio, achiever) =
                kstab_core::stability::ratio_scan(&d, &w, &ScanParams::default())?;
            println!(
                "min D/J over the scanned family = {} (upper bound for the uniform constant)",
                format_rat(&ratio)
            );
            for (i, p) in achiever.pieces.iter().enumerate() {
                println!(
                    "  piece {i}: c={} lambda=({})",
                    format_rat(&p.c),
                    p.lambda
                        .coords()
                        .iter()
                        .map(format_rat)
                        .collect::<Vec<_>>()
                        .join(",")
                );
            }
            Ok(0)
        }
        Command::Soliton {
            datum,
            direction,
            bracket,
        } => {
            let d = load_datum_file(&datum.datum)?;
            let dir: Vec<f64> = direction
                .split(',')
                .map(|x| {
                    x.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::Invalid(format!("bad direction entry `{x}`")))
                })
                .collect::<Result<_, _>>()?;
            let br: Vec<f64> = bracket
                .split(',')
                .map(|x| {
                    x.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::Invalid(format!("bad bracket entry `{x}`")))
                })
                .collect::<Result<_, _>>()?;
            if br.len() != 2 {
                return Err(Error::Invalid("bracket needs two entries".into()));
            }
            let r = soliton_solve(&d, &dir, (br[0], br[1]), 1e-10)?;
            println!(
                "c* = {:.12} (residual {:.3e}, {} iterations)",
                r.c_star, r.residual, r.iterations
            );
            Ok(0)
        }
        Command::Oracle { op } => match op {
            OracleOp::Hilbert { datum, k } => {
                let d = load_datum_file(&datum.datum)?;
                let h = oracle::hilbert(&d, k)?;
                println!("h0({k}) = {}", format_rat(&h));
                Ok(0)
            }
            OracleOp::Ssums {
                datum,
                tc,
                weight,
                k,
            } => {
                let d = load_datum_file(&datum.datum)?;
                let t = load_tc_file(&d, &tc)?;
                let w = load_weight_file(&weight.weight)?;
                let (s1, s2) = oracle::s_sums(&d, &t, &w, k)?;
                println!("S1({k}) = {}", format_rat(&s1));
                println!("S2({k}) = {}", format_rat(&s2));
                Ok(0)
            }
            OracleOp::Futaki {
                datum,
                tc,
                weight,
                k_min,
                k_max,
            } => {
                let d = load_datum_file(&datum.datum)?;
                let t = load_tc_file(&d, &tc)?;
                let w = load_weight_file(&weight.weight)?;
                let mut ks = Vec::new();
                let mut k = k_min.max(1);
                while k <= k_max {
                    ks.push(k);
                    k *= 2;
                }
                let est = oracle::futaki_estimate(&d, &t, &w, &ks)?;
                println!("F0 = {}", format_rat(&est.f0));
                println!("k        ratio                first-order");
                for row in &est.rows {
                    println!(
                        "{:<8} {:<20.12} {:.12}",
                        row.k,
                        rat_to_f64(&row.ratio),
                        row.first_order
                    );
                }
                println!(
                    "extrapolated F1 = {:.9} (raw {:.9}, cauchy {:.3e})",
                    est.f1, est.raw_f1, est.cauchy
                );
                println!(
                    "closed forms: Fut = {} ; boundary-form = {}",
                    format_rat(&est.closed_fut),
                    format_rat(&est.closed_fut_boundary_form)
                );
                println!("matched normalization: {:?}", est.matched);
                if est.anticanonical_defect != kstab_core::rat::rat_zero() {
                    println!(
                        "note: level counts carry an anticanonical defect of {} \
                         (saturation-assumed datum); the lattice asymptotics drift \
                         from the closed forms accordingly",
                        format_rat(&est.anticanonical_defect)
                    );
                }
                Ok(0)
            }
            OracleOp::Fibre { datum, kvec, chi } => {
                let d = load_datum_file(&datum.datum)?;
                let kv: Vec<usize> = kvec
                    .split(',')
                    .map(|x| {
                        x.trim()
                            .parse::<usize>()
                            .map_err(|_| Error::Invalid(format!("bad kvec entry `{x}`")))
                    })
                    .collect::<Result<_, _>>()?;
                let chi = parse_rat_list(&chi, "chi")?;
                let ok = oracle::fibre_identity_check(&d, &kv, &chi)?;
                println!("fibre identity for k={kv:?}: {}", if ok { "ok" } else { "MISMATCH" });
                Ok(if ok { 0 } else { 1 })
            }
        },
        Command::Dh {
            datum,
            weight,
            axis,
            bins,
            out,
        } => {
            let d = load_datum_file(&datum.datum)?;
            let w = load_weight_file(&weight.weight)?;
            let csv = dh_marginal(&d, &w, axis, bins)?;
            fs::write(&out, csv)?;
            println!("wrote {} bins to {}", bins, out.display());
            Ok(0)
        }
        Command::Selfcheck { seed, cases } => {
            let report = kstab_core::selfcheck::run(seed, cases)?;
            print!("{}", report.render());
            if report.all_passed() {
                println!("selfcheck passed ({cases} cases, seed {seed})");
                Ok(0)
            } else {
                Ok(1)
            }
        }
    }
}

/// Binned marginal of the weighted density `n! ghat pi` along a torus axis:
/// each row holds the exact slab mass and the average density over the bin.
fn dh_marginal(
    datum: &SphericalDatum,
    weight: &WeightFunction,
    axis: usize,
    bins: usize,
) -> Result<String, Error> {
    use kstab_core::geom::{dot, Ineq};
    use kstab_core::quad::{integrate_numeric, integrate_polynomial};

    if axis >= datum.torus_rank() {
        return Err(Error::Invalid(format!(
            "axis {axis} out of range for torus rank {}",
            datum.torus_rank()
        )));
    }
    if bins == 0 {
        return Err(Error::Invalid("need at least one bin".into()));
    }
    let poly = datum.polytope();
    let vertices = poly.vertices()?;
    let xi = &datum.torus[axis];
    let chi = &datum.chi[axis];
    let theta_of = |v: &kstab_core::Point| dot(xi.coords(), v.coords()) + chi;
    let lo = vertices.iter().map(theta_of).min().unwrap();
    let hi = vertices.iter().map(theta_of).max().unwrap();
    let width = (&hi - &lo) / Rat::from_integer(bins.into());
    if width.le(&Rat::from_integer(0.into())) {
        return Err(Error::Invalid("axis has zero extent".into()));
    }

    let pb = pullback(&weight.conform(datum.torus_rank())?, datum)?;
    let pi = datum.pi_polynomial();
    let nf = kstab_core::rat::factorial(datum.n);

    let mut out = String::from("bin_lo,bin_hi,mass,density\n");
    for b in 0..bins {
        let t0 = &lo + Rat::from_integer(b.into()) * &width;
        let t1 = &t0 + &width;
        // Slab t0 <= theta_axis <= t1.
        let slab = poly.intersect(&[
            Ineq::new(xi.coords().to_vec(), chi - &t0),
            Ineq::new(
                xi.coords().iter().map(|x| -x).collect(),
                &t1 - chi,
            ),
        ]);
        let feasible = slab.is_feasible()
            && matches!(
                slab.vertices().map(|v| kstab_core::geom::affine_rank(&v)),
                Ok(r) if r == poly.dim
            );
        let mass: f64 = if !feasible {
            0.0
        } else {
            match pb.exact_g() {
                Some(g) => {
                    let gpi = g.mul(&pi);
                    rat_to_f64(&(&nf * integrate_polynomial(&slab, &gpi)?))
                }
                None => {
                    let (v, _) = integrate_numeric(
                        &slab,
                        &|x| pb.eval_f64(x) * pi.eval_f64(x),
                        1e-10,
                        24,
                    )?;
                    rat_to_f64(&nf) * v
                }
            }
        };
        out.push_str(&format!(
            "{:.12},{:.12},{:.12},{:.12}\n",
            rat_to_f64(&t0),
            rat_to_f64(&t1),
            mass,
            mass / rat_to_f64(&width)
        ));
    }
    Ok(out)
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                Error::NotConverged(_) | Error::NoConvergence(_) => 3u8,
                _ => 2u8,
            };
            ExitCode::from(code)
        }
    }
}
