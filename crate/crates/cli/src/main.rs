//! `qcpn`: pairings, relation and projection checks, spectra and commutator
//! norms for quantum projective spaces, with machine-readable reports.
//!
//! Exit status: 0 when every requested check passes, 1 when a check fails,
//! 2 when the invocation itself is invalid.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde_json::{json, Value};

use qcpn::dirac::{commutator_norm, fit_polynomial, multiplicity_formula, spectrum, spectrum_csv, NormEstimate};
use qcpn::khomology::pairing;
use qcpn::ktheory::{projection, qtrace, verify_projection};
use qcpn::ncalgebra::relations::{check_overlaps, sphere_relations, verify_cp_relations};
use qcpn::repspace::{rep_raw, Scalar, SparseOperator, Surd, TruncatedSpace};

/// Relative drift allowed between the last two cutoffs of a norm sweep.
const NORM_DRIFT: f64 = 0.01;
/// Float-mode tolerance for represented relation residuals.
const FLOAT_TOLERANCE: f64 = 1e-12;

#[derive(Parser)]
#[command(name = "qcpn", version, about = "Quantum projective space computations")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Index pairing of the level-k Fredholm module with P_{-N}.
    Pair {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long = "N")]
        big_n: u32,
        /// Deformation parameter, as a float or a fraction such as 1/2.
        #[arg(long, default_value = "0.5")]
        q: String,
        /// Box side; by default the smallest one certifying a tail below 1e-6.
        #[arg(long)]
        cutoff: Option<u32>,
    },
    /// Normal-form residuals of the sphere and projective relations.
    VerifyRelations {
        #[arg(long)]
        n: usize,
        /// Index tuples checked per projective family before sampling.
        #[arg(long, default_value_t = 4096)]
        sample: usize,
        /// Also check the represented sphere relations at this q; a fraction
        /// selects exact arithmetic.
        #[arg(long)]
        q: Option<String>,
        #[arg(long, default_value_t = 6)]
        cutoff: u32,
    },
    /// Isometry, idempotence and self-adjointness of P_N.
    VerifyProjection {
        #[arg(long = "N", allow_negative_numbers = true)]
        big_n: i64,
        #[arg(long)]
        n: usize,
    },
    /// Multiplicities of the Dirac eigenvalues lambda^{n/d}.
    Spectrum {
        #[arg(long)]
        n: usize,
        /// Summability parameter; defaults to n.
        #[arg(long)]
        d: Option<f64>,
        #[arg(long, default_value_t = 20)]
        lambda_max: u64,
        /// Box side for the enumeration; defaults to lambda-max.
        #[arg(long)]
        cutoff: Option<u32>,
    },
    /// Norms of [D, pi(p_ij)] for every generator across cutoffs.
    Commutators {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "0.5")]
        q: String,
        #[arg(long, value_delimiter = ',', default_values_t = [40u32, 80])]
        cutoffs: Vec<u32>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

enum Failure {
    Config(String),
    Check(String),
}

impl From<qcpn::Error> for Failure {
    fn from(e: qcpn::Error) -> Self {
        match e {
            qcpn::Error::Uncertified { .. } => Failure::Check(e.to_string()),
            other => Failure::Config(other.to_string()),
        }
    }
}

struct Report {
    body: String,
    passed: bool,
}

enum Deformation {
    Exact(BigRational),
    Float(f64),
}

impl Deformation {
    fn parse(s: &str) -> Result<Self, Failure> {
        let q = if let Ok(r) = s.parse::<BigRational>() {
            Surd::check_param(&r)?;
            Deformation::Exact(r)
        } else {
            let x: f64 = s
                .parse()
                .map_err(|_| Failure::Config(format!("cannot parse q = {s:?}")))?;
            f64::check_param(&x)?;
            Deformation::Float(x)
        };
        Ok(q)
    }

    fn value(&self) -> f64 {
        match self {
            Deformation::Exact(r) => Surd::param_to_f64(r),
            Deformation::Float(x) => *x,
        }
    }
}

fn render_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

fn no_csv(format: Format, command: &str) -> Result<(), Failure> {
    if format == Format::Csv {
        return Err(Failure::Config(format!("{command} has no csv output")));
    }
    Ok(())
}

fn pair(n: usize, k: usize, big_n: u32, q: &str, cutoff: Option<u32>, format: Format) -> Result<Report, Failure> {
    let q0 = Deformation::parse(q)?.value();
    if k > n {
        return Err(Failure::Config(format!("level k = {k} exceeds n = {n}")));
    }
    if cutoff == Some(0) {
        return Err(Failure::Config("cutoff must be at least 1".into()));
    }
    let r = pairing(n, k, big_n, q0, cutoff)?;
    let expected = num_integer::binomial(big_n as u64, k as u64);
    let passed = r.certified && r.rounded == expected as i64;
    let body = match format {
        Format::Json => {
            let mut v = serde_json::to_value(&r).expect("pairing serializes");
            v["schema"] = json!("qcpn.pair/1");
            v["expected"] = json!(expected);
            render_json(&v)
        }
        Format::Csv => format!(
            "n,k,N,q,cutoff,value,tail,rounded,certified,expected\n{},{},{},{},{},{},{},{},{},{}\n",
            r.n, r.k, r.big_n, r.q, r.cutoff, r.value, r.tail, r.rounded, r.certified, expected
        ),
        Format::Text => format!(
            "<mu_{k}, P_-{big_n}> on CP^{n} at q = {q0}\nvalue    {}\ntail     {:e}\nrounded  {}\ncertified {}\nexpected {expected}\ncutoff   {}\n",
            r.value, r.tail, r.rounded, r.certified, r.cutoff
        ),
    };
    Ok(Report { body, passed })
}

/// Represented sphere relations on interior box vectors at every level.
fn represented<S: Scalar>(n: usize, cutoff: u32, q: &S::Param, tolerance: f64) -> Result<(usize, Vec<String>), Failure> {
    let space = TruncatedSpace::new(n, cutoff)?;
    let mut checked = 0;
    let mut failures = Vec::new();
    for rel in sphere_relations(n) {
        for k in 0..=n {
            let op: SparseOperator<S> = rep_raw(&rel.difference(), k, &space, q)?;
            let inner = op.restrict_cols(|c| space.is_interior(space.index(c), 1));
            checked += 1;
            let bad = if tolerance == 0.0 {
                !inner.is_zero()
            } else {
                inner.max_abs() > tolerance
            };
            if bad {
                failures.push(format!("{} at level {k}", rel.label));
            }
        }
    }
    Ok((checked, failures))
}

fn verify_relations(n: usize, sample: usize, q: Option<&str>, cutoff: u32, format: Format) -> Result<Report, Failure> {
    no_csv(format, "verify-relations")?;
    if cutoff < 2 {
        return Err(Failure::Config("cutoff must be at least 2 to leave interior vectors".into()));
    }
    let q = q.map(Deformation::parse).transpose()?;
    let sphere = sphere_relations(n);
    let mut sphere_failures = Vec::new();
    for rel in &sphere {
        if !rel.residual()?.is_zero() {
            sphere_failures.push(rel.label.clone());
        }
    }
    let projective = if n >= 1 { Some(verify_cp_relations(n, sample)?) } else { None };
    let overlaps = check_overlaps(n)?;
    let rep = match &q {
        None => None,
        Some(Deformation::Exact(r)) => Some(("exact", 0.0, represented::<Surd>(n, cutoff, r, 0.0)?)),
        Some(Deformation::Float(x)) => Some(("float", FLOAT_TOLERANCE, represented::<f64>(n, cutoff, x, FLOAT_TOLERANCE)?)),
    };
    let passed = sphere_failures.is_empty()
        && projective.as_ref().is_none_or(|p| p.is_clean())
        && overlaps.unresolved.is_empty()
        && rep.as_ref().is_none_or(|(_, _, (_, f))| f.is_empty());
    let v = json!({
        "schema": "qcpn.relations/1",
        "n": n,
        "sphere": {"checked": sphere.len(), "nonzero": sphere_failures.len(), "failures": sphere_failures},
        "projective": projective,
        "overlaps": overlaps,
        "represented": rep.as_ref().map(|(backend, tol, (checked, failures))| json!({
            "q": q.as_ref().map(Deformation::value),
            "backend": backend,
            "tolerance": tol,
            "cutoff": cutoff,
            "checked": checked,
            "nonzero": failures.len(),
            "failures": failures,
        })),
        "passed": passed,
    });
    let body = match format {
        Format::Text => {
            let mut s = format!("relations for n = {n}\n");
            let _ = writeln!(s, "sphere     {} checked, {} nonzero", sphere.len(), v["sphere"]["nonzero"]);
            if let Some(p) = &projective {
                for f in &p.families {
                    let _ = writeln!(
                        s,
                        "{:<10} {} of {} checked, {} nonzero",
                        format!("{:?}", f.family).to_lowercase(),
                        f.checked,
                        f.total,
                        f.violations.len()
                    );
                }
            }
            let _ = writeln!(s, "overlaps   {} ambiguities, {} unresolved", overlaps.ambiguities, overlaps.unresolved.len());
            if let Some((backend, _, (checked, failures))) = &rep {
                let _ = writeln!(s, "represented ({backend}) {checked} checked, {} nonzero", failures.len());
            }
            s
        }
        _ => render_json(&v),
    };
    Ok(Report { body, passed })
}

fn verify_proj(big_n: i64, n: usize, format: Format) -> Result<Report, Failure> {
    no_csv(format, "verify-projection")?;
    let p = projection(big_n, n)?;
    let report = verify_projection(&p)?;
    let passed = report.is_clean();
    let trace = qtrace(&p).to_string();
    let body = match format {
        Format::Text => format!(
            "P_{big_n} on CP^{n}: size {}\nisometry residual    {}\nidempotent residual  {} ({:?})\nself-adjoint residual {}\nq-trace {trace}\n",
            report.size, report.isometry_residual, report.idempotent_residual, report.square_method, report.selfadjoint_residual
        ),
        _ => {
            let mut v = serde_json::to_value(&report).expect("report serializes");
            v["schema"] = json!("qcpn.projection-check/1");
            v["qtrace"] = json!(trace);
            v["passed"] = json!(passed);
            render_json(&v)
        }
    };
    Ok(Report { body, passed })
}

fn spectrum_cmd(n: usize, d: Option<f64>, lambda_max: u64, cutoff: Option<u32>, format: Format) -> Result<Report, Failure> {
    if n == 0 {
        return Err(Failure::Config("spectrum needs n >= 1".into()));
    }
    let d = d.unwrap_or(n as f64);
    if d.is_nan() || d <= 0.0 {
        return Err(Failure::Config(format!("d must be positive, got {d}")));
    }
    let cutoff = cutoff.unwrap_or(lambda_max.max(1) as u32);
    let counts = spectrum(n, lambda_max, cutoff)?;
    let values: Vec<i64> = counts.iter().map(|&c| c as i64).collect();
    let poly = fit_polynomial(&values);
    let degree = poly.len().checked_sub(1);
    // the fitted degree is only determined when there are more points than n
    let passed = (lambda_max as usize) < n || degree == Some(n - 1);
    let exponent = n as f64 / d;
    let body = match format {
        Format::Csv => spectrum_csv(&counts),
        Format::Text => {
            let mut s = format!("|D| spectrum on CP^{n}, d = {d}\n");
            for (l, c) in counts.iter().enumerate() {
                let _ = writeln!(s, "{:>4} {:>12} {c}", l, (l as f64).powf(exponent));
            }
            let _ = writeln!(s, "degree {}", degree.map_or("none".into(), |e| e.to_string()));
            s
        }
        Format::Json => render_json(&json!({
            "schema": "qcpn.spectrum/1",
            "n": n,
            "d": d,
            "cutoff": cutoff,
            "rows": counts.iter().enumerate().map(|(l, c)| json!({
                "lambda": l,
                "eigenvalue": (l as f64).powf(exponent),
                "multiplicity": c,
                "compositions": multiplicity_formula(n, l as u64),
            })).collect::<Vec<_>>(),
            "degree": degree,
            "polynomial": poly.iter().map(ToString::to_string).collect::<Vec<_>>(),
            "passed": passed,
        })),
    };
    Ok(Report { body, passed })
}

fn commutators(n: usize, q: &str, cutoffs: &[u32], seed: u64, format: Format) -> Result<Report, Failure> {
    let q0 = Deformation::parse(q)?.value();
    if n == 0 {
        return Err(Failure::Config("commutators need n >= 1".into()));
    }
    if cutoffs.is_empty() || cutoffs.contains(&0) {
        return Err(Failure::Config("cutoffs must be a nonempty list of positive sides".into()));
    }
    let mut rows: Vec<(usize, usize, Vec<NormEstimate>, bool)> = Vec::new();
    for i in 0..=n {
        for j in 0..=n {
            let norms = commutator_norm(i, j, n, q0, cutoffs, seed)?;
            let stable = match norms.as_slice() {
                [.., a, b] => (a.norm - b.norm).abs() <= NORM_DRIFT * a.norm.max(b.norm),
                _ => true,
            };
            let ok = stable && norms.iter().all(|e| e.converged);
            rows.push((i, j, norms, ok));
        }
    }
    let passed = rows.iter().all(|r| r.3);
    let body = match format {
        Format::Csv => {
            let mut s = String::from("i,j,cutoff,norm,iterations,converged\n");
            for (i, j, norms, _) in &rows {
                for e in norms {
                    let _ = writeln!(s, "{i},{j},{},{},{},{}", e.cutoff, e.norm, e.iterations, e.converged);
                }
            }
            s
        }
        Format::Text => {
            let mut s = format!("||[D, pi(p_ij)]|| on CP^{n} at q = {q0}\n");
            for (i, j, norms, ok) in &rows {
                let list: Vec<String> = norms.iter().map(|e| format!("{}:{:.9}", e.cutoff, e.norm)).collect();
                let _ = writeln!(s, "p_{i}{j} {} {}", list.join(" "), if *ok { "stable" } else { "UNSTABLE" });
            }
            s
        }
        Format::Json => render_json(&json!({
            "schema": "qcpn.commutators/1",
            "n": n,
            "q": q0,
            "seed": seed,
            "cutoffs": cutoffs,
            "generators": rows.iter().map(|(i, j, norms, ok)| json!({
                "i": i, "j": j, "norms": norms, "stable": ok,
            })).collect::<Vec<_>>(),
            "passed": passed,
        })),
    };
    Ok(Report { body, passed })
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("QCPN_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t >= 1)
        .ok_or_else(|| Failure::Config(format!("QCPN_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure::Config(e.to_string()))
}

fn run(cli: &Cli) -> Result<Report, Failure> {
    configure_threads()?;
    match &cli.command {
        Command::Pair { n, k, big_n, q, cutoff } => pair(*n, *k, *big_n, q, *cutoff, cli.format),
        Command::VerifyRelations { n, sample, q, cutoff } => verify_relations(*n, *sample, q.as_deref(), *cutoff, cli.format),
        Command::VerifyProjection { big_n, n } => verify_proj(*big_n, *n, cli.format),
        Command::Spectrum { n, d, lambda_max, cutoff } => spectrum_cmd(*n, *d, *lambda_max, *cutoff, cli.format),
        Command::Commutators { n, q, cutoffs, seed } => commutators(*n, q, cutoffs, *seed, cli.format),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            if let Some(path) = &cli.output {
                if let Err(e) = std::fs::write(path, &report.body) {
                    eprintln!("qcpn: cannot write {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            } else {
                print!("{}", report.body);
            }
            if report.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Config(msg)) => {
            eprintln!("qcpn: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Check(msg)) => {
            eprintln!("qcpn: {msg}");
            ExitCode::from(1)
        }
    }
}
