use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, ensure, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use favest::diagnostics::{bench, random_points, stability_ratios_at, BenchConfig};
use favest::favest::{adjoint_favest, forward_favest, repeat_transform_errors, roundtrip, ScalarPath};
use favest::fields::{FieldName, FieldPart};
use favest::quadrature::{format_rule, gen_gl_tensor, load_rule, verify_exactness};
use favest::{QuadratureRule, TangentFieldSamples};
use favest_cli::{parse_list, read_coefficients, read_samples, write_coefficients, write_samples};

#[derive(Parser)]
#[command(name = "favest", version, about = "Fast vector spherical harmonic transforms")]
struct Cli {
    /// Worker threads (defaults to the available parallelism).
    #[arg(long, global = true, env = "FAVEST_THREADS")]
    threads: Option<usize>,
    /// Seed for randomised utilities.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Quadrature rule utilities.
    #[command(subcommand)]
    Quad(QuadCmd),
    /// Forward transform of a field sampled at the nodes of a rule.
    Fwd {
        #[arg(long)]
        points: PathBuf,
        /// `a`, `b`, `c`, `zero`, or a samples CSV.
        #[arg(long)]
        field: String,
        #[arg(long)]
        degree: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Adjoint transform: evaluate coefficients at points.
    Adj {
        #[arg(long)]
        coeffs: PathBuf,
        #[arg(long)]
        points: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Forward then adjoint, one CSV row per degree.
    Roundtrip {
        #[command(flatten)]
        setup: FieldSetup,
        #[arg(long, default_value = "")]
        degrees: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Errors of two forward/adjoint cycles.
    Repeat {
        #[command(flatten)]
        setup: FieldSetup,
        #[arg(long)]
        degree: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Median timings of the transforms on Gauss–Legendre grids.
    Bench {
        #[arg(long)]
        degrees: String,
        #[arg(long, default_value_t = 5)]
        repetitions: usize,
        #[arg(long, value_enum, default_value_t = PathArg::Fast)]
        path: PathArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Stability ratios over seeded random points.
    Stability {
        #[arg(long)]
        degree: usize,
        #[arg(long)]
        n_list: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum QuadCmd {
    /// Write a Gauss–Legendre tensor rule as `x y z w` rows.
    GenGl {
        #[arg(long, allow_negative_numbers = true)]
        exactness: i64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a rule file for polynomial exactness.
    Check {
        #[arg(long)]
        file: PathBuf,
        #[arg(long)]
        exactness: usize,
    },
}

#[derive(Args)]
struct FieldSetup {
    /// `a`, `b`, `c` or `zero`.
    #[arg(long)]
    field: String,
    /// `gl`, or `design FILE`.
    #[arg(long, num_args = 1..=2, default_values_t = ["gl".to_string()])]
    rule: Vec<String>,
    /// Gauss–Legendre exactness; defaults to `2(L+1)`.
    #[arg(long)]
    exactness: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum PathArg {
    Fast,
    Direct,
}

/// A failed numerical check, reported with exit code 1.
#[derive(Debug)]
struct CheckFailed;

impl std::fmt::Display for CheckFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("check failed")
    }
}

impl std::error::Error for CheckFailed {}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

fn open(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(File::open(path).with_context(|| format!("opening {}", path.display()))?))
}

fn sample_named(name: &str, rule: &QuadratureRule<f64>) -> Result<TangentFieldSamples<f64>> {
    if name.eq_ignore_ascii_case("zero") {
        let n = rule.len();
        return Ok(TangentFieldSamples::new(rule.points().to_vec(), vec![Default::default(); n])?);
    }
    let field: FieldName = name.parse()?;
    Ok(field.build().sample(rule.points(), FieldPart::Full)?)
}

enum RuleChoice {
    Gl,
    Design(QuadratureRule<f64>),
}

impl FieldSetup {
    fn choice(&self) -> Result<RuleChoice> {
        match self.rule.as_slice() {
            [g] if g == "gl" => Ok(RuleChoice::Gl),
            [d, file] if d == "design" => Ok(RuleChoice::Design(load_rule(file)?)),
            other => bail!("--rule expects `gl` or `design FILE`, got {other:?}"),
        }
    }

    fn rule_for(&self, choice: &RuleChoice, l: usize) -> QuadratureRule<f64> {
        match choice {
            RuleChoice::Gl => gen_gl_tensor(self.exactness.unwrap_or(2 * (l + 1))).1,
            RuleChoice::Design(r) => r.clone(),
        }
    }

    fn label(&self) -> &str {
        &self.rule[0]
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::Quad(QuadCmd::GenGl { exactness, out }) => {
            ensure!(exactness >= 0, "exactness must be non-negative, got {exactness}");
            let (_, rule) = gen_gl_tensor::<f64>(exactness as usize);
            let mut w = output(&out)?;
            w.write_all(format_rule(&rule).as_bytes())?;
            w.flush()?;
        }
        Cmd::Quad(QuadCmd::Check { file, exactness }) => {
            let rule = load_rule::<f64>(&file)?;
            let report = verify_exactness(&rule, exactness);
            println!(
                "max_defect={:.3e} exactness={exactness} {}",
                report.max_defect,
                if report.pass { "PASS" } else { "FAIL" }
            );
            if !report.pass {
                return Err(CheckFailed.into());
            }
        }
        Cmd::Fwd { points, field, degree, out } => {
            let rule = load_rule::<f64>(&points)?;
            let samples = if Path::new(&field).is_file() {
                let s = read_samples(open(Path::new(&field))?)?;
                ensure!(s.len() == rule.len(), "samples have {} rows but the rule has {} nodes", s.len(), rule.len());
                for (p, q) in s.points().iter().zip(rule.points()) {
                    ensure!(p.dot(q) > 1.0 - 1e-12, "sample positions do not match the rule's nodes");
                }
                TangentFieldSamples::new(rule.points().to_vec(), s.values().to_vec())?
            } else {
                sample_named(&field, &rule)?
            };
            let coeffs = forward_favest(&samples, &rule, degree, ScalarPath::Auto)?;
            let mut w = output(&out)?;
            write_coefficients(&coeffs, &mut w)?;
            w.flush()?;
        }
        Cmd::Adj { coeffs, points, out } => {
            let c = read_coefficients(open(&coeffs)?)?;
            let rule = load_rule::<f64>(&points)?;
            let s = adjoint_favest(&c, &rule, ScalarPath::Auto)?;
            write_samples(&s, output(&out)?)?;
        }
        Cmd::Roundtrip { setup, degrees, out } => {
            let choice = setup.choice()?;
            let mut w = csv::Writer::from_writer(output(&out)?);
            w.write_record(["field", "rule", "L", "N", "rel_l2", "max_abs"])?;
            for l in parse_list(&degrees)? {
                let rule = setup.rule_for(&choice, l);
                let r = roundtrip(&sample_named(&setup.field, &rule)?, &rule, l)?;
                w.write_record([
                    setup.field.clone(),
                    setup.label().to_string(),
                    l.to_string(),
                    rule.len().to_string(),
                    format!("{:.16e}", r.rel_l2_error),
                    format!("{:.16e}", r.max_error),
                ])?;
            }
            w.flush()?;
        }
        Cmd::Repeat { setup, degree, out } => {
            let choice = setup.choice()?;
            let rule = setup.rule_for(&choice, degree);
            let e = repeat_transform_errors(&sample_named(&setup.field, &rule)?, &rule, degree)?;
            let mut w = csv::Writer::from_writer(output(&out)?);
            w.write_record(["field", "rule", "L", "N", "t1_t0", "t2_t0", "t2_t1", "coeff"])?;
            let mut row = vec![setup.field.clone(), setup.label().to_string(), degree.to_string(), rule.len().to_string()];
            row.extend([e.t1_t0, e.t2_t0, e.t2_t1, e.coeff].iter().map(|x| format!("{x:.16e}")));
            w.write_record(row)?;
            w.flush()?;
        }
        Cmd::Bench { degrees, repetitions, path, out } => {
            let path = match path {
                PathArg::Fast => ScalarPath::Fast,
                PathArg::Direct => ScalarPath::Direct,
            };
            let cfg = BenchConfig { repetitions, threads: cli.threads.unwrap_or(1), path, seed: cli.seed };
            let records = bench(&parse_list(&degrees)?, cfg)?;
            let mut w = csv::Writer::from_writer(output(&out)?);
            w.write_record(["L", "N", "M", "t_fwd", "ratio_fwd", "t_adj", "ratio_adj", "threads", "path"])?;
            let opt = |r: Option<f64>| r.map(|x| format!("{x:.4}")).unwrap_or_default();
            for r in records {
                w.write_record([
                    r.l_max.to_string(),
                    r.n.to_string(),
                    r.m.to_string(),
                    format!("{:.6e}", r.t_fwd),
                    opt(r.ratio_fwd),
                    format!("{:.6e}", r.t_adj),
                    opt(r.ratio_adj),
                    r.threads.to_string(),
                    format!("{:?}", r.path).to_lowercase(),
                ])?;
            }
            w.flush()?;
        }
        Cmd::Stability { degree, n_list, out } => {
            let mut w = csv::Writer::from_writer(output(&out)?);
            w.write_record([
                "L",
                "N",
                "r_hat",
                "r_tilde",
                "r_hat_over_n",
                "r_tilde_over_n",
                "component_hat",
                "component_tilde",
            ])?;
            for (i, n) in parse_list(&n_list)?.into_iter().enumerate() {
                let r = stability_ratios_at(degree, &random_points(n, cli.seed.wrapping_add(i as u64)))?;
                let mut row = vec![r.l_max.to_string(), r.n.to_string()];
                row.extend(
                    [r.r_hat, r.r_tilde, r.r_hat_over_n, r.r_tilde_over_n, r.component_hat, r.component_tilde]
                        .iter()
                        .map(|x| format!("{x:.16e}")),
                );
                w.write_record(row)?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.is::<CheckFailed>() => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
