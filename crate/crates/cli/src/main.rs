//! `distext`: tadpoles, the Pauli-Villars check, the propagator mass series,
//! test-function profiles, extension samples and the verification suite.

mod output;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand, ValueEnum};
use distext::extend::{extend_uv_form_a, extend_uv_form_b, Alpha, RationalRadial};
use distext::physics::{mass_series_propagator, pv_check, tadpole};
use distext::testfunc::{sample_profile, PUTestFunction};
use distext::verify::{run_suite, GROUPS};
use distext::Error;
use output::{Cell, Document, Format};
use serde_json::json;

const EXIT_VERIFY_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_DOMAIN: u8 = 3;
const EXIT_CONVERGENCE: u8 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "distext",
    version,
    about = "Extensions of singular radial distributions"
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    /// Write to this file instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Omit the run metadata (timestamp) so identical runs give identical bytes.
    #[arg(long, global = true)]
    deterministic: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Scheme {
    #[value(name = "formA")]
    FormA,
    #[value(name = "formA_limit")]
    FormALimit,
    #[value(name = "formB")]
    FormB,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Extended tadpole by quadrature against its closed form.
    Tadpole {
        #[arg(long, value_parser = ["2", "4"])]
        dim: String,
        #[arg(long)]
        mu2: f64,
        #[arg(long, default_value_t = 1.0)]
        m: f64,
    },
    /// Pauli-Villars subtracted integral against the two-dimensional tadpole.
    PvCheck {
        #[arg(long)]
        mu2: f64,
        #[arg(long, default_value_t = 1.0)]
        m: f64,
    },
    /// Mass series of the two-dimensional propagator against K0.
    SeriesK0 {
        #[arg(long, default_value_t = 1.0)]
        m: f64,
        #[arg(long)]
        x: f64,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[arg(long, default_value_t = 60)]
        k_max: u32,
    },
    /// Samples of (X, f>, w, f<) over [0, 1.1 X_max].
    Testfn {
        #[arg(long)]
        mu2: f64,
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 512)]
        samples: usize,
        /// Width of the infrared weight ramp (default mu2 - 1).
        #[arg(long)]
        ir_width: Option<f64>,
    },
    /// Samples of an extended propagator.
    Extend {
        #[arg(long, value_enum, default_value_t = Scheme::FormALimit)]
        scheme: Scheme,
        /// Euclidean dimension; the radial order follows from it.
        #[arg(long, value_parser = ["2", "4"], default_value = "2")]
        dim: String,
        #[arg(long)]
        mu2: f64,
        #[arg(long, default_value_t = 1.0)]
        m: f64,
        /// Required by formA.
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long, default_value_t = 512)]
        samples: usize,
        /// Right end of the sampled range (default: X_max for formA, else 10).
        #[arg(long)]
        x_max: Option<f64>,
    },
    /// Run the identity checks; exits 1 if any fails.
    Verify {
        /// Only run one group of checks.
        #[arg(long, value_parser = GROUPS)]
        filter: Option<String>,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Domain(_) | Error::OrderOverflow { .. } => EXIT_DOMAIN,
        Error::Convergence(_) | Error::NonFinite { .. } => EXIT_CONVERGENCE,
    }
}

struct Outcome {
    doc: Document,
    code: u8,
}

fn run(command: &Command) -> Outcome {
    let mut doc = match command {
        Command::Tadpole { .. } => Document::new(
            "tadpole",
            &[
                "dimension",
                "mu2",
                "m",
                "analytic",
                "quadrature",
                "abs_error",
            ],
        ),
        Command::PvCheck { .. } => Document::new(
            "pv-check",
            &["mu2", "m", "pv_value", "eq17_value", "abs_diff"],
        ),
        Command::SeriesK0 { .. } => Document::new(
            "series-k0",
            &["k", "term", "partial_sum", "reference_k0", "rel_error"],
        ),
        Command::Testfn { .. } => Document::new("testfn", &["x", "f_sup", "w", "f_inf"]),
        Command::Extend { .. } => Document::new("extend", &["x", "value"]),
        Command::Verify { .. } => Document::new(
            "verify",
            &[
                "criterion",
                "group",
                "name",
                "expected",
                "got",
                "tolerance",
                "passed",
            ],
        ),
    };
    match fill(command, &mut doc) {
        Ok(code) => Outcome { doc, code },
        Err(e) => {
            doc.errors.push(e.to_string());
            Outcome {
                code: exit_code(&e),
                doc,
            }
        }
    }
}

fn fill(command: &Command, doc: &mut Document) -> distext::Result<u8> {
    match command {
        Command::Tadpole { dim, mu2, m } => {
            let dim: u32 = dim.parse().expect("validated by clap");
            doc.param("dim", dim);
            doc.param("mu2", *mu2);
            doc.param("m", *m);
            let t = tadpole(dim, *mu2, *m)?;
            doc.push(vec![
                Cell::Int(t.dimension.into()),
                t.mu2.into(),
                t.m.into(),
                t.analytic_value.into(),
                t.quadrature_value.into(),
                t.abs_error.into(),
            ]);
        }
        Command::PvCheck { mu2, m } => {
            doc.param("mu2", *mu2);
            doc.param("m", *m);
            let r = pv_check(*mu2, *m)?;
            doc.push(vec![
                r.mu2.into(),
                r.m.into(),
                r.pv_value.into(),
                r.eq_value.into(),
                r.abs_diff.into(),
            ]);
        }
        Command::SeriesK0 { m, x, tol, k_max } => {
            doc.param("m", *m);
            doc.param("x", *x);
            doc.param("tol", *tol);
            doc.param("k_max", *k_max);
            let s = mass_series_propagator(*m, *x, *tol, *k_max)?;
            let mut partial = 0.0;
            for (k, &term) in s.terms.iter().enumerate() {
                partial += term;
                doc.push(vec![
                    Cell::Int(k as i64),
                    term.into(),
                    partial.into(),
                    s.reference_k0.into(),
                    ((partial - s.reference_k0) / s.reference_k0).abs().into(),
                ]);
            }
        }
        Command::Testfn {
            mu2,
            alpha,
            samples,
            ir_width,
        } => {
            doc.param("mu2", *mu2);
            doc.param("alpha", *alpha);
            doc.param("samples", *samples);
            let mut pu = PUTestFunction::new(*mu2, *alpha)?;
            if let Some(w) = ir_width {
                pu = pu.with_ir_width(*w)?;
            }
            doc.param("ir_width", pu.ir_width());
            doc.param("x_max", pu.x_max());
            for s in sample_profile(&pu, *samples)? {
                doc.push(vec![s.x.into(), s.f_sup.into(), s.w.into(), s.f_inf.into()]);
            }
        }
        Command::Extend {
            scheme,
            dim,
            mu2,
            m,
            alpha,
            samples,
            x_max,
        } => {
            let dim: u32 = dim.parse().expect("validated by clap");
            let d = dim / 2;
            let k = d - 1;
            let m2 = m * m;
            let t = RationalRadial::propagator(m2, m2)?;
            let ext = match scheme {
                Scheme::FormA => {
                    let a = alpha
                        .ok_or_else(|| Error::Domain("formA needs --alpha in (0, 1)".into()))?;
                    extend_uv_form_a(&t, d, k, *mu2, Alpha::Value(a))?
                }
                Scheme::FormALimit => extend_uv_form_a(&t, d, k, *mu2, Alpha::Limit)?,
                Scheme::FormB => extend_uv_form_b(&t, d, k, *mu2)?,
            };
            let meta = ext.meta();
            let upper = x_max.unwrap_or(if ext.support_end().is_finite() {
                ext.support_end()
            } else {
                10.0
            });
            doc.param("scheme", meta.scheme.name());
            doc.param("dim", dim);
            doc.param("d", d);
            doc.param("k", k);
            doc.param("mu2", *mu2);
            doc.param("m", *m);
            doc.param("alpha", meta.alpha);
            doc.param("samples", *samples);
            doc.param("x_max", upper);
            for (x, v) in ext.sample(*samples, upper)? {
                doc.push(vec![x.into(), v.into()]);
            }
        }
        Command::Verify { filter } => {
            doc.param("filter", filter.clone());
            let rows = run_suite(filter.as_deref())?;
            let mut all_passed = true;
            for r in rows {
                all_passed &= r.passed;
                if let Some(e) = &r.error {
                    doc.errors.push(format!("{}: {e}", r.name));
                }
                doc.push(vec![
                    Cell::Int(r.criterion.into()),
                    r.group.into(),
                    r.name.into(),
                    r.expected.into(),
                    r.got.into(),
                    r.tolerance.into(),
                    r.passed.into(),
                ]);
            }
            if !all_passed {
                return Ok(EXIT_VERIFY_FAILED);
            }
        }
    }
    Ok(0)
}

fn metadata() -> serde_json::Value {
    let now = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    json!({
        "version": env!("CARGO_PKG_VERSION"),
        "parallel": distext::par::is_parallel(),
        "generated_unix": now,
    })
}

fn emit(cli: &Cli, doc: &Document) -> io::Result<()> {
    let mut sink: Box<dyn Write> = match &cli.out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    match cli.format {
        Format::Csv => doc.write_csv(&mut sink).map_err(io::Error::other)?,
        Format::Json => {
            let meta = (!cli.deterministic).then(metadata);
            serde_json::to_writer_pretty(&mut sink, &doc.to_json(meta))?;
            writeln!(sink)?;
        }
    }
    sink.flush()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let Outcome { doc, code } = run(&cli.command);
    for e in &doc.errors {
        eprintln!("distext {}: {e}", doc.command);
    }
    if code == EXIT_VERIFY_FAILED {
        let failed = doc
            .rows
            .iter()
            .filter(|r| r.last() == Some(&Cell::Bool(false)))
            .count();
        eprintln!(
            "distext verify: {failed} of {} checks failed",
            doc.rows.len()
        );
    }
    if let Err(e) = emit(&cli, &doc) {
        eprintln!("distext: cannot write output: {e}");
        return ExitCode::from(EXIT_USAGE);
    }
    ExitCode::from(code)
}
