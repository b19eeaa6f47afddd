//! Argument parsing and command execution for the `ktrunc` binary.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::error::{invalid, Error, Result};
use crate::figures::{emit_bands, emit_interlock, emit_multtable, emit_slopes, Figure, FiguresConfig};
use crate::functoriality::{pi_star_oracle, pi_star_r_max, report, TowerMapQuery};
use crate::kgroups::{band_length, check_equivalence, k_closed_form, k_witt_form};
use crate::mult::{mult_table, theorem, Fixed, GeneratorDescriptor, Parity, TableMode};
use crate::oracle::{
    auto_r_max, build_band, integral_cohomology, modp_cohomology_of, build_band_mod_p, BandSpec, ProductOracle,
};
use crate::padic::Prime;
use crate::verify::{self, Scale};

pub const SCHEMA_VERSION: u64 = 1;

/// Overrides the default output directory for figures and matrix dumps.
pub const OUT_DIR_ENV: &str = "KTRUNC_OUT_DIR";

#[derive(Debug, Parser)]
#[command(name = "ktrunc", version, about = "K-groups of k[x]/x^e with Z_p coefficients")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormArg {
    Closed,
    Witt,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Aa,
    Ab,
}

impl From<ModeArg> for TableMode {
    fn from(m: ModeArg) -> TableMode {
        match m {
            ModeArg::Aa => TableMode::Aa,
            ModeArg::Ab => TableMode::Ab,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FigureKind {
    Slopes,
    Bands,
    Interlock,
    Multtable,
    /// Every figure listed in the figure config.
    All,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Band lengths of K_{2i-1}(k[x]/x^e; Z_p).
    Kgroup {
        #[arg(short)]
        p: u64,
        #[arg(short)]
        e: u64,
        #[arg(short)]
        i: u64,
        #[arg(long, value_enum, default_value = "closed")]
        form: FormArg,
    },
    /// ℓ, ℓ′ and the vanishing criterion for π: k[x]/x^m → k[x]/x^n on band j.
    Functorial {
        #[arg(short)]
        p: u64,
        #[arg(short)]
        m: u64,
        #[arg(short)]
        n: u64,
        #[arg(short)]
        i: u64,
        #[arg(short)]
        j: u64,
        /// Also run the chain-map oracle.
        #[arg(long)]
        oracle: bool,
    },
    /// One product (all four indices) or a grid (a fixed j pair or i pair).
    Mult {
        #[arg(long, value_enum)]
        mode: ModeArg,
        #[arg(short)]
        p: u64,
        #[arg(short)]
        e: u64,
        #[arg(long)]
        i1: Option<u64>,
        #[arg(long)]
        j1: Option<u64>,
        #[arg(long)]
        i2: Option<u64>,
        #[arg(long)]
        j2: Option<u64>,
        /// Grid axes run over 1..=range.
        #[arg(long, default_value_t = 20)]
        range: u64,
        /// Also run the product oracle (single products only).
        #[arg(long)]
        oracle: bool,
    },
    /// Write a figure as SVG and CSV.
    Figure {
        #[arg(value_enum)]
        kind: FigureKind,
        #[arg(short, default_value_t = 2)]
        p: u64,
        #[arg(short, default_value_t = 2)]
        e: u64,
        #[arg(short, default_value_t = 2)]
        i: u64,
        #[arg(short, default_value_t = 12)]
        m: u64,
        #[arg(short, default_value_t = 11)]
        n: u64,
        #[arg(long, default_value_t = 300)]
        i_max: u64,
        #[arg(long, default_value_t = 180)]
        j_max: u64,
        #[arg(long, default_value_t = 4)]
        e_max: u64,
        #[arg(long, default_value_t = 12)]
        d_max: u64,
        #[arg(long, default_value_t = 3)]
        r_max: u32,
        #[arg(long, value_enum, default_value = "aa")]
        mode: ModeArg,
        #[arg(long)]
        j1: Option<u64>,
        #[arg(long)]
        j2: Option<u64>,
        #[arg(long)]
        i1: Option<u64>,
        #[arg(long)]
        i2: Option<u64>,
        #[arg(long, default_value_t = 40)]
        range: u64,
        /// Figure config for `all`; defaults to the bundled one.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the property suites.
    Verify {
        #[arg(long)]
        quick: bool,
        /// Only suites whose name contains this string.
        #[arg(long)]
        suite: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// Integral and mod-p cohomology of one band complex.
    Band {
        #[arg(short)]
        p: u64,
        #[arg(short)]
        e: u64,
        #[arg(short)]
        i: u64,
        #[arg(short)]
        j: u64,
        #[arg(long)]
        r_max: Option<usize>,
        /// Write δ0 and δ1 as CSV into this directory.
        #[arg(long)]
        dump_matrices: Option<PathBuf>,
    },
}

/// What a command printed, and whether a property check failed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub property_failed: bool,
}

impl Outcome {
    fn ok(stdout: String) -> Outcome {
        Outcome { stdout, property_failed: false }
    }
}

fn versioned(mut v: Value) -> Value {
    if let Value::Object(map) = &mut v {
        map.insert("schema_version".into(), json!(SCHEMA_VERSION));
    }
    v
}

fn pretty(v: &Value) -> String {
    // serde_json keeps map keys sorted, so output is stable
    serde_json::to_string_pretty(v).expect("JSON values serialize") + "\n"
}

fn out_dir(flag: Option<&Path>) -> PathBuf {
    if let Some(dir) = flag {
        return dir.to_path_buf();
    }
    std::env::var_os(OUT_DIR_ENV).map_or_else(|| PathBuf::from("figures"), PathBuf::from)
}

pub fn execute(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Kgroup { p, e, i, form } => kgroup(Prime::new(*p)?, *e, *i, *form),
        Command::Functorial { p, m, n, i, j, oracle } => {
            let q = TowerMapQuery::new(Prime::new(*p)?, *m, *n, *i, *j)?;
            let mut v = serde_json::to_value(report(&q)).expect("report serializes");
            if *oracle {
                let o = pi_star_oracle(&q, pi_star_r_max(&q) + 1)?;
                v["oracle"] = serde_json::to_value(&o).expect("oracle result serializes");
                v["oracle"]["cokernel_length"] = json!(o.cokernel_length());
            }
            Ok(Outcome::ok(pretty(&versioned(v))))
        }
        Command::Mult { mode, p, e, i1, j1, i2, j2, range, oracle } => {
            mult(*mode, Prime::new(*p)?, *e, [*i1, *j1, *i2, *j2], *range, *oracle)
        }
        Command::Figure { .. } => figure(&cli.command),
        Command::Verify { quick, suite, json } => {
            let scale = if *quick { Scale::Quick } else { Scale::Full };
            let reports = verify::run(scale, suite.as_deref())?;
            let failed = reports.iter().any(|r| !r.passed());
            let stdout = if *json {
                pretty(&versioned(json!({ "scale": scale, "suites": reports, "passed": !failed })))
            } else {
                let mut s = String::new();
                for r in &reports {
                    let status = if r.passed() { "PASS" } else { "FAIL" };
                    s.push_str(&format!("{status} {:<24} {:<16} {:>9} checks {:>6} failures\n", r.name, r.module, r.checked, r.failures));
                    if let Some(c) = &r.counterexample {
                        s.push_str(&format!("     first counterexample: {c}\n"));
                    }
                }
                s
            };
            Ok(Outcome { stdout, property_failed: failed })
        }
        Command::Band { p, e, i, j, r_max, dump_matrices } => band(Prime::new(*p)?, *e, *i, *j, *r_max, dump_matrices.as_deref()),
    }
}

fn kgroup(p: Prime, e: u64, i: u64, form: FormArg) -> Result<Outcome> {
    if e == 0 || i == 0 {
        return invalid("e and i must be positive");
    }
    let v = match form {
        FormArg::Closed => k_closed_form(p, e, i).to_json(),
        FormArg::Witt => k_witt_form(p, e, i).to_json(),
        FormArg::Both => {
            let eq = check_equivalence(p, e, i);
            json!({
                "closed": k_closed_form(p, e, i).to_json(),
                "witt": k_witt_form(p, e, i).to_json(),
                "agreement": eq.agree,
                "diffs": serde_json::to_value(&eq.diffs).expect("diffs serialize"),
            })
        }
    };
    Ok(Outcome::ok(pretty(&versioned(v))))
}

fn mult(mode: ModeArg, p: Prime, e: u64, idx: [Option<u64>; 4], range: u64, oracle: bool) -> Result<Outcome> {
    let parity = TableMode::from(mode).parity();
    let v = match idx {
        [Some(i1), Some(j1), Some(i2), Some(j2)] => {
            let g1 = GeneratorDescriptor::new(Parity::A, p, e, i1, j1)?;
            let g2 = GeneratorDescriptor::new(parity, p, e, i2, j2)?;
            let eval = theorem(parity, p, e, i1, j1, i2, j2);
            let mut v = json!({
                "left": g1.to_string(),
                "right": g2.to_string(),
                "operands_exist": [g1.exists, g2.exists],
                "theorem": eval,
            });
            if oracle {
                v["oracle"] = serde_json::to_value(ProductOracle::new().product(&g1, &g2)?).expect("outcome serializes");
            }
            v
        }
        [None, Some(j1), None, Some(j2)] => {
            mult_table(mode.into(), p, e, Fixed::J { j1, j2 }, (1, range), (1, range))?.to_json()
        }
        [Some(i1), None, Some(i2), None] => {
            mult_table(mode.into(), p, e, Fixed::I { i1, i2 }, (1, range), (1, range))?.to_json()
        }
        _ => return invalid("give all of --i1 --j1 --i2 --j2, or just --j1 --j2, or just --i1 --i2"),
    };
    Ok(Outcome::ok(pretty(&versioned(v))))
}

fn figure(cmd: &Command) -> Result<Outcome> {
    let Command::Figure {
        kind, p, e, i, m, n, i_max, j_max, e_max, d_max, r_max, mode, j1, j2, i1, i2, range, config, out,
    } = cmd
    else {
        unreachable!("called with a figure command")
    };
    let p = Prime::new(*p)?;
    let figures: Vec<Figure> = match kind {
        FigureKind::Slopes => vec![emit_slopes(*e_max, *d_max, *i_max, None)?],
        FigureKind::Bands => vec![emit_bands(p, *e, *i, *j_max, *r_max)?],
        FigureKind::Interlock => vec![emit_interlock(p, *m, *n, *i_max, *j_max)?],
        FigureKind::Multtable => {
            let fixed = match (j1, j2, i1, i2) {
                (Some(j1), Some(j2), None, None) => Fixed::J { j1: *j1, j2: *j2 },
                (None, None, Some(i1), Some(i2)) => Fixed::I { i1: *i1, i2: *i2 },
                _ => return invalid("multtable needs --j1 --j2 or --i1 --i2"),
            };
            vec![emit_multtable((*mode).into(), p, *e, fixed, (1, *range), (1, *range))?]
        }
        FigureKind::All => {
            let config = match config {
                Some(path) => FiguresConfig::load(path)?,
                None => FiguresConfig::builtin(),
            };
            config.render_all()?
        }
    };
    let dir = out_dir(out.as_deref());
    let mut stdout = String::new();
    for fig in &figures {
        for path in fig.write(&dir)? {
            stdout.push_str(&format!("{}\n", path.display()));
        }
    }
    Ok(Outcome::ok(stdout))
}

fn band(p: Prime, e: u64, i: u64, j: u64, r_max: Option<usize>, dump: Option<&Path>) -> Result<Outcome> {
    let r = r_max.unwrap_or_else(|| auto_r_max(p, e, i, j));
    let spec = BandSpec::new(p, e, i, j, r)?;
    let complex = build_band(spec)?;
    let integral = integral_cohomology(&complex)?;
    let modp = modp_cohomology_of(&build_band_mod_p(spec)?)?;
    if let Some(dir) = dump {
        fs::create_dir_all(dir)?;
        let stem = format!("band-p{p}-e{e}-i{i}-j{j}-r{r}");
        fs::write(dir.join(format!("{stem}-delta0.csv")), complex.delta0().to_csv())?;
        fs::write(dir.join(format!("{stem}-delta1.csv")), complex.delta1().to_csv())?;
    }
    let v = json!({
        "p": p, "e": e, "i": i, "j": j, "r_max": r,
        "degrees": complex.degrees,
        "h0_rank": integral.h0_rank,
        "h1_length": integral.h1_length,
        "elementary_divisors": integral.elementary_divisors,
        "closed_form_length": band_length(p, e, i, j),
        "modp": { "h0_dim": modp.h0_dim(), "h1_dim": modp.h1_dim(), "h0_basis": modp.h0_basis, "h1_basis": modp.h1_basis },
    });
    Ok(Outcome::ok(pretty(&versioned(v))))
}

/// Parses `args` (without the program name) and returns what would be printed.
pub fn render(args: &[&str]) -> Result<String> {
    let cli = Cli::try_parse_from(std::iter::once("ktrunc").chain(args.iter().copied()))
        .map_err(|err| Error::InvalidInput(err.to_string()))?;
    Ok(execute(&cli)?.stdout)
}

/// Invocations whose stdout must be byte-stable.
pub fn sample_invocations() -> Vec<Vec<&'static str>> {
    vec![
        vec!["kgroup", "-p", "2", "-e", "2", "-i", "1"],
        vec!["kgroup", "-p", "3", "-e", "4", "-i", "5", "--form", "both"],
        vec!["functorial", "-p", "2", "-m", "4", "-n", "2", "-i", "3", "-j", "1", "--oracle"],
        vec!["mult", "--mode", "aa", "-p", "3", "-e", "2", "--j1", "1", "--j2", "2", "--range", "6"],
        vec!["mult", "--mode", "ab", "-p", "3", "-e", "2", "--i1", "2", "--j1", "1", "--i2", "3", "--j2", "1", "--oracle"],
        vec!["band", "-p", "2", "-e", "3", "-i", "2", "-j", "1"],
    ]
}

/// Exit status for an error: 2 usage, 3 property violation, 4 I/O.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InvalidInput(_) => 2,
        Error::PropertyViolation(_) => 3,
        Error::Io(_) => 4,
    }
}
