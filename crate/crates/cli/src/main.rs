//! `irrnet`: generate, verify and measure point sets in quadratic irrational bases.
//!
//! Exit codes: 0 success, 1 property failure, 2 usage error, 3 bad input.

use std::fs::File;
use std::io::{self, BufReader, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use irrnet_core::discrepancy::{hammersley_table, star_1d, star_2d_auto, DiscResult};
use irrnet_core::equidist::{net_t_with, Threshold};
use irrnet_core::generators::{
    hammersley, hammersley_dyadic, read_pointset_csv, seed_from_floats, vdc_sequence, vdc_set,
    weak12, write_pointset_csv, PointSet,
};
use irrnet_core::numeration::{g_count, BaseSpec};
use irrnet_core::Error;

#[derive(Parser)]
#[command(
    name = "irrnet",
    version,
    about = "Digital nets and discrepancy in quadratic irrational bases"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a point set as CSV
    Generate {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Find the smallest t for which a point set is a (t,m,s)-net
    Verify {
        #[command(flatten)]
        source: Source,
        /// Exit 0 only if the set is a (t,m,s)-net
        #[arg(long, default_value_t = 0)]
        t: usize,
        /// Bound the plain level sum instead of rho
        #[arg(long)]
        strict_rho: bool,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Star discrepancy of a point set
    Disc {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        no_normalize: bool,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Normalized star discrepancy of Hammersley sets for m = 1..=M
    Table {
        #[arg(long, value_parser = parse_base, default_value = "phi")]
        base: BaseSpec,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        no_normalize: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Source {
    /// Read a point-set CSV instead of constructing one
    #[arg(long, conflicts_with_all = ["construction", "m", "count"])]
    input: Option<PathBuf>,
    #[arg(long, value_enum)]
    construction: Option<Construction>,
    /// `phi` or `p,q` with 1 <= q <= p <= 9
    #[arg(long, value_parser = parse_base, default_value = "phi")]
    base: BaseSpec,
    #[arg(long)]
    m: Option<usize>,
    /// Number of van der Corput terms
    #[arg(long)]
    count: Option<usize>,
    #[arg(long, requires = "seed_y")]
    seed_x: Option<f64>,
    #[arg(long, requires = "seed_x")]
    seed_y: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Construction {
    Vdc,
    Hammersley,
    Weak12,
    Dyadic,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

fn parse_base(s: &str) -> Result<BaseSpec, String> {
    if s.eq_ignore_ascii_case("phi") {
        return Ok(BaseSpec::phi());
    }
    let (p, q) = s
        .split_once(',')
        .ok_or_else(|| format!("expected `phi` or `p,q`, got {s:?}"))?;
    let p: u32 = p.trim().parse().map_err(|_| format!("bad p in {s:?}"))?;
    let q: u32 = q.trim().parse().map_err(|_| format!("bad q in {s:?}"))?;
    BaseSpec::new(p, q).map_err(|e| e.to_string())
}

/// An error paired with the exit code it maps to.
struct Failure {
    code: u8,
    msg: String,
}

impl Failure {
    fn usage(e: impl ToString) -> Self {
        Failure {
            code: 2,
            msg: e.to_string(),
        }
    }

    fn input(e: impl ToString) -> Self {
        Failure {
            code: 3,
            msg: e.to_string(),
        }
    }
}

type Outcome = Result<u8, Failure>;

struct Loaded {
    set: PointSet,
    from_file: bool,
}

impl Loaded {
    /// Maps a library error to usage (inline construction) or input (file) failure.
    fn fail(&self, e: Error) -> Failure {
        if self.from_file {
            Failure::input(e)
        } else {
            Failure::usage(e)
        }
    }
}

fn load(src: &Source) -> Result<Loaded, Failure> {
    if let Some(path) = &src.input {
        let file =
            File::open(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
        let loaded = read_pointset_csv(BufReader::new(file))
            .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
        for w in &loaded.warnings {
            eprintln!("warning: {w}");
        }
        return Ok(Loaded {
            set: loaded.set,
            from_file: true,
        });
    }
    let construction = src
        .construction
        .ok_or_else(|| Failure::usage("give --input or --construction"))?;
    let need_m = || {
        src.m
            .ok_or_else(|| Failure::usage("--m is required for this construction"))
    };
    let base = src.base;
    let set = match construction {
        Construction::Vdc => match (src.count, src.m) {
            (Some(n), _) => {
                let mut m = 0;
                while g_count(&base, m).map_err(Failure::usage)? < n as u64 {
                    m += 1;
                }
                let terms = vdc_sequence(&base, n).map_err(Failure::usage)?;
                PointSet::new(base, 1, m, terms.into_iter().map(|x| vec![x]).collect())
            }
            (None, Some(m)) => vdc_set(&base, m).map_err(Failure::usage)?,
            (None, None) => return Err(Failure::usage("vdc needs --count or --m")),
        },
        Construction::Hammersley => hammersley(&base, need_m()?).map_err(Failure::usage)?,
        Construction::Weak12 => {
            if !base.is_phi() {
                return Err(Failure::usage("weak12 is defined for --base phi only"));
            }
            let seed = match (src.seed_x, src.seed_y) {
                (Some(x), Some(y)) => Some(seed_from_floats(x, y).map_err(Failure::usage)?),
                _ => None,
            };
            weak12(need_m()?, seed).map_err(Failure::usage)?
        }
        Construction::Dyadic => {
            let m = need_m()?;
            if m > 24 {
                return Err(Failure::usage("dyadic sets are limited to m <= 24"));
            }
            hammersley_dyadic(m)
        }
    };
    Ok(Loaded {
        set,
        from_file: false,
    })
}

fn sink(out: &Option<PathBuf>) -> Result<Box<dyn Write>, Failure> {
    Ok(match out {
        Some(p) => {
            Box::new(File::create(p).map_err(|e| Failure::usage(format!("{}: {e}", p.display())))?)
        }
        None => Box::new(io::stdout().lock()),
    })
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.16e}")).unwrap_or_default()
}

fn disc_csv(r: &DiscResult, normalized: bool) -> String {
    let w = r.witness;
    format!(
        "N,value,normalized,witness_x,witness_y,witness_kind\n{},{:.16e},{},{},{},{}\n",
        r.n,
        r.value,
        if normalized {
            fmt_opt(r.normalized)
        } else {
            String::new()
        },
        fmt_opt(w.map(|w| w.x)),
        fmt_opt(w.and_then(|w| w.y)),
        match (w, r.bound) {
            (_, true) => "bound".to_string(),
            (Some(w), false) => format!("{:?}", w.kind).to_lowercase(),
            (None, false) => String::new(),
        }
    )
}

fn run(cli: Cli) -> Outcome {
    irrnet_core::init_threads_from_env().map_err(Failure::usage)?;
    match cli.command {
        Command::Generate { source, out } => {
            let loaded = load(&source)?;
            let mut w = sink(&out)?;
            write_pointset_csv(&loaded.set, &mut w, true).map_err(Failure::usage)?;
            Ok(0)
        }
        Command::Verify {
            source,
            t,
            strict_rho,
            format,
            out,
        } => {
            let loaded = load(&source)?;
            let threshold = if strict_rho {
                Threshold::LevelSum
            } else {
                Threshold::Rho
            };
            let report = net_t_with(&loaded.set, threshold).map_err(|e| loaded.fail(e))?;
            let mut w = sink(&out)?;
            let text = match format {
                Format::Json => report.to_json().map_err(Failure::usage)? + "\n",
                Format::Csv => {
                    let mut s = String::from("kvec,passed,failures\n");
                    for c in &report.checks {
                        let k: Vec<String> = c.kvec.iter().map(|k| k.to_string()).collect();
                        s += &format!("{},{},{}\n", k.join(" "), c.passed, c.failures.len());
                    }
                    s
                }
            };
            w.write_all(text.as_bytes()).map_err(Failure::usage)?;
            if let Some(worst) = &report.worst {
                if report.t_min > t {
                    if let Some(f) = worst.failures.first() {
                        eprintln!(
                            "t_min = {}: cell {:?} of the {:?}-partition holds {} points, needs {}",
                            report.t_min, f.interval.numerators, worst.kvec, f.actual, f.expected
                        );
                    }
                }
            }
            Ok(if report.t_min <= t { 0 } else { 1 })
        }
        Command::Disc {
            source,
            no_normalize,
            format,
            out,
        } => {
            let loaded = load(&source)?;
            let r = match loaded.set.s {
                1 => {
                    let xs: Vec<f64> = loaded.set.floats().into_iter().map(|p| p[0]).collect();
                    star_1d(&xs)
                }
                2 => loaded.set.pairs().and_then(|p| star_2d_auto(&p)),
                s => Err(Error::Domain(format!(
                    "star discrepancy supports s <= 2, got {s}"
                ))),
            }
            .map_err(|e| loaded.fail(e))?;
            let mut w = sink(&out)?;
            let text = match format {
                Format::Csv => disc_csv(&r, !no_normalize),
                Format::Json => {
                    let mut r = r;
                    if no_normalize {
                        r.normalized = None;
                    }
                    irrnet_core::discrepancy::to_json(&r).map_err(Failure::usage)? + "\n"
                }
            };
            w.write_all(text.as_bytes()).map_err(Failure::usage)?;
            Ok(0)
        }
        Command::Table {
            base,
            m,
            no_normalize,
            out,
        } => {
            let rows = hammersley_table(&base, m).map_err(Failure::usage)?;
            let mut w = sink(&out)?;
            let mut text = if no_normalize {
                String::from("N,star,kind\n")
            } else {
                String::from("N,normalized_star,kind\n")
            };
            for r in rows {
                let v = if no_normalize { r.value } else { r.normalized };
                let kind = if r.bound { "bound" } else { "exact" };
                text += &format!("{},{v:.6},{kind}\n", r.n);
            }
            w.write_all(text.as_bytes()).map_err(Failure::usage)?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
