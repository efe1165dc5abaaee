//! `collage`: validate, expand, internalize and measure collage systems, and
//! compute smallest internal collage systems through an external MAX-SAT
//! solver.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, ensure, Context, Result};
use clap::{Args, Parser, Subcommand};
use collage::decode::{certify, reconstruct, Certificate};
use collage::encode::{encode, write_wcnf, VariableCatalog, WcnfFormat};
use collage::internalize::internalize_with_report;
use collage::model::{expand, parse_system, serialize_system, stats, validate, CollageSystem};
use collage::oracle::{brute_force_chat, sigma};
use collage::solve::solve;

#[derive(Parser, Debug)]
#[command(version, about = "Collage systems and their smallest internal size")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Check a .clg file against every structural invariant.
    Validate { file: PathBuf },
    /// Print the string a .clg file derives.
    Expand {
        file: PathBuf,
        /// Refuse to expand texts longer than this.
        #[arg(long, default_value_t = 1 << 20)]
        limit: usize,
    },
    /// Print size, truncation count, alphabet and grammar-tree counts.
    Stats { file: PathBuf },
    /// Rewrite a system into an internal one deriving the same string.
    Internalize {
        file: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Write the MAX-SAT instance for a text, plus its catalog sidecar.
    Encode {
        #[command(flatten)]
        text: TextArg,
        /// Output WCNF path; the catalog goes to `<OUT>.catalog`.
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long, default_value = "legacy")]
        format: WcnfFormat,
    },
    /// Certify a solver model: re-check, extract, reconstruct.
    Decode {
        /// Solver output with `v` lines.
        model: PathBuf,
        #[arg(long)]
        catalog: PathBuf,
        /// Expected text; checked against the catalog.
        #[arg(long)]
        text: Option<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Encode, run an external solver, and certify its answer.
    Solve {
        text: String,
        #[command(flatten)]
        solver: SolverArg,
        #[arg(long, default_value = "legacy")]
        format: WcnfFormat,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Smallest internal size by exhaustive search (short texts only).
    Oracle { text: String },
    /// Compare solver and exhaustive search on every short text.
    Selftest {
        #[arg(long, default_value_t = 6)]
        max_len: usize,
        #[arg(long, default_value = "ab")]
        alphabet: String,
        #[command(flatten)]
        solver: SolverArg,
    },
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct TextArg {
    text: Option<String>,
    /// Read the text from a file (one trailing newline is dropped).
    #[arg(long)]
    file: Option<PathBuf>,
}

impl TextArg {
    fn read(&self) -> Result<String> {
        match (&self.text, &self.file) {
            (Some(t), _) => Ok(t.clone()),
            (None, Some(p)) => {
                let s = read(p)?;
                Ok(s.strip_suffix('\n').unwrap_or(&s).to_string())
            }
            (None, None) => unreachable!("clap requires one of them"),
        }
    }
}

#[derive(Args, Debug)]
struct SolverArg {
    /// Solver command; the WCNF path is appended. Defaults to the bundled
    /// `collage-maxsat` next to this executable.
    #[arg(long)]
    solver: Option<String>,
}

impl SolverArg {
    fn command(&self) -> Result<String> {
        if let Some(s) = &self.solver {
            return Ok(s.clone());
        }
        let exe = std::env::current_exe()?;
        let path = exe.with_file_name(format!("collage-maxsat{}", std::env::consts::EXE_SUFFIX));
        ensure!(path.exists(), "no --solver given and {} does not exist", path.display());
        Ok(path.display().to_string())
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn load(path: &Path) -> Result<CollageSystem> {
    parse_system(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn load_valid(path: &Path) -> Result<CollageSystem> {
    let g = load(path)?;
    let report = validate(&g);
    ensure!(report.is_ok(), "{} is not a valid collage system:\n{report}", path.display());
    Ok(g)
}

fn print_certificate(c: &Certificate, output: Option<&Path>) -> Result<()> {
    println!("{}", c.size);
    eprintln!("certificate: {c}");
    let clg = serialize_system(&c.system);
    match output {
        Some(p) => write(p, &clg),
        None => {
            print!("{clg}");
            Ok(())
        }
    }
}

fn all_strings(alphabet: &[char], max_len: usize) -> Vec<String> {
    let mut out = Vec::new();
    let mut layer = vec![String::new()];
    for _ in 0..max_len {
        layer = layer.iter().flat_map(|s| alphabet.iter().map(move |&c| format!("{s}{c}"))).collect();
        out.extend(layer.iter().cloned());
    }
    out
}

fn run(cmd: Cmd) -> Result<()> {
    match cmd {
        Cmd::Validate { file } => {
            let report = validate(&load(&file)?);
            print!("{report}");
            ensure!(report.is_ok(), "validation failed");
        }
        Cmd::Expand { file, limit } => {
            let g = load_valid(&file)?;
            println!("{}", expand(&g, g.start(), limit)?);
        }
        Cmd::Stats { file } => println!("{}", stats(&load_valid(&file)?)),
        Cmd::Internalize { file, output } => {
            let g = load_valid(&file)?;
            let (h, report) = internalize_with_report(&g, false);
            write(&output, &serialize_system(&h))?;
            let st = stats(&h);
            println!("size {} -> {} ({} truncation rewrites)", g.size(), h.size(), report.steps);
            println!("{st}");
            ensure!(st.internal, "internalization produced a non-internal system");
        }
        Cmd::Encode { text, output, format } => {
            let inst = encode(&text.read()?)?;
            write(&output, &write_wcnf(&inst, format))?;
            let mut side = output.into_os_string();
            side.push(".catalog");
            write(Path::new(&side), &inst.catalog.to_sidecar())?;
            println!("{} variables, {} clauses", inst.num_vars(), inst.formula.clause_count());
        }
        Cmd::Decode { model, catalog, text, output } => {
            let cat = VariableCatalog::from_sidecar(&read(&catalog)?)?;
            if let Some(t) = text {
                ensure!(t == cat.text(), "catalog is for {:?}, not {:?}", cat.text(), t);
            }
            let cert = certify(&read(&model)?, &cat)?;
            print_certificate(&cert, output.as_deref())?;
        }
        Cmd::Solve { text, solver, format, output } => {
            let out = solve(&text, &solver.command()?, format)?;
            if !out.optimal {
                eprintln!("warning: the solver did not claim optimality; the size is an upper bound");
            }
            print_certificate(&out.certificate, output.as_deref())?;
        }
        Cmd::Oracle { text } => {
            let t: Vec<char> = text.chars().collect();
            ensure!(t.len() <= 16, "exhaustive search is limited to 16 characters");
            let best = brute_force_chat(&text, t.len() + sigma(&text))?;
            println!("{}", best.size);
            print!("{}", serialize_system(&reconstruct(&text, &best.factorization)?));
        }
        Cmd::Selftest { max_len, alphabet, solver } => {
            let letters: Vec<char> = alphabet.chars().collect();
            ensure!(!letters.is_empty(), "empty alphabet");
            let command = solver.command()?;
            let mut failures = 0;
            let texts = all_strings(&letters, max_len);
            for t in &texts {
                let want = brute_force_chat(t, t.len() + sigma(t))?.size;
                match solve(t, &command, WcnfFormat::Legacy) {
                    Ok(o) if o.optimal && o.certificate.size == want => {}
                    Ok(o) => {
                        failures += 1;
                        eprintln!("{t}: solver {} (optimal: {}), oracle {want}", o.certificate.size, o.optimal);
                    }
                    Err(e) => {
                        failures += 1;
                        eprintln!("{t}: {e}");
                    }
                }
            }
            println!("{} texts, {failures} disagreements", texts.len());
            if failures > 0 {
                bail!("selftest failed");
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
