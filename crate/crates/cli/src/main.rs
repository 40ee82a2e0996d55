use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use fpgroup::abelian::abelianize;
use fpgroup::enumerator::{enumerate, verify_table, Limits, Outcome};
use fpgroup::parser::{parse_presentation, parse_proof, parse_relation, serialize_presentation};
use fpgroup::presentation::{
    auto_simplify, eliminate_by_name, eliminate_with_value, relator_diff, Presentation, SimplifyLimits, TietzeLog,
};
use fpgroup::proofcheck::{check_script, Verdict};
use fpgroup::surgery::log_transform_matrix;
use fpgroup::verify;

const EXIT_OK: u8 = 0;
const EXIT_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_EXHAUSTED: u8 = 3;

#[derive(Parser)]
#[command(name = "fpgroup", version, about = "Finitely presented group toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a presentation and print its canonical form.
    Parse { file: PathBuf },
    /// Same as `parse`.
    Canon { file: PathBuf },
    /// Eliminate generators, explicitly and/or greedily.
    Simplify {
        file: PathBuf,
        /// `g` eliminates g by its preferred definition; `g=WORD` uses a
        /// relator stating exactly that definition. Applied in the order given.
        #[arg(long = "eliminate", value_name = "G[=WORD]")]
        eliminate: Vec<String>,
        /// After any explicit eliminations, simplify greedily.
        #[arg(long)]
        auto: bool,
        /// Maximum number of greedy eliminations.
        #[arg(long, default_value_t = SimplifyLimits::default().max_steps)]
        max_steps: usize,
        /// Write the replayable move log here.
        #[arg(long, value_name = "FILE")]
        log: Option<PathBuf>,
    },
    /// Todd–Coxeter coset enumeration.
    Enumerate {
        file: PathBuf,
        /// Limit on defined cosets.
        #[arg(long, default_value_t = 1_000_000)]
        max_cosets: usize,
        /// Subgroup generator; repeat for several. Default: trivial subgroup.
        #[arg(long = "subgroup", value_name = "WORD")]
        subgroup: Vec<String>,
        /// Write the completed coset table here.
        #[arg(long, value_name = "FILE")]
        dump: Option<PathBuf>,
    },
    /// Invariant factors and free rank of the abelianization.
    Abelianize { file: PathBuf },
    /// Check a proof script against a presentation.
    Check { presentation: PathBuf, proof: PathBuf },
    /// Compare two presentations relator by relator, matching generators by name.
    Compare { left: PathBuf, right: PathBuf },
    /// Gluing matrix of the log transform with multiplicity p.
    Surgery {
        #[arg(long, allow_negative_numbers = true)]
        p: i64,
    },
    /// Run the full reproduction suite.
    VerifyPaper {
        #[arg(long, default_value_t = verify::DEFAULT_SEED)]
        seed: u64,
    },
}

/// A failure carrying its exit code; the message goes to stderr.
struct Failure {
    code: u8,
    message: String,
}

fn usage(message: impl Display) -> Failure {
    Failure { code: EXIT_USAGE, message: message.to_string() }
}

fn failed(message: impl Display) -> Failure {
    Failure { code: EXIT_FAILED, message: message.to_string() }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<Presentation, Failure> {
    let text = read(path)?;
    parse_presentation(&text).map_err(|e| usage(format!("{}:{}", path.display(), e.render(&text))))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn result_line(fields: &[(&str, String)]) -> String {
    let body: Vec<String> = fields.iter().map(|(k, v)| format!("{k}={v}")).collect();
    format!("RESULT {}", body.join(" "))
}

/// Presentation text followed by the summary as a comment, so the output is
/// itself a valid presentation file.
fn print_presentation(p: &Presentation, extra: &[(&str, String)]) {
    print!("{}", serialize_presentation(p));
    let mut fields = vec![("generators", p.generator_count().to_string()), ("relators", p.relator_count().to_string())];
    fields.extend_from_slice(extra);
    println!("# {}", result_line(&fields));
}

fn simplify(
    file: &Path,
    eliminate: &[String],
    auto: bool,
    max_steps: usize,
    log_path: Option<&Path>,
) -> Result<u8, Failure> {
    let mut p = load(file)?;
    let mut log = TietzeLog::new();
    for request in eliminate {
        let (next, m) = match request.split_once('=') {
            Some((g, value)) => {
                let w = parse_relation(value, p.alphabet())
                    .map_err(|e| usage(format!("--eliminate {request}: {}", e.render(value))))?;
                eliminate_with_value(&p, g.trim(), &w)
            }
            None => eliminate_by_name(&p, request.trim()),
        }
        .map_err(|e| failed(format!("cannot eliminate `{request}`: {e}")))?;
        log.push(m);
        p = next;
    }
    if auto {
        let (next, more) = auto_simplify(&p, SimplifyLimits { max_steps, ..SimplifyLimits::default() });
        log.moves.extend(more.moves);
        p = next;
    }
    if let Some(path) = log_path {
        write(path, &log.render())?;
    }
    print_presentation(&p, &[("moves", log.len().to_string())]);
    Ok(EXIT_OK)
}

fn enumerate_cmd(file: &Path, max_cosets: usize, subgroup: &[String], dump: Option<&Path>) -> Result<u8, Failure> {
    let p = load(file)?;
    let subgroup = subgroup
        .iter()
        .map(|s| parse_relation(s, p.alphabet()).map_err(|e| usage(format!("--subgroup {s}: {}", e.render(s)))))
        .collect::<Result<Vec<_>, _>>()?;
    let r = enumerate(&p, &subgroup, Limits::with_max_cosets(max_cosets)).map_err(usage)?;
    let stats = [
        ("defined", r.stats.defined.to_string()),
        ("coincidences", r.stats.coincidences.to_string()),
        ("scans", r.stats.scans.to_string()),
        ("max_live", r.stats.max_live.to_string()),
    ];
    let what = if subgroup.is_empty() { "order" } else { "index" };
    match r.outcome {
        Outcome::Completed { index } => {
            if let Err(v) = verify_table(r.table(), &p) {
                return Err(failed(format!("completed table failed verification: {v:?}")));
            }
            if let Some(path) = dump {
                write(path, &r.table().dump(p.alphabet()))?;
            }
            println!("{what} {index}");
            let mut fields = vec![("outcome", "completed".to_string()), (what, index.to_string())];
            fields.extend(stats);
            println!("{}", result_line(&fields));
            Ok(EXIT_OK)
        }
        Outcome::Exhausted { live, defined } => {
            eprintln!("enumeration exhausted after {defined} cosets ({live} live); no conclusion");
            let mut fields = vec![("outcome", "exhausted".to_string()), ("live", live.to_string())];
            fields.extend(stats);
            println!("{}", result_line(&fields));
            Ok(EXIT_EXHAUSTED)
        }
    }
}

fn abelianize_cmd(file: &Path) -> Result<u8, Failure> {
    let p = load(file)?;
    let ab = abelianize(&p);
    println!("{ab}");
    let torsion: Vec<String> = ab.torsion.iter().map(|d| d.to_string()).collect();
    println!(
        "{}",
        result_line(&[
            ("torsion", if torsion.is_empty() { "none".into() } else { torsion.join(",") }),
            ("free_rank", ab.free_rank.to_string()),
        ])
    );
    Ok(EXIT_OK)
}

fn check_cmd(presentation: &Path, proof: &Path) -> Result<u8, Failure> {
    let p = load(presentation)?;
    let text = read(proof)?;
    let script = parse_proof(&text, p.alphabet()).map_err(|e| usage(format!("{}:{}", proof.display(), e.render(&text))))?;
    let report = check_script(&p, &script);
    for s in &report.steps {
        match &s.outcome {
            Ok(Verdict::Accepted) => println!("step {}: accepted", s.name),
            Ok(Verdict::Rejected { residual }) => println!("step {}: rejected, residual {residual}", s.name),
            Err(e) => println!("step {}: rejected, {e}", s.name),
        }
    }
    println!("{}", report.summary());
    println!(
        "{}",
        result_line(&[
            ("accepted", report.accepted().to_string()),
            ("trivial", report.proves_trivial().to_string()),
            ("steps", report.steps.len().to_string()),
            ("rejected", report.rejected_steps().len().to_string()),
        ])
    );
    if report.accepted() {
        Ok(EXIT_OK)
    } else {
        eprintln!("{}", report.summary());
        Ok(EXIT_FAILED)
    }
}

fn compare_cmd(left: &Path, right: &Path) -> Result<u8, Failure> {
    let (l, r) = (load(left)?, load(right)?);
    let diff = relator_diff(&l, &r, None).map_err(failed)?;
    for w in &diff.only_left {
        println!("only in {}: {w}", left.display());
    }
    for w in &diff.only_right {
        println!("only in {}: {w}", right.display());
    }
    println!(
        "{}",
        result_line(&[
            ("matched", diff.matched.to_string()),
            ("only_left", diff.only_left.len().to_string()),
            ("only_right", diff.only_right.len().to_string()),
        ])
    );
    Ok(if diff.is_empty() { EXIT_OK } else { EXIT_FAILED })
}

fn surgery_cmd(p: i64) -> Result<u8, Failure> {
    let t = log_transform_matrix(p);
    print!("{}", t.matrix);
    println!("determinant {}", t.determinant);
    if t.luttinger {
        println!("Luttinger surgery");
    }
    println!(
        "{}",
        result_line(&[
            ("p", p.to_string()),
            ("determinant", t.determinant.to_string()),
            ("luttinger", t.luttinger.to_string()),
        ])
    );
    Ok(EXIT_OK)
}

fn verify_paper(seed: u64) -> Result<u8, Failure> {
    let checks = verify::run_all(seed).map_err(failed)?;
    for c in &checks {
        println!("{}", c.line());
    }
    let passed = checks.iter().filter(|c| c.passed).count();
    println!("{}", result_line(&[("passed", passed.to_string()), ("total", checks.len().to_string())]));
    Ok(if passed == checks.len() { EXIT_OK } else { EXIT_FAILED })
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Parse { file } | Command::Canon { file } => {
            print_presentation(&load(&file)?, &[]);
            Ok(EXIT_OK)
        }
        Command::Simplify { file, eliminate, auto, max_steps, log } => {
            simplify(&file, &eliminate, auto, max_steps, log.as_deref())
        }
        Command::Enumerate { file, max_cosets, subgroup, dump } => enumerate_cmd(&file, max_cosets, &subgroup, dump.as_deref()),
        Command::Abelianize { file } => abelianize_cmd(&file),
        Command::Check { presentation, proof } => check_cmd(&presentation, &proof),
        Command::Compare { left, right } => compare_cmd(&left, &right),
        Command::Surgery { p } => surgery_cmd(p),
        Command::VerifyPaper { seed } => verify_paper(seed),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
