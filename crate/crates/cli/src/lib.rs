//! The `relalg` command-line driver. [`run`] parses arguments, executes one
//! subcommand and returns the exit code with the rendered report, so the
//! binary and the tests share one code path.
//!
//! Exit codes: 0 pass/SAT, 1 fail/UNSAT/violation found, 2 usage or input
//! error, 3 budget exceeded. Reports are plain text, one finding per line;
//! the only run-dependent line is the `# elapsed` trailer.

use std::path::PathBuf;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use relalg::io::{self, IoError};
use relalg::refute::RefuteError;
use relalg::representation::check_representation_with;
use relalg::search::{search_representation, SearchConfig, SearchError, Verdict};
use relalg::term::{eval_abstract, eval_proper, parse_term, Env, TermError};
use relalg::{
    check_ra_axioms, refute_finite_candidate, theta_construction, zoo, AlgebraError, AtomSet,
    AtomStructure, CheckOptions, ProperStructure, RepresentationError, Signature, Symbol,
};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "relalg",
    version,
    about = "Finite relation algebras and their representations"
)]
struct Cli {
    /// Emit findings as stable key=value lines.
    #[arg(long, global = true)]
    porcelain: bool,
    /// Worker threads for search (default 1 keeps runs reproducible).
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the relation algebra axioms on an algebra.
    CheckAxioms { algebra: String },
    /// Build the atom-base representation and write it as a representation file.
    BuildRep {
        algebra: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "theta")]
        name: String,
    },
    /// Check a representation file against a signature.
    VerifyRep {
        algebra: String,
        rep: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        sig: String,
        #[arg(long)]
        no_injective: bool,
        /// Maximum violations listed.
        #[arg(long, default_value_t = 10)]
        cap: usize,
    },
    /// Search for a representation over bases of bounded size.
    SearchRep(SearchArgs),
    /// Refute a finite candidate map for the Point Algebra with `-` and `;`.
    Refute { algebra: String, rep: PathBuf },
    /// Evaluate a term in an algebra, and optionally under a representation.
    Eval {
        algebra: String,
        #[arg(long, allow_hyphen_values = true)]
        term: String,
        /// Bind a name to an element, as `name=elem` (atoms are pre-bound).
        #[arg(long = "env")]
        env: Vec<String>,
        #[arg(long)]
        rep: Option<PathBuf>,
        /// Report membership of `x,y` in the image.
        #[arg(long)]
        pair: Option<String>,
    },
    /// Print a built-in algebra (point, trivial, z1..z16) in the algebra file format.
    Zoo {
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct SearchArgs {
    algebra: String,
    #[arg(long, allow_hyphen_values = true)]
    sig: String,
    #[arg(long)]
    base: usize,
    /// Scan base sizes from --base up to this, stopping at the first SAT.
    #[arg(long)]
    max_base: Option<usize>,
    #[arg(long)]
    no_injective: bool,
    #[arg(long, default_value_t = 60_000)]
    budget_ms: u64,
    #[arg(long, default_value_t = 500_000_000)]
    node_budget: u64,
    /// Permit bases above 8 points (at most 11).
    #[arg(long)]
    allow_large_base: bool,
    /// Write the witness as a representation file.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl CliOutput {
    /// Stdout without the `#` trailer lines.
    pub fn report(&self) -> String {
        self.stdout
            .lines()
            .filter(|l| !l.starts_with('#'))
            .map(|l| format!("{l}\n"))
            .collect()
    }
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Io(#[from] IoError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Representation(#[from] RepresentationError),
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error(transparent)]
    Refute(#[from] RefuteError),
    #[error(transparent)]
    Term(#[from] TermError),
}

struct Report {
    porcelain: bool,
    lines: Vec<String>,
}

impl Report {
    fn push(&mut self, human: String, machine: impl FnOnce() -> String) {
        self.lines
            .push(if self.porcelain { machine() } else { human });
    }
}

/// Runs the CLI on `argv` (including the program name).
pub fn run<I, T>(argv: I) -> CliOutput
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_USAGE
            } else {
                EXIT_PASS
            };
            let text = e.render().to_string();
            let (stdout, stderr) = if e.use_stderr() {
                (String::new(), text)
            } else {
                (text, String::new())
            };
            return CliOutput {
                code,
                stdout,
                stderr,
            };
        }
    };
    let start = Instant::now();
    let mut report = Report {
        porcelain: cli.porcelain,
        lines: Vec::new(),
    };
    match execute(&cli, &mut report) {
        Ok(code) => {
            let mut stdout: String = report.lines.iter().map(|l| format!("{l}\n")).collect();
            stdout.push_str(&format!("# elapsed {} ms\n", start.elapsed().as_millis()));
            CliOutput {
                code,
                stdout,
                stderr: String::new(),
            }
        }
        Err(e) => CliOutput {
            code: EXIT_USAGE,
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

fn load_algebra(arg: &str) -> Result<AtomStructure, CliError> {
    match arg.strip_prefix("zoo:") {
        Some(name) => zoo::by_name(name)
            .ok_or_else(|| CliError::Usage(format!("no built-in algebra `{name}`"))),
        None => Ok(io::load_algebra(arg)?),
    }
}

fn parse_sig(text: &str) -> Result<Signature, CliError> {
    text.parse().map_err(|e| CliError::Usage(format!("{e}")))
}

fn element_key(alg: &AtomStructure, x: AtomSet) -> String {
    alg.format_element(x).replace(' ', "")
}

fn execute(cli: &Cli, out: &mut Report) -> Result<i32, CliError> {
    match &cli.command {
        Command::CheckAxioms { algebra } => {
            let alg = load_algebra(algebra)?;
            let report = check_ra_axioms(&alg)?;
            for g in &report.groups {
                let scope = match g.scope {
                    relalg::axioms::CheckScope::Elements => "elements",
                    relalg::axioms::CheckScope::Atoms => "atoms+additivity",
                };
                let verdict = if g.passed() { "pass" } else { "FAIL" };
                out.push(
                    format!(
                        "group {} {}: {verdict} ({scope})",
                        g.group.number(),
                        g.group.label()
                    ),
                    || {
                        format!(
                            "group number={} label={} verdict={} scope={scope}",
                            g.group.number(),
                            g.group.label().replace(' ', "-"),
                            verdict.to_lowercase()
                        )
                    },
                );
                if let Some(f) = &g.failure {
                    out.push(format!("  witness: {}", f.describe(&alg)), || {
                        let w: Vec<_> = f.witness[..f.law.arity()]
                            .iter()
                            .map(|&x| element_key(&alg, x))
                            .collect();
                        format!(
                            "witness law={} operands={}",
                            f.law.label().replace(' ', "-"),
                            w.join("|")
                        )
                    });
                }
            }
            let ok = report.passed();
            out.push(
                format!("verdict: {}", if ok { "pass" } else { "fail" }),
                || format!("verdict value={}", if ok { "pass" } else { "fail" }),
            );
            Ok(if ok { EXIT_PASS } else { EXIT_FAIL })
        }

        Command::BuildRep {
            algebra,
            out: path,
            name,
        } => {
            let alg = load_algebra(algebra)?;
            let theta = theta_construction(&alg)?;
            let text = io::write_representation(&theta, name);
            match path {
                Some(p) => {
                    io::save_representation(&theta, name, p)?;
                    out.push(
                        format!("wrote {} (base {})", p.display(), theta.base().size()),
                        || format!("wrote path={} base={}", p.display(), theta.base().size()),
                    );
                }
                None => out.lines.extend(text.lines().map(str::to_string)),
            }
            Ok(EXIT_PASS)
        }

        Command::VerifyRep {
            algebra,
            rep,
            sig,
            no_injective,
            cap,
        } => {
            let alg = load_algebra(algebra)?;
            let sig = parse_sig(sig)?;
            let loaded = io::load_representation(rep, &alg)?;
            if !loaded.defaulted.is_empty() && !sig.contains(Symbol::Join) {
                let missing: Vec<_> = loaded
                    .defaulted
                    .iter()
                    .map(|&x| alg.format_element(x))
                    .collect();
                return Err(CliError::Usage(format!(
                    "elements without a map line ({}) can only be filled additively when `+` is in the signature",
                    missing.join(", ")
                )));
            }
            let opts = CheckOptions {
                require_injectivity: !no_injective,
                cap: *cap,
            };
            let violations = check_representation_with(&loaded.map, sig, opts)?;
            for v in &violations {
                out.push(format!("violation: {}", v.describe(&alg)), || {
                    v.porcelain(&alg)
                });
            }
            let ok = violations.is_empty();
            out.push(
                format!("verdict: {} for {sig}", if ok { "pass" } else { "fail" }),
                || {
                    format!(
                        "verdict value={} signature={}",
                        if ok { "pass" } else { "fail" },
                        sig.to_string().replace(' ', "")
                    )
                },
            );
            Ok(if ok { EXIT_PASS } else { EXIT_FAIL })
        }

        Command::SearchRep(args) => search(cli, args, out),

        Command::Refute { algebra, rep } => {
            let alg = load_algebra(algebra)?;
            let loaded = io::load_representation(rep, &alg)?;
            let trace = refute_finite_candidate(&loaded.map)?;
            let lines = if out.porcelain {
                trace.porcelain(&alg)
            } else {
                trace.render(&alg)
            };
            out.lines.extend(lines);
            Ok(EXIT_FAIL)
        }

        Command::Eval {
            algebra,
            term,
            env,
            rep,
            pair,
        } => {
            let alg = load_algebra(algebra)?;
            let t = parse_term(term)?;
            let mut bindings: Env<AtomSet> = (0..alg.atom_count())
                .map(|a| (alg.atom_name(a).to_string(), AtomSet::singleton(a)))
                .collect();
            for b in env {
                let (name, value) = b
                    .split_once('=')
                    .ok_or_else(|| CliError::Usage(format!("expected name=element, got `{b}`")))?;
                bindings.insert(name.trim().to_string(), alg.parse_element(value)?);
            }
            let value = eval_abstract(&alg, &t, &bindings)?;
            out.push(format!("value: {}", alg.format_element(value)), || {
                format!("value element={}", element_key(&alg, value))
            });
            let pair = pair.as_deref().map(parse_pair).transpose()?;
            match rep {
                Some(path) => {
                    let m = io::load_representation(path, &alg)?.map;
                    let image = m.image(value);
                    let proper = eval_proper(
                        &ProperStructure::new(m.base()),
                        &t,
                        &bindings
                            .iter()
                            .map(|(k, &x)| (k.clone(), m.image(x)))
                            .collect(),
                    )?;
                    out.push(format!("image: {image}"), || {
                        format!("image pairs={}", image.to_string().replace(' ', ";"))
                    });
                    out.push(format!("proper: {proper}"), || {
                        format!("proper pairs={}", proper.to_string().replace(' ', ";"))
                    });
                    let agree = image == proper;
                    out.push(format!("agree: {agree}"), || format!("agree value={agree}"));
                    if let Some((x, y)) = pair {
                        if x >= m.base().size() || y >= m.base().size() {
                            return Err(CliError::Usage(format!(
                                "pair ({x},{y}) outside base {}",
                                m.base().size()
                            )));
                        }
                        let member = image.contains(x, y);
                        out.push(format!("member ({x},{y}): {member}"), || {
                            format!("member pair={x},{y} value={member}")
                        });
                    }
                }
                None if pair.is_some() => return Err(CliError::Usage("--pair needs --rep".into())),
                None => {}
            }
            Ok(EXIT_PASS)
        }

        Command::Zoo { name, out: path } => {
            let alg = zoo::by_name(name)
                .ok_or_else(|| CliError::Usage(format!("no built-in algebra `{name}`")))?;
            match path {
                Some(p) => {
                    io::save_algebra(&alg, p)?;
                    out.push(format!("wrote {}", p.display()), || {
                        format!("wrote path={}", p.display())
                    });
                }
                None => out
                    .lines
                    .extend(io::write_algebra(&alg).lines().map(str::to_string)),
            }
            Ok(EXIT_PASS)
        }
    }
}

fn parse_pair(text: &str) -> Result<(usize, usize), CliError> {
    let bad = || CliError::Usage(format!("expected a pair `x,y`, got `{text}`"));
    let inner = text.trim().trim_start_matches('(').trim_end_matches(')');
    let (x, y) = inner.split_once(',').ok_or_else(bad)?;
    Ok((
        x.trim().parse().map_err(|_| bad())?,
        y.trim().parse().map_err(|_| bad())?,
    ))
}

fn search(cli: &Cli, args: &SearchArgs, out: &mut Report) -> Result<i32, CliError> {
    let alg = load_algebra(&args.algebra)?;
    let sig = parse_sig(&args.sig)?;
    let max = args.max_base.unwrap_or(args.base);
    if max < args.base {
        return Err(CliError::Usage("--max-base is below --base".into()));
    }
    let template = SearchConfig {
        require_injectivity: !args.no_injective,
        node_budget: args.node_budget,
        time_budget: Duration::from_millis(args.budget_ms),
        allow_large_base: args.allow_large_base,
        threads: cli.threads.max(1),
        ..SearchConfig::new(sig, args.base)
    };
    out.push(
        format!(
            "search {} for {sig}, bases {}..={max}, injective {}, budget {} nodes / {} ms",
            alg.name(),
            args.base,
            !args.no_injective,
            args.node_budget,
            args.budget_ms
        ),
        || {
            format!(
                "search algebra={} signature={} base={} max-base={max} injective={} node-budget={} time-budget-ms={}",
                alg.name(),
                sig.to_string().replace(' ', ""),
                args.base,
                !args.no_injective,
                args.node_budget,
                args.budget_ms
            )
        },
    );
    let mut outcomes = Vec::new();
    for n in args.base..=max {
        let o = search_representation(
            &alg,
            &SearchConfig {
                base_size: n,
                ..template.clone()
            },
        )?;
        let sat = o.verdict == Verdict::Sat;
        outcomes.push(o);
        if sat {
            break;
        }
    }
    for o in &outcomes {
        out.push(
            format!(
                "base {}: {} ({} nodes)",
                o.base_size,
                o.verdict.label(),
                o.nodes
            ),
            || {
                format!(
                    "outcome base={} verdict={} nodes={}",
                    o.base_size,
                    o.verdict.label(),
                    o.nodes
                )
            },
        );
    }
    let last = outcomes.last().expect("at least one base");
    if let Some(w) = &last.witness {
        match &args.out {
            Some(p) => {
                io::save_representation(w, "witness", p)?;
                out.push(format!("witness written to {}", p.display()), || {
                    format!("witness path={}", p.display())
                });
            }
            None => out.lines.extend(
                io::write_representation(w, "witness")
                    .lines()
                    .map(str::to_string),
            ),
        }
    }
    Ok(if last.verdict == Verdict::Sat {
        EXIT_PASS
    } else if outcomes
        .iter()
        .any(|o| o.verdict == Verdict::BudgetExceeded)
    {
        EXIT_BUDGET
    } else {
        EXIT_FAIL
    })
}
