//! Command-line driver: parse, check, translate, solve, compare, and the
//! typed-program embedding.
//!
//! Exit codes: 0 success, 1 syntax/type errors, 2 unsafe input,
//! 3 semantic mismatch in `compare`, 4 resource guard tripped.

use std::io::Read;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use flpc::ast::FlpProgram;
use flpc::faspc::{self, FaspProgram};
use flpc::flatten;
use flpc::htsem::{self, State};
use flpc::lpcore;
use flpc::parser::{parse_fasp, parse_flp};
use flpc::randgen::{random_safe_program, GenConfig};
use flpc::safety;

#[derive(Parser)]
#[command(name = "flpc", version, about = "Compiler and reference solver for logic programs with partial evaluable functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    /// Direct model enumeration over functional states.
    Oracle,
    /// Translate to a function-free program and lift its stable models.
    Translate,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a program and print its canonical form.
    Parse {
        /// Input path (.flp or .fasp); "-" reads an .flp program from stdin.
        input: String,
    },
    /// Parse and run the safety analysis.
    Check { input: String },
    /// Translate a functional program to function-free rules.
    Translate {
        input: String,
        /// Print the quantified intermediate theory instead of final rules.
        #[arg(long)]
        emit_intermediate: bool,
        /// Translate even if the safety analysis fails.
        #[arg(long)]
        no_safety_check: bool,
    },
    /// Enumerate models and print them canonically.
    Solve {
        input: String,
        #[arg(long, value_enum, default_value_t = Method::Oracle)]
        method: Method,
        /// Bound on the number of candidate states visited.
        #[arg(long)]
        max_search: Option<u64>,
        /// Solve even if the safety analysis fails (requires --max-search).
        #[arg(long)]
        no_safety_check: bool,
    },
    /// Check that direct enumeration and the translation pipeline agree.
    Compare {
        /// Input path; omit when using --random.
        input: Option<String>,
        /// Compare on this many randomly generated safe programs instead.
        #[arg(long)]
        random: Option<u64>,
        /// Seed for --random.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        max_search: Option<u64>,
    },
    /// Embed a typed total-function program and print it as functional rules.
    Fasp2flp { input: String },
}

fn read_input(path: &str) -> Result<String, ExitCode> {
    if path == "-" {
        let mut buf = String::new();
        if let Err(e) = std::io::stdin().read_to_string(&mut buf) {
            eprintln!("error: cannot read stdin: {e}");
            return Err(ExitCode::from(1));
        }
        return Ok(buf);
    }
    std::fs::read_to_string(path).map_err(|e| {
        eprintln!("error: cannot read '{path}': {e}");
        ExitCode::from(1)
    })
}

fn is_fasp(path: &str) -> bool {
    path.ends_with(".fasp")
}

fn load_flp(path: &str) -> Result<FlpProgram, ExitCode> {
    let text = read_input(path)?;
    parse_flp(&text, path).map_err(|diags| {
        for d in diags {
            eprintln!("{d}");
        }
        ExitCode::from(1)
    })
}

fn load_fasp(path: &str) -> Result<FaspProgram, ExitCode> {
    let text = read_input(path)?;
    parse_fasp(&text, path).map_err(|diags| {
        for d in diags {
            eprintln!("{d}");
        }
        ExitCode::from(1)
    })
}

fn report_violations(path: &str, report: &safety::SafetyReport) {
    for v in &report.violations {
        let span = v.span.unwrap_or_default();
        eprintln!("{path}:{}:{}: error: {v}", span.line, span.col);
    }
}

fn require_safe(path: &str, program: &FlpProgram, skip: bool) -> Result<(), ExitCode> {
    if skip {
        return Ok(());
    }
    let report = safety::check_flp_program(program);
    if report.safe() {
        Ok(())
    } else {
        report_violations(path, &report);
        Err(ExitCode::from(2))
    }
}

fn print_models(models: &[State]) {
    if models.len() == 1 {
        println!("1 model");
    } else {
        println!("{} models", models.len());
    }
    for m in models {
        println!("{m}");
    }
}

fn guard_exit(message: String) -> ExitCode {
    eprintln!("error: {message}");
    ExitCode::from(4)
}

fn oracle_models(p: &FlpProgram, max_search: u128) -> Result<Vec<State>, ExitCode> {
    htsem::equilibrium_models(p, max_search).map_err(|e| guard_exit(e.to_string()))
}

fn translated_models(p: &FlpProgram, max_search: u128) -> Result<Vec<State>, ExitCode> {
    let lp = flatten::translate_program(p).map_err(|e| {
        eprintln!("error: {e}");
        ExitCode::from(1)
    })?;
    let c0: Vec<String> = p.signature.constructors().iter().cloned().collect();
    let ground = lpcore::ground(&lp, &c0).map_err(|e| {
        eprintln!("error: {e}");
        ExitCode::from(2)
    })?;
    let stable = lpcore::stable_models(&ground, max_search).map_err(|e| guard_exit(e.to_string()))?;
    let mut lifted = Vec::new();
    for m in &stable {
        lifted.push(lpcore::lift(m, &p.signature).map_err(|e| {
            eprintln!("error: {e}");
            ExitCode::from(3)
        })?);
    }
    lifted.sort();
    lifted.dedup();
    Ok(lifted)
}

fn compare_program(p: &FlpProgram, max_search: u128) -> Result<bool, ExitCode> {
    let oracle = oracle_models(p, max_search)?;
    let translated = translated_models(p, max_search)?;
    if oracle == translated {
        return Ok(true);
    }
    eprintln!("mismatch: direct enumeration and translation disagree");
    for m in &oracle {
        if !translated.contains(m) {
            eprintln!("  only direct:     {m}");
        }
    }
    for m in &translated {
        if !oracle.contains(m) {
            eprintln!("  only translated: {m}");
        }
    }
    Ok(false)
}

fn run() -> Result<ExitCode, ExitCode> {
    let cli = Cli::parse();
    match cli.command {
        Command::Parse { input } => {
            if is_fasp(&input) {
                let p = load_fasp(&input)?;
                print!("{p}");
            } else {
                let p = load_flp(&input)?;
                print!("{p}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Check { input } => {
            if is_fasp(&input) {
                // type coherence is checked during parsing; typed programs
                // are safe by construction (every variable is ranged)
                load_fasp(&input)?;
                println!("safe");
                return Ok(ExitCode::SUCCESS);
            }
            let p = load_flp(&input)?;
            let report = safety::check_flp_program(&p);
            if report.safe() {
                println!("safe");
                Ok(ExitCode::SUCCESS)
            } else {
                report_violations(&input, &report);
                Ok(ExitCode::from(2))
            }
        }
        Command::Translate { input, emit_intermediate, no_safety_check } => {
            let p = load_flp(&input)?;
            require_safe(&input, &p, no_safety_check)?;
            if emit_intermediate {
                let theory = flatten::translate_program_intermediate(&p).map_err(|e| {
                    eprintln!("error: {e}");
                    ExitCode::from(1)
                })?;
                for r in &theory {
                    println!("{r}");
                }
            } else {
                let lp = flatten::translate_program(&p).map_err(|e| {
                    eprintln!("error: {e}");
                    ExitCode::from(1)
                })?;
                for r in &lp.rules {
                    println!("{r}");
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Solve { input, method, max_search, no_safety_check } => {
            if no_safety_check && max_search.is_none() {
                eprintln!("error: --no-safety-check requires an explicit --max-search bound");
                return Ok(ExitCode::from(1));
            }
            let limit = max_search.map(u128::from).unwrap_or(htsem::DEFAULT_MAX_SEARCH);
            if is_fasp(&input) {
                let p = load_fasp(&input)?;
                let answers = match method {
                    Method::Oracle => {
                        faspc::fasp_answer_sets(&p, limit).map_err(|e| guard_exit(e.to_string()))?
                    }
                    Method::Translate => {
                        let embedded = faspc::embed(&p).map_err(|e| {
                            eprintln!("error: {e}");
                            ExitCode::from(1)
                        })?;
                        let models = translated_models(&embedded, limit)?;
                        let mut out = Vec::new();
                        for m in &models {
                            match faspc::restrict_state(m, &p) {
                                Some(s) => out.push(s),
                                None => {
                                    eprintln!("error: model leaves a declared function entry undefined");
                                    return Ok(ExitCode::from(3));
                                }
                            }
                        }
                        out.sort();
                        out.dedup();
                        out
                    }
                };
                if answers.len() == 1 {
                    println!("1 model");
                } else {
                    println!("{} models", answers.len());
                }
                for a in &answers {
                    println!("{a}");
                }
                return Ok(ExitCode::SUCCESS);
            }
            let p = load_flp(&input)?;
            require_safe(&input, &p, no_safety_check)?;
            let models = match method {
                Method::Oracle => oracle_models(&p, limit)?,
                Method::Translate => translated_models(&p, limit)?,
            };
            print_models(&models);
            Ok(ExitCode::SUCCESS)
        }
        Command::Compare { input, random, seed, max_search } => {
            let limit = max_search.map(u128::from).unwrap_or(htsem::DEFAULT_MAX_SEARCH);
            if let Some(count) = random {
                let cfg = GenConfig::default();
                for i in 0..count {
                    let p = random_safe_program(seed.wrapping_add(i), &cfg);
                    if !compare_program(&p, limit)? {
                        eprintln!("program (seed {}):", seed.wrapping_add(i));
                        eprint!("{p}");
                        return Ok(ExitCode::from(3));
                    }
                }
                println!("{count}/{count} programs agree");
                return Ok(ExitCode::SUCCESS);
            }
            let Some(input) = input else {
                eprintln!("error: compare needs an input path or --random N");
                return Ok(ExitCode::from(1));
            };
            let p = load_flp(&input)?;
            require_safe(&input, &p, false)?;
            if compare_program(&p, limit)? {
                let n = oracle_models(&p, limit)?.len();
                println!("agree: {n} model{}", if n == 1 { "" } else { "s" });
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::from(3))
            }
        }
        Command::Fasp2flp { input } => {
            let p = load_fasp(&input)?;
            let embedded = faspc::embed(&p).map_err(|e| {
                eprintln!("error: {e}");
                ExitCode::from(1)
            })?;
            print!("{embedded}");
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(code) => code,
    }
}
