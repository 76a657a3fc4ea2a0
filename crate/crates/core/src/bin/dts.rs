//! Command-line front end.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use dts_core::fragment::Lexicon;
use dts_core::report::{render_trace, run_files, RunError, RunOptions, RunReport};
use dts_core::sexpr::{self, print};
use dts_core::signature::{GlobalSignature, Telescope};
use dts_core::subtype::{expand_aliases, is_subtype};
use dts_core::term::Term;
use dts_core::typecheck::{check_type_with, infer_sort, infer_type, CheckOptions};

#[derive(Parser)]
#[command(name = "dts", version, about = "Dependent type semantics with events")]
struct Cli {
    /// Lexicon file replacing the bundled one.
    #[arg(long, global = true)]
    lexicon: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Structured,
}

#[derive(Subcommand)]
enum Command {
    /// Type-check a file of terms.
    ///
    /// Each top-level form is one of `(declare c A)`, `(assume x A)`,
    /// `(check t A)` or a bare term whose type is inferred.
    Check {
        file: PathBuf,
        /// Reject terms that need a coercion.
        #[arg(long)]
        no_subtyping: bool,
    },
    /// Print the coercion from A to B, or `absent`.
    Subtype { sub: String, sup: String },
    /// Resolve the anaphora of discourse files.
    Resolve {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(long, default_value_t = 64)]
        max_readings: usize,
        /// Show every felicity goal with its antecedents and witnesses.
        #[arg(long)]
        trace: bool,
    },
    /// Print the first-order formula of each reading.
    ExportFol {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(long, default_value_t = 64)]
        max_readings: usize,
        #[arg(long)]
        trace: bool,
        /// Print formulas in canonical prenex form.
        #[arg(long)]
        canonical: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let lex = match &cli.lexicon {
        None => Lexicon::default_lexicon(),
        Some(path) => match std::fs::read_to_string(path).map_err(|e| e.to_string()).and_then(|s| {
            Lexicon::parse(&s).map_err(|e| e.to_string())
        }) {
            Ok(lex) => lex,
            Err(e) => {
                eprintln!("error: {}: {e}", path.display());
                return ExitCode::from(1);
            }
        },
    };
    let code = match cli.command {
        Command::Check { file, no_subtyping } => {
            let opts = if no_subtyping { CheckOptions::without_subtyping() } else { CheckOptions::default() };
            check(&lex.signature(), &file, opts, cli.format)
        }
        Command::Subtype { sub, sup } => subtype(&lex.signature(), &sub, &sup, cli.format),
        Command::Resolve { files, max_readings, trace } => {
            run(&lex, &files, max_readings, trace, cli.format, |r, format| match format {
                Format::Text => r.to_text(false),
                Format::Structured => r.to_json(),
            })
        }
        Command::ExportFol { files, max_readings, trace, canonical } => {
            run(&lex, &files, max_readings, trace, cli.format, |r, format| export(r, canonical, format))
        }
    };
    ExitCode::from(code)
}

#[derive(Serialize)]
struct FormResult {
    line: usize,
    form: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    r#type: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    coercions: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

fn check(sig: &GlobalSignature, file: &Path, opts: CheckOptions, format: Format) -> u8 {
    let src = match std::fs::read_to_string(file) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {}: {e}", file.display());
            return 1;
        }
    };
    let forms = match sexpr::parse_many(&src) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("error: {}:{e}", file.display());
            return 1;
        }
    };
    let lines = form_lines(&src);
    let mut sig = sig.clone();
    let mut tel = Telescope::new();
    let mut results = Vec::new();
    let mut failed = false;
    for (n, form) in forms.iter().enumerate() {
        let form = tel.names().fold(expand_aliases(form), |t, x| t.replace(&Term::cnst(x), &Term::var(x)));
        let line = lines.get(n).copied().unwrap_or(0);
        let mut res = FormResult { line, form: print(&form), r#type: None, coercions: Vec::new(), error: None };
        match check_form(&mut sig, &mut tel, &form, opts) {
            Ok((ty, coercions)) => {
                res.r#type = ty.map(|t| print(&t));
                res.coercions = coercions;
            }
            Err(e) => {
                res.error = Some(e);
                failed = true;
            }
        }
        results.push(res);
        if failed {
            break;
        }
    }
    match format {
        Format::Structured => println!("{}", serde_json::to_string_pretty(&results).expect("serializable")),
        Format::Text => {
            for r in &results {
                match (&r.error, &r.r#type) {
                    (Some(e), _) => eprintln!("{}:{}: error: {e}", file.display(), r.line),
                    (None, Some(t)) => println!("{} : {t}", r.form),
                    (None, None) => println!("{} ok", r.form),
                }
                for c in &r.coercions {
                    println!("  coercion {c}");
                }
            }
        }
    }
    u8::from(failed)
}

type FormOutcome = Result<(Option<Term>, Vec<String>), String>;

fn check_form(sig: &mut GlobalSignature, tel: &mut Telescope, form: &Term, opts: CheckOptions) -> FormOutcome {
    let (head, args) = form.spine();
    let keyword = match head {
        Term::Const(c) if matches!(c.as_str(), "declare" | "assume" | "check") && args.len() == 2 => c.as_str(),
        _ => {
            let ty = infer_type(sig, tel, form).map_err(|e| e.to_string())?;
            return Ok((Some(ty), Vec::new()));
        }
    };
    let name = |t: &Term| match t {
        Term::Const(x) | Term::Var(x) => Ok(x.clone()),
        other => Err(format!("expected a name, found {}", print(other))),
    };
    match keyword {
        "declare" => {
            infer_sort(sig, tel, args[1]).map_err(|e| e.to_string())?;
            sig.declare(name(args[0])?, args[1].clone());
            Ok((None, Vec::new()))
        }
        "assume" => {
            infer_sort(sig, tel, args[1]).map_err(|e| e.to_string())?;
            tel.push(name(args[0])?, args[1].clone());
            Ok((None, Vec::new()))
        }
        _ => {
            infer_sort(sig, tel, args[1]).map_err(|e| e.to_string())?;
            let checked = check_type_with(sig, tel, args[0], args[1], opts).map_err(|e| e.to_string())?;
            let coercions = checked
                .coercions
                .iter()
                .map(|c| format!("{} : {} <: {}", print(&c.witness), print(&c.source), print(&c.target)))
                .collect();
            Ok((None, coercions))
        }
    }
}

/// Line on which each top-level form starts.
fn form_lines(src: &str) -> Vec<usize> {
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut in_atom = false;
    for (n, line) in src.lines().enumerate() {
        let line = line.split(';').next().unwrap_or("");
        for c in line.chars() {
            match c {
                '(' | '[' => {
                    if depth == 0 {
                        out.push(n + 1);
                    }
                    depth += 1;
                    in_atom = false;
                }
                ')' | ']' => {
                    depth = depth.saturating_sub(1);
                    in_atom = false;
                }
                c if c.is_whitespace() => in_atom = false,
                _ => {
                    if depth == 0 && !in_atom {
                        out.push(n + 1);
                    }
                    in_atom = true;
                }
            }
        }
        in_atom = false;
    }
    out
}

fn subtype(sig: &GlobalSignature, sub: &str, sup: &str, format: Format) -> u8 {
    let parse = |s: &str| sexpr::parse(s).map(|t| expand_aliases(&t));
    let (a, b) = match (parse(sub), parse(sup)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    let coercion = is_subtype(sig, &Telescope::new(), &a, &b);
    match format {
        Format::Text => match &coercion {
            Some(c) => println!("{}", print(&c.witness)),
            None => println!("absent"),
        },
        Format::Structured => {
            let v = match &coercion {
                Some(c) => json!({
                    "result": "present",
                    "witness": print(&c.witness),
                    "source": print(&c.source),
                    "target": print(&c.target),
                }),
                None => json!({ "result": "absent" }),
            };
            println!("{}", serde_json::to_string_pretty(&v).expect("serializable"));
        }
    }
    0
}

fn run(
    lex: &Lexicon,
    files: &[PathBuf],
    max_readings: usize,
    trace: bool,
    format: Format,
    render: impl Fn(&RunReport, Format) -> String,
) -> u8 {
    let mut opts = RunOptions::default();
    opts.resolve.max_readings = max_readings;
    opts.resolve.trace = trace;
    let results = run_files(lex, files, &opts);
    let mut code = 0;
    let mut rendered = Vec::new();
    for r in &results {
        match r {
            Ok(report) => rendered.push(render(report, format)),
            Err(e) => {
                if let RunError::Resolve { trace: Some(t), .. } = e {
                    eprint!("{}", render_trace(t));
                }
                eprintln!("error: {e}");
                code = code.max(e.exit_code() as u8);
            }
        }
    }
    match format {
        Format::Structured if results.len() > 1 => println!("[{}]", rendered.join(",\n")),
        Format::Structured => rendered.iter().for_each(|r| println!("{r}")),
        Format::Text if files.len() > 1 => {
            for (r, text) in results.iter().filter_map(|r| r.as_ref().ok()).zip(&rendered) {
                println!("# {}", r.source);
                print!("{text}");
            }
        }
        Format::Text => rendered.iter().for_each(|r| print!("{r}")),
    }
    code
}

fn export(report: &RunReport, canonical: bool, format: Format) -> String {
    let pick = |r: &dts_core::report::Reading| if canonical { r.fol.canonical() } else { r.fol.clone() };
    match format {
        Format::Text => report.readings.iter().map(|r| format!("{}: {}\n", r.label, pick(r))).collect(),
        Format::Structured => {
            let readings: Vec<_> = report
                .readings
                .iter()
                .map(|r| json!({ "label": r.label, "fol": pick(r), "fol_text": pick(r).to_string() }))
                .collect();
            serde_json::to_string_pretty(&json!({ "source": report.source, "readings": readings }))
                .expect("serializable")
        }
    }
}
