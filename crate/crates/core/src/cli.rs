//! The `polycal` command line.
//!
//! Every command prints exactly one JSON document on standard output.
//! Exit status is 0 on success, 1 when a check finds a mismatch and 2 on
//! usage, parse or input errors (with a message on standard error).

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use crate::cone::{normal_cone, proper_separation};
use crate::doc::{self, HPolyBody, InstanceDoc};
use crate::function::{subdiff, ExtReal, MaxAffineFn};
use crate::harness::{check_theorem, gen_instance, run_suite, Caps, GenKind, Outcome, Regime, SuiteConfig, TheoremId};
use crate::mapping::{coderivative, optimal_value, SVMap};
use crate::polyhedron::{canonicalize, ri_point, HPoly};
use crate::rational::Rat;

#[derive(Parser, Debug)]
#[command(name = "polycal", version, about = "Exact convex analysis over rational polyhedra")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// A point in the relative interior of a polyhedron
    RiPoint { file: PathBuf },
    /// Relative-interior membership
    RiMember {
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
    /// Normal cone of a polyhedron at a point
    NormalCone {
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
    /// Proper separation certificate for two polyhedra, or null
    Separate { file1: PathBuf, file2: PathBuf },
    /// Subdifferential of a max-affine function
    Subdiff {
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
    /// Coderivative of a mapping (or of a function's epigraph) at (x, y)
    Coderiv {
        file: PathBuf,
        /// The point (x, y), concatenated
        #[arg(long, allow_hyphen_values = true)]
        at: String,
        #[arg(long, allow_hyphen_values = true)]
        v: String,
    },
    /// Value and subdifferential of x ↦ inf { φ(y) | y ∈ F(x) }
    Optval {
        fmap: PathBuf,
        phi: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        at: String,
    },
    /// Run seeded trials of one calculus rule
    Check {
        theorem: String,
        #[arg(long, default_value_t = 10)]
        trials: u64,
        #[arg(long, env = "POLYCAL_SEED", default_value_t = 0)]
        seed: u64,
        /// Dimension caps `n,m`
        #[arg(long)]
        dims: Option<String>,
        #[arg(long, default_value = "qualified")]
        regime: String,
        /// Corrupt the first comparison of every trial (harness self-test)
        #[arg(long)]
        inject_fault: bool,
    },
    /// Check a single check document
    Verify { file: PathBuf },
    /// Generate an instance: polyhedron, function, svmap, pair, triple or a theorem id
    Gen {
        kind: String,
        #[arg(long, env = "POLYCAL_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        dims: Option<String>,
        #[arg(long, default_value = "qualified")]
        regime: String,
    },
    /// Print a document in canonical form
    Fmt { file: PathBuf },
}

struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Failure {
        Failure(e.to_string())
    }
}

/// Runs the CLI on `args` (including the program name).
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok((value, code)) => {
            let text = serde_json::to_string_pretty(&value).expect("json values serialize");
            let _ = writeln!(out, "{text}");
            code
        }
        Err(Failure(msg)) => {
            let _ = writeln!(err, "polycal: {msg}");
            2
        }
    }
}

fn dispatch(cmd: Command) -> Result<(Value, i32), Failure> {
    let ok = |v: Value| Ok((v, 0));
    match cmd {
        Command::RiPoint { file } => {
            let p = read_poly(&file)?;
            ok(json!({ "point": ri_point(&p)? }))
        }
        Command::RiMember { file, point } => {
            let p = read_poly(&file)?;
            let x = parse_csv(&point)?;
            ok(json!({ "member": canonicalize(&p)?.ri_member(&x)? }))
        }
        Command::NormalCone { file, point } => {
            let p = read_poly(&file)?;
            let c = normal_cone(&p, &parse_csv(&point)?)?;
            ok(json!({
                "generators": c.generators(),
                "lineality": c.lineality(),
                "set": set_value(crate::cone::cone_hrep(&c)),
            }))
        }
        Command::Separate { file1, file2 } => {
            let (p, q) = (read_poly(&file1)?, read_poly(&file2)?);
            ok(json!({ "certificate": proper_separation(&p, &q)? }))
        }
        Command::Subdiff { file, point } => {
            let f = read_fn(&file)?;
            ok(json!({ "set": set_value(&subdiff(&f, &parse_csv(&point)?)?) }))
        }
        Command::Coderiv { file, at, v } => {
            let f = match read_doc(&file)? {
                InstanceDoc::Svmap(b) => b.to_map()?,
                InstanceDoc::Maxaffine(b) => SVMap::epigraphical(&b.to_fn()?),
                other => return Err(Failure(format!("{}: expected svmap or maxaffine, found {}", file.display(), other.kind()))),
            };
            let at = parse_csv(&at)?;
            if at.len() != f.n() + f.m() {
                return Err(Failure(format!("--at needs {} coordinates, found {}", f.n() + f.m(), at.len())));
            }
            let (x, y) = at.split_at(f.n());
            ok(json!({ "set": set_value(&coderivative(&f, x, y, &parse_csv(&v)?)?.set) }))
        }
        Command::Optval { fmap, phi, at } => {
            let f = read_map(&fmap)?;
            let phi = read_fn(&phi)?;
            let mu = optimal_value(&f, &phi)?;
            let x = parse_csv(&at)?;
            ok(match mu.eval(&x)? {
                ExtReal::Finite(v) => json!({ "value": v, "subdiff": set_value(&mu.subdiff(&x)?) }),
                ExtReal::PosInf => json!({ "value": "+inf", "subdiff": null }),
            })
        }
        Command::Check { theorem, trials, seed, dims, regime, inject_fault } => {
            let id: TheoremId = theorem.parse()?;
            if trials == 0 {
                return Err(Failure("--trials must be at least 1".into()));
            }
            let cfg = SuiteConfig { trials, seed, caps: parse_caps(dims.as_deref())?, regime: regime.parse()?, inject_fault };
            let report = run_suite(&[id], &cfg)?;
            let code = report.exit_code();
            Ok((serde_json::to_value(&report)?, code))
        }
        Command::Verify { file } => {
            let check = read_doc(&file)?.to_check()?;
            let verdict = check_theorem(&check)?;
            let code = i32::from(matches!(verdict.outcome, Outcome::Mismatch { .. }));
            Ok((serde_json::to_value(&verdict)?, code))
        }
        Command::Gen { kind, seed, dims, regime } => {
            let kind: GenKind = kind.parse()?;
            let d = gen_instance(kind, parse_caps(dims.as_deref())?, regime.parse::<Regime>()?, seed)?;
            ok(serde_json::to_value(&d)?)
        }
        Command::Fmt { file } => ok(serde_json::to_value(read_doc(&file)?)?),
    }
}

fn set_value(p: &HPoly) -> Value {
    serde_json::to_value(InstanceDoc::Hpoly(HPolyBody::from(p))).expect("documents serialize")
}

fn read_doc(path: &Path) -> Result<InstanceDoc, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
    doc::parse(&text).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn read_poly(path: &Path) -> Result<HPoly, Failure> {
    match read_doc(path)? {
        InstanceDoc::Hpoly(b) => Ok(b.to_poly()?),
        other => Err(Failure(format!("{}: expected hpoly, found {}", path.display(), other.kind()))),
    }
}

fn read_fn(path: &Path) -> Result<MaxAffineFn, Failure> {
    match read_doc(path)? {
        InstanceDoc::Maxaffine(b) => Ok(b.to_fn()?),
        other => Err(Failure(format!("{}: expected maxaffine, found {}", path.display(), other.kind()))),
    }
}

fn read_map(path: &Path) -> Result<SVMap, Failure> {
    match read_doc(path)? {
        InstanceDoc::Svmap(b) => Ok(b.to_map()?),
        other => Err(Failure(format!("{}: expected svmap, found {}", path.display(), other.kind()))),
    }
}

/// `"0,1/2,-3"`; the empty string is the point of `ℝ⁰`.
fn parse_csv(s: &str) -> Result<Vec<Rat>, Failure> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|t| t.trim().parse::<Rat>().map_err(|e| Failure(format!("bad coordinate `{t}`: {e}"))))
        .collect()
}

/// `"n,m"` or `"n"` (then `m = n`).
fn parse_caps(s: Option<&str>) -> Result<Caps, Failure> {
    let Some(s) = s else { return Ok(Caps::default()) };
    let parts: Vec<usize> = s
        .split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|_| Failure(format!("bad --dims `{s}`"))))
        .collect::<Result<_, _>>()?;
    match parts[..] {
        [n] => Ok(Caps::new(n, n)?),
        [n, m] => Ok(Caps::new(n, m)?),
        _ => Err(Failure(format!("bad --dims `{s}`: expected n or n,m"))),
    }
}
