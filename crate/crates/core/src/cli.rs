//! The `segre` command-line driver.
//!
//! Exit codes: 0 when every check passed, 1 when a mathematical check
//! failed, 2 on usage or I/O errors.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::chow::CurveClass;
use crate::field::{Field, PrimeField, RationalField, DEFAULT_PRIME};
use crate::hyperext::{
    beilinson_table, expected_beilinson_table, ext_dims, EngineChoice, DEFAULT_EXT_CHARGE_BOUND,
};
use crate::lines::{graded_lex, jumping_divisor, JumpingDivisor};
use crate::monad::{
    deserialize, deserialize_any, random_monad_with_stats, serialize, to_json, validate_monad,
    AnyMonad, Monad, MonadShape, ShapeKind,
};
use crate::stability::{
    ulrich_check, verify_instanton, StabilityLevel, DEFAULT_WINDOW, VERIFY_POINTS,
};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Generation attempts before giving up.
pub const DEFAULT_ATTEMPTS: usize = 20;

#[derive(Parser, Debug)]
#[command(name = "segre", version, about = "Instanton bundles on P1 x P1 x P1")]
pub struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[arg(long, value_enum, default_value = "json", global = true)]
    pub format: Format,
    /// Output path (the monad file for `generate`, the report otherwise).
    #[arg(short = 'o', long, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Shape {
    Kernel,
    Global,
}

impl From<Shape> for ShapeKind {
    fn from(s: Shape) -> Self {
        match s {
            Shape::Kernel => ShapeKind::Kernel,
            Shape::Global => ShapeKind::Global,
        }
    }
}

#[derive(Args, Debug, Clone, Copy)]
pub struct FieldArgs {
    /// Work over F_P.
    #[arg(long, conflicts_with = "rational")]
    pub prime: Option<u64>,
    /// Work over the rationals.
    #[arg(long)]
    pub rational: bool,
}

#[derive(Args, Debug, Clone, Copy)]
pub struct EngineArgs {
    /// Use the bounded-box Čech engine at this pad (checked against pad + 2).
    #[arg(long)]
    pub pad: Option<i64>,
}

impl EngineArgs {
    fn choice(&self) -> EngineChoice {
        match self.pad {
            Some(pad) => EngineChoice::Box { pad },
            None => EngineChoice::Auto,
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate a random monad and write it as JSON.
    Generate {
        #[arg(long, value_parser = parse_c2)]
        c2: CurveClass,
        #[arg(long, value_enum, default_value = "kernel")]
        shape: Shape,
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_ATTEMPTS)]
        attempts: usize,
    },
    /// Check every instanton condition and the Beilinson table.
    Verify {
        input: PathBuf,
        #[arg(long, default_value_t = DEFAULT_WINDOW)]
        window: i64,
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        engine: EngineArgs,
    },
    /// The cohomology of the eight Beilinson twists.
    Table {
        input: PathBuf,
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        engine: EngineArgs,
    },
    /// Dimensions of Ext^i(E, E).
    Ext {
        input: PathBuf,
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        engine: EngineArgs,
    },
    /// Whether E(h) is Ulrich (charge 2 only).
    Ulrich {
        input: PathBuf,
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        engine: EngineArgs,
    },
    /// Jumping divisors of the line families.
    Jump {
        input: PathBuf,
        /// Only this family (default: all three).
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
        family: Option<u8>,
        /// Side of the sampling grid.
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        field: FieldArgs,
    },
}

pub fn parse_c2(s: &str) -> std::result::Result<CurveClass, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("expected k1,k2,k3, got {s:?}"));
    }
    let mut k = [0i64; 3];
    for (i, p) in parts.iter().enumerate() {
        k[i] = p.parse().map_err(|_| format!("not an integer: {p:?}"))?;
    }
    Ok(CurveClass(k))
}

/// Result of a command: its report and whether all checks passed.
pub struct Outcome {
    pub report: Value,
    pub text: String,
    pub passed: bool,
}

/// Runs the parsed command and returns the exit code. Errors are usage or
/// I/O errors, or mathematical failures surfaced as [`crate::Error`].
pub fn run(cli: &Cli) -> Result<i32> {
    if let Some(n) = cli.jobs {
        // Ignored when a pool already exists (repeated calls in one process).
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    let outcome = match &cli.command {
        Command::Generate {
            c2,
            shape,
            field,
            seed,
            attempts,
        } => cmd_generate(cli, *c2, (*shape).into(), *field, *seed, *attempts)?,
        Command::Verify {
            input,
            window,
            field,
            engine,
        } => with_monad(
            input,
            *field,
            Task::Verify {
                window: *window,
                engine: engine.choice(),
            },
        )?,
        Command::Table {
            input,
            field,
            engine,
        } => with_monad(input, *field, Task::Table(engine.choice()))?,
        Command::Ext {
            input,
            field,
            engine,
        } => with_monad(input, *field, Task::Ext(engine.choice()))?,
        Command::Ulrich {
            input,
            field,
            engine,
        } => with_monad(input, *field, Task::Ulrich(engine.choice()))?,
        Command::Jump {
            input,
            family,
            grid,
            seed,
            field,
        } => with_monad(
            input,
            *field,
            Task::Jump {
                family: family.map(usize::from),
                grid: *grid,
                seed: *seed,
            },
        )?,
    };
    let body = match cli.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&outcome.report)?;
            s.push('\n');
            s
        }
        Format::Text => outcome.text,
    };
    match (&cli.command, &cli.output) {
        (Command::Generate { .. }, Some(_)) | (_, None) => print!("{body}"),
        (_, Some(path)) => {
            fs::write(path, body).with_context(|| format!("writing {}", path.display()))?
        }
    }
    Ok(if outcome.passed {
        EXIT_PASS
    } else {
        EXIT_CHECK_FAILED
    })
}

/// Exit code for an error returned by [`run`].
pub fn exit_code(err: &anyhow::Error) -> i32 {
    use crate::Error as E;
    match err.downcast_ref::<crate::Error>() {
        Some(
            E::Precondition(_)
            | E::InvalidShape(_)
            | E::Parse { .. }
            | E::PrimeMismatch { .. }
            | E::FieldMismatch(_),
        ) => EXIT_USAGE,
        Some(_) => EXIT_CHECK_FAILED,
        None => EXIT_USAGE,
    }
}

fn header<F: Field>(command: &str, m: &Monad<F>) -> serde_json::Map<String, Value> {
    let mut h = serde_json::Map::new();
    h.insert("tool".into(), json!("segre"));
    h.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    h.insert("command".into(), json!(command));
    h.insert("field".into(), json!(m.field.spec()));
    h.insert("monad_seed".into(), json!(m.seed));
    h.insert("shape".into(), json!(m.shape.kind));
    h.insert("c2".into(), json!(m.shape.c2.0));
    h.insert("seed".into(), Value::Null);
    h.insert("pad".into(), Value::Null);
    h.insert("window".into(), Value::Null);
    h
}

fn pad_json(engine: EngineChoice) -> Value {
    match engine {
        EngineChoice::Box { pad } => json!(pad),
        _ => Value::Null,
    }
}

/// A command that reads a monad file.
enum Task {
    Verify {
        window: i64,
        engine: EngineChoice,
    },
    Table(EngineChoice),
    Ext(EngineChoice),
    Ulrich(EngineChoice),
    Jump {
        family: Option<usize>,
        grid: Option<usize>,
        seed: u64,
    },
}

fn run_task<F: Field>(m: &Monad<F>, task: &Task) -> Result<Outcome> {
    match *task {
        Task::Verify { window, engine } => verify_report(m, window, engine),
        Task::Table(engine) => table_report(m, engine),
        Task::Ext(engine) => ext_report(m, engine),
        Task::Ulrich(engine) => ulrich_report(m, engine),
        Task::Jump { family, grid, seed } => jump_report(m, family, grid, seed),
    }
}

fn with_monad(path: &Path, field: FieldArgs, task: Task) -> Result<Outcome> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let ctx = || format!("parsing {}", path.display());
    if field.rational {
        let m = deserialize(&text, RationalField).with_context(ctx)?;
        return run_task(&m, &task);
    }
    if let Some(p) = field.prime {
        let fp = PrimeField::new(p).map_err(crate::Error::Precondition)?;
        let m = deserialize(&text, fp).with_context(ctx)?;
        return run_task(&m, &task);
    }
    match deserialize_any(&text).with_context(ctx)? {
        AnyMonad::Prime(m) => run_task(&m, &task),
        AnyMonad::Rational(m) => run_task(&m, &task),
    }
}

fn cmd_generate(
    cli: &Cli,
    c2: CurveClass,
    kind: ShapeKind,
    field: FieldArgs,
    seed: u64,
    attempts: usize,
) -> Result<Outcome> {
    let shape = MonadShape::new(kind, c2)?;
    if field.rational {
        generate_with(cli, shape, RationalField, seed, attempts)
    } else {
        let p = field.prime.unwrap_or(DEFAULT_PRIME);
        let f = PrimeField::new(p).map_err(crate::Error::Precondition)?;
        generate_with(cli, shape, f, seed, attempts)
    }
}

fn generate_with<F: Field>(
    cli: &Cli,
    shape: MonadShape,
    field: F,
    seed: u64,
    attempts: usize,
) -> Result<Outcome> {
    let (m, stats) = random_monad_with_stats(shape, field, seed, attempts)?;
    let validity = validate_monad(&m, VERIFY_POINTS);
    let ranks = shape.ranks();
    let file = serialize(&m);
    let mut h = header("generate", &m);
    match &cli.output {
        Some(path) => {
            fs::write(path, &file).with_context(|| format!("writing {}", path.display()))?;
            h.insert("file".into(), json!(path.display().to_string()));
        }
        None => {
            h.insert("monad".into(), to_json(&m));
        }
    }
    h.insert("seed".into(), json!(seed));
    h.insert(
        "ranks".into(),
        json!({"A": ranks[0], "B": ranks[1], "C": ranks[2]}),
    );
    h.insert("valid".into(), json!(validity.is_valid()));
    h.insert("validity".into(), serde_json::to_value(&validity)?);
    h.insert("attempts".into(), json!(stats.attempts));
    let verdict = if validity.is_valid() {
        "valid"
    } else {
        validity.failure_mode().unwrap_or("invalid")
    };
    let mut text = format!(
        "{} monad, c2 = {}, over {}, seed {}: {verdict}\nranks: A = {}, B = {}, C = {}\n",
        kind_name(shape.kind),
        shape.c2,
        m.field.spec(),
        seed,
        ranks[0],
        ranks[1],
        ranks[2]
    );
    if cli.output.is_none() {
        text = file.clone();
    }
    Ok(Outcome {
        report: Value::Object(h),
        text,
        passed: validity.is_valid(),
    })
}

fn kind_name(k: ShapeKind) -> &'static str {
    match k {
        ShapeKind::Kernel => "kernel",
        ShapeKind::Global => "global",
    }
}

fn table_json<F: Field>(m: &Monad<F>, engine: EngineChoice) -> Result<(Value, String, bool)> {
    let rows = beilinson_table(m, engine)?;
    let expected = expected_beilinson_table(m.shape.c2);
    let matches = rows.iter().zip(expected.iter()).all(|(r, e)| r.dims == *e);
    let mut text = String::new();
    writeln!(
        text,
        "{:<14} {:>5} {:>5} {:>5} {:>5}  {:<10} engine",
        "twist", "h0", "h1", "h2", "h3", "expected"
    )?;
    for (r, e) in rows.iter().zip(expected.iter()) {
        let d = r.dims.0;
        let ok = if r.dims == *e { "ok" } else { "MISMATCH" };
        writeln!(
            text,
            "{:<14} {:>5} {:>5} {:>5} {:>5}  {:<10} {}",
            r.twist.to_string(),
            d[0],
            d[1],
            d[2],
            d[3],
            ok,
            serde_json::to_value(r.engine)?["engine"]
                .as_str()
                .unwrap_or("")
        )?;
    }
    let v = json!({
        "rows": rows,
        "expected": expected.iter().map(|e| e.0).collect::<Vec<_>>(),
        "matches_expected": matches,
    });
    Ok((v, text, matches))
}

fn verify_report<F: Field>(m: &Monad<F>, window: i64, engine: EngineChoice) -> Result<Outcome> {
    let report = verify_instanton(m, window, engine)?;
    let mut h = header("verify", m);
    h.insert("window".into(), json!(window));
    h.insert("pad".into(), pad_json(engine));
    let mut text = String::new();
    for c in &report.checks {
        writeln!(
            text,
            "{:<12} {:<5} {}",
            c.name,
            if c.passed { "PASS" } else { "FAIL" },
            c.detail
        )?;
    }
    let mut passed = report.passed();
    if report.validity.is_valid() {
        let (tj, tt, tm) = table_json(m, engine)?;
        h.insert("table".into(), tj);
        writeln!(text, "\nBeilinson table:\n{tt}")?;
        passed &= tm;
    }
    if let Some(s) = &report.stability {
        let line = match &s.level {
            StabilityLevel::StableWithinWindow => {
                format!("stable within window {} ({} classes)", s.window, s.checked)
            }
            StabilityLevel::StrictlySemistableWitness { witness, h0 } => {
                format!(
                    "not stable: h0(E{witness}) = {h0} with degree 0 (window {})",
                    s.window
                )
            }
            StabilityLevel::UnstableWitness { witness, h0 } => {
                format!(
                    "not semistable: h0(E{witness}) = {h0} with negative degree (window {})",
                    s.window
                )
            }
            StabilityLevel::Undetermined { reason } => format!("undetermined: {reason}"),
        };
        writeln!(text, "stability: {line}")?;
    }
    writeln!(text, "{}", if passed { "PASS" } else { "FAIL" })?;
    h.insert("report".into(), serde_json::to_value(&report)?);
    h.insert("passed".into(), json!(passed));
    Ok(Outcome {
        report: Value::Object(h),
        text,
        passed,
    })
}

fn table_report<F: Field>(m: &Monad<F>, engine: EngineChoice) -> Result<Outcome> {
    let (tj, text, passed) = table_json(m, engine)?;
    let mut h = header("table", m);
    h.insert("pad".into(), pad_json(engine));
    h.insert("table".into(), tj);
    h.insert("passed".into(), json!(passed));
    Ok(Outcome {
        report: Value::Object(h),
        text,
        passed,
    })
}

fn ext_report<F: Field>(m: &Monad<F>, engine: EngineChoice) -> Result<Outcome> {
    let r = ext_dims(m, DEFAULT_EXT_CHARGE_BOUND, engine)?;
    let k = m.shape.charge();
    let expected = [1, 4 * k - 3, 0, 0];
    let passed = r.dims == expected;
    let [a, b, c, d] = r.dims;
    let text = format!("hom={a} ext1={b} ext2={c} ext3={d}\n");
    let mut h = header("ext", m);
    h.insert("pad".into(), pad_json(engine));
    h.insert("dims".into(), json!(r.dims));
    h.insert("expected".into(), json!(expected));
    h.insert("chi".into(), json!(a - b + c - d));
    h.insert("engine".into(), serde_json::to_value(r.engine)?);
    h.insert("passed".into(), json!(passed));
    Ok(Outcome {
        report: Value::Object(h),
        text,
        passed,
    })
}

fn ulrich_report<F: Field>(m: &Monad<F>, engine: EngineChoice) -> Result<Outcome> {
    let r = ulrich_check(m, engine)?;
    let mut text = String::new();
    for (t, v) in &r.table {
        writeln!(text, "h*(E({t}h)) = {v}")?;
    }
    match r.failing {
        None => writeln!(text, "E(h) is Ulrich")?,
        Some((i, t)) => writeln!(text, "not Ulrich: h{i}(E({t}h)) != 0")?,
    }
    let mut h = header("ulrich", m);
    h.insert("pad".into(), pad_json(engine));
    h.insert("report".into(), serde_json::to_value(&r)?);
    h.insert("passed".into(), json!(r.holds));
    Ok(Outcome {
        report: Value::Object(h),
        text,
        passed: r.holds,
    })
}

/// JSON for a jumping divisor; coefficients of `s^i t^j` in graded-lex order.
pub fn divisor_json<F: Field>(f: &F, d: &JumpingDivisor<F::Elem>) -> Value {
    let coefficients: Option<Vec<Value>> = d.polynomial.as_ref().map(|p| {
        graded_lex(p.d, p.e)
            .into_iter()
            .map(|(i, j)| json!({"s": i, "t": j, "c": f.render(p.coeff(i, j))}))
            .collect()
    });
    json!({
        "family": d.family,
        "expected_bidegree": [d.expected.0, d.expected.1],
        "bidegree": [d.observed.0, d.observed.1],
        "grid": d.grid_size,
        "coefficients": coefficients,
        "holdout": d.holdout,
        "generic": d.is_generic(),
        "failure": d.failure(),
    })
}

fn jump_report<F: Field>(
    m: &Monad<F>,
    family: Option<usize>,
    grid: Option<usize>,
    seed: u64,
) -> Result<Outcome> {
    let families: Vec<usize> = family.map_or(vec![1, 2, 3], |f| vec![f]);
    let mut out = Vec::new();
    let mut text = String::new();
    let mut passed = true;
    for fam in families {
        let d = jumping_divisor(m, fam, grid, seed)?;
        passed &= d.is_generic();
        write!(
            text,
            "family {fam}: bidegree ({},{}) expected ({},{})",
            d.observed.0, d.observed.1, d.expected.0, d.expected.1
        )?;
        match d.failure() {
            None => writeln!(
                text,
                ", holdout {}/{} zero-set and {}/{} generic points consistent",
                d.holdout.zero_points_jumping,
                d.holdout.zero_points,
                d.holdout.generic_nonzero,
                d.holdout.generic_points
            )?,
            Some(msg) => writeln!(text, ", non-generic instanton: {msg}")?,
        }
        out.push(divisor_json(&m.field, &d));
    }
    let mut h = header("jump", m);
    h.insert("seed".into(), json!(seed));
    h.insert("divisors".into(), Value::Array(out));
    h.insert("passed".into(), json!(passed));
    Ok(Outcome {
        report: Value::Object(h),
        text,
        passed,
    })
}
