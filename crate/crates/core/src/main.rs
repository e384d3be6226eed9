use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use central_leaves::finite_field::{FieldCtx, FieldElem};
use central_leaves::leaf_closures::{
    b1, b2, family_x_t_b2, family_x_t_b3, perturbation_witness, random_k_perturbation, witness_b2_to_b1,
    witness_b3_to_b2, with_auto_extension, x_pi, PerturbationOutcome, WitnessParams,
};
use central_leaves::loop_matrix::{
    cartan_invariants, newton_point, Cocharacter, ConstMatrix, LoopMatrixJson, PuiseuxMatrix,
};
use central_leaves::newton_combinatorics::enumerate_bg_mu;
use central_leaves::puiseux::{SolveOptions, Q};
use central_leaves::Error;

const OUT_DIR_ENV: &str = "CENTRAL_LEAVES_OUT_DIR";

#[derive(Parser)]
#[command(name = "central-leaves", version, about = "σ-conjugacy classes, leaf dimensions and closure witnesses in GL_n")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate B(GL_n, μ) with defects and dimensions.
    BgEnum(BgEnumArgs),
    /// Newton point of a matrix over F_q((ε)).
    Newton(MatrixArgs),
    /// Cartan invariants (elementary divisors) of a loop matrix.
    Cartan(MatrixArgs),
    /// Run a closure witness and check it.
    Witness(WitnessArgs),
    /// Solve b·h = l⁻¹·b·σ(l) for random perturbations h of a fundamental alcove.
    Perturb(PerturbArgs),
}

#[derive(Clone, Copy, ValueEnum, PartialEq)]
enum Format {
    Text,
    Json,
    Dot,
}

#[derive(Args)]
struct Output {
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Write to this file instead of stdout; relative paths resolve against
    /// $CENTRAL_LEAVES_OUT_DIR when it is set.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Additionally write the JSON form to this file.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct BgEnumArgs {
    #[arg(long)]
    n: usize,
    /// μ as a comma list, weakly decreasing.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    mu: Vec<i64>,
    #[command(flatten)]
    output: Output,
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    B1,
    B2,
    Identity,
    Xpi,
    XtB3,
    XtB2,
}

#[derive(Args)]
struct FieldArgs {
    #[arg(long, default_value_t = 2)]
    q: u64,
    /// Degree M of the ambient field F_{q^M}.
    #[arg(long, default_value_t = 1)]
    m: u32,
}

#[derive(Args)]
struct MatrixArgs {
    #[arg(long, value_enum, conflicts_with = "matrix")]
    preset: Option<Preset>,
    /// LoopMatrix JSON file.
    #[arg(long)]
    matrix: Option<PathBuf>,
    /// Parameter of the x_t presets: an integer or the hex encoding.
    #[arg(long, default_value = "0")]
    t: String,
    /// Size of the identity preset.
    #[arg(long, default_value_t = 5)]
    n: usize,
    #[command(flatten)]
    field: FieldArgs,
    #[command(flatten)]
    output: Output,
}

#[derive(Clone, Copy, ValueEnum, PartialEq)]
enum Scenario {
    Gl3,
    Gl5,
    Perturb,
}

#[derive(Args)]
struct WitnessArgs {
    #[arg(value_enum)]
    scenario: Scenario,
    #[arg(long, default_value_t = 2)]
    q: u64,
    /// Degree M of F_{q^M}; chosen automatically when omitted.
    #[arg(long)]
    m: Option<u32>,
    /// Largest M tried by the automatic choice.
    #[arg(long, default_value_t = 12)]
    max_m: u32,
    #[arg(long, default_value = "1")]
    t: String,
    /// ε-order N of the conjugating matrix.
    #[arg(long, default_value_t = 3)]
    order: i64,
    /// Requested π-precision of each solve.
    #[arg(long, default_value = "2")]
    pi_precision: String,
    /// Deepest index compared with the valuation formulas.
    #[arg(long, default_value_t = 1)]
    depth: usize,
    #[command(flatten)]
    perturb: PerturbOpts,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Clone)]
struct PerturbOpts {
    #[arg(long, default_value_t = 1)]
    d: i64,
    #[arg(long, default_value_t = 2)]
    c: i64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of random perturbations.
    #[arg(long, default_value_t = 1)]
    count: usize,
    /// ε-order below which the equation is solved.
    #[arg(long, default_value_t = 6)]
    eps_order: i64,
    /// Largest field degree over F_p tried for l.
    #[arg(long, default_value_t = 8)]
    max_degree: usize,
}

#[derive(Args)]
struct PerturbArgs {
    #[arg(long, default_value_t = 2)]
    q: u64,
    /// Degree M of the field F_{q^M} of h.
    #[arg(long, default_value_t = 2)]
    m: u32,
    #[command(flatten)]
    opts: PerturbOpts,
    #[command(flatten)]
    output: Output,
}

/// Failure of a command, carrying its exit code.
struct Failure {
    code: u8,
    msg: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::ExtensionNeeded { .. } | Error::Precision { .. } | Error::Budget(_) => 2,
            Error::InvalidInput(_) => 3,
            Error::NotInvertible(_) | Error::Unsupported(_) => 1,
        };
        Failure {
            code,
            msg: e.to_string(),
        }
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure { code: 3, msg: msg.into() }
}

fn io_failure(e: std::io::Error) -> Failure {
    Failure {
        code: 1,
        msg: e.to_string(),
    }
}

type CmdResult = std::result::Result<bool, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 3 } else { 0 });
        }
    };
    let res = match cli.command {
        Command::BgEnum(a) => cmd_bg_enum(&a),
        Command::Newton(a) => cmd_matrix(&a, true),
        Command::Cartan(a) => cmd_matrix(&a, false),
        Command::Witness(a) => cmd_witness(&a),
        Command::Perturb(a) => cmd_perturb(a.q, a.m, &a.opts, &a.output),
    };
    match res {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}

fn resolve(path: &PathBuf) -> PathBuf {
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) if path.is_relative() => PathBuf::from(dir).join(path),
        _ => path.clone(),
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

/// Emits `text`, `json` or `dot` according to `out`.
fn emit(out: &Output, text: String, json: String, dot: Option<String>) -> std::result::Result<(), Failure> {
    let body = match out.format {
        Format::Text => text,
        Format::Json => json.clone(),
        Format::Dot => dot.ok_or_else(|| usage("DOT output is only available for bg-enum"))?,
    };
    match &out.out {
        Some(p) => fs::write(resolve(p), body).map_err(io_failure)?,
        None => print!("{body}"),
    }
    if let Some(p) = &out.json {
        fs::write(resolve(p), json).map_err(io_failure)?;
    }
    Ok(())
}

fn cmd_bg_enum(a: &BgEnumArgs) -> CmdResult {
    let mu = Cocharacter::new(a.mu.clone())?;
    let table = enumerate_bg_mu(a.n, &mu)?;
    emit(&a.output, table.to_text(), to_json(&table.to_json()), Some(table.to_dot()))?;
    Ok(true)
}

fn parse_t(ctx: &Arc<FieldCtx>, s: &str) -> std::result::Result<FieldElem, Failure> {
    if let Ok(n) = s.parse::<i64>() {
        return Ok(FieldElem::from_int(ctx, n));
    }
    Ok(FieldElem::from_hex(ctx, s)?)
}

enum Loaded {
    Field(ConstMatrix),
    Puiseux(PuiseuxMatrix),
}

fn load_matrix(a: &MatrixArgs) -> std::result::Result<Loaded, Failure> {
    if let Some(path) = &a.matrix {
        let raw = fs::read_to_string(path).map_err(io_failure)?;
        let json: LoopMatrixJson =
            serde_json::from_str(&raw).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        return Ok(if json.base == "puiseux" {
            Loaded::Puiseux(PuiseuxMatrix::from_json(&json)?)
        } else {
            Loaded::Field(ConstMatrix::from_json(&json)?)
        });
    }
    let preset = a.preset.ok_or_else(|| usage("one of --preset or --matrix is required"))?;
    let ctx = FieldCtx::for_q(a.field.q, a.field.m)?;
    let t = parse_t(&ctx, &a.t)?;
    Ok(match preset {
        Preset::B1 => Loaded::Field(b1(&ctx)),
        Preset::B2 => Loaded::Field(b2(&ctx)),
        Preset::Identity => Loaded::Field(ConstMatrix::identity(&ctx, a.n)),
        Preset::Xpi => Loaded::Puiseux(x_pi(&ctx)),
        Preset::XtB3 => Loaded::Field(family_x_t_b3(&t)),
        Preset::XtB2 => Loaded::Field(family_x_t_b2(&t)),
    })
}

#[derive(Serialize)]
struct InvariantJson {
    schema_version: u32,
    kind: &'static str,
    value: Vec<String>,
}

fn cmd_matrix(a: &MatrixArgs, newton: bool) -> CmdResult {
    let m = load_matrix(a)?;
    let (kind, value) = if newton {
        let b = match m {
            Loaded::Field(b) => b,
            Loaded::Puiseux(_) => {
                return Err(usage("the Newton point needs a matrix over F_q((ε)); x_π has Puiseux entries"))
            }
        };
        ("newton_point", newton_point(&b)?.to_strings())
    } else {
        let mu = match m {
            Loaded::Field(b) => cartan_invariants(&b)?,
            Loaded::Puiseux(b) => cartan_invariants(&b)?,
        };
        ("cartan_invariants", mu.as_slice().iter().map(|x| x.to_string()).collect())
    };
    let text = format!("{kind}: ({})\n", value.join(", "));
    let json = to_json(&InvariantJson {
        schema_version: 1,
        kind,
        value,
    });
    emit(&a.output, text, json, None)?;
    Ok(true)
}

fn cmd_witness(a: &WitnessArgs) -> CmdResult {
    if a.scenario == Scenario::Perturb {
        return cmd_perturb(a.q, a.m.unwrap_or(2), &a.perturb, &a.output);
    }
    let target: Q = a
        .pi_precision
        .parse()
        .map_err(|_| usage(format!("bad π-precision {:?}", a.pi_precision)))?;
    let params = WitnessParams {
        order: a.order,
        depth: a.depth,
        solve: SolveOptions::with_target(target),
    };
    let run = |ctx: &Arc<FieldCtx>| {
        let t = parse_t(ctx, &a.t).map_err(|f| Error::InvalidInput(f.msg))?;
        match a.scenario {
            Scenario::Gl3 => witness_b3_to_b2(ctx, &t, &params),
            _ => witness_b2_to_b1(ctx, &t, &params),
        }
    };
    let (_, report) = match a.m {
        Some(m) => with_auto_extension(a.q, m, m, run)?,
        None => with_auto_extension(a.q, 1, a.max_m, run)?,
    };
    emit(&a.output, report.to_text(), to_json(&report), None)?;
    Ok(report.pass)
}

#[derive(Serialize)]
struct PerturbationBatch {
    schema_version: u32,
    seed: u64,
    runs: Vec<PerturbationOutcome>,
    passed: usize,
    pass: bool,
}

fn cmd_perturb(q: u64, m: u32, o: &PerturbOpts, out: &Output) -> CmdResult {
    let ctx = FieldCtx::for_q(q, m)?;
    let b = b2(&ctx);
    let mut rng = ChaCha8Rng::seed_from_u64(o.seed);
    let mut runs = Vec::with_capacity(o.count);
    let mut text = String::new();
    for i in 0..o.count {
        let h = random_k_perturbation(&ctx, b.size(), o.d + o.c, o.eps_order, &mut rng);
        let r = perturbation_witness(&b, &h, o.d, o.c, o.eps_order, o.max_degree)?;
        text.push_str(&format!("run {i}: {}", r.to_text()));
        runs.push(r);
    }
    let passed = runs.iter().filter(|r| r.pass).count();
    text.push_str(&format!("{passed}/{} perturbations solved\n", runs.len()));
    let batch = PerturbationBatch {
        schema_version: 1,
        seed: o.seed,
        pass: passed == runs.len(),
        passed,
        runs,
    };
    emit(out, text, to_json(&batch), None)?;
    Ok(batch.pass)
}
