//! `stablekit` command-line front end.
//!
//! Exit codes: 0 a report was produced (verdicts live inside it), 1 a
//! mathematical precondition failed, 2 an I/O or parse error.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{json, Value};

use stablekit::aztec::{arctan_limit, aztec_rows, compare_report, AZTEC_MAX_T};
use stablekit::graph::Graph;
use stablekit::permbounds::{
    bmv_coeffs, bregman_bound, capacity, capacity_of_matrix, gurvits_bound, mmcpt_check, permanent_naive,
    permanent_ryser, DEFAULT_CAPACITY_TOL,
};
use stablekit::rational::{format_rational, parse_rational, rat_strs, to_f64, RatStr};
use stablekit::realroot::{
    apply_multiplier, forest_polynomial, is_real_rooted, matching_polynomial, newton_ulc_check, pf_check,
    polya_schur_refute, CoeffSeq, MultiplierSeq,
};
use stablekit::srmeasure::{
    coupling_check, determinantal, exclusion_evolve, exclusion_oracle, sr_battery, total_variation, CouplingProblem,
    CubeMeasure, KernelMatrix, RankWeights, Relation, DEFAULT_STEPS, ORACLE_MAX_D,
};
use stablekit::stability::{cone_membership, hyperbolicity_refute, refute_stability, Verdict};
use stablekit::{Error, PolyQ, Rational, RationalMatrix, UniPolyQ, VERSION};

#[derive(Parser, Debug)]
#[command(name = "stablekit", version, about = "Exact stability, strong Rayleigh and permanent toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Primary input file (JSON).
    #[arg(long = "in", global = true)]
    input: Option<PathBuf>,
    /// Secondary input file (JSON).
    #[arg(long = "in2", global = true)]
    input2: Option<PathBuf>,
    /// Report destination; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, default_value_t = 200)]
    trials: usize,
    #[arg(long, global = true, default_value_t = DEFAULT_CAPACITY_TOL)]
    tol: f64,
    /// Aztec table depth; maximum test degree for `multiplier`.
    #[arg(long = "t-max", global = true)]
    t_max: Option<usize>,
    /// Largest Toeplitz minor order for `pf`.
    #[arg(long = "max-minor", global = true, default_value_t = 4)]
    max_minor: usize,
    /// Trotter steps for `exclusion`.
    #[arg(long, global = true, default_value_t = DEFAULT_STEPS)]
    steps: usize,
    /// Support relation for `coupling`.
    #[arg(long, global = true, value_enum, default_value_t = RelationArg::Dominates)]
    relation: RelationArg,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Refute real stability of a polynomial by exact line restriction.
    Stability,
    /// Refute hyperbolicity of a homogeneous polynomial in direction `x` (`--in2 {"x": [...]}`).
    Hyperbolicity,
    /// Decide whether `x` lies in the hyperbolicity cone of `xi` (`--in2 {"xi": [...], "x": [...]}`).
    Cone,
    /// Newton inequalities, ultra log-concavity and real-rootedness of a coefficient sequence.
    Newton,
    /// Toeplitz minors of a coefficient sequence up to `--max-minor`.
    Pf,
    /// Refute a multiplier sequence; `--in2` optionally supplies a polynomial to transform.
    Multiplier,
    /// Matching polynomial of a weighted graph given as a symmetric matrix.
    Matchings,
    /// Forest polynomial of a graph.
    Forests,
    /// Strong Rayleigh consequence battery of a cube measure.
    SrAudit,
    /// Apply a chain of closure operations (`--in2`) to a cube measure.
    SrClosure,
    /// Exclusion dynamics (`--in2 {"rates": matrix, "t": "num/den"}`).
    Exclusion,
    /// Determinantal measure of a kernel matrix.
    Detmeasure,
    /// Coupling feasibility of two cube measures (`--in` source, `--in2` target).
    Coupling,
    /// Exact permanent.
    Permanent,
    /// Capacity upper bound of a matrix product polynomial or a polynomial.
    Capacity,
    /// Permanent lower bound through capacity.
    Gurvits,
    /// Permanent upper bound from row sums of a zero-one matrix.
    Bregman,
    /// Real-rootedness of per(zJ + A) for a monotone-column matrix.
    Mmcpt,
    /// Coefficients of Tr((A + lambda B)^n) (`--in {"a": matrix, "b": matrix, "n": int}`).
    Bmv,
    /// Aztec placement probabilities as CSV (odd-parity entries up to `--t-max`), or along rays listed in `--in`.
    Aztec,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum RelationArg {
    Dominates,
    Covers,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Stability => "stability",
            Command::Hyperbolicity => "hyperbolicity",
            Command::Cone => "cone",
            Command::Newton => "newton",
            Command::Pf => "pf",
            Command::Multiplier => "multiplier",
            Command::Matchings => "matchings",
            Command::Forests => "forests",
            Command::SrAudit => "sr-audit",
            Command::SrClosure => "sr-closure",
            Command::Exclusion => "exclusion",
            Command::Detmeasure => "detmeasure",
            Command::Coupling => "coupling",
            Command::Permanent => "permanent",
            Command::Capacity => "capacity",
            Command::Gurvits => "gurvits",
            Command::Bregman => "bregman",
            Command::Mmcpt => "mmcpt",
            Command::Bmv => "bmv",
            Command::Aztec => "aztec",
        }
    }
}

/// Failure classes mapped to exit codes.
#[derive(Debug)]
enum Failure {
    Math(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Math(_) => 1,
            Failure::Io(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Math(m) | Failure::Io(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_parse() {
            Failure::Io(e.to_string())
        } else {
            Failure::Math(e.to_string())
        }
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

enum Output {
    Json(Value),
    Csv(String),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = std::env::var("STABLEKIT_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        // ignore a second initialisation; the first pool wins
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    match run(&cli).and_then(|out| emit(&cli, out)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("stablekit {}: {}", cli.command.name(), f.message());
            ExitCode::from(f.code())
        }
    }
}

fn emit(cli: &Cli, out: Output) -> Outcome<()> {
    let text = match out {
        Output::Json(result) => {
            let report = json!({
                "tool": "stablekit",
                "version": VERSION,
                "command": cli.command.name(),
                "config": config_json(cli),
                "result": result,
            });
            let mut s = serde_json::to_string_pretty(&report).map_err(|e| Failure::Io(e.to_string()))?;
            s.push('\n');
            s
        }
        Output::Csv(s) => s,
    };
    match &cli.out {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn config_json(cli: &Cli) -> Value {
    let path = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string());
    json!({
        "in": path(&cli.input),
        "in2": path(&cli.input2),
        "seed": cli.seed,
        "trials": cli.trials,
        "tol": cli.tol,
        "t_max": cli.t_max,
        "max_minor": cli.max_minor,
        "steps": cli.steps,
        "relation": match cli.relation {
            RelationArg::Dominates => "dominates",
            RelationArg::Covers => "covers",
        },
    })
}

fn read_value(path: Option<&Path>, flag: &str) -> Outcome<Value> {
    let path = path.ok_or_else(|| Failure::Io(format!("missing required {flag} file")))?;
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn decode<T: DeserializeOwned>(v: Value, what: &str) -> Outcome<T> {
    serde_json::from_value(v).map_err(|e| Failure::Io(format!("malformed {what}: {e}")))
}

fn input<T: DeserializeOwned>(cli: &Cli, what: &str) -> Outcome<T> {
    decode(read_value(cli.input.as_deref(), "--in")?, what)
}

fn input2<T: DeserializeOwned>(cli: &Cli, what: &str) -> Outcome<T> {
    decode(read_value(cli.input2.as_deref(), "--in2")?, what)
}

/// Parses a cube measure, separating malformed files (exit 2) from laws that
/// fail validation (exit 1).
fn measure_from(v: Value) -> Outcome<CubeMeasure> {
    #[derive(Deserialize)]
    struct Raw {
        d: usize,
        probs: BTreeMap<String, String>,
    }
    let raw: Raw = decode(v.clone(), "measure")?;
    for (k, p) in &raw.probs {
        if k.len() != raw.d || !k.bytes().all(|b| b == b'0' || b == b'1') {
            return Err(Failure::Io(format!("malformed measure: state {k:?} is not a {}-bit string", raw.d)));
        }
        parse_rational(p).map_err(|e| Failure::Io(format!("malformed measure: {e}")))?;
    }
    serde_json::from_value(v).map_err(|e| Failure::Math(e.to_string()))
}

fn measure_in(cli: &Cli) -> Outcome<CubeMeasure> {
    measure_from(read_value(cli.input.as_deref(), "--in")?)
}

fn matrix_in(cli: &Cli) -> Outcome<RationalMatrix> {
    input(cli, "matrix")
}

fn vector(v: Vec<RatStr>) -> Vec<Rational> {
    v.into_iter().map(|r| r.0).collect()
}

fn ser<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report types serialize")
}

fn run(cli: &Cli) -> Outcome<Output> {
    let json = match cli.command {
        Command::Stability => stability(cli)?,
        Command::Hyperbolicity => hyperbolicity(cli)?,
        Command::Cone => cone(cli)?,
        Command::Newton => newton(cli)?,
        Command::Pf => pf(cli)?,
        Command::Multiplier => multiplier(cli)?,
        Command::Matchings => matchings(cli)?,
        Command::Forests => forests(cli)?,
        Command::SrAudit => sr_audit(cli)?,
        Command::SrClosure => sr_closure(cli)?,
        Command::Exclusion => exclusion(cli)?,
        Command::Detmeasure => detmeasure(cli)?,
        Command::Coupling => coupling(cli)?,
        Command::Permanent => permanent(cli)?,
        Command::Capacity => capacity_cmd(cli)?,
        Command::Gurvits => ser(&gurvits_bound(&matrix_in(cli)?)?),
        Command::Bregman => ser(&bregman_bound(&matrix_in(cli)?)?),
        Command::Mmcpt => ser(&mmcpt_check(&matrix_in(cli)?, cli.trials, cli.seed)?),
        Command::Bmv => bmv(cli)?,
        Command::Aztec => return aztec(cli).map(Output::Csv),
    };
    Ok(Output::Json(json))
}

fn verdict_json(v: &Verdict, replay: Option<bool>) -> Value {
    let mut j = ser(v);
    if let (Some(r), Value::Object(m)) = (replay, &mut j) {
        m.insert("witness_replayed".into(), json!(r));
    }
    j
}

fn stability(cli: &Cli) -> Outcome<Value> {
    let p: PolyQ = input(cli, "polynomial")?;
    let v = refute_stability(&p, cli.trials, cli.seed)?;
    let replay = v.witness().map(|w| w.replay(&p)).transpose()?;
    Ok(json!({
        "d": p.d(),
        "multi_affine": p.is_multi_affine(),
        "homogeneous": p.is_homogeneous(),
        "verdict": verdict_json(&v, replay),
    }))
}

fn hyperbolicity(cli: &Cli) -> Outcome<Value> {
    #[derive(Deserialize)]
    struct Dir {
        x: Vec<RatStr>,
    }
    let p: PolyQ = input(cli, "polynomial")?;
    let x = vector(input2::<Dir>(cli, "direction")?.x);
    let v = hyperbolicity_refute(&p, &x, cli.trials, cli.seed)?;
    let replay = v.witness().map(|w| w.replay_hyperbolicity(&p)).transpose()?;
    Ok(json!({"x": rat_strs(&x), "verdict": verdict_json(&v, replay)}))
}

fn cone(cli: &Cli) -> Outcome<Value> {
    #[derive(Deserialize)]
    struct Pts {
        xi: Vec<RatStr>,
        x: Vec<RatStr>,
    }
    let p: PolyQ = input(cli, "polynomial")?;
    let pts: Pts = input2(cli, "cone points")?;
    let (xi, x) = (vector(pts.xi), vector(pts.x));
    let inside = cone_membership(&p, &xi, &x)?;
    Ok(json!({"xi": rat_strs(&xi), "x": rat_strs(&x), "in_cone": inside}))
}

fn coeff_seq(cli: &Cli) -> Outcome<CoeffSeq> {
    let f: UniPolyQ = input(cli, "coefficient sequence")?;
    Ok(CoeffSeq::from_poly(&f)?)
}

fn newton(cli: &Cli) -> Outcome<Value> {
    let a = coeff_seq(cli)?;
    let rep = newton_ulc_check(&a);
    let f = a.to_poly();
    let real_rooted = if f.degree().unwrap_or(0) == 0 { true } else { is_real_rooted(&f)? };
    Ok(json!({"ulc": ser(&rep), "passes": rep.passes(), "real_rooted": real_rooted}))
}

fn pf(cli: &Cli) -> Outcome<Value> {
    if cli.max_minor == 0 {
        return Err(Failure::Math("--max-minor must be at least 1".into()));
    }
    let a = coeff_seq(cli)?;
    Ok(json!({"max_minor": cli.max_minor, "pf": pf_check(&a, cli.max_minor)}))
}

fn multiplier(cli: &Cli) -> Outcome<Value> {
    let lambda: UniPolyQ = input(cli, "multiplier sequence")?;
    let seq = MultiplierSeq::new(lambda.coeffs().to_vec());
    let n_max = cli.t_max.unwrap_or(seq.len().saturating_sub(1));
    let mut out = json!({"n_max": n_max, "outcome": ser(&polya_schur_refute(&seq, n_max))});
    if cli.input2.is_some() {
        let f: UniPolyQ = input2(cli, "polynomial")?;
        let g = apply_multiplier(&seq, &f)?;
        let rr = g.is_zero() || g.degree() == Some(0) || is_real_rooted(&g)?;
        out["image"] = json!({"poly": ser(&g), "real_rooted": rr});
    }
    Ok(out)
}

fn matchings(cli: &Cli) -> Outcome<Value> {
    let w = matrix_in(cli)?;
    let m = matching_polynomial(&w)?;
    let rr = m.q.degree().unwrap_or(0) == 0 || is_real_rooted(&m.q)?;
    Ok(json!({"counts": rat_strs(&m.counts), "q": ser(&m.q), "real_rooted": rr}))
}

fn forests(cli: &Cli) -> Outcome<Value> {
    let g: Graph = input(cli, "graph")?;
    let f = forest_polynomial(&g)?;
    let rr = f.degree().unwrap_or(0) == 0 || is_real_rooted(&f)?;
    Ok(json!({"poly": ser(&f), "real_rooted": rr}))
}

fn measure_report(mu: &CubeMeasure, cli: &Cli) -> Outcome<Value> {
    let battery = sr_battery(mu)?;
    let g = mu.genpoly();
    let v = refute_stability(&g, cli.trials, cli.seed)?;
    Ok(json!({
        "measure": ser(mu),
        "battery": battery.to_json(mu.d()),
        "genpoly_verdict": ser(&v),
    }))
}

fn sr_audit(cli: &Cli) -> Outcome<Value> {
    measure_report(&measure_in(cli)?, cli)
}

/// One closure operation; indices are 0-based coordinates.
#[derive(Deserialize)]
#[serde(tag = "op", rename_all = "snake_case", deny_unknown_fields)]
enum ClosureOp {
    Product { with: Value },
    Project { keep: Vec<usize> },
    Condition { var: usize, value: bool },
    ExternalField { field: Vec<RatStr> },
    RankRescale { weights: Vec<RatStr> },
    PartialSymmetrize { i: usize, j: usize, theta: RatStr },
    TotalSymmetrize,
    Permute { perm: Vec<usize> },
    Level { k: usize },
    PhsrEmbed,
}

fn apply_op(mu: &CubeMeasure, op: ClosureOp) -> Outcome<(String, CubeMeasure)> {
    Ok(match op {
        ClosureOp::Product { with } => ("product".into(), mu.product(&measure_from(with)?)?),
        ClosureOp::Project { keep } => ("project".into(), mu.project(&keep)?),
        ClosureOp::Condition { var, value } => ("condition".into(), mu.condition_var(var, value)?),
        ClosureOp::ExternalField { field } => ("external_field".into(), mu.external_field(&vector(field))?),
        ClosureOp::RankRescale { weights } => {
            let b = RankWeights::new(vector(weights))?;
            if !b.preserves_sr() {
                return Err(Failure::Math("rank weights are not ultra log-concave".into()));
            }
            ("rank_rescale".into(), mu.rank_rescale(&b)?)
        }
        ClosureOp::PartialSymmetrize { i, j, theta } => {
            ("partial_symmetrize".into(), mu.partial_symmetrize(i, j, &theta.0)?)
        }
        ClosureOp::TotalSymmetrize => ("total_symmetrize".into(), mu.total_symmetrize()),
        ClosureOp::Permute { perm } => ("permute".into(), mu.permute(&perm)?),
        ClosureOp::Level { k } => (
            "level".into(),
            mu.level(k)
                .ok_or_else(|| Failure::Math(format!("level {k} has zero mass")))?,
        ),
        ClosureOp::PhsrEmbed => ("phsr_embed".into(), mu.phsr_embed()?),
    })
}

fn sr_closure(cli: &Cli) -> Outcome<Value> {
    let mut mu = measure_in(cli)?;
    let ops: Vec<ClosureOp> = input2(cli, "closure chain")?;
    let mut steps = Vec::new();
    for op in ops {
        let (name, next) = apply_op(&mu, op)?;
        mu = next;
        let battery = sr_battery(&mu)?;
        steps.push(json!({"op": name, "d": mu.d(), "battery_pass": battery.passes()}));
    }
    let mut report = measure_report(&mu, cli)?;
    report["steps"] = Value::Array(steps);
    Ok(report)
}

fn exclusion(cli: &Cli) -> Outcome<Value> {
    #[derive(Deserialize)]
    struct Dyn {
        rates: RationalMatrix,
        t: RatStr,
    }
    let mu = measure_in(cli)?;
    let dy: Dyn = input2(cli, "exclusion rates")?;
    let ev = exclusion_evolve(&mu, &dy.rates, &dy.t.0, cli.steps)?;
    let tv = if mu.d() <= ORACLE_MAX_D {
        let q = exclusion_oracle(&mu, &dy.rates, to_f64(&dy.t.0))?;
        Some(total_variation(&ev.measure, &q)?)
    } else {
        None
    };
    let battery = sr_battery(&ev.measure)?;
    let thetas: Vec<Value> = ev
        .thetas
        .iter()
        .map(|(i, j, th)| json!({"i": i, "j": j, "theta": format_rational(th)}))
        .collect();
    Ok(json!({
        "t": format_rational(&dy.t.0),
        "steps": ev.steps,
        "thetas": thetas,
        "measure": ser(&ev.measure),
        "oracle_total_variation": tv,
        "battery": battery.to_json(ev.measure.d()),
    }))
}

fn detmeasure(cli: &Cli) -> Outcome<Value> {
    let k = KernelMatrix::new(matrix_in(cli)?)?;
    let mu = determinantal(&k)?;
    Ok(json!({"measure": ser(&mu), "marginals": rat_strs(&mu.marginals())}))
}

fn coupling(cli: &Cli) -> Outcome<Value> {
    let source = measure_in(cli)?;
    let target = measure_from(read_value(cli.input2.as_deref(), "--in2")?)?;
    if source.d() != target.d() {
        return Err(Error::DimensionMismatch {
            expected: source.d(),
            got: target.d(),
        }
        .into());
    }
    let relation = match cli.relation {
        RelationArg::Dominates => Relation::Dominates,
        RelationArg::Covers => Relation::CoversOrEqual,
    };
    let out = coupling_check(&CouplingProblem {
        source: &source,
        target: &target,
        relation,
    })?;
    Ok(out.to_json(source.d()))
}

fn permanent(cli: &Cli) -> Outcome<Value> {
    let a = matrix_in(cli)?;
    let per = permanent_ryser(&a)?;
    let naive_agrees = if a.nrows() <= 8 { Some(permanent_naive(&a)? == per) } else { None };
    Ok(json!({"n": a.nrows(), "per": format_rational(&per), "per_f64": to_f64(&per), "naive_agrees": naive_agrees}))
}

fn capacity_cmd(cli: &Cli) -> Outcome<Value> {
    let v = read_value(cli.input.as_deref(), "--in")?;
    let res = if v.get("terms").is_some() {
        capacity(&decode::<PolyQ>(v, "polynomial")?, cli.tol)?
    } else {
        capacity_of_matrix(&decode::<RationalMatrix>(v, "matrix")?, cli.tol)?
    };
    Ok(ser(&res))
}

fn bmv(cli: &Cli) -> Outcome<Value> {
    #[derive(Deserialize)]
    struct Pair {
        a: RationalMatrix,
        b: RationalMatrix,
        n: usize,
    }
    let p: Pair = input(cli, "matrix pair")?;
    Ok(ser(&bmv_coeffs(&p.a, &p.b, p.n)?))
}

const CSV_HEADER: &str = "t,r,s,exact,float,limit,abs_error\n";

fn aztec(cli: &Cli) -> Outcome<String> {
    use std::fmt::Write;
    let mut csv = String::from(CSV_HEADER);
    if cli.input.is_some() {
        #[derive(Deserialize)]
        struct Rays {
            rays: Vec<(RatStr, RatStr, RatStr)>,
            t: Vec<usize>,
        }
        let rays: Rays = input(cli, "ray list")?;
        if let Some(&t) = rays.t.iter().max() {
            aztec_guard(t)?;
        }
        let rays_q: Vec<(Rational, Rational, Rational)> =
            rays.rays.into_iter().map(|(a, b, c)| (a.0, b.0, c.0)).collect();
        let rep = compare_report(&rays_q, &rays.t)?;
        for r in &rep.rows {
            writeln!(
                csv,
                "{},{},{},{},{},{},{}",
                r.t,
                r.r,
                r.s,
                format_rational(&r.exact),
                r.value,
                r.limit,
                r.abs_error
            )
            .expect("string write");
        }
        return Ok(csv);
    }
    let t_max = cli.t_max.unwrap_or(11);
    aztec_guard(t_max)?;
    for row in aztec_rows(t_max)? {
        let t = row.t;
        // entries with r + s + t even vanish identically
        for (r, s, _) in row.entries().filter(|(r, s, _)| (r + s + t as i64).rem_euclid(2) == 1) {
            let exact = row.get(r, s);
            let value = to_f64(&exact);
            let (limit, err) = match arctan_limit(r as f64, s as f64, t as f64) {
                Ok(l) => (l.to_string(), (value - l).abs().to_string()),
                Err(_) => (String::new(), String::new()),
            };
            writeln!(csv, "{t},{r},{s},{},{value},{limit},{err}", format_rational(&exact)).expect("string write");
        }
    }
    Ok(csv)
}

fn aztec_guard(t: usize) -> Outcome<()> {
    if t > AZTEC_MAX_T {
        return Err(Error::SizeGuard {
            what: "Aztec depth",
            got: t,
            limit: AZTEC_MAX_T,
        }
        .into());
    }
    Ok(())
}
