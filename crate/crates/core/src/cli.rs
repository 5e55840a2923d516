//! The `confree` command line.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::assoc::AssocConfContext;
use crate::error::{Error, Result};
use crate::hall;
use crate::lie::{LieConfContext, VertexVector};
use crate::oracle::{self, AlgebraTag, DiffAssoc, DiffLie, LieAlgebra, Loop, QPoly, TruncSeries};
use crate::rewrite::{enumerate_ambiguities, Rewriter, DEFAULT_STEP_LIMIT};
use crate::terms::{format_rational, parse_poly, parse_word, render_poly, Alphabet, LocalityFn, NcPoly, OrderSpec, Word};

#[derive(Debug, Parser)]
#[command(name = "confree", version, about = "Free conformal and vertex algebras by rewriting")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Lie,
    Assoc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Space {
    /// U(L)
    Ul,
    /// U(L+)
    UlPlus,
    /// the vertex algebra V
    V,
    /// the coefficient algebra A
    A,
    /// A+
    APlus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RealizationKind {
    DiffAssoc,
    DiffLie,
    Loop,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum IdentityKind {
    Assconf,
    Jacconf,
    Quasisym,
    Diffass,
    Difflie,
}

fn parse_window(s: &str) -> std::result::Result<(i64, i64), String> {
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (s.trim(), s.trim()),
    };
    let lo: i64 = lo.parse().map_err(|_| format!("bad window `{s}`, expected lo..hi"))?;
    let hi: i64 = hi.parse().map_err(|_| format!("bad window `{s}`, expected lo..hi"))?;
    if lo > hi {
        return Err(format!("empty window {lo}..{hi}"));
    }
    Ok((lo, hi))
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    #[arg(long, value_enum, default_value = "lie")]
    pub mode: Mode,
    /// Alphabet in increasing order, e.g. `a,b`.
    #[arg(long, default_value = "a")]
    pub letters: String,
    /// Constant locality.
    #[arg(long = "N", value_name = "N")]
    pub n: Option<u32>,
    /// Locality function as JSON.
    #[arg(long, value_name = "FILE", conflicts_with = "n")]
    pub locality: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
    #[arg(long, value_name = "STEPS")]
    pub step_limit: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Normal form of a polynomial.
    Reduce {
        #[command(flatten)]
        common: Common,
        #[arg(allow_hyphen_values = true)]
        poly: String,
        /// Print every rewriting step.
        #[arg(long)]
        trace: bool,
        /// Project to the vertex algebra (lie mode).
        #[arg(long)]
        vertex: bool,
    },
    /// Basis words.
    Basis {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        space: Option<Space>,
        #[arg(long)]
        length: usize,
        #[arg(long, value_parser = parse_window, allow_hyphen_values = true)]
        window: Option<(i64, i64)>,
        #[arg(long, allow_hyphen_values = true)]
        sum: Option<i64>,
    },
    /// Local confluence of every ambiguity in an index window.
    Confluence {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_parser = parse_window, allow_hyphen_values = true)]
        window: (i64, i64),
    },
    /// dim A_{k,l} for a range of k.
    Dim {
        #[command(flatten)]
        common: Common,
        #[arg(long = "l")]
        l: usize,
        #[arg(long = "k", value_parser = parse_window, allow_hyphen_values = true)]
        k: (i64, i64),
    },
    /// Hall basis of the coefficient Lie algebra.
    Hall {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        length: usize,
        #[arg(long, value_parser = parse_window, allow_hyphen_values = true)]
        window: (i64, i64),
        /// Also list the basis of the conformal algebra inside V.
        #[arg(long)]
        c_basis: bool,
        /// Decompose a terminal word in the basis t(s).
        #[arg(long, allow_hyphen_values = true)]
        decompose: Option<String>,
    },
    /// Checks on concrete realizations by truncated series.
    Oracle {
        #[command(subcommand)]
        command: OracleCommand,
    },
}

#[derive(Debug, Clone, Args)]
pub struct OracleCommon {
    #[arg(long, value_parser = parse_window, allow_hyphen_values = true, default_value = "-8..8")]
    pub window: (i64, i64),
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
    /// Largest locality order searched for.
    #[arg(long, default_value_t = 8)]
    pub n_max: u32,
}

#[derive(Debug, Clone, Args)]
pub struct RealizationArgs {
    #[arg(long, value_enum, default_value = "diff-lie")]
    pub realization: RealizationKind,
    /// Structure constants for `loop` (default sl2 with basis e, h, f).
    #[arg(long, value_name = "FILE")]
    pub structure: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum OracleCommand {
    /// Relations of tilde(t) in Q[t][d, d^-1].
    Virasoro {
        #[arg(long, value_parser = parse_window, allow_hyphen_values = true, default_value = "-8..8")]
        window: (i64, i64),
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        /// Check `u o{n} u = 0` for 2 <= n <= n_max.
        #[arg(long, default_value_t = 6)]
        n_max: i64,
    },
    /// One conformal identity on chosen series.
    Identities {
        #[command(flatten)]
        common: OracleCommon,
        #[command(flatten)]
        realization: RealizationArgs,
        #[arg(long, value_enum)]
        identity: IdentityKind,
        #[arg(long, allow_hyphen_values = true)]
        a: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        b: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        c: Option<String>,
        #[arg(long, default_value_t = 0)]
        n: i64,
        #[arg(long, default_value_t = 0)]
        m: i64,
    },
    /// Locality order of two series.
    Locality {
        #[command(flatten)]
        common: OracleCommon,
        #[command(flatten)]
        realization: RealizationArgs,
        #[arg(long, allow_hyphen_values = true)]
        a: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        b: Option<String>,
    },
    /// Dong's locality estimate for x o{n} y against z.
    Dong {
        #[command(flatten)]
        common: OracleCommon,
        #[command(flatten)]
        realization: RealizationArgs,
        #[arg(long, allow_hyphen_values = true)]
        a: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        b: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        c: Option<String>,
        #[arg(long, default_value_t = 0)]
        n: i64,
    },
}

/// A finished report: exit status, JSON form and text form.
#[derive(Debug)]
struct Report {
    ok: bool,
    json: Value,
    text: String,
}

/// Result of running the command line: exit code and the two output streams.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Argument(_)
        | Error::Syntax { .. }
        | Error::UnknownLetter(_)
        | Error::Window(_)
        | Error::Structure(_) => 2,
        Error::NoLeadingTerm | Error::StepLimit { .. } | Error::Cycle(_) | Error::Locality(_) => 1,
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn execute<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code: 2, stdout: String::new(), stderr: text }
            };
        }
    };
    run(&cli)
}

pub fn run(cli: &Cli) -> Outcome {
    let (format, result) = dispatch(&cli.command);
    match result {
        Ok(r) => {
            let stdout = match format {
                Format::Json => serde_json::to_string_pretty(&r.json).expect("json") + "\n",
                Format::Text => r.text,
            };
            Outcome { code: if r.ok { 0 } else { 1 }, stdout, stderr: String::new() }
        }
        Err((code, e)) => Outcome { code, stdout: String::new(), stderr: format!("error: {e}\n") },
    }
}

type Dispatch = std::result::Result<Report, (i32, Error)>;

fn setup<T>(r: Result<T>) -> std::result::Result<T, (i32, Error)> {
    r.map_err(|e| (2, e))
}

fn work<T>(r: Result<T>) -> std::result::Result<T, (i32, Error)> {
    r.map_err(|e| (exit_code(&e), e))
}

/// Replaces the `#i(n)` placeholders in rewriting errors by letter names.
fn named(alphabet: &Alphabet) -> impl Fn((i32, Error)) -> (i32, Error) + '_ {
    move |(code, e)| {
        let rename = |w: String| {
            alphabet.letters().fold(w, |w, l| w.replace(&format!("#{}(", l.0), &format!("{}(", alphabet.name(l))))
        };
        let e = match e {
            Error::StepLimit { limit, word } => Error::StepLimit { limit, word: rename(word) },
            Error::Cycle(word) => Error::Cycle(rename(word)),
            e => e,
        };
        (code, e)
    }
}

fn dispatch(cmd: &Command) -> (Format, Dispatch) {
    match cmd {
        Command::Reduce { common, poly, trace, vertex } => (common.format, cmd_reduce(common, poly, *trace, *vertex)),
        Command::Basis { common, space, length, window, sum } => {
            (common.format, cmd_basis(common, *space, *length, *window, *sum))
        }
        Command::Confluence { common, window } => (common.format, cmd_confluence(common, *window)),
        Command::Dim { common, l, k } => (common.format, cmd_dim(common, *l, *k)),
        Command::Hall { common, length, window, c_basis, decompose } => {
            (common.format, cmd_hall(common, *length, *window, *c_basis, decompose.as_deref()))
        }
        Command::Oracle { command } => match command {
            OracleCommand::Virasoro { window, format, n_max } => (*format, cmd_virasoro(*window, *n_max)),
            OracleCommand::Identities { common, realization, identity, a, b, c, n, m } => (
                common.format,
                cmd_identities(common, realization, *identity, [a.as_deref(), b.as_deref(), c.as_deref()], *n, *m),
            ),
            OracleCommand::Locality { common, realization, a, b } => {
                (common.format, cmd_locality(common, realization, [a.as_deref(), b.as_deref()]))
            }
            OracleCommand::Dong { common, realization, a, b, c, n } => {
                (common.format, cmd_dong(common, realization, [a.as_deref(), b.as_deref(), c.as_deref()], *n))
            }
        },
    }
}

enum Ctx {
    Lie(LieConfContext),
    Assoc(AssocConfContext),
}

impl Ctx {
    fn alphabet(&self) -> &Alphabet {
        match self {
            Ctx::Lie(c) => c.alphabet(),
            Ctx::Assoc(c) => c.alphabet(),
        }
    }

    fn rewriter(&self) -> &Rewriter {
        match self {
            Ctx::Lie(c) => c.rewriter(),
            Ctx::Assoc(c) => c.rewriter(),
        }
    }

    fn order(&self) -> OrderSpec {
        self.rewriter().order()
    }

    fn config(&self, common: &Common) -> Value {
        let (mode, locality) = match self {
            Ctx::Lie(c) => ("lie", json!({"constant": c.locality()})),
            Ctx::Assoc(c) => ("assoc", serde_json::to_value(c.locality().to_json(c.alphabet())).expect("json")),
        };
        json!({
            "mode": mode,
            "alphabet": self.alphabet().names(),
            "locality": locality,
            "step_limit": common.step_limit.unwrap_or(DEFAULT_STEP_LIMIT),
        })
    }

    fn config_text(&self) -> String {
        let names = self.alphabet().names().join(" < ");
        match self {
            Ctx::Lie(c) => format!("mode: lie\nalphabet: {names}\nlocality: N = {}\n", c.locality()),
            Ctx::Assoc(c) => {
                let loc = match c.locality() {
                    LocalityFn::Constant(n) => format!("N = {n}"),
                    table => {
                        let json = table.to_json(c.alphabet());
                        let pairs = json.pairs.unwrap_or_default();
                        pairs.iter().map(|(k, v)| format!("N({k}) = {v}")).collect::<Vec<_>>().join(", ")
                    }
                };
                format!("mode: assoc\nalphabet: {names}\nlocality: {loc}\n")
            }
        }
    }
}

fn build_ctx(common: &Common) -> Result<Ctx> {
    let alphabet = Alphabet::parse(&common.letters)?;
    let step_limit = common.step_limit.unwrap_or(DEFAULT_STEP_LIMIT);
    if step_limit == 0 {
        return Err(Error::Argument("--step-limit must be positive".into()));
    }
    let locality = match (&common.n, &common.locality) {
        (Some(n), None) => LocalityFn::Constant(*n),
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Argument(format!("cannot read {}: {e}", path.display())))?;
            LocalityFn::from_json(&text, &alphabet).map_err(|e| Error::Argument(e.to_string()))?
        }
        (None, None) => return Err(Error::Argument("give the locality with --N or --locality".into())),
        (Some(_), Some(_)) => return Err(Error::Argument("--N and --locality are exclusive".into())),
    };
    match common.mode {
        Mode::Lie => {
            let n = locality.constant().ok_or_else(|| {
                Error::Argument("lie mode needs a constant locality".into())
            })?;
            Ok(Ctx::Lie(LieConfContext::with_step_limit(alphabet, n, step_limit)))
        }
        Mode::Assoc => Ok(Ctx::Assoc(AssocConfContext::with_step_limit(alphabet, locality, step_limit)?)),
    }
}

fn terms_json(p: &NcPoly, alphabet: &Alphabet, spec: OrderSpec) -> Value {
    Value::Array(
        p.sorted_terms(spec)
            .into_iter()
            .map(|(w, c)| json!({"coeff": format_rational(c), "word": word_json(w, alphabet)}))
            .collect(),
    )
}

fn word_json(w: &Word, alphabet: &Alphabet) -> Value {
    Value::Array(w.iter().map(|g| json!([alphabet.name(g.letter), g.index])).collect())
}

fn cmd_reduce(common: &Common, poly: &str, trace: bool, vertex: bool) -> Dispatch {
    let ctx = setup(build_ctx(common))?;
    let alphabet = ctx.alphabet().clone();
    let spec = ctx.order();
    let p = setup(parse_poly(poly, &alphabet))?;
    let (nf, steps) = if trace {
        let (nf, steps) = work(ctx.rewriter().reduce_traced(&p)).map_err(named(&alphabet))?;
        (nf, Some(steps))
    } else {
        (work(ctx.rewriter().reduce_poly(&p)).map_err(named(&alphabet))?, None)
    };
    let nf = if vertex {
        match &ctx {
            Ctx::Lie(c) => work(c.project_to_v(&nf))?.as_poly().clone(),
            Ctx::Assoc(_) => return Err((2, Error::Argument("--vertex needs lie mode".into()))),
        }
    } else {
        nf
    };
    let mut text = ctx.config_text();
    let _ = writeln!(text, "input: {}", render_poly(&p, &alphabet, spec));
    let label = if vertex { "in V" } else { "normal form" };
    let _ = writeln!(text, "{label}: {}", render_poly(&nf, &alphabet, spec));
    let mut json = json!({
        "command": "reduce",
        "config": ctx.config(common),
        "input": render_poly(&p, &alphabet, spec),
        "result": render_poly(&nf, &alphabet, spec),
        "terms": terms_json(&nf, &alphabet, spec),
        "vertex": vertex,
    });
    if let Some(steps) = steps {
        for (i, s) in steps.iter().enumerate() {
            let _ = writeln!(
                text,
                "step {}: {} at {} by {} ({} terms)",
                i + 1,
                alphabet.render_word(&s.word),
                s.position,
                alphabet.render_word(&s.principal),
                s.replacement_terms
            );
        }
        json["trace"] = serde_json::to_value(steps.iter().map(|s| s.to_json(&alphabet)).collect::<Vec<_>>()).expect("json");
    }
    Ok(Report { ok: true, json, text })
}

fn cmd_basis(common: &Common, space: Option<Space>, length: usize, window: Option<(i64, i64)>, sum: Option<i64>) -> Dispatch {
    let ctx = setup(build_ctx(common))?;
    let space = space.unwrap_or(match ctx {
        Ctx::Lie(_) => Space::Ul,
        Ctx::Assoc(_) => Space::A,
    });
    let need_sum = || sum.ok_or_else(|| (2, Error::Argument("this basis needs --sum".into())));
    let need_window = || window.ok_or_else(|| (2, Error::Argument("this basis needs --window".into())));
    let words = match (&ctx, space) {
        (Ctx::Lie(c), Space::Ul) => {
            let (lo, hi) = need_window()?;
            work(c.enum_basis_ul(length, lo, hi, sum))?
        }
        (Ctx::Lie(c), Space::V) => {
            let (lo, hi) = need_window()?;
            work(c.enum_basis_v(length, lo, hi, sum))?
        }
        (Ctx::Lie(c), Space::UlPlus) => work(c.enum_basis_ul_plus(length, need_sum()?))?,
        (Ctx::Assoc(c), Space::A) => work(c.enum_basis_a(length, need_sum()?))?,
        (Ctx::Assoc(c), Space::APlus) => work(c.enum_basis_a_plus(length, need_sum()?))?,
        _ => return Err((2, Error::Argument(format!("space {space:?} does not match the mode")))),
    };
    let alphabet = ctx.alphabet();
    let mut text = ctx.config_text();
    let space_name = match space {
        Space::Ul => "U(L)",
        Space::UlPlus => "U(L+)",
        Space::V => "V",
        Space::A => "A",
        Space::APlus => "A+",
    };
    let _ = writeln!(text, "space: {space_name}\nlength: {length}");
    if let Some((lo, hi)) = window {
        let _ = writeln!(text, "window: {lo}..{hi}");
    }
    if let Some(s) = sum {
        let _ = writeln!(text, "sum: {s}");
    }
    let _ = writeln!(text, "count: {}", words.len());
    for w in &words {
        let _ = writeln!(text, "{}", alphabet.render_word(w));
    }
    let json = json!({
        "command": "basis",
        "config": ctx.config(common),
        "space": space_name,
        "length": length,
        "window": window.map(|(a, b)| vec![a, b]),
        "sum": sum,
        "count": words.len(),
        "words": words.iter().map(|w| alphabet.render_word(w)).collect::<Vec<_>>(),
    });
    Ok(Report { ok: true, json, text })
}

fn cmd_confluence(common: &Common, (lo, hi): (i64, i64)) -> Dispatch {
    let ctx = setup(build_ctx(common))?;
    let alphabet = ctx.alphabet().clone();
    let letters: Vec<_> = alphabet.letters().collect();
    let rw = ctx.rewriter();
    let results = work(rw.confluence_sweep(&letters, lo, hi)).map_err(named(&alphabet))?;
    let spec = ctx.order();
    let failures = results.iter().filter(|c| !c.ok).count();
    let mut text = ctx.config_text();
    let _ = writeln!(text, "window: {lo}..{hi}");
    let mut items = Vec::new();
    for c in &results {
        let w = alphabet.render_word(&c.word);
        if c.ok {
            let _ = writeln!(text, "{w}: ok");
            items.push(json!({"word": w, "ok": true}));
        } else {
            let (l, r) = (render_poly(&c.left, &alphabet, spec), render_poly(&c.right, &alphabet, spec));
            let _ = writeln!(text, "{w}: FAIL\n  left:  {l}\n  right: {r}");
            items.push(json!({"word": w, "ok": false, "left": l, "right": r}));
        }
    }
    let _ = writeln!(text, "ambiguities: {}, failures: {failures}", results.len());
    debug_assert_eq!(results.len(), enumerate_ambiguities(rw.rules(), &letters, lo, hi).map_or(0, |v| v.len()));
    let json = json!({
        "command": "confluence",
        "config": ctx.config(common),
        "window": [lo, hi],
        "ambiguities": results.len(),
        "failures": failures,
        "results": items,
    });
    Ok(Report { ok: failures == 0, json, text })
}

fn cmd_dim(common: &Common, l: usize, (k_lo, k_hi): (i64, i64)) -> Dispatch {
    let ctx = setup(build_ctx(common))?;
    let Ctx::Assoc(c) = &ctx else {
        return Err((2, Error::Argument("dim counts basis words of A; use --mode assoc".into())));
    };
    // N^{l-1} is the predicted count for one letter and constant N.
    let expected = match (c.alphabet().len(), c.locality().constant()) {
        (1, Some(n)) => Some((n as u128).pow(l.saturating_sub(1) as u32)),
        _ => None,
    };
    let mut text = ctx.config_text();
    let _ = writeln!(text, "l: {l}");
    if let Some(e) = expected {
        let _ = writeln!(text, "expected: {e}");
    }
    let mut rows = Vec::new();
    let mut ok = true;
    for k in k_lo..=k_hi {
        let d = work(c.dim(k, l))?;
        let row_ok = expected.is_none_or(|e| e == d as u128);
        ok &= row_ok;
        let _ = writeln!(text, "k = {k}: {d}{}", if row_ok { "" } else { "  MISMATCH" });
        rows.push(json!({"k": k, "dim": d, "ok": row_ok}));
    }
    let json = json!({
        "command": "dim",
        "config": ctx.config(common),
        "l": l,
        "k": [k_lo, k_hi],
        "expected": expected.map(|e| e.to_string()),
        "rows": rows,
    });
    Ok(Report { ok, json, text })
}

fn cmd_hall(common: &Common, length: usize, (lo, hi): (i64, i64), c_basis: bool, decompose: Option<&str>) -> Dispatch {
    let ctx = setup(build_ctx(common))?;
    let Ctx::Lie(c) = &ctx else {
        return Err((2, Error::Argument("hall needs --mode lie".into())));
    };
    let alphabet = c.alphabet();
    let spec = OrderSpec::LIE;
    let basis = work(hall::basis_l(c, length, lo, hi))?;
    let mut text = ctx.config_text();
    let _ = writeln!(text, "window: {lo}..{hi}\nmax length: {length}\nbasis of L: {} elements", basis.len());
    let mut elems = Vec::new();
    for e in &basis {
        let nf = render_poly(&e.normal_form, alphabet, spec);
        let _ = writeln!(text, "{}  ->  {nf}", e.tree.render(alphabet));
        elems.push(json!({
            "tree": e.tree.to_json(alphabet),
            "alpha": alphabet.render_word(&e.tree.alpha()),
            "normal_form": terms_json(&e.normal_form, alphabet, spec),
        }));
    }
    let mut json = json!({
        "command": "hall",
        "config": ctx.config(common),
        "window": [lo, hi],
        "length": length,
        "basis": elems,
    });
    if c_basis {
        let vs = work(hall::basis_c_in_v(c, length, lo, hi))?;
        let _ = writeln!(text, "basis of C in V: {} vectors (independent)", vs.len());
        let mut arr = Vec::new();
        for (tree, v) in &vs {
            let _ = writeln!(text, "{}  ->  {}", tree.render(alphabet), render_vector(v, alphabet));
            arr.push(json!({"tree": tree.to_json(alphabet), "vector": v.to_json(alphabet)}));
        }
        json["c_basis"] = Value::Array(arr);
    }
    if let Some(text_word) = decompose {
        let w = setup(parse_word(text_word, alphabet))?;
        let d = work(hall::decompose_terminal(c, &w))?;
        let back = work(hall::reconstruct(c, &d))?;
        let round_trip = back == NcPoly::from_word(w.clone());
        let _ = writeln!(text, "decomposition of {}:", alphabet.render_word(&w));
        let mut arr = Vec::new();
        for (seq, q) in &d {
            let s: Vec<String> = seq.iter().map(|t| t.render(alphabet)).collect();
            let _ = writeln!(text, "  {} * {}", format_rational(q), s.join(" "));
            arr.push(json!({
                "coeff": format_rational(q),
                "trees": seq.iter().map(|t| t.to_json(alphabet)).collect::<Vec<_>>(),
            }));
        }
        let _ = writeln!(text, "round trip: {}", if round_trip { "ok" } else { "FAIL" });
        json["decomposition"] = json!({"word": alphabet.render_word(&w), "terms": arr, "round_trip": round_trip});
        return Ok(Report { ok: round_trip, json, text });
    }
    Ok(Report { ok: true, json, text })
}

fn render_vector(v: &VertexVector, alphabet: &Alphabet) -> String {
    render_poly(v.as_poly(), alphabet, OrderSpec::LIE)
}

fn pass(b: bool) -> &'static str {
    if b {
        "pass"
    } else {
        "FAIL"
    }
}

fn cmd_virasoro((lo, hi): (i64, i64), n_max: i64) -> Dispatch {
    let r = work(oracle::virasoro_check(lo, hi, n_max))?;
    let mut text = format!("realization: diff-lie, u = tilde(t)\nwindow: {lo}..{hi}\n");
    let _ = writeln!(text, "u o{{0}} u = du: {}", pass(r.circle0));
    let _ = writeln!(text, "u o{{1}} u = 2u: {}", pass(r.circle1));
    for (n, ok) in &r.higher {
        let _ = writeln!(text, "u o{{{n}}} u = 0: {}", pass(*ok));
    }
    let json = json!({"command": "oracle virasoro", "report": r, "ok": r.ok()});
    Ok(Report { ok: r.ok(), json, text })
}

enum Real {
    DiffAssoc,
    DiffLie,
    Loop(Loop),
}

fn load_realization(args: &RealizationArgs) -> Result<Real> {
    Ok(match args.realization {
        RealizationKind::DiffAssoc => Real::DiffAssoc,
        RealizationKind::DiffLie => Real::DiffLie,
        RealizationKind::Loop => {
            let g = match &args.structure {
                None => LieAlgebra::sl2(),
                Some(path) => {
                    let text = std::fs::read_to_string(path)
                        .map_err(|e| Error::Argument(format!("cannot read {}: {e}", path.display())))?;
                    LieAlgebra::from_json(&text)?
                }
            };
            Real::Loop(Loop(g))
        }
    })
}

fn diff_series(tag: AlgebraTag, arg: Option<&str>, default: &str, window: (i64, i64)) -> Result<(String, TruncSeries<oracle::DiffOp>)> {
    let p = QPoly::parse(arg.unwrap_or(default))?;
    Ok((p.to_string(), oracle::tilde_diff(tag, &p, window.0, window.1)?))
}

fn loop_series(alg: &Loop, arg: Option<&str>, default: usize, window: (i64, i64)) -> Result<(String, TruncSeries<oracle::LoopElem>)> {
    let g = &alg.0;
    let i = match arg {
        Some(name) => g.index(name)?,
        None => default.min(g.dim().saturating_sub(1)),
    };
    Ok((g.names()[i].clone(), oracle::tilde_loop(g, &g.basis(i), window.0, window.1)?))
}

/// Builds the requested series for each realization and runs `f` on them.
macro_rules! with_series {
    ($real:expr, $args:expr, $defaults:expr, $window:expr, |$alg:ident, $names:ident, $s:ident| $body:expr) => {{
        match $real {
            Real::DiffAssoc | Real::DiffLie => {
                let tag = if matches!($real, Real::DiffAssoc) { AlgebraTag::DiffAssoc } else { AlgebraTag::DiffLie };
                let mut $names = Vec::new();
                let mut $s = Vec::new();
                for (i, a) in $args.iter().enumerate() {
                    let (n, x) = work(diff_series(tag, *a, $defaults.0[i], $window))?;
                    $names.push(n);
                    $s.push(x);
                }
                if tag == AlgebraTag::DiffAssoc {
                    let $alg = &DiffAssoc;
                    $body
                } else {
                    let $alg = &DiffLie;
                    $body
                }
            }
            Real::Loop(l) => {
                let mut $names = Vec::new();
                let mut $s = Vec::new();
                for (i, a) in $args.iter().enumerate() {
                    let (n, x) = work(loop_series(l, *a, $defaults.1[i], $window))?;
                    $names.push(n);
                    $s.push(x);
                }
                let $alg = l;
                $body
            }
        }
    }};
}

const DIFF_DEFAULTS: [&str; 3] = ["t", "t^2", "t"];
const LOOP_DEFAULTS: [usize; 3] = [0, 2, 1];

fn tag_name(r: &RealizationArgs) -> &'static str {
    match r.realization {
        RealizationKind::DiffAssoc => "diff-assoc",
        RealizationKind::DiffLie => "diff-lie",
        RealizationKind::Loop => "loop",
    }
}

fn cmd_identities(common: &OracleCommon, ra: &RealizationArgs, which: IdentityKind, args: [Option<&str>; 3], n: i64, m: i64) -> Dispatch {
    let real = setup(load_realization(ra))?;
    let window = common.window;
    let (names, ok): (Vec<String>, bool) = match which {
        IdentityKind::Diffass | IdentityKind::Difflie => {
            let expected = if which == IdentityKind::Diffass { RealizationKind::DiffAssoc } else { RealizationKind::DiffLie };
            if ra.realization != expected {
                return Err((2, Error::Argument(format!("{which:?} is an identity of {expected:?}, not {:?}", ra.realization))));
            }
            let a = setup(QPoly::parse(args[0].unwrap_or(DIFF_DEFAULTS[0])))?;
            let b = setup(QPoly::parse(args[1].unwrap_or(DIFF_DEFAULTS[1])))?;
            let ok = if which == IdentityKind::Diffass {
                work(oracle::check_diffass(&a, &b, n, window.0, window.1))?
            } else {
                work(oracle::check_difflie(&a, &b, n, window.0, window.1))?
            };
            (vec![a.to_string(), b.to_string()], ok)
        }
        _ => with_series!(&real, args, (DIFF_DEFAULTS, LOOP_DEFAULTS), window, |alg, names, s| {
            let ok = match which {
                IdentityKind::Assconf => work(oracle::check_assconf(alg, &s[0], &s[1], &s[2], n, m))?,
                IdentityKind::Jacconf => work(oracle::check_jacconf(alg, &s[0], &s[1], &s[2], n, m))?,
                _ => work(oracle::check_quasisym(alg, &s[0], &s[1], n, common.n_max))?,
            };
            (names, ok)
        }),
    };
    let id = format!("{which:?}").to_lowercase();
    let mut text = format!("realization: {}\nwindow: {}..{}\nidentity: {id}\n", tag_name(ra), window.0, window.1);
    let _ = writeln!(text, "series: {}\nn: {n}\nm: {m}\nresult: {}", names.join(", "), pass(ok));
    let json = json!({
        "command": "oracle identities",
        "realization": tag_name(ra),
        "window": [window.0, window.1],
        "identity": id,
        "series": names,
        "n": n,
        "m": m,
        "ok": ok,
    });
    Ok(Report { ok, json, text })
}

fn cmd_locality(common: &OracleCommon, ra: &RealizationArgs, args: [Option<&str>; 2]) -> Dispatch {
    let real = setup(load_realization(ra))?;
    let window = common.window;
    let (names, order) = with_series!(&real, args, (DIFF_DEFAULTS, LOOP_DEFAULTS), window, |alg, names, s| {
        (names, work(oracle::locality_order(alg, &s[0], &s[1], common.n_max))?)
    });
    let mut text = format!("realization: {}\nwindow: {}..{}\n", tag_name(ra), window.0, window.1);
    let shown = order.map_or(format!("none <= {} on the window", common.n_max), |o| o.to_string());
    let _ = writeln!(text, "series: {}\nlocality order: {shown}", names.join(", "));
    let json = json!({
        "command": "oracle locality",
        "realization": tag_name(ra),
        "window": [window.0, window.1],
        "series": names,
        "n_max": common.n_max,
        "order": order,
    });
    Ok(Report { ok: order.is_some(), json, text })
}

fn cmd_dong(common: &OracleCommon, ra: &RealizationArgs, args: [Option<&str>; 3], n: i64) -> Dispatch {
    let real = setup(load_realization(ra))?;
    let window = common.window;
    let (names, report) = with_series!(&real, args, (DIFF_DEFAULTS, LOOP_DEFAULTS), window, |alg, names, s| {
        (names, work(oracle::dong_bound_check(alg, &s[0], &s[1], &s[2], n, common.n_max))?)
    });
    let mut text = format!("realization: {}\nwindow: {}..{}\n", tag_name(ra), window.0, window.1);
    let _ = writeln!(text, "series: {}\nn: {n}", names.join(", "));
    if report.product_is_zero {
        let _ = writeln!(text, "x o{{{n}}} y = 0");
    }
    for b in &report.bounds {
        let measured = b.measured.map_or("none".to_string(), |m| m.to_string());
        let _ = writeln!(text, "{}: {measured} <= {}: {}", b.label, b.bound, pass(b.holds));
    }
    let _ = writeln!(text, "result: {}", pass(report.holds()));
    let json = json!({
        "command": "oracle dong",
        "realization": tag_name(ra),
        "window": [window.0, window.1],
        "series": names,
        "report": report,
        "ok": report.holds(),
    });
    Ok(Report { ok: report.holds(), json, text })
}

/// Sizes the global thread pool from `CONFREE_THREADS`.
pub fn configure_threads() -> std::result::Result<(), String> {
    let Ok(v) = std::env::var("CONFREE_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().map_err(|_| format!("CONFREE_THREADS must be a positive integer, got `{v}`"))?;
    if n == 0 {
        return Err("CONFREE_THREADS must be positive".into());
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}
