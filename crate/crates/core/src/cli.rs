//! The `inqkit` command line: JSON files in, one JSON document out.
//!
//! Exit codes: 0 when the property holds or the construction succeeded, 1
//! when it fails (the payload then carries a witness or reason), 2 on bad
//! input or an exceeded cap.

use std::collections::BTreeMap;
use std::fs;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::bisim::{
    bisim_check, bisim_check_states, bisim_partition, char_formula, char_formula_state, Depth, DEFAULT_CHAR_CAP,
};
use crate::corpus::{corpus, random_model, CorpusParams};
use crate::fo::{
    coloured_set, ef_fo, ef_mso, eval_fo_capped, local_equiv, standard_translation, threshold_equiv, Env,
    GenericStructure, StructureJson, Target, Value as FoValue, DEFAULT_MSO_CAP, DEFAULT_SET_CAP,
};
use crate::formula::{parse, Formula, Signature};
use crate::model::{supports, EpistemicModel, InfoState, RawModel, DEFAULT_SUPPORT_CAP};
use crate::relational::{
    decode, encode_unchecked, validate_relational, EncodingFlavor, RelationalJson, RelationalModel, FULL_ENCODING_CAP,
};
use crate::transform::{
    b_membership_formula, b_structure, check_kappa_regular, disjoint_union, dummy_agent_expand, exploded_view_capped,
    granularity_schedule, is_k_rich, is_n_acyclic, local_structure, max_overlap, recover_from_exploded, regularize,
    rich_cover, verify_covering, BlockDecomposition, TransformError, ViewPoint, DEFAULT_CLASS_CAP,
};

#[derive(Parser, Debug)]
#[command(name = "inqkit", version, about = "Inquisitive epistemic modal logic on finite models")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Check the frame conditions of a model file.
    Validate(Flags),
    /// Support of a formula at a state (`--state`).
    Eval(Flags),
    /// Truth of a formula at a world (`-w`).
    Truth(Flags),
    /// The n-round (or unbounded) bisimulation game.
    Bisim(Flags),
    /// `∼ⁿ` classes of one model or of two side by side.
    Partition(Flags),
    /// Characteristic formula of a world or state.
    Charform(Flags),
    /// Relational encoding.
    Encode(Flags),
    /// Relational model back to a model file.
    Decode(Flags),
    /// Conditions (i)-(vi) and fullness of a relational model.
    ValidateRel(Flags),
    /// Standard translation, optionally evaluated on the locally full encoding.
    Translate(Flags),
    /// First-order Ehrenfeucht–Fraïssé game.
    Ef(Flags),
    /// Monadic second-order game on single-sorted structures.
    MsoEf(Flags),
    /// Per-colour cardinality agreement with cutoff `--d`.
    Threshold(Flags),
    /// Exploded view.
    Explode(Flags),
    /// Locally full encoding from an exploded view.
    Recover(Flags),
    /// Disjoint union of `-m` and `-M`.
    Union(Flags),
    /// `K`-fold product cover with its verification.
    Cover(Flags),
    /// `K`-richness.
    Rich(Flags),
    /// Expansion by an agent whose one non-trivial class is `--state`.
    Dummy(Flags),
    /// κ-regular, K-rich variant of a model.
    Regularize(Flags),
    /// `b_m` structure of a class under a block decomposition.
    Bstruct(Flags),
    /// N-acyclicity of the underlying frame.
    Acyclic(Flags),
    /// r-round game on ℓ-neighbourhoods.
    Localequiv(Flags),
    /// Seeded random models.
    Corpus(Flags),
}

#[derive(Args, Debug, Clone, Default)]
struct Flags {
    /// Model, relational model or structure file.
    #[arg(short = 'm', long = "model")]
    model: Option<String>,
    /// Second input file.
    #[arg(short = 'M', long = "model2")]
    model2: Option<String>,
    /// World (or comma list of elements) in the first input.
    #[arg(short = 'w', long = "world")]
    world: Option<String>,
    /// World (or comma list of elements) in the second input.
    #[arg(short = 'W', long = "world2")]
    world2: Option<String>,
    /// Comma list of worlds.
    #[arg(long)]
    state: Option<String>,
    #[arg(long)]
    state2: Option<String>,
    #[arg(short = 'f', long)]
    formula: Option<String>,
    /// Depth or rounds; `inf` for unbounded where allowed.
    #[arg(short = 'n', long)]
    depth: Option<String>,
    #[arg(long)]
    flavor: Option<String>,
    #[arg(long)]
    kappa: Option<usize>,
    /// One depth for every world, or a comma list with one per world.
    #[arg(long)]
    granularity: Option<String>,
    #[arg(long = "K")]
    k: Option<usize>,
    #[arg(long = "N")]
    big_n: Option<usize>,
    #[arg(long)]
    ell: Option<usize>,
    #[arg(long)]
    r: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    count: Option<usize>,
    #[arg(short = 'a', long)]
    agent: Option<String>,
    /// `world` or `state`.
    #[arg(long)]
    target: Option<String>,
    /// Colour per element, e.g. `0,0,1`.
    #[arg(long)]
    colours: Option<String>,
    #[arg(long)]
    colours2: Option<String>,
    /// Set parameters: `;`-separated comma lists of element names.
    #[arg(long)]
    sets: Option<String>,
    #[arg(long)]
    sets2: Option<String>,
    #[arg(long)]
    d: Option<usize>,
    /// Block decomposition: inline JSON or a path.
    #[arg(long)]
    blocks: Option<String>,
    /// Override the command's size cap (raising it needs `--unsafe`).
    #[arg(long)]
    cap: Option<usize>,
    #[arg(long)]
    allow_invalid: bool,
    #[arg(long = "unsafe")]
    unsafe_: bool,
}

/// Result of one invocation.
#[derive(Clone, Debug, PartialEq)]
pub struct RunReport {
    pub command: String,
    pub payload: Value,
    /// Notes for stderr.
    pub diagnostics: Vec<String>,
    pub code: i32,
}

impl RunReport {
    /// What goes to stdout.
    pub fn stdout(&self) -> String {
        match &self.payload {
            Value::String(s) if self.command.is_empty() => s.clone(),
            p => serde_json::to_string_pretty(p).expect("JSON value") + "\n",
        }
    }
}

struct CliError {
    kind: &'static str,
    message: String,
    detail: Option<Value>,
}

fn err(kind: &'static str, message: impl Into<String>) -> CliError {
    CliError {
        kind,
        message: message.into(),
        detail: None,
    }
}

type Res<T> = Result<T, CliError>;

enum Out {
    Holds(Value),
    Fails(Value),
}

fn verdict(ok: bool, v: Value) -> Out {
    if ok {
        Out::Holds(v)
    } else {
        Out::Fails(v)
    }
}

fn to_json<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("serializable")
}

fn transform_err(e: TransformError) -> Value {
    let mut v = to_json(&e);
    if let Value::Object(o) = &mut v {
        o.insert("message".into(), Value::String(e.to_string()));
    }
    v
}

/// Run one command line (including the program name).
pub fn run<I, T>(argv: I) -> RunReport
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                return RunReport {
                    command: String::new(),
                    payload: Value::String(e.to_string()),
                    diagnostics: vec![],
                    code: 0,
                };
            }
            return RunReport {
                command: "usage".into(),
                payload: json!({"error": "usage", "message": e.to_string()}),
                diagnostics: vec![],
                code: 2,
            };
        }
    };
    let (name, flags) = split(cli.cmd);
    let mut diagnostics = Vec::new();
    let result = dispatch(name, &flags, &mut diagnostics);
    let (payload, code) = match result {
        Ok(Out::Holds(v)) => (v, 0),
        Ok(Out::Fails(v)) => (v, 1),
        Err(e) => {
            let mut v = json!({"error": e.kind, "message": e.message});
            if let Some(d) = e.detail {
                v["detail"] = d;
            }
            (v, 2)
        }
    };
    RunReport {
        command: name.to_string(),
        payload,
        diagnostics,
        code,
    }
}

fn split(c: Cmd) -> (&'static str, Flags) {
    match c {
        Cmd::Validate(f) => ("validate", f),
        Cmd::Eval(f) => ("eval", f),
        Cmd::Truth(f) => ("truth", f),
        Cmd::Bisim(f) => ("bisim", f),
        Cmd::Partition(f) => ("partition", f),
        Cmd::Charform(f) => ("charform", f),
        Cmd::Encode(f) => ("encode", f),
        Cmd::Decode(f) => ("decode", f),
        Cmd::ValidateRel(f) => ("validate-rel", f),
        Cmd::Translate(f) => ("translate", f),
        Cmd::Ef(f) => ("ef", f),
        Cmd::MsoEf(f) => ("mso-ef", f),
        Cmd::Threshold(f) => ("threshold", f),
        Cmd::Explode(f) => ("explode", f),
        Cmd::Recover(f) => ("recover", f),
        Cmd::Union(f) => ("union", f),
        Cmd::Cover(f) => ("cover", f),
        Cmd::Rich(f) => ("rich", f),
        Cmd::Dummy(f) => ("dummy", f),
        Cmd::Regularize(f) => ("regularize", f),
        Cmd::Bstruct(f) => ("bstruct", f),
        Cmd::Acyclic(f) => ("acyclic", f),
        Cmd::Localequiv(f) => ("localequiv", f),
        Cmd::Corpus(f) => ("corpus", f),
    }
}

fn dispatch(name: &str, f: &Flags, diag: &mut Vec<String>) -> Res<Out> {
    match name {
        "validate" => cmd_validate(f),
        "eval" => cmd_eval(f),
        "truth" => cmd_truth(f),
        "bisim" => cmd_bisim(f),
        "partition" => cmd_partition(f),
        "charform" => cmd_charform(f),
        "encode" => cmd_encode(f, diag),
        "decode" => cmd_decode(f),
        "validate-rel" => cmd_validate_rel(f),
        "translate" => cmd_translate(f),
        "ef" => cmd_ef(f),
        "mso-ef" => cmd_mso_ef(f),
        "threshold" => cmd_threshold(f),
        "explode" => cmd_explode(f),
        "recover" => cmd_recover(f),
        "union" => cmd_union(f),
        "cover" => cmd_cover(f),
        "rich" => cmd_rich(f),
        "dummy" => cmd_dummy(f),
        "regularize" => cmd_regularize(f),
        "bstruct" => cmd_bstruct(f),
        "acyclic" => cmd_acyclic(f),
        "localequiv" => cmd_localequiv(f),
        "corpus" => cmd_corpus(f),
        _ => unreachable!("every subcommand is dispatched"),
    }
}

// ---- flag helpers ----

impl Flags {
    fn need<'a>(&self, v: &'a Option<String>, flag: &str) -> Res<&'a str> {
        v.as_deref().ok_or_else(|| err("usage", format!("missing {flag}")))
    }

    fn cap(&self, default: usize) -> Res<usize> {
        match self.cap {
            None => Ok(default),
            Some(c) if c > default && !self.unsafe_ => Err(err(
                "cap",
                format!("raising the cap from {default} to {c} requires --unsafe"),
            )),
            Some(c) => Ok(c),
        }
    }

    fn depth(&self, default: Depth) -> Res<Depth> {
        match &self.depth {
            None => Ok(default),
            Some(s) => parse_depth(s),
        }
    }

    fn finite_depth(&self, default: Option<usize>) -> Res<usize> {
        self.depth(default)?
            .ok_or_else(|| err("usage", "-n must be a natural number here"))
    }

    fn k(&self) -> Res<usize> {
        match self.k {
            Some(0) => Err(err("usage", "--K must be positive")),
            Some(k) => Ok(k),
            None => Err(err("usage", "missing --K")),
        }
    }

    fn flavor(&self, default: EncodingFlavor) -> Res<EncodingFlavor> {
        match &self.flavor {
            None => Ok(default),
            Some(s) => s.parse().map_err(|e: String| err("usage", e)),
        }
    }
}

fn parse_depth(s: &str) -> Res<Depth> {
    match s.trim() {
        "inf" | "infinity" | "∞" => Ok(None),
        t => t
            .parse()
            .map(Some)
            .map_err(|_| err("usage", format!("`{s}` is neither a natural number nor `inf`"))),
    }
}

fn depth_json(d: Depth) -> Value {
    match d {
        Some(n) => json!(n),
        None => json!("inf"),
    }
}

fn read(path: &str) -> Res<Value> {
    let text = fs::read_to_string(path).map_err(|e| err("io", format!("{path}: {e}")))?;
    serde_json::from_str(&text).map_err(|e| err("json", format!("{path}: {e}")))
}

fn from_value<T: serde::de::DeserializeOwned>(v: Value, what: &str) -> Res<T> {
    serde_json::from_value(v).map_err(|e| err("json", format!("not a {what}: {e}")))
}

fn raw_model(path: &str) -> Res<RawModel> {
    from_value(read(path)?, "model file")
}

fn validated(raw: &RawModel) -> Res<EpistemicModel> {
    raw.validate().map_err(|r| CliError {
        kind: "invalid_model",
        message: r.to_string(),
        detail: Some(to_json(&r.violations)),
    })
}

fn load_model(path: &str) -> Res<EpistemicModel> {
    validated(&raw_model(path)?)
}

fn model(f: &Flags) -> Res<EpistemicModel> {
    load_model(f.need(&f.model, "-m")?)
}

fn relational(path: &str) -> Res<RelationalModel> {
    let j: RelationalJson = from_value(read(path)?, "relational model")?;
    RelationalModel::from_json(&j).map_err(|e| err("invalid_relational", e.to_string()))
}

/// A structure file, a relational model, or a model file (encoded with
/// `--flavor`, default locally full).
fn structure(f: &Flags, path: &str) -> Res<GenericStructure> {
    let v = read(path)?;
    if v.get("sorts").is_some() {
        let j: StructureJson = from_value(v, "structure")?;
        return GenericStructure::from_json(&j).map_err(|e| err("invalid_structure", e.to_string()));
    }
    if v.get("states").is_some() {
        return Ok(relational(path)?.to_structure());
    }
    let m = validated(&from_value(v, "model file")?)?;
    let flavor = f.flavor(EncodingFlavor::LocallyFull)?;
    encode_unchecked(&m, flavor, None, f.cap(FULL_ENCODING_CAP)?)
        .map(|r| r.to_structure())
        .map_err(|e| err("cap", e.to_string()))
}

fn world(m: &EpistemicModel, name: &str) -> Res<usize> {
    m.world(name.trim()).map_err(|e| err("usage", e.to_string()))
}

fn state(m: &EpistemicModel, text: &str) -> Res<InfoState> {
    m.parse_state(text).map_err(|e| err("usage", e.to_string()))
}

fn elements(a: &GenericStructure, list: Option<&str>) -> Res<Vec<usize>> {
    let Some(list) = list else { return Ok(vec![]) };
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|n| a.element(n).ok_or_else(|| err("usage", format!("unknown element `{n}`"))))
        .collect()
}

fn set_params(a: &GenericStructure, list: Option<&str>) -> Res<Vec<u128>> {
    let Some(list) = list else { return Ok(vec![]) };
    list.split(';')
        .map(|part| Ok(elements(a, Some(part))?.iter().fold(0u128, |m, &e| m | 1 << e)))
        .collect()
}

fn formula(f: &Flags, sig: &Signature) -> Res<Formula> {
    parse(f.need(&f.formula, "-f")?, sig).map_err(|e| err("parse", e.to_string()))
}

fn support_guard(f: &Flags, m: &EpistemicModel) -> Res<()> {
    let cap = f.cap(DEFAULT_SUPPORT_CAP)?;
    if m.len() > cap {
        return Err(err("cap", format!("{} worlds exceed the cap {cap}", m.len())));
    }
    Ok(())
}

fn raw_json(m: &EpistemicModel) -> Value {
    to_json(&m.to_raw())
}

// ---- commands ----

fn cmd_validate(f: &Flags) -> Res<Out> {
    let raw = raw_model(f.need(&f.model, "-m")?)?;
    Ok(match raw.validate() {
        Ok(m) => Out::Holds(json!({"valid": true, "worlds": m.len()})),
        Err(r) => Out::Fails(json!({"valid": false, "violations": r.violations})),
    })
}

fn cmd_eval(f: &Flags) -> Res<Out> {
    let m = model(f)?;
    support_guard(f, &m)?;
    let s = state(&m, f.need(&f.state, "--state")?)?;
    let phi = formula(f, m.sig())?;
    let v = supports(&m, s, &phi);
    Ok(verdict(v, json!({"supports": v})))
}

fn cmd_truth(f: &Flags) -> Res<Out> {
    let m = model(f)?;
    support_guard(f, &m)?;
    let w = world(&m, f.need(&f.world, "-w")?)?;
    let phi = formula(f, m.sig())?;
    let v = supports(&m, InfoState::singleton(w), &phi);
    Ok(verdict(v, json!({"truth": v})))
}

fn second(f: &Flags, m: &EpistemicModel) -> Res<EpistemicModel> {
    match &f.model2 {
        Some(p) => load_model(p),
        None => Ok(m.clone()),
    }
}

fn cmd_bisim(f: &Flags) -> Res<Out> {
    let m = model(f)?;
    let m2 = second(f, &m)?;
    let n = f.depth(None)?;
    let r = if let Some(s) = &f.state {
        let s2 = state(&m2, f.need(&f.state2, "--state2")?)?;
        bisim_check_states(&m, state(&m, s)?, &m2, s2, n)
    } else {
        let w = world(&m, f.need(&f.world, "-w or --state")?)?;
        let w2 = world(&m2, f.need(&f.world2, "-W")?)?;
        bisim_check(&m, w, &m2, w2, n)
    };
    Ok(verdict(r.bisimilar, to_json(&r)))
}

fn cmd_partition(f: &Flags) -> Res<Out> {
    let m = model(f)?;
    let m2 = f.model2.as_deref().map(load_model).transpose()?;
    let n = f.depth(None)?;
    let col = bisim_partition(&m, m2.as_ref(), n);
    let mut classes: Vec<Value> = Vec::new();
    for c in 0..col.num_colours() {
        let left: Vec<&String> = (0..m.len()).filter(|&w| col.left(w) == c).map(|w| &m.worlds()[w]).collect();
        match &m2 {
            None => classes.push(json!(left)),
            Some(m2) => {
                let right: Vec<&String> = (0..m2.len())
                    .filter(|&w| col.right(w) == c)
                    .map(|w| &m2.worlds()[w])
                    .collect();
                classes.push(json!({"left": left, "right": right}));
            }
        }
    }
    Ok(Out::Holds(json!({"level": depth_json(n), "classes": classes})))
}

fn cmd_charform(f: &Flags) -> Res<Out> {
    let m = model(f)?;
    let n = f.finite_depth(None)?;
    let sig = match &f.model2 {
        Some(p) => m.sig().merge(load_model(p)?.sig()),
        None => m.sig().clone(),
    };
    let cap = f.cap(DEFAULT_CHAR_CAP)?;
    let chi = match (&f.world, &f.state) {
        (Some(w), None) => char_formula(&m, &sig, world(&m, w)?, n, cap),
        (None, Some(s)) => char_formula_state(&m, &sig, state(&m, s)?, n, cap),
        _ => return Err(err("usage", "give exactly one of -w and --state")),
    }
    .map_err(|e| err("cap", e.to_string()))?;
    Ok(Out::Holds(json!({
        "formula": chi.render(),
        "depth": chi.modal_depth(),
        "size": chi.size(),
    })))
}

fn cmd_encode(f: &Flags, diag: &mut Vec<String>) -> Res<Out> {
    let raw = raw_model(f.need(&f.model, "-m")?)?;
    let m = if f.allow_invalid {
        match raw.validate() {
            Ok(m) => m,
            Err(r) => {
                diag.push(format!("encoding without validation: {r}"));
                raw.build_unchecked().map_err(|r| err("invalid_model", r.to_string()))?
            }
        }
    } else {
        validated(&raw)?
    };
    let pointed = f.state.as_deref().map(|s| state(&m, s)).transpose()?;
    let flavor = f.flavor(EncodingFlavor::LocallyFull)?;
    let r = encode_unchecked(&m, flavor, pointed, f.cap(FULL_ENCODING_CAP)?).map_err(|e| err("cap", e.to_string()))?;
    Ok(Out::Holds(to_json(&r.to_json())))
}

fn cmd_decode(f: &Flags) -> Res<Out> {
    let r = relational(f.need(&f.model, "-m")?)?;
    let m = decode(&r).map_err(|e| err("invalid_relational", e.to_string()))?;
    Ok(Out::Holds(raw_json(&m)))
}

fn cmd_validate_rel(f: &Flags) -> Res<Out> {
    let r = relational(f.need(&f.model, "-m")?)?;
    let rep = validate_relational(&r);
    Ok(verdict(rep.is_ok(), to_json(&rep)))
}

fn cmd_translate(f: &Flags) -> Res<Out> {
    let m = model(f)?;
    let phi = formula(f, m.sig())?;
    let target = match f.target.as_deref() {
        Some("world") => Target::World,
        Some("state") => Target::State,
        None if f.state.is_some() => Target::State,
        None => Target::World,
        Some(t) => return Err(err("usage", format!("unknown target `{t}` (world, state)"))),
    };
    let var = match target {
        Target::World => "x",
        Target::State => "s",
    };
    let fo = standard_translation(&phi, target, var);
    let mut out = json!({
        "target": if target == Target::World { "world" } else { "state" },
        "variable": var,
        "fo": fo.to_string(),
        "rank": fo.quantifier_rank(),
    });
    let point = match target {
        Target::World => f.world.as_deref().map(|w| world(&m, w).map(ViewPoint::World)),
        Target::State => f.state.as_deref().map(|s| state(&m, s).map(ViewPoint::State)),
    }
    .transpose()?;
    let Some(point) = point else { return Ok(Out::Holds(out)) };
    let pointed = match point {
        ViewPoint::State(s) => Some(s),
        ViewPoint::World(_) => None,
    };
    let r = encode_unchecked(&m, EncodingFlavor::LocallyFull, pointed, FULL_ENCODING_CAP)
        .map_err(|e| err("cap", e.to_string()))?;
    let a = r.to_structure();
    let elem = match point {
        ViewPoint::World(w) => m.worlds()[w].clone(),
        ViewPoint::State(s) => r.state_name(s),
    };
    let e = a.element(&elem).expect("point is in the encoding");
    let env: Env = [(var.to_string(), FoValue::Elem(e))].into_iter().collect();
    let v = eval_fo_capped(&a, &fo, &env, f.cap(DEFAULT_SET_CAP)?).map_err(|e| err("fo", e.to_string()))?;
    out["value"] = json!(v);
    Ok(verdict(v, out))
}

fn two_structures(f: &Flags) -> Res<(GenericStructure, GenericStructure)> {
    let a = structure(f, f.need(&f.model, "-m")?)?;
    let b = match &f.model2 {
        Some(p) => structure(f, p)?,
        None => a.clone(),
    };
    Ok((a, b))
}

fn cmd_ef(f: &Flags) -> Res<Out> {
    let (a, b) = two_structures(f)?;
    let n = f.finite_depth(None)?;
    let pa = elements(&a, f.world.as_deref())?;
    let pb = elements(&b, f.world2.as_deref())?;
    let r = ef_fo(&a, &pa, &b, &pb, n).map_err(|e| err("game", e.to_string()))?;
    Ok(verdict(r.duplicator_wins, to_json(&r)))
}

fn colours(list: &str) -> Res<Vec<usize>> {
    list.split(',')
        .map(|c| c.trim().parse().map_err(|_| err("usage", format!("bad colour `{c}`"))))
        .collect()
}

fn coloured_pair(f: &Flags) -> Res<Option<(Vec<usize>, Vec<usize>, GenericStructure, GenericStructure)>> {
    let (Some(c1), Some(c2)) = (&f.colours, &f.colours2) else { return Ok(None) };
    let (c1, c2) = (colours(c1)?, colours(c2)?);
    let k = c1.iter().chain(&c2).max().map_or(0, |m| m + 1);
    let (a, b) = (coloured_set(&c1, k), coloured_set(&c2, k));
    Ok(Some((c1, c2, a, b)))
}

fn cmd_mso_ef(f: &Flags) -> Res<Out> {
    let (a, b) = match coloured_pair(f)? {
        Some((_, _, a, b)) => (a, b),
        None => two_structures(f)?,
    };
    let n = f.finite_depth(None)?;
    let sa = set_params(&a, f.sets.as_deref())?;
    let sb = set_params(&b, f.sets2.as_deref())?;
    let pa = elements(&a, f.world.as_deref())?;
    let pb = elements(&b, f.world2.as_deref())?;
    let cap = f.cap(DEFAULT_MSO_CAP)?;
    let v = ef_mso(&a, &sa, &pa, &b, &sb, &pb, n, cap).map_err(|e| err("game", e.to_string()))?;
    Ok(verdict(v, json!({"duplicator_wins": v, "rounds": n})))
}

fn cmd_threshold(f: &Flags) -> Res<Out> {
    let (c1, c2, a, b) = coloured_pair(f)?.ok_or_else(|| err("usage", "missing --colours/--colours2"))?;
    let d = f.d.ok_or_else(|| err("usage", "missing --d"))?;
    let sa = set_params(&a, f.sets.as_deref())?;
    let sb = set_params(&b, f.sets2.as_deref())?;
    if sa.len() != sb.len() {
        return Err(err("usage", "--sets and --sets2 need the same number of sets"));
    }
    let v = threshold_equiv(&c1, &sa, &c2, &sb, d);
    Ok(verdict(v, json!({"equivalent": v, "d": d})))
}

fn view_point(f: &Flags, m: &EpistemicModel) -> Res<Option<ViewPoint>> {
    match (&f.world, &f.state) {
        (Some(_), Some(_)) => Err(err("usage", "give at most one of -w and --state")),
        (Some(w), None) => Ok(Some(ViewPoint::World(world(m, w)?))),
        (None, Some(s)) => {
            let s = state(m, s)?;
            if s.is_empty() {
                return Err(err("usage", "the state must be non-empty"));
            }
            Ok(Some(ViewPoint::State(s)))
        }
        (None, None) => Ok(None),
    }
}

fn transform<T>(r: Result<T, TransformError>) -> Res<Result<T, Value>> {
    match r {
        Ok(t) => Ok(Ok(t)),
        Err(e @ (TransformError::Cap { .. } | TransformError::NotValidated | TransformError::EmptyState)) => {
            Err(CliError {
                kind: "transform",
                message: e.to_string(),
                detail: Some(transform_err(e)),
            })
        }
        Err(TransformError::Invalid(msg)) | Err(TransformError::MalformedView(msg)) => Err(err("input", msg)),
        Err(e) => Ok(Err(transform_err(e))),
    }
}

fn cmd_explode(f: &Flags) -> Res<Out> {
    let m = model(f)?;
    let point = view_point(f, &m)?;
    let x = match transform(exploded_view_capped(&m, point, f.cap(DEFAULT_CLASS_CAP)?))? {
        Ok(x) => x,
        Err(v) => return Ok(Out::Fails(v)),
    };
    Ok(Out::Holds(json!({
        "structure": x.structure.to_json(),
        "copies": x.copies,
        "states": x.states,
    })))
}

fn cmd_recover(f: &Flags) -> Res<Out> {
    let v = read(f.need(&f.model, "-m")?)?;
    let v = v.get("structure").cloned().unwrap_or(v);
    let j: StructureJson = from_value(v, "structure")?;
    let x = GenericStructure::from_json(&j).map_err(|e| err("invalid_structure", e.to_string()))?;
    let r = recover_from_exploded(&x).map_err(|e| err("input", e.to_string()))?;
    Ok(Out::Holds(to_json(&r.to_json())))
}

fn cmd_union(f: &Flags) -> Res<Out> {
    let m = model(f)?;
    let m2 = load_model(f.need(&f.model2, "-M")?)?;
    match transform(disjoint_union(&m, &m2))? {
        Ok(u) => Ok(Out::Holds(raw_json(&u))),
        Err(v) => Ok(Out::Fails(v)),
    }
}

fn cmd_cover(f: &Flags) -> Res<Out> {
    let m = model(f)?;
    let c = match transform(rich_cover(&m, f.k()?))? {
        Ok(c) => c,
        Err(v) => return Ok(Out::Fails(v)),
    };
    let map: BTreeMap<&String, &String> = c
        .map
        .iter()
        .enumerate()
        .map(|(x, &w)| (&c.source.worlds()[x], &m.worlds()[w]))
        .collect();
    let check = verify_covering(&c);
    let out = json!({
        "model": raw_json(&c.source),
        "map": map,
        "verified": check.is_ok(),
        "failure": check.as_ref().err(),
    });
    Ok(verdict(check.is_ok(), out))
}

fn cmd_rich(f: &Flags) -> Res<Out> {
    let m = model(f)?;
    let k = f.k()?;
    let v = is_k_rich(&m, k);
    Ok(verdict(v, json!({"rich": v, "K": k})))
}

fn cmd_dummy(f: &Flags) -> Res<Out> {
    let m = model(f)?;
    let s = state(&m, f.need(&f.state, "--state")?)?;
    match transform(dummy_agent_expand(&m, s))? {
        Ok(d) => Ok(Out::Holds(raw_json(&d))),
        Err(v) => Ok(Out::Fails(v)),
    }
}

fn granularity(f: &Flags, m: &EpistemicModel) -> Res<Vec<Depth>> {
    match (&f.granularity, f.ell) {
        (Some(g), _) => {
            let parts: Vec<Depth> = g.split(',').map(parse_depth).collect::<Res<_>>()?;
            match parts.len() {
                1 => Ok(vec![parts[0]; m.len()]),
                n if n == m.len() => Ok(parts),
                n => Err(err("usage", format!("--granularity has {n} entries for {} worlds", m.len()))),
            }
        }
        (None, Some(ell)) => {
            let w = world(m, f.need(&f.world, "-w (with --ell)")?)?;
            Ok(granularity_schedule(m, w, ell).into_iter().map(Some).collect())
        }
        (None, None) => Err(err("usage", "missing --granularity (or --ell with -w)")),
    }
}

fn cmd_regularize(f: &Flags) -> Res<Out> {
    let m = model(f)?;
    let kappa = f.kappa.filter(|&k| k > 0).ok_or_else(|| err("usage", "--kappa must be positive"))?;
    let k = f.k()?;
    let g = granularity(f, &m)?;
    let r = match transform(regularize(&m, kappa, &g, k))? {
        Ok(r) => r,
        Err(v) => return Ok(Out::Fails(v)),
    };
    let classes: Vec<Value> = r
        .classes
        .iter()
        .map(|c| {
            json!({
                "agent": c.agent,
                "class": c.local.model.worlds(),
                "granularity": depth_json(c.local.granularity),
                "blocks": c.decomposition.to_json(&c.local),
            })
        })
        .collect();
    Ok(Out::Holds(json!({"model": raw_json(&r.model), "classes": classes})))
}

fn cmd_bstruct(f: &Flags) -> Res<Out> {
    let m = model(f)?;
    let w = world(&m, f.need(&f.world, "-w")?)?;
    let agent = f.need(&f.agent, "-a")?;
    let depth = match &f.granularity {
        Some(g) => parse_depth(g)?,
        None => None,
    };
    let l = match transform(local_structure(&m, w, agent, depth))? {
        Ok(l) => l,
        Err(v) => return Ok(Out::Fails(v)),
    };
    let text = f.need(&f.blocks, "--blocks")?;
    let blocks: Value = if text.trim_start().starts_with('[') {
        serde_json::from_str(text).map_err(|e| err("json", e.to_string()))?
    } else {
        read(text)?
    };
    let blocks: Vec<Vec<Vec<String>>> = from_value(blocks, "block decomposition")?;
    let d = BlockDecomposition::from_json(&l, &blocks).map_err(|e| err("usage", e.to_string()))?;
    if let Some(kappa) = f.kappa {
        if let Err(why) = check_kappa_regular(&l, kappa, &d) {
            return Ok(Out::Fails(json!({"regular": false, "reason": why})));
        }
    }
    match b_structure(&l, &d) {
        Ok(b) => Ok(Out::Holds(json!({
            "regular": true,
            "kappa": d.blocks.len(),
            "structure": b.to_json(),
            "membership_formula": b_membership_formula(l.realised().len()).to_string(),
        }))),
        Err(TransformError::NotRegular(why)) => Ok(Out::Fails(json!({"regular": false, "reason": why}))),
        Err(e) => Ok(Out::Fails(transform_err(e))),
    }
}

fn cmd_acyclic(f: &Flags) -> Res<Out> {
    let m = model(f)?;
    let n = f.big_n.ok_or_else(|| err("usage", "missing --N"))?;
    if n < 2 {
        return Err(err("usage", "--N must be at least 2"));
    }
    let frame = m.kripke_companion();
    let v = is_n_acyclic(&frame, n);
    Ok(verdict(v, json!({"acyclic": v, "N": n, "max_overlap": max_overlap(&frame)})))
}

fn cmd_localequiv(f: &Flags) -> Res<Out> {
    let (a, b) = two_structures(f)?;
    let one = |s: &GenericStructure, v: &Option<String>, flag: &str| -> Res<usize> {
        match elements(s, Some(f.need(v, flag)?))?.as_slice() {
            [e] => Ok(*e),
            _ => Err(err("usage", format!("{flag} takes exactly one element"))),
        }
    };
    let (x, y) = (one(&a, &f.world, "-w")?, one(&b, &f.world2, "-W")?);
    let ell = f.ell.ok_or_else(|| err("usage", "missing --ell"))?;
    let r = f.r.ok_or_else(|| err("usage", "missing --r"))?;
    let res = local_equiv(&a, x, &b, y, ell, r).map_err(|e| err("game", e.to_string()))?;
    let mut out = to_json(&res);
    out["ell"] = json!(ell);
    out["r"] = json!(r);
    Ok(verdict(res.duplicator_wins, out))
}

fn cmd_corpus(f: &Flags) -> Res<Out> {
    let seed = f.seed.unwrap_or(0);
    let p = CorpusParams::default();
    Ok(Out::Holds(match f.count {
        None => raw_json(&random_model(seed, &p)),
        Some(n) => json!({
            "seed": seed,
            "models": corpus(seed, n, &p).iter().map(raw_json).collect::<Vec<_>>(),
        }),
    }))
}
