use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use grs_core::algebra::{parse_rat, MRat, Var};
use grs_core::blowup::resolve_multiplicity;
use grs_core::catalog::{self, SystemEntry};
use grs_core::classify::{self, Convention, RelationId};
use grs_core::scheme::existence::construct_existence_system;
use grs_core::scheme::matching::{match_specialization, reference};
use grs_core::scheme::{eigenvalue_relation, recover, GRScheme};
use grs_core::singular::{accessible_points, alpha_test, branch_point_screen, env_candidates, linearization, AccessiblePoint};
use grs_core::symmetry::{verify_involution, verify_symmetry, BirationalMap, CheckMode};
use grs_core::GrsError;

#[derive(Parser)]
#[command(name = "grs", version, about = "Accessible singularities and Riemann-scheme recovery for Painlevé-type systems")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Pretty, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Pretty,
}

#[derive(Subcommand)]
enum Command {
    /// Recover the system determined by a scheme.
    Recover {
        #[arg(long)]
        scheme: String,
        /// Value for a free overall scale.
        #[arg(long)]
        scale: Option<String>,
    },
    /// Eigenvalue relation forced by a scheme.
    Relation {
        #[arg(long)]
        scheme: String,
    },
    /// Accessible points, multiplicities, matrices and the ratio screen.
    Singular {
        #[arg(long)]
        system: String,
        /// Fix parameters: name=value (repeatable).
        #[arg(long = "set")]
        set: Vec<String>,
    },
    /// Resolve a multiple accessible point.
    Resolve {
        #[arg(long)]
        system: String,
        #[arg(long)]
        point: String,
        #[arg(long = "set")]
        set: Vec<String>,
    },
    /// Reduced system, closed-form solution and verdict at a simple point.
    AlphaTest {
        #[arg(long)]
        system: String,
        #[arg(long)]
        point: String,
        #[arg(long = "set")]
        set: Vec<String>,
    },
    /// Natural-number (or bounded integer) solutions of an eigenvalue relation.
    Classify {
        #[arg(long)]
        relation: String,
        #[arg(long, default_value_t = 100)]
        bound: u64,
        /// Search nonzero integers with |entry| ≤ bound instead.
        #[arg(long)]
        integers: bool,
        /// List every ordering of each solution.
        #[arg(long)]
        unordered: bool,
    },
    /// Check invariance of a system under its transformations.
    Symmetry {
        #[arg(long)]
        system: String,
        /// Builtin map name or a JSON map file; all builtin maps if omitted.
        #[arg(long)]
        map: Option<String>,
        #[arg(long)]
        symbolic: bool,
        #[arg(long, default_value_t = 20)]
        probes: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Build the system with prescribed points and local-index ratios.
    Construct {
        #[arg(long)]
        n: u32,
        #[arg(long, value_delimiter = ',')]
        points: Vec<String>,
        #[arg(long, value_delimiter = ',')]
        ratios: Vec<String>,
    },
    /// Affine parameter correspondence between a specialization and a reference.
    Match {
        #[arg(long)]
        general: String,
        #[arg(long = "set")]
        set: Vec<String>,
        #[arg(long)]
        reference: String,
    },
    /// Print a builtin object as JSON or text.
    Show {
        #[arg(long, group = "what")]
        system: Option<String>,
        #[arg(long, group = "what")]
        scheme: Option<String>,
        /// `<system>:<map>`.
        #[arg(long, group = "what")]
        map: Option<String>,
        #[arg(long, group = "what")]
        reference: Option<String>,
        /// List builtin identifiers.
        #[arg(long, group = "what")]
        list: bool,
    },
}

enum Failure {
    Usage(String),
    Core(GrsError),
    Mismatch(String),
}

impl From<GrsError> for Failure {
    fn from(e: GrsError) -> Failure {
        match e {
            GrsError::Parse(_)
            | GrsError::Invalid(_)
            | GrsError::InvalidN(_)
            | GrsError::ShapeMismatch(_)
            | GrsError::ZeroEntry(_)
            | GrsError::DegeneratePoints(_)
            | GrsError::RelationViolated(_) => Failure::Usage(e.to_string()),
            GrsError::VerificationMismatch(m) => Failure::Mismatch(m),
            other => Failure::Core(other),
        }
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Core(_) => 2,
            Failure::Mismatch(_) => 3,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Usage(m) => format!("error: {m}"),
            Failure::Core(e) => format!("error: {e}"),
            Failure::Mismatch(m) => format!("verification mismatch: {m}"),
        }
    }
}

type Out = Result<Output, Failure>;

/// Rendered result plus whether a verification inside it failed.
struct Output {
    json: Value,
    pretty: String,
    mismatch: Option<String>,
}

impl Output {
    fn ok(json: Value, pretty: String) -> Output {
        Output { json, pretty, mismatch: None }
    }
}

fn to_json<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn read_json<T: serde::de::DeserializeOwned>(path: &str) -> Result<T, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{path}: {e}")))?;
    serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{path}: {e}")))
}

fn load_scheme(spec: &str) -> Result<GRScheme, Failure> {
    let scheme = match spec.strip_prefix("builtin:") {
        Some(id) => catalog::scheme(id)?,
        None if Path::new(spec).exists() => read_json(spec)?,
        None => catalog::scheme(spec).map_err(|_| Failure::Usage(format!("`{spec}` is neither a builtin scheme nor a file")))?,
    };
    scheme.validate()?;
    Ok(scheme)
}

fn load_system(spec: &str, set: &[String]) -> Result<SystemEntry, Failure> {
    let entry = match spec.strip_prefix("builtin:") {
        Some(id) => catalog::system(id)?,
        None if Path::new(spec).exists() => read_json(spec)?,
        None => catalog::system(spec).map_err(|_| Failure::Usage(format!("`{spec}` is neither a builtin system nor a file")))?,
    };
    let values = assignments(set)?;
    if values.is_empty() {
        Ok(entry)
    } else {
        Ok(entry.specialize(&values)?)
    }
}

fn assignments(set: &[String]) -> Result<HashMap<Var, MRat>, Failure> {
    let mut out = HashMap::new();
    for item in set.iter().flat_map(|s| s.split(',')).filter(|s| !s.trim().is_empty()) {
        let (k, v) = item.split_once('=').ok_or_else(|| Failure::Usage(format!("expected name=value, got `{item}`")))?;
        out.insert(Var::new(k.trim()), parse_rat(v)?);
    }
    Ok(out)
}

fn find_point(entry: &SystemEntry, label: &str) -> Result<AccessiblePoint, Failure> {
    let pts = accessible_points(&entry.reduced_vf(), &env_candidates())?;
    let want = match label {
        "inf" | "infinity" | "∞" => "∞".to_string(),
        other => parse_rat(other).map(|r| r.to_string()).unwrap_or_else(|_| other.to_string()),
    };
    pts.into_iter().find(|p| p.label == want).ok_or_else(|| Failure::Usage(format!("X={label} is not an accessible point")))
}

fn cmd_recover(scheme: &str, scale: Option<&str>) -> Out {
    let s = load_scheme(scheme)?;
    let mut rec = recover(&s)?;
    if let Some(v) = scale {
        rec = rec.with_scale(&parse_rat(v)?);
    }
    let mut pretty = format!("{rec}\n");
    let mut json = json!({ "scheme": s.name, "system": to_json(&rec) });
    if let Some(entry) = catalog::SCHEME_IDS.contains(&s.name.as_str()).then(|| catalog::system(&s.name)).transpose()? {
        if let Some((v, e)) = entry.relation.as_ref().filter(|(v, _)| !entry.eigenvalues.contains(v)) {
            let normalized = rec.vf.map(|c| entry.reduce(c));
            let needed = normalized != rec.vf;
            let _ = writeln!(pretty, "normalized by {v} = {e}:\n{normalized}");
            json["normalized"] = to_json(&normalized);
            json["normalization_needed"] = json!(needed);
        }
    }
    pretty.push_str("trace:\n");
    for step in &rec.trace {
        let _ = writeln!(pretty, "  {} = {}", step.unknown, step.value);
    }
    Ok(Output::ok(json, pretty.trim_end().to_string()))
}

fn cmd_relation(scheme: &str) -> Out {
    let s = load_scheme(scheme)?;
    let r = eigenvalue_relation(&s)?;
    Ok(Output::ok(json!({ "scheme": s.name, "relation": to_json(&r) }), format!("{r} = 0")))
}

fn cmd_singular(system: &str, set: &[String]) -> Out {
    let entry = load_system(system, set)?;
    let vf = entry.reduced_vf();
    let pts = accessible_points(&vf, &env_candidates())?;
    let mut rows = Vec::new();
    let mut indices = Vec::new();
    let mut pretty = String::new();
    for p in &pts {
        if p.multiplicity == 1 {
            let li = linearization(&vf, p)?;
            let _ = writeln!(pretty, "{p}\n  matrix: {li}\n  ratio: {}", li.ratio.as_ref().map_or("undefined".into(), |r| r.to_string()));
            rows.push(json!({ "point": to_json(p), "index": to_json(&li) }));
            indices.push((p.label.clone(), li));
        } else {
            let _ = writeln!(pretty, "{p}");
            rows.push(json!({ "point": to_json(p) }));
        }
    }
    let screen = branch_point_screen(&indices);
    let verdict = if screen.passes {
        "all ratios integral"
    } else if screen.branching {
        "branching: some ratio is not an integer"
    } else {
        "undecided: symbolic ratios"
    };
    let _ = write!(pretty, "screen: {verdict}");
    Ok(Output::ok(json!({ "system": entry.id, "points": rows, "screen": to_json(&screen) }), pretty))
}

fn cmd_resolve(system: &str, point: &str, set: &[String]) -> Out {
    let entry = load_system(system, set)?;
    let p = find_point(&entry, point)?;
    let (trace, li) = resolve_multiplicity(&entry.reduced_vf(), &p)?;
    let mut pretty = String::new();
    for step in &trace.steps {
        let _ = writeln!(pretty, "{}", serde_json::to_string(step).expect("serializable"));
    }
    let _ = write!(
        pretty,
        "chart map: ({}, {})\nresolved point: ({}, {})\nmatrix: {li}",
        trace.final_chart_map[0], trace.final_chart_map[1], trace.point[0], trace.point[1]
    );
    Ok(Output::ok(json!({ "point": to_json(&p), "trace": to_json(&trace), "index": to_json(&li) }), pretty))
}

fn cmd_alpha(system: &str, point: &str, set: &[String]) -> Out {
    let entry = load_system(system, set)?;
    let p = find_point(&entry, point)?;
    let r = alpha_test(&entry.reduced_vf(), &p, Var::new("t0"))?;
    let names = if p.pole == 1 { ["Z", "W"] } else { ["W", "Z"] };
    let pretty = format!(
        "reduced matrix at t = t0: {}\n{} = {}\n{} = {}\nsingle-valued: {} ({})",
        r.reduced,
        names[p.pole],
        r.pole_solution,
        names[1 - p.pole],
        r.closed_form,
        r.single_valued,
        serde_json::to_value(r.reason).expect("serializable").as_str().unwrap_or_default()
    );
    Ok(Output::ok(json!({ "point": to_json(&p), "alpha_test": to_json(&r) }), pretty))
}

fn tuple_json<T: ToString>(t: &[T]) -> Value {
    Value::Array(t.iter().map(|n| Value::String(n.to_string())).collect())
}

fn tuple_text<T: ToString>(t: &[T]) -> String {
    format!("({})", t.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(", "))
}

fn cmd_classify(relation: &str, bound: u64, integers: bool, unordered: bool) -> Out {
    let rel: RelationId = relation.parse()?;
    if integers {
        let b = i64::try_from(bound).map_err(|_| Failure::Usage("bound too large".into()))?;
        let found = classify::bounded_integer_search(rel, b);
        let pretty = found.iter().map(|t| tuple_text(t)).collect::<Vec<_>>().join("\n");
        let json = json!({ "relation": rel.to_string(), "bound": bound.to_string(), "integers": true, "tuples": found.iter().map(|t| tuple_json(t)).collect::<Vec<_>>() });
        return Ok(Output::ok(json, pretty));
    }
    let convention = if unordered { Convention::Unordered } else { Convention::Canonical };
    let list = classify::enumerate_natural(rel, convention);
    let all = classify::enumerate_natural(rel, Convention::Unordered);
    let brute = classify::brute_force_natural(rel, bound);
    let within: Vec<Vec<u64>> = all.iter().filter(|t| t.iter().all(|&n| n <= bound)).cloned().collect();
    let complete = brute == within;
    let mut pretty = list.iter().map(|t| tuple_text(t)).collect::<Vec<_>>().join("\n");
    let _ = write!(pretty, "\nbrute force over [1, {bound}]: {}", if complete { "complete" } else { "MISMATCH" });
    let json = json!({
        "relation": rel.to_string(),
        "convention": if unordered { "unordered" } else { "canonical" },
        "tuples": list.iter().map(|t| tuple_json(t)).collect::<Vec<_>>(),
        "brute_force_bound": bound.to_string(),
        "complete": complete,
    });
    let mut out = Output::ok(json, pretty);
    if !complete {
        out.mismatch = Some(format!("brute force over [1, {bound}] disagrees with the enumeration"));
    }
    Ok(out)
}

fn cmd_symmetry(system: &str, map: Option<&str>, symbolic: bool, probes: usize, seed: u64) -> Out {
    let entry = load_system(system, &[])?;
    let maps: Vec<BirationalMap> = match map {
        None => catalog::maps(&entry.id)?,
        Some(m) if Path::new(m).exists() => vec![read_json(m)?],
        Some(m) => vec![catalog::map(&entry.id, m)?],
    };
    let mode = if symbolic { CheckMode::Symbolic } else { CheckMode::Probes { count: probes, seed } };
    let mut rows = Vec::new();
    let mut pretty = Vec::new();
    let mut failed = Vec::new();
    for m in &maps {
        let report = verify_symmetry(&entry, m, mode)?;
        let inv = verify_involution(m, entry.relation.as_ref())?;
        if !report.invariant || !inv.involutive {
            failed.push(m.name.clone());
        }
        pretty.push(format!("{report}\ninvolution: {}", inv.involutive));
        rows.push(json!({ "map": to_json(m), "report": to_json(&report), "involution": to_json(&inv) }));
    }
    let mut out = Output::ok(json!({ "system": entry.id, "results": rows }), pretty.join("\n\n"));
    if !failed.is_empty() {
        out.mismatch = Some(format!("not a symmetry of {}: {}", entry.id, failed.join(", ")));
    }
    Ok(out)
}

fn cmd_construct(n: u32, points: &[String], ratios: &[String]) -> Out {
    let c = points.iter().map(|p| parse_rat(p)).collect::<Result<Vec<_>, _>>()?;
    let m = ratios.iter().map(|p| parse_rat(p)).collect::<Result<Vec<_>, _>>()?;
    let e = construct_existence_system(n, &c, &m)?;
    let mut pretty = format!("{}\n", e.system);
    for (label, r) in &e.ratios {
        let _ = writeln!(pretty, "ratio at X={label}: {r}");
    }
    let _ = write!(pretty, "ratio at ∞ from the others: {}\nsum of reciprocals = {n}: {}", e.infinity_ratio, e.relation_holds);
    let mut out = Output::ok(to_json(&e), pretty);
    if !e.relation_holds {
        out.mismatch = Some("the ratio at ∞ differs from the one forced by the others".into());
    }
    Ok(out)
}

fn cmd_match(general: &str, set: &[String], reference_id: &str) -> Out {
    let entry = load_system(general, set)?;
    let r = reference(reference_id)?;
    let c = match_specialization(&entry.vf, &entry.params, &r.vf, &r.params)?;
    Ok(Output::ok(json!({ "general": entry.id, "reference": r.id, "correspondence": to_json(&c) }), c.to_string()))
}

fn cmd_show(system: Option<&str>, scheme: Option<&str>, map: Option<&str>, reference_id: Option<&str>, list: bool) -> Out {
    if let Some(id) = system {
        let e = load_system(id, &[])?;
        let pretty = format!("{} ({})\n{}", e.id, e.description, e.vf);
        return Ok(Output::ok(to_json(&e), pretty));
    }
    if let Some(id) = scheme {
        let s = load_scheme(id)?;
        return Ok(Output::ok(to_json(&s), serde_json::to_string_pretty(&s).expect("serializable")));
    }
    if let Some(spec) = map {
        let (sys, name) = spec.split_once(':').ok_or_else(|| Failure::Usage("expected <system>:<map>".into()))?;
        let m = catalog::map(sys, name)?;
        return Ok(Output::ok(to_json(&m), m.to_string()));
    }
    if let Some(id) = reference_id {
        let r = reference(id)?;
        return Ok(Output::ok(to_json(&r), format!("{}\n{}", r.id, r.vf)));
    }
    let _ = list;
    let mut maps = serde_json::Map::new();
    for id in catalog::SYSTEM_IDS {
        maps.insert(id.into(), tuple_json(&catalog::map_ids(id)?));
    }
    let json = json!({
        "systems": tuple_json(&catalog::SYSTEM_IDS),
        "schemes": tuple_json(&catalog::SCHEME_IDS),
        "references": tuple_json(&grs_core::scheme::matching::REFERENCE_IDS),
        "maps": maps,
    });
    let pretty = format!(
        "systems: {}\nschemes: {}\nreferences: {}",
        catalog::SYSTEM_IDS.join(", "),
        catalog::SCHEME_IDS.join(", "),
        grs_core::scheme::matching::REFERENCE_IDS.join(", ")
    );
    Ok(Output::ok(json, pretty))
}

fn run(cli: Cli) -> Out {
    match cli.command {
        Command::Recover { scheme, scale } => cmd_recover(&scheme, scale.as_deref()),
        Command::Relation { scheme } => cmd_relation(&scheme),
        Command::Singular { system, set } => cmd_singular(&system, &set),
        Command::Resolve { system, point, set } => cmd_resolve(&system, &point, &set),
        Command::AlphaTest { system, point, set } => cmd_alpha(&system, &point, &set),
        Command::Classify { relation, bound, integers, unordered } => cmd_classify(&relation, bound, integers, unordered),
        Command::Symmetry { system, map, symbolic, probes, seed } => cmd_symmetry(&system, map.as_deref(), symbolic, probes, seed),
        Command::Construct { n, points, ratios } => cmd_construct(n, &points, &ratios),
        Command::Match { general, set, reference } => cmd_match(&general, &set, &reference),
        Command::Show { system, scheme, map, reference, list } => {
            cmd_show(system.as_deref(), scheme.as_deref(), map.as_deref(), reference.as_deref(), list)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let format = cli.format;
    match run(cli) {
        Ok(out) => {
            match format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&out.json).expect("serializable")),
                Format::Pretty => println!("{}", out.pretty),
            }
            match out.mismatch {
                Some(m) => {
                    eprintln!("verification mismatch: {m}");
                    ExitCode::from(3)
                }
                None => ExitCode::SUCCESS,
            }
        }
        Err(f) => {
            eprintln!("{}", f.message());
            ExitCode::from(f.code())
        }
    }
}
