//! Command-line front end for `toric-sheaves`.
//!
//! Every subcommand prints either a human-readable report or, with
//! `--format json`, one canonical JSON object with sorted keys. Exit codes:
//! 0 on success, 1 when the answer is a negative domain verdict (invalid
//! input object, unstable family, fuzzing counterexample), 2 on input errors.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use toric_sheaves::chern::{
    bracket_tables, c1_fast, c2, chern_character, hilbert_data, hilbert_polynomial, RatPoly,
};
use toric_sheaves::fan::{cone_count_identity, euler_characteristic, star, validate_fan};
use toric_sheaves::family::{
    detect_support, is_reflexive, line_bundle_family, validate_pure, validate_torsion_free, FamilyViolation,
};
use toric_sheaves::intersect::{
    chi_line_bundle, intersection_table, is_ample, is_nef, lattice_point_count, todd_and_canonical,
};
use toric_sheaves::io::{family_to_json, parse_divisor, parse_family, parse_fan};
use toric_sheaves::linalg::fmt_q;
use toric_sheaves::moduli::{
    count_by_c2, enumerate_gauge_fixed_chi, rank1_fixed_point_series, rank2_p2_series, stable_euler_total,
    EnumerationParams, IntSeries,
};
use toric_sheaves::sample::random_proper_subspace;
use toric_sheaves::stability::{
    choose_r, distinguished_subspaces, fuzz_check, git_test, gieseker_test, grassmannian_point, mu_test, mu_weights,
    xi_weights, StabilityNotion, StabilityReport, Verdict, WeightSystem,
};
use toric_sheaves::{DeltaFamily, Error, Fan, FanData, FamilyKind, SubspaceQ};

#[derive(Parser, Debug)]
#[command(name = "toric-sheaves", version, about = "Equivariant sheaves on smooth toric surfaces")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Validate a fan and report its Euler characteristic, star identities
    /// and, for surfaces, the intersection table.
    FanCheck {
        #[arg(long)]
        fan: PathBuf,
    },
    /// Validate a family and report support, reflexivity and gauge fixing.
    FamilyCheck {
        #[arg(long)]
        fan: PathBuf,
        #[arg(long)]
        family: PathBuf,
        /// Tensor with the line bundle of this divisor first.
        #[arg(long)]
        twist: Option<PathBuf>,
        /// Also print the restriction to this cone, e.g. `--face 0,1`.
        #[arg(long, value_delimiter = ',')]
        face: Option<Vec<usize>>,
    },
    /// Chern character, first Chern class and bracket tables.
    Chern {
        #[arg(long)]
        fan: PathBuf,
        #[arg(long)]
        family: PathBuf,
    },
    /// Hilbert polynomial of a family, or of a line bundle with `--divisor`.
    Hilbert {
        #[arg(long)]
        fan: PathBuf,
        #[arg(long, conflicts_with = "divisor", required_unless_present = "divisor")]
        family: Option<PathBuf>,
        #[arg(long)]
        divisor: Option<PathBuf>,
        #[arg(long)]
        ample: PathBuf,
    },
    /// Stability verdicts.
    Stability {
        #[arg(value_enum)]
        test: StabilityKind,
        #[arg(long)]
        fan: PathBuf,
        #[arg(long)]
        family: PathBuf,
        #[arg(long)]
        ample: PathBuf,
        /// Seed for `fuzz`.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of random subspaces tried by `fuzz`.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
    /// GIT weight systems.
    Weights {
        #[arg(value_enum)]
        kind: WeightKind,
        #[arg(long)]
        fan: PathBuf,
        #[arg(long)]
        family: PathBuf,
        #[arg(long)]
        ample: PathBuf,
    },
    /// Gauge-fixed characteristic functions of semistable sheaves.
    Enumerate {
        #[arg(long)]
        fan: PathBuf,
        #[arg(long)]
        rank: usize,
        /// First Chern class as ray coefficients.
        #[arg(long)]
        divisor: PathBuf,
        #[arg(long)]
        c2_max: i64,
        #[arg(long = "box", default_value_t = 4)]
        bound: i64,
        #[arg(long)]
        ample: PathBuf,
    },
    /// Generating functions of fixed-point counts.
    Series {
        #[arg(value_enum)]
        kind: SeriesKind,
        #[arg(long, required_if_eq("kind", "rank1"))]
        fan: Option<PathBuf>,
        #[arg(long, default_value_t = 10)]
        order: usize,
        /// Also write `k,coefficient` rows to this file.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum StabilityKind {
    Mu,
    Gieseker,
    Git,
    Fuzz,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum WeightKind {
    Mu,
    Xi,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SeriesKind {
    Rank1,
    #[value(name = "rank2-p2")]
    Rank2P2,
}

/// A finished command: structured report, text rendering and exit status.
struct Outcome {
    json: Value,
    text: String,
    failed: bool,
}

impl Outcome {
    fn ok(json: Value, text: String) -> Self {
        Outcome { json, text, failed: false }
    }
}

/// Input problems: unreadable files, malformed data, violated preconditions.
#[derive(Debug)]
struct InputError(String);

impl From<Error> for InputError {
    fn from(e: Error) -> Self {
        InputError(e.to_string())
    }
}

type CmdResult = Result<Outcome, InputError>;

fn read(path: &Path) -> Result<String, InputError> {
    std::fs::read_to_string(path).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn with_path<T>(path: &Path, r: Result<T, Error>) -> Result<T, InputError> {
    r.map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn load_fan(path: &Path) -> Result<Fan, InputError> {
    with_path(path, parse_fan(&read(path)?))
}

fn load_divisor(path: &Path, fan: &Fan) -> Result<Vec<i64>, InputError> {
    with_path(path, parse_divisor(&read(path)?, fan))
}

fn load_ample(path: &Path, fan: &Fan) -> Result<Vec<i64>, InputError> {
    let h = load_divisor(path, fan)?;
    if fan.rank() == 2 && !is_ample(&h, fan) {
        return Err(InputError(format!("{}: {}", path.display(), Error::NotAmple)));
    }
    Ok(h)
}

fn load_family_unchecked(path: &Path, fan: &Fan) -> Result<DeltaFamily, InputError> {
    with_path(path, parse_family(&read(path)?, fan))
}

fn violations_of(fam: &DeltaFamily, fan: &Fan) -> Vec<FamilyViolation> {
    match fam.kind {
        FamilyKind::Pure(_) => validate_pure(fam, fan),
        _ => validate_torsion_free(fam, fan),
    }
}

/// A family that must be valid for the command to make sense.
fn load_family(path: &Path, fan: &Fan) -> Result<DeltaFamily, InputError> {
    let fam = load_family_unchecked(path, fan)?;
    if let Some(v) = violations_of(&fam, fan).first() {
        return Err(InputError(format!("{}: invalid family: {v}", path.display())));
    }
    Ok(fam)
}

fn load_torsion_free(path: &Path, fan: &Fan) -> Result<DeltaFamily, InputError> {
    let fam = load_family(path, fan)?;
    if !fam.kind.is_torsion_free() {
        return Err(InputError(format!("{}: expected a torsion-free family", path.display())));
    }
    Ok(fam)
}

fn subspace_json(s: &SubspaceQ) -> Value {
    json!(s.to_strings())
}

fn subspace_text(s: &SubspaceQ) -> String {
    let rows: Vec<String> = s.to_strings().iter().map(|r| format!("({})", r.join(", "))).collect();
    format!("span[{}]", rows.join(", "))
}

fn poly_json(p: &RatPoly) -> Value {
    json!({ "coefficients": p.to_json(), "text": p.to_string() })
}

fn report_json(r: &StabilityReport) -> Value {
    json!({
        "verdict": r.verdict,
        "witness": r.witness.as_ref().map(subspace_json),
        "margin": r.margin.as_ref().map(|m| m.to_string()),
        "tested": r.tested,
        "exhaustive": r.exhaustive,
        "caveat": r.caveat,
    })
}

fn report_text(out: &mut String, r: &StabilityReport) {
    let _ = writeln!(out, "verdict: {}", r.verdict);
    if let Some(w) = &r.witness {
        let _ = writeln!(out, "witness: {}", subspace_text(w));
    }
    if let Some(m) = &r.margin {
        let _ = writeln!(out, "margin: {m}");
    }
    let _ = writeln!(out, "tested subspaces: {} ({})", r.tested, if r.exhaustive { "exhaustive" } else { "not exhaustive" });
    if let Some(c) = &r.caveat {
        let _ = writeln!(out, "caveat: {c}");
    }
}

fn weights_json(w: &WeightSystem) -> Value {
    Value::Array(
        w.entries
            .iter()
            .map(|(k, x)| json!({ "cone": k.cone, "at": k.at, "weight": x.to_string() }))
            .collect(),
    )
}

fn series_outcome(s: &IntSeries) -> Outcome {
    let coeffs: Vec<String> = s.coeffs().iter().map(|c| c.to_string()).collect();
    let text = s.to_string();
    Outcome::ok(json!({ "order": s.order(), "coefficients": coeffs }), text)
}

fn fan_check(path: &Path) -> CmdResult {
    let text_in = read(path)?;
    let data: FanData = serde_json::from_str(&text_in).map_err(|e| InputError(format!("{}: {e}", path.display())))?;
    let violations = validate_fan(&data);
    if !violations.is_empty() {
        let mut text = String::from("valid: false\n");
        for v in &violations {
            let _ = writeln!(text, "violation: {v}");
        }
        return Ok(Outcome { json: json!({ "valid": false, "violations": violations }), text, failed: true });
    }
    let fan = with_path(path, Fan::new(data))?;
    let mut text = String::from("valid: true\n");
    let e = euler_characteristic(&fan);
    let _ = writeln!(text, "euler characteristic: {e}");
    let mut identities = Vec::new();
    for tau in fan.cones() {
        let s = star(&fan, &tau)?;
        let id = cone_count_identity(&fan, &tau)?;
        let _ = writeln!(text, "cone {tau:?}: star has {} cones, alternating count {id}", s.len());
        identities.push(json!({ "cone": tau, "star": s, "alternating_count": id }));
    }
    let mut out = json!({ "valid": true, "euler_characteristic": e, "cones": identities });
    if fan.rank() == 2 {
        let table = intersection_table(&fan)?;
        let (todd, canonical) = todd_and_canonical(&fan)?;
        let _ = writeln!(text, "self-intersections: {:?}", table.self_intersections());
        let _ = writeln!(text, "canonical divisor: [{}]", canonical.iter().map(fmt_q).collect::<Vec<_>>().join(", "));
        let _ = writeln!(text, "todd class: {}", todd.to_text());
        out["intersection_table"] = json!(table.entries);
        out["canonical"] = json!(canonical.iter().map(fmt_q).collect::<Vec<_>>());
        out["todd"] = json!(todd.to_text());
    }
    Ok(Outcome::ok(out, text))
}

fn family_check(fan_path: &Path, fam_path: &Path, twist: Option<&Path>, face: Option<&[usize]>) -> CmdResult {
    let fan = load_fan(fan_path)?;
    let mut fam = load_family_unchecked(fam_path, &fan)?;
    let mut text = String::new();
    let mut out = json!({});
    if let Some(t) = twist {
        let k = load_divisor(t, &fan)?;
        fam = fam.tensor_line_bundle(&k);
        out["twist"] = json!(k);
    }
    let violations = violations_of(&fam, &fan);
    out["valid"] = json!(violations.is_empty());
    out["violations"] = json!(violations);
    let _ = writeln!(text, "valid: {}", violations.is_empty());
    for v in &violations {
        let _ = writeln!(text, "violation: {v}");
    }
    if !violations.is_empty() {
        return Ok(Outcome { json: out, text, failed: true });
    }
    let reflexive = fam.kind.is_torsion_free() && is_reflexive(&fam);
    out["reflexive"] = json!(reflexive);
    let _ = writeln!(text, "reflexive: {reflexive}");
    let mut supports = Vec::new();
    for c in &fam.corners {
        let s = detect_support(c)?;
        let _ = writeln!(text, "support in chart {:?}: {s:?}", c.rays);
        supports.push(json!({ "chart": c.rays, "support": s }));
    }
    out["support"] = json!(supports);
    let (fixed, shift) = fam.gauge_fix(&fan)?;
    let chi = fixed.characteristic_function();
    let _ = writeln!(text, "gauge shift: {shift:?}");
    let _ = writeln!(text, "gauge-fixed characteristic function: {}", serde_json::to_string(&chi.to_json()).expect("serializable"));
    out["gauge_shift"] = json!(shift);
    out["gauge_fixed_characteristic_function"] = json!(chi.to_json());
    out["characteristic_function"] = json!(fam.characteristic_function().to_json());
    out["canonical_family"] = json!(family_to_json(&fam));
    if let Some(nu) = face {
        let r = fam.restrict_to_face(&fan, nu)?;
        let points: Vec<Value> = r
            .grid()
            .points()
            .iter()
            .map(|p| json!({ "at": p, "basis": r.value(p).to_strings() }))
            .collect();
        let _ = writeln!(text, "restriction to {nu:?}: box {:?}..{:?}", r.lo(), r.hi());
        for p in r.grid().points() {
            let _ = writeln!(text, "  {p:?}: {}", subspace_text(&r.value(&p)));
        }
        out["restriction"] = json!({ "face": nu, "lower": r.lo(), "upper": r.hi(), "values": points });
    }
    Ok(Outcome::ok(out, text))
}

fn chern(fan_path: &Path, fam_path: &Path) -> CmdResult {
    let fan = load_fan(fan_path)?;
    let fam = load_family(fam_path, &fan)?;
    let chi = fam.characteristic_function();
    let table = intersection_table(&fan)?;
    let ch = chern_character(&chi, &fan, &table)?;
    let c1 = c1_fast(&chi, &fan)?;
    let second = c2(&ch, &table)?;
    let brackets: Vec<Value> = bracket_tables(&chi, &fan)?
        .iter()
        .map(|(cone, g)| json!({ "cone": cone, "lower": g.lo(), "upper": g.hi(), "values": g.values() }))
        .collect();
    let c1s: Vec<String> = c1.iter().map(fmt_q).collect();
    let mut text = String::new();
    let _ = writeln!(text, "chern character: {}", ch.to_text());
    let _ = writeln!(text, "c1: [{}]", c1s.join(", "));
    let _ = writeln!(text, "c2: {}", fmt_q(&second));
    let out = json!({
        "rank": fmt_q(&ch.r0),
        "c1": c1s,
        "ch2": fmt_q(&ch.p),
        "c2": fmt_q(&second),
        "brackets": brackets,
    });
    Ok(Outcome::ok(out, text))
}

fn hilbert(fan_path: &Path, family: Option<&Path>, divisor: Option<&Path>, ample: &Path) -> CmdResult {
    let fan = load_fan(fan_path)?;
    let h = load_ample(ample, &fan)?;
    let mut out = json!({});
    let mut text = String::new();
    let fam = match (family, divisor) {
        (Some(p), _) => load_family(p, &fan)?,
        (None, Some(d)) => {
            let k = load_divisor(d, &fan)?;
            let dq: Vec<_> = k.iter().map(|&x| toric_sheaves::linalg::q(x)).collect();
            let chi = chi_line_bundle(&dq, &fan)?;
            out["chi"] = json!(fmt_q(&chi));
            let _ = writeln!(text, "euler characteristic: {}", fmt_q(&chi));
            if is_nef(&k, &fan) {
                let n = lattice_point_count(&k, &fan)?;
                out["lattice_points"] = json!(n);
                let _ = writeln!(text, "lattice points: {n}");
            }
            line_bundle_family(&k, &fan)
        }
        (None, None) => return Err(InputError("give --family or --divisor".into())),
    };
    let p = hilbert_polynomial(&fam.characteristic_function(), &fan, &h)?;
    let data = hilbert_data(&p, &fan, &h)?;
    let _ = writeln!(text, "hilbert polynomial: {p}");
    let _ = writeln!(text, "dimension: {}", data.dimension);
    let _ = writeln!(text, "rank: {}", data.rank);
    let _ = writeln!(text, "degree: {}", data.degree);
    let _ = writeln!(text, "slope: {}", data.slope);
    out["polynomial"] = poly_json(&p);
    out["data"] = json!(data);
    Ok(Outcome::ok(out, text))
}

fn stability(kind: StabilityKind, fan_path: &Path, fam_path: &Path, ample: &Path, seed: u64, samples: usize) -> CmdResult {
    let fan = load_fan(fan_path)?;
    let h = load_ample(ample, &fan)?;
    let fam = load_torsion_free(fam_path, &fan)?;
    let mut text = String::new();
    let distinguished = distinguished_subspaces(&fam);
    let mut out = json!({ "distinguished_subspaces": distinguished.iter().map(subspace_json).collect::<Vec<_>>() });
    let report = match kind {
        StabilityKind::Mu => mu_test(&fam, &fan, &h)?,
        StabilityKind::Gieseker => gieseker_test(&fam, &fan, &h)?,
        StabilityKind::Git => {
            let (r, w, rep) = choose_r(&fam, &fan, &h, 1, &[])?;
            let _ = writeln!(text, "R: {r}");
            let _ = writeln!(text, "weights: {} factors", w.entries.len());
            out["r"] = json!(r);
            out["weights"] = weights_json(&w);
            rep
        }
        StabilityKind::Fuzz => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = fam.rank;
            if m < 2 {
                return Err(InputError("fuzzing needs rank at least 2".into()));
            }
            let ws: Vec<SubspaceQ> = (0..samples).map(|_| random_proper_subspace(&mut rng, m)).collect();
            let mu = mu_test(&fam, &fan, &h)?;
            let gs = gieseker_test(&fam, &fan, &h)?;
            let bad_mu = fuzz_check(&fam, &fan, &h, StabilityNotion::Slope, mu.verdict, &ws)?;
            let bad_g = fuzz_check(&fam, &fan, &h, StabilityNotion::Gieseker, gs.verdict, &ws)?;
            let _ = writeln!(text, "samples: {samples} (seed {seed})");
            let _ = writeln!(text, "mu verdict: {}", mu.verdict);
            let _ = writeln!(text, "gieseker verdict: {}", gs.verdict);
            for (name, bad) in [("mu", &bad_mu), ("gieseker", &bad_g)] {
                match bad {
                    Some(w) => {
                        let _ = writeln!(text, "{name} counterexample: {}", subspace_text(w));
                    }
                    None => {
                        let _ = writeln!(text, "{name} counterexample: none");
                    }
                }
            }
            let failed = bad_mu.is_some() || bad_g.is_some();
            let out = json!({
                "samples": samples,
                "seed": seed,
                "mu": report_json(&mu),
                "gieseker": report_json(&gs),
                "mu_counterexample": bad_mu.as_ref().map(subspace_json),
                "gieseker_counterexample": bad_g.as_ref().map(subspace_json),
            });
            return Ok(Outcome { json: out, text, failed });
        }
    };
    report_text(&mut text, &report);
    out["report"] = report_json(&report);
    Ok(Outcome { json: out, text, failed: report.verdict == Verdict::Unstable })
}

fn weights(kind: WeightKind, fan_path: &Path, fam_path: &Path, ample: &Path) -> CmdResult {
    let fan = load_fan(fan_path)?;
    let h = load_ample(ample, &fan)?;
    let fam = load_torsion_free(fam_path, &fan)?;
    let mut text = String::new();
    match kind {
        WeightKind::Mu => {
            let w = mu_weights(&fam, &fan, &h)?;
            let point = grassmannian_point(&fam, &fan, &w)?;
            let rep = git_test(&point, &w, &[])?;
            for line in w.to_lines() {
                let _ = writeln!(text, "{line}");
            }
            report_text(&mut text, &rep);
            let out = json!({ "weights": weights_json(&w), "report": report_json(&rep) });
            Ok(Outcome { json: out, text, failed: rep.verdict == Verdict::Unstable })
        }
        WeightKind::Xi => {
            let chi = fam.characteristic_function();
            let xi = xi_weights(&chi, &fan, &h)?;
            let (r, w, rep) = choose_r(&fam, &fan, &h, 1, &[])?;
            let _ = writeln!(text, "lower: {:?}", xi.lower);
            let _ = writeln!(text, "upper: {:?}", xi.upper);
            for e in &xi.entries {
                let _ = writeln!(text, "cone {:?} at {:?}: {}", e.cone, e.at, e.poly);
            }
            let _ = writeln!(text, "R: {r}");
            for line in w.to_lines() {
                let _ = writeln!(text, "{line}");
            }
            report_text(&mut text, &rep);
            let entries: Vec<Value> =
                xi.entries.iter().map(|e| json!({ "cone": e.cone, "at": e.at, "poly": poly_json(&e.poly) })).collect();
            let out = json!({
                "lower": xi.lower,
                "upper": xi.upper,
                "entries": entries,
                "r": r,
                "weights": weights_json(&w),
                "report": report_json(&rep),
            });
            Ok(Outcome::ok(out, text))
        }
    }
}

fn enumerate(fan_path: &Path, rank: usize, divisor: &Path, c2_max: i64, bound: i64, ample: &Path) -> CmdResult {
    let fan = load_fan(fan_path)?;
    let c1 = load_divisor(divisor, &fan)?;
    let h = load_ample(ample, &fan)?;
    let list = enumerate_gauge_fixed_chi(&fan, &EnumerationParams { rank, c1, c2_max, bound, ample: h })?;
    let mut text = String::new();
    let mut items = Vec::new();
    for (i, e) in list.iter().enumerate() {
        let chi = e.chi.to_json();
        let _ = writeln!(text, "#{i} c2 = {}: {}", fmt_q(&e.c2), serde_json::to_string(&chi).expect("serializable"));
        let mut strata = Vec::new();
        for s in &e.strata {
            let euler = s.euler.map_or("unknown".to_string(), |x| x.to_string());
            let _ = writeln!(
                text,
                "  stratum {:?}: free lines {}, mu {}, gieseker {}, euler {euler}",
                s.pattern, s.free_lines, s.mu, s.gieseker
            );
            strata.push(json!({
                "pattern": s.pattern,
                "free_lines": s.free_lines,
                "mu": s.mu,
                "gieseker": s.gieseker,
                "euler": s.euler,
            }));
        }
        items.push(json!({
            "c2": fmt_q(&e.c2),
            "characteristic_function": chi,
            "strata": strata,
            "witness": family_to_json(&e.witness),
        }));
    }
    let counts: serde_json::Map<String, Value> =
        count_by_c2(&list).into_iter().map(|(k, v)| (fmt_q(&k), json!(v))).collect();
    let total = stable_euler_total(&list);
    let _ = writeln!(text, "count: {}", list.len());
    for (k, v) in &counts {
        let _ = writeln!(text, "c2 = {k}: {v}");
    }
    let _ = writeln!(text, "stable euler total: {}", total.map_or("unknown".to_string(), |x| x.to_string()));
    let out = json!({ "count": list.len(), "by_c2": counts, "stable_euler_total": total, "items": items });
    Ok(Outcome::ok(out, text))
}

fn series(kind: SeriesKind, fan: Option<&Path>, order: usize, csv: Option<&Path>) -> CmdResult {
    let s = match kind {
        SeriesKind::Rank1 => {
            let path = fan.ok_or_else(|| InputError("series rank1 needs --fan".into()))?;
            rank1_fixed_point_series(&load_fan(path)?, order)?
        }
        SeriesKind::Rank2P2 => rank2_p2_series(order)?,
    };
    if let Some(path) = csv {
        let mut rows = String::from("k,coefficient\n");
        for (k, c) in s.coeffs().iter().enumerate() {
            writeln!(rows, "{k},{c}").expect("writing to a string");
        }
        std::fs::write(path, rows).map_err(|e| InputError(format!("{}: {e}", path.display())))?;
    }
    Ok(series_outcome(&s))
}

fn run(cli: &Cli) -> CmdResult {
    match &cli.command {
        Command::FanCheck { fan } => fan_check(fan),
        Command::FamilyCheck { fan, family, twist, face } => {
            family_check(fan, family, twist.as_deref(), face.as_deref())
        }
        Command::Chern { fan, family } => chern(fan, family),
        Command::Hilbert { fan, family, divisor, ample } => hilbert(fan, family.as_deref(), divisor.as_deref(), ample),
        Command::Stability { test, fan, family, ample, seed, samples } => {
            stability(*test, fan, family, ample, *seed, *samples)
        }
        Command::Weights { kind, fan, family, ample } => weights(*kind, fan, family, ample),
        Command::Enumerate { fan, rank, divisor, c2_max, bound, ample } => {
            enumerate(fan, *rank, divisor, *c2_max, *bound, ample)
        }
        Command::Series { kind, fan, order, csv } => series(*kind, fan.as_deref(), *order, csv.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(o) => {
            match cli.format {
                Format::Text => print!("{}", o.text),
                Format::Json => println!("{}", serde_json::to_string(&o.json).expect("serializable")),
            }
            ExitCode::from(if o.failed { 1 } else { 0 })
        }
        Err(InputError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
