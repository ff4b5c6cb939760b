//! Batch front end: parses inputs, runs one pipeline and renders a JSON or
//! table report.

pub mod input;

use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use wonder_core::admissible::{
    check_recursion, enumerate_am, enumerate_b, gamma_b, generating_function, peel_down,
    BasisElement, RecursionReport, Series,
};
use wonder_core::arrangement::LayerPoset;
use wonder_core::fan::Fan;
use wonder_core::poset::{
    blowup_building, is_building_set, is_well_connected, minimal_building_set,
    minimal_well_connected, BuildingSet, RankedPoset,
};
use wonder_core::presentation::{
    restriction_map_check, toric_report, ModelData, ModelPresentation,
};

/// Largest monomial count the SNF oracle accepts in one degree.
pub const ORACLE_LIMIT: usize = 400_000;

#[derive(Debug, Parser)]
#[command(
    name = "wonder",
    version,
    about = "Integer cohomology of toric wonderful models"
)]
pub struct Cli {
    /// Arrangement JSON file.
    #[arg(long, global = true)]
    pub arrangement: Option<PathBuf>,
    /// Fan JSON file.
    #[arg(long, global = true)]
    pub fan: Option<PathBuf>,
    /// Building set: min, max, minwc, or a JSON file of labels.
    #[arg(long, global = true, default_value = "min")]
    pub building: String,
    /// Degree cap for Gröbner and oracle checks (at least the fan dimension).
    #[arg(long, global = true)]
    pub cap: Option<u32>,
    /// Omit the timestamp so identical inputs give identical bytes.
    #[arg(long, global = true)]
    pub deterministic: bool,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Layers with ranks and covers.
    Poset,
    /// The selected building set and its properties.
    Building,
    /// Nested sets of the selected building set.
    Blowup,
    /// Betti numbers of the toric variety of the fan.
    ToricBetti,
    /// Betti numbers of the model by escalier, oracle and enumeration.
    ModelBetti,
    /// Admissible monomials and the basis B.
    Admissible,
    /// Gröbner check, recursions, order invariance and the restriction map.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub groebner: bool,
    #[arg(long)]
    pub recursions: bool,
    #[arg(long)]
    pub orders: bool,
    #[arg(long)]
    pub restriction: bool,
    /// Move this member to the end of the building order first.
    #[arg(long)]
    pub last: Option<String>,
}

/// Why a run did not succeed.
#[derive(Debug)]
pub enum Failure {
    /// Bad or missing input; exit code 2.
    Input(anyhow::Error),
    /// A check failed or could not be completed; exit code 1.
    Verification(anyhow::Error),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::Verification(_) => 1,
        }
    }
}

/// A rendered report and whether every check in it passed.
pub struct Outcome {
    pub report: Value,
    pub text: String,
    pub ok: bool,
}

struct Job<'a> {
    cli: &'a Cli,
    threads: usize,
}

fn input<T>(r: Result<T>) -> Result<T, Failure> {
    r.map_err(Failure::Input)
}

fn verification<T>(r: Result<T>) -> Result<T, Failure> {
    r.map_err(Failure::Verification)
}

/// Worker cap from `WONDER_THREADS`. The pipelines are sequential, so the
/// value is validated and reported but only one worker is used.
pub fn threads_from_env() -> Result<usize> {
    match std::env::var("WONDER_THREADS") {
        Err(_) => Ok(1),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => bail!("WONDER_THREADS must be a positive integer, got {v:?}"),
        },
    }
}

impl Job<'_> {
    fn arrangement(&self) -> Result<LayerPoset> {
        let path = self
            .cli
            .arrangement
            .as_ref()
            .ok_or_else(|| anyhow!("--arrangement is required"))?;
        Ok(input::load_arrangement(path)?.1)
    }

    fn fan(&self) -> Result<Fan> {
        let path = self
            .cli
            .fan
            .as_ref()
            .ok_or_else(|| anyhow!("--fan is required"))?;
        input::load_fan(path)
    }

    fn model_data(&self, lp: &LayerPoset, fan: Fan) -> Result<ModelData> {
        let g = input::select_building(&lp.poset, &self.cli.building)?;
        Ok(ModelData::from_layers(lp, g, fan)?)
    }

    fn both(&self) -> Result<(LayerPoset, ModelData)> {
        let lp = self.arrangement()?;
        let fan = self.fan()?;
        if lp.layers[0].ambient_rank() != fan.ambient_rank() {
            bail!(
                "arrangement has ambient rank {} but the fan has {}",
                lp.layers[0].ambient_rank(),
                fan.ambient_rank()
            );
        }
        let data = self.model_data(&lp, fan)?;
        if let Some(cap) = self.cli.cap {
            if (cap as usize) < data.fan.dim() {
                bail!("--cap {cap} is below the dimension {}", data.fan.dim());
            }
        }
        Ok((lp, data))
    }

    fn presentation(&self, data: ModelData) -> Result<ModelPresentation> {
        let mut m = ModelPresentation::new(data)?;
        if let Some(cap) = self.cli.cap {
            m.cap = cap;
        }
        Ok(m)
    }
}

fn labels(p: &RankedPoset, xs: &[usize]) -> Vec<String> {
    xs.iter().map(|&x| p.label(x).to_string()).collect()
}

const SUPERSCRIPT: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];

fn cohomology_name(halved: usize) -> String {
    let s: String = (2 * halved)
        .to_string()
        .chars()
        .map(|c| SUPERSCRIPT[c as usize - '0' as usize])
        .collect();
    format!("H{s}")
}

fn betti_table(text: &mut String, rows: &[(&str, Vec<String>)]) {
    let width = rows.iter().map(|r| r.1.len()).max().unwrap_or(0);
    let _ = write!(text, "{:<12}", "");
    for i in 0..width {
        let _ = write!(text, "{:>8}", cohomology_name(i));
    }
    text.push('\n');
    for (name, vals) in rows {
        let _ = write!(text, "{name:<12}");
        for v in vals {
            let _ = write!(text, "{v:>8}");
        }
        text.push('\n');
    }
    let _ = writeln!(text, "(column H^2i is the rank in halved degree i)");
}

fn strings<T: ToString>(v: &[T]) -> Vec<String> {
    v.iter().map(T::to_string).collect()
}

fn poset_report(p: &RankedPoset) -> (Value, String) {
    let mut text = String::new();
    let mut layers = Vec::new();
    for x in 0..p.len() {
        let covers = labels(p, p.upper_covers(x));
        let _ = writeln!(
            text,
            "{:<6} rank {}  covered by {}",
            p.label(x),
            p.rank(x),
            covers.join(", ")
        );
        layers.push(json!({ "label": p.label(x), "rank": p.rank(x), "covered_by": covers }));
    }
    (json!({ "layers": layers, "count": p.len() }), text)
}

fn building_report(p: &RankedPoset, g: &BuildingSet, selector: &str) -> Result<(Value, String)> {
    let min = minimal_building_set(p);
    let minwc = minimal_well_connected(p, &min)?;
    let members = labels(p, g.members());
    let building = is_building_set(p, g.members(), false);
    let geometric = is_building_set(p, g.members(), true);
    let wc = is_well_connected(p, g.members());
    let text = format!(
        "building set ({selector}): {}\nbuilding: {building}\ngeometric: {geometric}\nwell-connected: {wc}\nsizes: min {}, min well-connected {}, max {}\n",
        members.join(", "),
        min.len(),
        minwc.len(),
        p.len() - 1
    );
    let v = json!({
        "selector": selector,
        "members": members,
        "size": g.len(),
        "building": building,
        "geometric": geometric,
        "well_connected": wc,
        "sizes": { "min": min.len(), "min_well_connected": minwc.len(), "max": p.len() - 1 },
    });
    Ok((v, text))
}

fn blowup_report(p: &RankedPoset, g: &BuildingSet) -> (Value, String) {
    let bl = blowup_building(p, g);
    let mut text = String::new();
    let mut sets = Vec::new();
    for a in 1..bl.len() {
        let s = &bl.nested[a];
        let covers: Vec<String> = bl
            .poset
            .upper_covers(a)
            .iter()
            .map(|&b| bl.nested[b].label(p))
            .collect();
        let _ = writeln!(text, "{:<24} rank {}", s.label(p), s.rank());
        sets.push(json!({ "label": s.label(p), "rank": s.rank(), "covered_by": covers }));
    }
    let boolean = bl.poset.is_locally_boolean();
    let _ = writeln!(
        text,
        "{} nested sets above the minimum, locally boolean: {boolean}",
        bl.len() - 1
    );
    (
        json!({ "nested_sets": sets, "count": bl.len() - 1, "locally_boolean": boolean }),
        text,
    )
}

fn toric_betti_report(fan: &Fan) -> Result<(Value, String, bool)> {
    let r = toric_report(fan, ORACLE_LIMIT)?;
    let ok = r.consistent();
    let torsion: Vec<Value> = r
        .torsion
        .iter()
        .map(|(d, t)| json!({ "degree": d, "factor": t.to_string() }))
        .collect();
    let mut text = String::new();
    betti_table(
        &mut text,
        &[
            ("betti", strings(r.betti())),
            ("escalier", strings(&r.escalier)),
            ("oracle", strings(&r.oracle)),
        ],
    );
    let _ = writeln!(
        text,
        "torsion: {}  consistent: {ok}",
        if torsion.is_empty() {
            "none"
        } else {
            "present"
        }
    );
    let v = json!({
        "betti": { "value": r.betti(), "routes": ["escalier", "oracle"] },
        "escalier": r.escalier,
        "oracle": r.oracle,
        "torsion": torsion,
        "consistent": ok,
    });
    Ok((v, text, ok))
}

fn model_betti_report(m: &ModelPresentation) -> Result<(Value, String, bool)> {
    let r = m.betti(ORACLE_LIMIT)?;
    let b = enumerate_b(m);
    let mut enumeration = generating_function(b.iter().map(BasisElement::degree));
    enumeration.resize(r.betti.len().max(enumeration.len()), 0);
    let enum_ok = enumeration
        .iter()
        .zip(&r.betti)
        .all(|(&e, &x)| e == x as i64)
        && enumeration.len() == r.betti.len();
    let ok = r.consistent() && enum_ok;
    let torsion: Vec<Value> = r
        .torsion
        .iter()
        .map(|(d, t)| json!({ "degree": d, "factor": t.to_string() }))
        .collect();
    let mut text = String::new();
    betti_table(
        &mut text,
        &[
            ("betti", strings(&r.betti)),
            ("escalier", strings(&r.escalier)),
            ("oracle", strings(&r.oracle)),
            ("enumeration", strings(&enumeration)),
        ],
    );
    let _ = writeln!(
        text,
        "variables: {}  groebner: {}  torsion: {}  consistent: {ok}",
        m.table.len(),
        r.groebner.ok(),
        if torsion.is_empty() {
            "none"
        } else {
            "present"
        }
    );
    let v = json!({
        "betti": { "value": r.betti, "routes": ["escalier", "oracle", "enumeration"] },
        "escalier": r.escalier,
        "oracle": r.oracle,
        "enumeration": enumeration,
        "torsion": torsion,
        "torsion_suspects": r.torsion_suspects,
        "groebner": { "ok": r.groebner.ok(), "pairs": r.groebner.pairs_checked, "failures": r.groebner.failures.len() },
        "variables": m.table.len(),
        "cap": m.cap,
        "consistent": ok,
    });
    Ok((v, text, ok))
}

fn admissible_report(m: &ModelPresentation) -> Result<(Value, String, bool)> {
    let p = &m.data.poset;
    let am = enumerate_am(p, &m.data.building);
    let name = |chain: &[(usize, u32)]| -> String {
        if chain.is_empty() {
            return "1".to_string();
        }
        let parts: Vec<String> = chain
            .iter()
            .map(|&(a, e)| {
                if e == 1 {
                    m.t_label(a)
                } else {
                    format!("{}^{e}", m.t_label(a))
                }
            })
            .collect();
        parts.join("*")
    };
    let mut text = String::from("admissible monomials:\n");
    let mut am_json = Vec::new();
    for f in &am {
        let _ = writeln!(text, "  {:<24} degree {}", name(&f.chain), f.degree());
        am_json.push(json!({ "monomial": name(&f.chain), "degree": f.degree() }));
    }
    let gamma_am = generating_function(am.iter().map(|f| f.degree()));
    let b = enumerate_b(m);
    let gamma_enum = generating_function(b.iter().map(BasisElement::degree));
    let gamma_toric = gamma_b(&m.data)?;
    let ok = gamma_enum == gamma_toric;
    let b_json: Vec<Value> = b
        .iter()
        .map(|e| json!({ "monomial": m.table.format_monomial(&e.monomial), "degree": e.degree() }))
        .collect();
    let _ = writeln!(text, "gamma_AM: {:?}", gamma_am);
    let _ = writeln!(
        text,
        "|B| = {}, gamma_B: {:?} (enumeration), {:?} (toric Betti numbers)",
        b.len(),
        gamma_enum,
        gamma_toric
    );
    let v = json!({
        "admissible_monomials": am_json,
        "gamma_am": { "value": gamma_am, "routes": ["enumeration"] },
        "basis": b_json,
        "gamma_b": { "value": gamma_enum, "routes": ["enumeration", "toric_betti"], "toric_betti": gamma_toric },
        "consistent": ok,
    });
    Ok((v, text, ok))
}

fn recursion_json(r: &RecursionReport) -> Value {
    let correction: Vec<i64> = r
        .rhs
        .iter()
        .enumerate()
        .map(|(i, v)| v - r.deletion.get(i).copied().unwrap_or(0))
        .collect();
    json!({
        "series": match r.series { Series::Am => "AM", Series::B => "B" },
        "d": r.d,
        "lhs": r.lhs,
        "deletion": r.deletion,
        "contraction": r.contraction,
        "correction": correction,
        "rhs": r.rhs,
        "ok": r.ok(),
    })
}

/// Distinct listings of the building set: the given one and two rank-sorted
/// linear extensions with opposite tie breaks.
fn listings(p: &RankedPoset, g: &BuildingSet) -> Result<Vec<BuildingSet>> {
    let mut out = vec![g.clone()];
    let mut asc = g.members().to_vec();
    asc.sort_by_key(|&x| (std::cmp::Reverse(p.rank(x)), x));
    let mut desc = asc.clone();
    desc.sort_by_key(|&x| (std::cmp::Reverse(p.rank(x)), std::cmp::Reverse(x)));
    for order in [asc, desc] {
        let b = BuildingSet::with_order(p, &order)?;
        if !out.contains(&b) {
            out.push(b);
        }
    }
    Ok(out)
}

fn verify_report(job: &Job, data: ModelData, args: &VerifyArgs) -> Result<(Value, String, bool)> {
    let all = !(args.groebner || args.recursions || args.orders || args.restriction);
    let mut report = serde_json::Map::new();
    let mut text = String::new();
    let mut ok = true;
    let p = data.poset.clone();
    if all || args.groebner {
        let m = job.presentation(data.clone())?;
        let check = m.verify_groebner()?;
        let failures: Vec<String> = check
            .failures
            .iter()
            .take(20)
            .map(|&(i, j, kind)| {
                format!(
                    "{kind}({}, {})",
                    m.table.format(&m.alpha[i]),
                    m.table.format(&m.alpha[j])
                )
            })
            .collect();
        ok &= check.ok();
        let _ = writeln!(
            text,
            "groebner: {} ({} pairs, {} failures)",
            check.ok(),
            check.pairs_checked,
            check.failures.len()
        );
        report.insert(
            "groebner".into(),
            json!({ "ok": check.ok(), "pairs": check.pairs_checked, "failures": check.failures.len(), "first_failures": failures }),
        );
    }
    if all || args.recursions {
        let mut items = Vec::new();
        for s in [Series::Am, Series::B] {
            let r = check_recursion(&data, s)?;
            ok &= r.ok();
            let _ = writeln!(
                text,
                "recursion {:?} at {}: lhs {:?} deletion {:?} contraction {:?} d {} ok {}",
                s,
                p.label(data.building.last().expect("nonempty")),
                r.lhs,
                r.deletion,
                r.contraction,
                r.d,
                r.ok()
            );
            let steps = peel_down(&data, s)?;
            let peel_ok = steps.iter().all(RecursionReport::ok);
            ok &= peel_ok;
            let _ = writeln!(
                text,
                "peel-down {:?}: {} steps, ok {peel_ok}",
                s,
                steps.len()
            );
            let mut v = recursion_json(&r);
            v["last"] = json!(p.label(data.building.last().expect("nonempty")));
            v["peel_down"] = json!({ "steps": steps.iter().map(recursion_json).collect::<Vec<_>>(), "ok": peel_ok });
            items.push(v);
        }
        report.insert("recursions".into(), Value::Array(items));
    }
    if all || args.orders {
        let mut rows = Vec::new();
        let mut first: Option<Vec<usize>> = None;
        let mut same = true;
        for g in listings(&p, &data.building)? {
            let d = ModelData {
                building: g.clone(),
                ..data.clone()
            };
            let r = job.presentation(d)?.betti(ORACLE_LIMIT)?;
            same &= first.get_or_insert_with(|| r.betti.clone()) == &r.betti && r.consistent();
            let _ = writeln!(
                text,
                "order {}: betti {:?} consistent {}",
                labels(&p, g.members()).join(","),
                r.betti,
                r.consistent()
            );
            rows.push(json!({ "order": labels(&p, g.members()), "betti": r.betti, "consistent": r.consistent() }));
        }
        ok &= same;
        report.insert("orders".into(), json!({ "listings": rows, "ok": same }));
    }
    if all || args.restriction {
        let r = restriction_map_check(&data)?;
        ok &= r.ok();
        let _ = writeln!(
            text,
            "restriction map: {} generators, {} failures",
            r.source_generators,
            r.failures.len()
        );
        let failures: Vec<Value> = r
            .failures
            .iter()
            .map(|(l, nf)| json!({ "generator": l, "normal_form": nf }))
            .collect();
        report.insert(
            "restriction".into(),
            json!({ "ok": r.ok(), "generators": r.source_generators, "failures": failures }),
        );
    }
    report.insert(
        "building_order".into(),
        json!(labels(&p, data.building.members())),
    );
    report.insert("ok".into(), json!(ok));
    Ok((Value::Object(report), text, ok))
}

fn move_last(data: ModelData, label: &str) -> Result<ModelData> {
    let p = &data.poset;
    let x = p
        .index_of(label)
        .ok_or_else(|| anyhow!("--last {label}: unknown label"))?;
    if !data.building.contains(x) {
        bail!("--last {label}: not a member of the building set");
    }
    let mut order: Vec<usize> = data
        .building
        .members()
        .iter()
        .copied()
        .filter(|&y| y != x)
        .collect();
    order.push(x);
    let g = BuildingSet::with_order(p, &order).with_context(|| format!("--last {label}"))?;
    Ok(ModelData {
        building: g,
        ..data
    })
}

/// Runs one command and renders its report.
pub fn run(cli: &Cli) -> Result<Outcome, Failure> {
    let threads = input(threads_from_env())?;
    let job = Job { cli, threads };
    let (body, text, ok) = match &cli.command {
        Command::Poset => {
            let lp = input(job.arrangement())?;
            let (v, t) = poset_report(&lp.poset);
            (v, t, true)
        }
        Command::Building => {
            let lp = input(job.arrangement())?;
            let g = input(input::select_building(&lp.poset, &cli.building))?;
            let (v, t) = input(building_report(&lp.poset, &g, &cli.building))?;
            (v, t, true)
        }
        Command::Blowup => {
            let lp = input(job.arrangement())?;
            let g = input(input::select_building(&lp.poset, &cli.building))?;
            let (v, t) = blowup_report(&lp.poset, &g);
            (v, t, true)
        }
        Command::ToricBetti => {
            let fan = input(job.fan())?;
            verification(toric_betti_report(&fan))?
        }
        Command::ModelBetti => {
            let (_, data) = input(job.both())?;
            let m = input(job.presentation(data))?;
            verification(model_betti_report(&m))?
        }
        Command::Admissible => {
            let (_, data) = input(job.both())?;
            let m = input(job.presentation(data))?;
            verification(admissible_report(&m))?
        }
        Command::Verify(args) => {
            let (_, data) = input(job.both())?;
            let data = match &args.last {
                Some(l) => input(move_last(data, l))?,
                None => data,
            };
            verification(verify_report(&job, data, args))?
        }
    };
    let mut report = json!({
        "command": command_name(&cli.command),
        "version": env!("CARGO_PKG_VERSION"),
        "threads": { "requested": job.threads, "used": 1 },
        "ok": ok,
        "result": body,
    });
    if !cli.deterministic {
        let secs = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        report["generated_at"] = json!(secs);
    }
    Ok(Outcome { report, text, ok })
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Poset => "poset",
        Command::Building => "building",
        Command::Blowup => "blowup",
        Command::ToricBetti => "toric-betti",
        Command::ModelBetti => "model-betti",
        Command::Admissible => "admissible",
        Command::Verify(_) => "verify",
    }
}

/// The bytes written for an outcome in the chosen format.
pub fn render(cli: &Cli, o: &Outcome) -> String {
    match cli.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&o.report).expect("reports serialize");
            s.push('\n');
            s
        }
        Format::Table => {
            let mut s = o.text.clone();
            let _ = writeln!(s, "status: {}", if o.ok { "ok" } else { "FAILED" });
            s
        }
    }
}
