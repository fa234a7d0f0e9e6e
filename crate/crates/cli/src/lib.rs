//! Command-line front end: argument parsing, dispatch and rendering.
//!
//! `run` never prints; it returns the exit code together with the text for
//! stdout and stderr, so the binary and the tests share one code path.

use std::fmt::Write as _;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use super_einstein::curvature::{einstein_constant, parse_metric, ricci, ricci_group, GroupMetric, RicciReport, Route};
use super_einstein::einstein::{classify_osp, classify_su, ClassificationReport, EinsteinSolution, Positivity};
use super_einstein::flag::{parse_circle, CircledDiagram, DiagramFamily, FlagContext, FlagInvariants};
use super_einstein::linalg::SparseVec;
use super_einstein::scalars::fmt_rational;
use super_einstein::superalgebra::{build_algebra, Family, RealAlgebra};
use super_einstein::verify::{self, Suite, VerifyReport};
use super_einstein::Error;

pub const SCHEMA: &str = "super-einstein/1";

const BLOCK_ORDER: &str = "Block order for --metric: su with two circled nodes p < q uses \
(m_{0,1}, m_{1,1}, m_{1,0}), i.e. the blocks whose roots carry circled coefficients (0,1), (1,1), (1,0); \
su with one node has the single block m_1; osp uses (coefficient 1, coefficient 2).";

#[derive(Parser, Debug)]
#[command(name = "super-einstein", version, about = "Exact curvature and invariant Einstein metrics on flag supermanifolds", after_help = BLOCK_ORDER)]
pub struct Cli {
    /// Emit JSON (schema "super-einstein/1") instead of tables.
    #[arg(long, global = true)]
    pub json: bool,
    /// Print nothing on success; the exit code carries the result.
    #[arg(long, global = true)]
    pub quiet: bool,
    /// Worker threads for parallel grids (default: all cores).
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Inspect a Lie superalgebra model: dimensions, roots, form choice.
    Algebra(AlgebraArgs),
    /// Decompose a flag supermanifold into isotropy blocks.
    Flag(FlagArgs),
    /// Ricci coefficients of a diagonal metric by independent routes.
    #[command(after_help = BLOCK_ORDER)]
    Ricci(RicciArgs),
    /// Classify invariant Einstein metrics.
    #[command(after_help = BLOCK_ORDER)]
    Classify(ClassifyArgs),
    /// Run the invariant and oracle suites.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
pub struct AlgebraArgs {
    /// sl (alias su), osp, gl or sl11.
    #[arg(long)]
    pub family: String,
    #[arg(long, default_value_t = 2)]
    pub m: usize,
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    #[arg(value_enum, default_value_t = AlgebraAction::Info)]
    pub action: AlgebraAction,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum AlgebraAction {
    Info,
}

#[derive(Args, Debug)]
pub struct DiagramArgs {
    /// su (alias sl) or osp; osp(2|2n) ignores --m.
    #[arg(long)]
    pub family: String,
    #[arg(long, default_value_t = 2)]
    pub m: usize,
    #[arg(long)]
    pub n: usize,
    /// Circled nodes, 1-based and comma separated, e.g. 1,2.
    #[arg(long)]
    pub circle: String,
}

impl DiagramArgs {
    fn diagram(&self) -> Result<CircledDiagram, Error> {
        let family: DiagramFamily = self.family.parse()?;
        let circled = parse_circle(&self.circle)?;
        CircledDiagram::new(family, self.m, self.n, &circled)
    }
}

#[derive(Args, Debug)]
pub struct FlagArgs {
    #[command(flatten)]
    pub diagram: DiagramArgs,
    #[arg(value_enum, default_value_t = FlagAction::Decompose)]
    pub action: FlagAction,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum FlagAction {
    Decompose,
}

#[derive(Args, Debug)]
pub struct RicciArgs {
    /// su, osp, or sl11 for the left-invariant group metric diag(x1, x2) route.
    #[arg(long)]
    pub family: String,
    #[arg(long, default_value_t = 2)]
    pub m: usize,
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    #[arg(long, default_value = "")]
    pub circle: String,
    /// One nonzero rational per block, comma separated.
    #[arg(long)]
    pub metric: String,
    /// all, or a comma list of definition (full curvature contraction), thmric (general Killing-form formula), coefficients (block coefficients).
    #[arg(long, default_value = "all")]
    pub route: String,
}

#[derive(Args, Debug)]
pub struct ClassifyArgs {
    /// su (alias sl) or osp.
    #[arg(long)]
    pub family: String,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub p: usize,
    /// Second circled node; omit for the one-node su case.
    #[arg(long)]
    pub q: Option<usize>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long, default_value = "all")]
    pub suite: String,
    /// Bound on m and n for the parameter grids.
    #[arg(long, default_value_t = 6)]
    pub max_size: usize,
}

/// JSON envelope: the schema tag and command ahead of the report fields.
#[derive(Serialize, Deserialize, Debug, PartialEq)]
pub struct Envelope<T> {
    pub schema: String,
    pub command: String,
    #[serde(flatten)]
    pub report: T,
}

#[derive(Serialize, Deserialize, Debug, PartialEq, Eq)]
pub struct AlgebraInfo {
    pub algebra: String,
    pub dim_even: usize,
    pub dim_odd: usize,
    pub rank: usize,
    pub simple_roots: Vec<Vec<i64>>,
    pub simple_root_parity: Vec<bool>,
    pub positive_even_roots: usize,
    pub positive_odd_roots: usize,
    pub form: String,
    pub star: String,
    /// Coefficient b in B = −bQ, where defined.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub killing_coefficient: Option<String>,
}

#[derive(Debug, Default, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

enum Failure {
    /// Bad parameters: exit 2.
    Usage(String),
    /// A check or cross-route comparison failed: exit 1.
    Verification(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::RouteDisagreement(_)
            | Error::ReconciliationFailure(_)
            | Error::Invariant(_)
            | Error::CasimirNotScalar { .. }
            | Error::SumRuleViolation { .. } => Failure::Verification(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome { code: 2, stdout: String::new(), stderr: text }
            } else {
                // --help and --version
                Outcome { code: 0, stdout: text, stderr: String::new() }
            };
        }
    };
    if let Some(t) = cli.threads {
        if t == 0 {
            return Outcome { code: 2, stdout: String::new(), stderr: "error: --threads must be at least 1\n".into() };
        }
        // a second configuration attempt in the same process is harmless
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    match dispatch(&cli) {
        Ok((ok, text)) => Outcome {
            code: if ok { 0 } else { 1 },
            stdout: if cli.quiet { String::new() } else { text },
            stderr: String::new(),
        },
        Err(Failure::Usage(msg)) => {
            Outcome { code: 2, stdout: String::new(), stderr: format!("error: {msg}\n\nRun with --help for usage.\n") }
        }
        Err(Failure::Verification(msg)) => {
            Outcome { code: 1, stdout: String::new(), stderr: format!("verification failed: {msg}\n") }
        }
    }
}

fn json<T: Serialize>(command: &str, report: T) -> String {
    let env = Envelope { schema: SCHEMA.to_string(), command: command.to_string(), report };
    let mut s = serde_json::to_string_pretty(&env).expect("reports serialize");
    s.push('\n');
    s
}

/// Returns (success, rendered text).
fn dispatch(cli: &Cli) -> Result<(bool, String), Failure> {
    match &cli.command {
        Command::Algebra(a) => {
            let info = algebra_info(a)?;
            Ok((true, if cli.json { json("algebra", &info) } else { render_algebra(&info) }))
        }
        Command::Flag(f) => {
            let d = f.diagram.diagram()?;
            let inv = super_einstein::flag::analyze(&d)?;
            Ok((true, if cli.json { json("flag", &inv) } else { render_flag(&inv) }))
        }
        Command::Ricci(r) => {
            let (rep, group) = ricci_command(r)?;
            Ok((true, if cli.json { json("ricci", &rep) } else { render_ricci(&rep, group.as_ref()) }))
        }
        Command::Classify(c) => {
            let rep = classify_command(c)?;
            Ok((true, if cli.json { json("classify", &rep) } else { render_classification(&rep) }))
        }
        Command::Verify(v) => {
            let suite: Suite = v.suite.parse()?;
            let rep = verify::run(suite, v.max_size);
            let text = if cli.json { json("verify", &rep) } else { render_verify(&rep) };
            Ok((rep.ok(), text))
        }
    }
}

fn algebra_info(a: &AlgebraArgs) -> Result<AlgebraInfo, Failure> {
    let family: Family = a.family.parse()?;
    let (m, n) = match family {
        Family::Osp => (2, a.n),
        _ => (a.m, a.n),
    };
    let model = build_algebra(family, m, n)?;
    let name = match family {
        Family::Osp => format!("osp(2|{})", 2 * n),
        Family::Sl11 => "sl(1|1)".into(),
        f => format!("{f}({m}|{n})"),
    };
    let (simple_roots, parity, pe, po) = match &model.roots {
        Some(rs) => (
            rs.simple.iter().map(|r| r.coords.clone()).collect(),
            rs.simple.iter().map(|r| r.odd).collect(),
            rs.positive_even.len(),
            rs.positive_odd.len(),
        ),
        None => (Vec::new(), Vec::new(), 0, 0),
    };
    let killing_coefficient = match family {
        Family::Sl11 => None,
        _ => killing_coefficient(&RealAlgebra::compact(&model)?),
    };
    Ok(AlgebraInfo {
        algebra: name,
        dim_even: model.dim_even(),
        dim_odd: model.dim_odd(),
        rank: model.n_cartan,
        simple_roots,
        simple_root_parity: parity,
        positive_even_roots: pe,
        positive_odd_roots: po,
        form: format!("{:?}", model.q_form),
        star: format!("{:?}", model.star_kind),
        killing_coefficient,
    })
}

/// The b with B = −bQ on every Q-paired basis couple, if one exists.
fn killing_coefficient(real: &RealAlgebra) -> Option<String> {
    let mut found: Option<super_einstein::scalars::Rational> = None;
    for a in 0..real.dim() {
        let ea = SparseVec::unit(a);
        for (c, q) in real.gram_row(a).iter() {
            let ratio = -real.killing(&ea, &SparseVec::unit(c)) / q;
            match &found {
                Some(b) if *b != ratio => return None,
                Some(_) => {}
                None => found = Some(ratio),
            }
        }
    }
    found.map(|b| fmt_rational(&b))
}

fn parse_routes(s: &str) -> Result<Vec<Route>, Failure> {
    if s == "all" {
        return Ok(Route::DIAGONAL.to_vec());
    }
    let routes = s.split(',').map(|r| r.trim().parse::<Route>()).collect::<Result<Vec<_>, _>>()?;
    if routes.is_empty() {
        return Err(Failure::Usage("no route given".into()));
    }
    Ok(routes)
}

/// The group metric is returned alongside so the table can state the Einstein constant.
fn ricci_command(r: &RicciArgs) -> Result<(RicciReport, Option<GroupMetric>), Failure> {
    let metric = parse_metric(&r.metric)?;
    if r.family == "sl11" {
        if metric.x.len() != 2 {
            return Err(Failure::Usage("sl11 takes --metric x1,x2".into()));
        }
        let real = RealAlgebra::sl11();
        let gm = GroupMetric::sl11(metric.x[0].clone(), metric.x[1].clone())?;
        let mut rep = ricci_group(&real, &gm)?;
        rep.metric = metric.x.clone();
        return Ok((rep, Some(gm)));
    }
    let routes = parse_routes(&r.route)?;
    if routes.contains(&Route::Group) {
        return Err(Failure::Usage("the group route applies to --family sl11 only".into()));
    }
    let family: DiagramFamily = r.family.parse()?;
    let circled = parse_circle(&r.circle)?;
    let d = CircledDiagram::new(family, r.m, r.n, &circled)?;
    let ctx = FlagContext::for_diagram(&d)?;
    let dec = ctx.decompose(&d)?;
    let inv = dec.invariants()?;
    Ok((ricci(&dec, &inv, &metric, &routes)?, None))
}

fn classify_command(c: &ClassifyArgs) -> Result<ClassificationReport, Failure> {
    let family: DiagramFamily = c.family.parse()?;
    match family {
        DiagramFamily::Su => {
            let m = c.m.ok_or_else(|| Failure::Usage("--m is required for su".into()))?;
            Ok(classify_su(m, c.n, c.p, c.q)?)
        }
        DiagramFamily::Osp => {
            if c.q.is_some() {
                return Err(Failure::Usage("osp takes a single circled node --p".into()));
            }
            Ok(classify_osp(c.n, c.p)?)
        }
    }
}

fn rats(v: &[super_einstein::scalars::Rational]) -> String {
    v.iter().map(fmt_rational).collect::<Vec<_>>().join(", ")
}

/// Two-column table with aligned keys.
fn table(rows: &[(String, String)]) -> String {
    let w = rows.iter().map(|r| r.0.chars().count()).max().unwrap_or(0);
    let mut out = String::new();
    for (k, v) in rows {
        let pad = w - k.chars().count();
        let _ = writeln!(out, "{k}{}  {v}", " ".repeat(pad));
    }
    out
}

fn render_algebra(i: &AlgebraInfo) -> String {
    let roots: Vec<String> = i
        .simple_roots
        .iter()
        .zip(&i.simple_root_parity)
        .map(|(r, odd)| format!("{:?}{}", r, if *odd { " (odd)" } else { "" }))
        .collect();
    let mut rows = vec![
        ("algebra".to_string(), i.algebra.clone()),
        ("dimension".into(), format!("{} even + {} odd", i.dim_even, i.dim_odd)),
        ("rank".into(), i.rank.to_string()),
        ("positive roots".into(), format!("{} even, {} odd", i.positive_even_roots, i.positive_odd_roots)),
        ("simple roots".into(), if roots.is_empty() { "-".into() } else { roots.join("; ") }),
        ("form Q".into(), i.form.clone()),
        ("star".into(), i.star.clone()),
    ];
    if let Some(b) = &i.killing_coefficient {
        rows.push(("Killing form".into(), format!("B = -bQ with b = {b}")));
    }
    table(&rows)
}

fn render_flag(inv: &FlagInvariants) -> String {
    let mut out = format!("{}  case {}\n", inv.diagram, inv.case_tag);
    let header = ["block", "label", "sdim", "even", "odd", "b", "c", "selected"];
    let mut rows: Vec<Vec<String>> = vec![header.iter().map(|s| s.to_string()).collect()];
    for (i, b) in inv.blocks.iter().enumerate() {
        let sel = match inv.selected[i] {
            Some((j, k)) => format!("({},{})", j + 1, k + 1),
            None => "-".into(),
        };
        rows.push(vec![
            format!("m{}", i + 1),
            format!("{:?}", b.label),
            fmt_rational(&b.d),
            b.dim_even.to_string(),
            b.dim_odd.to_string(),
            fmt_rational(&b.b),
            fmt_rational(&b.c),
            sel,
        ]);
    }
    out.push_str(&grid(&rows));
    let nz = inv.ijk.nonzero_sorted();
    if nz.is_empty() {
        out.push_str("structure constants: all zero\n");
    } else {
        let parts: Vec<String> = nz.iter().map(|((i, j, k), v)| format!("[{i}{j}{k}] = {}", fmt_rational(v))).collect();
        let _ = writeln!(out, "structure constants: {}", parts.join(", "));
    }
    out
}

/// Left-aligned columns.
fn grid(rows: &[Vec<String>]) -> String {
    let cols = rows.iter().map(|r| r.len()).max().unwrap_or(0);
    let widths: Vec<usize> =
        (0..cols).map(|c| rows.iter().filter_map(|r| r.get(c)).map(|s| s.chars().count()).max().unwrap_or(0)).collect();
    let mut out = String::new();
    for r in rows {
        let cells: Vec<String> =
            r.iter().enumerate().map(|(c, s)| format!("{s}{}", " ".repeat(widths[c] - s.chars().count()))).collect();
        let _ = writeln!(out, "{}", cells.join("  ").trim_end());
    }
    out
}

fn render_ricci(rep: &RicciReport, group: Option<&GroupMetric>) -> String {
    let routes: Vec<String> = rep.routes_agreed.iter().map(|r| r.to_string()).collect();
    let mut rows = vec![("metric".to_string(), format!("({})", rats(&rep.metric)))];
    if !rep.r.is_empty() {
        rows.push(("r".into(), format!("({})", rats(&rep.r))));
    }
    if let Some(g) = &rep.ricci_gram {
        for (i, row) in g.iter().enumerate() {
            rows.push((if i == 0 { "Ric".into() } else { String::new() }, format!("[{}]", rats(row))));
        }
    }
    rows.push(("scalar".into(), fmt_rational(&rep.scalar)));
    if let (Some(g), Some(gm)) = (&rep.ricci_gram, group) {
        let c = einstein_constant(g, &gm.gram);
        rows.push(("Einstein".into(), c.map_or("no".into(), |c| format!("yes, Ric = {} g", fmt_rational(&c)))));
    }
    rows.push(("routes agreed".into(), routes.join(", ")));
    table(&rows)
}

fn positivity_text(s: &EinsteinSolution) -> &'static str {
    match s.positivity {
        Positivity::PosWithLambdaPos => "positive for λ > 0",
        Positivity::PosWithLambdaNeg => "positive for λ < 0",
        Positivity::NeverPos => "never positive",
    }
}

fn render_classification(rep: &ClassificationReport) -> String {
    let mut out = format!("{}  case {}\nbranch: {}\n", rep.parameters, rep.case, rep.corollary_branch);
    if rep.solutions.is_empty() {
        out.push_str("no invariant Einstein metrics\n");
        return out;
    }
    let mut rows = Vec::new();
    for s in &rep.solutions {
        rows.push(vec![
            s.render(),
            s.labels.join(" "),
            positivity_text(s).to_string(),
            if s.residual_certified { "certified".into() } else { "UNCERTIFIED".into() },
        ]);
    }
    out.push_str(&grid(&rows));
    let _ = writeln!(out, "{} solution{}", rep.count, if rep.count == 1 { "" } else { "s" });
    out
}

fn render_verify(rep: &VerifyReport) -> String {
    let mut out = String::new();
    for c in &rep.checks {
        match &c.failure {
            None => {
                let _ = writeln!(out, "PASS  {} ({} cases)", c.name, c.cases);
            }
            Some(f) => {
                let _ = writeln!(out, "FAIL  {} ({} cases): {f}", c.name, c.cases);
            }
        }
    }
    let _ =
        writeln!(out, "suite {} (max size {}): {} passed, {} failed", rep.suite, rep.max_size, rep.passed, rep.failed);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_aligns_columns_and_trims() {
        let rows = vec![vec!["a".to_string(), "bb".into()], vec!["ccc".into(), "d".into()]];
        assert_eq!(grid(&rows), "a    bb\nccc  d\n");
    }

    #[test]
    fn table_pads_keys() {
        assert_eq!(table(&[("k".into(), "v".into()), ("key".into(), "w".into())]), "k    v\nkey  w\n");
    }

    #[test]
    fn error_kinds_map_to_exit_codes() {
        assert!(matches!(Failure::from(Error::RouteDisagreement("x".into())), Failure::Verification(_)));
        assert!(matches!(Failure::from(Error::Parse("x".into())), Failure::Usage(_)));
    }

    #[test]
    fn envelope_flattens_report_fields() {
        let js = json("algebra", serde_json::json!({"dim_even": 3}));
        assert!(js.starts_with("{\n  \"schema\": \"super-einstein/1\",\n  \"command\": \"algebra\",\n  \"dim_even\": 3"));
    }
}
