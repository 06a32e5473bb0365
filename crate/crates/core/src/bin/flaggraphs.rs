use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use flaggraphs::flaggraph::{gamma_gc, relation_graph, sl2p_census, FlagGraph};
use flaggraphs::gl1::{GammaL1, GammaL1Element};
use flaggraphs::verify::{
    are_isomorphic, check_complete_multipartite, design_recover, feasibility_check, invariants, is_arc_transitive,
    predict_valency, quotient_analysis, Extent,
};
use flaggraphs::{named_group, AffineSpace, Error, Exec, Field, GroupSpec, LineRelation, NamedGroup, StandardParameters};

#[derive(Parser)]
#[command(name = "flaggraphs", version, about = "Build and verify flag graphs of affine spaces over finite fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Largest flag count any command may build.
    #[arg(long, global = true, default_value_t = 1 << 16)]
    flag_cap: u64,
    /// Run every loop on one thread.
    #[arg(long, global = true)]
    sequential: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Build a flag graph and export it.
    Build(BuildArgs),
    /// Verify a graph family or an exported edge list.
    Verify(VerifyArgs),
    /// Self-paired compatible orbitals of SL(2,p) x| <diag(1,c)>.
    Census(CensusArgs),
    /// Standard parameters of a subgroup of GammaL(1,q).
    StandardForm(StandardFormArgs),
    /// Feasibility conditions (A1)-(A4) of the full flag set under a group.
    Feasible(FeasibleArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Family {
    Plus,
    Par,
    Skew,
    Gc,
    CensusMember,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Edgelist,
    Json,
}

#[derive(Args, Clone)]
struct FamilySpec {
    #[arg(short = 'n', long)]
    n: Option<usize>,
    #[arg(short = 'q', long)]
    q: Option<u32>,
    #[arg(long)]
    t: Option<u32>,
    #[arg(long)]
    e: Option<u32>,
    #[arg(long)]
    s: Option<u32>,
    #[arg(long)]
    r: Option<u32>,
    #[arg(long)]
    p: Option<u32>,
    /// Multiplicative order of the scaling element l.
    #[arg(long)]
    ell_order: Option<u32>,
    /// Position in the census listing.
    #[arg(long)]
    index: Option<usize>,
}

#[derive(Args)]
struct BuildArgs {
    #[arg(value_enum)]
    family: Family,
    #[command(flatten)]
    spec: FamilySpec,
    /// Write `<out>.edges` and `<out>.meta.json` instead of printing.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "edgelist")]
    format: Format,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    family: Option<Family>,
    /// Edge list to verify instead of a built family (needs -n and -q).
    #[arg(long)]
    edges: Option<PathBuf>,
    #[command(flatten)]
    spec: FamilySpec,
}

#[derive(Args)]
struct CensusArgs {
    #[arg(long)]
    p: u32,
    /// The scaling element l of diag(1, l), as an integer mod p.
    #[arg(long)]
    c: u32,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct StandardFormArgs {
    #[arg(short = 'q', long)]
    q: u32,
    /// Generator `a,k` (element code `a`, or `w^e` for a power of the primitive element)
    /// acting as y -> a y^(p^k); repeatable.
    #[arg(long = "gen", required = true)]
    generators: Vec<String>,
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GroupKind {
    Translations,
    Asl,
    Agl,
    Agammal,
    Agl1,
    Agammal1,
    Sl2h,
    Sl2pc,
}

#[derive(Args)]
struct FeasibleArgs {
    #[arg(long, value_enum)]
    group: GroupKind,
    #[arg(short = 'n', long, default_value_t = 2)]
    n: usize,
    #[arg(short = 'q', long)]
    q: u32,
    #[arg(long)]
    t: Option<u32>,
    #[arg(long)]
    e: Option<u32>,
    #[arg(long)]
    s: Option<u32>,
    #[arg(long)]
    c: Option<u32>,
}

#[derive(Debug)]
enum Failure {
    Lib(Error),
    Usage(String),
    Io(std::io::Error),
    Claims(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) | Failure::Io(_) => 2,
            Failure::Claims(_) => 4,
            Failure::Lib(e) => match e {
                Error::SizeCapExceeded { .. } | Error::OrbitCapExceeded(_) => 5,
                Error::NotSelfPaired | Error::NotSelfPairedForC { .. } | Error::IncompatibleSeed(_) => 3,
                Error::NotCompleteMultipartite(_)
                | Error::NotAnAutomorphismGroup { .. }
                | Error::NotAlmostMulticover { .. }
                | Error::NotA2Design { .. }
                | Error::InternalMismatch(_) => 4,
                _ => 2,
            },
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Lib(Error::NotSelfPairedForC { r, reason }) => {
                format!("no self-paired orbital for c = w^{r} (the orbital and its reverse differ): {reason}")
            }
            Failure::Lib(e) => e.to_string(),
            Failure::Usage(m) | Failure::Claims(m) => m.clone(),
            Failure::Io(e) => e.to_string(),
        }
    }
}

type Outcome = std::result::Result<(), Failure>;

/// Writes to stdout, tolerating a reader that has gone away.
macro_rules! out {
    ($($arg:tt)*) => {{
        let _ = write!(std::io::stdout().lock(), $($arg)*);
    }};
}

macro_rules! outln {
    ($($arg:tt)*) => {{
        let _ = writeln!(std::io::stdout().lock(), $($arg)*);
    }};
}


fn need<T: Copy>(v: Option<T>, name: &str) -> std::result::Result<T, Failure> {
    v.ok_or_else(|| Failure::Usage(format!("missing --{name}")))
}

fn pretty<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("report serializes")
}

struct Ctx {
    flag_cap: u64,
    exec: Exec,
}

impl Ctx {
    fn space(&self, n: usize, q: u32) -> std::result::Result<flaggraphs::SpaceRef, Failure> {
        if n < 2 {
            return Err(Failure::Usage("flag graphs need n >= 2".into()));
        }
        let field = Field::of_order(q)?;
        let points = (q as u64).checked_pow(n as u32).unwrap_or(u64::MAX);
        let flags = points.saturating_mul((points - 1) / (q as u64 - 1));
        if flags > self.flag_cap {
            return Err(Error::SizeCapExceeded { what: "flags", size: flags, cap: self.flag_cap }.into());
        }
        Ok(AffineSpace::new(n, field)?)
    }
}

/// A built graph with the group that constructed it.
struct Built {
    graph: FlagGraph,
    group: GroupSpec,
    family: Family,
}

fn relation_of(family: Family) -> Option<LineRelation> {
    match family {
        Family::Plus => Some(LineRelation::Intersecting),
        Family::Par => Some(LineRelation::Parallel),
        Family::Skew => Some(LineRelation::Skew),
        _ => None,
    }
}

fn census_element(p: u32, ell_order: u32) -> std::result::Result<u32, Failure> {
    if ell_order == 0 || (p - 1) % ell_order != 0 {
        return Err(Failure::Usage(format!("--ell-order {ell_order} must divide p - 1 = {}", p - 1)));
    }
    let f = Field::of_order(p)?;
    Ok(f.omega_pow(((p - 1) / ell_order) as i64).code())
}

fn check_census_element(p: u32, c: u32) -> std::result::Result<u32, Failure> {
    let f = Field::of_order(p).map_err(|_| Failure::Usage(format!("p = {p} must be an odd prime")))?;
    if f.ell() != 1 || p == 2 {
        return Err(Failure::Usage(format!("p = {p} must be an odd prime")));
    }
    let el = f.element(c).map_err(|_| Failure::Usage(format!("c = {c} is not an element of F_{p}")))?;
    let order = f.mult_order(el).map_err(|_| Failure::Usage("c must be nonzero".into()))?;
    if order % 2 == 1 {
        return Err(Failure::Usage(format!("c = {c} has odd order {order}; the census needs l of even order")));
    }
    Ok(order)
}

fn build(ctx: &Ctx, family: Family, spec: &FamilySpec) -> std::result::Result<Built, Failure> {
    match family {
        Family::Plus | Family::Par | Family::Skew => {
            let (n, q) = (need(spec.n, "n")?, need(spec.q, "q")?);
            let space = ctx.space(n, q)?;
            let graph = relation_graph(&space, relation_of(family).expect("relation family"), ctx.exec)?;
            let group = named_group(NamedGroup::AGammaL { n, q })?;
            Ok(Built { graph, group, family })
        }
        Family::Gc => {
            let q = need(spec.q, "q")?;
            if spec.n.is_some_and(|n| n != 2) {
                return Err(Failure::Usage("gc graphs live on AG(2,q)".into()));
            }
            ctx.space(2, q)?;
            let params = StandardParameters { t: need(spec.t, "t")?, e: need(spec.e, "e")?, s: need(spec.s, "s")? };
            let g = gamma_gc(q, params, need(spec.r, "r")?)?;
            Ok(Built { graph: g.graph, group: g.group, family })
        }
        Family::CensusMember => {
            let p = need(spec.p, "p")?;
            ctx.space(2, p)?;
            check_census_element(p, p - 1)?;
            let l = census_element(p, need(spec.ell_order, "ell-order")?)?;
            check_census_element(p, l)?;
            let index = need(spec.index, "index")?;
            let (group, members) = sl2p_census(p, l)?;
            let count = members.len();
            let (_, graph) = members
                .into_iter()
                .nth(index)
                .ok_or_else(|| Failure::Usage(format!("--index {index} out of range ({count} members)")))?;
            Ok(Built { graph, group, family })
        }
    }
}

fn cmd_build(ctx: &Ctx, args: &BuildArgs) -> Outcome {
    let built = build(ctx, args.family, &args.spec)?;
    let g = &built.graph;
    match &args.out {
        Some(prefix) => {
            fs::write(prefix.with_extension("edges"), g.edge_list())?;
            fs::write(prefix.with_extension("meta.json"), g.meta_json() + "\n")?;
        }
        None => match args.format {
            Format::Edgelist => out!("{}", g.edge_list()),
            Format::Json => {
                let edges: Vec<[String; 2]> = g.edge_list().lines().map(|l| {
                    let (a, b) = l.split_once('\t').expect("tab separated");
                    [a.to_string(), b.to_string()]
                }).collect();
                outln!("{}", pretty(&json!({"meta": g.meta(), "edges": edges})));
            }
        },
    }
    Ok(())
}

#[derive(Serialize)]
struct Claim {
    claim: String,
    expected: Value,
    actual: Value,
    pass: bool,
}

fn claim<T: Serialize + PartialEq>(out: &mut Vec<Claim>, text: &str, expected: T, actual: T) {
    let pass = expected == actual;
    out.push(Claim { claim: text.into(), expected: json!(expected), actual: json!(actual), pass });
}

fn cmd_verify(ctx: &Ctx, args: &VerifyArgs) -> Outcome {
    let (graph, family) = match (&args.edges, args.family) {
        (Some(path), family) => {
            let (n, q) = (need(args.spec.n, "n")?, need(args.spec.q, "q")?);
            let space = ctx.space(n, q)?;
            let text = fs::read_to_string(path)?;
            let g = FlagGraph::from_edge_list(space, &text, "file", json!({"path": path.display().to_string()}))?;
            let family = match family {
                Some(f) => Some((f, build(ctx, f, &args.spec)?.group)),
                None => None,
            };
            (g, family)
        }
        (None, Some(family)) => {
            let b = build(ctx, family, &args.spec)?;
            (b.graph, Some((b.family, b.group)))
        }
        (None, None) => return Err(Failure::Usage("give --family or --edges".into())),
    };
    let (report, failed) = verify_report(ctx, &graph, family.as_ref(), &args.spec)?;
    outln!("{}", pretty(&report));
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Claims(format!("failed claims: {}", failed.join("; "))))
    }
}

fn verify_report(
    ctx: &Ctx,
    g: &FlagGraph,
    family: Option<&(Family, GroupSpec)>,
    spec: &FamilySpec,
) -> std::result::Result<(Value, Vec<String>), Failure> {
    let space = g.space().clone();
    let (n, q) = (space.dim(), space.q() as u64);
    let qn = q.pow(n as u32);
    let blocks = ((qn - 1) / (q - 1)) as usize;
    let inv = invariants(g, ctx.exec);
    let mut claims = Vec::new();
    let edgeless = g.edge_count() == 0;

    let quotient = if edgeless { None } else { Some(quotient_analysis(g)?) };
    let mut design = Value::Null;

    if let Some(&(family, ref group)) = family {
        claim(&mut claims, "order q^n (q^n - 1)/(q - 1)", (qn * (qn - 1) / (q - 1)) as usize, inv.order);
        match family {
            Family::Plus => {
                claim(&mut claims, "valency (q^n - q)(q - 1)", Some(((qn - q) * (q - 1)) as usize), inv.regular_degree());
                claim(&mut claims, "girth 3", Extent::Finite(3), inv.girth);
                claim(&mut claims, "diameter 2", Extent::Finite(2), inv.diameter);
            }
            Family::Par => {
                claim(&mut claims, "valency q^n - q", Some((qn - q) as usize), inv.regular_degree());
                claim(&mut claims, "(q^n - 1)/(q - 1) components", blocks, inv.components.len());
                for c in &inv.components {
                    let parts = check_complete_multipartite(g.adjacency(), c)?;
                    claim(&mut claims, "component complete q^(n-1)-partite, parts of size q", ((qn / q) as usize, q as usize), parts);
                }
            }
            Family::Skew => {
                let val = ((qn - q) * (qn - q * q) / (q - 1)) as usize;
                claim(&mut claims, "valency (q^n - q)(q^n - q^2)/(q - 1)", Some(val), inv.regular_degree());
                if n >= 3 {
                    claim(&mut claims, "girth 3", Extent::Finite(3), inv.girth);
                    claim(&mut claims, "diameter 2", Extent::Finite(2), inv.diameter);
                }
            }
            Family::Gc => {
                let params = StandardParameters { t: need(spec.t, "t")?, e: need(spec.e, "e")?, s: need(spec.s, "s")? };
                let r = need(spec.r, "r")?;
                let f = Field::of_order(q as u32)?;
                let ell_c = GammaL1::from_standard(&f, params)?.orbit_of(&f, f.omega_pow(r as i64)).len();
                claim(&mut claims, "connected", true, inv.is_connected());
                claim(&mut claims, "valency (q^2 - q) l_c", Some((q * q - q) as usize * ell_c), inv.regular_degree());
                let text = "valency i q (q - 1)^2/(t s)";
                match predict_valency(q as u32, params, r) {
                    Ok(pred) => claim(&mut claims, text, Some(pred.valency), inv.regular_degree()),
                    Err(Error::InternalMismatch(why)) => claims.push(Claim {
                        claim: text.into(),
                        expected: json!(why),
                        actual: json!(inv.regular_degree()),
                        pass: false,
                    }),
                    Err(e) => return Err(e.into()),
                }
            }
            Family::CensusMember => {
                claim(&mut claims, "connected", true, inv.is_connected());
            }
        }
        if !edgeless {
            claim(&mut claims, "arc-transitive under the constructing group", true, is_arc_transitive(g, group)?);
            let qr = quotient.as_ref().expect("edges present");
            claim(&mut claims, "complete quotient", true, qr.quotient_complete);
            claim(&mut claims, "block size (q^n - 1)/(q - 1)", blocks, qr.block_size);
            claim(&mut claims, "multiplicity m = q - 1", Some((q - 1) as usize), qr.multiplicity);
            let d = design_recover(g, group, qr)?;
            claim(&mut claims, "design 2-(q^n, q, 1)", (qn as usize, q as usize, 1usize), (d.v, d.k, d.lambda));
            design = json!({"v": d.v, "k": d.k, "lambda": d.lambda, "blocks": d.blocks.len(), "blocks_are_lines": d.blocks_are_lines(&space)});
        }
    }
    let failed: Vec<String> = claims.iter().filter(|c| !c.pass).map(|c| c.claim.clone()).collect();
    let report = json!({
        "meta": g.meta(),
        "invariants": inv,
        "quotient": quotient,
        "design": design,
        "claims": claims,
    });
    Ok((report, failed))
}

fn cmd_census(ctx: &Ctx, args: &CensusArgs) -> Outcome {
    let order = check_census_element(args.p, args.c)?;
    ctx.space(2, args.p)?;
    let (group, members) = sl2p_census(args.p, args.c)?;
    let space = group.space().clone();
    let expected = (args.p - 1) / order + 1;
    let mut rows = Vec::new();
    for (i, (o, g)) in members.iter().enumerate() {
        let inv = invariants(g, ctx.exec);
        let (a, b) = o.seed();
        rows.push(json!({
            "index": i,
            "seed": [space.flag_label(a), space.flag_label(b)],
            "size": o.len(),
            "relation": format!("{:?}", o.relation(&space)),
            "order": inv.order,
            "valency": inv.regular_degree(),
            "connected": inv.is_connected(),
        }));
    }
    let others: Vec<usize> = (0..members.len()).filter(|&i| members[i].0.relation(&space) != LineRelation::Parallel).collect();
    let mut matrix = Vec::new();
    for &i in &others {
        let mut row = Vec::new();
        for &j in &others {
            row.push(i == j || are_isomorphic(&members[i].1, &members[j].1, ctx.exec)?);
        }
        matrix.push(row);
    }
    let report = json!({
        "p": args.p,
        "c": args.c,
        "order_of_c": order,
        "expected_count": expected,
        "count": members.len(),
        "orbitals": rows,
        "non_parallel": others,
        "isomorphic": matrix,
    });
    if args.json {
        outln!("{}", pretty(&report));
    } else {
        outln!("SL(2,{}) x| <diag(1,{})>: {} self-paired orbitals (expected {})", args.p, args.c, members.len(), expected);
        for r in report["orbitals"].as_array().expect("array") {
            outln!(
                "  #{} {:<12} size {:>6}  order {}  valency {}  connected {}",
                r["index"], r["relation"].as_str().unwrap_or(""), r["size"], r["order"], r["valency"], r["connected"]
            );
        }
        let all = matrix.iter().flatten().all(|&x| x);
        outln!("  non-parallel members pairwise isomorphic: {all}");
    }
    Ok(())
}

fn parse_generator(f: &Field, text: &str) -> std::result::Result<GammaL1Element, Failure> {
    let bad = || Failure::Usage(format!("generator '{text}' is not of the form a,k or w^e,k"));
    let (a, k) = text.split_once(',').ok_or_else(bad)?;
    let k: i64 = k.trim().parse().map_err(|_| bad())?;
    let a = match a.trim().strip_prefix("w^") {
        Some(e) => f.omega_pow(e.parse().map_err(|_| bad())?),
        None => f.element(a.trim().parse().map_err(|_| bad())?).map_err(|_| bad())?,
    };
    Ok(GammaL1Element::new(f, a, k)?)
}

fn cmd_standard_form(args: &StandardFormArgs) -> Outcome {
    let f = Field::of_order(args.q)?;
    let gens = args.generators.iter().map(|g| parse_generator(&f, g)).collect::<std::result::Result<Vec<_>, _>>()?;
    let m = GammaL1::closure(&f, &gens);
    let sp = m.standard_form(&f)?;
    let regenerated = GammaL1::from_standard(&f, sp)?;
    if args.json {
        outln!("{}", pretty(&json!({"q": args.q, "t": sp.t, "e": sp.e, "s": sp.s, "order": regenerated.order()})));
    } else {
        outln!("(t,e,s) = ({},{},{})  order {}", sp.t, sp.e, sp.s, regenerated.order());
    }
    Ok(())
}

fn cmd_feasible(args: &FeasibleArgs) -> Outcome {
    let (n, q) = (args.n, args.q);
    let kind = match args.group {
        GroupKind::Translations => NamedGroup::Translations { n, q },
        GroupKind::Asl => NamedGroup::ASL { n, q },
        GroupKind::Agl => NamedGroup::AGL { n, q },
        GroupKind::Agammal => NamedGroup::AGammaL { n, q },
        GroupKind::Agl1 => NamedGroup::AffineLine { n, q, frobenius: false },
        GroupKind::Agammal1 => NamedGroup::AffineLine { n, q, frobenius: true },
        GroupKind::Sl2h => NamedGroup::SL2SemidirectH { q, t: need(args.t, "t")?, e: need(args.e, "e")?, s: need(args.s, "s")? },
        GroupKind::Sl2pc => NamedGroup::SL2pC { p: q, l: need(args.c, "c")? },
    };
    let label = kind.label();
    let report = feasibility_check(&named_group(kind)?)?;
    outln!("{}", pretty(&json!({"group": label, "report": report})));
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let ctx = Ctx { flag_cap: cli.flag_cap, exec: if cli.sequential { Exec::Sequential } else { Exec::Parallel } };
    let outcome = match &cli.command {
        Command::Build(a) => cmd_build(&ctx, a),
        Command::Verify(a) => cmd_verify(&ctx, a),
        Command::Census(a) => cmd_census(&ctx, a),
        Command::StandardForm(a) => cmd_standard_form(a),
        Command::Feasible(a) => cmd_feasible(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.exit_code())
        }
    }
}
