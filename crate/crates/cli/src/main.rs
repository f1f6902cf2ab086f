//! sheaflab: exact sheaves on graphs from the command line.
//!
//! Exit codes: 0 all checks pass, 1 mathematical violation (witness
//! emitted), 2 input error, 3 budget exhausted or trials skipped.

use sheaflab_core::digraph::{
    classify_morphism, emit_bigraph, emit_digraph, fibre_product_over_b2, girths, invariants,
    GirthBound,
};
use sheaflab_core::error::Error;
use sheaflab_core::excess::{max_excess, MaxExcessCertificate, MaxExcessMethod, MaxExcessOptions};
use sheaflab_core::galois::{cover_from_coordinates, normal_extension};
use sheaflab_core::io::{parse_coordinates, parse_digraph, parse_group_spec, parse_sheaf, ParsedGraph};
use sheaflab_core::linalg::{vandermonde_totally_independent, Matrix, PrimeField, DEFAULT_PRIME};
use sheaflab_core::rho::{
    build_kernel, generic_excess_experiment, shnc_verify, stallings_core, vertex_family_check,
    CayleyContext, FamilySearch, Subgraph, TrialOutcome,
};
use sheaflab_core::twisted::twisted_betti;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const USAGE: &str = "\
sheaflab <command> [args]

commands:
  invariants <graph>                     h0 h1 chi rho rho' girth
  fibre <K.dg> <L.dg>                    fibre product of bigraphs over B2
  cover <base.dg> <coords>               Galois cover from coordinates
  normal-ext <bigraph>                   Gross normal extension over B2
  homology <sheaf>                       sheaf Betti numbers
  twisted <sheaf>                        twisted Betti numbers
      [--samples N] [--seed S] [--prime P]
  maxexcess <sheaf>                      certified maximum excess
      [--method auto|brute|edge-simple|pullback] [--budget N]
      [--samples N] [--seed S] [--prime P]
  shnc <K.dg> <L.dg>                     SHNC/HNC margins for etale bigraphs
  rho-kernel --group <spec> --g1 <e> --g2 <e> [--subgraph <file>]
      [--k N] [--prime P] [--mseed S] [--check-families] [--budget N]
  generic-exp --group <spec> --g1 <e> --g2 <e> [--subgraph <file>]
      [--k N] [--trials N] [--seed S] [--prime P] [--budget N]
  stallings --words \"a,b,abA\"            Stallings core of subgroup words

group specs: cyclic:<n>, symmetric:<n>, product:<spec>,<spec>, table:<file>
exit codes: 0 pass, 1 violation, 2 input error, 3 budget/skip
";

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let mut report = Report::new();
    let code = match run(&args, &mut report) {
        Ok(code) => code,
        Err(e) => {
            report.kv("error", compact(&e.to_string()));
            match e {
                Error::Budget(_) => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    };
    report.flush();
    code
}

fn compact(s: &str) -> String {
    s.replace('\n', " ")
}

/// Buffered report: flat key=value lines plus labelled witness blocks,
/// written once. A consumer that closes the pipe early (head, grep -m) is
/// not an error.
struct Report {
    out: String,
}

impl Report {
    fn new() -> Report {
        Report { out: String::new() }
    }
    fn kv(&mut self, key: &str, value: impl std::fmt::Display) {
        use std::fmt::Write as _;
        writeln!(self.out, "{key}={value}").unwrap();
    }
    fn line(&mut self, text: impl std::fmt::Display) {
        use std::fmt::Write as _;
        writeln!(self.out, "{text}").unwrap();
    }
    fn block(&mut self, label: &str, body: &str) {
        use std::fmt::Write as _;
        writeln!(self.out, "{label}:").unwrap();
        self.out.push_str(body);
    }
    fn flush(&self) {
        use std::io::Write as _;
        let _ = std::io::stdout().write_all(self.out.as_bytes());
        let _ = std::io::stdout().flush();
    }
}

/// Minimal flag parser: `--key value` pairs plus boolean flags from an
/// allowlist, positionals in order. Unknown flags are rejected.
struct Args {
    positional: Vec<String>,
    values: BTreeMap<String, String>,
}

fn parse_args(args: &[String], value_flags: &[&str], bool_flags: &[&str]) -> Result<Args, Error> {
    let mut positional = Vec::new();
    let mut values = BTreeMap::new();
    let mut i = 0;
    while i < args.len() {
        let a = &args[i];
        if let Some(name) = a.strip_prefix("--") {
            if bool_flags.contains(&name) {
                values.insert(name.to_string(), "true".to_string());
                i += 1;
            } else if value_flags.contains(&name) {
                let v = args
                    .get(i + 1)
                    .ok_or_else(|| Error::Input(format!("flag --{name} needs a value")))?;
                values.insert(name.to_string(), v.clone());
                i += 2;
            } else {
                return Err(Error::Input(format!("unknown flag --{name}")));
            }
        } else {
            positional.push(a.clone());
            i += 1;
        }
    }
    Ok(Args { positional, values })
}

impl Args {
    fn u64_or(&self, key: &str, default: u64) -> Result<u64, Error> {
        match self.values.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| Error::Input(format!("flag --{key} expects an integer, got `{v}`"))),
        }
    }
    fn usize_or(&self, key: &str, default: usize) -> Result<usize, Error> {
        Ok(self.u64_or(key, default as u64)? as usize)
    }
    fn has(&self, key: &str) -> bool {
        self.values.contains_key(key)
    }
    fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(|s| s.as_str())
    }
}

fn read_file(path: &str) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| Error::Input(format!("cannot read `{path}`: {e}")))
}

/// Resolve a path mentioned inside a file relative to that file.
fn sibling_resolver(anchor: &str) -> impl Fn(&str) -> Result<String, Error> + '_ {
    move |rel: &str| {
        let base = Path::new(anchor).parent().unwrap_or(Path::new("."));
        let joined: PathBuf = if Path::new(rel).is_absolute() {
            rel.into()
        } else {
            base.join(rel)
        };
        read_file(&joined.to_string_lossy())
    }
}

fn load_graph(path: &str) -> Result<ParsedGraph, Error> {
    parse_digraph(&read_file(path)?)
}

fn load_sheaf(path: &str, prime: Option<u64>) -> Result<sheaflab_core::sheaf::Sheaf, Error> {
    parse_sheaf(&read_file(path)?, sibling_resolver(path), prime)
}

fn prime_flag(args: &Args) -> Result<Option<u64>, Error> {
    Ok(match args.get("prime") {
        Some(v) => Some(
            v.parse::<u64>()
                .map_err(|_| Error::Input(format!("bad --prime `{v}`")))?,
        ),
        None => None,
    })
}

fn run(args: &[String], report: &mut Report) -> Result<ExitCode, Error> {
    let Some(cmd) = args.first() else {
        report.out.push_str(USAGE);
        return Ok(ExitCode::from(2));
    };
    let rest = &args[1..];
    match cmd.as_str() {
        "invariants" => cmd_invariants(rest, report),
        "fibre" => cmd_fibre(rest, report),
        "cover" => cmd_cover(rest, report),
        "normal-ext" => cmd_normal_ext(rest, report),
        "homology" => cmd_homology(rest, report),
        "twisted" => cmd_twisted(rest, report),
        "maxexcess" => cmd_maxexcess(rest, report),
        "shnc" => cmd_shnc(rest, report),
        "rho-kernel" => cmd_rho_kernel(rest, report),
        "generic-exp" => cmd_generic_exp(rest, report),
        "stallings" => cmd_stallings(rest, report),
        "help" | "--help" | "-h" => {
            report.out.push_str(USAGE);
            Ok(ExitCode::SUCCESS)
        }
        other => Err(Error::Input(format!("unknown command `{other}`"))),
    }
}

fn cmd_invariants(args: &[String], report: &mut Report) -> Result<ExitCode, Error> {
    let a = parse_args(args, &["girth-bound"], &[])?;
    let [path] = a.positional.as_slice() else {
        return Err(Error::Input("usage: invariants <graph>".into()));
    };
    let g = load_graph(path)?;
    let inv = invariants(g.digraph());
    let bound = a.usize_or("girth-bound", 20)?;
    let (girth, abelian) = girths(g.digraph(), bound)?;
    report.kv("vertices", g.digraph().v_count());
    report.kv("edges", g.digraph().e_count());
    report.kv("h0", inv.h0);
    report.kv("h1", inv.h1);
    report.kv("chi", inv.chi);
    report.kv("rho", inv.rho);
    report.kv("rho_prime", inv.rho_prime);
    report.kv("acyclic_components", inv.acyclic_components);
    let fmt = |g: GirthBound| match g {
        GirthBound::Finite(x) => x.to_string(),
        GirthBound::ExceedsBound => format!(">{bound}"),
    };
    report.kv("girth", fmt(girth));
    report.kv("abelian_girth", fmt(abelian));
    Ok(ExitCode::SUCCESS)
}

fn cmd_fibre(args: &[String], report: &mut Report) -> Result<ExitCode, Error> {
    let a = parse_args(args, &[], &[])?;
    let [kp, lp] = a.positional.as_slice() else {
        return Err(Error::Input("usage: fibre <K.dg> <L.dg>".into()));
    };
    let k = load_graph(kp)?;
    let l = load_graph(lp)?;
    let (prod, p1, p2) = fibre_product_over_b2(k.bigraph()?, l.bigraph()?)?;
    let inv = invariants(prod.graph());
    report.kv("vertices", prod.graph().v_count());
    report.kv("edges", prod.graph().e_count());
    report.kv("h0", inv.h0);
    report.kv("h1", inv.h1);
    report.kv("rho", inv.rho);
    report.kv("rho_prime", inv.rho_prime);
    report.kv("projection1", class_label(&p1));
    report.kv("projection2", class_label(&p2));
    report.block("product", &emit_bigraph(&prod));
    Ok(ExitCode::SUCCESS)
}

fn class_label(m: &sheaflab_core::digraph::GraphMorphism) -> String {
    match classify_morphism(m) {
        sheaflab_core::digraph::MorphismClass::Covering { degree: Some(d) } => {
            format!("covering(degree={d})")
        }
        sheaflab_core::digraph::MorphismClass::Covering { degree: None } => {
            "covering(degree=mixed)".to_string()
        }
        sheaflab_core::digraph::MorphismClass::Etale => "etale".to_string(),
        sheaflab_core::digraph::MorphismClass::Neither => "neither".to_string(),
    }
}

fn cmd_cover(args: &[String], report: &mut Report) -> Result<ExitCode, Error> {
    let a = parse_args(args, &[], &[])?;
    let [gp, cp] = a.positional.as_slice() else {
        return Err(Error::Input("usage: cover <base.dg> <coords>".into()));
    };
    let base = load_graph(gp)?.digraph().clone();
    let coords = parse_coordinates(&read_file(cp)?, &base, sibling_resolver(cp))?;
    let cover = cover_from_coordinates(&coords)?;
    let inv = invariants(&cover.total);
    report.kv("group_order", cover.group.order());
    report.kv("degree", cover.degree());
    report.kv("vertices", cover.total.v_count());
    report.kv("edges", cover.total.e_count());
    report.kv("components", inv.h0);
    report.kv("classification", class_label(&cover.projection));
    report.block("total", &emit_digraph(&cover.total));
    Ok(ExitCode::SUCCESS)
}

fn cmd_normal_ext(args: &[String], report: &mut Report) -> Result<ExitCode, Error> {
    let a = parse_args(args, &[], &[])?;
    let [path] = a.positional.as_slice() else {
        return Err(Error::Input("usage: normal-ext <bigraph>".into()));
    };
    let b = load_graph(path)?;
    let pi = b.bigraph()?.to_b2_morphism();
    let (cover, mu) = normal_extension(&pi)?;
    let d = b.digraph().v_count();
    report.kv("symmetric_degree", d);
    report.kv("group_order", cover.group.order());
    report.kv("degree_over_base", cover.degree());
    report.kv("vertices", cover.total.v_count());
    report.kv("edges", cover.total.e_count());
    report.kv("projection_to_source", class_label(&mu));
    report.block("total", &emit_digraph(&cover.total));
    Ok(ExitCode::SUCCESS)
}

fn cmd_homology(args: &[String], report: &mut Report) -> Result<ExitCode, Error> {
    let a = parse_args(args, &["prime"], &[])?;
    let [path] = a.positional.as_slice() else {
        return Err(Error::Input("usage: homology <sheaf>".into()));
    };
    let s = load_sheaf(path, prime_flag(&a)?)?;
    let h = s.homology();
    report.kv("field", s.field().modulus());
    report.kv("dim_v", s.total_vdim());
    report.kv("dim_e", s.total_edim());
    report.kv("h0", h.h0);
    report.kv("h1", h.h1);
    report.kv("chi", h.chi);
    Ok(ExitCode::SUCCESS)
}

fn cmd_twisted(args: &[String], report: &mut Report) -> Result<ExitCode, Error> {
    let a = parse_args(args, &["samples", "seed", "prime"], &[])?;
    let [path] = a.positional.as_slice() else {
        return Err(Error::Input("usage: twisted <sheaf>".into()));
    };
    let s = load_sheaf(path, prime_flag(&a)?)?;
    let samples = a.usize_or("samples", 3)?;
    let seed = a.u64_or("seed", 0)?;
    let tb = twisted_betti(&s, samples, seed)?;
    report.kv("field", s.field().modulus());
    report.kv("h0_twist", tb.h0t);
    report.kv("h1_twist", tb.h1t);
    report.kv("chi", tb.chi());
    report.kv("samples", tb.samples);
    report.kv("failure_bound", format!("{}/{}", tb.failure_num, tb.failure_den));
    Ok(ExitCode::SUCCESS)
}

fn cmd_maxexcess(args: &[String], report: &mut Report) -> Result<ExitCode, Error> {
    let a = parse_args(
        args,
        &["method", "budget", "samples", "seed", "prime", "cover-max-degree"],
        &[],
    )?;
    let [path] = a.positional.as_slice() else {
        return Err(Error::Input("usage: maxexcess <sheaf>".into()));
    };
    let s = load_sheaf(path, prime_flag(&a)?)?;
    let method = match a.get("method").unwrap_or("auto") {
        "auto" => MaxExcessMethod::Auto,
        "brute" => MaxExcessMethod::Brute,
        "edge-simple" => MaxExcessMethod::EdgeSimple,
        "pullback" => MaxExcessMethod::Pullback,
        other => return Err(Error::Input(format!("unknown method `{other}`"))),
    };
    let opts = MaxExcessOptions {
        budget: a.u64_or("budget", 1_000_000)?,
        samples: a.usize_or("samples", 3)?,
        seed: a.u64_or("seed", 0)?,
        cover_max_degree: a.usize_or("cover-max-degree", 256)?,
        ..Default::default()
    };
    let me = max_excess(&s, method, &opts)?;
    report.kv("field", s.field().modulus());
    report.kv("max_excess", me.value);
    report.kv("method", me.method);
    match &me.certificate {
        MaxExcessCertificate::BruteWitness(u) => {
            report.line("witness:");
            for v in 0..s.base().v_count() {
                let b = u.at(v).basis();
                let rows: Vec<String> = (0..b.rows())
                    .map(|i| {
                        (0..b.cols()).map(|j| b.get(i, j).to_string()).collect::<Vec<_>>().join(" ")
                    })
                    .collect();
                report.line(format!(
                    "subspace {} dim={} basis={}",
                    s.base().vertex_id(v),
                    u.at(v).dim(),
                    if rows.is_empty() { "-".to_string() } else { rows.join(" ; ") }
                ));
            }
        }
        MaxExcessCertificate::EdgeSimple(tb) => {
            report.kv("h1_twist", tb.h1t);
            report.kv("failure_bound", format!("{}/{}", tb.failure_num, tb.failure_den));
        }
        MaxExcessCertificate::Pullback { degree, cover, upstairs } => {
            report.kv("cover_degree", degree);
            report.kv("cover_vertices", cover.source().v_count());
            report.kv("upstairs_h1_twist", upstairs.h1t);
            report.block("cover", &emit_digraph(cover.source()));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_shnc(args: &[String], report: &mut Report) -> Result<ExitCode, Error> {
    let a = parse_args(args, &[], &[])?;
    let [kp, lp] = a.positional.as_slice() else {
        return Err(Error::Input("usage: shnc <K.dg> <L.dg>".into()));
    };
    let k = load_graph(kp)?;
    let l = load_graph(lp)?;
    let rep = shnc_verify(k.bigraph()?, l.bigraph()?)?;
    report.kv("rho_k", rep.rho_k);
    report.kv("rho_l", rep.rho_l);
    report.kv("rho_product", rep.product.rho);
    report.kv("rho_prime_product", rep.product.rho_prime);
    report.kv("shnc_margin", rep.shnc_margin);
    report.kv("hnc_margin", rep.hnc_margin);
    report.kv("shnc_holds", rep.shnc_holds);
    report.kv("hnc_holds", rep.hnc_holds);
    if rep.shnc_holds && rep.hnc_holds {
        Ok(ExitCode::SUCCESS)
    } else {
        report.kv("error", "inequality violated");
        Ok(ExitCode::from(1))
    }
}

fn cayley_context(a: &Args) -> Result<(CayleyContext, Subgraph), Error> {
    let spec = a
        .get("group")
        .ok_or_else(|| Error::Input("--group is required".into()))?;
    let group = parse_group_spec(spec, read_file)?;
    let g1 = a
        .get("g1")
        .ok_or_else(|| Error::Input("--g1 is required".into()))?;
    let g2 = a
        .get("g2")
        .ok_or_else(|| Error::Input("--g2 is required".into()))?;
    let g1 = group
        .element(g1)
        .ok_or_else(|| Error::Input(format!("unknown group element `{g1}`")))?;
    let g2 = group
        .element(g2)
        .ok_or_else(|| Error::Input(format!("unknown group element `{g2}`")))?;
    let ctx = CayleyContext::new(group, g1, g2)?;
    let sub = match a.get("subgraph") {
        Some(path) => {
            let b = load_graph(path)?;
            Subgraph::from_bigraph(&ctx, b.bigraph()?)?
        }
        None => Subgraph::full(&ctx),
    };
    Ok((ctx, sub))
}

fn cmd_rho_kernel(args: &[String], report: &mut Report) -> Result<ExitCode, Error> {
    let a = parse_args(
        args,
        &["group", "g1", "g2", "subgraph", "k", "prime", "mseed", "budget", "trials", "seed"],
        &["check-families"],
    )?;
    let (ctx, l) = cayley_context(&a)?;
    let rho = l.rho(&ctx);
    let k = a.usize_or("k", rho)?;
    let p = PrimeField::new(a.u64_or("prime", DEFAULT_PRIME)?)?;
    let mseed = a.u64_or("mseed", 0)?;
    report.kv("group_order", ctx.order());
    report.kv("subgraph_vertices", l.vertices.len());
    report.kv("subgraph_edges", l.edges.len());
    report.kv("rho", rho);
    report.kv("k", k);
    let m = if k == 0 {
        Matrix::zero(p, 0, ctx.order())
    } else {
        vandermonde_totally_independent(k, ctx.order(), p, mseed)?
    };
    let kernel = build_kernel(&ctx, &l, k, &m)?;
    report.kv("kernel_dim_v", kernel.sheaf.total_vdim());
    report.kv("kernel_dim_e", kernel.sheaf.total_edim());
    report.kv("kernel_chi", kernel.sheaf.chi());
    let g = ctx.graph.graph();
    for v in 0..g.v_count() {
        report.line(format!("kernel_vdim {} {}", g.vertex_id(v), kernel.sheaf.vdim(v)));
    }
    for e in 0..g.e_count() {
        report.line(format!("kernel_edim {} {}", g.edge_id(e), kernel.sheaf.edim(e)));
    }
    if a.has("check-families") {
        let mode = if a.has("trials") {
            FamilySearch::Sampled {
                trials: a.u64_or("trials", 1000)?,
                seed: a.u64_or("seed", 0)?,
            }
        } else {
            FamilySearch::Exhaustive {
                budget: a.u64_or("budget", 1 << 24)?,
            }
        };
        let rep = vertex_family_check(&ctx, &l, mode)?;
        report.kv("families_checked", rep.families_checked);
        report.kv("families_exhaustive", rep.exhaustive);
        report.kv("max_deficit", rep.max_deficit);
        report.kv("family_criterion_holds", rep.holds);
        if !rep.holds {
            report.line("witness:");
            for (v, set) in rep.worst.sets.iter().enumerate() {
                let names: Vec<&str> = set.iter().map(|&x| ctx.group.name(x)).collect();
                report.line(format!("family {} {{{}}}", g.vertex_id(v), names.join(",")));
            }
            report.kv("error", "positive family deficit");
            return Ok(ExitCode::from(1));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_generic_exp(args: &[String], report: &mut Report) -> Result<ExitCode, Error> {
    let a = parse_args(
        args,
        &["group", "g1", "g2", "subgraph", "k", "prime", "trials", "seed", "budget"],
        &[],
    )?;
    let (ctx, l) = cayley_context(&a)?;
    let rho = l.rho(&ctx);
    let k = a.usize_or("k", rho)?;
    let p = PrimeField::new(a.u64_or("prime", 2)?)?;
    let trials = a.usize_or("trials", 10)?;
    let seed = a.u64_or("seed", 0)?;
    let budget = a.u64_or("budget", 1_000_000)?;
    let rep = generic_excess_experiment(&ctx, &l, k, p, trials, seed, budget)?;
    report.kv("group_order", rep.group_order);
    report.kv("rho", rep.rho);
    report.kv("k", k);
    report.kv("trials", trials);
    report.kv("skipped", rep.skipped);
    for (i, t) in rep.trials.iter().enumerate() {
        match t {
            TrialOutcome::Computed { value, method } => {
                report.line(format!("trial_{i}={value} method={method}"))
            }
            TrialOutcome::Skipped { reason } => {
                report.line(format!("trial_{i}=skipped reason={}", compact(reason)))
            }
        }
    }
    match rep.modal {
        Some(v) => report.kv("modal", v),
        None => report.kv("modal", "none"),
    }
    report.kv("all_divisible_by_group", rep.all_divisible);
    if !rep.all_divisible {
        report.kv("error", "excess not divisible by group order");
        return Ok(ExitCode::from(1));
    }
    if rep.skipped > 0 {
        report.kv("error", "some trials skipped");
        return Ok(ExitCode::from(3));
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_stallings(args: &[String], report: &mut Report) -> Result<ExitCode, Error> {
    let a = parse_args(args, &["words"], &[])?;
    let words_arg = a
        .get("words")
        .ok_or_else(|| Error::Input("--words is required (comma separated, uppercase = inverse)".into()))?;
    let words: Vec<String> = words_arg
        .split(',')
        .map(|w| w.trim().to_string())
        .filter(|w| !w.is_empty())
        .collect();
    let core = stallings_core(&words)?;
    let inv = invariants(core.graph());
    report.kv("vertices", core.graph().v_count());
    report.kv("edges", core.graph().e_count());
    report.kv("h1", inv.h1);
    report.kv("rho", inv.rho);
    report.kv("etale", core.is_etale());
    report.block("core", &emit_bigraph(&core));
    Ok(ExitCode::SUCCESS)
}
