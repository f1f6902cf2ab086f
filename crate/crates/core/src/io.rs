//! Text formats: digraph/bigraph files, sheaf files, group specs, and
//! Galois coordinate files. Parse errors carry 1-based line numbers.

use crate::digraph::{Bigraph, Colour, Digraph};
use crate::error::{input_err, Error, Result};
use crate::galois::{FiniteGroup, GaloisCoordinates};
use crate::linalg::{Matrix, PrimeField};
use crate::sheaf::Sheaf;
use std::collections::HashMap;

/// A parsed graph file: a bigraph exactly when every edge carries a colour.
#[derive(Debug, Clone)]
pub enum ParsedGraph {
    Plain(Digraph),
    Coloured(Bigraph),
}

impl ParsedGraph {
    pub fn digraph(&self) -> &Digraph {
        match self {
            ParsedGraph::Plain(g) => g,
            ParsedGraph::Coloured(b) => b.graph(),
        }
    }

    pub fn bigraph(&self) -> Result<&Bigraph> {
        match self {
            ParsedGraph::Coloured(b) => Ok(b),
            ParsedGraph::Plain(_) => input_err("file is not a bigraph: some edges lack a colour"),
        }
    }
}

fn fail_line<T>(line: usize, msg: impl AsRef<str>) -> Result<T> {
    Err(Error::Input(format!("line {line}: {}", msg.as_ref())))
}

/// One declaration per line: `vertex <id>`, `edge <id> <tail> <head>
/// [colour=<1|2>]`, `#` comments.
pub fn parse_digraph(text: &str) -> Result<ParsedGraph> {
    let mut vertices = Vec::new();
    let mut edges = Vec::new();
    let mut colours: Vec<Option<Colour>> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let tok: Vec<&str> = line.split_whitespace().collect();
        match tok[0] {
            "vertex" => {
                if tok.len() != 2 {
                    return fail_line(lineno, "expected `vertex <id>`");
                }
                vertices.push(tok[1].to_string());
            }
            "edge" => {
                if tok.len() != 4 && tok.len() != 5 {
                    return fail_line(lineno, "expected `edge <id> <tail> <head> [colour=<1|2>]`");
                }
                let colour = if tok.len() == 5 {
                    match tok[4] {
                        "colour=1" | "color=1" => Some(Colour::One),
                        "colour=2" | "color=2" => Some(Colour::Two),
                        other => return fail_line(lineno, format!("unknown attribute `{other}`")),
                    }
                } else {
                    None
                };
                edges.push((tok[1].to_string(), tok[2].to_string(), tok[3].to_string()));
                colours.push(colour);
            }
            other => return fail_line(lineno, format!("unknown declaration `{other}`")),
        }
    }
    let mut seen = HashMap::new();
    for (i, v) in vertices.iter().enumerate() {
        if seen.insert(v.clone(), i).is_some() {
            return Err(Error::Input(format!("duplicate vertex id `{v}`")));
        }
    }
    let g = Digraph::new(vertices, edges)?;
    if !colours.is_empty() && colours.iter().all(|c| c.is_some()) {
        let cs = colours.into_iter().map(|c| c.unwrap()).collect();
        Ok(ParsedGraph::Coloured(Bigraph::new(g, cs)?))
    } else if colours.iter().any(|c| c.is_some()) && colours.iter().any(|c| c.is_none()) {
        // partial colouring parses as a plain digraph; callers that need a
        // bigraph get a dedicated error
        Ok(ParsedGraph::Plain(g))
    } else {
        Ok(ParsedGraph::Plain(g))
    }
}

/// Matrix literal: rows separated by `;`, entries by spaces, reduced mod p.
pub fn parse_matrix(text: &str, field: PrimeField, rows: usize, cols: usize) -> Result<Matrix> {
    let row_texts: Vec<&str> = if text.trim().is_empty() {
        Vec::new()
    } else {
        text.split(';').collect()
    };
    if row_texts.len() != rows {
        return input_err(format!("matrix literal has {} rows, expected {rows}", row_texts.len()));
    }
    let mut data = Vec::with_capacity(rows);
    for rt in row_texts {
        let entries: Vec<&str> = rt.split_whitespace().collect();
        if entries.len() != cols {
            return input_err(format!(
                "matrix row `{}` has {} entries, expected {cols}",
                rt.trim(),
                entries.len()
            ));
        }
        let mut row = Vec::with_capacity(cols);
        for e in entries {
            let v: i64 = e
                .parse()
                .map_err(|_| Error::Input(format!("bad matrix entry `{e}`")))?;
            row.push(field.reduce(v));
        }
        data.push(row);
    }
    if rows == 0 || cols == 0 {
        return Ok(Matrix::zero(field, rows, cols));
    }
    Matrix::from_rows(field, &data)
}

/// Sheaf file: `field p=<prime>`, `graph <path>` (relative to the sheaf
/// file), optional `structure` shorthand, then `vdim`, `edim`, `head`,
/// `tail` lines. Omitted dims are 0; omitted maps on 0-dim spaces are
/// empty.
pub fn parse_sheaf(text: &str, resolve_graph: impl Fn(&str) -> Result<String>, prime_override: Option<u64>) -> Result<Sheaf> {
    let mut field: Option<PrimeField> = None;
    let mut graph: Option<Digraph> = None;
    let mut structure = false;
    let mut vdim_decl: Vec<(usize, String, usize)> = Vec::new();
    let mut edim_decl: Vec<(usize, String, usize)> = Vec::new();
    let mut head_decl: Vec<(usize, String, String)> = Vec::new();
    let mut tail_decl: Vec<(usize, String, String)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, rest) = match line.split_once(char::is_whitespace) {
            Some((k, r)) => (k, r.trim()),
            None => (line, ""),
        };
        match key {
            "field" => {
                let p = rest
                    .strip_prefix("p=")
                    .ok_or_else(|| Error::Input(format!("line {lineno}: expected `field p=<prime>`")))?;
                let p: u64 = p
                    .parse()
                    .map_err(|_| Error::Input(format!("line {lineno}: bad modulus `{p}`")))?;
                field = Some(PrimeField::new(p)?);
            }
            "graph" => {
                let content = resolve_graph(rest)?;
                graph = Some(parse_digraph(&content)?.digraph().clone());
            }
            "structure" => structure = true,
            "vdim" | "edim" => {
                let (id, d) = rest
                    .split_once(char::is_whitespace)
                    .ok_or_else(|| Error::Input(format!("line {lineno}: expected `{key} <id> <dim>`")))?;
                let d: i64 = d
                    .trim()
                    .parse()
                    .map_err(|_| Error::Input(format!("line {lineno}: bad dimension `{d}`")))?;
                if d < 0 {
                    return fail_line(lineno, "dimension must be non-negative");
                }
                if key == "vdim" {
                    vdim_decl.push((lineno, id.to_string(), d as usize));
                } else {
                    edim_decl.push((lineno, id.to_string(), d as usize));
                }
            }
            "head" | "tail" => {
                let (id, m) = rest
                    .split_once(char::is_whitespace)
                    .ok_or_else(|| Error::Input(format!("line {lineno}: expected `{key} <edge> <matrix>`")))?;
                if key == "head" {
                    head_decl.push((lineno, id.to_string(), m.to_string()));
                } else {
                    tail_decl.push((lineno, id.to_string(), m.to_string()));
                }
            }
            other => return fail_line(lineno, format!("unknown declaration `{other}`")),
        }
    }
    let field = match prime_override {
        Some(p) => PrimeField::new(p)?,
        None => field.ok_or_else(|| Error::Input("sheaf file lacks a `field p=` line".into()))?,
    };
    let graph = graph.ok_or_else(|| Error::Input("sheaf file lacks a `graph` line".into()))?;
    if structure {
        if !(vdim_decl.is_empty() && edim_decl.is_empty() && head_decl.is_empty() && tail_decl.is_empty()) {
            return input_err("`structure` cannot be combined with explicit dims or maps");
        }
        return Ok(Sheaf::structure(&graph, field));
    }
    let mut vdim = vec![0usize; graph.v_count()];
    for (lineno, id, d) in vdim_decl {
        let v = graph
            .vertex_index(&id)
            .ok_or_else(|| Error::Input(format!("line {lineno}: unknown vertex `{id}`")))?;
        vdim[v] = d;
    }
    let mut edim = vec![0usize; graph.e_count()];
    for (lineno, id, d) in edim_decl {
        let e = graph
            .edge_index(&id)
            .ok_or_else(|| Error::Input(format!("line {lineno}: unknown edge `{id}`")))?;
        edim[e] = d;
    }
    let mut head_map: Vec<Option<Matrix>> = vec![None; graph.e_count()];
    let mut tail_map: Vec<Option<Matrix>> = vec![None; graph.e_count()];
    for (decl, maps, pick_head) in [(head_decl, &mut head_map, true), (tail_decl, &mut tail_map, false)] {
        for (lineno, id, mtext) in decl {
            let e = graph
                .edge_index(&id)
                .ok_or_else(|| Error::Input(format!("line {lineno}: unknown edge `{id}`")))?;
            let v = if pick_head { graph.head(e) } else { graph.tail(e) };
            let m = parse_matrix(&mtext, field, vdim[v], edim[e]).map_err(|err| {
                Error::Input(format!(
                    "line {lineno}: edge `{id}` expects a {}x{} matrix: {err}",
                    vdim[v], edim[e]
                ))
            })?;
            maps[e] = Some(m);
        }
    }
    let finish = |maps: Vec<Option<Matrix>>, pick_head: bool| -> Result<Vec<Matrix>> {
        maps.into_iter()
            .enumerate()
            .map(|(e, m)| match m {
                Some(m) => Ok(m),
                None => {
                    let v = if pick_head { graph.head(e) } else { graph.tail(e) };
                    if edim[e] == 0 || vdim[v] == 0 {
                        Ok(Matrix::zero(field, vdim[v], edim[e]))
                    } else {
                        Err(Error::Input(format!(
                            "edge `{}` lacks a {} map",
                            graph.edge_id(e),
                            if pick_head { "head" } else { "tail" }
                        )))
                    }
                }
            })
            .collect()
    };
    let head_map = finish(head_map, true)?;
    let tail_map = finish(tail_map, false)?;
    Sheaf::new(graph, field, vdim, edim, head_map, tail_map)
}

/// Canonical text form of a sheaf.
pub fn emit_sheaf(s: &Sheaf, graph_path: &str) -> String {
    use std::fmt::Write as _;
    let mut out = String::new();
    writeln!(out, "field p={}", s.field().modulus()).unwrap();
    writeln!(out, "graph {graph_path}").unwrap();
    let g = s.base();
    for v in 0..g.v_count() {
        if s.vdim(v) > 0 {
            writeln!(out, "vdim {} {}", g.vertex_id(v), s.vdim(v)).unwrap();
        }
    }
    for e in 0..g.e_count() {
        if s.edim(e) > 0 {
            writeln!(out, "edim {} {}", g.edge_id(e), s.edim(e)).unwrap();
        }
    }
    let fmt_matrix = |m: &Matrix| {
        (0..m.rows())
            .map(|i| {
                (0..m.cols())
                    .map(|j| m.get(i, j).to_string())
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect::<Vec<_>>()
            .join(" ; ")
    };
    for e in 0..g.e_count() {
        if s.edim(e) > 0 && s.vdim(g.head(e)) > 0 {
            writeln!(out, "head {} {}", g.edge_id(e), fmt_matrix(s.head_map(e))).unwrap();
        }
        if s.edim(e) > 0 && s.vdim(g.tail(e)) > 0 {
            writeln!(out, "tail {} {}", g.edge_id(e), fmt_matrix(s.tail_map(e))).unwrap();
        }
    }
    out
}

/// Group spec: `cyclic:<n>`, `product:cyclic:<n>,cyclic:<m>,...`,
/// `symmetric:<n>`, or `table:<file>` resolved by the caller.
pub fn parse_group_spec(spec: &str, resolve_table: impl Fn(&str) -> Result<String>) -> Result<FiniteGroup> {
    parse_group_spec_dyn(spec, &resolve_table)
}

fn parse_group_spec_dyn(spec: &str, resolve_table: &dyn Fn(&str) -> Result<String>) -> Result<FiniteGroup> {
    if let Some(n) = spec.strip_prefix("cyclic:") {
        let n: usize = n
            .parse()
            .map_err(|_| Error::Input(format!("bad cyclic order `{n}`")))?;
        return FiniteGroup::cyclic(n);
    }
    if let Some(n) = spec.strip_prefix("symmetric:") {
        let n: usize = n
            .parse()
            .map_err(|_| Error::Input(format!("bad symmetric degree `{n}`")))?;
        return FiniteGroup::symmetric(n);
    }
    if let Some(parts) = spec.strip_prefix("product:") {
        let mut acc: Option<FiniteGroup> = None;
        for part in parts.split(',') {
            let g = parse_group_spec_dyn(part.trim(), resolve_table)?;
            acc = Some(match acc {
                None => g,
                Some(a) => FiniteGroup::product(&a, &g)?,
            });
        }
        return acc.ok_or_else(|| Error::Input("empty product spec".into()));
    }
    if let Some(path) = spec.strip_prefix("table:") {
        let content = resolve_table(path)?;
        return parse_group_table(&content);
    }
    input_err(format!("unknown group spec `{spec}`"))
}

/// Group table file: `elements <id...>` then one `mul <a> <b> <ab>` line
/// per pair.
pub fn parse_group_table(text: &str) -> Result<FiniteGroup> {
    let mut names: Vec<String> = Vec::new();
    let mut entries: Vec<(usize, String, String, String)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let tok: Vec<&str> = line.split_whitespace().collect();
        match tok[0] {
            "elements" => {
                names = tok[1..].iter().map(|s| s.to_string()).collect();
            }
            "mul" => {
                if tok.len() != 4 {
                    return fail_line(lineno, "expected `mul <a> <b> <ab>`");
                }
                entries.push((lineno, tok[1].into(), tok[2].into(), tok[3].into()));
            }
            other => return fail_line(lineno, format!("unknown declaration `{other}`")),
        }
    }
    if names.is_empty() {
        return input_err("group table lacks an `elements` line");
    }
    let index: HashMap<&str, usize> = names.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
    let n = names.len();
    let mut mul = vec![vec![usize::MAX; n]; n];
    for (lineno, a, b, ab) in entries {
        let look = |x: &str| {
            index
                .get(x)
                .copied()
                .ok_or_else(|| Error::Input(format!("line {lineno}: unknown element `{x}`")))
        };
        mul[look(&a)?][look(&b)?] = look(&ab)?;
    }
    if mul.iter().flatten().any(|&x| x == usize::MAX) {
        return input_err("group table is missing products");
    }
    FiniteGroup::from_table(names, mul)
}

/// Coordinates file: a `group <spec>` header then `coord <edge> <element>`
/// lines; unlisted edges default to the identity.
pub fn parse_coordinates(
    text: &str,
    base: &Digraph,
    resolve_table: impl Fn(&str) -> Result<String>,
) -> Result<GaloisCoordinates> {
    let mut group: Option<FiniteGroup> = None;
    let mut assign: Vec<(usize, String, String)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let tok: Vec<&str> = line.split_whitespace().collect();
        match tok[0] {
            "group" => {
                if tok.len() != 2 {
                    return fail_line(lineno, "expected `group <spec>`");
                }
                group = Some(parse_group_spec(tok[1], &resolve_table)?);
            }
            "coord" => {
                if tok.len() != 3 {
                    return fail_line(lineno, "expected `coord <edge> <element>`");
                }
                assign.push((lineno, tok[1].into(), tok[2].into()));
            }
            other => return fail_line(lineno, format!("unknown declaration `{other}`")),
        }
    }
    let group = group.ok_or_else(|| Error::Input("coordinates file lacks a `group` line".into()))?;
    let mut assignment = vec![group.identity(); base.e_count()];
    for (lineno, eid, gid) in assign {
        let e = base
            .edge_index(&eid)
            .ok_or_else(|| Error::Input(format!("line {lineno}: unknown edge `{eid}`")))?;
        let g = group
            .element(&gid)
            .ok_or_else(|| Error::Input(format!("line {lineno}: unknown group element `{gid}`")))?;
        assignment[e] = g;
    }
    GaloisCoordinates::new(base.clone(), group, assignment)
}
