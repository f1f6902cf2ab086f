//! Finite directed multigraphs, bigraphs, morphisms, fibre products, and
//! the classical invariants h0, h1, chi, rho, rho', girth and Abelian girth.

use crate::error::{input_err, Error, Result};
use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt::Write as _;

/// Finite directed multigraph. Vertex and edge identifiers are strings;
/// declaration order is the canonical basis order everywhere downstream.
/// Self-loops and parallel edges are permitted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Digraph {
    vertices: Vec<String>,
    edges: Vec<String>,
    tail: Vec<usize>,
    head: Vec<usize>,
    vindex: HashMap<String, usize>,
    eindex: HashMap<String, usize>,
}

impl Digraph {
    pub fn new(vertices: Vec<String>, edges: Vec<(String, String, String)>) -> Result<Self> {
        let mut vindex = HashMap::new();
        for (i, v) in vertices.iter().enumerate() {
            if vindex.insert(v.clone(), i).is_some() {
                return input_err(format!("duplicate vertex id `{v}`"));
            }
        }
        let mut eindex = HashMap::new();
        let mut tail = Vec::with_capacity(edges.len());
        let mut head = Vec::with_capacity(edges.len());
        let mut eids = Vec::with_capacity(edges.len());
        for (i, (id, t, h)) in edges.into_iter().enumerate() {
            if eindex.insert(id.clone(), i).is_some() {
                return input_err(format!("duplicate edge id `{id}`"));
            }
            let ti = *vindex
                .get(&t)
                .ok_or_else(|| Error::Input(format!("edge `{id}` has undeclared tail `{t}`")))?;
            let hi = *vindex
                .get(&h)
                .ok_or_else(|| Error::Input(format!("edge `{id}` has undeclared head `{h}`")))?;
            tail.push(ti);
            head.push(hi);
            eids.push(id);
        }
        Ok(Digraph {
            vertices,
            edges: eids,
            tail,
            head,
            vindex,
            eindex,
        })
    }

    /// Bouquet of d self-loops on one vertex `v`, edges `e1..ed`.
    pub fn bouquet(d: usize) -> Digraph {
        let edges = (1..=d)
            .map(|i| (format!("e{i}"), "v".to_string(), "v".to_string()))
            .collect();
        Digraph::new(vec!["v".to_string()], edges).expect("bouquet is well formed")
    }

    pub fn v_count(&self) -> usize {
        self.vertices.len()
    }
    pub fn e_count(&self) -> usize {
        self.edges.len()
    }
    pub fn vertex_id(&self, i: usize) -> &str {
        &self.vertices[i]
    }
    pub fn edge_id(&self, i: usize) -> &str {
        &self.edges[i]
    }
    pub fn tail(&self, e: usize) -> usize {
        self.tail[e]
    }
    pub fn head(&self, e: usize) -> usize {
        self.head[e]
    }
    pub fn vertex_index(&self, id: &str) -> Option<usize> {
        self.vindex.get(id).copied()
    }
    pub fn edge_index(&self, id: &str) -> Option<usize> {
        self.eindex.get(id).copied()
    }

    pub fn out_edges(&self, v: usize) -> Vec<usize> {
        (0..self.e_count()).filter(|&e| self.tail[e] == v).collect()
    }

    pub fn in_edges(&self, v: usize) -> Vec<usize> {
        (0..self.e_count()).filter(|&e| self.head[e] == v).collect()
    }

    /// Connected components of the underlying undirected graph; returns a
    /// component id per vertex and the number of components.
    pub fn components(&self) -> (Vec<usize>, usize) {
        let mut comp = vec![usize::MAX; self.v_count()];
        let mut next = 0;
        for start in 0..self.v_count() {
            if comp[start] != usize::MAX {
                continue;
            }
            let mut queue = VecDeque::from([start]);
            comp[start] = next;
            while let Some(v) = queue.pop_front() {
                for e in 0..self.e_count() {
                    for w in [self.tail[e], self.head[e]] {
                        let other = if w == self.tail[e] { self.head[e] } else { self.tail[e] };
                        if w == v && comp[other] == usize::MAX {
                            comp[other] = next;
                            queue.push_back(other);
                        }
                    }
                }
            }
            next += 1;
        }
        (comp, next)
    }

    /// Induced subgraph on a set of vertex and edge indices (edges must
    /// have both endpoints in the vertex set). Identifiers are preserved.
    pub fn subgraph(&self, vs: &[usize], es: &[usize]) -> Result<Digraph> {
        let vset: HashSet<usize> = vs.iter().copied().collect();
        for &e in es {
            if !vset.contains(&self.tail[e]) || !vset.contains(&self.head[e]) {
                return input_err(format!(
                    "edge `{}` has an endpoint outside the subgraph",
                    self.edges[e]
                ));
            }
        }
        let vertices: Vec<String> = vs.iter().map(|&v| self.vertices[v].clone()).collect();
        let edges: Vec<(String, String, String)> = es
            .iter()
            .map(|&e| {
                (
                    self.edges[e].clone(),
                    self.vertices[self.tail[e]].clone(),
                    self.vertices[self.head[e]].clone(),
                )
            })
            .collect();
        Digraph::new(vertices, edges)
    }

    /// Disjoint union; ids are prefixed `"{tag}:"` per part.
    pub fn disjoint_union(parts: &[(&str, &Digraph)]) -> Result<Digraph> {
        let mut vertices = Vec::new();
        let mut edges = Vec::new();
        for (tag, g) in parts {
            for v in &g.vertices {
                vertices.push(format!("{tag}:{v}"));
            }
            for e in 0..g.e_count() {
                edges.push((
                    format!("{tag}:{}", g.edges[e]),
                    format!("{tag}:{}", g.vertices[g.tail[e]]),
                    format!("{tag}:{}", g.vertices[g.head[e]]),
                ));
            }
        }
        Digraph::new(vertices, edges)
    }
}

/// Edge colouring of a bigraph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Colour {
    One,
    Two,
}

impl Colour {
    pub fn index(self) -> usize {
        match self {
            Colour::One => 0,
            Colour::Two => 1,
        }
    }
    pub fn label(self) -> &'static str {
        match self {
            Colour::One => "1",
            Colour::Two => "2",
        }
    }
}

/// A digraph with a total 2-colouring of its edges; equivalently a
/// morphism to B2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bigraph {
    graph: Digraph,
    colour: Vec<Colour>,
}

impl Bigraph {
    pub fn new(graph: Digraph, colour: Vec<Colour>) -> Result<Self> {
        if colour.len() != graph.e_count() {
            return input_err("bigraph colouring must cover every edge");
        }
        Ok(Bigraph { graph, colour })
    }

    /// B2: one vertex, two coloured self-loops e1, e2.
    pub fn b2() -> Bigraph {
        Bigraph::new(Digraph::bouquet(2), vec![Colour::One, Colour::Two]).expect("B2 well formed")
    }

    pub fn graph(&self) -> &Digraph {
        &self.graph
    }

    pub fn colour(&self, e: usize) -> Colour {
        self.colour[e]
    }

    pub fn colours(&self) -> &[Colour] {
        &self.colour
    }

    /// The colouring morphism into B2.
    pub fn to_b2_morphism(&self) -> GraphMorphism {
        let b2 = Bigraph::b2();
        let vmap = vec![0; self.graph.v_count()];
        let emap = self.colour.iter().map(|c| c.index()).collect();
        GraphMorphism::new(self.graph.clone(), b2.graph.clone(), vmap, emap)
            .expect("colouring is a morphism")
    }

    /// Induced subgraph, keeping colours.
    pub fn subgraph(&self, vs: &[usize], es: &[usize]) -> Result<Bigraph> {
        let g = self.graph.subgraph(vs, es)?;
        let colour = es.iter().map(|&e| self.colour[e]).collect();
        Bigraph::new(g, colour)
    }

    /// Etale over B2 iff no vertex has two incoming or two outgoing edges
    /// of the same colour.
    pub fn is_etale(&self) -> bool {
        matches!(
            classify_morphism(&self.to_b2_morphism()),
            MorphismClass::Etale | MorphismClass::Covering { .. }
        )
    }
}

/// A morphism of digraphs: vertex and edge maps commuting with heads and
/// tails. Owns copies of both endpoint graphs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphMorphism {
    source: Digraph,
    target: Digraph,
    vmap: Vec<usize>,
    emap: Vec<usize>,
}

impl GraphMorphism {
    pub fn new(source: Digraph, target: Digraph, vmap: Vec<usize>, emap: Vec<usize>) -> Result<Self> {
        if vmap.len() != source.v_count() || emap.len() != source.e_count() {
            return input_err("morphism maps must cover the whole source");
        }
        if vmap.iter().any(|&v| v >= target.v_count()) || emap.iter().any(|&e| e >= target.e_count()) {
            return input_err("morphism maps into missing vertices or edges");
        }
        for e in 0..source.e_count() {
            if target.tail(emap[e]) != vmap[source.tail(e)] || target.head(emap[e]) != vmap[source.head(e)] {
                return input_err(format!(
                    "maps do not commute with heads/tails at edge `{}`",
                    source.edge_id(e)
                ));
            }
        }
        Ok(GraphMorphism {
            source,
            target,
            vmap,
            emap,
        })
    }

    pub fn identity(g: &Digraph) -> GraphMorphism {
        GraphMorphism {
            source: g.clone(),
            target: g.clone(),
            vmap: (0..g.v_count()).collect(),
            emap: (0..g.e_count()).collect(),
        }
    }

    /// Inclusion of a subgraph (given by parallel id lookup).
    pub fn inclusion(sub: &Digraph, ambient: &Digraph) -> Result<GraphMorphism> {
        let vmap = sub
            .vertices
            .iter()
            .map(|v| {
                ambient
                    .vertex_index(v)
                    .ok_or_else(|| Error::Input(format!("vertex `{v}` missing from ambient graph")))
            })
            .collect::<Result<Vec<_>>>()?;
        let emap = sub
            .edges
            .iter()
            .map(|e| {
                ambient
                    .edge_index(e)
                    .ok_or_else(|| Error::Input(format!("edge `{e}` missing from ambient graph")))
            })
            .collect::<Result<Vec<_>>>()?;
        GraphMorphism::new(sub.clone(), ambient.clone(), vmap, emap)
    }

    pub fn source(&self) -> &Digraph {
        &self.source
    }
    pub fn target(&self) -> &Digraph {
        &self.target
    }
    pub fn vmap(&self, v: usize) -> usize {
        self.vmap[v]
    }
    pub fn emap(&self, e: usize) -> usize {
        self.emap[e]
    }

    pub fn compose(&self, then: &GraphMorphism) -> Result<GraphMorphism> {
        if self.target != then.source {
            return input_err("composition target/source mismatch");
        }
        GraphMorphism::new(
            self.source.clone(),
            then.target.clone(),
            self.vmap.iter().map(|&v| then.vmap[v]).collect(),
            self.emap.iter().map(|&e| then.emap[e]).collect(),
        )
    }

    pub fn vertex_fibre(&self, v: usize) -> Vec<usize> {
        (0..self.source.v_count()).filter(|&x| self.vmap[x] == v).collect()
    }

    pub fn edge_fibre(&self, e: usize) -> Vec<usize> {
        (0..self.source.e_count()).filter(|&x| self.emap[x] == e).collect()
    }
}

/// Classification of a morphism by its local behaviour on stars.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MorphismClass {
    /// Local bijection on incoming and outgoing edges at every vertex;
    /// degree reported when all vertex and edge fibres are equal-sized.
    Covering { degree: Option<usize> },
    /// Local injection that is not a covering.
    Etale,
    Neither,
}

pub fn classify_morphism(m: &GraphMorphism) -> MorphismClass {
    let mut injective = true;
    let mut bijective = true;
    for v in 0..m.source().v_count() {
        let tv = m.vmap(v);
        for (mine, theirs) in [
            (m.source().out_edges(v), m.target().out_edges(tv)),
            (m.source().in_edges(v), m.target().in_edges(tv)),
        ] {
            let mut seen = HashSet::new();
            for e in &mine {
                if !seen.insert(m.emap(*e)) {
                    injective = false;
                    bijective = false;
                }
            }
            if seen.len() != theirs.len() {
                bijective = false;
            }
        }
        if !injective {
            break;
        }
    }
    if bijective && injective {
        let mut sizes = HashSet::new();
        for v in 0..m.target().v_count() {
            sizes.insert(m.vertex_fibre(v).len());
        }
        for e in 0..m.target().e_count() {
            sizes.insert(m.edge_fibre(e).len());
        }
        let degree = if sizes.len() == 1 { sizes.into_iter().next() } else { None };
        MorphismClass::Covering { degree }
    } else if injective {
        MorphismClass::Etale
    } else {
        MorphismClass::Neither
    }
}

/// The classical invariants of eq-style reduced cyclicity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GraphInvariants {
    pub h0: usize,
    pub h1: usize,
    pub chi: i64,
    pub rho: usize,
    pub rho_prime: usize,
    pub acyclic_components: usize,
}

pub fn invariants(g: &Digraph) -> GraphInvariants {
    let (comp, n) = g.components();
    let mut vcount = vec![0usize; n];
    let mut ecount = vec![0usize; n];
    for v in 0..g.v_count() {
        vcount[comp[v]] += 1;
    }
    for e in 0..g.e_count() {
        ecount[comp[g.tail(e)]] += 1;
    }
    let mut h1 = 0usize;
    let mut rho = 0usize;
    let mut rho_prime = 0usize;
    let mut acyclic = 0usize;
    for c in 0..n {
        // per component: h0 = 1, so h1 = 1 - chi
        let chi_c = vcount[c] as i64 - ecount[c] as i64;
        let h1_c = (1 - chi_c) as usize;
        h1 += h1_c;
        let r = h1_c.saturating_sub(1);
        rho += r;
        rho_prime = rho_prime.max(r);
        if h1_c == 0 {
            acyclic += 1;
        }
    }
    GraphInvariants {
        h0: n,
        h1,
        chi: g.v_count() as i64 - g.e_count() as i64,
        rho,
        rho_prime,
        acyclic_components: acyclic,
    }
}

/// Fibre product of two morphisms with a common target. Vertices are pairs
/// with equal images, edges likewise, heads and tails componentwise;
/// identifiers are `"(id1,id2)"`.
pub fn fibre_product(
    f1: &GraphMorphism,
    f2: &GraphMorphism,
) -> Result<(Digraph, GraphMorphism, GraphMorphism)> {
    if f1.target() != f2.target() {
        return input_err("fibre product requires morphisms into the same target");
    }
    let a = f1.source();
    let b = f2.source();
    let mut vertices = Vec::new();
    let mut vpairs = Vec::new();
    for v1 in 0..a.v_count() {
        for v2 in 0..b.v_count() {
            if f1.vmap(v1) == f2.vmap(v2) {
                vertices.push(format!("({},{})", a.vertex_id(v1), b.vertex_id(v2)));
                vpairs.push((v1, v2));
            }
        }
    }
    let mut edges = Vec::new();
    let mut epairs = Vec::new();
    for e1 in 0..a.e_count() {
        for e2 in 0..b.e_count() {
            if f1.emap(e1) == f2.emap(e2) {
                let t = format!("({},{})", a.vertex_id(a.tail(e1)), b.vertex_id(b.tail(e2)));
                let h = format!("({},{})", a.vertex_id(a.head(e1)), b.vertex_id(b.head(e2)));
                edges.push((format!("({},{})", a.edge_id(e1), b.edge_id(e2)), t, h));
                epairs.push((e1, e2));
            }
        }
    }
    let product = Digraph::new(vertices, edges)?;
    let p1 = GraphMorphism::new(
        product.clone(),
        a.clone(),
        vpairs.iter().map(|&(v1, _)| v1).collect(),
        epairs.iter().map(|&(e1, _)| e1).collect(),
    )?;
    let p2 = GraphMorphism::new(
        product.clone(),
        b.clone(),
        vpairs.iter().map(|&(_, v2)| v2).collect(),
        epairs.iter().map(|&(_, e2)| e2).collect(),
    )?;
    Ok((product, p1, p2))
}

/// Fibre product of two bigraphs over B2 (pairing edges of equal colour).
pub fn fibre_product_over_b2(k: &Bigraph, l: &Bigraph) -> Result<(Bigraph, GraphMorphism, GraphMorphism)> {
    let (g, p1, p2) = fibre_product(&k.to_b2_morphism(), &l.to_b2_morphism())?;
    let colours = (0..g.e_count()).map(|e| k.colour(p1.emap(e))).collect();
    Ok((Bigraph::new(g, colours)?, p1, p2))
}

/// Girth search outcome under an explicit bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GirthBound {
    Finite(usize),
    ExceedsBound,
}

impl GirthBound {
    pub fn at_least(self, n: usize) -> bool {
        match self {
            GirthBound::Finite(g) => g >= n,
            GirthBound::ExceedsBound => true,
        }
    }
}

/// (girth, Abelian girth), each reported exactly when <= bound and as
/// `ExceedsBound` otherwise. A self-loop is a cycle of length 1, a pair of
/// parallel edges a cycle of length 2. The Abelian girth is the girth of
/// the universal Abelian cover G\[Z\], searched lazily by BFS.
pub fn girths(g: &Digraph, bound: usize) -> Result<(GirthBound, GirthBound)> {
    if bound < 1 {
        return input_err("girth bound must be at least 1");
    }
    Ok((finite_girth(g, bound), abelian_girth(g, bound)))
}

fn finite_girth(g: &Digraph, bound: usize) -> GirthBound {
    let mut best = usize::MAX;
    // a BFS per root; parallel edges and self-loops fall out of the
    // edge-id bookkeeping (self-loop at the root reports 1)
    for root in 0..g.v_count() {
        let mut dist = vec![usize::MAX; g.v_count()];
        let mut parent_edge = vec![usize::MAX; g.v_count()];
        dist[root] = 0;
        let mut queue = VecDeque::from([root]);
        let depth_cap = bound.div_ceil(2);
        while let Some(u) = queue.pop_front() {
            for e in 0..g.e_count() {
                let (t, h) = (g.tail(e), g.head(e));
                if t != u && h != u {
                    continue;
                }
                if t == u && h == u {
                    // self-loop: cycle of length 2*dist+1 through the root
                    best = best.min(2 * dist[u] + 1);
                    continue;
                }
                let w = if t == u { h } else { t };
                if e == parent_edge[u] {
                    continue;
                }
                if dist[w] == usize::MAX {
                    if dist[u] < depth_cap {
                        dist[w] = dist[u] + 1;
                        parent_edge[w] = e;
                        queue.push_back(w);
                    }
                } else {
                    best = best.min(dist[u] + dist[w] + 1);
                }
            }
        }
    }
    if best <= bound {
        GirthBound::Finite(best)
    } else {
        GirthBound::ExceedsBound
    }
}

/// State in G\[Z\]: base vertex plus a sparse displacement vector indexed by
/// the edges of G (sorted, no zero entries).
type AbelState = (usize, Vec<(usize, i32)>);
/// A G\[Z\] edge: base edge plus the displacement of its own coordinate.
type AbelEdge = (usize, Vec<(usize, i32)>);

fn shift(disp: &[(usize, i32)], e: usize, delta: i32) -> Vec<(usize, i32)> {
    let mut out = Vec::with_capacity(disp.len() + 1);
    let mut placed = false;
    for &(k, v) in disp {
        if k == e {
            let nv = v + delta;
            if nv != 0 {
                out.push((k, nv));
            }
            placed = true;
        } else {
            if !placed && k > e {
                out.push((e, delta));
                placed = true;
            }
            out.push((k, v));
        }
    }
    if !placed {
        out.push((e, delta));
    }
    out
}

fn abelian_girth(g: &Digraph, bound: usize) -> GirthBound {
    // every cycle of G[Z] translates to one through some (v, 0), so BFS
    // from those roots suffices; G[Z] is always simple. The depth needed
    // to improve on the best cycle found so far shrinks as the search
    // progresses: a cycle of length < best only involves states within
    // (best-1)/2 of a root.
    let mut best = usize::MAX;
    for root_v in 0..g.v_count() {
        let root: AbelState = (root_v, Vec::new());
        let mut dist: HashMap<AbelState, (usize, AbelEdge)> = HashMap::new();
        // value: (distance, id of G[Z]-edge used to enter) where the edge
        // id is (base edge, displacement of the edge's own coordinate)
        dist.insert(root.clone(), (0, (usize::MAX, Vec::new())));
        let mut queue = VecDeque::from([root]);
        while let Some(state) = queue.pop_front() {
            let (d, ref parent) = dist[&state].clone();
            let depth_cap = bound.min(best.saturating_sub(1)).div_ceil(2);
            if d > depth_cap {
                break; // monotone BFS: nothing deeper can beat `best`
            }
            let (v, ref disp) = state;
            // neighbours: forward along e with tail v, backward along e
            // with head v; the G[Z]-edge (e, m) joins (te, m + delta_e) to
            // (he, m)
            let step = |edge_key: AbelEdge,
                            next: AbelState,
                            dist: &mut HashMap<AbelState, (usize, AbelEdge)>,
                            queue: &mut VecDeque<AbelState>,
                            best: &mut usize| {
                if edge_key == *parent {
                    return;
                }
                if let Some(&(dw, _)) = dist.get(&next) {
                    *best = (*best).min(d + dw + 1);
                } else if d < depth_cap {
                    dist.insert(next.clone(), (d + 1, edge_key));
                    queue.push_back(next);
                }
            };
            for e in 0..g.e_count() {
                if g.tail(e) == v {
                    // we sit at the tail (te, m + delta_e), so m = disp - delta_e
                    let m = shift(disp, e, -1);
                    let next = (g.head(e), m.clone());
                    step((e, m), next, &mut dist, &mut queue, &mut best);
                }
                if g.head(e) == v {
                    let m = disp.clone();
                    let next = (g.tail(e), shift(disp, e, 1));
                    step((e, m), next, &mut dist, &mut queue, &mut best);
                }
            }
        }
    }
    if best <= bound {
        GirthBound::Finite(best)
    } else {
        GirthBound::ExceedsBound
    }
}

/// Exhaustive backtracking isomorphism test for directed multigraphs.
/// Intended for desk-scale graphs (roughly up to 12 vertices).
pub fn isomorphic(a: &Digraph, b: &Digraph) -> bool {
    if a.v_count() != b.v_count() || a.e_count() != b.e_count() {
        return false;
    }
    let n = a.v_count();
    // multiplicity maps: (tail, head) -> count
    let count = |g: &Digraph| {
        let mut m: HashMap<(usize, usize), usize> = HashMap::new();
        for e in 0..g.e_count() {
            *m.entry((g.tail(e), g.head(e))).or_default() += 1;
        }
        m
    };
    let ma = count(a);
    let mb = count(b);
    let sig = |m: &HashMap<(usize, usize), usize>, n: usize| {
        let mut s = vec![(0usize, 0usize, 0usize); n];
        for (&(t, h), &c) in m {
            s[t].0 += c;
            s[h].1 += c;
            if t == h {
                s[t].2 += c;
            }
        }
        s
    };
    let sa = sig(&ma, n);
    let sb = sig(&mb, n);
    let mut assigned = vec![usize::MAX; n];
    let mut used = vec![false; n];
    #[allow(clippy::too_many_arguments)]
    fn rec(
        v: usize,
        n: usize,
        sa: &[(usize, usize, usize)],
        sb: &[(usize, usize, usize)],
        ma: &HashMap<(usize, usize), usize>,
        mb: &HashMap<(usize, usize), usize>,
        assigned: &mut Vec<usize>,
        used: &mut Vec<bool>,
    ) -> bool {
        if v == n {
            return true;
        }
        for w in 0..n {
            if used[w] || sa[v] != sb[w] {
                continue;
            }
            let mut ok = true;
            for u in 0..v {
                let aw = assigned[u];
                if ma.get(&(v, u)).copied().unwrap_or(0) != mb.get(&(w, aw)).copied().unwrap_or(0)
                    || ma.get(&(u, v)).copied().unwrap_or(0) != mb.get(&(aw, w)).copied().unwrap_or(0)
                {
                    ok = false;
                    break;
                }
            }
            if ma.get(&(v, v)).copied().unwrap_or(0) != mb.get(&(w, w)).copied().unwrap_or(0) {
                ok = false;
            }
            if !ok {
                continue;
            }
            assigned[v] = w;
            used[w] = true;
            if rec(v + 1, n, sa, sb, ma, mb, assigned, used) {
                return true;
            }
            assigned[v] = usize::MAX;
            used[w] = false;
        }
        false
    }
    rec(0, n, &sa, &sb, &ma, &mb, &mut assigned, &mut used)
}

/// Canonical text form of a digraph (one declaration per line).
pub fn emit_digraph(g: &Digraph) -> String {
    let mut out = String::new();
    for v in 0..g.v_count() {
        writeln!(out, "vertex {}", g.vertex_id(v)).unwrap();
    }
    for e in 0..g.e_count() {
        writeln!(
            out,
            "edge {} {} {}",
            g.edge_id(e),
            g.vertex_id(g.tail(e)),
            g.vertex_id(g.head(e))
        )
        .unwrap();
    }
    out
}

pub fn emit_bigraph(b: &Bigraph) -> String {
    let g = b.graph();
    let mut out = String::new();
    for v in 0..g.v_count() {
        writeln!(out, "vertex {}", g.vertex_id(v)).unwrap();
    }
    for e in 0..g.e_count() {
        writeln!(
            out,
            "edge {} {} {} colour={}",
            g.edge_id(e),
            g.vertex_id(g.tail(e)),
            g.vertex_id(g.head(e)),
            b.colour(e).label()
        )
        .unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn invariants_of_bouquets() {
        let b1 = Digraph::bouquet(1);
        let i = invariants(&b1);
        assert_eq!((i.h0, i.h1, i.chi, i.rho), (1, 1, 0, 0));
        let b2 = Digraph::bouquet(2);
        let i = invariants(&b2);
        assert_eq!((i.h0, i.h1, i.chi, i.rho, i.rho_prime), (1, 2, -1, 1, 1));
    }

    #[test]
    fn euler_identity_random_graphs() {
        let mut rng = crate::rng::Rng::new(17);
        for _ in 0..100 {
            let g = crate::testutil::random_digraph(&mut rng, 6, 9);
            let i = invariants(&g);
            assert_eq!(i.h0 as i64 - i.h1 as i64, i.chi);
            assert_eq!(i.chi, g.v_count() as i64 - g.e_count() as i64);
            assert!(i.rho_prime <= i.rho);
        }
    }

    #[test]
    fn identity_fibre_product_of_b2() {
        let b2 = Digraph::bouquet(2);
        let id = GraphMorphism::identity(&b2);
        let (p, p1, p2) = fibre_product(&id, &id).unwrap();
        assert_eq!(p.v_count(), 1);
        assert_eq!(p.e_count(), 2);
        assert!(isomorphic(&p, &b2));
        assert!(matches!(classify_morphism(&p1), MorphismClass::Covering { degree: Some(1) }));
        assert!(matches!(classify_morphism(&p2), MorphismClass::Covering { degree: Some(1) }));
    }

    #[test]
    fn mismatched_targets_rejected() {
        let b1 = Digraph::bouquet(1);
        let b2 = Digraph::bouquet(2);
        let f1 = GraphMorphism::identity(&b1);
        let f2 = GraphMorphism::identity(&b2);
        assert!(matches!(fibre_product(&f1, &f2), Err(Error::Input(_))));
    }

    #[test]
    fn classify_loop_inclusion_is_etale() {
        let b2 = Digraph::bouquet(2);
        let b1 = Digraph::new(
            vec!["v".into()],
            vec![("e1".into(), "v".into(), "v".into())],
        )
        .unwrap();
        let incl = GraphMorphism::new(b1, b2.clone(), vec![0], vec![0]).unwrap();
        assert_eq!(classify_morphism(&incl), MorphismClass::Etale);
        let id = GraphMorphism::identity(&b2);
        assert!(matches!(classify_morphism(&id), MorphismClass::Covering { degree: Some(1) }));
    }

    #[test]
    fn chi_and_rho_scale_by_covering_degree() {
        // 200 randomized permutation covers of random digraphs
        let mut rng = crate::rng::Rng::new(200);
        for _ in 0..200 {
            let g = crate::testutil::random_digraph(&mut rng, 6, 9);
            let d = 1 + rng.below_usize(4);
            let cover = crate::excess::random_permutation_cover(&g, d, &mut rng).unwrap();
            let (bi, ci) = (invariants(&g), invariants(cover.source()));
            assert_eq!(ci.chi, d as i64 * bi.chi);
            assert_eq!(ci.rho, d * bi.rho);
            assert!(matches!(
                classify_morphism(&cover),
                MorphismClass::Covering { degree: Some(deg) } if deg == d
            ));
        }
    }

    #[test]
    fn girths_of_bouquets() {
        let b1 = Digraph::bouquet(1);
        let (g, a) = girths(&b1, 20).unwrap();
        assert_eq!(g, GirthBound::Finite(1));
        assert_eq!(a, GirthBound::ExceedsBound);
        let b2 = Digraph::bouquet(2);
        let (g, a) = girths(&b2, 20).unwrap();
        assert_eq!(g, GirthBound::Finite(1));
        assert_eq!(a, GirthBound::Finite(4));
    }

    #[test]
    fn girth_of_directed_cycles() {
        for n in 3..8 {
            let vertices: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
            let edges = (0..n)
                .map(|i| (format!("e{i}"), format!("v{i}"), format!("v{}", (i + 1) % n)))
                .collect();
            let g = Digraph::new(vertices, edges).unwrap();
            let (girth, _) = girths(&g, 2 * n).unwrap();
            assert_eq!(girth, GirthBound::Finite(n));
        }
    }

    #[test]
    fn girth_parallel_edges() {
        let g = Digraph::new(
            vec!["a".into(), "b".into()],
            vec![
                ("e1".into(), "a".into(), "b".into()),
                ("e2".into(), "a".into(), "b".into()),
            ],
        )
        .unwrap();
        let (girth, abelian) = girths(&g, 10).unwrap();
        assert_eq!(girth, GirthBound::Finite(2));
        // h1 = 1, so the universal Abelian cover is a tree
        assert_eq!(abelian, GirthBound::ExceedsBound);
    }

    #[test]
    fn abelian_girth_never_below_girth() {
        let mut rng = crate::rng::Rng::new(23);
        for _ in 0..40 {
            let g = crate::testutil::random_digraph(&mut rng, 4, 6);
            let (girth, abelian) = girths(&g, 10).unwrap();
            if let (GirthBound::Finite(x), GirthBound::Finite(y)) = (girth, abelian) {
                assert!(y >= x);
            }
            if girth == GirthBound::ExceedsBound {
                assert_eq!(abelian, GirthBound::ExceedsBound);
            }
        }
    }

    #[test]
    fn isomorphism_positive_and_negative() {
        let b2 = Digraph::bouquet(2);
        assert!(isomorphic(&b2, &b2));
        let renamed = Digraph::new(
            vec!["w".into()],
            vec![
                ("x".into(), "w".into(), "w".into()),
                ("y".into(), "w".into(), "w".into()),
            ],
        )
        .unwrap();
        assert!(isomorphic(&b2, &renamed));
        assert!(!isomorphic(&b2, &Digraph::bouquet(3)));
        // direction matters: a 2-cycle vs two edges the same way
        let cyc = Digraph::new(
            vec!["a".into(), "b".into()],
            vec![
                ("e1".into(), "a".into(), "b".into()),
                ("e2".into(), "b".into(), "a".into()),
            ],
        )
        .unwrap();
        let par = Digraph::new(
            vec!["a".into(), "b".into()],
            vec![
                ("e1".into(), "a".into(), "b".into()),
                ("e2".into(), "a".into(), "b".into()),
            ],
        )
        .unwrap();
        assert!(!isomorphic(&cyc, &par));
    }
}
