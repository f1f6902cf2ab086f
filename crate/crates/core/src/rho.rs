//! Rho-kernels and k-th power kernels on Cayley bigraphs, the vertex-family
//! criterion, SHNC/HNC verification on etale bigraphs, Stallings-core
//! ingestion of subgroup words, and the generic-excess experiments.

use crate::digraph::{
    fibre_product_over_b2, invariants, Bigraph, Colour, Digraph, GraphInvariants,
};
use crate::error::{budget_err, input_err, Error, Result};
use crate::linalg::{is_totally_independent, Matrix, PrimeField, Subspace};
use crate::excess::{max_excess_brute, CompartmentalizedSubspace, MaxExcess};
use crate::galois::{cayley_bigraph, FiniteGroup};
use crate::rng::Rng;
use crate::sheaf::Sheaf;
use std::collections::BTreeSet;

/// A Cayley bigraph together with its group and generators; vertex i of the
/// graph is element i of the group, and the edge (g, colour) has index
/// colour * |G| + g.
#[derive(Debug, Clone)]
pub struct CayleyContext {
    pub group: FiniteGroup,
    pub g1: usize,
    pub g2: usize,
    pub graph: Bigraph,
}

impl CayleyContext {
    pub fn new(group: FiniteGroup, g1: usize, g2: usize) -> Result<Self> {
        let graph = cayley_bigraph(&group, g1, g2)?;
        Ok(CayleyContext {
            group,
            g1,
            g2,
            graph,
        })
    }

    pub fn order(&self) -> usize {
        self.group.order()
    }

    pub fn edge_index(&self, g: usize, colour: Colour) -> usize {
        colour.index() * self.order() + g
    }

    pub fn edge_tag(&self, e: usize) -> (usize, Colour) {
        let n = self.order();
        if e < n {
            (e, Colour::One)
        } else {
            (e - n, Colour::Two)
        }
    }

    /// Right translate of a vertex by a group element.
    pub fn vertex_translate(&self, v: usize, g: usize) -> usize {
        self.group.mul(v, g)
    }

    /// Right translate of an edge by a group element (colour preserved).
    pub fn edge_translate(&self, e: usize, g: usize) -> usize {
        let (h, c) = self.edge_tag(e);
        self.edge_index(self.group.mul(h, g), c)
    }
}

/// A subgraph of a Cayley bigraph, by vertex and edge index sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subgraph {
    pub vertices: BTreeSet<usize>,
    pub edges: BTreeSet<usize>,
}

impl Subgraph {
    pub fn new(ctx: &CayleyContext, vertices: BTreeSet<usize>, edges: BTreeSet<usize>) -> Result<Self> {
        let g = ctx.graph.graph();
        for &v in &vertices {
            if v >= g.v_count() {
                return input_err("subgraph vertex out of range");
            }
        }
        for &e in &edges {
            if e >= g.e_count() {
                return input_err("subgraph edge out of range");
            }
            if !vertices.contains(&g.tail(e)) || !vertices.contains(&g.head(e)) {
                return Err(Error::Input(format!(
                    "subgraph edge `{}` has an endpoint outside the vertex set",
                    g.edge_id(e)
                )));
            }
        }
        Ok(Subgraph { vertices, edges })
    }

    pub fn full(ctx: &CayleyContext) -> Subgraph {
        Subgraph {
            vertices: (0..ctx.graph.graph().v_count()).collect(),
            edges: (0..ctx.graph.graph().e_count()).collect(),
        }
    }

    pub fn empty() -> Subgraph {
        Subgraph {
            vertices: BTreeSet::new(),
            edges: BTreeSet::new(),
        }
    }

    /// Match a free-standing bigraph against the Cayley graph by ids.
    pub fn from_bigraph(ctx: &CayleyContext, b: &Bigraph) -> Result<Subgraph> {
        let g = ctx.graph.graph();
        let mut vertices = BTreeSet::new();
        for v in 0..b.graph().v_count() {
            let id = b.graph().vertex_id(v);
            let idx = g
                .vertex_index(id)
                .ok_or_else(|| Error::Input(format!("vertex `{id}` is not a Cayley vertex")))?;
            vertices.insert(idx);
        }
        let mut edges = BTreeSet::new();
        for e in 0..b.graph().e_count() {
            let id = b.graph().edge_id(e);
            let idx = g
                .edge_index(id)
                .ok_or_else(|| Error::Input(format!("edge `{id}` is not a Cayley edge")))?;
            let (t, h) = (b.graph().tail(e), b.graph().head(e));
            if g.vertex_index(b.graph().vertex_id(t)) != Some(g.tail(idx))
                || g.vertex_index(b.graph().vertex_id(h)) != Some(g.head(idx))
                || b.colour(e) != ctx.graph.colour(idx)
            {
                return Err(Error::Input(format!(
                    "edge `{id}` disagrees with the Cayley graph structure"
                )));
            }
            edges.insert(idx);
        }
        Subgraph::new(ctx, vertices, edges)
    }

    pub fn to_bigraph(&self, ctx: &CayleyContext) -> Bigraph {
        let vs: Vec<usize> = self.vertices.iter().copied().collect();
        let es: Vec<usize> = self.edges.iter().copied().collect();
        ctx.graph.subgraph(&vs, &es).expect("subgraph closed under endpoints")
    }

    pub fn translate(&self, ctx: &CayleyContext, g: usize) -> Subgraph {
        Subgraph {
            vertices: self.vertices.iter().map(|&v| ctx.vertex_translate(v, g)).collect(),
            edges: self.edges.iter().map(|&e| ctx.edge_translate(e, g)).collect(),
        }
    }

    pub fn invariants(&self, ctx: &CayleyContext) -> GraphInvariants {
        invariants(self.to_bigraph(ctx).graph())
    }

    pub fn rho(&self, ctx: &CayleyContext) -> usize {
        self.invariants(ctx).rho
    }

    /// Remove one edge (returns a new subgraph); isolated endpoints stay.
    pub fn without_edge(&self, e: usize) -> Subgraph {
        let mut edges = self.edges.clone();
        edges.remove(&e);
        Subgraph {
            vertices: self.vertices.clone(),
            edges,
        }
    }
}

/// All subgraphs of a bigraph at desk scale (every vertex subset paired
/// with every edge subset supported on it).
pub fn all_subgraphs(ctx: &CayleyContext) -> Vec<Subgraph> {
    let g = ctx.graph.graph();
    let nv = g.v_count();
    let mut out = Vec::new();
    for vmask in 0u64..(1 << nv) {
        let vertices: BTreeSet<usize> = (0..nv).filter(|&v| vmask >> v & 1 == 1).collect();
        let candidate: Vec<usize> = (0..g.e_count())
            .filter(|&e| vertices.contains(&g.tail(e)) && vertices.contains(&g.head(e)))
            .collect();
        for emask in 0u64..(1 << candidate.len()) {
            let edges: BTreeSet<usize> = candidate
                .iter()
                .enumerate()
                .filter(|&(i, _)| emask >> i & 1 == 1)
                .map(|(_, &e)| e)
                .collect();
            out.push(Subgraph {
                vertices: vertices.clone(),
                edges,
            });
        }
    }
    out
}

/// Orbit sets: for every vertex and edge P of the Cayley graph, the set of
/// group elements g with P in Lg.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitSets {
    pub vertex_sets: Vec<Vec<usize>>,
    pub edge_sets: Vec<Vec<usize>>,
}

pub fn orbit_sets(ctx: &CayleyContext, l: &Subgraph) -> OrbitSets {
    let grp = &ctx.group;
    let n = ctx.order();
    // v in Lg iff v = w g for some w in V_L, i.e. g = w^{-1} v
    let vertex_sets = (0..n)
        .map(|v| {
            let mut s: Vec<usize> = l.vertices.iter().map(|&w| grp.mul(grp.inv(w), v)).collect();
            s.sort_unstable();
            s.dedup();
            s
        })
        .collect();
    let edge_sets = (0..2 * n)
        .map(|e| {
            let (h, c) = ctx.edge_tag(e);
            let mut s: Vec<usize> = l
                .edges
                .iter()
                .filter(|&&le| ctx.edge_tag(le).1 == c)
                .map(|&le| grp.mul(grp.inv(ctx.edge_tag(le).0), h))
                .collect();
            s.sort_unstable();
            s.dedup();
            s
        })
        .collect();
    OrbitSets {
        vertex_sets,
        edge_sets,
    }
}

/// A k-th power kernel sheaf: per-point value Free_{G_L(P)}(M) with
/// inclusion restriction maps.
#[derive(Debug, Clone)]
pub struct RhoKernel {
    pub k: usize,
    pub m: Matrix,
    pub sheaf: Sheaf,
    pub orbit: OrbitSets,
    /// Per-point echelon bases of the free subspaces, as vectors over the
    /// full group coordinate space (for witnesses and symmetry checks).
    pub vertex_bases: Vec<Matrix>,
    pub edge_bases: Vec<Matrix>,
}

/// Build the kernel sheaf of M iota : F_L G -> F^k. Fails (naming the
/// point) unless the columns of M indexed by G_L(P) span F^k at every P.
pub fn build_kernel(ctx: &CayleyContext, l: &Subgraph, k: usize, m: &Matrix) -> Result<RhoKernel> {
    let n = ctx.order();
    if m.rows() != k || m.cols() != n {
        return input_err(format!("M must be {k}x{n}"));
    }
    let orbit = orbit_sets(ctx, l);
    let field = m.field();
    let g = ctx.graph.graph();
    // free subspace basis at a support set T, as |T|-coordinate rows
    // embedded back into group coordinates
    let free_basis = |t: &[usize], label: &str| -> Result<Matrix> {
        let selected = m.select_columns(t);
        if selected.rank() != k {
            return Err(Error::Input(format!(
                "M is not L-surjective: columns over `{label}` span only rank {} < {k}",
                selected.rank()
            )));
        }
        let ker = selected.kernel_basis();
        let mut rows = Vec::with_capacity(ker.rows());
        for i in 0..ker.rows() {
            let mut full = vec![0u64; n];
            for (j, &col) in t.iter().enumerate() {
                full[col] = ker.get(i, j);
            }
            rows.push(full);
        }
        if rows.is_empty() {
            return Ok(Matrix::zero(field, 0, n));
        }
        Matrix::from_rows(field, &rows)
    };
    let mut vertex_bases = Vec::with_capacity(n);
    for v in 0..n {
        vertex_bases.push(free_basis(&orbit.vertex_sets[v], g.vertex_id(v))?);
    }
    let mut edge_bases = Vec::with_capacity(2 * n);
    for e in 0..2 * n {
        edge_bases.push(free_basis(&orbit.edge_sets[e], g.edge_id(e))?);
    }
    // restriction maps: the inclusion Free_{G_L(e)} into Free_{G_L(v)}
    // written in the chosen bases
    let express = |edge_basis: &Matrix, vertex_basis: &Matrix| -> Result<Matrix> {
        let mut out = Matrix::zero(field, vertex_basis.rows(), edge_basis.rows());
        let vt = vertex_basis.transpose();
        for j in 0..edge_basis.rows() {
            let coeffs = vt.solve(edge_basis.row(j)).ok_or_else(|| {
                Error::Internal("free edge subspace escapes the vertex free subspace".into())
            })?;
            for i in 0..vertex_basis.rows() {
                out.set(i, j, coeffs[i]);
            }
        }
        Ok(out)
    };
    let mut head_map = Vec::with_capacity(2 * n);
    let mut tail_map = Vec::with_capacity(2 * n);
    for e in 0..2 * n {
        head_map.push(express(&edge_bases[e], &vertex_bases[g.head(e)])?);
        tail_map.push(express(&edge_bases[e], &vertex_bases[g.tail(e)])?);
    }
    let sheaf = Sheaf::new(
        g.clone(),
        field,
        vertex_bases.iter().map(|b| b.rows()).collect(),
        edge_bases.iter().map(|b| b.rows()).collect(),
        head_map,
        tail_map,
    )?;
    Ok(RhoKernel {
        k,
        m: m.clone(),
        sheaf,
        orbit,
        vertex_bases,
        edge_bases,
    })
}

/// Columns permuted by right translation: column g' of the result is
/// column g' g^{-1} of M.
pub fn column_translate(ctx: &CayleyContext, m: &Matrix, g: usize) -> Matrix {
    let grp = &ctx.group;
    let cols: Vec<usize> = (0..grp.order()).map(|gp| grp.mul(gp, grp.inv(g))).collect();
    m.select_columns(&cols)
}

/// A vertex family: a subset of G_L(v) for every vertex of the Cayley
/// graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexFamily {
    pub sets: Vec<Vec<usize>>,
}

impl VertexFamily {
    pub fn empty(ctx: &CayleyContext) -> VertexFamily {
        VertexFamily {
            sets: vec![Vec::new(); ctx.order()],
        }
    }

    /// The induced edge family U_E(e) = U(te) n U(he) n G_L(e).
    pub fn induced_edge_set(&self, ctx: &CayleyContext, orbit: &OrbitSets, e: usize) -> Vec<usize> {
        let g = ctx.graph.graph();
        let (t, h) = (g.tail(e), g.head(e));
        orbit.edge_sets[e]
            .iter()
            .filter(|&&x| self.sets[t].contains(&x) && self.sets[h].contains(&x))
            .copied()
            .collect()
    }

    /// deficit = sum_e max(0, |U_E(e)| - rho) - sum_v max(0, |U(v)| - rho).
    pub fn deficit(&self, ctx: &CayleyContext, orbit: &OrbitSets, rho: usize) -> i64 {
        let g = ctx.graph.graph();
        let mut d: i64 = 0;
        for e in 0..g.e_count() {
            let w = self.induced_edge_set(ctx, orbit, e).len();
            d += w.saturating_sub(rho) as i64;
        }
        for v in 0..g.v_count() {
            d -= self.sets[v].len().saturating_sub(rho) as i64;
        }
        d
    }
}

/// How the family space is examined.
#[derive(Debug, Clone, Copy)]
pub enum FamilySearch {
    Exhaustive { budget: u64 },
    Sampled { trials: u64, seed: u64 },
}

#[derive(Debug, Clone)]
pub struct FamilyCheckReport {
    pub holds: bool,
    pub max_deficit: i64,
    pub worst: VertexFamily,
    pub exhaustive: bool,
    pub families_checked: u64,
    pub rho: usize,
}

/// Check the vertex-family criterion: no family has positive deficit.
/// Exhaustive enumeration prunes branches whose optimistic bound cannot
/// beat the current maximum.
pub fn vertex_family_check(ctx: &CayleyContext, l: &Subgraph, mode: FamilySearch) -> Result<FamilyCheckReport> {
    let orbit = orbit_sets(ctx, l);
    let rho = l.rho(ctx);
    match mode {
        FamilySearch::Exhaustive { budget } => {
            let mut space: f64 = 0.0;
            for s in &orbit.vertex_sets {
                space += s.len() as f64; // log2 of the family count
            }
            if space > 63.0 || (1u64 << space as u32) > budget {
                return budget_err(format!(
                    "2^{space:.0} vertex families exceed the budget of {budget}"
                ));
            }
            let mut st = ExhaustiveState {
                ctx,
                orbit: &orbit,
                rho,
                best: i64::MIN,
                worst: VertexFamily::empty(ctx),
                checked: 0,
                current: VertexFamily::empty(ctx),
            };
            st.recurse(0);
            Ok(FamilyCheckReport {
                holds: st.best <= 0,
                max_deficit: st.best,
                worst: st.worst,
                exhaustive: true,
                families_checked: st.checked,
                rho,
            })
        }
        FamilySearch::Sampled { trials, seed } => {
            let mut best = i64::MIN;
            let mut worst = VertexFamily::empty(ctx);
            let mut rng = Rng::new(seed);
            for _ in 0..trials {
                let fam = VertexFamily {
                    sets: orbit
                        .vertex_sets
                        .iter()
                        .map(|s| s.iter().copied().filter(|_| rng.flip()).collect())
                        .collect(),
                };
                let d = fam.deficit(ctx, &orbit, rho);
                if d > best {
                    best = d;
                    worst = fam;
                }
            }
            Ok(FamilyCheckReport {
                holds: best <= 0,
                max_deficit: best,
                worst,
                exhaustive: false,
                families_checked: trials,
                rho,
            })
        }
    }
}

struct ExhaustiveState<'a> {
    ctx: &'a CayleyContext,
    orbit: &'a OrbitSets,
    rho: usize,
    best: i64,
    worst: VertexFamily,
    checked: u64,
    current: VertexFamily,
}

impl<'a> ExhaustiveState<'a> {
    fn recurse(&mut self, v: usize) {
        let g = self.ctx.graph.graph();
        if v == g.v_count() {
            self.checked += 1;
            let d = self.current.deficit(self.ctx, self.orbit, self.rho);
            if d > self.best {
                self.best = d;
                self.worst = self.current.clone();
            }
            return;
        }
        // optimistic bound: assigned vertices subtract exactly, edges then
        // contribute at most their cap; unassigned vertices contribute 0
        let mut bound: i64 = 0;
        for e in 0..g.e_count() {
            let (t, h) = (g.tail(e), g.head(e));
            let mut cap = self.orbit.edge_sets[e].len();
            if t < v {
                cap = cap.min(self.current.sets[t].len());
            }
            if h < v {
                cap = cap.min(self.current.sets[h].len());
            }
            bound += cap.saturating_sub(self.rho) as i64;
        }
        for u in 0..v {
            bound -= self.current.sets[u].len().saturating_sub(self.rho) as i64;
        }
        if bound <= self.best && self.best > 0 {
            return; // cannot beat an already-positive maximum
        }
        let options = self.orbit.vertex_sets[v].clone();
        let m = options.len();
        for mask in 0u64..(1 << m) {
            self.current.sets[v] = options
                .iter()
                .enumerate()
                .filter(|&(i, _)| mask >> i & 1 == 1)
                .map(|(_, &x)| x)
                .collect();
            self.recurse(v + 1);
        }
        self.current.sets[v] = Vec::new();
    }
}

/// Deficit identity data: the positive set L' and the pair graph H.
pub fn deficit_identity(
    ctx: &CayleyContext,
    l: &Subgraph,
    fam: &VertexFamily,
) -> Result<(i64, i64)> {
    let orbit = orbit_sets(ctx, l);
    let rho = l.rho(ctx);
    let g = ctx.graph.graph();
    let grp = &ctx.group;
    // positive set: vertices and edges whose family exceeds rho
    let pos_v: BTreeSet<usize> = (0..g.v_count()).filter(|&v| fam.sets[v].len() > rho).collect();
    let pos_e: BTreeSet<usize> = (0..g.e_count())
        .filter(|&e| fam.induced_edge_set(ctx, &orbit, e).len() > rho)
        .collect();
    let lprime = Subgraph::new(ctx, pos_v.clone(), pos_e.clone())?;
    let chi_lprime = pos_v.len() as i64 - pos_e.len() as i64;
    // pair graph H inside L x_{B2} L': vertices (v g^{-1}, v), edges
    // (e g^{-1}, e); build it explicitly to validate subgraph-ness
    let mut vids = Vec::new();
    for &v in &pos_v {
        for &gg in &fam.sets[v] {
            vids.push(format!("({},{})", g.vertex_id(ctx.vertex_translate(v, grp.inv(gg))), g.vertex_id(v)));
        }
    }
    let mut eids = Vec::new();
    for &e in &pos_e {
        for gg in fam.induced_edge_set(ctx, &orbit, e) {
            let le = ctx.edge_translate(e, grp.inv(gg));
            let (t1, h1) = (g.tail(le), g.head(le));
            let (t2, h2) = (g.tail(e), g.head(e));
            eids.push((
                format!("({},{})", g.edge_id(le), g.edge_id(e)),
                format!("({},{})", g.vertex_id(t1), g.vertex_id(t2)),
                format!("({},{})", g.vertex_id(h1), g.vertex_id(h2)),
            ));
        }
    }
    let h = Digraph::new(vids, eids)?;
    let chi_h = h.v_count() as i64 - h.e_count() as i64;
    let lhs = fam.deficit(ctx, &orbit, rho);
    // counting the pair graph: -chi(H) = deficit - rho(L) chi(L')
    let rhs = -chi_h + rho as i64 * chi_lprime;
    let _ = lprime;
    Ok((lhs, rhs))
}

/// SHNC/HNC margins for a pair of etale bigraphs.
#[derive(Debug, Clone)]
pub struct ShncReport {
    pub rho_k: usize,
    pub rho_l: usize,
    pub product: GraphInvariants,
    pub shnc_margin: i64,
    pub hnc_margin: i64,
    pub shnc_holds: bool,
    pub hnc_holds: bool,
}

pub fn shnc_verify(k: &Bigraph, l: &Bigraph) -> Result<ShncReport> {
    if !k.is_etale() {
        return input_err("left bigraph is not etale over B2");
    }
    if !l.is_etale() {
        return input_err("right bigraph is not etale over B2");
    }
    let (prod, _, _) = fibre_product_over_b2(k, l)?;
    let pi = invariants(prod.graph());
    let rho_k = invariants(k.graph()).rho;
    let rho_l = invariants(l.graph()).rho;
    let bound = (rho_k * rho_l) as i64;
    Ok(ShncReport {
        rho_k,
        rho_l,
        product: pi,
        shnc_margin: bound - pi.rho as i64,
        hnc_margin: bound - pi.rho_prime as i64,
        shnc_holds: (pi.rho as i64) <= bound,
        hnc_holds: (pi.rho_prime as i64) <= bound,
    })
}

/// Stallings core of a list of subgroup words over {a, b} (uppercase means
/// inverse): wedge the word loops at a basepoint, fold until etale, then
/// prune non-basepoint leaves. The basepoint vertex is kept even when it
/// ends up a leaf, and is always vertex "v0" of the result.
pub fn stallings_core(words: &[String]) -> Result<Bigraph> {
    if words.is_empty() {
        return input_err("need at least one word");
    }
    #[derive(Clone, Copy, PartialEq)]
    struct Letter {
        colour: Colour,
        inverse: bool,
    }
    let parse_word = |w: &str| -> Result<Vec<Letter>> {
        let mut out = Vec::new();
        for c in w.chars() {
            let letter = match c {
                'a' => Letter { colour: Colour::One, inverse: false },
                'A' => Letter { colour: Colour::One, inverse: true },
                'b' => Letter { colour: Colour::Two, inverse: false },
                'B' => Letter { colour: Colour::Two, inverse: true },
                _ => return input_err(format!("word letter `{c}` is not one of a, b, A, B")),
            };
            out.push(letter);
        }
        // free reduction
        let mut red: Vec<Letter> = Vec::new();
        for l in out {
            if let Some(last) = red.last() {
                if last.colour == l.colour && last.inverse != l.inverse {
                    red.pop();
                    continue;
                }
            }
            red.push(l);
        }
        Ok(red)
    };
    // wedge of word loops at vertex 0
    let mut next_vertex = 1usize;
    let mut edges: Vec<(Colour, usize, usize)> = Vec::new();
    for w in words {
        let letters = parse_word(w)?;
        if letters.is_empty() {
            return input_err(format!("word `{w}` reduces to the identity"));
        }
        let mut cur = 0usize;
        for (i, l) in letters.iter().enumerate() {
            let nxt = if i + 1 == letters.len() {
                0
            } else {
                let v = next_vertex;
                next_vertex += 1;
                v
            };
            // traversing x means an x-coloured edge cur -> nxt; traversing
            // x^{-1} means the edge runs nxt -> cur
            if l.inverse {
                edges.push((l.colour, nxt, cur));
            } else {
                edges.push((l.colour, cur, nxt));
            }
            cur = nxt;
        }
    }
    // fold with union-find on vertices
    let mut parent: Vec<usize> = (0..next_vertex).collect();
    fn find(parent: &mut Vec<usize>, x: usize) -> usize {
        if parent[x] != x {
            let r = find(parent, parent[x]);
            parent[x] = r;
        }
        parent[x]
    }
    let mut alive: Vec<bool> = vec![true; edges.len()];
    loop {
        let mut changed = false;
        // same colour, same tail -> identify heads; same head -> tails
        for side in 0..2 {
            let mut seen: std::collections::HashMap<(usize, usize), usize> =
                std::collections::HashMap::new();
            for i in 0..edges.len() {
                if !alive[i] {
                    continue;
                }
                let (c, t, h) = edges[i];
                let (t, h) = (find(&mut parent, t), find(&mut parent, h));
                let key = if side == 0 { (c.index(), t) } else { (c.index(), h) };
                if let Some(&j) = seen.get(&key) {
                    let (_, tj, hj) = edges[j];
                    let (tj, hj) = (find(&mut parent, tj), find(&mut parent, hj));
                    // merge the far endpoints
                    let (x, y) = if side == 0 { (h, hj) } else { (t, tj) };
                    if x != y {
                        let (rx, ry) = (find(&mut parent, x), find(&mut parent, y));
                        parent[rx.max(ry)] = rx.min(ry);
                    }
                    // after merging, the two edges are parallel duplicates
                    alive[i] = false;
                    changed = true;
                } else {
                    seen.insert(key, i);
                }
            }
            if changed {
                break; // re-normalize endpoints before the next sweep
            }
        }
        if !changed {
            break;
        }
    }
    // prune non-basepoint leaves repeatedly
    let base_root = find(&mut parent, 0);
    loop {
        let mut degree: std::collections::HashMap<usize, usize> = std::collections::HashMap::new();
        for i in 0..edges.len() {
            if !alive[i] {
                continue;
            }
            let (_, t, h) = edges[i];
            *degree.entry(find(&mut parent, t)).or_default() += 1;
            *degree.entry(find(&mut parent, h)).or_default() += 1;
        }
        let mut removed = false;
        for i in 0..edges.len() {
            if !alive[i] {
                continue;
            }
            let (_, t, h) = edges[i];
            let (t, h) = (find(&mut parent, t), find(&mut parent, h));
            for (leaf, _other) in [(t, h), (h, t)] {
                if leaf != base_root && degree.get(&leaf) == Some(&1) {
                    alive[i] = false;
                    removed = true;
                    break;
                }
            }
            if removed {
                break;
            }
        }
        if !removed {
            break;
        }
    }
    // surviving vertices, basepoint first, then in id order
    let mut roots: BTreeSet<usize> = BTreeSet::new();
    roots.insert(base_root);
    for i in 0..edges.len() {
        if alive[i] {
            roots.insert(find(&mut parent, edges[i].1));
            roots.insert(find(&mut parent, edges[i].2));
        }
    }
    let mut order: Vec<usize> = vec![base_root];
    order.extend(roots.iter().copied().filter(|&r| r != base_root));
    let rename: std::collections::HashMap<usize, usize> =
        order.iter().enumerate().map(|(i, &r)| (r, i)).collect();
    let vertices: Vec<String> = (0..order.len()).map(|i| format!("v{i}")).collect();
    let mut out_edges = Vec::new();
    let mut colours = Vec::new();
    let mut eidx = 0usize;
    for i in 0..edges.len() {
        if !alive[i] {
            continue;
        }
        let (c, t, h) = edges[i];
        let (t, h) = (find(&mut parent, t), find(&mut parent, h));
        out_edges.push((
            format!("e{eidx}"),
            format!("v{}", rename[&t]),
            format!("v{}", rename[&h]),
        ));
        colours.push(c);
        eidx += 1;
    }
    let core = Bigraph::new(Digraph::new(vertices, out_edges)?, colours)?;
    if !core.is_etale() {
        return Err(Error::Internal("folding terminated on a non-etale graph".into()));
    }
    Ok(core)
}

/// Find an edge whose removal drops rho by one; None exactly when
/// rho(L) = 0.
pub fn edge_with_rho_drop(ctx: &CayleyContext, l: &Subgraph) -> Result<Option<usize>> {
    let rho = l.rho(ctx);
    if rho == 0 {
        return Ok(None);
    }
    for &e in &l.edges {
        if l.without_edge(e).rho(ctx) == rho - 1 {
            return Ok(Some(e));
        }
    }
    Err(Error::Internal(
        "rho(L) > 0 but no single edge removal drops rho".into(),
    ))
}

/// Outcome of one experiment trial.
#[derive(Debug, Clone)]
pub enum TrialOutcome {
    Computed { value: usize, method: &'static str },
    Skipped { reason: String },
}

#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub rho: usize,
    pub group_order: usize,
    pub trials: Vec<TrialOutcome>,
    pub modal: Option<usize>,
    pub all_divisible: bool,
    pub skipped: usize,
}

/// Sample matrices M (totally independent over the given field), build the
/// k-th power kernel, and certify its maximum excess by brute enumeration.
/// Trials with no certified method are reported as skipped.
pub fn generic_excess_experiment(
    ctx: &CayleyContext,
    l: &Subgraph,
    k: usize,
    field: PrimeField,
    trials: usize,
    seed: u64,
    budget: u64,
) -> Result<ExperimentReport> {
    let n = ctx.order();
    let rho = l.rho(ctx);
    let mut outcomes = Vec::with_capacity(trials);
    for t in 0..trials {
        let mut rng = Rng::derive(seed, t as u64);
        // sample a totally independent M; k = 0 is the empty matrix
        let mut m = None;
        for _ in 0..500 {
            let cand = Matrix::random(field, k, n, &mut rng);
            if is_totally_independent(&cand) {
                m = Some(cand);
                break;
            }
        }
        let Some(m) = m else {
            outcomes.push(TrialOutcome::Skipped {
                reason: format!("no totally independent {k}x{n} matrix over GF({}) found", field.modulus()),
            });
            continue;
        };
        let kernel = match build_kernel(ctx, l, k, &m) {
            Ok(kr) => kr,
            Err(e) => {
                outcomes.push(TrialOutcome::Skipped {
                    reason: format!("kernel construction failed: {e}"),
                });
                continue;
            }
        };
        match max_excess_brute(&kernel.sheaf, budget) {
            Ok(me) => outcomes.push(TrialOutcome::Computed {
                value: me.value,
                method: me.method,
            }),
            Err(Error::Budget(msg)) | Err(Error::Input(msg)) => {
                outcomes.push(TrialOutcome::Skipped { reason: msg });
            }
            Err(e) => return Err(e),
        }
    }
    let computed: Vec<usize> = outcomes
        .iter()
        .filter_map(|o| match o {
            TrialOutcome::Computed { value, .. } => Some(*value),
            _ => None,
        })
        .collect();
    let modal = {
        let mut best: Option<(usize, usize)> = None; // (count, value)
        let mut distinct: Vec<usize> = computed.clone();
        distinct.sort_unstable();
        distinct.dedup();
        for v in distinct {
            let c = computed.iter().filter(|&&x| x == v).count();
            if best.is_none() || c > best.unwrap().0 {
                best = Some((c, v));
            }
        }
        best.map(|(_, v)| v)
    };
    Ok(ExperimentReport {
        rho,
        group_order: n,
        all_divisible: computed.iter().all(|v| v % n == 0),
        skipped: outcomes.len() - computed.len(),
        modal,
        trials: outcomes,
    })
}

/// The straight subspace of a kernel sheaf carried by a vertex family:
/// U(v) = Free_{U(v)}(M), expressed in the kernel sheaf's per-vertex bases.
pub fn straight_subspace(
    ctx: &CayleyContext,
    kernel: &RhoKernel,
    fam: &VertexFamily,
) -> Result<CompartmentalizedSubspace> {
    let field = kernel.m.field();
    let n = ctx.order();
    let mut per_vertex = Vec::with_capacity(n);
    for v in 0..n {
        let t = &fam.sets[v];
        // Free_T(M) for T a subset of G_L(v), in group coordinates
        let selected = kernel.m.select_columns(t);
        let ker = selected.kernel_basis();
        let mut rows = Vec::new();
        for i in 0..ker.rows() {
            let mut full = vec![0u64; n];
            for (j, &col) in t.iter().enumerate() {
                full[col] = ker.get(i, j);
            }
            rows.push(full);
        }
        // re-express in the vertex basis of the kernel sheaf
        let vb = &kernel.vertex_bases[v];
        let vt = vb.transpose();
        let mut coords = Vec::new();
        for r in &rows {
            let c = vt
                .solve(r)
                .ok_or_else(|| Error::Input("family set escapes G_L(v)".into()))?;
            coords.push(c);
        }
        let dim_v = vb.rows();
        let sub = if coords.is_empty() {
            Subspace::zero(field, dim_v)
        } else {
            Subspace::span(&Matrix::from_rows(field, &coords)?)
        };
        per_vertex.push(sub);
    }
    CompartmentalizedSubspace::new(&kernel.sheaf, per_vertex)
}

/// Certified k = 0 sanity value: the kernel is F_L G itself.
pub fn zero_power_kernel_excess(ctx: &CayleyContext, l: &Subgraph, field: PrimeField, budget: u64) -> Result<MaxExcess> {
    let m = Matrix::zero(field, 0, ctx.order());
    let kernel = build_kernel(ctx, l, 0, &m)?;
    max_excess_brute(&kernel.sheaf, budget)
}


#[cfg(test)]
mod chain_tests {
    use super::*;

    #[test]
    fn modal_excess_chain_strictly_decreasing_until_zero() {
        // on every rho = 2 subgraph of the desk-scale Cayley graphs the
        // modal certified excess is rho|G| at k = 0 and falls strictly to
        // zero as k climbs to rho
        for (n, g1, g2) in [(2usize, 1usize, 1usize), (3, 1, 2)] {
            let ctx = CayleyContext::new(FiniteGroup::cyclic(n).unwrap(), g1, g2).unwrap();
            for field in [PrimeField::new(2).unwrap(), PrimeField::new(3).unwrap()] {
                for l in all_subgraphs(&ctx) {
                    let rho = l.rho(&ctx);
                    if rho != 2 {
                        continue;
                    }
                    let mut modals = Vec::new();
                    for k in 0..=rho {
                        let rep =
                            generic_excess_experiment(&ctx, &l, k, field, 6, 123, 1 << 22).unwrap();
                        assert_eq!(rep.skipped, 0, "skipped trials on {l:?} at k={k}");
                        assert!(rep.all_divisible);
                        modals.push(rep.modal.unwrap());
                    }
                    assert_eq!(modals[0], rho * n);
                    for k in 1..modals.len() {
                        if modals[k - 1] == 0 {
                            assert_eq!(modals[k], 0);
                        } else {
                            assert!(
                                modals[k] < modals[k - 1],
                                "chain not strictly decreasing on {l:?}: {modals:?}"
                            );
                        }
                    }
                    assert_eq!(*modals.last().unwrap(), 0);
                }
            }
        }
    }
}
