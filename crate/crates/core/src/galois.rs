//! Galois graph theory: finite groups as multiplication tables, Galois
//! coordinates and the covers they define, Cayley bigraphs, monodromy, and
//! Gross's normal-extension construction.

use crate::digraph::{classify_morphism, Bigraph, Colour, Digraph, GraphMorphism, MorphismClass};
use crate::error::{input_err, Error, Result};
use crate::linalg::PrimeField;
use crate::rng::Rng;
use std::collections::HashMap;

const MAX_GROUP_ORDER: usize = 5040;

/// A finite group stored as an explicit multiplication table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    names: Vec<String>,
    mul: Vec<Vec<usize>>,
    inv: Vec<usize>,
    identity: usize,
    index: HashMap<String, usize>,
}

impl FiniteGroup {
    pub fn from_table(names: Vec<String>, mul: Vec<Vec<usize>>) -> Result<Self> {
        let n = names.len();
        if n == 0 {
            return input_err("a group needs at least the identity element");
        }
        if n > MAX_GROUP_ORDER {
            return input_err(format!("group order {n} exceeds the {MAX_GROUP_ORDER} cap"));
        }
        if mul.len() != n || mul.iter().any(|r| r.len() != n) {
            return input_err("multiplication table must be square over the element list");
        }
        if mul.iter().flatten().any(|&x| x >= n) {
            return input_err("multiplication table entry out of range");
        }
        let mut index = HashMap::new();
        for (i, nm) in names.iter().enumerate() {
            if index.insert(nm.clone(), i).is_some() {
                return input_err(format!("duplicate group element name `{nm}`"));
            }
        }
        // identity: the unique two-sided neutral element
        let identity = (0..n)
            .find(|&e| (0..n).all(|a| mul[e][a] == a && mul[a][e] == a))
            .ok_or_else(|| Error::Input("multiplication table has no identity".into()))?;
        // Latin square property
        for a in 0..n {
            let mut seen_row = vec![false; n];
            let mut seen_col = vec![false; n];
            for b in 0..n {
                seen_row[mul[a][b]] = true;
                seen_col[mul[b][a]] = true;
            }
            if seen_row.contains(&false) || seen_col.contains(&false) {
                return input_err("multiplication table is not a Latin square");
            }
        }
        let mut inv = vec![usize::MAX; n];
        for a in 0..n {
            let i = (0..n)
                .find(|&b| mul[a][b] == identity && mul[b][a] == identity)
                .ok_or_else(|| Error::Input(format!("element `{}` has no inverse", names[a])))?;
            inv[a] = i;
        }
        // associativity: exhaustive for small tables, sampled beyond
        if n <= 256 {
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        if mul[mul[a][b]][c] != mul[a][mul[b][c]] {
                            return input_err("multiplication table is not associative");
                        }
                    }
                }
            }
        } else {
            let mut rng = Rng::new(0x5eed);
            for _ in 0..200_000 {
                let (a, b, c) = (rng.below_usize(n), rng.below_usize(n), rng.below_usize(n));
                if mul[mul[a][b]][c] != mul[a][mul[b][c]] {
                    return input_err("multiplication table is not associative");
                }
            }
        }
        Ok(FiniteGroup {
            names,
            mul,
            inv,
            identity,
            index,
        })
    }

    /// Z/n with elements named "0".."n-1".
    pub fn cyclic(n: usize) -> Result<Self> {
        if n == 0 {
            return input_err("cyclic group order must be positive");
        }
        let names = (0..n).map(|i| i.to_string()).collect();
        let mul = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        FiniteGroup::from_table(names, mul)
    }

    /// S_n as permutation words ("213" is the map 1->2, 2->1, 3->3);
    /// product is composition: (s*t)(i) = s(t(i)).
    pub fn symmetric(n: usize) -> Result<Self> {
        if n == 0 || n > 7 {
            return input_err("symmetric groups supported for 1 <= n <= 7");
        }
        let mut perms: Vec<Vec<usize>> = Vec::new();
        permute(&mut (0..n).collect::<Vec<_>>(), 0, &mut perms);
        perms.sort();
        let names: Vec<String> = perms
            .iter()
            .map(|p| p.iter().map(|&x| (x + 1).to_string()).collect::<Vec<_>>().join(""))
            .collect();
        let pos: HashMap<Vec<usize>, usize> =
            perms.iter().enumerate().map(|(i, p)| (p.clone(), i)).collect();
        let mul = perms
            .iter()
            .map(|s| {
                perms
                    .iter()
                    .map(|t| {
                        let st: Vec<usize> = (0..n).map(|i| s[t[i]]).collect();
                        pos[&st]
                    })
                    .collect()
            })
            .collect();
        FiniteGroup::from_table(names, mul)
    }

    /// Direct product with componentwise multiplication; names "(a,b)".
    pub fn product(a: &FiniteGroup, b: &FiniteGroup) -> Result<Self> {
        let n = a.order() * b.order();
        if n > MAX_GROUP_ORDER {
            return input_err(format!("group order {n} exceeds the {MAX_GROUP_ORDER} cap"));
        }
        let mut names = Vec::with_capacity(n);
        for i in 0..a.order() {
            for j in 0..b.order() {
                names.push(format!("({},{})", a.name(i), b.name(j)));
            }
        }
        let idx = |i: usize, j: usize| i * b.order() + j;
        let mut mul = vec![vec![0; n]; n];
        for i1 in 0..a.order() {
            for j1 in 0..b.order() {
                for i2 in 0..a.order() {
                    for j2 in 0..b.order() {
                        mul[idx(i1, j1)][idx(i2, j2)] = idx(a.mul(i1, i2), b.mul(j1, j2));
                    }
                }
            }
        }
        FiniteGroup::from_table(names, mul)
    }

    pub fn order(&self) -> usize {
        self.names.len()
    }
    pub fn identity(&self) -> usize {
        self.identity
    }
    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }
    pub fn element(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a][b]
    }
    pub fn inv(&self, a: usize) -> usize {
        self.inv[a]
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != self.identity {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    pub fn is_abelian(&self) -> bool {
        let n = self.order();
        (0..n).all(|a| (a..n).all(|b| self.mul[a][b] == self.mul[b][a]))
    }

    /// Subgroup generated by a set of elements.
    pub fn generated_by(&self, gens: &[usize]) -> Vec<usize> {
        let mut seen = vec![false; self.order()];
        seen[self.identity] = true;
        let mut stack = vec![self.identity];
        while let Some(x) = stack.pop() {
            for &g in gens {
                for y in [self.mul(x, g), self.mul(g, x)] {
                    if !seen[y] {
                        seen[y] = true;
                        stack.push(y);
                    }
                }
            }
        }
        (0..self.order()).filter(|&i| seen[i]).collect()
    }
}

fn permute(xs: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k == xs.len() {
        out.push(xs.clone());
        return;
    }
    for i in k..xs.len() {
        xs.swap(k, i);
        permute(xs, k + 1, out);
        xs.swap(k, i);
    }
}

/// Galois coordinates: a group element per edge of the base graph.
#[derive(Debug, Clone)]
pub struct GaloisCoordinates {
    pub base: Digraph,
    pub group: FiniteGroup,
    pub assignment: Vec<usize>,
}

impl GaloisCoordinates {
    pub fn new(base: Digraph, group: FiniteGroup, assignment: Vec<usize>) -> Result<Self> {
        if assignment.len() != base.e_count() {
            return input_err("coordinates must assign a group element to every edge");
        }
        if assignment.iter().any(|&a| a >= group.order()) {
            return input_err("coordinate refers to a missing group element");
        }
        Ok(GaloisCoordinates {
            base,
            group,
            assignment,
        })
    }

    /// Uniform, independent, seeded coordinates (deterministic per seed).
    pub fn random(base: Digraph, group: FiniteGroup, seed: u64) -> Self {
        let mut rng = Rng::new(seed);
        let assignment = (0..base.e_count()).map(|_| rng.below_usize(group.order())).collect();
        GaloisCoordinates {
            base,
            group,
            assignment,
        }
    }
}

/// One graph automorphism, as parallel vertex and edge permutations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphAut {
    pub vperm: Vec<usize>,
    pub eperm: Vec<usize>,
}

/// A Galois cover: the total graph, the covering projection, the Galois
/// group, and an explicit simply-transitive right action on fibres.
#[derive(Debug, Clone)]
pub struct GaloisCover {
    pub total: Digraph,
    pub projection: GraphMorphism,
    pub group: FiniteGroup,
    pub action: Vec<GraphAut>,
}

impl GaloisCover {
    /// Definition check: covering projection, automorphisms over the base,
    /// right-action law, and simple transitivity on every fibre.
    pub fn verify(&self) -> Result<()> {
        match classify_morphism(&self.projection) {
            MorphismClass::Covering { degree: Some(d) } if d == self.group.order() => {}
            c => {
                return input_err(format!(
                    "projection is not a covering of degree |G| (got {c:?})"
                ))
            }
        }
        let n = self.group.order();
        if self.action.len() != n {
            return input_err("action must be defined for every group element");
        }
        let g = &self.total;
        for (gi, aut) in self.action.iter().enumerate() {
            // automorphism commuting with heads/tails and the projection
            for e in 0..g.e_count() {
                if g.tail(aut.eperm[e]) != aut.vperm[g.tail(e)]
                    || g.head(aut.eperm[e]) != aut.vperm[g.head(e)]
                {
                    return input_err(format!(
                        "action of `{}` is not a graph morphism",
                        self.group.name(gi)
                    ));
                }
                if self.projection.emap(aut.eperm[e]) != self.projection.emap(e) {
                    return input_err(format!(
                        "action of `{}` does not preserve edge fibres",
                        self.group.name(gi)
                    ));
                }
            }
            for v in 0..g.v_count() {
                if self.projection.vmap(aut.vperm[v]) != self.projection.vmap(v) {
                    return input_err(format!(
                        "action of `{}` does not preserve vertex fibres",
                        self.group.name(gi)
                    ));
                }
            }
        }
        // right action: x.(gh) = (x.g).h -- exhaustive for small groups
        let law_pairs: Vec<(usize, usize)> = if n <= 64 {
            (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).collect()
        } else {
            let mut rng = Rng::new(0xac710);
            (0..4096).map(|_| (rng.below_usize(n), rng.below_usize(n))).collect()
        };
        for (a, b) in law_pairs {
            let ab = self.group.mul(a, b);
            for v in 0..g.v_count() {
                if self.action[ab].vperm[v] != self.action[b].vperm[self.action[a].vperm[v]] {
                    return input_err("action violates the right-action law");
                }
            }
        }
        // simple transitivity on each vertex and edge fibre
        for v in 0..self.projection.target().v_count() {
            let fibre = self.projection.vertex_fibre(v);
            for &x in &fibre {
                let mut images: Vec<usize> = self.action.iter().map(|a| a.vperm[x]).collect();
                images.sort_unstable();
                images.dedup();
                if images.len() != n || !fibre.iter().all(|y| images.binary_search(y).is_ok()) {
                    return input_err("action is not simply transitive on a vertex fibre");
                }
            }
        }
        for e in 0..self.projection.target().e_count() {
            let fibre = self.projection.edge_fibre(e);
            for &x in &fibre {
                let mut images: Vec<usize> = self.action.iter().map(|a| a.eperm[x]).collect();
                images.sort_unstable();
                images.dedup();
                if images.len() != n || !fibre.iter().all(|y| images.binary_search(y).is_ok()) {
                    return input_err("action is not simply transitive on an edge fibre");
                }
            }
        }
        Ok(())
    }

    pub fn degree(&self) -> usize {
        self.group.order()
    }
}

/// Build the cover defined by Galois coordinates: V x G and E x G with
/// tails (te, a) and heads (he, a_e a); the group acts by (P, a)g = (P, ag).
pub fn cover_from_coordinates(coords: &GaloisCoordinates) -> Result<GaloisCover> {
    let base = &coords.base;
    let grp = &coords.group;
    let n = grp.order();
    let vid = |v: usize, a: usize| format!("({},{})", base.vertex_id(v), grp.name(a));
    let eid = |e: usize, a: usize| format!("({},{})", base.edge_id(e), grp.name(a));
    let mut vertices = Vec::with_capacity(base.v_count() * n);
    for v in 0..base.v_count() {
        for a in 0..n {
            vertices.push(vid(v, a));
        }
    }
    let mut edges = Vec::with_capacity(base.e_count() * n);
    for e in 0..base.e_count() {
        for a in 0..n {
            let t = vid(base.tail(e), a);
            let h = vid(base.head(e), grp.mul(coords.assignment[e], a));
            edges.push((eid(e, a), t, h));
        }
    }
    let total = Digraph::new(vertices, edges)?;
    let vmap = (0..base.v_count()).flat_map(|v| std::iter::repeat_n(v, n)).collect();
    let emap = (0..base.e_count()).flat_map(|e| std::iter::repeat_n(e, n)).collect();
    let projection = GraphMorphism::new(total.clone(), base.clone(), vmap, emap)?;
    let action = (0..n)
        .map(|g| GraphAut {
            vperm: (0..base.v_count())
                .flat_map(|v| (0..n).map(move |a| (v, a)))
                .map(|(v, a)| v * n + grp.mul(a, g))
                .collect(),
            eperm: (0..base.e_count())
                .flat_map(|e| (0..n).map(move |a| (e, a)))
                .map(|(e, a)| e * n + grp.mul(a, g))
                .collect(),
        })
        .collect();
    let cover = GaloisCover {
        total,
        projection,
        group: grp.clone(),
        action,
    };
    cover.verify()?;
    Ok(cover)
}

/// Recover Galois coordinates from a cover by fixing an origin in each
/// vertex fibre (the least-index total vertex).
pub fn extract_coordinates(cover: &GaloisCover) -> Result<GaloisCoordinates> {
    let base = cover.projection.target().clone();
    let grp = cover.group.clone();
    let total = &cover.total;
    // coordinate of each total vertex: origin * g
    let mut coord = vec![usize::MAX; total.v_count()];
    for v in 0..base.v_count() {
        let fibre = cover.projection.vertex_fibre(v);
        let origin = *fibre.iter().min().ok_or_else(|| Error::Input("empty vertex fibre".into()))?;
        for g in 0..grp.order() {
            coord[cover.action[g].vperm[origin]] = g;
        }
    }
    if coord.contains(&usize::MAX) {
        return input_err("action is not transitive on some vertex fibre");
    }
    let mut assignment = vec![usize::MAX; base.e_count()];
    for e in 0..total.e_count() {
        let be = cover.projection.emap(e);
        let gt = coord[total.tail(e)];
        let gh = coord[total.head(e)];
        // head coordinate is a_e * (tail coordinate)
        let a_e = grp.mul(gh, grp.inv(gt));
        if assignment[be] == usize::MAX {
            assignment[be] = a_e;
        } else if assignment[be] != a_e {
            return input_err("cover is not Galois: inconsistent edge coordinates");
        }
    }
    GaloisCoordinates::new(base, grp, assignment)
}

/// The Cayley bigraph on a group with two generators: vertices are the
/// group elements; for each g and colour i there is an edge g -> g_i g.
pub fn cayley_bigraph(group: &FiniteGroup, g1: usize, g2: usize) -> Result<Bigraph> {
    let n = group.order();
    if g1 >= n || g2 >= n {
        return input_err("generator index out of range");
    }
    let vertices: Vec<String> = (0..n).map(|i| group.name(i).to_string()).collect();
    let mut edges = Vec::with_capacity(2 * n);
    let mut colours = Vec::with_capacity(2 * n);
    for (colour, gen) in [(Colour::One, g1), (Colour::Two, g2)] {
        for g in 0..n {
            edges.push((
                format!("{}:{}", group.name(g), colour.label()),
                group.name(g).to_string(),
                group.name(group.mul(gen, g)).to_string(),
            ));
            colours.push(colour);
        }
    }
    let graph = Digraph::new(vertices, edges)?;
    Bigraph::new(graph, colours)
}

/// One step of an undirected walk: an edge traversed forward (tail to
/// head) or backward.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WalkStep {
    pub edge: String,
    pub forward: bool,
}

/// Monodromy of a closed walk: the product a_{e_k} ... a_{e_1} with
/// a_{e^-} = a_e^{-1}.
pub fn monodromy(coords: &GaloisCoordinates, basepoint: &str, walk: &[WalkStep]) -> Result<usize> {
    let base = &coords.base;
    let grp = &coords.group;
    let mut at = base
        .vertex_index(basepoint)
        .ok_or_else(|| Error::Input(format!("unknown basepoint `{basepoint}`")))?;
    let mut acc = grp.identity();
    for step in walk {
        let e = base
            .edge_index(&step.edge)
            .ok_or_else(|| Error::Input(format!("unknown edge `{}` in walk", step.edge)))?;
        let (from, to, a) = if step.forward {
            (base.tail(e), base.head(e), coords.assignment[e])
        } else {
            (base.head(e), base.tail(e), grp.inv(coords.assignment[e]))
        };
        if from != at {
            return input_err(format!("walk step `{}` is not incident to the current vertex", step.edge));
        }
        at = to;
        acc = grp.mul(a, acc);
    }
    if at != base.vertex_index(basepoint).unwrap() {
        return input_err("walk is not closed at the basepoint");
    }
    Ok(acc)
}

/// The image of the monodromy map over all of pi_1: the subgroup generated
/// by tree-normalized edge coordinates (equivalently by all walk products).
pub fn monodromy_image(coords: &GaloisCoordinates) -> Vec<usize> {
    // spanning forest via union-find; non-tree edges generate, conjugated
    // by tree paths. Generating the subgroup by all a_path^{-1} a_e a_path
    // is equivalent to generating by the translated coordinates; for the
    // connectivity test (image = G ?) the subgroup generated by
    // { g_h^{-1} a_e g_t } over a spanning-tree gauge is what we need.
    let base = &coords.base;
    let grp = &coords.group;
    // gauge fixing: BFS a spanning forest, assign g_v = product along tree
    // path from the root, i.e. coordinates of the lift of the tree
    let mut g_v: Vec<Option<usize>> = vec![None; base.v_count()];
    let mut queue = std::collections::VecDeque::new();
    for root in 0..base.v_count() {
        if g_v[root].is_some() {
            continue;
        }
        g_v[root] = Some(grp.identity());
        queue.push_back(root);
        while let Some(v) = queue.pop_front() {
            for e in 0..base.e_count() {
                if base.tail(e) == v && g_v[base.head(e)].is_none() {
                    g_v[base.head(e)] = Some(grp.mul(coords.assignment[e], g_v[v].unwrap()));
                    queue.push_back(base.head(e));
                } else if base.head(e) == v && g_v[base.tail(e)].is_none() {
                    g_v[base.tail(e)] =
                        Some(grp.mul(grp.inv(coords.assignment[e]), g_v[v].unwrap()));
                    queue.push_back(base.tail(e));
                }
            }
        }
    }
    let gens: Vec<usize> = (0..base.e_count())
        .map(|e| {
            let gt = g_v[base.tail(e)].unwrap();
            let gh = g_v[base.head(e)].unwrap();
            // normalized coordinate g_h^{-1} a_e g_t; identity on tree edges
            grp.mul(grp.inv(gh), grp.mul(coords.assignment[e], gt))
        })
        .collect();
    grp.generated_by(&gens)
}

/// Gross's normal extension: the subgraph of the d-fold fibre power of G
/// over B induced on pairwise-distinct tuples, Galois over B with group
/// S_d acting by coordinate permutation. Returns the Galois cover over B
/// and the projection onto the first coordinate (a covering of G).
pub fn normal_extension(pi: &GraphMorphism) -> Result<(GaloisCover, GraphMorphism)> {
    let d = match classify_morphism(pi) {
        MorphismClass::Covering { degree: Some(d) } => d,
        c => return input_err(format!("normal extension needs a covering of constant degree, got {c:?}")),
    };
    let g = pi.source();
    let b = pi.target();
    let (_, ncomp) = g.components();
    if ncomp != 1 {
        return input_err("normal extension requires a connected source");
    }
    if d > 5 {
        return input_err("normal extension restricted to coverings of degree <= 5 (S_d action)");
    }
    let tuple_id = |g: &Digraph, xs: &[usize], vertex: bool| {
        let parts: Vec<&str> = xs
            .iter()
            .map(|&x| if vertex { g.vertex_id(x) } else { g.edge_id(x) })
            .collect();
        format!("({})", parts.join(","))
    };
    // vertex tuples: orderings of each vertex fibre
    let mut vertices = Vec::new();
    let mut vkeys: Vec<Vec<usize>> = Vec::new();
    for bv in 0..b.v_count() {
        let fibre = pi.vertex_fibre(bv);
        let mut perms = Vec::new();
        permute(&mut fibre.clone(), 0, &mut perms);
        perms.sort();
        for t in perms {
            vertices.push(tuple_id(g, &t, true));
            vkeys.push(t);
        }
    }
    let vpos: HashMap<Vec<usize>, usize> =
        vkeys.iter().enumerate().map(|(i, k)| (k.clone(), i)).collect();
    let mut edges = Vec::new();
    let mut ekeys: Vec<Vec<usize>> = Vec::new();
    for be in 0..b.e_count() {
        let fibre = pi.edge_fibre(be);
        let mut perms = Vec::new();
        permute(&mut fibre.clone(), 0, &mut perms);
        perms.sort();
        for t in perms {
            let tails: Vec<usize> = t.iter().map(|&e| g.tail(e)).collect();
            let heads: Vec<usize> = t.iter().map(|&e| g.head(e)).collect();
            edges.push((tuple_id(g, &t, false), tuple_id(g, &tails, true), tuple_id(g, &heads, true)));
            ekeys.push(t);
        }
    }
    let omega = Digraph::new(vertices, edges)?;
    let proj_b = GraphMorphism::new(
        omega.clone(),
        b.clone(),
        vkeys.iter().map(|t| pi.vmap(t[0])).collect(),
        ekeys.iter().map(|t| pi.emap(t[0])).collect(),
    )?;
    let proj_g = GraphMorphism::new(
        omega.clone(),
        g.clone(),
        vkeys.iter().map(|t| t[0]).collect(),
        ekeys.iter().map(|t| t[0]).collect(),
    )?;
    let group = FiniteGroup::symmetric(d)?;
    // permutation words back to index vectors
    let perm_of = |name: &str| -> Vec<usize> {
        name.chars().map(|c| c.to_digit(10).unwrap() as usize - 1).collect()
    };
    let mut action = Vec::with_capacity(group.order());
    for gi in 0..group.order() {
        let sigma = perm_of(group.name(gi));
        let vperm = vkeys
            .iter()
            .map(|t| {
                let moved: Vec<usize> = (0..d).map(|i| t[sigma[i]]).collect();
                vpos[&moved]
            })
            .collect();
        let epos: HashMap<Vec<usize>, usize> =
            ekeys.iter().enumerate().map(|(i, k)| (k.clone(), i)).collect();
        let eperm = ekeys
            .iter()
            .map(|t| {
                let moved: Vec<usize> = (0..d).map(|i| t[sigma[i]]).collect();
                epos[&moved]
            })
            .collect();
        action.push(GraphAut { vperm, eperm });
    }
    let cover = GaloisCover {
        total: omega,
        projection: proj_b,
        group,
        action,
    };
    cover.verify()?;
    Ok((cover, proj_g))
}

/// All characters of an abelian group into GF(q)*, each as the vector of
/// values indexed by element. Requires the full dual: errors unless the
/// field supplies |G| distinct |G|-th roots of unity.
pub fn characters(group: &FiniteGroup, field: PrimeField) -> Result<Vec<Vec<u64>>> {
    if !group.is_abelian() {
        return input_err("characters are defined here only for abelian groups");
    }
    let n = group.order() as u64;
    let roots = field.roots_of_unity(n);
    if roots.len() as u64 != n {
        return input_err(format!(
            "GF({}) lacks {n} distinct {n}-th roots of unity ({n} must divide p-1)",
            field.modulus()
        ));
    }
    // greedy generating sequence
    let mut gens: Vec<usize> = Vec::new();
    let mut covered = vec![group.identity()];
    for x in 0..group.order() {
        if !covered.contains(&x) {
            gens.push(x);
            covered = group.generated_by(&gens);
        }
    }
    let mut out: Vec<Vec<u64>> = Vec::new();
    let mut images = vec![0u64; gens.len()];
    fn assign(
        k: usize,
        gens: &[usize],
        images: &mut Vec<u64>,
        group: &FiniteGroup,
        field: PrimeField,
        out: &mut Vec<Vec<u64>>,
    ) {
        if k == gens.len() {
            // close over products from the identity; conflict -> skip
            let mut chi: Vec<Option<u64>> = vec![None; group.order()];
            chi[group.identity()] = Some(1);
            let mut changed = true;
            while changed {
                changed = false;
                for a in 0..group.order() {
                    let Some(va) = chi[a] else { continue };
                    for (gi, &g) in gens.iter().enumerate() {
                        let ga = group.mul(g, a);
                        let v = field.mul(images[gi], va);
                        match chi[ga] {
                            None => {
                                chi[ga] = Some(v);
                                changed = true;
                            }
                            Some(old) if old != v => return,
                            _ => {}
                        }
                    }
                }
            }
            if chi.iter().any(|c| c.is_none()) {
                return;
            }
            let flat: Vec<u64> = chi.into_iter().map(|c| c.unwrap()).collect();
            // multiplicativity check over all pairs
            for a in 0..group.order() {
                for b in 0..group.order() {
                    if flat[group.mul(a, b)] != field.mul(flat[a], flat[b]) {
                        return;
                    }
                }
            }
            if !out.contains(&flat) {
                out.push(flat);
            }
            return;
        }
        let ord = group.element_order(gens[k]) as u64;
        for x in field.roots_of_unity(ord) {
            images[k] = x;
            assign(k + 1, gens, images, group, field, out);
        }
    }
    assign(0, &gens, &mut images, group, field, &mut out);
    out.sort();
    if out.len() as u64 != n {
        return input_err(format!("expected {n} characters, found {}", out.len()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digraph::{fibre_product, invariants, isomorphic};

    #[test]
    fn cyclic_group_basics() {
        let g = FiniteGroup::cyclic(6).unwrap();
        assert_eq!(g.order(), 6);
        assert_eq!(g.identity(), 0);
        assert_eq!(g.mul(4, 5), 3);
        assert_eq!(g.inv(2), 4);
        assert!(g.is_abelian());
        assert_eq!(g.element_order(2), 3);
    }

    #[test]
    fn symmetric_group_basics() {
        let s3 = FiniteGroup::symmetric(3).unwrap();
        assert_eq!(s3.order(), 6);
        assert!(!s3.is_abelian());
        let s2 = FiniteGroup::symmetric(2).unwrap();
        assert!(s2.is_abelian());
    }

    #[test]
    fn product_group() {
        let z2 = FiniteGroup::cyclic(2).unwrap();
        let g = FiniteGroup::product(&z2, &z2).unwrap();
        assert_eq!(g.order(), 4);
        assert!(g.is_abelian());
        assert!((0..4).all(|a| g.mul(a, a) == g.identity()));
    }

    #[test]
    fn bad_tables_rejected() {
        // non-associative Latin square (order 5 loop)
        let names: Vec<String> = (0..5).map(|i| i.to_string()).collect();
        let mul = vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 4, 0, 1, 3],
            vec![3, 2, 4, 0, 1],
            vec![4, 3, 1, 2, 0],
        ];
        assert!(FiniteGroup::from_table(names, mul).is_err());
    }

    #[test]
    fn trivial_coordinates_give_disjoint_copies() {
        let base = Digraph::bouquet(2);
        let grp = FiniteGroup::cyclic(3).unwrap();
        let coords = GaloisCoordinates::new(base.clone(), grp, vec![0, 0]).unwrap();
        let cover = cover_from_coordinates(&coords).unwrap();
        let inv = invariants(&cover.total);
        assert_eq!(inv.h0, 3);
        // each component is a copy of B2
        assert_eq!(cover.total.v_count(), 3);
        assert_eq!(cover.total.e_count(), 6);
    }

    #[test]
    fn mixed_coordinates_connected_iff_monodromy_onto() {
        let base = Digraph::bouquet(2);
        let grp = FiniteGroup::cyclic(2).unwrap();
        let coords = GaloisCoordinates::new(base.clone(), grp, vec![1, 0]).unwrap();
        let img = monodromy_image(&coords);
        assert_eq!(img.len(), 2);
        let cover = cover_from_coordinates(&coords).unwrap();
        assert_eq!(invariants(&cover.total).h0, 1);
        assert!(matches!(
            classify_morphism(&cover.projection),
            MorphismClass::Covering { degree: Some(2) }
        ));
    }

    #[test]
    fn monodromy_of_walks() {
        let base = Digraph::bouquet(2);
        let grp = FiniteGroup::cyclic(4).unwrap();
        let coords = GaloisCoordinates::new(base, grp, vec![1, 2]).unwrap();
        let w = |steps: &[(&str, bool)]| {
            steps
                .iter()
                .map(|&(e, f)| WalkStep {
                    edge: e.to_string(),
                    forward: f,
                })
                .collect::<Vec<_>>()
        };
        assert_eq!(monodromy(&coords, "v", &w(&[("e1", true)])).unwrap(), 1);
        assert_eq!(monodromy(&coords, "v", &w(&[("e1", true), ("e2", true)])).unwrap(), 3);
        assert_eq!(monodromy(&coords, "v", &w(&[("e2", false)])).unwrap(), 2);
        // identity coordinates: identity monodromy for every loop
        let base = Digraph::bouquet(2);
        let trivial =
            GaloisCoordinates::new(base, FiniteGroup::cyclic(4).unwrap(), vec![0, 0]).unwrap();
        assert_eq!(monodromy(&trivial, "v", &w(&[("e1", true), ("e1", true), ("e2", false)])).unwrap(), 0);
    }

    #[test]
    fn tree_normalized_coordinates_have_trivial_tree_loops() {
        // coordinates that are the identity on a spanning tree: any loop
        // staying inside the tree has identity monodromy
        let base = Digraph::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec![
                ("t1".into(), "a".into(), "b".into()),
                ("t2".into(), "b".into(), "c".into()),
                ("x".into(), "c".into(), "a".into()),
            ],
        )
        .unwrap();
        let grp = FiniteGroup::cyclic(5).unwrap();
        // t1, t2 span; x carries the only nontrivial coordinate
        let coords = GaloisCoordinates::new(base, grp, vec![0, 0, 3]).unwrap();
        let w = |steps: &[(&str, bool)]| {
            steps
                .iter()
                .map(|&(e, f)| WalkStep {
                    edge: e.to_string(),
                    forward: f,
                })
                .collect::<Vec<_>>()
        };
        // tree-only loop: out and back
        let tree_loop = w(&[("t1", true), ("t2", true), ("t2", false), ("t1", false)]);
        assert_eq!(monodromy(&coords, "a", &tree_loop).unwrap(), 0);
        // the fundamental loop picks up the non-tree coordinate
        let cycle = w(&[("t1", true), ("t2", true), ("x", true)]);
        assert_eq!(monodromy(&coords, "a", &cycle).unwrap(), 3);
    }

    #[test]
    fn coordinate_change_conjugates_monodromy() {
        // translate origins by g_v: a_e -> g_{he}^{-1} a_e g_{te}
        let base = Digraph::new(
            vec!["a".into(), "b".into()],
            vec![
                ("e1".into(), "a".into(), "b".into()),
                ("e2".into(), "b".into(), "a".into()),
                ("e3".into(), "a".into(), "a".into()),
            ],
        )
        .unwrap();
        let grp = FiniteGroup::symmetric(3).unwrap();
        let mut rng = Rng::new(99);
        for _ in 0..20 {
            let coords = GaloisCoordinates::random(base.clone(), grp.clone(), rng.next_u64());
            let g_of: Vec<usize> = (0..2).map(|_| rng.below_usize(grp.order())).collect();
            let translated: Vec<usize> = (0..3)
                .map(|e| {
                    let gt = g_of[base.tail(e)];
                    let gh = g_of[base.head(e)];
                    grp.mul(grp.inv(gh), grp.mul(coords.assignment[e], gt))
                })
                .collect();
            let coords2 = GaloisCoordinates::new(base.clone(), grp.clone(), translated).unwrap();
            let walk = vec![
                WalkStep { edge: "e1".into(), forward: true },
                WalkStep { edge: "e2".into(), forward: true },
                WalkStep { edge: "e3".into(), forward: false },
            ];
            let m1 = monodromy(&coords, "a", &walk).unwrap();
            let m2 = monodromy(&coords2, "a", &walk).unwrap();
            // m2 = g_a^{-1} m1 g_a
            assert_eq!(m2, grp.mul(grp.inv(g_of[0]), grp.mul(m1, g_of[0])));
        }
    }

    #[test]
    fn extract_coordinates_round_trip() {
        let base = Digraph::bouquet(2);
        let grp = FiniteGroup::cyclic(3).unwrap();
        let coords = GaloisCoordinates::random(base, grp, 5);
        let cover = cover_from_coordinates(&coords).unwrap();
        let got = extract_coordinates(&cover).unwrap();
        let rebuilt = cover_from_coordinates(&got).unwrap();
        assert!(isomorphic(&cover.total, &rebuilt.total));
    }

    #[test]
    fn cayley_z2_pair_of_generators() {
        let z2 = FiniteGroup::cyclic(2).unwrap();
        let c = cayley_bigraph(&z2, 1, 1).unwrap();
        assert_eq!(c.graph().v_count(), 2);
        assert_eq!(c.graph().e_count(), 4);
        let inv = invariants(c.graph());
        assert_eq!(inv.rho, 2);
        for v in 0..2 {
            assert_eq!(c.graph().out_edges(v).len(), 2);
            assert_eq!(c.graph().in_edges(v).len(), 2);
        }
        assert!(matches!(
            classify_morphism(&c.to_b2_morphism()),
            MorphismClass::Covering { degree: Some(2) }
        ));
    }

    #[test]
    fn cayley_z3_colour_two_realizes_plus_two() {
        let z3 = FiniteGroup::cyclic(3).unwrap();
        let c = cayley_bigraph(&z3, 1, 2).unwrap();
        let g = c.graph();
        for e in 0..g.e_count() {
            if c.colour(e) == Colour::Two {
                let t: usize = g.vertex_id(g.tail(e)).parse().unwrap();
                let h: usize = g.vertex_id(g.head(e)).parse().unwrap();
                assert_eq!((t + 2) % 3, h);
            }
        }
    }

    #[test]
    fn galois_cover_self_product_decomposes() {
        let base = Digraph::bouquet(2);
        let grp = FiniteGroup::cyclic(2).unwrap();
        let coords = GaloisCoordinates::new(base, grp, vec![1, 0]).unwrap();
        let cover = cover_from_coordinates(&coords).unwrap();
        let (prod, _, _) = fibre_product(&cover.projection, &cover.projection).unwrap();
        let inv = invariants(&prod);
        assert_eq!(inv.h0, 2);
        // each component isomorphic to the cover
        let (comp, n) = prod.components();
        for c in 0..n {
            let vs: Vec<usize> = (0..prod.v_count()).filter(|&v| comp[v] == c).collect();
            let es: Vec<usize> = (0..prod.e_count()).filter(|&e| comp[prod.tail(e)] == c).collect();
            let sub = prod.subgraph(&vs, &es).unwrap();
            assert!(isomorphic(&sub, &cover.total));
        }
    }

    #[test]
    fn normal_extension_identity_cover() {
        let b2 = Digraph::bouquet(2);
        let id = GraphMorphism::identity(&b2);
        let (cover, mu) = normal_extension(&id).unwrap();
        assert_eq!(cover.degree(), 1);
        assert!(isomorphic(&cover.total, &b2));
        assert!(matches!(classify_morphism(&mu), MorphismClass::Covering { degree: Some(1) }));
    }

    #[test]
    fn normal_extension_degree_two() {
        // connected degree-2 cover of B2
        let base = Digraph::bouquet(2);
        let grp = FiniteGroup::cyclic(2).unwrap();
        let coords = GaloisCoordinates::new(base, grp, vec![1, 0]).unwrap();
        let cover = cover_from_coordinates(&coords).unwrap();
        let (omega, mu) = normal_extension(&cover.projection).unwrap();
        assert_eq!(omega.group.order(), 2); // S_2
        assert_eq!(omega.total.v_count(), 2); // 2 orderings of one fibre
        assert!(matches!(classify_morphism(&mu), MorphismClass::Covering { .. }));
    }

    #[test]
    fn normal_extension_degree_three_has_six_element_fibres() {
        let base = Digraph::bouquet(2);
        let grp = FiniteGroup::cyclic(3).unwrap();
        let coords = GaloisCoordinates::new(base, grp, vec![1, 0]).unwrap();
        let cover = cover_from_coordinates(&coords).unwrap();
        let (omega, _) = normal_extension(&cover.projection).unwrap();
        assert_eq!(omega.group.order(), 6);
        assert_eq!(omega.total.v_count(), 6);
        assert_eq!(omega.projection.vertex_fibre(0).len(), 6);
    }

    #[test]
    fn characters_of_small_abelian_groups() {
        let f101 = PrimeField::new(101).unwrap();
        let z2 = FiniteGroup::cyclic(2).unwrap();
        let chars = characters(&z2, f101).unwrap();
        assert_eq!(chars.len(), 2);
        assert!(chars.contains(&vec![1, 1]));
        assert!(chars.contains(&vec![1, 100]));
        let z4 = FiniteGroup::cyclic(4).unwrap();
        assert_eq!(characters(&z4, f101).unwrap().len(), 4);
        let zz = FiniteGroup::product(&z2, &z2).unwrap();
        assert_eq!(characters(&zz, f101).unwrap().len(), 4);
        // q = 7: no 4th roots of unity beyond +-1
        let f7 = PrimeField::new(7).unwrap();
        assert!(characters(&z4, f7).is_err());
        let z3 = FiniteGroup::cyclic(3).unwrap();
        assert_eq!(characters(&z3, f7).unwrap().len(), 3);
    }

    #[test]
    fn random_coordinates_deterministic() {
        let base = Digraph::bouquet(2);
        let grp = FiniteGroup::cyclic(4).unwrap();
        let a = GaloisCoordinates::random(base.clone(), grp.clone(), 33);
        let b = GaloisCoordinates::random(base, grp, 33);
        assert_eq!(a.assignment, b.assignment);
    }
}
