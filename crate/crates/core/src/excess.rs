//! Excess and maximum excess: head/tail neighbourhoods of
//! compartmentalized subspaces, the brute-force oracle over GF(2)/GF(3),
//! the edge-simple shortcut, and the pullback method through a cover of
//! large Abelian girth.

use crate::digraph::{classify_morphism, girths, Digraph, GirthBound, GraphMorphism, MorphismClass};
use crate::error::{budget_err, input_err, Error, Result};
use crate::linalg::{enumerate_subspaces, Matrix, PrimeField, Subspace};
use crate::rng::Rng;
use crate::sheaf::{pullback, subsheaf_from_subspaces, Sheaf};
use crate::twisted::{twisted_betti, TwistedBetti};

/// A compartmentalized subspace of F(V): one subspace per vertex value
/// space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompartmentalizedSubspace {
    per_vertex: Vec<Subspace>,
}

impl CompartmentalizedSubspace {
    pub fn new(s: &Sheaf, per_vertex: Vec<Subspace>) -> Result<Self> {
        if per_vertex.len() != s.base().v_count() {
            return input_err("need one subspace per vertex");
        }
        for (v, u) in per_vertex.iter().enumerate() {
            if u.ambient_dim() != s.vdim(v) || u.field() != s.field() {
                return Err(Error::Input(format!(
                    "subspace at `{}` lives in the wrong space",
                    s.base().vertex_id(v)
                )));
            }
        }
        Ok(CompartmentalizedSubspace { per_vertex })
    }

    pub fn zero(s: &Sheaf) -> Self {
        CompartmentalizedSubspace {
            per_vertex: (0..s.base().v_count())
                .map(|v| Subspace::zero(s.field(), s.vdim(v)))
                .collect(),
        }
    }

    pub fn full(s: &Sheaf) -> Self {
        CompartmentalizedSubspace {
            per_vertex: (0..s.base().v_count())
                .map(|v| Subspace::full(s.field(), s.vdim(v)))
                .collect(),
        }
    }

    pub fn at(&self, v: usize) -> &Subspace {
        &self.per_vertex[v]
    }

    pub fn dim(&self) -> usize {
        self.per_vertex.iter().map(|u| u.dim()).sum()
    }

    /// Vertexwise sum.
    pub fn sum(&self, other: &Self) -> Result<Self> {
        let per_vertex = self
            .per_vertex
            .iter()
            .zip(&other.per_vertex)
            .map(|(a, b)| a.sum(b))
            .collect::<Result<_>>()?;
        Ok(CompartmentalizedSubspace { per_vertex })
    }

    /// Vertexwise intersection.
    pub fn intersection(&self, other: &Self) -> Result<Self> {
        let per_vertex = self
            .per_vertex
            .iter()
            .zip(&other.per_vertex)
            .map(|(a, b)| a.intersection(b))
            .collect::<Result<_>>()?;
        Ok(CompartmentalizedSubspace { per_vertex })
    }
}

/// A dimension profile on a graph: a count per vertex and edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DimensionProfile {
    pub vertex: Vec<usize>,
    pub edge: Vec<usize>,
}

impl DimensionProfile {
    pub fn of_sheaf(s: &Sheaf) -> Self {
        let (vertex, edge) = s.dimension_profile();
        DimensionProfile { vertex, edge }
    }

    pub fn chi(&self) -> i64 {
        self.vertex.iter().sum::<usize>() as i64 - self.edge.iter().sum::<usize>() as i64
    }

    pub fn total(&self) -> usize {
        self.vertex.iter().sum::<usize>() + self.edge.iter().sum::<usize>()
    }
}

/// Per-edge head/tail neighbourhood dimensions and the excess of U.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GammaExcess {
    pub gamma_dims: Vec<usize>,
    pub excess: i64,
}

/// Gamma_ht(U) per edge: the kernel of F(e) -> F(he)/U(he) + F(te)/U(te),
/// and excess(U) = sum_e dim Gamma - sum_v dim U(v).
pub fn gamma_excess(s: &Sheaf, u: &CompartmentalizedSubspace) -> Result<GammaExcess> {
    if u.per_vertex.len() != s.base().v_count() {
        return input_err("subspace does not match the sheaf base");
    }
    let quots: Vec<Matrix> = (0..s.base().v_count()).map(|v| u.at(v).quotient_map()).collect();
    let mut gamma_dims = Vec::with_capacity(s.base().e_count());
    for e in 0..s.base().e_count() {
        gamma_dims.push(gamma_dim_for_edge(s, e, &quots[s.base().head(e)], &quots[s.base().tail(e)]));
    }
    let excess = gamma_dims.iter().sum::<usize>() as i64 - u.dim() as i64;
    Ok(GammaExcess { gamma_dims, excess })
}

fn gamma_dim_for_edge(s: &Sheaf, e: usize, head_quot: &Matrix, tail_quot: &Matrix) -> usize {
    let stacked = head_quot.mul(s.head_map(e)).vstack(&tail_quot.mul(s.tail_map(e)));
    s.edim(e) - stacked.rank()
}

/// Basis of Gamma_ht(U) at one edge, as a subspace of F(e).
pub fn gamma_subspace(s: &Sheaf, u: &CompartmentalizedSubspace, e: usize) -> Subspace {
    let hq = u.at(s.base().head(e)).quotient_map();
    let tq = u.at(s.base().tail(e)).quotient_map();
    let stacked = hq.mul(s.head_map(e)).vstack(&tq.mul(s.tail_map(e)));
    Subspace::span(&stacked.kernel_basis())
}

/// Method selection for maximum excess.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaxExcessMethod {
    /// Exhaustive enumeration of compartmentalized subspaces over GF(2) or
    /// GF(3).
    Brute,
    /// Twisted Betti number; valid when every edge dimension is <= 1.
    EdgeSimple,
    /// h1_twist of the pullback along a verified cover of Abelian girth
    /// at least 2(dim F(V) + dim F(E)) + 1, divided by the degree.
    Pullback,
    /// Cheapest certified method first: edge-simple, then brute, then
    /// pullback.
    Auto,
}

/// Certificate attached to a maximum-excess value.
#[derive(Debug, Clone)]
pub enum MaxExcessCertificate {
    /// A witness subspace achieving the maximum.
    BruteWitness(CompartmentalizedSubspace),
    /// The twisted report backing the edge-simple equality.
    EdgeSimple(TwistedBetti),
    /// The verified cover: its degree and the twisted report upstairs.
    Pullback {
        degree: usize,
        cover: Box<GraphMorphism>,
        upstairs: TwistedBetti,
    },
}

#[derive(Debug, Clone)]
pub struct MaxExcess {
    pub value: usize,
    pub method: &'static str,
    pub certificate: MaxExcessCertificate,
}

/// Options for the maximum-excess drivers.
#[derive(Debug, Clone)]
pub struct MaxExcessOptions {
    /// Cap on the number of enumerated subspace tuples.
    pub budget: u64,
    /// Samples and seed for twisted-Betti backed methods.
    pub samples: usize,
    pub seed: u64,
    /// Cover search limits for the pullback method.
    pub cover_max_degree: usize,
    pub cover_candidates_per_degree: usize,
}

impl Default for MaxExcessOptions {
    fn default() -> Self {
        MaxExcessOptions {
            budget: 1_000_000,
            samples: 3,
            seed: 0,
            cover_max_degree: 256,
            cover_candidates_per_degree: 8,
        }
    }
}

pub fn max_excess(s: &Sheaf, method: MaxExcessMethod, opts: &MaxExcessOptions) -> Result<MaxExcess> {
    match method {
        MaxExcessMethod::Brute => max_excess_brute(s, opts.budget),
        MaxExcessMethod::EdgeSimple => max_excess_edge_simple(s, opts),
        MaxExcessMethod::Pullback => max_excess_pullback(s, opts),
        MaxExcessMethod::Auto => {
            let edge_simple_ok = (0..s.base().e_count()).all(|e| s.edim(e) <= 1)
                && (s.field().modulus() > 3 || s.has_zero_one_data());
            if edge_simple_ok {
                max_excess_edge_simple(s, opts)
            } else if brute_applicable(s, opts.budget) {
                max_excess_brute(s, opts.budget)
            } else {
                max_excess_pullback(s, opts)
            }
        }
    }
}

fn brute_applicable(s: &Sheaf, budget: u64) -> bool {
    let q = s.field().modulus();
    if q != 2 && q != 3 {
        return false;
    }
    if (0..s.base().v_count()).any(|v| s.vdim(v) > 4) {
        return false;
    }
    tuple_space_size(s, budget).is_some()
}

fn tuple_space_size(s: &Sheaf, budget: u64) -> Option<u64> {
    let q = s.field().modulus();
    let mut total: u64 = 1;
    for v in 0..s.base().v_count() {
        let count = subspace_count(q, s.vdim(v))?;
        total = total.checked_mul(count)?;
        if total > budget {
            return None;
        }
    }
    Some(total)
}

fn subspace_count(q: u64, d: usize) -> Option<u64> {
    // Gaussian binomial sums for d <= 4 at q in {2, 3}
    let table2 = [1u64, 2, 5, 16, 67];
    let table3 = [1u64, 2, 6, 28, 212];
    match q {
        2 => table2.get(d).copied(),
        3 => table3.get(d).copied(),
        _ => None,
    }
}

fn thread_count() -> usize {
    let available = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    match std::env::var("SHEAFLAB_THREADS") {
        Ok(v) => v.parse::<usize>().ok().filter(|&n| n > 0).unwrap_or(available).min(available),
        Err(_) => available.min(8),
    }
}

/// Exhaustive maximum excess over all compartmentalized subspaces.
/// Deterministic regardless of thread count: the winner is the maximal
/// excess with the lexicographically least tuple index.
pub fn max_excess_brute(s: &Sheaf, budget: u64) -> Result<MaxExcess> {
    let q = s.field().modulus();
    if q != 2 && q != 3 {
        return input_err(format!("brute enumeration requires GF(2) or GF(3), got GF({q})"));
    }
    let nv = s.base().v_count();
    let per_vertex: Vec<Vec<Subspace>> = (0..nv)
        .map(|v| enumerate_subspaces(s.field(), s.vdim(v)))
        .collect::<Result<_>>()?;
    let counts: Vec<u64> = per_vertex.iter().map(|c| c.len() as u64).collect();
    let total = counts.iter().try_fold(1u64, |acc, &c| acc.checked_mul(c)).unwrap_or(u64::MAX);
    if total > budget {
        return budget_err(format!("{total} subspace tuples exceed the budget of {budget}"));
    }
    // per-edge gamma dimension tables indexed by (head choice, tail choice)
    let quot_tables: Vec<Vec<Matrix>> = per_vertex
        .iter()
        .map(|subs| subs.iter().map(|u| u.quotient_map()).collect())
        .collect();
    let dim_tables: Vec<Vec<usize>> = per_vertex
        .iter()
        .map(|subs| subs.iter().map(|u| u.dim()).collect())
        .collect();
    let mut gamma_tables: Vec<Vec<usize>> = Vec::with_capacity(s.base().e_count());
    for e in 0..s.base().e_count() {
        let (h, t) = (s.base().head(e), s.base().tail(e));
        let mut table = vec![0usize; (counts[h] * counts[t]) as usize];
        for ch in 0..counts[h] as usize {
            for ct in 0..counts[t] as usize {
                table[ch * counts[t] as usize + ct] =
                    gamma_dim_for_edge(s, e, &quot_tables[h][ch], &quot_tables[t][ct]);
            }
        }
        gamma_tables.push(table);
    }
    let decode = |mut idx: u64, out: &mut Vec<usize>| {
        out.clear();
        for &c in counts.iter().rev() {
            out.push((idx % c) as usize);
            idx /= c;
        }
        out.reverse();
    };
    let evaluate = |choice: &[usize]| -> i64 {
        let mut excess: i64 = 0;
        for v in 0..nv {
            excess -= dim_tables[v][choice[v]] as i64;
        }
        for e in 0..s.base().e_count() {
            let (h, t) = (s.base().head(e), s.base().tail(e));
            excess += gamma_tables[e][choice[h] * counts[t] as usize + choice[t]] as i64;
        }
        excess
    };
    let workers = thread_count().min(((total / 4096) + 1) as usize).max(1);
    let chunk = total.div_ceil(workers as u64);
    let mut results: Vec<(i64, u64)> = Vec::with_capacity(workers);
    std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for w in 0..workers {
            let lo = w as u64 * chunk;
            let hi = ((w as u64 + 1) * chunk).min(total);
            let evaluate = &evaluate;
            let decode = &decode;
            handles.push(scope.spawn(move || {
                let mut best = (i64::MIN, u64::MAX);
                let mut choice = Vec::new();
                for idx in lo..hi {
                    decode(idx, &mut choice);
                    let x = evaluate(&choice);
                    if x > best.0 {
                        best = (x, idx);
                    }
                }
                best
            }));
        }
        for h in handles {
            results.push(h.join().expect("brute worker panicked"));
        }
    });
    let (best_val, best_idx) = results
        .into_iter()
        .fold((i64::MIN, u64::MAX), |acc, x| {
            if x.0 > acc.0 || (x.0 == acc.0 && x.1 < acc.1) {
                x
            } else {
                acc
            }
        });
    let mut choice = Vec::new();
    decode(best_idx, &mut choice);
    let witness = CompartmentalizedSubspace {
        per_vertex: choice.iter().enumerate().map(|(v, &c)| per_vertex[v][c].clone()).collect(),
    };
    debug_assert_eq!(gamma_excess(s, &witness)?.excess, best_val);
    // the zero subspace has excess 0, so the maximum is never negative
    Ok(MaxExcess {
        value: best_val.max(0) as usize,
        method: "brute",
        certificate: MaxExcessCertificate::BruteWitness(witness),
    })
}

/// Maximum excess of an edge-simple sheaf (every edge dimension <= 1) via
/// the twisted Betti number. Small-field sheaves with 0/1 data are lifted
/// to the default big prime for the sampling.
pub fn max_excess_edge_simple(s: &Sheaf, opts: &MaxExcessOptions) -> Result<MaxExcess> {
    if (0..s.base().e_count()).any(|e| s.edim(e) > 1) {
        return input_err("edge-simple method requires every edge dimension <= 1");
    }
    let p = s.field().modulus();
    let lifted;
    let target = if p <= 3 {
        if !s.has_zero_one_data() {
            return input_err(
                "edge-simple over a small field needs 0/1 restriction data to lift",
            );
        }
        lifted = s.reinterpret(PrimeField::default_field());
        &lifted
    } else {
        s
    };
    let tb = twisted_betti(target, opts.samples, opts.seed)?;
    Ok(MaxExcess {
        value: tb.h1t,
        method: "edge-simple",
        certificate: MaxExcessCertificate::EdgeSimple(tb),
    })
}

/// Maximum excess via pullback: find a cover of Abelian girth at least
/// 2(dim F(V) + dim F(E)) + 1, pull back, and divide h1_twist by the
/// degree. The division is exact; a remainder means the cover was not
/// verified and is an internal error.
pub fn max_excess_pullback(s: &Sheaf, opts: &MaxExcessOptions) -> Result<MaxExcess> {
    let bound = 2 * (s.total_vdim() + s.total_edim()) + 1;
    let cover = high_abelian_girth_cover(
        s.base(),
        bound,
        &CoverSearchBudget {
            max_degree: opts.cover_max_degree,
            candidates_per_degree: opts.cover_candidates_per_degree,
            seed: opts.seed,
        },
    )?;
    let degree = match classify_morphism(&cover) {
        MorphismClass::Covering { degree: Some(d) } => d,
        _ => return Err(Error::Internal("cover search returned a non-covering".into())),
    };
    let p = s.field().modulus();
    let lifted;
    let target = if p <= 3 {
        if !s.has_zero_one_data() {
            return input_err("pullback method over a small field needs 0/1 restriction data");
        }
        lifted = s.reinterpret(PrimeField::default_field());
        &lifted
    } else {
        s
    };
    let pulled = pullback(&cover, target)?;
    let tb = twisted_betti(&pulled, opts.samples, opts.seed)?;
    if tb.h1t % degree != 0 {
        return Err(Error::Internal(format!(
            "pullback h1_twist {} not divisible by degree {degree}; cover unverified",
            tb.h1t
        )));
    }
    Ok(MaxExcess {
        value: tb.h1t / degree,
        method: "pullback",
        certificate: MaxExcessCertificate::Pullback {
            degree,
            cover: Box::new(cover),
            upstairs: tb,
        },
    })
}

/// Budget for the randomized cover search.
#[derive(Debug, Clone)]
pub struct CoverSearchBudget {
    pub max_degree: usize,
    pub candidates_per_degree: usize,
    pub seed: u64,
}

/// Search for a covering of `g` whose Abelian girth is at least `bound`.
///
/// Any cycle of the universal Abelian cover projects to a closed
/// non-backtracking walk whose support has first Betti number at least 2
/// and every edge used at least twice, so the Abelian girth of a graph is
/// at least three times its girth. The search therefore drives the
/// ordinary girth of random permutation covers up to ceil(bound/3) by
/// local surgery (re-matching one sheet of an edge on a short cycle), and
/// every accepted candidate is still verified by the bounded BFS oracle on
/// the universal Abelian cover. Fails with the best Abelian girth seen
/// when the budget is exhausted.
pub fn high_abelian_girth_cover(g: &Digraph, bound: usize, budget: &CoverSearchBudget) -> Result<GraphMorphism> {
    if bound == 0 {
        return Ok(GraphMorphism::identity(g));
    }
    // the identity cover may already qualify (e.g. B1 for any bound, B2
    // for bound <= 4)
    let (_, ab) = girths(g, bound.saturating_sub(1).max(1))?;
    if bound == 1 || ab.at_least(bound) {
        return Ok(GraphMorphism::identity(g));
    }
    let target_girth = bound.div_ceil(3);
    let mut best_seen: Option<usize> = match ab {
        GirthBound::Finite(x) => Some(x),
        GirthBound::ExceedsBound => None,
    };
    // a cover hosting girth g needs on the order of 3^(g/2) vertices;
    // start with headroom so the girth surgery is not fighting at the
    // extremal size
    let moore = 2 * 3usize.saturating_pow(target_girth.div_ceil(2) as u32);
    let mut degree = moore
        .div_ceil(g.v_count().max(1))
        .next_power_of_two()
        .clamp(8, budget.max_degree);
    while degree <= budget.max_degree {
        for attempt in 0..budget.candidates_per_degree {
            let mut rng = Rng::derive(budget.seed, (degree * 131 + attempt) as u64);
            let mut perms = PermCover::random(g, degree, &mut rng);
            perms.surgery(target_girth, 400 + 40 * degree, &mut rng);
            if perms.short_cycle(target_girth - 1).is_some() {
                continue; // surgery stalled; not worth the Abelian oracle
            }
            let cover = perms.into_morphism(g)?;
            let (_, ab) = girths(cover.source(), bound - 1)?;
            match ab {
                GirthBound::ExceedsBound => return Ok(cover),
                GirthBound::Finite(x) => {
                    best_seen = Some(best_seen.map_or(x, |b| b.max(x)));
                }
            }
        }
        degree *= 2;
    }
    budget_err(format!(
        "no cover of Abelian girth >= {bound} found up to degree {} (best Abelian girth seen: {})",
        budget.max_degree,
        best_seen.map_or_else(|| "none".to_string(), |b| b.to_string())
    ))
}

/// A permutation cover under construction: one sheet permutation per base
/// edge.
struct PermCover<'a> {
    base: &'a Digraph,
    degree: usize,
    perms: Vec<Vec<usize>>,
    out_inc: Vec<Vec<usize>>,
    in_inc: Vec<Vec<usize>>,
}

impl<'a> PermCover<'a> {
    fn random(base: &'a Digraph, degree: usize, rng: &mut Rng) -> Self {
        let perms = (0..base.e_count())
            .map(|_| {
                let mut p: Vec<usize> = (0..degree).collect();
                rng.shuffle(&mut p);
                p
            })
            .collect();
        PermCover {
            base,
            degree,
            perms,
            out_inc: (0..base.v_count()).map(|v| base.out_edges(v)).collect(),
            in_inc: (0..base.v_count()).map(|v| base.in_edges(v)).collect(),
        }
    }

    fn vid(&self, v: usize, sheet: usize) -> usize {
        v * self.degree + sheet
    }

    /// BFS girth check on the cover: returns one offending closed walk
    /// (as cover-edge ids e * degree + sheet) of length <= threshold, or
    /// None when the cover girth exceeds the threshold.
    fn short_cycle(&self, threshold: usize) -> Option<Vec<usize>> {
        let n = self.base.v_count() * self.degree;
        let depth_cap = threshold.div_ceil(2);
        let mut dist = vec![usize::MAX; n];
        let mut parent = vec![usize::MAX; n]; // cover-edge id into the vertex
        let mut touched: Vec<usize> = Vec::new();
        for root in 0..n {
            for &t in &touched {
                dist[t] = usize::MAX;
                parent[t] = usize::MAX;
            }
            touched.clear();
            dist[root] = 0;
            touched.push(root);
            let mut queue = std::collections::VecDeque::from([root]);
            while let Some(u) = queue.pop_front() {
                let (bv, sheet) = (u / self.degree, u % self.degree);
                let scan = |eid: usize, w: usize,
                                dist: &mut Vec<usize>,
                                parent: &mut Vec<usize>,
                                queue: &mut std::collections::VecDeque<usize>,
                                touched: &mut Vec<usize>|
                 -> Option<Vec<usize>> {
                    if eid == parent[u] {
                        return None;
                    }
                    if w == u {
                        // self-loop in the cover
                        return Some(vec![eid]);
                    }
                    if dist[w] == usize::MAX {
                        if dist[u] < depth_cap {
                            dist[w] = dist[u] + 1;
                            parent[w] = eid;
                            touched.push(w);
                            queue.push_back(w);
                        }
                        None
                    } else if dist[u] + dist[w] < threshold {
                        // collect the closed walk through the root
                        let mut edges = vec![eid];
                        let mut x = u;
                        while parent[x] != usize::MAX {
                            edges.push(parent[x]);
                            x = self.step_back(x, parent[x]);
                        }
                        let mut y = w;
                        while parent[y] != usize::MAX {
                            edges.push(parent[y]);
                            y = self.step_back(y, parent[y]);
                        }
                        Some(edges)
                    } else {
                        None
                    }
                };
                for &e in &self.out_inc[bv] {
                    let w = self.vid(self.base.head(e), self.perms[e][sheet]);
                    if let Some(c) = scan(e * self.degree + sheet, w, &mut dist, &mut parent, &mut queue, &mut touched)
                    {
                        return Some(c);
                    }
                }
                for &e in &self.in_inc[bv] {
                    // sheets j with perm[e][j] == sheet
                    for j in 0..self.degree {
                        if self.perms[e][j] == sheet {
                            let w = self.vid(self.base.tail(e), j);
                            if let Some(c) =
                                scan(e * self.degree + j, w, &mut dist, &mut parent, &mut queue, &mut touched)
                            {
                                return Some(c);
                            }
                        }
                    }
                }
            }
        }
        None
    }

    /// The endpoint of a cover edge other than `from` (walk one step back
    /// along a parent edge).
    fn step_back(&self, from: usize, eid: usize) -> usize {
        let (e, sheet) = (eid / self.degree, eid % self.degree);
        let t = self.vid(self.base.tail(e), sheet);
        let h = self.vid(self.base.head(e), self.perms[e][sheet]);
        if from == h {
            t
        } else {
            h
        }
    }

    /// Drive the cover girth above `target` by re-matching sheets on
    /// short cycles.
    fn surgery(&mut self, target_girth: usize, patience: usize, rng: &mut Rng) {
        if target_girth <= 1 {
            return;
        }
        let threshold = target_girth - 1;
        for _ in 0..patience {
            let Some(cycle) = self.short_cycle(threshold) else {
                return;
            };
            // re-match a random cycle edge with a random other sheet
            let eid = cycle[rng.below_usize(cycle.len())];
            let (e, i) = (eid / self.degree, eid % self.degree);
            let j = rng.below_usize(self.degree);
            self.perms[e].swap(i, j);
        }
    }

    fn into_morphism(self, base: &Digraph) -> Result<GraphMorphism> {
        let degree = self.degree;
        let vertices: Vec<String> = (0..base.v_count())
            .flat_map(|v| (0..degree).map(move |i| (v, i)))
            .map(|(v, i)| format!("({},{i})", base.vertex_id(v)))
            .collect();
        let mut edges = Vec::with_capacity(base.e_count() * degree);
        let mut emap = Vec::with_capacity(base.e_count() * degree);
        for e in 0..base.e_count() {
            for i in 0..degree {
                edges.push((
                    format!("({},{i})", base.edge_id(e)),
                    format!("({},{i})", base.vertex_id(base.tail(e))),
                    format!("({},{})", base.vertex_id(base.head(e)), self.perms[e][i]),
                ));
                emap.push(e);
            }
        }
        let total = Digraph::new(vertices, edges)?;
        let vmap = (0..base.v_count()).flat_map(|v| std::iter::repeat_n(v, degree)).collect();
        GraphMorphism::new(total, base.clone(), vmap, emap)
    }
}

/// A degree-n permutation cover: vertices (v, i), one permutation per base
/// edge matching the sheets.
pub fn random_permutation_cover(g: &Digraph, degree: usize, rng: &mut Rng) -> Result<GraphMorphism> {
    if degree == 0 {
        return input_err("cover degree must be positive");
    }
    let vertices: Vec<String> = (0..g.v_count())
        .flat_map(|v| (0..degree).map(move |i| (v, i)))
        .map(|(v, i)| format!("({},{i})", g.vertex_id(v)))
        .collect();
    let mut edges = Vec::with_capacity(g.e_count() * degree);
    let mut emap = Vec::with_capacity(g.e_count() * degree);
    for e in 0..g.e_count() {
        let mut perm: Vec<usize> = (0..degree).collect();
        rng.shuffle(&mut perm);
        for (i, &pi) in perm.iter().enumerate() {
            edges.push((
                format!("({},{i})", g.edge_id(e)),
                format!("({},{i})", g.vertex_id(g.tail(e))),
                format!("({},{pi})", g.vertex_id(g.head(e))),
            ));
            emap.push(e);
        }
    }
    let total = Digraph::new(vertices, edges)?;
    let vmap = (0..g.v_count()).flat_map(|v| std::iter::repeat_n(v, degree)).collect();
    GraphMorphism::new(total, g.clone(), vmap, emap)
}

/// Independent oracle: the maximum of -chi over subsheaves generated by a
/// compartmentalized U with edge spaces Gamma_ht(U). Each candidate is
/// constructed explicitly as a sheaf (checking that the restriction data
/// really lands inside the subspaces) before its Euler characteristic is
/// read off.
pub fn max_excess_subsheaf_oracle(s: &Sheaf, budget: u64) -> Result<usize> {
    let q = s.field().modulus();
    if q != 2 && q != 3 {
        return input_err("subsheaf oracle requires GF(2) or GF(3)");
    }
    let nv = s.base().v_count();
    let per_vertex: Vec<Vec<Subspace>> = (0..nv)
        .map(|v| enumerate_subspaces(s.field(), s.vdim(v)))
        .collect::<Result<_>>()?;
    let counts: Vec<u64> = per_vertex.iter().map(|c| c.len() as u64).collect();
    let total = counts.iter().try_fold(1u64, |acc, &c| acc.checked_mul(c)).unwrap_or(u64::MAX);
    if total > budget {
        return budget_err(format!("{total} subspace tuples exceed the budget of {budget}"));
    }
    let mut best: i64 = 0;
    let mut choice = vec![0usize; nv];
    for idx in 0..total {
        let mut rem = idx;
        for v in (0..nv).rev() {
            choice[v] = (rem % counts[v]) as usize;
            rem /= counts[v];
        }
        let u = CompartmentalizedSubspace {
            per_vertex: choice.iter().enumerate().map(|(v, &c)| per_vertex[v][c].clone()).collect(),
        };
        let esub: Vec<Subspace> = (0..s.base().e_count()).map(|e| gamma_subspace(s, &u, e)).collect();
        let (sub, _incl) = subsheaf_from_subspaces(s, &u.per_vertex, &esub)?;
        best = best.max(-sub.chi());
    }
    Ok(best.max(0) as usize)
}
