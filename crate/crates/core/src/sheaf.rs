//! Sheaves of finite-dimensional GF(p)-vector spaces on digraphs: values,
//! restriction maps, the differential d = d_h - d_t, homology, and the
//! functors pullback, pushforward (shriek), extension by zero and tensor,
//! plus Hom-space dimensions and kernel/quotient constructions.

use crate::digraph::{Digraph, GraphMorphism};
use crate::error::{input_err, Error, Result};
use crate::linalg::{Matrix, PrimeField, Subspace};
use crate::rng::Rng;

/// A sheaf on a digraph. Global bases for F(V) and F(E) are the
/// concatenations of the per-point bases in declaration order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sheaf {
    base: Digraph,
    field: PrimeField,
    vdim: Vec<usize>,
    edim: Vec<usize>,
    head_map: Vec<Matrix>,
    tail_map: Vec<Matrix>,
}

impl Sheaf {
    pub fn new(
        base: Digraph,
        field: PrimeField,
        vdim: Vec<usize>,
        edim: Vec<usize>,
        head_map: Vec<Matrix>,
        tail_map: Vec<Matrix>,
    ) -> Result<Self> {
        if vdim.len() != base.v_count() || edim.len() != base.e_count() {
            return input_err("dimension vectors must cover all vertices and edges");
        }
        if head_map.len() != base.e_count() || tail_map.len() != base.e_count() {
            return input_err("restriction maps must cover all edges");
        }
        for e in 0..base.e_count() {
            let (h, t) = (base.head(e), base.tail(e));
            for (name, m, rows) in [("head", &head_map[e], vdim[h]), ("tail", &tail_map[e], vdim[t])] {
                if m.rows() != rows || m.cols() != edim[e] {
                    return Err(Error::Input(format!(
                        "{name} map of edge `{}` must be {}x{}, got {}x{}",
                        base.edge_id(e),
                        rows,
                        edim[e],
                        m.rows(),
                        m.cols()
                    )));
                }
                if m.field() != field {
                    return input_err("restriction map over the wrong field");
                }
            }
        }
        Ok(Sheaf {
            base,
            field,
            vdim,
            edim,
            head_map,
            tail_map,
        })
    }

    /// Constant sheaf of the given dimension (identity restrictions).
    pub fn constant(base: &Digraph, field: PrimeField, dim: usize) -> Sheaf {
        let id = Matrix::identity(field, dim);
        Sheaf {
            base: base.clone(),
            field,
            vdim: vec![dim; base.v_count()],
            edim: vec![dim; base.e_count()],
            head_map: vec![id.clone(); base.e_count()],
            tail_map: vec![id; base.e_count()],
        }
    }

    /// The structure sheaf: constant of dimension one.
    pub fn structure(base: &Digraph, field: PrimeField) -> Sheaf {
        Sheaf::constant(base, field, 1)
    }

    pub fn zero_sheaf(base: &Digraph, field: PrimeField) -> Sheaf {
        Sheaf::constant(base, field, 0)
    }

    pub fn base(&self) -> &Digraph {
        &self.base
    }
    pub fn field(&self) -> PrimeField {
        self.field
    }
    pub fn vdim(&self, v: usize) -> usize {
        self.vdim[v]
    }
    pub fn edim(&self, e: usize) -> usize {
        self.edim[e]
    }
    pub fn head_map(&self, e: usize) -> &Matrix {
        &self.head_map[e]
    }
    pub fn tail_map(&self, e: usize) -> &Matrix {
        &self.tail_map[e]
    }

    pub fn total_vdim(&self) -> usize {
        self.vdim.iter().sum()
    }
    pub fn total_edim(&self) -> usize {
        self.edim.iter().sum()
    }

    pub fn vertex_offset(&self, v: usize) -> usize {
        self.vdim[..v].iter().sum()
    }
    pub fn edge_offset(&self, e: usize) -> usize {
        self.edim[..e].iter().sum()
    }

    pub fn chi(&self) -> i64 {
        self.total_vdim() as i64 - self.total_edim() as i64
    }

    /// Block matrix F(E) -> F(V) collecting the head restrictions.
    pub fn d_head(&self) -> Matrix {
        self.assemble(|e| (self.base.head(e), &self.head_map[e]))
    }

    /// Block matrix F(E) -> F(V) collecting the tail restrictions.
    pub fn d_tail(&self) -> Matrix {
        self.assemble(|e| (self.base.tail(e), &self.tail_map[e]))
    }

    fn assemble<'a>(&'a self, block: impl Fn(usize) -> (usize, &'a Matrix)) -> Matrix {
        let mut d = Matrix::zero(self.field, self.total_vdim(), self.total_edim());
        for e in 0..self.base.e_count() {
            let (v, m) = block(e);
            d.paste(self.vertex_offset(v), self.edge_offset(e), m);
        }
        d
    }

    /// The differential d = d_h - d_t.
    pub fn differential(&self) -> Matrix {
        self.d_head().sub(&self.d_tail())
    }

    pub fn homology(&self) -> HomologySummary {
        let d = self.differential();
        let rank = d.rank();
        HomologySummary {
            h0: self.total_vdim() - rank,
            h1: self.total_edim() - rank,
            chi: self.chi(),
        }
    }

    pub fn direct_sum(&self, other: &Sheaf) -> Result<Sheaf> {
        if self.base != other.base || self.field != other.field {
            return input_err("direct sum requires the same base and field");
        }
        let block = |a: &Matrix, b: &Matrix| {
            let mut m = Matrix::zero(self.field, a.rows() + b.rows(), a.cols() + b.cols());
            m.paste(0, 0, a);
            m.paste(a.rows(), a.cols(), b);
            m
        };
        Sheaf::new(
            self.base.clone(),
            self.field,
            (0..self.base.v_count()).map(|v| self.vdim[v] + other.vdim[v]).collect(),
            (0..self.base.e_count()).map(|e| self.edim[e] + other.edim[e]).collect(),
            (0..self.base.e_count()).map(|e| block(&self.head_map[e], &other.head_map[e])).collect(),
            (0..self.base.e_count()).map(|e| block(&self.tail_map[e], &other.tail_map[e])).collect(),
        )
    }

    /// Pointwise tensor product; restriction maps are Kronecker products in
    /// canonical (row-major) basis order.
    pub fn tensor(&self, other: &Sheaf) -> Result<Sheaf> {
        if self.base != other.base || self.field != other.field {
            return input_err("tensor requires the same base and field");
        }
        Sheaf::new(
            self.base.clone(),
            self.field,
            (0..self.base.v_count()).map(|v| self.vdim[v] * other.vdim[v]).collect(),
            (0..self.base.e_count()).map(|e| self.edim[e] * other.edim[e]).collect(),
            (0..self.base.e_count())
                .map(|e| self.head_map[e].kronecker(&other.head_map[e]))
                .collect(),
            (0..self.base.e_count())
                .map(|e| self.tail_map[e].kronecker(&other.tail_map[e]))
                .collect(),
        )
    }

    /// Reinterpret integer restriction data over another prime field. The
    /// entries are taken literally as integers; callers use this for the
    /// 0/1-data sheaves where cross-field comparisons are meaningful.
    pub fn reinterpret(&self, field: PrimeField) -> Sheaf {
        let conv = |m: &Matrix| Matrix::from_fn(field, m.rows(), m.cols(), |i, j| m.get(i, j));
        Sheaf {
            base: self.base.clone(),
            field,
            vdim: self.vdim.clone(),
            edim: self.edim.clone(),
            head_map: self.head_map.iter().map(conv).collect(),
            tail_map: self.tail_map.iter().map(conv).collect(),
        }
    }

    /// True when every entry of every restriction map is 0 or 1.
    pub fn has_zero_one_data(&self) -> bool {
        self.head_map
            .iter()
            .chain(self.tail_map.iter())
            .all(|m| (0..m.rows()).all(|i| (0..m.cols()).all(|j| m.get(i, j) <= 1)))
    }

    pub fn dimension_profile(&self) -> (Vec<usize>, Vec<usize>) {
        (self.vdim.clone(), self.edim.clone())
    }
}

/// Homology dimensions; h0 - h1 = chi always.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HomologySummary {
    pub h0: usize,
    pub h1: usize,
    pub chi: i64,
}

/// Pullback along a morphism: values and restrictions copied from the
/// image point.
pub fn pullback(f: &GraphMorphism, s: &Sheaf) -> Result<Sheaf> {
    if f.target() != s.base() {
        return input_err("pullback: sheaf must live on the morphism target");
    }
    Sheaf::new(
        f.source().clone(),
        s.field(),
        (0..f.source().v_count()).map(|v| s.vdim[f.vmap(v)]).collect(),
        (0..f.source().e_count()).map(|e| s.edim[f.emap(e)]).collect(),
        (0..f.source().e_count()).map(|e| s.head_map[f.emap(e)].clone()).collect(),
        (0..f.source().e_count()).map(|e| s.tail_map[f.emap(e)].clone()).collect(),
    )
}

/// Pushforward phi_!: direct sums over fibres with induced restrictions.
/// For subgraph inclusions this is exactly extension by zero.
pub fn pushforward_shriek(f: &GraphMorphism, s: &Sheaf) -> Result<Sheaf> {
    if f.source() != s.base() {
        return input_err("pushforward: sheaf must live on the morphism source");
    }
    let tgt = f.target();
    let field = s.field();
    let vfibres: Vec<Vec<usize>> = (0..tgt.v_count()).map(|v| f.vertex_fibre(v)).collect();
    let efibres: Vec<Vec<usize>> = (0..tgt.e_count()).map(|e| f.edge_fibre(e)).collect();
    let vdim: Vec<usize> = vfibres.iter().map(|fb| fb.iter().map(|&q| s.vdim[q]).sum()).collect();
    let edim: Vec<usize> = efibres.iter().map(|fb| fb.iter().map(|&q| s.edim[q]).sum()).collect();
    let mut head_map = Vec::with_capacity(tgt.e_count());
    let mut tail_map = Vec::with_capacity(tgt.e_count());
    for e in 0..tgt.e_count() {
        for (maps, endpoint, pick) in [
            (&mut head_map, tgt.head(e), true),
            (&mut tail_map, tgt.tail(e), false),
        ] {
            let vfb = &vfibres[endpoint];
            let mut m = Matrix::zero(field, vdim[endpoint], edim[e]);
            let mut col = 0usize;
            for &eq in &efibres[e] {
                let target_vertex = if pick { s.base().head(eq) } else { s.base().tail(eq) };
                // row offset of that source vertex inside the fibre sum
                let mut row = 0usize;
                let mut found = false;
                for &vq in vfb {
                    if vq == target_vertex {
                        found = true;
                        break;
                    }
                    row += s.vdim[vq];
                }
                if !found {
                    return Err(Error::Internal(
                        "pushforward: edge endpoint escapes the vertex fibre".into(),
                    ));
                }
                let block = if pick { &s.head_map[eq] } else { &s.tail_map[eq] };
                m.paste(row, col, block);
                col += s.edim[eq];
            }
            maps.push(m);
        }
    }
    Sheaf::new(tgt.clone(), field, vdim, edim, head_map, tail_map)
}

/// Extension by zero of `inner` along `f` (the same functor as phi_!).
pub fn extend_by_zero(f: &GraphMorphism, inner: &Sheaf) -> Result<Sheaf> {
    pushforward_shriek(f, inner)
}

/// The sheaf F_K for a subgraph inclusion: structure sheaf of the source
/// extended by zero.
pub fn constant_on_subgraph(f: &GraphMorphism, field: PrimeField) -> Result<Sheaf> {
    extend_by_zero(f, &Sheaf::structure(f.source(), field))
}

/// A morphism of sheaves on a common base; both commuting squares are
/// verified per edge at construction.
#[derive(Debug, Clone)]
pub struct SheafMorphism {
    source: Sheaf,
    target: Sheaf,
    vmaps: Vec<Matrix>,
    emaps: Vec<Matrix>,
}

impl SheafMorphism {
    pub fn new(source: Sheaf, target: Sheaf, vmaps: Vec<Matrix>, emaps: Vec<Matrix>) -> Result<Self> {
        if source.base() != target.base() || source.field() != target.field() {
            return input_err("sheaf morphism requires a common base and field");
        }
        let g = source.base();
        if vmaps.len() != g.v_count() || emaps.len() != g.e_count() {
            return input_err("sheaf morphism must map every vertex and edge space");
        }
        for v in 0..g.v_count() {
            if vmaps[v].rows() != target.vdim(v) || vmaps[v].cols() != source.vdim(v) {
                return Err(Error::Input(format!(
                    "vertex map at `{}` has the wrong shape",
                    g.vertex_id(v)
                )));
            }
        }
        for e in 0..g.e_count() {
            if emaps[e].rows() != target.edim(e) || emaps[e].cols() != source.edim(e) {
                return Err(Error::Input(format!(
                    "edge map at `{}` has the wrong shape",
                    g.edge_id(e)
                )));
            }
            let (h, t) = (g.head(e), g.tail(e));
            if target.head_map(e).mul(&emaps[e]) != vmaps[h].mul(source.head_map(e)) {
                return Err(Error::Input(format!(
                    "head square does not commute at edge `{}`",
                    g.edge_id(e)
                )));
            }
            if target.tail_map(e).mul(&emaps[e]) != vmaps[t].mul(source.tail_map(e)) {
                return Err(Error::Input(format!(
                    "tail square does not commute at edge `{}`",
                    g.edge_id(e)
                )));
            }
        }
        Ok(SheafMorphism {
            source,
            target,
            vmaps,
            emaps,
        })
    }

    pub fn identity(s: &Sheaf) -> SheafMorphism {
        let g = s.base();
        SheafMorphism {
            source: s.clone(),
            target: s.clone(),
            vmaps: (0..g.v_count()).map(|v| Matrix::identity(s.field(), s.vdim(v))).collect(),
            emaps: (0..g.e_count()).map(|e| Matrix::identity(s.field(), s.edim(e))).collect(),
        }
    }

    pub fn zero(source: &Sheaf, target: &Sheaf) -> Result<SheafMorphism> {
        let g = source.base();
        SheafMorphism::new(
            source.clone(),
            target.clone(),
            (0..g.v_count())
                .map(|v| Matrix::zero(source.field(), target.vdim(v), source.vdim(v)))
                .collect(),
            (0..g.e_count())
                .map(|e| Matrix::zero(source.field(), target.edim(e), source.edim(e)))
                .collect(),
        )
    }

    pub fn source(&self) -> &Sheaf {
        &self.source
    }
    pub fn target(&self) -> &Sheaf {
        &self.target
    }
    pub fn vmap(&self, v: usize) -> &Matrix {
        &self.vmaps[v]
    }
    pub fn emap(&self, e: usize) -> &Matrix {
        &self.emaps[e]
    }
}

/// dim Hom(a, b): the dimension of the solution space of the linear system
/// expressing both commuting squares for all edges.
pub fn hom_dim(a: &Sheaf, b: &Sheaf) -> Result<usize> {
    if a.base() != b.base() || a.field() != b.field() {
        return input_err("hom_dim requires the same base and field");
    }
    let g = a.base();
    let f = a.field();
    // unknowns: X_v (b.vdim(v) x a.vdim(v)) then X_e (b.edim(e) x a.edim(e))
    let voff: Vec<usize> = {
        let mut acc = 0;
        let mut out = Vec::with_capacity(g.v_count());
        for v in 0..g.v_count() {
            out.push(acc);
            acc += b.vdim(v) * a.vdim(v);
        }
        out
    };
    let vtotal: usize = (0..g.v_count()).map(|v| b.vdim(v) * a.vdim(v)).sum();
    let eoff: Vec<usize> = {
        let mut acc = vtotal;
        let mut out = Vec::with_capacity(g.e_count());
        for e in 0..g.e_count() {
            out.push(acc);
            acc += b.edim(e) * a.edim(e);
        }
        out
    };
    let unknowns = vtotal + (0..g.e_count()).map(|e| b.edim(e) * a.edim(e)).sum::<usize>();
    let mut rows: Vec<Vec<u64>> = Vec::new();
    for e in 0..g.e_count() {
        for (endpoint, bres, ares) in [
            (g.head(e), b.head_map(e), a.head_map(e)),
            (g.tail(e), b.tail_map(e), a.tail_map(e)),
        ] {
            // bres * X_e - X_endpoint * ares = 0
            // entry (i, j): sum_k bres[i,k] X_e[k,j] - sum_m X_v[i,m] ares[m,j]
            for i in 0..b.vdim(endpoint) {
                for j in 0..a.edim(e) {
                    let mut row = vec![0u64; unknowns];
                    for k in 0..b.edim(e) {
                        let idx = eoff[e] + k * a.edim(e) + j;
                        row[idx] = f.add(row[idx], bres.get(i, k));
                    }
                    for m in 0..a.vdim(endpoint) {
                        let idx = voff[endpoint] + i * a.vdim(endpoint) + m;
                        row[idx] = f.sub(row[idx], ares.get(m, j));
                    }
                    rows.push(row);
                }
            }
        }
    }
    if rows.is_empty() {
        return Ok(unknowns);
    }
    let m = Matrix::from_rows(f, &rows)?;
    Ok(unknowns - m.rank())
}

/// Kernel, image dimensions and quotient of a sheaf morphism, all computed
/// pointwise with induced restriction maps.
#[derive(Debug, Clone)]
pub struct SubQuotient {
    pub kernel: Sheaf,
    pub kernel_inclusion: SheafMorphism,
    pub image_vdim: Vec<usize>,
    pub image_edim: Vec<usize>,
    pub quotient: Sheaf,
    pub quotient_projection: SheafMorphism,
}

pub fn sub_quotient(m: &SheafMorphism) -> Result<SubQuotient> {
    let src = m.source();
    let tgt = m.target();
    let g = src.base().clone();
    let f = src.field();
    // kernels pointwise: basis rows span ker(map)
    let vker: Vec<Matrix> = (0..g.v_count()).map(|v| m.vmap(v).kernel_basis()).collect();
    let eker: Vec<Matrix> = (0..g.e_count()).map(|e| m.emap(e).kernel_basis()).collect();
    // induced restriction: solve  basis(v)^T x = head * basis(e)^T column
    let induced = |edge_basis: &Matrix, vertex_basis: &Matrix, res: &Matrix| -> Result<Matrix> {
        let mut out = Matrix::zero(f, vertex_basis.rows(), edge_basis.rows());
        let vt = vertex_basis.transpose();
        for j in 0..edge_basis.rows() {
            let image = res.mul_vec(edge_basis.row(j));
            let coeffs = vt.solve(&image).ok_or_else(|| {
                Error::Internal("kernel restriction does not land in the kernel".into())
            })?;
            for i in 0..vertex_basis.rows() {
                out.set(i, j, coeffs[i]);
            }
        }
        Ok(out)
    };
    let mut khead = Vec::with_capacity(g.e_count());
    let mut ktail = Vec::with_capacity(g.e_count());
    for e in 0..g.e_count() {
        khead.push(induced(&eker[e], &vker[g.head(e)], src.head_map(e))?);
        ktail.push(induced(&eker[e], &vker[g.tail(e)], src.tail_map(e))?);
    }
    let kernel = Sheaf::new(
        g.clone(),
        f,
        vker.iter().map(|k| k.rows()).collect(),
        eker.iter().map(|k| k.rows()).collect(),
        khead,
        ktail,
    )?;
    let kernel_inclusion = SheafMorphism::new(
        kernel.clone(),
        src.clone(),
        vker.iter().map(|k| k.transpose()).collect(),
        eker.iter().map(|k| k.transpose()).collect(),
    )?;
    // image dimensions and quotient with canonical complement coordinates
    let image_vdim: Vec<usize> = (0..g.v_count()).map(|v| m.vmap(v).rank()).collect();
    let image_edim: Vec<usize> = (0..g.e_count()).map(|e| m.emap(e).rank()).collect();
    let vquot: Vec<Matrix> = (0..g.v_count())
        .map(|v| Subspace::span(&m.vmap(v).transpose()).quotient_map())
        .collect();
    let equot: Vec<Matrix> = (0..g.e_count())
        .map(|e| Subspace::span(&m.emap(e).transpose()).quotient_map())
        .collect();
    // section of the quotient: place complement coordinates back (zero on
    // pivot coordinates); q . section = identity on complement coords
    let section = |quot: &Matrix| -> Matrix {
        let mut s = Matrix::zero(f, quot.cols(), quot.rows());
        // the r-th row of quot has a 1 at its own free coordinate
        for r in 0..quot.rows() {
            let free_col = (0..quot.cols())
                .find(|&c| quot.get(r, c) == 1 && (0..quot.rows()).all(|r2| r2 == r || quot.get(r2, c) == 0))
                .expect("quotient map rows carry unit free coordinates");
            s.set(free_col, r, 1);
        }
        s
    };
    let mut qhead = Vec::with_capacity(g.e_count());
    let mut qtail = Vec::with_capacity(g.e_count());
    for e in 0..g.e_count() {
        let sec = section(&equot[e]);
        qhead.push(vquot[g.head(e)].mul(tgt.head_map(e)).mul(&sec));
        qtail.push(vquot[g.tail(e)].mul(tgt.tail_map(e)).mul(&sec));
    }
    let quotient = Sheaf::new(
        g.clone(),
        f,
        vquot.iter().map(|q| q.rows()).collect(),
        equot.iter().map(|q| q.rows()).collect(),
        qhead,
        qtail,
    )?;
    let quotient_projection = SheafMorphism::new(tgt.clone(), quotient.clone(), vquot, equot)?;
    Ok(SubQuotient {
        kernel,
        kernel_inclusion,
        image_vdim,
        image_edim,
        quotient,
        quotient_projection,
    })
}

/// A random sheaf with dims up to `max_dim` and uniform restriction data.
pub fn random_sheaf(base: &Digraph, field: PrimeField, max_dim: usize, rng: &mut Rng) -> Sheaf {
    let vdim: Vec<usize> = (0..base.v_count()).map(|_| rng.below_usize(max_dim + 1)).collect();
    let edim: Vec<usize> = (0..base.e_count()).map(|_| rng.below_usize(max_dim + 1)).collect();
    let head_map = (0..base.e_count())
        .map(|e| Matrix::random(field, vdim[base.head(e)], edim[e], rng))
        .collect();
    let tail_map = (0..base.e_count())
        .map(|e| Matrix::random(field, vdim[base.tail(e)], edim[e], rng))
        .collect();
    Sheaf::new(base.clone(), field, vdim, edim, head_map, tail_map).expect("random dims are consistent")
}

/// A random subsheaf: random per-point subspaces closed under the
/// restriction maps by iterating closure (vertex spaces grow until every
/// edge space maps inside). Returns the subsheaf and its inclusion.
pub fn random_subsheaf(s: &Sheaf, rng: &mut Rng) -> Result<(Sheaf, SheafMorphism)> {
    let g = s.base();
    let f = s.field();
    let random_subspace = |dim: usize, rng: &mut Rng| {
        let k = rng.below_usize(dim + 1);
        Subspace::span(&Matrix::random(f, k, dim, rng))
    };
    let mut vsub: Vec<Subspace> = (0..g.v_count()).map(|v| random_subspace(s.vdim(v), rng)).collect();
    let esub: Vec<Subspace> = (0..g.e_count()).map(|e| random_subspace(s.edim(e), rng)).collect();
    loop {
        let mut changed = false;
        for e in 0..g.e_count() {
            for (endpoint, res) in [(g.head(e), s.head_map(e)), (g.tail(e), s.tail_map(e))] {
                let image_rows: Vec<Vec<u64>> = (0..esub[e].dim())
                    .map(|i| res.mul_vec(esub[e].basis().row(i)))
                    .collect();
                if image_rows.is_empty() {
                    continue;
                }
                let image = Subspace::span(&Matrix::from_rows(f, &image_rows)?);
                if !vsub[endpoint].contains_subspace(&image) {
                    vsub[endpoint] = vsub[endpoint].sum(&image)?;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    subsheaf_from_subspaces(s, &vsub, &esub)
}

/// Build the subsheaf carried by per-point subspaces (which must already be
/// closed under the restriction maps).
pub fn subsheaf_from_subspaces(
    s: &Sheaf,
    vsub: &[Subspace],
    esub: &[Subspace],
) -> Result<(Sheaf, SheafMorphism)> {
    let g = s.base();
    let f = s.field();
    let induced = |edge: &Subspace, vertex: &Subspace, res: &Matrix| -> Result<Matrix> {
        let mut out = Matrix::zero(f, vertex.dim(), edge.dim());
        let vt = vertex.basis().transpose();
        for j in 0..edge.dim() {
            let image = res.mul_vec(edge.basis().row(j));
            let coeffs = vt
                .solve(&image)
                .ok_or_else(|| Error::Input("edge subspace does not map into vertex subspace".into()))?;
            for i in 0..vertex.dim() {
                out.set(i, j, coeffs[i]);
            }
        }
        Ok(out)
    };
    let mut head = Vec::with_capacity(g.e_count());
    let mut tail = Vec::with_capacity(g.e_count());
    for e in 0..g.e_count() {
        head.push(induced(&esub[e], &vsub[g.head(e)], s.head_map(e))?);
        tail.push(induced(&esub[e], &vsub[g.tail(e)], s.tail_map(e))?);
    }
    let sub = Sheaf::new(
        g.clone(),
        f,
        vsub.iter().map(|u| u.dim()).collect(),
        esub.iter().map(|u| u.dim()).collect(),
        head,
        tail,
    )?;
    let inclusion = SheafMorphism::new(
        sub.clone(),
        s.clone(),
        vsub.iter().map(|u| u.basis().transpose()).collect(),
        esub.iter().map(|u| u.basis().transpose()).collect(),
    )?;
    Ok((sub, inclusion))
}

/// The unhappy 4-bundle on B2: dimension 4 at the vertex, 2 on each loop,
/// with the classical head/tail blocks.
pub fn unhappy_bundle(field: PrimeField) -> Sheaf {
    let b2 = Digraph::bouquet(2);
    let m = |rows: &[Vec<u64>]| Matrix::from_rows(field, rows).unwrap();
    Sheaf::new(
        b2,
        field,
        vec![4],
        vec![2, 2],
        vec![
            m(&[vec![1, 0], vec![0, 1], vec![0, 0], vec![0, 0]]),
            m(&[vec![1, 0], vec![0, 0], vec![0, 1], vec![0, 0]]),
        ],
        vec![
            m(&[vec![0, 0], vec![0, 0], vec![1, 0], vec![0, 1]]),
            m(&[vec![0, 0], vec![1, 0], vec![0, 0], vec![0, 1]]),
        ],
    )
    .expect("unhappy bundle is well formed")
}
