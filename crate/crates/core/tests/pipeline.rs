//! Cross-module integration: word ingestion through folding, kernels,
//! excess, and the SHNC verifier working together.

use sheaflab_core::digraph::{fibre_product_over_b2, invariants, isomorphic, Bigraph, Digraph};
use sheaflab_core::excess::{max_excess, max_excess_brute, MaxExcessMethod, MaxExcessOptions};
use sheaflab_core::galois::{
    cover_from_coordinates, normal_extension, FiniteGroup, GaloisCoordinates,
};
use sheaflab_core::io::{emit_sheaf, parse_digraph, parse_sheaf};
use sheaflab_core::linalg::{vandermonde_totally_independent, PrimeField};
use sheaflab_core::rho::{
    all_subgraphs, build_kernel, edge_with_rho_drop, shnc_verify, stallings_core, CayleyContext,
    Subgraph,
};
use sheaflab_core::rng::Rng;
use sheaflab_core::sheaf::{pullback, unhappy_bundle, Sheaf};
use sheaflab_core::twisted::twisted_betti;

#[test]
fn squares_subgroup_core_and_shnc() {
    // H = <a^2, b^2> in F_2: the core has two 2-cycles through the base
    let core = stallings_core(&["aa".into(), "bb".into()]).unwrap();
    let inv = invariants(core.graph());
    assert_eq!(core.graph().v_count(), 3);
    assert_eq!(core.graph().e_count(), 4);
    assert_eq!(inv.h1, 2);
    assert_eq!(inv.rho, 1);
    let rep = shnc_verify(&core, &core).unwrap();
    assert!(rep.shnc_holds && rep.hnc_holds);
    assert!(rep.product.rho <= 1);
}

#[test]
fn commutator_subgroup_vs_whole_group() {
    // the intersection machinery on <[a,b]> against F_2 itself
    let k = stallings_core(&["abAB".into()]).unwrap();
    let l = stallings_core(&["a".into(), "b".into()]).unwrap();
    let rep = shnc_verify(&k, &l).unwrap();
    // rho(K) = 0 forces the product side to vanish
    assert_eq!(rep.rho_k, 0);
    assert_eq!(rep.product.rho, 0);
    assert!(rep.shnc_holds);
}

#[test]
fn unhappy_bundle_file_round_trip_pipeline() {
    let b2_text = "vertex v\nedge e1 v v\nedge e2 v v\n";
    let u = unhappy_bundle(PrimeField::default_field());
    let text = emit_sheaf(&u, "b2.dg");
    let back = parse_sheaf(&text, |_| Ok(b2_text.to_string()), None).unwrap();
    assert_eq!(back, u);
    let tb = twisted_betti(&back, 3, 0).unwrap();
    assert_eq!((tb.h0t, tb.h1t), (1, 1));
    let me = max_excess(
        &back.reinterpret(PrimeField::new(2).unwrap()),
        MaxExcessMethod::Brute,
        &MaxExcessOptions::default(),
    )
    .unwrap();
    assert_eq!(me.value, 0);
}

#[test]
fn cayley_kernel_excess_chain_z2() {
    // walk one subgraph through the whole kernel pipeline over GF(2)
    let ctx = CayleyContext::new(FiniteGroup::cyclic(2).unwrap(), 1, 1).unwrap();
    let f2 = PrimeField::new(2).unwrap();
    for l in all_subgraphs(&ctx) {
        let rho = l.rho(&ctx);
        if rho != 1 {
            continue;
        }
        // drop one edge to reach rho = 0, per the removal lemma
        let e = edge_with_rho_drop(&ctx, &l).unwrap().expect("rho > 0 needs a drop edge");
        assert_eq!(l.without_edge(e).rho(&ctx), 0);
        // k = rho = 1 kernels: certified maximum excess is 0 for the
        // all-ones matrix (the only totally independent row over GF(2))
        let m = sheaflab_core::linalg::Matrix::from_rows(f2, &[vec![1, 1]]).unwrap();
        let kernel = build_kernel(&ctx, &l, 1, &m).unwrap();
        let me = max_excess_brute(&kernel.sheaf, 1 << 20).unwrap();
        assert_eq!(me.value, 0, "rho-kernel excess must vanish on {l:?}");
    }
}

#[test]
fn sub_bigraph_product_translation_identity() {
    // L x_{B2} L' against (L G) x_G L' at the bigraph level
    let ctx = CayleyContext::new(FiniteGroup::cyclic(2).unwrap(), 1, 1).unwrap();
    let subs = all_subgraphs(&ctx);
    let mut rng = Rng::new(9);
    for _ in 0..10 {
        let l = &subs[rng.below_usize(subs.len())];
        let lp = &subs[rng.below_usize(subs.len())];
        let (prod, _, _) = fibre_product_over_b2(&l.to_bigraph(&ctx), &lp.to_bigraph(&ctx)).unwrap();
        // the translated union: sum over g of the intersection of Lg and L'
        let mut expected_chi = 0i64;
        for g in 0..2 {
            let lg = l.translate(&ctx, g);
            let vs = lg.vertices.intersection(&lp.vertices).count() as i64;
            let es = lg.edges.intersection(&lp.edges).count() as i64;
            expected_chi += vs - es;
        }
        assert_eq!(invariants(prod.graph()).chi, expected_chi);
    }
}

#[test]
fn normal_extension_of_squares_cover() {
    // a connected degree-2 covering of B2 built from coordinates, then
    // Gross's construction on top of it
    let base = Digraph::bouquet(2);
    let grp = FiniteGroup::cyclic(2).unwrap();
    let coords = GaloisCoordinates::new(base, grp, vec![1, 1]).unwrap();
    let cover = cover_from_coordinates(&coords).unwrap();
    let (omega, mu) = normal_extension(&cover.projection).unwrap();
    omega.verify().unwrap();
    assert_eq!(omega.degree(), 2);
    assert!(isomorphic(mu.source(), &omega.total));
}

#[test]
fn covering_bigraphs_make_shnc_tight() {
    // coverings of B2 satisfy the inequality with equality, and pullback
    // multiplies everything by the degree
    let ctx = CayleyContext::new(FiniteGroup::cyclic(4).unwrap(), 1, 3).unwrap();
    let k: Bigraph = Subgraph::full(&ctx).to_bigraph(&ctx);
    let l = stallings_core(&["ab".into(), "ba".into()]).unwrap();
    let rep = shnc_verify(&k, &l).unwrap();
    assert_eq!(rep.shnc_margin, 0);
}

#[test]
fn pullback_of_kernel_sheaf_scales_excess() {
    // kernel sheaves behave like any sheaf under covering pullback
    let ctx = CayleyContext::new(FiniteGroup::cyclic(2).unwrap(), 1, 1).unwrap();
    let f2 = PrimeField::new(2).unwrap();
    let full = Subgraph::full(&ctx);
    let m = sheaflab_core::linalg::Matrix::zero(f2, 0, 2);
    let kernel = build_kernel(&ctx, &full, 0, &m).unwrap();
    // m.e. of the zero-power kernel is rho(L)|G| = 2 * 2
    let me = max_excess_brute(&kernel.sheaf, 1 << 20).unwrap().value;
    assert_eq!(me, 4);
    // double cover of the Cayley graph
    let grp = FiniteGroup::cyclic(2).unwrap();
    let coords = GaloisCoordinates::random(ctx.graph.graph().clone(), grp, 3);
    let cover = cover_from_coordinates(&coords).unwrap();
    let pulled = pullback(&cover.projection, &kernel.sheaf).unwrap();
    let me_up = max_excess_brute(&pulled, 1 << 22).unwrap().value;
    assert_eq!(me_up, 2 * me);
}

#[test]
fn vandermonde_kernels_parse_emit_stable() {
    // kernel sheaves survive the text format
    let ctx = CayleyContext::new(FiniteGroup::cyclic(3).unwrap(), 1, 2).unwrap();
    let field = PrimeField::new(101).unwrap();
    let full = Subgraph::full(&ctx);
    let m = vandermonde_totally_independent(3, 3, field, 4).unwrap();
    let kernel = build_kernel(&ctx, &full, 3, &m).unwrap();
    let graph_text = sheaflab_core::digraph::emit_digraph(ctx.graph.graph());
    let text = emit_sheaf(&kernel.sheaf, "cayley.dg");
    let back = parse_sheaf(&text, |_| Ok(graph_text.clone()), None).unwrap();
    assert_eq!(back, kernel.sheaf);
    let reparsed_graph = parse_digraph(&graph_text).unwrap();
    assert_eq!(reparsed_graph.digraph(), ctx.graph.graph());
}
