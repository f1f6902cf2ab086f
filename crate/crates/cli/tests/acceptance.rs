//! Acceptance suite: one test per shipped guarantee, each printing a
//! PASS line (visible with `cargo test --test acceptance -- --nocapture`).
//!
//! Everything here is seeded and exact; no tolerance knobs.

use sheaflab_core::digraph::{
    classify_morphism, fibre_product, invariants, isomorphic, Digraph, MorphismClass,
};
use sheaflab_core::excess::{
    gamma_excess, max_excess, max_excess_brute, max_excess_edge_simple, max_excess_subsheaf_oracle,
    random_permutation_cover, CompartmentalizedSubspace, MaxExcessMethod, MaxExcessOptions,
};
use sheaflab_core::galois::{cover_from_coordinates, monodromy_image, FiniteGroup, GaloisCoordinates};
use sheaflab_core::io::{parse_coordinates, parse_digraph, parse_sheaf};
use sheaflab_core::linalg::{
    enumerate_subspaces, vandermonde_totally_independent, Matrix, PrimeField, Subspace,
};
use sheaflab_core::rho::{
    all_subgraphs, build_kernel, generic_excess_experiment, orbit_sets, shnc_verify,
    vertex_family_check, CayleyContext, FamilySearch, TrialOutcome,
};
use sheaflab_core::rng::Rng;
use sheaflab_core::sheaf::{
    pullback, random_sheaf, random_subsheaf, sub_quotient, Sheaf,
};
use sheaflab_core::twisted::{abelian_decomposition_check, twisted_betti};
use std::path::PathBuf;
use std::process::Command;
use std::time::Instant;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn read_data(name: &str) -> String {
    std::fs::read_to_string(data(name)).expect("data file readable")
}

fn cli(args: &[&str]) -> (String, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_sheaflab"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        String::from_utf8_lossy(&out.stdout).to_string(),
        out.status.code().unwrap_or(-1),
    )
}

fn grab<'a>(report: &'a str, key: &str) -> &'a str {
    report
        .lines()
        .find_map(|l| l.strip_prefix(key).and_then(|r| r.strip_prefix('=')))
        .unwrap_or_else(|| panic!("report lacks `{key}=`:\n{report}"))
}

fn random_digraph(rng: &mut Rng, max_v: usize, max_e: usize) -> Digraph {
    let nv = 1 + rng.below_usize(max_v);
    let ne = rng.below_usize(max_e + 1);
    let vertices: Vec<String> = (0..nv).map(|i| format!("v{i}")).collect();
    let edges = (0..ne)
        .map(|i| {
            (
                format!("e{i}"),
                format!("v{}", rng.below_usize(nv)),
                format!("v{}", rng.below_usize(nv)),
            )
        })
        .collect();
    Digraph::new(vertices, edges).unwrap()
}

fn random_connected_digraph(rng: &mut Rng, max_v: usize, extra_e: usize) -> Digraph {
    let nv = 1 + rng.below_usize(max_v);
    let vertices: Vec<String> = (0..nv).map(|i| format!("v{i}")).collect();
    let mut edges = Vec::new();
    for i in 1..nv {
        let parent = rng.below_usize(i);
        edges.push((format!("t{i}"), format!("v{parent}"), format!("v{i}")));
    }
    for j in 0..1 + rng.below_usize(extra_e) {
        edges.push((
            format!("x{j}"),
            format!("v{}", rng.below_usize(nv)),
            format!("v{}", rng.below_usize(nv)),
        ));
    }
    Digraph::new(vertices, edges).unwrap()
}

#[test]
fn criterion_01_unhappy_bundle() {
    let t0 = Instant::now();
    let sheaf_path = data("unhappy.sheaf");
    let sheaf_path = sheaf_path.to_str().unwrap();
    // twisted Betti via the CLI on the shipped file
    let (rep, code) = cli(&["twisted", sheaf_path, "--samples", "3", "--seed", "7"]);
    assert_eq!(code, 0, "{rep}");
    assert_eq!(grab(&rep, "h1_twist"), "1");
    // brute maximum excess over GF(2) and GF(3)
    for p in ["2", "3"] {
        let (rep, code) = cli(&["maxexcess", sheaf_path, "--method", "brute", "--prime", p]);
        assert_eq!(code, 0, "{rep}");
        assert_eq!(grab(&rep, "max_excess"), "0", "GF({p})");
    }
    // pullback along the shipped degree-2 cover kills both invariants
    let base = parse_digraph(&read_data("b2.dg")).unwrap().digraph().clone();
    let coords = parse_coordinates(&read_data("b2_doublecover.coords"), &base, |_| {
        Err(sheaflab_core::Error::Input("no tables".into()))
    })
    .unwrap();
    let cover = cover_from_coordinates(&coords).unwrap();
    // over e1 the cover edges are self-loops
    let e1 = base.edge_index("e1").unwrap();
    for te in 0..cover.total.e_count() {
        if cover.projection.emap(te) == e1 {
            assert_eq!(cover.total.tail(te), cover.total.head(te));
        }
    }
    let unhappy = parse_sheaf(&read_data("unhappy.sheaf"), |p| Ok(read_data(p)), None).unwrap();
    let pulled = pullback(&cover.projection, &unhappy).unwrap();
    let tb = twisted_betti(&pulled, 3, 7).unwrap();
    assert_eq!(tb.h1t, 0);
    for p in [2u64, 3] {
        let s = parse_sheaf(&read_data("unhappy.sheaf"), |p| Ok(read_data(p)), Some(p)).unwrap();
        let pulled = pullback(&cover.projection, &s).unwrap();
        let me = max_excess_brute(&pulled, 1_000_000).unwrap();
        assert_eq!(me.value, 0, "pullback m.e. over GF({p})");
    }
    let elapsed = t0.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}");
    println!("criterion 01 (unhappy 4-bundle, twisted=1, m.e.=0, pullback kills both): PASS in {elapsed:?}");
}

#[test]
fn criterion_02_rho_equals_twisted_h1() {
    let t0 = Instant::now();
    let field = PrimeField::default_field();
    let mut rng = Rng::new(0x2222);
    for i in 0..50 {
        let g = random_digraph(&mut rng, 8, 12);
        let s = Sheaf::structure(&g, field);
        let tb = twisted_betti(&s, 3, rng.next_u64()).unwrap();
        assert_eq!(tb.h1t, invariants(&g).rho, "instance {i}");
    }
    let elapsed = t0.elapsed();
    assert!(elapsed.as_secs_f64() < 5.0, "took {elapsed:?}");
    println!("criterion 02 (rho = h1_twist of structure sheaf, 50 digraphs): PASS in {elapsed:?}");
}

#[test]
fn criterion_03_scaling_laws() {
    let mut rng = Rng::new(0x3333);
    // chi and rho scale exactly under 100 random covers of degree <= 4
    for i in 0..100 {
        let g = random_digraph(&mut rng, 6, 8);
        let d = 1 + rng.below_usize(4);
        let cover = random_permutation_cover(&g, d, &mut rng).unwrap();
        let (base_inv, cover_inv) = (invariants(&g), invariants(cover.source()));
        assert_eq!(cover_inv.chi, d as i64 * base_inv.chi, "chi at instance {i}");
        assert_eq!(cover_inv.rho, d * base_inv.rho, "rho at instance {i}");
    }
    // maximum excess scales exactly on 30 brute-checkable GF(2) sheaves
    let f2 = PrimeField::new(2).unwrap();
    for i in 0..30 {
        let g = random_digraph(&mut rng, 2, 2);
        let s = random_sheaf(&g, f2, 2, &mut rng);
        let d = 1 + rng.below_usize(3);
        let cover = random_permutation_cover(&g, d, &mut rng).unwrap();
        let pulled = pullback(&cover, &s).unwrap();
        let me_base = max_excess_brute(&s, 1_000_000).unwrap().value;
        let me_up = max_excess_brute(&pulled, 1_000_000).unwrap().value;
        assert_eq!(me_up, d * me_base, "m.e. scaling at instance {i}");
    }
    println!("criterion 03 (chi, rho, m.e. scale exactly by covering degree): PASS");
}

#[test]
fn criterion_04_supermodularity() {
    let f2 = PrimeField::new(2).unwrap();
    let mut rng = Rng::new(0x4444);
    for i in 0..500 {
        let g = random_digraph(&mut rng, 3, 4);
        let s = random_sheaf(&g, f2, 2, &mut rng);
        let subs: Vec<Vec<Subspace>> = (0..g.v_count())
            .map(|v| enumerate_subspaces(f2, s.vdim(v)).unwrap())
            .collect();
        let pick = |rng: &mut Rng| CompartmentalizedSubspace::new(
            &s,
            (0..g.v_count())
                .map(|v| subs[v][rng.below_usize(subs[v].len())].clone())
                .collect(),
        )
        .unwrap();
        let u1 = pick(&mut rng);
        let u2 = pick(&mut rng);
        let e1 = gamma_excess(&s, &u1).unwrap().excess;
        let e2 = gamma_excess(&s, &u2).unwrap().excess;
        let ei = gamma_excess(&s, &u1.intersection(&u2).unwrap()).unwrap().excess;
        let es = gamma_excess(&s, &u1.sum(&u2).unwrap()).unwrap().excess;
        assert!(e1 + e2 <= ei + es, "supermodularity violated at instance {i}");
    }
    println!("criterion 04 (supermodularity of excess, 500 triples, zero violations): PASS");
}

#[test]
fn criterion_05_galois_decomposition() {
    let mut rng = Rng::new(0x5555);
    let mut done = 0;
    while done < 20 {
        let n = 2 + done % 3; // cycle through Z/2, Z/3, Z/4
        let grp = FiniteGroup::cyclic(n).unwrap();
        let base = random_connected_digraph(&mut rng, 3, 3);
        let coords = GaloisCoordinates::random(base.clone(), grp.clone(), rng.next_u64());
        if monodromy_image(&coords).len() != n {
            continue; // need a connected total graph
        }
        let cover = cover_from_coordinates(&coords).unwrap();
        assert_eq!(invariants(&cover.total).h0, 1);
        let (prod, _, _) = fibre_product(&cover.projection, &cover.projection).unwrap();
        let (comp, ncomp) = prod.components();
        assert_eq!(ncomp, n, "K x_G K must split into |G| components");
        for c in 0..ncomp {
            let vs: Vec<usize> = (0..prod.v_count()).filter(|&v| comp[v] == c).collect();
            let es: Vec<usize> = (0..prod.e_count()).filter(|&e| comp[prod.tail(e)] == c).collect();
            let part = prod.subgraph(&vs, &es).unwrap();
            assert!(isomorphic(&part, &cover.total), "component not isomorphic to K");
        }
        done += 1;
    }
    println!("criterion 05 (K x_G K = |G| copies of K for 20 Galois covers): PASS");
}

#[test]
fn criterion_06_long_exact_triangle() {
    let field = PrimeField::default_field();
    let mut rng = Rng::new(0x6666);
    for i in 0..500 {
        let g = random_digraph(&mut rng, 3, 4);
        let s = random_sheaf(&g, field, 2, &mut rng);
        let (sub, incl) = random_subsheaf(&s, &mut rng).unwrap();
        let quot = sub_quotient(&incl).unwrap().quotient;
        let (ha, hb, hc) = (sub.homology(), s.homology(), quot.homology());
        let xs = [
            0i64,
            ha.h1 as i64,
            hb.h1 as i64,
            hc.h1 as i64,
            ha.h0 as i64,
            hb.h0 as i64,
            hc.h0 as i64,
            0i64,
        ];
        for k in 1..7 {
            assert!(
                xs[k] <= xs[k - 1] + xs[k + 1],
                "triangle inequality failed at instance {i}, position {k}: {xs:?}"
            );
        }
    }
    println!("criterion 06 (8-term triangle condition on 500 short exact sequences): PASS");
}

#[test]
fn criterion_07_abelian_fourier() {
    let mut rng = Rng::new(0x7777);
    let mut done = 0;
    while done < 20 {
        let n = 2 + done % 2; // Z/2 and Z/3
        let q = PrimeField::new(if n == 2 { 101 } else { 103 }).unwrap();
        let grp = FiniteGroup::cyclic(n).unwrap();
        let base = random_digraph(&mut rng, 3, 4);
        let coords = GaloisCoordinates::random(base.clone(), grp, rng.next_u64());
        let cover = cover_from_coordinates(&coords).unwrap();
        let s = random_sheaf(&base, q, 2, &mut rng);
        let rep = abelian_decomposition_check(&cover, &s, 4, rng.next_u64()).unwrap();
        assert!(rep.decomposition_holds, "character sum mismatch: {rep:?}");
        assert!(rep.bound_holds, "degree bound failed: {rep:?}");
        done += 1;
    }
    println!("criterion 07 (Fourier decomposition + degree bound, 20 abelian covers): PASS");
}

#[test]
fn criterion_08_appendix_equivalence_exhaustive() {
    let t0 = Instant::now();
    let ctx = CayleyContext::new(FiniteGroup::cyclic(2).unwrap(), 1, 1).unwrap();
    let subs = all_subgraphs(&ctx);
    assert_eq!(subs.len(), 19);
    for l in &subs {
        let family_ok = vertex_family_check(&ctx, l, FamilySearch::Exhaustive { budget: 1 << 20 })
            .unwrap()
            .holds;
        let mut shnc_ok = true;
        let lb = l.to_bigraph(&ctx);
        for lp in &subs {
            let rep = shnc_verify(&lb, &lp.to_bigraph(&ctx)).unwrap();
            shnc_ok &= rep.shnc_holds;
        }
        assert_eq!(
            family_ok, shnc_ok,
            "appendix equivalence failed on L = {l:?}"
        );
        assert!(family_ok, "both sides should hold (the inequality is a theorem)");
    }
    let elapsed = t0.elapsed();
    assert!(elapsed.as_secs() < 30, "took {elapsed:?}");
    println!("criterion 08 (vertex-family criterion == SHNC over all subgraph pairs of Cayley(Z/2;1,1)): PASS in {elapsed:?}");
}

#[test]
fn criterion_09_rho_kernel_vanishing_desk_scale() {
    let ctx = CayleyContext::new(FiniteGroup::cyclic(3).unwrap(), 1, 2).unwrap();
    let field = PrimeField::default_field();
    let mut checked = 0;
    for l in all_subgraphs(&ctx) {
        let rho = l.rho(&ctx);
        if rho == 0 {
            continue;
        }
        // no violating vertex family, exhaustively
        let rep = vertex_family_check(&ctx, &l, FamilySearch::Exhaustive { budget: 1 << 20 }).unwrap();
        assert!(rep.exhaustive && rep.holds, "family violation on {l:?}: {rep:?}");
        // kernel dimension profile n_P - rho(L) for 10 seeded Vandermonde M
        let orbit = orbit_sets(&ctx, &l);
        for seed in 0..10u64 {
            let m = vandermonde_totally_independent(rho, 3, field, 1000 + seed).unwrap();
            let kernel = build_kernel(&ctx, &l, rho, &m).unwrap();
            for v in 0..3 {
                assert_eq!(kernel.sheaf.vdim(v), orbit.vertex_sets[v].len() - rho);
            }
            for e in 0..6 {
                assert_eq!(kernel.sheaf.edim(e), orbit.edge_sets[e].len() - rho);
            }
        }
        checked += 1;
    }
    assert!(checked > 10, "expected a rich family of subgraphs, got {checked}");
    println!("criterion 09 (rho-kernel families clean + profile n_P - rho on {checked} subgraphs of Cayley(Z/3;1,2)): PASS");
}

#[test]
fn criterion_10_k_chain_property() {
    let contexts = [
        CayleyContext::new(FiniteGroup::cyclic(2).unwrap(), 1, 1).unwrap(),
        CayleyContext::new(FiniteGroup::cyclic(3).unwrap(), 1, 2).unwrap(),
    ];
    let f2 = PrimeField::new(2).unwrap();
    let f3 = PrimeField::new(3).unwrap();
    let mut instances = 0;
    for ctx in &contexts {
        let n = ctx.order();
        for l in all_subgraphs(ctx) {
            let rho = l.rho(ctx);
            if rho == 0 || rho > 2 {
                continue;
            }
            for field in [f2, f3] {
                // k = 0: every trial is exactly rho(L) |G|
                let rep = generic_excess_experiment(ctx, &l, 0, field, 3, 77, 1 << 21).unwrap();
                assert_eq!(rep.skipped, 0);
                for t in &rep.trials {
                    match t {
                        TrialOutcome::Computed { value, .. } => assert_eq!(*value, rho * n),
                        TrialOutcome::Skipped { reason } => panic!("skip: {reason}"),
                    }
                }
                // k = rho(L): modal value 0; all values divisible by |G|
                let rep = generic_excess_experiment(ctx, &l, rho, field, 8, 78, 1 << 21).unwrap();
                let computed: Vec<usize> = rep
                    .trials
                    .iter()
                    .filter_map(|t| match t {
                        TrialOutcome::Computed { value, .. } => Some(*value),
                        _ => None,
                    })
                    .collect();
                assert!(!computed.is_empty(), "no certified trials on {l:?} over GF({})", field.modulus());
                assert_eq!(rep.modal, Some(0), "modal m.e. not 0 on {l:?} over GF({}): {computed:?}", field.modulus());
                assert!(rep.all_divisible, "divisibility failed on {l:?}: {computed:?}");
                // intermediate k: divisibility of every observed value
                for k in 1..rho {
                    let rep = generic_excess_experiment(ctx, &l, k, field, 5, 79, 1 << 21).unwrap();
                    assert!(rep.all_divisible, "divisibility failed at k={k} on {l:?}");
                }
                instances += 1;
            }
        }
    }
    assert!(instances >= 20, "expected at least 20 instances, got {instances}");
    println!("criterion 10 (k-chain: k=0 gives rho|G|, k=rho modal 0, all values divisible by |G|; {instances} instances): PASS");
}

#[test]
fn criterion_11_oracle_equivalence() {
    let f2 = PrimeField::new(2).unwrap();
    let mut rng = Rng::new(0xaaaa);
    // brute == subsheaf oracle on 200 seeded GF(2) sheaves, dims <= 2
    for i in 0..200 {
        let g = random_digraph(&mut rng, 3, 3);
        let s = random_sheaf(&g, f2, 2, &mut rng);
        let a = max_excess_brute(&s, 1_000_000).unwrap().value;
        let b = max_excess_subsheaf_oracle(&s, 1_000_000).unwrap();
        assert_eq!(a, b, "oracle mismatch at instance {i}");
    }
    // edge-simple == brute on 100 edge-simple instances
    let mut done = 0;
    while done < 100 {
        let g = random_digraph(&mut rng, 3, 4);
        let vdim: Vec<usize> = (0..g.v_count()).map(|_| 1 + rng.below_usize(2)).collect();
        let edim: Vec<usize> = (0..g.e_count()).map(|_| rng.below_usize(2)).collect();
        let head = (0..g.e_count())
            .map(|e| Matrix::from_fn(f2, vdim[g.head(e)], edim[e], |_, _| rng.below(2)))
            .collect();
        let tail = (0..g.e_count())
            .map(|e| Matrix::from_fn(f2, vdim[g.tail(e)], edim[e], |_, _| rng.below(2)))
            .collect();
        let s = Sheaf::new(g.clone(), f2, vdim, edim, head, tail).unwrap();
        let opts = MaxExcessOptions {
            seed: rng.next_u64(),
            ..Default::default()
        };
        let es = max_excess_edge_simple(&s, &opts).unwrap();
        let br = max_excess_brute(&s, 1_000_000).unwrap();
        assert_eq!(es.value, br.value, "edge-simple mismatch at instance {done}");
        done += 1;
    }
    // the auto dispatcher honours the same contracts
    let s = Sheaf::structure(&Digraph::bouquet(2), PrimeField::default_field());
    let me = max_excess(&s, MaxExcessMethod::Auto, &MaxExcessOptions::default()).unwrap();
    assert_eq!((me.value, me.method), (1, "edge-simple"));
    println!("criterion 11 (brute == subsheaf oracle x200; edge-simple == brute x100): PASS");
}

#[test]
fn fibre_projections_are_coverings_when_opposite_leg_is() {
    // base-change sanity rider on criterion 03's cover generator
    let mut rng = Rng::new(0xbbbb);
    for _ in 0..50 {
        let g = random_digraph(&mut rng, 4, 5);
        let d = 1 + rng.below_usize(3);
        let cover = random_permutation_cover(&g, d, &mut rng).unwrap();
        let other = random_permutation_cover(&g, 1 + rng.below_usize(3), &mut rng).unwrap();
        let (_, p1, p2) = fibre_product(&cover, &other).unwrap();
        // p1 (to the cover's source) is a covering because `other` is one,
        // and vice versa
        assert!(matches!(classify_morphism(&p1), MorphismClass::Covering { .. }));
        assert!(matches!(classify_morphism(&p2), MorphismClass::Covering { .. }));
    }
    println!("base-change stability of coverings under fibre products: PASS");
}

#[test]
fn cli_exit_codes_and_determinism() {
    let b2 = data("b2.dg");
    let b2 = b2.to_str().unwrap();
    // identical invocations are byte-identical
    let (r1, c1) = cli(&["invariants", b2]);
    let (r2, c2) = cli(&["invariants", b2]);
    assert_eq!((r1.as_str(), c1), (r2.as_str(), c2));
    assert_eq!(c1, 0);
    assert_eq!(grab(&r1, "rho"), "1");
    // input error -> exit 2 with a machine-parsable error line
    let (r, c) = cli(&["invariants", "/nonexistent.dg"]);
    assert_eq!(c, 2);
    assert!(r.contains("error="), "{r}");
    // unknown flags rejected
    let (r, c) = cli(&["invariants", b2, "--bogus", "1"]);
    assert_eq!(c, 2);
    assert!(r.contains("error="), "{r}");
    // budget exhaustion -> exit 3
    let unhappy = data("unhappy.sheaf");
    let (r, c) = cli(&[
        "maxexcess",
        unhappy.to_str().unwrap(),
        "--method",
        "brute",
        "--prime",
        "2",
        "--budget",
        "3",
    ]);
    assert_eq!(c, 3, "{r}");
    assert!(r.contains("error="), "{r}");
    println!("CLI exit-code contract and byte determinism: PASS");
}
