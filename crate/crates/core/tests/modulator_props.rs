use kpath_core::decomposition::{binarize, edge_components, make_connected, restrict, TreeDecomposition};
use kpath_core::graph::{brute_force_k_path, for_each_k_path, is_guarded};
use kpath_core::harness::{generate, GeneratorSpec, GraphKind};
use kpath_core::modulator::{
    build_path_families, find_uvk_path, mark_decomposition, ComponentContext, ModulatorInstance, PathFamilyIndex,
};
use kpath_core::{Graph, Path, VertexId, VertexSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn instance(rng: &mut ChaCha8Rng, max_n: usize) -> ModulatorInstance {
    let ell = rng.gen_range(1..=3);
    let eta = rng.gen_range(1..=2);
    let spec = GeneratorSpec {
        n: rng.gen_range(ell + 4..=max_n),
        kind: GraphKind::PartialKTree { eta, keep: rng.gen_range(0.5..=1.0) },
        modulator_size: ell,
        modulator_edge_prob: rng.gen_range(0.2..0.6),
        seed: rng.gen(),
        k: rng.gen_range(3..=6),
    };
    generate(&spec).unwrap()
}

fn prepared(inst: &ModulatorInstance) -> (Graph, TreeDecomposition) {
    let rest = inst.graph.induced_subgraph(&inst.rest()).unwrap();
    let td = restrict(&inst.decomposition, &rest.vertex_set());
    let td = binarize(&rest, &make_connected(&rest, &td).unwrap()).unwrap();
    (rest, td)
}

#[test]
fn some_k_path_is_neat_for_every_component() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let (mut checked, mut components) = (0, 0);
    while checked < 60 {
        let inst = instance(&mut rng, 16);
        if brute_force_k_path(&inst.graph, inst.k).unwrap().is_none() {
            continue;
        }
        checked += 1;
        let (_, td) = prepared(&inst);
        let families = build_path_families(&inst).unwrap();
        let (b2, _) = mark_decomposition(&inst, &td, &families.a1).unwrap();
        for comp in edge_components(&td, &b2).unwrap() {
            let m = 2;
            if comp.vertices(&td).len() <= m {
                continue;
            }
            components += 1;
            let ctx = ComponentContext::new(&inst, &td, &b2, comp, m).unwrap();
            let inner: VertexSet = ctx.v_d.difference(&ctx.s_d).copied().collect();
            let nbhd = inst.graph.open_neighborhood(&inner).unwrap();
            let anchors: VertexSet = nbhd.intersection(&ctx.s_d).copied().collect();
            let mut neat = false;
            for_each_k_path(&inst.graph, inst.k, 32, |p| {
                neat = is_guarded(&inst.graph, p, &inner, &anchors).unwrap();
                !neat
            })
            .unwrap();
            assert!(neat, "no neat k-path for component at t0 = {:?} (k = {})", ctx.t0, inst.k);
        }
    }
    assert!(components > 0);
}

fn family_paths_are_well_formed(inst: &ModulatorInstance, families: &PathFamilyIndex) {
    for f in &families.families {
        let mut internal = VertexSet::new();
        for p in &f.paths {
            assert!(p.is_valid_in(&inst.graph));
            assert_eq!(p.first(), Some(f.u));
            let outside: Vec<VertexId> = p.vertices().iter().copied().filter(|v| !inst.modulator.contains(v)).collect();
            assert_eq!(outside.len(), f.k_prime);
            match f.v {
                Some(v) => assert_eq!(p.last(), Some(v)),
                None => assert!(p.len() == 1 || !inst.modulator.contains(&p.last().unwrap())),
            }
            // paths of one family share no vertex outside the modulator
            for x in outside {
                assert!(internal.insert(x), "family paths overlap at {x}");
            }
        }
        assert!(f.paths.len() <= inst.k + 1);
        if !f.truncated && f.k_prime > 0 {
            let more = find_uvk_path(&inst.graph, &inst.modulator, f.u, f.v, f.k_prime, &internal).unwrap();
            assert!(more.is_none(), "family ({:?}, {:?}, {}) is not maximal", f.u, f.v, f.k_prime);
        }
    }
}

#[test]
fn families_are_disjoint_and_maximal_below_the_cap() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for _ in 0..80 {
        let inst = instance(&mut rng, 20);
        let families = build_path_families(&inst).unwrap();
        family_paths_are_well_formed(&inst, &families);
        let from_families: VertexSet = families.families.iter().flat_map(|f| f.outside(&inst.modulator)).collect();
        assert_eq!(from_families, families.a1);
    }
}

/// Maximal pieces of `p` that start and end in `m` with everything between outside `m`.
fn modulator_segments(p: &[VertexId], m: &VertexSet) -> Vec<(usize, usize)> {
    let at: Vec<usize> = (0..p.len()).filter(|&i| m.contains(&p[i])).collect();
    at.windows(2).filter(|w| w[1] > w[0] + 1).map(|w| (w[0], w[1])).collect()
}

#[test]
fn family_paths_can_replace_segments() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let mut swaps = 0;
    for _ in 0..80 {
        let inst = instance(&mut rng, 16);
        let Some(p) = brute_force_k_path(&inst.graph, inst.k).unwrap() else {
            continue;
        };
        let families = build_path_families(&inst).unwrap();
        let vs = p.vertices();
        for (i, j) in modulator_segments(vs, &inst.modulator) {
            let Some(f) = families.get(vs[i], Some(vs[j]), j - i - 1) else {
                continue;
            };
            let others: VertexSet = vs[..i].iter().chain(&vs[j + 1..]).copied().collect();
            for q in &f.paths {
                let mut inner: Vec<VertexId> = q.vertices()[1..q.len() - 1].to_vec();
                if q.first() != Some(vs[i]) {
                    inner.reverse();
                }
                if inner.iter().any(|x| others.contains(x)) {
                    continue;
                }
                let swapped: Vec<VertexId> =
                    vs[..=i].iter().copied().chain(inner).chain(vs[j..].iter().copied()).collect();
                let swapped = Path(swapped);
                assert!(swapped.len() == inst.k && swapped.is_valid_in(&inst.graph));
                swaps += 1;
            }
        }
    }
    assert!(swaps > 0);
}
