//! Hand-built diagrams used across tests: the minimal torus diagrams for
//! the three-sphere and lens spaces, and a torus carrying an aux core curve
//! for exercising Dehn twists.

use std::collections::BTreeSet;

use crate::diagram::HeegaardDiagram;
use crate::surface::{CurveId, Family, HalfEdge, Mesh, MeshBuilder, RegionId};

/// Torus diagram with |alpha ∩ beta| = p, all complementary regions squares;
/// the diagram of the lens space of order p (the three-sphere for p = 1).
///
/// Vertices v_0..v_{p-1}; alpha arcs a_i: v_i -> v_{i+1}; beta arcs
/// b_i: v_i -> v_{i+1} wrapping the other way; regions
/// R_i = [a_i+, b_{i+1}+, a_{i+1}-, b_i-]. The basepoint z sits in R_0.
pub fn lens_torus(p: u32) -> HeegaardDiagram {
    assert!(p >= 1);
    let a = |i: u32| i % p; // alpha arc ids 0..p-1
    let b = |i: u32| p + i % p; // beta arc ids p..2p-1
    let mut arcs = Vec::new();
    for i in 0..p {
        arcs.push((a(i), 0, Some(i), Some((i + 1) % p)));
    }
    for i in 0..p {
        arcs.push((b(i), 1, Some(i), Some((i + 1) % p)));
    }
    let mut regions = Vec::new();
    for i in 0..p {
        regions.push((
            i,
            vec![vec![
                (a(i), true),
                (b(i + 1), true),
                (a(i + 1), false),
                (b(i), false),
            ]],
        ));
    }
    let mesh = MeshBuilder {
        genus: 1,
        vertices: (0..p).collect(),
        arcs,
        curves: vec![
            (0, Family::Alpha, (0..p).map(|i| (a(i), true)).collect()),
            (1, Family::Beta, (0..p).map(|i| (b(i), true)).collect()),
        ],
        regions,
    }
    .build()
    .expect("lens torus builds");
    HeegaardDiagram {
        mesh,
        alpha: vec![CurveId(0)],
        beta: vec![CurveId(1)],
        z_region: RegionId(0),
        w_region: None,
        marks: None,
    }
}

/// The standard one-vertex torus diagram of the three-sphere.
pub fn torus_s3() -> HeegaardDiagram {
    lens_torus(1)
}

/// Torus with disjoint parallel alpha and beta of class (1,0) and an aux
/// core curve of class (0,1) crossing each once. Used by the twist tests.
pub fn torus_with_aux_core() -> Mesh {
    // Vertices: u = alpha x core, w = beta x core.
    // Arcs: a: u->u (alpha), b: w->w (beta), c1: u->w, c2: w->u (core).
    // Regions: R1 = [a+, c1+, b-, c1-], R2 = [b+, c2+, a-, c2-].
    MeshBuilder {
        genus: 1,
        vertices: vec![0, 1],
        arcs: vec![
            (0, 0, Some(0), Some(0)),
            (1, 1, Some(1), Some(1)),
            (2, 2, Some(0), Some(1)),
            (3, 2, Some(1), Some(0)),
        ],
        curves: vec![
            (0, Family::Alpha, vec![(0, true)]),
            (1, Family::Beta, vec![(1, true)]),
            (2, Family::Aux, vec![(2, true), (3, true)]),
        ],
        regions: vec![
            (0, vec![vec![(0, true), (2, true), (1, false), (2, false)]]),
            (1, vec![vec![(1, true), (3, true), (0, false), (3, false)]]),
        ],
    }
    .build()
    .expect("torus with core builds")
}

/// First curve of the given family.
pub fn curve_by_family(mesh: &Mesh, family: Family) -> CurveId {
    mesh.curves
        .iter()
        .find(|(_, d)| d.family == family)
        .map(|(c, _)| *c)
        .expect("curve of family present")
}

/// A legal finger move candidate pushing an arc of `t` over an arc of `b`:
/// two half-edges bounding a common region on their left.
pub fn finger_candidate(mesh: &Mesh, t: CurveId, b: CurveId) -> Option<(HalfEdge, HalfEdge)> {
    finger_candidate_avoiding(mesh, t, b, &BTreeSet::new())
}

/// Like `finger_candidate` but skipping the given through-regions.
pub fn finger_candidate_avoiding(
    mesh: &Mesh,
    t: CurveId,
    b: CurveId,
    avoid: &BTreeSet<RegionId>,
) -> Option<(HalfEdge, HalfEdge)> {
    let mut regions: Vec<RegionId> = mesh.regions.keys().copied().collect();
    regions.sort();
    for r in regions {
        if avoid.contains(&r) {
            continue;
        }
        for cyc in mesh.region_cycles(r) {
            let ha = cyc.iter().copied().find(|&h| mesh.curve_of_halfedge(h) == t);
            let hb = cyc.iter().copied().find(|&h| mesh.curve_of_halfedge(h) == b);
            if let (Some(ha), Some(hb)) = (ha, hb) {
                if ha.arc() != hb.arc() {
                    return Some((ha, hb));
                }
            }
        }
    }
    None
}

/// All lens-space fixtures plus the genus-two identity diagram are used by
/// the acceptance suite; this helper names them uniformly.
pub fn lens_fixture_orders() -> BTreeSet<u32> {
    (2..=7).collect()
}
