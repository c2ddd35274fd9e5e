//! Combinatorial closed oriented surfaces carrying transverse curve systems.
//!
//! The mesh is a half-edge structure: arc `a` owns half-edges `2a` (forward)
//! and `2a+1` (backward); `twin(h) = h ^ 1`. `next[h]` walks the boundary of
//! the region lying on the LEFT of `h`, so region boundary cycles are
//! counterclockwise in the surface orientation and `next[twin(e)]` rotates
//! the out-edges at a vertex clockwise.
//!
//! Regions may have several boundary cycles (e.g. an annulus complement
//! component after a full bigon cancellation); `validate` reports non-disk
//! regions since the Floer counting layer requires disks away from
//! basepoints.

pub mod ops;
pub mod repr;

use std::collections::{BTreeMap, BTreeSet};

use crate::error::ComplexError;

macro_rules! id_type {
    ($name:ident, $prefix:literal) => {
        #[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(pub u32);

        impl std::fmt::Display for $name {
            fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
                write!(f, "{}{}", $prefix, self.0)
            }
        }
    };
}

id_type!(VertexId, "v");
id_type!(ArcId, "a");
id_type!(CurveId, "c");
id_type!(RegionId, "r");

/// Which curve system an embedded curve belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Alpha,
    Beta,
    Aux,
}

/// A half-edge handle; arc `a` owns `2a` (forward) and `2a+1` (backward).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HalfEdge(pub u32);

impl HalfEdge {
    pub fn forward(a: ArcId) -> Self {
        HalfEdge(a.0 * 2)
    }
    pub fn backward(a: ArcId) -> Self {
        HalfEdge(a.0 * 2 + 1)
    }
    pub fn twin(self) -> Self {
        HalfEdge(self.0 ^ 1)
    }
    pub fn arc(self) -> ArcId {
        ArcId(self.0 / 2)
    }
    pub fn is_forward(self) -> bool {
        self.0 % 2 == 0
    }
}

#[derive(Clone, Debug)]
pub struct ArcData {
    pub curve: CurveId,
    /// None/None for a free loop (closed curve with no vertices).
    pub from: Option<VertexId>,
    pub to: Option<VertexId>,
}

#[derive(Clone, Debug)]
pub struct CurveData {
    pub family: Family,
    /// Cyclic arc sequence; the bool is true when the arc is traversed
    /// forward. A free loop is a single forward entry.
    pub word: Vec<(ArcId, bool)>,
}

#[derive(Clone, Debug)]
pub struct RegionData {
    /// One representative half-edge per boundary cycle.
    pub cycles: Vec<HalfEdge>,
    /// Genus of the open region; 0 for disks and annuli.
    pub genus: u32,
}

impl RegionData {
    /// Euler characteristic 2 - 2g - #cycles.
    pub fn chi(&self) -> i64 {
        2 - 2 * self.genus as i64 - self.cycles.len() as i64
    }
    pub fn is_disk(&self) -> bool {
        self.genus == 0 && self.cycles.len() == 1
    }
}

/// A closed oriented surface with curves, realized as a half-edge mesh.
#[derive(Clone, Debug, Default)]
pub struct Mesh {
    pub genus: u32,
    next: Vec<Option<HalfEdge>>,
    region_of: Vec<Option<RegionId>>,
    arcs: BTreeMap<ArcId, ArcData>,
    pub curves: BTreeMap<CurveId, CurveData>,
    pub regions: BTreeMap<RegionId, RegionData>,
    vertices: BTreeSet<VertexId>,
    next_vertex: u32,
    next_arc: u32,
    next_curve: u32,
    next_region: u32,
}

/// What happened to a region id across a surgery.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RegionFate {
    Kept,
    /// Replaced by these regions (split); basepoint holders must not be here.
    Split(Vec<RegionId>),
    /// Absorbed into this region.
    MergedInto(RegionId),
}

/// Region id changes produced by one surgery.
#[derive(Clone, Debug, Default)]
pub struct RegionMap {
    pub fates: BTreeMap<RegionId, RegionFate>,
}

impl RegionMap {
    /// Follow a region id through the surgery; None if it was split.
    pub fn track(&self, r: RegionId) -> Option<RegionId> {
        match self.fates.get(&r) {
            None | Some(RegionFate::Kept) => Some(r),
            Some(RegionFate::MergedInto(m)) => Some(*m),
            Some(RegionFate::Split(_)) => None,
        }
    }
}

/// Diagnostic result of `validate`.
#[derive(Clone, Debug, Default)]
pub struct ValidationReport {
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl Mesh {
    pub fn new(genus: u32) -> Self {
        Mesh { genus, ..Default::default() }
    }

    // ---- id allocation ----

    pub fn fresh_vertex(&mut self) -> VertexId {
        let v = VertexId(self.next_vertex);
        self.next_vertex += 1;
        self.vertices.insert(v);
        v
    }

    pub(crate) fn fresh_region_id(&mut self) -> RegionId {
        let r = RegionId(self.next_region);
        self.next_region += 1;
        r
    }

    pub(crate) fn fresh_curve_id(&mut self) -> CurveId {
        let c = CurveId(self.next_curve);
        self.next_curve += 1;
        c
    }

    pub(crate) fn alloc_arc(&mut self, data: ArcData) -> ArcId {
        let a = ArcId(self.next_arc);
        self.next_arc += 1;
        let need = (a.0 as usize + 1) * 2;
        if self.next.len() < need {
            self.next.resize(need, None);
            self.region_of.resize(need, None);
        }
        self.arcs.insert(a, data);
        a
    }

    pub(crate) fn free_arc(&mut self, a: ArcId) {
        self.arcs.remove(&a);
        self.next[HalfEdge::forward(a).0 as usize] = None;
        self.next[HalfEdge::backward(a).0 as usize] = None;
        self.region_of[HalfEdge::forward(a).0 as usize] = None;
        self.region_of[HalfEdge::backward(a).0 as usize] = None;
    }

    pub(crate) fn remove_vertex(&mut self, v: VertexId) {
        self.vertices.remove(&v);
    }

    // ---- accessors ----

    pub fn arcs(&self) -> impl Iterator<Item = (ArcId, &ArcData)> {
        self.arcs.iter().map(|(a, d)| (*a, d))
    }

    pub fn arc(&self, a: ArcId) -> &ArcData {
        &self.arcs[&a]
    }

    pub(crate) fn arc_mut(&mut self, a: ArcId) -> &mut ArcData {
        self.arcs.get_mut(&a).expect("live arc")
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.vertices.iter().copied()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn curve(&self, c: CurveId) -> &CurveData {
        &self.curves[&c]
    }

    pub fn next(&self, h: HalfEdge) -> HalfEdge {
        self.next[h.0 as usize].expect("next of live half-edge")
    }

    pub(crate) fn set_next(&mut self, h: HalfEdge, n: HalfEdge) {
        self.next[h.0 as usize] = Some(n);
    }

    pub fn region_of(&self, h: HalfEdge) -> RegionId {
        self.region_of[h.0 as usize].expect("region of live half-edge")
    }

    pub(crate) fn set_region(&mut self, h: HalfEdge, r: RegionId) {
        self.region_of[h.0 as usize] = Some(r);
    }

    /// The vertex a half-edge points away from (None on free loops).
    pub fn tail(&self, h: HalfEdge) -> Option<VertexId> {
        let a = self.arc(h.arc());
        if h.is_forward() {
            a.from
        } else {
            a.to
        }
    }

    /// The vertex a half-edge points at.
    pub fn head(&self, h: HalfEdge) -> Option<VertexId> {
        self.tail(h.twin())
    }

    pub fn curve_of_halfedge(&self, h: HalfEdge) -> CurveId {
        self.arc(h.arc()).curve
    }

    /// Walk a full boundary cycle starting at h.
    pub fn cycle_from(&self, h: HalfEdge) -> Vec<HalfEdge> {
        let mut out = vec![h];
        let mut cur = self.next(h);
        while cur != h {
            out.push(cur);
            cur = self.next(cur);
            assert!(out.len() <= 2 * self.next.len() + 4, "runaway cycle walk");
        }
        out
    }

    /// All boundary cycles of a region, each as an explicit half-edge list.
    pub fn region_cycles(&self, r: RegionId) -> Vec<Vec<HalfEdge>> {
        self.regions[&r].cycles.iter().map(|&h| self.cycle_from(h)).collect()
    }

    /// Out half-edges at a vertex, in arbitrary (deterministic) order.
    pub fn out_halfedges(&self, v: VertexId) -> Vec<HalfEdge> {
        let mut out = Vec::new();
        for (a, d) in self.arcs.iter() {
            if d.from == Some(v) {
                out.push(HalfEdge::forward(*a));
            }
            if d.to == Some(v) {
                out.push(HalfEdge::backward(*a));
            }
        }
        out
    }

    /// Clockwise rotation of out half-edges at a vertex.
    pub fn rotate_cw(&self, e: HalfEdge) -> HalfEdge {
        self.next(e.twin())
    }

    /// All live half-edges.
    pub fn half_edges(&self) -> impl Iterator<Item = HalfEdge> + '_ {
        self.arcs.keys().flat_map(|&a| [HalfEdge::forward(a), HalfEdge::backward(a)])
    }

    /// Number of crossings between two curves.
    pub fn intersection_count(&self, c1: CurveId, c2: CurveId) -> usize {
        assert_ne!(c1, c2);
        self.vertices
            .iter()
            .filter(|&&v| {
                let curves = self.curves_at_vertex(v);
                curves.contains(&c1) && curves.contains(&c2)
            })
            .count()
    }

    /// The set of curves through a vertex (a valid vertex has exactly two).
    pub fn curves_at_vertex(&self, v: VertexId) -> BTreeSet<CurveId> {
        self.out_halfedges(v).iter().map(|&h| self.curve_of_halfedge(h)).collect()
    }

    /// Register a region from cycle representatives. Sets region_of along
    /// each cycle.
    pub(crate) fn add_region(&mut self, cycles: Vec<Vec<HalfEdge>>, genus: u32) -> RegionId {
        let r = self.fresh_region_id();
        let reps = cycles.iter().map(|c| c[0]).collect();
        for cyc in &cycles {
            for i in 0..cyc.len() {
                self.set_next(cyc[i], cyc[(i + 1) % cyc.len()]);
                self.set_region(cyc[i], r);
            }
        }
        self.regions.insert(r, RegionData { cycles: reps, genus });
        r
    }

    /// Replace the stored cycle data of an existing region.
    pub(crate) fn reset_region(&mut self, r: RegionId, cycles: Vec<Vec<HalfEdge>>, genus: u32) {
        let reps = cycles.iter().map(|c| c[0]).collect();
        for cyc in &cycles {
            for i in 0..cyc.len() {
                self.set_next(cyc[i], cyc[(i + 1) % cyc.len()]);
                self.set_region(cyc[i], r);
            }
        }
        self.regions.insert(r, RegionData { cycles: reps, genus });
    }

    /// Total Euler characteristic target for the claimed genus.
    pub fn chi_target(&self) -> i64 {
        2 - 2 * self.genus as i64
    }

    pub fn chi(&self) -> i64 {
        let v = self.vertices.len() as i64;
        let e = self.arcs.len() as i64;
        // A free loop is a circle with no 0-cell; count the implicit vertex.
        let free = self.arcs.values().filter(|d| d.from.is_none()).count() as i64;
        let f: i64 = self.regions.values().map(|r| r.chi()).sum();
        v + free - e + f
    }

    // ---- validation ----

    /// Check every stored invariant; violations are returned, not raised.
    pub fn validate(&self) -> ValidationReport {
        let mut rep = ValidationReport::default();

        // Arc endpoints reference live vertices; free loops have both None.
        for (a, d) in self.arcs.iter() {
            match (d.from, d.to) {
                (Some(f), Some(t)) => {
                    if !self.vertices.contains(&f) || !self.vertices.contains(&t) {
                        rep.violations.push(format!("arc {a} references a dead vertex"));
                    }
                }
                (None, None) => {}
                _ => rep.violations.push(format!("arc {a} has exactly one endpoint")),
            }
            if !self.curves.contains_key(&d.curve) {
                rep.violations.push(format!("arc {a} references unknown curve {}", d.curve));
            }
        }

        // Curve words: closed chains covering each arc exactly once.
        let mut seen_arcs: BTreeMap<ArcId, CurveId> = BTreeMap::new();
        for (c, data) in self.curves.iter() {
            if data.word.is_empty() {
                rep.violations.push(format!("curve {c} has an empty word"));
                continue;
            }
            for &(a, _) in &data.word {
                if !self.arcs.contains_key(&a) {
                    rep.violations.push(format!("curve {c} references dead arc {a}"));
                } else if self.arcs[&a].curve != *c {
                    rep.violations.push(format!("arc {a} in word of {c} belongs to another curve"));
                }
                if let Some(prev) = seen_arcs.insert(a, *c) {
                    rep.violations.push(format!("arc {a} appears in both {prev} and {c}"));
                }
            }
            for i in 0..data.word.len() {
                let (a, fa) = data.word[i];
                let (b, fb) = data.word[(i + 1) % data.word.len()];
                if !self.arcs.contains_key(&a) || !self.arcs.contains_key(&b) {
                    continue;
                }
                let ha = if fa { HalfEdge::forward(a) } else { HalfEdge::backward(a) };
                let hb = if fb { HalfEdge::forward(b) } else { HalfEdge::backward(b) };
                if self.head(ha) != self.tail(hb) {
                    rep.violations.push(format!(
                        "curve {c}: arc {a} does not chain to arc {b} (head/tail mismatch)"
                    ));
                }
            }
        }
        for (a, _) in self.arcs.iter() {
            if !seen_arcs.contains_key(a) {
                rep.violations.push(format!("arc {a} belongs to no curve word"));
            }
        }

        // next is defined on all live half-edges and region_of agrees along
        // cycles; every half-edge is claimed by exactly one region cycle.
        let mut claimed: BTreeSet<HalfEdge> = BTreeSet::new();
        for (r, data) in self.regions.iter() {
            for &rep_h in &data.cycles {
                if self.next[rep_h.0 as usize].is_none() {
                    rep.violations.push(format!("region {r} cycle rep is a dead half-edge"));
                    continue;
                }
                for h in self.cycle_from(rep_h) {
                    if self.region_of[h.0 as usize] != Some(*r) {
                        rep.violations
                            .push(format!("half-edge of arc {} not labeled {r}", h.arc()));
                    }
                    if !claimed.insert(h) {
                        rep.violations
                            .push(format!("half-edge of arc {} claimed twice", h.arc()));
                    }
                }
            }
        }
        for h in self.half_edges() {
            if !claimed.contains(&h) {
                rep.violations.push(format!(
                    "half-edge of arc {} ({}) not on any region boundary",
                    h.arc(),
                    if h.is_forward() { "fwd" } else { "bwd" }
                ));
            }
        }
        if !rep.ok() {
            return rep; // structure too broken for the geometric checks
        }

        // Half-edge chaining is geometric: next(h) departs from head(h).
        for h in self.half_edges() {
            let n = self.next(h);
            if self.head(h) != self.tail(n) {
                rep.violations.push(format!(
                    "next of arc {} jumps between vertices (arc {})",
                    h.arc(),
                    n.arc()
                ));
            }
        }

        // Vertices: exactly 4 arc-ends, one clockwise rotation orbit,
        // alternating between two distinct curves.
        for v in self.vertices.iter() {
            let out = self.out_halfedges(*v);
            if out.len() != 4 {
                rep.violations.push(format!("vertex {v} has {} arc-ends, wanted 4", out.len()));
                continue;
            }
            let start = out[0];
            let mut orbit = vec![start];
            let mut cur = self.rotate_cw(start);
            while cur != start && orbit.len() <= 4 {
                orbit.push(cur);
                cur = self.rotate_cw(cur);
            }
            if orbit.len() != 4 {
                rep.violations.push(format!("vertex {v} rotation orbit has size {}", orbit.len()));
                continue;
            }
            let curves: Vec<CurveId> =
                orbit.iter().map(|&h| self.curve_of_halfedge(h)).collect();
            if curves[0] != curves[2] || curves[1] != curves[3] || curves[0] == curves[1] {
                rep.violations
                    .push(format!("vertex {v} arc-ends do not alternate two distinct curves"));
            }
        }

        // Euler characteristic against the claimed genus.
        if self.chi() != self.chi_target() {
            rep.violations.push(format!(
                "Euler characteristic {} does not match genus {} (wanted {})",
                self.chi(),
                self.genus,
                self.chi_target()
            ));
        }

        // Disk regions (reported, since the Floer layer needs them).
        for (r, data) in self.regions.iter() {
            if !data.is_disk() {
                rep.violations.push(format!(
                    "region {r} is not a disk ({} boundary cycles, genus {})",
                    data.cycles.len(),
                    data.genus
                ));
            }
        }

        rep
    }

    /// True when the only violations are non-disk regions. Surgery
    /// intermediates are allowed in this state.
    pub fn structurally_valid(&self) -> bool {
        self.validate().violations.iter().all(|v| v.contains("is not a disk"))
    }
}

/// Build a mesh from explicit region boundary words. Used by fixtures and
/// deserialization. Arc/vertex/curve ids are taken as given.
pub struct MeshBuilder {
    pub genus: u32,
    pub vertices: Vec<u32>,
    /// (arc id, curve id, from vertex, to vertex); None for free loops.
    pub arcs: Vec<(u32, u32, Option<u32>, Option<u32>)>,
    /// (curve id, family, word of (arc id, forward)).
    pub curves: Vec<(u32, Family, Vec<(u32, bool)>)>,
    /// (region id, cycles of (arc id, forward)) — forward means the region
    /// lies on the left of the arc.
    pub regions: Vec<(u32, Vec<Vec<(u32, bool)>>)>,
}

impl MeshBuilder {
    pub fn build(self) -> Result<Mesh, ComplexError> {
        let mut mesh = Mesh::new(self.genus);
        for v in &self.vertices {
            mesh.vertices.insert(VertexId(*v));
            mesh.next_vertex = mesh.next_vertex.max(v + 1);
        }
        for (a, c, f, t) in &self.arcs {
            let a = ArcId(*a);
            let need = (a.0 as usize + 1) * 2;
            if mesh.next.len() < need {
                mesh.next.resize(need, None);
                mesh.region_of.resize(need, None);
            }
            if mesh
                .arcs
                .insert(
                    a,
                    ArcData {
                        curve: CurveId(*c),
                        from: f.map(VertexId),
                        to: t.map(VertexId),
                    },
                )
                .is_some()
            {
                return Err(ComplexError::Invalid(format!("duplicate arc id {a}")));
            }
            mesh.next_arc = mesh.next_arc.max(a.0 + 1);
        }
        for (c, fam, word) in &self.curves {
            let id = CurveId(*c);
            let word = word.iter().map(|&(a, f)| (ArcId(a), f)).collect();
            if mesh.curves.insert(id, CurveData { family: *fam, word }).is_some() {
                return Err(ComplexError::Invalid(format!("duplicate curve id {id}")));
            }
            mesh.next_curve = mesh.next_curve.max(c + 1);
        }
        for (r, cycles) in &self.regions {
            let id = RegionId(*r);
            let mut reps = Vec::new();
            for cyc in cycles {
                if cyc.is_empty() {
                    return Err(ComplexError::Invalid(format!("region {id} has an empty cycle")));
                }
                let hes: Vec<HalfEdge> = cyc
                    .iter()
                    .map(|&(a, f)| {
                        if f {
                            HalfEdge::forward(ArcId(a))
                        } else {
                            HalfEdge::backward(ArcId(a))
                        }
                    })
                    .collect();
                for i in 0..hes.len() {
                    let h = hes[i];
                    let n = hes[(i + 1) % hes.len()];
                    if mesh.next[h.0 as usize].is_some() {
                        return Err(ComplexError::Invalid(format!(
                            "half-edge of arc {} appears twice among region words",
                            h.arc()
                        )));
                    }
                    mesh.next[h.0 as usize] = Some(n);
                    mesh.region_of[h.0 as usize] = Some(id);
                }
                reps.push(hes[0]);
            }
            if mesh.regions.insert(id, RegionData { cycles: reps, genus: 0 }).is_some() {
                return Err(ComplexError::Invalid(format!("duplicate region id {id}")));
            }
            mesh.next_region = mesh.next_region.max(r + 1);
        }
        Ok(mesh)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn torus_s3_validates() {
        let mesh = fixtures::torus_s3().mesh;
        let rep = mesh.validate();
        assert!(rep.ok(), "violations: {:?}", rep.violations);
        assert_eq!(mesh.vertex_count(), 1);
        assert_eq!(mesh.arc_count(), 2);
        assert_eq!(mesh.regions.len(), 1);
    }

    #[test]
    fn corrupted_region_word_is_flagged() {
        // Torus with one region word entry flipped: arc no longer two-sided.
        let builder = MeshBuilder {
            genus: 1,
            vertices: vec![0],
            arcs: vec![(0, 0, Some(0), Some(0)), (1, 1, Some(0), Some(0))],
            curves: vec![
                (0, Family::Alpha, vec![(0, true)]),
                (1, Family::Beta, vec![(1, true)]),
            ],
            // (a+, b+, a+, b-) repeats a+ instead of using a-.
            regions: vec![(0, vec![vec![(0, true), (1, true), (0, true), (1, false)]])],
        };
        assert!(builder.build().is_err());
    }

    #[test]
    fn lens_space_diagrams_validate() {
        for p in 1..=7 {
            let mesh = fixtures::lens_torus(p).mesh;
            let rep = mesh.validate();
            assert!(rep.ok(), "p={p}: {:?}", rep.violations);
            assert_eq!(mesh.vertex_count(), p as usize);
            assert_eq!(mesh.regions.len(), p as usize);
        }
    }

    #[test]
    fn wrong_genus_is_flagged() {
        let mut mesh = fixtures::torus_s3().mesh;
        mesh.genus = 2;
        assert!(!mesh.validate().ok());
    }
}
