//! Heegaard diagrams: a curve-carrying surface plus the attaching-circle
//! role assignment and basepoints.

use std::collections::BTreeSet;

use crate::error::SurgeryError;
use crate::surface::{ops::Side, CurveId, Family, HalfEdge, Mesh, RegionId, RegionMap, VertexId};

/// Marked regions of a Dehn-twist triple, in the local model near the
/// twist site, plus the generator pairing data recorded during the local
/// twist construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Marks {
    pub dstar: RegionId,
    pub dstarstar: RegionId,
    pub dz: RegionId,
    pub dw: RegionId,
}

/// A Heegaard diagram: the surface, alpha/beta attaching circles (aux
/// curves may coexist in the mesh), basepoints and optional marks.
#[derive(Clone, Debug)]
pub struct HeegaardDiagram {
    pub mesh: Mesh,
    pub alpha: Vec<CurveId>,
    pub beta: Vec<CurveId>,
    pub z_region: RegionId,
    pub w_region: Option<RegionId>,
    pub marks: Option<Marks>,
}

impl HeegaardDiagram {
    /// Diagram-level validation: mesh invariants plus attaching-circle
    /// counts and disjointness.
    pub fn validate(&self) -> crate::surface::ValidationReport {
        let mut rep = self.mesh.validate();
        if self.alpha.len() != self.beta.len() {
            rep.violations.push(format!(
                "{} alpha curves vs {} beta curves",
                self.alpha.len(),
                self.beta.len()
            ));
        }
        if self.alpha.len() != self.mesh.genus as usize {
            rep.violations.push(format!(
                "{} attaching circles on a genus {} surface",
                self.alpha.len(),
                self.mesh.genus
            ));
        }
        for (list, family) in [(&self.alpha, Family::Alpha), (&self.beta, Family::Beta)] {
            for c in list {
                match self.mesh.curves.get(c) {
                    None => rep.violations.push(format!("missing attaching circle {c}")),
                    Some(d) if d.family != family => {
                        rep.violations.push(format!("curve {c} has the wrong family tag"))
                    }
                    _ => {}
                }
            }
        }
        // Same-family curves must be pairwise disjoint.
        for list in [&self.alpha, &self.beta] {
            for (i, &c1) in list.iter().enumerate() {
                for &c2 in list.iter().skip(i + 1) {
                    if self.mesh.intersection_count(c1, c2) > 0 {
                        rep.violations.push(format!("curves {c1} and {c2} intersect"));
                    }
                }
            }
        }
        if !self.mesh.regions.contains_key(&self.z_region) {
            rep.violations.push(format!("z region {} missing", self.z_region));
        }
        if let Some(w) = self.w_region {
            if !self.mesh.regions.contains_key(&w) {
                rep.violations.push(format!("w region {w} missing"));
            }
            if w == self.z_region {
                rep.violations.push("z and w share a region".into());
            }
        }
        rep
    }

    fn basepoint_regions(&self) -> BTreeSet<RegionId> {
        let mut out = BTreeSet::from([self.z_region]);
        if let Some(w) = self.w_region {
            out.insert(w);
        }
        if let Some(m) = &self.marks {
            out.extend([m.dstar, m.dstarstar, m.dz, m.dw]);
        }
        out
    }

    fn retrack(&mut self, map: &RegionMap) -> Result<(), SurgeryError> {
        let follow = |r: RegionId| -> Result<RegionId, SurgeryError> {
            map.track(r).ok_or_else(|| SurgeryError::CrossesBasepointRegion(r.to_string()))
        };
        self.z_region = follow(self.z_region)?;
        if let Some(w) = self.w_region {
            self.w_region = Some(follow(w)?);
        }
        if let Some(m) = self.marks.clone() {
            self.marks = Some(Marks {
                dstar: follow(m.dstar)?,
                dstarstar: follow(m.dstarstar)?,
                dz: follow(m.dz)?,
                dw: follow(m.dw)?,
            });
        }
        Ok(())
    }

    /// Dehn twist of the target curves along an embedded aux curve; returns
    /// a fresh diagram.
    pub fn dehn_twist(
        &self,
        c: CurveId,
        sign: i8,
        targets: &BTreeSet<CurveId>,
    ) -> Result<HeegaardDiagram, SurgeryError> {
        let mut out = self.clone();
        let map = out.mesh.dehn_twist(c, sign, targets)?;
        out.retrack(&map)?;
        Ok(out)
    }

    /// Cancel empty bigons between two curves until none remain; bigons
    /// holding a basepoint are refused.
    pub fn reduce_bigons(&self, pair: (CurveId, CurveId)) -> Result<HeegaardDiagram, SurgeryError> {
        let mut out = self.clone();
        let forbidden = out.basepoint_regions();
        // A bigon containing a basepoint is an error per the contract, not
        // a skip: check before reducing.
        if let Some(g) = out.mesh.find_bigon(pair, &BTreeSet::new()) {
            if forbidden.contains(&g) && out.mesh.find_bigon(pair, &forbidden).is_none() {
                return Err(SurgeryError::BasepointInBigon(g.to_string()));
            }
        }
        let map = out.mesh.reduce_bigons(pair, &forbidden)?;
        out.retrack(&map)?;
        Ok(out)
    }

    /// Cancel empty bigons between every alpha/beta and aux/beta pair.
    pub fn reduce_all_bigons(&self) -> Result<HeegaardDiagram, SurgeryError> {
        let mut out = self.clone();
        loop {
            let forbidden = out.basepoint_regions();
            let curves: Vec<CurveId> = out.mesh.curves.keys().copied().collect();
            let mut found = None;
            'outer: for (i, &c1) in curves.iter().enumerate() {
                for &c2 in curves.iter().skip(i + 1) {
                    if out.mesh.find_bigon((c1, c2), &forbidden).is_some() {
                        found = Some((c1, c2));
                        break 'outer;
                    }
                }
            }
            let Some(pair) = found else { break };
            let map = out.mesh.reduce_bigons(pair, &forbidden)?;
            out.retrack(&map)?;
        }
        Ok(out)
    }

    /// Finger move: push the arc under `h_a` across the region on its left
    /// and over the arc of `h_b`. Refuses to split a basepoint region unless
    /// `allow_through_basepoints` is set by the caller.
    pub fn finger_move(
        &self,
        h_a: HalfEdge,
        h_b: HalfEdge,
        allow_through_basepoints: bool,
    ) -> Result<HeegaardDiagram, SurgeryError> {
        self.finger_move_with_tongue(h_a, h_b, allow_through_basepoints).map(|(d, _)| d)
    }

    /// Like `finger_move` but also returns the new tongue bigon.
    pub fn finger_move_with_tongue(
        &self,
        h_a: HalfEdge,
        h_b: HalfEdge,
        allow_through_basepoints: bool,
    ) -> Result<(HeegaardDiagram, RegionId), SurgeryError> {
        let mut out = self.clone();
        let through = out.mesh.region_of(h_a);
        if !allow_through_basepoints && out.basepoint_regions().contains(&through) {
            return Err(SurgeryError::CrossesBasepointRegion(through.to_string()));
        }
        let outcome = out.mesh.finger_move(h_a, h_b)?;
        out.retrack(&outcome.region_map)?;
        Ok((out, outcome.tongue))
    }

    /// Insert a parallel copy of a curve (exposed for the twist-triple
    /// construction).
    pub fn insert_parallel_copy(
        &mut self,
        c: CurveId,
        side: Side,
        family: Family,
    ) -> Result<crate::surface::ops::ParallelCopy, SurgeryError> {
        let copy = self.mesh.insert_parallel_copy(c, side, family)?;
        self.retrack(&copy.region_map)?;
        Ok(copy)
    }

    /// Remove every crossing between two isotopically-disjoint curves by
    /// bigon cancellations and crossing slides. A slide is the triangle
    /// move in primitive form: finger `c1` across `c2` at a crossing corner
    /// and cancel the bigon trapping the old crossing, which carries the
    /// crossing one step along `c2`. Sliding monotonically in the stored
    /// direction of `c2` makes the crossing meet its cancelling partner.
    pub fn separate_curves(
        &self,
        c1: CurveId,
        c2: CurveId,
    ) -> Result<HeegaardDiagram, SurgeryError> {
        let mut out = self.clone();
        let mut budget = 10_000usize;
        while out.mesh.intersection_count(c1, c2) > 0 {
            budget = budget.checked_sub(1).ok_or_else(|| {
                SurgeryError::Invalid(format!("separating {c1} and {c2} did not converge"))
            })?;
            let forbidden = out.basepoint_regions();
            if out.mesh.find_bigon((c1, c2), &forbidden).is_some() {
                let map = out.mesh.reduce_bigons((c1, c2), &forbidden)?;
                out.retrack(&map)?;
                continue;
            }
            // Slide some crossing one step along c2's stored direction.
            // Slide the freshest crossing so the others stay put and the
            // chase terminates.
            let mut crossings: Vec<VertexId> = out
                .mesh
                .vertices()
                .filter(|&v| {
                    let cs = out.mesh.curves_at_vertex(v);
                    cs.contains(&c1) && cs.contains(&c2)
                })
                .collect();
            crossings.sort_by(|a, b| b.cmp(a));
            if std::env::var("HFDT_DEBUG_SLIDE").is_ok() {
                eprintln!("iter: crossings {crossings:?} budget {budget}");
            }
            let mut slid = false;
            'try_crossings: for &x in &crossings {
                // h3: the out-edge at x along c2's traversal direction.
                let h3 = out
                    .mesh
                    .out_halfedges(x)
                    .into_iter()
                    .filter(|&h| out.mesh.curve_of_halfedge(h) == c2)
                    .find(|&h| {
                        let word = &out.mesh.curve(c2).word;
                        word.iter().any(|&e| {
                            let he = if e.1 {
                                crate::surface::HalfEdge::forward(e.0)
                            } else {
                                crate::surface::HalfEdge::backward(e.0)
                            };
                            he == h
                        })
                    })
                    .expect("directed out-edge along c2");
                // Corner A: in-edge p with next(p) = h3; corner B mirrors it.
                let p = {
                    let mut found = None;
                    for cand in out.mesh.out_halfedges(x) {
                        let h_in = cand.twin();
                        if out.mesh.next(h_in) == h3 {
                            found = Some(h_in);
                            break;
                        }
                    }
                    found.expect("corner leading onto h3")
                };
                let attempts = [
                    (p, h3),
                    (out.mesh.next(h3.twin()), h3.twin()),
                ];
                for (h_a, h_b) in attempts {
                    if out.mesh.curve_of_halfedge(h_a) != c1 {
                        continue;
                    }
                    if forbidden.contains(&out.mesh.region_of(h_a)) {
                        continue;
                    }
                    let Ok((mut next, tongue)) = out.finger_move_with_tongue(h_a, h_b, false)
                    else {
                        continue;
                    };
                    let skip: BTreeSet<RegionId> = BTreeSet::from([tongue])
                        .union(&next.basepoint_regions())
                        .copied()
                        .collect();
                    let Some(bigon) = next.mesh.find_bigon((c1, c2), &skip) else {
                        continue;
                    };
                    let map = next.mesh.cancel_bigon(bigon, c1)?;
                    next.retrack(&map)?;
                    out = next;
                    slid = true;
                    break 'try_crossings;
                }
            }
            if !slid {
                return Err(SurgeryError::Invalid(format!(
                    "no slide available while separating {c1} and {c2}"
                )));
            }
        }
        Ok(out)
    }
}
