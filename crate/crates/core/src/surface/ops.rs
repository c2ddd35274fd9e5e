//! Surgery primitives on the half-edge mesh: arc splitting, parallel curve
//! insertion, crossing smoothing, finger moves, bigon cancellation, and the
//! Dehn twist built out of them.
//!
//! Every operation keeps the mesh structurally valid and returns a
//! `RegionMap` describing what happened to region ids, so diagram-level
//! wrappers can track basepoints and marks. Interior states may briefly
//! contain bivalent vertices; operations restore 4-valence before returning.

use std::collections::{BTreeMap, BTreeSet};

use super::{
    ArcData, ArcId, CurveId, Family, HalfEdge, Mesh, RegionFate, RegionId, RegionMap, VertexId,
};
use crate::error::SurgeryError;

/// Which side of a directed curve traversal.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Result of inserting a parallel copy of a closed curve.
#[derive(Clone, Debug)]
pub struct ParallelCopy {
    pub curve: CurveId,
    /// New crossing vertices, aligned with the base curve's word entries:
    /// `crossings[k]` sits on the strand through the head of entry k.
    pub crossings: Vec<VertexId>,
    pub region_map: RegionMap,
}

#[derive(Clone, Debug)]
pub struct FingerMoveOutcome {
    pub region_map: RegionMap,
    /// The new bigon carved out of the far side of the crossed arc.
    pub tongue: RegionId,
    pub new_vertices: [VertexId; 2],
}

impl RegionMap {
    /// Compose: apply `later` after `self`.
    pub fn then(&self, later: &RegionMap) -> RegionMap {
        let mut out = RegionMap::default();
        let resolve = |r: RegionId| -> RegionFate {
            match later.fates.get(&r) {
                None | Some(RegionFate::Kept) => RegionFate::Kept,
                Some(f) => f.clone(),
            }
        };
        for (r, fate) in &self.fates {
            let combined = match fate {
                RegionFate::Kept => resolve(*r),
                RegionFate::MergedInto(m) => match resolve(*m) {
                    RegionFate::Kept => RegionFate::MergedInto(*m),
                    f => f,
                },
                RegionFate::Split(parts) => {
                    let mut acc = Vec::new();
                    for p in parts {
                        match resolve(*p) {
                            RegionFate::Kept => acc.push(*p),
                            RegionFate::MergedInto(m) => acc.push(m),
                            RegionFate::Split(sub) => acc.extend(sub),
                        }
                    }
                    acc.sort();
                    acc.dedup();
                    RegionFate::Split(acc)
                }
            };
            out.fates.insert(*r, combined);
        }
        for (r, fate) in &later.fates {
            out.fates.entry(*r).or_insert_with(|| fate.clone());
        }
        out
    }
}

fn halfedge_of(entry: (ArcId, bool)) -> HalfEdge {
    if entry.1 {
        HalfEdge::forward(entry.0)
    } else {
        HalfEdge::backward(entry.0)
    }
}

/// Rotate `cycle` so it starts at `h`.
fn rotated(cycle: &[HalfEdge], h: HalfEdge) -> Vec<HalfEdge> {
    let p = cycle.iter().position(|&x| x == h).expect("half-edge in cycle");
    let mut out = Vec::with_capacity(cycle.len());
    out.extend_from_slice(&cycle[p..]);
    out.extend_from_slice(&cycle[..p]);
    out
}

/// Replace the first occurrence of the consecutive pattern (cyclically) in
/// the list with the replacement. Returns true if it matched.
fn splice_pattern(cycle: &mut Vec<HalfEdge>, pattern: &[HalfEdge], repl: &[HalfEdge]) -> bool {
    let n = cycle.len();
    if n < pattern.len() {
        return false;
    }
    for start in 0..n {
        if (0..pattern.len()).all(|i| cycle[(start + i) % n] == pattern[i]) {
            let rot: Vec<HalfEdge> = (0..n).map(|i| cycle[(start + i) % n]).collect();
            let mut out = repl.to_vec();
            out.extend_from_slice(&rot[pattern.len()..]);
            *cycle = out;
            return true;
        }
    }
    false
}

impl Mesh {
    fn prev_in_cycle(&self, h: HalfEdge) -> HalfEdge {
        let mut cur = h;
        loop {
            let n = self.next(cur);
            if n == h {
                return cur;
            }
            cur = n;
        }
    }

    /// Find the position of an arc in its curve's word.
    fn word_position(&self, a: ArcId) -> (CurveId, usize) {
        let c = self.arc(a).curve;
        let pos = self.curves[&c]
            .word
            .iter()
            .position(|&(w, _)| w == a)
            .expect("arc present in its curve word");
        (c, pos)
    }

    /// Replace the word entry for `a` by the pieces, given in the stored
    /// forward direction of `a`.
    fn replace_word_entry(&mut self, a: ArcId, replacement: Vec<(ArcId, bool)>) {
        self.replace_word_entry_directed(HalfEdge::forward(a), replacement);
    }

    /// Replace the word entry for the arc of `dir`, where the replacement
    /// pieces are given in the direction of `dir`.
    fn replace_word_entry_directed(&mut self, dir: HalfEdge, replacement: Vec<(ArcId, bool)>) {
        let (c, pos) = self.word_position(dir.arc());
        let matches = halfedge_of(self.curves[&c].word[pos]) == dir;
        let word = &mut self.curves.get_mut(&c).unwrap().word;
        let insert: Vec<(ArcId, bool)> = if matches {
            replacement
        } else {
            replacement.into_iter().rev().map(|(x, f)| (x, !f)).collect()
        };
        word.splice(pos..=pos, insert);
    }

    /// Split arc `s` at a fresh vertex; returns (from-side piece, to-side
    /// piece, vertex).
    pub fn split_arc(&mut self, s: ArcId) -> (ArcId, ArcId, VertexId) {
        let data = self.arc(s).clone();
        let (from, to) = (
            data.from.expect("cannot split a free loop"),
            data.to.expect("cannot split a free loop"),
        );
        let m = self.fresh_vertex();
        let s1 = self.alloc_arc(ArcData { curve: data.curve, from: Some(from), to: Some(m) });
        let s2 = self.alloc_arc(ArcData { curve: data.curve, from: Some(m), to: Some(to) });
        self.replace_word_entry(s, vec![(s1, true), (s2, true)]);

        let subs: BTreeMap<HalfEdge, Vec<HalfEdge>> = [
            (HalfEdge::forward(s), vec![HalfEdge::forward(s1), HalfEdge::forward(s2)]),
            (HalfEdge::backward(s), vec![HalfEdge::backward(s2), HalfEdge::backward(s1)]),
        ]
        .into_iter()
        .collect();
        self.substitute_in_faces(&subs);
        self.free_arc(s);
        (s1, s2, m)
    }

    /// Rewrite face cycles, expanding each key half-edge into its replacement
    /// sequence. Faces keep their ids, cycle counts and genus.
    fn substitute_in_faces(&mut self, subs: &BTreeMap<HalfEdge, Vec<HalfEdge>>) {
        let mut affected: BTreeSet<RegionId> = BTreeSet::new();
        for h in subs.keys() {
            affected.insert(self.region_of(*h));
        }
        for r in affected {
            let genus = self.regions[&r].genus;
            let old = self.region_cycles(r);
            let new: Vec<Vec<HalfEdge>> = old
                .into_iter()
                .map(|cyc| {
                    cyc.into_iter()
                        .flat_map(|h| subs.get(&h).cloned().unwrap_or_else(|| vec![h]))
                        .collect()
                })
                .collect();
            self.reset_region(r, new, genus);
        }
    }

    // ------------------------------------------------------------------
    // Parallel copy insertion
    // ------------------------------------------------------------------

    /// Insert a closed curve parallel to `c` on the given side of its stored
    /// traversal. The copy crosses, once each, exactly the strands crossing
    /// `c`, with no crossing of `c` itself.
    pub fn insert_parallel_copy(
        &mut self,
        c: CurveId,
        side: Side,
        family: Family,
    ) -> Result<ParallelCopy, SurgeryError> {
        let word = self.curves[&c].word.clone();
        if word.iter().any(|&(a, _)| self.arc(a).from.is_none()) {
            return Err(SurgeryError::Invalid(format!(
                "cannot run a parallel copy along free loop {c}"
            )));
        }
        let hs: Vec<HalfEdge> = match side {
            Side::Left => word.iter().map(|&e| halfedge_of(e)).collect(),
            Side::Right => word.iter().rev().map(|&e| halfedge_of(e).twin()).collect(),
        };
        let m = hs.len();

        // Split each left-exit strand near the vertex at the head of hs[k].
        let mut crossing: Vec<VertexId> = Vec::with_capacity(m);
        for &h in &hs {
            let exit = self.next(h);
            if self.curve_of_halfedge(exit) == c {
                return Err(SurgeryError::Invalid(format!(
                    "degenerate corner along {c}: left exit stays on the curve"
                )));
            }
            let (_, _, vk) = self.split_arc(exit.arc());
            crossing.push(vk);
        }
        // Near pieces are stable now; re-derive the out-edges toward them.
        let near_out: Vec<HalfEdge> = hs.iter().map(|&h| self.next(h)).collect();
        for (k, &out) in near_out.iter().enumerate() {
            debug_assert_eq!(self.head(out), Some(crossing[k]));
        }

        // New copy arcs c_k: crossing[k-1] -> crossing[k], parallel to hs[k].
        let copy_curve = self.fresh_curve_id();
        let mut copy_arcs = Vec::with_capacity(m);
        for k in 0..m {
            let prev = crossing[(k + m - 1) % m];
            let a = self.alloc_arc(ArcData {
                curve: copy_curve,
                from: Some(prev),
                to: Some(crossing[k]),
            });
            copy_arcs.push(a);
        }
        self.curves.insert(
            copy_curve,
            super::CurveData { family, word: copy_arcs.iter().map(|&a| (a, true)).collect() },
        );

        // Face surgery: in the face left of hs[k], the consecutive triple
        // [twin(near_out[k-1]), hs[k], near_out[k]] becomes the copy arc;
        // the triple plus the copy's far side forms a new sliver quad.
        let mut region_map = RegionMap::default();
        let mut by_region: BTreeMap<RegionId, Vec<usize>> = BTreeMap::new();
        for (k, &h) in hs.iter().enumerate() {
            by_region.entry(self.region_of(h)).or_default().push(k);
        }
        for (r, ks) in by_region {
            let genus = self.regions[&r].genus;
            let mut cycles = self.region_cycles(r);
            for &k in &ks {
                let t0 = near_out[(k + m - 1) % m].twin();
                let pattern = [t0, hs[k], near_out[k]];
                let repl = [HalfEdge::forward(copy_arcs[k])];
                let matched = cycles.iter_mut().any(|cyc| splice_pattern(cyc, &pattern, &repl));
                assert!(matched, "parallel-copy triple not found in region {r}");
            }
            self.reset_region(r, cycles, genus);
            region_map.fates.insert(r, RegionFate::Kept);
            for k in ks {
                let sliver = vec![
                    near_out[(k + m - 1) % m].twin(),
                    hs[k],
                    near_out[k],
                    HalfEdge::backward(copy_arcs[k]),
                ];
                self.add_region(vec![sliver], 0);
            }
        }
        debug_assert_eq!(self.chi(), self.chi_target());
        Ok(ParallelCopy { curve: copy_curve, crossings: crossing, region_map })
    }

    // ------------------------------------------------------------------
    // Crossing smoothing (oriented connect sum of two curves)
    // ------------------------------------------------------------------

    fn reverse_curve(&mut self, c: CurveId) {
        let data = self.curves.get_mut(&c).unwrap();
        data.word.reverse();
        for e in data.word.iter_mut() {
            e.1 = !e.1;
        }
    }

    /// Merge two arcs meeting head-to-tail through a bivalent passage:
    /// requires next(ha) == hb and next(twin(hb)) == twin(ha). When ha == hb
    /// a loop arc closes into a free loop. Returns the merged arc.
    fn dissolve_passage(&mut self, ha: HalfEdge, hb: HalfEdge) -> ArcId {
        debug_assert_eq!(self.next(ha), hb);
        debug_assert_eq!(self.next(hb.twin()), ha.twin());
        let curve = self.curve_of_halfedge(ha);
        debug_assert_eq!(curve, self.curve_of_halfedge(hb));

        if ha == hb {
            // Close a loop arc into a free loop.
            let a = ha.arc();
            let loop_arc = self.alloc_arc(ArcData { curve, from: None, to: None });
            let new_h = if ha.is_forward() {
                HalfEdge::forward(loop_arc)
            } else {
                HalfEdge::backward(loop_arc)
            };
            let subs: BTreeMap<HalfEdge, Vec<HalfEdge>> =
                [(ha, vec![new_h]), (ha.twin(), vec![new_h.twin()])].into_iter().collect();
            self.substitute_in_faces(&subs);
            let (c, pos) = self.word_position(a);
            self.curves.get_mut(&c).unwrap().word[pos] = (loop_arc, true);
            self.free_arc(a);
            return loop_arc;
        }

        let a = ha.arc();
        let b = hb.arc();
        let tail = self.tail(ha);
        let head = self.head(hb);
        let merged = self.alloc_arc(ArcData { curve, from: tail, to: head });
        let mf = HalfEdge::forward(merged);
        let subs: BTreeMap<HalfEdge, Vec<HalfEdge>> = [
            (ha, vec![mf]),
            (hb, vec![]),
            (hb.twin(), vec![mf.twin()]),
            (ha.twin(), vec![]),
        ]
        .into_iter()
        .collect();
        self.substitute_in_faces(&subs);

        // Word: the entries for a and b are adjacent; replace by merged.
        let (c, pos_a) = self.word_position(a);
        let word = &mut self.curves.get_mut(&c).unwrap().word;
        let n = word.len();
        let traverses_ha = halfedge_of(word[pos_a]) == ha;
        if traverses_ha {
            let pos_b = (pos_a + 1) % n;
            debug_assert_eq!(word[pos_b].0, b);
            word[pos_a] = (merged, true);
            word.remove(pos_b);
        } else {
            let pos_b = (pos_a + n - 1) % n;
            debug_assert_eq!(word[pos_b].0, b);
            word[pos_a] = (merged, false);
            word.remove(pos_b);
        }
        self.free_arc(a);
        self.free_arc(b);
        merged
    }

    /// Smooth the crossing at the tail of `e0` by joining arc-end pairs
    /// (e0, e1) and (e2, e3), where e1 = rotate_cw(e0) and so on. The two
    /// curves through the vertex merge into one curve with the given family.
    pub fn smooth_crossing(
        &mut self,
        e0: HalfEdge,
        merged_family: Family,
    ) -> Result<RegionMap, SurgeryError> {
        let v = self
            .tail(e0)
            .ok_or_else(|| SurgeryError::Invalid("smoothing needs a vertex".into()))?;
        let e1 = self.rotate_cw(e0);
        let e2 = self.rotate_cw(e1);
        let e3 = self.rotate_cw(e2);
        if self.rotate_cw(e3) != e0 || [e1, e2, e3].contains(&e0) {
            return Err(SurgeryError::Invalid(format!("vertex {v} is not 4-valent")));
        }
        let ca = self.curve_of_halfedge(e0);
        let cb = self.curve_of_halfedge(e1);
        if ca == cb {
            return Err(SurgeryError::Invalid(format!(
                "cannot smooth a self-crossing of {ca} at {v}"
            )));
        }

        // Step 1: merge/split the two opposite corner regions. Old corners:
        // (twin(e1) -> e2) and (twin(e3) -> e0); new: (twin(e1) -> e0) and
        // (twin(e3) -> e2).
        let q1 = self.region_of(e1.twin());
        let q3 = self.region_of(e3.twin());
        let mut region_map = RegionMap::default();
        if q1 != q3 {
            let keep = q1.min(q3);
            let gone = q1.max(q3);
            let genus = self.regions[&q1].genus + self.regions[&q3].genus;
            let cyc1 = self.cycle_from(e1.twin());
            let cyc3 = self.cycle_from(e3.twin());
            let mut fused = Vec::with_capacity(cyc1.len() + cyc3.len());
            fused.extend(rotated(&cyc1, e1.twin()).into_iter().take(1));
            fused.extend(rotated(&cyc3, e3.twin()).into_iter().skip(1));
            fused.push(e3.twin());
            fused.extend(rotated(&cyc1, e1.twin()).into_iter().skip(1));
            let mut cycles = vec![fused];
            for r in [q1, q3] {
                let reps = self.regions[&r].cycles.clone();
                for rep in reps {
                    let cyc = self.cycle_from(rep);
                    if cyc.contains(&e1.twin()) || cyc.contains(&e3.twin()) {
                        continue;
                    }
                    cycles.push(cyc);
                }
            }
            self.regions.remove(&gone);
            self.reset_region(keep, cycles, genus);
            region_map.fates.insert(gone, RegionFate::MergedInto(keep));
        } else {
            let r = q1;
            let genus = self.regions[&r].genus;
            let cyc = self.cycle_from(e1.twin());
            if !cyc.contains(&e3.twin()) {
                return Err(SurgeryError::Invalid(format!(
                    "smoothing at {v} would create a genus-bearing region"
                )));
            }
            // The boundary cycle splits in two.
            let rot = rotated(&cyc, e1.twin());
            let p3 = rot.iter().position(|&x| x == e3.twin()).unwrap();
            let first: Vec<HalfEdge> =
                std::iter::once(e1.twin()).chain(rot[p3 + 1..].iter().copied()).collect();
            let second: Vec<HalfEdge> = rot[..=p3].iter().skip(1).copied().collect();
            let second: Vec<HalfEdge> =
                std::iter::once(e3.twin()).chain(second.into_iter().take(p3 - 1)).collect();
            let mut cycles = vec![first, second];
            let reps = self.regions[&r].cycles.clone();
            for rep in reps {
                let other = self.cycle_from(rep);
                if other.contains(&e1.twin()) {
                    continue;
                }
                cycles.push(other);
            }
            self.reset_region(r, cycles, genus);
        }

        // Step 2: merge the two curve words. Departures from v: the word of
        // curve a contains e0 or e2 as an entry; joins connect the arrival
        // along twin(e0) to the departure e1, and twin(e2) to e3.
        let word_contains = |mesh: &Mesh, curve: CurveId, h: HalfEdge| -> bool {
            mesh.curves[&curve].word.iter().any(|&e| halfedge_of(e) == h)
        };
        let a_in = if word_contains(self, ca, e0.twin()) { e0.twin() } else { e2.twin() };
        let b_leave = if a_in == e0.twin() { e1 } else { e3 };
        if !word_contains(self, cb, b_leave) {
            self.reverse_curve(cb);
        }
        debug_assert!(word_contains(self, cb, b_leave));
        let wa = self.curves[&ca].word.clone();
        let wb = self.curves[&cb].word.clone();
        let pos_w = wa.iter().position(|&e| halfedge_of(e) == a_in).expect("arrival entry");
        let pos_y = wb.iter().position(|&e| halfedge_of(e) == b_leave).expect("departure entry");
        let mut merged_word = Vec::with_capacity(wa.len() + wb.len());
        for i in 0..wa.len() {
            merged_word.push(wa[(pos_w + 1 + i) % wa.len()]);
        }
        for i in 0..wb.len() {
            merged_word.push(wb[(pos_y + i) % wb.len()]);
        }
        let keep_curve = ca.min(cb);
        let drop_curve = ca.max(cb);
        self.curves.remove(&drop_curve);
        {
            let data = self.curves.get_mut(&keep_curve).unwrap();
            data.word = merged_word;
            data.family = merged_family;
        }
        let relabel: Vec<ArcId> = self
            .arcs()
            .filter(|(_, d)| d.curve == drop_curve)
            .map(|(a, _)| a)
            .collect();
        for a in relabel {
            self.arc_mut(a).curve = keep_curve;
        }

        // Step 3: dissolve the two bivalent passages at v.
        self.dissolve_passage(e0.twin(), e1);
        let mut passage = None;
        for h in self.half_edges() {
            if self.head(h) == Some(v) {
                let hb = self.next(h);
                if self.tail(hb) == Some(v) && self.next(hb.twin()) == h.twin() {
                    passage = Some((h, hb));
                    break;
                }
            }
        }
        let (pa, pb) = passage.expect("second bivalent passage at smoothed vertex");
        self.dissolve_passage(pa, pb);
        self.remove_vertex(v);
        debug_assert_eq!(self.chi(), self.chi_target());
        Ok(region_map)
    }

    // ------------------------------------------------------------------
    // Finger move
    // ------------------------------------------------------------------

    /// Push the arc of `h_a` across the region on its left, over the arc of
    /// `h_b` which must border the same region. Both half-edges carry the
    /// region on their left.
    pub fn finger_move(
        &mut self,
        h_a: HalfEdge,
        h_b: HalfEdge,
    ) -> Result<FingerMoveOutcome, SurgeryError> {
        let r = self.region_of(h_a);
        if self.region_of(h_b) != r {
            return Err(SurgeryError::InvalidFingerMove(
                "arcs do not border a common region on the given sides".into(),
            ));
        }
        if h_a.arc() == h_b.arc() {
            return Err(SurgeryError::InvalidFingerMove(
                "cannot push an arc across itself".into(),
            ));
        }
        let t_curve = self.curve_of_halfedge(h_a);
        let b_curve = self.curve_of_halfedge(h_b);
        if t_curve == b_curve {
            return Err(SurgeryError::InvalidFingerMove(
                "finger move would create a self-crossing".into(),
            ));
        }
        let (a_from, a_to) = (self.tail(h_a), self.head(h_a));
        let (b_from, b_to) = (self.tail(h_b), self.head(h_b));
        if a_from.is_none() || b_from.is_none() {
            return Err(SurgeryError::InvalidFingerMove(
                "finger moves on free loops are not supported".into(),
            ));
        }

        let v1 = self.fresh_vertex();
        let v2 = self.fresh_vertex();
        let f1 = self.alloc_arc(ArcData { curve: t_curve, from: a_from, to: Some(v1) });
        let tip = self.alloc_arc(ArcData { curve: t_curve, from: Some(v1), to: Some(v2) });
        let f2 = self.alloc_arc(ArcData { curve: t_curve, from: Some(v2), to: a_to });
        let b1 = self.alloc_arc(ArcData { curve: b_curve, from: b_from, to: Some(v2) });
        let b2 = self.alloc_arc(ArcData { curve: b_curve, from: Some(v2), to: Some(v1) });
        let b3 = self.alloc_arc(ArcData { curve: b_curve, from: Some(v1), to: b_to });
        let [f1f, tipf, f2f, b1f, b2f, b3f] =
            [f1, tip, f2, b1, b2, b3].map(HalfEdge::forward);

        // Structural rewrite of R.
        let cyc_a = self.cycle_from(h_a);
        let same_cycle = cyc_a.contains(&h_b);
        let genus_r = self.regions[&r].genus;
        let mut untouched: Vec<Vec<HalfEdge>> = Vec::new();
        let reps = self.regions[&r].cycles.clone();
        for rep in reps {
            let cyc = self.cycle_from(rep);
            if cyc.contains(&h_a) || cyc.contains(&h_b) {
                continue;
            }
            untouched.push(cyc);
        }
        // New cycle lists for the pieces of R (before twin substitutions).
        let mut split_pieces: Vec<Vec<HalfEdge>> = Vec::new();
        let mut merged_piece: Vec<Vec<HalfEdge>> = Vec::new();
        if same_cycle {
            if genus_r != 0 {
                return Err(SurgeryError::InvalidFingerMove(
                    "cannot split a genus-bearing region".into(),
                ));
            }
            if !untouched.is_empty() {
                return Err(SurgeryError::InvalidFingerMove(
                    "splitting a multi-cycle region is ambiguous".into(),
                ));
            }
            let rot = rotated(&cyc_a, h_a);
            let p = rot.iter().position(|&x| x == h_b).unwrap();
            let x_part: Vec<HalfEdge> = rot[1..p].to_vec();
            let y_part: Vec<HalfEdge> = rot[p + 1..].to_vec();
            let mut r_e = vec![f1f, b3f];
            r_e.extend(y_part);
            let mut r_w = vec![f2f];
            r_w.extend(x_part);
            r_w.push(b1f);
            split_pieces.push(r_e);
            split_pieces.push(r_w);
        } else {
            let rot_a = rotated(&cyc_a, h_a);
            let cyc_b = self.cycle_from(h_b);
            let rot_b = rotated(&cyc_b, h_b);
            let mut merged = vec![f1f, b3f];
            merged.extend(rot_b[1..].iter().copied());
            merged.push(b1f);
            merged.push(f2f);
            merged.extend(rot_a[1..].iter().copied());
            merged_piece.push(merged);
            merged_piece.extend(untouched.clone());
        }

        // Substitutions for the far sides.
        let q = self.region_of(h_a.twin());
        let rp = self.region_of(h_b.twin());
        let sub_a: Vec<HalfEdge> = vec![f2f.twin(), b2f, f1f.twin()];
        let sub_b: Vec<HalfEdge> = vec![b3f.twin(), tipf, b1f.twin()];
        let apply_subs = |cyc: &mut Vec<HalfEdge>| {
            let mut out = Vec::with_capacity(cyc.len() + 4);
            for &h in cyc.iter() {
                if h == h_a.twin() {
                    out.extend_from_slice(&sub_a);
                } else if h == h_b.twin() {
                    out.extend_from_slice(&sub_b);
                } else {
                    out.push(h);
                }
            }
            *cyc = out;
        };

        // Gather all final cycle lists, by region.
        let mut final_faces: Vec<(Option<RegionId>, Vec<Vec<HalfEdge>>, u32)> = Vec::new();
        let mut region_map = RegionMap::default();
        if same_cycle {
            for mut piece in split_pieces {
                apply_subs(&mut piece);
                final_faces.push((None, vec![piece], 0));
            }
        } else {
            let mut cycles = merged_piece;
            for cyc in cycles.iter_mut() {
                apply_subs(cyc);
            }
            final_faces.push((Some(r), cycles, genus_r));
        }
        for other in [q, rp] {
            if other == r || final_faces.iter().any(|(id, _, _)| *id == Some(other)) {
                continue;
            }
            let genus = self.regions[&other].genus;
            let mut cycles = self.region_cycles(other);
            for cyc in cycles.iter_mut() {
                apply_subs(cyc);
            }
            final_faces.push((Some(other), cycles, genus));
        }
        // The tongue bigon.
        let tongue_cycle = vec![b2f.twin(), tipf.twin()];

        // Curve words: pieces are oriented along h_a and h_b.
        self.replace_word_entry_directed(h_a, vec![(f1, true), (tip, true), (f2, true)]);
        self.replace_word_entry_directed(h_b, vec![(b1, true), (b2, true), (b3, true)]);

        // Commit.
        if same_cycle {
            self.regions.remove(&r);
        }
        let mut new_ids = Vec::new();
        for (id, cycles, genus) in final_faces {
            match id {
                Some(rid) => self.reset_region(rid, cycles, genus),
                None => new_ids.push(self.add_region(cycles, genus)),
            }
        }
        let tongue = self.add_region(vec![tongue_cycle], 0);
        if same_cycle {
            region_map.fates.insert(r, RegionFate::Split(new_ids.clone()));
        }
        self.free_arc(h_a.arc());
        self.free_arc(h_b.arc());
        debug_assert_eq!(self.chi(), self.chi_target());
        Ok(FingerMoveOutcome { region_map, tongue, new_vertices: [v1, v2] })
    }

    // ------------------------------------------------------------------
    // Bigon cancellation
    // ------------------------------------------------------------------

    /// Cancel an empty bigon region by retracting the given curve across the
    /// other side. The bigon must be a single 2-sided cycle.
    pub fn cancel_bigon(&mut self, g: RegionId, retract: CurveId) -> Result<RegionMap, SurgeryError> {
        let data = self.regions[&g].clone();
        if data.cycles.len() != 1 || data.genus != 0 {
            return Err(SurgeryError::Invalid(format!("region {g} is not a disk bigon")));
        }
        let cyc = self.cycle_from(data.cycles[0]);
        if cyc.len() != 2 {
            return Err(SurgeryError::Invalid(format!("region {g} has {} sides", cyc.len())));
        }
        let (h1, h2) = (cyc[0], cyc[1]);
        let (c1, c2) = (self.curve_of_halfedge(h1), self.curve_of_halfedge(h2));
        if c1 == c2 {
            return Err(SurgeryError::Invalid("bigon bounded by a single curve".into()));
        }
        let (h_t, h_b) = if c1 == retract {
            (h1, h2)
        } else if c2 == retract {
            (h2, h1)
        } else {
            return Err(SurgeryError::Invalid(format!("curve {retract} does not bound {g}")));
        };
        let b_curve = self.curve_of_halfedge(h_b);

        // Orient per the finger-move tables: G = [b2^-, tip^-].
        let t_in = h_t.twin(); // tip forward
        let b_in = h_b.twin(); // b2 forward
        let f2b = self.prev_in_cycle(b_in);
        let f1b = self.next(b_in);
        let b3b = self.prev_in_cycle(t_in);
        let b1b = self.next(t_in);
        for (h, want) in [(f2b, retract), (f1b, retract), (b3b, b_curve), (b1b, b_curve)] {
            if self.curve_of_halfedge(h) != want {
                return Err(SurgeryError::Invalid(
                    "bigon neighborhood does not have the cancellation shape".into(),
                ));
            }
        }
        let q = self.region_of(b_in);
        let rpp = self.region_of(t_in);
        let r_w = self.region_of(f2b.twin());
        let r_e = self.region_of(f1b.twin());

        let t_loop = f1b.arc() == f2b.arc();
        let b_loop = b1b.arc() == b3b.arc();
        if std::env::var("HFDT_DEBUG_CANCEL").is_ok() {
            eprintln!(
                "cancel: g={g} h_t={:?}({}) h_b={:?}({}) f1b={:?} f2b={:?} b1b={:?} b3b={:?} q={q} rpp={rpp} r_w={r_w} r_e={r_e}",
                h_t, self.curve_of_halfedge(h_t), h_b, self.curve_of_halfedge(h_b),
                (f1b.arc(), f1b.is_forward()), (f2b.arc(), f2b.is_forward()),
                (b1b.arc(), b1b.is_forward()), (b3b.arc(), b3b.is_forward()),
            );
            eprintln!("  tip arc {} from {:?} to {:?}", h_t.arc(), self.tail(h_t.twin()), self.head(h_t.twin()));
        }

        // New arcs.
        let t_hat = if t_loop {
            self.alloc_arc(ArcData { curve: retract, from: None, to: None })
        } else {
            let from = self.tail(f1b.twin());
            let to = self.head(f2b.twin());
            self.alloc_arc(ArcData { curve: retract, from, to })
        };
        let b_hat = if b_loop {
            self.alloc_arc(ArcData { curve: b_curve, from: None, to: None })
        } else {
            let from = self.tail(b1b.twin());
            let to = self.head(b3b.twin());
            self.alloc_arc(ArcData { curve: b_curve, from, to })
        };
        let t_hat_m = HalfEdge::forward(t_hat); // merged-region side
        let b_hat_m = HalfEdge::forward(b_hat);

        // Collect the affected faces' cycles.
        let mut face_set: Vec<RegionId> = vec![g, q, rpp, r_w, r_e];
        face_set.sort();
        face_set.dedup();
        let mut lists: BTreeMap<RegionId, Vec<Vec<HalfEdge>>> = BTreeMap::new();
        for &f in &face_set {
            lists.insert(f, self.region_cycles(f));
        }
        // Substitution A in Q: [f2b, b_in, f1b] -> [t_hat other side];
        // substitution B in R'': [b3b, t_in, b1b] -> [b_hat other side].
        // When the retracted curve had only two arcs the pattern collapses
        // to a 2-cycle (f1b == f2b), and dually for the other curve.
        let pattern_a: Vec<HalfEdge> =
            if f1b == f2b { vec![f2b, b_in] } else { vec![f2b, b_in, f1b] };
        let pattern_b: Vec<HalfEdge> =
            if b1b == b3b { vec![b3b, t_in] } else { vec![b3b, t_in, b1b] };
        let ok_a = lists
            .get_mut(&q)
            .unwrap()
            .iter_mut()
            .any(|cyc| splice_pattern(cyc, &pattern_a, &[t_hat_m.twin()]));
        let ok_b = lists
            .get_mut(&rpp)
            .unwrap()
            .iter_mut()
            .any(|cyc| splice_pattern(cyc, &pattern_b, &[b_hat_m.twin()]));
        if !ok_a || !ok_b {
            return Err(SurgeryError::Invalid(
                "bigon neighborhood does not have the cancellation shape".into(),
            ));
        }

        // Merged region M from {g, r_w, r_e}.
        let mut merge_set: Vec<RegionId> = vec![g, r_w, r_e];
        merge_set.sort();
        merge_set.dedup();
        let dying: BTreeSet<HalfEdge> = [
            h_t,
            h_b,
            f1b.twin(),
            f2b.twin(),
            b1b.twin(),
            b3b.twin(),
        ]
        .into_iter()
        .collect();
        // successor map over the merge set's cycles
        let mut succ: BTreeMap<HalfEdge, HalfEdge> = BTreeMap::new();
        for &f in &merge_set {
            for cyc in &lists[&f] {
                for i in 0..cyc.len() {
                    succ.insert(cyc[i], cyc[(i + 1) % cyc.len()]);
                }
            }
        }
        let resolve = |h: HalfEdge| -> Option<HalfEdge> {
            if !t_loop && h == f1b.twin() {
                Some(t_hat_m)
            } else if !b_loop && h == b1b.twin() {
                Some(b_hat_m)
            } else if dying.contains(&h) {
                None
            } else {
                Some(h)
            }
        };
        let mut m_cycles: Vec<Vec<HalfEdge>> = Vec::new();
        let walk = |start: HalfEdge, first_old: HalfEdge, m_cycles: &mut Vec<Vec<HalfEdge>>| {
            let mut cycle = vec![start];
            let mut cur = first_old;
            loop {
                match resolve(cur) {
                    Some(h) if h == start => break,
                    Some(h) if h == t_hat_m => {
                        cycle.push(h);
                        cur = succ[&f2b.twin()];
                    }
                    Some(h) if h == b_hat_m => {
                        cycle.push(h);
                        cur = succ[&b3b.twin()];
                    }
                    Some(h) => {
                        cycle.push(h);
                        cur = succ[&h];
                    }
                    None => panic!("cancellation walk hit an unresolvable half-edge"),
                }
            }
            m_cycles.push(cycle);
        };
        if t_loop {
            m_cycles.push(vec![t_hat_m]);
        } else {
            walk(t_hat_m, succ[&f2b.twin()], &mut m_cycles);
        }
        if b_loop {
            m_cycles.push(vec![b_hat_m]);
        } else if !m_cycles.iter().any(|c| c.contains(&b_hat_m)) {
            walk(b_hat_m, succ[&b3b.twin()], &mut m_cycles);
        }
        // Carry cycles of the merge set not touched by the surgery.
        for &f in &merge_set {
            for cyc in &lists[&f] {
                if cyc.iter().any(|h| dying.contains(h)) {
                    continue;
                }
                if cyc.iter().any(|h| m_cycles.iter().any(|c| c.contains(h))) {
                    continue;
                }
                m_cycles.push(cyc.clone());
            }
        }

        // Genus of M from the chi balance: chi(M) = sum over the merged
        // side regions minus one (the bigon's own disk does not survive).
        let chi_before: i64 =
            merge_set.iter().filter(|&&f| f != g).map(|f| self.regions[f].chi()).sum();
        let chi_m = chi_before - 1;
        let genus_m = 2 - chi_m - m_cycles.len() as i64;
        if genus_m % 2 != 0 || genus_m < 0 {
            return Err(SurgeryError::Invalid("inconsistent genus after cancellation".into()));
        }
        let genus_m = (genus_m / 2) as u32;

        // Curve words: [f1, tip, f2] -> t_hat and [b1, b2, b3] -> b_hat.
        self.contract_word_run(retract, h_t.arc(), f1b.arc(), f2b.arc(), t_hat, t_in);
        self.contract_word_run(b_curve, h_b.arc(), b1b.arc(), b3b.arc(), b_hat, b_in);

        // Commit regions.
        let m_id = *merge_set.iter().min().unwrap();
        let mut region_map = RegionMap::default();
        for &f in &merge_set {
            if f != m_id {
                self.regions.remove(&f);
                region_map.fates.insert(f, RegionFate::MergedInto(m_id));
            }
        }
        self.reset_region(m_id, m_cycles, genus_m);
        for &f in &face_set {
            if merge_set.contains(&f) {
                continue;
            }
            let genus = self.regions[&f].genus;
            self.reset_region(f, lists[&f].clone(), genus);
        }
        // Free dead arcs and vertices.
        let mut dead_arcs = vec![h_t.arc(), h_b.arc(), f1b.arc(), f2b.arc(), b1b.arc(), b3b.arc()];
        dead_arcs.sort();
        dead_arcs.dedup();
        let v1 = self.head(t_in);
        let v2 = self.tail(t_in);
        for a in dead_arcs {
            self.free_arc(a);
        }
        if let Some(v) = v1 {
            self.remove_vertex(v);
        }
        if let Some(v) = v2 {
            self.remove_vertex(v);
        }
        debug_assert_eq!(self.chi(), self.chi_target());
        Ok(region_map)
    }

    /// Replace the run of up to three word entries (pre, mid, post) by the
    /// merged arc, orienting by whether the word traverses `mid_dir`.
    fn contract_word_run(
        &mut self,
        curve: CurveId,
        mid: ArcId,
        pre: ArcId,
        post: ArcId,
        merged: ArcId,
        mid_dir: HalfEdge,
    ) {
        let word = &mut self.curves.get_mut(&curve).unwrap().word;
        let n = word.len();
        let pos = word.iter().position(|&(a, _)| a == mid).expect("mid arc in word");
        let forward = halfedge_of(word[pos]) == mid_dir;
        if pre == post {
            // The curve had exactly two arcs; it closes into a free loop.
            assert_eq!(n, 2);
            word.clear();
            word.push((merged, true));
            return;
        }
        // Traversal order is [pre, mid, post] when forward, else reversed.
        let (p_prev, p_next) = if forward {
            ((pos + n - 1) % n, (pos + 1) % n)
        } else {
            ((pos + 1) % n, (pos + n - 1) % n)
        };
        assert_eq!(
            word[p_prev].0, pre,
            "cancellation run mismatch: word {word:?} pos {pos} forward {forward} mid {mid} pre {pre} post {post}"
        );
        assert_eq!(word[p_next].0, post, "cancellation run mismatch");
        // Remove the three entries, insert merged at the spot.
        let mut keep: Vec<(ArcId, bool)> = Vec::with_capacity(n - 2);
        for (i, e) in word.iter().enumerate() {
            if i == pos {
                keep.push((merged, forward));
            } else if i == p_prev || i == p_next {
                continue;
            } else {
                keep.push(*e);
            }
        }
        *word = keep;
    }

    // ------------------------------------------------------------------
    // Triangle move
    // ------------------------------------------------------------------

    /// Slide the strand of `t_a` across the opposite vertex of the empty
    /// triangle on its left (the Reidemeister III move). `t_a` must lie on
    /// a 3-sided disk region whose sides carry three distinct curves; the
    /// strand of `t_a` slides across the crossing of the other two. All
    /// intersection counts are preserved. The triangle region keeps its id;
    /// the neighbor absorbing the vacated area keeps its id too.
    pub fn triangle_move(&mut self, t_a: HalfEdge) -> Result<RegionMap, SurgeryError> {
        let r = self.region_of(t_a);
        let data = self.regions[&r].clone();
        if data.cycles.len() != 1 || data.genus != 0 {
            return Err(SurgeryError::Invalid(format!("region {r} is not a disk triangle")));
        }
        let cyc = self.cycle_from(data.cycles[0]);
        if cyc.len() != 3 {
            return Err(SurgeryError::Invalid(format!("region {r} has {} sides", cyc.len())));
        }
        let rot3 = rotated(&cyc, t_a);
        let (t_b, t_c) = (rot3[1], rot3[2]);
        let (ca, cb, cc) = (
            self.curve_of_halfedge(t_a),
            self.curve_of_halfedge(t_b),
            self.curve_of_halfedge(t_c),
        );
        if ca == cb || cb == cc || ca == cc {
            return Err(SurgeryError::Invalid("triangle sides repeat a curve".into()));
        }
        let w_ab = self.head(t_a).expect("triangle corner");
        let w_bc = self.head(t_b).expect("triangle corner");
        let w_ca = self.head(t_c).expect("triangle corner");

        // Continuation half-edges from the clockwise rotations; alternation
        // of the two curves at each corner forces these.
        let alpha_out = self.rotate_cw(t_b); // A beyond w_ab
        let betad_out = self.rotate_cw(alpha_out); // B below w_ab
        let gammau_out = self.rotate_cw(t_c); // C beyond w_bc
        let betau_out = self.rotate_cw(gammau_out); // B beyond w_bc
        let alphal_out = self.rotate_cw(t_a); // A beyond w_ca
        let gammad_out = self.rotate_cw(alphal_out); // C below w_ca
        for (h, want) in [
            (alpha_out, ca),
            (betad_out, cb),
            (gammau_out, cc),
            (betau_out, cb),
            (alphal_out, ca),
            (gammad_out, cc),
        ] {
            if self.curve_of_halfedge(h) != want {
                return Err(SurgeryError::Invalid(
                    "triangle corners are not transverse crossings".into(),
                ));
            }
        }
        let mut arcs9 = vec![
            t_a.arc(),
            t_b.arc(),
            t_c.arc(),
            alpha_out.arc(),
            betad_out.arc(),
            gammau_out.arc(),
            betau_out.arc(),
            alphal_out.arc(),
            gammad_out.arc(),
        ];
        arcs9.sort();
        arcs9.dedup();
        if arcs9.len() != 9 {
            return Err(SurgeryError::Invalid(
                "triangle move needs nine distinct arcs around the triangle".into(),
            ));
        }

        // Far endpoints of the continuations.
        let other_end = |mesh: &Mesh, h: HalfEdge| mesh.head(h).expect("continuation endpoint");
        let q = other_end(self, alpha_out);
        let t_far = other_end(self, betad_out);
        let u = other_end(self, betau_out);
        let r_far = other_end(self, gammau_out);
        let p = other_end(self, alphal_out);
        let s_far = other_end(self, gammad_out);

        // New vertices and arcs.
        let w_ab2 = self.fresh_vertex();
        let w_ca2 = self.fresh_vertex();
        let betad2 = self.alloc_arc(ArcData { curve: cb, from: Some(t_far), to: Some(w_bc) });
        let betau1 = self.alloc_arc(ArcData { curve: cb, from: Some(w_bc), to: Some(w_ab2) });
        let betau2 = self.alloc_arc(ArcData { curve: cb, from: Some(w_ab2), to: Some(u) });
        let gammad2 = self.alloc_arc(ArcData { curve: cc, from: Some(w_bc), to: Some(s_far) });
        let gammau1 = self.alloc_arc(ArcData { curve: cc, from: Some(w_bc), to: Some(w_ca2) });
        let gammau2 = self.alloc_arc(ArcData { curve: cc, from: Some(w_ca2), to: Some(r_far) });
        let alphal2 = self.alloc_arc(ArcData { curve: ca, from: Some(p), to: Some(w_ca2) });
        let a2 = self.alloc_arc(ArcData { curve: ca, from: Some(w_ca2), to: Some(w_ab2) });
        let alpha2 = self.alloc_arc(ArcData { curve: ca, from: Some(w_ab2), to: Some(q) });
        let [betad2f, betau1f, betau2f, gammad2f, gammau1f, gammau2f, alphal2f, a2f, alpha2f] =
            [betad2, betau1, betau2, gammad2, gammau1, gammau2, alphal2, a2, alpha2]
                .map(HalfEdge::forward);

        // Face rewrites: seven disjoint patterns covering all 18 half-edges
        // of the nine old arcs.
        let patterns: Vec<(Vec<HalfEdge>, Vec<HalfEdge>)> = vec![
            // S absorbs the triangle area.
            (
                vec![betad_out.twin(), t_a.twin(), gammad_out],
                vec![betad2f, gammad2f],
            ),
            // E keeps the area north of the slid strand.
            (
                vec![betau_out.twin(), t_b.twin(), alpha_out],
                vec![betau2f.twin(), alpha2f],
            ),
            // W likewise.
            (
                vec![alphal_out.twin(), t_c.twin(), gammau_out],
                vec![alphal2f, gammau2f],
            ),
            // T is truncated by the slid strand.
            (vec![gammau_out.twin(), betau_out], vec![gammau2f.twin(), a2f, betau2f]),
            // SE absorbs the strip east of B.
            (
                vec![alpha_out.twin(), betad_out],
                vec![alpha2f.twin(), betau1f.twin(), betad2f.twin()],
            ),
            // SW absorbs the strip west of C.
            (
                vec![gammad_out.twin(), alphal_out],
                vec![gammad2f.twin(), gammau1f, alphal2f.twin()],
            ),
        ];

        // Collect the affected faces and rewrite their cycles.
        let mut faces: Vec<RegionId> = vec![r];
        for (pat, _) in &patterns {
            faces.push(self.region_of(pat[0]));
        }
        faces.sort();
        faces.dedup();
        let mut lists: BTreeMap<RegionId, Vec<Vec<HalfEdge>>> = BTreeMap::new();
        for &f in &faces {
            lists.insert(f, self.region_cycles(f));
        }
        // Drop the triangle cycle itself.
        lists.get_mut(&r).unwrap().retain(|cyc| !cyc.contains(&t_a));
        for (pat, repl) in &patterns {
            let hit = lists
                .values_mut()
                .flat_map(|cycles| cycles.iter_mut())
                .any(|cyc| splice_pattern(cyc, pat, repl));
            if !hit {
                return Err(SurgeryError::Invalid(
                    "triangle neighborhood does not match the move patterns".into(),
                ));
            }
        }

        // Curve words: three-entry runs around each old triangle side.
        self.replace_word_run(
            t_a,
            alphal_out.arc(),
            alpha_out.arc(),
            vec![(alphal2, true), (a2, true), (alpha2, true)],
        )?;
        self.replace_word_run(
            t_b,
            betad_out.arc(),
            betau_out.arc(),
            vec![(betad2, true), (betau1, true), (betau2, true)],
        )?;
        self.replace_word_run(
            t_c,
            gammau_out.arc(),
            gammad_out.arc(),
            vec![(gammau2, false), (gammau1, false), (gammad2, true)],
        )?;

        // Commit regions.
        let mut region_map = RegionMap::default();
        let s_face = self.region_of(gammad_out);
        for (&f, cycles) in lists.iter() {
            let genus = self.regions[&f].genus;
            if f == r {
                // The triangle id moves to the new triangle.
                continue;
            }
            self.reset_region(f, cycles.clone(), genus);
        }
        // New triangle on the far side of w_bc, reusing the old id.
        let new_triangle = vec![a2f.twin(), gammau1f.twin(), betau1f];
        let extra = lists.remove(&r).unwrap();
        if extra.is_empty() {
            self.reset_region(r, vec![new_triangle], 0);
        } else {
            let mut cycles = extra;
            cycles.push(new_triangle);
            self.reset_region(r, cycles, data.genus);
        }
        region_map.fates.insert(r, RegionFate::Kept);
        let _ = s_face;

        // Free the old arcs and vertices.
        for a in [
            t_a.arc(),
            t_b.arc(),
            t_c.arc(),
            alpha_out.arc(),
            betad_out.arc(),
            betau_out.arc(),
            gammau_out.arc(),
            alphal_out.arc(),
            gammad_out.arc(),
        ] {
            self.free_arc(a);
        }
        self.remove_vertex(w_ab);
        self.remove_vertex(w_ca);
        debug_assert_eq!(self.chi(), self.chi_target());
        Ok(region_map)
    }

    /// After a triangle move, the moved-strand word gained three fresh
    /// entries but the flanking old entries must go; splice them away.
    fn drop_word_neighbors(&mut self, curve: CurveId, keep_first: ArcId, left: ArcId, right: ArcId) {
        let word = &mut self.curves.get_mut(&curve).unwrap().word;
        word.retain(|&(a, _)| a != left && a != right);
        let _ = keep_first;
    }

    /// Replace the flanking old entry (`old`) of the B/C strand by the
    /// merged arc, in the direction consistent with the new pieces.
    fn prepend_word_neighbor(
        &mut self,
        curve: CurveId,
        _anchor: ArcId,
        old: ArcId,
        merged: ArcId,
        _far: VertexId,
        _near: VertexId,
    ) {
        let word = &mut self.curves.get_mut(&curve).unwrap().word;
        for e in word.iter_mut() {
            if e.0 == old {
                *e = (merged, e.1);
                return;
            }
        }
        panic!("flanking arc not found in word");
    }

    // ------------------------------------------------------------------
    // Dehn twist and bigon reduction
    // ------------------------------------------------------------------

    /// Apply a Dehn twist along `c` to every curve in `targets`. Positive
    /// sign reroutes each target strand with a right turn around `c`. Raw
    /// intersection counts grow by |t ∩ c| · |c ∩ x| per target t.
    pub fn dehn_twist(
        &mut self,
        c: CurveId,
        sign: i8,
        targets: &BTreeSet<CurveId>,
    ) -> Result<RegionMap, SurgeryError> {
        if targets.contains(&c) {
            return Err(SurgeryError::Invalid(format!("twist curve {c} cannot be a target")));
        }
        for t in targets {
            match self.curves.get(t) {
                None => return Err(SurgeryError::Invalid(format!("unknown target curve {t}"))),
                Some(d) if d.family == Family::Alpha => {
                    return Err(SurgeryError::TargetIsAlpha(t.to_string()))
                }
                _ => {}
            }
        }
        // Embeddedness: every vertex on c must join c with a distinct curve.
        for v in self.vertices().collect::<Vec<_>>() {
            let curves = self.curves_at_vertex(v);
            if curves.contains(&c) && curves.len() != 2 {
                return Err(SurgeryError::NonEmbeddedTwistCurve(c.to_string()));
            }
        }

        // Strand positions along c's traversal whose curve is a target.
        let word = self.curves[&c].word.clone();
        let mut twist_slots: Vec<usize> = Vec::new();
        for (k, &e) in word.iter().enumerate() {
            let h = halfedge_of(e);
            let Some(v) = self.head(h) else { continue };
            let other = self
                .curves_at_vertex(v)
                .into_iter()
                .find(|&x| x != c)
                .expect("vertex joins c with another curve");
            if targets.contains(&other) {
                twist_slots.push(k);
            }
        }
        if twist_slots.is_empty() {
            return Ok(RegionMap::default());
        }

        // Insert one nested parallel copy per twisting strand.
        let mut map = RegionMap::default();
        let mut copies: Vec<ParallelCopy> = Vec::new();
        let mut base = c;
        for _ in 0..twist_slots.len() {
            let copy = self.insert_parallel_copy(base, Side::Left, Family::Aux)?;
            map = map.then(&copy.region_map);
            base = copy.curve;
            copies.push(copy);
        }
        // Splice copy i into the strand at slot i.
        for (i, &slot) in twist_slots.iter().enumerate() {
            let u = copies[i].crossings[slot];
            let strand_out = self
                .out_halfedges(u)
                .into_iter()
                .filter(|&h| self.curve_of_halfedge(h) != copies[i].curve)
                .min()
                .expect("strand out-edge at splice vertex");
            let family = self.curves[&self.curve_of_halfedge(strand_out)].family;
            let e0 = if sign >= 0 {
                // right turn: join (sigma^3(x), x)
                let s1 = self.rotate_cw(strand_out);
                let s2 = self.rotate_cw(s1);
                self.rotate_cw(s2)
            } else {
                strand_out
            };
            let m = self.smooth_crossing(e0, family)?;
            map = map.then(&m);
        }
        debug_assert_eq!(self.chi(), self.chi_target());
        Ok(map)
    }

    /// Find an empty bigon between the two curves, avoiding forbidden
    /// regions. Returns the region id.
    pub fn find_bigon(
        &self,
        pair: (CurveId, CurveId),
        forbidden: &BTreeSet<RegionId>,
    ) -> Option<RegionId> {
        for (r, data) in self.regions.iter() {
            if forbidden.contains(r) || data.cycles.len() != 1 || data.genus != 0 {
                continue;
            }
            let cyc = self.cycle_from(data.cycles[0]);
            if cyc.len() != 2 {
                continue;
            }
            let cs: BTreeSet<CurveId> = cyc.iter().map(|&h| self.curve_of_halfedge(h)).collect();
            if cs == BTreeSet::from([pair.0, pair.1]) {
                return Some(*r);
            }
        }
        None
    }

    /// Repeatedly cancel empty bigons between the pair until none remain.
    /// `forbidden` regions (tracked through the cancellations) are skipped.
    pub fn reduce_bigons(
        &mut self,
        pair: (CurveId, CurveId),
        forbidden: &BTreeSet<RegionId>,
    ) -> Result<RegionMap, SurgeryError> {
        let mut map = RegionMap::default();
        let mut forbidden: BTreeSet<RegionId> = forbidden.clone();
        while let Some(g) = self.find_bigon(pair, &forbidden) {
            let m = self.cancel_bigon(g, pair.0)?;
            forbidden = forbidden
                .iter()
                .filter_map(|r| m.track(*r))
                .collect();
            map = map.then(&m);
        }
        Ok(map)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn assert_valid(mesh: &Mesh) {
        let rep = mesh.validate();
        assert!(rep.ok(), "violations: {:?}", rep.violations);
    }

    #[test]
    fn split_arc_keeps_structure() {
        let mut mesh = fixtures::lens_torus(3).mesh;
        let a = mesh.arcs().next().unwrap().0;
        mesh.split_arc(a);
        // A bivalent vertex is not 4-valent, so full validation fails, but
        // faces and chi stay coherent.
        assert_eq!(mesh.chi(), mesh.chi_target());
        assert_eq!(mesh.arc_count(), 7);
    }

    #[test]
    fn parallel_copy_of_torus_curve() {
        let mut mesh = fixtures::torus_s3().mesh;
        let alpha = fixtures::curve_by_family(&mesh, Family::Alpha);
        let copy = mesh.insert_parallel_copy(alpha, Side::Left, Family::Aux).unwrap();
        assert_valid(&mesh);
        // The copy crosses the beta curve once and alpha not at all.
        let beta = fixtures::curve_by_family(&mesh, Family::Beta);
        assert_eq!(mesh.intersection_count(copy.curve, beta), 1);
        assert_eq!(mesh.intersection_count(copy.curve, alpha), 0);
    }

    #[test]
    fn smooth_torus_crossing_gives_free_loops() {
        let mut mesh = fixtures::torus_s3().mesh;
        let v = mesh.vertices().next().unwrap();
        let e0 = mesh.out_halfedges(v).into_iter().min().unwrap();
        mesh.smooth_crossing(e0, Family::Beta).unwrap();
        // One curve remains, a free loop; the two regions are annuli.
        assert_eq!(mesh.curves.len(), 1);
        assert_eq!(mesh.vertex_count(), 0);
        assert_eq!(mesh.chi(), mesh.chi_target());
        let word = &mesh.curves.values().next().unwrap().word;
        assert_eq!(word.len(), 1);
    }

    #[test]
    fn finger_move_then_cancel_restores_counts() {
        let mut mesh = fixtures::lens_torus(2).mesh;
        let alpha = fixtures::curve_by_family(&mesh, Family::Alpha);
        let beta = fixtures::curve_by_family(&mesh, Family::Beta);
        let before_v = mesh.vertex_count();
        let before_f = mesh.regions.len();
        let before_ab = mesh.intersection_count(alpha, beta);

        // Push some beta arc across a region over an alpha arc.
        let (h_a, h_b) = fixtures::finger_candidate(&mesh, beta, alpha).unwrap();
        let out = mesh.finger_move(h_a, h_b).unwrap();
        assert_valid(&mesh);
        assert_eq!(mesh.vertex_count(), before_v + 2);
        assert_eq!(mesh.regions.len(), before_f + 2);
        assert_eq!(mesh.intersection_count(alpha, beta), before_ab + 2);

        // Cancel the tongue bigon to restore the original counts.
        mesh.cancel_bigon(out.tongue, beta).unwrap();
        assert_valid(&mesh);
        assert_eq!(mesh.vertex_count(), before_v);
        assert_eq!(mesh.regions.len(), before_f);
        assert_eq!(mesh.intersection_count(alpha, beta), before_ab);
    }

    #[test]
    fn reduce_bigons_full_cancellation() {
        // After a finger move on the minimal torus, pushing beta across
        // alpha, cancelling all bigons restores one crossing.
        let mut mesh = fixtures::lens_torus(1).mesh;
        let alpha = fixtures::curve_by_family(&mesh, Family::Alpha);
        let beta = fixtures::curve_by_family(&mesh, Family::Beta);
        let (h_a, h_b) = fixtures::finger_candidate(&mesh, beta, alpha).unwrap();
        mesh.finger_move(h_a, h_b).unwrap();
        assert_valid(&mesh);
        assert_eq!(mesh.intersection_count(alpha, beta), 3);
        mesh.reduce_bigons((beta, alpha), &BTreeSet::new()).unwrap();
        assert_eq!(mesh.intersection_count(alpha, beta), 1);
        assert_valid(&mesh);
    }

    #[test]
    fn torus_twist_intersection_formula() {
        // alpha of class (1,0), beta a parallel pushoff, aux core of class
        // (0,1): three positive twists give |alpha ∩ beta| = 3 after
        // reduction, the torus determinant |ps - qr| for (1,0) vs (1,3).
        let mut mesh = fixtures::torus_with_aux_core();
        let alpha = fixtures::curve_by_family(&mesh, Family::Alpha);
        let beta = fixtures::curve_by_family(&mesh, Family::Beta);
        let core = fixtures::curve_by_family(&mesh, Family::Aux);
        let targets = BTreeSet::from([beta]);
        for _ in 0..3 {
            mesh.dehn_twist(core, 1, &targets).unwrap();
            assert_valid(&mesh);
        }
        mesh.reduce_bigons((beta, alpha), &BTreeSet::new()).unwrap();
        assert_eq!(mesh.intersection_count(alpha, beta), 3);
        // The twisted curve still meets the core once per twist direction.
        assert_eq!(mesh.intersection_count(beta, core), 1);
        assert_valid(&mesh);
    }

    #[test]
    fn twist_raw_count_formula() {
        // c meets the target once; raw counts grow by |c ∩ x|.
        let mut mesh = fixtures::torus_with_aux_core();
        let alpha = fixtures::curve_by_family(&mesh, Family::Alpha);
        let beta = fixtures::curve_by_family(&mesh, Family::Beta);
        let core = fixtures::curve_by_family(&mesh, Family::Aux);
        let ab = mesh.intersection_count(alpha, beta);
        let ca = mesh.intersection_count(core, alpha);
        let cb = mesh.intersection_count(core, beta);
        assert_eq!(cb, 1);
        mesh.dehn_twist(core, 1, &BTreeSet::from([beta])).unwrap();
        assert_eq!(mesh.intersection_count(alpha, beta), ab + ca);
        assert_eq!(mesh.intersection_count(core, beta), cb);
    }

    #[test]
    fn twist_then_untwist_restores_counts() {
        let mut mesh = fixtures::torus_with_aux_core();
        let alpha = fixtures::curve_by_family(&mesh, Family::Alpha);
        let beta = fixtures::curve_by_family(&mesh, Family::Beta);
        let core = fixtures::curve_by_family(&mesh, Family::Aux);
        let before: Vec<usize> = vec![
            mesh.intersection_count(alpha, beta),
            mesh.intersection_count(core, beta),
            mesh.intersection_count(core, alpha),
        ];
        let targets = BTreeSet::from([beta]);
        mesh.dehn_twist(core, 1, &targets).unwrap();
        mesh.dehn_twist(core, -1, &targets).unwrap();
        mesh.reduce_bigons((beta, alpha), &BTreeSet::new()).unwrap();
        mesh.reduce_bigons((beta, core), &BTreeSet::new()).unwrap();
        let after: Vec<usize> = vec![
            mesh.intersection_count(alpha, beta),
            mesh.intersection_count(core, beta),
            mesh.intersection_count(core, alpha),
        ];
        assert_eq!(before, after);
        assert_valid(&mesh);
    }

    #[test]
    fn twist_disjoint_from_targets_is_identity() {
        let mut mesh = fixtures::torus_with_aux_core();
        let alpha = fixtures::curve_by_family(&mesh, Family::Alpha);
        let core = fixtures::curve_by_family(&mesh, Family::Aux);
        // Twist along a curve whose crossings avoid the target set entirely:
        // beta is not a target, so nothing moves.
        let beta = fixtures::curve_by_family(&mesh, Family::Beta);
        let before = (mesh.vertex_count(), mesh.arc_count(), mesh.regions.len());
        let empty_target: BTreeSet<CurveId> = BTreeSet::new();
        mesh.dehn_twist(core, 1, &empty_target).unwrap();
        assert_eq!(before, (mesh.vertex_count(), mesh.arc_count(), mesh.regions.len()));
        let _ = (alpha, beta);
    }

    #[test]
    fn alpha_targets_are_rejected() {
        let mut mesh = fixtures::torus_with_aux_core();
        let alpha = fixtures::curve_by_family(&mesh, Family::Alpha);
        let core = fixtures::curve_by_family(&mesh, Family::Aux);
        let err = mesh.dehn_twist(core, 1, &BTreeSet::from([alpha]));
        assert!(matches!(err, Err(SurgeryError::TargetIsAlpha(_))));
    }
}
