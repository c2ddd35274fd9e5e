//! Heegaard diagrams from abstract open books.
//!
//! The page is modeled as a disk with bands: a one-boundary genus-h page
//! has 2h bands attached in interleaved pairs, and the annulus page is the
//! single-band case. Cut arcs are the band co-cores, their pushoffs tilt
//! across the bands meeting them once, and the doubled surface keeps the
//! binding circle(s) as aux curves so every stored region is a disk. Core
//! curves dual to the cut arcs live in the inverted-page half and serve as
//! monodromy twist curves; an optional knot curve delta lives in the front
//! half, crossing the first pushoff once.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::diagram::HeegaardDiagram;
use crate::error::OpenBookError;
use crate::surface::{ArcId, CurveId, Family, HalfEdge, MeshBuilder, RegionId};

/// An abstract page: genus plus boundary-component count (1, or 2 for the
/// annulus page).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PageSpec {
    pub genus: u32,
    pub boundary: u32,
}

impl PageSpec {
    /// Number of cut arcs (= bands); their complement in the page is a disk.
    pub fn cut_arcs(&self) -> Result<usize, OpenBookError> {
        match (self.genus, self.boundary) {
            (0, 2) => Ok(1),
            (h, 1) if h >= 1 => Ok(2 * h as usize),
            _ => Err(OpenBookError::UnsupportedPage(format!(
                "genus {} with {} boundary components",
                self.genus, self.boundary
            ))),
        }
    }
}

/// One monodromy letter: a named core curve and a twist sign.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonodromyLetter {
    pub curve: String,
    pub sign: i8,
}

pub type MonodromyWord = Vec<MonodromyLetter>;

/// An abstract open book plus the optional knot curve and surgery framing.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OpenBookSpec {
    pub page: PageSpec,
    #[serde(default)]
    pub monodromy: MonodromyWord,
    #[serde(default)]
    pub delta: Option<DeltaSpec>,
    #[serde(default)]
    pub framing: Option<i64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DeltaSpec {
    pub curve: String,
}

/// The built diagram together with the aux curve handles the pipeline uses.
#[derive(Clone, Debug)]
pub struct ObDiagram {
    pub diagram: HeegaardDiagram,
    /// Core curves in the inverted half, one per band.
    pub cores: Vec<CurveId>,
    /// The knot curve, when requested.
    pub delta: Option<CurveId>,
    pub bindings: Vec<CurveId>,
}

/// Surgery-coefficient bookkeeping: the page framing of the surgery curve
/// is the user framing plus two, and the companion knot is the
/// (n+1)-pushoff.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FramingRecord {
    pub input_framing: i64,
    pub page_framing_coefficient: i64,
    pub pushoff_framing: i64,
}

pub fn framing_translate(n: i64) -> FramingRecord {
    FramingRecord { input_framing: n, page_framing_coefficient: n + 2, pushoff_framing: n + 1 }
}

pub fn framing_invert(r: &FramingRecord) -> i64 {
    r.page_framing_coefficient - 2
}

// ---------------------------------------------------------------------
// Proto-mesh assembly: nodes with explicit clockwise rotations
// ---------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Label {
    Alpha(usize),
    Beta(usize),
    Binding,
    Core(usize),
    Delta,
}

#[derive(Default)]
struct Proto {
    /// Clockwise rotation of stubs (seg, end-is-from) per node; bivalent
    /// nodes are smooth points dissolved during extraction.
    nodes: Vec<Vec<(usize, bool)>>,
    segs: Vec<(Label, usize, usize)>,
}

impl Proto {
    fn node(&mut self) -> usize {
        self.nodes.push(Vec::new());
        self.nodes.len() - 1
    }
    fn seg(&mut self, label: Label, from: usize, to: usize) -> usize {
        self.segs.push((label, from, to));
        self.segs.len() - 1
    }
    fn rot(&mut self, node: usize, stubs: Vec<(usize, bool)>) {
        self.nodes[node] = stubs;
    }
    fn head_node(&self, h: usize) -> usize {
        let (_, from, to) = self.segs[h / 2];
        if h % 2 == 0 {
            to
        } else {
            from
        }
    }
    fn next(&self, h: usize) -> usize {
        let n = self.head_node(h);
        let twin = h ^ 1;
        let stub = (twin / 2, twin % 2 == 0);
        let rot = &self.nodes[n];
        let pos = rot
            .iter()
            .position(|&s| s == stub)
            .unwrap_or_else(|| panic!("stub missing in rotation at node {n}"));
        let (seg, is_from) = rot[(pos + 1) % rot.len()];
        if is_from {
            2 * seg
        } else {
            2 * seg + 1
        }
    }
}

struct Extracted {
    mesh: crate::surface::Mesh,
    curves_of_label: BTreeMap<Label, Vec<CurveId>>,
    /// Proto half-edge -> mesh half-edge.
    heh: Vec<HalfEdge>,
}

fn extract(proto: &Proto, genus: u32) -> Extracted {
    let nseg = proto.segs.len();

    // Merge segs across bivalent nodes into chains (the mesh arcs).
    let mut chain_of = vec![usize::MAX; nseg];
    let mut chain_dir = vec![true; nseg];
    let mut chains: Vec<Vec<(usize, bool)>> = Vec::new();
    for s in 0..nseg {
        if chain_of[s] != usize::MAX {
            continue;
        }
        let mut start = (s, true);
        loop {
            let (seg, fwd) = start;
            let tail_node = if fwd { proto.segs[seg].1 } else { proto.segs[seg].2 };
            if proto.nodes[tail_node].len() != 2 {
                break;
            }
            let my_stub = (seg, fwd);
            let rot = &proto.nodes[tail_node];
            let other = if rot[0] == my_stub { rot[1] } else { rot[0] };
            let prev = (other.0, !other.1);
            if prev == (s, true) {
                break; // closed chain of bivalent nodes
            }
            start = prev;
        }
        let chain_id = chains.len();
        let mut chain: Vec<(usize, bool)> = Vec::new();
        let mut cur = start;
        loop {
            let (seg, fwd) = cur;
            chain_of[seg] = chain_id;
            chain_dir[seg] = fwd;
            chain.push(cur);
            let head_node = if fwd { proto.segs[seg].2 } else { proto.segs[seg].1 };
            if proto.nodes[head_node].len() != 2 {
                break;
            }
            let my_stub = (seg, !fwd);
            let rot = &proto.nodes[head_node];
            let other = if rot[0] == my_stub { rot[1] } else { rot[0] };
            let nxt = (other.0, other.1);
            if nxt == start {
                break;
            }
            cur = nxt;
        }
        chains.push(chain);
    }

    // Vertices: 4-valent nodes.
    let mut vertex_of_node: BTreeMap<usize, u32> = BTreeMap::new();
    for (n, rot) in proto.nodes.iter().enumerate() {
        match rot.len() {
            2 => {}
            4 => {
                let v = vertex_of_node.len() as u32;
                vertex_of_node.insert(n, v);
            }
            k => panic!("node {n} has valence {k}"),
        }
    }
    let arc_endpoints: Vec<(Option<u32>, Option<u32>)> = chains
        .iter()
        .map(|chain| {
            let (s0, f0) = chain[0];
            let (sl, fl) = *chain.last().unwrap();
            let tail = if f0 { proto.segs[s0].1 } else { proto.segs[s0].2 };
            let head = if fl { proto.segs[sl].2 } else { proto.segs[sl].1 };
            if proto.nodes[tail].len() == 2 {
                (None, None)
            } else {
                (Some(vertex_of_node[&tail]), Some(vertex_of_node[&head]))
            }
        })
        .collect();

    // Group chains by label, then split each label into closed circles and
    // assign one curve per circle.
    let mut chains_by_label: BTreeMap<Label, Vec<usize>> = BTreeMap::new();
    for (ci, chain) in chains.iter().enumerate() {
        chains_by_label.entry(proto.segs[chain[0].0].0).or_default().push(ci);
    }
    let mut curve_words: Vec<(Label, Vec<(u32, bool)>)> = Vec::new();
    for (label, cids) in &chains_by_label {
        let mut remaining: BTreeSet<usize> = cids.iter().copied().collect();
        while let Some(&start) = remaining.iter().next() {
            remaining.remove(&start);
            let mut word: Vec<(usize, bool)> = vec![(start, true)];
            loop {
                let &(c, dir) = word.last().unwrap();
                let (t, h) = arc_endpoints[c];
                if t.is_none() {
                    break; // free loop
                }
                let head_v = if dir { h.unwrap() } else { t.unwrap() };
                let mut found = None;
                for &cand in remaining.iter() {
                    let (t2, h2) = arc_endpoints[cand];
                    if t2 == Some(head_v) {
                        found = Some((cand, true));
                        break;
                    }
                    if h2 == Some(head_v) {
                        found = Some((cand, false));
                        break;
                    }
                }
                match found {
                    Some(nxt) => {
                        remaining.remove(&nxt.0);
                        word.push(nxt);
                    }
                    None => break,
                }
            }
            curve_words.push((*label, word.iter().map(|&(c, d)| (c as u32, d)).collect()));
        }
    }
    curve_words.sort_by_key(|(l, w)| (*l, w[0].0));
    let mut curves_of_label: BTreeMap<Label, Vec<CurveId>> = BTreeMap::new();
    for (i, (label, _)) in curve_words.iter().enumerate() {
        curves_of_label.entry(*label).or_default().push(CurveId(i as u32));
    }
    let curve_of_chain: BTreeMap<u32, u32> = curve_words
        .iter()
        .enumerate()
        .flat_map(|(i, (_, w))| w.iter().map(move |&(c, _)| (c, i as u32)))
        .collect();

    // Faces: trace proto orbits, collapse chain runs.
    let mut seen = vec![false; 2 * nseg];
    let mut region_words: Vec<Vec<Vec<(u32, bool)>>> = Vec::new();
    for h0 in 0..2 * nseg {
        if seen[h0] {
            continue;
        }
        let mut cyc = Vec::new();
        let mut h = h0;
        loop {
            seen[h] = true;
            cyc.push(h);
            h = proto.next(h);
            if h == h0 {
                break;
            }
        }
        let entry = |h: usize| -> (u32, bool) {
            let seg = h / 2;
            let fwd = h % 2 == 0;
            (chain_of[seg] as u32, chain_dir[seg] == fwd)
        };
        let mut word: Vec<(u32, bool)> = Vec::new();
        for &h in &cyc {
            let e = entry(h);
            if word.last() == Some(&e) {
                continue;
            }
            word.push(e);
        }
        while word.len() > 1 && word.first() == word.last() {
            word.pop();
        }
        region_words.push(vec![word]);
    }

    let family = |l: &Label| match l {
        Label::Alpha(_) => Family::Alpha,
        Label::Beta(_) => Family::Beta,
        _ => Family::Aux,
    };
    let builder = MeshBuilder {
        genus,
        vertices: vertex_of_node.values().copied().collect(),
        arcs: chains
            .iter()
            .enumerate()
            .map(|(ci, _)| {
                let (t, h) = arc_endpoints[ci];
                (ci as u32, curve_of_chain[&(ci as u32)], t, h)
            })
            .collect(),
        curves: curve_words
            .iter()
            .enumerate()
            .map(|(i, (label, word))| (i as u32, family(label), word.clone()))
            .collect(),
        regions: region_words.into_iter().enumerate().map(|(i, w)| (i as u32, w)).collect(),
    };
    let mesh = builder.build().expect("open book mesh assembles");

    let heh: Vec<HalfEdge> = (0..2 * nseg)
        .map(|h| {
            let seg = h / 2;
            let fwd = h % 2 == 0;
            let chain = ArcId(chain_of[seg] as u32);
            if chain_dir[seg] == fwd {
                HalfEdge::forward(chain)
            } else {
                HalfEdge::backward(chain)
            }
        })
        .collect();

    Extracted { mesh, curves_of_label, heh }
}

// ---------------------------------------------------------------------
// The doubled identity diagram
// ---------------------------------------------------------------------

struct BandNodes {
    bind_a_top: usize,
    bind_b_top: usize,
    bind_a_bot: usize,
    bind_b_bot: usize,
    corner_tw: usize,
    corner_te: usize,
    corner_bw: usize,
    corner_be: usize,
}

struct BandCells {
    a_bot: usize,
    a_top: usize,
    b_bot: usize,
    b_top: usize,
    long_w: Option<usize>,
    long_e: Option<usize>,
}

/// Build the Heegaard diagram of the open book with identity monodromy;
/// when `with_delta` is set, a knot curve over band 0 is included in the
/// front page half.
pub fn build_identity_diagram(
    page: &PageSpec,
    with_delta: bool,
) -> Result<ObDiagram, OpenBookError> {
    let n = page.cut_arcs()?;
    let mut p = Proto::default();

    // Feet order around the disk: (band, is_left_foot).
    let feet: Vec<(usize, bool)> = if n == 1 {
        vec![(0, true), (0, false)]
    } else {
        let mut f = Vec::new();
        for j in 0..n / 2 {
            f.push((2 * j, true));
            f.push((2 * j + 1, true));
            f.push((2 * j, false));
            f.push((2 * j + 1, false));
        }
        f
    };

    let band_nodes: Vec<BandNodes> = (0..n)
        .map(|_| BandNodes {
            bind_a_top: p.node(),
            bind_b_top: p.node(),
            bind_a_bot: p.node(),
            bind_b_bot: p.node(),
            corner_tw: p.node(),
            corner_te: p.node(),
            corner_bw: p.node(),
            corner_be: p.node(),
        })
        .collect();

    // Binding segments along the band edges (shared by both pages).
    // Top edge west->east: corner, a, b, corner; bottom: corner, b, a, corner.
    struct EdgeSegs {
        tw: usize,
        tm: usize,
        te: usize,
        bw: usize,
        bm: usize,
        be: usize,
    }
    let edge_segs: Vec<EdgeSegs> = (0..n)
        .map(|i| {
            let bn = &band_nodes[i];
            EdgeSegs {
                tw: p.seg(Label::Binding, bn.corner_tw, bn.bind_a_top),
                tm: p.seg(Label::Binding, bn.bind_a_top, bn.bind_b_top),
                te: p.seg(Label::Binding, bn.bind_b_top, bn.corner_te),
                bw: p.seg(Label::Binding, bn.corner_bw, bn.bind_b_bot),
                bm: p.seg(Label::Binding, bn.bind_b_bot, bn.bind_a_bot),
                be: p.seg(Label::Binding, bn.bind_a_bot, bn.corner_be),
            }
        })
        .collect();

    // Gap segments between consecutive feet: east end of foot k to west end
    // of foot k+1, via the corner matching (left foot: top-west corner is
    // its east end, bottom-west its west end; right foot mirrored).
    for k in 0..feet.len() {
        let (b1, l1) = feet[k];
        let (b2, l2) = feet[(k + 1) % feet.len()];
        let from = if l1 { band_nodes[b1].corner_tw } else { band_nodes[b1].corner_be };
        let to = if l2 { band_nodes[b2].corner_bw } else { band_nodes[b2].corner_te };
        p.seg(Label::Binding, from, to);
    }

    // Band interiors. Longitudinals: delta on the front band 0 (optional),
    // a core on every inverted band.
    let mut portals: BTreeMap<(bool, usize, bool), usize> = BTreeMap::new();
    let mut band_cells: BTreeMap<(bool, usize), BandCells> = BTreeMap::new();
    for plus in [true, false] {
        for i in 0..n {
            let bn = &band_nodes[i];
            let long_label = if plus {
                (with_delta && i == 0).then_some(Label::Delta)
            } else {
                Some(Label::Core(i))
            };
            let m = p.node();
            let (a_label, b_label) = (Label::Alpha(i), Label::Beta(i));
            if let Some(ll) = long_label {
                let qa = p.node();
                let qb = p.node();
                let pl = p.node();
                let pr = p.node();
                portals.insert((plus, i, true), pl);
                portals.insert((plus, i, false), pr);
                let a_bot = p.seg(a_label, bn.bind_a_bot, qa);
                let a_mid = p.seg(a_label, qa, m);
                let a_top = p.seg(a_label, m, bn.bind_a_top);
                let b_bot = p.seg(b_label, bn.bind_b_bot, qb);
                let b_mid = p.seg(b_label, qb, m);
                let b_top = p.seg(b_label, m, bn.bind_b_top);
                // Crossing order along the longitudinal going east: in the
                // front page the pushoff crossing comes first, mirrored in
                // the inverted page.
                let (first, second) = if plus { (qb, qa) } else { (qa, qb) };
                let lw = p.seg(ll, pl, first);
                let lm = p.seg(ll, first, second);
                let le = p.seg(ll, second, pr);
                if plus {
                    p.rot(m, vec![(a_mid, false), (b_mid, false), (a_top, true), (b_top, true)]);
                    p.rot(qa, vec![(a_bot, false), (lm, false), (a_mid, true), (le, true)]);
                    p.rot(qb, vec![(b_bot, false), (lw, false), (b_mid, true), (lm, true)]);
                } else {
                    p.rot(m, vec![(b_mid, false), (a_mid, false), (b_top, true), (a_top, true)]);
                    p.rot(qa, vec![(a_bot, false), (lw, false), (a_mid, true), (lm, true)]);
                    p.rot(qb, vec![(b_bot, false), (lm, false), (b_mid, true), (le, true)]);
                }
                band_cells.insert(
                    (plus, i),
                    BandCells { a_bot, a_top, b_bot, b_top, long_w: Some(lw), long_e: Some(le) },
                );
            } else {
                let a_bot = p.seg(a_label, bn.bind_a_bot, m);
                let a_top = p.seg(a_label, m, bn.bind_a_top);
                let b_bot = p.seg(b_label, bn.bind_b_bot, m);
                let b_top = p.seg(b_label, m, bn.bind_b_top);
                if plus {
                    p.rot(m, vec![(a_bot, false), (b_bot, false), (a_top, true), (b_top, true)]);
                } else {
                    p.rot(m, vec![(b_bot, false), (a_bot, false), (b_top, true), (a_top, true)]);
                }
                band_cells.insert(
                    (plus, i),
                    BandCells { a_bot, a_top, b_bot, b_top, long_w: None, long_e: None },
                );
            }
        }
    }

    // Binding vertex rotations: top edge CW [bindE, front, bindW, inverted];
    // bottom edge CW [bindE, inverted, bindW, front].
    for i in 0..n {
        let bn = &band_nodes[i];
        let es = &edge_segs[i];
        let cp = &band_cells[&(true, i)];
        let cm = &band_cells[&(false, i)];
        p.rot(
            bn.bind_a_top,
            vec![(es.tm, true), (cp.a_top, false), (es.tw, false), (cm.a_top, false)],
        );
        p.rot(
            bn.bind_b_top,
            vec![(es.te, true), (cp.b_top, false), (es.tm, false), (cm.b_top, false)],
        );
        p.rot(
            bn.bind_b_bot,
            vec![(es.bm, true), (cm.b_bot, true), (es.bw, false), (cp.b_bot, true)],
        );
        p.rot(
            bn.bind_a_bot,
            vec![(es.be, true), (cm.a_bot, true), (es.bm, false), (cp.a_bot, true)],
        );
    }
    // Corner rotations (bivalent).
    {
        let corner_set: BTreeSet<usize> = band_nodes
            .iter()
            .flat_map(|bn| [bn.corner_tw, bn.corner_te, bn.corner_bw, bn.corner_be])
            .collect();
        let mut stubs: BTreeMap<usize, Vec<(usize, bool)>> = BTreeMap::new();
        for (si, (label, from, to)) in p.segs.iter().enumerate() {
            if !matches!(label, Label::Binding) {
                continue;
            }
            if corner_set.contains(from) {
                stubs.entry(*from).or_default().push((si, true));
            }
            if corner_set.contains(to) {
                stubs.entry(*to).or_default().push((si, false));
            }
        }
        for (node, s) in stubs {
            assert_eq!(s.len(), 2, "corner node joins exactly two binding segs");
            p.rot(node, s);
        }
    }

    // Disk chords: delta on the front page (band 0), cores on the inverted
    // page. Interleaved pairs cross once (even band's east leg over the odd
    // band's west leg).
    for plus in [true, false] {
        let chord_bands: Vec<usize> = if plus {
            if with_delta {
                vec![0]
            } else {
                vec![]
            }
        } else {
            (0..n).collect()
        };
        if chord_bands.is_empty() {
            continue;
        }
        if plus || n == 1 {
            for &i in &chord_bands {
                let label = if plus { Label::Delta } else { Label::Core(i) };
                let pl = portals[&(plus, i, true)];
                let pr = portals[&(plus, i, false)];
                let bd = p.node();
                let left = p.seg(label, pl, bd);
                let right = p.seg(label, bd, pr);
                p.rot(bd, vec![(left, false), (right, true)]);
                let cells = &band_cells[&(plus, i)];
                p.rot(pl, vec![(left, true), (cells.long_w.unwrap(), true)]);
                p.rot(pr, vec![(right, false), (cells.long_e.unwrap(), false)]);
            }
        } else {
            for j in 0..n / 2 {
                let (ia, ib) = (2 * j, 2 * j + 1);
                let (la, lb) = (Label::Core(ia), Label::Core(ib));
                let pla = portals[&(false, ia, true)];
                let pra = portals[&(false, ia, false)];
                let plb = portals[&(false, ib, true)];
                let prb = portals[&(false, ib, false)];
                let bda = p.node();
                let bdb = p.node();
                let x = p.node();
                let a_left = p.seg(la, pla, bda);
                let ar1 = p.seg(la, bda, x);
                let ar2 = p.seg(la, x, pra);
                let bl1 = p.seg(lb, plb, x);
                let bl2 = p.seg(lb, x, bdb);
                let b_right = p.seg(lb, bdb, prb);
                // CW at the crossing: [A-to-foot, B-to-bend, A-to-bend,
                // B-to-foot].
                p.rot(x, vec![(ar2, true), (bl2, true), (ar1, false), (bl1, false)]);
                p.rot(bda, vec![(a_left, false), (ar1, true)]);
                p.rot(bdb, vec![(bl2, false), (b_right, true)]);
                let ca = &band_cells[&(false, ia)];
                let cb = &band_cells[&(false, ib)];
                p.rot(pla, vec![(a_left, true), (ca.long_w.unwrap(), true)]);
                p.rot(pra, vec![(ar2, false), (ca.long_e.unwrap(), false)]);
                p.rot(plb, vec![(bl1, true), (cb.long_w.unwrap(), true)]);
                p.rot(prb, vec![(b_right, false), (cb.long_e.unwrap(), false)]);
            }
        }
    }

    let ex = extract(&p, n as u32);
    let mesh = ex.mesh;

    let bindings = ex.curves_of_label[&Label::Binding].clone();
    let expected_bindings = if n == 1 { 2 } else { 1 };
    if bindings.len() != expected_bindings {
        return Err(OpenBookError::UnsupportedPage(format!(
            "binding has {} components, expected {expected_bindings}",
            bindings.len()
        )));
    }
    let single = |l: Label| -> CurveId {
        let v = &ex.curves_of_label[&l];
        assert_eq!(v.len(), 1, "{l:?} should be one circle");
        v[0]
    };
    let alpha: Vec<CurveId> = (0..n).map(|i| single(Label::Alpha(i))).collect();
    let beta: Vec<CurveId> = (0..n).map(|i| single(Label::Beta(i))).collect();
    let cores: Vec<CurveId> = (0..n).map(|i| single(Label::Core(i))).collect();
    let delta = with_delta.then(|| single(Label::Delta));

    // z: the region west of band 0's front pushoff, beside the bottom
    // binding edge; it flows into the page's big disk region.
    let b_bot_seg = band_cells[&(true, 0)].b_bot;
    let z_region = mesh.region_of(ex.heh[2 * b_bot_seg]);

    let diagram = HeegaardDiagram { mesh, alpha, beta, z_region, w_region: None, marks: None };
    Ok(ObDiagram { diagram, cores, delta, bindings })
}

// ---------------------------------------------------------------------
// Monodromy and basepoints
// ---------------------------------------------------------------------

/// Resolve a letter name to a core curve: "a"/"b" on the once-punctured
/// torus, "core" on the annulus, or "c<i>" in general.
pub fn core_by_name(ob: &ObDiagram, name: &str) -> Result<CurveId, OpenBookError> {
    let idx = match name {
        "a" if !ob.cores.is_empty() => 0,
        "b" if ob.cores.len() >= 2 => 1,
        "core" if ob.cores.len() == 1 => 0,
        other => other
            .strip_prefix('c')
            .and_then(|s| s.parse::<usize>().ok())
            .filter(|&i| i < ob.cores.len())
            .ok_or_else(|| OpenBookError::TwistCurveOutsidePage(other.to_string()))?,
    };
    Ok(ob.cores[idx])
}

/// Apply each monodromy letter in order as a Dehn twist of all beta curves
/// along the named core curve in the inverted-page half.
///
/// Twisting several targets at once leaves cancelling crossing pairs
/// between them (the parallel copies cross each other's strands), so the
/// pairwise disjointness of the beta system is restored by bigon reduction
/// after each letter.
pub fn apply_monodromy(ob: &ObDiagram, word: &MonodromyWord) -> Result<ObDiagram, OpenBookError> {
    let mut out = ob.clone();
    for letter in word {
        let core = core_by_name(&out, &letter.curve)?;
        let targets: BTreeSet<CurveId> = out.diagram.beta.iter().copied().collect();
        out.diagram = out
            .diagram
            .dehn_twist(core, letter.sign, &targets)
            .map_err(|e| OpenBookError::TwistCurveOutsidePage(format!("{e}")))?;
        let betas = out.diagram.beta.clone();
        for (i, &b1) in betas.iter().enumerate() {
            for &b2 in betas.iter().skip(i + 1) {
                if out.diagram.mesh.intersection_count(b1, b2) > 0 {
                    out.diagram = out
                        .diagram
                        .separate_curves(b1, b2)
                        .map_err(|e| OpenBookError::TwistCurveOutsidePage(format!("{e}")))?;
                }
            }
        }
    }
    Ok(out)
}

/// Place the knot basepoint w: the region across beta_1 from z along the
/// knot curve.
pub fn place_knot_basepoints(ob: &ObDiagram) -> Result<ObDiagram, OpenBookError> {
    let delta = ob
        .delta
        .ok_or_else(|| OpenBookError::NoAdaptedConfiguration("no delta curve".into()))?;
    let mut out = ob.clone();
    if out.diagram.w_region.is_some() {
        return Ok(out); // idempotent
    }
    let d = &out.diagram;
    let beta1 = d.beta[0];
    let mesh = &d.mesh;
    if mesh.intersection_count(delta, beta1) != 1 {
        return Err(OpenBookError::NoAdaptedConfiguration(
            "delta does not meet beta_1 exactly once".into(),
        ));
    }
    for &b in d.beta.iter().skip(1) {
        if mesh.intersection_count(delta, b) != 0 {
            return Err(OpenBookError::NoAdaptedConfiguration(
                "delta meets another beta circle".into(),
            ));
        }
    }
    let q0 = mesh
        .vertices()
        .find(|&v| {
            let cs = mesh.curves_at_vertex(v);
            cs.contains(&delta) && cs.contains(&beta1)
        })
        .expect("adapted crossing exists");
    let out_edges = mesh.out_halfedges(q0);
    let start = *out_edges.iter().min().unwrap();
    let mut rot = vec![start];
    for _ in 0..3 {
        rot.push(mesh.rotate_cw(*rot.last().unwrap()));
    }
    let quadrant = |i: usize| mesh.region_of(rot[i % 4].twin());
    let zq = (0..4).find(|&i| quadrant(i) == d.z_region).ok_or_else(|| {
        OpenBookError::NoAdaptedConfiguration("z is not adjacent to the knot crossing".into())
    })?;
    // w is across the pushoff from z: of the two quadrants neighboring
    // z's, take the one separated by the beta edge. Quadrant i is bounded
    // by out-edges i and i+1.
    let w_region = if mesh.curve_of_halfedge(rot[(zq + 1) % 4]) == beta1 {
        quadrant(zq + 1)
    } else {
        debug_assert_eq!(mesh.curve_of_halfedge(rot[zq]), beta1);
        quadrant(zq + 3)
    };
    if w_region == d.z_region {
        return Err(OpenBookError::NoAdaptedConfiguration("w would coincide with z".into()));
    }
    out.diagram.w_region = Some(w_region);
    Ok(out)
}

/// Region id of the z quadrant helper shared with the twist-triple builder.
pub fn knot_crossing(ob: &ObDiagram) -> Option<crate::surface::VertexId> {
    let delta = ob.delta?;
    let beta1 = ob.diagram.beta[0];
    ob.diagram.mesh.vertices().find(|&v| {
        let cs = ob.diagram.mesh.curves_at_vertex(v);
        cs.contains(&delta) && cs.contains(&beta1)
    })
}

pub fn region_id_of(_: &HeegaardDiagram, r: RegionId) -> RegionId {
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::floer::{self, FlatDiagram, Forbidden};

    #[test]
    fn annulus_identity_diagram() {
        let ob = build_identity_diagram(&PageSpec { genus: 0, boundary: 2 }, false).unwrap();
        let rep = ob.diagram.validate();
        assert!(rep.ok(), "violations: {:?}", rep.violations);
        let mesh = &ob.diagram.mesh;
        assert_eq!(ob.bindings.len(), 2);
        assert_eq!(mesh.intersection_count(ob.diagram.alpha[0], ob.diagram.beta[0]), 2);
        let flat = FlatDiagram::new(&ob.diagram).unwrap();
        assert_eq!(flat.vertices.len(), 2);
        assert_eq!(flat.enumerate_generators().len(), 2);
        // Raw doubled diagram: two flat bigons and one flat annulus, with z
        // in the annulus-side region.
        let chis: Vec<i64> = flat.regions.iter().map(|r| r.chi).collect();
        assert_eq!(chis.iter().filter(|&&c| c == 0).count(), 1);
        assert_eq!(chis.iter().filter(|&&c| c == 1).count(), 2);
        assert_eq!(flat.regions[flat.z].chi, 0);
        // With z in the big region the bigon-difference domain has mixed
        // signs, so the diagram is weakly admissible; and since the only
        // region that is not a bigon or square holds z, it is vacuously
        // nice. The rank comes out directly.
        assert!(flat.check_admissibility().is_ok());
        assert!(flat.is_nice());
        assert_eq!(floer::homology_rank(&ob.diagram, Forbidden::ZOnly).unwrap(), 2);

        // Moving z into one of the lens regions (the two sides of the
        // parallel-curve picture) exposes a one-signed periodic domain.
        let bigon_flat = (0..flat.regions.len()).find(|&i| flat.regions[i].chi == 1).unwrap();
        let mut moved = ob.diagram.clone();
        moved.z_region = flat.regions[bigon_flat].members[0];
        let flat2 = FlatDiagram::new(&moved).unwrap();
        let violating = flat2.check_admissibility().unwrap_err();
        let signs: std::collections::BTreeSet<i64> =
            violating.iter().map(|v| v.signum()).filter(|&s| s != 0).collect();
        assert_eq!(signs.len(), 1, "violating domain must be one-signed: {violating:?}");
    }

    #[test]
    fn punctured_torus_identity_diagram() {
        let ob = build_identity_diagram(&PageSpec { genus: 1, boundary: 1 }, false).unwrap();
        let rep = ob.diagram.validate();
        assert!(rep.ok(), "violations: {:?}", rep.violations);
        let mesh = &ob.diagram.mesh;
        assert_eq!(ob.bindings.len(), 1);
        for i in 0..2 {
            for j in 0..2 {
                let want = if i == j { 2 } else { 0 };
                assert_eq!(
                    mesh.intersection_count(ob.diagram.alpha[i], ob.diagram.beta[j]),
                    want,
                    "alpha_{i} x beta_{j}"
                );
            }
        }
        let flat = FlatDiagram::new(&ob.diagram).unwrap();
        assert_eq!(flat.vertices.len(), 4);
        assert_eq!(flat.enumerate_generators().len(), 4);
        // Region census forced by the doubled cut-and-pushoff arrangement:
        // four bigons (the doubled wedges) and one 8-cornered region of
        // Euler characteristic -2.
        assert_eq!(flat.regions.len(), 5);
        let bigons = flat.regions.iter().filter(|r| r.chi == 1 && r.corners == 2).count();
        assert_eq!(bigons, 4);
        let big = flat.regions.iter().find(|r| r.chi == -2).unwrap();
        assert_eq!(big.corners, 8);
        // The z basepoint sits in the one big region, so the diagram is
        // vacuously nice and the rank of the double connected sum comes
        // out directly.
        assert_eq!(flat.regions[flat.z].chi, -2);
        assert!(flat.is_nice());
        // Periodic domain lattice with n_z = 0 has rank two.
        assert_eq!(flat.lattice_nz_zero().len(), 2);
        assert_eq!(floer::homology_rank(&ob.diagram, Forbidden::ZOnly).unwrap(), 4);
    }

    #[test]
    fn genus_two_page_builds() {
        let ob = build_identity_diagram(&PageSpec { genus: 2, boundary: 1 }, false).unwrap();
        let rep = ob.diagram.validate();
        assert!(rep.ok(), "violations: {:?}", rep.violations);
        let flat = FlatDiagram::new(&ob.diagram).unwrap();
        assert_eq!(flat.enumerate_generators().len(), 16);
    }

    #[test]
    fn delta_is_adapted() {
        let ob = build_identity_diagram(&PageSpec { genus: 1, boundary: 1 }, true).unwrap();
        assert!(ob.diagram.validate().ok());
        let delta = ob.delta.unwrap();
        let mesh = &ob.diagram.mesh;
        assert_eq!(mesh.intersection_count(delta, ob.diagram.beta[0]), 1);
        assert_eq!(mesh.intersection_count(delta, ob.diagram.beta[1]), 0);
        assert_eq!(mesh.intersection_count(delta, ob.diagram.alpha[0]), 1);
        let with_w = place_knot_basepoints(&ob).unwrap();
        assert!(with_w.diagram.w_region.is_some());
        assert!(with_w.diagram.validate().ok());
        let again = place_knot_basepoints(&with_w).unwrap();
        assert_eq!(again.diagram.w_region, with_w.diagram.w_region);
    }

    #[test]
    fn delta_missing_is_an_error() {
        let ob = build_identity_diagram(&PageSpec { genus: 1, boundary: 1 }, false).unwrap();
        assert!(place_knot_basepoints(&ob).is_err());
    }

    #[test]
    fn unsupported_pages_rejected() {
        assert!(build_identity_diagram(&PageSpec { genus: 0, boundary: 1 }, false).is_err());
        assert!(build_identity_diagram(&PageSpec { genus: 1, boundary: 2 }, false).is_err());
    }

    #[test]
    fn framing_arithmetic() {
        assert_eq!(framing_translate(-1).page_framing_coefficient, 1);
        assert_eq!(framing_translate(-2).page_framing_coefficient, 0);
        for n in -5..=5 {
            assert_eq!(framing_invert(&framing_translate(n)), n);
        }
    }

    #[test]
    fn empty_monodromy_is_identity() {
        let ob = build_identity_diagram(&PageSpec { genus: 0, boundary: 2 }, false).unwrap();
        let out = apply_monodromy(&ob, &vec![]).unwrap();
        assert_eq!(out.diagram.mesh.vertex_count(), ob.diagram.mesh.vertex_count());
    }

    #[test]
    fn annulus_core_twists_give_lens_spaces() {
        for ptw in 1..=3 {
            let ob = build_identity_diagram(&PageSpec { genus: 0, boundary: 2 }, false).unwrap();
            let word: MonodromyWord =
                (0..ptw).map(|_| MonodromyLetter { curve: "core".into(), sign: 1 }).collect();
            let twisted = apply_monodromy(&ob, &word).unwrap();
            assert!(twisted.diagram.validate().ok());
            let reduced = twisted.diagram.reduce_all_bigons().unwrap();
            assert_eq!(
                reduced.mesh.intersection_count(reduced.alpha[0], reduced.beta[0]),
                ptw as usize,
                "{ptw} twists"
            );
            let flat = FlatDiagram::new(&reduced).unwrap();
            if flat.is_nice() && flat.check_admissibility().is_ok() {
                let rank = floer::homology_rank(&reduced, Forbidden::ZOnly).unwrap();
                assert_eq!(rank, ptw as usize);
            }
        }
    }
}
