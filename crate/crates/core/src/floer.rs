//! Generators, domains, Maslov index, admissibility, niceness, and the
//! combinatorial differential counting empty bigons and rectangles.
//!
//! All counting happens on the *flattened* view of a diagram: aux curves
//! (binding circles, twist curves, inactive attaching circles) are deleted
//! virtually, merging the stored regions they separate. Flat regions carry
//! an Euler characteristic, so annular complement components (which arise
//! before admissibility fixes) are handled honestly.

use std::collections::{BTreeMap, BTreeSet};

use crate::diagram::HeegaardDiagram;
use crate::error::FloerError;
use crate::f2::F2Matrix;
use crate::homology::ChainComplexF2;
use crate::intlin;
use crate::surface::{CurveId, HalfEdge, RegionId, VertexId};

/// One complement component of the active curves (alpha plus the diagram's
/// beta circles), as a union of stored regions.
#[derive(Clone, Debug)]
pub struct FlatRegion {
    pub members: Vec<RegionId>,
    pub chi: i64,
    pub corners: usize,
}

/// An intersection point of an alpha circle with a beta circle.
#[derive(Clone, Debug)]
pub struct FlatVertex {
    pub vertex: VertexId,
    pub alpha_idx: usize,
    pub beta_idx: usize,
    /// Flat region of each quadrant, in clockwise rotation order; quadrant
    /// i lies between out-edges i and i+1.
    pub quadrants: [usize; 4],
}

#[derive(Clone, Debug)]
struct FlatArc {
    is_alpha: bool,
    tail: Option<usize>,
    head: Option<usize>,
    left: usize,
    right: usize,
}

/// The flattened diagram: everything the counting layer needs.
#[derive(Clone, Debug)]
pub struct FlatDiagram {
    pub regions: Vec<FlatRegion>,
    pub region_index: BTreeMap<RegionId, usize>,
    pub vertices: Vec<FlatVertex>,
    pub vertex_index: BTreeMap<VertexId, usize>,
    arcs: Vec<FlatArc>,
    pub z: usize,
    pub w: Option<usize>,
    /// Homogeneous flux system (two rows per flat vertex).
    system: Vec<Vec<i64>>,
    /// Periodic domain lattice: integer kernel of the flux system.
    kernel: Vec<Vec<i64>>,
}

/// A generator: one flat vertex per alpha index, hitting each beta index
/// exactly once.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Generator {
    /// Flat vertex index per alpha position.
    pub coords: Vec<usize>,
}

impl Generator {
    pub fn label(&self, flat: &FlatDiagram) -> String {
        let names: Vec<String> =
            self.coords.iter().map(|&i| flat.vertices[i].vertex.to_string()).collect();
        names.join("&")
    }
}

impl FlatDiagram {
    pub fn new(diagram: &HeegaardDiagram) -> Result<FlatDiagram, FloerError> {
        let mesh = &diagram.mesh;
        let mut active: BTreeMap<CurveId, (bool, usize)> = BTreeMap::new();
        for (i, &c) in diagram.alpha.iter().enumerate() {
            active.insert(c, (true, i));
        }
        for (i, &c) in diagram.beta.iter().enumerate() {
            if active.insert(c, (false, i)).is_some() {
                return Err(FloerError::NotNice(format!("curve {c} plays two roles")));
            }
        }

        // Union-find over stored regions across inactive arcs.
        let region_ids: Vec<RegionId> = mesh.regions.keys().copied().collect();
        let idx_of: BTreeMap<RegionId, usize> =
            region_ids.iter().enumerate().map(|(i, r)| (*r, i)).collect();
        let mut parent: Vec<usize> = (0..region_ids.len()).collect();
        fn find(parent: &mut Vec<usize>, i: usize) -> usize {
            if parent[i] != i {
                let root = find(parent, parent[i]);
                parent[i] = root;
            }
            parent[i]
        }
        for (a, d) in mesh.arcs() {
            if active.contains_key(&d.curve) {
                continue;
            }
            let l = idx_of[&mesh.region_of(HalfEdge::forward(a))];
            let r = idx_of[&mesh.region_of(HalfEdge::backward(a))];
            let (lr, rr) = (find(&mut parent, l), find(&mut parent, r));
            if lr != rr {
                parent[lr] = rr;
            }
        }
        // Groups, deterministically ordered by smallest member id.
        let mut groups: BTreeMap<usize, Vec<RegionId>> = BTreeMap::new();
        for (i, r) in region_ids.iter().enumerate() {
            let root = find(&mut parent, i);
            groups.entry(root).or_default().push(*r);
        }
        let mut group_list: Vec<Vec<RegionId>> = groups.into_values().collect();
        group_list.sort_by_key(|g| g[0]);
        let mut region_index: BTreeMap<RegionId, usize> = BTreeMap::new();
        for (gi, g) in group_list.iter().enumerate() {
            for r in g {
                region_index.insert(*r, gi);
            }
        }

        // Euler characteristics of the flat regions.
        let mut chi: Vec<i64> = group_list
            .iter()
            .map(|g| g.iter().map(|r| mesh.regions[r].chi()).sum())
            .collect();
        for (a, d) in mesh.arcs() {
            if active.contains_key(&d.curve) {
                continue;
            }
            if d.from.is_none() {
                continue; // free loop: edge and implied vertex cancel
            }
            chi[region_index[&mesh.region_of(HalfEdge::forward(a))]] -= 1;
        }
        for v in mesh.vertices() {
            let out = mesh.out_halfedges(v);
            if out.iter().all(|&h| !active.contains_key(&mesh.curve_of_halfedge(h))) {
                let r = mesh.region_of(out[0]);
                chi[region_index[&r]] += 1;
            }
        }

        // Flat vertices: both curves through the vertex active, one alpha
        // and one beta.
        let mut vertices = Vec::new();
        let mut vertex_index = BTreeMap::new();
        for v in mesh.vertices() {
            let out = mesh.out_halfedges(v);
            let distinct: BTreeSet<CurveId> =
                out.iter().map(|&h| mesh.curve_of_halfedge(h)).collect();
            let active_count = distinct.iter().filter(|c| active.contains_key(c)).count();
            if active_count < 2 {
                continue;
            }
            if out.len() != 4 {
                return Err(FloerError::NotNice(format!("vertex {v} is not 4-valent")));
            }
            let start = *out.iter().min().unwrap();
            let mut rot = vec![start];
            for _ in 0..3 {
                rot.push(mesh.rotate_cw(*rot.last().unwrap()));
            }
            let (mut alpha_idx, mut beta_idx) = (None, None);
            for &h in &rot {
                match active[&mesh.curve_of_halfedge(h)] {
                    (true, i) => alpha_idx = Some(i),
                    (false, i) => beta_idx = Some(i),
                }
            }
            let (Some(ai), Some(bi)) = (alpha_idx, beta_idx) else {
                continue;
            };
            let quadrants = [
                region_index[&mesh.region_of(rot[0].twin())],
                region_index[&mesh.region_of(rot[1].twin())],
                region_index[&mesh.region_of(rot[2].twin())],
                region_index[&mesh.region_of(rot[3].twin())],
            ];
            let fi = vertices.len();
            vertices.push(FlatVertex { vertex: v, alpha_idx: ai, beta_idx: bi, quadrants });
            vertex_index.insert(v, fi);
        }

        // Corner counts per flat region.
        let mut corners = vec![0usize; group_list.len()];
        for fv in &vertices {
            for q in fv.quadrants {
                corners[q] += 1;
            }
        }
        let regions: Vec<FlatRegion> = group_list
            .iter()
            .zip(chi.iter())
            .zip(corners.iter())
            .map(|((g, &chi), &corners)| FlatRegion { members: g.clone(), chi, corners })
            .collect();

        // Flat arcs along each active curve.
        let mut arcs = Vec::new();
        for (&curve, &(is_alpha, _)) in active.iter() {
            let word = &mesh.curves[&curve].word;
            let hes: Vec<HalfEdge> = word
                .iter()
                .map(|&(a, f)| if f { HalfEdge::forward(a) } else { HalfEdge::backward(a) })
                .collect();
            let flat_positions: Vec<usize> = (0..hes.len())
                .filter(|&i| {
                    mesh.head(hes[i]).map(|v| vertex_index.contains_key(&v)).unwrap_or(false)
                })
                .collect();
            if flat_positions.is_empty() {
                let h = hes[0];
                arcs.push(FlatArc {
                    is_alpha,
                    tail: None,
                    head: None,
                    left: region_index[&mesh.region_of(h)],
                    right: region_index[&mesh.region_of(h.twin())],
                });
                continue;
            }
            for (pi, &p) in flat_positions.iter().enumerate() {
                let q = flat_positions[(pi + 1) % flat_positions.len()];
                let tail_v = mesh.head(hes[p]).unwrap();
                let head_v = mesh.head(hes[q]).unwrap();
                let mut sides = None;
                let mut i = (p + 1) % hes.len();
                loop {
                    let l = region_index[&mesh.region_of(hes[i])];
                    let r = region_index[&mesh.region_of(hes[i].twin())];
                    match sides {
                        None => sides = Some((l, r)),
                        Some(prev) => debug_assert_eq!(prev, (l, r), "flat sides change mid-arc"),
                    }
                    if i == q {
                        break;
                    }
                    i = (i + 1) % hes.len();
                }
                let (l, r) = sides.unwrap();
                arcs.push(FlatArc {
                    is_alpha,
                    tail: Some(vertex_index[&tail_v]),
                    head: Some(vertex_index[&head_v]),
                    left: l,
                    right: r,
                });
            }
        }

        let z = *region_index
            .get(&diagram.z_region)
            .ok_or_else(|| FloerError::NotNice("z region missing".into()))?;
        let w = match diagram.w_region {
            Some(wr) => Some(
                *region_index
                    .get(&wr)
                    .ok_or_else(|| FloerError::NotNice("w region missing".into()))?,
            ),
            None => None,
        };

        // Flux system: two equations per flat vertex.
        let m = regions.len();
        let mut system: Vec<Vec<i64>> = Vec::with_capacity(2 * vertices.len());
        for fvi in 0..vertices.len() {
            for is_alpha in [true, false] {
                let mut row = vec![0i64; m];
                for arc in &arcs {
                    if arc.is_alpha != is_alpha {
                        continue;
                    }
                    if arc.head == Some(fvi) {
                        row[arc.left] += 1;
                        row[arc.right] -= 1;
                    }
                    if arc.tail == Some(fvi) {
                        row[arc.left] -= 1;
                        row[arc.right] += 1;
                    }
                }
                system.push(row);
            }
        }
        let kernel = intlin::kernel_basis(&system);

        Ok(FlatDiagram {
            regions,
            region_index,
            vertices,
            vertex_index,
            arcs,
            z,
            w,
            system,
            kernel,
        })
    }

    /// All generators in lexicographic order (alpha index, then vertex id).
    pub fn enumerate_generators(&self) -> Vec<Generator> {
        let g = self.vertices.iter().map(|v| v.alpha_idx + 1).max().unwrap_or(0);
        let num_beta = self.vertices.iter().map(|v| v.beta_idx + 1).max().unwrap_or(0);
        if g == 0 {
            return Vec::new();
        }
        let mut per_alpha: Vec<Vec<usize>> = vec![Vec::new(); g];
        let mut order: Vec<usize> = (0..self.vertices.len()).collect();
        order.sort_by_key(|&i| self.vertices[i].vertex);
        for i in order {
            per_alpha[self.vertices[i].alpha_idx].push(i);
        }
        fn rec(
            per_alpha: &[Vec<usize>],
            vertices: &[FlatVertex],
            coords: &mut Vec<usize>,
            used: &mut Vec<bool>,
            out: &mut Vec<Generator>,
        ) {
            let a = coords.len();
            if a == per_alpha.len() {
                out.push(Generator { coords: coords.clone() });
                return;
            }
            for &vi in &per_alpha[a] {
                let b = vertices[vi].beta_idx;
                if !used[b] {
                    used[b] = true;
                    coords.push(vi);
                    rec(per_alpha, vertices, coords, used, out);
                    coords.pop();
                    used[b] = false;
                }
            }
        }
        let mut out = Vec::new();
        let mut coords = Vec::with_capacity(g);
        let mut used = vec![false; num_beta.max(g)];
        rec(&per_alpha, &self.vertices, &mut coords, &mut used, &mut out);
        out
    }

    fn rhs(&self, x: &Generator, y: &Generator) -> Vec<i64> {
        let mut rhs = vec![0i64; 2 * self.vertices.len()];
        for &xi in &x.coords {
            rhs[2 * xi] -= 1; // alpha flux: [y] - [x]
            rhs[2 * xi + 1] += 1; // beta flux: [x] - [y]
        }
        for &yi in &y.coords {
            rhs[2 * yi] += 1;
            rhs[2 * yi + 1] -= 1;
        }
        rhs
    }

    /// Solve the corner/boundary system: one particular integer domain plus
    /// the periodic lattice, or None when x and y are not connected.
    pub fn connecting_domains(
        &self,
        x: &Generator,
        y: &Generator,
    ) -> Option<(Vec<i64>, Vec<Vec<i64>>)> {
        let rhs = self.rhs(x, y);
        intlin::solve_integer(&self.system, &rhs).map(|(p, _)| (p, self.kernel.clone()))
    }

    /// The periodic-domain lattice with n_z = 0.
    pub fn lattice_nz_zero(&self) -> Vec<Vec<i64>> {
        if self.kernel.is_empty() {
            return Vec::new();
        }
        let zrow: Vec<i64> = self.kernel.iter().map(|k| k[self.z]).collect();
        let combos = intlin::kernel_basis(&[zrow]);
        combos
            .into_iter()
            .map(|c| {
                let mut v = vec![0i64; self.regions.len()];
                for (j, &cj) in c.iter().enumerate() {
                    for (i, vi) in v.iter_mut().enumerate() {
                        *vi += cj * self.kernel[j][i];
                    }
                }
                v
            })
            .collect()
    }

    /// Verify the domain has the right corner structure for (x, y) and
    /// return four times its Maslov index.
    pub fn maslov_index4(
        &self,
        domain: &[i64],
        x: &Generator,
        y: &Generator,
    ) -> Result<i64, FloerError> {
        let rhs = self.rhs(x, y);
        for (row, &want) in self.system.iter().zip(rhs.iter()) {
            let have: i64 = row.iter().zip(domain.iter()).map(|(c, d)| c * d).sum();
            if have != want {
                return Err(FloerError::CornerMismatch(format!(
                    "boundary flux {have} != {want}"
                )));
            }
        }
        let e4: i64 = domain
            .iter()
            .zip(self.regions.iter())
            .map(|(&d, r)| d * (4 * r.chi - r.corners as i64))
            .sum();
        let mut point4 = 0i64;
        for gen in [x, y] {
            for &vi in &gen.coords {
                for q in self.vertices[vi].quadrants {
                    point4 += domain[q];
                }
            }
        }
        Ok(e4 + point4)
    }

    /// Weak admissibility: every nonzero periodic domain with n_z = 0 must
    /// have coefficients of both signs. Returns a violating domain if any.
    pub fn check_admissibility(&self) -> Result<(), Vec<i64>> {
        let lattice = self.lattice_nz_zero();
        if lattice.is_empty() {
            return Ok(());
        }
        match intlin::nonnegative_combination(&lattice) {
            None => Ok(()),
            Some(t) => {
                let lcm = t.iter().fold(1i128, |acc, r| {
                    let g = {
                        let (mut a, mut b) = (acc.unsigned_abs(), r.den.unsigned_abs());
                        while b != 0 {
                            let tmp = a % b;
                            a = b;
                            b = tmp;
                        }
                        a.max(1)
                    };
                    acc / g as i128 * r.den
                });
                let mut v = vec![0i64; self.regions.len()];
                for (j, r) in t.iter().enumerate() {
                    let c = r.num * (lcm / r.den);
                    for (i, vi) in v.iter_mut().enumerate() {
                        *vi += (c as i64) * lattice[j][i];
                    }
                }
                Err(v)
            }
        }
    }

    /// Bad flat regions: everything without a basepoint that is not a disk
    /// bigon or square.
    pub fn bad_regions(&self) -> Vec<usize> {
        (0..self.regions.len())
            .filter(|&i| {
                if i == self.z || Some(i) == self.w {
                    return false;
                }
                let r = &self.regions[i];
                !(r.chi == 1 && (r.corners == 2 || r.corners == 4))
            })
            .collect()
    }

    pub fn is_nice(&self) -> bool {
        self.bad_regions().is_empty()
    }

    /// Badness measure: sum over bad regions of (corners - 4) plus the bad
    /// region count, with non-disk regions surcharged by their chi defect.
    pub fn badness(&self) -> usize {
        self.bad_regions()
            .iter()
            .map(|&i| {
                let r = &self.regions[i];
                let corner_excess = r.corners.saturating_sub(4);
                let chi_defect = (4 * (1 - r.chi).max(0)) as usize;
                corner_excess + 1 + chi_defect
            })
            .sum()
    }

    /// Enumerate the domains with all coefficients in {0, 1} in the affine
    /// family (particular + lattice).
    fn zero_one_translates(&self, particular: &[i64], lattice: &[Vec<i64>]) -> Vec<Vec<i64>> {
        let m = particular.len();
        let (ech, pivots) = intlin::row_echelon_lattice(lattice);
        fn rec(
            ech: &[Vec<i64>],
            pivots: &[usize],
            particular: &[i64],
            coeffs: &mut Vec<i64>,
            out: &mut Vec<Vec<i64>>,
            m: usize,
        ) {
            let j = coeffs.len();
            if j == ech.len() {
                let mut d = particular.to_vec();
                for (c, row) in coeffs.iter().zip(ech.iter()) {
                    for i in 0..m {
                        d[i] += c * row[i];
                    }
                }
                if d.iter().all(|&v| v == 0 || v == 1) {
                    out.push(d);
                }
                return;
            }
            let p = pivots[j];
            let mut base = particular[p];
            for (c, row) in coeffs.iter().zip(ech.iter()) {
                base += c * row[p];
            }
            let d = ech[j][p];
            for target in [0i64, 1] {
                let num = target - base;
                if num % d == 0 {
                    coeffs.push(num / d);
                    rec(ech, pivots, particular, coeffs, out, m);
                    coeffs.pop();
                }
            }
        }
        let mut out = Vec::new();
        if ech.is_empty() {
            if particular.iter().all(|&v| v == 0 || v == 1) {
                out.push(particular.to_vec());
            }
            return out;
        }
        let mut coeffs = Vec::new();
        rec(&ech, &pivots, particular, &mut coeffs, &mut out, m);
        out
    }

    /// Is the domain one the hat differential counts from x to y: all
    /// multiplicities in {0,1}, Maslov index one, zero at the forbidden
    /// regions, empty at every shared coordinate.
    fn counted(&self, d: &[i64], x: &Generator, y: &Generator, forbidden: &[usize]) -> bool {
        if forbidden.iter().any(|&f| d[f] != 0) {
            return false;
        }
        let mu4 = self.maslov_index4(d, x, y).expect("solver output satisfies corners");
        if mu4 != 4 {
            return false;
        }
        for (&xi, &yi) in x.coords.iter().zip(y.coords.iter()) {
            if xi == yi && self.vertices[xi].quadrants.iter().any(|&q| d[q] != 0) {
                return false;
            }
        }
        true
    }

    /// All domains counted from x to y (used by the differential and the
    /// block audits).
    pub fn counted_domains(
        &self,
        x: &Generator,
        y: &Generator,
        forbidden: &[usize],
    ) -> Vec<Vec<i64>> {
        let diff = x.coords.iter().zip(y.coords.iter()).filter(|(a, b)| a != b).count();
        if diff == 0 || diff > 2 {
            return Vec::new();
        }
        let Some((p, lattice)) = self.connecting_domains(x, y) else {
            return Vec::new();
        };
        self.zero_one_translates(&p, &lattice)
            .into_iter()
            .filter(|d| self.counted(d, x, y, forbidden))
            .collect()
    }
}

/// Basepoint labels the differential may forbid.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Forbidden {
    ZOnly,
    ZAndW,
}

/// The combinatorial differential of a nice admissible diagram, together
/// with the generator list and every counted domain.
pub struct Differential {
    pub generators: Vec<Generator>,
    pub matrix: F2Matrix,
    /// (from index, to index, domain) for every counted disk.
    pub domains: Vec<(usize, usize, Vec<i64>)>,
}

/// Compute the hat differential. Requires niceness and weak admissibility.
pub fn differential(flat: &FlatDiagram, forbidden: Forbidden) -> Result<Differential, FloerError> {
    if !flat.is_nice() {
        return Err(FloerError::NotNice(format!("bad flat regions: {:?}", flat.bad_regions())));
    }
    if let Err(v) = flat.check_admissibility() {
        return Err(FloerError::NotAdmissible(format!("{v:?}")));
    }
    differential_unchecked(flat, forbidden)
}

/// The counting pass without the niceness/admissibility gate (used by
/// checks and tests that construct their own guarantees).
pub fn differential_unchecked(
    flat: &FlatDiagram,
    forbidden: Forbidden,
) -> Result<Differential, FloerError> {
    let mut forb = vec![flat.z];
    if let Forbidden::ZAndW = forbidden {
        if let Some(w) = flat.w {
            forb.push(w);
        }
    }
    let generators = flat.enumerate_generators();
    let n = generators.len();
    let mut matrix = F2Matrix::zero(n, n);
    let mut domains = Vec::new();
    for (xi, x) in generators.iter().enumerate() {
        for (yi, y) in generators.iter().enumerate() {
            if xi == yi {
                continue;
            }
            let counted = flat.counted_domains(x, y, &forb);
            if counted.len() % 2 == 1 {
                matrix.flip(yi, xi);
            }
            for d in counted {
                domains.push((xi, yi, d));
            }
        }
    }
    Ok(Differential { generators, matrix, domains })
}

/// Package a differential as a labeled F2 chain complex.
pub fn chain_complex(flat: &FlatDiagram, diff: &Differential) -> Result<ChainComplexF2, FloerError> {
    let labels = diff.generators.iter().map(|g| g.label(flat)).collect();
    ChainComplexF2::new(labels, diff.matrix.clone())
        .map_err(|e| FloerError::NotNice(format!("{e}")))
}

/// Total homology rank of a nice admissible diagram with the given
/// basepoint convention.
pub fn homology_rank(
    diagram: &HeegaardDiagram,
    forbidden: Forbidden,
) -> Result<usize, FloerError> {
    let flat = FlatDiagram::new(diagram)?;
    let diff = differential(&flat, forbidden)?;
    let complex = chain_complex(&flat, &diff)?;
    Ok(complex.homology_rank())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn torus_s3_engine() {
        let d = fixtures::torus_s3();
        let flat = FlatDiagram::new(&d).unwrap();
        let gens = flat.enumerate_generators();
        assert_eq!(gens.len(), 1);
        let (p, k) = flat.connecting_domains(&gens[0], &gens[0]).unwrap();
        assert!(p.iter().all(|&v| v == 0));
        assert_eq!(k.len(), 1); // the whole surface
        assert_eq!(flat.lattice_nz_zero().len(), 0);
        assert!(flat.check_admissibility().is_ok());
        assert!(flat.is_nice());
        let diff = differential(&flat, Forbidden::ZOnly).unwrap();
        assert!(diff.matrix.is_zero());
        assert_eq!(homology_rank(&d, Forbidden::ZOnly).unwrap(), 1);
    }

    #[test]
    fn lens_space_ranks() {
        for p in 2..=7 {
            let d = fixtures::lens_torus(p);
            let flat = FlatDiagram::new(&d).unwrap();
            assert_eq!(flat.enumerate_generators().len(), p as usize);
            assert!(flat.is_nice(), "p={p}");
            let diff = differential(&flat, Forbidden::ZOnly).unwrap();
            assert!(diff.matrix.is_zero(), "p={p}: unexpected differential");
            assert_eq!(homology_rank(&d, Forbidden::ZOnly).unwrap(), p as usize);
        }
    }

    #[test]
    fn finger_wiggle_keeps_rank() {
        let d = fixtures::lens_torus(2);
        let mut mesh = d.mesh.clone();
        let alpha = fixtures::curve_by_family(&mesh, crate::surface::Family::Alpha);
        let beta = fixtures::curve_by_family(&mesh, crate::surface::Family::Beta);
        let avoid = std::collections::BTreeSet::from([d.z_region]);
        let (ha, hb) = fixtures::finger_candidate_avoiding(&mesh, beta, alpha, &avoid).unwrap();
        mesh.finger_move(ha, hb).unwrap();
        let d2 = crate::diagram::HeegaardDiagram { mesh, ..d.clone() };
        assert!(d2.validate().ok(), "{:?}", d2.validate().violations);
        let flat = FlatDiagram::new(&d2).unwrap();
        let diff = differential(&flat, Forbidden::ZOnly).unwrap();
        let c = chain_complex(&flat, &diff).unwrap();
        assert_eq!(c.homology_rank(), 2);
    }

    #[test]
    fn bigons_from_wiggle_have_maslov_one() {
        // After a finger wiggle the cancelling bigon pair appears; every
        // counted domain is a single region with two corners and mu = 1,
        // and adding two disjoint counted domains doubles the index.
        let d = fixtures::lens_torus(2);
        let mut mesh = d.mesh.clone();
        let alpha = fixtures::curve_by_family(&mesh, crate::surface::Family::Alpha);
        let beta = fixtures::curve_by_family(&mesh, crate::surface::Family::Beta);
        let avoid = std::collections::BTreeSet::from([d.z_region]);
        let (ha, hb) = fixtures::finger_candidate_avoiding(&mesh, beta, alpha, &avoid).unwrap();
        mesh.finger_move(ha, hb).unwrap();
        let d2 = crate::diagram::HeegaardDiagram { mesh, ..d.clone() };
        let flat = FlatDiagram::new(&d2).unwrap();
        let gens = flat.enumerate_generators();
        let mut bigons = 0;
        for x in &gens {
            for y in &gens {
                if x == y {
                    continue;
                }
                for dom in flat.counted_domains(x, y, &[flat.z]) {
                    assert_eq!(flat.maslov_index4(&dom, x, y).unwrap(), 4);
                    bigons += 1;
                }
            }
        }
        assert!(bigons >= 2, "wiggle should create a cancelling bigon pair");
    }

    #[test]
    fn corner_mismatch_detected() {
        let d = fixtures::lens_torus(2);
        let flat = FlatDiagram::new(&d).unwrap();
        let gens = flat.enumerate_generators();
        let zero = vec![0i64; flat.regions.len()];
        assert!(flat.maslov_index4(&zero, &gens[0], &gens[0]).is_ok());
        assert!(flat.maslov_index4(&zero, &gens[0], &gens[1]).is_err());
    }
}
