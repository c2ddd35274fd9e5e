//! Chain complexes, chain maps, mapping cones and the snake lemma over F2.
//!
//! Everything is ungraded: a complex is a labeled generator set with one
//! square differential, and all homology data are total ranks.

use crate::error::HomologyError;
use crate::f2::F2Matrix;

/// A chain complex over F2: labeled generators and a square differential
/// with d*d = 0. Entry (r, c) of `d` means generator c hits generator r.
#[derive(Clone, Debug)]
pub struct ChainComplexF2 {
    pub labels: Vec<String>,
    pub d: F2Matrix,
}

impl ChainComplexF2 {
    pub fn new(labels: Vec<String>, d: F2Matrix) -> Result<Self, HomologyError> {
        if d.rows() != labels.len() || d.cols() != labels.len() {
            return Err(HomologyError::NotAComplex("differential is not square".into()));
        }
        if !d.mul(&d).is_zero() {
            return Err(HomologyError::NotAComplex("differential does not square to zero".into()));
        }
        Ok(ChainComplexF2 { labels, d })
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    /// dim ker(d) - rank(d).
    pub fn homology_rank(&self) -> usize {
        let r = self.d.rank();
        self.dim() - 2 * r
    }

    /// Rows form a basis of ker(d).
    pub fn cycle_basis(&self) -> F2Matrix {
        self.d.kernel_basis()
    }

    /// Rows span im(d).
    pub fn boundary_space(&self) -> F2Matrix {
        self.d.transpose()
    }
}

/// A chain map between two complexes: target.d * m = m * source.d.
#[derive(Clone, Debug)]
pub struct ChainMapF2 {
    pub source: ChainComplexF2,
    pub target: ChainComplexF2,
    /// target.dim() x source.dim().
    pub matrix: F2Matrix,
}

impl ChainMapF2 {
    pub fn new(
        source: ChainComplexF2,
        target: ChainComplexF2,
        matrix: F2Matrix,
    ) -> Result<Self, HomologyError> {
        if matrix.rows() != target.dim() || matrix.cols() != source.dim() {
            return Err(HomologyError::NotChainMap("matrix shape mismatch".into()));
        }
        let lhs = target.d.mul(&matrix);
        let rhs = matrix.mul(&source.d);
        if lhs.add(&rhs).is_zero() {
            Ok(ChainMapF2 { source, target, matrix })
        } else {
            Err(HomologyError::NotChainMap("chain map equation fails".into()))
        }
    }
}

/// The map a chain map induces between homology coordinate spaces, together
/// with its basis-independent kernel and image ranks.
#[derive(Clone, Debug)]
pub struct InducedMap {
    pub matrix: F2Matrix,
    pub kernel_rank: usize,
    pub image_rank: usize,
}

/// Choose a homology basis: rows are cycles whose classes form a basis.
fn homology_basis(c: &ChainComplexF2) -> F2Matrix {
    let cycles = c.cycle_basis();
    let boundaries = c.boundary_space();
    let b_rank = boundaries.rank();
    // Greedily keep cycle rows that grow the span beyond the boundaries.
    let mut picked = F2Matrix::zero(0, c.dim());
    let mut current = boundaries.clone();
    let mut current_rank = b_rank;
    for i in 0..cycles.rows() {
        let row = F2Matrix::from_entries(
            1,
            c.dim(),
            &(0..c.dim()).filter(|&j| cycles.get(i, j)).map(|j| (0, j)).collect::<Vec<_>>(),
        );
        let trial = current.vstack(&row);
        let r = trial.rank();
        if r > current_rank {
            picked = picked.vstack(&row);
            current = trial;
            current_rank = r;
        }
    }
    picked
}

/// Express the classes of the given cycle rows in the homology basis of `c`.
/// Returns a matrix with one column per input row.
fn classes_in_basis(c: &ChainComplexF2, basis: &F2Matrix, cycles: &F2Matrix) -> F2Matrix {
    // Solve [basis^T | boundaries^T] * (x, y)^T = cycle for each cycle; the
    // x part is the homology coordinate vector.
    let boundaries = c.boundary_space();
    let stacked = basis.vstack(&boundaries).transpose();
    let h = basis.rows();
    let mut out = F2Matrix::zero(h, cycles.rows());
    for i in 0..cycles.rows() {
        let b: Vec<bool> = (0..c.dim()).map(|j| cycles.get(i, j)).collect();
        let x = stacked.solve(&b).expect("cycle not in span of basis + boundaries");
        for (k, o) in x.iter().take(h).enumerate() {
            if *o {
                out.set(k, i, true);
            }
        }
    }
    out
}

/// Compute the induced map on homology with kernel and image ranks.
pub fn induced_map(f: &ChainMapF2) -> InducedMap {
    let src_basis = homology_basis(&f.source);
    let tgt_basis = homology_basis(&f.target);
    // Push each source basis cycle through f.
    let mut images = F2Matrix::zero(src_basis.rows(), f.target.dim());
    for i in 0..src_basis.rows() {
        let v: Vec<bool> = (0..f.source.dim()).map(|j| src_basis.get(i, j)).collect();
        let w = f.matrix.apply(&v);
        for (j, &b) in w.iter().enumerate() {
            if b {
                images.set(i, j, true);
            }
        }
    }
    let matrix = classes_in_basis(&f.target, &tgt_basis, &images);
    let image_rank = matrix.rank();
    let kernel_rank = src_basis.rows() - image_rank;
    InducedMap { matrix, kernel_rank, image_rank }
}

/// The mapping cone of f: generators target ⊕ source, with the block
/// upper-triangular differential [[d_target, f], [0, d_source]].
pub fn mapping_cone(f: &ChainMapF2) -> ChainComplexF2 {
    let nt = f.target.dim();
    let ns = f.source.dim();
    let mut d = F2Matrix::zero(nt + ns, nt + ns);
    for (r, c) in f.target.d.entries() {
        d.set(r, c, true);
    }
    for (r, c) in f.matrix.entries() {
        d.set(r, nt + c, true);
    }
    for (r, c) in f.source.d.entries() {
        d.set(nt + r, nt + c, true);
    }
    let mut labels: Vec<String> = f.target.labels.iter().map(|l| format!("t:{l}")).collect();
    labels.extend(f.source.labels.iter().map(|l| format!("s:{l}")));
    ChainComplexF2::new(labels, d).expect("cone differential squares to zero by the chain map equation")
}

/// The canonical inclusion of the target complex into the cone of f.
pub fn cone_inclusion(f: &ChainMapF2) -> ChainMapF2 {
    let cone = mapping_cone(f);
    let nt = f.target.dim();
    let mut m = F2Matrix::zero(cone.dim(), nt);
    for i in 0..nt {
        m.set(i, i, true);
    }
    ChainMapF2::new(f.target.clone(), cone, m).expect("inclusion is a chain map")
}

/// The canonical projection of the cone of f onto the source complex.
pub fn cone_projection(f: &ChainMapF2) -> ChainMapF2 {
    let cone = mapping_cone(f);
    let nt = f.target.dim();
    let ns = f.source.dim();
    let mut m = F2Matrix::zero(ns, cone.dim());
    for i in 0..ns {
        m.set(i, nt + i, true);
    }
    ChainMapF2::new(cone, f.source.clone(), m).expect("projection is a chain map")
}

/// Connecting morphism of a short exact sequence of complexes, by the snake
/// lemma: lift a cycle through the projection, apply the middle differential,
/// pull back through the inclusion.
pub fn connecting_morphism(
    inclusion: &ChainMapF2,
    projection: &ChainMapF2,
) -> Result<InducedMap, HomologyError> {
    let a = &inclusion.source;
    let b = &inclusion.target;
    let c = &projection.target;
    if projection.source.dim() != b.dim() {
        return Err(HomologyError::NotExact("middle complexes disagree".into()));
    }
    if inclusion.matrix.rank() != a.dim() {
        return Err(HomologyError::NotExact("inclusion is not injective".into()));
    }
    if projection.matrix.rank() != c.dim() {
        return Err(HomologyError::NotExact("projection is not surjective".into()));
    }
    if !projection.matrix.mul(&inclusion.matrix).is_zero() {
        return Err(HomologyError::NotExact("composite is nonzero".into()));
    }
    // Exactness at the middle: rank(incl) = dim ker(proj) = dim B - rank(proj).
    if a.dim() != b.dim() - c.dim() {
        return Err(HomologyError::NotExact("rank condition fails at the middle".into()));
    }

    let c_basis = homology_basis(c);
    let a_basis = homology_basis(a);
    let mut images = F2Matrix::zero(c_basis.rows(), a.dim());
    for i in 0..c_basis.rows() {
        let cycle: Vec<bool> = (0..c.dim()).map(|j| c_basis.get(i, j)).collect();
        let lift = projection
            .matrix
            .solve(&cycle)
            .ok_or_else(|| HomologyError::NotExact("projection not surjective on a cycle".into()))?;
        let db = b.d.apply(&lift);
        let pre = inclusion
            .matrix
            .solve(&db)
            .ok_or_else(|| HomologyError::NotExact("snake: d(lift) not in the subcomplex".into()))?;
        // pre is a cycle in A.
        debug_assert!(a.d.apply(&pre).iter().all(|&x| !x));
        for (j, &v) in pre.iter().enumerate() {
            if v {
                images.set(i, j, true);
            }
        }
    }
    let matrix = classes_in_basis(a, &a_basis, &images);
    let image_rank = matrix.rank();
    let kernel_rank = c_basis.rows() - image_rank;
    Ok(InducedMap { matrix, kernel_rank, image_rank })
}

/// Exactness data at one node of a triangle: incoming image vs outgoing kernel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct NodeVerdict {
    pub incoming_image_rank: usize,
    pub outgoing_kernel_rank: usize,
    pub exact: bool,
}

/// Check exactness of a triangle of maps from rank data alone. `maps[i]`
/// goes from node i to node (i+1) % 3 with given (kernel, image) ranks.
pub fn exactness_check(homology_ranks: [usize; 3], maps: [(usize, usize); 3]) -> [NodeVerdict; 3] {
    let mut out = [NodeVerdict { incoming_image_rank: 0, outgoing_kernel_rank: 0, exact: false }; 3];
    for node in 0..3 {
        let incoming = maps[(node + 2) % 3].1;
        let outgoing = maps[node].0;
        let _ = homology_ranks;
        out[node] = NodeVerdict {
            incoming_image_rank: incoming,
            outgoing_kernel_rank: outgoing,
            exact: incoming == outgoing,
        };
    }
    out
}

/// Deterministic pseudo-random chain complexes and chain maps, for tests
/// and the randomized acceptance runs.
pub mod random {
    use super::*;
    use rand::Rng;

    /// A random complex with `n` generators: a random nilpotent differential
    /// built from a random two-level pairing conjugated by a random
    /// invertible matrix.
    pub fn random_complex<R: Rng>(rng: &mut R, n: usize) -> ChainComplexF2 {
        // Canonical d: pair up some generators (d x_{2i+1} = x_{2i}).
        let pairs = if n < 2 { 0 } else { rng.gen_range(0..=n / 2) };
        let mut d = F2Matrix::zero(n, n);
        for i in 0..pairs {
            d.set(2 * i, 2 * i + 1, true);
        }
        // Random invertible p: identity + strictly upper triangular noise,
        // composed with a permutation.
        let mut p = F2Matrix::identity(n);
        for r in 0..n {
            for c in (r + 1)..n {
                if rng.gen_bool(0.3) {
                    p.set(r, c, true);
                }
            }
        }
        let mut perm: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            let j = rng.gen_range(0..=i);
            perm.swap(i, j);
        }
        let mut pm = F2Matrix::zero(n, n);
        for (i, &pi) in perm.iter().enumerate() {
            pm.set(pi, i, true);
        }
        let p = pm.mul(&p);
        let p_inv = invert(&p);
        let d = p.mul(&d).mul(&p_inv);
        let labels = (0..n).map(|i| format!("g{i}")).collect();
        ChainComplexF2::new(labels, d).expect("conjugate of nilpotent pairing squares to zero")
    }

    /// A random chain map between two complexes: a random element of the
    /// solution space of the chain map equation.
    pub fn random_chain_map<R: Rng>(
        rng: &mut R,
        source: &ChainComplexF2,
        target: &ChainComplexF2,
    ) -> ChainMapF2 {
        let ns = source.dim();
        let nt = target.dim();
        // Unknowns: entries m[r][c]; equation target.d * m + m * source.d = 0.
        // Row (i, j) of the system is the (i, j) entry of the equation.
        let unknowns = nt * ns;
        let mut sys = F2Matrix::zero(nt * ns, unknowns);
        for i in 0..nt {
            for j in 0..ns {
                let eq = i * ns + j;
                for k in 0..nt {
                    if target.d.get(i, k) {
                        sys.flip(eq, k * ns + j);
                    }
                }
                for k in 0..ns {
                    if source.d.get(k, j) {
                        sys.flip(eq, i * ns + k);
                    }
                }
            }
        }
        let kernel = sys.kernel_basis();
        let mut coeffs = vec![false; kernel.rows()];
        for c in coeffs.iter_mut() {
            *c = rng.gen_bool(0.5);
        }
        let mut m = F2Matrix::zero(nt, ns);
        for (i, &on) in coeffs.iter().enumerate() {
            if on {
                for u in 0..unknowns {
                    if kernel.get(i, u) {
                        m.flip(u / ns, u % ns);
                    }
                }
            }
        }
        ChainMapF2::new(source.clone(), target.clone(), m)
            .expect("kernel elements satisfy the chain map equation")
    }

    fn invert(m: &F2Matrix) -> F2Matrix {
        let n = m.rows();
        let mut aug = F2Matrix::zero(n, 2 * n);
        for (r, c) in m.entries() {
            aug.set(r, c, true);
        }
        for i in 0..n {
            aug.set(i, n + i, true);
        }
        let (rank, _) = aug.row_reduce();
        assert_eq!(rank, n, "matrix not invertible");
        let mut inv = F2Matrix::zero(n, n);
        for r in 0..n {
            for c in 0..n {
                if aug.get(r, n + c) {
                    inv.set(r, c, true);
                }
            }
        }
        inv
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn zero_complex(n: usize) -> ChainComplexF2 {
        ChainComplexF2::new((0..n).map(|i| format!("x{i}")).collect(), F2Matrix::zero(n, n)).unwrap()
    }

    #[test]
    fn homology_of_zero_differential() {
        assert_eq!(zero_complex(5).homology_rank(), 5);
    }

    #[test]
    fn homology_of_acyclic_pair() {
        // d(x) = y.
        let d = F2Matrix::from_entries(2, 2, &[(1, 0)]);
        let c = ChainComplexF2::new(vec!["x".into(), "y".into()], d).unwrap();
        assert_eq!(c.homology_rank(), 0);
    }

    #[test]
    fn d_squared_rejected() {
        let d = F2Matrix::from_entries(2, 2, &[(1, 0), (0, 1)]);
        assert!(ChainComplexF2::new(vec!["x".into(), "y".into()], d).is_err());
    }

    #[test]
    fn induced_identity_and_zero() {
        let c = zero_complex(3);
        let id = ChainMapF2::new(c.clone(), c.clone(), F2Matrix::identity(3)).unwrap();
        let ind = induced_map(&id);
        assert_eq!((ind.kernel_rank, ind.image_rank), (0, 3));
        let z = ChainMapF2::new(c.clone(), c.clone(), F2Matrix::zero(3, 3)).unwrap();
        let ind = induced_map(&z);
        assert_eq!((ind.kernel_rank, ind.image_rank), (3, 0));
    }

    #[test]
    fn cone_of_zero_and_identity() {
        let a = zero_complex(2);
        let b = zero_complex(3);
        let f = ChainMapF2::new(a.clone(), b.clone(), F2Matrix::zero(3, 2)).unwrap();
        assert_eq!(mapping_cone(&f).homology_rank(), 5);
        let id = ChainMapF2::new(a.clone(), a.clone(), F2Matrix::identity(2)).unwrap();
        assert_eq!(mapping_cone(&id).homology_rank(), 0);
    }

    #[test]
    fn snake_on_split_cone_is_zero() {
        let a = zero_complex(2);
        let b = zero_complex(3);
        let f = ChainMapF2::new(a.clone(), b.clone(), F2Matrix::zero(3, 2)).unwrap();
        let inc = cone_inclusion(&f);
        let proj = cone_projection(&f);
        let snake = connecting_morphism(&inc, &proj).unwrap();
        assert_eq!(snake.image_rank, 0);
        assert_eq!(snake.kernel_rank, 2);
    }

    #[test]
    fn snake_hand_example_rank_one() {
        // A = <a>, C = <c>, middle = <m0, m1> with d(m1) = m0, i(a) = m0,
        // p(m1) = c. The connecting map sends [c] to [a]: rank 1.
        let a = zero_complex(1);
        let c = zero_complex(1);
        let dm = F2Matrix::from_entries(2, 2, &[(0, 1)]);
        let m = ChainComplexF2::new(vec!["m0".into(), "m1".into()], dm).unwrap();
        let inc = ChainMapF2::new(a, m.clone(), F2Matrix::from_entries(2, 1, &[(0, 0)])).unwrap();
        let proj = ChainMapF2::new(m, c, F2Matrix::from_entries(1, 2, &[(0, 1)])).unwrap();
        let snake = connecting_morphism(&inc, &proj).unwrap();
        assert_eq!(snake.image_rank, 1);
        assert_eq!(snake.kernel_rank, 0);
    }

    #[test]
    fn snake_of_cone_matches_induced_map_ranks() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..30 {
            let src = random::random_complex(&mut rng, 6);
            let tgt = random::random_complex(&mut rng, 5);
            let f = random::random_chain_map(&mut rng, &src, &tgt);
            let ind = induced_map(&f);
            let snake = connecting_morphism(&cone_inclusion(&f), &cone_projection(&f)).unwrap();
            assert_eq!(ind.kernel_rank, snake.kernel_rank);
            assert_eq!(ind.image_rank, snake.image_rank);
        }
    }

    #[test]
    fn rank_nullity_for_induced_maps() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let src = random::random_complex(&mut rng, 7);
            let tgt = random::random_complex(&mut rng, 7);
            let f = random::random_chain_map(&mut rng, &src, &tgt);
            let ind = induced_map(&f);
            assert_eq!(ind.kernel_rank + ind.image_rank, src.homology_rank());
        }
    }

    #[test]
    fn cone_rank_bounds_and_parity() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..20 {
            let src = random::random_complex(&mut rng, 6);
            let tgt = random::random_complex(&mut rng, 6);
            let f = random::random_chain_map(&mut rng, &src, &tgt);
            let ha = src.homology_rank();
            let hb = tgt.homology_rank();
            let hc = mapping_cone(&f).homology_rank();
            assert!(hc <= ha + hb);
            assert!(hc >= ha.abs_diff(hb));
            assert_eq!((ha + hb) % 2, hc % 2);
        }
    }

    #[test]
    fn exactness_verdicts() {
        let v = exactness_check([0, 0, 0], [(0, 0), (0, 0), (0, 0)]);
        assert!(v.iter().all(|n| n.exact));
        // ranks (1, 1, 0), iso from node 0 to node 1, zero maps elsewhere.
        let v = exactness_check([1, 1, 0], [(0, 1), (1, 0), (0, 0)]);
        assert!(v.iter().all(|n| n.exact));
    }
}
