//! Grid diagrams and the tilde-flavor grid complex.
//!
//! This is the independent oracle for knot Floer total ranks of knots in the
//! three-sphere. It shares no code with the Heegaard-diagram counting path:
//! generators are permutations and the differential counts empty rectangles
//! on the torus directly.

use serde::{Deserialize, Serialize};

use crate::error::GridError;
use crate::f2::F2Matrix;

/// An n-by-n grid: X and O markings given as bijections column -> row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridDiagram {
    n: usize,
    x: Vec<usize>,
    o: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
pub struct GridRepr {
    pub n: usize,
    #[serde(rename = "X")]
    pub x: Vec<usize>,
    #[serde(rename = "O")]
    pub o: Vec<usize>,
}

impl GridDiagram {
    pub fn new(n: usize, x: Vec<usize>, o: Vec<usize>) -> Result<Self, GridError> {
        if n == 0 {
            return Err(GridError::InvalidGrid("empty grid".into()));
        }
        for (name, p) in [("X", &x), ("O", &o)] {
            if p.len() != n {
                return Err(GridError::InvalidGrid(format!("{name} has length {} != n", p.len())));
            }
            let mut seen = vec![false; n];
            for &r in p.iter() {
                if r >= n || seen[r] {
                    return Err(GridError::InvalidGrid(format!("{name} is not a permutation")));
                }
                seen[r] = true;
            }
        }
        for col in 0..n {
            if x[col] == o[col] {
                return Err(GridError::InvalidGrid(format!("X and O share cell in column {col}")));
            }
        }
        Ok(GridDiagram { n, x, o })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    /// Cyclic shift of all columns by one (torus translation).
    pub fn shift_columns(&self) -> GridDiagram {
        let n = self.n;
        let x = (0..n).map(|c| self.x[(c + 1) % n]).collect();
        let o = (0..n).map(|c| self.o[(c + 1) % n]).collect();
        GridDiagram { n, x, o }
    }

    pub fn to_repr(&self) -> GridRepr {
        GridRepr { n: self.n, x: self.x.clone(), o: self.o.clone() }
    }
}

/// Parse the grid text format: either the JSON form or the compact
/// `n:2 X:[1,0] O:[0,1]` form.
pub fn grid_parse(text: &str) -> Result<GridDiagram, GridError> {
    let trimmed = text.trim();
    if trimmed.starts_with('{') {
        let repr: GridRepr =
            serde_json::from_str(trimmed).map_err(|e| GridError::Parse(e.to_string()))?;
        return GridDiagram::new(repr.n, repr.x, repr.o);
    }
    let mut n = None;
    let mut x = None;
    let mut o = None;
    for tok in trimmed.split_whitespace() {
        let (key, val) = tok
            .split_once(':')
            .ok_or_else(|| GridError::Parse(format!("expected key:value, got `{tok}`")))?;
        match key {
            "n" => {
                n = Some(val.parse::<usize>().map_err(|e| GridError::Parse(e.to_string()))?);
            }
            "X" | "O" => {
                let inner = val
                    .strip_prefix('[')
                    .and_then(|v| v.strip_suffix(']'))
                    .ok_or_else(|| GridError::Parse(format!("{key} wants a [..] list")))?;
                let parsed: Result<Vec<usize>, _> = if inner.is_empty() {
                    Ok(Vec::new())
                } else {
                    inner.split(',').map(|s| s.trim().parse::<usize>()).collect()
                };
                let parsed = parsed.map_err(|e| GridError::Parse(e.to_string()))?;
                if key == "X" {
                    x = Some(parsed);
                } else {
                    o = Some(parsed);
                }
            }
            other => return Err(GridError::Parse(format!("unknown key `{other}`"))),
        }
    }
    match (n, x, o) {
        (Some(n), Some(x), Some(o)) => GridDiagram::new(n, x, o),
        _ => Err(GridError::Parse("need n, X and O".into())),
    }
}

/// Generators are permutations sigma: column -> row; lexicographic order.
fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(n);
    let mut used = vec![false; n];
    fn rec(n: usize, cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for r in 0..n {
            if !used[r] {
                used[r] = true;
                cur.push(r);
                rec(n, cur, used, out);
                cur.pop();
                used[r] = false;
            }
        }
    }
    rec(n, &mut cur, &mut used, &mut out);
    out
}

/// Is p in the half-open cyclic interval [a, b)? Requires a != b.
fn in_cyclic(a: usize, b: usize, p: usize, _n: usize) -> bool {
    debug_assert_ne!(a, b);
    if a < b {
        a <= p && p < b
    } else {
        p >= a || p < b
    }
}

/// Count (mod 2 bookkeeping done by the caller) the empty rectangles from
/// generator x to generator y. x and y must differ in exactly two columns.
fn empty_rectangles(g: &GridDiagram, x: &[usize], cols: (usize, usize)) -> usize {
    let n = g.n;
    let (c1, c2) = cols;
    // The two rectangles on the torus with corners at the four points
    // (c1, x[c1]), (c2, x[c2]) = (c1, y[c1])... rectangle from x to y has
    // lower-left and upper-right corners at points of x, the other two at y.
    // The column span is [c1, c2) or [c2, c1); the row span likewise from
    // x-row to y-row on the chosen side.
    let mut count = 0;
    for (ca, cb) in [(c1, c2), (c2, c1)] {
        // Rectangle with SW corner at (ca, x[ca]) and NE corner at (cb, y[cb]):
        // for it to connect x to y we need y[ca] = x[cb] pattern on the torus;
        // with only two moved columns this holds automatically. Rows span
        // [x[ca], y[ca]) cyclically.
        let (ra, rb) = (x[ca], x[cb]);
        // rows spanned: [ra, rb) cyclically
        if ra == rb {
            continue;
        }
        let col_range = |p: usize| in_cyclic(ca, cb, p, n);
        let row_range = |p: usize| in_cyclic(ra, rb, p, n);
        // Interior emptiness: no X, no O, no point of x (equivalently y) in
        // the open interior. Points of x occupy (c, x[c]); interior columns
        // are those strictly inside, i.e. in the cyclic range but not ca;
        // similarly rows.
        let mut ok = true;
        for c in 0..n {
            if col_range(c) && row_range(g.x[c]) {
                ok = false;
                break;
            }
            if col_range(c) && row_range(g.o[c]) {
                ok = false;
                break;
            }
        }
        if ok {
            for c in 0..n {
                if c == ca || c == cb {
                    continue;
                }
                if col_range(c) && row_range(x[c]) {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            count += 1;
        }
    }
    count
}

/// The tilde-flavor differential matrix over the permutation generators.
fn tilde_differential(g: &GridDiagram) -> (Vec<Vec<usize>>, F2Matrix) {
    let n = g.n;
    let gens = permutations(n);
    let index: std::collections::BTreeMap<&[usize], usize> =
        gens.iter().enumerate().map(|(i, p)| (p.as_slice(), i)).collect();
    let mut d = F2Matrix::zero(gens.len(), gens.len());
    for (xi, x) in gens.iter().enumerate() {
        for c1 in 0..n {
            for c2 in (c1 + 1)..n {
                let mut y = x.clone();
                y.swap(c1, c2);
                let yi = index[y.as_slice()];
                let cnt = empty_rectangles(g, x, (c1, c2));
                if cnt % 2 == 1 {
                    d.flip(yi, xi);
                }
            }
        }
    }
    (gens, d)
}

/// Total rank of the tilde grid homology. Panics if d*d != 0 (it never is
/// for a valid grid; the check guards the rectangle enumeration).
pub fn grid_tilde_rank(g: &GridDiagram) -> usize {
    let (gens, d) = tilde_differential(g);
    assert!(d.mul(&d).is_zero(), "grid differential must square to zero");
    let r = d.rank();
    gens.len() - 2 * r
}

/// d*d = 0 check exposed separately so large grids can assert it without
/// paying for a rank computation.
pub fn grid_d_squared_is_zero(g: &GridDiagram) -> bool {
    let (_, d) = tilde_differential(g);
    d.mul(&d).is_zero()
}

/// The 2x2 unknot grid from the standard presentation.
pub fn unknot_2x2() -> GridDiagram {
    GridDiagram::new(2, vec![1, 0], vec![0, 1]).unwrap()
}

/// A 5x5 grid of the trefoil: O on the diagonal, X shifted by two. The
/// cyclic shift-by-k grid on n columns closes up to the (k, n-k) torus knot.
pub fn trefoil_5x5() -> GridDiagram {
    let o: Vec<usize> = (0..5).collect();
    let x: Vec<usize> = (0..5).map(|c| (c + 2) % 5).collect();
    GridDiagram::new(5, x, o).unwrap()
}

/// A 6x6 grid of the figure-eight knot (arc index six). The rank check in
/// the tests pins the knot type: among knots of arc index at most six only
/// the figure-eight has hat-total rank five, and torus knots with that rank
/// need arc index seven.
pub fn figure_eight_6x6() -> GridDiagram {
    GridDiagram::new(6, vec![2, 1, 3, 4, 0, 5], vec![0, 4, 5, 2, 3, 1]).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknot_rank_two() {
        assert_eq!(grid_tilde_rank(&unknot_2x2()), 2);
    }

    #[test]
    fn invalid_grids_rejected() {
        assert!(GridDiagram::new(2, vec![0, 1], vec![0, 1]).is_err());
        assert!(GridDiagram::new(2, vec![0, 0], vec![1, 0]).is_err());
        assert!(GridDiagram::new(3, vec![0, 1], vec![1, 2, 0]).is_err());
    }

    #[test]
    fn parse_compact_form() {
        let g = grid_parse("n:2 X:[1,0] O:[0,1]").unwrap();
        assert_eq!(g, unknot_2x2());
        assert!(grid_parse("n:2 X:[0,1] O:[0,1]").is_err());
        assert!(grid_parse("n:2 X:[1,zebra] O:[0,1]").is_err());
    }

    #[test]
    fn parse_json_form() {
        let g = grid_parse(r#"{"n":2,"X":[1,0],"O":[0,1]}"#).unwrap();
        assert_eq!(g, unknot_2x2());
    }

    #[test]
    fn trefoil_rank_48() {
        assert_eq!(grid_tilde_rank(&trefoil_5x5()), 48);
    }

    #[test]
    fn figure_eight_rank_160() {
        assert_eq!(grid_tilde_rank(&figure_eight_6x6()), 160);
    }

    #[test]
    fn rank_divisible_by_stabilization_factor() {
        for (g, n) in [(unknot_2x2(), 2), (trefoil_5x5(), 5), (figure_eight_6x6(), 6)] {
            let r = grid_tilde_rank(&g);
            assert_eq!(r % (1 << (n - 1)), 0, "rank {r} not divisible by 2^{}", n - 1);
        }
    }

    #[test]
    fn cyclic_column_shift_invariance() {
        for g in [unknot_2x2(), trefoil_5x5(), figure_eight_6x6()] {
            let r = grid_tilde_rank(&g);
            let mut s = g.clone();
            for _ in 0..g.size() {
                s = s.shift_columns();
                assert_eq!(grid_tilde_rank(&s), r);
            }
        }
    }

    /// One-off search used to pin `figure_eight_6x6`; kept for reproducibility.
    /// A 6-grid of a knot with tilde rank 160 = 5 * 2^5 must be the
    /// figure-eight: the only knots of arc index <= 6 are the unknot (rank
    /// 32 here), the trefoils (96) and the figure-eight (160).
    #[test]
    #[ignore]
    fn search_figure_eight_grid() {
        fn is_knot(x: &[usize], o: &[usize]) -> bool {
            // Components = cycles of column -> column map through X then O.
            let n = x.len();
            let mut row_to_col_o = vec![0; n];
            for (c, &r) in o.iter().enumerate() {
                row_to_col_o[r] = c;
            }
            let mut seen = 1usize;
            let mut c = row_to_col_o[x[0]];
            while c != 0 {
                seen += 1;
                c = row_to_col_o[x[c]];
            }
            seen == n
        }
        let perms = permutations(6);
        for x in &perms {
            for o in &perms {
                if o[0] != 0 {
                    continue; // row translation normalization
                }
                if x.iter().zip(o.iter()).any(|(a, b)| a == b) {
                    continue;
                }
                if !is_knot(x, o) {
                    continue;
                }
                let g = GridDiagram::new(6, x.clone(), o.clone()).unwrap();
                if grid_tilde_rank(&g) == 160 {
                    panic!("found figure-eight grid: X={x:?} O={o:?}");
                }
            }
        }
        panic!("no figure-eight grid found");
    }

    #[test]
    fn d_squared_zero_on_random_valid_grids() {
        // Deterministic sweep over derangement-offset grids up to n = 7.
        for n in 2..=7usize {
            let o: Vec<usize> = (0..n).collect();
            for k in 1..n {
                let x: Vec<usize> = (0..n).map(|c| (c + k) % n).collect();
                let g = GridDiagram::new(n, x, o.clone()).unwrap();
                if n <= 6 {
                    assert!(grid_d_squared_is_zero(&g), "d^2 != 0 for shift {k} on {n}");
                }
            }
        }
        // One n = 7 instance to honor the corpus bound.
        let o: Vec<usize> = (0..7).collect();
        let x: Vec<usize> = (0..7).map(|c| (c + 2) % 7).collect();
        assert!(grid_d_squared_is_zero(&GridDiagram::new(7, x, o).unwrap()));
    }
}
