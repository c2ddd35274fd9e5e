//! Exact integer linear algebra: solving A x = b over the integers and
//! computing integer kernel bases, via a column-style Hermite reduction.
//! Also a small exact-rational Fourier-Motzkin feasibility check used by
//! the admissibility test.

/// Solve A x = b over the integers. Returns (particular solution, kernel
/// basis rows) or None when no integer solution exists (including rational
/// inconsistency).
pub fn solve_integer(a: &[Vec<i64>], b: &[i64]) -> Option<(Vec<i64>, Vec<Vec<i64>>)> {
    let m = a.len();
    let n = if m == 0 { 0 } else { a[0].len() };
    assert_eq!(b.len(), m);
    // h = a (m x n), u = identity (n x n); column operations keep a*u = h.
    let mut h: Vec<Vec<i128>> =
        a.iter().map(|row| row.iter().map(|&x| x as i128).collect()).collect();
    let mut u: Vec<Vec<i128>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1 } else { 0 }).collect())
        .collect();

    let col_addmul = |h: &mut Vec<Vec<i128>>, u: &mut Vec<Vec<i128>>, dst: usize, src: usize, q: i128| {
        for row in h.iter_mut() {
            row[dst] -= q * row[src];
        }
        for row in u.iter_mut() {
            row[dst] -= q * row[src];
        }
    };
    let col_swap = |h: &mut Vec<Vec<i128>>, u: &mut Vec<Vec<i128>>, i: usize, j: usize| {
        for row in h.iter_mut() {
            row.swap(i, j);
        }
        for row in u.iter_mut() {
            row.swap(i, j);
        }
    };
    let col_neg = |h: &mut Vec<Vec<i128>>, u: &mut Vec<Vec<i128>>, i: usize| {
        for row in h.iter_mut() {
            row[i] = -row[i];
        }
        for row in u.iter_mut() {
            row[i] = -row[i];
        }
    };

    let mut col = 0;
    let mut pivots: Vec<(usize, usize)> = Vec::new(); // (row, col)
    for row in 0..m {
        if col == n {
            // remaining rows must be consistent; checked below
        }
        // Reduce columns >= col against each other in this row.
        loop {
            let mut nonzero: Vec<usize> = (col..n).filter(|&j| h[row][j] != 0).collect();
            if nonzero.len() <= 1 {
                break;
            }
            nonzero.sort_by_key(|&j| h[row][j].abs());
            let jsmall = nonzero[0];
            for &j in nonzero.iter().skip(1) {
                let q = h[row][j] / h[row][jsmall];
                if q != 0 {
                    col_addmul(&mut h, &mut u, j, jsmall, q);
                }
            }
        }
        if let Some(j) = (col..n).find(|&j| h[row][j] != 0) {
            col_swap(&mut h, &mut u, col, j);
            if h[row][col] < 0 {
                col_neg(&mut h, &mut u, col);
            }
            pivots.push((row, col));
            col += 1;
        }
    }

    // Forward-substitute H y = b over the pivot structure.
    let mut y: Vec<i128> = vec![0; n];
    let mut used_rows = vec![false; m];
    for &(row, c) in &pivots {
        let acc: i128 = (0..c).map(|j| h[row][j] * y[j]).sum();
        let rhs = b[row] as i128 - acc;
        if rhs % h[row][c] != 0 {
            return None;
        }
        y[c] = rhs / h[row][c];
        used_rows[row] = true;
    }
    // Consistency of non-pivot rows.
    for row in 0..m {
        if used_rows[row] {
            continue;
        }
        let acc: i128 = (0..n).map(|j| h[row][j] * y[j]).sum();
        if acc != b[row] as i128 {
            return None;
        }
    }
    // x = U y; kernel basis = columns of U beyond the pivot columns.
    let rank = pivots.len();
    let mut x = vec![0i64; n];
    for i in 0..n {
        let v: i128 = (0..n).map(|j| u[i][j] * y[j]).sum();
        x[i] = i64::try_from(v).expect("solution fits i64");
    }
    let mut kernel = Vec::new();
    for j in rank..n {
        let col: Vec<i64> = (0..n)
            .map(|i| i64::try_from(u[i][j]).expect("kernel entry fits i64"))
            .collect();
        kernel.push(col);
    }
    Some((x, kernel))
}

/// Integer kernel basis of A (rows spanning {x : A x = 0}).
pub fn kernel_basis(a: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let m = a.len();
    solve_integer(a, &vec![0; m]).expect("homogeneous systems are solvable").1
}

/// Put integer basis rows into a row-echelon form over the rationals while
/// staying in the integer lattice they span (row Hermite form). Returns
/// (rows, pivot columns).
pub fn row_echelon_lattice(rows: &[Vec<i64>]) -> (Vec<Vec<i64>>, Vec<usize>) {
    if rows.is_empty() {
        return (Vec::new(), Vec::new());
    }
    let n = rows[0].len();
    let mut w: Vec<Vec<i128>> =
        rows.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut pivots = Vec::new();
    let mut top = 0;
    for c in 0..n {
        loop {
            let mut nz: Vec<usize> = (top..w.len()).filter(|&i| w[i][c] != 0).collect();
            if nz.len() <= 1 {
                break;
            }
            nz.sort_by_key(|&i| w[i][c].abs());
            let small = nz[0];
            for &i in nz.iter().skip(1) {
                let q = w[i][c] / w[small][c];
                if q != 0 {
                    let row_s = w[small].clone();
                    for (dst, s) in w[i].iter_mut().zip(row_s.iter()) {
                        *dst -= q * s;
                    }
                }
            }
        }
        if let Some(i) = (top..w.len()).find(|&i| w[i][c] != 0) {
            w.swap(top, i);
            if w[top][c] < 0 {
                for v in w[top].iter_mut() {
                    *v = -*v;
                }
            }
            pivots.push(c);
            top += 1;
        }
    }
    w.truncate(top);
    let out = w
        .into_iter()
        .map(|r| r.into_iter().map(|x| i64::try_from(x).expect("fits i64")).collect())
        .collect();
    (out, pivots)
}

/// Exact rational number with i128 parts; enough for the small
/// Fourier-Motzkin instances here.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Rat {
    pub num: i128,
    pub den: i128, // > 0
}

impl Rat {
    pub fn new(num: i128, den: i128) -> Rat {
        assert!(den != 0);
        let (mut num, mut den) = if den < 0 { (-num, -den) } else { (num, den) };
        let g = gcd(num.unsigned_abs(), den.unsigned_abs()) as i128;
        if g > 1 {
            num /= g;
            den /= g;
        }
        Rat { num, den }
    }
    pub fn from_int(v: i128) -> Rat {
        Rat { num: v, den: 1 }
    }
    pub fn zero() -> Rat {
        Rat { num: 0, den: 1 }
    }
    pub fn is_zero(&self) -> bool {
        self.num == 0
    }
    pub fn add(self, o: Rat) -> Rat {
        Rat::new(self.num * o.den + o.num * self.den, self.den * o.den)
    }
    pub fn sub(self, o: Rat) -> Rat {
        Rat::new(self.num * o.den - o.num * self.den, self.den * o.den)
    }
    pub fn mul(self, o: Rat) -> Rat {
        Rat::new(self.num * o.num, self.den * o.den)
    }
    pub fn div(self, o: Rat) -> Rat {
        assert!(o.num != 0);
        Rat::new(self.num * o.den, self.den * o.num)
    }
    pub fn cmp0(&self) -> std::cmp::Ordering {
        self.num.cmp(&0)
    }
    pub fn le(&self, o: &Rat) -> bool {
        self.num * o.den <= o.num * self.den
    }
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    if a == 0 {
        1
    } else {
        a
    }
}

/// Feasibility of {t : sum_j t_j rows[j] >= 0 componentwise, and the total
/// sum of components equals 1}. Returns a witness t when feasible. This is
/// exactly "the span contains a nonzero componentwise-nonnegative vector".
pub fn nonnegative_combination(rows: &[Vec<i64>]) -> Option<Vec<Rat>> {
    let k = rows.len();
    if k == 0 {
        return None;
    }
    let m = rows[0].len();
    // Constraints: for each component i: sum_j t_j rows[j][i] >= 0.
    // Normalization: sum_i sum_j t_j rows[j][i] = 1, encoded as two
    // inequalities >= 1 and <= 1.
    // Each constraint: coefficients c[0..k], bound b, sense >=.
    let mut cons: Vec<(Vec<Rat>, Rat)> = Vec::new();
    for i in 0..m {
        let coeffs: Vec<Rat> = (0..k).map(|j| Rat::from_int(rows[j][i] as i128)).collect();
        cons.push((coeffs, Rat::zero()));
    }
    let sums: Vec<Rat> = (0..k)
        .map(|j| Rat::from_int(rows[j].iter().map(|&x| x as i128).sum()))
        .collect();
    cons.push((sums.clone(), Rat::from_int(1)));
    cons.push((sums.iter().map(|s| Rat::zero().sub(*s)).collect(), Rat::from_int(-1)));

    fm_solve(cons, k)
}

/// Fourier-Motzkin elimination over constraints sum_j c_j t_j >= b.
/// Returns a feasible point if one exists.
fn fm_solve(cons: Vec<(Vec<Rat>, Rat)>, k: usize) -> Option<Vec<Rat>> {
    if k == 0 {
        return if cons.iter().all(|(_, b)| b.le(&Rat::zero())) { Some(Vec::new()) } else { None };
    }
    let var = k - 1;
    let mut lower: Vec<(Vec<Rat>, Rat)> = Vec::new(); // t_var >= expr
    let mut upper: Vec<(Vec<Rat>, Rat)> = Vec::new(); // t_var <= expr
    let mut rest: Vec<(Vec<Rat>, Rat)> = Vec::new();
    for (c, b) in cons {
        let a = c[var];
        let head: Vec<Rat> = c[..var].to_vec();
        match a.cmp0() {
            std::cmp::Ordering::Equal => rest.push((head, b)),
            std::cmp::Ordering::Greater => {
                // t_var >= (b - head.t)/a
                let coeffs: Vec<Rat> = head.iter().map(|h| Rat::zero().sub(*h).div(a)).collect();
                lower.push((coeffs, b.div(a)));
            }
            std::cmp::Ordering::Less => {
                let coeffs: Vec<Rat> = head.iter().map(|h| Rat::zero().sub(*h).div(a)).collect();
                upper.push((coeffs, b.div(a)));
            }
        }
    }
    // Combine lower <= upper pairs into constraints on the remaining vars.
    let mut reduced = rest;
    for (lc, lb) in &lower {
        for (uc, ub) in &upper {
            // lb + lc.t <= ub + uc.t  =>  (uc - lc).t >= lb - ub
            let coeffs: Vec<Rat> = uc.iter().zip(lc.iter()).map(|(u, l)| u.sub(*l)).collect();
            reduced.push((coeffs, lb.sub(*ub)));
        }
    }
    let tail = fm_solve(reduced, var)?;
    // Pick t_var within [max lower, min upper].
    let eval = |coeffs: &[Rat], b: &Rat| -> Rat {
        let mut acc = *b;
        for (c, t) in coeffs.iter().zip(tail.iter()) {
            acc = acc.add(c.mul(*t));
        }
        acc
    };
    let lo = lower.iter().map(|(c, b)| eval(c, b)).reduce(|a, b| if a.le(&b) { b } else { a });
    let hi = upper.iter().map(|(c, b)| eval(c, b)).reduce(|a, b| if a.le(&b) { a } else { b });
    let pick = match (lo, hi) {
        (Some(l), Some(h)) => {
            debug_assert!(l.le(&h));
            l
        }
        (Some(l), None) => l,
        (None, Some(h)) => h,
        (None, None) => Rat::zero(),
    };
    let mut out = tail;
    out.push(pick);
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solve_simple_system() {
        // x + y = 3, x - y = 1 -> (2, 1)
        let a = vec![vec![1, 1], vec![1, -1]];
        let (x, k) = solve_integer(&a, &[3, 1]).unwrap();
        assert_eq!(x, vec![2, 1]);
        assert!(k.is_empty());
    }

    #[test]
    fn detect_no_integer_solution() {
        // 2x = 1 has no integer solution.
        assert!(solve_integer(&[vec![2]], &[1]).is_none());
    }

    #[test]
    fn kernel_of_sum_map() {
        // x + y + z = 0: kernel rank 2; all basis rows really solve it.
        let k = kernel_basis(&[vec![1, 1, 1]]);
        assert_eq!(k.len(), 2);
        for row in &k {
            assert_eq!(row.iter().sum::<i64>(), 0);
        }
    }

    #[test]
    fn inconsistent_system() {
        let a = vec![vec![1, 1], vec![1, 1]];
        assert!(solve_integer(&a, &[1, 2]).is_none());
    }

    #[test]
    fn nonnegative_combination_found() {
        // Span of (1, -1) and (0, 1) contains (1, 0) >= 0.
        let rows = vec![vec![1, -1], vec![0, 1]];
        let t = nonnegative_combination(&rows).unwrap();
        // Verify the witness.
        let v0 = t[0].mul(Rat::from_int(1)).add(t[1].mul(Rat::from_int(0)));
        let v1 = t[0].mul(Rat::from_int(-1)).add(t[1].mul(Rat::from_int(1)));
        assert!(Rat::zero().le(&v0) && Rat::zero().le(&v1));
        assert!(!v0.is_zero() || !v1.is_zero());
    }

    #[test]
    fn mixed_sign_span_rejected() {
        // Span of (1, -1): no nonzero nonnegative element.
        assert!(nonnegative_combination(&[vec![1, -1]]).is_none());
        // Rank-2 span in R^3 avoiding the nonnegative orthant:
        // a(1,-1,0) + b(0,1,-1) = (a, b-a, -b) >= 0 forces a = b = 0.
        assert!(nonnegative_combination(&[vec![1, -1, 0], vec![0, 1, -1]]).is_none());
    }

    #[test]
    fn all_positive_basis_detected() {
        let t = nonnegative_combination(&[vec![1, 2, 1]]).unwrap();
        assert!(!t[0].is_zero());
    }

    #[test]
    fn echelon_pivots() {
        let (rows, pivots) = row_echelon_lattice(&[vec![2, 4, 0], vec![1, 2, 1]]);
        assert_eq!(rows.len(), 2);
        assert_eq!(pivots.len(), 2);
    }
}
