//! Exact integer lattices: Hermite and Smith normal forms, linear Diophantine
//! systems, and intersections of lattices and of their affine cosets.
//!
//! Everything works over [`BigInt`]; matrices act on row vectors, so a lattice
//! is the row span of its basis matrix.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Dense row-major matrix of arbitrary-precision integers.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    /// Builds a matrix from rows; all rows must have length `cols`.
    pub fn from_rows(cols: usize, rows: Vec<Vec<BigInt>>) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for row in rows {
            assert_eq!(row.len(), cols, "ragged matrix row");
            data.extend(row);
        }
        IntMatrix { rows: n, cols, data }
    }

    /// Convenience constructor for small literal matrices.
    pub fn from_i64(cols: usize, rows: &[&[i64]]) -> Self {
        Self::from_rows(
            cols,
            rows.iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * &other[(k, j)];
                }
            }
        }
        out
    }

    /// Row vector times matrix.
    pub fn left_apply(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.rows);
        let mut out = vec![BigInt::zero(); self.cols];
        for (i, c) in v.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                *o += c * &self[(i, j)];
            }
        }
        out
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// `row[dst] += k * row[src]`
    fn add_row_multiple(&mut self, dst: usize, src: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let v = &self.data[src * self.cols + j] * k;
            self.data[dst * self.cols + j] += v;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -&self.data[i * self.cols + j];
            self.data[i * self.cols + j] = v;
        }
    }

    /// Replaces rows (r, s) by (x*r + y*s, u*r + v*s).
    fn combine_rows(&mut self, r: usize, s: usize, x: &BigInt, y: &BigInt, u: &BigInt, v: &BigInt) {
        for j in 0..self.cols {
            let a = self.data[r * self.cols + j].clone();
            let b = self.data[s * self.cols + j].clone();
            self.data[r * self.cols + j] = x * &a + y * &b;
            self.data[s * self.cols + j] = u * &a + v * &b;
        }
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            write!(f, "{}", row.join(" "))?;
        }
        write!(f, "]")
    }
}

/// Row-style Hermite normal form in place. Returns the unimodular transform
/// `u` with `u * original = reduced` and the number of nonzero rows, which are
/// the leading rows of the reduced matrix.
fn hnf_in_place(a: &mut IntMatrix) -> (IntMatrix, usize) {
    let m = a.rows();
    let n = a.cols();
    let mut u = IntMatrix::identity(m);
    let mut r = 0;
    for col in 0..n {
        if r == m {
            break;
        }
        // move a nonzero entry into the pivot row
        if a[(r, col)].is_zero() {
            if let Some(i) = (r + 1..m).find(|&i| !a[(i, col)].is_zero()) {
                a.swap_rows(r, i);
                u.swap_rows(r, i);
            } else {
                continue;
            }
        }
        for i in r + 1..m {
            if a[(i, col)].is_zero() {
                continue;
            }
            let p = a[(r, col)].clone();
            let q = a[(i, col)].clone();
            let eg = p.extended_gcd(&q);
            let (g, x, y) = (eg.gcd, eg.x, eg.y);
            let pu = -(&q / &g);
            let pv = &p / &g;
            a.combine_rows(r, i, &x, &y, &pu, &pv);
            u.combine_rows(r, i, &x, &y, &pu, &pv);
        }
        if a[(r, col)].is_negative() {
            a.negate_row(r);
            u.negate_row(r);
        }
        let pivot = a[(r, col)].clone();
        for i in 0..r {
            let k = -a[(i, col)].div_floor(&pivot);
            a.add_row_multiple(i, r, &k);
            u.add_row_multiple(i, r, &k);
        }
        r += 1;
    }
    (u, r)
}

/// Sublattice of `Z^dim` with a canonical Hermite basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Lattice {
    dim: usize,
    basis: IntMatrix,
}

impl Lattice {
    pub fn zero(dim: usize) -> Self {
        Lattice {
            dim,
            basis: IntMatrix::zeros(0, dim),
        }
    }

    pub fn full(dim: usize) -> Self {
        Lattice {
            dim,
            basis: IntMatrix::identity(dim),
        }
    }

    /// Lattice spanned by the given vectors (any number, possibly dependent).
    pub fn span(dim: usize, gens: Vec<Vec<BigInt>>) -> Self {
        let rows: Vec<Vec<BigInt>> = gens.into_iter().filter(|r| r.iter().any(|x| !x.is_zero())).collect();
        hnf(&IntMatrix::from_rows(dim, rows)).0
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.basis.rows()
    }

    pub fn basis(&self) -> &IntMatrix {
        &self.basis
    }

    pub fn basis_vecs(&self) -> Vec<Vec<BigInt>> {
        self.basis.row_vecs()
    }

    fn pivot_col(&self, i: usize) -> usize {
        self.basis
            .row(i)
            .iter()
            .position(|x| !x.is_zero())
            .expect("basis rows are nonzero")
    }

    /// Coefficients of `v` in the basis, if `v` lies in the lattice.
    pub fn coordinates(&self, v: &[BigInt]) -> Option<Vec<BigInt>> {
        assert_eq!(v.len(), self.dim);
        let mut rest = v.to_vec();
        let mut coeffs = Vec::with_capacity(self.rank());
        for i in 0..self.rank() {
            let c = self.pivot_col(i);
            let (q, rem) = rest[c].div_rem(&self.basis[(i, c)]);
            if !rem.is_zero() {
                return None;
            }
            for (j, x) in rest.iter_mut().enumerate() {
                *x -= &q * &self.basis[(i, j)];
            }
            coeffs.push(q);
        }
        if rest.iter().all(Zero::is_zero) {
            Some(coeffs)
        } else {
            None
        }
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        self.coordinates(v).is_some()
    }

    /// Canonical representative of `v + self`: each pivot coordinate in `[0, pivot)`.
    pub fn reduce(&self, v: &[BigInt]) -> Vec<BigInt> {
        let mut out = v.to_vec();
        for i in 0..self.rank() {
            let c = self.pivot_col(i);
            let q = out[c].div_floor(&self.basis[(i, c)]);
            if q.is_zero() {
                continue;
            }
            for (j, x) in out.iter_mut().enumerate() {
                *x -= &q * &self.basis[(i, j)];
            }
        }
        out
    }

    pub fn is_sublattice_of(&self, other: &Lattice) -> bool {
        (0..self.rank()).all(|i| other.contains(self.basis.row(i)))
    }

    /// `[other : self]` for `self <= other`; `None` if the ranks differ.
    pub fn index_in(&self, other: &Lattice) -> Option<BigInt> {
        assert!(self.is_sublattice_of(other), "index of a non-sublattice");
        if self.rank() != other.rank() {
            return None;
        }
        if self.rank() == 0 {
            return Some(BigInt::one());
        }
        let rows: Vec<Vec<BigInt>> = (0..self.rank())
            .map(|i| other.coordinates(self.basis.row(i)).expect("checked above"))
            .collect();
        let (h, _) = hnf(&IntMatrix::from_rows(other.rank(), rows));
        Some((0..h.rank()).map(|i| h.basis[(i, h.pivot_col(i))].clone()).product())
    }

    /// Sum of two lattices.
    pub fn join(&self, other: &Lattice) -> Lattice {
        assert_eq!(self.dim, other.dim);
        let mut gens = self.basis_vecs();
        gens.extend(other.basis_vecs());
        Lattice::span(self.dim, gens)
    }
}

/// Hermite normal form of the row span of `m`, with the unimodular transform
/// `u` such that `u * m` has the basis as leading rows followed by zero rows.
pub fn hnf(m: &IntMatrix) -> (Lattice, IntMatrix) {
    let mut a = m.clone();
    let (u, r) = hnf_in_place(&mut a);
    let rows = (0..r).map(|i| a.row(i).to_vec()).collect();
    (
        Lattice {
            dim: m.cols(),
            basis: IntMatrix::from_rows(m.cols(), rows),
        },
        u,
    )
}

/// Invariant factors and free rank of the cokernel of a relation matrix
/// whose rows are relations among `cols` generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithForm {
    /// Nonzero diagonal entries `d1 | d2 | ... | dk`, all positive.
    pub factors: Vec<BigInt>,
    /// Number of columns minus the rank.
    pub free_rank: usize,
}

impl SmithForm {
    /// Invariant factors different from one.
    pub fn torsion(&self) -> Vec<BigInt> {
        self.factors.iter().filter(|d| !d.is_one()).cloned().collect()
    }
}

pub fn snf(m: &IntMatrix) -> SmithForm {
    let mut cur = m.clone();
    // alternate row and column Hermite reduction until diagonal
    loop {
        let (h, _) = hnf(&cur);
        let (h2, _) = hnf(&h.basis.transpose());
        let d = h2.basis;
        let diagonal = (0..d.rows()).all(|i| (0..d.cols()).all(|j| i == j || d[(i, j)].is_zero()));
        if diagonal {
            let mut factors: Vec<BigInt> = (0..d.rows()).map(|i| d[(i, i)].abs()).collect();
            let k = factors.len();
            for i in 0..k {
                for j in i + 1..k {
                    let g = factors[i].gcd(&factors[j]);
                    let l = factors[i].lcm(&factors[j]);
                    factors[i] = g;
                    factors[j] = l;
                }
            }
            return SmithForm {
                free_rank: m.cols() - k,
                factors,
            };
        }
        cur = d;
    }
}

/// Coset `offset + lattice`, with the offset canonically reduced.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AffineLattice {
    offset: Vec<BigInt>,
    lattice: Lattice,
}

impl AffineLattice {
    pub fn new(offset: Vec<BigInt>, lattice: Lattice) -> Self {
        assert_eq!(offset.len(), lattice.dim());
        let offset = lattice.reduce(&offset);
        AffineLattice { offset, lattice }
    }

    pub fn offset(&self) -> &[BigInt] {
        &self.offset
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        let diff: Vec<BigInt> = v.iter().zip(&self.offset).map(|(a, b)| a - b).collect();
        self.lattice.contains(&diff)
    }
}

/// All integer solutions of `a * x = b` (x a column vector).
pub fn solve_linear(a: &IntMatrix, b: &[BigInt]) -> Option<AffineLattice> {
    assert_eq!(a.rows(), b.len(), "right-hand side length mismatch");
    let n = a.cols();
    // rows of u beyond the rank span the kernel; the leading rows map onto h
    let (h, u) = hnf(&a.transpose());
    let r = h.rank();
    let mut y: Vec<BigInt> = Vec::with_capacity(r);
    for i in 0..r {
        let c = h.pivot_col(i);
        let mut acc = b[c].clone();
        for (j, yj) in y.iter().enumerate() {
            acc -= yj * &h.basis[(j, c)];
        }
        let (q, rem) = acc.div_rem(&h.basis[(i, c)]);
        if !rem.is_zero() {
            return None;
        }
        y.push(q);
    }
    // non-pivot columns must agree as well
    let reached = if r == 0 {
        vec![BigInt::zero(); a.rows()]
    } else {
        h.basis.left_apply(&y)
    };
    if reached.as_slice() != b {
        return None;
    }
    let mut x = vec![BigInt::zero(); n];
    for (i, yi) in y.iter().enumerate() {
        for (j, xj) in x.iter_mut().enumerate() {
            *xj += yi * &u[(i, j)];
        }
    }
    let kernel = Lattice::span(n, (r..n).map(|i| u.row(i).to_vec()).collect());
    Some(AffineLattice::new(x, kernel))
}

pub fn lattice_meet(l1: &Lattice, l2: &Lattice) -> Lattice {
    assert_eq!(l1.dim(), l2.dim(), "ambient dimension mismatch");
    let r1 = l1.rank();
    if r1 == 0 || l2.rank() == 0 {
        return Lattice::zero(l1.dim());
    }
    let mut rows = l1.basis_vecs();
    rows.extend(l2.basis_vecs());
    let stacked = IntMatrix::from_rows(l1.dim(), rows);
    let (h, u) = hnf(&stacked);
    let gens = (h.rank()..stacked.rows())
        .map(|i| l1.basis.left_apply(&u.row(i)[..r1]))
        .collect();
    Lattice::span(l1.dim(), gens)
}

pub fn affine_meet(c1: &AffineLattice, c2: &AffineLattice) -> Option<AffineLattice> {
    let dim = c1.lattice.dim();
    assert_eq!(dim, c2.lattice.dim(), "ambient dimension mismatch");
    let r1 = c1.lattice.rank();
    let r2 = c2.lattice.rank();
    let meet = lattice_meet(&c1.lattice, &c2.lattice);
    if r1 + r2 == 0 {
        return (c1.offset == c2.offset).then(|| c1.clone());
    }
    // y*B1 - z*B2 = o2 - o1
    let mut cols = c1.lattice.basis_vecs();
    cols.extend(
        c2.lattice
            .basis_vecs()
            .into_iter()
            .map(|r| r.into_iter().map(|x| -x).collect()),
    );
    let a = IntMatrix::from_rows(dim, cols).transpose();
    let rhs: Vec<BigInt> = c2.offset.iter().zip(&c1.offset).map(|(p, q)| p - q).collect();
    let sol = solve_linear(&a, &rhs)?;
    let y = &sol.offset()[..r1];
    let step = if r1 == 0 {
        vec![BigInt::zero(); dim]
    } else {
        c1.lattice.basis.left_apply(y)
    };
    let point: Vec<BigInt> = c1.offset.iter().zip(step).map(|(o, s)| o + s).collect();
    Some(AffineLattice::new(point, meet))
}

pub fn vec_i64(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}
