//! Dense exact linear algebra over prime fields F_p.
//!
//! Matrices are row-major. For p = 2 each row is packed into 64-bit words and
//! row elimination is whole-word XOR; for odd p entries are byte residues and
//! the elimination performs the same sweep with scalar arithmetic. Pivoting
//! always selects the first row with a nonzero entry in the current column,
//! never by value, so echelon forms are identical across runs and platforms.

use std::fmt;

// ---------------------------------------------------------------------------
// errors
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FpError {
    /// The modulus is not a prime (or is out of the supported u8 range).
    BadModulus(u32),
    /// Two objects live over different moduli or ambient dimensions.
    Mismatch(String),
    /// `quotient_dim(sub)` was called with a space that is not contained
    /// in `self`.
    NotNested { sup_dim: usize, sub_dim: usize },
}

impl fmt::Display for FpError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FpError::BadModulus(p) => write!(f, "modulus {p} is not a supported prime"),
            FpError::Mismatch(what) => write!(f, "incompatible operands: {what}"),
            FpError::NotNested { sup_dim, sub_dim } => write!(
                f,
                "quotient undefined: {sub_dim}-dim space is not contained in the {sup_dim}-dim space"
            ),
        }
    }
}

impl std::error::Error for FpError {}

pub fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn check_modulus(p: u32) -> Result<(), FpError> {
    if p >= 2 && p < 256 && is_prime(p) {
        Ok(())
    } else {
        Err(FpError::BadModulus(p))
    }
}

/// a^(p-2) mod p, the inverse of a nonzero residue.
fn inv_mod(a: u32, p: u32) -> u32 {
    debug_assert!(a % p != 0);
    let mut base = a % p;
    let mut exp = p - 2;
    let mut acc = 1u32;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    acc
}

// ---------------------------------------------------------------------------
// matrices
// ---------------------------------------------------------------------------

#[derive(Clone, PartialEq, Eq)]
enum Store {
    /// p = 2: each row occupies `wpr` u64 words; bits past `cols` stay zero.
    Bits { wpr: usize, words: Vec<u64> },
    /// odd p: one byte residue per entry.
    Bytes(Vec<u8>),
}

/// A rows x cols matrix over F_p. Columns index the source of the linear map,
/// rows the target, so `dim image + dim kernel = cols`.
#[derive(Clone, PartialEq, Eq)]
pub struct FpMatrix {
    p: u32,
    rows: usize,
    cols: usize,
    store: Store,
}

impl fmt::Debug for FpMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "FpMatrix(p={}, {}x{})", self.p, self.rows, self.cols)?;
        for r in 0..self.rows.min(16) {
            let line: Vec<String> = (0..self.cols.min(48)).map(|c| self.get(r, c).to_string()).collect();
            writeln!(f, "  [{}]", line.join(" "))?;
        }
        Ok(())
    }
}

impl FpMatrix {
    pub fn zero(p: u32, rows: usize, cols: usize) -> Result<Self, FpError> {
        check_modulus(p)?;
        let store = if p == 2 {
            let wpr = cols.div_ceil(64);
            Store::Bits { wpr, words: vec![0u64; rows * wpr] }
        } else {
            Store::Bytes(vec![0u8; rows * cols])
        };
        Ok(FpMatrix { p, rows, cols, store })
    }

    pub fn identity(p: u32, n: usize) -> Result<Self, FpError> {
        let mut m = Self::zero(p, n, n)?;
        for i in 0..n {
            m.set(i, i, 1);
        }
        Ok(m)
    }

    /// Builds a matrix from dense rows of residues (values reduced mod p).
    pub fn from_rows(p: u32, cols: usize, rows: &[Vec<u8>]) -> Result<Self, FpError> {
        let mut m = Self::zero(p, rows.len(), cols)?;
        for (r, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(FpError::Mismatch(format!(
                    "row {r} has {} entries, expected {cols}",
                    row.len()
                )));
            }
            for (c, &v) in row.iter().enumerate() {
                m.set(r, c, (v as u32 % p) as u8);
            }
        }
        Ok(m)
    }

    pub fn p(&self) -> u32 {
        self.p
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u8 {
        debug_assert!(r < self.rows && c < self.cols);
        match &self.store {
            Store::Bits { wpr, words } => ((words[r * wpr + c / 64] >> (c % 64)) & 1) as u8,
            Store::Bytes(b) => b[r * self.cols + c],
        }
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u8) {
        debug_assert!(r < self.rows && c < self.cols);
        debug_assert!((v as u32) < self.p);
        match &mut self.store {
            Store::Bits { wpr, words } => {
                let w = &mut words[r * *wpr + c / 64];
                let mask = 1u64 << (c % 64);
                if v & 1 == 1 {
                    *w |= mask;
                } else {
                    *w &= !mask;
                }
            }
            Store::Bytes(b) => b[r * self.cols + c] = v,
        }
    }

    /// Adds `delta` to the (r, c) entry mod p. Matrix assembly helper.
    #[inline]
    pub fn add_at(&mut self, r: usize, c: usize, delta: u32) {
        let cur = self.get(r, c) as u32;
        self.set(r, c, ((cur + delta) % self.p) as u8);
    }

    pub fn is_zero(&self) -> bool {
        match &self.store {
            Store::Bits { words, .. } => words.iter().all(|&w| w == 0),
            Store::Bytes(b) => b.iter().all(|&v| v == 0),
        }
    }

    pub fn transpose(&self) -> FpMatrix {
        let mut t = FpMatrix::zero(self.p, self.cols, self.rows).expect("same modulus");
        for r in 0..self.rows {
            for c in 0..self.cols {
                let v = self.get(r, c);
                if v != 0 {
                    t.set(c, r, v);
                }
            }
        }
        t
    }

    /// Matrix product self * rhs (self is rows x cols, rhs is cols x k).
    pub fn mul(&self, rhs: &FpMatrix) -> Result<FpMatrix, FpError> {
        if self.p != rhs.p || self.cols != rhs.rows {
            return Err(FpError::Mismatch(format!(
                "product of {}x{} (p={}) with {}x{} (p={})",
                self.rows, self.cols, self.p, rhs.rows, rhs.cols, rhs.p
            )));
        }
        let mut out = FpMatrix::zero(self.p, self.rows, rhs.cols)?;
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k) as u32;
                if a == 0 {
                    continue;
                }
                for c in 0..rhs.cols {
                    let b = rhs.get(k, c) as u32;
                    if b != 0 {
                        out.add_at(r, c, a * b % self.p);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Matrix-vector product; `v` has `cols` residues.
    pub fn mul_vec(&self, v: &[u8]) -> Vec<u8> {
        assert_eq!(v.len(), self.cols, "vector length must match column count");
        match &self.store {
            Store::Bits { wpr, words } => {
                let mut packed = vec![0u64; *wpr];
                for (c, &x) in v.iter().enumerate() {
                    if x & 1 == 1 {
                        packed[c / 64] |= 1u64 << (c % 64);
                    }
                }
                (0..self.rows)
                    .map(|r| {
                        let row = &words[r * wpr..(r + 1) * wpr];
                        let ones: u32 = row.iter().zip(&packed).map(|(a, b)| (a & b).count_ones()).sum();
                        (ones & 1) as u8
                    })
                    .collect()
            }
            Store::Bytes(b) => (0..self.rows)
                .map(|r| {
                    let mut acc = 0u32;
                    for c in 0..self.cols {
                        acc = (acc + b[r * self.cols + c] as u32 * v[c] as u32) % self.p;
                    }
                    acc as u8
                })
                .collect(),
        }
    }

    /// In-place reduced row echelon form; returns the pivot columns.
    fn rref_in_place(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let rows = self.rows;
        let cols = self.cols;
        let p = self.p;
        match &mut self.store {
            Store::Bits { wpr, words } => {
                let wpr = *wpr;
                let mut scratch = vec![0u64; wpr];
                let mut r = 0usize;
                for c in 0..cols {
                    if r == rows {
                        break;
                    }
                    let w = c / 64;
                    let mask = 1u64 << (c % 64);
                    let Some(pr) = (r..rows).find(|&i| words[i * wpr + w] & mask != 0) else {
                        continue;
                    };
                    if pr != r {
                        for k in 0..wpr {
                            words.swap(r * wpr + k, pr * wpr + k);
                        }
                    }
                    scratch.copy_from_slice(&words[r * wpr..(r + 1) * wpr]);
                    for i in 0..rows {
                        if i != r && words[i * wpr + w] & mask != 0 {
                            let row = &mut words[i * wpr..(i + 1) * wpr];
                            for (dst, src) in row.iter_mut().zip(&scratch) {
                                *dst ^= src;
                            }
                        }
                    }
                    pivots.push(c);
                    r += 1;
                }
            }
            Store::Bytes(b) => {
                let mut scratch = vec![0u8; cols];
                let mut r = 0usize;
                for c in 0..cols {
                    if r == rows {
                        break;
                    }
                    let Some(pr) = (r..rows).find(|&i| b[i * cols + c] != 0) else {
                        continue;
                    };
                    if pr != r {
                        for k in 0..cols {
                            b.swap(r * cols + k, pr * cols + k);
                        }
                    }
                    let inv = inv_mod(b[r * cols + c] as u32, p);
                    if inv != 1 {
                        for k in 0..cols {
                            b[r * cols + k] = (b[r * cols + k] as u32 * inv % p) as u8;
                        }
                    }
                    scratch.copy_from_slice(&b[r * cols..(r + 1) * cols]);
                    for i in 0..rows {
                        let m = b[i * cols + c] as u32;
                        if i != r && m != 0 {
                            let neg = p - m;
                            let row = &mut b[i * cols..(i + 1) * cols];
                            for (dst, src) in row.iter_mut().zip(&scratch) {
                                *dst = ((*dst as u32 + neg * *src as u32) % p) as u8;
                            }
                        }
                    }
                    pivots.push(c);
                    r += 1;
                }
            }
        }
        pivots
    }

    /// Reduced row echelon form and pivot columns, leaving self untouched.
    pub fn rref(&self) -> (FpMatrix, Vec<usize>) {
        let mut m = self.clone();
        let pivots = m.rref_in_place();
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Right null space { v : M v = 0 } as a canonical subspace of F_p^cols.
    pub fn kernel(&self) -> Subspace {
        let (e, pivots) = self.rref();
        let pivot_set: Vec<bool> = {
            let mut s = vec![false; self.cols];
            for &c in &pivots {
                s[c] = true;
            }
            s
        };
        let mut basis: Vec<Vec<u8>> = Vec::with_capacity(self.cols - pivots.len());
        for f in 0..self.cols {
            if pivot_set[f] {
                continue;
            }
            let mut v = vec![0u8; self.cols];
            v[f] = 1;
            for (k, &pc) in pivots.iter().enumerate() {
                let coef = e.get(k, f) as u32;
                if coef != 0 {
                    v[pc] = ((self.p - coef) % self.p) as u8;
                }
            }
            basis.push(v);
        }
        let ker = Subspace::from_rows(self.p, self.cols, &basis).expect("kernel rows are well-formed");
        debug_assert_eq!(ker.dim() + pivots.len(), self.cols, "rank-nullity");
        ker
    }

    /// Column space as a canonical subspace of F_p^rows.
    pub fn image(&self) -> Subspace {
        let img = Subspace::from_matrix_rows(self.transpose());
        debug_assert_eq!(img.dim(), self.rank(), "image dim equals rank");
        img
    }
}

// ---------------------------------------------------------------------------
// subspaces
// ---------------------------------------------------------------------------

/// A subspace of F_p^ambient held as a reduced-row-echelon basis with no zero
/// rows. The representation is canonical, so `==` decides equality of
/// subspaces bytewise.
#[derive(Clone, PartialEq, Eq)]
pub struct Subspace {
    ambient: usize,
    basis: FpMatrix,
    pivots: Vec<usize>,
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Subspace(p={}, dim={}, ambient={}, pivots={:?})",
            self.basis.p,
            self.dim(),
            self.ambient,
            self.pivots
        )
    }
}

impl Subspace {
    /// Span of the given vectors inside F_p^ambient.
    pub fn from_rows(p: u32, ambient: usize, rows: &[Vec<u8>]) -> Result<Self, FpError> {
        Ok(Self::from_matrix_rows(FpMatrix::from_rows(p, ambient, rows)?))
    }

    /// Span of the rows of `m`.
    pub fn from_matrix_rows(m: FpMatrix) -> Self {
        let ambient = m.cols;
        let (e, pivots) = m.rref();
        let mut basis = FpMatrix::zero(e.p, pivots.len(), ambient).expect("same modulus");
        for r in 0..pivots.len() {
            for c in 0..ambient {
                let v = e.get(r, c);
                if v != 0 {
                    basis.set(r, c, v);
                }
            }
        }
        Subspace { ambient, basis, pivots }
    }

    pub fn zero(p: u32, ambient: usize) -> Result<Self, FpError> {
        Ok(Subspace {
            ambient,
            basis: FpMatrix::zero(p, 0, ambient)?,
            pivots: Vec::new(),
        })
    }

    pub fn p(&self) -> u32 {
        self.basis.p
    }
    pub fn ambient(&self) -> usize {
        self.ambient
    }
    pub fn dim(&self) -> usize {
        self.pivots.len()
    }
    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }
    /// The canonical echelon basis, one vector per row.
    pub fn basis(&self) -> &FpMatrix {
        &self.basis
    }

    /// Reduces `v` modulo the subspace; the result is zero iff `v` lies in it.
    pub fn reduce(&self, v: &[u8]) -> Vec<u8> {
        assert_eq!(v.len(), self.ambient, "vector length must match ambient dim");
        let p = self.basis.p;
        let mut w: Vec<u8> = v.iter().map(|&x| (x as u32 % p) as u8).collect();
        for (k, &pc) in self.pivots.iter().enumerate() {
            let m = w[pc] as u32;
            if m != 0 {
                let neg = p - m;
                for c in 0..self.ambient {
                    let b = self.basis.get(k, c) as u32;
                    if b != 0 {
                        w[c] = ((w[c] as u32 + neg * b) % p) as u8;
                    }
                }
            }
        }
        w
    }

    pub fn contains_vec(&self, v: &[u8]) -> bool {
        self.reduce(v).iter().all(|&x| x == 0)
    }

    /// Coordinates of `v` in the echelon basis, or None when v is outside.
    pub fn coords(&self, v: &[u8]) -> Option<Vec<u8>> {
        if !self.contains_vec(v) {
            return None;
        }
        Some(self.pivots.iter().map(|&pc| v[pc]).collect())
    }

    pub fn contains(&self, other: &Subspace) -> bool {
        if other.ambient != self.ambient || other.p() != self.p() {
            return false;
        }
        (0..other.dim()).all(|r| {
            let row: Vec<u8> = (0..self.ambient).map(|c| other.basis.get(r, c)).collect();
            self.contains_vec(&row)
        })
    }

    /// dim(self / other), defined only when other is nested in self.
    pub fn quotient_dim(&self, other: &Subspace) -> Result<usize, FpError> {
        if !self.contains(other) {
            return Err(FpError::NotNested {
                sup_dim: self.dim(),
                sub_dim: other.dim(),
            });
        }
        Ok(self.dim() - other.dim())
    }

    /// Sum of two subspaces of the same ambient space.
    pub fn sum(&self, other: &Subspace) -> Result<Subspace, FpError> {
        if other.ambient != self.ambient || other.p() != self.p() {
            return Err(FpError::Mismatch("subspace sum across different ambients".into()));
        }
        let mut rows: Vec<Vec<u8>> = Vec::with_capacity(self.dim() + other.dim());
        for r in 0..self.dim() {
            rows.push((0..self.ambient).map(|c| self.basis.get(r, c)).collect());
        }
        for r in 0..other.dim() {
            rows.push((0..self.ambient).map(|c| other.basis.get(r, c)).collect());
        }
        Subspace::from_rows(self.p(), self.ambient, &rows)
    }
}

// ---------------------------------------------------------------------------
// tests
// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;

    /// Naive elimination over Vec<Vec<u8>>, kept deliberately separate from
    /// the packed implementation above so the two can check each other.
    fn naive_rank(p: u32, mut m: Vec<Vec<u8>>) -> usize {
        if m.is_empty() {
            return 0;
        }
        let cols = m[0].len();
        let mut rank = 0;
        for c in 0..cols {
            let Some(pr) = (rank..m.len()).find(|&i| m[i][c] % p as u8 != 0) else {
                continue;
            };
            m.swap(rank, pr);
            let inv = inv_mod(m[rank][c] as u32 % p, p);
            for k in 0..cols {
                m[rank][k] = (m[rank][k] as u32 * inv % p) as u8;
            }
            for i in 0..m.len() {
                if i != rank && m[i][c] != 0 {
                    let f = (p - m[i][c] as u32) % p;
                    for k in 0..cols {
                        m[i][k] = ((m[i][k] as u32 + f * m[rank][k] as u32) % p) as u8;
                    }
                }
            }
            rank += 1;
            if rank == m.len() {
                break;
            }
        }
        rank
    }

    /// Exponent vectors of monomials of degree d in `vars` variables,
    /// lexicographically descending.
    fn monomials(d: u8, vars: usize) -> Vec<Vec<u8>> {
        fn go(d: u8, vars: usize, acc: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
            if vars == 1 {
                acc.push(d);
                out.push(acc.clone());
                acc.pop();
                return;
            }
            for e in (0..=d).rev() {
                acc.push(e);
                go(d - e, vars - 1, acc, out);
                acc.pop();
            }
        }
        let mut out = Vec::new();
        go(d, vars, &mut Vec::new(), &mut out);
        out
    }

    #[test]
    fn identity_rank() {
        let id = FpMatrix::identity(2, 3).unwrap();
        assert_eq!(id.rank(), 3);
        assert_eq!(id.kernel().dim(), 0);
    }

    #[test]
    fn repeated_rows_rank_one() {
        let m = FpMatrix::from_rows(2, 2, &[vec![1, 1], vec![1, 1]]).unwrap();
        assert_eq!(m.rank(), 1);
    }

    #[test]
    fn squares_of_variables_are_independent() {
        // Rows are the coordinate vectors of y_i^2 (i = 0..4) in the basis of
        // degree-2 monomials in four variables.
        let deg2 = monomials(2, 4);
        assert_eq!(deg2.len(), 10);
        let rows: Vec<Vec<u8>> = (0..4)
            .map(|i| {
                let mut sq = vec![0u8; 4];
                sq[i] = 2;
                deg2.iter().map(|m| u8::from(*m == sq)).collect()
            })
            .collect();
        let m = FpMatrix::from_rows(2, 10, &rows).unwrap();
        assert_eq!(m.rank(), 4);
    }

    /// Kernel of multiplication (f_0..f_3) . (g_0..g_3)^T -> deg-4 forms,
    /// where f_i = y_i^2 and the g_i range over degree-2 coefficients.
    #[test]
    fn square_syzygies_dimension() {
        let deg2 = monomials(2, 4);
        let deg4 = monomials(4, 4);
        assert_eq!(deg4.len(), 35);
        let idx4: std::collections::HashMap<Vec<u8>, usize> =
            deg4.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        // Columns: pairs (i, m) with i in 0..4, m a degree-2 monomial.
        let mut cols: Vec<Vec<u8>> = Vec::new();
        for i in 0..4 {
            for m in &deg2 {
                let mut prod = m.clone();
                prod[i] += 2;
                let mut col = vec![0u8; 35];
                col[idx4[&prod]] = 1;
                cols.push(col);
            }
        }
        assert_eq!(cols.len(), 40);
        let mut m = FpMatrix::zero(2, 35, 40).unwrap();
        for (c, col) in cols.iter().enumerate() {
            for (r, &v) in col.iter().enumerate() {
                if v != 0 {
                    m.set(r, c, 1);
                }
            }
        }
        let ker = m.kernel();
        assert_eq!(ker.dim(), 6);
        // cross-check against the naive eliminator
        let rows: Vec<Vec<u8>> = (0..35).map(|r| (0..40).map(|c| m.get(r, c)).collect()).collect();
        assert_eq!(40 - naive_rank(2, rows), 6);
    }

    #[test]
    fn quotient_of_monomial_spans() {
        // A = span of the 34 degree-4 monomials with some exponent >= 2,
        // B = span of the 10 monomials y_i^2 y_j^2; dim A/B = 24.
        let deg4 = monomials(4, 4);
        let a_rows: Vec<Vec<u8>> = deg4
            .iter()
            .enumerate()
            .filter(|(_, m)| m.iter().any(|&e| e >= 2))
            .map(|(i, _)| {
                let mut v = vec![0u8; 35];
                v[i] = 1;
                v
            })
            .collect();
        assert_eq!(a_rows.len(), 34);
        let b_rows: Vec<Vec<u8>> = deg4
            .iter()
            .enumerate()
            .filter(|(_, m)| m.iter().all(|&e| e % 2 == 0))
            .map(|(i, _)| {
                let mut v = vec![0u8; 35];
                v[i] = 1;
                v
            })
            .collect();
        assert_eq!(b_rows.len(), 10);
        let a = Subspace::from_rows(2, 35, &a_rows).unwrap();
        let b = Subspace::from_rows(2, 35, &b_rows).unwrap();
        assert!(a.contains(&b));
        assert_eq!(a.quotient_dim(&b).unwrap(), 24);
    }

    #[test]
    fn quotient_rejects_non_nested() {
        let a = Subspace::from_rows(3, 3, &[vec![1, 0, 0]]).unwrap();
        let b = Subspace::from_rows(3, 3, &[vec![0, 1, 0]]).unwrap();
        assert!(matches!(a.quotient_dim(&b), Err(FpError::NotNested { .. })));
    }

    #[test]
    fn bad_modulus_rejected() {
        assert!(matches!(FpMatrix::zero(4, 1, 1), Err(FpError::BadModulus(4))));
        assert!(matches!(FpMatrix::zero(1, 1, 1), Err(FpError::BadModulus(1))));
        assert!(FpMatrix::zero(251, 1, 1).is_ok());
    }

    #[test]
    fn kernel_basis_is_canonical_echelon() {
        // kernel of [1 1] over F_3 is spanned by (1, 2) after normalization
        let m = FpMatrix::from_rows(3, 2, &[vec![1, 1]]).unwrap();
        let k = m.kernel();
        assert_eq!(k.dim(), 1);
        assert_eq!((k.basis().get(0, 0), k.basis().get(0, 1)), (1, 2));
        assert_eq!(k.pivots(), &[0]);
    }

    #[test]
    fn image_and_coords_roundtrip() {
        let m = FpMatrix::from_rows(5, 3, &[vec![1, 2, 0], vec![0, 1, 1], vec![1, 3, 1]]).unwrap();
        let img = m.transpose().image(); // column space of the transpose = row space of m
        assert_eq!(img.dim(), 2);
        let v = vec![1u8, 2, 0];
        let coords = img.coords(&v).expect("row of m lies in the row space");
        // rebuild v from the echelon basis
        let mut rebuilt = vec![0u32; 3];
        for (k, &co) in coords.iter().enumerate() {
            for c in 0..3 {
                rebuilt[c] = (rebuilt[c] + co as u32 * img.basis().get(k, c) as u32) % 5;
            }
        }
        assert_eq!(rebuilt, vec![1, 2, 0]);
    }

    #[test]
    fn rank_matches_naive_on_pseudorandom_inputs() {
        // deterministic xorshift fill, checked against the naive eliminator
        let mut state = 0x243F_6A88_85A3_08D3u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for &p in &[2u32, 3, 5, 7] {
            for &(rows, cols) in &[(1usize, 1usize), (4, 7), (9, 5), (16, 16), (13, 31)] {
                let dense: Vec<Vec<u8>> = (0..rows)
                    .map(|_| (0..cols).map(|_| (next() % p as u64) as u8).collect())
                    .collect();
                let m = FpMatrix::from_rows(p, cols, &dense).unwrap();
                let r = m.rank();
                assert_eq!(r, naive_rank(p, dense.clone()), "rank vs naive, p={p}");
                assert_eq!(r, m.transpose().rank(), "rank of transpose, p={p}");
                assert_eq!(m.kernel().dim() + r, cols, "rank-nullity, p={p}");
                assert_eq!(m.image().dim(), r, "image dim, p={p}");
                // every column lies in the image
                let img = m.image();
                for c in 0..cols {
                    let col: Vec<u8> = (0..rows).map(|r| m.get(r, c)).collect();
                    assert!(img.contains_vec(&col));
                }
                // echelon idempotence
                let (e, piv) = m.rref();
                let (e2, piv2) = e.rref();
                assert_eq!(e, e2);
                assert_eq!(piv, piv2);
            }
        }
    }

    #[test]
    fn mul_vec_agrees_with_mul() {
        let m = FpMatrix::from_rows(2, 4, &[vec![1, 0, 1, 1], vec![0, 1, 1, 0], vec![1, 1, 0, 1]]).unwrap();
        let v = vec![1u8, 1, 0, 1];
        let as_col = FpMatrix::from_rows(2, 1, &v.iter().map(|&x| vec![x]).collect::<Vec<_>>()).unwrap();
        let prod = m.mul(&as_col).unwrap();
        let quick = m.mul_vec(&v);
        for r in 0..3 {
            assert_eq!(prod.get(r, 0), quick[r]);
        }
    }
}
