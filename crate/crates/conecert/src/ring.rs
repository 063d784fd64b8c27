//! The bigraded coordinate ring R = k[x_0..x_n, y_0..y_n]/(q) of the
//! incidence hypersurface Y inside P^n x P^n, where q = sum_i x_i y_i.
//!
//! Monomials not divisible by x_0 y_0 form a basis of every graded piece
//! R_(a,b). `normal_form` rewrites x_0 y_0 -> -(x_1 y_1 + ... + x_n y_n)
//! until no term is divisible by x_0 y_0; each rewrite strictly lowers the
//! exponent of x_0, so the loop terminates. Multiplication matrices are
//! expressed in these bases with columns indexing the source piece.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, RwLock};

use crate::fp::{self, FpError, FpMatrix};

// ---------------------------------------------------------------------------
// errors
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RingError {
    NotPrime(u32),
    /// n must be at least 3 for the projective-bundle construction.
    DimensionTooSmall(usize),
    /// The characteristic must satisfy p >= n - 1.
    PrimeTooSmall { p: u32, n: usize },
    /// A graded piece was requested beyond the supported exponent range.
    DegreeTooLarge(i64),
    /// An operation needed a nonzero bihomogeneous polynomial.
    NotBihomogeneous,
    Linear(FpError),
}

impl fmt::Display for RingError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingError::NotPrime(p) => write!(f, "{p} is not a supported prime characteristic"),
            RingError::DimensionTooSmall(n) => write!(f, "n = {n} is below the minimum of 3"),
            RingError::PrimeTooSmall { p, n } => {
                write!(f, "characteristic p = {p} violates p >= n - 1 for n = {n}")
            }
            RingError::DegreeTooLarge(d) => write!(f, "degree {d} exceeds the supported range"),
            RingError::NotBihomogeneous => write!(f, "polynomial is zero or not bihomogeneous"),
            RingError::Linear(e) => write!(f, "linear algebra failure: {e}"),
        }
    }
}

impl std::error::Error for RingError {}

impl From<FpError> for RingError {
    fn from(e: FpError) -> Self {
        RingError::Linear(e)
    }
}

// ---------------------------------------------------------------------------
// parameters
// ---------------------------------------------------------------------------

/// The pair (p, n): characteristic of the base field and the dimension of
/// each projective factor. Fields are public so that out-of-range inputs can
/// be constructed in tests; all validated entry points go through [`RingParams::new`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RingParams {
    pub p: u32,
    pub n: usize,
}

impl RingParams {
    pub fn new(p: u32, n: usize) -> Result<Self, RingError> {
        if p >= 256 || !fp::is_prime(p) {
            return Err(RingError::NotPrime(p));
        }
        if n < 3 {
            return Err(RingError::DimensionTooSmall(n));
        }
        if (p as usize) < n - 1 {
            return Err(RingError::PrimeTooSmall { p, n });
        }
        Ok(RingParams { p, n })
    }
}

/// Exponent vectors of the degree-d monomials in `vars` variables, in
/// descending lexicographic order (the pure power of the first variable
/// comes first).
pub fn exponents_desc(d: u32, vars: usize) -> Vec<Vec<u8>> {
    assert!(d <= u8::MAX as u32, "degree {d} out of exponent range");
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
    go(d as u8, vars, &mut Vec::new(), &mut out);
    out
}

/// C(top, k) for nonnegative arguments, 0 when top < k or top < 0.
pub(crate) fn binom(top: i64, k: u32) -> u64 {
    if top < 0 || (top as u64) < k as u64 {
        return 0;
    }
    let mut acc = 1u64;
    for i in 1..=k as u64 {
        acc = acc * (top as u64 - k as u64 + i) / i;
    }
    acc
}

// ---------------------------------------------------------------------------
// monomials and polynomials
// ---------------------------------------------------------------------------

/// A monomial x^xs y^ys of the bigraded polynomial ring. The derived order
/// compares the x-exponents lexicographically, then the y-exponents.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BiMonomial {
    pub xs: Vec<u8>,
    pub ys: Vec<u8>,
}

impl BiMonomial {
    pub fn bidegree(&self) -> (i64, i64) {
        (
            self.xs.iter().map(|&e| e as i64).sum(),
            self.ys.iter().map(|&e| e as i64).sum(),
        )
    }

    pub fn divisible_by_x0y0(&self) -> bool {
        self.xs[0] >= 1 && self.ys[0] >= 1
    }

    pub fn times(&self, other: &BiMonomial) -> BiMonomial {
        let add = |a: &[u8], b: &[u8]| {
            a.iter()
                .zip(b)
                .map(|(&u, &v)| u.checked_add(v).expect("exponent overflow"))
                .collect()
        };
        BiMonomial {
            xs: add(&self.xs, &other.xs),
            ys: add(&self.ys, &other.ys),
        }
    }
}

impl fmt::Display for BiMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut wrote = false;
        for (name, exps) in [("x", &self.xs), ("y", &self.ys)] {
            for (i, &e) in exps.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if wrote {
                    write!(f, "*")?;
                }
                wrote = true;
                if e == 1 {
                    write!(f, "{name}{i}")?;
                } else {
                    write!(f, "{name}{i}^{e}")?;
                }
            }
        }
        if !wrote {
            write!(f, "1")?;
        }
        Ok(())
    }
}

/// A polynomial over F_p in the bigraded variables, stored as a sorted term
/// map with nonzero coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BiPoly {
    p: u32,
    terms: BTreeMap<BiMonomial, u8>,
}

impl BiPoly {
    pub fn zero(p: u32) -> Self {
        BiPoly { p, terms: BTreeMap::new() }
    }

    pub fn monomial(p: u32, m: BiMonomial, coeff: u32) -> Self {
        let mut poly = BiPoly::zero(p);
        poly.add_term(m, coeff);
        poly
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BiMonomial, u8)> {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    fn add_term(&mut self, m: BiMonomial, coeff: u32) {
        let c = coeff % self.p;
        if c == 0 && !self.terms.contains_key(&m) {
            return;
        }
        let entry = self.terms.entry(m);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                if c != 0 {
                    v.insert(c as u8);
                }
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = (*o.get() as u32 + c) % self.p;
                if s == 0 {
                    o.remove();
                } else {
                    *o.get_mut() = s as u8;
                }
            }
        }
    }

    pub fn add(&self, other: &BiPoly) -> BiPoly {
        assert_eq!(self.p, other.p, "mixed characteristics");
        let mut out = self.clone();
        for (m, c) in other.terms() {
            out.add_term(m.clone(), c as u32);
        }
        out
    }

    pub fn scale(&self, c: u32) -> BiPoly {
        let c = c % self.p;
        let mut out = BiPoly::zero(self.p);
        if c == 0 {
            return out;
        }
        for (m, co) in self.terms() {
            out.add_term(m.clone(), co as u32 * c);
        }
        out
    }

    pub fn mul_monomial(&self, m: &BiMonomial) -> BiPoly {
        let mut out = BiPoly::zero(self.p);
        for (t, c) in self.terms() {
            out.add_term(t.times(m), c as u32);
        }
        out
    }

    pub fn mul(&self, other: &BiPoly) -> BiPoly {
        assert_eq!(self.p, other.p, "mixed characteristics");
        let mut out = BiPoly::zero(self.p);
        for (m1, c1) in self.terms() {
            for (m2, c2) in other.terms() {
                out.add_term(m1.times(m2), c1 as u32 * c2 as u32);
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> BiPoly {
        let mut acc: Option<BiPoly> = None;
        for _ in 0..e {
            acc = Some(match acc {
                None => self.clone(),
                Some(a) => a.mul(self),
            });
        }
        acc.unwrap_or_else(|| {
            // empty product: the constant 1 needs a variable count, which a
            // bare polynomial does not carry, so restrict pow to e >= 1
            panic!("pow requires a positive exponent")
        })
    }

    /// The common bidegree of all terms, or None when zero or mixed.
    pub fn bidegree(&self) -> Option<(i64, i64)> {
        let mut it = self.terms.keys();
        let first = it.next()?.bidegree();
        it.all(|m| m.bidegree() == first).then_some(first)
    }
}

impl fmt::Display for BiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            if c != 1 {
                write!(f, "{c}*")?;
            }
            write!(f, "{m}")?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// graded bases
// ---------------------------------------------------------------------------

/// The monomial basis of one graded piece R_(a,b), in descending
/// lexicographic order, with a reverse index.
pub struct BasisData {
    pub monos: Vec<BiMonomial>,
    index: HashMap<BiMonomial, usize>,
}

impl BasisData {
    fn build(monos: Vec<BiMonomial>) -> Self {
        let index = monos.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        BasisData { monos, index }
    }

    pub fn len(&self) -> usize {
        self.monos.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monos.is_empty()
    }

    pub fn index_of(&self, m: &BiMonomial) -> Option<usize> {
        self.index.get(m).copied()
    }
}

// ---------------------------------------------------------------------------
// the ring context
// ---------------------------------------------------------------------------

/// Computation context for R = S/(q): basis caching, normal forms, and
/// multiplication matrices between graded pieces.
pub struct Ring {
    params: RingParams,
    basis_cache: RwLock<HashMap<(i64, i64), Arc<BasisData>>>,
}

impl Ring {
    pub fn new(params: RingParams) -> Self {
        Ring {
            params,
            basis_cache: RwLock::new(HashMap::new()),
        }
    }

    pub fn params(&self) -> RingParams {
        self.params
    }

    pub fn p(&self) -> u32 {
        self.params.p
    }

    pub fn n(&self) -> usize {
        self.params.n
    }

    fn vars(&self) -> usize {
        self.params.n + 1
    }

    /// The variable x_i as a polynomial.
    pub fn x(&self, i: usize) -> BiPoly {
        assert!(i < self.vars());
        let mut xs = vec![0u8; self.vars()];
        xs[i] = 1;
        BiPoly::monomial(self.p(), BiMonomial { xs, ys: vec![0; self.vars()] }, 1)
    }

    /// The variable y_i as a polynomial.
    pub fn y(&self, i: usize) -> BiPoly {
        assert!(i < self.vars());
        let mut ys = vec![0u8; self.vars()];
        ys[i] = 1;
        BiPoly::monomial(self.p(), BiMonomial { xs: vec![0; self.vars()], ys }, 1)
    }

    /// The defining form q = sum_i x_i y_i.
    pub fn q(&self) -> BiPoly {
        let mut q = BiPoly::zero(self.p());
        for i in 0..self.vars() {
            q = q.add(&self.x(i).mul(&self.y(i)));
        }
        q
    }

    /// dim_k S_(a,b) for the ambient bigraded polynomial ring.
    pub fn dim_s(&self, a: i64, b: i64) -> u64 {
        if a < 0 || b < 0 {
            return 0;
        }
        let n = self.params.n as u32;
        binom(a + n as i64, n) * binom(b + n as i64, n)
    }

    /// dim_k R_(a,b), which counts monomials of bidegree (a,b) prime to x_0 y_0.
    pub fn dim_r(&self, a: i64, b: i64) -> u64 {
        self.dim_s(a, b) - self.dim_s(a - 1, b - 1)
    }

    /// The monomial basis of R_(a,b); empty for negative degrees.
    pub fn basis(&self, a: i64, b: i64) -> Result<Arc<BasisData>, RingError> {
        if let Some(hit) = self.basis_cache.read().expect("basis cache poisoned").get(&(a, b)) {
            return Ok(Arc::clone(hit));
        }
        let data = Arc::new(BasisData::build(self.enumerate_basis(a, b)?));
        debug_assert_eq!(data.len() as u64, self.dim_r(a, b), "basis count vs closed form");
        self.basis_cache
            .write()
            .expect("basis cache poisoned")
            .insert((a, b), Arc::clone(&data));
        Ok(data)
    }

    fn enumerate_basis(&self, a: i64, b: i64) -> Result<Vec<BiMonomial>, RingError> {
        if a < 0 || b < 0 {
            return Ok(Vec::new());
        }
        for d in [a, b] {
            if d > u8::MAX as i64 {
                return Err(RingError::DegreeTooLarge(d));
            }
        }
        let xs_list = exponents_desc(a as u32, self.vars());
        let ys_list = exponents_desc(b as u32, self.vars());
        let mut out = Vec::with_capacity(xs_list.len() * ys_list.len());
        for xs in &xs_list {
            for ys in &ys_list {
                if xs[0] >= 1 && ys[0] >= 1 {
                    continue;
                }
                out.push(BiMonomial { xs: xs.clone(), ys: ys.clone() });
            }
        }
        Ok(out)
    }

    /// Reduces a polynomial to its normal form modulo q, in which no term is
    /// divisible by x_0 y_0.
    pub fn normal_form(&self, f: &BiPoly) -> BiPoly {
        assert_eq!(f.p(), self.p(), "mixed characteristics");
        let p = self.p();
        let mut out = BiPoly::zero(p);
        let mut work: Vec<(BiMonomial, u32)> = f.terms().map(|(m, c)| (m.clone(), c as u32)).collect();
        while let Some((m, c)) = work.pop() {
            debug_assert_eq!(m.xs.len(), self.vars(), "monomial arity mismatch");
            if !m.divisible_by_x0y0() {
                out.add_term(m, c);
                continue;
            }
            let mut base = m;
            base.xs[0] -= 1;
            base.ys[0] -= 1;
            let neg = (p - 1) * c % p;
            if neg == 0 {
                continue;
            }
            for i in 1..self.vars() {
                let mut t = base.clone();
                t.xs[i] += 1;
                t.ys[i] += 1;
                work.push((t, neg));
            }
        }
        out
    }

    /// Coordinates of a normal-form polynomial in the given graded basis.
    pub fn poly_to_vec(&self, f: &BiPoly, basis: &BasisData) -> Option<Vec<u8>> {
        let mut v = vec![0u8; basis.len()];
        for (m, c) in f.terms() {
            v[basis.index_of(m)?] = c;
        }
        Some(v)
    }

    pub fn vec_to_poly(&self, v: &[u8], basis: &BasisData) -> BiPoly {
        assert_eq!(v.len(), basis.len(), "coordinate length mismatch");
        let mut f = BiPoly::zero(self.p());
        for (i, &c) in v.iter().enumerate() {
            if c != 0 {
                f.add_term(basis.monos[i].clone(), c as u32);
            }
        }
        f
    }

    /// The matrix of multiplication by a bihomogeneous g, as a map
    /// R_(a,b) -> R_(a+da, b+db). Columns index the source basis.
    pub fn mult_matrix(&self, g: &BiPoly, a: i64, b: i64) -> Result<FpMatrix, RingError> {
        let (da, db) = g.bidegree().ok_or(RingError::NotBihomogeneous)?;
        let src = self.basis(a, b)?;
        let tgt = self.basis(a + da, b + db)?;
        let mut mat = FpMatrix::zero(self.p(), tgt.len(), src.len())?;
        for (j, mono) in src.monos.iter().enumerate() {
            let prod = self.normal_form(&g.mul_monomial(mono));
            for (t, c) in prod.terms() {
                let r = tgt
                    .index_of(t)
                    .expect("normal form must land in the target basis");
                mat.add_at(r, j, c as u32);
            }
        }
        Ok(mat)
    }
}

// ---------------------------------------------------------------------------
// tests
// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r23() -> Ring {
        Ring::new(RingParams::new(2, 3).unwrap())
    }

    #[test]
    fn params_validation() {
        assert!(RingParams::new(2, 3).is_ok());
        assert!(RingParams::new(7, 7).is_ok());
        assert!(matches!(RingParams::new(4, 3), Err(RingError::NotPrime(4))));
        assert!(matches!(RingParams::new(2, 2), Err(RingError::DimensionTooSmall(2))));
        assert!(matches!(
            RingParams::new(2, 4),
            Err(RingError::PrimeTooSmall { p: 2, n: 4 })
        ));
        assert!(RingParams::new(3, 4).is_ok());
    }

    #[test]
    fn ambient_dimensions() {
        let r = r23();
        assert_eq!(r.dim_s(1, 1), 16);
        assert_eq!(r.dim_s(0, 2), 10);
        assert_eq!(r.dim_s(1, 9), 880);
        assert_eq!(r.dim_s(-1, 3), 0);
        assert_eq!(r.dim_s(0, 0), 1);
    }

    #[test]
    fn quotient_dimensions() {
        let r = r23();
        assert_eq!(r.dim_r(1, 1), 15);
        assert_eq!(r.dim_r(1, 5), 189);
        assert_eq!(r.dim_r(1, 7), 396);
        assert_eq!(r.dim_r(1, 9), 715);
        assert_eq!(r.dim_r(0, 0), 1);
        assert_eq!(r.dim_r(0, 2), 10);
        assert_eq!(r.dim_r(-2, 5), 0);
    }

    #[test]
    fn basis_order_and_content() {
        let r = r23();
        let b = r.basis(1, 1).unwrap();
        assert_eq!(b.len(), 15);
        // descending lex: x_0 y_0 is excluded, so x_0 y_1 leads
        assert_eq!(
            b.monos[0],
            BiMonomial { xs: vec![1, 0, 0, 0], ys: vec![0, 1, 0, 0] }
        );
        assert!(b.monos.iter().all(|m| !m.divisible_by_x0y0()));
        assert!(b
            .index_of(&BiMonomial { xs: vec![1, 0, 0, 0], ys: vec![1, 0, 0, 0] })
            .is_none());
        for (i, m) in b.monos.iter().enumerate() {
            assert_eq!(b.index_of(m), Some(i));
        }
        // within fixed x-part the y-part strictly descends
        for w in b.monos.windows(2) {
            assert!(w[0] > w[1], "basis must strictly descend");
        }
    }

    #[test]
    fn basis_counts_match_closed_form() {
        let r = r23();
        for a in -2..=4i64 {
            for b in -2..=6i64 {
                assert_eq!(r.basis(a, b).unwrap().len() as u64, r.dim_r(a, b), "({a},{b})");
            }
        }
    }

    #[test]
    fn normal_form_of_x0y0() {
        let r = r23();
        let m = BiMonomial { xs: vec![1, 0, 0, 0], ys: vec![1, 0, 0, 0] };
        let nf = r.normal_form(&BiPoly::monomial(2, m, 1));
        let expected = r
            .x(1)
            .mul(&r.y(1))
            .add(&r.x(2).mul(&r.y(2)))
            .add(&r.x(3).mul(&r.y(3)));
        assert_eq!(nf, expected);
    }

    #[test]
    fn normal_form_kills_q_and_frobenius_power() {
        for (p, n) in [(2u32, 3usize), (3, 3), (5, 4)] {
            let r = Ring::new(RingParams::new(p, n).unwrap());
            assert!(r.normal_form(&r.q()).is_zero(), "q at p={p}, n={n}");
            assert!(r.normal_form(&r.q().pow(p)).is_zero(), "q^p at p={p}, n={n}");
            // freshman's dream: sum_i x_i^p y_i^p = q^p in characteristic p
            let mut frob = BiPoly::zero(p);
            for i in 0..=n {
                frob = frob.add(&r.x(i).pow(p).mul(&r.y(i).pow(p)));
            }
            assert!(r.normal_form(&frob).is_zero(), "sum x_i^p y_i^p at p={p}, n={n}");
        }
    }

    #[test]
    fn mult_matrix_by_one_variable() {
        let r = r23();
        // y_0^2 : R_(0,0) -> R_(0,2) hits the single basis monomial y_0^2
        let g = r.y(0).pow(2);
        let m = r.mult_matrix(&g, 0, 0).unwrap();
        assert_eq!((m.rows(), m.cols()), (10, 1));
        let tgt = r.basis(0, 2).unwrap();
        let y0sq = BiMonomial { xs: vec![0; 4], ys: vec![2, 0, 0, 0] };
        let hit = tgt.index_of(&y0sq).unwrap();
        for row in 0..10 {
            assert_eq!(m.get(row, 0), u8::from(row == hit));
        }
    }

    #[test]
    fn mult_matrix_rejects_inhomogeneous() {
        let r = r23();
        let g = r.x(0).add(&r.y(0));
        assert!(matches!(r.mult_matrix(&g, 0, 0), Err(RingError::NotBihomogeneous)));
        assert!(matches!(
            r.mult_matrix(&BiPoly::zero(2), 0, 0),
            Err(RingError::NotBihomogeneous)
        ));
    }

    #[test]
    fn mult_matrix_composes() {
        // multiplication by x_1 then x_2 equals multiplication by x_1 x_2
        let r = Ring::new(RingParams::new(3, 3).unwrap());
        let a = r.mult_matrix(&r.x(1), 1, 1).unwrap();
        let b = r.mult_matrix(&r.x(2), 2, 1).unwrap();
        let direct = r.mult_matrix(&r.x(1).mul(&r.x(2)), 1, 1).unwrap();
        assert_eq!(b.mul(&a).unwrap(), direct);
    }

    #[test]
    fn degree_cap_enforced() {
        let r = r23();
        assert!(matches!(r.basis(300, 0), Err(RingError::DegreeTooLarge(300))));
    }

    fn arb_poly(p: u32, n: usize) -> impl Strategy<Value = BiPoly> {
        let mono = (
            proptest::collection::vec(0u8..3, n + 1),
            proptest::collection::vec(0u8..3, n + 1),
            1u32..p.max(2),
        );
        proptest::collection::vec(mono, 0..6).prop_map(move |terms| {
            let mut f = BiPoly::zero(p);
            for (xs, ys, c) in terms {
                f = f.add(&BiPoly::monomial(p, BiMonomial { xs, ys }, c));
            }
            f
        })
    }

    proptest! {
        #[test]
        fn normal_form_idempotent(f in arb_poly(3, 3)) {
            let r = Ring::new(RingParams::new(3, 3).unwrap());
            let nf = r.normal_form(&f);
            prop_assert_eq!(r.normal_form(&nf.clone()), nf.clone());
            prop_assert!(nf.terms().all(|(m, _)| !m.divisible_by_x0y0()));
        }

        #[test]
        fn normal_form_additive(f in arb_poly(2, 3), g in arb_poly(2, 3)) {
            let r = r23();
            let lhs = r.normal_form(&f.add(&g));
            let rhs = r.normal_form(&f).add(&r.normal_form(&g));
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn multiples_of_q_vanish(f in arb_poly(5, 4)) {
            let r = Ring::new(RingParams::new(5, 4).unwrap());
            prop_assert!(r.normal_form(&r.q().mul(&f)).is_zero());
        }
    }
}
