//! Decodes arbitrary bytes into a small F_p matrix and checks the linear
//! algebra kernel's invariants: rank bounds, transpose invariance,
//! rank-nullity, kernel annihilation, and rref stability.

#![no_main]

use conecert::fp::FpMatrix;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let mut it = data.iter().copied();
    let (Some(sel), Some(r), Some(c)) = (it.next(), it.next(), it.next()) else {
        return;
    };
    let p = [2u32, 3, 5, 7][(sel % 4) as usize];
    let rows = (r % 24) as usize;
    let cols = (c % 24) as usize;
    let mut m = FpMatrix::zero(p, rows, cols).unwrap();
    'fill: for r in 0..rows {
        for c in 0..cols {
            match it.next() {
                Some(v) => m.set(r, c, (v as u32 % p) as u8),
                None => break 'fill,
            }
        }
    }
    let rank = m.rank();
    assert!(rank <= rows.min(cols), "rank bound");
    assert_eq!(rank, m.transpose().rank(), "rank is transpose invariant");
    let kernel = m.kernel();
    assert_eq!(kernel.dim(), cols - rank, "rank-nullity");
    if kernel.dim() > 0 {
        let prod = m.mul(&kernel.basis().transpose()).unwrap();
        assert!(prod.is_zero(), "kernel vectors are annihilated");
    }
    let (rref, pivots) = m.rref();
    assert_eq!(pivots.len(), rank, "one pivot per rank");
    assert_eq!(rref.rank(), rank, "rref preserves rank");
});
