//! Divisor-class arithmetic on Pic(X) = Z^3.
//!
//! A class (a, b; c) denotes pi^* O_Y(a,b) tensor O_pi(c) on the bundle
//! X = P(F^* G'). The module derives the dualizing classes by formal rewrite
//! rules (determinant additivity across short exact sequences, the relative
//! canonical formula of a projective bundle) so the certificate layer can
//! show why each class is what it is, with the closed form checked against
//! the derivation at runtime.

use std::fmt;

#[derive(Debug, PartialEq, Eq)]
pub enum PicError {
    InvalidParams { p: u32, n: usize },
}

impl fmt::Display for PicError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PicError::InvalidParams { p, n } => {
                write!(f, "parameters out of range: need p >= n-1 >= 2, got p = {p}, n = {n}")
            }
        }
    }
}

impl std::error::Error for PicError {}

/// A divisor class pi^* O_Y(a,b) tensor O_pi(c); c = 0 classes are pullbacks
/// from Y.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PicClass {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl PicClass {
    pub fn new(a: i64, b: i64, c: i64) -> PicClass {
        PicClass { a, b, c }
    }

    pub fn zero() -> PicClass {
        PicClass { a: 0, b: 0, c: 0 }
    }

    pub fn add(self, other: PicClass) -> PicClass {
        PicClass {
            a: self.a + other.a,
            b: self.b + other.b,
            c: self.c + other.c,
        }
    }

    pub fn neg(self) -> PicClass {
        PicClass {
            a: -self.a,
            b: -self.b,
            c: -self.c,
        }
    }

    pub fn scale(self, m: i64) -> PicClass {
        PicClass {
            a: m * self.a,
            b: m * self.b,
            c: m * self.c,
        }
    }
}

impl fmt::Display for PicClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}; {})", self.a, self.b, self.c)
    }
}

/// One rewrite step of a class derivation.
pub struct RuleStep {
    pub rule: String,
    pub class: PicClass,
}

/// A derived class with its rewrite trace and the ambient dimensions.
pub struct Derivation {
    pub class: PicClass,
    pub steps: Vec<RuleStep>,
    pub dim_x: usize,
    pub dim_y: usize,
}

fn check_params(p: u32, n: usize) -> Result<(), PicError> {
    if n >= 3 && p as usize >= n - 1 {
        Ok(())
    } else {
        Err(PicError::InvalidParams { p, n })
    }
}

pub fn dim_x(n: usize) -> usize {
    3 * n - 3
}

pub fn dim_y(n: usize) -> usize {
    2 * n - 1
}

/// omega_Y = O_Y(-n,-n) by adjunction from omega_W = O(-n-1,-n-1) and
/// Y in |O_W(1,1)|.
pub fn omega_y(n: usize) -> Result<Derivation, PicError> {
    if n < 2 {
        return Err(PicError::InvalidParams { p: 0, n });
    }
    let nl = n as i64;
    let omega_w = PicClass::new(-nl - 1, -nl - 1, 0);
    let class = omega_w.add(PicClass::new(1, 1, 0));
    let steps = vec![
        RuleStep {
            rule: format!("omega_W = O({}, {})", -nl - 1, -nl - 1),
            class: omega_w,
        },
        RuleStep {
            rule: "adjunction along Y in |O_W(1,1)|".into(),
            class,
        },
    ];
    debug_assert_eq!(class, PicClass::new(-nl, -nl, 0));
    Ok(Derivation {
        class,
        steps,
        dim_x: if n >= 2 { dim_x(n) } else { 0 },
        dim_y: dim_y(n),
    })
}

/// omega_X derived by the determinant rewrite chain, then checked against
/// the closed form (p-n, p(n-2)-n; -n+1).
pub fn omega_x(p: u32, n: usize) -> Result<Derivation, PicError> {
    check_params(p, n)?;
    let pl = p as i64;
    let nl = n as i64;
    let rank_g = nl - 1;

    let det_fb = PicClass::new(0, -pl, 0);
    let det_fg = det_fb.add(PicClass::new(pl, 0, 0));
    let det_fgp = det_fg.add(PicClass::new(0, pl, 0).scale(rank_g));
    let relative = PicClass::new(0, 0, -rank_g).add(det_fgp);
    let omega_y_class = omega_y(n)?.class;
    let class = relative.add(omega_y_class);

    let steps = vec![
        RuleStep {
            rule: format!("det F*B = (0,-{p};0) from 0 -> F*B -> O^{} -> O(0,{p}) -> 0", n + 1),
            class: det_fb,
        },
        RuleStep {
            rule: format!("det F*G = det F*B - ({},0;0) from 0 -> O(-{p},0) -> F*B -> F*G -> 0", -pl),
            class: det_fg,
        },
        RuleStep {
            rule: format!("det F*G' = det F*G + rank(F*G) . (0,{p};0), rank = {rank_g}"),
            class: det_fgp,
        },
        RuleStep {
            rule: format!("relative canonical of P(F*G'): O_pi(-{rank_g}) + pi* det F*G'"),
            class: relative,
        },
        RuleStep {
            rule: "tensor with pi* omega_Y".into(),
            class,
        },
    ];

    let closed = PicClass::new(pl - nl, pl * (nl - 2) - nl, -nl + 1);
    assert_eq!(class, closed, "derived omega_X must equal the closed form");
    Ok(Derivation {
        class,
        steps,
        dim_x: dim_x(n),
        dim_y: dim_y(n),
    })
}

/// True iff the class matches the cited very-ample pattern (1,1;q), q > 0.
/// The pattern itself is assumed by citation, not machine-proved.
pub fn very_ample_pattern(c: PicClass) -> bool {
    c.a == 1 && c.b == 1 && c.c > 0
}

/// Fano witness: the anticanonical class matches the very-ample pattern.
pub struct FanoWitness {
    pub anticanonical: PicClass,
    pub fano: bool,
    pub trace: Vec<RuleStep>,
}

pub fn fano_witness(p: u32, n: usize) -> Result<FanoWitness, PicError> {
    let omega = omega_x(p, n)?;
    let anticanonical = omega.class.neg();
    let fano = very_ample_pattern(anticanonical);
    let mut trace = omega.steps;
    trace.push(RuleStep {
        rule: "negate omega_X".into(),
        class: anticanonical,
    });
    Ok(FanoWitness {
        anticanonical,
        fano,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn omega_y_values() {
        assert_eq!(omega_y(3).unwrap().class, PicClass::new(-3, -3, 0));
        assert_eq!(omega_y(4).unwrap().class, PicClass::new(-4, -4, 0));
        assert!(matches!(omega_y(1), Err(PicError::InvalidParams { .. })));
    }

    #[test]
    fn omega_x_closed_form_instances() {
        assert_eq!(omega_x(2, 3).unwrap().class, PicClass::new(-1, -1, -2));
        assert_eq!(omega_x(3, 3).unwrap().class, PicClass::new(0, 0, -2));
        assert_eq!(omega_x(3, 4).unwrap().class, PicClass::new(-1, 2, -3));
        assert!(matches!(omega_x(2, 4), Err(PicError::InvalidParams { .. })));
        assert!(matches!(omega_x(5, 2), Err(PicError::InvalidParams { .. })));
    }

    #[test]
    fn omega_x_derivation_sweep() {
        for n in 3..=7usize {
            for p in (n as u32 - 1)..=7 {
                let d = omega_x(p, n).unwrap();
                assert_eq!(d.dim_x, 3 * n - 3);
                assert_eq!(d.dim_y, 2 * n - 1);
                assert_eq!(d.steps.len(), 5);
                assert_eq!(d.steps.last().unwrap().class, d.class);
            }
        }
    }

    #[test]
    fn group_law() {
        let w = omega_x(2, 3).unwrap().class;
        assert_eq!(w.add(w.neg()), PicClass::zero());
        assert_eq!(w.scale(-2), PicClass::new(2, 2, 4));
        assert_eq!(w.to_string(), "(-1, -1; -2)");
    }

    #[test]
    fn very_ample_pattern_cases() {
        assert!(very_ample_pattern(PicClass::new(1, 1, 2)));
        assert!(!very_ample_pattern(PicClass::new(1, 1, 0)));
        assert!(!very_ample_pattern(PicClass::new(2, 1, 1)));
    }

    #[test]
    fn fano_witness_cases() {
        let w = fano_witness(2, 3).unwrap();
        assert!(w.fano);
        assert_eq!(w.anticanonical, PicClass::new(1, 1, 2));
        assert!(!fano_witness(3, 3).unwrap().fano);
        assert!(!fano_witness(3, 4).unwrap().fano);
    }
}
