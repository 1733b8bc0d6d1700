//! Affine linear forms in `z_1..z_nz`, auxiliary `w_1..w_nw`, and `h`.
//!
//! These are the only denominators that ever appear in R-matrix and residue
//! bookkeeping, so keeping them as first-class objects lets all cancellation
//! happen by multiset matching and trial division, with no general GCDs.

use std::cmp::Ordering;
use std::fmt;

use num::{One, Signed, Zero};

use super::poly::{format_rat, Exponent, Poly, Rat};

/// A nonzero affine form `sum a_i z_i + sum b_k w_k + c_h h + c_0`,
/// normalized so the first nonzero coefficient (scanning z, w, h, constant)
/// equals one. The scale factor extracted by normalization is returned at
/// construction and owned by the caller (usually a `FactoredRatio` scalar).
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct LinForm {
    pub z: Vec<Rat>,
    pub w: Vec<Rat>,
    pub h: Rat,
    pub c: Rat,
}

/// Outcome of substituting into a linear form.
pub enum FormSubst {
    /// The form vanished identically.
    Zero,
    /// The form collapsed to a nonzero constant.
    Scalar(Rat),
    /// Still a proper form, with the extracted normalization scale.
    Form(Rat, LinForm),
}

impl LinForm {
    /// Build and normalize. Returns `None` if all coefficients are zero,
    /// otherwise the extracted scale `s` and the normalized form `L` with
    /// original = `s * L`.
    pub fn new(z: Vec<Rat>, w: Vec<Rat>, h: Rat, c: Rat) -> Option<(Rat, LinForm)> {
        let lead = z
            .iter()
            .chain(w.iter())
            .chain(std::iter::once(&h))
            .chain(std::iter::once(&c))
            .find(|v| !v.is_zero())
            .cloned()?;
        let inv = Rat::one() / &lead;
        let form = LinForm {
            z: z.iter().map(|v| v * &inv).collect(),
            w: w.iter().map(|v| v * &inv).collect(),
            h: &h * &inv,
            c: &c * &inv,
        };
        Some((lead, form))
    }

    /// `z_i - z_j + k*h` in a ring with `nz` z-variables and `nw` w's.
    pub fn z_diff(nz: usize, nw: usize, i: usize, j: usize, k: i64) -> LinForm {
        let mut z = vec![Rat::zero(); nz];
        z[i - 1] = Rat::one();
        z[j - 1] -= Rat::one();
        LinForm { z, w: vec![Rat::zero(); nw], h: Rat::from_integer(k.into()), c: Rat::zero() }
    }

    /// `w_k + sum a_i z_i + ch*h` (coefficient of `w_k` is one).
    pub fn w_plus(nz: usize, nw: usize, k: usize, z_coeffs: &[(usize, i64)], ch: i64) -> LinForm {
        let mut z = vec![Rat::zero(); nz];
        for &(i, a) in z_coeffs {
            z[i - 1] += Rat::from_integer(a.into());
        }
        let mut w = vec![Rat::zero(); nw];
        w[k - 1] = Rat::one();
        LinForm { z, w, h: Rat::from_integer(ch.into()), c: Rat::zero() }
    }

    pub fn nz(&self) -> usize {
        self.z.len()
    }

    pub fn nw(&self) -> usize {
        self.w.len()
    }

    /// As a polynomial in the widened ring with `nz + nw` z-slots
    /// (w-variables occupy the trailing slots).
    pub fn to_poly(&self) -> Poly {
        let m = self.nz() + self.nw();
        let mut p = Poly::zero(m);
        for (i, a) in self.z.iter().enumerate() {
            if !a.is_zero() {
                p.add_term(Exponent::var(m, i + 1), a.clone());
            }
        }
        for (k, b) in self.w.iter().enumerate() {
            if !b.is_zero() {
                p.add_term(Exponent::var(m, self.nz() + k + 1), b.clone());
            }
        }
        if !self.h.is_zero() {
            p.add_term(Exponent::hvar(m), self.h.clone());
        }
        if !self.c.is_zero() {
            p.add_term(Exponent::constant(m), self.c.clone());
        }
        p
    }

    /// Substitute `w_k = target` (target must not involve `w_k` itself).
    pub fn subst_w(&self, k: usize, target: &LinForm) -> FormSubst {
        debug_assert!(target.w[k - 1].is_zero());
        let coef = self.w[k - 1].clone();
        let mut z = self.z.clone();
        let mut w = self.w.clone();
        let mut h = self.h.clone();
        let mut c = self.c.clone();
        w[k - 1] = Rat::zero();
        if !coef.is_zero() {
            for i in 0..z.len() {
                z[i] += &coef * &target.z[i];
            }
            for j in 0..w.len() {
                w[j] += &coef * &target.w[j];
            }
            h += &coef * &target.h;
            c += &coef * &target.c;
        }
        if z.iter().chain(w.iter()).all(|v| v.is_zero()) && h.is_zero() {
            return if c.is_zero() { FormSubst::Zero } else { FormSubst::Scalar(c) };
        }
        let (s, form) = LinForm::new(z, w, h, c).expect("nonzero");
        FormSubst::Form(s, form)
    }

    /// Coefficient of `w_k`.
    pub fn w_coeff(&self, k: usize) -> &Rat {
        &self.w[k - 1]
    }

    /// For a form with nonzero `w_k`-coefficient `a`, the root as
    /// `w_k = -(rest)/a`, returned as a form with zero `w_k` entry.
    pub fn solve_for_w(&self, k: usize) -> LinForm {
        let a = &self.w[k - 1];
        assert!(!a.is_zero());
        let neg_inv = -(Rat::one() / a);
        let mut z: Vec<Rat> = self.z.iter().map(|v| v * &neg_inv).collect();
        let mut w: Vec<Rat> = self.w.iter().map(|v| v * &neg_inv).collect();
        w[k - 1] = Rat::zero();
        let _ = &mut z;
        LinForm { z, w, h: &self.h * &neg_inv, c: &self.c * &neg_inv }
    }

    /// True when the form involves `w_k`.
    pub fn involves_w(&self, k: usize) -> bool {
        !self.w[k - 1].is_zero()
    }
}

impl Ord for LinForm {
    fn cmp(&self, other: &Self) -> Ordering {
        self.z
            .cmp(&other.z)
            .then_with(|| self.w.cmp(&other.w))
            .then_with(|| self.h.cmp(&other.h))
            .then_with(|| self.c.cmp(&other.c))
    }
}

impl PartialOrd for LinForm {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for LinForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        let mut emit = |fm: &mut fmt::Formatter<'_>, coef: &Rat, name: String| -> fmt::Result {
            if coef.is_zero() {
                return Ok(());
            }
            let neg = coef.is_negative();
            let mag = coef.abs();
            if first {
                if neg {
                    write!(fm, "-")?;
                }
                first = false;
            } else if neg {
                write!(fm, "-")?;
            } else {
                write!(fm, "+")?;
            }
            if name.is_empty() {
                write!(fm, "{}", format_rat(&mag))
            } else if mag.is_one() {
                write!(fm, "{}", name)
            } else {
                write!(fm, "{}*{}", format_rat(&mag), name)
            }
        };
        for (i, a) in self.z.iter().enumerate() {
            emit(f, a, format!("z{}", i + 1))?;
        }
        for (k, b) in self.w.iter().enumerate() {
            emit(f, b, format!("w{}", k + 1))?;
        }
        let h = self.h.clone();
        emit(f, &h, "h".to_string())?;
        let c = self.c.clone();
        emit(f, &c, String::new())?;
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::poly::rint;

    #[test]
    fn normalization_leading_positive() {
        let (s, f) = LinForm::new(vec![rint(-2), rint(2)], vec![], rint(-2), rint(0)).unwrap();
        assert_eq!(s, rint(-2));
        assert_eq!(f.z, vec![rint(1), rint(-1)]);
        assert_eq!(f.h, rint(1));
    }

    #[test]
    fn subst_w_cancels_and_shifts() {
        // h + w1 - z2 under w1 = z2 - h  vanishes
        let form = LinForm::w_plus(2, 1, 1, &[(2, -1)], 1);
        let target = LinForm {
            z: vec![rint(0), rint(1)],
            w: vec![rint(0)],
            h: rint(-1),
            c: rint(0),
        };
        match form.subst_w(1, &target) {
            FormSubst::Zero => {}
            _ => panic!("expected zero"),
        }
    }
}
