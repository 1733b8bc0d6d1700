//! Scalar multiples of products of linear forms divided by products of
//! linear forms, with an optional unfactored polynomial part.
//!
//! Addition goes through a common denominator and expands numerators into
//! the polynomial part; `cancel` then recovers factors by trial division.
//! Every object arising in R-matrix chains and iterated residues stays in
//! this class, so exactness never requires a general multivariate GCD.

use std::collections::BTreeMap;

use num::{One, Zero};

use super::linform::{FormSubst, LinForm};
use super::poly::{Poly, PolyError, Rat};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FactoredRatio {
    nz: usize,
    nw: usize,
    scalar: Rat,
    numer: BTreeMap<LinForm, u32>,
    denom: BTreeMap<LinForm, u32>,
    /// Unfactored numerator part, in the widened ring with `nz + nw` slots.
    extra: Poly,
}

impl FactoredRatio {
    pub fn zero(nz: usize, nw: usize) -> Self {
        FactoredRatio {
            nz,
            nw,
            scalar: Rat::zero(),
            numer: BTreeMap::new(),
            denom: BTreeMap::new(),
            extra: Poly::one(nz + nw),
        }
    }

    pub fn from_scalar(nz: usize, nw: usize, s: Rat) -> Self {
        let mut r = FactoredRatio::zero(nz, nw);
        r.scalar = s;
        r
    }

    pub fn one(nz: usize, nw: usize) -> Self {
        FactoredRatio::from_scalar(nz, nw, Rat::one())
    }

    /// Wrap a polynomial of the base ring (`nz` z-variables) as a ratio.
    pub fn from_poly(nz: usize, nw: usize, p: &Poly) -> Self {
        assert_eq!(p.n(), nz);
        let mut r = FactoredRatio::one(nz, nw);
        if p.is_zero() {
            return FactoredRatio::zero(nz, nw);
        }
        r.extra = p.widen(nz + nw);
        r.cancel();
        r
    }

    pub fn nz(&self) -> usize {
        self.nz
    }

    pub fn is_zero(&self) -> bool {
        self.scalar.is_zero()
    }

    pub fn scalar(&self) -> &Rat {
        &self.scalar
    }

    pub fn numer_factors(&self) -> impl Iterator<Item = (&LinForm, u32)> {
        self.numer.iter().map(|(f, &m)| (f, m))
    }

    pub fn denom_factors(&self) -> impl Iterator<Item = (&LinForm, u32)> {
        self.denom.iter().map(|(f, &m)| (f, m))
    }

    pub fn extra_numer(&self) -> &Poly {
        &self.extra
    }

    fn add_factor(map: &mut BTreeMap<LinForm, u32>, f: LinForm, m: u32) {
        if m == 0 {
            return;
        }
        *map.entry(f).or_insert(0) += m;
    }

    pub fn mul_scalar(&mut self, s: &Rat) {
        self.scalar *= s;
        if self.scalar.is_zero() {
            *self = FactoredRatio::zero(self.nz, self.nw);
        }
    }

    /// Multiply by a raw linear form (normalizing scale folded into scalar).
    pub fn mul_linform_numer(&mut self, z: Vec<Rat>, w: Vec<Rat>, h: Rat, c: Rat) {
        if self.is_zero() {
            return;
        }
        match LinForm::new(z, w, h, c) {
            None => *self = FactoredRatio::zero(self.nz, self.nw),
            Some((s, form)) => {
                self.scalar *= s;
                self.push_numer(form, 1);
            }
        }
    }

    pub fn mul_linform_denom(&mut self, z: Vec<Rat>, w: Vec<Rat>, h: Rat, c: Rat) {
        if self.is_zero() {
            return;
        }
        let (s, form) = LinForm::new(z, w, h, c).expect("denominator form must be nonzero");
        self.scalar /= s;
        self.push_denom(form, 1);
    }

    pub fn push_numer(&mut self, f: LinForm, mult: u32) {
        if self.is_zero() {
            return;
        }
        // cancel against the denominator first
        let mut mult = mult;
        if let Some(dm) = self.denom.get_mut(&f) {
            let k = (*dm).min(mult);
            *dm -= k;
            mult -= k;
            if *dm == 0 {
                self.denom.remove(&f);
            }
        }
        Self::add_factor(&mut self.numer, f, mult);
    }

    pub fn push_denom(&mut self, f: LinForm, mult: u32) {
        if self.is_zero() {
            return;
        }
        let mut mult = mult;
        if let Some(nm) = self.numer.get_mut(&f) {
            let k = (*nm).min(mult);
            *nm -= k;
            mult -= k;
            if *nm == 0 {
                self.numer.remove(&f);
            }
        }
        Self::add_factor(&mut self.denom, f, mult);
    }

    /// Restore the class invariants: no shared numerator/denominator forms,
    /// the polynomial part trial-divided by every denominator form, constant
    /// or linear polynomial parts folded into scalar and factor list.
    pub fn cancel(&mut self) {
        if self.is_zero() {
            return;
        }
        if self.extra.is_zero() {
            *self = FactoredRatio::zero(self.nz, self.nw);
            return;
        }
        // multiset cancellation
        let denom_keys: Vec<LinForm> = self.denom.keys().cloned().collect();
        for f in denom_keys {
            if let Some(nm) = self.numer.get_mut(&f) {
                let dm = self.denom.get_mut(&f).unwrap();
                let k = (*nm).min(*dm);
                *nm -= k;
                *dm -= k;
                if *nm == 0 {
                    self.numer.remove(&f);
                }
                if *dm == 0 {
                    self.denom.remove(&f);
                }
            }
        }
        // trial-divide the polynomial part by remaining denominator forms
        let denom_keys: Vec<LinForm> = self.denom.keys().cloned().collect();
        for f in denom_keys {
            let fp = f.to_poly();
            loop {
                let m = match self.denom.get(&f) {
                    Some(&m) if m > 0 => m,
                    _ => break,
                };
                match self.extra.exact_div(&fp) {
                    Ok(q) => {
                        self.extra = q;
                        if m == 1 {
                            self.denom.remove(&f);
                        } else {
                            self.denom.insert(f.clone(), m - 1);
                        }
                    }
                    Err(_) => break,
                }
            }
        }
        // fold degenerate polynomial parts back into factored data
        match self.extra.total_degree() {
            None => {
                *self = FactoredRatio::zero(self.nz, self.nw);
            }
            Some(0) => {
                self.scalar *= self.extra.constant_coeff();
                self.extra = Poly::one(self.nz + self.nw);
            }
            Some(1) => {
                let m = self.nz + self.nw;
                let mut zc = vec![Rat::zero(); m];
                let mut hc = Rat::zero();
                let mut cc = Rat::zero();
                for (e, c) in self.extra.terms() {
                    if e.is_constant() {
                        cc = c.clone();
                    } else if e.h == 1 {
                        hc = c.clone();
                    } else {
                        let i = e.z.iter().position(|&p| p == 1).unwrap();
                        zc[i] = c.clone();
                    }
                }
                let (s, form) = LinForm::new(
                    zc[..self.nz].to_vec(),
                    zc[self.nz..].to_vec(),
                    hc,
                    cc,
                )
                .expect("nonzero");
                self.scalar *= s;
                self.extra = Poly::one(m);
                self.push_numer(form, 1);
            }
            _ => {}
        }
        if self.scalar.is_zero() {
            *self = FactoredRatio::zero(self.nz, self.nw);
        }
    }

    /// Numerator as a fully expanded polynomial (scalar * factors * extra).
    fn numer_poly(&self) -> Poly {
        let mut p = self.extra.scalar_mul(&self.scalar);
        for (f, mult) in &self.numer {
            let fp = f.to_poly();
            for _ in 0..*mult {
                p = &p * &fp;
            }
        }
        p
    }

    pub fn add(&self, other: &FactoredRatio) -> FactoredRatio {
        assert_eq!((self.nz, self.nw), (other.nz, other.nw));
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        // common denominator: per-form max multiplicity
        let mut common: BTreeMap<LinForm, u32> = self.denom.clone();
        for (f, &m) in &other.denom {
            let e = common.entry(f.clone()).or_insert(0);
            *e = (*e).max(m);
        }
        let scale = |r: &FactoredRatio| -> Poly {
            let mut p = r.numer_poly();
            for (f, &cm) in &common {
                let have = r.denom.get(f).copied().unwrap_or(0);
                if cm > have {
                    let fp = f.to_poly();
                    for _ in 0..(cm - have) {
                        p = &p * &fp;
                    }
                }
            }
            p
        };
        let total = &scale(self) + &scale(other);
        let mut out = FactoredRatio {
            nz: self.nz,
            nw: self.nw,
            scalar: Rat::one(),
            numer: BTreeMap::new(),
            denom: common,
            extra: total,
        };
        if out.extra.is_zero() {
            return FactoredRatio::zero(self.nz, self.nw);
        }
        out.cancel();
        out
    }

    pub fn mul(&self, other: &FactoredRatio) -> FactoredRatio {
        assert_eq!((self.nz, self.nw), (other.nz, other.nw));
        if self.is_zero() || other.is_zero() {
            return FactoredRatio::zero(self.nz, self.nw);
        }
        let mut out = self.clone();
        out.scalar *= &other.scalar;
        for (f, &mult) in &other.numer {
            out.push_numer(f.clone(), mult);
        }
        for (f, &mult) in &other.denom {
            out.push_denom(f.clone(), mult);
        }
        if !other.extra.total_degree().map(|d| d == 0).unwrap_or(false) || !other.extra.constant_coeff().is_one() {
            out.extra = &out.extra * &other.extra;
        }
        out.cancel();
        out
    }

    /// Substitute `w_k = target` throughout.
    pub fn subst_w(&self, k: usize, target: &LinForm) -> FactoredRatio {
        if self.is_zero() {
            return self.clone();
        }
        let mut out = FactoredRatio::from_scalar(self.nz, self.nw, self.scalar.clone());
        for (f, &mult) in &self.numer {
            match f.subst_w(k, target) {
                FormSubst::Zero => return FactoredRatio::zero(self.nz, self.nw),
                FormSubst::Scalar(s) => {
                    for _ in 0..mult {
                        out.scalar *= &s;
                    }
                }
                FormSubst::Form(s, nf) => {
                    for _ in 0..mult {
                        out.scalar *= &s;
                    }
                    out.push_numer(nf, mult);
                }
            }
        }
        for (f, &mult) in &self.denom {
            match f.subst_w(k, target) {
                FormSubst::Zero => panic!("substitution created a vanishing denominator"),
                FormSubst::Scalar(s) => {
                    for _ in 0..mult {
                        out.scalar /= &s;
                    }
                }
                FormSubst::Form(s, nf) => {
                    for _ in 0..mult {
                        out.scalar /= &s;
                    }
                    out.push_denom(nf, mult);
                }
            }
        }
        if !self.extra.total_degree().map(|d| d == 0).unwrap_or(false)
            || !self.extra.constant_coeff().is_one()
        {
            let m = self.nz + self.nw;
            let mut images: Vec<Poly> = (1..=m).map(|i| Poly::var(m, i)).collect();
            images[self.nz + k - 1] = target.to_poly();
            let sub = self.extra.substitute_z_images(&images);
            if sub.is_zero() {
                return FactoredRatio::zero(self.nz, self.nw);
            }
            out.extra = &out.extra * &sub;
        }
        out.cancel();
        out
    }

    /// Expand into a plain polynomial of the base ring. Errors if any
    /// denominator factor survives cancellation.
    pub fn expand(&self) -> Result<Poly, PolyError> {
        if self.is_zero() {
            return Ok(Poly::zero(self.nz));
        }
        let mut me = self.clone();
        me.cancel();
        if !me.denom.is_empty() {
            let desc: Vec<String> = me
                .denom
                .iter()
                .map(|(f, m)| format!("({})^{}", f, m))
                .collect();
            return Err(PolyError::NotPolynomial(desc.join("*")));
        }
        me.numer_poly().narrow(self.nz)
    }

    /// Expand in the widened ring, keeping w-variables.
    pub fn expand_wide(&self) -> Result<Poly, PolyError> {
        if self.is_zero() {
            return Ok(Poly::zero(self.nz + self.nw));
        }
        let mut me = self.clone();
        me.cancel();
        if !me.denom.is_empty() {
            let desc: Vec<String> = me
                .denom
                .iter()
                .map(|(f, m)| format!("({})^{}", f, m))
                .collect();
            return Err(PolyError::NotPolynomial(desc.join("*")));
        }
        Ok(me.numer_poly())
    }

    /// Denominator forms involving `w_k`, with multiplicities.
    pub fn denom_forms_in_w(&self, k: usize) -> Vec<(LinForm, u32)> {
        self.denom
            .iter()
            .filter(|(f, _)| f.involves_w(k))
            .map(|(f, &m)| (f.clone(), m))
            .collect()
    }

    /// Remove one power of an exact denominator factor (used by residue
    /// extraction after the simple-pole check).
    pub fn remove_denom_factor(&mut self, f: &LinForm) {
        match self.denom.get_mut(f) {
            Some(m) if *m > 1 => *m -= 1,
            Some(_) => {
                self.denom.remove(f);
            }
            None => panic!("factor not present in denominator"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::poly::{rint, Poly};

    #[test]
    fn self_cancellation() {
        // (w1-z1)/(w1-z1) -> 1
        let mut r = FactoredRatio::one(1, 1);
        r.mul_linform_numer(vec![rint(-1)], vec![rint(1)], rint(0), rint(0));
        r.mul_linform_denom(vec![rint(-1)], vec![rint(1)], rint(0), rint(0));
        r.cancel();
        assert_eq!(r, FactoredRatio::one(1, 1));
    }

    #[test]
    fn extra_numer_trial_division() {
        // (w2-z1)(h+w2-z1) as extra over denominator {(w2-z1)}
        let nz = 1;
        let nw = 2;
        let a = LinForm::w_plus(nz, nw, 2, &[(1, -1)], 0);
        let b = LinForm::w_plus(nz, nw, 2, &[(1, -1)], 1);
        let prod = &a.to_poly() * &b.to_poly();
        let mut r = FactoredRatio::one(nz, nw);
        r.extra = prod;
        r.push_denom(a.clone(), 1);
        r.cancel();
        assert!(r.denom_factors().next().is_none());
        let numer: Vec<_> = r.numer_factors().collect();
        assert_eq!(numer, vec![(&b, 1u32)]);
        assert_eq!(r.extra_numer(), &Poly::one(nz + nw));
    }

    #[test]
    fn add_with_common_denominator() {
        // 1/(z1-z2) + 1/(z2-z1) = 0
        let nz = 2;
        let mut a = FactoredRatio::one(nz, 0);
        a.mul_linform_denom(vec![rint(1), rint(-1)], vec![], rint(0), rint(0));
        let mut b = FactoredRatio::one(nz, 0);
        b.mul_linform_denom(vec![rint(-1), rint(1)], vec![], rint(0), rint(0));
        let s = a.add(&b);
        assert!(s.is_zero());
        // h/(z1-z2) + 1 expands only after multiplying back
        let c = FactoredRatio::from_poly(nz, 0, &Poly::one(nz));
        let s2 = a.mul(&FactoredRatio::from_poly(nz, 0, &Poly::hvar(nz))).add(&c);
        let err = s2.expand().unwrap_err();
        assert!(matches!(err, PolyError::NotPolynomial(_)));
    }
}
