//! The tensor space `V = (C^N)^{tensor n}` over polynomial coefficients:
//! weight bases, `gl_N` generator actions, site permutations, the lowering
//! operator `e(z)`, R-matrices and the qKZ operators `K_i`.
//!
//! Site indices and letters are 1-based throughout, matching the usual
//! conventions for these operators.

use std::collections::BTreeMap;
use std::fmt;

use num::One;

use crate::exactalg::{LinForm, Poly, PolyError, Rat};
use crate::exactalg::FactoredRatio;

/// A weakly decreasing weight `lambda_1 >= ... >= lambda_N >= 0`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct WeightLambda {
    parts: Vec<u32>,
}

impl WeightLambda {
    pub fn new(parts: Vec<u32>) -> Result<Self, TensorError> {
        if parts.is_empty() || parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(TensorError::NotAPartition(parts));
        }
        Ok(WeightLambda { parts })
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    /// Number of boxes, i.e. the number of tensor sites.
    pub fn n(&self) -> usize {
        self.parts.iter().sum::<u32>() as usize
    }

    /// Number of rows, i.e. the rank N (trailing zero parts count).
    pub fn num_letters(&self) -> usize {
        self.parts.len()
    }

    /// `d(lambda) = lambda_1 - lambda_N`.
    pub fn d(&self) -> u32 {
        self.parts[0] - *self.parts.last().unwrap()
    }

    /// `k(lambda) = sum lambda_i (lambda_i - 1) / 2`.
    pub fn k(&self) -> u32 {
        self.parts.iter().map(|&p| p * p.saturating_sub(1) / 2).sum()
    }

    /// Strip trailing zero parts (e.g. `2,1,0` and `2,1` agree).
    pub fn normalized(&self) -> WeightLambda {
        let mut parts = self.parts.clone();
        while parts.len() > 1 && *parts.last().unwrap() == 0 {
            parts.pop();
        }
        WeightLambda { parts }
    }

    /// The distinguished multi-index `(1^{lambda_1}, 2^{lambda_2}, ...)`.
    pub fn l0(&self) -> MultiIndex {
        let mut v = Vec::with_capacity(self.n());
        for (i, &p) in self.parts.iter().enumerate() {
            for _ in 0..p {
                v.push((i + 1) as u8);
            }
        }
        MultiIndex(v)
    }

    /// Conjugate partition.
    pub fn conjugate(&self) -> WeightLambda {
        let m = self.parts.first().copied().unwrap_or(0) as usize;
        let parts = (0..m)
            .map(|c| self.parts.iter().filter(|&&p| p as usize > c).count() as u32)
            .collect();
        WeightLambda { parts }
    }
}

impl fmt::Display for WeightLambda {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.parts.iter().map(|p| p.to_string()).collect();
        write!(f, "({})", s.join(","))
    }
}

/// Basis label `v_{l_1} ⊗ ... ⊗ v_{l_n}` with letters in `1..=N`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct MultiIndex(pub Vec<u8>);

impl MultiIndex {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letter(&self, site: usize) -> u8 {
        self.0[site - 1]
    }

    pub fn with_letter(&self, site: usize, letter: u8) -> MultiIndex {
        let mut v = self.0.clone();
        v[site - 1] = letter;
        MultiIndex(v)
    }

    pub fn swapped(&self, i: usize, j: usize) -> MultiIndex {
        let mut v = self.0.clone();
        v.swap(i - 1, j - 1);
        MultiIndex(v)
    }

    /// Letter content as counts indexed by letter (length = max letter).
    pub fn content(&self, num_letters: usize) -> Vec<u32> {
        let mut c = vec![0u32; num_letters];
        for &l in &self.0 {
            c[(l - 1) as usize] += 1;
        }
        c
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.iter().map(|l| l.to_string()).collect();
        write!(f, "v[{}]", s.join(","))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TensorError {
    NotAPartition(Vec<u32>),
    MixedWeight,
    Poly(PolyError),
}

impl fmt::Display for TensorError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TensorError::NotAPartition(p) => write!(f, "not weakly decreasing: {:?}", p),
            TensorError::MixedWeight => write!(f, "vector is not supported in a single weight space"),
            TensorError::Poly(e) => write!(f, "{}", e),
        }
    }
}

impl std::error::Error for TensorError {}

impl From<PolyError> for TensorError {
    fn from(e: PolyError) -> Self {
        TensorError::Poly(e)
    }
}

/// Coefficient rings a tensor vector can carry.
pub trait Coeff: Clone + PartialEq {
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
}

impl Coeff for Poly {
    fn is_zero(&self) -> bool {
        Poly::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self.checked_add(other).expect("same ring")
    }
    fn neg(&self) -> Self {
        Poly::neg(self)
    }
}

impl Coeff for FactoredRatio {
    fn is_zero(&self) -> bool {
        FactoredRatio::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        FactoredRatio::add(self, other)
    }
    fn neg(&self) -> Self {
        let mut out = self.clone();
        out.mul_scalar(&-Rat::one());
        out
    }
}

/// A vector in `(C^N)^{tensor n}` with sparse coefficients.
#[derive(Clone, PartialEq, Debug)]
pub struct TensorVec<C: Coeff> {
    n: usize,
    num_letters: usize,
    coeffs: BTreeMap<MultiIndex, C>,
}

impl<C: Coeff> TensorVec<C> {
    pub fn new(n: usize, num_letters: usize) -> Self {
        TensorVec { n, num_letters, coeffs: BTreeMap::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_letters(&self) -> usize {
        self.num_letters
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (&MultiIndex, &C)> {
        self.coeffs.iter()
    }

    pub fn coeff(&self, l: &MultiIndex) -> Option<&C> {
        self.coeffs.get(l)
    }

    pub fn add_to(&mut self, l: MultiIndex, c: C) {
        debug_assert_eq!(l.len(), self.n);
        use std::collections::btree_map::Entry;
        if c.is_zero() {
            return;
        }
        match self.coeffs.entry(l) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let sum = o.get().add(&c);
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn set(&mut self, l: MultiIndex, c: C) {
        if !c.is_zero() {
            self.coeffs.insert(l, c);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let mut out = self.clone();
        for (l, c) in &other.coeffs {
            out.add_to(l.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        let mut out = TensorVec::new(self.n, self.num_letters);
        for (l, c) in &self.coeffs {
            out.set(l.clone(), c.neg());
        }
        out
    }

    pub fn map<D: Coeff>(&self, f: impl Fn(&C) -> D) -> TensorVec<D> {
        let mut out = TensorVec::new(self.n, self.num_letters);
        for (l, c) in &self.coeffs {
            out.add_to(l.clone(), f(c));
        }
        out
    }

    /// Letter content, or an error if the support mixes weight spaces.
    pub fn weight(&self) -> Result<Vec<u32>, TensorError> {
        let mut it = self.coeffs.keys();
        let first = match it.next() {
            Some(l) => l.content(self.num_letters),
            None => return Ok(vec![0; self.num_letters]),
        };
        for l in it {
            if l.content(self.num_letters) != first {
                return Err(TensorError::MixedWeight);
            }
        }
        Ok(first)
    }

    /// Swap tensor factors `i` and `j`; coefficients untouched.
    pub fn apply_perm(&self, i: usize, j: usize) -> Self {
        let mut out = TensorVec::new(self.n, self.num_letters);
        for (l, c) in &self.coeffs {
            out.add_to(l.swapped(i, j), c.clone());
        }
        out
    }
}

/// All multi-indices with the given letter content, in lexicographic order.
/// Any composition is accepted (weak decrease is not required here).
pub fn weight_basis(content: &[u32]) -> Vec<MultiIndex> {
    let n: u32 = content.iter().sum();
    let mut out = Vec::new();
    let mut counts: Vec<u32> = content.to_vec();
    let mut cur: Vec<u8> = Vec::with_capacity(n as usize);
    fn rec(counts: &mut [u32], cur: &mut Vec<u8>, n: usize, out: &mut Vec<MultiIndex>) {
        if cur.len() == n {
            out.push(MultiIndex(cur.clone()));
            return;
        }
        for l in 0..counts.len() {
            if counts[l] > 0 {
                counts[l] -= 1;
                cur.push((l + 1) as u8);
                rec(counts, cur, n, out);
                cur.pop();
                counts[l] += 1;
            }
        }
    }
    rec(&mut counts, &mut cur, n as usize, &mut out);
    out
}

/// Where a `gl_N` generator acts.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Site {
    At(usize),
    Total,
}

/// Apply `e_{i,j}` at one site or summed over all sites:
/// `e_{i,j} v_k = delta_{j,k} v_i` in each factor.
pub fn apply_e_gen<C: Coeff>(v: &TensorVec<C>, i: u8, j: u8, site: Site) -> TensorVec<C> {
    let mut out = TensorVec::new(v.n(), v.num_letters());
    let sites: Vec<usize> = match site {
        Site::At(a) => vec![a],
        Site::Total => (1..=v.n()).collect(),
    };
    for (l, c) in v.coeffs() {
        for &a in &sites {
            if l.letter(a) == j {
                out.add_to(l.with_letter(a, i), c.clone());
            }
        }
    }
    out
}

/// The lowering operator
/// `e(z) = sum_j (z_j - h e_{N,N}^{(j)} + h sum_{s>j} (e_{1,1}^{(s)} - e_{N,N}^{(s)})) e_{1,N}^{(j)}
///  + h sum_{j=2}^{N-1} sum_{r<s} e_{j,N}^{(r)} e_{1,j}^{(s)}`,
/// with the diagonal factors composed after `e_{1,N}^{(j)}` and the second
/// sum running over ordered site pairs `1 <= r < s <= n`.
pub fn apply_e_of_z(v: &TensorVec<Poly>) -> TensorVec<Poly> {
    let n = v.n();
    let big_n = v.num_letters() as u8;
    assert!(big_n >= 2, "e(z) needs at least two letters");
    let mut out = TensorVec::new(n, v.num_letters());
    let h = Poly::hvar(n);
    for (l, c) in v.coeffs() {
        // first sum
        for j in 1..=n {
            if l.letter(j) == big_n {
                let l2 = l.with_letter(j, 1);
                let mut diag = Poly::var(n, j);
                // e_{N,N}^{(j)} term vanishes: site j now carries letter 1
                for s in (j + 1)..=n {
                    let ls = l2.letter(s);
                    if ls == 1 {
                        diag = diag.checked_add(&h).unwrap();
                    }
                    if ls == big_n {
                        diag = diag.checked_sub(&h).unwrap();
                    }
                }
                out.add_to(l2, &diag * c);
            }
        }
        // second sum
        for mid in 2..big_n {
            for s in 1..=n {
                if l.letter(s) != mid {
                    continue;
                }
                let l1 = l.with_letter(s, 1);
                for r in 1..s {
                    if l1.letter(r) == big_n {
                        let l2 = l1.with_letter(r, mid);
                        out.add_to(l2, &h * c);
                    }
                }
            }
        }
    }
    out
}

/// One R-matrix factor `R^{(i,j)}(u) = (u - h P^{(i,j)}) / (u + h)` applied
/// coefficientwise to a vector with factored-ratio coefficients. `u` is
/// carried as raw linear-form data; normalization scales fold into scalars.
pub fn apply_r(
    v: &TensorVec<FactoredRatio>,
    i: usize,
    j: usize,
    u: &LinForm,
    nz: usize,
    nw: usize,
) -> TensorVec<FactoredRatio> {
    assert_ne!(i, j);
    let mut out = TensorVec::new(v.n(), v.num_letters());
    let keys: std::collections::BTreeSet<MultiIndex> = v
        .coeffs()
        .map(|(l, _)| l.clone())
        .chain(v.coeffs().map(|(l, _)| l.swapped(i, j)))
        .collect();
    for l in keys {
        let swapped = l.swapped(i, j);
        let mut term = match v.coeff(&l) {
            Some(c) => {
                let mut t = c.clone();
                t.mul_linform_numer(u.z.clone(), u.w.clone(), u.h.clone(), u.c.clone());
                t
            }
            None => FactoredRatio::zero(nz, nw),
        };
        if let Some(cs) = v.coeff(&swapped) {
            let mut hneg = FactoredRatio::from_poly(nz, nw, &Poly::hvar(nz).neg());
            hneg = hneg.mul(cs);
            term = term.add(&hneg);
        }
        if term.is_zero() {
            continue;
        }
        term.mul_linform_denom(u.z.clone(), u.w.clone(), &u.h + Rat::one(), u.c.clone());
        term.cancel();
        out.add_to(l, term);
    }
    out
}

/// The qKZ operator
/// `K_i = R^{(i,i-1)}(z_i - z_{i-1} - (N+1)h) ... R^{(i,1)}(z_i - z_1 - (N+1)h)
///        R^{(i,n)}(z_i - z_n) ... R^{(i,i+1)}(z_i - z_{i+1})`,
/// applied right-to-left. All denominators must cancel on the final result;
/// a residual denominator is reported as `NotPolynomial` (the generic
/// outcome for inputs that are not qKZ-compatible).
pub fn apply_ki(v: &TensorVec<Poly>, i: usize, big_n: usize) -> Result<TensorVec<Poly>, PolyError> {
    let n = v.n();
    let nz = n;
    let mut cur: TensorVec<FactoredRatio> = v.map(|p| FactoredRatio::from_poly(nz, 0, p));
    let shift = -((big_n as i64) + 1);
    for j in (i + 1)..=n {
        let u = LinForm::z_diff(nz, 0, i, j, 0);
        cur = apply_r(&cur, i, j, &u, nz, 0);
    }
    for j in 1..i {
        let u = LinForm::z_diff(nz, 0, i, j, shift);
        cur = apply_r(&cur, i, j, &u, nz, 0);
    }
    let mut out = TensorVec::new(n, v.num_letters());
    for (l, c) in cur.coeffs() {
        out.add_to(l.clone(), c.expand()?);
    }
    Ok(out)
}

/// Symbolic Yang-Baxter and unitarity check on `(C^N)^{tensor 3}` with `u, v`
/// as extra polynomial variables. Denominators are cleared: both sides of
/// the braid identity share `(u-v+h)(u+h)(v+h)`.
pub fn check_yang_baxter(big_n: usize) -> Result<(), String> {
    // ring: z1 = u, z2 = v, plus h
    let n = 2usize;
    let u = Poly::var(n, 1);
    let v = Poly::var(n, 2);
    let h = Poly::hvar(n);

    type Vec3 = BTreeMap<MultiIndex, Poly>;
    let basis: Vec<MultiIndex> = weight_free_basis(big_n, 3);

    let apply_num = |x: &Vec3, a: usize, b: usize, arg: &Poly| -> Vec3 {
        // (arg - h P^{(a,b)}) x
        let mut out: Vec3 = BTreeMap::new();
        for (l, c) in x {
            add_terms(&mut out, l.clone(), arg * c);
            add_terms(&mut out, l.swapped(a, b), (&h * c).neg());
        }
        out
    };

    let umv = &u - &v;
    for l0 in &basis {
        let mut x: Vec3 = BTreeMap::new();
        x.insert(l0.clone(), Poly::one(n));
        // lhs: R12(u-v) R13(u) R23(v), numerators applied right-to-left
        let lhs = {
            let t = apply_num(&x, 2, 3, &v);
            let t = apply_num(&t, 1, 3, &u);
            apply_num(&t, 1, 2, &umv)
        };
        let rhs = {
            let t = apply_num(&x, 1, 2, &umv);
            let t = apply_num(&t, 1, 3, &u);
            apply_num(&t, 2, 3, &v)
        };
        for l in basis.iter() {
            let a = lhs.get(l).cloned().unwrap_or_else(|| Poly::zero(n));
            let b = rhs.get(l).cloned().unwrap_or_else(|| Poly::zero(n));
            if a != b {
                return Err(format!(
                    "Yang-Baxter mismatch at column {} row {}: {} vs {}",
                    l0, l, a, b
                ));
            }
        }
        // unitarity on the (1,2) pair: (u - hP)(-u - hP) = (u+h)(-u+h)
        let t = apply_num(&x, 1, 2, &u.neg());
        let t = apply_num(&t, 1, 2, &u);
        let scale = &(&u + &h) * &(&u.neg() + &h);
        for l in basis.iter() {
            let a = t.get(l).cloned().unwrap_or_else(|| Poly::zero(n));
            let expect = if l == l0 { scale.clone() } else { Poly::zero(n) };
            if a != expect {
                return Err(format!("unitarity mismatch at column {} row {}", l0, l));
            }
        }
    }
    Ok(())
}

fn weight_free_basis(big_n: usize, sites: usize) -> Vec<MultiIndex> {
    let mut out = vec![MultiIndex(Vec::new())];
    for _ in 0..sites {
        let mut next = Vec::new();
        for m in out {
            for l in 1..=big_n as u8 {
                let mut v = m.0.clone();
                v.push(l);
                next.push(MultiIndex(v));
            }
        }
        out = next;
    }
    out
}

fn add_terms(map: &mut BTreeMap<MultiIndex, Poly>, l: MultiIndex, p: Poly) {
    use std::collections::btree_map::Entry;
    if p.is_zero() {
        return;
    }
    match map.entry(l) {
        Entry::Vacant(v) => {
            v.insert(p);
        }
        Entry::Occupied(mut o) => {
            let s = o.get().checked_add(&p).unwrap();
            if s.is_zero() {
                o.remove();
            } else {
                *o.get_mut() = s;
            }
        }
    }
}

/// JSON for a polynomial-coefficient vector:
/// `{"lambda": [...], "N": n, "coeffs": [{"L": [...], "poly": ...}]}`.
pub fn tensorvec_to_json(v: &TensorVec<Poly>) -> Result<serde_json::Value, TensorError> {
    let content = v.weight()?;
    let coeffs: Vec<serde_json::Value> = v
        .coeffs()
        .map(|(l, c)| {
            serde_json::json!({
                "L": l.0.iter().map(|&x| x as u64).collect::<Vec<_>>(),
                "poly": c.to_json(),
            })
        })
        .collect();
    Ok(serde_json::json!({
        "lambda": content,
        "N": v.num_letters(),
        "coeffs": coeffs,
    }))
}

/// Paper-style rendering: `(c_L)*v[L] + ...` in basis order.
pub fn tensorvec_to_text(v: &TensorVec<Poly>) -> String {
    if v.is_zero() {
        return "0".to_string();
    }
    let mut parts = Vec::new();
    for (l, c) in v.coeffs() {
        let cs = c.to_string();
        if cs == "1" {
            parts.push(format!("{}", l));
        } else if cs == "-1" {
            parts.push(format!("- {}", l));
        } else if c.num_terms() == 1 {
            parts.push(format!("{}*{}", cs, l));
        } else {
            parts.push(format!("({})*{}", cs, l));
        }
    }
    let mut out = String::new();
    for (k, p) in parts.iter().enumerate() {
        if k == 0 {
            out.push_str(p);
        } else if let Some(rest) = p.strip_prefix("- ") {
            out.push_str(" - ");
            out.push_str(rest);
        } else if let Some(rest) = p.strip_prefix('-') {
            out.push_str(" - ");
            out.push_str(rest);
        } else {
            out.push_str(" + ");
            out.push_str(p);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::rint;

    #[test]
    fn weight_basis_counts_and_order() {
        assert_eq!(
            weight_basis(&[1, 1]),
            vec![MultiIndex(vec![1, 2]), MultiIndex(vec![2, 1])]
        );
        let b = weight_basis(&[2, 1]);
        assert_eq!(
            b,
            vec![
                MultiIndex(vec![1, 1, 2]),
                MultiIndex(vec![1, 2, 1]),
                MultiIndex(vec![2, 1, 1])
            ]
        );
        // brute-force oracle for lambda = (2,2): enumerate {1,2}^4 and filter
        let mut count = 0;
        for bits in 0..16u32 {
            let l: Vec<u8> = (0..4).map(|k| 1 + ((bits >> k) & 1) as u8).collect();
            if l.iter().filter(|&&x| x == 1).count() == 2 {
                count += 1;
            }
        }
        assert_eq!(weight_basis(&[2, 2]).len(), count);
        assert_eq!(count, 6);
    }

    #[test]
    fn multinomial_counts_up_to_n8() {
        fn multinomial(content: &[u32]) -> u64 {
            let n: u32 = content.iter().sum();
            let mut num = 1u64;
            for k in 1..=n as u64 {
                num *= k;
            }
            for &c in content {
                for k in 1..=c as u64 {
                    num /= k;
                }
            }
            num
        }
        for content in [vec![4, 4], vec![3, 3, 2], vec![2, 2, 2, 2], vec![5, 2, 1]] {
            assert_eq!(weight_basis(&content).len() as u64, multinomial(&content));
        }
    }

    #[test]
    fn e_gen_actions() {
        let mut v = TensorVec::<Poly>::new(2, 2);
        v.set(MultiIndex(vec![2, 1]), Poly::one(2));
        let r = apply_e_gen(&v, 1, 2, Site::At(1));
        assert_eq!(r.coeff(&MultiIndex(vec![1, 1])), Some(&Poly::one(2)));

        let mut w = TensorVec::<Poly>::new(2, 2);
        w.set(MultiIndex(vec![1, 1]), Poly::one(2));
        let r = apply_e_gen(&w, 2, 1, Site::Total);
        assert_eq!(r.coeff(&MultiIndex(vec![2, 1])), Some(&Poly::one(2)));
        assert_eq!(r.coeff(&MultiIndex(vec![1, 2])), Some(&Poly::one(2)));
    }

    #[test]
    fn e_of_z_on_v22() {
        // hand expansion of the two summands: e(z)(v2 ⊗ v2) =
        //   (z1 - h) v12 + z2 v21   for N = 2, n = 2
        let mut v = TensorVec::<Poly>::new(2, 2);
        v.set(MultiIndex(vec![2, 2]), Poly::one(2));
        let r = apply_e_of_z(&v);
        let expect12 = Poly::affine(2, &[rint(1), rint(0)], rint(-1), rint(0));
        assert_eq!(r.coeff(&MultiIndex(vec![1, 2])), Some(&expect12));
        assert_eq!(r.coeff(&MultiIndex(vec![2, 1])), Some(&Poly::var(2, 2)));
    }

    #[test]
    fn yang_baxter_small() {
        check_yang_baxter(2).unwrap();
    }
}
