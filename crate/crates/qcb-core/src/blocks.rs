//! Executable verification of singular-vector, conformal-block and qKZ
//! properties of the minimal polynomial.

use serde::Serialize;

use crate::exactalg::{Poly, Rat};
use crate::minimal::build_ilambda;
use crate::tensor::{
    apply_e_gen, apply_e_of_z, apply_ki, weight_basis, MultiIndex, Site, TensorError, TensorVec,
    WeightLambda,
};

/// True iff every total raising operator `sum_a e^{(a)}_{i,j}` (i < j)
/// annihilates `v` identically in `z, h`. The input must live in a single
/// weight space.
pub fn is_singular(v: &TensorVec<Poly>) -> Result<bool, TensorError> {
    v.weight()?;
    let big_n = v.num_letters() as u8;
    for i in 1..=big_n {
        for j in (i + 1)..=big_n {
            if !apply_e_gen(v, i, j, Site::Total).is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Level-`level` conformal block test: `e(z)^{level - d + 1} v = 0`
/// symbolically, where `d = lambda_1 - lambda_N` of the vector's weight.
pub fn qcb_check(v: &TensorVec<Poly>, level: u32) -> Result<bool, TensorError> {
    let content = v.weight()?;
    let d = content.iter().max().unwrap() - content.iter().min().unwrap();
    if level < d {
        return Ok(false);
    }
    let mut cur = v.clone();
    for _ in 0..(level - d + 1) {
        if cur.is_zero() {
            break;
        }
        cur = apply_e_of_z(&cur);
    }
    Ok(cur.is_zero())
}

/// Smallest `m <= bound` with `e(z)^m v = 0`, or `None`.
pub fn qcb_level_witness(v: &TensorVec<Poly>, bound: u32) -> Option<u32> {
    let mut cur = v.clone();
    for m in 0..=bound {
        if cur.is_zero() {
            return Some(m);
        }
        cur = apply_e_of_z(&cur);
    }
    None
}

/// Outcome of one qKZ difference equation.
#[derive(Clone, Debug, Serialize)]
pub struct QkzEquation {
    pub i: usize,
    pub pass: bool,
    /// First differing basis index and coefficient rendering, when failing.
    pub mismatch: Option<String>,
}

/// Check `I_lambda(.., z_i - (N+1)h, ..) = K_i I_lambda` for every `i`.
pub fn verify_qkz(lambda: &WeightLambda) -> Vec<QkzEquation> {
    let lambda = lambda.normalized();
    let big_n = lambda.num_letters().max(2);
    let ila = build_ilambda(&lambda);
    let n = lambda.n();
    let shift = -Rat::from_integer(((big_n as i64) + 1).into());
    (1..=n)
        .map(|i| {
            let lhs = ila.map(|f| f.shift_z(i, &shift));
            match apply_ki(&ila, i, big_n) {
                Err(e) => QkzEquation { i, pass: false, mismatch: Some(e.to_string()) },
                Ok(rhs) => {
                    let mut mismatch = None;
                    let keys: std::collections::BTreeSet<MultiIndex> = lhs
                        .coeffs()
                        .map(|(l, _)| l.clone())
                        .chain(rhs.coeffs().map(|(l, _)| l.clone()))
                        .collect();
                    for l in keys {
                        let a = lhs.coeff(&l).cloned().unwrap_or_else(|| Poly::zero(n));
                        let b = rhs.coeff(&l).cloned().unwrap_or_else(|| Poly::zero(n));
                        if a != b {
                            mismatch = Some(format!("{}: {} vs {}", l, a, b));
                            break;
                        }
                    }
                    QkzEquation { i, pass: mismatch.is_none(), mismatch }
                }
            }
        })
        .collect()
}

/// A rational sample is admissible when `h != 0` and no difference
/// `z_i - z_j` (i != j) lies in `{0, +-h, +-2h, +-3h}`.
pub fn is_admissible_sample(zs: &[Rat], h: &Rat) -> bool {
    use num::Zero;
    if h.is_zero() {
        return false;
    }
    for i in 0..zs.len() {
        for j in 0..zs.len() {
            if i == j {
                continue;
            }
            let d = &zs[i] - &zs[j];
            for k in -3i64..=3 {
                if d == h * Rat::from_integer(k.into()) {
                    return false;
                }
            }
        }
    }
    true
}

/// Kernel dimension of the exact linear system "singular plus
/// `e(z)^{2-d} = 0` at the sample" on the weight space of `lambda`.
///
/// Rows are the total raisings (constant integer entries) stacked with the
/// numeric `e(z)` power evaluated at `(z, h)`; the kernel dimension comes
/// from exact sparse Gaussian elimination over the rationals.
pub fn cb_nullity_numeric(
    lambda: &WeightLambda,
    z_sample: &[Rat],
    h_sample: &Rat,
) -> Result<usize, TensorError> {
    let lambda = lambda.normalized();
    let n = lambda.n();
    assert_eq!(z_sample.len(), n);
    assert!(
        is_admissible_sample(z_sample, h_sample),
        "sample lies on an excluded hyperplane"
    );
    let big_n = lambda.num_letters().max(2);
    let d = lambda.d();
    assert!(d <= 1, "nullity check is stated for d(lambda) <= 1");
    let basis = weight_basis(&padded_content(&lambda, big_n));
    let index_of: std::collections::BTreeMap<MultiIndex, usize> = basis
        .iter()
        .cloned()
        .enumerate()
        .map(|(k, l)| (l, k))
        .collect();

    let mut rows: Vec<std::collections::BTreeMap<usize, Rat>> = Vec::new();

    // total raisings: group images by target index
    for i in 1..=big_n as u8 {
        for j in (i + 1)..=big_n as u8 {
            let mut by_target: std::collections::BTreeMap<MultiIndex, std::collections::BTreeMap<usize, Rat>> =
                Default::default();
            for (col, l) in basis.iter().enumerate() {
                for a in 1..=n {
                    if l.letter(a) == j {
                        let tgt = l.with_letter(a, i);
                        let row = by_target.entry(tgt).or_default();
                        let e = row.entry(col).or_insert_with(|| Rat::from_integer(0.into()));
                        *e += Rat::from_integer(1.into());
                    }
                }
            }
            rows.extend(by_target.into_values());
        }
    }

    // e(z)^{2-d} evaluated at the sample
    let power = 2 - d;
    let mut by_target: std::collections::BTreeMap<MultiIndex, std::collections::BTreeMap<usize, Rat>> =
        Default::default();
    for (col, l) in basis.iter().enumerate() {
        let mut unit: TensorVec<Poly> = TensorVec::new(n, big_n);
        unit.set(l.clone(), Poly::one(n));
        let mut cur = unit;
        for _ in 0..power {
            cur = apply_e_of_z(&cur);
        }
        for (tgt, f) in cur.coeffs() {
            let val = f.eval(z_sample, h_sample);
            if !num::Zero::is_zero(&val) {
                by_target.entry(tgt.clone()).or_default().insert(col, val);
            }
        }
    }
    rows.extend(by_target.into_values());

    let rank = sparse_rank(rows, basis.len());
    let _ = index_of;
    Ok(basis.len() - rank)
}

fn padded_content(lambda: &WeightLambda, big_n: usize) -> Vec<u32> {
    let mut c = lambda.parts().to_vec();
    c.resize(big_n, 0);
    c
}

/// Rank of a sparse rational matrix by incremental elimination.
fn sparse_rank(rows: Vec<std::collections::BTreeMap<usize, Rat>>, ncols: usize) -> usize {
    use num::Zero;
    let mut pivots: std::collections::BTreeMap<usize, std::collections::BTreeMap<usize, Rat>> =
        Default::default();
    for mut row in rows {
        loop {
            let lead = match row.keys().next() {
                Some(&c) => c,
                None => break,
            };
            match pivots.get(&lead) {
                Some(p) => {
                    let factor = row[&lead].clone();
                    for (c, v) in p {
                        let delta = v * &factor;
                        let e = row.entry(*c).or_insert_with(Rat::zero);
                        *e -= delta;
                        if e.is_zero() {
                            row.remove(c);
                        }
                    }
                }
                None => {
                    let inv = <Rat as num::One>::one() / &row[&lead];
                    let norm: std::collections::BTreeMap<usize, Rat> =
                        row.iter().map(|(c, v)| (*c, v * &inv)).collect();
                    pivots.insert(lead, norm);
                    break;
                }
            }
        }
        if pivots.len() == ncols {
            break;
        }
    }
    pivots.len()
}

/// Aggregate report for one weight.
#[derive(Clone, Debug, Serialize)]
pub struct BlockReport {
    pub lambda: Vec<u32>,
    pub is_singular: bool,
    /// Smallest `m` with `e(z)^m I = 0`, or `null` up to the bound.
    pub qcb_level_witness: Option<u32>,
    pub qkz_checked: Option<Vec<QkzEquation>>,
    pub nullity_at_sample: Option<usize>,
}

/// Build the full report for a weight; qKZ and nullity only when `d <= 1`.
pub fn block_report(lambda: &WeightLambda, z_sample: Option<(&[Rat], &Rat)>) -> BlockReport {
    let lambda = lambda.normalized();
    let ila = build_ilambda(&lambda);
    let padded = pad_letters(&ila, lambda.num_letters().max(2));
    let singular = is_singular(&padded).unwrap_or(false);
    let witness = qcb_level_witness(&padded, lambda.d() + 3);
    let qkz = if lambda.d() <= 1 { Some(verify_qkz(&lambda)) } else { None };
    let nullity = match (lambda.d() <= 1, z_sample) {
        (true, Some((zs, h))) => cb_nullity_numeric(&lambda, zs, h).ok(),
        _ => None,
    };
    BlockReport {
        lambda: lambda.parts().to_vec(),
        is_singular: singular,
        qcb_level_witness: witness,
        qkz_checked: qkz,
        nullity_at_sample: nullity,
    }
}

/// Reinterpret a vector in an alphabet with at least `big_n` letters
/// (needed to apply `e(z)` to single-row weights).
pub fn pad_letters(v: &TensorVec<Poly>, big_n: usize) -> TensorVec<Poly> {
    if v.num_letters() >= big_n {
        return v.clone();
    }
    let mut out = TensorVec::new(v.n(), big_n);
    for (l, c) in v.coeffs() {
        out.set(l.clone(), c.clone());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::rint;

    #[test]
    fn singular_examples() {
        let i11 = build_ilambda(&WeightLambda::new(vec![1, 1]).unwrap());
        assert!(is_singular(&i11).unwrap());

        // symmetric vector is not singular: e_{1,2}-total gives 2 v_{11}
        let mut sym = TensorVec::new(2, 2);
        sym.set(MultiIndex(vec![1, 2]), Poly::one(2));
        sym.set(MultiIndex(vec![2, 1]), Poly::one(2));
        assert!(!is_singular(&sym).unwrap());
        let raised = apply_e_gen(&sym, 1, 2, Site::Total);
        assert_eq!(
            raised.coeff(&MultiIndex(vec![1, 1])),
            Some(&Poly::one(2).scalar_mul(&rint(2)))
        );

        // mixed weight input is rejected
        let mut mixed = TensorVec::new(2, 2);
        mixed.set(MultiIndex(vec![1, 1]), Poly::one(2));
        mixed.set(MultiIndex(vec![1, 2]), Poly::one(2));
        assert!(matches!(is_singular(&mixed), Err(TensorError::MixedWeight)));
    }

    #[test]
    fn qcb_examples() {
        // d = 1: e(z) I_{(2,1)} = 0
        let i21 = build_ilambda(&WeightLambda::new(vec![2, 1]).unwrap());
        assert!(apply_e_of_z(&i21).is_zero());
        assert!(qcb_check(&i21, 1).unwrap());

        // d = 0: e(z)^2 I_{(2,2)} = 0
        let i22 = build_ilambda(&WeightLambda::new(vec![2, 2]).unwrap());
        assert!(qcb_check(&i22, 1).unwrap());

        // v_{12} alone is not a level-1 block: e(z) v has a nonzero image
        let mut v = TensorVec::new(2, 2);
        v.set(MultiIndex(vec![1, 2]), Poly::one(2));
        let img = apply_e_of_z(&v);
        assert_eq!(img.coeff(&MultiIndex(vec![1, 1])), Some(&Poly::var(2, 2)));
        assert!(!qcb_check(&v, 1).unwrap());
    }

    #[test]
    fn qkz_small_weights() {
        for parts in [vec![1, 1], vec![2, 1], vec![2, 2]] {
            let lam = WeightLambda::new(parts).unwrap();
            let eqs = verify_qkz(&lam);
            assert!(eqs.iter().all(|e| e.pass), "qkz failed for {}", lam);
        }
    }

    #[test]
    fn qkz_shift_matches_n3() {
        // lambda = (2,1,1) with N = 3 uses the shift 4h
        let lam = WeightLambda::new(vec![2, 1, 1]).unwrap();
        let eqs = verify_qkz(&lam);
        assert!(eqs.iter().all(|e| e.pass));
    }

    #[test]
    fn ki_on_generic_vector_is_not_polynomial() {
        let mut v = TensorVec::new(2, 2);
        v.set(MultiIndex(vec![1, 2]), Poly::one(2));
        v.set(MultiIndex(vec![2, 1]), Poly::var(2, 1));
        let r = apply_ki(&v, 1, 2);
        assert!(r.is_err());
    }

    #[test]
    fn nullity_examples() {
        let lam = WeightLambda::new(vec![1, 1]).unwrap();
        let zs = vec![rint(0), rint(1)];
        let h = crate::exactalg::rat(1, 3);
        assert_eq!(cb_nullity_numeric(&lam, &zs, &h).unwrap(), 1);

        let lam21 = WeightLambda::new(vec![2, 1]).unwrap();
        let zs = vec![rint(0), rint(17), rint(5)];
        let h = rint(1);
        assert_eq!(cb_nullity_numeric(&lam21, &zs, &h).unwrap(), 1);

        let lam22 = WeightLambda::new(vec![2, 2]).unwrap();
        let zs = vec![rint(0), rint(17), rint(5), rint(41)];
        assert_eq!(cb_nullity_numeric(&lam22, &zs, &rint(1)).unwrap(), 1);
    }

    #[test]
    fn admissibility_guard() {
        assert!(!is_admissible_sample(&[rint(0), rint(1)], &rint(1)));
        assert!(is_admissible_sample(&[rint(0), rint(17)], &rint(1)));
        assert!(!is_admissible_sample(&[rint(0), rint(5)], &num::Zero::zero()));
    }
}
