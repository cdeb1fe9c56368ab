//! Integer-coefficient univariate polynomials backing the scalar field.
//!
//! Coefficients are ascending in the formal variable `s` (with `q = s^2`).
//! A `ZPoly` never has a zero leading coefficient; the zero polynomial is
//! the empty coefficient vector.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ZPoly {
    /// Ascending coefficients; empty means zero, last entry nonzero.
    pub coeffs: Vec<BigInt>,
}

impl ZPoly {
    pub fn zero() -> Self {
        ZPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        ZPoly::constant(BigInt::one())
    }

    pub fn constant(c: BigInt) -> Self {
        if c.is_zero() {
            ZPoly::zero()
        } else {
            ZPoly { coeffs: vec![c] }
        }
    }

    pub fn from_coeffs(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        ZPoly { coeffs }
    }

    /// Monomial c * s^k with k >= 0.
    pub fn monomial(c: BigInt, k: usize) -> Self {
        if c.is_zero() {
            return ZPoly::zero();
        }
        let mut coeffs = vec![BigInt::zero(); k + 1];
        coeffs[k] = c;
        ZPoly { coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    pub fn degree(&self) -> usize {
        if self.coeffs.is_empty() {
            0
        } else {
            self.coeffs.len() - 1
        }
    }

    pub fn leading(&self) -> BigInt {
        self.coeffs.last().cloned().unwrap_or_else(BigInt::zero)
    }

    /// Number of trailing zero coefficients (valuation at s = 0).
    pub fn valuation(&self) -> usize {
        self.coeffs
            .iter()
            .position(|c| !c.is_zero())
            .unwrap_or(0)
    }

    /// Divide by s^k; caller guarantees valuation >= k.
    pub fn shift_down(&self, k: usize) -> Self {
        if k == 0 || self.is_zero() {
            return self.clone();
        }
        debug_assert!(self.valuation() >= k);
        ZPoly {
            coeffs: self.coeffs[k..].to_vec(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = Vec::with_capacity(n);
        for i in 0..n {
            let a = self.coeffs.get(i).cloned().unwrap_or_else(BigInt::zero);
            let b = other.coeffs.get(i).cloned().unwrap_or_else(BigInt::zero);
            coeffs.push(a + b);
        }
        ZPoly::from_coeffs(coeffs)
    }

    pub fn neg(&self) -> Self {
        ZPoly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return ZPoly::zero();
        }
        let mut coeffs = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                coeffs[i + j] += a * b;
            }
        }
        ZPoly::from_coeffs(coeffs)
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return ZPoly::zero();
        }
        ZPoly {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// gcd of all coefficients; zero for the zero polynomial.
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in &self.coeffs {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    /// Divide out the content and make the leading coefficient positive.
    /// Returns (primitive part, removed factor).
    pub fn primitive(&self) -> (Self, BigInt) {
        if self.is_zero() {
            return (ZPoly::zero(), BigInt::one());
        }
        let mut c = self.content();
        if self.leading().is_negative() {
            c = -c;
        }
        let coeffs = self.coeffs.iter().map(|a| a / &c).collect();
        (ZPoly { coeffs }, c)
    }

    /// Exact division; panics if the division is not exact.
    pub fn div_exact(&self, d: &Self) -> Self {
        assert!(!d.is_zero(), "division by zero polynomial");
        if self.is_zero() {
            return ZPoly::zero();
        }
        let mut rem = self.coeffs.clone();
        let dn = d.coeffs.len();
        assert!(rem.len() >= dn, "inexact polynomial division");
        let mut quot = vec![BigInt::zero(); rem.len() - dn + 1];
        let lead = d.leading();
        for k in (0..quot.len()).rev() {
            let top = rem[k + dn - 1].clone();
            if top.is_zero() {
                continue;
            }
            let (qc, r) = top.div_rem(&lead);
            assert!(r.is_zero(), "inexact polynomial division");
            quot[k] = qc.clone();
            for (j, dc) in d.coeffs.iter().enumerate() {
                rem[k + j] -= &qc * dc;
            }
        }
        assert!(rem.iter().all(|c| c.is_zero()), "inexact polynomial division");
        ZPoly::from_coeffs(quot)
    }

    /// Primitive polynomial gcd via pseudo-remainder Euclid.
    pub fn gcd(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.primitive().0;
        }
        if other.is_zero() {
            return self.primitive().0;
        }
        let (mut a, _) = self.primitive();
        let (mut b, _) = other.primitive();
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            let r = a.pseudo_rem(&b);
            a = b;
            b = r.primitive().0;
        }
        a.primitive().0
    }

    /// Pseudo-remainder of self by d (leading(d)^k * self mod d).
    fn pseudo_rem(&self, d: &Self) -> Self {
        let mut rem = self.clone();
        let dd = d.degree();
        let lead = d.leading();
        while !rem.is_zero() && rem.degree() >= dd {
            let shift = rem.degree() - dd;
            let rl = rem.leading();
            let mut coeffs = vec![BigInt::zero(); rem.coeffs.len()];
            for (i, c) in rem.coeffs.iter().enumerate() {
                coeffs[i] = c * &lead;
            }
            for (j, dc) in d.coeffs.iter().enumerate() {
                coeffs[shift + j] -= &rl * dc;
            }
            let next = ZPoly::from_coeffs(coeffs);
            debug_assert!(next.is_zero() || next.degree() < rem.degree());
            rem = next;
        }
        rem
    }

    /// Value at s = 1 (sum of coefficients).
    pub fn eval_one(&self) -> BigInt {
        self.coeffs.iter().sum()
    }

    /// Substitute s -> -s (negate odd coefficients).
    pub fn subst_neg(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| if i % 2 == 1 { -c } else { c.clone() })
            .collect();
        ZPoly { coeffs }
    }

    /// Exact square root if self is a perfect square.
    pub fn sqrt(&self) -> Option<Self> {
        if self.is_zero() {
            return Some(ZPoly::zero());
        }
        if self.degree() % 2 != 0 {
            return None;
        }
        let d = self.degree() / 2;
        let lead_root = exact_int_sqrt(&self.leading())?;
        let mut r = vec![BigInt::zero(); d + 1];
        r[d] = lead_root;
        // Solve for r_k downward by matching the coefficient of s^(d+k).
        for k in (0..d).rev() {
            let mut acc = self.coeffs[d + k].clone();
            for i in (k + 1)..=d {
                let j = d + k - i;
                if j > d || j <= k {
                    continue;
                }
                acc -= &r[i] * &r[j];
            }
            let denom = BigInt::from(2) * &r[d];
            let (q, rem) = acc.div_rem(&denom);
            if !rem.is_zero() {
                return None;
            }
            r[k] = q;
        }
        let cand = ZPoly::from_coeffs(r);
        if cand.mul(&cand) == *self {
            Some(cand)
        } else {
            None
        }
    }
}

/// Exact integer square root, demanding a perfect square of a nonnegative input.
pub fn exact_int_sqrt(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    if &(&r * &r) == n {
        Some(r)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(coeffs: &[i64]) -> ZPoly {
        ZPoly::from_coeffs(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    #[test]
    fn gcd_of_products() {
        let a = p(&[-1, 0, 1]); // s^2 - 1
        let b = p(&[1, 1]); // s + 1
        assert_eq!(a.gcd(&b), b);
        let c = p(&[-1, 1]); // s - 1
        assert_eq!(a.div_exact(&b), c);
    }

    #[test]
    fn sqrt_roundtrip() {
        let a = p(&[1, 2, 3]);
        let sq = a.mul(&a);
        assert_eq!(sq.sqrt(), Some(a));
        assert_eq!(p(&[1, 1]).sqrt(), None);
    }

    #[test]
    fn primitive_normalizes_sign() {
        let a = p(&[-2, -4]);
        let (prim, c) = a.primitive();
        assert_eq!(prim, p(&[1, 2]));
        assert_eq!(c, BigInt::from(-2));
    }
}
