//! Exact arithmetic in the field Q(q^{1/2}).
//!
//! Elements are reduced fractions of integer polynomials in the formal
//! variable `s` with `q = s^2`, together with a power of `s` carrying the
//! Laurent part. Equality is structural on the canonical form, every
//! operation is exact, and the classical limit is evaluation at `s = 1`
//! (a pole there is a value, not an error).

mod poly;

pub use poly::{exact_int_sqrt, ZPoly};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ScalarError {
    #[error("q-binomial requires m >= n >= 0, got m = {m}, n = {n}")]
    BinomialDomain { m: i64, n: i64 },
    #[error("division by zero scalar")]
    DivisionByZero,
}

/// An element of Q(q^{1/2}): `s^shift * num(s) / den(s)` in reduced form.
///
/// Invariants: `num` and `den` have nonzero constant term (the `s`-valuation
/// lives in `shift`), `gcd(num, den) = 1` as polynomials, the integer
/// contents of `num` and `den` are coprime, and `den` has positive leading
/// coefficient. Zero is `(0, 0, 1)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QScalar {
    shift: i64,
    num: ZPoly,
    den: ZPoly,
}

/// Image of a scalar under evaluation at q = 1: an exact rational, or a pole.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LimitValue {
    Finite(Rational),
    Pole,
}

impl LimitValue {
    pub fn finite(&self) -> Option<&Rational> {
        match self {
            LimitValue::Finite(r) => Some(r),
            LimitValue::Pole => None,
        }
    }

    pub fn is_pole(&self) -> bool {
        matches!(self, LimitValue::Pole)
    }
}

impl fmt::Display for LimitValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LimitValue::Finite(r) => write!(f, "{r}"),
            LimitValue::Pole => write!(f, "pole at q=1"),
        }
    }
}

/// Exact rational number in lowest terms with positive denominator.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Rational {
    pub num: BigInt,
    pub den: BigInt,
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // Denominators are positive by the constructor invariant.
        (&self.num * &other.den).cmp(&(&other.num * &self.den))
    }
}

impl Rational {
    pub fn new(num: BigInt, den: BigInt) -> Self {
        assert!(!den.is_zero(), "rational with zero denominator");
        let mut g = num.gcd(&den);
        if g.is_zero() {
            g = BigInt::one();
        }
        if den.is_negative() {
            g = -g;
        }
        Rational {
            num: num / &g,
            den: den / &g,
        }
    }

    pub fn from_int(n: i64) -> Self {
        Rational {
            num: BigInt::from(n),
            den: BigInt::one(),
        }
    }

    pub fn zero() -> Self {
        Rational::from_int(0)
    }

    pub fn one() -> Self {
        Rational::from_int(1)
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.den.is_one()
    }

    /// Twice the value as an exact integer, if the value is in (1/2)Z.
    pub fn doubled_integer(&self) -> Option<BigInt> {
        let two = BigInt::from(2) * &self.num;
        let (q, r) = two.div_rem(&self.den);
        if r.is_zero() {
            Some(q)
        } else {
            None
        }
    }

    pub fn add(&self, o: &Rational) -> Rational {
        Rational::new(&self.num * &o.den + &o.num * &self.den, &self.den * &o.den)
    }

    pub fn sub(&self, o: &Rational) -> Rational {
        Rational::new(&self.num * &o.den - &o.num * &self.den, &self.den * &o.den)
    }

    pub fn mul(&self, o: &Rational) -> Rational {
        Rational::new(&self.num * &o.num, &self.den * &o.den)
    }

    pub fn div(&self, o: &Rational) -> Rational {
        assert!(!o.is_zero(), "rational division by zero");
        Rational::new(&self.num * &o.den, &self.den * &o.num)
    }

    pub fn neg(&self) -> Rational {
        Rational {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl QScalar {
    fn normalized(shift: i64, num: ZPoly, den: ZPoly) -> Self {
        assert!(!den.is_zero(), "scalar with zero denominator");
        if num.is_zero() {
            return QScalar {
                shift: 0,
                num: ZPoly::zero(),
                den: ZPoly::one(),
            };
        }
        let vn = num.valuation() as i64;
        let vd = den.valuation() as i64;
        let num = num.shift_down(vn as usize);
        let den = den.shift_down(vd as usize);
        let shift = shift + vn - vd;
        let g = num.gcd(&den);
        let (mut num, mut den) = if g.is_one() {
            (num, den)
        } else {
            (num.div_exact(&g), den.div_exact(&g))
        };
        let cn = num.content();
        let cd = den.content();
        let mut c = cn.gcd(&cd);
        if den.leading().is_negative() {
            c = -c;
        }
        if !c.is_one() {
            num = ZPoly {
                coeffs: num.coeffs.iter().map(|a| a / &c).collect(),
            };
            den = ZPoly {
                coeffs: den.coeffs.iter().map(|a| a / &c).collect(),
            };
        }
        QScalar { shift, num, den }
    }

    pub fn zero() -> Self {
        QScalar {
            shift: 0,
            num: ZPoly::zero(),
            den: ZPoly::one(),
        }
    }

    pub fn one() -> Self {
        QScalar {
            shift: 0,
            num: ZPoly::one(),
            den: ZPoly::one(),
        }
    }

    pub fn from_int(n: i64) -> Self {
        QScalar::normalized(0, ZPoly::constant(BigInt::from(n)), ZPoly::one())
    }

    pub fn from_rational(num: i64, den: i64) -> Self {
        assert!(den != 0);
        QScalar::normalized(
            0,
            ZPoly::constant(BigInt::from(num)),
            ZPoly::constant(BigInt::from(den)),
        )
    }

    pub fn from_big_rational(r: &Rational) -> Self {
        QScalar::normalized(
            0,
            ZPoly::constant(r.num.clone()),
            ZPoly::constant(r.den.clone()),
        )
    }

    /// q^(k/2), i.e. s^k.
    pub fn s_power(k: i64) -> Self {
        QScalar {
            shift: k,
            num: ZPoly::one(),
            den: ZPoly::one(),
        }
    }

    /// q^k.
    pub fn q_power(k: i64) -> Self {
        QScalar::s_power(2 * k)
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.shift == 0 && self.num.is_one() && self.den.is_one()
    }

    /// Max degree over numerator and denominator, a size measure used for
    /// pivot selection and failure witnesses.
    pub fn complexity(&self) -> usize {
        self.num.degree() + self.den.degree() + self.shift.unsigned_abs() as usize
    }

    pub fn inv(&self) -> Result<Self, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(QScalar::normalized(
            -self.shift,
            self.den.clone(),
            self.num.clone(),
        ))
    }

    pub fn pow(&self, e: i64) -> Self {
        if e == 0 {
            return QScalar::one();
        }
        let base = if e < 0 {
            self.inv().expect("pow of zero with negative exponent")
        } else {
            self.clone()
        };
        let mut acc = QScalar::one();
        for _ in 0..e.unsigned_abs() {
            acc = &acc * &base;
        }
        acc
    }

    /// Exact value at s = 1, or the pole marker.
    pub fn limit_at_one(&self) -> LimitValue {
        let d = self.den.eval_one();
        if d.is_zero() {
            return LimitValue::Pole;
        }
        LimitValue::Finite(Rational::new(self.num.eval_one(), d))
    }

    pub fn is_regular_at_one(&self) -> bool {
        !self.den.eval_one().is_zero()
    }

    /// Recognize `sign * s^k` (unit monomials); used for eigenvalue ladders.
    pub fn as_signed_s_power(&self) -> Option<(i8, i64)> {
        if self.den.is_one() && self.num.is_one() {
            Some((1, self.shift))
        } else if self.den.is_one() && self.num == ZPoly::constant(BigInt::from(-1)) {
            Some((-1, self.shift))
        } else {
            None
        }
    }

    /// Recognize `q^k` exactly.
    pub fn as_q_power(&self) -> Option<i64> {
        match self.as_signed_s_power() {
            Some((1, k)) if k % 2 == 0 => Some(k / 2),
            _ => None,
        }
    }

    /// Exact square root with positive leading numerator coefficient, if the
    /// value is a perfect square in Q(q^{1/2}).
    pub fn sqrt(&self) -> Option<QScalar> {
        if self.is_zero() {
            return Some(QScalar::zero());
        }
        if self.shift % 2 != 0 {
            return None;
        }
        if self.num.leading().is_negative() {
            return None;
        }
        let n = self.num.sqrt()?;
        let d = self.den.sqrt()?;
        Some(QScalar::normalized(self.shift / 2, n, d))
    }

    /// The square root whose value at q = 1 is the given positive target;
    /// `None` if the value is not a square or the limit does not match ±target.
    pub fn sqrt_with_limit(&self, target: &Rational) -> Option<QScalar> {
        let r = self.sqrt()?;
        match r.limit_at_one() {
            LimitValue::Finite(v) if v == *target => Some(r),
            LimitValue::Finite(v) if v == target.neg() => Some(-&r),
            _ => None,
        }
    }
}

impl Add for &QScalar {
    type Output = QScalar;
    fn add(self, o: &QScalar) -> QScalar {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        let m = self.shift.min(o.shift);
        let a = ZPoly::monomial(BigInt::one(), (self.shift - m) as usize)
            .mul(&self.num)
            .mul(&o.den);
        let b = ZPoly::monomial(BigInt::one(), (o.shift - m) as usize)
            .mul(&o.num)
            .mul(&self.den);
        QScalar::normalized(m, a.add(&b), self.den.mul(&o.den))
    }
}

impl Sub for &QScalar {
    type Output = QScalar;
    fn sub(self, o: &QScalar) -> QScalar {
        self + &(-o)
    }
}

impl Mul for &QScalar {
    type Output = QScalar;
    fn mul(self, o: &QScalar) -> QScalar {
        if self.is_zero() || o.is_zero() {
            return QScalar::zero();
        }
        QScalar::normalized(
            self.shift + o.shift,
            self.num.mul(&o.num),
            self.den.mul(&o.den),
        )
    }
}

impl Div for &QScalar {
    type Output = QScalar;
    fn div(self, o: &QScalar) -> QScalar {
        let inv = o.inv().expect("scalar division by zero");
        self * &inv
    }
}

impl Neg for &QScalar {
    type Output = QScalar;
    fn neg(self) -> QScalar {
        QScalar {
            shift: self.shift,
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }
}

impl fmt::Display for QScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let num = laurent_string(self.shift, &self.num);
        if self.den.is_one() {
            write!(f, "{num}")
        } else {
            write!(f, "({})/({})", num, laurent_string(0, &self.den))
        }
    }
}

/// Render `s^shift * p(s)` as a Laurent polynomial in q, descending powers,
/// with s^2 written as q and odd powers as half-integer q-exponents.
fn laurent_string(shift: i64, p: &ZPoly) -> String {
    let mut terms = Vec::new();
    for (i, c) in p.coeffs.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let e = shift + i as i64;
        let mag = c.abs();
        let body = if e == 0 {
            format!("{mag}")
        } else {
            let pow = if e % 2 == 0 {
                let k = e / 2;
                if k == 1 {
                    "q".to_string()
                } else {
                    format!("q^{k}")
                }
            } else {
                format!("q^({e}/2)")
            };
            if mag.is_one() {
                pow
            } else {
                format!("{mag}*{pow}")
            }
        };
        let sign = if c.is_negative() { "-" } else { "+" };
        terms.push((sign, body));
    }
    let mut out = String::new();
    for (k, (sign, body)) in terms.iter().enumerate() {
        if k == 0 {
            if *sign == "-" {
                out.push('-');
            }
        } else {
            out.push_str(if *sign == "-" { " - " } else { " + " });
        }
        out.push_str(body);
    }
    out
}

/// Parse a scalar string: signed sums of terms `c`, `c/d`, `q^k`,
/// `q^(k/2)`, and products thereof joined by `*`, e.g. "q^-1", "-1",
/// "2*q + q^-1", "q^(1/2)".
pub fn parse_scalar(input: &str) -> Result<QScalar, String> {
    let mut acc = QScalar::zero();
    let cleaned: String = input.chars().filter(|c| !c.is_whitespace()).collect();
    if cleaned.is_empty() {
        return Err("empty scalar".into());
    }
    // Split into signed terms at top level.
    let bytes = cleaned.as_bytes();
    let mut terms: Vec<(i64, String)> = Vec::new();
    let mut start = 0usize;
    let mut sign = 1i64;
    let mut depth = 0i32;
    let mut i = 0usize;
    while i < bytes.len() {
        match bytes[i] as char {
            '(' => depth += 1,
            ')' => depth -= 1,
            '+' | '-' if depth == 0 && i > 0 && bytes[i - 1] as char != '^' && i != start => {
                terms.push((sign, cleaned[start..i].to_string()));
                sign = if bytes[i] as char == '-' { -1 } else { 1 };
                start = i + 1;
            }
            '-' if depth == 0 && i == start => {
                sign = -sign;
                start = i + 1;
            }
            _ => {}
        }
        i += 1;
    }
    terms.push((sign, cleaned[start..].to_string()));
    for (sign, term) in terms {
        if term.is_empty() {
            return Err(format!("dangling sign in `{input}`"));
        }
        let mut value = QScalar::from_int(sign);
        for factor in term.split('*') {
            value = &value * &parse_factor(factor)?;
        }
        acc = &acc + &value;
    }
    Ok(acc)
}

fn parse_factor(f: &str) -> Result<QScalar, String> {
    if let Some(rest) = f.strip_prefix("q^") {
        let body = rest.trim_start_matches('(').trim_end_matches(')');
        if let Some(half) = body.strip_suffix("/2") {
            let k: i64 = half.parse().map_err(|_| format!("bad exponent `{f}`"))?;
            return Ok(QScalar::s_power(k));
        }
        let k: i64 = body.parse().map_err(|_| format!("bad exponent `{f}`"))?;
        return Ok(QScalar::q_power(k));
    }
    if f == "q" {
        return Ok(QScalar::q_power(1));
    }
    if let Some((num, den)) = f.split_once('/') {
        let n: i64 = num.parse().map_err(|_| format!("bad numerator `{f}`"))?;
        let d: i64 = den.parse().map_err(|_| format!("bad denominator `{f}`"))?;
        if d == 0 {
            return Err("zero denominator".into());
        }
        return Ok(QScalar::from_rational(n, d));
    }
    let n: i64 = f.parse().map_err(|_| format!("unrecognized factor `{f}`"))?;
    Ok(QScalar::from_int(n))
}

/// The q-integer [n]_{q^a} = (q^{an} - q^{-an}) / (q^a - q^{-a}).
pub fn qint(n: i64, a: i64) -> QScalar {
    assert!(a >= 1, "qint requires a >= 1");
    if n == 0 {
        return QScalar::zero();
    }
    let m = n.unsigned_abs() as i64;
    let mut acc = QScalar::zero();
    for j in 0..m {
        acc = &acc + &QScalar::q_power(a * (m - 1 - 2 * j));
    }
    if n < 0 {
        -&acc
    } else {
        acc
    }
}

/// [n]_{q^a}! with [0]! = 1.
pub fn qfactorial(n: i64, a: i64) -> QScalar {
    assert!(n >= 0);
    let mut acc = QScalar::one();
    for k in 1..=n {
        acc = &acc * &qint(k, a);
    }
    acc
}

/// The q-binomial coefficient [m choose n]_{q^a}.
pub fn qbinom(m: i64, n: i64, a: i64) -> Result<QScalar, ScalarError> {
    if m < n || n < 0 {
        return Err(ScalarError::BinomialDomain { m, n });
    }
    let num = qfactorial(m, a);
    let den = &qfactorial(m - n, a) * &qfactorial(n, a);
    Ok(&num / &den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q() -> QScalar {
        QScalar::q_power(1)
    }

    #[test]
    fn qint_small_values() {
        assert!(qint(0, 1).is_zero());
        let expected = &q() + &QScalar::q_power(-1);
        assert_eq!(qint(2, 1), expected);
        // [3]_{q^2} = q^4 + 1 + q^-4, from expanding (q^6-q^-6)/(q^2-q^-2).
        let expected = &(&QScalar::q_power(4) + &QScalar::one()) + &QScalar::q_power(-4);
        assert_eq!(qint(3, 2), expected);
    }

    #[test]
    fn qint_matches_ratio_form() {
        for n in -6..=6 {
            for a in 1..=3 {
                let direct = qint(n, a);
                let num = &QScalar::q_power(a * n) - &QScalar::q_power(-a * n);
                let den = &QScalar::q_power(a) - &QScalar::q_power(-a);
                assert_eq!(direct, &num / &den, "n={n} a={a}");
            }
        }
    }

    #[test]
    fn qbinom_values() {
        assert_eq!(qbinom(5, 0, 1).unwrap(), QScalar::one());
        assert_eq!(qbinom(2, 1, 1).unwrap(), qint(2, 1));
        // Gaussian expansion of [4 choose 2]_q: q^2 + q^-2 + 2 + ... computed
        // two ways, by factorial ratio and by the explicit Laurent sum.
        let val = qbinom(4, 2, 1).unwrap();
        let ratio = &(&qint(4, 1) * &qint(3, 1)) / &qint(2, 1);
        assert_eq!(val, ratio);
        // q^4 + q^2 + 2 + q^-2 + q^-4
        let explicit = [
            QScalar::q_power(4),
            QScalar::q_power(2),
            QScalar::from_int(2),
            QScalar::q_power(-2),
            QScalar::q_power(-4),
        ]
        .iter()
        .fold(QScalar::zero(), |acc, t| &acc + t);
        assert_eq!(val, explicit);
        assert!(qbinom(1, 2, 1).is_err());
    }

    #[test]
    fn limits() {
        assert_eq!(
            qint(5, 1).limit_at_one(),
            LimitValue::Finite(Rational::from_int(5))
        );
        let x = &(&q() - &QScalar::one()) / &(&(&q() * &q()) - &QScalar::one());
        assert_eq!(
            x.limit_at_one(),
            LimitValue::Finite(Rational::new(BigInt::from(1), BigInt::from(2)))
        );
        let pole = &QScalar::one() / &(&q() - &QScalar::one());
        assert!(pole.limit_at_one().is_pole());
    }

    #[test]
    fn sqrt_and_powers() {
        let x = QScalar::q_power(3);
        assert_eq!(x.sqrt(), Some(QScalar::s_power(3)));
        assert_eq!(QScalar::s_power(1).as_signed_s_power(), Some((1, 1)));
        assert_eq!(QScalar::q_power(-2).as_q_power(), Some(-2));
        assert_eq!((-&QScalar::q_power(2)).as_signed_s_power(), Some((-1, 4)));
        assert_eq!((&q() + &QScalar::one()).as_q_power(), None);
    }

    #[test]
    fn parse_scalar_forms() {
        assert_eq!(parse_scalar("q^-1").unwrap(), QScalar::q_power(-1));
        assert_eq!(parse_scalar("-1").unwrap(), QScalar::from_int(-1));
        assert_eq!(parse_scalar("q").unwrap(), QScalar::q_power(1));
        assert_eq!(
            parse_scalar("2*q + q^-1").unwrap(),
            &(&QScalar::from_int(2) * &QScalar::q_power(1)) + &QScalar::q_power(-1)
        );
        assert_eq!(parse_scalar("q^(1/2)").unwrap(), QScalar::s_power(1));
        assert_eq!(parse_scalar("1/2").unwrap(), QScalar::from_rational(1, 2));
        assert_eq!(parse_scalar("-q^-2").unwrap(), -&QScalar::q_power(-2));
        assert!(parse_scalar("zz").is_err());
        // Round-trip through display for Laurent values.
        for s in ["q + q^-1", "q^2 - 2 + q^-2", "-q^(3/2)"] {
            let v = parse_scalar(s).unwrap();
            assert_eq!(parse_scalar(&v.to_string()).unwrap(), v);
        }
    }

    #[test]
    fn display_forms() {
        assert_eq!(qint(2, 1).to_string(), "q + q^-1");
        assert_eq!(QScalar::s_power(1).to_string(), "q^(1/2)");
        assert_eq!(QScalar::zero().to_string(), "0");
        let frac = &QScalar::one() / &(&q() - &QScalar::one());
        assert_eq!(frac.to_string(), "(1)/(q - 1)");
    }

    fn arb_scalar() -> impl Strategy<Value = QScalar> {
        (
            -3i64..=3,
            proptest::collection::vec(-4i64..=4, 1..4),
            proptest::collection::vec(-4i64..=4, 1..4),
        )
            .prop_filter_map("nonzero denominator", |(sh, n, d)| {
                let den = ZPoly::from_coeffs(d.into_iter().map(BigInt::from).collect());
                if den.is_zero() {
                    return None;
                }
                let num = ZPoly::from_coeffs(n.into_iter().map(BigInt::from).collect());
                Some(QScalar::normalized(sh, num, den))
            })
    }

    proptest! {
        #[test]
        fn qint_odd_symmetry(n in -20i64..=20, a in 1i64..=4) {
            prop_assert_eq!(qint(-n, a), -&qint(n, a));
        }

        #[test]
        fn qbinom_symmetry(m in 0i64..=8, n in 0i64..=8, a in 1i64..=2) {
            prop_assume!(m >= n);
            prop_assert_eq!(qbinom(m, n, a).unwrap(), qbinom(m, m - n, a).unwrap());
        }

        #[test]
        fn div_mul_roundtrip(x in arb_scalar(), y in arb_scalar()) {
            prop_assume!(!y.is_zero());
            let z = &(&x / &y) * &y;
            prop_assert_eq!(z, x);
        }

        #[test]
        fn limit_is_ring_homomorphism(x in arb_scalar(), y in arb_scalar()) {
            use LimitValue::Finite;
            let (lx, ly) = (x.limit_at_one(), y.limit_at_one());
            if let (Finite(a), Finite(b)) = (&lx, &ly) {
                let sum = (&x + &y).limit_at_one();
                let prod = (&x * &y).limit_at_one();
                // x + y and x * y are regular whenever x and y are.
                prop_assert_eq!(sum, Finite(a.add(b)));
                prop_assert_eq!(prod, Finite(a.mul(b)));
            }
        }
    }
}
