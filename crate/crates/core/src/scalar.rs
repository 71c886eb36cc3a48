//! Exact arithmetic in the cyclotomic field Q(zeta_24), zeta = e^{i pi/12},
//! plus a floating complex backend, unified behind the [`Scalar`] type.
//!
//! Elements are stored as coordinates over the power basis {1, zeta, ...,
//! zeta^7} of Q[x]/(Phi_24), Phi_24(x) = x^8 - x^4 + 1. The field contains
//! i = zeta^6, sqrt(2), sqrt(3), sqrt(6) and every phase e^{ik pi/12}, which
//! is all the arithmetic the basis constructions need.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Arbitrary-precision rational; always reduced, denominator > 0, zero is 0/1.
pub type Rational = num_rational::BigRational;

/// Default tolerance for float-backend equality of scalars and residuals.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;

pub fn rational(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Canonical `p/q` form, denominator always written (so `2` prints as `2/1`).
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let (num, den) = s
        .split_once('/')
        .ok_or_else(|| Error::Parse(format!("rational `{s}` is not in p/q form")))?;
    let num: BigInt = num
        .parse()
        .map_err(|_| Error::Parse(format!("bad numerator in `{s}`")))?;
    let den: BigInt = den
        .parse()
        .map_err(|_| Error::Parse(format!("bad denominator in `{s}`")))?;
    if den.is_zero() {
        return Err(Error::Parse(format!("zero denominator in `{s}`")));
    }
    Ok(Rational::new(num, den))
}

fn rat_to_f64(r: &Rational) -> f64 {
    r.to_f64().expect("rational out of f64 range")
}

// ---------------------------------------------------------------------------
// CycloNumber
// ---------------------------------------------------------------------------

/// An element of Q(zeta_24) in canonical (fully reduced) coordinates, so
/// equality is coefficient-wise equality.
#[derive(Clone, PartialEq, Eq)]
pub struct CycloNumber {
    coeffs: [Rational; 8],
}

fn zero_coeffs() -> [Rational; 8] {
    std::array::from_fn(|_| Rational::zero())
}

impl CycloNumber {
    pub fn zero() -> Self {
        CycloNumber {
            coeffs: zero_coeffs(),
        }
    }

    pub fn one() -> Self {
        Self::from_rational(Rational::one())
    }

    pub fn from_rational(r: Rational) -> Self {
        let mut coeffs = zero_coeffs();
        coeffs[0] = r;
        CycloNumber { coeffs }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(rational(n, 1))
    }

    pub fn from_coeffs(coeffs: [Rational; 8]) -> Self {
        CycloNumber { coeffs }
    }

    pub fn coeffs(&self) -> &[Rational; 8] {
        &self.coeffs
    }

    /// zeta^k for any integer k, reduced mod Phi_24.
    pub fn zeta_pow(k: i64) -> Self {
        let k = k.rem_euclid(24) as usize;
        if k < 8 {
            let mut coeffs = zero_coeffs();
            coeffs[k] = Rational::one();
            CycloNumber { coeffs }
        } else if k < 12 {
            // zeta^8 = zeta^4 - 1, so zeta^k = zeta^{k-4} - zeta^{k-8}.
            let mut coeffs = zero_coeffs();
            coeffs[k - 4] = Rational::one();
            coeffs[k - 8] = -Rational::one();
            CycloNumber { coeffs }
        } else {
            // zeta^12 = -1.
            -Self::zeta_pow((k - 12) as i64)
        }
    }

    /// The imaginary unit, zeta^6.
    pub fn i() -> Self {
        Self::zeta_pow(6)
    }

    /// sqrt(2) = zeta^3 + zeta^{-3}.
    pub fn sqrt2() -> Self {
        &Self::zeta_pow(3) + &Self::zeta_pow(-3)
    }

    /// sqrt(3) = zeta^2 + zeta^{-2}.
    pub fn sqrt3() -> Self {
        &Self::zeta_pow(2) + &Self::zeta_pow(-2)
    }

    pub fn sqrt6() -> Self {
        &Self::sqrt2() * &Self::sqrt3()
    }

    /// 1/sqrt(2) = sqrt(2)/2.
    pub fn inv_sqrt2() -> Self {
        Self::sqrt2().scale(&rational(1, 2))
    }

    pub fn inv_sqrt3() -> Self {
        Self::sqrt3().scale(&rational(1, 3))
    }

    pub fn inv_sqrt6() -> Self {
        Self::sqrt6().scale(&rational(1, 6))
    }

    /// a/b + (c/d) sqrt(2) + (e/f) sqrt(3) + (g/h) sqrt(6): the real subfield.
    pub fn from_real_parts(parts: [Rational; 4]) -> Self {
        let [a, b, c, d] = parts;
        let mut acc = Self::from_rational(a);
        acc = &acc + &Self::sqrt2().scale(&b);
        acc = &acc + &Self::sqrt3().scale(&c);
        acc = &acc + &Self::sqrt6().scale(&d);
        acc
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Some(r) when the element is a plain rational.
    pub fn as_rational(&self) -> Option<&Rational> {
        if self.coeffs[1..].iter().all(|c| c.is_zero()) {
            Some(&self.coeffs[0])
        } else {
            None
        }
    }

    pub fn scale(&self, r: &Rational) -> Self {
        let coeffs = std::array::from_fn(|k| &self.coeffs[k] * r);
        CycloNumber { coeffs }
    }

    /// Complex conjugation: zeta^k -> zeta^{24-k}. An involutive field
    /// automorphism.
    pub fn conj(&self) -> Self {
        let mut acc = Self::zero();
        for (k, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                acc = &acc + &Self::zeta_pow(-(k as i64)).scale(c);
            }
        }
        acc
    }

    pub fn is_real(&self) -> bool {
        self.conj() == *self
    }

    /// a * conj(a); always lands in the real subfield.
    pub fn abs2(&self) -> Self {
        self * &self.conj()
    }

    /// Multiplicative inverse via extended Euclid in Q[x] against Phi_24.
    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        // r0 = Phi_24 = x^8 - x^4 + 1, r1 = self; track t with t0 = 0, t1 = 1.
        let mut r0: Vec<Rational> = vec![
            Rational::one(),
            Rational::zero(),
            Rational::zero(),
            Rational::zero(),
            -Rational::one(),
            Rational::zero(),
            Rational::zero(),
            Rational::zero(),
            Rational::one(),
        ];
        let mut r1 = poly_trim(self.coeffs.to_vec());
        let mut t0: Vec<Rational> = vec![];
        let mut t1: Vec<Rational> = vec![Rational::one()];
        while poly_deg(&r1) > 0 {
            let (q, r) = poly_divmod(&r0, &r1);
            let t2 = poly_sub(&t0, &poly_mul(&q, &t1));
            r0 = r1;
            r1 = r;
            t0 = t1;
            t1 = t2;
        }
        // Phi_24 is irreducible over Q, so the gcd of any nonzero element
        // with it is a nonzero constant.
        let c = r1.first().cloned().unwrap_or_else(Rational::zero);
        debug_assert!(!c.is_zero());
        let inv_c = Rational::one() / c;
        let mut coeffs = zero_coeffs();
        for (k, v) in t1.iter().enumerate() {
            coeffs[k] = v * &inv_c;
        }
        Ok(CycloNumber { coeffs })
    }

    /// The phase zeta^{12 p / q} when theta = p pi / q with q | 12.
    pub fn try_phase(theta: &AngleFrac) -> Option<Self> {
        theta.phase_exponent().map(|k| Self::zeta_pow(k as i64))
    }

    pub fn to_complex(&self) -> (f64, f64) {
        let mut re = 0.0;
        let mut im = 0.0;
        for (k, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                let angle = (k as f64) * std::f64::consts::PI / 12.0;
                let v = rat_to_f64(c);
                re += v * angle.cos();
                im += v * angle.sin();
            }
        }
        (re, im)
    }
}

impl fmt::Debug for CycloNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| {
                if k == 0 {
                    format!("{c}")
                } else {
                    format!("{c}*z^{k}")
                }
            })
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

impl Add for &CycloNumber {
    type Output = CycloNumber;
    fn add(self, rhs: &CycloNumber) -> CycloNumber {
        let coeffs = std::array::from_fn(|k| &self.coeffs[k] + &rhs.coeffs[k]);
        CycloNumber { coeffs }
    }
}

impl Sub for &CycloNumber {
    type Output = CycloNumber;
    fn sub(self, rhs: &CycloNumber) -> CycloNumber {
        let coeffs = std::array::from_fn(|k| &self.coeffs[k] - &rhs.coeffs[k]);
        CycloNumber { coeffs }
    }
}

impl Neg for &CycloNumber {
    type Output = CycloNumber;
    fn neg(self) -> CycloNumber {
        let coeffs = std::array::from_fn(|k| -self.coeffs[k].clone());
        CycloNumber { coeffs }
    }
}

impl Neg for CycloNumber {
    type Output = CycloNumber;
    fn neg(self) -> CycloNumber {
        -&self
    }
}

impl Mul for &CycloNumber {
    type Output = CycloNumber;
    fn mul(self, rhs: &CycloNumber) -> CycloNumber {
        // Schoolbook product up to degree 14, then reduce with
        // zeta^e = zeta^{e-4} - zeta^{e-8} from the top down.
        let mut acc: Vec<Rational> = vec![Rational::zero(); 15];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                acc[i + j] = &acc[i + j] + &(a * b);
            }
        }
        for e in (8..=14).rev() {
            if acc[e].is_zero() {
                continue;
            }
            let v = std::mem::replace(&mut acc[e], Rational::zero());
            acc[e - 4] = &acc[e - 4] + &v;
            acc[e - 8] = &acc[e - 8] - &v;
        }
        let coeffs = std::array::from_fn(|k| acc[k].clone());
        CycloNumber { coeffs }
    }
}

// Polynomial helpers over Q for the extended Euclid; coefficient vectors are
// little-endian with no trailing zeros.

fn poly_trim(mut p: Vec<Rational>) -> Vec<Rational> {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

fn poly_deg(p: &[Rational]) -> isize {
    p.len() as isize - 1
}

fn poly_sub(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let n = a.len().max(b.len());
    let mut out = vec![Rational::zero(); n];
    for (k, slot) in out.iter_mut().enumerate() {
        let av = a.get(k).cloned().unwrap_or_else(Rational::zero);
        let bv = b.get(k).cloned().unwrap_or_else(Rational::zero);
        *slot = av - bv;
    }
    poly_trim(out)
}

fn poly_mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, av) in a.iter().enumerate() {
        if av.is_zero() {
            continue;
        }
        for (j, bv) in b.iter().enumerate() {
            out[i + j] = &out[i + j] + &(av * bv);
        }
    }
    poly_trim(out)
}

fn poly_divmod(a: &[Rational], b: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
    assert!(!b.is_empty(), "polynomial division by zero");
    let db = b.len() - 1;
    let lead = &b[db];
    let mut rem = a.to_vec();
    if rem.len() <= db {
        return (vec![], poly_trim(rem));
    }
    // Synthetic division, eliminating one leading coefficient per step.
    let mut quot = vec![Rational::zero(); rem.len() - db];
    for dr in (db..rem.len()).rev() {
        if rem[dr].is_zero() {
            continue;
        }
        let factor = &rem[dr] / lead;
        rem[dr] = Rational::zero();
        for k in 0..db {
            rem[dr - db + k] = &rem[dr - db + k] - &(&factor * &b[k]);
        }
        quot[dr - db] = factor;
    }
    (poly_trim(quot), poly_trim(rem))
}

// ---------------------------------------------------------------------------
// AngleFrac
// ---------------------------------------------------------------------------

/// An angle theta = r * pi with r rational, canonicalized into [0, 2pi).
/// Exactly embeddable into Q(zeta_24) iff the reduced denominator divides 12.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AngleFrac(Rational);

impl AngleFrac {
    pub fn new(num: i64, den: i64) -> Self {
        Self::from_ratio(rational(num, den))
    }

    pub fn from_ratio(r: Rational) -> Self {
        let two = rational(2, 1);
        let mut r = r % &two;
        if r.is_negative() {
            r += &two;
        }
        AngleFrac(r)
    }

    pub fn zero() -> Self {
        AngleFrac(Rational::zero())
    }

    /// The underlying multiple of pi, in [0, 2).
    pub fn ratio(&self) -> &Rational {
        &self.0
    }

    pub fn add(&self, other: &AngleFrac) -> Self {
        Self::from_ratio(&self.0 + &other.0)
    }

    pub fn sub(&self, other: &AngleFrac) -> Self {
        Self::from_ratio(&self.0 - &other.0)
    }

    pub fn neg(&self) -> Self {
        Self::from_ratio(-self.0.clone())
    }

    pub fn is_embeddable(&self) -> bool {
        self.phase_exponent().is_some()
    }

    /// Some(k) with e^{i theta} = zeta^k when theta is a multiple of pi/12.
    pub fn phase_exponent(&self) -> Option<u8> {
        let scaled = &self.0 * &rational(12, 1);
        if scaled.is_integer() {
            scaled.to_integer().to_u8()
        } else {
            None
        }
    }

    pub fn to_radians(&self) -> f64 {
        rat_to_f64(&self.0) * std::f64::consts::PI
    }

    /// Circular distance to `other` in radians (always in [0, pi]).
    pub fn circular_distance(&self, other: &AngleFrac) -> f64 {
        let d = self.sub(other).to_radians();
        d.min(2.0 * std::f64::consts::PI - d)
    }
}

impl fmt::Display for AngleFrac {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{} pi", self.0.numer(), self.0.denom())
    }
}

#[derive(Serialize, Deserialize)]
struct AngleRepr {
    pi_frac: String,
}

impl Serialize for AngleFrac {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        AngleRepr {
            pi_frac: format_rational(&self.0),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for AngleFrac {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = AngleRepr::deserialize(d)?;
        let r = parse_rational(&repr.pi_frac).map_err(serde::de::Error::custom)?;
        Ok(AngleFrac::from_ratio(r))
    }
}

// ---------------------------------------------------------------------------
// Scalar
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Exact,
    Float,
}

/// A tagged complex value: exact cyclotomic or floating. Containers keep the
/// tag uniform; arithmetic across backends is a logic error and panics.
// The exact variant dwarfs the float one; containers here are at most 6x6.
#[allow(clippy::large_enum_variant)]
#[derive(Clone, PartialEq, Debug)]
pub enum Scalar {
    Exact(CycloNumber),
    Float { re: f64, im: f64 },
}

impl Scalar {
    pub fn backend(&self) -> Backend {
        match self {
            Scalar::Exact(_) => Backend::Exact,
            Scalar::Float { .. } => Backend::Float,
        }
    }

    pub fn zero(backend: Backend) -> Self {
        match backend {
            Backend::Exact => Scalar::Exact(CycloNumber::zero()),
            Backend::Float => Scalar::Float { re: 0.0, im: 0.0 },
        }
    }

    pub fn one(backend: Backend) -> Self {
        match backend {
            Backend::Exact => Scalar::Exact(CycloNumber::one()),
            Backend::Float => Scalar::Float { re: 1.0, im: 0.0 },
        }
    }

    pub fn exact(c: CycloNumber) -> Self {
        Scalar::Exact(c)
    }

    pub fn from_rational_in(r: Rational, backend: Backend) -> Self {
        match backend {
            Backend::Exact => Scalar::Exact(CycloNumber::from_rational(r)),
            Backend::Float => Scalar::Float {
                re: rat_to_f64(&r),
                im: 0.0,
            },
        }
    }

    /// e^{i theta}: exact when the angle is a multiple of pi/12, floating
    /// otherwise (the backend tag records the degradation).
    pub fn phase(theta: &AngleFrac) -> Self {
        match CycloNumber::try_phase(theta) {
            Some(c) => Scalar::Exact(c),
            None => {
                let t = theta.to_radians();
                Scalar::Float {
                    re: t.cos(),
                    im: t.sin(),
                }
            }
        }
    }

    /// e^{i theta} in the requested backend; exact is refused for angles
    /// that are not multiples of pi/12.
    pub fn phase_in(theta: &AngleFrac, backend: Backend) -> Result<Self> {
        match backend {
            Backend::Exact => CycloNumber::try_phase(theta)
                .map(Scalar::Exact)
                .ok_or_else(|| Error::NotEmbeddable(theta.to_string())),
            Backend::Float => {
                let t = theta.to_radians();
                Ok(Scalar::Float {
                    re: t.cos(),
                    im: t.sin(),
                })
            }
        }
    }

    pub fn conj(&self) -> Self {
        match self {
            Scalar::Exact(c) => Scalar::Exact(c.conj()),
            Scalar::Float { re, im } => Scalar::Float { re: *re, im: -im },
        }
    }

    /// a * conj(a) as a (real) scalar of the same backend.
    pub fn abs2(&self) -> Self {
        match self {
            Scalar::Exact(c) => Scalar::Exact(c.abs2()),
            Scalar::Float { re, im } => Scalar::Float {
                re: re * re + im * im,
                im: 0.0,
            },
        }
    }

    pub fn inv(&self) -> Result<Self> {
        match self {
            Scalar::Exact(c) => Ok(Scalar::Exact(c.inv()?)),
            Scalar::Float { re, im } => {
                let m2 = re * re + im * im;
                if m2 == 0.0 {
                    return Err(Error::DivisionByZero);
                }
                Ok(Scalar::Float {
                    re: re / m2,
                    im: -im / m2,
                })
            }
        }
    }

    pub fn is_exactly_zero(&self) -> bool {
        match self {
            Scalar::Exact(c) => c.is_zero(),
            Scalar::Float { re, im } => *re == 0.0 && *im == 0.0,
        }
    }

    pub fn to_complex(&self) -> (f64, f64) {
        match self {
            Scalar::Exact(c) => c.to_complex(),
            Scalar::Float { re, im } => (*re, *im),
        }
    }

    pub fn modulus(&self) -> f64 {
        let (re, im) = self.to_complex();
        re.hypot(im)
    }

    pub fn to_float(&self) -> Scalar {
        let (re, im) = self.to_complex();
        Scalar::Float { re, im }
    }

    /// Backend-aware equality: coefficient-exact for exact values, within
    /// `tol` (complex distance) for floats.
    pub fn approx_eq(&self, other: &Scalar, tol: f64) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            _ => self.distance_to(other) <= tol,
        }
    }

    /// |self - other| evaluated as a float, regardless of backend.
    pub fn distance_to(&self, other: &Scalar) -> f64 {
        let (ar, ai) = self.to_complex();
        let (br, bi) = other.to_complex();
        (ar - br).hypot(ai - bi)
    }

    fn expect_same_backend(&self, other: &Scalar) {
        if self.backend() != other.backend() {
            panic!("mixed scalar backends in arithmetic");
        }
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        self.expect_same_backend(rhs);
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a + b),
            (Scalar::Float { re: a, im: b }, Scalar::Float { re: c, im: d }) => Scalar::Float {
                re: a + c,
                im: b + d,
            },
            _ => unreachable!(),
        }
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self.expect_same_backend(rhs);
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a - b),
            (Scalar::Float { re: a, im: b }, Scalar::Float { re: c, im: d }) => Scalar::Float {
                re: a - c,
                im: b - d,
            },
            _ => unreachable!(),
        }
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        self.expect_same_backend(rhs);
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a * b),
            (Scalar::Float { re: a, im: b }, Scalar::Float { re: c, im: d }) => Scalar::Float {
                re: a * c - b * d,
                im: a * d + b * c,
            },
            _ => unreachable!(),
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(c) => Scalar::Exact(-c),
            Scalar::Float { re, im } => Scalar::Float { re: -re, im: -im },
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ScalarRepr {
    Cyclo { cyclo: [String; 8] },
    Float { re: f64, im: f64 },
}

impl Serialize for Scalar {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let repr = match self {
            Scalar::Exact(c) => ScalarRepr::Cyclo {
                cyclo: std::array::from_fn(|k| format_rational(&c.coeffs[k])),
            },
            Scalar::Float { re, im } => ScalarRepr::Float { re: *re, im: *im },
        };
        repr.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match ScalarRepr::deserialize(d)? {
            ScalarRepr::Cyclo { cyclo } => {
                let mut coeffs = zero_coeffs();
                for (k, s) in cyclo.iter().enumerate() {
                    coeffs[k] = parse_rational(s).map_err(serde::de::Error::custom)?;
                }
                Ok(Scalar::Exact(CycloNumber::from_coeffs(coeffs)))
            }
            ScalarRepr::Float { re, im } => Ok(Scalar::Float { re, im }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn float_eval(c: &CycloNumber) -> (f64, f64) {
        c.to_complex()
    }

    #[test]
    fn zeta_six_squared_is_minus_one() {
        let i = CycloNumber::zeta_pow(6);
        assert_eq!(&i * &i, CycloNumber::from_int(-1));
    }

    #[test]
    fn zeta_order_is_24() {
        let mut acc = CycloNumber::one();
        let z = CycloNumber::zeta_pow(1);
        for _ in 0..24 {
            acc = &acc * &z;
        }
        assert_eq!(acc, CycloNumber::one());
        // Reduction consistency of x^8 against Phi_24.
        let expected = &CycloNumber::zeta_pow(4) - &CycloNumber::one();
        assert_eq!(CycloNumber::zeta_pow(8), expected);
    }

    #[test]
    fn sqrt2_squares_to_two() {
        let s = CycloNumber::sqrt2();
        assert_eq!(&s * &s, CycloNumber::from_int(2));
        let s3 = CycloNumber::sqrt3();
        assert_eq!(&s3 * &s3, CycloNumber::from_int(3));
        assert_eq!(&s * &s3, CycloNumber::sqrt6());
    }

    #[test]
    fn inv_sqrt2_times_sqrt2_is_one() {
        let s = CycloNumber::sqrt2();
        assert_eq!(&s.inv().unwrap() * &s, CycloNumber::one());
    }

    #[test]
    fn inv_sqrt6_squared_is_one_sixth() {
        let v = CycloNumber::sqrt6().inv().unwrap();
        assert_eq!(&v * &v, CycloNumber::from_rational(rational(1, 6)));
    }

    #[test]
    fn inverse_of_zero_is_an_error() {
        assert!(matches!(
            CycloNumber::zero().inv(),
            Err(Error::DivisionByZero)
        ));
    }

    #[test]
    fn scaled_phase_has_exact_squared_modulus() {
        // 1/sqrt(3) * e^{i pi/3}, squared modulus 1/3; float oracle to 1e-12.
        let v = &CycloNumber::inv_sqrt3() * &CycloNumber::zeta_pow(4);
        assert_eq!(v.abs2(), CycloNumber::from_rational(rational(1, 3)));
        let (re, im) = float_eval(&v);
        let expected = (
            (std::f64::consts::PI / 3.0).cos() / 3f64.sqrt(),
            (std::f64::consts::PI / 3.0).sin() / 3f64.sqrt(),
        );
        assert!((re - expected.0).abs() < 1e-12);
        assert!((im - expected.1).abs() < 1e-12);
    }

    #[test]
    fn conjugation_fixed_points_and_involution() {
        assert_eq!(
            CycloNumber::zeta_pow(6).conj(),
            -CycloNumber::zeta_pow(6),
            "conj(i) = -i"
        );
        assert_eq!(CycloNumber::sqrt2().conj(), CycloNumber::sqrt2());
        // conj(e^{i pi/3}) = e^{i 5 pi/3}
        assert_eq!(
            CycloNumber::zeta_pow(4).conj(),
            CycloNumber::zeta_pow(20)
        );
    }

    fn pseudorandom_elements(n: usize) -> Vec<CycloNumber> {
        // Small deterministic LCG; coefficients stay tiny so Euclid is cheap.
        let mut state: u64 = 0x9e37_79b9_7f4a_7c15;
        let mut next = || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((state >> 33) % 19) as i64 - 9
        };
        (0..n)
            .map(|_| {
                let coeffs = std::array::from_fn(|_| rational(next(), 1 + next().abs()));
                CycloNumber::from_coeffs(coeffs)
            })
            .collect()
    }

    #[test]
    fn inverse_law_on_pseudorandom_elements() {
        let mut checked = 0;
        for v in pseudorandom_elements(110) {
            if v.is_zero() {
                continue;
            }
            assert_eq!(&v * &v.inv().unwrap(), CycloNumber::one());
            checked += 1;
            if checked == 100 {
                break;
            }
        }
        assert!(checked >= 100);
    }

    #[test]
    fn field_axioms_on_pseudorandom_elements() {
        let els = pseudorandom_elements(30);
        for w in els.chunks(3) {
            let (a, b, c) = (&w[0], &w[1], &w[2]);
            assert_eq!(&(a + b) + c, a + &(b + c));
            assert_eq!(a * &(b + c), &(a * b) + &(a * c));
            assert_eq!(&(a * b) * c, a * &(b * c));
            assert_eq!(a * b, b * a);
            let conj_prod = (a * b).conj();
            assert_eq!(conj_prod, &a.conj() * &b.conj());
            assert_eq!(a.conj().conj(), *a);
            assert!((a * &a.conj()).is_real());
        }
    }

    #[test]
    fn exact_float_agreement() {
        for v in pseudorandom_elements(20) {
            let (re, im) = float_eval(&v);
            // Recompute from scratch with a separate accumulation order.
            let mut re2 = 0.0;
            let mut im2 = 0.0;
            for (k, c) in v.coeffs().iter().enumerate().rev() {
                let a = (k as f64) * std::f64::consts::PI / 12.0;
                let x = c.to_f64().unwrap();
                re2 += x * a.cos();
                im2 += x * a.sin();
            }
            assert!((re - re2).abs() < 1e-12 && (im - im2).abs() < 1e-12);
        }
    }

    #[test]
    fn phase_values() {
        assert_eq!(
            Scalar::phase(&AngleFrac::zero()),
            Scalar::Exact(CycloNumber::one())
        );
        // theta = pi/3 -> (1 + sqrt(3) i)/2
        let expected = CycloNumber::from_coeffs({
            let mut c = zero_coeffs();
            c[4] = Rational::one();
            c
        });
        assert_eq!(Scalar::phase(&AngleFrac::new(1, 3)), Scalar::Exact(expected.clone()));
        let half = rational(1, 2);
        let by_parts = &CycloNumber::from_rational(half.clone())
            + &(&CycloNumber::sqrt3().scale(&half) * &CycloNumber::i());
        assert_eq!(expected, by_parts);
        // theta = 4 pi/3 -> (-1 - sqrt(3) i)/2
        let neg = Scalar::phase(&AngleFrac::new(4, 3));
        assert_eq!(neg, Scalar::Exact(-&by_parts));
        // Non-embeddable angles degrade to the float backend.
        let f = Scalar::phase(&AngleFrac::new(1, 5));
        assert_eq!(f.backend(), Backend::Float);
        assert!((f.modulus() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn abs2_of_unit_phase_over_sqrt6() {
        let v = Scalar::Exact(&CycloNumber::inv_sqrt6() * &CycloNumber::zeta_pow(3));
        assert_eq!(
            v.abs2(),
            Scalar::Exact(CycloNumber::from_rational(rational(1, 6)))
        );
        assert!(Scalar::zero(Backend::Exact).abs2().is_exactly_zero());
    }

    #[test]
    fn angle_canonicalization_is_mod_two_pi() {
        assert_eq!(AngleFrac::new(-1, 3), AngleFrac::new(5, 3));
        assert_eq!(AngleFrac::new(25, 12), AngleFrac::new(1, 12));
        assert_eq!(AngleFrac::new(2, 1), AngleFrac::zero());
        assert_eq!(AngleFrac::new(1, 12).phase_exponent(), Some(1));
        assert_eq!(AngleFrac::new(11, 6).phase_exponent(), Some(22));
        assert_eq!(AngleFrac::new(1, 5).phase_exponent(), None);
    }

    #[test]
    fn scalar_json_round_trip_is_byte_exact() {
        let v = Scalar::Exact(&CycloNumber::inv_sqrt2() * &CycloNumber::zeta_pow(7));
        let s1 = serde_json::to_string(&v).unwrap();
        let parsed: Scalar = serde_json::from_str(&s1).unwrap();
        let s2 = serde_json::to_string(&parsed).unwrap();
        assert_eq!(s1, s2);
        assert_eq!(parsed, v);

        let f = Scalar::Float { re: 0.25, im: -1.5 };
        let s1 = serde_json::to_string(&f).unwrap();
        let parsed: Scalar = serde_json::from_str(&s1).unwrap();
        assert_eq!(serde_json::to_string(&parsed).unwrap(), s1);
    }

    #[test]
    fn angle_json_round_trip() {
        let a = AngleFrac::new(7, 12);
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(s, r#"{"pi_frac":"7/12"}"#);
        let b: AngleFrac = serde_json::from_str(&s).unwrap();
        assert_eq!(a, b);
    }
}
