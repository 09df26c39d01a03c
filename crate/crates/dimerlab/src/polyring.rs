//! Exact arithmetic over trivariate integer polynomials in the edge weights
//! `zh`, `zv`, `zd`, plus arbitrary-precision rationals.
//!
//! `TriPoly` is the value type of every symbolic computation in this crate:
//! partition functions and Pfaffians are polynomials with integer
//! coefficients, and all identities between them are checked exactly, never
//! through floating point.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PolyError {
    #[error("singular interpolation system: duplicate node {0}")]
    SingularSystem(String),
    #[error("evaluator is not a homogeneous polynomial of degree {degree}: {detail}")]
    NotHomogeneous { degree: u32, detail: String },
    #[error("malformed polynomial text: {0}")]
    Parse(String),
}

/// Exponent triple of a single term `zh^a zv^b zd^c`.
///
/// Ordered graded-lexicographically (total degree first, then `zh`, `zv`,
/// `zd`), which fixes the canonical term order used for serialization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Monomial {
    pub zh: u32,
    pub zv: u32,
    pub zd: u32,
}

impl Monomial {
    pub const ONE: Monomial = Monomial {
        zh: 0,
        zv: 0,
        zd: 0,
    };

    pub fn new(zh: u32, zv: u32, zd: u32) -> Self {
        Monomial { zh, zv, zd }
    }

    pub fn total_degree(&self) -> u32 {
        self.zh + self.zv + self.zd
    }

    fn product(&self, other: &Monomial) -> Monomial {
        Monomial {
            zh: self.zh + other.zh,
            zv: self.zv + other.zv,
            zd: self.zd + other.zd,
        }
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.total_degree(), self.zh, self.zv, self.zd).cmp(&(
            other.total_degree(),
            other.zh,
            other.zv,
            other.zd,
        ))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Trivariate polynomial with arbitrary-precision integer coefficients.
///
/// Invariant: no stored coefficient is zero, and terms iterate in graded-lex
/// order, so equal polynomials serialize identically.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TriPoly {
    terms: BTreeMap<Monomial, BigInt>,
}

impl TriPoly {
    pub fn zero() -> Self {
        TriPoly::default()
    }

    pub fn one() -> Self {
        TriPoly::constant(BigInt::one())
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        TriPoly::monomial(Monomial::ONE, c)
    }

    pub fn monomial(m: Monomial, c: impl Into<BigInt>) -> Self {
        let mut terms = BTreeMap::new();
        let c = c.into();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        TriPoly { terms }
    }

    /// Single term `c * zh^a zv^b zd^d`; the workhorse for building
    /// reference polynomials in tests and golden data.
    pub fn term(c: i64, a: u32, b: u32, d: u32) -> Self {
        TriPoly::monomial(Monomial::new(a, b, d), c)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in canonical (graded-lex ascending) order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> BigInt {
        self.terms.get(m).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::total_degree).max()
    }

    /// `Some(d)` when every term has total degree `d`.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut degrees = self.terms.keys().map(Monomial::total_degree);
        let first = degrees.next()?;
        degrees.all(|d| d == first).then_some(first)
    }

    fn insert(&mut self, m: Monomial, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    /// `self += sign * m * p`, used by the Pfaffian minor expansion where
    /// every matrix entry is a signed single monomial.
    pub fn add_scaled(&mut self, p: &TriPoly, m: Monomial, sign: i64) {
        let s = BigInt::from(sign);
        for (pm, pc) in &p.terms {
            self.insert(pm.product(&m), pc * &s);
        }
    }

    pub fn pow(&self, e: u32) -> TriPoly {
        let mut acc = TriPoly::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Exact substitution `zh <- x, zv <- y, zd <- z`.
    pub fn eval(&self, x: &BigRational, y: &BigRational, z: &BigRational) -> BigRational {
        let max = |f: fn(&Monomial) -> u32| self.terms.keys().map(f).max().unwrap_or(0);
        let xs = rational_powers(x, max(|m| m.zh));
        let ys = rational_powers(y, max(|m| m.zv));
        let zs = rational_powers(z, max(|m| m.zd));
        let mut acc = BigRational::zero();
        for (m, c) in &self.terms {
            acc += BigRational::from_integer(c.clone())
                * &xs[m.zh as usize]
                * &ys[m.zv as usize]
                * &zs[m.zd as usize];
        }
        acc
    }

    /// Canonical text form: terms in graded-lex order, each printed as
    /// `c*zh^a*zv^b*zd^c`, joined by ` + `. The zero polynomial prints `0`.
    pub fn to_canonical_string(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        self.terms
            .iter()
            .map(|(m, c)| format!("{}*zh^{}*zv^{}*zd^{}", c, m.zh, m.zv, m.zd))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

fn rational_powers(x: &BigRational, max: u32) -> Vec<BigRational> {
    let mut out = Vec::with_capacity(max as usize + 1);
    out.push(BigRational::one());
    for i in 0..max as usize {
        let next = &out[i] * x;
        out.push(next);
    }
    out
}

impl fmt::Display for TriPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_canonical_string())
    }
}

impl FromStr for TriPoly {
    type Err = PolyError;

    fn from_str(s: &str) -> Result<Self, PolyError> {
        let s = s.trim();
        if s == "0" {
            return Ok(TriPoly::zero());
        }
        let mut poly = TriPoly::zero();
        for part in s.split(" + ") {
            let fields: Vec<&str> = part.trim().split('*').collect();
            if fields.len() != 4 {
                return Err(PolyError::Parse(format!("bad term `{part}`")));
            }
            let coeff = BigInt::from_str(fields[0])
                .map_err(|e| PolyError::Parse(format!("bad coefficient `{}`: {e}", fields[0])))?;
            let exp = |field: &str, var: &str| -> Result<u32, PolyError> {
                field
                    .strip_prefix(var)
                    .and_then(|t| t.strip_prefix('^'))
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| PolyError::Parse(format!("bad factor `{field}`")))
            };
            let m = Monomial::new(
                exp(fields[1], "zh")?,
                exp(fields[2], "zv")?,
                exp(fields[3], "zd")?,
            );
            poly.insert(m, coeff);
        }
        Ok(poly)
    }
}

impl AddAssign<&TriPoly> for TriPoly {
    fn add_assign(&mut self, rhs: &TriPoly) {
        for (m, c) in &rhs.terms {
            self.insert(*m, c.clone());
        }
    }
}

impl SubAssign<&TriPoly> for TriPoly {
    fn sub_assign(&mut self, rhs: &TriPoly) {
        for (m, c) in &rhs.terms {
            self.insert(*m, -c);
        }
    }
}

impl Add for &TriPoly {
    type Output = TriPoly;
    fn add(self, rhs: &TriPoly) -> TriPoly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub for &TriPoly {
    type Output = TriPoly;
    fn sub(self, rhs: &TriPoly) -> TriPoly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Mul for &TriPoly {
    type Output = TriPoly;
    fn mul(self, rhs: &TriPoly) -> TriPoly {
        let mut out = TriPoly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.insert(ma.product(mb), ca * cb);
            }
        }
        out
    }
}

impl Neg for &TriPoly {
    type Output = TriPoly;
    fn neg(self) -> TriPoly {
        let mut out = TriPoly::zero();
        for (m, c) in &self.terms {
            out.insert(*m, -c);
        }
        out
    }
}

impl Neg for TriPoly {
    type Output = TriPoly;
    fn neg(self) -> TriPoly {
        -&self
    }
}

macro_rules! owned_ops {
    ($($trait:ident::$method:ident),*) => {$(
        impl $trait for TriPoly {
            type Output = TriPoly;
            fn $method(self, rhs: TriPoly) -> TriPoly {
                $trait::$method(&self, &rhs)
            }
        }
        impl $trait<&TriPoly> for TriPoly {
            type Output = TriPoly;
            fn $method(self, rhs: &TriPoly) -> TriPoly {
                $trait::$method(&self, rhs)
            }
        }
    )*};
}
owned_ops!(Add::add, Sub::sub, Mul::mul);

/// Coefficients (constant first) of the unique polynomial of degree
/// `< nodes.len()` through the given points, by Newton divided differences
/// in exact rational arithmetic.
pub fn newton_interpolate(
    nodes: &[BigRational],
    values: &[BigRational],
) -> Result<Vec<BigRational>, PolyError> {
    assert_eq!(nodes.len(), values.len());
    let n = nodes.len();
    // divided-difference table, computed in place
    let mut dd = values.to_vec();
    for level in 1..n {
        for i in (level..n).rev() {
            let denom = &nodes[i] - &nodes[i - level];
            if denom.is_zero() {
                return Err(PolyError::SingularSystem(nodes[i].to_string()));
            }
            dd[i] = (&dd[i] - &dd[i - 1]) / denom;
        }
    }
    // expand the Newton basis products into monomial coefficients
    let mut coeffs = vec![BigRational::zero(); n];
    let mut basis = vec![BigRational::zero(); n];
    basis[0] = BigRational::one();
    let mut basis_len = 1;
    for (i, d) in dd.iter().enumerate() {
        for (c, b) in coeffs.iter_mut().zip(&basis[..basis_len]) {
            *c += d * b;
        }
        if i + 1 < n {
            // basis *= (x - nodes[i])
            for t in (0..basis_len).rev() {
                let shifted = basis[t].clone();
                basis[t] = -&nodes[i] * &basis[t];
                basis[t + 1] += shifted;
            }
            basis_len += 1;
        }
    }
    Ok(coeffs)
}

/// Reconstructs the unique homogeneous `TriPoly` of total degree `degree`
/// that agrees with `evaluator` on exact rational points.
///
/// Works by fixing `zh = 1`, sampling `(zv, zd)` on the integer grid
/// `1..=degree+1` squared, solving the tensor-product Vandermonde system
/// exactly, then restoring the `zh` power of each term from homogeneity.
/// Grid evaluations run in parallel; the solve is sequential and
/// deterministic.
pub fn interpolate_homogeneous<F>(degree: u32, evaluator: F) -> Result<TriPoly, PolyError>
where
    F: Fn(&BigRational, &BigRational, &BigRational) -> BigRational + Sync,
{
    let d = degree as usize;
    let nodes: Vec<BigRational> = (1..=d as i64 + 1)
        .map(|v| BigRational::from_integer(v.into()))
        .collect();
    let one = BigRational::one();
    let values: Vec<BigRational> = (0..(d + 1) * (d + 1))
        .into_par_iter()
        .map(|idx| evaluator(&one, &nodes[idx / (d + 1)], &nodes[idx % (d + 1)]))
        .collect();

    // per row (fixed zv node): coefficients in zd
    let mut zd_coeffs = Vec::with_capacity(d + 1);
    for row in 0..=d {
        let vals = &values[row * (d + 1)..(row + 1) * (d + 1)];
        zd_coeffs.push(newton_interpolate(&nodes, vals)?);
    }
    // per zd power: coefficients in zv
    let mut poly = TriPoly::zero();
    for c in 0..=d {
        let column: Vec<BigRational> = zd_coeffs.iter().map(|row| row[c].clone()).collect();
        let zv_coeffs = newton_interpolate(&nodes, &column)?;
        for (b, coeff) in zv_coeffs.iter().enumerate() {
            if coeff.is_zero() {
                continue;
            }
            if b + c > d {
                return Err(PolyError::NotHomogeneous {
                    degree,
                    detail: format!("residual term zv^{b}*zd^{c} of degree {} > {degree}", b + c),
                });
            }
            if !coeff.is_integer() {
                return Err(PolyError::NotHomogeneous {
                    degree,
                    detail: format!("non-integer coefficient {coeff} at zv^{b}*zd^{c}"),
                });
            }
            poly.insert(
                Monomial::new((d - b - c) as u32, b as u32, c as u32),
                coeff.to_integer(),
            );
        }
    }
    Ok(poly)
}

/// Rational from a `p/q` or plain-integer string; used by the CLI and tests.
pub fn parse_rational(s: &str) -> Result<BigRational, PolyError> {
    let mk_err = |e: &dyn fmt::Display| PolyError::Parse(format!("bad rational `{s}`: {e}"));
    match s.split_once('/') {
        Some((num, den)) => {
            let num = BigInt::from_str(num.trim()).map_err(|e| mk_err(&e))?;
            let den = BigInt::from_str(den.trim()).map_err(|e| mk_err(&e))?;
            if den.is_zero() {
                return Err(PolyError::Parse(format!(
                    "bad rational `{s}`: zero denominator"
                )));
            }
            Ok(BigRational::new(num, den))
        }
        None => {
            let num = BigInt::from_str(s.trim()).map_err(|e| mk_err(&e))?;
            Ok(BigRational::from_integer(num))
        }
    }
}

/// Natural log of |x| for rationals too large for a direct f64 conversion.
pub fn rational_log_abs(x: &BigRational) -> f64 {
    fn big_log_abs(v: &BigInt) -> f64 {
        let bits = v.bits();
        if bits <= 900 {
            v.abs().to_f64().map(f64::ln).unwrap_or(f64::NEG_INFINITY)
        } else {
            let shift = bits - 64;
            let top: BigInt = v.abs() >> shift;
            top.to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
        }
    }
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    big_log_abs(x.numer()) - big_log_abs(x.denom())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rat(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    fn t(c: i64, a: u32, b: u32, d: u32) -> TriPoly {
        TriPoly::term(c, a, b, d)
    }

    #[test]
    fn difference_of_squares() {
        let sum = t(1, 1, 0, 0) + t(1, 0, 1, 0);
        let diff = t(1, 1, 0, 0) - t(1, 0, 1, 0);
        assert_eq!(&sum * &diff, t(1, 2, 0, 0) - t(1, 0, 2, 0));
    }

    #[test]
    fn additive_identity() {
        let p = t(3, 1, 2, 0) + t(-7, 0, 0, 4);
        assert_eq!(&p + &TriPoly::zero(), p);
    }

    #[test]
    fn cancelling_terms_are_dropped() {
        let p = t(5, 1, 1, 1) + t(-5, 1, 1, 1);
        assert!(p.is_zero());
        assert_eq!(p.num_terms(), 0);
    }

    #[test]
    fn eval_at_origin_is_constant_term() {
        let p = t(9, 0, 0, 0) + t(4, 2, 1, 0) + t(-3, 0, 0, 5);
        assert_eq!(p.eval(&rat(0), &rat(0), &rat(0)), rat(9));
    }

    #[test]
    fn reference_pfaffian_evaluations() {
        let reference = crate::golden::reference_pfaffians(4, 3).unwrap();
        let ones = rat(1);
        assert_eq!(reference[0].eval(&ones, &ones, &ones), rat(-160));
        // univariate slice at zh=1, zv=0: 16 t^3 + 12 t^5 checked at t=7
        let at7 = reference[1].eval(&ones, &rat(0), &rat(7));
        assert_eq!(at7, rat(16 * 343 + 12 * 16807));
    }

    #[test]
    fn canonical_string_format() {
        let p = t(-4, 1, 0, 1) + t(3, 0, 2, 0);
        assert_eq!(
            p.to_canonical_string(),
            "3*zh^0*zv^2*zd^0 + -4*zh^1*zv^0*zd^1"
        );
        assert_eq!(TriPoly::zero().to_canonical_string(), "0");
    }

    #[test]
    fn parse_round_trip() {
        let p = t(-12, 1, 0, 5) + t(7, 3, 2, 1) + t(1, 0, 0, 0);
        let parsed: TriPoly = p.to_canonical_string().parse().unwrap();
        assert_eq!(parsed, p);
        let zero: TriPoly = "0".parse().unwrap();
        assert!(zero.is_zero());
        assert!("2*zh^1*zv^2".parse::<TriPoly>().is_err());
    }

    #[test]
    fn graded_lex_term_order() {
        let p = t(1, 3, 0, 0) + t(1, 0, 0, 1) + t(1, 1, 1, 1) + t(1, 0, 2, 1);
        let degrees: Vec<(u32, u32, u32)> = p.terms().map(|(m, _)| (m.zh, m.zv, m.zd)).collect();
        assert_eq!(degrees, vec![(0, 0, 1), (0, 2, 1), (1, 1, 1), (3, 0, 0)]);
    }

    #[test]
    fn interpolate_quadratic() {
        let p = interpolate_homogeneous(2, |x, y, z| x * x + y * z).unwrap();
        assert_eq!(p, t(1, 2, 0, 0) + t(1, 0, 1, 1));
    }

    #[test]
    fn newton_rejects_duplicate_nodes() {
        let nodes = [rat(1), rat(1)];
        let values = [rat(0), rat(1)];
        assert!(matches!(
            newton_interpolate(&nodes, &values),
            Err(PolyError::SingularSystem(_))
        ));
    }

    #[test]
    fn interpolate_detects_non_homogeneous_evaluator() {
        // y*z is homogeneous of degree 2, not 1: the residual cross-term
        // exceeds the degree budget
        let err = interpolate_homogeneous(1, |_, y, z| y * z).unwrap_err();
        assert!(matches!(err, PolyError::NotHomogeneous { .. }));
        // x/2 is degree 1 but leaves a fractional coefficient
        let half = BigRational::new(BigInt::from(1), BigInt::from(2));
        let err = interpolate_homogeneous(1, |x, _, _| x * &half).unwrap_err();
        assert!(matches!(err, PolyError::NotHomogeneous { .. }));
    }

    #[test]
    fn parse_rational_forms() {
        assert_eq!(
            parse_rational("3/2").unwrap(),
            BigRational::new(3.into(), 2.into())
        );
        assert_eq!(parse_rational("-5").unwrap(), rat(-5));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn log_abs_of_huge_rational() {
        let big = BigInt::from(10).pow(400);
        let x = BigRational::new(big, BigInt::from(7));
        let expected = 400.0 * 10f64.ln() - 7f64.ln();
        assert!((rational_log_abs(&x) - expected).abs() < 1e-9);
    }

    fn arb_poly() -> impl Strategy<Value = TriPoly> {
        prop::collection::vec(((0u32..5, 0u32..5, 0u32..5), -50i64..50), 0..6).prop_map(|terms| {
            let mut p = TriPoly::zero();
            for ((a, b, d), c) in terms {
                p += &t(c, a, b, d);
            }
            p
        })
    }

    proptest! {
        #[test]
        fn ring_axioms(p in arb_poly(), q in arb_poly(), r in arb_poly()) {
            prop_assert_eq!(&(&p * &q) * &r, &p * &(&q * &r));
            prop_assert_eq!(&p * &(&q + &r), &(&p * &q) + &(&p * &r));
            prop_assert_eq!(&p + &q, &q + &p);
        }

        #[test]
        fn eval_is_multiplicative(
            p in arb_poly(),
            q in arb_poly(),
            x in -9i64..9,
            y in -9i64..9,
            z in -9i64..9,
        ) {
            let (x, y, z) = (rat(x), rat(y), rat(z));
            prop_assert_eq!(
                (&p * &q).eval(&x, &y, &z),
                p.eval(&x, &y, &z) * q.eval(&x, &y, &z)
            );
        }

        #[test]
        fn interpolation_inverts_evaluation(
            degree in 1u32..=12,
            picks in prop::collection::vec((0u32..=12, 0u32..=12, -99i64..100), 1..6),
        ) {
            let mut p = TriPoly::zero();
            for (a, b, c) in picks {
                // clamp into a homogeneous monomial of the target degree
                let a = a.min(degree);
                let b = b.min(degree - a);
                p += &t(c, a, b, degree - a - b);
            }
            let rebuilt = interpolate_homogeneous(degree, |x, y, z| p.eval(x, y, z)).unwrap();
            prop_assert_eq!(rebuilt, p);
        }
    }
}
