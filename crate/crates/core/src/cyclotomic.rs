//! Exact arithmetic in the cyclotomic field Q(ζ) with ζ = exp(iπq/r).
//!
//! Elements are polynomials in ζ of degree below φ(n), where n is the
//! multiplicative order of ζ, reduced modulo the n-th cyclotomic polynomial.
//! The representation is canonical: two elements are equal exactly when
//! their coefficient vectors are equal (for exact coefficient types).

use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::sync::Arc;

use num_integer::Integer;
use thiserror::Error;

use crate::scalar::Coefficient;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("invalid parameters r={r}, q={q}: {reason}")]
    InvalidParameters { r: i64, q: i64, reason: &'static str },
    #[error("division by zero in Q(ζ)")]
    DivisionByZero,
    #[error("operands belong to different fields ({0} vs {1})")]
    FieldMismatch(String, String),
    #[error("cannot parse field element: {0}")]
    Parse(String),
}

/// Checks the admissible parameter range `r ≥ 3`, `0 < q < 2r`, `gcd(r, q) = 1`.
pub fn check_parameters(r: i64, q: i64) -> Result<(), FieldError> {
    let bad = |reason| Err(FieldError::InvalidParameters { r, q, reason });
    if r < 3 {
        return bad("r must be at least 3");
    }
    if q <= 0 || q >= 2 * r {
        return bad("q must satisfy 0 < q < 2r");
    }
    if r.gcd(&q) != 1 {
        return bad("gcd(r, q) must be 1");
    }
    Ok(())
}

/// Integer coefficients of Φ_n, lowest degree first, computed from
/// x^n − 1 = Π_{d | n} Φ_d(x) by exact division.
pub fn cyclotomic_polynomial(n: usize) -> Vec<i64> {
    assert!(n >= 1);
    let mut p = vec![0i64; n + 1];
    p[0] = -1;
    p[n] = 1;
    for d in (1..n).filter(|d| n.is_multiple_of(*d)) {
        p = exact_div_monic(&p, &cyclotomic_polynomial(d));
    }
    p
}

fn exact_div_monic(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let mut quot = vec![0i64; num.len() - dd];
    for top in (dd..num.len()).rev() {
        let c = rem[top];
        quot[top - dd] = c;
        if c != 0 {
            for (k, &m) in den.iter().enumerate() {
                rem[top - dd + k] -= c * m;
            }
        }
    }
    debug_assert!(rem.iter().all(|&c| c == 0), "non-exact cyclotomic division");
    quot
}

pub fn euler_totient(n: usize) -> usize {
    (1..=n).filter(|k| k.gcd(&n) == 1).count()
}

struct FieldData<T> {
    r: i64,
    q: i64,
    order: usize,
    modulus: Vec<i64>,
    /// ζ^k reduced, for 0 ≤ k < order.
    powers: Vec<Vec<T>>,
    /// [i] for 0 ≤ i ≤ 3r.
    brackets: Vec<Vec<T>>,
    /// [i]! for 0 ≤ i ≤ 3r.
    factorials: Vec<Vec<T>>,
    /// ([i]!)⁻¹ for 0 ≤ i < r.
    inverse_factorials: Vec<Vec<T>>,
}

/// Shared handle to a cyclotomic field Q(ζ). Cloning is cheap.
pub struct CyclotomicField<T> {
    data: Arc<FieldData<T>>,
}

impl<T> Clone for CyclotomicField<T> {
    fn clone(&self) -> Self {
        CyclotomicField { data: Arc::clone(&self.data) }
    }
}

impl<T> fmt::Debug for CyclotomicField<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q(ζ) with r={}, q={}, n={}", self.data.r, self.data.q, self.data.order)
    }
}

impl<T> PartialEq for CyclotomicField<T> {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.data, &other.data) || (self.data.r == other.data.r && self.data.q == other.data.q)
    }
}

impl<T: Coefficient> CyclotomicField<T> {
    pub fn new(r: i64, q: i64) -> Result<Self, FieldError> {
        check_parameters(r, q)?;
        let order = if r % 2 == 1 && q % 2 == 0 { r as usize } else { 2 * r as usize };
        let modulus = cyclotomic_polynomial(order);
        let deg = modulus.len() - 1;

        let mut powers = Vec::with_capacity(order);
        let mut current = unit::<T>(deg, 0);
        // r ≥ 3 forces n ≥ 3, so φ(n) ≥ 2 and ζ is the monomial x
        let zeta = unit::<T>(deg, 1);
        for _ in 0..order {
            powers.push(current.clone());
            current = T::mul_reduce(&current, &zeta, &modulus);
        }

        let mut data = FieldData {
            r,
            q,
            order,
            modulus,
            powers,
            brackets: Vec::new(),
            factorials: Vec::new(),
            inverse_factorials: Vec::new(),
        };

        // [i] = ζ^{i-1} + ζ^{i-3} + … + ζ^{1-i}
        let top = 3 * r as usize;
        let mut brackets = Vec::with_capacity(top + 1);
        brackets.push(unit::<T>(deg, 0));
        for i in 1..=top {
            let mut acc = vec![T::zero(); deg];
            for k in 0..i {
                let exp = (i as i64 - 1 - 2 * k as i64).rem_euclid(order as i64) as usize;
                add_into(&mut acc, &data.powers[exp]);
            }
            brackets.push(acc);
        }
        let mut factorials = Vec::with_capacity(top + 1);
        factorials.push(unit::<T>(deg, 0));
        for i in 1..=top {
            let next = T::mul_reduce(&factorials[i - 1], &brackets[i], &data.modulus);
            factorials.push(next);
        }
        data.brackets = brackets;
        data.factorials = factorials;

        let field = CyclotomicField { data: Arc::new(data) };
        let inverse_factorials = (0..r as usize)
            .map(|i| field.wrap(field.data.factorials[i].clone()).inv().map(|e| e.coeffs))
            .collect::<Result<Vec<_>, _>>()?;
        let mut data = Arc::try_unwrap(field.data).ok().expect("unshared during construction");
        data.inverse_factorials = inverse_factorials;
        Ok(CyclotomicField { data: Arc::new(data) })
    }

    pub fn r(&self) -> i64 {
        self.data.r
    }

    pub fn q(&self) -> i64 {
        self.data.q
    }

    /// Order n of ζ as a root of unity (the conductor of the field).
    pub fn order(&self) -> usize {
        self.data.order
    }

    /// Degree φ(n) of the field over Q.
    pub fn degree(&self) -> usize {
        self.data.modulus.len() - 1
    }

    pub fn modulus(&self) -> &[i64] {
        &self.data.modulus
    }

    fn wrap(&self, coeffs: Vec<T>) -> CyclotomicElement<T> {
        CyclotomicElement { field: self.clone(), coeffs }
    }

    pub fn zero(&self) -> CyclotomicElement<T> {
        self.wrap(vec![T::zero(); self.degree()])
    }

    pub fn one(&self) -> CyclotomicElement<T> {
        self.wrap(unit(self.degree(), 0))
    }

    pub fn from_integer(&self, k: i64) -> CyclotomicElement<T> {
        let mut c = vec![T::zero(); self.degree()];
        c[0] = T::from_i64(k).expect("integer fits coefficient type");
        self.wrap(c)
    }

    pub fn from_coefficients(&self, coeffs: Vec<T>) -> Result<CyclotomicElement<T>, FieldError> {
        if coeffs.len() != self.degree() {
            return Err(FieldError::Parse(format!(
                "expected {} coefficients, found {}",
                self.degree(),
                coeffs.len()
            )));
        }
        Ok(self.wrap(coeffs))
    }

    /// ζ^k for any integer k.
    pub fn zeta_power(&self, k: i64) -> CyclotomicElement<T> {
        let idx = k.rem_euclid(self.data.order as i64) as usize;
        self.wrap(self.data.powers[idx].clone())
    }

    /// Quantum integer [i] = (ζ^i − ζ^{−i}) / (ζ − ζ^{−1}), with [0] = 1.
    pub fn bracket(&self, i: usize) -> CyclotomicElement<T> {
        match self.data.brackets.get(i) {
            Some(c) => self.wrap(c.clone()),
            None => {
                let mut acc = vec![T::zero(); self.degree()];
                for k in 0..i {
                    let exp = (i as i64 - 1 - 2 * k as i64).rem_euclid(self.data.order as i64) as usize;
                    add_into(&mut acc, &self.data.powers[exp]);
                }
                self.wrap(acc)
            }
        }
    }

    /// [i]! = [i][i−1]…[1][0]; zero for every i ≥ r.
    pub fn bracket_factorial(&self, i: usize) -> CyclotomicElement<T> {
        if i >= self.data.r as usize {
            return self.zero();
        }
        self.wrap(self.data.factorials[i].clone())
    }

    /// ([i]!)⁻¹, defined for i < r.
    pub fn inverse_bracket_factorial(&self, i: usize) -> Result<CyclotomicElement<T>, FieldError> {
        self.data
            .inverse_factorials
            .get(i)
            .map(|c| self.wrap(c.clone()))
            .ok_or(FieldError::DivisionByZero)
    }

    /// Parses the body of [`CyclotomicElement::serialize`] (the header line is optional).
    pub fn parse_element(&self, text: &str) -> Result<CyclotomicElement<T>, FieldError> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let mut line = lines.next().ok_or_else(|| FieldError::Parse("empty input".into()))?;
        if let Some(rest) = line.strip_prefix("field") {
            let nums: Vec<i64> = rest
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| FieldError::Parse(format!("bad header token {t:?}"))))
                .collect::<Result<_, _>>()?;
            if nums != [self.r(), self.q(), self.order() as i64] {
                return Err(FieldError::FieldMismatch(format!("{self:?}"), line.to_string()));
            }
            line = lines.next().ok_or_else(|| FieldError::Parse("missing coefficients".into()))?;
        }
        let coeffs = line
            .split_whitespace()
            .map(|t| t.parse::<T>().map_err(|_| FieldError::Parse(format!("bad coefficient {t:?}"))))
            .collect::<Result<Vec<_>, _>>()?;
        self.from_coefficients(coeffs)
    }
}

fn unit<T: Coefficient>(deg: usize, k: usize) -> Vec<T> {
    let mut c = vec![T::zero(); deg];
    c[k] = T::one();
    c
}

fn add_into<T: Coefficient>(acc: &mut [T], other: &[T]) {
    for (a, b) in acc.iter_mut().zip(other) {
        if !b.is_zero() {
            *a = std::mem::replace(a, T::zero()) + b.clone();
        }
    }
}

fn trim<T: Coefficient>(p: &mut Vec<T>) {
    while p.last().is_some_and(|c| c.is_negligible()) {
        p.pop();
    }
}

/// Polynomial division with remainder over the coefficient field.
fn divrem<T: Coefficient>(num: &[T], den: &[T]) -> (Vec<T>, Vec<T>) {
    let mut rem = num.to_vec();
    trim(&mut rem);
    let dd = den.len() - 1;
    if rem.len() < den.len() {
        return (Vec::new(), rem);
    }
    let lead = den[dd].clone();
    let mut quot = vec![T::zero(); rem.len() - dd];
    for top in (dd..rem.len()).rev() {
        let c = rem[top].clone() / lead.clone();
        if c.is_zero() {
            continue;
        }
        for (k, d) in den.iter().enumerate() {
            let idx = top - dd + k;
            rem[idx] = rem[idx].clone() - c.clone() * d.clone();
        }
        quot[top - dd] = c;
    }
    rem.truncate(dd);
    trim(&mut rem);
    (quot, rem)
}

fn poly_mul<T: Coefficient>(a: &[T], b: &[T]) -> Vec<T> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![T::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = out[i + j].clone() + x.clone() * y.clone();
        }
    }
    out
}

fn poly_sub<T: Coefficient>(a: &[T], b: &[T]) -> Vec<T> {
    let len = a.len().max(b.len());
    let mut out: Vec<T> = (0..len)
        .map(|i| {
            let x = a.get(i).cloned().unwrap_or_else(T::zero);
            let y = b.get(i).cloned().unwrap_or_else(T::zero);
            x - y
        })
        .collect();
    trim(&mut out);
    out
}

/// An element of Q(ζ).
pub struct CyclotomicElement<T> {
    field: CyclotomicField<T>,
    coeffs: Vec<T>,
}

impl<T: Clone> Clone for CyclotomicElement<T> {
    fn clone(&self) -> Self {
        CyclotomicElement { field: self.field.clone(), coeffs: self.coeffs.clone() }
    }
}

impl<T: fmt::Debug> fmt::Debug for CyclotomicElement<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CyclotomicElement")
            .field("field", &self.field)
            .field("coeffs", &self.coeffs)
            .finish()
    }
}

impl<T: PartialEq> PartialEq for CyclotomicElement<T> {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.coeffs == other.coeffs
    }
}

impl<T: Coefficient> CyclotomicElement<T> {
    pub fn field(&self) -> &CyclotomicField<T> {
        &self.field
    }

    /// Coefficients of 1, ζ, ζ², …, ζ^{φ(n)−1}.
    pub fn coefficients(&self) -> &[T] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.iter().enumerate().all(|(i, c)| if i == 0 { c.is_one() } else { c.is_zero() })
    }

    fn same_field(&self, other: &Self) -> Result<(), FieldError> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(FieldError::FieldMismatch(format!("{:?}", self.field), format!("{:?}", other.field)))
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, FieldError> {
        self.same_field(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.clone() + b.clone()).collect();
        Ok(self.field.wrap(coeffs))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, FieldError> {
        self.same_field(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.clone() - b.clone()).collect();
        Ok(self.field.wrap(coeffs))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, FieldError> {
        self.same_field(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(self.field.zero());
        }
        if self.is_one() {
            return Ok(other.clone());
        }
        if other.is_one() {
            return Ok(self.clone());
        }
        Ok(self.field.wrap(T::mul_reduce(&self.coeffs, &other.coeffs, &self.field.data.modulus)))
    }

    /// Multiplicative inverse via the extended Euclidean algorithm on (self, Φ_n).
    pub fn inv(&self) -> Result<Self, FieldError> {
        let mut a = self.coeffs.clone();
        trim(&mut a);
        if a.is_empty() {
            return Err(FieldError::DivisionByZero);
        }
        let modulus: Vec<T> = self.field.data.modulus.iter().map(|&m| T::from_i64(m).unwrap()).collect();
        // Invariant: s_i · a ≡ r_i (mod Φ_n).
        let (mut r0, mut r1) = (modulus.clone(), a);
        let (mut s0, mut s1): (Vec<T>, Vec<T>) = (Vec::new(), vec![T::one()]);
        while r1.len() > 1 {
            let (quot, rem) = divrem(&r0, &r1);
            let s2 = poly_sub(&s0, &poly_mul(&quot, &s1));
            r0 = std::mem::replace(&mut r1, rem);
            s0 = std::mem::replace(&mut s1, s2);
            if r1.is_empty() {
                // gcd has positive degree: impossible for an irreducible modulus
                return Err(FieldError::DivisionByZero);
            }
        }
        let c = r1[0].clone();
        let scaled: Vec<T> = s1.into_iter().map(|x| x / c.clone()).collect();
        let (_, mut reduced) = divrem(&scaled, &modulus);
        reduced.resize(self.field.degree(), T::zero());
        Ok(self.field.wrap(reduced))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self, FieldError> {
        self.checked_mul(&other.inv()?)
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = self.field.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Numerical value at ζ = exp(iπq/r), as (real, imaginary).
    pub fn approx_complex(&self) -> (f64, f64) {
        let step = std::f64::consts::PI * self.field.q() as f64 / self.field.r() as f64;
        let mut re = 0.0;
        let mut im = 0.0;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let v = c.to_f64();
            let angle = step * k as f64;
            re += v * angle.cos();
            im += v * angle.sin();
        }
        (re, im)
    }

    /// `field r q n` header line followed by the coefficient line.
    pub fn serialize(&self) -> String {
        let coeffs: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        format!(
            "field {} {} {}\n{}",
            self.field.r(),
            self.field.q(),
            self.field.order(),
            coeffs.join(" ")
        )
    }
}

impl<T: Coefficient> fmt::Display for CyclotomicElement<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})·ζ")?,
                _ => write!(f, "({c})·ζ^{k}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl<T: Coefficient> $trait<&CyclotomicElement<T>> for &CyclotomicElement<T> {
            type Output = CyclotomicElement<T>;
            fn $method(self, rhs: &CyclotomicElement<T>) -> CyclotomicElement<T> {
                self.$checked(rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl<T: Coefficient> $trait<CyclotomicElement<T>> for CyclotomicElement<T> {
            type Output = CyclotomicElement<T>;
            fn $method(self, rhs: CyclotomicElement<T>) -> CyclotomicElement<T> {
                (&self).$method(&rhs)
            }
        }
        impl<T: Coefficient> $trait<&CyclotomicElement<T>> for CyclotomicElement<T> {
            type Output = CyclotomicElement<T>;
            fn $method(self, rhs: &CyclotomicElement<T>) -> CyclotomicElement<T> {
                (&self).$method(rhs)
            }
        }
    };
}

binop!(Add, add, checked_add);
binop!(Sub, sub, checked_sub);
binop!(Mul, mul, checked_mul);

impl<T: Coefficient> AddAssign<&CyclotomicElement<T>> for CyclotomicElement<T> {
    fn add_assign(&mut self, rhs: &CyclotomicElement<T>) {
        self.same_field(rhs).unwrap_or_else(|e| panic!("{e}"));
        add_into(&mut self.coeffs, &rhs.coeffs);
    }
}

impl<T: Coefficient> SubAssign<&CyclotomicElement<T>> for CyclotomicElement<T> {
    fn sub_assign(&mut self, rhs: &CyclotomicElement<T>) {
        *self = &*self - rhs;
    }
}

impl<T: Coefficient> MulAssign<&CyclotomicElement<T>> for CyclotomicElement<T> {
    fn mul_assign(&mut self, rhs: &CyclotomicElement<T>) {
        *self = &*self * rhs;
    }
}

impl<T: Coefficient> Neg for &CyclotomicElement<T> {
    type Output = CyclotomicElement<T>;
    fn neg(self) -> CyclotomicElement<T> {
        self.field.wrap(self.coeffs.iter().map(|c| -c.clone()).collect())
    }
}

impl<T: Coefficient> Neg for CyclotomicElement<T> {
    type Output = CyclotomicElement<T>;
    fn neg(self) -> CyclotomicElement<T> {
        -&self
    }
}

impl<T: Coefficient> std::iter::Sum for CyclotomicElement<T> {
    fn sum<I: Iterator<Item = Self>>(mut iter: I) -> Self {
        let mut acc = iter.next().expect("sum of an empty iterator has no field");
        for x in iter {
            acc += &x;
        }
        acc
    }
}
