//! Exact scalars: Laurent polynomials and rational functions in a formal
//! parameter `q` over the rationals, plus symmetric q-integers and
//! q-binomial coefficients.
//!
//! `q` is always treated as transcendental. [`RatQ`] is kept in a canonical
//! form, so structural equality is mathematical equality.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// A Laurent polynomial `sum c_e q^e` with rational coefficients.
///
/// Zero coefficients are never stored; the zero polynomial has no terms.
#[derive(Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct LaurentQ {
    terms: BTreeMap<i32, BigRational>,
}

impl LaurentQ {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(1, 0)
    }

    pub fn constant(c: impl Into<BigRational>) -> Self {
        let c = c.into();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(0, c);
        }
        Self { terms }
    }

    /// `c * q^e`.
    pub fn monomial(c: i64, e: i32) -> Self {
        let mut terms = BTreeMap::new();
        if c != 0 {
            terms.insert(e, BigRational::from_integer(c.into()));
        }
        Self { terms }
    }

    /// `q^e`.
    pub fn q_pow(e: i32) -> Self {
        Self::monomial(1, e)
    }

    pub fn from_terms<I: IntoIterator<Item = (i32, BigRational)>>(it: I) -> Self {
        let mut out = Self::zero();
        for (e, c) in it {
            out.add_term(e, c);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&0).is_some_and(|c| c.is_one())
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, &BigRational)> {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn min_exp(&self) -> Option<i32> {
        self.terms.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i32> {
        self.terms.keys().next_back().copied()
    }

    pub fn leading_coeff(&self) -> Option<&BigRational> {
        self.terms.values().next_back()
    }

    /// Returns `Some(c)` if this is a constant.
    pub fn as_constant(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => self.terms.get(&0).cloned(),
            _ => None,
        }
    }

    /// Returns `(c, e)` if this is a single term `c q^e`.
    pub fn as_monomial(&self) -> Option<(&BigRational, i32)> {
        if self.terms.len() == 1 {
            let (e, c) = self.terms.iter().next().unwrap();
            Some((c, *e))
        } else {
            None
        }
    }

    fn add_term(&mut self, e: i32, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add_assign_ref(&mut self, other: &LaurentQ) {
        for (e, c) in &other.terms {
            self.add_term(*e, c.clone());
        }
    }

    /// Multiplies by `q^e`.
    pub fn shift(&self, e: i32) -> Self {
        Self {
            terms: self.terms.iter().map(|(k, c)| (k + e, c.clone())).collect(),
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(k, v)| (*k, v * c)).collect(),
        }
    }

    /// Evaluates at a nonzero rational value of `q`.
    pub fn eval(&self, q: &BigRational) -> BigRational {
        assert!(!q.is_zero(), "Laurent polynomial evaluated at q = 0");
        let mut acc = BigRational::zero();
        for (e, c) in &self.terms {
            acc += c * pow_rat(q, *e);
        }
        acc
    }

    /// Splits into `q^shift * p(q)` with `p(0) != 0`, `p` dense from degree 0.
    fn to_poly(&self) -> (i32, Vec<BigRational>) {
        let lo = match self.min_exp() {
            Some(lo) => lo,
            None => return (0, Vec::new()),
        };
        let hi = self.max_exp().unwrap();
        let mut v = vec![BigRational::zero(); (hi - lo + 1) as usize];
        for (e, c) in &self.terms {
            v[(e - lo) as usize] = c.clone();
        }
        (lo, v)
    }

    fn from_poly(shift: i32, p: &[BigRational]) -> Self {
        Self::from_terms(
            p.iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| (i as i32 + shift, c.clone())),
        )
    }
}

fn pow_rat(q: &BigRational, e: i32) -> BigRational {
    let base = if e < 0 { q.recip() } else { q.clone() };
    num_traits::pow(base, e.unsigned_abs() as usize)
}

impl Add for &LaurentQ {
    type Output = LaurentQ;
    fn add(self, rhs: &LaurentQ) -> LaurentQ {
        let mut out = self.clone();
        out.add_assign_ref(rhs);
        out
    }
}

impl Sub for &LaurentQ {
    type Output = LaurentQ;
    fn sub(self, rhs: &LaurentQ) -> LaurentQ {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, -c.clone());
        }
        out
    }
}

impl Mul for &LaurentQ {
    type Output = LaurentQ;
    fn mul(self, rhs: &LaurentQ) -> LaurentQ {
        let mut out = LaurentQ::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                out.add_term(e1 + e2, c1 * c2);
            }
        }
        out
    }
}

impl Neg for &LaurentQ {
    type Output = LaurentQ;
    fn neg(self) -> LaurentQ {
        LaurentQ {
            terms: self.terms.iter().map(|(e, c)| (*e, -c.clone())).collect(),
        }
    }
}

impl fmt::Display for LaurentQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            let neg = c.is_negative();
            let abs = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let q_part = match *e {
                0 => None,
                1 => Some("q".to_string()),
                e => Some(format!("q^{e}")),
            };
            match (abs.is_one(), q_part) {
                (_, None) => write!(f, "{abs}")?,
                (true, Some(qp)) => write!(f, "{qp}")?,
                (false, Some(qp)) => write!(f, "{abs}*{qp}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for LaurentQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

// ---------------------------------------------------------------------------
// Dense polynomial helpers over Q (coefficient i is the q^i coefficient).

fn trim(p: &mut Vec<BigRational>) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

fn poly_divrem(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let mut r = a.to_vec();
    trim(&mut r);
    let db = b.len() - 1;
    let lb = &b[db];
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let mut quot = vec![BigRational::zero(); r.len() - db];
    while r.len() >= b.len() {
        let shift = r.len() - b.len();
        let c = r.last().unwrap() / lb;
        for (i, bc) in b.iter().enumerate() {
            let t = &c * bc;
            r[shift + i] -= t;
        }
        quot[shift] = c;
        r.pop();
        trim(&mut r);
    }
    (quot, r)
}

fn make_monic(p: &mut [BigRational]) {
    if let Some(lc) = p.last().cloned() {
        for c in p.iter_mut() {
            *c = &*c / &lc;
        }
    }
}

fn poly_gcd(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    trim(&mut x);
    trim(&mut y);
    while !y.is_empty() {
        let (_, r) = poly_divrem(&x, &y);
        x = y;
        y = r;
        make_monic(&mut y);
    }
    make_monic(&mut x);
    x
}

/// Exact element of `Q(q)` in canonical form.
///
/// The denominator has a nonzero constant term, no negative exponents and
/// leading coefficient 1, and shares no factor with the numerator.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatQ {
    num: LaurentQ,
    den: LaurentQ,
}

impl Default for RatQ {
    fn default() -> Self {
        Self::zero()
    }
}

impl From<LaurentQ> for RatQ {
    fn from(num: LaurentQ) -> Self {
        Self {
            num,
            den: LaurentQ::one(),
        }
    }
}

impl From<i64> for RatQ {
    fn from(c: i64) -> Self {
        LaurentQ::monomial(c, 0).into()
    }
}

impl From<BigRational> for RatQ {
    fn from(c: BigRational) -> Self {
        LaurentQ::constant(c).into()
    }
}

impl RatQ {
    pub fn zero() -> Self {
        LaurentQ::zero().into()
    }

    pub fn one() -> Self {
        LaurentQ::one().into()
    }

    pub fn q_pow(e: i32) -> Self {
        LaurentQ::q_pow(e).into()
    }

    /// Builds `num / den` and normalizes.
    pub fn new(num: LaurentQ, den: LaurentQ) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::normalized(num, den))
    }

    fn normalized(num: LaurentQ, den: LaurentQ) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        if den.is_one() {
            return Self {
                num,
                den: LaurentQ::one(),
            };
        }
        if let Some((c, e)) = den.as_monomial() {
            let inv = c.recip();
            return Self {
                num: num.shift(-e).scale(&inv),
                den: LaurentQ::one(),
            };
        }
        let (sn, pn) = num.to_poly();
        let (sd, pd) = den.to_poly();
        let g = poly_gcd(&pn, &pd);
        let (pn, pd) = if g.len() > 1 {
            (poly_divrem(&pn, &g).0, poly_divrem(&pd, &g).0)
        } else {
            (pn, pd)
        };
        let lc = pd.last().unwrap().clone();
        let inv = lc.recip();
        let pd: Vec<BigRational> = pd.iter().map(|c| c * &inv).collect();
        let pn: Vec<BigRational> = pn.iter().map(|c| c * &inv).collect();
        Self {
            num: LaurentQ::from_poly(sn - sd, &pn),
            den: LaurentQ::from_poly(0, &pd),
        }
    }

    pub fn numer(&self) -> &LaurentQ {
        &self.num
    }

    pub fn denom(&self) -> &LaurentQ {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    /// True when the denominator is 1.
    pub fn is_laurent(&self) -> bool {
        self.den.is_one()
    }

    pub fn inv(&self) -> Result<Self> {
        Self::new(self.den.clone(), self.num.clone())
    }

    pub fn div(&self, other: &RatQ) -> Result<Self> {
        if other.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self * &other.inv()?)
    }

    /// Multiplies by `q^e`; stays canonical without a gcd.
    pub fn shift(&self, e: i32) -> Self {
        if e == 0 {
            return self.clone();
        }
        Self {
            num: self.num.shift(e),
            den: self.den.clone(),
        }
    }

    /// Evaluates at a rational `q`; fails if the denominator vanishes there.
    pub fn eval(&self, q: &BigRational) -> Result<BigRational> {
        let d = self.den.eval(q);
        if d.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.num.eval(q) / d)
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }
}

impl Add for &RatQ {
    type Output = RatQ;
    fn add(self, rhs: &RatQ) -> RatQ {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            let num = &self.num + &rhs.num;
            if self.den.is_one() {
                return RatQ {
                    num,
                    den: LaurentQ::one(),
                };
            }
            return RatQ::normalized(num, self.den.clone());
        }
        let num = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
        RatQ::normalized(num, &self.den * &rhs.den)
    }
}

impl Sub for &RatQ {
    type Output = RatQ;
    fn sub(self, rhs: &RatQ) -> RatQ {
        self + &(-rhs)
    }
}

impl Mul for &RatQ {
    type Output = RatQ;
    fn mul(self, rhs: &RatQ) -> RatQ {
        if self.is_zero() || rhs.is_zero() {
            return RatQ::zero();
        }
        if self.den.is_one() && rhs.den.is_one() {
            return RatQ {
                num: &self.num * &rhs.num,
                den: LaurentQ::one(),
            };
        }
        if let Some((c, e)) = rhs.num.as_monomial() {
            if rhs.den.is_one() {
                return RatQ {
                    num: self.num.shift(e).scale(c),
                    den: self.den.clone(),
                };
            }
        }
        if let Some((c, e)) = self.num.as_monomial() {
            if self.den.is_one() {
                return RatQ {
                    num: rhs.num.shift(e).scale(c),
                    den: rhs.den.clone(),
                };
            }
        }
        RatQ::normalized(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

impl Neg for &RatQ {
    type Output = RatQ;
    fn neg(self) -> RatQ {
        RatQ {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Neg for RatQ {
    type Output = RatQ;
    fn neg(self) -> RatQ {
        -&self
    }
}

impl fmt::Display for RatQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl fmt::Debug for RatQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Symmetric q-integer `[a]` in `q_i = q^c`:
/// `(q_i^a - q_i^-a) / (q_i - q_i^-1)`.
pub fn q_int(a: i64, c: u32) -> LaurentQ {
    let c = c as i32;
    let n = a.unsigned_abs() as i32;
    let mut out = LaurentQ::zero();
    // [n] = q^{n-1} + q^{n-3} + ... + q^{-(n-1)}
    let mut e = n - 1;
    while e >= -(n - 1) {
        out.add_term(e * c, BigRational::one());
        e -= 2;
    }
    if a < 0 {
        -&out
    } else {
        out
    }
}

/// q-factorial `[n]!` in `q^c`.
pub fn q_factorial(n: u64, c: u32) -> LaurentQ {
    (1..=n as i64).fold(LaurentQ::one(), |acc, k| &acc * &q_int(k, c))
}

/// Gaussian binomial in `q_i = q^c`; zero outside `0 <= k <= n`.
///
/// Computed with the q-Pascal recurrence, so no division is needed.
pub fn q_binom(n: i64, k: i64, c: u32) -> LaurentQ {
    if n < 0 || k < 0 || k > n {
        return LaurentQ::zero();
    }
    let c = c as i32;
    let n = n as usize;
    let k = k as usize;
    // row[j] = binom(m, j)
    let mut row = vec![LaurentQ::one()];
    for m in 1..=n {
        let mut next = vec![LaurentQ::zero(); m + 1];
        for (j, slot) in next.iter_mut().enumerate() {
            let mut v = LaurentQ::zero();
            if j < m {
                v.add_assign_ref(&row[j].shift(c * j as i32));
            }
            if j >= 1 {
                v.add_assign_ref(&row[j - 1].shift(c * (j as i32 - m as i32)));
            }
            *slot = v;
        }
        row = next;
    }
    row.swap_remove(k)
}

/// Parses the text produced by `Display` for [`LaurentQ`].
pub fn parse_laurent(s: &str) -> Result<LaurentQ> {
    let src: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if src.is_empty() {
        return Err(Error::Parse(format!("empty polynomial in {s:?}")));
    }
    let bytes = src.as_bytes();
    let mut i = 0;
    let mut out = LaurentQ::zero();
    while i < bytes.len() {
        let mut sign = BigRational::one();
        if bytes[i] == b'+' {
            i += 1;
        } else if bytes[i] == b'-' {
            sign = -sign;
            i += 1;
        }
        let start = i;
        while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'/') {
            i += 1;
        }
        let coeff = if i > start {
            parse_rational(&src[start..i])?
        } else {
            BigRational::one()
        };
        let mut exp = 0i32;
        let mut has_q = false;
        if i < bytes.len() && bytes[i] == b'*' {
            i += 1;
        }
        if i < bytes.len() && bytes[i] == b'q' {
            has_q = true;
            i += 1;
            exp = 1;
            if i < bytes.len() && bytes[i] == b'^' {
                i += 1;
                let es = i;
                if i < bytes.len() && bytes[i] == b'-' {
                    i += 1;
                }
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                exp = src[es..i]
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad exponent in {s:?}")))?;
            }
        }
        if i == start && !has_q {
            return Err(Error::Parse(format!("unexpected character in {s:?}")));
        }
        if i < bytes.len() && bytes[i] != b'+' && bytes[i] != b'-' {
            return Err(Error::Parse(format!("unexpected character in {s:?}")));
        }
        out.add_term(exp, sign * coeff);
    }
    Ok(out)
}

fn parse_rational(s: &str) -> Result<BigRational> {
    let mut parts = s.splitn(2, '/');
    let n: BigInt = parts
        .next()
        .unwrap()
        .parse()
        .map_err(|_| Error::Parse(format!("bad coefficient {s:?}")))?;
    let d: BigInt = match parts.next() {
        Some(d) => d
            .parse()
            .map_err(|_| Error::Parse(format!("bad coefficient {s:?}")))?,
        None => BigInt::one(),
    };
    if d.is_zero() {
        return Err(Error::DivisionByZero);
    }
    Ok(BigRational::new(n, d))
}

/// Parses `p` or `(p)/(p)`.
pub fn parse_ratq(s: &str) -> Result<RatQ> {
    let t = s.trim();
    if let Some(rest) = t.strip_prefix('(') {
        if let Some(close) = find_matching(rest) {
            let num = &rest[..close];
            let tail = rest[close + 1..].trim();
            if tail.is_empty() {
                return Ok(parse_laurent(num)?.into());
            }
            let den = tail
                .strip_prefix('/')
                .map(str::trim)
                .and_then(|d| d.strip_prefix('(').and_then(|d| d.strip_suffix(')')))
                .ok_or_else(|| Error::Parse(format!("bad rational function {s:?}")))?;
            return RatQ::new(parse_laurent(num)?, parse_laurent(den)?);
        }
        return Err(Error::Parse(format!("unbalanced parentheses in {s:?}")));
    }
    Ok(parse_laurent(t)?.into())
}

fn find_matching(s: &str) -> Option<usize> {
    let mut depth = 1;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth == 0 {
                    return Some(i);
                }
            }
            _ => {}
        }
    }
    None
}
