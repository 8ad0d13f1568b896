//! Elements of `U_q` and its Hopf structure.
//!
//! Elements are stored as linear combinations of monomials
//! `F_alpha K_mu E_beta` (F-letters, one `K`, E-letters). The words are raw:
//! two different combinations may represent the same element modulo the Serre
//! relations. Mathematical equality goes through [`Engine::coords`], which
//! maps each block `(deg alpha, mu, deg beta)` to its canonical coordinates.
//!
//! `K_mu` is indexed by `mu` in `Z[I]` via `mu -> sum mu_i i1(i)`, and
//! `H_i = K_{c_i e_i}`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, RwLock};

use crate::error::{Error, Result};
use crate::qfield::{parse_laurent, parse_ratq, LaurentQ, RatQ};
use crate::rootdata::{RootDatum, SubRootDatum};
use crate::snf::IMat;
use crate::words::{degree_of, Degree, Word, WordSpace};

/// Bounds for every computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EngineConfig {
    /// Maximum `chi_D`-degree (F- plus E-letters in deleted nodes).
    pub max_degree: usize,
    /// Maximum number of F- plus E-letters in a monomial.
    pub max_height: usize,
    /// Maximum dimension of an orbit closure in `B_1`.
    pub orbit_cap: usize,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            max_degree: 6,
            max_height: 12,
            orbit_cap: 512,
        }
    }
}

/// `F_f K_k E_e`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mono {
    pub f: Word,
    pub k: Vec<i64>,
    pub e: Word,
}

impl Mono {
    pub fn unit(n: usize) -> Self {
        Mono {
            f: Vec::new(),
            k: vec![0; n],
            e: Vec::new(),
        }
    }

    pub fn is_borel(&self) -> bool {
        self.e.is_empty()
    }
}

/// A linear combination of monomials.
#[derive(Clone, Debug, Default)]
pub struct UElement {
    terms: BTreeMap<Mono, RatQ>,
}

impl UElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_mono(m: Mono, c: RatQ) -> Self {
        let mut x = Self::zero();
        x.add_term(m, c);
        x
    }

    pub fn from_pairs(it: impl IntoIterator<Item = (Mono, RatQ)>) -> Self {
        let mut x = Self::zero();
        for (m, c) in it {
            x.add_term(m, c);
        }
        x
    }

    pub fn scalar(n: usize, c: RatQ) -> Self {
        Self::from_mono(Mono::unit(n), c)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &RatQ)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    /// No stored terms. Use [`Engine::is_zero`] for mathematical zero.
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, m: Mono, c: RatQ) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get() + &c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &UElement, c: &RatQ) {
        for (m, d) in &other.terms {
            self.add_term(m.clone(), d * c);
        }
    }

    pub fn scale(&self, c: &RatQ) -> UElement {
        let mut out = UElement::zero();
        out.add_scaled(self, c);
        out
    }

    pub fn is_borel(&self) -> bool {
        self.terms.keys().all(Mono::is_borel)
    }
}

impl std::ops::Add for &UElement {
    type Output = UElement;
    fn add(self, rhs: &UElement) -> UElement {
        let mut out = self.clone();
        out.add_scaled(rhs, &RatQ::one());
        out
    }
}

impl std::ops::Sub for &UElement {
    type Output = UElement;
    fn sub(self, rhs: &UElement) -> UElement {
        let mut out = self.clone();
        out.add_scaled(rhs, &-RatQ::one());
        out
    }
}

impl std::ops::Neg for &UElement {
    type Output = UElement;
    fn neg(self) -> UElement {
        self.scale(&-RatQ::one())
    }
}

/// A linear combination of `legs`-fold tensors of monomials.
#[derive(Clone, Debug)]
pub struct Tensor {
    legs: usize,
    terms: BTreeMap<Vec<Mono>, RatQ>,
}

impl Tensor {
    pub fn zero(legs: usize) -> Self {
        Self {
            legs,
            terms: BTreeMap::new(),
        }
    }

    pub fn legs(&self) -> usize {
        self.legs
    }

    pub fn from_element(x: &UElement) -> Self {
        let mut t = Tensor::zero(1);
        for (m, c) in x.terms() {
            t.add_term(vec![m.clone()], c.clone());
        }
        t
    }

    /// `x (x) y`.
    pub fn pure(x: &UElement, y: &UElement) -> Self {
        let mut t = Tensor::zero(2);
        for (a, c) in x.terms() {
            for (b, d) in y.terms() {
                t.add_term(vec![a.clone(), b.clone()], c * d);
            }
        }
        t
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<Mono>, &RatQ)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, m: Vec<Mono>, c: RatQ) {
        debug_assert_eq!(m.len(), self.legs);
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get() + &c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &Tensor, c: &RatQ) {
        assert_eq!(self.legs, other.legs, "tensor leg count mismatch");
        for (m, d) in &other.terms {
            self.add_term(m.clone(), d * c);
        }
    }

    /// The scalar of a zero-leg tensor.
    pub fn scalar_value(&self) -> RatQ {
        assert_eq!(self.legs, 0);
        self.terms.get(&Vec::new()).cloned().unwrap_or_default()
    }
}

impl std::ops::Sub for &Tensor {
    type Output = Tensor;
    fn sub(self, rhs: &Tensor) -> Tensor {
        let mut out = self.clone();
        out.add_scaled(rhs, &-RatQ::one());
        out
    }
}

impl std::ops::Add for &Tensor {
    type Output = Tensor;
    fn add(self, rhs: &Tensor) -> Tensor {
        let mut out = self.clone();
        out.add_scaled(rhs, &RatQ::one());
        out
    }
}

/// Block of a monomial: F-degree, `K` index, E-degree.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BlockKey {
    pub f: Degree,
    pub k: Vec<i64>,
    pub e: Degree,
}

/// Canonical coordinates: nonzero blocks only.
pub type Coords = BTreeMap<Vec<BlockKey>, Vec<RatQ>>;

/// Weight of an element for the adjoint action, in `Z[I]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Weight {
    Zero,
    Pure(Vec<i64>),
    Mixed,
}

type Expansion = Arc<Vec<(Mono, RatQ)>>;

/// Context for computations in `U_q` of a fixed root datum.
#[derive(Debug)]
pub struct Engine {
    datum: RootDatum,
    cartan: IMat,
    c: Vec<u32>,
    graded: Vec<bool>,
    config: EngineConfig,
    words: WordSpace,
    commute: RwLock<HashMap<(Word, Word), Expansion>>,
}

impl Engine {
    /// Every node counts towards the degree bound.
    pub fn new(datum: &RootDatum, config: EngineConfig) -> Result<Self> {
        Self::with_grading(datum, config, vec![true; datum.rank()])
    }

    /// Only the deleted nodes of `s` count towards the degree bound.
    pub fn for_sub(s: &SubRootDatum, config: EngineConfig) -> Result<Self> {
        let graded = (0..s.ambient.rank()).map(|i| s.in_deleted(i)).collect();
        Self::with_grading(&s.ambient, config, graded)
    }

    fn with_grading(datum: &RootDatum, config: EngineConfig, graded: Vec<bool>) -> Result<Self> {
        datum.check()?;
        if !datum.is_y_regular() {
            return Err(Error::Input(
                "the images i1(I) are linearly dependent; K_mu cannot be indexed by Z[I]".into(),
            ));
        }
        if datum.rank() > u8::MAX as usize {
            return Err(Error::Input("too many simple roots".into()));
        }
        Ok(Self {
            cartan: datum.cartan_matrix(),
            c: (0..datum.rank()).map(|i| datum.c(i)).collect(),
            graded,
            config,
            words: WordSpace::new(datum.dot.clone(), config.max_height),
            datum: datum.clone(),
            commute: RwLock::new(HashMap::new()),
        })
    }

    pub fn datum(&self) -> &RootDatum {
        &self.datum
    }

    pub fn config(&self) -> EngineConfig {
        self.config
    }

    pub fn words(&self) -> &WordSpace {
        &self.words
    }

    pub fn rank(&self) -> usize {
        self.cartan.len()
    }

    pub fn c(&self, i: usize) -> u32 {
        self.c[i]
    }

    pub fn cartan(&self) -> &IMat {
        &self.cartan
    }

    /// Degree counted by the bound: letters in graded nodes.
    pub fn chi(&self, word: &[u8]) -> usize {
        word.iter().filter(|&&a| self.graded[a as usize]).count()
    }

    fn check(&self, m: &Mono) -> Result<()> {
        let d = self.chi(&m.f) + self.chi(&m.e);
        if d > self.config.max_degree {
            return Err(Error::DegreeBound {
                degree: d,
                bound: self.config.max_degree,
            });
        }
        let h = m.f.len() + m.e.len();
        if h > self.config.max_height {
            return Err(Error::HeightBound {
                len: h,
                bound: self.config.max_height,
            });
        }
        Ok(())
    }

    fn check_index(&self, i: usize) -> Result<u8> {
        if i < self.rank() {
            Ok(i as u8)
        } else {
            Err(Error::Input(format!("index {} out of range", i + 1)))
        }
    }

    // ---- generators ----

    pub fn one(&self) -> UElement {
        UElement::scalar(self.rank(), RatQ::one())
    }

    pub fn scalar(&self, c: RatQ) -> UElement {
        UElement::scalar(self.rank(), c)
    }

    pub fn f(&self, i: usize) -> UElement {
        self.f_word(&[i as u8])
    }

    pub fn e(&self, i: usize) -> UElement {
        self.e_word(&[i as u8])
    }

    pub fn f_word(&self, w: &[u8]) -> UElement {
        UElement::from_mono(
            Mono {
                f: w.to_vec(),
                k: vec![0; self.rank()],
                e: Vec::new(),
            },
            RatQ::one(),
        )
    }

    pub fn e_word(&self, w: &[u8]) -> UElement {
        UElement::from_mono(
            Mono {
                f: Vec::new(),
                k: vec![0; self.rank()],
                e: w.to_vec(),
            },
            RatQ::one(),
        )
    }

    pub fn k(&self, mu: &[i64]) -> UElement {
        UElement::from_mono(
            Mono {
                f: Vec::new(),
                k: mu.to_vec(),
                e: Vec::new(),
            },
            RatQ::one(),
        )
    }

    /// `h_i = c_i e_i`, so that `K_{h_i} = H_i`.
    pub fn h_vec(&self, i: usize, sign: i64) -> Vec<i64> {
        let mut v = vec![0; self.rank()];
        v[i] = sign * self.c[i] as i64;
        v
    }

    pub fn h(&self, i: usize) -> UElement {
        self.k(&self.h_vec(i, 1))
    }

    pub fn h_inv(&self, i: usize) -> UElement {
        self.k(&self.h_vec(i, -1))
    }

    /// `q_i - q_i^{-1}`.
    pub fn qi_diff(&self, i: usize) -> LaurentQ {
        let c = self.c[i] as i32;
        &LaurentQ::q_pow(c) - &LaurentQ::q_pow(-c)
    }

    // ---- pairings of lattices ----

    /// `<mu, wt2(word)>` = `sum_a mu_a sum_l C_{a l}`.
    fn mu_dot_word(&self, mu: &[i64], word: &[u8]) -> i64 {
        let mut s = 0;
        for (a, &m) in mu.iter().enumerate() {
            if m != 0 {
                s += m * word.iter().map(|&l| self.cartan[a][l as usize]).sum::<i64>();
            }
        }
        s
    }

    /// `mu^T C lambda`.
    fn mu_c_lambda(&self, mu: &[i64], lambda: &[i64]) -> i64 {
        let mut s = 0;
        for (a, &m) in mu.iter().enumerate() {
            for (b, &l) in lambda.iter().enumerate() {
                s += m * self.cartan[a][b] * l;
            }
        }
        s
    }

    fn dot_word(&self, i: u8, w: &[u8]) -> i64 {
        self.words.dot_word(i, w)
    }

    fn h_of_word(&self, w: &[u8], sign: i64) -> Vec<i64> {
        let mut v = vec![0; self.rank()];
        for &a in w {
            v[a as usize] += sign * self.c[a as usize] as i64;
        }
        v
    }

    // ---- multiplication ----

    /// `E_beta F_gamma` in the form `sum c F K E`.
    fn commute_e_f(&self, beta: &[u8], gamma: &[u8]) -> Result<Expansion> {
        let n = self.rank();
        if beta.is_empty() || gamma.is_empty() {
            return Ok(Arc::new(vec![(
                Mono {
                    f: gamma.to_vec(),
                    k: vec![0; n],
                    e: beta.to_vec(),
                },
                RatQ::one(),
            )]));
        }
        let key = (beta.to_vec(), gamma.to_vec());
        if let Some(v) = self.commute.read().unwrap().get(&key) {
            return Ok(v.clone());
        }
        let (&i, rest) = beta.split_last().unwrap();
        let mut out: BTreeMap<Mono, RatQ> = BTreeMap::new();
        let mut push = |m: Mono, c: RatQ| {
            if c.is_zero() {
                return;
            }
            let slot = out.entry(m).or_default();
            *slot = &*slot + &c;
        };
        for (m, c) in self.commute_e_f(rest, gamma)?.iter() {
            let mut m = m.clone();
            m.e.push(i);
            push(m, c.clone());
        }
        let inv = RatQ::from(LaurentQ::one()).div(&self.qi_diff(i as usize).into())?;
        let hi = self.h_vec(i as usize, 1);
        for p in 0..gamma.len() {
            if gamma[p] != i {
                continue;
            }
            let s = self.dot_word(i, &gamma[p + 1..]);
            let mut sub = gamma[..p].to_vec();
            sub.extend_from_slice(&gamma[p + 1..]);
            for (m, c) in self.commute_e_f(rest, &sub)?.iter() {
                let t = self.dot_word(i, &m.e);
                let base = c * &inv;
                let mut plus = m.clone();
                let mut minus = m.clone();
                for a in 0..n {
                    plus.k[a] += hi[a];
                    minus.k[a] -= hi[a];
                }
                push(plus, base.shift((-s - t) as i32));
                push(minus, -base.shift((s + t) as i32));
            }
        }
        let v: Expansion = Arc::new(out.into_iter().filter(|(_, c)| !c.is_zero()).collect());
        self.commute.write().unwrap().insert(key, v.clone());
        Ok(v)
    }

    /// Product of two monomials.
    pub fn mul_mono(&self, a: &Mono, b: &Mono) -> Result<Vec<(Mono, RatQ)>> {
        let mid = self.commute_e_f(&a.e, &b.f)?;
        let mut out = Vec::with_capacity(mid.len());
        for (m, c) in mid.iter() {
            let e = -self.mu_dot_word(&a.k, &m.f) - self.mu_dot_word(&b.k, &m.e);
            let mut f = a.f.clone();
            f.extend_from_slice(&m.f);
            let k: Vec<i64> = (0..self.rank()).map(|x| a.k[x] + m.k[x] + b.k[x]).collect();
            let mut ew = m.e.clone();
            ew.extend_from_slice(&b.e);
            let r = Mono { f, k, e: ew };
            self.check(&r)?;
            out.push((r, c.shift(e as i32)));
        }
        Ok(out)
    }

    pub fn mul(&self, x: &UElement, y: &UElement) -> Result<UElement> {
        let mut out = UElement::zero();
        for (a, c) in x.terms() {
            for (b, d) in y.terms() {
                let cd = c * d;
                for (m, e) in self.mul_mono(a, b)? {
                    out.add_term(m, &e * &cd);
                }
            }
        }
        Ok(out)
    }

    pub fn mul_all(&self, xs: &[&UElement]) -> Result<UElement> {
        let mut acc = self.one();
        for x in xs {
            acc = self.mul(&acc, x)?;
        }
        Ok(acc)
    }

    pub fn pow(&self, x: &UElement, n: u32) -> Result<UElement> {
        let mut acc = self.one();
        for _ in 0..n {
            acc = self.mul(&acc, x)?;
        }
        Ok(acc)
    }

    /// `[x, y]_q = x y - q^{(wt x . wt y)} y x` is left to callers; this is
    /// the plain commutator.
    pub fn commutator(&self, x: &UElement, y: &UElement) -> Result<UElement> {
        Ok(&self.mul(x, y)? - &self.mul(y, x)?)
    }

    /// Componentwise product of tensors with the same number of legs.
    pub fn mul_tensor(&self, x: &Tensor, y: &Tensor) -> Result<Tensor> {
        assert_eq!(x.legs, y.legs);
        let mut out = Tensor::zero(x.legs);
        for (a, c) in x.terms() {
            for (b, d) in y.terms() {
                let mut partial: Vec<(Vec<Mono>, RatQ)> = vec![(Vec::new(), c * d)];
                for leg in 0..x.legs {
                    let prod = self.mul_mono(&a[leg], &b[leg])?;
                    let mut next = Vec::with_capacity(partial.len() * prod.len());
                    for (ms, s) in &partial {
                        for (m, e) in &prod {
                            let mut ms = ms.clone();
                            ms.push(m.clone());
                            next.push((ms, s * e));
                        }
                    }
                    partial = next;
                }
                for (ms, s) in partial {
                    out.add_term(ms, s);
                }
            }
        }
        Ok(out)
    }

    // ---- Hopf structure ----

    /// Closed form for `Delta(F_alpha K_mu E_beta)`.
    pub fn coproduct_mono(&self, m: &Mono) -> Result<Vec<(Mono, Mono, RatQ)>> {
        self.check(m)?;
        let n = self.rank();
        let a = &m.f;
        let b = &m.e;
        // F-part: positions in S go left.
        let mut fparts = Vec::with_capacity(1 << a.len());
        for mask in 0u32..(1u32 << a.len()) {
            let mut exp = 0i64;
            let (mut left, mut right) = (Vec::new(), Vec::new());
            let mut hs = vec![0i64; n];
            for p in 0..a.len() {
                if mask >> p & 1 == 1 {
                    left.push(a[p]);
                    hs[a[p] as usize] += self.c[a[p] as usize] as i64;
                    for t in p + 1..a.len() {
                        if mask >> t & 1 == 0 {
                            exp += self.words.dot(a[p], a[t]);
                        }
                    }
                } else {
                    right.push(a[p]);
                }
            }
            fparts.push((left, right, hs, exp));
        }
        // E-part: positions in T go right.
        let mut eparts = Vec::with_capacity(1 << b.len());
        for mask in 0u32..(1u32 << b.len()) {
            let mut exp = 0i64;
            let (mut left, mut right) = (Vec::new(), Vec::new());
            let mut ht = vec![0i64; n];
            for t in 0..b.len() {
                if mask >> t & 1 == 1 {
                    right.push(b[t]);
                    ht[b[t] as usize] += self.c[b[t] as usize] as i64;
                    for s in 0..t {
                        if mask >> s & 1 == 0 {
                            exp -= self.words.dot(b[t], b[s]);
                        }
                    }
                } else {
                    left.push(b[t]);
                }
            }
            eparts.push((left, right, ht, exp));
        }
        let mut out = Vec::with_capacity(fparts.len() * eparts.len());
        for (fl, fr, hs, fe) in &fparts {
            for (el, er, ht, ee) in &eparts {
                let lk = (0..n).map(|x| m.k[x] + ht[x]).collect();
                let rk = (0..n).map(|x| m.k[x] - hs[x]).collect();
                out.push((
                    Mono {
                        f: fl.clone(),
                        k: lk,
                        e: el.clone(),
                    },
                    Mono {
                        f: fr.clone(),
                        k: rk,
                        e: er.clone(),
                    },
                    RatQ::q_pow((fe + ee) as i32),
                ));
            }
        }
        Ok(out)
    }

    pub fn coproduct(&self, x: &UElement) -> Result<Tensor> {
        let mut out = Tensor::zero(2);
        for (m, c) in x.terms() {
            for (l, r, s) in self.coproduct_mono(m)? {
                out.add_term(vec![l, r], &s * c);
            }
        }
        Ok(out)
    }

    pub fn counit_mono(&self, m: &Mono) -> RatQ {
        if m.f.is_empty() && m.e.is_empty() {
            RatQ::one()
        } else {
            RatQ::zero()
        }
    }

    pub fn counit(&self, x: &UElement) -> RatQ {
        let mut acc = RatQ::zero();
        for (m, c) in x.terms() {
            if m.f.is_empty() && m.e.is_empty() {
                acc = &acc + c;
            }
        }
        acc
    }

    pub fn antipode_mono(&self, m: &Mono) -> Result<Vec<(Mono, RatQ)>> {
        self.check(m)?;
        let n = self.rank();
        let a = &m.f;
        let b = &m.e;
        // S(F_a) = (-1)^|a| q^{-sum_{t<p} a_t.a_p} F_{rev a} K_{h_a}
        let mut ef = 0i64;
        for p in 0..a.len() {
            for t in 0..p {
                ef -= self.words.dot(a[t], a[p]);
            }
        }
        // S(E_b) = (-1)^|b| q^{sum_{p<t} b_p.b_t} K_{-h_b} E_{rev b}
        let mut ee = 0i64;
        for t in 0..b.len() {
            for p in 0..t {
                ee += self.words.dot(b[p], b[t]);
            }
        }
        let sign = if (a.len() + b.len()) % 2 == 0 { 1 } else { -1 };
        let ek = self.mu_dot_word(&m.k, a);
        let left = Mono {
            f: Vec::new(),
            k: self.h_of_word(b, -1),
            e: b.iter().rev().copied().collect(),
        };
        let ha = self.h_of_word(a, 1);
        let right = Mono {
            f: a.iter().rev().copied().collect(),
            k: (0..n).map(|x| ha[x] - m.k[x]).collect(),
            e: Vec::new(),
        };
        let scale = RatQ::from(LaurentQ::monomial(sign, (ef + ee + ek) as i32));
        Ok(self
            .mul_mono(&left, &right)?
            .into_iter()
            .map(|(m, c)| (m, &c * &scale))
            .collect())
    }

    pub fn antipode(&self, x: &UElement) -> Result<UElement> {
        let mut out = UElement::zero();
        for (m, c) in x.terms() {
            for (r, d) in self.antipode_mono(m)? {
                out.add_term(r, &d * c);
            }
        }
        Ok(out)
    }

    /// `Ad_u(v) = u_(1) v S(u_(2))`.
    pub fn adjoint(&self, u: &UElement, v: &UElement) -> Result<UElement> {
        let mut out = UElement::zero();
        for (legs, c) in self.coproduct(u)?.terms() {
            let left = UElement::from_mono(legs[0].clone(), c.clone());
            let lv = self.mul(&left, v)?;
            let s = UElement::from_pairs(self.antipode_mono(&legs[1])?);
            out.add_scaled(&self.mul(&lv, &s)?, &RatQ::one());
        }
        Ok(out)
    }

    // ---- tensor plumbing ----

    /// Replaces leg `leg` of every term by the legs of `f(mono)`.
    pub fn expand_leg<F>(&self, t: &Tensor, leg: usize, new_legs: usize, f: F) -> Result<Tensor>
    where
        F: Fn(&Mono) -> Result<Tensor>,
    {
        let mut cache: HashMap<Mono, Tensor> = HashMap::new();
        let mut o = Tensor::zero(t.legs - 1 + new_legs);
        for (ms, c) in t.terms() {
            if !cache.contains_key(&ms[leg]) {
                let img = f(&ms[leg])?;
                if img.legs != new_legs {
                    return Err(Error::Internal("leg map has the wrong arity".into()));
                }
                cache.insert(ms[leg].clone(), img);
            }
            let img = &cache[&ms[leg]];
            for (js, d) in img.terms() {
                let mut nm = Vec::with_capacity(o.legs);
                nm.extend_from_slice(&ms[..leg]);
                nm.extend(js.iter().cloned());
                nm.extend_from_slice(&ms[leg + 1..]);
                o.add_term(nm, c * d);
            }
        }
        Ok(o)
    }

    /// Applies a linear map `f` on one leg.
    pub fn map_leg<F>(&self, t: &Tensor, leg: usize, f: F) -> Result<Tensor>
    where
        F: Fn(&Mono) -> Result<UElement>,
    {
        self.expand_leg(t, leg, 1, |m| Ok(Tensor::from_element(&f(m)?)))
    }

    /// Multiplies all legs together in order.
    pub fn contract(&self, t: &Tensor) -> Result<UElement> {
        let mut out = UElement::zero();
        for (ms, c) in t.terms() {
            let mut acc: Vec<(Mono, RatQ)> = vec![(Mono::unit(self.rank()), c.clone())];
            for m in ms {
                let mut next = Vec::new();
                for (a, s) in &acc {
                    for (p, d) in self.mul_mono(a, m)? {
                        next.push((p, s * &d));
                    }
                }
                acc = next;
            }
            for (m, s) in acc {
                out.add_term(m, s);
            }
        }
        Ok(out)
    }

    // ---- canonical coordinates ----

    fn block_key(&self, m: &Mono) -> BlockKey {
        BlockKey {
            f: degree_of(&m.f, self.rank()),
            k: m.k.clone(),
            e: degree_of(&m.e, self.rank()),
        }
    }

    fn mono_coords(&self, m: &Mono) -> Result<Vec<LaurentQ>> {
        let cf = self.words.word_coords(&m.f)?;
        let ce = self.words.word_coords(&m.e)?;
        let mut v = Vec::with_capacity(cf.len() * ce.len());
        for a in cf.iter() {
            for b in ce.iter() {
                v.push(a * b);
            }
        }
        Ok(v)
    }

    /// Canonical coordinates of a tensor; equal iff the tensors are equal.
    pub fn tensor_coords(&self, t: &Tensor) -> Result<Coords> {
        let mut acc: BTreeMap<Vec<BlockKey>, Vec<RatQ>> = BTreeMap::new();
        for (ms, c) in t.terms() {
            let key: Vec<BlockKey> = ms.iter().map(|m| self.block_key(m)).collect();
            let mut v: Vec<LaurentQ> = vec![LaurentQ::one()];
            for m in ms {
                let w = self.mono_coords(m)?;
                v = v
                    .iter()
                    .flat_map(|a| w.iter().map(move |b| a * b))
                    .collect();
            }
            let slot = acc
                .entry(key)
                .or_insert_with(|| vec![RatQ::zero(); v.len()]);
            for (s, x) in slot.iter_mut().zip(v) {
                if !x.is_zero() {
                    *s = &*s + &(c * &RatQ::from(x));
                }
            }
        }
        acc.retain(|_, v| v.iter().any(|x| !x.is_zero()));
        Ok(acc)
    }

    pub fn coords(&self, x: &UElement) -> Result<Coords> {
        self.tensor_coords(&Tensor::from_element(x))
    }

    pub fn is_zero(&self, x: &UElement) -> Result<bool> {
        Ok(self.coords(x)?.is_empty())
    }

    pub fn equal(&self, x: &UElement, y: &UElement) -> Result<bool> {
        self.is_zero(&(x - y))
    }

    pub fn tensor_is_zero(&self, t: &Tensor) -> Result<bool> {
        Ok(self.tensor_coords(t)?.is_empty())
    }

    pub fn tensor_equal(&self, x: &Tensor, y: &Tensor) -> Result<bool> {
        self.tensor_is_zero(&(x - y))
    }

    /// Drops blocks that vanish modulo the Serre relations.
    pub fn prune(&self, x: &UElement) -> Result<UElement> {
        let mut blocks: BTreeMap<BlockKey, UElement> = BTreeMap::new();
        for (m, c) in x.terms() {
            blocks
                .entry(self.block_key(m))
                .or_default()
                .add_term(m.clone(), c.clone());
        }
        let mut out = UElement::zero();
        for (_, b) in blocks {
            if !self.is_zero(&b)? {
                out.add_scaled(&b, &RatQ::one());
            }
        }
        Ok(out)
    }

    /// Rewrites every block of F-words in the normal-word basis.
    pub fn normal_form(&self, x: &UElement) -> Result<UElement> {
        let pruned = self.prune(x)?;
        let mut blocks: BTreeMap<BlockKey, UElement> = BTreeMap::new();
        for (m, c) in pruned.terms() {
            blocks
                .entry(self.block_key(m))
                .or_default()
                .add_term(m.clone(), c.clone());
        }
        let mut out = UElement::zero();
        for (key, b) in blocks {
            let target = self.coords(&b)?.into_values().next().unwrap_or_default();
            let fs = self.words.slice(&key.f)?;
            let es = self.words.slice(&key.e)?;
            let mut basis = Vec::new();
            for f in &fs.normal {
                for e in &es.normal {
                    basis.push(Mono {
                        f: f.clone(),
                        k: key.k.clone(),
                        e: e.clone(),
                    });
                }
            }
            let cols: Vec<Vec<RatQ>> = basis
                .iter()
                .map(|m| {
                    Ok(self
                        .mono_coords(m)?
                        .into_iter()
                        .map(RatQ::from)
                        .collect())
                })
                .collect::<Result<_>>()?;
            let sol = crate::linalg::solve_columns(&cols, &target)?
                .ok_or_else(|| Error::Internal("normal words do not span a slice".into()))?;
            for (m, c) in basis.into_iter().zip(sol) {
                out.add_term(m, c);
            }
        }
        Ok(out)
    }

    // ---- gradings ----

    /// `-deg alpha + deg beta` for every term, if they agree.
    pub fn weight(&self, x: &UElement) -> Weight {
        let mut w: Option<Vec<i64>> = None;
        for (m, _) in x.terms() {
            let mut v = vec![0i64; self.rank()];
            for &a in &m.f {
                v[a as usize] -= 1;
            }
            for &a in &m.e {
                v[a as usize] += 1;
            }
            match &w {
                None => w = Some(v),
                Some(u) if *u != v => return Weight::Mixed,
                _ => {}
            }
        }
        match w {
            None => Weight::Zero,
            Some(v) => Weight::Pure(v),
        }
    }

    /// The weight in `X`: `sum_i w_i i2(i)`.
    pub fn weight_in_x(&self, w: &[i64]) -> Vec<i64> {
        self.datum.wt2(w)
    }

    // ---- pairing ----

    /// `<F_i, F_i>`.
    pub fn pairing_ff(&self, i: usize) -> Result<RatQ> {
        Ok(-RatQ::one().div(&self.qi_diff(i).into())?)
    }

    /// Pairing on `U^{<=0}`, extended through `<xy, z> = <x, z_(2)><y, z_(1)>`
    /// by peeling F-letters off the left argument.
    pub fn pairing(&self, x: &UElement, y: &UElement) -> Result<RatQ> {
        if !x.is_borel() || !y.is_borel() {
            return Err(Error::NotInBorel);
        }
        let mut memo = HashMap::new();
        let mut acc = RatQ::zero();
        for (a, c) in x.terms() {
            for (b, d) in y.terms() {
                let v = self.pair_left(a, b, &mut memo)?;
                acc = &acc + &(&(c * d) * &v);
            }
        }
        Ok(acc)
    }

    /// Gram matrix `<xs[a], ys[b]>`. Entries are accumulated as Laurent
    /// polynomials per F-letter multiset; the `pairing_ff` factors are applied
    /// once at the end.
    pub fn pairing_matrix(&self, xs: &[&UElement], ys: &[&UElement]) -> Result<Vec<Vec<RatQ>>> {
        if xs.iter().chain(ys).any(|x| !x.is_borel()) {
            return Err(Error::NotInBorel);
        }
        let mut memo = HashMap::new();
        let mut factors: HashMap<Vec<usize>, RatQ> = HashMap::new();
        let mut out = Vec::with_capacity(xs.len());
        for x in xs {
            let mut row = Vec::with_capacity(ys.len());
            for y in ys {
                let mut parts: BTreeMap<Vec<usize>, RatQ> = BTreeMap::new();
                for (a, c) in x.terms() {
                    for (b, d) in y.terms() {
                        let v = self.pair_reduced(a, b, &mut memo);
                        if !v.is_zero() {
                            let mut letters: Vec<usize> = a.f.iter().map(|&i| i as usize).collect();
                            letters.sort_unstable();
                            let e = parts.entry(letters).or_insert_with(RatQ::zero);
                            *e = &*e + &(&(c * d) * &RatQ::from(v));
                        }
                    }
                }
                let mut acc = RatQ::zero();
                for (letters, v) in parts {
                    if !factors.contains_key(&letters) {
                        let mut f = RatQ::one();
                        for &i in &letters {
                            f = &f * &self.pairing_ff(i)?;
                        }
                        factors.insert(letters.clone(), f);
                    }
                    acc = &acc + &(&v * &factors[&letters]);
                }
                row.push(acc);
            }
            out.push(row);
        }
        Ok(out)
    }

    /// `pair_left` with every `pairing_ff` factor replaced by 1.
    fn pair_reduced(&self, x: &Mono, y: &Mono, memo: &mut HashMap<(Mono, Mono), LaurentQ>) -> LaurentQ {
        if x.f.len() != y.f.len() {
            return LaurentQ::zero();
        }
        if x.f.is_empty() {
            return LaurentQ::monomial(1, self.mu_c_lambda(&x.k, &y.k) as i32);
        }
        let key = (x.clone(), y.clone());
        if let Some(v) = memo.get(&key) {
            return v.clone();
        }
        let i = x.f[0];
        let xr = Mono {
            f: x.f[1..].to_vec(),
            k: x.k.clone(),
            e: Vec::new(),
        };
        let mut acc = LaurentQ::zero();
        for p in 0..y.f.len() {
            if y.f[p] != i {
                continue;
            }
            let mut f = y.f[..p].to_vec();
            f.extend_from_slice(&y.f[p + 1..]);
            let yr = Mono {
                f,
                k: y.k.clone(),
                e: Vec::new(),
            };
            let v = self.pair_reduced(&xr, &yr, memo);
            if !v.is_zero() {
                let e = self.dot_word(i, &y.f[..p]);
                acc = &acc + &v.shift(e as i32);
            }
        }
        memo.insert(key, acc.clone());
        acc
    }

    fn pair_left(&self, x: &Mono, y: &Mono, memo: &mut HashMap<(Mono, Mono), RatQ>) -> Result<RatQ> {
        if x.f.len() != y.f.len() {
            return Ok(RatQ::zero());
        }
        if x.f.is_empty() {
            return Ok(RatQ::q_pow(self.mu_c_lambda(&x.k, &y.k) as i32));
        }
        let key = (x.clone(), y.clone());
        if let Some(v) = memo.get(&key) {
            return Ok(v.clone());
        }
        let i = x.f[0];
        let xr = Mono {
            f: x.f[1..].to_vec(),
            k: x.k.clone(),
            e: Vec::new(),
        };
        let ff = self.pairing_ff(i as usize)?;
        let mut acc = RatQ::zero();
        for p in 0..y.f.len() {
            if y.f[p] != i {
                continue;
            }
            let mut f = y.f[..p].to_vec();
            f.extend_from_slice(&y.f[p + 1..]);
            let yr = Mono {
                f,
                k: y.k.clone(),
                e: Vec::new(),
            };
            let v = self.pair_left(&xr, &yr, memo)?;
            if !v.is_zero() {
                let e = self.dot_word(i, &y.f[..p]);
                acc = &acc + &(&v * &ff).shift(e as i32);
            }
        }
        memo.insert(key, acc.clone());
        Ok(acc)
    }

    /// The same pairing, extended through `<x, yz> = <x_(2), y><x_(1), z>` by
    /// peeling F-letters off the right argument.
    pub fn pairing_right(&self, x: &UElement, y: &UElement) -> Result<RatQ> {
        if !x.is_borel() || !y.is_borel() {
            return Err(Error::NotInBorel);
        }
        let mut memo = HashMap::new();
        let mut acc = RatQ::zero();
        for (a, c) in x.terms() {
            for (b, d) in y.terms() {
                let v = self.pair_right(a, b, &mut memo)?;
                acc = &acc + &(&(c * d) * &v);
            }
        }
        Ok(acc)
    }

    fn pair_right(&self, x: &Mono, y: &Mono, memo: &mut HashMap<(Mono, Mono), RatQ>) -> Result<RatQ> {
        if x.f.len() != y.f.len() {
            return Ok(RatQ::zero());
        }
        if y.f.is_empty() {
            return Ok(RatQ::q_pow(self.mu_c_lambda(&x.k, &y.k) as i32));
        }
        let key = (x.clone(), y.clone());
        if let Some(v) = memo.get(&key) {
            return Ok(v.clone());
        }
        let j = y.f[0];
        let yr = Mono {
            f: y.f[1..].to_vec(),
            k: y.k.clone(),
            e: Vec::new(),
        };
        let ff = self.pairing_ff(j as usize)?;
        let mut acc = RatQ::zero();
        for p in 0..x.f.len() {
            if x.f[p] != j {
                continue;
            }
            // x_(1) = F_{alpha \ p} K_mu, x_(2) = F_j K_{mu - h(alpha \ p)}
            let mut f = x.f[..p].to_vec();
            f.extend_from_slice(&x.f[p + 1..]);
            let xr = Mono {
                f,
                k: x.k.clone(),
                e: Vec::new(),
            };
            let v = self.pair_right(&xr, &yr, memo)?;
            if !v.is_zero() {
                let e = self.dot_word(j, &x.f[..p]);
                acc = &acc + &(&v * &ff).shift(e as i32);
            }
        }
        memo.insert(key, acc.clone());
        Ok(acc)
    }

    // ---- sub-root data ----

    /// The Hopf embedding `U_q(J) -> U_q(T)` of a sub-root datum; `x` lives
    /// in an engine for `s.sub`.
    pub fn embed(&self, s: &SubRootDatum, x: &UElement) -> Result<UElement> {
        if s.ambient.rank() != self.rank() {
            return Err(Error::Input("sub-root datum does not match this engine".into()));
        }
        let map_word = |w: &[u8]| -> Word { w.iter().map(|&a| s.iota[a as usize] as u8).collect() };
        let mut out = UElement::zero();
        for (m, c) in x.terms() {
            if m.k.len() != s.sub.rank() {
                return Err(Error::Input("element does not belong to the sub datum".into()));
            }
            let mut k = vec![0; self.rank()];
            for (j, &v) in m.k.iter().enumerate() {
                k[s.iota[j]] += v;
            }
            let r = Mono {
                f: map_word(&m.f),
                k,
                e: map_word(&m.e),
            };
            self.check(&r)?;
            out.add_term(r, c.clone());
        }
        Ok(out)
    }

    // ---- text format ----

    pub fn format(&self, x: &UElement) -> String {
        if x.is_empty() {
            return "0".into();
        }
        let mut s = String::new();
        for (idx, (m, c)) in x.terms().enumerate() {
            let body = self.format_mono(m);
            let (neg, coeff) = split_sign(c);
            if idx == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            match (coeff.is_one(), body.is_empty()) {
                (true, true) => s.push('1'),
                (true, false) => s.push_str(&body),
                (false, true) => s.push_str(&coeff_text(&coeff)),
                (false, false) => s.push_str(&format!("{}*{body}", coeff_text(&coeff))),
            }
        }
        s
    }

    pub fn format_mono(&self, m: &Mono) -> String {
        let mut parts = Vec::new();
        for &a in &m.f {
            parts.push(format!("F[{}]", a + 1));
        }
        if m.k.iter().any(|&v| v != 0) {
            let ks: Vec<String> = m.k.iter().map(|v| v.to_string()).collect();
            parts.push(format!("K[{}]", ks.join(",")));
        }
        for &a in &m.e {
            parts.push(format!("E[{}]", a + 1));
        }
        parts.join("*")
    }

    pub fn format_tensor(&self, t: &Tensor) -> String {
        if t.is_empty() {
            return "0".into();
        }
        let mut s = String::new();
        for (idx, (ms, c)) in t.terms().enumerate() {
            let body: Vec<String> = ms
                .iter()
                .map(|m| {
                    let b = self.format_mono(m);
                    if b.is_empty() {
                        "1".into()
                    } else {
                        b
                    }
                })
                .collect();
            let (neg, coeff) = split_sign(c);
            if idx > 0 {
                s.push_str(if neg { " - " } else { " + " });
            } else if neg {
                s.push('-');
            }
            if !coeff.is_one() {
                s.push_str(&format!("{}*", coeff_text(&coeff)));
            }
            s.push_str(&body.join(" (x) "));
        }
        s
    }

    /// Parses sums of products of scalars, `F[i]`, `E[i]`, `H[i]`, `K[..]`
    /// (indices 1-based).
    pub fn parse(&self, s: &str) -> Result<UElement> {
        let src: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if src.is_empty() {
            return Err(Error::Parse("empty expression".into()));
        }
        let mut out = UElement::zero();
        for (neg, term) in split_top(&src, &['+', '-'])? {
            let mut acc = self.one();
            for factor in split_top(term, &['*'])?.into_iter().map(|(_, f)| f) {
                let x = self.parse_factor(factor)?;
                acc = self.mul(&acc, &x)?;
            }
            let sign = if neg { -RatQ::one() } else { RatQ::one() };
            out.add_scaled(&acc, &sign);
        }
        Ok(out)
    }

    fn parse_factor(&self, f: &str) -> Result<UElement> {
        if f == "0" {
            return Ok(UElement::zero());
        }
        let idx = |inner: &str| -> Result<usize> {
            let i: usize = inner
                .parse()
                .map_err(|_| Error::Parse(format!("bad index in {f:?}")))?;
            if i == 0 {
                return Err(Error::Parse(format!("indices are 1-based in {f:?}")));
            }
            Ok(self.check_index(i - 1)? as usize)
        };
        let bracket = |prefix: char| -> Option<&str> {
            f.strip_prefix(prefix)
                .and_then(|r| r.strip_prefix('['))
                .and_then(|r| r.strip_suffix(']'))
        };
        if let Some(inner) = bracket('F') {
            return Ok(self.f(idx(inner)?));
        }
        if let Some(inner) = bracket('E') {
            return Ok(self.e(idx(inner)?));
        }
        if let Some(inner) = bracket('H') {
            return Ok(self.h(idx(inner)?));
        }
        if let Some(inner) = bracket('K') {
            let v: Vec<i64> = inner
                .split(',')
                .map(|t| t.parse::<i64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::Parse(format!("bad K index in {f:?}")))?;
            if v.len() != self.rank() {
                return Err(Error::Parse(format!(
                    "K index {f:?} needs {} entries",
                    self.rank()
                )));
            }
            return Ok(self.k(&v));
        }
        let c = if f.starts_with('(') {
            parse_ratq(f)?
        } else {
            parse_laurent(f)?.into()
        };
        Ok(self.scalar(c))
    }
}

fn coeff_text(c: &RatQ) -> String {
    if c.is_laurent() {
        format!("({c})")
    } else {
        c.to_string()
    }
}

fn split_sign(c: &RatQ) -> (bool, RatQ) {
    let lead_negative = c
        .numer()
        .leading_coeff()
        .map(|l| l < &num_rational::BigRational::from_integer(0.into()))
        .unwrap_or(false);
    if lead_negative && c.numer().num_terms() == 1 {
        (true, -c)
    } else {
        (false, c.clone())
    }
}

/// Splits at top-level separators (outside brackets and parentheses). For
/// `+`/`-`, returns the sign of each piece; a `-` right after `^` belongs to
/// an exponent.
fn split_top<'a>(s: &'a str, seps: &[char]) -> Result<Vec<(bool, &'a str)>> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    let mut neg = false;
    let bytes = s.as_bytes();
    for (i, ch) in s.char_indices() {
        match ch {
            '(' | '[' => depth += 1,
            ')' | ']' => {
                depth -= 1;
                if depth < 0 {
                    return Err(Error::Parse(format!("unbalanced brackets in {s:?}")));
                }
            }
            _ if depth == 0 && seps.contains(&ch) => {
                if ch == '-' && i > 0 && bytes[i - 1] == b'^' {
                    continue;
                }
                if ch == '*' && i > 0 && bytes[i - 1] == b'*' {
                    return Err(Error::Parse(format!("empty factor in {s:?}")));
                }
                if i > start {
                    out.push((neg, &s[start..i]));
                } else if ch == '*' || i > 0 {
                    return Err(Error::Parse(format!("empty term in {s:?}")));
                }
                neg = ch == '-';
                start = i + 1;
            }
            _ => {}
        }
    }
    if depth != 0 {
        return Err(Error::Parse(format!("unbalanced brackets in {s:?}")));
    }
    if start >= s.len() {
        return Err(Error::Parse(format!("dangling operator in {s:?}")));
    }
    out.push((neg, &s[start..]));
    Ok(out)
}

impl fmt::Display for Mono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F{:?} K{:?} E{:?}", self.f, self.k, self.e)
    }
}
