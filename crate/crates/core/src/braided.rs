//! The coinvariant braided Hopf algebra `B` of a sub-root datum.
//!
//! `H = U^{<=0}` of the ambient datum is graded by `chi_D` (F-letters in
//! deleted nodes), `pi` keeps the degree-zero part and
//! `B = {b : b_(1) (x) pi(b_(2)) = b (x) 1}`. Everything here is computed in
//! the ambient [`Engine`] with linear algebra over canonical coordinates.

use std::collections::HashMap;
use std::sync::RwLock;

use crate::error::{Error, Result};
use crate::linalg::{self, Echelon, SparseVec};
use crate::qfield::{LaurentQ, RatQ};
use crate::rootdata::SubRootDatum;
use crate::uq::{BlockKey, Engine, EngineConfig, Mono, Tensor, UElement, Weight};
use crate::words::{Word, WordSpace};

/// Coordinate index used for echelon forms of elements and tensors.
pub type CoordKey = (Vec<BlockKey>, usize);

/// An element of `B_n` of pure weight.
#[derive(Clone, Debug)]
pub struct BElement {
    pub value: UElement,
    pub degree: usize,
    /// `-deg alpha` in `Z[I]`.
    pub weight: Vec<i64>,
}

/// An echelonized family of elements of one degree.
#[derive(Clone, Debug)]
pub struct GradedBasis {
    pub degree: usize,
    pub vectors: Vec<BElement>,
    echelon: Echelon<CoordKey>,
}

impl GradedBasis {
    pub fn new(degree: usize) -> Self {
        Self {
            degree,
            vectors: Vec::new(),
            echelon: Echelon::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    /// Pivot coordinate of each vector, in insertion order.
    pub fn pivots(&self) -> Vec<CoordKey> {
        self.echelon.pivots().cloned().collect()
    }

    /// Coefficients of `x` in the basis, if `x` lies in the span.
    pub fn express(&self, alg: &Braided, x: &UElement) -> Result<Option<Vec<RatQ>>> {
        let v = alg.vector(x)?;
        Ok(self.echelon.express(&v)?.map(|c| {
            (0..self.dim())
                .map(|j| c.get(&j).cloned().unwrap_or_default())
                .collect()
        }))
    }

    pub fn contains(&self, alg: &Braided, x: &UElement) -> Result<bool> {
        self.echelon.contains(&alg.vector(x)?)
    }

    /// Adds `b` if it is independent of the current vectors.
    pub fn push(&mut self, alg: &Braided, b: BElement) -> Result<bool> {
        let v = alg.vector(&b.value)?;
        if self.echelon.contains(&v)? {
            return Ok(false);
        }
        self.echelon.insert(&v)?;
        self.vectors.push(b);
        Ok(true)
    }
}

/// Dense matrix over `Q(q)`, `rows[r][c]`.
pub type Matrix = Vec<Vec<RatQ>>;

/// `Psi` on `B_1 (x) B_1` in the basis `b_i (x) b_j` (index `i * dim + j`);
/// column `c` holds the image of basis tensor `c`.
#[derive(Clone, Debug)]
pub struct BraidingMatrix {
    pub dim: usize,
    pub entries: Matrix,
}

/// How a bounded computation ended.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Completion {
    Complete,
    CapExceeded { cap: usize },
    BoundExceeded(String),
}

impl Completion {
    pub fn is_complete(&self) -> bool {
        matches!(self, Completion::Complete)
    }
}

/// The module `V(lambda'_d)` generated by `F_d H_d`.
#[derive(Clone, Debug)]
pub struct Submodule {
    pub node: usize,
    pub dim: usize,
    /// `rho(wt2(-d))` in `X'`.
    pub highest_weight: Vec<i64>,
    pub dominant: bool,
    /// Vectors of the module killed by every `Ad_{E_j}`, `j` in `iota(J)`.
    pub primitive: Vec<UElement>,
    /// Weights (in `Z[I]`) of the primitive vectors.
    pub primitive_weights: Vec<Vec<i64>>,
}

#[derive(Clone, Debug)]
pub struct B1 {
    pub basis: GradedBasis,
    pub modules: Vec<Submodule>,
    pub completion: Completion,
}

/// Acting generators of `U(J)~`: `F_j`, `E_j` for `j` in `iota(J)`, `K_i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Generator {
    F(usize),
    E(usize),
    K(usize),
}

impl std::fmt::Display for Generator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Generator::F(i) => write!(f, "F{}", i + 1),
            Generator::E(i) => write!(f, "E{}", i + 1),
            Generator::K(i) => write!(f, "K{}", i + 1),
        }
    }
}

/// Context for computations with `B` of one sub-root datum.
#[derive(Debug)]
pub struct Braided {
    sub: SubRootDatum,
    engine: Engine,
    pi_cache: RwLock<HashMap<Mono, UElement>>,
}

fn is_bound(e: &Error) -> bool {
    matches!(
        e,
        Error::HeightBound { .. } | Error::DegreeBound { .. } | Error::CapExceeded { .. }
    )
}

impl Braided {
    pub fn new(sub: &SubRootDatum, config: EngineConfig) -> Result<Self> {
        Ok(Self {
            engine: Engine::for_sub(sub, config)?,
            sub: sub.clone(),
            pi_cache: RwLock::new(HashMap::new()),
        })
    }

    pub fn engine(&self) -> &Engine {
        &self.engine
    }

    pub fn sub(&self) -> &SubRootDatum {
        &self.sub
    }

    pub fn config(&self) -> EngineConfig {
        self.engine.config()
    }

    /// Canonical coordinates as a sparse vector.
    pub fn vector(&self, x: &UElement) -> Result<SparseVec<CoordKey>> {
        self.tensor_vector(&Tensor::from_element(x))
    }

    pub fn tensor_vector(&self, t: &Tensor) -> Result<SparseVec<CoordKey>> {
        let mut out = SparseVec::new();
        for (k, v) in self.engine.tensor_coords(t)? {
            for (i, c) in v.into_iter().enumerate() {
                if !c.is_zero() {
                    out.insert((k.clone(), i), c);
                }
            }
        }
        Ok(out)
    }

    fn mono_degree(&self, m: &Mono) -> usize {
        self.engine.chi(&m.f) + self.engine.chi(&m.e)
    }

    /// `chi_D`-degree of a homogeneous element.
    pub fn degree(&self, x: &UElement) -> Option<usize> {
        let mut d = None;
        for (m, _) in x.terms() {
            let e = self.mono_degree(m);
            match d {
                None => d = Some(e),
                Some(f) if f != e => return None,
                _ => {}
            }
        }
        Some(d.unwrap_or(0))
    }

    fn borel(&self, x: &UElement) -> Result<()> {
        if x.is_borel() {
            Ok(())
        } else {
            Err(Error::NotInBorel)
        }
    }

    // ---- structure maps ----

    /// Keeps the `chi_D`-degree-zero terms.
    pub fn pi0(&self, x: &UElement) -> UElement {
        UElement::from_pairs(
            x.terms()
                .filter(|(m, _)| self.mono_degree(m) == 0)
                .map(|(m, c)| (m.clone(), c.clone())),
        )
    }

    fn pi_mono(&self, m: &Mono) -> Result<UElement> {
        if let Some(v) = self.pi_cache.read().unwrap().get(m) {
            return Ok(v.clone());
        }
        let mut out = UElement::zero();
        for (l, r, c) in self.engine.coproduct_mono(m)? {
            if self.mono_degree(&r) != 0 {
                continue;
            }
            let s = UElement::from_pairs(self.engine.antipode_mono(&r)?);
            let left = UElement::from_mono(l, c);
            out.add_scaled(&self.engine.mul(&left, &s)?, &RatQ::one());
        }
        self.pi_cache
            .write()
            .unwrap()
            .insert(m.clone(), out.clone());
        Ok(out)
    }

    /// `Pi(h) = h_(1) S(pi(h_(2)))`, the projection onto `B`.
    #[allow(non_snake_case)]
    pub fn Pi(&self, h: &UElement) -> Result<UElement> {
        self.borel(h)?;
        let mut out = UElement::zero();
        for (m, c) in h.terms() {
            out.add_scaled(&self.pi_mono(m)?, c);
        }
        Ok(out)
    }

    /// `Upsilon(h) = Pi(h_(1)) (x) pi(h_(2))` in `B (x) H_0`.
    pub fn upsilon(&self, h: &UElement) -> Result<Tensor> {
        self.borel(h)?;
        let t = self.engine.coproduct(h)?;
        let t = self.engine.map_leg(&t, 1, |m| {
            Ok(if self.mono_degree(m) == 0 {
                UElement::from_mono(m.clone(), RatQ::one())
            } else {
                UElement::zero()
            })
        })?;
        self.engine.map_leg(&t, 0, |m| self.pi_mono(m))
    }

    /// `Upsilon^{-1}(b (x) h) = b h`.
    pub fn upsilon_inv(&self, t: &Tensor) -> Result<UElement> {
        self.engine.contract(t)
    }

    /// Product in the bosonisation `B x H_0`:
    /// `(b (x) h)(c (x) g) = b (h_(1) |> c) (x) h_(2) g`.
    pub fn bosonisation_mul(&self, x: &Tensor, y: &Tensor) -> Result<Tensor> {
        let mut out = Tensor::zero(2);
        for (l, a) in x.terms() {
            let b = UElement::from_mono(l[0].clone(), a.clone());
            let dh = self.engine.coproduct_mono(&l[1])?;
            for (r, d) in y.terms() {
                let c = UElement::from_mono(r[0].clone(), d.clone());
                let g = UElement::from_mono(r[1].clone(), RatQ::one());
                for (h1, h2, e) in &dh {
                    let act = self
                        .engine
                        .adjoint(&UElement::from_mono(h1.clone(), e.clone()), &c)?;
                    let left = self.engine.mul(&b, &act)?;
                    let right = self
                        .engine
                        .mul(&UElement::from_mono(h2.clone(), RatQ::one()), &g)?;
                    out.add_scaled(&Tensor::pure(&left, &right), &RatQ::one());
                }
            }
        }
        Ok(out)
    }

    /// `Delta_(b) = Pi(b_(1)) (x) b_(2)`.
    pub fn braided_coproduct(&self, b: &UElement) -> Result<Tensor> {
        self.borel(b)?;
        let t = self.engine.coproduct(b)?;
        self.engine.map_leg(&t, 0, |m| self.pi_mono(m))
    }

    /// `S_(b) = pi(b_(1)) S(b_(2))`.
    pub fn braided_antipode(&self, b: &UElement) -> Result<UElement> {
        self.borel(b)?;
        let t = self.engine.coproduct(b)?;
        let mut out = UElement::zero();
        for (legs, c) in t.terms() {
            if self.mono_degree(&legs[0]) != 0 {
                continue;
            }
            let s = UElement::from_pairs(self.engine.antipode_mono(&legs[1])?);
            let l = UElement::from_mono(legs[0].clone(), c.clone());
            out.add_scaled(&self.engine.mul(&l, &s)?, &RatQ::one());
        }
        Ok(out)
    }

    pub fn braided_counit(&self, b: &UElement) -> RatQ {
        self.engine.counit(b)
    }

    /// `b_(1) (x) pi(b_(2)) = b (x) 1`.
    pub fn is_coinvariant(&self, b: &UElement) -> Result<bool> {
        self.borel(b)?;
        let t = self.engine.coproduct(b)?;
        let t = self.engine.map_leg(&t, 1, |m| Ok(self.pi0(&UElement::from_mono(m.clone(), RatQ::one()))))?;
        self.engine
            .tensor_equal(&t, &Tensor::pure(b, &self.engine.one()))
    }

    /// `Psi(b (x) c) = Ad_{pi(b_(1))}(c) (x) b_(2)`, linear in both legs.
    pub fn braiding(&self, b: &UElement, c: &UElement) -> Result<Tensor> {
        let mut out = Tensor::zero(2);
        for (legs, k) in self.engine.coproduct(b)?.terms() {
            if self.mono_degree(&legs[0]) != 0 {
                continue;
            }
            let u = UElement::from_mono(legs[0].clone(), k.clone());
            let act = self.engine.adjoint(&u, c)?;
            let right = UElement::from_mono(legs[1].clone(), RatQ::one());
            out.add_scaled(&Tensor::pure(&act, &right), &RatQ::one());
        }
        Ok(out)
    }

    /// `Psi` applied to legs `leg, leg + 1` of a tensor.
    pub fn braiding_on(&self, t: &Tensor, leg: usize) -> Result<Tensor> {
        let mut out = Tensor::zero(t.legs());
        for (ms, c) in t.terms() {
            let b = UElement::from_mono(ms[leg].clone(), c.clone());
            let d = UElement::from_mono(ms[leg + 1].clone(), RatQ::one());
            for (ps, e) in self.braiding(&b, &d)?.terms() {
                let mut nm = ms.clone();
                nm[leg] = ps[0].clone();
                nm[leg + 1] = ps[1].clone();
                out.add_term(nm, e.clone());
            }
        }
        Ok(out)
    }

    /// Product in `B (x) B`: `(a (x) b)(c (x) d) = a Psi(b (x) c) d`.
    pub fn braided_tensor_mul(&self, x: &Tensor, y: &Tensor) -> Result<Tensor> {
        let mut out = Tensor::zero(2);
        for (l, a) in x.terms() {
            for (r, d) in y.terms() {
                let b = UElement::from_mono(l[1].clone(), a * d);
                let c = UElement::from_mono(r[0].clone(), RatQ::one());
                let left = UElement::from_mono(l[0].clone(), RatQ::one());
                let right = UElement::from_mono(r[1].clone(), RatQ::one());
                for (ps, e) in self.braiding(&b, &c)?.terms() {
                    let x0 = self
                        .engine
                        .mul(&left, &UElement::from_mono(ps[0].clone(), e.clone()))?;
                    let x1 = self
                        .engine
                        .mul(&UElement::from_mono(ps[1].clone(), RatQ::one()), &right)?;
                    out.add_scaled(&Tensor::pure(&x0, &x1), &RatQ::one());
                }
            }
        }
        Ok(out)
    }

    // ---- the acting algebra ----

    /// Generators in the fixed exploration order.
    pub fn generators(&self) -> Vec<Generator> {
        let kept = self.sub.kept();
        let mut g: Vec<Generator> = kept.iter().map(|&j| Generator::F(j)).collect();
        g.extend(kept.iter().map(|&j| Generator::E(j)));
        g.extend((0..self.engine.rank()).map(Generator::K));
        g
    }

    pub fn generator_element(&self, g: Generator) -> UElement {
        match g {
            Generator::F(j) => self.engine.f(j),
            Generator::E(j) => self.engine.e(j),
            Generator::K(i) => {
                let mut mu = vec![0; self.engine.rank()];
                mu[i] = 1;
                self.engine.k(&mu)
            }
        }
    }

    /// `Ad_g(x)`, reduced back into `U^{<=0}`.
    pub fn act(&self, g: Generator, x: &UElement) -> Result<UElement> {
        let y = self.engine.adjoint(&self.generator_element(g), x)?;
        if y.is_borel() {
            return Ok(y);
        }
        let y = self.engine.prune(&y)?;
        if y.is_borel() {
            Ok(y)
        } else {
            Err(Error::Internal(format!(
                "Ad_{g} left U^<=0 on a coinvariant element"
            )))
        }
    }

    fn belement(&self, value: UElement) -> Result<BElement> {
        let degree = self
            .degree(&value)
            .ok_or_else(|| Error::Internal("inhomogeneous element of B".into()))?;
        let weight = match self.engine.weight(&value) {
            Weight::Pure(w) => w,
            Weight::Zero => vec![0; self.engine.rank()],
            Weight::Mixed => return Err(Error::Internal("element of B without pure weight".into())),
        };
        Ok(BElement {
            value,
            degree,
            weight,
        })
    }

    /// `F_d H_d`.
    pub fn seed(&self, d: usize) -> UElement {
        let f = self.engine.f(d);
        self.engine
            .mul(&f, &self.engine.h(d))
            .expect("degree-one seed is within every bound")
    }

    /// Breadth-first closure of `seeds` under the acting generators.
    fn orbit(&self, seeds: &[UElement], degree: usize) -> Result<(GradedBasis, Completion)> {
        let cap = self.config().orbit_cap;
        let mut basis = GradedBasis::new(degree);
        let mut wave = Vec::new();
        for s in seeds {
            if self.engine.is_zero(s)? {
                continue;
            }
            let b = self.belement(s.clone())?;
            if basis.push(self, b)? {
                wave.push(basis.dim() - 1);
            }
        }
        let gens = self.generators();
        while !wave.is_empty() {
            let mut next = Vec::new();
            for &i in &wave {
                for &g in &gens {
                    let y = match self.act(g, &basis.vectors[i].value) {
                        Ok(y) => y,
                        Err(e) if is_bound(&e) => {
                            return Ok((basis, Completion::BoundExceeded(e.to_string())))
                        }
                        Err(e) => return Err(e),
                    };
                    if y.is_empty() || self.engine.is_zero(&y)? {
                        continue;
                    }
                    if basis.push(self, self.belement(y)?)? {
                        if basis.dim() > cap {
                            return Ok((basis, Completion::CapExceeded { cap }));
                        }
                        next.push(basis.dim() - 1);
                    }
                }
            }
            wave = next;
        }
        Ok((basis, Completion::Complete))
    }

    /// Orbit closure of `{F_d H_d}` plus the modules `V(lambda'_d)`.
    #[allow(non_snake_case)]
    pub fn compute_B1(&self) -> Result<B1> {
        let deleted = self.sub.deleted();
        let seeds: Vec<UElement> = deleted.iter().map(|&d| self.seed(d)).collect();
        let (basis, completion) = self.orbit(&seeds, 1)?;
        let mut modules = Vec::new();
        if completion.is_complete() {
            for &d in &deleted {
                modules.push(self.submodule(d)?);
            }
        }
        Ok(B1 {
            basis,
            modules,
            completion,
        })
    }

    fn submodule(&self, d: usize) -> Result<Submodule> {
        let (basis, _) = self.orbit(&[self.seed(d)], 1)?;
        let kept = self.sub.kept();
        // kernel of the stacked E-actions on the module
        let images: Vec<SparseVec<(usize, CoordKey)>> = basis
            .vectors
            .iter()
            .map(|b| {
                let mut v = SparseVec::new();
                for &j in &kept {
                    for (k, c) in self.vector(&self.act(Generator::E(j), &b.value)?)? {
                        v.insert((j, k), c);
                    }
                }
                Ok(v)
            })
            .collect::<Result<_>>()?;
        let mut primitive = Vec::new();
        let mut primitive_weights = Vec::new();
        for comb in linalg::kernel(&images)? {
            let mut x = UElement::zero();
            for (i, c) in &comb {
                x.add_scaled(&basis.vectors[*i].value, c);
            }
            primitive_weights.push(match self.engine.weight(&x) {
                Weight::Pure(w) => w,
                _ => Vec::new(),
            });
            primitive.push(x);
        }
        let mut minus_d = vec![0; self.engine.rank()];
        minus_d[d] = -1;
        let highest_weight = self.sub.rho(&self.sub.ambient.wt2(&minus_d))?;
        let dominant = if self.sub.sub.rank() == 0 {
            true
        } else {
            let all: Vec<usize> = (0..self.sub.sub.rank()).collect();
            self.sub.sub.is_dominant(&highest_weight, &all)?
        };
        Ok(Submodule {
            node: d,
            dim: basis.dim(),
            highest_weight,
            dominant,
            primitive,
            primitive_weights,
        })
    }

    /// Matrix of `Ad_g` on a basis, for every acting generator.
    pub fn action_table(&self, basis: &GradedBasis) -> Result<Vec<(Generator, Matrix)>> {
        let n = basis.dim();
        let mut out = Vec::new();
        for g in self.generators() {
            let mut m = vec![vec![RatQ::zero(); n]; n];
            for (c, b) in basis.vectors.iter().enumerate() {
                let y = self.act(g, &b.value)?;
                let col = basis.express(self, &y)?.ok_or_else(|| {
                    Error::Internal(format!("Ad_{g} does not preserve the basis span"))
                })?;
                for (r, x) in col.into_iter().enumerate() {
                    m[r][c] = x;
                }
            }
            out.push((g, m));
        }
        Ok(out)
    }
}

/// Agreement of the two computations of `B_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BnCertificate {
    /// Rank of the span of `n`-fold products of `B_1`.
    pub products_dim: usize,
    /// Rank of `Pi` applied to normal words of the admissible weights.
    pub coinvariant_dim: usize,
    /// Rank of both families together.
    pub union_dim: usize,
    /// Coefficient of `t^n` in `prod 1/(1 - t^chi(beta))` over roots outside
    /// `J`, for finite type.
    pub pbw_count: Option<u64>,
}

impl BnCertificate {
    pub fn agree(&self) -> bool {
        self.products_dim == self.coinvariant_dim
            && self.union_dim == self.products_dim
            && self.pbw_count.map_or(true, |c| c == self.products_dim as u64)
    }
}

#[derive(Clone, Debug)]
pub struct Bn {
    pub basis: GradedBasis,
    pub certificate: BnCertificate,
}

/// A relation `sum c_t b_{t_1} ... b_{t_n} = 0`.
#[derive(Clone, Debug)]
pub struct Relation {
    pub terms: Vec<(Vec<usize>, RatQ)>,
}

#[derive(Clone, Debug)]
pub struct ModuleGenerator {
    pub word: Vec<usize>,
    pub element: UElement,
    pub coinvariant: bool,
    /// Killed by every `Ad_{E_j}`.
    pub primitive: bool,
}

#[derive(Clone, Debug)]
pub struct Nilpotency {
    pub vector: usize,
    pub generator: Generator,
    /// Least `k` with `Ad_g^k b = 0`, if at most the bound.
    pub degree: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct NicholsReport {
    pub max_degree: usize,
    pub b0_is_field: bool,
    /// `(n, dim P(B) cap B_n)` for `2 <= n <= N`.
    pub primitive_dims: Vec<(usize, usize)>,
    /// `(n, B_n spanned by products of B_1)`.
    pub generated: Vec<(usize, bool)>,
    pub witness: Option<String>,
}

impl NicholsReport {
    pub fn passed(&self) -> bool {
        self.b0_is_field
            && self.primitive_dims.iter().all(|(_, d)| *d == 0)
            && self.generated.iter().all(|(_, g)| *g)
    }
}

#[derive(Clone, Debug)]
pub struct ZeroAction {
    pub deleted: usize,
    pub kept: usize,
    /// Exponent `e` with `K_d F_j K_d^{-1} = q^e F_j`.
    pub exponent: i64,
    pub holds: bool,
}

#[derive(Clone, Debug)]
pub struct ZeroComponentReport {
    pub actions: Vec<ZeroAction>,
    /// `(nu over J, dim in the ambient U^-, dim in U^-(J))`.
    pub slices: Vec<(Vec<u32>, usize, usize)>,
}

impl ZeroComponentReport {
    pub fn passed(&self) -> bool {
        self.actions.iter().all(|a| a.holds) && self.slices.iter().all(|(_, a, b)| a == b)
    }
}

/// A quadratic relation `(Psi - alpha)(Psi + beta) = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct Hecke {
    pub alpha: RatQ,
    pub beta: RatQ,
}

/// Multisets of items with positive weights summing to `n`, as index lists.
fn multisets(weights: &[usize], n: usize, start: usize, acc: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if n == 0 {
        out.push(acc.clone());
        return;
    }
    for i in start..weights.len() {
        if weights[i] <= n {
            acc.push(i);
            multisets(weights, n - weights[i], i, acc, out);
            acc.pop();
        }
    }
}

fn tuples(d: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..d).map(move |i| {
                    let mut u = t.clone();
                    u.push(i);
                    u
                })
            })
            .collect();
    }
    out
}

impl Braided {
    fn root_chi(&self, beta: &[i64]) -> usize {
        self.sub
            .deleted()
            .iter()
            .map(|&d| beta[d].max(0) as usize)
            .sum()
    }

    /// Weights `nu` (as multidegrees) on which `B_n` can live: sums of roots
    /// outside `J` with total `chi_D` equal to `n` in finite type, and every
    /// multidegree of degree `n` of height at most `n` times the largest
    /// height in `B_1` otherwise.
    pub fn admissible_degrees(&self, b1: &B1, n: usize) -> Vec<Vec<u32>> {
        let rank = self.engine.rank();
        let mut out: Vec<Vec<u32>> = Vec::new();
        match self.engine.words().positive_roots() {
            Some(roots) => {
                let outside: Vec<&Vec<i64>> =
                    roots.iter().filter(|b| self.root_chi(b) > 0).collect();
                let weights: Vec<usize> = outside.iter().map(|b| self.root_chi(b)).collect();
                let mut ms = Vec::new();
                multisets(&weights, n, 0, &mut Vec::new(), &mut ms);
                for m in ms {
                    let mut nu = vec![0u32; rank];
                    for i in m {
                        for (a, &b) in nu.iter_mut().zip(outside[i]) {
                            *a += b as u32;
                        }
                    }
                    if !out.contains(&nu) {
                        out.push(nu);
                    }
                }
            }
            None => {
                let top = b1
                    .basis
                    .vectors
                    .iter()
                    .map(|b| b.weight.iter().map(|x| x.unsigned_abs() as usize).sum::<usize>())
                    .max()
                    .unwrap_or(0);
                let h = self.config().max_height.min(n * top);
                let mut all = vec![Vec::new()];
                for _ in 0..rank {
                    all = all
                        .into_iter()
                        .flat_map(|v: Vec<u32>| {
                            (0..=h as u32).map(move |a| {
                                let mut w = v.clone();
                                w.push(a);
                                w
                            })
                        })
                        .collect();
                }
                for nu in all {
                    let total: u32 = nu.iter().sum();
                    let chi: u32 = self.sub.deleted().iter().map(|&d| nu[d]).sum();
                    if total as usize <= h && chi as usize == n {
                        out.push(nu);
                    }
                }
            }
        }
        out.sort();
        out
    }

    /// Generating-function count of `dim B_n` for finite type.
    pub fn pbw_count(&self, n: usize) -> Option<u64> {
        let roots = self.engine.words().positive_roots()?;
        let mut coeffs = vec![0u64; n + 1];
        coeffs[0] = 1;
        for b in roots {
            let c = self.root_chi(b);
            if c == 0 {
                continue;
            }
            for k in c..=n {
                coeffs[k] += coeffs[k - c];
            }
        }
        Some(coeffs[n])
    }

    /// Basis of the `chi_D`-degree-`n` part of `U^-` restricted to the
    /// multidegree `nu` (normal words times `K_0`).
    pub fn borel_basis(&self, nu: &[u32]) -> Result<Vec<UElement>> {
        let slice = self.engine.words().slice(nu)?;
        Ok(slice.normal.iter().map(|w| self.word_element(w)).collect())
    }

    fn word_element(&self, w: &Word) -> UElement {
        UElement::from_mono(
            Mono {
                f: w.clone(),
                k: vec![0; self.engine.rank()],
                e: Vec::new(),
            },
            RatQ::one(),
        )
    }

    /// `B_n` computed twice: products of `B_1` and `Pi` of `U^-` slices.
    #[allow(non_snake_case)]
    pub fn compute_Bn(&self, b1: &B1, n: usize) -> Result<Bn> {
        if !b1.completion.is_complete() {
            return Err(Error::CapExceeded {
                cap: self.config().orbit_cap,
            });
        }
        if n > self.config().max_degree {
            return Err(Error::DegreeBound {
                degree: n,
                bound: self.config().max_degree,
            });
        }
        let mut products = GradedBasis::new(n);
        let vs: Vec<&UElement> = b1.basis.vectors.iter().map(|b| &b.value).collect();
        for t in tuples(vs.len(), n) {
            let factors: Vec<&UElement> = t.iter().map(|&i| vs[i]).collect();
            let p = if factors.is_empty() {
                self.engine.one()
            } else {
                self.engine.mul_all(&factors)?
            };
            if !self.engine.is_zero(&p)? {
                products.push(self, self.belement(p)?)?;
            }
        }
        let mut coinv = GradedBasis::new(n);
        for nu in self.admissible_degrees(b1, n) {
            for x in self.borel_basis(&nu)? {
                let p = self.Pi(&x)?;
                if !self.engine.is_zero(&p)? {
                    coinv.push(self, self.belement(p)?)?;
                }
            }
        }
        let mut union = products.clone();
        for b in &coinv.vectors {
            union.push(self, b.clone())?;
        }
        let certificate = BnCertificate {
            products_dim: products.dim(),
            coinvariant_dim: coinv.dim(),
            union_dim: union.dim(),
            pbw_count: self.pbw_count(n),
        };
        if !certificate.agree() {
            return Err(Error::Internal(format!(
                "the two computations of B_{n} disagree: {certificate:?}"
            )));
        }
        Ok(Bn {
            basis: products,
            certificate,
        })
    }

    /// Kernel of `T^n(B_1) -> B_n`, multiplication of basis vectors.
    pub fn relations_at_degree(&self, b1: &B1, n: usize) -> Result<Vec<Relation>> {
        let vs: Vec<&UElement> = b1.basis.vectors.iter().map(|b| &b.value).collect();
        let ts = tuples(vs.len(), n);
        let images: Vec<SparseVec<CoordKey>> = ts
            .iter()
            .map(|t| {
                let f: Vec<&UElement> = t.iter().map(|&i| vs[i]).collect();
                let p = if f.is_empty() {
                    self.engine.one()
                } else {
                    self.engine.mul_all(&f)?
                };
                self.vector(&p)
            })
            .collect::<Result<_>>()?;
        Ok(linalg::kernel(&images)?
            .into_iter()
            .map(|k| Relation {
                terms: k.into_iter().map(|(i, c)| (ts[i].clone(), c)).collect(),
            })
            .collect())
    }

    /// `Delta_(b) - b (x) 1 - 1 (x) b`.
    pub fn reduced_coproduct(&self, b: &UElement) -> Result<Tensor> {
        let one = self.engine.one();
        let mut t = self.braided_coproduct(b)?;
        t.add_scaled(&Tensor::pure(b, &one), &-RatQ::one());
        t.add_scaled(&Tensor::pure(&one, b), &-RatQ::one());
        Ok(t)
    }

    /// Basis of the braided primitives in the span of `basis`.
    pub fn primitives(&self, basis: &GradedBasis) -> Result<Vec<UElement>> {
        let images: Vec<SparseVec<CoordKey>> = basis
            .vectors
            .iter()
            .map(|b| self.tensor_vector(&self.reduced_coproduct(&b.value)?))
            .collect::<Result<_>>()?;
        Ok(linalg::kernel(&images)?
            .into_iter()
            .map(|k| {
                let mut x = UElement::zero();
                for (i, c) in &k {
                    x.add_scaled(&basis.vectors[*i].value, c);
                }
                x
            })
            .collect())
    }

    pub fn primitives_at_degree(&self, b1: &B1, n: usize) -> Result<Vec<UElement>> {
        if n == 1 {
            return self.primitives(&b1.basis);
        }
        let bn = self.compute_Bn(b1, n)?;
        self.primitives(&bn.basis)
    }

    /// Matrix of `Psi` on `B_1 (x) B_1`.
    pub fn braiding_matrix(&self, basis: &GradedBasis) -> Result<BraidingMatrix> {
        let d = basis.dim();
        let mut ech = Echelon::new();
        for i in 0..d {
            for j in 0..d {
                let t = Tensor::pure(&basis.vectors[i].value, &basis.vectors[j].value);
                if ech.insert(&self.tensor_vector(&t)?)?.is_some() {
                    return Err(Error::Internal("basis tensors are dependent".into()));
                }
            }
        }
        let mut entries = vec![vec![RatQ::zero(); d * d]; d * d];
        for i in 0..d {
            for j in 0..d {
                let t = self.braiding(&basis.vectors[i].value, &basis.vectors[j].value)?;
                let comb = ech
                    .express(&self.tensor_vector(&t)?)?
                    .ok_or_else(|| Error::Internal("Psi leaves B_1 (x) B_1".into()))?;
                for (r, c) in comb {
                    entries[r][i * d + j] = c;
                }
            }
        }
        Ok(BraidingMatrix { dim: d, entries })
    }

    /// Elements `F_gamma H_{wt1 gamma}` for words `gamma` over `D`.
    pub fn module_generators(&self, maxlen: usize) -> Result<Vec<ModuleGenerator>> {
        let deleted = self.sub.deleted();
        let rank = self.engine.rank();
        let mut out = Vec::new();
        for len in 0..=maxlen {
            for t in tuples(deleted.len(), len) {
                let word: Vec<usize> = t.iter().map(|&i| deleted[i]).collect();
                let mut h = vec![0i64; rank];
                for &d in &word {
                    h[d] += self.engine.c(d) as i64;
                }
                let letters: Vec<u8> = word.iter().map(|&d| d as u8).collect();
                let element = self.engine.mul(&self.engine.f_word(&letters), &self.engine.k(&h))?;
                let coinvariant = self.is_coinvariant(&element)?
                    && self.engine.equal(&self.Pi(&element)?, &element)?;
                let mut primitive = true;
                for j in self.sub.kept() {
                    if !self.engine.is_zero(&self.act(Generator::E(j), &element)?)? {
                        primitive = false;
                    }
                }
                out.push(ModuleGenerator {
                    word,
                    element,
                    coinvariant,
                    primitive,
                });
            }
        }
        Ok(out)
    }

    /// `U(J)~`-module closure of the module generators of length `n`.
    pub fn generated_module(&self, n: usize) -> Result<(GradedBasis, Completion)> {
        let seeds: Vec<UElement> = self
            .module_generators(n)?
            .into_iter()
            .filter(|g| g.word.len() == n)
            .map(|g| g.element)
            .collect();
        if n == 0 {
            let mut b = GradedBasis::new(0);
            b.push(self, self.belement(self.engine.one())?)?;
            return Ok((b, Completion::Complete));
        }
        self.orbit(&seeds, n)
    }

    /// Local nilpotency of `Ad_{E_j}` and `Ad_{F_j}` on a basis.
    pub fn integrability_check(&self, basis: &GradedBasis, nilbound: usize) -> Result<Vec<Nilpotency>> {
        let mut out = Vec::new();
        for (v, b) in basis.vectors.iter().enumerate() {
            for j in self.sub.kept() {
                for g in [Generator::E(j), Generator::F(j)] {
                    let mut x = b.value.clone();
                    let mut degree = None;
                    for k in 1..=nilbound {
                        x = self.act(g, &x)?;
                        if self.engine.is_zero(&x)? {
                            degree = Some(k);
                            break;
                        }
                    }
                    out.push(Nilpotency {
                        vector: v,
                        generator: g,
                        degree,
                    });
                }
            }
        }
        Ok(out)
    }

    /// `(index, corank)`; the index is `None` when the orbit hit a bound.
    pub fn index_and_corank(&self, b1: &B1) -> (Option<usize>, usize) {
        let index = b1.completion.is_complete().then(|| b1.basis.dim());
        (index, self.sub.corank())
    }

    /// `dim B_n` for `n <= max`, each with its certificate.
    pub fn hilbert_series(&self, b1: &B1, max: usize) -> Result<Vec<Bn>> {
        (0..=max).map(|n| self.compute_Bn(b1, n)).collect()
    }

    pub fn nichols_check(&self, b1: &B1, max: usize) -> Result<NicholsReport> {
        let b0 = self.compute_Bn(b1, 0)?;
        let mut report = NicholsReport {
            max_degree: max,
            b0_is_field: b0.basis.dim() == 1,
            primitive_dims: Vec::new(),
            generated: Vec::new(),
            witness: None,
        };
        for n in 1..=max {
            let bn = self.compute_Bn(b1, n)?;
            report.generated.push((n, bn.certificate.agree()));
            if n >= 2 {
                let p = self.primitives(&bn.basis)?;
                if let (Some(x), None) = (p.first(), &report.witness) {
                    report.witness = Some(format!(
                        "primitive in degree {n}: {}",
                        self.engine.format(x)
                    ));
                }
                report.primitive_dims.push((n, p.len()));
            }
        }
        Ok(report)
    }

    /// Checks `K_d F_j K_d^{-1} = q^{-<i1(d), i2(j)>} F_j` and that the
    /// degree-zero slices of `U^-` match `U^-(J)` up to total degree 3.
    pub fn verify_zero_component(&self) -> Result<ZeroComponentReport> {
        let t = &self.sub.ambient;
        let rank = self.engine.rank();
        let mut actions = Vec::new();
        for d in self.sub.deleted() {
            for j in self.sub.kept() {
                let mut mu = vec![0; rank];
                mu[d] = 1;
                let neg: Vec<i64> = mu.iter().map(|x| -x).collect();
                let lhs = self.engine.mul_all(&[
                    &self.engine.k(&mu),
                    &self.engine.f(j),
                    &self.engine.k(&neg),
                ])?;
                let exponent = -t.pair(&t.i1[d], &t.i2[j]);
                let rhs = self.engine.f(j).scale(&RatQ::q_pow(exponent as i32));
                let holds = self.engine.equal(&lhs, &rhs)? && self.engine.equal(&self.pi0(&lhs), &lhs)?;
                actions.push(ZeroAction {
                    deleted: d,
                    kept: j,
                    exponent,
                    holds,
                });
            }
        }
        let j = &self.sub.sub;
        let mut slices = Vec::new();
        if j.rank() > 0 {
            let js = WordSpace::new(j.dot.clone(), self.config().max_height);
            for total in 0..=3u32 {
                let mut degs = vec![Vec::new()];
                for _ in 0..j.rank() {
                    degs = degs
                        .into_iter()
                        .flat_map(|v: Vec<u32>| {
                            (0..=total).map(move |a| {
                                let mut w = v.clone();
                                w.push(a);
                                w
                            })
                        })
                        .collect();
                }
                for nu in degs.into_iter().filter(|v| v.iter().sum::<u32>() == total) {
                    let mut amb = vec![0u32; rank];
                    for (k, &a) in nu.iter().enumerate() {
                        amb[self.sub.iota[k]] = a;
                    }
                    slices.push((nu.clone(), self.engine.words().dim(&amb)?, js.dim(&nu)?));
                }
            }
        }
        Ok(ZeroComponentReport { actions, slices })
    }

    /// Rank of the Gram matrix of the pairing on a basis.
    pub fn pairing_rank(&self, basis: &GradedBasis) -> Result<usize> {
        let xs: Vec<&UElement> = basis.vectors.iter().map(|b| &b.value).collect();
        let gram = self.engine.pairing_matrix(&xs, &xs)?;
        let rows: Vec<SparseVec<usize>> = gram
            .into_iter()
            .map(|r| {
                let mut row = SparseVec::new();
                for (j, x) in r.into_iter().enumerate() {
                    if !x.is_zero() {
                        row.insert(j, x);
                    }
                }
                row
            })
            .collect();
        linalg::rank(&rows)
    }
}

// ---- dense matrices ----

pub fn identity_matrix(n: usize) -> Matrix {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { RatQ::one() } else { RatQ::zero() })
                .collect()
        })
        .collect()
}

pub fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let (n, m) = (a.len(), b.first().map_or(0, |r| r.len()));
    let mut out = vec![vec![RatQ::zero(); m]; n];
    for i in 0..n {
        for (k, bk) in b.iter().enumerate() {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..m {
                if !bk[j].is_zero() {
                    out[i][j] = &out[i][j] + &(&a[i][k] * &bk[j]);
                }
            }
        }
    }
    out
}

pub fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    let (n, m) = (a.len(), b.len());
    let mut out = vec![vec![RatQ::zero(); n * m]; n * m];
    for i in 0..n {
        for j in 0..n {
            if a[i][j].is_zero() {
                continue;
            }
            for k in 0..m {
                for l in 0..m {
                    out[i * m + k][j * m + l] = &a[i][j] * &b[k][l];
                }
            }
        }
    }
    out
}

pub fn matrix_rank(a: &Matrix) -> Result<usize> {
    let rows: Vec<SparseVec<usize>> = a
        .iter()
        .map(|r| {
            r.iter()
                .enumerate()
                .filter(|(_, x)| !x.is_zero())
                .map(|(j, x)| (j, x.clone()))
                .collect()
        })
        .collect();
    linalg::rank(&rows)
}

impl BraidingMatrix {
    pub fn is_invertible(&self) -> Result<bool> {
        Ok(matrix_rank(&self.entries)? == self.entries.len())
    }

    /// `(Psi (x) 1)(1 (x) Psi)(Psi (x) 1) = (1 (x) Psi)(Psi (x) 1)(1 (x) Psi)`.
    pub fn satisfies_braid_equation(&self) -> bool {
        let id = identity_matrix(self.dim);
        let p12 = kron(&self.entries, &id);
        let p23 = kron(&id, &self.entries);
        mat_mul(&mat_mul(&p12, &p23), &p12) == mat_mul(&mat_mul(&p23, &p12), &p23)
    }

    /// Monic minimal polynomial, coefficients from the constant term up.
    pub fn minimal_polynomial(&self) -> Result<Vec<RatQ>> {
        let n = self.entries.len();
        let flat = |m: &Matrix| -> SparseVec<usize> {
            m.iter()
                .flatten()
                .enumerate()
                .filter(|(_, x)| !x.is_zero())
                .map(|(i, x)| (i, x.clone()))
                .collect()
        };
        let mut ech = Echelon::new();
        let mut p = identity_matrix(n);
        loop {
            if let Some(dep) = ech.express(&flat(&p))? {
                let k = ech.inserted();
                let mut out: Vec<RatQ> = (0..k)
                    .map(|i| -dep.get(&i).cloned().unwrap_or_default())
                    .collect();
                out.push(RatQ::one());
                return Ok(out);
            }
            ech.insert(&flat(&p))?;
            p = mat_mul(&p, &self.entries);
        }
    }

    /// `(Psi - alpha)(Psi + beta) = 0`.
    pub fn satisfies_hecke(&self, alpha: &RatQ, beta: &RatQ) -> bool {
        let n = self.entries.len();
        let id = identity_matrix(n);
        let shift = |c: &RatQ| -> Matrix {
            (0..n)
                .map(|i| (0..n).map(|j| &self.entries[i][j] + &(&id[i][j] * c)).collect())
                .collect()
        };
        mat_mul(&shift(&-alpha), &shift(beta))
            .iter()
            .flatten()
            .all(|x| x.is_zero())
    }

    /// Searches a quadratic minimal polynomial for a root `alpha = +-q^k`,
    /// `|k| <= 4`.
    pub fn hecke(&self) -> Result<Option<Hecke>> {
        let p = self.minimal_polynomial()?;
        if p.len() != 3 {
            return Ok(None);
        }
        for k in -4..=4 {
            for s in [1, -1] {
                let alpha = RatQ::from(LaurentQ::monomial(s, k));
                let beta = &p[1] + &alpha;
                if (-&(&alpha * &beta)) == p[0] {
                    return Ok(Some(Hecke { alpha, beta }));
                }
            }
        }
        Ok(None)
    }
}
