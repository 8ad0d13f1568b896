//! Seeded property suites shared by the command-line `selftest` and the
//! acceptance tests.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::braided::{Braided, B1};
use crate::error::Result;
use crate::qfield::{q_binom, LaurentQ, RatQ};
use crate::rootdata::{empty_sub, gl_leading_block, RootDatum, SubRootDatum, TypeA};
use crate::uq::{Engine, EngineConfig, Mono, Tensor, UElement};

pub const DEFAULT_SEED: u64 = 0x5eed;

/// Outcome of one property suite.
#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub cases: usize,
    pub passed: bool,
    /// First failing case.
    pub witness: Option<String>,
}

impl CheckResult {
    fn new(name: &str) -> Self {
        Self {
            name: name.into(),
            cases: 0,
            passed: true,
            witness: None,
        }
    }

    fn record(&mut self, ok: bool, witness: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok && self.passed {
            self.passed = false;
            self.witness = Some(witness());
        }
    }
}

impl std::fmt::Display for CheckResult {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{:<4} {} ({} cases)",
            if self.passed { "ok" } else { "FAIL" },
            self.name,
            self.cases
        )?;
        if let Some(w) = &self.witness {
            write!(f, ": {w}")?;
        }
        Ok(())
    }
}

fn mono_el(m: &Mono) -> UElement {
    UElement::from_mono(m.clone(), RatQ::one())
}

/// Every product of at most `len` generators `F_i`, `E_i`, `K_i` with at
/// most `max_chi` letters in graded nodes.
pub fn generator_words(eng: &Engine, len: usize, max_chi: usize) -> Result<Vec<(String, UElement)>> {
    let n = eng.rank();
    let mut letters = Vec::new();
    for i in 0..n {
        let chi = eng.chi(&[i as u8]);
        letters.push((format!("F[{}]", i + 1), eng.f(i), chi));
        letters.push((format!("E[{}]", i + 1), eng.e(i), chi));
        let mut mu = vec![0; n];
        mu[i] = 1;
        letters.push((format!("K{mu:?}"), eng.k(&mu), 0));
    }
    let mut layer = vec![("1".to_string(), eng.one(), 0)];
    let mut out = layer.clone();
    for _ in 0..len {
        let mut next = Vec::new();
        for (name, x, c) in &layer {
            for (l, g, d) in &letters {
                if c + d > max_chi {
                    continue;
                }
                let label = if name == "1" { l.clone() } else { format!("{name}*{l}") };
                next.push((label, eng.mul(x, g)?, c + d));
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    Ok(out.into_iter().map(|(s, x, _)| (s, x)).collect())
}

/// Coassociativity, counit and antipode axioms.
pub fn hopf_axioms(eng: &Engine, xs: &[(String, UElement)]) -> Result<CheckResult> {
    let mut r = CheckResult::new("Hopf axioms");
    for (name, x) in xs {
        let d = eng.coproduct(x)?;
        let left = eng.expand_leg(&d, 0, 2, |m| eng.coproduct(&mono_el(m)))?;
        let right = eng.expand_leg(&d, 1, 2, |m| eng.coproduct(&mono_el(m)))?;
        r.record(eng.tensor_equal(&left, &right)?, || format!("coassociativity on {name}"));
        for leg in 0..2 {
            let e = eng.expand_leg(&d, leg, 0, |m| {
                let mut t = Tensor::zero(0);
                t.add_term(Vec::new(), eng.counit_mono(m));
                Ok(t)
            })?;
            r.record(eng.equal(&eng.contract(&e)?, x)?, || {
                format!("counit on leg {leg} of {name}")
            });
        }
        let eps = eng.scalar(eng.counit(x));
        for leg in 0..2 {
            let s = eng.map_leg(&d, leg, |m| eng.antipode(&mono_el(m)))?;
            r.record(eng.equal(&eng.contract(&s)?, &eps)?, || {
                format!("antipode on leg {leg} of {name}")
            });
        }
    }
    Ok(r)
}

/// A random monomial `F_a K_mu E_b` with `|a|, |b| <= len` and a coefficient
/// `+-q^k`.
pub fn random_element(eng: &Engine, rng: &mut ChaCha8Rng, len: usize, borel: bool, terms: usize) -> UElement {
    let n = eng.rank();
    let mut x = UElement::zero();
    for _ in 0..terms {
        let word = |rng: &mut ChaCha8Rng| -> Vec<u8> {
            let l = rng.gen_range(0..=len);
            (0..l).map(|_| rng.gen_range(0..n) as u8).collect()
        };
        let f = word(rng);
        let e = if borel { Vec::new() } else { word(rng) };
        let k = (0..n).map(|_| rng.gen_range(-1..=1)).collect();
        let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
        let c = RatQ::from(LaurentQ::monomial(sign, rng.gen_range(-2..=2)));
        x.add_term(Mono { f, k, e }, c);
    }
    x
}

/// `Delta`, `epsilon` multiplicative and `S` anti-multiplicative on pairs.
pub fn algebra_maps(eng: &Engine, seed: u64, pairs: usize, len: usize) -> Result<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut r = CheckResult::new("Delta, epsilon algebra maps and S anti-algebra map");
    for _ in 0..pairs {
        let x = random_element(eng, &mut rng, len, false, 2);
        let y = random_element(eng, &mut rng, len, false, 2);
        let xy = eng.mul(&x, &y)?;
        let witness = || format!("x = {}, y = {}", eng.format(&x), eng.format(&y));
        let dd = eng.mul_tensor(&eng.coproduct(&x)?, &eng.coproduct(&y)?)?;
        let ok_d = eng.tensor_equal(&eng.coproduct(&xy)?, &dd)?;
        let ok_e = eng.counit(&xy) == &eng.counit(&x) * &eng.counit(&y);
        let ok_s = eng.equal(
            &eng.antipode(&xy)?,
            &eng.mul(&eng.antipode(&y)?, &eng.antipode(&x)?)?,
        )?;
        r.record(ok_d && ok_e && ok_s, witness);
    }
    Ok(r)
}

/// The quantum Serre element for `i != j`; `corrupt` perturbs the middle
/// coefficient.
pub fn serre_element(eng: &Engine, i: usize, j: usize, corrupt: bool) -> Result<UElement> {
    let n = 1 - eng.cartan()[i][j];
    let mut x = UElement::zero();
    for k in 0..=n {
        let mut c = RatQ::from(q_binom(n, k, eng.c(i)));
        if k % 2 == 1 {
            c = -c;
        }
        if corrupt && k == 1 {
            c = &c + &RatQ::one();
        }
        let mut w = vec![i as u8; (n - k) as usize];
        w.push(j as u8);
        w.extend(std::iter::repeat(i as u8).take(k as usize));
        x.add_scaled(&eng.f_word(&w), &c);
    }
    Ok(x)
}

pub fn serre_relations(eng: &Engine, corrupt: bool) -> Result<CheckResult> {
    let mut r = CheckResult::new("Serre relations vanish");
    for i in 0..eng.rank() {
        for j in 0..eng.rank() {
            if i == j {
                continue;
            }
            let x = serre_element(eng, i, j, corrupt)?;
            r.record(eng.is_zero(&x)?, || format!("Serre element ({}, {}) is nonzero", i + 1, j + 1));
        }
    }
    Ok(r)
}

/// Braid equation on all basis triples of `B_1`.
pub fn braid_equation(alg: &Braided, b1: &B1) -> Result<CheckResult> {
    let mut r = CheckResult::new("braid equation on B1^3");
    let eng = alg.engine();
    let v: Vec<&UElement> = b1.basis.vectors.iter().map(|b| &b.value).collect();
    for i in 0..v.len() {
        for j in 0..v.len() {
            for k in 0..v.len() {
                let mut t = Tensor::zero(3);
                for (a, x) in v[i].terms() {
                    for (b, y) in v[j].terms() {
                        for (c, z) in v[k].terms() {
                            t.add_term(vec![a.clone(), b.clone(), c.clone()], &(x * y) * z);
                        }
                    }
                }
                let l = alg.braiding_on(&alg.braiding_on(&alg.braiding_on(&t, 0)?, 1)?, 0)?;
                let rr = alg.braiding_on(&alg.braiding_on(&alg.braiding_on(&t, 1)?, 0)?, 1)?;
                r.record(eng.tensor_equal(&l, &rr)?, || format!("b{} b{} b{}", i + 1, j + 1, k + 1));
            }
        }
    }
    Ok(r)
}

/// Random elements of `B_0 + ... + B_max` as combinations of basis vectors.
fn random_b(alg: &Braided, rng: &mut ChaCha8Rng, bases: &[Vec<UElement>]) -> UElement {
    let _ = alg;
    let deg = rng.gen_range(0..bases.len());
    let mut x = UElement::zero();
    for _ in 0..2 {
        if let Some(b) = bases[deg].choose(rng) {
            let c = RatQ::from(LaurentQ::monomial(rng.gen_range(1..=2), rng.gen_range(-1..=1)));
            x.add_scaled(b, &c);
        }
    }
    x
}

/// `Delta_(bc) = Delta_(b) Delta_(c)` with the braided tensor product.
pub fn braided_multiplicativity(alg: &Braided, b1: &B1, seed: u64, pairs: usize, max_degree: usize) -> Result<CheckResult> {
    let mut r = CheckResult::new("braided coproduct is braided-multiplicative");
    let eng = alg.engine();
    let bases: Vec<Vec<UElement>> = (0..=max_degree)
        .map(|n| {
            Ok(alg
                .compute_Bn(b1, n)?
                .basis
                .vectors
                .into_iter()
                .map(|b| b.value)
                .collect())
        })
        .collect::<Result<_>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..pairs {
        let x = random_b(alg, &mut rng, &bases);
        let y = random_b(alg, &mut rng, &bases);
        let lhs = alg.braided_coproduct(&eng.mul(&x, &y)?)?;
        let rhs = alg.braided_tensor_mul(&alg.braided_coproduct(&x)?, &alg.braided_coproduct(&y)?)?;
        r.record(eng.tensor_equal(&lhs, &rhs)?, || {
            format!("b = {}, c = {}", eng.format(&x), eng.format(&y))
        });
    }
    Ok(r)
}

/// `Upsilon` is multiplicative into the bosonisation and `Upsilon^{-1}` inverts it.
pub fn upsilon_checks(alg: &Braided, seed: u64, elements: usize, len: usize) -> Result<CheckResult> {
    let mut r = CheckResult::new("Upsilon algebra isomorphism");
    let eng = alg.engine();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut prev: Option<UElement> = None;
    for _ in 0..elements {
        let x = random_element(eng, &mut rng, len, true, 2);
        let ux = alg.upsilon(&x)?;
        r.record(eng.equal(&alg.upsilon_inv(&ux)?, &x)?, || {
            format!("Upsilon^-1 Upsilon != id on {}", eng.format(&x))
        });
        if let Some(y) = prev.take() {
            let lhs = alg.upsilon(&eng.mul(&y, &x)?)?;
            let rhs = alg.bosonisation_mul(&alg.upsilon(&y)?, &ux)?;
            r.record(eng.tensor_equal(&lhs, &rhs)?, || {
                format!("Upsilon not multiplicative on {} , {}", eng.format(&y), eng.format(&x))
            });
        }
        prev = Some(x);
    }
    Ok(r)
}

/// Both computations of `B_n` agree for `n <= max`.
pub fn double_computation(alg: &Braided, b1: &B1, max: usize) -> Result<CheckResult> {
    let mut r = CheckResult::new("B_n double computation");
    for n in 0..=max {
        match alg.compute_Bn(b1, n) {
            Ok(bn) => r.record(bn.certificate.agree(), || format!("B_{n}: {:?}", bn.certificate)),
            Err(e) => r.record(false, || format!("B_{n}: {e}")),
        }
    }
    Ok(r)
}

/// The bundled sub-root data, by name.
pub fn bundled() -> Result<Vec<(&'static str, SubRootDatum)>> {
    let sc = |n| RootDatum::type_a(n, TypeA::SimplyConnected);
    Ok(vec![
        ("A2 in A3", gl_leading_block(2, 3)?),
        ("identity A3", SubRootDatum::identity(&sc(3)?)),
        ("empty in A1", empty_sub(&sc(1)?)),
        ("empty in A2", empty_sub(&sc(2)?)),
        ("A1 in A1+A1", SubRootDatum::direct_sum_pair(&sc(1)?, &sc(1)?).0),
        ("A2 in A2+A1", SubRootDatum::direct_sum_pair(&sc(2)?, &sc(1)?).0),
    ])
}

#[derive(Clone, Copy, Debug)]
pub struct SelftestOptions {
    pub seed: u64,
    /// Degree bound for the braided suites; 0 runs degree-zero checks only.
    pub max_degree: usize,
    /// Test hook: use a wrong quantum Serre coefficient.
    pub corrupt_serre: bool,
}

impl Default for SelftestOptions {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            max_degree: 2,
            corrupt_serre: false,
        }
    }
}

/// The embedded property suites at small bounds.
pub fn run(opts: SelftestOptions) -> Result<Vec<CheckResult>> {
    let n = opts.max_degree;
    let len = n.min(2);
    let cfg = EngineConfig {
        max_degree: (n.max(1) + 2).max(4 * len),
        ..EngineConfig::default()
    };
    let s = gl_leading_block(2, 3)?;
    let alg = Braided::new(&s, cfg)?;
    let eng = alg.engine();
    let mut out = vec![serre_relations(eng, opts.corrupt_serre)?];
    let words = generator_words(eng, len, n)?;
    out.push(hopf_axioms(eng, &words)?);
    out.push(algebra_maps(eng, opts.seed, 20, len)?);
    if n == 0 {
        let b1 = alg.compute_B1()?;
        out.push(double_computation(&alg, &b1, 0)?);
        return Ok(out);
    }
    let b1 = alg.compute_B1()?;
    out.push(braid_equation(&alg, &b1)?);
    out.push(upsilon_checks(&alg, opts.seed, 20, len)?);
    out.push(braided_multiplicativity(&alg, &b1, opts.seed, 5, 1)?);
    for (name, s) in bundled()? {
        let a = Braided::new(&s, cfg)?;
        let b = a.compute_B1()?;
        let mut r = double_computation(&a, &b, n.min(3))?;
        r.name = format!("{} ({name})", r.name);
        out.push(r);
    }
    Ok(out)
}
