use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use qnichols::braided::{kron, mat_mul, Braided, BraidingMatrix, Generator, Matrix, B1};
use qnichols::qfield::{parse_ratq, q_binom};
use qnichols::rootdata::gl_leading_block;
use qnichols::snf;
use qnichols::uq::{Mono, Weight};
use qnichols::{EngineConfig, LaurentQ, RatQ, UElement};

struct Example {
    alg: Braided,
    b1: B1,
    psi: BraidingMatrix,
    table: Vec<(Generator, Matrix)>,
}

fn example() -> &'static Example {
    static EX: OnceLock<Example> = OnceLock::new();
    EX.get_or_init(|| {
        let cfg = EngineConfig {
            max_degree: 8,
            ..EngineConfig::default()
        };
        let alg = Braided::new(&gl_leading_block(2, 3).unwrap(), cfg).unwrap();
        let b1 = alg.compute_B1().unwrap();
        let psi = alg.braiding_matrix(&b1.basis).unwrap();
        let table = alg.action_table(&b1.basis).unwrap();
        Example { alg, b1, psi, table }
    })
}

fn laurent() -> impl Strategy<Value = LaurentQ> {
    prop::collection::vec((-3i32..=3, -4i64..=4), 0..4).prop_map(|ts| {
        ts.into_iter()
            .fold(LaurentQ::zero(), |acc, (e, c)| &acc + &LaurentQ::monomial(c, e))
    })
}

fn ratq() -> impl Strategy<Value = RatQ> {
    (laurent(), laurent()).prop_filter_map("zero denominator", |(n, d)| RatQ::new(n, d).ok())
}

fn mono(borel: bool) -> impl Strategy<Value = Mono> {
    let word = prop::collection::vec(0u8..3, 0..3);
    let e = if borel { Just(Vec::new()).boxed() } else { word.clone().boxed() };
    (word, prop::collection::vec(-1i64..=1, 3), e).prop_map(|(f, k, e)| Mono { f, k, e })
}

fn element(borel: bool) -> impl Strategy<Value = UElement> {
    prop::collection::vec((mono(borel), -2i32..=2, any::<bool>()), 1..3).prop_map(|ts| {
        UElement::from_pairs(ts.into_iter().map(|(m, e, neg)| {
            let c = RatQ::q_pow(e);
            (m, if neg { -c } else { c })
        }))
    })
}

fn coeffs(n: usize) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-3i64..=3, n)
}

fn mat_vec(m: &Matrix, v: &[RatQ]) -> Vec<RatQ> {
    m.iter()
        .map(|row| row.iter().zip(v).fold(RatQ::zero(), |acc, (a, b)| &acc + &(a * b)))
        .collect()
}

fn to_q(v: &[i64]) -> Vec<RatQ> {
    v.iter().map(|&c| RatQ::from(c)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ratq_field_axioms(a in ratq(), b in ratq(), c in ratq()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        if !a.is_zero() {
            prop_assert!((&a * &a.inv().unwrap()).is_one());
        }
    }

    #[test]
    fn ratq_evaluation_is_a_homomorphism(a in ratq(), b in ratq()) {
        let q0 = BigRational::new(BigInt::from(7), BigInt::from(3));
        if let (Ok(x), Ok(y)) = (a.eval(&q0), b.eval(&q0)) {
            prop_assert_eq!((&a * &b).eval(&q0).unwrap(), &x * &y);
            prop_assert_eq!((&a + &b).eval(&q0).unwrap(), &x + &y);
        }
    }

    #[test]
    fn ratq_text_round_trips(a in ratq()) {
        let s = a.to_string();
        let b = parse_ratq(&s).unwrap();
        prop_assert_eq!(&b, &a);
        prop_assert_eq!(b.to_string(), s);
    }

    #[test]
    fn q_pascal(n in 1i64..8, k in 0i64..8, c in 1u32..3) {
        prop_assume!(k <= n);
        let lhs = q_binom(n, k, c);
        let rhs = &q_binom(n - 1, k, c).shift((c as i64 * k) as i32)
            + &q_binom(n - 1, k - 1, c).shift(-(c as i64 * (n - k)) as i32);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn smith_form_is_a_factorization(rows in 1usize..4, cols in 1usize..4, seed in prop::collection::vec(-5i64..=5, 9)) {
        let a: Vec<Vec<i64>> = (0..rows).map(|i| (0..cols).map(|j| seed[i * 3 + j]).collect()).collect();
        let s = snf::smith(&a, rows, cols);
        let d = snf::mat_mul(&snf::mat_mul(&s.u, &a, rows, cols), &s.v, cols, cols);
        for i in 0..rows {
            for j in 0..cols {
                let want = if i == j && i < s.divisors.len() { s.divisors[i] } else { 0 };
                prop_assert_eq!(d[i][j], want);
            }
        }
        for w in s.divisors.windows(2) {
            prop_assert_eq!(w[1] % w[0], 0);
        }
        prop_assert_eq!(snf::mat_mul(&s.u, &s.uinv, rows, rows), snf::identity(rows));
    }

    #[test]
    fn weight_is_additive(x in mono(false), y in mono(false)) {
        let e = example().alg.engine();
        let (x, y) = (UElement::from_mono(x, RatQ::one()), UElement::from_mono(y, RatQ::one()));
        let xy = e.mul(&x, &y).unwrap();
        prop_assume!(!e.is_zero(&xy).unwrap());
        let w = |z: &UElement| match e.weight(z) {
            Weight::Zero => vec![0; 3],
            Weight::Pure(v) => v,
            Weight::Mixed => panic!("monomials have pure weight"),
        };
        let sum: Vec<i64> = w(&x).iter().zip(w(&y)).map(|(a, b)| a + b).collect();
        prop_assert_eq!(w(&xy), sum);
    }

    #[test]
    fn degree_is_additive_on_borel(x in mono(true), y in mono(true)) {
        let alg = &example().alg;
        let e = alg.engine();
        let (x, y) = (UElement::from_mono(x, RatQ::one()), UElement::from_mono(y, RatQ::one()));
        let xy = e.mul(&x, &y).unwrap();
        prop_assume!(!xy.is_empty());
        let (dx, dy) = (alg.degree(&x).unwrap(), alg.degree(&y).unwrap());
        prop_assert_eq!(alg.degree(&xy), Some(dx + dy));
    }

    #[test]
    fn coproduct_is_coassociative(x in element(false)) {
        let e = example().alg.engine();
        let d = e.coproduct(&x).unwrap();
        let delta = |m: &Mono| e.coproduct(&UElement::from_mono(m.clone(), RatQ::one()));
        let left = e.expand_leg(&d, 0, 2, delta).unwrap();
        let right = e.expand_leg(&d, 1, 2, delta).unwrap();
        prop_assert!(e.tensor_equal(&left, &right).unwrap());
    }

    #[test]
    fn expressions_round_trip(x in element(false)) {
        let e = example().alg.engine();
        let s = e.format(&x);
        let y = e.parse(&s).unwrap();
        prop_assert!(e.equal(&x, &y).unwrap());
        prop_assert_eq!(e.format(&y), s);
    }

    #[test]
    fn projection_is_idempotent_onto_coinvariants(x in element(true)) {
        let alg = &example().alg;
        let e = alg.engine();
        let p = alg.Pi(&x).unwrap();
        prop_assert!(alg.is_coinvariant(&p).unwrap());
        prop_assert!(e.equal(&alg.Pi(&p).unwrap(), &p).unwrap());
    }

    #[test]
    fn braiding_is_natural_for_degree_zero_generators(g in 0usize..7, v in coeffs(9)) {
        let ex = example();
        let (gen, m) = &ex.table[g];
        let id: Matrix = (0..3)
            .map(|i| (0..3).map(|j| if i == j { RatQ::one() } else { RatQ::zero() }).collect())
            .collect();
        let diag_inv = |k: &Matrix| -> Matrix {
            (0..3)
                .map(|i| (0..3).map(|j| if i == j { k[i][i].inv().unwrap() } else { RatQ::zero() }).collect())
                .collect()
        };
        let k_of = |i: usize| &ex.table.iter().find(|(h, _)| *h == Generator::K(i)).unwrap().1;
        // Delta(K) = K (x) K, Delta(F) = F (x) H^-1 + 1 (x) F, Delta(E) = E (x) 1 + H (x) E
        let on_pair: Matrix = match gen {
            Generator::K(_) => kron(m, m),
            Generator::F(j) => {
                let a = kron(m, &diag_inv(k_of(*j)));
                let b = kron(&id, m);
                a.iter().zip(&b).map(|(r, s)| r.iter().zip(s).map(|(x, y)| x + y).collect()).collect()
            }
            Generator::E(j) => {
                let a = kron(m, &id);
                let b = kron(k_of(*j), m);
                a.iter().zip(&b).map(|(r, s)| r.iter().zip(s).map(|(x, y)| x + y).collect()).collect()
            }
        };
        let v = to_q(&v);
        let lhs = mat_vec(&ex.psi.entries, &mat_vec(&on_pair, &v));
        let rhs = mat_vec(&on_pair, &mat_vec(&ex.psi.entries, &v));
        prop_assert_eq!(lhs, rhs, "generator {}", gen);
        prop_assert_eq!(
            mat_mul(&ex.psi.entries, &on_pair),
            mat_mul(&on_pair, &ex.psi.entries)
        );
    }

    #[test]
    fn braided_antipode_is_minus_identity_on_b1(v in coeffs(3)) {
        let ex = example();
        let e = ex.alg.engine();
        let mut x = UElement::zero();
        for (c, b) in v.iter().zip(&ex.b1.basis.vectors) {
            x.add_scaled(&b.value, &RatQ::from(*c));
        }
        let s = ex.alg.braided_antipode(&x).unwrap();
        prop_assert!(e.equal(&s, &-&x).unwrap());
    }
}
