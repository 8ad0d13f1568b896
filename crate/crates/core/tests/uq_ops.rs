use qnichols::qfield::{q_binom, LaurentQ, RatQ};
use qnichols::rootdata::{gl_leading_block, RootDatum, SubRootDatum, TypeA};
use qnichols::uq::{Engine, EngineConfig, Tensor, UElement, Weight};

fn engine(n: usize) -> Engine {
    let d = RootDatum::type_a(n, TypeA::GeneralLinear).unwrap();
    Engine::new(&d, EngineConfig::default()).unwrap()
}

fn b2_engine() -> Engine {
    // B2: i.i = 4 for the long root, 2 for the short one
    let d = RootDatum {
        names: vec!["1".into(), "2".into()],
        dot: vec![vec![4, -2], vec![-2, 2]],
        rank_y: 2,
        rank_x: 2,
        pairing: vec![vec![1, 0], vec![0, 1]],
        i1: vec![vec![1, 0], vec![0, 1]],
        i2: vec![vec![2, -2], vec![-1, 2]],
    };
    Engine::new(&d, EngineConfig::default()).unwrap()
}

fn q(e: i32) -> RatQ {
    RatQ::q_pow(e)
}

fn scal(eng: &Engine, c: RatQ) -> UElement {
    eng.scalar(c)
}

fn assert_eq_el(eng: &Engine, x: &UElement, y: &UElement) {
    assert!(
        eng.equal(x, y).unwrap(),
        "\n  left: {}\n right: {}",
        eng.format(x),
        eng.format(y)
    );
}

/// `<mu, i2(i)>` straight from the lattices: `sum_a mu_a <i1(a), i2(i)>`.
fn lattice_pair(d: &RootDatum, mu: &[i64], i: usize) -> i64 {
    let mut y = vec![0; d.rank_y];
    for (a, &m) in mu.iter().enumerate() {
        for (t, v) in y.iter_mut().zip(&d.i1[a]) {
            *t += m * v;
        }
    }
    d.pair(&y, &d.i2[i])
}

#[test]
fn k_moves_past_e_and_f() {
    let eng = engine(3);
    let mu = [2, -1, 3];
    for i in 0..3 {
        let p = lattice_pair(eng.datum(), &mu, i) as i32;
        let ke = eng.mul(&eng.k(&mu), &eng.e(i)).unwrap();
        let ek = eng.mul(&eng.e(i), &eng.k(&mu)).unwrap();
        assert_eq_el(&eng, &ke, &ek.scale(&q(p)));
        let kf = eng.mul(&eng.k(&mu), &eng.f(i)).unwrap();
        let fk = eng.mul(&eng.f(i), &eng.k(&mu)).unwrap();
        assert_eq_el(&eng, &kf, &fk.scale(&q(-p)));
    }
}

#[test]
fn h_moves_past_e_and_f() {
    for eng in [engine(3), b2_engine()] {
        let n = eng.rank();
        for i in 0..n {
            for j in 0..n {
                let ij = eng.datum().dot[i][j] as i32;
                let he = eng.mul(&eng.h(i), &eng.e(j)).unwrap();
                let eh = eng.mul(&eng.e(j), &eng.h(i)).unwrap();
                assert_eq_el(&eng, &he, &eh.scale(&q(ij)));
                let hf = eng.mul(&eng.h(i), &eng.f(j)).unwrap();
                let fh = eng.mul(&eng.f(j), &eng.h(i)).unwrap();
                assert_eq_el(&eng, &hf, &fh.scale(&q(-ij)));
            }
        }
    }
}

#[test]
fn e_f_commutator() {
    for eng in [engine(2), b2_engine()] {
        for i in 0..eng.rank() {
            for j in 0..eng.rank() {
                let c = eng.commutator(&eng.e(i), &eng.f(j)).unwrap();
                if i == j {
                    let diff = &eng.h(i) - &eng.h_inv(i);
                    let inv = RatQ::one().div(&eng.qi_diff(i).into()).unwrap();
                    assert_eq_el(&eng, &c, &diff.scale(&inv));
                } else {
                    assert!(eng.is_zero(&c).unwrap());
                }
            }
        }
    }
}

fn serre(eng: &Engine, i: usize, j: usize, use_e: bool, corrupt: bool) -> UElement {
    let cij = eng.cartan()[i][j];
    let n = 1 - cij;
    let ci = eng.c(i);
    let gen = |k: usize| if use_e { eng.e(k) } else { eng.f(k) };
    let mut acc = UElement::zero();
    for m in 0..=n {
        let mut b = RatQ::from(q_binom(n, m, ci));
        if corrupt && m == 1 {
            b = &b + &RatQ::one();
        }
        let sign = if m % 2 == 0 { RatQ::one() } else { -RatQ::one() };
        let left = eng.pow(&gen(i), (n - m) as u32).unwrap();
        let right = eng.pow(&gen(i), m as u32).unwrap();
        let t = eng.mul_all(&[&left, &gen(j), &right]).unwrap();
        acc.add_scaled(&t, &(&sign * &b));
    }
    acc
}

#[test]
fn serre_relations_vanish() {
    for eng in [engine(3), b2_engine()] {
        for i in 0..eng.rank() {
            for j in 0..eng.rank() {
                if i == j {
                    continue;
                }
                assert!(eng.is_zero(&serre(&eng, i, j, false, false)).unwrap());
                assert!(eng.is_zero(&serre(&eng, i, j, true, false)).unwrap());
                if eng.cartan()[i][j] != 0 {
                    assert!(!eng.is_zero(&serre(&eng, i, j, false, true)).unwrap());
                }
            }
        }
    }
}

#[test]
fn a2_serre_example() {
    let eng = engine(2);
    let x = eng
        .parse("F[1]*F[1]*F[2] - (q + q^-1)*F[1]*F[2]*F[1] + F[2]*F[1]*F[1]")
        .unwrap();
    assert!(eng.is_zero(&x).unwrap());
    assert!(!x.is_empty());
}

#[test]
fn coproduct_examples() {
    let eng = engine(2);
    let mu = [1, -2];
    let dk = eng.coproduct(&eng.k(&mu)).unwrap();
    assert!(eng
        .tensor_equal(&dk, &Tensor::pure(&eng.k(&mu), &eng.k(&mu)))
        .unwrap());
    let d1 = eng.coproduct(&eng.one()).unwrap();
    assert!(eng.tensor_equal(&d1, &Tensor::pure(&eng.one(), &eng.one())).unwrap());
    // Delta(F1 H1) = F1 H1 (x) 1 + H1 (x) F1 H1
    let fh = eng.mul(&eng.f(0), &eng.h(0)).unwrap();
    let expect = &Tensor::pure(&fh, &eng.one()) + &Tensor::pure(&eng.h(0), &fh);
    assert!(eng.tensor_equal(&eng.coproduct(&fh).unwrap(), &expect).unwrap());
}

#[test]
fn coproduct_is_multiplicative_on_generators() {
    let eng = engine(2);
    let gens = [eng.e(0), eng.e(1), eng.f(0), eng.f(1), eng.k(&[1, -1])];
    for x in &gens {
        for y in &gens {
            let xy = eng.mul(x, y).unwrap();
            let lhs = eng.coproduct(&xy).unwrap();
            let rhs = eng
                .mul_tensor(&eng.coproduct(x).unwrap(), &eng.coproduct(y).unwrap())
                .unwrap();
            assert!(eng.tensor_equal(&lhs, &rhs).unwrap());
        }
    }
}

#[test]
fn counit_and_antipode_examples() {
    let eng = engine(3);
    let mu = [1, 0, -2];
    let s = eng.antipode(&eng.k(&mu)).unwrap();
    assert_eq_el(&eng, &s, &eng.k(&[-1, 0, 2]));
    let x = eng.parse("F[1]*F[2]*K[1,0,-2]").unwrap();
    assert!(eng.counit(&x).is_zero());
    assert!(eng.counit(&eng.k(&mu)).is_one());
    for i in 0..3 {
        let s1 = eng.antipode(&eng.f(i)).unwrap();
        let fh = eng.mul(&eng.f(i), &eng.h(i)).unwrap();
        assert_eq_el(&eng, &s1, &-&fh);
        let s2 = eng.antipode(&s1).unwrap();
        // H^-1 F H = q^{i.i} F
        let conj = eng.mul_all(&[&eng.h_inv(i), &eng.f(i), &eng.h(i)]).unwrap();
        assert_eq_el(&eng, &s2, &conj);
        assert_eq_el(&eng, &s2, &eng.f(i).scale(&q(2)));
        let se = eng.antipode(&eng.e(i)).unwrap();
        let he = eng.mul(&eng.h_inv(i), &eng.e(i)).unwrap();
        assert_eq_el(&eng, &se, &-&he);
    }
}

#[test]
fn antipode_is_anti_multiplicative() {
    let eng = b2_engine();
    let xs = [
        eng.parse("E[1]*F[2]*K[1,0]").unwrap(),
        eng.parse("F[1]*E[1]*E[2]").unwrap(),
        eng.parse("F[2]*F[1] - q*E[2]").unwrap(),
    ];
    for x in &xs {
        for y in &xs {
            let lhs = eng.antipode(&eng.mul(x, y).unwrap()).unwrap();
            let rhs = eng
                .mul(&eng.antipode(y).unwrap(), &eng.antipode(x).unwrap())
                .unwrap();
            assert_eq_el(&eng, &lhs, &rhs);
        }
    }
}

#[test]
fn adjoint_examples() {
    let eng = engine(3);
    let mu = [1, 2, -1];
    for i in 0..3 {
        let p = lattice_pair(eng.datum(), &mu, i) as i32;
        let ad = eng.adjoint(&eng.k(&mu), &eng.f(i)).unwrap();
        assert_eq_el(&eng, &ad, &eng.f(i).scale(&q(-p)));
    }
    let a1 = engine(1);
    let fh = a1.mul(&a1.f(0), &a1.h(0)).unwrap();
    let ad = a1.adjoint(&a1.h(0), &fh).unwrap();
    assert_eq_el(&a1, &ad, &fh.scale(&q(-2)));
}

#[test]
fn adjoint_of_f2_on_b1_gives_q_commutator() {
    let eng = engine(3);
    let b1 = eng.parse("F[3]*K[0,0,1]").unwrap();
    let b2 = eng.adjoint(&eng.f(1), &b1).unwrap();
    let expect = eng.parse("(F[2]*F[3] - q*F[3]*F[2])*K[0,1,1]");
    // parentheses around element sums are not part of the grammar
    assert!(expect.is_err());
    let expect = eng
        .parse("F[2]*F[3]*K[0,1,1] - q*F[3]*F[2]*K[0,1,1]")
        .unwrap();
    assert_eq_el(&eng, &b2, &expect);
}

#[test]
fn adjoint_is_an_action_and_counit_compatible() {
    let eng = engine(2);
    let us = [eng.e(0), eng.f(1), eng.k(&[1, 0]), eng.parse("E[2]*F[1]").unwrap()];
    let v = eng.parse("F[1]*F[2]*K[0,1] + q*E[1]").unwrap();
    for u in &us {
        for w in &us {
            let uw = eng.mul(u, w).unwrap();
            let lhs = eng.adjoint(&uw, &v).unwrap();
            let rhs = eng.adjoint(u, &eng.adjoint(w, &v).unwrap()).unwrap();
            assert_eq_el(&eng, &lhs, &rhs);
        }
        let a1 = eng.adjoint(u, &eng.one()).unwrap();
        assert_eq_el(&eng, &a1, &eng.scalar(eng.counit(u)));
    }
}

#[test]
fn weights() {
    let eng = engine(3);
    assert_eq!(eng.weight(&eng.k(&[1, 2, 3])), Weight::Pure(vec![0, 0, 0]));
    let f3k3 = eng.parse("F[3]*K[0,0,1]").unwrap();
    let w = eng.weight(&f3k3);
    assert_eq!(w, Weight::Pure(vec![0, 0, -1]));
    let i2_3: Vec<i64> = eng.datum().i2[2].iter().map(|x| -x).collect();
    assert_eq!(eng.weight_in_x(&[0, 0, -1]), i2_3);
    assert_eq!(
        eng.weight(&eng.parse("F[1]*F[2]").unwrap()),
        Weight::Pure(vec![-1, -1, 0])
    );
    assert_eq!(eng.weight(&eng.parse("F[1] + E[1]").unwrap()), Weight::Mixed);
    assert_eq!(eng.weight(&UElement::zero()), Weight::Zero);
}

#[test]
fn hopf_axioms_on_mixed_words() {
    let eng = engine(2);
    let xs = [
        eng.parse("F[1]*F[2]*K[1,-1]*E[2]").unwrap(),
        eng.parse("F[2]*F[1]*F[1]*E[1]*E[2]").unwrap(),
        eng.parse("K[0,2]*E[1]*E[1]").unwrap(),
    ];
    for x in &xs {
        let d = eng.coproduct(x).unwrap();
        let left = eng.expand_leg(&d, 0, 2, |m| {
            eng.coproduct(&UElement::from_mono(m.clone(), RatQ::one()))
        })
        .unwrap();
        let right = eng.expand_leg(&d, 1, 2, |m| {
            eng.coproduct(&UElement::from_mono(m.clone(), RatQ::one()))
        })
        .unwrap();
        assert!(eng.tensor_equal(&left, &right).unwrap());
        for leg in 0..2 {
            let e = eng
                .expand_leg(&d, leg, 0, |m| {
                    let mut t = Tensor::zero(0);
                    t.add_term(Vec::new(), eng.counit_mono(m));
                    Ok(t)
                })
                .unwrap();
            let back = eng.contract(&e).unwrap();
            assert_eq_el(&eng, &back, x);
        }
        let s = eng
            .map_leg(&d, 0, |m| eng.antipode(&UElement::from_mono(m.clone(), RatQ::one())))
            .unwrap();
        let m = eng.contract(&s).unwrap();
        assert_eq_el(&eng, &m, &scal(&eng, eng.counit(x)));
    }
}

#[test]
fn pairing_examples_and_routes() {
    let eng = engine(2);
    let k1 = eng.k(&[1, 0]);
    let k2 = eng.k(&[0, 1]);
    assert_eq!(eng.pairing(&k1, &k2).unwrap(), q(-1));
    assert!(eng.pairing(&eng.f(0), &eng.f(1)).unwrap().is_zero());
    let ff = eng.pairing(&eng.f(0), &eng.f(0)).unwrap();
    let expect = -RatQ::one().div(&eng.qi_diff(0).into()).unwrap();
    assert_eq!(ff, expect);
    let x = eng.parse("F[1]*F[2]").unwrap();
    let y = eng.parse("F[2]*F[1]").unwrap();
    assert_eq!(eng.pairing(&x, &y).unwrap(), eng.pairing_right(&x, &y).unwrap());
    assert!(eng.pairing(&eng.e(0), &k1).is_err());
    let words = ["F[1]*F[2]*F[1]", "F[1]*F[1]*F[2]*K[1,0]", "F[2]*F[1]*F[1]*K[0,-1]"];
    for a in words {
        for b in words {
            let (x, y) = (eng.parse(a).unwrap(), eng.parse(b).unwrap());
            assert_eq!(eng.pairing(&x, &y).unwrap(), eng.pairing_right(&x, &y).unwrap(), "{a} {b}");
        }
    }
}

#[test]
fn pairing_kills_serre_and_is_nondegenerate() {
    let eng = engine(2);
    let s = serre(&eng, 0, 1, false, false);
    for w in ["F[1]*F[1]*F[2]", "F[1]*F[2]*F[1]", "F[2]*F[1]*F[1]"] {
        let y = eng.parse(w).unwrap();
        assert!(eng.pairing(&s, &y).unwrap().is_zero());
        assert!(eng.pairing(&y, &s).unwrap().is_zero());
    }
    for nu in [vec![1u32, 1], vec![2, 1], vec![2, 2]] {
        let sl = eng.words().slice(&nu).unwrap();
        let els: Vec<UElement> = sl.normal.iter().map(|w| eng.f_word(w)).collect();
        let mut rows = Vec::new();
        for a in &els {
            let mut r = qnichols::linalg::SparseVec::new();
            for (j, b) in els.iter().enumerate() {
                let v = eng.pairing(a, b).unwrap();
                if !v.is_zero() {
                    r.insert(j, v);
                }
            }
            rows.push(r);
        }
        assert_eq!(qnichols::linalg::rank(&rows).unwrap(), sl.dim());
    }
}

#[test]
fn pairing_extension_rules() {
    let eng = engine(2);
    // <x, yz> = <x_(2), y><x_(1), z> and <xy, z> = <x, z_(2)><y, z_(1)>
    let x = eng.parse("F[1]*F[2]*F[1]*K[1,0]").unwrap();
    let y = eng.parse("F[1]*K[0,1]").unwrap();
    let z = eng.parse("F[2]*F[1]*K[-1,0]").unwrap();
    let lhs = eng.pairing(&x, &eng.mul(&y, &z).unwrap()).unwrap();
    let mut rhs = RatQ::zero();
    for (legs, c) in eng.coproduct(&x).unwrap().terms() {
        let a = UElement::from_mono(legs[0].clone(), RatQ::one());
        let b = UElement::from_mono(legs[1].clone(), RatQ::one());
        let t = &eng.pairing(&b, &y).unwrap() * &eng.pairing(&a, &z).unwrap();
        rhs = &rhs + &(&t * c);
    }
    assert_eq!(lhs, rhs);
    let u = eng.parse("F[2]*K[1,1]").unwrap();
    let v = eng.parse("F[1]*F[1]*K[0,-1]").unwrap();
    let w = eng.parse("F[1]*F[2]*F[1]*K[2,0]").unwrap();
    let lhs = eng.pairing(&eng.mul(&u, &v).unwrap(), &w).unwrap();
    let mut rhs = RatQ::zero();
    for (legs, c) in eng.coproduct(&w).unwrap().terms() {
        let a = UElement::from_mono(legs[0].clone(), RatQ::one());
        let b = UElement::from_mono(legs[1].clone(), RatQ::one());
        let t = &eng.pairing(&u, &b).unwrap() * &eng.pairing(&v, &a).unwrap();
        rhs = &rhs + &(&t * c);
    }
    assert_eq!(lhs, rhs);
}

#[test]
fn embedding_respects_relations() {
    let s = gl_leading_block(2, 3).unwrap();
    let big = Engine::new(&s.ambient, EngineConfig::default()).unwrap();
    let small = Engine::new(&s.sub, EngineConfig::default()).unwrap();
    let emb = |x: &UElement| big.embed(&s, x).unwrap();
    for i in 0..2 {
        for j in 0..2 {
            if i != j {
                let r = serre(&small, i, j, false, false);
                assert!(big.is_zero(&emb(&r)).unwrap());
                let r = serre(&small, i, j, true, false);
                assert!(big.is_zero(&emb(&r)).unwrap());
            }
            let c = small.commutator(&small.e(i), &small.f(j)).unwrap();
            let img = emb(&c);
            let direct = big
                .commutator(&emb(&small.e(i)), &emb(&small.f(j)))
                .unwrap();
            assert_eq_el(&big, &img, &direct);
        }
    }
    let mu = [2, -1];
    let x = small.mul(&small.k(&mu), &small.e(1)).unwrap();
    let lhs = emb(&x);
    let rhs = big.mul(&emb(&small.k(&mu)), &emb(&small.e(1))).unwrap();
    assert_eq_el(&big, &lhs, &rhs);
    let d = emb(&small.f(0));
    assert!(big.equal(&d, &big.f(0)).unwrap());
    let _ = SubRootDatum::identity(&s.ambient);
}

#[test]
fn expression_round_trip() {
    let eng = engine(3);
    let srcs = [
        "F[1]*F[3]*K[0,1,-1]",
        "(q + q^-1)*F[1]*F[2]*K[0,1,-1] - 3/2*E[3]",
        "q^-1*F[2]*E[1] + (q^2 - 1)/(q)",
        "-F[1]*E[1]",
        "0",
    ];
    for s in srcs {
        let x = eng.parse(s).unwrap();
        let text = eng.format(&x);
        let y = eng.parse(&text).unwrap();
        assert!(eng.equal(&x, &y).unwrap(), "{s} -> {text}");
        assert_eq!(eng.format(&y), text);
    }
    for bad in ["F[0]", "F[4]", "K[1,2]", "F[1]**F[2]", "(q", "F[1] +", "G[1]"] {
        assert!(eng.parse(bad).is_err(), "{bad}");
    }
}

#[test]
fn bounds_fail_loudly() {
    let d = RootDatum::type_a(1, TypeA::SimplyConnected).unwrap();
    let cfg = EngineConfig {
        max_degree: 3,
        ..EngineConfig::default()
    };
    let eng = Engine::new(&d, cfg).unwrap();
    let f3 = eng.pow(&eng.f(0), 3).unwrap();
    assert!(matches!(
        eng.mul(&f3, &eng.f(0)),
        Err(qnichols::Error::DegreeBound { degree: 4, bound: 3 })
    ));
    let _ = LaurentQ::one();
}
