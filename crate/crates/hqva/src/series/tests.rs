use super::*;

fn t() -> Trunc {
    Trunc::new(6, 12)
}

/// Coefficients of e^{z/2} - e^{-z/2} straight from the exponential series.
fn f_coeffs(n: usize) -> Vec<Q> {
    (0..n)
        .map(|k| if k % 2 == 1 { q(2) * qpow(&qf(1, 2), k as i64) / factorial(k) } else { Q::zero() })
        .collect()
}

#[test]
fn f0_matches_closed_form() {
    let f0 = HSeries::f0(t());
    assert_eq!(f0.coeff(0, 0), q(1));
    assert_eq!(f0.coeff(0, 2), qf(1, 24));
    assert_eq!(f0.coeff(0, 4), qf(1, 1920));
    assert_eq!(f0.coeff(0, 3), q(0));
}

#[test]
fn f_is_z_times_f0_and_odd() {
    let f = HSeries::f(t());
    let fc = f_coeffs(12);
    for (e, c) in fc.iter().enumerate() {
        assert_eq!(&f.coeff(0, e as i64), c);
    }
    let ratio = f.div_s(&HSeries::z(t())).unwrap();
    let (ok, _) = ratio.cert_eq(&HSeries::f0(t()));
    assert!(ok);
    let (ok, _) = f.reflect().cert_eq(&f.neg_s());
    assert!(ok);
}

#[test]
fn invert_f_long_division_oracle() {
    let fc = f_coeffs(14);
    // f = z * u, u_k = fc[k+1]; long division for 1/u.
    let u: Vec<Q> = (0..12).map(|k| fc[k + 1].clone()).collect();
    let mut w = vec![Q::zero(); 10];
    w[0] = Q::one() / &u[0];
    for k in 1..10 {
        let mut s = Q::zero();
        for j in 1..=k {
            s += &u[j] * &w[k - j];
        }
        w[k] = -s / &u[0];
    }
    let inv = HSeries::f(t()).invert().unwrap();
    for (k, wk) in w.iter().enumerate() {
        assert_eq!(&inv.coeff(0, k as i64 - 1), wk, "z^{}", k as i64 - 1);
    }
    assert_eq!(inv.coeff(0, 1), qf(-1, 24));
    assert_eq!(inv.coeff(0, 3), qf(7, 5760));
}

#[test]
fn invert_one_and_f0() {
    let one = HSeries::one(t());
    assert_eq!(one.invert().unwrap(), one);
    let f0 = HSeries::f0(t());
    let (ok, w) = f0.mul_s(&f0.invert().unwrap()).cert_eq(&one);
    assert!(ok);
    assert!(w.z_hi >= 12);
}

#[test]
fn shift_of_z_and_pole() {
    let c = qf(3, 2);
    let s = HSeries::z(t()).shift_z(&c);
    let expect = HSeries::z(t()).add_s(&HSeries::mono(t(), 1, 0, c.clone()));
    assert_eq!(s, expect);
    let zi = HSeries::mono(t(), 0, -1, q(1));
    let s = zi.shift_z(&c);
    for j in 0..=6usize {
        assert_eq!(s.coeff(j, -1 - j as i64), qpow(&-c.clone(), j as i64));
    }
    let back = s.shift_z(&-c);
    assert!(back.cert_eq(&zi).0);
}

#[test]
fn derive_commutes_with_shift() {
    let f = HSeries::f(t()).invert().unwrap();
    let c = q(2);
    assert!(f.shift_z(&c).derive().cert_eq(&f.derive().shift_z(&c)).0);
}

#[test]
fn qnum_values() {
    assert!(QSeries::qnum(&q(0), 7).is_zero());
    assert!(QSeries::qnum(&q(1), 7).cert_eq(&QSeries::one(7)).0);
    // q + 1/q = 2 cosh(hbar)
    let two = QSeries::qnum(&q(2), 7);
    assert_eq!(two.coeff(0), q(2));
    assert_eq!(two.coeff(2), q(1));
    assert_eq!(two.coeff(4), qf(1, 12));
    assert_eq!(two.coeff(6), qf(1, 360));
}

#[test]
fn qbracket_integer_is_shift_sum() {
    let a = HSeries::f(t()).invert().unwrap();
    let op = a.apply_dop(&DOp::qbracket(6, &q(3)));
    let sum = a.shift_z(&q(2)).add_s(&a).add_s(&a.shift_z(&q(-2)));
    let (ok, w) = op.cert_eq(&sum);
    assert!(ok);
    assert!(w.z_hi > 0);
}

#[test]
fn residue_and_split() {
    let zi = HSeries::mono(t(), 0, -1, q(1));
    assert_eq!(zi.residue().coeff(0), q(1));
    assert!(HSeries::f0(t()).residue().is_zero());
    let a = HSeries::f(t()).invert().unwrap().shift_z(&q(1));
    let (s, r) = a.split_sing();
    assert!(s.add_s(&r).cert_eq(&a).0);
    assert!(a.derive().residue().is_zero());
}

#[test]
fn eval_inverse_f_at_two_hbar() {
    let inv = HSeries::f(t()).invert().unwrap();
    let v = inv.eval_at_hbar(&q(2)).unwrap();
    assert_eq!(v.val(), -1);
    let expect = QSeries::f_at(&q(2), 12).inv().unwrap();
    let (ok, cap) = v.cert_eq(&expect);
    assert!(ok);
    assert!(cap >= 5);
    assert!(HSeries::z(t()).eval_at_hbar(&q(0)).unwrap().is_zero());
    assert!(inv.eval_at_hbar(&q(0)).is_err());
}

#[test]
fn pow_gq_literal_vs_operator() {
    let f = HSeries::f(t());
    let g = Exponent::from_pairs([(q(1), q(1)), (q(-1), q(-1))]);
    let lit = f.pow_gq(&g).unwrap();
    let manual = f.shift_z(&q(1)).mul_s(&f.shift_z(&q(-1)).invert().unwrap());
    assert!(lit.cert_eq(&manual).0);
    let op = f.pow_op(&g.to_dop(6)).unwrap();
    let (ok, w) = lit.cert_eq(&op);
    assert!(ok, "{:?}", w);
}

#[test]
fn log_markers() {
    let f = HSeries::f(t());
    let lf = f.log().unwrap();
    assert_eq!(lf.marker, q(1));
    let lf0 = HSeries::f0(t()).log().unwrap();
    assert!(lf.derive().cert_eq(&HSeries::mono(t(), 0, -1, q(1)).add_s(&lf0.derive())).0);
    let g = Exponent::from_pairs([(q(1), q(1)), (q(-1), q(-1))]);
    let lg = lf.apply(&g.to_dop(6));
    assert_eq!(lg.marker, q(0));
    let direct = f.pow_gq(&g).unwrap().log().unwrap();
    assert!(direct.rest.cert_eq(&lg.rest).0);
    assert!(lf.into_series().is_err());
}

#[test]
fn exp_log_sqrt() {
    let zero = HSeries::zero(t());
    assert_eq!(zero.exp().unwrap(), HSeries::one(t()));
    let f0 = HSeries::f0(t());
    let r = f0.sqrt().unwrap();
    assert!(r.mul_s(&r).cert_eq(&f0).0);
    let u = f0.shift_z(&qf(1, 3));
    let back = u.log().unwrap().into_series().unwrap().exp().unwrap();
    assert!(back.cert_eq(&u).0);
}

#[test]
fn region_expansions() {
    let z = HSeries::z(t());
    let e = BiSeries::expand(&z, RegionMode::Diff12, 4).unwrap();
    assert_eq!(e.coeff(0, 1, 0), Some(q(1)));
    assert_eq!(e.coeff(0, 0, 1), Some(q(-1)));
    let zi = HSeries::mono(t(), 0, -1, q(1));
    let e = BiSeries::expand(&zi, RegionMode::Diff12, 3).unwrap();
    for k in 0..=3 {
        assert_eq!(e.coeff(0, -1 - k, k), Some(q(1)));
    }
    assert_eq!(e.coeff(0, -1, 4), None);
    // delta kernel: iota12 - iota21 of 1/(z1-z2) = sum z1^{-k-1} z2^k + sum z2^{-k-1} z1^k
    let e21 = BiSeries::expand(&zi, RegionMode::Diff21, 3).unwrap();
    for k in 0..=3i64 {
        let a = e.coeff(0, -1 - k, k).unwrap();
        let b = e21.coeff(0, -1 - k, k).unwrap();
        assert_eq!(a - b, q(1));
        let a = e.coeff(0, k, -1 - k).unwrap_or_else(Q::zero);
        let b = e21.coeff(0, k, -1 - k).unwrap();
        assert_eq!(a - b, q(1));
    }
}

#[test]
fn json_round_trip() {
    let a = HSeries::f(t()).invert().unwrap().shift_z(&qf(1, 2));
    let j = HSeriesJson::from(&a);
    let txt = serde_json::to_string(&j).unwrap();
    let back: HSeriesJson = serde_json::from_str(&txt).unwrap();
    assert_eq!(back.to_series(a.zcap).unwrap(), a);
    let v = QSeries::qnum(&qf(1, 2), 8);
    assert_eq!(QSeriesJson::from(&v).to_series().unwrap(), v);
}
