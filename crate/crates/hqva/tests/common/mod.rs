//! Random inputs and algebraic laws shared by the property tests and the
//! acceptance run.
#![allow(dead_code)]

use hqva::series::{q, qf, Exponent, HSeries, Layer, Q, Trunc, INF};
use hqva::tau::{Comp, TauElement, MINUS, PLUS};
use proptest::prelude::*;

/// hbar order 8, z window [-6, 12].
pub const T: Trunc = Trunc { hbar: 8, zcap: 12 };
pub const ZLO: i64 = -6;

pub fn rat() -> impl Strategy<Value = Q> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| qf(n, d))
}

fn layer(lo_min: i64, max_len: usize) -> impl Strategy<Value = Layer> {
    (lo_min..=2, prop::collection::vec(rat(), 0..=max_len), prop::option::weighted(0.5, 6i64..=12)).prop_map(|(lo, c, p)| {
        let prec = p.map_or(INF, |p| p.max(lo + 1));
        Layer::from_coeffs(lo, c, prec)
    })
}

/// A series with every layer supported in the z window.
pub fn series() -> impl Strategy<Value = HSeries> {
    prop::collection::vec(layer(ZLO, 6), T.hbar + 1).prop_map(|layers| HSeries { zcap: T.zcap, layers })
}

/// `z^v (1 + z c(z)) + hbar (...)`: invertible, with an exact leading layer.
pub fn unit() -> impl Strategy<Value = HSeries> {
    (-2i64..=2, rat().prop_filter("nonzero", |x| *x != q(0)), prop::collection::vec(rat(), 0..=4), series()).prop_map(|(v, lead, tail, rest)| {
        let mut c = vec![lead];
        c.extend(tail);
        let mut s = rest;
        s.layers[0] = Layer::from_coeffs(v, c, INF);
        s
    })
}

/// `g(q)` with integer weights and exponents in `(1/2) Z`.
pub fn exponent() -> impl Strategy<Value = Exponent> {
    prop::collection::vec((-4i64..=4, -1i64..=1), 1..=3).prop_map(|v| Exponent::from_pairs(v.into_iter().map(|(m, a)| (qf(m, 2), q(a)))))
}

pub fn eq(a: &HSeries, b: &HSeries) -> bool {
    a.cert_eq(b).0
}

pub fn ring_laws(a: &HSeries, b: &HSeries, c: &HSeries, u: &HSeries) -> Result<(), String> {
    let checks = [
        ("add assoc", eq(&a.add_s(b).add_s(c), &a.add_s(&b.add_s(c)))),
        ("add comm", eq(&a.add_s(b), &b.add_s(a))),
        ("mul assoc", eq(&a.mul_s(b).mul_s(c), &a.mul_s(&b.mul_s(c)))),
        ("mul comm", eq(&a.mul_s(b), &b.mul_s(a))),
        ("distributive", eq(&a.mul_s(&b.add_s(c)), &a.mul_s(b).add_s(&a.mul_s(c)))),
        ("additive inverse", a.add_s(&a.neg_s()).cert_eq(&HSeries::zero(T)).0),
    ];
    if let Some((name, _)) = checks.iter().find(|(_, ok)| !ok) {
        return Err(name.to_string());
    }
    let inv = u.invert().map_err(|e| e.to_string())?;
    if !eq(&u.mul_s(&inv), &HSeries::one(T)) {
        return Err("unit times inverse".into());
    }
    Ok(())
}

pub fn shift_laws(a: &HSeries, b: &HSeries, c: &Q, c2: &Q) -> Result<(), String> {
    if !eq(&a.mul_s(b).shift_z(c), &a.shift_z(c).mul_s(&b.shift_z(c))) {
        return Err("shift is multiplicative".into());
    }
    if !eq(&a.add_s(b).shift_z(c), &a.shift_z(c).add_s(&b.shift_z(c))) {
        return Err("shift is additive".into());
    }
    if !eq(&a.shift_z(c).shift_z(c2), &a.shift_z(&(c + c2))) {
        return Err("shifts compose".into());
    }
    if !eq(&a.derive().shift_z(c), &a.shift_z(c).derive()) {
        return Err("shift commutes with d/dz".into());
    }
    Ok(())
}

pub fn pow_gq_laws(p: &HSeries, g1: &Exponent, g2: &Exponent) -> Result<(), String> {
    let pw = |s: &HSeries, g: &Exponent| s.pow_gq(g).map_err(|e| e.to_string());
    if !eq(&pw(p, g1)?.mul_s(&pw(p, g2)?), &pw(p, &g1.add(g2))?) {
        return Err("group law".into());
    }
    if !eq(&pw(&pw(p, g1)?, g2)?, &pw(p, &g1.mul(g2))?) {
        return Err("composition law".into());
    }
    if !eq(&pw(p, g1)?.reflect(), &pw(&p.reflect(), &g1.invert_q())?) {
        return Err("reflection law".into());
    }
    if !eq(&pw(p, &Exponent::constant(q(1)))?, p) {
        return Err("P^1 = P".into());
    }
    Ok(())
}

/// A random member of the deformation group: symmetric additive parts and
/// multiplicative parts that are units at hbar = 0.
pub fn tau_member(rank: usize) -> impl Strategy<Value = TauElement> {
    let n = rank * rank * Comp::ALL.len();
    (prop::collection::vec(series(), n), prop::collection::vec(unit_series0(), n)).prop_map(move |(adds, units)| {
        let mut el = TauElement::identity(rank, T);
        let (mut k, mut ku) = (0, 0);
        let next = |v: &Vec<HSeries>, c: &mut usize| {
            *c += 1;
            v[*c - 1].clone()
        };
        for i in 0..rank {
            for j in i..rank {
                let s = next(&adds, &mut k);
                let s = if i == j { s.add_s(&s.reflect()) } else { s };
                el.at_mut(i, j).tau = s.clone();
                el.at_mut(j, i).tau = s.reflect();
                for e in [PLUS, MINUS] {
                    let o = next(&adds, &mut k);
                    el.at_mut(i, j).one[e] = o.clone();
                    el.at_mut(j, i).two[e] = o.reflect().neg_s();
                    if i != j {
                        let o2 = next(&adds, &mut k);
                        el.at_mut(j, i).one[e] = o2.clone();
                        el.at_mut(i, j).two[e] = o2.reflect().neg_s();
                    }
                }
                for e in [PLUS, MINUS] {
                    for e2 in [PLUS, MINUS] {
                        if i == j && e2 < e {
                            continue;
                        }
                        let u = next(&units, &mut ku);
                        let v = if i == j && e == e2 { u.mul_s(&u.reflect()) } else { u };
                        el.at_mut(i, j).eps[e][e2] = v.clone();
                        el.at_mut(j, i).eps[e2][e] = v.reflect();
                    }
                }
            }
        }
        el
    })
}

/// Unit of Q[[z]] at hbar = 0 with exact layers.
fn unit_series0() -> impl Strategy<Value = HSeries> {
    (rat().prop_filter("nonzero", |x| *x != q(0)), prop::collection::vec(rat(), 0..=3), prop::collection::vec(rat(), 0..=3)).prop_map(|(c0, tail, h1)| {
        let mut c = vec![c0];
        c.extend(tail);
        let mut s = HSeries::zero(T);
        s.layers[0] = Layer::from_coeffs(0, c, INF);
        s.layers[1] = Layer::from_coeffs(-1, h1, INF);
        s
    })
}

pub fn group_laws(a: &TauElement, b: &TauElement, c: &TauElement) -> Result<(), String> {
    for (name, x) in [("a", a), ("b", b), ("c", c)] {
        x.is_member().map_err(|e| format!("{name} not a member: {e}"))?;
    }
    let id = TauElement::identity(a.rank, T);
    if !a.mul(b).mul(c).cert_eq(&a.mul(&b.mul(c))).0 {
        return Err("associativity".into());
    }
    if !a.mul(b).cert_eq(&b.mul(a)).0 {
        return Err("commutativity".into());
    }
    if !a.mul(&id).cert_eq(a).0 {
        return Err("identity".into());
    }
    let ai = a.inv().map_err(|e| e.to_string())?;
    if !a.mul(&ai).cert_eq(&id).0 {
        return Err("inverse".into());
    }
    a.mul(b).is_member().map_err(|e| format!("closure: {e}"))?;
    ai.is_member().map_err(|e| format!("inverse closure: {e}"))?;
    Ok(())
}
