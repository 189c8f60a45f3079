//! Generator-level tensor calculus: translated generator symbols, the braiding
//! tables `S_{l,l'}(z)`, the coproduct on generators and the checks that close
//! on this span.

use crate::par;
use crate::report::{Entry, Status};
use crate::series::{q, BiSeries, DOp, HSeries, Q, Region, RegionMode, SeriesError, Trunc, Window};
use crate::tau::{self, sign_of, CartanDatum, TauElement, MINUS, PLUS};
use num_traits::Zero;
use std::collections::{BTreeMap, HashMap};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GenError {
    #[error("no table row for {0}")]
    Closure(String),
    #[error("slot level does not split: {0}")]
    Split(String),
    #[error("argument {0} is not available for this coefficient ring")]
    Arg(String),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

pub type Result<T> = std::result::Result<T, GenError>;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Kind {
    Vac,
    H(usize),
    Xp(usize),
    Xm(usize),
    /// `E_l(h_i)` with its own level `l`.
    E(usize, Q),
}

/// `e^{c hbar d}` applied to a generator.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Gen {
    pub kind: Kind,
    pub c: Q,
}

impl Gen {
    pub fn new(kind: Kind) -> Self {
        Gen { kind, c: Q::zero() }
    }

    pub fn vac() -> Self {
        Gen::new(Kind::Vac)
    }

    pub fn h(i: usize) -> Self {
        Gen::new(Kind::H(i))
    }

    pub fn x(e: usize, i: usize) -> Self {
        Gen::new(if e == PLUS { Kind::Xp(i) } else { Kind::Xm(i) })
    }

    pub fn e(i: usize, l: Q) -> Self {
        Gen::new(Kind::E(i, l))
    }

    /// Translate; the vacuum absorbs translations.
    pub fn shifted(&self, c: &Q) -> Gen {
        if self.kind == Kind::Vac {
            return self.clone();
        }
        Gen { kind: self.kind.clone(), c: &self.c + c }
    }

    pub fn is_vac(&self) -> bool {
        self.kind == Kind::Vac
    }

    pub fn label(&self) -> String {
        let base = match &self.kind {
            Kind::Vac => "1".to_string(),
            Kind::H(i) => format!("h{i}"),
            Kind::Xp(i) => format!("x+{i}"),
            Kind::Xm(i) => format!("x-{i}"),
            Kind::E(i, l) => format!("E[{l}](h{i})"),
        };
        if self.c.is_zero() {
            base
        } else {
            format!("q^({})d {base}", self.c)
        }
    }
}

/// `c1 z1 + c2 z2 + hb hbar`; single-variable contexts use `c2 = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arg {
    pub c1: i64,
    pub c2: i64,
    pub hb: Q,
}

impl Arg {
    pub fn z() -> Self {
        Arg { c1: 1, c2: 0, hb: Q::zero() }
    }

    pub fn neg_z() -> Self {
        Arg { c1: -1, c2: 0, hb: Q::zero() }
    }

    pub fn z1() -> Self {
        Arg::z()
    }

    pub fn z2() -> Self {
        Arg { c1: 0, c2: 1, hb: Q::zero() }
    }

    pub fn z12() -> Self {
        Arg { c1: 1, c2: 1, hb: Q::zero() }
    }

    pub fn plus_hbar(&self, c: &Q) -> Arg {
        Arg { c1: self.c1, c2: self.c2, hb: &self.hb + c }
    }
}

/// Coefficient ring of a linear combination.
pub trait Coef: Clone + Send + Sync {
    fn add(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn scale(&self, s: &Q) -> Self;
    fn cert_eq(&self, o: &Self) -> (bool, Window);
    fn is_zero_cert(&self) -> bool;
    fn classical(&self) -> Self;
}

impl Coef for HSeries {
    fn add(&self, o: &Self) -> Self {
        self.add_s(o)
    }
    fn mul(&self, o: &Self) -> Self {
        self.mul_s(o)
    }
    fn neg(&self) -> Self {
        self.neg_s()
    }
    fn scale(&self, s: &Q) -> Self {
        HSeries::scale(self, s)
    }
    fn cert_eq(&self, o: &Self) -> (bool, Window) {
        HSeries::cert_eq(self, o)
    }
    fn is_zero_cert(&self) -> bool {
        HSeries::is_zero_cert(self)
    }
    fn classical(&self) -> Self {
        HSeries::classical(self)
    }
}

impl Coef for BiSeries {
    fn add(&self, o: &Self) -> Self {
        BiSeries::add(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        BiSeries::mul(self, o)
    }
    fn neg(&self) -> Self {
        BiSeries::neg(self)
    }
    fn scale(&self, s: &Q) -> Self {
        BiSeries::scale(self, s)
    }
    fn cert_eq(&self, o: &Self) -> (bool, Window) {
        let (ok, w, _) = BiSeries::cert_eq(self, o);
        (ok, w)
    }
    fn is_zero_cert(&self) -> bool {
        BiSeries::is_zero_cert(self)
    }
    fn classical(&self) -> Self {
        BiSeries::classical(self)
    }
}

/// Turns a one-variable scalar and an argument into a coefficient.
pub trait Evaluator: Sync {
    type C: Coef;
    fn one(&self) -> Self::C;
    fn eval(&self, s: &HSeries, arg: &Arg) -> Result<Self::C>;
}

/// Coefficients in `Q((z))[[hbar]]`; arguments `+-z + c hbar`.
pub struct ZEval {
    pub t: Trunc,
}

impl Evaluator for ZEval {
    type C = HSeries;
    fn one(&self) -> HSeries {
        HSeries::one(self.t)
    }
    fn eval(&self, s: &HSeries, arg: &Arg) -> Result<HSeries> {
        let sh = if arg.hb.is_zero() { s.clone() } else { s.shift_z(&arg.hb) };
        match (arg.c1, arg.c2) {
            (1, 0) => Ok(sh),
            (-1, 0) => Ok(sh.reflect()),
            _ => Err(GenError::Arg(format!("{arg:?}"))),
        }
    }
}

/// Coefficients expanded in `|z1| > |z2|`; arguments `z1`, `z2`, `z1 + z2` plus `c hbar`.
pub struct BiEval {
    pub t: Trunc,
    pub wcap: usize,
}

impl Evaluator for BiEval {
    type C = BiSeries;
    fn one(&self) -> BiSeries {
        BiSeries::one(Region::I12, self.t.hbar, self.t.zcap)
    }
    fn eval(&self, s: &HSeries, arg: &Arg) -> Result<BiSeries> {
        let sh = if arg.hb.is_zero() { s.clone() } else { s.shift_z(&arg.hb) };
        match (arg.c1, arg.c2) {
            (1, 0) => Ok(BiSeries::from_primary(Region::I12, &sh)),
            (0, 1) => Ok(BiSeries::from_secondary(Region::I12, &sh)),
            (1, 1) => Ok(BiSeries::expand(&sh, RegionMode::Sum12, self.wcap)?),
            _ => Err(GenError::Arg(format!("{arg:?}"))),
        }
    }
}

/// Finite combination of tensor words sharing one slot-level signature.
#[derive(Clone, Debug)]
pub struct LinComb<C> {
    pub levels: Vec<Q>,
    pub terms: BTreeMap<Vec<Gen>, C>,
}

impl<C: Coef> LinComb<C> {
    pub fn new(levels: Vec<Q>) -> Self {
        LinComb { levels, terms: BTreeMap::new() }
    }

    pub fn single(levels: Vec<Q>, word: Vec<Gen>, c: C) -> Self {
        let mut x = LinComb::new(levels);
        x.push(word, c);
        x
    }

    pub fn push(&mut self, word: Vec<Gen>, c: C) {
        assert_eq!(word.len(), self.levels.len(), "word length differs from level signature");
        match self.terms.get_mut(&word) {
            Some(v) => *v = v.add(&c),
            None => {
                self.terms.insert(word, c);
            }
        }
    }

    pub fn add(&self, o: &LinComb<C>) -> LinComb<C> {
        assert_eq!(self.levels, o.levels, "mismatched level signatures");
        let mut out = self.clone();
        for (w, c) in &o.terms {
            out.push(w.clone(), c.clone());
        }
        out
    }

    pub fn scale_by(&self, s: &C) -> LinComb<C> {
        LinComb { levels: self.levels.clone(), terms: self.terms.iter().map(|(w, c)| (w.clone(), c.mul(s))).collect() }
    }

    /// Exact equality term by term, absent words counting as zero.
    pub fn cert_eq(&self, o: &LinComb<C>) -> (bool, Window) {
        if self.levels != o.levels {
            return (false, Window::full());
        }
        let mut ok = true;
        let mut w = Window::full();
        for (word, c) in &self.terms {
            match o.terms.get(word) {
                Some(d) => {
                    let (e, win) = c.cert_eq(d);
                    ok &= e;
                    w = w.merge(win);
                }
                None => ok &= c.is_zero_cert(),
            }
        }
        for (word, d) in &o.terms {
            if !self.terms.contains_key(word) {
                ok &= d.is_zero_cert();
            }
        }
        (ok, w)
    }

    /// Swap two slots (with their levels).
    pub fn flip(&self, a: usize, b: usize) -> LinComb<C> {
        let mut levels = self.levels.clone();
        levels.swap(a, b);
        let mut out = LinComb::new(levels);
        for (w, c) in &self.terms {
            let mut w = w.clone();
            w.swap(a, b);
            out.push(w, c.clone());
        }
        out
    }

    pub fn words(&self) -> impl Iterator<Item = &Vec<Gen>> {
        self.terms.keys()
    }
}

/// Scalars of one ordered level pair. Index `[j * n + i]` is the pair `(g_j, g_i)`
/// with `g_j` in the first slot.
#[derive(Clone, Debug)]
pub struct PairTable {
    pub n: usize,
    pub hh: Vec<HSeries>,
    pub xh: [Vec<HSeries>; 2],
    pub hx: [Vec<HSeries>; 2],
    pub xx: [[Vec<HSeries>; 2]; 2],
}

impl PairTable {
    /// Tables induced by a pair of deformation elements: `lam12` acts from the
    /// second slot on the first, `lam21` the other way.
    pub fn from_elements(lam12: &TauElement, lam21: &TauElement) -> Result<PairTable> {
        let n = lam12.rank;
        let mut hh = Vec::with_capacity(n * n);
        let mut xh: [Vec<HSeries>; 2] = [Vec::new(), Vec::new()];
        let mut hx: [Vec<HSeries>; 2] = [Vec::new(), Vec::new()];
        let mut xx: [[Vec<HSeries>; 2]; 2] = [[Vec::new(), Vec::new()], [Vec::new(), Vec::new()]];
        for j in 0..n {
            for i in 0..n {
                let a = lam12.at(i, j);
                let b = lam21.at(j, i);
                hh.push(a.tau.reflect().sub_s(&b.tau));
                for e in [PLUS, MINUS] {
                    let s = q(sign_of(e));
                    xh[e].push(b.two[e].add_s(&a.one[e].reflect()).scale(&s));
                    hx[e].push(b.one[e].add_s(&a.two[e].reflect()).scale(&-s.clone()));
                    for e2 in [PLUS, MINUS] {
                        xx[e][e2].push(b.eps[e2][e].div_s(&a.eps[e][e2].reflect())?);
                    }
                }
            }
        }
        Ok(PairTable { n, hh, xh, hx, xx })
    }

    fn at(&self, j: usize, i: usize) -> usize {
        j * self.n + i
    }
}

/// Braiding tables for a set of levels.
#[derive(Clone, Debug)]
pub struct Tables {
    pub d: CartanDatum,
    pub t: Trunc,
    pairs: HashMap<(Q, Q), PairTable>,
}

/// One table-lookup outcome: output words for the two slots with scalars.
enum Out {
    /// `u (x) v` times a scalar plus lower terms.
    Diag(Option<HSeries>, Vec<(Gen, Gen, HSeries)>),
}

impl Tables {
    /// `S_{l,l}` from the level element on both sides, `S_{l,l'}` (l != l') from the
    /// cross-level element on one side. `corrupt` perturbs every level element.
    pub fn build(d: &CartanDatum, levels: &[Q], t: Trunc, corrupt: Option<u64>) -> Result<Tables> {
        let mut lv: Vec<Q> = levels.to_vec();
        lv.sort();
        lv.dedup();
        let keys: Vec<(Q, Q)> = lv.iter().flat_map(|a| lv.iter().map(move |b| (a.clone(), b.clone()))).collect();
        let built = par::map(&keys, |(a, b)| -> Result<PairTable> {
            if a == b {
                let mut el = tau::wh_ell(d, a, t)?;
                if let Some(seed) = corrupt {
                    el.corrupt(seed);
                }
                PairTable::from_elements(&el, &el)
            } else {
                let el = tau::wh_pair(d, a, b, t)?;
                PairTable::from_elements(&el, &TauElement::identity(d.rank(), t))
            }
        });
        let mut pairs = HashMap::new();
        for (k, v) in keys.into_iter().zip(built) {
            pairs.insert(k, v?);
        }
        Ok(Tables { d: d.clone(), t, pairs })
    }

    /// `S_{l,l}` from the cross-level element at `l' = l`.
    pub fn equal_level_via_pair(d: &CartanDatum, l: &Q, t: Trunc) -> Result<PairTable> {
        let el = tau::wh_pair(d, l, l, t)?;
        PairTable::from_elements(&el, &TauElement::identity(d.rank(), t))
    }

    pub fn pair(&self, a: &Q, b: &Q) -> Result<&PairTable> {
        self.pairs.get(&(a.clone(), b.clone())).ok_or_else(|| GenError::Closure(format!("levels ({a}, {b})")))
    }

    fn r(&self) -> Q {
        q(self.d.r)
    }

    /// `-q^{-r l d} 2 hbar f0(2 hbar d)` with `d` acting on slot 1, as an operator in `z`.
    fn e_left(&self, l: &Q, s: &HSeries) -> HSeries {
        tau::two_hbar_f0(&s.shift_z(&-(self.r() * l))).neg_s()
    }

    /// Same operator carried by slot 2, where `d` becomes `-d/dz`.
    fn e_right(&self, l: &Q, s: &HSeries) -> HSeries {
        tau::two_hbar_f0(&s.shift_z(&(self.r() * l))).neg_s()
    }

    /// `S_{la,lb}(z)(u (x) v)` for untranslated `u`, `v`.
    fn lookup(&self, la: &Q, lb: &Q, u: &Kind, v: &Kind) -> Result<Out> {
        use Kind::*;
        let p = self.pair(la, lb)?;
        let chk = |l: &Q, slot: &Q| -> Result<()> {
            if l != slot {
                Err(GenError::Closure(format!("E of level {l} in a slot of level {slot}")))
            } else {
                Ok(())
            }
        };
        let vac = Gen::vac;
        let xe = |k: &Kind| match k {
            Xp(i) => Some((PLUS, *i)),
            Xm(i) => Some((MINUS, *i)),
            _ => None,
        };
        Ok(match (u, v) {
            (Vac, _) | (_, Vac) => Out::Diag(None, vec![]),
            (H(j), H(i)) => Out::Diag(None, vec![(vac(), vac(), p.hh[p.at(*j, *i)].clone())]),
            (H(j), E(i, l)) => {
                chk(l, lb)?;
                let k = self.e_right(l, &p.hh[p.at(*j, *i)]);
                Out::Diag(None, vec![(vac(), Gen::e(*i, l.clone()), k)])
            }
            (E(j, l), H(i)) => {
                chk(l, la)?;
                let k = self.e_left(l, &p.hh[p.at(*j, *i)]);
                Out::Diag(None, vec![(Gen::e(*j, l.clone()), vac(), k)])
            }
            (E(j, l1), E(i, l2)) => {
                chk(l1, la)?;
                chk(l2, lb)?;
                let k = self.e_left(l1, &self.e_right(l2, &p.hh[p.at(*j, *i)]));
                Out::Diag(Some(k.exp()?), vec![])
            }
            (H(j), x) if xe(x).is_some() => {
                let (e, i) = xe(x).unwrap();
                Out::Diag(None, vec![(vac(), Gen::x(e, i), p.hx[e][p.at(*j, i)].clone())])
            }
            (x, H(i)) if xe(x).is_some() => {
                let (e, j) = xe(x).unwrap();
                Out::Diag(None, vec![(Gen::x(e, j), vac(), p.xh[e][p.at(j, *i)].clone())])
            }
            (E(j, l), x) if xe(x).is_some() => {
                chk(l, la)?;
                let (e, i) = xe(x).unwrap();
                Out::Diag(Some(self.e_left(l, &p.hx[e][p.at(*j, i)]).exp()?), vec![])
            }
            (x, E(i, l)) if xe(x).is_some() => {
                chk(l, lb)?;
                let (e, j) = xe(x).unwrap();
                Out::Diag(Some(self.e_right(l, &p.xh[e][p.at(j, *i)]).exp()?), vec![])
            }
            (x, y) => {
                let (e1, j) = xe(x).ok_or_else(|| GenError::Closure(format!("{x:?}")))?;
                let (e2, i) = xe(y).ok_or_else(|| GenError::Closure(format!("{y:?}")))?;
                Out::Diag(Some(p.xx[e1][e2][p.at(j, i)].clone()), vec![])
            }
        })
    }

    /// Apply `S^{ab}_{l_a,l_b}(arg)`.
    pub fn s_apply<E: Evaluator>(&self, ev: &E, x: &LinComb<E::C>, a: usize, b: usize, arg: &Arg) -> Result<LinComb<E::C>> {
        let (la, lb) = (&x.levels[a], &x.levels[b]);
        let mut out = LinComb::new(x.levels.clone());
        for (w, c) in &x.terms {
            let (u, v) = (&w[a], &w[b]);
            let shifted = arg.plus_hbar(&(&u.c - &v.c));
            let Out::Diag(diag, lower) = self.lookup(la, lb, &u.kind, &v.kind)?;
            let c0 = match diag {
                Some(s) => c.mul(&ev.eval(&s, &shifted)?),
                None => c.clone(),
            };
            out.push(w.clone(), c0);
            for (nu, nv, s) in lower {
                assert!(nu.is_vac() || nv.is_vac(), "correction must lower the non-vacuum count");
                let mut nw = w.clone();
                nw[a] = nu.shifted(&u.c);
                nw[b] = nv.shifted(&v.c);
                out.push(nw, c.mul(&ev.eval(&s, &shifted)?));
            }
        }
        Ok(out)
    }

    /// `S^{ab}(arg)^{-1}` by back-substitution over the non-vacuum grading.
    pub fn s_apply_inv(&self, ev: &ZEval, x: &LinComb<HSeries>, a: usize, b: usize, arg: &Arg) -> Result<LinComb<HSeries>> {
        let (la, lb) = (&x.levels[a], &x.levels[b]);
        let mut out = LinComb::new(x.levels.clone());
        for (w, c) in &x.terms {
            let (u, v) = (&w[a], &w[b]);
            let shifted = arg.plus_hbar(&(&u.c - &v.c));
            let Out::Diag(diag, lower) = self.lookup(la, lb, &u.kind, &v.kind)?;
            let ginv = match diag {
                Some(s) => ev.eval(&s, &shifted)?.invert()?,
                None => HSeries::one(self.t),
            };
            let c0 = c.mul_s(&ginv);
            out.push(w.clone(), c0.clone());
            for (nu, nv, s) in lower {
                let mut nw = w.clone();
                nw[a] = nu.shifted(&u.c);
                nw[b] = nv.shifted(&v.c);
                // lower words are fixed by S, so their preimage is themselves
                let Out::Diag(d2, l2) = self.lookup(la, lb, &nw[a].kind, &nw[b].kind)?;
                assert!(d2.is_none() && l2.is_empty(), "lower word not fixed");
                out.push(nw, c0.mul_s(&ev.eval(&s, &shifted)?).neg_s());
            }
        }
        Ok(out)
    }

    /// Replace slot `s` (level `la + lb`) by `Delta(u)` in levels `(la, lb)`.
    pub fn delta_apply<C: Coef>(&self, x: &LinComb<C>, s: usize, la: &Q, lb: &Q) -> Result<LinComb<C>> {
        let lvl = &x.levels[s];
        if &(la + lb) != lvl {
            return Err(GenError::Split(format!("{lvl} != {la} + {lb}")));
        }
        let mut levels = x.levels.clone();
        levels[s] = la.clone();
        levels.insert(s + 1, lb.clone());
        let mut out = LinComb::new(levels);
        let r = self.r();
        for (w, c) in &x.terms {
            let g = &w[s];
            let mut put = |p: Gen, q2: Gen| {
                let mut nw = w.clone();
                nw[s] = p;
                nw.insert(s + 1, q2);
                out.push(nw, c.clone());
            };
            match &g.kind {
                Kind::Vac => put(Gen::vac(), Gen::vac()),
                Kind::H(i) => {
                    put(Gen::h(*i).shifted(&(&g.c - &r * lb)), Gen::vac());
                    put(Gen::vac(), Gen::h(*i).shifted(&(&g.c + &r * la)));
                }
                Kind::Xp(i) => {
                    put(Gen::x(PLUS, *i).shifted(&g.c), Gen::vac());
                    let t = &g.c + q(2) * &r * la;
                    put(Gen::e(*i, la.clone()).shifted(&t), Gen::x(PLUS, *i).shifted(&t));
                }
                Kind::Xm(i) => {
                    put(Gen::x(MINUS, *i).shifted(&g.c), Gen::vac());
                    put(Gen::vac(), Gen::x(MINUS, *i).shifted(&g.c));
                }
                Kind::E(..) => return Err(GenError::Closure("coproduct of E".into())),
            }
        }
        Ok(out)
    }
}

/// Drop positive hbar orders, translations and `E -> 1`.
pub fn classical_limit(x: &LinComb<HSeries>) -> LinComb<HSeries> {
    let mut out = LinComb::new(x.levels.clone());
    for (w, c) in &x.terms {
        let nw = w
            .iter()
            .map(|g| match g.kind {
                Kind::E(..) => Gen::vac(),
                _ => Gen::new(g.kind.clone()),
            })
            .collect();
        out.push(nw, c.classical());
    }
    out.terms.retain(|_, c| !c.is_zero_cert());
    out
}

/// `h_i`, `x_i^+-` for every index.
pub fn generators(n: usize) -> Vec<Gen> {
    (0..n).flat_map(|i| [Gen::h(i), Gen::x(PLUS, i), Gen::x(MINUS, i)]).collect()
}

/// Generators plus the vacuum and `E_l(h_i)`.
pub fn span_symbols(n: usize, l: &Q) -> Vec<Gen> {
    let mut v = vec![Gen::vac()];
    v.extend(generators(n));
    v.extend((0..n).map(|i| Gen::e(i, l.clone())));
    v
}

fn lv_label(ls: &[Q]) -> String {
    ls.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn fail(suite: &str, case: String, e: impl std::fmt::Display) -> Entry {
    Entry::new(suite, case, Status::Fail).with_detail(e.to_string())
}

/// `sigma S_{l,l'}(-z)^{-1} sigma = S_{l',l}(z)` on every pair from the span.
pub fn check_unitarity(tb: &Tables, l: &Q, lp: &Q) -> Vec<Entry> {
    const SUITE: &str = "unitarity";
    let n = tb.d.rank();
    let ev = ZEval { t: tb.t };
    let mut cases = Vec::new();
    for v in span_symbols(n, lp) {
        for u in span_symbols(n, l) {
            cases.push((v.clone(), u));
        }
    }
    let mut out = par::map(&cases, |(v, u)| {
        let case = format!("{};l={l},l'={lp};{}|{}", tb.d.label(), v.label(), u.label());
        let run = || -> Result<(bool, Window)> {
            let one = HSeries::one(tb.t);
            let x = LinComb::single(vec![l.clone(), lp.clone()], vec![u.clone(), v.clone()], one.clone());
            let lhs = tb.s_apply_inv(&ev, &x, 0, 1, &Arg::neg_z())?.flip(0, 1);
            let y = LinComb::single(vec![lp.clone(), l.clone()], vec![v.clone(), u.clone()], one);
            let rhs = tb.s_apply(&ev, &y, 0, 1, &Arg::z())?;
            Ok(lhs.cert_eq(&rhs))
        };
        match run() {
            Ok((ok, w)) => Entry::compared(SUITE, case, ok, w, 0),
            Err(e) => fail(SUITE, case, e),
        }
    });
    if l == lp {
        out.extend(check_equal_level(tb, l));
    }
    out
}

/// `S_{l,l}` from the level element agrees with the cross-level tables at `l' = l`.
pub fn check_equal_level(tb: &Tables, l: &Q) -> Vec<Entry> {
    const SUITE: &str = "unitarity";
    let case = format!("{};l={l};equal-level-tables", tb.d.label());
    let run = || -> Result<(bool, Window)> {
        let a = tb.pair(l, l)?;
        let b = Tables::equal_level_via_pair(&tb.d, l, tb.t)?;
        let mut ok = true;
        let mut w = Window::full();
        let mut cmp = |x: &[HSeries], y: &[HSeries]| {
            for (p, r) in x.iter().zip(y) {
                let (e, win) = p.cert_eq(r);
                ok &= e;
                w = w.merge(win);
            }
        };
        cmp(&a.hh, &b.hh);
        for e in [PLUS, MINUS] {
            cmp(&a.xh[e], &b.xh[e]);
            cmp(&a.hx[e], &b.hx[e]);
            for e2 in [PLUS, MINUS] {
                cmp(&a.xx[e][e2], &b.xx[e][e2]);
            }
        }
        Ok((ok, w))
    };
    vec![match run() {
        Ok((ok, w)) => Entry::compared(SUITE, case, ok, w, 0),
        Err(e) => fail(SUITE, case, e),
    }]
}

/// Both orderings of the three-slot braiding on every generator triple.
pub fn check_qyb(tb: &Tables, ls: [&Q; 3], wcap: usize) -> Vec<Entry> {
    const SUITE: &str = "qyb";
    let n = tb.d.rank();
    let ev = BiEval { t: tb.t, wcap };
    let gens = generators(n);
    let mut cases = Vec::new();
    for a in &gens {
        for b in &gens {
            for c in &gens {
                cases.push(vec![a.clone(), b.clone(), c.clone()]);
            }
        }
    }
    let levels: Vec<Q> = ls.iter().map(|x| (*x).clone()).collect();
    par::map(&cases, |w| {
        let case = format!(
            "{};l={};{}|{}|{}",
            tb.d.label(),
            lv_label(&levels),
            w[0].label(),
            w[1].label(),
            w[2].label()
        );
        let run = || -> Result<(bool, Window)> {
            let x = LinComb::single(levels.clone(), w.clone(), ev.one());
            let l1 = tb.s_apply(&ev, &x, 1, 2, &Arg::z2())?;
            let l2 = tb.s_apply(&ev, &l1, 0, 2, &Arg::z12())?;
            let lhs = tb.s_apply(&ev, &l2, 0, 1, &Arg::z1())?;
            let r1 = tb.s_apply(&ev, &x, 0, 1, &Arg::z1())?;
            let r2 = tb.s_apply(&ev, &r1, 0, 2, &Arg::z12())?;
            let rhs = tb.s_apply(&ev, &r2, 1, 2, &Arg::z2())?;
            Ok(lhs.cert_eq(&rhs))
        };
        match run() {
            Ok((ok, w)) => Entry::compared(SUITE, case, ok, w, 0),
            Err(e) => fail(SUITE, case, e),
        }
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// `S_{{l,l'},l''}(Delta (x) 1) = (Delta (x) 1) S_{l+l',l''}` and its mirror.
pub fn check_intertwine(tb: &Tables, side: Side, ls: [&Q; 3]) -> Vec<Entry> {
    const SUITE: &str = "intertwine";
    let n = tb.d.rank();
    let ev = ZEval { t: tb.t };
    let gens = generators(n);
    let cases: Vec<(Gen, Gen)> = gens.iter().flat_map(|a| gens.iter().map(move |b| (a.clone(), b.clone()))).collect();
    let [l, lp, lpp] = ls;
    par::map(&cases, |(g, gp)| {
        let tag = if side == Side::Left { "left" } else { "right" };
        let case = format!("{};l={l},{lp},{lpp};{tag};{}|{}", tb.d.label(), g.label(), gp.label());
        let one = HSeries::one(tb.t);
        let run = || -> Result<(bool, Window)> {
            match side {
                Side::Left => {
                    let x = LinComb::single(vec![l + lp, lpp.clone()], vec![g.clone(), gp.clone()], one.clone());
                    let dx = tb.delta_apply(&x, 0, l, lp)?;
                    let lhs = tb.s_apply(&ev, &tb.s_apply(&ev, &dx, 0, 2, &Arg::z())?, 1, 2, &Arg::z())?;
                    let rhs = tb.delta_apply(&tb.s_apply(&ev, &x, 0, 1, &Arg::z())?, 0, l, lp)?;
                    Ok(lhs.cert_eq(&rhs))
                }
                Side::Right => {
                    let x = LinComb::single(vec![l.clone(), lp + lpp], vec![g.clone(), gp.clone()], one.clone());
                    let dx = tb.delta_apply(&x, 1, lp, lpp)?;
                    let lhs = tb.s_apply(&ev, &tb.s_apply(&ev, &dx, 0, 2, &Arg::z())?, 0, 1, &Arg::z())?;
                    let rhs = tb.delta_apply(&tb.s_apply(&ev, &x, 0, 1, &Arg::z())?, 1, lp, lpp)?;
                    Ok(lhs.cert_eq(&rhs))
                }
            }
        };
        match run() {
            Ok((ok, w)) => Entry::compared(SUITE, case, ok, w, 0),
            Err(e) => fail(SUITE, case, e),
        }
    })
}

/// `S_Delta(z) = S^{23}_{l',l} S^{13}_{l,l} S^{24}_{l',l'} S^{14}_{l,l'}` on `Delta(g) (x) Delta(g')`.
pub fn s_delta(tb: &Tables, l: &Q, lp: &Q, g: &Gen, gp: &Gen) -> Result<LinComb<HSeries>> {
    let ev = ZEval { t: tb.t };
    let big = l + lp;
    let x = LinComb::single(vec![big.clone(), big], vec![g.clone(), gp.clone()], HSeries::one(tb.t));
    let x = tb.delta_apply(&tb.delta_apply(&x, 1, l, lp)?, 0, l, lp)?;
    let x = tb.s_apply(&ev, &x, 0, 3, &Arg::z())?;
    let x = tb.s_apply(&ev, &x, 1, 3, &Arg::z())?;
    let x = tb.s_apply(&ev, &x, 0, 2, &Arg::z())?;
    tb.s_apply(&ev, &x, 1, 2, &Arg::z())
}

/// Closed forms of `S_Delta` on coproducts of generators at total level `L = l + l'`.
/// The h-h scalar is `d^2 log f^{[b][rL]^2 (q - q^-1)}`, the value forced by the
/// equal-level tables at level `L`.
pub fn s_delta_closed(tb: &Tables, l: &Q, lp: &Q, g: &Gen, gp: &Gen) -> Result<LinComb<HSeries>> {
    let t = tb.t;
    let n = t.hbar;
    let big = l + lp;
    let rl = q(tb.d.r) * &big;
    let one = HSeries::one(t);
    let lv = vec![big.clone(), big.clone()];
    let base = LinComb::single(lv.clone(), vec![g.clone(), gp.clone()], one.clone());
    let dd = |x: &LinComb<HSeries>| -> Result<LinComb<HSeries>> { tb.delta_apply(&tb.delta_apply(x, 1, l, lp)?, 0, l, lp) };
    let qdiff_l = DOp::shift(n, &rl).sub(&DOp::shift(n, &-rl.clone()));
    let vac = Gen::vac;
    let out = match (&g.kind, &gp.kind) {
        (Kind::H(j), Kind::H(i)) => {
            let b = q(tb.d.b(*i, *j));
            let g = DOp::qbracket(n, &b).mul(&DOp::qbracket(n, &rl)).mul(&DOp::qbracket(n, &rl)).mul(&DOp::twohf0_d(n));
            let s = tau::dlog_f_pow(t, &g, 2);
            let mut x = dd(&base)?;
            x.push(vec![vac(), vac(), vac(), vac()], s);
            x
        }
        (Kind::H(j), Kind::Xp(i) | Kind::Xm(i)) => {
            let e = if matches!(gp.kind, Kind::Xp(_)) { PLUS } else { MINUS };
            let b = q(tb.d.b(*j, *i));
            let s = tau::dlog_f_pow(t, &DOp::qbracket(n, &b).mul(&qdiff_l), 1).scale(&q(-sign_of(e)));
            let corr = LinComb::single(lv.clone(), vec![vac(), gp.clone()], s);
            dd(&base)?.add(&dd(&corr)?)
        }
        (Kind::Xp(j) | Kind::Xm(j), Kind::H(i)) => {
            let e = if matches!(g.kind, Kind::Xp(_)) { PLUS } else { MINUS };
            let b = q(tb.d.b(*i, *j));
            let s = tau::dlog_f_pow(t, &DOp::qbracket(n, &b).mul(&qdiff_l), 1).scale(&q(sign_of(e)));
            let corr = LinComb::single(lv.clone(), vec![g.clone(), vac()], s);
            dd(&base)?.add(&dd(&corr)?)
        }
        (Kind::Xp(j) | Kind::Xm(j), Kind::Xp(i) | Kind::Xm(i)) => {
            let e1 = if matches!(g.kind, Kind::Xp(_)) { 1 } else { -1 };
            let e2 = if matches!(gp.kind, Kind::Xp(_)) { 1 } else { -1 };
            let m = q(e1 * e2 * tb.d.b(*i, *j));
            let num = tau::f_pow(t, &DOp::shift(n, &-m.clone()))?;
            let den = tau::f_pow(t, &DOp::shift(n, &m))?;
            dd(&base)?.scale_by(&num.div_s(&den)?)
        }
        _ => dd(&base)?,
    };
    Ok(out)
}

/// `S_Delta(Delta (x) Delta)` against the closed forms and against `(Delta (x) Delta) S_{L,L}`.
pub fn check_s_on_coproduct(tb: &Tables, l: &Q, lp: &Q) -> Vec<Entry> {
    const SUITE: &str = "s-delta";
    let n = tb.d.rank();
    let ev = ZEval { t: tb.t };
    let mut gens = vec![Gen::vac()];
    gens.extend(generators(n));
    let cases: Vec<(Gen, Gen)> = gens.iter().flat_map(|a| gens.iter().map(move |b| (a.clone(), b.clone()))).collect();
    par::flat_map(&cases, |(g, gp)| {
        let case = |k: &str| format!("{};l={l},l'={lp};{}|{};{k}", tb.d.label(), g.label(), gp.label());
        let lhs = match s_delta(tb, l, lp, g, gp) {
            Ok(x) => x,
            Err(e) => return vec![fail(SUITE, case("closed-form"), e)],
        };
        let mut out = Vec::new();
        match s_delta_closed(tb, l, lp, g, gp) {
            Ok(c) => {
                let (ok, w) = lhs.cert_eq(&c);
                out.push(Entry::compared(SUITE, case("closed-form"), ok, w, 0));
            }
            Err(e) => out.push(fail(SUITE, case("closed-form"), e)),
        }
        let big = l + lp;
        let via = || -> Result<LinComb<HSeries>> {
            let x = LinComb::single(vec![big.clone(), big.clone()], vec![g.clone(), gp.clone()], HSeries::one(tb.t));
            let s = tb.s_apply(&ev, &x, 0, 1, &Arg::z())?;
            tb.delta_apply(&tb.delta_apply(&s, 1, l, lp)?, 0, l, lp)
        };
        match via() {
            Ok(r) => {
                let (ok, w) = lhs.cert_eq(&r);
                out.push(Entry::compared(SUITE, case("via-S-total"), ok, w, 0));
            }
            Err(e) => out.push(fail(SUITE, case("via-S-total"), e)),
        }
        out
    })
}

/// Classical limits: `S -> id` on all generator pairs, `Delta -> g (x) 1 + 1 (x) g`.
pub fn check_classical(tb: &Tables, l: &Q, lp: &Q) -> Vec<Entry> {
    const SUITE: &str = "classical-limit";
    let n = tb.d.rank();
    let ev = ZEval { t: tb.t };
    let one = HSeries::one(tb.t);
    let mut out = Vec::new();
    let gens = generators(n);
    for g in &gens {
        for gp in &gens {
            let case = format!("{};l={l},l'={lp};S;{}|{}", tb.d.label(), g.label(), gp.label());
            let x = LinComb::single(vec![l.clone(), lp.clone()], vec![g.clone(), gp.clone()], one.clone());
            out.push(match tb.s_apply(&ev, &x, 0, 1, &Arg::z()) {
                Ok(s) => {
                    let (ok, w) = classical_limit(&s).cert_eq(&classical_limit(&x));
                    Entry::compared(SUITE, case, ok, w, 0)
                }
                Err(e) => fail(SUITE, case, e),
            });
        }
    }
    let mut with_vac = vec![Gen::vac()];
    with_vac.extend(gens);
    for g in &with_vac {
        let case = format!("{};l={l},l'={lp};Delta;{}", tb.d.label(), g.label());
        let x = LinComb::single(vec![l + lp], vec![g.clone()], one.clone());
        let mut expect = LinComb::new(vec![l.clone(), lp.clone()]);
        if g.is_vac() {
            expect.push(vec![Gen::vac(), Gen::vac()], one.clone());
        } else {
            expect.push(vec![g.clone(), Gen::vac()], one.clone());
            expect.push(vec![Gen::vac(), g.clone()], one.clone());
        }
        out.push(match tb.delta_apply(&x, 0, l, lp) {
            Ok(dx) => {
                let (ok, w) = classical_limit(&dx).cert_eq(&expect);
                Entry::compared(SUITE, case, ok, w, 0)
            }
            Err(e) => fail(SUITE, case, e),
        });
    }
    out
}
