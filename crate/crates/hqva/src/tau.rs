//! Cartan data and the commutative group of deformation tuples.

use crate::report::{Entry, Status};
use crate::series::{DOp, Exponent, HSeries, Q, SeriesError, Trunc, Window};
use crate::series::{q, qf};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CartanError {
    #[error("matrix is not square")]
    NotSquare,
    #[error("empty index set")]
    Empty,
    #[error("a_{0}{0} = {1}, expected 2")]
    Diagonal(usize, i64),
    #[error("a_{0}{1} = {2} is positive off the diagonal")]
    Positive(usize, usize, i64),
    #[error("a_{0}{1} and a_{1}{0} disagree on vanishing")]
    ZeroPattern(usize, usize),
    #[error("matrix is not symmetrizable")]
    NotSymmetrizable,
    #[error("r must be positive")]
    BadR,
}

/// Generalized Cartan matrix with its symmetrizer `r_i` and the global integer `r`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CartanDatum {
    pub a: Vec<Vec<i64>>,
    pub ri: Vec<i64>,
    pub r: i64,
}

impl CartanDatum {
    #[allow(clippy::needless_range_loop)]
    pub fn new(a: Vec<Vec<i64>>, r: i64) -> Result<Self, CartanError> {
        let n = a.len();
        if n == 0 {
            return Err(CartanError::Empty);
        }
        if a.iter().any(|row| row.len() != n) {
            return Err(CartanError::NotSquare);
        }
        if r <= 0 {
            return Err(CartanError::BadR);
        }
        for i in 0..n {
            if a[i][i] != 2 {
                return Err(CartanError::Diagonal(i, a[i][i]));
            }
            for j in 0..n {
                if i != j && a[i][j] > 0 {
                    return Err(CartanError::Positive(i, j, a[i][j]));
                }
                if (a[i][j] == 0) != (a[j][i] == 0) {
                    return Err(CartanError::ZeroPattern(i, j));
                }
            }
        }
        // r_i a_ij = r_j a_ji, solved per connected component.
        let mut rq: Vec<Option<Q>> = vec![None; n];
        for start in 0..n {
            if rq[start].is_some() {
                continue;
            }
            let mut comp = vec![start];
            rq[start] = Some(Q::one());
            let mut k = 0;
            while k < comp.len() {
                let i = comp[k];
                k += 1;
                for j in 0..n {
                    if i == j || a[i][j] == 0 {
                        continue;
                    }
                    let want = rq[i].clone().unwrap() * q(a[i][j]) / q(a[j][i]);
                    match &rq[j] {
                        None => {
                            rq[j] = Some(want);
                            comp.push(j);
                        }
                        Some(v) if *v != want => return Err(CartanError::NotSymmetrizable),
                        _ => {}
                    }
                }
            }
            let lcm = comp.iter().fold(num_bigint::BigInt::one(), |l, &i| l.lcm(rq[i].as_ref().unwrap().denom()));
            let ints: Vec<num_bigint::BigInt> =
                comp.iter().map(|&i| (rq[i].clone().unwrap() * Q::from_integer(lcm.clone())).to_integer()).collect();
            let g = ints.iter().fold(num_bigint::BigInt::zero(), |g, x| g.gcd(x));
            for (&i, x) in comp.iter().zip(&ints) {
                rq[i] = Some(Q::from_integer(x / &g));
            }
        }
        let ri: Vec<i64> = rq
            .into_iter()
            .map(|x| i64::try_from(x.unwrap().to_integer()).map_err(|_| CartanError::NotSymmetrizable))
            .collect::<Result<_, _>>()?;
        if ri.iter().any(|x| !x.is_positive()) {
            return Err(CartanError::NotSymmetrizable);
        }
        Ok(CartanDatum { a, ri, r })
    }

    pub fn a1() -> Self {
        CartanDatum::new(vec![vec![2]], 1).unwrap()
    }

    pub fn a2() -> Self {
        CartanDatum::new(vec![vec![2, -1], vec![-1, 2]], 1).unwrap()
    }

    /// The rank-2 matrix with symmetrizer (1, 2).
    pub fn sym12() -> Self {
        CartanDatum::new(vec![vec![2, -2], vec![-1, 2]], 1).unwrap()
    }

    pub fn g2t() -> Self {
        CartanDatum::new(vec![vec![2, -3], vec![-1, 2]], 1).unwrap()
    }

    pub fn a1xa1() -> Self {
        CartanDatum::new(vec![vec![2, 0], vec![0, 2]], 1).unwrap()
    }

    pub fn rank(&self) -> usize {
        self.a.len()
    }

    /// `r_i a_ij`, symmetric in (i, j).
    pub fn b(&self, i: usize, j: usize) -> i64 {
        self.ri[i] * self.a[i][j]
    }

    pub fn label(&self) -> String {
        let rows: Vec<String> =
            self.a.iter().map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")).collect();
        format!("A=[{}];r={}", rows.join(";"), self.r)
    }

    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let n = self.rank();
        (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect()
    }
}

/// Sign index: `0` for `+`, `1` for `-`.
pub const PLUS: usize = 0;
pub const MINUS: usize = 1;

pub fn sign_of(e: usize) -> i64 {
    if e == PLUS {
        1
    } else {
        -1
    }
}

pub fn sign_char(e: usize) -> char {
    if e == PLUS {
        '+'
    } else {
        '-'
    }
}

/// Components of one (i, j) slot.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairComps {
    pub tau: HSeries,
    pub one: [HSeries; 2],
    pub two: [HSeries; 2],
    pub eps: [[HSeries; 2]; 2],
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Comp {
    Tau,
    One(usize),
    Two(usize),
    Eps(usize, usize),
}

impl Comp {
    pub const ALL: [Comp; 9] = [
        Comp::Tau,
        Comp::One(PLUS),
        Comp::One(MINUS),
        Comp::Two(PLUS),
        Comp::Two(MINUS),
        Comp::Eps(PLUS, PLUS),
        Comp::Eps(PLUS, MINUS),
        Comp::Eps(MINUS, PLUS),
        Comp::Eps(MINUS, MINUS),
    ];

    pub fn name(&self) -> String {
        match self {
            Comp::Tau => "tau".into(),
            Comp::One(e) => format!("1{}", sign_char(*e)),
            Comp::Two(e) => format!("2{}", sign_char(*e)),
            Comp::Eps(a, b) => format!("{}{}", sign_char(*a), sign_char(*b)),
        }
    }

    pub fn is_multiplicative(&self) -> bool {
        matches!(self, Comp::Eps(..))
    }
}

impl PairComps {
    pub fn get(&self, c: Comp) -> &HSeries {
        match c {
            Comp::Tau => &self.tau,
            Comp::One(e) => &self.one[e],
            Comp::Two(e) => &self.two[e],
            Comp::Eps(a, b) => &self.eps[a][b],
        }
    }

    pub fn get_mut(&mut self, c: Comp) -> &mut HSeries {
        match c {
            Comp::Tau => &mut self.tau,
            Comp::One(e) => &mut self.one[e],
            Comp::Two(e) => &mut self.two[e],
            Comp::Eps(a, b) => &mut self.eps[a][b],
        }
    }
}

/// Element of the deformation group: additive components and multiplicative `eps` components.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TauElement {
    pub rank: usize,
    pub t: Trunc,
    pub comps: Vec<PairComps>,
}

impl TauElement {
    pub fn at(&self, i: usize, j: usize) -> &PairComps {
        &self.comps[i * self.rank + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut PairComps {
        &mut self.comps[i * self.rank + j]
    }

    pub fn identity(rank: usize, t: Trunc) -> Self {
        let z = HSeries::zero(t);
        let o = HSeries::one(t);
        let pc = PairComps {
            tau: z.clone(),
            one: [z.clone(), z.clone()],
            two: [z.clone(), z],
            eps: [[o.clone(), o.clone()], [o.clone(), o]],
        };
        TauElement { rank, t, comps: vec![pc; rank * rank] }
    }

    fn zip(&self, o: &TauElement, add: impl Fn(&HSeries, &HSeries) -> HSeries, mul: impl Fn(&HSeries, &HSeries) -> HSeries) -> TauElement {
        assert_eq!(self.rank, o.rank, "mismatched Cartan data");
        let comps = self
            .comps
            .iter()
            .zip(&o.comps)
            .map(|(a, b)| PairComps {
                tau: add(&a.tau, &b.tau),
                one: [add(&a.one[0], &b.one[0]), add(&a.one[1], &b.one[1])],
                two: [add(&a.two[0], &b.two[0]), add(&a.two[1], &b.two[1])],
                eps: [
                    [mul(&a.eps[0][0], &b.eps[0][0]), mul(&a.eps[0][1], &b.eps[0][1])],
                    [mul(&a.eps[1][0], &b.eps[1][0]), mul(&a.eps[1][1], &b.eps[1][1])],
                ],
            })
            .collect();
        TauElement { rank: self.rank, t: self.t, comps }
    }

    pub fn mul(&self, o: &TauElement) -> TauElement {
        self.zip(o, |a, b| a.add_s(b), |a, b| a.mul_s(b))
    }

    pub fn inv(&self) -> Result<TauElement, SeriesError> {
        let mut out = self.clone();
        for pc in &mut out.comps {
            for c in Comp::ALL {
                let s = pc.get(c);
                let v = if c.is_multiplicative() { s.invert()? } else { s.neg_s() };
                *pc.get_mut(c) = v;
            }
        }
        Ok(out)
    }

    /// Exact equality on certified coefficients, with the merged window.
    pub fn cert_eq(&self, o: &TauElement) -> (bool, Window) {
        let mut ok = true;
        let mut w = Window::full();
        for (a, b) in self.comps.iter().zip(&o.comps) {
            for c in Comp::ALL {
                let (e, win) = a.get(c).cert_eq(b.get(c));
                ok &= e;
                w = w.merge(win);
            }
        }
        (ok, w)
    }

    /// Membership conditions at hbar = 0; `Err` names the first violated one.
    pub fn is_member(&self) -> Result<(), String> {
        let n = self.rank;
        for i in 0..n {
            for j in 0..n {
                let a = self.at(i, j);
                let b = self.at(j, i);
                let chk = |x: &HSeries, y: &HSeries, what: String| -> Result<(), String> {
                    let (ok, _) = x.classical().cert_eq(&y.classical());
                    if ok {
                        Ok(())
                    } else {
                        Err(what)
                    }
                };
                chk(&a.tau, &b.tau.reflect(), format!("tau_{i}{j}(z) vs tau_{j}{i}(-z)"))?;
                for e in [PLUS, MINUS] {
                    chk(&a.one[e], &b.two[e].reflect().neg_s(), format!("tau^1_{i}{j} vs -tau^2_{j}{i}(-z)"))?;
                    for e2 in [PLUS, MINUS] {
                        let x = &a.eps[e][e2];
                        chk(x, &b.eps[e2][e].reflect(), format!("tau^{e}{e2}_{i}{j} symmetry"))?;
                        let l0 = &x.layers[0];
                        if l0.is_empty() || l0.lo != 0 {
                            return Err(format!("tau^{e}{e2}_{i}{j} is not a unit in Q[[z]] at hbar = 0"));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Deterministic perturbation of one component, used as a negative control.
    pub fn corrupt(&mut self, seed: u64) -> String {
        let n = self.rank;
        let slots = n * n * Comp::ALL.len();
        let pick = (seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) >> 17) as usize % slots;
        let (slot, ci) = (pick / Comp::ALL.len(), pick % Comp::ALL.len());
        let c = Comp::ALL[ci];
        let (i, j) = (slot / n, slot % n);
        let k = 1 + (seed as usize % self.t.hbar.max(1));
        let bump = HSeries::mono(self.t, k, -1 + (seed % 3) as i64, qf(1 + (seed % 5) as i64, 7));
        let one = HSeries::one(self.t);
        let target = self.at_mut(i, j).get_mut(c);
        *target = if c.is_multiplicative() {
            target.mul_s(&one.add_s(&bump))
        } else {
            target.add_s(&bump)
        };
        format!("component {} of ({i},{j}) perturbed at hbar^{k}", c.name())
    }
}

/// `log f` as a marker plus series.
fn log_f(t: Trunc) -> crate::series::LogSeries {
    HSeries::f(t).log().expect("f = z f0 with f0(0) = 1")
}

fn qbr(t: Trunc, c: &Q) -> DOp {
    DOp::qbracket(t.hbar, c)
}

fn shift(t: Trunc, c: &Q) -> DOp {
    DOp::shift(t.hbar, c)
}

/// `q - q^{-1}` as an operator.
fn qdiff(t: Trunc) -> DOp {
    DOp::twohf0_d(t.hbar)
}

fn z_pow(t: Trunc, e: i64, x: Q) -> HSeries {
    HSeries::mono(t, 0, e, x)
}

/// `d^k/dz^k log f^{G}` for an operator exponent `G`.
pub fn dlog_f_pow(t: Trunc, g: &DOp, k: usize) -> HSeries {
    let lg = log_f(t).apply(g);
    if k == 0 {
        return lg.into_series().expect("exponent vanishes at q = 1");
    }
    lg.derive().derive_n(k - 1)
}

/// `f^{G}`.
pub fn f_pow(t: Trunc, g: &DOp) -> Result<HSeries, SeriesError> {
    HSeries::f(t).pow_op(g)
}

/// `f^{g(q)}` by the literal product of shifted integer powers.
pub fn f_pow_literal(t: Trunc, g: &Exponent) -> Result<HSeries, SeriesError> {
    HSeries::f(t).pow_gq(g)
}

/// `q^{c d/dz}` on a series: translation by `c hbar`.
pub fn translate(a: &HSeries, c: &Q) -> HSeries {
    a.shift_z(c)
}

/// The level element built from the five displayed families.
pub fn wh_ell(d: &CartanDatum, l: &Q, t: Trunc) -> Result<TauElement, SeriesError> {
    let n = d.rank();
    let rl = q(d.r) * l;
    let mut el = TauElement::identity(n, t);
    for i in 0..n {
        for j in 0..n {
            let bij = q(d.b(i, j));
            let tau_op = qbr(t, &bij).mul(&qbr(t, &rl)).mul(&shift(t, &rl)).neg();
            let tau = dlog_f_pow(t, &tau_op, 2).add_s(&z_pow(t, -2, -(&bij * &rl)));
            let one_op = qbr(t, &bij).mul(&shift(t, &rl));
            let one = dlog_f_pow(t, &one_op, 1).add_s(&z_pow(t, -1, -bij.clone()));
            let same = if i == j {
                let g = shift(t, &q(-d.b(i, i))).sub(&DOp::identity(t.hbar));
                f_pow(t, &g)?
            } else {
                z_pow(t, -1, Q::one()).mul_s(&f_pow(t, &shift(t, &-bij.clone()))?)
            };
            let (pm, mp) = if i == j {
                let zi = z_pow(t, -1, Q::one());
                let up = HSeries::z(t).add_s(&HSeries::mono(t, 1, 0, q(2) * &rl));
                let dn = HSeries::z(t).add_s(&HSeries::mono(t, 1, 0, q(-2) * &rl));
                let g = shift(t, &bij).sub(&shift(t, &-bij.clone()));
                (zi.mul_s(&up), zi.mul_s(&dn).mul_s(&f_pow(t, &g)?))
            } else {
                let g = shift(t, &bij).sub(&shift(t, &-bij.clone()));
                (HSeries::one(t), f_pow(t, &g)?)
            };
            let pc = el.at_mut(i, j);
            pc.tau = tau;
            pc.one = [one.clone(), one];
            pc.eps = [[same.clone(), pm], [mp, same]];
        }
    }
    for i in 0..n {
        for j in 0..n {
            let two = el.at(j, i).one.clone();
            el.at_mut(i, j).two = two;
        }
    }
    Ok(el)
}

/// The cross-level element.
pub fn wh_pair(d: &CartanDatum, l: &Q, lp: &Q, t: Trunc) -> Result<TauElement, SeriesError> {
    let n = d.rank();
    let rl = q(d.r) * l;
    let rlp = q(d.r) * lp;
    let mut el = TauElement::identity(n, t);
    for i in 0..n {
        for j in 0..n {
            let bij = q(d.b(i, j));
            let bji = q(d.b(j, i));
            let tau_op = qbr(t, &bij).mul(&qbr(t, &rl)).mul(&qbr(t, &rlp)).mul(&qdiff(t)).neg();
            let tau = dlog_f_pow(t, &tau_op, 2);
            let one = dlog_f_pow(t, &qbr(t, &bij).mul(&qbr(t, &rlp)).mul(&qdiff(t)), 1);
            let two = dlog_f_pow(t, &qbr(t, &bji).mul(&qbr(t, &rl)).mul(&qdiff(t)), 1);
            let mut eps = [[HSeries::one(t), HSeries::one(t)], [HSeries::one(t), HSeries::one(t)]];
            for e1 in [PLUS, MINUS] {
                for e2 in [PLUS, MINUS] {
                    let s = q(sign_of(e1) * sign_of(e2)) * &bij;
                    let g = shift(t, &-s.clone()).sub(&shift(t, &s));
                    eps[e1][e2] = f_pow(t, &g)?;
                }
            }
            let pc = el.at_mut(i, j);
            pc.tau = tau;
            pc.one = [one.clone(), one];
            pc.two = [two.clone(), two];
            pc.eps = eps;
        }
    }
    Ok(el)
}

/// `2 hbar f0(2 hbar d/dz)` applied to a series.
pub fn two_hbar_f0(a: &HSeries) -> HSeries {
    a.apply_dop(&DOp::f0(a.cap(), &q(2))).hshift(1).scale(&q(2))
}

/// The four identities relating the cross-level components, every (i, j).
pub fn check_tech1(d: &CartanDatum, l: &Q, lp: &Q, t: Trunc) -> Vec<Entry> {
    const SUITE: &str = "tau-tech1";
    let levels = format!("l={l},l'={lp}");
    let el = match wh_pair(d, l, lp, t) {
        Ok(e) => e,
        Err(e) => return vec![Entry::new(SUITE, format!("{};{levels}", d.label()), Status::Fail).with_detail(e.to_string())],
    };
    let rl = q(d.r) * l;
    let rlp = q(d.r) * lp;
    let mut out = Vec::new();
    for (i, j) in d.pairs() {
        let pc = el.at(i, j);
        let case = |k: usize| format!("{};{levels};ij={i}{j};identity-{k}", d.label());
        let lhs = two_hbar_f0(&pc.tau);
        let rhs = translate(&pc.one[PLUS], &-rl.clone()).sub_s(&translate(&pc.one[PLUS], &rl));
        let (ok, w) = lhs.cert_eq(&rhs);
        out.push(Entry::compared(SUITE, case(1), ok, w, 0));
        let rhs = translate(&pc.two[PLUS], &-rlp.clone()).sub_s(&translate(&pc.two[PLUS], &rlp));
        let (ok, w) = lhs.cert_eq(&rhs);
        out.push(Entry::compared(SUITE, case(2), ok, w, 0));
        let b = q(d.b(i, j));
        let qb = Exponent::qpow(b.clone()).sub(&Exponent::qpow(-b.clone()));
        for (k, lev, comp) in [(3usize, &rlp, &pc.one), (4usize, &rl, &pc.two)] {
            let ql = Exponent::qpow(lev.clone()).sub(&Exponent::qpow(-lev.clone()));
            let g = qb.mul(&ql);
            let entry = match f_pow_literal(t, &g).and_then(|p| p.log()) {
                Ok(lg) => match lg.into_series() {
                    Ok(rhs) => {
                        let mut ok = true;
                        let mut w = Window::full();
                        for e in [PLUS, MINUS] {
                            let (o, win) = two_hbar_f0(&comp[e]).cert_eq(&rhs);
                            ok &= o;
                            w = w.merge(win);
                        }
                        Entry::compared(SUITE, case(k), ok, w, 0)
                    }
                    Err(e) => Entry::new(SUITE, case(k), Status::Fail).with_detail(e.to_string()),
                },
                Err(e) => Entry::new(SUITE, case(k), Status::Fail).with_detail(e.to_string()),
            };
            out.push(entry);
        }
    }
    out
}

fn both(a: (bool, Window), b: (bool, Window)) -> (bool, Window) {
    (a.0 && b.0, a.1.merge(b.1))
}

/// `sum_m a_m (d/dz)^k log f(z + m hbar)` for `g = sum a_m q^m`, term by term.
fn dlog_f_literal(t: Trunc, g: &Exponent, k: usize) -> HSeries {
    let base = log_f(t).derive().derive_n(k - 1);
    g.terms().fold(HSeries::zero(t), |acc, (m, a)| acc.add_s(&base.shift_z(m).scale(a)))
}

/// Every component of a level element against independent closed forms: the
/// `eps` by literal products of shifted `f`, `1` by summing shifted `f'/f`,
/// `2` as the transpose of `1`, and `tau` by the literal product when `r l` is
/// an integer, otherwise through `-[r l] d/dz (1 + b/z) - b r l / z^2`.
pub fn check_level(d: &CartanDatum, l: &Q, el: &TauElement, t: Trunc) -> Vec<Entry> {
    const SUITE: &str = "tau-tech1";
    let rl = q(d.r) * l;
    let mut out = Vec::new();
    for (i, j) in d.pairs() {
        let case = |what: &str| format!("{};l={l};ij={i}{j};level-{what}", d.label());
        let pc = el.at(i, j);
        let b = d.b(i, j);
        let bq = q(b);
        let qb = Exponent::qint(b, &Q::one());
        let one_g = qb.mul(&Exponent::qpow(rl.clone()));
        let one = dlog_f_literal(t, &one_g, 1).add_s(&z_pow(t, -1, -bq.clone()));
        let (ok, w) = both(pc.one[PLUS].cert_eq(&one), pc.one[MINUS].cert_eq(&one));
        out.push(Entry::compared(SUITE, case("1"), ok, w, 0));
        let ji = el.at(j, i);
        let (ok, w) = both(pc.two[PLUS].cert_eq(&ji.one[PLUS]), pc.two[MINUS].cert_eq(&ji.one[MINUS]));
        out.push(Entry::compared(SUITE, case("2"), ok, w, 0));
        let tail = z_pow(t, -2, -(&bq * &rl));
        let tau = if rl.is_integer() {
            let g = one_g.mul(&Exponent::qint(rl.to_integer().try_into().unwrap_or(0), &Q::one()));
            dlog_f_literal(t, &g, 2).neg_s().add_s(&tail)
        } else {
            one.add_s(&z_pow(t, -1, bq.clone())).derive().apply_dop(&qbr(t, &rl)).neg_s().add_s(&tail)
        };
        let (ok, w) = pc.tau.cert_eq(&tau);
        out.push(Entry::compared(SUITE, case("tau"), ok, w, 0));
        let lit = |g: Exponent| f_pow_literal(t, &g);
        let zi = z_pow(t, -1, Q::one());
        let eps: Result<[[HSeries; 2]; 2], SeriesError> = (|| {
            let same = if i == j {
                lit(Exponent::qpow(-bq.clone()).sub(&Exponent::constant(Q::one())))?
            } else {
                zi.mul_s(&lit(Exponent::qpow(-bq.clone()))?)
            };
            let cross = lit(Exponent::qpow(bq.clone()).sub(&Exponent::qpow(-bq.clone())))?;
            let (pm, mp) = if i == j {
                let up = HSeries::z(t).add_s(&HSeries::mono(t, 1, 0, q(2) * &rl));
                let dn = HSeries::z(t).add_s(&HSeries::mono(t, 1, 0, q(-2) * &rl));
                (zi.mul_s(&up), zi.mul_s(&dn).mul_s(&cross))
            } else {
                (HSeries::one(t), cross)
            };
            Ok([[same.clone(), pm], [mp, same]])
        })();
        match eps {
            Ok(eps) => {
                for e1 in [PLUS, MINUS] {
                    for e2 in [PLUS, MINUS] {
                        let (ok, w) = pc.eps[e1][e2].cert_eq(&eps[e1][e2]);
                        let name = format!("{}{}", sign_char(e1), sign_char(e2));
                        out.push(Entry::compared(SUITE, case(&name), ok, w, 0));
                    }
                }
            }
            Err(e) => out.push(Entry::new(SUITE, case("eps"), Status::Fail).with_detail(e.to_string())),
        }
    }
    out
}

/// The `tau-tech1` suite for one level pair: the four cross-level identities
/// and the closed-form checks of both level elements. `corrupt` perturbs the
/// level-`l` element before it is checked.
pub fn tech1_suite(d: &CartanDatum, l: &Q, lp: &Q, t: Trunc, corrupt: Option<u64>) -> Vec<Entry> {
    let mut out = check_tech1(d, l, lp, t);
    let mut levels = vec![l.clone()];
    if lp != l {
        levels.push(lp.clone());
    }
    for (n, lev) in levels.iter().enumerate() {
        match wh_ell(d, lev, t) {
            Ok(mut el) => {
                let mut note = None;
                if n == 0 {
                    if let Some(seed) = corrupt {
                        note = Some(el.corrupt(seed));
                    }
                }
                let mut es = check_level(d, lev, &el, t);
                if let Some(nt) = note {
                    for e in es.iter_mut().filter(|e| !e.passed()) {
                        e.detail = Some(format!("corrupted fixture: {nt}"));
                    }
                }
                out.extend(es);
            }
            Err(e) => out.push(Entry::new("tau-tech1", format!("{};l={lev};level", d.label()), Status::Fail).with_detail(e.to_string())),
        }
    }
    out
}

/// Which q-base the bracket kernel uses for the `[r_i a_ij]` factor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, serde::Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum BracketVariant {
    /// `[r_i a_ij]_{q^{d/dz}}`
    #[default]
    Plain,
    /// `[r_i a_ij]_{q^{r_i d/dz}}`
    RiBase,
}

impl BracketVariant {
    pub fn label(self) -> &'static str {
        match self {
            BracketVariant::Plain => "plain",
            BracketVariant::RiBase => "ri-base",
        }
    }

    /// `[r_i a_ij]` in the chosen base, as an operator in `hbar d/dz`.
    pub fn factor(self, d: &CartanDatum, i: usize, j: usize, t: Trunc) -> DOp {
        let b = q(d.b(i, j));
        match self {
            BracketVariant::Plain => qbr(t, &b),
            BracketVariant::RiBase => {
                let ri = q(d.ri[i]);
                qbr(t, &(&ri * &b)).mul(&qbr(t, &ri).inverse().expect("[r_i] is a unit"))
            }
        }
    }
}

/// The h-x bracket kernel `[r_i a_ij] q^{r l d} d log f(z)` in both regions
/// against the classical pole plus the level element's `1,+` and `2,+` parts.
pub fn check_local_h2(d: &CartanDatum, l: &Q, t: Trunc, variant: BracketVariant) -> Vec<Entry> {
    const SUITE: &str = "tau-tech1";
    let rl = q(d.r) * l;
    let el = match wh_ell(d, l, t) {
        Ok(e) => e,
        Err(e) => return vec![Entry::new(SUITE, format!("{};l={l};local-h-2", d.label()), Status::Fail).with_detail(e.to_string())],
    };
    let mut out = Vec::new();
    for (i, j) in d.pairs() {
        let k = dlog_f_pow(t, &variant.factor(d, i, j, t).mul(&shift(t, &rl)), 1);
        let pole = z_pow(t, -1, q(d.b(i, j)));
        for (region, tau) in [("12", &el.at(i, j).one[PLUS]), ("21", &el.at(j, i).two[PLUS])] {
            let (ok, w) = k.cert_eq(&pole.add_s(tau));
            let case = format!("{};l={l};ij={i}{j};local-h-2;variant={};region={region}", d.label(), variant.label());
            out.push(Entry::compared(SUITE, case, ok, w, 0));
        }
    }
    out
}

/// Exact rational in display form used by tables.
pub fn fmt_q(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::all_pass;

    fn t() -> Trunc {
        Trunc::new(4, 10)
    }

    #[test]
    fn symmetrizers() {
        assert_eq!(CartanDatum::a2().ri, vec![1, 1]);
        assert_eq!(CartanDatum::sym12().ri, vec![1, 2]);
        assert_eq!(CartanDatum::g2t().ri, vec![1, 3]);
        assert_eq!(CartanDatum::new(vec![vec![2, -1], vec![0, 2]], 1), Err(CartanError::ZeroPattern(0, 1)));
        assert_eq!(CartanDatum::new(vec![vec![1]], 1), Err(CartanError::Diagonal(0, 1)));
        let cyc = vec![vec![2, -1, -1], vec![-2, 2, -1], vec![-1, -1, 2]];
        assert_eq!(CartanDatum::new(cyc, 1), Err(CartanError::NotSymmetrizable));
    }

    #[test]
    fn level_and_pair_elements_are_members() {
        for d in [CartanDatum::a1(), CartanDatum::a2(), CartanDatum::sym12()] {
            wh_ell(&d, &q(1), t()).unwrap().is_member().unwrap();
            wh_ell(&d, &qf(1, 2), t()).unwrap().is_member().unwrap();
            wh_pair(&d, &q(1), &q(2), t()).unwrap().is_member().unwrap();
        }
    }

    #[test]
    fn group_laws() {
        let d = CartanDatum::a2();
        let a = wh_ell(&d, &q(1), t()).unwrap();
        let b = wh_pair(&d, &q(1), &q(3), t()).unwrap();
        let id = TauElement::identity(2, t());
        assert!(a.mul(&id).cert_eq(&a).0);
        assert!(a.mul(&b).cert_eq(&b.mul(&a)).0);
        assert!(a.mul(&a.inv().unwrap()).cert_eq(&id).0);
        a.mul(&b).is_member().unwrap();
    }

    #[test]
    fn tech1_holds() {
        for d in [CartanDatum::a1(), CartanDatum::a2(), CartanDatum::sym12()] {
            let e = check_tech1(&d, &q(1), &q(2), t());
            assert!(all_pass(&e), "{:?}", crate::report::failures(&e));
        }
        let e = check_tech1(&CartanDatum::a1(), &qf(1, 2), &qf(3, 2), t());
        assert!(all_pass(&e), "{:?}", crate::report::failures(&e));
    }

    #[test]
    fn local_h2_plain_closes_ri_base_only_for_unit_ri() {
        for d in [CartanDatum::a2(), CartanDatum::sym12()] {
            assert!(all_pass(&check_local_h2(&d, &q(1), t(), BracketVariant::Plain)));
        }
        assert!(all_pass(&check_local_h2(&CartanDatum::a2(), &q(1), t(), BracketVariant::RiBase)));
        let es = check_local_h2(&CartanDatum::sym12(), &q(1), t(), BracketVariant::RiBase);
        let bad: Vec<_> = es.iter().filter(|e| !e.passed()).map(|e| e.case.clone()).collect();
        assert!(!bad.is_empty());
        assert!(bad.iter().all(|c| c.contains("ij=1")), "{bad:?}");
    }

    #[test]
    fn corruption_breaks_something() {
        let d = CartanDatum::a2();
        let a = wh_ell(&d, &q(1), t()).unwrap();
        for seed in 0..8 {
            let mut b = a.clone();
            b.corrupt(seed);
            assert!(!b.cert_eq(&a).0);
        }
    }

    #[test]
    fn level_closed_forms() {
        let t = Trunc::new(4, 8);
        for d in [CartanDatum::a1(), CartanDatum::sym12()] {
            for l in [q(1), qf(1, 2), q(2)] {
                let el = wh_ell(&d, &l, t).unwrap();
                let es = check_level(&d, &l, &el, t);
                assert!(crate::report::all_pass(&es), "{:?}", crate::report::failures(&es));
            }
        }
    }

    #[test]
    fn level_checks_catch_every_corruption() {
        let t = Trunc::new(3, 8);
        let d = CartanDatum::a2();
        for seed in 0..40u64 {
            let es = tech1_suite(&d, &q(1), &q(2), t, Some(seed));
            assert!(!crate::report::all_pass(&es), "seed {seed} undetected");
        }
    }
}
