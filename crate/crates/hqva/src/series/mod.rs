//! Exact truncated arithmetic in Q((z))[[hbar]] with per-order precision tracking.

mod biseries;
mod dop;
mod json;
mod layer;
mod qseries;

pub use biseries::{BiSeries, Region, RegionMode};
pub use dop::{DOp, Exponent, LogSeries};
pub use json::{HSeriesJson, QSeriesJson};
pub use layer::Layer;
pub use qseries::QSeries;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::ops::{Add, Mul, Neg, Sub};
use thiserror::Error;

pub type Q = BigRational;

/// Ceiling value meaning "exact to all orders".
pub const INF: i64 = 1 << 40;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qf(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub(crate) fn sadd(a: i64, b: i64) -> i64 {
    if a >= INF || b >= INF {
        INF
    } else {
        (a + b).min(INF)
    }
}

/// Generalized binomial coefficient binom(x, j) for rational x.
pub fn binom_q(x: &Q, j: usize) -> Q {
    let mut r = Q::one();
    for s in 0..j {
        r = r * (x - q(s as i64)) / q(s as i64 + 1);
    }
    r
}

pub fn factorial(n: usize) -> Q {
    (1..=n as i64).fold(Q::one(), |a, k| a * q(k))
}

/// Integer power of a rational, negative exponents allowed.
pub fn qpow(x: &Q, e: i64) -> Q {
    if e >= 0 {
        num_traits::pow(x.clone(), e as usize)
    } else {
        Q::one() / num_traits::pow(x.clone(), (-e) as usize)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeriesError {
    #[error("unknown base series `{0}`")]
    UnknownBase(String),
    #[error("series is not invertible: {0}")]
    NotInvertible(&'static str),
    #[error("precondition violated for {op}: {why}")]
    Domain { op: &'static str, why: String },
    #[error("uncancelled log z marker ({0})")]
    LogMarker(String),
    #[error("precision exhausted: {0}")]
    Precision(String),
}

pub type Result<T> = std::result::Result<T, SeriesError>;

/// Truncation context: hbar orders `0..=hbar` and the z ceiling used when an
/// operation produces an infinite expansion.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Trunc {
    pub hbar: usize,
    pub zcap: i64,
}

impl Trunc {
    pub fn new(hbar: usize, zcap: i64) -> Self {
        Trunc { hbar, zcap }
    }
}

/// Element of Q((z))[[hbar]] truncated at `hbar^N` inclusive.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HSeries {
    pub zcap: i64,
    pub layers: Vec<Layer>,
}

/// Certified window of a comparison.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct Window {
    pub hbar_order: usize,
    pub z_lo: i64,
    pub z_hi: i64,
}

impl Window {
    pub fn merge(self, o: Window) -> Window {
        Window {
            hbar_order: self.hbar_order.min(o.hbar_order),
            z_lo: self.z_lo.min(o.z_lo),
            z_hi: self.z_hi.min(o.z_hi),
        }
    }

    pub fn full() -> Window {
        Window { hbar_order: usize::MAX, z_lo: i64::MAX, z_hi: INF }
    }
}

impl HSeries {
    pub fn zero(t: Trunc) -> Self {
        HSeries { zcap: t.zcap, layers: vec![Layer::exact_zero(); t.hbar + 1] }
    }

    pub fn constant(t: Trunc, x: Q) -> Self {
        let mut s = HSeries::zero(t);
        s.layers[0] = Layer::mono(0, x, INF);
        s
    }

    pub fn one(t: Trunc) -> Self {
        HSeries::constant(t, Q::one())
    }

    /// `x * hbar^k * z^e`, exact.
    pub fn mono(t: Trunc, k: usize, e: i64, x: Q) -> Self {
        let mut s = HSeries::zero(t);
        if k <= t.hbar {
            s.layers[k] = Layer::mono(e, x, INF);
        }
        s
    }

    pub fn z(t: Trunc) -> Self {
        HSeries::mono(t, 0, 1, Q::one())
    }

    pub fn trunc(&self) -> Trunc {
        Trunc { hbar: self.cap(), zcap: self.zcap }
    }

    pub fn cap(&self) -> usize {
        self.layers.len() - 1
    }

    pub fn layer(&self, k: usize) -> &Layer {
        &self.layers[k]
    }

    pub fn coeff(&self, k: usize, e: i64) -> Q {
        self.layers.get(k).map(|l| l.coeff(e)).unwrap_or_else(Q::zero)
    }

    /// f0(z) = sum z^{2n} / (4^n (2n+1)!), certified below `zcap`.
    pub fn f0(t: Trunc) -> Self {
        let mut c = Vec::new();
        let mut e = 0i64;
        while e < t.zcap {
            let n = e / 2;
            if e % 2 == 0 {
                c.push(Q::one() / (qpow(&q(4), n) * factorial(2 * n as usize + 1)));
            } else {
                c.push(Q::zero());
            }
            e += 1;
        }
        let mut s = HSeries::zero(t);
        s.layers[0] = Layer::from_coeffs(0, c, t.zcap.max(0));
        s
    }

    /// f(z) = e^{z/2} - e^{-z/2} = z f0(z).
    pub fn f(t: Trunc) -> Self {
        let f0 = HSeries::f0(t);
        let mut s = HSeries::zero(t);
        s.layers[0] = f0.layers[0].zshift(1).with_prec(t.zcap);
        s
    }

    pub fn base(t: Trunc, name: &str) -> Result<Self> {
        match name {
            "f" => Ok(HSeries::f(t)),
            "f0" => Ok(HSeries::f0(t)),
            "z" => Ok(HSeries::z(t)),
            "one" | "1" => Ok(HSeries::one(t)),
            other => Err(SeriesError::UnknownBase(other.to_string())),
        }
    }

    pub fn from_layer0(t: Trunc, l: Layer) -> Self {
        let mut s = HSeries::zero(t);
        s.layers[0] = l;
        s
    }

    fn combine(&self, o: &HSeries) -> (usize, i64) {
        (self.cap().min(o.cap()), self.zcap.min(o.zcap))
    }

    pub fn add_s(&self, o: &HSeries) -> HSeries {
        let (n, zcap) = self.combine(o);
        HSeries { zcap, layers: (0..=n).map(|k| self.layers[k].add(&o.layers[k])).collect() }
    }

    pub fn sub_s(&self, o: &HSeries) -> HSeries {
        let (n, zcap) = self.combine(o);
        HSeries { zcap, layers: (0..=n).map(|k| self.layers[k].sub(&o.layers[k])).collect() }
    }

    pub fn neg_s(&self) -> HSeries {
        HSeries { zcap: self.zcap, layers: self.layers.iter().map(Layer::neg).collect() }
    }

    pub fn scale(&self, s: &Q) -> HSeries {
        HSeries { zcap: self.zcap, layers: self.layers.iter().map(|l| l.scale(s)).collect() }
    }

    pub fn mul_s(&self, o: &HSeries) -> HSeries {
        let (n, zcap) = self.combine(o);
        let mut layers = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let mut acc = Layer::exact_zero();
            for i in 0..=k {
                let (a, b) = (&self.layers[i], &o.layers[k - i]);
                if a.is_exact_zero() || b.is_exact_zero() {
                    continue;
                }
                acc = acc.add(&a.mul(b));
            }
            layers.push(acc);
        }
        HSeries { zcap, layers }
    }

    /// Multiply by `hbar^j`, dropping orders beyond the cap.
    pub fn hshift(&self, j: usize) -> HSeries {
        let n = self.cap();
        let mut layers = vec![Layer::exact_zero(); n + 1];
        for k in 0..=n {
            if k + j <= n {
                layers[k + j] = self.layers[k].clone();
            }
        }
        HSeries { zcap: self.zcap, layers }
    }

    pub fn zshift(&self, e: i64) -> HSeries {
        HSeries { zcap: self.zcap, layers: self.layers.iter().map(|l| l.zshift(e)).collect() }
    }

    pub fn is_hbar_free(&self) -> bool {
        self.layers[1..].iter().all(Layer::is_exact_zero)
    }

    pub fn invert(&self) -> Result<HSeries> {
        let a0 = &self.layers[0];
        if a0.is_empty() {
            return Err(SeriesError::NotInvertible("lowest hbar layer has no certified leading term"));
        }
        let b0l = a0.invert(self.zcap).ok_or(SeriesError::NotInvertible("zero layer"))?;
        let t = self.trunc();
        let b0 = HSeries::from_layer0(t, b0l);
        let mut rest = self.clone();
        rest.layers[0] = Layer::exact_zero();
        if rest.layers.iter().all(Layer::is_exact_zero) {
            return Ok(b0);
        }
        let y = rest.mul_s(&b0).neg_s();
        let mut acc = HSeries::one(t);
        let mut pw = HSeries::one(t);
        for _ in 0..self.cap() {
            pw = pw.mul_s(&y);
            acc = acc.add_s(&pw);
        }
        Ok(b0.mul_s(&acc))
    }

    pub fn div_s(&self, o: &HSeries) -> Result<HSeries> {
        Ok(self.mul_s(&o.invert()?))
    }

    pub fn pow_i(&self, e: i64) -> Result<HSeries> {
        let base = if e < 0 { self.invert()? } else { self.clone() };
        let mut acc = HSeries::one(self.trunc());
        for _ in 0..e.unsigned_abs() {
            acc = acc.mul_s(&base);
        }
        Ok(acc)
    }

    pub fn derive(&self) -> HSeries {
        HSeries { zcap: self.zcap, layers: self.layers.iter().map(Layer::derive).collect() }
    }

    pub fn derive_n(&self, n: usize) -> HSeries {
        (0..n).fold(self.clone(), |a, _| a.derive())
    }

    /// Substitute `z -> -z`.
    pub fn reflect(&self) -> HSeries {
        HSeries { zcap: self.zcap, layers: self.layers.iter().map(Layer::reflect).collect() }
    }

    /// a(z + c hbar) expanded in hbar.
    pub fn shift_z(&self, c: &Q) -> HSeries {
        let n = self.cap();
        if c.is_zero() {
            return self.clone();
        }
        let mut layers = vec![Layer::exact_zero(); n + 1];
        for (i, l) in self.layers.iter().enumerate() {
            if l.is_exact_zero() {
                continue;
            }
            let mut cj = Q::one();
            for j in 0..=(n - i) {
                let prec = if l.prec >= INF { INF } else { l.prec - j as i64 };
                let mut c_out = Vec::with_capacity(l.c.len());
                for (k, x) in l.c.iter().enumerate() {
                    let e = l.lo + k as i64;
                    c_out.push(x * binom_q(&q(e), j) * &cj);
                }
                let piece = Layer::from_coeffs(l.lo - j as i64, c_out, prec);
                layers[i + j] = layers[i + j].add(&piece);
                cj *= c;
            }
        }
        HSeries { zcap: self.zcap, layers }
    }

    /// Coefficient of z^{-1} in every hbar order.
    pub fn residue(&self) -> QSeries {
        let mut c = Vec::new();
        let mut prec = INF;
        for (k, l) in self.layers.iter().enumerate() {
            if l.prec <= -1 {
                prec = k as i64;
                break;
            }
            c.push(l.coeff(-1));
        }
        QSeries::from_coeffs(0, c, prec.min(self.cap() as i64 + 1))
    }

    /// (strictly negative z-powers, the rest).
    pub fn split_sing(&self) -> (HSeries, HSeries) {
        let mut sing = self.clone();
        let mut reg = self.clone();
        for (k, l) in self.layers.iter().enumerate() {
            let neg: Vec<Q> = (l.lo..l.hi().min(0)).map(|e| l.coeff(e)).collect();
            let sprec = if l.prec >= 0 { INF } else { l.prec };
            sing.layers[k] = Layer::from_coeffs(l.lo, neg, sprec);
            let start = l.lo.max(0);
            let pos: Vec<Q> = (start..l.hi().max(start)).map(|e| l.coeff(e)).collect();
            reg.layers[k] = Layer::from_coeffs(start, pos, l.prec);
        }
        (sing, reg)
    }

    /// Substitute `z := c hbar` into an hbar-free series.
    pub fn eval_at_hbar(&self, c: &Q) -> Result<QSeries> {
        if !self.is_hbar_free() {
            return Err(SeriesError::Domain {
                op: "eval_at_hbar",
                why: "series depends on hbar; substitution would mix unbounded pole orders".into(),
            });
        }
        let l = &self.layers[0];
        let top = self.cap() as i64 + 1;
        if c.is_zero() {
            if l.val() < 0 {
                return Err(SeriesError::Domain { op: "eval_at_hbar", why: "pole at z = 0".into() });
            }
            if l.prec <= 0 {
                return Err(SeriesError::Precision("constant term not certified".into()));
            }
            return Ok(QSeries::from_coeffs(0, vec![l.coeff(0)], top));
        }
        let prec = l.prec.min(top);
        let coeffs: Vec<Q> = (l.lo..l.hi().min(prec)).map(|e| l.coeff(e) * qpow(c, e)).collect();
        Ok(QSeries::from_coeffs(l.lo, coeffs, prec))
    }

    /// Equality on the common certified window.
    pub fn cert_eq(&self, o: &HSeries) -> (bool, Window) {
        let d = self.sub_s(o);
        let mut ok = true;
        let mut w = Window { hbar_order: d.cap(), z_lo: i64::MAX, z_hi: INF };
        for l in &d.layers {
            if !l.c.is_empty() {
                ok = false;
            }
            w.z_hi = w.z_hi.min(l.prec);
        }
        for (a, b) in self.layers.iter().zip(&o.layers) {
            for l in [a, b] {
                if !l.c.is_empty() {
                    w.z_lo = w.z_lo.min(l.lo);
                }
            }
        }
        if w.z_lo == i64::MAX {
            w.z_lo = 0;
        }
        (ok, w)
    }

    pub fn is_zero_cert(&self) -> bool {
        self.layers.iter().all(|l| l.c.is_empty())
    }

    /// Smallest certified ceiling over all orders.
    pub fn min_prec(&self) -> i64 {
        self.layers.iter().map(|l| l.prec).min().unwrap_or(INF)
    }

    pub fn z_floor(&self) -> i64 {
        self.layers.iter().filter(|l| !l.c.is_empty()).map(|l| l.lo).min().unwrap_or(0)
    }

    /// Keep orders `0..=n`.
    pub fn truncate_hbar(&self, n: usize) -> HSeries {
        HSeries { zcap: self.zcap, layers: self.layers[..=n.min(self.cap())].to_vec() }
    }

    /// Series with only the hbar^0 layer.
    pub fn classical(&self) -> HSeries {
        let mut s = HSeries::zero(self.trunc());
        s.layers[0] = self.layers[0].clone();
        s
    }

    pub fn leading_coeff0(&self) -> Option<(i64, Q)> {
        let l = &self.layers[0];
        if l.c.is_empty() {
            None
        } else {
            Some((l.lo, l.c[0].clone()))
        }
    }

    /// Exponential of a series whose hbar^0 layer has positive z-valuation.
    pub fn exp(&self) -> Result<HSeries> {
        let t = self.trunc();
        let l0 = &self.layers[0];
        if !l0.c.is_empty() && l0.lo <= 0 {
            return Err(SeriesError::Domain { op: "exp", why: "hbar^0 layer has a nonpositive z-power".into() });
        }
        let a0 = HSeries::from_layer0(t, l0.clone());
        let mut rest = self.clone();
        rest.layers[0] = Layer::exact_zero();
        let e0 = if l0.is_exact_zero() {
            HSeries::one(t)
        } else {
            let bound = l0.prec.min(self.zcap).max(0);
            clip0(exp_series(&a0, bound as usize, t), bound)
        };
        let e1 = exp_series(&rest, self.cap(), t);
        Ok(e0.mul_s(&e1))
    }

    /// Logarithm of `z^v * u` with `u = 1 + ...`; the `v log z` part is carried as a marker.
    pub fn log(&self) -> Result<LogSeries> {
        let (v, lead) = self
            .leading_coeff0()
            .ok_or(SeriesError::Domain { op: "log", why: "no certified leading term".into() })?;
        if !lead.is_one() {
            return Err(SeriesError::Domain { op: "log", why: format!("leading coefficient {lead} is not 1") });
        }
        let u = self.zshift(-v);
        Ok(LogSeries { marker: q(v), rest: log_unit(&u)? })
    }

    /// u^alpha for a unit with leading coefficient 1 and z-valuation divisible as needed.
    pub fn pow_rat(&self, alpha: &Q) -> Result<HSeries> {
        let (v, lead) = self
            .leading_coeff0()
            .ok_or(SeriesError::Domain { op: "pow", why: "no certified leading term".into() })?;
        if !lead.is_one() {
            return Err(SeriesError::Domain { op: "pow", why: format!("leading coefficient {lead} is not 1") });
        }
        let ve = q(v) * alpha;
        if !ve.is_integer() {
            return Err(SeriesError::Domain { op: "pow", why: "fractional power of z".into() });
        }
        let u = self.zshift(-v);
        let t = self.trunc();
        let u0 = HSeries::from_layer0(t, u.layers[0].clone());
        let t0 = u0.sub_s(&HSeries::one(t));
        let bound = u.layers[0].prec.min(self.zcap).max(0);
        let p0 = clip0(binom_series(&t0, alpha, bound as usize, t), bound);
        let y = u.sub_s(&u0).div_s(&u0)?;
        let p1 = binom_series(&y, alpha, self.cap(), t);
        let ve_i: i64 = ve.to_integer().try_into().unwrap_or(0);
        Ok(p0.mul_s(&p1).zshift(ve_i))
    }

    pub fn sqrt(&self) -> Result<HSeries> {
        self.pow_rat(&qf(1, 2))
    }

    /// Apply `g(hbar d/dz)` with `g` given as a power series in `D = hbar d/dz`.
    pub fn apply_dop(&self, g: &DOp) -> HSeries {
        let mut acc = HSeries::zero(self.trunc());
        let mut d = self.clone();
        for (n, gn) in g.c.iter().enumerate() {
            if n > self.cap() {
                break;
            }
            if !gn.is_zero() {
                acc = acc.add_s(&d.hshift(n).scale(gn));
            }
            d = d.derive();
        }
        acc
    }

    /// Product of shifted integer powers, the literal definition of `P^{g(q)}`.
    pub fn pow_gq(&self, g: &Exponent) -> Result<HSeries> {
        let mut acc = HSeries::one(self.trunc());
        for (m, a) in g.terms() {
            let a_i = a.to_integer();
            if !a.is_integer() {
                return Err(SeriesError::Domain { op: "pow_gq", why: format!("non-integer weight {a}") });
            }
            let ai: i64 = a_i.try_into().map_err(|_| SeriesError::Domain { op: "pow_gq", why: "weight overflow".into() })?;
            let p = self.pow_i(ai)?;
            acc = acc.mul_s(&p.shift_z(m));
        }
        Ok(acc)
    }

    /// `P^{G}` through `P^{G(0)} exp((G - G(0)) log P)`, with `G` an operator in `D = hbar d/dz`.
    pub fn pow_op(&self, g: &DOp) -> Result<HSeries> {
        let (_, lead) = self
            .leading_coeff0()
            .ok_or(SeriesError::Domain { op: "pow_op", why: "no certified leading term".into() })?;
        let g0 = g.c.first().cloned().unwrap_or_else(Q::zero);
        if !g0.is_integer() {
            return Err(SeriesError::Domain { op: "pow_op", why: format!("constant term {g0} is not an integer") });
        }
        let g0i: i64 = g0.to_integer().try_into().unwrap_or(0);
        let head = self.pow_i(g0i)?;
        let normalized = self.scale(&(Q::one() / &lead));
        let lg = normalized.log()?;
        let mut g1 = g.clone();
        if let Some(c0) = g1.c.first_mut() {
            *c0 = Q::zero();
        }
        let e = lg.apply(&g1).into_series()?;
        Ok(head.mul_s(&e.exp()?))
    }

    pub fn max_abs_z(&self) -> i64 {
        self.layers.iter().filter(|l| !l.c.is_empty()).map(|l| l.lo.abs().max(l.hi().abs())).max().unwrap_or(0)
    }

    pub fn is_negative_valued(&self) -> bool {
        self.layers.iter().any(|l| l.terms().any(|(_, x)| x.is_negative()))
    }
}

fn exp_series(a: &HSeries, terms: usize, t: Trunc) -> HSeries {
    let mut acc = HSeries::one(t);
    let mut pw = HSeries::one(t);
    for n in 1..=terms {
        pw = pw.mul_s(a).scale(&(Q::one() / q(n as i64)));
        acc = acc.add_s(&pw);
    }
    acc
}

/// Cap the certified ceiling of the hbar^0 layer; used after summing a z-adic
/// series to finitely many terms.
fn clip0(mut s: HSeries, p: i64) -> HSeries {
    s.layers[0] = s.layers[0].clone().with_prec(p);
    s
}

fn log_unit(u: &HSeries) -> Result<HSeries> {
    let t = u.trunc();
    let u0 = HSeries::from_layer0(t, u.layers[0].clone());
    let t0 = u0.sub_s(&HSeries::one(t));
    let bound = u.layers[0].prec.min(u.zcap).max(0);
    let l0 = clip0(log1p_series(&t0, bound as usize, t), bound);
    let y = u.sub_s(&u0).div_s(&u0)?;
    let l1 = log1p_series(&y, u.cap(), t);
    Ok(l0.add_s(&l1))
}

fn log1p_series(x: &HSeries, terms: usize, t: Trunc) -> HSeries {
    let mut acc = HSeries::zero(t);
    let mut pw = HSeries::one(t);
    for n in 1..=terms {
        pw = pw.mul_s(x);
        let s = if n % 2 == 1 { qf(1, n as i64) } else { qf(-1, n as i64) };
        acc = acc.add_s(&pw.scale(&s));
    }
    acc
}

fn binom_series(x: &HSeries, alpha: &Q, terms: usize, t: Trunc) -> HSeries {
    let mut acc = HSeries::one(t);
    let mut pw = HSeries::one(t);
    for n in 1..=terms {
        pw = pw.mul_s(x);
        acc = acc.add_s(&pw.scale(&binom_q(alpha, n)));
    }
    acc
}

impl Add for &HSeries {
    type Output = HSeries;
    fn add(self, o: &HSeries) -> HSeries {
        self.add_s(o)
    }
}

impl Sub for &HSeries {
    type Output = HSeries;
    fn sub(self, o: &HSeries) -> HSeries {
        self.sub_s(o)
    }
}

impl Mul for &HSeries {
    type Output = HSeries;
    fn mul(self, o: &HSeries) -> HSeries {
        self.mul_s(o)
    }
}

impl Neg for &HSeries {
    type Output = HSeries;
    fn neg(self) -> HSeries {
        self.neg_s()
    }
}

#[cfg(test)]
mod tests;
