use super::{factorial, q, qpow, HSeries, Result, SeriesError, Q, INF};
use super::layer::Layer;
use num_traits::{One, Zero};
use std::collections::BTreeMap;

/// A power series in `D = hbar d/dz`, truncated at `D^n`.
///
/// Every exponent `g(q)` with `q = e^hbar` acting through `q^{c d/dz}` becomes
/// such a series: `q^{m d/dz} = e^{mD}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DOp {
    pub c: Vec<Q>,
}

impl DOp {
    pub fn zero(n: usize) -> Self {
        DOp { c: vec![Q::zero(); n + 1] }
    }

    pub fn scalar(n: usize, x: Q) -> Self {
        let mut d = DOp::zero(n);
        d.c[0] = x;
        d
    }

    pub fn identity(n: usize) -> Self {
        DOp::scalar(n, Q::one())
    }

    pub fn order(&self) -> usize {
        self.c.len() - 1
    }

    /// `D` itself.
    pub fn d(n: usize) -> Self {
        let mut d = DOp::zero(n);
        if n >= 1 {
            d.c[1] = Q::one();
        }
        d
    }

    /// `e^{cD}`, i.e. `q^{c d/dz}`.
    pub fn shift(n: usize, c: &Q) -> Self {
        DOp { c: (0..=n).map(|k| qpow(c, k as i64) / factorial(k)).collect() }
    }

    /// `f0(aD) = sum (aD)^{2m} / (4^m (2m+1)!)`.
    pub fn f0(n: usize, a: &Q) -> Self {
        DOp {
            c: (0..=n)
                .map(|k| {
                    if k % 2 == 1 {
                        Q::zero()
                    } else {
                        let m = (k / 2) as i64;
                        qpow(a, k as i64) / (qpow(&q(4), m) * factorial(k + 1))
                    }
                })
                .collect(),
        }
    }

    /// `[c]_{q^{d/dz}} = c f0(2cD) / f0(2D)`, valid for every rational `c`.
    pub fn qbracket(n: usize, c: &Q) -> Self {
        let num = DOp::f0(n, &(q(2) * c)).scale(c);
        num.mul(&DOp::f0(n, &q(2)).inverse().expect("f0 has unit constant term"))
    }

    /// `e^{D} - e^{-D} = 2 hbar f0(2 hbar d/dz) d/dz`.
    pub fn twohf0_d(n: usize) -> Self {
        DOp::shift(n, &q(1)).sub(&DOp::shift(n, &q(-1)))
    }

    pub fn add(&self, o: &DOp) -> DOp {
        let n = self.order().min(o.order());
        DOp { c: (0..=n).map(|k| &self.c[k] + &o.c[k]).collect() }
    }

    pub fn sub(&self, o: &DOp) -> DOp {
        let n = self.order().min(o.order());
        DOp { c: (0..=n).map(|k| &self.c[k] - &o.c[k]).collect() }
    }

    pub fn neg(&self) -> DOp {
        DOp { c: self.c.iter().map(|x| -x).collect() }
    }

    pub fn scale(&self, s: &Q) -> DOp {
        DOp { c: self.c.iter().map(|x| x * s).collect() }
    }

    pub fn mul(&self, o: &DOp) -> DOp {
        let n = self.order().min(o.order());
        let mut c = vec![Q::zero(); n + 1];
        for i in 0..=n {
            if self.c[i].is_zero() {
                continue;
            }
            for j in 0..=(n - i) {
                if !o.c[j].is_zero() {
                    c[i + j] += &self.c[i] * &o.c[j];
                }
            }
        }
        DOp { c }
    }

    pub fn inverse(&self) -> Option<DOp> {
        if self.c[0].is_zero() {
            return None;
        }
        let n = self.order();
        let inv0 = Q::one() / &self.c[0];
        let mut w = vec![Q::zero(); n + 1];
        w[0] = inv0.clone();
        for k in 1..=n {
            let mut s = Q::zero();
            for j in 1..=k {
                s += &self.c[j] * &w[k - j];
            }
            w[k] = -s * &inv0;
        }
        Some(DOp { c: w })
    }

    /// `G(-D)`: reflection of the variable turns `q^{c d/dz}` into `q^{-c d/dz}`.
    pub fn reflect(&self) -> DOp {
        DOp { c: self.c.iter().enumerate().map(|(k, x)| if k % 2 == 1 { -x } else { x.clone() }).collect() }
    }

    pub fn at_zero(&self) -> Q {
        self.c[0].clone()
    }

    /// Divide by `D`; the constant term must vanish.
    pub fn div_d(&self) -> Option<DOp> {
        if !self.c[0].is_zero() {
            return None;
        }
        let mut c: Vec<Q> = self.c[1..].to_vec();
        c.push(Q::zero());
        Some(DOp { c })
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(Zero::is_zero)
    }
}

/// A finite Laurent polynomial `g(q) = sum a_m q^m` with rational `m` and `a_m`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Exponent {
    terms: BTreeMap<Q, Q>,
}

impl Exponent {
    pub fn zero() -> Self {
        Exponent::default()
    }

    pub fn from_pairs<I: IntoIterator<Item = (Q, Q)>>(it: I) -> Self {
        let mut e = Exponent::zero();
        for (m, a) in it {
            e.push(m, a);
        }
        e
    }

    pub fn constant(a: Q) -> Self {
        Exponent::from_pairs([(Q::zero(), a)])
    }

    /// `q^m`.
    pub fn qpow(m: Q) -> Self {
        Exponent::from_pairs([(m, Q::one())])
    }

    /// `[n]_{q^b}` for integer `n` as a finite sum of powers.
    pub fn qint(n: i64, b: &Q) -> Self {
        let sign = if n < 0 { -Q::one() } else { Q::one() };
        let n = n.abs();
        Exponent::from_pairs((0..n).map(|k| (b * q(n - 1 - 2 * k), sign.clone())))
    }

    fn push(&mut self, m: Q, a: Q) {
        let slot = self.terms.entry(m.clone()).or_insert_with(Q::zero);
        *slot += a;
        if slot.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Q, &Q)> {
        self.terms.iter()
    }

    pub fn add(&self, o: &Exponent) -> Exponent {
        let mut e = self.clone();
        for (m, a) in o.terms() {
            e.push(m.clone(), a.clone());
        }
        e
    }

    pub fn neg(&self) -> Exponent {
        Exponent::from_pairs(self.terms().map(|(m, a)| (m.clone(), -a)))
    }

    pub fn sub(&self, o: &Exponent) -> Exponent {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Exponent) -> Exponent {
        let mut e = Exponent::zero();
        for (m1, a1) in self.terms() {
            for (m2, a2) in o.terms() {
                e.push(m1 + m2, a1 * a2);
            }
        }
        e
    }

    pub fn scale(&self, s: &Q) -> Exponent {
        Exponent::from_pairs(self.terms().map(|(m, a)| (m.clone(), a * s)))
    }

    /// `g(q^{-1})`.
    pub fn invert_q(&self) -> Exponent {
        Exponent::from_pairs(self.terms().map(|(m, a)| (-m, a.clone())))
    }

    /// `g(1)`.
    pub fn at_one(&self) -> Q {
        self.terms().fold(Q::zero(), |s, (_, a)| s + a)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn to_dop(&self, n: usize) -> DOp {
        self.terms().fold(DOp::zero(n), |acc, (m, a)| acc.add(&DOp::shift(n, m).scale(a)))
    }
}

/// `marker * log z + rest`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogSeries {
    pub marker: Q,
    pub rest: HSeries,
}

impl LogSeries {
    /// Apply an operator in `D`; on the marker, `D^n log z = hbar^n (-1)^{n-1} (n-1)! z^{-n}`.
    pub fn apply(&self, g: &DOp) -> LogSeries {
        let mut rest = self.rest.apply_dop(g);
        if !self.marker.is_zero() {
            let cap = rest.cap();
            for (n, gn) in g.c.iter().enumerate().skip(1) {
                if n > cap || gn.is_zero() {
                    continue;
                }
                let sign = if n % 2 == 1 { Q::one() } else { -Q::one() };
                let x = gn * &self.marker * sign * factorial(n - 1);
                let add = Layer::mono(-(n as i64), x, INF);
                rest.layers[n] = rest.layers[n].add(&add);
            }
        }
        LogSeries { marker: &self.marker * g.at_zero(), rest }
    }

    pub fn add(&self, o: &LogSeries) -> LogSeries {
        LogSeries { marker: &self.marker + &o.marker, rest: self.rest.add_s(&o.rest) }
    }

    pub fn sub(&self, o: &LogSeries) -> LogSeries {
        LogSeries { marker: &self.marker - &o.marker, rest: self.rest.sub_s(&o.rest) }
    }

    pub fn scale(&self, s: &Q) -> LogSeries {
        LogSeries { marker: &self.marker * s, rest: self.rest.scale(s) }
    }

    /// d/dz; the marker becomes `marker / z`.
    pub fn derive(&self) -> HSeries {
        let mut d = self.rest.derive();
        if !self.marker.is_zero() {
            d.layers[0] = d.layers[0].add(&Layer::mono(-1, self.marker.clone(), INF));
        }
        d
    }

    pub fn into_series(self) -> Result<HSeries> {
        if !self.marker.is_zero() {
            return Err(SeriesError::LogMarker(self.marker.to_string()));
        }
        Ok(self.rest)
    }

    /// Reflection `z -> -z`; `log(-z)` and `log z` differ by a constant that the
    /// callers never observe because markers must cancel before use.
    pub fn reflect(&self) -> LogSeries {
        LogSeries { marker: self.marker.clone(), rest: self.rest.reflect() }
    }
}
