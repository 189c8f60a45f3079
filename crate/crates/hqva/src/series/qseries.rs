use super::layer::Layer;
use super::{binom_q, factorial, q, qf, qpow, Exponent, Result, SeriesError, Q, INF};
use num_traits::{One, Zero};
use std::fmt;

/// A z-free series in hbar, Laurent allowed, certified below `prec`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QSeries {
    l: Layer,
}

impl QSeries {
    pub fn from_coeffs(lo: i64, c: Vec<Q>, prec: i64) -> Self {
        QSeries { l: Layer::from_coeffs(lo, c, prec.min(INF - 1)) }
    }

    pub fn from_layer(l: Layer) -> Self {
        QSeries { l }
    }

    pub fn zero(prec: i64) -> Self {
        QSeries { l: Layer::zero(prec) }
    }

    pub fn constant(x: Q, prec: i64) -> Self {
        QSeries::from_coeffs(0, vec![x], prec)
    }

    pub fn one(prec: i64) -> Self {
        QSeries::constant(Q::one(), prec)
    }

    pub fn hbar(prec: i64) -> Self {
        QSeries::from_coeffs(1, vec![Q::one()], prec)
    }

    pub fn layer(&self) -> &Layer {
        &self.l
    }

    /// Exclusive ceiling of certified hbar powers.
    pub fn prec(&self) -> i64 {
        self.l.prec
    }

    /// Highest certified hbar power.
    pub fn cap(&self) -> i64 {
        self.l.prec - 1
    }

    /// Lowest stored power (the valuation when nonzero).
    pub fn val(&self) -> i64 {
        self.l.val()
    }

    pub fn coeff(&self, k: i64) -> Q {
        self.l.coeff(k)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &Q)> + '_ {
        self.l.terms()
    }

    pub fn is_zero(&self) -> bool {
        self.l.is_empty()
    }

    pub fn with_prec(&self, p: i64) -> Self {
        QSeries { l: self.l.clone().with_prec(p) }
    }

    pub fn add(&self, o: &QSeries) -> QSeries {
        QSeries { l: self.l.add(&o.l) }
    }

    pub fn sub(&self, o: &QSeries) -> QSeries {
        QSeries { l: self.l.sub(&o.l) }
    }

    pub fn neg(&self) -> QSeries {
        QSeries { l: self.l.neg() }
    }

    pub fn scale(&self, s: &Q) -> QSeries {
        QSeries { l: self.l.scale(s) }
    }

    pub fn mul(&self, o: &QSeries) -> QSeries {
        QSeries { l: self.l.mul(&o.l) }
    }

    fn bounded(&self, op: &'static str) -> Result<()> {
        if self.prec() > 1 << 20 {
            return Err(SeriesError::Domain { op, why: "exact input needs an explicit precision".into() });
        }
        Ok(())
    }

    pub fn inv(&self) -> Result<QSeries> {
        self.bounded("inv")?;
        self.l
            .invert(self.l.prec)
            .map(|l| QSeries { l })
            .ok_or(SeriesError::NotInvertible("zero hbar series"))
    }

    pub fn div(&self, o: &QSeries) -> Result<QSeries> {
        Ok(self.mul(&o.inv()?))
    }

    pub fn pow_i(&self, e: i64) -> Result<QSeries> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut acc = QSeries::one(INF - 1);
        for _ in 0..e.unsigned_abs() {
            acc = acc.mul(&base);
        }
        Ok(acc)
    }

    pub fn exp(&self) -> Result<QSeries> {
        self.bounded("exp")?;
        if !self.l.is_empty() && self.l.lo < 1 {
            return Err(SeriesError::Domain { op: "exp", why: "series is not hbar-divisible".into() });
        }
        let p = self.prec();
        let mut acc = QSeries::one(p);
        let mut pw = QSeries::one(p);
        for n in 1..p.max(0) {
            pw = pw.mul(self).scale(&(Q::one() / q(n)));
            acc = acc.add(&pw);
        }
        Ok(acc.with_prec(p))
    }

    fn unit_part(&self, op: &'static str) -> Result<QSeries> {
        if self.l.is_empty() || self.l.lo != 0 || !self.l.c[0].is_one() {
            return Err(SeriesError::Domain { op, why: "needs constant term 1".into() });
        }
        Ok(self.sub(&QSeries::one(INF - 1)))
    }

    pub fn log(&self) -> Result<QSeries> {
        self.bounded("log")?;
        let x = self.unit_part("log")?;
        let p = self.prec();
        let mut acc = QSeries::zero(p);
        let mut pw = QSeries::one(p);
        for n in 1..p.max(0) {
            pw = pw.mul(&x);
            let s = if n % 2 == 1 { qf(1, n) } else { qf(-1, n) };
            acc = acc.add(&pw.scale(&s));
        }
        Ok(acc)
    }

    pub fn pow_rat(&self, alpha: &Q) -> Result<QSeries> {
        self.bounded("pow")?;
        let x = self.unit_part("pow")?;
        let p = self.prec();
        let mut acc = QSeries::one(p);
        let mut pw = QSeries::one(p);
        for n in 1..p.max(0) {
            pw = pw.mul(&x);
            acc = acc.add(&pw.scale(&binom_q(alpha, n as usize)));
        }
        Ok(acc)
    }

    pub fn sqrt(&self) -> Result<QSeries> {
        self.pow_rat(&qf(1, 2))
    }

    /// f0(a hbar).
    pub fn f0_at(a: &Q, prec: i64) -> QSeries {
        let c = (0..prec.max(0))
            .map(|k| {
                if k % 2 == 1 {
                    Q::zero()
                } else {
                    qpow(a, k) / (qpow(&q(4), k / 2) * factorial(k as usize + 1))
                }
            })
            .collect();
        QSeries::from_coeffs(0, c, prec)
    }

    /// f(a hbar) = a hbar f0(a hbar).
    pub fn f_at(a: &Q, prec: i64) -> QSeries {
        QSeries { l: QSeries::f0_at(a, prec).l.scale(a).zshift(1).with_prec(prec) }
    }

    /// q^m = e^{m hbar}.
    pub fn qpow(m: &Q, prec: i64) -> QSeries {
        let c = (0..prec.max(0)).map(|k| qpow(m, k) / factorial(k as usize)).collect();
        QSeries::from_coeffs(0, c, prec)
    }

    /// [c]_q = c f0(2c hbar) / f0(2 hbar).
    pub fn qnum(c: &Q, prec: i64) -> QSeries {
        QSeries::qnum_base(c, &Q::one(), prec)
    }

    /// [c]_{q^b} = c f0(2cb hbar) / f0(2b hbar).
    pub fn qnum_base(c: &Q, b: &Q, prec: i64) -> QSeries {
        if c.is_zero() {
            return QSeries::zero(prec);
        }
        let num = QSeries::f0_at(&(q(2) * c * b), prec).scale(c);
        num.div(&QSeries::f0_at(&(q(2) * b), prec)).expect("f0 is a unit")
    }

    /// g(q) as a series.
    pub fn from_exponent(g: &Exponent, prec: i64) -> QSeries {
        g.terms().fold(QSeries::zero(prec), |acc, (m, a)| acc.add(&QSeries::qpow(m, prec).scale(a)))
    }

    /// Equality on the common certified range; returns the certified cap.
    pub fn cert_eq(&self, o: &QSeries) -> (bool, i64) {
        let d = self.sub(o);
        (d.is_zero(), d.cap())
    }

    pub fn classical(&self) -> Q {
        self.coeff(0)
    }
}

impl fmt::Display for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, x) in self.terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{x}")?,
                1 => write!(f, "({x})h")?,
                _ => write!(f, "({x})h^{k}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(h^{})", self.prec())
    }
}
