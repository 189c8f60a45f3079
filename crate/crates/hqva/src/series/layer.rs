use super::{sadd, Q, INF};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

/// Numerators over the least common denominator.
fn over_common_denom(c: &[Q]) -> (Vec<BigInt>, BigInt) {
    let den = c.iter().fold(BigInt::one(), |l, x| l.lcm(x.denom()));
    let nums = c.iter().map(|x| x.numer() * (&den / x.denom())).collect();
    (nums, den)
}

/// A Laurent polynomial in one variable with a certified precision ceiling.
///
/// Coefficients of `z^e` for `e < prec` are exact; anything at or above
/// `prec` is unknown. `prec >= INF` marks an exact (finite) polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Layer {
    pub lo: i64,
    pub c: Vec<Q>,
    pub prec: i64,
}

impl Layer {
    pub fn zero(prec: i64) -> Self {
        Layer { lo: 0, c: Vec::new(), prec: prec.min(INF) }
    }

    pub fn exact_zero() -> Self {
        Layer::zero(INF)
    }

    pub fn mono(e: i64, x: Q, prec: i64) -> Self {
        Layer { lo: e, c: vec![x], prec }.trim()
    }

    pub fn from_coeffs(lo: i64, c: Vec<Q>, prec: i64) -> Self {
        Layer { lo, c, prec: prec.min(INF) }.trim()
    }

    /// Drop uncertified entries and strip zero ends.
    pub fn trim(mut self) -> Self {
        if self.prec >= INF {
            self.prec = INF;
        }
        let keep = (self.prec - self.lo).clamp(0, self.c.len() as i64) as usize;
        self.c.truncate(keep);
        while self.c.last().is_some_and(|x| x.is_zero()) {
            self.c.pop();
        }
        let lead = self.c.iter().take_while(|x| x.is_zero()).count();
        if lead > 0 {
            self.c.drain(..lead);
            self.lo += lead as i64;
        }
        if self.c.is_empty() {
            self.lo = 0;
        }
        self
    }

    pub fn is_empty(&self) -> bool {
        self.c.is_empty()
    }

    pub fn is_exact_zero(&self) -> bool {
        self.c.is_empty() && self.prec >= INF
    }

    pub fn is_exact(&self) -> bool {
        self.prec >= INF
    }

    /// Exclusive upper end of the stored range.
    pub fn hi(&self) -> i64 {
        self.lo + self.c.len() as i64
    }

    /// Lower bound for the true valuation.
    pub fn val(&self) -> i64 {
        if self.c.is_empty() {
            self.prec
        } else {
            self.lo
        }
    }

    pub fn coeff(&self, e: i64) -> Q {
        if e < self.lo || e >= self.hi() {
            Q::zero()
        } else {
            self.c[(e - self.lo) as usize].clone()
        }
    }

    pub fn coeff_ref(&self, e: i64) -> Option<&Q> {
        if e < self.lo || e >= self.hi() {
            None
        } else {
            Some(&self.c[(e - self.lo) as usize])
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &Q)> + '_ {
        self.c
            .iter()
            .enumerate()
            .filter(|(_, x)| !x.is_zero())
            .map(move |(k, x)| (self.lo + k as i64, x))
    }

    pub fn with_prec(mut self, p: i64) -> Self {
        self.prec = self.prec.min(p);
        self.trim()
    }

    pub fn add(&self, o: &Layer) -> Layer {
        let prec = self.prec.min(o.prec);
        if self.c.is_empty() {
            return o.clone().with_prec(prec);
        }
        if o.c.is_empty() {
            return self.clone().with_prec(prec);
        }
        let lo = self.lo.min(o.lo);
        let hi = self.hi().max(o.hi()).min(prec);
        if hi <= lo {
            return Layer::zero(prec);
        }
        let mut c = vec![Q::zero(); (hi - lo) as usize];
        for (e, x) in self.terms().chain(o.terms()) {
            if e < hi {
                c[(e - lo) as usize] += x;
            }
        }
        Layer::from_coeffs(lo, c, prec)
    }

    pub fn neg(&self) -> Layer {
        Layer { lo: self.lo, c: self.c.iter().map(|x| -x).collect(), prec: self.prec }
    }

    pub fn sub(&self, o: &Layer) -> Layer {
        self.add(&o.neg())
    }

    pub fn scale(&self, s: &Q) -> Layer {
        if s.is_zero() {
            return Layer::zero(self.prec);
        }
        Layer { lo: self.lo, c: self.c.iter().map(|x| x * s).collect(), prec: self.prec }
    }

    /// Multiply by `z^k`.
    pub fn zshift(&self, k: i64) -> Layer {
        let prec = if self.prec >= INF { INF } else { self.prec + k };
        Layer { lo: self.lo + k, c: self.c.clone(), prec }.trim()
    }

    pub fn mul_prec(&self, o: &Layer) -> i64 {
        sadd(self.val(), o.prec).min(sadd(o.val(), self.prec))
    }

    pub fn mul(&self, o: &Layer) -> Layer {
        let prec = self.mul_prec(o);
        if self.c.is_empty() || o.c.is_empty() {
            return Layer::zero(prec);
        }
        let lo = self.lo + o.lo;
        let hi = (self.hi() + o.hi() - 1).min(prec);
        if hi <= lo {
            return Layer::zero(prec);
        }
        let n = (hi - lo) as usize;
        let (a, da) = over_common_denom(&self.c);
        let (b, db) = over_common_denom(&o.c);
        let mut acc = vec![BigInt::zero(); n];
        for (i, x) in a.iter().enumerate().take(n) {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate().take(n - i) {
                if !y.is_zero() {
                    acc[i + j] += x * y;
                }
            }
        }
        let den = da * db;
        let c = acc.into_iter().map(|x| Q::new(x, den.clone())).collect();
        Layer::from_coeffs(lo, c, prec)
    }

    pub fn derive(&self) -> Layer {
        let prec = if self.prec >= INF { INF } else { self.prec - 1 };
        let mut c = Vec::with_capacity(self.c.len());
        for (k, x) in self.c.iter().enumerate() {
            let e = self.lo + k as i64;
            c.push(x * Q::from_integer(e.into()));
        }
        Layer::from_coeffs(self.lo - 1, c, prec)
    }

    /// Substitute `z -> -z`.
    pub fn reflect(&self) -> Layer {
        let c = self
            .c
            .iter()
            .enumerate()
            .map(|(k, x)| if (self.lo + k as i64).rem_euclid(2) == 1 { -x } else { x.clone() })
            .collect();
        Layer { lo: self.lo, c, prec: self.prec }
    }

    /// Inverse of a layer whose leading coefficient is certified and nonzero.
    /// Result is certified to `min(prec, zcap) - 2 v` with `v` the valuation.
    pub fn invert(&self, zcap: i64) -> Option<Layer> {
        if self.c.is_empty() {
            return None;
        }
        let v = self.lo;
        if self.c.len() == 1 && self.is_exact() {
            return Some(Layer::mono(-v, Q::one() / &self.c[0], INF));
        }
        let rel = self.prec.min(zcap + 2 * v) - v;
        let n = rel.max(0) as usize;
        let u0 = self.c[0].clone();
        let inv0 = Q::one() / &u0;
        let mut w: Vec<Q> = Vec::with_capacity(n);
        for k in 0..n {
            if k == 0 {
                w.push(inv0.clone());
                continue;
            }
            let mut s = Q::zero();
            for j in 1..=k.min(self.c.len() - 1) {
                if !self.c[j].is_zero() {
                    s += &self.c[j] * &w[k - j];
                }
            }
            w.push(-s * &inv0);
        }
        Some(Layer::from_coeffs(-v, w, rel - v))
    }

    pub fn is_certified_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn one() -> Layer {
        Layer::mono(0, Q::one(), INF)
    }
}
