use super::layer::Layer;
use super::{factorial, sadd, HSeries, Result, SeriesError, Window, Q, INF};
use num_traits::{One, Zero};

/// Which variable is primary: `I12` expands in nonnegative powers of `z2`
/// (region |z1| > |z2|), `I21` in powers of `z1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
pub enum Region {
    I12,
    I21,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RegionMode {
    Diff12,
    Diff21,
    Sum12,
}

/// One hbar order: rows indexed by the power of the secondary variable `w`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BiLayer {
    pub wlo: i64,
    pub rows: Vec<Layer>,
    pub wprec: i64,
}

impl BiLayer {
    pub fn exact_zero() -> Self {
        BiLayer { wlo: 0, rows: Vec::new(), wprec: INF }
    }

    fn trim(mut self) -> Self {
        let keep = (self.wprec - self.wlo).clamp(0, self.rows.len() as i64) as usize;
        self.rows.truncate(keep);
        while self.rows.last().is_some_and(Layer::is_exact_zero) {
            self.rows.pop();
        }
        let lead = self.rows.iter().take_while(|r| r.is_exact_zero()).count();
        if lead > 0 {
            self.rows.drain(..lead);
            self.wlo += lead as i64;
        }
        if self.rows.is_empty() {
            self.wlo = 0;
        }
        self
    }

    pub fn is_exact_zero(&self) -> bool {
        self.rows.is_empty() && self.wprec >= INF
    }

    pub fn whi(&self) -> i64 {
        self.wlo + self.rows.len() as i64
    }

    pub fn wval(&self) -> i64 {
        if self.rows.is_empty() {
            self.wprec
        } else {
            self.wlo
        }
    }

    pub fn row(&self, e: i64) -> Option<&Layer> {
        if e < self.wlo || e >= self.whi() {
            None
        } else {
            Some(&self.rows[(e - self.wlo) as usize])
        }
    }

    fn from_rows(wlo: i64, rows: Vec<Layer>, wprec: i64) -> Self {
        BiLayer { wlo, rows, wprec }.trim()
    }

    pub fn add(&self, o: &BiLayer) -> BiLayer {
        let wprec = self.wprec.min(o.wprec);
        if self.rows.is_empty() && o.rows.is_empty() {
            return BiLayer { wlo: 0, rows: Vec::new(), wprec };
        }
        let lo = if self.rows.is_empty() {
            o.wlo
        } else if o.rows.is_empty() {
            self.wlo
        } else {
            self.wlo.min(o.wlo)
        };
        let hi = self.whi().max(o.whi()).min(wprec);
        if hi <= lo {
            return BiLayer { wlo: 0, rows: Vec::new(), wprec };
        }
        let rows = (lo..hi)
            .map(|e| match (self.row(e), o.row(e)) {
                (Some(a), Some(b)) => a.add(b),
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => Layer::exact_zero(),
            })
            .collect();
        BiLayer::from_rows(lo, rows, wprec)
    }

    pub fn map_rows(&self, f: impl Fn(&Layer) -> Layer) -> BiLayer {
        BiLayer::from_rows(self.wlo, self.rows.iter().map(f).collect(), self.wprec)
    }

    pub fn mul(&self, o: &BiLayer) -> BiLayer {
        let wprec = sadd(self.wval(), o.wprec).min(sadd(o.wval(), self.wprec));
        if self.rows.is_empty() || o.rows.is_empty() {
            return BiLayer { wlo: 0, rows: Vec::new(), wprec };
        }
        let lo = self.wlo + o.wlo;
        let hi = (self.whi() + o.whi() - 1).min(wprec);
        if hi <= lo {
            return BiLayer { wlo: 0, rows: Vec::new(), wprec };
        }
        let mut rows = vec![Layer::exact_zero(); (hi - lo) as usize];
        for (i, a) in self.rows.iter().enumerate() {
            if a.is_exact_zero() {
                continue;
            }
            for (j, b) in o.rows.iter().enumerate() {
                let k = i + j;
                if k >= rows.len() {
                    break;
                }
                if b.is_exact_zero() {
                    continue;
                }
                rows[k] = rows[k].add(&a.mul(b));
            }
        }
        BiLayer::from_rows(lo, rows, wprec)
    }
}

/// Two-variable series: hbar-orders of (Laurent in `w`) x (Laurent in the primary variable).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BiSeries {
    pub region: Region,
    pub zcap: i64,
    pub layers: Vec<BiLayer>,
}

impl BiSeries {
    pub fn zero(region: Region, n: usize, zcap: i64) -> Self {
        BiSeries { region, zcap, layers: vec![BiLayer::exact_zero(); n + 1] }
    }

    pub fn one(region: Region, n: usize, zcap: i64) -> Self {
        let mut s = BiSeries::zero(region, n, zcap);
        s.layers[0] = BiLayer::from_rows(0, vec![Layer::one()], INF);
        s
    }

    pub fn cap(&self) -> usize {
        self.layers.len() - 1
    }

    /// a(primary).
    pub fn from_primary(region: Region, a: &HSeries) -> Self {
        BiSeries {
            region,
            zcap: a.zcap,
            layers: a.layers.iter().map(|l| BiLayer::from_rows(0, vec![l.clone()], INF)).collect(),
        }
    }

    /// a(w).
    pub fn from_secondary(region: Region, a: &HSeries) -> Self {
        let layers = a
            .layers
            .iter()
            .map(|l| {
                let rows = (l.lo..l.hi()).map(|e| Layer::mono(0, l.coeff(e), INF)).collect();
                BiLayer::from_rows(l.lo, rows, l.prec)
            })
            .collect();
        BiSeries { region, zcap: a.zcap, layers }
    }

    /// a(z1 - z2), a(z1 + z2) in |z1| > |z2|, or a(z1 - z2) in |z2| > |z1|.
    pub fn expand(a: &HSeries, mode: RegionMode, wcap: usize) -> Result<Self> {
        if wcap as i64 > a.zcap.max(0) + a.cap() as i64 + 8 {
            return Err(SeriesError::Precision(format!("w_cap {wcap} exceeds the context window")));
        }
        let region = if mode == RegionMode::Diff21 { Region::I21 } else { Region::I12 };
        let mut rows_by_k: Vec<Vec<Layer>> = vec![Vec::new(); a.cap() + 1];
        let mut d = a.clone();
        for e in 0..=wcap {
            let sign_neg = mode == RegionMode::Diff12 && e % 2 == 1;
            let s = if sign_neg { -Q::one() } else { Q::one() } / factorial(e);
            let piece = if mode == RegionMode::Diff21 { d.reflect() } else { d.clone() };
            for (k, l) in piece.layers.iter().enumerate() {
                rows_by_k[k].push(l.scale(&s));
            }
            d = d.derive();
        }
        let layers = rows_by_k.into_iter().map(|rows| BiLayer::from_rows(0, rows, wcap as i64 + 1)).collect();
        Ok(BiSeries { region, zcap: a.zcap, layers })
    }

    fn combine(&self, o: &BiSeries) -> usize {
        debug_assert_eq!(self.region, o.region, "mixed regions");
        self.cap().min(o.cap())
    }

    pub fn add(&self, o: &BiSeries) -> BiSeries {
        let n = self.combine(o);
        BiSeries {
            region: self.region,
            zcap: self.zcap.min(o.zcap),
            layers: (0..=n).map(|k| self.layers[k].add(&o.layers[k])).collect(),
        }
    }

    pub fn neg(&self) -> BiSeries {
        self.scale(&-Q::one())
    }

    pub fn sub(&self, o: &BiSeries) -> BiSeries {
        self.add(&o.neg())
    }

    pub fn scale(&self, s: &Q) -> BiSeries {
        BiSeries {
            region: self.region,
            zcap: self.zcap,
            layers: self.layers.iter().map(|l| l.map_rows(|r| r.scale(s))).collect(),
        }
    }

    pub fn mul(&self, o: &BiSeries) -> BiSeries {
        let n = self.combine(o);
        let mut layers = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let mut acc = BiLayer::exact_zero();
            for i in 0..=k {
                let (a, b) = (&self.layers[i], &o.layers[k - i]);
                if a.is_exact_zero() || b.is_exact_zero() {
                    continue;
                }
                acc = acc.add(&a.mul(b));
            }
            layers.push(acc);
        }
        BiSeries { region: self.region, zcap: self.zcap.min(o.zcap), layers }
    }

    pub fn is_zero_cert(&self) -> bool {
        self.layers.iter().all(|l| l.rows.iter().all(Layer::is_empty))
    }

    /// Certified window: hbar cap, lowest stored primary power, min primary
    /// ceiling over stored rows, and min w ceiling.
    pub fn window(&self) -> (Window, i64) {
        let mut w = Window { hbar_order: self.cap(), z_lo: 0, z_hi: INF };
        let mut wp = INF;
        for l in &self.layers {
            wp = wp.min(l.wprec);
            for r in &l.rows {
                w.z_hi = w.z_hi.min(r.prec);
                if !r.is_empty() {
                    w.z_lo = w.z_lo.min(r.lo);
                }
            }
        }
        (w, wp)
    }

    pub fn cert_eq(&self, o: &BiSeries) -> (bool, Window, i64) {
        let d = self.sub(o);
        let (w, wp) = d.window();
        (d.is_zero_cert(), w, wp)
    }

    /// Coefficient of `hbar^k z1^p1 z2^p2`; `None` if not certified.
    pub fn coeff(&self, k: usize, p1: i64, p2: i64) -> Option<Q> {
        let (prim, sec) = match self.region {
            Region::I12 => (p1, p2),
            Region::I21 => (p2, p1),
        };
        let l = self.layers.get(k)?;
        if sec >= l.wprec {
            return None;
        }
        match l.row(sec) {
            None => Some(Q::zero()),
            Some(r) => {
                if prim >= r.prec {
                    None
                } else {
                    Some(r.coeff(prim))
                }
            }
        }
    }

    /// Keep only the hbar^0 part.
    pub fn classical(&self) -> BiSeries {
        let mut s = BiSeries::zero(self.region, self.cap(), self.zcap);
        s.layers[0] = self.layers[0].clone();
        s
    }

    pub fn is_hbar_positive_zero(&self) -> bool {
        self.layers[1..].iter().all(|l| l.rows.iter().all(Layer::is_empty))
    }

    /// Nonzero terms `(k, p1, p2, coeff)`.
    pub fn terms(&self) -> Vec<(usize, i64, i64, Q)> {
        let mut out = Vec::new();
        for (k, l) in self.layers.iter().enumerate() {
            for (idx, r) in l.rows.iter().enumerate() {
                let sec = l.wlo + idx as i64;
                for (prim, x) in r.terms() {
                    let (p1, p2) = match self.region {
                        Region::I12 => (prim, sec),
                        Region::I21 => (sec, prim),
                    };
                    out.push((k, p1, p2, x.clone()));
                }
            }
        }
        out
    }

    pub fn constant_term(&self) -> Option<Q> {
        self.coeff(0, 0, 0)
    }

    pub fn is_one(&self) -> bool {
        let t = self.terms();
        t.len() == 1 && t[0].0 == 0 && t[0].1 == 0 && t[0].2 == 0 && t[0].3.is_one()
    }
}
