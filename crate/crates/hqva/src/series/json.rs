use super::{HSeries, Layer, QSeries, Q, INF};
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use std::str::FromStr;

/// Wire form: `terms` rows are `[hbar_order, z_power, numerator, denominator]`,
/// with numerator and denominator as decimal strings; `prec[k]` is the
/// exclusive z ceiling of order `k`, `null` when exact.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HSeriesJson {
    pub hbar_cap: usize,
    pub terms: Vec<(usize, i64, String, String)>,
    pub prec: Vec<Option<i64>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QSeriesJson {
    pub hbar_cap: i64,
    pub terms: Vec<(i64, String, String)>,
}

fn parse_q(n: &str, d: &str) -> Option<Q> {
    Some(Q::new(BigInt::from_str(n).ok()?, BigInt::from_str(d).ok()?))
}

impl From<&HSeries> for HSeriesJson {
    fn from(s: &HSeries) -> Self {
        let mut terms = Vec::new();
        for (k, l) in s.layers.iter().enumerate() {
            for (e, x) in l.terms() {
                terms.push((k, e, x.numer().to_string(), x.denom().to_string()));
            }
        }
        HSeriesJson {
            hbar_cap: s.cap(),
            terms,
            prec: s.layers.iter().map(|l| if l.prec >= INF { None } else { Some(l.prec) }).collect(),
        }
    }
}

impl HSeriesJson {
    pub fn to_series(&self, zcap: i64) -> Option<HSeries> {
        if self.prec.len() != self.hbar_cap + 1 {
            return None;
        }
        let mut layers: Vec<Layer> = self.prec.iter().map(|p| Layer::zero(p.unwrap_or(INF))).collect();
        for (k, e, n, d) in &self.terms {
            let x = parse_q(n, d)?;
            let l = layers.get_mut(*k)?;
            *l = l.add(&Layer::mono(*e, x, INF));
        }
        Some(HSeries { zcap, layers })
    }
}

impl From<&QSeries> for QSeriesJson {
    fn from(s: &QSeries) -> Self {
        QSeriesJson {
            hbar_cap: s.cap(),
            terms: s.terms().map(|(k, x)| (k, x.numer().to_string(), x.denom().to_string())).collect(),
        }
    }
}

impl QSeriesJson {
    pub fn to_series(&self) -> Option<QSeries> {
        let mut l = Layer::zero(self.hbar_cap + 1);
        for (k, n, d) in &self.terms {
            l = l.add(&Layer::mono(*k, parse_q(n, d)?, INF));
        }
        Some(QSeries::from_layer(l))
    }
}
