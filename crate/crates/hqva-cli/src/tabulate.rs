//! CSV and aligned-text tables of exact coefficients.

use hqva::fock;
use hqva::series::{Q, Trunc, INF};
use hqva::structconst;
use hqva::tau::{self, fmt_q, CartanDatum, Comp};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn to_csv(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.join(","));
            s.push('\n');
        }
        s
    }

    pub fn to_text(&self) -> String {
        let mut w: Vec<usize> = self.header.iter().map(|h| h.len()).collect();
        for r in &self.rows {
            for (k, c) in r.iter().enumerate() {
                w[k] = w[k].max(c.len());
            }
        }
        let line = |cells: Vec<&str>| -> String {
            let v: Vec<String> = cells.iter().enumerate().map(|(k, c)| format!("{c:>width$}", width = w[k])).collect();
            v.join("  ").trim_end().to_string() + "\n"
        };
        let mut s = line(self.header.clone());
        for r in &self.rows {
            s.push_str(&line(r.iter().map(String::as_str).collect()));
        }
        s
    }
}

/// `i,j,component,hbar_order,z_power,value,z_prec` for every stored coefficient
/// of the level element (or of the cross-level element when `lp` is given).
pub fn tau_table(d: &CartanDatum, l: &Q, lp: Option<&Q>, t: Trunc) -> Result<Table, String> {
    let el = match lp {
        Some(lp) => tau::wh_pair(d, l, lp, t),
        None => tau::wh_ell(d, l, t),
    }
    .map_err(|e| e.to_string())?;
    let n = d.rank();
    let mut rows = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for c in Comp::ALL {
                let s = el.at(i, j).get(c);
                for (k, layer) in s.layers.iter().enumerate() {
                    let prec = if layer.prec >= INF { "exact".to_string() } else { layer.prec.to_string() };
                    for (e, x) in layer.terms() {
                        rows.push(vec![i.to_string(), j.to_string(), c.name(), k.to_string(), e.to_string(), fmt_q(x), prec.clone()]);
                    }
                }
            }
        }
    }
    Ok(Table { header: vec!["i", "j", "component", "hbar_order", "z_power", "value", "z_prec"], rows })
}

/// `i,j,k,t,hbar_order,value` of the Serre coefficients for the selected `k`
/// (all `k <= kcap` when none is given) and pairs.
pub fn serre_table(d: &CartanDatum, pair: Option<(usize, usize)>, k: Option<usize>, kcap: usize, hbar: usize) -> Result<Table, String> {
    let pairs = match pair {
        Some((i, j)) => {
            if i >= d.rank() || j >= d.rank() || i == j {
                return Err(format!("({i}, {j}) is not an off-diagonal index pair"));
            }
            vec![(i, j)]
        }
        None => structconst::serre_pairs(d, i64::MAX),
    };
    let ks: Vec<usize> = match k {
        Some(k) => vec![k],
        None => (0..=kcap).collect(),
    };
    let mut rows = Vec::new();
    for (i, j) in pairs {
        for &k in &ks {
            for t in 0..=k {
                let c = structconst::serre_coeff(d, i, j, k, t, hbar as i64 + 1).map_err(|e| e.to_string())?;
                for (h, x) in c.terms() {
                    rows.push(vec![i.to_string(), j.to_string(), k.to_string(), t.to_string(), h.to_string(), fmt_q(x)]);
                }
            }
        }
    }
    Ok(Table { header: vec!["i", "j", "k", "t", "hbar_order", "value"], rows })
}

/// `i,k,t,hbar_order,value` of the integrability coefficients.
pub fn integrability_table(d: &CartanDatum, i: Option<usize>, k: Option<usize>, kcap: usize, hbar: usize) -> Result<Table, String> {
    let is: Vec<usize> = match i {
        Some(i) if i < d.rank() => vec![i],
        Some(i) => return Err(format!("index {i} out of range")),
        None => (0..d.rank()).collect(),
    };
    let ks: Vec<usize> = match k {
        Some(k) => vec![k],
        None => (0..=kcap).collect(),
    };
    let mut rows = Vec::new();
    for i in is {
        for &k in &ks {
            for t in 0..=k {
                let c = structconst::int_coeff(d, i, k, t, hbar as i64 + 1).map_err(|e| e.to_string())?;
                for (h, x) in c.terms() {
                    rows.push(vec![i.to_string(), k.to_string(), t.to_string(), h.to_string(), fmt_q(x)]);
                }
            }
        }
    }
    Ok(Table { header: vec!["i", "k", "t", "hbar_order", "value"], rows })
}

/// `i,j,m,n,hbar_order,value` of the Fock-model mode brackets.
pub fn brackets_table(d: &CartanDatum, l: &Q, m_cap: usize, hbar: usize) -> Result<Table, String> {
    let ma = fock::derive_brackets(d, l, m_cap, hbar).map_err(|e| e.to_string())?;
    let mut rows = Vec::new();
    for (&(i, j, m, n), v) in &ma.table {
        for (k, x) in v.terms() {
            rows.push(vec![i.to_string(), j.to_string(), m.to_string(), n.to_string(), k.to_string(), fmt_q(x)]);
        }
    }
    Ok(Table { header: vec!["i", "j", "m", "n", "hbar_order", "value"], rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use hqva::series::q;

    #[test]
    fn tau_plus_minus_diagonal_row() {
        // z^{-1}(z + 2h) at level 1 for A1
        let tb = tau_table(&CartanDatum::a1(), &q(1), None, Trunc::new(3, 6)).unwrap();
        let pm: Vec<_> = tb.rows.iter().filter(|r| r[0] == "0" && r[1] == "0" && r[2] == "+-").collect();
        let cells: Vec<(&str, &str, &str)> = pm.iter().map(|r| (r[3].as_str(), r[4].as_str(), r[5].as_str())).collect();
        assert_eq!(cells, vec![("0", "0", "1"), ("1", "-1", "2")]);
    }

    #[test]
    fn serre_k0_is_one() {
        let tb = serre_table(&CartanDatum::a2(), Some((0, 1)), Some(0), 6, 4).unwrap();
        assert_eq!(tb.rows, vec![vec!["0", "1", "0", "0", "0", "1"]]);
    }

    #[test]
    fn brackets_csv_matches_mode_algebra() {
        let d = CartanDatum::a1();
        let tb = brackets_table(&d, &q(1), 3, 4).unwrap();
        assert_eq!(tb.to_csv(), fock::derive_brackets(&d, &q(1), 3, 4).unwrap().to_csv());
    }

    #[test]
    fn text_is_aligned() {
        let tb = Table { header: vec!["a", "bb"], rows: vec![vec!["100".into(), "1".into()]] };
        assert_eq!(tb.to_text(), "  a  bb\n100   1\n");
    }
}
