//! Suite dispatch and report assembly.

use crate::config::{Plan, RunConfig};
use hqva::fock;
use hqva::genspace::{self, Side, Tables};
use hqva::report::{Entry, Status, Summary};
use hqva::structconst;
use hqva::tau;
use serde::Serialize;
use std::time::Instant;

#[derive(Clone, Debug, Serialize)]
pub struct SuiteSummary {
    pub suite: String,
    #[serde(flatten)]
    pub counts: Summary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<u128>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub seed: u64,
    pub config: RunConfig,
    pub suites: Vec<SuiteSummary>,
    pub summary: Summary,
    pub entries: Vec<Entry>,
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.summary.fail == 0 && self.summary.skipped == 0 && self.summary.pass > 0
    }
}

const TABLE_SUITES: [&str; 5] = ["unitarity", "qyb", "intertwine", "s-delta", "classical-limit"];

fn run_one(cfg: &RunConfig, plan: &Plan, tables: Option<&Result<Tables, String>>, suite: &str) -> Vec<Entry> {
    let d = &plan.datum;
    let t = plan.trunc;
    let corrupt = cfg.corrupt.then_some(cfg.seed);
    let tb = || -> Result<&Tables, Entry> {
        match tables {
            Some(Ok(x)) => Ok(x),
            Some(Err(e)) => Err(Entry::new(suite, format!("{};tables", d.label()), Status::Fail).with_detail(e.clone())),
            None => Err(Entry::new(suite, format!("{};tables", d.label()), Status::Fail).with_detail("tables not built")),
        }
    };
    let pairs = &plan.pairs;
    let [l1, l2, l3] = &plan.triple;
    let tri = [l1, l2, l3];
    match suite {
        "tau-tech1" => {
            let mut out: Vec<Entry> = pairs.iter().flat_map(|(a, b)| tau::tech1_suite(d, a, b, t, corrupt)).collect();
            for l in &plan.levels {
                out.extend(tau::check_local_h2(d, l, t, cfg.bracket_variant));
            }
            out
        }
        "unitarity" => match tb() {
            Ok(tb) => {
                let mut out: Vec<Entry> = pairs.iter().flat_map(|(a, b)| genspace::check_unitarity(tb, a, b)).collect();
                for l in plan.levels.iter().filter(|l| !pairs.iter().any(|(a, b)| a == *l && b == *l)) {
                    out.extend(genspace::check_unitarity(tb, l, l));
                }
                out
            }
            Err(e) => vec![e],
        },
        "qyb" => match tb() {
            Ok(tb) => genspace::check_qyb(tb, tri, cfg.truncation.bivar_cap),
            Err(e) => vec![e],
        },
        "intertwine" => match tb() {
            Ok(tb) => {
                let mut out = genspace::check_intertwine(tb, Side::Left, tri);
                out.extend(genspace::check_intertwine(tb, Side::Right, tri));
                out
            }
            Err(e) => vec![e],
        },
        "s-delta" => match tb() {
            Ok(tb) => pairs.iter().flat_map(|(a, b)| genspace::check_s_on_coproduct(tb, a, b)).collect(),
            Err(e) => vec![e],
        },
        "classical-limit" => match tb() {
            Ok(tb) => pairs.iter().flat_map(|(a, b)| genspace::check_classical(tb, a, b)).collect(),
            Err(e) => vec![e],
        },
        "serre" => structconst::check_serre(d, cfg.truncation.struct_kcap, 3, t.hbar),
        "integrability" => structconst::check_integrability(d, &plan.levels, cfg.truncation.struct_kcap, t.hbar),
        "fock-com" => plan.levels.iter().flat_map(|l| fock::check_com_suite(d, l, &plan.fock)).collect(),
        "fock-YE" => plan.levels.iter().flat_map(|l| fock::check_ye(d, l, &plan.fock, plan.fock.degree)).collect(),
        "fock-e-coproduct" => pairs.iter().flat_map(|(a, b)| fock::check_e_coproduct(d, a, b, &plan.fock)).collect(),
        "fock-brackets" => pairs.iter().flat_map(|(a, b)| fock::check_brackets(d, a, b, plan.fock.modes, t.hbar)).collect(),
        other => vec![Entry::new(other, "unregistered", Status::Fail)],
    }
}

/// Run the selected suites in order. With `timings`, per-suite wall time is
/// recorded (and the report is no longer reproducible byte for byte).
pub fn run_suite(cfg: &RunConfig, plan: &Plan, timings: bool) -> Report {
    let corrupt = cfg.corrupt.then_some(cfg.seed);
    let tables = plan
        .suites
        .iter()
        .any(|s| TABLE_SUITES.contains(&s.as_str()))
        .then(|| Tables::build(&plan.datum, &plan.table_levels(), plan.trunc, corrupt).map_err(|e| e.to_string()));
    let mut entries = Vec::new();
    let mut suites = Vec::new();
    for s in &plan.suites {
        let t0 = Instant::now();
        let es = run_one(cfg, plan, tables.as_ref(), s);
        let ms = t0.elapsed().as_millis();
        suites.push(SuiteSummary { suite: s.clone(), counts: Summary::of(&es), wall_time_ms: timings.then_some(ms) });
        entries.extend(es);
    }
    Report {
        tool: "hqva",
        version: env!("CARGO_PKG_VERSION"),
        seed: cfg.seed,
        config: cfg.clone(),
        suites,
        summary: Summary::of(&entries),
        entries,
    }
}

/// One line per suite plus the failing cases.
pub fn text_summary(r: &Report) -> String {
    let mut s = String::new();
    for x in &r.suites {
        let st = if x.counts.fail == 0 && x.counts.skipped == 0 { "PASS" } else { "FAIL" };
        s.push_str(&format!("{st} {:<18} pass={} fail={} skipped={}\n", x.suite, x.counts.pass, x.counts.fail, x.counts.skipped));
    }
    for e in r.entries.iter().filter(|e| !e.passed()) {
        let st = if e.status == Status::Fail { "fail" } else { "skipped" };
        s.push_str(&format!("  {st} {} {}", e.suite, e.case));
        if let Some(d) = &e.detail {
            s.push_str(&format!(" ({d})"));
        }
        s.push('\n');
    }
    s
}
