//! Check outcomes shared by every suite.

use crate::series::{Window, INF};
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Entry {
    pub suite: String,
    pub case: String,
    pub status: Status,
    pub hbar_order_certified: usize,
    /// Inclusive z window `[lo, hi]`; `hi = None` when every order is exact.
    pub z_window: (i64, Option<i64>),
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Entry {
    pub fn new(suite: &str, case: impl Into<String>, status: Status) -> Self {
        Entry {
            suite: suite.to_string(),
            case: case.into(),
            status,
            hbar_order_certified: 0,
            z_window: (0, None),
            detail: None,
        }
    }

    /// Outcome of an exact comparison. A window whose ceiling does not reach
    /// `need_hi` certifies too little and is reported as skipped.
    pub fn compared(suite: &str, case: impl Into<String>, ok: bool, w: Window, need_hi: i64) -> Self {
        let mut e = Entry::new(suite, case, if ok { Status::Pass } else { Status::Fail });
        e.hbar_order_certified = w.hbar_order;
        let lo = if w.z_lo == i64::MAX { 0 } else { w.z_lo };
        e.z_window = (lo, if w.z_hi >= INF { None } else { Some(w.z_hi - 1) });
        if ok && w.z_hi < INF && w.z_hi <= need_hi {
            e.status = Status::Skipped;
            e.detail = Some(format!("precision exhausted: certified below z^{} only", w.z_hi));
        }
        e
    }

    pub fn with_detail(mut self, d: impl Into<String>) -> Self {
        self.detail = Some(d.into());
        self
    }

    pub fn with_hbar(mut self, n: usize) -> Self {
        self.hbar_order_certified = n;
        self
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub skipped: usize,
}

impl Summary {
    pub fn of(entries: &[Entry]) -> Self {
        let mut s = Summary::default();
        for e in entries {
            match e.status {
                Status::Pass => s.pass += 1,
                Status::Fail => s.fail += 1,
                Status::Skipped => s.skipped += 1,
            }
        }
        s
    }
}

pub fn all_pass(entries: &[Entry]) -> bool {
    !entries.is_empty() && entries.iter().all(Entry::passed)
}

pub fn failures(entries: &[Entry]) -> Vec<&Entry> {
    entries.iter().filter(|e| !e.passed()).collect()
}
