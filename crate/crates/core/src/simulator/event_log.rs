//! Line-oriented delivery log.
//!
//! ```text
//! # crnoma-aoi delivery log v1
//! # users=8 slot=1.5 window_start=1200 horizon=2400000
//! time user slot reset_age
//! 0 1 0 1.5
//! 13.5 1 1 1.5
//! ```
//!
//! One record per delivery. `user` and `slot` are 1-based; slot `0` marks the
//! initial state every user starts from at time zero. Floats are written in
//! shortest round-trip form, so parsing reproduces the in-memory log exactly.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::{Error, Result};

pub const MAGIC: &str = "# crnoma-aoi delivery log v1";
const COLUMNS: &str = "time user slot reset_age";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeliveryRecord {
    pub time: f64,
    pub user: usize,
    pub slot: usize,
    pub reset_age: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EventLog {
    pub users: usize,
    pub slot_duration: f64,
    pub window_start: f64,
    pub horizon: f64,
    pub records: Vec<DeliveryRecord>,
}

impl EventLog {
    pub fn for_user(&self, user: usize) -> impl Iterator<Item = &DeliveryRecord> {
        self.records.iter().filter(move |r| r.user == user)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(32 * self.records.len() + 128);
        let _ = writeln!(out, "{MAGIC}");
        let _ = writeln!(
            out,
            "# users={} slot={} window_start={} horizon={}",
            self.users, self.slot_duration, self.window_start, self.horizon
        );
        let _ = writeln!(out, "{COLUMNS}");
        for r in &self.records {
            let _ = writeln!(out, "{} {} {} {}", r.time, r.user, r.slot, r.reset_age);
        }
        out
    }

    pub fn write_to<W: std::io::Write>(&self, mut w: W) -> Result<()> {
        w.write_all(self.to_text().as_bytes())?;
        Ok(())
    }
}

fn field<T: FromStr>(line: usize, name: &str, raw: Option<&str>) -> Result<T> {
    let raw = raw.ok_or_else(|| Error::EventLog {
        line,
        msg: format!("missing `{name}`"),
    })?;
    raw.parse().map_err(|_| Error::EventLog {
        line,
        msg: format!("bad `{name}` value `{raw}`"),
    })
}

impl FromStr for EventLog {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
        match lines.next() {
            Some((_, l)) if l == MAGIC => {}
            _ => {
                return Err(Error::EventLog {
                    line: 1,
                    msg: "missing log header".into(),
                })
            }
        }
        let (meta_line, meta) = lines.next().ok_or(Error::EventLog {
            line: 2,
            msg: "missing metadata".into(),
        })?;
        let mut users = None;
        let mut slot = None;
        let mut window_start = None;
        let mut horizon = None;
        for kv in meta.trim_start_matches('#').split_whitespace() {
            let (k, v) = kv.split_once('=').ok_or_else(|| Error::EventLog {
                line: meta_line,
                msg: format!("expected key=value, got `{kv}`"),
            })?;
            match k {
                "users" => users = Some(field(meta_line, k, Some(v))?),
                "slot" => slot = Some(field(meta_line, k, Some(v))?),
                "window_start" => window_start = Some(field(meta_line, k, Some(v))?),
                "horizon" => horizon = Some(field(meta_line, k, Some(v))?),
                _ => {}
            }
        }
        let missing = |what: &str| Error::EventLog {
            line: meta_line,
            msg: format!("metadata lacks `{what}`"),
        };
        let mut log = EventLog {
            users: users.ok_or_else(|| missing("users"))?,
            slot_duration: slot.ok_or_else(|| missing("slot"))?,
            window_start: window_start.ok_or_else(|| missing("window_start"))?,
            horizon: horizon.ok_or_else(|| missing("horizon"))?,
            records: Vec::new(),
        };
        for (n, line) in lines {
            if line.is_empty() || line.starts_with('#') || line == COLUMNS {
                continue;
            }
            let mut parts = line.split_whitespace();
            let record = DeliveryRecord {
                time: field(n, "time", parts.next())?,
                user: field(n, "user", parts.next())?,
                slot: field(n, "slot", parts.next())?,
                reset_age: field(n, "reset_age", parts.next())?,
            };
            if parts.next().is_some() {
                return Err(Error::EventLog {
                    line: n,
                    msg: "trailing fields".into(),
                });
            }
            if record.user == 0 || record.user > log.users {
                return Err(Error::EventLog {
                    line: n,
                    msg: format!("user {} out of range", record.user),
                });
            }
            log.records.push(record);
        }
        Ok(log)
    }
}
