//! Structured verification results: a flat list of named checks with
//! pass/fail status and an optional counterexample witness.

use std::fmt;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Skipped => "skipped",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug)]
pub struct Check {
    pub name: String,
    /// Short name of the identity the check verifies
    /// (e.g. "half-periodicity u+r+1+l").
    pub law: String,
    pub status: Status,
    pub witness: Option<String>,
    /// Populated only when timing collection is enabled, so that default
    /// report output stays byte-identical across runs.
    pub wall_time_ms: Option<u64>,
}

#[derive(Clone, Debug, Default)]
pub struct Report {
    pub job: String,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(job: impl Into<String>) -> Self {
        Report {
            job: job.into(),
            checks: Vec::new(),
        }
    }

    pub fn check(
        &mut self,
        name: impl Into<String>,
        law: impl Into<String>,
        ok: bool,
        witness: impl FnOnce() -> String,
    ) {
        self.checks.push(Check {
            name: name.into(),
            law: law.into(),
            status: if ok { Status::Pass } else { Status::Fail },
            witness: if ok { None } else { Some(witness()) },
            wall_time_ms: None,
        });
    }

    pub fn skip(&mut self, name: impl Into<String>, law: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            law: law.into(),
            status: Status::Skipped,
            witness: None,
            wall_time_ms: None,
        });
    }

    pub fn merge(&mut self, other: Report) {
        self.checks.extend(other.checks);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.status == Status::Fail)
    }

    pub fn to_json(&self) -> serde_json::Value {
        use serde_json::json;
        json!({
            "schema": 1,
            "job": self.job,
            "passed": self.passed(),
            "checks": self.checks.iter().map(|c| json!({
                "name": c.name,
                "law": c.law,
                "status": c.status.to_string(),
                "witness": c.witness,
                "wall_time_ms": c.wall_time_ms,
            })).collect::<Vec<_>>(),
        })
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[{}] {}", if self.passed() { "ok" } else { "FAIL" }, self.job)?;
        for c in &self.checks {
            writeln!(f, "  {}: {} ({})", c.status, c.name, c.law)?;
            if let Some(w) = &c.witness {
                writeln!(f, "    witness: {w}")?;
            }
        }
        Ok(())
    }
}
