//! Plain-text and porcelain reports.

use std::fmt::Write as _;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    /// Not run; does not fail the report.
    Skip,
}

impl Status {
    fn word(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skip => "SKIP",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Record {
    pub name: String,
    pub status: Status,
    /// `key=value` facts printed under the check line.
    pub facts: Vec<(String, String)>,
    /// Failure witness or skip reason.
    pub witness: Option<String>,
}

impl Record {
    pub fn pass(name: impl Into<String>) -> Self {
        Record {
            name: name.into(),
            status: Status::Pass,
            facts: Vec::new(),
            witness: None,
        }
    }

    pub fn fail(name: impl Into<String>, witness: impl Into<String>) -> Self {
        Record {
            status: Status::Fail,
            witness: Some(witness.into()),
            ..Record::pass(name)
        }
    }

    pub fn skip(name: impl Into<String>, reason: impl Into<String>) -> Self {
        Record {
            status: Status::Skip,
            witness: Some(format!("skipped: {}", reason.into())),
            ..Record::pass(name)
        }
    }

    pub fn check(name: impl Into<String>, ok: bool, witness: impl FnOnce() -> String) -> Self {
        if ok {
            Record::pass(name)
        } else {
            Record::fail(name, witness())
        }
    }

    pub fn fact(mut self, key: &str, value: impl ToString) -> Self {
        self.facts.push((key.to_string(), value.to_string()));
        self
    }
}

#[derive(Clone, Debug, Default)]
pub struct Report {
    pub command: String,
    pub records: Vec<Record>,
}

impl Report {
    pub fn new(command: impl Into<String>) -> Self {
        Report {
            command: command.into(),
            records: Vec::new(),
        }
    }

    pub fn push(&mut self, r: Record) -> Status {
        let s = r.status;
        self.records.push(r);
        s
    }

    pub fn passed(&self) -> bool {
        self.records.iter().all(|r| r.status != Status::Fail)
    }

    pub fn record(&self, name: &str) -> Option<&Record> {
        self.records.iter().find(|r| r.name == name)
    }

    pub fn render(&self) -> String {
        let mut out = format!("jetcert {}\n", self.command);
        for r in &self.records {
            let _ = writeln!(out, "CHECK {}: {}", r.name, r.status.word());
            for (k, v) in &r.facts {
                let _ = writeln!(out, "    {k}: {v}");
            }
            if let Some(w) = &r.witness {
                for line in w.lines() {
                    let _ = writeln!(out, "    {line}");
                }
            }
        }
        let _ = writeln!(out, "RESULT: {}", if self.passed() { "PASS" } else { "FAIL" });
        out
    }

    /// One `key=value` record per line; values have newlines escaped.
    pub fn render_porcelain(&self) -> String {
        let esc = |s: &str| s.replace('\\', "\\\\").replace('\n', "\\n");
        let mut out = format!("command={}\n", esc(&self.command));
        for r in &self.records {
            let _ = writeln!(out, "check={} status={}", r.name, r.status.word().to_lowercase());
            for (k, v) in &r.facts {
                let _ = writeln!(out, "check={} {k}={}", r.name, esc(v));
            }
            if let Some(w) = &r.witness {
                let _ = writeln!(out, "check={} witness={}", r.name, esc(w));
            }
        }
        let _ = writeln!(out, "result={}", if self.passed() { "pass" } else { "fail" });
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rendering() {
        let mut r = Report::new("smooth --variety @cusp");
        r.push(Record::pass("parse").fact("variables", 2));
        r.push(Record::fail("smooth", "singular locus is nonempty\nsecond line"));
        r.push(Record::skip("extra", "nothing to do"));
        assert!(!r.passed());
        assert_eq!(
            r.render(),
            "jetcert smooth --variety @cusp\nCHECK parse: PASS\n    variables: 2\nCHECK smooth: FAIL\n    singular locus is nonempty\n    second line\nCHECK extra: SKIP\n    skipped: nothing to do\nRESULT: FAIL\n"
        );
        let p = r.render_porcelain();
        assert!(p.contains("check=smooth witness=singular locus is nonempty\\nsecond line\n"));
        assert!(p.ends_with("result=fail\n"));
    }

    #[test]
    fn skips_do_not_fail() {
        let mut r = Report::new("x");
        r.push(Record::skip("a", "b"));
        assert!(r.passed());
    }
}
