//! Result lines for the acceptance target.

use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub id: u32,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    pub fn new(id: u32, name: &'static str, pass: bool, detail: impl Into<String>) -> Self {
        Check { id, name, pass, detail: detail.into() }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.pass { "PASS" } else { "FAIL" };
        write!(f, "[{verdict}] {:>2} {:<16} {}", self.id, self.name, self.detail)
    }
}

/// Criteria expected to fail, with the reason; an unexpected pass is also an error.
#[derive(Debug, Clone, Copy)]
pub struct KnownRed {
    pub id: u32,
    pub reason: &'static str,
}

/// Exit status of the run: every criterion passes except the listed ones, which must fail.
pub fn summarize(checks: &[Check], known_red: &[KnownRed]) -> Result<(), String> {
    let mut problems = Vec::new();
    for c in checks {
        let red = known_red.iter().find(|k| k.id == c.id);
        match (c.pass, red) {
            (false, None) => problems.push(format!("criterion {} failed", c.id)),
            (true, Some(_)) => problems.push(format!("criterion {} is listed as known red but passed", c.id)),
            _ => {}
        }
    }
    if problems.is_empty() {
        Ok(())
    } else {
        Err(problems.join("; "))
    }
}
