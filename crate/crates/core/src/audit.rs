//! Named pass/fail checks shared by the artifact verifiers.

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Audit {
    pub checks: Vec<Check>,
}

impl Audit {
    pub fn push(&mut self, name: &str, pass: bool, detail: Option<String>) {
        self.checks.push(Check { name: name.to_string(), pass, detail });
    }

    pub fn pass(&mut self, name: &str) {
        self.push(name, true, None);
    }

    pub fn fail(&mut self, name: &str, detail: String) {
        self.push(name, false, Some(detail));
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn passed(&self, name: &str) -> bool {
        self.get(name).is_some_and(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }
}
