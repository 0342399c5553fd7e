//! Run records and their text and JSON renderings.

use std::fmt::{self, Write};

use serde::Serialize;

/// FNV-1a, fed through `fmt::Write` so values hash without allocation.
pub struct Fnv(pub u64);

impl Default for Fnv {
    fn default() -> Self {
        Fnv(0xcbf2_9ce4_8422_2325)
    }
}

impl Write for Fnv {
    fn write_str(&mut self, s: &str) -> fmt::Result {
        for b in s.bytes() {
            self.0 ^= u64::from(b);
            self.0 = self.0.wrapping_mul(0x0100_0000_01b3);
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum Termination {
    Deadlock,
    StepLimit,
    Converged,
    Error(String),
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Termination::Deadlock => f.write_str("deadlock"),
            Termination::StepLimit => f.write_str("stepLimit"),
            Termination::Converged => f.write_str("converged"),
            Termination::Error(e) => write!(f, "error: {e}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TraceEntry {
    pub step: usize,
    pub event: String,
    pub params: Vec<(String, String)>,
    pub pre_hash: String,
    pub post_hash: String,
    pub variant_before: Option<String>,
    pub variant_after: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Trace {
    pub seed: u64,
    pub entries: Vec<TraceEntry>,
    pub termination: Option<Termination>,
}

impl Trace {
    pub fn new(seed: u64) -> Self {
        Trace {
            seed,
            entries: Vec::new(),
            termination: None,
        }
    }

    /// Event names in firing order.
    pub fn events(&self) -> Vec<&str> {
        self.entries.iter().map(|e| e.event.as_str()).collect()
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("seed={}\n", self.seed);
        for e in &self.entries {
            let ps: Vec<String> = e.params.iter().map(|(n, v)| format!("{n}={v}")).collect();
            let _ = write!(out, "step {}: {}({})", e.step, e.event, ps.join(", "));
            if let (Some(a), Some(b)) = (&e.variant_before, &e.variant_after) {
                let _ = write!(out, " variant {a}→{b}");
            }
            out.push('\n');
        }
        if let Some(t) = &self.termination {
            let _ = writeln!(out, "termination={t}");
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("trace serializes")
    }
}
