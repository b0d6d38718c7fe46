use std::fs;
use std::io::Write;
use std::path::Path;

use qframes::frames::FrameRestriction;
use qframes::protocols::{self, Transcript};
use serde::{Deserialize, Serialize};

use crate::{Command, Format};

/// Everything a run depends on. Echoed verbatim into the report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub seed: u64,
    pub parties: usize,
    pub restriction: FrameRestriction,
    pub trials: u64,
    /// Random instances per sweep: networks, frame changes, gauge transforms.
    pub cycles: usize,
    pub refbits: bool,
    pub cheat: bool,
}

impl RunConfig {
    pub fn new(command: Command, seed: u64) -> Self {
        Self {
            command,
            seed,
            parties: 3,
            restriction: FrameRestriction::Full,
            trials: 100_000,
            cycles: 100,
            refbits: false,
            cheat: false,
        }
    }

    pub fn validate(&self) -> qframes::Result<()> {
        if self.trials == 0 {
            return Err(qframes::Error::Input("trials must be at least 1".into()));
        }
        if self.cycles == 0 {
            return Err(qframes::Error::Input("cycles must be at least 1".into()));
        }
        if !(2..=6).contains(&self.parties) {
            return Err(qframes::Error::Input("parties must lie between 2 and 6".into()));
        }
        Ok(())
    }
}

/// How a value is judged.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum Rule {
    /// `|value − expected| ≤ tolerance`.
    Equals { expected: f64, tolerance: f64 },
    /// `value < limit`.
    Below { limit: f64 },
    /// `value ≥ limit`.
    AtLeast { limit: f64 },
    /// `|value − center| ≤ half_width`.
    Within { center: f64, half_width: f64 },
    /// Recorded, not judged.
    Recorded,
}

impl Rule {
    fn holds(self, v: f64) -> bool {
        match self {
            Rule::Equals { expected, tolerance } => (v - expected).abs() <= tolerance,
            Rule::Below { limit } => v < limit,
            Rule::AtLeast { limit } => v >= limit,
            Rule::Within { center, half_width } => (v - center).abs() <= half_width,
            Rule::Recorded => true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Quantity {
    pub name: String,
    pub exact: f64,
    pub rule: Rule,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub empirical: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    pub pass: bool,
}

impl Quantity {
    pub fn judged(name: impl Into<String>, exact: f64, rule: Rule) -> Self {
        Self {
            name: name.into(),
            exact,
            rule,
            empirical: None,
            trials: None,
            sigma: None,
            pass: rule.holds(exact),
        }
    }

    pub fn equals(name: impl Into<String>, exact: f64, expected: f64, tolerance: f64) -> Self {
        Self::judged(name, exact, Rule::Equals { expected, tolerance })
    }

    pub fn below(name: impl Into<String>, exact: f64, limit: f64) -> Self {
        Self::judged(name, exact, Rule::Below { limit })
    }

    pub fn at_least(name: impl Into<String>, exact: f64, limit: f64) -> Self {
        Self::judged(name, exact, Rule::AtLeast { limit })
    }

    pub fn recorded(name: impl Into<String>, exact: f64) -> Self {
        Self::judged(name, exact, Rule::Recorded)
    }
}

impl From<protocols::Quantity> for Quantity {
    fn from(q: protocols::Quantity) -> Self {
        let rule = match q.expected {
            Some(expected) => Rule::Equals {
                expected,
                tolerance: protocols::runner::EXACT_TOL,
            },
            None => Rule::Recorded,
        };
        Self {
            name: q.name,
            exact: q.exact,
            rule,
            empirical: q.empirical,
            trials: q.trials,
            sigma: q.sigma,
            pass: q.pass,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub config: RunConfig,
    pub quantities: Vec<Quantity>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub transcripts: Vec<Transcript>,
    pub pass: bool,
    /// Seconds since the Unix epoch at report assembly.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
}

impl Report {
    pub fn new(config: RunConfig, quantities: Vec<Quantity>, transcripts: Vec<Transcript>) -> Self {
        let pass = quantities.iter().all(|q| q.pass);
        Self {
            config,
            quantities,
            transcripts,
            pass,
            timestamp: None,
        }
    }

    pub fn stamped(mut self) -> Self {
        self.timestamp = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .ok()
            .map(|d| d.as_secs());
        self
    }

    pub fn failures(&self) -> impl Iterator<Item = &Quantity> {
        self.quantities.iter().filter(|q| !q.pass)
    }

    pub fn to_json(&self) -> qframes::Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> qframes::Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_csv(&self) -> qframes::Result<String> {
        #[derive(Serialize)]
        struct Row<'a> {
            quantity: &'a str,
            exact: f64,
            empirical: Option<f64>,
            sigma: Option<f64>,
            pass: bool,
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        for q in &self.quantities {
            w.serialize(Row {
                quantity: &q.name,
                exact: q.exact,
                empirical: q.empirical,
                sigma: q.sigma,
                pass: q.pass,
            })
            .map_err(|e| qframes::Error::Io(e.into()))?;
        }
        let bytes = w.into_inner().map_err(|e| qframes::Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }

    pub fn render(&self, format: Format) -> qframes::Result<String> {
        match format {
            Format::Json => self.to_json(),
            Format::Csv => self.to_csv(),
        }
    }
}

/// Writes the report to `path`, or to standard output when absent.
pub fn report_write(report: &Report, format: Format, path: Option<&Path>) -> qframes::Result<()> {
    let mut text = report.render(format)?;
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match path {
        Some(p) => fs::write(p, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rules_judge_boundaries() {
        assert!(Rule::Equals { expected: 1.0, tolerance: 0.1 }.holds(1.05));
        assert!(!Rule::Below { limit: 1.0 }.holds(1.0));
        assert!(Rule::AtLeast { limit: 1.0 }.holds(1.0));
        assert!(!Rule::Within { center: 4.0, half_width: 0.5 }.holds(4.6));
        assert!(Rule::Recorded.holds(f64::NAN));
    }

    #[test]
    fn one_failure_fails_the_report() {
        let cfg = RunConfig::new(Command::Povm, 1);
        let r = Report::new(cfg, vec![Quantity::below("a", 0.0, 1.0), Quantity::below("b", 2.0, 1.0)], vec![]);
        assert!(!r.pass);
        assert_eq!(r.failures().map(|q| q.name.as_str()).collect::<Vec<_>>(), ["b"]);
    }

    #[test]
    fn validation_rejects_bad_sizes() {
        let ok = RunConfig::new(Command::Wilson, 0);
        assert!(ok.validate().is_ok());
        assert!(RunConfig { trials: 0, ..ok.clone() }.validate().is_err());
        assert!(RunConfig { parties: 1, ..ok.clone() }.validate().is_err());
        assert!(RunConfig { cycles: 0, ..ok }.validate().is_err());
    }
}
