//! Run reports and their projections to csv, dot and text.

use serde::Serialize;

pub const SCHEMA: &str = "coarse-ends-report/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Dot,
    Text,
}

/// Everything needed to rerun the command; the cache location is left out
/// because it never changes results.
#[derive(Debug, Clone, Serialize)]
pub struct ConfigEcho {
    pub group: String,
    pub gen_power: u32,
    pub rmax: u32,
    pub window: u32,
    pub span: u32,
    pub growth_span: u32,
    pub cap: usize,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tmax: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub set: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub annuli: Option<usize>,
}

#[derive(Debug, Serialize)]
pub struct RunReport<T: Serialize> {
    pub schema: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub config: ConfigEcho,
    pub warnings: Vec<String>,
    pub result: T,
}

impl<T: Serialize> RunReport<T> {
    pub fn new(command: &'static str, config: ConfigEcho, result: T) -> Self {
        RunReport {
            schema: SCHEMA,
            version: env!("CARGO_PKG_VERSION"),
            command,
            config,
            warnings: Vec::new(),
            result,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }
}

/// Comma-separated table with a header row.
pub fn csv(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Empty string for a missing value.
pub fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}
