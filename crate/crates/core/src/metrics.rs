//! Run counters, the five evaluation metrics and their CSV / text serialization.

use std::fmt::Write as _;

use crate::error::{Error, Result};

pub const CSV_HEADER: &str =
    "scenario,strategy,seed,rate,cache_frac,throughput,isr,drop_rate,mean_retrieval,cov_load";

/// Raw per-run counters collected by the engine.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunCounters {
    /// Interests issued by consumer applications.
    pub interests_sent: u64,
    /// Consumer Interests answered with Data.
    pub satisfied: u64,
    /// Consumer Interests whose PIT entry expired.
    pub timed_out: u64,
    /// Consumer Interests rejected by their own node before leaving it.
    pub interests_dropped: u64,
    /// Consumer Interests still outstanding when the run stopped.
    pub pending_at_end: u64,
    /// Arrivals skipped because the drawn name was already outstanding at that consumer.
    pub suppressed: u64,
    /// Packets dropped anywhere in the network (queue overflow, no route, malformed, link down).
    pub packets_dropped: u64,
    pub cache_hits: u64,
    pub unsolicited_data: u64,
    /// Sum of retrieval times over satisfied Interests, seconds.
    pub retrieval_time_total: f64,
    /// Interests forwarded upstream by each node counted for load balance.
    pub per_node_requests: Vec<u64>,
    pub events: u64,
}

impl RunCounters {
    /// `interests_sent = satisfied + timed_out + interests_dropped + pending_at_end`.
    pub fn reconciles(&self) -> bool {
        self.interests_sent
            == self.satisfied + self.timed_out + self.interests_dropped + self.pending_at_end
    }
}

/// Identifies the run a report belongs to.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunLabel {
    pub scenario: String,
    pub strategy: String,
    pub seed: u64,
    pub rate: f64,
    pub cache_frac: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub label: RunLabel,
    pub duration: f64,
    /// Data packets delivered to consumers per second.
    pub throughput: f64,
    /// Satisfied over sent consumer Interests; 0 when nothing was sent.
    pub isr: f64,
    /// Network packet drops per second.
    pub drop_rate: f64,
    /// Mean retrieval time in seconds; `None` when no Interest was satisfied.
    pub mean_retrieval: Option<f64>,
    pub cov_load: f64,
    pub counters: RunCounters,
}

/// Population standard deviation over mean. All-zero counts give 0.
pub fn coefficient_of_variation(counts: &[f64]) -> Result<f64> {
    if counts.is_empty() {
        return Err(Error::usage("coefficient of variation of an empty sample"));
    }
    if counts.iter().any(|c| !c.is_finite() || *c < 0.0) {
        return Err(Error::usage("counts must be finite and non-negative"));
    }
    let n = counts.len() as f64;
    let mean = counts.iter().sum::<f64>() / n;
    if mean == 0.0 {
        return Ok(0.0);
    }
    let var = counts.iter().map(|c| (c - mean) * (c - mean)).sum::<f64>() / n;
    Ok(var.sqrt() / mean)
}

pub fn finalize_report(label: RunLabel, counters: RunCounters, duration: f64) -> MetricsReport {
    let per_second = |x: u64| if duration > 0.0 { x as f64 / duration } else { 0.0 };
    let isr = if counters.interests_sent == 0 {
        0.0
    } else {
        counters.satisfied as f64 / counters.interests_sent as f64
    };
    let mean_retrieval = (counters.satisfied > 0)
        .then(|| counters.retrieval_time_total / counters.satisfied as f64);
    let loads: Vec<f64> = counters.per_node_requests.iter().map(|&c| c as f64).collect();
    let cov_load = if loads.is_empty() {
        0.0
    } else {
        coefficient_of_variation(&loads).expect("counts are non-negative")
    };
    MetricsReport {
        label,
        duration,
        throughput: per_second(counters.satisfied),
        isr,
        drop_rate: per_second(counters.packets_dropped),
        mean_retrieval,
        cov_load,
        counters,
    }
}

/// Formats like C's `%.6g`.
pub fn format_sig6(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    if !(-4..6).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{}e{sign}{:02}", trim_fraction(mantissa), exp.abs());
    }
    let decimals = (5 - exp) as usize;
    trim_fraction(&format!("{x:.decimals$}")).to_owned()
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReportFormat {
    #[default]
    Csv,
    Text,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "text" | "txt" => Ok(ReportFormat::Text),
            other => Err(Error::usage(format!("unknown report format {other:?}"))),
        }
    }
}

/// One CSV data row, without trailing newline.
pub fn csv_row(r: &MetricsReport) -> String {
    let l = &r.label;
    [
        csv_field(&l.scenario),
        csv_field(&l.strategy),
        l.seed.to_string(),
        format_sig6(l.rate),
        format_sig6(l.cache_frac),
        format_sig6(r.throughput),
        format_sig6(r.isr),
        format_sig6(r.drop_rate),
        format_sig6(r.mean_retrieval.unwrap_or(f64::NAN)),
        format_sig6(r.cov_load),
    ]
    .join(",")
}

/// Header plus one row per report.
pub fn write_csv(reports: &[MetricsReport]) -> Vec<u8> {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in reports {
        out.push_str(&csv_row(r));
        out.push('\n');
    }
    out.into_bytes()
}

pub fn write_report(report: &MetricsReport, format: ReportFormat) -> Vec<u8> {
    match format {
        ReportFormat::Csv => write_csv(std::slice::from_ref(report)),
        ReportFormat::Text => write_text(report).into_bytes(),
    }
}

fn write_text(r: &MetricsReport) -> String {
    let c = &r.counters;
    let mut s = String::new();
    let mut kv = |k: &str, v: String| {
        let _ = writeln!(s, "{k:<20} = {v}");
    };
    kv("scenario", r.label.scenario.clone());
    kv("strategy", r.label.strategy.clone());
    kv("seed", r.label.seed.to_string());
    kv("rate", format_sig6(r.label.rate));
    kv("cache_frac", format_sig6(r.label.cache_frac));
    kv("duration", format_sig6(r.duration));
    kv("throughput", format_sig6(r.throughput));
    kv("isr", format_sig6(r.isr));
    kv("drop_rate", format_sig6(r.drop_rate));
    kv("mean_retrieval", format_sig6(r.mean_retrieval.unwrap_or(f64::NAN)));
    kv("cov_load", format_sig6(r.cov_load));
    kv("interests_sent", c.interests_sent.to_string());
    kv("data_received", c.satisfied.to_string());
    kv("timeouts", c.timed_out.to_string());
    kv("interests_dropped", c.interests_dropped.to_string());
    kv("pending_at_end", c.pending_at_end.to_string());
    kv("suppressed", c.suppressed.to_string());
    kv("drops", c.packets_dropped.to_string());
    kv("cache_hits", c.cache_hits.to_string());
    kv("unsolicited_data", c.unsolicited_data.to_string());
    kv("events", c.events.to_string());
    let loads: Vec<String> = c.per_node_requests.iter().map(u64::to_string).collect();
    kv("node_requests", loads.join(" "));
    s
}

/// A parsed CSV data row.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvRecord {
    pub scenario: String,
    pub strategy: String,
    pub seed: u64,
    pub rate: f64,
    pub cache_frac: f64,
    pub throughput: f64,
    pub isr: f64,
    pub drop_rate: f64,
    pub mean_retrieval: f64,
    pub cov_load: f64,
}

/// Reads back CSV produced by [`write_csv`]. Quoted fields are not supported.
pub fn parse_csv(text: &str) -> Result<Vec<CsvRecord>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h == CSV_HEADER => {}
        _ => return Err(Error::parse(1, "missing CSV header")),
    }
    lines
        .filter(|(_, l)| !l.is_empty())
        .map(|(i, l)| {
            let f: Vec<&str> = l.split(',').collect();
            if f.len() != 10 {
                return Err(Error::parse(i + 1, format!("expected 10 fields, got {}", f.len())));
            }
            let num = |j: usize| -> Result<f64> {
                f[j].parse()
                    .map_err(|_| Error::parse(i + 1, format!("bad number {:?}", f[j])))
            };
            Ok(CsvRecord {
                scenario: f[0].to_owned(),
                strategy: f[1].to_owned(),
                seed: f[2].parse().map_err(|_| Error::parse(i + 1, "bad seed"))?,
                rate: num(3)?,
                cache_frac: num(4)?,
                throughput: num(5)?,
                isr: num(6)?,
                drop_rate: num(7)?,
                mean_retrieval: num(8)?,
                cov_load: num(9)?,
            })
        })
        .collect()
}
