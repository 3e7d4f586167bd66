//! Scenario files.
//!
//! One `key = value` per line, `#` starts a comment. Strategy parameters live under a
//! `[strategy]` header and are addressed as `strategy.<key>` in overrides.
//!
//! ```text
//! name = grid-demo
//! topology = grid:3x3          # or a path relative to this file
//! consumers = n0, n2
//! producers = n7
//! strategy = drr-mdpf
//! interest_rate = 2000
//! cache_fraction = 0.1
//!
//! [strategy]
//! lambda_r = 0.9
//! reward_mode = as-written
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::node::StrategyKind;
use crate::sim::{Arrivals, BuiltinTopology, LinkDown, Scenario, TopologySource};
use crate::strategy::{RewardMode, SelectionMode};

const KEYS: &[&str] = &[
    "name",
    "topology",
    "consumers",
    "producers",
    "link_bandwidth",
    "link_delay_ms",
    "routing",
    "catalog_size",
    "content_classes",
    "zipf_exponent",
    "interest_rate",
    "arrivals",
    "max_interests",
    "cache_fraction",
    "duration",
    "drain",
    "strategy",
    "seed",
    "quantum",
    "queue_capacity",
    "pit_timeout",
    "interest_size",
    "data_size",
    "link_down",
    "max_events",
    "strategy.lambda_r",
    "strategy.lambda_smooth",
    "strategy.reward_mode",
    "strategy.selection_mode",
];

const SECTIONS: &[&str] = &["strategy"];

/// Where a value came from, for error messages.
#[derive(Debug, Clone, Copy)]
enum Origin {
    Line(usize),
    Override,
}

impl Origin {
    fn error(self, key: &str, msg: impl std::fmt::Display) -> Error {
        match self {
            Origin::Line(line) => Error::parse(line, format!("{key}: {msg}")),
            Origin::Override => Error::usage(format!("override {key}: {msg}")),
        }
    }
}

/// Splits `key=value` as given on a command line.
pub fn parse_override(arg: &str) -> Result<(String, String)> {
    let (k, v) = arg
        .split_once('=')
        .ok_or_else(|| Error::usage(format!("override {arg:?} is not key=value")))?;
    let k = k.trim();
    if k.is_empty() {
        return Err(Error::usage(format!("override {arg:?} has an empty key")));
    }
    Ok((k.to_owned(), v.trim().to_owned()))
}

fn collect(text: &str) -> Result<BTreeMap<String, (String, Origin)>> {
    let mut map = BTreeMap::new();
    let mut section: Option<&str> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let stmt = raw.split('#').next().unwrap_or("").trim();
        if stmt.is_empty() {
            continue;
        }
        if let Some(rest) = stmt.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .map(str::trim)
                .ok_or_else(|| Error::parse(line, format!("malformed section header {stmt:?}")))?;
            if !SECTIONS.contains(&name) {
                return Err(Error::parse(line, format!("unknown section [{name}]")));
            }
            section = Some(SECTIONS.iter().find(|s| **s == name).unwrap());
            continue;
        }
        let (k, v) = stmt
            .split_once('=')
            .ok_or_else(|| Error::parse(line, format!("expected `key = value`, got {stmt:?}")))?;
        let key = match section {
            Some(s) => format!("{s}.{}", k.trim()),
            None => k.trim().to_owned(),
        };
        if !KEYS.contains(&key.as_str()) {
            return Err(Error::parse(line, format!("unknown key {key:?}")));
        }
        let value = v.trim().to_owned();
        if map.insert(key.clone(), (value, Origin::Line(line))).is_some() {
            return Err(Error::parse(line, format!("duplicate key {key:?}")));
        }
    }
    Ok(map)
}

fn value<T: FromStr>(key: &str, v: &str, origin: Origin) -> Result<T> {
    v.parse()
        .map_err(|_| origin.error(key, format!("cannot parse {v:?} as {}", std::any::type_name::<T>())))
}

fn list(v: &str) -> Vec<String> {
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_owned)
        .collect()
}

fn parse_bool(key: &str, v: &str, origin: Origin) -> Result<bool> {
    match v {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(origin.error(key, format!("expected true or false, got {v:?}"))),
    }
}

impl FromStr for RewardMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "as-written" => Ok(RewardMode::AsWritten),
            "qualitative" => Ok(RewardMode::Qualitative),
            _ => Err(Error::usage(format!("unknown reward mode {s:?}"))),
        }
    }
}

impl FromStr for SelectionMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "argmax" => Ok(SelectionMode::Argmax),
            "sample" => Ok(SelectionMode::Sample),
            _ => Err(Error::usage(format!("unknown selection mode {s:?}"))),
        }
    }
}

fn reward_label(m: RewardMode) -> &'static str {
    match m {
        RewardMode::AsWritten => "as-written",
        RewardMode::Qualitative => "qualitative",
    }
}

fn selection_label(m: SelectionMode) -> &'static str {
    match m {
        SelectionMode::Argmax => "argmax",
        SelectionMode::Sample => "sample",
    }
}

fn topology_source(v: &str, base: Option<&Path>) -> TopologySource {
    let builtin = v
        .split_once(':')
        .is_some_and(|(k, _)| matches!(k, "line" | "grid" | "tree" | "random"));
    if builtin {
        if let Ok(b) = v.parse() {
            return TopologySource::Builtin(b);
        }
    }
    match base {
        Some(dir) => TopologySource::File(dir.join(v)),
        None => TopologySource::File(v.into()),
    }
}

fn build(map: BTreeMap<String, (String, Origin)>, base: Option<&Path>) -> Result<Scenario> {
    let mut s = Scenario::default();
    if !map.contains_key("topology") {
        return Err(Error::parse(1, "missing required key \"topology\""));
    }
    for (key, (v, origin)) in &map {
        let (v, o, k) = (v.as_str(), *origin, key.as_str());
        match k {
            "name" => {
                if v.is_empty() || v.contains([',', '"']) {
                    return Err(o.error(k, "must be non-empty without commas or quotes"));
                }
                s.name = v.to_owned();
            }
            "topology" => {
                if v.is_empty() {
                    return Err(o.error(k, "empty topology"));
                }
                if v.split_once(':').is_some_and(|(k, _)| matches!(k, "line" | "grid" | "tree" | "random"))
                    && v.parse::<BuiltinTopology>().is_err()
                {
                    return Err(o.error(k, format!("invalid generator {v:?}")));
                }
                s.topology = topology_source(v, base);
            }
            "consumers" => s.consumers = list(v),
            "producers" => s.producers = list(v),
            "link_bandwidth" => s.link.bandwidth_bps = value(k, v, o)?,
            "link_delay_ms" => s.link.delay = value::<f64>(k, v, o)? / 1000.0,
            "routing" => s.routing = v.parse().map_err(|e| o.error(k, e))?,
            "catalog_size" => s.catalog_size = value(k, v, o)?,
            "content_classes" => s.content_classes = value(k, v, o)?,
            "zipf_exponent" => s.zipf_exponent = value(k, v, o)?,
            "interest_rate" => s.interest_rate = value(k, v, o)?,
            "arrivals" => {
                s.arrivals = match v {
                    "poisson" => Arrivals::Poisson,
                    "constant" => Arrivals::Constant,
                    _ => return Err(o.error(k, "expected poisson or constant")),
                }
            }
            "max_interests" => {
                s.max_interests = match v {
                    "none" => None,
                    _ => Some(value(k, v, o)?),
                }
            }
            "cache_fraction" => {
                let x: f64 = value(k, v, o)?;
                if !(0.0..=1.0).contains(&x) {
                    return Err(o.error(k, format!("{x} is outside [0, 1]")));
                }
                s.cache_fraction = x;
            }
            "duration" => s.duration = value(k, v, o)?,
            "drain" => s.drain = parse_bool(k, v, o)?,
            "strategy" => {
                s.strategy = v.parse::<StrategyKind>().map_err(|e| o.error(k, e))?;
            }
            "seed" => s.seed = value(k, v, o)?,
            "quantum" => s.quantum = value(k, v, o)?,
            "queue_capacity" => s.queue_capacity = value(k, v, o)?,
            "pit_timeout" => s.pit_timeout = value(k, v, o)?,
            "interest_size" => s.interest_size = value(k, v, o)?,
            "data_size" => s.data_size = value(k, v, o)?,
            "link_down" => {
                s.link_down = match v {
                    "none" => None,
                    _ => {
                        let w: Vec<&str> = v.split_whitespace().collect();
                        let [a, b, at] = w[..] else {
                            return Err(o.error(k, "expected `<node> <node> <seconds>`"));
                        };
                        Some(LinkDown {
                            a: a.to_owned(),
                            b: b.to_owned(),
                            at: value(k, at, o)?,
                        })
                    }
                }
            }
            "max_events" => s.max_events = value(k, v, o)?,
            "strategy.lambda_r" => s.params.lambda_r = value(k, v, o)?,
            "strategy.lambda_smooth" => s.params.lambda_smooth = value(k, v, o)?,
            "strategy.reward_mode" => s.params.reward_mode = v.parse().map_err(|e| o.error(k, e))?,
            "strategy.selection_mode" => {
                s.params.selection_mode = v.parse().map_err(|e| o.error(k, e))?
            }
            _ => unreachable!("keys are checked on collection"),
        }
        // Defaults are valid, so the first failing check belongs to the key just set.
        s.validate().map_err(|e| o.error(k, e))?;
    }
    Ok(s)
}

/// Parses scenario text. File topologies are taken as given.
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    parse_scenario_with(text, None, &[])
}

/// Parses scenario text, resolving topology paths against `base` and applying `key=value`
/// overrides exactly as if the file had said so.
pub fn parse_scenario_with(
    text: &str,
    base: Option<&Path>,
    overrides: &[(String, String)],
) -> Result<Scenario> {
    let mut map = collect(text)?;
    for (k, v) in overrides {
        if !KEYS.contains(&k.as_str()) {
            return Err(Error::usage(format!("unknown override key {k:?}")));
        }
        map.insert(k.clone(), (v.clone(), Origin::Override));
    }
    build(map, base)
}

/// Reads a scenario file. The scenario name defaults to the file stem.
pub fn load_scenario(path: &Path, overrides: &[(String, String)]) -> Result<Scenario> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut s = parse_scenario_with(&text, path.parent(), overrides)?;
    let named = text
        .lines()
        .any(|l| l.split('#').next().unwrap_or("").trim_start().starts_with("name"))
        || overrides.iter().any(|(k, _)| k == "name");
    if !named {
        if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
            s.name = stem.to_owned();
        }
    }
    Ok(s)
}

/// Writes every field so that [`parse_scenario`] reproduces `s` exactly.
pub fn dump_scenario(s: &Scenario) -> Result<String> {
    let topology = match &s.topology {
        TopologySource::File(p) => p
            .to_str()
            .ok_or_else(|| Error::usage("topology path is not UTF-8"))?
            .to_owned(),
        TopologySource::Builtin(b) => b.to_string(),
        TopologySource::Inline(_) => {
            return Err(Error::usage("an inline topology cannot be written to a scenario file"))
        }
    };
    let mut out = String::new();
    let mut kv = |k: &str, v: String| {
        let _ = writeln!(out, "{k} = {v}");
    };
    kv("name", s.name.clone());
    kv("topology", topology);
    kv("consumers", s.consumers.join(", "));
    kv("producers", s.producers.join(", "));
    kv("link_bandwidth", s.link.bandwidth_bps.to_string());
    kv("link_delay_ms", (s.link.delay * 1000.0).to_string());
    kv("routing", s.routing.label().into());
    kv("catalog_size", s.catalog_size.to_string());
    kv("content_classes", s.content_classes.to_string());
    kv("zipf_exponent", s.zipf_exponent.to_string());
    kv("interest_rate", s.interest_rate.to_string());
    kv(
        "arrivals",
        match s.arrivals {
            Arrivals::Poisson => "poisson",
            Arrivals::Constant => "constant",
        }
        .into(),
    );
    kv("max_interests", s.max_interests.map_or("none".into(), |m| m.to_string()));
    kv("cache_fraction", s.cache_fraction.to_string());
    kv("duration", s.duration.to_string());
    kv("drain", s.drain.to_string());
    kv("strategy", s.strategy.label().into());
    kv("seed", s.seed.to_string());
    kv("quantum", s.quantum.to_string());
    kv("queue_capacity", s.queue_capacity.to_string());
    kv("pit_timeout", s.pit_timeout.to_string());
    kv("interest_size", s.interest_size.to_string());
    kv("data_size", s.data_size.to_string());
    kv(
        "link_down",
        s.link_down
            .as_ref()
            .map_or("none".into(), |l| format!("{} {} {}", l.a, l.b, l.at)),
    );
    kv("max_events", s.max_events.to_string());
    out.push_str("\n[strategy]\n");
    let p = &s.params;
    let _ = writeln!(out, "lambda_r = {}", p.lambda_r);
    let _ = writeln!(out, "lambda_smooth = {}", p.lambda_smooth);
    let _ = writeln!(out, "reward_mode = {}", reward_label(p.reward_mode));
    let _ = writeln!(out, "selection_mode = {}", selection_label(p.selection_mode));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baselines::BaselineKind;

    #[test]
    fn minimal_config_gets_defaults() {
        let s = parse_scenario("topology = line:3\nstrategy = drr-mdpf\n").unwrap();
        assert_eq!(s.duration, 150.0);
        assert_eq!(s.queue_capacity, 100);
        assert_eq!(s.interest_rate, 2000.0);
        assert_eq!(s.strategy, StrategyKind::DrrMdpf);
        assert_eq!(s.topology, TopologySource::Builtin(BuiltinTopology::Line(3)));
    }

    #[test]
    fn cache_fraction_out_of_range() {
        let err = parse_scenario("topology = line:3\ncache_fraction = 1.5\n").unwrap_err();
        match err {
            Error::Parse { line, message } => {
                assert_eq!(line, 2);
                assert!(message.contains("[0, 1]"), "{message}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_key_names_line() {
        let err = parse_scenario("topology = line:3\n\nbogus = 1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err:?}");
        let err = parse_scenario("topology = line:3\n[strategy]\nrate = 1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err:?}");
    }

    #[test]
    fn type_mismatch_and_range() {
        assert!(matches!(
            parse_scenario("topology = line:3\nseed = abc\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_scenario("topology = line:3\n[strategy]\nlambda_r = 1.5\n"),
            Err(Error::Parse { line: 3, .. })
        ));
        assert!(matches!(
            parse_scenario("topology = line:3\nduration = -1\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(parse_scenario("strategy = drr-mdpf\n").is_err());
        assert!(parse_scenario("topology = grid:3\n").is_err());
    }

    #[test]
    fn strategy_section_and_aliases() {
        let s = parse_scenario(
            "topology = grid:3x3\nstrategy = smdpf-like\n[strategy]\nlambda_r = 0.5\nselection_mode = sample\n",
        )
        .unwrap();
        assert_eq!(s.strategy, StrategyKind::Baseline(BaselineKind::UniformRandom));
        assert_eq!(s.params.lambda_r, 0.5);
        assert_eq!(s.params.selection_mode, SelectionMode::Sample);
    }

    #[test]
    fn full_round_trip() {
        let text = "name = rt\ntopology = nets/g.topo\nconsumers = a, b\nproducers = p\n\
            link_bandwidth = 5000000\nlink_delay_ms = 2.5\nrouting = all-routes\ncatalog_size = 500\ncontent_classes = 4\n\
            zipf_exponent = 0.8\ninterest_rate = 123.5\narrivals = constant\nmax_interests = 77\n\
            cache_fraction = 0.3\nduration = 12.5\ndrain = false\nstrategy = saf-like\nseed = 9\n\
            quantum = 900\nqueue_capacity = 40\npit_timeout = 1.5\ninterest_size = 50\ndata_size = 800\n\
            link_down = a b 3.25\nmax_events = 1000\n[strategy]\nlambda_r = 0.7\nlambda_smooth = 0\n\
            reward_mode = qualitative\nselection_mode = sample\n";
        let s = parse_scenario(text).unwrap();
        let again = parse_scenario(&dump_scenario(&s).unwrap()).unwrap();
        assert_eq!(again, s);
        let d = parse_scenario(&dump_scenario(&Scenario::default()).unwrap()).unwrap();
        assert_eq!(d, Scenario::default());
    }

    #[test]
    fn overrides_match_file_edits() {
        let base = "topology = line:3\nseed = 1\n[strategy]\nlambda_r = 0.9\n";
        let edited = "topology = line:3\nseed = 7\n[strategy]\nlambda_r = 0.5\n";
        let ov = vec![
            parse_override("seed=7").unwrap(),
            parse_override("strategy.lambda_r = 0.5").unwrap(),
        ];
        assert_eq!(
            parse_scenario_with(base, None, &ov).unwrap(),
            parse_scenario(edited).unwrap()
        );
        assert!(parse_scenario_with(base, None, &[("nope".into(), "1".into())]).is_err());
        assert!(parse_override("novalue").is_err());
    }

    #[test]
    fn relative_topology_resolves_against_base() {
        let s = parse_scenario_with("topology = t.topo\n", Some(Path::new("/x/y")), &[]).unwrap();
        assert_eq!(s.topology, TopologySource::File("/x/y/t.topo".into()));
    }
}
