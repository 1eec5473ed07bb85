//! Parameter files: one `key = value` per line, `#` comments.
//!
//! A value is a number, a list `[a, b, ...]` (a grid axis), a range `a..b`
//! (sampled when `samples` is set), a bare word, or the name of another
//! numeric key (`q = p` ties q to p at every grid point).

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::de::{self, MapAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::CliError;

/// Keys that hold numbers and may be referenced by an alias.
pub const NUMERIC_KEYS: &[&str] = &[
    "N", "p", "q", "s", "m", "M", "r0", "r1", "u0", "u1", "mesh", "reg_eps", "dim", "cells", "b", "k", "alpha",
    "samples",
];

pub const TEXT_KEYS: &[&str] = &["kind", "scheme", "field", "task"];

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Number(f64),
    List(Vec<f64>),
    Range(f64, f64),
    Text(String),
    Alias(String),
}

impl Value {
    pub fn parse(raw: &str) -> Result<Self, String> {
        let raw = raw.trim();
        if raw.is_empty() {
            return Err("empty value".into());
        }
        if let Some(inner) = raw.strip_prefix('[') {
            let inner = inner.strip_suffix(']').ok_or("unterminated list")?;
            let items = inner
                .split(',')
                .map(|x| x.trim())
                .filter(|x| !x.is_empty())
                .map(|x| x.parse::<f64>().map_err(|_| format!("`{x}` is not a number")))
                .collect::<Result<Vec<_>, _>>()?;
            if items.is_empty() {
                return Err("empty list".into());
            }
            return Ok(Value::List(items));
        }
        if let Ok(x) = raw.parse::<f64>() {
            return Ok(Value::Number(x));
        }
        if let Some((a, b)) = raw.split_once("..") {
            if let (Ok(a), Ok(b)) = (a.trim().parse::<f64>(), b.trim().parse::<f64>()) {
                if !(a < b) {
                    return Err(format!("range {a}..{b} is empty"));
                }
                return Ok(Value::Range(a, b));
            }
        }
        if NUMERIC_KEYS.contains(&raw) {
            return Ok(Value::Alias(raw.to_string()));
        }
        if raw.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
            return Ok(Value::Text(raw.to_string()));
        }
        Err(format!("cannot parse `{raw}`"))
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Number(x) => write!(f, "{x}"),
            Value::List(xs) => {
                write!(f, "[")?;
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, "]")
            }
            Value::Range(a, b) => write!(f, "{a}..{b}"),
            Value::Text(s) | Value::Alias(s) => write!(f, "{s}"),
        }
    }
}

/// Ordered key/value set; later assignments to a key replace earlier ones.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParamSet {
    entries: Vec<(String, Value)>,
}

fn check_key(key: &str) -> Result<(), String> {
    if NUMERIC_KEYS.contains(&key) || TEXT_KEYS.contains(&key) {
        Ok(())
    } else {
        Err(format!("unknown key `{key}`"))
    }
}

impl ParamSet {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut set = ParamSet::default();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let at = |msg: String| CliError::Usage(format!("line {}: {msg}", lineno + 1));
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| at("expected `key = value`".into()))?;
            let key = key.trim();
            check_key(key).map_err(at)?;
            if set.get(key).is_some() {
                return Err(at(format!("duplicate key `{key}`")));
            }
            let value = Value::parse(value).map_err(|e| at(format!("field `{key}`: {e}")))?;
            set.entries.push((key.to_string(), value));
        }
        Ok(set)
    }

    /// Applies a `key=value` override.
    pub fn set_inline(&mut self, assignment: &str) -> Result<(), CliError> {
        let (key, value) = assignment
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("expected key=value, got `{assignment}`")))?;
        let key = key.trim();
        check_key(key).map_err(CliError::Usage)?;
        let value = Value::parse(value).map_err(|e| CliError::Usage(format!("field `{key}`: {e}")))?;
        self.insert(key, value);
        Ok(())
    }

    pub fn insert(&mut self, key: &str, value: Value) {
        match self.entries.iter_mut().find(|(k, _)| k == key) {
            Some(slot) => slot.1 = value,
            None => self.entries.push((key.to_string(), value)),
        }
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    pub fn entries(&self) -> &[(String, Value)] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Expands grid axes (Cartesian product, first listed key slowest) or,
    /// when `samples` is set, draws that many points with ranges sampled
    /// uniformly from `rng`. Aliases are resolved per point.
    pub fn expand(&self, rng: &mut ChaCha8Rng) -> Result<Vec<Point>, CliError> {
        for (key, value) in &self.entries {
            if let Value::Alias(target) = value {
                match self.get(target) {
                    None => return Err(CliError::Usage(format!("field `{key}`: alias of unset key `{target}`"))),
                    Some(Value::Alias(_)) => {
                        return Err(CliError::Usage(format!(
                            "field `{key}`: alias chains are not supported"
                        )))
                    }
                    Some(Value::Text(_)) => {
                        return Err(CliError::Usage(format!("field `{key}`: `{target}` is not numeric")))
                    }
                    _ => {}
                }
            }
            if let Value::Text(t) = value {
                if NUMERIC_KEYS.contains(&key.as_str()) {
                    return Err(CliError::Usage(format!("field `{key}`: expected a number, got `{t}`")));
                }
            } else if TEXT_KEYS.contains(&key.as_str()) {
                return Err(CliError::Usage(format!(
                    "field `{key}`: expected a word, got `{value}`"
                )));
            }
        }
        let samples = match self.get("samples") {
            None => None,
            Some(Value::Number(n)) if *n >= 1.0 && n.fract() == 0.0 => Some(*n as usize),
            Some(v) => {
                return Err(CliError::Usage(format!(
                    "field `samples`: expected a positive integer, got `{v}`"
                )))
            }
        };
        let base = |numbers: BTreeMap<String, f64>| {
            let mut point = Point {
                numbers,
                texts: BTreeMap::new(),
            };
            for (key, value) in &self.entries {
                match value {
                    Value::Text(t) => {
                        point.texts.insert(key.clone(), t.clone());
                    }
                    Value::Alias(target) => {
                        let v = point.numbers[target];
                        point.numbers.insert(key.clone(), v);
                    }
                    _ => {}
                }
            }
            point.numbers.remove("samples");
            point
        };

        if let Some(n) = samples {
            let mut points = Vec::with_capacity(n);
            for _ in 0..n {
                let mut numbers = BTreeMap::new();
                for (key, value) in &self.entries {
                    let v = match value {
                        Value::Number(x) => *x,
                        Value::Range(a, b) => rng.random_range(*a..*b),
                        Value::List(xs) => xs[rng.random_range(0..xs.len())],
                        _ => continue,
                    };
                    numbers.insert(key.clone(), v);
                }
                points.push(base(numbers));
            }
            return Ok(points);
        }

        let mut grid: Vec<BTreeMap<String, f64>> = vec![BTreeMap::new()];
        for (key, value) in &self.entries {
            let axis = match value {
                Value::Number(x) => vec![*x],
                Value::List(xs) => xs.clone(),
                Value::Range(..) => {
                    return Err(CliError::Usage(format!("field `{key}`: ranges need `samples = n`")));
                }
                _ => continue,
            };
            grid = grid
                .into_iter()
                .flat_map(|p| {
                    axis.iter().map(move |&x| {
                        let mut q = p.clone();
                        q.insert(key.clone(), x);
                        q
                    })
                })
                .collect();
        }
        Ok(grid.into_iter().map(base).collect())
    }
}

impl fmt::Display for ParamSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (key, value) in &self.entries {
            writeln!(f, "{key} = {value}")?;
        }
        Ok(())
    }
}

impl Serialize for ParamSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.entries.len()))?;
        for (key, value) in &self.entries {
            match value {
                Value::Number(x) => map.serialize_entry(key, x)?,
                Value::List(xs) => map.serialize_entry(key, xs)?,
                other => map.serialize_entry(key, &other.to_string())?,
            }
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for ParamSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct ParamVisitor;

        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(f64),
            List(Vec<f64>),
            Text(String),
        }

        impl<'de> Visitor<'de> for ParamVisitor {
            type Value = ParamSet;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a map of parameter values")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut access: A) -> Result<ParamSet, A::Error> {
                let mut set = ParamSet::default();
                while let Some((key, raw)) = access.next_entry::<String, Raw>()? {
                    check_key(&key).map_err(de::Error::custom)?;
                    let value = match raw {
                        Raw::Number(x) => Value::Number(x),
                        Raw::List(xs) => Value::List(xs),
                        Raw::Text(s) => Value::parse(&s).map_err(de::Error::custom)?,
                    };
                    set.entries.push((key, value));
                }
                Ok(set)
            }
        }

        deserializer.deserialize_map(ParamVisitor)
    }
}

/// One resolved grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub numbers: BTreeMap<String, f64>,
    pub texts: BTreeMap<String, String>,
}

impl Point {
    pub fn number(&self, key: &str) -> Option<f64> {
        self.numbers.get(key).copied()
    }

    pub fn require(&self, key: &str) -> Result<f64, CliError> {
        self.number(key)
            .ok_or_else(|| CliError::Usage(format!("missing field `{key}`")))
    }

    pub fn integer(&self, key: &str) -> Result<Option<usize>, CliError> {
        match self.number(key) {
            None => Ok(None),
            Some(x) if x >= 0.0 && x.fract() == 0.0 => Ok(Some(x as usize)),
            Some(x) => Err(CliError::Usage(format!(
                "field `{key}`: expected a nonnegative integer, got {x}"
            ))),
        }
    }

    pub fn text(&self, key: &str) -> Option<&str> {
        self.texts.get(key).map(String::as_str)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(0)
    }

    #[test]
    fn values() {
        assert_eq!(Value::parse("2.5").unwrap(), Value::Number(2.5));
        assert_eq!(Value::parse("[1, 2,3]").unwrap(), Value::List(vec![1.0, 2.0, 3.0]));
        assert_eq!(Value::parse("1..2").unwrap(), Value::Range(1.0, 2.0));
        assert_eq!(Value::parse("p").unwrap(), Value::Alias("p".into()));
        assert_eq!(Value::parse("product").unwrap(), Value::Text("product".into()));
        assert!(Value::parse("[1, x]").is_err());
        assert!(Value::parse("2..1").is_err());
    }

    #[test]
    fn grid_with_alias() {
        let set = ParamSet::parse("kind = product\nN = [2, 3]\np = [1.5, 2, 3]\nq = p # tie\ns = 1\nm = 2\n").unwrap();
        let pts = set.expand(&mut rng()).unwrap();
        assert_eq!(pts.len(), 6);
        assert!(pts.iter().all(|pt| pt.number("p") == pt.number("q")));
        assert_eq!(pts[0].number("N"), Some(2.0));
        assert_eq!(pts[3].number("N"), Some(3.0));
        assert_eq!(pts[0].text("kind"), Some("product"));
    }

    #[test]
    fn errors_name_the_field() {
        let msg = |text: &str| match ParamSet::parse(text).and_then(|s| s.expand(&mut rng()).map(|_| ())) {
            Err(CliError::Usage(m)) => m,
            other => panic!("{other:?}"),
        };
        assert!(msg("p = 2\nfoo = 1\n").contains("unknown key `foo`"));
        assert!(msg("p = [2, x]\n").contains("field `p`"));
        assert!(msg("p = 2\np = 3\n").contains("duplicate"));
        assert!(msg("q = p\n").contains("unset key `p`"));
        assert!(msg("p = 1..2\n").contains("samples"));
        assert!(msg("p = abc\n").contains("field `p`"));
    }

    #[test]
    fn sampling_is_seeded() {
        let set = ParamSet::parse("p = 2..3\nq = 1.5\nsamples = 5\n").unwrap();
        let a = set.expand(&mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let b = set.expand(&mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 5);
        assert!(a.iter().all(|pt| (2.0..3.0).contains(&pt.number("p").unwrap())));
        assert!(a.iter().all(|pt| pt.number("samples").is_none()));
    }

    #[test]
    fn text_round_trip() {
        let text = "kind = sum\nN = [2, 3]\np = 2.5\nq = p\ns = 0.1..2\nsamples = 4\nreg_eps = 0.00000001\n";
        let set = ParamSet::parse(text).unwrap();
        assert_eq!(ParamSet::parse(&set.to_string()).unwrap(), set);
        let json = serde_json::to_string(&set).unwrap();
        assert_eq!(serde_json::from_str::<ParamSet>(&json).unwrap(), set);
    }

    #[test]
    fn inline_overrides() {
        let mut set = ParamSet::parse("p = 2\n").unwrap();
        set.set_inline("p=3").unwrap();
        set.set_inline("q = [1.5, 2]").unwrap();
        assert_eq!(set.get("p"), Some(&Value::Number(3.0)));
        assert_eq!(set.entries().len(), 2);
        assert!(set.set_inline("nope").is_err());
    }
}
