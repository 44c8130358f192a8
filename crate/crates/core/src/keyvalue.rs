//! Plain-text `key = value` files with optional `[section]` headers.
//!
//! Keys inside a section are stored as `section.key`. `#` starts a comment.
//! Later assignments override earlier ones.

use crate::{Error, Result};
use std::collections::BTreeMap;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct KeyValues {
    entries: BTreeMap<String, String>,
}

impl KeyValues {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        let mut section = String::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| Error::Format(format!("line {}: unterminated section header", lineno + 1)))?;
                section = name.trim().to_string();
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Format(format!("line {}: expected `key = value`", lineno + 1)))?;
            let k = k.trim();
            if k.is_empty() {
                return Err(Error::Format(format!("line {}: empty key", lineno + 1)));
            }
            let key = if section.is_empty() {
                k.to_string()
            } else {
                format!("{section}.{k}")
            };
            entries.insert(key, v.trim().to_string());
        }
        Ok(Self { entries })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn require(&self, key: &str) -> Result<&str> {
        self.get(key)
            .ok_or_else(|| Error::Parameter(format!("missing key `{key}`")))
    }

    pub fn set(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.entries.insert(key.into(), value.into());
    }

    pub fn parse_value<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse::<T>()
                .map(Some)
                .map_err(|_| Error::Parameter(format!("key `{key}`: cannot parse `{v}`"))),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    pub fn merge(&mut self, other: &KeyValues) {
        for (k, v) in other.iter() {
            self.set(k, v);
        }
    }

    /// Render back to text, top-level keys first, then one block per section.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let mut sections: BTreeMap<&str, Vec<(&str, &str)>> = BTreeMap::new();
        for (k, v) in self.iter() {
            match k.split_once('.') {
                Some((s, rest)) => sections.entry(s).or_default().push((rest, v)),
                None => out.push_str(&format!("{k} = {v}\n")),
            }
        }
        for (s, kvs) in sections {
            out.push_str(&format!("\n[{s}]\n"));
            for (k, v) in kvs {
                out.push_str(&format!("{k} = {v}\n"));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sections_and_comments() {
        let kv = KeyValues::parse("a = 1 # one\n\n[s]\nb= two words\n[t]\nc =3\n").unwrap();
        assert_eq!(kv.get("a"), Some("1"));
        assert_eq!(kv.get("s.b"), Some("two words"));
        assert_eq!(kv.parse_value::<i32>("t.c").unwrap(), Some(3));
        assert!(kv.parse_value::<i32>("s.b").is_err());
        assert!(kv.require("zzz").is_err());
    }

    #[test]
    fn render_roundtrip() {
        let kv = KeyValues::parse("x = 1\n[slot0]\nvalue = zero\n").unwrap();
        assert_eq!(KeyValues::parse(&kv.render()).unwrap(), kv);
    }

    #[test]
    fn malformed_lines() {
        assert!(KeyValues::parse("[open\n").is_err());
        assert!(KeyValues::parse("novalue\n").is_err());
        assert!(KeyValues::parse(" = 3\n").is_err());
    }
}
