//! Windowed feature tables.

use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::signalgen::Label;

/// How a channel's values combine: plain reals or angles on the circle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelKind {
    Plain,
    Angle,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Channel {
    pub name: String,
    pub kind: ChannelKind,
}

impl Channel {
    pub fn plain(name: impl Into<String>) -> Self {
        Self { name: name.into(), kind: ChannelKind::Plain }
    }

    pub fn angle(name: impl Into<String>) -> Self {
        Self { name: name.into(), kind: ChannelKind::Angle }
    }
}

/// Ordered windows × named channels, with a class label per window.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureMatrix {
    pub channels: Vec<Channel>,
    pub times: Vec<f64>,
    pub rows: Vec<Vec<f64>>,
    pub labels: Vec<Label>,
    /// Windows discarded because some channel was undefined.
    pub dropped: usize,
}

impl FeatureMatrix {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn channel_index(&self, name: &str) -> Option<usize> {
        self.channels.iter().position(|c| c.name == name)
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r[j]).collect()
    }

    /// Column by name.
    pub fn series(&self, name: &str) -> Result<Vec<f64>> {
        let j = self
            .channel_index(name)
            .ok_or_else(|| Error::InvalidInput(format!("no channel named {name}")))?;
        Ok(self.column(j))
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# channels: {}", self.channels.len());
        s.push('t');
        for c in &self.channels {
            s.push(',');
            s.push_str(&c.name);
        }
        s.push_str(",label\n");
        for ((t, row), label) in self.times.iter().zip(&self.rows).zip(&self.labels) {
            let _ = write!(s, "{t}");
            for v in row {
                let _ = write!(s, ",{v}");
            }
            let _ = writeln!(s, ",{}", label.as_str());
        }
        s
    }

    /// Channel enumeration as `index,name,kind` lines.
    pub fn manifest_csv(&self) -> String {
        manifest_csv(&self.channels)
    }

    /// Parse a table written by [`FeatureMatrix::to_csv`]. Channel kinds are
    /// taken from `kinds` when given, otherwise every channel is plain.
    pub fn from_csv(text: &str, path: &Path, kinds: Option<&[Channel]>) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::parse(path, "empty feature table"))?;
        let names: Vec<&str> = header.split(',').collect();
        if names.first() != Some(&"t") {
            return Err(Error::parse(path, "first column must be `t`"));
        }
        if names.last() != Some(&"label") || names.len() < 3 {
            return Err(Error::parse(path, "last column must be `label`"));
        }
        let channels: Vec<Channel> = names[1..names.len() - 1]
            .iter()
            .map(|n| {
                let kind = kinds
                    .and_then(|k| k.iter().find(|c| c.name == *n))
                    .map(|c| c.kind)
                    .unwrap_or(ChannelKind::Plain);
                Channel { name: n.to_string(), kind }
            })
            .collect();
        let mut m = FeatureMatrix { channels, times: vec![], rows: vec![], labels: vec![], dropped: 0 };
        for (i, line) in lines.enumerate() {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != names.len() {
                return Err(Error::parse(path, format!("row {}: expected {} fields", i + 1, names.len())));
            }
            let num = |s: &str| s.trim().parse::<f64>().map_err(|e| Error::parse(path, format!("row {}: {e}", i + 1)));
            m.times.push(num(f[0])?);
            m.rows.push(f[1..f.len() - 1].iter().map(|s| num(s)).collect::<Result<_>>()?);
            m.labels.push(match f[f.len() - 1].trim() {
                "HIF" => Label::Hif,
                "non-HIF" => Label::NonHif,
                other => return Err(Error::parse(path, format!("row {}: unknown label {other:?}", i + 1))),
            });
        }
        Ok(m)
    }
}

pub fn manifest_csv(channels: &[Channel]) -> String {
    let mut s = String::from("index,name,kind\n");
    for (i, c) in channels.iter().enumerate() {
        let kind = match c.kind {
            ChannelKind::Plain => "plain",
            ChannelKind::Angle => "angle",
        };
        let _ = writeln!(s, "{i},{},{kind}", c.name);
    }
    s
}
