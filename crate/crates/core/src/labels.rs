//! Zero-based indices inside the library, one-based labels in every file and
//! report a user sees.

use std::fmt;

use serde::ser::SerializeMap;
use serde::Serializer;

use crate::analysis::Verdict;

pub fn to_label(index: usize) -> usize {
    index + 1
}

/// Converts a one-based label to an index; `None` for label 0 or labels past `count`.
pub fn from_label(label: usize, count: usize) -> Option<usize> {
    (1..=count).contains(&label).then(|| label - 1)
}

pub fn serialize_one_based<S: Serializer>(index: &usize, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_u64(to_label(*index) as u64)
}

pub fn serialize_verdict<S: Serializer>(verdict: &Verdict, s: S) -> Result<S::Ok, S::Error> {
    match verdict {
        Verdict::ConvergedTo(t) => {
            let mut map = s.serialize_map(Some(1))?;
            map.serialize_entry("ConvergedTo", &to_label(*t))?;
            map.end()
        }
        Verdict::UniformSplit => s.serialize_str("UniformSplit"),
        Verdict::Oscillating => s.serialize_str("Oscillating"),
        Verdict::Undecided => s.serialize_str("Undecided"),
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::ConvergedTo(t) => write!(f, "ConvergedTo({})", to_label(*t)),
            Verdict::UniformSplit => f.write_str("UniformSplit"),
            Verdict::Oscillating => f.write_str("Oscillating"),
            Verdict::Undecided => f.write_str("Undecided"),
        }
    }
}
