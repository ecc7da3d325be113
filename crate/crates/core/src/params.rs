//! String-keyed parameter assignments.
//!
//! A [`ParamMap`] configures one algorithm or transformer. Consumers read it
//! through a [`ParamReader`], which rejects keys nobody asked for.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(untagged))]
pub enum ParamValue {
    Bool(bool),
    Int(i64),
    Real(f64),
    Str(String),
    List(Vec<ParamValue>),
}

impl ParamValue {
    pub fn as_f64(&self) -> Option<f64> {
        match *self {
            ParamValue::Int(v) => Some(v as f64),
            ParamValue::Real(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_i64(&self) -> Option<i64> {
        match *self {
            ParamValue::Int(v) => Some(v),
            ParamValue::Real(v) if v.is_finite() && crate::math::floor(v) == v => Some(v as i64),
            _ => None,
        }
    }
}

impl fmt::Display for ParamValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamValue::Bool(v) => write!(f, "{v}"),
            ParamValue::Int(v) => write!(f, "{v}"),
            ParamValue::Real(v) => write!(f, "{v}"),
            ParamValue::Str(v) => write!(f, "{v}"),
            ParamValue::List(items) => {
                f.write_str("[")?;
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{item}")?;
                }
                f.write_str("]")
            }
        }
    }
}

macro_rules! impl_from_int {
    ($($t:ty),*) => {$(
        impl From<$t> for ParamValue {
            fn from(v: $t) -> Self {
                ParamValue::Int(v as i64)
            }
        }
    )*};
}
impl_from_int!(i32, i64, u32, u64, usize);

impl From<f64> for ParamValue {
    fn from(v: f64) -> Self {
        ParamValue::Real(v)
    }
}

impl From<bool> for ParamValue {
    fn from(v: bool) -> Self {
        ParamValue::Bool(v)
    }
}

impl From<&str> for ParamValue {
    fn from(v: &str) -> Self {
        ParamValue::Str(v.to_string())
    }
}

impl From<String> for ParamValue {
    fn from(v: String) -> Self {
        ParamValue::Str(v)
    }
}

impl<T: Into<ParamValue>> From<Vec<T>> for ParamValue {
    fn from(v: Vec<T>) -> Self {
        ParamValue::List(v.into_iter().map(Into::into).collect())
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct ParamMap(BTreeMap<String, ParamValue>);

impl ParamMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, name: &str, value: impl Into<ParamValue>) -> Self {
        self.set(name, value);
        self
    }

    pub fn set(&mut self, name: &str, value: impl Into<ParamValue>) {
        self.0.insert(name.to_string(), value.into());
    }

    pub fn get(&self, name: &str) -> Option<&ParamValue> {
        self.0.get(name)
    }

    pub fn remove(&mut self, name: &str) -> Option<ParamValue> {
        self.0.remove(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.0.contains_key(name)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &ParamValue)> {
        self.0.iter()
    }

    /// Entries of `other` override entries of `self`.
    pub fn merged(&self, other: &ParamMap) -> ParamMap {
        let mut out = self.clone();
        for (k, v) in other.iter() {
            out.0.insert(k.clone(), v.clone());
        }
        out
    }
}

impl FromIterator<(String, ParamValue)> for ParamMap {
    fn from_iter<I: IntoIterator<Item = (String, ParamValue)>>(iter: I) -> Self {
        ParamMap(iter.into_iter().collect())
    }
}

impl fmt::Display for ParamMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (k, v)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{k}={v}")?;
        }
        f.write_str("}")
    }
}

/// Typed, consumption-tracking access to a [`ParamMap`].
pub struct ParamReader<'a> {
    owner: &'a str,
    map: &'a ParamMap,
    used: BTreeSet<String>,
}

impl<'a> ParamReader<'a> {
    pub fn new(owner: &'a str, map: &'a ParamMap) -> Self {
        Self {
            owner,
            map,
            used: BTreeSet::new(),
        }
    }

    fn take(&mut self, name: &str) -> Option<&'a ParamValue> {
        let v = self.map.get(name);
        if v.is_some() {
            self.used.insert(name.to_string());
        }
        v
    }

    pub fn has(&self, name: &str) -> bool {
        self.map.contains(name)
    }

    pub fn real_opt(&mut self, name: &str) -> Result<Option<f64>> {
        match self.take(name) {
            None => Ok(None),
            Some(v) => match v.as_f64() {
                Some(x) if x.is_finite() => Ok(Some(x)),
                _ => Err(Error::invalid(name, format!("expected a finite number, got {v}"))),
            },
        }
    }

    pub fn real(&mut self, name: &str, default: f64) -> Result<f64> {
        Ok(self.real_opt(name)?.unwrap_or(default))
    }

    pub fn int_opt(&mut self, name: &str) -> Result<Option<i64>> {
        match self.take(name) {
            None => Ok(None),
            Some(v) => v
                .as_i64()
                .map(Some)
                .ok_or_else(|| Error::invalid(name, format!("expected an integer, got {v}"))),
        }
    }

    pub fn usize_opt(&mut self, name: &str) -> Result<Option<usize>> {
        match self.int_opt(name)? {
            None => Ok(None),
            Some(v) if v >= 0 => Ok(Some(v as usize)),
            Some(v) => Err(Error::invalid(name, format!("expected a non-negative integer, got {v}"))),
        }
    }

    pub fn usize(&mut self, name: &str, default: usize) -> Result<usize> {
        Ok(self.usize_opt(name)?.unwrap_or(default))
    }

    pub fn bool(&mut self, name: &str, default: bool) -> Result<bool> {
        match self.take(name) {
            None => Ok(default),
            Some(ParamValue::Bool(b)) => Ok(*b),
            Some(v) => Err(Error::invalid(name, format!("expected a boolean, got {v}"))),
        }
    }

    pub fn string_opt(&mut self, name: &str) -> Result<Option<String>> {
        match self.take(name) {
            None => Ok(None),
            Some(ParamValue::Str(s)) => Ok(Some(s.clone())),
            Some(v) => Err(Error::invalid(name, format!("expected a string, got {v}"))),
        }
    }

    pub fn string(&mut self, name: &str, default: &str) -> Result<String> {
        Ok(self.string_opt(name)?.unwrap_or_else(|| default.to_string()))
    }

    pub fn usize_list_opt(&mut self, name: &str) -> Result<Option<Vec<usize>>> {
        match self.take(name) {
            None => Ok(None),
            Some(ParamValue::List(items)) => items
                .iter()
                .map(|v| match v.as_i64() {
                    Some(i) if i >= 0 => Ok(i as usize),
                    _ => Err(Error::invalid(name, "expected a list of non-negative integers")),
                })
                .collect::<Result<Vec<_>>>()
                .map(Some),
            Some(v) => Err(Error::invalid(name, format!("expected a list, got {v}"))),
        }
    }

    /// A list of two-element integer lists, e.g. `[[0, 1], [2, 5]]`.
    pub fn pairs_opt(&mut self, name: &str) -> Result<Option<Vec<(usize, usize)>>> {
        let bad = || Error::invalid(name, "expected a list of [i, j] index pairs");
        match self.take(name) {
            None => Ok(None),
            Some(ParamValue::List(items)) => {
                let mut out = Vec::with_capacity(items.len());
                for item in items {
                    match item {
                        ParamValue::List(pair) if pair.len() == 2 => {
                            let a = pair[0].as_i64().filter(|&v| v >= 0).ok_or_else(bad)?;
                            let b = pair[1].as_i64().filter(|&v| v >= 0).ok_or_else(bad)?;
                            out.push((a as usize, b as usize));
                        }
                        _ => return Err(bad()),
                    }
                }
                Ok(Some(out))
            }
            Some(_) => Err(bad()),
        }
    }

    /// Collects every `prefix.key` entry as `key` into a new map.
    pub fn sub(&mut self, prefix: &str) -> ParamMap {
        let dotted = format!("{prefix}.");
        let mut out = ParamMap::new();
        for (k, v) in self.map.iter() {
            if let Some(rest) = k.strip_prefix(&dotted) {
                out.set(rest, v.clone());
                self.used.insert(k.clone());
            }
        }
        out
    }

    /// Fails on the first key that was never read.
    pub fn finish(self) -> Result<()> {
        for (k, _) in self.map.iter() {
            if !self.used.contains(k) {
                return Err(Error::UnknownParameter {
                    owner: self.owner.to_string(),
                    name: k.clone(),
                });
            }
        }
        Ok(())
    }
}

/// `Ok(v)` when `v > 0`.
pub(crate) fn positive(name: &str, v: f64) -> Result<f64> {
    if v > 0.0 {
        Ok(v)
    } else {
        Err(Error::invalid(name, format!("must be > 0, got {v}")))
    }
}

pub(crate) fn at_least(name: &str, v: usize, min: usize) -> Result<usize> {
    if v >= min {
        Ok(v)
    } else {
        Err(Error::invalid(name, format!("must be >= {min}, got {v}")))
    }
}
