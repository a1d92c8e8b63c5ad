//! Compact selector grammar shared by windows, poolers, scaling and color
//! models:
//!
//! ```text
//! selector := name [ ":" arg { "," arg } ]
//! arg      := value | key "=" value
//! ```
//!
//! e.g. `rect:11`, `md:p=2,o=3`, `fixed:0.8,0.1,0.1`.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Selector {
    pub name: String,
    pub positional: Vec<String>,
    pub keyed: Vec<(String, String)>,
}

pub(crate) fn bad(input: &str, reason: &str) -> Error {
    Error::Parse {
        input: input.to_string(),
        reason: reason.to_string(),
    }
}

pub(crate) fn unknown(input: &str, name: &str) -> Error {
    bad(input, &format!("unknown name {name:?}"))
}

impl Selector {
    pub fn parse(input: &str) -> Result<Self> {
        let input = input.trim();
        let (name, args) = match input.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (input, None),
        };
        if name.is_empty() {
            return Err(bad(input, "empty name"));
        }
        let mut positional = Vec::new();
        let mut keyed = Vec::new();
        if let Some(args) = args {
            for arg in args.split(',') {
                let arg = arg.trim();
                if arg.is_empty() {
                    return Err(bad(input, "empty argument"));
                }
                match arg.split_once('=') {
                    Some((k, v)) => keyed.push((k.trim().to_lowercase(), v.trim().to_string())),
                    None => positional.push(arg.to_string()),
                }
            }
        }
        Ok(Self {
            name: name.to_lowercase(),
            positional,
            keyed,
        })
    }

    fn raw(&self) -> String {
        let mut s = self.name.clone();
        let args: Vec<String> = self
            .positional
            .iter()
            .cloned()
            .chain(self.keyed.iter().map(|(k, v)| format!("{k}={v}")))
            .collect();
        if !args.is_empty() {
            s.push(':');
            s.push_str(&args.join(","));
        }
        s
    }

    pub fn check_keys(&self, allowed: &[&str]) -> Result<()> {
        for (k, _) in &self.keyed {
            if !allowed.contains(&k.as_str()) {
                return Err(bad(&self.raw(), &format!("unexpected key {k:?}")));
            }
        }
        Ok(())
    }

    pub fn expect_no_args(&self) -> Result<()> {
        if !self.positional.is_empty() || !self.keyed.is_empty() {
            return Err(bad(&self.raw(), "takes no arguments"));
        }
        Ok(())
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.keyed
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn opt_f64(&self, key: &str) -> Result<Option<f64>> {
        self.get(key)
            .map(|v| {
                v.parse::<f64>()
                    .map_err(|_| bad(&self.raw(), &format!("{key} is not a number")))
            })
            .transpose()
    }

    pub fn req_f64(&self, key: &str) -> Result<f64> {
        self.opt_f64(key)?
            .ok_or_else(|| bad(&self.raw(), &format!("missing {key}")))
    }

    pub fn opt_usize(&self, key: &str) -> Result<Option<usize>> {
        self.get(key)
            .map(|v| {
                v.parse::<usize>()
                    .map_err(|_| bad(&self.raw(), &format!("{key} is not a count")))
            })
            .transpose()
    }

    pub fn req_usize(&self, key: &str) -> Result<usize> {
        self.opt_usize(key)?
            .ok_or_else(|| bad(&self.raw(), &format!("missing {key}")))
    }

    pub fn positional_f64(&self, idx: usize) -> Result<f64> {
        self.positional
            .get(idx)
            .ok_or_else(|| bad(&self.raw(), "missing value"))?
            .parse()
            .map_err(|_| bad(&self.raw(), "value is not a number"))
    }

    pub fn positional_usize(&self, idx: usize) -> Result<usize> {
        self.positional
            .get(idx)
            .ok_or_else(|| bad(&self.raw(), "missing value"))?
            .parse()
            .map_err(|_| bad(&self.raw(), "value is not a count"))
    }
}
