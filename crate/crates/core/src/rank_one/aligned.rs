use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Union of whole levels of one stage's tower.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlignedSet {
    stage: usize,
    levels: BTreeSet<u128>,
}

impl AlignedSet {
    pub fn new(stage: usize, levels: impl IntoIterator<Item = u128>) -> Result<Self> {
        let levels: BTreeSet<u128> = levels.into_iter().collect();
        if levels.is_empty() {
            return Err(Error::Precondition("aligned set has no levels".into()));
        }
        Ok(Self { stage, levels })
    }

    /// `[0, 1)`, the bottom level of the first tower.
    pub fn unit() -> Self {
        Self { stage: 0, levels: [0].into_iter().collect() }
    }

    pub fn stage(&self) -> usize {
        self.stage
    }

    pub fn levels(&self) -> &BTreeSet<u128> {
        &self.levels
    }
}

impl FromStr for AlignedSet {
    type Err = Error;

    /// `unit` or `levels:m:i,j,...`.
    fn from_str(s: &str) -> Result<Self> {
        if s == "unit" {
            return Ok(Self::unit());
        }
        let bad = || Error::Parse(format!("expected `unit` or `levels:m:i,j,...`, got {s:?}"));
        let rest = s.strip_prefix("levels:").ok_or_else(bad)?;
        let (m, list) = rest.split_once(':').ok_or_else(bad)?;
        let stage = m.parse().map_err(|_| bad())?;
        let levels = list.split(',').map(|t| t.trim().parse::<u128>().map_err(|_| bad())).collect::<Result<Vec<_>>>()?;
        Self::new(stage, levels)
    }
}

impl fmt::Display for AlignedSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list: Vec<String> = self.levels.iter().map(|l| l.to_string()).collect();
        write!(f, "levels:{}:{}", self.stage, list.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse() {
        assert_eq!("unit".parse::<AlignedSet>().unwrap(), AlignedSet::unit());
        let e: AlignedSet = "levels:1:3,0,7".parse().unwrap();
        assert_eq!(e.stage(), 1);
        assert_eq!(e.levels().iter().copied().collect::<Vec<_>>(), vec![0, 3, 7]);
        assert_eq!(e.to_string().parse::<AlignedSet>().unwrap(), e);
        assert!("levels:1:".parse::<AlignedSet>().is_err());
        assert!("half".parse::<AlignedSet>().is_err());
    }
}
