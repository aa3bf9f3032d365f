use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Number of binary parameters in the domain.
pub const NUM_PARAMS: usize = 13;

/// Number of distinct parameter vectors.
pub const NUM_GRAMMARS: usize = 1 << NUM_PARAMS;

/// Parameter abbreviations in canonical order.
pub const PARAM_NAMES: [&str; NUM_PARAMS] = [
    "SP", "HIP", "HCP", "OpT", "NS", "NT", "WhM", "PI", "TM", "VtoI", "ItoC", "AH", "QInv",
];

/// Index of the Null Subject parameter.
pub const NS: usize = 4;

/// A parameter vector. Parameter 0 (SP) is the most significant of the
/// 13 low bits, so the integer value reads like the bit string.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Grammar(u16);

impl Grammar {
    /// CoLAG English, `0001001100011`.
    pub const COLAG_ENGLISH: Grammar = Grammar(0b0001001100011);

    /// CoLAG English with optional null subjects.
    pub const NS_ENGLISH: Grammar = Grammar(0b0001101100011);

    const MASK: u16 = (1 << NUM_PARAMS) - 1;

    pub fn from_index(index: u16) -> Result<Self> {
        if index > Self::MASK {
            return Err(Error::InvalidArgument(format!(
                "grammar index {index} exceeds {}",
                Self::MASK
            )));
        }
        Ok(Grammar(index))
    }

    pub fn from_bits(bits: [u8; NUM_PARAMS]) -> Result<Self> {
        let mut g = 0u16;
        for (i, &b) in bits.iter().enumerate() {
            match b {
                0 => {}
                1 => g |= Self::bit(i),
                _ => {
                    return Err(Error::InvalidArgument(format!(
                        "parameter {} has value {b}",
                        PARAM_NAMES[i]
                    )))
                }
            }
        }
        Ok(Grammar(g))
    }

    #[inline]
    pub(crate) const fn bit(param: usize) -> u16 {
        1 << (NUM_PARAMS - 1 - param)
    }

    #[inline]
    pub fn index(self) -> u16 {
        self.0
    }

    #[inline]
    pub fn value(self, param: usize) -> u8 {
        debug_assert!(param < NUM_PARAMS);
        ((self.0 & Self::bit(param)) != 0) as u8
    }

    #[inline]
    pub fn with_value(self, param: usize, value: u8) -> Grammar {
        if value == 0 {
            Grammar(self.0 & !Self::bit(param))
        } else {
            Grammar(self.0 | Self::bit(param))
        }
    }

    #[inline]
    pub fn flipped(self, param: usize) -> Grammar {
        Grammar(self.0 ^ Self::bit(param))
    }

    pub fn bits(self) -> [u8; NUM_PARAMS] {
        std::array::from_fn(|i| self.value(i))
    }

    pub fn all() -> impl Iterator<Item = Grammar> {
        (0..NUM_GRAMMARS as u16).map(Grammar)
    }
}

impl fmt::Display for Grammar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..NUM_PARAMS {
            f.write_str(if self.value(i) == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Grammar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Grammar({self})")
    }
}

impl FromStr for Grammar {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.len() != NUM_PARAMS {
            return Err(Error::InvalidArgument(format!(
                "grammar must be {NUM_PARAMS} binary digits, got {s:?}"
            )));
        }
        let mut bits = [0u8; NUM_PARAMS];
        for (slot, ch) in bits.iter_mut().zip(s.chars()) {
            *slot = match ch {
                '0' => 0,
                '1' => 1,
                _ => {
                    return Err(Error::InvalidArgument(format!(
                        "grammar must be {NUM_PARAMS} binary digits, got {s:?}"
                    )))
                }
            };
        }
        Grammar::from_bits(bits)
    }
}

/// Parameters whose values stand in a superset/subset relation, with the
/// value that generates the superset language.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupersetRegistry {
    entries: Vec<(usize, u8)>,
}

impl SupersetRegistry {
    pub fn new(entries: impl IntoIterator<Item = (usize, u8)>) -> Result<Self> {
        let mut out: Vec<(usize, u8)> = Vec::new();
        for (param, value) in entries {
            if param >= NUM_PARAMS {
                return Err(Error::InvalidArgument(format!(
                    "registry parameter index {param} out of range"
                )));
            }
            if value > 1 {
                return Err(Error::InvalidArgument(format!(
                    "registry superset value {value} is not binary"
                )));
            }
            if out.iter().any(|&(p, _)| p == param) {
                return Err(Error::InvalidArgument(format!(
                    "duplicate registry parameter {}",
                    PARAM_NAMES[param]
                )));
            }
            out.push((param, value));
        }
        Ok(SupersetRegistry { entries: out })
    }

    pub fn empty() -> Self {
        SupersetRegistry {
            entries: Vec::new(),
        }
    }

    /// Superset value of `param`, if it is registered.
    #[inline]
    pub fn superset_value(&self, param: usize) -> Option<u8> {
        self.entries
            .iter()
            .find_map(|&(p, v)| (p == param).then_some(v))
    }

    pub fn entries(&self) -> &[(usize, u8)] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

impl Default for SupersetRegistry {
    /// Null Subject, with NS=1 generating the superset.
    fn default() -> Self {
        SupersetRegistry {
            entries: vec![(NS, 1)],
        }
    }
}
