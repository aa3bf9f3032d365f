use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Token {
    S,
    O1,
    O2,
    O3,
    P,
    Adv,
    Aux,
    Verb,
    Not,
    Never,
}

impl Token {
    pub fn as_str(self) -> &'static str {
        match self {
            Token::S => "S",
            Token::O1 => "O1",
            Token::O2 => "O2",
            Token::O3 => "O3",
            Token::P => "P",
            Token::Adv => "Adv",
            Token::Aux => "Aux",
            Token::Verb => "Verb",
            Token::Not => "not",
            Token::Never => "never",
        }
    }
}

impl FromStr for Token {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Ok(match s {
            "S" => Token::S,
            "O1" => Token::O1,
            "O2" => Token::O2,
            "O3" => Token::O3,
            "P" => Token::P,
            "Adv" => Token::Adv,
            "Aux" => Token::Aux,
            "Verb" => Token::Verb,
            "not" => Token::Not,
            "never" => Token::Never,
            _ => return Err(format!("unknown token {s:?}")),
        })
    }
}

/// Illocutionary force.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Force {
    Dec,
    Q,
    Imp,
}

impl Force {
    pub fn as_str(self) -> &'static str {
        match self {
            Force::Dec => "DEC",
            Force::Q => "Q",
            Force::Imp => "IMP",
        }
    }
}

impl fmt::Display for Force {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Force {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "DEC" => Ok(Force::Dec),
            "Q" => Ok(Force::Q),
            "IMP" => Ok(Force::Imp),
            _ => Err(format!("unknown force {s:?}")),
        }
    }
}

/// A word order pattern with its overt illocutionary force.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Sentence {
    tokens: Vec<Token>,
    force: Force,
}

impl Sentence {
    pub fn new(tokens: Vec<Token>, force: Force) -> Result<Self> {
        if tokens.is_empty() {
            return Err(Error::InvalidArgument("sentence has no tokens".into()));
        }
        if force == Force::Imp && tokens.contains(&Token::S) {
            return Err(Error::InvalidArgument(
                "imperative pattern with an overt subject".into(),
            ));
        }
        Ok(Sentence { tokens, force })
    }

    /// Parses space-separated tokens, e.g. `"S Aux Verb O1"`.
    pub fn parse(tokens: &str, force: Force) -> Result<Self> {
        let tokens = tokens
            .split_whitespace()
            .map(|t| t.parse::<Token>().map_err(Error::InvalidArgument))
            .collect::<Result<Vec<_>>>()?;
        Sentence::new(tokens, force)
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn force(&self) -> Force {
        self.force
    }

    pub fn has_subject(&self) -> bool {
        self.tokens.contains(&Token::S)
    }

    /// Same tokens under a different force. Fails only when relabelling a
    /// subjectful pattern as an imperative.
    pub fn with_force(&self, force: Force) -> Result<Sentence> {
        Sentence::new(self.tokens.clone(), force)
    }

    pub fn tokens_string(&self) -> String {
        let mut out = String::new();
        for (i, t) in self.tokens.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            out.push_str(t.as_str());
        }
        out
    }
}

impl fmt::Display for Sentence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{}]", self.tokens_string(), self.force)
    }
}

impl fmt::Debug for Sentence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Sentence({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display() {
        let s = Sentence::parse("S Aux Verb O1", Force::Dec).unwrap();
        assert_eq!(s.to_string(), "S Aux Verb O1 [DEC]");
        assert!(s.has_subject());
        assert!(Sentence::parse("S Verb X", Force::Dec).is_err());
        assert!(Sentence::parse("", Force::Q).is_err());
    }

    #[test]
    fn imperatives_have_no_subject() {
        assert!(Sentence::parse("S Verb", Force::Imp).is_err());
        let imp = Sentence::parse("never Verb O1", Force::Imp).unwrap();
        assert_eq!(imp.with_force(Force::Dec).unwrap().force(), Force::Dec);
    }
}
