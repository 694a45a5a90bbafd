use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite, ordered set of distinct symbol labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Alphabet {
    name: String,
    symbols: Vec<String>,
}

impl Alphabet {
    pub fn new<S: Into<String>>(name: impl Into<String>, symbols: Vec<S>) -> Result<Self> {
        let name = name.into();
        let symbols: Vec<String> = symbols.into_iter().map(Into::into).collect();
        if symbols.is_empty() {
            return Err(Error::InvalidAlphabet(format!("`{name}` has no symbols")));
        }
        for (i, s) in symbols.iter().enumerate() {
            if symbols[..i].contains(s) {
                return Err(Error::InvalidAlphabet(format!(
                    "`{name}` repeats symbol `{s}`"
                )));
            }
        }
        Ok(Self { name, symbols })
    }

    /// Alphabet with symbols `"0"`, `"1"`, ... `"n-1"`.
    pub fn indexed(name: impl Into<String>, size: usize) -> Result<Self> {
        Self::new(name, (0..size).map(|i| i.to_string()).collect())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn size(&self) -> usize {
        self.symbols.len()
    }

    pub fn index_of(&self, symbol: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s == symbol)
    }
}

/// A named random variable together with its alphabet.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Axis {
    pub name: String,
    pub alphabet: Alphabet,
}

impl Axis {
    pub fn new(name: impl Into<String>, alphabet: Alphabet) -> Self {
        Self {
            name: name.into(),
            alphabet,
        }
    }

    /// Axis whose alphabet is `0..size`, named after the variable.
    pub fn indexed(name: impl Into<String>, size: usize) -> Result<Self> {
        let name = name.into();
        let alphabet = Alphabet::indexed(name.clone(), size)?;
        Ok(Self { name, alphabet })
    }

    pub fn size(&self) -> usize {
        self.alphabet.size()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicates_and_empty() {
        assert!(Alphabet::new("A", vec!["x", "x"]).is_err());
        assert!(Alphabet::new("A", Vec::<String>::new()).is_err());
        let a = Alphabet::new("A", vec!["x", "y"]).unwrap();
        assert_eq!(a.size(), 2);
        assert_eq!(a.index_of("y"), Some(1));
    }
}
