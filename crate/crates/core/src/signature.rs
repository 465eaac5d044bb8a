//! Reduct signatures: subsets of the relation algebra operation symbols plus
//! the `≤` comparison predicate.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Operation symbols, in their canonical order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    Zero,
    One,
    Neg,
    Join,
    Meet,
    Ident,
    Conv,
    Comp,
    /// The order predicate; compared by inclusion, never a term node.
    Leq,
}

impl Symbol {
    pub const ALL: [Symbol; 9] = [
        Symbol::Zero,
        Symbol::One,
        Symbol::Neg,
        Symbol::Join,
        Symbol::Meet,
        Symbol::Ident,
        Symbol::Conv,
        Symbol::Comp,
        Symbol::Leq,
    ];

    /// ASCII token used in signatures and terms.
    pub fn token(self) -> &'static str {
        match self {
            Symbol::Zero => "0",
            Symbol::One => "1",
            Symbol::Neg => "-",
            Symbol::Join => "+",
            Symbol::Meet => ".",
            Symbol::Ident => "1'",
            Symbol::Conv => "~",
            Symbol::Comp => ";",
            Symbol::Leq => "<=",
        }
    }

    pub fn from_token(token: &str) -> Option<Symbol> {
        Some(match token {
            "0" => Symbol::Zero,
            "1" => Symbol::One,
            "-" | "−" => Symbol::Neg,
            "+" => Symbol::Join,
            "." | "·" => Symbol::Meet,
            "1'" => Symbol::Ident,
            "~" | "⌣" => Symbol::Conv,
            ";" => Symbol::Comp,
            "<=" | "≤" => Symbol::Leq,
            _ => return None,
        })
    }

    pub fn arity(self) -> usize {
        match self {
            Symbol::Zero | Symbol::One | Symbol::Ident => 0,
            Symbol::Neg | Symbol::Conv => 1,
            Symbol::Join | Symbol::Meet | Symbol::Comp | Symbol::Leq => 2,
        }
    }

    fn bit(self) -> u16 {
        1 << self as u16
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown signature symbol `{0}`")]
pub struct UnknownSymbol(pub String);

/// A set of [`Symbol`]s.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Signature(u16);

impl Signature {
    pub const EMPTY: Signature = Signature(0);

    /// The full relation algebra signature, without `≤`.
    pub fn full() -> Self {
        Symbol::ALL
            .iter()
            .filter(|&&s| s != Symbol::Leq)
            .copied()
            .collect()
    }

    pub fn contains(self, s: Symbol) -> bool {
        self.0 & s.bit() != 0
    }

    pub fn with(self, s: Symbol) -> Self {
        Signature(self.0 | s.bit())
    }

    pub fn is_subset(self, other: Signature) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn union(self, other: Signature) -> Self {
        Signature(self.0 | other.0)
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn symbols(self) -> impl Iterator<Item = Symbol> {
        Symbol::ALL.into_iter().filter(move |&s| self.contains(s))
    }

    /// All subsets of this signature, in increasing bit order.
    pub fn subsets(self) -> impl Iterator<Item = Signature> {
        let bits = self.0;
        let mut sub: Option<u16> = Some(0);
        std::iter::from_fn(move || {
            let cur = sub?;
            // Next subset of `bits` above `cur`.
            sub = if cur == bits {
                None
            } else {
                Some((cur.wrapping_sub(bits)) & bits)
            };
            Some(Signature(cur))
        })
    }

    /// Whether the signature contains both `-` and `;`, or both `·` and `;`.
    pub fn above_frp_boundary(self) -> bool {
        self.contains(Symbol::Comp) && (self.contains(Symbol::Neg) || self.contains(Symbol::Meet))
    }
}

impl FromIterator<Symbol> for Signature {
    fn from_iter<I: IntoIterator<Item = Symbol>>(iter: I) -> Self {
        iter.into_iter().fold(Signature::EMPTY, Signature::with)
    }
}

/// Comma or whitespace separated symbol tokens, e.g. `"-,;"` or `"0 1 + 1' ~ ;"`.
impl FromStr for Signature {
    type Err = UnknownSymbol;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| Symbol::from_token(t).ok_or_else(|| UnknownSymbol(t.to_string())))
            .collect()
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tokens: Vec<_> = self.symbols().map(Symbol::token).collect();
        write!(f, "{{{}}}", tokens.join(","))
    }
}

impl fmt::Debug for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_tokens() {
        let sig: Signature = "0,1,+,1',~,;".parse().unwrap();
        assert_eq!(sig.symbols().count(), 6);
        assert!(sig.contains(Symbol::Ident));
        assert!(!sig.contains(Symbol::Neg));
        let sig: Signature = "- ;".parse().unwrap();
        assert_eq!(sig.to_string(), "{-,;}");
        assert!(sig.above_frp_boundary());
        assert!("<= ;".parse::<Signature>().unwrap().contains(Symbol::Leq));
        assert_eq!(
            "*".parse::<Signature>().unwrap_err(),
            UnknownSymbol("*".into())
        );
    }

    #[test]
    fn display_round_trips() {
        for sig in Signature::full().with(Symbol::Leq).subsets() {
            let text = sig.to_string();
            let inner = &text[1..text.len() - 1];
            assert_eq!(inner.parse::<Signature>().unwrap(), sig);
        }
    }

    #[test]
    fn subsets_are_enumerated() {
        let sig: Signature = "0,1,+,1',~,;".parse().unwrap();
        let subs: Vec<_> = sig.subsets().collect();
        assert_eq!(subs.len(), 64);
        assert!(subs.iter().all(|s| s.is_subset(sig)));
        assert_eq!(Signature::EMPTY.subsets().count(), 1);
    }
}
