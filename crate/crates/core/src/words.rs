//! Matrix words over a projector and its first derivatives.
//!
//! A word is a product such as `P·∂P·∂̄P·∂P`. The identities checked here
//! depend only on how many derivative letters a word has and where the
//! projector letters sit, so words are classified by those features and the
//! corresponding identity is asserted per class.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{rel_residual, CMatrix, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Letter {
    P,
    D,
    Db,
}

impl Letter {
    fn is_derivative(self) -> bool {
        !matches!(self, Letter::P)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn new(letters: Vec<Letter>) -> Result<Self> {
        if letters.is_empty() {
            return Err(Error::MalformedWord("empty word".into()));
        }
        Ok(Self(letters))
    }

    /// `∂P·∂̄P·∂P·…` with `m` letters.
    pub fn alternating(m: usize) -> Self {
        Self((0..m).map(|i| if i % 2 == 0 { Letter::D } else { Letter::Db }).collect())
    }

    pub fn random(rng: &mut impl Rng, max_len: usize) -> Self {
        let len = rng.random_range(1..=max_len);
        Self(
            (0..len)
                .map(|_| match rng.random_range(0..3) {
                    0 => Letter::P,
                    1 => Letter::D,
                    _ => Letter::Db,
                })
                .collect(),
        )
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn derivative_count(&self) -> usize {
        self.0.iter().filter(|l| l.is_derivative()).count()
    }

    /// Number of ∂ and ∂̄ letters.
    pub fn counts(&self) -> (usize, usize) {
        let d = self.0.iter().filter(|&&l| l == Letter::D).count();
        let db = self.0.iter().filter(|&&l| l == Letter::Db).count();
        (d, db)
    }

    pub fn p_at_end(&self) -> bool {
        self.0.first() == Some(&Letter::P) || self.0.last() == Some(&Letter::P)
    }

    pub fn eval(&self, p: &CMatrix, d: &CMatrix, db: &CMatrix) -> CMatrix {
        self.0.iter().fold(CMatrix::identity(p.dim()), |acc, l| {
            &acc * match l {
                Letter::P => p,
                Letter::D => d,
                Letter::Db => db,
            }
        })
    }

    /// Whether the word vanishes by the identical-derivative rules.
    ///
    /// Only meaningful when all derivative letters share one type.
    fn identical_type_vanishes(&self) -> bool {
        let m = self.derivative_count();
        let first_d = self.0.iter().position(|l| l.is_derivative());
        let last_d = self.0.iter().rposition(|l| l.is_derivative());
        match (m, first_d, last_d) {
            (0, ..) => false,
            (1, Some(i), Some(j)) => self.0[..i].contains(&Letter::P) && self.0[j + 1..].contains(&Letter::P),
            (2, ..) => self.p_at_end(),
            _ => true,
        }
    }

    pub fn is_identical_type(&self) -> bool {
        let (d, db) = self.counts();
        (d == 0) != (db == 0)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<&str> = self
            .0
            .iter()
            .map(|l| match l {
                Letter::P => "P",
                Letter::D => "D",
                Letter::Db => "Db",
            })
            .collect();
        write!(f, "{}", parts.join("."))
    }
}

impl FromStr for Word {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let letters = s
            .split(['.', ',', ' '])
            .filter(|t| !t.is_empty())
            .map(|t| match t {
                "P" => Ok(Letter::P),
                "D" => Ok(Letter::D),
                "Db" => Ok(Letter::Db),
                other => Err(Error::MalformedWord(format!("unknown letter {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Word::new(letters)
    }
}

/// Which identity a word was checked against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum WordIdentity {
    /// `P·W = W·P` (even) or `P·W = W·(I − P)` (odd).
    Exchange,
    /// `tr W = 0` for an odd number of derivative letters.
    OddTrace,
    /// `W = tr(W)·P` for even words starting or ending with P.
    Collapse,
    /// `tr(A·W·P) = tr(A·P)·tr(W·P)` for even words.
    Factorization,
    /// Identical-type words that the rules send to zero.
    Vanishing,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WordCheck {
    pub identity: WordIdentity,
    pub residual: f64,
}

/// Evaluate every identity the word's class is subject to.
pub fn check_word(word: &Word, p: &CMatrix, d: &CMatrix, db: &CMatrix, a: &CMatrix) -> Vec<WordCheck> {
    let n = p.dim();
    let id = CMatrix::identity(n);
    let w = word.eval(p, d, db);
    let m = word.derivative_count();
    let mut out = Vec::new();
    let mut push = |identity, residual| out.push(WordCheck { identity, residual });

    let rhs = if m % 2 == 0 { &w * p } else { &w * &(&id - p) };
    push(WordIdentity::Exchange, rel_residual(&(p * &w), &rhs));

    if m % 2 == 1 {
        push(WordIdentity::OddTrace, w.trace().norm());
    } else {
        if word.p_at_end() {
            push(WordIdentity::Collapse, rel_residual(&w, &p.scale(w.trace())));
        }
        let wp = &w * p;
        let lhs = (a * &wp).trace();
        let rhs: C64 = (a * p).trace() * wp.trace();
        push(WordIdentity::Factorization, (lhs - rhs).norm() / rhs.norm().max(1.0));
    }

    if word.is_identical_type() && word.identical_type_vanishes() {
        push(WordIdentity::Vanishing, w.norm_fro());
    }
    out
}
