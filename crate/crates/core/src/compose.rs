//! Method composition: `A+X`, `sA+sX`, `X`.
//!
//! Grammar:
//!
//! ```text
//! expr := term ('+' term)*
//! term := 's'? LETTER          LETTER ∈ {A,B,C,D,W,X,Y,Z}
//! ```
//!
//! Plain terms are averaged and the average is sharpened (a bare letter is
//! therefore a sharpened letter). `s`-prefixed terms are each sharpened and
//! then averaged, with no final sharpening. Mixing both forms is rejected.
//! Sharpening is always [`sharpen_complex`].

use core::fmt;
use core::str::FromStr;

use alloc::vec;
use alloc::vec::Vec;

use crate::amplify::{letter_method, AmplifyParams, Letter};
use crate::error::Result;
use crate::image::{clip01, ImageBuf};
use crate::sharpen::{sharpen_complex, SharpenParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Term {
    pub letter: Letter,
    pub pre_sharpened: bool,
}

/// A parsed composition. Invariant: at least one term, and either every term
/// is pre-sharpened (`whole_expr_sharpened == false`) or none is
/// (`whole_expr_sharpened == true`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MethodExpr {
    terms: Vec<Term>,
    whole_expr_sharpened: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseErrorKind {
    #[error("empty method expression")]
    Empty,
    #[error("unknown method letter '{0}'")]
    UnknownLetter(char),
    #[error("expected a method letter")]
    ExpectedLetter,
    #[error("expected '+' between terms, found '{0}'")]
    ExpectedPlus(char),
    #[error("expression ends with '+'")]
    TrailingPlus,
    #[error("cannot mix sharpened (sX) and plain (X) terms")]
    MixedPrefixes,
}

/// A parse failure at a character offset into the input.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{kind} at position {position}")]
pub struct ParseError {
    pub position: usize,
    pub kind: ParseErrorKind,
}

impl ParseError {
    fn at(position: usize, kind: ParseErrorKind) -> Self {
        Self { position, kind }
    }
}

impl MethodExpr {
    /// Plain terms averaged, then sharpened.
    pub fn sharpened_average(letters: &[Letter]) -> Option<Self> {
        Self::build(letters, false)
    }

    /// Each term sharpened, then averaged.
    pub fn average_of_sharpened(letters: &[Letter]) -> Option<Self> {
        Self::build(letters, true)
    }

    fn build(letters: &[Letter], pre_sharpened: bool) -> Option<Self> {
        if letters.is_empty() {
            return None;
        }
        Some(Self {
            terms: letters
                .iter()
                .map(|&letter| Term { letter, pre_sharpened })
                .collect(),
            whole_expr_sharpened: !pre_sharpened,
        })
    }

    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let chars: Vec<(usize, char)> = text
            .chars()
            .enumerate()
            .filter(|(_, c)| !c.is_whitespace())
            .collect();
        if chars.is_empty() {
            return Err(ParseError::at(0, ParseErrorKind::Empty));
        }

        let mut terms = Vec::new();
        let mut first_prefix: Option<bool> = None;
        let mut i = 0;
        loop {
            let term_start = chars[i].0;
            let mut prefixed = false;
            if chars[i].1 == 's' {
                prefixed = true;
                i += 1;
            }
            let Some(&(pos, c)) = chars.get(i) else {
                return Err(ParseError::at(text.chars().count(), ParseErrorKind::ExpectedLetter));
            };
            let letter = match Letter::from_char(c) {
                Some(l) => l,
                None if c == '+' => return Err(ParseError::at(pos, ParseErrorKind::ExpectedLetter)),
                None => return Err(ParseError::at(pos, ParseErrorKind::UnknownLetter(c))),
            };
            match first_prefix {
                None => first_prefix = Some(prefixed),
                Some(p) if p != prefixed => {
                    return Err(ParseError::at(term_start, ParseErrorKind::MixedPrefixes))
                }
                Some(_) => {}
            }
            terms.push(Term {
                letter,
                pre_sharpened: prefixed,
            });
            i += 1;

            match chars.get(i) {
                None => break,
                Some(&(pos, '+')) => {
                    if i + 1 == chars.len() {
                        return Err(ParseError::at(pos, ParseErrorKind::TrailingPlus));
                    }
                    i += 1;
                }
                Some(&(pos, c)) => return Err(ParseError::at(pos, ParseErrorKind::ExpectedPlus(c))),
            }
        }

        let pre = first_prefix.unwrap_or(false);
        Ok(Self {
            terms,
            whole_expr_sharpened: !pre,
        })
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn whole_expr_sharpened(&self) -> bool {
        self.whole_expr_sharpened
    }

    /// Runs the composition on an RGB image; the result is clipped to `[0, 1]`.
    ///
    /// Terms are summed in letter order, so reordering the expression does
    /// not change a single bit of the output. Repeated letters are computed
    /// once.
    pub fn evaluate(
        &self,
        img: &ImageBuf,
        amplify: &AmplifyParams,
        sharpen: &SharpenParams,
    ) -> crate::Result<ImageBuf> {
        img.ensure_rgb()?;
        let mut ordered = self.terms.clone();
        ordered.sort_by_key(|t| t.letter);

        let mut cache: [Option<ImageBuf>; 8] = Default::default();
        let mut sum = vec![0.0f64; img.data().len()];
        for term in &ordered {
            let slot = &mut cache[term.letter.ordinal()];
            if slot.is_none() {
                let mut out = letter_method(img, term.letter, amplify)?;
                if term.pre_sharpened {
                    out = sharpen_complex(&out, sharpen)?;
                }
                *slot = Some(out);
            }
            let out = slot.as_ref().expect("filled above");
            for (acc, v) in sum.iter_mut().zip(out.data()) {
                *acc += v;
            }
        }
        let n = ordered.len() as f64;
        let (h, w, ch) = img.shape();
        let mean = ImageBuf::new(h, w, ch, sum.into_iter().map(|v| v / n).collect())?;

        if self.whole_expr_sharpened {
            sharpen_complex(&mean, sharpen)
        } else {
            Ok(clip01(&mean))
        }
    }
}

impl FromStr for MethodExpr {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, ParseError> {
        Self::parse(s)
    }
}

/// Canonical text, e.g. `sA+sC`.
impl fmt::Display for MethodExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, term) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str("+")?;
            }
            if term.pre_sharpened {
                f.write_str("s")?;
            }
            write!(f, "{}", term.letter)?;
        }
        Ok(())
    }
}
