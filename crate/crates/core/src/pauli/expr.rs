//! Parser for Hamiltonian expressions such as `0.5*XX + 0.5*YY` or `1/2*ZZ`.
//!
//! ```text
//! expr        := ws sign? term (ws ('+' | '-') ws term)* ws
//! term        := coefficient ws '*' ws word
//! coefficient := decimal | integer '/' integer
//! word        := [IXYZ]+
//! ```

use super::{Hamiltonian, Pauli, PauliString};
use crate::error::{Error, Result};

struct Cursor {
    chars: Vec<char>,
    pos: usize,
}

impl Cursor {
    fn new(src: &str) -> Self {
        Self {
            chars: src.chars().collect(),
            pos: 0,
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn column(&self) -> usize {
        self.pos + 1
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            column: self.column(),
            message: message.into(),
        })
    }

    fn take_while(&mut self, f: impl Fn(char) -> bool) -> String {
        let start = self.pos;
        while self.peek().is_some_and(&f) {
            self.pos += 1;
        }
        self.chars[start..self.pos].iter().collect()
    }

    fn number(&mut self) -> Result<f64> {
        let start = self.column();
        let mut text = self.take_while(|c| c.is_ascii_digit() || c == '.');
        if matches!(self.peek(), Some('e' | 'E')) {
            text.push('e');
            self.pos += 1;
            if let Some(c @ ('+' | '-')) = self.peek() {
                text.push(c);
                self.pos += 1;
            }
            text.push_str(&self.take_while(|c| c.is_ascii_digit()));
        }
        if text.is_empty() {
            return self.err("expected a coefficient");
        }
        if self.peek() == Some('/') {
            self.pos += 1;
            let den_col = self.column();
            let den = self.take_while(|c| c.is_ascii_digit());
            let (Ok(p), Ok(q)) = (text.parse::<u64>(), den.parse::<u64>()) else {
                return Err(Error::Parse {
                    column: den_col,
                    message: format!("invalid rational '{text}/{den}'"),
                });
            };
            if q == 0 {
                return Err(Error::Parse {
                    column: den_col,
                    message: "zero denominator".into(),
                });
            }
            return Ok(p as f64 / q as f64);
        }
        text.parse::<f64>().map_err(|_| Error::Parse {
            column: start,
            message: format!("invalid number '{text}'"),
        })
    }

    fn word(&mut self) -> Result<PauliString> {
        let start = self.pos;
        let mut letters = Vec::new();
        while let Some(c) = self.peek() {
            if !c.is_ascii_alphabetic() {
                break;
            }
            match Pauli::from_char(c) {
                Some(p) => letters.push(p),
                None => return self.err(format!("invalid Pauli letter '{c}'")),
            }
            self.pos += 1;
        }
        if letters.is_empty() {
            self.pos = start;
            return self.err("expected a Pauli word");
        }
        PauliString::new(letters)
    }
}

/// Parses a coefficient on its own: decimal or `p/q`, optionally signed.
pub fn parse_coefficient(text: &str) -> Result<f64> {
    let mut cur = Cursor::new(text);
    cur.skip_ws();
    let sign = match cur.peek() {
        Some('-') => {
            cur.pos += 1;
            -1.0
        }
        Some('+') => {
            cur.pos += 1;
            1.0
        }
        _ => 1.0,
    };
    cur.skip_ws();
    let v = cur.number()?;
    cur.skip_ws();
    if cur.peek().is_some() {
        return cur.err("unexpected trailing input");
    }
    Ok(sign * v)
}

pub fn parse_hamiltonian(text: &str) -> Result<Hamiltonian> {
    let mut cur = Cursor::new(text);
    let mut terms: Vec<(f64, PauliString)> = Vec::new();
    cur.skip_ws();
    let mut sign = match cur.peek() {
        Some('-') => {
            cur.pos += 1;
            -1.0
        }
        Some('+') => {
            cur.pos += 1;
            1.0
        }
        _ => 1.0,
    };
    loop {
        cur.skip_ws();
        let coeff = cur.number()?;
        cur.skip_ws();
        if cur.peek() != Some('*') {
            return cur.err("expected '*' between coefficient and word");
        }
        cur.pos += 1;
        cur.skip_ws();
        let word_col = cur.column();
        let word = cur.word()?;
        if let Some((_, first)) = terms.first() {
            if first.n_qubits() != word.n_qubits() {
                return Err(Error::Parse {
                    column: word_col,
                    message: format!(
                        "word '{word}' has {} letters, expected {}",
                        word.n_qubits(),
                        first.n_qubits()
                    ),
                });
            }
        }
        terms.push((sign * coeff, word));
        cur.skip_ws();
        match cur.peek() {
            None => break,
            Some('+') => sign = 1.0,
            Some('-') => sign = -1.0,
            Some(c) => return cur.err(format!("unexpected '{c}'")),
        }
        cur.pos += 1;
    }
    let n = terms[0].1.n_qubits();
    Hamiltonian::from_terms(n, terms)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_and_rational() {
        let a = parse_hamiltonian("0.5*XX + 0.5*YY").unwrap();
        let b = parse_hamiltonian("1/2*XX+1/2*YY").unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 2);
    }

    #[test]
    fn signs_and_exponents() {
        let h = parse_hamiltonian("-1e-1*ZI - 2*IZ").unwrap();
        assert_eq!(h.coefficient(&"ZI".parse().unwrap()), -0.1);
        assert_eq!(h.coefficient(&"IZ".parse().unwrap()), -2.0);
    }

    #[test]
    fn bad_letter_names_letter_and_column() {
        let err = parse_hamiltonian("0.5*ZQ").unwrap_err();
        assert_eq!(
            err,
            Error::Parse {
                column: 6,
                message: "invalid Pauli letter 'Q'".into()
            }
        );
    }

    #[test]
    fn length_mismatch() {
        assert!(matches!(
            parse_hamiltonian("0.5*XX + 0.5*Y"),
            Err(Error::Parse { column: 14, .. })
        ));
    }

    #[test]
    fn missing_star_and_trailing_garbage() {
        assert!(parse_hamiltonian("0.5 XX").is_err());
        assert!(parse_hamiltonian("0.5*XX 3").is_err());
        assert!(parse_hamiltonian("").is_err());
        assert!(parse_hamiltonian("1/0*X").is_err());
    }

    #[test]
    fn coefficient_alone() {
        assert_eq!(parse_coefficient("-3/4").unwrap(), -0.75);
        assert_eq!(parse_coefficient(" 2.5 ").unwrap(), 2.5);
        assert!(parse_coefficient("2.5x").is_err());
    }
}
