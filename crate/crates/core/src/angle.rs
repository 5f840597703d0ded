//! Parser for angle expressions such as `pi/8`, `-3*pi/4`, `2pi` or `0.39`.
//!
//! Grammar: `[+|-] factor (('*' | '/') factor | pi)*`, where a factor is a
//! decimal number or `pi`. Whitespace is ignored.

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AngleError(pub String);

impl std::fmt::Display for AngleError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for AngleError {}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Token {
    Number(f64),
    Pi,
    Mul,
    Div,
}

fn tokenize(text: &str) -> Result<Vec<Token>, AngleError> {
    let mut tokens = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' => i += 1,
            '*' => {
                tokens.push(Token::Mul);
                i += 1;
            }
            '/' => {
                tokens.push(Token::Div);
                i += 1;
            }
            'π' => {
                tokens.push(Token::Pi);
                i += 1;
            }
            'p' | 'P' => {
                if chars.get(i + 1).is_some_and(|n| n.eq_ignore_ascii_case(&'i')) {
                    tokens.push(Token::Pi);
                    i += 2;
                } else {
                    return Err(AngleError(format!("unexpected `{c}` at {i}")));
                }
            }
            '0'..='9' | '.' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
                if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                    let mut j = i + 1;
                    if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                        j += 1;
                    }
                    if j < chars.len() && chars[j].is_ascii_digit() {
                        while j < chars.len() && chars[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                let s: String = chars[start..i].iter().collect();
                let v: f64 = s.parse().map_err(|_| AngleError(format!("bad number `{s}`")))?;
                tokens.push(Token::Number(v));
            }
            _ => return Err(AngleError(format!("unexpected `{c}` at {i}"))),
        }
    }
    Ok(tokens)
}

/// Evaluate an angle expression in radians.
pub fn parse_angle(text: &str) -> Result<f64, AngleError> {
    let trimmed = text.trim();
    let (sign, body) = match trimmed.strip_prefix('-') {
        Some(rest) => (-1.0, rest),
        None => (1.0, trimmed.strip_prefix('+').unwrap_or(trimmed)),
    };
    let tokens = tokenize(body)?;
    let factor = |t: Option<&Token>| match t {
        Some(Token::Number(v)) => Some(*v),
        Some(Token::Pi) => Some(std::f64::consts::PI),
        _ => None,
    };
    let mut it = tokens.iter().peekable();
    let mut value = factor(it.next()).ok_or_else(|| AngleError("expected a number or `pi`".into()))?;
    while let Some(tok) = it.next() {
        match tok {
            Token::Mul => {
                value *= factor(it.next()).ok_or_else(|| AngleError("expected a factor after `*`".into()))?
            }
            Token::Div => {
                let d = factor(it.next()).ok_or_else(|| AngleError("expected a factor after `/`".into()))?;
                value /= d;
            }
            // implicit product, as in `3pi`
            Token::Pi => value *= std::f64::consts::PI,
            Token::Number(_) => return Err(AngleError("two numbers in a row".into())),
        }
    }
    let value = sign * value;
    if !value.is_finite() {
        return Err(AngleError(format!("`{text}` is not a finite angle")));
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn accepted_forms() {
        assert_eq!(parse_angle("pi/8").unwrap(), PI / 8.0);
        assert_eq!(parse_angle(" -3*pi/4 ").unwrap(), -3.0 * PI / 4.0);
        assert_eq!(parse_angle("2pi").unwrap(), 2.0 * PI);
        assert_eq!(parse_angle("π").unwrap(), PI);
        assert_eq!(parse_angle("0.25").unwrap(), 0.25);
        assert_eq!(parse_angle("1e-3").unwrap(), 1e-3);
        assert_eq!(parse_angle("+PI / 2").unwrap(), PI / 2.0);
    }

    #[test]
    fn rejected_forms() {
        for bad in ["", "pi/", "pi/0", "*2", "2 3", "p", "pie", "--1", "1/0", "1..2", "x"] {
            assert!(parse_angle(bad).is_err(), "{bad:?}");
        }
    }
}
