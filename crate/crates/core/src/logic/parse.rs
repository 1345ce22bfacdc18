//! Text syntax: `!`, `&`, `|`, `->`, parentheses, bare or double-quoted atom
//! names. Precedence `!` > `&` > `|` > `->`; `->` is right-associative.

use super::formula::Formula;
use crate::error::Error;

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Not,
    And,
    Or,
    Implies,
    Open,
    Close,
    Atom(String),
}

fn syntax(column: usize, message: impl Into<String>) -> Error {
    Error::ParseFormula { column, message: message.into() }
}

/// Tokens paired with their 1-based starting column.
fn tokenize(text: &str) -> Result<Vec<(usize, Token)>, Error> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let column = i + 1;
        let c = chars[i];
        match c {
            _ if c.is_whitespace() => i += 1,
            '!' => {
                tokens.push((column, Token::Not));
                i += 1;
            }
            '&' => {
                tokens.push((column, Token::And));
                i += 1;
            }
            '|' => {
                tokens.push((column, Token::Or));
                i += 1;
            }
            '(' => {
                tokens.push((column, Token::Open));
                i += 1;
            }
            ')' => {
                tokens.push((column, Token::Close));
                i += 1;
            }
            '-' if chars.get(i + 1) == Some(&'>') => {
                tokens.push((column, Token::Implies));
                i += 2;
            }
            '"' => {
                let mut name = String::new();
                i += 1;
                loop {
                    match chars.get(i) {
                        None => return Err(syntax(column, "unterminated quoted atom")),
                        Some('"') => {
                            i += 1;
                            break;
                        }
                        Some('\\') => {
                            let escaped = chars.get(i + 1).ok_or_else(|| syntax(i + 1, "dangling escape"))?;
                            name.push(*escaped);
                            i += 2;
                        }
                        Some(ch) => {
                            name.push(*ch);
                            i += 1;
                        }
                    }
                }
                if name.is_empty() {
                    return Err(syntax(column, "empty atom name"));
                }
                tokens.push((column, Token::Atom(name)));
            }
            _ if c.is_alphanumeric() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                tokens.push((column, Token::Atom(chars[start..i].iter().collect())));
            }
            _ => return Err(syntax(column, format!("unexpected character {c:?}"))),
        }
    }
    Ok(tokens)
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    end_column: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn column(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end_column, |(c, _)| *c)
    }

    fn implication(&mut self) -> Result<Formula, Error> {
        let lhs = self.disjunction()?;
        if self.peek() == Some(&Token::Implies) {
            self.pos += 1;
            let rhs = self.implication()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, Error> {
        let mut lhs = self.conjunction()?;
        while self.peek() == Some(&Token::Or) {
            self.pos += 1;
            lhs = Formula::or(lhs, self.conjunction()?);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Formula, Error> {
        let mut lhs = self.unary()?;
        while self.peek() == Some(&Token::And) {
            self.pos += 1;
            lhs = Formula::and(lhs, self.unary()?);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, Error> {
        if self.peek() == Some(&Token::Not) {
            self.pos += 1;
            return Ok(Formula::not(self.unary()?));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Formula, Error> {
        let column = self.column();
        match self.tokens.get(self.pos).map(|(_, t)| t.clone()) {
            Some(Token::Atom(name)) => {
                self.pos += 1;
                Ok(Formula::Atom(name))
            }
            Some(Token::Open) => {
                self.pos += 1;
                let inner = self.implication()?;
                if self.peek() != Some(&Token::Close) {
                    return Err(syntax(self.column(), "expected ')'"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(other) => Err(syntax(column, format!("unexpected {other:?}"))),
            None => Err(syntax(column, "unexpected end of input")),
        }
    }
}

pub(crate) fn parse(text: &str) -> Result<Formula, Error> {
    let tokens = tokenize(text)?;
    let mut parser = Parser { tokens, pos: 0, end_column: text.chars().count() + 1 };
    let formula = parser.implication()?;
    if parser.pos != parser.tokens.len() {
        return Err(syntax(parser.column(), "trailing input"));
    }
    Ok(formula)
}
