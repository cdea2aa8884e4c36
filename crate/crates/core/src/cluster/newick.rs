use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NewickError {
    #[error("unexpected end of input")]
    Eof,
    #[error("unexpected `{0}` at byte {1}")]
    Unexpected(char, usize),
    #[error("bad branch length `{0}`")]
    BadLength(String),
    #[error("trailing input at byte {0}")]
    Trailing(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub enum NewickTree {
    Leaf { label: String, length: Option<f64> },
    Node { children: Vec<NewickTree>, length: Option<f64> },
}

impl NewickTree {
    pub fn length(&self) -> Option<f64> {
        match self {
            NewickTree::Leaf { length, .. } | NewickTree::Node { length, .. } => *length,
        }
    }

    pub fn set_length(&mut self, l: f64) {
        match self {
            NewickTree::Leaf { length, .. } | NewickTree::Node { length, .. } => *length = Some(l),
        }
    }

    /// Leaf labels, left to right.
    pub fn labels(&self) -> Vec<&str> {
        match self {
            NewickTree::Leaf { label, .. } => vec![label.as_str()],
            NewickTree::Node { children, .. } => children.iter().flat_map(|c| c.labels()).collect(),
        }
    }

    /// Parses one tree terminated by `;`.
    pub fn parse(s: &str) -> Result<Self, NewickError> {
        let mut p = Parser { s: s.as_bytes(), pos: 0 };
        let t = p.tree()?;
        p.skip_ws();
        match p.peek() {
            Some(b';') => p.pos += 1,
            Some(c) => return Err(NewickError::Unexpected(c as char, p.pos)),
            None => return Err(NewickError::Eof),
        }
        p.skip_ws();
        if p.pos != s.len() {
            return Err(NewickError::Trailing(p.pos));
        }
        Ok(t)
    }
}

fn needs_quotes(label: &str) -> bool {
    label.is_empty() || label.bytes().any(|b| b"()[]':;, \t\n".contains(&b))
}

impl fmt::Display for NewickTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NewickTree::Leaf { label, .. } if needs_quotes(label) => write!(f, "'{}'", label.replace('\'', "''"))?,
            NewickTree::Leaf { label, .. } => f.write_str(label)?,
            NewickTree::Node { children, .. } => {
                f.write_str("(")?;
                for (i, c) in children.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{c}")?;
                }
                f.write_str(")")?;
            }
        }
        if let Some(l) = self.length() {
            write!(f, ":{l}")?;
        }
        Ok(())
    }
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<u8> {
        self.s.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(|c| c.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn tree(&mut self) -> Result<NewickTree, NewickError> {
        self.skip_ws();
        let mut t = if self.peek() == Some(b'(') {
            self.pos += 1;
            let mut children = vec![self.tree()?];
            loop {
                self.skip_ws();
                match self.peek() {
                    Some(b',') => {
                        self.pos += 1;
                        children.push(self.tree()?);
                    }
                    Some(b')') => {
                        self.pos += 1;
                        break;
                    }
                    Some(c) => return Err(NewickError::Unexpected(c as char, self.pos)),
                    None => return Err(NewickError::Eof),
                }
            }
            NewickTree::Node { children, length: None }
        } else {
            NewickTree::Leaf {
                label: self.label()?,
                length: None,
            }
        };
        self.skip_ws();
        if self.peek() == Some(b':') {
            self.pos += 1;
            let start = self.pos;
            while self.peek().is_some_and(|c| !b",);".contains(&c) && !c.is_ascii_whitespace()) {
                self.pos += 1;
            }
            let text = String::from_utf8_lossy(&self.s[start..self.pos]).into_owned();
            let l = text.parse().map_err(|_| NewickError::BadLength(text))?;
            t.set_length(l);
        }
        Ok(t)
    }

    fn label(&mut self) -> Result<String, NewickError> {
        if self.peek() == Some(b'\'') {
            self.pos += 1;
            let mut out = Vec::new();
            loop {
                match self.peek() {
                    None => return Err(NewickError::Eof),
                    Some(b'\'') if self.s.get(self.pos + 1) == Some(&b'\'') => {
                        out.push(b'\'');
                        self.pos += 2;
                    }
                    Some(b'\'') => {
                        self.pos += 1;
                        break;
                    }
                    Some(c) => {
                        out.push(c);
                        self.pos += 1;
                    }
                }
            }
            return Ok(String::from_utf8_lossy(&out).into_owned());
        }
        let start = self.pos;
        while self.peek().is_some_and(|c| !b"()[]':;,".contains(&c) && !c.is_ascii_whitespace()) {
            self.pos += 1;
        }
        if self.pos == start {
            return match self.peek() {
                Some(c) => Err(NewickError::Unexpected(c as char, self.pos)),
                None => Err(NewickError::Eof),
            };
        }
        Ok(String::from_utf8_lossy(&self.s[start..self.pos]).into_owned())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_prints() {
        let s = "((a:0.1,'b c':0.1):0.4,'it''s':0.5);";
        let t = NewickTree::parse(s).unwrap();
        assert_eq!(t.labels(), vec!["a", "b c", "it's"]);
        assert_eq!(format!("{t};"), s);
    }

    #[test]
    fn rejects_garbage() {
        assert_eq!(NewickTree::parse("(a,b)"), Err(NewickError::Eof));
        assert!(matches!(NewickTree::parse("(a:x,b);"), Err(NewickError::BadLength(_))));
        assert!(matches!(NewickTree::parse("(a,b);c"), Err(NewickError::Trailing(_))));
        assert!(matches!(NewickTree::parse("(,b);"), Err(NewickError::Unexpected(',', 1))));
    }
}
