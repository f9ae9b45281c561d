//! Textual encoding `p^e * [[a,b],[c,d]]`; Galois-ring entries are written `(c0,c1,…)`.

use std::sync::Arc;

use super::context::LocalContext;
use super::matrix::LocalMatrix;
use crate::error::{Error, Result};

struct Cursor<'a> {
    s: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn err(&self, what: &str) -> Error {
        Error::InvalidInput(format!("matrix syntax: expected {what} at offset {}", self.pos))
    }

    fn peek(&self) -> Option<u8> {
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, lit: &str) -> bool {
        if self.s[self.pos..].starts_with(lit.as_bytes()) {
            self.pos += lit.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, lit: &str) -> Result<()> {
        if self.eat(lit) {
            Ok(())
        } else {
            Err(self.err(&format!("'{lit}'")))
        }
    }

    fn int(&mut self) -> Result<i128> {
        let start = self.pos;
        if matches!(self.peek(), Some(b'-') | Some(b'+')) {
            self.pos += 1;
        }
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        std::str::from_utf8(&self.s[start..self.pos])
            .ok()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| self.err("an integer"))
    }

    fn entry(&mut self) -> Result<Vec<i128>> {
        if self.eat("(") {
            let mut v = vec![self.int()?];
            while self.eat(",") {
                v.push(self.int()?);
            }
            self.expect(")")?;
            Ok(v)
        } else {
            Ok(vec![self.int()?])
        }
    }
}

/// Parses `p^e * [[a,b],[c,d]]` (the prefix is optional).
pub fn parse_local_matrix(ctx: &Arc<LocalContext>, text: &str) -> Result<LocalMatrix> {
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let mut cur = Cursor { s: compact.as_bytes(), pos: 0 };
    let mut exponent = 0i64;
    if cur.eat("p^") {
        exponent = i64::try_from(cur.int()?).map_err(|_| cur.err("a small exponent"))?;
        cur.expect("*")?;
    }
    cur.expect("[[")?;
    let a = cur.entry()?;
    cur.expect(",")?;
    let b = cur.entry()?;
    cur.expect("],[")?;
    let c = cur.entry()?;
    cur.expect(",")?;
    let d = cur.entry()?;
    cur.expect("]]")?;
    if cur.pos != compact.len() {
        return Err(cur.err("end of input"));
    }
    LocalMatrix::from_coeff_entries(ctx, exponent, [a, b, c, d])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_roundtrips() {
        let ctx = LocalContext::new(3, 2, 6).unwrap();
        let g = parse_local_matrix(&ctx, "p^-1 * [[(1,2), 3], [0, (9,1)]]").unwrap();
        assert_eq!(g.exponent(), -1);
        assert_eq!(g.to_string(), "p^-1 * [[(1,2),(3,0)],[(0,0),(9,1)]]");
        assert_eq!(parse_local_matrix(&ctx, &g.to_string()).unwrap(), g);
    }

    #[test]
    fn content_moves_into_the_exponent() {
        let ctx = LocalContext::new(2, 1, 6).unwrap();
        let g = parse_local_matrix(&ctx, "[[2,0],[0,4]]").unwrap();
        assert_eq!(g.exponent(), 1);
        assert_eq!(g.to_string(), "p^1 * [[1,0],[0,2]]");
    }

    #[test]
    fn rejects_garbage() {
        let ctx = LocalContext::new(2, 1, 6).unwrap();
        for bad in ["", "[[1,0],[0]]", "p^x*[[1,0],[0,1]]", "[[1,0],[0,1]]]", "[[(1,1),0],[0,1]]"] {
            assert!(parse_local_matrix(&ctx, bad).is_err(), "{bad}");
        }
    }
}
