//! Small expression language for `print-series`.
//!
//! ```text
//! expr  := term (("+" | "-") term)*
//! term  := unary (("*" | "/") unary)*
//! unary := "-" unary | power
//! power := atom ("^" ["-"] int)?
//! atom  := rational | "f" | "f0" | "z" | "one" | "h" | "(" expr ")"
//!        | "d" "(" expr ")" | "exp" "(" expr ")" | "sqrt" "(" expr ")"
//!        | "reflect" "(" expr ")" | "shift" "(" expr "," ["-"] rational ")"
//! ```
//! `h` is the formal parameter, `shift(a, c)` is `a(z + c h)`.

use hqva::series::{q, HSeries, Q, Trunc, INF};
use hqva::tau::fmt_q;
use std::str::FromStr;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(String),
    Ident(String),
    Sym(char),
}

fn lex(s: &str) -> Result<Vec<Tok>, String> {
    let cs: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < cs.len() {
        let c = cs[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let st = i;
            while i < cs.len() && cs[i].is_ascii_digit() {
                i += 1;
            }
            out.push(Tok::Num(cs[st..i].iter().collect()));
        } else if c.is_ascii_alphabetic() {
            let st = i;
            while i < cs.len() && (cs[i].is_ascii_alphanumeric() || cs[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(cs[st..i].iter().collect()));
        } else if "+-*/^(),".contains(c) {
            out.push(Tok::Sym(c));
            i += 1;
        } else {
            return Err(format!("unexpected character `{c}`"));
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
    t: Trunc,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), String> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(format!("expected `{c}`"))
        }
    }

    fn int(&mut self) -> Result<i64, String> {
        let neg = self.eat('-');
        match self.toks.get(self.pos).cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                let v: i64 = n.parse().map_err(|_| format!("integer `{n}` out of range"))?;
                Ok(if neg { -v } else { v })
            }
            _ => Err("expected an integer".into()),
        }
    }

    fn rational(&mut self) -> Result<Q, String> {
        let a = self.int()?;
        if self.eat('/') {
            let b = self.int()?;
            if b == 0 {
                return Err("zero denominator".into());
            }
            return Ok(Q::from_str(&format!("{a}/{b}")).expect("two integers"));
        }
        Ok(q(a))
    }

    fn expr(&mut self) -> Result<HSeries, String> {
        let mut a = self.term()?;
        loop {
            if self.eat('+') {
                a = a.add_s(&self.term()?);
            } else if self.eat('-') {
                a = a.sub_s(&self.term()?);
            } else {
                return Ok(a);
            }
        }
    }

    fn term(&mut self) -> Result<HSeries, String> {
        let mut a = self.unary()?;
        loop {
            if self.eat('*') {
                a = a.mul_s(&self.unary()?);
            } else if self.eat('/') {
                a = a.div_s(&self.unary()?).map_err(|e| e.to_string())?;
            } else {
                return Ok(a);
            }
        }
    }

    fn unary(&mut self) -> Result<HSeries, String> {
        if self.eat('-') {
            return Ok(self.unary()?.neg_s());
        }
        let a = self.atom()?;
        if self.eat('^') {
            let e = self.int()?;
            return a.pow_i(e).map_err(|e| e.to_string());
        }
        Ok(a)
    }

    fn call(&mut self, name: &str) -> Result<HSeries, String> {
        self.expect('(')?;
        let a = self.expr()?;
        let r = match name {
            "d" => a.derive(),
            "exp" => a.exp().map_err(|e| e.to_string())?,
            "sqrt" => a.sqrt().map_err(|e| e.to_string())?,
            "reflect" => a.reflect(),
            "shift" => {
                self.expect(',')?;
                let c = self.rational()?;
                a.shift_z(&c)
            }
            _ => unreachable!(),
        };
        self.expect(')')?;
        Ok(r)
    }

    fn atom(&mut self) -> Result<HSeries, String> {
        match self.toks.get(self.pos).cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                let v = Q::from_str(&n).map_err(|_| format!("bad number `{n}`"))?;
                Ok(HSeries::constant(self.t, v))
            }
            Some(Tok::Ident(id)) => {
                self.pos += 1;
                match id.as_str() {
                    "h" => Ok(HSeries::mono(self.t, 1, 0, q(1))),
                    "d" | "exp" | "sqrt" | "reflect" | "shift" => self.call(&id),
                    other => HSeries::base(self.t, other).map_err(|e| e.to_string()),
                }
            }
            Some(Tok::Sym('(')) => {
                self.pos += 1;
                let a = self.expr()?;
                self.expect(')')?;
                Ok(a)
            }
            Some(t) => Err(format!("unexpected token {t:?}")),
            None => Err("unexpected end of input".into()),
        }
    }
}

pub fn eval(src: &str, t: Trunc) -> Result<HSeries, String> {
    let mut p = Parser { toks: lex(src)?, pos: 0, t };
    let a = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(format!("trailing input at token {}", p.pos));
    }
    Ok(a)
}

/// One line per `h` order: exact terms then the precision ceiling.
pub fn render(s: &HSeries) -> String {
    let mut out = String::new();
    for (k, l) in s.layers.iter().enumerate() {
        let mut terms: Vec<String> = l
            .terms()
            .map(|(e, x)| match e {
                0 => fmt_q(x),
                1 => format!("{}*z", fmt_q(x)),
                _ => format!("{}*z^{e}", fmt_q(x)),
            })
            .collect();
        if terms.is_empty() {
            terms.push("0".into());
        }
        let tail = if l.prec >= INF { String::new() } else { format!(" + O(z^{})", l.prec) };
        out.push_str(&format!("h^{k}: {}{tail}\n", terms.join(" + ")));
    }
    out
}
