//! Canonical text forms and panic-free parsers.
//!
//! Field elements print as `a+b*r` with exact rationals, sections as sums of
//! `(coef)*X^a*Y^b*Z^c` terms in lexicographic monomial order.  These forms
//! round-trip bit-exactly; all parsers here reject malformed input with an
//! error (never a panic), since they also sit behind the cache and config
//! readers and the fuzz targets.

use crate::cyclotomic::Cyc;
use crate::eisenstein::Eis;
use crate::error::{Error, Result};
use crate::sections::{mono_degree, Section};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

const MAX_EXPONENT: u32 = 4096;

fn parse_bigint(s: &str) -> Result<BigInt> {
    if s.is_empty() || s.len() > 4096 {
        return Err(Error::Parse(format!("bad integer literal: {s:?}")));
    }
    s.parse::<BigInt>()
        .map_err(|_| Error::Parse(format!("bad integer literal: {s:?}")))
}

/// Parse an exact rational `n` or `n/d`.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        None => Ok(BigRational::from_integer(parse_bigint(s)?)),
        Some((n, d)) => {
            let den = parse_bigint(d)?;
            if den.is_zero() {
                return Err(Error::Parse("zero denominator".into()));
            }
            Ok(BigRational::new(parse_bigint(n)?, den))
        }
    }
}

/// Parse the canonical `a+b*r` form (also accepts `r`, `-r`, sums in any
/// order, and surrounding whitespace).
pub fn parse_cyc(s: &str) -> Result<Cyc> {
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(Error::Parse("empty field element".into()));
    }
    // split into signed terms at '+'/'-' that are not inside a literal
    let mut terms: Vec<String> = Vec::new();
    let mut cur = String::new();
    for (i, ch) in compact.chars().enumerate() {
        if (ch == '+' || ch == '-') && i != 0 {
            terms.push(cur.clone());
            cur.clear();
        }
        cur.push(ch);
    }
    terms.push(cur);
    let mut acc = Cyc::zero();
    let mut seen_a = false;
    let mut seen_b = false;
    for t in terms {
        let t = t.strip_prefix('+').unwrap_or(&t).to_string();
        let (is_r, body) = if let Some(b) = t.strip_suffix("*r") {
            (true, b.to_string())
        } else if t == "r" || t == "-r" {
            (true, t.replace('r', "1"))
        } else if let Some(b) = t.strip_suffix('r') {
            // bare coefficient form, e.g. "1+3r"
            (true, b.to_string())
        } else {
            (false, t)
        };
        let v = parse_rational(&body)?;
        if is_r {
            if seen_b {
                return Err(Error::Parse("duplicate r-part".into()));
            }
            seen_b = true;
            acc += &Cyc::new(BigRational::zero(), v);
        } else {
            if seen_a {
                return Err(Error::Parse("duplicate rational part".into()));
            }
            seen_a = true;
            acc += &Cyc::new(v, BigRational::zero());
        }
    }
    Ok(acc)
}

/// Parse an Eisenstein integer (a `Cyc` with integral coordinates).
pub fn parse_eis(s: &str) -> Result<Eis> {
    let c = parse_cyc(s)?;
    if !c.is_integral() {
        return Err(Error::Parse(format!("not an algebraic integer: {s}")));
    }
    let to_i64 = |x: &BigRational| -> Result<i64> {
        x.to_integer()
            .try_into()
            .map_err(|_| Error::Parse("integer out of range".into()))
    };
    Ok(Eis::new(to_i64(&c.a)?, to_i64(&c.b)?))
}

/// Parse the canonical section form produced by `Section`'s `Display`.
pub fn parse_section(s: &str) -> Result<Section> {
    let s = s.trim();
    if s == "0" {
        return Ok(Section::zero(0));
    }
    let mut terms = Vec::new();
    for part in s.split(" + ") {
        let part = part.trim();
        let rest = part
            .strip_prefix('(')
            .ok_or_else(|| Error::Parse(format!("term must start with '(': {part:?}")))?;
        let (coef_str, tail) = rest
            .split_once(")*")
            .ok_or_else(|| Error::Parse(format!("missing ')*' in term: {part:?}")))?;
        let coef = parse_cyc(coef_str)?;
        let mut exps = [0u32; 3];
        let pieces: Vec<&str> = tail.split('*').collect();
        if pieces.len() != 3 {
            return Err(Error::Parse(format!("expected X^a*Y^b*Z^c in {part:?}")));
        }
        for (slot, (piece, gen)) in pieces.iter().zip(["X^", "Y^", "Z^"]).enumerate() {
            let e = piece
                .strip_prefix(gen)
                .ok_or_else(|| Error::Parse(format!("expected {gen} in {piece:?}")))?;
            let e: u32 = e
                .parse()
                .map_err(|_| Error::Parse(format!("bad exponent {e:?}")))?;
            if e > MAX_EXPONENT {
                return Err(Error::Parse("exponent too large".into()));
            }
            exps[slot] = e;
        }
        if exps[0] > 2 {
            return Err(Error::Parse("X-exponent above 2 is not reduced".into()));
        }
        terms.push(((exps[0] as u8, exps[1] as u16, exps[2] as u16), coef));
    }
    let degree = mono_degree(&terms[0].0);
    let mut out = Section::zero(degree);
    for (m, c) in terms {
        if mono_degree(&m) != degree {
            return Err(Error::Parse("mixed degrees in section".into()));
        }
        out.add_term(m, c);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parse_cyc_round_trip_examples() {
        for s in ["759+261*r", "-4137+1683*r", "3-27*r", "72", "2*r", "-1/3+5/7*r", "0"] {
            let c = parse_cyc(s).unwrap();
            assert_eq!(c.to_string(), s);
        }
        assert_eq!(parse_cyc("r").unwrap(), Cyc::rho());
        assert_eq!(parse_cyc(" 1 + 2*r ").unwrap(), Cyc::from_pair(1, 2));
        assert!(parse_cyc("").is_err());
        assert!(parse_cyc("1+1+1").is_err());
        assert!(parse_cyc("1/0").is_err());
    }

    #[test]
    fn parse_section_round_trip() {
        let mut s = Section::zero(3);
        s.add_term((1, 1, 1), Cyc::from_pair(1, 2));
        s.add_term((0, 3, 0), Cyc::from_ratio(-1, 3));
        let text = s.to_string();
        assert_eq!(parse_section(&text).unwrap(), s);
        assert_eq!(parse_section("0").unwrap(), Section::zero(0));
        assert!(parse_section("(1)*X^3*Y^0*Z^0").is_err());
        assert!(parse_section("(1)*X^1*Y^0*Z^0 + (1)*X^0*Y^2*Z^0").is_err());
    }

    proptest! {
        #[test]
        fn cyc_round_trips(an in -999i64..999, ad in 1i64..99, bn in -999i64..999, bd in 1i64..99) {
            let c = Cyc::new(crate::cyclotomic::ratio(an, ad), crate::cyclotomic::ratio(bn, bd));
            prop_assert_eq!(parse_cyc(&c.to_string()).unwrap(), c);
        }

        #[test]
        fn parsers_never_panic(s in "\\PC0,60") {
            let _ = parse_cyc(&s);
            let _ = parse_eis(&s);
            let _ = parse_section(&s);
            let _ = parse_rational(&s);
        }
    }
}
