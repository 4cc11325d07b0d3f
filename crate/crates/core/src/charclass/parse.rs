//! Textual format for rings and bundles:
//!
//! ```text
//! ring a:1 b:1 / a^3 b^2
//! bundle TQ rank 2 w = 1 + a + a^2
//! ```

use super::{F2Element, Ring, SWClass};
use crate::error::Error;
use crate::Result;

/// Parses `ring <name>:<degree> ... / <name>^<power> ...`. Every generator
/// must carry exactly one pure-power relation.
pub fn parse_ring(text: &str) -> Result<Ring> {
    let text = text.trim();
    let rest = text
        .strip_prefix("ring")
        .ok_or_else(|| Error::Parse("expected 'ring ...'".into()))?;
    let (gens_part, rels_part) = rest
        .split_once('/')
        .ok_or_else(|| Error::Parse("expected '/' between generators and relations".into()))?;

    let mut gens: Vec<(String, u32)> = Vec::new();
    for tok in gens_part.split_whitespace() {
        let (name, degree) = tok
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("generator '{tok}' is not name:degree")))?;
        let degree: u32 = degree
            .parse()
            .map_err(|_| Error::Parse(format!("bad degree in '{tok}'")))?;
        gens.push((name.to_string(), degree));
    }

    let mut nilps: Vec<Option<u32>> = vec![None; gens.len()];
    for tok in rels_part.split_whitespace() {
        let (name, power) = tok
            .split_once('^')
            .ok_or_else(|| Error::Parse(format!("relation '{tok}' is not name^power")))?;
        let power: u32 = power
            .parse()
            .map_err(|_| Error::Parse(format!("bad power in '{tok}'")))?;
        let idx = gens
            .iter()
            .position(|(n, _)| n == name)
            .ok_or_else(|| Error::Parse(format!("relation on unknown generator '{name}'")))?;
        if nilps[idx].replace(power).is_some() {
            return Err(Error::Parse(format!("duplicate relation on '{name}'")));
        }
    }

    let triples: Vec<(&str, u32, u32)> = gens
        .iter()
        .zip(&nilps)
        .map(|((name, degree), nilp)| {
            nilp.map(|p| (name.as_str(), *degree, p))
                .ok_or_else(|| Error::Parse(format!("generator '{name}' has no relation")))
        })
        .collect::<Result<_>>()?;
    Ring::new(&triples)
}

/// Parses a sum of monomials like `1 + a + a^2 b` into a ring element.
/// `0` is the zero element.
pub fn parse_element(ring: &Ring, text: &str) -> Result<F2Element> {
    if text.trim() == "0" {
        return Ok(ring.zero());
    }
    let mut out = ring.zero();
    for term in text.split('+') {
        let term = term.trim();
        if term.is_empty() {
            return Err(Error::Parse("empty term in element".into()));
        }
        let mut mono = ring.one();
        if term != "1" {
            for factor in term.split([' ', '*']).filter(|f| !f.is_empty()) {
                let (name, power) = match factor.split_once('^') {
                    Some((n, p)) => (
                        n,
                        p.parse::<u32>()
                            .map_err(|_| Error::Parse(format!("bad power in '{factor}'")))?,
                    ),
                    None => (factor, 1),
                };
                mono = mono.mul(&ring.generator(name)?.pow(power)?)?;
            }
        }
        out = out.add(&mono)?;
    }
    Ok(out)
}

/// Parses `bundle <name> rank <r> w = <total class>`, returning the name and
/// the class.
pub fn parse_bundle(ring: &Ring, text: &str) -> Result<(String, SWClass)> {
    let text = text.trim();
    let rest = text
        .strip_prefix("bundle")
        .ok_or_else(|| Error::Parse("expected 'bundle ...'".into()))?;
    let (head, total_text) = rest
        .split_once('=')
        .ok_or_else(|| Error::Parse("expected '=' before the total class".into()))?;
    let tokens: Vec<&str> = head.split_whitespace().collect();
    match tokens.as_slice() {
        [name, "rank", rank, "w"] => {
            let rank: u32 = rank
                .parse()
                .map_err(|_| Error::Parse(format!("bad rank '{rank}'")))?;
            let total = parse_element(ring, total_text)?;
            Ok((name.to_string(), SWClass::from_total(ring, rank, &total)?))
        }
        _ => Err(Error::Parse(
            "expected 'bundle <name> rank <r> w = ...'".into(),
        )),
    }
}
