//! Series files.
//!
//! The text format is line oriented, with 1-based indices:
//!
//! ```text
//! ellchain-series v1
//! g=3 m=3 r=2 k=3 d=4 a=2
//! C1 split (0,2) (0,2) free=0 rows (0,2) (0,2) (1,0)
//! C2 split (0,2) (2,0) free=0 rows (0,2) (0,1) (2,0)
//! C3 indecomposable deg=4 marked=(2,0) free=0 rows (0,1) (1,0) (2,0)
//! N1 match 1 2 3 forced -
//! N2 match 1 2 3 forced 2>1
//! ```
//!
//! One `C` line per component and one `N` line per node, in index order.
//! Rank-one components are written `C<i> line (p,q) ...`. `free=1` marks a
//! split bundle whose summands are a free choice, stored through a
//! representative. `N` lines give the matched right-hand row for each
//! left-hand row and the forced direction identifications `left>right`
//! (`-` for none). Blank lines and lines starting with `#` are ignored.
//! Serializing a parsed file gives back the same bytes when the input was
//! itself produced by [`to_text`].
//!
//! The structured format is JSON wrapped in a versioned envelope; readers
//! reject unknown versions.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Bundle, Component, ForcedPair, LimitSeries, NodeGluing, Row, Summand, VanishingTable};
use crate::chain::{ChainCurve, RankTwoBundle, SplitLineBundle};

pub const TEXT_MAGIC: &str = "ellchain-series";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: {field}: {message}")]
    Field {
        line: usize,
        field: String,
        message: String,
    },
    #[error("unsupported format version {0} (this build reads version {FORMAT_VERSION})")]
    Version(String),
    #[error("structured input: {0}")]
    Json(String),
}

fn field_err(line: usize, field: &str, message: impl Into<String>) -> ParseError {
    ParseError::Field {
        line,
        field: field.to_owned(),
        message: message.into(),
    }
}

fn pair(p: (i64, i64)) -> String {
    format!("({},{})", p.0, p.1)
}

pub fn to_text(s: &LimitSeries) -> String {
    let mut out = String::new();
    out.push_str(&format!("{TEXT_MAGIC} v{FORMAT_VERSION}\n"));
    out.push_str(&format!(
        "g={} m={} r={} k={} d={} a={}\n",
        s.chain.genus(),
        s.chain.length(),
        s.rank,
        s.k,
        s.degree,
        s.twist
    ));
    for (i, c) in s.components.iter().enumerate() {
        let bundle = match &c.bundle {
            Bundle::Line(l) => format!("line {}", pair((l.p, l.q))),
            Bundle::RankTwo(RankTwoBundle::Split { first, second }) => {
                format!(
                    "split {} {}",
                    pair((first.p, first.q)),
                    pair((second.p, second.q))
                )
            }
            Bundle::RankTwo(RankTwoBundle::Indecomposable {
                degree,
                marked_u,
                marked_v,
            }) => format!(
                "indecomposable deg={degree} marked={}",
                pair((*marked_u, *marked_v))
            ),
        };
        let rows: Vec<String> = c.table.rows.iter().map(|r| pair((r.u, r.v))).collect();
        out.push_str(&format!(
            "C{} {bundle} free={} rows {}\n",
            i + 1,
            c.moduli_freedom,
            rows.join(" ")
        ));
    }
    for (n, node) in s.nodes.iter().enumerate() {
        let matching: Vec<String> = node.matching.iter().map(|m| (m + 1).to_string()).collect();
        let forced = if node.forced_pairs.is_empty() {
            "-".to_owned()
        } else {
            node.forced_pairs
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join(" ")
        };
        out.push_str(&format!(
            "N{} match {} forced {forced}\n",
            n + 1,
            matching.join(" ")
        ));
    }
    out
}

fn parse_int<T: std::str::FromStr>(tok: &str, line: usize, field: &str) -> Result<T, ParseError> {
    tok.parse()
        .map_err(|_| field_err(line, field, format!("expected an integer, found `{tok}`")))
}

fn parse_pair(tok: &str, line: usize, field: &str) -> Result<(i64, i64), ParseError> {
    let inner = tok
        .strip_prefix('(')
        .and_then(|t| t.strip_suffix(')'))
        .ok_or_else(|| field_err(line, field, format!("expected `(x,y)`, found `{tok}`")))?;
    let (a, b) = inner
        .split_once(',')
        .ok_or_else(|| field_err(line, field, format!("expected `(x,y)`, found `{tok}`")))?;
    Ok((parse_int(a, line, field)?, parse_int(b, line, field)?))
}

fn parse_key<'a>(tok: Option<&'a str>, key: &str, line: usize) -> Result<&'a str, ParseError> {
    let tok = tok.ok_or_else(|| field_err(line, key, "missing"))?;
    tok.strip_prefix(key)
        .and_then(|t| t.strip_prefix('='))
        .ok_or_else(|| field_err(line, key, format!("expected `{key}=...`, found `{tok}`")))
}

fn expect_word(tok: Option<&str>, word: &str, line: usize) -> Result<(), ParseError> {
    match tok {
        Some(t) if t == word => Ok(()),
        Some(t) => Err(field_err(
            line,
            word,
            format!("expected `{word}`, found `{t}`"),
        )),
        None => Err(field_err(line, word, "missing")),
    }
}

fn parse_index(
    tok: Option<&str>,
    prefix: char,
    expected: usize,
    line: usize,
) -> Result<(), ParseError> {
    let field = if prefix == 'C' { "component" } else { "node" };
    let tok = tok.ok_or_else(|| field_err(line, field, "missing"))?;
    let idx: usize = tok
        .strip_prefix(prefix)
        .ok_or_else(|| {
            field_err(
                line,
                field,
                format!("expected `{prefix}<index>`, found `{tok}`"),
            )
        })
        .and_then(|t| parse_int(t, line, field))?;
    if idx != expected {
        return Err(field_err(
            line,
            field,
            format!("expected index {expected}, found {idx}"),
        ));
    }
    Ok(())
}

fn parse_component(text: &str, expected: usize, line: usize) -> Result<Component, ParseError> {
    let mut toks = text.split_whitespace();
    parse_index(toks.next(), 'C', expected, line)?;
    let kind = toks
        .next()
        .ok_or_else(|| field_err(line, "bundle", "missing"))?;
    let bundle = match kind {
        "line" => {
            let (p, q) = parse_pair(toks.next().unwrap_or(""), line, "bundle")?;
            Bundle::Line(SplitLineBundle::new(p, q))
        }
        "split" => {
            let a = parse_pair(toks.next().unwrap_or(""), line, "first")?;
            let b = parse_pair(toks.next().unwrap_or(""), line, "second")?;
            Bundle::RankTwo(RankTwoBundle::split(a, b))
        }
        "indecomposable" => {
            let degree = parse_int(parse_key(toks.next(), "deg", line)?, line, "deg")?;
            let (mu, mv) = parse_pair(parse_key(toks.next(), "marked", line)?, line, "marked")?;
            Bundle::RankTwo(RankTwoBundle::Indecomposable {
                degree,
                marked_u: mu,
                marked_v: mv,
            })
        }
        other => {
            return Err(field_err(
                line,
                "bundle",
                format!("unknown bundle kind `{other}`"),
            ))
        }
    };
    let free: u8 = parse_int(parse_key(toks.next(), "free", line)?, line, "free")?;
    expect_word(toks.next(), "rows", line)?;
    let rows = toks
        .map(|t| parse_pair(t, line, "rows").map(Row::from))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Component::new(bundle, VanishingTable::new(rows), free))
}

fn parse_node(text: &str, expected: usize, line: usize) -> Result<NodeGluing, ParseError> {
    let mut toks = text.split_whitespace().peekable();
    parse_index(toks.next(), 'N', expected, line)?;
    expect_word(toks.next(), "match", line)?;
    let mut matching = Vec::new();
    while let Some(tok) = toks.peek() {
        if *tok == "forced" {
            break;
        }
        let m: usize = parse_int(tok, line, "match")?;
        if m == 0 {
            return Err(field_err(line, "match", "indices are 1-based"));
        }
        matching.push(m - 1);
        toks.next();
    }
    expect_word(toks.next(), "forced", line)?;
    let mut forced_pairs = Vec::new();
    for tok in toks {
        if tok == "-" {
            continue;
        }
        let parsed = tok.split_once('>').and_then(|(l, r)| {
            let l = Summand::from_index(l.parse().ok()?)?;
            let r = Summand::from_index(r.parse().ok()?)?;
            Some(ForcedPair { left: l, right: r })
        });
        forced_pairs.push(parsed.ok_or_else(|| {
            field_err(
                line,
                "forced",
                format!("expected `<1|2>><1|2>`, found `{tok}`"),
            )
        })?);
    }
    Ok(NodeGluing {
        matching,
        forced_pairs,
    })
}

pub fn from_text(text: &str) -> Result<LimitSeries, ParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (ln, magic) = lines
        .next()
        .ok_or_else(|| field_err(1, "header", "empty input"))?;
    let mut head = magic.split_whitespace();
    if head.next() != Some(TEXT_MAGIC) {
        return Err(field_err(
            ln,
            "header",
            format!("expected `{TEXT_MAGIC} v{FORMAT_VERSION}`"),
        ));
    }
    let version = head.next().unwrap_or("");
    if version != format!("v{FORMAT_VERSION}") {
        return Err(ParseError::Version(version.to_owned()));
    }

    let (ln, params) = lines
        .next()
        .ok_or_else(|| field_err(ln + 1, "parameters", "missing"))?;
    let mut toks = params.split_whitespace();
    let g: u32 = parse_int(parse_key(toks.next(), "g", ln)?, ln, "g")?;
    let m: u32 = parse_int(parse_key(toks.next(), "m", ln)?, ln, "m")?;
    let rank: u32 = parse_int(parse_key(toks.next(), "r", ln)?, ln, "r")?;
    let k: usize = parse_int(parse_key(toks.next(), "k", ln)?, ln, "k")?;
    let degree: i64 = parse_int(parse_key(toks.next(), "d", ln)?, ln, "d")?;
    let twist: i64 = parse_int(parse_key(toks.next(), "a", ln)?, ln, "a")?;
    let chain = ChainCurve::prefix(g, m).map_err(|e| field_err(ln, "m", e.to_string()))?;

    let mut components = Vec::with_capacity(m as usize);
    let mut nodes = Vec::with_capacity(m as usize);
    for (ln, body) in lines {
        if body.starts_with('C') {
            if !nodes.is_empty() {
                return Err(field_err(
                    ln,
                    "component",
                    "component records must precede node records",
                ));
            }
            components.push(parse_component(body, components.len() + 1, ln)?);
        } else if body.starts_with('N') {
            nodes.push(parse_node(body, nodes.len() + 1, ln)?);
        } else {
            return Err(field_err(
                ln,
                "record",
                format!("unrecognised record `{body}`"),
            ));
        }
    }
    let last = text.lines().count();
    if components.len() != m as usize {
        return Err(field_err(
            last,
            "component",
            format!("{} component records for m = {m}", components.len()),
        ));
    }
    if nodes.len() + 1 != m as usize {
        return Err(field_err(
            last,
            "node",
            format!("{} node records for m = {m}", nodes.len()),
        ));
    }
    Ok(LimitSeries {
        chain,
        rank,
        k,
        degree,
        twist,
        components,
        nodes,
    })
}

#[derive(Serialize, Deserialize)]
struct Envelope<T> {
    format: String,
    version: u32,
    series: T,
}

pub fn to_json(s: &LimitSeries) -> String {
    let env = Envelope {
        format: TEXT_MAGIC.to_owned(),
        version: FORMAT_VERSION,
        series: s,
    };
    let mut out = serde_json::to_string_pretty(&env).expect("series serializes");
    out.push('\n');
    out
}

pub fn from_json(text: &str) -> Result<LimitSeries, ParseError> {
    #[derive(Deserialize)]
    struct Header {
        format: String,
        version: u32,
    }
    let header: Header = serde_json::from_str(text).map_err(|e| ParseError::Json(e.to_string()))?;
    if header.format != TEXT_MAGIC {
        return Err(ParseError::Json(format!(
            "unexpected format tag `{}`",
            header.format
        )));
    }
    if header.version != FORMAT_VERSION {
        return Err(ParseError::Version(header.version.to_string()));
    }
    let env: Envelope<LimitSeries> =
        serde_json::from_str(text).map_err(|e| ParseError::Json(e.to_string()))?;
    Ok(env.series)
}

/// Reads either format, deciding on the first non-blank character.
pub fn parse_any(text: &str) -> Result<LimitSeries, ParseError> {
    if text.trim_start().starts_with('{') {
        from_json(text)
    } else {
        from_text(text)
    }
}
