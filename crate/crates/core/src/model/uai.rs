//! Reader and writer for the UAI `MARKOV` text format.
//!
//! Tables are stored in weight space on disk and converted to natural logs
//! on load. Evidence files and comments are not supported.

use std::fmt::Write as _;

use super::{Factor, FactorGraph};
use crate::error::{Error, Result};

struct Tokens<'a> {
    inner: Box<dyn Iterator<Item = (usize, &'a str)> + 'a>,
    last_line: usize,
}

impl<'a> Tokens<'a> {
    fn new(text: &'a str) -> Self {
        let inner = text
            .lines()
            .enumerate()
            .flat_map(|(i, line)| line.split_whitespace().map(move |t| (i + 1, t)));
        Tokens {
            inner: Box::new(inner),
            last_line: 1,
        }
    }

    fn next(&mut self, what: &str) -> Result<(usize, &'a str)> {
        match self.inner.next() {
            Some((line, tok)) => {
                self.last_line = line;
                Ok((line, tok))
            }
            None => Err(Error::parse(
                self.last_line,
                format!("unexpected end of input, expected {what}"),
            )),
        }
    }

    fn count(&mut self, what: &str) -> Result<(usize, i64)> {
        let (line, tok) = self.next(what)?;
        tok.parse::<i64>()
            .map(|v| (line, v))
            .map_err(|_| Error::parse(line, format!("expected {what}, found {tok:?}")))
    }

    fn index(&mut self, what: &str) -> Result<(usize, usize)> {
        let (line, v) = self.count(what)?;
        usize::try_from(v)
            .map(|v| (line, v))
            .map_err(|_| Error::parse(line, format!("{what} must be nonnegative, found {v}")))
    }
}

/// Parses a UAI `MARKOV` network.
pub fn parse_uai(text: &str) -> Result<FactorGraph> {
    let mut tokens = Tokens::new(text);

    let (line, kind) = tokens.next("network type")?;
    if !kind.eq_ignore_ascii_case("MARKOV") {
        return Err(Error::parse(
            line,
            format!("malformed header: expected MARKOV, found {kind:?}"),
        ));
    }

    let (_, num_vars) = tokens.index("variable count")?;
    let mut cardinalities = Vec::with_capacity(num_vars);
    for _ in 0..num_vars {
        let (line, card) = tokens.count("cardinality")?;
        if card <= 0 {
            return Err(Error::parse(
                line,
                format!("cardinality must be positive, found {card}"),
            ));
        }
        cardinalities.push(card as usize);
    }

    let (_, num_factors) = tokens.index("factor count")?;
    let mut scopes = Vec::with_capacity(num_factors);
    for _ in 0..num_factors {
        let (line, arity) = tokens.index("factor arity")?;
        let mut scope = Vec::with_capacity(arity);
        for _ in 0..arity {
            let (vline, v) = tokens.index("variable index")?;
            if v >= num_vars {
                return Err(Error::parse(
                    vline,
                    format!("variable index {v} out of range (have {num_vars})"),
                ));
            }
            if scope.contains(&v) {
                return Err(Error::parse(vline, format!("variable {v} repeated in scope")));
            }
            scope.push(v);
        }
        scopes.push((line, scope));
    }

    let mut factors = Vec::with_capacity(num_factors);
    for (fi, (_, scope)) in scopes.into_iter().enumerate() {
        let expected: usize = scope.iter().map(|&v| cardinalities[v]).product();
        let (line, count) = tokens.index("table size")?;
        if count != expected {
            return Err(Error::parse(
                line,
                format!("table length mismatch for factor {fi}: declared {count}, scope needs {expected}"),
            ));
        }
        let mut table = Vec::with_capacity(count);
        for _ in 0..count {
            let (line, tok) = tokens.next("table entry")?;
            let value: f64 = tok
                .parse()
                .map_err(|_| Error::parse(line, format!("invalid table entry {tok:?}")))?;
            if value.is_nan() || value.is_infinite() {
                return Err(Error::parse(line, format!("invalid table entry {tok:?}")));
            }
            if value < 0.0 {
                return Err(Error::parse(line, format!("negative potential {tok}")));
            }
            table.push(value.ln());
        }
        factors.push(Factor::new(scope, table));
    }

    if let Ok((line, tok)) = tokens.next("end of input") {
        return Err(Error::parse(line, format!("trailing token {tok:?}")));
    }

    FactorGraph::new(cardinalities, factors)
}

/// Renders a graph as UAI text. Entries are written as `exp(log)` with the
/// shortest decimal form that reads back to the same double.
pub fn write_uai(graph: &FactorGraph) -> String {
    let mut out = String::new();
    out.push_str("MARKOV\n");
    let _ = writeln!(out, "{}", graph.num_variables());
    let cards: Vec<String> = graph.cardinalities().iter().map(|c| c.to_string()).collect();
    let _ = writeln!(out, "{}", cards.join(" "));
    let _ = writeln!(out, "{}", graph.factors().len());
    for f in graph.factors() {
        let mut line = f.arity().to_string();
        for v in f.scope() {
            let _ = write!(line, " {v}");
        }
        let _ = writeln!(out, "{line}");
    }
    for f in graph.factors() {
        out.push('\n');
        let _ = writeln!(out, "{}", f.log_table().len());
        let entries: Vec<String> = f.log_table().iter().map(|x| format!("{}", x.exp())).collect();
        let _ = writeln!(out, "{}", entries.join(" "));
    }
    out
}
