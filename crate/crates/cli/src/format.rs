//! The `ybs 1` text format.
//!
//! ```text
//! ybs 1
//! n 3
//! labels x1 x2 x3        # optional
//! L 1: 1 2 3
//! L 2: 1 2 3
//! L 3: 2 1 3
//! R 1: ...               # optional, all N rows or none
//! ```
//!
//! `L i` lists `ℒ_{x_i}(x_1) … ℒ_{x_i}(x_N)`; `R i` lists `x_1^{x_i} … x_N^{x_i}`.
//! Entries are 1-based. Without `R` rows the right action is derived as
//! `xʸ = ℒ_y⁻¹(x)`, which requires every `L` row to be a bijection.

use std::collections::HashSet;
use std::fmt;

use thiserror::Error;
use ybs_core::perm::Permutation;
use ybs_core::QuadraticSet;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct FormatError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for FormatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.message)
    }
}

fn err(line: usize, column: usize, message: impl Into<String>) -> FormatError {
    FormatError { line, column, message: message.into() }
}

#[derive(Debug, Clone, Copy)]
struct Token<'a> {
    text: &'a str,
    line: usize,
    column: usize,
}

/// Non-blank, non-comment lines split into tokens with 1-based positions.
fn tokenize(text: &str) -> Vec<Vec<Token<'_>>> {
    let mut lines = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let body = raw.split('#').next().unwrap_or("");
        let mut tokens = Vec::new();
        let mut start = None;
        for (pos, ch) in body.char_indices().chain(std::iter::once((body.len(), ' '))) {
            match (ch.is_whitespace(), start) {
                (false, None) => start = Some(pos),
                (true, Some(s)) => {
                    let column = body[..s].chars().count() + 1;
                    tokens.push(Token { text: &body[s..pos], line: i + 1, column });
                    start = None;
                }
                _ => {}
            }
        }
        if !tokens.is_empty() {
            lines.push(tokens);
        }
    }
    lines
}

fn parse_number(t: &Token<'_>, what: &str) -> Result<usize, FormatError> {
    t.text.parse().map_err(|_| err(t.line, t.column, format!("expected {what}, found `{}`", t.text)))
}

struct Row {
    values: Vec<usize>,
    columns: Vec<usize>,
    line: usize,
}

/// Parses `K i: v1 … vN` (keyword already checked) into 0-based values.
fn parse_row(tokens: &[Token<'_>], n: usize, rows: &mut [Option<Row>]) -> Result<(), FormatError> {
    let kw = tokens[0];
    let Some(idx_tok) = tokens.get(1) else {
        return Err(err(kw.line, kw.column + kw.text.len(), "missing row index"));
    };
    let Some(idx_text) = idx_tok.text.strip_suffix(':') else {
        return Err(err(idx_tok.line, idx_tok.column, format!("expected `<index>:`, found `{}`", idx_tok.text)));
    };
    let i: usize = idx_text
        .parse()
        .map_err(|_| err(idx_tok.line, idx_tok.column, format!("expected row index, found `{idx_text}`")))?;
    if i == 0 || i > n {
        return Err(err(idx_tok.line, idx_tok.column, format!("row index {i} out of range 1..={n}")));
    }
    if rows[i - 1].is_some() {
        return Err(err(idx_tok.line, idx_tok.column, format!("duplicate {} row {i}", kw.text)));
    }
    let entries = &tokens[2..];
    if entries.len() != n {
        let t = entries.get(n).copied().unwrap_or(*tokens.last().unwrap());
        return Err(err(t.line, t.column, format!("{} row {i} has {} entries, expected {n}", kw.text, entries.len())));
    }
    let mut values = Vec::with_capacity(n);
    let mut columns = Vec::with_capacity(n);
    for t in entries {
        let v = parse_number(t, "an element index")?;
        if v == 0 || v > n {
            return Err(err(t.line, t.column, format!("entry {v} out of range 1..={n}")));
        }
        values.push(v - 1);
        columns.push(t.column);
    }
    rows[i - 1] = Some(Row { values, columns, line: kw.line });
    Ok(())
}

/// Parses one `ybs 1` document.
pub fn parse_ybs(text: &str) -> Result<QuadraticSet, FormatError> {
    let lines = tokenize(text);
    let mut it = lines.iter();
    let end_line = text.lines().count() + 1;

    let header = it.next().ok_or_else(|| err(end_line, 1, "empty input, expected `ybs 1`"))?;
    if header.len() != 2 || header[0].text != "ybs" || header[1].text != "1" {
        return Err(err(header[0].line, header[0].column, "bad header, expected `ybs 1`"));
    }

    let size = it.next().ok_or_else(|| err(end_line, 1, "missing `n <N>` line"))?;
    if size[0].text != "n" {
        return Err(err(size[0].line, size[0].column, format!("expected `n <N>`, found `{}`", size[0].text)));
    }
    if size.len() != 2 {
        return Err(err(size[0].line, size[0].column, "expected exactly one value after `n`"));
    }
    let n = parse_number(&size[1], "the number of elements")?;
    if n == 0 {
        return Err(err(size[1].line, size[1].column, "n must be at least 1"));
    }

    let mut labels: Option<Vec<String>> = None;
    let mut left: Vec<Option<Row>> = (0..n).map(|_| None).collect();
    let mut right: Vec<Option<Row>> = (0..n).map(|_| None).collect();
    for tokens in it {
        let kw = tokens[0];
        match kw.text {
            "labels" => {
                if labels.is_some() {
                    return Err(err(kw.line, kw.column, "duplicate `labels` line"));
                }
                if left.iter().chain(&right).any(Option::is_some) {
                    return Err(err(kw.line, kw.column, "`labels` must precede the rows"));
                }
                let names = &tokens[1..];
                if names.len() != n {
                    return Err(err(kw.line, kw.column, format!("expected {n} labels, found {}", names.len())));
                }
                let mut seen = HashSet::new();
                for t in names {
                    if !seen.insert(t.text) {
                        return Err(err(t.line, t.column, format!("duplicate label `{}`", t.text)));
                    }
                }
                labels = Some(names.iter().map(|t| t.text.to_string()).collect());
            }
            "L" => {
                if right.iter().any(Option::is_some) {
                    return Err(err(kw.line, kw.column, "`L` rows must precede `R` rows"));
                }
                parse_row(tokens, n, &mut left)?;
            }
            "R" => parse_row(tokens, n, &mut right)?,
            other => return Err(err(kw.line, kw.column, format!("unexpected `{other}`"))),
        }
    }

    let count = |rows: &[Option<Row>]| rows.iter().filter(|r| r.is_some()).count();
    if count(&left) != n {
        let missing = left.iter().position(Option::is_none).unwrap() + 1;
        return Err(err(end_line, 1, format!("expected {n} L rows, found {} (row {missing} missing)", count(&left))));
    }
    let left: Vec<Row> = left.into_iter().map(Option::unwrap).collect();
    let q = match count(&right) {
        0 => {
            let mut perms = Vec::with_capacity(n);
            for row in &left {
                let mut seen = vec![false; n];
                for (&v, &col) in row.values.iter().zip(&row.columns) {
                    if std::mem::replace(&mut seen[v], true) {
                        return Err(err(row.line, col, format!("row not a bijection (value {} repeats)", v + 1)));
                    }
                }
                perms.push(Permutation::from_images(row.values.clone()).expect("checked bijective"));
            }
            QuadraticSet::from_left_action(&perms).expect("rows have degree n")
        }
        k if k == n => {
            let right: Vec<Row> = right.into_iter().map(Option::unwrap).collect();
            let left_table: Vec<usize> = left.iter().flat_map(|r| r.values.iter().copied()).collect();
            // R row i lists k ↦ x_k^{x_i}; the table is indexed [k][i]
            let mut right_table = vec![0; n * n];
            for (i, row) in right.iter().enumerate() {
                for (k, &v) in row.values.iter().enumerate() {
                    right_table[k * n + i] = v;
                }
            }
            QuadraticSet::from_tables(n, left_table, right_table).expect("entries checked")
        }
        k => {
            return Err(err(end_line, 1, format!("expected 0 or {n} R rows, found {k}")));
        }
    };
    match labels {
        Some(l) => Ok(q.with_labels(l).expect("label count checked")),
        None => Ok(q),
    }
}

/// Splits a stream of documents at each `ybs` header line and parses each.
pub fn parse_ybs_all(text: &str) -> Result<Vec<QuadraticSet>, FormatError> {
    let mut starts = Vec::new();
    let mut offset = 0;
    for (i, line) in text.split_inclusive('\n').enumerate() {
        if line.split('#').next().unwrap_or("").split_whitespace().next() == Some("ybs") {
            starts.push((offset, i));
        }
        offset += line.len();
    }
    if starts.is_empty() {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for (k, &(start, first_line)) in starts.iter().enumerate() {
        let end = starts.get(k + 1).map_or(text.len(), |&(e, _)| e);
        out.push(parse_ybs(&text[start..end]).map_err(|mut e| {
            e.line += first_line;
            e
        })?);
    }
    Ok(out)
}

fn push_row(out: &mut String, kw: char, i: usize, values: impl Iterator<Item = usize>) {
    out.push_str(&format!("{kw} {i}:"));
    for v in values {
        out.push_str(&format!(" {}", v + 1));
    }
    out.push('\n');
}

/// Canonical text: labels only when not the defaults, `R` rows only when the
/// right action is not the one derived from the `L` rows.
pub fn write_ybs(q: &QuadraticSet) -> String {
    let n = q.n();
    let mut out = format!("ybs 1\nn {n}\n");
    if q.has_custom_labels() {
        out.push_str("labels");
        for l in q.labels() {
            out.push(' ');
            out.push_str(&l);
        }
        out.push('\n');
    }
    for x in 0..n {
        push_row(&mut out, 'L', x + 1, q.left_row(x).iter().copied());
    }
    if !q.right_is_lri_of_left() {
        for i in 0..n {
            push_row(&mut out, 'R', i + 1, (0..n).map(|k| q.right(k, i)));
        }
    }
    out
}
