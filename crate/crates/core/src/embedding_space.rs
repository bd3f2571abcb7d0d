//! Cosine queries over trained concept vectors and the embedding text
//! format.
//!
//! File layout: a `<N> <D>` header, then one `<domain>:<code> <x1> ... <xD>`
//! line per concept, single-space separated. Values carry 9 significant
//! digits.

use std::collections::{HashMap, HashSet};
use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::ingest::{ConceptCode, Vocabulary};
use crate::skipgram::{dot, EmbeddingMatrix};

#[derive(Debug, Clone, PartialEq)]
pub struct ScoredConcept {
    pub index: usize,
    pub concept: ConceptCode,
    /// Cosine similarity to the query.
    pub score: f64,
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn cosine(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::Shape(format!("vectors of length {} and {}", a.len(), b.len())));
    }
    let (na, nb) = (norm(a), norm(b));
    if na == 0.0 || nb == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok(dot(a, b) / (na * nb))
}

/// The `k` rows most cosine-similar to `query`, best first, ties to the
/// lower index. Rows in `exclude` and zero rows are never returned.
pub fn nearest_neighbors(
    emb: &EmbeddingMatrix,
    vocab: &Vocabulary,
    query: &[f64],
    k: usize,
    exclude: &HashSet<usize>,
) -> Result<Vec<ScoredConcept>> {
    if k == 0 {
        return Err(Error::Config("k must be at least 1".into()));
    }
    if query.len() != emb.d() {
        return Err(Error::Shape(format!(
            "query of length {} against dimension {}",
            query.len(),
            emb.d()
        )));
    }
    if vocab.len() != emb.n() {
        return Err(Error::Shape(format!(
            "vocabulary of {} concepts for {} embedding rows",
            vocab.len(),
            emb.n()
        )));
    }
    let qn = norm(query);
    if qn == 0.0 {
        return Err(Error::ZeroVector);
    }
    let mut scored: Vec<(usize, f64)> = emb
        .rows()
        .enumerate()
        .filter(|(i, _)| !exclude.contains(i))
        .filter_map(|(i, row)| {
            let rn = norm(row);
            (rn > 0.0).then(|| (i, dot(row, query) / (rn * qn)))
        })
        .collect();
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    scored.truncate(k);
    Ok(scored
        .into_iter()
        .map(|(index, score)| ScoredConcept {
            index,
            concept: vocab.code_at(index).clone(),
            score,
        })
        .collect())
}

/// Neighbors of `Σ plus − Σ minus`, excluding the named concepts.
pub fn additive_query(
    emb: &EmbeddingMatrix,
    vocab: &Vocabulary,
    plus: &[ConceptCode],
    minus: &[ConceptCode],
    k: usize,
) -> Result<Vec<ScoredConcept>> {
    let mut query = vec![0.0; emb.d()];
    let mut exclude = HashSet::new();
    for (codes, sign) in [(plus, 1.0), (minus, -1.0)] {
        for code in codes {
            let i = vocab
                .index_of(code)
                .ok_or_else(|| Error::UnknownConcept(code.to_string()))?;
            exclude.insert(i);
            for (q, x) in query.iter_mut().zip(emb.row(i)) {
                *q += sign * x;
            }
        }
    }
    nearest_neighbors(emb, vocab, &query, k, &exclude)
}

/// Rounds to 9 significant digits and prints the shortest text that parses
/// back to the rounded value.
fn format_value(x: f64) -> String {
    let rounded: f64 = format!("{x:.8e}").parse().expect("formatted float parses");
    format!("{rounded:?}")
}

pub fn export_embeddings<W: Write>(emb: &EmbeddingMatrix, vocab: &Vocabulary, mut sink: W) -> Result<()> {
    if vocab.len() != emb.n() {
        return Err(Error::Shape(format!(
            "vocabulary of {} concepts for {} embedding rows",
            vocab.len(),
            emb.n()
        )));
    }
    if !emb.is_finite() {
        return Err(Error::NonFinite("embedding"));
    }
    writeln!(sink, "{} {}", emb.n(), emb.d())?;
    let mut line = String::new();
    for (i, row) in emb.rows().enumerate() {
        line.clear();
        line.push_str(&vocab.code_at(i).to_string());
        for &x in row {
            line.push(' ');
            line.push_str(&format_value(x));
        }
        line.push('\n');
        sink.write_all(line.as_bytes())?;
    }
    sink.flush()?;
    Ok(())
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

pub fn import_embeddings<R: BufRead>(source: R) -> Result<(EmbeddingMatrix, Vocabulary)> {
    let mut lines = source.lines();
    let header = lines.next().ok_or_else(|| parse_err(1, "missing header"))??;
    let dims: Vec<&str> = header.split(' ').collect();
    let (n, d) = match dims.as_slice() {
        [n, d] => (
            n.parse::<usize>()
                .map_err(|_| parse_err(1, format!("bad row count {n:?}")))?,
            d.parse::<usize>()
                .map_err(|_| parse_err(1, format!("bad dimension {d:?}")))?,
        ),
        _ => return Err(parse_err(1, "header must be \"<N> <D>\"")),
    };
    if n == 0 || d == 0 {
        return Err(parse_err(1, "header declares an empty embedding"));
    }

    let mut codes = Vec::with_capacity(n);
    let mut seen: HashMap<ConceptCode, usize> = HashMap::with_capacity(n);
    let mut values = Vec::with_capacity(n * d);
    for (offset, line) in lines.enumerate() {
        let line_no = offset + 2;
        let line = line?;
        if codes.len() == n {
            if line.is_empty() {
                continue;
            }
            return Err(parse_err(line_no, format!("more than the {n} declared rows")));
        }
        let mut tokens = line.split(' ');
        let label = tokens.next().unwrap_or_default();
        let code: ConceptCode = label.parse().map_err(|e: String| parse_err(line_no, e))?;
        if let Some(first) = seen.insert(code.clone(), line_no) {
            return Err(parse_err(
                line_no,
                format!("duplicate code {code}, first seen at line {first}"),
            ));
        }
        let mut count = 0;
        for tok in tokens {
            let x: f64 = tok
                .parse()
                .map_err(|_| parse_err(line_no, format!("non-numeric value {tok:?}")))?;
            if !x.is_finite() {
                return Err(parse_err(line_no, format!("non-finite value {tok:?}")));
            }
            values.push(x);
            count += 1;
        }
        if count != d {
            return Err(parse_err(line_no, format!("expected {d} values, found {count}")));
        }
        codes.push(code);
    }
    if codes.len() != n {
        return Err(parse_err(
            codes.len() + 2,
            format!("header declares {n} rows, found {}", codes.len()),
        ));
    }
    Ok((EmbeddingMatrix::from_values(n, d, values)?, Vocabulary::from_codes(codes)?))
}
