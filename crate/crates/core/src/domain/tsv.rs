//! Domain TSV: one `grammar_bits<TAB>tokens<TAB>force` row per license,
//! `#` comment lines, LF endings.

use std::io::{BufRead, Write};

use super::{Domain, DomainBuilder, Force, Grammar, Sentence};
use crate::error::{Error, Result};

pub fn load_domain<R: BufRead>(reader: R) -> Result<Domain> {
    let mut builder = DomainBuilder::default();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        let trimmed = line.trim_end_matches('\r');
        if trimmed.trim().is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let (g, s) = parse_row(trimmed).map_err(|message| Error::Parse {
            line: lineno,
            message,
        })?;
        builder.add(g, s);
    }
    builder.build()
}

fn parse_row(line: &str) -> std::result::Result<(Grammar, Sentence), String> {
    let cols: Vec<&str> = line.split('\t').collect();
    if cols.len() != 3 {
        return Err(format!(
            "expected 3 tab-separated columns, found {}",
            cols.len()
        ));
    }
    let grammar: Grammar = cols[0].parse().map_err(|e: Error| e.to_string())?;
    let force: Force = cols[2].trim().parse()?;
    let sentence = Sentence::parse(cols[1], force).map_err(|e| e.to_string())?;
    Ok((grammar, sentence))
}

/// Writes rows ordered by grammar, then by sentence.
pub fn save_domain<W: Write>(domain: &Domain, mut out: W) -> Result<()> {
    writeln!(out, "# grammar_bits\ttokens\tforce")?;
    writeln!(
        out,
        "# {} grammars, {} sentences, {} licenses",
        domain.grammar_count(),
        domain.sentences().len(),
        domain.license_count()
    )?;
    for g in domain.grammars() {
        let bits = g.to_string();
        for &id in domain.language_ids(g)? {
            let s = domain.sentence(id);
            writeln!(out, "{bits}\t{}\t{}", s.tokens_string(), s.force())?;
        }
    }
    out.flush()?;
    Ok(())
}
