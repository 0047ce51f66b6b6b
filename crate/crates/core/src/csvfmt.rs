//! Shared plumbing for the comment-prefixed CSV interchange formats.

use std::io::Read;

use crate::error::FormatError;

/// A CSV document split into its `#` comment lines and data records.
pub(crate) struct CsvDocument {
    pub comments: Vec<(u64, String)>,
    pub records: Vec<(u64, csv::StringRecord)>,
}

impl CsvDocument {
    /// Reads the whole document and checks the header row against `header`.
    pub fn read<R: Read>(mut reader: R, header: &[&str]) -> Result<Self, FormatError> {
        let mut text = String::new();
        reader.read_to_string(&mut text)?;

        let comments = text
            .lines()
            .enumerate()
            .filter_map(|(i, line)| {
                let trimmed = line.trim_start();
                trimmed
                    .strip_prefix('#')
                    .map(|rest| (i as u64 + 1, rest.trim().to_string()))
            })
            .collect();

        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .flexible(true)
            .from_reader(text.as_bytes());

        let found = rdr.headers()?.clone();
        if found.is_empty() {
            return Err(FormatError::Invalid(format!(
                "missing header row (expected `{}`)",
                header.join(",")
            )));
        }
        if found.iter().ne(header.iter().copied()) {
            let line = rdr.position().line().saturating_sub(1).max(1);
            return Err(FormatError::at(
                line,
                format!(
                    "expected header `{}`, found `{}`",
                    header.join(","),
                    found.iter().collect::<Vec<_>>().join(",")
                ),
            ));
        }

        let mut records = Vec::new();
        for result in rdr.records() {
            let record = result?;
            let line = record.position().map_or(0, |p| p.line());
            if record.iter().all(str::is_empty) {
                continue;
            }
            if record.len() != header.len() {
                return Err(FormatError::at(
                    line,
                    format!("expected {} fields, found {}", header.len(), record.len()),
                ));
            }
            records.push((line, record));
        }
        Ok(CsvDocument { comments, records })
    }

    /// Looks up a `# key,v1,v2,...` directive and returns its values.
    pub fn directive(&self, key: &str) -> Option<(u64, Vec<String>)> {
        self.comments.iter().find_map(|(line, body)| {
            let mut parts = body.split(',').map(|s| s.trim().to_string());
            (parts.next().as_deref() == Some(key)).then(|| (*line, parts.collect()))
        })
    }
}

/// Renders free-form comment lines, one `# ` prefix each.
pub(crate) fn comment_lines(out: &mut String, comments: &[String]) {
    for c in comments {
        for line in c.lines() {
            out.push_str("# ");
            out.push_str(line);
            out.push('\n');
        }
    }
}
