use std::fmt;

/// A rejected input line (1-based line number).
#[derive(Debug, Clone, PartialEq)]
pub struct LineError {
    pub line: usize,
    pub text: String,
    pub reason: &'static str,
}

impl fmt::Display for LineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {} ({:?})", self.line, self.reason, self.text)
    }
}

/// One parsed observation with the line it came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Row {
    pub line: usize,
    pub value: f64,
}

fn cell(s: &str) -> &str {
    s.trim().trim_matches('"').trim()
}

/// Parses single-column CSV text. Blank lines and lines starting with '#'
/// are skipped; the first remaining line may be a non-numeric header.
pub fn parse_csv(text: &str) -> Result<Vec<Row>, Vec<LineError>> {
    let mut rows = Vec::new();
    let mut errors = Vec::new();
    let mut first = true;
    for (k, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r');
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let mut cells = t.split(',');
        let c = cell(cells.next().unwrap_or(""));
        let extra = cells.any(|x| !cell(x).is_empty());
        match c.parse::<f64>() {
            Ok(v) if !extra && v.is_finite() => rows.push(Row { line: k + 1, value: v }),
            Ok(_) if extra => errors.push(LineError {
                line: k + 1,
                text: t.to_string(),
                reason: "expected a single column",
            }),
            Ok(_) => errors.push(LineError {
                line: k + 1,
                text: t.to_string(),
                reason: "value is not finite",
            }),
            Err(_) if first && !extra => {}
            Err(_) => errors.push(LineError {
                line: k + 1,
                text: t.to_string(),
                reason: "not a number",
            }),
        }
        first = false;
    }
    if errors.is_empty() {
        Ok(rows)
    } else {
        Err(errors)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_comments_crlf() {
        let rows = parse_csv("# survey\r\n\"x\"\r\n0.25\r\n\r\n# mid\r\n0.5\n").unwrap();
        assert_eq!(rows, vec![Row { line: 3, value: 0.25 }, Row { line: 6, value: 0.5 }]);
        assert_eq!(parse_csv("0.1\n0.2").unwrap().len(), 2);
        assert!(parse_csv("").unwrap().is_empty());
    }

    #[test]
    fn bad_cells_are_numbered() {
        let e = parse_csv("x\n0.1\nabc\n0.3,0.4\nnan\n").unwrap_err();
        let lines: Vec<usize> = e.iter().map(|e| e.line).collect();
        assert_eq!(lines, vec![3, 4, 5]);
    }
}
