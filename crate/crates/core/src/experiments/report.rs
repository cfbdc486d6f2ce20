use std::fs;
use std::path::Path;

use crate::error::Result;

/// CSV report: a `# optisph <command> seed=<n>` line, a header row, records.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: String,
    pub seed: u64,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Report {
    pub fn new(command: &str, seed: u64, header: &[&str]) -> Self {
        Self {
            command: command.to_string(),
            seed,
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("# optisph {} seed={}\n{}\n", self.command, self.seed, self.header.join(","));
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_csv())?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let mut r = Report::new("exp1", 42, &["L", "e_max"]);
        r.push(vec!["2".into(), "1e-16".into()]);
        assert_eq!(r.to_csv(), "# optisph exp1 seed=42\nL,e_max\n2,1e-16\n");
    }
}
