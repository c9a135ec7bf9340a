/// One acceptance check with its measured value.
#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    /// Criterion id, e.g. "7" or "8-nls".
    pub criterion: String,
    pub passed: bool,
    pub detail: String,
}

/// A CSV table. `x` names the abscissa column of the plot script.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub x: usize,
    pub logscale: bool,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self { name: name.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new(), x: 0, logscale: false }
    }

    pub fn log(mut self) -> Self {
        self.logscale = true;
        self
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub verdicts: Vec<Verdict>,
    pub tables: Vec<Table>,
    /// Measured values reported without a verdict.
    pub notes: Vec<String>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }

    pub fn check(&mut self, criterion: &str, passed: bool, detail: String) {
        self.verdicts.push(Verdict { criterion: criterion.into(), passed, detail });
    }

    pub fn note(&mut self, s: String) {
        self.notes.push(s);
    }
}
