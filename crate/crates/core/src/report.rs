//! Comparison tables across systems: per-class F1 and per-class Jaccard
//! mean / zero-overlap ratio, with the best score of each row marked.

use std::fmt::Write as _;

use crate::class::EntityClass;
use crate::metrics::EvaluationResult;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Locale {
    German,
    #[default]
    English,
}

impl Locale {
    pub fn class_label(self, class: EntityClass) -> &'static str {
        match self {
            Locale::German => class.german_label(),
            Locale::English => class.english_label(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Markdown,
    Csv,
}

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error("no result files given")]
    NoResults,
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub label: String,
    /// One entry per system; each holds the sub-column values (`None` when
    /// the system did not report it).
    pub cells: Vec<Vec<Option<f64>>>,
    /// Per system: whether its first sub-column value is the row maximum.
    pub bold: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonTable {
    pub caption: String,
    pub systems: Vec<String>,
    /// Sub-column headers, e.g. `["mean ↑", "ratio ↓"]`; empty for one value.
    pub sub_columns: Vec<String>,
    pub decimals: usize,
    pub rows: Vec<TableRow>,
}

/// Marks every cell equal to the row maximum. Missing values never win.
pub fn bold_mask(values: &[Option<f64>]) -> Vec<bool> {
    let max = values
        .iter()
        .flatten()
        .copied()
        .filter(|v| !v.is_nan())
        .fold(f64::NEG_INFINITY, f64::max);
    values.iter().map(|v| matches!(v, Some(x) if *x == max)).collect()
}

fn row(label: String, cells: Vec<Vec<Option<f64>>>) -> TableRow {
    let firsts: Vec<Option<f64>> = cells.iter().map(|c| c.first().copied().flatten()).collect();
    TableRow {
        label,
        bold: bold_mask(&firsts),
        cells,
    }
}

/// Per-class F1 for every system plus the macro F1 row.
pub fn f1_table(results: &[EvaluationResult], locale: Locale) -> Result<ComparisonTable, ReportError> {
    if results.is_empty() {
        return Err(ReportError::NoResults);
    }
    let mut rows: Vec<TableRow> = EntityClass::REAL
        .iter()
        .map(|class| {
            let cells = results
                .iter()
                .map(|r| vec![r.per_class.get(class).map(|m| m.f1)])
                .collect();
            row(locale.class_label(*class).to_string(), cells)
        })
        .collect();
    let macro_label = match locale {
        Locale::English => "Macro F1-score",
        Locale::German => "Makro-F1",
    };
    rows.push(row(
        macro_label.to_string(),
        results.iter().map(|r| vec![Some(r.macro_f1)]).collect(),
    ));
    Ok(ComparisonTable {
        caption: match locale {
            Locale::English => "F1-scores by class and system. The best score for each row is in bold.",
            Locale::German => "F1-Werte nach Klasse und System. Der beste Wert jeder Zeile ist fett.",
        }
        .to_string(),
        systems: results.iter().map(|r| r.system.clone()).collect(),
        sub_columns: Vec::new(),
        decimals: 4,
        rows,
    })
}

/// Jaccard mean and zero-overlap ratio per class and system;
/// the highest mean of each row is marked.
pub fn jaccard_table(results: &[EvaluationResult], locale: Locale) -> Result<ComparisonTable, ReportError> {
    if results.is_empty() {
        return Err(ReportError::NoResults);
    }
    let rows = EntityClass::REAL
        .iter()
        .map(|class| {
            let cells = results
                .iter()
                .map(|r| {
                    let j = r.jaccard.get(class);
                    vec![j.map(|j| j.mean), j.map(|j| j.ratio)]
                })
                .collect();
            row(locale.class_label(*class).to_string(), cells)
        })
        .collect();
    Ok(ComparisonTable {
        caption: match locale {
            Locale::English => "Jaccard means and zero-overlap ratios by class and system. The best mean for each row is in bold.",
            Locale::German => "Jaccard-Mittelwerte und Null-Überlappungs-Quoten nach Klasse und System. Der beste Mittelwert jeder Zeile ist fett.",
        }
        .to_string(),
        systems: results.iter().map(|r| r.system.clone()).collect(),
        sub_columns: vec!["mean ↑".to_string(), "ratio ↓".to_string()],
        decimals: 2,
        rows,
    })
}

impl ComparisonTable {
    fn headers(&self) -> Vec<String> {
        let mut out = Vec::new();
        for s in &self.systems {
            if self.sub_columns.is_empty() {
                out.push(s.clone());
            } else {
                out.extend(self.sub_columns.iter().map(|sub| format!("{s} {sub}")));
            }
        }
        out
    }

    fn fmt_value(&self, v: Option<f64>) -> String {
        match v {
            Some(x) => format!("{x:.*}", self.decimals),
            None => "-".to_string(),
        }
    }

    pub fn class_header(locale: Locale) -> &'static str {
        match locale {
            Locale::English => "Class",
            Locale::German => "Klasse",
        }
    }

    pub fn to_markdown(&self, locale: Locale) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}\n", self.caption);
        let headers = self.headers();
        let _ = writeln!(out, "| {} | {} |", Self::class_header(locale), headers.join(" | "));
        let _ = writeln!(out, "|---|{}", "---:|".repeat(headers.len()));
        for r in &self.rows {
            let mut cells = Vec::new();
            for (values, bold) in r.cells.iter().zip(&r.bold) {
                for (k, v) in values.iter().enumerate() {
                    let text = self.fmt_value(*v);
                    if k == 0 && *bold {
                        cells.push(format!("**{text}**"));
                    } else {
                        cells.push(text);
                    }
                }
            }
            let _ = writeln!(out, "| {} | {} |", r.label, cells.join(" | "));
        }
        out
    }

    /// CSV with a trailing `best` column naming the row winners, `;`-joined.
    pub fn to_csv(&self, locale: Locale) -> Result<String, ReportError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec![Self::class_header(locale).to_string()];
        header.extend(self.headers());
        header.push("best".to_string());
        w.write_record(&header)?;
        for r in &self.rows {
            let mut record = vec![r.label.clone()];
            for values in &r.cells {
                record.extend(values.iter().map(|v| self.fmt_value(*v)));
            }
            let best: Vec<&str> = self
                .systems
                .iter()
                .zip(&r.bold)
                .filter(|(_, b)| **b)
                .map(|(s, _)| s.as_str())
                .collect();
            record.push(best.join(";"));
            w.write_record(&record)?;
        }
        let bytes = w.into_inner().map_err(|e| csv::Error::from(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn render(&self, format: TableFormat, locale: Locale) -> Result<String, ReportError> {
        match format {
            TableFormat::Markdown => Ok(self.to_markdown(locale)),
            TableFormat::Csv => self.to_csv(locale),
        }
    }

    /// Systems marked best in the row with the given label.
    pub fn winners(&self, label: &str) -> Vec<&str> {
        self.rows
            .iter()
            .find(|r| r.label == label)
            .map(|r| {
                self.systems
                    .iter()
                    .zip(&r.bold)
                    .filter(|(_, b)| **b)
                    .map(|(s, _)| s.as_str())
                    .collect()
            })
            .unwrap_or_default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::{ClassMetrics, Scores};
    use std::collections::BTreeMap;

    fn result(system: &str, f1: &[(EntityClass, f64)]) -> EvaluationResult {
        EvaluationResult {
            system: system.into(),
            documents: 0,
            population: Default::default(),
            per_class: f1
                .iter()
                .map(|&(c, f1)| {
                    (
                        c,
                        ClassMetrics {
                            class: c,
                            precision: f1,
                            recall: f1,
                            f1,
                            support: 0,
                        },
                    )
                })
                .collect(),
            micro: Scores::default(),
            macro_f1: f1.iter().map(|p| p.1).sum::<f64>() / 10.0,
            jaccard: BTreeMap::new(),
            conflict: None,
        }
    }

    #[test]
    fn ties_are_all_bold() {
        assert_eq!(bold_mask(&[Some(0.5), Some(0.5), Some(0.1)]), vec![true, true, false]);
        assert_eq!(bold_mask(&[None, Some(0.0)]), vec![false, true]);
        assert_eq!(bold_mask(&[None, None]), vec![false, false]);
    }

    #[test]
    fn single_system_is_always_best() {
        let t = f1_table(&[result("A", &[(EntityClass::Aktion, 0.3)])], Locale::English).unwrap();
        assert_eq!(t.winners("Condition"), Vec::<&str>::new());
        assert_eq!(t.winners("Action"), vec!["A"]);
        assert_eq!(t.winners("Macro F1-score"), vec!["A"]);
    }

    #[test]
    fn higher_f1_wins_the_row() {
        let results = [
            result("Rule-based", &[(EntityClass::Aktion, 0.6049)]),
            result("XLM-R", &[(EntityClass::Aktion, 0.7621)]),
        ];
        let t = f1_table(&results, Locale::English).unwrap();
        assert_eq!(t.winners("Action"), vec!["XLM-R"]);
        let md = t.to_markdown(Locale::English);
        assert!(md.contains("| Action | 0.6049 | **0.7621** |"));
        let csv = t.to_csv(Locale::English).unwrap();
        assert!(csv.contains("Action,0.6049,0.7621,XLM-R\n"));
    }

    #[test]
    fn german_labels() {
        let t = f1_table(&[result("A", &[])], Locale::German).unwrap();
        assert_eq!(t.rows[4].label, "Ergebnisempfänger");
        assert!(t.to_markdown(Locale::German).contains("| Klasse | A |"));
    }

    #[test]
    fn empty_input_is_an_error() {
        assert!(matches!(f1_table(&[], Locale::English), Err(ReportError::NoResults)));
    }
}
