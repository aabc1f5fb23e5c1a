use serde::Serialize;

use super::{AdoptionReport, CswrReport, FertilityReport, NewrReport};

/// Machine (JSON) and human (aligned text) renderings of a metric result.
pub trait Report: Serialize {
    fn rows(&self) -> Vec<(String, String)>;

    fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    fn to_text(&self) -> String {
        let rows = self.rows();
        let width = rows.iter().map(|(k, _)| k.chars().count()).max().unwrap_or(0);
        rows.iter().map(|(k, v)| format!("{k:<width$}  {v}\n")).collect()
    }
}

fn row(k: &str, v: impl ToString) -> (String, String) {
    (k.to_string(), v.to_string())
}

impl Report for FertilityReport {
    fn rows(&self) -> Vec<(String, String)> {
        vec![
            row("fertility", format!("{:.6}", self.fertility)),
            row("tokens", self.token_count),
            row("words", self.word_count),
            row("corpus", &self.corpus_id),
            row("tokenizer", &self.tokenizer),
        ]
    }
}

impl Report for NewrReport {
    fn rows(&self) -> Vec<(String, String)> {
        vec![
            row("newr", format!("{:.6}", self.ratio)),
            row("missing", self.missing),
            row("counted", self.counted),
            row("offending", self.offending.join(" ")),
        ]
    }
}

impl Report for CswrReport {
    fn rows(&self) -> Vec<(String, String)> {
        let flagged: Vec<&str> = self
            .verdicts
            .iter()
            .filter(|v| v.verdict == super::Verdict::Violation)
            .map(|v| v.word.as_str())
            .collect();
        vec![
            row("language", &self.language),
            row("cswr", format!("{:.6}", self.ratio)),
            row("violations", self.violations),
            row("words", self.total_words),
            row("flagged", flagged.join(" ")),
        ]
    }
}

impl Report for AdoptionReport {
    fn rows(&self) -> Vec<(String, String)> {
        self.slices
            .iter()
            .map(|s| {
                let f = s.fractions();
                (
                    s.slice.clone(),
                    format!(
                        "existing {:.4}  new {:.4}  english {:.4}  byte {:.4}  other {:.4}  ({} tokens)",
                        f[0], f[1], f[2], f[3], f[4], s.total
                    ),
                )
            })
            .collect()
    }
}
