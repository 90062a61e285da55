//! Plain-text renderings of evaluation results.

use std::fmt::Write;

use super::{CategoryRatioRow, EvalReport, OccurrenceMatrix, OverlapReport, TurningPointProfile};

const TP_NAMES: [&str; 5] = ["Opportunity", "Change of Plans", "Point of No Return", "Major Setback", "Climax"];

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".to_string(), |v| format!("{v:.3}"))
}

pub fn eval_table(r: &EvalReport) -> String {
    let mut s = String::new();
    let c = &r.counts;
    let _ = writeln!(s, "documents        {}", r.documents);
    let _ = writeln!(s, "token accuracy   {:.4}  ({}/{})", r.token_accuracy, c.tokens_correct, c.tokens_total);
    let _ = writeln!(s, "span precision   {:.4}", r.span_precision);
    let _ = writeln!(s, "span recall      {:.4}", r.span_recall);
    let _ = writeln!(s, "span F1          {:.4}  (tp {} fp {} fn {})", r.span_f1, c.tp, c.fp, c.fn_);
    if !r.unmatched.is_empty() {
        let _ = writeln!(s, "unmatched prediction keys: {}", r.unmatched.len());
        for key in &r.unmatched {
            let _ = writeln!(s, "  {key}");
        }
    }
    s
}

pub fn category_table(rows: &[CategoryRatioRow]) -> String {
    let mut s = format!("{:<20} {:>7} {:>7} {:>8}\n", "category", "nu_cgr", "nu_ner", "ratio");
    for r in rows {
        let _ = writeln!(s, "{:<20} {:>7} {:>7} {:>8.3}", r.category, r.nu_cgr, r.nu_ner, r.ratio);
    }
    s
}

pub fn overlap_table(reports: &[OverlapReport]) -> String {
    let mut s = format!("{:<10} {:>16} {:>18} {:>8}\n", "threshold", "share_cgs_in_at", "share_ats_labeled", "labeled");
    for r in reports {
        let _ = writeln!(
            s,
            "p > {:<6} {:>16} {:>18} {:>8}",
            r.threshold,
            opt(r.share_cgs_in_at),
            opt(r.share_ats_labeled),
            r.labeled
        );
    }
    s
}

/// `tp,name,delta_cg_per_sentence,delta_words_per_sentence`
pub fn profile_csv(p: &TurningPointProfile) -> String {
    let mut s = String::from("tp,name,delta_cg_per_sentence,delta_words_per_sentence\n");
    for (i, name) in TP_NAMES.iter().enumerate() {
        let _ = writeln!(s, "{},{name},{:.6},{:.6}", i + 1, p.delta_cg_per_sentence[i], p.delta_words_per_sentence[i]);
    }
    s
}

/// Rows are the turning point of first occurrence, columns where the CG
/// shows up; cells below the diagonal are blank.
pub fn matrix_table(m: &OccurrenceMatrix) -> String {
    let mut s = format!("{:<4}", "TP");
    for j in 1..=5 {
        let _ = write!(s, "{j:>8}");
    }
    s.push('\n');
    for (i, row) in m.cells.iter().enumerate() {
        let _ = write!(s, "{:<4}", i + 1);
        for (j, v) in row.iter().enumerate() {
            if j < i {
                let _ = write!(s, "{:>8}", "");
            } else {
                let _ = write!(s, "{v:>8.1}");
            }
        }
        s.push('\n');
    }
    let diag: f64 = m.diagonal().iter().sum();
    let _ = writeln!(s, "diagonal sum {diag:.1} over {} first occurrences in {} stories", m.first_occurrences, m.stories);
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_layout() {
        let mut cells = [[0.0; 5]; 5];
        cells[0][0] = 60.0;
        cells[0][2] = 20.0;
        cells[1][1] = 40.0;
        let m = OccurrenceMatrix { cells, first_occurrences: 5, stories: 1, skipped: 0 };
        let text = matrix_table(&m);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "TP         1       2       3       4       5");
        assert_eq!(lines[1], "1       60.0     0.0    20.0     0.0     0.0");
        assert_eq!(lines[2], "2               40.0     0.0     0.0     0.0");
        assert!(lines[6].starts_with("diagonal sum 100.0"));
    }

    #[test]
    fn undefined_share_prints_marker() {
        let r = OverlapReport { threshold: 0.95, share_cgs_in_at: None, share_ats_labeled: Some(0.0), labeled: 0, mode: super::super::OverlapMode::AllAts };
        assert!(overlap_table(&[r]).contains("n/a"));
    }
}
