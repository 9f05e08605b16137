//! Deterministic trace serialization. Floats print at 17 significant
//! digits so identical runs produce identical bytes and values round-trip
//! exactly.

/// One CSV row; regret columns stay empty when auditing is off.
#[derive(Clone, Debug, PartialEq)]
pub struct CsvRow {
    pub round: usize,
    pub loss: f64,
    pub fidelity: f64,
    pub gen_regret_rate: Option<f64>,
    pub disc_regret_rate: Option<f64>,
}

pub const CSV_HEADER: &str = "round,loss,fidelity,gen_regret_rate,disc_regret_rate";

/// 17-significant-digit scientific form, enough to reproduce any f64
/// exactly.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

pub fn rows_to_csv(rows: &[CsvRow]) -> String {
    let mut out = String::with_capacity(rows.len() * 64 + 64);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.round,
            fmt_f64(r.loss),
            fmt_f64(r.fidelity),
            fmt_opt(r.gen_regret_rate),
            fmt_opt(r.disc_regret_rate),
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_round_trips() {
        for x in [0.5, 1.0 / 3.0, 0.561234567890123, 1e-17, -2.25] {
            let s = fmt_f64(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
    }

    #[test]
    fn csv_columns_and_empties() {
        let rows = vec![CsvRow {
            round: 3,
            loss: 0.5,
            fidelity: 1.0,
            gen_regret_rate: None,
            disc_regret_rate: Some(0.25),
        }];
        let text = rows_to_csv(&rows);
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), CSV_HEADER);
        let row = lines.next().unwrap();
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields.len(), 5);
        assert_eq!(fields[0], "3");
        assert_eq!(fields[3], "");
        assert_eq!(fields[4].parse::<f64>().unwrap(), 0.25);
    }
}
