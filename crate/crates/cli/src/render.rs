use serde_json::Value;

use crate::args::Format;
use crate::commands::Report;

#[derive(Debug, thiserror::Error)]
pub enum RenderError {
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("csv: {0}")]
    Utf8(#[from] std::string::FromUtf8Error),
    #[error("csv: {0}")]
    Flush(#[from] std::io::Error),
}

/// Scalars print bare, everything else as compact JSON.
fn cell(v: Option<&Value>) -> String {
    match v {
        None | Some(Value::Null) => String::new(),
        Some(Value::String(s)) => s.clone(),
        Some(other) => other.to_string(),
    }
}

pub fn render(report: &Report, format: Format) -> Result<String, RenderError> {
    match format {
        Format::Json if report.json_lines => Ok(report
            .records
            .iter()
            .map(|r| format!("{r}\n"))
            .collect()),
        Format::Json => {
            let doc = match report.records.as_slice() {
                [one] => one.clone(),
                many => Value::Array(many.to_vec()),
            };
            Ok(serde_json::to_string_pretty(&doc).expect("serializable") + "\n")
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(report.columns)?;
            for r in &report.records {
                w.write_record(report.columns.iter().map(|c| cell(r.get(*c))))?;
            }
            Ok(String::from_utf8(w.into_inner().map_err(|e| e.into_error())?)?)
        }
        Format::Text => {
            let mut out = String::new();
            for (i, r) in report.records.iter().enumerate() {
                if i > 0 {
                    out.push('\n');
                }
                match r {
                    Value::Object(map) => {
                        for (k, v) in map {
                            out.push_str(&format!("{k}: {}\n", cell(Some(v))));
                        }
                    }
                    other => out.push_str(&format!("{other}\n")),
                }
            }
            if report.records.is_empty() {
                out.push_str("no records\n");
            }
            Ok(out)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn report(records: Vec<Value>) -> Report {
        Report {
            records,
            columns: &["a", "b"],
            json_lines: false,
            counterexample: false,
        }
    }

    #[test]
    fn csv_cells() {
        let r = report(vec![json!({"a": "x,y", "b": [1, 2]}), json!({"a": true})]);
        let text = render(&r, Format::Csv).unwrap();
        assert_eq!(text, "a,b\n\"x,y\",\"[1,2]\"\ntrue,\n");
    }

    #[test]
    fn text_and_json() {
        let r = report(vec![json!({"a": 1, "b": null})]);
        assert_eq!(render(&r, Format::Text).unwrap(), "a: 1\nb: \n");
        assert_eq!(render(&r, Format::Json).unwrap(), "{\n  \"a\": 1,\n  \"b\": null\n}\n");
        assert_eq!(render(&report(vec![]), Format::Text).unwrap(), "no records\n");
    }
}
