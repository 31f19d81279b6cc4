//! Test cases and the `suite.csv` format:
//! `input_1..input_k,expected,iteration,utility`.

use std::io;

use crate::lang::Value;

#[derive(Debug, Clone, PartialEq)]
pub struct TestCase {
    pub input: Vec<i64>,
    /// Output of the original program on `input`.
    pub expected: Value,
    /// Selection iteration; 0 for seed cases.
    pub iteration: usize,
    pub utility_at_selection: f64,
}

#[derive(Debug, thiserror::Error)]
pub enum SuiteError {
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("row {row}: {msg}")]
    Row { row: usize, msg: String },
    #[error("suite is empty")]
    Empty,
}

pub fn write_suite_csv<W: io::Write>(writer: W, suite: &[TestCase]) -> Result<(), SuiteError> {
    let mut w = csv::Writer::from_writer(writer);
    let arity = suite.first().map_or(0, |t| t.input.len());
    let mut header: Vec<String> = (1..=arity).map(|i| format!("input_{i}")).collect();
    header.extend(["expected", "iteration", "utility"].map(String::from));
    w.write_record(&header)?;
    for t in suite {
        let mut row: Vec<String> = t.input.iter().map(|v| v.to_string()).collect();
        row.push(t.expected.to_string());
        row.push(t.iteration.to_string());
        row.push(format!("{:.6}", t.utility_at_selection));
        w.write_record(&row)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Reads a suite. `labels` are the class literals of the program under test;
/// an `expected` cell naming one of them is a class value, otherwise it must
/// be an integer or a boolean.
pub fn read_suite_csv<R: io::Read>(reader: R, labels: &[String]) -> Result<Vec<TestCase>, SuiteError> {
    let mut r = csv::Reader::from_reader(reader);
    let headers = r.headers()?.clone();
    let arity = headers.iter().take_while(|h| h.starts_with("input_")).count();
    if headers.len() != arity + 3 {
        return Err(SuiteError::Row {
            row: 0,
            msg: "expected columns input_1..input_k,expected,iteration,utility".into(),
        });
    }
    let mut out = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let row = i + 1;
        let bad = |msg: String| SuiteError::Row { row, msg };
        if rec.len() != arity + 3 {
            return Err(bad(format!("expected {} fields, found {}", arity + 3, rec.len())));
        }
        let input = rec
            .iter()
            .take(arity)
            .map(|c| c.trim().parse::<i64>().map_err(|e| bad(format!("input {c:?}: {e}"))))
            .collect::<Result<Vec<_>, _>>()?;
        let expected = parse_value(&rec[arity], labels).ok_or_else(|| bad(format!("expected {:?}", &rec[arity])))?;
        let iteration = rec[arity + 1]
            .trim()
            .parse()
            .map_err(|e| bad(format!("iteration: {e}")))?;
        let utility = rec[arity + 2]
            .trim()
            .parse()
            .map_err(|e| bad(format!("utility: {e}")))?;
        out.push(TestCase {
            input,
            expected,
            iteration,
            utility_at_selection: utility,
        });
    }
    Ok(out)
}

fn parse_value(cell: &str, labels: &[String]) -> Option<Value> {
    if labels.iter().any(|l| l == cell) {
        return Some(Value::Class(cell.to_string()));
    }
    if let Ok(n) = cell.trim().parse::<i64>() {
        return Some(Value::Int(n));
    }
    match cell.trim() {
        "true" => Some(Value::Bool(true)),
        "false" => Some(Value::Bool(false)),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn writes_and_reads() {
        let suite = vec![
            TestCase {
                input: vec![3, 3, 3],
                expected: Value::Class("equilateral".into()),
                iteration: 0,
                utility_at_selection: 0.0,
            },
            TestCase {
                input: vec![1, -2, 3],
                expected: Value::Int(7),
                iteration: 4,
                utility_at_selection: 0.25,
            },
        ];
        let mut buf = Vec::new();
        write_suite_csv(&mut buf, &suite).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("input_1,input_2,input_3,expected,iteration,utility\n3,3,3,equilateral,0,0.000000\n"));
        let back = read_suite_csv(&buf[..], &["equilateral".to_string()]).unwrap();
        assert_eq!(back, suite);
    }

    #[test]
    fn rejects_malformed_rows() {
        let labels: Vec<String> = vec![];
        assert!(read_suite_csv("input_1,expected,iteration,utility\nx,1,0,0\n".as_bytes(), &labels).is_err());
        assert!(read_suite_csv("input_1,expected,iteration,utility\n1,what,0,0\n".as_bytes(), &labels).is_err());
        assert!(read_suite_csv("a,b\n1,2\n".as_bytes(), &labels).is_err());
    }
}
