//! Line-oriented text formats.
//!
//! * observables / Hamiltonians: `[coefficient] pauli_string` per line
//! * schedules: one basis string per line, in measurement order
//! * outcomes: `basis signs` per line, e.g. `XYZ ++-`
//! * raw states: a line with `n`, then `2^n` lines of `real imag`
//!
//! `#` starts a comment and blank lines are skipped in every format. Parse
//! errors carry 1-based line and column numbers.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::estimator::OutcomeRecord;
use crate::pauli::{parse_pauli, MeasurementBasis, ObservableSet, PauliObservable};
use crate::schedule::{Schedule, ScheduleOrigin};
use crate::simulator::StateVector;

/// Content lines with their 1-based line numbers, comments stripped.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let body = match line.find('#') {
            Some(pos) => &line[..pos],
            None => line,
        };
        if body.trim().is_empty() {
            None
        } else {
            Some((i + 1, body))
        }
    })
}

pub fn parse_observables(text: &str) -> Result<ObservableSet> {
    let mut observables: Vec<PauliObservable> = Vec::new();
    for (line_no, line) in content_lines(text) {
        let o = parse_pauli(line).map_err(|e| e.at_line(line_no))?;
        if let Some(first) = observables.first() {
            if first.num_qubits() != o.num_qubits() {
                return Err(Error::Parse {
                    line: Some(line_no),
                    column: 1,
                    message: format!(
                        "term acts on {} qubits, earlier terms on {}",
                        o.num_qubits(),
                        first.num_qubits()
                    ),
                });
            }
        }
        observables.push(o);
    }
    ObservableSet::new(observables)
}

pub fn render_observables(observables: &ObservableSet) -> String {
    let mut out = String::new();
    for o in observables {
        writeln!(out, "{}", o.render()).unwrap();
    }
    out
}

pub fn parse_schedule(text: &str) -> Result<Schedule> {
    let mut rows: Vec<MeasurementBasis> = Vec::new();
    for (line_no, line) in content_lines(text) {
        let row: MeasurementBasis = line.parse().map_err(|e: Error| e.at_line(line_no))?;
        if let Some(first) = rows.first() {
            if first.num_qubits() != row.num_qubits() {
                return Err(Error::Parse {
                    line: Some(line_no),
                    column: 1,
                    message: format!(
                        "row has {} labels, earlier rows have {}",
                        row.num_qubits(),
                        first.num_qubits()
                    ),
                });
            }
        }
        rows.push(row);
    }
    let n = rows.first().map_or(0, |r| r.num_qubits());
    Schedule::new(n, rows, ScheduleOrigin::Loaded)
}

pub fn render_schedule(rows: &[MeasurementBasis]) -> String {
    let mut out = String::with_capacity(rows.len() * (rows.first().map_or(0, |r| r.num_qubits()) + 1));
    for row in rows {
        writeln!(out, "{row}").unwrap();
    }
    out
}

fn parse_outcome_line(line: &str) -> Result<OutcomeRecord> {
    let trimmed_start = line.len() - line.trim_start().len();
    let mut parts = line.split_whitespace();
    let basis_text = parts.next().ok_or_else(|| Error::parse(1, "empty outcome line"))?;
    let basis: MeasurementBasis = basis_text.parse().map_err(|e| shift_column(e, trimmed_start))?;
    let signs_text = parts
        .next()
        .ok_or_else(|| Error::parse(line.trim_end().chars().count() + 1, "missing sign string"))?;
    let signs_offset = line.find(signs_text).unwrap_or(0);
    let mut signs = Vec::with_capacity(signs_text.len());
    for (i, c) in signs_text.chars().enumerate() {
        signs.push(match c {
            '+' => 1,
            '-' => -1,
            other => {
                return Err(Error::parse(
                    line[..signs_offset].chars().count() + 1 + i,
                    format!("illegal sign {other:?}, expected '+' or '-'"),
                ))
            }
        });
    }
    if parts.next().is_some() {
        return Err(Error::parse(1, "unexpected trailing token"));
    }
    if signs.len() != basis.num_qubits() {
        return Err(Error::parse(
            signs_offset + 1,
            format!("{} signs for a {}-qubit basis", signs.len(), basis.num_qubits()),
        ));
    }
    OutcomeRecord::new(basis, signs)
}

fn shift_column(e: Error, by: usize) -> Error {
    match e {
        Error::Parse {
            line,
            column,
            message,
        } => Error::Parse {
            line,
            column: column + by,
            message,
        },
        other => other,
    }
}

pub fn parse_outcomes(text: &str) -> Result<Vec<OutcomeRecord>> {
    content_lines(text)
        .map(|(line_no, line)| parse_outcome_line(line).map_err(|e| e.at_line(line_no)))
        .collect()
}

pub fn render_outcomes(records: &[OutcomeRecord]) -> String {
    let mut out = String::new();
    for r in records {
        let signs: String = r.signs().iter().map(|&s| if s > 0 { '+' } else { '-' }).collect();
        writeln!(out, "{} {}", r.basis(), signs).unwrap();
    }
    out
}

pub fn parse_state(text: &str) -> Result<StateVector> {
    let mut lines = content_lines(text);
    let (header_no, header) = lines.next().ok_or_else(|| Error::parse(1, "empty state file"))?;
    let n: usize = header.trim().parse().map_err(|_| Error::Parse {
        line: Some(header_no),
        column: 1,
        message: format!("invalid qubit count {:?}", header.trim()),
    })?;
    crate::simulator::check_capacity("state file", n)?;
    let mut amplitudes = Vec::with_capacity(1 << n);
    for (line_no, line) in lines {
        let parts: Vec<&str> = line.split_whitespace().collect();
        let parse = |t: &str| {
            t.parse::<f64>().map_err(|_| Error::Parse {
                line: Some(line_no),
                column: line.find(t).map_or(1, |p| p + 1),
                message: format!("invalid number {t:?}"),
            })
        };
        match parts.as_slice() {
            [re, im] => amplitudes.push(Complex64::new(parse(re)?, parse(im)?)),
            _ => {
                return Err(Error::Parse {
                    line: Some(line_no),
                    column: 1,
                    message: "expected `real imag`".into(),
                })
            }
        }
    }
    if amplitudes.len() != 1 << n {
        return Err(Error::State(format!(
            "state file declares {n} qubits but has {} amplitudes",
            amplitudes.len()
        )));
    }
    StateVector::from_amplitudes(amplitudes)
}

/// Amplitudes are written with Rust's shortest round-trip float formatting.
pub fn render_state(state: &StateVector) -> String {
    let mut out = format!("{}\n", state.num_qubits());
    for a in state.amplitudes() {
        writeln!(out, "{:?} {:?}", a.re, a.im).unwrap();
    }
    out
}

fn read(path: &Path) -> Result<String> {
    Ok(fs::read_to_string(path)?)
}

pub fn read_observables(path: &Path) -> Result<ObservableSet> {
    parse_observables(&read(path)?)
}

pub fn read_schedule(path: &Path) -> Result<Schedule> {
    parse_schedule(&read(path)?)
}

pub fn read_outcomes(path: &Path) -> Result<Vec<OutcomeRecord>> {
    parse_outcomes(&read(path)?)
}

pub fn read_state(path: &Path) -> Result<StateVector> {
    parse_state(&read(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulator::{stream_rng, BlochSpec};
    use proptest::prelude::*;

    #[test]
    fn observables_with_comments() {
        let text = "# H2-like toy\n-1.5 II\n\n0.25 XZ   # comment\nZZ\n";
        let set = parse_observables(text).unwrap();
        assert_eq!(set.len(), 3);
        assert_eq!(set[0].coefficient(), -1.5);
        assert_eq!(set[2].coefficient(), 1.0);
        assert_eq!(parse_observables(&render_observables(&set)).unwrap(), set);
    }

    #[test]
    fn observable_errors_cite_lines() {
        match parse_observables("XX\n\n0.25 AB\n").unwrap_err() {
            Error::Parse { line, column, .. } => {
                assert_eq!(line, Some(3));
                assert_eq!(column, 6);
            }
            e => panic!("{e:?}"),
        }
        match parse_observables("XX\nXXX\n").unwrap_err() {
            Error::Parse { line, .. } => assert_eq!(line, Some(2)),
            e => panic!("{e:?}"),
        }
        assert!(matches!(parse_observables("# nothing\n"), Err(Error::Domain(_))));
    }

    #[test]
    fn duplicates_are_kept() {
        let set = parse_observables("XX\nXX\n").unwrap();
        assert_eq!(set.len(), 2);
    }

    #[test]
    fn schedule_round_trip() {
        let s = parse_schedule("XYZ\nZZZ\n").unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(render_schedule(s.rows()), "XYZ\nZZZ\n");
        assert!(parse_schedule("XIZ\n").is_err());
        assert!(parse_schedule("XX\nXXX\n").is_err());
        assert!(parse_schedule("").unwrap().is_empty());
    }

    #[test]
    fn outcome_format() {
        let recs = parse_outcomes("XYZ ++-\nZ  -+  \n").unwrap_err();
        assert!(recs.is_parse());
        let recs = parse_outcomes("XYZ ++-\nZZZ ---\n").unwrap();
        assert_eq!(recs[0].signs(), &[1, 1, -1]);
        assert_eq!(render_outcomes(&recs), "XYZ ++-\nZZZ ---\n");
        match parse_outcomes("XY +*\n").unwrap_err() {
            Error::Parse { line, column, .. } => {
                assert_eq!(line, Some(1));
                assert_eq!(column, 5);
            }
            e => panic!("{e:?}"),
        }
        assert!(parse_outcomes("XY ++ +\n").is_err());
        assert!(parse_outcomes("XY\n").is_err());
    }

    #[test]
    fn state_file_round_trip() {
        let state = StateVector::product(&[
            "0.4:1.3".parse::<BlochSpec>().unwrap(),
            "Y-".parse().unwrap(),
        ])
        .unwrap();
        let text = render_state(&state);
        let back = parse_state(&text).unwrap();
        assert_eq!(back.amplitudes(), state.amplitudes());
    }

    #[test]
    fn state_file_errors() {
        assert!(parse_state("1\n1 0\n").is_err());
        assert!(matches!(parse_state("1\n1 0\n0.5 0\n"), Err(Error::State(_))));
        assert!(parse_state("1\n1 x\n0 0\n").unwrap_err().is_parse());
        assert!(parse_state("two\n").unwrap_err().is_parse());
    }

    proptest! {
        #[test]
        fn outcomes_round_trip(seed in any::<u64>(), n in 1usize..6, rows in 1usize..20) {
            let state = StateVector::ghz(n).unwrap();
            let sched = crate::schedule::randomized_schedule(n, rows, seed).unwrap();
            let mut rng = stream_rng(seed, 0);
            let recs = state.measure_schedule(sched.rows(), &mut rng).unwrap();
            let text = render_outcomes(&recs);
            prop_assert_eq!(parse_outcomes(&text).unwrap(), recs);
        }
    }
}
