//! Assignment table file: an optional `# fingerprint=<hex>` comment, the
//! header `src,dst,wavelength,timeslot`, then one record per grant with
//! 1-based wavelength and slot labels.

use std::fmt::Write;

use cawgr_core::{Assignment, AssignmentTable, TimeSlot, Wavelength};

pub const HEADER: &str = "src,dst,wavelength,timeslot";

#[derive(Debug, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct TableError {
    pub line: usize,
    pub message: String,
}

/// Rows are written in table order; solver output is already canonical.
pub fn emit(table: &AssignmentTable) -> String {
    let mut out = String::new();
    if let Some(fp) = table.fingerprint {
        writeln!(out, "# fingerprint={fp:016x}").unwrap();
    }
    out.push_str(HEADER);
    out.push('\n');
    for a in &table.assignments {
        writeln!(out, "{},{},{},{}", a.src, a.dst, a.wavelength.0, a.timeslot.0).unwrap();
    }
    out
}

pub fn parse(text: &str) -> Result<AssignmentTable, TableError> {
    let mut table = AssignmentTable::default();
    let mut seen_header = false;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.trim();
        if content.is_empty() {
            continue;
        }
        if let Some(comment) = content.strip_prefix('#') {
            if let Some(hex) = comment.trim().strip_prefix("fingerprint=") {
                let fp = u64::from_str_radix(hex.trim(), 16)
                    .map_err(|_| TableError { line, message: format!("bad fingerprint `{}`", hex.trim()) })?;
                table.fingerprint = Some(fp);
            }
            continue;
        }
        if !seen_header {
            if content != HEADER {
                return Err(TableError { line, message: format!("expected header `{HEADER}`, found `{content}`") });
            }
            seen_header = true;
            continue;
        }
        let fields: Vec<&str> = content.split(',').map(str::trim).collect();
        let [src, dst, wavelength, timeslot] = fields[..] else {
            return Err(TableError { line, message: format!("expected 4 fields, found {}", fields.len()) });
        };
        let number = |field: &str, what: &str| {
            field.parse::<u32>().map_err(|_| TableError { line, message: format!("{what} `{field}` is not a label") })
        };
        if src.is_empty() || dst.is_empty() {
            return Err(TableError { line, message: "empty entity name".into() });
        }
        table.assignments.push(Assignment {
            src: src.into(),
            dst: dst.into(),
            wavelength: Wavelength(number(wavelength, "wavelength")?),
            timeslot: TimeSlot(number(timeslot, "timeslot")?),
        });
    }
    if !seen_header {
        return Err(TableError { line: text.lines().count().max(1), message: "missing header".into() });
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn emits_header_and_records() {
        let mut t = AssignmentTable::new(vec![
            Assignment::new("cell1.rack1", "olt1", 3, 5),
            Assignment::new("cell1.rack1", "olt1", 7, 2),
        ]);
        assert_eq!(emit(&t), "src,dst,wavelength,timeslot\ncell1.rack1,olt1,3,5\ncell1.rack1,olt1,7,2\n");
        t.fingerprint = Some(0xab);
        assert!(emit(&t).starts_with("# fingerprint=00000000000000ab\nsrc,dst"));
    }

    #[test]
    fn parse_errors_carry_lines() {
        assert_eq!(parse("").unwrap_err().to_string(), "line 1: missing header");
        assert_eq!(parse("a,b,c\n").unwrap_err().line, 1);
        let e = parse("src,dst,wavelength,timeslot\nx,y,3\n").unwrap_err();
        assert_eq!(e.to_string(), "line 2: expected 4 fields, found 3");
        let e = parse("src,dst,wavelength,timeslot\nx,y,-3,1\n").unwrap_err();
        assert_eq!(e.to_string(), "line 2: wavelength `-3` is not a label");
    }

    #[test]
    fn parse_accepts_empty_and_zero_labels() {
        assert!(parse("src,dst,wavelength,timeslot\n").unwrap().is_empty());
        // out-of-range labels are a validation matter, not a parse error
        let t = parse("src,dst,wavelength,timeslot\nx,y,0,0\n").unwrap();
        assert_eq!(t.assignments[0].wavelength, Wavelength(0));
    }

    fn name() -> impl Strategy<Value = String> {
        "[a-z][a-z0-9.]{0,12}"
    }

    proptest! {
        #[test]
        fn round_trip(
            rows in prop::collection::vec((name(), name(), 1u32..100, 1u32..100), 0..20),
            fp in prop::option::of(any::<u64>()),
        ) {
            let table = AssignmentTable {
                assignments: rows.into_iter().map(|(s, d, w, t)| Assignment::new(s, d, w, t)).collect(),
                fingerprint: fp,
            };
            prop_assert_eq!(parse(&emit(&table)).unwrap(), table);
        }
    }
}
