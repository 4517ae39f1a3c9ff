//! CPLEX LP text export and read-back of externally computed solutions.
//!
//! Exported numbers carry 12 significant digits. Solution files are plain
//! `name = value` lines (blank lines and `#` comments ignored); variables not
//! listed are taken as zero, which is how most solvers abbreviate their output.

use std::fmt::Write as _;
use std::io::BufRead;

use crate::error::MilpError;
use crate::instance::{MilpInstance, VarKind};

/// Formats `x` rounded to 12 significant digits, in its shortest form.
pub fn format_number(x: f64) -> String {
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    if rounded == 0.0 {
        return "0".to_string();
    }
    let plain = format!("{rounded}");
    if plain.len() > 20 {
        format!("{rounded:e}")
    } else {
        plain
    }
}

fn write_terms(out: &mut String, terms: impl Iterator<Item = (f64, String)>) {
    let mut first = true;
    let mut width = 0;
    for (c, name) in terms {
        let sign = if c < 0.0 { "-" } else { "+" };
        let mag = format_number(c.abs());
        let piece = match (first, mag.as_str()) {
            (true, "1") if c > 0.0 => name,
            (true, _) if c > 0.0 => format!("{mag} {name}"),
            (_, "1") => format!("{sign} {name}"),
            _ => format!("{sign} {mag} {name}"),
        };
        // LP readers limit line length; wrap long rows
        if width + piece.len() > 200 {
            out.push_str("\n   ");
            width = 0;
        }
        out.push(' ');
        out.push_str(&piece);
        width += piece.len() + 1;
        first = false;
    }
    if first {
        out.push_str(" 0");
    }
}

/// Renders `inst` in CPLEX LP format.
pub fn write_lp(inst: &MilpInstance) -> String {
    let vars = inst.vars();
    let mut out = String::new();
    let _ = writeln!(out, "\\ {}", inst.name);
    out.push_str("Maximize\n obj:");
    write_terms(
        &mut out,
        vars.iter()
            .filter(|v| v.objective != 0.0)
            .map(|v| (v.objective, v.name.clone())),
    );
    out.push_str("\nSubject To\n");
    for row in inst.constraints() {
        let _ = write!(out, " {}:", row.name);
        write_terms(&mut out, row.terms.iter().map(|&(id, c)| (c, vars[id.0].name.clone())));
        let _ = writeln!(out, " {} {}", row.sense, format_number(row.rhs));
    }
    out.push_str("Bounds\n");
    for v in vars.iter().filter(|v| v.kind == VarKind::Continuous) {
        if v.lower == v.upper {
            let _ = writeln!(out, " {} = {}", v.name, format_number(v.lower));
        } else {
            let _ = writeln!(out, " {} <= {} <= {}", format_number(v.lower), v.name, format_number(v.upper));
        }
    }
    for v in vars.iter().filter(|v| v.kind == VarKind::Binary && v.lower == v.upper) {
        let _ = writeln!(out, " {} = {}", v.name, format_number(v.lower));
    }
    let binaries: Vec<&str> = vars
        .iter()
        .filter(|v| v.kind == VarKind::Binary)
        .map(|v| v.name.as_str())
        .collect();
    if !binaries.is_empty() {
        out.push_str("Binaries\n");
        for chunk in binaries.chunks(10) {
            let _ = writeln!(out, " {}", chunk.join(" "));
        }
    }
    out.push_str("End\n");
    out
}

/// Reads `name = value` lines into a value vector ordered like `inst`.
pub fn read_solution(inst: &MilpInstance, reader: impl BufRead) -> Result<Vec<f64>, MilpError> {
    let mut values = vec![0.0; inst.num_vars()];
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| MilpError::SolutionFile {
            line: line_no,
            message: e.to_string(),
        })?;
        let text = line.split('#').next().unwrap_or("").trim();
        if text.is_empty() {
            continue;
        }
        let (name, value) = text.split_once('=').ok_or_else(|| MilpError::SolutionFile {
            line: line_no,
            message: format!("expected `name = value`, got `{text}`"),
        })?;
        let name = name.trim();
        let id = inst.find(name).ok_or_else(|| MilpError::SolutionFile {
            line: line_no,
            message: format!("unknown variable `{name}`"),
        })?;
        values[id.0] = value.trim().parse().map_err(|_| MilpError::SolutionFile {
            line: line_no,
            message: format!("cannot parse value `{}`", value.trim()),
        })?;
    }
    Ok(values)
}

/// Writes values in the format accepted by [`read_solution`].
pub fn write_solution(inst: &MilpInstance, values: &[f64]) -> String {
    let mut out = String::new();
    for (v, x) in inst.vars().iter().zip(values) {
        let _ = writeln!(out, "{} = {}", v.name, x);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::Sense;

    fn sample() -> MilpInstance {
        let mut m = MilpInstance::new("sample");
        let x = m.add_continuous("x", 0.0, 3.5, 2.0);
        let y = m.add_continuous("y", 0.0, 10.0, -1.0);
        let z = m.add_binary("z", 0.1);
        m.add_constraint("c1", [(x, 1.0), (y, -1.0)], Sense::Le, 4.0).unwrap();
        m.add_constraint("c2", [(x, 1.0 / 3.0), (z, -2.5)], Sense::Ge, -1.0).unwrap();
        m.add_constraint("c3", [(y, 1.0), (z, 1.0)], Sense::Eq, 1.0).unwrap();
        m
    }

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(format_number(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_number(52.25), "52.25");
        assert_eq!(format_number(-0.0012), "-0.0012");
        assert_eq!(format_number(2612.5), "2612.5");
        assert_eq!(format_number(0.0), "0");
    }

    #[test]
    fn writes_all_sections() {
        let text = write_lp(&sample());
        let expected = "\\ sample
Maximize
 obj: 2 x - y + 0.1 z
Subject To
 c1: x - y <= 4
 c2: 0.333333333333 x - 2.5 z >= -1
 c3: y + z = 1
Bounds
 0 <= x <= 3.5
 0 <= y <= 10
Binaries
 z
End
";
        assert_eq!(text, expected);
    }

    #[test]
    fn solution_file_round_trip() {
        let m = sample();
        let values = vec![1.25, 0.0, 1.0];
        let text = write_solution(&m, &values);
        let back = read_solution(&m, text.as_bytes()).unwrap();
        assert_eq!(back, values);
    }

    #[test]
    fn solution_file_errors_carry_line_numbers() {
        let m = sample();
        let err = read_solution(&m, "# header\nx = 1\nw = 2\n".as_bytes()).unwrap_err();
        assert!(matches!(err, MilpError::SolutionFile { line: 3, .. }), "{err}");
        let err = read_solution(&m, "x 1\n".as_bytes()).unwrap_err();
        assert!(matches!(err, MilpError::SolutionFile { line: 1, .. }));
        // omitted variables default to zero
        let v = read_solution(&m, "z = 1\n".as_bytes()).unwrap();
        assert_eq!(v, vec![0.0, 0.0, 1.0]);
    }
}
