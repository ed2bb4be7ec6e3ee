//! CSV emission: `#` schema headers, 17 significant digits, LF endings.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

pub const UNITS: &str = "# units: energies in the units of J and U; entropies in nats (natural log)";

pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Header block: command, parameters, units, then the column names.
pub fn header(command: &str, params: &[(&str, String)], columns: &[&str]) -> String {
    let mut out = format!("# bethechain {command}\n");
    for (k, v) in params {
        out.push_str(&format!("# {k} = {v}\n"));
    }
    out.push_str(UNITS);
    out.push('\n');
    out.push_str(&format!("# columns: {}\n", columns.join(",")));
    out.push_str(&columns.join(","));
    out.push('\n');
    out
}

pub fn row(fields: &[String]) -> String {
    let mut line = fields.join(",");
    line.push('\n');
    line
}

/// Writes to `path`, or to stdout when there is none.
pub fn emit(path: Option<&Path>, text: &str) -> io::Result<()> {
    match path {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p)?);
            w.write_all(text.as_bytes())?;
            w.flush()
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(text.as_bytes())?;
            lock.flush()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_keep_seventeen_digits() {
        assert_eq!(float(0.1), "1.0000000000000001e-1");
        assert_eq!(float(-2.011), "-2.0110000000000001e0");
        assert_eq!(float(f64::NAN), "NaN");
        assert_eq!(float(0.1).parse::<f64>().unwrap(), 0.1);
    }

    #[test]
    fn header_ends_with_column_row() {
        let h = header("gap", &[("N", "5".into())], &["U", "gap"]);
        assert!(h.starts_with("# bethechain gap\n# N = 5\n"));
        assert!(h.ends_with("# columns: U,gap\nU,gap\n"));
    }
}
