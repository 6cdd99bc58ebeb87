//! CSV/TSV writers shared by the library types and the command line front end.

use std::io::Write;

use crate::fbm::{HilbertPath, ScalarPath};

/// Field separator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Tsv,
}

impl Format {
    pub fn sep(self) -> char {
        match self {
            Format::Csv => ',',
            Format::Tsv => '\t',
        }
    }
}

impl std::str::FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "tsv" => Ok(Format::Tsv),
            _ => Err(format!("unknown format '{s}' (expected csv or tsv)")),
        }
    }
}

/// 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn join_row(fields: &[f64], sep: char) -> String {
    let mut s = String::new();
    for (i, x) in fields.iter().enumerate() {
        if i > 0 {
            s.push(sep);
        }
        s.push_str(&fmt_f64(*x));
    }
    s
}

pub fn write_scalar_path<W: Write>(w: &mut W, path: &ScalarPath, fmt: Format) -> std::io::Result<()> {
    let sep = fmt.sep();
    writeln!(w, "t{sep}mode_0")?;
    for (k, v) in path.values().iter().enumerate() {
        writeln!(w, "{}", join_row(&[path.time(k), *v], sep))?;
    }
    Ok(())
}

pub fn write_hilbert_path<W: Write>(w: &mut W, path: &HilbertPath, fmt: Format) -> std::io::Result<()> {
    let sep = fmt.sep();
    let mut header = String::from("t");
    for i in 0..path.n_modes() {
        header.push(sep);
        header.push_str(&format!("mode_{i}"));
    }
    writeln!(w, "{header}")?;
    let mut row = Vec::with_capacity(path.n_modes() + 1);
    for k in 0..path.len() {
        row.clear();
        row.push(path.time(k));
        row.extend(path.modes().iter().map(|m| m.values()[k]));
        writeln!(w, "{}", join_row(&row, sep))?;
    }
    Ok(())
}

/// Read a path written by [`write_hilbert_path`] (or any `t,mode_0,...` table on a uniform grid).
pub fn read_hilbert_path(text: &str) -> crate::Result<HilbertPath> {
    let bad = |m: String| crate::Error::Domain(m);
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| bad("empty path file".into()))?;
    let sep = if header.contains('\t') { '\t' } else { ',' };
    let n_modes = header.split(sep).count() - 1;
    if n_modes == 0 {
        return Err(bad("path file has no mode columns".into()));
    }
    let mut times = Vec::new();
    let mut series = vec![Vec::new(); n_modes];
    for (lineno, line) in lines.enumerate() {
        let fields: Vec<f64> = line
            .split(sep)
            .map(|f| f.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| bad(format!("line {}: {e}", lineno + 2)))?;
        if fields.len() != n_modes + 1 {
            return Err(bad(format!("line {}: expected {} fields", lineno + 2, n_modes + 1)));
        }
        times.push(fields[0]);
        for (s, v) in series.iter_mut().zip(&fields[1..]) {
            s.push(*v);
        }
    }
    if times.len() < 2 {
        return Err(bad("path file needs at least two rows".into()));
    }
    let t0 = times[0];
    let dt = (times[times.len() - 1] - t0) / (times.len() - 1) as f64;
    HilbertPath::from_series(t0, dt, series)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let p = HilbertPath::from_series(0.0, 0.25, vec![vec![0.0, 1.0, 0.1, 1e-17, -3.0]]).unwrap();
        let mut buf = Vec::new();
        write_hilbert_path(&mut buf, &p, Format::Csv).unwrap();
        let q = read_hilbert_path(std::str::from_utf8(&buf).unwrap()).unwrap();
        assert_eq!(p.mode(0).values(), q.mode(0).values());
        assert_eq!(q.dt(), 0.25);
    }
}
