//! Plain-text and image writers. Every writer takes an optional comment that
//! callers use to embed the resolved run configuration.

use std::io::Write;

use crate::{Error, Result};

/// Binary 8-bit PGM (P5) with linear mapping `round(255 v / max)`. The
/// header comment records the max value and `config`.
pub fn write_pgm<W: Write>(mut w: W, width: usize, height: usize, data: &[f64], config: &str) -> Result<()> {
    if width == 0 || height == 0 || data.len() != width * height {
        return Err(Error::InvalidParameter(format!(
            "{} values for a {width}x{height} image",
            data.len()
        )));
    }
    if data.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::InvalidParameter("image values must be finite and non-negative".into()));
    }
    let max = data.iter().copied().fold(0.0, f64::max);
    let config = config.replace('\n', " ");
    write!(w, "P5\n# max={max} config={config}\n{width} {height}\n255\n")?;
    let scale = if max > 0.0 { 255.0 / max } else { 0.0 };
    let bytes: Vec<u8> = data.iter().map(|v| (v * scale).round().clamp(0.0, 255.0) as u8).collect();
    w.write_all(&bytes)?;
    Ok(())
}

/// Row-major matrix CSV: header `label,x_0,x_1,...`, then one line per row
/// starting with its coordinate.
pub fn write_matrix_csv<W: Write>(
    mut w: W,
    label: &str,
    xs: &[f64],
    ys: &[f64],
    rows: &[Vec<f64>],
    comment: Option<&str>,
) -> Result<()> {
    if rows.len() != ys.len() || rows.iter().any(|r| r.len() != xs.len()) {
        return Err(Error::InvalidParameter("matrix shape does not match its axes".into()));
    }
    if let Some(c) = comment {
        writeln!(w, "# {c}")?;
    }
    write!(w, "{label}")?;
    for x in xs {
        write!(w, ",{x}")?;
    }
    writeln!(w)?;
    for (y, row) in ys.iter().zip(rows) {
        write!(w, "{y}")?;
        for v in row {
            write!(w, ",{v}")?;
        }
        writeln!(w)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pgm_bytes() {
        let mut buf = Vec::new();
        write_pgm(&mut buf, 3, 1, &[0.0, 1.0, 2.0], "{\"a\":1}").unwrap();
        let header = b"P5\n# max=2 config={\"a\":1}\n3 1\n255\n";
        assert_eq!(&buf[..header.len()], header);
        assert_eq!(&buf[header.len()..], &[0, 128, 255]);
    }

    #[test]
    fn pgm_rejects_bad_shape() {
        assert!(write_pgm(Vec::new(), 2, 2, &[1.0; 3], "").is_err());
        assert!(write_pgm(Vec::new(), 1, 1, &[f64::NAN], "").is_err());
    }

    #[test]
    fn matrix_csv_layout() {
        let mut buf = Vec::new();
        write_matrix_csv(&mut buf, "z\\x", &[0.0, 0.5], &[1.0], &[vec![0.25, 1.0]], Some("config={}")).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "# config={}\nz\\x,0,0.5\n1,0.25,1\n");
    }
}
