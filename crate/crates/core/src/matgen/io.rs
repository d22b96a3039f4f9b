//! Matrix files.
//!
//! Binary `MINX` layout (all integers and floats little-endian):
//!
//! ```text
//! offset  size  field
//! 0       4     magic  "MINX" (0x4D 0x49 0x4E 0x58)
//! 4       4     version u32 = 1
//! 8       8     rows u64
//! 16      8     cols u64
//! 24      8·r·c values, IEEE-754 f64, row-major
//! ```
//!
//! Text files hold one matrix row per line with entries separated by commas
//! and/or whitespace. Blank lines and lines starting with `#` are ignored.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::DataMatrix;
use crate::error::{Error, Result};

pub const MINX_MAGIC: [u8; 4] = *b"MINX";
pub const MINX_VERSION: u32 = 1;

pub fn write_minx<W: Write>(mut out: W, m: &DataMatrix) -> Result<()> {
    out.write_all(&MINX_MAGIC)?;
    out.write_all(&MINX_VERSION.to_le_bytes())?;
    out.write_all(&(m.n() as u64).to_le_bytes())?;
    out.write_all(&(m.p() as u64).to_le_bytes())?;
    for v in m.values() {
        out.write_all(&v.to_le_bytes())?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_minx<R: Read>(mut input: R) -> Result<DataMatrix> {
    let mut header = [0u8; 24];
    input
        .read_exact(&mut header)
        .map_err(|e| Error::Parse(format!("truncated MINX header: {e}")))?;
    if header[..4] != MINX_MAGIC {
        return Err(Error::Parse("missing MINX magic".into()));
    }
    let version = u32::from_le_bytes(header[4..8].try_into().unwrap());
    if version != MINX_VERSION {
        return Err(Error::Parse(format!("unsupported MINX version {version}")));
    }
    let rows = u64::from_le_bytes(header[8..16].try_into().unwrap());
    let cols = u64::from_le_bytes(header[16..24].try_into().unwrap());
    let (rows, cols) = match (usize::try_from(rows), usize::try_from(cols)) {
        (Ok(r), Ok(c)) => (r, c),
        _ => return Err(Error::Size(format!("{rows}x{cols} matrix exceeds addressable memory"))),
    };
    let len = rows
        .checked_mul(cols)
        .and_then(|l| l.checked_mul(8))
        .ok_or_else(|| Error::Size(format!("{rows}x{cols} matrix exceeds addressable memory")))?;
    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes)?;
    if bytes.len() != len {
        return Err(Error::Parse(format!(
            "MINX payload has {} bytes, header implies {len}",
            bytes.len()
        )));
    }
    let values = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    DataMatrix::new(rows, cols, values).map_err(|e| Error::Parse(e.to_string()))
}

pub fn parse_delimited(text: &str) -> Result<DataMatrix> {
    let mut cols = None;
    let mut rows = 0usize;
    let mut values = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let before = values.len();
        for tok in line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
        {
            let v: f64 = tok
                .parse()
                .map_err(|_| Error::Parse(format!("line {}: bad number {tok:?}", lineno + 1)))?;
            values.push(v);
        }
        let width = values.len() - before;
        match cols {
            None => cols = Some(width),
            Some(c) if c != width => {
                return Err(Error::Parse(format!(
                    "line {}: expected {c} entries, found {width}",
                    lineno + 1
                )))
            }
            _ => {}
        }
        rows += 1;
    }
    let cols = cols.ok_or_else(|| Error::Parse("no matrix rows found".into()))?;
    DataMatrix::new(rows, cols, values).map_err(|e| Error::Parse(e.to_string()))
}

pub fn write_delimited<W: Write>(mut out: W, m: &DataMatrix) -> Result<()> {
    for t in 0..m.n() {
        let line: Vec<String> = m.row(t).iter().map(|v| format!("{v:.16e}")).collect();
        writeln!(out, "{}", line.join(","))?;
    }
    out.flush()?;
    Ok(())
}

/// Reads a matrix file, choosing the format from the leading magic bytes.
pub fn read_matrix_file(path: impl AsRef<Path>) -> Result<DataMatrix> {
    let path = path.as_ref();
    let mut bytes = Vec::new();
    BufReader::new(File::open(path)?).read_to_end(&mut bytes)?;
    if bytes.starts_with(&MINX_MAGIC) {
        read_minx(bytes.as_slice())
    } else {
        let text = std::str::from_utf8(&bytes)
            .map_err(|_| Error::Parse(format!("{} is neither MINX nor UTF-8 text", path.display())))?;
        parse_delimited(text)
    }
}

pub fn write_minx_file(path: impl AsRef<Path>, m: &DataMatrix) -> Result<()> {
    write_minx(BufWriter::new(File::create(path)?), m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{EntryDistribution, SeedSpec};
    use crate::matgen::gen_data;

    #[test]
    fn minx_header_layout() {
        let m = DataMatrix::new(1, 2, vec![1.0, -2.5]).unwrap();
        let mut buf = Vec::new();
        write_minx(&mut buf, &m).unwrap();
        assert_eq!(&buf[..4], &[0x4D, 0x49, 0x4E, 0x58]);
        assert_eq!(&buf[4..8], &[1, 0, 0, 0]);
        assert_eq!(&buf[8..16], &1u64.to_le_bytes());
        assert_eq!(&buf[16..24], &2u64.to_le_bytes());
        assert_eq!(&buf[24..32], &1.0f64.to_le_bytes());
        assert_eq!(&buf[32..40], &(-2.5f64).to_le_bytes());
        assert_eq!(buf.len(), 40);
    }

    #[test]
    fn minx_round_trip_is_bit_exact() {
        let m = gen_data(EntryDistribution::LaplaceUnit, 7, 5, SeedSpec::new(1, 2)).unwrap();
        let mut buf = Vec::new();
        write_minx(&mut buf, &m).unwrap();
        assert_eq!(read_minx(buf.as_slice()).unwrap(), m);
    }

    #[test]
    fn minx_rejects_bad_input() {
        assert!(read_minx(&b"MINX"[..]).is_err());
        let mut buf = Vec::new();
        write_minx(&mut buf, &DataMatrix::new(2, 2, vec![0.0; 4]).unwrap()).unwrap();
        buf.pop();
        assert!(matches!(read_minx(buf.as_slice()), Err(Error::Parse(_))));
        buf[4] = 2;
        assert!(read_minx(buf.as_slice()).is_err());
    }

    #[test]
    fn delimited_accepts_commas_and_whitespace() {
        let m = parse_delimited("# comment\n1, 2 ,3\n\n4 5\t6\n").unwrap();
        assert_eq!((m.n(), m.p()), (2, 3));
        assert_eq!(m.values(), &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
    }

    #[test]
    fn delimited_rejects_ragged_and_garbage() {
        assert!(parse_delimited("1 2\n3\n").is_err());
        assert!(parse_delimited("1 x\n").is_err());
        assert!(parse_delimited("\n# only comments\n").is_err());
        assert!(parse_delimited("1 NaN\n").is_err());
    }

    #[test]
    fn delimited_round_trip_is_bit_exact() {
        let m = gen_data(EntryDistribution::Gaussian, 4, 3, SeedSpec::new(5, 5)).unwrap();
        let mut buf = Vec::new();
        write_delimited(&mut buf, &m).unwrap();
        assert_eq!(parse_delimited(std::str::from_utf8(&buf).unwrap()).unwrap(), m);
    }
}
