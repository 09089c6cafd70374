//! Per-vertex field files and CSV diagnostics.
//!
//! A field file is an ASCII header followed by raw little-endian `f64`s:
//!
//! ```text
//! conflab-field v1
//! manifold_hash <sha256 hex of the mesh descriptor>
//! count <number of values>
//! endianness little
//! end_header
//! <count * 8 bytes>
//! ```

use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::grid::GridManifold;

pub const FIELD_MAGIC: &str = "conflab-field v1";

/// SHA-256 of the canonical TOML form of the mesh descriptor.
pub fn manifold_hash(m: &GridManifold) -> String {
    let text = toml::to_string(m.descriptor()).expect("mesh descriptors always serialize");
    Sha256::digest(text.as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

pub fn write_field(path: &Path, m: &GridManifold, values: &[f64]) -> Result<()> {
    if values.len() != m.len() {
        return Err(Error::FieldLength {
            expected: m.len(),
            got: values.len(),
        });
    }
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    write!(
        out,
        "{FIELD_MAGIC}\nmanifold_hash {}\ncount {}\nendianness little\nend_header\n",
        manifold_hash(m),
        values.len()
    )?;
    for v in values {
        out.write_all(&v.to_le_bytes())?;
    }
    out.flush()?;
    Ok(())
}

/// Read a field written for `m`; rejects files written for a different mesh.
pub fn read_field(path: &Path, m: &GridManifold) -> Result<Vec<f64>> {
    let mut rd = BufReader::new(std::fs::File::open(path)?);
    let mut line = String::new();
    let mut header = Vec::new();
    loop {
        line.clear();
        if rd.read_line(&mut line)? == 0 {
            return Err(Error::Format("field header not terminated".into()));
        }
        let l = line.trim_end();
        if l == "end_header" {
            break;
        }
        header.push(l.to_string());
        if header.len() > 16 {
            return Err(Error::Format("field header too long".into()));
        }
    }
    if header.first().map(String::as_str) != Some(FIELD_MAGIC) {
        return Err(Error::Format("not a field file".into()));
    }
    let key = |k: &str| -> Result<&str> {
        header
            .iter()
            .find_map(|h| h.strip_prefix(k).and_then(|r| r.strip_prefix(' ')))
            .ok_or_else(|| Error::Format(format!("field header lacks `{k}`")))
    };
    if key("endianness")? != "little" {
        return Err(Error::Format("only little-endian field files are supported".into()));
    }
    if key("manifold_hash")? != manifold_hash(m) {
        return Err(Error::Format("field was written for a different mesh".into()));
    }
    let count: usize = key("count")?
        .parse()
        .map_err(|_| Error::Format("bad count in field header".into()))?;
    if count != m.len() {
        return Err(Error::FieldLength {
            expected: m.len(),
            got: count,
        });
    }
    let mut bytes = Vec::with_capacity(count * 8);
    rd.read_to_end(&mut bytes)?;
    if bytes.len() != count * 8 {
        return Err(Error::Format(format!(
            "field payload has {} bytes, expected {}",
            bytes.len(),
            count * 8
        )));
    }
    Ok(bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect())
}

/// CSV with columns `vertex, x0..x{n-1}, boundary, <named columns>`.
pub fn write_diagnostics_csv(path: &Path, m: &GridManifold, columns: &[(&str, &[f64])]) -> Result<()> {
    for (name, c) in columns {
        if c.len() != m.len() {
            return Err(Error::InvalidArgument(format!("column {name} has {} values", c.len())));
        }
    }
    let mut w = csv::Writer::from_path(path)?;
    let mut head = vec!["vertex".to_string()];
    head.extend((0..m.dim()).map(|a| format!("x{a}")));
    head.push("boundary".into());
    head.extend(columns.iter().map(|(n, _)| n.to_string()));
    w.write_record(&head)?;
    for v in 0..m.len() {
        let mut rec = vec![v.to_string()];
        rec.extend(m.coords(v).iter().map(|x| x.to_string()));
        rec.push((m.boundary_mask()[v] as u8).to_string());
        rec.extend(columns.iter().map(|(_, c)| c[v].to_string()));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}
