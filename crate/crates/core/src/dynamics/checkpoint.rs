//! History checkpoints.
//!
//! Binary layout (all little-endian):
//!
//! ```text
//! offset  size  field
//! 0       4     magic "SLWH"
//! 4       4     u32 format version (1)
//! 8       4     u32 precision: 1 = complex64 (two f32), 2 = complex128 (two f64)
//! 12      4     u32 flags: bit 0 set when an atom block follows
//! 16      8     u64 n_tau
//! 24      8     u64 n_zeta
//! 32      8     u64 n_delta (0 without atoms)
//! 40      8     u64 last zeta step index
//! 48      8     f64 tau0
//! 56      8     f64 dtau
//! 64      32    config hash (sha256, zero when unknown)
//! 96      ...   n_zeta f64 zeta values
//!         ...   fields, row-major [zeta][tau], each (Omega_+, Omega_-)
//!         ...   atoms, row-major [zeta][tau][delta], each (psi_e, psi_+, psi_-)
//! ```
//!
//! Complex numbers are stored as (re, im). The complex128 layout round-trips
//! bit-exactly.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::amplitudes::{AtomState, FieldPair, C64};
use crate::dynamics::propagate::{AtomGrid, FieldGrid};
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"SLWH";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Precision {
    Complex64,
    #[default]
    Complex128,
}

impl Precision {
    fn code(self) -> u32 {
        match self {
            Precision::Complex64 => 1,
            Precision::Complex128 => 2,
        }
    }

    fn from_code(code: u32) -> Result<Self> {
        match code {
            1 => Ok(Precision::Complex64),
            2 => Ok(Precision::Complex128),
            other => Err(Error::Checkpoint(format!("unknown precision code {other}"))),
        }
    }
}

/// A stored history plus what is needed to resume the march.
#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub fields: FieldGrid,
    pub atoms: AtomGrid,
    pub last_step: usize,
    pub config_hash: [u8; 32],
}

fn put_c64<W: Write>(w: &mut W, z: C64, precision: Precision) -> std::io::Result<()> {
    match precision {
        Precision::Complex64 => {
            w.write_all(&(z.re as f32).to_le_bytes())?;
            w.write_all(&(z.im as f32).to_le_bytes())
        }
        Precision::Complex128 => {
            w.write_all(&z.re.to_le_bytes())?;
            w.write_all(&z.im.to_le_bytes())
        }
    }
}

fn get_c64<R: Read>(r: &mut R, precision: Precision) -> std::io::Result<C64> {
    match precision {
        Precision::Complex64 => {
            let mut b = [0u8; 4];
            r.read_exact(&mut b)?;
            let re = f32::from_le_bytes(b) as f64;
            r.read_exact(&mut b)?;
            Ok(C64::new(re, f32::from_le_bytes(b) as f64))
        }
        Precision::Complex128 => {
            let mut b = [0u8; 8];
            r.read_exact(&mut b)?;
            let re = f64::from_le_bytes(b);
            r.read_exact(&mut b)?;
            Ok(C64::new(re, f64::from_le_bytes(b)))
        }
    }
}

fn get_u32<R: Read>(r: &mut R) -> std::io::Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn get_u64<R: Read>(r: &mut R) -> std::io::Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn get_f64<R: Read>(r: &mut R) -> std::io::Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

pub fn write_binary<W: Write>(w: &mut W, cp: &Checkpoint, precision: Precision) -> std::io::Result<()> {
    let f = &cp.fields;
    let has_atoms = !cp.atoms.is_empty();
    w.write_all(MAGIC)?;
    w.write_all(&FORMAT_VERSION.to_le_bytes())?;
    w.write_all(&precision.code().to_le_bytes())?;
    w.write_all(&(has_atoms as u32).to_le_bytes())?;
    w.write_all(&(f.n_tau as u64).to_le_bytes())?;
    w.write_all(&(f.n_zeta() as u64).to_le_bytes())?;
    w.write_all(&(if has_atoms { cp.atoms.n_delta } else { 0 } as u64).to_le_bytes())?;
    w.write_all(&(cp.last_step as u64).to_le_bytes())?;
    w.write_all(&f.tau0.to_le_bytes())?;
    w.write_all(&f.dtau.to_le_bytes())?;
    w.write_all(&cp.config_hash)?;
    for z in &f.zeta {
        w.write_all(&z.to_le_bytes())?;
    }
    for v in &f.values {
        put_c64(w, v.p, precision)?;
        put_c64(w, v.m, precision)?;
    }
    if has_atoms {
        for a in &cp.atoms.values {
            put_c64(w, a.e, precision)?;
            put_c64(w, a.p, precision)?;
            put_c64(w, a.m, precision)?;
        }
    }
    Ok(())
}

pub fn read_binary<R: Read>(r: &mut R) -> Result<Checkpoint> {
    let bad = |e: std::io::Error| Error::Checkpoint(format!("truncated checkpoint: {e}"));
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic).map_err(bad)?;
    if &magic != MAGIC {
        return Err(Error::Checkpoint("not a history checkpoint (bad magic)".into()));
    }
    let version = get_u32(r).map_err(bad)?;
    if version != FORMAT_VERSION {
        return Err(Error::Checkpoint(format!("unsupported format version {version}")));
    }
    let precision = Precision::from_code(get_u32(r).map_err(bad)?)?;
    let has_atoms = get_u32(r).map_err(bad)? & 1 == 1;
    let n_tau = get_u64(r).map_err(bad)? as usize;
    let n_zeta = get_u64(r).map_err(bad)? as usize;
    let n_delta = get_u64(r).map_err(bad)? as usize;
    let last_step = get_u64(r).map_err(bad)? as usize;
    let tau0 = get_f64(r).map_err(bad)?;
    let dtau = get_f64(r).map_err(bad)?;
    let mut config_hash = [0u8; 32];
    r.read_exact(&mut config_hash).map_err(bad)?;
    let zeta = (0..n_zeta).map(|_| get_f64(r)).collect::<std::io::Result<Vec<_>>>().map_err(bad)?;
    let mut values = Vec::with_capacity(n_tau * n_zeta);
    for _ in 0..n_tau * n_zeta {
        let p = get_c64(r, precision).map_err(bad)?;
        let m = get_c64(r, precision).map_err(bad)?;
        values.push(FieldPair::new(p, m));
    }
    let mut atoms = AtomGrid {
        n_tau,
        n_delta,
        zeta: Vec::new(),
        values: Vec::new(),
    };
    if has_atoms {
        atoms.zeta = zeta.clone();
        atoms.values.reserve(n_tau * n_zeta * n_delta);
        for _ in 0..n_tau * n_zeta * n_delta {
            let e = get_c64(r, precision).map_err(bad)?;
            let p = get_c64(r, precision).map_err(bad)?;
            let m = get_c64(r, precision).map_err(bad)?;
            atoms.values.push(AtomState::new(e, p, m));
        }
    }
    Ok(Checkpoint {
        fields: FieldGrid {
            tau0,
            dtau,
            n_tau,
            zeta,
            values,
        },
        atoms,
        last_step,
        config_hash,
    })
}

pub fn save_binary(path: &Path, cp: &Checkpoint, precision: Precision) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    write_binary(&mut w, cp, precision).map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn load_binary(path: &Path) -> Result<Checkpoint> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_binary(&mut BufReader::new(file))
}

/// Field history as CSV: `zeta_us,tau_us,re_omega_p,im_omega_p,re_omega_m,im_omega_m`,
/// preceded by one `#` provenance line.
pub fn write_fields_csv<W: Write>(w: &mut W, fields: &FieldGrid, provenance: &str) -> std::io::Result<()> {
    writeln!(w, "# {provenance}")?;
    writeln!(w, "zeta_us,tau_us,re_omega_p,im_omega_p,re_omega_m,im_omega_m")?;
    for j in 0..fields.n_zeta() {
        for (i, v) in fields.slice(j).iter().enumerate() {
            writeln!(
                w,
                "{:e},{:e},{:e},{:e},{:e},{:e}",
                fields.zeta[j],
                fields.tau(i),
                v.p.re,
                v.p.im,
                v.m.re,
                v.m.im
            )?;
        }
    }
    Ok(())
}

/// Reads back a CSV written by [`write_fields_csv`]. Rows must be grouped by
/// zeta in ascending tau order.
pub fn read_fields_csv<R: std::io::BufRead>(r: R) -> Result<FieldGrid> {
    let mut zeta: Vec<f64> = Vec::new();
    let mut taus: Vec<f64> = Vec::new();
    let mut values = Vec::new();
    for (n, line) in r.lines().enumerate() {
        let line = line.map_err(|e| Error::Checkpoint(format!("csv line {}: {e}", n + 1)))?;
        if line.starts_with('#') || line.starts_with("zeta_us") || line.trim().is_empty() {
            continue;
        }
        let cols: Vec<f64> = line
            .split(',')
            .map(|c| c.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Checkpoint(format!("csv line {}: {e}", n + 1)))?;
        if cols.len() != 6 {
            return Err(Error::Checkpoint(format!("csv line {}: expected 6 columns", n + 1)));
        }
        if zeta.last() != Some(&cols[0]) {
            zeta.push(cols[0]);
        }
        if zeta.len() == 1 {
            taus.push(cols[1]);
        }
        values.push(FieldPair::new(C64::new(cols[2], cols[3]), C64::new(cols[4], cols[5])));
    }
    let n_tau = taus.len();
    if n_tau < 2 || values.len() != n_tau * zeta.len() {
        return Err(Error::Checkpoint("csv history is not a full tau x zeta grid".into()));
    }
    Ok(FieldGrid {
        tau0: taus[0],
        dtau: (taus[n_tau - 1] - taus[0]) / (n_tau - 1) as f64,
        n_tau,
        zeta,
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Checkpoint {
        let n_tau = 5;
        let zeta = vec![0.0, 0.25, 0.5];
        let values = (0..n_tau * 3)
            .map(|k| FieldPair::new(C64::new(k as f64 * 0.1, -1.0 / (k as f64 + 3.0)), C64::new(1e-300, 7.0)))
            .collect();
        let atoms = AtomGrid {
            n_tau,
            n_delta: 2,
            zeta: zeta.clone(),
            values: (0..n_tau * 3 * 2)
                .map(|k| AtomState::new(C64::new(k as f64, 0.5), C64::new(-0.1, 1.0 / 3.0), C64::new(0.0, -2.0)))
                .collect(),
        };
        Checkpoint {
            fields: FieldGrid {
                tau0: -2.0,
                dtau: 0.75,
                n_tau,
                zeta,
                values,
            },
            atoms,
            last_step: 17,
            config_hash: [9u8; 32],
        }
    }

    #[test]
    fn binary_round_trip_is_bit_exact() {
        let cp = sample();
        let mut buf = Vec::new();
        write_binary(&mut buf, &cp, Precision::Complex128).unwrap();
        let back = read_binary(&mut buf.as_slice()).unwrap();
        assert_eq!(back, cp);
    }

    #[test]
    fn single_precision_is_close() {
        let cp = sample();
        let mut buf = Vec::new();
        write_binary(&mut buf, &cp, Precision::Complex64).unwrap();
        let back = read_binary(&mut buf.as_slice()).unwrap();
        for (a, b) in back.fields.values.iter().zip(&cp.fields.values) {
            assert!((a.p - b.p).norm() <= 1e-6 * b.p.norm().max(1e-30));
        }
    }

    #[test]
    fn rejects_bad_magic() {
        let mut buf = Vec::new();
        write_binary(&mut buf, &sample(), Precision::Complex128).unwrap();
        buf[0] = b'X';
        assert!(matches!(read_binary(&mut buf.as_slice()), Err(Error::Checkpoint(_))));
        let short = &buf[..50];
        assert!(read_binary(&mut short.to_vec().as_slice()).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let cp = sample();
        let mut buf = Vec::new();
        write_fields_csv(&mut buf, &cp.fields, "test").unwrap();
        let back = read_fields_csv(buf.as_slice()).unwrap();
        assert_eq!(back.values, cp.fields.values);
        assert_eq!(back.zeta, cp.fields.zeta);
    }
}
