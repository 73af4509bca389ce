//! Trajectory export: columnar CSV and the binary snapshot format.
//!
//! Binary layout (all little-endian):
//!
//! ```text
//! magic      4 bytes  "SDFL"
//! version    u32      1
//! dim        u32
//! n_members  u32
//! n_snaps    u32
//! stride     u32
//! n_snaps x { time f64, n_members * dim x f64 (row-major) }
//! ```

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::simulate::flow::{Snapshot, Trajectory};

pub const MAGIC: &[u8; 4] = b"SDFL";
pub const VERSION: u32 = 1;

/// `time,member,x0,x1,...` with one row per member and snapshot.
pub fn write_csv<W: Write>(tr: &Trajectory, labels: &[String], out: &mut W) -> Result<()> {
    let d = tr.final_state.dim;
    write!(out, "time,member")?;
    for k in 0..d {
        write!(out, ",x{k}")?;
    }
    writeln!(out)?;
    for s in &tr.snapshots {
        for (i, row) in s.positions.chunks(d).enumerate() {
            write!(out, "{},{}", s.time, labels.get(i).map(String::as_str).unwrap_or(""))?;
            for v in row {
                write!(out, ",{v}")?;
            }
            writeln!(out)?;
        }
    }
    Ok(())
}

/// Header fields of a binary snapshot file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SnapshotHeader {
    pub dim: u32,
    pub n_members: u32,
    pub n_snapshots: u32,
    pub stride: u32,
}

pub fn write_binary<W: Write>(header: SnapshotHeader, snaps: &[(f64, &[f64])], out: &mut W) -> Result<()> {
    let width = (header.dim as usize) * (header.n_members as usize);
    if snaps.len() != header.n_snapshots as usize || snaps.iter().any(|(_, p)| p.len() != width) {
        return Err(Error::Inconsistent("snapshot sizes disagree with header".into()));
    }
    out.write_all(MAGIC)?;
    for v in [VERSION, header.dim, header.n_members, header.n_snapshots, header.stride] {
        out.write_all(&v.to_le_bytes())?;
    }
    for (t, pos) in snaps {
        out.write_all(&t.to_le_bytes())?;
        for v in *pos {
            out.write_all(&v.to_le_bytes())?;
        }
    }
    Ok(())
}

pub fn write_trajectory_binary<W: Write>(tr: &Trajectory, out: &mut W) -> Result<()> {
    let header = SnapshotHeader {
        dim: tr.final_state.dim as u32,
        n_members: tr.final_state.len() as u32,
        n_snapshots: tr.snapshots.len() as u32,
        stride: tr.stride as u32,
    };
    let snaps: Vec<(f64, &[f64])> = tr.snapshots.iter().map(|s| (s.time, s.positions.as_slice())).collect();
    write_binary(header, &snaps, out)
}

pub fn read_binary<R: Read>(input: &mut R) -> Result<(SnapshotHeader, Vec<Snapshot>)> {
    let mut magic = [0u8; 4];
    input.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Inconsistent("bad snapshot magic".into()));
    }
    let mut u = [0u32; 5];
    for v in u.iter_mut() {
        let mut b = [0u8; 4];
        input.read_exact(&mut b)?;
        *v = u32::from_le_bytes(b);
    }
    if u[0] != VERSION {
        return Err(Error::Inconsistent(format!("unsupported snapshot version {}", u[0])));
    }
    let header = SnapshotHeader {
        dim: u[1],
        n_members: u[2],
        n_snapshots: u[3],
        stride: u[4],
    };
    let width = header.dim as usize * header.n_members as usize;
    let mut read_f64 = || -> Result<f64> {
        let mut b = [0u8; 8];
        input.read_exact(&mut b)?;
        Ok(f64::from_le_bytes(b))
    };
    let mut snaps = Vec::with_capacity(header.n_snapshots as usize);
    for k in 0..header.n_snapshots {
        let time = read_f64()?;
        let positions = (0..width).map(|_| read_f64()).collect::<Result<Vec<_>>>()?;
        snaps.push(Snapshot {
            step: k as i64 * header.stride as i64,
            time,
            positions,
        });
    }
    Ok((header, snaps))
}
