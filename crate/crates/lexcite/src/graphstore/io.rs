//! Graph persistence: length-prefixed binary files with a magic header
//! and version byte, plus a diffable TSV edge-list export.

use super::{BipartiteGraph, BuildDiagnostics, CoCitationGraph};
use crate::textcite::CitationType;
use crate::{Error, Result};
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

const BIPARTITE_MAGIC: &[u8; 4] = b"LXGB";
const PROJECTION_MAGIC: &[u8; 4] = b"LXGL";
const VERSION: u8 = 1;

fn write_u32<W: Write>(w: &mut W, v: u32) -> Result<()> {
    w.write_all(&v.to_le_bytes())?;
    Ok(())
}

fn write_u64<W: Write>(w: &mut W, v: u64) -> Result<()> {
    w.write_all(&v.to_le_bytes())?;
    Ok(())
}

fn write_i32<W: Write>(w: &mut W, v: i32) -> Result<()> {
    w.write_all(&v.to_le_bytes())?;
    Ok(())
}

fn write_str<W: Write>(w: &mut W, s: &str) -> Result<()> {
    write_u32(w, s.len() as u32)?;
    w.write_all(s.as_bytes())?;
    Ok(())
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut buf = [0u8; 4];
    r.read_exact(&mut buf)?;
    Ok(u32::from_le_bytes(buf))
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut buf = [0u8; 8];
    r.read_exact(&mut buf)?;
    Ok(u64::from_le_bytes(buf))
}

fn read_i32<R: Read>(r: &mut R) -> Result<i32> {
    let mut buf = [0u8; 4];
    r.read_exact(&mut buf)?;
    Ok(i32::from_le_bytes(buf))
}

fn read_u8<R: Read>(r: &mut R) -> Result<u8> {
    let mut buf = [0u8; 1];
    r.read_exact(&mut buf)?;
    Ok(buf[0])
}

fn read_str<R: Read>(r: &mut R) -> Result<String> {
    let len = read_u32(r)? as usize;
    if len > 64 * 1024 * 1024 {
        return Err(Error::InvalidInput(format!(
            "string length {len} exceeds sanity bound"
        )));
    }
    let mut buf = vec![0u8; len];
    r.read_exact(&mut buf)?;
    String::from_utf8(buf).map_err(|e| Error::InvalidInput(format!("non-UTF-8 string: {e}")))
}

fn check_header<R: Read>(r: &mut R, magic: &[u8; 4]) -> Result<()> {
    let mut got = [0u8; 4];
    r.read_exact(&mut got)?;
    if &got != magic {
        return Err(Error::InvalidInput(format!(
            "bad magic {:?}, expected {:?}",
            got, magic
        )));
    }
    let version = read_u8(r)?;
    if version != VERSION {
        return Err(Error::InvalidInput(format!(
            "unsupported graph file version {version}"
        )));
    }
    Ok(())
}

fn type_code(t: CitationType) -> u8 {
    CitationType::ALL.iter().position(|x| *x == t).unwrap() as u8
}

fn type_from_code(c: u8) -> Result<CitationType> {
    CitationType::ALL
        .get(c as usize)
        .copied()
        .ok_or_else(|| Error::InvalidInput(format!("unknown citation type code {c}")))
}

pub fn save_bipartite(g: &BipartiteGraph, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    w.write_all(BIPARTITE_MAGIC)?;
    w.write_all(&[VERSION])?;
    write_u32(&mut w, g.decision_ids.len() as u32)?;
    write_u32(&mut w, g.legislation_keys.len() as u32)?;
    for id in &g.decision_ids {
        write_str(&mut w, id)?;
    }
    for (key, t) in g.legislation_keys.iter().zip(&g.legislation_types) {
        write_str(&mut w, key)?;
        w.write_all(&[type_code(*t)])?;
    }
    for (i, adj) in g.adjacency.iter().enumerate() {
        write_u32(&mut w, adj.len() as u32)?;
        for &(l, c) in adj {
            write_u32(&mut w, l)?;
            write_u32(&mut w, c)?;
        }
        write_i32(&mut w, g.years[i])?;
        w.write_all(&[g.justice_kinds[i]])?;
    }
    write_u32(&mut w, g.diagnostics.missing_meta)?;
    w.flush()?;
    Ok(())
}

pub fn load_bipartite(path: &Path) -> Result<BipartiteGraph> {
    let mut r = BufReader::new(std::fs::File::open(path).map_err(|source| Error::FileRead {
        path: path.to_owned(),
        source,
    })?);
    check_header(&mut r, BIPARTITE_MAGIC)?;
    let n_dec = read_u32(&mut r)? as usize;
    let n_leg = read_u32(&mut r)? as usize;
    let mut decision_ids = Vec::with_capacity(n_dec);
    for _ in 0..n_dec {
        decision_ids.push(read_str(&mut r)?);
    }
    let mut legislation_keys = Vec::with_capacity(n_leg);
    let mut legislation_types = Vec::with_capacity(n_leg);
    for _ in 0..n_leg {
        legislation_keys.push(read_str(&mut r)?);
        legislation_types.push(type_from_code(read_u8(&mut r)?)?);
    }
    let mut adjacency = Vec::with_capacity(n_dec);
    let mut citers: Vec<Vec<(u32, u32)>> = vec![Vec::new(); n_leg];
    let mut years = Vec::with_capacity(n_dec);
    let mut justice_kinds = Vec::with_capacity(n_dec);
    for d in 0..n_dec {
        let len = read_u32(&mut r)? as usize;
        let mut adj = Vec::with_capacity(len);
        for _ in 0..len {
            let l = read_u32(&mut r)?;
            let c = read_u32(&mut r)?;
            if l as usize >= n_leg {
                return Err(Error::InvalidInput(format!(
                    "legislation ordinal {l} out of range"
                )));
            }
            adj.push((l, c));
            citers[l as usize].push((d as u32, c));
        }
        adjacency.push(adj);
        years.push(read_i32(&mut r)?);
        justice_kinds.push(read_u8(&mut r)?);
    }
    let missing_meta = read_u32(&mut r)?;
    // Citer lists come out sorted already because decisions are visited
    // in ordinal order, but sort defensively.
    for list in &mut citers {
        list.sort_unstable();
    }
    Ok(BipartiteGraph {
        decision_ids,
        legislation_keys,
        legislation_types,
        adjacency,
        citers,
        years,
        justice_kinds,
        diagnostics: BuildDiagnostics { missing_meta },
    })
}

pub fn save_projection(g: &CoCitationGraph, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    w.write_all(PROJECTION_MAGIC)?;
    w.write_all(&[VERSION])?;
    write_u32(&mut w, g.keys.len() as u32)?;
    write_u64(&mut w, g.edges.len() as u64)?;
    for key in &g.keys {
        write_str(&mut w, key)?;
    }
    for &(u, v, weight) in &g.edges {
        write_u32(&mut w, u)?;
        write_u32(&mut w, v)?;
        write_u64(&mut w, weight)?;
    }
    write_u32(&mut w, g.min_weight)?;
    write_u32(&mut w, g.skipped_decisions)?;
    w.flush()?;
    Ok(())
}

pub fn load_projection(path: &Path) -> Result<CoCitationGraph> {
    let mut r = BufReader::new(std::fs::File::open(path).map_err(|source| Error::FileRead {
        path: path.to_owned(),
        source,
    })?);
    check_header(&mut r, PROJECTION_MAGIC)?;
    let n_nodes = read_u32(&mut r)? as usize;
    let n_edges = read_u64(&mut r)? as usize;
    let mut keys = Vec::with_capacity(n_nodes);
    for _ in 0..n_nodes {
        keys.push(read_str(&mut r)?);
    }
    let mut edges = Vec::with_capacity(n_edges);
    for _ in 0..n_edges {
        let u = read_u32(&mut r)?;
        let v = read_u32(&mut r)?;
        let w = read_u64(&mut r)?;
        if u >= v || v as usize >= n_nodes {
            return Err(Error::InvalidInput(format!("bad edge ({u},{v})")));
        }
        edges.push((u, v, w));
    }
    let min_weight = read_u32(&mut r)?;
    let skipped = read_u32(&mut r)?;
    Ok(CoCitationGraph::assemble(keys, edges, min_weight, skipped))
}

/// Write the projection as "u-key \t v-key \t weight" lines, sorted by
/// (u, v) ordinal, which matches sorted key order.
pub fn export_projection_tsv(g: &CoCitationGraph, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    for &(u, v, weight) in g.edges() {
        writeln!(w, "{}\t{}\t{}", g.node_key(u), g.node_key(v), weight)?;
    }
    w.flush()?;
    Ok(())
}
