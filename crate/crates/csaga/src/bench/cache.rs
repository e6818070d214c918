//! Disk cache for reference solutions, keyed by the exact problem bytes
//! and solve tolerance. Entries store `f64` bit patterns, so a cache hit
//! reproduces the solve bit-for-bit; writes go through a temp file and
//! rename, so concurrent runs can share a directory.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::objectives::{FiniteSumProblem, Reference};
use crate::vecmath::DenseVec;

pub const CACHE_ENV: &str = "CSAGA_CACHE_DIR";
pub const DEFAULT_CACHE_DIR: &str = ".csaga_cache";

/// Cache directory precedence: explicit flag, then `CSAGA_CACHE_DIR`,
/// then `.csaga_cache` in the working directory.
pub fn resolve_cache_dir(flag: Option<&Path>) -> PathBuf {
    if let Some(p) = flag {
        return p.to_path_buf();
    }
    if let Some(env) = std::env::var_os(CACHE_ENV) {
        if !env.is_empty() {
            return PathBuf::from(env);
        }
    }
    PathBuf::from(DEFAULT_CACHE_DIR)
}

/// Hex digest identifying `(problem, tol)`.
pub fn reference_key(p: &FiniteSumProblem, tol: f64) -> String {
    let mut h = Sha256::new();
    h.update(p.canonical_bytes());
    h.update(tol.to_bits().to_be_bytes());
    let digest = h.finalize();
    let mut s = String::with_capacity(64);
    for b in digest {
        s.push_str(&format!("{b:02x}"));
    }
    s
}

/// Fetch the reference solution from `dir`, or solve and persist it.
/// Returns the reference and whether it came from the cache; unreadable
/// or corrupt entries are silently recomputed and rewritten.
pub fn get_or_solve(dir: &Path, p: &FiniteSumProblem, tol: f64) -> Result<(Reference, bool)> {
    let path = dir.join(format!("{}.ref", reference_key(p, tol)));
    if let Some(r) = read_reference(&path, p.d()) {
        return Ok((r, true));
    }
    let r = p.solve_reference(tol)?;
    write_reference_atomic(dir, &path, &r)?;
    Ok((r, false))
}

fn read_reference(path: &Path, d: usize) -> Option<Reference> {
    let text = fs::read_to_string(path).ok()?;
    let mut lines = text.lines();
    if lines.next()? != "csaga-ref 1" {
        return None;
    }
    let dim: usize = lines.next()?.strip_prefix("d ")?.parse().ok()?;
    if dim != d {
        return None;
    }
    let f_star = parse_bits(lines.next()?.strip_prefix("f ")?)?;
    let mut coords = Vec::with_capacity(d);
    for line in lines {
        coords.push(parse_bits(line.strip_prefix("x ")?)?);
    }
    if coords.len() != d {
        return None;
    }
    Some(Reference {
        x_star: DenseVec::from_vec(coords),
        f_star,
    })
}

fn parse_bits(s: &str) -> Option<f64> {
    u64::from_str_radix(s.trim(), 16).ok().map(f64::from_bits)
}

fn write_reference_atomic(dir: &Path, path: &Path, r: &Reference) -> Result<()> {
    static COUNTER: AtomicU64 = AtomicU64::new(0);
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let tmp = dir.join(format!(
        ".tmp.{}.{}",
        std::process::id(),
        COUNTER.fetch_add(1, Ordering::Relaxed)
    ));
    let mut buf = String::new();
    buf.push_str("csaga-ref 1\n");
    buf.push_str(&format!("d {}\n", r.x_star.len()));
    buf.push_str(&format!("f {:016x}\n", r.f_star.to_bits()));
    for j in 0..r.x_star.len() {
        buf.push_str(&format!("x {:016x}\n", r.x_star[j].to_bits()));
    }
    {
        let mut f = fs::File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
        f.write_all(buf.as_bytes())
            .map_err(|e| Error::io(&tmp, e))?;
    }
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))?;
    Ok(())
}
