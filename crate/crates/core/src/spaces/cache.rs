//! Binary ball cache keyed by group fingerprint and radius.

use std::fs;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use super::ball::{enumerate_ball, Ball};
use super::group::MarkedGroup;
use super::word::Letter;
use super::Budget;
use crate::error::{Error, Result};

const MAGIC: &[u8; 8] = b"PSGBALL1";

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Cache file for `(group, radius)` under `dir`.
pub fn ball_cache_path(dir: &Path, group: &MarkedGroup, radius: usize) -> PathBuf {
    dir.join(format!("{}-r{radius}.ball", hex(&group.fingerprint()[..16])))
}

pub fn save_ball(dir: &Path, ball: &Ball) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = ball_cache_path(dir, ball.group(), ball.radius());
    let tmp = path.with_extension("tmp");
    {
        let mut w = BufWriter::new(fs::File::create(&tmp)?);
        let (parent, letter, offsets) = ball.parts();
        w.write_all(MAGIC)?;
        w.write_all(&ball.group().fingerprint())?;
        w.write_all(&(ball.radius() as u64).to_le_bytes())?;
        w.write_all(&(parent.len() as u64).to_le_bytes())?;
        for &o in offsets {
            w.write_all(&(o as u64).to_le_bytes())?;
        }
        for &p in parent {
            w.write_all(&p.to_le_bytes())?;
        }
        let bytes: Vec<u8> = letter.iter().map(|l| l.0).collect();
        w.write_all(&bytes)?;
        w.flush()?;
    }
    fs::rename(&tmp, &path)?;
    Ok(path)
}

fn read_u64(r: &mut impl Read) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

/// Loads a cached ball; `Ok(None)` when no cache file exists.
pub fn load_ball(dir: &Path, group: &MarkedGroup, radius: usize) -> Result<Option<Ball>> {
    let path = ball_cache_path(dir, group, radius);
    if !path.exists() {
        return Ok(None);
    }
    let mut r = BufReader::new(fs::File::open(&path)?);
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Cache(format!("{} is not a ball cache", path.display())));
    }
    let mut fp = [0u8; 32];
    r.read_exact(&mut fp)?;
    if fp != group.fingerprint() || read_u64(&mut r)? != radius as u64 {
        return Err(Error::Cache(format!("{} belongs to another ball", path.display())));
    }
    let n = read_u64(&mut r)? as usize;
    let offsets = (0..radius + 2)
        .map(|_| read_u64(&mut r).map(|o| o as usize))
        .collect::<Result<Vec<_>>>()?;
    let mut buf = vec![0u8; 4 * n];
    r.read_exact(&mut buf)?;
    let parent: Vec<u32> = buf
        .chunks_exact(4)
        .map(|c| u32::from_le_bytes([c[0], c[1], c[2], c[3]]))
        .collect();
    let mut letters = vec![0u8; n];
    r.read_exact(&mut letters)?;
    if offsets.last() != Some(&n) || offsets.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::Cache(format!("{} is corrupt", path.display())));
    }
    Ok(Some(Ball::from_parts(
        group.clone(),
        radius,
        parent,
        letters.into_iter().map(Letter).collect(),
        offsets,
    )))
}

/// Loads the ball from `dir` if present, otherwise enumerates and stores it.
pub fn enumerate_ball_cached(
    dir: &Path,
    group: &MarkedGroup,
    radius: usize,
    budget: &Budget,
) -> Result<Ball> {
    if let Some(ball) = load_ball(dir, group, radius)? {
        return Ok(ball);
    }
    let ball = enumerate_ball(group, radius, budget)?;
    save_ball(dir, &ball)?;
    Ok(ball)
}
