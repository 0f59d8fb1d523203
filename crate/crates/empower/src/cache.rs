//! Binary solution cache keyed by a content hash of the game text and solver
//! parameters. Format: magic, version, key hash, then length-prefixed f64
//! arrays (little-endian).

use crate::game::StochasticGame;
use crate::planner::RobotSolution;
use sha2::{Digest, Sha256};
use std::io::{self, Read, Write};
use std::path::Path;

const MAGIC: &[u8; 8] = b"EMPWCACH";
const VERSION: u32 = 1;

/// Content hash of the canonical game text plus a parameter fingerprint.
pub fn cache_key(game_text: &str, params_fingerprint: &str) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update(game_text.as_bytes());
    h.update(b"\x00");
    h.update(params_fingerprint.as_bytes());
    h.finalize().into()
}

fn write_f64s<W: Write>(w: &mut W, xs: &[f64]) -> io::Result<()> {
    w.write_all(&(xs.len() as u64).to_le_bytes())?;
    for &x in xs {
        w.write_all(&x.to_le_bytes())?;
    }
    Ok(())
}

fn read_f64s<R: Read>(r: &mut R) -> io::Result<Vec<f64>> {
    let mut len8 = [0u8; 8];
    r.read_exact(&mut len8)?;
    let len = u64::from_le_bytes(len8) as usize;
    if len > (1 << 32) {
        return Err(io::Error::new(io::ErrorKind::InvalidData, "implausible array length"));
    }
    let mut out = Vec::with_capacity(len);
    let mut b = [0u8; 8];
    for _ in 0..len {
        r.read_exact(&mut b)?;
        out.push(f64::from_le_bytes(b));
    }
    Ok(out)
}

fn flatten_solution(game: &StochasticGame, sol: &RobotSolution) -> Vec<Vec<f64>> {
    let mut arrays = Vec::new();
    arrays.push(sol.q_r.iter().flatten().copied().collect());
    arrays.push(sol.pi_r.iter().flatten().copied().collect());
    arrays.push(sol.v_r.clone());
    arrays.push(sol.u_r.clone());
    arrays.push(sol.x.iter().flatten().copied().collect());
    let mut ve = Vec::new();
    for h in 0..game.n_humans() {
        for vg in &sol.v_e[h] {
            ve.extend_from_slice(vg);
        }
    }
    arrays.push(ve);
    arrays.push(vec![sol.residual, sol.iterations as f64]);
    arrays
}

/// Write a solved game to `path`, keyed so stale caches are never reused.
pub fn store(
    path: &Path,
    game: &StochasticGame,
    key: &[u8; 32],
    sol: &RobotSolution,
) -> io::Result<()> {
    let mut buf = Vec::new();
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    buf.extend_from_slice(key);
    for arr in flatten_solution(game, sol) {
        write_f64s(&mut buf, &arr)?;
    }
    std::fs::write(path, buf)
}

/// Load a cached solution; returns Ok(None) on key mismatch or missing file,
/// Err only on I/O or corruption.
pub fn load(path: &Path, game: &StochasticGame, key: &[u8; 32]) -> io::Result<Option<RobotSolution>> {
    let data = match std::fs::read(path) {
        Ok(d) => d,
        Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(e),
    };
    let mut r = io::Cursor::new(&data);
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(io::Error::new(io::ErrorKind::InvalidData, "bad cache magic"));
    }
    let mut ver = [0u8; 4];
    r.read_exact(&mut ver)?;
    if u32::from_le_bytes(ver) != VERSION {
        return Ok(None);
    }
    let mut stored_key = [0u8; 32];
    r.read_exact(&mut stored_key)?;
    if &stored_key != key {
        return Ok(None);
    }

    let q_flat = read_f64s(&mut r)?;
    let pi_flat = read_f64s(&mut r)?;
    let v_r = read_f64s(&mut r)?;
    let u_r = read_f64s(&mut r)?;
    let x_flat = read_f64s(&mut r)?;
    let ve_flat = read_f64s(&mut r)?;
    let tail = read_f64s(&mut r)?;
    let n = game.n_states();
    if v_r.len() != n || u_r.len() != n || tail.len() != 2 {
        return Err(io::Error::new(io::ErrorKind::InvalidData, "cache shape mismatch"));
    }

    let unflatten_rows = |flat: &[f64], lens: Vec<usize>| -> io::Result<Vec<Vec<f64>>> {
        if flat.len() != lens.iter().sum::<usize>() {
            return Err(io::Error::new(io::ErrorKind::InvalidData, "cache shape mismatch"));
        }
        let mut out = Vec::with_capacity(lens.len());
        let mut i = 0;
        for l in lens {
            out.push(flat[i..i + l].to_vec());
            i += l;
        }
        Ok(out)
    };
    let q_r = unflatten_rows(&q_flat, (0..n).map(|s| game.robot_actions[s].len()).collect())?;
    let pi_r = unflatten_rows(&pi_flat, (0..n).map(|s| game.robot_actions[s].len()).collect())?;
    let x = unflatten_rows(&x_flat, vec![n; game.n_humans()])?;
    let total_goals: usize = game.humans.iter().map(|h| h.goals.len()).sum();
    if ve_flat.len() != total_goals * n {
        return Err(io::Error::new(io::ErrorKind::InvalidData, "cache shape mismatch"));
    }
    let mut v_e = Vec::new();
    let mut i = 0;
    for h in 0..game.n_humans() {
        let mut per_goal = Vec::new();
        for _ in 0..game.humans[h].goals.len() {
            per_goal.push(ve_flat[i..i + n].to_vec());
            i += n;
        }
        v_e.push(per_goal);
    }
    Ok(Some(RobotSolution {
        q_r,
        pi_r,
        v_r,
        u_r,
        x,
        v_e,
        residual: tail[0],
        iterations: tail[1] as usize,
    }))
}
