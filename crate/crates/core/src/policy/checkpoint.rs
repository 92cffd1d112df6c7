//! Versioned text checkpoints. Floats use shortest round-trip formatting,
//! so `load(save(p)) == p` exactly.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::policy::mlp::Mlp;
use crate::policy::{CriticParams, PolicyParams};

pub const CHECKPOINT_BANNER: &str = "RLCO-CHECKPOINT v1";

pub fn save_checkpoint(
    policy: &PolicyParams,
    critic: Option<&CriticParams>,
    path: &Path,
) -> Result<()> {
    let mut out = String::new();
    out.push_str(CHECKPOINT_BANNER);
    out.push('\n');
    writeln!(out, "policy {} {}", policy.history_h, policy.chunk_h).expect("string write");
    write_mlp(&mut out, &policy.mlp);
    out.push_str("log_std");
    for v in &policy.log_std {
        write!(out, " {v}").expect("string write");
    }
    out.push('\n');
    if let Some(c) = critic {
        writeln!(out, "critic {}", c.history_h).expect("string write");
        write_mlp(&mut out, &c.mlp);
    }
    out.push_str("end\n");

    let tmp = path.with_extension("ckpt.tmp");
    fs::write(&tmp, out)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn load_checkpoint(path: &Path) -> Result<(PolicyParams, Option<CriticParams>)> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    match lines.next() {
        Some(b) if b == CHECKPOINT_BANNER => {}
        other => {
            return Err(Error::Checkpoint(format!(
                "bad banner {other:?}, expected `{CHECKPOINT_BANNER}`"
            )))
        }
    }
    let header = lines
        .next()
        .ok_or_else(|| Error::Checkpoint("missing policy header".into()))?;
    let mut parts = header.split_whitespace();
    if parts.next() != Some("policy") {
        return Err(Error::Checkpoint("expected `policy` section".into()));
    }
    let history_h: usize = parse(parts.next(), "history_h")?;
    let chunk_h: usize = parse(parts.next(), "chunk_h")?;
    let mlp = read_mlp(&mut lines)?;
    let log_std_line = lines
        .next()
        .ok_or_else(|| Error::Checkpoint("missing log_std".into()))?;
    let mut ls = log_std_line.split_whitespace();
    if ls.next() != Some("log_std") {
        return Err(Error::Checkpoint("expected `log_std`".into()));
    }
    let log_std: Vec<f64> = ls
        .map(|t| t.parse().map_err(|_| Error::Checkpoint(format!("bad float `{t}`"))))
        .collect::<Result<_>>()?;
    let policy = PolicyParams {
        history_h,
        chunk_h,
        mlp,
        log_std,
    };

    let mut critic = None;
    match lines.next() {
        Some("end") | None => {}
        Some(l) if l.starts_with("critic") => {
            let mut parts = l.split_whitespace();
            parts.next();
            let ch: usize = parse(parts.next(), "critic history_h")?;
            let mlp = read_mlp(&mut lines)?;
            critic = Some(CriticParams {
                history_h: ch,
                mlp,
            });
        }
        Some(other) => {
            return Err(Error::Checkpoint(format!("unexpected section `{other}`")));
        }
    }
    Ok((policy, critic))
}

fn write_mlp(out: &mut String, mlp: &Mlp) {
    out.push_str("sizes");
    for s in &mlp.sizes {
        write!(out, " {s}").expect("string write");
    }
    out.push('\n');
    for l in 0..mlp.n_layers() {
        write!(out, "W{l}").expect("string write");
        for v in &mlp.weights[l] {
            write!(out, " {v}").expect("string write");
        }
        out.push('\n');
        write!(out, "b{l}").expect("string write");
        for v in &mlp.biases[l] {
            write!(out, " {v}").expect("string write");
        }
        out.push('\n');
    }
}

fn read_mlp<'a>(lines: &mut impl Iterator<Item = &'a str>) -> Result<Mlp> {
    let sizes_line = lines
        .next()
        .ok_or_else(|| Error::Checkpoint("missing sizes".into()))?;
    let mut sp = sizes_line.split_whitespace();
    if sp.next() != Some("sizes") {
        return Err(Error::Checkpoint("expected `sizes`".into()));
    }
    let sizes: Vec<usize> = sp
        .map(|t| t.parse().map_err(|_| Error::Checkpoint(format!("bad size `{t}`"))))
        .collect::<Result<_>>()?;
    if sizes.len() < 2 {
        return Err(Error::Checkpoint("mlp needs at least two sizes".into()));
    }
    let mut mlp = Mlp::zeros(&sizes);
    for l in 0..mlp.n_layers() {
        let w = read_vec(lines, &format!("W{l}"), sizes[l] * sizes[l + 1])?;
        let b = read_vec(lines, &format!("b{l}"), sizes[l + 1])?;
        mlp.weights[l] = w;
        mlp.biases[l] = b;
    }
    Ok(mlp)
}

fn read_vec<'a>(
    lines: &mut impl Iterator<Item = &'a str>,
    tag: &str,
    expect_len: usize,
) -> Result<Vec<f64>> {
    let line = lines
        .next()
        .ok_or_else(|| Error::Checkpoint(format!("missing `{tag}`")))?;
    let mut parts = line.split_whitespace();
    match parts.next() {
        Some(t) if t == tag => {}
        other => return Err(Error::Checkpoint(format!("expected `{tag}`, found {other:?}"))),
    }
    let v: Vec<f64> = parts
        .map(|t| t.parse().map_err(|_| Error::Checkpoint(format!("bad float `{t}`"))))
        .collect::<Result<_>>()?;
    if v.len() != expect_len {
        return Err(Error::Checkpoint(format!(
            "`{tag}` has {} values, expected {expect_len}",
            v.len()
        )));
    }
    Ok(v)
}

fn parse<T: std::str::FromStr>(tok: Option<&str>, name: &str) -> Result<T> {
    tok.ok_or_else(|| Error::Checkpoint(format!("missing {name}")))?
        .parse()
        .map_err(|_| Error::Checkpoint(format!("bad {name}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;

    #[test]
    fn save_load_identity() {
        let mut rng = substream(0, "ckpt", 0);
        let policy = PolicyParams::init(1, 4, -1.5, &mut rng);
        let critic = CriticParams::init(1, &mut rng);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.ckpt");
        save_checkpoint(&policy, Some(&critic), &path).unwrap();
        let (p2, c2) = load_checkpoint(&path).unwrap();
        assert_eq!(p2, policy);
        assert_eq!(c2.unwrap(), critic);
    }

    #[test]
    fn policy_only_checkpoint() {
        let mut rng = substream(1, "ckpt", 0);
        let policy = PolicyParams::init(2, 4, -1.0, &mut rng);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.ckpt");
        save_checkpoint(&policy, None, &path).unwrap();
        let (p2, c2) = load_checkpoint(&path).unwrap();
        assert_eq!(p2, policy);
        assert!(c2.is_none());
    }

    #[test]
    fn bad_banner_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.ckpt");
        std::fs::write(&path, "NOPE\n").unwrap();
        assert!(matches!(load_checkpoint(&path), Err(Error::Checkpoint(_))));
    }
}
