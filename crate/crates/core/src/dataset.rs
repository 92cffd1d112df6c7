//! Line-delimited dataset files.
//!
//! Layout: line 1 is the version banner, line 2 the metadata record, then one
//! `traj` header per trajectory followed by its `step` records. Floats are
//! written with Rust's shortest round-trip decimal formatting, so
//! `read(write(d)) == d` holds bit-exactly.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::types::{
    Action, Dataset, DomainTag, Instruction, Observation, Step, TaskKind, Trajectory, OBS_LEN,
};

pub const DATASET_BANNER: &str = "RLCO-DATASET v1";

pub fn write_dataset(d: &Dataset, path: &Path) -> Result<()> {
    d.validate()?;
    let mut out = String::new();
    out.push_str(DATASET_BANNER);
    out.push('\n');

    let domain = d.domain.unwrap_or(DomainTag::Sim);
    out.push_str("meta ");
    out.push_str(domain.as_str());
    for (k, v) in &d.meta {
        write!(out, " {k}={v}").expect("string write");
    }
    out.push('\n');

    for t in &d.trajectories {
        writeln!(
            out,
            "traj {} {} {} {}",
            t.instruction.task.as_str(),
            t.instruction.target_index,
            t.success as u8,
            t.steps.len()
        )
        .expect("string write");
        for s in &t.steps {
            out.push_str("step");
            for v in s.obs.as_slice() {
                write!(out, " {v}").expect("string write");
            }
            write!(
                out,
                " {} {} {} {} {}",
                s.action.dx, s.action.dy, s.action.grip, s.reward, s.done as u8
            )
            .expect("string write");
            out.push('\n');
        }
    }

    // Atomic write: temp file in the same directory, then rename.
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, out)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn read_dataset(path: &Path) -> Result<Dataset> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate();

    let (_, banner) = lines
        .next()
        .ok_or_else(|| Error::FormatVersionMismatch {
            expected: DATASET_BANNER.into(),
            found: "<empty file>".into(),
        })?;
    if banner != DATASET_BANNER {
        return Err(Error::FormatVersionMismatch {
            expected: DATASET_BANNER.into(),
            found: banner.into(),
        });
    }

    let (meta_idx, meta_line) = lines.next().ok_or(Error::CorruptRecord {
        index: 2,
        detail: "missing metadata record".into(),
    })?;
    let mut meta_parts = meta_line.split_whitespace();
    match meta_parts.next() {
        Some("meta") => {}
        _ => {
            return Err(Error::CorruptRecord {
                index: meta_idx + 1,
                detail: "expected `meta` record".into(),
            })
        }
    }
    let domain = match meta_parts.next() {
        Some("sim") => DomainTag::Sim,
        Some("real") => DomainTag::Real,
        other => {
            return Err(Error::CorruptRecord {
                index: meta_idx + 1,
                detail: format!("bad domain {other:?}"),
            })
        }
    };
    let mut meta = BTreeMap::new();
    for kv in meta_parts {
        let (k, v) = kv.split_once('=').ok_or(Error::CorruptRecord {
            index: meta_idx + 1,
            detail: format!("bad meta entry `{kv}`"),
        })?;
        meta.insert(k.to_string(), v.to_string());
    }

    let mut dataset = Dataset::new(domain);
    dataset.meta = meta;

    let corrupt = |index: usize, detail: String| Error::CorruptRecord { index, detail };

    while let Some((idx, line)) = lines.next() {
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        if parts.next() != Some("traj") {
            return Err(corrupt(idx + 1, "expected `traj` header".into()));
        }
        let task = TaskKind::parse(
            parts
                .next()
                .ok_or_else(|| corrupt(idx + 1, "missing task".into()))?,
        )
        .map_err(|e| corrupt(idx + 1, e.to_string()))?;
        let target: usize = parse_field(&mut parts, idx, "target_index")?;
        let success: u8 = parse_field(&mut parts, idx, "success")?;
        let n_steps: usize = parse_field(&mut parts, idx, "n_steps")?;

        let instruction = Instruction::new(task, target).map_err(|e| corrupt(idx + 1, e.to_string()))?;
        let mut steps = Vec::with_capacity(n_steps);
        for _ in 0..n_steps {
            let (sidx, sline) = lines
                .next()
                .ok_or_else(|| corrupt(idx + 1, "trajectory truncated".into()))?;
            let mut sp = sline.split_whitespace();
            if sp.next() != Some("step") {
                return Err(corrupt(sidx + 1, "expected `step` record".into()));
            }
            let mut values = Vec::with_capacity(OBS_LEN + 5);
            for tok in sp {
                let v: f64 = tok
                    .parse()
                    .map_err(|_| corrupt(sidx + 1, format!("bad float `{tok}`")))?;
                values.push(v);
            }
            if values.len() != OBS_LEN + 5 {
                return Err(corrupt(
                    sidx + 1,
                    format!("expected {} fields, found {}", OBS_LEN + 5, values.len()),
                ));
            }
            let obs = Observation(values[..OBS_LEN].to_vec());
            let action = Action::new(values[OBS_LEN], values[OBS_LEN + 1], values[OBS_LEN + 2]);
            let reward = values[OBS_LEN + 3];
            let done = values[OBS_LEN + 4] != 0.0;
            steps.push(Step {
                obs,
                action,
                reward,
                done,
            });
        }
        let traj = Trajectory {
            instruction,
            domain,
            steps,
            success: success != 0,
        };
        traj.validate().map_err(|e| corrupt(idx + 1, e.to_string()))?;
        dataset.trajectories.push(traj);
    }

    dataset.validate()?;
    Ok(dataset)
}

fn parse_field<'a, T: std::str::FromStr>(
    parts: &mut impl Iterator<Item = &'a str>,
    line_idx: usize,
    name: &str,
) -> Result<T> {
    let tok = parts.next().ok_or(Error::CorruptRecord {
        index: line_idx + 1,
        detail: format!("missing {name}"),
    })?;
    tok.parse().map_err(|_| Error::CorruptRecord {
        index: line_idx + 1,
        detail: format!("bad {name} `{tok}`"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::DomainTag;

    fn sample_dataset() -> Dataset {
        let instr = Instruction::new(TaskKind::PickPlace, 0).unwrap();
        let mut obs = Observation::zeros();
        obs.0[0] = 0.123456789012345;
        obs.0[1] = -0.3;
        let steps = vec![
            Step {
                obs: obs.clone(),
                action: Action::new(0.05, -0.013, 1.0),
                reward: 0.2384058440442351,
                done: false,
            },
            Step {
                obs: obs.clone(),
                action: Action::new(-0.001, 0.0, -1.0),
                reward: 1.0,
                done: false,
            },
            Step {
                obs,
                action: Action::new(0.0, 0.0, 1.0),
                reward: -0.4,
                done: true,
            },
        ];
        let mut d = Dataset::new(DomainTag::Real);
        d.meta.insert("generator".into(), "test".into());
        d.meta.insert("seed".into(), "7".into());
        d.push(Trajectory {
            instruction: instr,
            domain: DomainTag::Real,
            steps,
            success: true,
        })
        .unwrap();
        d
    }

    #[test]
    fn empty_dataset_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("empty.rlds");
        let d = Dataset::new(DomainTag::Sim);
        write_dataset(&d, &path).unwrap();
        let back = read_dataset(&path).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.rlds");
        let d = sample_dataset();
        write_dataset(&d, &path).unwrap();
        let back = read_dataset(&path).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn truncated_last_line_is_corrupt_record() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.rlds");
        write_dataset(&sample_dataset(), &path).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        let cut = text.trim_end().rfind(' ').unwrap();
        fs::write(&path, &text[..cut]).unwrap();
        match read_dataset(&path) {
            Err(Error::CorruptRecord { index, .. }) => assert!(index >= 3),
            other => panic!("expected CorruptRecord, got {other:?}"),
        }
    }

    #[test]
    fn version_mismatch_detected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.rlds");
        fs::write(&path, "RLCO-DATASET v9\nmeta sim\n").unwrap();
        assert!(matches!(
            read_dataset(&path),
            Err(Error::FormatVersionMismatch { .. })
        ));
    }
}
