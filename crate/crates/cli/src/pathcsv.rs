//! The decomposition CSV shared by `paths build`, `paths audit` and `walk run`.

use anyhow::{anyhow, bail, Context, Result};
use gmoat_core::{GapModel, GaussianPrime, NormSegment, Path, PathDecomposition};

use crate::report::Table;

pub const COLUMNS: [&str; 6] = ["path_index", "member_index", "a", "b", "norm", "step_dist_prev"];

pub fn table(d: &PathDecomposition) -> Result<Table> {
    let mut t = Table::new(COLUMNS.to_vec());
    t.meta.push(("segment".into(), format!("{}:{}", d.segment.lo, d.segment.hi)));
    t.meta.push(("model".into(), serde_json::to_string(&d.model)?));
    t.meta.push(("include_axis".into(), d.include_axis.to_string()));
    for path in &d.paths {
        for (m, p) in path.members.iter().enumerate() {
            let step = match m {
                0 => String::new(),
                _ => format!("{:.12}", (p.dist_squared(&path.members[m - 1]) as f64).sqrt()),
            };
            t.push(vec![
                path.index.to_string(),
                m.to_string(),
                p.a.to_string(),
                p.b.to_string(),
                p.norm.to_string(),
                step,
            ]);
        }
    }
    Ok(t)
}

pub fn parse(text: &str) -> Result<PathDecomposition> {
    let mut segment = None;
    let mut model = None;
    let mut include_axis = false;
    let mut header_seen = false;
    let mut paths: Vec<Path> = Vec::new();

    for (no, line) in text.lines().enumerate() {
        let no = no + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(meta) = line.strip_prefix('#') {
            let Some((key, value)) = meta.trim().split_once('=') else { continue };
            match key {
                "segment" => {
                    let s = crate::args::parse_segment(value).map_err(|e| anyhow!("line {no}: {e}"))?;
                    segment = Some(s);
                }
                "model" => {
                    let m: GapModel =
                        serde_json::from_str(value).with_context(|| format!("line {no}: bad model"))?;
                    model = Some(m);
                }
                "include_axis" => include_axis = value == "true",
                _ => {}
            }
            continue;
        }
        if !header_seen {
            let cols: Vec<&str> = line.split(',').map(str::trim).collect();
            if cols != COLUMNS {
                bail!("line {no}: expected header {}", COLUMNS.join(","));
            }
            header_seen = true;
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != COLUMNS.len() {
            bail!("line {no}: expected {} fields, found {}", COLUMNS.len(), f.len());
        }
        let num = |i: usize| -> Result<u64> {
            f[i].trim()
                .parse()
                .with_context(|| format!("line {no}: bad {} {:?}", COLUMNS[i], f[i]))
        };
        let (index, member, a, b, norm) = (num(0)? as usize, num(1)? as usize, num(2)?, num(3)?, num(4)?);
        let p = GaussianPrime::new(a, b).with_context(|| format!("line {no}"))?;
        if p.norm != norm {
            bail!("line {no}: norm {norm} does not match ({a}, {b})");
        }
        match paths.last_mut() {
            Some(last) if last.index == index => {
                if member != last.members.len() {
                    bail!("line {no}: member_index {member} out of order");
                }
                last.members.push(p);
            }
            _ => {
                if member != 0 || index != paths.len() + 1 {
                    bail!("line {no}: path {index} does not continue the numbering");
                }
                paths.push(Path {
                    index,
                    members: vec![p],
                });
            }
        }
    }
    if !header_seen {
        bail!("no CSV header found");
    }
    let segment: NormSegment = segment.ok_or_else(|| anyhow!("missing `# segment=` line"))?;
    let model = model.ok_or_else(|| anyhow!("missing `# model=` line"))?;
    Ok(PathDecomposition {
        segment,
        model,
        include_axis,
        paths,
    })
}
