//! Reader for the TUDataset text layout.
//!
//! `DS_A.txt` holds one edge `i, j` per line over 1-indexed global node ids;
//! `DS_graph_indicator.txt` holds the 1-indexed graph id of node `i` on line
//! `i`. Graph ids must start at 1 and never skip. Node labels, if present,
//! are ignored: features are degrees.

use std::fs;
use std::path::{Path, PathBuf};

use super::Graph;
use crate::{Error, Result};

fn read(path: &Path) -> Result<String> {
    Ok(fs::read_to_string(path)?)
}

/// Reads `<dir>/<name>_A.txt` and `<dir>/<name>_graph_indicator.txt`. When
/// `name` is `None` the directory must contain exactly one `*_A.txt`.
pub fn parse_tudataset(dir: &Path, name: Option<&str>) -> Result<Vec<Graph>> {
    let name = match name {
        Some(n) => n.to_string(),
        None => discover_name(dir)?,
    };
    let a_path = dir.join(format!("{name}_A.txt"));
    let ind_path = dir.join(format!("{name}_graph_indicator.txt"));
    parse_tudataset_text(&read(&a_path)?, &read(&ind_path)?, &a_path, &ind_path)
}

fn discover_name(dir: &Path) -> Result<String> {
    let mut names: Vec<String> = fs::read_dir(dir)?
        .filter_map(|e| e.ok())
        .filter_map(|e| e.file_name().to_str().and_then(|f| f.strip_suffix("_A.txt")).map(String::from))
        .collect();
    names.sort();
    match names.len() {
        1 => Ok(names.pop().expect("one name")),
        0 => Err(Error::precondition(format!("no *_A.txt file in {}", dir.display()))),
        _ => Err(Error::precondition(format!(
            "several datasets in {}: {}; pass a name",
            dir.display(),
            names.join(", ")
        ))),
    }
}

fn parse_index(field: &str, path: &Path, line: usize) -> Result<usize> {
    let v: usize = field
        .trim()
        .parse()
        .map_err(|_| Error::parse(path, line, format!("expected a positive integer, got `{}`", field.trim())))?;
    if v == 0 {
        return Err(Error::parse(path, line, "indices are 1-based"));
    }
    Ok(v)
}

/// Parses the two files from memory. Paths only label errors.
pub fn parse_tudataset_text(
    edges_text: &str,
    indicator_text: &str,
    edges_path: &Path,
    indicator_path: &Path,
) -> Result<Vec<Graph>> {
    // (graph index, local node id) for each global node.
    let mut owner: Vec<(usize, usize)> = Vec::new();
    let mut sizes: Vec<usize> = Vec::new();
    for (k, raw) in indicator_text.lines().enumerate() {
        let line = k + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let gid = parse_index(raw, indicator_path, line)?;
        if gid == sizes.len() + 1 {
            sizes.push(0);
        } else if gid != sizes.len() {
            return Err(Error::parse(
                indicator_path,
                line,
                format!("graph id {gid} after {}; ids must be contiguous and ascending", sizes.len()),
            ));
        }
        owner.push((gid - 1, sizes[gid - 1]));
        sizes[gid - 1] += 1;
    }

    let mut edges: Vec<Vec<(usize, usize)>> = vec![Vec::new(); sizes.len()];
    for (k, raw) in edges_text.lines().enumerate() {
        let line = k + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = raw.split(',').collect();
        if fields.len() != 2 {
            return Err(Error::parse(edges_path, line, format!("expected `i, j`, got `{raw}`")));
        }
        let (u, v) = (parse_index(fields[0], edges_path, line)?, parse_index(fields[1], edges_path, line)?);
        let lookup = |x: usize| {
            owner.get(x - 1).copied().ok_or_else(|| {
                Error::parse(edges_path, line, format!("node {x} not declared ({} nodes)", owner.len()))
            })
        };
        let ((gu, lu), (gv, lv)) = (lookup(u)?, lookup(v)?);
        if gu != gv {
            return Err(Error::parse(edges_path, line, format!("edge ({u}, {v}) joins graphs {} and {}", gu + 1, gv + 1)));
        }
        edges[gu].push((lu, lv));
    }

    sizes
        .into_iter()
        .zip(edges)
        .map(|(n, e)| Graph::new(n, e))
        .collect()
}

/// Conventional file paths of a named dataset.
pub fn tudataset_paths(dir: &Path, name: &str) -> (PathBuf, PathBuf) {
    (dir.join(format!("{name}_A.txt")), dir.join(format!("{name}_graph_indicator.txt")))
}
