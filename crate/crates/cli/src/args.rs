//! Parsing shared by the subcommands.

use std::path::Path;

use nevlab::corpus::Corpus;
use nevlab::model::FunctionModel;
use nevlab::nevanlinna::RadiusGrid;

use crate::Failure;

/// Resolves `--function`: a reference corpus id, else a corpus file holding
/// exactly one entry.
pub fn resolve_function(spec: &str) -> Result<(String, FunctionModel), Failure> {
    if let Some(m) = Corpus::reference().get(spec) {
        return Ok((m.id().to_string(), m.model.clone()));
    }
    let path = Path::new(spec);
    if !path.is_file() {
        let ids = Corpus::reference().ids().join(", ");
        return Err(Failure::Usage(format!(
            "'{spec}' is neither a reference function ({ids}) nor a corpus file"
        )));
    }
    let corpus = Corpus::from_path(path)?;
    match corpus.members() {
        [m] => Ok((m.id().to_string(), m.model.clone())),
        ms => Err(Failure::Usage(format!(
            "{} holds {} entries; a function file must hold exactly one",
            path.display(),
            ms.len()
        ))),
    }
}

/// Parses `lo:hi:geometric:count`.
pub fn parse_range(text: &str) -> Result<RadiusGrid, Failure> {
    let bad = |why: &str| Failure::Usage(format!("bad range '{text}': {why}; expected lo:hi:geometric:count"));
    let parts: Vec<&str> = text.split(':').collect();
    let [lo, hi, kind, count] = parts[..] else {
        return Err(bad("wrong number of fields"));
    };
    if kind != "geometric" {
        return Err(bad("only geometric spacing is supported"));
    }
    let lo: f64 = lo.parse().map_err(|_| bad("lo is not a number"))?;
    let hi: f64 = hi.parse().map_err(|_| bad("hi is not a number"))?;
    let count: usize = count.parse().map_err(|_| bad("count is not a nonnegative integer"))?;
    if count < 2 {
        return Err(bad("count must be at least 2"));
    }
    Ok(RadiusGrid::spanning(lo, hi, count)?)
}

/// Exact radii of a spanning grid, with the last one pinned to `hi`.
pub fn range_radii(grid: &RadiusGrid, hi: f64) -> Vec<f64> {
    let mut radii = grid.radii();
    if let Some(last) = radii.last_mut() {
        *last = hi;
    }
    radii
}
