use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hyperttsv::{Error, Hypergraph};

use crate::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq)]
pub enum VectorSpec {
    Ones,
    Uniform,
    File(PathBuf),
}

impl VectorSpec {
    pub fn parse(s: &str) -> Result<Self, String> {
        match s {
            "ones" => Ok(VectorSpec::Ones),
            "uniform" => Ok(VectorSpec::Uniform),
            _ => match s.strip_prefix("file:") {
                Some(p) if !p.is_empty() => Ok(VectorSpec::File(PathBuf::from(p))),
                _ => Err(format!("expected ones, uniform or file:PATH, got {s:?}")),
            },
        }
    }
}

fn open(path: &Path) -> CliResult<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|source| CliError::Io { path: path.to_owned(), source })
}

pub fn read_hypergraph(path: &Path) -> CliResult<Hypergraph> {
    Ok(Hypergraph::parse(open(path)?)?)
}

/// Reads a vector file. Lines hold either one value (vertex order) or
/// `vertex,value` keyed by original label; a non-numeric first line is
/// taken as a header.
fn read_vector_file(path: &Path, h: &Hypergraph) -> CliResult<Vec<f64>> {
    let index: HashMap<u64, usize> = h.labels().iter().enumerate().map(|(i, &l)| (l, i)).collect();
    let mut positional = Vec::new();
    let mut keyed = vec![None; h.n()];
    let mut seen_data = false;
    for (idx, line) in open(path)?.lines().enumerate() {
        let line = line.map_err(|source| CliError::Io { path: path.to_owned(), source })?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parse_err = |message: String| CliError::Core(Error::Parse { line: idx + 1, message });
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let value = fields.last().expect("split yields a field").parse::<f64>();
        let Ok(value) = value else {
            if !seen_data {
                seen_data = true;
                continue;
            }
            return Err(parse_err(format!("invalid value in {line:?}")));
        };
        seen_data = true;
        match fields.as_slice() {
            [_] => positional.push(value),
            [label, _] => {
                let v = label
                    .parse::<u64>()
                    .ok()
                    .and_then(|l| index.get(&l).copied())
                    .ok_or_else(|| parse_err(format!("unknown vertex {label:?}")))?;
                keyed[v] = Some(value);
            }
            _ => return Err(parse_err(format!("expected `value` or `vertex,value`, got {line:?}"))),
        }
    }
    if positional.is_empty() {
        return keyed
            .into_iter()
            .enumerate()
            .map(|(v, x)| x.ok_or_else(|| parse_err_missing(v, h)))
            .collect();
    }
    if keyed.iter().any(Option::is_some) {
        return Err(CliError::Usage("vector file mixes positional and keyed lines".into()));
    }
    Ok(positional)
}

fn parse_err_missing(v: usize, h: &Hypergraph) -> CliError {
    CliError::Usage(format!("vector file has no value for vertex {}", h.labels()[v]))
}

pub fn load_vector(spec: &VectorSpec, h: &Hypergraph, seed: u64) -> CliResult<Vec<f64>> {
    match spec {
        VectorSpec::Ones => Ok(vec![1.0; h.n()]),
        VectorSpec::Uniform => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            Ok((0..h.n()).map(|_| 1.0 - rng.gen::<f64>()).collect())
        }
        VectorSpec::File(p) => read_vector_file(p, h),
    }
}

/// Writes to `path`, or to stdout when absent.
pub fn write_output(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|source| CliError::Io { path: p.to_owned(), source }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|source| CliError::Io { path: PathBuf::from("<stdout>"), source })
        }
    }
}
