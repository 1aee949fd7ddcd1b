use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};
use crate::graph::{Graph, MAX_VERTICES};

/// The `n × m` 0/1 matrix `R(n,m;p)`. Stored column-major: column `a` is the
/// vertex set `V_a` as a bitmask, row `v` is the feature set `L_v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncidenceMatrix {
    n: usize,
    columns: Vec<u32>,
}

impl IncidenceMatrix {
    pub fn new(n: usize, columns: Vec<u32>) -> Result<Self> {
        if !(2..=MAX_VERTICES).contains(&n) {
            return Err(invalid!("vertex count {n} outside 2..={MAX_VERTICES}"));
        }
        let limit = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
        if let Some(c) = columns.iter().find(|&&c| c & !limit != 0) {
            return Err(invalid!("column {c:#b} has rows beyond n = {n}"));
        }
        Ok(Self { n, columns })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.columns.len()
    }

    pub fn get(&self, v: usize, a: usize) -> bool {
        self.columns[a] >> v & 1 == 1
    }

    /// `V_a`.
    pub fn column(&self, a: usize) -> u32 {
        self.columns[a]
    }

    pub fn columns(&self) -> &[u32] {
        &self.columns
    }

    /// `L_v` as the sorted list of features containing `v`.
    pub fn row(&self, v: usize) -> Vec<usize> {
        (0..self.columns.len()).filter(|&a| self.get(v, a)).collect()
    }

    /// Union of the cliques on every column with at least two rows set.
    pub fn graph(&self) -> Graph {
        let mut g = Graph::empty(self.n).expect("validated n");
        for &c in &self.columns {
            if c.count_ones() >= 2 {
                g.add_clique(c);
                if g.is_complete() {
                    break;
                }
            }
        }
        g
    }
}

/// Number of columns with exactly three ones (artifact triangles).
pub fn artifact_triangle_columns(r: &IncidenceMatrix) -> u64 {
    r.columns.iter().filter(|c| c.count_ones() == 3).count() as u64
}

/// Header line `n m`, then `n` rows of `0`/`1` characters.
impl fmt::Display for IncidenceMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {}", self.n, self.columns.len())?;
        let mut line = String::with_capacity(self.columns.len());
        for v in 0..self.n {
            line.clear();
            line.extend(self.columns.iter().map(|c| if c >> v & 1 == 1 { '1' } else { '0' }));
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}

impl FromStr for IncidenceMatrix {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut lines = s.lines();
        let header = lines.next().ok_or_else(|| Error::Parse("empty matrix text".into()))?;
        let mut dims = header.split_whitespace().map(str::parse::<usize>);
        let (n, m) = match (dims.next(), dims.next(), dims.next()) {
            (Some(Ok(n)), Some(Ok(m)), None) => (n, m),
            _ => return Err(Error::Parse(format!("bad header `{header}`, expected `n m`"))),
        };
        if !(2..=MAX_VERTICES).contains(&n) {
            return Err(Error::Parse(format!("vertex count {n} outside 2..={MAX_VERTICES}")));
        }
        let mut columns = vec![0u32; m];
        for v in 0..n {
            let row = lines
                .next()
                .ok_or_else(|| Error::Parse(format!("missing row {v}")))?;
            if row.len() != m {
                return Err(Error::Parse(format!("row {v} has {} entries, expected {m}", row.len())));
            }
            for (a, ch) in row.bytes().enumerate() {
                match ch {
                    b'1' => columns[a] |= 1 << v,
                    b'0' => {}
                    _ => return Err(Error::Parse(format!("row {v} has non-binary entry"))),
                }
            }
        }
        if lines.any(|l| !l.trim().is_empty()) {
            return Err(Error::Parse("trailing rows after n rows".into()));
        }
        IncidenceMatrix::new(n, columns)
    }
}
