//! Incidence structures between blocks (storage nodes) and points (coded
//! packets), and the regular ones among them: fractional repetition codes.

use std::fmt;

use serde::Serialize;

use crate::bitset::PointSet;
use crate::error::{Error, Result};

/// Largest supported number of points.
pub const MAX_POINTS: usize = 4096;

/// An `n × v` zero-one incidence relation. Row `i` is the set of points
/// incident with block `i`; repeated rows are allowed.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IncidenceStructure {
    num_points: usize,
    rows: Vec<PointSet>,
}

impl IncidenceStructure {
    /// Builds a structure from explicit point lists, one per block.
    pub fn from_rows<R, I>(num_points: usize, rows: R) -> Result<Self>
    where
        R: IntoIterator<Item = I>,
        I: IntoIterator<Item = usize>,
    {
        check_dims(num_points)?;
        let mut out = Vec::new();
        for (b, row) in rows.into_iter().enumerate() {
            let mut set = PointSet::empty(num_points);
            for p in row {
                if p >= num_points {
                    return Err(Error::Argument(format!(
                        "block {b} references point {p}, but there are only {num_points} points"
                    )));
                }
                set.insert(p);
            }
            out.push(set);
        }
        if out.is_empty() {
            return Err(Error::Argument("structure must have at least one block".into()));
        }
        Ok(IncidenceStructure {
            num_points,
            rows: out,
        })
    }

    /// Builds a structure from a zero-one matrix with rows indexed by blocks.
    pub fn from_matrix<R: AsRef<[u8]>>(matrix: &[R]) -> Result<Self> {
        let first = matrix
            .first()
            .ok_or_else(|| Error::format(1, "empty matrix"))?;
        let v = first.as_ref().len();
        if v == 0 {
            return Err(Error::format(1, "matrix has zero columns"));
        }
        check_dims(v)?;
        let mut rows = Vec::with_capacity(matrix.len());
        for (i, row) in matrix.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != v {
                return Err(Error::format(
                    i + 1,
                    format!("row {i} has {} entries, expected {v}", row.len()),
                ));
            }
            let mut set = PointSet::empty(v);
            for (j, &e) in row.iter().enumerate() {
                match e {
                    0 => {}
                    1 => set.insert(j),
                    other => {
                        return Err(Error::format(
                            i + 1,
                            format!("entry ({i},{j}) is {other}, expected 0 or 1"),
                        ))
                    }
                }
            }
            rows.push(set);
        }
        Ok(IncidenceStructure {
            num_points: v,
            rows,
        })
    }

    pub fn num_blocks(&self) -> usize {
        self.rows.len()
    }

    pub fn num_points(&self) -> usize {
        self.num_points
    }

    pub fn block(&self, i: usize) -> &PointSet {
        &self.rows[i]
    }

    pub fn blocks(&self) -> &[PointSet] {
        &self.rows
    }

    pub fn is_incident(&self, block: usize, point: usize) -> bool {
        self.rows[block].contains(point)
    }

    pub fn row_sums(&self) -> Vec<usize> {
        self.rows.iter().map(PointSet::len).collect()
    }

    pub fn column_sums(&self) -> Vec<usize> {
        let mut sums = vec![0; self.num_points];
        for row in &self.rows {
            for p in row.iter() {
                sums[p] += 1;
            }
        }
        sums
    }

    pub fn to_matrix(&self) -> Vec<Vec<u8>> {
        self.rows
            .iter()
            .map(|r| (0..self.num_points).map(|j| r.contains(j) as u8).collect())
            .collect()
    }

    /// The transpose structure: points become blocks and blocks become points.
    pub fn dual(&self) -> IncidenceStructure {
        let n = self.rows.len();
        let mut rows = vec![PointSet::empty(n); self.num_points];
        for (b, row) in self.rows.iter().enumerate() {
            for p in row.iter() {
                rows[p].insert(b);
            }
        }
        IncidenceStructure { num_points: n, rows }
    }

    /// True iff no two blocks are incident with the same point set.
    pub fn is_simple(&self) -> bool {
        let mut sorted: Vec<&PointSet> = self.rows.iter().collect();
        sorted.sort();
        sorted.windows(2).all(|w| w[0] != w[1])
    }

    /// Parses the incidence-matrix text format: optional `#` comment lines,
    /// a header `n v`, then `n` lines of exactly `v` characters from `{0,1}`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.split('\n').enumerate().map(|(i, l)| (i + 1, l));
        let s = parse_lines(&mut lines)?;
        for (no, line) in lines {
            if !line.is_empty() {
                return Err(Error::format(no, "unexpected content after matrix"));
            }
        }
        Ok(s)
    }

    /// Serializes to the incidence-matrix text format, LF-terminated.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.num_blocks(), self.num_points);
        for row in &self.rows {
            out.extend((0..self.num_points).map(|j| if row.contains(j) { '1' } else { '0' }));
            out.push('\n');
        }
        out
    }
}

fn check_dims(num_points: usize) -> Result<()> {
    if num_points == 0 {
        return Err(Error::Argument("structure must have at least one point".into()));
    }
    if num_points > MAX_POINTS {
        return Err(Error::Argument(format!(
            "{num_points} points exceeds the supported maximum of {MAX_POINTS}"
        )));
    }
    Ok(())
}

/// Reads one matrix from numbered lines, consuming exactly the comment
/// prefix, the header and `n` rows. Leading blank lines are skipped.
pub(crate) fn parse_lines<'a>(
    lines: &mut impl Iterator<Item = (usize, &'a str)>,
) -> Result<IncidenceStructure> {
    let mut last = 0;
    let (hno, header) = loop {
        match lines.next() {
            None => return Err(Error::format(last.max(1), "missing header line `n v`")),
            Some((no, l)) if l.is_empty() || l.starts_with('#') => last = no,
            Some(h) => break h,
        }
    };
    let dims: Vec<&str> = header.split(' ').collect();
    let parse_dim = |s: &str| -> Result<usize> {
        if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
            return Err(Error::format(hno, format!("malformed header `{header}`")));
        }
        s.parse()
            .map_err(|_| Error::format(hno, format!("malformed header `{header}`")))
    };
    if dims.len() != 2 {
        return Err(Error::format(hno, format!("header must be `n v`, got `{header}`")));
    }
    let n = parse_dim(dims[0])?;
    let v = parse_dim(dims[1])?;
    if n == 0 || v == 0 {
        return Err(Error::format(hno, "n and v must be positive"));
    }
    if v > MAX_POINTS {
        return Err(Error::format(hno, format!("v = {v} exceeds maximum {MAX_POINTS}")));
    }
    let mut rows = Vec::with_capacity(n);
    let mut prev = hno;
    for i in 0..n {
        let (no, line) = lines
            .next()
            .ok_or_else(|| Error::format(prev + 1, format!("expected {n} rows, found {i}")))?;
        prev = no;
        if line.len() != v {
            return Err(Error::format(
                no,
                format!("row {i} has {} characters, expected {v}", line.len()),
            ));
        }
        let mut set = PointSet::empty(v);
        for (j, c) in line.bytes().enumerate() {
            match c {
                b'0' => {}
                b'1' => set.insert(j),
                _ => {
                    return Err(Error::format(
                        no,
                        format!("invalid character {:?} at point {j}", c as char),
                    ))
                }
            }
        }
        rows.push(set);
    }
    Ok(IncidenceStructure {
        num_points: v,
        rows,
    })
}

impl fmt::Display for IncidenceStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl fmt::Debug for IncidenceStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("IncidenceStructure")
            .field("n", &self.num_blocks())
            .field("v", &self.num_points)
            .field("rows", &self.rows)
            .finish()
    }
}

/// FR code parameters `(n, α, v, ρ)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct FrParams {
    pub n: usize,
    pub alpha: usize,
    pub v: usize,
    pub rho: usize,
}

impl FrParams {
    /// Checks positivity, `α ≤ v`, `ρ ≤ n` and `n·α = v·ρ`.
    pub fn new(n: usize, alpha: usize, v: usize, rho: usize) -> Result<Self> {
        if n == 0 || alpha == 0 || v == 0 || rho == 0 {
            return Err(Error::Argument(format!(
                "parameters ({n},{alpha},{v},{rho}) must all be positive"
            )));
        }
        if alpha > v || rho > n {
            return Err(Error::Argument(format!(
                "parameters ({n},{alpha},{v},{rho}) need alpha <= v and rho <= n"
            )));
        }
        if n * alpha != v * rho {
            return Err(Error::Argument(format!(
                "parameters ({n},{alpha},{v},{rho}) violate n*alpha = v*rho"
            )));
        }
        Ok(FrParams { n, alpha, v, rho })
    }

    /// Parameters of the transpose code, `(v, ρ, n, α)`.
    pub fn dual(self) -> FrParams {
        FrParams {
            n: self.v,
            alpha: self.rho,
            v: self.n,
            rho: self.alpha,
        }
    }
}

impl fmt::Display for FrParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{},{})", self.n, self.alpha, self.v, self.rho)
    }
}

/// An incidence structure with constant row sum `α` and column sum `ρ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrCode {
    structure: IncidenceStructure,
    alpha: usize,
    rho: usize,
}

impl FrCode {
    pub fn structure(&self) -> &IncidenceStructure {
        &self.structure
    }

    pub fn into_structure(self) -> IncidenceStructure {
        self.structure
    }

    pub fn alpha(&self) -> usize {
        self.alpha
    }

    pub fn rho(&self) -> usize {
        self.rho
    }

    pub fn params(&self) -> FrParams {
        FrParams {
            n: self.structure.num_blocks(),
            alpha: self.alpha,
            v: self.structure.num_points(),
            rho: self.rho,
        }
    }

    pub fn dual(&self) -> FrCode {
        FrCode {
            structure: self.structure.dual(),
            alpha: self.rho,
            rho: self.alpha,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Line {
    Row,
    Column,
}

impl fmt::Display for Line {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Line::Row => "row",
            Line::Column => "column",
        })
    }
}

/// Why a structure is not an FR code: the first row (or, if all rows agree,
/// the first column) whose sum differs from that of row/column 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, thiserror::Error)]
#[error("{kind} {index} has sum {sum}, expected {expected}")]
pub struct NotRegular {
    pub kind: Line,
    pub index: usize,
    pub sum: usize,
    pub expected: usize,
}

/// Returns the FR code if all row sums agree and all column sums agree.
pub fn validate_fr(s: &IncidenceStructure) -> std::result::Result<FrCode, NotRegular> {
    fn first_mismatch(sums: &[usize], kind: Line) -> std::result::Result<usize, NotRegular> {
        let expected = sums[0];
        match sums.iter().position(|&x| x != expected) {
            Some(index) => Err(NotRegular {
                kind,
                index,
                sum: sums[index],
                expected,
            }),
            None => Ok(expected),
        }
    }
    let alpha = first_mismatch(&s.row_sums(), Line::Row)?;
    let rho = first_mismatch(&s.column_sums(), Line::Column)?;
    debug_assert_eq!(s.num_blocks() * alpha, s.num_points() * rho);
    Ok(FrCode {
        structure: s.clone(),
        alpha,
        rho,
    })
}

impl TryFrom<IncidenceStructure> for FrCode {
    type Error = NotRegular;

    fn try_from(s: IncidenceStructure) -> std::result::Result<Self, NotRegular> {
        validate_fr(&s)
    }
}
