//! Mapping matrices and maximum-weight assignment.

use serde::{Deserialize, Serialize};

use crate::error::{PsiError, Result};

/// Dense real matrix of mapping strengths, rows × cols, row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContinuousMappingMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl ContinuousMappingMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(PsiError::DimensionMismatch(format!(
                "{rows}×{cols} mapping matrix with {} entries",
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(PsiError::NonFinite("mapping matrix".into()));
        }
        Ok(ContinuousMappingMatrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(PsiError::DimensionMismatch("ragged score rows".into()));
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }
}

/// Binary one-to-one matrix: every row and column holds at most one 1 and
/// exactly `min(rows, cols)` entries are set.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PermutationMatrix {
    rows: usize,
    cols: usize,
    row_to_col: Vec<Option<usize>>,
}

impl PermutationMatrix {
    pub fn new(rows: usize, cols: usize, row_to_col: Vec<Option<usize>>) -> Result<Self> {
        if row_to_col.len() != rows {
            return Err(PsiError::DimensionMismatch(format!(
                "{} row assignments for {rows} rows",
                row_to_col.len()
            )));
        }
        let mut used = vec![false; cols];
        let mut ones = 0;
        for c in row_to_col.iter().flatten() {
            if *c >= cols || std::mem::replace(&mut used[*c], true) {
                return Err(PsiError::DimensionMismatch(format!(
                    "column {c} assigned twice or out of range in a {rows}×{cols} mapping"
                )));
            }
            ones += 1;
        }
        if ones != rows.min(cols) {
            return Err(PsiError::DimensionMismatch(format!(
                "{rows}×{cols} mapping must set {} entries, got {ones}",
                rows.min(cols)
            )));
        }
        Ok(PermutationMatrix { rows, cols, row_to_col })
    }

    pub fn identity(n: usize) -> Self {
        PermutationMatrix {
            rows: n,
            cols: n,
            row_to_col: (0..n).map(Some).collect(),
        }
    }

    /// Square mapping sending row `i` to column `order[i]`.
    pub fn from_order(order: &[usize]) -> Result<Self> {
        let n = order.len();
        Self::new(n, n, order.iter().map(|&c| Some(c)).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn col_of(&self, row: usize) -> Option<usize> {
        self.row_to_col[row]
    }

    pub fn is_set(&self, row: usize, col: usize) -> bool {
        self.row_to_col[row] == Some(col)
    }

    /// Mapped `(row, col)` pairs in row order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.row_to_col
            .iter()
            .enumerate()
            .filter_map(|(r, c)| c.map(|c| (r, c)))
    }

    pub fn count(&self) -> usize {
        self.rows.min(self.cols)
    }

    /// Row-major 0/1 entries.
    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.rows * self.cols];
        for (r, c) in self.pairs() {
            out[r * self.cols + c] = 1.0;
        }
        out
    }

    pub fn as_scores(&self) -> ContinuousMappingMatrix {
        ContinuousMappingMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.to_dense(),
        }
    }

    /// Composes with a relabeling of the columns: if exemplar node `order[i]`
    /// becomes node `i`, a row mapped to old column `c` maps to the new index of `c`.
    pub fn relabel_columns(&self, order: &[usize]) -> Result<Self> {
        let mut new_index = vec![usize::MAX; order.len()];
        for (i, &old) in order.iter().enumerate() {
            new_index[old] = i;
        }
        Self::new(
            self.rows,
            self.cols,
            self.row_to_col.iter().map(|c| c.map(|c| new_index[c])).collect(),
        )
    }
}

/// Total score of an assignment, summed in row order.
pub fn assignment_total(score: &ContinuousMappingMatrix, mapping: &PermutationMatrix) -> f64 {
    mapping.pairs().map(|(r, c)| score.get(r, c)).sum()
}

/// Straight-through forward projection: the maximum-weight assignment of the
/// continuous entries.
pub fn project(m: &ContinuousMappingMatrix) -> PermutationMatrix {
    hungarian_maximize(m)
}

/// Maximum-weight assignment of `min(R, C)` pairs.
///
/// Rectangular inputs are padded to square with a constant below the minimum
/// entry. Among optimal assignments the lexicographically smallest one (by
/// row, then column) is returned.
pub fn hungarian_maximize(score: &ContinuousMappingMatrix) -> PermutationMatrix {
    let (rows, cols) = (score.rows(), score.cols());
    let n = rows.max(cols);
    let min = score.data().iter().copied().fold(f64::INFINITY, f64::min);
    let max_abs = score.data().iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let pad = min - 1.0;
    // minimisation on the negated, padded scores
    let cost = |r: usize, c: usize| -> f64 {
        if r < rows && c < cols {
            -score.get(r, c)
        } else {
            -pad
        }
    };

    let (assign, u, v) = min_cost_assignment(n, &cost);

    let tol = 1e-9 * (1.0 + max_abs);
    let tight = |r: usize, c: usize| cost(r, c) - u[r + 1] - v[c + 1] <= tol;
    let tight_count = (0..n)
        .flat_map(|r| (0..n).map(move |c| (r, c)))
        .filter(|&(r, c)| tight(r, c))
        .count();

    let to_mapping = |assign: &[usize]| {
        let row_to_col = (0..rows)
            .map(|r| if assign[r] < cols { Some(assign[r]) } else { None })
            .collect();
        PermutationMatrix {
            rows,
            cols,
            row_to_col,
        }
    };

    let primary = to_mapping(&assign);
    if tight_count == n {
        return primary;
    }
    // alternative optima exist: pick the lexicographically smallest perfect
    // matching on the tight subgraph
    let adjacency: Vec<Vec<bool>> = (0..n).map(|r| (0..n).map(|c| tight(r, c)).collect()).collect();
    let mut fixed: Vec<Option<usize>> = vec![None; n];
    for r in 0..n {
        for c in 0..n {
            if !adjacency[r][c] || fixed.contains(&Some(c)) {
                continue;
            }
            fixed[r] = Some(c);
            if perfect_matching(&adjacency, &fixed).is_some() {
                break;
            }
            fixed[r] = None;
        }
        if fixed[r].is_none() {
            return primary;
        }
    }
    let lex: Vec<usize> = fixed.iter().map(|c| c.unwrap_or(usize::MAX)).collect();
    let candidate = to_mapping(&lex);
    if assignment_total(score, &candidate) >= assignment_total(score, &primary) {
        candidate
    } else {
        primary
    }
}

/// O(n³) shortest-augmenting-path assignment on an `n × n` cost function.
/// Returns row → column and the row/column potentials (1-based).
fn min_cost_assignment(n: usize, cost: &dyn Fn(usize, usize) -> f64) -> (Vec<usize>, Vec<f64>, Vec<f64>) {
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];

    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut assign = vec![0usize; n];
    for j in 1..=n {
        if p[j] > 0 {
            assign[p[j] - 1] = j - 1;
        }
    }
    (assign, u, v)
}

/// Kuhn's augmenting paths on a boolean bipartite graph with some rows pinned.
fn perfect_matching(adjacency: &[Vec<bool>], fixed: &[Option<usize>]) -> Option<Vec<usize>> {
    let n = adjacency.len();
    let mut col_owner: Vec<Option<usize>> = vec![None; n];
    for (r, c) in fixed.iter().enumerate() {
        if let Some(c) = c {
            col_owner[*c] = Some(r);
        }
    }

    fn augment(
        r: usize,
        adjacency: &[Vec<bool>],
        fixed: &[Option<usize>],
        col_owner: &mut [Option<usize>],
        seen: &mut [bool],
    ) -> bool {
        for c in 0..adjacency.len() {
            if !adjacency[r][c] || seen[c] {
                continue;
            }
            seen[c] = true;
            match col_owner[c] {
                None => {
                    col_owner[c] = Some(r);
                    return true;
                }
                Some(owner) if fixed[owner].is_none() => {
                    if augment(owner, adjacency, fixed, col_owner, seen) {
                        col_owner[c] = Some(r);
                        return true;
                    }
                }
                Some(_) => {}
            }
        }
        false
    }

    for r in 0..n {
        if fixed[r].is_some() {
            continue;
        }
        let mut seen = vec![false; n];
        if !augment(r, adjacency, fixed, &mut col_owner, &mut seen) {
            return None;
        }
    }
    let mut row_to_col = vec![0; n];
    for (c, owner) in col_owner.iter().enumerate() {
        row_to_col[(*owner)?] = c;
    }
    Some(row_to_col)
}
