//! Matrix Market coordinate files and batch assembly.
//!
//! Supported subset: `matrix coordinate real` with `general` or `symmetric`
//! symmetry. Symmetric files are expanded to full storage on read. A batch
//! is assembled from a directory of files that must all share one sparsity
//! pattern; each file contributes one (or more, when replicated) value
//! planes.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use batchsolve_core::{BatchCsr, BatchMatrix};

use crate::error::HarnessError;

/// One parsed Matrix Market file, symmetric expansion applied, entries
/// sorted by row then column (0-based).
#[derive(Debug, Clone, PartialEq)]
pub struct MtxMatrix {
    pub num_rows: usize,
    pub num_cols: usize,
    /// Whether the file declared `symmetric` (storage is expanded either way).
    pub symmetric: bool,
    pub entries: Vec<(usize, usize, f64)>,
}

impl MtxMatrix {
    /// Positions stored in the assembled pattern, explicit zeros included.
    pub fn stored_nnz(&self) -> usize {
        self.entries.len()
    }

    /// Stored positions whose value is not exactly zero.
    pub fn numeric_nnz(&self) -> usize {
        self.entries.iter().filter(|&&(_, _, v)| v != 0.0).count()
    }
}

fn parse_err(origin: &str, line: usize, msg: impl Into<String>) -> HarnessError {
    HarnessError::Parse {
        origin: origin.to_string(),
        line,
        msg: msg.into(),
    }
}

/// Parse Matrix Market text. `origin` names the source in errors.
pub fn parse_matrix_market(text: &str, origin: &str) -> Result<MtxMatrix, HarnessError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));

    let (_, header) = lines
        .next()
        .ok_or_else(|| parse_err(origin, 1, "empty file"))?;
    let fields: Vec<String> = header.split_whitespace().map(str::to_lowercase).collect();
    if fields.first().map(String::as_str) != Some("%%matrixmarket") {
        return Err(parse_err(origin, 1, "missing %%MatrixMarket header"));
    }
    if fields.len() != 5 {
        return Err(parse_err(
            origin,
            1,
            format!("header needs 5 fields, found {}", fields.len()),
        ));
    }
    if fields[1] != "matrix" || fields[2] != "coordinate" {
        return Err(parse_err(
            origin,
            1,
            format!("unsupported object/format '{} {}'", fields[1], fields[2]),
        ));
    }
    if fields[3] != "real" {
        return Err(parse_err(
            origin,
            1,
            format!(
                "unsupported field type '{}', only 'real' is handled",
                fields[3]
            ),
        ));
    }
    let symmetric = match fields[4].as_str() {
        "general" => false,
        "symmetric" => true,
        other => {
            return Err(parse_err(
                origin,
                1,
                format!("unsupported symmetry '{other}', only general/symmetric"),
            ))
        }
    };

    let mut data = lines.filter(|(_, l)| {
        let t = l.trim();
        !t.is_empty() && !t.starts_with('%')
    });

    let (dims_line, dims) = data
        .next()
        .ok_or_else(|| parse_err(origin, 1, "missing size line"))?;
    let dims_fields: Vec<&str> = dims.split_whitespace().collect();
    if dims_fields.len() != 3 {
        return Err(parse_err(
            origin,
            dims_line,
            format!("size line needs 'rows cols nnz', found '{dims}'"),
        ));
    }
    let parse_dim = |s: &str, what: &str| {
        s.parse::<usize>()
            .map_err(|_| parse_err(origin, dims_line, format!("bad {what} '{s}'")))
    };
    let num_rows = parse_dim(dims_fields[0], "row count")?;
    let num_cols = parse_dim(dims_fields[1], "column count")?;
    let declared_nnz = parse_dim(dims_fields[2], "entry count")?;
    if num_rows == 0 || num_cols == 0 {
        return Err(parse_err(origin, dims_line, "matrix has a zero dimension"));
    }
    if symmetric && num_rows != num_cols {
        return Err(parse_err(
            origin,
            dims_line,
            format!("symmetric matrix must be square, got {num_rows} x {num_cols}"),
        ));
    }

    let mut entries: Vec<(usize, usize, f64)> = Vec::with_capacity(declared_nnz);
    let mut seen = 0usize;
    for (line_no, line) in data {
        if seen == declared_nnz {
            return Err(parse_err(
                origin,
                line_no,
                format!("more than the declared {declared_nnz} entries"),
            ));
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(parse_err(
                origin,
                line_no,
                format!("entry line needs 'row col value', found '{line}'"),
            ));
        }
        let r: usize = fields[0]
            .parse()
            .map_err(|_| parse_err(origin, line_no, format!("bad row index '{}'", fields[0])))?;
        let c: usize = fields[1]
            .parse()
            .map_err(|_| parse_err(origin, line_no, format!("bad column index '{}'", fields[1])))?;
        let v: f64 = fields[2]
            .parse()
            .map_err(|_| parse_err(origin, line_no, format!("bad value '{}'", fields[2])))?;
        if r < 1 || r > num_rows || c < 1 || c > num_cols {
            return Err(parse_err(
                origin,
                line_no,
                format!("index ({r}, {c}) outside {num_rows} x {num_cols} (indices are 1-based)"),
            ));
        }
        entries.push((r - 1, c - 1, v));
        if symmetric && r != c {
            entries.push((c - 1, r - 1, v));
        }
        seen += 1;
    }
    if seen != declared_nnz {
        return Err(parse_err(
            origin,
            0,
            format!("declared {declared_nnz} entries but file holds {seen}"),
        ));
    }

    entries.sort_by_key(|&(r, c, _)| (r, c));
    for w in entries.windows(2) {
        if (w[0].0, w[0].1) == (w[1].0, w[1].1) {
            return Err(parse_err(
                origin,
                0,
                format!(
                    "duplicate entry at row {}, col {} (1-based) after symmetric expansion",
                    w[0].0 + 1,
                    w[0].1 + 1
                ),
            ));
        }
    }

    Ok(MtxMatrix {
        num_rows,
        num_cols,
        symmetric,
        entries,
    })
}

/// Read and parse one `.mtx` file.
pub fn read_matrix_market(path: &Path) -> Result<MtxMatrix, HarnessError> {
    let text = fs::read_to_string(path).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_matrix_market(&text, &path.display().to_string())
}

/// All `.mtx` files directly inside `dir`, sorted by file name.
pub fn list_mtx_files(dir: &Path) -> Result<Vec<PathBuf>, HarnessError> {
    let rd = fs::read_dir(dir).map_err(|source| HarnessError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut files: Vec<PathBuf> = rd
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().and_then(|e| e.to_str()) == Some("mtx"))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(HarnessError::usage(format!(
            "no .mtx files in {}",
            dir.display()
        )));
    }
    Ok(files)
}

/// A set of Matrix Market files verified to share one sparsity pattern,
/// ready to assemble into batches of any size.
#[derive(Debug, Clone)]
pub struct MtxBatchSet {
    num_rows: usize,
    num_cols: usize,
    row_ptrs: Vec<usize>,
    col_idxs: Vec<usize>,
    /// One value plane per file, aligned to the shared pattern.
    planes: Vec<Vec<f64>>,
    files: Vec<PathBuf>,
}

impl MtxBatchSet {
    /// Parse every file and verify the shared pattern. The first file is
    /// the reference; the first differing position of any other file is
    /// named in the error.
    pub fn load(paths: &[PathBuf]) -> Result<Self, HarnessError> {
        if paths.is_empty() {
            return Err(HarnessError::usage(
                "matrix market batch needs at least one file",
            ));
        }
        let reference = read_matrix_market(&paths[0])?;
        let mut planes = Vec::with_capacity(paths.len());
        planes.push(reference.entries.iter().map(|&(_, _, v)| v).collect());
        for path in &paths[1..] {
            let m = read_matrix_market(path)?;
            let mismatch = |detail: String| HarnessError::PatternMismatch {
                path: path.clone(),
                reference: paths[0].clone(),
                detail,
            };
            if (m.num_rows, m.num_cols) != (reference.num_rows, reference.num_cols) {
                return Err(mismatch(format!(
                    "dimensions {} x {} vs {} x {}",
                    m.num_rows, m.num_cols, reference.num_rows, reference.num_cols
                )));
            }
            if m.entries.len() != reference.entries.len() {
                return Err(mismatch(format!(
                    "stored nnz {} vs {}",
                    m.entries.len(),
                    reference.entries.len()
                )));
            }
            for (i, (a, b)) in m.entries.iter().zip(&reference.entries).enumerate() {
                if (a.0, a.1) != (b.0, b.1) {
                    return Err(mismatch(format!(
                        "position {i}: row {}, col {} vs row {}, col {} (1-based)",
                        a.0 + 1,
                        a.1 + 1,
                        b.0 + 1,
                        b.1 + 1
                    )));
                }
            }
            planes.push(m.entries.iter().map(|&(_, _, v)| v).collect());
        }

        let mut row_ptrs = vec![0usize; reference.num_rows + 1];
        for &(r, _, _) in &reference.entries {
            row_ptrs[r + 1] += 1;
        }
        for i in 0..reference.num_rows {
            row_ptrs[i + 1] += row_ptrs[i];
        }
        let col_idxs = reference.entries.iter().map(|&(_, c, _)| c).collect();

        Ok(MtxBatchSet {
            num_rows: reference.num_rows,
            num_cols: reference.num_cols,
            row_ptrs,
            col_idxs,
            planes,
            files: paths.to_vec(),
        })
    }

    pub fn file_count(&self) -> usize {
        self.planes.len()
    }

    pub fn num_rows(&self) -> usize {
        self.num_rows
    }

    pub fn num_cols(&self) -> usize {
        self.num_cols
    }

    pub fn nnz(&self) -> usize {
        self.col_idxs.len()
    }

    pub fn files(&self) -> &[PathBuf] {
        &self.files
    }

    /// Batch of `replicate * file_count()` entries: the file sequence
    /// repeated `replicate` times.
    pub fn replicate(&self, replicate: usize) -> Result<BatchCsr, HarnessError> {
        if replicate == 0 {
            return Err(HarnessError::usage("replicate must be at least 1"));
        }
        self.assemble(replicate * self.file_count())
    }

    /// Batch of exactly `total` entries; entry `e` takes file `e mod
    /// file_count()`, cycling through the set.
    pub fn filled(&self, total: usize) -> Result<BatchCsr, HarnessError> {
        if total == 0 {
            return Err(HarnessError::usage("batch size must be at least 1"));
        }
        self.assemble(total)
    }

    fn assemble(&self, num_systems: usize) -> Result<BatchCsr, HarnessError> {
        let nnz = self.nnz();
        let mut values = Vec::with_capacity(num_systems * nnz);
        for e in 0..num_systems {
            values.extend_from_slice(&self.planes[e % self.file_count()]);
        }
        BatchCsr::new(
            num_systems,
            self.num_rows,
            self.num_cols,
            self.row_ptrs.clone(),
            self.col_idxs.clone(),
            values,
        )
        .map_err(|source| HarnessError::Solve {
            case: format!("assembling batch from {}", self.files[0].display()),
            source,
        })
    }
}

/// Load a directory's files into a batch of `replicate * file_count` entries.
pub fn load_matrix_market_batch(
    paths: &[PathBuf],
    replicate: usize,
) -> Result<BatchCsr, HarnessError> {
    MtxBatchSet::load(paths)?.replicate(replicate)
}

/// Load a directory's files into a batch of exactly `total` entries,
/// cycling through the files.
pub fn load_matrix_market_filled(
    paths: &[PathBuf],
    total: usize,
) -> Result<BatchCsr, HarnessError> {
    MtxBatchSet::load(paths)?.filled(total)
}

/// Serialize one batch entry as `matrix coordinate real general` text.
/// Values print with 17 significant digits, so a read-back is bitwise equal.
pub fn format_matrix_market(m: &BatchCsr, entry: usize) -> String {
    let mut out = String::new();
    out.push_str("%%MatrixMarket matrix coordinate real general\n");
    let _ = writeln!(out, "{} {} {}", m.num_rows(), m.num_cols(), m.nnz());
    let values = m.values_entry(entry);
    for r in 0..m.num_rows() {
        let span = m.row_ptrs()[r]..m.row_ptrs()[r + 1];
        for (&c, &v) in m.col_idxs()[span.clone()].iter().zip(&values[span]) {
            let _ = writeln!(out, "{} {} {:.16e}", r + 1, c + 1, v);
        }
    }
    out
}

/// Write one batch entry to `path` in Matrix Market form.
pub fn write_matrix_market(path: &Path, m: &BatchCsr, entry: usize) -> Result<(), HarnessError> {
    fs::write(path, format_matrix_market(m, entry)).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Write every entry of `m` into `dir` as `entry_00000.mtx`,
/// `entry_00001.mtx`, ... and return the paths in entry order.
pub fn write_matrix_market_batch(dir: &Path, m: &BatchCsr) -> Result<Vec<PathBuf>, HarnessError> {
    fs::create_dir_all(dir).map_err(|source| HarnessError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut paths = Vec::with_capacity(m.num_systems());
    for k in 0..m.num_systems() {
        let path = dir.join(format!("entry_{k:05}.mtx"));
        write_matrix_market(&path, m, k)?;
        paths.push(path);
    }
    Ok(paths)
}
