//! Atomic file output and profile tables.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use ergolab::grid::{discrete_G_with, Discretization, GridField, Scheme};
use ergolab::model::Forcing;
use ergolab::{Result as CoreResult, Validated};

/// Writes `contents` to `dir/name` through a temporary file and a rename.
pub fn write_atomic(dir: &Path, name: &str, contents: &str) -> std::io::Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let target = dir.join(name);
    let tmp = dir.join(format!(".{name}.tmp"));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
    }
    fs::rename(&tmp, &target)?;
    Ok(target)
}

/// `x,d,u,grad_u,residual` with 17 significant digits.
pub fn profile_csv(p: &Validated, fld: &GridField<f64>, f: &Forcing<f64>, scheme: Scheme) -> CoreResult<String> {
    let residual = discrete_G_with(p, fld, f, scheme)?;
    let zeros = vec![0.0; fld.grid.n];
    let grad = Discretization::new(p, &fld.grid, zeros, scheme).gradient(&fld.values);
    let mut out = String::from("x,d,u,grad_u,residual\n");
    for i in 0..fld.grid.n {
        let _ = writeln!(
            out,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            fld.grid.nodes[i], fld.grid.d_values[i], fld.values[i], grad[i], residual[i]
        );
    }
    Ok(out)
}

/// Two-column table with a header.
pub fn table_csv(header: &str, rows: &[(f64, f64)]) -> String {
    let mut out = format!("{header}\n");
    for (a, b) in rows {
        let _ = writeln!(out, "{a:.16e},{b:.16e}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atomic_write_leaves_no_temp_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_atomic(dir.path(), "a.txt", "one").unwrap();
        write_atomic(dir.path(), "a.txt", "two").unwrap();
        assert_eq!(fs::read_to_string(path).unwrap(), "two");
        let names: Vec<_> = fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
        assert_eq!(names.len(), 1);
    }

    #[test]
    fn table_rows_parse_back_exactly() {
        let v = 1.0 / 3.0;
        let t = table_csv("a,b", &[(v, -v)]);
        let row = t.lines().nth(1).unwrap();
        let parsed: Vec<f64> = row.split(',').map(|s| s.parse().unwrap()).collect();
        assert_eq!(parsed, vec![v, -v]);
    }
}
