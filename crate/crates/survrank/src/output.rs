//! Output payloads and all-or-nothing writing.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use survrank_core::baselines::ComparisonTable;
use survrank_core::bootstrap::{BootstrapSummary, RunFailure};
use survrank_core::model::EpochRecord;
use survrank_core::stats::KmCurve;

use crate::error::{CliError, CliResult};

/// Collects outputs in a hidden directory next to their destination and moves them into
/// place only on `commit`. Dropping an uncommitted staging area deletes it.
pub struct Staging {
    dir: PathBuf,
    tmp: PathBuf,
    files: Vec<String>,
    committed: bool,
}

impl Staging {
    pub fn new(dir: &Path) -> CliResult<Self> {
        fs::create_dir_all(dir).map_err(|e| CliError::write(dir, e))?;
        let tmp = dir.join(format!(".survrank-staging-{}", std::process::id()));
        if tmp.exists() {
            fs::remove_dir_all(&tmp).map_err(|e| CliError::write(&tmp, e))?;
        }
        fs::create_dir(&tmp).map_err(|e| CliError::write(&tmp, e))?;
        Ok(Self { dir: dir.to_path_buf(), tmp, files: Vec::new(), committed: false })
    }

    pub fn write(&mut self, name: &str, contents: impl AsRef<[u8]>) -> CliResult<()> {
        let path = self.tmp.join(name);
        fs::write(&path, contents).map_err(|e| CliError::write(&path, e))?;
        self.files.push(name.to_string());
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> CliResult<()> {
        self.write(name, to_json(value))
    }

    /// Moves every staged file into the output directory and returns their final paths.
    pub fn commit(mut self) -> CliResult<Vec<PathBuf>> {
        let mut out = Vec::with_capacity(self.files.len());
        for name in &self.files {
            let (from, to) = (self.tmp.join(name), self.dir.join(name));
            fs::rename(&from, &to).map_err(|e| CliError::write(&to, e))?;
            out.push(to);
        }
        self.committed = true;
        let _ = fs::remove_dir_all(&self.tmp);
        Ok(out)
    }
}

impl Drop for Staging {
    fn drop(&mut self) {
        if !self.committed {
            let _ = fs::remove_dir_all(&self.tmp);
        }
    }
}

/// Writes `contents` to `path` through a sibling temporary file and a rename.
pub fn write_atomic(path: &Path, contents: impl AsRef<[u8]>) -> CliResult<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, contents).map_err(|e| CliError::write(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| CliError::write(path, e))
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("outputs serialize to JSON");
    s.push('\n');
    s
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// One row per step plus a leading `t = 0` row at `S = 1`.
pub fn km_csv(curve: &KmCurve) -> String {
    let mut s = String::from("time,at_risk,events,survival,ci_lower,ci_upper\n");
    let _ = writeln!(s, "0,{},0,1,1,1", curve.n);
    for k in 0..curve.event_times.len() {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            curve.event_times[k],
            curve.at_risk[k],
            curve.events[k],
            curve.survival[k],
            curve.ci_lower[k],
            curve.ci_upper[k]
        );
    }
    s
}

pub fn failure_label(f: &RunFailure) -> &'static str {
    match f {
        RunFailure::Fit(_) => "fit",
        RunFailure::ZeroNormWeights => "zero_norm_weights",
        RunFailure::EmptyStratum => "empty_stratum",
        RunFailure::DegenerateLogRank => "degenerate_logrank",
        RunFailure::NoValidationPairs => "no_validation_pairs",
    }
}

/// Per-run p-values and concordance.
pub fn runs_csv(summary: &BootstrapSummary) -> String {
    let mut s = String::from("run,seed,p_value,c_index,baseline_c,high_risk,low_risk,failure\n");
    for r in &summary.runs {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{}",
            r.index,
            r.seed,
            opt(r.p_value),
            opt(r.c_index),
            opt(r.baseline_c),
            r.high_risk,
            r.low_risk,
            r.failure.as_ref().map(failure_label).unwrap_or("")
        );
    }
    s
}

/// L1-normalized weight samples, one row per (covariate, successful run).
pub fn weights_csv(summary: &BootstrapSummary) -> String {
    let mut s = String::from("covariate,run,normalized_weight\n");
    for (k, name) in summary.covariates.iter().enumerate() {
        for (row, &run) in summary.aggregated.normalized.iter().zip(&summary.weight_runs) {
            let _ = writeln!(s, "{name},{run},{}", row[k]);
        }
    }
    s
}

pub fn comparison_csv(table: &ComparisonTable) -> String {
    let mut s = String::from("method,combined_p,c_mean,c_std,failed_runs\n");
    for r in &table.rows {
        let _ = writeln!(s, "{},{},{},{},{}", r.method, r.combined_p, r.c_mean, r.c_std, r.failed_runs);
    }
    s
}

pub fn history_csv(history: &[EpochRecord]) -> String {
    let mut s = String::from("epoch,objective,best_objective\n");
    for h in history {
        let _ = writeln!(s, "{},{},{}", h.epoch, h.objective, h.best_objective);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use survrank_core::stats::km_estimate;

    #[test]
    fn km_payload_starts_at_one() {
        let km = km_estimate(&[1.0, 2.0, 3.0], &[true, true, true]).unwrap();
        let csv = km_csv(&km);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "time,at_risk,events,survival,ci_lower,ci_upper");
        assert_eq!(lines[1], "0,3,0,1,1,1");
        assert_eq!(lines.len(), 5);
        assert!(lines[4].starts_with("3,1,1,0,"));
    }

    #[test]
    fn staging_is_all_or_nothing() {
        let dir = tempfile::tempdir().unwrap();
        {
            let mut st = Staging::new(dir.path()).unwrap();
            st.write("a.txt", "x").unwrap();
        }
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0);
        let mut st = Staging::new(dir.path()).unwrap();
        st.write("a.txt", "x").unwrap();
        let paths = st.commit().unwrap();
        assert_eq!(paths, vec![dir.path().join("a.txt")]);
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
