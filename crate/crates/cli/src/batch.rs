//! Directory batch runner with a fixed worker pool and a JSON-lines manifest.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::io::Format;
use crate::pipeline::Enhancer;

/// One manifest line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestRecord {
    pub input: String,
    pub output: String,
    pub method: String,
    pub ms: u64,
    /// `"ok"` or `"error"`.
    pub status: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl ManifestRecord {
    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }
}

#[derive(Debug, thiserror::Error)]
pub enum BatchError {
    #[error("cannot list input directory {path}: {source}")]
    ReadDir {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot prepare output {path}: {source}")]
    Output {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("output directory must differ from the input directory")]
    SameDirectory,
}

#[derive(Debug)]
pub struct BatchReport {
    /// Records in completion order, as written to the manifest.
    pub records: Vec<ManifestRecord>,
}

impl BatchReport {
    pub fn failures(&self) -> usize {
        self.records.iter().filter(|r| !r.is_ok()).count()
    }
}

/// Image files (by extension) directly inside `dir`, sorted by name.
pub fn list_inputs(dir: &Path) -> Result<Vec<PathBuf>, BatchError> {
    let read_err = |source| BatchError::ReadDir {
        path: dir.into(),
        source,
    };
    let mut files = Vec::new();
    for entry in fs::read_dir(dir).map_err(read_err)? {
        let path = entry.map_err(read_err)?.path();
        if path.is_file() && Format::from_path(&path).is_some() {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

/// Enhances every image in `input_dir` into `output_dir` (same file names)
/// using `jobs` worker threads. A failed file is recorded and skipped; it
/// never stops the batch.
pub fn run_batch(
    enhancer: &Enhancer,
    input_dir: &Path,
    output_dir: &Path,
    manifest_path: &Path,
    jobs: usize,
) -> Result<BatchReport, BatchError> {
    let inputs = list_inputs(input_dir)?;
    fs::create_dir_all(output_dir).map_err(|source| BatchError::Output {
        path: output_dir.into(),
        source,
    })?;
    if fs::canonicalize(input_dir).ok() == fs::canonicalize(output_dir).ok() {
        return Err(BatchError::SameDirectory);
    }
    let manifest = File::create(manifest_path).map_err(|source| BatchError::Output {
        path: manifest_path.into(),
        source,
    })?;

    let sink = Mutex::new((BufWriter::new(manifest), Vec::with_capacity(inputs.len())));
    let next = AtomicUsize::new(0);
    let method = enhancer.expr.to_string();

    std::thread::scope(|scope| {
        for _ in 0..jobs.max(1).min(inputs.len().max(1)) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(input) = inputs.get(i) else { break };
                let output = output_dir.join(input.file_name().expect("listed files have names"));

                let start = Instant::now();
                let result = enhancer.enhance_file(input, &output);
                let ms = start.elapsed().as_millis() as u64;

                let (status, error) = match result {
                    Ok(warnings) => {
                        for w in warnings {
                            eprintln!("warning: {}: {w}", input.display());
                        }
                        ("ok", None)
                    }
                    Err(e) => {
                        eprintln!("error: {}: {e}", input.display());
                        ("error", Some(e.to_string()))
                    }
                };
                let record = ManifestRecord {
                    input: input.display().to_string(),
                    output: output.display().to_string(),
                    method: method.clone(),
                    ms,
                    status: status.to_string(),
                    error,
                };

                let mut guard = sink.lock().expect("manifest lock poisoned");
                let (writer, records) = &mut *guard;
                let line = serde_json::to_string(&record).expect("record serializes");
                if let Err(e) = writeln!(writer, "{line}").and_then(|_| writer.flush()) {
                    eprintln!("error: writing manifest: {e}");
                }
                records.push(record);
            });
        }
    });

    let (_, records) = sink.into_inner().expect("manifest lock poisoned");
    Ok(BatchReport { records })
}

/// Parses a manifest written by [`run_batch`].
pub fn read_manifest(text: &str) -> serde_json::Result<Vec<ManifestRecord>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(serde_json::from_str)
        .collect()
}
