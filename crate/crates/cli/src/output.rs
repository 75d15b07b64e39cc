//! Output files of one run: CSV/JSON artifacts plus a metadata record.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use chrono::{SecondsFormat, Utc};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::Result;

pub struct Run {
    out_dir: PathBuf,
    command: &'static str,
    config: Value,
    seed: u64,
    threads: usize,
    started_at: String,
    clock: Instant,
    outputs: Vec<String>,
}

impl Run {
    pub fn new(out_dir: &Path, command: &'static str, config: Value, seed: u64, threads: usize) -> Result<Self> {
        fs::create_dir_all(out_dir)?;
        Ok(Run {
            out_dir: out_dir.to_path_buf(),
            command,
            config,
            seed,
            threads,
            started_at: Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true),
            clock: Instant::now(),
            outputs: Vec::new(),
        })
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.out_dir.join(name)
    }

    /// Records a file written by other means.
    pub fn produced(&mut self, path: &Path) {
        self.outputs.push(path.display().to_string());
    }

    pub fn csv<T: Serialize>(&mut self, name: &str, rows: impl IntoIterator<Item = T>) -> Result<()> {
        let path = self.path(name);
        let mut w = csv::Writer::from_path(&path)?;
        for row in rows {
            w.serialize(row)?;
        }
        w.flush()?;
        self.produced(&path);
        Ok(())
    }

    pub fn json<T: Serialize + ?Sized>(&mut self, name: &str, value: &T) -> Result<()> {
        let path = self.path(name);
        let mut w = BufWriter::new(File::create(&path)?);
        serde_json::to_writer_pretty(&mut w, value)?;
        writeln!(w)?;
        w.flush()?;
        self.produced(&path);
        Ok(())
    }

    pub fn jsonl<T: Serialize>(&mut self, name: &str, rows: impl IntoIterator<Item = T>) -> Result<()> {
        let path = self.path(name);
        let mut w = BufWriter::new(File::create(&path)?);
        for row in rows {
            serde_json::to_writer(&mut w, &row)?;
            writeln!(w)?;
        }
        w.flush()?;
        self.produced(&path);
        Ok(())
    }

    /// Writes `<command>.run.json`: configuration, seed, parallelism,
    /// version, timing and the list of outputs.
    pub fn finish(self) -> Result<()> {
        let meta = json!({
            "command": self.command,
            "version": env!("CARGO_PKG_VERSION"),
            "seed": self.seed,
            "threads": self.threads,
            "config": self.config,
            "started_at": self.started_at,
            "wall_time_s": self.clock.elapsed().as_secs_f64(),
            "outputs": self.outputs,
        });
        let path = self.out_dir.join(format!("{}.run.json", self.command));
        let mut w = BufWriter::new(File::create(path)?);
        serde_json::to_writer_pretty(&mut w, &meta)?;
        writeln!(w)?;
        w.flush()?;
        Ok(())
    }
}
