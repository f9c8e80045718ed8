//! Minimal CSV writer. Values never contain commas or quotes, so no
//! escaping is done.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use anyhow::Context;

pub struct CsvOut {
    w: Box<dyn Write>,
}

impl CsvOut {
    pub fn open(path: &Option<PathBuf>) -> anyhow::Result<Self> {
        let w: Box<dyn Write> = match path {
            Some(p) => Box::new(BufWriter::new(
                File::create(p).with_context(|| format!("creating {}", p.display()))?,
            )),
            None => Box::new(BufWriter::new(io::stdout())),
        };
        Ok(Self { w })
    }

    pub fn header<S: AsRef<str>>(&mut self, cols: &[S]) -> anyhow::Result<()> {
        self.row(cols)
    }

    pub fn row<S: AsRef<str>>(&mut self, cells: &[S]) -> anyhow::Result<()> {
        let line: Vec<&str> = cells.iter().map(AsRef::as_ref).collect();
        writeln!(self.w, "{}", line.join(","))?;
        Ok(())
    }

    /// Rust's float formatting is locale independent and round-trips.
    pub fn floats(&mut self, values: &[f64]) -> anyhow::Result<()> {
        let cells: Vec<String> = values.iter().map(f64::to_string).collect();
        self.row(&cells)
    }

    pub fn finish(mut self) -> anyhow::Result<()> {
        self.w.flush()?;
        Ok(())
    }
}
