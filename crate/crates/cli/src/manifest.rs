//! `key=value` run manifests written beside every output file.

use std::fmt::{Display, Write as _};
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::Context;

pub struct Manifest {
    started: Instant,
    lines: String,
}

impl Manifest {
    pub fn new(subcommand: &str, argv: &[String]) -> Self {
        let mut m = Manifest {
            started: Instant::now(),
            lines: String::new(),
        };
        m.set("subcommand", subcommand);
        m.set("version", env!("CARGO_PKG_VERSION"));
        let quoted: Vec<String> = argv.iter().map(|a| format!("{a:?}")).collect();
        m.set("argv", quoted.join(" "));
        m
    }

    pub fn set(&mut self, key: &str, value: impl Display) {
        writeln!(self.lines, "{key}={value}").unwrap();
    }

    pub fn set_path(&mut self, key: &str, path: &Path) {
        self.set(key, path.display());
    }

    /// Path of the manifest that accompanies `out`.
    pub fn path_for(out: &Path) -> PathBuf {
        let mut name = out.as_os_str().to_owned();
        name.push(".manifest");
        PathBuf::from(name)
    }

    pub fn write_beside(mut self, out: &Path) -> anyhow::Result<()> {
        let elapsed = self.started.elapsed().as_secs_f64();
        self.set("duration_seconds", format!("{elapsed:.6}"));
        let path = Self::path_for(out);
        fs::write(&path, self.lines).with_context(|| format!("writing {}", path.display()))
    }
}
