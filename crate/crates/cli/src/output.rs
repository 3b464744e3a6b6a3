use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

/// Where command output goes: named files under a directory, or stdout.
pub struct Sink {
    dir: Option<PathBuf>,
}

impl Sink {
    pub fn new(dir: Option<PathBuf>) -> io::Result<Self> {
        if let Some(d) = &dir {
            fs::create_dir_all(d)?;
        }
        Ok(Self { dir })
    }

    pub fn has_dir(&self) -> bool {
        self.dir.is_some()
    }

    /// Writes `name` under the output directory, or prints the contents.
    pub fn emit(&self, name: &str, contents: &str) -> io::Result<()> {
        match &self.dir {
            Some(d) => {
                let path = d.join(name);
                fs::write(&path, contents)?;
                eprintln!("wrote {}", path.display());
                Ok(())
            }
            None => {
                let mut out = io::stdout().lock();
                out.write_all(contents.as_bytes())?;
                if !contents.ends_with('\n') {
                    out.write_all(b"\n")?;
                }
                Ok(())
            }
        }
    }
}
