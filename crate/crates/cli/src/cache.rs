//! Window provider backed by an optional on-disk cache directory.

use std::collections::HashMap;
use std::fs;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use coarse_ends::{Error, GeneratorSet, GroupSpec, Result, Window, WindowProvider};

pub const CACHE_ENV: &str = "COARSE_ENDS_CACHE";

/// `--cache-dir` first, then `COARSE_ENDS_CACHE`, otherwise no disk cache.
pub fn resolve_dir(flag: Option<PathBuf>) -> Option<PathBuf> {
    flag.or_else(|| std::env::var_os(CACHE_ENV).filter(|v| !v.is_empty()).map(PathBuf::from))
}

pub struct CachedWindows {
    dir: Option<PathBuf>,
    cap: usize,
    memo: Mutex<HashMap<(String, u32, u32), Arc<Window>>>,
}

impl CachedWindows {
    pub fn new(dir: Option<PathBuf>, cap: usize) -> Self {
        CachedWindows {
            dir,
            cap,
            memo: Mutex::new(HashMap::new()),
        }
    }

    fn file_name(spec: &GroupSpec, power: u32, radius: u32) -> String {
        let mut key = String::new();
        for c in spec.to_string().chars() {
            match c {
                '(' => key.push('L'),
                ')' => key.push('R'),
                '*' => key.push_str("fp"),
                '^' => key.push('p'),
                ' ' => {}
                c if c.is_ascii_alphanumeric() => key.push(c),
                _ => key.push('_'),
            }
        }
        format!("{key}-t{power}-R{radius}.window")
    }

    fn load(path: &Path, spec: &GroupSpec, generators: &GeneratorSet, radius: u32) -> Option<Window> {
        let file = fs::File::open(path).ok()?;
        Window::read_text(BufReader::new(file), spec, generators, radius).ok()
    }

    fn store(dir: &Path, path: &Path, window: &Window) -> Result<()> {
        let io = |e: std::io::Error| Error::Cache(format!("{}: {e}", path.display()));
        fs::create_dir_all(dir).map_err(io)?;
        let tmp = path.with_extension(format!("tmp{}", std::process::id()));
        let mut out = BufWriter::new(fs::File::create(&tmp).map_err(io)?);
        window.write_text(&mut out).map_err(io)?;
        out.flush().map_err(io)?;
        drop(out);
        fs::rename(&tmp, path).map_err(io)
    }
}

impl WindowProvider for CachedWindows {
    fn window(&self, spec: &GroupSpec, generators: &GeneratorSet, radius: u32) -> Result<Arc<Window>> {
        let key = (spec.to_string(), generators.power(), radius);
        if let Some(w) = self.memo.lock().unwrap().get(&key) {
            return Ok(w.clone());
        }
        let window = match &self.dir {
            Some(dir) => {
                let path = dir.join(Self::file_name(spec, generators.power(), radius));
                match Self::load(&path, spec, generators, radius) {
                    Some(w) => w,
                    None => {
                        // Missing, stale or corrupt: rebuild and overwrite.
                        let w = Window::build_with_cap(spec, generators, radius, self.cap)?;
                        Self::store(dir, &path, &w)?;
                        w
                    }
                }
            }
            None => Window::build_with_cap(spec, generators, radius, self.cap)?,
        };
        let window = Arc::new(window);
        self.memo.lock().unwrap().insert(key, window.clone());
        Ok(window)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use coarse_ends::{parse_spec, standard_generators};

    #[test]
    fn file_names_are_distinct_per_spec() {
        let a = parse_spec("(Z x C2)").unwrap();
        let b = parse_spec("(Z * C2)").unwrap();
        assert_eq!(CachedWindows::file_name(&a, 1, 8), "LZxC2R-t1-R8.window");
        assert_ne!(CachedWindows::file_name(&a, 1, 8), CachedWindows::file_name(&b, 1, 8));
    }

    #[test]
    fn stale_files_are_rebuilt() {
        let dir = tempfile::tempdir().unwrap();
        let spec = parse_spec("F2").unwrap();
        let k = standard_generators(&spec);
        let path = dir.path().join(CachedWindows::file_name(&spec, 1, 3));
        fs::write(&path, "coarse-ends-window 1\nspec Z\n").unwrap();
        let w = CachedWindows::new(Some(dir.path().into()), 1000)
            .window(&spec, &k, 3)
            .unwrap();
        assert_eq!(w.len(), 53);
        let again = CachedWindows::load(&path, &spec, &k, 3).unwrap();
        assert_eq!(again.len(), 53);
    }
}
