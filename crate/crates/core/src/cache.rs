//! On-disk cache of computed homology tables, keyed by a hash of the inputs and
//! the program version. Entries from other versions or with a mismatched
//! header are ignored.

use std::fs;
use std::path::PathBuf;

use sha2::{Digest, Sha256};

pub const ENV: &str = "MODGRAPH_CACHE_DIR";

pub struct Cache {
    dir: Option<PathBuf>,
}

impl Cache {
    pub fn from_env(disabled: bool) -> Cache {
        let dir = if disabled { None } else { std::env::var_os(ENV).map(PathBuf::from) };
        Cache { dir }
    }

    pub fn key(parts: &[&str]) -> String {
        let mut h = Sha256::new();
        h.update(env!("CARGO_PKG_VERSION"));
        for p in parts {
            h.update([0u8]);
            h.update(p);
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }

    fn header(key: &str) -> String {
        format!("# modgraph {} {key}\n", env!("CARGO_PKG_VERSION"))
    }

    pub fn get(&self, key: &str, ext: &str) -> Option<String> {
        let path = self.dir.as_ref()?.join(format!("{key}.{ext}"));
        let s = fs::read_to_string(path).ok()?;
        s.strip_prefix(&Self::header(key)).map(str::to_string)
    }

    /// Best effort: a failed write only costs a recomputation later.
    pub fn put(&self, key: &str, ext: &str, body: &str) {
        let Some(dir) = &self.dir else { return };
        if fs::create_dir_all(dir).is_err() {
            return;
        }
        let tmp = dir.join(format!("{key}.{ext}.tmp"));
        if fs::write(&tmp, format!("{}{body}", Self::header(key))).is_ok() {
            let _ = fs::rename(&tmp, dir.join(format!("{key}.{ext}")));
        }
    }

    pub fn enabled(&self) -> bool {
        self.dir.is_some()
    }
}
