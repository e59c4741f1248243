//! CSV and summary writers. Numbers carry 15 significant digits.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use fidecay::experiment::{DecaySeries, Spectrum};

pub fn num(x: f64) -> String {
    format!("{x:.14e}")
}

pub fn decay_csv(series: &DecaySeries, digest: &str) -> String {
    let mut s = format!("# config sha256 {digest}\nn,F,c1,c12,c13,c123,sum_abs,purity\n");
    for x in &series.samples {
        let c = x.components;
        s.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            x.n,
            num(x.fidelity),
            num(c[0]),
            num(c[1]),
            num(c[2]),
            num(c[3]),
            num(x.sum_abs),
            num(x.purity)
        ));
    }
    s
}

pub fn spectrum_csv(sp: &Spectrum, digest: &str) -> String {
    let mut s = format!("# config sha256 {digest}\nbin_freq,magnitude\n");
    for (f, m) in sp.frequencies.iter().zip(&sp.magnitudes) {
        s.push_str(&format!("{},{}\n", num(*f), num(*m)));
    }
    s
}

/// Writes files into one directory and deletes them again unless committed.
pub struct OutputSet {
    dir: PathBuf,
    created_dir: bool,
    written: Vec<PathBuf>,
    committed: bool,
}

impl OutputSet {
    pub fn create(dir: &Path) -> io::Result<Self> {
        let created_dir = !dir.exists();
        fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            created_dir,
            written: Vec::new(),
            committed: false,
        })
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<PathBuf, (PathBuf, io::Error)> {
        let path = self.dir.join(name);
        fs::write(&path, contents).map_err(|e| (path.clone(), e))?;
        self.written.push(path.clone());
        Ok(path)
    }

    pub fn commit(mut self) -> Vec<PathBuf> {
        self.committed = true;
        std::mem::take(&mut self.written)
    }
}

impl Drop for OutputSet {
    fn drop(&mut self) {
        if self.committed {
            return;
        }
        for p in &self.written {
            let _ = fs::remove_file(p);
        }
        if self.created_dir {
            let _ = fs::remove_dir(&self.dir);
        }
    }
}
