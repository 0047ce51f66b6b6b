//! Output header recording the tool version, an input hash and the seed.

use sha2::{Digest, Sha256};

/// Accumulates every input that determines a command's output.
pub struct Provenance {
    hasher: Sha256,
    seed: Option<u64>,
}

impl Provenance {
    pub fn new(command: &str) -> Self {
        let mut p = Provenance {
            hasher: Sha256::new(),
            seed: None,
        };
        p.add("command", command.as_bytes());
        p
    }

    /// Adds a labelled, length-prefixed part so distinct inputs never collide.
    pub fn add(&mut self, label: &str, bytes: &[u8]) {
        for part in [label.as_bytes(), bytes] {
            self.hasher.update((part.len() as u64).to_le_bytes());
            self.hasher.update(part);
        }
    }

    pub fn param(&mut self, label: &str, value: impl std::fmt::Display) {
        self.add(label, value.to_string().as_bytes());
    }

    pub fn set_seed(&mut self, seed: u64) {
        self.seed = Some(seed);
    }

    /// Header comment line, without the leading `# `.
    pub fn header(&self) -> String {
        let digest = hex::encode(self.hasher.clone().finalize());
        let seed = self
            .seed
            .map_or_else(|| "none".to_string(), |s| s.to_string());
        format!(
            "peakspread {} config_sha256={digest} seed={seed}",
            env!("CARGO_PKG_VERSION")
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_depends_on_every_input() {
        let mut a = Provenance::new("simulate");
        a.add("config", b"{}");
        let mut b = Provenance::new("simulate");
        b.add("config", b"{ }");
        assert_ne!(a.header(), b.header());
        let mut c = Provenance::new("simulate");
        c.add("config", b"{}");
        assert_eq!(a.header(), c.header());
        c.set_seed(7);
        assert!(c.header().ends_with(" seed=7"));
        assert!(a.header().ends_with(" seed=none"));
    }

    #[test]
    fn parts_are_delimited() {
        let mut a = Provenance::new("x");
        a.add("ab", b"c");
        let mut b = Provenance::new("x");
        b.add("a", b"bc");
        assert_ne!(a.header(), b.header());
    }
}
