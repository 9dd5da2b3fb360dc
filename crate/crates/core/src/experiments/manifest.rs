//! Run manifests: a JSON record of what a run was and what it produced,
//! strong enough to replay the run and prove the outputs identical.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

use super::config_file::config_from_map;
use super::io_at;

/// Everything needed to audit or reproduce a run: the config echo, the
/// derived seeds in record order, and SHA-256 digests of every output
/// file. `wall_clock_seconds` is informational and excluded from all
/// comparisons.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub version: String,
    pub config: BTreeMap<String, String>,
    pub records: usize,
    pub seeds: Vec<u64>,
    pub seed_collisions: usize,
    pub wall_clock_seconds: f64,
    pub outputs: BTreeMap<String, String>,
    pub notes: Vec<String>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    let mut hex = String::with_capacity(64);
    for byte in digest {
        hex.push_str(&format!("{byte:02x}"));
    }
    hex
}

impl RunManifest {
    pub fn write(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(path, text).map_err(|e| io_at(path, e))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| io_at(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }

    /// Recomputes the digest of each recorded output in `dir`.
    pub fn check_outputs(&self, dir: &Path) -> Result<Vec<(String, bool)>> {
        let mut results = Vec::with_capacity(self.outputs.len());
        for (name, recorded) in &self.outputs {
            let path = dir.join(name);
            let bytes = std::fs::read(&path).map_err(|e| io_at(&path, e))?;
            results.push((name.clone(), sha256_hex(&bytes) == *recorded));
        }
        Ok(results)
    }
}

/// Replays the run described by a manifest into `work_dir` and compares
/// output digests. Returns the fresh manifest on success; a digest
/// mismatch is an [`Error::ManifestMismatch`] naming the differing files.
pub fn replay(manifest_path: &Path, work_dir: &Path) -> Result<RunManifest> {
    let original = RunManifest::read(manifest_path)?;
    let mut config = config_from_map(&original.config)?;
    config.output_dir = work_dir.to_path_buf();
    let (_, fresh) = super::run(&config)?;
    let mut differing: Vec<String> = Vec::new();
    for (name, recorded) in &original.outputs {
        match fresh.outputs.get(name) {
            Some(digest) if digest == recorded => {}
            Some(_) => differing.push(format!("{name} (digest changed)")),
            None => differing.push(format!("{name} (not produced)")),
        }
    }
    for name in fresh.outputs.keys() {
        if !original.outputs.contains_key(name) {
            differing.push(format!("{name} (unexpected output)"));
        }
    }
    if differing.is_empty() {
        Ok(fresh)
    } else {
        Err(Error::ManifestMismatch(differing.join(", ")))
    }
}

#[cfg(test)]
mod tests {
    use super::super::{run, ExperimentConfig, ExperimentKind};
    use super::*;
    use crate::ensemble::EntryLaw;

    #[test]
    fn sha256_known_vectors() {
        assert_eq!(
            sha256_hex(b""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    fn small_run(dir: &Path) -> (ExperimentConfig, RunManifest) {
        let mut config = ExperimentConfig::new(
            ExperimentKind::KolmogorovCurve,
            EntryLaw::Gaussian,
            vec![8, 12],
            2,
            5,
        );
        config.output_dir = dir.to_path_buf();
        let (_, manifest) = run(&config).unwrap();
        (config, manifest)
    }

    #[test]
    fn manifest_round_trips_through_json() {
        let dir = tempfile::tempdir().unwrap();
        let (_, manifest) = small_run(dir.path());
        let loaded = RunManifest::read(&dir.path().join("manifest.json")).unwrap();
        assert_eq!(loaded.outputs, manifest.outputs);
        assert_eq!(loaded.seeds, manifest.seeds);
        assert_eq!(loaded.config, manifest.config);
        assert_eq!(loaded.records, 4);
        assert_eq!(loaded.seed_collisions, 0);
    }

    #[test]
    fn check_outputs_detects_tampering() {
        let dir = tempfile::tempdir().unwrap();
        let (_, manifest) = small_run(dir.path());
        let all_good = manifest.check_outputs(dir.path()).unwrap();
        assert!(all_good.iter().all(|(_, ok)| *ok));

        let csv = dir.path().join("records.csv");
        let mut text = std::fs::read_to_string(&csv).unwrap();
        text.push_str("tampered\n");
        std::fs::write(&csv, text).unwrap();
        let checked = manifest.check_outputs(dir.path()).unwrap();
        assert!(checked.iter().any(|(name, ok)| name == "records.csv" && !ok));
    }

    #[test]
    fn replay_reproduces_digests() {
        let dir = tempfile::tempdir().unwrap();
        let (_, original) = small_run(dir.path());
        let replay_dir = tempfile::tempdir().unwrap();
        let fresh = replay(&dir.path().join("manifest.json"), replay_dir.path()).unwrap();
        assert_eq!(fresh.outputs, original.outputs);

        // A corrupted recorded digest must be flagged.
        let mut tampered = RunManifest::read(&dir.path().join("manifest.json")).unwrap();
        tampered.outputs.insert("records.csv".into(), "0".repeat(64));
        let bad_path = dir.path().join("tampered.json");
        tampered.write(&bad_path).unwrap();
        let err = replay(&bad_path, replay_dir.path()).unwrap_err();
        assert!(matches!(err, Error::ManifestMismatch(_)), "{err}");
    }
}
