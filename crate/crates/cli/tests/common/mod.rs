#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use fuzzyrank_core::engine::{Engine, EngineConfig};
use fuzzyrank_core::eval::planted_corpus;
use fuzzyrank_core::index::Index;

pub fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_fuzzyrank"));
    c.env_remove("FUZZYRANK_CONFIG").env("SOURCE_DATE_EPOCH", "1700000000");
    c
}

pub fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

pub fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

pub fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// The planted corpus written to `dir/corpus`.
pub fn write_corpus(dir: &Path) -> PathBuf {
    let corpus = dir.join("corpus");
    planted_corpus(42).write_to(&corpus).unwrap();
    corpus
}

/// Planted corpus indexed in memory under the default configuration.
pub fn planted_index() -> (Engine, Index) {
    let engine = Engine::new(EngineConfig::default()).unwrap();
    let corpus = planted_corpus(42).corpus(&engine).unwrap();
    let index = engine.build_index(&corpus, Some(0)).unwrap();
    (engine, index)
}

pub fn assert_schema(schema_file: &str, instance: &serde_json::Value) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("schema").join(schema_file);
    let schema: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    let compiled = jsonschema::JSONSchema::compile(&schema).expect("schema compiles");
    let msgs: Vec<String> = match compiled.validate(instance) {
        Ok(()) => Vec::new(),
        Err(errors) => errors.map(|e| format!("{} at {}", e, e.instance_path)).collect(),
    };
    assert!(msgs.is_empty(), "{schema_file} validation failed: {}", msgs.join("; "));
}
