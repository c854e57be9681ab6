use std::path::Path;

use shearkit::config::*;
use shearkit::CliError;

fn write(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn defaults_serialize_and_parse_back() {
    let c = Config::default();
    assert_eq!(Config::from_json(&c.to_json()).unwrap(), c);
    assert_eq!(Config::from_json("{}").unwrap(), c);
    assert_eq!(c.generator.band, [0.5, 0.75, 1.5, 2.0]);
    assert_eq!((c.params.octaves, c.params.per_octave, c.params.s_max, c.params.ds), (4, 16, 3.0, 0.0625));
}

#[test]
fn partial_documents_keep_other_defaults() {
    let c = Config::from_json(r#"{ "params": { "ds": 0.125 }, "seed": 9 }"#).unwrap();
    assert_eq!(c.params.ds, 0.125);
    assert_eq!(c.params.per_octave, 16);
    assert_eq!(c.seed, 9);
}

#[test]
fn invalid_documents_are_refused() {
    for bad in [
        r#"{ "tolerances": { "guard_tol": 0 } }"#,
        r#"{ "tolerances": { "reconstruction": -1e-3 } }"#,
        r#"{ "params": { "octaves": 0 } }"#,
        r#"{ "params": { "ds": 0 } }"#,
        r#"{ "grid": { "n1": 4 } }"#,
        r#"{ "unknown_field": 1 }"#,
        r#"{ "generator": { "profile": "mexican_hat" } }"#,
        "not json",
    ] {
        assert!(matches!(Config::from_json(bad), Err(CliError::ConfigInvalid(_))), "{bad}");
    }
}

#[test]
fn precedence_is_defaults_env_file_flags() {
    let dir = tempfile::tempdir().unwrap();
    let env = write(dir.path(), "env.json", r#"{ "seed": 1, "threads": 3, "params": { "s_max": 2.0 } }"#);
    let file = write(dir.path(), "file.json", r#"{ "seed": 2 }"#);
    let none = Overrides::default();

    assert_eq!(Config::resolve(None, None, &none).unwrap(), Config::default());
    let c = Config::resolve(None, Some(&env), &none).unwrap();
    assert_eq!((c.seed, c.threads, c.params.s_max), (1, 3, 2.0));
    // an explicit file replaces the environment fallback entirely
    let c = Config::resolve(Some(&file), Some(&env), &none).unwrap();
    assert_eq!((c.seed, c.threads, c.params.s_max), (2, 0, 3.0));
    let c = Config::resolve(Some(&file), Some(&env), &Overrides { seed: Some(7), threads: Some(1) }).unwrap();
    assert_eq!((c.seed, c.threads), (7, 1));
    assert!(matches!(Config::resolve(Some(&dir.path().join("nope.json")), None, &none), Err(CliError::Io { .. })));
}

#[test]
fn generators_from_config() {
    let c = Config::from_json(r#"{ "generator": { "band": [0.5, 0.4, 1.5, 2.0] } }"#).unwrap();
    assert!(matches!(c.generator(), Err(CliError::Core(shearkit_core::ShearError::BadBandEdges(_)))));
    let c = Config::from_json(r#"{ "generator": { "profile": "gaussian_control" } }"#).unwrap();
    assert!(!c.generator().unwrap().is_lizorkin());
}
