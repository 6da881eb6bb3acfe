use std::path::Path;

use robust_dcd_lab::{
    format_channel, load_config, parse_channel, read_channel, write_channel, ExperimentConfig,
    LabError,
};

const BASE: &str = r#"
name = "base"
runs = 2
horizon = 100

[channel]
kind = "sparse"
taps = 32

[[algorithm]]
name = "A"
kind = "dcd"
lambda = 0.99
strategy = { kind = "mcc", beta_sq = 0.5 }
"#;

fn resolve(text: &str) -> Result<robust_dcd_lab::Experiment, LabError> {
    ExperimentConfig::from_toml(text, Path::new("t.toml"))?.resolve(Path::new("."))
}

fn field_of(text: &str) -> String {
    match resolve(text) {
        Err(LabError::Config { field, .. }) => field,
        other => panic!("expected a config error, got {other:?}"),
    }
}

#[test]
fn base_config_is_valid() {
    let exp = resolve(BASE).unwrap();
    assert_eq!(exp.taps(), 32);
    assert_eq!(exp.config.decimation, 1);
    assert_eq!(exp.config.algorithms[0].group, "nmsd");
}

#[test]
fn errors_carry_field_paths() {
    assert_eq!(field_of(&BASE.replace("runs = 2", "runs = 0")), "runs");
    assert_eq!(
        field_of(&BASE.replace("horizon = 100", "horizon = 100\ndecimation = 101")),
        "decimation"
    );
    assert_eq!(
        field_of(&BASE.replace("lambda = 0.99", "lambda = 1.5")),
        "algorithm[0].lambda"
    );
    assert_eq!(
        field_of(&BASE.replace("beta_sq = 0.5", "beta_sq = -1.0")),
        "algorithm[0].strategy.beta_sq"
    );
    assert_eq!(
        field_of(&format!("{BASE}dcd = {{ h = 3.0 }}\n")),
        "algorithm[0].dcd.h"
    );
    assert_eq!(
        field_of(&format!("{BASE}vff = {{ rho = 3.0, lambda_min = 1.0 }}\n")),
        "algorithm[0].vff.lambda_min"
    );
    assert_eq!(
        field_of(&format!(
            "{BASE}\n[[algorithm]]\nname = \"R\"\nkind = \"rmcc\"\nlambda = 0.9\nbeta_sq = 0.0\n"
        )),
        "algorithm[1].beta_sq"
    );
    assert_eq!(
        field_of(&format!("{BASE}\n[[change]]\ntime = 50\nshift = 32\n")),
        "change[0].shift"
    );
    assert_eq!(
        field_of(&format!("{BASE}\n[[change]]\ntime = 101\nshift = 1\n")),
        "change[0].time"
    );
    assert_eq!(
        field_of(&format!(
            "{BASE}\n[[change]]\ntime = 50\nshift = 1\n[[change]]\ntime = 50\nshift = 2\n"
        )),
        "change[1].time"
    );
    assert_eq!(
        field_of(&BASE.replace("taps = 32", "taps = 0")),
        "channel.taps"
    );
    assert_eq!(
        field_of(&BASE.replace("[channel]", "[input]\nrho = 1.0\n\n[channel]")),
        "input.rho"
    );
    assert_eq!(
        field_of(&format!(
            "{BASE}\n[[algorithm]]\nname = \"A\"\nkind = \"lms\"\nmu = 0.1\n"
        )),
        "algorithm[1].name"
    );
    assert_eq!(
        field_of(&BASE.replace("name = \"A\"", "name = \"A,B\"")),
        "algorithm[0].name"
    );
    assert_eq!(
        field_of(&BASE.replace("kind = \"dcd\"", "group = \"../x\"\nkind = \"dcd\"")),
        "algorithm[0].group"
    );
}

#[test]
fn unknown_keys_and_kinds_are_parse_errors() {
    for text in [
        BASE.replace("runs = 2", "runz = 2"),
        BASE.replace("kind = \"sparse\"", "kind = \"dense\""),
        BASE.replace("kind = \"mcc\"", "kind = \"huber\""),
        BASE.replace("horizon = 100\n", ""),
    ] {
        assert!(
            matches!(resolve(&text), Err(LabError::Parse { .. })),
            "{text}"
        );
    }
}

#[test]
fn channel_round_trips_bit_exactly() {
    let taps = vec![0.1, -1.0 / 3.0, 1e-300, 0.0, 5e7, f64::MIN_POSITIVE];
    let text = format_channel(&taps);
    assert_eq!(text.lines().count(), taps.len());
    assert_eq!(parse_channel(&text, Path::new("x")).unwrap(), taps);

    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("ch.txt");
    write_channel(&p, &taps).unwrap();
    assert_eq!(read_channel(&p).unwrap(), taps);
}

#[test]
fn channel_parse_errors_name_the_line() {
    let err = parse_channel("# header\n0.5\n\n0.25 # note\nabc\n", Path::new("c.txt")).unwrap_err();
    match err {
        LabError::ChannelFile { line, .. } => assert_eq!(line, 5),
        other => panic!("{other:?}"),
    }
    assert!(parse_channel("# nothing\n", Path::new("c.txt")).is_err());
    assert!(parse_channel("inf\n", Path::new("c.txt")).is_err());
}

#[test]
fn file_channel_resolves_relative_to_config() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::create_dir(dir.path().join("channels")).unwrap();
    write_channel(&dir.path().join("channels/g168.txt"), &[3.0, 4.0]).unwrap();
    let cfg = BASE
        .replace(
            "kind = \"sparse\"",
            "kind = \"file\"\npath = \"channels/g168.txt\"",
        )
        .replace("taps = 32\n", "");
    let path = dir.path().join("exp.toml");
    std::fs::write(&path, &cfg).unwrap();
    let exp = load_config(&path).unwrap();
    assert_eq!(exp.channel.taps(), &[0.6, 0.8]);

    std::fs::write(
        &path,
        cfg.replace("\n[[algorithm]]", "normalize = false\n\n[[algorithm]]"),
    )
    .unwrap();
    assert_eq!(load_config(&path).unwrap().channel.taps(), &[3.0, 4.0]);

    std::fs::write(&path, cfg.replace("g168", "missing")).unwrap();
    assert!(matches!(load_config(&path), Err(LabError::Io { .. })));
}

#[test]
fn shipped_configs_are_valid() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let mut seen = 0;
    for entry in std::fs::read_dir(&dir).unwrap() {
        let p = entry.unwrap().path();
        if p.extension().is_some_and(|e| e == "toml") {
            load_config(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
            seen += 1;
        }
    }
    assert!(seen >= 7);
}
