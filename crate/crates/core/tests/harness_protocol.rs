use jpr_core::harness::{
    emit_report, generate_synthetic, parse_bootstrap, parse_forecaster, read_series_csv, rolling_eval,
    write_series_csv, ExperimentConfig, SyntheticSpec,
};
use jpr_core::regions::Method;
use jpr_core::Error;

fn small_config(seed: u64) -> ExperimentConfig {
    let mut c = ExperimentConfig::parse(&format!(
        "B = 60\nseed = {seed}\nwindow_len = 150\nstep = 9\nn_windows = 7\nH = 3, 5\nk = 1, 2\nalpha = 0.2\n\
         methods = kfwe, sidak, scheffe\nforecaster = sarima(1, 0, 1, 12)\nbootstrap = cbb(6)\n"
    ))
    .unwrap();
    c.methods.push(Method::Bh);
    c
}

#[test]
fn report_is_identical_across_pool_sizes() {
    let y = generate_synthetic(&SyntheticSpec {
        length: 250,
        period: 12,
        seed: 3,
        ..Default::default()
    })
    .unwrap();
    let cfg = small_config(21);
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| rolling_eval(&y, &cfg)).unwrap()
    };
    let one = run(1);
    assert_eq!(one, run(3));
    assert_eq!(one.cells.len(), 4 * 2 * 2);

    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    emit_report(&one, &a).unwrap();
    emit_report(&run(2), &b).unwrap();
    assert_eq!(std::fs::read(a).unwrap(), std::fs::read(b).unwrap());

    // a different master seed changes the bootstrap
    assert_ne!(one, rolling_eval(&y, &small_config(22)).unwrap());
}

#[test]
fn series_files_round_trip_through_the_harness() {
    let y = generate_synthetic(&SyntheticSpec {
        length: 200,
        period: 10,
        seed: 1,
        ..Default::default()
    })
    .unwrap();
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("s.csv");
    let mut buf = Vec::new();
    write_series_csv(y.values(), &mut buf).unwrap();
    std::fs::write(&p, buf).unwrap();
    assert_eq!(read_series_csv(&p, false).unwrap().values(), y.values());
    assert!(matches!(read_series_csv(dir.path().join("missing.csv"), false), Err(Error::Io { .. })));
}

#[test]
fn config_file_resolves_external_path_and_rejects_short_series() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("exp.conf");
    std::fs::write(&cfg_path, "B = 50\nseed = 1\nexternal = pts.csv\n").unwrap();
    let cfg = ExperimentConfig::load(&cfg_path).unwrap();
    assert_eq!(cfg.external, Some(dir.path().join("pts.csv")));

    let f = parse_forecaster("ar(1)").unwrap();
    assert!(parse_bootstrap("model", &f).is_ok());
    let short = generate_synthetic(&SyntheticSpec::default()).unwrap();
    let cfg = ExperimentConfig::parse("B = 50\nseed = 1\nn_windows = 200\n").unwrap();
    assert!(matches!(
        rolling_eval(&short, &cfg),
        Err(Error::ConfigTooLargeForSeries { needed: 4259, len: 3651 })
    ));
}
