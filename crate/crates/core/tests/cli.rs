use std::process::Command;

fn cli(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_crnoma-aoi")).args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn preset_run_writes_csv() {
    let (code, csv, _) = cli(&["run", "--preset", "fig4b", "--analytic-only"]);
    assert_eq!(code, 0);
    assert!(csv.starts_with("preset,scheme,gen_model,M,T,R,snr_db,user_id,"));
    assert!(csv.contains("fig4b,TDMA,GAW,8,1.50000,1.00000,0,overall,28.1194,,,,\n"));
    assert_eq!(csv.lines().count(), 1 + 2 * 3 * 9);
}

#[test]
fn flags_override_config_file() {
    let dir = std::env::temp_dir().join(format!("crnoma-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("sweep.cfg");
    let out = dir.join("out.csv");
    std::fs::write(&cfg, "preset = custom\nm = 4\nsnr_db = 10\nschemes = cr-noma\nframes = 2000\nseed = 5\n").unwrap();
    let args = ["run", "--config", cfg.to_str().unwrap(), "--seed", "9", "--sim-only", "--out", out.to_str().unwrap()];
    let (code, stdout, _) = cli(&args);
    assert_eq!(code, 0);
    assert!(stdout.is_empty());
    let csv = std::fs::read_to_string(&out).unwrap();
    let row: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[..3], ["custom", "CR-NOMA", "GAW"]);
    assert_eq!(row[8], "");
    assert!(!row[9].is_empty());
    assert_eq!((row[11], row[12]), ("2000", "9"));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(cli(&["run", "--preset", "fig9"]).0, 2);
    assert_eq!(cli(&["run", "--analytic-only", "--sim-only"]).0, 2);
    assert_eq!(cli(&["validate", "--level", "medium"]).0, 2);
    assert_eq!(cli(&["run", "--config", "/nonexistent/sweep.cfg"]).0, 2);
    let (code, _, err) = cli(&["run", "--preset", "custom", "--frames", "10", "--warmup", "10"]);
    assert_eq!(code, 2);
    assert!(err.contains("warm-up"), "{err}");
}

#[test]
fn probs_dump_covers_each_partition() {
    let (code, out, _) = cli(&["probs", "--rate", "1", "--snr-db", "0", "--trials", "20000"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 1 + 10);
    assert!(out.lines().any(|l| l.starts_with("1,0,gar_m,second,0.145527,")));
}
