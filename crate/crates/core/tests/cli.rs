//! End-to-end behaviour of the command-line interface and the cache.

use std::fs;
use std::path::Path;

use otsuki::cache::{Cache, CacheKey, CACHE_VERSION};
use otsuki::cli::run_cli;
use otsuki::pipeline::{compute_index, IndexOptions, IndexReport, Method};
use otsuki::spectral::TAU_ZERO;
use serde_json::Value;

fn run(args: &[&str]) -> i32 {
    run_cli(std::iter::once("otsuki").chain(args.iter().copied()))
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn index_writes_report_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("index.json");
    let cache = dir.path().join("cache");
    let code = run(&[
        "index", "--p", "2", "--q", "3", "--method", "both", "--n", "256",
        "--json-out", out.to_str().unwrap(), "--cache-dir", cache.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let v = read_json(&out);
    assert_eq!(v["ind"], 31);
    assert_eq!(v["nul"], 9);
    assert_eq!(v["modes"].as_array().unwrap().len(), 3);
    assert!(cache.join(CacheKey::new(2, 3, 256).canonical() + ".json").exists());
}

#[test]
fn numbers_carry_seventeen_digits() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("geodesic.json");
    assert_eq!(run(&["geodesic", "--p", "2", "--q", "3", "--n", "128", "--json-out", out.to_str().unwrap()]), 0);
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.contains("\"b\": -6.58565959277444"), "{}", &text[..200]);
    let v = read_json(&out);
    assert_eq!(v["phi"].as_array().unwrap().len(), 4 * 128 + 1);
}

#[test]
fn validation_errors_exit_one() {
    assert_eq!(run(&["index", "--p", "1", "--q", "2"]), 1);
    assert_eq!(run(&["index", "--p", "2", "--q", "3", "--bogus"]), 1);
    assert_eq!(run(&["frobnicate"]), 1);
    assert_eq!(run(&["index", "--q", "3"]), 1);
    assert_eq!(run(&["edwards", "--p", "2", "--q", "3", "--n", "128", "--l", "0"]), 1);
}

#[test]
fn spectrum_and_edwards_subcommands_agree() {
    let dir = tempfile::tempdir().unwrap();
    for r in 0..6u32 {
        let spectrum_out = dir.path().join(format!("spectrum{r}.json"));
        let edw = dir.path().join(format!("edwards{r}.json"));
        let r_arg = r.to_string();
        let common = ["--p", "2", "--q", "3", "--n", "256"];
        let mut args = vec!["spectrum", "--l", "1", "--omega-index", &r_arg, "--cutoff", "0.5"];
        args.extend(common);
        args.extend(["--json-out", spectrum_out.to_str().unwrap()]);
        assert_eq!(run(&args), 0);
        let mut args = vec!["edwards", "--l", "1", "--omega-index", &r_arg];
        args.extend(common);
        args.extend(["--json-out", edw.to_str().unwrap()]);
        assert_eq!(run(&args), 0);
        let (s, e) = (read_json(&spectrum_out), read_json(&edw));
        assert_eq!(s["neg"], e[0]["neg"], "r = {r}");
        assert_eq!(s["zero"], e[0]["zero"], "r = {r}");
        assert_eq!(s["bc"], "twisted");
    }
}

#[test]
fn edwards_export_has_documented_fields() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("forms.json");
    assert_eq!(run(&["edwards", "--p", "2", "--q", "3", "--n", "128", "--json-out", out.to_str().unwrap()]), 0);
    let v = read_json(&out);
    for form in v.as_array().unwrap() {
        for key in ["l", "b", "a", "P_coeffs", "roots", "applicability_margin"] {
            assert!(form.get(key).is_some(), "missing {key}");
        }
        assert_eq!(form["a"].as_array().unwrap().len(), 4);
    }
}

#[test]
fn geodesic_mesh_export_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("mesh.csv");
    let json = dir.path().join("g.json");
    let code = run(&[
        "geodesic", "--b", "-0.3", "--n", "128", "--mesh-csv", csv.to_str().unwrap(),
        "--n-alpha", "4", "--n-t", "5", "--json-out", json.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let text = fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 1 + 4 * 5);
}

#[test]
fn verify_passes_for_two_thirds() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("checks.json");
    assert_eq!(run(&["verify", "--p", "2", "--q", "3", "--n", "256", "--json-out", out.to_str().unwrap()]), 0);
    let checks = read_json(&out);
    assert!(checks.as_array().unwrap().iter().all(|c| c["passed"] == true));
}

#[test]
fn sweep_orders_by_rotation_number() {
    let dir = tempfile::tempdir().unwrap();
    let list = dir.path().join("families.txt");
    fs::write(&list, "# unordered\n7/10\n2/3\n5/8\n").unwrap();
    let out = dir.path().join("sweep.jsonl");
    let code = run(&["sweep", list.to_str().unwrap(), "--n", "256", "--no-confirm", "--json-out", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    let pq: Vec<(u64, u64)> = fs::read_to_string(&out)
        .unwrap()
        .lines()
        .map(|l| {
            let v: Value = serde_json::from_str(l).unwrap();
            (v["p"].as_u64().unwrap(), v["q"].as_u64().unwrap())
        })
        .collect();
    assert_eq!(pq, vec![(2, 3), (5, 8), (7, 10)]);
}

#[test]
fn reports_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let outputs: Vec<String> = (0..2)
        .map(|i| {
            let out = dir.path().join(format!("run{i}.json"));
            assert_eq!(run(&["index", "--p", "5", "--q", "8", "--n", "256", "--no-cache", "--json-out", out.to_str().unwrap()]), 0);
            fs::read_to_string(out).unwrap()
        })
        .collect();
    assert_eq!(outputs[0], outputs[1]);
}

fn small_report() -> IndexReport {
    let opts = IndexOptions { method: Method::Both, cells: 128, tau: TAU_ZERO, confirm: false };
    compute_index(2, 3, &opts).unwrap()
}

#[test]
fn cache_round_trip_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cache = Cache::new(dir.path().join("missing").join("dir"));
    let key = CacheKey::new(2, 3, 128);
    let report = small_report();
    let path = cache.store(&key, &report).unwrap();
    let first = fs::read(&path).unwrap();
    let loaded = cache.load(&key).expect("hit after store");
    assert_eq!(loaded, report);
    cache.store(&key, &loaded).unwrap();
    assert_eq!(fs::read(&path).unwrap(), first);
}

#[test]
fn version_bump_misses() {
    let dir = tempfile::tempdir().unwrap();
    let cache = Cache::new(dir.path());
    let key = CacheKey::new(2, 3, 128);
    cache.store(&key, &small_report()).unwrap();
    let bumped = CacheKey { version: CACHE_VERSION + 1, ..key };
    assert!(cache.load(&bumped).is_none());
    // A file under the right name but with a stale version inside is a miss too.
    fs::copy(cache.path(&key), cache.path(&bumped)).unwrap();
    assert!(cache.load(&bumped).is_none());
}
