use std::path::PathBuf;
use std::process::{Command, Output};

use num_complex::Complex64;
use serde_json::Value;
use unicrit_core::dynamics::{escape_radius, green_parameter};
use unicrit_core::experiments::CSV_HEADER;
use unicrit_core::ntheory::t_n;

const SMALL: [&str; 6] = ["--grid", "96x96", "--cbf-samples", "40", "--cbf-nodes", "256"];

fn unicrit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_unicrit"))
        .args(args)
        .env_remove("UNICRIT_D")
        .env_remove("UNICRIT_GRID")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn temp(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("unicrit-cli-{}-{name}", std::process::id()))
}

fn centers(d: &str, n: &str) -> Vec<Complex64> {
    let text = stdout(&unicrit(&["centers", "-d", d, "-n", n]));
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "re,im,residual,mult");
    lines
        .map(|l| {
            let f: Vec<f64> = l.split(',').map(|x| x.parse().unwrap()).collect();
            Complex64::new(f[0], f[1])
        })
        .collect()
}

#[test]
fn centers_period_three() {
    let roots = centers("2", "3");
    assert_eq!(roots.len(), 4);
    assert!(roots.iter().any(|z| z.norm() < 1e-14));
    assert!(roots.iter().any(|z| (z - Complex64::new(-1.754877666246693, 0.0)).norm() < 1e-12));
}

#[test]
fn centers_period_one_and_counts() {
    assert_eq!(centers("2", "1"), vec![Complex64::new(0.0, 0.0)]);
    for (d, n, count) in [("2", "5", 16), ("3", "3", 9), ("4", "2", 4)] {
        assert_eq!(centers(d, n).len(), count);
    }
    let o = unicrit(&["centers", "-n", "4"]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("count=8"));
}

#[test]
fn centers_json() {
    let o = unicrit(&["centers", "-n", "2", "--format", "json"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v.is_object());
}

#[test]
fn theorem1_table() {
    let mut args = vec!["theorem1", "-n", "3"];
    args.extend(SMALL);
    let text = stdout(&unicrit(&args));
    let mut lines = text.lines();
    let provenance = lines.next().unwrap();
    assert!(provenance.starts_with("# d=2 grid=96x96 seed=1"));
    assert!(provenance.contains("safety=1.5"));
    assert_eq!(lines.next().unwrap(), CSV_HEADER.join(","));
    let rows: Vec<&str> = lines.collect();
    // eight built-in functions plus the L1 row, for each n
    assert_eq!(rows.len(), 3 * 9);
    for row in &rows {
        assert!(row.contains(",ok,"), "{row}");
    }
    for row in rows.iter().filter(|r| r.starts_with("2,2,one,")) {
        assert!(row.starts_with("2,2,one,0,"), "{row}");
    }
}

#[test]
fn theorem1_json_is_reproducible() {
    let mut args = vec!["theorem1", "-n", "2", "--format", "json", "--phi", "bump(0,0.5),sz"];
    args.extend(SMALL);
    let a = stdout(&unicrit(&args));
    let b = stdout(&unicrit(&args));
    let va: Value = serde_json::from_str(&a).unwrap();
    let vb: Value = serde_json::from_str(&b).unwrap();
    let strip = |v: &Value| {
        let mut v = v.clone();
        for row in v["rows"].as_array_mut().unwrap() {
            row.as_object_mut().unwrap().remove("runtime_ms");
        }
        v
    };
    assert_eq!(strip(&va), strip(&vb));
    assert_eq!(va["rows"].as_array().unwrap().len(), 2 * 3);
}

#[test]
fn theorem2_table() {
    let mut args = vec!["theorem2", "--periods", "2,3", "--radii", "0.5", "--phi", "bump(-1,0.4)"];
    args.extend(SMALL);
    let text = stdout(&unicrit(&args));
    let phis: Vec<String> = text
        .lines()
        .skip(2)
        .map(|l| {
            let mut r = csv::ReaderBuilder::new().has_headers(false).from_reader(l.as_bytes());
            r.records().next().unwrap().unwrap()[2].to_string()
        })
        .collect();
    assert_eq!(
        phis,
        [
            "bump(-1,0.4);w=0",
            "L1;w=0",
            "bump(-1,0.4);r=0.5",
            "L1;r=0.5",
            "bump(-1,0.4);w=0",
            "L1;w=0",
            "bump(-1,0.4);r=0.5",
            "L1;r=0.5"
        ]
    );
}

#[test]
fn constants_json() {
    let mut args = vec!["constants", "-n", "4"];
    args.extend(SMALL);
    let v: Value = serde_json::from_str(&stdout(&unicrit(&args))).unwrap();
    assert!((v["h1_inradius"].as_f64().unwrap() - 0.25).abs() < 1e-9);
    let c0 = v["c0"].as_f64().unwrap();
    let c0s = v["c0_star"].as_f64().unwrap();
    assert!(c0 >= c0s && c0s >= std::f64::consts::PI);
    let cbf = v["c_bf_used"].as_f64().unwrap();
    assert!((cbf - v["c_bf_lower"].as_f64().unwrap() * 1.5).abs() < 1e-14);
    let table = v["t_n"].as_array().unwrap();
    assert_eq!(table.len(), 4);
    for (i, t) in table.iter().enumerate() {
        let want = t_n(2, i as u64 + 1, cbf).unwrap();
        assert!((t.as_f64().unwrap() - want).abs() <= 1e-14 * want);
    }
}

#[test]
fn greenfield_pgm_and_sidecar() {
    let out = temp("g.pgm");
    let o = unicrit(&["greenfield", "--grid", "32x48", "--kind", "h", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let bytes = std::fs::read(&out).unwrap();
    let header = b"P5\n48 32\n65535\n";
    assert_eq!(&bytes[..header.len()], header);
    assert_eq!(bytes.len(), header.len() + 2 * 32 * 48);
    let mut side = out.as_os_str().to_owned();
    side.push(".json");
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&side).unwrap()).unwrap();
    assert_eq!(v["width"], 48);
    assert!(v["max"].as_f64().unwrap().is_finite());
    let _ = std::fs::remove_file(&out);
    let _ = std::fs::remove_file(&side);
}

#[test]
fn greenfield_h_is_refinement_stable() {
    // the extreme value sits at the tip λ = −2, which no node hits; the grid
    // value converges like N^{-1/2}, so the 1% criterion is met from 2048²
    let sup = |grid: &str| -> f64 {
        let out = temp(&format!("h{grid}.pgm"));
        let o = unicrit(&["greenfield", "--grid", grid, "--kind", "h", "--out", out.to_str().unwrap()]);
        assert!(o.status.success());
        let mut side = out.as_os_str().to_owned();
        side.push(".json");
        let v: Value = serde_json::from_str(&std::fs::read_to_string(&side).unwrap()).unwrap();
        let _ = std::fs::remove_file(&out);
        let _ = std::fs::remove_file(&side);
        v["min"].as_f64().unwrap().abs().max(v["max"].as_f64().unwrap().abs())
    };
    let (a, b) = (sup("2048x2048"), sup("4096x4096"));
    assert!(a.is_finite() && b.is_finite());
    assert!(b <= 0.5 * 5f64.ln() + 1e-9);
    assert!((a - b).abs() <= 0.01 * b, "{a} vs {b}");
}

#[test]
fn centers_lie_in_the_zero_set() {
    for z in centers("2", "6") {
        assert_eq!(green_parameter(2, z, 2000, escape_radius(2, z)), 0.0, "{z}");
    }
}

#[test]
fn environment_overrides() {
    let o = Command::new(env!("CARGO_BIN_EXE_unicrit"))
        .args(["centers", "-n", "2"])
        .env("UNICRIT_D", "3")
        .output()
        .unwrap();
    assert_eq!(stdout(&o).lines().count(), 1 + 3);
    let o = Command::new(env!("CARGO_BIN_EXE_unicrit"))
        .args(["constants"])
        .env("UNICRIT_GRID", "12by12")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn invalid_input_exit_code() {
    assert_eq!(unicrit(&["centers", "-n", "0"]).status.code(), Some(1));
    assert_eq!(unicrit(&["centers", "-d", "1", "-n", "2"]).status.code(), Some(1));
    assert_eq!(unicrit(&["theorem2", "--periods", "1"]).status.code(), Some(1));
    assert_eq!(unicrit(&["bogus"]).status.code(), Some(1));
    assert_eq!(unicrit(&["--help"]).status.code(), Some(0));
}
