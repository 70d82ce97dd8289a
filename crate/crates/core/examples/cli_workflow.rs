// Driving the command-line front end in-process: generate, check, decompose.

use wigner_lab::cli;

fn run(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = cli::run(
        std::iter::once("wigner-lab").chain(args.iter().copied()),
        &mut out,
        &mut err,
    );
    (
        code,
        String::from_utf8_lossy(&out).into_owned() + &String::from_utf8_lossy(&err),
    )
}

fn main() {
    let dir = std::env::temp_dir().join(format!("wigner-lab-example-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let op = dir.join("luw.json");
    let op = op.to_str().unwrap();

    let (code, _) = run(&[
        "gen", "luw", "--n", "3", "--k", "1", "--m", "2", "--sigma", "conj", "--seed", "5", "--out", op,
    ]);
    println!(
        "gen exit {code}; sidecar at {}",
        cli::sidecar_path(std::path::Path::new(op)).display()
    );

    let (code, text) = run(&["check", "--in", op, "--samples", "40"]);
    let report: serde_json::Value = serde_json::from_str(&text).unwrap();
    println!("check exit {code}, passed {}, m {}", report["passed"], report["m"]);

    let (code, text) = run(&["decompose", "--in", op, "--samples", "40"]);
    let result: serde_json::Value = serde_json::from_str(&text).unwrap();
    println!(
        "decompose exit {code}, tag {}, sigma {}",
        result["tag"], result["U"]["sigma"]
    );

    let (code, text) = run(&["verify", "graph", "--seed", "3"]);
    println!("verify graph exit {code}\n{text}");
    std::fs::remove_dir_all(&dir).ok();
}
