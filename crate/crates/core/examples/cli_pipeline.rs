//! Drive the command-line front end in-process and list the files it writes.

fn main() {
    let out = std::env::temp_dir().join("arcsem-cli-pipeline");
    let out_s = out.to_string_lossy().to_string();
    let runs: [&[&str]; 3] = [
        &["arcsem", "expand", "--func", "step_pi3", "--grid", "uniform:10", "--out", &out_s],
        &["arcsem", "solve", "--problem", "heat", "--func", "exp_cos", "--trunc", "40", "--out", &out_s],
        &["arcsem", "expand", "--func", "nonexistent", "--out", &out_s],
    ];
    for args in runs {
        let code = arcsem::cli::run(args.iter().copied());
        println!("{} -> exit {code}", args[1..].join(" "));
    }
    let mut files: Vec<_> = std::fs::read_dir(&out).unwrap().map(|e| e.unwrap().file_name()).collect();
    files.sort();
    println!("files in {}: {files:?}", out.display());
}
