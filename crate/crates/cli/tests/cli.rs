use std::io::Write;
use std::process::{Command, Output};

fn fixlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fixlab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap().trim_end().to_string()
}

fn map_file(text: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

const TWIST: &str = "# twist on NS2 x Z^2 x Z2\na1 -> a1 d1\nb1 -> b1 a1\nc1 -> c1 d1\nc2 -> c2^-1\nd1 -> d1\n";

#[test]
fn normalize_moves_b_past_a() {
    let o = fixlab(&["normalize", "-g", "NS2 x Z", "-w", "b1 a1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "a1^-1 b1");
}

#[test]
fn normalize_output_reparses_to_itself() {
    let first = stdout(&fixlab(&[
        "normalize",
        "-g",
        "NS2^2 x Z x Z2",
        "-w",
        "b1 a2^3 d1 b2 a1^-2 c1 b1",
    ]));
    let second = stdout(&fixlab(&["normalize", "-g", "NS2^2 x Z x Z2", "-w", &first]));
    assert_eq!(first, second);
}

#[test]
fn arithmetic_commands() {
    assert_eq!(
        stdout(&fixlab(&["mul", "-g", "NS2", "-w", "b1", "-w", "a1"])),
        "a1^-1 b1"
    );
    assert_eq!(stdout(&fixlab(&["inv", "-g", "NS2", "-w", "a1 b1"])), "a1 b1^-1");
    assert_eq!(stdout(&fixlab(&["pow", "-g", "NS2", "-w", "a1 b1", "-k", "2"])), "b1^2");
    assert_eq!(
        stdout(&fixlab(&["pow", "-g", "NS2", "-w", "a1 b1", "-k", "-3"])),
        "a1 b1^-3"
    );
}

#[test]
fn fix_of_twist_map() {
    let m = map_file(TWIST);
    let path = m.path().to_str().unwrap();
    let o = fixlab(&["fix", "-g", "NS2 x Z^2 x Z2", "-m", path]);
    assert_eq!(o.status.code(), Some(0));
    // same subgroup as <a1^2, b1^2, a1 c1, d1>, in canonical lattice-then-reps order
    assert_eq!(stdout(&o), "a1 c1, b1^2, c1^2, d1");
    let o = fixlab(&["member", "-g", "NS2 x Z^2 x Z2", "--sub", &stdout(&o), "-w", "a1^2"]);
    assert_eq!(stdout(&o), "true");
    assert_eq!(
        fixlab(&["check-auto", "-g", "NS2 x Z^2 x Z2", "-m", path])
            .status
            .code(),
        Some(0)
    );
    assert_eq!(
        stdout(&fixlab(&["check-endo", "-g", "NS2 x Z^2 x Z2", "-m", path])),
        "valid"
    );
}

#[test]
fn fix_family_intersects() {
    let shear = map_file("b1 -> b1 a1\n");
    let flip = map_file("c1 -> c1^-1\n");
    let o = fixlab(&[
        "fix-family",
        "-g",
        "NS2 x Z",
        "--partial-identity",
        "-m",
        shear.path().to_str().unwrap(),
        "-m",
        flip.path().to_str().unwrap(),
    ]);
    assert_eq!(stdout(&o), "a1, b1^2");
}

#[test]
fn map_errors_are_usage_errors() {
    let partial = map_file("a1 -> a1\n");
    let o = fixlab(&["fix", "-g", "NS2", "-m", partial.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("b1"));
    let o = fixlab(&["fix", "-g", "NS2", "-m", "/nonexistent/map"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn invalid_endomorphism_fails_check() {
    let bad = map_file("a1 -> b1\nb1 -> b1\n");
    let o = fixlab(&["check-endo", "-g", "NS2", "-m", bad.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("invalid"));
}

#[test]
fn non_surjective_map_is_not_automorphism() {
    let m = map_file("a1 -> a1^2\nb1 -> b1\n");
    let o = fixlab(&["check-auto", "-g", "NS2", "-m", m.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o), "false");
}

#[test]
fn subgroup_queries() {
    let rank = fixlab(&["rank", "-g", "NS2 x Z", "--sub", "a1 c1; b1"]);
    assert!(stdout(&rank).starts_with("rank 2 (exact)"));
    let idx = fixlab(&[
        "index",
        "-g",
        "NS2 x Z",
        "--sub",
        "a1 c1; a1^2; b1^2",
        "--in",
        "a1; b1^2; c1",
    ]);
    assert_eq!(stdout(&idx), "2");
    let inf = fixlab(&["index", "-g", "NS2 x Z", "--sub", "a1"]);
    assert_eq!(stdout(&inf), "infinite");
    let meet = fixlab(&[
        "intersect",
        "-g",
        "NS2 x Z",
        "--sub",
        "a1; b1^2; c1",
        "--with",
        "a1 c1; b1",
    ]);
    assert_eq!(stdout(&meet), "a1 c1, b1^2, c1^2");
}

#[test]
fn sqrt_in_commutator_subgroup() {
    assert_eq!(
        stdout(&fixlab(&["sqrt", "-g", "NS2^2", "-w", "a1^4 a2^-2"])),
        "a1^2 a2^-1"
    );
    assert_eq!(fixlab(&["sqrt", "-g", "NS2", "-w", "a1"]).status.code(), Some(1));
}

#[test]
fn classify_reports_case() {
    let o = stdout(&fixlab(&["classify", "-g", "NS2 x Z x Z2"]));
    assert_eq!(o, "case euc3\ncompressed_all false\ninert_all false");
    let o = stdout(&fixlab(&["classify", "-g", "NS2 x P2"]));
    assert!(o.ends_with("compressed_all true\ninert_all true"));
}

#[test]
fn searches_find_witnesses() {
    let o = stdout(&fixlab(&[
        "search-compression",
        "-g",
        "NS2 x Z",
        "--sub",
        "a1^2; b1^2; c1^2",
    ]));
    assert!(o.contains("K = <a1 c1, b1^2, c1^2, b1> (rank 2 (exact))"), "{}", o);
    let o = stdout(&fixlab(&[
        "search-inertia",
        "-g",
        "NS2^2",
        "--sub",
        "a1; b1^2; a2",
        "--max-gens",
        "2",
    ]));
    assert!(o.starts_with("inertia witness"), "{}", o);
    let o = stdout(&fixlab(&[
        "search-inertia",
        "-g",
        "NS2",
        "--sub",
        "a1; b1",
        "--max-word-len",
        "2",
    ]));
    assert!(o.starts_with("no witness"), "{}", o);
}

#[test]
fn certificate_command() {
    assert_eq!(
        fixlab(&["certify-compressed", "-g", "NS2 x Z", "--sub", "a1; b1^2; c1"])
            .status
            .code(),
        Some(0)
    );
    assert_eq!(
        fixlab(&["certify-compressed", "-g", "NS2 x Z", "--sub", "a1^2; b1^2; c1^2"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn sampling_is_deterministic() {
    let args = ["sample-inertia", "-g", "NS2 x Z2", "--trials", "40", "--seed", "9"];
    let (a, b) = (fixlab(&args), fixlab(&args));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.status.code(), Some(0));
}

#[test]
fn suite_reports_total() {
    let o = fixlab(&["paper-suite", "--scale", "quick"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let last = out.lines().last().unwrap();
    let (pass, total) = last.trim_start_matches("TOTAL ").split_once('/').unwrap();
    assert_eq!(pass, total);
    assert!(out.lines().next().unwrap().starts_with("CHECK normal-form.ba PASS"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(fixlab(&["normalize", "-g", "NS3", "-w", "a1"]).status.code(), Some(2));
    assert_eq!(fixlab(&["normalize", "-g", "NS2", "-w", "a1^x"]).status.code(), Some(2));
    assert_eq!(fixlab(&["normalize", "-g", "NS2"]).status.code(), Some(2));
    assert_eq!(fixlab(&["frobnicate"]).status.code(), Some(2));
}
