use std::process::Command;

use super_einstein::curvature::RicciReport;
use super_einstein::einstein::ClassificationReport;
use super_einstein::flag::FlagInvariants;
use super_einstein_cli::{run, AlgebraInfo, Envelope, Outcome, SCHEMA};

fn cli(args: &str) -> Outcome {
    run(std::iter::once("super-einstein").chain(args.split_whitespace()))
}

#[test]
fn binary_prints_golden_su41_rays() {
    let out = Command::new(env!("CARGO_BIN_EXE_super-einstein"))
        .args(["classify", "--family", "su", "--m", "4", "--n", "1", "--p", "1", "--q", "2"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    for ray in ["[2 : 1 : 1 | c = 2]", "[1 : 2 : 1 | c = 2]", "[1 : 1 : 2 | c = 2]", "[1 : 1 : 1 | c = 5/2]"] {
        assert!(text.contains(ray), "missing {ray} in\n{text}");
    }
    assert!(text.contains("4 solutions"));
}

#[test]
fn binary_exit_code_for_bad_arguments() {
    let out = Command::new(env!("CARGO_BIN_EXE_super-einstein")).args(["classify", "--family", "su"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("Usage"));
}

#[test]
fn osp_json_envelope_round_trips() {
    let out = cli("classify --family osp --n 2 --p 2 --json");
    assert_eq!(out.code, 0, "{}", out.stderr);
    let env: Envelope<ClassificationReport> = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(env.schema, SCHEMA);
    assert_eq!(env.command, "classify");
    let rays: Vec<String> = env.report.solutions.iter().map(|s| s.render()).collect();
    assert_eq!(rays, ["[1 : 2 | c = -3/2]", "[3 : 2 | c = -11/18]"]);
    let again = serde_json::to_string_pretty(&env).unwrap() + "\n";
    assert_eq!(again, out.stdout);
}

#[test]
fn ricci_at_the_normal_metric() {
    let out = cli("ricci --family su --m 4 --n 1 --circle 1,2 --metric 1,1,1 --route all");
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert!(out.stdout.contains("(5/2, 5/2, 5/2)"), "{}", out.stdout);
    assert!(out.stdout.contains("scalar         15"), "{}", out.stdout);
    let js = cli("ricci --family su --m 4 --n 1 --circle 1,2 --metric 1,1,1 --json");
    let env: Envelope<RicciReport> = serde_json::from_str(&js.stdout).unwrap();
    assert_eq!(env.report.routes_agreed.len(), 3);
}

#[test]
fn ricci_single_route_and_group_route() {
    let out = cli("ricci --family su --m 3 --n 2 --circle 2,4 --metric 1,2,3 --route definition");
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert!(out.stdout.contains("routes agreed  definition"));
    let g = cli("ricci --family sl11 --metric 3,-2");
    assert_eq!(g.code, 0, "{}", g.stderr);
    assert!(g.stdout.contains("Ric = 3/8 g"), "{}", g.stdout);
    assert_eq!(cli("ricci --family su --m 4 --n 1 --circle 1,2 --metric 1,1,1 --route group").code, 2);
}

#[test]
fn metric_length_and_zero_entries_are_argument_errors() {
    assert_eq!(cli("ricci --family su --m 4 --n 1 --circle 1,2 --metric 1,1").code, 2);
    assert_eq!(cli("ricci --family su --m 4 --n 1 --circle 1,2 --metric 1,0,1").code, 2);
    assert_eq!(cli("ricci --family su --m 4 --n 1 --circle 1,2 --metric a,b,c").code, 2);
}

#[test]
fn flag_decomposition_report() {
    let out = cli("flag --family su --m 4 --n 1 --circle 1,2 decompose");
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert!(out.stdout.contains("[123] = 2"), "{}", out.stdout);
    let js = cli("flag --family osp --n 3 --circle 2 --json");
    let env: Envelope<FlagInvariants> = serde_json::from_str(&js.stdout).unwrap();
    assert_eq!(env.report.blocks.len(), 2);
}

#[test]
fn algebra_info() {
    let out = cli("algebra --family sl --m 3 --n 2 info --json");
    assert_eq!(out.code, 0, "{}", out.stderr);
    let env: Envelope<AlgebraInfo> = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!((env.report.dim_even, env.report.dim_odd), (12, 12));
    assert_eq!(env.report.killing_coefficient.as_deref(), Some("2"));
    assert!(cli("algebra --family e8 info").code == 2);
}

#[test]
fn empty_and_family_renderings() {
    let none = cli("classify --family su --m 3 --n 3 --p 1 --q 5");
    assert!(none.stdout.contains("no invariant Einstein metrics"), "{}", none.stdout);
    let fam = cli("classify --family su --m 4 --n 2 --p 2 --q 4");
    assert!(fam.stdout.contains("{(x1, x2, x1+x2), c = 0; x1 x2 ≠ 0, x1+x2 ≠ 0}"), "{}", fam.stdout);
}

#[test]
fn out_of_range_parameters_exit_2() {
    let out = cli("classify --family su --m 1 --n 1 --p 1");
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("out of range"));
    assert_eq!(cli("classify --family su --n 1 --p 1").code, 2);
    assert_eq!(cli("classify --family osp --n 2 --p 3").code, 2);
    assert_eq!(cli("verify --suite bogus").code, 2);
    assert_eq!(cli("--threads 0 verify --suite identities").code, 2);
}

#[test]
fn verify_identities_passes() {
    let out = cli("--threads 2 verify --suite identities --max-size 5");
    assert_eq!(out.code, 0, "{}", out.stdout);
    assert!(out.stdout.contains("0 failed"));
}

#[test]
fn quiet_and_help() {
    let q = cli("--quiet classify --family su --m 4 --n 1 --p 1 --q 2");
    assert_eq!((q.code, q.stdout.as_str()), (0, ""));
    let help = cli("ricci --help");
    assert_eq!(help.code, 0);
    assert!(help.stdout.contains("m_{0,1}, m_{1,1}, m_{1,0}"), "{}", help.stdout);
}

#[test]
fn output_is_deterministic() {
    let a = cli("classify --family su --m 5 --n 2 --p 2 --q 4 --json");
    let b = cli("classify --family su --m 5 --n 2 --p 2 --q 4 --json");
    assert_eq!(a, b);
}
