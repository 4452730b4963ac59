//! Byte-exact outputs for a fixed corpus. Regenerate with
//! `BLESS=1 cargo test -p torus-census --test golden`.

use std::path::PathBuf;

const FIX: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures");

const CASES: &[(&str, &[&str])] = &[
    ("invariants_square.txt", &["invariants", "--polygon", "@/square.json"]),
    ("invariants_square.json", &["invariants", "--polygon", "@/square.json", "--format", "json"]),
    ("canon_triangle.json", &["canon", "--polygon", "@/triangle.json", "--format", "json"]),
    ("blowup_triangle.txt", &["blowup", "--polygon", "@/triangle.json", "--vertex", "0", "--delta", "1/3"]),
    ("blowup_triangle.svg", &["blowup", "--polygon", "@/triangle.json", "--vertex", "0", "--delta", "1/3", "--format", "svg"]),
    ("project_square.json", &["project", "--polygon", "@/square.json", "--xi", "1,-1", "--format", "json"]),
    ("project_square.txt", &["project", "--polygon", "@/square.json", "--xi", "0,1"]),
    ("census_quarter.txt", &["census", "--spec", "@/cp2_1_three_quarters.json"]),
    ("census_third_quarter.json", &["census", "--spec", "@/cp2_third_quarter.json", "--format", "json"]),
    ("census_twisted_two.txt", &["census", "--spec", "@/twisted_two.json"]),
    ("feasibility_4_third.txt", &["feasibility", "--k", "4", "--delta", "1/3"]),
    ("feasibility_3_quarter.json", &["feasibility", "--k", "3", "--delta", "1/4", "--format", "json"]),
    ("chains_third_quarter.json", &["chains", "--spec", "@/cp2_third_quarter.json", "--format", "json"]),
    ("exceptional_third_quarter.txt", &["exceptional", "--spec", "@/cp2_third_quarter.json"]),
    ("threshold_third_quarter.txt", &["threshold", "--spec", "@/cp2_third_quarter.json"]),
];

fn output(args: &[&str]) -> String {
    let mut v = vec!["torus-census".to_string()];
    v.extend(args.iter().map(|a| a.replace('@', FIX)));
    let o = torus_census::run(v);
    assert_eq!(o.code, 0, "{args:?}: {}", o.stderr);
    o.stdout
}

#[test]
fn golden_outputs() {
    let dir = PathBuf::from(FIX).join("golden");
    let bless = std::env::var_os("BLESS").is_some();
    let mut stale = Vec::new();
    for (name, args) in CASES {
        let got = output(args);
        assert_eq!(got, output(args), "{name}: output not deterministic");
        let path = dir.join(name);
        if bless {
            std::fs::write(&path, &got).unwrap();
            continue;
        }
        let want = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{name}: {e}"));
        if got != want {
            stale.push(*name);
        }
    }
    assert!(stale.is_empty(), "outputs differ from goldens: {stale:?}");
}
