use torus_census::run;

const FIX: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures");

fn go(args: &[&str]) -> torus_census::Outcome {
    let mut v = vec!["torus-census".to_string()];
    v.extend(args.iter().map(|a| a.replace("@", FIX)));
    run(v)
}

#[test]
fn square_invariants() {
    let o = go(&["invariants", "--polygon", "@/square.json"]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    assert!(o.stdout.contains("N=4"));
    assert!(o.stdout.contains("area=1, perimeter=4"));
    assert!(o.stdout.contains("self-intersections: 0,0,0,0"));
}

#[test]
fn census_single_quarter_blowup_has_one_polygon() {
    let o = go(&["census", "--spec", "@/cp2_1_three_quarters.json"]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    assert!(o.stdout.contains("toric count: 1\n"), "{}", o.stdout);
}

#[test]
fn feasibility_four_thirds() {
    let o = go(&["feasibility", "--k", "4", "--delta", "1/3"]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    assert!(o.stdout.contains("toric: no"));
    assert!(o.stdout.contains("circle: no"));
}

#[test]
fn inline_json_matches_file_input() {
    let a = go(&["invariants", "--polygon", "@/square.json", "--format", "json"]);
    let b = go(&["invariants", "--polygon", r#"{"vertices":[["0","0"],["1","0"],["1","1"],["0","1"]]}"#, "--format", "json"]);
    assert_eq!(a, b);
}

#[test]
fn exit_codes() {
    assert_eq!(go(&["frobnicate"]).code, 1);
    assert_eq!(go(&["census"]).code, 1);
    assert_eq!(go(&["invariants", "--polygon", "@/missing.json"]).code, 1);
    assert_eq!(go(&["invariants", "--polygon", "{not json"]).code, 1);
    assert_eq!(go(&["blowup", "--polygon", "@/triangle.json", "--vertex", "0", "--delta", "one"]).code, 1);
    assert_eq!(go(&["census", "--spec", "@/cp2_1_three_quarters.json", "--format", "svg"]).code, 1);
    assert_eq!(go(&["--help"]).code, 0);
    assert_eq!(go(&["--version"]).code, 0);

    // core diagnostics pass through verbatim with code 2
    let o = go(&["canon", "--polygon", "@/not_delzant.json"]);
    assert_eq!(o.code, 2);
    assert_eq!(o.stderr, "error: precondition violated: not Delzant at vertex 2 (determinant 2)\n");
    let o = go(&["blowup", "--polygon", "@/triangle.json", "--vertex", "0", "--delta", "1"]);
    assert_eq!(o.code, 2);
    assert!(o.stderr.starts_with("error: capacity too large"), "{}", o.stderr);
    assert_eq!(go(&["feasibility", "--k", "2", "--delta", "1/2", "--lambda", "1/2"]).code, 0);
    assert_eq!(go(&["census", "--spec", r#"{"base":{"kind":"cp2","lambda":"1"},"capacities":["1/2","1/2"]}"#]).code, 2);
}

#[test]
fn check_reports_failures_without_erroring() {
    let o = go(&["check", "--polygon", "@/not_delzant.json"]);
    assert_eq!(o.code, 0);
    assert_eq!(o.stdout, "delzant: no\n  vertex 2: determinant 2\n");
}

#[test]
fn polygon_and_lattice_blowdowns() {
    let up = go(&["blowup", "--polygon", "@/triangle.json", "--vertex", "0", "--delta", "1/3", "--format", "json"]);
    assert_eq!(up.code, 0);
    let down = go(&["blowdown", "--polygon", &up.stdout, "--edge", "0", "--format", "json"]);
    assert_eq!(down.code, 0, "{}", down.stderr);
    let canon = |s: &str| go(&["canon", "--polygon", s, "--format", "json"]).stdout;
    assert_eq!(canon(&down.stdout), canon("@/triangle.json"));

    let o = go(&["blowdown", "--spec", r#"{"lambda":"1","capacities":["2/5","2/5"]}"#, "--class", "1,-1,-1", "--format", "json"]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let v: serde_json::Value = serde_json::from_str(&o.stdout).unwrap();
    assert_eq!(v["data"]["kind"], "product_ruled");
    assert_eq!(v["data"]["mu"], "3/5");
    assert_eq!(v["data"]["fiber"], "3/5");
}

#[test]
fn project_then_check_graph() {
    let g = go(&["project", "--polygon", "@/square.json", "--xi", "1,-1", "--format", "json"]);
    assert_eq!(g.code, 0);
    let c = go(&["check", "--graph", &g.stdout]);
    assert_eq!(c.stdout, "valid: yes\n");
    let b = go(&["blowup", "--graph", &g.stdout, "--vertex", "0", "--delta", "1/2"]);
    assert_eq!(b.code, 0, "{}", b.stderr);
    assert!(b.stdout.contains("point weights (1,-2)"));
    let b = go(&["blowup", "--graph", &g.stdout, "--vertex", "0", "--delta", "1"]);
    assert_eq!(b.code, 2);
    assert!(b.stderr.starts_with("error: infeasible blow-up"), "{}", b.stderr);
    let svg = go(&["canon", "--graph", &g.stdout, "--format", "svg"]);
    assert!(svg.stdout.starts_with("<svg") && svg.stdout.ends_with("</svg>\n"));
}

#[test]
fn thread_count_does_not_change_output() {
    let spec = torus_census_core::census::ManifoldSpec::equal_blowups(3, &torus_census_core::rational::q(1, 4));
    let a = torus_census_core::census::census_with(&spec, &torus_census::exec::RayonExecutor::new(Some(1))).unwrap();
    let b = torus_census_core::census::census_with(&spec, &torus_census::exec::RayonExecutor::new(Some(4))).unwrap();
    assert_eq!(a, b);
    assert!(a.counts().toric > 0);
}

#[test]
fn lattice_verbs() {
    let o = go(&["threshold", "--spec", "@/cp2_third_quarter.json", "--format", "json"]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    assert!(o.stdout.contains("\"delta0\": \"1/3\""));
    let o = go(&["exceptional", "--spec", "@/cp2_third_quarter.json", "--bound", "1/3", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&o.stdout).unwrap();
    let syms: Vec<_> = v["classes"].as_array().unwrap().iter().map(|c| c["symbol"].as_str().unwrap().to_string()).collect();
    assert_eq!(syms, ["E2", "E1"]);
    // a minimal surface has a single empty chain
    let o = go(&["chains", "--spec", "@/twisted_two.json", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&o.stdout).unwrap();
    assert_eq!(v["chains"].as_array().unwrap().len(), 1);
    assert!(v["chains"][0]["steps"].as_array().unwrap().is_empty());
    assert_eq!(v["chains"][0]["terminal"]["mu"], "2");
}
