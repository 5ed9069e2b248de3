#[test]
fn freeze_ex4_closure() {
    let pairs = seu_cli::closed_relation("../../corpus/ex4_seed.json", 16).unwrap();
    let rendered: Vec<String> = pairs
        .iter()
        .map(|[a, b]| format!("[\"{a}\", \"{b}\"]"))
        .collect();
    println!("CLOSURE_START");
    println!("{}", rendered.join(",\n"));
    println!("CLOSURE_END count={}", pairs.len());
}
