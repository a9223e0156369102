use rcsplit_core::textproc::porter::stem;

#[test]
fn matches_reference_vectors() {
    let data = include_str!("data/porter_vectors.tsv");
    let mut mismatches = Vec::new();
    let mut n = 0;
    for line in data.lines().filter(|l| !l.is_empty()) {
        let (word, expected) = line.split_once('\t').expect("word<TAB>stem");
        n += 1;
        let got = stem(word);
        if got != expected {
            mismatches.push(format!("{word}: got {got}, want {expected}"));
        }
    }
    assert!(n > 2000, "only {n} vectors");
    assert!(
        mismatches.is_empty(),
        "{} mismatches:\n{}",
        mismatches.len(),
        mismatches.join("\n")
    );
}
