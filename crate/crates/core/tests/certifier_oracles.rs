use orelat_core::certifier::{
    certify_index, certify_scenario, factor_products, lemma_check_all, ChainScenario, ChainType, Verdict,
};

fn threes(k: usize, rest: &[u64]) -> ChainType {
    let mut v = vec![3; k];
    v.extend_from_slice(rest);
    ChainType::new(v)
}

#[test]
fn every_scan_passes_from_one_coatom() {
    let all = lemma_check_all(1).unwrap();
    assert_eq!(all.len(), 220 * 6);
    let failures: Vec<_> = all.iter().filter(|r| !r.pass).collect();
    assert!(failures.is_empty(), "{failures:?}");
}

#[test]
fn scans_from_zero_coatoms_fail_somewhere() {
    let failures = lemma_check_all(0).unwrap().into_iter().filter(|r| !r.pass).count();
    assert_eq!(failures, 318);
}

#[test]
fn seven_factor_indices() {
    let list = factor_products(10125, 3, 7);
    let mut undecided = Vec::new();
    for f in &list {
        let cert = certify_index(f.n).unwrap();
        if cert.verdict == Verdict::Undecided {
            undecided.push(f.n);
        }
    }
    assert_eq!(undecided, vec![8748, 9720]);
}

#[test]
fn gap_at_8748_is_one_combination() {
    let cert = certify_index(8748).unwrap();
    let rank7 = cert.ranks.iter().find(|r| r.rank == 7).unwrap();
    assert_eq!(rank7.undecided, vec![vec!["(3^6,12)".to_string(), "(3^5,4,9)".to_string()]]);
    let rank8 = cert.ranks.iter().find(|r| r.rank == 8).unwrap();
    assert!(rank8.undecided.is_empty());
}

#[test]
fn all_types_of_8748_together_are_settled() {
    let scenario = ChainScenario::new(vec![threes(6, &[12]), threes(5, &[4, 9]), threes(5, &[6, 6])]).unwrap();
    assert!(certify_scenario(&scenario).unwrap().is_primitive());
}

#[test]
fn generalized_split_for_9072() {
    let scenario = ChainScenario::new(vec![threes(4, &[4, 4, 7])]).unwrap();
    let cert = certify_scenario(&scenario).unwrap();
    assert!(cert.is_primitive());
    let ev = cert.deciding_evidence().unwrap();
    assert_eq!(ev["method"], "coatom-split-recursion");
    assert_eq!(ev["dual_totient_min"], "572");
    assert_eq!(ev["dual_totient_max"], "872");
}

#[test]
fn rank_two_table_over_catalog() {
    use orelat_core::certifier::rank2_index_table;
    let table = rank2_index_table(32).unwrap();
    let bad: Vec<_> = table.iter().filter(|e| !e.consistent).collect();
    assert!(bad.is_empty(), "{bad:?}");
    let psl: Vec<_> = table
        .iter()
        .filter(|e| e.group == "PSL(2,7)" && e.top_order == 168 && e.quadruple[0] == 7)
        .map(|e| (e.bottom_order, e.quadruple))
        .collect();
    assert!(psl.contains(&(8, [7, 7, 3, 3])));
    assert!(psl.contains(&(6, [7, 7, 4, 4])));
}
