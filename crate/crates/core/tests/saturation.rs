use qsl_frontier::config::Tolerances;
use qsl_frontier::frontier::verify_saturation;

fn tol() -> Tolerances {
    Tolerances::default()
}

#[test]
fn eight_qubits_every_block_number() {
    for m in 1..=8 {
        let r = verify_saturation(8, m, 1.0, &tol()).unwrap();
        assert!(r.passed, "m={m}: {:?}", r.checks.iter().filter(|c| !c.passed).collect::<Vec<_>>());
        assert_eq!(r.ent_u, Some(8usize.div_ceil(m)));
    }
}

#[test]
fn single_qubit() {
    let r = verify_saturation(1, 1, 1.0, &tol()).unwrap();
    assert!(r.passed);
    assert!((r.eta.unwrap() - 1.0).abs() <= 1e-9);
    assert_eq!(r.ent_u, Some(1));
    assert_eq!(r.depth_certified, Some(1));
}

#[test]
fn ten_qubits_three_blocks() {
    let r = verify_saturation(10, 3, 1.0, &tol()).unwrap();
    assert!(r.passed);
    assert!((r.eta.unwrap() - 1.0 / 3f64.sqrt()).abs() <= 1e-9);
    assert_eq!(r.ent_u, Some(4));
    assert_eq!(r.depth_certified, Some(4));
}

#[test]
fn design_time_does_not_matter() {
    for t in [0.25, 3.0] {
        let r = verify_saturation(6, 4, t, &tol()).unwrap();
        assert!(r.passed, "T={t}");
        assert!((r.t_design - t).abs() < 1e-15);
    }
}

#[test]
fn oversized_register_rejected() {
    assert!(verify_saturation(13, 1, 1.0, &tol()).is_err());
}
