use std::path::PathBuf;

use bswet_core::allocator::{solve_single_er, solve_wse};
use bswet_core::config::load_scenario;
use bswet_core::experiments::two_er_template;

fn file(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name)
}

#[test]
fn shipped_scenarios_load() {
    for name in ["single_er.toml", "two_er.toml", "two_er_reflective.toml"] {
        load_scenario(file(name)).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
}

#[test]
fn single_er_file_reproduces_optimum() {
    let s = load_scenario(file("single_er.toml")).unwrap();
    let q = solve_single_er(&s).unwrap().allocation.q;
    assert!((q - 9.2).abs() / 9.2 < 0.05);
}

#[test]
fn two_er_file_matches_builtin_template() {
    let s = load_scenario(file("two_er.toml")).unwrap();
    let t = two_er_template();
    for k in 0..2 {
        assert!((s.beta(k) - t.beta(k)).abs() < 1e-18);
        assert_eq!(s.theta(k), t.theta(k));
    }
    assert_eq!(solve_wse(&s).unwrap().allocation, solve_wse(&t).unwrap().allocation);
}

#[test]
fn missing_file_is_a_parse_error() {
    assert!(load_scenario(file("does_not_exist.toml")).is_err());
}
