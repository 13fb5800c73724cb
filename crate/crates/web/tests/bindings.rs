use serde_json::Value;

use bswet_web::{allocate_pair_json, energy_curve_json, waterfill_json};

fn parse(s: &str) -> Value {
    serde_json::from_str(s).unwrap()
}

#[test]
fn curve_has_optimum_and_baselines() {
    let v = parse(&energy_curve_json(4, 6.0, -90.0, 0.8, 200).unwrap());
    let q = v["q"].as_array().unwrap();
    assert_eq!(q.len(), 200);
    assert_eq!(v["exact"].as_array().unwrap().len(), 200);
    assert!((v["q_star"].as_f64().unwrap() - 9.2).abs() < 0.5);
    assert!((v["perfect_csi"].as_f64().unwrap() - 2.963e-3).abs() < 1e-5);
    assert_eq!(v["exact"][0].as_f64().unwrap(), v["omni"].as_f64().unwrap());
}

#[test]
fn pair_returns_both_objectives() {
    let v = parse(&allocate_pair_json(4, 4.0, 6.0, 0.3, -90.0).unwrap());
    assert_eq!(v[0]["objective"], "weighted-sum");
    assert_eq!(v[0]["xi"][0].as_f64().unwrap(), 1.0);
    let pfe_xi = v[1]["xi"][0].as_f64().unwrap();
    assert!(pfe_xi > 0.5 && pfe_xi < 0.6);
}

#[test]
fn waterfill_split_sums_to_one() {
    let v = parse(&waterfill_json("3, 5, 12", 8, 5.0, -90.0).unwrap());
    let xi: Vec<f64> = v["xi"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert!((xi.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    assert!(xi[0] > xi[1]);
    assert_eq!(v["breakpoints"].as_array().unwrap().len(), 3);
}

#[test]
fn bad_input_is_an_error_message() {
    assert!(energy_curve_json(0, 6.0, -90.0, 0.8, 10).unwrap_err().contains("antennas"));
    assert!(waterfill_json("3, x", 4, 5.0, -90.0).unwrap_err().contains("x"));
    assert!(waterfill_json("3, 4", 4, 0.0, -90.0).is_err());
    assert!(allocate_pair_json(4, -1.0, 6.0, 0.3, -90.0).is_err());
}
