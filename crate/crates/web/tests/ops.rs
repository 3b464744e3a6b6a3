use nilnet_web::ops;

#[test]
fn tile_picture_counts() {
    let v = ops::render_tile("heisenberg", 2, "1,3", false).unwrap();
    assert_eq!(v["points"], 64);
    assert!(v["svg"].as_str().unwrap().starts_with("<svg"));
    assert!(ops::render_tile("heisenberg", 9, "1,3", false).is_err());
    assert!(ops::render_tile("filiform", 1, "oblique", false).is_err());
    assert!(ops::render_tile("heisenberg", 1, "1", false).is_err());
}

#[test]
fn quasicrystal_plane_density() {
    let v = ops::quasicrystal("0.6180339887", "1/3", "1/2", 10).unwrap();
    let pts = v["points"].as_array().unwrap();
    assert!(!pts.is_empty() && pts.len() < 21 * 21);
    assert_eq!(v["expected_covolume"], 2.0);
    assert_eq!(v["density"]["entries"].as_array().unwrap().len(), 3);
    assert!(ops::quasicrystal("1/2", "0", "1/2", 0).is_err());
}

#[test]
fn locate_reports_exact_residual() {
    let v = ops::locate("heisenberg-integral", "3/2, -1/3, 7", "1,1,1").unwrap();
    // x = 3/2 rounds up; then z - 2 * (-1/3) = 23/3 rounds to 8
    assert_eq!(v["base"], serde_json::json!(["2", "0", "8"]));
    assert_eq!(v["residual"], serde_json::json!(["-1/2", "-1/3", "-1/3"]));
    assert!(ops::locate("heisenberg", "1,2", "1,1,1").is_err());
}
