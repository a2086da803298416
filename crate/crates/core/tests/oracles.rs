//! Invariant engines against independent oracles.

mod common;

use chiraltop::basespace::{enumerate_cycles, BaseGrid};
use chiraltop::invariants::{chern1, chern2, w2, Framing};
use chiraltop::modelzoo::{build, dirac4d_vector, qwz_vector, sphere_point, ModelSpec};
use chiraltop::policy::NumericPolicy;
use common::*;

fn unit(v: &[f64]) -> Vec<f64> {
    let r = v.iter().map(|a| a * a).sum::<f64>().sqrt();
    v.iter().map(|a| a / r).collect()
}

#[test]
fn oracle_sees_the_sphere_parametrization_as_degree_one() {
    for d in [2, 3, 4] {
        let shape = vec![9; d];
        let g = BaseGrid::sphere(&shape).unwrap();
        let deg = kuhn_degree(&shape, false, &|v| sphere_point(&cube_t(&g, v)), &regular_value(d + 1));
        assert_eq!(deg, 1, "S{d}");
        // a reflection of the first target coordinate reverses orientation
        let flipped = kuhn_degree(
            &shape,
            false,
            &|v| {
                let mut p = sphere_point(&cube_t(&g, v));
                p[1] = -p[1];
                p
            },
            &regular_value(d + 1),
        );
        assert_eq!(flipped, -1, "S{d} reflected");
    }
}

#[test]
fn monopole_c1_matches_solid_angle_flux() {
    let pol = NumericPolicy::default();
    let g = BaseGrid::sphere(&[30, 30]).unwrap();
    let b = build(&ModelSpec::new("dirac_monopole"), &g).unwrap().into_bundle().unwrap();
    let cyc = &enumerate_cycles(&g, 2).unwrap()[0];
    let lattice = chern1(&b, cyc, &pol).unwrap();
    let oracle = berry_flux_chern(&[30, 30], false, &|v| sphere_point(&cube_t(&g, v)));
    assert!((oracle - oracle.round()).abs() < 1e-9);
    assert_eq!(lattice.value, oracle.round() as i64);
    assert_eq!(lattice.value, -1);
}

#[test]
fn qwz_c1_matches_solid_angle_flux() {
    let pol = NumericPolicy::default();
    for m in [-3.0, -1.0, 1.0, 3.0] {
        let g = BaseGrid::torus(&[24, 24]).unwrap();
        let b = build(&ModelSpec::new("qwz").param("M", m), &g).unwrap().into_bundle().unwrap();
        let cyc = &enumerate_cycles(&g, 2).unwrap()[0];
        let oracle = berry_flux_chern(&[24, 24], true, &|v| unit(&qwz_vector(&g.coordinates(g.index(v)), m)));
        assert_eq!(chern1(&b, cyc, &pol).unwrap().value, oracle.round() as i64, "M = {m}");
    }
}

#[test]
fn su2_w2_matches_preimage_degree() {
    let pol = NumericPolicy::default();
    let shape = [16; 3];
    let g = BaseGrid::sphere(&shape).unwrap();
    let cyc = &enumerate_cycles(&g, 3).unwrap()[0];
    for n in [-1i64, 1, 2] {
        let b = build(&ModelSpec::new("su2_degree_n").param("n", n as f64), &g).unwrap().into_bundle().unwrap();
        let oracle = kuhn_degree(&shape, false, &|v| su2_to_quaternion(b.phi_at(g.index(v))), &regular_value(4));
        assert_eq!(oracle, n);
        assert_eq!(w2(&b, cyc, &Framing::Auto, &pol).unwrap().value, oracle, "n = {n}");
    }
}

#[test]
fn dirac4d_c2_matches_degree_of_unit_vector() {
    let pol = NumericPolicy::default();
    let shape = [12; 4];
    let g = BaseGrid::torus(&shape).unwrap();
    let cyc = &enumerate_cycles(&g, 4).unwrap()[0];
    let m = 3.0;
    let b = build(&ModelSpec::new("dirac4d").param("M", m), &g).unwrap().into_bundle().unwrap();
    let oracle = kuhn_degree(&shape, true, &|v| unit(&dirac4d_vector(&g.coordinates(g.index(v)), m)), &regular_value(5));
    assert_eq!(chern2(&b, cyc, &pol).unwrap().value, oracle);
}
