use std::ffi::{CStr, CString};
use std::ptr;

use modgraph_ffi::*;

fn cstr(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    let p = mg_last_error();
    assert!(!p.is_null());
    let s = unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string();
    unsafe { mg_string_free(p) };
    s
}

#[test]
fn genus_one_commutative_through_the_abi() {
    unsafe {
        let mut c = ptr::null_mut();
        assert_eq!(mg_coefficients_builtin(cstr("com-envelope").as_ptr(), 1, 4, &mut c), MgStatus::Ok);
        let mut x = ptr::null_mut();
        assert_eq!(mg_feynman_build(c, 1, 4, &mut x), MgStatus::Ok);
        let (mut lo, mut hi) = (0i64, 0i64);
        assert_eq!(mg_complex_degree_range(x, &mut lo, &mut hi), MgStatus::Ok);
        assert_eq!((lo, hi), (-4, 0));
        let mut b = 0usize;
        assert_eq!(mg_complex_betti(x, -4, &mut b), MgStatus::Ok);
        assert_eq!(b, 3);
        let mut chi = 0i64;
        assert_eq!(mg_complex_euler(x, &mut chi), MgStatus::Ok);
        assert_eq!(chi, 3);
        let mut s = ptr::null_mut();
        assert_eq!(mg_complex_dump_json(x, &mut s), MgStatus::Ok);
        assert!(CStr::from_ptr(s).to_str().unwrap().contains("\"differential\""));
        mg_string_free(s);
        mg_complex_free(x);
        mg_coefficients_free(c);
    }
}

#[test]
fn errors_are_reported() {
    unsafe {
        let mut c = ptr::null_mut();
        assert_eq!(mg_coefficients_builtin(cstr("nope").as_ptr(), 1, 1, &mut c), MgStatus::InvalidArgument);
        assert!(last_error().contains("nope"));
        assert_eq!(mg_coefficients_builtin(ptr::null(), 1, 1, &mut c), MgStatus::NullPointer);
        assert_eq!(mg_coefficients_builtin(cstr("com-envelope").as_ptr(), 1, 3, ptr::null_mut()), MgStatus::NullPointer);
        assert_eq!(mg_coefficients_builtin(cstr("com-envelope").as_ptr(), 1, 3, &mut c), MgStatus::Ok);
        let mut x = ptr::null_mut();
        assert_eq!(mg_feynman_build(c, 0, 2, &mut x), MgStatus::InvalidArgument);
        assert_eq!(mg_feynman_build(c, 2, 1, &mut x), MgStatus::ComputationFailed);
        assert!(x.is_null());
        mg_coefficients_free(c);
        let bad = [0xffu8, 0];
        let mut g = ptr::null_mut();
        assert_eq!(mg_graph_new(bad.as_ptr().cast(), &mut g), MgStatus::InvalidUtf8);
    }
}

#[test]
fn graph_checks() {
    unsafe {
        let mut g = ptr::null_mut();
        assert_eq!(mg_graph_new(cstr("bouquet:3").as_ptr(), &mut g), MgStatus::Ok);
        let (mut iso, mut full) = (false, 0usize);
        assert_eq!(mg_polytope_verify(g, &mut iso, &mut full), MgStatus::Ok);
        assert!(iso);
        assert_eq!(full, 6);
        let mut ok = false;
        assert_eq!(mg_fiber_verify(g, &mut ok), MgStatus::Ok);
        assert!(ok);
        let mut e = 0usize;
        assert_eq!(mg_graph_num_edges(g, &mut e), MgStatus::Ok);
        assert_eq!(e, 3);
        mg_graph_free(g);
    }
}

#[test]
fn json_coefficients_round_trip() {
    let data = modgraph::coefficients::lie_system(5).unwrap().oddify();
    let json = cstr(&data.to_json());
    unsafe {
        let mut c = ptr::null_mut();
        assert_eq!(mg_coefficients_from_json(json.as_ptr(), &mut c), MgStatus::Ok);
        let mut x = ptr::null_mut();
        assert_eq!(mg_feynman_build(c, 1, 3, &mut x), MgStatus::Ok);
        let mut b = 0;
        assert_eq!(mg_complex_betti(x, -6, &mut b), MgStatus::Ok);
        assert_eq!(b, 1);
        mg_complex_free(x);
        mg_coefficients_free(c);
        assert_eq!(mg_coefficients_from_json(cstr("{").as_ptr(), &mut c), MgStatus::InvalidArgument);
    }
}
