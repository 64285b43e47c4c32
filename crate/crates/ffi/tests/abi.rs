//! Exercises the exported functions through their C signatures.

use std::ffi::{CStr, CString};
use std::ptr;

use entrank_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(er_last_error()) }
        .to_string_lossy()
        .into_owned()
}

fn tol() -> ErTolerance {
    er_tolerance_default()
}

struct Owned(*mut ErState);

impl Drop for Owned {
    fn drop(&mut self) {
        unsafe { er_state_free(self.0) };
    }
}

fn ghz(n: usize) -> Owned {
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { er_state_ghz(n, 2, &mut s) }, ErStatus::Ok);
    Owned(s)
}

fn analysis(state: &Owned, depth: usize) -> ErAnalysis {
    let mut out = ErAnalysis {
        verdict: ErVerdict::Inconclusive,
        state_rank: 0,
        depth: 0,
        num_violations: 0,
    };
    assert_eq!(
        unsafe { er_analyze(state.0, depth, tol(), &mut out) },
        ErStatus::Ok,
        "{}",
        last_error()
    );
    out
}

#[test]
fn ghz_analysis_and_ranks() {
    let s = ghz(4);
    let mut n = 0;
    assert_eq!(unsafe { er_state_num_particles(s.0, &mut n) }, ErStatus::Ok);
    assert_eq!(n, 4);

    let a = analysis(&s, 0);
    assert_eq!(a.verdict, ErVerdict::Entangled);
    assert_eq!((a.state_rank, a.depth, a.num_violations), (1, 2, 4));

    let mut rank = 0;
    let keep = [1usize, 3];
    assert_eq!(
        unsafe { er_reduced_rank(s.0, keep.as_ptr(), keep.len(), tol(), &mut rank) },
        ErStatus::Ok
    );
    assert_eq!(rank, 2);
}

#[test]
fn werner_ppt_and_partition() {
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { er_state_werner(0.6, &mut s) }, ErStatus::Ok);
    let s = Owned(s);
    assert_eq!(analysis(&s, 1).verdict, ErVerdict::Inconclusive);

    let mut min = 0.0;
    let part = [1usize];
    assert_eq!(
        unsafe { er_ppt_min_eigenvalue(s.0, part.as_ptr(), 1, &mut min) },
        ErStatus::Ok
    );
    assert!((min + 0.2).abs() < 1e-12);

    let expr = CString::new("1|2").unwrap();
    let mut verdict = ErVerdict::Entangled;
    assert_eq!(
        unsafe { er_check_partition(s.0, expr.as_ptr(), tol(), &mut verdict) },
        ErStatus::Ok
    );
    assert_eq!(verdict, ErVerdict::Inconclusive);
}

#[test]
fn six_qubit_example_factorization() {
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { er_state_six_qubit_example(&mut s) }, ErStatus::Ok);
    let s = Owned(s);
    let mut f = ptr::null_mut();
    assert_eq!(unsafe { er_factorize(s.0, tol(), &mut f) }, ErStatus::Ok);

    let mut parts = 0;
    assert_eq!(unsafe { er_factorization_num_parts(f, &mut parts) }, ErStatus::Ok);
    let mut found = Vec::new();
    for i in 0..parts {
        let mut buf = [0usize; 6];
        let mut len = 0;
        assert_eq!(
            unsafe { er_factorization_part(f, i, buf.as_mut_ptr(), buf.len(), &mut len) },
            ErStatus::Ok
        );
        let mut fully = false;
        assert_eq!(
            unsafe { er_factorization_part_fully_entangled(f, i, &mut fully) },
            ErStatus::Ok
        );
        assert_eq!(fully, len > 1);
        found.push(buf[..len].to_vec());
    }
    assert_eq!(found, vec![vec![1], vec![2, 3], vec![4, 5, 6]]);

    let mut small = [0usize; 1];
    let mut len = 0;
    assert_eq!(
        unsafe { er_factorization_part(f, 2, small.as_mut_ptr(), 1, &mut len) },
        ErStatus::InputError
    );
    assert_eq!(len, 3);

    let mut residual = 1.0;
    assert_eq!(unsafe { er_factorization_residual(f, &mut residual) }, ErStatus::Ok);
    assert!(residual <= 1e-8);
    unsafe { er_factorization_free(f) };
}

#[test]
fn states_from_raw_arrays() {
    let dims = [2usize, 2];
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let re = [h, 0.0, 0.0, h];
    let im = [0.0; 4];
    let mut s = ptr::null_mut();
    assert_eq!(
        unsafe { er_state_from_amplitudes(dims.as_ptr(), 2, re.as_ptr(), im.as_ptr(), 4, &mut s) },
        ErStatus::Ok
    );
    let s = Owned(s);
    assert_eq!(analysis(&s, 1).verdict, ErVerdict::Entangled);

    let mut re = [0.0; 16];
    re[0] = 0.5;
    re[15] = 0.5;
    let im = [0.0; 16];
    let mut m = ptr::null_mut();
    assert_eq!(
        unsafe { er_state_from_density(dims.as_ptr(), 2, re.as_ptr(), im.as_ptr(), 16, &mut m) },
        ErStatus::Ok
    );
    let m = Owned(m);
    let a = analysis(&m, 1);
    assert_eq!((a.verdict, a.state_rank), (ErVerdict::Inconclusive, 2));

    let mut f = ptr::null_mut();
    assert_eq!(unsafe { er_factorize(m.0, tol(), &mut f) }, ErStatus::InputError);
    assert!(f.is_null());
    assert!(last_error().contains("pure"));
}

#[test]
fn errors_map_to_status_codes() {
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { er_state_ghz(2, 2, ptr::null_mut()) }, ErStatus::NullPointer);
    assert_eq!(unsafe { er_state_ghz(1, 2, &mut s) }, ErStatus::InputError);
    assert!(s.is_null());
    assert_eq!(unsafe { er_state_ghz(13, 2, &mut s) }, ErStatus::LimitExceeded);
    assert!(!last_error().is_empty());
    assert_eq!(unsafe { er_state_werner(1.5, &mut s) }, ErStatus::InputError);

    let dims = [2usize];
    let re = [0.6, 0.0];
    let im = [0.0, 0.0];
    assert_eq!(
        unsafe { er_state_from_amplitudes(dims.as_ptr(), 1, re.as_ptr(), im.as_ptr(), 2, &mut s) },
        ErStatus::InputError
    );

    let path = CString::new("/nonexistent/state.json").unwrap();
    assert_eq!(unsafe { er_state_load(path.as_ptr(), &mut s) }, ErStatus::InputError);

    let g = ghz(3);
    let bad = [4usize];
    let mut rank = 0;
    assert_eq!(
        unsafe { er_reduced_rank(g.0, bad.as_ptr(), 1, tol(), &mut rank) },
        ErStatus::InputError
    );
    let negative = ErTolerance { rtol: -1.0, atol: 0.0 };
    let mut out = ErAnalysis {
        verdict: ErVerdict::Inconclusive,
        state_rank: 0,
        depth: 0,
        num_violations: 0,
    };
    assert_eq!(unsafe { er_analyze(g.0, 1, negative, &mut out) }, ErStatus::InputError);
    assert_eq!(unsafe { er_analyze(g.0, 3, tol(), &mut out) }, ErStatus::InputError);
    assert_eq!(
        unsafe { er_analyze(ptr::null(), 1, tol(), &mut out) },
        ErStatus::NullPointer
    );

    assert_eq!(analysis(&g, 1).verdict, ErVerdict::Entangled);
    assert!(last_error().is_empty());
    unsafe {
        er_state_free(ptr::null_mut());
        er_factorization_free(ptr::null_mut());
    }
}

#[test]
fn load_from_file() {
    let dir = std::env::temp_dir().join(format!("entrank-ffi-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bell.json");
    std::fs::write(
        &path,
        r#"{"format_version":"1.0","dims":[2,2],"kind":"pure","amplitudes":[
            {"index":[0,0],"re":0.7071067811865476,"im":0.0},
            {"index":[1,1],"re":0.7071067811865476,"im":0.0}]}"#,
    )
    .unwrap();
    let c_path = CString::new(path.to_str().unwrap()).unwrap();
    let mut s = ptr::null_mut();
    assert_eq!(
        unsafe { er_state_load(c_path.as_ptr(), &mut s) },
        ErStatus::Ok,
        "{}",
        last_error()
    );
    let s = Owned(s);
    assert_eq!(analysis(&s, 1).verdict, ErVerdict::Entangled);
    std::fs::remove_dir_all(&dir).unwrap();
}
