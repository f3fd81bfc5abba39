use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use grkhs_ffi::*;

fn corpus(name: &str) -> CString {
    let p = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/corpus")
        .join(name);
    CString::new(p.to_str().unwrap()).unwrap()
}

fn last_error() -> String {
    let p = grkhs_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn qubit() -> *mut GrkhsKernel {
    let mut k = ptr::null_mut();
    let s = unsafe { grkhs_kernel_demo_qubit(0.0, 1.0, 1.0, 0.0, 2.0, 0.0, &mut k) };
    assert_eq!(s, GrkhsStatus::Ok);
    k
}

#[test]
fn demo_kernel_values_and_labels() {
    let k = qubit();
    let mut n = 0;
    assert_eq!(unsafe { grkhs_kernel_size(k, &mut n) }, GrkhsStatus::Ok);
    assert_eq!(n, 4);
    let mut v = vec![0.0; 32];
    assert_eq!(
        unsafe { grkhs_kernel_values(k, v.as_mut_ptr(), v.len()) },
        GrkhsStatus::Ok
    );
    let at = |i: usize, j: usize| (v[2 * (4 * i + j)], v[2 * (4 * i + j) + 1]);
    assert_eq!(at(0, 0), (1.0, 0.0));
    assert_eq!(at(0, 1), (0.0, -2.0));
    assert_eq!(at(1, 0), (0.0, 2.0));
    assert_eq!(at(3, 3), (4.0, 0.0));
    assert_eq!(at(0, 2), (0.0, 0.0));

    let mut buf = [0 as std::ffi::c_char; 8];
    let mut needed = 0;
    assert_eq!(
        unsafe { grkhs_kernel_label(k, 2, buf.as_mut_ptr(), buf.len(), &mut needed) },
        GrkhsStatus::Ok
    );
    assert_eq!(
        unsafe { CStr::from_ptr(buf.as_ptr()) }.to_str().unwrap(),
        "(-,+)"
    );
    assert_eq!(needed, 6);
    assert_eq!(
        unsafe { grkhs_kernel_label(k, 2, buf.as_mut_ptr(), 3, &mut needed) },
        GrkhsStatus::BufferTooSmall
    );
    unsafe { grkhs_kernel_free(k) };
}

#[test]
fn checks_and_rkhs() {
    let k = qubit();
    let (mut passed, mut x) = (false, f64::NAN);
    assert_eq!(
        unsafe { grkhs_kernel_check_psd(k, 1e-9, &mut passed, &mut x) },
        GrkhsStatus::Ok
    );
    assert!(passed && x.abs() < 1e-12);
    assert_eq!(
        unsafe { grkhs_kernel_check_invariance(k, 1e-12, &mut passed, &mut x) },
        GrkhsStatus::Ok
    );
    assert!(passed);
    assert_eq!(
        unsafe { grkhs_kernel_round_trip(k, 1e-9, &mut passed, &mut x) },
        GrkhsStatus::Ok
    );
    assert!(passed && x <= 1e-9);

    let mut r = ptr::null_mut();
    assert_eq!(
        unsafe { grkhs_rkhs_build(k, 1e-10, &mut r) },
        GrkhsStatus::Ok
    );
    let mut rank = 0;
    assert_eq!(unsafe { grkhs_rkhs_rank(r, &mut rank) }, GrkhsStatus::Ok);
    assert_eq!(rank, 2);
    let (mut ranks, mut count) = ([0usize; 4], 0);
    assert_eq!(
        unsafe { grkhs_rkhs_fiber_ranks(r, ranks.as_mut_ptr(), ranks.len(), &mut count) },
        GrkhsStatus::Ok
    );
    assert_eq!(&ranks[..count], &[1, 1]);
    assert_eq!(
        unsafe { grkhs_rkhs_parseval_check(r, 1e-9, &mut passed, &mut x) },
        GrkhsStatus::Ok
    );
    assert!(passed);
    unsafe {
        grkhs_rkhs_free(r);
        grkhs_kernel_free(k);
    }
}

#[test]
fn distances_and_tours() {
    let k = qubit();
    let mut d = vec![0.0; 16];
    assert_eq!(
        unsafe { grkhs_kernel_distance_matrix(k, d.as_mut_ptr(), d.len()) },
        GrkhsStatus::Ok
    );
    for i in 0..4 {
        assert_eq!(d[5 * i], 0.0);
        for j in 0..4 {
            assert_eq!(d[4 * i + j], d[4 * j + i]);
        }
    }
    // ε(+) and α live in different fibers: d² = K(ε+,ε+) + K(α,α) = 2.
    assert!((d[2] - 2f64.sqrt()).abs() < 1e-12);
    let (mut order, mut exact, mut heur) = ([0usize; 4], 0.0, 0.0);
    assert_eq!(
        unsafe { grkhs_kernel_tsp(k, true, 0, 0, order.as_mut_ptr(), 4, &mut exact) },
        GrkhsStatus::Ok
    );
    assert_eq!(order[0], 0);
    assert_eq!(
        unsafe { grkhs_kernel_tsp(k, false, 3, 42, order.as_mut_ptr(), 4, &mut heur) },
        GrkhsStatus::Ok
    );
    assert!(heur >= exact - 1e-12);
    assert_eq!(
        unsafe { grkhs_kernel_tsp(k, true, 0, 0, order.as_mut_ptr(), 2, ptr::null_mut()) },
        GrkhsStatus::BufferTooSmall
    );
    unsafe { grkhs_kernel_free(k) };
}

#[test]
fn project_handles() {
    let mut p = ptr::null_mut();
    assert_eq!(
        unsafe { grkhs_project_load(corpus("z3.json").as_ptr(), &mut p) },
        GrkhsStatus::Ok
    );
    let mut count = 0;
    assert_eq!(
        unsafe { grkhs_project_kernel_count(p, &mut count) },
        GrkhsStatus::Ok
    );
    assert!(count >= 3);

    let mut k = ptr::null_mut();
    let id = CString::new("identity").unwrap();
    assert_eq!(
        unsafe { grkhs_project_kernel(p, id.as_ptr(), &mut k) },
        GrkhsStatus::Ok
    );
    let mut v = vec![0.0; 18];
    assert_eq!(
        unsafe { grkhs_kernel_values(k, v.as_mut_ptr(), v.len()) },
        GrkhsStatus::Ok
    );
    for i in 0..3 {
        for j in 0..3 {
            assert_eq!(v[2 * (3 * i + j)], if i == j { 1.0 } else { 0.0 });
        }
    }
    unsafe { grkhs_kernel_free(k) };

    let (rep, field) = (
        CString::new("left_regular").unwrap(),
        CString::new("v_reg").unwrap(),
    );
    let mut built = ptr::null_mut();
    assert_eq!(
        unsafe { grkhs_project_build_kernel(p, rep.as_ptr(), field.as_ptr(), &mut built) },
        GrkhsStatus::Ok
    );
    let mut passed = false;
    assert_eq!(
        unsafe { grkhs_kernel_check_invariance(built, 1e-12, &mut passed, ptr::null_mut()) },
        GrkhsStatus::Ok
    );
    assert!(passed);
    unsafe { grkhs_kernel_free(built) };

    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("z3.json");
    let out_c = CString::new(out.to_str().unwrap()).unwrap();
    assert_eq!(
        unsafe { grkhs_project_save(p, out_c.as_ptr()) },
        GrkhsStatus::Ok
    );
    let original = std::fs::read_to_string(corpus("z3.json").to_str().unwrap()).unwrap();
    assert_eq!(std::fs::read_to_string(&out).unwrap(), original);
    unsafe { grkhs_project_free(p) };
}

#[test]
fn errors_carry_status_and_message() {
    let mut p = ptr::null_mut();
    let bad = CString::new("/no/such/file.json").unwrap();
    assert_eq!(
        unsafe { grkhs_project_load(bad.as_ptr(), &mut p) },
        GrkhsStatus::Io
    );
    assert!(p.is_null());
    assert!(!last_error().is_empty());

    let text = CString::new(r#"{"format_version": 1, "extra": true}"#).unwrap();
    assert_eq!(
        unsafe { grkhs_project_from_json(text.as_ptr(), &mut p) },
        GrkhsStatus::Schema
    );
    assert!(last_error().contains("extra"));

    assert_eq!(
        unsafe { grkhs_project_load(ptr::null(), &mut p) },
        GrkhsStatus::NullPointer
    );
    let mut k = ptr::null_mut();
    assert_eq!(
        unsafe { grkhs_kernel_demo_qubit(2.0, 0.0, 1.0, 0.0, 1.0, 0.0, &mut k) },
        GrkhsStatus::InvalidArgument
    );
    assert!(k.is_null());
    assert!(last_error().contains('λ'));

    let k = qubit();
    assert!(grkhs_last_error_message().is_null());
    let mut n = 0;
    assert_eq!(
        unsafe { grkhs_kernel_size(ptr::null(), &mut n) },
        GrkhsStatus::NullPointer
    );
    unsafe {
        grkhs_kernel_free(k);
        grkhs_kernel_free(ptr::null_mut());
        grkhs_project_free(ptr::null_mut());
        grkhs_rkhs_free(ptr::null_mut());
    }
}

#[test]
fn version_matches_crate() {
    let v = unsafe { CStr::from_ptr(grkhs_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_every_export() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR"));
    let header = std::fs::read_to_string(root.join("include/grkhs.h")).unwrap();
    let source = std::fs::read_to_string(root.join("src/lib.rs")).unwrap();
    let exports: Vec<&str> = source
        .lines()
        .filter_map(|l| l.split("extern \"C\" fn ").nth(1))
        .map(|rest| rest.split('(').next().unwrap())
        .collect();
    assert!(exports.len() > 15);
    for name in exports {
        assert!(
            header.contains(&format!("{name}(")),
            "{name} missing from header"
        );
    }
    for item in [
        "typedef struct GrkhsProject GrkhsProject;",
        "GRKHS_STATUS_OK = 0",
        "#ifndef GRKHS_H",
    ] {
        assert!(header.contains(item), "{item}");
    }
}

fn target_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn c_program_links_against_the_static_library() {
    let lib = target_dir().join("libgrkhs_ffi.a");
    if !lib.exists() || Command::new("cc").arg("--version").output().is_err() {
        eprintln!(
            "skipping: no C compiler or static library at {}",
            lib.display()
        );
        return;
    }
    let root = Path::new(env!("CARGO_MANIFEST_DIR"));
    let dir = tempfile::tempdir().unwrap();
    let exe = dir.path().join("smoke");
    let status = Command::new("cc")
        .arg("-std=c11")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(root.join("include"))
        .arg(root.join("tests/c/smoke.c"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success(), "C compilation failed");
    let out = Command::new(&exe)
        .arg(corpus("z4.json").to_str().unwrap())
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}{}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("ok "));
}
