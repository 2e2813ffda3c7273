//! Exercises the C ABI from Rust and from a C program built against the header.

use std::ffi::{c_char, CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use qcprop_ffi::*;

fn cs(s: &str) -> CString {
    CString::new(s).unwrap()
}

unsafe fn take(s: *mut c_char) -> String {
    assert!(!s.is_null());
    let out = CStr::from_ptr(s).to_str().unwrap().to_string();
    qcprop_string_free(s);
    out
}

unsafe fn load(name: &str) -> *mut QcpropFragment {
    let mut f = ptr::null_mut();
    assert_eq!(qcprop_fragment_load(cs(name).as_ptr(), 0, &mut f), QcpropStatus::Ok);
    f
}

unsafe fn diagram(f: *const QcpropFragment, t: &str) -> *mut QcpropDiagram {
    let mut d = ptr::null_mut();
    assert_eq!(qcprop_diagram_parse(f, cs(t).as_ptr(), &mut d), QcpropStatus::Ok);
    d
}

#[test]
fn fragment_lifecycle_and_hash() {
    unsafe {
        let f = load("CNOTdihe");
        assert_eq!(qcprop_fragment_soundness(f), QcpropStatus::Ok);
        let hash = take(qcprop_fragment_content_hash(f));
        assert_eq!(hash, qcprop::fragments::load_fragment("CNOTdihe").unwrap().content_hash);
        qcprop_fragment_free(f);
    }
}

#[test]
fn errors_set_status_and_message() {
    unsafe {
        let mut f = ptr::null_mut();
        assert_eq!(qcprop_fragment_load(cs("Nope").as_ptr(), 0, &mut f), QcpropStatus::Invalid);
        assert!(f.is_null());
        let msg = CStr::from_ptr(qcprop_last_error()).to_str().unwrap();
        assert!(msg.contains("Nope"), "{msg}");
        assert_eq!(qcprop_fragment_load(ptr::null(), 0, &mut f), QcpropStatus::NullArgument);
        assert_eq!(qcprop_fragment_soundness(ptr::null()), QcpropStatus::NullArgument);
        // unsound source text is refused
        let src = cs("(fragment Bad dim 2)\n(generators H S)\n(axiom HS lhs (gen H) rhs (gen S))\n");
        assert_eq!(qcprop_fragment_load(src.as_ptr(), 1, &mut f), QcpropStatus::Negative);
        // a successful call clears the message
        let g = load("Cliff");
        assert!(qcprop_last_error().is_null());
        qcprop_fragment_free(g);
    }
}

#[test]
fn diagrams_normalize_eval_and_derive() {
    unsafe {
        let f = load("Cliff");
        let a = diagram(f, "(seq (gen CNOT) (gen CNOT))");
        let b = diagram(f, "(id 2)");
        let s = diagram(f, "(par (gen S) (gen S))");
        assert_eq!(qcprop_diagram_width(a), 2);
        assert_eq!(take(qcprop_diagram_normal_form(b)), "(id 2)");

        let mut json = ptr::null_mut();
        assert_eq!(qcprop_diagram_eval_json(f, a, &mut json), QcpropStatus::Ok);
        let rows: Vec<Vec<Vec<String>>> = serde_json::from_str(&take(json)).unwrap();
        assert_eq!(rows.len(), 4);
        assert_eq!(rows[3][3][0], "1/1");

        assert_eq!(qcprop_diagram_semantically_equal(f, a, s), QcpropStatus::Negative);
        assert_eq!(qcprop_derive(f, a, s, 12, ptr::null_mut()), QcpropStatus::Negative);
        assert_eq!(qcprop_derive(f, a, b, 2, ptr::null_mut()), QcpropStatus::Budget);
        let mut script = ptr::null_mut();
        assert_eq!(qcprop_derive(f, a, b, 12, &mut script), QcpropStatus::Ok);
        let script = take(script);
        assert_eq!(qcprop_check_derivations(cs(&script).as_ptr()), QcpropStatus::Ok);

        for d in [a, b, s] {
            qcprop_diagram_free(d);
        }
        qcprop_fragment_free(f);
    }
}

#[test]
fn broken_derivation_is_negative() {
    let src = cs("(derivation (fragment Cliff) (initial (gen H)) (step H2 lr 0) (final (gen H)))");
    unsafe {
        assert_eq!(qcprop_check_derivations(src.as_ptr()), QcpropStatus::Negative);
        assert!(!qcprop_last_error().is_null());
    }
}

#[test]
fn run_command_forwards_exit_codes() {
    let args = [cs("closure"), cs("Cliff"), cs("--wires"), cs("2"), cs("--cap"), cs("10")];
    let argv: Vec<*const c_char> = args.iter().map(|a| a.as_ptr()).collect();
    unsafe {
        let mut out = ptr::null_mut();
        assert_eq!(qcprop_run_command(argv.len() as i32, argv.as_ptr(), &mut out), 3);
        assert!(take(out).contains("cap"));
    }
}

fn target_dir() -> PathBuf {
    // tests run from <target>/<profile>/deps
    std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn header_compiles_and_links_from_c() {
    let crate_dir = Path::new(env!("CARGO_MANIFEST_DIR"));
    let header = crate_dir.join("include/qcprop.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for sym in ["qcprop_fragment_load", "qcprop_derive", "QCPROP_STATUS_BUDGET = 3", "typedef struct QcpropFragment QcpropFragment"] {
        assert!(text.contains(sym), "header lacks {sym}");
    }
    let lib = target_dir().join("libqcprop_ffi.a");
    assert!(lib.exists(), "static library not built at {}", lib.display());
    let exe = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("qcprop_smoke");
    let status = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-I"])
        .arg(crate_dir.join("include"))
        .arg(crate_dir.join("tests/c/smoke.c"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .expect("a C compiler is available");
    assert!(status.success(), "C build failed");
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "ok");
}
