use std::ffi::{c_char, CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use packinglab_ffi::*;

fn fixture(name: &str) -> CString {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name);
    CString::new(std::fs::read_to_string(path).unwrap()).unwrap()
}

unsafe fn take(s: *mut c_char) -> String {
    assert!(!s.is_null());
    let out = CStr::from_ptr(s).to_str().unwrap().to_owned();
    pl_string_free(s);
    out
}

unsafe fn last_error() -> String {
    CStr::from_ptr(pl_last_error()).to_str().unwrap().to_owned()
}

#[test]
fn apollonian_round_trip() {
    unsafe {
        let mut sys = ptr::null_mut();
        assert_eq!(pl_system_parse(fixture("apollonian.json").as_ptr(), &mut sys), PlStatus::Ok);
        assert_eq!(pl_system_wall_count(sys), 8);

        let mut p = ptr::null_mut();
        let bound = CString::new("15").unwrap();
        assert_eq!(pl_orbit(sys, bound.as_ptr(), 100, 0, 2, &mut p), PlStatus::Ok);
        assert_eq!(pl_packing_len(p), 19);
        assert_eq!(pl_packing_saturated(p), 1);
        let mut s = ptr::null_mut();
        assert_eq!(pl_packing_bend(p, 0, &mut s), PlStatus::Ok);
        assert_eq!(take(s), "-1");
        assert_eq!(pl_packing_bend(p, 19, &mut s), PlStatus::OutOfRange);
        assert!(last_error().contains("19"));

        let mut integral = -1;
        assert_eq!(pl_certify(p, &mut integral), PlStatus::Ok);
        assert_eq!(integral, 1);

        assert_eq!(pl_packing_to_json(p, &mut s), PlStatus::Ok);
        let json = CString::new(take(s)).unwrap();
        let mut q = ptr::null_mut();
        assert_eq!(pl_packing_parse(json.as_ptr(), &mut q), PlStatus::Ok);
        assert_eq!(pl_packing_len(q), 19);

        assert_eq!(pl_render_svg(q, 300, 0.0, 1, &mut s), PlStatus::Ok);
        let svg = take(s);
        assert_eq!(svg.matches("<circle").count(), 19);

        assert_eq!(pl_residues(sys, 24, &mut s), PlStatus::Ok);
        assert_eq!(take(s), "[2,3,6,11,14,15,18,23]");

        pl_packing_free(q);
        pl_packing_free(p);
        pl_system_free(sys);
    }
}

#[test]
fn gram_queries() {
    unsafe {
        let mut g = ptr::null_mut();
        assert_eq!(pl_gram_parse(fixture("hexpyr.gram.json").as_ptr(), &mut g), PlStatus::Ok);
        assert_eq!(pl_gram_size(g), 14);
        let mut s = ptr::null_mut();
        assert_eq!(pl_gram_entry(g, 0, 13, &mut s), PlStatus::Ok);
        assert_eq!(take(s), "2/3*sqrt(3)");
        assert_eq!(pl_gram_entry(g, 0, 14, &mut s), PlStatus::OutOfRange);
        assert_eq!(pl_vinberg(g, 8, &mut s), PlStatus::Ok);
        assert_eq!(take(s), r#"{"cycle":[1,14],"product":"16/3","verdict":"NonArithmetic"}"#);
        assert_eq!(pl_gram_to_json(g, &mut s), PlStatus::Ok);
        assert!(take(s).starts_with(r#"{"format":1,"gram":[["-1","#));
        pl_gram_free(g);

        assert_eq!(pl_gram_from_diagram(fixture("eisenstein.cox").as_ptr(), &mut g), PlStatus::Ok);
        assert_eq!(pl_decompose(g, &mut s), PlStatus::Ok);
        assert_eq!(
            take(s),
            r#"[{"cluster":[1],"cocluster":[2,3,4,5]},{"cluster":[3],"cocluster":[1,2,4,5]}]"#
        );
        pl_gram_free(g);
    }
}

#[test]
fn geometrize_tetrahedron() {
    unsafe {
        let mut sys = ptr::null_mut();
        assert_eq!(pl_geometrize(fixture("tetrahedron.target.json").as_ptr(), 0, 64, 0, &mut sys), PlStatus::Ok);
        assert_eq!(pl_system_wall_count(sys), 8);
        let mut s = ptr::null_mut();
        assert_eq!(pl_system_to_json(sys, &mut s), PlStatus::Ok);
        assert!(take(s).contains("\"cluster\""));
        let mut g = ptr::null_mut();
        assert_eq!(pl_system_gram(sys, &mut g), PlStatus::Ok);
        assert_eq!(pl_gram_size(g), 8);
        pl_gram_free(g);
        pl_system_free(sys);
    }
}

#[test]
fn errors_are_reported() {
    unsafe {
        let mut sys = ptr::null_mut();
        assert_eq!(pl_system_parse(ptr::null(), &mut sys), PlStatus::NullPointer);
        let bad = CString::new("{\"format\": 2}").unwrap();
        assert_eq!(pl_system_parse(bad.as_ptr(), &mut sys), PlStatus::Parse);
        assert!(sys.is_null());
        assert!(!last_error().is_empty());

        let invalid = [0xffu8, 0];
        assert_eq!(pl_system_parse(invalid.as_ptr().cast(), &mut sys), PlStatus::InvalidUtf8);

        let cox = CString::new("1 2 angle 2\n").unwrap();
        let mut g = ptr::null_mut();
        assert_eq!(pl_gram_from_diagram(cox.as_ptr(), &mut g), PlStatus::Parse);
        assert!(last_error().starts_with("BadMultiplicity"));

        assert_eq!(pl_system_parse(fixture("hexpyr.json").as_ptr(), &mut sys), PlStatus::Ok);
        let mut s = ptr::null_mut();
        assert_eq!(pl_residues(sys, 24, &mut s), PlStatus::Singular);
        assert_eq!(pl_system_to_json(sys, ptr::null_mut()), PlStatus::NullPointer);
        assert_eq!(pl_system_wall_count(ptr::null()), 0);
        pl_system_free(sys);
        pl_system_free(ptr::null_mut());
        pl_string_free(ptr::null_mut());

        let ok = CString::new("vertices 2\n").unwrap();
        assert_eq!(pl_gram_from_diagram(ok.as_ptr(), &mut g), PlStatus::Ok);
        assert!(last_error().is_empty());
        pl_gram_free(g);
        assert!(!CStr::from_ptr(pl_version()).to_bytes().is_empty());
    }
}

/// Compiles a small C program against the generated header and the static
/// library, then runs it.
#[test]
fn header_compiles_and_links() {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let exe = std::env::current_exe().unwrap();
    let lib_dir = exe.parent().and_then(|d| d.parent()).unwrap().to_path_buf();
    let lib = lib_dir.join("libpackinglab_ffi.a");
    if !lib.exists() || Command::new("cc").arg("--version").output().is_err() {
        eprintln!("skipping: no static library or C compiler");
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    std::fs::write(
        &src,
        r#"#include <stdio.h>
#include <string.h>
#include "packinglab.h"

int main(void) {
    const char *cox = "vertices 6\n1 2 tangent\n3 4 tangent\n2 5 angle 3\n2 6 angle 4\n3 6 disjoint\n4 5 disjoint\n";
    PlGram *g = NULL;
    if (pl_gram_from_diagram(cox, &g) != PL_STATUS_OK) return 1;
    char *out = NULL;
    if (pl_decompose(g, &out) != PL_STATUS_OK) return 2;
    int found = strstr(out, "{\"cluster\":[1],") != NULL;
    pl_string_free(out);
    pl_gram_free(g);
    if (pl_gram_from_diagram("1 2 angle 1\n", &g) != PL_STATUS_PARSE) return 3;
    printf("%s\n", pl_last_error());
    return found ? 0 : 4;
}
"#,
    )
    .unwrap();
    let bin = dir.path().join("main");
    let status = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(root.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status.code());
    assert!(String::from_utf8_lossy(&out.stdout).contains("BadMultiplicity"));
}
