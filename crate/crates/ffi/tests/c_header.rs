//! Compiles and runs a C program against the generated header and the shared library.

use std::path::PathBuf;
use std::process::Command;

const PROGRAM: &str = r#"
#include <stdio.h>
#include "modgraph.h"

int main(void) {
    MgCoefficients *c = NULL;
    MgComplex *x = NULL;
    size_t b = 0;
    if (mg_coefficients_builtin("com-envelope", 3, 0, &c) != MG_STATUS_OK) return 10;
    if (mg_feynman_build(c, 3, 0, &x) != MG_STATUS_OK) return 11;
    if (mg_complex_betti(x, -6, &b) != MG_STATUS_OK) return 12;
    printf("%s %zu\n", mg_version(), b);
    mg_complex_free(x);
    mg_coefficients_free(c);
    if (mg_feynman_build(NULL, 1, 1, &x) != MG_STATUS_NULL_POINTER) return 13;
    char *err = mg_last_error();
    if (err == NULL) return 14;
    mg_string_free(err);
    return 0;
}
"#;

fn cc() -> Option<String> {
    ["cc", "gcc", "clang"]
        .into_iter()
        .find(|c| Command::new(c).arg("--version").output().is_ok_and(|o| o.status.success()))
        .map(str::to_string)
}

#[test]
fn c_program_links_and_runs() {
    let Some(cc) = cc() else {
        eprintln!("no C compiler found; skipping");
        return;
    };
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    // target/<profile>/deps/<test> -> target/<profile>
    let exe = std::env::current_exe().unwrap();
    let libdir = exe.parent().unwrap().parent().unwrap().to_path_buf();
    let so = libdir.join("libmodgraph_ffi.so");
    if !so.exists() {
        eprintln!("{} not built; skipping", so.display());
        return;
    }
    let work = std::env::temp_dir().join(format!("modgraph-ffi-{}", std::process::id()));
    std::fs::create_dir_all(&work).unwrap();
    let src = work.join("main.c");
    std::fs::write(&src, PROGRAM).unwrap();
    let bin = work.join("main");
    let status = Command::new(&cc)
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&src)
        .arg("-o")
        .arg(&bin)
        .arg("-L")
        .arg(&libdir)
        .arg("-lmodgraph_ffi")
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&bin).env("LD_LIBRARY_PATH", &libdir).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status.code());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), format!("{} 1\n", env!("CARGO_PKG_VERSION")));
    let _ = std::fs::remove_dir_all(&work);
}
