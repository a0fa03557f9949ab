use std::path::{Path, PathBuf};
use std::process::Command;

const PROGRAM: &str = r#"
#include <stdio.h>
#include <string.h>
#include "qlsc.h"

int main(void) {
    QlscState *s = NULL;
    if (qlsc_state_prepare(2, QLSC_LAYOUT_STAIRCASE, 1, QLSC_CHANNEL_LOCAL_DEPOLARIZING, 0.1, 3, &s) != QLSC_STATUS_OK) {
        fprintf(stderr, "%s\n", qlsc_last_error_message());
        return 1;
    }
    double p = 0.0;
    if (qlsc_state_purity(s, &p) != QLSC_STATUS_OK || !(p > 0.25 && p <= 1.0)) return 2;
    QlscState *bad = NULL;
    if (qlsc_state_prepare(2, 9, 1, 0, 0.0, 0, &bad) != QLSC_STATUS_INVALID_ARGUMENT) return 3;
    if (strlen(qlsc_last_error_message()) == 0) return 4;
    qlsc_state_free(s);
    printf("%s %.6f\n", qlsc_version(), p);
    return 0;
}
"#;

fn profile_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

fn find_compiler() -> Option<&'static str> {
    ["cc", "gcc", "clang"]
        .into_iter()
        .find(|c| Command::new(c).arg("--version").output().map(|o| o.status.success()).unwrap_or(false))
}

#[test]
fn header_compiles_and_links_from_c() {
    let include = Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    assert!(include.join("qlsc.h").exists(), "header was not generated");
    let lib = profile_dir().join("libqlsc_ffi.a");
    let Some(cc) = find_compiler() else {
        eprintln!("no C compiler found; header link check not run");
        return;
    };
    if !lib.exists() {
        eprintln!("{} not built; header link check not run", lib.display());
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    std::fs::write(&src, PROGRAM).unwrap();
    let bin = dir.path().join("main");
    let status = Command::new(cc)
        .args(["-std=c99", "-Wall", "-Werror", "-o"])
        .arg(&bin)
        .arg(&src)
        .arg("-I")
        .arg(&include)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm"])
        .status()
        .unwrap();
    assert!(status.success(), "C program failed to build");
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "C program exited with {:?}", out.status.code());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with(env!("CARGO_PKG_VERSION")), "{text}");
}
