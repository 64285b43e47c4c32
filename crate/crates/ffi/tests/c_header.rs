//! Builds and runs a small C program against the generated header and the
//! static library. Skipped when no C compiler is on PATH.

use std::path::{Path, PathBuf};
use std::process::Command;

const PROGRAM: &str = r#"
#include <stdio.h>
#include "entrank.h"

int main(void) {
    ErState *state = NULL;
    if (er_state_six_qubit_example(&state) != ER_STATUS_OK) return 10;
    ErFactorization *f = NULL;
    if (er_factorize(state, er_tolerance_default(), &f) != ER_STATUS_OK) return 11;
    size_t parts = 0;
    er_factorization_num_parts(f, &parts);
    for (size_t i = 0; i < parts; i++) {
        size_t buf[6];
        size_t len = 0;
        if (er_factorization_part(f, i, buf, 6, &len) != ER_STATUS_OK) return 12;
        printf(i ? " |" : "");
        for (size_t j = 0; j < len; j++) printf(" %zu", buf[j]);
    }
    printf("\n");
    ErAnalysis a;
    if (er_analyze(state, 0, er_tolerance_default(), &a) != ER_STATUS_OK) return 13;
    if (a.verdict != ER_VERDICT_ENTANGLED) return 14;
    ErState *bad = NULL;
    if (er_state_ghz(1, 2, &bad) != ER_STATUS_INPUT_ERROR) return 15;
    if (er_last_error()[0] == '\0') return 16;
    er_factorization_free(f);
    er_state_free(state);
    return 0;
}
"#;

fn compiler() -> Option<String> {
    ["cc", "gcc", "clang"]
        .into_iter()
        .find(|c| {
            Command::new(c)
                .arg("--version")
                .output()
                .is_ok_and(|o| o.status.success())
        })
        .map(String::from)
}

/// Directory holding the crate's build artifacts (target/<profile>).
fn artifact_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().and_then(Path::parent).unwrap().to_path_buf()
}

#[test]
fn header_compiles_and_links() {
    let Some(cc) = compiler() else {
        eprintln!("no C compiler found; skipping");
        return;
    };
    let include = Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    assert!(include.join("entrank.h").exists());

    let work = std::env::temp_dir().join(format!("entrank-c-{}", std::process::id()));
    std::fs::create_dir_all(&work).unwrap();
    let source = work.join("main.c");
    std::fs::write(&source, PROGRAM).unwrap();

    let syntax = Command::new(&cc)
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(&include)
        .arg(&source)
        .output()
        .unwrap();
    assert!(syntax.status.success(), "{}", String::from_utf8_lossy(&syntax.stderr));

    let lib = artifact_dir().join("libentrank_ffi.a");
    if !lib.exists() {
        eprintln!("{} not built; skipping link step", lib.display());
        return;
    }
    let exe = work.join("main");
    let link = Command::new(&cc)
        .args(["-std=c99", "-I"])
        .arg(&include)
        .arg(&source)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .output()
        .unwrap();
    assert!(link.status.success(), "{}", String::from_utf8_lossy(&link.stderr));
    let run = Command::new(&exe).output().unwrap();
    assert_eq!(run.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&run.stdout), " 1 | 2 3 | 4 5 6\n");
    std::fs::remove_dir_all(&work).unwrap();
}
