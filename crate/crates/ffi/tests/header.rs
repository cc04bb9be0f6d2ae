//! Compiles and runs a small C program against the generated header and
//! the static library.

use std::path::PathBuf;
use std::process::Command;

const PROGRAM: &str = r#"
#include <stdio.h>
#include "semrel.h"

int main(int argc, char **argv) {
    SemrelNetwork *net = NULL;
    if (semrel_network_load(argv[1], &net) != SEMREL_STATUS_OK) return 2;
    double v = 0.0;
    if (semrel_relatedness(net, "interview", "formal meeting", &v) != SEMREL_STATUS_OK) return 3;
    SemrelStatus st = semrel_relatedness(net, "zebra", "formal", &v);
    if (st != SEMREL_STATUS_WORD_NOT_IN_NETWORK || semrel_last_error_message() == NULL) return 4;
    semrel_network_free(net);
    printf("%.4f\n", v);
    return 0;
}
"#;

#[test]
fn c_program_links_and_runs() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    // the test binary lives in <target>/<profile>/deps
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().unwrap().parent().unwrap();
    let lib = profile_dir.join("libsemrel_ffi.a");
    if Command::new("cc").arg("--version").output().is_err() || !lib.exists() {
        eprintln!(
            "skipping: no C compiler or static library at {}",
            lib.display()
        );
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    std::fs::write(&src, PROGRAM).unwrap();
    let bin = dir.path().join("main");
    let status = Command::new("cc")
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success(), "C compilation failed");
    let fixture = manifest.join("../core/fixtures/interview.edges");
    let out = Command::new(&bin).arg(fixture).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status.code());
    assert_eq!(String::from_utf8_lossy(&out.stdout), "0.6667\n");
}
