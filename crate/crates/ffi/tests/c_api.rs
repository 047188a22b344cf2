use std::ffi::{CStr, CString};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use seeddistill_ffi::*;

fn write_corpus(dir: &Path) -> PathBuf {
    let programs = [
        ("a", "x = 1; y = x + 2;"),
        ("b", "while (i < 10) { i += 1; }"),
        ("c", "if (a) { f(a); } else { g(); }"),
        ("d", "fn h(p) { return p * 2; }"),
    ];
    let mut seeds = Vec::new();
    for (id, src) in programs {
        fs::write(dir.join(format!("{id}.mini")), src).unwrap();
        seeds.push(seed_entry(id));
    }
    let manifest = format!("{{\"name\":\"ffi\",\"seeds\":[{}]}}", seeds.join(","));
    let path = dir.join("manifest.json");
    fs::write(&path, manifest).unwrap();
    path
}

fn seed_entry(id: &str) -> String {
    format!(
        "{{\"id\":\"{id}\",\"source\":\"{id}.mini\",\"bug_count\":{}}}",
        id.len()
    )
}

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    let p = sd_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn select_and_subset_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = c(write_corpus(dir.path()).to_str().unwrap());
    unsafe {
        let mut corpus = ptr::null_mut();
        assert_eq!(sd_corpus_load(manifest.as_ptr(), &mut corpus), SD_OK);
        assert_eq!(sd_corpus_len(corpus), 4);

        let mut order = ptr::null_mut();
        let status = sd_select(
            corpus,
            c("fiss").as_ptr(),
            c("cfg3gram").as_ptr(),
            42,
            &mut order,
        );
        assert_eq!(status, SD_OK);
        assert_eq!(sd_order_len(order), 4);
        let mut ids: Vec<String> = (0..4)
            .map(|i| {
                CStr::from_ptr(sd_order_id_at(order, i))
                    .to_str()
                    .unwrap()
                    .to_owned()
            })
            .collect();
        assert!(sd_order_id_at(order, 4).is_null());
        ids.sort();
        assert_eq!(ids, ["a", "b", "c", "d"]);

        let mut json = ptr::null_mut();
        assert_eq!(sd_order_to_json(order, &mut json), SD_OK);
        let text = CStr::from_ptr(json).to_str().unwrap().to_owned();
        sd_string_free(json);
        assert!(text.contains("\"method\": \"fiss-cfg3gram\""));
        assert!(text.contains("\"rng_seed\": 42"));

        let subset = dir.path().join("out").join("subset.json");
        let subset_c = c(subset.to_str().unwrap());
        let mut kept = 0usize;
        assert_eq!(
            sd_save_subset(corpus, order, 0.5, subset_c.as_ptr(), &mut kept),
            SD_OK
        );
        assert_eq!(kept, 2);
        let mut reloaded = ptr::null_mut();
        assert_eq!(sd_corpus_load(subset_c.as_ptr(), &mut reloaded), SD_OK);
        assert_eq!(sd_corpus_len(reloaded), 2);

        sd_corpus_free(reloaded);
        sd_order_free(order);
        sd_corpus_free(corpus);
    }
}

#[test]
fn errors_carry_status_and_message() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = c(write_corpus(dir.path()).to_str().unwrap());
    unsafe {
        let mut corpus = ptr::null_mut();
        let missing = c(dir.path().join("nope.json").to_str().unwrap());
        assert_eq!(sd_corpus_load(missing.as_ptr(), &mut corpus), SD_ERR_IO);
        assert!(corpus.is_null());
        assert!(last_error().starts_with("io: "));

        assert_eq!(sd_corpus_load(ptr::null(), &mut corpus), SD_ERR_ARGUMENT);
        assert_eq!(
            sd_corpus_load(manifest.as_ptr(), ptr::null_mut()),
            SD_ERR_ARGUMENT
        );

        assert_eq!(sd_corpus_load(manifest.as_ptr(), &mut corpus), SD_OK);
        assert!(sd_last_error_message().is_null());
        let mut order = ptr::null_mut();
        assert_eq!(
            sd_select(corpus, c("fiss").as_ptr(), ptr::null(), 0, &mut order),
            SD_ERR_PARAMETER
        );
        assert_eq!(
            sd_select(corpus, c("ciss-p").as_ptr(), ptr::null(), 0, &mut order),
            SD_ERR_MISSING_REPRESENTATION
        );
        assert!(last_error().contains("coverage"));
        assert!(order.is_null());
        assert_eq!(
            sd_select(corpus, c("piss").as_ptr(), ptr::null(), 0, &mut order),
            SD_OK
        );
        // bug counts are id lengths, all 1: any order is valid, but it must be complete
        assert_eq!(sd_order_len(order), 4);
        sd_order_free(order);
        sd_corpus_free(corpus);

        let mut n = 0usize;
        assert_eq!(sd_budget_size(100, 0.29, &mut n), SD_OK);
        assert_eq!(n, 29);
        assert_eq!(sd_budget_size(10, 0.0, &mut n), SD_ERR_PARAMETER);
    }
}

#[test]
fn analysis_helpers() {
    unsafe {
        let counts = [5u64, 6, 5, 5, 6];
        let mut mean = 0.0;
        assert_eq!(
            sd_average_runs(counts.as_ptr(), counts.len(), 5, &mut mean),
            SD_OK
        );
        assert!((mean - 5.4).abs() < 1e-12);
        assert_eq!(
            sd_average_runs(ptr::null(), 3, 5, &mut mean),
            SD_ERR_ARGUMENT
        );

        let mut key = ptr::null_mut();
        let msg = c("NullPointerException at 0x7ffe12 in thread 12");
        assert_eq!(sd_normalize_message(msg.as_ptr(), &mut key), SD_OK);
        let text = CStr::from_ptr(key).to_str().unwrap().to_owned();
        sd_string_free(key);
        assert!(text.contains("<addr>"), "{text}");
        assert!(text.contains("<tid>"), "{text}");
    }
    let v = unsafe { CStr::from_ptr(sd_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn null_handles_are_tolerated() {
    unsafe {
        assert_eq!(sd_corpus_len(ptr::null()), 0);
        assert_eq!(sd_order_len(ptr::null()), 0);
        assert!(sd_order_id_at(ptr::null(), 0).is_null());
        sd_corpus_free(ptr::null_mut());
        sd_order_free(ptr::null_mut());
        sd_string_free(ptr::null_mut());
    }
}

fn header() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("include")
        .join("seeddistill.h")
}

#[test]
fn header_declares_the_api() {
    let text = fs::read_to_string(header()).unwrap();
    for name in [
        "sd_corpus_load",
        "sd_corpus_free",
        "sd_select",
        "sd_order_free",
        "sd_order_id_at",
        "sd_save_subset",
        "sd_last_error_message",
        "sd_string_free",
        "typedef struct SdCorpus SdCorpus",
    ] {
        assert!(text.contains(name), "header lacks {name}");
    }
}

/// Builds the static library; `cargo test` alone only produces the rlib.
fn static_lib() -> Option<PathBuf> {
    let status = Command::new(env!("CARGO"))
        .args(["build", "--quiet", "-p", "seeddistill-ffi", "--lib"])
        .current_dir(env!("CARGO_MANIFEST_DIR"))
        .status()
        .ok()?;
    if !status.success() {
        return None;
    }
    // tests run from target/debug/deps
    let exe = std::env::current_exe().ok()?;
    let lib = exe.parent()?.parent()?.join("libseeddistill_ffi.a");
    lib.exists().then_some(lib)
}

#[test]
fn c_program_links_and_runs() {
    let Some(lib) = static_lib() else {
        eprintln!("skipping: static library not built");
        return;
    };
    if Command::new("cc").arg("--version").output().is_err() {
        eprintln!("skipping: no C compiler");
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let manifest = write_corpus(dir.path());
    let src = dir.path().join("main.c");
    fs::write(
        &src,
        r#"
#include <stdio.h>
#include <string.h>
#include "seeddistill.h"

int main(int argc, char **argv) {
    SdCorpus *corpus = NULL;
    if (sd_corpus_load(argv[1], &corpus) != SD_OK) {
        fprintf(stderr, "%s\n", sd_last_error_message());
        return 1;
    }
    SdOrder *order = NULL;
    if (sd_select(corpus, "random", NULL, 7, &order) != SD_OK) return 2;
    size_t n = sd_order_len(order);
    for (size_t i = 0; i < n; i++) printf("%s\n", sd_order_id_at(order, i));
    SdOrder *bad = NULL;
    if (sd_select(corpus, "bogus", NULL, 7, &bad) != SD_ERR_PARAMETER || bad != NULL) return 3;
    sd_order_free(order);
    sd_corpus_free(corpus);
    return n == 4 ? 0 : 4;
}
"#,
    )
    .unwrap();
    let bin = dir.path().join("main");
    let build = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(header().parent().unwrap())
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .output()
        .unwrap();
    assert!(
        build.status.success(),
        "C program failed to build: {}",
        String::from_utf8_lossy(&build.stderr)
    );
    let out = Command::new(&bin).arg(&manifest).output().unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let mut ids: Vec<_> = String::from_utf8(out.stdout)
        .unwrap()
        .lines()
        .map(str::to_owned)
        .collect();
    ids.sort();
    assert_eq!(ids, ["a", "b", "c", "d"]);
}
