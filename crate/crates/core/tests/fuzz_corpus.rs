//! Replays the fuzz corpus, plus cheap deterministic mutations of it, through
//! the same checks the fuzz targets make. Runs on stable.

mod common;

use std::fs;
use std::path::PathBuf;

use pdcontact::fem::{parse_problem, problem_to_bytes};
use pdcontact::linalg::{read_matrix_market_str, write_matrix_market_to};
use pdcontact::pdsolver::{read_history_csv, SolutionFile};
use pdcontact::verify::SoclcpManifest;
use rand::Rng;

fn seeds(target: &str) -> Vec<Vec<u8>> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fuzz/corpus")
        .join(target);
    let mut paths: Vec<_> = fs::read_dir(&dir).unwrap().map(|e| e.unwrap().path()).collect();
    paths.sort();
    let out: Vec<Vec<u8>> = paths.iter().map(|p| fs::read(p).unwrap()).collect();
    assert!(!out.is_empty(), "no seeds in {}", dir.display());
    out
}

fn mutants(seed: &[u8], n: usize, rng: &mut impl Rng) -> Vec<Vec<u8>> {
    const TOKENS: [&[u8]; 8] = [
        b"-",
        b"0",
        b"1e999",
        b"NaN",
        b",",
        b"\n",
        b"\"",
        b"99999999999999999999",
    ];
    (0..n)
        .map(|_| {
            let mut v = seed.to_vec();
            for _ in 0..rng.random_range(1..4) {
                if v.is_empty() {
                    break;
                }
                let at = rng.random_range(0..v.len());
                match rng.random_range(0..5) {
                    0 => v[at] ^= 1 << rng.random_range(0..8),
                    1 => {
                        v.remove(at);
                    }
                    2 => v.truncate(at),
                    3 => {
                        let tok = TOKENS[rng.random_range(0..TOKENS.len())];
                        v.splice(at..at, tok.iter().copied());
                    }
                    _ => {
                        let end = (at + rng.random_range(1..16)).min(v.len());
                        let chunk = v[at..end].to_vec();
                        v.splice(at..at, chunk);
                    }
                }
            }
            v
        })
        .collect()
}

/// Every seed passes `check` with `true`; mutants must merely not panic.
fn replay(target: &str, check: impl Fn(&[u8]) -> bool) {
    let mut rng = common::rng(0xf022);
    for seed in seeds(target) {
        assert!(check(&seed), "{target}: a seed failed to parse");
        for m in mutants(&seed, 300, &mut rng) {
            check(&m);
        }
    }
}

#[test]
fn matrix_market_corpus() {
    replay("matrix_market", |data| {
        let Ok(text) = std::str::from_utf8(data) else {
            return false;
        };
        let Ok(a) = read_matrix_market_str(text) else {
            return false;
        };
        let mut buf = Vec::new();
        write_matrix_market_to(&a, &mut buf).unwrap();
        assert_eq!(read_matrix_market_str(std::str::from_utf8(&buf).unwrap()).unwrap(), a);
        true
    });
}

#[test]
fn problem_file_corpus() {
    replay("problem_file", |data| {
        let Ok(p) = parse_problem(data) else { return false };
        let back = parse_problem(&problem_to_bytes(&p, None).unwrap()).unwrap();
        assert_eq!(back.k(), p.k());
        assert_eq!(back.p(), p.p());
        assert_eq!(back.contact(), p.contact());
        true
    });
}

#[test]
fn solution_file_corpus() {
    replay("solution_file", |data| {
        let Ok(f) = SolutionFile::parse(data) else { return false };
        let back = SolutionFile::parse(&f.to_bytes().unwrap()).unwrap();
        assert_eq!((back.du, back.r), (f.du, f.r));
        true
    });
}

#[test]
fn soclcp_manifest_corpus() {
    replay("soclcp_manifest", |data| SoclcpManifest::parse(data).is_ok());
}

#[test]
fn history_csv_corpus() {
    replay("history_csv", |data| read_history_csv(data).is_ok());
}
