#![allow(dead_code, clippy::needless_range_loop)]

use std::path::Path;

use fairdiv_core::measures::{Geometry, Interval, PiecewiseConstantMeasure};
use fairdiv_core::rational::{int, rat, zero, Rational};
use fairdiv_core::{Division, SharingMatrix};
use rand::Rng;

pub struct Run {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn cli(args: &[&str]) -> Run {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = fairdiv::cli::run(std::iter::once("fairdiv").chain(args.iter().copied()), &mut out, &mut err);
    Run { code, stdout: String::from_utf8(out).unwrap(), stderr: String::from_utf8(err).unwrap() }
}

pub fn json(run: &Run) -> serde_json::Value {
    assert_eq!(run.code, 0, "stderr: {}", run.stderr);
    serde_json::from_str(&run.stdout).expect("stdout is JSON")
}

/// Writes every built-in scenario into `dir`.
pub fn write_fixtures(dir: &Path) {
    let r = cli(&["fixtures", "--out-dir", dir.to_str().unwrap()]);
    assert_eq!(r.code, 0, "{}", r.stderr);
}

pub fn uniform_scenario(n: usize) -> String {
    let players: Vec<String> = (0..n)
        .map(|i| format!(r#"{{"name": "u{i}", "density": [{{"start": "0", "end": "1", "value": "1"}}]}}"#))
        .collect();
    format!(r#"{{"geometry": "cake", "players": [{}]}}"#, players.join(", "))
}

/// Integral of the density straight from its cells.
pub fn integral(m: &PiecewiseConstantMeasure, a: &Rational, b: &Rational) -> Rational {
    let bps = m.breakpoints();
    let mut total = zero();
    for (c, v) in m.values().iter().enumerate() {
        let lo = a.max(&bps[c]);
        let hi = b.min(&bps[c + 1]);
        if lo < hi {
            total += v * (hi - lo);
        }
    }
    total
}

pub fn share_value(m: &PiecewiseConstantMeasure, share: &[Interval]) -> Rational {
    share.iter().flat_map(Interval::segments).map(|(a, b)| integral(m, &a, &b)).sum()
}

/// Sharing matrix computed without the library's evaluation code.
pub fn oracle_matrix(d: &Division, ms: &[PiecewiseConstantMeasure]) -> Vec<Vec<Rational>> {
    let shares = d.shares();
    ms.iter().map(|m| shares.iter().map(|s| share_value(m, s)).collect()).collect()
}

pub fn members(mask: u32, n: usize) -> Vec<usize> {
    (0..n).filter(|&j| mask >> j & 1 == 1).collect()
}

/// Least `M_ii − avg_{j∈J} M_ij` over all `J ∋ i` with `|J| = k`.
pub fn brute_slack(m: &[Vec<Rational>], k: usize) -> Rational {
    let n = m.len();
    let mut best: Option<Rational> = None;
    for i in 0..n {
        for mask in 0u32..1 << n {
            let j = members(mask, n);
            if j.len() != k || !j.contains(&i) {
                continue;
            }
            let s = &m[i][i] - j.iter().map(|&x| &m[i][x]).sum::<Rational>() / int(k as i64);
            if best.as_ref().is_none_or(|b| s < *b) {
                best = Some(s);
            }
        }
    }
    best.expect("k ≤ n")
}

pub fn brute_k_prop(m: &[Vec<Rational>], k: usize, strict: bool) -> bool {
    let s = brute_slack(m, k);
    if strict {
        s > zero()
    } else {
        s >= zero()
    }
}

pub fn spread(m: &[Vec<Rational>]) -> Rational {
    let diag: Vec<&Rational> = (0..m.len()).map(|i| &m[i][i]).collect();
    diag.iter().copied().max().unwrap() - diag.iter().copied().min().unwrap()
}

pub fn random_matrix<R: Rng>(rng: &mut R, n: usize) -> SharingMatrix {
    let rows = (0..n)
        .map(|i| {
            let w: Vec<i64> = (0..n).map(|_| rng.gen_range(0..6)).collect();
            let total: i64 = w.iter().sum();
            if total == 0 {
                (0..n).map(|j| int((i == j) as i64)).collect()
            } else {
                w.iter().map(|&x| rat(x, total)).collect()
            }
        })
        .collect();
    SharingMatrix::new(rows).unwrap()
}

/// Random measure on the grid `1/12` with at most `max_cells` cells; zero
/// densities allowed.
pub fn random_measure<R: Rng>(rng: &mut R, geometry: Geometry, max_cells: usize) -> PiecewiseConstantMeasure {
    let cells = rng.gen_range(1..=max_cells);
    let mut inner: Vec<i64> = Vec::new();
    while inner.len() < cells - 1 {
        let x = rng.gen_range(1..12);
        if !inner.contains(&x) {
            inner.push(x);
        }
    }
    inner.sort_unstable();
    let mut pts = vec![0];
    pts.extend(inner);
    pts.push(12);
    let mut weights: Vec<i64> = (0..cells).map(|_| rng.gen_range(0..4)).collect();
    if weights.iter().all(|&w| w == 0) {
        weights[rng.gen_range(0..cells)] = 1;
    }
    let mass: i64 = pts.windows(2).zip(&weights).map(|(w, &d)| (w[1] - w[0]) * d).sum();
    let values = weights.iter().map(|&w| rat(w * 12, mass)).collect();
    PiecewiseConstantMeasure::new(geometry, pts.iter().map(|&p| rat(p, 12)).collect(), values).unwrap()
}

/// Rank by plain Gaussian elimination.
pub fn rank(rows: &[Vec<Rational>]) -> usize {
    let mut a = rows.to_vec();
    let cols = a.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..a.len()).find(|&i| a[i][c] != zero()) else { continue };
        a.swap(r, p);
        for i in r + 1..a.len() {
            if a[i][c] != zero() {
                let f = &a[i][c] / &a[r][c];
                for j in c..cols {
                    let d = &f * &a[r][j];
                    a[i][j] -= d;
                }
            }
        }
        r += 1;
    }
    r
}
