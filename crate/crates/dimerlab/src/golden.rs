//! Closed-form reference values for the four orientation Pfaffians on the
//! six benchmark lattices, plus golden-file IO.
//!
//! The factored products below are the known exact results; the golden
//! files under `golden/` hold the same polynomials expanded to canonical
//! form and are what external tooling diffs against.

use crate::polyring::{PolyError, TriPoly};
use std::fs;
use std::path::PathBuf;

pub const GOLDEN_SIZES: [(usize, usize); 6] = [(4, 3), (4, 4), (4, 6), (4, 8), (6, 6), (8, 8)];

/// `c * zh^a zv^b zd^d`
fn t(c: i64, a: u32, b: u32, d: u32) -> TriPoly {
    TriPoly::term(c, a, b, d)
}

/// The four reference Pfaffians (orientation order 1..4), or `None` when
/// the size has no tabulated closed form.
pub fn reference_pfaffians(m: usize, n: usize) -> Option<[TriPoly; 4]> {
    match (m, n) {
        (4, 3) => {
            let a = t(3, 0, 2, 0) + t(1, 0, 0, 2);
            let b = t(4, 2, 0, 0) + t(3, 0, 2, 0) + t(3, 0, 0, 2);
            let pf1 = t(-4, 1, 0, 1) * &a * &b;
            let c = t(2, 2, 0, 0) + t(3, 0, 2, 0);
            let inner = &c * &(&c + &t(4, 0, 0, 2)) + t(1, 0, 0, 4);
            let pf34 = (t(2, 2, 0, 0) + t(2, 0, 0, 2)) * &inner;
            Some([pf1.clone(), -&pf1, pf34.clone(), pf34])
        }
        (4, 4) => {
            // each orientation pairs two of the three weights in its
            // repeated quadratic factor and doubles the third inside the
            // second factor
            let sq = |p: TriPoly| p.pow(2);
            let pf1 = t(-256, 2, 2, 2) * (t(1, 2, 0, 0) + t(1, 0, 2, 0) + t(1, 0, 0, 2));
            let pf2 = t(16, 0, 0, 0)
                * sq(t(1, 0, 2, 0) + t(1, 0, 0, 2))
                * sq(t(2, 2, 0, 0) + t(1, 0, 2, 0) + t(1, 0, 0, 2));
            let pf3 = t(16, 0, 0, 0)
                * sq(t(1, 2, 0, 0) + t(1, 0, 0, 2))
                * sq(t(1, 2, 0, 0) + t(2, 0, 2, 0) + t(1, 0, 0, 2));
            let pf4 = t(16, 0, 0, 0)
                * sq(t(1, 2, 0, 0) + t(1, 0, 2, 0))
                * sq(t(1, 2, 0, 0) + t(1, 0, 2, 0) + t(2, 0, 0, 2));
            Some([pf1, pf2, pf3, pf4])
        }
        (4, 6) => {
            let sq = |p: TriPoly| p.pow(2);
            let pf1 = t(-16, 2, 0, 2)
                * sq(t(4, 2, 0, 0) + t(3, 0, 2, 0) + t(3, 0, 0, 2))
                * sq(t(3, 0, 2, 0) + t(1, 0, 0, 2));
            let pf2 = t(16, 0, 2, 0)
                * sq(t(4, 2, 0, 0) + t(1, 0, 2, 0) + t(1, 0, 0, 2))
                * (t(1, 2, 0, 0) + t(1, 0, 2, 0) + t(1, 0, 0, 2))
                * sq(t(1, 0, 2, 0) + t(3, 0, 0, 2));
            let base = t(2, 2, 0, 0) + t(3, 0, 2, 0);
            let pf3 = t(4, 0, 0, 0)
                * sq(t(1, 0, 0, 2) + t(1, 2, 0, 0))
                * sq(t(1, 0, 0, 4) + t(4, 0, 0, 2) * &base + sq(base.clone()));
            let pf4 = t(4, 0, 0, 0)
                * sq(t(1, 0, 0, 2) + t(1, 2, 0, 0) + t(2, 0, 2, 0))
                * sq(t(1, 0, 0, 4)
                    + t(8, 2, 0, 2)
                    + t(4, 4, 0, 0)
                    + t(4, 0, 2, 2)
                    + t(4, 2, 2, 0)
                    + t(1, 0, 4, 0));
            Some([pf1, pf2, pf3, pf4])
        }
        (4, 8) => {
            let sq = |p: TriPoly| p.pow(2);
            let pf1 = t(-4096, 2, 2, 2)
                * sq(t(1, 0, 0, 2) + t(1, 0, 2, 0))
                * (t(1, 0, 0, 2) + t(1, 2, 0, 0) + t(1, 0, 2, 0))
                * sq(t(1, 0, 0, 2) + t(2, 2, 0, 0) + t(1, 0, 2, 0));
            let pf2 = t(16, 0, 0, 0)
                * sq(t(1, 0, 0, 4) + t(6, 0, 2, 2) + t(1, 0, 4, 0))
                * sq(t(1, 0, 0, 4)
                    + t(8, 4, 0, 0)
                    + t(8, 2, 2, 0)
                    + t(1, 0, 4, 0)
                    + t(8, 2, 0, 2)
                    + t(2, 0, 2, 2));
            let pf3 = t(256, 0, 0, 0)
                * sq(t(1, 0, 0, 2) + t(1, 2, 0, 0))
                * sq(t(1, 2, 0, 0) + t(1, 0, 2, 0))
                * sq(t(2, 0, 0, 2) + t(1, 2, 0, 0) + t(1, 0, 2, 0))
                * sq(t(1, 0, 0, 2) + t(1, 2, 0, 0) + t(2, 0, 2, 0));
            let pf4 = t(16, 0, 0, 0)
                * sq(t(1, 0, 0, 4)
                    + t(2, 4, 0, 0)
                    + t(4, 2, 2, 0)
                    + t(1, 0, 4, 0)
                    + t(4, 2, 0, 2)
                    + t(2, 0, 2, 2))
                * sq(t(1, 0, 0, 4)
                    + t(2, 4, 0, 0)
                    + t(4, 2, 2, 0)
                    + t(1, 0, 4, 0)
                    + t(4, 2, 0, 2)
                    + t(6, 0, 2, 2));
            Some([pf1, pf2, pf3, pf4])
        }
        (6, 6) => {
            let sq = |p: TriPoly| p.pow(2);
            let pf1 = t(-4, 0, 0, 2)
                * sq(t(1, 0, 0, 2) + t(3, 2, 0, 0))
                * sq(t(1, 0, 0, 2) + t(3, 0, 2, 0))
                * sq(t(1, 0, 0, 2) + t(3, 2, 0, 0) + t(3, 0, 2, 0))
                * sq(t(4, 0, 0, 2) + t(3, 2, 0, 0) + t(3, 0, 2, 0));
            let pf2 = t(4, 0, 2, 0)
                * sq(t(3, 0, 0, 2) + t(1, 0, 2, 0))
                * sq(t(3, 2, 0, 0) + t(1, 0, 2, 0))
                * sq(t(3, 0, 0, 2) + t(3, 2, 0, 0) + t(1, 0, 2, 0))
                * sq(t(3, 0, 0, 2) + t(3, 2, 0, 0) + t(4, 0, 2, 0));
            let pf3 = t(4, 2, 0, 0)
                * sq(t(3, 0, 0, 2) + t(1, 2, 0, 0))
                * sq(t(1, 2, 0, 0) + t(3, 0, 2, 0))
                * sq(t(3, 0, 0, 2) + t(1, 2, 0, 0) + t(3, 0, 2, 0))
                * sq(t(3, 0, 0, 2) + t(4, 2, 0, 0) + t(3, 0, 2, 0));
            let all = t(1, 0, 0, 2) + t(1, 2, 0, 0) + t(1, 0, 2, 0);
            let pf4 = t(4, 0, 0, 0)
                * all.pow(3)
                * sq(t(4, 0, 0, 2) + t(1, 2, 0, 0) + t(1, 0, 2, 0))
                * sq(t(1, 0, 0, 2) + t(4, 2, 0, 0) + t(1, 0, 2, 0))
                * sq(t(1, 0, 0, 2) + t(1, 2, 0, 0) + t(4, 0, 2, 0));
            Some([pf1, pf2, pf3, pf4])
        }
        (8, 8) => {
            let sq = |p: TriPoly| p.pow(2);
            let pf1 = t(-1048576, 2, 2, 2)
                * sq(t(1, 0, 0, 2) + t(1, 2, 0, 0))
                * sq(t(1, 0, 0, 2) + t(1, 0, 2, 0))
                * sq(t(1, 2, 0, 0) + t(1, 0, 2, 0))
                * (t(1, 0, 0, 2) + t(1, 2, 0, 0) + t(1, 0, 2, 0))
                * sq(t(2, 0, 0, 2) + t(1, 2, 0, 0) + t(1, 0, 2, 0))
                * sq(t(1, 0, 0, 2) + t(2, 2, 0, 0) + t(1, 0, 2, 0))
                * sq(t(1, 0, 0, 2) + t(1, 2, 0, 0) + t(2, 0, 2, 0));
            let pf2 = t(256, 0, 0, 0)
                * sq(t(1, 0, 0, 4) + t(6, 0, 2, 2) + t(1, 0, 4, 0))
                * sq(t(1, 0, 0, 4)
                    + t(4, 2, 0, 2)
                    + t(2, 4, 0, 0)
                    + t(2, 0, 2, 2)
                    + t(4, 2, 2, 0)
                    + t(1, 0, 4, 0))
                * sq(t(1, 0, 0, 4)
                    + t(4, 2, 0, 2)
                    + t(2, 4, 0, 0)
                    + t(6, 0, 2, 2)
                    + t(4, 2, 2, 0)
                    + t(1, 0, 4, 0))
                * sq(t(1, 0, 0, 4)
                    + t(8, 2, 0, 2)
                    + t(8, 4, 0, 0)
                    + t(2, 0, 2, 2)
                    + t(8, 2, 2, 0)
                    + t(1, 0, 4, 0));
            let pf3 = t(256, 0, 0, 0)
                * sq(t(1, 0, 0, 4) + t(6, 2, 0, 2) + t(1, 4, 0, 0))
                * sq(t(1, 0, 0, 4)
                    + t(2, 2, 0, 2)
                    + t(1, 4, 0, 0)
                    + t(4, 0, 2, 2)
                    + t(4, 2, 2, 0)
                    + t(2, 0, 4, 0))
                * sq(t(1, 0, 0, 4)
                    + t(6, 2, 0, 2)
                    + t(1, 4, 0, 0)
                    + t(4, 0, 2, 2)
                    + t(4, 2, 2, 0)
                    + t(2, 0, 4, 0))
                * sq(t(1, 0, 0, 4)
                    + t(2, 2, 0, 2)
                    + t(1, 4, 0, 0)
                    + t(8, 0, 2, 2)
                    + t(8, 2, 2, 0)
                    + t(8, 0, 4, 0));
            let pf4 = t(256, 0, 0, 0)
                * sq(t(2, 0, 0, 4)
                    + t(4, 2, 0, 2)
                    + t(1, 4, 0, 0)
                    + t(4, 0, 2, 2)
                    + t(2, 2, 2, 0)
                    + t(1, 0, 4, 0))
                * sq(t(8, 0, 0, 4)
                    + t(8, 2, 0, 2)
                    + t(1, 4, 0, 0)
                    + t(8, 0, 2, 2)
                    + t(2, 2, 2, 0)
                    + t(1, 0, 4, 0))
                * sq(t(1, 4, 0, 0) + t(6, 2, 2, 0) + t(1, 0, 4, 0))
                * sq(t(2, 0, 0, 4)
                    + t(4, 2, 0, 2)
                    + t(1, 4, 0, 0)
                    + t(4, 0, 2, 2)
                    + t(6, 2, 2, 0)
                    + t(1, 0, 4, 0));
            Some([pf1, pf2, pf3, pf4])
        }
        _ => None,
    }
}

fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("golden")
}

pub fn pfaffian_file_path(m: usize, n: usize) -> PathBuf {
    golden_dir().join(format!("pfaffians_{m}x{n}.txt"))
}

/// Serialized golden content for one size: one `pf<i>: <polynomial>` line
/// per orientation, in canonical form.
pub fn pfaffian_file_contents(pfaffians: &[TriPoly; 4]) -> String {
    let mut out = String::new();
    for (i, pf) in pfaffians.iter().enumerate() {
        out.push_str(&format!("pf{}: {}\n", i + 1, pf.to_canonical_string()));
    }
    out
}

pub fn load_pfaffian_file(m: usize, n: usize) -> Result<[TriPoly; 4], PolyError> {
    let path = pfaffian_file_path(m, n);
    let text = fs::read_to_string(&path)
        .map_err(|e| PolyError::Parse(format!("{}: {e}", path.display())))?;
    let mut out = [
        TriPoly::zero(),
        TriPoly::zero(),
        TriPoly::zero(),
        TriPoly::zero(),
    ];
    let mut lines = 0;
    for line in text.lines() {
        let (label, poly) = line
            .split_once(": ")
            .ok_or_else(|| PolyError::Parse(format!("bad golden line `{line}`")))?;
        let idx: usize = label
            .strip_prefix("pf")
            .and_then(|t| t.parse().ok())
            .filter(|&i| (1..=4).contains(&i))
            .ok_or_else(|| PolyError::Parse(format!("bad golden label `{label}`")))?;
        out[idx - 1] = poly.parse()?;
        lines += 1;
    }
    if lines != 4 {
        return Err(PolyError::Parse(format!(
            "expected 4 golden lines, got {lines}"
        )));
    }
    Ok(out)
}

pub fn free_energy_file_path() -> PathBuf {
    golden_dir().join("free_energy_111.txt")
}

/// Free-energy baseline at unit weights, recorded to 12 digits by an
/// independent high-resolution quadrature.
pub fn free_energy_baseline() -> f64 {
    let path = free_energy_file_path();
    fs::read_to_string(&path)
        .unwrap_or_else(|e| panic!("{}: {e}", path.display()))
        .trim()
        .parse()
        .expect("golden free energy parses as f64")
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    #[test]
    fn reference_polynomials_are_homogeneous() {
        for (m, n) in GOLDEN_SIZES {
            let reference = reference_pfaffians(m, n).unwrap();
            for pf in &reference {
                assert_eq!(
                    pf.homogeneous_degree(),
                    Some((m * n / 2) as u32),
                    "({m},{n})"
                );
            }
        }
    }

    #[test]
    fn reference_evaluations_at_unit_weights() {
        let expected: [((usize, usize), [i64; 4]); 6] = [
            ((4, 3), [-160, 160, 184, 184]),
            ((4, 4), [-768, 1024, 1024, 1024]),
            ((4, 6), [-25600, 27648, 33856, 30976]),
            ((4, 8), [-786432, 802816, 1048576, 1016064]),
            ((6, 6), [-5017600, 5017600, 5017600, 5038848]),
            (
                (8, 8),
                [-824633720832, 815712436224, 815712436224, 815712436224],
            ),
        ];
        let one = BigRational::from_integer(1.into());
        for ((m, n), values) in expected {
            let reference = reference_pfaffians(m, n).unwrap();
            for (pf, want) in reference.iter().zip(values) {
                assert_eq!(
                    pf.eval(&one, &one, &one),
                    BigRational::from_integer(want.into()),
                    "({m},{n})"
                );
            }
        }
    }

    #[test]
    fn golden_files_match_reference() {
        for (m, n) in GOLDEN_SIZES {
            let reference = reference_pfaffians(m, n).unwrap();
            let contents = pfaffian_file_contents(&reference);
            let path = pfaffian_file_path(m, n);
            if std::env::var("UPDATE_GOLDEN").is_ok() {
                std::fs::create_dir_all(path.parent().unwrap()).unwrap();
                std::fs::write(&path, &contents).unwrap();
            }
            let on_disk = std::fs::read_to_string(&path)
                .unwrap_or_else(|e| panic!("{}: {e} (run with UPDATE_GOLDEN=1)", path.display()));
            assert_eq!(on_disk, contents, "{} out of date", path.display());
            let parsed = load_pfaffian_file(m, n).unwrap();
            assert_eq!(parsed, reference);
        }
    }

    #[test]
    fn free_energy_baseline_reads() {
        let f = free_energy_baseline();
        assert!(f > 0.85 && f < 0.86);
    }
}
