//! Independent oracles shared by the integration suites. Nothing here calls the reduction code.
#![allow(dead_code)]

use rfc_core::complex::FilteredComplex;
use rfc_core::{Action, Fp};

/// Rank of a dense matrix over 𝔽_p by plain Gaussian elimination.
pub fn rank(f: Fp, mut rows: Vec<Vec<u32>>) -> usize {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..ncols {
        let Some(piv) = (r..rows.len()).find(|&i| rows[i][c] != 0) else { continue };
        rows.swap(r, piv);
        let inv = f.inv(rows[r][c]).expect("nonzero pivot");
        let pivot: Vec<u32> = rows[r].iter().map(|&x| f.mul(x, inv)).collect();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && row[c] != 0 {
                let k = row[c];
                for (x, p) in row.iter_mut().zip(&pivot) {
                    *x = f.sub(*x, f.mul(k, *p));
                }
            }
        }
        rows[r] = pivot;
        r += 1;
    }
    r
}

fn sub_rank(c: &FilteredComplex, rows: &[usize], cols: &[usize]) -> usize {
    if rows.is_empty() || cols.is_empty() {
        return 0;
    }
    rank(c.field, rows.iter().map(|&i| cols.iter().map(|&j| c.d.get(i, j)).collect()).collect())
}

/// Bars `(start, end, degree)` of a complex with full window, from persistent Betti numbers
/// `β^{s,t}_k = dim im(H_k(F_s) → H_k(F_t))` of the sublevel filtration `F_s = {ℓ ≤ s}`, with
/// multiplicities recovered by inclusion–exclusion.
pub fn bars_by_ranks(c: &FilteredComplex) -> Vec<(Action, Option<Action>, i64)> {
    let levels = c.action_values();
    let m = levels.len();
    let n = c.dim();
    let all: Vec<usize> = (0..n).collect();
    // level index s means F at levels[s-1]; 0 is the empty filtration
    let below = |s: usize| -> Vec<usize> { (0..n).filter(|&i| s > 0 && c.basis[i].action <= levels[s - 1]).collect() };
    let of_deg = |v: &[usize], k: i64| -> Vec<usize> { v.iter().copied().filter(|&i| c.basis[i].degree == k).collect() };
    let beta = |s: usize, t: usize, k: i64| -> i64 {
        let fs = below(s);
        let ft = below(t);
        let zk = of_deg(&fs, k);
        let z = zk.len() - sub_rank(c, &all, &zk);
        let bcols = of_deg(&ft, k + 1);
        let outside: Vec<usize> = of_deg(&all, k).into_iter().filter(|i| !fs.contains(i)).collect();
        let b_in_fs = sub_rank(c, &of_deg(&all, k), &bcols) - sub_rank(c, &outside, &bcols);
        (z - b_in_fs) as i64
    };
    let mut out = Vec::new();
    for k in c.degrees() {
        for i in 1..=m {
            for j in i + 1..=m {
                let mult = beta(i, j - 1, k) - beta(i - 1, j - 1, k) - beta(i, j, k) + beta(i - 1, j, k);
                assert!(mult >= 0, "negative multiplicity");
                for _ in 0..mult {
                    out.push((levels[i - 1].clone(), Some(levels[j - 1].clone()), k));
                }
            }
            let mult = beta(i, m, k) - beta(i - 1, m, k);
            assert!(mult >= 0, "negative multiplicity");
            for _ in 0..mult {
                out.push((levels[i - 1].clone(), None, k));
            }
        }
    }
    out.sort();
    out
}

/// The same triples read off a computed barcode.
pub fn bars_of(bc: &rfc_core::barcode::Barcode) -> Vec<(Action, Option<Action>, i64)> {
    let mut v: Vec<_> = bc.bars().iter().map(|b| (b.start.clone(), b.end.clone(), b.degree)).collect();
    v.sort();
    v
}

/// Outcome of the exhaustive adversary sweep.
#[derive(Debug, Default)]
pub struct Sweep {
    pub searched: usize,
    pub admissible: usize,
    pub too_large: usize,
    pub gated: usize,
    pub failures: Vec<String>,
}

/// Every admissible instance with up to four chord lengths drawn from a small grid, several
/// Betti vectors, every `k`, a few oscillations, and 2 to `max_steps` time steps. Instances
/// failing the gate are counted and skipped.
pub fn adversary_sweep(max_steps: u32) -> Sweep {
    use rfc_core::action::q;
    use rfc_core::bounds::{adversarial_min_survivors, main_theorem_bound, AdversaryInstance, BoundOutcome, ChordSpectrum};
    let grid = [q(1, 4), q(1, 2), q(1, 1), q(3, 2)];
    let bettis: [&[i64]; 4] = [&[1, 1], &[1, 0, 1], &[1, 1, 1], &[2, 1, 1]];
    let oscs = [q(1, 8), q(3, 8), q(3, 4), q(5, 4)];
    let mut out = Sweep::default();
    for mask in 1u32..16 {
        let lengths: Vec<_> = (0..4).filter(|i| mask & (1 << i) != 0).map(|i| grid[i].clone()).collect();
        let spectrum = ChordSpectrum::new(lengths.clone(), None, None).expect("sorted");
        for betti in bettis {
            for k in 1..=lengths.len() {
                for osc in &oscs {
                    match main_theorem_bound(betti, k, osc, &spectrum) {
                        Ok(BoundOutcome::Bound(b)) if b > 0 => {}
                        _ => {
                            out.gated += 1;
                            continue;
                        }
                    }
                    for steps in (2..=max_steps).step_by(2) {
                        let inst = AdversaryInstance { betti: betti.to_vec(), spectrum: spectrum.clone(), k, osc: osc.clone(), steps };
                        match adversarial_min_survivors(&inst) {
                            Ok(r) => {
                                out.searched += 1;
                                if matches!(r.bound, BoundOutcome::Bound(_)) {
                                    out.admissible += 1;
                                }
                                if !r.bound_holds() {
                                    out.failures.push(format!("{inst:?}: {} survivors, bound {}", r.min_survivors, r.bound));
                                }
                            }
                            Err(rfc_core::Error::InvalidInput(m)) if m.contains("search limit") => out.too_large += 1,
                            Err(e) => out.failures.push(format!("{inst:?}: {e}")),
                        }
                    }
                }
            }
        }
    }
    out
}
