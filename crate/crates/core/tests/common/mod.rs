//! Brute-force reference implementations used to cross-check the solver.
#![allow(dead_code)]

use rckit::field::Elem;
use rckit::opspace::{enumerate_subspaces, Ambient};
use rckit::{Field, Matrix, OperatorSpace};

/// Index of a vector of `K^n` in base `q`.
fn vec_index(q: usize, v: &[Elem]) -> usize {
    v.iter().rev().fold(0, |acc, &x| acc * q + x as usize)
}

fn all_vectors(q: usize, len: usize) -> Vec<Vec<Elem>> {
    let total = q.pow(len as u32);
    (0..total)
        .map(|mut idx| {
            (0..len)
                .map(|_| {
                    let d = (idx % q) as Elem;
                    idx /= q;
                    d
                })
                .collect()
        })
        .collect()
}

fn mat_vec(f: &Field, m: &Matrix, x: &[Elem]) -> Vec<Elem> {
    (0..m.rows())
        .map(|i| (0..m.cols()).fold(0, |acc, j| f.add(acc, f.mul(m.get(i, j), x[j]))))
        .collect()
}

/// Image of `s` as a bitmask over the vectors of `K^n`, by trying every `x`.
fn image_mask(f: &Field, s: &Matrix) -> Vec<bool> {
    let q = f.order();
    let mut mask = vec![false; q.pow(s.rows() as u32)];
    for x in all_vectors(q, s.cols()) {
        mask[vec_index(q, &mat_vec(f, s, &x))] = true;
    }
    mask
}

pub fn oracle_map_count(s: &OperatorSpace) -> u128 {
    let f = s.field();
    let k = f.degree();
    let coords = s.dim() * k * s.rows() * k;
    (f.characteristic() as u128).pow(coords as u32)
}

/// All additive maps on `S` (as F_p coordinate vectors in `(β, row, digit)` order)
/// that send every `s` into its image, found by filtering every candidate.
pub fn naive_rc_maps(s: &OperatorSpace) -> Vec<Vec<Elem>> {
    let f = s.field();
    let (p, k, n, q) = (f.characteristic() as usize, f.degree(), s.rows(), f.order());
    let big_d = s.dim() * k;
    // each element: prime digits of its coefficients, and its image mask
    let elems: Vec<(Vec<Elem>, Vec<bool>)> = all_vectors(q, s.dim())
        .into_iter()
        .map(|c| {
            let digits: Vec<Elem> = c.iter().flat_map(|&x| f.prime_coords(x)).collect();
            (digits, image_mask(f, &s.element(&c)))
        })
        .collect();
    let mut out = Vec::new();
    for u in all_vectors(p, big_d * n * k) {
        let values: Vec<Vec<Elem>> = (0..big_d)
            .map(|b| {
                (0..n)
                    .map(|r| f.from_prime_coords(&u[(b * n + r) * k..(b * n + r + 1) * k]).unwrap())
                    .collect()
            })
            .collect();
        let ok = elems.iter().all(|(digits, mask)| {
            let mut y = vec![0; n];
            for (b, &d) in digits.iter().enumerate() {
                for _ in 0..d {
                    for r in 0..n {
                        y[r] = f.add(y[r], values[b][r]);
                    }
                }
            }
            mask[vec_index(q, &y)]
        });
        if ok {
            out.push(u);
        }
    }
    out
}

/// Local maps `s ↦ s x` for every `x`, as coordinate vectors, deduplicated.
pub fn naive_local_maps(s: &OperatorSpace) -> Vec<Vec<Elem>> {
    let f = s.field();
    let k = f.degree();
    let mut out: Vec<Vec<Elem>> = all_vectors(f.order(), s.cols())
        .into_iter()
        .map(|x| {
            let mut coords = Vec::new();
            for b in s.basis_matrices() {
                for l in 0..k {
                    let y = mat_vec(f, &b.scale(f, f.prime_basis(l)), &x);
                    for v in y {
                        coords.extend(f.prime_coords(v));
                    }
                }
            }
            coords
        })
        .collect();
    out.sort();
    out.dedup();
    out
}

/// Root-linear forms on `K`, by filtering every additive `K -> K`.
pub fn naive_root_linear_count(f: &Field) -> usize {
    if f.characteristic() != 2 {
        return 0;
    }
    let k = f.degree();
    let els: Vec<Elem> = f.elements().collect();
    all_vectors(f.order(), k)
        .into_iter()
        .filter(|images| {
            let alpha = |x: Elem| {
                f.prime_coords(x)
                    .iter()
                    .enumerate()
                    .filter(|(_, &d)| d == 1)
                    .fold(0, |acc, (l, _)| f.add(acc, images[l]))
            };
            els.iter().all(|&lam| {
                els.iter()
                    .all(|&x| alpha(f.mul(f.mul(lam, lam), x)) == f.mul(lam, alpha(x)))
            })
        })
        .count()
}

/// Domains with at most 12 map coordinates on which the solver is compared to the oracle.
pub fn oracle_domains() -> Vec<OperatorSpace> {
    let f2 = rckit::make_field(2, 1).unwrap();
    let f3 = rckit::make_field(3, 1).unwrap();
    let f4 = rckit::make_field(2, 2).unwrap();
    let mut out = Vec::new();
    for amb in [
        Ambient::sym(&f2, 2, 0),
        Ambient::sym(&f2, 2, 1),
        Ambient::alt(&f2, 3, 0),
        Ambient::alt(&f2, 2, 1),
        Ambient::full(&f2, 2, 2),
        Ambient::full(&f2, 2, 3),
        Ambient::full(&f2, 3, 1),
        Ambient::sym(&f3, 2, 0),
        Ambient::alt(&f3, 3, 0),
        Ambient::full(&f3, 2, 2),
        Ambient::alt(&f4, 2, 0),
        Ambient::sym(&f4, 1, 1),
    ] {
        out.push(OperatorSpace::full(&amb));
    }
    for (amb, max_dim) in [(Ambient::sym(&f2, 3, 0), 4), (Ambient::alt(&f2, 4, 0), 3)] {
        for c in amb.dim() - max_dim..=amb.dim() {
            out.extend(enumerate_subspaces(&amb, c, 1 << 20).unwrap());
        }
    }
    out.extend(enumerate_subspaces(&Ambient::sym(&f4, 2, 0), 2, 1 << 20).unwrap());
    out
}

pub fn coord_count(s: &OperatorSpace) -> usize {
    let k = s.field().degree();
    s.dim() * k * s.rows() * k
}
