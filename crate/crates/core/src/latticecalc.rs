//! Lattices in the Lie algebra and integer-valued polynomial certificates.
//!
//! `malcev_lattice` computes (a star-closed hull of) the ℤ-span Λ of the
//! logarithms of truncated group elements by saturation: starting from the
//! generator logs, star products of lattice members are adjoined and a
//! Hermite-normal-form basis re-extracted until the chain stabilizes. All
//! candidate vectors live in a fixed ambient lattice with bounded
//! denominators, so the ascending chain is finite.

use crate::freelie::{basis, LieElt, Signature};
use crate::linalg::{hnf_contains, row_hnf};
use crate::nilgroup::{eval_word, star, FreeWord};
use crate::poly::Poly;
use crate::rat::{lcm_int, Int, Rat};
use crate::{Error, Result};
use num_integer::Integer;
use num_traits::{One, Zero};
use std::collections::BTreeMap;

/// Basis of a full-rank-in-its-span lattice in Hall coordinates: the basis
/// vectors are `rows[i] / denom`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeBasis {
    pub sig: Signature,
    /// HNF basis rows of the scaled (integer) lattice.
    pub rows: Vec<Vec<Int>>,
    /// Global denominator: `rows / denom` are the actual basis vectors.
    pub denom: Int,
}

impl LatticeBasis {
    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn basis_vectors(&self) -> Vec<LieElt> {
        let d = Rat::from_integer(self.denom.clone());
        self.rows
            .iter()
            .map(|r| {
                LieElt::from_coords(
                    self.sig,
                    r.iter()
                        .enumerate()
                        .map(|(i, v)| (i, Rat::from_integer(v.clone()) / &d))
                        .collect(),
                )
            })
            .collect()
    }

    /// Scales a rational coordinate vector into the integer frame of `rows`;
    /// `None` when `denom * v` is not integral.
    fn scaled_integer_vector(&self, v: &LieElt) -> Option<Vec<Int>> {
        let dim = basis(self.sig).dim();
        let mut out = vec![Int::zero(); dim];
        for (i, c) in v.coords() {
            let scaled = c * Rat::from_integer(self.denom.clone());
            if !scaled.denom().is_one() {
                return None;
            }
            out[i] = scaled.numer().clone();
        }
        Some(out)
    }

    /// Membership of `v` itself.
    pub fn contains(&self, v: &LieElt) -> bool {
        match self.scaled_integer_vector(v) {
            None => false,
            Some(w) => hnf_contains(&self.rows, &w),
        }
    }

    /// Smallest positive integer `s` with `s·v` in the lattice, or `None`
    /// when `v` is not in the ℚ-span.
    pub fn denominator_of(&self, v: &LieElt) -> Option<Int> {
        let dim = basis(self.sig).dim();
        let mut target = vec![Rat::zero(); dim];
        for (i, c) in v.coords() {
            target[i] = c * Rat::from_integer(self.denom.clone());
        }
        let mut mat = crate::linalg::QMat::zero(dim, self.rows.len());
        for (j, r) in self.rows.iter().enumerate() {
            for i in 0..dim {
                mat[(i, j)] = Rat::from_integer(r[i].clone());
            }
        }
        let coords = mat.solve(&target)?;
        let mut s = Int::one();
        for c in &coords {
            s = lcm_int(&s, &num_traits::Signed::abs(c.denom()));
        }
        Some(s)
    }

    /// JSON wire form: columns of the integer matrix plus the denominator.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "n": self.sig.n,
            "c": self.sig.c,
            "denominator": self.denom.to_string(),
            "columns": self.rows.iter().map(|r| {
                r.iter().map(|v| v.to_string()).collect::<Vec<_>>()
            }).collect::<Vec<_>>(),
        })
    }
}

/// Deterministic light-weight generator for saturation probes (keeps the
/// library free of a runtime RNG dependency).
struct MiniRng(u64);

impl MiniRng {
    fn next(&mut self) -> u64 {
        // splitmix64
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    fn small(&mut self, bound: i64) -> i64 {
        (self.next() % (2 * bound as u64 + 1)) as i64 - bound
    }
}

fn hnf_state(vectors: &[LieElt], sig: Signature) -> LatticeBasis {
    let dim = basis(sig).dim();
    let mut denom = Int::one();
    for v in vectors {
        denom = lcm_int(&denom, &v.denominator_lcm());
    }
    let rows: Vec<Vec<Int>> = vectors
        .iter()
        .map(|v| {
            let mut r = vec![Int::zero(); dim];
            for (i, c) in v.coords() {
                let s = c * Rat::from_integer(denom.clone());
                debug_assert!(s.denom().is_one());
                r[i] = s.numer().clone();
            }
            r
        })
        .collect();
    let mut rows = row_hnf(rows);
    // divide out common content so the denominator is minimal
    let mut g = denom.clone();
    for r in &rows {
        for v in r {
            if !v.is_zero() {
                g = g.gcd(v);
            }
        }
        if g.is_one() {
            break;
        }
    }
    if !g.is_one() {
        for r in rows.iter_mut() {
            for v in r.iter_mut() {
                *v = &*v / &g;
            }
        }
        denom = &denom / &g;
    }
    LatticeBasis { sig, rows, denom }
}

/// Basis of the ℤ-span of `{log w : w in the truncated group}`, computed by
/// star saturation. Star products of basis pairs, of members with generator
/// logs, and of deterministic random member combinations are adjoined until
/// the lattice stabilizes.
pub fn malcev_lattice(n: usize, c: usize) -> LatticeBasis {
    let sig = Signature::new(n, c);
    let init: Vec<LieElt> = (1..=n).map(|i| LieElt::generator(sig, i)).collect();
    let mut state = hnf_state(&init, sig);
    let mut rng = MiniRng(0x5eed ^ ((n as u64) << 32) ^ c as u64);
    for _round in 0..64 {
        let members = state.basis_vectors();
        let mut pairs: Vec<(LieElt, LieElt)> = Vec::new();
        for u in &members {
            for v in &members {
                pairs.push((u.clone(), v.clone()));
            }
            for i in 1..=n {
                pairs.push((u.clone(), LieElt::generator(sig, i)));
                pairs.push((u.clone(), LieElt::generator(sig, i).neg()));
            }
        }
        for _ in 0..(16 * n) {
            let mut combo = || {
                let mut acc = LieElt::zero(sig);
                for m in &members {
                    let k = rng.small(2);
                    if k != 0 {
                        acc = acc.add(&m.scale(&Rat::from_integer(Int::from(k)))).unwrap();
                    }
                }
                acc
            };
            let u = combo();
            let v = combo();
            pairs.push((u, v));
        }
        let stars = crate::exec::par_map(&pairs, |(u, v)| star(u, v).expect("shared signature"));
        let mut vectors = members;
        vectors.extend(stars);
        let next = hnf_state(&vectors, sig);
        if next == state {
            return state;
        }
        state = next;
    }
    panic!("lattice saturation did not stabilize for {sig}");
}

/// True iff `scale·v` lies in the ℤ-span of the lattice basis.
pub fn lattice_member(v: &LieElt, lattice: &LatticeBasis, scale: &Int) -> bool {
    assert!(scale > &Int::zero(), "scale must be positive");
    lattice.contains(&v.scale(&Rat::from_integer(scale.clone())))
}

/// Lattice containment of the log of a word.
pub fn word_log_member(w: &FreeWord, lattice: &LatticeBasis) -> bool {
    lattice.contains(&eval_word(w, lattice.sig))
}

/// The binomial-coefficient polynomial C(x_var, k).
pub fn binomial_poly(var: usize, k: u32) -> Poly {
    let mut p = Poly::one();
    for j in 0..k {
        let factor = Poly::var(var).sub(&Poly::constant(Rat::from_integer(Int::from(j))));
        p = p.mul(&factor);
    }
    let mut kfact = Int::one();
    for j in 1..=k {
        kfact *= Int::from(j);
    }
    p.scale(&Rat::from_integer(kfact).recip())
}

fn binom_int(n: u32, k: u32) -> Int {
    if k > n {
        return Int::zero();
    }
    let mut num = Int::one();
    let mut den = Int::one();
    for j in 0..k {
        num *= Int::from(n - j);
        den *= Int::from(j + 1);
    }
    num / den
}

/// Decomposes an integer-valued polynomial as an integer combination of
/// products of binomial-coefficient polynomials; the exponent vector α
/// indexes ∏_i C(x_i, α_i). Succeeds exactly when `f` maps ℤ^m into ℤ.
pub fn binomial_decompose(f: &Poly, m: usize) -> Result<Vec<(Vec<u32>, Int)>> {
    if f.num_vars() > m {
        return Err(Error::Precondition(format!(
            "polynomial uses {} variables, more than m = {m}",
            f.num_vars()
        )));
    }
    let nv = m.max(1);
    let degs: Vec<u32> = (0..nv).map(|i| f.degree_in(i)).collect();
    // grid 0..=deg_i per variable, iterated so every β ≤ α comes first
    let mut alphas: Vec<Vec<u32>> = vec![vec![0; nv]];
    for i in 0..nv {
        let mut next = Vec::new();
        for a in &alphas {
            for k in 0..=degs[i] {
                let mut b = a.clone();
                b[i] = k;
                next.push(b);
            }
        }
        alphas = next;
    }
    alphas.sort();
    let mut coeffs: BTreeMap<Vec<u32>, Int> = BTreeMap::new();
    for alpha in &alphas {
        let point: Vec<Rat> = alpha
            .iter()
            .map(|&a| Rat::from_integer(Int::from(a)))
            .collect();
        let mut val = f.eval(&point);
        for (beta, c) in &coeffs {
            if beta.iter().zip(alpha.iter()).all(|(b, a)| b <= a) {
                let mut prod = Int::one();
                for (&b, &a) in beta.iter().zip(alpha.iter()) {
                    prod *= binom_int(a, b);
                }
                val -= Rat::from_integer(&prod * c);
            }
        }
        if val.is_zero() {
            continue;
        }
        if !val.denom().is_one() {
            return Err(Error::NotIntegerValued(
                format!("{alpha:?}"),
                crate::rat::rat_to_string(&val),
            ));
        }
        coeffs.insert(alpha.clone(), val.numer().clone());
    }
    // certificate: reassemble and compare exactly
    let mut rebuilt = Poly::zero();
    for (alpha, c) in &coeffs {
        let mut term = Poly::constant(Rat::from_integer(c.clone()));
        for (i, &a) in alpha.iter().enumerate() {
            if a > 0 {
                term = term.mul(&binomial_poly(i, a));
            }
        }
        rebuilt = rebuilt.add(&term);
    }
    if &rebuilt != f {
        return Err(Error::Internal(
            "binomial interpolation failed to reproduce the polynomial".into(),
        ));
    }
    Ok(coeffs.into_iter().collect())
}

/// A polynomial certified to map ℤ^m into ℤ, with its integer
/// binomial-product decomposition as the certificate.
#[derive(Debug, Clone)]
pub struct IntValuedPoly {
    pub poly: Poly,
    pub vars: usize,
    pub decomposition: Vec<(Vec<u32>, Int)>,
}

impl IntValuedPoly {
    pub fn certify(poly: Poly, m: usize) -> Result<IntValuedPoly> {
        let decomposition = binomial_decompose(&poly, m)?;
        Ok(IntValuedPoly { poly, vars: m, decomposition })
    }
}

/// K such that every integer-valued polynomial of total degree ≤ d in m
/// variables has coefficients in (1/K)ℤ: the lcm of coefficient
/// denominators over all products ∏ C(x_i, α_i) with Σα_i ≤ d.
pub fn denominator_bound(m: usize, d: u32) -> Int {
    assert!(m >= 1 && d >= 1);
    let mut k = Int::one();
    let mut stack: Vec<Vec<u32>> = vec![Vec::new()];
    for _ in 0..m {
        let mut next = Vec::new();
        for a in &stack {
            let used: u32 = a.iter().sum();
            for v in 0..=(d - used) {
                let mut b = a.clone();
                b.push(v);
                next.push(b);
            }
        }
        stack = next;
    }
    for alpha in &stack {
        let mut prod = Poly::one();
        for (i, &a) in alpha.iter().enumerate() {
            if a > 0 {
                prod = prod.mul(&binomial_poly(i, a));
            }
        }
        k = lcm_int(&k, &prod.denominator_lcm());
    }
    k
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freelie::bracket;
    use crate::rat::{int, rat};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn gen(sig: Signature, i: usize) -> LieElt {
        LieElt::generator(sig, i)
    }

    #[test]
    fn abelian_lattice_is_standard() {
        for n in [1usize, 2, 3] {
            let l = malcev_lattice(n, 1);
            assert_eq!(l.rank(), n);
            assert_eq!(l.denom, int(1));
            for i in 1..=n {
                assert!(l.contains(&gen(l.sig, i)));
            }
        }
    }

    #[test]
    fn class_two_lattice_has_half_brackets() {
        let l = malcev_lattice(2, 2);
        let sig = l.sig;
        let z = bracket(&gen(sig, 1), &gen(sig, 2)).unwrap();
        assert!(l.contains(&z.scale(&rat(1, 2))), "½[x1,x2] generates the center");
        assert!(!l.contains(&z.scale(&rat(1, 4))));
        assert!(l.contains(&gen(sig, 1)));
        assert_eq!(l.rank(), 3);
        assert_eq!(l.denom, int(2));
    }

    #[test]
    fn lattice_member_scaling() {
        let l = malcev_lattice(2, 2);
        let sig = l.sig;
        let z = bracket(&gen(sig, 1), &gen(sig, 2)).unwrap();
        assert!(lattice_member(&z.scale(&rat(1, 2)), &l, &int(1)));
        let third = gen(sig, 1).scale(&rat(1, 3));
        assert!(!lattice_member(&third, &l, &int(1)));
        assert!(lattice_member(&third, &l, &int(3)));
    }

    #[test]
    fn random_word_logs_are_members() {
        let mut rng = ChaCha8Rng::seed_from_u64(101);
        for (n, c) in [(2usize, 3usize), (3, 2)] {
            let l = malcev_lattice(n, c);
            for _ in 0..200 {
                let len = rng.gen_range(0..=12);
                let letters: Vec<i32> = (0..len)
                    .map(|_| {
                        let g = rng.gen_range(1..=n as i32);
                        if rng.gen_bool(0.5) {
                            g
                        } else {
                            -g
                        }
                    })
                    .collect();
                let w = FreeWord::from_letters(letters);
                assert!(word_log_member(&w, &l), "log of {w} escapes Λ({n},{c})");
            }
        }
    }

    #[test]
    fn lattice_is_star_closed_on_random_members() {
        let mut rng = ChaCha8Rng::seed_from_u64(103);
        for (n, c) in [(2usize, 3usize), (3, 2), (2, 2)] {
            let l = malcev_lattice(n, c);
            let members = l.basis_vectors();
            for _ in 0..100 {
                let mut combo = |rng: &mut ChaCha8Rng| {
                    let mut acc = LieElt::zero(l.sig);
                    for m in &members {
                        let k = rng.gen_range(-2i64..=2);
                        if k != 0 {
                            acc = acc.add(&m.scale(&rat(k, 1))).unwrap();
                        }
                    }
                    acc
                };
                let u = combo(&mut rng);
                let v = combo(&mut rng);
                let s = star(&u, &v).unwrap();
                assert!(l.contains(&s), "star escapes Λ({n},{c})");
            }
        }
    }

    #[test]
    fn degree_one_slice_is_generator_span() {
        for (n, c) in [(2usize, 2usize), (3, 2), (2, 3)] {
            let l = malcev_lattice(n, c);
            let dim = basis(l.sig).dim();
            // combinations of basis rows supported purely in degree one
            let high: Vec<Vec<Int>> = (n..dim)
                .map(|col| l.rows.iter().map(|r| r[col].clone()).collect())
                .collect();
            let kernel = crate::linalg::integer_kernel(&high);
            let mut deg1_rows = Vec::new();
            for combo in &kernel {
                let mut v = vec![Int::zero(); n];
                for (i, coeff) in combo.iter().enumerate() {
                    for (j, slot) in v.iter_mut().enumerate() {
                        *slot += coeff * &l.rows[i][j];
                    }
                }
                deg1_rows.push(v);
            }
            let h = row_hnf(deg1_rows);
            assert_eq!(h.len(), n, "Λ({n},{c}) ∩ V1 has wrong rank");
            for (i, r) in h.iter().enumerate() {
                for (j, v) in r.iter().enumerate() {
                    let expect = if i == j { l.denom.clone() } else { Int::zero() };
                    assert_eq!(*v, expect, "Λ({n},{c}) ∩ V1 is not ℤ^n");
                }
            }
        }
    }

    #[test]
    fn binomial_decompose_examples() {
        // x(x-1)/2 = C(x,2)
        let x = Poly::var(0);
        let f = x.mul(&x.sub(&Poly::one())).scale(&rat(1, 2));
        let d = binomial_decompose(&f, 1).unwrap();
        assert_eq!(d, vec![(vec![2u32], int(1))]);
        // xy = C(x,1)C(y,1)
        let g = Poly::var(0).mul(&Poly::var(1));
        let d = binomial_decompose(&g, 2).unwrap();
        assert_eq!(d, vec![(vec![1, 1], int(1))]);
        // x/2 is not integer-valued
        let h = Poly::var(0).scale(&rat(1, 2));
        assert!(matches!(
            binomial_decompose(&h, 1),
            Err(Error::NotIntegerValued(..))
        ));
    }

    #[test]
    fn denominator_bound_examples_and_monotonicity() {
        assert_eq!(denominator_bound(1, 1), int(1));
        assert_eq!(denominator_bound(1, 2), int(2));
        assert_eq!(denominator_bound(1, 3), int(6));
        let mut prev = Int::one();
        for d in 1..=5 {
            let k = denominator_bound(2, d);
            assert!((&k % &prev).is_zero(), "K must be monotone under divisibility");
            prev = k;
        }
    }

    #[test]
    fn integer_valued_certificates_and_derivative_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(107);
        let m = 2usize;
        for _ in 0..25 {
            let mut f = Poly::zero();
            for _ in 0..4 {
                let a0 = rng.gen_range(0..=2u32);
                let a1 = rng.gen_range(0..=2u32);
                let c = rng.gen_range(-3i64..=3);
                let term = binomial_poly(0, a0)
                    .mul(&binomial_poly(1, a1))
                    .scale(&rat(c, 1));
                f = f.add(&term);
            }
            if f.is_zero() {
                continue;
            }
            let d = f.total_degree().max(1);
            let certified = IntValuedPoly::certify(f.clone(), m).unwrap();
            assert!(!certified.decomposition.is_empty());
            for _ in 0..10 {
                let p: Vec<Rat> = (0..m)
                    .map(|_| Rat::from_integer(int(rng.gen_range(-4i64..=4))))
                    .collect();
                assert!(f.eval(&p).denom().is_one());
            }
            let k = denominator_bound(m, d);
            for var in 0..m {
                let deriv = f.partial_derivative(var);
                let den = deriv.denominator_lcm();
                assert!(
                    (&k % &den).is_zero(),
                    "derivative denominators {den} exceed K = {k} (degree {d})"
                );
            }
        }
    }

    #[test]
    fn lattice_json_shape() {
        let l = malcev_lattice(2, 2);
        let v = l.to_json();
        assert_eq!(v["denominator"], "2");
        assert_eq!(v["columns"].as_array().unwrap().len(), 3);
    }
}
