//! Truncated free nilpotent groups in exponential coordinates.
//!
//! A group element of the class-`c` truncation is stored as its logarithm, a
//! [`LieElt`]; log and exp are the identity on the coordinate representation.
//! The group law is the truncated Baker–Campbell–Hausdorff product, computed
//! exactly as `log(exp(x)·exp(y))` in the truncated tensor algebra rather
//! than from a transcribed BCH formula.

use crate::freelie::{basis, bracket, LieElt, Scalar, Signature, Tensor};
use crate::linalg::QMat;
use crate::rat::{Int, Rat};
use crate::{Error, Result};
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;

/// A group element of the truncation, i.e. a Lie algebra element read in
/// exponential coordinates.
pub type GroupElt = LieElt;

/// BCH star product `x * y = log(exp(x) exp(y))`, exact and truncated at the
/// nilpotency class. Associative within the truncation; `star(x, -x) = 0`.
pub fn star(x: &LieElt, y: &LieElt) -> Result<LieElt> {
    if x.sig() != y.sig() {
        return Err(Error::SignatureMismatch(format!("{} vs {}", x.sig(), y.sig())));
    }
    let b = basis(x.sig());
    let tx = Tensor::from_components(&b, &x.dense());
    let ty = Tensor::from_components(&b, &y.dense());
    let z = tx.exp().mul(&ty.exp()).log().project(&b);
    Ok(LieElt::from_dense(x.sig(), &z))
}

/// Star product on dense coordinate vectors over any scalar ring.
pub fn star_dense<S: Scalar>(
    basis_ref: &crate::freelie::HallBasis,
    x: &[S],
    y: &[S],
) -> Vec<S> {
    let tx = Tensor::from_components(basis_ref, x);
    let ty = Tensor::from_components(basis_ref, y);
    tx.exp().mul(&ty.exp()).log().project(basis_ref)
}

/// Group inverse in exponential coordinates.
pub fn group_inverse(x: &LieElt) -> LieElt {
    x.neg()
}

/// A reduced word in the free group F_n. Letters are nonzero signed
/// generator indices, 1-based; `-i` is the inverse of generator `i`.
/// Adjacent cancelling letters are removed eagerly, so words are canonical.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FreeWord {
    letters: Vec<i32>,
}

impl FreeWord {
    pub fn empty() -> Self {
        FreeWord { letters: Vec::new() }
    }

    pub fn generator(i: usize) -> Self {
        FreeWord { letters: vec![i as i32] }
    }

    pub fn from_letters(letters: Vec<i32>) -> Self {
        let mut out: Vec<i32> = Vec::with_capacity(letters.len());
        for l in letters {
            assert!(l != 0, "letters are nonzero signed indices");
            if out.last() == Some(&-l) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        FreeWord { letters: out }
    }

    pub fn letters(&self) -> &[i32] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn mul(&self, other: &FreeWord) -> FreeWord {
        let mut l = self.letters.clone();
        l.extend_from_slice(&other.letters);
        FreeWord::from_letters(l)
    }

    pub fn inverse(&self) -> FreeWord {
        FreeWord { letters: self.letters.iter().rev().map(|l| -l).collect() }
    }

    pub fn pow(&self, k: i32) -> FreeWord {
        let base = if k >= 0 { self.clone() } else { self.inverse() };
        let mut out = FreeWord::empty();
        for _ in 0..k.abs() {
            out = out.mul(&base);
        }
        out
    }

    /// `[u, v] = u v u⁻¹ v⁻¹`.
    pub fn commutator(u: &FreeWord, v: &FreeWord) -> FreeWord {
        u.mul(v).mul(&u.inverse()).mul(&v.inverse())
    }

    /// Parses whitespace-separated letters `a<i>` and `a<i>^-1`. When `n` is
    /// even, surface aliases `b<i> = a<g+i>` with `2g = n` are accepted.
    pub fn parse(s: &str, n: usize) -> Result<FreeWord> {
        let mut letters = Vec::new();
        for tok in s.split_whitespace() {
            let (body, sign) = match tok.split_once('^') {
                None => (tok, 1),
                Some((b, "-1")) => (b, -1),
                Some((b, "1")) => (b, 1),
                Some((_, e)) => {
                    return Err(Error::Parse(format!("unsupported exponent {e:?} in {tok:?}")))
                }
            };
            let (kind, idx) = body.split_at(1);
            let i: usize = idx
                .parse()
                .map_err(|_| Error::Parse(format!("bad letter {tok:?}")))?;
            let gen = match kind {
                "a" => i,
                "b" if n % 2 == 0 => n / 2 + i,
                _ => return Err(Error::Parse(format!("bad letter {tok:?}"))),
            };
            if gen == 0 || gen > n {
                return Err(Error::Parse(format!("letter {tok:?} out of range for n={n}")));
            }
            letters.push(sign * gen as i32);
        }
        Ok(FreeWord::from_letters(letters))
    }
}

impl std::fmt::Display for FreeWord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut first = true;
        for &l in &self.letters {
            if !first {
                write!(f, " ")?;
            }
            first = false;
            if l > 0 {
                write!(f, "a{l}")?;
            } else {
                write!(f, "a{}^-1", -l)?;
            }
        }
        Ok(())
    }
}

/// Evaluates an explicit letter sequence (not necessarily reduced) in the
/// truncation: the log of the image of the word.
pub fn eval_letters(letters: &[i32], sig: Signature) -> LieElt {
    let b = basis(sig);
    let mut t: Tensor<Rat> = Tensor::one(sig.c);
    for &l in letters {
        let gen = (l.unsigned_abs() as usize) - 1;
        assert!(gen < sig.n, "letter out of range");
        t = t.mul_exp_gen(gen, l.signum() as i64);
    }
    LieElt::from_dense(sig, &t.log().project(&b))
}

/// Multiplicative word evaluation: `eval(uv) = star(eval u, eval v)`,
/// `eval(empty) = 0`.
pub fn eval_word(w: &FreeWord, sig: Signature) -> LieElt {
    eval_letters(w.letters(), sig)
}

/// An endomorphism of F_n, given by generator images.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreeEndo {
    n: usize,
    images: Vec<FreeWord>,
}

impl FreeEndo {
    pub fn new(n: usize, images: Vec<FreeWord>) -> Self {
        assert_eq!(images.len(), n);
        FreeEndo { n, images }
    }

    pub fn identity(n: usize) -> Self {
        FreeEndo::new(n, (1..=n).map(FreeWord::generator).collect())
    }

    /// Transvection `a_i ↦ a_i a_j`, other generators fixed.
    pub fn transvection(n: usize, i: usize, j: usize) -> Self {
        assert!(i != j && i >= 1 && j >= 1 && i <= n && j <= n);
        let mut e = FreeEndo::identity(n);
        e.images[i - 1] = FreeWord::generator(i).mul(&FreeWord::generator(j));
        e
    }

    /// Inversion `a_i ↦ a_i⁻¹`, other generators fixed.
    pub fn inversion(n: usize, i: usize) -> Self {
        let mut e = FreeEndo::identity(n);
        e.images[i - 1] = FreeWord::generator(i).inverse();
        e
    }

    /// `a_i ↦ a_{perm(i)}` where `perm` is 1-based.
    pub fn permutation(n: usize, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), n);
        FreeEndo::new(n, perm.iter().map(|&p| FreeWord::generator(p)).collect())
    }

    /// Inner automorphism `u ↦ w u w⁻¹`.
    pub fn conjugation(n: usize, w: &FreeWord) -> Self {
        FreeEndo::new(
            n,
            (1..=n)
                .map(|i| w.mul(&FreeWord::generator(i)).mul(&w.inverse()))
                .collect(),
        )
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn image(&self, i: usize) -> &FreeWord {
        &self.images[i - 1]
    }

    pub fn images(&self) -> &[FreeWord] {
        &self.images
    }

    pub fn apply_word(&self, w: &FreeWord) -> FreeWord {
        let mut letters = Vec::new();
        for &l in w.letters() {
            let img = &self.images[(l.unsigned_abs() as usize) - 1];
            if l > 0 {
                letters.extend_from_slice(img.letters());
            } else {
                letters.extend(img.inverse().letters().iter().copied());
            }
        }
        FreeWord::from_letters(letters)
    }

    /// Composition `(self ∘ other)(w) = self(other(w))`.
    pub fn compose(&self, other: &FreeEndo) -> FreeEndo {
        assert_eq!(self.n, other.n);
        FreeEndo::new(
            self.n,
            other.images.iter().map(|w| self.apply_word(w)).collect(),
        )
    }

    /// Abelianization matrix: `M[r][c]` is the exponent sum of `a_{r+1}` in
    /// the image of `a_{c+1}`.
    pub fn abelianization(&self) -> Vec<Vec<Int>> {
        let mut m = vec![vec![Int::zero(); self.n]; self.n];
        for (c, img) in self.images.iter().enumerate() {
            for &l in img.letters() {
                let r = (l.unsigned_abs() as usize) - 1;
                if l > 0 {
                    m[r][c] += 1;
                } else {
                    m[r][c] -= 1;
                }
            }
        }
        m
    }

    /// Wire map `{"a1": "a1 a2", ...}`.
    pub fn to_json_map(&self) -> BTreeMap<String, String> {
        (1..=self.n)
            .map(|i| (format!("a{i}"), self.images[i - 1].to_string()))
            .collect()
    }

    pub fn from_json_map(n: usize, map: &BTreeMap<String, String>) -> Result<FreeEndo> {
        let mut images = Vec::with_capacity(n);
        for i in 1..=n {
            let key_a = format!("a{i}");
            let key_b = if n % 2 == 0 && i > n / 2 {
                Some(format!("b{}", i - n / 2))
            } else {
                None
            };
            let w = map
                .get(&key_a)
                .or_else(|| key_b.as_ref().and_then(|k| map.get(k)))
                .ok_or_else(|| Error::Parse(format!("missing image of {key_a}")))?;
            images.push(FreeWord::parse(w, n)?);
        }
        Ok(FreeEndo::new(n, images))
    }
}

/// Fraction-free integer determinant (Bareiss).
pub fn int_det(mat: &[Vec<Int>]) -> Int {
    let n = mat.len();
    if n == 0 {
        return Int::one();
    }
    let mut a: Vec<Vec<Int>> = mat.to_vec();
    let mut sign = 1i64;
    let mut prev = Int::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else {
                return Int::zero();
            };
            a.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = &t / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    if sign < 0 {
        -d
    } else {
        d
    }
}

/// A Lie algebra automorphism of the free nilpotent algebra, stored as the
/// generator images together with its full matrix and a certified inverse.
#[derive(Debug, Clone)]
pub struct LieAut {
    sig: Signature,
    gen_images: Vec<LieElt>,
    mat: QMat,
    inv_mat: QMat,
}

impl LieAut {
    /// Extends generator images to a Lie algebra endomorphism by Hall-word
    /// substitution and certifies invertibility by exact matrix inversion.
    pub fn from_gen_images(sig: Signature, gen_images: Vec<LieElt>) -> Result<LieAut> {
        assert_eq!(gen_images.len(), sig.n);
        let b = basis(sig);
        let mut images: Vec<LieElt> = Vec::with_capacity(b.dim());
        for i in 0..b.dim() {
            let img = match b.pair_parts(i) {
                None => gen_images[i].clone(),
                Some((l, r)) => bracket(&images[l], &images[r])?,
            };
            images.push(img);
        }
        let mat = QMat::from_columns(&images.iter().map(|e| e.dense()).collect::<Vec<_>>());
        let inv_mat = mat
            .inverse()
            .ok_or_else(|| Error::NonInvertible("induced Lie algebra map is singular".into()))?;
        Ok(LieAut { sig, gen_images, mat, inv_mat })
    }

    pub fn identity(sig: Signature) -> LieAut {
        let gens = (1..=sig.n).map(|i| LieElt::generator(sig, i)).collect();
        LieAut::from_gen_images(sig, gens).expect("identity is invertible")
    }

    pub fn sig(&self) -> Signature {
        self.sig
    }

    pub fn gen_images(&self) -> &[LieElt] {
        &self.gen_images
    }

    /// Images of the generators under the stored inverse.
    pub fn inverse_gen_images(&self) -> Vec<LieElt> {
        (0..self.sig.n)
            .map(|i| LieElt::from_dense(self.sig, &self.inv_mat.column(i)))
            .collect()
    }

    pub fn apply(&self, u: &LieElt) -> Result<LieElt> {
        if u.sig() != self.sig {
            return Err(Error::SignatureMismatch(format!("{} vs {}", u.sig(), self.sig)));
        }
        Ok(LieElt::from_dense(self.sig, &self.mat.mul_vec(&u.dense())))
    }

    pub fn apply_inverse(&self, u: &LieElt) -> Result<LieElt> {
        if u.sig() != self.sig {
            return Err(Error::SignatureMismatch(format!("{} vs {}", u.sig(), self.sig)));
        }
        Ok(LieElt::from_dense(self.sig, &self.inv_mat.mul_vec(&u.dense())))
    }

    /// `(self ∘ other)(u) = self(other(u))`.
    pub fn compose(&self, other: &LieAut) -> LieAut {
        assert_eq!(self.sig, other.sig);
        LieAut {
            sig: self.sig,
            gen_images: (0..self.sig.n)
                .map(|i| {
                    LieElt::from_dense(self.sig, &self.mat.mul_vec(&other.mat.column(i)))
                })
                .collect(),
            mat: self.mat.mul(&other.mat),
            inv_mat: other.inv_mat.mul(&self.inv_mat),
        }
    }

    pub fn inverse(&self) -> LieAut {
        LieAut {
            sig: self.sig,
            gen_images: self.inverse_gen_images(),
            mat: self.inv_mat.clone(),
            inv_mat: self.mat.clone(),
        }
    }
}

/// Applies a Lie algebra automorphism to an element.
pub fn apply_aut(a: &LieAut, u: &LieElt) -> Result<LieElt> {
    a.apply(u)
}

/// Extends a free-group endomorphism to a Lie algebra automorphism of the
/// truncation: generator `i` maps to `eval_word(e(a_i))`.
///
/// Fails with `NonInvertible` when `e` does not induce an automorphism of
/// the truncated group (abelianization not unimodular, or the induced linear
/// map is singular).
pub fn extend_endo(e: &FreeEndo, sig: Signature) -> Result<LieAut> {
    assert_eq!(e.n(), sig.n, "endomorphism rank must match signature");
    let ab = e.abelianization();
    let det = int_det(&ab);
    if det.abs() != Int::one() {
        return Err(Error::NonInvertible(format!(
            "abelianization determinant {det} is not ±1"
        )));
    }
    let images = (1..=sig.n)
        .map(|i| eval_word(e.image(i), sig))
        .collect::<Vec<_>>();
    LieAut::from_gen_images(sig, images)
}

/// Andreadakis filtration membership: true iff `e` acts trivially on the
/// class-`(k-1)` truncation, i.e. `eval(e(a_i)) = x_i` in signature
/// `(n, k-1)` for every generator.
pub fn andreadakis_member(e: &FreeEndo, k: usize) -> Result<bool> {
    assert!(k >= 2, "Andreadakis groups are indexed by k >= 2");
    let sig = Signature::new(e.n(), k - 1);
    extend_endo(e, sig)?;
    for i in 1..=e.n() {
        if eval_word(e.image(i), sig) != LieElt::generator(sig, i) {
            return Ok(false);
        }
    }
    Ok(true)
}
