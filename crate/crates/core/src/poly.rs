//! Multivariate polynomials over ℚ with exact arithmetic.
//!
//! Exponent vectors are stored with trailing zeros trimmed, so a polynomial
//! is usable in any ambient variable count; `x_i` is variable index `i`
//! (0-based internally).

use crate::rat::{rat_from_str, rat_to_string, Int, Rat};
use crate::{Error, Result};
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;

type Expt = Vec<u32>;

fn trim(mut e: Expt) -> Expt {
    while e.last() == Some(&0) {
        e.pop();
    }
    e
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Poly {
    terms: BTreeMap<Expt, Rat>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Poly::constant(Rat::one())
    }

    pub fn constant(r: Rat) -> Self {
        let mut p = Poly::zero();
        if !r.is_zero() {
            p.terms.insert(Vec::new(), r);
        }
        p
    }

    /// The variable `x_var` (0-based).
    pub fn var(var: usize) -> Self {
        let mut e = vec![0u32; var + 1];
        e[var] = 1;
        let mut p = Poly::zero();
        p.terms.insert(e, Rat::one());
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.is_empty())
    }

    pub fn constant_term(&self) -> Rat {
        self.terms.get(&Vec::new()).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Expt, &Rat)> {
        self.terms.iter()
    }

    pub fn num_vars(&self) -> usize {
        self.terms.keys().map(|e| e.len()).max().unwrap_or(0)
    }

    pub fn add_term(&mut self, e: Expt, c: Rat) {
        if c.is_zero() {
            return;
        }
        let e = trim(e);
        let entry = self.terms.entry(e.clone()).or_insert_with(Rat::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.add_term(e.clone(), -c.clone());
        }
        out
    }

    pub fn neg(&self) -> Poly {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = -c.clone();
        }
        out
    }

    pub fn scale(&self, r: &Rat) -> Poly {
        if r.is_zero() {
            return Poly::zero();
        }
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c *= r;
        }
        out
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let n = e1.len().max(e2.len());
                let mut e = vec![0u32; n];
                for (i, v) in e1.iter().enumerate() {
                    e[i] += v;
                }
                for (i, v) in e2.iter().enumerate() {
                    e[i] += v;
                }
                out.add_term(e, c1 * c2);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut out = Poly::one();
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms
            .keys()
            .map(|e| e.get(var).copied().unwrap_or(0))
            .max()
            .unwrap_or(0)
    }

    pub fn eval(&self, vals: &[Rat]) -> Rat {
        let mut acc = Rat::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (i, &k) in e.iter().enumerate() {
                for _ in 0..k {
                    t *= &vals[i];
                }
            }
            acc += t;
        }
        acc
    }

    /// Substitutes `sub` for variable `var`, leaving other variables fixed.
    pub fn substitute(&self, var: usize, sub: &Poly) -> Poly {
        let mut out = Poly::zero();
        let max_k = self.degree_in(var);
        let mut powers = Vec::with_capacity(max_k as usize + 1);
        powers.push(Poly::one());
        for k in 1..=max_k {
            let prev = powers[(k - 1) as usize].clone();
            powers.push(prev.mul(sub));
        }
        for (e, c) in &self.terms {
            let k = e.get(var).copied().unwrap_or(0);
            let mut rest = e.clone();
            if var < rest.len() {
                rest[var] = 0;
            }
            let mut term = Poly::zero();
            term.add_term(rest, c.clone());
            out = out.add(&term.mul(&powers[k as usize]));
        }
        out
    }

    /// Simultaneous substitution of every variable: variable `i` becomes
    /// `subs[i]`. Variables beyond `subs.len()` must not occur.
    pub fn compose(&self, subs: &[Poly]) -> Poly {
        let mut out = Poly::zero();
        // memoized powers per variable
        let mut powers: Vec<Vec<Poly>> = subs.iter().map(|_| vec![Poly::one()]).collect();
        for (e, c) in &self.terms {
            let mut term = Poly::constant(c.clone());
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                assert!(i < subs.len(), "compose: variable {i} out of range");
                while powers[i].len() <= k as usize {
                    let next = powers[i].last().unwrap().mul(&subs[i]);
                    powers[i].push(next);
                }
                term = term.mul(&powers[i][k as usize]);
            }
            out = out.add(&term);
        }
        out
    }

    pub fn partial_derivative(&self, var: usize) -> Poly {
        let mut out = Poly::zero();
        for (e, c) in &self.terms {
            let k = e.get(var).copied().unwrap_or(0);
            if k == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[var] = k - 1;
            out.add_term(e2, c * Rat::from_integer(Int::from(k)));
        }
        out
    }

    /// Antiderivative in `var` with zero constant of integration.
    pub fn antiderivative(&self, var: usize) -> Poly {
        let mut out = Poly::zero();
        for (e, c) in &self.terms {
            let k = e.get(var).copied().unwrap_or(0);
            let mut e2 = e.clone();
            if e2.len() <= var {
                e2.resize(var + 1, 0);
            }
            e2[var] = k + 1;
            out.add_term(e2, c / Rat::from_integer(Int::from(k + 1)));
        }
        out
    }

    fn leading(&self) -> Option<(&Expt, &Rat)> {
        self.terms.iter().next_back()
    }

    /// Multivariate division by a single divisor under the lex order implied
    /// by the exponent encoding; returns `(quotient, remainder)`.
    pub fn divide(&self, divisor: &Poly) -> (Poly, Poly) {
        let (dlead, dcoef) = divisor.leading().expect("division by zero polynomial");
        let dlead = dlead.clone();
        let dcoef = dcoef.clone();
        let mut rem = self.clone();
        let mut quot = Poly::zero();
        let mut out_rem = Poly::zero();
        while let Some((rlead, rcoef)) = rem.leading() {
            let divisible = rlead.len() >= dlead.len()
                && dlead.iter().enumerate().all(|(i, &d)| rlead.get(i).copied().unwrap_or(0) >= d);
            if divisible {
                let mut e = rlead.clone();
                for (i, &d) in dlead.iter().enumerate() {
                    e[i] -= d;
                }
                let c = rcoef / &dcoef;
                let mut t = Poly::zero();
                t.add_term(e, c);
                rem = rem.sub(&t.mul(divisor));
                quot = quot.add(&t);
            } else {
                let (e, c) = (rlead.clone(), rcoef.clone());
                let mut t = Poly::zero();
                t.add_term(e.clone(), c.clone());
                rem = rem.sub(&t);
                out_rem.add_term(e, c);
            }
        }
        (quot, out_rem)
    }

    /// Exact division; `DivisionFailure` if a nonzero remainder is left.
    pub fn divide_exact(&self, divisor: &Poly) -> Result<Poly> {
        let (q, r) = self.divide(divisor);
        if r.is_zero() {
            Ok(q)
        } else {
            Err(Error::DivisionFailure(format!("remainder {r}")))
        }
    }

    /// lcm of coefficient denominators.
    pub fn denominator_lcm(&self) -> Int {
        let mut acc = Int::one();
        for c in self.terms.values() {
            acc = crate::rat::lcm_denom(&acc, c);
        }
        acc
    }

    /// Wire map `{"e1,e2,...": "p/q"}` with exponent keys padded to `nvars`.
    pub fn to_json_map(&self, nvars: usize) -> BTreeMap<String, String> {
        let mut out = BTreeMap::new();
        for (e, c) in &self.terms {
            let mut key: Vec<String> = e.iter().map(|v| v.to_string()).collect();
            while key.len() < nvars {
                key.push("0".into());
            }
            out.insert(key.join(","), rat_to_string(c));
        }
        out
    }

    pub fn from_json_map(map: &BTreeMap<String, String>) -> Result<Poly> {
        let mut p = Poly::zero();
        for (k, v) in map {
            let e: Vec<u32> = if k.trim().is_empty() {
                Vec::new()
            } else {
                k.split(',')
                    .map(|t| {
                        t.trim()
                            .parse::<u32>()
                            .map_err(|_| Error::Parse(format!("bad exponent {t:?}")))
                    })
                    .collect::<Result<_>>()?
            };
            p.add_term(e, rat_from_str(v)?);
        }
        Ok(p)
    }
}

impl std::fmt::Display for Poly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            let cs = rat_to_string(&c.abs());
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mut wrote = false;
            if cs != "1" || e.is_empty() {
                write!(f, "{cs}")?;
                wrote = true;
            }
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                if wrote {
                    write!(f, "*")?;
                }
                write!(f, "x{}", i + 1)?;
                if k > 1 {
                    write!(f, "^{k}")?;
                }
                wrote = true;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    fn x(i: usize) -> Poly {
        Poly::var(i)
    }

    #[test]
    fn arithmetic_and_eval() {
        // (x0 + x1)^2 = x0^2 + 2 x0 x1 + x1^2
        let p = x(0).add(&x(1)).pow(2);
        assert_eq!(p.eval(&[rat(2, 1), rat(3, 1)]), rat(25, 1));
        assert_eq!(p.degree_in(0), 2);
        assert_eq!(p.total_degree(), 2);
        let d = p.partial_derivative(0);
        assert_eq!(d, x(0).scale(&rat(2, 1)).add(&x(1).scale(&rat(2, 1))));
    }

    #[test]
    fn substitution_and_compose() {
        let p = x(0).mul(&x(1)).add(&x(1));
        // x1 := 1 - x0
        let one_minus = Poly::one().sub(&x(0));
        let q = p.substitute(1, &one_minus);
        assert_eq!(q.eval(&[rat(1, 2)]), rat(3, 4));
        let r = p.compose(&[x(1), x(0)]);
        assert_eq!(r, x(1).mul(&x(0)).add(&x(0)));
    }

    #[test]
    fn exact_division_by_linear_form() {
        // (1 - x0 - x1) * (x0 + 3) divides exactly
        let form = Poly::one().sub(&x(0)).sub(&x(1));
        let p = form.mul(&x(0).add(&Poly::constant(rat(3, 1))));
        let q = p.divide_exact(&form).unwrap();
        assert_eq!(q, x(0).add(&Poly::constant(rat(3, 1))));
        assert!(p.add(&Poly::one()).divide_exact(&form).is_err());
    }

    #[test]
    fn antiderivative_inverts_derivative() {
        let p = x(0).pow(2).mul(&x(1)).scale(&rat(3, 2));
        let ad = p.antiderivative(0);
        assert_eq!(ad.partial_derivative(0), p);
    }

    #[test]
    fn json_round_trip() {
        let p = x(0).mul(&x(2)).scale(&rat(-7, 3)).add(&Poly::one());
        let m = p.to_json_map(3);
        assert_eq!(Poly::from_json_map(&m).unwrap(), p);
    }
}
