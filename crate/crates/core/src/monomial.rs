//! Occupancy vectors (monic monomials in the vertex indeterminates).

use std::cmp::Ordering;

use crate::error::{Error, Result};

/// Exponent vector `(n_1, ..., n_v)`; `n_i` tokens sit on vertex `i`.
///
/// The canonical order is lexicographic with `a_1 > a_2 > ... > a_v`, i.e.
/// exponent vectors compared lexicographically and sorted descending, so
/// `a^3` precedes `a^2b`, which precedes `b^3`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.cmp(&self.0)
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Monomial {
    pub fn from_exponents(exponents: Vec<u32>) -> Self {
        Monomial(exponents)
    }

    /// The constant monomial `1` over `v` indeterminates.
    pub fn one(v: usize) -> Self {
        Monomial(vec![0; v])
    }

    /// `a_i^power` over `v` indeterminates.
    pub fn power_of(v: usize, i: usize, power: u32) -> Self {
        let mut e = vec![0; v];
        e[i] = power;
        Monomial(e)
    }

    /// Multiset of vertex indices, e.g. `[0, 0, 2]` for `a^2c`.
    pub fn from_tokens(v: usize, tokens: &[usize]) -> Self {
        let mut e = vec![0; v];
        for &t in tokens {
            e[t] += 1;
        }
        Monomial(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> usize {
        self.0.iter().map(|&n| n as usize).sum()
    }

    /// Occupancy `n_i`.
    pub fn count(&self, i: usize) -> u32 {
        self.0[i]
    }

    pub fn times(&self, i: usize) -> Self {
        let mut e = self.0.clone();
        e[i] += 1;
        Monomial(e)
    }

    pub fn mul(&self, other: &Monomial) -> Self {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self / a_i`, or `None` when `a_i` does not divide.
    pub fn divide(&self, i: usize) -> Option<Self> {
        if self.0[i] == 0 {
            return None;
        }
        let mut e = self.0.clone();
        e[i] -= 1;
        Some(Monomial(e))
    }

    /// Indices with nonzero exponent.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &n)| n > 0)
            .map(|(i, _)| i)
    }

    /// Tokens in ascending vertex order, e.g. `a^2c` gives `[0, 0, 2]`.
    pub fn tokens(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .flat_map(|(i, &n)| std::iter::repeat_n(i, n as usize))
            .collect()
    }

    /// All degree-`k` monomials over `v` indeterminates, in canonical order.
    pub fn all(v: usize, k: usize) -> Vec<Monomial> {
        let vars: Vec<usize> = (0..v).collect();
        Monomial::all_over(v, k, &vars)
    }

    /// Degree-`k` monomials whose support lies in `vars`, canonical order.
    pub fn all_over(v: usize, k: usize, vars: &[usize]) -> Vec<Monomial> {
        let mut sorted: Vec<usize> = vars.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        let mut out = Vec::new();
        let mut current = vec![0u32; v];
        fill(&sorted, 0, k as u32, &mut current, &mut out);
        out
    }

    /// String form: factors in vertex order with caret exponents (`a^2c`).
    /// Factors are joined with `*` when any label is longer than one
    /// character, so the form stays unambiguous. The degree-0 monomial is `1`.
    pub fn format(&self, labels: &[String]) -> String {
        let separator = if labels.iter().all(|l| l.chars().count() == 1) {
            ""
        } else {
            "*"
        };
        let parts: Vec<String> = self
            .0
            .iter()
            .enumerate()
            .filter(|(_, &n)| n > 0)
            .map(|(i, &n)| {
                if n == 1 {
                    labels[i].clone()
                } else {
                    format!("{}^{}", labels[i], n)
                }
            })
            .collect();
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join(separator)
        }
    }

    /// Inverse of [`Monomial::format`]. Labels are matched longest-first.
    pub fn parse(text: &str, labels: &[String]) -> Result<Self> {
        let bad = || Error::BadMonomial(text.to_string());
        let mut e = vec![0u32; labels.len()];
        let s = text.trim();
        if s == "1" {
            return Ok(Monomial(e));
        }
        let mut by_len: Vec<(usize, &String)> = labels.iter().enumerate().collect();
        by_len.sort_by_key(|b| std::cmp::Reverse(b.1.len()));
        let mut rest = s;
        while !rest.is_empty() {
            rest = rest.strip_prefix('*').unwrap_or(rest);
            let (idx, label) = by_len
                .iter()
                .find(|(_, l)| !l.is_empty() && rest.starts_with(l.as_str()))
                .ok_or_else(bad)?;
            rest = &rest[label.len()..];
            let mut power = 1u32;
            if let Some(after) = rest.strip_prefix('^') {
                let digits: String = after.chars().take_while(char::is_ascii_digit).collect();
                if digits.is_empty() {
                    return Err(bad());
                }
                power = digits.parse().map_err(|_| bad())?;
                rest = &after[digits.len()..];
            }
            e[*idx] += power;
        }
        Ok(Monomial(e))
    }
}

fn fill(vars: &[usize], at: usize, left: u32, current: &mut Vec<u32>, out: &mut Vec<Monomial>) {
    if at + 1 >= vars.len() {
        if let Some(&last) = vars.get(at) {
            current[last] = left;
            out.push(Monomial(current.clone()));
            current[last] = 0;
        } else if left == 0 {
            out.push(Monomial(current.clone()));
        }
        return;
    }
    let var = vars[at];
    for n in (0..=left).rev() {
        current[var] = n;
        fill(vars, at + 1, left - n, current, out);
    }
    current[var] = 0;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::default_labels;

    #[test]
    fn canonical_order_puts_first_vertex_first() {
        let all = Monomial::all(3, 2);
        let labels = default_labels(3);
        let s: Vec<String> = all.iter().map(|m| m.format(&labels)).collect();
        assert_eq!(s, ["a^2", "ab", "ac", "b^2", "bc", "c^2"]);
        let mut shuffled = all.clone();
        shuffled.reverse();
        shuffled.sort();
        assert_eq!(shuffled, all);
    }

    #[test]
    fn restricted_support() {
        let ms = Monomial::all_over(5, 1, &[3, 0, 1]);
        let labels = default_labels(5);
        let s: Vec<String> = ms.iter().map(|m| m.format(&labels)).collect();
        assert_eq!(s, ["a", "b", "d"]);
        assert_eq!(Monomial::all_over(5, 0, &[0, 1]), vec![Monomial::one(5)]);
        assert!(Monomial::all_over(5, 2, &[]).is_empty());
        assert_eq!(Monomial::all_over(5, 0, &[]), vec![Monomial::one(5)]);
    }

    #[test]
    fn format_and_parse() {
        let labels = default_labels(5);
        let m = Monomial::from_exponents(vec![2, 0, 1, 0, 0]);
        assert_eq!(m.format(&labels), "a^2c");
        assert_eq!(Monomial::parse("a^2c", &labels).unwrap(), m);
        assert_eq!(Monomial::parse("1", &labels).unwrap(), Monomial::one(5));
        assert!(Monomial::parse("a^", &labels).is_err());
        assert!(Monomial::parse("z", &labels).is_err());

        let long = vec!["x1".to_string(), "x10".to_string()];
        let m = Monomial::from_exponents(vec![1, 2]);
        assert_eq!(m.format(&long), "x1*x10^2");
        assert_eq!(Monomial::parse("x1*x10^2", &long).unwrap(), m);
    }

    #[test]
    fn arithmetic() {
        let m = Monomial::from_tokens(4, &[0, 3, 3]);
        assert_eq!(m.degree(), 3);
        assert_eq!(m.tokens(), vec![0, 3, 3]);
        assert_eq!(m.divide(3).unwrap(), Monomial::from_tokens(4, &[0, 3]));
        assert!(m.divide(1).is_none());
        assert_eq!(m.times(1).count(1), 1);
        assert_eq!(m.support().collect::<Vec<_>>(), vec![0, 3]);
    }
}
