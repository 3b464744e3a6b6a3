//! Baker-Campbell-Hausdorff series in commutator form.
//!
//! `log(exp(X) exp(Y))` is expanded in the free associative algebra on two
//! letters, truncated at the requested weight, and each homogeneous part is
//! turned into brackets with the Dynkin-Specht-Wever projection
//! `P = (1/k) * sum_w c_w [w]`, where `[w]` is the left-normed bracket
//! `[[..[w1, w2], ..], wk]`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::rational::{Scalar, Q};

/// Largest bracket weight the precomputed series supports.
pub const MAX_WEIGHT: usize = 6;

/// A word over `{0 = X, 1 = Y}` read as a left-normed bracket.
pub type Word = Vec<u8>;

type Series = BTreeMap<Word, Q>;

fn series_mul(a: &Series, b: &Series, max_deg: usize) -> Series {
    let mut out = Series::new();
    for (wa, ca) in a {
        for (wb, cb) in b {
            if wa.len() + wb.len() > max_deg {
                continue;
            }
            let mut w = wa.clone();
            w.extend_from_slice(wb);
            let e = out.entry(w).or_insert_with(Q::zero);
            *e += ca * cb;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn factorial(k: usize) -> BigInt {
    (1..=k).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

fn exp_letter(letter: u8, max_deg: usize) -> Series {
    (0..=max_deg).map(|k| (vec![letter; k], Q::new(BigInt::one(), factorial(k)))).collect()
}

/// Coefficients of `log(exp(X) exp(Y))` as an associative series, up to `max_deg`.
pub fn log_exp_exp(max_deg: usize) -> Series {
    let prod = series_mul(&exp_letter(0, max_deg), &exp_letter(1, max_deg), max_deg);
    let mut w = prod;
    w.remove(&Vec::new());
    let mut out = Series::new();
    let mut power = w.clone();
    for m in 1..=max_deg {
        let sign = if m % 2 == 1 { Q::one() } else { -Q::one() };
        let c = sign / Q::from_integer(BigInt::from(m));
        for (word, v) in &power {
            *out.entry(word.clone()).or_insert_with(Q::zero) += v * &c;
        }
        power = series_mul(&power, &w, max_deg);
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// BCH terms `(word, coefficient)` with `Z = sum coef * [word]`, all words of
/// length at most `max_weight`. Words that collapse to zero brackets (like
/// `XX...`) keep their coefficient; the bracket evaluates them to zero.
pub fn bch_terms(max_weight: usize) -> Vec<(Word, Q)> {
    let series = log_exp_exp(max_weight);
    let mut out: BTreeMap<Word, Q> = BTreeMap::new();
    for (word, c) in series {
        let k = word.len();
        if k == 1 {
            *out.entry(word).or_insert_with(Q::zero) += c;
            continue;
        }
        // a left-normed bracket starting with two equal letters vanishes
        if word[0] == word[1] {
            continue;
        }
        let c = c / Q::from_integer(BigInt::from(k));
        *out.entry(word).or_insert_with(Q::zero) += c;
    }
    out.retain(|_, c| !c.is_zero());
    out.into_iter().collect()
}

/// Evaluate `sum coef * [word]` for concrete `x`, `y` with the given bracket.
/// Prefix brackets are shared between words.
pub fn eval_terms<S, F>(terms: &[(Word, Q)], x: &[S], y: &[S], bracket: F) -> Vec<S>
where
    S: Scalar,
    F: Fn(&[S], &[S]) -> Vec<S>,
{
    let n = x.len();
    let mut memo: BTreeMap<Word, Vec<S>> = BTreeMap::new();
    memo.insert(vec![0], x.to_vec());
    memo.insert(vec![1], y.to_vec());
    let mut out = vec![S::zero_elem(); n];
    for (word, c) in terms {
        for len in 2..=word.len() {
            let prefix = &word[..len];
            if memo.contains_key(prefix) {
                continue;
            }
            let head = memo[&word[..len - 1]].clone();
            let last = if word[len - 1] == 0 { x } else { y };
            memo.insert(prefix.to_vec(), bracket(&head, last));
        }
        let v = &memo[word];
        let cs = S::from_q(c);
        for (o, vi) in out.iter_mut().zip(v) {
            *o = o.add(&cs.mul(vi));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qr;

    fn coef(terms: &[(Word, Q)], w: &[u8]) -> Q {
        terms.iter().find(|(t, _)| t == w).map(|(_, c)| c.clone()).unwrap_or_else(Q::zero)
    }

    #[test]
    fn weight_two_is_half_bracket() {
        let t = bch_terms(2);
        assert_eq!(coef(&t, &[0]), qr(1, 1));
        assert_eq!(coef(&t, &[1]), qr(1, 1));
        // (XY - YX)/2 -> [X,Y]/2 after the Dynkin projection
        assert_eq!(coef(&t, &[0, 1]), qr(1, 4));
        assert_eq!(coef(&t, &[1, 0]), qr(-1, 4));
    }

    // Free nilpotent model: evaluate the series with a bracket in the free Lie
    // algebra of rank 2 truncated at weight 3, encoded via the Hall basis
    // X, Y, [X,Y], [X,[X,Y]], [Y,[X,Y]] in coordinates 0..5.
    fn free3_bracket(u: &[Q], v: &[Q]) -> Vec<Q> {
        // [e0,e1]=e2, [e0,e2]=e3, [e1,e2]=e4
        let mut out = vec![Q::zero(); 5];
        let b = |i: usize, j: usize| u[i].clone() * v[j].clone() - u[j].clone() * v[i].clone();
        out[2] = b(0, 1);
        out[3] = b(0, 2);
        out[4] = b(1, 2);
        out
    }

    #[test]
    fn weight_three_matches_closed_form() {
        // Z = X + Y + 1/2[X,Y] + 1/12[X,[X,Y]] - 1/12[Y,[X,Y]]
        let t = bch_terms(3);
        let x = vec![Q::one(), Q::zero(), Q::zero(), Q::zero(), Q::zero()];
        let y = vec![Q::zero(), Q::one(), Q::zero(), Q::zero(), Q::zero()];
        let z = eval_terms(&t, &x, &y, free3_bracket);
        assert_eq!(z, vec![qr(1, 1), qr(1, 1), qr(1, 2), qr(1, 12), qr(-1, 12)]);
    }

    #[test]
    fn series_is_antisymmetric_in_inverse() {
        // log(exp(X)exp(-X)) = 0
        let t = bch_terms(MAX_WEIGHT);
        let x = vec![qr(2, 3), qr(-1, 5), qr(1, 1), qr(0, 1), qr(3, 1)];
        let mx: Vec<Q> = x.iter().map(|v| -v.clone()).collect();
        let z = eval_terms(&t, &x, &mx, free3_bracket);
        assert!(z.iter().all(|c| c.is_zero()));
    }
}
