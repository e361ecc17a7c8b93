//! Declared-tag planning. For a rate a/b, every declared language gets
//! b·k literals of which exactly a·k are truly in that language; the wrong
//! ones are borrowed from other languages. Literals that fit no slot stay
//! untagged.

use rand::seq::SliceRandom;
use rand::Rng;

/// Smallest fraction a/b (b ≤ 10000) equal to `rate` within 1e-9.
pub(crate) fn fraction(rate: f64) -> (u64, u64) {
    for b in 1..=10_000u64 {
        let a = (rate * b as f64).round();
        if (a / b as f64 - rate).abs() < 1e-9 {
            return (a as u64, b);
        }
    }
    ((rate * 10_000.0).round() as u64, 10_000)
}

/// `truth[i]` is the true language index of literal i. Returns the declared
/// language index of every literal, `None` for untagged.
pub(crate) fn assign_tags<R: Rng>(truth: &[usize], languages: usize, rate: f64, rng: &mut R) -> Vec<Option<usize>> {
    let (a, b) = fraction(rate);
    let (a, b) = (a as usize, b as usize);
    let mut own: Vec<Vec<usize>> = vec![Vec::new(); languages];
    for (i, &l) in truth.iter().enumerate() {
        own[l].push(i);
    }
    for ids in &mut own {
        ids.shuffle(rng);
    }
    let mut k: Vec<usize> = own.iter().map(|ids| ids.len() / b).collect();
    loop {
        if let Some(plan) = try_plan(&own, &k, a, b) {
            let mut declared = vec![None; truth.len()];
            for (lang, ids) in plan.iter().enumerate() {
                for &i in ids {
                    declared[i] = Some(lang);
                }
            }
            return declared;
        }
        // Shrink the language whose borrowing need is largest.
        let worst = (0..languages).filter(|&l| k[l] > 0).max_by_key(|&l| (k[l], std::cmp::Reverse(l)));
        match worst {
            Some(l) => k[l] -= 1,
            None => return vec![None; truth.len()],
        }
    }
}

fn try_plan(own: &[Vec<usize>], k: &[usize], a: usize, b: usize) -> Option<Vec<Vec<usize>>> {
    let n = own.len();
    let mut plan: Vec<Vec<usize>> = (0..n).map(|l| own[l][..a * k[l]].to_vec()).collect();
    let mut supply: Vec<Vec<usize>> = (0..n).map(|l| own[l][a * k[l]..].to_vec()).collect();
    let mut need: Vec<usize> = k.iter().map(|&k| (b - a) * k).collect();
    loop {
        let Some(taker) = (0..n).filter(|&l| need[l] > 0).max_by_key(|&l| (need[l], std::cmp::Reverse(l))) else {
            return Some(plan);
        };
        let donor = (0..n)
            .filter(|&l| l != taker && !supply[l].is_empty())
            .max_by_key(|&l| (supply[l].len(), std::cmp::Reverse(l)))?;
        plan[taker].push(supply[donor].pop().expect("donor has supply"));
        need[taker] -= 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn fractions() {
        assert_eq!(fraction(0.7), (7, 10));
        assert_eq!(fraction(1.0), (1, 1));
        assert_eq!(fraction(0.0), (0, 1));
        assert_eq!(fraction(0.125), (1, 8));
    }

    fn shares(truth: &[usize], declared: &[Option<usize>], n: usize) -> Vec<(usize, usize)> {
        let mut out = vec![(0, 0); n];
        for (t, d) in truth.iter().zip(declared) {
            if let Some(d) = d {
                out[*d].1 += 1;
                if d == t {
                    out[*d].0 += 1;
                }
            }
        }
        out
    }

    #[test]
    fn every_declared_language_hits_the_rate() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let weights = [50, 15, 10, 8, 7, 5, 3, 2];
        let truth: Vec<usize> = (0..2000).map(|_| {
            let mut x = rng.gen_range(0..100);
            weights.iter().position(|w| { if x < *w { true } else { x -= w; false } }).unwrap()
        }).collect();
        let declared = assign_tags(&truth, 8, 0.7, &mut rng);
        let mut tagged = 0;
        for (correct, total) in shares(&truth, &declared, 8) {
            assert_eq!(correct * 10, total * 7);
            tagged += total;
        }
        assert!(tagged > 1500, "{tagged}");
    }

    #[test]
    fn single_language_cannot_borrow() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let declared = assign_tags(&[0; 30], 1, 0.7, &mut rng);
        assert!(declared.iter().all(Option::is_none));
        let declared = assign_tags(&[0; 30], 1, 1.0, &mut rng);
        assert!(declared.iter().all(|d| *d == Some(0)));
    }
}
