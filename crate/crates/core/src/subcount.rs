//! Exact induced-copy counting n(H,S), densities d(H,G) and the random
//! baseline density k!/|Aut(H)| * 2^-C(k,2).

use num::bigint::BigInt;
use num::{One, Signed, Zero};
use thiserror::Error;

use crate::rational::{binomial, factorial, pow2_neg, Rat};
use crate::tournament::{for_each_combination, Tournament};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SubcountError {
    #[error("pattern on {0} vertices exceeds the 7-vertex bound")]
    PatternTooLarge(usize),
    #[error("host on {0} vertices exceeds the 15-vertex bound")]
    HostTooLarge(usize),
    #[error("pattern on {pattern} vertices larger than host on {host}")]
    PatternLargerThanHost { pattern: usize, host: usize },
}

/// An exact rational density in [0, 1].
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DensityValue(Rat);

impl DensityValue {
    fn new(r: Rat) -> DensityValue {
        debug_assert!(!r.numer().is_negative() && r <= Rat::one(), "density out of range");
        DensityValue(r)
    }

    pub fn value(&self) -> &Rat {
        &self.0
    }

    pub fn into_inner(self) -> Rat {
        self.0
    }
}

/// Membership table for "is this labeled induced subtournament isomorphic to
/// the pattern", keyed by upper-triangle code bits.
pub struct PatternTable {
    k: usize,
    table: Vec<bool>,
}

impl PatternTable {
    pub fn new(pattern: &Tournament) -> Result<PatternTable, SubcountError> {
        let k = pattern.vertex_count();
        if k > 7 {
            return Err(SubcountError::PatternTooLarge(k));
        }
        let mut table = vec![false; 1usize << (k * (k - 1) / 2)];
        let mut perm: Vec<usize> = (0..k).collect();
        fill_relabelings(pattern, &mut perm, 0, &mut table);
        Ok(PatternTable { k, table })
    }

    pub fn pattern_size(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn matches_bits(&self, bits: u32) -> bool {
        self.table[bits as usize]
    }

    /// Code bits of the subtournament of `host` induced on `verts`.
    #[inline]
    pub fn induced_bits(host: &Tournament, verts: &[usize]) -> u32 {
        let mut bits = 0u32;
        for x in 0..verts.len() {
            for y in (x + 1)..verts.len() {
                bits = bits << 1 | host.beats(verts[x], verts[y]) as u32;
            }
        }
        bits
    }
}

fn fill_relabelings(pattern: &Tournament, perm: &mut Vec<usize>, depth: usize, table: &mut [bool]) {
    let k = pattern.vertex_count();
    if depth == k {
        let relabeled = pattern.relabel(perm);
        table[relabeled.code_bits() as usize] = true;
        return;
    }
    for i in depth..k {
        perm.swap(depth, i);
        fill_relabelings(pattern, perm, depth + 1, table);
        perm.swap(depth, i);
    }
}

/// Number of |h|-subsets of V(s) inducing a subtournament isomorphic to h.
pub fn count_copies(h: &Tournament, s: &Tournament) -> Result<u64, SubcountError> {
    let k = h.vertex_count();
    let n = s.vertex_count();
    if n > 15 {
        return Err(SubcountError::HostTooLarge(n));
    }
    if k > n {
        return Err(SubcountError::PatternLargerThanHost { pattern: k, host: n });
    }
    let table = PatternTable::new(h)?;
    let mut count = 0u64;
    for_each_combination(n, k, |sub| {
        if table.matches_bits(PatternTable::induced_bits(s, sub)) {
            count += 1;
        }
    });
    Ok(count)
}

/// d(H,G): probability that |H| random vertices of G induce H; zero when
/// |H| > |G|. Hosts are capped at 15 vertices like all copy counting.
pub fn density(h: &Tournament, g: &Tournament) -> DensityValue {
    let k = h.vertex_count();
    let n = g.vertex_count();
    assert!(n <= 15, "density hosts capped at 15 vertices, got {n}");
    if k > n {
        return DensityValue::new(Rat::zero());
    }
    let copies = count_copies(h, g).expect("bounds checked above");
    DensityValue::new(Rat::new(BigInt::from(copies), binomial(n as u64, k as u64)))
}

/// Expected density of h in a uniformly random tournament:
/// k!/|Aut(h)| * 2^-C(k,2).
pub fn expected_density(h: &Tournament) -> DensityValue {
    let k = h.vertex_count() as u64;
    assert!(k <= 7, "expected_density capped at 7 vertices");
    let aut = h.automorphism_count();
    let value = Rat::new(factorial(k), BigInt::from(aut)) * pow2_neg((k * (k - 1) / 2) as u32);
    DensityValue::new(value)
}

/// The copy-count threshold s^k * 2^-C(k,2) above which a blow-up witness
/// disqualifies the pattern.
pub fn blowup_threshold(h: &Tournament, s_size: usize) -> Rat {
    let k = h.vertex_count() as u32;
    Rat::from_integer(BigInt::from(s_size as u64).pow(k)) * pow2_neg(k * (k - 1) / 2)
}

/// Copy counter that maintains n(pattern, host) across single-edge flips,
/// recounting only the subsets containing both flip endpoints. Single-owner
/// accumulator; not shared between threads.
pub struct IncrementalCounter {
    table: PatternTable,
    host: Tournament,
    count: u64,
}

impl IncrementalCounter {
    pub fn new(pattern: &Tournament, host: Tournament) -> Result<IncrementalCounter, SubcountError> {
        let table = PatternTable::new(pattern)?;
        let count = count_copies(pattern, &host)?;
        Ok(IncrementalCounter { table, host, count })
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn host(&self) -> &Tournament {
        &self.host
    }

    fn flipped_host(&self, u: usize, v: usize) -> Tournament {
        let host = self.host;
        Tournament::from_orientations(host.vertex_count(), |i, j| {
            if (i, j) == (u.min(v), u.max(v)) {
                !host.beats(i, j)
            } else {
                host.beats(i, j)
            }
        })
    }

    /// Change in the copy count if the edge between u and v were reversed.
    pub fn flip_delta(&self, u: usize, v: usize) -> i64 {
        assert!(u != v);
        let flipped = self.flipped_host(u, v);
        let n = self.host.vertex_count();
        let k = self.table.pattern_size();
        let mut delta = 0i64;
        let others: Vec<usize> = (0..n).filter(|&w| w != u && w != v).collect();
        let mut subset = vec![0usize; k];
        for_each_combination(others.len(), k - 2, |rest| {
            subset[0] = u.min(v);
            subset[1] = u.max(v);
            for (slot, &ri) in rest.iter().enumerate() {
                subset[2 + slot] = others[ri];
            }
            subset.sort_unstable();
            let before = self.table.matches_bits(PatternTable::induced_bits(&self.host, &subset));
            let after = self.table.matches_bits(PatternTable::induced_bits(&flipped, &subset));
            delta += after as i64 - before as i64;
        });
        delta
    }

    pub fn apply_flip(&mut self, u: usize, v: usize) {
        let delta = self.flip_delta(u, v);
        self.host = self.flipped_host(u, v);
        self.count = (self.count as i64 + delta) as u64;
    }

    /// Full recount used by the audit hooks.
    pub fn recount_from_scratch(&self) -> u64 {
        let mut count = 0u64;
        let n = self.host.vertex_count();
        for_each_combination(n, self.table.pattern_size(), |sub| {
            if self.table.matches_bits(PatternTable::induced_bits(&self.host, sub)) {
                count += 1;
            }
        });
        count
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{catalog, h6};
    use crate::rational::{rat, rat_int};
    use crate::tournament::enumerate_tournaments;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Independent oracle: number of injective orientation-preserving maps
    /// V(h) -> V(s), counted by backtracking over ordered tuples.
    fn injective_embeddings(h: &Tournament, s: &Tournament) -> u64 {
        fn go(h: &Tournament, s: &Tournament, image: &mut Vec<usize>, used: &mut Vec<bool>) -> u64 {
            let depth = image.len();
            if depth == h.vertex_count() {
                return 1;
            }
            let mut total = 0;
            for w in 0..s.vertex_count() {
                if used[w] {
                    continue;
                }
                if (0..depth).all(|x| h.beats(depth, x) == s.beats(w, image[x])) {
                    image.push(w);
                    used[w] = true;
                    total += go(h, s, image, used);
                    image.pop();
                    used[w] = false;
                }
            }
            total
        }
        go(h, s, &mut Vec::new(), &mut vec![false; s.vertex_count()])
    }

    fn random_tournament(rng: &mut impl Rng, n: usize) -> Tournament {
        let bits: Vec<bool> = (0..n * (n - 1) / 2).map(|_| rng.gen_bool(0.5)).collect();
        let mut it = bits.into_iter();
        Tournament::from_orientations(n, |_, _| it.next().unwrap())
    }

    #[test]
    fn paper_copy_counts() {
        let h5 = catalog("H_5").unwrap();
        let s7 = catalog("S_7").unwrap();
        assert_eq!(count_copies(&h5, &s7).unwrap(), 21);
        let s11 = catalog("S_11").unwrap();
        assert_eq!(count_copies(&h6(2), &s11).unwrap(), 55);
        assert_eq!(count_copies(&h6(13), &s11).unwrap(), 55);
        let s15 = catalog("S_15").unwrap();
        assert_eq!(count_copies(&h6(12), &s15).unwrap(), 357);
    }

    #[test]
    fn count_errors_on_bounds() {
        let t5 = Tournament::transitive(5);
        let t4 = Tournament::transitive(4);
        assert!(matches!(
            count_copies(&t5, &t4),
            Err(SubcountError::PatternLargerThanHost { .. })
        ));
        let t8 = Tournament::transitive(8);
        assert!(matches!(
            count_copies(&t8, &Tournament::transitive(9)),
            Err(SubcountError::PatternTooLarge(8))
        ));
    }

    #[test]
    fn density_examples() {
        let h5 = catalog("H_5").unwrap();
        let s7 = catalog("S_7").unwrap();
        assert_eq!(density(&h5, &s7).value(), &rat_int(1));
        let c3 = catalog("C_3").unwrap();
        assert_eq!(density(&c3, &Tournament::transitive(6)).value(), &Rat::zero());
        assert_eq!(
            density(&Tournament::transitive(5), &Tournament::transitive(4)).value(),
            &Rat::zero()
        );
    }

    #[test]
    fn expected_density_examples() {
        let c3 = catalog("C_3").unwrap();
        assert_eq!(expected_density(&c3).value(), &rat(1, 4));
        let t2 = Tournament::transitive(2);
        assert_eq!(expected_density(&t2).value(), &rat_int(1));
        let h14 = h6(14); // rigid
        assert_eq!(expected_density(&h14).value(), &rat(45, 2048));
    }

    #[test]
    fn expected_densities_sum_to_one_per_order() {
        for k in 2..=6 {
            let total: Rat = enumerate_tournaments(k)
                .iter()
                .map(|t| expected_density(t).into_inner())
                .sum();
            assert_eq!(total, rat_int(1), "k={k}");
        }
    }

    #[test]
    fn densities_sum_to_one_on_random_hosts() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let classes4 = enumerate_tournaments(4);
        for _ in 0..10 {
            let host = random_tournament(&mut rng, 8);
            let total: Rat = classes4.iter().map(|h| density(h, &host).into_inner()).sum();
            assert_eq!(total, rat_int(1));
        }
    }

    #[test]
    fn labeled_embedding_double_count() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..6 {
            let host = random_tournament(&mut rng, 8);
            for h in enumerate_tournaments(4) {
                let via_subsets = count_copies(&h, &host).unwrap() * h.automorphism_count();
                assert_eq!(via_subsets, injective_embeddings(&h, &host));
            }
        }
    }

    #[test]
    fn reversal_symmetry() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..5 {
            let host = random_tournament(&mut rng, 9);
            for h in enumerate_tournaments(5).into_iter().step_by(3) {
                assert_eq!(
                    count_copies(&h, &host).unwrap(),
                    count_copies(&h.reverse(), &host.reverse()).unwrap()
                );
            }
        }
    }

    #[test]
    fn blowup_threshold_values() {
        let h5 = catalog("H_5").unwrap();
        assert_eq!(blowup_threshold(&h5, 7), rat(16807, 1024));
        let six = h6(2);
        assert_eq!(blowup_threshold(&six, 11), rat(1771561, 32768));
        assert_eq!(blowup_threshold(&six, 15), rat(11390625, 32768));
    }

    #[test]
    fn incremental_counter_tracks_flips() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let pattern = catalog("C_3").unwrap();
        let host = random_tournament(&mut rng, 9);
        let mut counter = IncrementalCounter::new(&pattern, host).unwrap();
        for _ in 0..60 {
            let u = rng.gen_range(0..9);
            let mut v = rng.gen_range(0..9);
            while v == u {
                v = rng.gen_range(0..9);
            }
            counter.apply_flip(u, v);
            assert_eq!(counter.count(), counter.recount_from_scratch());
        }
    }
}
