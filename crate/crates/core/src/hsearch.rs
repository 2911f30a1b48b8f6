//! Seeded hill-climbing search for hosts maximizing the number of induced
//! copies of a pattern, with incremental objective updates on edge flips.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::certify::{CertCheckError, Certificate};
use crate::stepton::blowup_witness_certificate;
use crate::subcount::IncrementalCounter;
use crate::tournament::{paley_tournament, Tournament, MAX_CANONICAL_VERTICES};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SearchError {
    #[error("host size {host} must exceed the pattern size {pattern}")]
    HostTooSmall { host: usize, pattern: usize },
    #[error("host size {0} exceeds the 15-vertex bound")]
    HostTooLarge(usize),
    #[error("pattern on {0} vertices exceeds the 7-vertex bound")]
    PatternTooLarge(usize),
    #[error("at least one restart is required")]
    NoRestarts,
}

/// Search configuration; identical configurations (seed included) produce
/// identical results.
#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub pattern: Tournament,
    pub host_size: usize,
    pub restarts: usize,
    pub max_plateau_steps: usize,
    pub seed: u64,
    /// When set, the incremental count is audited against a full recount
    /// after every `n` accepted flips.
    pub audit_every: Option<usize>,
}

impl SearchConfig {
    pub fn new(pattern: Tournament, host_size: usize) -> SearchConfig {
        SearchConfig {
            pattern,
            host_size,
            restarts: 8,
            max_plateau_steps: 200,
            seed: 0,
            audit_every: None,
        }
    }

    fn validate(&self) -> Result<(), SearchError> {
        let k = self.pattern.vertex_count();
        if k > 7 {
            return Err(SearchError::PatternTooLarge(k));
        }
        if self.host_size > 15 {
            return Err(SearchError::HostTooLarge(self.host_size));
        }
        if self.host_size <= k {
            return Err(SearchError::HostTooSmall {
                host: self.host_size,
                pattern: k,
            });
        }
        if self.restarts == 0 {
            return Err(SearchError::NoRestarts);
        }
        Ok(())
    }
}

/// Per-restart trajectory statistics.
#[derive(Clone, Debug)]
pub struct RestartStats {
    pub restart: usize,
    pub warm_start: bool,
    pub initial_count: u64,
    pub best_count: u64,
    pub improving_steps: usize,
    pub sideways_steps: usize,
}

#[derive(Clone, Debug)]
pub struct SearchResult {
    pub best_host: Tournament,
    pub best_count: u64,
    pub restarts: Vec<RestartStats>,
}

/// Steepest-ascent hill climbing over single-edge reversals with uniform
/// random tie-breaks, sideways moves up to a per-restart budget, and
/// restarts alternating between a quadratic-residue warm start and uniform
/// random hosts. Restarts run as independent parallel tasks with generators
/// derived from (seed, restart index).
pub fn local_search(cfg: &SearchConfig) -> Result<SearchResult, SearchError> {
    cfg.validate()?;
    let climbs: Vec<(Tournament, u64, RestartStats)> = (0..cfg.restarts)
        .into_par_iter()
        .map(|restart| climb(cfg, restart))
        .collect();
    let mut restarts = Vec::with_capacity(climbs.len());
    let mut best: Option<(Tournament, u64, String)> = None;
    for (host, count, stats) in climbs {
        restarts.push(stats);
        let key = host_order_key(&host);
        let better = match &best {
            None => true,
            Some((_, best_count, best_key)) => {
                count > *best_count || (count == *best_count && key < *best_key)
            }
        };
        if better {
            best = Some((host, count, key));
        }
    }
    let (best_host, best_count, _) = best.expect("restarts >= 1");
    Ok(SearchResult {
        best_host,
        best_count,
        restarts,
    })
}

/// Ties between equally good hosts are broken by the smallest canonical code
/// when it is available, otherwise by the raw code.
fn host_order_key(host: &Tournament) -> String {
    if host.vertex_count() <= MAX_CANONICAL_VERTICES {
        host.canonical_code().to_string()
    } else {
        host.format_code()
    }
}

fn climb(cfg: &SearchConfig, restart: usize) -> (Tournament, u64, RestartStats) {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(restart as u64 + 1);
    let warm_start = restart % 2 == 0;
    let host = if warm_start {
        warm_start_host(cfg.host_size, &mut rng)
    } else {
        random_host(cfg.host_size, &mut rng)
    };
    let mut counter =
        IncrementalCounter::new(&cfg.pattern, host).expect("validated sizes");
    let initial_count = counter.count();
    let s = cfg.host_size;
    let mut sideways_left = cfg.max_plateau_steps;
    let mut improving_steps = 0usize;
    let mut sideways_steps = 0usize;
    let mut flips = 0usize;
    loop {
        let mut best_delta = i64::MIN;
        let mut best_flips: Vec<(usize, usize)> = Vec::new();
        for u in 0..s {
            for v in (u + 1)..s {
                let delta = counter.flip_delta(u, v);
                if delta > best_delta {
                    best_delta = delta;
                    best_flips.clear();
                }
                if delta == best_delta {
                    best_flips.push((u, v));
                }
            }
        }
        if best_delta < 0 || (best_delta == 0 && sideways_left == 0) {
            break;
        }
        let &(u, v) = best_flips.choose(&mut rng).expect("nonempty neighborhood");
        counter.apply_flip(u, v);
        flips += 1;
        if best_delta > 0 {
            improving_steps += 1;
        } else {
            sideways_steps += 1;
            sideways_left -= 1;
        }
        if let Some(every) = cfg.audit_every {
            if flips % every == 0 {
                assert_eq!(
                    counter.count(),
                    counter.recount_from_scratch(),
                    "incremental count drifted from the exact recount"
                );
            }
        }
    }
    let stats = RestartStats {
        restart,
        warm_start,
        initial_count,
        best_count: counter.count(),
        improving_steps,
        sideways_steps,
    };
    (*counter.host(), counter.count(), stats)
}

fn random_host(s: usize, rng: &mut impl Rng) -> Tournament {
    let bits: Vec<bool> = (0..s * (s - 1) / 2).map(|_| rng.gen_bool(0.5)).collect();
    let mut it = bits.into_iter();
    Tournament::from_orientations(s, |_, _| it.next().unwrap())
}

/// Host whose leading block is the quadratic-residue tournament on the
/// largest admissible prime <= s; the padding edges are random.
fn warm_start_host(s: usize, rng: &mut impl Rng) -> Tournament {
    let prime = [31u64, 23, 19, 11, 7, 3]
        .into_iter()
        .find(|&q| q as usize <= s);
    let Some(q) = prime else {
        return random_host(s, rng);
    };
    let base = paley_tournament(q).expect("admissible prime");
    let q = q as usize;
    let bits: Vec<bool> = (0..s * (s - 1) / 2).map(|_| rng.gen_bool(0.5)).collect();
    let mut it = bits.into_iter();
    Tournament::from_orientations(s, |u, v| {
        let random_bit = it.next().unwrap();
        if v < q {
            base.beats(u, v)
        } else {
            random_bit
        }
    })
}

/// Wraps the blow-up threshold check around a search result.
pub fn certify_search_result(
    pattern: &Tournament,
    host: &Tournament,
) -> Result<Certificate, CertCheckError> {
    blowup_witness_certificate(pattern, host)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::catalog;

    #[test]
    fn transitive_pattern_on_tiny_host() {
        let cfg = SearchConfig {
            pattern: Tournament::transitive(3),
            host_size: 4,
            restarts: 2,
            max_plateau_steps: 20,
            seed: 1,
            audit_every: Some(1),
        };
        let result = local_search(&cfg).unwrap();
        assert_eq!(result.best_count, 4); // C(4,3) achieved by T_4
        assert!(result.best_host.is_transitive());
    }

    #[test]
    fn recovers_the_seven_vertex_optimum_for_h5() {
        let cfg = SearchConfig {
            pattern: catalog("H_5").unwrap(),
            host_size: 7,
            restarts: 2,
            max_plateau_steps: 50,
            seed: 0,
            audit_every: Some(100),
        };
        let result = local_search(&cfg).unwrap();
        assert_eq!(result.best_count, 21);
        assert!(crate::tournament::are_isomorphic(
            &result.best_host,
            &catalog("S_7").unwrap()
        ));
    }

    #[test]
    fn warm_start_reaches_the_eleven_vertex_score() {
        let cfg = SearchConfig {
            pattern: crate::catalog::h6(2),
            host_size: 11,
            restarts: 1,
            max_plateau_steps: 3,
            seed: 0,
            audit_every: None,
        };
        let result = local_search(&cfg).unwrap();
        assert!(result.best_count >= 55, "best {}", result.best_count);
        assert!(result.restarts[0].warm_start);
        assert!(result.restarts[0].initial_count >= 55);
    }

    #[test]
    fn deterministic_given_seed() {
        let cfg = SearchConfig {
            pattern: catalog("C_3").unwrap(),
            host_size: 8,
            restarts: 4,
            max_plateau_steps: 30,
            seed: 42,
            audit_every: None,
        };
        let a = local_search(&cfg).unwrap();
        let b = local_search(&cfg).unwrap();
        assert_eq!(a.best_host, b.best_host);
        assert_eq!(a.best_count, b.best_count);
    }

    #[test]
    fn best_count_never_drops_within_a_climb() {
        let cfg = SearchConfig {
            pattern: catalog("C_3").unwrap(),
            host_size: 7,
            restarts: 3,
            max_plateau_steps: 10,
            seed: 5,
            audit_every: Some(1),
        };
        let result = local_search(&cfg).unwrap();
        for stats in &result.restarts {
            assert!(stats.best_count >= stats.initial_count);
        }
        assert!(result.best_count >= result.restarts.iter().map(|r| r.best_count).max().unwrap());
    }

    #[test]
    fn config_validation() {
        let mut cfg = SearchConfig::new(catalog("H_5").unwrap(), 5);
        assert_eq!(
            local_search(&cfg).unwrap_err(),
            SearchError::HostTooSmall { host: 5, pattern: 5 }
        );
        cfg.host_size = 16;
        assert_eq!(local_search(&cfg).unwrap_err(), SearchError::HostTooLarge(16));
        cfg.host_size = 7;
        cfg.restarts = 0;
        assert_eq!(local_search(&cfg).unwrap_err(), SearchError::NoRestarts);
    }

    #[test]
    fn certify_wraps_the_blowup_check() {
        let h5 = catalog("H_5").unwrap();
        let s7 = catalog("S_7").unwrap();
        assert!(certify_search_result(&h5, &s7).is_ok());
        assert!(matches!(
            certify_search_result(&h5, &h5),
            Err(CertCheckError::Precondition(_))
        ));
    }
}
