//! Tournament representation, the upper-triangle codec, structural
//! predicates, canonical forms and isomorph-free enumeration.

use std::fmt;

use thiserror::Error;

/// Hard cap on vertex counts; hosts never exceed 15 vertices and patterns 7.
pub const MAX_VERTICES: usize = 16;

/// Largest vertex count for which exhaustive canonical labeling is offered.
pub const MAX_CANONICAL_VERTICES: usize = 8;

/// A tournament on `n` labeled vertices stored as per-vertex out-bitmasks.
///
/// Invariant: for u != v exactly one of `beats(u, v)`, `beats(v, u)` holds,
/// `beats(u, u)` never does, and rows at index >= n stay zero so derived
/// equality and hashing see only the live part.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Tournament {
    n: u8,
    rows: [u16; MAX_VERTICES],
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CodeError {
    #[error("tournament codes support at most {MAX_VERTICES} vertices, got {0}")]
    TooManyVertices(usize),
    #[error("group {index} must have {expected} digits, got {got}")]
    BadGroupLength {
        index: usize,
        expected: usize,
        got: usize,
    },
    #[error("unexpected character {0:?} in tournament code")]
    BadCharacter(char),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PaleyError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("{0} is not congruent to 3 mod 4")]
    NotThreeModFour(u64),
    #[error("Paley construction capped at q <= 31, got {0}")]
    TooLarge(u64),
}

impl Tournament {
    /// Builds a tournament from an orientation oracle on pairs `u < v`;
    /// `forward(u, v)` means the edge points u -> v.
    pub fn from_orientations(n: usize, mut forward: impl FnMut(usize, usize) -> bool) -> Tournament {
        assert!(
            (1..=MAX_VERTICES).contains(&n),
            "vertex count {n} out of range"
        );
        let mut rows = [0u16; MAX_VERTICES];
        for u in 0..n {
            for v in (u + 1)..n {
                if forward(u, v) {
                    rows[u] |= 1 << v;
                } else {
                    rows[v] |= 1 << u;
                }
            }
        }
        Tournament { n: n as u8, rows }
    }

    pub fn single_vertex() -> Tournament {
        Tournament::from_orientations(1, |_, _| unreachable!())
    }

    /// The transitive tournament with every edge pointing from lower to
    /// higher index.
    pub fn transitive(n: usize) -> Tournament {
        Tournament::from_orientations(n, |_, _| true)
    }

    pub fn vertex_count(&self) -> usize {
        self.n as usize
    }

    pub fn edge_count(&self) -> usize {
        let n = self.vertex_count();
        n * (n - 1) / 2
    }

    #[inline]
    pub fn beats(&self, u: usize, v: usize) -> bool {
        self.rows[u] >> v & 1 == 1
    }

    /// Out-degree of `u`.
    pub fn score(&self, u: usize) -> usize {
        self.rows[u].count_ones() as usize
    }

    pub fn scores(&self) -> Vec<usize> {
        (0..self.vertex_count()).map(|u| self.score(u)).collect()
    }

    /// Parses the comma-separated upper-triangle code, e.g. `0010,001,00,0`.
    /// Surrounding brackets and whitespace are ignored; the empty string is
    /// the single-vertex tournament.
    pub fn parse_code(text: &str) -> Result<Tournament, CodeError> {
        let cleaned: String = text
            .chars()
            .filter(|c| !c.is_whitespace())
            .collect::<String>()
            .trim_start_matches('[')
            .trim_end_matches(']')
            .to_string();
        for ch in cleaned.chars() {
            if !matches!(ch, '0' | '1' | ',') {
                return Err(CodeError::BadCharacter(ch));
            }
        }
        if cleaned.is_empty() {
            return Ok(Tournament::single_vertex());
        }
        let groups: Vec<&str> = cleaned.split(',').collect();
        let n = groups.len() + 1;
        if n > MAX_VERTICES {
            return Err(CodeError::TooManyVertices(n));
        }
        for (i, g) in groups.iter().enumerate() {
            let expected = n - 1 - i;
            if g.len() != expected {
                return Err(CodeError::BadGroupLength {
                    index: i + 1,
                    expected,
                    got: g.len(),
                });
            }
        }
        let mut rows = [0u16; MAX_VERTICES];
        for (i, g) in groups.iter().enumerate() {
            for (off, ch) in g.chars().enumerate() {
                let j = i + 1 + off;
                if ch == '1' {
                    rows[i] |= 1 << j;
                } else {
                    rows[j] |= 1 << i;
                }
            }
        }
        Ok(Tournament { n: n as u8, rows })
    }

    /// Inverse of [`Tournament::parse_code`] on the same labeling.
    pub fn format_code(&self) -> String {
        let n = self.vertex_count();
        let mut groups = Vec::with_capacity(n.saturating_sub(1));
        for i in 0..n.saturating_sub(1) {
            let row: String = ((i + 1)..n)
                .map(|j| if self.beats(i, j) { '1' } else { '0' })
                .collect();
            groups.push(row);
        }
        groups.join(",")
    }

    /// Upper-triangle bits packed into a `u32`, first code bit most
    /// significant, so integer order equals lexicographic code order.
    /// Only available for n <= 8.
    pub fn code_bits(&self) -> u32 {
        let n = self.vertex_count();
        assert!(n <= MAX_CANONICAL_VERTICES, "code_bits needs n <= 8");
        let mut bits = 0u32;
        for u in 0..n {
            for v in (u + 1)..n {
                bits = bits << 1 | self.beats(u, v) as u32;
            }
        }
        bits
    }

    pub fn from_code_bits(n: usize, bits: u32) -> Tournament {
        assert!(n <= MAX_CANONICAL_VERTICES);
        let total = n * (n - 1) / 2;
        let mut pos = total;
        Tournament::from_orientations(n, |_, _| {
            pos -= 1;
            bits >> pos & 1 == 1
        })
    }

    /// Applies a relabeling; `perm[position] = original vertex`.
    pub fn relabel(&self, perm: &[usize]) -> Tournament {
        let n = self.vertex_count();
        assert_eq!(perm.len(), n);
        Tournament::from_orientations(n, |i, j| self.beats(perm[i], perm[j]))
    }

    /// Reverses the orientation of every edge.
    pub fn reverse(&self) -> Tournament {
        let n = self.vertex_count();
        Tournament::from_orientations(n, |i, j| self.beats(j, i))
    }

    /// Induced subtournament on `verts` in the given order.
    pub fn subtournament(&self, verts: &[usize]) -> Tournament {
        Tournament::from_orientations(verts.len(), |i, j| self.beats(verts[i], verts[j]))
    }

    /// A tournament is transitive iff its score sequence is 0, 1, ..., n-1.
    pub fn is_transitive(&self) -> bool {
        let mut scores = self.scores();
        scores.sort_unstable();
        scores.iter().copied().eq(0..self.vertex_count())
    }

    /// Every ordered vertex pair joined by a directed path.
    pub fn is_strongly_connected(&self) -> bool {
        let n = self.vertex_count();
        self.reachable_from(0, false).count_ones() as usize == n
            && self.reachable_from(0, true).count_ones() as usize == n
    }

    fn reachable_from(&self, start: usize, reversed: bool) -> u16 {
        let n = self.vertex_count();
        let mut seen: u16 = 1 << start;
        let mut stack = vec![start];
        while let Some(u) = stack.pop() {
            for v in 0..n {
                if seen >> v & 1 == 0 {
                    let edge = if reversed {
                        self.beats(v, u)
                    } else {
                        self.beats(u, v)
                    };
                    if edge {
                        seen |= 1 << v;
                        stack.push(v);
                    }
                }
            }
        }
        seen
    }

    /// Strongly connected components, dominant component first (in a
    /// tournament the condensation is a total order).
    pub fn strong_components(&self) -> Vec<Vec<usize>> {
        let n = self.vertex_count();
        let mut order = Vec::with_capacity(n);
        let mut visited = [false; MAX_VERTICES];
        for s in 0..n {
            if !visited[s] {
                self.dfs_finish_order(s, &mut visited, &mut order);
            }
        }
        let mut comp_of = [usize::MAX; MAX_VERTICES];
        let mut comps: Vec<Vec<usize>> = Vec::new();
        for &s in order.iter().rev() {
            if comp_of[s] != usize::MAX {
                continue;
            }
            let id = comps.len();
            let mut members = Vec::new();
            let mut stack = vec![s];
            comp_of[s] = id;
            while let Some(u) = stack.pop() {
                members.push(u);
                for v in 0..n {
                    if comp_of[v] == usize::MAX && self.beats(v, u) {
                        comp_of[v] = id;
                        stack.push(v);
                    }
                }
            }
            members.sort_unstable();
            comps.push(members);
        }
        // Kosaraju emits the condensation in topological order already; the
        // dominant component is the one whose representative beats the rest.
        comps
    }

    fn dfs_finish_order(&self, start: usize, visited: &mut [bool], order: &mut Vec<usize>) {
        let n = self.vertex_count();
        visited[start] = true;
        // Iterative DFS with an explicit neighbor cursor.
        let mut stack = vec![(start, 0usize)];
        while let Some(&mut (u, ref mut next)) = stack.last_mut() {
            let mut advanced = false;
            while *next < n {
                let v = *next;
                *next += 1;
                if !visited[v] && self.beats(u, v) {
                    visited[v] = true;
                    stack.push((v, 0));
                    advanced = true;
                    break;
                }
            }
            if !advanced {
                order.push(u);
                stack.pop();
            }
        }
    }

    /// Some pair of vertices whose out-neighborhoods agree outside the pair.
    pub fn twin_pair(&self) -> Option<(usize, usize)> {
        let n = self.vertex_count();
        for u in 0..n {
            for v in (u + 1)..n {
                let mask = !(1u16 << u) & !(1u16 << v);
                if self.rows[u] & mask == self.rows[v] & mask {
                    return Some((u, v));
                }
            }
        }
        None
    }

    pub fn has_twins(&self) -> bool {
        self.twin_pair().is_some()
    }

    /// Number of orientation-preserving permutations; 1 iff rigid.
    pub fn automorphism_count(&self) -> u64 {
        assert!(self.vertex_count() <= 10, "automorphism scan capped at 10");
        let mut count = 0u64;
        self.for_each_automorphism(&mut |_| {
            count += 1;
            true
        });
        count
    }

    /// The first non-identity automorphism in lexicographic order, if any.
    pub fn nontrivial_automorphism(&self) -> Option<Vec<usize>> {
        let mut found = None;
        self.for_each_automorphism(&mut |perm| {
            if perm.iter().enumerate().any(|(i, &p)| i != p) {
                found = Some(perm.to_vec());
                false
            } else {
                true
            }
        });
        found
    }

    /// Backtracks over all automorphisms in lexicographic order of the image
    /// sequence; the callback returns false to stop early.
    fn for_each_automorphism(&self, visit: &mut impl FnMut(&[usize]) -> bool) {
        let scores = self.scores();
        let mut image = [0usize; MAX_VERTICES];
        let mut used = [false; MAX_VERTICES];
        fn go(
            t: &Tournament,
            scores: &[usize],
            depth: usize,
            image: &mut [usize; MAX_VERTICES],
            used: &mut [bool; MAX_VERTICES],
            visit: &mut impl FnMut(&[usize]) -> bool,
        ) -> bool {
            let n = t.vertex_count();
            if depth == n {
                return visit(&image[..n]);
            }
            for w in 0..n {
                if used[w] || scores[w] != scores[depth] {
                    continue;
                }
                let ok = (0..depth)
                    .all(|x| t.beats(depth, x) == t.beats(w, image[x]));
                if ok {
                    image[depth] = w;
                    used[w] = true;
                    if !go(t, scores, depth + 1, image, used, visit) {
                        return false;
                    }
                    used[w] = false;
                }
            }
            true
        }
        go(self, &scores, 0, &mut image, &mut used, visit);
    }

    /// Lexicographically minimal upper-triangle code over all relabelings.
    pub fn canonical_code(&self) -> CanonicalCode {
        let n = self.vertex_count();
        assert!(
            n <= MAX_CANONICAL_VERTICES,
            "canonical form capped at {MAX_CANONICAL_VERTICES} vertices, got {n}"
        );
        let mut best = u32::MAX;
        let mut perm = [0usize; MAX_CANONICAL_VERTICES];
        let mut used = [false; MAX_CANONICAL_VERTICES];
        self.min_code_search(0, &mut perm, &mut used, &mut best);
        CanonicalCode {
            k: self.n,
            bits: best,
        }
    }

    fn min_code_search(
        &self,
        depth: usize,
        perm: &mut [usize; MAX_CANONICAL_VERTICES],
        used: &mut [bool; MAX_CANONICAL_VERTICES],
        best: &mut u32,
    ) {
        let n = self.vertex_count();
        if depth == n {
            let mut bits = 0u32;
            for i in 0..n {
                for j in (i + 1)..n {
                    bits = bits << 1 | self.beats(perm[i], perm[j]) as u32;
                }
            }
            if bits < *best {
                *best = bits;
            }
            return;
        }
        for v in 0..n {
            if !used[v] {
                used[v] = true;
                perm[depth] = v;
                self.min_code_search(depth + 1, perm, used, best);
                used[v] = false;
            }
        }
    }
}

impl fmt::Debug for Tournament {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Tournament({})", self.format_code())
    }
}

impl fmt::Display for Tournament {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.format_code())
    }
}

/// Isomorphism-class key: the minimal code of [`Tournament::canonical_code`].
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalCode {
    k: u8,
    bits: u32,
}

impl CanonicalCode {
    pub fn vertex_count(&self) -> usize {
        self.k as usize
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// The canonical representative tournament.
    pub fn representative(&self) -> Tournament {
        Tournament::from_code_bits(self.k as usize, self.bits)
    }
}

impl fmt::Display for CanonicalCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.representative().format_code())
    }
}

impl fmt::Debug for CanonicalCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CanonicalCode({self})")
    }
}

/// One representative per isomorphism class on `k` vertices, ordered by
/// canonical code. Built by extending every (k-1)-class by a new vertex in
/// all 2^(k-1) ways and deduplicating canonically.
pub fn enumerate_tournaments(k: usize) -> Vec<Tournament> {
    assert!((1..=7).contains(&k), "enumeration supported for k in 1..=7");
    let mut current = vec![Tournament::single_vertex()];
    for size in 2..=k {
        let mut seen: Vec<u32> = Vec::new();
        for base in &current {
            for subset in 0u32..(1 << (size - 1)) {
                let extended = Tournament::from_orientations(size, |u, v| {
                    if v == size - 1 {
                        subset >> u & 1 == 1
                    } else {
                        base.beats(u, v)
                    }
                });
                seen.push(extended.canonical_code().bits());
            }
        }
        seen.sort_unstable();
        seen.dedup();
        current = seen
            .into_iter()
            .map(|bits| Tournament::from_code_bits(size, bits))
            .collect();
    }
    current
}

/// Quadratic-residue tournament on Z_q: i -> j iff j - i is a nonzero square.
/// Requires q prime, q = 3 (mod 4), q <= 31.
pub fn paley_tournament(q: u64) -> Result<Tournament, PaleyError> {
    if q > 31 {
        return Err(PaleyError::TooLarge(q));
    }
    if q < 2 || (2..q).any(|d| q % d == 0) {
        return Err(PaleyError::NotPrime(q));
    }
    if q % 4 != 3 {
        return Err(PaleyError::NotThreeModFour(q));
    }
    let mut residues = vec![false; q as usize];
    for i in 1..q {
        residues[((i * i) % q) as usize] = true;
    }
    Ok(Tournament::from_orientations(q as usize, |u, v| {
        residues[(v - u) % q as usize]
    }))
}

/// Isomorphism test. Uses canonical codes up to 8 vertices and score-pruned
/// backtracking for larger hosts (up to 15 vertices).
pub fn are_isomorphic(a: &Tournament, b: &Tournament) -> bool {
    if a.vertex_count() != b.vertex_count() {
        return false;
    }
    let n = a.vertex_count();
    if n <= MAX_CANONICAL_VERTICES {
        return a.canonical_code() == b.canonical_code();
    }
    let mut sa = a.scores();
    let mut sb = b.scores();
    sa.sort_unstable();
    sb.sort_unstable();
    if sa != sb {
        return false;
    }
    let score_a = a.scores();
    let score_b = b.scores();
    let mut image = [usize::MAX; MAX_VERTICES];
    let mut used = [false; MAX_VERTICES];
    fn go(
        a: &Tournament,
        b: &Tournament,
        score_a: &[usize],
        score_b: &[usize],
        depth: usize,
        image: &mut [usize; MAX_VERTICES],
        used: &mut [bool; MAX_VERTICES],
    ) -> bool {
        let n = a.vertex_count();
        if depth == n {
            return true;
        }
        for w in 0..n {
            if used[w] || score_b[w] != score_a[depth] {
                continue;
            }
            if (0..depth).all(|x| a.beats(depth, x) == b.beats(w, image[x])) {
                image[depth] = w;
                used[w] = true;
                if go(a, b, score_a, score_b, depth + 1, image, used) {
                    return true;
                }
                used[w] = false;
            }
        }
        false
    }
    go(a, b, &score_a, &score_b, 0, &mut image, &mut used)
}

/// Calls `f` on every k-subset of 0..n in lexicographic order.
pub(crate) fn for_each_combination(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        // advance to the next combination
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 {
                return;
            }
        }
        idx[i] += 1;
        for j in (i + 1)..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}
