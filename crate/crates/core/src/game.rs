//! Cooperative-game primitives: coalitions as bitmasks, subset enumeration,
//! and the Shapley coalition weight.

use thiserror::Error;

/// Hard cap on the number of players a coalition mask can hold. Everything
/// downstream (enumeration, exhaustive search) assumes masks fit one word.
pub const MAX_PLAYERS: usize = 30;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GameError {
    #[error("player count {0} out of range (expected 1..={MAX_PLAYERS})")]
    PlayerCount(usize),
    #[error("player index {index} out of range for {n} players")]
    PlayerIndex { index: usize, n: usize },
    #[error("subset size {k} exceeds player count {n}")]
    SubsetSize { k: usize, n: usize },
    #[error("mask {bits:#b} has bits set beyond player count {n}")]
    StrayBits { bits: u32, n: usize },
}

/// A coalition over `n` players packed into one machine word: bit `i` set
/// means player `i` is present. Masks remember their player count so that
/// complements and full-coalition checks are well defined.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CoalitionMask {
    bits: u32,
    n: u8,
}

impl CoalitionMask {
    /// The empty coalition over `n` players.
    pub fn empty(n: usize) -> Result<Self, GameError> {
        check_player_count(n)?;
        Ok(Self { bits: 0, n: n as u8 })
    }

    /// The grand coalition containing every player.
    pub fn full(n: usize) -> Result<Self, GameError> {
        check_player_count(n)?;
        Ok(Self { bits: full_bits(n), n: n as u8 })
    }

    /// Build a mask from raw bits, rejecting bits at positions `>= n`.
    pub fn from_bits(n: usize, bits: u32) -> Result<Self, GameError> {
        check_player_count(n)?;
        if bits & !full_bits(n) != 0 {
            return Err(GameError::StrayBits { bits, n });
        }
        Ok(Self { bits, n: n as u8 })
    }

    /// Build a mask from explicit member indices.
    pub fn from_indices(n: usize, members: &[usize]) -> Result<Self, GameError> {
        let mut mask = Self::empty(n)?;
        for &i in members {
            mask = mask.with(i)?;
        }
        Ok(mask)
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn contains(&self, player: usize) -> bool {
        player < self.n() && self.bits >> player & 1 == 1
    }

    /// Number of players present.
    pub fn cardinality(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    pub fn is_full(&self) -> bool {
        self.bits == full_bits(self.n())
    }

    /// Copy of this coalition with `player` added.
    pub fn with(&self, player: usize) -> Result<Self, GameError> {
        if player >= self.n() {
            return Err(GameError::PlayerIndex { index: player, n: self.n() });
        }
        Ok(Self { bits: self.bits | 1 << player, n: self.n })
    }

    /// Copy of this coalition with `player` removed.
    pub fn without(&self, player: usize) -> Result<Self, GameError> {
        if player >= self.n() {
            return Err(GameError::PlayerIndex { index: player, n: self.n() });
        }
        Ok(Self { bits: self.bits & !(1 << player), n: self.n })
    }

    /// Players absent from this coalition.
    pub fn complement(&self) -> Self {
        Self { bits: full_bits(self.n()) & !self.bits, n: self.n }
    }

    /// Member indices in ascending order.
    pub fn members(&self) -> impl Iterator<Item = usize> + '_ {
        let n = self.n();
        (0..n).filter(move |&i| self.bits >> i & 1 == 1)
    }
}

impl std::fmt::Debug for CoalitionMask {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{{")?;
        for (i, m) in self.members().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{m}")?;
        }
        write!(f, "}}/{}", self.n)
    }
}

fn check_player_count(n: usize) -> Result<(), GameError> {
    if n == 0 || n > MAX_PLAYERS {
        return Err(GameError::PlayerCount(n));
    }
    Ok(())
}

fn full_bits(n: usize) -> u32 {
    ((1u64 << n) - 1) as u32
}

/// All `2^n` coalitions in ascending integer order: the empty coalition
/// first, the grand coalition last.
pub fn enumerate_coalitions(
    n: usize,
) -> Result<impl Iterator<Item = CoalitionMask>, GameError> {
    check_player_count(n)?;
    Ok((0..1u64 << n).map(move |bits| CoalitionMask { bits: bits as u32, n: n as u8 }))
}

/// All coalitions of exactly `k` players in ascending integer order,
/// `C(n, k)` of them, via the carry-ripple (Gosper) successor.
pub fn enumerate_k_subsets(
    n: usize,
    k: usize,
) -> Result<impl Iterator<Item = CoalitionMask>, GameError> {
    check_player_count(n)?;
    if k > n {
        return Err(GameError::SubsetSize { k, n });
    }
    let first = if k == 0 { 0 } else { full_bits(k) };
    Ok(KSubsets { cur: Some(first), n: n as u8 })
}

struct KSubsets {
    cur: Option<u32>,
    n: u8,
}

impl Iterator for KSubsets {
    type Item = CoalitionMask;

    fn next(&mut self) -> Option<CoalitionMask> {
        let bits = self.cur?;
        let out = CoalitionMask { bits, n: self.n };
        self.cur = if bits == 0 {
            None
        } else {
            // Gosper's hack: next larger integer with the same popcount.
            let lo = bits & bits.wrapping_neg();
            let lifted = bits + lo;
            let next = lifted | ((bits ^ lifted) / lo) >> 2;
            (u64::from(next) < 1u64 << self.n).then_some(next)
        };
        Some(out)
    }
}

/// Shapley coalition weight `|S|! (n - |S| - 1)! / n!` for a coalition of
/// size `s` drawn from `n` players. Computed in log space so that player
/// counts past 20 do not overflow the factorials.
pub fn shapley_weight(n: usize, s: usize) -> Result<f64, GameError> {
    check_player_count(n)?;
    if s >= n {
        return Err(GameError::SubsetSize { k: s, n });
    }
    let ln = ln_factorial(s) + ln_factorial(n - 1 - s) - ln_factorial(n);
    Ok(ln.exp())
}

fn ln_factorial(m: usize) -> f64 {
    (2..=m).map(|i| (i as f64).ln()).sum()
}
