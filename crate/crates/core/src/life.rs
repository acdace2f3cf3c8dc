//! Conway's Game of Life on the unbounded plane, as a static block history.
//!
//! [`life_step`] evaluates the update rule exactly as the formula
//!
//! ```text
//! N(p, q, h)          = (Σ_{a=p-1..p+1} Σ_{b=q-1..q+1} State(a, b, h)) − State(p, q, h)
//! State(p, q, h + 1)  = 1 if N ≤ 3 and (3 − State) ≤ N, else 0
//! ```
//!
//! [`life_step_oracle`] is an unrelated birth-on-3 / survive-on-2-or-3
//! implementation used only for differential testing.

use std::fmt::Write as _;

use rustc_hash::{FxHashMap, FxHashSet};

use crate::error::{Error, Result};

/// Default live-cell budget for [`run_block`].
pub const DEFAULT_CELL_BUDGET: usize = 1_000_000;

/// Cell coordinate: `p` is the column, `q` the row (increasing downwards).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CellCoord {
    pub p: i64,
    pub q: i64,
}

impl CellCoord {
    pub fn new(p: i64, q: i64) -> Self {
        CellCoord { p, q }
    }

    fn offset(self, dp: i64, dq: i64) -> Self {
        CellCoord {
            p: self.p + dp,
            q: self.q + dq,
        }
    }
}

impl From<(i64, i64)> for CellCoord {
    fn from((p, q): (i64, i64)) -> Self {
        CellCoord { p, q }
    }
}

/// Finite set of live cells; every other cell is dead.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LifeState {
    live: FxHashSet<CellCoord>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BoundingBox {
    pub min_p: i64,
    pub min_q: i64,
    pub max_p: i64,
    pub max_q: i64,
}

impl LifeState {
    pub fn new<I, C>(cells: I) -> Self
    where
        I: IntoIterator<Item = C>,
        C: Into<CellCoord>,
    {
        LifeState {
            live: cells.into_iter().map(Into::into).collect(),
        }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.live.is_empty()
    }

    pub fn population(&self) -> usize {
        self.live.len()
    }

    /// `State(p, q)` as 0 or 1.
    pub fn state(&self, p: i64, q: i64) -> u8 {
        u8::from(self.live.contains(&CellCoord { p, q }))
    }

    /// Live cells in (q, p) reading order.
    pub fn cells(&self) -> Vec<CellCoord> {
        let mut v: Vec<CellCoord> = self.live.iter().copied().collect();
        v.sort_by_key(|c| (c.q, c.p));
        v
    }

    pub fn bounding_box(&self) -> Option<BoundingBox> {
        let mut it = self.live.iter();
        let first = it.next()?;
        let mut bb = BoundingBox {
            min_p: first.p,
            min_q: first.q,
            max_p: first.p,
            max_q: first.q,
        };
        for c in it {
            bb.min_p = bb.min_p.min(c.p);
            bb.min_q = bb.min_q.min(c.q);
            bb.max_p = bb.max_p.max(c.p);
            bb.max_q = bb.max_q.max(c.q);
        }
        Some(bb)
    }

    pub fn translated(&self, dp: i64, dq: i64) -> LifeState {
        LifeState {
            live: self.live.iter().map(|c| c.offset(dp, dq)).collect(),
        }
    }

    /// Cells relative to the bounding-box corner, sorted, plus that corner.
    fn normalized(&self) -> (Vec<CellCoord>, (i64, i64)) {
        match self.bounding_box() {
            None => (Vec::new(), (0, 0)),
            Some(bb) => {
                let mut v: Vec<CellCoord> = self
                    .live
                    .iter()
                    .map(|c| c.offset(-bb.min_p, -bb.min_q))
                    .collect();
                v.sort_unstable();
                (v, (bb.min_p, bb.min_q))
            }
        }
    }

    /// Parses the plaintext pattern format: `.` dead, `O` live, lines
    /// starting with `!` are comments, an optional `#pattern v1` header.
    /// The first non-comment character sits at `(0, 0)` unless an
    /// `!origin=(p,q)` comment places it elsewhere.
    pub fn from_plaintext(text: &str) -> Result<Self> {
        let mut live = FxHashSet::default();
        let mut origin = (0i64, 0i64);
        let mut q = 0i64;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if let Some(comment) = line.strip_prefix('!') {
                if let Some(at) = comment.trim().strip_prefix("origin=") {
                    origin = parse_origin(at)
                        .ok_or_else(|| Error::parse(lineno + 1, format!("bad origin {at:?}")))?;
                }
                continue;
            }
            if line.starts_with('#') {
                if lineno == 0 && line.split_whitespace().eq(["#pattern", "v1"]) {
                    continue;
                }
                return Err(Error::parse(
                    lineno + 1,
                    format!("unexpected header {line:?}"),
                ));
            }
            for (p, ch) in line.chars().enumerate() {
                match ch {
                    'O' => {
                        live.insert(CellCoord::new(origin.0 + p as i64, origin.1 + q));
                    }
                    '.' => {}
                    other => {
                        return Err(Error::parse(
                            lineno + 1,
                            format!("unexpected character {other:?} in pattern"),
                        ))
                    }
                }
            }
            q += 1;
        }
        Ok(LifeState { live })
    }

    /// Renders the bounding box in the plaintext format. An `!origin=` comment
    /// records the absolute coordinate of the top-left character.
    pub fn to_plaintext(&self) -> String {
        let mut out = String::new();
        let Some(bb) = self.bounding_box() else {
            out.push_str("!origin=(0,0)\n");
            return out;
        };
        writeln!(out, "!origin=({},{})", bb.min_p, bb.min_q).unwrap();
        for q in bb.min_q..=bb.max_q {
            let row: String = (bb.min_p..=bb.max_p)
                .map(|p| if self.state(p, q) == 1 { 'O' } else { '.' })
                .collect();
            out.push_str(row.trim_end_matches('.'));
            out.push('\n');
        }
        out
    }
}

fn parse_origin(s: &str) -> Option<(i64, i64)> {
    let (p, q) = s
        .trim()
        .strip_prefix('(')?
        .strip_suffix(')')?
        .split_once(',')?;
    Some((p.trim().parse().ok()?, q.trim().parse().ok()?))
}

/// Live neighbours of `(p, q)`: the 3×3 block sum minus the centre.
pub fn neighbor_count(state: &LifeState, p: i64, q: i64) -> u8 {
    let mut block = 0u8;
    for a in p - 1..=p + 1 {
        for b in q - 1..=q + 1 {
            block += state.state(a, b);
        }
    }
    block - state.state(p, q)
}

/// One generation by the formula rule, with `N` taken as the 3×3 block sum
/// minus the centre.
pub fn life_step(state: &LifeState) -> LifeState {
    let mut block: FxHashMap<CellCoord, u8> = FxHashMap::default();
    block.reserve(state.live.len() * 4);
    for c in &state.live {
        for dp in -1..=1 {
            for dq in -1..=1 {
                *block.entry(c.offset(dp, dq)).or_insert(0) += 1;
            }
        }
    }
    let live = block
        .into_iter()
        .filter(|&(c, sum)| {
            let s = u8::from(state.live.contains(&c));
            let n = sum - s;
            n <= 3 && 3 - s <= n
        })
        .map(|(c, _)| c)
        .collect();
    LifeState { live }
}

/// One generation by B3/S23 with a neighbour-count map.
pub fn life_step_oracle(state: &LifeState) -> LifeState {
    let mut counts: FxHashMap<CellCoord, u8> = FxHashMap::default();
    for c in &state.live {
        for (dp, dq) in [
            (-1, -1),
            (0, -1),
            (1, -1),
            (-1, 0),
            (1, 0),
            (-1, 1),
            (0, 1),
            (1, 1),
        ] {
            *counts.entry(c.offset(dp, dq)).or_insert(0) += 1;
        }
    }
    let live = counts
        .into_iter()
        .filter(|(c, n)| match state.live.contains(c) {
            true => *n == 2 || *n == 3,
            false => *n == 3,
        })
        .map(|(c, _)| c)
        .collect();
    LifeState { live }
}

/// The stacked states `h = 0..=H`, with `states[h + 1] = life_step(states[h])`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockHistory {
    states: Vec<LifeState>,
}

impl BlockHistory {
    pub fn states(&self) -> &[LifeState] {
        &self.states
    }

    pub fn horizon(&self) -> usize {
        self.states.len() - 1
    }

    pub fn at(&self, h: usize) -> Option<&LifeState> {
        self.states.get(h)
    }

    pub fn populations(&self) -> Vec<usize> {
        self.states.iter().map(LifeState::population).collect()
    }

    /// Checks the defining invariant against a step function.
    pub fn is_consistent_with(&self, step: impl Fn(&LifeState) -> LifeState) -> bool {
        self.states.windows(2).all(|w| step(&w[0]) == w[1])
    }
}

/// Materializes the block history up to `horizon`, failing if any state
/// exceeds `cell_budget` live cells.
pub fn run_block(initial: &LifeState, horizon: usize, cell_budget: usize) -> Result<BlockHistory> {
    let check = |h: usize, s: &LifeState| {
        if s.population() > cell_budget {
            Err(Error::CellBudget {
                h,
                live: s.population(),
                budget: cell_budget,
            })
        } else {
            Ok(())
        }
    };
    check(0, initial)?;
    let mut states = Vec::with_capacity(horizon + 1);
    states.push(initial.clone());
    for h in 1..=horizon {
        let next = life_step(&states[h - 1]);
        check(h, &next)?;
        states.push(next);
    }
    Ok(BlockHistory { states })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Periodicity {
    pub period: usize,
    pub translation: (i64, i64),
}

/// Smallest `h` in `1..=max_h` at which the pattern reappears, possibly
/// translated.
pub fn detect_period(initial: &LifeState, max_h: usize) -> Option<Periodicity> {
    let (shape, corner) = initial.normalized();
    let mut state = initial.clone();
    for h in 1..=max_h {
        state = life_step(&state);
        let (s, c) = state.normalized();
        if s == shape {
            return Some(Periodicity {
                period: h,
                translation: (c.0 - corner.0, c.1 - corner.1),
            });
        }
    }
    None
}

/// Standard test patterns.
pub mod patterns {
    use super::LifeState;

    pub fn blinker() -> LifeState {
        LifeState::new([(0, 0), (1, 0), (2, 0)])
    }

    pub fn block() -> LifeState {
        LifeState::new([(0, 0), (1, 0), (0, 1), (1, 1)])
    }

    /// Moves one cell right and one down every four generations.
    pub fn glider() -> LifeState {
        LifeState::new([(1, 0), (2, 1), (0, 2), (1, 2), (2, 2)])
    }

    pub fn r_pentomino() -> LifeState {
        LifeState::new([(1, 0), (2, 0), (0, 1), (1, 1), (1, 2)])
    }
}
