use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest number of cells a single partition level may hold.
pub const MAX_CELLS_PER_LEVEL: usize = 1 << 22;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Geometry {
    /// `Ω = (0, 1)` with the singular set `{0}`; ring `t` is `(2^{-t-1}, 2^{-t})`.
    IntervalSingularOrigin,
    /// `Ω = ℝ` truncated to `|x| ≤ 2^{t_max}`; ring 0 is `(-1, 1)`, ring `t ≥ 1` is
    /// `(-2^t, -2^{t-1}) ∪ (2^{t-1}, 2^t)`.
    RealLine,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DomainSpec {
    pub geometry: Geometry,
    pub t_max: u32,
}

/// One interval of a ring partition `T_{t,m}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub a: f64,
    pub b: f64,
    pub t: u32,
    pub m: u32,
    /// Position within the ring, counting across pieces.
    pub index: usize,
}

impl Cell {
    pub fn width(&self) -> f64 {
        self.b - self.a
    }

    pub fn meets(&self, lo: f64, hi: f64) -> bool {
        self.a < hi && lo < self.b
    }

    /// The two halves at depth `m + 1`.
    pub fn children(&self) -> [Cell; 2] {
        let mid = 0.5 * (self.a + self.b);
        let child = |a, b, k| Cell {
            a,
            b,
            t: self.t,
            m: self.m + 1,
            index: 2 * self.index + k,
        };
        [child(self.a, mid, 0), child(mid, self.b, 1)]
    }
}

impl DomainSpec {
    pub fn new(geometry: Geometry, t_max: u32) -> Result<Self> {
        let d = DomainSpec { geometry, t_max };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        if self.t_max < 2 {
            return Err(Error::Validation(format!("t_max = {} must be at least 2", self.t_max)));
        }
        if self.geometry == Geometry::RealLine && self.t_max > 1000 {
            return Err(Error::Validation(format!("t_max = {} overflows the line truncation", self.t_max)));
        }
        Ok(())
    }

    /// Number of disjoint intervals making up ring `t`.
    pub fn pieces_in_ring(&self, t: u32) -> usize {
        match self.geometry {
            Geometry::IntervalSingularOrigin => 1,
            Geometry::RealLine if t == 0 => 1,
            Geometry::RealLine => 2,
        }
    }

    /// The constant `c` in `card T_{t,m} ≤ c·2^m`.
    pub fn ring_constant(&self) -> f64 {
        match self.geometry {
            Geometry::IntervalSingularOrigin => 1.0,
            Geometry::RealLine => 2.0,
        }
    }

    /// The intervals of ring `t`, left to right.
    pub fn ring_pieces(&self, t: u32) -> Vec<(f64, f64)> {
        let h = (-(t as f64)).exp2();
        match self.geometry {
            Geometry::IntervalSingularOrigin => vec![(h / 2.0, h)],
            Geometry::RealLine if t == 0 => vec![(-1.0, 1.0)],
            Geometry::RealLine => {
                let big = (t as f64).exp2();
                vec![(-big, -big / 2.0), (big / 2.0, big)]
            }
        }
    }

    /// Ring containing `x`, or `None` outside the (truncated) domain. Ring boundaries
    /// go to the ring on the singular side.
    pub fn ring_of(&self, x: f64) -> Option<u32> {
        match self.geometry {
            Geometry::IntervalSingularOrigin => {
                if !(x > 0.0 && x < 1.0) {
                    return None;
                }
                Some((-x.log2()).floor() as u32)
            }
            Geometry::RealLine => {
                let ax = x.abs();
                if ax < 1.0 {
                    return Some(0);
                }
                let t = ax.log2().floor() as u32 + 1;
                (t <= self.t_max).then_some(t)
            }
        }
    }

    /// Whether rings continue past `t_max` (the interval accumulates at its singular end).
    pub fn has_unbounded_rings(&self) -> bool {
        self.geometry == Geometry::IntervalSingularOrigin
    }

    /// The uniform `2^m`-cell split of every piece of ring `t`.
    pub fn cells(&self, t: u32, m: u32) -> Result<Vec<Cell>> {
        let per_piece = 1usize.checked_shl(m).filter(|&k| k <= MAX_CELLS_PER_LEVEL);
        let Some(per_piece) = per_piece else {
            return Err(Error::Size(format!("depth m = {m} exceeds the cell cap")));
        };
        let mut out = Vec::with_capacity(per_piece * self.pieces_in_ring(t));
        for (k, (a, b)) in self.ring_pieces(t).into_iter().enumerate() {
            out.extend(split_piece(a, b, t, m, k * per_piece, per_piece));
        }
        Ok(out)
    }

    /// Cells of `T_{t,m}` meeting `(lo, hi)`.
    pub fn cells_meeting(&self, t: u32, m: u32, lo: f64, hi: f64) -> Result<Vec<Cell>> {
        let per_piece = 1usize.checked_shl(m).filter(|&k| k <= MAX_CELLS_PER_LEVEL);
        let Some(per_piece) = per_piece else {
            return Err(Error::Size(format!("depth m = {m} exceeds the cell cap")));
        };
        let mut out = Vec::new();
        for (k, (a, b)) in self.ring_pieces(t).into_iter().enumerate() {
            if !(a < hi && lo < b) {
                continue;
            }
            let h = (b - a) / per_piece as f64;
            let first = (((lo - a) / h).floor().max(0.0) as usize).min(per_piece - 1);
            let last = (((hi - a) / h).ceil().max(1.0) as usize).min(per_piece);
            for i in first..last {
                let cell = make_cell(a, h, t, m, k * per_piece, i, per_piece, b);
                if cell.meets(lo, hi) {
                    out.push(cell);
                }
            }
        }
        Ok(out)
    }
}

#[allow(clippy::too_many_arguments)]
fn make_cell(a: f64, h: f64, t: u32, m: u32, offset: usize, i: usize, count: usize, b: f64) -> Cell {
    Cell {
        a: a + h * i as f64,
        b: if i + 1 == count { b } else { a + h * (i + 1) as f64 },
        t,
        m,
        index: offset + i,
    }
}

fn split_piece(a: f64, b: f64, t: u32, m: u32, offset: usize, count: usize) -> impl Iterator<Item = Cell> {
    let h = (b - a) / count as f64;
    (0..count).map(move |i| make_cell(a, h, t, m, offset, i, count, b))
}

/// All partitions `T_{t,m}` for `t ≤ t_max`, `m ≤ m_max`, indexed `[t][m]`.
#[derive(Debug, Clone)]
pub struct Partition {
    pub domain: DomainSpec,
    pub levels: Vec<Vec<Vec<Cell>>>,
}

impl Partition {
    pub fn level(&self, t: u32, m: u32) -> &[Cell] {
        &self.levels[t as usize][m as usize]
    }
}

pub fn build_partition(dom: &DomainSpec, m_max: u32) -> Result<Partition> {
    dom.validate()?;
    let total = (dom.t_max as usize + 1)
        .saturating_mul(2)
        .saturating_mul(1usize.checked_shl(m_max + 1).unwrap_or(usize::MAX));
    if total > 4 * MAX_CELLS_PER_LEVEL {
        return Err(Error::Size(format!(
            "partition with t_max = {}, m_max = {m_max} is too large",
            dom.t_max
        )));
    }
    let levels = (0..=dom.t_max)
        .map(|t| (0..=m_max).map(|m| dom.cells(t, m)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    Ok(Partition { domain: *dom, levels })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn interval() -> DomainSpec {
        DomainSpec::new(Geometry::IntervalSingularOrigin, 8).unwrap()
    }

    #[test]
    fn ring_three_is_one_cell() {
        let c = interval().cells(3, 0).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!((c[0].a, c[0].b), (1.0 / 16.0, 1.0 / 8.0));
    }

    #[test]
    fn refinement_meets_two_children() {
        let p = build_partition(&interval(), 4).unwrap();
        for t in 0..=8 {
            for m in 0..4 {
                assert_eq!(p.level(t, m).len(), 1 << m);
                for cell in p.level(t, m) {
                    let hits = p.level(t, m + 1).iter().filter(|c| c.a < cell.b && cell.a < c.b).count();
                    assert_eq!(hits, 2);
                }
            }
        }
    }

    #[test]
    fn line_rings_have_two_pieces() {
        let d = DomainSpec::new(Geometry::RealLine, 5).unwrap();
        assert_eq!(d.ring_pieces(0), vec![(-1.0, 1.0)]);
        assert_eq!(d.ring_pieces(2), vec![(-4.0, -2.0), (2.0, 4.0)]);
        assert_eq!(d.cells(2, 3).unwrap().len(), 16);
        assert_eq!(d.ring_of(3.0), Some(2));
        assert_eq!(d.ring_of(-0.5), Some(0));
        assert_eq!(d.ring_of(100.0), None);
    }

    #[test]
    fn ring_lookup_on_the_interval() {
        let d = interval();
        assert_eq!(d.ring_of(0.75), Some(0));
        assert_eq!(d.ring_of(0.1), Some(3));
        assert_eq!(d.ring_of(1.5), None);
    }

    #[test]
    fn cells_meeting_a_window() {
        let d = interval();
        let all = d.cells(1, 3).unwrap();
        let hit = d.cells_meeting(1, 3, 0.3, 0.31).unwrap();
        assert_eq!(hit.len(), 1);
        assert!(all.contains(&hit[0]));
        assert_eq!(d.cells_meeting(1, 3, 0.0, 1.0).unwrap(), all);
    }

    #[test]
    fn small_t_max_rejected() {
        assert!(DomainSpec::new(Geometry::RealLine, 1).is_err());
    }
}
