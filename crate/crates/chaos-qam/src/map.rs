//! The piecewise-linear chaotic map: eight expanding branches, the
//! symbol-indexed contracting inverse used by the modulator, and the region
//! partition that ties amplitudes back to symbols.
//!
//! The amplitude axis carries eight closed regions of width `1 - p` centred
//! at the odd levels `2s - 7`, one per symbol `s` in `0..8`, separated by
//! guard gaps of width `1 + p`:
//!
//! ```text
//!  s:    0       1       2       3       4       5       6       7
//!     [-7.5,  [-5.5,  [-3.5,  [-1.5,  [ 0.5,  [ 2.5,  [ 4.5,  [ 6.5,
//!      -6.5]   -4.5]   -2.5]   -0.5]    1.5]    3.5]    5.5]    7.5]
//!                                                              (p = 0)
//! ```
//!
//! On region `s` the forward map is `f(x) = (2x - c(s)) / (1 - p)` with
//! branch offset `c(s) = 4s - 14`; it stretches each region onto `[-1, 1]`.
//! Its inverse restricted to branch `s`,
//!
//! ```text
//! f_s^-1(x) = ((1 - p) x + c(s)) / 2  =  a x + c(s)/2,   a = (1 - p)/2
//! ```
//!
//! is a contraction with factor `a <= 1/2`. Driving the inverse with a symbol
//! sequence (backward iteration) is what generates the transmit waveform; the
//! control parameter `p` trades chaos (`p < 1`) against the conventional
//! 8-level lattice (`p = 1`, where every branch collapses to its centre).
//!
//! ```
//! use chaos_qam::map::MapParams;
//!
//! let map = MapParams::new(0.0).unwrap();
//! let x = map.inverse(0.25, 5);             // one backward step
//! assert_eq!(map.region_of(x), Some(5));    // lands inside region 5
//! assert_eq!(map.forward(x).unwrap(), 0.25); // forward map undoes it
//! ```

use crate::error::Error;

/// Number of map branches / symbol values. Fixed by the 64-QAM design
/// (8 levels per rail, two rails).
pub const NUM_REGIONS: usize = 8;

// ---------------------------------------------------------------------------
// Map parameters
// ---------------------------------------------------------------------------

/// Validated map definition: the single source of truth for all map algebra.
///
/// Immutable after construction; cheap to clone and safe to share across
/// threads.
#[derive(Debug, Clone, PartialEq)]
pub struct MapParams {
    p: f64,
    contraction: f64,
    offsets: [f64; NUM_REGIONS],
}

/// One region of the partition: the closed amplitude interval that maps to
/// symbol `symbol`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Region {
    pub symbol: u8,
    pub lower: f64,
    pub upper: f64,
}

impl MapParams {
    /// Builds the map for control parameter `p` in `[0, 1]`.
    ///
    /// `p = 1` is permitted: the inverse map and everything downstream are
    /// well defined there (the regions degenerate to the 8 lattice points);
    /// only [`forward`](Self::forward) rejects it.
    pub fn new(p: f64) -> Result<Self, Error> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Parameter {
                name: "p",
                detail: format!("p = {p} violates 0 <= p <= 1"),
            });
        }
        let mut offsets = [0.0; NUM_REGIONS];
        for (s, c) in offsets.iter_mut().enumerate() {
            *c = (4 * s) as f64 - 14.0;
        }
        Ok(MapParams { p, contraction: (1.0 - p) / 2.0, offsets })
    }

    /// The control parameter `p`.
    pub fn p(&self) -> f64 {
        self.p
    }

    /// The contraction factor `a = (1 - p)/2` of every inverse branch.
    pub fn contraction(&self) -> f64 {
        self.contraction
    }

    /// Branch offset `c(s) = 4s - 14`.
    pub fn offset(&self, s: u8) -> f64 {
        self.offsets[s as usize]
    }

    /// Number of regions (always 8).
    pub fn num_regions(&self) -> usize {
        NUM_REGIONS
    }

    /// The closed region interval for symbol `s`:
    /// `[(c(s) - 1 + p)/2, (c(s) + 1 - p)/2]`, width `1 - p`.
    pub fn region(&self, s: u8) -> Region {
        let c = self.offsets[s as usize];
        Region {
            symbol: s,
            lower: (c - 1.0 + self.p) / 2.0,
            upper: (c + 1.0 - self.p) / 2.0,
        }
    }

    /// All eight regions in symbol order.
    pub fn regions(&self) -> impl Iterator<Item = Region> + '_ {
        (0..NUM_REGIONS as u8).map(move |s| self.region(s))
    }

    // -----------------------------------------------------------------------
    // Map algebra
    // -----------------------------------------------------------------------

    /// One backward iteration: the inverse branch for symbol `s`,
    /// `a*x + c(s)/2`. This is the modulator's (and the receiver's) only
    /// map operation; it never clamps.
    #[inline]
    pub fn inverse(&self, x: f64, s: u8) -> f64 {
        self.contraction * x + self.offsets[s as usize] * 0.5
    }

    /// One forward iteration `(2x - c(s*))/(1 - p)` where `s*` is the region
    /// containing `x`. A diagnostic/reference operation: the transceiver path
    /// uses exclusively [`inverse`](Self::inverse).
    ///
    /// Fails when `x` falls in a guard gap (carrying the two neighbouring
    /// region edges) and for `p = 1`, where the branch slope `2/(1 - p)` is
    /// undefined.
    pub fn forward(&self, x: f64) -> Result<f64, Error> {
        if self.p == 1.0 {
            return Err(Error::Parameter {
                name: "p",
                detail: "forward map is undefined at p = 1 (branch slope 2/(1-p)); \
                         p = 1 violates 0 <= p < 1"
                    .into(),
            });
        }
        match self.region_of(x) {
            Some(s) => Ok((2.0 * x - self.offsets[s as usize]) / (1.0 - self.p)),
            None => Err(self.gap_error(x)),
        }
    }

    /// The symbol whose closed region contains `x`, or `None` for a point in
    /// a guard gap / beyond the outermost regions. A point exactly on a
    /// region edge belongs to that region.
    pub fn region_of(&self, x: f64) -> Option<u8> {
        for s in 0..NUM_REGIONS as u8 {
            let r = self.region(s);
            if r.lower <= x && x <= r.upper {
                return Some(s);
            }
        }
        None
    }

    /// Radius of the invariant interval of backward iteration: `14/(1 + p)`,
    /// the fixed point of `|x| -> a|x| + 7`. Every backward orbit started
    /// with `|x0| <= bound` stays within `±bound` forever.
    pub fn invariant_bound(&self) -> f64 {
        14.0 / (1.0 + self.p)
    }

    /// Domain error for a sample outside every region, carrying the nearest
    /// region edges on both sides.
    fn gap_error(&self, x: f64) -> Error {
        let mut below = None;
        let mut above = None;
        for r in self.regions() {
            if r.upper < x {
                below = Some(r.upper);
            }
            if r.lower > x && above.is_none() {
                above = Some(r.lower);
            }
        }
        Error::GapSample { x, below, above }
    }
}
