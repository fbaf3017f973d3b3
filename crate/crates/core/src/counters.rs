//! Complex operation counters.
//!
//! Every kernel that touches complex data reports the number of complex
//! additions and multiplications it performed to a thread-local tally. Real
//! scalings (such as the `1/sqrt(N)` of the unitary transforms) are not
//! counted. A radix-2 FFT of length `N` is charged `N log2 N` additions and
//! `N/2 log2 N` multiplications, trivial twiddles included.
//!
//! Counts are per thread: measure a stage by running it inside [`measure`] on
//! the current thread.

use std::cell::Cell;
use std::ops::{Add, AddAssign, Sub};

#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct OpCounts {
    pub adds: u64,
    pub muls: u64,
    /// Number of length-N FFT passes among the above.
    pub ffts: u64,
}

impl Add for OpCounts {
    type Output = OpCounts;
    fn add(self, rhs: OpCounts) -> OpCounts {
        OpCounts {
            adds: self.adds + rhs.adds,
            muls: self.muls + rhs.muls,
            ffts: self.ffts + rhs.ffts,
        }
    }
}

impl AddAssign for OpCounts {
    fn add_assign(&mut self, rhs: OpCounts) {
        *self = *self + rhs;
    }
}

impl Sub for OpCounts {
    type Output = OpCounts;
    fn sub(self, rhs: OpCounts) -> OpCounts {
        OpCounts {
            adds: self.adds - rhs.adds,
            muls: self.muls - rhs.muls,
            ffts: self.ffts - rhs.ffts,
        }
    }
}

thread_local! {
    static TALLY: Cell<OpCounts> = const { Cell::new(OpCounts { adds: 0, muls: 0, ffts: 0 }) };
}

#[inline]
pub(crate) fn record(adds: u64, muls: u64) {
    TALLY.with(|t| {
        let mut c = t.get();
        c.adds += adds;
        c.muls += muls;
        t.set(c);
    });
}

#[inline]
pub(crate) fn record_fft(n: usize) {
    let log2 = n.trailing_zeros() as u64;
    let n = n as u64;
    TALLY.with(|t| {
        let mut c = t.get();
        c.adds += n * log2;
        c.muls += n / 2 * log2;
        c.ffts += 1;
        t.set(c);
    });
}

/// Current tally of this thread (monotone non-decreasing).
pub fn snapshot() -> OpCounts {
    TALLY.with(|t| t.get())
}

/// Runs `f` without charging its operations (diagnostics).
pub fn uncounted<R>(f: impl FnOnce() -> R) -> R {
    let before = snapshot();
    let r = f();
    TALLY.with(|t| t.set(before));
    r
}

/// Runs `f` and returns its result with the operations it performed.
pub fn measure<R>(f: impl FnOnce() -> R) -> (R, OpCounts) {
    let before = snapshot();
    let r = f();
    (r, snapshot() - before)
}
