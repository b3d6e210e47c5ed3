//! Minimally compliant nominal trajectories.

use serde::{Deserialize, Serialize};

use crate::dynamics::quadratic_roots;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NominalKind {
    /// Accelerate at `a_lo` to `v_lo`, then hold `v_lo`.
    Lo,
    /// Accelerate at `a_up` to `v_up`; an initial rate beyond `v_up` is kept.
    Up,
}

/// Ownship path that starts at the origin with rate `v0`, accelerates with
/// `w·a` until it reaches `v_target` and flies straight afterwards.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NominalTrajectory {
    pub kind: NominalKind,
    pub w: f64,
    pub v0: f64,
    pub v_target: f64,
    pub a: f64,
    pub r_v: f64,
}

impl NominalTrajectory {
    pub fn lo(w: f64, v0: f64, v_lo: f64, a_lo: f64, r_v: f64) -> NominalTrajectory {
        NominalTrajectory { kind: NominalKind::Lo, w, v0, v_target: v_lo, a: a_lo, r_v }
    }

    pub fn up(w: f64, v0: f64, v_up: f64, a_up: f64, r_v: f64) -> NominalTrajectory {
        NominalTrajectory { kind: NominalKind::Up, w, v0, v_target: v_up, a: a_up, r_v }
    }

    /// Signed shortfall `max(0, w(v_target − v0))`.
    fn shortfall(&self) -> f64 {
        (self.w * (self.v_target - self.v0)).max(0.0)
    }

    pub fn t_switch(&self) -> f64 {
        self.shortfall() / self.a
    }

    /// Rate flown once the target is reached.
    pub fn final_rate(&self) -> f64 {
        match self.kind {
            NominalKind::Lo => self.v_target,
            NominalKind::Up => {
                let w = self.w;
                w * (w * self.v_target).max(w * self.v0)
            }
        }
    }

    /// Height gained by the ownship after `t` seconds.
    pub fn height(&self, t: f64) -> f64 {
        if t < self.t_switch() {
            self.parabola(t)
        } else {
            self.line(t)
        }
    }

    pub(crate) fn parabola(&self, t: f64) -> f64 {
        (self.w * self.a / 2.0) * t * t + self.v0 * t
    }

    pub(crate) fn line(&self, t: f64) -> f64 {
        let d = self.shortfall();
        self.final_rate() * t - self.w * d * d / (2.0 * self.a)
    }

    pub fn rate(&self, t: f64) -> f64 {
        if t < self.t_switch() {
            self.w * self.a * t + self.v0
        } else {
            self.final_rate()
        }
    }

    /// `(r_n, h_n)` at time `t ≥ 0`.
    pub fn point(&self, t: f64) -> (f64, f64) {
        (self.r_v * t, self.height(t))
    }

    /// Earliest `t ∈ [lo, hi]` with `|h_n(t) − h| ≤ band`.
    pub fn first_within(&self, h: f64, band: f64, lo: f64, hi: f64) -> Option<f64> {
        if lo > hi {
            return None;
        }
        let ts = self.t_switch();
        // (start, end, a2, a1, a0) for h_n(t) - h = a2 t² + a1 t + a0.
        let d = self.shortfall();
        let pieces = [
            (lo, hi.min(ts), self.w * self.a / 2.0, self.v0, -h),
            (lo.max(ts), hi, 0.0, self.final_rate(), -self.w * d * d / (2.0 * self.a) - h),
        ];
        for (start, end, a2, a1, a0) in pieces {
            if start > end {
                continue;
            }
            let g0 = a2 * start * start + a1 * start + a0;
            if g0.abs() <= band {
                return Some(start);
            }
            let face = if g0 > band { band } else { -band };
            let hit = quadratic_roots(a2, a1, a0 - face)
                .into_iter()
                .flatten()
                .filter(|&t| t > start && t <= end && t.is_finite())
                .min_by(f64::total_cmp);
            if hit.is_some() {
                return hit;
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const A_LO: f64 = 8.0435;

    #[test]
    fn compliant_start_is_linear() {
        let n = NominalTrajectory::lo(1.0, 25.0, 25.0, A_LO, 250.0);
        assert_eq!(n.t_switch(), 0.0);
        for t in [0.0, 1.0, 7.5, 100.0] {
            assert_eq!(n.point(t), (250.0 * t, 25.0 * t));
        }
    }

    #[test]
    fn height_at_switch() {
        let n = NominalTrajectory::lo(1.0, 0.0, 25.0, A_LO, 250.0);
        let ts = n.t_switch();
        assert!((ts - 3.1081).abs() < 1e-4);
        let by_hand = A_LO / 2.0 * ts * ts;
        assert!((n.height(ts) - 38.85).abs() < 0.01);
        assert!((n.parabola(ts) - by_hand).abs() < 1e-12);
        assert!((n.line(ts) - by_hand).abs() < 1e-9);
    }

    #[test]
    fn overcompliant_up_keeps_initial_rate() {
        let n = NominalTrajectory::up(1.0, 30.0, 25.0, 16.087, 250.0);
        assert_eq!(n.t_switch(), 0.0);
        for t in [0.0, 0.5, 3.0, 40.0] {
            assert_eq!(n.height(t), 30.0 * t);
        }
        // slope continuity: the rate just after 0 is the kept rate
        assert_eq!(n.rate(0.0), 30.0);
    }

    #[test]
    fn band_entry_on_parabola_and_line() {
        let n = NominalTrajectory::lo(1.0, 0.0, 25.0, A_LO, 250.0);
        // h_n = 100 is reached on the line: 25 t - 38.85 = 100
        let d = 25.0_f64;
        let t_line = (100.0 + d * d / (2.0 * A_LO)) / 25.0;
        let t = n.first_within(200.0, 100.0, 0.0, 100.0).unwrap();
        assert!((t - t_line).abs() < 1e-12);
        // inside the band already
        assert_eq!(n.first_within(50.0, 100.0, 2.0, 10.0), Some(2.0));
        assert_eq!(n.first_within(1e6, 100.0, 0.0, 100.0), None);
    }

    proptest! {
        #[test]
        fn branches_agree_at_switch(w in prop::sample::select(vec![-1.0, 1.0]),
                                    v0 in -200f64..200., vt in -200f64..200.,
                                    a in 0.5f64..40., up in any::<bool>()) {
            let n = if up {
                NominalTrajectory::up(w, v0, vt, a, 100.0)
            } else {
                NominalTrajectory::lo(w, v0, vt, a, 100.0)
            };
            let ts = n.t_switch();
            if ts > 0.0 {
                prop_assert!((n.parabola(ts) - n.line(ts)).abs() <= 1e-9);
                prop_assert!((n.w * n.a * ts + n.v0 - n.final_rate()).abs() <= 1e-9);
            }
        }

        #[test]
        fn lo_height_monotone_in_target(v0 in -100f64..100., lo1 in -100f64..100.,
                                        bump in 0f64..100., t in 0f64..60.) {
            let a = NominalTrajectory::lo(1.0, v0, lo1, A_LO, 0.0).height(t);
            let b = NominalTrajectory::lo(1.0, v0, lo1 + bump, A_LO, 0.0).height(t);
            prop_assert!(b >= a - 1e-9 * (1.0 + a.abs()));
        }

        #[test]
        fn sense_convex(w in prop::sample::select(vec![-1.0, 1.0]), v0 in -100f64..100.,
                        vt in -100f64..100., t1 in 0f64..40., t2 in 0f64..40.) {
            let n = NominalTrajectory::lo(w, v0, vt, A_LO, 0.0);
            let mid = w * n.height((t1 + t2) / 2.0);
            let chord = (w * n.height(t1) + w * n.height(t2)) / 2.0;
            prop_assert!(mid <= chord + 1e-9 * (1.0 + chord.abs()));
        }
    }
}
