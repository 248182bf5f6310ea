//! Daily opening schedule. Each simulated day is a 24-hour span whose first
//! `open_minutes` belong to the opening window; arrivals occur only inside
//! open windows, while in-flight service runs to completion regardless.

use crate::config::RunControl;
use crate::Minutes;

pub const MINUTES_PER_DAY: f64 = 24.0 * 60.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpeningHours {
    days: u32,
    open_minutes: f64,
}

impl OpeningHours {
    pub fn new(days: u32, open_minutes_per_day: f64) -> Self {
        debug_assert!(open_minutes_per_day > 0.0 && open_minutes_per_day <= MINUTES_PER_DAY);
        OpeningHours {
            days,
            open_minutes: open_minutes_per_day,
        }
    }

    pub fn from_run(run: &RunControl) -> Self {
        Self::new(run.days(), run.open_hours_per_day * 60.0)
    }

    pub fn days(&self) -> u32 {
        self.days
    }

    pub fn open_minutes_per_day(&self) -> f64 {
        self.open_minutes
    }

    pub fn total_open_minutes(&self) -> f64 {
        self.days as f64 * self.open_minutes
    }

    /// End of the last calendar day; arrivals have long stopped by then.
    pub fn horizon(&self) -> Minutes {
        self.days as f64 * MINUTES_PER_DAY
    }

    /// Close of the final opening window.
    pub fn last_close(&self) -> Minutes {
        (self.days.saturating_sub(1)) as f64 * MINUTES_PER_DAY + self.open_minutes
    }

    pub fn is_open(&self, t: Minutes) -> bool {
        if t < 0.0 || t >= self.horizon() {
            return false;
        }
        t - (t / MINUTES_PER_DAY).floor() * MINUTES_PER_DAY < self.open_minutes
    }

    /// Maps a candidate arrival time to the next instant inside an opening
    /// window, carrying any residual gap over into the next day. Returns
    /// `None` once past the final window.
    pub fn carry_into_open(&self, mut t: Minutes) -> Option<Minutes> {
        loop {
            let day = (t / MINUTES_PER_DAY).floor();
            if day >= self.days as f64 {
                return None;
            }
            let within = t - day * MINUTES_PER_DAY;
            if within < self.open_minutes {
                return Some(t);
            }
            t = (day + 1.0) * MINUTES_PER_DAY + (within - self.open_minutes);
        }
    }

    /// Open minutes overlapped by the interval `[from, to)`.
    pub fn open_overlap(&self, from: Minutes, to: Minutes) -> f64 {
        if to <= from {
            return 0.0;
        }
        let first_day = (from / MINUTES_PER_DAY).floor().max(0.0) as u32;
        let mut total = 0.0;
        for day in first_day..self.days {
            let open_start = day as f64 * MINUTES_PER_DAY;
            let open_end = open_start + self.open_minutes;
            if open_start >= to {
                break;
            }
            let lo = from.max(open_start);
            let hi = to.min(open_end);
            if hi > lo {
                total += hi - lo;
            }
        }
        total
    }
}
