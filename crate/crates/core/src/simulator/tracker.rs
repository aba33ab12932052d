use crate::error::{Error, Result};

/// Relative slack when checking that a delivery does not raise the age;
/// resets and event times are sums of slot durations and can differ in the
/// last bits.
const AGE_SLACK: f64 = 1e-9;

/// Piecewise-linear age process of one user with exact area accumulation.
///
/// Between events the age grows with unit slope; a delivery drops it to the
/// reset value. Only the part of the sawtooth after `accumulation_start`
/// contributes to the area.
#[derive(Debug, Clone, PartialEq)]
pub struct AoiTracker {
    last_event_time: f64,
    age_at_last_event: f64,
    accumulated_area: f64,
    accumulation_start: f64,
}

impl AoiTracker {
    pub fn new(start_time: f64, initial_age: f64, accumulation_start: f64) -> Self {
        AoiTracker {
            last_event_time: start_time,
            age_at_last_event: initial_age,
            accumulated_area: 0.0,
            accumulation_start,
        }
    }

    pub fn last_event_time(&self) -> f64 {
        self.last_event_time
    }

    pub fn accumulated_area(&self) -> f64 {
        self.accumulated_area
    }

    pub fn accumulation_start(&self) -> f64 {
        self.accumulation_start
    }

    pub fn age_at(&self, t: f64) -> f64 {
        self.age_at_last_event + (t - self.last_event_time)
    }

    /// Area under the open segment from the last event to `t`, clipped to the
    /// accumulation window.
    fn open_segment_area(&self, t: f64) -> f64 {
        let lo = self.last_event_time.max(self.accumulation_start);
        if t <= lo {
            return 0.0;
        }
        let age = self.age_at(lo);
        let dt = t - lo;
        age * dt + 0.5 * dt * dt
    }

    /// Accumulated area up to `t` without recording an event.
    pub fn area_until(&self, t: f64) -> f64 {
        self.accumulated_area + self.open_segment_area(t)
    }

    pub fn reset_age(&mut self, t_event: f64, new_age: f64) -> Result<()> {
        if t_event < self.last_event_time {
            return Err(Error::TimeRegression {
                last: self.last_event_time,
                event: t_event,
            });
        }
        let before = self.age_at(t_event);
        if new_age.is_nan() || new_age <= 0.0 || new_age > before * (1.0 + AGE_SLACK) {
            return Err(Error::AgeIncrease {
                before,
                after: new_age,
            });
        }
        self.accumulated_area += self.open_segment_area(t_event);
        self.age_at_last_event = new_age;
        self.last_event_time = t_event;
        Ok(())
    }

    /// Time-average age over `[accumulation_start, t_end]`.
    pub fn finalize(&self, t_end: f64) -> Result<f64> {
        if t_end < self.last_event_time {
            return Err(Error::TimeRegression {
                last: self.last_event_time,
                event: t_end,
            });
        }
        let window = t_end - self.accumulation_start;
        if window.is_nan() || window <= 0.0 {
            return Err(Error::EmptyWindow);
        }
        Ok(self.area_until(t_end) / window)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trapezoid_area() {
        let mut tr = AoiTracker::new(0.0, 1.0, 0.0);
        tr.reset_age(2.0, 1.0).unwrap();
        assert_eq!(tr.accumulated_area(), 4.0);
        tr.reset_age(2.0, 1.0).unwrap();
        assert_eq!(tr.accumulated_area(), 4.0);
    }

    #[test]
    fn ramp_average() {
        let tr = AoiTracker::new(0.0, 2.0, 0.0);
        assert_eq!(tr.finalize(4.0).unwrap(), 4.0);
        assert!(matches!(tr.finalize(0.0), Err(Error::EmptyWindow)));
    }

    #[test]
    fn periodic_resets_average() {
        let (slot, users) = (1.5, 8.0);
        let frame = slot * users;
        let mut tr = AoiTracker::new(0.0, slot, 0.0);
        let n = 1000;
        for j in 1..=n {
            tr.reset_age(j as f64 * frame, slot).unwrap();
        }
        let avg = tr.finalize(n as f64 * frame).unwrap();
        assert!((avg - (slot + frame / 2.0)).abs() < 1e-12);
    }

    #[test]
    fn window_clipping() {
        // age 1 at t=0; window starts at 3 where age is 4; reset at 5
        let mut tr = AoiTracker::new(0.0, 1.0, 3.0);
        tr.reset_age(2.0, 0.5).unwrap();
        assert_eq!(tr.accumulated_area(), 0.0);
        // segment 2..5 with age 0.5 at t=2 → age 1.5 at t=3, 2 s more
        tr.reset_age(5.0, 1.0).unwrap();
        assert!((tr.accumulated_area() - (1.5 * 2.0 + 2.0)).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_events() {
        let mut tr = AoiTracker::new(0.0, 1.0, 0.0);
        tr.reset_age(2.0, 1.0).unwrap();
        assert!(matches!(tr.reset_age(1.0, 0.5), Err(Error::TimeRegression { .. })));
        assert!(matches!(tr.reset_age(3.0, 5.0), Err(Error::AgeIncrease { .. })));
        assert!(tr.reset_age(3.0, 0.0).is_err());
    }

    #[test]
    fn area_is_non_decreasing() {
        let mut tr = AoiTracker::new(0.0, 0.5, 0.0);
        let mut last = 0.0;
        for k in 1..50 {
            let t = k as f64 * 0.7;
            tr.reset_age(t, 0.5 + (k % 3) as f64 * 0.1).unwrap();
            assert!(tr.accumulated_area() >= last);
            last = tr.accumulated_area();
        }
    }
}
