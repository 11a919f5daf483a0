//! Dormand–Prince 5(4) for autonomous planar fields.

pub type State = [f64; 2];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { rtol: 1e-10, atol: 1e-12 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepError {
    StepTooSmall,
    NonFinite,
}

#[cfg(test)]
const C2: f64 = 1.0 / 5.0;
#[cfg(test)]
const C3: f64 = 3.0 / 10.0;
#[cfg(test)]
const C4: f64 = 4.0 / 5.0;
#[cfg(test)]
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// Difference between the 5th and embedded 4th order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

#[inline]
fn axpy(y: &State, terms: &[(f64, &State)], h: f64) -> State {
    let mut out = *y;
    for (c, k) in terms {
        out[0] += h * c * k[0];
        out[1] += h * c * k[1];
    }
    out
}

/// Adaptive stepper. The field is supplied on every call so callers can
/// swap charts between steps.
#[derive(Debug, Clone)]
pub struct Stepper {
    pub y: State,
    pub t: f64,
    pub h: f64,
    pub tol: Tolerances,
    pub h_min: f64,
    k1: Option<State>,
}

impl Stepper {
    pub fn new(y: State, h0: f64, tol: Tolerances) -> Self {
        Stepper { y, t: 0.0, h: h0, tol, h_min: 1e-14, k1: None }
    }

    /// Restarts from a new state (e.g. after a chart change).
    pub fn reset(&mut self, y: State) {
        self.y = y;
        self.k1 = None;
    }

    /// Takes one accepted step of size at most `h_max`; returns the step used.
    pub fn step<F: FnMut(&State) -> State>(&mut self, f: &mut F, h_max: f64) -> Result<f64, StepError> {
        let k1 = match self.k1 {
            Some(k) => k,
            None => f(&self.y),
        };
        let mut h = self.h.min(h_max);
        loop {
            if !(h > self.h_min) {
                return Err(StepError::StepTooSmall);
            }
            let y = &self.y;
            let k2 = f(&axpy(y, &[(A21, &k1)], h));
            let k3 = f(&axpy(y, &[(A31, &k1), (A32, &k2)], h));
            let k4 = f(&axpy(y, &[(A41, &k1), (A42, &k2), (A43, &k3)], h));
            let k5 = f(&axpy(y, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)], h));
            let k6 = f(&axpy(y, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)], h));
            let y_new = axpy(y, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)], h);
            let k7 = f(&y_new);
            let mut err = 0.0f64;
            for i in 0..2 {
                let e = h
                    * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                let sc = self.tol.atol + self.tol.rtol * y[i].abs().max(y_new[i].abs());
                err = err.max((e / sc).abs());
            }
            if !err.is_finite() || !y_new[0].is_finite() || !y_new[1].is_finite() {
                h *= 0.25;
                if !(h > self.h_min) {
                    return Err(StepError::NonFinite);
                }
                continue;
            }
            if err <= 1.0 {
                self.y = y_new;
                self.t += h;
                self.k1 = Some(k7);
                let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                self.h = h * fac;
                return Ok(h);
            }
            h *= (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
            self.h = h;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nodes_are_row_sums() {
        assert!((A21 - C2).abs() < 1e-15);
        assert!((A31 + A32 - C3).abs() < 1e-15);
        assert!((A41 + A42 + A43 - C4).abs() < 1e-15);
        assert!((A51 + A52 + A53 + A54 - C5).abs() < 1e-13);
        assert!((A61 + A62 + A63 + A64 + A65 - 1.0).abs() < 1e-13);
        assert!((B1 + B3 + B4 + B5 + B6 - 1.0).abs() < 1e-15);
        assert!((E1 + E3 + E4 + E5 + E6 + E7).abs() < 1e-15);
    }

    #[test]
    fn harmonic_oscillator_stays_on_circle() {
        let mut f = |s: &State| [s[1], -s[0]];
        let mut st = Stepper::new([1.0, 0.0], 0.1, Tolerances::default());
        while st.t < 2.0 * std::f64::consts::PI {
            let left = 2.0 * std::f64::consts::PI - st.t;
            st.step(&mut f, left.max(1e-12)).unwrap();
        }
        assert!((st.y[0] - 1.0).abs() < 1e-8, "{:?}", st.y);
        assert!(st.y[1].abs() < 1e-8);
    }

    #[test]
    fn exponential_decay_matches_closed_form() {
        let mut f = |s: &State| [-s[0], -2.0 * s[1]];
        let mut st = Stepper::new([1.0, 1.0], 0.01, Tolerances::default());
        while st.t < 3.0 {
            st.step(&mut f, 3.0 - st.t).unwrap();
        }
        assert!((st.y[0] - (-3.0f64).exp()).abs() < 1e-10);
        assert!((st.y[1] - (-6.0f64).exp()).abs() < 1e-10);
    }
}
