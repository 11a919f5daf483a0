//! Floating-point evaluation of the vector field and its chart forms.

use crate::parameter_domain::ParameterPoint;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coeffs {
    pub b0: f64,
    pub b1: f64,
    pub b2: f64,
    pub b3: f64,
    pub c0: f64,
}

impl From<&ParameterPoint> for Coeffs {
    fn from(p: &ParameterPoint) -> Self {
        let [b0, b1, b2, b3, c0] = p.to_f64();
        Coeffs { b0, b1, b2, b3, c0 }
    }
}

impl Coeffs {
    pub fn new(b0: f64, b1: f64, b2: f64, b3: f64, c0: f64) -> Self {
        Coeffs { b0, b1, b2, b3, c0 }
    }

    /// The planar field. Written so that `y = 0` and `z = 0` stay exactly
    /// invariant in floating point.
    #[inline]
    pub fn finite(&self, y: f64, z: f64) -> (f64, f64) {
        let dy = y * ((self.b0 + self.b2 * y) + z * (self.b1 * y + self.b3));
        let dz = z * ((self.c0 + self.b3 * z) + y * (self.b1 * z + self.b2));
        (dy, dz)
    }

    #[inline]
    pub fn jacobian(&self, y: f64, z: f64) -> [[f64; 2]; 2] {
        let Coeffs { b0, b1, b2, b3, c0 } = *self;
        [
            [b0 + 2.0 * b1 * y * z + 2.0 * b2 * y + b3 * z, b1 * y * y + b3 * y],
            [b1 * z * z + b2 * z, c0 + 2.0 * b1 * y * z + b2 * y + 2.0 * b3 * z],
        ]
    }

    /// Field in chart 1 (`u = z/y`, `v = 1/y`), already divided by `v`.
    #[inline]
    pub fn reduced1(&self, u: f64, v: f64) -> (f64, f64) {
        let du = (self.c0 - self.b0) * u * v;
        let dv = -(self.b3 * u * v + self.b0 * v * v + self.b1 * u + self.b2 * v);
        (du, dv)
    }

    /// Field in chart 2 (`u = y/z`, `v = 1/z`), already divided by `v`.
    #[inline]
    pub fn reduced2(&self, u: f64, v: f64) -> (f64, f64) {
        let du = (self.b0 - self.c0) * u * v;
        let dv = -(self.b2 * u * v + self.c0 * v * v + self.b1 * u + self.b3 * v);
        (du, dv)
    }

    #[inline]
    pub fn chart1(&self, u: f64, v: f64) -> (f64, f64) {
        let (du, dv) = self.reduced1(u, v);
        (v * du, v * dv)
    }

    #[inline]
    pub fn chart2(&self, u: f64, v: f64) -> (f64, f64) {
        let (du, dv) = self.reduced2(u, v);
        (v * du, v * dv)
    }
}
