use serde::{Deserialize, Serialize};

use crate::reward::Vec3;

/// Cubic Hermite segment on `[t0, t1]` matching positions and velocities at both ends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cubic {
    pub t0: f64,
    pub t1: f64,
    pub p0: Vec3,
    pub v0: Vec3,
    pub p1: Vec3,
    pub v1: Vec3,
}

impl Cubic {
    pub fn new(t0: f64, t1: f64, p0: Vec3, v0: Vec3, p1: Vec3, v1: Vec3) -> Cubic {
        Cubic {
            t0,
            t1,
            p0,
            v0,
            p1,
            v1,
        }
    }

    /// Rest-to-rest move.
    pub fn rest_to_rest(t0: f64, t1: f64, p0: Vec3, p1: Vec3) -> Cubic {
        Cubic::new(t0, t1, p0, [0.0; 3], p1, [0.0; 3])
    }

    pub fn duration(&self) -> f64 {
        self.t1 - self.t0
    }

    /// Power-basis coefficients of coordinate `k` in normalized time.
    fn coeffs(&self, k: usize) -> [f64; 4] {
        let h = self.duration();
        let (p0, p1) = (self.p0[k], self.p1[k]);
        let (m0, m1) = (self.v0[k] * h, self.v1[k] * h);
        [
            p0,
            m0,
            -3.0 * p0 - 2.0 * m0 + 3.0 * p1 - m1,
            2.0 * p0 + m0 - 2.0 * p1 + m1,
        ]
    }

    fn tau(&self, t: f64) -> f64 {
        let h = self.duration();
        if h <= 0.0 {
            return 1.0;
        }
        ((t - self.t0) / h).clamp(0.0, 1.0)
    }

    pub fn position(&self, t: f64) -> Vec3 {
        let s = self.tau(t);
        std::array::from_fn(|k| {
            let c = self.coeffs(k);
            c[0] + s * (c[1] + s * (c[2] + s * c[3]))
        })
    }

    pub fn velocity(&self, t: f64) -> Vec3 {
        let h = self.duration();
        if h <= 0.0 {
            return self.v1;
        }
        let s = self.tau(t);
        std::array::from_fn(|k| {
            let c = self.coeffs(k);
            (c[1] + s * (2.0 * c[2] + 3.0 * s * c[3])) / h
        })
    }

    pub fn acceleration(&self, t: f64) -> Vec3 {
        let h = self.duration();
        if h <= 0.0 {
            return [0.0; 3];
        }
        let s = self.tau(t);
        std::array::from_fn(|k| {
            let c = self.coeffs(k);
            (2.0 * c[2] + 6.0 * s * c[3]) / (h * h)
        })
    }

    /// Largest speed over the segment.
    pub fn peak_speed(&self) -> f64 {
        let h = self.duration();
        if h <= 0.0 {
            return norm(self.v1);
        }
        // |v|² is a quartic in tau; its maximum sits at an endpoint or where
        // v·a = 0, a cubic whose real roots are found by bisection on a grid.
        let speed2 = |s: f64| {
            let v = self.velocity(self.t0 + s * h);
            dot(v, v)
        };
        let dvda = |s: f64| {
            let t = self.t0 + s * h;
            dot(self.velocity(t), self.acceleration(t))
        };
        let mut best = speed2(0.0).max(speed2(1.0));
        const GRID: usize = 64;
        for i in 0..GRID {
            let (mut a, mut b) = (i as f64 / GRID as f64, (i + 1) as f64 / GRID as f64);
            let (mut fa, fb) = (dvda(a), dvda(b));
            if fa == 0.0 {
                best = best.max(speed2(a));
            }
            if fa * fb < 0.0 {
                for _ in 0..60 {
                    let m = 0.5 * (a + b);
                    let fm = dvda(m);
                    if fa * fm <= 0.0 {
                        b = m;
                    } else {
                        a = m;
                        fa = fm;
                    }
                }
                best = best.max(speed2(0.5 * (a + b)));
            }
        }
        best.sqrt()
    }

    /// Largest acceleration magnitude; acceleration is affine in time, so an endpoint.
    pub fn peak_accel(&self) -> f64 {
        norm(self.acceleration(self.t0)).max(norm(self.acceleration(self.t1)))
    }

    /// True when the vertical coordinate never moves against its net direction.
    pub fn is_monotone(&self) -> bool {
        let dz = self.p1[2] - self.p0[2];
        let h = self.duration();
        (0..=256).all(|i| {
            let vz = self.velocity(self.t0 + h * i as f64 / 256.0)[2];
            vz * dz >= -1e-12
        })
    }
}

fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm(a: Vec3) -> f64 {
    dot(a, a).sqrt()
}
