//! Loss generators for Orlicz norms: strictly increasing convex G on [0, inf)
//! with G(0) = 0, G(x) = G(-x), and at-most-quadratic relative growth
//! G(y)/G(x) <= C_G (y/x)^2.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GFunc {
    /// G(t) = t^2; the induced norm is L2.
    Square,
    /// G(t) = t; the induced norm is L1.
    Abs,
    /// G(t) = t^2/2 for t <= delta, delta*t - delta^2/2 above.
    Huber { delta: f64 },
}

impl GFunc {
    pub fn huber() -> Self {
        GFunc::Huber { delta: 1.0 }
    }

    pub fn name(&self) -> String {
        match self {
            GFunc::Square => "square".into(),
            GFunc::Abs => "abs".into(),
            GFunc::Huber { delta } if *delta == 1.0 => "huber".into(),
            GFunc::Huber { delta } => format!("huber:{delta}"),
        }
    }

    pub fn parse(spec: &str) -> Result<Self> {
        match spec {
            "square" | "l2" => Ok(GFunc::Square),
            "abs" | "identity" | "l1" => Ok(GFunc::Abs),
            "huber" => Ok(GFunc::huber()),
            other => {
                if let Some(d) = other.strip_prefix("huber:") {
                    let delta: f64 = d
                        .parse()
                        .map_err(|e| Error::parameter("g", format!("bad huber delta: {e}")))?;
                    if delta <= 0.0 {
                        return Err(Error::parameter("g", "huber delta must be positive"));
                    }
                    Ok(GFunc::Huber { delta })
                } else {
                    Err(Error::parameter("g", format!("unknown loss `{other}`")))
                }
            }
        }
    }

    #[inline]
    pub fn value(&self, t: f64) -> f64 {
        let t = t.abs();
        match *self {
            GFunc::Square => t * t,
            GFunc::Abs => t,
            GFunc::Huber { delta } => {
                if t <= delta {
                    0.5 * t * t
                } else {
                    delta * t - 0.5 * delta * delta
                }
            }
        }
    }

    #[inline]
    pub fn derivative(&self, t: f64) -> f64 {
        let s = t.signum();
        let t = t.abs();
        s * match *self {
            GFunc::Square => 2.0 * t,
            GFunc::Abs => 1.0,
            GFunc::Huber { delta } => t.min(delta),
        }
    }

    /// The constant C_G with G(y)/G(x) <= C_G (y/x)^2 for 0 < x < y. All three
    /// shipped losses satisfy it with C_G = 1.
    pub fn growth_constant(&self) -> f64 {
        1.0
    }

    /// Slope aspect ratio (G(d2)/d2) / (G(d1)/d1) for 0 < d1 <= d2, clamped to
    /// at least 1. This is the oversampling factor Delta that lets an L1
    /// sensitivity dominate the G-norm sensitivity on data whose inner
    /// products stay inside [d1, d2].
    pub fn aspect_ratio(&self, d1: f64, d2: f64) -> Result<f64> {
        if !(d1 > 0.0 && d2 >= d1) {
            return Err(Error::parameter("delta_range", "need 0 < d1 <= d2"));
        }
        let r = (self.value(d2) / d2) / (self.value(d1) / d1);
        Ok(r.max(1.0))
    }

    /// Sampled sanity check of the structural assumptions: increasing, convex,
    /// G(0) = 0, growth condition on a log grid.
    pub fn check_assumptions(&self) -> Result<()> {
        if self.value(0.0) != 0.0 {
            return Err(Error::Numeric(format!("{}: G(0) != 0", self.name())));
        }
        let grid: Vec<f64> = (-40..=40).map(|k| 10f64.powf(k as f64 / 10.0)).collect();
        let c = self.growth_constant();
        for i in 0..grid.len() {
            for j in i + 1..grid.len() {
                let (x, y) = (grid[i], grid[j]);
                if self.value(y) <= self.value(x) {
                    return Err(Error::Numeric(format!("{}: not increasing", self.name())));
                }
                if self.value(y) / self.value(x) > c * (y / x) * (y / x) * (1.0 + 1e-9) {
                    return Err(Error::Numeric(format!(
                        "{}: growth condition fails at ({x}, {y})",
                        self.name()
                    )));
                }
            }
        }
        for w in grid.windows(3) {
            let mid = self.value(w[1]);
            let chord = self.value(w[0])
                + (self.value(w[2]) - self.value(w[0])) * (w[1] - w[0]) / (w[2] - w[0]);
            if mid > chord * (1.0 + 1e-9) {
                return Err(Error::Numeric(format!("{}: not convex", self.name())));
            }
        }
        Ok(())
    }
}
