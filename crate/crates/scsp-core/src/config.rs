//! Numeric tolerances and behaviour switches shared across the engine.

/// Tolerances and switches threaded through the algebra, propagation and
/// feasibility layers.
///
/// The defaults are safe for inputs whose angles are rational multiples of
/// pi (the translation constants are multiples of pi/8, far apart relative
/// to `eps_angle`).
#[derive(Clone, Copy, Debug)]
pub struct Config {
    /// Absolute tolerance for comparing angles and sector bounds.
    pub eps_angle: f64,
    /// Margin threshold above which a strict inequality system counts as
    /// strictly feasible.
    pub eps_strict: f64,
    /// Whether composition may add the equality atom when some direction of
    /// the left operand has its antipode in the right operand (the x = z
    /// case is then realizable).
    pub compose_emit_equality: bool,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            eps_angle: 1e-9,
            eps_strict: 1e-7,
            compose_emit_equality: true,
        }
    }
}

impl Config {
    pub fn with_eps_angle(mut self, eps: f64) -> Self {
        self.eps_angle = eps;
        self
    }

    pub fn with_eps_strict(mut self, eps: f64) -> Self {
        self.eps_strict = eps;
        self
    }
}
