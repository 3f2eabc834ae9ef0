use std::fmt;

/// Reference frame of a stream function: rotating with angular velocity Ω,
/// or at rest.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Frame {
    Rotating { omega: f64 },
    Rest,
}

impl Frame {
    /// Ω entering the Coriolis term; 0 in the rest frame.
    pub fn omega(&self) -> f64 {
        match *self {
            Frame::Rotating { omega } => omega,
            Frame::Rest => 0.0,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Frame::Rotating { .. } => "rotating",
            Frame::Rest => "rest",
        }
    }
}

impl fmt::Display for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Frame::Rotating { omega } => write!(f, "rotating(omega={omega})"),
            Frame::Rest => write!(f, "rest"),
        }
    }
}
