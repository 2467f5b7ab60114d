use alloc::string::String;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid weight {0}: expected an even integer >= 4")]
    InvalidWeight(i64),
    #[error("series order {have} too small, need at least {need}")]
    InsufficientOrder { have: usize, need: usize },
    #[error("S_{0} is zero-dimensional")]
    NoCuspForms(u32),
    #[error("characteristic polynomial of T_2 in weight {0} has a repeated root")]
    RepeatedEigenvalue(u32),
    #[error("failed to isolate the eigenvalues of T_2 in weight {0}")]
    EigenvalueIsolation(u32),
    #[error("L-value at s = {s} needs {required} coefficients, eigenform carries {available}")]
    InsufficientCoefficients { s: u32, required: usize, available: usize },
    #[error("argument s = {s} outside the critical strip 1..={max}")]
    OutOfStrip { s: u32, max: u32 },
    #[error("degree {degree} exceeds slash weight {weight}")]
    DegreeOverflow { degree: usize, weight: usize },
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("root refinement did not converge; unconverged starts {0:?}")]
    NoConvergence(alloc::vec::Vec<usize>),
    #[error("phase step could not be refined below pi/2 near t = {0}; possible zero on the contour")]
    ContourZero(f64),
    #[error("winding number {value} is {distance} away from an integer")]
    WindingSnap { value: f64, distance: f64 },
}

pub type Result<T> = core::result::Result<T, Error>;
