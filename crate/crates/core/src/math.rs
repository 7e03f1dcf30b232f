//! Thin wrappers over `libm` so the rest of the crate stays `no_std`.

pub fn sin(x: f64) -> f64 {
    libm::sin(x)
}

pub fn cos(x: f64) -> f64 {
    libm::cos(x)
}

pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}

pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

pub fn log2(x: f64) -> f64 {
    libm::log2(x)
}

pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

pub fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

pub fn exp_f32(x: f32) -> f32 {
    libm::expf(x)
}

/// Error function, used by the normal CDF in `stats`.
pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}
