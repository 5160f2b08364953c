//! Exact certification toolkit for sums-of-squares questions about rational
//! forms: tower arithmetic, exact linear algebra and PSD decisions, Gram
//! constraint spaces, numeric-to-exact rounding, Groebner-based smoothness
//! checks, positivity certificates, and the end-to-end verification pipeline.

pub mod exactnum;
pub mod multipoly;
pub mod linalg;
pub mod numopt;
pub mod gram;
pub mod groebner;
pub mod pipeline;
pub mod positivity;
