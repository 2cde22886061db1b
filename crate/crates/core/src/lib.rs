pub mod error;
pub mod scalar;
pub mod series;
pub mod bell;
pub mod qcalc;
pub mod triangle;
pub mod oracle;
pub mod iterate;
pub mod itlog;
