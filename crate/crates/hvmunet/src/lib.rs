pub mod error;
pub mod gradcheck;
pub mod nn;
pub mod tensor;
