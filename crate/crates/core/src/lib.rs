pub mod ansatz;
pub mod bayesopt;
pub mod cli;
pub mod entropy;
pub mod error;
pub mod intrinsic;
pub mod noise;
pub mod qsim;
pub mod rng;
pub mod scp;
pub mod shadows;

pub use error::{Error, Result};
pub use rng::RngStream;
