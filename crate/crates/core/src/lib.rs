pub mod data;
pub mod error;
pub mod filter;
pub mod harness;
pub mod oracle;
pub mod pipeline;
pub mod rng;
pub mod scalar;
pub mod search;
pub mod tensor;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Dataset64 = data::Dataset<f64>;
pub type Dataset32 = data::Dataset<f32>;
pub type Tensor64 = tensor::SymmetricTensor<f64>;
pub type Tensor32 = tensor::SymmetricTensor<f32>;
pub type Subspace64 = filter::Subspace<f64>;
pub type Subspace32 = filter::Subspace<f32>;
pub type CandidateList64 = search::CandidateList<f64>;
pub type CandidateList32 = search::CandidateList<f32>;
