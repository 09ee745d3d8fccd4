pub mod complex;
pub mod divisor;
pub mod error;
pub mod model;
pub mod poly;
pub mod quadrature;
pub mod roots;
pub mod fit;
pub mod nevanlinna;
pub mod difference;
pub mod thresholds;
pub mod corpus;
pub mod verifier;
