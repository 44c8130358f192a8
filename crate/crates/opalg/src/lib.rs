//! Exact algebra of linear differential operators in `(t, x₁..x_n)` whose
//! coefficients are rational functions of `t^{1/2}`, `xᵢ` and `r = |x|`.

pub mod catalog;
pub mod coeff;
pub mod diffop;
pub mod parser;
pub mod poly;

pub use catalog::{catalog_verify, mixed_verify, CatalogRow, Form, RowStatus};
pub use parser::parse;


pub use coeff::{Coeff, Var};
pub use diffop::{DiffOp, Verification};


#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum OpalgError {
    #[error("syntax error at {line}:{col}: expected {}, found {found}", expected.join(" | "))]
    Parse {
        line: usize,
        col: usize,
        expected: Vec<String>,
        found: String,
    },
    #[error("unknown identifier `{name}` at {line}:{col}")]
    UnknownIdentifier { name: String, line: usize, col: usize },
    #[error("bad exponent at {line}:{col}: {reason}")]
    Exponent { line: usize, col: usize, reason: String },
    #[error("division by an operator at {line}:{col}")]
    NonCoefficientDivision { line: usize, col: usize },
    #[error("unsupported parameters: {0}")]
    Parameter(String),
}

pub type Result<T> = std::result::Result<T, OpalgError>;
