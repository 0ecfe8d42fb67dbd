//! Error type shared by every module of the crate.

use thiserror::Error;

/// Errors surfaced by series arithmetic, enumeration and decomposition.
///
/// Every operation that can fail returns `Result<T, Error>`; panics are
/// reserved for violated internal invariants that tests would catch.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Binary series operation on operands of different order or arity.
    #[error("mismatched series shape: order {lhs_order} arity {lhs_arity} vs order {rhs_order} arity {rhs_arity}")]
    MismatchedShape {
        lhs_order: usize,
        lhs_arity: usize,
        rhs_order: usize,
        rhs_arity: usize,
    },

    /// A coefficient left the 128-bit checked-integer range.
    #[error("coefficient overflow in exact integer arithmetic")]
    Overflow,

    /// Geometric expansion of 1/(1 - c q^d) needs d >= 1 to terminate.
    #[error("illegal q-shift: factor without a positive q power cannot be expanded")]
    IllegalShift,

    /// Coefficient query beyond the truncation order.
    #[error("q-degree {degree} out of range: series is truncated at order {order}")]
    OutOfRange { degree: usize, order: usize },

    /// An enumeration produced more members than the configured limit.
    #[error("capacity exceeded: more than {limit} members generated")]
    Capacity { limit: u64 },

    /// Input partition failed class validation.
    #[error("not a member of class {class}")]
    NotAMember { class: String },

    /// Parameters outside the stated domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Truncation cannot be completed with the requested summation bound.
    #[error("incomplete truncation: m_max {m_max} is too small for order {order}")]
    Incomplete { m_max: usize, order: usize },

    /// An internal invariant failed; indicates a bug, not bad input.
    #[error("internal invariant violated: {0}")]
    Internal(String),

    /// Partition text that does not follow the tilde notation.
    #[error("cannot parse partition text: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
