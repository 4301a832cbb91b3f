use alloc::string::String;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    /// A configuration bound was violated. `field` names the offending key.
    #[error("{field} {reason}")]
    Config { field: &'static str, reason: String },
    #[error("{what} {value} out of range {min}..={max}")]
    Range { what: &'static str, value: u64, min: u64, max: u64 },
    #[error("unknown entity `{0}`")]
    UnknownEntity(String),
    #[error("self pair `{0}` has no route")]
    SelfPair(String),
    #[error("search budget of {budget} nodes exhausted at {time_slots} time slots")]
    BudgetExhausted { budget: u64, time_slots: usize },
    #[error("assignment table is invalid ({violations} violations)")]
    InvalidTable { violations: usize },
}

impl Error {
    pub(crate) fn config(field: &'static str, reason: impl Into<String>) -> Self {
        Error::Config { field, reason: reason.into() }
    }
}
