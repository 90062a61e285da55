pub mod analysis;
pub mod corpus;
pub mod explore;

/// How a command finished when it did not fail outright.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    /// Some games failed or the run stopped early.
    Partial,
}
