use serde::Serialize;
use thiserror::Error;

/// Failure while tokenizing or parsing a (P-)SMILES string.
///
/// Every variant carries enough context to serialize as
/// `(code, byte offset, message)`.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SmilesError {
    #[error("empty input")]
    EmptyInput,
    #[error("non-ASCII character at byte {position}")]
    NonAscii { position: usize },
    #[error("unknown character {character:?} at byte {position}")]
    UnknownCharacter { position: usize, character: char },
    #[error("unterminated bracket atom starting at byte {position}")]
    UnterminatedBracket { position: usize },
    #[error("malformed bracket atom at byte {position}: {reason}")]
    InvalidBracketAtom { position: usize, reason: String },
    #[error("ring closure {digit} is never closed (opened at byte {position})")]
    UnmatchedRingClosure { digit: u16, position: usize },
    #[error("ring closure {digit} at byte {position} has conflicting bond symbols")]
    ConflictingRingBond { digit: u16, position: usize },
    #[error("unmatched parenthesis at byte {position}")]
    UnmatchedParenthesis { position: usize },
    #[error("bond or branch at byte {position} has no preceding atom")]
    DanglingBond { position: usize },
    #[error("duplicate bond between atoms {first} and {second}")]
    DuplicateBond { first: usize, second: usize, position: usize },
    #[error("valence exceeded on atom {atom}")]
    ValenceExceeded { atom: usize, position: usize },
    #[error("input contains more than one component ('.' at byte {position})")]
    DisconnectedInput { position: usize },
    #[error("aromatic atoms starting at atom {atom} cannot form an aromatic system")]
    KekulizationFailure { atom: usize, position: usize },
}

impl SmilesError {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            SmilesError::EmptyInput => "EmptyInput",
            SmilesError::NonAscii { .. } => "NonAscii",
            SmilesError::UnknownCharacter { .. } => "UnknownCharacter",
            SmilesError::UnterminatedBracket { .. } => "UnterminatedBracket",
            SmilesError::InvalidBracketAtom { .. } => "InvalidBracketAtom",
            SmilesError::UnmatchedRingClosure { .. } => "UnmatchedRingClosure",
            SmilesError::ConflictingRingBond { .. } => "ConflictingRingBond",
            SmilesError::UnmatchedParenthesis { .. } => "UnmatchedParenthesis",
            SmilesError::DanglingBond { .. } => "DanglingBond",
            SmilesError::DuplicateBond { .. } => "DuplicateBond",
            SmilesError::ValenceExceeded { .. } => "ValenceExceeded",
            SmilesError::DisconnectedInput { .. } => "DisconnectedInput",
            SmilesError::KekulizationFailure { .. } => "KekulizationFailure",
        }
    }

    /// Byte offset into the input the error refers to.
    pub fn position(&self) -> usize {
        match self {
            SmilesError::EmptyInput => 0,
            SmilesError::NonAscii { position }
            | SmilesError::UnknownCharacter { position, .. }
            | SmilesError::UnterminatedBracket { position }
            | SmilesError::InvalidBracketAtom { position, .. }
            | SmilesError::UnmatchedRingClosure { position, .. }
            | SmilesError::ConflictingRingBond { position, .. }
            | SmilesError::UnmatchedParenthesis { position }
            | SmilesError::DanglingBond { position }
            | SmilesError::DuplicateBond { position, .. }
            | SmilesError::ValenceExceeded { position, .. }
            | SmilesError::DisconnectedInput { position }
            | SmilesError::KekulizationFailure { position, .. } => *position,
        }
    }

    pub fn report(&self) -> ErrorReport {
        ErrorReport { code: self.code(), offset: self.position(), message: self.to_string() }
    }
}

/// Serializable `(code, byte offset, message)` triple.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ErrorReport {
    pub code: &'static str,
    pub offset: usize,
    pub message: String,
}
