//! Finitely presented groups: free-group words, presentations and Tietze
//! moves, Todd–Coxeter coset enumeration, abelianization, consequence
//! certificates, and the log-transform gluing matrices on `H1(T^3)`.
//!
//! Matrix code is generic over [`Scalar`]; the aliases below fix the
//! concrete integer types used throughout the toolkit.

pub mod abelian;
pub mod corpus;
pub mod enumerator;
pub mod parser;
pub mod presentation;
pub mod proofcheck;
pub mod quotient;
pub mod scalar;
pub mod surgery;
pub mod verify;
pub mod word;

pub use num_bigint::BigInt;
pub use scalar::Scalar;

/// Arbitrary-precision integer matrix.
pub type IntMatrix = abelian::Matrix<BigInt>;
/// Smith normal form over arbitrary-precision integers.
pub type IntSmithForm = abelian::SmithForm<BigInt>;
pub type Invariants = abelian::AbelianInvariants<BigInt>;
/// 3×3 gluing matrix over machine integers.
pub type GluingMatrix = surgery::Gluing<i64>;

pub use enumerator::{enumerate, verify_table, CosetTable, EnumerationResult, Limits, Outcome};
pub use parser::{parse_presentation, parse_proof, parse_word, serialize_presentation, ParseError};
pub use presentation::{Presentation, TietzeLog, TietzeMove};
pub use proofcheck::{check_script, ProofScript, ScriptReport};
pub use word::{Alphabet, Letter, Word};
