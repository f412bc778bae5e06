use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("modulus is not irreducible over F_{p}")]
    ReducibleModulus { p: u64 },
    #[error("modulus must be monic of degree {expected}, got {got} coefficients")]
    DegreeMismatch { expected: usize, got: usize },
    #[error("modulus coefficient {0} is not reduced modulo p")]
    ModulusOutOfRange(u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("zero polynomial is not allowed here")]
    ZeroPolynomial,
    #[error("polynomial {0} has a nonzero constant term")]
    NonzeroConstantTerm(String),
    #[error("polynomial {0} appears twice")]
    DuplicatePolynomial(String),
    #[error("empty input")]
    EmptyInput,
    #[error("polynomials are linearly dependent over Q (witness {witness:?})")]
    DependentSystem { witness: Vec<String> },
    #[error("element is not in the field")]
    ElementOutOfField,
    #[error("invalid exponent {0}")]
    InvalidExponent(f64),
    #[error("cost {cost:.3e} exceeds the budget {budget:.3e}")]
    BudgetExceeded { cost: f64, budget: f64 },
    #[error("function is not 1-bounded (sup norm {0})")]
    NotOneBounded(f64),
    #[error("expected {expected} functions, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("system has twisting polynomials; a pure progression system is required")]
    TwistedSystem,
    #[error("index {index} out of range {lo}..={hi}")]
    IndexOutOfRange { index: usize, lo: usize, hi: usize },
    #[error("combined polynomial is constant over F_{p}; characteristic below the threshold?")]
    DegenerateCombination { p: u64 },
    #[error("parameter out of range: {0}")]
    InvalidRange(String),
    #[error("invalid initial bound state: {0}")]
    InvalidInit(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("function has L2 norm {0} > 1")]
    NotL2Normalized(f64),
    #[error("need at least {needed} usable data points, got {got}")]
    InsufficientData { needed: usize, got: usize },
    #[error("characteristic {p} is below the system threshold {threshold}")]
    ThresholdViolation { p: u64, threshold: String },
    #[error("malformed input: {0}")]
    Parse(String),
}
