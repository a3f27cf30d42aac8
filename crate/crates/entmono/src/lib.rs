//! Bipartite entanglement measures and monogamy-inequality audits for small
//! multi-qudit registers.
//!
//! The crate computes concurrence, negativity, and convex-roof extended
//! negativity (CREN) for dense pure and mixed states, evaluates a family of
//! summation- and product-form monogamy bounds over a ν grid, and audits the
//! bounds against exact or optimizer-bracketed ingredients:
//!
//! - [`tensor`]: register bookkeeping, partial trace/transpose, Schmidt
//!   decompositions, small Hermitian eigensolvers, state JSON I/O.
//! - [`states`]: canonical constructors (W, GHZ, the worked three-qubit
//!   examples, the Ou and Kim–Sanders counterexample states) and seeded
//!   random generators.
//! - [`measures`]: concurrence (pure + Wootters), negativity, CREN dispatch,
//!   and the residual entanglements κ and ε.
//! - [`convexroof`]: upper bounds on convex-roof measures by pair-rotation
//!   descent over Schrödinger–HJW decompositions.
//! - [`monogamy`]: the bound evaluators, interval arithmetic, and the audit
//!   engine with sound worst-case verdicts.
//! - [`cli`]: the `entmono` command-line front end.

pub mod cli;
pub mod convexroof;
pub mod error;
pub mod measures;
pub mod monogamy;
pub mod states;
pub mod tensor;

pub use error::{Error, Result};
