//! Policy optimization for continuous-time LQR and Polyak-Łojasiewicz
//! diagnostics.
//!
//! The crate covers:
//!
//! - dense linear algebra for small systems (`linalg`): LU, eigenvalues,
//!   continuous Lyapunov equations;
//! - the LQR cost `J(K)`, its gradient and the optimal gain (`lqr`);
//! - high-gain pole-placement curves (`highgain`);
//! - closed forms for the scalar plant and its discretization (`scalar`);
//! - an adaptive Dormand-Prince integrator for gradient and proximal flows
//!   (`flow`);
//! - empirical PL constants, saturated comparison fits and rate certificates
//!   (`pli`);
//! - the `pli-lab` experiment runner (`experiment`).
//!
//! Runnable examples live in `examples/`:
//!
//! ```text
//! cargo run --release --example scalar_profile
//! cargo run --release --example gradient_flow
//! cargo run --release --example no_global_pli
//! cargo run --release --example dt_sweep
//! cargo run --release --example pli_zoo
//! cargo run --release --example prox_flow
//! cargo run --release --example lyapunov_riccati
//! cargo run --release --example proposition_check
//! ```

pub mod experiment;
pub mod flow;
pub mod grid;
pub mod highgain;
pub mod linalg;
pub mod lqr;
pub mod pli;
pub mod scalar;
