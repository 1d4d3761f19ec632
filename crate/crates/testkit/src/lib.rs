//! Reference implementations used only as test oracles.
//!
//! Nothing here shares code with `lpu-core`; each routine takes the slow,
//! obvious route (enumeration, dense linear solves, recounting) so that it
//! can check the production path independently.

pub mod qp;
pub mod reference;
