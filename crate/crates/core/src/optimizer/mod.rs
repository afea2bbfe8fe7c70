//! HOMD optimizer.

pub mod dqn;
pub mod homd;
pub mod matching;
pub mod power;
