//! Simulation substrate: clock, events, geometry, mobility and traffic.

pub mod event;
pub mod mobility;
pub mod profile;
pub mod radio;
pub mod rng;
pub mod topology;
pub mod traffic;
