pub mod cost;
pub mod distributions;
pub mod error;
pub mod isotonic;
pub mod quadrature;
pub mod roots;
pub mod scenario;
pub mod menu;
pub mod solver;
pub mod verifier;
pub mod commands;
