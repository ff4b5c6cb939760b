pub mod admissible;
pub mod arrangement;
pub mod fan;
pub mod fixtures;
pub mod intlinalg;
pub mod polyring;
pub mod poset;
pub mod presentation;
