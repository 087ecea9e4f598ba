pub mod config;
pub mod f2;
pub mod linalg;
pub mod rng;
pub mod symplectic;
pub mod statevec;
pub mod zxcat;
pub mod agsp;
pub mod prep;
pub mod modular;
pub mod glue;
pub mod suite;
