pub mod chain;
pub mod channel;
pub mod estimate;
pub mod rabi;
pub mod zeno;
