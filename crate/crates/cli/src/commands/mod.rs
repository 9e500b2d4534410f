pub mod isotropy;
pub mod mobility;
pub mod pareto;
pub mod slam;
pub mod synth;
