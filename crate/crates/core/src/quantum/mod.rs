pub mod builders;
pub mod circuit;
pub mod model;
pub mod noise;
pub mod pauli;
pub mod sim;
pub mod state;

pub use circuit::{Circuit, Event, Gate, GateOp};
pub use model::{
    apply_instrument, projective_model, IndirectModel, InstrumentBranch, MeasurementModel,
};
pub use noise::{NoiseModel, Readout};
pub use pauli::{eigenstate, pauli, Pauli, Sign};
pub use sim::{
    evolve, exact_distribution, sample_counts, unitary_of_circuit, Counts, Distribution,
};
pub use state::DensityOperator;
