//! Synthetic passive-radar scenario generation: cyclostationary source,
//! Rayleigh channels, colored noise, SNR scaling, and the stacking /
//! transform pipeline from raw samples to snapshot vectors.

mod channel;
mod config;
mod noise;
mod observation;
mod source;

pub use channel::{apply_channel, gen_channel, ChannelRealization};
pub use config::ScenarioConfig;
pub use noise::gen_colored_noise;
pub use observation::{
    stack_snapshots, stack_snapshots_with_plan, synth_components, synth_observation,
    synth_observation_with_streams, Hypothesis, ObservationPair, SnapshotBatch, SynthComponents,
    SynthStreams,
};
pub use source::{gen_cs_source, qpsk_symbols, raised_cosine_taps};
