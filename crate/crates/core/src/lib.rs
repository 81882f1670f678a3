//! Capacity bounds for the two-parameter family of qudit channels built from
//! the identity, the transpose-depolarizing maps and the full depolarizer.

pub mod capacities;
pub mod channels;
pub mod choi;
pub mod error;
pub mod generators;
pub mod optimize;
pub mod qmat;
pub mod sdp;
pub mod sweep;
pub mod verify;

pub use capacities::{CapacityReport, HolevoRegion};
pub use channels::ChannelParams;
pub use choi::{ChoiMatrix, RegionFlags};
pub use error::{Error, Result};
pub use qmat::{ComplexMatrix, DensityMatrix, HermitianMatrix, PureState, SpectrumResult, C64};
pub use sdp::{SdpSolution, SdpStatus};
