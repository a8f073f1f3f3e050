//! Transport endpoints: TCP senders and receiver, CBR source.

mod cbr;
pub mod loopback;
mod receiver;
mod rtt;
mod sack;
mod sender;
mod variant;
mod vegas;

pub use cbr::CbrSource;
pub use receiver::{AckInfo, TcpReceiver};
pub use rtt::{RttConfig, RttEstimator};
pub use sack::Scoreboard;
pub use sender::{Phase, SenderAction, SenderStats, TcpConfig, TcpSender};
pub use variant::TcpVariant;
pub use vegas::{VegasParams, VegasState};
