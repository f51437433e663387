pub mod profiles;
pub use profiles::EpsProfileSet;
pub mod psi;
pub use psi::{psi_eval, psi_map, psi_polar};
pub mod map;
pub use map::{u_eps_eval, EpsPart, UEpsMap};
