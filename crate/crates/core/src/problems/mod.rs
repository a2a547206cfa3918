//! Benchmark problems and the local searcher.

mod dec3;
mod htrap;
mod local_search;
mod onemax;
pub mod spinglass;

pub use dec3::{dec3, Dec3};
pub use htrap::{htrap, HTrap};
pub use local_search::{local_search, local_search_trajectory, Hybrid};
pub use onemax::OneMax;
pub use spinglass::{generate_instance, SpinGlass, SpinGlassInstance};
