//! Pin(2)-equivariant Floer chain complexes over GF(2).

pub mod floer;
pub mod gf2;
pub mod graded;
pub mod grading;
pub mod models;
pub mod pin2;

pub use floer::{
    absolute_grading, iota_characteristic, modified_grading, reducible_tower_grading, relative_grading_sum, Assembly,
    CobordismOps, CriticalManifold, Flavor, FloerData, FloerError, Kind, Metadata, ModuleOps, ModuliOperator, OpClass,
    TowerInfo, ValidationReport,
};
pub use gf2::{BitMatrix, BitVec, Gf2Error, SpanBasis};
pub use graded::{
    check_exactness, induced_map, verify_chain_map, ComplexError, ExactnessReport, FilteredComplex, GradedComplex,
    GradedMap, GradedSpace, Homology, InducedMap, SpectralSequence, Status, Window,
};
pub use grading::{Grading, GradingError};
pub use pin2::{classify_image_i, gysin_sequence, induced_module, Involution, Pin2Error, StandardModuleParams};
pub use models::{generate, generate_data, model, ModelError, ModelName, ModelOptions, ModelSpec};
