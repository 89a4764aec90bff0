use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid network: {0}")]
    InvalidNetwork(String),

    #[error("network contains a cycle through node {0}")]
    CyclicNetwork(u32),

    #[error("phenotype has no voxels")]
    EmptyGeometry,

    #[error("phenotype geometry is not face-connected ({components} components)")]
    DisconnectedGeometry { components: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("stiffness {k} Pa outside [{k_min}, {k_max}]")]
    StiffnessOutOfRange { k: f64, k_min: f64, k_max: f64 },

    #[error("{0}")]
    InvalidInput(String),

    #[error("record mismatch: {0}")]
    Mismatch(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
