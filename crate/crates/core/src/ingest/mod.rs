//! Loading radar cubes and pipeline configuration.

mod config;
mod cube;

pub use config::{
    load_config, PbcConfig, PipelineConfig, PreprocConfig, RadonConfig, SegmenterConfig, StftConfig,
    WindowKind, DEFAULT_STFT_WINDOW_S,
};
pub use cube::{
    cube_paths, load_radar_cube, parse_header, read_header, CubeHeader, RadarCube, CUBE_FORMAT_VERSION,
};
