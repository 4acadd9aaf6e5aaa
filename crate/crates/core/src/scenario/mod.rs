//! Scene composition: vocabulary, generator parameters and recipe sampling.

pub mod config;
pub mod generator;
pub mod placement;
pub mod vocab;
pub mod weather;

pub use config::{ConditionalTable, GeneratorConfig, CLOCK_MODULUS_H};
pub use generator::{
    duration_params, plan_counts, sample_p1, sample_p2, Generator, P1Sample, P3Sample, Recipe, RecipeViolation,
};
pub use placement::{sample_placement, ScenePlacement, WaypointAtlas, WaypointGraph};
pub use vocab::{CameraBehavior, DayPhase, Environment, HumanModel, Variation, Weather, HUMAN_MODEL_COUNT};
pub use weather::{sample_weather_state, WeatherState};
