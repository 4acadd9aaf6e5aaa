//! World lighting and the boolean weather toggles.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::distributions::BernoulliParam;
use crate::error::Result;

use super::config::WeatherConfig;
use super::vocab::Weather;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeatherState {
    pub sun_brightness: f64,
    pub ambient_luminosity: f64,
    /// Degrees above the horizon; negative at night.
    pub sun_elevation_deg: f64,
    pub rain_active: bool,
    pub fog_visible: bool,
    pub clouds_visible: bool,
    pub cloud_shadows: bool,
    pub puddles_visible: bool,
}

/// Sun elevation for a clock hour: zero at 6h and 18h, peaking at noon.
pub fn sun_elevation_deg(clock_h: f64) -> f64 {
    90.0 * (std::f64::consts::PI * (clock_h - 6.0) / 12.0).sin()
}

/// Sample lighting and toggles for `weather` at `clock_h`.
///
/// Rain and fog follow the weather label. Clouds are on under overcast and
/// rain; fog switches them on with probability `toggle_p`. Cloud shadows
/// need visible clouds and no rain, puddles need rain, each then firing
/// with probability `toggle_p`.
pub fn sample_weather_state<R: Rng + ?Sized>(
    rng: &mut R,
    weather: Weather,
    clock_h: f64,
    config: &WeatherConfig,
) -> Result<WeatherState> {
    let toggle = BernoulliParam::new(config.toggle_p)?;
    let elevation = sun_elevation_deg(clock_h);
    let daylight = (elevation.to_radians().sin()).clamp(0.0, 1.0);
    let sun_brightness = config.sun_brightness[&weather].sample(rng) * daylight;
    let ambient_luminosity = config.ambient_luminosity[&weather].sample(rng);

    let rain_active = weather == Weather::Rain;
    let fog_visible = weather == Weather::Fog;
    let clouds_visible = match weather {
        Weather::Clear => false,
        Weather::Overcast | Weather::Rain => true,
        Weather::Fog => toggle.sample(rng),
    };
    let cloud_shadows = clouds_visible && !rain_active && toggle.sample(rng);
    let puddles_visible = rain_active && toggle.sample(rng);
    Ok(WeatherState {
        sun_brightness,
        ambient_luminosity,
        sun_elevation_deg: elevation,
        rain_active,
        fog_visible,
        clouds_visible,
        cloud_shadows,
        puddles_visible,
    })
}

/// Consistency rules between a weather label and its state. Returns one
/// message per broken rule.
pub fn check_weather_state(weather: Weather, s: &WeatherState) -> Vec<String> {
    let mut out = Vec::new();
    if s.rain_active != (weather == Weather::Rain) {
        out.push(format!("rain_active = {} under weather '{weather}'", s.rain_active));
    }
    if s.fog_visible != (weather == Weather::Fog) {
        out.push(format!("fog_visible = {} under weather '{weather}'", s.fog_visible));
    }
    match weather {
        Weather::Clear if s.clouds_visible => out.push("clouds visible under clear weather".into()),
        Weather::Overcast | Weather::Rain if !s.clouds_visible => {
            out.push(format!("clouds hidden under weather '{weather}'"))
        }
        _ => {}
    }
    if s.cloud_shadows && !(s.clouds_visible && !s.rain_active) {
        out.push("cloud shadows without visible clouds or during rain".into());
    }
    if s.puddles_visible && !s.rain_active {
        out.push("puddles without rain".into());
    }
    for (name, v) in [
        ("sun_brightness", s.sun_brightness),
        ("ambient_luminosity", s.ambient_luminosity),
    ] {
        if !(0.0..=1.0).contains(&v) {
            out.push(format!("{name} = {v} outside [0, 1]"));
        }
    }
    out
}
