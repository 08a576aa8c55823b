//! Browser demo bindings: transformation regions, channel synthesis, and
//! Monte-Carlo clouds over the `(z, r)` half-disk.
//!
//! Every JSON-returning export reports failures as `{"error": "..."}` so
//! the page can render them without juggling exceptions; point sets come
//! back as flat `[z0, r0, z1, r1, ...]` arrays for cheap canvas drawing.

use coherence_kit::docs::{ChannelDocument, DocumentMetadata};
use coherence_kit::oracle::reachable_cloud;
use coherence_kit::{
    cpo_orbit, io_region_boundary, pio_region_vertices, region_contains, synth_cpo, synth_io,
    synth_pio, BlochState, ChannelClass, Error,
};
use wasm_bindgen::prelude::wasm_bindgen;

fn parse_class(name: &str) -> Result<ChannelClass, Error> {
    match name.to_ascii_lowercase().as_str() {
        "io" => Ok(ChannelClass::Io),
        "sio" => Ok(ChannelClass::Sio),
        "pio" => Ok(ChannelClass::Pio),
        "cpo" => Ok(ChannelClass::Cpo),
        other => Err(Error::UnsupportedClass(other.to_string())),
    }
}

fn error_json(e: &Error) -> String {
    serde_json::json!({ "error": e.to_string() }).to_string()
}

fn flatten(points: &[(f64, f64)]) -> Vec<f64> {
    let mut flat = Vec::with_capacity(points.len() * 2);
    for &(z, r) in points {
        flat.push(z);
        flat.push(r);
    }
    flat
}

fn boundary_points(
    class: ChannelClass,
    z: f64,
    r: f64,
    n: usize,
) -> Result<Vec<(f64, f64)>, Error> {
    let from = BlochState::real(z, r)?;
    match class {
        ChannelClass::Io | ChannelClass::Sio => io_region_boundary(&from, n.max(4)),
        ChannelClass::Pio => Ok(pio_region_vertices(&from).vertices().to_vec()),
        ChannelClass::Cpo => Ok(cpo_orbit(&from)),
        other => Err(Error::UnsupportedClass(other.name().into())),
    }
}

fn verdict_json(class: ChannelClass, z: f64, r: f64, zt: f64, rt: f64) -> String {
    let run = || -> Result<String, Error> {
        let from = BlochState::real(z, r)?;
        let to = BlochState::real(zt, rt)?;
        let report = region_contains(class, &from, &to)?;
        Ok(serde_json::to_string(&report).expect("report serializes"))
    };
    run().unwrap_or_else(|e| error_json(&e))
}

fn synthesize_doc(class: ChannelClass, z: f64, r: f64, zt: f64, rt: f64) -> Result<String, Error> {
    let from = BlochState::real(z, r)?;
    let to = BlochState::real(zt, rt)?;
    let meta = DocumentMetadata {
        label: Some(format!("{} synthesis", class.name())),
        source: Some([z, r, 0.0]),
        target: Some([zt, rt, 0.0]),
        solution: None,
    };
    let doc = match class {
        ChannelClass::Io | ChannelClass::Sio => {
            let (set, sol) = synth_io(&from, &to)?;
            let mut meta = meta;
            meta.solution = Some(serde_json::to_value(sol).expect("solution serializes"));
            ChannelDocument::from_kraus_set(&set).with_metadata(meta)
        }
        ChannelClass::Pio => {
            let mix = synth_pio(&from, &to)?;
            ChannelDocument::from_mixture(&mix)?.with_metadata(meta)
        }
        ChannelClass::Cpo => {
            let set = synth_cpo(&from, &to)?;
            ChannelDocument::from_kraus_set(&set).with_metadata(meta)
        }
        other => return Err(Error::UnsupportedClass(other.name().into())),
    };
    Ok(doc.to_json_pretty())
}

/// Region outline for drawing: closed IO/SIO boundary, PIO hexagon
/// vertices, or the CPO orbit points, flattened as `[z, r, z, r, ...]`.
#[wasm_bindgen]
pub fn region_boundary(class: &str, z: f64, r: f64, n: usize) -> Vec<f64> {
    parse_class(class)
        .and_then(|c| boundary_points(c, z, r, n))
        .map(|pts| flatten(&pts))
        .unwrap_or_default()
}

/// Membership report for a target state, as JSON.
#[wasm_bindgen]
pub fn region_verdict(class: &str, z: f64, r: f64, zt: f64, rt: f64) -> String {
    match parse_class(class) {
        Ok(c) => verdict_json(c, z, r, zt, rt),
        Err(e) => error_json(&e),
    }
}

/// Channel document (JSON) realizing `from -> to`, or `{"error": ...}`.
#[wasm_bindgen]
pub fn synthesize(class: &str, z: f64, r: f64, zt: f64, rt: f64) -> String {
    parse_class(class)
        .and_then(|c| synthesize_doc(c, z, r, zt, rt))
        .unwrap_or_else(|e| error_json(&e))
}

/// Outputs of `n` random incoherent channels applied to `(z, r)`,
/// flattened as `[z, r, z, r, ...]`. Deterministic per seed.
#[wasm_bindgen]
pub fn sample_cloud(z: f64, r: f64, n: usize, seed: u64) -> Vec<f64> {
    let run = || -> Result<Vec<f64>, Error> {
        let from = BlochState::real(z, r)?;
        let cloud = reachable_cloud(&from, n, seed, 4)?;
        Ok(flatten(&cloud.points))
    };
    run().unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boundary_flattens_pairs() {
        let flat = region_boundary("io", 0.0, 1.0, 8);
        assert_eq!(flat.len(), 16);
        for chunk in flat.chunks(2) {
            assert!((chunk[0] * chunk[0] + chunk[1] * chunk[1] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn verdict_round_trips_json() {
        let v: serde_json::Value =
            serde_json::from_str(&region_verdict("sio", 0.0, 1.0, 0.5, 0.5)).unwrap();
        assert_eq!(v["verdict"], serde_json::Value::Bool(true));
        let v: serde_json::Value =
            serde_json::from_str(&region_verdict("cpo", 0.5, 0.3, 0.3, 0.5)).unwrap();
        assert_eq!(v["verdict"], serde_json::Value::Bool(false));
    }

    #[test]
    fn synthesize_reports_unreachable() {
        let v: serde_json::Value =
            serde_json::from_str(&synthesize("io", 0.6, 0.4, 0.9, 0.3)).unwrap();
        assert!(v["error"].as_str().unwrap().contains("outside"));
        let v: serde_json::Value =
            serde_json::from_str(&synthesize("io", 0.0, 1.0, 0.5, 0.5)).unwrap();
        assert_eq!(v["format_version"], "1");
        assert_eq!(v["kraus"].as_array().unwrap().len(), 2);
    }

    #[test]
    fn cloud_is_deterministic_and_inside_disk() {
        let a = sample_cloud(0.3, 0.5, 200, 9);
        let b = sample_cloud(0.3, 0.5, 200, 9);
        assert_eq!(a, b);
        assert_eq!(a.len(), 400);
        for chunk in a.chunks(2) {
            assert!(chunk[0] * chunk[0] + chunk[1] * chunk[1] <= 1.0 + 1e-9);
        }
    }

    #[test]
    fn bad_inputs_are_soft_errors() {
        assert!(region_boundary("io", 0.9, 0.9, 16).is_empty());
        let v: serde_json::Value =
            serde_json::from_str(&region_verdict("nope", 0.0, 0.5, 0.0, 0.1)).unwrap();
        assert!(v["error"].is_string());
    }
}
