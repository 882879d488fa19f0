//! Device profile files: plain `key = value` text describing the execution
//! target the tuning planners should size for.
//!
//! Recognized keys: `name`, `max_wg`, `slm_bytes`, `sg_threshold`. Missing
//! keys keep the default profile's values; unknown keys are errors so typos
//! do not silently fall back to defaults.

use std::fs;
use std::path::Path;

use batchsolve_core::DeviceProfile;

use crate::error::HarnessError;

/// Parse profile text. `origin` names the source in errors.
pub fn parse_device_profile(text: &str, origin: &str) -> Result<DeviceProfile, HarnessError> {
    let mut profile = DeviceProfile::default();
    let err = |line: usize, msg: String| HarnessError::Parse {
        origin: origin.to_string(),
        line,
        msg,
    };
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| err(line_no, format!("expected 'key = value', found '{line}'")))?;
        let (key, value) = (key.trim(), value.trim());
        let parse_usize = |what: &str| {
            value
                .parse::<usize>()
                .map_err(|_| err(line_no, format!("bad {what} '{value}'")))
        };
        match key {
            "name" => profile.name = value.to_string(),
            "max_wg" => {
                profile.max_work_group_size = parse_usize("max_wg")?;
                if profile.max_work_group_size == 0 {
                    return Err(err(line_no, "max_wg must be positive".into()));
                }
            }
            "slm_bytes" => profile.fast_memory_bytes = parse_usize("slm_bytes")?,
            "sg_threshold" => profile.sub_group_threshold = parse_usize("sg_threshold")?,
            other => return Err(err(line_no, format!("unknown key '{other}'"))),
        }
    }
    Ok(profile)
}

/// Load a device profile file.
pub fn load_device_profile(path: &Path) -> Result<DeviceProfile, HarnessError> {
    let text = fs::read_to_string(path).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_device_profile(&text, &path.display().to_string())
}
