//! Theme taxonomy, camera catalog and the per-theme optimal-camera
//! assignment backing the label-to-text step.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThemeCategory {
    pub label_id: u32,
    pub name: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CameraProfile {
    pub camera_id: String,
    pub display_name: String,
    pub description_text: String,
}

impl CameraProfile {
    /// Default description template: "shot on {display_name}".
    pub fn from_display_name(camera_id: impl Into<String>, display_name: impl Into<String>) -> Self {
        let display_name = display_name.into();
        CameraProfile {
            camera_id: camera_id.into(),
            description_text: format!("shot on {display_name}"),
            display_name,
        }
    }
}

/// Immutable after load; safe for concurrent reads.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct Registry {
    pub themes: Vec<ThemeCategory>,
    pub cameras: Vec<CameraProfile>,
    /// theme label_id -> camera_id
    #[serde(default)]
    pub assignment: BTreeMap<u32, String>,
}

impl Registry {
    pub fn theme_count(&self) -> usize {
        self.themes.len()
    }

    pub fn theme(&self, label_id: u32) -> Option<&ThemeCategory> {
        self.themes.iter().find(|t| t.label_id == label_id)
    }

    pub fn theme_by_name(&self, name: &str) -> Option<&ThemeCategory> {
        self.themes.iter().find(|t| t.name == name)
    }

    pub fn camera(&self, camera_id: &str) -> Option<&CameraProfile> {
        self.cameras.iter().find(|c| c.camera_id == camera_id)
    }

    pub fn assigned_camera(&self, label_id: u32) -> Option<&CameraProfile> {
        self.assignment
            .get(&label_id)
            .and_then(|id| self.camera(id))
    }

    /// The camera description for a theme label — the LabelToText step.
    pub fn label_to_text(&self, label_id: u32) -> Result<&str> {
        let theme = self.theme(label_id).ok_or(Error::UnknownLabel(label_id))?;
        let camera_id = self
            .assignment
            .get(&label_id)
            .ok_or_else(|| Error::UnassignedTheme(theme.name.clone()))?;
        let camera = self.camera(camera_id).ok_or_else(|| {
            Error::invalid(format!(
                "assignment for theme {:?} references missing camera {camera_id:?}",
                theme.name
            ))
        })?;
        Ok(&camera.description_text)
    }

    pub fn set_assignment(&mut self, label_id: u32, camera_id: &str) -> Result<()> {
        if self.theme(label_id).is_none() {
            return Err(Error::UnknownLabel(label_id));
        }
        if self.camera(camera_id).is_none() {
            return Err(Error::invalid(format!("unknown camera {camera_id:?}")));
        }
        self.assignment.insert(label_id, camera_id.to_string());
        Ok(())
    }

    /// Collects every violation instead of stopping at the first.
    pub fn validate(&self) -> Vec<String> {
        let mut errors = Vec::new();

        let mut ids = BTreeSet::new();
        for t in &self.themes {
            if !ids.insert(t.label_id) {
                errors.push(format!("duplicate theme label_id {}", t.label_id));
            }
        }
        for expected in 0..self.themes.len() as u32 {
            if !ids.contains(&expected) {
                errors.push(format!(
                    "theme label_ids must be contiguous from 0: missing {expected}"
                ));
            }
        }
        let mut names = BTreeSet::new();
        for t in &self.themes {
            if !names.insert(&t.name) {
                errors.push(format!("duplicate theme name {:?}", t.name));
            }
        }

        let mut camera_ids = BTreeSet::new();
        for c in &self.cameras {
            if !camera_ids.insert(&c.camera_id) {
                errors.push(format!("duplicate camera_id {:?}", c.camera_id));
            }
            if c.description_text.is_empty() {
                errors.push(format!("camera {:?} has an empty description_text", c.camera_id));
            } else if !c.description_text.contains(&c.display_name) {
                errors.push(format!(
                    "camera {:?}: description_text does not mention display_name {:?}",
                    c.camera_id, c.display_name
                ));
            }
        }

        for (label_id, camera_id) in &self.assignment {
            if !ids.contains(label_id) {
                errors.push(format!("assignment references unknown theme label {label_id}"));
            }
            if self.camera(camera_id).is_none() {
                errors.push(format!(
                    "assignment for theme {label_id} references missing camera {camera_id:?}"
                ));
            }
        }

        errors
    }

    pub fn load(path: &Path) -> Result<Registry> {
        let registry: Registry = serde_json::from_str(&fs::read_to_string(path)?)?;
        let errors = registry.validate();
        if errors.is_empty() {
            Ok(registry)
        } else {
            Err(Error::Validation(errors))
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir)?;
        }
        let mut json = serde_json::to_string_pretty(self)?;
        json.push('\n');
        fs::write(path, json)?;
        Ok(())
    }
}
