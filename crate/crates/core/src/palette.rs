//! Semantic segmentation palette: 63 pixel classes and their RGB colors.

use std::collections::HashMap;
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};

const DEFAULT_PALETTE: &str = include_str!("../data/palette.csv");

pub type Rgb = [u8; 3];

#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
pub struct PaletteEntry {
    pub group: String,
    pub class: String,
    pub r: u8,
    pub g: u8,
    pub b: u8,
}

impl PaletteEntry {
    pub fn rgb(&self) -> Rgb {
        [self.r, self.g, self.b]
    }

    pub fn is_human(&self) -> bool {
        self.group.starts_with("human")
    }
}

#[derive(Clone, Debug)]
pub struct SemanticPalette {
    entries: Vec<PaletteEntry>,
    by_class: HashMap<String, usize>,
    by_color: HashMap<Rgb, usize>,
}

impl SemanticPalette {
    pub fn from_csv_str(text: &str, origin: &Path) -> Result<Self> {
        let mut reader = csv::Reader::from_reader(text.as_bytes());
        let entries = reader
            .deserialize()
            .collect::<std::result::Result<Vec<PaletteEntry>, _>>()
            .map_err(|e| Error::parse(origin, e))?;
        Self::from_entries(entries)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_csv_str(&text, path)
    }

    pub fn from_entries(entries: Vec<PaletteEntry>) -> Result<Self> {
        let mut by_class = HashMap::new();
        let mut by_color = HashMap::new();
        for (i, e) in entries.iter().enumerate() {
            if by_class.insert(e.class.clone(), i).is_some() {
                return Err(Error::Config(format!("palette lists class '{}' twice", e.class)));
            }
            if let Some(j) = by_color.insert(e.rgb(), i) {
                return Err(Error::Config(format!(
                    "palette color {:?} shared by '{}' and '{}'",
                    e.rgb(),
                    entries[j].class,
                    e.class
                )));
            }
        }
        Ok(Self {
            entries,
            by_class,
            by_color,
        })
    }

    pub fn entries(&self) -> &[PaletteEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn human_count(&self) -> usize {
        self.entries.iter().filter(|e| e.is_human()).count()
    }

    pub fn lookup(&self, class: &str) -> Result<Rgb> {
        self.by_class
            .get(class)
            .map(|&i| self.entries[i].rgb())
            .ok_or_else(|| Error::UnknownClass(class.to_owned()))
    }

    pub fn inverse(&self, color: Rgb) -> Result<&str> {
        self.by_color
            .get(&color)
            .map(|&i| self.entries[i].class.as_str())
            .ok_or(Error::UnknownColor(color[0], color[1], color[2]))
    }
}

impl Default for SemanticPalette {
    fn default() -> Self {
        Self::from_csv_str(DEFAULT_PALETTE, Path::new("<builtin palette>")).expect("builtin palette is valid")
    }
}

pub fn palette_lookup(class: &str) -> Result<Rgb> {
    SemanticPalette::default().lookup(class)
}

pub fn palette_inverse(color: Rgb) -> Result<String> {
    SemanticPalette::default().inverse(color).map(str::to_owned)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes() {
        let p = SemanticPalette::default();
        assert_eq!(p.len(), 63);
        assert_eq!(p.human_count(), 27);
        let parts = p.entries().iter().filter(|e| e.group == "human_part").count();
        assert_eq!(parts, 14);
    }

    #[test]
    fn spot_checks() {
        let p = SemanticPalette::default();
        assert_eq!(p.lookup("Road").unwrap(), [100, 60, 100]);
        assert_eq!(p.lookup("Head").unwrap(), [220, 20, 60]);
        assert_eq!(p.inverse([220, 20, 60]).unwrap(), "Head");
        assert!(matches!(p.inverse([0, 0, 0]), Err(Error::UnknownColor(0, 0, 0))));
        assert!(matches!(p.lookup("Dragon"), Err(Error::UnknownClass(_))));
    }

    #[test]
    fn bijective() {
        let p = SemanticPalette::default();
        for e in p.entries() {
            assert_eq!(p.inverse(p.lookup(&e.class).unwrap()).unwrap(), e.class);
        }
    }

    #[test]
    fn duplicate_colors_rejected() {
        let e = |c: &str| PaletteEntry {
            group: "x".into(),
            class: c.into(),
            r: 1,
            g: 2,
            b: 3,
        };
        assert!(SemanticPalette::from_entries(vec![e("a"), e("b")]).is_err());
    }
}
