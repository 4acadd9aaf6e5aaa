//! Recipe files and bundles.
//!
//! A `.recipe` file is a version header line followed by pretty-printed JSON
//! with fields in declaration order and map keys sorted, so equal recipes
//! always produce equal bytes. A bundle concatenates recipe files, each
//! prefixed by its little-endian `u32` length, after a magic tag and a
//! little-endian `u64` count.

use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::scenario::Recipe;

pub const RECIPE_VERSION: &str = "phav-recipe/1";
pub const RECIPE_EXTENSION: &str = "recipe";
pub const BUNDLE_MAGIC: &[u8; 8] = b"PHAVRB1\0";

pub fn serialize_recipe(recipe: &Recipe) -> Vec<u8> {
    let mut out = Vec::with_capacity(4096);
    out.extend_from_slice(RECIPE_VERSION.as_bytes());
    out.push(b'\n');
    serde_json::to_writer_pretty(&mut out, recipe).expect("recipe serializes");
    out.push(b'\n');
    out
}

pub fn deserialize_recipe(bytes: &[u8]) -> Result<Recipe> {
    let text = std::str::from_utf8(bytes).map_err(|e| Error::MalformedField(format!("recipe is not UTF-8: {e}")))?;
    let (header, body) = text
        .split_once('\n')
        .ok_or_else(|| Error::MalformedField("missing version header line".into()))?;
    let header = header.trim_end_matches('\r');
    if header != RECIPE_VERSION {
        return Err(Error::UnknownVersion(header.to_owned()));
    }
    serde_json::from_str(body).map_err(|e| Error::MalformedField(e.to_string()))
}

pub fn recipe_file_name(index: u64) -> String {
    format!("recipe_{index}.{RECIPE_EXTENSION}")
}

pub fn write_recipe(path: &Path, recipe: &Recipe) -> Result<()> {
    std::fs::write(path, serialize_recipe(recipe)).map_err(|e| Error::io(path, e))
}

pub fn read_recipe(path: &Path) -> Result<Recipe> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    deserialize_recipe(&bytes).map_err(|e| Error::parse(path, e))
}

/// `.recipe` files in `dir`, sorted by name.
pub fn list_recipe_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if path.extension().is_some_and(|x| x == RECIPE_EXTENSION) {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

pub fn write_bundle(recipes: &[Recipe]) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(BUNDLE_MAGIC);
    out.extend_from_slice(&(recipes.len() as u64).to_le_bytes());
    for r in recipes {
        let bytes = serialize_recipe(r);
        let len = u32::try_from(bytes.len()).expect("recipe shorter than 4 GiB");
        out.extend_from_slice(&len.to_le_bytes());
        out.extend_from_slice(&bytes);
    }
    out
}

fn take<'a>(bytes: &mut &'a [u8], n: usize, what: &str) -> Result<&'a [u8]> {
    if bytes.len() < n {
        return Err(Error::MalformedField(format!("bundle truncated while reading {what}")));
    }
    let (head, tail) = bytes.split_at(n);
    *bytes = tail;
    Ok(head)
}

pub fn read_bundle(mut bytes: &[u8]) -> Result<Vec<Recipe>> {
    let magic = take(&mut bytes, BUNDLE_MAGIC.len(), "magic")?;
    if magic != BUNDLE_MAGIC {
        return Err(Error::UnknownVersion(String::from_utf8_lossy(magic).into_owned()));
    }
    let count = u64::from_le_bytes(take(&mut bytes, 8, "count")?.try_into().unwrap());
    let mut out = Vec::new();
    for i in 0..count {
        let len = u32::from_le_bytes(take(&mut bytes, 4, "record length")?.try_into().unwrap());
        let record = take(&mut bytes, len as usize, &format!("record {i}"))?;
        out.push(deserialize_recipe(record)?);
    }
    if !bytes.is_empty() {
        return Err(Error::MalformedField(format!(
            "{} trailing bytes after bundle",
            bytes.len()
        )));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::Generator;

    #[test]
    fn round_trip_and_canonical() {
        let g = Generator::with_defaults().unwrap();
        for i in 0..50 {
            let r = g.sample_recipe(11, i).unwrap();
            let bytes = serialize_recipe(&r);
            assert_eq!(deserialize_recipe(&bytes).unwrap(), r);
            assert_eq!(serialize_recipe(&g.sample_recipe(11, i).unwrap()), bytes);
        }
    }

    #[test]
    fn truncated_is_malformed() {
        let g = Generator::with_defaults().unwrap();
        let bytes = serialize_recipe(&g.sample_recipe(1, 0).unwrap());
        let err = deserialize_recipe(&bytes[..bytes.len() / 2]).unwrap_err();
        assert!(matches!(err, Error::MalformedField(_)));
    }

    #[test]
    fn unknown_version_rejected() {
        let g = Generator::with_defaults().unwrap();
        let mut bytes = serialize_recipe(&g.sample_recipe(1, 0).unwrap());
        bytes[12] = b'9';
        assert!(matches!(deserialize_recipe(&bytes), Err(Error::UnknownVersion(v)) if v == "phav-recipe/9"));
    }

    #[test]
    fn bundle_round_trip() {
        let g = Generator::with_defaults().unwrap();
        let rs: Vec<_> = (0..5).map(|i| g.sample_recipe(2, i).unwrap()).collect();
        let b = write_bundle(&rs);
        assert_eq!(read_bundle(&b).unwrap(), rs);
        assert!(matches!(read_bundle(&b[..b.len() - 3]), Err(Error::MalformedField(_))));
    }
}
