//! Group files: `{"name": .., "degree": .., "generators": [..]}` where each
//! generator is a 1-based cycle string like `"(1 2 3)(4 5)"` or a 1-based
//! image list like `[2, 3, 1, 5, 4]`.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use orelat_core::perm::{FiniteGroup, Permutation};
use serde::Deserialize;

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Generator {
    Cycles(String),
    Images(Vec<usize>),
}

#[derive(Debug, Clone, Deserialize)]
pub struct GroupSpec {
    pub name: String,
    pub degree: usize,
    pub generators: Vec<Generator>,
}

impl GroupSpec {
    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing group file {}", path.display()))
    }

    pub fn permutations(&self) -> Result<Vec<Permutation>> {
        self.generators
            .iter()
            .map(|g| match g {
                Generator::Cycles(text) => Ok(Permutation::parse_cycles(text, self.degree, true)?),
                Generator::Images(images) => {
                    if images.len() != self.degree {
                        bail!("image list of length {} in a group of degree {}", images.len(), self.degree);
                    }
                    let shifted = images
                        .iter()
                        .map(|&i| i.checked_sub(1).context("point 0 in a 1-based image list"))
                        .collect::<Result<Vec<_>>>()?;
                    Ok(Permutation::from_images(shifted)?)
                }
            })
            .collect()
    }

    pub fn build(&self, cap: usize) -> Result<FiniteGroup> {
        Ok(FiniteGroup::generate_with_cap(self.degree, self.permutations()?, cap)?)
    }

    /// The subgroup of `ambient` generated by this spec's generators.
    pub fn build_inside(&self, ambient: &FiniteGroup) -> Result<FiniteGroup> {
        if self.degree != ambient.degree() {
            bail!("subgroup `{}` has degree {}, group has degree {}", self.name, self.degree, ambient.degree());
        }
        Ok(ambient.subgroup_generated(&self.permutations()?)?)
    }
}
