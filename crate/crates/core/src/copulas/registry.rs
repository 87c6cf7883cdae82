//! Name-based lookup of copula families.

use super::families::{Amh, Clayton, GumbelBarnett, Independence};
use super::CopulaFamily;

static INDEPENDENCE: Independence = Independence;
static CLAYTON: Clayton = Clayton;
static AMH: Amh = Amh;
static GUMBEL_BARNETT: GumbelBarnett = GumbelBarnett;

static FAMILIES: [&dyn CopulaFamily; 4] = [&INDEPENDENCE, &CLAYTON, &AMH, &GUMBEL_BARNETT];

pub fn families() -> &'static [&'static dyn CopulaFamily] {
    &FAMILIES
}

pub fn lookup(name: &str) -> Option<&'static dyn CopulaFamily> {
    FAMILIES.iter().copied().find(|f| f.name() == name)
}

pub fn names() -> Vec<&'static str> {
    FAMILIES.iter().map(|f| f.name()).collect()
}
