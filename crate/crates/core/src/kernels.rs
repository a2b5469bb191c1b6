//! Declarative local rules.
//!
//! Every rule in the catalog has the same shape: a set of neighbor windows, a
//! mode, and an optional guard against a reference grid.
//!
//! * `Expand`: `e5' = max(e5, max_w min_{i in w} e_i)`
//! * `Contract`: `e5' = min(e5, min_w max_{i in w} e_i)`
//!
//! A guarded rule only touches cells where the working value stands in the
//! required relation to the reference value at the same position.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{rotate_index_cw, Level, Neighborhood};

/// A subset of the keypad positions, stored as a bit mask (bit `i` = position `i`).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Window(u16);

impl Window {
    /// Builds a window from keypad positions. Position 5 is representable here;
    /// [`KernelSchema::validate`] rejects it.
    pub fn from_indices(indices: &[u8]) -> Result<Window> {
        let mut bits = 0u16;
        for &i in indices {
            if !(1..=9).contains(&i) {
                return Err(Error::InvalidArgument(format!("window index {i} outside 1..=9")));
            }
            bits |= 1 << i;
        }
        if bits == 0 {
            return Err(Error::InvalidArgument("empty window".into()));
        }
        Ok(Window(bits))
    }

    pub fn contains(self, index: u8) -> bool {
        self.0 & (1 << index) != 0
    }

    pub fn indices(self) -> impl Iterator<Item = u8> {
        (1..=9u8).filter(move |&i| self.contains(i))
    }

    pub fn rotated_cw(self) -> Window {
        let mut bits = 0;
        for i in self.indices() {
            bits |= 1 << rotate_index_cw(i);
        }
        Window(bits)
    }

    #[inline]
    fn min_over(self, n: &Neighborhood) -> Level {
        self.indices().map(|i| n.e(i)).min().unwrap_or(Level::MAX)
    }

    #[inline]
    fn max_over(self, n: &Neighborhood) -> Level {
        self.indices().map(|i| n.e(i)).max().unwrap_or(0)
    }
}

impl fmt::Debug for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.indices().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

impl Serialize for Window {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.indices())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Raise the center to the best window minimum.
    Expand,
    /// Lower the center to the best window maximum.
    Contract,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Guard {
    None,
    /// Apply only where `e5 >= t5` (allowance).
    RefGe,
    /// Apply only where `e5 > t5` (constraint).
    RefGt,
}

impl Guard {
    #[inline]
    pub fn allows(self, center: Level, reference: Level) -> bool {
        match self {
            Guard::None => true,
            Guard::RefGe => center >= reference,
            Guard::RefGt => center > reference,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct KernelSchema {
    pub name: String,
    pub mode: Mode,
    pub guard: Guard,
    pub windows: Vec<Window>,
}

impl KernelSchema {
    pub fn new(name: &str, mode: Mode, guard: Guard, windows: &[&[u8]]) -> Result<KernelSchema> {
        let windows = windows
            .iter()
            .map(|w| Window::from_indices(w))
            .collect::<Result<Vec<_>>>()?;
        let schema = KernelSchema {
            name: name.to_string(),
            mode,
            guard,
            windows,
        };
        schema.validate()?;
        Ok(schema)
    }

    /// Checks the registry invariants: at least one window, and no window reads the center.
    pub fn validate(&self) -> Result<()> {
        if self.windows.is_empty() {
            return Err(Error::InvalidKernel {
                name: self.name.clone(),
                reason: "no windows".into(),
            });
        }
        if let Some(w) = self.windows.iter().find(|w| w.contains(5)) {
            return Err(Error::InvalidKernel {
                name: self.name.clone(),
                reason: format!("window {w:?} includes the center e5"),
            });
        }
        Ok(())
    }

    pub fn is_guarded(&self) -> bool {
        self.guard != Guard::None
    }

    /// The same rule for a grid turned a quarter clockwise.
    pub fn rotated_cw(&self) -> KernelSchema {
        KernelSchema {
            name: format!("{}@cw", self.name),
            mode: self.mode,
            guard: self.guard,
            windows: self.windows.iter().map(|w| w.rotated_cw()).collect(),
        }
    }

    /// Window set union of two rules of the same mode and guard.
    pub fn merged(&self, other: &KernelSchema) -> Result<KernelSchema> {
        if self.mode != other.mode || self.guard != other.guard {
            return Err(Error::InvalidArgument(format!(
                "cannot merge `{}` and `{}`: mode or guard differ",
                self.name, other.name
            )));
        }
        let mut windows = self.windows.clone();
        for w in &other.windows {
            if !windows.contains(w) {
                windows.push(*w);
            }
        }
        Ok(KernelSchema {
            name: format!("{}+{}", self.name, other.name),
            mode: self.mode,
            guard: self.guard,
            windows,
        })
    }

    /// Center value without the guard check.
    #[inline]
    pub(crate) fn apply_unguarded(&self, n: &Neighborhood) -> Level {
        let e5 = n.center();
        match self.mode {
            Mode::Expand => self
                .windows
                .iter()
                .map(|w| w.min_over(n))
                .fold(e5, Level::max),
            Mode::Contract => self
                .windows
                .iter()
                .map(|w| w.max_over(n))
                .fold(e5, Level::min),
        }
    }
}

/// New center value for one neighborhood.
pub fn eval_kernel(schema: &KernelSchema, n: &Neighborhood, ref_center: Option<Level>) -> Result<Level> {
    let e5 = n.center();
    let allowed = match (schema.guard, ref_center) {
        (Guard::None, _) => true,
        (guard, Some(t5)) => guard.allows(e5, t5),
        (_, None) => return Err(Error::MissingReference(schema.name.clone())),
    };
    Ok(if allowed { schema.apply_unguarded(n) } else { e5 })
}

const HULL4: &[&[u8]] = &[&[2, 4], &[2, 6], &[6, 8], &[4, 8]];
const SIDES3: &[&[u8]] = &[&[1, 2, 3], &[3, 6, 9], &[7, 8, 9], &[1, 4, 7]];
const OCT: &[&[u8]] = &[
    &[4, 1, 2, 3],
    &[1, 2, 3, 6],
    &[2, 3, 6, 9],
    &[3, 6, 9, 8],
    &[6, 9, 8, 7],
    &[9, 8, 7, 4],
    &[8, 7, 4, 1],
    &[7, 4, 1, 2],
];
const HULL8ON8: &[&[u8]] = &[
    &[1, 2, 3],
    &[3, 6, 9],
    &[7, 8, 9],
    &[1, 4, 7],
    &[2, 6, 8],
    &[2, 4, 6],
    &[4, 6, 8],
    &[2, 4, 8],
    &[2, 6, 9],
    &[3, 6, 8],
    &[2, 3, 4],
    &[1, 2, 6],
    // printed as {5,6,7}; by symmetry with {4,8,9} the intended window is {6,7,8}
    &[6, 7, 8],
    &[4, 8, 9],
    &[2, 4, 7],
    &[1, 4, 8],
];
/// Position of the {6,7,8} window inside [`HULL8ON8`].
pub const HULL8ON8_D36_SLOT: usize = 12;

use Guard::{None as Free, RefGe, RefGt};
use Mode::{Contract, Expand};

const CATALOG: &[(&str, Mode, Guard, &[&[u8]])] = &[
    ("convex_hull4", Expand, Free, HULL4),
    ("convex_hull8on8", Expand, Free, HULL8ON8),
    ("expand_123_369_789_147", Expand, Free, SIDES3),
    ("convex_hull_oct", Expand, Free, OCT),
    ("minconvex_hull4", Contract, RefGt, HULL4),
    ("minconvex_123_369_789_147", Contract, RefGt, SIDES3),
    ("minconvex_hull_oct", Contract, RefGt, OCT),
    ("minconvex_hull8on8", Contract, RefGt, HULL8ON8),
    ("expand_1234_1236", Expand, Free, &[&[1, 2, 3, 4], &[1, 2, 3, 6]]),
    ("expand_4789_6789", Expand, Free, &[&[4, 7, 8, 9], &[6, 7, 8, 9]]),
    ("expand_1247_1478", Expand, Free, &[&[1, 2, 4, 7], &[1, 4, 7, 8]]),
    ("expand_2369_3689", Expand, Free, &[&[2, 3, 6, 9], &[3, 6, 8, 9]]),
    ("expand_369", Expand, Free, &[&[3, 6, 9]]),
    ("expand_689", Expand, Free, &[&[6, 8, 9]]),
    ("expand_147", Expand, Free, &[&[1, 4, 7]]),
    ("expand_247_148", Expand, Free, &[&[2, 4, 7], &[1, 4, 8]]),
    ("clean_48_68", Contract, RefGt, &[&[4, 8], &[6, 8]]),
    // the directional and all-round cleans erode along every listed axis
    ("clean_46", Contract, RefGt, &[&[4], &[6]]),
    ("clean_28", Contract, RefGt, &[&[2], &[8]]),
    (
        "clean_all8",
        Contract,
        RefGt,
        &[&[1], &[2], &[3], &[4], &[6], &[7], &[8], &[9]],
    ),
    ("ray_2", Expand, Free, &[&[2]]),
    ("ray_12", Expand, Free, &[&[1], &[2]]),
    ("ray_half", Expand, Free, &[&[4], &[1], &[2], &[3], &[6]]),
    ("ray2_2", Expand, RefGe, &[&[2]]),
    ("ray_268", Expand, RefGe, &[&[2], &[6], &[8]]),
    ("ray_468", Expand, RefGe, &[&[4], &[6], &[8]]),
    ("rayanti_8", Contract, RefGt, &[&[8]]),
];

const ALIASES: &[(&str, &str)] = &[
    ("convex_hull", "convex_hull_oct"),
    ("minconvex_hull", "minconvex_hull_oct"),
    ("clean_123456789", "clean_all8"),
    ("clean_12346789", "clean_all8"),
    ("expand_367", "expand_369"),
    ("dale_down", "expand_1234_1236"),
    ("dale_up", "expand_4789_6789"),
    ("dale_right", "expand_1247_1478"),
    ("dale_left", "expand_2369_3689"),
];

fn registry() -> &'static BTreeMap<&'static str, KernelSchema> {
    static REGISTRY: OnceLock<BTreeMap<&'static str, KernelSchema>> = OnceLock::new();
    REGISTRY.get_or_init(|| {
        CATALOG
            .iter()
            .map(|&(name, mode, guard, windows)| {
                let schema = KernelSchema::new(name, mode, guard, windows)
                    .expect("catalog entries are valid");
                (name, schema)
            })
            .collect()
    })
}

/// Every catalog entry, in name order.
pub fn catalog() -> impl Iterator<Item = &'static KernelSchema> {
    registry().values()
}

/// Canonical catalog names.
pub fn kernel_names() -> Vec<&'static str> {
    registry().keys().copied().collect()
}

/// Resolves a catalog name or alias. A single leading underscore is ignored,
/// so the historical `_clean_48_68` spelling resolves as well.
pub fn lookup_kernel(name: &str) -> Result<&'static KernelSchema> {
    let bare = name.strip_prefix('_').unwrap_or(name);
    let canonical = ALIASES
        .iter()
        .find(|(alias, _)| *alias == bare)
        .map_or(bare, |(_, target)| target);
    registry().get(canonical).ok_or_else(|| Error::UnknownKernel {
        name: name.to_string(),
        known: kernel_names().iter().map(|s| s.to_string()).collect(),
    })
}

/// `convex_hull8on8` with its 13th window exactly as printed, `{5,6,7}`.
/// It reads the center and so can never fire; kept to show that it changes nothing.
pub fn convex_hull8on8_literal() -> KernelSchema {
    let mut k = lookup_kernel("convex_hull8on8").unwrap().clone();
    k.name = "convex_hull8on8_literal".into();
    k.windows[HULL8ON8_D36_SLOT] = Window::from_indices(&[5, 6, 7]).unwrap();
    k
}
