//! The eight-element chemistry supported by the pipeline.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Chemical element. The set covers the drug-like benchmark chemistry:
/// C, H, O, N, F plus S, Cl, Br.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Element {
    C,
    H,
    O,
    N,
    F,
    S,
    Cl,
    Br,
}

pub const ALL_ELEMENTS: [Element; 8] = [
    Element::C,
    Element::H,
    Element::O,
    Element::N,
    Element::F,
    Element::S,
    Element::Cl,
    Element::Br,
];

impl Element {
    pub fn symbol(self) -> &'static str {
        match self {
            Element::C => "C",
            Element::H => "H",
            Element::O => "O",
            Element::N => "N",
            Element::F => "F",
            Element::S => "S",
            Element::Cl => "Cl",
            Element::Br => "Br",
        }
    }

    pub fn from_symbol(sym: &str) -> Result<Element> {
        match sym {
            "C" => Ok(Element::C),
            "H" => Ok(Element::H),
            "O" => Ok(Element::O),
            "N" => Ok(Element::N),
            "F" => Ok(Element::F),
            "S" => Ok(Element::S),
            "Cl" => Ok(Element::Cl),
            "Br" => Ok(Element::Br),
            other => Err(Error::domain(format!("unknown element symbol '{other}'"))),
        }
    }

    /// Single-bond covalent radius in Angstrom (Cordero et al. values).
    pub fn covalent_radius(self) -> f64 {
        match self {
            Element::H => 0.31,
            Element::C => 0.76,
            Element::N => 0.71,
            Element::O => 0.66,
            Element::F => 0.57,
            Element::S => 1.05,
            Element::Cl => 1.02,
            Element::Br => 1.20,
        }
    }

    /// Largest bond-order sum the element may carry.
    pub fn max_valence(self) -> u32 {
        match self {
            Element::H => 1,
            Element::C => 4,
            Element::N => 3,
            Element::O => 2,
            Element::F => 1,
            Element::S => 6,
            Element::Cl => 1,
            Element::Br => 1,
        }
    }

    /// Bond-order sums counted as a stable (complete) valence shell.
    pub fn allowed_valences(self) -> &'static [u32] {
        match self {
            Element::H => &[1],
            Element::C => &[4],
            Element::N => &[3],
            Element::O => &[2],
            Element::F => &[1],
            Element::S => &[2, 4, 6],
            Element::Cl => &[1],
            Element::Br => &[1],
        }
    }
}

impl std::fmt::Display for Element {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.symbol())
    }
}

/// Ordered set of element types defining the field's K channels.
///
/// The channel count is configuration-level, never inferred per molecule:
/// absent types must still produce (repulsive) field values.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementSet {
    elements: Vec<Element>,
}

impl ElementSet {
    /// Five-element small-molecule chemistry: C, H, O, N, F.
    pub fn qm9() -> Self {
        ElementSet {
            elements: vec![Element::C, Element::H, Element::O, Element::N, Element::F],
        }
    }

    /// Eight-element drug-like chemistry: C, H, O, N, F, S, Cl, Br.
    pub fn geom_drugs() -> Self {
        ElementSet {
            elements: ALL_ELEMENTS.to_vec(),
        }
    }

    pub fn from_elements(elements: Vec<Element>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::domain("element set must not be empty"));
        }
        let mut seen = std::collections::HashSet::new();
        for e in &elements {
            if !seen.insert(*e) {
                return Err(Error::domain(format!("duplicate element {e} in set")));
            }
        }
        Ok(ElementSet { elements })
    }

    /// Number of field channels K.
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn get(&self, channel: usize) -> Option<Element> {
        self.elements.get(channel).copied()
    }

    pub fn channel_of(&self, e: Element) -> Option<usize> {
        self.elements.iter().position(|&x| x == e)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, Element)> + '_ {
        self.elements.iter().copied().enumerate()
    }
}
