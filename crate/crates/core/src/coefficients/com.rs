use std::collections::BTreeMap;

use super::{compose_color, contract_color, is_stable, Bounds, ColorData, ModularOperadData, Parity};
use crate::homalg::SparseMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ComKind {
    /// The modular envelope: one-dimensional at every stable color.
    Envelope,
    /// Extension by zero: one-dimensional in genus 0 only.
    Extension,
}

/// The commutative system: trivial modules in degree 0, all structure constants 1.
pub fn com_system(kind: ComKind, bounds: Bounds) -> ModularOperadData {
    let max_g = match kind {
        ComKind::Envelope => bounds.genus,
        ComKind::Extension => 0,
    };
    let mut colors = BTreeMap::new();
    for g in 0..=max_g {
        for n in 0..=bounds.weight {
            if is_stable((g, n)) && bounds.contains((g, n)) {
                colors.insert((g, n), ColorData::trivial(n, 0));
            }
        }
    }
    let keys: Vec<_> = colors.keys().copied().collect();
    let mut compose = BTreeMap::new();
    for &a in &keys {
        for &b in &keys {
            if a.1 >= 1 && b.1 >= 1 && colors.contains_key(&compose_color(a, b)) {
                compose.insert((a, b), SparseMatrix::identity(1));
            }
        }
    }
    let contract = keys
        .iter()
        .filter(|a| a.1 >= 2 && colors.contains_key(&contract_color(**a)))
        .map(|&a| (a, SparseMatrix::identity(1)))
        .collect();
    let name = match kind {
        ComKind::Envelope => "com-envelope",
        ComKind::Extension => "com-extension",
    };
    let bounds = match kind {
        ComKind::Envelope => bounds,
        ComKind::Extension => Bounds { genus: usize::MAX, weight: bounds.weight },
    };
    ModularOperadData { name: name.into(), parity: Parity::Even, bounds, colors, compose, contract }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimensions() {
        let b = Bounds { genus: 2, weight: 5 };
        assert_eq!(com_system(ComKind::Envelope, b).dim((2, 1)), 1);
        assert_eq!(com_system(ComKind::Extension, b).dim((1, 1)), 0);
        assert_eq!(com_system(ComKind::Extension, b).dim((0, 4)), 1);
        assert_eq!(com_system(ComKind::Envelope, b).dim((0, 2)), 0);
    }
}
