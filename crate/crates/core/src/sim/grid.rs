//! Factor grid of treatment conditions.
//!
//! Two factors are crossed: Naloxone (upper-case labels, coded `x2`) and
//! Buprenorphine (lower-case labels, coded `x1`). Levels are coded by their
//! integer position in the level list, and cells are enumerated row-major
//! with Naloxone as the outer factor, so `Aa, Ab, .., Ae, Ba, ..`.

use std::collections::HashSet;

use crate::error::{Error, Result};

/// Which cells of the cross product are studied.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum ActiveSet {
    /// The first two Naloxone rows (or every row when fewer exist).
    #[default]
    Default,
    All,
    /// Whole Naloxone rows, by label.
    Rows(Vec<String>),
    /// Individual cells, by concatenated label (e.g. `"Bc"`).
    Cells(Vec<String>),
}

/// Description of a grid before validation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridSpec {
    pub naloxone_levels: Vec<String>,
    pub buprenorphine_levels: Vec<String>,
    pub active: ActiveSet,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            naloxone_levels: ["A", "B", "C", "D", "E"].map(String::from).to_vec(),
            buprenorphine_levels: ["a", "b", "c", "d", "e"].map(String::from).to_vec(),
            active: ActiveSet::Default,
        }
    }
}

/// One cell of the grid.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TreatmentCondition {
    pub naloxone_index: usize,
    pub buprenorphine_index: usize,
    pub label: String,
    /// Row-major position in the full cross product. Stable across active
    /// subsets, so it keys the random streams.
    pub cell: usize,
}

impl TreatmentCondition {
    /// Coded Buprenorphine covariate.
    pub fn x1(&self) -> f64 {
        self.buprenorphine_index as f64
    }

    /// Coded Naloxone covariate.
    pub fn x2(&self) -> f64 {
        self.naloxone_index as f64
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorGrid {
    naloxone_levels: Vec<String>,
    buprenorphine_levels: Vec<String>,
    active: Vec<TreatmentCondition>,
}

fn check_levels(name: &str, levels: &[String]) -> Result<()> {
    if levels.is_empty() {
        return Err(Error::InvalidGrid(format!("{name} needs at least one level")));
    }
    let mut seen = HashSet::new();
    for level in levels {
        if level.is_empty() {
            return Err(Error::InvalidGrid(format!("{name} contains an empty label")));
        }
        if !seen.insert(level.as_str()) {
            return Err(Error::InvalidGrid(format!(
                "{name} contains duplicate label `{level}`"
            )));
        }
    }
    Ok(())
}

/// Validates a grid description and resolves its active subset.
pub fn build_grid(spec: &GridSpec) -> Result<FactorGrid> {
    check_levels("naloxone_levels", &spec.naloxone_levels)?;
    check_levels("buprenorphine_levels", &spec.buprenorphine_levels)?;

    let cols = spec.buprenorphine_levels.len();
    let all: Vec<TreatmentCondition> = spec
        .naloxone_levels
        .iter()
        .enumerate()
        .flat_map(|(i, nal)| {
            spec.buprenorphine_levels
                .iter()
                .enumerate()
                .map(move |(j, bup)| TreatmentCondition {
                    naloxone_index: i,
                    buprenorphine_index: j,
                    label: format!("{nal}{bup}"),
                    cell: i * cols + j,
                })
        })
        .collect();

    // Concatenated labels can collide even when the level lists are clean
    // (e.g. "A"+"bc" vs "Ab"+"c").
    let mut labels = HashSet::new();
    for cond in &all {
        if !labels.insert(cond.label.as_str()) {
            return Err(Error::InvalidGrid(format!(
                "condition label `{}` is ambiguous",
                cond.label
            )));
        }
    }

    let mut selected = vec![false; all.len()];
    match &spec.active {
        ActiveSet::Default => {
            let rows = spec.naloxone_levels.len().min(2);
            selected[..rows * cols].iter_mut().for_each(|s| *s = true);
        }
        ActiveSet::All => selected.iter_mut().for_each(|s| *s = true),
        ActiveSet::Rows(rows) => {
            for row in rows {
                let i = spec
                    .naloxone_levels
                    .iter()
                    .position(|l| l == row)
                    .ok_or_else(|| {
                        Error::InvalidGrid(format!("active row `{row}` is not a naloxone level"))
                    })?;
                selected[i * cols..(i + 1) * cols]
                    .iter_mut()
                    .for_each(|s| *s = true);
            }
        }
        ActiveSet::Cells(cells) => {
            for cell in cells {
                let idx = all.iter().position(|c| &c.label == cell).ok_or_else(|| {
                    Error::InvalidGrid(format!("active condition `{cell}` references an unknown level"))
                })?;
                selected[idx] = true;
            }
        }
    }
    if !selected.iter().any(|&s| s) {
        return Err(Error::InvalidGrid("no active conditions".into()));
    }

    let active = all
        .into_iter()
        .zip(selected)
        .filter_map(|(c, s)| s.then_some(c))
        .collect();
    Ok(FactorGrid {
        naloxone_levels: spec.naloxone_levels.clone(),
        buprenorphine_levels: spec.buprenorphine_levels.clone(),
        active,
    })
}

impl FactorGrid {
    pub fn naloxone_levels(&self) -> &[String] {
        &self.naloxone_levels
    }

    pub fn buprenorphine_levels(&self) -> &[String] {
        &self.buprenorphine_levels
    }

    /// Number of cells in the full cross product.
    pub fn full_size(&self) -> usize {
        self.naloxone_levels.len() * self.buprenorphine_levels.len()
    }

    /// Active conditions in row-major order.
    pub fn active(&self) -> &[TreatmentCondition] {
        &self.active
    }

    /// Every cell of the cross product, active or not.
    pub fn all_conditions(&self) -> Vec<TreatmentCondition> {
        let cols = self.buprenorphine_levels.len();
        let mut out = Vec::with_capacity(self.full_size());
        for (i, nal) in self.naloxone_levels.iter().enumerate() {
            for (j, bup) in self.buprenorphine_levels.iter().enumerate() {
                out.push(TreatmentCondition {
                    naloxone_index: i,
                    buprenorphine_index: j,
                    label: format!("{nal}{bup}"),
                    cell: i * cols + j,
                });
            }
        }
        out
    }

    pub fn max_x1(&self) -> usize {
        self.buprenorphine_levels.len() - 1
    }

    pub fn max_x2(&self) -> usize {
        self.naloxone_levels.len() - 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn levels(s: &[&str]) -> Vec<String> {
        s.iter().map(|l| l.to_string()).collect()
    }

    #[test]
    fn default_grid_has_ten_active_of_twenty_five() {
        let grid = build_grid(&GridSpec::default()).unwrap();
        assert_eq!(grid.full_size(), 25);
        assert_eq!(grid.active().len(), 10);
        let labels: Vec<_> = grid.active().iter().map(|c| c.label.as_str()).collect();
        assert_eq!(
            labels,
            ["Aa", "Ab", "Ac", "Ad", "Ae", "Ba", "Bb", "Bc", "Bd", "Be"]
        );
    }

    #[test]
    fn explicit_rows_match_default() {
        let spec = GridSpec {
            active: ActiveSet::Rows(levels(&["A", "B"])),
            ..GridSpec::default()
        };
        let grid = build_grid(&spec).unwrap();
        assert_eq!(grid, build_grid(&GridSpec::default()).unwrap());
    }

    #[test]
    fn degenerate_grid() {
        let spec = GridSpec {
            naloxone_levels: levels(&["A"]),
            buprenorphine_levels: levels(&["a"]),
            active: ActiveSet::Default,
        };
        let grid = build_grid(&spec).unwrap();
        assert_eq!(grid.active().len(), 1);
        assert_eq!(grid.active()[0].label, "Aa");
    }

    #[test]
    fn two_by_three_all_is_row_major() {
        let spec = GridSpec {
            naloxone_levels: levels(&["A", "B"]),
            buprenorphine_levels: levels(&["a", "b", "c"]),
            active: ActiveSet::All,
        };
        let grid = build_grid(&spec).unwrap();
        let got: Vec<_> = grid
            .active()
            .iter()
            .map(|c| (c.label.as_str(), c.naloxone_index, c.buprenorphine_index, c.cell))
            .collect();
        assert_eq!(
            got,
            [
                ("Aa", 0, 0, 0),
                ("Ab", 0, 1, 1),
                ("Ac", 0, 2, 2),
                ("Ba", 1, 0, 3),
                ("Bb", 1, 1, 4),
                ("Bc", 1, 2, 5)
            ]
        );
    }

    #[test]
    fn duplicate_labels_rejected() {
        let spec = GridSpec {
            naloxone_levels: levels(&["A", "A"]),
            ..GridSpec::default()
        };
        assert!(matches!(build_grid(&spec), Err(Error::InvalidGrid(_))));
    }

    #[test]
    fn empty_levels_rejected() {
        let spec = GridSpec {
            buprenorphine_levels: vec![],
            ..GridSpec::default()
        };
        assert!(build_grid(&spec).is_err());
    }

    #[test]
    fn unknown_active_cell_rejected() {
        let spec = GridSpec {
            active: ActiveSet::Cells(levels(&["Aa", "Fz"])),
            ..GridSpec::default()
        };
        let err = build_grid(&spec).unwrap_err().to_string();
        assert!(err.contains("Fz"), "{err}");

        let spec = GridSpec {
            active: ActiveSet::Rows(levels(&["Q"])),
            ..GridSpec::default()
        };
        assert!(build_grid(&spec).is_err());
    }

    #[test]
    fn cells_subset_keeps_grid_order() {
        let spec = GridSpec {
            active: ActiveSet::Cells(levels(&["Ce", "Aa"])),
            ..GridSpec::default()
        };
        let grid = build_grid(&spec).unwrap();
        let labels: Vec<_> = grid.active().iter().map(|c| c.label.as_str()).collect();
        assert_eq!(labels, ["Aa", "Ce"]);
        assert_eq!(grid.active()[1].cell, 14);
    }
}
