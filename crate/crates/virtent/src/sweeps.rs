//! Parameter sweeps evaluated in parallel and collected in grid order.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use virtent_core::entropy::{
    mutual_information_21, s_ext_21, s_int_21, s_total_21, vacuum_finite_coefficient, VacuumForm,
};
use virtent_core::loops::SchemeParams;

use crate::error::Result;
use crate::grid::Grid;

/// Finite parts of the first-order entropies at one bare mass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Figure2Row {
    pub m0: f64,
    pub s_total: f64,
    pub s_ext: f64,
    pub s_int: f64,
    pub mutual: f64,
    pub ext_plus_int: f64,
}

pub fn figure2_row(p: &SchemeParams) -> Figure2Row {
    let s_ext = s_ext_21(p).finite;
    let s_int = s_int_21(p).finite;
    Figure2Row {
        m0: p.m0(),
        s_total: s_total_21(p).finite,
        s_ext,
        s_int,
        mutual: mutual_information_21(p).compositional.finite,
        ext_plus_int: s_ext + s_int,
    }
}

pub fn figure2(grid: &Grid, base: &SchemeParams) -> Result<Vec<Figure2Row>> {
    grid.points()
        .par_iter()
        .map(|&m0| Ok(figure2_row(&base.set_m0(m0)?)))
        .collect()
}

/// Vacuum finite coefficient on a grid, one column per μ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Figure3 {
    pub mus: Vec<f64>,
    pub m0: Vec<f64>,
    /// `values[i][k]` belongs to `m0[i]` and `mus[k]`.
    pub values: Vec<Vec<f64>>,
}

impl Figure3 {
    pub fn column(&self, k: usize) -> Vec<(f64, f64)> {
        self.m0
            .iter()
            .zip(&self.values)
            .map(|(&m, v)| (m, v[k]))
            .collect()
    }

    /// Indices of strict interior local minima of one column.
    pub fn interior_minima(&self, k: usize) -> Vec<usize> {
        let c = self.column(k);
        (1..c.len().saturating_sub(1))
            .filter(|&i| c[i].1 < c[i - 1].1 && c[i].1 < c[i + 1].1)
            .collect()
    }
}

pub fn figure3(grid: &Grid, mus: &[f64], base: &SchemeParams, form: VacuumForm) -> Result<Figure3> {
    let m0 = grid.points();
    let values = m0
        .par_iter()
        .map(|&m| {
            mus.iter()
                .map(|&mu| {
                    let p = base.set_m0(m)?.set_mu(mu)?;
                    Ok(vacuum_finite_coefficient(&p, form)?)
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Figure3 {
        mus: mus.to_vec(),
        m0,
        values,
    })
}
