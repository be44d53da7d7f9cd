//! Distribution fits, second differences, phase-diagram sweeps and the
//! long-time symmetry table.

pub mod diagram;
pub mod fit;
pub mod lsq;
pub mod table;

pub use diagram::{
    second_difference, sweep_phase_diagram, sweep_phase_diagrams, CellFlag, DiagramQuantity,
    DiagramSource, PhaseDiagram,
};
pub use fit::{fit_exponential, fit_gaussian, FitKind, FitOptions, FitParams, FitResult};
pub use lsq::{linear_fit, polyfit, LinearFit, Polyfit};
pub use table::{long_time_table, PhaseRow, SymmetryTable};
