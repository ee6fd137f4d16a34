//! Shift spaces over finite alphabets: the symbol-sequence metric, rotation
//! (Sturmian) words and their periodic approximants, the periodic
//! approximation rate ε(Z, n), and max-cycle-mean on weighted graphs.

mod epsilon;
mod graph;
mod shift;
mod sturmian;

pub use epsilon::{epsilon_of_n, EpsilonResult, OrbitClosure, MIN_CONVERGENTS};
pub use graph::{karp_value, max_cycle_mean, path_max_average, Cycle, CycleMean, Edge, WeightedGraph};
pub use shift::{shift_distance, ShiftDistance, ShiftPoint};
pub use sturmian::{
    golden_convergents, is_balanced, periodic_approximant, sturmian_symbol, sturmian_word, FactorDictionary,
    Rational,
};
