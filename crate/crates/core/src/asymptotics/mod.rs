//! Recursive front asymptotics: formation times `s_n` and scaled depths `y_n`.

pub mod functions;
pub mod g;
pub mod io;
pub mod schedule;

pub use functions::{erf_e, erf_e_inv, eval_f, f_bar, inv_f_integral, inv_f_integral_quad, s_half};
pub use g::GCoefficients;
pub use schedule::{
    classify_and_solve_s_n, compute_y_n, predict_front, predict_fronts, run_algorithm,
    solve_s_tilde, solve_time_integral, AlgorithmOptions, AsymptoticSchedule, Case, Classification,
    FrontPrediction, ScheduleRecord, StopReason,
};
