//! Plain-text output writers: the Pareto front and per-run history CSVs, the
//! gradient-validation table, and the element-stress dump. All numbers use
//! the shortest round-trip decimal form, so outputs are byte-deterministic.

use std::fmt::Write as _;

use crate::fem::StateSolution;
use crate::optim::{Method, ParetoPoint, RunHistory};

/// `front.csv`: one row per point, `gamma` flattened into trailing columns.
#[must_use]
pub fn front_csv(points: &[ParetoPoint], dim: usize) -> String {
    let mut s = String::from("method,param,f1,f2,iterations,status");
    for j in 0..dim {
        let _ = write!(s, ",gamma_{j}");
    }
    s.push('\n');
    for p in points {
        let _ = write!(
            s,
            "{},{},{},{},{},{}",
            p.method.tag(),
            p.param,
            p.f1,
            p.f2,
            p.iterations,
            p.status
        );
        for v in &p.gamma {
            let _ = write!(s, ",{v}");
        }
        s.push('\n');
    }
    s
}

/// Per-run history CSV: the starting row has `k = 0` and zero step data.
#[must_use]
pub fn history_csv(history: &RunHistory) -> String {
    let mut s = String::from("k,f1,f2,step,dir_norm,dir_inf,armijo_halvings\n");
    for r in &history.records {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            r.k, r.f1, r.f2, r.step, r.dir_norm, r.dir_inf, r.armijo_halvings
        );
    }
    s
}

/// `history_<method>_<param>.csv`.
#[must_use]
pub fn history_filename(method: Method, param: f64) -> String {
    format!("history_{}_{}.csv", method.tag(), param)
}

/// One adjoint-versus-finite-difference comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationRow {
    /// `f1_ml_0`, `f1_th_3`, `f2_ml_1`, ... (objective, curve, coefficient).
    pub component: String,
    pub eps: f64,
    pub abs_error: f64,
}

#[must_use]
pub fn validation_csv(rows: &[ValidationRow]) -> String {
    let mut s = String::from("component,eps,abs_error\n");
    for r in rows {
        let _ = writeln!(s, "{},{},{}", r.component, r.eps, r.abs_error);
    }
    s
}

/// Element-stress dump: `element_index sigma11 sigma12 sigma22 area` rows.
#[must_use]
pub fn stress_dump(state: &StateSolution) -> String {
    let mut s = String::new();
    for (e, sigma) in state.element_stress.iter().enumerate() {
        let [sxx, syy, sxy] = *sigma;
        let _ = writeln!(s, "{e} {sxx} {sxy} {syy} {}", state.element_area[e]);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optim::{IterationRecord, RunStatus};

    fn sample_history() -> RunHistory {
        RunHistory {
            records: vec![
                IterationRecord {
                    k: 0,
                    f1: 0.5,
                    f2: 0.2,
                    step: 0.0,
                    dir_norm: 0.0,
                    dir_inf: 0.0,
                    armijo_halvings: 0,
                },
                IterationRecord {
                    k: 1,
                    f1: 0.25,
                    f2: 0.19,
                    step: 0.5,
                    dir_norm: 0.125,
                    dir_inf: 0.1,
                    armijo_halvings: 1,
                },
            ],
            final_gamma: vec![1.0, 2.0],
            status: RunStatus::Converged,
        }
    }

    #[test]
    fn history_csv_layout() {
        let text = history_csv(&sample_history());
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "k,f1,f2,step,dir_norm,dir_inf,armijo_halvings");
        assert_eq!(lines[1], "0,0.5,0.2,0,0,0,0");
        assert_eq!(lines[2], "1,0.25,0.19,0.5,0.125,0.1,1");
        assert_eq!(lines.len(), 3);
    }

    #[test]
    fn front_csv_layout() {
        let p = ParetoPoint {
            f1: 0.001,
            f2: 0.17,
            gamma: vec![0.0, -0.1, 0.2, 0.2],
            method: Method::BiobjectiveDescent,
            param: 1.5,
            converged: true,
            iterations: 12,
            status: RunStatus::Converged,
        };
        let text = front_csv(&[p], 4);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(
            lines[0],
            "method,param,f1,f2,iterations,status,gamma_0,gamma_1,gamma_2,gamma_3"
        );
        assert_eq!(lines[1], "moda,1.5,0.001,0.17,12,Converged,0,-0.1,0.2,0.2");
    }

    #[test]
    fn history_filenames_are_clean() {
        assert_eq!(history_filename(Method::WeightedSum, 0.35), "history_wsm_0.35.csv");
        assert_eq!(history_filename(Method::BiobjectiveDescent, 2.0), "history_moda_2.csv");
    }

    #[test]
    fn validation_csv_layout() {
        let rows = vec![ValidationRow {
            component: "f1_ml_0".into(),
            eps: 1e-6,
            abs_error: 3.5e-9,
        }];
        let text = validation_csv(&rows);
        assert_eq!(text, "component,eps,abs_error\nf1_ml_0,0.000001,0.0000000035\n");
    }

    #[test]
    fn stress_dump_rows() {
        let state = StateSolution {
            u: nalgebra::DVector::zeros(2),
            element_stress: vec![[1.5, -0.25, 0.125]],
            element_area: vec![0.03125],
        };
        let text = stress_dump(&state);
        assert_eq!(text, "0 1.5 0.125 -0.25 0.03125\n");
    }
}
