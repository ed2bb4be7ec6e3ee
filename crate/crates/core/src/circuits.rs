//! Nearest-neighbour Givens schedules that fold an orthogonal mode matrix to
//! a diagonal one, and the pair-rotation cascade that collapses a ladder of
//! paired occupations onto a single Fock state.
//!
//! A gate with angle `theta` on modes `(j, j+1)` acts as
//!
//! ```text
//! c+_j     -> cos(theta/2) c+_j     - sin(theta/2) c+_{j+1}
//! c+_{j+1} -> cos(theta/2) c+_{j+1} + sin(theta/2) c+_j
//! ```
//!
//! so a mode with site coefficients `(u_j, u_{j+1})` becomes
//! `(c u_j + s u_{j+1}, c u_{j+1} - s u_j)`.

use std::f64::consts::PI;
use std::fmt::Write as _;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::orthogonality_defect;

/// Largest off-diagonal entry tolerated after folding.
pub const FOLD_TOL: f64 = 1e-10;
/// Ladder coefficients at or below this magnitude end the pair cascade.
pub const CASCADE_ZERO_TOL: f64 = 1e-12;
const PIVOT_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GivensGate {
    /// Folding stage `k` (1-based).
    pub stage: usize,
    /// Left site of the gate (1-based); acts on `j, j+1`.
    pub j: usize,
    pub theta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    Folding,
    Unfolding,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GivensSchedule {
    pub gates: Vec<GivensGate>,
    pub direction: Direction,
    pub sites: usize,
}

/// Rotation by `phi` in the span of `omega_l` (pair on sites `2l-1, 2l`)
/// and `omega_{l+1}`:
/// `omega_l -> cos(phi/2) omega_l + sin(phi/2) omega_{l+1}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairRotation {
    pub l: usize,
    pub phi: f64,
}

impl PairRotation {
    /// Sites `2l-1 ..= 2l+2` (1-based).
    pub fn support(&self) -> std::ops::RangeInclusive<usize> {
        2 * self.l - 1..=2 * self.l + 2
    }

    pub fn inverse(&self) -> Self {
        Self {
            l: self.l,
            phi: -self.phi,
        }
    }
}

/// Forward elimination of a ladder state: applying `rotations` in order
/// maps `sum_l a_l omega_l` to `terminal_sign * omega_terminal`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairCascade {
    pub rotations: Vec<PairRotation>,
    pub terminal: usize,
    pub terminal_sign: f64,
}

impl PairCascade {
    /// Rotations that rebuild the ladder from the terminal Fock state, in
    /// application order.
    pub fn reconstruction(&self) -> Vec<PairRotation> {
        self.rotations.iter().rev().map(PairRotation::inverse).collect()
    }
}

fn wrap_angle(theta: f64) -> f64 {
    if theta > PI {
        theta - 2.0 * PI
    } else if theta <= -PI {
        theta + 2.0 * PI
    } else {
        theta
    }
}

/// Angle in `(-pi, pi]` whose rotation zeroes `u_hi`:
/// `tan(theta/2) = u_hi / u_lo`.
pub fn givens_angle(u_lo: f64, u_hi: f64) -> f64 {
    if u_lo.abs() < PIVOT_FLOOR && u_hi.abs() < PIVOT_FLOOR {
        return 0.0;
    }
    wrap_angle(2.0 * u_hi.atan2(u_lo))
}

/// Applies the gate's mode rotation to coefficients `(u_j, u_{j+1})`.
pub fn rotate_coefficients(theta: f64, u_lo: f64, u_hi: f64) -> (f64, f64) {
    let (s, c) = (theta / 2.0).sin_cos();
    (c * u_lo + s * u_hi, c * u_hi - s * u_lo)
}

/// Rotates site columns `j, j+1` of a mode matrix (rows are modes).
pub fn apply_gate_to_modes(m: &mut DMatrix<f64>, gate: &GivensGate) {
    let (s, c) = (gate.theta / 2.0).sin_cos();
    let rows = m.nrows();
    let (lo, hi) = (gate.j - 1, gate.j);
    for r in 0..rows {
        let (a, b) = (m[(r, lo)], m[(r, hi)]);
        m[(r, lo)] = c * a + s * b;
        m[(r, hi)] = c * b - s * a;
    }
}

/// Folds the mode matrix `M = Q^T` to diagonal form.
///
/// Stage `k` clears row `k` right of the diagonal, with `j` running from
/// `N-1` down to `k`. Returns the schedule and the diagonal of the folded
/// matrix (entries `+-1`).
pub fn fold_schedule(q: &DMatrix<f64>) -> Result<(GivensSchedule, Vec<f64>)> {
    if !q.is_square() {
        return Err(Error::Contract("mode matrix must be square".into()));
    }
    let n = q.nrows();
    let defect = orthogonality_defect(q);
    if !(defect <= 1e-10) {
        return Err(Error::Contract(format!(
            "matrix is not orthogonal: max|Q^T Q - I| = {defect:e}"
        )));
    }
    let mut m = q.transpose();
    let mut gates = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for k in 1..n {
        for j in (k..n).rev() {
            let theta = givens_angle(m[(k - 1, j - 1)], m[(k - 1, j)]);
            let gate = GivensGate { stage: k, j, theta };
            apply_gate_to_modes(&mut m, &gate);
            gates.push(gate);
        }
    }
    let mut worst = (0, 0, 0.0_f64);
    for c in 0..n {
        for r in 0..n {
            if r != c && m[(r, c)].abs() > worst.2.abs() {
                worst = (r + 1, c + 1, m[(r, c)]);
            }
        }
    }
    if worst.2.abs() > FOLD_TOL {
        return Err(Error::Compilation {
            row: worst.0,
            col: worst.1,
            value: worst.2,
        });
    }
    let diagonal = (0..n).map(|i| m[(i, i)].signum()).collect();
    Ok((
        GivensSchedule {
            gates,
            direction: Direction::Folding,
            sites: n,
        },
        diagonal,
    ))
}

/// Inverse schedule: reversed order, negated angles.
pub fn unfold_sequence(s: &GivensSchedule) -> Result<GivensSchedule> {
    if s.direction != Direction::Folding {
        return Err(Error::Contract("unfold_sequence needs a folding schedule".into()));
    }
    Ok(GivensSchedule {
        gates: s
            .gates
            .iter()
            .rev()
            .map(|g| GivensGate {
                stage: g.stage,
                j: g.j,
                theta: -g.theta,
            })
            .collect(),
        direction: Direction::Unfolding,
        sites: s.sites,
    })
}

/// Cascade eliminating the ladder `sum_l alphas[l-1] omega_l` from the left.
///
/// The elimination angle at step `l` is `phi = 2 atan2(A, a_{l+1})`, where
/// `A >= 0` is the amplitude accumulated on `omega_l`. The cascade stops at
/// the last coefficient above `1e-12`.
pub fn pair_cascade(alphas: &[f64]) -> Result<PairCascade> {
    let norm_sq: f64 = alphas.iter().map(|a| a * a).sum();
    if (norm_sq - 1.0).abs() > 1e-10 {
        return Err(Error::Contract(format!(
            "ladder coefficients must be normalized, sum a^2 = {norm_sq}"
        )));
    }
    let last = alphas
        .iter()
        .rposition(|a| a.abs() > CASCADE_ZERO_TOL)
        .ok_or_else(|| Error::Contract("all ladder coefficients vanish".into()))?;
    let mut rotations = Vec::with_capacity(last);
    let mut acc = alphas[0];
    for l in 1..=last {
        let next = alphas[l];
        // Only the first accumulated amplitude can be negative.
        let phi = 2.0 * acc.atan2(next);
        rotations.push(PairRotation { l, phi });
        acc = (acc * acc + next * next).sqrt();
    }
    let terminal_sign = if last == 0 {
        alphas[0].signum()
    } else {
        1.0
    };
    Ok(PairCascade {
        rotations,
        terminal: last + 1,
        terminal_sign,
    })
}

/// Line-oriented text: `# ...` header lines, then `stage j theta` per gate.
pub fn schedule_to_text(s: &GivensSchedule) -> String {
    let mut out = String::new();
    let dir = match s.direction {
        Direction::Folding => "folding",
        Direction::Unfolding => "unfolding",
    };
    let _ = writeln!(out, "# givens schedule");
    let _ = writeln!(out, "# direction {dir}");
    let _ = writeln!(out, "# sites {}", s.sites);
    let _ = writeln!(out, "# columns: stage j theta (radians)");
    for g in &s.gates {
        let _ = writeln!(out, "{} {} {:.16e}", g.stage, g.j, g.theta);
    }
    out
}

pub fn schedule_from_text(text: &str) -> Result<GivensSchedule> {
    let mut direction = None;
    let mut sites = None;
    let mut gates = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(meta) = line.strip_prefix('#') {
            let mut parts = meta.split_whitespace();
            match (parts.next(), parts.next()) {
                (Some("direction"), Some("folding")) => direction = Some(Direction::Folding),
                (Some("direction"), Some("unfolding")) => direction = Some(Direction::Unfolding),
                (Some("sites"), Some(n)) => sites = Some(parse_field::<usize>(n, lineno)?),
                _ => {}
            }
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(Error::Parse(format!("line {}: expected `stage j theta`", lineno + 1)));
        }
        gates.push(GivensGate {
            stage: parse_field(fields[0], lineno)?,
            j: parse_field(fields[1], lineno)?,
            theta: parse_field(fields[2], lineno)?,
        });
    }
    let sites = sites.ok_or_else(|| Error::Parse("missing `# sites` header".into()))?;
    if let Some(g) = gates.iter().find(|g| g.j == 0 || g.j >= sites) {
        return Err(Error::Parse(format!("gate site {} outside 1..{}", g.j, sites)));
    }
    Ok(GivensSchedule {
        gates,
        direction: direction.ok_or_else(|| Error::Parse("missing `# direction` header".into()))?,
        sites,
    })
}

/// `# ...` header lines, then `l phi` per forward rotation.
pub fn cascade_to_text(c: &PairCascade) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# pair cascade");
    let _ = writeln!(out, "# terminal {} {}", c.terminal, c.terminal_sign);
    let _ = writeln!(out, "# columns: l phi (radians)");
    for r in &c.rotations {
        let _ = writeln!(out, "{} {:.16e}", r.l, r.phi);
    }
    out
}

pub fn cascade_from_text(text: &str) -> Result<PairCascade> {
    let mut terminal = None;
    let mut rotations = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(meta) = line.strip_prefix('#') {
            let parts: Vec<&str> = meta.split_whitespace().collect();
            if parts.first() == Some(&"terminal") && parts.len() == 3 {
                terminal = Some((
                    parse_field::<usize>(parts[1], lineno)?,
                    parse_field::<f64>(parts[2], lineno)?,
                ));
            }
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(Error::Parse(format!("line {}: expected `l phi`", lineno + 1)));
        }
        rotations.push(PairRotation {
            l: parse_field(fields[0], lineno)?,
            phi: parse_field(fields[1], lineno)?,
        });
    }
    let (terminal, terminal_sign) =
        terminal.ok_or_else(|| Error::Parse("missing `# terminal` header".into()))?;
    Ok(PairCascade {
        rotations,
        terminal,
        terminal_sign,
    })
}

fn parse_field<T: std::str::FromStr>(s: &str, lineno: usize) -> Result<T> {
    s.parse()
        .map_err(|_| Error::Parse(format!("line {}: cannot parse `{s}`", lineno + 1)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random_orthogonal;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn angle_examples() {
        assert_eq!(givens_angle(1.0, 0.0), 0.0);
        assert!((givens_angle(1.0, 1.0) - PI / 2.0).abs() < 1e-15);
        let t = givens_angle(0.0, 1.0);
        assert!((t - PI).abs() < 1e-15);
        assert!(rotate_coefficients(t, 0.0, 1.0).1.abs() <= 1e-15);
        assert_eq!(givens_angle(0.0, 0.0), 0.0);
        let t = givens_angle(0.0, -1.0);
        assert!(t > -PI && t <= PI);
        assert!(rotate_coefficients(t, 0.0, -1.0).1.abs() <= 1e-15);
    }

    #[test]
    fn identity_folds_trivially() {
        let (s, d) = fold_schedule(&DMatrix::identity(4, 4)).unwrap();
        assert_eq!(s.gates.len(), 6);
        assert!(s.gates.iter().all(|g| g.theta == 0.0));
        assert_eq!(d, vec![1.0; 4]);
    }

    #[test]
    fn two_by_two_rotation() {
        let (s, c) = 0.3f64.sin_cos();
        let q = DMatrix::from_row_slice(2, 2, &[c, -s, s, c]);
        let (sched, _) = fold_schedule(&q).unwrap();
        assert_eq!(sched.gates.len(), 1);
        let mut m = q.transpose();
        apply_gate_to_modes(&mut m, &sched.gates[0]);
        assert!(m[(0, 1)].abs() <= 1e-15 && m[(1, 0)].abs() <= 1e-15);
        assert!((sched.gates[0].theta.abs() - 0.6).abs() < 1e-15);
    }

    #[test]
    fn unfold_examples() {
        let empty = GivensSchedule {
            gates: vec![],
            direction: Direction::Folding,
            sites: 3,
        };
        assert!(unfold_sequence(&empty).unwrap().gates.is_empty());
        let one = GivensSchedule {
            gates: vec![GivensGate { stage: 1, j: 1, theta: 0.4 }],
            direction: Direction::Folding,
            sites: 2,
        };
        let un = unfold_sequence(&one).unwrap();
        assert_eq!(un.gates[0].theta, -0.4);
        assert_eq!(un.direction, Direction::Unfolding);
        assert!(unfold_sequence(&un).is_err());
    }

    #[test]
    fn fold_then_unfold_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let q = random_orthogonal(7, &mut rng);
        let (fold, _) = fold_schedule(&q).unwrap();
        let unfold = unfold_sequence(&fold).unwrap();
        let mut m = DMatrix::<f64>::identity(7, 7);
        for g in fold.gates.iter().chain(&unfold.gates) {
            apply_gate_to_modes(&mut m, g);
        }
        assert!((m - DMatrix::identity(7, 7)).amax() < 1e-12);
    }

    #[test]
    fn eliminated_entries_stay_eliminated() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let n = 9;
        let q = random_orthogonal(n, &mut rng);
        let (fold, diag) = fold_schedule(&q).unwrap();
        assert_eq!(fold.gates.len(), n * (n - 1) / 2);
        assert!(diag.iter().all(|d| d.abs() == 1.0));
        let mut m = q.transpose();
        for g in &fold.gates {
            apply_gate_to_modes(&mut m, g);
            for r in 0..g.stage - 1 {
                for c in 0..n {
                    if c != r {
                        assert!(m[(r, c)].abs() <= 1e-12);
                    }
                }
            }
            assert!(orthogonality_defect(&m) <= 1e-10);
        }
    }

    #[test]
    fn cascade_examples() {
        assert!(pair_cascade(&[1.0]).unwrap().rotations.is_empty());
        let c = pair_cascade(&[0.6, 0.8]).unwrap();
        assert_eq!(c.rotations.len(), 1);
        assert!(((c.rotations[0].phi / 2.0).tan() - 0.6 / 0.8).abs() < 1e-15);
        assert_eq!(c.terminal, 2);
        assert!(pair_cascade(&[0.0, 0.0]).is_err());
        assert!(pair_cascade(&[0.5]).is_err());
        let trimmed = pair_cascade(&[1.0, 0.0, 0.0]).unwrap();
        assert!(trimmed.rotations.is_empty());
        assert_eq!(trimmed.terminal, 1);
    }

    #[test]
    fn text_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let (fold, _) = fold_schedule(&random_orthogonal(5, &mut rng)).unwrap();
        assert_eq!(schedule_from_text(&schedule_to_text(&fold)).unwrap(), fold);
        let c = pair_cascade(&[0.6, -0.48, 0.64]).unwrap();
        assert_eq!(cascade_from_text(&cascade_to_text(&c)).unwrap(), c);
        assert!(schedule_from_text("1 2 0.5\n").is_err());
    }
}
