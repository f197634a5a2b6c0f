//! Closed-form success probabilities and their cross-check against the
//! simulator. Formulas are evaluated in exact rational arithmetic and
//! only converted to f64 at the boundary, so the analytic column of a
//! [`FormulaTable`] carries no accumulated rounding.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::schemes::{self, ParallelLayout, WSpec};
use crate::state::MAX_QUBITS;

type Exact = Ratio<u128>;

/// Largest parameter accepted by the exact formulas; beyond this the
/// power-of-two denominators would overflow u128.
const MAX_EXACT: u64 = 100;

fn check_positive(value: u64, what: &str) -> Result<()> {
    if value == 0 {
        return Err(Error::InvalidParameter(format!("{what} must be >= 1")));
    }
    if value > MAX_EXACT {
        return Err(Error::InvalidParameter(format!(
            "{what} must be <= {MAX_EXACT} for exact arithmetic"
        )));
    }
    Ok(())
}

fn to_f64(x: Exact) -> f64 {
    *x.numer() as f64 / *x.denom() as f64
}

/// Success probability of one cascade step on W_n: (n+1)/(2n).
pub fn p_step_exact(n: u64) -> Result<Exact> {
    check_positive(n, "n")?;
    Ok(Exact::new((n + 1) as u128, 2 * n as u128))
}

pub fn p_step(n: u64) -> Result<f64> {
    p_step_exact(n).map(to_f64)
}

/// Success probability of growing a single photon to W_(k+1) by k
/// cascade steps: the per-step factors telescope to (k+1)/2^k.
pub fn p_from_single_exact(k: u64) -> Result<Exact> {
    check_positive(k, "k")?;
    Ok(Exact::new((k + 1) as u128, 1u128 << k))
}

pub fn p_from_single(k: u64) -> Result<f64> {
    p_from_single_exact(k).map(to_f64)
}

/// Success probability of doubling W_n to W_2n by n cascade steps
/// instead of the deterministic parallel doubling: the step factors
/// telescope to 2^(1-n), which is why cascading alone cannot scale.
pub fn p_double_cascade_exact(n: u64) -> Result<Exact> {
    check_positive(n, "n")?;
    Ok(Exact::new(2, 1u128 << n))
}

pub fn p_double_cascade(n: u64) -> Result<f64> {
    p_double_cascade_exact(n).map(to_f64)
}

/// Success probability of the partial parallel expansion W_n -> W_(n+k)
/// with blocks on k of the n modes: (n+k)/(2n). At k = n this is 1
/// (full doubling), at k = 1 it reduces to the cascade step.
pub fn p_partial_exact(n: u64, k: u64) -> Result<Exact> {
    check_positive(n, "n")?;
    check_positive(k, "k")?;
    if k > n {
        return Err(Error::InvalidParameter(format!(
            "k must be <= n, got k={k}, n={n}"
        )));
    }
    Ok(Exact::new((n + k) as u128, 2 * n as u128))
}

pub fn p_partial(n: u64, k: u64) -> Result<f64> {
    p_partial_exact(n, k).map(to_f64)
}

/// Success probability of adding one qubit to an even W_2N:
/// 1/2 + 1/(4N).
pub fn p_odd_add_exact(n: u64) -> Result<Exact> {
    check_positive(n, "N")?;
    Ok(Exact::new(1, 2) + Exact::new(1, 4 * n as u128))
}

pub fn p_odd_add(n: u64) -> Result<f64> {
    p_odd_add_exact(n).map(to_f64)
}

/// Success probability of projecting an even W_(2N+2) down to W_(2N+1):
/// 1 - 1/(2(N+1)).
pub fn p_odd_project_exact(n: u64) -> Result<Exact> {
    check_positive(n, "N")?;
    Ok(Exact::new(1, 1) - Exact::new(1, 2 * (n + 1) as u128))
}

pub fn p_odd_project(n: u64) -> Result<f64> {
    p_odd_project_exact(n).map(to_f64)
}

/// The five expansion schemes the simulator and the formulas both know.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SchemeId {
    Cascade,
    Parallel,
    Partial,
    OddAdd,
    OddProject,
}

impl SchemeId {
    pub const ALL: [SchemeId; 5] = [
        SchemeId::Cascade,
        SchemeId::Parallel,
        SchemeId::Partial,
        SchemeId::OddAdd,
        SchemeId::OddProject,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SchemeId::Cascade => "cascade",
            SchemeId::Parallel => "parallel",
            SchemeId::Partial => "partial",
            SchemeId::OddAdd => "odd_add",
            SchemeId::OddProject => "odd_project",
        }
    }
}

impl fmt::Display for SchemeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SchemeId {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        SchemeId::ALL
            .into_iter()
            .find(|s| s.as_str() == text)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown scheme `{text}`")))
    }
}

/// One analytic-vs-simulated comparison.
#[derive(Debug, Clone, Serialize)]
pub struct FormulaRow {
    #[serde(serialize_with = "serialize_scheme")]
    pub scheme: SchemeId,
    /// Scheme-specific size parameter: the starting W size for cascade
    /// and parallel rows, N for the odd-size rows.
    pub size: u64,
    pub analytic: f64,
    pub simulated: f64,
    pub abs_delta: f64,
}

fn serialize_scheme<S: serde::Serializer>(s: &SchemeId, ser: S) -> std::result::Result<S::Ok, S::Error> {
    ser.serialize_str(s.as_str())
}

/// Cross-validation table over every scheme family.
#[derive(Debug, Clone, Serialize)]
pub struct FormulaTable {
    pub rows: Vec<FormulaRow>,
}

impl FormulaTable {
    pub fn max_abs_delta(&self) -> f64 {
        self.rows.iter().map(|r| r.abs_delta).fold(0.0, f64::max)
    }

    pub fn all_within(&self, tol: f64) -> bool {
        self.rows.iter().all(|r| r.abs_delta <= tol)
    }
}

fn simulate_cell(scheme: SchemeId, size: u64) -> Result<FormulaRow> {
    let n = size as usize;
    let (analytic, simulated) = match scheme {
        SchemeId::Cascade => {
            let spec = WSpec::numbered(n)?;
            let out = schemes::cascade_step(schemes::ideal_w(&spec)?, &spec)?;
            (p_step(size)?, out.success_probability)
        }
        SchemeId::Parallel => {
            let spec = WSpec::numbered(n)?;
            let layout = ParallelLayout::full(&spec);
            let out = schemes::parallel_double(schemes::ideal_w(&spec)?, &spec, &layout)?;
            (1.0, out.success_probability)
        }
        SchemeId::Partial => {
            let spec = WSpec::numbered(n)?;
            let layout = ParallelLayout::leading(&spec, n - 1)?;
            let out = schemes::parallel_partial(schemes::ideal_w(&spec)?, &spec, &layout)?;
            (p_partial(size, size - 1)?, out.success_probability)
        }
        SchemeId::OddAdd => {
            let spec = WSpec::numbered(2 * n)?;
            let out = schemes::odd_add_one(schemes::ideal_w(&spec)?, &spec)?;
            (p_odd_add(size)?, out.success_probability)
        }
        SchemeId::OddProject => {
            let spec = WSpec::numbered(2 * n + 2)?;
            let (out, _) = schemes::odd_project(schemes::ideal_w(&spec)?, &spec)?;
            (p_odd_project(size)?, out.success_probability)
        }
    };
    Ok(FormulaRow {
        scheme,
        size,
        analytic,
        simulated,
        abs_delta: (analytic - simulated).abs(),
    })
}

fn cells_up_to(max_n: u64) -> Vec<(SchemeId, u64)> {
    let mut cells = Vec::new();
    for n in 1..=max_n {
        cells.push((SchemeId::Cascade, n));
    }
    for n in 1..=max_n {
        cells.push((SchemeId::Parallel, n));
    }
    for n in 2..=max_n {
        cells.push((SchemeId::Partial, n));
    }
    for n in 1..=max_n / 2 {
        cells.push((SchemeId::OddAdd, n));
    }
    for n in 1..=max_n / 2 {
        cells.push((SchemeId::OddProject, n));
    }
    cells
}

/// Runs every scheme family up to starting size `max_n` and tabulates
/// analytic vs simulated success probabilities. The partial family uses
/// k = n-1 blocks per row; full (n, k) grids are cheap to sweep directly
/// with [`p_partial`] and [`schemes::parallel_partial`].
pub fn cross_validate(max_n: u64) -> Result<FormulaTable> {
    cross_validate_with_workers(max_n, 1)
}

/// [`cross_validate`] with the cells fanned out over `workers` threads.
/// The table is assembled in a fixed order, so the output is identical
/// for any worker count.
pub fn cross_validate_with_workers(max_n: u64, workers: usize) -> Result<FormulaTable> {
    if max_n == 0 {
        return Err(Error::InvalidParameter("max_n must be >= 1".into()));
    }
    if workers == 0 {
        return Err(Error::InvalidParameter("worker count must be >= 1".into()));
    }
    // The widest state is the doubled W_max_n.
    if 2 * max_n > MAX_QUBITS as u64 {
        return Err(Error::ResourceBound(format!(
            "max_n={max_n} would need {} qubits, limit is {MAX_QUBITS}",
            2 * max_n
        )));
    }
    let cells = cells_up_to(max_n);
    let mut rows: Vec<Option<FormulaRow>> = vec![None; cells.len()];
    if workers == 1 {
        for (slot, &(scheme, size)) in rows.iter_mut().zip(&cells) {
            *slot = Some(simulate_cell(scheme, size)?);
        }
    } else {
        let results: Vec<Result<Vec<(usize, FormulaRow)>>> = std::thread::scope(|scope| {
            let cells = &cells;
            let handles: Vec<_> = (0..workers)
                .map(|worker| {
                    scope.spawn(move || {
                        cells
                            .iter()
                            .enumerate()
                            .skip(worker)
                            .step_by(workers)
                            .map(|(i, &(scheme, size))| Ok((i, simulate_cell(scheme, size)?)))
                            .collect()
                    })
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
        });
        for chunk in results {
            for (i, row) in chunk? {
                rows[i] = Some(row);
            }
        }
    }
    Ok(FormulaTable {
        rows: rows.into_iter().map(|r| r.expect("all cells filled")).collect(),
    })
}
