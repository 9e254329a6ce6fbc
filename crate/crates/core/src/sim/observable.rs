use std::fmt;
use std::sync::Arc;

use super::{Result, SimError};
use crate::config::{SimLimits, OBSERVABLE_BOUND_TOL};

/// Diagonal observable `Σ_x f(x)|x⟩⟨x|` with `f` normalised into `[−1, 1]`.
#[derive(Clone)]
pub struct DiagonalObservable {
    f: Arc<dyn Fn(u64) -> f64 + Send + Sync>,
    rescale_note: String,
}

impl fmt::Debug for DiagonalObservable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DiagonalObservable")
            .field("rescale_note", &self.rescale_note)
            .finish()
    }
}

impl DiagonalObservable {
    pub fn new(f: impl Fn(u64) -> f64 + Send + Sync + 'static, rescale_note: impl Into<String>) -> Self {
        DiagonalObservable {
            f: Arc::new(f),
            rescale_note: rescale_note.into(),
        }
    }

    /// `Z_{w0} Z_{w1} …` as a parity function.
    pub fn z_parity(wires: &[usize]) -> Self {
        let mask: u64 = wires.iter().map(|&w| 1u64 << w).sum();
        DiagonalObservable::new(
            move |x| if (x & mask).count_ones().is_multiple_of(2) { 1.0 } else { -1.0 },
            "none",
        )
    }

    pub fn evaluate(&self, x: u64) -> f64 {
        (self.f)(x)
    }

    pub fn rescale_note(&self) -> &str {
        &self.rescale_note
    }

    /// Values for every `x < 2^n`.
    pub fn table(&self, n: usize) -> Vec<f64> {
        (0..1u64 << n).map(|x| self.evaluate(x)).collect()
    }

    /// Checks `|f(x)| ≤ 1` over all `2^n` inputs.
    pub fn check_bounded(&self, n: usize) -> Result<()> {
        let cap = SimLimits::DEFAULT.statevector_qubits;
        if n > cap {
            return Err(SimError::CapExceeded {
                what: "observable scan",
                qubits: n,
                cap,
            });
        }
        for x in 0..1u64 << n {
            let v = self.evaluate(x);
            if v.is_nan() || v.abs() > 1.0 + OBSERVABLE_BOUND_TOL {
                return Err(SimError::Format(format!(
                    "observable value {v} at x={x:#b} is outside [-1, 1]"
                )));
            }
        }
        Ok(())
    }
}
