//! Execution settings shared by every kernel: serial/parallel mode,
//! capacity budgets, cooperative cancellation.

use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::thread::JoinHandle;
use std::time::Duration;

use crate::error::{Error, Result};

/// Cooperative stop signal checked by kernel outer loops once per edge.
#[derive(Debug, Clone, Default)]
pub struct StopFlag(Arc<AtomicBool>);

impl StopFlag {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn stop(&self) {
        self.0.store(true, Ordering::Relaxed);
    }

    pub fn is_stopped(&self) -> bool {
        self.0.load(Ordering::Relaxed)
    }
}

/// Raises a [`StopFlag`] once the timeout elapses unless disarmed first.
pub struct Watchdog {
    disarm: Arc<(std::sync::Mutex<bool>, std::sync::Condvar)>,
    handle: Option<JoinHandle<()>>,
}

impl Watchdog {
    pub fn arm(flag: StopFlag, timeout: Duration) -> Self {
        if timeout.is_zero() {
            flag.stop();
        }
        let disarm = Arc::new((std::sync::Mutex::new(false), std::sync::Condvar::new()));
        let shared = Arc::clone(&disarm);
        let handle = std::thread::spawn(move || {
            let (lock, cvar) = &*shared;
            let guard = lock.lock().expect("watchdog lock");
            let (guard, result) = cvar
                .wait_timeout_while(guard, timeout, |done| !*done)
                .expect("watchdog wait");
            if result.timed_out() && !*guard {
                flag.stop();
            }
        });
        Self { disarm, handle: Some(handle) }
    }
}

impl Drop for Watchdog {
    fn drop(&mut self) {
        let (lock, cvar) = &*self.disarm;
        *lock.lock().expect("watchdog lock") = true;
        cvar.notify_all();
        if let Some(h) = self.handle.take() {
            let _ = h.join();
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExecConfig {
    /// Run outer loops on the rayon pool. Each output slot is still summed
    /// in the same order, so results match serial mode.
    pub parallel: bool,
    /// Largest `n^r` the explicit oracle may materialize.
    pub explicit_budget: u128,
    /// Largest total `Σ_e |β(e)|` the ordered baseline may enumerate.
    pub ordered_budget: u128,
    pub stop: Option<StopFlag>,
}

impl Default for ExecConfig {
    fn default() -> Self {
        Self { parallel: false, explicit_budget: 100_000_000, ordered_budget: 100_000_000, stop: None }
    }
}

impl ExecConfig {
    pub fn serial() -> Self {
        Self::default()
    }

    pub fn parallel() -> Self {
        Self { parallel: true, ..Self::default() }
    }

    pub fn with_stop(mut self, stop: StopFlag) -> Self {
        self.stop = Some(stop);
        self
    }

    #[inline]
    pub fn check(&self) -> Result<()> {
        match &self.stop {
            Some(flag) if flag.is_stopped() => Err(Error::Cancelled),
            _ => Ok(()),
        }
    }

    /// Maps `f` over `0..len`, in parallel when configured.
    pub fn map_range<T, F>(&self, len: usize, f: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(usize) -> Result<T> + Sync + Send,
    {
        self.check()?;
        if self.parallel {
            use rayon::prelude::*;
            (0..len).into_par_iter().map(f).collect()
        } else {
            (0..len).map(f).collect()
        }
    }
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}
