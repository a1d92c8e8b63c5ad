use std::time::Instant;

/// CPU time the process has spent in user mode, all threads included.
fn user_seconds() -> Option<f64> {
    let mut usage = std::mem::MaybeUninit::<libc::rusage>::zeroed();
    // SAFETY: getrusage only writes into the provided struct.
    let rc = unsafe { libc::getrusage(libc::RUSAGE_SELF, usage.as_mut_ptr()) };
    if rc != 0 {
        return None;
    }
    // SAFETY: rc == 0 means the struct was filled in.
    let usage = unsafe { usage.assume_init() };
    Some(usage.ru_utime.tv_sec as f64 + usage.ru_utime.tv_usec as f64 * 1e-6)
}

/// Elapsed user and wall time of a piece of work.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Timing {
    /// `None` where the platform does not report user time.
    pub user_seconds: Option<f64>,
    pub wall_seconds: f64,
}

impl Timing {
    /// The reported cost: user time when known, else wall time.
    pub fn cost(&self) -> f64 {
        self.user_seconds.unwrap_or(self.wall_seconds)
    }

    pub fn clock(&self) -> &'static str {
        if self.user_seconds.is_some() {
            "user"
        } else {
            "wall"
        }
    }
}

pub struct Stopwatch {
    wall: Instant,
    user: Option<f64>,
}

impl Stopwatch {
    pub fn start() -> Self {
        Self {
            wall: Instant::now(),
            user: user_seconds(),
        }
    }

    pub fn stop(&self) -> Timing {
        Timing {
            user_seconds: self.user.zip(user_seconds()).map(|(a, b)| (b - a).max(0.0)),
            wall_seconds: self.wall.elapsed().as_secs_f64(),
        }
    }
}
