//! Small numeric helpers shared by the table and experiment code.

/// `log2` of a running sum of `2^x` terms without overflow.
#[derive(Debug, Clone, Copy)]
pub(crate) struct LogSum {
    max: f64,
    scaled: f64,
}

impl LogSum {
    pub(crate) fn new() -> Self {
        Self {
            max: f64::NEG_INFINITY,
            scaled: 0.0,
        }
    }

    pub(crate) fn add(&mut self, x: f64) {
        if x == f64::NEG_INFINITY {
            return;
        }
        if x > self.max {
            self.scaled = self.scaled * (self.max - x).exp2() + 1.0;
            self.max = x;
        } else {
            self.scaled += (x - self.max).exp2();
        }
    }

    pub(crate) fn log2(&self) -> f64 {
        self.max + self.scaled.log2()
    }
}
