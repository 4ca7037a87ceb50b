//! Small numerical accumulators shared by the estimators.

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sum {
    sum: f64,
    comp: f64,
}

impl Sum {
    pub fn new() -> Sum {
        Sum::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Batch-means standard error for the mean of a correlated sequence of known
/// length `n`: `⌈√n⌉` batches, `se = √(var(batch means) / batches)`.
///
/// Heuristic for non-i.i.d. bases; trailing samples that do not fill a whole
/// batch count toward the mean but not toward the error estimate.
#[derive(Debug, Clone)]
pub struct BatchMeans {
    batch_len: usize,
    in_batch: usize,
    current: Sum,
    batches: usize,
    mean_acc: f64,
    m2_acc: f64,
}

impl BatchMeans {
    pub fn new(n: usize) -> BatchMeans {
        let n = n.max(1);
        let b = (n as f64).sqrt().ceil() as usize;
        BatchMeans {
            batch_len: n.div_ceil(b).max(1),
            in_batch: 0,
            current: Sum::new(),
            batches: 0,
            mean_acc: 0.0,
            m2_acc: 0.0,
        }
    }

    #[inline]
    pub fn push(&mut self, x: f64) {
        self.current.add(x);
        self.in_batch += 1;
        if self.in_batch == self.batch_len {
            let m = self.current.value() / self.batch_len as f64;
            // Welford over batch means
            self.batches += 1;
            let d = m - self.mean_acc;
            self.mean_acc += d / self.batches as f64;
            self.m2_acc += d * (m - self.mean_acc);
            self.current = Sum::new();
            self.in_batch = 0;
        }
    }

    pub fn standard_error(&self) -> f64 {
        if self.batches < 2 {
            return 0.0;
        }
        let var = self.m2_acc / (self.batches - 1) as f64;
        (var / self.batches as f64).sqrt()
    }
}

/// Mean and standard error of i.i.d. samples.
#[derive(Debug, Clone, Copy, Default)]
pub struct MeanVar {
    n: u64,
    mean: f64,
    m2: f64,
}

impl MeanVar {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn standard_error(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        (self.m2 / (self.n - 1) as f64 / self.n as f64).sqrt()
    }
}
