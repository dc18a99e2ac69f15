use num_complex::Complex64;

/// Complex baseband samples tagged with their sample rate in samples/s.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleStream {
    pub samples: Vec<Complex64>,
    pub rate: f64,
}

impl SampleStream {
    pub fn new(samples: Vec<Complex64>, rate: f64) -> Self {
        Self { samples, rate }
    }

    pub fn zeros(len: usize, rate: f64) -> Self {
        Self::new(vec![Complex64::new(0.0, 0.0); len], rate)
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Sum of squared magnitudes.
    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|s| s.norm_sqr()).sum()
    }

    pub fn mean_power(&self) -> f64 {
        if self.samples.is_empty() {
            0.0
        } else {
            self.energy() / self.samples.len() as f64
        }
    }

    /// Keeps every `factor`-th sample starting at `phase`.
    pub fn decimate(&self, factor: usize, phase: usize) -> SampleStream {
        assert!(factor >= 1 && phase < factor);
        let samples = self.samples.iter().skip(phase).step_by(factor).copied().collect();
        SampleStream::new(samples, self.rate / factor as f64)
    }

    pub fn is_finite(&self) -> bool {
        self.samples.iter().all(|s| s.re.is_finite() && s.im.is_finite())
    }
}

impl std::ops::Index<usize> for SampleStream {
    type Output = Complex64;
    fn index(&self, i: usize) -> &Complex64 {
        &self.samples[i]
    }
}
