use crate::bits::BitString;
use crate::problem::Problem;

/// Number of ones in the string.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OneMax {
    pub n: usize,
}

impl Problem for OneMax {
    fn id(&self) -> String {
        "onemax".into()
    }

    fn len(&self) -> usize {
        self.n
    }

    fn fitness(&self, bits: &BitString) -> f64 {
        bits.count_ones() as f64
    }

    fn known_optimum(&self) -> Option<f64> {
        Some(self.n as f64)
    }

    fn flip_gain(&self, bits: &mut BitString, _current: f64, i: usize) -> f64 {
        if bits.get(i) {
            -1.0
        } else {
            1.0
        }
    }
}
