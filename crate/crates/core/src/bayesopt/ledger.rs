use serde::{Deserialize, Serialize};

/// Regret bookkeeping against a reference optimum `L*`.
///
/// `r_t = L* − L(z_t)`, `R_T = (Σ_{t≤T} r_t)/T`, and `s_T = min_{t≤T} r_t`, the
/// gap of the best point found so far. The final-iterate gap is `r_T`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegretLedger {
    pub optimum: f64,
    pub regrets: Vec<f64>,
    pub cumulative: Vec<f64>,
    pub average: Vec<f64>,
    pub simple: Vec<f64>,
    pub kappas: Vec<f64>,
}

impl RegretLedger {
    pub fn new(optimum: f64) -> Self {
        Self {
            optimum,
            regrets: Vec::new(),
            cumulative: Vec::new(),
            average: Vec::new(),
            simple: Vec::new(),
            kappas: Vec::new(),
        }
    }

    pub fn record(&mut self, value: f64, kappa: f64) {
        let r = self.optimum - value;
        let sum = self.cumulative.last().copied().unwrap_or(0.0) + r;
        let t = self.regrets.len() + 1;
        let best = self.simple.last().copied().unwrap_or(f64::INFINITY).min(r);
        self.regrets.push(r);
        self.cumulative.push(sum);
        self.average.push(sum / t as f64);
        self.simple.push(best);
        self.kappas.push(kappa);
    }

    pub fn len(&self) -> usize {
        self.regrets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.regrets.is_empty()
    }

    pub fn average_regret(&self) -> Option<f64> {
        self.average.last().copied()
    }

    pub fn simple_regret(&self) -> Option<f64> {
        self.simple.last().copied()
    }

    pub fn final_regret(&self) -> Option<f64> {
        self.regrets.last().copied()
    }

    /// Recomputes every derived sequence from `r_t` and checks bit-equality and `s_t ≤ R_t`.
    pub fn verify(&self) -> bool {
        let mut replay = RegretLedger::new(self.optimum);
        for (r, k) in self.regrets.iter().zip(&self.kappas) {
            replay.record(self.optimum - r, *k);
        }
        let same_regrets = replay.regrets.iter().zip(&self.regrets).all(|(a, b)| a.to_bits() == b.to_bits());
        same_regrets
            && replay.cumulative == self.cumulative
            && replay.average == self.average
            && replay.simple == self.simple
            && self.simple.iter().zip(&self.average).all(|(s, r)| s <= r)
    }
}
