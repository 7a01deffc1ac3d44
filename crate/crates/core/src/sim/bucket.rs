//! Relay token buckets refilled once per simulated second.

/// Token bucket with steady rate `rate` bytes/s and capacity `burst` bytes.
#[derive(Clone, Debug, PartialEq)]
pub struct RelayBucket {
    pub rate: f64,
    pub burst: f64,
    tokens: f64,
}

impl RelayBucket {
    /// A bucket that starts full.
    pub fn new(rate: f64, burst: f64) -> Self {
        RelayBucket {
            rate,
            burst,
            tokens: burst,
        }
    }

    pub fn tokens(&self) -> f64 {
        self.tokens
    }

    /// One second of refill.
    pub fn refill(&mut self) {
        self.tokens = (self.tokens + self.rate).min(self.burst);
    }

    pub fn consume(&mut self, bytes: f64) {
        self.tokens = (self.tokens - bytes).max(0.0);
    }

    /// Forwarding rate available for the coming second given the relay's
    /// link capacity. Spending it for a whole second cannot overdraw the
    /// bucket.
    pub fn capacity(&self, link: f64) -> f64 {
        link.min(self.tokens)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn refill_caps_at_burst() {
        let mut b = RelayBucket::new(100.0, 250.0);
        assert_eq!(b.tokens(), 250.0);
        b.consume(200.0);
        b.refill();
        assert_eq!(b.tokens(), 150.0);
        b.refill();
        b.refill();
        assert_eq!(b.tokens(), 250.0);
    }

    #[test]
    fn never_negative() {
        let mut b = RelayBucket::new(10.0, 10.0);
        b.consume(50.0);
        assert_eq!(b.tokens(), 0.0);
        assert_eq!(b.capacity(1e9), 0.0);
        b.refill();
        assert_eq!(b.capacity(1e9), 10.0);
        assert_eq!(b.capacity(4.0), 4.0);
    }
}
