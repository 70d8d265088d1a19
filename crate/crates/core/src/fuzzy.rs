//! Triangular fuzzy membership and correction of imprecise numeric values.
//!
//! A [`FuzzyProfile`] describes one numeric descriptor: the value domain,
//! the prototype value where membership peaks, the half-width of the
//! triangle and a list of labeled subsets (operating ranges). An imprecise
//! reading is snapped either to the prototype (membership at or above the
//! 0.5 alpha-cut) or to the outer terminal of the subset containing it.

use crate::error::{Error, Result};

/// Membership threshold separating "close to the prototype" from "far".
pub const ALPHA_CUT: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub struct FuzzySubset {
    pub label: String,
    pub lower: f64,
    pub upper: f64,
}

impl FuzzySubset {
    pub fn new(label: impl Into<String>, lower: f64, upper: f64) -> Self {
        Self {
            label: label.into(),
            lower,
            upper,
        }
    }

    fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }
}

/// Classification interval of a subset once the gap toward the prototype
/// has been closed.
#[derive(Debug, Clone, Copy)]
struct ClassRange {
    lower: f64,
    upper: f64,
    upper_open: bool,
}

impl ClassRange {
    fn contains(&self, x: f64) -> bool {
        self.lower <= x
            && if self.upper_open {
                x < self.upper
            } else {
                x <= self.upper
            }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FuzzyProfile {
    descriptor_id: String,
    domain_lower: f64,
    domain_upper: f64,
    prototype: f64,
    half_width: f64,
    subsets: Vec<FuzzySubset>,
}

impl FuzzyProfile {
    pub fn new(
        descriptor_id: impl Into<String>,
        domain: (f64, f64),
        prototype: f64,
        half_width: f64,
        subsets: Vec<FuzzySubset>,
    ) -> Result<Self> {
        let profile = Self {
            descriptor_id: descriptor_id.into(),
            domain_lower: domain.0,
            domain_upper: domain.1,
            prototype,
            half_width,
            subsets,
        };
        profile.check()?;
        Ok(profile)
    }

    fn invalid(&self, reason: impl Into<String>) -> Error {
        Error::InvalidProfile {
            descriptor_id: self.descriptor_id.clone(),
            reason: reason.into(),
        }
    }

    fn check(&self) -> Result<()> {
        let finite = [
            self.domain_lower,
            self.domain_upper,
            self.prototype,
            self.half_width,
        ]
        .iter()
        .chain(self.subsets.iter().flat_map(|s| [&s.lower, &s.upper]))
        .all(|v| v.is_finite());
        if !finite {
            return Err(self.invalid("all bounds must be finite"));
        }
        if self.domain_lower > self.domain_upper {
            return Err(self.invalid("domain lower bound exceeds upper bound"));
        }
        if !(self.domain_lower..=self.domain_upper).contains(&self.prototype) {
            return Err(self.invalid("prototype lies outside the domain"));
        }
        if self.half_width <= 0.0 {
            return Err(self.invalid("half-width must be positive"));
        }
        for s in &self.subsets {
            if s.lower > s.upper {
                return Err(self.invalid(format!("subset {} has lower > upper", s.label)));
            }
            if s.lower < self.domain_lower || s.upper > self.domain_upper {
                return Err(self.invalid(format!("subset {} leaves the domain", s.label)));
            }
            if self.membership_unchecked(self.outer_terminal(s)) >= ALPHA_CUT {
                return Err(self.invalid(format!(
                    "outer terminal of subset {} lies inside the alpha-cut",
                    s.label
                )));
            }
        }
        let mut sorted: Vec<&FuzzySubset> = self.subsets.iter().collect();
        sorted.sort_by(|a, b| a.lower.total_cmp(&b.lower));
        for w in sorted.windows(2) {
            if w[1].lower <= w[0].upper {
                return Err(
                    self.invalid(format!("subsets {} and {} overlap", w[0].label, w[1].label))
                );
            }
        }
        let mut labels: Vec<&str> = self.subsets.iter().map(|s| s.label.as_str()).collect();
        labels.sort_unstable();
        if labels.windows(2).any(|w| w[0] == w[1]) {
            return Err(self.invalid("duplicate subset label"));
        }
        Ok(())
    }

    pub fn descriptor_id(&self) -> &str {
        &self.descriptor_id
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.domain_lower, self.domain_upper)
    }

    pub fn prototype(&self) -> f64 {
        self.prototype
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn subsets(&self) -> &[FuzzySubset] {
        &self.subsets
    }

    pub fn in_domain(&self, x: f64) -> bool {
        self.domain_lower <= x && x <= self.domain_upper
    }

    fn ensure_in_domain(&self, x: f64) -> Result<()> {
        if self.in_domain(x) {
            Ok(())
        } else {
            Err(Error::OutOfDomain {
                descriptor_id: self.descriptor_id.clone(),
                value: x,
                lower: self.domain_lower,
                upper: self.domain_upper,
            })
        }
    }

    fn membership_unchecked(&self, x: f64) -> f64 {
        let distance = (x - self.prototype).abs();
        if distance >= self.half_width {
            0.0
        } else {
            1.0 - distance / self.half_width
        }
    }

    /// Triangular membership degree of `x`.
    pub fn membership(&self, x: f64) -> Result<f64> {
        self.ensure_in_domain(x)?;
        Ok(self.membership_unchecked(x))
    }

    fn outer_terminal(&self, s: &FuzzySubset) -> f64 {
        if (s.upper - self.prototype).abs() > (s.lower - self.prototype).abs() {
            s.upper
        } else {
            s.lower
        }
    }

    fn class_ranges(&self) -> Vec<ClassRange> {
        let p = self.prototype;
        let mut ranges: Vec<ClassRange> = self
            .subsets
            .iter()
            .map(|s| ClassRange {
                lower: s.lower,
                upper: s.upper,
                upper_open: false,
            })
            .collect();
        if self.subsets.iter().any(|s| s.contains(p)) {
            return ranges;
        }
        let nearest_below = self
            .subsets
            .iter()
            .enumerate()
            .filter(|(_, s)| s.upper < p)
            .max_by(|a, b| a.1.upper.total_cmp(&b.1.upper))
            .map(|(i, _)| i);
        let nearest_above = self
            .subsets
            .iter()
            .enumerate()
            .filter(|(_, s)| s.lower > p)
            .min_by(|a, b| a.1.lower.total_cmp(&b.1.lower))
            .map(|(i, _)| i);
        if let Some(i) = nearest_below {
            ranges[i].upper = p;
            ranges[i].upper_open = nearest_above.is_some();
        }
        if let Some(i) = nearest_above {
            ranges[i].lower = p;
        }
        ranges
    }

    fn classify_index(&self, x: f64) -> Option<usize> {
        self.class_ranges().iter().position(|r| r.contains(x))
    }

    /// The subset whose range contains `x`. The gap between the declared
    /// subsets and the prototype is attributed to the nearest subset on
    /// each side; the prototype itself belongs to the subset above it.
    pub fn classify_subset(&self, x: f64) -> Result<Option<&FuzzySubset>> {
        self.ensure_in_domain(x)?;
        Ok(self.classify_index(x).map(|i| &self.subsets[i]))
    }

    /// Snap an imprecise reading: to the prototype when membership reaches
    /// the alpha-cut, otherwise to the outer terminal of its subset.
    /// Values outside every subset are returned unchanged.
    pub fn correct_imprecise(&self, x: f64) -> Result<f64> {
        self.ensure_in_domain(x)?;
        if self.membership_unchecked(x) >= ALPHA_CUT {
            return Ok(self.prototype);
        }
        Ok(match self.classify_index(x) {
            Some(i) => self.outer_terminal(&self.subsets[i]),
            None => x,
        })
    }

    pub fn same_class(&self, x: f64, y: f64) -> Result<bool> {
        self.ensure_in_domain(x)?;
        self.ensure_in_domain(y)?;
        Ok(match (self.classify_index(x), self.classify_index(y)) {
            (Some(a), Some(b)) => a == b,
            _ => false,
        })
    }
}
