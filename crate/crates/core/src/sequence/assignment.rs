use std::collections::BTreeMap;

use super::ControlLabel;
use crate::error::{domain, Result};

/// Systematic error per control label. Labels in one group share one slot,
/// so they always resolve to the same value.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ErrorAssignment {
    slots: Vec<f64>,
    index: BTreeMap<ControlLabel, usize>,
    seed: Option<u64>,
    sign_pattern: Option<String>,
}

impl ErrorAssignment {
    pub fn new() -> Self {
        Self::default()
    }

    /// Every label gets its own slot holding `eps`.
    pub fn uniform<'a>(labels: impl IntoIterator<Item = &'a ControlLabel>, eps: f64) -> Self {
        let mut a = Self::new();
        for l in labels {
            a.set(l.clone(), eps).expect("labels are distinct");
        }
        a
    }

    /// All labels in one shared group.
    pub fn shared<'a>(labels: impl IntoIterator<Item = &'a ControlLabel>, eps: f64) -> Self {
        let mut a = Self::new();
        let group: Vec<ControlLabel> = labels.into_iter().cloned().collect();
        a.group(group, eps).expect("labels are distinct");
        a
    }

    /// Assigns an independent error to `label`.
    pub fn set(&mut self, label: ControlLabel, eps: f64) -> Result<()> {
        self.group([label], eps)
    }

    /// Binds all `labels` to one shared error.
    pub fn group(
        &mut self,
        labels: impl IntoIterator<Item = ControlLabel>,
        eps: f64,
    ) -> Result<()> {
        if !eps.is_finite() {
            return Err(domain(format!("error value must be finite, got {eps}")));
        }
        let labels: Vec<ControlLabel> = labels.into_iter().collect();
        if labels.is_empty() {
            return Err(domain("an error group needs at least one label"));
        }
        for (i, l) in labels.iter().enumerate() {
            if self.index.contains_key(l) || labels[..i].contains(l) {
                return Err(domain(format!("label {l} is assigned twice")));
            }
        }
        let slot = self.slots.len();
        self.slots.push(eps);
        for l in labels {
            self.index.insert(l, slot);
        }
        Ok(())
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub(crate) fn with_sign_pattern(mut self, pattern: String) -> Self {
        self.sign_pattern = Some(pattern);
        self
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// `label+` / `label-` entries joined by `;`, recorded for random signs.
    pub fn sign_pattern(&self) -> Option<&str> {
        self.sign_pattern.as_deref()
    }

    pub fn resolve(&self, label: &ControlLabel) -> Option<f64> {
        self.index.get(label).map(|&s| self.slots[s])
    }

    pub fn contains(&self, label: &ControlLabel) -> bool {
        self.index.contains_key(label)
    }

    pub fn same_group(&self, a: &ControlLabel, b: &ControlLabel) -> bool {
        match (self.index.get(a), self.index.get(b)) {
            (Some(x), Some(y)) => x == y,
            _ => false,
        }
    }

    pub fn labels(&self) -> impl Iterator<Item = &ControlLabel> {
        self.index.keys()
    }

    /// Every label with its resolved value, sorted by label.
    pub fn resolved(&self) -> impl Iterator<Item = (&ControlLabel, f64)> {
        self.index.iter().map(|(l, &s)| (l, self.slots[s]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l(s: &str) -> ControlLabel {
        ControlLabel::new(s).unwrap()
    }

    #[test]
    fn grouped_labels_share_value() {
        let mut a = ErrorAssignment::new();
        a.group([l("X1"), l("Y1")], 0.01).unwrap();
        a.set(l("ZZ12"), -0.02).unwrap();
        assert!(a.same_group(&l("X1"), &l("Y1")));
        assert!(!a.same_group(&l("X1"), &l("ZZ12")));
        assert_eq!(a.resolve(&l("Y1")), Some(0.01));
        assert_eq!(a.resolve(&l("Q")), None);
    }

    #[test]
    fn double_assignment_rejected() {
        let mut a = ErrorAssignment::new();
        a.set(l("X1"), 0.0).unwrap();
        assert!(a.set(l("X1"), 0.1).is_err());
        assert!(a.group([l("Y1"), l("Y1")], 0.1).is_err());
        assert!(a.set(l("Z"), f64::NAN).is_err());
    }
}
