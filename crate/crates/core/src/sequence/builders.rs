//! Compensating sequence builders and pulse substitution.

use std::collections::hash_map::Entry;
use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;
use std::fmt;
use std::sync::{Arc, Mutex};

use super::{
    Block, Compiler, ControlLabel, ErrorAssignment, Pulse, PulseSequence, PulseTerm, Segment,
};
use crate::error::{domain, Error, Result};
use crate::pauli::{su2_structure, Hamiltonian, PauliString};
use crate::unitary::{distance, evolve};

const IDEAL_ACTION_TOL: f64 = 1e-10;
const NORMALIZED_TOL: f64 = 1e-12;

/// `φ = acos(−θ/4π)`.
pub fn phi_of(theta: f64) -> Result<f64> {
    let x = -theta / (4.0 * PI);
    if !(-1.0..=1.0).contains(&x) {
        return Err(domain(format!("|theta| must not exceed 4*pi, got {theta}")));
    }
    Ok(x.acos())
}

fn require_su2(
    l1: &ControlLabel,
    h1: &Hamiltonian,
    l2: &ControlLabel,
    h2: &Hamiltonian,
) -> Result<()> {
    let fail = |reason: String| Error::NotSu2 {
        left: l1.to_string(),
        right: l2.to_string(),
        reason,
    };
    match su2_structure(h1, h2)? {
        None => Err(fail("the pair commutes or -i[H1,H2] does not close".into())),
        Some(s) if !s.is_normalized(NORMALIZED_TOL) => Err(fail(format!(
            "structure constants ({}, {}) are not 1",
            s.k1, s.k2
        ))),
        Some(_) => Ok(()),
    }
}

/// A family of sequences implementing `exp(−iθH)` for the builder's target
/// control. Negative angles are handled by callers via inverse blocks.
pub trait CorrectionBuilder: Send + Sync + fmt::Debug {
    fn target(&self) -> (&ControlLabel, &Arc<Hamiltonian>);
    fn build(&self, theta: f64) -> Result<Arc<PulseSequence>>;
}

/// A single bare pulse; the identity correction.
#[derive(Debug, Clone)]
pub struct Uncorrected {
    label: ControlLabel,
    h: Arc<Hamiltonian>,
}

impl Uncorrected {
    pub fn new(label: ControlLabel, h: Arc<Hamiltonian>) -> Self {
        Self { label, h }
    }
}

impl CorrectionBuilder for Uncorrected {
    fn target(&self) -> (&ControlLabel, &Arc<Hamiltonian>) {
        (&self.label, &self.h)
    }

    fn build(&self, theta: f64) -> Result<Arc<PulseSequence>> {
        Ok(Arc::new(PulseSequence::from_pulses(vec![Pulse::single(
            self.label.clone(),
            theta,
            self.h.clone(),
        )?])?))
    }
}

/// BB1 with simultaneous fields: three `(π, φ), (2π, 3φ), (π, φ)` rotations
/// in the H1-H2 plane, then the target `U1(θ)`.
#[derive(Debug, Clone)]
pub struct Bb1W {
    l1: ControlLabel,
    h1: Arc<Hamiltonian>,
    l2: ControlLabel,
    h2: Arc<Hamiltonian>,
    correlated: bool,
}

impl Bb1W {
    pub fn new(
        l1: ControlLabel,
        h1: Arc<Hamiltonian>,
        l2: ControlLabel,
        h2: Arc<Hamiltonian>,
    ) -> Result<Self> {
        require_su2(&l1, &h1, &l2, &h2)?;
        Ok(Self::new_unchecked(l1, h1, l2, h2))
    }

    /// For pairs that only close as su(2) on a subspace.
    pub(crate) fn new_unchecked(
        l1: ControlLabel,
        h1: Arc<Hamiltonian>,
        l2: ControlLabel,
        h2: Arc<Hamiltonian>,
    ) -> Self {
        Self {
            l1,
            h1,
            l2,
            h2,
            correlated: false,
        }
    }

    /// Built sequences require `ε1 = ε2` at compile time.
    pub fn correlated(mut self) -> Self {
        self.correlated = true;
        self
    }

    fn rotation(&self, area: f64, phi: f64) -> Result<Pulse> {
        Pulse::new(vec![
            PulseTerm::new(self.l1.clone(), area * phi.cos(), self.h1.clone()),
            PulseTerm::new(self.l2.clone(), area * phi.sin(), self.h2.clone()),
        ])
    }
}

impl CorrectionBuilder for Bb1W {
    fn target(&self) -> (&ControlLabel, &Arc<Hamiltonian>) {
        (&self.l1, &self.h1)
    }

    fn build(&self, theta: f64) -> Result<Arc<PulseSequence>> {
        let phi = phi_of(theta)?;
        let seq = PulseSequence::from_pulses(vec![
            self.rotation(PI, phi)?,
            self.rotation(2.0 * PI, 3.0 * phi)?,
            self.rotation(PI, phi)?,
            Pulse::single(self.l1.clone(), theta, self.h1.clone())?,
        ])?;
        Ok(Arc::new(if self.correlated {
            seq.with_correlated(self.l1.clone(), self.l2.clone())
        } else {
            seq
        }))
    }
}

/// BB1 by conjugation: `U2(∓a)` tilts around `U1(π)`, `U1(2π)`, `U1(π)`
/// with `a = φ, 3φ, φ`, then the target `U1(θ)`. The tilt pulses may
/// themselves be corrected sequences.
#[derive(Debug, Clone)]
pub struct Bb1J {
    l1: ControlLabel,
    h1: Arc<Hamiltonian>,
    l2: ControlLabel,
    h2: Arc<Hamiltonian>,
    tilt: Option<Arc<dyn CorrectionBuilder>>,
}

impl Bb1J {
    pub fn new(
        l1: ControlLabel,
        h1: Arc<Hamiltonian>,
        l2: ControlLabel,
        h2: Arc<Hamiltonian>,
    ) -> Result<Self> {
        require_su2(&l1, &h1, &l2, &h2)?;
        Ok(Self {
            l1,
            h1,
            l2,
            h2,
            tilt: None,
        })
    }

    /// Tilt pulses come from `tilt`, which must target `(l2, h2)`.
    pub fn with_tilt(
        l1: ControlLabel,
        h1: Arc<Hamiltonian>,
        tilt: Arc<dyn CorrectionBuilder>,
    ) -> Result<Self> {
        let (l2, h2) = tilt.target();
        let mut b = Self::new(l1, h1, l2.clone(), h2.clone())?;
        b.tilt = Some(tilt);
        Ok(b)
    }

    fn tilt_segment(&self, angle: f64) -> Result<Segment> {
        match &self.tilt {
            None => Ok(Segment::Pulse(Pulse::single(
                self.l2.clone(),
                angle,
                self.h2.clone(),
            )?)),
            Some(b) => Ok(Segment::Block(Block {
                sequence: b.build(angle.abs())?,
                inverse: angle < 0.0,
            })),
        }
    }
}

impl CorrectionBuilder for Bb1J {
    fn target(&self) -> (&ControlLabel, &Arc<Hamiltonian>) {
        (&self.l1, &self.h1)
    }

    fn build(&self, theta: f64) -> Result<Arc<PulseSequence>> {
        let phi = phi_of(theta)?;
        let mut segments = Vec::with_capacity(10);
        for (a, b) in [(phi, PI), (3.0 * phi, 2.0 * PI), (phi, PI)] {
            segments.push(self.tilt_segment(-a)?);
            segments.push(Segment::Pulse(Pulse::single(
                self.l1.clone(),
                b,
                self.h1.clone(),
            )?));
            segments.push(self.tilt_segment(a)?);
        }
        segments.push(Segment::Pulse(Pulse::single(
            self.l1.clone(),
            theta,
            self.h1.clone(),
        )?));
        Ok(Arc::new(PulseSequence::from_segments(segments)?))
    }
}

/// Caches built sequences by angle, turning recursive constructions into a
/// DAG of shared blocks.
#[derive(Debug)]
pub struct Memoized {
    inner: Arc<dyn CorrectionBuilder>,
    cache: Mutex<HashMap<u64, Arc<PulseSequence>>>,
}

impl Memoized {
    pub fn new(inner: Arc<dyn CorrectionBuilder>) -> Self {
        Self {
            inner,
            cache: Mutex::new(HashMap::new()),
        }
    }
}

impl CorrectionBuilder for Memoized {
    fn target(&self) -> (&ControlLabel, &Arc<Hamiltonian>) {
        self.inner.target()
    }

    fn build(&self, theta: f64) -> Result<Arc<PulseSequence>> {
        if let Some(s) = self.cache.lock().expect("poisoned").get(&theta.to_bits()) {
            return Ok(s.clone());
        }
        let built = self.inner.build(theta)?;
        self.cache
            .lock()
            .expect("poisoned")
            .insert(theta.to_bits(), built.clone());
        Ok(built)
    }
}

fn arc(h: &Hamiltonian) -> Arc<Hamiltonian> {
    Arc::new(h.clone())
}

pub fn bb1_w(
    theta: f64,
    h1: &Hamiltonian,
    h2: &Hamiltonian,
    l1: &ControlLabel,
    l2: &ControlLabel,
) -> Result<PulseSequence> {
    let b = Bb1W::new(l1.clone(), arc(h1), l2.clone(), arc(h2))?;
    Ok((*b.build(theta)?).clone())
}

pub fn bb1_j(
    theta: f64,
    h1: &Hamiltonian,
    h2: &Hamiltonian,
    l1: &ControlLabel,
    l2: &ControlLabel,
) -> Result<PulseSequence> {
    let b = Bb1J::new(l1.clone(), arc(h1), l2.clone(), arc(h2))?;
    Ok((*b.build(theta)?).clone())
}

/// BB1-J whose `l2` pulses are replaced by BB1-W blocks on `(h2, h4)`;
/// `l2` and `l4` must share one error group when compiled.
#[allow(clippy::too_many_arguments)]
pub fn bb1_wj(
    theta: f64,
    h1: &Hamiltonian,
    h2: &Hamiltonian,
    h4: &Hamiltonian,
    l1: &ControlLabel,
    l2: &ControlLabel,
    l4: &ControlLabel,
) -> Result<PulseSequence> {
    if l1 == l2 || l1 == l4 {
        return Err(domain(format!(
            "target label {l1} must differ from the correction labels"
        )));
    }
    let skeleton = bb1_j(theta, h1, h2, l1, l2)?;
    let w = Bb1W::new(l2.clone(), arc(h2), l4.clone(), arc(h4))?.correlated();
    substitute(&skeleton, l2, &w)
}

/// Replaces every single-term pulse on `label` at angle `θ_p` with
/// `replacement.build(θ_p)`, or the inverse block of `build(|θ_p|)` when
/// `θ_p < 0`. Each replacement must match the original pulse at zero error
/// up to global phase.
pub fn substitute(
    seq: &PulseSequence,
    label: &ControlLabel,
    replacement: &dyn CorrectionBuilder,
) -> Result<PulseSequence> {
    let mut checked = HashMap::new();
    let mut compiler = Compiler::new();
    let out = substitute_in(seq, label, replacement, &mut checked, &mut compiler)?;
    Ok(match out {
        Some(s) => s,
        None => seq.clone(),
    })
}

fn substitute_in(
    seq: &PulseSequence,
    label: &ControlLabel,
    replacement: &dyn CorrectionBuilder,
    checked: &mut HashMap<u64, Segment>,
    compiler: &mut Compiler,
) -> Result<Option<PulseSequence>> {
    let mut changed = false;
    let mut segments = Vec::with_capacity(seq.segments().len());
    for seg in seq.segments() {
        match seg {
            Segment::Pulse(p) if p.terms().iter().any(|t| &t.label == label) => {
                let [term] = p.terms() else {
                    return Err(domain(format!(
                        "label {label} appears in a simultaneous pulse and cannot be substituted"
                    )));
                };
                let key = term.theta.to_bits();
                let block = match checked.entry(key) {
                    Entry::Occupied(e) => e.get().clone(),
                    Entry::Vacant(e) => e
                        .insert(replacement_block(term, replacement, compiler)?)
                        .clone(),
                };
                segments.push(block);
                changed = true;
            }
            Segment::Block(b) => {
                match substitute_in(&b.sequence, label, replacement, checked, compiler)? {
                    Some(inner) => {
                        segments.push(Segment::Block(Block {
                            sequence: Arc::new(inner),
                            inverse: b.inverse,
                        }));
                        changed = true;
                    }
                    None => segments.push(seg.clone()),
                }
            }
            other => segments.push(other.clone()),
        }
    }
    if !changed {
        return Ok(None);
    }
    let mut out = PulseSequence::from_segments(segments)?;
    for (a, b) in seq.correlated_pairs() {
        out = out.with_correlated(a.clone(), b.clone());
    }
    Ok(Some(out))
}

fn replacement_block(
    term: &PulseTerm,
    replacement: &dyn CorrectionBuilder,
    compiler: &mut Compiler,
) -> Result<Segment> {
    let block = Block {
        sequence: replacement.build(term.theta.abs())?,
        inverse: term.theta < 0.0,
    };
    let wrapped = PulseSequence::from_segments(vec![Segment::Block(block.clone())])?;
    let zero = ErrorAssignment::shared(wrapped.labels(), 0.0);
    let actual = compiler.compile(&wrapped, &zero)?;
    let ideal = evolve(&[(term.theta, 0.0, &*term.h)])?;
    let d = distance(&ideal, &actual, true)?;
    if d.is_nan() || d > IDEAL_ACTION_TOL {
        return Err(Error::IdealActionMismatch {
            label: term.label.to_string(),
            angle: term.theta,
            distance: d,
        });
    }
    Ok(Segment::Block(block))
}

/// Controls of an n-qubit chain: `X_j = ½X_j`, `Y1 = ½Y_1` and
/// `ZZ{j}{j+1} = ½Z_jZ_{j+1}`.
#[derive(Debug, Clone)]
pub struct ChainControls {
    n: usize,
    /// `X1, ZZ12, X2, ZZ23, …, X_n`: the correction levels in order.
    levels: Vec<(ControlLabel, Arc<Hamiltonian>)>,
    y1: (ControlLabel, Arc<Hamiltonian>),
}

impl ChainControls {
    pub fn label_names(n: usize) -> Vec<String> {
        let mut names = vec!["X1".to_string(), "Y1".to_string()];
        for j in 1..n {
            names.push(format!("ZZ{}{}", j, j + 1));
            names.push(format!("X{}", j + 1));
        }
        names
    }

    pub fn standard(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(domain("chain needs at least one qubit"));
        }
        let one = |p: char, q: usize| {
            let mut letters = vec!['I'; n];
            letters[q - 1] = p;
            letters
        };
        let mut map = BTreeMap::new();
        let mut put = |name: String, letters: Vec<char>| -> Result<()> {
            let word: PauliString = letters.iter().collect::<String>().parse()?;
            map.insert(ControlLabel::new(name)?, Hamiltonian::term(0.5, word));
            Ok(())
        };
        put("Y1".into(), one('Y', 1))?;
        for j in 1..=n {
            put(format!("X{j}"), one('X', j))?;
            if j < n {
                let mut zz = one('Z', j);
                zz[j] = 'Z';
                put(format!("ZZ{}{}", j, j + 1), zz)?;
            }
        }
        Self::from_controls(n, &map)
    }

    pub fn from_controls(n: usize, controls: &BTreeMap<ControlLabel, Hamiltonian>) -> Result<Self> {
        if n == 0 {
            return Err(domain("chain needs at least one qubit"));
        }
        let names = Self::label_names(n);
        let missing: Vec<String> = names
            .iter()
            .filter(|name| !controls.keys().any(|l| l.as_str() == name.as_str()))
            .cloned()
            .collect();
        if !missing.is_empty() {
            return Err(domain(format!(
                "missing chain controls: {}",
                missing.join(", ")
            )));
        }
        let get = |name: &str| -> Result<(ControlLabel, Arc<Hamiltonian>)> {
            let label = ControlLabel::new(name)?;
            let h = controls[&label].clone();
            Ok((label, Arc::new(h)))
        };
        let mut levels = vec![get("X1")?];
        for name in names.iter().skip(2) {
            levels.push(get(name)?);
        }
        Ok(Self {
            n,
            levels,
            y1: get("Y1")?,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// All labels, in chain order with `Y1` second.
    pub fn labels(&self) -> Vec<ControlLabel> {
        let mut out = vec![self.levels[0].0.clone(), self.y1.0.clone()];
        out.extend(self.levels[1..].iter().map(|(l, _)| l.clone()));
        out
    }

    /// The corrected rotation `X_n`.
    pub fn target(&self) -> (&ControlLabel, &Arc<Hamiltonian>) {
        let (l, h) = self.levels.last().expect("nonempty");
        (l, h)
    }

    /// `(X1, Y1)`, whose errors the chain assumes equal.
    pub fn correlated_pair(&self) -> (ControlLabel, ControlLabel) {
        (self.levels[0].0.clone(), self.y1.0.clone())
    }

    pub fn y1(&self) -> (&ControlLabel, &Arc<Hamiltonian>) {
        (&self.y1.0, &self.y1.1)
    }
}

/// Corrected `X_n(θ)`: BB1-W on `(X1, Y1)`, then BB1-J levels on
/// `ZZ12, X2, ZZ23, …, X_n`, each tilting with the previous level's
/// corrected rotation. Pulse count obeys `L_k = 4 + 6·L_{k−1}`.
pub fn wj_chain(n: usize, theta: f64, controls: &ChainControls) -> Result<PulseSequence> {
    if n != controls.n {
        return Err(domain(format!(
            "chain controls are for n = {}, requested {n}",
            controls.n
        )));
    }
    let (x1, hx1) = controls.levels[0].clone();
    let (y1, hy1) = controls.y1.clone();
    let mut builder: Arc<dyn CorrectionBuilder> = Arc::new(Memoized::new(Arc::new(
        Bb1W::new(x1, hx1, y1, hy1)?.correlated(),
    )));
    for (label, h) in &controls.levels[1..] {
        let level = Bb1J::with_tilt(label.clone(), h.clone(), builder)?;
        builder = Arc::new(Memoized::new(Arc::new(level)));
    }
    Ok((*builder.build(theta)?).clone())
}
