//! The incremental midpoint stepper.
//!
//! From the current grid point the stepper considers the x-move candidate B,
//! the y-move candidate C and (8-connected) the diagonal candidate D. Three
//! midpoint measurements compare the candidates pairwise:
//!
//! - M: midpoint of `{B, C}`,
//! - H: midpoint of `{D, B}`,
//! - V: midpoint of `{C, D}`.
//!
//! Each measurement is gated by the validity condition on the midpoint
//! gradient: it may only be used when the directed polar of the midpoint is
//! conformal with the monotonic direction. Valid measurements are combined
//! by a fixed priority table; when none is valid the out-of-control rule
//! selects between B and C from the sign of the precomputed control factor.
//! Everything on this path is exact integer arithmetic.

use crate::conic::{bpos, Conic, HalfPoint};
use crate::error::{Error, Result};
use crate::segmentation::MonotonicSegment;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Four,
    Eight,
}

/// Decision variable for the pairwise measurement: the plain midpoint
/// residue, or the arithmetic mean of the pair residues (two-point method).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Criterion {
    Midpoint,
    ArithmeticMean,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Candidate {
    B,
    C,
    D,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MKind {
    M,
    H,
    V,
}

/// One midpoint measurement, fully evaluated.
#[derive(Debug, Clone, Copy)]
pub struct Measurement {
    pub kind: MKind,
    pub midpoint: HalfPoint,
    /// Exact `4·F` at the midpoint.
    pub f_mid4: i128,
    /// Doubled gradient `(2X, 2Y)` at the midpoint.
    pub gx_mid: i128,
    pub gy_mid: i128,
    pub valid: bool,
    /// Candidate selected by this measurement; defined only when valid.
    pub choice: Option<Candidate>,
}

/// Which table row resolved the step; kept per step so the priority logic
/// is auditable from traces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule {
    /// All measurements invalid: out-of-control rule over {B, C}.
    OocAllInvalid,
    /// H picked B, V picked C, M invalid: out-of-control rule over {B, C}.
    OocConflict,
    /// A single H/V measurement picked B or C and M was invalid.
    OocUnresolved,
    /// The M-measurement settled B versus C.
    MidpointM,
    /// H and V both picked D.
    BothSelectD,
    /// H and V resolved a full order by transitivity.
    Transitive,
    /// Exactly one of H/V was valid and picked D.
    SingleSelectD,
    /// Boundary walk: only one candidate stays inside the segment span.
    Forced,
}

impl Rule {
    pub fn is_ooc(&self) -> bool {
        matches!(
            self,
            Rule::OocAllInvalid | Rule::OocConflict | Rule::OocUnresolved
        )
    }
}

/// Per-step record; replaying the decision table on the recorded inputs
/// reproduces the recorded choice.
#[derive(Debug, Clone)]
pub struct StepTrace {
    pub from: HalfPoint,
    pub b: HalfPoint,
    pub c: HalfPoint,
    pub d: HalfPoint,
    pub m: Option<Measurement>,
    pub h: Option<Measurement>,
    pub v: Option<Measurement>,
    pub rule: Rule,
    pub chosen: Candidate,
    pub to: HalfPoint,
    pub x_move: bool,
    pub y_move: bool,
    /// Incrementally maintained doubled gradient at the new M-midpoint.
    pub gx_m_after: i128,
    pub gy_m_after: i128,
    /// Sign of the midpoint residue differs from the arithmetic-mean sign.
    pub potential_ooa: bool,
    /// Diagnostic conditions per measurement (M, H, V).
    pub secondary: [Option<bool>; 3],
    pub third: [Option<bool>; 3],
}

/// Mutable stepper state: current point plus the incrementally maintained
/// gradient of the next M-midpoint.
#[derive(Debug, Clone)]
pub struct StepState<'a> {
    pub conic: &'a Conic,
    pub seg: &'a MonotonicSegment,
    pub p_a: HalfPoint,
    pub gx_m: i128,
    pub gy_m: i128,
    pub step_count: u64,
}

impl<'a> StepState<'a> {
    pub fn new(conic: &'a Conic, seg: &'a MonotonicSegment) -> Result<Self> {
        Self::at(conic, seg, seg.start)
    }

    /// State positioned at an arbitrary grid point of the segment.
    pub fn at(conic: &'a Conic, seg: &'a MonotonicSegment, p: HalfPoint) -> Result<Self> {
        let mid = p.offset(seg.s_x, seg.s_y);
        let g = conic.gradient4(mid)?;
        Ok(Self {
            conic,
            seg,
            p_a: p,
            gx_m: g.gx,
            gy_m: g.gy,
            step_count: 0,
        })
    }

    /// Candidate points: x-move B, y-move C, diagonal D.
    pub fn candidates(&self) -> (HalfPoint, HalfPoint, HalfPoint) {
        let s = self.seg;
        (
            self.p_a.offset(2 * s.s_x, 0),
            self.p_a.offset(0, 2 * s.s_y),
            self.p_a.offset(2 * s.s_x, 2 * s.s_y),
        )
    }

    fn midpoint_of(&self, kind: MKind) -> HalfPoint {
        let s = self.seg;
        match kind {
            MKind::M => self.p_a.offset(s.s_x, s.s_y),
            MKind::H => self.p_a.offset(2 * s.s_x, s.s_y),
            MKind::V => self.p_a.offset(s.s_x, 2 * s.s_y),
        }
    }

    /// Evaluates one midpoint measurement with the plain midpoint criterion.
    pub fn measure(&self, kind: MKind) -> Result<Measurement> {
        self.measure_with(kind, Criterion::Midpoint)
    }

    /// Evaluates one midpoint measurement under the given decision variable.
    pub fn measure_with(&self, kind: MKind, criterion: Criterion) -> Result<Measurement> {
        let midpoint = self.midpoint_of(kind);
        let f_mid4 = self.conic.residue4(midpoint)?;
        let g = self.conic.gradient4(midpoint)?;
        let valid = primary_valid(g.gx, g.gy, self.seg);
        let decision4 = match criterion {
            Criterion::Midpoint => f_mid4,
            Criterion::ArithmeticMean => {
                let (_, cap) = self.conic.lambda_m(self.seg.s_x, self.seg.s_y);
                f_mid4.checked_add(cap).ok_or(Error::Overflow)?
            }
        };
        let pick = bpos(decision4) ^ self.seg.b_lxy;
        let choice = if !valid {
            None
        } else {
            Some(match kind {
                MKind::M => {
                    if pick {
                        Candidate::B
                    } else {
                        Candidate::C
                    }
                }
                MKind::H => {
                    if pick {
                        Candidate::B
                    } else {
                        Candidate::D
                    }
                }
                MKind::V => {
                    if pick {
                        Candidate::D
                    } else {
                        Candidate::C
                    }
                }
            })
        };
        Ok(Measurement {
            kind,
            midpoint,
            f_mid4,
            gx_mid: g.gx,
            gy_mid: g.gy,
            valid,
            choice,
        })
    }
}

/// Necessary and sufficient validity of a midpoint measurement, from the
/// midpoint gradient and the segment direction booleans. A zero gradient
/// component fails the strict conformality reading and is invalid.
pub fn primary_valid(gx_mid: i128, gy_mid: i128, seg: &MonotonicSegment) -> bool {
    if gx_mid == 0 || gy_mid == 0 {
        return false;
    }
    let b1 = !(seg.b_y() ^ bpos(gy_mid) ^ seg.b_lxy);
    let b2 = seg.b_x() ^ bpos(gx_mid) ^ seg.b_lxy;
    b1 && b2
}

/// Pair points compared by a measurement, in the order the residue
/// difference is taken: `(first, second)` with the checks on `F₂ − F₁`.
fn pair_points(mmt: &Measurement, seg: &MonotonicSegment) -> (HalfPoint, HalfPoint) {
    let (sx, sy) = (seg.s_x, seg.s_y);
    let m = mmt.midpoint;
    match mmt.kind {
        // F_C − F_B
        MKind::M => (m.offset(sx, -sy), m.offset(-sx, sy)),
        // F_D − F_B
        MKind::H => (m.offset(0, -sy), m.offset(0, sy)),
        // F_C − F_D
        MKind::V => (m.offset(sx, 0), m.offset(-sx, 0)),
    }
}

/// Diagnostic: the pair residue difference carries the sign a valid
/// measurement forces. Necessary but not sufficient for validity.
pub fn secondary_check(mmt: &Measurement, conic: &Conic, seg: &MonotonicSegment) -> Result<bool> {
    let (p1, p2) = pair_points(mmt, seg);
    let diff = conic
        .residue4(p2)?
        .checked_sub(conic.residue4(p1)?)
        .ok_or(Error::Overflow)?;
    Ok(bpos(diff) == !seg.b_lxy)
}

/// Diagnostic: `|4λ| < |F₂ − F₁|` for the measurement's pair, exact. A zero
/// residue difference is recorded as a failed check.
pub fn third_check(mmt: &Measurement, conic: &Conic, seg: &MonotonicSegment) -> Result<bool> {
    let (p1, p2) = pair_points(mmt, seg);
    let diff4 = conic
        .residue4(p2)?
        .checked_sub(conic.residue4(p1)?)
        .ok_or(Error::Overflow)?;
    if diff4 == 0 {
        return Ok(false);
    }
    // Pair control factors in units of Δ²: A + B − 2SxSyD for {B,C}, B for
    // {D,B}, A for {C,D}. |4λ| < |ΔF| compares cleared integers |4Λ| < |Δ4F|.
    let cap: i128 = match mmt.kind {
        MKind::M => conic.lambda_m(seg.s_x, seg.s_y).1,
        MKind::H => conic.b() as i128,
        MKind::V => conic.a() as i128,
    };
    let lhs = cap.checked_mul(4).ok_or(Error::Overflow)?;
    Ok(lhs.abs() < diff4.abs())
}

/// Out-of-control fallback: picks the single-axis move that drives the
/// stepper back toward a valid measurement. Applied only when every
/// available measurement is invalid. Returns `(x_move, y_move)`; exactly
/// one is true.
pub fn ooc_rule(conic: &Conic, seg: &MonotonicSegment, f_m4: i128) -> (bool, bool) {
    let (_, cap) = conic.lambda_m(seg.s_x, seg.s_y);
    let b_lambda = if cap == 0 { !bpos(f_m4) } else { bpos(cap) };
    let y_move = b_lambda ^ seg.b_lxy;
    (!y_move, y_move)
}

fn moves_for(c: Candidate) -> (bool, bool) {
    match c {
        Candidate::B => (true, false),
        Candidate::C => (false, true),
        Candidate::D => (true, true),
    }
}

/// Priority decision over the evaluated measurements. A valid measurement
/// always outranks the fallback; D wins whenever no valid measurement
/// rejects it; H→B with V→C leaves B-versus-C to M or, failing that, to the
/// out-of-control rule. Returns a placeholder candidate for fallback rules;
/// the caller substitutes the rule's pick.
fn decide(
    mode: Mode,
    m: &Measurement,
    h: Option<&Measurement>,
    v: Option<&Measurement>,
) -> (Candidate, Rule) {
    let ooc = |rule: Rule| (Candidate::B, rule);
    match mode {
        Mode::Four => {
            if m.valid {
                (m.choice.unwrap(), Rule::MidpointM)
            } else {
                ooc(Rule::OocAllInvalid)
            }
        }
        Mode::Eight => {
            let h = h.expect("8-connected step evaluates H");
            let v = v.expect("8-connected step evaluates V");
            match (h.valid, v.valid) {
                (true, true) => match (h.choice.unwrap(), v.choice.unwrap()) {
                    (Candidate::D, Candidate::D) => (Candidate::D, Rule::BothSelectD),
                    (Candidate::B, Candidate::C) => {
                        if m.valid {
                            (m.choice.unwrap(), Rule::MidpointM)
                        } else {
                            ooc(Rule::OocConflict)
                        }
                    }
                    (Candidate::B, Candidate::D) => (Candidate::B, Rule::Transitive),
                    (Candidate::D, Candidate::C) => (Candidate::C, Rule::Transitive),
                    _ => unreachable!("H picks B or D, V picks C or D"),
                },
                (true, false) => match h.choice.unwrap() {
                    Candidate::D => (Candidate::D, Rule::SingleSelectD),
                    _ => {
                        if m.valid {
                            (m.choice.unwrap(), Rule::MidpointM)
                        } else {
                            ooc(Rule::OocUnresolved)
                        }
                    }
                },
                (false, true) => match v.choice.unwrap() {
                    Candidate::D => (Candidate::D, Rule::SingleSelectD),
                    _ => {
                        if m.valid {
                            (m.choice.unwrap(), Rule::MidpointM)
                        } else {
                            ooc(Rule::OocUnresolved)
                        }
                    }
                },
                (false, false) => {
                    if m.valid {
                        (m.choice.unwrap(), Rule::MidpointM)
                    } else {
                        ooc(Rule::OocAllInvalid)
                    }
                }
            }
        }
    }
}

impl<'a> StepState<'a> {
    /// One full decision step; must not be called at the segment end.
    pub fn step(&mut self, mode: Mode) -> Result<StepTrace> {
        self.step_with(mode, Criterion::Midpoint)
    }

    pub fn step_with(&mut self, mode: Mode, criterion: Criterion) -> Result<StepTrace> {
        let seg = self.seg;
        debug_assert!(self.p_a != seg.end, "step called at segment end");

        let rem_x = (seg.end.u - self.p_a.u) * seg.s_x;
        let rem_y = (seg.end.v - self.p_a.v) * seg.s_y;
        debug_assert!(rem_x >= 0 && rem_y >= 0, "state left the segment span");

        // Boundary walk: once one axis is exhausted only the other advances.
        if rem_x == 0 || rem_y == 0 {
            let chosen = if rem_x == 0 {
                Candidate::C
            } else {
                Candidate::B
            };
            return self.apply(None, None, None, chosen, Rule::Forced, false);
        }

        let m = self.measure_with(MKind::M, criterion)?;
        let (h, v) = match mode {
            Mode::Four => (None, None),
            Mode::Eight => (
                Some(self.measure_with(MKind::H, criterion)?),
                Some(self.measure_with(MKind::V, criterion)?),
            ),
        };

        let (mut chosen, rule) = decide(mode, &m, h.as_ref(), v.as_ref());
        if rule.is_ooc() {
            let decision4 = match criterion {
                Criterion::Midpoint => m.f_mid4,
                Criterion::ArithmeticMean => m
                    .f_mid4
                    .checked_add(self.conic.lambda_m(seg.s_x, seg.s_y).1)
                    .ok_or(Error::Overflow)?,
            };
            let (xm, _) = ooc_rule(self.conic, seg, decision4);
            chosen = if xm { Candidate::B } else { Candidate::C };
        }

        // Potential inaccuracy flag: midpoint and arithmetic-mean signs
        // disagree. Diagnostic only; never alters the choice.
        let cap = self.conic.lambda_m(seg.s_x, seg.s_y).1;
        let f_am4 = m.f_mid4.checked_add(cap).ok_or(Error::Overflow)?;
        let ooa = bpos(m.f_mid4) != bpos(f_am4);

        self.apply(Some(m), h, v, chosen, rule, ooa)
    }

    fn apply(
        &mut self,
        m: Option<Measurement>,
        h: Option<Measurement>,
        v: Option<Measurement>,
        chosen: Candidate,
        rule: Rule,
        potential_ooa: bool,
    ) -> Result<StepTrace> {
        let seg = self.seg;
        let (b, c, d) = self.candidates();
        let from = self.p_a;
        let (x_move, y_move) = moves_for(chosen);
        let to = match chosen {
            Candidate::B => b,
            Candidate::C => c,
            Candidate::D => d,
        };

        // Incremental gradient update for the M-midpoint.
        let (ca, cb, cd) = (
            self.conic.a() as i128,
            self.conic.b() as i128,
            self.conic.d() as i128,
        );
        let (sx, sy) = (seg.s_x as i128, seg.s_y as i128);
        let bx = x_move as i128;
        let by = y_move as i128;
        self.gx_m = self
            .gx_m
            .checked_add(2 * (bx * sx * ca + by * sy * cd))
            .ok_or(Error::Overflow)?;
        self.gy_m = self
            .gy_m
            .checked_add(2 * (bx * sx * cd + by * sy * cb))
            .ok_or(Error::Overflow)?;
        self.p_a = to;
        self.step_count += 1;

        // The incremental values must match a direct evaluation exactly.
        #[cfg(debug_assertions)]
        {
            let g = self.conic.gradient4(self.p_a.offset(seg.s_x, seg.s_y))?;
            debug_assert_eq!(
                (self.gx_m, self.gy_m),
                (g.gx, g.gy),
                "incremental gradient diverged"
            );
        }

        let diag = |mm: &Option<Measurement>| -> Result<(Option<bool>, Option<bool>)> {
            Ok(match mm {
                Some(mm) => (
                    Some(secondary_check(mm, self.conic, seg)?),
                    Some(third_check(mm, self.conic, seg)?),
                ),
                None => (None, None),
            })
        };
        let (sec_m, th_m) = diag(&m)?;
        let (sec_h, th_h) = diag(&h)?;
        let (sec_v, th_v) = diag(&v)?;

        Ok(StepTrace {
            from,
            b,
            c,
            d,
            m,
            h,
            v,
            rule,
            chosen,
            to,
            x_move,
            y_move,
            gx_m_after: self.gx_m,
            gy_m_after: self.gy_m,
            potential_ooa,
            secondary: [sec_m, sec_h, sec_v],
            third: [th_m, th_h, th_v],
        })
    }
}

/// Aggregate counters for one segment run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunStats {
    pub steps: u64,
    pub m_valid: u64,
    pub h_valid: u64,
    pub v_valid: u64,
    pub measurement_steps: u64,
    pub ooc_steps: u64,
    pub forced_steps: u64,
    pub potential_ooa: u64,
}

impl RunStats {
    pub fn absorb(&mut self, other: &RunStats) {
        self.steps += other.steps;
        self.m_valid += other.m_valid;
        self.h_valid += other.h_valid;
        self.v_valid += other.v_valid;
        self.measurement_steps += other.measurement_steps;
        self.ooc_steps += other.ooc_steps;
        self.forced_steps += other.forced_steps;
        self.potential_ooa += other.potential_ooa;
    }
}

#[derive(Debug, Clone)]
pub struct SegmentRun {
    pub points: Vec<HalfPoint>,
    pub stats: RunStats,
    pub traces: Vec<StepTrace>,
}

/// Digitizes one monotonic segment from its start to its end point.
///
/// Every emitted move is 4- or 8-connected and monotone; the walk reaches
/// the end within `(|Δu| + |Δv|)/2 + 4` steps or reports a berserk run.
pub fn run_segment(conic: &Conic, seg: &MonotonicSegment, mode: Mode) -> Result<SegmentRun> {
    run_segment_with(conic, seg, mode, Criterion::Midpoint)
}

pub fn run_segment_with(
    conic: &Conic,
    seg: &MonotonicSegment,
    mode: Mode,
    criterion: Criterion,
) -> Result<SegmentRun> {
    let mut state = StepState::new(conic, seg)?;
    let (span_x, span_y) = seg.grid_span();
    let budget = (span_x + span_y) as u64 + 4;

    let mut points = vec![seg.start];
    let mut traces = Vec::new();
    let mut stats = RunStats::default();

    while state.p_a != seg.end {
        if stats.steps >= budget {
            return Err(Error::StepBudgetExceeded(stats.steps));
        }
        let trace = state.step_with(mode, criterion)?;
        stats.steps += 1;
        match trace.rule {
            Rule::Forced => stats.forced_steps += 1,
            r if r.is_ooc() => stats.ooc_steps += 1,
            _ => stats.measurement_steps += 1,
        }
        stats.m_valid += trace.m.is_some_and(|m| m.valid) as u64;
        stats.h_valid += trace.h.is_some_and(|m| m.valid) as u64;
        stats.v_valid += trace.v.is_some_and(|m| m.valid) as u64;
        stats.potential_ooa += trace.potential_ooa as u64;
        points.push(trace.to);
        traces.push(trace);
    }

    Ok(SegmentRun {
        points,
        stats,
        traces,
    })
}
