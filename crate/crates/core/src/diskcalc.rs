//! Disk diagrams of strict-immersion strata and the Area invariant.
//!
//! A diagram lists the strata of a generic capping disk: closed curves and arcs ending on the
//! boundary circle, each with a cusp count, plus the cyclic order of the signed boundary points.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    fn value(self) -> i32 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if *self == Sign::Plus { "+" } else { "-" })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BoundaryPoint {
    pub sign: Sign,
    /// Index in the cyclic order of boundary points.
    pub position: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CurveKind {
    Closed,
    Arc,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StratumCurve {
    pub kind: CurveKind,
    pub cusps: usize,
    pub endpoints: Option<[BoundaryPoint; 2]>,
    /// Marked zeros of the area function, if known.
    pub zeros: Option<usize>,
}

impl StratumCurve {
    pub fn closed(cusps: usize) -> Self {
        StratumCurve { kind: CurveKind::Closed, cusps, endpoints: None, zeros: None }
    }

    pub fn arc(a: BoundaryPoint, b: BoundaryPoint, cusps: usize) -> Self {
        StratumCurve { kind: CurveKind::Arc, cusps, endpoints: Some([a, b]), zeros: None }
    }

    /// No disk of horizontal embeddings extends this stratum.
    pub fn is_obstructed(&self) -> bool {
        let odd = self.cusps % 2 == 1;
        match self.endpoints {
            None => odd,
            Some([a, b]) => {
                let parity = if odd { -1 } else { 1 };
                a.sign.value() * b.sign.value() * parity == -1
            }
        }
    }

    fn chord(&self) -> Option<(usize, usize)> {
        self.endpoints.map(|[a, b]| (a.position.min(b.position), a.position.max(b.position)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct DiskDiagram {
    pub curves: Vec<StratumCurve>,
    /// Pairs of curves declared to meet transversally, as (i, j) with i < j.
    pub crossings: BTreeSet<(usize, usize)>,
}

fn interlaced(a: (usize, usize), b: (usize, usize)) -> bool {
    let inside = |p: usize| a.0 < p && p < a.1;
    inside(b.0) != inside(b.1)
}

fn pair(i: usize, j: usize) -> (usize, usize) {
    (i.min(j), i.max(j))
}

impl DiskDiagram {
    pub fn new(curves: Vec<StratumCurve>) -> Self {
        DiskDiagram { curves, crossings: BTreeSet::new() }
    }

    pub fn boundary_count(&self) -> usize {
        self.curves.iter().filter(|c| c.endpoints.is_some()).count() * 2
    }

    /// Boundary points in cyclic order, with the index of the owning curve.
    pub fn boundary_order(&self) -> Vec<(BoundaryPoint, usize)> {
        let mut pts: Vec<(BoundaryPoint, usize)> = self
            .curves
            .iter()
            .enumerate()
            .flat_map(|(i, c)| c.endpoints.into_iter().flatten().map(move |p| (p, i)))
            .collect();
        pts.sort_by_key(|(p, _)| p.position);
        pts
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::MoveNotApplicable(m));
        for (i, c) in self.curves.iter().enumerate() {
            match (c.kind, c.endpoints) {
                (CurveKind::Closed, Some(_)) => return bad(format!("closed curve {i} has endpoints")),
                (CurveKind::Arc, None) => return bad(format!("arc {i} has no endpoints")),
                _ => {}
            }
        }
        let m = self.boundary_count();
        let mut seen = vec![false; m];
        for (p, _) in self.boundary_order() {
            if p.position >= m || seen[p.position] {
                return bad(format!("boundary positions are not a permutation of 0..{m}"));
            }
            seen[p.position] = true;
        }
        for &(i, j) in &self.crossings {
            if i >= j || j >= self.curves.len() {
                return bad(format!("crossing ({i}, {j}) does not name two curves"));
            }
        }
        let chords: Vec<(usize, Option<(usize, usize)>)> =
            self.curves.iter().map(|c| c.chord()).enumerate().collect();
        for (i, a) in &chords {
            for (j, b) in &chords {
                if i < j {
                    if let (Some(a), Some(b)) = (a, b) {
                        if interlaced(*a, *b) && !self.crossings.contains(&(*i, *j)) {
                            return bad(format!("arcs {i} and {j} interlace without a declared crossing"));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn cusp_total(&self) -> usize {
        self.curves.iter().map(|c| c.cusps).sum()
    }

    fn positive_points(&self) -> usize {
        self.boundary_order().iter().filter(|(p, _)| p.sign == Sign::Plus).count()
    }

    fn remove_curve(&mut self, k: usize) -> StratumCurve {
        let c = self.curves.remove(k);
        let shift = |i: usize| if i > k { i - 1 } else { i };
        self.crossings = self
            .crossings
            .iter()
            .filter(|&&(i, j)| i != k && j != k)
            .map(|&(i, j)| (shift(i), shift(j)))
            .collect();
        if let Some(ch) = c.chord() {
            for cv in &mut self.curves {
                if let Some(ends) = &mut cv.endpoints {
                    for e in ends.iter_mut() {
                        e.position -= (e.position > ch.0) as usize + (e.position > ch.1) as usize;
                    }
                }
            }
        }
        c
    }

    fn partners(&self, k: usize) -> Vec<usize> {
        self.crossings
            .iter()
            .filter_map(|&(i, j)| if i == k { Some(j) } else if j == k { Some(i) } else { None })
            .collect()
    }
}

/// (#positive boundary points + #cusps) mod 2.
pub fn area_invariant(d: &DiskDiagram) -> u8 {
    ((d.positive_points() + d.cusp_total()) % 2) as u8
}

/// Indices of curves that cannot be lifted to a disk of horizontal embeddings.
pub fn obstructed_curves(d: &DiskDiagram) -> Vec<usize> {
    d.curves.iter().enumerate().filter(|(_, c)| c.is_obstructed()).map(|(i, _)| i).collect()
}

/// Parity of the number of strict horizontal immersions forced in the disk.
pub fn min_zero_parity(d: &DiskDiagram) -> u8 {
    (obstructed_curves(d).len() % 2) as u8
}

/// The capping disk of the area twist loop: one arc from + to − with no cusps, one zero.
pub fn area_twist_disk() -> DiskDiagram {
    let mut arc = StratumCurve::arc(
        BoundaryPoint { sign: Sign::Plus, position: 0 },
        BoundaryPoint { sign: Sign::Minus, position: 1 },
        0,
    );
    arc.zeros = Some(1);
    DiskDiagram::new(vec![arc])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Move {
    E1,
    E2,
    E3,
    E4,
    E5,
    E6,
    E7,
}

impl Move {
    pub const ALL: [Move; 7] = [Move::E1, Move::E2, Move::E3, Move::E4, Move::E5, Move::E6, Move::E7];
}

/// A move together with the place it acts on.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Change {
    /// E1: a cusp-free closed curve appears.
    ClosedBirth,
    /// E1: a cusp-free closed curve without crossings disappears.
    ClosedDeath { curve: usize },
    /// E2: two cusps appear on a curve.
    CuspPairBirth { curve: usize },
    /// E2: two cusps on a curve cancel.
    CuspPairDeath { curve: usize },
    /// E3: two closed curves merge through a saddle.
    SaddleMerge { a: usize, b: usize },
    /// E3: a closed curve splits in two, the first keeping `cusps`.
    SaddleSplit { curve: usize, cusps: usize },
    /// E3: two arcs exchange endpoints through a saddle. `cross` pairs first ends with second
    /// ends crosswise; `cusps` go to the arc through the first endpoint of `a`.
    SaddleReconnect { a: usize, b: usize, cross: bool, cusps: usize },
    /// E4: an arc with both endpoints of sign `sign` is born inside the boundary, just before
    /// position `at`.
    BoundaryBirth { at: usize, sign: Sign },
    /// E4: a cusp-free arc with equal signs on adjacent boundary points leaves the disk.
    BoundaryDeath { curve: usize },
    /// E5: a cusp leaves the disk through endpoint `end`, flipping its sign.
    CuspExit { curve: usize, end: usize },
    /// E5: a cusp enters the disk through endpoint `end`, flipping its sign.
    CuspEntry { curve: usize, end: usize },
    /// E6: two strata start crossing.
    CrossingBirth { a: usize, b: usize },
    /// E6: two strata stop crossing.
    CrossingDeath { a: usize, b: usize },
    /// E7: a closed curve merges into an arc.
    AbsorbClosed { arc: usize, closed: usize },
    /// E7: a closed curve with `cusps` cusps splits off an arc.
    ShedClosed { arc: usize, cusps: usize },
}

impl Change {
    pub fn kind(&self) -> Move {
        use Change::*;
        match self {
            ClosedBirth | ClosedDeath { .. } => Move::E1,
            CuspPairBirth { .. } | CuspPairDeath { .. } => Move::E2,
            SaddleMerge { .. } | SaddleSplit { .. } | SaddleReconnect { .. } => Move::E3,
            BoundaryBirth { .. } | BoundaryDeath { .. } => Move::E4,
            CuspExit { .. } | CuspEntry { .. } => Move::E5,
            CrossingBirth { .. } | CrossingDeath { .. } => Move::E6,
            AbsorbClosed { .. } | ShedClosed { .. } => Move::E7,
        }
    }
}

fn not_applicable<T>(c: &Change, why: &str) -> Result<T> {
    Err(Error::MoveNotApplicable(format!("{c:?}: {why}")))
}

/// Applies one elementary change; the result is validated.
pub fn elementary_change(d: &DiskDiagram, change: &Change) -> Result<DiskDiagram> {
    d.validate()?;
    let mut out = d.clone();
    let n = d.curves.len();
    let curve = |i: usize| -> Result<&StratumCurve> {
        d.curves.get(i).ok_or_else(|| Error::MoveNotApplicable(format!("{change:?}: no curve {i}")))
    };
    match *change {
        Change::ClosedBirth => out.curves.push(StratumCurve::closed(0)),
        Change::ClosedDeath { curve: k } => {
            let c = curve(k)?;
            if c.kind != CurveKind::Closed || c.cusps != 0 || !d.partners(k).is_empty() {
                return not_applicable(change, "needs a cusp-free closed curve without crossings");
            }
            out.remove_curve(k);
        }
        Change::CuspPairBirth { curve: k } => {
            curve(k)?;
            out.curves[k].cusps += 2;
            out.curves[k].zeros = None;
        }
        Change::CuspPairDeath { curve: k } => {
            if curve(k)?.cusps < 2 {
                return not_applicable(change, "fewer than two cusps");
            }
            out.curves[k].cusps -= 2;
            out.curves[k].zeros = None;
        }
        Change::SaddleMerge { a, b } => {
            let (ca, cb) = (curve(a)?, curve(b)?);
            if a == b || ca.kind != CurveKind::Closed || cb.kind != CurveKind::Closed {
                return not_applicable(change, "needs two distinct closed curves");
            }
            let cusps = ca.cusps + cb.cusps;
            let inherited = d.partners(b);
            let (keep, drop) = (a.min(b), a.max(b));
            for p in inherited.into_iter().chain(d.partners(a)) {
                if p != a && p != b {
                    out.crossings.insert(pair(keep, p));
                }
            }
            out.curves[keep] = StratumCurve::closed(cusps);
            out.remove_curve(drop);
        }
        Change::SaddleSplit { curve: k, cusps } => {
            let c = curve(k)?;
            if c.kind != CurveKind::Closed || cusps > c.cusps {
                return not_applicable(change, "needs a closed curve with enough cusps");
            }
            out.curves[k] = StratumCurve::closed(cusps);
            out.curves.push(StratumCurve::closed(c.cusps - cusps));
        }
        Change::SaddleReconnect { a, b, cross, cusps } => {
            let (ca, cb) = (curve(a)?, curve(b)?);
            let (Some([a0, a1]), Some([b0, b1])) = (ca.endpoints, cb.endpoints) else {
                return not_applicable(change, "needs two arcs");
            };
            let total = ca.cusps + cb.cusps;
            if a == b || cusps > total {
                return not_applicable(change, "needs two distinct arcs and a valid cusp split");
            }
            let (first, second) = if cross { ([a0, b1], [a1, b0]) } else { ([a0, b0], [a1, b1]) };
            out.curves[a] = StratumCurve::arc(first[0], first[1], cusps);
            out.curves[b] = StratumCurve::arc(second[0], second[1], total - cusps);
            let others: BTreeSet<usize> =
                d.partners(a).into_iter().chain(d.partners(b)).filter(|&p| p != a && p != b).collect();
            for p in others {
                out.crossings.insert(pair(a, p));
                out.crossings.insert(pair(b, p));
            }
            let (na, nb) = (out.curves[a].chord().unwrap(), out.curves[b].chord().unwrap());
            if interlaced(na, nb) && !d.crossings.contains(&pair(a, b)) {
                return not_applicable(change, "the reconnected arcs would have to cross");
            }
        }
        Change::BoundaryBirth { at, sign } => {
            let m = d.boundary_count();
            if at > m {
                return not_applicable(change, "position out of range");
            }
            for c in &mut out.curves {
                if let Some(ends) = &mut c.endpoints {
                    for e in ends.iter_mut() {
                        if e.position >= at {
                            e.position += 2;
                        }
                    }
                }
            }
            out.curves.push(StratumCurve::arc(
                BoundaryPoint { sign, position: at },
                BoundaryPoint { sign, position: at + 1 },
                0,
            ));
        }
        Change::BoundaryDeath { curve: k } => {
            let c = curve(k)?;
            let m = d.boundary_count();
            let Some([e0, e1]) = c.endpoints else {
                return not_applicable(change, "needs an arc");
            };
            let (lo, hi) = (e0.position.min(e1.position), e0.position.max(e1.position));
            let adjacent = hi - lo == 1 || (lo == 0 && hi == m - 1);
            if e0.sign != e1.sign || c.cusps != 0 || !adjacent || !d.partners(k).is_empty() {
                return not_applicable(change, "needs a cusp-free arc with equal signs on adjacent points");
            }
            out.remove_curve(k);
        }
        Change::CuspExit { curve: k, end } | Change::CuspEntry { curve: k, end } => {
            let c = curve(k)?;
            let exit = matches!(change, Change::CuspExit { .. });
            if c.endpoints.is_none() || end > 1 || (exit && c.cusps == 0) {
                return not_applicable(change, "needs an arc endpoint and, to exit, a cusp");
            }
            let cv = &mut out.curves[k];
            cv.cusps = if exit { cv.cusps - 1 } else { cv.cusps + 1 };
            let ends = cv.endpoints.as_mut().unwrap();
            ends[end].sign = ends[end].sign.flip();
            cv.zeros = None;
        }
        Change::CrossingBirth { a, b } => {
            if a == b || a >= n || b >= n || d.crossings.contains(&pair(a, b)) {
                return not_applicable(change, "needs two distinct curves not yet crossing");
            }
            out.crossings.insert(pair(a, b));
        }
        Change::CrossingDeath { a, b } => {
            if !d.crossings.contains(&pair(a, b)) {
                return not_applicable(change, "curves do not cross");
            }
            if let (Some(x), Some(y)) = (d.curves[a].chord(), d.curves[b].chord()) {
                if interlaced(x, y) {
                    return not_applicable(change, "interlaced arcs must cross");
                }
            }
            out.crossings.remove(&pair(a, b));
        }
        Change::AbsorbClosed { arc, closed } => {
            let (ca, cc) = (curve(arc)?, curve(closed)?);
            if ca.kind != CurveKind::Arc || cc.kind != CurveKind::Closed {
                return not_applicable(change, "needs an arc and a closed curve");
            }
            out.curves[arc].cusps += cc.cusps;
            out.curves[arc].zeros = None;
            for p in d.partners(closed) {
                if p != arc {
                    out.crossings.insert(pair(arc, p));
                }
            }
            out.remove_curve(closed);
        }
        Change::ShedClosed { arc, cusps } => {
            let ca = curve(arc)?;
            if ca.kind != CurveKind::Arc || cusps > ca.cusps {
                return not_applicable(change, "needs an arc with enough cusps");
            }
            out.curves[arc].cusps -= cusps;
            out.curves[arc].zeros = None;
            out.curves.push(StratumCurve::closed(cusps));
        }
    }
    out.validate()?;
    Ok(out)
}

/// Every change of the given kind that is applicable to `d`.
pub fn sites(d: &DiskDiagram, mv: Move) -> Vec<Change> {
    let n = d.curves.len();
    let idx = 0..n;
    let mut cands: Vec<Change> = Vec::new();
    match mv {
        Move::E1 => {
            cands.push(Change::ClosedBirth);
            cands.extend(idx.map(|k| Change::ClosedDeath { curve: k }));
        }
        Move::E2 => {
            for k in idx {
                cands.push(Change::CuspPairBirth { curve: k });
                cands.push(Change::CuspPairDeath { curve: k });
            }
        }
        Move::E3 => {
            for a in 0..n {
                for b in 0..n {
                    if a < b {
                        cands.push(Change::SaddleMerge { a, b });
                        let total = d.curves[a].cusps + d.curves[b].cusps;
                        for cross in [false, true] {
                            for cusps in 0..=total {
                                cands.push(Change::SaddleReconnect { a, b, cross, cusps });
                            }
                        }
                    }
                }
                for cusps in 0..=d.curves[a].cusps {
                    cands.push(Change::SaddleSplit { curve: a, cusps });
                }
            }
        }
        Move::E4 => {
            for at in 0..=d.boundary_count() {
                for sign in [Sign::Plus, Sign::Minus] {
                    cands.push(Change::BoundaryBirth { at, sign });
                }
            }
            cands.extend(idx.map(|k| Change::BoundaryDeath { curve: k }));
        }
        Move::E5 => {
            for k in idx {
                for end in 0..2 {
                    cands.push(Change::CuspExit { curve: k, end });
                    cands.push(Change::CuspEntry { curve: k, end });
                }
            }
        }
        Move::E6 => {
            for a in 0..n {
                for b in a + 1..n {
                    cands.push(Change::CrossingBirth { a, b });
                    cands.push(Change::CrossingDeath { a, b });
                }
            }
        }
        Move::E7 => {
            for a in 0..n {
                for b in 0..n {
                    cands.push(Change::AbsorbClosed { arc: a, closed: b });
                }
                for cusps in 0..=d.curves[a].cusps {
                    cands.push(Change::ShedClosed { arc: a, cusps });
                }
            }
        }
    }
    cands.into_iter().filter(|c| elementary_change(d, c).is_ok()).collect()
}

/// Every diagram of up to `max_curves` non-crossing curves, each closed or an arc with a sign
/// pair and at most `max_cusps` cusps, up to reordering of the curves.
pub fn enumerate_diagrams(max_curves: usize, max_cusps: usize) -> Vec<DiskDiagram> {
    let signs = [Sign::Plus, Sign::Minus];
    let mut shapes: Vec<(Option<(Sign, Sign)>, usize)> = Vec::new();
    for c in 0..=max_cusps {
        shapes.push((None, c));
        for s0 in signs {
            for s1 in signs {
                shapes.push((Some((s0, s1)), c));
            }
        }
    }
    let mut out = vec![DiskDiagram::default()];
    let mut layer: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..max_curves {
        let mut next = Vec::new();
        for combo in &layer {
            let start = combo.last().copied().unwrap_or(0);
            for s in start..shapes.len() {
                let mut c = combo.clone();
                c.push(s);
                next.push(c);
            }
        }
        for combo in &next {
            let mut pos = 0;
            let curves = combo
                .iter()
                .map(|&s| match shapes[s] {
                    (None, c) => StratumCurve::closed(c),
                    (Some((s0, s1)), c) => {
                        let a = BoundaryPoint { sign: s0, position: pos };
                        let b = BoundaryPoint { sign: s1, position: pos + 1 };
                        pos += 2;
                        StratumCurve::arc(a, b, c)
                    }
                })
                .collect();
            out.push(DiskDiagram::new(curves));
        }
        layer = next;
    }
    out
}

/// A valid diagram with at most `size` curves, deterministic in `seed`.
pub fn random_diagram(seed: u64, size: usize) -> DiskDiagram {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let count = if size == 0 { 0 } else { rng.gen_range(0..=size) };
    let kinds: Vec<bool> = (0..count).map(|_| rng.gen_bool(0.6)).collect();
    let arcs = kinds.iter().filter(|&&a| a).count();
    let mut slots: Vec<usize> = (0..2 * arcs).collect();
    for i in (1..slots.len()).rev() {
        let j = rng.gen_range(0..=i);
        slots.swap(i, j);
    }
    let mut next = 0;
    let mut curves = Vec::with_capacity(count);
    for is_arc in kinds {
        let cusps = rng.gen_range(0..=4);
        if is_arc {
            let mut end = |rng: &mut ChaCha8Rng| {
                let sign = if rng.gen_bool(0.5) { Sign::Plus } else { Sign::Minus };
                let p = BoundaryPoint { sign, position: slots[next] };
                next += 1;
                p
            };
            let (a, b) = (end(&mut rng), end(&mut rng));
            curves.push(StratumCurve::arc(a, b, cusps));
        } else {
            curves.push(StratumCurve::closed(cusps));
        }
    }
    let mut d = DiskDiagram::new(curves);
    for i in 0..count {
        for j in i + 1..count {
            let forced = match (d.curves[i].chord(), d.curves[j].chord()) {
                (Some(a), Some(b)) => interlaced(a, b),
                _ => false,
            };
            if forced || rng.gen_bool(0.1) {
                d.crossings.insert((i, j));
            }
        }
    }
    d
}

impl fmt::Display for DiskDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.curves {
            match c.endpoints {
                None => write!(f, "closed c={}", c.cusps)?,
                Some([a, b]) => write!(f, "arc {}{} {}{} c={}", a.sign, a.position, b.sign, b.position, c.cusps)?,
            }
            if let Some(z) = c.zeros {
                write!(f, " z={z}")?;
            }
            writeln!(f)?;
        }
        for (i, j) in &self.crossings {
            writeln!(f, "cross {i} {j}")?;
        }
        Ok(())
    }
}

fn parse_count(tok: &str, key: &str, line: usize) -> Result<usize> {
    tok.strip_prefix(key)
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| Error::Parse { line, msg: format!("expected {key}<count>, got {tok:?}") })
}

fn parse_point(tok: &str, line: usize) -> Result<BoundaryPoint> {
    let sign = match tok.chars().next() {
        Some('+') => Sign::Plus,
        Some('-') => Sign::Minus,
        _ => return Err(Error::Parse { line, msg: format!("boundary point needs a sign: {tok:?}") }),
    };
    let position = tok[1..]
        .parse()
        .map_err(|_| Error::Parse { line, msg: format!("bad boundary position in {tok:?}") })?;
    Ok(BoundaryPoint { sign, position })
}

impl FromStr for DiskDiagram {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut d = DiskDiagram::default();
        for (k, raw) in s.lines().enumerate() {
            let line = k + 1;
            let text = raw.split('#').next().unwrap().trim();
            if text.is_empty() {
                continue;
            }
            let toks: Vec<&str> = text.split_whitespace().collect();
            let (curve, rest) = match toks[0] {
                "closed" => (StratumCurve::closed(parse_count(toks.get(1).copied().unwrap_or(""), "c=", line)?), &toks[2..]),
                "arc" => {
                    if toks.len() < 4 {
                        return Err(Error::Parse { line, msg: "arc needs two boundary points and c=".into() });
                    }
                    let a = parse_point(toks[1], line)?;
                    let b = parse_point(toks[2], line)?;
                    (StratumCurve::arc(a, b, parse_count(toks[3], "c=", line)?), &toks[4..])
                }
                "cross" => {
                    let num = |t: Option<&&str>| -> Result<usize> {
                        t.and_then(|v| v.parse().ok())
                            .ok_or_else(|| Error::Parse { line, msg: "cross needs two curve indices".into() })
                    };
                    let (i, j) = (num(toks.get(1))?, num(toks.get(2))?);
                    if i == j {
                        return Err(Error::Parse { line, msg: "a curve cannot cross itself here".into() });
                    }
                    d.crossings.insert(pair(i, j));
                    continue;
                }
                other => return Err(Error::Parse { line, msg: format!("unknown entry {other:?}") }),
            };
            let mut curve = curve;
            match rest {
                [] => {}
                [z] => curve.zeros = Some(parse_count(z, "z=", line)?),
                _ => return Err(Error::Parse { line, msg: "trailing tokens".into() }),
            }
            d.curves.push(curve);
        }
        d.validate().map_err(|e| Error::Parse { line: 0, msg: e.to_string() })?;
        Ok(d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arc(s0: Sign, s1: Sign, c: usize) -> DiskDiagram {
        DiskDiagram::new(vec![StratumCurve::arc(
            BoundaryPoint { sign: s0, position: 0 },
            BoundaryPoint { sign: s1, position: 1 },
            c,
        )])
    }

    #[test]
    fn small_examples() {
        use Sign::*;
        assert_eq!(area_invariant(&DiskDiagram::default()), 0);
        assert_eq!(area_invariant(&arc(Plus, Minus, 0)), 1);
        assert_eq!(obstructed_curves(&arc(Plus, Plus, 1)), vec![0]);
        assert!(obstructed_curves(&arc(Plus, Minus, 1)).is_empty());
        assert_eq!(obstructed_curves(&DiskDiagram::new(vec![StratumCurve::closed(3)])), vec![0]);
        let two = "arc +0 -1 c=0\narc +2 -3 c=0\n".parse::<DiskDiagram>().unwrap();
        assert_eq!(area_invariant(&two), 0);
    }

    #[test]
    fn cusp_exit_example() {
        let d = arc(Sign::Plus, Sign::Plus, 1);
        let e = elementary_change(&d, &Change::CuspExit { curve: 0, end: 1 }).unwrap();
        assert_eq!(e.curves[0].cusps, 0);
        assert_eq!(e.curves[0].endpoints.unwrap()[1].sign, Sign::Minus);
        assert_eq!(area_invariant(&e), area_invariant(&d));
    }

    #[test]
    fn text_roundtrip() {
        for seed in 0..50 {
            let d = random_diagram(seed, 5);
            let back: DiskDiagram = d.to_string().parse().unwrap();
            assert_eq!(back, d);
        }
        let t = area_twist_disk();
        assert_eq!(t.to_string(), "arc +0 -1 c=0 z=1\n");
    }

    #[test]
    fn interlaced_arcs_need_a_crossing() {
        let bad = "arc +0 +2 c=0\narc -1 -3 c=0\n".parse::<DiskDiagram>();
        assert!(bad.is_err());
        let ok = "arc +0 +2 c=0\narc -1 -3 c=0\ncross 0 1\n".parse::<DiskDiagram>().unwrap();
        assert!(elementary_change(&ok, &Change::CrossingDeath { a: 0, b: 1 }).is_err());
    }

    #[test]
    fn boundary_birth_and_death_are_inverse() {
        let d = arc(Sign::Plus, Sign::Minus, 2);
        let b = elementary_change(&d, &Change::BoundaryBirth { at: 1, sign: Sign::Minus }).unwrap();
        assert_eq!(b.boundary_count(), 4);
        let back = elementary_change(&b, &Change::BoundaryDeath { curve: 1 }).unwrap();
        assert_eq!(back, d);
    }
}
