//! Socio-spatial coding: nearest-centroid space assignment, prefixed action
//! codes and per-second binary timelines.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::timeline::TimelineMatrix;
use crate::types::{ActionTaxonomy, BoundingBox, FrameRecord, SpaceCentroid, SpaceMap, Zone, FILTERED_CODE};

/// How detections in the distraction zone are coded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DistractionPolicy {
    /// Coded like any secondary space (`sec_`).
    #[default]
    Secondary,
    /// Coded with its own `dist_` prefix.
    Isolated,
}

const PRIMARY_BASES: [&str; 6] = [
    "Using_Computer",
    "Doc/Note_Interaction",
    "Using_Phone",
    "Medi/Equip_Interaction",
    "Patient_Interaction",
    "Other",
];
const SECONDARY_BASES: [&str; 5] = [
    "Using_Computer",
    "Doc/Note_Interaction",
    "Medi/Equip_Interaction",
    "Patient_Interaction",
    "Other",
];

/// Closed, ordered set of spatial action codes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpatialCodeSet {
    codes: Vec<String>,
}

impl SpatialCodeSet {
    pub fn new(codes: Vec<String>) -> Result<Self> {
        if codes.is_empty() {
            return Err(Error::validation("spatial code set must not be empty"));
        }
        for (i, c) in codes.iter().enumerate() {
            if codes[..i].contains(c) {
                return Err(Error::validation(format!("duplicate spatial code '{c}'")));
            }
        }
        Ok(SpatialCodeSet { codes })
    }

    pub fn for_policy(policy: DistractionPolicy) -> Self {
        let mut codes: Vec<String> = PRIMARY_BASES
            .iter()
            .map(|b| format!("prim_{b}"))
            .chain(SECONDARY_BASES.iter().map(|b| format!("sec_{b}")))
            .collect();
        if policy == DistractionPolicy::Isolated {
            codes.extend(SECONDARY_BASES.iter().map(|b| format!("dist_{b}")));
        }
        SpatialCodeSet { codes }
    }

    pub fn codes(&self) -> &[String] {
        &self.codes
    }

    pub fn index_of(&self, code: &str) -> Option<usize> {
        self.codes.iter().position(|c| c == code)
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }
}

impl Default for SpatialCodeSet {
    fn default() -> Self {
        SpatialCodeSet::for_policy(DistractionPolicy::Secondary)
    }
}

/// Centroid nearest to the box midpoint; the earliest centroid wins ties.
pub fn assign_space<'m>(bbox: &BoundingBox, map: &'m SpaceMap) -> &'m SpaceCentroid {
    let (mx, my) = bbox.midpoint();
    let mut best = &map.centroids()[0];
    let mut best_d = f64::INFINITY;
    for c in map.centroids() {
        let d = (c.x - mx).powi(2) + (c.y - my).powi(2);
        if d < best_d {
            best_d = d;
            best = c;
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase", tag = "kind", content = "code")]
pub enum SpatialOutcome {
    Code(String),
    Filtered,
}

fn zone_prefix(zone: Zone, policy: DistractionPolicy) -> &'static str {
    match zone {
        Zone::Primary => "prim",
        Zone::Secondary | Zone::Transition => "sec",
        Zone::Distraction => match policy {
            DistractionPolicy::Secondary => "sec",
            DistractionPolicy::Isolated => "dist",
        },
    }
}

/// Spatial code for an action observed in a zone.
///
/// The filtered code yields [`SpatialOutcome::Filtered`]. Transition zones and
/// combinations missing from the code set collapse to the zone's `Other`.
pub fn spatial_code(
    action: &str,
    zone: Zone,
    taxonomy: &ActionTaxonomy,
    codes: &SpatialCodeSet,
    policy: DistractionPolicy,
) -> Result<SpatialOutcome> {
    if !taxonomy.contains(action) {
        return Err(Error::validation(format!("unknown action code '{action}'")));
    }
    if action == FILTERED_CODE {
        return Ok(SpatialOutcome::Filtered);
    }
    let prefix = zone_prefix(zone, policy);
    let other = format!("{prefix}_Other");
    if zone != Zone::Transition {
        let code = format!("{prefix}_{}", action.replace(' ', "_"));
        if codes.index_of(&code).is_some() {
            return Ok(SpatialOutcome::Code(code));
        }
    }
    if codes.index_of(&other).is_some() {
        Ok(SpatialOutcome::Code(other))
    } else {
        Err(Error::validation(format!("spatial code set has no '{other}' fallback")))
    }
}

/// Everything needed to turn detections into spatial codes.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialContext {
    pub map: SpaceMap,
    pub codes: SpatialCodeSet,
    pub policy: DistractionPolicy,
}

impl SpatialContext {
    pub fn new(map: SpaceMap, codes: SpatialCodeSet, policy: DistractionPolicy) -> Self {
        SpatialContext { map, codes, policy }
    }

    pub fn code_detection(&self, label: &str, bbox: &BoundingBox, taxonomy: &ActionTaxonomy) -> Result<(&SpaceCentroid, SpatialOutcome)> {
        let space = assign_space(bbox, &self.map);
        let outcome = spatial_code(label, space.zone, taxonomy, &self.codes, self.policy)?;
        Ok((space, outcome))
    }
}

#[derive(Debug, Clone, Copy)]
pub enum CodingMode<'a> {
    Plain,
    Spatial(&'a SpatialContext),
}

impl CodingMode<'_> {
    pub fn name(&self) -> &'static str {
        match self {
            CodingMode::Plain => "plain",
            CodingMode::Spatial(_) => "spatial",
        }
    }
}

/// Column codes of a timeline built in `mode`.
pub fn timeline_codes(taxonomy: &ActionTaxonomy, mode: CodingMode<'_>) -> Vec<String> {
    match mode {
        CodingMode::Plain => taxonomy.codes().iter().filter(|c| *c != FILTERED_CODE).cloned().collect(),
        CodingMode::Spatial(ctx) => ctx.codes.codes().to_vec(),
    }
}

/// Per-second binary timeline of one session.
///
/// A code is active in second `s` when any detection in any frame with
/// `floor(t) == s` carries it. Seconds without frames are all-zero rows.
pub fn build_timeline(frames: &[FrameRecord], taxonomy: &ActionTaxonomy, mode: CodingMode<'_>) -> Result<TimelineMatrix> {
    let first = frames
        .first()
        .ok_or_else(|| Error::invalid("cannot build a timeline from zero frames"))?;
    if let Some(other) = frames.iter().find(|f| f.session_id != first.session_id) {
        return Err(Error::invalid(format!(
            "timeline frames span sessions '{}' and '{}'",
            first.session_id, other.session_id
        )));
    }
    let seconds: Vec<i64> = frames.iter().map(|f| f.t.floor() as i64).collect();
    let t0 = *seconds.iter().min().expect("non-empty");
    let t1 = *seconds.iter().max().expect("non-empty") + 1;
    let codes = timeline_codes(taxonomy, mode);
    let mut timeline = TimelineMatrix::zeros(first.session_id.clone(), t0, (t1 - t0) as usize, codes);

    for (frame, &s) in frames.iter().zip(&seconds) {
        let row = (s - t0) as usize;
        for d in &frame.detections {
            if !taxonomy.contains(&d.label) {
                return Err(Error::validation(format!("unknown action code '{}'", d.label)));
            }
            let code = match mode {
                CodingMode::Plain if d.label == FILTERED_CODE => continue,
                CodingMode::Plain => d.label.clone(),
                CodingMode::Spatial(ctx) => match ctx.code_detection(&d.label, &d.bbox, taxonomy)?.1 {
                    SpatialOutcome::Code(c) => c,
                    SpatialOutcome::Filtered => continue,
                },
            };
            let col = timeline
                .code_index(&code)
                .ok_or_else(|| Error::validation(format!("code '{code}' has no timeline column")))?;
            timeline.set(row, col, true);
        }
    }
    Ok(timeline)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::Detection;
    use proptest::prelude::*;

    fn centroid(name: &str, x: f64, y: f64, zone: Zone) -> SpaceCentroid {
        SpaceCentroid {
            name: name.into(),
            x,
            y,
            zone,
        }
    }

    fn bx(x1: f64, y1: f64, x2: f64, y2: f64) -> BoundingBox {
        BoundingBox::new(x1, y1, x2, y2).unwrap()
    }

    fn test_map() -> SpaceMap {
        SpaceMap::new(vec![
            centroid("bed4", 100.0, 100.0, Zone::Primary),
            centroid("bed1", 400.0, 100.0, Zone::Secondary),
            centroid("bed3", 400.0, 400.0, Zone::Distraction),
            centroid("door", 100.0, 400.0, Zone::Transition),
        ])
        .unwrap()
    }

    #[test]
    fn default_code_set_has_eleven_codes() {
        let s = SpatialCodeSet::default();
        assert_eq!(s.len(), 11);
        assert_eq!(s.codes().iter().filter(|c| c.starts_with("prim_")).count(), 6);
        assert!(s.index_of("prim_Using_Phone").is_some());
        assert!(s.index_of("sec_Using_Phone").is_none());
        assert_eq!(SpatialCodeSet::for_policy(DistractionPolicy::Isolated).len(), 16);
    }

    #[test]
    fn assign_examples() {
        let map = test_map();
        assert_eq!(assign_space(&bx(90.0, 90.0, 110.0, 110.0), &map).name, "bed4");

        let map2 = SpaceMap::new(vec![
            centroid("far", 3.0, 0.0, Zone::Primary),
            centroid("near", 1.0, 0.0, Zone::Secondary),
        ])
        .unwrap();
        // midpoint (0.5, 0.5) sits nearer to (1, 0)
        assert_eq!(assign_space(&bx(0.0, 0.0, 1.0, 1.0), &map2).name, "near");

        let tie = SpaceMap::new(vec![
            centroid("left", 0.0, 5.0, Zone::Primary),
            centroid("right", 10.0, 5.0, Zone::Primary),
        ])
        .unwrap();
        assert_eq!(assign_space(&bx(4.0, 4.0, 6.0, 6.0), &tie).name, "left");
    }

    #[test]
    fn code_examples() {
        let tax = ActionTaxonomy::default();
        let set = SpatialCodeSet::default();
        let p = DistractionPolicy::Secondary;
        let code = |a: &str, z: Zone| spatial_code(a, z, &tax, &set, p).unwrap();
        assert_eq!(code("Patient Interaction", Zone::Primary), SpatialOutcome::Code("prim_Patient_Interaction".into()));
        assert_eq!(code("Sitting", Zone::Primary), SpatialOutcome::Filtered);
        assert_eq!(code("Sitting", Zone::Secondary), SpatialOutcome::Filtered);
        assert_eq!(code("Using Phone", Zone::Secondary), SpatialOutcome::Code("sec_Other".into()));
        assert_eq!(code("Doc/Note Interaction", Zone::Distraction), SpatialOutcome::Code("sec_Doc/Note_Interaction".into()));
        assert_eq!(code("Using Computer", Zone::Transition), SpatialOutcome::Code("sec_Other".into()));
        assert!(spatial_code("Dancing", Zone::Primary, &tax, &set, p).is_err());

        let iso = SpatialCodeSet::for_policy(DistractionPolicy::Isolated);
        assert_eq!(
            spatial_code("Using Computer", Zone::Distraction, &tax, &iso, DistractionPolicy::Isolated).unwrap(),
            SpatialOutcome::Code("dist_Using_Computer".into())
        );
        // isolated policy without dist_ codes has no fallback
        assert!(spatial_code("Using Computer", Zone::Distraction, &tax, &set, DistractionPolicy::Isolated).is_err());
    }

    fn frame(t: f64, dets: &[(&str, [f64; 4])]) -> FrameRecord {
        FrameRecord {
            session_id: "s1".into(),
            t,
            source: "model".into(),
            detections: dets
                .iter()
                .map(|(l, b)| Detection::new(*l, Some(0.9), bx(b[0], b[1], b[2], b[3])).unwrap())
                .collect(),
        }
    }

    const AT_BED4: [f64; 4] = [90.0, 90.0, 110.0, 110.0];
    const AT_BED1: [f64; 4] = [390.0, 90.0, 410.0, 110.0];

    #[test]
    fn timeline_examples() {
        let tax = ActionTaxonomy::default();
        let tl = build_timeline(&[frame(3.2, &[("Using Computer", AT_BED4)])], &tax, CodingMode::Plain).unwrap();
        assert_eq!((tl.t0(), tl.rows()), (3, 1));
        assert_eq!(tl.row(0), &[1, 0, 0, 0, 0, 0]);

        let tl = build_timeline(&[frame(0.0, &[("Sitting", AT_BED4)])], &tax, CodingMode::Plain).unwrap();
        assert!(tl.row(0).iter().all(|v| *v == 0));

        // union within one second
        let frames = [
            frame(5.0, &[("Other", AT_BED4)]),
            frame(7.1, &[("Using Phone", AT_BED4)]),
            frame(7.6, &[("Other", AT_BED4)]),
        ];
        let tl = build_timeline(&frames, &tax, CodingMode::Plain).unwrap();
        assert_eq!(tl.rows(), 3);
        assert!(tl.row(1).iter().all(|v| *v == 0));
        let mut expected = vec![0u8; 6];
        expected[tl.code_index("Using Phone").unwrap()] = 1;
        expected[tl.code_index("Other").unwrap()] = 1;
        assert_eq!(tl.row(2), expected.as_slice());
    }

    #[test]
    fn spatial_timeline() {
        let tax = ActionTaxonomy::default();
        let ctx = SpatialContext::new(test_map(), SpatialCodeSet::default(), DistractionPolicy::Secondary);
        let frames = [frame(0.0, &[("Patient Interaction", AT_BED4), ("Patient Interaction", AT_BED1), ("Sitting", AT_BED1)])];
        let tl = build_timeline(&frames, &tax, CodingMode::Spatial(&ctx)).unwrap();
        assert_eq!(tl.codes().len(), 11);
        assert_eq!(tl.row(0).iter().map(|v| u32::from(*v)).sum::<u32>(), 2);
        assert_eq!(tl.get(0, tl.code_index("prim_Patient_Interaction").unwrap()), 1);
        assert_eq!(tl.get(0, tl.code_index("sec_Patient_Interaction").unwrap()), 1);
    }

    #[test]
    fn timeline_errors() {
        let tax = ActionTaxonomy::default();
        assert!(build_timeline(&[], &tax, CodingMode::Plain).is_err());
        let mut f2 = frame(1.0, &[]);
        f2.session_id = "other".into();
        assert!(build_timeline(&[frame(0.0, &[]), f2], &tax, CodingMode::Plain).is_err());
    }

    fn arb_centroids() -> impl Strategy<Value = Vec<(i32, i32)>> {
        prop::collection::vec((-200i32..200, -200i32..200), 1..7)
    }

    fn map_from(points: &[(i32, i32)], dx: i32, dy: i32, scale: f64) -> SpaceMap {
        SpaceMap::new(
            points
                .iter()
                .enumerate()
                .map(|(i, (x, y))| centroid(&format!("c{i}"), f64::from(x + dx) * scale, f64::from(y + dy) * scale, Zone::Primary))
                .collect(),
        )
        .unwrap()
    }

    proptest! {
        #[test]
        fn assign_matches_exhaustive_minimum(points in arb_centroids(), x in 0i32..300, y in 0i32..300, w in 1i32..40, h in 1i32..40) {
            let map = map_from(&points, 0, 0, 1.0);
            let b = bx(f64::from(x), f64::from(y), f64::from(x + w), f64::from(y + h));
            let (mx, my) = b.midpoint();
            let dists: Vec<f64> = map.centroids().iter().map(|c| ((c.x - mx).powi(2) + (c.y - my).powi(2)).sqrt()).collect();
            let min = dists.iter().copied().fold(f64::INFINITY, f64::min);
            let first = dists.iter().position(|d| *d == min).unwrap();
            prop_assert_eq!(&assign_space(&b, &map).name, &map.centroids()[first].name);
        }

        #[test]
        fn assign_is_translation_and_scale_invariant(points in arb_centroids(), x in 0i32..300, y in 0i32..300,
                                                     w in 1i32..40, h in 1i32..40, dx in 0i32..100, dy in 0i32..100,
                                                     pow in 0i32..4) {
            let base = map_from(&points, 0, 0, 1.0);
            let b = bx(f64::from(x), f64::from(y), f64::from(x + w), f64::from(y + h));
            let chosen = assign_space(&b, &base).name.clone();

            let moved = map_from(&points, dx, dy, 1.0);
            let bm = bx(f64::from(x + dx), f64::from(y + dy), f64::from(x + w + dx), f64::from(y + h + dy));
            prop_assert_eq!(&assign_space(&bm, &moved).name, &chosen);

            let s = 2f64.powi(pow);
            let scaled = map_from(&points, 0, 0, s);
            let bs = bx(f64::from(x) * s, f64::from(y) * s, f64::from(x + w) * s, f64::from(y + h) * s);
            prop_assert_eq!(&assign_space(&bs, &scaled).name, &chosen);
        }

        #[test]
        fn plain_and_spatial_column_sums_agree(seq in prop::collection::vec((0usize..7, any::<bool>()), 1..30)) {
            let tax = ActionTaxonomy::default();
            let ctx = SpatialContext::new(test_map(), SpatialCodeSet::default(), DistractionPolicy::Secondary);
            let frames: Vec<FrameRecord> = seq
                .iter()
                .enumerate()
                .map(|(t, (a, prim))| frame(t as f64, &[(tax.codes()[*a].as_str(), if *prim { AT_BED4 } else { AT_BED1 })]))
                .collect();
            let plain = build_timeline(&frames, &tax, CodingMode::Plain).unwrap();
            let spatial = build_timeline(&frames, &tax, CodingMode::Spatial(&ctx)).unwrap();
            prop_assert!(plain.code_index(FILTERED_CODE).is_none());
            let psum = plain.column_sums();
            let ssum = spatial.column_sums();
            // phone use outside the primary space is folded into sec_Other
            let remapped = seq.iter().any(|(a, prim)| tax.codes()[*a] == "Using Phone" && !*prim);
            for (i, code) in plain.codes().iter().enumerate() {
                let base = code.replace(' ', "_");
                if remapped && (base == "Using_Phone" || base == "Other") {
                    continue;
                }
                let s: usize = ["prim_", "sec_"].iter()
                    .filter_map(|p| spatial.code_index(&format!("{p}{base}")))
                    .map(|j| ssum[j])
                    .sum();
                prop_assert_eq!(psum[i], s, "code {}", code);
            }
        }
    }
}
