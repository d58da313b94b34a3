//! Buoy records and representative sea states.
//!
//! Parses NDBC standard meteorological files, then clusters `(Hs, Tp)`
//! pairs in two levels: per station, then over the pooled station centers.

use std::collections::{BTreeMap, BTreeSet};

use chrono::{NaiveDate, NaiveDateTime};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const SEASTATES_SCHEMA: &str = "wavedesal.seastates/1";
pub const MAX_LLOYD_ITERATIONS: usize = 300;
pub const N_INIT: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub timestamp: NaiveDateTime,
    pub hs: f64,
    pub tp: f64,
    pub station: String,
}

/// Parsed rows plus the number of rows dropped for each reason.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ParseReport {
    pub observations: Vec<Observation>,
    pub dropped: BTreeMap<String, usize>,
}

impl ParseReport {
    fn drop_row(&mut self, reason: &str) {
        *self.dropped.entry(reason.to_owned()).or_default() += 1;
    }

    pub fn dropped_total(&self) -> usize {
        self.dropped.values().sum()
    }
}

struct Columns {
    year: usize,
    month: usize,
    day: usize,
    hour: usize,
    minute: Option<usize>,
    wvht: usize,
    dpd: usize,
    width: usize,
}

fn columns(header: &str) -> Option<Columns> {
    let names: Vec<&str> = header.trim_start_matches('#').split_whitespace().collect();
    let find = |want: &[&str]| names.iter().position(|n| want.contains(n));
    Some(Columns {
        year: find(&["YY", "YYYY"])?,
        month: find(&["MM"])?,
        day: find(&["DD"])?,
        hour: find(&["hh"])?,
        minute: find(&["mm"]),
        wvht: find(&["WVHT"])?,
        dpd: find(&["DPD"])?,
        width: names.len(),
    })
}

/// NDBC "missing" codes are runs of nines: 99, 999, 9999 and their decimals.
fn is_sentinel(v: f64) -> bool {
    [99.0, 999.0, 9999.0].contains(&v)
}

/// Parses one station's stdmet text. Empty input yields an empty report.
pub fn parse_ndbc(text: &str, station: &str) -> Result<ParseReport> {
    let mut report = ParseReport::default();
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let Some((first_no, header)) = lines.next() else {
        return Ok(report);
    };
    let cols = columns(header).ok_or_else(|| Error::NdbcFormat {
        line: first_no + 1,
        reason: "header lacks the YY MM DD hh WVHT DPD columns".into(),
    })?;
    for (_, line) in lines {
        if line.starts_with('#') {
            continue;
        }
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != cols.width {
            report.drop_row("malformed");
            continue;
        }
        let (hs_raw, tp_raw) = (f[cols.wvht], f[cols.dpd]);
        if hs_raw == "MM" || tp_raw == "MM" {
            report.drop_row("missing");
            continue;
        }
        let (Ok(hs), Ok(tp)) = (hs_raw.parse::<f64>(), tp_raw.parse::<f64>()) else {
            report.drop_row("malformed");
            continue;
        };
        if is_sentinel(hs) || is_sentinel(tp) {
            report.drop_row("sentinel");
            continue;
        }
        if !(hs > 0.0 && tp > 0.0 && hs.is_finite() && tp.is_finite()) {
            report.drop_row("nonpositive");
            continue;
        }
        let Some(timestamp) = timestamp(&f, &cols) else {
            report.drop_row("bad_timestamp");
            continue;
        };
        report.observations.push(Observation { timestamp, hs, tp, station: station.to_owned() });
    }
    Ok(report)
}

fn timestamp(f: &[&str], cols: &Columns) -> Option<NaiveDateTime> {
    let num = |i: usize| f[i].parse::<u32>().ok();
    let mut year = num(cols.year)? as i32;
    if year < 100 {
        year += 1900;
    }
    let minute = match cols.minute {
        Some(i) => num(i)?,
        None => 0,
    };
    NaiveDate::from_ymd_opt(year, num(cols.month)?, num(cols.day)?)?.and_hms_opt(num(cols.hour)?, minute, 0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KMeans {
    /// Centers in the input feature order.
    pub centers: Vec<[f64; 2]>,
    /// Cluster of each input point, in input order.
    pub labels: Vec<usize>,
    pub counts: Vec<usize>,
    pub inertia: f64,
    /// Inertia after each assignment step of the chosen restart.
    pub inertia_history: Vec<f64>,
    /// Same, for every restart.
    pub restarts: Vec<Vec<f64>>,
    /// Set when some centers coincide because of duplicate points.
    pub collapsed: bool,
}

fn dist2(a: &[f64; 2], b: &[f64; 2]) -> f64 {
    (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)
}

fn nearest(p: &[f64; 2], centers: &[[f64; 2]]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (j, c) in centers.iter().enumerate() {
        let d = dist2(p, c);
        if d < best.1 {
            best = (j, d);
        }
    }
    best
}

/// k-means++ seeding followed by Lloyd iterations, best of [`N_INIT`]
/// restarts. Points are sorted before seeding so the result does not depend
/// on input order.
pub fn kmeans(points: &[[f64; 2]], k: usize, seed: u64) -> Result<KMeans> {
    if k == 0 {
        return Err(Error::Clustering("k must be positive".into()));
    }
    if points.len() < k {
        return Err(Error::Clustering(format!("{} points cannot form {k} clusters", points.len())));
    }
    if points.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::Clustering("non-finite coordinate".into()));
    }
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| {
        points[a][0].total_cmp(&points[b][0]).then(points[a][1].total_cmp(&points[b][1])).then(a.cmp(&b))
    });
    let sorted: Vec<[f64; 2]> = order.iter().map(|&i| points[i]).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(Vec<[f64; 2]>, Vec<usize>, Vec<f64>)> = None;
    let mut restarts = Vec::with_capacity(N_INIT);
    for _ in 0..N_INIT {
        let init = plus_plus(&sorted, k, &mut rng);
        let (centers, labels, history) = lloyd(&sorted, init);
        let inertia = *history.last().expect("at least one assignment");
        if best.as_ref().is_none_or(|b| inertia < *b.2.last().unwrap()) {
            best = Some((centers, labels, history.clone()));
        }
        restarts.push(history);
    }
    let (centers, sorted_labels, history) = best.expect("restarts ran");
    let mut labels = vec![0; points.len()];
    for (pos, &i) in order.iter().enumerate() {
        labels[i] = sorted_labels[pos];
    }
    let mut counts = vec![0; k];
    for &l in &labels {
        counts[l] += 1;
    }
    let distinct: BTreeSet<(u64, u64)> = centers.iter().map(|c| (c[0].to_bits(), c[1].to_bits())).collect();
    Ok(KMeans {
        collapsed: distinct.len() < k,
        inertia: *history.last().unwrap(),
        centers,
        labels,
        counts,
        inertia_history: history,
        restarts,
    })
}

fn plus_plus(points: &[[f64; 2]], k: usize, rng: &mut ChaCha8Rng) -> Vec<[f64; 2]> {
    let mut centers = vec![points[rng.random_range(0..points.len())]];
    let mut d2: Vec<f64> = points.iter().map(|p| dist2(p, &centers[0])).collect();
    while centers.len() < k {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let mut r = rng.random::<f64>() * total;
            let mut chosen = points.len() - 1;
            for (i, &d) in d2.iter().enumerate() {
                if d > 0.0 && r < d {
                    chosen = i;
                    break;
                }
                r -= d;
            }
            if d2[chosen] == 0.0 {
                chosen = d2.iter().rposition(|&d| d > 0.0).expect("positive total");
            }
            chosen
        } else {
            rng.random_range(0..points.len())
        };
        let c = points[pick];
        for (d, p) in d2.iter_mut().zip(points) {
            *d = d.min(dist2(p, &c));
        }
        centers.push(c);
    }
    centers
}

fn lloyd(points: &[[f64; 2]], mut centers: Vec<[f64; 2]>) -> (Vec<[f64; 2]>, Vec<usize>, Vec<f64>) {
    let k = centers.len();
    let mut labels = vec![usize::MAX; points.len()];
    let mut history = Vec::new();
    for _ in 0..MAX_LLOYD_ITERATIONS {
        let mut changed = false;
        let mut inertia = 0.0;
        for (l, p) in labels.iter_mut().zip(points) {
            let (j, d) = nearest(p, &centers);
            inertia += d;
            if *l != j {
                *l = j;
                changed = true;
            }
        }
        history.push(inertia);
        if !changed {
            break;
        }
        let mut sums = vec![[0.0, 0.0]; k];
        let mut counts = vec![0usize; k];
        for (&l, p) in labels.iter().zip(points) {
            sums[l][0] += p[0];
            sums[l][1] += p[1];
            counts[l] += 1;
        }
        for j in 0..k {
            if counts[j] > 0 {
                centers[j] = [sums[j][0] / counts[j] as f64, sums[j][1] / counts[j] as f64];
            }
        }
    }
    (centers, labels, history)
}

/// Published representative sea states as `(Tp, Hs, locations)`.
pub const REFERENCE_SEA_STATES: [(f64, f64, usize); 20] = [
    (13.23112333956173, 1.7707093836756636, 2),
    (10.234793700202095, 1.4757467428690545, 2),
    (22.584459732902232, 1.1146362808579522, 2),
    (13.81664042372318, 0.8000118789813867, 2),
    (10.638863524791551, 4.635898379970542, 1),
    (16.56912770411745, 2.574394045126751, 1),
    (9.191129829212345, 2.5349366630610004, 4),
    (9.976561213254367, 1.001865613432608, 5),
    (5.855232218554694, 1.0779023831039394, 4),
    (13.593014631352435, 1.1922186822432743, 4),
    (12.833294612926467, 2.063874210861717, 3),
    (9.84231198249586, 1.681761551332142, 1),
    (10.284139549631792, 3.315881129382017, 2),
    (13.011144410022865, 2.732203169230346, 3),
    (12.274136752136759, 6.713700854700875, 1),
    (7.900205063645171, 1.91849027165957, 5),
    (17.167737568529763, 0.9823690678767296, 1),
    (7.344880379199283, 1.3107230273390404, 5),
    (8.939529998687709, 3.193034002888281, 1),
    (15.374832971800414, 3.8642559652928448, 1),
];

/// The published set as centers; member counts are not published and are left at zero.
pub fn reference_centers() -> Vec<SeaStateCenter> {
    REFERENCE_SEA_STATES
        .iter()
        .map(|&(tp, hs, locations)| SeaStateCenter { tp, hs, weight: 0, locations })
        .collect()
}

/// One representative sea state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeaStateCenter {
    /// Peak period, s.
    pub tp: f64,
    /// Significant wave height, m.
    pub hs: f64,
    /// Members assigned to this center.
    #[serde(default)]
    pub weight: usize,
    /// Distinct stations among the members.
    #[serde(default)]
    pub locations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StationClusters {
    pub station: String,
    pub observations: usize,
    pub centers: Vec<SeaStateCenter>,
    pub inertia: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterSet {
    pub schema: String,
    pub k: usize,
    pub seed: u64,
    pub centers: Vec<SeaStateCenter>,
    pub inertia: f64,
    pub collapsed: bool,
    pub level1: Vec<StationClusters>,
}

impl ClusterSet {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("cluster set serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let set: ClusterSet = serde_json::from_str(text)?;
        if set.schema != SEASTATES_SCHEMA {
            return Err(Error::Invalid(format!("sea-state schema `{}`, expected `{SEASTATES_SCHEMA}`", set.schema)));
        }
        Ok(set)
    }
}

/// Per-station seed that does not depend on how stations are listed.
fn station_seed(seed: u64, station: &str) -> u64 {
    station.bytes().fold(seed ^ 0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x100_0000_01b3))
}

/// Level 1 per station on `(Hs, Tp)`, level 2 over the pooled centers.
pub fn two_level_cluster(
    per_station: &BTreeMap<String, Vec<Observation>>,
    k1: usize,
    k2: usize,
    seed: u64,
) -> Result<ClusterSet> {
    if per_station.is_empty() {
        return Err(Error::Clustering("no stations".into()));
    }
    let mut level1 = Vec::with_capacity(per_station.len());
    let mut pooled: Vec<([f64; 2], usize)> = Vec::new();
    for (i, (station, obs)) in per_station.iter().enumerate() {
        let points: Vec<[f64; 2]> = obs.iter().map(|o| [o.hs, o.tp]).collect();
        let km = kmeans(&points, k1, station_seed(seed, station))
            .map_err(|e| Error::Clustering(format!("station {station}: {e}")))?;
        let centers = km
            .centers
            .iter()
            .zip(&km.counts)
            .map(|(c, &n)| SeaStateCenter { tp: c[1], hs: c[0], weight: n, locations: 1 })
            .collect();
        pooled.extend(km.centers.iter().map(|c| (*c, i)));
        level1.push(StationClusters { station: station.clone(), observations: obs.len(), centers, inertia: km.inertia });
    }
    let points: Vec<[f64; 2]> = pooled.iter().map(|p| p.0).collect();
    let km = kmeans(&points, k2, seed)?;
    let mut stations: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); k2];
    for (&label, &(_, s)) in km.labels.iter().zip(&pooled) {
        stations[label].insert(s);
    }
    let centers = km
        .centers
        .iter()
        .zip(&km.counts)
        .zip(&stations)
        .map(|((c, &n), s)| SeaStateCenter { tp: c[1], hs: c[0], weight: n, locations: s.len() })
        .collect();
    Ok(ClusterSet {
        schema: SEASTATES_SCHEMA.to_owned(),
        k: k2,
        seed,
        centers,
        inertia: km.inertia,
        collapsed: km.collapsed,
        level1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
#YY  MM DD hh mm WDIR WSPD GST  WVHT   DPD   APD MWD   PRES  ATMP  WTMP  DEWP  VIS  TIDE
#yr  mo dy hr mn degT m/s  m/s     m   sec   sec degT   hPa  degC  degC  degC  nmi    ft
2015 01 01 00 00 999 99.0 99.0  2.10  9.00  7.07 999 9999.0 999.0  26.6 999.0 99.0 99.00
2015 01 01 01 00 999 99.0 99.0 99.00 99.00  7.07 999 9999.0 999.0  26.6 999.0 99.0 99.00
2015 01 01 02 00 999 99.0 99.0    MM  9.10    MM 999 9999.0 999.0  26.6 999.0 99.0 99.00
2015 01 01 03 00 999 99.0
";

    #[test]
    fn happy_path_and_ledger() {
        let r = parse_ndbc(SAMPLE, "52200").unwrap();
        assert_eq!(r.observations.len(), 1);
        let o = &r.observations[0];
        assert_eq!((o.hs, o.tp), (2.1, 9.0));
        assert_eq!(o.timestamp.to_string(), "2015-01-01 00:00:00");
        assert_eq!(r.dropped["sentinel"], 1);
        assert_eq!(r.dropped["missing"], 1);
        assert_eq!(r.dropped["malformed"], 1);
    }

    #[test]
    fn empty_file_is_empty() {
        assert!(parse_ndbc("", "x").unwrap().observations.is_empty());
        assert!(parse_ndbc("\n\n", "x").unwrap().observations.is_empty());
    }

    #[test]
    fn bad_header_names_line() {
        let err = parse_ndbc("\nfoo bar baz\n1 2 3\n", "x").unwrap_err();
        assert!(matches!(err, Error::NdbcFormat { line: 2, .. }), "{err}");
    }

    #[test]
    fn k_equals_n_keeps_points() {
        let pts = [[1.0, 5.0], [2.0, 9.0], [0.5, 12.0]];
        let km = kmeans(&pts, 3, 4).unwrap();
        let mut c = km.centers.clone();
        c.sort_by(|a, b| a[0].total_cmp(&b[0]));
        assert_eq!(c, vec![[0.5, 12.0], [1.0, 5.0], [2.0, 9.0]]);
        assert_eq!(km.inertia, 0.0);
    }

    #[test]
    fn too_few_points() {
        assert!(kmeans(&[[1.0, 1.0]], 2, 0).is_err());
        assert!(kmeans(&[[1.0, 1.0]], 0, 0).is_err());
    }

    #[test]
    fn duplicates_flagged() {
        let km = kmeans(&[[1.0, 1.0], [1.0, 1.0], [1.0, 1.0]], 2, 0).unwrap();
        assert!(km.collapsed);
    }
}
