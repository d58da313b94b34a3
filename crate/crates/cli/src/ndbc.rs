//! Buoy archive files on disk, with an optional download into the same cache.

use std::collections::BTreeMap;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{bail, Context};
use chrono::Datelike;
use flate2::read::GzDecoder;
use wavedesal_core::seastates::{parse_ndbc, Observation};

const ARCHIVE_URL: &str = "https://www.ndbc.noaa.gov/data/historical/stdmet";
const ATTEMPTS: u32 = 4;

/// Parses `a-b` or a single year.
pub fn parse_years(s: &str) -> anyhow::Result<(i32, i32)> {
    let (a, b) = s.split_once('-').unwrap_or((s, s));
    let (a, b): (i32, i32) = (a.trim().parse()?, b.trim().parse()?);
    if a > b {
        bail!("year range {s} is reversed");
    }
    Ok((a, b))
}

fn archive_name(station: &str, year: i32) -> String {
    format!("{station}h{year}.txt.gz")
}

/// Candidate files for one station-year, in preference order.
fn candidates(dir: &Path, station: &str, year: i32) -> [PathBuf; 2] {
    [dir.join(archive_name(station, year)), dir.join(format!("{station}h{year}.txt"))]
}

fn read_text(path: &Path) -> anyhow::Result<String> {
    let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    if path.extension().is_some_and(|e| e == "gz") {
        let mut text = String::new();
        GzDecoder::new(&bytes[..]).read_to_string(&mut text).with_context(|| format!("decompressing {}", path.display()))?;
        Ok(text)
    } else {
        Ok(String::from_utf8(bytes)?)
    }
}

/// Downloads one yearly archive into `dir`, retrying with exponential backoff.
fn fetch(dir: &Path, station: &str, year: i32) -> anyhow::Result<PathBuf> {
    let name = archive_name(station, year);
    let url = format!("{ARCHIVE_URL}/{name}");
    let mut delay = Duration::from_secs(1);
    let mut last = None;
    for attempt in 1..=ATTEMPTS {
        match ureq::get(&url).timeout(Duration::from_secs(60)).call() {
            Ok(resp) => {
                let mut body = Vec::new();
                resp.into_reader().read_to_end(&mut body)?;
                std::fs::create_dir_all(dir)?;
                let path = dir.join(&name);
                let tmp = dir.join(format!("{name}.part"));
                std::fs::write(&tmp, &body)?;
                std::fs::rename(&tmp, &path)?;
                return Ok(path);
            }
            Err(ureq::Error::Status(404, _)) => bail!("{url}: not found"),
            Err(e) => {
                log::warn!("{url}: attempt {attempt} failed: {e}");
                last = Some(e);
                if attempt < ATTEMPTS {
                    std::thread::sleep(delay);
                    delay *= 2;
                }
            }
        }
    }
    Err(last.map_or_else(|| anyhow::anyhow!("{url}: no attempts"), anyhow::Error::from))
}

/// Observations per station within `years`. Each station is read from
/// `<station>h<year>.txt[.gz]` files, or from a single `<station>.txt`
/// holding several years. Missing yearly files are downloaded when `download`
/// is set.
pub fn load_stations(
    dir: &Path,
    stations: &[String],
    years: (i32, i32),
    download: bool,
) -> anyhow::Result<BTreeMap<String, Vec<Observation>>> {
    let mut out = BTreeMap::new();
    for station in stations {
        let mut files: Vec<PathBuf> = Vec::new();
        let combined = dir.join(format!("{station}.txt"));
        if combined.exists() {
            files.push(combined);
        } else {
            for year in years.0..=years.1 {
                match candidates(dir, station, year).into_iter().find(|p| p.exists()) {
                    Some(p) => files.push(p),
                    None if download => match fetch(dir, station, year) {
                        Ok(p) => files.push(p),
                        Err(e) => log::warn!("station {station} {year}: {e}"),
                    },
                    None => log::warn!("station {station}: no file for {year} in {}", dir.display()),
                }
            }
        }
        let mut obs = Vec::new();
        for f in &files {
            let report = parse_ndbc(&read_text(f)?, station).with_context(|| format!("parsing {}", f.display()))?;
            if report.dropped_total() > 0 {
                log::info!("{}: dropped {:?}", f.display(), report.dropped);
            }
            obs.extend(report.observations.into_iter().filter(|o| (years.0..=years.1).contains(&o.timestamp.year())));
        }
        if obs.is_empty() {
            bail!("station {station}: no usable observations for {}-{}", years.0, years.1);
        }
        out.insert(station.clone(), obs);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn year_ranges() {
        assert_eq!(parse_years("2015-2024").unwrap(), (2015, 2024));
        assert_eq!(parse_years("2019").unwrap(), (2019, 2019));
        assert!(parse_years("2024-2015").is_err());
    }

    #[test]
    fn reads_gzip_and_plain_years() {
        let dir = tempfile::tempdir().unwrap();
        let header = "#YY  MM DD hh mm WDIR WSPD GST  WVHT   DPD   APD MWD   PRES  ATMP  WTMP  DEWP  VIS  TIDE\n";
        let row = |y: i32, hs: &str| format!("{y} 01 01 00 00 999 99.0 99.0 {hs} 9.00 99.00 999 9999.0 999.0 999.0 999.0 99.0 99.00\n");
        std::fs::write(dir.path().join("1h2015.txt"), format!("{header}{}", row(2015, "1.50"))).unwrap();
        let mut gz = flate2::write::GzEncoder::new(Vec::new(), flate2::Compression::default());
        gz.write_all(format!("{header}{}{}", row(2016, "2.00"), row(2016, "MM")).as_bytes()).unwrap();
        std::fs::write(dir.path().join("1h2016.txt.gz"), gz.finish().unwrap()).unwrap();
        let got = load_stations(dir.path(), &["1".into()], (2015, 2016), false).unwrap();
        let hs: Vec<f64> = got["1"].iter().map(|o| o.hs).collect();
        assert_eq!(hs, vec![1.5, 2.0]);
        let only = load_stations(dir.path(), &["1".into()], (2016, 2016), false).unwrap();
        assert_eq!(only["1"].len(), 1);
        assert!(load_stations(dir.path(), &["2".into()], (2015, 2016), false).is_err());
    }
}
