//! Independent recomputation of a report from its persisted CSV files.
//!
//! Nothing here reads the in-memory outcome: every number is rebuilt from
//! `predictions*.csv`, `words.csv` and `cv.csv`, then compared with
//! `report.txt` and the derived tables.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use soundtaxel_core::braille::BrailleLetter;

use crate::error::{Error, IoContext, Result};
use crate::report::{
    parse_taxel, ReportText, ACCURACY, CONFUSION, CV, PIN_ERRORS, PREDICTIONS, REPORT, TAXEL_ERROR, WORDS,
};

/// Allowed absolute difference between reported and recomputed reals.
pub const TOLERANCE: f64 = 1e-12;

/// One compared value.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckLine {
    pub key: String,
    pub reported: String,
    pub recomputed: String,
    pub ok: bool,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CheckReport {
    pub lines: Vec<CheckLine>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        !self.lines.is_empty() && self.lines.iter().all(|l| l.ok)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckLine> {
        self.lines.iter().filter(|l| !l.ok)
    }

    fn real(&mut self, key: &str, reported: Option<&str>, recomputed: f64) {
        let ok = reported.and_then(|r| r.parse::<f64>().ok()).is_some_and(|r| (r - recomputed).abs() <= TOLERANCE);
        self.lines.push(CheckLine {
            key: key.into(),
            reported: reported.unwrap_or("<missing>").into(),
            recomputed: recomputed.to_string(),
            ok,
        });
    }

    fn exact(&mut self, key: &str, reported: Option<&str>, recomputed: impl ToString) {
        let recomputed = recomputed.to_string();
        let ok = reported == Some(recomputed.as_str());
        self.lines.push(CheckLine {
            key: key.into(),
            reported: reported.unwrap_or("<missing>").into(),
            recomputed,
            ok,
        });
    }
}

type Table = Vec<Vec<String>>;

fn read_csv(path: &Path) -> Result<(Vec<String>, Table)> {
    let text = fs::read_to_string(path).at(path)?;
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header =
        r.headers().map_err(|e| Error::format(path, "line 1", e.to_string()))?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| Error::format(path, format!("line {}", i + 2), e.to_string()))?;
        rows.push(rec.iter().map(str::to_string).collect());
    }
    Ok((header, rows))
}

fn column(path: &Path, header: &[String], name: &str) -> Result<usize> {
    header.iter().position(|h| h == name).ok_or_else(|| Error::format(path, "line 1", format!("no `{name}` column")))
}

fn num<T: std::str::FromStr>(path: &Path, row: usize, text: &str) -> Result<T> {
    text.parse().map_err(|_| Error::format(path, format!("line {}", row + 2), format!("cannot parse `{text}`")))
}

/// Prediction rows: (truth text, predicted text, true group, predicted group).
struct Predictions {
    rows: Vec<(String, String, usize, Option<usize>)>,
}

fn load_predictions(path: &Path) -> Result<Predictions> {
    let (h, t) = read_csv(path)?;
    let (ct, cp, cg, cpg) = (
        column(path, &h, "truth")?,
        column(path, &h, "predicted")?,
        column(path, &h, "true_group")?,
        column(path, &h, "predicted_group")?,
    );
    let rows = t
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let pg = if r[cpg].is_empty() { None } else { Some(num(path, i, &r[cpg])?) };
            Ok((r[ct].clone(), r[cp].clone(), num(path, i, &r[cg])?, pg))
        })
        .collect::<Result<_>>()?;
    Ok(Predictions { rows })
}

impl Predictions {
    fn accuracy(&self) -> f64 {
        let hits = self.rows.iter().filter(|(t, p, _, _)| t == p).count();
        hits as f64 / self.rows.len() as f64
    }
}

/// Recomputes everything `dir` reports. Errors mean unreadable artifacts; a
/// disagreement is a failed line in the returned report.
pub fn check_dir(dir: &Path) -> Result<CheckReport> {
    let rpath = dir.join(REPORT);
    let report = ReportText::parse(&fs::read_to_string(&rpath).at(&rpath)?, &rpath)?;
    let mut out = CheckReport::default();
    let ppath = dir.join(PREDICTIONS);
    if ppath.exists() {
        check_predictions(dir, &report, &load_predictions(&ppath)?, &mut out)?;
    }
    for (key, value) in &report.entries {
        if let Some(repr) = key.strip_prefix("accuracy_") {
            let path = dir.join(format!("predictions_{repr}.csv"));
            out.real(key, Some(value), load_predictions(&path)?.accuracy());
        }
    }
    let apath = dir.join(ACCURACY);
    if apath.exists() {
        let (h, t) = read_csv(&apath)?;
        let (cr, ca) = (column(&apath, &h, "repr")?, column(&apath, &h, "accuracy")?);
        for r in &t {
            out.exact(
                &format!("{ACCURACY}:{}", r[cr]),
                Some(&r[ca]),
                report.get(&format!("accuracy_{}", r[cr])).unwrap_or(""),
            );
        }
    }
    let cpath = dir.join(CV);
    if cpath.exists() {
        let (h, t) = read_csv(&cpath)?;
        let cm = column(&cpath, &h, "mean")?;
        let best = t.iter().filter_map(|r| r[cm].parse::<f64>().ok()).reduce(f64::max);
        // Accuracy is maximized, RMSE minimized.
        let best = if report.get("rmse_mm").is_some() {
            t.iter().filter_map(|r| r[cm].parse::<f64>().ok()).reduce(f64::min)
        } else {
            best
        };
        if let Some(b) = best {
            out.real("cv_best_mean", report.get("cv_best_mean"), b);
        }
    }
    let wpath = dir.join(WORDS);
    if wpath.exists() {
        check_words(&wpath, &report, &mut out)?;
    }
    Ok(out)
}

fn check_predictions(dir: &Path, report: &ReportText, preds: &Predictions, out: &mut CheckReport) -> Result<()> {
    let n = preds.rows.len();
    out.exact("n_test", report.get("n_test"), n);
    if report.get("rmse_mm").is_some() {
        let ppath = dir.join(PREDICTIONS);
        let mut sq = 0.0;
        for (i, (t, p, _, _)) in preds.rows.iter().enumerate() {
            let d = num::<f64>(&ppath, i, p)? - num::<f64>(&ppath, i, t)?;
            sq += d * d;
        }
        out.real("rmse_mm", report.get("rmse_mm"), (sq / n as f64).sqrt());
        return Ok(());
    }
    out.real("accuracy", report.get("accuracy"), preds.accuracy());

    let cpath = dir.join(CONFUSION);
    let (h, t) = read_csv(&cpath)?;
    let names = &h[1..];
    let mut counts = vec![0u64; names.len() * names.len()];
    for (_, _, g, pg) in &preds.rows {
        let pg = pg.filter(|&p| p < names.len() && *g < names.len());
        let pg =
            pg.ok_or_else(|| Error::format(&dir.join(PREDICTIONS), "predicted_group", "missing or unknown class"))?;
        counts[g * names.len() + pg] += 1;
    }
    let mut file_counts = Vec::with_capacity(counts.len());
    for (i, r) in t.iter().enumerate() {
        for v in &r[1..] {
            file_counts.push(num::<u64>(&cpath, i, v)?);
        }
    }
    let same = file_counts == counts;
    out.lines.push(CheckLine {
        key: CONFUSION.into(),
        reported: format!("{} cells", file_counts.len()),
        recomputed: format!("{} cells", counts.len()),
        ok: same,
    });

    if report.get("col_rate").is_some() {
        check_taxels(dir, report, preds, out)?;
    }
    if report.get("misread_dot1").is_some() {
        let letters: Vec<BrailleLetter> = names
            .iter()
            .map(|n| n.chars().next().ok_or_else(|| Error::format(&cpath, "line 1", "empty class name")))
            .map(|c| c.and_then(|c| BrailleLetter::new(c).map_err(Error::from)))
            .collect::<Result<_>>()?;
        let mut hist = [0u64; 6];
        for (ti, tl) in letters.iter().enumerate() {
            for (pi, pl) in letters.iter().enumerate() {
                let c = counts[ti * names.len() + pi];
                if ti == pi || c == 0 {
                    continue;
                }
                let diff = tl.mask() ^ pl.mask();
                for (d, slot) in hist.iter_mut().enumerate() {
                    if diff & (1 << d) != 0 {
                        *slot += c;
                    }
                }
            }
        }
        let ppath = dir.join(PIN_ERRORS);
        let (_, rows) = read_csv(&ppath)?;
        for (d, c) in hist.iter().enumerate() {
            let key = format!("misread_dot{}", d + 1);
            out.exact(&key, report.get(&key), c);
            out.exact(&format!("{PIN_ERRORS}:{}", d + 1), rows.get(d).map(|r| r[1].as_str()), c);
        }
    }
    Ok(())
}

fn check_taxels(dir: &Path, report: &ReportText, preds: &Predictions, out: &mut CheckReport) -> Result<()> {
    let ppath = dir.join(PREDICTIONS);
    let manhattan = report.get("error_metric") == Some("manhattan");
    let n = preds.rows.len() as f64;
    let (mut col_hits, mut row_hits) = (0usize, 0usize);
    let mut per_taxel: BTreeMap<(u16, u16), (f64, u64)> = BTreeMap::new();
    let mut total = 0.0;
    for (i, (t, p, _, _)) in preds.rows.iter().enumerate() {
        let bad = || Error::format(&ppath, format!("line {}", i + 2), "expected col:row taxel labels");
        let (t, p) = (parse_taxel(t).ok_or_else(bad)?, parse_taxel(p).ok_or_else(bad)?);
        col_hits += usize::from(t.col == p.col);
        row_hits += usize::from(t.row == p.row);
        let dx = f64::from(t.col) - f64::from(p.col);
        let dy = f64::from(t.row) - f64::from(p.row);
        let d = if manhattan { dx.abs() + dy.abs() } else { (dx * dx + dy * dy).sqrt() };
        let e = per_taxel.entry((t.col, t.row)).or_default();
        e.0 += d;
        e.1 += 1;
        total += d;
    }
    out.real("col_rate", report.get("col_rate"), col_hits as f64 / n);
    out.real("row_rate", report.get("row_rate"), row_hits as f64 / n);
    out.real("taxel_error_mean", report.get("taxel_error_mean"), total / n);

    let epath = dir.join(TAXEL_ERROR);
    let (h, rows) = read_csv(&epath)?;
    let (cc, cr, cn, cm) = (
        column(&epath, &h, "col")?,
        column(&epath, &h, "row")?,
        column(&epath, &h, "n_test")?,
        column(&epath, &h, "mean_distance")?,
    );
    let mut ok = true;
    for (i, r) in rows.iter().enumerate() {
        let key = (num::<u16>(&epath, i, &r[cc])?, num::<u16>(&epath, i, &r[cr])?);
        let count: u64 = num(&epath, i, &r[cn])?;
        match per_taxel.get(&key) {
            Some(&(sum, c)) => {
                let mean: f64 = num(&epath, i, &r[cm])?;
                ok &= c == count && (sum / c as f64 - mean).abs() <= TOLERANCE;
            }
            None => ok &= count == 0 && r[cm].is_empty(),
        }
    }
    out.lines.push(CheckLine {
        key: TAXEL_ERROR.into(),
        reported: format!("{} taxels", rows.len()),
        recomputed: format!("{} taxels with samples", per_taxel.len()),
        ok,
    });
    Ok(())
}

fn check_words(path: &Path, report: &ReportText, out: &mut CheckReport) -> Result<()> {
    let (h, rows) = read_csv(path)?;
    let (ct, cr, cc, co) = (
        column(path, &h, "truth")?,
        column(path, &h, "read")?,
        column(path, &h, "corrected")?,
        column(path, &h, "outcome")?,
    );
    let mut counts: BTreeMap<&str, u64> = BTreeMap::new();
    let mut consistent = true;
    for r in &rows {
        let (t, read, corrected, o) = (&r[ct], &r[cr], &r[cc], r[co].as_str());
        consistent &= match o {
            "read_exact" => read == t && corrected == t,
            "corrected_back" => read != t && corrected == t,
            "misread_existing" => read != t && corrected == read,
            "failed" => read != t && corrected != t,
            _ => false,
        };
        *counts.entry(o).or_default() += 1;
    }
    out.lines.push(CheckLine {
        key: format!("{WORDS}:outcomes"),
        reported: format!("{} rows", rows.len()),
        recomputed: if consistent { "consistent".into() } else { "inconsistent outcome labels".into() },
        ok: consistent,
    });
    let get = |k: &str| counts.get(k).copied().unwrap_or(0);
    let (exact, back, existing, failed) =
        (get("read_exact"), get("corrected_back"), get("misread_existing"), get("failed"));
    let n = rows.len() as u64;
    out.exact("words_n", report.get("words_n"), n);
    out.exact("words_read_exact", report.get("words_read_exact"), exact);
    out.exact("words_corrected_back", report.get("words_corrected_back"), back);
    out.exact("words_misread_existing", report.get("words_misread_existing"), existing);
    out.exact("words_failed", report.get("words_failed"), failed);
    let nf = n as f64;
    let misread = n - exact;
    let fractions = [
        ("words_fraction_correct_without_correction", exact as f64 / nf),
        ("words_fraction_correct_after_correction", (exact + back) as f64 / nf),
        ("words_fraction_misread_to_existing_word", existing as f64 / nf),
        ("words_fraction_heuristic_failed", failed as f64 / nf),
        ("words_fraction_corrected_back", if misread == 0 { 0.0 } else { back as f64 / misread as f64 }),
    ];
    for (k, v) in fractions {
        out.real(k, report.get(k), v);
    }
    Ok(())
}
