//! Braille display geometry, the six-dot alphabet, contact patterns and the
//! word-level Hamming corrector.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::Rng;

use crate::error::bail;
use crate::{Error, Result};

/// Physical layout of the pin display under the actuator.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DisplayGeometry {
    pub n_cols: usize,
    pub n_rows: usize,
    /// Columns under the actuator that carry labels; the rest stay retracted.
    pub usable_cols: usize,
    pub within_cell_pitch_mm: f64,
    pub between_cell_gap_mm: f64,
    /// Distance between the first columns of neighbouring cells.
    pub cell_pitch_mm: f64,
    pub pin_height_mm: f64,
    pub pin_force_n: f64,
    pub surface_mm: (f64, f64),
}

impl Default for DisplayGeometry {
    fn default() -> Self {
        Self {
            n_cols: 32,
            n_rows: 4,
            usable_cols: 29,
            within_cell_pitch_mm: 2.45,
            between_cell_gap_mm: 3.97,
            cell_pitch_mm: 6.42,
            pin_height_mm: 0.7,
            pin_force_n: 0.17,
            surface_mm: (90.0, 10.0),
        }
    }
}

impl DisplayGeometry {
    pub fn validate(&self) -> Result<()> {
        let pitch = self.within_cell_pitch_mm + self.between_cell_gap_mm;
        if (pitch - self.cell_pitch_mm).abs() > 1e-9 {
            bail!(
                Config,
                "cell pitch {} mm != {} + {} mm",
                self.cell_pitch_mm,
                self.within_cell_pitch_mm,
                self.between_cell_gap_mm
            );
        }
        if self.n_cols % 2 != 0 {
            bail!(Config, "display columns must pair into cells, got {}", self.n_cols);
        }
        if self.usable_cols == 0 || self.usable_cols > self.n_cols || self.n_rows == 0 {
            bail!(Config, "usable columns {} must be in 1..={}", self.usable_cols, self.n_cols);
        }
        Ok(())
    }

    pub fn n_cells(&self) -> usize {
        self.n_cols / 2
    }

    /// Cells whose two columns both lie in the usable area.
    pub fn usable_cells(&self) -> usize {
        self.usable_cols / 2
    }

    pub fn n_taxels(&self) -> usize {
        self.usable_cols * self.n_rows
    }

    /// All usable taxels, row-major.
    pub fn taxels(&self) -> impl Iterator<Item = TaxelCoord> + '_ {
        (0..self.n_rows).flat_map(move |row| (0..self.usable_cols).map(move |col| TaxelCoord::new(col, row)))
    }

    /// Dense class index of a taxel, `row * usable_cols + col`.
    pub fn taxel_index(&self, t: TaxelCoord) -> usize {
        t.row as usize * self.usable_cols + t.col as usize
    }

    pub fn taxel_from_index(&self, index: usize) -> TaxelCoord {
        TaxelCoord::new(index % self.usable_cols, index / self.usable_cols)
    }

    fn check(&self, t: TaxelCoord) -> Result<()> {
        if t.col as usize >= self.usable_cols || t.row as usize >= self.n_rows {
            bail!(Bounds, "taxel {t} outside {}x{} usable grid", self.usable_cols, self.n_rows);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TaxelCoord {
    pub col: u16,
    pub row: u16,
}

impl TaxelCoord {
    pub fn new(col: usize, row: usize) -> Self {
        Self { col: col as u16, row: row as u16 }
    }
}

impl fmt::Display for TaxelCoord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.col, self.row)
    }
}

/// Center of a pin in millimetres, with pin (0, 0) at the origin.
pub fn pin_position(coord: TaxelCoord, geo: &DisplayGeometry) -> Result<(f64, f64)> {
    geo.check(coord)?;
    let (cell, in_cell) = (coord.col as usize / 2, coord.col as usize % 2);
    let x = cell as f64 * geo.cell_pitch_mm + in_cell as f64 * geo.within_cell_pitch_mm;
    let y = coord.row as f64 * geo.within_cell_pitch_mm;
    Ok((x, y))
}

/// Extended/retracted state of every display pin.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ContactPattern {
    n_rows: usize,
    n_cols: usize,
    grid: Vec<bool>,
}

impl ContactPattern {
    /// All pins retracted.
    pub fn empty(geo: &DisplayGeometry) -> Self {
        Self { n_rows: geo.n_rows, n_cols: geo.n_cols, grid: vec![false; geo.n_rows * geo.n_cols] }
    }

    pub fn from_grid(n_rows: usize, n_cols: usize, grid: Vec<bool>) -> Result<Self> {
        if grid.len() != n_rows * n_cols {
            return Err(Error::Length { left: grid.len(), right: n_rows * n_cols });
        }
        Ok(Self { n_rows, n_cols, grid })
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.n_rows, self.n_cols)
    }

    pub fn get(&self, col: usize, row: usize) -> bool {
        self.grid[row * self.n_cols + col]
    }

    pub fn set(&mut self, col: usize, row: usize, extended: bool) {
        self.grid[row * self.n_cols + col] = extended;
    }

    pub fn grid(&self) -> &[bool] {
        &self.grid
    }

    /// Extended pins, row-major.
    pub fn extended(&self) -> impl Iterator<Item = TaxelCoord> + '_ {
        self.grid
            .iter()
            .enumerate()
            .filter(|(_, &on)| on)
            .map(|(i, _)| TaxelCoord::new(i % self.n_cols, i / self.n_cols))
    }

    pub fn count(&self) -> usize {
        self.grid.iter().filter(|&&on| on).count()
    }

    /// Rejects patterns that do not match the geometry or extend pins outside
    /// the usable columns.
    pub fn validate_label(&self, geo: &DisplayGeometry) -> Result<()> {
        if self.dims() != (geo.n_rows, geo.n_cols) {
            bail!(Validation, "pattern is {}x{}, display is {}x{}", self.n_rows, self.n_cols, geo.n_rows, geo.n_cols);
        }
        if let Some(t) = self.extended().find(|t| t.col as usize >= geo.usable_cols) {
            bail!(Validation, "pin {t} lies outside the {} usable columns", geo.usable_cols);
        }
        Ok(())
    }

    /// Compact text form: one string per row, `#` extended and `.` retracted,
    /// rows joined by `/`.
    pub fn to_text(&self) -> String {
        let mut s = String::with_capacity(self.grid.len() + self.n_rows);
        for (r, row) in self.grid.chunks_exact(self.n_cols).enumerate() {
            if r > 0 {
                s.push('/');
            }
            s.extend(row.iter().map(|&on| if on { '#' } else { '.' }));
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let rows: Vec<&str> = text.split('/').collect();
        let n_cols = rows[0].len();
        let mut grid = Vec::with_capacity(rows.len() * n_cols);
        for row in &rows {
            if row.len() != n_cols {
                bail!(Validation, "ragged pattern row `{row}`");
            }
            for c in row.chars() {
                grid.push(match c {
                    '#' => true,
                    '.' => false,
                    _ => bail!(Validation, "unexpected pattern character `{c}`"),
                });
            }
        }
        Self::from_grid(rows.len(), n_cols, grid)
    }
}

/// A letter of the six-dot Braille alphabet. Dots 1-3 run down the left
/// column, dots 4-6 down the right column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BrailleLetter {
    letter: char,
    dots: u8,
}

const fn dots(list: &[u8]) -> u8 {
    let mut mask = 0;
    let mut i = 0;
    while i < list.len() {
        mask |= 1 << (list[i] - 1);
        i += 1;
    }
    mask
}

const ALPHABET: [u8; 26] = [
    dots(&[1]),
    dots(&[1, 2]),
    dots(&[1, 4]),
    dots(&[1, 4, 5]),
    dots(&[1, 5]),
    dots(&[1, 2, 4]),
    dots(&[1, 2, 4, 5]),
    dots(&[1, 2, 5]),
    dots(&[2, 4]),
    dots(&[2, 4, 5]),
    dots(&[1, 3]),
    dots(&[1, 2, 3]),
    dots(&[1, 3, 4]),
    dots(&[1, 3, 4, 5]),
    dots(&[1, 3, 5]),
    dots(&[1, 2, 3, 4]),
    dots(&[1, 2, 3, 4, 5]),
    dots(&[1, 2, 3, 5]),
    dots(&[2, 3, 4]),
    dots(&[2, 3, 4, 5]),
    dots(&[1, 3, 6]),
    dots(&[1, 2, 3, 6]),
    dots(&[2, 4, 5, 6]),
    dots(&[1, 3, 4, 6]),
    dots(&[1, 3, 4, 5, 6]),
    dots(&[1, 3, 5, 6]),
];

impl BrailleLetter {
    pub fn new(letter: char) -> Result<Self> {
        match letter {
            'a'..='z' => Ok(Self { letter, dots: ALPHABET[letter as usize - 'a' as usize] }),
            _ => bail!(Validation, "`{letter}` is not a lowercase letter a-z"),
        }
    }

    pub fn from_index(i: usize) -> Self {
        Self { letter: (b'a' + i as u8) as char, dots: ALPHABET[i] }
    }

    pub fn alphabet() -> impl Iterator<Item = BrailleLetter> {
        (0..26).map(Self::from_index)
    }

    pub fn letter(self) -> char {
        self.letter
    }

    pub fn index(self) -> usize {
        self.letter as usize - 'a' as usize
    }

    /// Raised dots as a bit mask, bit `d - 1` for dot `d`.
    pub fn mask(self) -> u8 {
        self.dots
    }

    pub fn dots(self) -> impl Iterator<Item = u8> {
        (1..=6).filter(move |d| self.dots & (1 << (d - 1)) != 0)
    }

    pub fn has_dot(self, dot: u8) -> bool {
        (1..=6).contains(&dot) && self.dots & (1 << (dot - 1)) != 0
    }
}

/// (column offset within the cell, row) of a Braille dot.
pub fn dot_offset(dot: u8) -> (usize, usize) {
    let d = (dot - 1) as usize;
    (d / 3, d % 3)
}

/// Displays a letter in cell `cell_index` using the top three rows of the
/// cell; everything else stays retracted.
pub fn letter_to_pattern(l: BrailleLetter, cell_index: usize, geo: &DisplayGeometry) -> Result<ContactPattern> {
    if cell_index >= geo.usable_cells() || geo.n_rows < 3 {
        bail!(Bounds, "cell {cell_index} is outside the {} usable cells", geo.usable_cells());
    }
    let mut p = ContactPattern::empty(geo);
    for d in l.dots() {
        let (dc, row) = dot_offset(d);
        p.set(2 * cell_index + dc, row, true);
    }
    Ok(p)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Axis {
    X,
    Y,
}

/// A full line of pins across the usable area and its position label in mm.
/// An x-line raises every row of column `index`; a y-line raises every usable
/// column of row `index`.
pub fn line_pattern(axis: Axis, index: usize, geo: &DisplayGeometry) -> Result<(ContactPattern, f64)> {
    let mut p = ContactPattern::empty(geo);
    match axis {
        Axis::X => {
            let (x, _) = pin_position(TaxelCoord::new(index, 0), geo)?;
            for row in 0..geo.n_rows {
                p.set(index, row, true);
            }
            Ok((p, x))
        }
        Axis::Y => {
            let (_, y) = pin_position(TaxelCoord::new(0, index), geo)?;
            for col in 0..geo.usable_cols {
                p.set(col, index, true);
            }
            Ok((p, y))
        }
    }
}

/// Number of positions at which two equal-length words differ.
pub fn hamming(a: &str, b: &str) -> Result<usize> {
    let (la, lb) = (a.chars().count(), b.chars().count());
    if la != lb {
        return Err(Error::Length { left: la, right: lb });
    }
    Ok(a.chars().zip(b.chars()).filter(|(x, y)| x != y).count())
}

/// Lowercase a-z words in descending frequency order.
#[derive(Debug, Clone, PartialEq)]
pub struct WordCorpus {
    words: Vec<String>,
    rank: BTreeMap<String, usize>,
    by_len: BTreeMap<usize, Vec<usize>>,
}

fn is_word(w: &str) -> bool {
    !w.is_empty() && w.bytes().all(|b| b.is_ascii_lowercase())
}

impl WordCorpus {
    pub fn new<I, S>(words: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut corpus = Self { words: Vec::new(), rank: BTreeMap::new(), by_len: BTreeMap::new() };
        for (i, w) in words.into_iter().enumerate() {
            corpus.push(w.into()).map_err(|e| Error::Validation(alloc::format!("word {}: {e}", i + 1)))?;
        }
        if corpus.words.is_empty() {
            bail!(Validation, "corpus is empty");
        }
        Ok(corpus)
    }

    /// Parses one word per line. Blank lines are skipped; any other line that
    /// is not a lowercase a-z word is rejected with its 1-based line number.
    pub fn parse(text: &str) -> Result<Self> {
        let mut corpus = Self { words: Vec::new(), rank: BTreeMap::new(), by_len: BTreeMap::new() };
        for (i, line) in text.lines().enumerate() {
            let w = line.trim_end_matches('\r');
            if w.is_empty() {
                continue;
            }
            corpus.push(w.into()).map_err(|e| Error::Validation(alloc::format!("line {}: {e}", i + 1)))?;
        }
        if corpus.words.is_empty() {
            bail!(Validation, "corpus is empty");
        }
        Ok(corpus)
    }

    fn push(&mut self, w: String) -> core::result::Result<(), String> {
        if !is_word(&w) {
            return Err(alloc::format!("`{w}` is not a lowercase a-z word"));
        }
        if self.rank.contains_key(&w) {
            return Err(alloc::format!("duplicate word `{w}`"));
        }
        let i = self.words.len();
        self.by_len.entry(w.len()).or_default().push(i);
        self.rank.insert(w.clone(), i);
        self.words.push(w);
        Ok(())
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn contains(&self, w: &str) -> bool {
        self.rank.contains_key(w)
    }

    /// Frequency rank (0 = most common).
    pub fn rank(&self, w: &str) -> Option<usize> {
        self.rank.get(w).copied()
    }

    /// Corpus words of length `len`, most frequent first.
    pub fn with_len(&self, len: usize) -> impl Iterator<Item = &str> {
        self.by_len.get(&len).into_iter().flatten().map(|&i| self.words[i].as_str())
    }
}

/// Returns `observed` if it is a corpus word, otherwise the same-length corpus
/// word at minimum Hamming distance (ties go to the more frequent word). With
/// no same-length candidate, `observed` comes back unchanged.
pub fn correct_word<'a>(observed: &'a str, corpus: &'a WordCorpus) -> &'a str {
    if corpus.contains(observed) {
        return observed;
    }
    let mut best: Option<(usize, &str)> = None;
    for candidate in corpus.with_len(observed.len()) {
        let d = observed.bytes().zip(candidate.bytes()).filter(|(a, b)| a != b).count();
        if best.is_none_or(|(bd, _)| d < bd) {
            best = Some((d, candidate));
        }
    }
    best.map_or(observed, |(_, w)| w)
}

/// Per-letter misreading probabilities: row = true letter, column = read
/// letter. Every row is a probability distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct LetterConfusion {
    probs: Vec<f64>,
}

impl LetterConfusion {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.len() != 26 * 26 {
            return Err(Error::Length { left: probs.len(), right: 26 * 26 });
        }
        for (r, row) in probs.chunks_exact(26).enumerate() {
            if row.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
                bail!(Validation, "confusion row `{}` has a negative or non-finite entry", (b'a' + r as u8) as char);
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > 1e-9 {
                bail!(Validation, "confusion row `{}` sums to {sum}, not 1", (b'a' + r as u8) as char);
            }
        }
        Ok(Self { probs })
    }

    pub fn identity() -> Self {
        let mut probs = vec![0.0; 26 * 26];
        for i in 0..26 {
            probs[i * 27] = 1.0;
        }
        Self { probs }
    }

    /// Row-normalizes a 26x26 count matrix. A letter with no observations
    /// keeps an identity row.
    pub fn from_counts(counts: &[u64]) -> Result<Self> {
        if counts.len() != 26 * 26 {
            return Err(Error::Length { left: counts.len(), right: 26 * 26 });
        }
        let mut probs = vec![0.0; 26 * 26];
        for (r, row) in counts.chunks_exact(26).enumerate() {
            let total: u64 = row.iter().sum();
            if total == 0 {
                probs[r * 27] = 1.0;
                continue;
            }
            for (p, &c) in probs[r * 26..(r + 1) * 26].iter_mut().zip(row) {
                *p = c as f64 / total as f64;
            }
        }
        Self::new(probs)
    }

    pub fn row(&self, letter: usize) -> &[f64] {
        &self.probs[letter * 26..(letter + 1) * 26]
    }

    pub fn prob(&self, truth: char, read: char) -> f64 {
        self.probs[(truth as usize - 'a' as usize) * 26 + (read as usize - 'a' as usize)]
    }

    pub fn sample<R: Rng + ?Sized>(&self, letter: usize, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        let row = self.row(letter);
        let mut acc = 0.0;
        for (j, &p) in row.iter().enumerate() {
            acc += p;
            if u < acc {
                return j;
            }
        }
        // Rounding left `acc` just under 1: fall back to the last reachable letter.
        row.iter().rposition(|&p| p > 0.0).unwrap_or(letter)
    }
}

/// Replaces every letter independently with a draw from its confusion row.
pub fn perturb_word<R: Rng + ?Sized>(word: &str, confusion: &LetterConfusion, rng: &mut R) -> Result<String> {
    if !is_word(word) {
        bail!(Validation, "`{word}` is not a lowercase a-z word");
    }
    Ok(word.bytes().map(|b| (b'a' + confusion.sample((b - b'a') as usize, rng) as u8) as char).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn geo() -> DisplayGeometry {
        DisplayGeometry::default()
    }

    fn close(a: (f64, f64), b: (f64, f64)) -> bool {
        (a.0 - b.0).abs() < 1e-12 && (a.1 - b.1).abs() < 1e-12
    }

    #[test]
    fn default_geometry_is_consistent() {
        geo().validate().unwrap();
        assert_eq!(geo().n_cells(), 16);
        assert_eq!(geo().usable_cells(), 14);
        assert_eq!(geo().n_taxels(), 116);
    }

    #[test]
    fn pin_positions() {
        let g = geo();
        assert!(close(pin_position(TaxelCoord::new(0, 0), &g).unwrap(), (0.0, 0.0)));
        assert!(close(pin_position(TaxelCoord::new(1, 3), &g).unwrap(), (2.45, 7.35)));
        assert!(close(pin_position(TaxelCoord::new(2, 0), &g).unwrap(), (6.42, 0.0)));
        assert!(matches!(pin_position(TaxelCoord::new(29, 0), &g), Err(Error::Bounds(_))));
        assert!(matches!(pin_position(TaxelCoord::new(0, 4), &g), Err(Error::Bounds(_))));
    }

    #[test]
    fn pin_position_is_strictly_monotone() {
        let g = geo();
        for row in 0..g.n_rows {
            let xs: Vec<f64> =
                (0..g.usable_cols).map(|c| pin_position(TaxelCoord::new(c, row), &g).unwrap().0).collect();
            assert!(xs.windows(2).all(|w| w[0] < w[1]));
        }
        for col in 0..g.usable_cols {
            let ys: Vec<f64> = (0..g.n_rows).map(|r| pin_position(TaxelCoord::new(col, r), &g).unwrap().1).collect();
            assert!(ys.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn letter_a_is_one_pin() {
        let p = letter_to_pattern(BrailleLetter::new('a').unwrap(), 3, &geo()).unwrap();
        assert_eq!(p.extended().collect::<Vec<_>>(), vec![TaxelCoord::new(6, 0)]);
    }

    #[test]
    fn letter_z_matches_dots_1356() {
        let p = letter_to_pattern(BrailleLetter::new('z').unwrap(), 0, &geo()).unwrap();
        let mut got: Vec<_> = p.extended().collect();
        got.sort();
        let mut expected =
            vec![TaxelCoord::new(0, 0), TaxelCoord::new(0, 2), TaxelCoord::new(1, 1), TaxelCoord::new(1, 2)];
        expected.sort();
        assert_eq!(got, expected);
        assert!(p.extended().all(|t| t.row < 3));
    }

    #[test]
    fn l_and_v_differ_in_bottom_right_only() {
        let g = geo();
        let l = letter_to_pattern(BrailleLetter::new('l').unwrap(), 5, &g).unwrap();
        let v = letter_to_pattern(BrailleLetter::new('v').unwrap(), 5, &g).unwrap();
        let diff: Vec<usize> = (0..l.grid().len()).filter(|&i| l.grid()[i] != v.grid()[i]).collect();
        assert_eq!(diff, vec![2 * g.n_cols + 11]);
    }

    #[test]
    fn letter_cell_out_of_range() {
        assert!(matches!(letter_to_pattern(BrailleLetter::new('a').unwrap(), 14, &geo()), Err(Error::Bounds(_))));
        assert!(BrailleLetter::new('A').is_err());
    }

    #[test]
    fn all_letters_distinct() {
        let g = geo();
        let pats: Vec<_> = BrailleLetter::alphabet().map(|l| letter_to_pattern(l, 0, &g).unwrap()).collect();
        for i in 0..26 {
            for j in i + 1..26 {
                assert_ne!(pats[i], pats[j], "{} vs {}", (b'a' + i as u8) as char, (b'a' + j as u8) as char);
            }
        }
    }

    #[test]
    fn line_patterns() {
        let g = geo();
        let (p, mm) = line_pattern(Axis::X, 0, &g).unwrap();
        assert_eq!((p.count(), mm), (4, 0.0));
        let (p, mm) = line_pattern(Axis::Y, 3, &g).unwrap();
        assert_eq!(p.count(), 29);
        assert!((mm - 7.35).abs() < 1e-12);
        let (_, mm) = line_pattern(Axis::X, 2, &g).unwrap();
        assert!((mm - 6.42).abs() < 1e-12);
        assert!(line_pattern(Axis::X, 29, &g).is_err());
        assert!(line_pattern(Axis::Y, 4, &g).is_err());
    }

    #[test]
    fn pattern_labels_reject_unusable_columns() {
        let g = geo();
        let mut p = ContactPattern::empty(&g);
        p.set(30, 1, true);
        assert!(p.validate_label(&g).is_err());
        p.set(30, 1, false);
        p.set(28, 1, true);
        p.validate_label(&g).unwrap();
    }

    #[test]
    fn pattern_text_round_trip() {
        let p = letter_to_pattern(BrailleLetter::new('q').unwrap(), 2, &geo()).unwrap();
        assert_eq!(ContactPattern::from_text(&p.to_text()).unwrap(), p);
    }

    #[test]
    fn hamming_distances() {
        assert_eq!(hamming("cat", "cat").unwrap(), 0);
        assert_eq!(hamming("cat", "cut").unwrap(), 1);
        assert_eq!(hamming("abcd", "badc").unwrap(), 4);
        assert!(matches!(hamming("ab", "abc"), Err(Error::Length { .. })));
    }

    #[test]
    fn correct_word_rules() {
        let c = WordCorpus::new(["the", "and", "for"]).unwrap();
        assert_eq!(correct_word("and", &c), "and");
        assert_eq!(correct_word("thz", &c), "the");
        assert_eq!(correct_word("abcdef", &c), "abcdef");
        let c = WordCorpus::new(["cat", "car"]).unwrap();
        assert_eq!(correct_word("caz", &c), "cat");
        let c = WordCorpus::new(["car", "cat"]).unwrap();
        assert_eq!(correct_word("caz", &c), "car");
    }

    #[test]
    fn corpus_parse_errors_carry_line_numbers() {
        let err = WordCorpus::parse("the\nand\nFor\n").unwrap_err();
        assert!(alloc::format!("{err}").contains("line 3"), "{err}");
        let err = WordCorpus::parse("the\n\nthe\n").unwrap_err();
        assert!(alloc::format!("{err}").contains("line 3"), "{err}");
        assert!(WordCorpus::parse("\n\n").is_err());
        assert_eq!(WordCorpus::parse("the\r\nof\n").unwrap().words(), ["the", "of"]);
    }

    #[test]
    fn perturb_with_identity_is_noop() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(perturb_word("braille", &LetterConfusion::identity(), &mut rng).unwrap(), "braille");
    }

    #[test]
    fn perturb_with_deterministic_row() {
        let mut probs = LetterConfusion::identity().probs;
        let l = 11;
        probs[l * 26 + l] = 0.0;
        probs[l * 26 + 21] = 1.0;
        let conf = LetterConfusion::new(probs).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(perturb_word("line", &conf, &mut rng).unwrap(), "vine");
        assert_eq!(perturb_word("ll", &conf, &mut rng).unwrap(), "vv");
    }

    #[test]
    fn perturb_is_seed_deterministic() {
        let counts: Vec<u64> = (0..26 * 26).map(|i| if i % 27 == 0 { 50 } else { (i % 3) as u64 }).collect();
        let conf = LetterConfusion::from_counts(&counts).unwrap();
        let run = || {
            let mut rng = ChaCha8Rng::seed_from_u64(99);
            (0..20).map(|_| perturb_word("acoustic", &conf, &mut rng).unwrap()).collect::<Vec<_>>()
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn confusion_rows_must_sum_to_one() {
        let mut probs = LetterConfusion::identity().probs;
        probs[0] = 0.9;
        assert!(matches!(LetterConfusion::new(probs), Err(Error::Validation(_))));
    }
}
