//! Ratings-to-bandit pipeline.
//!
//! Input is a CSV with header `id,stars1,stars2,stars3`. Each item's mean is
//! the fraction of 2- and 3-star ratings, normalized by the largest such
//! fraction and then raised to 1 when it reaches the threshold.

use std::cmp::Ordering;
use std::fs::File;
use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};
use crate::instance::BanditInstance;
use crate::scalar::Real;

pub const DEFAULT_THRESHOLD: f64 = 0.8;

const HEADER: [&str; 4] = ["id", "stars1", "stars2", "stars3"];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatedItem {
    pub id: String,
    /// Counts of 1-, 2- and 3-star ratings.
    pub counts: [u64; 3],
}

impl RatedItem {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Ratings of two or three stars.
    pub fn favourable(&self) -> u64 {
        self.counts[1] + self.counts[2]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatingsTable {
    items: Vec<RatedItem>,
    dropped: usize,
}

impl RatingsTable {
    /// Keeps items with at least one rating.
    pub fn new(items: Vec<RatedItem>) -> Result<Self> {
        let before = items.len();
        let items: Vec<RatedItem> = items.into_iter().filter(|i| i.total() > 0).collect();
        let dropped = before - items.len();
        if items.is_empty() {
            return Err(Error::domain("no item has any rating"));
        }
        Ok(Self { items, dropped })
    }

    pub fn items(&self) -> &[RatedItem] {
        &self.items
    }

    /// Number of zero-rating items discarded on construction.
    pub fn dropped(&self) -> usize {
        self.dropped
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }
}

pub fn parse_ratings<R: Read>(reader: R, source_name: &str) -> Result<RatingsTable> {
    let parse_err = |line: u64, message: String| Error::Parse {
        source_name: source_name.to_string(),
        line,
        message,
    };
    let mut csv = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header = csv.headers().map_err(|e| parse_err(1, e.to_string()))?.clone();
    if header.is_empty() || (header.len() == 1 && header[0].is_empty()) {
        return Err(parse_err(1, "empty file".into()));
    }
    if header.iter().ne(HEADER) {
        return Err(parse_err(1, format!("expected header `{}`", HEADER.join(","))));
    }
    let mut items = Vec::new();
    for record in csv.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_err(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != HEADER.len() {
            return Err(parse_err(
                line,
                format!("expected {} columns, found {}", HEADER.len(), record.len()),
            ));
        }
        let mut counts = [0u64; 3];
        for (slot, field) in counts.iter_mut().zip(record.iter().skip(1)) {
            *slot = field
                .parse()
                .map_err(|_| parse_err(line, format!("`{field}` is not a rating count")))?;
        }
        items.push(RatedItem {
            id: record[0].to_string(),
            counts,
        });
    }
    if items.is_empty() {
        return Err(parse_err(1, "no data rows".into()));
    }
    let table = RatingsTable::new(items)?;
    if table.dropped() > 0 {
        log::warn!("{source_name}: dropped {} items without ratings", table.dropped());
    }
    Ok(table)
}

pub fn load_ratings(path: impl AsRef<Path>) -> Result<RatingsTable> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_ratings(file, &path.display().to_string())
}

#[derive(Clone, Debug, PartialEq)]
pub struct IngestedMeans<S> {
    pub means: Vec<S>,
    /// Entries raised to exactly 1 by the threshold.
    pub m: usize,
}

/// Favourable fraction of each item divided by the largest fraction.
pub fn normalized_scores<S: Real>(table: &RatingsTable) -> Result<Vec<S>> {
    let items = table.items();
    if items.iter().all(|i| i.total() == 0) {
        return Err(Error::domain("all rating totals are zero"));
    }
    // Largest fraction by exact cross-multiplication.
    let best = items
        .iter()
        .filter(|i| i.total() > 0)
        .max_by(|a, b| {
            let lhs = a.favourable() as u128 * b.total() as u128;
            let rhs = b.favourable() as u128 * a.total() as u128;
            lhs.cmp(&rhs).then(Ordering::Equal)
        })
        .expect("a rated item exists");
    if best.favourable() == 0 {
        return Err(Error::domain("no item has a 2- or 3-star rating; nothing to normalize by"));
    }
    let count = |x: u64| S::from_u64(x).expect("count is representable");
    Ok(items
        .iter()
        .map(|i| (count(i.favourable()) * count(best.total())) / (count(i.total()) * count(best.favourable())))
        .collect())
}

pub fn ratings_to_means<S: Real>(table: &RatingsTable, threshold: S) -> Result<IngestedMeans<S>> {
    if !(threshold > S::zero() && threshold <= S::one()) {
        return Err(Error::domain(format!("threshold {threshold} outside (0, 1]")));
    }
    let means: Vec<S> = normalized_scores(table)?
        .into_iter()
        .map(|p| if p >= threshold { S::one() } else { p })
        .collect();
    let m = means.iter().filter(|&&p| p == S::one()).count();
    Ok(IngestedMeans { means, m })
}

pub fn means_to_instance<S: Real>(means: &[S]) -> Result<BanditInstance<S>> {
    BanditInstance::bernoulli(means)
}
