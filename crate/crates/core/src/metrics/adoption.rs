use serde::{Deserialize, Serialize};

use super::{Category, CategoryMap, MetricsError};

/// Token counts per category for one slice of a stream.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdoptionSlice {
    pub slice: String,
    pub total: u64,
    pub existing: u64,
    pub new: u64,
    pub english: u64,
    pub byte: u64,
    pub other: u64,
}

impl AdoptionSlice {
    pub fn count(&self, c: Category) -> u64 {
        match c {
            Category::ExistingTarget => self.existing,
            Category::NewTarget => self.new,
            Category::English => self.english,
            Category::Byte => self.byte,
            Category::Other => self.other,
        }
    }

    pub fn fraction(&self, c: Category) -> f64 {
        self.count(c) as f64 / self.total as f64
    }

    /// Fractions in the order existing, new, english, byte, other.
    pub fn fractions(&self) -> [f64; 5] {
        Category::ALL.map(|c| self.fraction(c))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdoptionReport {
    pub slices: Vec<AdoptionSlice>,
}

impl AdoptionReport {
    /// `slice,existing,new,english,byte,other` with fractions.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("slice,existing,new,english,byte,other\n");
        for s in &self.slices {
            let f = s.fractions();
            out.push_str(&format!("{},{},{},{},{},{}\n", s.slice, f[0], f[1], f[2], f[3], f[4]));
        }
        out
    }
}

pub fn categorize_stream(slice: &str, ids: &[u32], map: &CategoryMap) -> Result<AdoptionSlice, MetricsError> {
    if ids.is_empty() {
        return Err(MetricsError::EmptySlice {
            slice: slice.to_string(),
        });
    }
    let mut s = AdoptionSlice {
        slice: slice.to_string(),
        total: ids.len() as u64,
        existing: 0,
        new: 0,
        english: 0,
        byte: 0,
        other: 0,
    };
    for &id in ids {
        let c = map.get(id).ok_or(MetricsError::IdOutOfRange { id, size: map.len() })?;
        *match c {
            Category::ExistingTarget => &mut s.existing,
            Category::NewTarget => &mut s.new,
            Category::English => &mut s.english,
            Category::Byte => &mut s.byte,
            Category::Other => &mut s.other,
        } += 1;
    }
    Ok(s)
}

pub fn categorize_slices<'a, I>(slices: I, map: &CategoryMap) -> Result<AdoptionReport, MetricsError>
where
    I: IntoIterator<Item = (&'a str, &'a [u32])>,
{
    let slices = slices
        .into_iter()
        .map(|(name, ids)| categorize_stream(name, ids, map))
        .collect::<Result<_, _>>()?;
    Ok(AdoptionReport { slices })
}
