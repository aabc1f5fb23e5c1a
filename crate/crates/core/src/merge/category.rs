use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::MergePlan;
use crate::tokenizer::TokenKind;

/// Role of a token id in a merged vocabulary, used to attribute tokens in
/// adoption statistics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    /// Shared by both source models.
    ExistingTarget,
    /// Taken from the target model into an evicted slot.
    NewTarget,
    English,
    Byte,
    Other,
}

impl Category {
    pub const ALL: [Category; 5] = [
        Category::ExistingTarget,
        Category::NewTarget,
        Category::English,
        Category::Byte,
        Category::Other,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Category::ExistingTarget => "existing_target",
            Category::NewTarget => "new_target",
            Category::English => "english",
            Category::Byte => "byte",
            Category::Other => "other",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Category {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Category::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| format!("unknown category {s:?}"))
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum CategoryMapError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("ids are not dense: expected {expected} on line {line}")]
    NonDense { line: usize, expected: usize },
}

/// One category per token id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CategoryMap {
    categories: Vec<Category>,
}

impl CategoryMap {
    pub fn new(categories: Vec<Category>) -> Self {
        Self { categories }
    }

    pub fn from_plan(plan: &MergePlan) -> Self {
        let categories = plan
            .resulting_model
            .entries()
            .iter()
            .map(|e| {
                if plan.overlapped.contains_key(&e.id) {
                    Category::ExistingTarget
                } else if plan.kept_english.contains(&e.id) {
                    Category::English
                } else if e.kind == TokenKind::Byte {
                    Category::Byte
                } else {
                    Category::Other
                }
            })
            .collect();
        let mut map = Self { categories };
        for s in &plan.added {
            map.categories[s.id as usize] = Category::NewTarget;
        }
        map
    }

    pub fn len(&self) -> usize {
        self.categories.len()
    }

    pub fn is_empty(&self) -> bool {
        self.categories.is_empty()
    }

    pub fn get(&self, id: u32) -> Option<Category> {
        self.categories.get(id as usize).copied()
    }

    pub fn as_slice(&self) -> &[Category] {
        &self.categories
    }

    pub fn histogram(&self) -> BTreeMap<Category, usize> {
        let mut h: BTreeMap<Category, usize> = Category::ALL.iter().map(|c| (*c, 0)).collect();
        for c in &self.categories {
            *h.get_mut(c).unwrap() += 1;
        }
        h
    }

    /// `<id>\t<category>` per line.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (id, c) in self.categories.iter().enumerate() {
            out.push_str(&format!("{id}\t{c}\n"));
        }
        out
    }

    pub fn from_tsv(text: &str) -> Result<Self, CategoryMapError> {
        let mut categories = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            let syntax = |message: String| CategoryMapError::Syntax { line: line_no, message };
            let (id, cat) = line
                .split_once('\t')
                .ok_or_else(|| syntax("expected <id>\\t<category>".into()))?;
            let id: usize = id.parse().map_err(|_| syntax(format!("bad id {id:?}")))?;
            if id != categories.len() {
                return Err(CategoryMapError::NonDense {
                    line: line_no,
                    expected: categories.len(),
                });
            }
            categories.push(cat.parse().map_err(syntax)?);
        }
        Ok(Self { categories })
    }
}

pub fn emit_category_map(plan: &MergePlan) -> CategoryMap {
    CategoryMap::from_plan(plan)
}
