//! Seeded synthetic corpora with planted mention counts.
//!
//! Every generator is deterministic for a given seed; the planted per-day
//! counts are the ground truth the generated articles reproduce.

use chrono::{Days, NaiveDate};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::RawArticle;
use crate::ner::MentionEvent;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyntheticCorpus {
    pub start: NaiveDate,
    pub days: usize,
    /// `(canonical name, per-day counts)`.
    pub series: Vec<(String, Vec<u32>)>,
}

pub fn default_start() -> NaiveDate {
    NaiveDate::from_ymd_opt(2016, 1, 1).expect("valid date")
}

impl SyntheticCorpus {
    /// Two persons with independent random counts for `half` days, then
    /// identical counts for another `half` days.
    pub fn regime_switch(seed: u64, half: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut a = Vec::with_capacity(2 * half);
        let mut b = Vec::with_capacity(2 * half);
        for day in 0..2 * half {
            let x = rng.random_range(0..10u32);
            let y = if day < half { rng.random_range(0..10u32) } else { x };
            a.push(x);
            b.push(y);
        }
        Self {
            start: default_start(),
            days: 2 * half,
            series: vec![("Alder".into(), a), ("Birch".into(), b)],
        }
    }

    /// Person `i` (1-based) receives `top / i` mentions spread round-robin
    /// over `days` days. Names are zero-padded so name order equals rank order.
    pub fn zipf(persons: usize, top: u32, days: usize) -> Self {
        let series = (1..=persons)
            .map(|i| {
                let total = top / i as u32;
                let mut counts = vec![0u32; days];
                for k in 0..total as usize {
                    counts[(k + i) % days] += 1;
                }
                (format!("P{i:03}"), counts)
            })
            .collect();
        Self {
            start: default_start(),
            days,
            series,
        }
    }

    /// Random non-negative counts for `persons` persons.
    pub fn random(seed: u64, persons: usize, days: usize, max: u32) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let series = (0..persons)
            .map(|p| {
                let counts = (0..days).map(|_| rng.random_range(0..=max)).collect();
                (format!("Q{p:03}"), counts)
            })
            .collect();
        Self {
            start: default_start(),
            days,
            series,
        }
    }

    pub fn date(&self, day: usize) -> NaiveDate {
        self.start + Days::new(day as u64)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.series.iter().map(|(n, _)| n.as_str())
    }

    /// One article per day naming each person once per planted mention.
    pub fn articles(&self) -> Vec<RawArticle> {
        (0..self.days)
            .map(|day| {
                let mut body = String::from("Markets were quiet.");
                for (name, counts) in &self.series {
                    for _ in 0..counts[day] {
                        body.push_str(" Officials said ");
                        body.push_str(name);
                        body.push_str(" commented.");
                    }
                }
                let date = self.date(day).to_string();
                RawArticle {
                    id: Some(format!("syn-{date}")),
                    date: Some(date),
                    title: Some("Daily briefing".into()),
                    body: Some(body),
                    source: Some("synthetic".into()),
                    language: Some("en".into()),
                }
            })
            .collect()
    }

    pub fn to_jsonl(&self) -> String {
        self.articles()
            .iter()
            .map(|a| serde_json::to_string(a).expect("raw article serializes") + "\n")
            .collect()
    }

    /// Gazetteer file contents listing every planted person.
    pub fn gazetteer(&self) -> String {
        self.names().map(|n| format!("{n}\n")).collect()
    }

    /// Mention events matching the planted counts.
    pub fn events(&self) -> Vec<MentionEvent> {
        let mut out = Vec::new();
        for (name, counts) in &self.series {
            for (day, &c) in counts.iter().enumerate() {
                for k in 0..c as usize {
                    out.push(MentionEvent {
                        article_id: format!("syn-{}", self.date(day)),
                        date: self.date(day),
                        surface: name.clone(),
                        canonical: name.clone(),
                        char_offset: k,
                    });
                }
            }
        }
        out
    }
}
