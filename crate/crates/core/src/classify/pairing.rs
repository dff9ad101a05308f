//! Naming-convention pairing of unit tests with production units.

use super::LanguageProfile;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TestTarget {
    Unit(String),
    Integration,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TestMatch {
    pub target: TestTarget,
    /// Candidates that tied under the directory tie-break. Non-empty only
    /// when the tie forced the test to be treated as an integration test.
    pub ambiguous: Vec<String>,
}

impl TestMatch {
    fn integration() -> Self {
        Self {
            target: TestTarget::Integration,
            ambiguous: Vec::new(),
        }
    }
}

fn split_basename(path: &str) -> (&str, &str) {
    let base = path.rsplit('/').next().unwrap_or(path);
    match base.rfind('.') {
        Some(dot) if dot > 0 => (&base[..dot], &base[dot..]),
        _ => (base, ""),
    }
}

fn dir_components(path: &str) -> Vec<&str> {
    let mut parts: Vec<&str> = path.split('/').filter(|p| !p.is_empty()).collect();
    parts.pop();
    parts
}

/// Basename of the production unit a test file is named after: the first
/// matching suffix from the profile is stripped (`FooTest.java` gives
/// `Foo.java`); prefixes are tried only when no suffix matches.
pub fn expected_unit_basename(test_path: &str, profile: &LanguageProfile) -> Option<String> {
    let (stem, ext) = split_basename(test_path);
    let stripped = profile
        .test_suffixes
        .iter()
        .find(|s| !s.is_empty() && stem.ends_with(s.as_str()))
        .map(|s| &stem[..stem.len() - s.len()])
        .or_else(|| {
            profile
                .test_prefixes
                .iter()
                .find(|p| !p.is_empty() && stem.starts_with(p.as_str()))
                .map(|p| &stem[p.len()..])
        })?;
    if stripped.is_empty() {
        return None;
    }
    Some(format!("{stripped}{ext}"))
}

fn common_dir_prefix(a: &[&str], b: &[&str]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}

/// Pairs a test file with a production unit among `live_production_paths`.
///
/// Basenames compare case-sensitively. Several candidates are resolved by
/// the longest common directory prefix with the test; a tie there leaves
/// the test unpaired (integration) and reports the tied candidates.
pub fn match_test_to_unit<'a, I>(test_path: &str, live_production_paths: I, profile: &LanguageProfile) -> TestMatch
where
    I: IntoIterator<Item = &'a str>,
{
    let Some(wanted) = expected_unit_basename(test_path, profile) else {
        return TestMatch::integration();
    };
    let test_dirs = dir_components(test_path);
    let mut best: Vec<&str> = Vec::new();
    let mut best_score = 0;
    for candidate in live_production_paths {
        if candidate.rsplit('/').next() != Some(wanted.as_str()) {
            continue;
        }
        let score = common_dir_prefix(&test_dirs, &dir_components(candidate));
        if best.is_empty() || score > best_score {
            best.clear();
            best.push(candidate);
            best_score = score;
        } else if score == best_score {
            best.push(candidate);
        }
    }
    match best.len() {
        0 => TestMatch::integration(),
        1 => TestMatch {
            target: TestTarget::Unit(best[0].to_string()),
            ambiguous: Vec::new(),
        },
        _ => {
            let mut ambiguous: Vec<String> = best.iter().map(|s| s.to_string()).collect();
            ambiguous.sort();
            TestMatch {
                target: TestTarget::Integration,
                ambiguous,
            }
        }
    }
}
