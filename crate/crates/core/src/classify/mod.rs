//! Lexical detection of production and test code.
//!
//! Everything here is regular-expression based, applied to a view of the
//! source with comments and literal contents blanked (see [`CodeView`]).
//! A file is test code if it extends `TestCase`, or failing that, if it
//! both imports from `org.junit` and declares a `setUp()` method.

mod lexer;
mod pairing;
mod profile;

use serde::{Deserialize, Serialize};

pub use lexer::CodeView;
pub use pairing::{expected_unit_basename, match_test_to_unit, TestMatch, TestTarget};
pub use profile::{LanguageProfile, LocPolicy, ProfileError, ProfileSettings};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum FileKind {
    ProductionCode,
    TestCode,
    #[default]
    Other,
}

impl FileKind {
    pub fn is_source(self) -> bool {
        !matches!(self, FileKind::Other)
    }
}

/// Per-file contributions to the size metrics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct FileFacts {
    pub kind: FileKind,
    pub loc: u64,
    pub classes: u64,
    pub test_commands: u64,
}

pub fn classify_file(path: &str, content: &str, profile: &LanguageProfile) -> FileKind {
    if !profile.is_source_path(path) {
        return FileKind::Other;
    }
    classify_code(&CodeView::new(content), profile)
}

fn classify_code(view: &CodeView, profile: &LanguageProfile) -> FileKind {
    let code = view.code.as_str();
    if profile.test_base_class.is_match(code) || (profile.test_import.is_match(code) && profile.setup.is_match(code)) {
        FileKind::TestCode
    } else {
        FileKind::ProductionCode
    }
}

fn line_of(code: &str, offset: usize) -> usize {
    code.as_bytes()[..offset].iter().filter(|&&b| b == b'\n').count()
}

fn test_command_lines(code: &str, profile: &LanguageProfile) -> Vec<usize> {
    let mut lines: Vec<usize> = profile
        .test_command
        .captures_iter(code)
        .map(|caps| {
            let at = caps
                .name("name")
                .or_else(|| caps.get(1))
                .map_or_else(|| caps.get(0).unwrap().end(), |m| m.start());
            line_of(code, at)
        })
        .collect();

    if profile.count_annotated {
        for ann in profile.annotation.find_iter(code) {
            let line_start = code[..ann.start()].rfind('\n').map_or(0, |p| p + 1);
            let next_decl = profile
                .method_decl
                .captures_iter(&code[line_start..])
                .filter_map(|c| c.name("name"))
                .map(|m| line_start + m.start())
                .find(|&at| at > ann.end());
            if let Some(at) = next_decl {
                lines.push(line_of(code, at));
            }
        }
    }
    lines.sort_unstable();
    lines.dedup();
    lines
}

/// Number of test commands: methods at a declaration site whose name starts
/// with `test` (per the profile), plus annotated methods in annotation mode.
pub fn count_test_commands(content: &str, profile: &LanguageProfile) -> u64 {
    test_command_lines(&CodeView::new(content).code, profile).len() as u64
}

pub fn count_classes(content: &str, profile: &LanguageProfile) -> u64 {
    profile.class_decl.find_iter(&CodeView::new(content).code).count() as u64
}

/// Method declarations found by the generic declaration pattern.
pub fn count_methods(content: &str, profile: &LanguageProfile) -> u64 {
    let view = CodeView::new(content);
    profile
        .method_decl
        .captures_iter(&view.code)
        .filter(|c| c.name("type").is_some_and(|t| !is_statement_keyword(t.as_str())))
        .count() as u64
}

fn is_statement_keyword(word: &str) -> bool {
    matches!(
        word,
        "return" | "new" | "throw" | "else" | "case" | "yield" | "assert" | "goto"
    )
}

pub fn count_loc(content: &str, profile: &LanguageProfile) -> u64 {
    match profile.loc_policy {
        LocPolicy::Raw => content.lines().count() as u64,
        LocPolicy::NonBlank => content.lines().filter(|l| !l.trim().is_empty()).count() as u64,
        LocPolicy::NonBlankNonComment => CodeView::new(content).line_has_code.iter().filter(|&&c| c).count() as u64,
    }
}

/// Classifies one file revision and computes all of its metric contributions
/// with a single lexing pass.
pub fn analyze_file(path: &str, content: &str, profile: &LanguageProfile) -> FileFacts {
    if !profile.is_source_path(path) {
        return FileFacts {
            kind: FileKind::Other,
            ..FileFacts::default()
        };
    }
    let view = CodeView::new(content);
    let kind = classify_code(&view, profile);
    let loc = match profile.loc_policy {
        LocPolicy::NonBlankNonComment => view.line_has_code.iter().filter(|&&c| c).count() as u64,
        _ => count_loc(content, profile),
    };
    let classes = profile.class_decl.find_iter(&view.code).count() as u64;
    let test_commands = if kind == FileKind::TestCode {
        test_command_lines(&view.code, profile).len() as u64
    } else {
        0
    };
    FileFacts {
        kind,
        loc,
        classes,
        test_commands,
    }
}
