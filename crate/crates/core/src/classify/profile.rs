use std::path::Path;

use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LocPolicy {
    Raw,
    NonBlank,
    #[default]
    NonBlankNonComment,
}

#[derive(Debug, Error)]
pub enum ProfileError {
    #[error("pattern `{field}` does not compile: {source}")]
    Pattern {
        field: &'static str,
        #[source]
        source: Box<regex::Error>,
    },
    #[error("test_suffixes must not be empty")]
    NoSuffixes,
    #[error("source_extensions must not be empty")]
    NoExtensions,
    #[error("invalid profile file: {0}")]
    Toml(#[from] toml::de::Error),
}

const MODIFIERS: &str = "public|protected|private|static|final|synchronized|abstract|native|strictfp";
const ANNOTATIONS: &str = r"(?:@[\w$.]+(?:\([^)\n]*\))?[ \t]+)*";

fn default_test_command() -> String {
    format!(r"(?m)^[ \t]*{ANNOTATIONS}(?:(?:{MODIFIERS})[ \t]+)*void[ \t]+(?P<name>test[\w$]*)[ \t]*\(")
}

fn default_method_decl() -> String {
    format!(
        r"(?m)^[ \t]*{ANNOTATIONS}(?:(?:{MODIFIERS}|default)[ \t]+)*(?:<[^>\n]*>[ \t]+)?(?P<type>[\w$.]+(?:<[^()\n]*>)?(?:\[\])*)[ \t]+(?P<name>[\w$]+)[ \t]*\("
    )
}

/// Textual profile as read from a configuration file. Every key is
/// optional; missing keys fall back to the Java/jUnit defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProfileSettings {
    pub source_extensions: Vec<String>,
    pub test_suffixes: Vec<String>,
    pub test_prefixes: Vec<String>,
    pub test_base_class_pattern: String,
    pub test_import_pattern: String,
    pub setup_pattern: String,
    pub test_command_pattern: String,
    pub annotation_pattern: String,
    pub count_annotated: bool,
    pub class_decl_pattern: String,
    pub method_decl_pattern: String,
    pub loc_policy: LocPolicy,
}

impl Default for ProfileSettings {
    fn default() -> Self {
        Self {
            source_extensions: vec![".java".into()],
            test_suffixes: vec!["Test".into()],
            test_prefixes: Vec::new(),
            test_base_class_pattern: r"\bextends\s+(?:junit\.framework\.)?TestCase\b".into(),
            test_import_pattern: r"\bimport\s+(?:static\s+)?org\.junit\.".into(),
            setup_pattern: r"\bvoid\s+setUp\s*\(".into(),
            test_command_pattern: default_test_command(),
            annotation_pattern: r"@(?:org\.junit\.)?Test\b".into(),
            count_annotated: false,
            class_decl_pattern: r"(?:^|[^\w$.])(?:class|interface|enum)\s+[A-Za-z_$][\w$]*".into(),
            method_decl_pattern: default_method_decl(),
            loc_policy: LocPolicy::NonBlankNonComment,
        }
    }
}

/// Compiled detection heuristics for one language.
#[derive(Debug, Clone)]
pub struct LanguageProfile {
    pub source_extensions: Vec<String>,
    pub test_suffixes: Vec<String>,
    /// Basename prefixes such as `Test` in `TestFoo`; empty by default.
    pub test_prefixes: Vec<String>,
    pub test_base_class: Regex,
    pub test_import: Regex,
    pub setup: Regex,
    pub test_command: Regex,
    pub annotation: Regex,
    /// Also count methods marked by `annotation` (jUnit 4 style).
    pub count_annotated: bool,
    pub class_decl: Regex,
    pub method_decl: Regex,
    pub loc_policy: LocPolicy,
}

impl Default for LanguageProfile {
    fn default() -> Self {
        Self::java()
    }
}

fn compile(field: &'static str, pattern: &str) -> Result<Regex, ProfileError> {
    Regex::new(pattern).map_err(|e| ProfileError::Pattern {
        field,
        source: Box::new(e),
    })
}

impl LanguageProfile {
    pub fn java() -> Self {
        Self::from_settings(&ProfileSettings::default()).expect("built-in profile compiles")
    }

    pub fn from_settings(settings: &ProfileSettings) -> Result<Self, ProfileError> {
        if settings.test_suffixes.is_empty() {
            return Err(ProfileError::NoSuffixes);
        }
        if settings.source_extensions.is_empty() {
            return Err(ProfileError::NoExtensions);
        }
        Ok(Self {
            source_extensions: settings
                .source_extensions
                .iter()
                .map(|e| e.trim_start_matches('.').to_string())
                .collect(),
            test_suffixes: settings.test_suffixes.clone(),
            test_prefixes: settings.test_prefixes.clone(),
            test_base_class: compile("test_base_class_pattern", &settings.test_base_class_pattern)?,
            test_import: compile("test_import_pattern", &settings.test_import_pattern)?,
            setup: compile("setup_pattern", &settings.setup_pattern)?,
            test_command: compile("test_command_pattern", &settings.test_command_pattern)?,
            annotation: compile("annotation_pattern", &settings.annotation_pattern)?,
            count_annotated: settings.count_annotated,
            class_decl: compile("class_decl_pattern", &settings.class_decl_pattern)?,
            method_decl: compile("method_decl_pattern", &settings.method_decl_pattern)?,
            loc_policy: settings.loc_policy,
        })
    }

    /// Parses a TOML profile; keys mirror [`ProfileSettings`].
    pub fn from_toml(text: &str) -> Result<Self, ProfileError> {
        let settings: ProfileSettings = toml::from_str(text)?;
        Self::from_settings(&settings)
    }

    pub fn is_source_path(&self, path: &str) -> bool {
        Path::new(path)
            .extension()
            .and_then(|e| e.to_str())
            .is_some_and(|ext| self.source_extensions.iter().any(|s| s == ext))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn source_extension_matching() {
        let p = LanguageProfile::java();
        assert!(p.is_source_path("src/a/Foo.java"));
        assert!(!p.is_source_path("src/a/Foo.javax"));
        assert!(!p.is_source_path("README.md"));
        assert!(!p.is_source_path("java"));
    }

    #[test]
    fn toml_overrides_defaults() {
        let p = LanguageProfile::from_toml(
            "source_extensions = [\".java\", \"groovy\"]\ntest_suffixes = [\"Test\", \"Tests\"]\nloc_policy = \"raw\"\n",
        )
        .unwrap();
        assert!(p.is_source_path("x/Y.groovy"));
        assert_eq!(p.test_suffixes, ["Test", "Tests"]);
        assert_eq!(p.loc_policy, LocPolicy::Raw);
        assert!(p.setup.is_match("void setUp()"));
    }

    #[test]
    fn bad_profiles() {
        assert!(matches!(
            LanguageProfile::from_toml("setup_pattern = \"(\"\n"),
            Err(ProfileError::Pattern {
                field: "setup_pattern",
                ..
            })
        ));
        assert!(matches!(
            LanguageProfile::from_toml("test_suffixes = []\n"),
            Err(ProfileError::NoSuffixes)
        ));
        assert!(matches!(
            LanguageProfile::from_toml("no_such_key = 1\n"),
            Err(ProfileError::Toml(_))
        ));
    }
}
