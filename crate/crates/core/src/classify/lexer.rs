//! Comment and literal stripping for C-family sources.

/// Source text with comments and literal contents blanked out, plus a
/// per-line record of which lines carry code.
#[derive(Debug, Clone)]
pub struct CodeView {
    /// Same line structure as the input; comments become spaces and string
    /// or char literal contents become spaces (delimiters are kept).
    pub code: String,
    /// For each line of the input: does it contain anything outside comments?
    pub line_has_code: Vec<bool>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum State {
    Code,
    LineComment,
    BlockComment,
    Str,
    Char,
    TextBlock,
}

impl CodeView {
    pub fn new(source: &str) -> Self {
        let mut code = String::with_capacity(source.len());
        let mut line_has_code = Vec::new();
        let mut current_has_code = false;
        let mut state = State::Code;
        let chars: Vec<char> = source.chars().collect();
        let mut i = 0;

        let at = |i: usize, s: &str| {
            s.chars()
                .enumerate()
                .all(|(k, expected)| chars.get(i + k) == Some(&expected))
        };

        while i < chars.len() {
            let c = chars[i];
            if c == '\n' {
                line_has_code.push(current_has_code);
                current_has_code = false;
                code.push('\n');
                match state {
                    State::LineComment | State::Str | State::Char => state = State::Code,
                    _ => {}
                }
                i += 1;
                continue;
            }
            match state {
                State::Code => {
                    if at(i, "//") {
                        state = State::LineComment;
                        code.push_str("  ");
                        i += 2;
                        continue;
                    }
                    if at(i, "/*") {
                        state = State::BlockComment;
                        code.push_str("  ");
                        i += 2;
                        continue;
                    }
                    if !c.is_whitespace() {
                        current_has_code = true;
                    }
                    if at(i, "\"\"\"") {
                        state = State::TextBlock;
                        code.push_str("\"\"\"");
                        i += 3;
                        continue;
                    }
                    match c {
                        '"' => state = State::Str,
                        '\'' => state = State::Char,
                        _ => {}
                    }
                    code.push(c);
                }
                State::LineComment => code.push(' '),
                State::BlockComment => {
                    if at(i, "*/") {
                        state = State::Code;
                        code.push_str("  ");
                        i += 2;
                        continue;
                    }
                    code.push(' ');
                }
                State::Str | State::Char => {
                    current_has_code = true;
                    let close = if state == State::Str { '"' } else { '\'' };
                    if c == '\\' && chars.get(i + 1).is_some_and(|&n| n != '\n') {
                        code.push_str("  ");
                        i += 2;
                        continue;
                    }
                    if c == close {
                        state = State::Code;
                        code.push(c);
                    } else {
                        code.push(' ');
                    }
                }
                State::TextBlock => {
                    if !c.is_whitespace() {
                        current_has_code = true;
                    }
                    if c == '\\' && chars.get(i + 1).is_some_and(|&n| n != '\n') {
                        code.push_str("  ");
                        i += 2;
                        continue;
                    }
                    if at(i, "\"\"\"") {
                        state = State::Code;
                        code.push_str("\"\"\"");
                        i += 3;
                        continue;
                    }
                    code.push(' ');
                }
            }
            i += 1;
        }
        if !source.is_empty() && !source.ends_with('\n') {
            line_has_code.push(current_has_code);
        }
        Self { code, line_has_code }
    }
}
