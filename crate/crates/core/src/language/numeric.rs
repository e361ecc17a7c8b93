/// Share of characters that are digits. `None` for the empty string.
pub fn digit_ratio(text: &str) -> Option<f64> {
    let mut total = 0usize;
    let mut digits = 0usize;
    for c in text.chars() {
        total += 1;
        if c.is_numeric() {
            digits += 1;
        }
    }
    (total > 0).then(|| digits as f64 / total as f64)
}

/// At least half of the characters are digits. The empty string counts as
/// numeric so it never reaches language analysis.
pub fn is_numeric_literal(text: &str) -> bool {
    digit_ratio(text).is_none_or(|r| r >= 0.5)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert!(is_numeric_literal("12345"));
        assert!(!is_numeric_literal("Red shoes"));
        assert!(is_numeric_literal("a1b2"));
        assert!(is_numeric_literal(""));
        assert!(!is_numeric_literal("ab1"));
        assert!(is_numeric_literal("٣٤x"));
        assert_eq!(digit_ratio("a1b2"), Some(0.5));
        assert_eq!(digit_ratio(""), None);
    }
}
