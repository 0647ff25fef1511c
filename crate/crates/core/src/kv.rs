//! `key = value` text files, shared by templates, model parameters, grid
//! specs and run configuration.

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct KvError {
    pub line: usize,
    pub message: String,
}

impl KvError {
    pub fn new(line: usize, message: impl Into<String>) -> Self {
        KvError {
            line,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KvLine {
    pub line: usize,
    pub key: String,
    pub value: String,
}

/// Splits `text` into key/value pairs. Blank lines and `#` comments are
/// skipped; keys may not repeat.
pub fn parse(text: &str) -> Result<Vec<KvLine>, KvError> {
    let mut out: Vec<KvLine> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let (key, value) = trimmed
            .split_once('=')
            .ok_or_else(|| KvError::new(line, format!("expected `key = value`, got `{trimmed}`")))?;
        let key = key.trim();
        if key.is_empty() {
            return Err(KvError::new(line, "empty key"));
        }
        if out.iter().any(|kv| kv.key == key) {
            return Err(KvError::new(line, format!("duplicate key `{key}`")));
        }
        out.push(KvLine {
            line,
            key: key.to_string(),
            value: value.trim().to_string(),
        });
    }
    Ok(out)
}

pub fn parse_value<T: std::str::FromStr>(kv: &KvLine) -> Result<T, KvError>
where
    T::Err: std::fmt::Display,
{
    kv.value
        .parse()
        .map_err(|e| KvError::new(kv.line, format!("bad value for `{}`: {e}", kv.key)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_pairs() {
        let kv = parse("# c\n\na = 1\n b=two words \n").unwrap();
        assert_eq!(kv.len(), 2);
        assert_eq!(kv[0].key, "a");
        assert_eq!(kv[1].value, "two words");
        assert_eq!(kv[1].line, 4);
    }

    #[test]
    fn errors_name_the_line() {
        assert_eq!(parse("a = 1\nnonsense\n").unwrap_err().line, 2);
        assert_eq!(parse("a = 1\na = 2\n").unwrap_err().line, 2);
        let kv = parse("x = abc").unwrap();
        assert!(parse_value::<f64>(&kv[0]).is_err());
    }
}
