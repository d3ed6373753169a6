use alloc::string::ToString;

use serde_json::Value;

use crate::error::Error;

/// Parses the first balanced top-level `{...}` region of a reply. Braces
/// inside JSON strings do not count.
pub fn extract_structured(response: &str) -> Result<Value, Error> {
    let start = response
        .find('{')
        .ok_or_else(|| Error::Parse("no JSON object in reply".into()))?;
    let mut depth = 0usize;
    let mut in_string = false;
    let mut escaped = false;
    for (offset, ch) in response[start..].char_indices() {
        if in_string {
            match ch {
                _ if escaped => escaped = false,
                '\\' => escaped = true,
                '"' => in_string = false,
                _ => {}
            }
            continue;
        }
        match ch {
            '"' => in_string = true,
            '{' => depth += 1,
            '}' => {
                depth -= 1;
                if depth == 0 {
                    let region = &response[start..start + offset + 1];
                    return serde_json::from_str(region).map_err(|e| Error::Parse(e.to_string()));
                }
            }
            _ => {}
        }
    }
    Err(Error::Parse("unbalanced braces in reply".into()))
}
