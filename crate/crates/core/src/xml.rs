//! Small helpers shared by the XES and PNML readers.

use quick_xml::events::BytesStart;

use crate::error::Error;

/// 1-based line and column of a byte offset.
pub(crate) fn line_column(input: &[u8], offset: usize) -> (usize, usize) {
    let offset = offset.min(input.len());
    let before = &input[..offset];
    let line = before.iter().filter(|&&b| b == b'\n').count() + 1;
    let column = match before.iter().rposition(|&b| b == b'\n') {
        Some(nl) => offset - nl,
        None => offset + 1,
    };
    (line, column)
}

pub(crate) fn parse_error(input: &[u8], offset: u64, message: impl Into<String>) -> Error {
    let (line, column) = line_column(input, offset as usize);
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

/// Looks up an attribute by local name and returns its unescaped value.
pub(crate) fn attribute(
    input: &[u8],
    offset: u64,
    element: &BytesStart<'_>,
    name: &str,
) -> Result<Option<String>, Error> {
    for attr in element.attributes() {
        let attr = attr.map_err(|e| parse_error(input, offset, e.to_string()))?;
        if attr.key.local_name().as_ref() == name.as_bytes() {
            let value = attr
                .unescape_value()
                .map_err(|e| parse_error(input, offset, e.to_string()))?;
            return Ok(Some(value.into_owned()));
        }
    }
    Ok(None)
}
