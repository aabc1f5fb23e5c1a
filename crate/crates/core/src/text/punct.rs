/// Broad punctuation class: ASCII punctuation plus the common Unicode
/// punctuation blocks used by Cyrillic, Arabic and Georgian text.
pub fn is_punctuation(c: char) -> bool {
    if c.is_ascii() {
        return c.is_ascii_punctuation();
    }
    matches!(c as u32,
        0x00A1 | 0x00A7 | 0x00AB | 0x00B6 | 0x00B7 | 0x00BB | 0x00BF
        | 0x2010..=0x2027
        | 0x2030..=0x205E
        | 0x3000..=0x303F
        | 0x060C | 0x060D | 0x061B | 0x061E | 0x061F
        | 0x066A..=0x066D
        | 0x06D4
        | 0x10FB
        | 0xFE50..=0xFE6B
        | 0xFF01..=0xFF0F
    )
}

/// Punctuation that is split off the edges of a word. Symbol-like ASCII
/// characters (`#`, `@`, `%`, `/`, ...) stay attached so hashtags, handles
/// and paths survive as single words.
pub fn is_detachable(c: char) -> bool {
    if c.is_ascii() {
        return matches!(
            c,
            '.' | ',' | ';' | ':' | '!' | '?' | '\'' | '"' | '(' | ')' | '[' | ']' | '{' | '}' | '-'
        );
    }
    is_punctuation(c)
}
