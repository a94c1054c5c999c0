//! A small rule-based lemmatizer for lowercase tokens: irregular-form
//! lookup, then one ordered suffix rule. Stems never drop below 3
//! characters; a rule that would do so does not fire.

const IRREGULARS: [(&str, &str); 10] = [
    ("children", "child"),
    ("men", "man"),
    ("women", "woman"),
    ("feet", "foot"),
    ("teeth", "tooth"),
    ("mice", "mouse"),
    ("geese", "goose"),
    ("people", "person"),
    ("cookies", "cookie"),
    ("movies", "movie"),
];

const MIN_STEM: usize = 3;

pub fn lemmatize(token: &str) -> String {
    if let Some(&(_, lemma)) = IRREGULARS.iter().find(|(form, _)| *form == token) {
        return lemma.to_string();
    }
    // first applicable rule wins
    if let Some(stem) = token.strip_suffix("ies") {
        let lemma = format!("{stem}y");
        if lemma.len() >= MIN_STEM {
            return lemma;
        }
    }
    if let Some(stem) = token.strip_suffix("sses") {
        let lemma = format!("{stem}ss");
        if lemma.len() >= MIN_STEM {
            return lemma;
        }
    }
    if token.ends_with('s')
        && !token.ends_with("ss")
        && !token.ends_with("us")
        && !token.ends_with("is")
    {
        let stem = &token[..token.len() - 1];
        if stem.len() >= MIN_STEM {
            return stem.to_string();
        }
    }
    if let Some(stem) = token.strip_suffix("ing") {
        if stem.len() >= MIN_STEM {
            return undouble(stem);
        }
    }
    if let Some(stem) = token.strip_suffix("ed") {
        if stem.len() >= MIN_STEM {
            return undouble(stem);
        }
    }
    token.to_string()
}

/// Repair consonant doubling after suffix stripping ("runn" → "run"),
/// leaving natural doubles ll/ss/zz alone and never shortening below the
/// minimum stem.
fn undouble(stem: &str) -> String {
    let bytes = stem.as_bytes();
    let n = bytes.len();
    if n >= MIN_STEM + 1 && bytes[n - 1] == bytes[n - 2] && bytes[n - 1].is_ascii_alphabetic() {
        let c = bytes[n - 1];
        if c != b'l' && c != b's' && c != b'z' {
            return stem[..n - 1].to_string();
        }
    }
    stem.to_string()
}
