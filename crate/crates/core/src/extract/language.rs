//! Character-trigram language identification against bundled reference
//! profiles. Scoring is add-one-smoothed log-likelihood; confidence is the
//! softmax posterior of the winning language.

use std::collections::HashMap;
use std::sync::OnceLock;

/// Texts shorter than this many characters are too thin to score.
const MIN_CHARS: usize = 40;

/// Reference text per language: Universal Declaration of Human Rights
/// article 1 plus a few sentences of consent-and-data prose, so profiles
/// carry both general and domain wording.
const PROFILE_TEXTS: &[(&str, &str)] = &[
    (
        "en",
        "All human beings are born free and equal in dignity and rights. They are endowed \
         with reason and conscience and should act towards one another in a spirit of \
         brotherhood. This website collects personal information about you and about how \
         you use our services. We may share your data with third parties as described in \
         this policy. Please read the following terms carefully before using the site. \
         You can contact us at any time with questions about the information we hold.",
    ),
    (
        "de",
        "Alle Menschen sind frei und gleich an Würde und Rechten geboren. Sie sind mit \
         Vernunft und Gewissen begabt und sollen einander im Geist der Brüderlichkeit \
         begegnen. Diese Webseite erhebt personenbezogene Daten über Sie und darüber, wie \
         Sie unsere Dienste nutzen. Wir können Ihre Daten wie in dieser Erklärung \
         beschrieben an Dritte weitergeben. Bitte lesen Sie die folgenden Bedingungen \
         sorgfältig durch, bevor Sie die Seite verwenden. Sie können uns jederzeit \
         Fragen zu den gespeicherten Angaben stellen.",
    ),
    (
        "fr",
        "Tous les êtres humains naissent libres et égaux en dignité et en droits. Ils \
         sont doués de raison et de conscience et doivent agir les uns envers les autres \
         dans un esprit de fraternité. Ce site recueille des informations personnelles \
         vous concernant et sur la manière dont vous utilisez nos services. Nous pouvons \
         partager vos données avec des tiers comme décrit dans cette politique. Veuillez \
         lire attentivement les conditions suivantes avant d'utiliser le site.",
    ),
    (
        "es",
        "Todos los seres humanos nacen libres e iguales en dignidad y derechos y, dotados \
         como están de razón y conciencia, deben comportarse fraternalmente los unos con \
         los otros. Este sitio web recopila información personal sobre usted y sobre cómo \
         utiliza nuestros servicios. Podemos compartir sus datos con terceros según se \
         describe en esta política. Lea atentamente las siguientes condiciones antes de \
         usar el sitio.",
    ),
    (
        "pt",
        "Todos os seres humanos nascem livres e iguais em dignidade e em direitos. \
         Dotados de razão e de consciência, devem agir uns para com os outros em \
         espírito de fraternidade. Este site recolhe informações pessoais sobre você e \
         sobre como utiliza os nossos serviços. Podemos compartilhar os seus dados com \
         terceiros conforme descrito nesta política. Leia com atenção os seguintes \
         termos antes de usar o site. Não vendemos as suas informações.",
    ),
    (
        "it",
        "Tutti gli esseri umani nascono liberi ed eguali in dignità e diritti. Essi sono \
         dotati di ragione e di coscienza e devono agire gli uni verso gli altri in \
         spirito di fratellanza. Questo sito raccoglie informazioni personali su di te e \
         su come utilizzi i nostri servizi. Possiamo condividere i tuoi dati con terze \
         parti come descritto in questa informativa. Si prega di leggere attentamente le \
         seguenti condizioni prima di utilizzare il sito.",
    ),
    (
        "nl",
        "Alle mensen worden vrij en gelijk in waardigheid en rechten geboren. Zij zijn \
         begiftigd met verstand en geweten, en behoren zich jegens elkander in een geest \
         van broederschap te gedragen. Deze website verzamelt persoonlijke informatie \
         over u en over hoe u onze diensten gebruikt. Wij kunnen uw gegevens delen met \
         derden zoals beschreven in dit beleid. Lees de volgende voorwaarden zorgvuldig \
         door voordat u de site gebruikt.",
    ),
];

struct Profile {
    code: &'static str,
    counts: HashMap<[char; 3], u32>,
    total: u32,
    vocab: u32,
}

fn profiles() -> &'static Vec<Profile> {
    static PROFILES: OnceLock<Vec<Profile>> = OnceLock::new();
    PROFILES.get_or_init(|| {
        PROFILE_TEXTS
            .iter()
            .map(|(code, text)| {
                let mut counts: HashMap<[char; 3], u32> = HashMap::new();
                for tri in trigrams(&normalize(text)) {
                    *counts.entry(tri).or_insert(0) += 1;
                }
                let total = counts.values().sum();
                // +1 vocabulary slot for unseen trigrams
                let vocab = counts.len() as u32 + 1;
                Profile { code, counts, total, vocab }
            })
            .collect()
    })
}

/// Identify the language of `text`, returning a 2-letter code and a
/// confidence in [0, 1]. Texts under 40 characters return ("und", 0).
pub fn detect_language(text: &str) -> (String, f64) {
    if text.chars().count() < MIN_CHARS {
        return ("und".to_string(), 0.0);
    }
    let normalized = normalize(text);
    let tris: Vec<[char; 3]> = trigrams(&normalized).collect();
    if tris.is_empty() {
        return ("und".to_string(), 0.0);
    }
    let scores: Vec<(&str, f64)> = profiles()
        .iter()
        .map(|p| {
            let denom = f64::from(p.total + p.vocab);
            let score: f64 = tris
                .iter()
                .map(|tri| {
                    let c = p.counts.get(tri).copied().unwrap_or(0);
                    (f64::from(c + 1) / denom).ln()
                })
                .sum();
            (p.code, score)
        })
        .collect();

    let best = scores
        .iter()
        .copied()
        .max_by(|a, b| a.1.total_cmp(&b.1).then(b.0.cmp(a.0)))
        .expect("profiles are non-empty");
    let max_score = best.1;
    let z: f64 = scores.iter().map(|(_, s)| (s - max_score).exp()).sum();
    (best.0.to_string(), 1.0 / z)
}

/// True when the detected language is English.
pub fn is_english(text: &str) -> bool {
    detect_language(text).0 == "en"
}

/// Lowercase, non-letters to spaces, space runs collapsed, padded so word
/// boundaries contribute trigrams.
fn normalize(text: &str) -> Vec<char> {
    let mut out = vec![' '];
    for c in text.chars() {
        if c.is_alphabetic() {
            out.extend(c.to_lowercase());
        } else if out.last() != Some(&' ') {
            out.push(' ');
        }
    }
    if out.last() != Some(&' ') {
        out.push(' ');
    }
    out
}

fn trigrams(chars: &[char]) -> impl Iterator<Item = [char; 3]> + '_ {
    chars.windows(3).map(|w| [w[0], w[1], w[2]])
}
