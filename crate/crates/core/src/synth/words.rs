//! Per-language vocabularies for planted text. The lists are pairwise
//! disjoint so every generated sentence has exactly one true language.

pub(crate) struct Lexicon {
    pub code: &'static str,
    pub tags: &'static [&'static str],
    pub adjectives: &'static [&'static str],
    pub nouns: &'static [&'static str],
}

pub(crate) const LEXICONS: &[Lexicon] = &[
    Lexicon {
        code: "en",
        tags: &["en", "en-US", "en-GB", "EN"],
        adjectives: &["bright", "sturdy", "elegant", "lightweight", "durable", "compact", "classic", "waterproof", "soft", "modern"],
        nouns: &["jacket", "kettle", "backpack", "blender", "lantern", "sneaker", "wallet", "blanket", "headphones", "toaster"],
    },
    Lexicon {
        code: "de",
        tags: &["de", "de-DE", "de-AT", "de-CH", "DE"],
        adjectives: &["leichter", "robuster", "eleganter", "praktischer", "wasserdichter", "kleiner", "schneller", "weicher", "klassischer", "neuer"],
        nouns: &["Wasserkocher", "Rucksack", "Laufschuh", "Geldbeutel", "Kopfhörer", "Bettdecke", "Staubsauger", "Handtuch", "Werkzeugkasten", "Fahrradhelm"],
    },
    Lexicon {
        code: "fr",
        tags: &["fr", "fr-FR", "fr-BE", "fr-CA"],
        adjectives: &["léger", "élégant", "pratique", "imperméable", "doux", "rapide", "ancien", "joli", "solide", "nouvelle"],
        nouns: &["bouilloire", "sac à dos", "chaussure", "portefeuille", "couverture", "casque", "grille-pain", "lampe", "montre", "écharpe"],
    },
    Lexicon {
        code: "es",
        tags: &["es", "es-ES", "es-MX", "es-AR"],
        adjectives: &["ligero", "resistente", "bonito", "cómodo", "barato", "suave", "rápido", "nuevo", "grande", "pequeño"],
        nouns: &["mochila", "zapatilla", "cartera", "manta", "auriculares", "tostadora", "linterna", "chaqueta", "reloj", "bufanda"],
    },
    Lexicon {
        code: "it",
        tags: &["it", "it-IT", "it-CH"],
        adjectives: &["leggero", "raffinato", "comodo", "robusto", "morbido", "veloce", "nuovo", "piccolo", "bello", "economico"],
        nouns: &["zaino", "scarpa", "portafoglio", "coperta", "cuffie", "tostapane", "lanterna", "giacca", "orologio", "sciarpa"],
    },
    Lexicon {
        code: "nl",
        tags: &["nl", "nl-NL", "nl-BE"],
        adjectives: &["lichte", "stevige", "mooie", "handige", "zachte", "snelle", "nieuwe", "kleine", "waterdichte", "goedkope"],
        nouns: &["waterkoker", "rugzak", "hardloopschoen", "portemonnee", "deken", "koptelefoon", "broodrooster", "zaklamp", "jas", "sjaal"],
    },
    Lexicon {
        code: "ru",
        tags: &["ru", "ru-RU", "RU"],
        adjectives: &["лёгкий", "прочный", "красивый", "удобный", "мягкий", "быстрый", "новый", "маленький", "тёплый", "дешёвый"],
        nouns: &["чайник", "рюкзак", "кроссовки", "кошелёк", "одеяло", "наушники", "тостер", "фонарик", "куртка", "шарф"],
    },
    Lexicon {
        code: "pl",
        tags: &["pl", "pl-PL"],
        adjectives: &["lekki", "mocny", "ładny", "wygodny", "miękki", "szybki", "nowy", "mały", "ciepły", "tani"],
        nouns: &["czajnik", "plecak", "buty", "portfel", "koc", "słuchawki", "toster", "latarka", "kurtka", "szalik"],
    },
];

pub(crate) fn lexicon(code: &str) -> Option<&'static Lexicon> {
    LEXICONS.iter().find(|l| l.code == code)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    #[test]
    fn vocabularies_are_disjoint() {
        let mut owner: HashMap<&str, &str> = HashMap::new();
        for lex in LEXICONS {
            for w in lex.adjectives.iter().chain(lex.nouns) {
                if let Some(prev) = owner.insert(w, lex.code) {
                    panic!("{w} shared by {prev} and {}", lex.code);
                }
            }
        }
    }

    #[test]
    fn tags_reconcile_to_their_code() {
        for lex in LEXICONS {
            for t in lex.tags {
                assert_eq!(crate::language::reconcile_tag(t).as_deref(), Some(lex.code));
            }
        }
    }
}
