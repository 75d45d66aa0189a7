//! Symbol vocabulary and token sequences.
//!
//! Vocabulary file format: UTF-8 text, one symbol per line, line number =
//! id. Lines 0 and 1 are the literal reserved symbols `<pad>` and `<eos>`.

use super::jamo::text_to_symbols;
use crate::error::TextError;
use std::collections::HashMap;
use std::path::Path;

pub const PAD_SYMBOL: &str = "<pad>";
pub const EOS_SYMBOL: &str = "<eos>";
pub const PAD_ID: usize = 0;
pub const EOS_ID: usize = 1;

#[derive(Clone, Debug)]
pub struct SymbolVocabulary {
    symbols: Vec<String>,
    lookup: HashMap<String, usize>,
}

impl SymbolVocabulary {
    /// Build from the set of non-reserved symbols, in the order given.
    pub fn new<I, S>(symbols: I) -> Result<Self, TextError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut all = vec![PAD_SYMBOL.to_string(), EOS_SYMBOL.to_string()];
        for s in symbols {
            all.push(s.into());
        }
        let mut lookup = HashMap::with_capacity(all.len());
        for (i, s) in all.iter().enumerate() {
            if s.is_empty() {
                return Err(TextError::BadVocabulary(format!("empty symbol at id {i}")));
            }
            if lookup.insert(s.clone(), i).is_some() {
                return Err(TextError::BadVocabulary(format!("duplicate symbol {s:?}")));
            }
        }
        Ok(SymbolVocabulary { symbols: all, lookup })
    }

    /// Collect the distinct symbols of a text corpus (after jamo
    /// decomposition), sorted for stable ids, and build a vocabulary.
    pub fn from_texts<'a, I: IntoIterator<Item = &'a str>>(texts: I) -> Result<Self, TextError> {
        let mut seen: Vec<String> = Vec::new();
        for text in texts {
            for sym in text_to_symbols(text) {
                if !seen.contains(&sym) {
                    seen.push(sym);
                }
            }
        }
        seen.sort();
        Self::new(seen)
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        false // reserved symbols are always present
    }

    pub fn id(&self, symbol: &str) -> Option<usize> {
        self.lookup.get(symbol).copied()
    }

    pub fn symbol(&self, id: usize) -> Option<&str> {
        self.symbols.get(id).map(|s| s.as_str())
    }

    pub fn save(&self, path: &Path) -> std::io::Result<()> {
        std::fs::write(path, self.symbols.join("\n") + "\n")
    }

    pub fn load(path: &Path) -> Result<Self, TextError> {
        let body = std::fs::read_to_string(path)
            .map_err(|e| TextError::BadVocabulary(format!("{}: {e}", path.display())))?;
        let lines: Vec<&str> = body.lines().collect();
        if lines.len() < 2 || lines[0] != PAD_SYMBOL || lines[1] != EOS_SYMBOL {
            return Err(TextError::BadVocabulary(
                "first two lines must be <pad> and <eos>".into(),
            ));
        }
        Self::new(lines[2..].iter().map(|s| s.to_string()))
    }

    /// Encode pre-split symbols (the synthetic corpus path).
    pub fn encode_symbols<'a, I: IntoIterator<Item = &'a str>>(
        &self,
        symbols: I,
    ) -> Result<TokenSequence, TextError> {
        let mut ids = Vec::new();
        for sym in symbols {
            let id = self.id(sym).ok_or_else(|| TextError::UnknownSymbol(sym.to_string()))?;
            ids.push(id);
        }
        ids.push(EOS_ID);
        Ok(TokenSequence { ids })
    }

    /// Jamo-decompose `text` and encode, appending EOS.
    pub fn encode_text(&self, text: &str) -> Result<TokenSequence, TextError> {
        let symbols = text_to_symbols(text);
        self.encode_symbols(symbols.iter().map(|s| s.as_str()))
    }
}

/// Token ids over a vocabulary, with exactly one terminal EOS.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TokenSequence {
    ids: Vec<usize>,
}

impl TokenSequence {
    pub fn from_ids(ids: Vec<usize>, vocab_size: usize) -> Result<Self, TextError> {
        if ids.last() != Some(&EOS_ID) {
            return Err(TextError::BadVocabulary("sequence must end with EOS".into()));
        }
        if ids[..ids.len() - 1].iter().any(|&i| i == EOS_ID) {
            return Err(TextError::BadVocabulary("interior EOS".into()));
        }
        if let Some(&bad) = ids.iter().find(|&&i| i >= vocab_size) {
            return Err(TextError::BadVocabulary(format!("id {bad} >= vocab {vocab_size}")));
        }
        Ok(TokenSequence { ids })
    }

    pub fn ids(&self) -> &[usize] {
        &self.ids
    }

    /// Ids excluding the terminal EOS.
    pub fn content_ids(&self) -> &[usize] {
        &self.ids[..self.ids.len() - 1]
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        false // EOS is always present
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::jamo::EMPTY_CODA_SYMBOL;

    #[test]
    fn empty_text_is_just_eos() {
        let v = SymbolVocabulary::from_texts(["가나다"]).unwrap();
        let seq = v.encode_text("").unwrap();
        assert_eq!(seq.ids(), &[EOS_ID]);
    }

    #[test]
    fn syllable_encodes_to_three_ids_plus_eos() {
        let v = SymbolVocabulary::from_texts(["가"]).unwrap();
        let seq = v.encode_text("가").unwrap();
        assert_eq!(seq.len(), 4);
        assert_eq!(*seq.ids().last().unwrap(), EOS_ID);
        // onset ᄀ, nucleus ᅡ, empty coda are three distinct ids
        let onset = v.id("\u{1100}").unwrap();
        let nucleus = v.id("\u{1161}").unwrap();
        let coda = v.id(EMPTY_CODA_SYMBOL).unwrap();
        assert_eq!(seq.ids()[..3], [onset, nucleus, coda]);
    }

    #[test]
    fn onset_and_coda_ids_are_disjoint() {
        // 난: onset ㄴ(2) and coda ㄴ(4) are visually the same letter but
        // must occupy different vocabulary ids
        let v = SymbolVocabulary::from_texts(["난"]).unwrap();
        let seq = v.encode_text("난").unwrap();
        assert_ne!(seq.ids()[0], seq.ids()[2]);
    }

    #[test]
    fn unknown_symbol_is_reported_by_name() {
        let v = SymbolVocabulary::from_texts(["가"]).unwrap();
        match v.encode_text("가Z") {
            Err(TextError::UnknownSymbol(s)) => assert_eq!(s, "Z"),
            other => panic!("expected UnknownSymbol, got {other:?}"),
        }
    }

    #[test]
    fn save_load_round_trips_to_identical_encodings() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("vocab.txt");
        let v = SymbolVocabulary::from_texts(["한국말 좋다", "abc 123"]).unwrap();
        v.save(&path).unwrap();
        let loaded = SymbolVocabulary::load(&path).unwrap();
        assert_eq!(v.len(), loaded.len());
        for text in ["한국말", "좋다 abc", "123"] {
            assert_eq!(v.encode_text(text).unwrap(), loaded.encode_text(text).unwrap());
        }
    }

    #[test]
    fn reserved_ids_are_pinned() {
        let v = SymbolVocabulary::new(["x"]).unwrap();
        assert_eq!(v.id(PAD_SYMBOL), Some(PAD_ID));
        assert_eq!(v.id(EOS_SYMBOL), Some(EOS_ID));
        assert_eq!(v.symbol(2), Some("x"));
    }
}
