//! Hangul syllable decomposition/composition using the Unicode block
//! arithmetic: syllable = 0xAC00 + (onset*21 + nucleus)*28 + coda.

use crate::error::TextError;

pub const SYLLABLE_BASE: u32 = 0xAC00;
pub const SYLLABLE_LAST: u32 = 0xD7A3;
pub const ONSET_COUNT: u32 = 19;
pub const NUCLEUS_COUNT: u32 = 21;
pub const CODA_COUNT: u32 = 28; // index 0 = no coda

/// Positional (conjoining) jamo bases; onset/nucleus/coda live in disjoint
/// Unicode ranges, which keeps their vocabulary symbols disjoint too.
const ONSET_JAMO_BASE: u32 = 0x1100;
const NUCLEUS_JAMO_BASE: u32 = 0x1161;
const CODA_JAMO_BASE: u32 = 0x11A7; // coda k (k >= 1) is 0x11A7 + k

/// Symbol reserved for the "no coda" slot so every syllable expands to
/// exactly three symbols.
pub const EMPTY_CODA_SYMBOL: &str = "<nocoda>";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct JamoTriple {
    pub onset: u32,
    pub nucleus: u32,
    pub coda: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decomposed {
    Syllable(JamoTriple),
    /// Anything outside the Hangul syllable block passes through unchanged.
    Passthrough(char),
}

pub fn decompose_hangul(c: char) -> Decomposed {
    let cp = c as u32;
    if !(SYLLABLE_BASE..=SYLLABLE_LAST).contains(&cp) {
        return Decomposed::Passthrough(c);
    }
    let s = cp - SYLLABLE_BASE;
    Decomposed::Syllable(JamoTriple {
        onset: s / (NUCLEUS_COUNT * CODA_COUNT),
        nucleus: (s / CODA_COUNT) % NUCLEUS_COUNT,
        coda: s % CODA_COUNT,
    })
}

pub fn compose_hangul(t: JamoTriple) -> Result<char, TextError> {
    if t.onset >= ONSET_COUNT || t.nucleus >= NUCLEUS_COUNT || t.coda >= CODA_COUNT {
        return Err(TextError::OutOfRange { onset: t.onset, nucleus: t.nucleus, coda: t.coda });
    }
    let cp = SYLLABLE_BASE + (t.onset * NUCLEUS_COUNT + t.nucleus) * CODA_COUNT + t.coda;
    Ok(char::from_u32(cp).expect("syllable block codepoints are valid"))
}

/// The three vocabulary symbols for a syllable: positional onset jamo,
/// positional nucleus jamo, positional coda jamo (or the explicit empty-coda
/// marker).
pub fn triple_symbols(t: JamoTriple) -> [String; 3] {
    let onset = char::from_u32(ONSET_JAMO_BASE + t.onset).unwrap().to_string();
    let nucleus = char::from_u32(NUCLEUS_JAMO_BASE + t.nucleus).unwrap().to_string();
    let coda = if t.coda == 0 {
        EMPTY_CODA_SYMBOL.to_string()
    } else {
        char::from_u32(CODA_JAMO_BASE + t.coda).unwrap().to_string()
    };
    [onset, nucleus, coda]
}

/// Expand text into its symbol stream: three symbols per syllable, one
/// symbol per non-Hangul character.
pub fn text_to_symbols(text: &str) -> Vec<String> {
    let mut out = Vec::with_capacity(text.chars().count() * 3);
    for c in text.chars() {
        match decompose_hangul(c) {
            Decomposed::Syllable(t) => out.extend(triple_symbols(t)),
            Decomposed::Passthrough(c) => out.push(c.to_string()),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn block_base_decomposes_to_zero_triple() {
        assert_eq!(
            decompose_hangul('가'),
            Decomposed::Syllable(JamoTriple { onset: 0, nucleus: 0, coda: 0 })
        );
    }

    #[test]
    fn han_syllable_matches_inverse_formula() {
        // 0xAC00 + (18*21 + 0)*28 + 4 = 0xD55C = '한'
        assert_eq!(
            decompose_hangul('한'),
            Decomposed::Syllable(JamoTriple { onset: 18, nucleus: 0, coda: 4 })
        );
        assert_eq!(compose_hangul(JamoTriple { onset: 18, nucleus: 0, coda: 4 }).unwrap(), '한');
    }

    #[test]
    fn space_passes_through() {
        assert_eq!(decompose_hangul(' '), Decomposed::Passthrough(' '));
    }

    #[test]
    fn out_of_range_triple_is_rejected() {
        assert!(compose_hangul(JamoTriple { onset: 19, nucleus: 0, coda: 0 }).is_err());
        assert!(compose_hangul(JamoTriple { onset: 0, nucleus: 21, coda: 0 }).is_err());
        assert!(compose_hangul(JamoTriple { onset: 0, nucleus: 0, coda: 28 }).is_err());
    }

    #[test]
    fn round_trip_over_all_syllables() {
        for cp in SYLLABLE_BASE..=SYLLABLE_LAST {
            let c = char::from_u32(cp).unwrap();
            match decompose_hangul(c) {
                Decomposed::Syllable(t) => assert_eq!(compose_hangul(t).unwrap(), c),
                Decomposed::Passthrough(_) => panic!("{cp:#x} should decompose"),
            }
        }
    }

    #[test]
    fn syllable_expands_to_three_symbols() {
        let syms = text_to_symbols("가b");
        assert_eq!(syms.len(), 4);
        assert_eq!(syms[2], EMPTY_CODA_SYMBOL);
        assert_eq!(syms[3], "b");
    }
}
