//! SMILES lexer: organic-subset and bracket atoms, bonds, ring closures and branches.

use super::error::SmilesError;
use crate::elements;

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    /// Byte offset of the first character of the token.
    pub position: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TokenKind {
    Atom(AtomSpec),
    Bond(BondSymbol),
    RingClosure(u16),
    BranchOpen,
    BranchClose,
    Dot,
}

/// An atom as written, before any valence model is applied.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AtomSpec {
    /// 0 for the `*` wildcard.
    pub atomic_number: u8,
    pub aromatic: bool,
    pub bracket: bool,
    pub isotope: Option<u16>,
    /// Hydrogens written inside a bracket atom.
    pub hydrogens: u8,
    pub charge: i8,
}

impl AtomSpec {
    fn organic(atomic_number: u8, aromatic: bool) -> Self {
        AtomSpec { atomic_number, aromatic, bracket: false, isotope: None, hydrogens: 0, charge: 0 }
    }

    pub fn is_wildcard(&self) -> bool {
        self.atomic_number == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BondSymbol {
    Single,
    Double,
    Triple,
    Aromatic,
    /// `/` directional single bond; direction is discarded.
    Up,
    /// `\` directional single bond; direction is discarded.
    Down,
}

pub fn tokenize(smiles: &str) -> Result<Vec<Token>, SmilesError> {
    if smiles.is_empty() {
        return Err(SmilesError::EmptyInput);
    }
    if let Some(position) = smiles.bytes().position(|b| !b.is_ascii()) {
        return Err(SmilesError::NonAscii { position });
    }
    let bytes = smiles.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let position = i;
        let c = bytes[i] as char;
        let kind = match c {
            '(' => {
                i += 1;
                TokenKind::BranchOpen
            }
            ')' => {
                i += 1;
                TokenKind::BranchClose
            }
            '.' => {
                i += 1;
                TokenKind::Dot
            }
            '-' | '=' | '#' | ':' | '/' | '\\' => {
                i += 1;
                TokenKind::Bond(match c {
                    '-' => BondSymbol::Single,
                    '=' => BondSymbol::Double,
                    '#' => BondSymbol::Triple,
                    ':' => BondSymbol::Aromatic,
                    '/' => BondSymbol::Up,
                    _ => BondSymbol::Down,
                })
            }
            '0'..='9' => {
                i += 1;
                TokenKind::RingClosure((c as u8 - b'0') as u16)
            }
            '%' => {
                let (digit, len) = ring_percent(bytes, i)?;
                i += len;
                TokenKind::RingClosure(digit)
            }
            '[' => {
                let end = bytes[i..]
                    .iter()
                    .position(|&b| b == b']')
                    .map(|p| p + i)
                    .ok_or(SmilesError::UnterminatedBracket { position })?;
                let spec = bracket_atom(&smiles[i + 1..end], i + 1)?;
                i = end + 1;
                TokenKind::Atom(spec)
            }
            '*' => {
                i += 1;
                TokenKind::Atom(AtomSpec::organic(0, false))
            }
            _ => {
                let (spec, len) =
                    organic_atom(bytes, i).ok_or(SmilesError::UnknownCharacter { position, character: c })?;
                i += len;
                TokenKind::Atom(spec)
            }
        };
        tokens.push(Token { kind, position });
    }
    Ok(tokens)
}

fn ring_percent(bytes: &[u8], start: usize) -> Result<(u16, usize), SmilesError> {
    let digit_at = |k: usize| bytes.get(k).filter(|b| b.is_ascii_digit()).map(|b| (b - b'0') as u16);
    if bytes.get(start + 1) == Some(&b'(') {
        let close = bytes[start..]
            .iter()
            .position(|&b| b == b')')
            .map(|p| p + start)
            .ok_or(SmilesError::UnknownCharacter { position: start, character: '%' })?;
        let text = std::str::from_utf8(&bytes[start + 2..close]).unwrap_or("");
        let digit =
            text.parse::<u16>().map_err(|_| SmilesError::UnknownCharacter { position: start, character: '%' })?;
        return Ok((digit, close - start + 1));
    }
    match (digit_at(start + 1), digit_at(start + 2)) {
        (Some(a), Some(b)) => Ok((a * 10 + b, 3)),
        _ => Err(SmilesError::UnknownCharacter { position: start, character: '%' }),
    }
}

fn organic_atom(bytes: &[u8], i: usize) -> Option<(AtomSpec, usize)> {
    let next = bytes.get(i + 1).copied();
    match bytes[i] {
        b'C' if next == Some(b'l') => Some((AtomSpec::organic(17, false), 2)),
        b'B' if next == Some(b'r') => Some((AtomSpec::organic(35, false), 2)),
        b'B' => Some((AtomSpec::organic(5, false), 1)),
        b'C' => Some((AtomSpec::organic(6, false), 1)),
        b'N' => Some((AtomSpec::organic(7, false), 1)),
        b'O' => Some((AtomSpec::organic(8, false), 1)),
        b'P' => Some((AtomSpec::organic(15, false), 1)),
        b'S' => Some((AtomSpec::organic(16, false), 1)),
        b'F' => Some((AtomSpec::organic(9, false), 1)),
        b'I' => Some((AtomSpec::organic(53, false), 1)),
        b'b' => Some((AtomSpec::organic(5, true), 1)),
        b'c' => Some((AtomSpec::organic(6, true), 1)),
        b'n' => Some((AtomSpec::organic(7, true), 1)),
        b'o' => Some((AtomSpec::organic(8, true), 1)),
        b'p' => Some((AtomSpec::organic(15, true), 1)),
        b's' => Some((AtomSpec::organic(16, true), 1)),
        _ => None,
    }
}

const AROMATIC_BRACKET: &[(&str, u8)] =
    &[("se", 34), ("as", 33), ("te", 52), ("b", 5), ("c", 6), ("n", 7), ("o", 8), ("p", 15), ("s", 16)];

/// Parses the inside of `[...]`; `offset` is the byte position of its first character.
fn bracket_atom(body: &str, offset: usize) -> Result<AtomSpec, SmilesError> {
    let bytes = body.as_bytes();
    let invalid =
        |k: usize, reason: &str| SmilesError::InvalidBracketAtom { position: offset + k, reason: reason.to_string() };
    let mut k = 0;

    let digits = bytes.iter().take_while(|b| b.is_ascii_digit()).count();
    let isotope = if digits > 0 {
        k = digits;
        Some(body[..digits].parse::<u16>().map_err(|_| invalid(0, "isotope out of range"))?)
    } else {
        None
    };

    let rest = &body[k..];
    let (atomic_number, aromatic, len) = if rest.starts_with('*') {
        (0, false, 1)
    } else if let Some((sym, z)) = AROMATIC_BRACKET.iter().find(|(s, _)| rest.starts_with(s)) {
        (*z, true, sym.len())
    } else {
        let first = rest.chars().next().ok_or_else(|| invalid(k, "missing element symbol"))?;
        if !first.is_ascii_uppercase() {
            return Err(invalid(k, "missing element symbol"));
        }
        let two = rest.get(..2).filter(|s| s.as_bytes()[1].is_ascii_lowercase());
        match two.and_then(elements::by_symbol) {
            Some(e) => (e.atomic_number, false, 2),
            None => match elements::by_symbol(&rest[..1]) {
                Some(e) => (e.atomic_number, false, 1),
                None => return Err(invalid(k, "unknown element")),
            },
        }
    };
    k += len;

    // Chirality is accepted and dropped.
    if bytes.get(k) == Some(&b'@') {
        k += 1;
        if bytes.get(k) == Some(&b'@') {
            k += 1;
        } else {
            for class in ["TH", "AL", "SP", "TB", "OH"] {
                if body[k..].starts_with(class) {
                    k += 2;
                    k += bytes[k..].iter().take_while(|b| b.is_ascii_digit()).count();
                    break;
                }
            }
        }
    }

    let mut hydrogens = 0u8;
    if bytes.get(k) == Some(&b'H') {
        k += 1;
        hydrogens = 1;
        if let Some(d) = bytes.get(k).filter(|b| b.is_ascii_digit()) {
            hydrogens = d - b'0';
            k += 1;
        }
    }

    let mut charge = 0i8;
    if let Some(&sign) = bytes.get(k).filter(|b| **b == b'+' || **b == b'-') {
        let unit: i8 = if sign == b'+' { 1 } else { -1 };
        k += 1;
        let digits = bytes[k..].iter().take_while(|b| b.is_ascii_digit()).count();
        if digits > 0 {
            let magnitude: i8 = body[k..k + digits].parse().map_err(|_| invalid(k, "bad charge"))?;
            charge = unit * magnitude;
            k += digits;
        } else {
            charge = unit;
            while bytes.get(k) == Some(&sign) {
                charge += unit;
                k += 1;
            }
        }
    }

    if bytes.get(k) == Some(&b':') {
        k += 1;
        let digits = bytes[k..].iter().take_while(|b| b.is_ascii_digit()).count();
        if digits == 0 {
            return Err(invalid(k, "atom class needs digits"));
        }
        k += digits;
    }

    if k != bytes.len() {
        return Err(invalid(k, "unexpected trailing characters"));
    }
    Ok(AtomSpec { atomic_number, aromatic, bracket: true, isotope, hydrogens, charge })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(s: &str) -> Vec<TokenKind> {
        tokenize(s).unwrap().into_iter().map(|t| t.kind).collect()
    }

    #[test]
    fn wildcard_chain() {
        let toks = kinds("*CC*");
        assert_eq!(toks.len(), 4);
        let atoms: Vec<u8> = toks
            .iter()
            .map(|t| match t {
                TokenKind::Atom(a) => a.atomic_number,
                other => panic!("unexpected {other:?}"),
            })
            .collect();
        assert_eq!(atoms, vec![0, 6, 6, 0]);
    }

    #[test]
    fn benzene_ring_digits() {
        let toks = kinds("c1ccccc1");
        let aromatic =
            toks.iter().filter(|t| matches!(t, TokenKind::Atom(a) if a.aromatic && a.atomic_number == 6)).count();
        assert_eq!(aromatic, 6);
        let closures: Vec<_> = toks.iter().filter(|t| matches!(t, TokenKind::RingClosure(1))).collect();
        assert_eq!(closures.len(), 2);
    }

    #[test]
    fn unknown_character_position() {
        let err = tokenize("C(!)C").unwrap_err();
        assert_eq!(err, SmilesError::UnknownCharacter { position: 2, character: '!' });
        assert_eq!(err.position(), 2);
    }

    #[test]
    fn unterminated_bracket() {
        assert_eq!(tokenize("CC[NH4").unwrap_err(), SmilesError::UnterminatedBracket { position: 2 });
    }

    #[test]
    fn bracket_details() {
        let toks = kinds("[13CH3+]");
        assert_eq!(
            toks[0],
            TokenKind::Atom(AtomSpec {
                atomic_number: 6,
                aromatic: false,
                bracket: true,
                isotope: Some(13),
                hydrogens: 3,
                charge: 1,
            })
        );
        let TokenKind::Atom(o) = &kinds("[O--]")[0] else { panic!() };
        assert_eq!(o.charge, -2);
        let TokenKind::Atom(n) = &kinds("[nH]")[0] else { panic!() };
        assert!(n.aromatic && n.hydrogens == 1);
        let TokenKind::Atom(c) = &kinds("[C@@H](F)")[0] else { panic!() };
        assert_eq!(c.hydrogens, 1);
        let TokenKind::Atom(cl) = &kinds("[Cl-]")[0] else { panic!() };
        assert_eq!((cl.atomic_number, cl.charge), (17, -1));
        let TokenKind::Atom(si) = &kinds("[Si]")[0] else { panic!() };
        assert_eq!(si.atomic_number, 14);
        let TokenKind::Atom(star) = &kinds("[*:1]")[0] else { panic!() };
        assert!(star.is_wildcard());
    }

    #[test]
    fn percent_closures() {
        assert_eq!(kinds("C%12CC%12")[1], TokenKind::RingClosure(12));
        assert_eq!(kinds("C%(123)CC%(123)")[1], TokenKind::RingClosure(123));
        assert!(tokenize("C%1").is_err());
    }

    #[test]
    fn organic_two_letter() {
        let toks = kinds("ClCBr");
        assert!(matches!(&toks[0], TokenKind::Atom(a) if a.atomic_number == 17));
        assert!(matches!(&toks[2], TokenKind::Atom(a) if a.atomic_number == 35));
    }

    #[test]
    fn stereo_bonds_tokenized() {
        let toks = kinds("F/C=C\\F");
        assert_eq!(toks[1], TokenKind::Bond(BondSymbol::Up));
        assert_eq!(toks[5], TokenKind::Bond(BondSymbol::Down));
    }
}
