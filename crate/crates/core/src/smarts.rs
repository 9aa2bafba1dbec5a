//! A SMARTS subset sufficient for the descriptor parameter tables.
//!
//! Supported atom primitives: `*`, `a`, `A`, element symbols (upper case for
//! aliphatic, lower case for aromatic), `#n`, `Hn`, `Dn`, `Xn`, `Rn`, `rn`,
//! charges and recursive `$(...)`. Bond primitives: `- = # : ~ @`. Both take
//! `!`, `&`, `,` and `;` with the usual precedence. Stereo and chirality are
//! not supported.

use thiserror::Error;

use crate::elements;
use crate::psmiles::{BondOrder, MolecularGraph};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid SMARTS {pattern:?} at offset {position}: {reason}")]
pub struct SmartsError {
    pub pattern: String,
    pub position: usize,
    pub reason: &'static str,
}

#[derive(Debug, Clone, PartialEq)]
enum Expr<P> {
    Prim(P),
    Not(Box<Expr<P>>),
    And(Vec<Expr<P>>),
    Or(Vec<Expr<P>>),
}

impl<P> Expr<P> {
    fn eval(&self, f: &mut impl FnMut(&P) -> bool) -> bool {
        match self {
            Expr::Prim(p) => f(p),
            Expr::Not(e) => !e.eval(f),
            Expr::And(es) => es.iter().all(|e| e.eval(f)),
            Expr::Or(es) => es.iter().any(|e| e.eval(f)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum AtomPrim {
    Any,
    Aromatic,
    Aliphatic,
    Element {
        atomic_number: u8,
        aromatic: bool,
    },
    AtomicNumber(u8),
    TotalH(u32),
    Degree(u32),
    Connectivity(u32),
    Charge(i8),
    /// `R` alone means "in any ring"; `Rn` means member of exactly n SSSR rings.
    RingCount(Option<u32>),
    RingSize(u32),
    Recursive(Box<Smarts>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum BondPrim {
    Single,
    Double,
    Triple,
    Aromatic,
    Any,
    Ring,
}

#[derive(Debug, Clone, PartialEq)]
struct PatternBond {
    a: usize,
    b: usize,
    /// `None` is the implicit single-or-aromatic bond.
    expr: Option<Expr<BondPrim>>,
}

/// A compiled query graph.
#[derive(Debug, Clone, PartialEq)]
pub struct Smarts {
    atoms: Vec<Expr<AtomPrim>>,
    bonds: Vec<PatternBond>,
    /// For each atom after the first, the bond that links it to an earlier atom.
    parent_bond: Vec<Option<usize>>,
}

impl Smarts {
    pub fn parse(pattern: &str) -> Result<Smarts, SmartsError> {
        Parser { text: pattern.as_bytes(), source: pattern, pos: 0 }.parse_pattern()
    }

    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    /// Whether the pattern matches with its first atom mapped onto `atom`.
    pub fn matches_at(&self, graph: &MolecularGraph, atom: usize) -> bool {
        let mut mapping = vec![usize::MAX; self.atoms.len()];
        let mut found = false;
        if self.atom_matches(0, graph, atom) {
            mapping[0] = atom;
            self.extend(graph, &mut mapping, 1, &mut |_| {
                found = true;
                false
            });
        }
        found
    }

    /// All injective matches, one per distinct set of target atoms.
    pub fn find_unique_matches(&self, graph: &MolecularGraph) -> Vec<Vec<usize>> {
        let mut seen = std::collections::HashSet::new();
        let mut out = Vec::new();
        for start in 0..graph.atom_count() {
            if !self.atom_matches(0, graph, start) {
                continue;
            }
            let mut mapping = vec![usize::MAX; self.atoms.len()];
            mapping[0] = start;
            self.extend(graph, &mut mapping, 1, &mut |m| {
                let mut key = m.to_vec();
                key.sort_unstable();
                if seen.insert(key) {
                    out.push(m.to_vec());
                }
                true
            });
        }
        out
    }

    /// Depth-first extension; `visit` returns false to stop the search.
    fn extend(
        &self,
        graph: &MolecularGraph,
        mapping: &mut [usize],
        k: usize,
        visit: &mut dyn FnMut(&[usize]) -> bool,
    ) -> bool {
        if k == self.atoms.len() {
            return visit(mapping);
        }
        let parent_bond = &self.bonds[self.parent_bond[k].expect("pattern atoms after the first have a parent")];
        let parent = if parent_bond.a == k { parent_bond.b } else { parent_bond.a };
        let anchor = mapping[parent];
        for &(candidate, _) in graph.neighbors(anchor) {
            if mapping.contains(&candidate) || !self.atom_matches(k, graph, candidate) {
                continue;
            }
            let bonds_ok = self.bonds.iter().all(|pb| {
                let other = if pb.a == k {
                    pb.b
                } else if pb.b == k {
                    pb.a
                } else {
                    return true;
                };
                if other > k {
                    return true;
                }
                match graph.bond_between(candidate, mapping[other]) {
                    Some(b) => bond_matches(pb.expr.as_ref(), graph, b),
                    None => false,
                }
            });
            if !bonds_ok {
                continue;
            }
            mapping[k] = candidate;
            let keep_going = self.extend(graph, mapping, k + 1, visit);
            mapping[k] = usize::MAX;
            if !keep_going {
                return false;
            }
        }
        true
    }

    fn atom_matches(&self, k: usize, graph: &MolecularGraph, atom: usize) -> bool {
        self.atoms[k].eval(&mut |p| atom_prim_matches(p, graph, atom))
    }
}

fn atom_prim_matches(prim: &AtomPrim, graph: &MolecularGraph, index: usize) -> bool {
    let atom = graph.atom(index);
    let hydrogen_neighbors =
        || graph.neighbors(index).iter().filter(|&&(n, _)| graph.atom(n).atomic_number == 1).count() as u32;
    match prim {
        AtomPrim::Any => true,
        AtomPrim::Aromatic => atom.is_aromatic,
        AtomPrim::Aliphatic => !atom.is_aromatic,
        AtomPrim::Element { atomic_number, aromatic } => {
            atom.atomic_number == *atomic_number && atom.is_aromatic == *aromatic
        }
        AtomPrim::AtomicNumber(z) => atom.atomic_number == *z,
        AtomPrim::TotalH(n) => atom.total_h() + hydrogen_neighbors() == *n,
        AtomPrim::Degree(n) => graph.degree(index) as u32 == *n,
        AtomPrim::Connectivity(n) => graph.total_degree(index) as u32 == *n,
        AtomPrim::Charge(c) => atom.formal_charge == *c,
        AtomPrim::RingCount(None) => graph.is_atom_in_ring(index),
        AtomPrim::RingCount(Some(n)) => graph.rings().iter().filter(|r| r.contains_atom(index)).count() as u32 == *n,
        AtomPrim::RingSize(n) => graph.is_atom_in_ring_of_size(index, *n as usize),
        AtomPrim::Recursive(inner) => inner.matches_at(graph, index),
    }
}

fn bond_matches(expr: Option<&Expr<BondPrim>>, graph: &MolecularGraph, index: usize) -> bool {
    let bond = graph.bond(index);
    match expr {
        None => matches!(bond.order, BondOrder::Single | BondOrder::Aromatic),
        Some(e) => e.eval(&mut |p| match p {
            BondPrim::Single => bond.order == BondOrder::Single,
            BondPrim::Double => bond.order == BondOrder::Double,
            BondPrim::Triple => bond.order == BondOrder::Triple,
            BondPrim::Aromatic => bond.order == BondOrder::Aromatic,
            BondPrim::Any => true,
            BondPrim::Ring => bond.in_ring,
        }),
    }
}

struct Parser<'a> {
    text: &'a [u8],
    source: &'a str,
    pos: usize,
}

const BOND_CHARS: &[u8] = b"-=#:~@!&,;";

impl Parser<'_> {
    fn error(&self, reason: &'static str) -> SmartsError {
        SmartsError { pattern: self.source.to_string(), position: self.pos, reason }
    }

    fn peek(&self) -> Option<u8> {
        self.text.get(self.pos).copied()
    }

    fn parse_pattern(&mut self) -> Result<Smarts, SmartsError> {
        let mut atoms = Vec::new();
        let mut bonds: Vec<PatternBond> = Vec::new();
        let mut parent_bond = Vec::new();
        let mut prev: Option<usize> = None;
        let mut stack: Vec<usize> = Vec::new();
        let mut pending_bond: Option<Expr<BondPrim>> = None;
        let mut open_rings: std::collections::HashMap<u32, (usize, Option<Expr<BondPrim>>)> =
            std::collections::HashMap::new();

        while let Some(c) = self.peek() {
            match c {
                b'(' => {
                    let p = prev.ok_or_else(|| self.error("branch before any atom"))?;
                    stack.push(p);
                    self.pos += 1;
                }
                b')' => {
                    prev = Some(stack.pop().ok_or_else(|| self.error("unbalanced ')'"))?);
                    self.pos += 1;
                }
                b'0'..=b'9' | b'%' => {
                    let digit = self.ring_digit()?;
                    let here = prev.ok_or_else(|| self.error("ring bond before any atom"))?;
                    let bond = pending_bond.take();
                    match open_rings.remove(&digit) {
                        Some((other, first)) => bonds.push(PatternBond { a: other, b: here, expr: first.or(bond) }),
                        None => {
                            open_rings.insert(digit, (here, bond));
                        }
                    }
                }
                _ if BOND_CHARS.contains(&c) && prev.is_some() && pending_bond.is_none() => {
                    pending_bond = Some(self.bond_expr()?);
                }
                _ => {
                    let expr = self.atom()?;
                    let index = atoms.len();
                    atoms.push(expr);
                    match prev {
                        Some(p) => {
                            bonds.push(PatternBond { a: p, b: index, expr: pending_bond.take() });
                            parent_bond.push(Some(bonds.len() - 1));
                        }
                        None if index == 0 => parent_bond.push(None),
                        None => return Err(self.error("disconnected pattern")),
                    }
                    prev = Some(index);
                }
            }
        }
        if atoms.is_empty() {
            return Err(self.error("empty pattern"));
        }
        if !stack.is_empty() || !open_rings.is_empty() || pending_bond.is_some() {
            return Err(self.error("unterminated pattern"));
        }
        Ok(Smarts { atoms, bonds, parent_bond })
    }

    fn ring_digit(&mut self) -> Result<u32, SmartsError> {
        let c = self.peek().unwrap_or(b'0');
        if c == b'%' {
            let digits = self.text.get(self.pos + 1..self.pos + 3).ok_or_else(|| self.error("short %nn"))?;
            let s = std::str::from_utf8(digits).map_err(|_| self.error("bad %nn"))?;
            let n = s.parse().map_err(|_| self.error("bad %nn"))?;
            self.pos += 3;
            Ok(n)
        } else {
            self.pos += 1;
            Ok((c - b'0') as u32)
        }
    }

    fn atom(&mut self) -> Result<Expr<AtomPrim>, SmartsError> {
        let c = self.peek().ok_or_else(|| self.error("expected atom"))?;
        if c == b'[' {
            self.pos += 1;
            let expr = self.expression(Self::atom_primitive)?;
            if self.peek() != Some(b']') {
                return Err(self.error("expected ']'"));
            }
            self.pos += 1;
            return Ok(expr);
        }
        let prim = match c {
            b'*' => AtomPrim::Any,
            b'a' => AtomPrim::Aromatic,
            b'A' => AtomPrim::Aliphatic,
            _ => {
                let (z, aromatic, len) = self.element_symbol(true).ok_or_else(|| self.error("unknown atom"))?;
                self.pos += len;
                return Ok(Expr::Prim(AtomPrim::Element { atomic_number: z, aromatic }));
            }
        };
        self.pos += 1;
        Ok(Expr::Prim(prim))
    }

    /// Element symbol at the cursor: (atomic number, aromatic, length).
    fn element_symbol(&self, organic_only: bool) -> Option<(u8, bool, usize)> {
        let rest = &self.source[self.pos..];
        let first = *rest.as_bytes().first()?;
        if first.is_ascii_lowercase() {
            for sym in ["se", "as", "te", "c", "n", "o", "s", "p", "b"] {
                if rest.starts_with(sym) {
                    let mut upper = sym.to_string();
                    upper[..1].make_ascii_uppercase();
                    let z = elements::by_symbol(&upper)?.atomic_number;
                    return Some((z, true, sym.len()));
                }
            }
            return None;
        }
        if !first.is_ascii_uppercase() {
            return None;
        }
        if organic_only {
            for sym in ["Cl", "Br", "B", "C", "N", "O", "P", "S", "F", "I"] {
                if rest.starts_with(sym) {
                    return Some((elements::by_symbol(sym)?.atomic_number, false, sym.len()));
                }
            }
            return None;
        }
        if rest.len() >= 2 {
            let second = rest.as_bytes()[1];
            if second.is_ascii_lowercase() {
                if let Some(e) = elements::by_symbol(&rest[..2]) {
                    return Some((e.atomic_number, false, 2));
                }
            }
        }
        // H is a hydrogen count inside brackets, never an element here.
        if first == b'H' || first == b'D' || first == b'X' || first == b'R' || first == b'A' {
            return None;
        }
        elements::by_symbol(&rest[..1]).map(|e| (e.atomic_number, false, 1))
    }

    fn number(&mut self) -> Option<u32> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        (self.pos > start).then(|| self.source[start..self.pos].parse().expect("digits"))
    }

    fn atom_primitive(&mut self) -> Result<AtomPrim, SmartsError> {
        let c = self.peek().ok_or_else(|| self.error("expected primitive"))?;
        if let Some((z, aromatic, len)) = self.element_symbol(false) {
            self.pos += len;
            return Ok(AtomPrim::Element { atomic_number: z, aromatic });
        }
        self.pos += 1;
        let prim = match c {
            b'*' => AtomPrim::Any,
            b'a' => AtomPrim::Aromatic,
            b'A' => AtomPrim::Aliphatic,
            b'#' => {
                let n = self.number().ok_or_else(|| self.error("expected atomic number"))?;
                AtomPrim::AtomicNumber(n as u8)
            }
            b'H' => AtomPrim::TotalH(self.number().unwrap_or(1)),
            b'D' => AtomPrim::Degree(self.number().unwrap_or(1)),
            b'X' => AtomPrim::Connectivity(self.number().unwrap_or(1)),
            b'R' => AtomPrim::RingCount(self.number()),
            b'r' => match self.number() {
                Some(n) => AtomPrim::RingSize(n),
                None => AtomPrim::RingCount(None),
            },
            b'+' | b'-' => {
                let sign: i32 = if c == b'+' { 1 } else { -1 };
                let mut magnitude = 1;
                if let Some(n) = self.number() {
                    magnitude = n as i32;
                } else {
                    while self.peek() == Some(c) {
                        self.pos += 1;
                        magnitude += 1;
                    }
                }
                AtomPrim::Charge((sign * magnitude) as i8)
            }
            b'$' => {
                if self.peek() != Some(b'(') {
                    return Err(self.error("expected '(' after '$'"));
                }
                let start = self.pos + 1;
                let mut depth = 0;
                let mut end = None;
                for (i, &ch) in self.text[self.pos..].iter().enumerate() {
                    match ch {
                        b'(' => depth += 1,
                        b')' => {
                            depth -= 1;
                            if depth == 0 {
                                end = Some(self.pos + i);
                                break;
                            }
                        }
                        _ => {}
                    }
                }
                let end = end.ok_or_else(|| self.error("unbalanced recursive SMARTS"))?;
                let inner = Smarts::parse(&self.source[start..end])?;
                self.pos = end + 1;
                AtomPrim::Recursive(Box::new(inner))
            }
            _ => {
                self.pos -= 1;
                return Err(self.error("unsupported atom primitive"));
            }
        };
        Ok(prim)
    }

    fn bond_expr(&mut self) -> Result<Expr<BondPrim>, SmartsError> {
        self.expression(|p: &mut Self| {
            let c = p.peek().ok_or_else(|| p.error("expected bond"))?;
            let prim = match c {
                b'-' => BondPrim::Single,
                b'=' => BondPrim::Double,
                b'#' => BondPrim::Triple,
                b':' => BondPrim::Aromatic,
                b'~' => BondPrim::Any,
                b'@' => BondPrim::Ring,
                _ => return Err(p.error("unsupported bond primitive")),
            };
            p.pos += 1;
            Ok(prim)
        })
    }

    /// Operator grammar shared by atoms and bonds: `;` < `,` < `&`/implicit < `!`.
    fn expression<P>(&mut self, prim: fn(&mut Self) -> Result<P, SmartsError>) -> Result<Expr<P>, SmartsError> {
        let mut low = vec![self.or_expr(prim)?];
        while self.peek() == Some(b';') {
            self.pos += 1;
            low.push(self.or_expr(prim)?);
        }
        Ok(collapse(low, Expr::And))
    }

    fn or_expr<P>(&mut self, prim: fn(&mut Self) -> Result<P, SmartsError>) -> Result<Expr<P>, SmartsError> {
        let mut alts = vec![self.and_expr(prim)?];
        while self.peek() == Some(b',') {
            self.pos += 1;
            alts.push(self.and_expr(prim)?);
        }
        Ok(collapse(alts, Expr::Or))
    }

    fn and_expr<P>(&mut self, prim: fn(&mut Self) -> Result<P, SmartsError>) -> Result<Expr<P>, SmartsError> {
        let mut terms = vec![self.unary(prim)?];
        loop {
            match self.peek() {
                Some(b'&') => {
                    self.pos += 1;
                    terms.push(self.unary(prim)?);
                }
                Some(b';' | b',' | b']') | None => break,
                Some(c) if !self.is_bond_context(c) => terms.push(self.unary(prim)?),
                Some(_) => break,
            }
        }
        Ok(collapse(terms, Expr::And))
    }

    /// Inside a bond expression, implicit AND only continues with bond characters.
    fn is_bond_context(&self, c: u8) -> bool {
        // Bond expressions sit outside brackets; an atom start ends them.
        let inside_bracket = self.text[..self.pos].iter().rposition(|&b| b == b'[')
            > self.text[..self.pos].iter().rposition(|&b| b == b']');
        !inside_bracket && !BOND_CHARS.contains(&c)
    }

    fn unary<P>(&mut self, prim: fn(&mut Self) -> Result<P, SmartsError>) -> Result<Expr<P>, SmartsError> {
        if self.peek() == Some(b'!') {
            self.pos += 1;
            return Ok(Expr::Not(Box::new(self.unary(prim)?)));
        }
        Ok(Expr::Prim(prim(self)?))
    }
}

fn collapse<P>(mut items: Vec<Expr<P>>, wrap: fn(Vec<Expr<P>>) -> Expr<P>) -> Expr<P> {
    if items.len() == 1 {
        items.pop().expect("one item")
    } else {
        wrap(items)
    }
}
