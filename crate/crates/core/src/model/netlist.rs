//! Line-oriented netlist subset: R, C, L, K (mutual coupling) and P (port)
//! cards, `*` comment lines, SPICE magnitude suffixes.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{MorError, Result, Span};

pub const GROUND: &str = "0";

#[derive(Debug, Clone, PartialEq)]
pub struct TwoTerminal {
    pub name: String,
    pub pos: String,
    pub neg: String,
    pub value: f64,
    pub span: Span,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CouplingValue {
    /// Coupling coefficient `k`, `M = k sqrt(L1 L2)`.
    Coefficient(f64),
    /// Mutual inductance in henries.
    Mutual(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Coupling {
    pub name: String,
    pub first: String,
    pub second: String,
    pub value: CouplingValue,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Port {
    pub name: String,
    pub node: String,
    pub reference: String,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Element {
    Resistor(TwoTerminal),
    Capacitor(TwoTerminal),
    Inductor(TwoTerminal),
    Coupling(Coupling),
    Port(Port),
}

impl Element {
    pub fn name(&self) -> &str {
        match self {
            Element::Resistor(e) | Element::Capacitor(e) | Element::Inductor(e) => &e.name,
            Element::Coupling(k) => &k.name,
            Element::Port(p) => &p.name,
        }
    }

    pub fn span(&self) -> Span {
        match self {
            Element::Resistor(e) | Element::Capacitor(e) | Element::Inductor(e) => e.span,
            Element::Coupling(k) => k.span,
            Element::Port(p) => p.span,
        }
    }

    /// Nodes referenced by this element, in card order.
    pub fn nodes(&self) -> Vec<&str> {
        match self {
            Element::Resistor(e) | Element::Capacitor(e) | Element::Inductor(e) => {
                vec![&e.pos, &e.neg]
            }
            Element::Coupling(_) => vec![],
            Element::Port(p) => vec![&p.node, &p.reference],
        }
    }
}

/// Parsed circuit, elements kept in file order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ElementList {
    pub elements: Vec<Element>,
}

impl ElementList {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn resistors(&self) -> impl Iterator<Item = &TwoTerminal> {
        self.elements.iter().filter_map(|e| match e {
            Element::Resistor(r) => Some(r),
            _ => None,
        })
    }

    pub fn capacitors(&self) -> impl Iterator<Item = &TwoTerminal> {
        self.elements.iter().filter_map(|e| match e {
            Element::Capacitor(c) => Some(c),
            _ => None,
        })
    }

    pub fn inductors(&self) -> impl Iterator<Item = &TwoTerminal> {
        self.elements.iter().filter_map(|e| match e {
            Element::Inductor(l) => Some(l),
            _ => None,
        })
    }

    pub fn couplings(&self) -> impl Iterator<Item = &Coupling> {
        self.elements.iter().filter_map(|e| match e {
            Element::Coupling(k) => Some(k),
            _ => None,
        })
    }

    pub fn ports(&self) -> impl Iterator<Item = &Port> {
        self.elements.iter().filter_map(|e| match e {
            Element::Port(p) => Some(p),
            _ => None,
        })
    }

    pub fn push_resistor(&mut self, name: &str, pos: &str, neg: &str, ohms: f64) {
        self.elements.push(Element::Resistor(two(name, pos, neg, ohms)));
    }

    pub fn push_capacitor(&mut self, name: &str, pos: &str, neg: &str, farads: f64) {
        self.elements.push(Element::Capacitor(two(name, pos, neg, farads)));
    }

    pub fn push_inductor(&mut self, name: &str, pos: &str, neg: &str, henries: f64) {
        self.elements.push(Element::Inductor(two(name, pos, neg, henries)));
    }

    pub fn push_coupling(&mut self, name: &str, first: &str, second: &str, value: CouplingValue) {
        self.elements.push(Element::Coupling(Coupling {
            name: name.to_string(),
            first: first.to_string(),
            second: second.to_string(),
            value,
            span: Span { line: 0, column: 0 },
        }));
    }

    pub fn push_port(&mut self, name: &str, node: &str) {
        self.elements.push(Element::Port(Port {
            name: name.to_string(),
            node: node.to_string(),
            reference: GROUND.to_string(),
            span: Span { line: 0, column: 0 },
        }));
    }

    /// Concatenation of two element lists (names must stay unique).
    pub fn union(&self, other: &ElementList) -> ElementList {
        let mut out = self.clone();
        out.elements.extend(other.elements.iter().cloned());
        out
    }

    /// Renders the list in the accepted netlist grammar. Values use the
    /// shortest round-trip representation, so parsing the text back yields
    /// bit-identical values.
    pub fn to_netlist(&self) -> String {
        let mut s = String::new();
        for e in &self.elements {
            match e {
                Element::Resistor(t) | Element::Capacitor(t) | Element::Inductor(t) => {
                    let _ = writeln!(s, "{} {} {} {:e}", t.name, t.pos, t.neg, t.value);
                }
                Element::Coupling(k) => match k.value {
                    CouplingValue::Coefficient(c) => {
                        let _ = writeln!(s, "{} {} {} {:e}", k.name, k.first, k.second, c);
                    }
                    CouplingValue::Mutual(m) => {
                        let _ = writeln!(s, "{} {} {} M={:e}", k.name, k.first, k.second, m);
                    }
                },
                Element::Port(p) => {
                    if p.reference == GROUND {
                        let _ = writeln!(s, "{} {}", p.name, p.node);
                    } else {
                        let _ = writeln!(s, "{} {} {}", p.name, p.node, p.reference);
                    }
                }
            }
        }
        s
    }
}

fn two(name: &str, pos: &str, neg: &str, value: f64) -> TwoTerminal {
    TwoTerminal {
        name: name.to_string(),
        pos: pos.to_string(),
        neg: neg.to_string(),
        value,
        span: Span { line: 0, column: 0 },
    }
}

/// Parses a number with an optional SPICE magnitude suffix
/// (`f p n u m k meg g t`, case-insensitive). Letters after the suffix are
/// ignored, as in SPICE (`10pF`, `50ohm`).
pub fn parse_value(token: &str) -> Option<f64> {
    let bytes = token.as_bytes();
    let mut i = 0;
    if i < bytes.len() && (bytes[i] == b'+' || bytes[i] == b'-') {
        i += 1;
    }
    let digits_start = i;
    while i < bytes.len() && bytes[i].is_ascii_digit() {
        i += 1;
    }
    if i < bytes.len() && bytes[i] == b'.' {
        i += 1;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
    }
    if i == digits_start || (i == digits_start + 1 && bytes[digits_start] == b'.') {
        return None;
    }
    if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
        let mut j = i + 1;
        if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
            j += 1;
        }
        let exp_start = j;
        while j < bytes.len() && bytes[j].is_ascii_digit() {
            j += 1;
        }
        if j > exp_start {
            i = j;
        }
    }
    let mantissa: f64 = token[..i].parse().ok()?;
    let rest = token[i..].to_ascii_lowercase();
    if !rest.chars().all(|c| c.is_ascii_alphabetic()) {
        return None;
    }
    let scale = if rest.starts_with("meg") {
        1e6
    } else {
        match rest.chars().next() {
            None => 1.0,
            Some('f') => 1e-15,
            Some('p') => 1e-12,
            Some('n') => 1e-9,
            Some('u') => 1e-6,
            Some('m') => 1e-3,
            Some('k') => 1e3,
            Some('g') => 1e9,
            Some('t') => 1e12,
            Some(_) => 1.0,
        }
    };
    Some(mantissa * scale)
}

struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokenize(line: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    for (idx, ch) in line.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push(Token {
                    text: &line[s..idx],
                    column: line[..s].chars().count() + 1,
                });
            }
        } else if start.is_none() {
            start = Some(idx);
        }
    }
    if let Some(s) = start {
        out.push(Token {
            text: &line[s..],
            column: line[..s].chars().count() + 1,
        });
    }
    out
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> MorError {
    MorError::Syntax {
        span: Span { line, column },
        message: message.into(),
    }
}

/// Parses netlist text into an element list.
pub fn parse_netlist(text: &str) -> Result<ElementList> {
    let mut list = ElementList::new();
    let mut seen: HashMap<String, Span> = HashMap::new();
    let mut inductors: HashMap<String, ()> = HashMap::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let tokens = tokenize(raw);
        let Some(first) = tokens.first() else {
            continue;
        };
        if first.text.starts_with('*') {
            continue;
        }
        if first.text.starts_with('.') {
            if first.text.eq_ignore_ascii_case(".end") && tokens.len() == 1 {
                break;
            }
            return Err(syntax(line_no, first.column, format!("unsupported directive '{}'", first.text)));
        }
        let span = Span {
            line: line_no,
            column: first.column,
        };
        let name = first.text.to_string();
        let key = name.to_ascii_uppercase();
        let kind = key.chars().next().unwrap();
        if !matches!(kind, 'R' | 'C' | 'L' | 'K' | 'P') {
            return Err(syntax(line_no, first.column, format!("unknown element type '{}'", first.text)));
        }
        if key.len() < 2 {
            return Err(syntax(line_no, first.column, "element name needs a suffix after the type letter"));
        }
        if let Some(_prev) = seen.get(&key) {
            return Err(MorError::DuplicateElement { name, span });
        }

        let element = match kind {
            'R' | 'C' | 'L' => {
                if tokens.len() != 4 {
                    let col = tokens.get(4).map_or(raw.chars().count() + 1, |t| t.column);
                    return Err(syntax(
                        line_no,
                        col,
                        format!("expected '{} n+ n- value', found {} fields", name, tokens.len()),
                    ));
                }
                let value = parse_value(tokens[3].text).ok_or_else(|| {
                    syntax(line_no, tokens[3].column, format!("cannot parse value '{}'", tokens[3].text))
                })?;
                let what = match kind {
                    'R' => "resistance",
                    'C' => "capacitance",
                    _ => "inductance",
                };
                if !value.is_finite() || value <= 0.0 {
                    return Err(MorError::InvalidValue {
                        name,
                        span: Span {
                            line: line_no,
                            column: tokens[3].column,
                        },
                        message: format!("non-positive {what} {value}"),
                    });
                }
                if tokens[1].text == tokens[2].text {
                    return Err(syntax(line_no, tokens[2].column, "both terminals on the same node"));
                }
                let t = TwoTerminal {
                    name: name.clone(),
                    pos: tokens[1].text.to_string(),
                    neg: tokens[2].text.to_string(),
                    value,
                    span,
                };
                match kind {
                    'R' => Element::Resistor(t),
                    'C' => Element::Capacitor(t),
                    _ => {
                        inductors.insert(key.clone(), ());
                        Element::Inductor(t)
                    }
                }
            }
            'K' => {
                if tokens.len() != 4 {
                    return Err(syntax(line_no, first.column, format!("expected '{} Lname1 Lname2 k', found {} fields", name, tokens.len())));
                }
                for t in &tokens[1..3] {
                    if !inductors.contains_key(&t.text.to_ascii_uppercase()) {
                        return Err(MorError::UndeclaredInductor {
                            coupling: name,
                            inductor: t.text.to_string(),
                            span: Span {
                                line: line_no,
                                column: t.column,
                            },
                        });
                    }
                }
                if tokens[1].text.eq_ignore_ascii_case(tokens[2].text) {
                    return Err(syntax(line_no, tokens[2].column, "an inductor cannot couple to itself"));
                }
                let vt = &tokens[3];
                let vspan = Span {
                    line: line_no,
                    column: vt.column,
                };
                let value = if let Some(m) = vt.text.strip_prefix("M=").or_else(|| vt.text.strip_prefix("m=")) {
                    let m = parse_value(m)
                        .ok_or_else(|| syntax(line_no, vt.column, format!("cannot parse mutual inductance '{}'", vt.text)))?;
                    if !m.is_finite() {
                        return Err(MorError::InvalidValue { name, span: vspan, message: "mutual inductance must be finite".into() });
                    }
                    CouplingValue::Mutual(m)
                } else {
                    let k = parse_value(vt.text)
                        .ok_or_else(|| syntax(line_no, vt.column, format!("cannot parse coupling coefficient '{}'", vt.text)))?;
                    if !k.is_finite() || k.abs() > 1.0 {
                        return Err(MorError::InvalidValue {
                            name,
                            span: vspan,
                            message: format!("coupling coefficient {k} outside [-1, 1]"),
                        });
                    }
                    CouplingValue::Coefficient(k)
                };
                Element::Coupling(Coupling {
                    name: name.clone(),
                    first: tokens[1].text.to_string(),
                    second: tokens[2].text.to_string(),
                    value,
                    span,
                })
            }
            _ => {
                if tokens.len() != 2 && tokens.len() != 3 {
                    return Err(syntax(line_no, first.column, format!("expected '{} node [ref]', found {} fields", name, tokens.len())));
                }
                if tokens[1].text == GROUND {
                    return Err(syntax(line_no, tokens[1].column, "port node cannot be ground"));
                }
                let reference = tokens.get(2).map_or(GROUND, |t| t.text).to_string();
                if reference == tokens[1].text {
                    return Err(syntax(line_no, tokens[2].column, "port reference equals port node"));
                }
                Element::Port(Port {
                    name: name.clone(),
                    node: tokens[1].text.to_string(),
                    reference,
                    span,
                })
            }
        };
        seen.insert(key, span);
        list.elements.push(element);
    }

    // Port nodes must be part of the circuit.
    let mut circuit_nodes: HashMap<&str, ()> = HashMap::new();
    circuit_nodes.insert(GROUND, ());
    for e in &list.elements {
        if !matches!(e, Element::Port(_)) {
            for n in e.nodes() {
                circuit_nodes.insert(n, ());
            }
        }
    }
    for p in list.ports() {
        for n in [&p.node, &p.reference] {
            if !circuit_nodes.contains_key(n.as_str()) {
                return Err(MorError::InvalidValue {
                    name: p.name.clone(),
                    span: p.span,
                    message: format!("port node '{n}' is not connected to any element"),
                });
            }
        }
    }
    Ok(list)
}
