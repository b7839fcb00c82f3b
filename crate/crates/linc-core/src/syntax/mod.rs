//! The surface language: `.lnc` files carrying kind and type declarations,
//! (co-)inductive definitions, named invariants, proof scripts and goals.

mod elab;
mod infer;
mod lex;
mod parse;
mod print;

pub use elab::{elaborate, elaborate_proof, parse_sequent_str, Module, NamedProof};
pub use parse::{parse_file, ParseError};
pub use print::{print_derivation_script, print_source, term_to_string, PrintError};

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    pub fn join(self, other: Span) -> Span {
        Span {
            start: self.start.min(other.start),
            end: self.end.max(other.end),
        }
    }

    /// 1-based line and column of the span start.
    pub fn line_col(&self, src: &str) -> (usize, usize) {
        let mut line = 1;
        let mut col = 1;
        for (i, c) in src.char_indices() {
            if i >= self.start {
                break;
            }
            if c == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
        }
        (line, col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SType {
    Name(String),
    Arrow(Box<SType>, Box<SType>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SExpr {
    pub kind: SExprKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SExprKind {
    Id(String),
    True,
    False,
    Eq(Box<SExpr>, Box<SExpr>),
    And(Box<SExpr>, Box<SExpr>),
    Or(Box<SExpr>, Box<SExpr>),
    Imp(Box<SExpr>, Box<SExpr>),
    All(Vec<String>, Box<SExpr>),
    Ex(Vec<String>, Box<SExpr>),
    Lam(String, Option<SType>, Box<SExpr>),
    App(Box<SExpr>, Box<SExpr>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SSequent {
    pub left: Vec<SExpr>,
    pub right: SExpr,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SArg {
    Pos(usize),
    Names(Vec<String>),
    Term(SExpr),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SStep {
    pub rule: String,
    pub args: Vec<SArg>,
    pub children: SChildren,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SChildren {
    None,
    Chain(Box<SStep>),
    Paren(Vec<SStep>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Item {
    Kind {
        name: String,
        span: Span,
    },
    TypeDecl {
        name: String,
        ty: SType,
        span: Span,
    },
    Define {
        flavor: crate::logic::Flavor,
        name: String,
        ty: SType,
        head_args: Vec<String>,
        body: SExpr,
        span: Span,
    },
    Invariant {
        name: String,
        pred: String,
        inv: SExpr,
        span: Span,
    },
    Proof {
        name: String,
        goal: SSequent,
        script: SStep,
        span: Span,
    },
    Goal {
        name: String,
        goal: SSequent,
        span: Span,
    },
}

impl Item {
    pub fn span(&self) -> Span {
        match self {
            Item::Kind { span, .. }
            | Item::TypeDecl { span, .. }
            | Item::Define { span, .. }
            | Item::Invariant { span, .. }
            | Item::Proof { span, .. }
            | Item::Goal { span, .. } => *span,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SourceFile {
    pub items: Vec<Item>,
}

impl fmt::Display for SType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SType::Name(n) => write!(f, "{n}"),
            SType::Arrow(a, b) => match a.as_ref() {
                SType::Arrow(..) => write!(f, "({a}) -> {b}"),
                _ => write!(f, "{a} -> {b}"),
            },
        }
    }
}
