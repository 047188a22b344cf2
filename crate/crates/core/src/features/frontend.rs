//! Built-in frontend for a small imperative language.
//!
//! ```text
//! program  := item*
//! item     := "fn" IDENT "(" [IDENT ("," IDENT)*] ")" block | stmt
//! stmt     := block
//!           | "if" "(" expr ")" stmt ["else" stmt]
//!           | "while" "(" expr ")" stmt
//!           | "return" [expr] ";"
//!           | IDENT ("=" | "+=" | "-=" | "*=" | "/=" | "%=") expr ";"
//!           | expr ";"
//! block    := "{" stmt* "}"
//! expr     := binary expression over || && == != < <= > >= + - * / %,
//!             unary - !, calls f(a, b), identifiers, numbers, strings,
//!             true/false and parentheses
//! ```
//!
//! The CFG has one node per simple statement and per branch/loop condition.
//! Branch nodes get an edge to each arm (or past the `if` when there is no
//! `else`), loop bodies get a back-edge to the loop head, `return` has no
//! successor, and each function body is a separate subgraph.

use super::ast::AstNode;
use super::cfg::CfgGraph;
use super::lexer::{Lexer, Token, TokenKind};
use crate::corpus::SeedProgram;
use crate::error::{Error, Result};

const MAX_DEPTH: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum BinOp {
    Or,
    And,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Add,
    Sub,
    Mul,
    Div,
    Rem,
}

impl BinOp {
    fn from_token(text: &str) -> Option<(BinOp, u8)> {
        Some(match text {
            "||" => (BinOp::Or, 1),
            "&&" => (BinOp::And, 2),
            "==" => (BinOp::Eq, 3),
            "!=" => (BinOp::Ne, 3),
            "<" => (BinOp::Lt, 4),
            "<=" => (BinOp::Le, 4),
            ">" => (BinOp::Gt, 4),
            ">=" => (BinOp::Ge, 4),
            "+" => (BinOp::Add, 5),
            "-" => (BinOp::Sub, 5),
            "*" => (BinOp::Mul, 6),
            "/" => (BinOp::Div, 6),
            "%" => (BinOp::Rem, 6),
            _ => return None,
        })
    }

    fn name(self) -> &'static str {
        match self {
            BinOp::Or => "or",
            BinOp::And => "and",
            BinOp::Eq => "eq",
            BinOp::Ne => "ne",
            BinOp::Lt => "lt",
            BinOp::Le => "le",
            BinOp::Gt => "gt",
            BinOp::Ge => "ge",
            BinOp::Add => "add",
            BinOp::Sub => "sub",
            BinOp::Mul => "mul",
            BinOp::Div => "div",
            BinOp::Rem => "rem",
        }
    }
}

#[derive(Debug, Clone)]
enum Expr {
    Number,
    Str,
    Bool,
    Name,
    Neg(Box<Expr>),
    Not(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Vec<Expr>),
}

#[derive(Debug, Clone)]
enum Stmt {
    Assign(Option<BinOp>, Expr),
    Expr(Expr),
    If(Expr, Box<Stmt>, Option<Box<Stmt>>),
    While(Expr, Box<Stmt>),
    Return(Option<Expr>),
    Block(Vec<Stmt>),
}

#[derive(Debug, Clone)]
enum Item {
    Function(usize, Vec<Stmt>),
    Stmt(Stmt),
}

struct Parser<'a> {
    seed: &'a str,
    tokens: Vec<Token<'a>>,
    pos: usize,
    depth: usize,
    end: (usize, usize),
}

impl<'a> Parser<'a> {
    fn new(seed: &'a str, src: &'a str) -> Self {
        let tokens: Vec<Token<'a>> = Lexer::new(src).collect();
        let end = src.lines().enumerate().last().map_or((1, 1), |(i, l)| {
            if src.ends_with('\n') {
                (i + 2, 1)
            } else {
                (i + 1, l.chars().count() + 1)
            }
        });
        Parser {
            seed,
            tokens,
            pos: 0,
            depth: 0,
            end,
        }
    }

    fn peek(&self) -> Option<&Token<'a>> {
        self.tokens.get(self.pos)
    }

    fn peek_text(&self) -> Option<&'a str> {
        self.tokens.get(self.pos).map(|t| t.text)
    }

    fn error(&self, message: impl Into<String>) -> Error {
        let (line, column) = self.peek().map_or(self.end, |t| (t.line, t.column));
        Error::Syntax {
            seed: self.seed.to_owned(),
            line,
            column,
            message: message.into(),
        }
    }

    fn expect(&mut self, text: &str) -> Result<()> {
        match self.peek_text() {
            Some(t) if t == text => {
                self.pos += 1;
                Ok(())
            }
            Some(t) => Err(self.error(format!("expected `{text}`, found `{t}`"))),
            None => Err(self.error(format!("expected `{text}`, found end of input"))),
        }
    }

    fn eat(&mut self, text: &str) -> bool {
        if self.peek_text() == Some(text) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> Result<&'a str> {
        match self.peek().map(|t| (t.kind, t.text)) {
            Some((TokenKind::Ident, text)) if !is_keyword(text) => {
                self.pos += 1;
                Ok(text)
            }
            Some((_, text)) => Err(self.error(format!("expected identifier, found `{text}`"))),
            None => Err(self.error("expected identifier, found end of input")),
        }
    }

    fn enter(&mut self) -> Result<()> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(self.error("nesting too deep"));
        }
        Ok(())
    }

    fn program(&mut self) -> Result<Vec<Item>> {
        let mut items = Vec::new();
        while self.peek().is_some() {
            if self.eat("fn") {
                self.ident()?;
                self.expect("(")?;
                let mut params = 0;
                if !self.eat(")") {
                    loop {
                        self.ident()?;
                        params += 1;
                        if self.eat(")") {
                            break;
                        }
                        self.expect(",")?;
                    }
                }
                let body = self.block()?;
                items.push(Item::Function(params, body));
            } else {
                items.push(Item::Stmt(self.stmt()?));
            }
        }
        Ok(items)
    }

    fn block(&mut self) -> Result<Vec<Stmt>> {
        self.expect("{")?;
        let mut body = Vec::new();
        while !self.eat("}") {
            if self.peek().is_none() {
                return Err(self.error("unclosed block"));
            }
            body.push(self.stmt()?);
        }
        Ok(body)
    }

    fn stmt(&mut self) -> Result<Stmt> {
        self.enter()?;
        let stmt = self.stmt_inner();
        self.depth -= 1;
        stmt
    }

    fn stmt_inner(&mut self) -> Result<Stmt> {
        match self.peek_text() {
            Some("{") => Ok(Stmt::Block(self.block()?)),
            Some("if") => {
                self.pos += 1;
                self.expect("(")?;
                let cond = self.expr()?;
                self.expect(")")?;
                let then = Box::new(self.stmt()?);
                let other = if self.eat("else") {
                    Some(Box::new(self.stmt()?))
                } else {
                    None
                };
                Ok(Stmt::If(cond, then, other))
            }
            Some("while") => {
                self.pos += 1;
                self.expect("(")?;
                let cond = self.expr()?;
                self.expect(")")?;
                Ok(Stmt::While(cond, Box::new(self.stmt()?)))
            }
            Some("return") => {
                self.pos += 1;
                let value = if self.eat(";") {
                    None
                } else {
                    let e = self.expr()?;
                    self.expect(";")?;
                    Some(e)
                };
                Ok(Stmt::Return(value))
            }
            Some("fn") => Err(self.error("functions may only be declared at top level")),
            Some(_) => {
                let assign_op = match (self.peek(), self.tokens.get(self.pos + 1).map(|t| t.text)) {
                    (Some(t), Some(op)) if t.kind == TokenKind::Ident && !is_keyword(t.text) => {
                        match op {
                            "=" => Some(None),
                            "+=" => Some(Some(BinOp::Add)),
                            "-=" => Some(Some(BinOp::Sub)),
                            "*=" => Some(Some(BinOp::Mul)),
                            "/=" => Some(Some(BinOp::Div)),
                            "%=" => Some(Some(BinOp::Rem)),
                            _ => None,
                        }
                    }
                    _ => None,
                };
                let stmt = match assign_op {
                    Some(op) => {
                        self.pos += 2;
                        Stmt::Assign(op, self.expr()?)
                    }
                    None => Stmt::Expr(self.expr()?),
                };
                self.expect(";")?;
                Ok(stmt)
            }
            None => Err(self.error("expected statement, found end of input")),
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        self.binary(1)
    }

    fn binary(&mut self, min_prec: u8) -> Result<Expr> {
        self.enter()?;
        let mut lhs = self.unary()?;
        while let Some((op, prec)) = self.peek_text().and_then(BinOp::from_token) {
            if prec < min_prec {
                break;
            }
            self.pos += 1;
            let rhs = self.binary(prec + 1)?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        self.depth -= 1;
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat("-") {
            self.enter()?;
            let e = Expr::Neg(Box::new(self.unary()?));
            self.depth -= 1;
            return Ok(e);
        }
        if self.eat("!") {
            self.enter()?;
            let e = Expr::Not(Box::new(self.unary()?));
            self.depth -= 1;
            return Ok(e);
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Expr> {
        let tok = match self.peek() {
            Some(t) => t.clone(),
            None => return Err(self.error("expected expression, found end of input")),
        };
        match tok.kind {
            TokenKind::Number => {
                self.pos += 1;
                Ok(Expr::Number)
            }
            TokenKind::Str | TokenKind::Char => {
                self.pos += 1;
                Ok(Expr::Str)
            }
            TokenKind::Ident if tok.text == "true" || tok.text == "false" => {
                self.pos += 1;
                Ok(Expr::Bool)
            }
            TokenKind::Ident if !is_keyword(tok.text) => {
                self.pos += 1;
                if self.eat("(") {
                    let mut args = Vec::new();
                    if !self.eat(")") {
                        loop {
                            args.push(self.expr()?);
                            if self.eat(")") {
                                break;
                            }
                            self.expect(",")?;
                        }
                    }
                    Ok(Expr::Call(args))
                } else {
                    Ok(Expr::Name)
                }
            }
            _ if tok.text == "(" => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(")")?;
                Ok(e)
            }
            _ => Err(self.error(format!("expected expression, found `{}`", tok.text))),
        }
    }
}

fn is_keyword(s: &str) -> bool {
    matches!(
        s,
        "fn" | "if" | "else" | "while" | "return" | "true" | "false"
    )
}

fn expr_ast(e: &Expr) -> AstNode {
    match e {
        Expr::Number => AstNode::leaf("Number"),
        Expr::Str => AstNode::leaf("String"),
        Expr::Bool => AstNode::leaf("Bool"),
        Expr::Name => AstNode::leaf("Name"),
        Expr::Neg(inner) => AstNode::new("Neg", vec![expr_ast(inner)]),
        Expr::Not(inner) => AstNode::new("Not", vec![expr_ast(inner)]),
        Expr::Binary(op, l, r) => AstNode::new(
            format!("Binary:{}", op.name()),
            vec![expr_ast(l), expr_ast(r)],
        ),
        Expr::Call(args) => {
            let mut children = vec![AstNode::leaf("Name")];
            children.extend(args.iter().map(expr_ast));
            AstNode::new("Call", children)
        }
    }
}

fn stmt_ast(s: &Stmt) -> AstNode {
    match s {
        Stmt::Assign(None, e) => AstNode::new("Assign", vec![AstNode::leaf("Name"), expr_ast(e)]),
        Stmt::Assign(Some(op), e) => AstNode::new(
            format!("CompoundAssign:{}", op.name()),
            vec![AstNode::leaf("Name"), expr_ast(e)],
        ),
        Stmt::Expr(e) => AstNode::new("ExprStmt", vec![expr_ast(e)]),
        Stmt::If(c, t, e) => {
            let mut children = vec![expr_ast(c), stmt_ast(t)];
            if let Some(e) = e {
                children.push(stmt_ast(e));
            }
            AstNode::new("If", children)
        }
        Stmt::While(c, body) => AstNode::new("While", vec![expr_ast(c), stmt_ast(body)]),
        Stmt::Return(None) => AstNode::leaf("Return"),
        Stmt::Return(Some(e)) => AstNode::new("Return", vec![expr_ast(e)]),
        Stmt::Block(body) => AstNode::new("Block", body.iter().map(stmt_ast).collect()),
    }
}

fn program_ast(items: &[Item]) -> AstNode {
    let children = items
        .iter()
        .map(|item| match item {
            Item::Function(params, body) => AstNode::new(
                "Function",
                vec![
                    AstNode::new("Params", vec![AstNode::leaf("Param"); *params]),
                    AstNode::new("Block", body.iter().map(stmt_ast).collect()),
                ],
            ),
            Item::Stmt(s) => stmt_ast(s),
        })
        .collect();
    AstNode::new("Program", children)
}

/// Normalized right-hand-side class, echoing Jimple statement shapes.
fn rhs_class(e: &Expr) -> String {
    match e {
        Expr::Number | Expr::Str | Expr::Bool => "const".into(),
        Expr::Name => "local".into(),
        Expr::Neg(_) => "neg".into(),
        Expr::Not(_) => "not".into(),
        Expr::Binary(op, _, _) => op.name().into(),
        Expr::Call(_) => "invoke".into(),
    }
}

fn cond_class(e: &Expr) -> String {
    match e {
        Expr::Binary(op, _, _) => op.name().into(),
        Expr::Not(_) => "not".into(),
        Expr::Call(_) => "invoke".into(),
        _ => "value".into(),
    }
}

struct CfgBuilder {
    graph: CfgGraph,
}

impl CfgBuilder {
    fn node(&mut self, label: String, preds: &[u64]) -> u64 {
        let id = self.graph.add_node(label);
        for &p in preds {
            self.graph.add_edge(p, id);
        }
        id
    }

    /// Lowers `s` with incoming edges from `preds`; returns its exits.
    fn stmt(&mut self, s: &Stmt, preds: Vec<u64>) -> Vec<u64> {
        match s {
            Stmt::Assign(compound, e) => {
                let class = match compound {
                    Some(op) => op.name().to_owned(),
                    None => rhs_class(e),
                };
                vec![self.node(format!("assign:{class}"), &preds)]
            }
            Stmt::Expr(Expr::Call(_)) => vec![self.node("invoke".into(), &preds)],
            Stmt::Expr(e) => vec![self.node(format!("expr:{}", rhs_class(e)), &preds)],
            Stmt::Return(v) => {
                let label = match v {
                    Some(e) => format!("return:{}", rhs_class(e)),
                    None => "return".into(),
                };
                self.node(label, &preds);
                Vec::new()
            }
            Stmt::If(c, then, other) => {
                let branch = self.node(format!("if:{}", cond_class(c)), &preds);
                let mut exits = self.stmt(then, vec![branch]);
                match other {
                    Some(e) => exits.extend(self.stmt(e, vec![branch])),
                    None => exits.push(branch),
                }
                exits
            }
            Stmt::While(c, body) => {
                let head = self.node(format!("while:{}", cond_class(c)), &preds);
                for exit in self.stmt(body, vec![head]) {
                    self.graph.add_edge(exit, head);
                }
                vec![head]
            }
            Stmt::Block(body) => self.seq(body, preds),
        }
    }

    fn seq(&mut self, body: &[Stmt], mut preds: Vec<u64>) -> Vec<u64> {
        for s in body {
            preds = self.stmt(s, preds);
        }
        preds
    }
}

fn program_cfg(items: &[Item]) -> CfgGraph {
    let mut b = CfgBuilder {
        graph: CfgGraph::default(),
    };
    let mut top = Vec::new();
    for item in items {
        match item {
            Item::Function(_, body) => {
                b.seq(body, Vec::new());
            }
            Item::Stmt(s) => top = b.stmt(s, top),
        }
    }
    b.graph
}

/// Parses `src` and returns its AST and CFG.
pub fn parse_program(seed_id: &str, src: &str) -> Result<(AstNode, CfgGraph)> {
    let items = Parser::new(seed_id, src).program()?;
    Ok((program_ast(&items), program_cfg(&items)))
}

pub fn build_frontend_repr(seed: &SeedProgram) -> Result<(AstNode, CfgGraph)> {
    parse_program(&seed.id, seed.source()?)
}
