use super::ast::*;
use super::error::{CypherError, Position};
use super::lexer::{tokenize, Keyword, Spanned, Token};

/// Parses query text into a [`Query`]. Constructs outside the supported
/// subset (variable-length paths, extra clauses, parameters, functions other
/// than `count`) fail with [`CypherError::UnsupportedFeature`].
pub fn parse(text: &str) -> Result<Query, CypherError> {
    let tokens = tokenize(text)?;
    let mut parser = Parser { text, tokens, pos: 0 };
    parser.query()
}

struct Parser<'a> {
    text: &'a str,
    tokens: Vec<Spanned>,
    pos: usize,
}

type PResult<T> = Result<T, CypherError>;

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|s| &s.token)
    }

    fn peek_at(&self, ahead: usize) -> Option<&Token> {
        self.tokens.get(self.pos + ahead).map(|s| &s.token)
    }

    fn position(&self) -> Position {
        match self.tokens.get(self.pos) {
            Some(s) => s.position,
            None => self.end_position(),
        }
    }

    fn end_position(&self) -> Position {
        let line = self.text.matches('\n').count() + 1;
        let column = self.text.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        Position { offset: self.text.len(), line, column }
    }

    fn at(&self, token: &Token) -> bool {
        self.peek() == Some(token)
    }

    fn at_kw(&self, kw: Keyword) -> bool {
        self.peek() == Some(&Token::Keyword(kw))
    }

    fn eat(&mut self, token: &Token) -> bool {
        if self.at(token) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn eat_kw(&mut self, kw: Keyword) -> bool {
        self.eat(&Token::Keyword(kw))
    }

    fn error(&self, expected: &[&str]) -> CypherError {
        CypherError::Parse {
            position: self.position(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: self.peek().map_or_else(|| "end of input".to_string(), |t| t.to_string()),
        }
    }

    fn unsupported(&self, feature: impl Into<String>) -> CypherError {
        CypherError::UnsupportedFeature { position: self.position(), feature: feature.into() }
    }

    fn expect(&mut self, token: &Token, label: &str) -> PResult<()> {
        if self.eat(token) {
            Ok(())
        } else {
            Err(self.error(&[label]))
        }
    }

    /// Raw source text of the current token.
    fn raw(&self) -> &str {
        let s = &self.tokens[self.pos];
        &self.text[s.position.offset..s.end]
    }

    fn identifier(&mut self, what: &str) -> PResult<String> {
        match self.peek() {
            Some(Token::Ident(name)) => {
                let name = name.clone();
                self.pos += 1;
                Ok(name)
            }
            Some(Token::Dollar) => Err(self.unsupported("query parameters")),
            _ => Err(self.error(&[what])),
        }
    }

    /// Label, relationship type or property key: keywords are accepted verbatim.
    fn symbolic_name(&mut self, what: &str) -> PResult<String> {
        match self.peek() {
            Some(Token::Ident(name)) => {
                let name = name.clone();
                self.pos += 1;
                Ok(name)
            }
            Some(Token::Keyword(_)) => {
                let name = self.raw().to_string();
                self.pos += 1;
                Ok(name)
            }
            _ => Err(self.error(&[what])),
        }
    }

    fn reject_clause_keyword(&self) -> PResult<()> {
        if let Some(Token::Keyword(kw)) = self.peek() {
            use Keyword::*;
            let feature = match kw {
                OPTIONAL => "OPTIONAL MATCH",
                WITH => "WITH clauses",
                CREATE | MERGE | DELETE | DETACH | SET | REMOVE => "mutation clauses",
                UNWIND => "UNWIND",
                UNION => "UNION",
                CALL | YIELD => "procedure calls and subqueries",
                FOREACH => "FOREACH",
                LOAD => "LOAD CSV",
                MATCH => "multiple MATCH clauses",
                _ => return Ok(()),
            };
            return Err(self.unsupported(feature));
        }
        Ok(())
    }

    fn query(&mut self) -> PResult<Query> {
        self.reject_clause_keyword_except_match()?;
        let mut patterns = Vec::new();
        if self.eat_kw(Keyword::MATCH) {
            patterns.push(self.pattern()?);
            while self.eat(&Token::Comma) {
                patterns.push(self.pattern()?);
            }
        }
        let where_clause = if self.eat_kw(Keyword::WHERE) { Some(self.or_expr()?) } else { None };
        self.reject_clause_keyword()?;
        if !self.eat_kw(Keyword::RETURN) {
            let expected: &[&str] = match (patterns.is_empty(), where_clause.is_some()) {
                (true, _) => &["MATCH", "RETURN"],
                (false, false) => &["','", "WHERE", "RETURN"],
                (false, true) => &["AND", "OR", "RETURN"],
            };
            return Err(self.error(expected));
        }
        let distinct = self.eat_kw(Keyword::DISTINCT);
        if self.at(&Token::Star) {
            return Err(self.unsupported("RETURN *"));
        }
        let mut return_items = vec![self.return_item()?];
        while self.eat(&Token::Comma) {
            return_items.push(self.return_item()?);
        }
        let mut order_by = Vec::new();
        if self.eat_kw(Keyword::ORDER) {
            if !self.eat_kw(Keyword::BY) {
                return Err(self.error(&["BY"]));
            }
            order_by.push(self.sort_item()?);
            while self.eat(&Token::Comma) {
                order_by.push(self.sort_item()?);
            }
        }
        let skip = if self.eat_kw(Keyword::SKIP) { Some(self.count_literal()?) } else { None };
        let limit = if self.eat_kw(Keyword::LIMIT) { Some(self.count_literal()?) } else { None };
        self.eat(&Token::Semicolon);
        if self.peek().is_some() {
            self.reject_clause_keyword()?;
            let mut expected = vec!["end of input"];
            if limit.is_none() {
                expected.insert(0, "LIMIT");
                if skip.is_none() {
                    expected.insert(0, "SKIP");
                    if order_by.is_empty() {
                        expected.insert(0, "ORDER BY");
                    }
                }
            }
            return Err(self.error(&expected));
        }
        Ok(Query { patterns, where_clause, distinct, return_items, order_by, skip, limit })
    }

    fn reject_clause_keyword_except_match(&self) -> PResult<()> {
        if self.at_kw(Keyword::MATCH) {
            return Ok(());
        }
        self.reject_clause_keyword()
    }

    fn count_literal(&mut self) -> PResult<u64> {
        match self.peek() {
            Some(Token::Int(i)) => {
                let i = *i as u64;
                self.pos += 1;
                Ok(i)
            }
            Some(Token::Dollar) => Err(self.unsupported("query parameters")),
            _ => Err(self.error(&["non-negative integer"])),
        }
    }

    fn pattern(&mut self) -> PResult<Pattern> {
        if let Some(Token::Ident(name)) = self.peek() {
            if self.peek_at(1) == Some(&Token::Eq) {
                return Err(self.unsupported("named paths"));
            }
            let lowered = name.to_ascii_lowercase();
            if (lowered == "shortestpath" || lowered == "allshortestpaths") && self.peek_at(1) == Some(&Token::LParen) {
                return Err(self.unsupported("shortestPath"));
            }
        }
        let start = self.node_pattern()?;
        let mut steps = Vec::new();
        while matches!(self.peek(), Some(Token::Dash | Token::Lt)) {
            let rel = self.rel_pattern()?;
            let node = self.node_pattern()?;
            steps.push((rel, node));
        }
        Ok(Pattern { start, steps })
    }

    fn node_pattern(&mut self) -> PResult<NodePattern> {
        self.expect(&Token::LParen, "'('")?;
        let variable = match self.peek() {
            Some(Token::Ident(_)) => Some(self.identifier("variable")?),
            Some(Token::Dollar) => return Err(self.unsupported("query parameters")),
            _ => None,
        };
        let mut labels = Vec::new();
        while self.eat(&Token::Colon) {
            labels.push(self.symbolic_name("label")?);
        }
        let properties = if self.at(&Token::LBrace) { self.property_map()? } else { Vec::new() };
        if self.at(&Token::Dollar) {
            return Err(self.unsupported("query parameters"));
        }
        self.expect(&Token::RParen, "')'")?;
        Ok(NodePattern { variable, labels, properties })
    }

    fn property_map(&mut self) -> PResult<Vec<(String, Literal)>> {
        self.expect(&Token::LBrace, "'{'")?;
        let mut props = Vec::new();
        if self.eat(&Token::RBrace) {
            return Ok(props);
        }
        loop {
            let key = self.symbolic_name("property key")?;
            self.expect(&Token::Colon, "':'")?;
            let value = self.literal()?;
            props.push((key, value));
            if self.eat(&Token::Comma) {
                continue;
            }
            self.expect(&Token::RBrace, "'}'")?;
            return Ok(props);
        }
    }

    fn rel_pattern(&mut self) -> PResult<RelPattern> {
        let left_arrow = self.eat(&Token::Lt);
        self.expect(&Token::Dash, "'-'")?;
        let (variable, types) = if self.at(&Token::LBracket) { self.rel_detail()? } else { (None, Vec::new()) };
        self.expect(&Token::Dash, "'-'")?;
        let right_arrow = self.eat(&Token::Gt);
        let direction = match (left_arrow, right_arrow) {
            (false, true) => RelDirection::Right,
            (true, false) => RelDirection::Left,
            _ => RelDirection::Undirected,
        };
        Ok(RelPattern { variable, types, direction })
    }

    fn rel_detail(&mut self) -> PResult<(Option<String>, Vec<String>)> {
        self.expect(&Token::LBracket, "'['")?;
        let variable = match self.peek() {
            Some(Token::Ident(_)) => Some(self.identifier("variable")?),
            _ => None,
        };
        let mut types = Vec::new();
        if self.eat(&Token::Colon) {
            types.push(self.symbolic_name("relationship type")?);
            while self.eat(&Token::Pipe) {
                self.eat(&Token::Colon);
                types.push(self.symbolic_name("relationship type")?);
            }
        }
        match self.peek() {
            Some(Token::Star) => {
                return Err(
                    self.unsupported("variable-length relationship patterns (only direct relationships are allowed)")
                )
            }
            Some(Token::LBrace) => return Err(self.unsupported("relationship property maps")),
            Some(Token::Dollar) => return Err(self.unsupported("query parameters")),
            _ => {}
        }
        self.expect(&Token::RBracket, "']'")?;
        Ok((variable, types))
    }

    fn literal(&mut self) -> PResult<Literal> {
        let negative = self.at(&Token::Dash);
        if negative {
            match self.peek_at(1) {
                Some(Token::Int(_) | Token::Float(_)) => self.pos += 1,
                _ => return Err(self.error(&["literal"])),
            }
        }
        let lit = match self.peek() {
            Some(Token::Int(i)) => Literal::Int(if negative { -*i } else { *i }),
            Some(Token::Float(x)) => Literal::Float(if negative { -*x } else { *x }),
            Some(Token::Str(s)) => Literal::Str(s.clone()),
            Some(Token::Keyword(Keyword::TRUE)) => Literal::Bool(true),
            Some(Token::Keyword(Keyword::FALSE)) => Literal::Bool(false),
            Some(Token::Keyword(Keyword::NULL)) => Literal::Null,
            Some(Token::Dollar) => return Err(self.unsupported("query parameters")),
            Some(Token::LBracket) | Some(Token::LBrace) => return Err(self.unsupported("list and map values")),
            _ => return Err(self.error(&["literal"])),
        };
        self.pos += 1;
        Ok(lit)
    }

    fn or_expr(&mut self) -> PResult<Expr> {
        let mut left = self.and_expr()?;
        loop {
            if self.eat_kw(Keyword::OR) {
                let right = self.and_expr()?;
                left = Expr::Or(Box::new(left), Box::new(right));
            } else if self.at_kw(Keyword::XOR) {
                return Err(self.unsupported("XOR"));
            } else {
                return Ok(left);
            }
        }
    }

    fn and_expr(&mut self) -> PResult<Expr> {
        let mut left = self.not_expr()?;
        while self.eat_kw(Keyword::AND) {
            let right = self.not_expr()?;
            left = Expr::And(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn not_expr(&mut self) -> PResult<Expr> {
        if self.eat_kw(Keyword::NOT) {
            return Ok(Expr::Not(Box::new(self.not_expr()?)));
        }
        if self.eat(&Token::LParen) {
            let inner = self.or_expr()?;
            if self.at(&Token::RParen) {
                self.pos += 1;
                return Ok(inner);
            }
            if matches!(self.peek(), Some(Token::Dash | Token::Lt)) {
                return Err(self.unsupported("pattern predicates"));
            }
            return Err(self.error(&["AND", "OR", "')'"]));
        }
        self.predicate()
    }

    fn operand(&mut self) -> PResult<Operand> {
        match self.peek() {
            Some(Token::Ident(_)) => {
                if self.peek_at(1) == Some(&Token::LParen) {
                    let name = self.raw().to_string();
                    return Err(self.unsupported(format!("function call {name}() outside RETURN")));
                }
                Ok(Operand::Value(self.value_expr()?))
            }
            Some(Token::Dollar) => Err(self.unsupported("query parameters")),
            _ => Ok(Operand::Literal(self.literal().map_err(|_| self.error(&["variable", "property", "literal"]))?)),
        }
    }

    fn value_expr(&mut self) -> PResult<ValueExpr> {
        let variable = self.identifier("variable")?;
        if self.eat(&Token::Dot) {
            let key = self.symbolic_name("property key")?;
            if self.at(&Token::Dot) {
                return Err(self.unsupported("nested property access"));
            }
            return Ok(ValueExpr::Property { variable, key });
        }
        Ok(ValueExpr::Variable(variable))
    }

    fn predicate(&mut self) -> PResult<Expr> {
        let left = self.operand()?;
        let op = match self.peek() {
            Some(Token::Colon) => {
                let Operand::Value(ValueExpr::Variable(variable)) = left else {
                    return Err(self.error(&["comparison operator"]));
                };
                let mut labels = Vec::new();
                while self.eat(&Token::Colon) {
                    labels.push(self.symbolic_name("label")?);
                }
                return Ok(Expr::HasLabels { variable, labels });
            }
            Some(Token::Keyword(Keyword::IN)) => {
                self.pos += 1;
                return Ok(Expr::In { operand: left, list: self.list_literal()? });
            }
            Some(Token::Keyword(Keyword::IS)) => return Err(self.unsupported("IS NULL / IS NOT NULL")),
            Some(Token::Plus | Token::Dash | Token::Star | Token::Slash | Token::Percent) => {
                return Err(self.unsupported("arithmetic expressions"))
            }
            Some(Token::Eq) => CompareOp::Eq,
            Some(Token::Neq) => CompareOp::Neq,
            Some(Token::Lt) => CompareOp::Lt,
            Some(Token::Le) => CompareOp::Le,
            Some(Token::Gt) => CompareOp::Gt,
            Some(Token::Ge) => CompareOp::Ge,
            Some(Token::Keyword(Keyword::CONTAINS)) => CompareOp::Contains,
            Some(Token::Keyword(Keyword::STARTS)) => {
                self.pos += 1;
                if !self.at_kw(Keyword::WITH) {
                    return Err(self.error(&["WITH"]));
                }
                CompareOp::StartsWith
            }
            Some(Token::Keyword(Keyword::ENDS)) => {
                self.pos += 1;
                if !self.at_kw(Keyword::WITH) {
                    return Err(self.error(&["WITH"]));
                }
                CompareOp::EndsWith
            }
            _ => {
                return Err(self.error(&[
                    "comparison operator",
                    "CONTAINS",
                    "STARTS WITH",
                    "ENDS WITH",
                    "IN",
                    "label predicate",
                ]))
            }
        };
        self.pos += 1;
        let right = self.operand()?;
        Ok(Expr::Compare { left, op, right })
    }

    fn list_literal(&mut self) -> PResult<Vec<Literal>> {
        if self.at(&Token::Dollar) {
            return Err(self.unsupported("query parameters"));
        }
        self.expect(&Token::LBracket, "'['")?;
        let mut items = Vec::new();
        if self.eat(&Token::RBracket) {
            return Ok(items);
        }
        loop {
            items.push(self.literal()?);
            if self.eat(&Token::Comma) {
                continue;
            }
            self.expect(&Token::RBracket, "']'")?;
            return Ok(items);
        }
    }

    fn projection(&mut self) -> PResult<Projection> {
        if let (Some(Token::Ident(name)), Some(Token::LParen)) = (self.peek(), self.peek_at(1)) {
            if !name.eq_ignore_ascii_case("count") {
                let name = name.clone();
                return Err(self.unsupported(format!("function {name}()")));
            }
            self.pos += 2;
            if self.eat(&Token::Star) {
                self.expect(&Token::RParen, "')'")?;
                return Ok(Projection::Count { distinct: false, argument: None });
            }
            let distinct = self.eat_kw(Keyword::DISTINCT);
            let argument = match self.peek() {
                Some(Token::Ident(_)) => self.value_expr()?,
                _ => return Err(self.error(&["variable", "property", "'*'"])),
            };
            self.expect(&Token::RParen, "')'")?;
            return Ok(Projection::Count { distinct, argument: Some(argument) });
        }
        match self.peek() {
            Some(Token::Ident(_)) => Ok(Projection::Value(self.value_expr()?)),
            Some(Token::Dollar) => Err(self.unsupported("query parameters")),
            Some(Token::Int(_) | Token::Float(_) | Token::Str(_)) => Err(self.unsupported("literal projections")),
            _ => Err(self.error(&["variable", "property", "count(...)"])),
        }
    }

    fn return_item(&mut self) -> PResult<ReturnItem> {
        let projection = self.projection()?;
        if matches!(self.peek(), Some(Token::Plus | Token::Dash | Token::Star | Token::Slash | Token::Percent)) {
            return Err(self.unsupported("arithmetic expressions"));
        }
        let alias = if self.eat_kw(Keyword::AS) { Some(self.identifier("alias")?) } else { None };
        Ok(ReturnItem { projection, alias })
    }

    fn sort_item(&mut self) -> PResult<SortItem> {
        let projection = self.projection()?;
        let descending = if self.eat_kw(Keyword::DESC) || self.eat_kw(Keyword::DESCENDING) {
            true
        } else {
            let _ = self.eat_kw(Keyword::ASC) || self.eat_kw(Keyword::ASCENDING);
            false
        };
        Ok(SortItem { projection, descending })
    }
}
