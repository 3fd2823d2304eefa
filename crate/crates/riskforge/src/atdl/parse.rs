//! Recursive-descent parser building an [`AssessmentBundle`] from ATDL text.
//!
//! The parser is purely structural: duplicate ids and token-level problems
//! are rejected here, while referential integrity (dangling component ids,
//! pin ranges, and so on) is deferred to bundle validation.

use std::collections::BTreeSet;

use crate::model::{
    AssessmentBundle, AttackTree, AttackerProfile, CandidatePath, Component, ComponentKind,
    Connector, DataFlow, EntityRef, ImpactScore, Level, NodeKind, Phase, Precondition, RiskInstance,
    Scenario, SourceSpan, StepProfile, SystemModel, ThreatCategory, TreeNode, TrustBoundary,
    VectorBinding,
};

use super::lex::{Lexer, Token, TokenKind};
use super::ParseError;

/// Parse a document with an anonymous file name in spans.
pub fn parse_document(text: &str) -> Result<AssessmentBundle, ParseError> {
    parse_document_named(text, "<input>")
}

/// Parse a document, recording `file` in every source span.
pub fn parse_document_named(text: &str, file: &str) -> Result<AssessmentBundle, ParseError> {
    let tokens = Lexer::new(file, text).tokenize()?;
    Parser::new(tokens).document()
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    bundle: AssessmentBundle,
    node_ids: BTreeSet<String>,
}

impl Parser {
    fn new(tokens: Vec<Token>) -> Self {
        Parser {
            tokens,
            pos: 0,
            bundle: AssessmentBundle::default(),
            node_ids: BTreeSet::new(),
        }
    }

    fn peek(&self) -> &Token {
        &self.tokens[self.pos.min(self.tokens.len() - 1)]
    }

    fn bump(&mut self) -> Token {
        let token = self.peek().clone();
        if self.pos < self.tokens.len() - 1 {
            self.pos += 1;
        }
        token
    }

    /// True when the next token is the given bare identifier.
    fn at_keyword(&self, word: &str) -> bool {
        matches!(&self.peek().kind, TokenKind::Ident(s) if s == word)
    }

    fn expect_keyword(&mut self, word: &str) -> Result<Token, ParseError> {
        if self.at_keyword(word) {
            Ok(self.bump())
        } else {
            let token = self.peek();
            Err(ParseError::syntax(
                format!("unexpected {}", token.kind),
                token.span.clone(),
                &format!("keyword `{word}`"),
            ))
        }
    }

    fn expect_ident(&mut self, what: &str) -> Result<(String, SourceSpan), ParseError> {
        let token = self.bump();
        match token.kind {
            TokenKind::Ident(s) => Ok((s, token.span)),
            other => Err(ParseError::syntax(
                format!("unexpected {other}"),
                token.span,
                what,
            )),
        }
    }

    fn expect_string(&mut self, what: &str) -> Result<String, ParseError> {
        let token = self.bump();
        match token.kind {
            TokenKind::Str(s) => Ok(s),
            other => Err(ParseError::syntax(
                format!("unexpected {other}"),
                token.span,
                what,
            )),
        }
    }

    fn expect_int(&mut self, what: &str) -> Result<(u64, SourceSpan), ParseError> {
        let token = self.bump();
        match token.kind {
            TokenKind::Int(n) => Ok((n, token.span)),
            other => Err(ParseError::syntax(
                format!("unexpected {other}"),
                token.span,
                what,
            )),
        }
    }

    fn expect_token(&mut self, kind: TokenKind, what: &str) -> Result<Token, ParseError> {
        let token = self.bump();
        if token.kind == kind {
            Ok(token)
        } else {
            Err(ParseError::syntax(
                format!("unexpected {}", token.kind),
                token.span,
                what,
            ))
        }
    }

    /// `field = value` where the field keyword is fixed.
    fn expect_field(&mut self, field: &str) -> Result<(), ParseError> {
        self.expect_keyword(field)?;
        self.expect_token(TokenKind::Eq, "`=`")?;
        Ok(())
    }

    fn id_list(&mut self) -> Result<Vec<(String, SourceSpan)>, ParseError> {
        let mut ids = vec![self.expect_ident("identifier")?];
        while self.peek().kind == TokenKind::Comma {
            self.bump();
            ids.push(self.expect_ident("identifier")?);
        }
        Ok(ids)
    }

    // -- document ----------------------------------------------------------

    fn document(mut self) -> Result<AssessmentBundle, ParseError> {
        if self.at_keyword("system") {
            self.system()?;
        }
        while self.at_keyword("pre") {
            self.precondition()?;
        }
        if self.at_keyword("goal") {
            self.tree()?;
        }
        while self.at_keyword("risk") {
            self.risk()?;
        }
        while self.at_keyword("scenario") {
            self.scenario()?;
        }
        let token = self.peek();
        if token.kind != TokenKind::Eof {
            return Err(ParseError::syntax(
                format!("unexpected {}", token.kind),
                token.span.clone(),
                "`system`, `pre`, `goal`, `risk`, `scenario`, or end of input",
            ));
        }
        Ok(self.bundle)
    }

    // -- system ------------------------------------------------------------

    fn system(&mut self) -> Result<(), ParseError> {
        let keyword = self.expect_keyword("system")?;
        self.bundle.spans.insert(EntityRef::System, keyword.span);
        self.expect_token(TokenKind::LBrace, "`{`")?;
        let mut system = SystemModel::default();
        while self.at_keyword("component") {
            let keyword = self.bump();
            let (id, id_span) = self.expect_ident("component id")?;
            let (kind_word, kind_span) = self.expect_ident("component kind")?;
            let kind = ComponentKind::from_keyword(&kind_word).ok_or_else(|| {
                ParseError::syntax(
                    format!("unknown component kind `{kind_word}`"),
                    kind_span,
                    "one of `web-app`, `platform`, `orchestrator`, `external-resource`, `model`",
                )
            })?;
            let name = self.expect_string("component name string")?;
            if system.component(&id).is_some() {
                return Err(ParseError::duplicate(
                    format!("duplicate component id `{id}`"),
                    id_span,
                ));
            }
            self.bundle
                .spans
                .insert(EntityRef::Component(id.clone()), keyword.span);
            system.components.push(Component { id, kind, name });
        }
        while self.at_keyword("boundary") {
            let keyword = self.bump();
            let (id, id_span) = self.expect_ident("boundary id")?;
            let name = self.expect_string("boundary name string")?;
            if system.boundary(&id).is_some() {
                return Err(ParseError::duplicate(
                    format!("duplicate boundary id `{id}`"),
                    id_span,
                ));
            }
            self.bundle
                .spans
                .insert(EntityRef::Boundary(id.clone()), keyword.span);
            system.boundaries.push(TrustBoundary { id, name });
        }
        while self.at_keyword("flow") {
            let keyword = self.bump();
            let (from, _) = self.expect_ident("source component id")?;
            self.expect_token(TokenKind::Arrow, "`->`")?;
            let (to, _) = self.expect_ident("target component id")?;
            let crosses = if self.at_keyword("crosses") {
                self.bump();
                Some(self.expect_ident("boundary id")?.0)
            } else {
                None
            };
            self.bundle
                .spans
                .insert(EntityRef::Flow(system.flows.len()), keyword.span);
            system.flows.push(DataFlow { from, to, crosses });
        }
        self.expect_token(TokenKind::RBrace, "`component`, `boundary`, `flow`, or `}`")?;
        self.bundle.system = system;
        Ok(())
    }

    // -- preconditions -----------------------------------------------------

    fn precondition(&mut self) -> Result<(), ParseError> {
        let keyword = self.expect_keyword("pre")?;
        let (id, id_span) = self.expect_ident("precondition id")?;
        let description = self.expect_string("precondition description string")?;
        self.expect_field("component")?;
        let (component, _) = self.expect_ident("component id")?;
        if self.bundle.precondition(&id).is_some() {
            return Err(ParseError::duplicate(
                format!("duplicate precondition id `{id}`"),
                id_span,
            ));
        }
        self.bundle
            .spans
            .insert(EntityRef::Precondition(id.clone()), keyword.span);
        self.bundle.preconditions.push(Precondition {
            id,
            description,
            component,
        });
        Ok(())
    }

    // -- tree ---------------------------------------------------------------

    fn tree(&mut self) -> Result<(), ParseError> {
        let keyword = self.expect_keyword("goal")?;
        let (goal_id, _) = self.expect_ident("goal id")?;
        let goal_label = self.expect_string("goal label string")?;
        let mut tree = AttackTree {
            goal_id,
            goal_label,
            root: String::new(),
            nodes: Default::default(),
        };
        // A degenerate tree may consist of a single leaf step.
        tree.root = if self.at_keyword("leaf") {
            self.leaf(&mut tree)?
        } else {
            self.node(&mut tree)?
        };
        self.bundle.spans.insert(EntityRef::Tree, keyword.span);
        self.bundle.tree = Some(tree);
        Ok(())
    }

    fn register_node(&mut self, tree: &mut AttackTree, node: TreeNode, id_span: SourceSpan, keyword_span: SourceSpan) -> Result<(), ParseError> {
        if !self.node_ids.insert(node.id.clone()) {
            return Err(ParseError::duplicate(
                format!("duplicate node id `{}`", node.id),
                id_span,
            ));
        }
        self.bundle
            .spans
            .insert(EntityRef::Node(node.id.clone()), keyword_span);
        tree.nodes.insert(node.id.clone(), node);
        Ok(())
    }

    fn node(&mut self, tree: &mut AttackTree) -> Result<String, ParseError> {
        let keyword = self.expect_keyword("node")?;
        let (id, id_span) = self.expect_ident("node id")?;
        let (connector_word, connector_span) = self.expect_ident("`AND` or `OR`")?;
        let connector = match connector_word.as_str() {
            "AND" => Connector::And,
            "OR" => Connector::Or,
            other => {
                return Err(ParseError::syntax(
                    format!("unknown connector `{other}`"),
                    connector_span,
                    "`AND` or `OR`",
                ))
            }
        };
        // The label is optional; an unlabeled node reuses its id.
        let label = match &self.peek().kind {
            TokenKind::Str(_) => self.expect_string("node label string")?,
            _ => id.clone(),
        };
        self.expect_token(TokenKind::LBrace, "`{`")?;
        let mut children = Vec::new();
        loop {
            if self.at_keyword("node") {
                children.push(self.node(tree)?);
            } else if self.at_keyword("leaf") {
                children.push(self.leaf(tree)?);
            } else {
                break;
            }
        }
        if children.is_empty() {
            let token = self.peek();
            return Err(ParseError::syntax(
                format!("unexpected {}", token.kind),
                token.span.clone(),
                "at least one `node` or `leaf` child",
            ));
        }
        self.expect_token(TokenKind::RBrace, "`node`, `leaf`, or `}`")?;
        let node = TreeNode {
            id: id.clone(),
            label,
            kind: NodeKind::Internal { connector, children },
        };
        self.register_node(tree, node, id_span, keyword.span)?;
        Ok(id)
    }

    fn leaf(&mut self, tree: &mut AttackTree) -> Result<String, ParseError> {
        let keyword = self.expect_keyword("leaf")?;
        let (id, id_span) = self.expect_ident("leaf id")?;
        let label = self.expect_string("leaf label string")?;
        self.expect_field("bk")?;
        let business_knowledge = self.level("business knowledge level")?;
        self.expect_field("tc")?;
        let technical_complexity = self.level("technical complexity level")?;
        self.expect_field("insider")?;
        let insider_advantage = self.flag("insider flag")?;
        self.expect_field("category")?;
        let (category_word, category_span) = self.expect_ident("threat category")?;
        let category = ThreatCategory::from_keyword(&category_word).ok_or_else(|| {
            ParseError::syntax(
                format!("unknown category `{category_word}`"),
                category_span,
                "one of `conventional`, `adversarial-ml`, `conversational`",
            )
        })?;
        let mut preconditions = BTreeSet::new();
        if self.at_keyword("pre") {
            self.expect_field("pre")?;
            for (pre_id, _) in self.id_list()? {
                preconditions.insert(pre_id);
            }
        }
        let component = if self.at_keyword("component") {
            self.expect_field("component")?;
            Some(self.expect_ident("component id")?.0)
        } else {
            None
        };
        let phase = if self.at_keyword("phase") {
            self.expect_field("phase")?;
            let (word, span) = self.expect_ident("phase")?;
            Phase::from_keyword(&word).ok_or_else(|| {
                ParseError::syntax(
                    format!("unknown phase `{word}`"),
                    span,
                    "one of `precondition`, `execution`, `impact`",
                )
            })?
        } else {
            Phase::default()
        };
        let node = TreeNode {
            id: id.clone(),
            label,
            kind: NodeKind::Leaf {
                profile: StepProfile {
                    business_knowledge,
                    technical_complexity,
                    insider_advantage,
                    category,
                    preconditions,
                    component,
                    phase,
                },
            },
        };
        self.register_node(tree, node, id_span, keyword.span)?;
        Ok(id)
    }

    fn level(&mut self, what: &str) -> Result<Level, ParseError> {
        let (word, span) = self.expect_ident(what)?;
        Level::from_keyword(&word).ok_or_else(|| {
            ParseError::syntax(
                format!("unknown level `{word}`"),
                span,
                "one of `low`, `med`, `high`",
            )
        })
    }

    fn flag(&mut self, what: &str) -> Result<bool, ParseError> {
        let (word, span) = self.expect_ident(what)?;
        match word.as_str() {
            "yes" => Ok(true),
            "no" => Ok(false),
            other => Err(ParseError::syntax(
                format!("unknown flag `{other}`"),
                span,
                "`yes` or `no`",
            )),
        }
    }

    fn scale_int(&mut self, what: &str) -> Result<u8, ParseError> {
        let (value, span) = self.expect_int(what)?;
        if (1..=5).contains(&value) {
            Ok(value as u8)
        } else {
            Err(ParseError::syntax(
                format!("value {value} is outside 1..=5"),
                span,
                "an integer between 1 and 5",
            ))
        }
    }

    // -- risks ---------------------------------------------------------------

    fn risk(&mut self) -> Result<(), ParseError> {
        let keyword = self.expect_keyword("risk")?;
        let (id, id_span) = self.expect_ident("risk id")?;
        self.expect_field("goal")?;
        let (goal, _) = self.expect_ident("goal id")?;
        let description = self.expect_string("risk description string")?;
        self.expect_field("impact")?;
        let impact_value = self.scale_int("impact score")?;
        let impact = ImpactScore::new(impact_value).expect("scale_int checked the range");
        self.expect_token(TokenKind::LBrace, "`{`")?;
        let mut candidate_paths = Vec::new();
        while self.at_keyword("path") {
            let path_keyword = self.bump();
            self.bundle.spans.insert(
                EntityRef::Path { risk: id.clone(), index: candidate_paths.len() },
                path_keyword.span,
            );
            self.expect_token(TokenKind::LBrace, "`{`")?;
            let mut steps = Vec::new();
            while self.at_keyword("step") {
                let step_keyword = self.bump();
                self.expect_field("vector")?;
                let (vector, _) = self.expect_ident("vector node id")?;
                self.expect_field("role")?;
                let (role_word, role_span) = self.expect_ident("path role")?;
                let role = crate::model::PathRole::from_keyword(&role_word).ok_or_else(|| {
                    ParseError::syntax(
                        format!("unknown role `{role_word}`"),
                        role_span,
                        "one of `direct`, `indirect`, `situational`",
                    )
                })?;
                let pinned_likelihood = if self.at_keyword("pin") {
                    self.expect_field("pin")?;
                    Some(self.scale_int("pinned likelihood")?)
                } else {
                    None
                };
                self.bundle.spans.insert(
                    EntityRef::Step {
                        risk: id.clone(),
                        path: candidate_paths.len(),
                        index: steps.len(),
                    },
                    step_keyword.span,
                );
                steps.push(VectorBinding { vector, role, pinned_likelihood });
            }
            if steps.is_empty() {
                let token = self.peek();
                return Err(ParseError::syntax(
                    format!("unexpected {}", token.kind),
                    token.span.clone(),
                    "at least one `step`",
                ));
            }
            self.expect_token(TokenKind::RBrace, "`step` or `}`")?;
            candidate_paths.push(CandidatePath { steps });
        }
        if candidate_paths.is_empty() {
            let token = self.peek();
            return Err(ParseError::syntax(
                format!("unexpected {}", token.kind),
                token.span.clone(),
                "at least one `path`",
            ));
        }
        self.expect_token(TokenKind::RBrace, "`path` or `}`")?;
        if self.bundle.risk(&id).is_some() {
            return Err(ParseError::duplicate(
                format!("duplicate risk id `{id}`"),
                id_span,
            ));
        }
        self.bundle
            .spans
            .insert(EntityRef::Risk(id.clone()), keyword.span);
        self.bundle.risks.push(RiskInstance {
            id,
            goal,
            description,
            impact,
            candidate_paths,
        });
        Ok(())
    }

    // -- scenarios ------------------------------------------------------------

    fn scenario(&mut self) -> Result<(), ParseError> {
        let keyword = self.expect_keyword("scenario")?;
        let (id, id_span) = self.expect_ident("scenario id")?;
        self.expect_token(TokenKind::LBrace, "`{`")?;
        let mut disabled = BTreeSet::new();
        let mut removed_preconditions = BTreeSet::new();
        let mut attacker_profile = AttackerProfile::default();
        if self.at_keyword("disable") {
            self.expect_field("disable")?;
            for (node_id, _) in self.id_list()? {
                disabled.insert(node_id);
            }
        }
        if self.at_keyword("remove-pre") {
            self.expect_field("remove-pre")?;
            for (pre_id, _) in self.id_list()? {
                removed_preconditions.insert(pre_id);
            }
        }
        if self.at_keyword("profile") {
            self.expect_field("profile")?;
            let (word, span) = self.expect_ident("attacker profile")?;
            attacker_profile = match word.as_str() {
                "insider" => AttackerProfile::INSIDER,
                "external" => AttackerProfile::EXTERNAL,
                other => {
                    return Err(ParseError::syntax(
                        format!("unknown profile `{other}`"),
                        span,
                        "`insider` or `external`",
                    ))
                }
            };
        }
        self.expect_token(TokenKind::RBrace, "`disable`, `remove-pre`, `profile`, or `}`")?;
        if self.bundle.scenario(&id).is_some() {
            return Err(ParseError::duplicate(
                format!("duplicate scenario id `{id}`"),
                id_span,
            ));
        }
        self.bundle
            .spans
            .insert(EntityRef::Scenario(id.clone()), keyword.span);
        self.bundle.scenarios.push(Scenario {
            id,
            disabled,
            removed_preconditions,
            attacker_profile,
        });
        Ok(())
    }
}
