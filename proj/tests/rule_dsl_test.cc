// Copyright 2026 The tugcheck Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <gtest/gtest.h>

#include "oracle/rule_gen.h"
#include "oracle/reference_rules.h"
#include "tugcheck/rule_dsl.h"

namespace tugcheck {
namespace {

using oracle::kReferenceRules;
using Fixture = oracle::ReferenceRule;

AttributeRef Ref(Namespace ns, const std::string& name) {
  auto e = SchemaCatalog::Default().Resolve(ns, name);
  EXPECT_TRUE(e.has_value()) << name;
  return {ns, e->kind, e->column, e->name};
}

ExprPtr Attr(Namespace ns, const std::string& name) { return MakeAttribute(Ref(ns, name)); }

Diagnostic ErrorOf(RuleClass c, const std::string& text) {
  try {
    ParseRule(c, text);
  } catch (const RuleError& e) {
    return e.diagnostic();
  }
  ADD_FAILURE() << "no error for: " << text;
  return {};
}

TEST(RuleDslTest, ReferenceRulesParseValidateAndRoundTrip) {
  for (const Fixture& f : kReferenceRules) {
    SCOPED_TRACE(f.name);
    QueryRule rule = ParseRule(f.rule_class, f.text);
    EXPECT_TRUE(ValidateAgainstCatalog(rule, SchemaCatalog::Default()).empty());
    const std::string printed = PrettyPrint(rule);
    QueryRule again = ParseRule(f.rule_class, printed);
    EXPECT_TRUE(SameAst(*rule.expr, *again.expr)) << printed;
    EXPECT_EQ(PrettyPrint(again), printed);
  }
}

TEST(RuleDslTest, EllipsisExpandsTheGridRange) {
  QueryRule rule = ParseRule(RuleClass::kStaticState, kReferenceRules[0].text);
  const Namespace o = Namespace::kOutputState;
  ExprPtr sum = Attr(o, "friendlyImmortalTopGrid1");
  for (int g = 2; g <= 4; ++g) {
    sum = MakeBinary(ExprKind::kArithmetic, Op::kAdd, sum,
                     Attr(o, "friendlyImmortalTopGrid" + std::to_string(g)));
  }
  ExprPtr expect = MakeBinary(
      ExprKind::kAnd, Op::kNone,
      MakeBinary(ExprKind::kCompare, Op::kEq, Attr(o, "friendlyImmortalBldgsTop"),
                 MakeNumber(0, false)),
      MakeBinary(ExprKind::kCompare, Op::kGt, sum, MakeNumber(0, false)));
  EXPECT_TRUE(SameAst(*rule.expr, *expect)) << PrettyPrint(rule);
  EXPECT_EQ(PrettyPrint(rule),
            "outputState.friendlyImmortalBldgsTop = 0 AND outputState.friendlyImmortalTopGrid1 + "
            "outputState.friendlyImmortalTopGrid2 + outputState.friendlyImmortalTopGrid3 + "
            "outputState.friendlyImmortalTopGrid4 > 0");
}

TEST(RuleDslTest, EllipsisNeedsAMatchingRange) {
  EXPECT_EQ(ErrorOf(RuleClass::kStaticState,
                    "outputState.friendlyMarineTopGrid1 + ... + outputState.enemyMarineTopGrid4 > 0")
                .code,
            "syntax");
  EXPECT_EQ(ErrorOf(RuleClass::kStaticState,
                    "outputState.friendlyMarineTopGrid3 + ... + outputState.friendlyMarineTopGrid1 "
                    "> 0")
                .code,
            "syntax");
  EXPECT_EQ(ErrorOf(RuleClass::kStaticState, "1 + ... + outputState.friendlyMarineTopGrid1 > 0")
                .code,
            "syntax");
}

TEST(RuleDslTest, VerbatimTransitionRuleIsAComparisonOfTwoRefs) {
  QueryRule rule =
      ParseRule(RuleClass::kTransition, "inputState.friendlyHealthTop < outputState.friendlyHealthTop");
  ExprPtr expect =
      MakeBinary(ExprKind::kCompare, Op::kLt, Attr(Namespace::kInputState, "friendlyHealthTop"),
                 Attr(Namespace::kOutputState, "friendlyHealthTop"));
  EXPECT_TRUE(SameAst(*rule.expr, *expect));
  EXPECT_EQ(rule.Namespaces(),
            (std::vector<Namespace>{Namespace::kInputState, Namespace::kOutputState}));
}

TEST(RuleDslTest, HealthIncreaseRuleIsArithmeticOverRefs) {
  QueryRule rule = ParseRule(RuleClass::kTransition, kReferenceRules[2].text);
  ASSERT_EQ(rule.expr->kind, ExprKind::kCompare);
  EXPECT_EQ(rule.expr->op, Op::kGt);
  ASSERT_EQ(rule.expr->lhs->kind, ExprKind::kArithmetic);
  EXPECT_EQ(rule.expr->lhs->op, Op::kSub);
  EXPECT_EQ(rule.expr->rhs->kind, ExprKind::kNumber);
  EXPECT_TRUE(rule.expr->rhs->decimal);
  EXPECT_EQ(PrettyPrint(rule), "outputState.enemyHealthTop - inputState.enemyHealthTop > 5.0");
}

TEST(RuleDslTest, NamespaceMustSuitTheClass) {
  Diagnostic d = ErrorOf(RuleClass::kStaticState, "inputState.friendlyHealthTop > 0");
  EXPECT_EQ(d.code, "namespace");
  EXPECT_EQ(d.line, 1);
  EXPECT_EQ(d.column, 1);
  EXPECT_EQ(ErrorOf(RuleClass::kSymmetryFlip,
                    "outputState.friendlyMarineTopGrid1 != "
                    "outputStateForReversedInputs.enemyMarineTopGrid4")
                .code,
            "namespace");
  EXPECT_EQ(ErrorOf(RuleClass::kStaticState, "action.laneOfFriendly = 0").code, "namespace");
  EXPECT_NO_THROW(ParseRule(RuleClass::kSymmetryReverse,
                            "outputState.friendlyMarineTopGrid1 != "
                            "outputStateForReversedInputs.enemyMarineTopGrid4"));
  EXPECT_NO_THROW(ParseRule(RuleClass::kTransition, "action.laneOfFriendly = 0"));
}

TEST(RuleDslTest, UnknownAttributeSuggestsNeighbours) {
  Diagnostic d = ErrorOf(RuleClass::kStaticState, "outputState.friendlyHealthMiddle > 0");
  EXPECT_EQ(d.code, "unknown-attribute");
  EXPECT_EQ(d.column, 13);
  ASSERT_FALSE(d.suggestions.empty());
  EXPECT_TRUE(d.suggestions[0] == "friendlyHealthTop" || d.suggestions[0] == "friendlyHealthBottom");

  auto completions = SchemaCatalog::Default().Suggest(Namespace::kInputState, "friendlyHe");
  EXPECT_EQ(completions, (std::vector<std::string>{"friendlyHealthTop", "friendlyHealthBottom"}));

  Diagnostic ns = ErrorOf(RuleClass::kStaticState, "outputStat.friendlyHealthTop > 0");
  EXPECT_EQ(ns.code, "unknown-namespace");
}

TEST(RuleDslTest, ValidateReportsCatalogDrift) {
  QueryRule rule = ParseRule(RuleClass::kStaticState, "outputState.friendlyHealthTop > 0");
  EXPECT_TRUE(ValidateAgainstCatalog(rule, SchemaCatalog::Default()).empty());
  auto drifted = std::make_shared<Expr>(*rule.expr);
  auto lhs = std::make_shared<Expr>(*rule.expr->lhs);
  lhs->ref.name = "friendlyHealthMiddle";
  drifted->lhs = lhs;
  rule.expr = drifted;
  auto diags = ValidateAgainstCatalog(rule, SchemaCatalog::Default());
  ASSERT_EQ(diags.size(), 1u);
  EXPECT_EQ(diags[0].code, "unknown-attribute");
  ASSERT_FALSE(diags[0].suggestions.empty());
  EXPECT_TRUE(diags[0].suggestions[0] == "friendlyHealthTop" ||
              diags[0].suggestions[0] == "friendlyHealthBottom");
}

TEST(RuleDslTest, AliasesResolveToCanonicalColumns) {
  QueryRule alias = ParseRule(RuleClass::kStaticState,
                              "winProb.probabilityOfDestroyingEnemyTopBase > 0.5");
  QueryRule canonical =
      ParseRule(RuleClass::kStaticState, "winProb.probabilityOfWinInTopLane > 0.5");
  EXPECT_TRUE(SameAst(*alias.expr, *canonical.expr));
  EXPECT_TRUE(ValidateAgainstCatalog(alias, SchemaCatalog::Default()).empty());
  EXPECT_EQ(PrettyPrint(alias), "winProb.probabilityOfWinInTopLane > 0.5");

  SchemaCatalog catalog;
  EXPECT_THROW(catalog.AddAlias("friendlyHealthTop", "friendlyHealthBottom"), ConfigError);
  EXPECT_THROW(catalog.AddAlias("otherName", "probabilityOfWinInTopLane"), ConfigError);
}

TEST(RuleDslTest, TypeErrors) {
  // NOT binds tighter than comparison, so its operand here is numeric.
  Diagnostic d = ErrorOf(RuleClass::kStaticState, "NOT outputState.friendlyHealthTop > 0");
  EXPECT_EQ(d.code, "type");
  EXPECT_EQ(d.column, 5);
  EXPECT_NO_THROW(ParseRule(RuleClass::kStaticState, "NOT (outputState.friendlyHealthTop > 0)"));
  EXPECT_EQ(ErrorOf(RuleClass::kStaticState, "outputState.friendlyHealthTop + 1").code, "type");
  EXPECT_EQ(ErrorOf(RuleClass::kStaticState, "(1 < 2) + 3 > 0").code, "type");
  EXPECT_EQ(ErrorOf(RuleClass::kStaticState, "1 AND 2 < 3").code, "type");
  EXPECT_EQ(ErrorOf(RuleClass::kStaticState, "1 < 2 < 3").code, "syntax");
}

TEST(RuleDslTest, LexAndParenErrorsCarryPositions) {
  Diagnostic lex = ErrorOf(RuleClass::kStaticState, "outputState.friendlyHealthTop > 0 $");
  EXPECT_EQ(lex.code, "lex");
  EXPECT_EQ(lex.column, 35);
  Diagnostic open = ErrorOf(RuleClass::kStaticState, "(outputState.friendlyHealthTop > 0");
  EXPECT_EQ(open.code, "paren");
  Diagnostic close = ErrorOf(RuleClass::kStaticState, "outputState.friendlyHealthTop > 0)");
  EXPECT_EQ(close.code, "paren");
  EXPECT_EQ(close.column, 34);
  Diagnostic second_line = ErrorOf(RuleClass::kStaticState, "outputState.friendlyHealthTop > 0\nAND #");
  EXPECT_EQ(second_line.line, 2);
  EXPECT_EQ(second_line.column, 5);
  EXPECT_EQ(ErrorOf(RuleClass::kStaticState, "").code, "syntax");
}

TEST(RuleDslTest, PrecedenceDisambiguation) {
  const Namespace o = Namespace::kOutputState;
  auto a = Attr(o, "friendlyHealthTop");
  auto b = Attr(o, "enemyHealthTop");
  auto c = Attr(o, "wave");
  auto num = [](double v) { return MakeNumber(v, false); };
  auto cmp = [](Op op, ExprPtr l, ExprPtr r) {
    return MakeBinary(ExprKind::kCompare, op, std::move(l), std::move(r));
  };
  auto arith = [](Op op, ExprPtr l, ExprPtr r) {
    return MakeBinary(ExprKind::kArithmetic, op, std::move(l), std::move(r));
  };
  auto both = [](ExprKind k, ExprPtr l, ExprPtr r) {
    return MakeBinary(k, Op::kNone, std::move(l), std::move(r));
  };
  const std::string A = "outputState.friendlyHealthTop", B = "outputState.enemyHealthTop",
                    C = "outputState.wave";
  const std::vector<std::pair<std::string, ExprPtr>> cases = {
      {A + " + " + B + " * " + C + " > 1", cmp(Op::kGt, arith(Op::kAdd, a, arith(Op::kMul, b, c)), num(1))},
      {A + " - " + B + " - " + C + " > 1", cmp(Op::kGt, arith(Op::kSub, arith(Op::kSub, a, b), c), num(1))},
      {A + " / " + B + " * " + C + " > 1", cmp(Op::kGt, arith(Op::kMul, arith(Op::kDiv, a, b), c), num(1))},
      {A + " > 1 OR " + B + " > 1 AND " + C + " > 1",
       both(ExprKind::kOr, cmp(Op::kGt, a, num(1)),
            both(ExprKind::kAnd, cmp(Op::kGt, b, num(1)), cmp(Op::kGt, c, num(1))))},
      {"NOT (" + A + " > 1) AND " + B + " > 1",
       both(ExprKind::kAnd, MakeUnary(ExprKind::kNot, cmp(Op::kGt, a, num(1))), cmp(Op::kGt, b, num(1)))},
      {"-" + A + " * 2 < 0",
       cmp(Op::kLt, arith(Op::kMul, MakeUnary(ExprKind::kNegate, a), num(2)), num(0))},
      {A + " == 1 and " + B + " <> 2",
       both(ExprKind::kAnd, cmp(Op::kEq, a, num(1)), cmp(Op::kNe, b, num(2)))},
      {A + " \xC3\x97 2 \xE2\x88\x92 " + B + " \xC3\xB7 2 >= 0",
       cmp(Op::kGe, arith(Op::kSub, arith(Op::kMul, a, num(2)), arith(Op::kDiv, b, num(2))), num(0))},
  };
  for (const auto& [text, expect] : cases) {
    QueryRule rule = ParseRule(RuleClass::kStaticState, text);
    EXPECT_TRUE(SameAst(*rule.expr, *expect)) << text << " parsed as " << PrettyPrint(rule);
  }
}

TEST(RuleDslTest, PrinterKeepsGroupingAndLiteralKind) {
  const std::string a = "outputState.friendlyHealthTop > 0", b = "outputState.enemyHealthTop > 0";
  QueryRule rule = ParseRule(RuleClass::kStaticState, "NOT (" + a + " AND " + b + ")");
  EXPECT_EQ(PrettyPrint(rule), "NOT (" + a + " AND " + b + ")");
  EXPECT_EQ(PrettyPrint(*MakeNumber(5.0, true)), "5.0");
  EXPECT_EQ(PrettyPrint(*MakeNumber(5.0, false)), "5");
  EXPECT_EQ(PrettyPrint(*MakeNumber(0.1, true)), "0.1");
  EXPECT_EQ(PrettyPrint(ParseRule(RuleClass::kStaticState,
                                  "((outputState.wave)) > (2.50)")),
            "outputState.wave > 2.5");
  EXPECT_EQ(PrettyPrint(ParseRule(RuleClass::kStaticState, "outputState.wave > 1e3")),
            "outputState.wave > 1000.0");
  EXPECT_EQ(PrettyPrint(ParseRule(RuleClass::kStaticState, "1 > 2 OR (3 > 4 OR 5 > 6)")),
            "1 > 2 OR (3 > 4 OR 5 > 6)");
}

TEST(RuleDslTest, RandomAstsRoundTrip) {
  const RuleClass classes[] = {RuleClass::kStaticState, RuleClass::kTransition,
                               RuleClass::kSymmetryFlip, RuleClass::kSymmetryReverse};
  int cases = 0;
  for (RuleClass c : classes) {
    oracle::RuleGenerator gen(c, 1000 + static_cast<int>(c));
    for (int i = 0; i < 2500; ++i, ++cases) {
      ExprPtr ast = gen.Boolean(1 + i % 5);
      const std::string text = PrettyPrint(*ast);
      QueryRule parsed = ParseRule(c, text);
      ASSERT_TRUE(SameAst(*ast, *parsed.expr)) << text << "\nreprinted: " << PrettyPrint(parsed);
      ASSERT_EQ(PrettyPrint(parsed), text);
    }
  }
  EXPECT_EQ(cases, 10000);
}

TEST(RuleFileTest, ParseFormatRoundTrip) {
  const std::string text =
      "# sample\n"
      "rule enemyTopMonotone\n"
      "class: transition\n"
      "severity: sound\n"
      "description: enemy top base health never rises\n"
      "expr: outputState.enemyHealthTop - inputState.enemyHealthTop > 5.0\n"
      "\n"
      "rule lostButHopeful\n"
      "class: staticState\n"
      "severity: suspicion\n"
      "expr: outputState.friendlyHealthTop = 0 AND\n"
      "  (winProb.probabilityOfWinInTopLane +\n"
      "   winProb.probabilityOfWinInBottomLane) != 0\n";
  auto rules = ParseRuleFile(text);
  ASSERT_EQ(rules.size(), 2u);
  EXPECT_EQ(rules[0].name, "enemyTopMonotone");
  EXPECT_EQ(rules[0].rule_class, RuleClass::kTransition);
  EXPECT_EQ(rules[0].description, "enemy top base health never rises");
  EXPECT_EQ(rules[1].severity, Severity::kSuspicion);
  auto again = ParseRuleFile(FormatRuleFile(rules));
  ASSERT_EQ(again.size(), 2u);
  for (size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(again[i].name, rules[i].name);
    EXPECT_EQ(again[i].severity, rules[i].severity);
    EXPECT_TRUE(SameAst(*again[i].expr, *rules[i].expr));
  }
}

TEST(RuleFileTest, ErrorsPointIntoTheFile) {
  const std::string text =
      "rule a\n"
      "class: staticState\n"
      "expr: outputState.friendlyHealthTop > 0 AND\n"
      "      outputState.friendlyHealthMiddle > 0\n";
  try {
    ParseRuleFile(text);
    FAIL();
  } catch (const RuleError& e) {
    EXPECT_EQ(e.diagnostic().code, "unknown-attribute");
    EXPECT_EQ(e.diagnostic().line, 4);
    EXPECT_EQ(e.diagnostic().column, 19);
  }
  try {
    ParseRuleFile("rule a\nclass: staticState\nexpr: (outputState.wave > 0\n");
    FAIL();
  } catch (const RuleError& e) {
    EXPECT_EQ(e.diagnostic().line, 3);
  }
  EXPECT_THROW(ParseRuleFile("rule a\nexpr: outputState.wave > 0\n"), RuleError);
  EXPECT_THROW(ParseRuleFile("rule a\nclass: sometimes\nexpr: outputState.wave > 0\n"), RuleError);
  EXPECT_THROW(ParseRuleFile("rule a\nclass: staticState\nexpr: outputState.wave > 0\n\n"
                             "rule a\nclass: staticState\nexpr: outputState.wave > 1\n"),
               RuleError);
  EXPECT_THROW(LoadRuleFile("/nonexistent/rules.txt"), NotFoundError);
}

}  // namespace
}  // namespace tugcheck
