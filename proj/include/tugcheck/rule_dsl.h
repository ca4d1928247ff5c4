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


// Query-rule language: boolean expressions over stored attributes.
//
//   rule   := or
//   or     := and ("OR" and)*
//   and    := cmp ("AND" cmp)*
//   cmp    := sum (("<" | "<=" | "=" | "!=" | ">" | ">=") sum)?
//   sum    := prod (("+" | "-") prod)*        "+ ... +" between two refs
//                                             that differ only in a trailing
//                                             number expands the range
//   prod   := unary (("*" | "/") unary)*
//   unary  := "NOT" unary | "-" unary | atom
//   atom   := number | namespace "." attribute | "(" or ")"
//
// NOT binds tighter than everything else, so a negated comparison needs
// parentheses: NOT (a > b). Keywords are case-insensitive; identifiers are
// case-sensitive. "==" is accepted as a spelling of "=".

#ifndef TUGCHECK_RULE_DSL_H_
#define TUGCHECK_RULE_DSL_H_

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tugcheck/common.h"
#include "tugcheck/schema.h"

namespace tugcheck {

enum class RuleClass : std::uint8_t {
  kStaticState = 0,
  kTransition = 1,
  kSymmetryFlip = 2,
  kSymmetryReverse = 3,
};
const char* RuleClassName(RuleClass c);  // staticState, transition, ...
RuleClass ParseRuleClass(const std::string& s);

enum class Severity : std::uint8_t { kSound = 0, kSuspicion = 1, kUnsound = 2 };
const char* SeverityName(Severity s);
Severity ParseSeverity(const std::string& s);

enum class Namespace : std::uint8_t {
  kInputState = 0,
  kOutputState = 1,
  kWinProb = 2,
  kAction = 3,
  kFlippedOutput = 4,   // outputStateForFlippedInputs
  kReversedOutput = 5,  // outputStateForReversedInputs
};
inline constexpr int kNumNamespaces = 6;
const char* NamespaceName(Namespace ns);
bool NamespaceAllowed(RuleClass c, Namespace ns);

enum class ColumnKind : std::uint8_t { kState = 0, kWinProb = 1, kAction = 2 };

struct SourceSpan {
  int offset = 0;
  int length = 0;
  int line = 1;    // 1-based
  int column = 1;  // 1-based
};

struct AttributeRef {
  Namespace ns = Namespace::kOutputState;
  ColumnKind kind = ColumnKind::kState;
  int column = 0;
  std::string name;  // canonical attribute name

  bool operator==(const AttributeRef& o) const {
    return ns == o.ns && kind == o.kind && column == o.column;
  }
};

enum class ExprKind : std::uint8_t {
  kNumber,
  kAttribute,
  kNegate,
  kNot,
  kArithmetic,
  kCompare,
  kAnd,
  kOr,
};

enum class Op : std::uint8_t { kAdd, kSub, kMul, kDiv, kLt, kLe, kEq, kNe, kGt, kGe, kNone };
const char* OpSpelling(Op op);

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  ExprKind kind = ExprKind::kNumber;
  Op op = Op::kNone;
  double value = 0.0;
  bool decimal = false;  // literal written with a fraction or exponent
  AttributeRef ref;
  ExprPtr lhs;  // also the operand of unary nodes
  ExprPtr rhs;
  SourceSpan span;

  bool IsBoolean() const {
    return kind == ExprKind::kNot || kind == ExprKind::kCompare || kind == ExprKind::kAnd ||
           kind == ExprKind::kOr;
  }
};

// Structural equality ignoring source spans.
bool SameAst(const Expr& a, const Expr& b);

ExprPtr MakeNumber(double value, bool decimal);
ExprPtr MakeAttribute(AttributeRef ref);
ExprPtr MakeUnary(ExprKind kind, ExprPtr operand);
ExprPtr MakeBinary(ExprKind kind, Op op, ExprPtr lhs, ExprPtr rhs);

struct Diagnostic {
  std::string code;  // lex, syntax, paren, unknown-attribute, unknown-namespace, namespace, type
  std::string message;
  int line = 1;
  int column = 1;
  std::vector<std::string> suggestions;
  std::string file;  // set when the rule came from a file
};

// "[file:]line:column: code: message"
std::string FormatDiagnostic(const Diagnostic& d);

class RuleError : public FormatError {
 public:
  explicit RuleError(Diagnostic d);
  const Diagnostic& diagnostic() const { return diagnostic_; }

 private:
  Diagnostic diagnostic_;
};

// Attribute names available in each namespace, plus spelling aliases.
class SchemaCatalog {
 public:
  static const SchemaCatalog& Default();

  struct Entry {
    std::string name;  // canonical
    ColumnKind kind;
    int column;
  };
  // Canonical entries of a namespace in catalog order.
  const std::vector<Entry>& Attributes(Namespace ns) const;
  // Resolves canonical names and aliases.
  std::optional<Entry> Resolve(Namespace ns, std::string_view name) const;
  std::optional<Namespace> ResolveNamespace(std::string_view name) const;
  // Closest names by edit distance, best first.
  std::vector<std::string> Suggest(Namespace ns, std::string_view name, size_t max = 2) const;
  const std::map<std::string, std::string>& aliases() const { return aliases_; }

  SchemaCatalog();
  void AddAlias(const std::string& alias, const std::string& canonical);

 private:
  std::vector<std::vector<Entry>> attributes_;
  std::map<std::string, std::string> aliases_;  // alias -> canonical
};

struct QueryRule {
  std::string name;
  std::string description;
  RuleClass rule_class = RuleClass::kTransition;
  Severity severity = Severity::kSound;
  ExprPtr expr;
  std::string source;

  // Namespaces referenced anywhere in the expression.
  std::vector<Namespace> Namespaces() const;
};

// Throws RuleError carrying the first diagnostic.
QueryRule ParseRule(RuleClass rule_class, std::string_view text,
                    const SchemaCatalog& catalog = SchemaCatalog::Default());

// Re-resolves every reference against `catalog` and re-checks the class
// constraints. Empty means valid.
std::vector<Diagnostic> ValidateAgainstCatalog(const QueryRule& rule,
                                               const SchemaCatalog& catalog);

// Canonical text: single spaces around binary operators, minimal
// parentheses, literal kind preserved.
std::string PrettyPrint(const Expr& expr);
std::string PrettyPrint(const QueryRule& rule);

// Rule files hold blocks of the form
//
//   rule enemyTopMonotone
//   class: transition
//   severity: sound
//   description: enemy top base health never rises
//   expr: outputState.enemyHealthTop - inputState.enemyHealthTop > 5.0
//
// Lines after "expr:" that start with whitespace continue the expression.
// '#' starts a comment line. Throws RuleError (with file positions) or
// FormatError.
std::vector<QueryRule> ParseRuleFile(std::string_view text,
                                     const SchemaCatalog& catalog = SchemaCatalog::Default());
std::vector<QueryRule> LoadRuleFile(const std::string& path,
                                    const SchemaCatalog& catalog = SchemaCatalog::Default());
std::string FormatRuleFile(const std::vector<QueryRule>& rules);

}  // namespace tugcheck

#endif  // TUGCHECK_RULE_DSL_H_
