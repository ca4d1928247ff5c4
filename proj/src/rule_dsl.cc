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


#include "tugcheck/rule_dsl.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "tugcheck/kv_config.h"

namespace tugcheck {

namespace {

constexpr const char* kNamespaceNames[kNumNamespaces] = {
    "inputState", "outputState", "winProb", "action", "outputStateForFlippedInputs",
    "outputStateForReversedInputs"};

constexpr double kMaxExactInteger = 9007199254740992.0;  // 2^53

enum class Tok : std::uint8_t {
  kNumber,
  kIdent,
  kDot,
  kLParen,
  kRParen,
  kPlus,
  kMinus,
  kStar,
  kSlash,
  kLt,
  kLe,
  kEq,
  kNe,
  kGt,
  kGe,
  kAnd,
  kOr,
  kNot,
  kEllipsis,
  kEnd,
};

struct Token {
  Tok kind = Tok::kEnd;
  std::string text;
  double value = 0.0;
  bool decimal = false;
  SourceSpan span;
};

[[noreturn]] void Fail(const std::string& code, const std::string& message, const SourceSpan& at,
                       std::vector<std::string> suggestions = {}) {
  throw RuleError({code, message, at.line, at.column, std::move(suggestions), {}});
}

std::string Upper(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

std::vector<Token> Lex(std::string_view text) {
  std::vector<Token> out;
  size_t i = 0;
  int line = 1;
  size_t line_start = 0;
  auto span_at = [&](size_t begin, size_t end) {
    return SourceSpan{static_cast<int>(begin), static_cast<int>(end - begin), line,
                      static_cast<int>(begin - line_start) + 1};
  };
  auto push = [&](Tok kind, size_t begin, size_t end) {
    Token t;
    t.kind = kind;
    t.text = std::string(text.substr(begin, end - begin));
    t.span = span_at(begin, end);
    out.push_back(std::move(t));
  };
  auto starts = [&](std::string_view s) { return text.substr(i, s.size()) == s; };
  while (i < text.size()) {
    const char c = text[i];
    if (c == '\n') {
      ++i;
      ++line;
      line_start = i;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    const size_t begin = i;
    if (std::isdigit(static_cast<unsigned char>(c))) {
      bool decimal = false;
      while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
      if (i + 1 < text.size() && text[i] == '.' && !starts("...")) {
        decimal = true;
        ++i;
        while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
      }
      if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
        size_t j = i + 1;
        if (j < text.size() && (text[j] == '+' || text[j] == '-')) ++j;
        if (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) {
          decimal = true;
          i = j;
          while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
        }
      }
      if (i < text.size() &&
          (std::isalpha(static_cast<unsigned char>(text[i])) || text[i] == '_')) {
        Fail("lex", "malformed number", span_at(begin, i + 1));
      }
      Token t;
      t.kind = Tok::kNumber;
      t.text = std::string(text.substr(begin, i - begin));
      t.span = span_at(begin, i);
      t.decimal = decimal;
      auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), t.value);
      if (ec != std::errc() || !std::isfinite(t.value)) {
        Fail("lex", "number out of range: " + t.text, t.span);
      }
      if (!decimal && t.value > kMaxExactInteger) {
        Fail("lex", "integer literal too large: " + t.text, t.span);
      }
      out.push_back(std::move(t));
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (i < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '_')) {
        ++i;
      }
      const std::string word = Upper(text.substr(begin, i - begin));
      Tok kind = Tok::kIdent;
      if (word == "AND") kind = Tok::kAnd;
      if (word == "OR") kind = Tok::kOr;
      if (word == "NOT") kind = Tok::kNot;
      push(kind, begin, i);
      continue;
    }
    if (starts("...") || starts("\xE2\x80\xA6")) {
      i += 3;  // "..." and U+2026 are both three bytes
      push(Tok::kEllipsis, begin, i);
      continue;
    }
    struct Sym {
      std::string_view text;
      Tok kind;
    };
    static constexpr Sym kSymbols[] = {
        {"<=", Tok::kLe},         {">=", Tok::kGe},         {"!=", Tok::kNe},
        {"<>", Tok::kNe},         {"==", Tok::kEq},         {"<", Tok::kLt},
        {">", Tok::kGt},          {"=", Tok::kEq},          {"(", Tok::kLParen},
        {")", Tok::kRParen},      {"+", Tok::kPlus},        {"-", Tok::kMinus},
        {"*", Tok::kStar},        {"/", Tok::kSlash},       {".", Tok::kDot},
        {"\xC3\x97", Tok::kStar}, {"\xC3\xB7", Tok::kSlash}, {"\xE2\x88\x92", Tok::kMinus},
        {"\xE2\x89\xA4", Tok::kLe}, {"\xE2\x89\xA5", Tok::kGe}, {"\xE2\x89\xA0", Tok::kNe},
    };
    bool matched = false;
    for (const Sym& s : kSymbols) {
      if (starts(s.text)) {
        i += s.text.size();
        push(s.kind, begin, i);
        matched = true;
        break;
      }
    }
    if (!matched) {
      Fail("lex", std::string("unexpected character '") + c + "'", span_at(begin, begin + 1));
    }
  }
  Token end;
  end.kind = Tok::kEnd;
  end.span = span_at(text.size(), text.size());
  out.push_back(end);
  return out;
}

Op CompareOp(Tok t) {
  switch (t) {
    case Tok::kLt: return Op::kLt;
    case Tok::kLe: return Op::kLe;
    case Tok::kEq: return Op::kEq;
    case Tok::kNe: return Op::kNe;
    case Tok::kGt: return Op::kGt;
    case Tok::kGe: return Op::kGe;
    default: return Op::kNone;
  }
}

std::shared_ptr<Expr> NewExpr(ExprKind kind) {
  auto e = std::make_shared<Expr>();
  e->kind = kind;
  return e;
}

SourceSpan Cover(const SourceSpan& a, const SourceSpan& b) {
  SourceSpan s = a;
  s.length = std::max(a.offset + a.length, b.offset + b.length) - a.offset;
  return s;
}

// Splits "friendlyMarineTopGrid3" into ("friendlyMarineTopGrid", 3).
bool SplitTrailingNumber(const std::string& name, std::string* prefix, int* number) {
  size_t k = name.size();
  while (k > 0 && std::isdigit(static_cast<unsigned char>(name[k - 1]))) --k;
  if (k == name.size() || k == 0 || name.size() - k > 6) return false;
  *prefix = name.substr(0, k);
  *number = std::stoi(name.substr(k));
  return true;
}

class Parser {
 public:
  Parser(std::vector<Token> tokens, RuleClass rule_class, const SchemaCatalog& catalog)
      : tokens_(std::move(tokens)), class_(rule_class), catalog_(catalog) {}

  ExprPtr ParseAll() {
    ExprPtr e = ParseOr();
    if (Peek().kind == Tok::kRParen) Fail("paren", "unmatched ')'", Peek().span);
    if (Peek().kind != Tok::kEnd) {
      Fail("syntax", "unexpected '" + Peek().text + "' after expression", Peek().span);
    }
    if (!e->IsBoolean()) {
      Fail("type", "a rule must be a boolean condition, not a numeric expression", e->span);
    }
    return e;
  }

 private:
  const Token& Peek() const { return tokens_[pos_]; }
  const Token& Next() { return tokens_[pos_++]; }

  void RequireBoolean(const ExprPtr& e, const char* context) {
    if (!e->IsBoolean()) {
      Fail("type", std::string(context) + " expects a boolean operand", e->span);
    }
  }
  void RequireNumeric(const ExprPtr& e, const char* context) {
    if (e->IsBoolean()) {
      Fail("type", std::string(context) + " expects a numeric operand", e->span);
    }
  }

  ExprPtr Binary(ExprKind kind, Op op, ExprPtr lhs, ExprPtr rhs) {
    auto e = NewExpr(kind);
    e->op = op;
    e->span = Cover(lhs->span, rhs->span);
    e->lhs = std::move(lhs);
    e->rhs = std::move(rhs);
    return e;
  }

  ExprPtr ParseOr() {
    ExprPtr lhs = ParseAnd();
    while (Peek().kind == Tok::kOr) {
      Next();
      ExprPtr rhs = ParseAnd();
      RequireBoolean(lhs, "OR");
      RequireBoolean(rhs, "OR");
      lhs = Binary(ExprKind::kOr, Op::kNone, lhs, rhs);
    }
    return lhs;
  }

  ExprPtr ParseAnd() {
    ExprPtr lhs = ParseCompare();
    while (Peek().kind == Tok::kAnd) {
      Next();
      ExprPtr rhs = ParseCompare();
      RequireBoolean(lhs, "AND");
      RequireBoolean(rhs, "AND");
      lhs = Binary(ExprKind::kAnd, Op::kNone, lhs, rhs);
    }
    return lhs;
  }

  ExprPtr ParseCompare() {
    ExprPtr lhs = ParseSum();
    const Op op = CompareOp(Peek().kind);
    if (op == Op::kNone) return lhs;
    const Token& op_token = Next();
    ExprPtr rhs = ParseSum();
    RequireNumeric(lhs, op_token.text.c_str());
    RequireNumeric(rhs, op_token.text.c_str());
    if (CompareOp(Peek().kind) != Op::kNone) {
      Fail("syntax", "comparisons do not chain; combine them with AND", Peek().span);
    }
    return Binary(ExprKind::kCompare, op, lhs, rhs);
  }

  ExprPtr ParseSum() {
    ExprPtr acc = ParseProduct();
    ExprPtr last = acc;
    while (Peek().kind == Tok::kPlus || Peek().kind == Tok::kMinus) {
      const Token& op_token = Next();
      const Op op = op_token.kind == Tok::kPlus ? Op::kAdd : Op::kSub;
      if (Peek().kind == Tok::kEllipsis) {
        const Token& dots = Next();
        if (op != Op::kAdd || Peek().kind != Tok::kPlus) {
          Fail("syntax", "'...' must appear as '+ ... +'", dots.span);
        }
        Next();
        ExprPtr end = ParseProduct();
        for (ExprPtr& term : ExpandRange(last, end, dots.span)) {
          RequireNumeric(acc, "+");
          acc = Binary(ExprKind::kArithmetic, Op::kAdd, acc, term);
        }
        last = end;
        continue;
      }
      ExprPtr rhs = ParseProduct();
      RequireNumeric(acc, op_token.text.c_str());
      RequireNumeric(rhs, op_token.text.c_str());
      acc = Binary(ExprKind::kArithmetic, op, acc, rhs);
      last = rhs;
    }
    return acc;
  }

  // Terms strictly after `first` through `last`, inclusive of `last`.
  std::vector<ExprPtr> ExpandRange(const ExprPtr& first, const ExprPtr& last,
                                   const SourceSpan& at) {
    if (first->kind != ExprKind::kAttribute || last->kind != ExprKind::kAttribute ||
        first->ref.ns != last->ref.ns) {
      Fail("syntax", "'...' needs attribute references of one namespace on both sides", at);
    }
    std::string p1, p2;
    int n1 = 0, n2 = 0;
    if (!SplitTrailingNumber(first->ref.name, &p1, &n1) ||
        !SplitTrailingNumber(last->ref.name, &p2, &n2) || p1 != p2 || n2 <= n1) {
      Fail("syntax",
           "cannot expand '...' between " + first->ref.name + " and " + last->ref.name, at);
    }
    std::vector<ExprPtr> out;
    for (int k = n1 + 1; k < n2; ++k) {
      const std::string name = p1 + std::to_string(k);
      auto entry = catalog_.Resolve(first->ref.ns, name);
      if (!entry) Fail("unknown-attribute", "'...' expands to unknown attribute " + name, at);
      auto e = NewExpr(ExprKind::kAttribute);
      e->ref = {first->ref.ns, entry->kind, entry->column, entry->name};
      e->span = at;
      out.push_back(e);
    }
    out.push_back(last);
    return out;
  }

  ExprPtr ParseProduct() {
    ExprPtr lhs = ParseUnary();
    while (Peek().kind == Tok::kStar || Peek().kind == Tok::kSlash) {
      const Token& op_token = Next();
      ExprPtr rhs = ParseUnary();
      RequireNumeric(lhs, op_token.text.c_str());
      RequireNumeric(rhs, op_token.text.c_str());
      lhs = Binary(ExprKind::kArithmetic, op_token.kind == Tok::kStar ? Op::kMul : Op::kDiv, lhs,
                   rhs);
    }
    return lhs;
  }

  ExprPtr ParseUnary() {
    if (Peek().kind == Tok::kNot || Peek().kind == Tok::kMinus) {
      const Token& op_token = Next();
      ExprPtr operand = ParseUnary();
      auto e = NewExpr(op_token.kind == Tok::kNot ? ExprKind::kNot : ExprKind::kNegate);
      if (e->kind == ExprKind::kNot) {
        if (!operand->IsBoolean()) {
          Fail("type", "NOT expects a boolean operand; parenthesize the comparison",
               operand->span);
        }
      } else {
        RequireNumeric(operand, "unary -");
      }
      e->span = Cover(op_token.span, operand->span);
      e->lhs = std::move(operand);
      return e;
    }
    return ParseAtom();
  }

  ExprPtr ParseAtom() {
    const Token& t = Next();
    switch (t.kind) {
      case Tok::kNumber: {
        auto e = NewExpr(ExprKind::kNumber);
        e->value = t.value;
        e->decimal = t.decimal;
        e->span = t.span;
        return e;
      }
      case Tok::kLParen: {
        ExprPtr inner = ParseOr();
        if (Peek().kind != Tok::kRParen) {
          Fail("paren", "unbalanced parentheses: missing ')' for '(' at column " +
                            std::to_string(t.span.column),
               Peek().span);
        }
        const Token& close = Next();
        auto copy = std::make_shared<Expr>(*inner);
        copy->span = Cover(t.span, close.span);
        return copy;
      }
      case Tok::kIdent:
        return ParseReference(t);
      case Tok::kRParen:
        Fail("paren", "unmatched ')'", t.span);
      case Tok::kEnd:
        Fail("syntax", "unexpected end of rule", t.span);
      default:
        Fail("syntax", "unexpected '" + t.text + "'", t.span);
    }
  }

  ExprPtr ParseReference(const Token& ns_token) {
    if (Peek().kind != Tok::kDot) {
      Fail("syntax",
           "expected '.' after '" + ns_token.text + "'; attributes are written namespace.name",
           Peek().span);
    }
    Next();
    const Token& attr = Next();
    if (attr.kind != Tok::kIdent) Fail("syntax", "expected an attribute name", attr.span);
    const SourceSpan span = Cover(ns_token.span, attr.span);
    auto ns = catalog_.ResolveNamespace(ns_token.text);
    if (!ns) {
      std::vector<std::string> names(std::begin(kNamespaceNames), std::end(kNamespaceNames));
      Fail("unknown-namespace", "unknown namespace '" + ns_token.text + "'", ns_token.span,
           names);
    }
    if (!NamespaceAllowed(class_, *ns)) {
      Fail("namespace",
           std::string("namespace ") + NamespaceName(*ns) + " is not available in " +
               RuleClassName(class_) + " rules",
           ns_token.span);
    }
    auto entry = catalog_.Resolve(*ns, attr.text);
    if (!entry) {
      auto suggestions = catalog_.Suggest(*ns, attr.text);
      std::string message = "unknown attribute '" + attr.text + "' in " + NamespaceName(*ns);
      if (!suggestions.empty()) message += "; did you mean '" + suggestions.front() + "'?";
      Fail("unknown-attribute", message, attr.span, suggestions);
    }
    auto e = NewExpr(ExprKind::kAttribute);
    e->ref = {*ns, entry->kind, entry->column, entry->name};
    e->span = span;
    return e;
  }

  std::vector<Token> tokens_;
  size_t pos_ = 0;
  RuleClass class_;
  const SchemaCatalog& catalog_;
};

size_t EditDistance(std::string_view a, std::string_view b) {
  std::vector<size_t> row(b.size() + 1);
  for (size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (size_t i = 1; i <= a.size(); ++i) {
    size_t diag = row[0];
    row[0] = i;
    for (size_t j = 1; j <= b.size(); ++j) {
      const size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[b.size()];
}

int Precedence(const Expr& e) {
  switch (e.kind) {
    case ExprKind::kOr: return 1;
    case ExprKind::kAnd: return 2;
    case ExprKind::kCompare: return 3;
    case ExprKind::kArithmetic: return e.op == Op::kAdd || e.op == Op::kSub ? 4 : 5;
    case ExprKind::kNegate:
    case ExprKind::kNot: return 6;
    default: return 7;
  }
}

std::string FormatNumber(double v, bool decimal) {
  char buf[64];
  if (!decimal) return std::to_string(static_cast<long long>(v));
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  std::string s(buf, end);
  if (s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

void Print(const Expr& e, std::string& out);

void PrintWrapped(const Expr& e, int min_precedence, std::string& out) {
  if (Precedence(e) < min_precedence) {
    out += '(';
    Print(e, out);
    out += ')';
  } else {
    Print(e, out);
  }
}

void Print(const Expr& e, std::string& out) {
  const int p = Precedence(e);
  switch (e.kind) {
    case ExprKind::kNumber:
      out += FormatNumber(e.value, e.decimal);
      return;
    case ExprKind::kAttribute:
      out += NamespaceName(e.ref.ns);
      out += '.';
      out += e.ref.name;
      return;
    case ExprKind::kNegate:
      out += '-';
      PrintWrapped(*e.lhs, p, out);
      return;
    case ExprKind::kNot:
      out += "NOT ";
      PrintWrapped(*e.lhs, p, out);
      return;
    case ExprKind::kCompare:
      PrintWrapped(*e.lhs, p + 1, out);
      out += ' ';
      out += OpSpelling(e.op);
      out += ' ';
      PrintWrapped(*e.rhs, p + 1, out);
      return;
    case ExprKind::kArithmetic:
    case ExprKind::kAnd:
    case ExprKind::kOr:
      PrintWrapped(*e.lhs, p, out);
      out += ' ';
      out += e.kind == ExprKind::kAnd ? "AND" : e.kind == ExprKind::kOr ? "OR" : OpSpelling(e.op);
      out += ' ';
      PrintWrapped(*e.rhs, p + 1, out);
      return;
  }
}

void CollectNamespaces(const Expr& e, std::vector<Namespace>& out) {
  if (e.kind == ExprKind::kAttribute) {
    if (std::find(out.begin(), out.end(), e.ref.ns) == out.end()) out.push_back(e.ref.ns);
  }
  if (e.lhs) CollectNamespaces(*e.lhs, out);
  if (e.rhs) CollectNamespaces(*e.rhs, out);
}

void ValidateNode(const Expr& e, RuleClass c, const SchemaCatalog& catalog,
                  std::vector<Diagnostic>& out) {
  if (e.kind == ExprKind::kAttribute) {
    if (!NamespaceAllowed(c, e.ref.ns)) {
      out.push_back({"namespace",
                     std::string("namespace ") + NamespaceName(e.ref.ns) +
                         " is not available in " + RuleClassName(c) + " rules",
                     e.span.line, e.span.column, {}, {}});
    }
    auto entry = catalog.Resolve(e.ref.ns, e.ref.name);
    if (!entry || entry->kind != e.ref.kind || entry->column != e.ref.column) {
      auto suggestions = catalog.Suggest(e.ref.ns, e.ref.name);
      std::string message =
          "unknown attribute '" + e.ref.name + "' in " + NamespaceName(e.ref.ns);
      if (!suggestions.empty()) message += "; did you mean '" + suggestions.front() + "'?";
      out.push_back({"unknown-attribute", message, e.span.line, e.span.column, suggestions, {}});
    }
  }
  if (e.lhs) ValidateNode(*e.lhs, c, catalog, out);
  if (e.rhs) ValidateNode(*e.rhs, c, catalog, out);
}

}  // namespace

const char* RuleClassName(RuleClass c) {
  switch (c) {
    case RuleClass::kStaticState: return "staticState";
    case RuleClass::kTransition: return "transition";
    case RuleClass::kSymmetryFlip: return "symmetryFlip";
    case RuleClass::kSymmetryReverse: return "symmetryReverse";
  }
  return "?";
}

RuleClass ParseRuleClass(const std::string& s) {
  for (RuleClass c : {RuleClass::kStaticState, RuleClass::kTransition, RuleClass::kSymmetryFlip,
                      RuleClass::kSymmetryReverse}) {
    if (s == RuleClassName(c)) return c;
  }
  throw ConfigError("unknown rule class '" + s +
                    "' (expected staticState, transition, symmetryFlip or symmetryReverse)");
}

const char* SeverityName(Severity s) {
  switch (s) {
    case Severity::kSound: return "sound";
    case Severity::kSuspicion: return "suspicion";
    case Severity::kUnsound: return "unsound";
  }
  return "?";
}

Severity ParseSeverity(const std::string& s) {
  for (Severity v : {Severity::kSound, Severity::kSuspicion, Severity::kUnsound}) {
    if (s == SeverityName(v)) return v;
  }
  throw ConfigError("unknown severity '" + s + "' (expected sound, suspicion or unsound)");
}

const char* NamespaceName(Namespace ns) { return kNamespaceNames[static_cast<int>(ns)]; }

bool NamespaceAllowed(RuleClass c, Namespace ns) {
  switch (ns) {
    case Namespace::kOutputState:
    case Namespace::kWinProb:
      return true;
    case Namespace::kInputState:
    case Namespace::kAction:
      return c != RuleClass::kStaticState;
    case Namespace::kFlippedOutput:
      return c == RuleClass::kSymmetryFlip;
    case Namespace::kReversedOutput:
      return c == RuleClass::kSymmetryReverse;
  }
  return false;
}

const char* OpSpelling(Op op) {
  switch (op) {
    case Op::kAdd: return "+";
    case Op::kSub: return "-";
    case Op::kMul: return "*";
    case Op::kDiv: return "/";
    case Op::kLt: return "<";
    case Op::kLe: return "<=";
    case Op::kEq: return "=";
    case Op::kNe: return "!=";
    case Op::kGt: return ">";
    case Op::kGe: return ">=";
    case Op::kNone: return "";
  }
  return "";
}

bool SameAst(const Expr& a, const Expr& b) {
  if (a.kind != b.kind || a.op != b.op) return false;
  switch (a.kind) {
    case ExprKind::kNumber:
      return a.value == b.value && a.decimal == b.decimal;
    case ExprKind::kAttribute:
      return a.ref == b.ref;
    case ExprKind::kNegate:
    case ExprKind::kNot:
      return SameAst(*a.lhs, *b.lhs);
    default:
      return SameAst(*a.lhs, *b.lhs) && SameAst(*a.rhs, *b.rhs);
  }
}

ExprPtr MakeNumber(double value, bool decimal) {
  auto e = NewExpr(ExprKind::kNumber);
  e->value = value;
  e->decimal = decimal;
  return e;
}

ExprPtr MakeAttribute(AttributeRef ref) {
  auto e = NewExpr(ExprKind::kAttribute);
  e->ref = std::move(ref);
  return e;
}

ExprPtr MakeUnary(ExprKind kind, ExprPtr operand) {
  auto e = NewExpr(kind);
  e->lhs = std::move(operand);
  return e;
}

ExprPtr MakeBinary(ExprKind kind, Op op, ExprPtr lhs, ExprPtr rhs) {
  auto e = NewExpr(kind);
  e->op = op;
  e->lhs = std::move(lhs);
  e->rhs = std::move(rhs);
  return e;
}

std::string FormatDiagnostic(const Diagnostic& d) {
  return (d.file.empty() ? "" : d.file + ":") + std::to_string(d.line) + ":" +
         std::to_string(d.column) + ": " + d.code + ": " + d.message;
}

RuleError::RuleError(Diagnostic d) : FormatError(FormatDiagnostic(d)), diagnostic_(std::move(d)) {}

SchemaCatalog::SchemaCatalog() : attributes_(kNumNamespaces) {
  for (int n = 0; n < kNumNamespaces; ++n) {
    const Namespace ns = static_cast<Namespace>(n);
    auto& list = attributes_[n];
    const bool state_like = ns == Namespace::kInputState || ns == Namespace::kOutputState ||
                            ns == Namespace::kFlippedOutput || ns == Namespace::kReversedOutput;
    if (state_like) {
      const auto& names = StateAttributeNames();
      for (int i = 0; i < kNumStateAttributes; ++i) {
        list.push_back({names[i], ColumnKind::kState, i});
      }
    }
    if (state_like || ns == Namespace::kWinProb) {
      const auto& names = WinProbAttributeNames();
      for (int i = 0; i < kNumWinProbAttributes; ++i) {
        list.push_back({names[i], ColumnKind::kWinProb, i});
      }
    }
    if (ns == Namespace::kAction) {
      const auto& names = ActionAttributeNames();
      for (int i = 0; i < kNumActionAttributes; ++i) {
        list.push_back({names[i], ColumnKind::kAction, i});
      }
    }
  }
  for (int i = 0; i < kNumWinProbAttributes; ++i) {
    AddAlias(WinProbAttributeAliases()[i], WinProbAttributeNames()[i]);
  }
}

void SchemaCatalog::AddAlias(const std::string& alias, const std::string& canonical) {
  for (const auto& list : attributes_) {
    for (const auto& e : list) {
      if (e.name == alias) throw ConfigError("alias '" + alias + "' shadows an attribute");
    }
  }
  if (auto it = aliases_.find(alias); it != aliases_.end() && it->second != canonical) {
    throw ConfigError("alias '" + alias + "' already maps to " + it->second);
  }
  for (const auto& [a, c] : aliases_) {
    if (c == canonical && a != alias) {
      throw ConfigError("attribute " + canonical + " already has alias " + a);
    }
  }
  aliases_[alias] = canonical;
}

const SchemaCatalog& SchemaCatalog::Default() {
  static const SchemaCatalog catalog;
  return catalog;
}

const std::vector<SchemaCatalog::Entry>& SchemaCatalog::Attributes(Namespace ns) const {
  return attributes_[static_cast<int>(ns)];
}

std::optional<SchemaCatalog::Entry> SchemaCatalog::Resolve(Namespace ns,
                                                           std::string_view name) const {
  std::string_view canonical = name;
  if (auto it = aliases_.find(std::string(name)); it != aliases_.end()) canonical = it->second;
  for (const Entry& e : Attributes(ns)) {
    if (e.name == canonical) return e;
  }
  return std::nullopt;
}

std::optional<Namespace> SchemaCatalog::ResolveNamespace(std::string_view name) const {
  for (int n = 0; n < kNumNamespaces; ++n) {
    if (name == kNamespaceNames[n]) return static_cast<Namespace>(n);
  }
  return std::nullopt;
}

std::vector<std::string> SchemaCatalog::Suggest(Namespace ns, std::string_view name,
                                                size_t max) const {
  // Prefix completions first, in catalog order, then near misses.
  std::vector<std::string> out;
  for (const Entry& e : Attributes(ns)) {
    if (out.size() < max && !name.empty() && e.name.size() > name.size() &&
        e.name.compare(0, name.size(), name) == 0) {
      out.push_back(e.name);
    }
  }
  std::vector<std::pair<size_t, std::string>> scored;
  for (const Entry& e : Attributes(ns)) scored.emplace_back(EditDistance(name, e.name), e.name);
  std::stable_sort(scored.begin(), scored.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  const size_t limit = std::max<size_t>(3, name.size() / 2);
  for (const auto& [d, n] : scored) {
    if (out.size() >= max || d > limit) break;
    if (std::find(out.begin(), out.end(), n) == out.end()) out.push_back(n);
  }
  return out;
}

std::vector<Namespace> QueryRule::Namespaces() const {
  std::vector<Namespace> out;
  if (expr) CollectNamespaces(*expr, out);
  std::sort(out.begin(), out.end());
  return out;
}

QueryRule ParseRule(RuleClass rule_class, std::string_view text, const SchemaCatalog& catalog) {
  Parser parser(Lex(text), rule_class, catalog);
  QueryRule rule;
  rule.rule_class = rule_class;
  rule.expr = parser.ParseAll();
  rule.source = std::string(text);
  return rule;
}

std::vector<Diagnostic> ValidateAgainstCatalog(const QueryRule& rule,
                                               const SchemaCatalog& catalog) {
  std::vector<Diagnostic> out;
  if (!rule.expr) {
    out.push_back({"syntax", "rule has no expression", 1, 1, {}, {}});
    return out;
  }
  ValidateNode(*rule.expr, rule.rule_class, catalog, out);
  if (!rule.expr->IsBoolean()) {
    out.push_back({"type", "a rule must be a boolean condition", rule.expr->span.line,
                   rule.expr->span.column, {}, {}});
  }
  return out;
}

std::string PrettyPrint(const Expr& expr) {
  std::string out;
  Print(expr, out);
  return out;
}

std::string PrettyPrint(const QueryRule& rule) { return PrettyPrint(*rule.expr); }

std::vector<QueryRule> ParseRuleFile(std::string_view text, const SchemaCatalog& catalog) {
  std::vector<std::string> lines;
  {
    std::string line;
    std::istringstream in{std::string(text)};
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      lines.push_back(line);
    }
  }
  std::vector<QueryRule> rules;
  std::map<std::string, int> names;
  size_t i = 0;
  auto fail = [](size_t line, const std::string& message) {
    throw RuleError({"syntax", message, static_cast<int>(line) + 1, 1, {}, {}});
  };
  while (i < lines.size()) {
    const std::string head = Trim(lines[i]);
    if (head.empty() || head[0] == '#') {
      ++i;
      continue;
    }
    if (head.rfind("rule ", 0) != 0) fail(i, "expected 'rule <name>'");
    const size_t rule_line = i;
    QueryRule rule;
    rule.name = Trim(head.substr(5));
    if (rule.name.empty() || rule.name.find_first_of(" \t") != std::string::npos) {
      fail(i, "rule names must be a single word");
    }
    if (names.count(rule.name)) fail(i, "duplicate rule name '" + rule.name + "'");
    std::optional<RuleClass> rule_class;
    std::string expr_text;
    size_t expr_line = 0;
    int expr_column = 1;
    ++i;
    while (i < lines.size()) {
      const std::string raw = lines[i];
      const std::string line = Trim(raw);
      if (line.empty() || line.rfind("rule ", 0) == 0) break;
      if (line[0] == '#') {
        ++i;
        continue;
      }
      const size_t colon = line.find(':');
      if (colon == std::string::npos) fail(i, "expected 'key: value'");
      const std::string key = Trim(line.substr(0, colon));
      const std::string value = Trim(line.substr(colon + 1));
      try {
        if (key == "class") {
          rule_class = ParseRuleClass(value);
        } else if (key == "severity") {
          rule.severity = ParseSeverity(value);
        } else if (key == "description") {
          rule.description = value;
        } else if (key == "expr") {
          expr_line = i;
          const size_t raw_colon = raw.find(':');
          const size_t start = raw.find_first_not_of(" \t", raw_colon + 1);
          expr_column = static_cast<int>(start == std::string::npos ? raw.size() : start) + 1;
          expr_text = start == std::string::npos ? "" : raw.substr(start);
          while (i + 1 < lines.size() && !lines[i + 1].empty() &&
                 std::isspace(static_cast<unsigned char>(lines[i + 1][0])) &&
                 !Trim(lines[i + 1]).empty()) {
            ++i;
            expr_text += "\n" + lines[i];
          }
        } else {
          fail(i, "unknown key '" + key + "'");
        }
      } catch (const ConfigError& e) {
        fail(i, e.what());
      }
      ++i;
    }
    if (!rule_class) fail(rule_line, "rule '" + rule.name + "' has no class");
    if (Trim(expr_text).empty()) fail(rule_line, "rule '" + rule.name + "' has no expr");
    try {
      QueryRule parsed = ParseRule(*rule_class, expr_text, catalog);
      rule.rule_class = parsed.rule_class;
      rule.expr = parsed.expr;
      rule.source = parsed.source;
    } catch (const RuleError& e) {
      Diagnostic d = e.diagnostic();
      if (d.line == 1) d.column += expr_column - 1;
      d.line += static_cast<int>(expr_line);
      d.message = "rule " + rule.name + ": " + d.message;
      throw RuleError(d);
    }
    names[rule.name] = 1;
    rules.push_back(std::move(rule));
  }
  return rules;
}

std::vector<QueryRule> LoadRuleFile(const std::string& path, const SchemaCatalog& catalog) {
  std::ifstream in(path);
  if (!in) throw NotFoundError("cannot open rule file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return ParseRuleFile(buf.str(), catalog);
  } catch (const RuleError& e) {
    Diagnostic d = e.diagnostic();
    d.file = path;
    throw RuleError(d);
  }
}

std::string FormatRuleFile(const std::vector<QueryRule>& rules) {
  std::string out;
  for (const QueryRule& r : rules) {
    if (!out.empty()) out += '\n';
    out += "rule " + r.name + "\n";
    out += std::string("class: ") + RuleClassName(r.rule_class) + "\n";
    out += std::string("severity: ") + SeverityName(r.severity) + "\n";
    if (!r.description.empty()) out += "description: " + r.description + "\n";
    out += "expr: " + PrettyPrint(r) + "\n";
  }
  return out;
}

}  // namespace tugcheck
