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


// Random well-typed rule ASTs for round-trip and oracle tests.

#ifndef TUGCHECK_TESTS_ORACLE_RULE_GEN_H_
#define TUGCHECK_TESTS_ORACLE_RULE_GEN_H_

#include <cmath>
#include <random>
#include <vector>

#include "tugcheck/rule_dsl.h"

namespace tugcheck::oracle {

class RuleGenerator {
 public:
  RuleGenerator(RuleClass rule_class, std::uint64_t seed,
                const SchemaCatalog& catalog = SchemaCatalog::Default())
      : class_(rule_class), rng_(seed), catalog_(catalog) {
    for (int n = 0; n < kNumNamespaces; ++n) {
      if (NamespaceAllowed(rule_class, static_cast<Namespace>(n))) {
        namespaces_.push_back(static_cast<Namespace>(n));
      }
    }
  }

  ExprPtr Boolean(int depth) {
    const int pick = Uniform(0, depth <= 0 ? 0 : 3);
    switch (pick) {
      case 0: return Compare(depth - 1);
      case 1: return MakeUnary(ExprKind::kNot, Boolean(depth - 1));
      case 2: return MakeBinary(ExprKind::kAnd, Op::kNone, Boolean(depth - 1), Boolean(depth - 1));
      default: return MakeBinary(ExprKind::kOr, Op::kNone, Boolean(depth - 1), Boolean(depth - 1));
    }
  }

  ExprPtr Compare(int depth) {
    static constexpr Op kOps[] = {Op::kLt, Op::kLe, Op::kEq, Op::kNe, Op::kGt, Op::kGe};
    return MakeBinary(ExprKind::kCompare, kOps[Uniform(0, 5)], Numeric(depth), Numeric(depth));
  }

  ExprPtr Numeric(int depth) {
    const int pick = Uniform(0, depth <= 0 ? 1 : 4);
    switch (pick) {
      case 0: return Attribute();
      case 1: return Number();
      case 2: return MakeUnary(ExprKind::kNegate, Numeric(depth - 1));
      default: {
        static constexpr Op kOps[] = {Op::kAdd, Op::kSub, Op::kMul, Op::kDiv};
        return MakeBinary(ExprKind::kArithmetic, kOps[Uniform(0, 3)], Numeric(depth - 1),
                          Numeric(depth - 1));
      }
    }
  }

  ExprPtr Attribute() {
    const Namespace ns = namespaces_[Uniform(0, static_cast<int>(namespaces_.size()) - 1)];
    const auto& entries = catalog_.Attributes(ns);
    const auto& e = entries[Uniform(0, static_cast<int>(entries.size()) - 1)];
    return MakeAttribute({ns, e.kind, e.column, e.name});
  }

  ExprPtr Number() {
    switch (Uniform(0, 3)) {
      case 0: return MakeNumber(Uniform(0, 2000), false);
      case 1: return MakeNumber(Uniform(0, 400) / 8.0, true);
      case 2: return MakeNumber(std::uniform_real_distribution<double>(0, 1)(rng_), true);
      default: return MakeNumber(std::ldexp(1.0, Uniform(-40, 60)), true);
    }
  }

  RuleClass rule_class() const { return class_; }

 private:
  int Uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  RuleClass class_;
  std::mt19937_64 rng_;
  const SchemaCatalog& catalog_;
  std::vector<Namespace> namespaces_;
};

}  // namespace tugcheck::oracle

#endif  // TUGCHECK_TESTS_ORACLE_RULE_GEN_H_
