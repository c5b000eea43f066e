#include <gtest/gtest.h>

#include "kab/errors.hpp"
#include "kab/mu.hpp"
#include "support.hpp"

using namespace kab;

namespace {

MuPtr lit(const std::string& p, const std::string& c) {
  return mu::query(ecq::query(make_ucq({CQ{{make_atom(p, {Term::constant(c)})}}})));
}
MuPtr lit_var(const std::string& p, const std::string& x) {
  return mu::query(ecq::query(make_ucq({CQ{{make_atom(p, {Term::var(x)})}}})));
}

TransitionSystem chain(std::vector<ABox> states, std::vector<std::pair<std::size_t, std::size_t>> edges) {
  TransitionSystem ts;
  for (auto c : {"N", "M"}) ts.tbox.declare_concept(c);
  for (auto& a : states) ts.states.push_back({std::move(a), {}, false, {}});
  for (auto [s, d] : edges) ts.edges.push_back({s, d, "e", {}, {}});
  ts.index();
  return ts;
}

// Closed formula with negations anywhere, including over fixpoints.
MuPtr closed_formula(oracle::Gen& g, int depth) {
  static const std::vector<std::string> cs{"N0", "N1", "N2"};
  if (depth == 0) return lit(g.pick(cs), g.coin() ? "a" : "b");
  switch (g.uniform(0, 5)) {
    case 0: return mu::neg(closed_formula(g, depth - 1));
    case 1: return mu::conj(closed_formula(g, depth - 1), closed_formula(g, depth - 1));
    case 2: return mu::disj(closed_formula(g, depth - 1), closed_formula(g, depth - 1));
    case 3: return mu::diamond(closed_formula(g, depth - 1));
    case 4: return mu::box(closed_formula(g, depth - 1));
    default: return mu::neg(mu::lfp("Y", mu::disj(closed_formula(g, depth - 1), mu::diamond(mu::var("Y")))));
  }
}

// phi[Z := !Z]
MuPtr negate_var(const MuPtr& f) {
  using K = Mu::Kind;
  switch (f->kind) {
    case K::Var: return mu::neg(f);
    case K::Not: return mu::neg(negate_var(f->a));
    case K::And: return mu::conj(negate_var(f->a), negate_var(f->b));
    case K::Or: return mu::disj(negate_var(f->a), negate_var(f->b));
    case K::Diamond: return mu::diamond(negate_var(f->a));
    case K::Box: return mu::box(negate_var(f->a));
    default: return f;
  }
}

std::set<std::size_t> all_states(const TransitionSystem& ts) {
  std::set<std::size_t> s;
  for (std::size_t i = 0; i < ts.size(); ++i) s.insert(i);
  return s;
}

}  // namespace

TEST(Mu, ReachabilityExample) {
  auto ts = chain({{}, {}, {concept_fact("N", "a")}}, {{0, 1}, {1, 2}});
  MuPtr ef = mu::lfp("Z", mu::disj(lit("N", "a"), mu::diamond(mu::var("Z"))));
  EXPECT_EQ(extension(ts, ef), (std::set<std::size_t>{0, 1, 2}));
  EXPECT_TRUE(model_check(ts, ef));
  MuPtr ag = mu::gfp("Z", mu::conj(mu::neg(lit("N", "a")), mu::box(mu::var("Z"))));
  EXPECT_FALSE(model_check(ts, ag));
}

TEST(Mu, DeadEndsSatisfyBoxOnly) {
  auto ts = chain({{}}, {});
  EXPECT_TRUE(model_check(ts, mu::box(mu::bottom())));
  EXPECT_FALSE(model_check(ts, mu::diamond(mu::top())));
}

TEST(Mu, QuantificationAcrossStates) {
  MuPtr f = mu::exists("x", mu::conj(lit_var("N", "x"), mu::diamond(lit_var("M", "x"))));
  EXPECT_TRUE(model_check(chain({{concept_fact("N", "a")}, {concept_fact("M", "a")}}, {{0, 1}}), f));
  EXPECT_FALSE(model_check(chain({{concept_fact("N", "a")}, {concept_fact("M", "b")}}, {{0, 1}}), f));
  // x ranges over the current active domain only.
  MuPtr g = mu::exists("x", mu::diamond(lit_var("M", "x")));
  EXPECT_FALSE(model_check(chain({{concept_fact("N", "a")}, {concept_fact("M", "b")}}, {{0, 1}}), g));
}

TEST(Mu, Validation) {
  auto ts = chain({{}}, {});
  EXPECT_THROW(model_check(ts, mu::gfp("Z", mu::neg(mu::var("Z")))), NonMonotoneFixpoint);
  EXPECT_THROW(model_check(ts, lit_var("N", "x")), ValidationError);
  EXPECT_THROW(model_check(ts, mu::var("Z")), ValidationError);
  EXPECT_NO_THROW(validate_monotone(*mu::gfp("Z", mu::neg(mu::neg(mu::var("Z"))))));
}

TEST(Mu, NnfPushesNegation) {
  MuPtr f = mu::neg(mu::lfp("Z", mu::disj(lit("N", "a"), mu::diamond(mu::var("Z")))));
  MuPtr n = nnf(f);
  EXPECT_TRUE(is_nnf(*n));
  EXPECT_EQ(n->kind, Mu::Kind::Gfp);
  EXPECT_FALSE(is_nnf(*f));
}

TEST(Mu, ReachabilityMatchesGraphSearch) {
  oracle::Gen g(91);
  for (int i = 0; i < 150; ++i) {
    auto ts = g.random_ts(static_cast<std::size_t>(g.uniform(1, 40)), 0.08);
    MuPtr p = lit("N0", "a");
    std::set<std::size_t> targets = extension(ts, p);
    EXPECT_EQ(extension(ts, mu::lfp("Z", mu::disj(p, mu::diamond(mu::var("Z"))))), oracle::reach_oracle(ts, targets));
  }
}

TEST(Mu, GreatestFixpointIsComplementOfDual) {
  oracle::Gen g(92);
  for (int i = 0; i < 150; ++i) {
    auto ts = g.random_ts(static_cast<std::size_t>(g.uniform(1, 30)), 0.1);
    MuPtr b = oracle::random_body(g, 3);
    auto nu = extension(ts, mu::gfp("Z", b));
    auto mu_dual = extension(ts, mu::lfp("Z", mu::neg(negate_var(b))));
    std::set<std::size_t> complement;
    for (std::size_t s = 0; s < ts.size(); ++s)
      if (!mu_dual.count(s)) complement.insert(s);
    EXPECT_EQ(nu, complement) << to_string(*b);
  }
}

// Least / greatest fixpoints equal the intersection / union of all pre- /
// post-fixpoints, enumerated over every subset of states.
TEST(Mu, FixpointsMatchSubsetEnumeration) {
  oracle::Gen g(93);
  for (int i = 0; i < 120; ++i) {
    auto ts = g.random_ts(static_cast<std::size_t>(g.uniform(1, 8)));
    MuPtr b = oracle::random_body(g, 3);
    std::size_t n = ts.size();
    std::set<std::size_t> lfp = all_states(ts), gfp;
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
      std::set<std::size_t> s;
      for (std::size_t k = 0; k < n; ++k)
        if (mask >> k & 1) s.insert(k);
      auto fs = extension(ts, b, {}, {{"Z", s}});
      if (std::includes(s.begin(), s.end(), fs.begin(), fs.end())) {
        std::set<std::size_t> x;
        std::set_intersection(lfp.begin(), lfp.end(), s.begin(), s.end(), std::inserter(x, x.begin()));
        lfp = x;
      }
      if (std::includes(fs.begin(), fs.end(), s.begin(), s.end())) gfp.insert(s.begin(), s.end());
    }
    EXPECT_EQ(extension(ts, mu::lfp("Z", b)), lfp) << to_string(*b);
    EXPECT_EQ(extension(ts, mu::gfp("Z", b)), gfp) << to_string(*b);
  }
}

TEST(Mu, NnfPreservesExtension) {
  oracle::Gen g(94);
  for (int i = 0; i < 150; ++i) {
    auto ts = g.random_ts(static_cast<std::size_t>(g.uniform(1, 20)), 0.15);
    MuPtr f = closed_formula(g, 4);
    EXPECT_EQ(extension(ts, nnf(f)), extension(ts, f)) << to_string(*f);
  }
}
