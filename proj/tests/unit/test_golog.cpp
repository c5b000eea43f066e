#include <gtest/gtest.h>

#include "kab/errors.hpp"
#include "kab/golog.hpp"
#include "kab/instance.hpp"
#include "support.hpp"

using namespace kab;

namespace {

Term C(const std::string& n) { return Term::constant(n); }
EcqPtr fact_q(const std::string& p, const std::string& c) {
  return ecq::query(make_ucq({CQ{{make_atom(p, {C(c)})}}}));
}

Action set_action(const std::string& name, const std::string& add, const std::string& del = {}) {
  Action a;
  a.name = name;
  Effect e{ecq::top(), {make_atom(add, {C("a")})}, {}};
  if (!del.empty()) e.del.push_back(make_atom(del, {C("a")}));
  a.effects.push_back(std::move(e));
  return a;
}

Gkab counter_gkab(ProgramPtr p) {
  Gkab g;
  for (auto c : {"A", "B", "C"}) g.tbox.declare_concept(c);
  g.constants.add("a", true);
  g.actions = {set_action("toA", "A", "C"), set_action("toB", "B", "A"), set_action("toC", "C", "B")};
  g.program = assign_ids(std::move(p));
  return g;
}

ProgramPtr inv(const std::string& a) { return prog::invoke(ecq::top(), a, {}); }

ServiceConfig no_services() { return {}; }

}  // namespace

TEST(Program, OccurrenceIds) {
  ProgramPtr p = assign_ids(prog::seq(inv("toA"), prog::choice(inv("toB"), inv("toC"))));
  EXPECT_EQ(p->pid, "0");
  EXPECT_EQ(p->a->pid, "0.1");
  EXPECT_EQ(p->b->b->pid, "0.2.2");
  EXPECT_EQ(epsilon_pid("0.2.1"), "0.2.1.e");
}

TEST(Program, ChoiceAllAndSeqAll) {
  EXPECT_EQ(prog::choice_all({})->kind, Program::Kind::Empty);
  ProgramPtr s = prog::seq_all({inv("toA"), inv("toB"), inv("toC")});
  EXPECT_EQ(to_string(*s), "(pick true . toA() ; (pick true . toB() ; pick true . toC()))");
}

TEST(Final, Rules) {
  TBox t;
  t.declare_concept("A");
  ABox a{concept_fact("A", "a")};
  auto fin = [&](ProgramPtr p) { return is_final(t, {a, {}, p}); };
  EXPECT_TRUE(fin(prog::empty()));
  EXPECT_FALSE(fin(inv("x")));
  EXPECT_TRUE(fin(prog::choice(inv("x"), prog::empty())));
  EXPECT_FALSE(fin(prog::seq(prog::empty(), inv("x"))));
  EXPECT_TRUE(fin(prog::loop(ecq::neg(fact_q("A", "a")), inv("x"))));
  EXPECT_FALSE(fin(prog::loop(fact_q("A", "a"), inv("x"))));
  EXPECT_TRUE(fin(prog::ite(fact_q("A", "a"), prog::empty(), inv("x"))));
  EXPECT_FALSE(fin(prog::ite(fact_q("A", "a"), inv("x"), prog::empty())));
}

TEST(GkabTs, SequenceIsLinear) {
  Gkab g = counter_gkab(prog::seq_all({inv("toA"), inv("toB"), inv("toC")}));
  auto ts = build_ts_gkab(g, Filter::S, no_services());
  EXPECT_EQ(ts.size(), 4u);
  EXPECT_EQ(ts.edges.size(), 3u);
  std::vector<std::string> trace;
  std::size_t cur = ts.initial;
  for (std::size_t k = 0; k < 3; ++k)
    for (const auto& e : ts.edges)
      if (e.src == cur) {
        trace.push_back(e.action);
        cur = e.dst;
        break;
      }
  EXPECT_EQ(trace, (std::vector<std::string>{"toA", "toB", "toC"}));
  EXPECT_EQ(ts.states[cur].abox, ABox{concept_fact("C", "a")});
}

TEST(GkabTs, WhileLoopCycles) {
  Gkab g = counter_gkab(prog::loop(ecq::top(), prog::seq(inv("toA"), inv("toB"))));
  auto ts = build_ts_gkab(g, Filter::S, no_services());
  // Start, then {A} and {B} each paired with a residual "epsilon ; loop"; the
  // second toA returns to the {A} state.
  EXPECT_EQ(ts.size(), 4u);
  for (std::size_t s = 0; s < ts.size(); ++s) EXPECT_FALSE(ts.succ[s].empty());
}

TEST(GkabTs, ConditionalPicksBranch) {
  Gkab g = counter_gkab(prog::ite(fact_q("A", "a"), inv("toB"), inv("toC")));
  g.a0 = {concept_fact("A", "a")};
  auto ts = build_ts_gkab(g, Filter::S, no_services());
  ASSERT_EQ(ts.edges.size(), 1u);
  EXPECT_EQ(ts.edges[0].action, "toB");
}

TEST(GkabTs, ChoiceUnitesInitialSteps) {
  Gkab g = counter_gkab(prog::choice(inv("toA"), inv("toB")));
  auto ts = build_ts_gkab(g, Filter::S, no_services());
  std::set<std::string> acts;
  for (const auto& e : ts.edges) acts.insert(e.action);
  EXPECT_EQ(acts, (std::set<std::string>{"toA", "toB"}));
}

TEST(GkabTs, EmptyProgramHasNoSteps) {
  auto ts = build_ts_gkab(counter_gkab(prog::empty()), Filter::S, no_services());
  EXPECT_EQ(ts.size(), 1u);
  EXPECT_TRUE(ts.edges.empty());
}

TEST(GkabTs, SampleUnderRepairFilter) {
  Instance inst = load_instance(KAB_TEST_DATA "/gkab.kab");
  auto ts = build_ts_gkab(inst.gkab(), Filter::B, inst.services);
  EXPECT_EQ(ts.size(), 10u);
  EXPECT_EQ(ts.edges.size(), 16u);
}

TEST(GkabTs, BoldEvolutionRejectsInconsistentStart) {
  Gkab g = counter_gkab(inv("toA"));
  g.tbox.add(ConceptInclusion{BasicConcept::atomic("A"), BasicConcept::atomic("B"), true});
  g.a0 = {concept_fact("A", "a"), concept_fact("B", "a")};
  EXPECT_THROW(build_ts_gkab(g, Filter::E, no_services()), PreconditionViolated);
}

// Leading empty programs do not change the reachable behaviour.
TEST(GkabTs, EmptyPrefixPreservesBehaviour) {
  oracle::SystemGen sg(71);
  for (int i = 0; i < 40; ++i) {
    TBox t = sg.tbox({});
    Gkab g = sg.gkab(t);
    Gkab h = g;
    h.program = assign_ids(prog::seq(prog::empty(), g.program));
    TransitionSystem a, b;
    try {
      a = build_ts_gkab(g, Filter::S, sg.services(), Limits{500, 0});
      b = build_ts_gkab(h, Filter::S, sg.services(), Limits{500, 0});
    } catch (const StateLimitExceeded&) {
      continue;
    }
    std::set<std::pair<std::string, std::string>> ea, eb;
    for (const auto& e : a.edges) ea.insert({a.states[e.src].abox.str(), a.states[e.dst].abox.str()});
    for (const auto& e : b.edges) eb.insert({b.states[e.src].abox.str(), b.states[e.dst].abox.str()});
    EXPECT_EQ(ea, eb);
  }
}
