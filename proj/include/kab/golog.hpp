#pragma once

#include <memory>
#include <string>
#include <vector>

#include "kab/action.hpp"

namespace kab {

struct Program;
using ProgramPtr = std::shared_ptr<const Program>;

struct Program {
  enum class Kind { Empty, Invoke, Choice, Seq, If, While };
  Kind kind = Kind::Empty;
  std::string pid;  // occurrence id; empty for unnumbered programs
  EcqPtr cond;      // invoke guard, if/while condition
  std::string action;
  std::vector<std::string> args;
  ProgramPtr a;
  ProgramPtr b;
  std::string key;  // state identity: pid when present, structural otherwise
};

namespace prog {
ProgramPtr empty(std::string pid = {});
ProgramPtr invoke(EcqPtr guard, std::string action, std::vector<std::string> args, std::string pid = {});
ProgramPtr choice(ProgramPtr a, ProgramPtr b, std::string pid = {});
ProgramPtr seq(ProgramPtr a, ProgramPtr b, std::string pid = {});
ProgramPtr ite(EcqPtr cond, ProgramPtr a, ProgramPtr b, std::string pid = {});
ProgramPtr loop(EcqPtr cond, ProgramPtr body, std::string pid = {});
ProgramPtr choice_all(const std::vector<ProgramPtr>& xs);
ProgramPtr seq_all(const std::vector<ProgramPtr>& xs);
}  // namespace prog

// Assigns dotted occurrence ids: root gets `root`, children root.1 / root.2.
ProgramPtr assign_ids(const ProgramPtr& p, const std::string& root = "0");

std::string to_string(const Program& p);
bool equal(const Program& a, const Program& b);
std::string epsilon_pid(const std::string& invoke_pid);

struct Gkab {
  ConstantTable constants;
  TBox tbox;
  ABox a0;
  std::vector<Action> actions;
  ProgramPtr program;

  const Action& action(const std::string& name) const;
};

struct GkabState {
  ABox abox;
  ServiceCallMap scmap;
  ProgramPtr program;
};

struct GkabStep {
  std::string action;
  Substitution sigma;
  ServiceCallMap theta;
  GkabState next;
};

bool is_final(const TBox& t, const GkabState& s);

std::vector<GkabStep> program_step(const Gkab& g, Filter f, const ServiceConfig& cfg, const GkabState& s);

TransitionSystem build_ts_gkab(const Gkab& g, Filter f, const ServiceConfig& cfg, const Limits& limits = {});

}  // namespace kab
