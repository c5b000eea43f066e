#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "kab/golog.hpp"
#include "kab/mu.hpp"

namespace kab {

EcqPtr marker_query(std::string_view pred, const std::string& c);
Atom marker_atom(std::string_view pred, const std::string& c);

// S-KAB -> S-GKAB: while true do (a1 | ... | an); epsilon for an empty process.
Gkab tkabs(const Kab& k);

struct Invocation {
  EcqPtr guard;
  std::string action;
  std::vector<std::string> args;
};

enum class BRepairStrategy {
  DeleteOneSide,  // one action per violated inclusion side, deleting that side
  KeepOne,        // keep one conflicting fact and delete everything clashing with it
};

struct RepairActions {
  std::vector<Invocation> invocations;
  std::vector<Action> actions;
};

RepairActions brepair_actions(const TBox& t, BRepairStrategy strategy = BRepairStrategy::KeepOne);
ProgramPtr brepair_program(const TBox& t, BRepairStrategy strategy = BRepairStrategy::KeepOne);

Gkab tgkabb(const Gkab& g, BRepairStrategy strategy = BRepairStrategy::KeepOne);
MuPtr tforb(const MuPtr& f);

Action crepair_action(const TBox& t);
Gkab tgkabc(const Gkab& g);
MuPtr tford(const MuPtr& f);

std::string new_name(const std::string& n);
TBox new_vocabulary_tbox(const TBox& t);
Action evolution_action(const TBox& t);
Gkab tgkabe(const Gkab& g);

struct FlagTables {
  std::map<std::string, std::string> pre;   // pid -> flag constant
  std::map<std::string, std::string> post;  // pid -> flag constant
};

struct ProgramTranslation {
  std::vector<ProcessRule> rules;
  std::vector<Action> actions;
  FlagTables flags;
  std::vector<std::string> constants;  // fresh flag / noop constants
};

// Flag-based translation of a program with occurrence ids. `counter` feeds the
// fresh constant generator; `taken` lists names that must not be reused.
ProgramTranslation tgprog(const std::string& pre, const ProgramPtr& p, const std::string& post,
                          const Gkab& g, int* counter, ConstantTable* taken);

Kab tgkab(const Gkab& g, int seed = 0);
MuPtr tforj(const MuPtr& f);

}  // namespace kab
