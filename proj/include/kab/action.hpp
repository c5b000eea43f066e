#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kab/kb.hpp"
#include "kab/query.hpp"
#include "kab/ts.hpp"

namespace kab {

struct Effect {
  EcqPtr guard;
  std::vector<Atom> add;  // may contain service calls
  std::vector<Atom> del;
};

struct Action {
  std::string name;
  std::vector<std::string> params;
  std::vector<Effect> effects;
};

struct ProcessRule {
  EcqPtr cond;
  std::string action;
  std::vector<std::string> args;  // variables, positionally matched to the action parameters
};

struct ServiceConfig {
  enum class Mode { Oracle, Enumerate };
  Mode mode = Mode::Enumerate;
  std::map<std::string, std::string> table;     // ground call -> value
  std::map<std::string, std::string> defaults;  // function name -> value
  std::vector<std::string> values;              // enumeration domain V

  bool operator==(const ServiceConfig&) const = default;
};

enum class Filter { S, B, C, E };
const char* to_string(Filter f);

struct Kab {
  ConstantTable constants;
  TBox tbox;
  ABox a0;
  std::vector<Action> actions;
  std::vector<ProcessRule> process;

  const Action& action(const std::string& name) const;
};

// Checks effect heads, arities and domain independence.
void validate_action(const Action& a);

std::vector<Atom> add_facts(const TBox& t, const ABox& a, const Action& act, const Substitution& sigma);
ABox del_facts(const TBox& t, const ABox& a, const Action& act, const Substitution& sigma);

std::vector<Term> ground_calls(const std::vector<Atom>& facts);

std::vector<ServiceCallMap> eval_thetas(const std::vector<Term>& calls, const ServiceCallMap& m,
                                        const ServiceConfig& cfg);

// Instantiates service calls; throws if theta misses one.
ABox ground_with(const std::vector<Atom>& facts, const ServiceCallMap& theta);

ABox do_action(const ABox& a, const ABox& del, const std::vector<Atom>& add, const ServiceCallMap& theta);

std::vector<ABox> apply_filter(const TBox& t, const ABox& a, const ABox& fplus, const ABox& fminus, Filter kind);

struct TellResult {
  ABox abox;
  ServiceCallMap scmap;
  ServiceCallMap theta;
};

std::vector<TellResult> tell(const TBox& t, Filter f, const ABox& a, const ServiceCallMap& m, const Action& act,
                             const Substitution& sigma, const ServiceConfig& cfg);

// Legal parameter substitutions for a guard whose free variables are `args`,
// renamed to the action's parameter names.
std::vector<Substitution> legal_params(const TBox& t, const ABox& a, const EcqPtr& guard,
                                       const std::vector<std::string>& args, const Action& act);

TransitionSystem build_ts_skab(const Kab& k, const ServiceConfig& cfg, const Limits& limits = {});

}  // namespace kab
