#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>

#include "kab/query.hpp"
#include "kab/ts.hpp"

namespace kab {

struct Mu;
using MuPtr = std::shared_ptr<const Mu>;

struct Mu {
  enum class Kind { Query, Not, And, Or, Exists, Forall, Diamond, Box, Var, Lfp, Gfp, True, False };
  Kind kind = Kind::True;
  EcqPtr q;
  MuPtr a;
  MuPtr b;
  std::string var;  // individual variable (Exists/Forall) or predicate variable (Var/Lfp/Gfp)
};

namespace mu {
MuPtr query(EcqPtr q);
MuPtr neg(MuPtr a);
MuPtr conj(MuPtr a, MuPtr b);
MuPtr disj(MuPtr a, MuPtr b);
MuPtr exists(std::string x, MuPtr a);
MuPtr forall(std::string x, MuPtr a);
MuPtr diamond(MuPtr a);
MuPtr box(MuPtr a);
MuPtr var(std::string z);
MuPtr lfp(std::string z, MuPtr a);
MuPtr gfp(std::string z, MuPtr a);
MuPtr top();
MuPtr bottom();
}  // namespace mu

std::string to_string(const Mu& f);
bool equal(const Mu& a, const Mu& b);
bool is_nnf(const Mu& f);
MuPtr nnf(const MuPtr& f);

std::set<std::string> free_individual_vars(const Mu& f);
std::set<std::string> free_predicate_vars(const Mu& f);
bool mentions_markers(const Mu& f);

// Throws NonMonotoneFixpoint when a bound predicate variable occurs under an
// odd number of negations.
void validate_monotone(const Mu& f);

using Valuation = Substitution;
using PredValuation = std::map<std::string, std::set<std::size_t>>;

std::set<std::size_t> extension(const TransitionSystem& ts, const MuPtr& f, const Valuation& v = {},
                                const PredValuation& V = {});

bool model_check(const TransitionSystem& ts, const MuPtr& f);

}  // namespace kab
