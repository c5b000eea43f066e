#include "kab/kb.hpp"

#include <algorithm>
#include <deque>

#include "kab/errors.hpp"

namespace kab {

bool is_marker_pred(std::string_view pred) {
  return pred == kStatePred || pred == kFlagPred || pred == kNoopPred;
}

std::string BasicConcept::str() const {
  if (!exists) return name;
  return "exists " + role().str();
}

void TBox::declare_concept(const std::string& n) {
  concepts_.insert(n);
  touch();
}

void TBox::declare_role(const std::string& n) {
  roles_.insert(n);
  touch();
}

void TBox::add(const ConceptInclusion& ci) {
  if (std::find(cis_.begin(), cis_.end(), ci) == cis_.end()) cis_.push_back(ci);
  touch();
}

void TBox::add(const RoleInclusion& ri) {
  if (std::find(ris_.begin(), ris_.end(), ri) == ris_.end()) ris_.push_back(ri);
  touch();
}

void TBox::add_funct(const BasicRole& r) {
  if (std::find(functs_.begin(), functs_.end(), r) == functs_.end()) functs_.push_back(r);
  touch();
}

bool TBox::has_concept(std::string_view n) const { return concepts_.count(std::string(n)) > 0; }
bool TBox::has_role(std::string_view n) const { return roles_.count(std::string(n)) > 0; }

TBox TBox::positive_part() const {
  TBox t;
  t.concepts_ = concepts_;
  t.roles_ = roles_;
  for (const auto& ci : cis_)
    if (!ci.negated) t.cis_.push_back(ci);
  for (const auto& ri : ris_)
    if (!ri.negated) t.ris_.push_back(ri);
  return t;
}

bool TBox::has_negative_part() const {
  if (!functs_.empty()) return true;
  for (const auto& ci : cis_)
    if (ci.negated) return true;
  for (const auto& ri : ris_)
    if (ri.negated) return true;
  return false;
}

namespace {

void check_name(const std::string& n) {
  if (n.empty()) throw ValidationError("empty vocabulary name");
  if (is_marker_pred(n)) throw ValidationError("reserved marker name in TBox: " + n);
}

}  // namespace

void TBox::validate(bool allow_specialized_funct) const {
  for (const auto& n : concepts_) {
    check_name(n);
    if (roles_.count(n)) throw ValidationError("name declared as concept and role: " + n);
  }
  for (const auto& n : roles_) check_name(n);
  auto concept_ok = [&](const BasicConcept& b) {
    if (b.exists ? !has_role(b.name) : !has_concept(b.name))
      throw ValidationError("undeclared name in TBox: " + b.name);
  };
  auto role_ok = [&](const BasicRole& r) {
    if (!has_role(r.name)) throw ValidationError("undeclared role in TBox: " + r.name);
  };
  for (const auto& ci : cis_) {
    concept_ok(ci.lhs);
    concept_ok(ci.rhs);
  }
  for (const auto& ri : ris_) {
    role_ok(ri.lhs);
    role_ok(ri.rhs);
  }
  for (const auto& f : functs_) role_ok(f);
  if (allow_specialized_funct) return;
  for (const auto& ri : ris_) {
    if (ri.negated) continue;
    for (const auto& f : functs_) {
      if (f.name == ri.rhs.name)
        throw ValidationError("functional role " + f.str() + " is specialized by " + ri.lhs.str() +
                              " <= " + ri.rhs.str());
    }
  }
}

namespace {

template <typename T>
std::set<std::pair<T, T>> reflexive_transitive(const std::vector<T>& nodes,
                                               const std::map<T, std::vector<T>>& succ) {
  std::set<std::pair<T, T>> out;
  for (const auto& n : nodes) {
    std::set<T> seen{n};
    std::deque<T> todo{n};
    while (!todo.empty()) {
      T cur = todo.front();
      todo.pop_front();
      auto it = succ.find(cur);
      if (it == succ.end()) continue;
      for (const auto& nx : it->second)
        if (seen.insert(nx).second) todo.push_back(nx);
    }
    for (const auto& s : seen) out.insert({n, s});
  }
  return out;
}

std::string build_key(const TBox& t) {
  std::string k = "C:";
  for (const auto& c : t.concepts()) k += c + ",";
  k += "R:";
  for (const auto& r : t.roles()) k += r + ",";
  auto cis = t.concept_inclusions();
  std::sort(cis.begin(), cis.end());
  for (const auto& ci : cis) k += ci.lhs.str() + (ci.negated ? "<!" : "<") + ci.rhs.str() + ";";
  auto ris = t.role_inclusions();
  std::sort(ris.begin(), ris.end());
  for (const auto& ri : ris) k += ri.lhs.str() + (ri.negated ? "<!" : "<") + ri.rhs.str() + ";";
  auto fs = t.functs();
  std::sort(fs.begin(), fs.end());
  for (const auto& f : fs) k += "F" + f.str() + ";";
  return k;
}

}  // namespace

const TBoxIndex& TBox::index() const {
  if (index_) return *index_;
  auto ix = std::make_shared<TBoxIndex>();
  ix->key = build_key(*this);
  for (const auto& c : concepts_) ix->basic_concepts.push_back(BasicConcept::atomic(c));
  for (const auto& r : roles_) {
    ix->basic_roles.push_back({r, false});
    ix->basic_roles.push_back({r, true});
    ix->basic_concepts.push_back(BasicConcept::some({r, false}));
    ix->basic_concepts.push_back(BasicConcept::some({r, true}));
  }
  std::map<BasicConcept, std::vector<BasicConcept>> csucc;
  std::map<BasicRole, std::vector<BasicRole>> rsucc;
  auto cedge = [&](const BasicConcept& a, const BasicConcept& b) {
    csucc[a].push_back(b);
    ix->concept_parents_of[b].push_back(a);
  };
  for (const auto& ci : cis_)
    if (!ci.negated) cedge(ci.lhs, ci.rhs);
  for (const auto& ri : ris_) {
    if (ri.negated) continue;
    rsucc[ri.lhs].push_back(ri.rhs);
    rsucc[ri.lhs.inv()].push_back(ri.rhs.inv());
    ix->role_parents_of[ri.rhs].push_back(ri.lhs);
    ix->role_parents_of[ri.rhs.inv()].push_back(ri.lhs.inv());
    cedge(BasicConcept::some(ri.lhs), BasicConcept::some(ri.rhs));
    cedge(BasicConcept::some(ri.lhs.inv()), BasicConcept::some(ri.rhs.inv()));
  }
  ix->concept_sub = reflexive_transitive(ix->basic_concepts, csucc);
  ix->role_sub = reflexive_transitive(ix->basic_roles, rsucc);
  index_ = ix;
  return *index_;
}

const std::string& TBox::key() const { return index().key; }

bool TBox::operator==(const TBox& o) const { return key() == o.key(); }

NegativeClosure saturate_negatives(const TBox& t) {
  const TBoxIndex& ix = t.index();
  std::map<BasicConcept, std::vector<BasicConcept>> csubs;  // B -> {B0 : B0 <=* B}
  for (const auto& [lo, hi] : ix.concept_sub) csubs[hi].push_back(lo);
  std::map<BasicRole, std::vector<BasicRole>> rsubs;
  for (const auto& [lo, hi] : ix.role_sub) rsubs[hi].push_back(lo);

  NegativeClosure out;
  auto add_concepts = [&](const BasicConcept& b1, const BasicConcept& b2) {
    for (const auto& x : csubs[b1])
      for (const auto& y : csubs[b2]) {
        out.concepts.insert({x, y});
        out.concepts.insert({y, x});
      }
  };
  auto add_roles = [&](const BasicRole& r1, const BasicRole& r2) {
    for (const auto& x : rsubs[r1])
      for (const auto& y : rsubs[r2]) {
        out.roles.insert({x, y});
        out.roles.insert({y, x});
      }
  };
  for (const auto& ci : t.concept_inclusions())
    if (ci.negated) add_concepts(ci.lhs, ci.rhs);
  for (const auto& ri : t.role_inclusions())
    if (ri.negated) {
      add_roles(ri.lhs, ri.rhs);
      add_roles(ri.lhs.inv(), ri.rhs.inv());
    }
  for (const auto& [a, b] : out.concepts)
    if (a == b) throw SaturationDerivedUnsat("derived " + a.str() + " <= not " + a.str());
  for (const auto& [a, b] : out.roles)
    if (a == b) throw SaturationDerivedUnsat("derived " + a.str() + " <= not " + a.str());
  return out;
}

std::string Fact::str() const {
  if (role) return pred + "(" + s + "," + o + ")";
  return pred + "(" + s + ")";
}

Fact concept_fact(std::string pred, std::string c) { return {std::move(pred), std::move(c), "", false}; }

Fact role_fact(std::string pred, std::string c1, std::string c2) {
  return {std::move(pred), std::move(c1), std::move(c2), true};
}

ABox::ABox(std::initializer_list<Fact> facts) : facts_(facts) {
  std::sort(facts_.begin(), facts_.end());
  facts_.erase(std::unique(facts_.begin(), facts_.end()), facts_.end());
}

ABox::ABox(std::vector<Fact> facts) : facts_(std::move(facts)) {
  std::sort(facts_.begin(), facts_.end());
  facts_.erase(std::unique(facts_.begin(), facts_.end()), facts_.end());
}

bool ABox::insert(const Fact& f) {
  auto it = std::lower_bound(facts_.begin(), facts_.end(), f);
  if (it != facts_.end() && *it == f) return false;
  facts_.insert(it, f);
  return true;
}

bool ABox::erase(const Fact& f) {
  auto it = std::lower_bound(facts_.begin(), facts_.end(), f);
  if (it == facts_.end() || !(*it == f)) return false;
  facts_.erase(it);
  return true;
}

bool ABox::contains(const Fact& f) const { return std::binary_search(facts_.begin(), facts_.end(), f); }

std::string ABox::str() const {
  std::string out = "{";
  for (std::size_t i = 0; i < facts_.size(); ++i) {
    if (i) out += ", ";
    out += facts_[i].str();
  }
  return out + "}";
}

ABox unite(const ABox& a, const ABox& b) {
  std::vector<Fact> out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return ABox(std::move(out));
}

ABox minus(const ABox& a, const ABox& b) {
  std::vector<Fact> out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return ABox(std::move(out));
}

ABox intersect(const ABox& a, const ABox& b) {
  std::vector<Fact> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return ABox(std::move(out));
}

bool subset(const ABox& a, const ABox& b) { return std::includes(b.begin(), b.end(), a.begin(), a.end()); }

ABox strip_markers(const ABox& a) {
  std::vector<Fact> out;
  for (const auto& f : a)
    if (!f.marker()) out.push_back(f);
  return ABox(std::move(out));
}

std::set<std::string> adom(const ABox& a, bool include_markers) {
  std::set<std::string> out;
  for (const auto& f : a) {
    if (!include_markers && f.marker()) continue;
    out.insert(f.s);
    if (f.role) out.insert(f.o);
  }
  return out;
}

void ConstantTable::add(const std::string& name, bool distinguished) {
  auto [it, fresh] = entries.emplace(name, distinguished);
  if (!fresh && distinguished) it->second = true;
}

bool ConstantTable::distinguished(const std::string& name) const {
  auto it = entries.find(name);
  return it != entries.end() && it->second;
}

std::string ConstantTable::fresh(const std::string& prefix, int* counter) const {
  for (;; ++*counter) {
    std::string n = prefix + std::to_string(*counter);
    if (!contains(n)) {
      ++*counter;
      return n;
    }
  }
}

}  // namespace kab
