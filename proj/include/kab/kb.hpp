#pragma once

#include <compare>
#include <initializer_list>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace kab {

// Reserved marker vocabulary. Marker facts are unary and never part of voc(T).
inline constexpr std::string_view kStatePred = "__state";
inline constexpr std::string_view kFlagPred = "__flag";
inline constexpr std::string_view kNoopPred = "__noop";
inline constexpr std::string_view kNewSuffix = "__n";

bool is_marker_pred(std::string_view pred);

struct BasicRole {
  std::string name;
  bool inverse = false;

  BasicRole inv() const { return {name, !inverse}; }
  std::string str() const { return inverse ? name + "-" : name; }
  auto operator<=>(const BasicRole&) const = default;
};

// Either a concept name N (exists == false) or exists R.
struct BasicConcept {
  std::string name;
  bool exists = false;
  bool inverse = false;

  static BasicConcept atomic(std::string n) { return {std::move(n), false, false}; }
  static BasicConcept some(const BasicRole& r) { return {r.name, true, r.inverse}; }
  BasicRole role() const { return {name, inverse}; }
  std::string str() const;
  auto operator<=>(const BasicConcept&) const = default;
};

struct ConceptInclusion {
  BasicConcept lhs;
  BasicConcept rhs;
  bool negated = false;
  auto operator<=>(const ConceptInclusion&) const = default;
};

struct RoleInclusion {
  BasicRole lhs;
  BasicRole rhs;
  bool negated = false;
  auto operator<=>(const RoleInclusion&) const = default;
};

struct NegativeClosure {
  std::set<std::pair<BasicConcept, BasicConcept>> concepts;
  std::set<std::pair<BasicRole, BasicRole>> roles;
  bool operator==(const NegativeClosure&) const = default;
};

struct TBoxIndex;

class TBox {
 public:
  void declare_concept(const std::string& n);
  void declare_role(const std::string& n);
  void add(const ConceptInclusion& ci);
  void add(const RoleInclusion& ri);
  void add_funct(const BasicRole& r);

  const std::set<std::string>& concepts() const { return concepts_; }
  const std::set<std::string>& roles() const { return roles_; }
  const std::vector<ConceptInclusion>& concept_inclusions() const { return cis_; }
  const std::vector<RoleInclusion>& role_inclusions() const { return ris_; }
  const std::vector<BasicRole>& functs() const { return functs_; }

  bool has_concept(std::string_view n) const;
  bool has_role(std::string_view n) const;

  // T_p: declarations plus positive inclusions only.
  TBox positive_part() const;
  bool has_negative_part() const;

  // Checks declarations, reserved names and the functional-role side condition.
  void validate(bool allow_specialized_funct = false) const;

  // Cached derived data; recomputed after any mutation.
  const TBoxIndex& index() const;
  const std::string& key() const;

  bool operator==(const TBox& o) const;

 private:
  void touch() { index_.reset(); }

  std::set<std::string> concepts_;
  std::set<std::string> roles_;
  std::vector<ConceptInclusion> cis_;
  std::vector<RoleInclusion> ris_;
  std::vector<BasicRole> functs_;
  mutable std::shared_ptr<const TBoxIndex> index_;
};

struct TBoxIndex {
  std::string key;
  std::vector<BasicConcept> basic_concepts;
  std::vector<BasicRole> basic_roles;
  // Reflexive-transitive closure of the positive inclusions.
  std::set<std::pair<BasicConcept, BasicConcept>> concept_sub;
  std::set<std::pair<BasicRole, BasicRole>> role_sub;
  // Left-hand sides directly included in a given concept / role (one step).
  std::map<BasicConcept, std::vector<BasicConcept>> concept_parents_of;
  std::map<BasicRole, std::vector<BasicRole>> role_parents_of;
};

NegativeClosure saturate_negatives(const TBox& t);

struct Fact {
  std::string pred;
  std::string s;
  std::string o;  // empty for concept facts
  bool role = false;

  std::string str() const;
  bool marker() const { return is_marker_pred(pred); }
  auto operator<=>(const Fact&) const = default;
};

Fact concept_fact(std::string pred, std::string c);
Fact role_fact(std::string pred, std::string c1, std::string c2);

class ABox {
 public:
  ABox() = default;
  ABox(std::initializer_list<Fact> facts);
  explicit ABox(std::vector<Fact> facts);

  bool insert(const Fact& f);
  bool erase(const Fact& f);
  bool contains(const Fact& f) const;

  std::size_t size() const { return facts_.size(); }
  bool empty() const { return facts_.empty(); }
  auto begin() const { return facts_.begin(); }
  auto end() const { return facts_.end(); }
  const std::vector<Fact>& facts() const { return facts_; }

  std::string str() const;
  auto operator<=>(const ABox&) const = default;

 private:
  std::vector<Fact> facts_;
};

ABox unite(const ABox& a, const ABox& b);
ABox minus(const ABox& a, const ABox& b);
ABox intersect(const ABox& a, const ABox& b);
bool subset(const ABox& a, const ABox& b);
ABox strip_markers(const ABox& a);

std::set<std::string> adom(const ABox& a, bool include_markers = true);

// The finite constant universe of an instance; C0 is the distinguished part.
struct ConstantTable {
  std::map<std::string, bool> entries;

  void add(const std::string& name, bool distinguished);
  bool contains(const std::string& name) const { return entries.count(name) > 0; }
  bool distinguished(const std::string& name) const;
  // First name of the form prefix<k>, k >= *counter, not yet in the table.
  std::string fresh(const std::string& prefix, int* counter) const;
  bool operator==(const ConstantTable&) const = default;
};

}  // namespace kab
