#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "kab/kb.hpp"
#include "kab/query.hpp"

namespace kab {

// Ground service call (rendered f(a,b)) -> returned constant.
using ServiceCallMap = std::map<std::string, std::string>;

struct TsState {
  ABox abox;
  ServiceCallMap scmap;
  bool has_program = false;
  std::string program;  // program key for GKAB states
};

struct TsEdge {
  std::size_t src = 0;
  std::size_t dst = 0;
  std::string action;
  Substitution sigma;
  ServiceCallMap theta;
};

struct TransitionSystem {
  ConstantTable constants;
  TBox tbox;
  std::vector<TsState> states;
  std::vector<TsEdge> edges;
  std::size_t initial = 0;

  // Deduplicated successor / predecessor lists, filled by index().
  std::vector<std::vector<std::size_t>> succ;
  std::vector<std::vector<std::size_t>> pred;

  void index();
  std::size_t size() const { return states.size(); }
};

struct Limits {
  std::size_t max_states = 100000;
  std::size_t max_run_adom = 0;  // 0 = monitor off
};

}  // namespace kab
