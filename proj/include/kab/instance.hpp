#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "kab/golog.hpp"
#include "kab/mu.hpp"

namespace kab {

struct Instance {
  ConstantTable constants;
  TBox tbox;
  ABox abox;
  std::vector<Action> actions;
  std::optional<std::vector<ProcessRule>> process;
  ProgramPtr program;  // null when absent
  std::vector<std::pair<std::string, MuPtr>> formulas;
  ServiceConfig services;
  std::optional<Limits> limits;

  Kab kab() const;
  Gkab gkab() const;
  MuPtr formula(const std::string& name) const;
};

Instance from_kab(const Kab& k);
Instance from_gkab(const Gkab& g);

// Throws ParseError with a source position, or ValidationError.
Instance parse_instance(const std::string& text);
Instance load_instance(const std::string& path);
std::string serialize(const Instance& inst);

// Fragments in the instance-file syntax; `constants` decides which names are constants.
EcqPtr parse_ecq(const std::string& text, const ConstantTable& constants);
MuPtr parse_mu(const std::string& text, const ConstantTable& constants);
ProgramPtr parse_program(const std::string& text, const ConstantTable& constants);
// Ground facts "N(a); P(a,b)"; separators ';' or ','.
ABox parse_facts(const std::string& text);

bool same_model(const Instance& a, const Instance& b);

std::string ts_to_json(const TransitionSystem& ts);
std::string ts_to_dot(const TransitionSystem& ts);

}  // namespace kab
