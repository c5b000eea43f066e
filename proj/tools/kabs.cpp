// kabs: command-line front end for knowledge and action bases.
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "kab/bisim.hpp"
#include "kab/compiler.hpp"
#include "kab/consistency.hpp"
#include "kab/errors.hpp"
#include "kab/instance.hpp"
#include "kab/repair.hpp"

using namespace kab;
using Json = nlohmann::ordered_json;

namespace {

struct Globals {
  std::size_t max_states = 100000;
  std::size_t max_run_adom = 0;
  std::string json_out;
  int seed = 0;
  std::string dump_ts;
  std::string dot;
};

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path);
  out << text;
}

void emit(const Globals& g, const Json& j) {
  if (!g.json_out.empty()) write_file(g.json_out, j.dump(2) + "\n");
}

Limits limits_for(const Globals& g, const Instance& inst, const CLI::App& app) {
  Limits l = inst.limits.value_or(Limits{});
  if (app.count("--max-states") || !inst.limits) l.max_states = g.max_states;
  if (app.count("--max-run-adom") || !inst.limits) l.max_run_adom = g.max_run_adom;
  return l;
}

Filter parse_filter(const std::string& s) {
  if (s == "s") return Filter::S;
  if (s == "b") return Filter::B;
  if (s == "c") return Filter::C;
  return Filter::E;
}

// GKAB view of an instance; processes run through tkabs unless asked otherwise.
TransitionSystem build(const Instance& inst, const std::string& semantics, bool as_kab, const Limits& l) {
  bool kab_mode = as_kab || (!inst.program && inst.process);
  if (kab_mode && semantics == "s") return build_ts_skab(inst.kab(), inst.services, l);
  Gkab g = kab_mode ? tkabs(inst.kab()) : inst.gkab();
  return build_ts_gkab(g, parse_filter(semantics), inst.services, l);
}

void dump(const Globals& g, const TransitionSystem& ts) {
  if (!g.dump_ts.empty()) write_file(g.dump_ts, ts_to_json(ts));
  if (!g.dot.empty()) write_file(g.dot, ts_to_dot(ts));
}

Json abox_json(const ABox& a) {
  Json out = Json::array();
  for (const auto& f : a) out.push_back(f.str());
  return out;
}

MuPtr prepare_nnf(const MuPtr& f) {
  if (is_nnf(*f)) return f;
  std::cerr << "note: formula converted to negation normal form\n";
  return nnf(f);
}

MuPtr translate_formula(const std::string& kind, const MuPtr& f) {
  if (kind == "b") return tforb(prepare_nnf(f));
  if (kind == "d") return tford(f);
  return tforj(prepare_nnf(f));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Knowledge and action base toolkit"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--max-states", g.max_states, "State bound for transition system construction");
  app.add_option("--max-run-adom", g.max_run_adom, "Run active-domain monitor bound (0 = off)");
  app.add_option("--json", g.json_out, "Write a JSON report to this file");
  app.add_option("--seed", g.seed, "Seed of the fresh-constant counter");
  app.add_option("--dump-ts", g.dump_ts, "Write the transition system as JSON");
  app.add_option("--dot", g.dot, "Write the transition system as DOT");

  std::string file;
  auto add_cmd = [&](const std::string& name, const std::string& help) {
    CLI::App* c = app.add_subcommand(name, help);
    c->add_option("instance", file, "Instance file")->required();
    return c;
  };

  CLI::App* consistency = add_cmd("check-consistency", "Check T-consistency of the ABox");
  CLI::App* repairs = add_cmd("repairs", "Compute b- or c-repairs of the ABox");
  std::string repair_kind = "b";
  repairs->add_option("--kind", repair_kind)->check(CLI::IsMember({"b", "c"}));
  CLI::App* evolve_cmd = add_cmd("evolve", "Bold evolution of the ABox");
  std::string plus, minus_facts;
  evolve_cmd->add_option("--add", plus, "Facts to add, e.g. \"N(a); P(a,b)\"");
  evolve_cmd->add_option("--del", minus_facts, "Facts to delete");
  CLI::App* build_cmd = add_cmd("build-ts", "Build the transition system");
  std::string semantics = "s";
  bool as_kab = false;
  build_cmd->add_option("--semantics", semantics)->check(CLI::IsMember({"s", "b", "c", "e"}));
  build_cmd->add_flag("--as-kab", as_kab, "Run the condition-action process even when a program is present");
  CLI::App* compile = add_cmd("compile", "Translate between system variants");
  std::string target, out_file;
  compile->add_option("--to", target)
      ->required()
      ->check(CLI::IsMember({"sgkab-from-skab", "sgkab-from-b", "sgkab-from-c", "sgkab-from-e", "skab"}));
  compile->add_option("--out", out_file, "Output instance file (default stdout)");
  std::string strategy = "keep";
  compile->add_option("--repair-strategy", strategy)->check(CLI::IsMember({"keep", "delete"}));
  CLI::App* verify = add_cmd("verify", "Model check a named formula");
  std::string formula;
  verify->add_option("--semantics", semantics)->check(CLI::IsMember({"s", "b", "c", "e"}));
  verify->add_option("--formula", formula)->required();
  verify->add_flag("--as-kab", as_kab);
  CLI::App* bisim = app.add_subcommand("bisim", "Check a bisimulation between two systems");
  std::string bkind = "e", left, right, lsem, rsem = "s";
  bisim->add_option("--kind", bkind)->check(CLI::IsMember({"e", "j", "l", "s"}));
  bisim->add_option("--left", left)->required();
  bisim->add_option("--right", right)->required();
  bisim->add_option("--left-semantics", lsem)->check(CLI::IsMember({"s", "b", "c", "e"}));
  bisim->add_option("--right-semantics", rsem)->check(CLI::IsMember({"s", "b", "c", "e"}));
  CLI::App* tf = add_cmd("translate-formula", "Translate a named formula");
  std::string tkind = "j";
  tf->add_option("--kind", tkind)->check(CLI::IsMember({"b", "d", "j"}));
  tf->add_option("--formula", formula)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*bisim) {
      Instance li = load_instance(left);
      Instance ri = load_instance(right);
      if (lsem.empty()) lsem = bkind == "l" ? "b" : bkind == "s" ? "c" : "s";
      Limits lim{g.max_states, g.max_run_adom};
      TransitionSystem t1 = build(li, lsem, false, lim);
      TransitionSystem t2 = build(ri, rsem, false, lim);
      bool ok = bkind == "e"   ? e_bisimilar(t1, t2)
                : bkind == "j" ? j_bisimilar(t1, t2)
                : bkind == "l" ? l_bisimilar(t1, t2)
                               : s_bisimilar(t1, t2);
      std::cout << (ok ? "bisimilar" : "not bisimilar") << "\n";
      emit(g, Json{{"kind", bkind}, {"bisimilar", ok}});
      return ok ? 0 : 1;
    }

    Instance inst = load_instance(file);
    Limits lim = limits_for(g, inst, app);

    if (*consistency) {
      bool ok = is_consistent(inst.tbox, inst.abox);
      std::cout << (ok ? "consistent" : "inconsistent") << "\n";
      emit(g, Json{{"consistent", ok}});
      return ok ? 0 : 1;
    }
    if (*repairs) {
      Json list = Json::array();
      if (repair_kind == "b") {
        for (const auto& r : b_repairs(inst.tbox, inst.abox)) {
          std::cout << r.str() << "\n";
          list.push_back(abox_json(r));
        }
      } else {
        ABox r = c_repair(inst.tbox, inst.abox);
        std::cout << r.str() << "\n";
        list.push_back(abox_json(r));
      }
      emit(g, Json{{"kind", repair_kind}, {"repairs", list}});
      return 0;
    }
    if (*evolve_cmd) {
      ABox r = evolve(inst.tbox, inst.abox, parse_facts(plus), parse_facts(minus_facts));
      std::cout << r.str() << "\n";
      emit(g, Json{{"abox", abox_json(r)}});
      return 0;
    }
    if (*build_cmd) {
      TransitionSystem ts = build(inst, semantics, as_kab, lim);
      dump(g, ts);
      std::cout << ts.states.size() << " states, " << ts.edges.size() << " edges\n";
      emit(g, Json{{"states", ts.states.size()}, {"edges", ts.edges.size()}});
      return 0;
    }
    if (*compile) {
      Instance out;
      auto formulas = [&](const std::string& kind) {
        for (const auto& [n, f] : inst.formulas)
          out.formulas.emplace_back(n, kind.empty() ? f : translate_formula(kind, f));
      };
      BRepairStrategy st = strategy == "keep" ? BRepairStrategy::KeepOne : BRepairStrategy::DeleteOneSide;
      if (target == "sgkab-from-skab") {
        if (!inst.process) throw ValidationError("instance has no process");
        out = from_gkab(tkabs(inst.kab()));
        formulas("");
      } else if (target == "sgkab-from-b") {
        out = from_gkab(tgkabb(inst.gkab(), st));
        formulas("b");
      } else if (target == "sgkab-from-c") {
        out = from_gkab(tgkabc(inst.gkab()));
        formulas("d");
      } else if (target == "sgkab-from-e") {
        out = from_gkab(tgkabe(inst.gkab()));
        formulas("d");
      } else {
        out = from_kab(tgkab(inst.gkab(), g.seed));
        formulas("j");
      }
      if (target != "sgkab-from-skab" && inst.process && !inst.program)
        std::cerr << "warning: instance has no program; translating the empty program\n";
      out.services = inst.services;
      out.limits = inst.limits;
      std::string text = serialize(out);
      if (out_file.empty()) {
        std::cout << text;
      } else {
        write_file(out_file, text);
      }
      emit(g, Json{{"target", target}, {"actions", out.actions.size()}});
      return 0;
    }
    if (*verify) {
      MuPtr f = inst.formula(formula);
      TransitionSystem ts = build(inst, semantics, as_kab, lim);
      dump(g, ts);
      bool ok = model_check(ts, f);
      std::cout << (ok ? "true" : "false") << "\n";
      emit(g, Json{{"formula", formula}, {"semantics", semantics}, {"verdict", ok}, {"states", ts.states.size()}});
      return ok ? 0 : 1;
    }
    if (*tf) {
      MuPtr f = translate_formula(tkind, inst.formula(formula));
      std::cout << to_string(*f) << "\n";
      emit(g, Json{{"kind", tkind}, {"formula", to_string(*f)}});
      return 0;
    }
  } catch (const StateLimitExceeded& e) {
    std::cerr << "resource limit: " << e.what() << "\n";
    return 3;
  } catch (const RunBoundExceeded& e) {
    std::cerr << "resource limit: " << e.what() << "\n";
    return 3;
  } catch (const CombinatorialLimit& e) {
    std::cerr << "resource limit: " << e.what() << "\n";
    return 3;
  } catch (const RewriteBlowup& e) {
    std::cerr << "resource limit: " << e.what() << "\n";
    return 3;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const ValidationError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 2;
  } catch (const NonDomainIndependent& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 2;
  } catch (const NonMonotoneFixpoint& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 2;
  } catch (const VocabularyCollision& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 2;
  } catch (const SaturationDerivedUnsat& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
