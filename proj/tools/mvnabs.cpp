// mvnabs: multi-valued network analysis and abstraction checking.
//
// Exit codes: 0 success / property holds, 1 property refuted,
// 2 input or usage error (one line on stderr).

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "mvn/model_io.hpp"
#include "mvn/report.hpp"

namespace fs = std::filesystem;
using namespace mvn;

namespace {

constexpr int kHolds = 0;
constexpr int kRefuted = 1;
constexpr int kInputError = 2;

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Mvn load_model(const std::string& path) {
  try {
    return parse_model(read_text_file(path));
  } catch (const std::exception& e) {
    throw InputError(path + ": " + e.what());
  }
}

AbstractionMapping load_mapping(const std::string& path, const Mvn& concrete) {
  try {
    return parse_mapping(read_text_file(path), concrete);
  } catch (const std::exception& e) {
    throw InputError(path + ": " + e.what());
  }
}

void print_warnings(const AbstractionMapping& phi) {
  for (const auto& w : phi.warnings()) std::cerr << "warning: " << w << '\n';
}

std::string join(const std::vector<StateId>& states, const StateSpace& space, LabelStyle style) {
  std::string out;
  for (std::size_t i = 0; i < states.size(); ++i) out += (i ? " " : "") + space.label(states[i], style);
  return out;
}

std::string format_trace(const LassoTrace& t, const StateSpace& space, LabelStyle style) {
  std::string out = join(t.prefix, space, style);
  if (!t.loop.empty()) out += (out.empty() ? "(" : " (") + join(t.loop, space, style) + ")^w";
  return out;
}

std::string format_gamma(const StateSet& gamma, const StateSpace& space, LabelStyle style) {
  return "{" + join(gamma, space, style) + "}";
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << content;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-valued network analysis and asynchronous abstraction checking"};
  app.require_subcommand(1);
  app.fallthrough();
  bool named = false;
  app.add_flag("--labels", named, "Print named levels (Entity=level) instead of digit strings");

  std::function<int()> action;
  auto style = [&] { return named ? LabelStyle::kNamed : LabelStyle::kDigits; };

  std::string model_path, map_path, abstract_path, concrete_path, out_path, semantics_name = "async";
  bool json = false;

  auto* validate_cmd = app.add_subcommand("validate", "Check a model for structural errors");
  validate_cmd->add_option("model", model_path, "Model file")->required();
  validate_cmd->callback([&] {
    action = [&] {
      Mvn model;
      try {
        model = parse_model_document(read_text_file(model_path));
      } catch (const std::exception& e) {
        throw InputError(model_path + ": " + e.what());
      }
      const auto diags = validate(model);
      for (const auto& d : diags) std::cout << d.to_string() << '\n';
      if (!diags.empty()) {
        std::cerr << "mvnabs: " << model_path << ": " << diags.size() << " diagnostic(s)\n";
        return kInputError;
      }
      std::cout << "ok: " << model.name << ", " << model.entities.size() << " entities, " << state_space_size(model)
                << " states\n";
      return kHolds;
    };
  });

  auto* graph_cmd = app.add_subcommand("graph", "Build the state graph; print edges or write DOT");
  graph_cmd->add_option("model", model_path, "Model file")->required();
  graph_cmd->add_option("--semantics", semantics_name, "sync or async")->capture_default_str();
  graph_cmd->add_option("--dot", out_path, "Write a Graphviz file ('-' for stdout)");
  graph_cmd->callback([&] {
    action = [&] {
      const Network net(load_model(model_path));
      const StateGraph g = build_state_graph(net, parse_semantics(semantics_name));
      if (out_path == "-") {
        std::cout << export_dot(g, net.name(), style());
      } else if (!out_path.empty()) {
        write_file(out_path, export_dot(g, net.name(), style()));
      } else {
        for (StateId s = 0; s < g.size(); ++s)
          for (auto t : g.successors(s))
            std::cout << g.space().label(s, style()) << " -> " << g.space().label(t, style()) << '\n';
      }
      return kHolds;
    };
  });

  auto* attr_cmd = app.add_subcommand("attractors", "List attractors");
  attr_cmd->add_option("model", model_path, "Model file")->required();
  attr_cmd->add_option("--semantics", semantics_name, "sync or async")->capture_default_str();
  attr_cmd->add_flag("--json", json, "JSON output");
  attr_cmd->callback([&] {
    action = [&] {
      const Network net(load_model(model_path));
      const AttractorSet set = attractors(build_state_graph(net, parse_semantics(semantics_name)));
      if (json) {
        std::cout << to_json(set, net.space(), style()).dump(2) << '\n';
        return kHolds;
      }
      for (const auto& a : set.attractors) {
        std::cout << to_string(a.kind) << ' ' << join(a.states, net.space(), style());
        if (!a.terminal) std::cout << " (non-terminal, " << a.exit_edges << " exit edges)";
        std::cout << '\n';
      }
      return kHolds;
    };
  });

  auto* traces_cmd = app.add_subcommand("traces", "Enumerate the trace set as lassos");
  traces_cmd->add_option("model", model_path, "Model file")->required();
  traces_cmd->add_option("--semantics", semantics_name, "sync or async")->capture_default_str();
  traces_cmd->add_flag("--json", json, "JSON output");
  traces_cmd->callback([&] {
    action = [&] {
      const Network net(load_model(model_path));
      const StateGraph g = build_state_graph(net, parse_semantics(semantics_name));
      const TraceSet traces = g.semantics() == Semantics::kSync ? sync_traces(g) : async_traces(g);
      if (json) {
        std::cout << to_json(traces, net.space(), style()).dump(2) << '\n';
      } else {
        for (const auto& t : traces) std::cout << format_trace(t, net.space(), style()) << '\n';
      }
      return kHolds;
    };
  });

  bool show_traces = false, show_states = false;
  auto* abstract_cmd = app.add_subcommand("abstract", "Apply an abstraction mapping");
  abstract_cmd->add_option("model", model_path, "Concrete model file")->required();
  abstract_cmd->add_option("map", map_path, "Mapping file")->required();
  auto* traces_flag = abstract_cmd->add_flag("--traces", show_traces, "Abstracted async trace set");
  abstract_cmd->add_flag("--states", show_states, "Image of every concrete state")->excludes(traces_flag);
  abstract_cmd->add_flag("--json", json, "JSON output (with --traces)");
  abstract_cmd->callback([&] {
    action = [&] {
      const Network net(load_model(model_path));
      const AbstractionMapping phi = load_mapping(map_path, net.model());
      print_warnings(phi);
      const auto& conc = net.space();
      const auto& abs = phi.abstract_space();
      if (!show_traces) {
        for (StateId s = 0; s < conc.size(); ++s)
          std::cout << conc.label(s, style()) << " -> " << abs.label(phi.apply(s), style()) << '\n';
        return kHolds;
      }
      const TraceSet image = abstract_trace_set(phi, async_traces(build_state_graph(net, Semantics::kAsync)));
      if (json) {
        std::cout << to_json(image, abs, style()).dump(2) << '\n';
      } else {
        for (const auto& t : image) std::cout << format_trace(t, abs, style()) << '\n';
      }
      return kHolds;
    };
  });

  auto* cand_cmd = app.add_subcommand("candidates", "Enumerate candidate abstract models");
  cand_cmd->add_option("model", model_path, "Concrete model file")->required();
  cand_cmd->add_option("map", map_path, "Mapping file")->required();
  cand_cmd->add_option("--out-dir", out_path, "Write one model file per candidate");
  cand_cmd->callback([&] {
    action = [&] {
      const Network net(load_model(model_path));
      const AbstractionMapping phi = load_mapping(map_path, net.model());
      print_warnings(phi);
      const CandidateSet set = enumerate_candidates(net, phi);
      const auto ambiguous = set.ambiguous_rows();
      std::cout << set.candidates.size() << " candidate(s), " << ambiguous.size() << " ambiguous row(s)\n";
      for (const auto& row : ambiguous) {
        std::cout << "  " << net.model().entities[row.entity].name << " (";
        for (std::size_t i = 0; i < row.inputs.size(); ++i) std::cout << (i ? " " : "") << unsigned{row.inputs[i]};
        std::cout << ") -> {";
        for (std::size_t i = 0; i < row.choices.size(); ++i) std::cout << (i ? "," : "") << unsigned{row.choices[i]};
        std::cout << "}\n";
      }
      if (!out_path.empty()) {
        fs::create_directories(out_path);
        for (std::size_t i = 0; i < set.candidates.size(); ++i) {
          const auto& cand = set.candidates[i];
          const fs::path file = fs::path(out_path) / (cand.name + ".mvn");
          write_file(file, serialize_model(cand, "candidate " + std::to_string(i) + " of " + net.name() +
                                                     " under " + fs::path(map_path).filename().string()));
          std::cout << file.string() << '\n';
        }
      }
      return kHolds;
    };
  });

  bool witness = false, closed_class = false;
  auto* check_cmd = app.add_subcommand("check", "Decide whether the abstract model is an async abstraction");
  check_cmd->add_option("abstract", abstract_path, "Abstract model file")->required();
  check_cmd->add_option("concrete", concrete_path, "Concrete model file")->required();
  check_cmd->add_option("map", map_path, "Mapping file")->required();
  check_cmd->add_flag("--witness", witness, "Explain a failure, or show the surviving step terms");
  check_cmd->add_flag("--json", json, "JSON report");
  check_cmd->add_flag("--closed-class", closed_class,
                      "Point attractors need exit-free consecutive classes for every member of Gamma");
  check_cmd->callback([&] {
    action = [&] {
      const Network abs(load_model(abstract_path));
      const Network conc(load_model(concrete_path));
      const AbstractionMapping phi = load_mapping(map_path, conc.model());
      print_warnings(phi);
      CheckOptions options;
      options.rule = closed_class ? ValidityRule::kClosedClass : ValidityRule::kStuckRun;
      const AbstractionChecker checker(abs, conc, phi);
      const CheckResult result = checker.run(options);
      const auto& as = abs.space();
      const auto& cs = conc.space();
      if (json) {
        std::cout << to_json(result, as, cs, style()).dump(2) << '\n';
        return result.holds ? kHolds : kRefuted;
      }
      std::cout << abs.name() << (result.holds ? " is " : " is not ") << "an asynchronous abstraction of "
                << conc.name() << '\n';
      if (result.witness) {
        const auto& w = *result.witness;
        std::cout << "no step term survives for " << as.label(w.emptied_state, style())
                  << (w.empty_at_start ? " (none valid initially)" : "") << '\n';
        if (witness) {
          for (const auto& link : w.chain) {
            std::cout << "  " << as.label(link.state, style()) << ' ' << format_gamma(link.gamma, cs, style());
            if (link.failed_successor)
              std::cout << ": successor " << as.label(*link.failed_successor, style()) << " needs "
                        << format_gamma(link.successor_gamma, cs, style()) << ", which was removed\n";
            else
              std::cout << ": " << to_string(link.initial_status) << '\n';
          }
        }
      } else if (witness) {
        for (const auto& [state, family] : result.surviving) {
          std::cout << "  " << as.label(state, style()) << ':';
          for (const auto& gamma : family) std::cout << ' ' << format_gamma(gamma, cs, style());
          std::cout << '\n';
        }
      }
      const auto& st = result.stats;
      std::cout << "terms: " << st.initial_terms << " initial, " << st.removed_terms << " removed, "
                << st.iterations << " passes\n";
      return result.holds ? kHolds : kRefuted;
    };
  });

  auto* oracle_cmd = app.add_subcommand("oracle-check", "Decide abstraction by explicit trace-set inclusion");
  oracle_cmd->add_option("abstract", abstract_path, "Abstract model file")->required();
  oracle_cmd->add_option("concrete", concrete_path, "Concrete model file")->required();
  oracle_cmd->add_option("map", map_path, "Mapping file")->required();
  oracle_cmd->callback([&] {
    action = [&] {
      const Network abs(load_model(abstract_path));
      const Network conc(load_model(concrete_path));
      const AbstractionMapping phi = load_mapping(map_path, conc.model());
      const bool holds = oracle_check(abs, conc, phi);
      std::cout << "trace inclusion " << (holds ? "holds" : "fails") << '\n';
      return holds ? kHolds : kRefuted;
    };
  });

  std::uint64_t seed = 1;
  std::size_t count = 200;
  auto* fuzz_cmd = app.add_subcommand("fuzz", "Differential test of the checker against the oracle");
  fuzz_cmd->add_option("--seed", seed, "Suite seed")->capture_default_str();
  fuzz_cmd->add_option("--count", count, "Number of random instances")->capture_default_str();
  fuzz_cmd->add_flag("--closed-class", closed_class, "Use the closed-class validity rule");
  fuzz_cmd->add_flag("--json", json, "JSON report");
  fuzz_cmd->callback([&] {
    action = [&] {
      const auto report =
          differential_suite(seed, count, closed_class ? ValidityRule::kClosedClass : ValidityRule::kStuckRun);
      if (json) {
        std::cout << to_json(report).dump(2) << '\n';
      } else {
        std::cout << "instances: " << report.count << ", oracle-decided: " << report.supported
                  << " (holds " << report.holds << "), infinite: " << report.unsupported << " (holds "
                  << report.unsupported_holds << ")"
                  << ", divergences: " << report.divergences.size() << '\n';
        for (const auto& d : report.divergences)
          std::cout << "--- instance " << d.index << " (seed " << d.instance_seed << "): checker " << d.checker
                    << ", oracle " << d.oracle << "\n" << d.abstract_source << d.concrete_source << d.mapping_source;
      }
      return report.ok() ? kHolds : kRefuted;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "mvnabs: " << e.what() << '\n';
    return kInputError;
  }

  try {
    return action();
  } catch (const std::exception& e) {
    std::string message = e.what();
    std::replace(message.begin(), message.end(), '\n', ' ');
    std::cerr << "mvnabs: " << message << '\n';
    return kInputError;
  }
}
