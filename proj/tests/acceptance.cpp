// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <chrono>
#include <iostream>
#include <set>
#include <sstream>

#include "mvn/oracle.hpp"
#include "support.hpp"

using namespace mvn;
using support::ids;
using support::lasso;

namespace {

struct Criterion {
  int number;
  std::string title;
  std::vector<std::string> failures;
  std::vector<std::string> notes;

  void expect(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
};

int failed = 0;

void report(const Criterion& c) {
  const bool pass = c.failures.empty();
  if (!pass) ++failed;
  std::cout << (pass ? "PASS " : "FAIL ") << c.number << ": " << c.title << "\n";
  for (const auto& f : c.failures) std::cout << "    failed: " << f << "\n";
  for (const auto& n : c.notes) std::cout << "    " << n << "\n";
}

template <typename F>
void run_criterion(int number, const std::string& title, F body) {
  Criterion c{number, title, {}, {}};
  try {
    body(c);
  } catch (const std::exception& e) {
    c.failures.push_back(std::string("exception: ") + e.what());
  }
  report(c);
}

using EdgeSet = std::set<std::pair<std::string, std::string>>;

std::vector<std::vector<StateId>> attractor_states(const AttractorSet& set) {
  std::vector<std::vector<StateId>> out;
  for (const auto& a : set.attractors) out.push_back(a.states);
  std::sort(out.begin(), out.end());
  return out;
}

struct Phage {
  Network pl2{support::load("pl2.mvn")};
  Network apl2{support::load("apl2.mvn")};
  AbstractionMapping phi = support::load_map("cro.map", pl2.model());
};

struct Trp {
  Network mtrp{support::load("mtrp.mvn")};
  Network atrp{support::load("atrp.mvn")};
  AbstractionMapping phi = support::load_map("trp.map", mtrp.model());
};

void semantics(Criterion& c) {
  Phage f;
  const EdgeSet async_expected{{"00", "01"}, {"00", "10"}, {"11", "01"}, {"11", "10"},
                               {"12", "02"}, {"12", "11"}, {"01", "02"}, {"02", "01"}};
  const EdgeSet sync_expected{{"00", "11"}, {"11", "00"}, {"10", "10"}, {"12", "01"}, {"01", "02"}, {"02", "01"}};
  c.expect(support::edge_labels(build_state_graph(f.pl2, Semantics::kAsync)) == async_expected, "async edges");
  c.expect(support::edge_labels(build_state_graph(f.pl2, Semantics::kSync)) == sync_expected, "sync edges");
  const auto& sp = f.pl2.space();
  c.expect(async_next(f.pl2, sp.parse_label("12")) == ids(sp, {"02", "11"}), "async successors of 12");
}

void traces(Criterion& c) {
  Phage f;
  const auto& cs = f.pl2.space();
  const auto& as = f.phi.abstract_space();
  const TraceSet listed{lasso(cs, {"00"}, {"01", "02"}), lasso(cs, {"10"}),
                        lasso(cs, {"00", "10"}),         lasso(cs, {"11"}, {"01", "02"}),
                        lasso(cs, {}, {"01", "02"}),     lasso(cs, {"11", "10"}),
                        lasso(cs, {}, {"02", "01"}),     lasso(cs, {"12"}, {"02", "01"})};
  const auto computed = async_traces(build_state_graph(f.pl2, Semantics::kAsync));
  c.expect(computed == listed, "async trace set equals the 8 listed traces (computed " +
                                   std::to_string(computed.size()) + ")");
  for (const auto& t : computed)
    if (!listed.contains(t)) {
      std::ostringstream s;
      s << "maximal trace outside the list: ";
      for (auto x : t.prefix) s << cs.label(x) << " ";
      if (!t.loop.empty()) {
        s << "(";
        for (auto x : t.loop) s << cs.label(x) << " ";
        s << ")^w";
      }
      c.notes.push_back(s.str());
    }
  const TraceSet abstracted{lasso(as, {"00", "01"}), lasso(as, {"00", "10"}), lasso(as, {"01"}),
                            lasso(as, {"10"}),       lasso(as, {"11", "01"}), lasso(as, {"11", "10"})};
  c.expect(abstract_trace_set(f.phi, computed) == abstracted, "abstracted trace set of the computed traces");
  c.expect(abstract_trace_set(f.phi, listed) == abstracted, "abstracted trace set of the listed traces");
}

void attractor_sets(Criterion& c) {
  Phage f;
  const auto& sp = f.pl2.space();
  auto sync = attractors(build_state_graph(f.pl2, Semantics::kSync));
  std::vector<std::vector<StateId>> sync_expected{ids(sp, {"10"}), ids(sp, {"00", "11"}), ids(sp, {"01", "02"})};
  std::sort(sync_expected.begin(), sync_expected.end());
  c.expect(attractor_states(sync) == sync_expected, "PL2 sync attractors");

  auto async = attractors(build_state_graph(f.pl2, Semantics::kAsync));
  bool async_ok = async.attractors.size() == 2;
  for (const auto& a : async.attractors) {
    if (a.kind == AttractorKind::kPoint) async_ok = async_ok && a.states == ids(sp, {"10"});
    else async_ok = async_ok && a.kind == AttractorKind::kScc && a.states == ids(sp, {"01", "02"});
  }
  c.expect(async_ok, "PL2 async attractors");

  Trp t;
  const auto& ms = t.mtrp.space();
  auto mtrp = attractors(build_state_graph(t.mtrp, Semantics::kAsync));
  std::vector<std::vector<StateId>> mtrp_expected{ids(ms, {"0000", "0001", "1000", "1001"}), ids(ms, {"0011"}),
                                                  ids(ms, {"0122"})};
  std::sort(mtrp_expected.begin(), mtrp_expected.end());
  c.expect(attractor_states(mtrp) == mtrp_expected, "MTRP async attractors");
  c.expect(state_space_size(t.mtrp.model()) == 36, "MTRP state space size");
}

void verdicts(Criterion& c) {
  Phage f;
  c.expect(check_asyn_abs(f.apl2, f.pl2, f.phi).holds, "APL2 abstracts PL2");

  Trp t;
  auto set = enumerate_candidates(t.mtrp, t.phi);
  c.expect(set.candidates.size() == 8,
           "exactly 8 MTRP candidates (enumerated " + std::to_string(set.candidates.size()) + ")");
  std::vector<std::size_t> passing;
  for (std::size_t i = 0; i < set.candidates.size(); ++i)
    if (check_asyn_abs(Network(set.candidates[i]), t.mtrp, t.phi).holds) passing.push_back(i);
  c.expect(passing.size() == 1, "exactly one candidate passes");
  c.expect(!passing.empty() && set.candidates[passing.front()].tables == t.atrp.model().tables,
           "the passing candidate is ATRP");
  c.expect(check_asyn_abs(t.atrp, t.mtrp, t.phi).holds, "ATRP abstracts MTRP");

  std::ostringstream rows;
  rows << "ambiguous rows: " << set.ambiguous_rows().size() << ", candidates: " << set.candidates.size()
       << ", passing: " << passing.size();
  c.notes.push_back(rows.str());

  const auto& as = t.atrp.space();
  auto a = attractors(build_state_graph(t.atrp, Semantics::kAsync));
  std::vector<std::vector<StateId>> expected{ids(as, {"0000", "0001", "1000", "1001"}), ids(as, {"0011"})};
  std::sort(expected.begin(), expected.end());
  c.expect(attractor_states(a) == expected, "ATRP async attractors are the 4-cycle and point 0011");
}

void oracle_agreement(Criterion& c) {
  Phage f;
  c.expect(oracle_check(f.apl2, f.pl2, f.phi) == check_asyn_abs(f.apl2, f.pl2, f.phi).holds, "APL2 verdict");

  Trp t;
  auto set = enumerate_candidates(t.mtrp, t.phi);
  std::size_t lasso_decided = 0;
  for (std::size_t i = 0; i < set.candidates.size(); ++i) {
    Network a(set.candidates[i]);
    const bool verdict = check_asyn_abs(a, t.mtrp, t.phi).holds;
    bool reference;
    try {
      reference = oracle_check(a, t.mtrp, t.phi);
      ++lasso_decided;
    } catch (const Unsupported&) {
      reference = subset_inclusion_check(a, t.mtrp, t.phi);
    }
    c.expect(verdict == reference, "MTRP candidate " + std::to_string(i));
  }
  c.notes.push_back("MTRP candidates decided by the lasso oracle: " + std::to_string(lasso_decided) + " of " +
                    std::to_string(set.candidates.size()) + ", the rest by the subset oracle");

  std::size_t supported = 0, total = 0, divergences = 0;
  for (std::uint64_t seed = 1; supported < 500 && seed < 20; ++seed) {
    auto r = differential_suite(seed, 1000);
    supported += r.supported;
    total += r.count;
    divergences += r.divergences.size();
  }
  c.expect(supported >= 500, "at least 500 instances with finite trace sets");
  c.expect(divergences == 0, std::to_string(divergences) + " divergences");
  c.notes.push_back("random instances: " + std::to_string(total) + ", finite trace sets: " + std::to_string(supported) +
                    ", divergences: " + std::to_string(divergences));
}

void abstraction_properties(Criterion& c) {
  Phage f;
  Trp t;
  auto p = reachability_soundness_suite(f.apl2, f.pl2, f.phi);
  auto q = reachability_soundness_suite(t.atrp, t.mtrp, t.phi);
  c.expect(p.ok(), "reachability soundness for APL2");
  c.expect(q.ok(), "reachability soundness for ATRP");
  c.expect(attractor_correspondence(f.apl2, f.pl2, f.phi).ok(), "attractor correspondence for APL2");
  c.expect(attractor_correspondence(t.atrp, t.mtrp, t.phi).ok(), "attractor correspondence for ATRP");
  c.notes.push_back("reachable pairs checked: " + std::to_string(p.pairs_checked) + " + " +
                    std::to_string(q.pairs_checked));
}

void procedure_properties(Criterion& c) {
  std::size_t holding = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    auto inst = random_instance(seed);
    AbstractionChecker chk(Network(inst.abstract_model), Network(inst.concrete_model), inst.phi);
    for (bool stop : {false, true}) {
      CheckOptions base;
      base.stop_on_empty = stop;
      auto reference = chk.run(base);
      c.expect(reference.stats.iterations <= reference.stats.initial_terms + 1,
               "iteration bound, instance " + std::to_string(seed));
      if (!stop && reference.holds) ++holding;
      for (std::uint64_t shuffle : {11u, 22u, 33u}) {
        CheckOptions opt = base;
        opt.shuffle_seed = shuffle;
        auto r = chk.run(opt);
        c.expect(r.holds == reference.holds, "verdict under shuffle, instance " + std::to_string(seed));
        if (!stop) c.expect(r.surviving == reference.surviving, "surviving family, instance " + std::to_string(seed));
        c.expect(r.stats.iterations <= r.stats.initial_terms + 1, "iteration bound, instance " + std::to_string(seed));
      }
    }
  }
  c.notes.push_back("instances holding: " + std::to_string(holding) + " of 100");
}

void round_trips(Criterion& c) {
  std::size_t traces_checked = 0;
  for (auto file : {"pl2.mvn", "apl2.mvn", "mtrp.mvn", "atrp.mvn"}) {
    Mvn m = support::load(file);
    const std::string text = serialize_model(m);
    Mvn again = parse_model(text);
    c.expect(again == m && serialize_model(again) == text, std::string("DSL round trip of ") + file);

    Network net(m);
    for (auto sem : {Semantics::kAsync, Semantics::kSync}) {
      auto g = build_state_graph(net, sem);
      if (sem == Semantics::kAsync && !trace_set_is_finite(g)) continue;
      const TraceSet set = sem == Semantics::kAsync ? async_traces(g) : sync_traces(g);
      for (const auto& t : set) {
        ++traces_checked;
        const auto canon = canonicalize(t);
        c.expect(canon == t && canonicalize(canon) == canon, std::string("canonical form in ") + file);
        const std::size_t horizon = 3 * (t.prefix.size() + t.loop.size()) + 4;
        const Path walk = unroll(t, horizon);
        bool edges = true;
        for (std::size_t i = 0; i + 1 < walk.size(); ++i) edges = edges && g.has_edge(walk[i], walk[i + 1]);
        c.expect(edges && unroll(canon, horizon) == walk && is_trace_of(g, t),
                 std::string("unrolled trace is a walk in ") + file);
      }
    }
  }
  for (auto [map, model] : {std::pair{"cro.map", "pl2.mvn"}, std::pair{"trp.map", "mtrp.mvn"}}) {
    Mvn m = support::load(model);
    auto phi = support::load_map(map, m);
    auto again = parse_mapping(serialize_mapping(phi), m);
    bool same = true;
    for (std::size_t e = 0; e < m.entities.size(); ++e) same = same && again.slot(e) == phi.slot(e);
    c.expect(same, std::string("mapping round trip of ") + map);
  }
  c.notes.push_back("traces checked: " + std::to_string(traces_checked));
}

}  // namespace

int main() {
  const auto start = std::chrono::steady_clock::now();
  run_criterion(1, "state graphs of PL2", semantics);
  run_criterion(2, "PL2 trace sets", traces);
  run_criterion(3, "attractors of PL2 and MTRP", attractor_sets);
  run_criterion(4, "abstraction verdicts and candidate enumeration", verdicts);
  run_criterion(5, "checker agrees with the trace oracles", oracle_agreement);
  run_criterion(6, "reachability soundness and attractor correspondence", abstraction_properties);
  run_criterion(7, "pruning order independence and iteration bound", procedure_properties);
  run_criterion(8, "DSL and trace round trips", round_trips);
  const auto secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::cout << (8 - failed) << "/8 criteria passed in " << secs << " s\n";
  return failed == 0 ? 0 : 1;
}
