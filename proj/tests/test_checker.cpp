#include <doctest.h>

#include <functional>

#include "mvn/oracle.hpp"
#include "support.hpp"

using namespace mvn;
using support::ids;

namespace {

struct Fixture {
  Network abstract_net;
  Network concrete_net;
  AbstractionMapping phi;
};

Fixture phage() {
  Mvn pl2 = support::load("pl2.mvn");
  auto phi = support::load_map("cro.map", pl2);
  return {Network(support::load("apl2.mvn")), Network(pl2), phi};
}

// Trace inclusion holds, but an abstract point attractor is realised only
// through a concrete class that also has an exit.
Fixture closed_class_counterexample() {
  Mvn concrete = parse_model(R"(mvn C
entity X : 0..2
entity Y : 0..1
neighbourhood X = [X, Y]
neighbourhood Y = [X]
table X:
  0 0 -> 2
  0 1 -> 0
  1 0,1 -> 1
  2 0,1 -> 1
table Y:
  0 -> 1
  1 -> 0
  2 -> 1
)");
  Mvn abstract = parse_model(R"(mvn A
entity X : 0..1
entity Y : 0..1
neighbourhood X = [X, Y]
neighbourhood Y = [X]
table X:
  0 0,1 -> 0
  1 0 -> 0
  1 1 -> 1
table Y:
  0 -> 0
  1 -> 1
)");
  auto phi = parse_mapping("X: 0->1, 1->0, 2->0", concrete);
  return {Network(abstract), Network(concrete), phi};
}

std::vector<Path> abstract_paths(const StateGraph& g, std::size_t max_len) {
  std::vector<Path> out;
  Path p;
  std::function<void(StateId)> go = [&](StateId s) {
    p.push_back(s);
    out.push_back(p);
    if (p.size() < max_len)
      for (auto t : g.successors(s)) go(t);
    p.pop_back();
  };
  for (StateId s = 0; s < g.size(); ++s) go(s);
  return out;
}

}  // namespace

TEST_CASE("consecutive-duplicate closure") {
  auto f = phage();
  AbstractionChecker chk(f.abstract_net, f.concrete_net, f.phi);
  const auto& cs = f.concrete_net.space();
  CHECK(chk.consec_closure(cs.parse_label("01")) == ids(cs, {"01", "02"}));
  CHECK(chk.consec_closure(cs.parse_label("12")) == ids(cs, {"11", "12"}));
  CHECK(chk.consec_closure(cs.parse_label("11")) == ids(cs, {"11"}));
  CHECK(chk.concrete_class(f.abstract_net.space().parse_label("11")) == ids(cs, {"11", "12"}));
}

TEST_CASE("step terms") {
  auto f = phage();
  AbstractionChecker chk(f.abstract_net, f.concrete_net, f.phi);
  const auto& as = f.abstract_net.space();
  const auto& cs = f.concrete_net.space();
  const StateId s11 = as.parse_label("11");

  auto t = chk.make_step_term(s11, ids(cs, {"12"}));
  CHECK(t.valid());
  REQUIRE(t.successors.size() == 2);
  CHECK(t.successors[0].first == as.parse_label("01"));
  CHECK(t.successors[0].second == ids(cs, {"01", "02"}));
  CHECK(t.successors[1].first == as.parse_label("10"));
  CHECK(t.successors[1].second == ids(cs, {"10"}));

  t = chk.make_step_term(s11, ids(cs, {"11"}));
  CHECK(t.successors[0].second == ids(cs, {"01"}));

  CHECK_THROWS_AS(chk.make_step_term(s11, ids(cs, {"00"})), GammaOutOfClass);
  CHECK_THROWS_AS(chk.make_step_term(s11, {}), GammaOutOfClass);

  // 01 is an abstract point attractor; its class {01, 02} cycles forever.
  auto p = chk.make_step_term(as.parse_label("01"), ids(cs, {"01", "02"}));
  CHECK(p.valid());
  CHECK(p.successors.empty());

  CHECK(chk.all_step_terms(s11).size() == 3);
}

TEST_CASE("phage abstraction holds with the expected surviving family") {
  auto f = phage();
  AbstractionChecker chk(f.abstract_net, f.concrete_net, f.phi);
  const auto& as = f.abstract_net.space();
  const auto& cs = f.concrete_net.space();
  for (auto rule : {ValidityRule::kStuckRun, ValidityRule::kClosedClass}) {
    CheckOptions opt;
    opt.rule = rule;
    auto r = chk.run(opt);
    CHECK(r.holds);
    CHECK_FALSE(r.witness.has_value());
    CHECK(r.surviving.at(as.parse_label("00")) == std::vector<StateSet>{ids(cs, {"00"})});
    CHECK(r.surviving.at(as.parse_label("01")) ==
          std::vector<StateSet>{ids(cs, {"01"}), ids(cs, {"02"}), ids(cs, {"01", "02"})});
    CHECK(r.surviving.at(as.parse_label("11")).size() == 3);
    CHECK(r.stats.initial_terms == 8);
    CHECK(r.stats.removed_terms == 0);
    CHECK(r.stats.concrete_states == 6);
    CHECK(r.stats.max_class_size == 2);
  }
}

TEST_CASE("MTRP candidates: verdicts match both oracles") {
  Network mtrp(support::load("mtrp.mvn"));
  auto phi = support::load_map("trp.map", mtrp.model());
  auto set = enumerate_candidates(mtrp, phi);
  std::vector<bool> verdicts;
  for (const auto& cand : set.candidates) {
    Network a(cand);
    const bool v = check_asyn_abs(a, mtrp, phi).holds;
    verdicts.push_back(v);
    CHECK(v == subset_inclusion_check(a, mtrp, phi));
    std::optional<bool> lasso;
    try {
      lasso = oracle_check(a, mtrp, phi);
    } catch (const Unsupported&) {
    }
    if (lasso) CHECK(v == *lasso);
  }
  CHECK(verdicts == std::vector<bool>{true, false, false, false});
}

TEST_CASE("failure witnesses chain back to an invalid term") {
  Network mtrp(support::load("mtrp.mvn"));
  auto phi = support::load_map("trp.map", mtrp.model());
  auto set = enumerate_candidates(mtrp, phi);
  for (std::size_t i = 1; i < set.candidates.size(); ++i) {
    AbstractionChecker chk(Network(set.candidates[i]), mtrp, phi);
    auto r = chk.run();
    REQUIRE_FALSE(r.holds);
    REQUIRE(r.witness.has_value());
    const auto& chain = r.witness->chain;
    REQUIRE_FALSE(chain.empty());
    CHECK(chain.front().state == r.witness->emptied_state);
    for (std::size_t j = 0; j + 1 < chain.size(); ++j) {
      REQUIRE(chain[j].failed_successor.has_value());
      CHECK(*chain[j].failed_successor == chain[j + 1].state);
      CHECK(chain[j].successor_gamma == chain[j + 1].gamma);
      CHECK(chain[j].initial_status == TermStatus::kValid);
    }
    CHECK_FALSE(chain.back().failed_successor.has_value());
    CHECK(chain.back().initial_status != TermStatus::kValid);
    CHECK_THROWS_AS(chk.witness_path(r, {0}), NotClosed);
  }
}

TEST_CASE("closed-class rule rejects a valid abstraction") {
  auto f = closed_class_counterexample();
  CHECK(oracle_check(f.abstract_net, f.concrete_net, f.phi));
  CHECK(subset_inclusion_check(f.abstract_net, f.concrete_net, f.phi));
  CheckOptions closed;
  closed.rule = ValidityRule::kClosedClass;
  CHECK_FALSE(check_asyn_abs(f.abstract_net, f.concrete_net, f.phi, closed).holds);
  CHECK(check_asyn_abs(f.abstract_net, f.concrete_net, f.phi).holds);
}

TEST_CASE("witness paths realise abstract paths") {
  auto f = phage();
  AbstractionChecker chk(f.abstract_net, f.concrete_net, f.phi);
  auto r = chk.run();
  REQUIRE(r.holds);
  for (const auto& path : abstract_paths(chk.abstract_graph(), 4)) {
    Path alpha = chk.witness_path(r, path);
    Path image;
    for (auto c : alpha)
      if (image.empty() || image.back() != f.phi.apply(c)) image.push_back(f.phi.apply(c));
    CHECK(image == path);
    for (std::size_t i = 0; i + 1 < alpha.size(); ++i) CHECK(chk.concrete_graph().has_edge(alpha[i], alpha[i + 1]));
  }
  const auto& as = f.abstract_net.space();
  CHECK_THROWS_AS(chk.witness_path(r, {as.parse_label("00"), as.parse_label("11")}), std::invalid_argument);
  CHECK_THROWS_AS(chk.witness_path(r, {}), std::invalid_argument);
}

TEST_CASE("pruning is order independent and bounded") {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    auto inst = random_instance(seed);
    AbstractionChecker chk(Network(inst.abstract_model), Network(inst.concrete_model), inst.phi);
    CheckOptions base;
    base.stop_on_empty = false;
    auto reference = chk.run(base);
    CHECK(reference.stats.iterations <= reference.stats.initial_terms + 1);
    CHECK(chk.run().holds == reference.holds);
    for (std::uint64_t shuffle : {1u, 2u, 3u}) {
      CheckOptions opt = base;
      opt.shuffle_seed = shuffle;
      auto r = chk.run(opt);
      CHECK(r.holds == reference.holds);
      CHECK(r.surviving == reference.surviving);
      CHECK(r.stats.iterations <= r.stats.initial_terms + 1);
    }
  }
}

TEST_CASE("class size limit") {
  auto f = phage();
  CHECK_THROWS_AS(AbstractionChecker(f.abstract_net, f.concrete_net, f.phi, 1), CheckerLimit);
  CHECK_NOTHROW(AbstractionChecker(f.abstract_net, f.concrete_net, f.phi, 2));
}

TEST_CASE("rule and status names") {
  CHECK(to_string(ValidityRule::kStuckRun) == "stuck-run");
  CHECK(to_string(ValidityRule::kClosedClass) == "closed-class");
  CHECK(to_string(TermStatus::kMissingSuccessor) == "missing-successor");
}
