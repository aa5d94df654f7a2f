#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "stx/decompose.hpp"
#include "stx/fixtures.hpp"
#include "stx/process.hpp"

using namespace stx;

namespace {

SequenceDistribution coin_pair_joint(int horizon, bool latents = false) {
  TransducerNetwork net;
  net.nodes.push_back({"a", fixtures::fair_coin(), {}});
  net.nodes.push_back({"b", fixtures::fair_coin(), {}});
  return joint_process(net, {}, horizon, latents);
}

// Two noisy observations of one persistent hidden bit: neither observable can
// be transduced from the other without access to the shared latent.
SequenceDistribution entangled_pair_joint(int horizon) {
  SequenceDistribution d;
  d.horizon = horizon;
  d.processes = {{"A", binary_alphabet(), Role::Observable},
                 {"B", binary_alphabet(), Role::Observable}};
  for (int r = 0; r < 2; ++r)
    for (const auto& as : oracles::all_sequences(2, horizon))
      for (const auto& bs : oracles::all_sequences(2, horizon)) {
        double p = 0.5;
        for (int t = 0; t < horizon; ++t) {
          p *= as[t] == r ? 0.75 : 0.25;
          p *= bs[t] == r ? 0.75 : 0.25;
        }
        std::vector<int> key = as;
        key.insert(key.end(), bs.begin(), bs.end());
        d.table[key] += p;
      }
  return d;
}

SequenceDistribution time_reversed_copy_joint() {
  // H = 2; Y is X read backwards, X IID uniform. Anticipatory in both
  // directions, hence prime.
  SequenceDistribution d;
  d.horizon = 2;
  d.processes = {{"X", binary_alphabet(), Role::Observable},
                 {"Y", binary_alphabet(), Role::Observable}};
  for (int x0 = 0; x0 < 2; ++x0)
    for (int x1 = 0; x1 < 2; ++x1) d.table[{x0, x1, x1, x0}] = 0.25;
  return d;
}

std::vector<std::string> module_of(const DecompositionResult& res, const std::string& id) {
  for (const auto& m : res.modules)
    for (const auto& o : m.observables)
      if (o == id) return m.observables;
  return {};
}

int module_index(const DecompositionResult& res, const std::string& id) {
  for (std::size_t i = 0; i < res.modules.size(); ++i)
    for (const auto& o : res.modules[i].observables)
      if (o == id) return static_cast<int>(i);
  return -1;
}

}  // namespace

TEST_CASE("is_prime_with_latents: independent coins split") {
  const auto d = coin_pair_joint(3, true);
  CHECK_FALSE(is_prime_with_latents(d, {"a", "b"}, {"a.R", "b.R"}, 3));
}

TEST_CASE("is_prime_with_latents: single process is prime") {
  const auto d = coin_pair_joint(3, true);
  CHECK(is_prime_with_latents(d, {"a"}, {"a.R"}, 3));
}

TEST_CASE("is_prime_with_latents: entangled pair with latents withheld is prime") {
  const auto d = entangled_pair_joint(3);
  CHECK(is_prime_with_latents(d, {"A", "B"}, {}, 3));
  CHECK(is_prime_observable(d, {"A", "B"}, 3));
}

TEST_CASE("decompose_with_latents: two-node chain recovers the causal order") {
  std::mt19937_64 rng(41);
  const TransducerNetwork net = fixtures::random_network(rng, {2, 2, {{}, {0}}});
  const auto d = joint_process(net, {}, 4, /*include_latents=*/true);
  const auto res = decompose_with_latents(d, {"n0", "n1"}, {"n0.R", "n1.R"}, 4);
  REQUIRE(res.modules.size() == 2);
  CHECK(module_index(res, "n0") < module_index(res, "n1"));
  // soundness: every peeled boundary re-checks below tolerance
  for (std::size_t i = 1; i < res.modules.size(); ++i)
    CHECK(res.modules[i].residual <= kDefaultTol);
}

TEST_CASE("decompose_with_latents: independent pair gives two singleton modules") {
  const auto d = coin_pair_joint(3, true);
  const auto res = decompose_with_latents(d, {"a", "b"}, {"a.R", "b.R"}, 3);
  REQUIRE(res.modules.size() == 2);
  CHECK(res.modules[0].observables.size() == 1);
  CHECK(res.modules[1].observables.size() == 1);
  // deterministic tie-break: the first listed process peels first, landing last
  CHECK(res.modules[1].observables[0] == "a");
  CHECK(res.modules[0].observables[0] == "b");
}

TEST_CASE("decompose_with_latents: prime joint stays in one module") {
  const auto d = entangled_pair_joint(3);
  const auto res = decompose_with_latents(d, {"A", "B"}, {}, 3);
  REQUIRE(res.modules.size() == 1);
  CHECK(res.modules[0].observables == std::vector<std::string>{"A", "B"});
  CHECK(res.mode == "intransducibility");
}

TEST_CASE("decompose_observable: 3-node chain recovers the ancestor order") {
  std::mt19937_64 rng(42);
  const TransducerNetwork net = fixtures::random_chain3(rng);
  const auto d0 = joint_process(net, {{"ext", {{0.5, 0.5}, {}}}}, 4);
  const auto d = marginalize(d0, {"n0", "n1", "n2"});
  const auto res = decompose_observable(d, {"n0", "n1", "n2"}, 4);
  CHECK(res.mode == "acausality");
  // ancestors must not appear after descendants
  CHECK(module_index(res, "n0") <= module_index(res, "n1"));
  CHECK(module_index(res, "n1") <= module_index(res, "n2"));
  // soundness: re-check each boundary independently
  std::vector<std::string> upstream;
  for (std::size_t i = 0; i < res.modules.size(); ++i) {
    if (i > 0)
      CHECK(acausality(d, upstream, res.modules[i].observables, 4).total_bits <=
            kDefaultTol);
    for (const auto& id : res.modules[i].observables) upstream.push_back(id);
  }
}

TEST_CASE("decompose_observable: IID pair in tie-break order") {
  const auto d = coin_pair_joint(3);
  const auto res = decompose_observable(d, {"a", "b"}, 3);
  REQUIRE(res.modules.size() == 2);
  CHECK(res.modules[0].observables == std::vector<std::string>{"b"});
  CHECK(res.modules[1].observables == std::vector<std::string>{"a"});
}

TEST_CASE("decompose_observable: time-reversed copy is prime") {
  const auto d = time_reversed_copy_joint();
  CHECK(acausality(d, {"X"}, {"Y"}, 2).total_bits > 0.5);
  CHECK(acausality(d, {"Y"}, {"X"}, 2).total_bits > 0.5);
  const auto res = decompose_observable(d, {"X", "Y"}, 2);
  REQUIRE(res.modules.size() == 1);
}

TEST_CASE("decomposition results partition the inputs") {
  std::mt19937_64 rng(43);
  // horizon 2 keeps the latent-path table small; the partition invariant does
  // not depend on the horizon
  const TransducerNetwork net = fixtures::random_chain3(rng);
  const auto d = joint_process(net, {{"ext", {{0.5, 0.5}, {}}}}, 2, true);
  const auto res =
      decompose_with_latents(d, {"n0", "n1", "n2"}, {"n0.R", "n1.R", "n2.R"}, 2);
  std::set<std::string> obs, lat;
  for (const auto& m : res.modules) {
    for (const auto& o : m.observables) CHECK(obs.insert(o).second);
    for (const auto& l : m.latents) CHECK(lat.insert(l).second);
  }
  CHECK(obs == std::set<std::string>{"n0", "n1", "n2"});
  for (const auto& l : res.unassigned_latents) CHECK(res.modules[0].latents.end() !=
      std::find(res.modules[0].latents.begin(), res.modules[0].latents.end(), l));
}

TEST_CASE("dependency_graph: dense chain has all three edges") {
  std::mt19937_64 rng(44);
  const TransducerNetwork net = fixtures::random_chain3(rng);
  const auto d0 = joint_process(net, {{"ext", {{0.5, 0.5}, {}}}}, 4);
  const auto d = marginalize(d0, {"n0", "n1", "n2"});
  const auto res = decompose_observable(d, {"n0", "n1", "n2"}, 4);
  REQUIRE(res.modules.size() == 3);
  const auto edges = dependency_graph(res, d, 4);
  CHECK(edges.size() == 3);  // 0->1, 0->2, 1->2 in module indices
}

TEST_CASE("dependency_graph: independent pair has no edges") {
  const auto d = coin_pair_joint(3);
  const auto res = decompose_observable(d, {"a", "b"}, 3);
  CHECK(dependency_graph(res, d, 3).empty());
}

TEST_CASE("dependency_graph: skipped ancestor has no direct edge") {
  // pure series chain n0 -> n1 -> n2; n2 never reads n0 directly
  std::mt19937_64 rng(45);
  const TransducerNetwork net = fixtures::random_network(rng, {3, 2, {{}, {0}, {1}}});
  const auto d = joint_process(net, {}, 4);
  const auto res = decompose_observable(d, {"n0", "n1", "n2"}, 4);
  REQUIRE(res.modules.size() == 3);
  REQUIRE(module_of(res, "n0") == std::vector<std::string>{"n0"});
  const auto edges = dependency_graph(res, d, 4);
  const int i0 = module_index(res, "n0");
  const int i2 = module_index(res, "n2");
  for (const auto& [a, b] : edges) CHECK_FALSE((a == i0 && b == i2));
  // but the adjacent links are present
  const int i1 = module_index(res, "n1");
  CHECK(std::find(edges.begin(), edges.end(), std::make_pair(i0, i1)) != edges.end());
  CHECK(std::find(edges.begin(), edges.end(), std::make_pair(i1, i2)) != edges.end());
}

TEST_CASE("search guards trip loudly") {
  const auto d = coin_pair_joint(2);
  std::vector<std::string> many;
  for (int i = 0; i < 13; ++i) many.push_back("p" + std::to_string(i));
  CHECK_THROWS_AS(decompose_observable(d, many, 2), GuardError);
}
