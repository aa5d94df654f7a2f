#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "stx/fixtures.hpp"
#include "stx/process.hpp"

using namespace stx;

TEST_CASE("interface_eval: identity is a point mass on the input") {
  const auto dist = interface_eval(fixtures::identity(), std::vector<int>{0, 1});
  REQUIRE(dist.size() == 1);
  CHECK(dist.at({0, 1}) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("interface_eval: fair coin gives four equiprobable outputs") {
  const Transducer coin = fixtures::fair_coin(binary_alphabet());
  const auto dist = interface_eval(coin, std::vector<int>{1, 0});
  REQUIRE(dist.size() == 4);
  for (const auto& [ys, p] : dist) CHECK(p == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("interface_eval: delayed copy mixes only the first output") {
  const auto dist = interface_eval(fixtures::delayed_copy(), std::vector<int>{1, 0});
  // y_0 is the uniformly distributed stored bit; y_1 = x_0 = 1
  REQUIRE(dist.size() == 2);
  CHECK(dist.at({0, 1}) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(dist.at({1, 1}) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("interface_eval rejects out-of-alphabet symbols") {
  CHECK_THROWS_AS(interface_eval(fixtures::identity(), std::vector<int>{2}),
                  std::invalid_argument);
}

TEST_CASE("interface families are consistent across lengths") {
  std::mt19937_64 rng(21);
  for (int rep = 0; rep < 5; ++rep) {
    const Transducer t = fixtures::random_transducer(rng, 2, 3, 2);
    const Interface iface = interface_from_transducer(t, 3);
    CHECK(interface_consistency_residual(iface) < 1e-12);
    for (const auto& [xs, dist] : iface.table) {
      double mass = 0.0;
      for (const auto& [ys, p] : dist) mass += p;
      CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));
    }
  }
}

TEST_CASE("joint_process: single fair-coin node at horizon 2") {
  TransducerNetwork net;
  net.nodes.push_back({"c", fixtures::fair_coin(), {}});
  const auto d = joint_process(net, {}, 2, /*include_latents=*/true);
  // 4 output sequences, each 0.25; the single latent state contributes a
  // deterministic latent path of length 3
  REQUIRE(d.table.size() == 4);
  for (const auto& [key, p] : d.table) {
    CHECK(p == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(key.size() == 2 + 3);
  }
  CHECK(d.processes.size() == 2);
  CHECK(d.processes[1].role == Role::Latent);
}

TEST_CASE("joint_process: identity chain driven by uniform bits") {
  TransducerNetwork net;
  net.inputs.push_back({"x", binary_alphabet()});
  net.nodes.push_back({"a", fixtures::identity(), {"x"}});
  net.nodes.push_back({"b", fixtures::identity(), {"a"}});
  const auto d = joint_process(net, {{"x", {{0.5, 0.5}, {}}}}, 2);
  REQUIRE(d.table.size() == 4);
  for (const auto& [key, p] : d.table) {
    CHECK(p == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(key[0] == key[2]);  // a and b agree at t=0
    CHECK(key[1] == key[3]);  // and at t=1
  }
}

TEST_CASE("joint_process: random 2-node network matches the path-sum oracle") {
  std::mt19937_64 rng(22);
  const TransducerNetwork net = fixtures::random_network(rng, {2, 2, {{-1}, {0}}});
  const int H = 3;
  const auto d = joint_process(net, {{"ext", {{0.4, 0.6}, {}}}}, H);
  CHECK(d.total_mass() == doctest::Approx(1.0).epsilon(1e-9));
  for (const auto& a : oracles::all_sequences(2, H))
    for (const auto& b : oracles::all_sequences(2, H)) {
      double want = 0.0;
      for (const auto& xs : oracles::all_sequences(2, H)) {
        double px = 1.0;
        for (int x : xs) px *= x == 0 ? 0.4 : 0.6;
        want += px * oracles::network_lockstep_prob(net, {{"ext", xs}},
                                                    {{"n0", a}, {"n1", b}}, H);
      }
      std::vector<int> key = a;
      key.insert(key.end(), b.begin(), b.end());
      auto it = d.table.find(key);
      const double got = it == d.table.end() ? 0.0 : it->second;
      CHECK(std::abs(want - got) < 1e-12);
    }
}

TEST_CASE("joint_process: latents marginalized away equal the latent-free run") {
  std::mt19937_64 rng(23);
  const TransducerNetwork net = fixtures::random_chain3(rng);
  const auto with = joint_process(net, {{"ext", {{0.5, 0.5}, {}}}}, 3, true);
  const auto without = joint_process(net, {{"ext", {{0.5, 0.5}, {}}}}, 3, false);
  const auto marg = marginalize(with, {"n0", "n1", "n2"});
  CHECK(oracles::table_distance(marg.table, without.table) < 1e-12);
}

TEST_CASE("joint_process rejects bad horizons and missing drives") {
  TransducerNetwork net;
  net.inputs.push_back({"x", binary_alphabet()});
  net.nodes.push_back({"a", fixtures::identity(), {"x"}});
  CHECK_THROWS_AS(joint_process(net, {{"x", {{0.5, 0.5}, {}}}}, 0), std::invalid_argument);
  CHECK_THROWS_AS(joint_process(net, {}, 2), std::invalid_argument);
}

TEST_CASE("marginalize to the full roster is the identity") {
  std::mt19937_64 rng(24);
  const TransducerNetwork net = fixtures::random_network(rng, {2, 2, {{-1}, {0}}});
  const auto d = joint_process(net, {{"ext", {{0.5, 0.5}, {}}}}, 2);
  const auto m = marginalize(d, {"n0", "n1"});
  CHECK(oracles::table_distance(d.table, m.table) < 1e-15);
}

TEST_CASE("condition: identity chain pinned to one source sequence") {
  TransducerNetwork net;
  net.nodes.push_back({"a", fixtures::fair_coin(), {}});
  net.nodes.push_back({"b", fixtures::identity(), {"a"}});
  const auto d = joint_process(net, {}, 2);
  const auto c = condition(d, {{"a", {0, 1}}});
  REQUIRE(c.table.size() == 1);
  CHECK(c.table.at({0, 1, 0, 1}) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("condition then marginalize matches Bayes-rule arithmetic") {
  std::mt19937_64 rng(25);
  const TransducerNetwork net = fixtures::random_chain3(rng);
  const int H = 2;
  const auto d = joint_process(net, {{"ext", {{0.5, 0.5}, {}}}}, H);
  const std::vector<int> a{1, 0};
  const auto c = condition(d, {{"n0", a}});
  const auto cm = marginalize(c, {"n1", "n2"});
  // oracle: direct table arithmetic
  double mass = 0.0;
  std::map<std::vector<int>, double> want;
  for (const auto& [key, p] : d.table) {
    if (key[0] != a[0] || key[1] != a[1]) continue;
    mass += p;
    want[std::vector<int>(key.begin() + 2, key.end())] += p;
  }
  for (auto& [k, p] : want) p /= mass;
  CHECK(oracles::table_distance(cm.table, want) < 1e-12);
}

TEST_CASE("condition rejects zero-probability values") {
  TransducerNetwork net;
  net.nodes.push_back({"a", fixtures::alternator(singleton_alphabet()), {}});
  net.nodes.push_back({"b", fixtures::identity(), {"a"}});
  const auto d = joint_process(net, {}, 2);
  // the alternator with uniform phase never emits "00"
  CHECK_THROWS_AS(condition(d, {{"a", {0, 0}}}), std::invalid_argument);
}

TEST_CASE("feedback_joint: constant agent with an identity environment") {
  const Transducer env = fixtures::identity();
  const Transducer agent = fixtures::const_emitter(0, binary_alphabet(), binary_alphabet());
  Matrix init(2, 1);
  init.at(0, 0) = 1.0;  // X_0 = 0 with the agent's only latent state
  const auto d = feedback_joint(env, agent, init, 3);
  REQUIRE(d.table.size() == 1);
  CHECK(d.table.at({0, 0, 0, 0, 0, 0}) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("feedback_joint: coin-flipping agent with an identity environment") {
  const Transducer env = fixtures::identity();
  const Transducer agent = fixtures::fair_coin(binary_alphabet());
  Matrix init(2, 1);
  init.at(0, 0) = 0.5;
  init.at(1, 0) = 0.5;
  const int H = 3;
  const auto d = feedback_joint(env, agent, init, H);
  REQUIRE(d.table.size() == 8);  // 2^H equiprobable (x, x) pairs
  for (const auto& [key, p] : d.table) {
    CHECK(p == doctest::Approx(1.0 / 8.0).epsilon(1e-12));
    for (int i = 0; i < H; ++i) CHECK(key[i] == key[H + i]);
  }
}

TEST_CASE("feedback_joint agrees with the two-interface product route") {
  std::mt19937_64 rng(26);
  for (int rep = 0; rep < 5; ++rep) {
    const Transducer env = fixtures::random_transducer(rng, 2, 2, 2);
    const Transducer agent = fixtures::random_transducer(rng, 2, 2, 2);
    Matrix init(2, 2);
    const auto w = fixtures::random_dist(rng, 4);
    for (int x = 0; x < 2; ++x)
      for (int s = 0; s < 2; ++s) init.at(x, s) = w[x * 2 + s];
    const int H = 3;
    const auto loop = feedback_joint(env, agent, init, H);
    const auto prod = feedback_joint_product(env, agent, init, H);
    CHECK(loop.total_mass() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(oracles::table_distance(loop.table, prod.table) < 1e-12);
  }
}

TEST_CASE("feedback_joint rejects non-interlocking alphabets") {
  const Transducer env = fixtures::xor_pair();  // input is B x B
  const Transducer agent = fixtures::fair_coin(binary_alphabet());
  Matrix init(2, 1);
  init.at(0, 0) = 1.0;
  CHECK_THROWS_AS(feedback_joint(env, agent, init, 2), std::invalid_argument);
}
