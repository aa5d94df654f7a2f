#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "stx/fixtures.hpp"
#include "stx/process.hpp"
#include "stx/transducer.hpp"

using namespace stx;

TEST_CASE("alphabet indexing and products") {
  const Alphabet b = binary_alphabet();
  CHECK(b.size() == 2);
  CHECK(b.index_of("0") == 0);
  CHECK(b.index_of("1") == 1);
  CHECK_THROWS_AS(b.index_of("2"), std::invalid_argument);
  CHECK_THROWS_AS(Alphabet("bad", {"a", "a"}), std::invalid_argument);
  CHECK_THROWS_AS(Alphabet("bad", {}), std::invalid_argument);

  const Alphabet t("T", {"a", "b", "c"});
  const Alphabet p = product_alphabet(b, t);
  CHECK(p.size() == 6);
  // first factor most significant: index(x, y) = x * |T| + y
  CHECK(p.index_of("1,b") == 1 * 3 + 1);
  CHECK(p.symbols[0] == "0,a");
  CHECK(product_alphabet({}).size() == 1);
}

TEST_CASE("mixed-radix packing round-trips") {
  const std::vector<int> radices{2, 3, 4};
  for (std::size_t j = 0; j < 24; ++j) {
    const auto d = unpack_index(j, radices);
    CHECK(pack_index(d, radices) == j);
  }
  // first digit most significant
  CHECK(pack_index(std::vector<int>{1, 0, 0}, radices) == 12);
}

TEST_CASE("validate_transducer: identity is clean") {
  CHECK(validate_transducer(fixtures::identity()).empty());
}

TEST_CASE("validate_transducer: short row sum is reported with its residual") {
  Transducer t = fixtures::identity();
  t.kernel.at(0, 0, 0, 0) = 0.9;  // row (x=0, r=0) now sums to 0.9
  const auto v = validate_transducer(t);
  REQUIRE(v.size() == 1);
  CHECK(v[0].kind == "row_sum");
  CHECK(v[0].index[0] == 0);
  CHECK(v[0].index[1] == 0);
  CHECK(v[0].residual == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("validate_transducer: negative entry is reported") {
  Transducer t = fixtures::identity();
  t.kernel.at(1, 0, 0, 0) = -0.1;
  t.kernel.at(1, 0, 1, 0) = 1.1;  // keep the row sum at 1
  const auto v = validate_transducer(t);
  REQUIRE(v.size() == 1);
  CHECK(v[0].kind == "negative");
  CHECK(v[0].residual == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("validate_transducer: dimension and prior problems") {
  Transducer t = fixtures::identity();
  t.kernel = StochasticKernel(KernelDims{2, 2, 2, 2});
  CHECK(validate_transducer(t)[0].kind == "dims");

  Transducer u = fixtures::identity();
  u.prior = {0.7};
  const auto v = validate_transducer(u);
  REQUIRE(v.size() == 1);
  CHECK(v[0].kind == "prior");
  CHECK(v[0].residual == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("kernel_operator: identity entries") {
  const Transducer id = fixtures::identity();
  CHECK(kernel_operator(id, 0, 0).at(0, 0) == 1.0);
  CHECK(kernel_operator(id, 0, 1).at(0, 0) == 0.0);
  CHECK(kernel_operator(id, "1", "1").at(0, 0) == 1.0);
  CHECK_THROWS_AS(kernel_operator(id, 2, 0), std::invalid_argument);
}

TEST_CASE("kernel_operator: delayed-copy places mass at (r'=x, r=y)") {
  const Transducer dc = fixtures::delayed_copy();
  const Matrix m = kernel_operator(dc, 1, 0);
  // emitting y=0 requires stored r=0; the new state stores x=1
  CHECK(m.at(1, 0) == 1.0);
  CHECK(m.at(0, 0) == 0.0);
  CHECK(m.at(0, 1) == 0.0);
  CHECK(m.at(1, 1) == 0.0);
}

TEST_CASE("kernel_operator matrices reassemble the kernel exactly") {
  std::mt19937_64 rng(7);
  const Transducer t = fixtures::random_transducer(rng, 2, 3, 2);
  for (int x = 0; x < t.in.size(); ++x)
    for (int y = 0; y < t.out.size(); ++y) {
      const Matrix m = kernel_operator(t, x, y);
      for (int r = 0; r < t.latent.size(); ++r)
        for (int rp = 0; rp < t.latent.size(); ++rp)
          CHECK(m.at(rp, r) == t.kernel.at(x, r, y, rp));
    }
}

TEST_CASE("stationarize: single kernel reproduces the original at horizon 1") {
  const Transducer id = fixtures::identity();
  const Transducer st = stationarize({id.kernel}, id.in, id.out, id.latent, id.prior);
  CHECK(validate_transducer(st).empty());
  for (int x = 0; x < 2; ++x) {
    const auto want = interface_eval(id, std::vector<int>{x});
    const auto got = interface_eval(st, std::vector<int>{x});
    CHECK(oracles::table_distance(want, got) < 1e-15);
  }
}

TEST_CASE("stationarize: copy-then-flip family") {
  const Transducer id = fixtures::identity();
  const Transducer fl = fixtures::bit_flip();
  const Transducer st = stationarize({id.kernel, fl.kernel}, id.in, id.out, id.latent);
  CHECK(validate_transducer(st).empty());
  for (int x0 = 0; x0 < 2; ++x0)
    for (int x1 = 0; x1 < 2; ++x1) {
      const auto dist = interface_eval(st, std::vector<int>{x0, x1});
      REQUIRE(dist.size() == 1);
      CHECK(dist.begin()->first == std::vector<int>{x0, 1 - x1});
      CHECK(dist.begin()->second == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("stationarize: random time-varying families match the stepwise oracle") {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 5; ++rep) {
    const int H = 3;
    std::vector<StochasticKernel> kernels;
    std::vector<double> prior;
    Alphabet in("X", {"0", "1"}), out("Y", {"0", "1"}), lat("R", {"a", "b"});
    for (int t = 0; t < H; ++t) {
      Transducer m = fixtures::random_transducer(rng, 2, 2, 2);
      kernels.push_back(m.kernel);
      if (t == 0) prior = m.prior;
    }
    const Transducer st = stationarize(kernels, in, out, lat, prior);
    CHECK(validate_transducer(st).empty());
    for (int len = 1; len <= H; ++len)
      for (const auto& xs : oracles::all_sequences(2, len)) {
        const auto dist = interface_eval(st, xs);
        for (const auto& ys : oracles::all_sequences(2, len)) {
          const double want = oracles::time_varying_prob(kernels, prior, xs, ys);
          auto it = dist.find(ys);
          const double got = it == dist.end() ? 0.0 : it->second;
          CHECK(std::abs(want - got) < 1e-12);
        }
      }
  }
}

TEST_CASE("stationarize rejects empty or mismatched input") {
  const Transducer id = fixtures::identity();
  CHECK_THROWS_AS(stationarize({}, id.in, id.out, id.latent), std::invalid_argument);
  const Transducer dc = fixtures::delayed_copy();
  CHECK_THROWS_AS(stationarize({id.kernel, dc.kernel}, id.in, id.out, id.latent),
                  std::invalid_argument);
}
