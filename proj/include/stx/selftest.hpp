#pragma once

// The acceptance suite: ten numbered property checks, each validated against
// an independently coded brute-force oracle. Shared by the `stx selftest`
// subcommand and the standalone acceptance binary.

#include <chrono>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "stx/coarse.hpp"
#include "stx/compose.hpp"
#include "stx/decompose.hpp"
#include "stx/epsilon.hpp"
#include "stx/fixtures.hpp"
#include "stx/info.hpp"
#include "stx/process.hpp"

namespace stx::selftest {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  double seconds = 0.0;
  std::string detail;  // populated on failure
};

namespace detail {

inline std::vector<std::vector<int>> all_sequences(int alphabet, int length) {
  std::vector<int> radix(length, alphabet);
  std::size_t total = 1;
  for (int i = 0; i < length; ++i) total *= alphabet;
  std::vector<std::vector<int>> out;
  out.reserve(total);
  for (std::size_t j = 0; j < total; ++j) out.push_back(unpack_index(j, radix));
  return out;
}

inline double table_distance(const std::map<std::vector<int>, double>& a,
                             const std::map<std::vector<int>, double>& b) {
  double worst = 0.0;
  for (const auto& [k, p] : a) {
    auto it = b.find(k);
    worst = std::max(worst, std::abs(p - (it == b.end() ? 0.0 : it->second)));
  }
  for (const auto& [k, q] : b)
    if (!a.count(k)) worst = std::max(worst, std::abs(q));
  return worst;
}

// Joint of a transducer driven by a uniform IID source over its input
// alphabet, with processes named "X" and "Y" (latents "X.R", "Y.R").
inline SequenceDistribution driven_joint(const Transducer& t, int horizon,
                                         bool include_latents = false) {
  TransducerNetwork net;
  net.nodes.push_back(
      {"X", fixtures::emitter(uniform_dist(t.in.size()), singleton_alphabet(), t.in), {}});
  net.nodes.push_back({"Y", t, {"X"}});
  return joint_process(net, {}, horizon, include_latents);
}

// History-copy machine: latent states are the input-output histories of the
// interface up to the horizon; each step emits the conditional next output
// and appends the pair to the stored history. Reproduces the interface
// exactly on all sequences up to the horizon.
inline Transducer history_copy_machine(const Interface& iface) {
  const int nx = iface.in.size(), ny = iface.out.size();
  const int H = iface.horizon;
  std::map<std::pair<std::vector<int>, std::vector<int>>, int> index;
  std::vector<std::pair<std::vector<int>, std::vector<int>>> states;
  for (int t = 0; t <= H; ++t)
    for (const auto& xs : all_sequences(nx, t))
      for (const auto& ys : all_sequences(ny, t)) {
        index[{xs, ys}] = static_cast<int>(states.size());
        states.emplace_back(xs, ys);
      }
  std::vector<std::string> syms;
  for (std::size_t i = 0; i < states.size(); ++i) syms.push_back("h" + std::to_string(i));
  Alphabet lat("H", std::move(syms));

  StochasticKernel k(KernelDims{nx, lat.size(), ny, lat.size()});
  for (std::size_t i = 0; i < states.size(); ++i) {
    const auto& [xs, ys] = states[i];
    const int s = static_cast<int>(i);
    double p_hist = 1.0;
    if (!xs.empty()) {
      const auto& dist = iface.at(xs);
      auto it = dist.find(ys);
      p_hist = it == dist.end() ? 0.0 : it->second;
    }
    const bool terminal = static_cast<int>(xs.size()) == H;
    for (int x = 0; x < nx; ++x) {
      if (terminal || p_hist <= kPruneEps) {
        // unreachable or horizon-exhausted states: uniform self-loop
        for (int y = 0; y < ny; ++y) k.at(x, s, y, s) = 1.0 / ny;
        continue;
      }
      std::vector<int> xs2 = xs;
      xs2.push_back(x);
      const auto& dist = iface.at(xs2);
      for (int y = 0; y < ny; ++y) {
        std::vector<int> ys2 = ys;
        ys2.push_back(y);
        auto it = dist.find(ys2);
        const double p = it == dist.end() ? 0.0 : it->second;
        if (p <= kPruneEps) continue;
        k.at(x, s, y, index.at({xs2, ys2})) = p / p_hist;
      }
      // histories whose continuations carry no mass still need a valid row
      double row = 0.0;
      for (int y = 0; y < ny; ++y)
        for (int sp = 0; sp < lat.size(); ++sp) row += k.at(x, s, y, sp);
      if (row <= kPruneEps)
        for (int y = 0; y < ny; ++y) k.at(x, s, y, s) = 1.0 / ny;
    }
  }
  std::vector<double> prior(lat.size(), 0.0);
  prior[index.at({{}, {}})] = 1.0;
  return Transducer(iface.in, iface.out, lat, std::move(k), std::move(prior));
}

// Random machine over (X x Y) -> Z suitable as the second composition slot.
inline Transducer random_second(std::mt19937_64& rng, const Transducer& t, int ns, int nz) {
  const Alphabet in = product_alphabet(t.in, t.out);
  return fixtures::random_transducer(rng, in.size(), ns, nz, &in);
}

template <class Fn>
CriterionResult timed(int id, const std::string& name, Fn&& body) {
  CriterionResult res;
  res.id = id;
  res.name = name;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    res.detail = body();
    res.pass = res.detail.empty();
  } catch (const std::exception& e) {
    res.pass = false;
    res.detail = std::string("exception: ") + e.what();
  }
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

}  // namespace detail

// 1. Stochasticity closure of composition.
inline CriterionResult criterion1(std::uint64_t seed) {
  return detail::timed(1, "composition closure (500 random pairs validate)", [&] {
    std::mt19937_64 rng(seed);
    for (int i = 0; i < 500; ++i) {
      const int nx = 2 + static_cast<int>(uniform01(rng) * 2);
      const int ny = 2 + static_cast<int>(uniform01(rng) * 2);
      const int nr = 1 + static_cast<int>(uniform01(rng) * 3);
      const int ns = 1 + static_cast<int>(uniform01(rng) * 3);
      const Transducer t = fixtures::random_transducer(rng, nx, nr, ny);
      const Transducer u = detail::random_second(rng, t, ns, 2);
      const auto v = validate_transducer(compose_pair(t, u));
      if (!v.empty())
        return "case " + std::to_string(i) + ": " + std::to_string(v.size()) +
               " violations, first residual " + std::to_string(v[0].residual);
    }
    return std::string();
  });
}

// 2. Causality of generated joints, and the history-copy converse.
inline CriterionResult criterion2(std::uint64_t seed) {
  return detail::timed(2, "generated joints are causal; history-copy converse", [&] {
    std::mt19937_64 rng(seed);
    for (int i = 0; i < 100; ++i) {
      const int nx = 2 + static_cast<int>(uniform01(rng) * 2);
      const int ny = 2 + static_cast<int>(uniform01(rng) * 2);
      const int nr = 1 + static_cast<int>(uniform01(rng) * 4);
      const Transducer t = fixtures::random_transducer(rng, nx, nr, ny);
      const auto d = detail::driven_joint(t, 4);
      const double ac = acausality(d, {"X"}, {"Y"}, 4).total_bits;
      if (ac >= 1e-9)
        return "case " + std::to_string(i) + ": acausality " + std::to_string(ac);
    }
    // converse: rebuild interfaces from their history-copy machines
    std::vector<Transducer> family{fixtures::delayed_copy(), fixtures::alternator(),
                                   fixtures::fair_coin(binary_alphabet())};
    for (int i = 0; i < 10; ++i) family.push_back(fixtures::random_transducer(rng, 2, 3, 2));
    for (std::size_t i = 0; i < family.size(); ++i) {
      const Interface iface = interface_from_transducer(family[i], 4);
      const Transducer copy = detail::history_copy_machine(iface);
      if (!is_valid(copy)) return "history-copy machine " + std::to_string(i) + " invalid";
      for (const auto& [xs, want] : iface.table) {
        if (xs.empty()) continue;
        const auto got = interface_eval(copy, xs);
        const double dev = detail::table_distance(want, got);
        if (dev >= 1e-12)
          return "history-copy " + std::to_string(i) + ": deviation " + std::to_string(dev);
      }
    }
    return std::string();
  });
}

// 3. Transducibility of generated joints, and the anticipatory fixture.
inline CriterionResult criterion3(std::uint64_t seed) {
  return detail::timed(3, "generated joints are transducible; anticipatory fixture", [&] {
    std::mt19937_64 rng(seed);
    for (int i = 0; i < 100; ++i) {
      const int nr = 1 + static_cast<int>(uniform01(rng) * 2);
      const Transducer t = fixtures::random_transducer(rng, 2, nr, 2);
      const auto d = detail::driven_joint(t, 4, /*include_latents=*/true);
      const double f = intransducibility(d, {"X"}, {"Y"}, {"Y.R"}, 4).total_bits;
      if (f >= 1e-9)
        return "case " + std::to_string(i) + ": intransducibility " + std::to_string(f);
    }
    const auto anticip = fixtures::anticipatory_copy_joint();
    const double ac = acausality(anticip, {"X"}, {"Y"}, 2).total_bits;
    if (ac < 1.0 - 1e-9)
      return "anticipatory fixture: acausality " + std::to_string(ac) + " < 1 bit";
    return std::string();
  });
}

// 4. Associativity and the non-commutativity witness.
inline CriterionResult criterion4(std::uint64_t seed) {
  return detail::timed(4, "composition associativity and non-commutativity", [&] {
    std::mt19937_64 rng(seed);
    const int H = 4;
    for (int i = 0; i < 50; ++i) {
      const Transducer t = fixtures::random_transducer(rng, 2, 2, 2);
      const Transducer u = detail::random_second(rng, t, 2, 2);
      const Alphabet win = product_alphabet(t.in, product_alphabet(t.out, u.out));
      const Transducer w = fixtures::random_transducer(rng, win.size(), 2, 2, &win);
      const Transducer left = compose_pair(compose_pair(t, u), w);
      const Transducer right = compose_pair(t, compose_pair(u, w));
      for (const auto& xs : detail::all_sequences(2, H)) {
        const double dev =
            detail::table_distance(interface_eval(left, xs), interface_eval(right, xs));
        if (dev >= 1e-12)
          return "case " + std::to_string(i) + ": association deviation " +
                 std::to_string(dev);
      }
    }
    const Transducer a =
        compose_series(fixtures::bit_flip(),
                       fixtures::const_emitter(0, binary_alphabet(), binary_alphabet()));
    const Transducer b =
        compose_series(fixtures::const_emitter(0, binary_alphabet(), binary_alphabet()),
                       fixtures::bit_flip());
    const double dev = detail::table_distance(interface_eval(a, std::vector<int>{0}),
                                              interface_eval(b, std::vector<int>{0}));
    if (dev <= 1e-6) return std::string("non-commutativity witness failed");
    return std::string();
  });
}

// 5. Decomposition round-trip on known 3-node DAGs.
inline CriterionResult criterion5(std::uint64_t seed) {
  return detail::timed(5, "decomposition recovers known 3-node causal orders", [&] {
    const std::vector<std::vector<std::vector<int>>> shapes{
        {{}, {0}, {0, 1}}, {{}, {0}, {1}}, {{}, {0}, {0}}, {{}, {}, {0, 1}}};
    std::mt19937_64 seeder(seed);
    int done = 0;
    std::uint64_t sub = seed;
    while (done < 20) {
      ++sub;
      std::mt19937_64 rng(sub);
      const auto& shape = shapes[done % shapes.size()];
      const TransducerNetwork net = fixtures::random_network(rng, {3, 2, shape});
      const auto d = joint_process(net, {}, 4);
      // dependence floor: every wired edge must be information-bearing,
      // otherwise the draw is degenerate and we redraw
      bool floor_ok = true;
      for (int child = 0; child < 3 && floor_ok; ++child)
        for (int par : shape[child])
          if (cmi(d, {{"n" + std::to_string(par), 0, 4}},
                  {{"n" + std::to_string(child), 0, 4}}) < 0.01)
            floor_ok = false;
      if (!floor_ok) continue;

      const auto res = decompose_observable(d, {"n0", "n1", "n2"}, 4);
      auto module_index = [&](const std::string& id) {
        for (std::size_t m = 0; m < res.modules.size(); ++m)
          for (const auto& o : res.modules[m].observables)
            if (o == id) return static_cast<int>(m);
        return -1;
      };
      // ancestor consistency against the true wiring
      for (int child = 0; child < 3; ++child)
        for (int par : shape[child])
          if (module_index("n" + std::to_string(par)) >
              module_index("n" + std::to_string(child)))
            return "seed " + std::to_string(sub) + ": ancestor n" + std::to_string(par) +
                   " ordered after n" + std::to_string(child);
      // boundary soundness, rechecked independently
      std::vector<std::string> upstream;
      for (std::size_t m = 0; m < res.modules.size(); ++m) {
        if (m > 0 && !upstream.empty()) {
          const double ac = acausality(d, upstream, res.modules[m].observables, 4).total_bits;
          if (ac >= 1e-9)
            return "seed " + std::to_string(sub) + ": boundary acausality " +
                   std::to_string(ac);
        }
        for (const auto& id : res.modules[m].observables) upstream.push_back(id);
      }
      ++done;
    }
    return std::string();
  });
}

// 6. Coarse-graining exactness against rebuild and re-drive oracles.
inline CriterionResult criterion6(std::uint64_t seed) {
  return detail::timed(6, "coarse-graining equals rebuild/re-drive oracles", [&] {
    std::mt19937_64 rng(seed);
    const int H = 3;
    for (int i = 0; i < 20; ++i) {
      const auto shape = i % 2 == 0 ? std::vector<std::vector<int>>{{}, {0}, {0, 1}}
                                    : std::vector<std::vector<int>>{{}, {0}, {1}};
      const TransducerNetwork net = fixtures::random_network(rng, {3, 2, shape});
      const auto d = joint_process(net, {}, H);

      // top cut at 2 vs rebuilding the truncated network
      const auto top = simplify_top(d, {"n0", "n1", "n2"}, 2);
      TransducerNetwork trunc;
      trunc.nodes = {net.nodes[0], net.nodes[1]};
      const auto want_top = joint_process(trunc, {}, H);
      if (detail::table_distance(top.table, want_top.table) >= 1e-12)
        return "case " + std::to_string(i) + ": simplify_top mismatch";

      // bottom cut at 1 vs re-driving the upper network with the block value
      const auto ci = simplify_bottom(d, {"n0", "n1", "n2"}, 1);
      for (const auto& [bk, block] : ci.by_value) {
        TransducerNetwork upper;
        upper.inputs.push_back({"n0", net.nodes[0].machine.out});
        upper.nodes = {net.nodes[1], net.nodes[2]};
        const auto want = joint_process(
            upper, {{"n0", {{}, std::vector<int>(bk.begin(), bk.end())}}}, H);
        const auto got = marginalize(block, {"n1", "n2"});
        if (detail::table_distance(got.table, want.table) >= 1e-12)
          return "case " + std::to_string(i) + ": simplify_bottom mismatch";
      }

      // module interfaces multiply back to the joint
      const auto res = decompose_observable(d, {"n0", "n1", "n2"}, H);
      const auto parts = module_interfaces(res, d);
      for (const auto& [key, p] : d.table) {
        std::map<std::string, std::vector<int>> value;
        int off = 0;
        for (const auto& pv : d.processes) {
          value[pv.id] = std::vector<int>(key.begin() + off, key.begin() + off + H);
          off += H;
        }
        if (std::abs(chain_product_probability(parts, value) - p) >= 1e-12)
          return "case " + std::to_string(i) + ": chain product mismatch";
      }
    }
    return std::string();
  });
}

// 7. Composite causal states (prediction-preserving bijection).
inline CriterionResult criterion7(std::uint64_t seed) {
  return detail::timed(7, "composite causal-state bijection", [&] {
    const auto fixture = verify_composite_causal_states(fixtures::delayed_copy(),
                                                        fixtures::xor_pair(), 4);
    if (!fixture.bijection || fixture.direct_states != 2 || fixture.reachable_states != 2)
      return "delayed-copy/xor fixture: " + std::to_string(fixture.reachable_states) +
             " reachable vs " + std::to_string(fixture.direct_states) + " direct";
    std::mt19937_64 rng(seed);
    for (int i = 0; i < 10; ++i) {
      const Transducer t = fixtures::random_unifilar(rng, 2, 2, 2);
      Transducer u = fixtures::random_unifilar(rng, 4, 2, 2);
      u.in = product_alphabet(t.in, t.out);
      const auto v = verify_composite_causal_states(t, u, 4);
      if (!v.bijection)
        return "case " + std::to_string(i) + ": " + std::to_string(v.minimal_states) +
               " product classes vs " + std::to_string(v.direct_states) +
               " direct states; " + v.detail;
    }
    return std::string();
  });
}

// 8. Stationarization reproduces time-varying interfaces.
inline CriterionResult criterion8(std::uint64_t seed) {
  return detail::timed(8, "stationarization equals the time-varying interface", [&] {
    std::mt19937_64 rng(seed);
    const int H = 4;
    for (int i = 0; i < 10; ++i) {
      std::vector<StochasticKernel> kernels;
      std::vector<double> prior;
      for (int t = 0; t < H; ++t) {
        const Transducer m = fixtures::random_transducer(rng, 2, 2, 2);
        kernels.push_back(m.kernel);
        if (t == 0) prior = m.prior;
      }
      Alphabet in("X", {"0", "1"}), out("Y", {"0", "1"}), lat("R", {"a", "b"});
      const Transducer st = stationarize(kernels, in, out, lat, prior);
      if (!is_valid(st)) return "case " + std::to_string(i) + ": invalid stationarization";
      for (int len = 1; len <= H; ++len)
        for (const auto& xs : detail::all_sequences(2, len)) {
          const auto dist = interface_eval(st, xs);
          for (const auto& ys : detail::all_sequences(2, len)) {
            std::vector<double> v = prior;
            for (int s = 0; s < len; ++s) {
              std::vector<double> w(2, 0.0);
              for (int r = 0; r < 2; ++r)
                for (int rp = 0; rp < 2; ++rp)
                  w[rp] += kernels[s].at(xs[s], r, ys[s], rp) * v[r];
              v = std::move(w);
            }
            const double want = vec_sum(v);
            auto it = dist.find(ys);
            const double got = it == dist.end() ? 0.0 : it->second;
            if (std::abs(want - got) >= 1e-12)
              return "case " + std::to_string(i) + ": deviation " +
                     std::to_string(std::abs(want - got));
          }
        }
    }
    return std::string();
  });
}

// 9. Feedback joint: loop simulation equals the interface product.
inline CriterionResult criterion9(std::uint64_t seed) {
  return detail::timed(9, "feedback joint two-route agreement", [&] {
    std::mt19937_64 rng(seed);
    const int H = 3;
    for (int i = 0; i < 10; ++i) {
      const Transducer env = fixtures::random_transducer(rng, 2, 2, 2);
      const Transducer agent = fixtures::random_transducer(rng, 2, 2, 2);
      Matrix init(2, 2);
      const auto w = fixtures::random_dist(rng, 4);
      for (int x = 0; x < 2; ++x)
        for (int s = 0; s < 2; ++s) init.at(x, s) = w[x * 2 + s];
      const auto loop = feedback_joint(env, agent, init, H);
      const auto prod = feedback_joint_product(env, agent, init, H);
      const double dev = detail::table_distance(loop.table, prod.table);
      if (dev >= 1e-12)
        return "case " + std::to_string(i) + ": route deviation " + std::to_string(dev);
    }
    return std::string();
  });
}

// 10. Embeddings equal their lift-and-marginalize oracles.
inline CriterionResult criterion10(std::uint64_t seed) {
  return detail::timed(10, "serial/cascade embeddings equal their oracles", [&] {
    std::mt19937_64 rng(seed);
    const int H = 3;
    auto z_marginal = [](const std::map<std::vector<int>, double>& big, int nz) {
      std::map<std::vector<int>, double> out;
      for (const auto& [yz, p] : big) {
        std::vector<int> zs;
        for (int s : yz) zs.push_back(s % nz);
        out[zs] += p;
      }
      return out;
    };
    for (int i = 0; i < 10; ++i) {
      // serial embedding
      const Transducer t = fixtures::random_transducer(rng, 2, 2, 2);
      const Transducer u = fixtures::random_transducer(rng, 2, 2, 2, &t.out);
      const Transducer small = embed_serial_marginalized(t, u);
      const Transducer big = compose_series(t, u);
      for (const auto& xs : detail::all_sequences(2, H)) {
        const double dev = detail::table_distance(
            z_marginal(interface_eval(big, xs), 2), interface_eval(small, xs));
        if (dev >= 1e-12)
          return "serial case " + std::to_string(i) + ": deviation " + std::to_string(dev);
      }
      // cascade embedding: state-emitting front machine
      Alphabet lat("R", {"0", "1"});
      StochasticKernel kt(KernelDims{2, 2, 2, 2});
      for (int x = 0; x < 2; ++x)
        for (int r = 0; r < 2; ++r) {
          const auto dist = fixtures::random_dist(rng, 2);
          for (int rp = 0; rp < 2; ++rp) kt.at(x, r, r, rp) = dist[rp];
        }
      const Transducer tc(binary_alphabet(), lat, lat, std::move(kt),
                          fixtures::random_dist(rng, 2));
      const Alphabet xr = product_alphabet(tc.in, tc.latent);
      const Transducer uc = fixtures::random_transducer(rng, 4, 2, 2, &xr);
      const Transducer casc = embed_cascade(tc, uc);
      const Transducer pair = compose_pair(tc, uc);
      for (const auto& xs : detail::all_sequences(2, H)) {
        const double dev = detail::table_distance(
            z_marginal(interface_eval(pair, xs), 2), interface_eval(casc, xs));
        if (dev >= 1e-12)
          return "cascade case " + std::to_string(i) + ": deviation " + std::to_string(dev);
      }
    }
    return std::string();
  });
}

inline std::vector<CriterionResult> run_all(std::uint64_t seed, std::ostream& os) {
  using Runner = std::function<CriterionResult(std::uint64_t)>;
  const std::vector<Runner> runners{criterion1, criterion2, criterion3, criterion4,
                                    criterion5, criterion6, criterion7, criterion8,
                                    criterion9, criterion10};
  std::vector<CriterionResult> out;
  for (const auto& run : runners) {
    const CriterionResult r = run(seed);
    std::ostringstream line;
    line << "criterion " << r.id << " [" << (r.pass ? "PASS" : "FAIL") << "] " << r.name
         << " (" << r.seconds << " s)";
    if (!r.pass) line << " -- " << r.detail;
    os << line.str() << "\n";
    out.push_back(r);
  }
  return out;
}

}  // namespace stx::selftest
