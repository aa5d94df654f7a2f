#pragma once

// Hand-built machines and seeded random generators shared by the tests, the
// self-test subcommand, and the acceptance suite.

#include <random>
#include <string>
#include <vector>

#include "stx/compose.hpp"
#include "stx/process.hpp"
#include "stx/transducer.hpp"

namespace stx::fixtures {

// y = x, one latent state.
inline Transducer identity(const Alphabet& a = binary_alphabet()) {
  StochasticKernel k(KernelDims{a.size(), 1, a.size(), 1});
  for (int x = 0; x < a.size(); ++x) k.at(x, 0, x, 0) = 1.0;
  return Transducer(a, a, singleton_alphabet("R"), std::move(k));
}

// y = NOT x on the binary alphabet.
inline Transducer bit_flip() {
  const Alphabet a = binary_alphabet();
  StochasticKernel k(KernelDims{2, 1, 2, 1});
  k.at(0, 0, 1, 0) = 1.0;
  k.at(1, 0, 0, 0) = 1.0;
  return Transducer(a, a, singleton_alphabet("R"), std::move(k));
}

// Input-agnostic emitter with a fixed per-step output distribution.
inline Transducer emitter(const std::vector<double>& dist, const Alphabet& in_alpha,
                          const Alphabet& out_alpha) {
  StochasticKernel k(KernelDims{in_alpha.size(), 1, out_alpha.size(), 1});
  for (int x = 0; x < in_alpha.size(); ++x)
    for (int y = 0; y < out_alpha.size(); ++y) k.at(x, 0, y, 0) = dist[y];
  return Transducer(in_alpha, out_alpha, singleton_alphabet("R"), std::move(k));
}

inline Transducer fair_coin(const Alphabet& in_alpha = singleton_alphabet()) {
  return emitter({0.5, 0.5}, in_alpha, binary_alphabet());
}

inline Transducer const_emitter(int symbol, const Alphabet& in_alpha,
                                const Alphabet& out_alpha) {
  std::vector<double> d(out_alpha.size(), 0.0);
  d[symbol] = 1.0;
  return emitter(d, in_alpha, out_alpha);
}

// Output is uniform regardless of input.
inline Transducer uniform_randomizer(const Alphabet& a = binary_alphabet()) {
  return emitter(uniform_dist(a.size()), a, a);
}

// Latent state stores the previous input; output is the stored symbol.
// With the uniform prior, y_0 is a fair coin and y_t = x_{t-1} afterwards.
inline Transducer delayed_copy() {
  const Alphabet a = binary_alphabet();
  Alphabet lat("R", {"r0", "r1"});
  StochasticKernel k(KernelDims{2, 2, 2, 2});
  for (int x = 0; x < 2; ++x)
    for (int r = 0; r < 2; ++r) k.at(x, r, r, x) = 1.0;  // emit r, store x
  return Transducer(a, a, std::move(lat), std::move(k));
}

// z = x XOR y, memoryless; input alphabet is B x B.
inline Transducer xor_pair() {
  const Alphabet b = binary_alphabet();
  const Alphabet in = product_alphabet(b, b);
  StochasticKernel k(KernelDims{4, 1, 2, 1});
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) k.at(x * 2 + y, 0, x ^ y, 0) = 1.0;
  return Transducer(in, b, singleton_alphabet("S"), std::move(k));
}

// Deterministic period-2 output cycle, input ignored.
inline Transducer alternator(const Alphabet& a = binary_alphabet()) {
  Alphabet lat("R", {"p0", "p1"});
  StochasticKernel k(KernelDims{a.size(), 2, 2, 2});
  for (int x = 0; x < a.size(); ++x) {
    k.at(x, 0, 0, 1) = 1.0;  // phase 0 emits 0, moves to phase 1
    k.at(x, 1, 1, 0) = 1.0;  // phase 1 emits 1, moves back
  }
  return Transducer(a, binary_alphabet(), std::move(lat), std::move(k));
}

// ---------------------------------------------------------------------------
// Seeded random generation. All draws go through uniform01 so results are
// byte-identical across standard libraries.

inline std::vector<double> random_dist(std::mt19937_64& rng, int n) {
  std::vector<double> d(n);
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    d[i] = 0.05 + uniform01(rng);  // bounded away from zero
    s += d[i];
  }
  for (auto& v : d) v /= s;
  return d;
}

inline Alphabet indexed_alphabet(const std::string& name, int n) {
  std::vector<std::string> syms;
  for (int i = 0; i < n; ++i) syms.push_back(std::to_string(i));
  return Alphabet(name, std::move(syms));
}

inline Transducer random_transducer(std::mt19937_64& rng, int nx, int nr, int ny,
                                    const Alphabet* in_alpha = nullptr) {
  const Alphabet in = in_alpha ? *in_alpha : indexed_alphabet("X", nx);
  const Alphabet out = indexed_alphabet("Y", ny);
  const Alphabet lat = indexed_alphabet("R", nr);
  StochasticKernel k(KernelDims{nx, nr, ny, nr});
  for (int x = 0; x < nx; ++x)
    for (int r = 0; r < nr; ++r) {
      const auto row = random_dist(rng, ny * nr);
      for (int y = 0; y < ny; ++y)
        for (int rp = 0; rp < nr; ++rp) k.at(x, r, y, rp) = row[y * nr + rp];
    }
  return Transducer(in, out, lat, std::move(k), random_dist(rng, nr));
}

// Unifilar machine whose next state is a function of the current input and
// output only (so it synchronizes after a single step). Emissions are
// bounded away from 0 and 1 and drawn to separate the states.
inline Transducer random_unifilar(std::mt19937_64& rng, int nx, int nr, int ny) {
  const Alphabet in = indexed_alphabet("X", nx);
  const Alphabet out = indexed_alphabet("Y", ny);
  const Alphabet lat = indexed_alphabet("R", nr);
  std::vector<int> next(static_cast<std::size_t>(nx) * ny);
  for (auto& v : next) v = static_cast<int>(uniform01(rng) * nr);
  StochasticKernel k(KernelDims{nx, nr, ny, nr});
  for (int x = 0; x < nx; ++x)
    for (int r = 0; r < nr; ++r) {
      const auto em = random_dist(rng, ny);
      for (int y = 0; y < ny; ++y) k.at(x, r, y, next[x * ny + y]) = em[y];
    }
  return Transducer(in, out, lat, std::move(k), random_dist(rng, nr));
}

// Random feedforward network of `n_nodes` binary-output transducers behind
// one external fair-bit input. Edges follow `parent_sets`; every node's
// machine is a random transducer over the product of its parents' outputs.
struct RandomNetworkSpec {
  int n_nodes = 3;
  int latent = 2;
  // parent index lists per node; -1 denotes the external input
  std::vector<std::vector<int>> parent_sets;
};

inline TransducerNetwork random_network(std::mt19937_64& rng, const RandomNetworkSpec& spec) {
  TransducerNetwork net;
  const Alphabet b = binary_alphabet();
  bool uses_ext = false;
  for (const auto& ps : spec.parent_sets)
    for (int p : ps)
      if (p < 0) uses_ext = true;
  if (uses_ext) net.inputs.push_back({"ext", b});
  for (int i = 0; i < spec.n_nodes; ++i) {
    std::vector<Alphabet> parts;
    std::vector<std::string> parents;
    for (int p : spec.parent_sets[i]) {
      parts.push_back(b);
      parents.push_back(p < 0 ? "ext" : "n" + std::to_string(p));
    }
    const Alphabet in = parts.empty() ? singleton_alphabet() : product_alphabet(parts);
    Transducer m = random_transducer(rng, in.size(), spec.latent, 2, &in);
    net.nodes.push_back({"n" + std::to_string(i), std::move(m), std::move(parents)});
  }
  return net;
}

// Random chain 0 -> 1 -> 2 with node 2 also reading node 0 (dense 3-chain).
inline TransducerNetwork random_chain3(std::mt19937_64& rng, int latent = 2) {
  return random_network(rng, {3, latent, {{}, {0}, {0, 1}}});
}

// Anticipatory fixture: X IID uniform bits, Y_0 = X_1 and Y_1 an
// independent fair bit, tabulated directly at horizon 2.
inline SequenceDistribution anticipatory_copy_joint() {
  SequenceDistribution d;
  d.horizon = 2;
  d.processes = {{"X", binary_alphabet(), Role::Observable},
                 {"Y", binary_alphabet(), Role::Observable}};
  for (int x0 = 0; x0 < 2; ++x0)
    for (int x1 = 0; x1 < 2; ++x1)
      for (int y1 = 0; y1 < 2; ++y1) d.table[{x0, x1, x1, y1}] = 1.0 / 8.0;
  return d;
}

}  // namespace stx::fixtures
