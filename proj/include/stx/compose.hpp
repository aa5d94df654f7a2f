#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "stx/transducer.hpp"

namespace stx {

// General pairwise composition. t maps X -> Y; u maps (X x Y) -> Z, reading
// t's input and output at the same timestep. The composite maps
// X -> (Y x Z) with latent space R x S and kernel
//   V^{(yz|x)}_{rs -> r's'} = U^{(z|xy)}_{s -> s'} * T^{(y|x)}_{r -> r'}.
inline Transducer compose_pair(const Transducer& t, const Transducer& u) {
  const Alphabet xy = product_alphabet(t.in, t.out);
  if (!(u.in == xy))
    throw std::invalid_argument(
        "compose_pair: second transducer's input alphabet must be the product "
        "of the first's input and output alphabets");

  const int nr = t.latent.size(), ns = u.latent.size();
  const Alphabet out = product_alphabet(t.out, u.out);
  const Alphabet lat = product_alphabet(t.latent, u.latent);
  StochasticKernel k(KernelDims{t.in.size(), lat.size(), out.size(), lat.size()});

  for (int x = 0; x < t.in.size(); ++x)
    for (int r = 0; r < nr; ++r)
      for (int s = 0; s < ns; ++s)
        for (int y = 0; y < t.out.size(); ++y) {
          const int uxy = x * t.out.size() + y;
          for (int rp = 0; rp < nr; ++rp) {
            const double tv = t.kernel.at(x, r, y, rp);
            if (tv == 0.0) continue;
            for (int z = 0; z < u.out.size(); ++z)
              for (int sp = 0; sp < ns; ++sp) {
                const double uv = u.kernel.at(uxy, s, z, sp);
                if (uv == 0.0) continue;
                k.at(x, r * ns + s, y * u.out.size() + z, rp * ns + sp) = tv * uv;
              }
          }
        }

  std::vector<double> prior(static_cast<std::size_t>(nr) * ns, 0.0);
  for (int r = 0; r < nr; ++r)
    for (int s = 0; s < ns; ++s) prior[r * ns + s] = t.prior[r] * u.prior[s];
  return Transducer(t.in, out, lat, std::move(k), std::move(prior));
}

// Lifts u: Y -> Z to (X x Y) -> Z, ignoring the X component.
inline Transducer lift_ignore_first(const Transducer& u, const Alphabet& x_alpha) {
  const Alphabet in = product_alphabet(x_alpha, u.in);
  StochasticKernel k(KernelDims{in.size(), u.latent.size(), u.out.size(), u.latent.size()});
  for (int x = 0; x < x_alpha.size(); ++x)
    for (int y = 0; y < u.in.size(); ++y) {
      const int xy = x * u.in.size() + y;
      for (int s = 0; s < u.latent.size(); ++s)
        for (int z = 0; z < u.out.size(); ++z)
          for (int sp = 0; sp < u.latent.size(); ++sp)
            k.at(xy, s, z, sp) = u.kernel.at(y, s, z, sp);
    }
  return Transducer(in, u.out, u.latent, std::move(k), u.prior);
}

// Lifts u: X -> Z to (X x Y) -> Z, ignoring the Y component.
inline Transducer lift_ignore_second(const Transducer& u, const Alphabet& y_alpha) {
  const Alphabet in = product_alphabet(u.in, y_alpha);
  StochasticKernel k(KernelDims{in.size(), u.latent.size(), u.out.size(), u.latent.size()});
  for (int x = 0; x < u.in.size(); ++x)
    for (int y = 0; y < y_alpha.size(); ++y) {
      const int xy = x * y_alpha.size() + y;
      for (int s = 0; s < u.latent.size(); ++s)
        for (int z = 0; z < u.out.size(); ++z)
          for (int sp = 0; sp < u.latent.size(); ++sp)
            k.at(xy, s, z, sp) = u.kernel.at(x, s, z, sp);
    }
  return Transducer(in, u.out, u.latent, std::move(k), u.prior);
}

// Series: u consumes only t's output. Both outputs are retained, so the
// result maps X -> (Y x Z).
inline Transducer compose_series(const Transducer& t, const Transducer& u) {
  if (!(u.in == t.out))
    throw std::invalid_argument("compose_series: u's input alphabet must equal t's output alphabet");
  return compose_pair(t, lift_ignore_first(u, t.in));
}

// Parallel: u consumes only the shared input X; Y and Z are produced
// independently given X.
inline Transducer compose_parallel(const Transducer& t, const Transducer& u) {
  if (!(u.in == t.in))
    throw std::invalid_argument("compose_parallel: u's input alphabet must equal t's input alphabet");
  return compose_pair(t, lift_ignore_second(u, t.out));
}

// Returns the largest deviation of t's kernel from input-independence.
inline double input_dependence(const Transducer& t) {
  double dev = 0.0;
  for (int x = 1; x < t.in.size(); ++x)
    for (int r = 0; r < t.latent.size(); ++r)
      for (int y = 0; y < t.out.size(); ++y)
        for (int rp = 0; rp < t.latent.size(); ++rp)
          dev = std::max(dev, std::abs(t.kernel.at(x, r, y, rp) - t.kernel.at(0, r, y, rp)));
  return dev;
}

// Convergent: t is an input-agnostic source of Y, and u fuses X and Y into Z.
inline Transducer compose_convergent(const Transducer& t, const Transducer& u,
                                     double tol = kDefaultTol) {
  if (input_dependence(t) > tol)
    throw std::invalid_argument("compose_convergent: first transducer must be input-agnostic");
  return compose_pair(t, u);
}

// Serial composition that marginalizes the intermediate symbol: the result
// maps X -> Z with kernel V^{(z|x)}_{rs -> r's'} = sum_y T^{(y|x)} U^{(z|y)}.
inline Transducer embed_serial_marginalized(const Transducer& t, const Transducer& u) {
  if (!(u.in == t.out))
    throw std::invalid_argument(
        "embed_serial_marginalized: u's input alphabet must equal t's output alphabet");
  const int nr = t.latent.size(), ns = u.latent.size();
  const Alphabet lat = product_alphabet(t.latent, u.latent);
  StochasticKernel k(KernelDims{t.in.size(), lat.size(), u.out.size(), lat.size()});
  for (int x = 0; x < t.in.size(); ++x)
    for (int r = 0; r < nr; ++r)
      for (int s = 0; s < ns; ++s)
        for (int rp = 0; rp < nr; ++rp)
          for (int z = 0; z < u.out.size(); ++z)
            for (int sp = 0; sp < ns; ++sp) {
              double acc = 0.0;
              for (int y = 0; y < t.out.size(); ++y)
                acc += t.kernel.at(x, r, y, rp) * u.kernel.at(y, s, z, sp);
              k.at(x, r * ns + s, z, rp * ns + sp) = acc;
            }
  std::vector<double> prior(static_cast<std::size_t>(nr) * ns, 0.0);
  for (int r = 0; r < nr; ++r)
    for (int s = 0; s < ns; ++s) prior[r * ns + s] = t.prior[r] * u.prior[s];
  return Transducer(t.in, u.out, lat, std::move(k), std::move(prior));
}

// Cascade: t emits its own (pre-transition) latent state, and u reads the
// pair (x, r). Requires out = latent for t and kernel support on y = r.
inline Transducer embed_cascade(const Transducer& t, const Transducer& u,
                                double tol = kDefaultTol) {
  if (!(t.out == t.latent))
    throw std::invalid_argument("embed_cascade: t's output alphabet must equal its latent alphabet");
  for (int x = 0; x < t.in.size(); ++x)
    for (int r = 0; r < t.latent.size(); ++r)
      for (int y = 0; y < t.out.size(); ++y)
        for (int rp = 0; rp < t.latent.size(); ++rp)
          if (y != r && std::abs(t.kernel.at(x, r, y, rp)) > tol)
            throw std::invalid_argument(
                "embed_cascade: t's kernel has support off the y = r diagonal");
  if (!(u.in == product_alphabet(t.in, t.latent)))
    throw std::invalid_argument("embed_cascade: u's input alphabet must be X x R");

  const int nr = t.latent.size(), ns = u.latent.size();
  const Alphabet lat = product_alphabet(t.latent, u.latent);
  StochasticKernel k(KernelDims{t.in.size(), lat.size(), u.out.size(), lat.size()});
  for (int x = 0; x < t.in.size(); ++x)
    for (int r = 0; r < nr; ++r) {
      const int uxr = x * nr + r;
      for (int s = 0; s < ns; ++s)
        for (int rp = 0; rp < nr; ++rp) {
          const double tv = t.kernel.at(x, r, r, rp);
          if (tv == 0.0) continue;
          for (int z = 0; z < u.out.size(); ++z)
            for (int sp = 0; sp < ns; ++sp)
              k.at(x, r * ns + s, z, rp * ns + sp) = tv * u.kernel.at(uxr, s, z, sp);
        }
    }
  std::vector<double> prior(static_cast<std::size_t>(nr) * ns, 0.0);
  for (int r = 0; r < nr; ++r)
    for (int s = 0; s < ns; ++s) prior[r * ns + s] = t.prior[r] * u.prior[s];
  return Transducer(t.in, u.out, lat, std::move(k), std::move(prior));
}

// ---------------------------------------------------------------------------
// Transducer networks

// Declared external input stream feeding one or more nodes.
struct ExternalInput {
  std::string id;
  Alphabet alphabet;
};

// One node of a feedforward network. Its input alphabet must equal the
// product of its parents' output alphabets in declared parent order
// (the singleton alphabet when it has no parents).
struct NetworkNode {
  std::string id;
  Transducer machine;
  std::vector<std::string> parents;  // node ids or external input ids
};

struct TransducerNetwork {
  std::vector<ExternalInput> inputs;
  std::vector<NetworkNode> nodes;  // must be listed in a valid causal order

  const NetworkNode& node(const std::string& id) const {
    for (const auto& n : nodes)
      if (n.id == id) return n;
    throw std::invalid_argument("TransducerNetwork: unknown node '" + id + "'");
  }
};

inline void validate_network(const TransducerNetwork& net) {
  std::set<std::string> seen;
  for (const auto& in : net.inputs)
    if (!seen.insert(in.id).second)
      throw std::invalid_argument("network: duplicate id '" + in.id + "'");
  for (const auto& n : net.nodes) {
    std::vector<Alphabet> parts;
    for (const auto& p : n.parents) {
      if (!seen.count(p))
        throw std::invalid_argument("network: node '" + n.id + "' has parent '" + p +
                                    "' that is not declared earlier (DAG order violated)");
      const ExternalInput* ei = nullptr;
      for (const auto& in : net.inputs)
        if (in.id == p) ei = &in;
      parts.push_back(ei ? ei->alphabet : net.node(p).machine.out);
    }
    if (!seen.insert(n.id).second)
      throw std::invalid_argument("network: duplicate id '" + n.id + "'");
    const Alphabet want = parts.empty() ? singleton_alphabet() : product_alphabet(parts);
    if (!(n.machine.in == want))
      throw std::invalid_argument("network: node '" + n.id +
                                  "' input alphabet does not match its parents' outputs");
    if (!is_valid(n.machine))
      throw std::invalid_argument("network: node '" + n.id + "' has an invalid transducer");
  }
}

// Flattens a network into one transducer. The joint input alphabet is the
// product of the declared external inputs (singleton when there are none);
// the joint output exposes every node's output; the joint latent is the
// product of node latents. Each node's kernel is selected by its parents'
// current symbols, so the kernel is the parent-conditioned Kronecker product
// of the node operators.
inline Transducer network_flatten(const TransducerNetwork& net) {
  validate_network(net);
  const int n_nodes = static_cast<int>(net.nodes.size());
  if (n_nodes == 0) throw std::invalid_argument("network_flatten: empty network");

  std::vector<Alphabet> in_parts;
  for (const auto& in : net.inputs) in_parts.push_back(in.alphabet);
  const Alphabet in = in_parts.empty() ? singleton_alphabet() : product_alphabet(in_parts);

  std::vector<Alphabet> out_parts, lat_parts;
  std::vector<int> out_radix, lat_radix;
  for (const auto& n : net.nodes) {
    out_parts.push_back(n.machine.out);
    lat_parts.push_back(n.machine.latent);
    out_radix.push_back(n.machine.out.size());
    lat_radix.push_back(n.machine.latent.size());
  }
  const Alphabet out = product_alphabet(out_parts);
  const Alphabet lat = product_alphabet(lat_parts);

  std::vector<int> in_radix;
  for (const auto& p : net.inputs) in_radix.push_back(p.alphabet.size());

  StochasticKernel k(KernelDims{in.size(), lat.size(), out.size(), lat.size()});
  for (int w = 0; w < in.size(); ++w) {
    const std::vector<int> ext = in_radix.empty()
                                     ? std::vector<int>{}
                                     : unpack_index(static_cast<std::size_t>(w), in_radix);
    std::map<std::string, int> symbol_of;
    for (std::size_t i = 0; i < net.inputs.size(); ++i) symbol_of[net.inputs[i].id] = ext[i];
    for (std::size_t jr = 0; jr < static_cast<std::size_t>(lat.size()); ++jr) {
      const std::vector<int> rs = unpack_index(jr, lat_radix);
      for (std::size_t jy = 0; jy < static_cast<std::size_t>(out.size()); ++jy) {
        const std::vector<int> ys = unpack_index(jy, out_radix);
        // a node's input symbol is determined by its parents' current outputs
        auto local_symbols = symbol_of;
        for (int i = 0; i < n_nodes; ++i) local_symbols[net.nodes[i].id] = ys[i];
        for (std::size_t jrp = 0; jrp < static_cast<std::size_t>(lat.size()); ++jrp) {
          const std::vector<int> rps = unpack_index(jrp, lat_radix);
          double v = 1.0;
          for (int i = 0; i < n_nodes && v != 0.0; ++i) {
            const auto& nd = net.nodes[i];
            std::vector<int> digits;
            std::vector<int> radices;
            for (const auto& p : nd.parents) {
              digits.push_back(local_symbols.at(p));
              radices.push_back([&] {
                for (const auto& e : net.inputs)
                  if (e.id == p) return e.alphabet.size();
                return net.node(p).machine.out.size();
              }());
            }
            const int xi = digits.empty() ? 0 : static_cast<int>(pack_index(digits, radices));
            v *= nd.machine.kernel.at(xi, rs[i], ys[i], rps[i]);
          }
          k.at(w, static_cast<int>(jr), static_cast<int>(jy), static_cast<int>(jrp)) = v;
        }
      }
    }
  }

  std::vector<double> prior(lat.size(), 0.0);
  for (std::size_t jr = 0; jr < static_cast<std::size_t>(lat.size()); ++jr) {
    const std::vector<int> rs = unpack_index(jr, lat_radix);
    double v = 1.0;
    for (int i = 0; i < n_nodes; ++i) v *= net.nodes[i].machine.prior[rs[i]];
    prior[jr] = v;
  }
  return Transducer(in, out, lat, std::move(k), std::move(prior));
}

}  // namespace stx
