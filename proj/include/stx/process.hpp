#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "stx/compose.hpp"
#include "stx/transducer.hpp"

namespace stx {

enum class Role { Observable, Latent };

struct ProcessVar {
  std::string id;
  Alphabet alphabet;
  Role role = Role::Observable;
};

// Exact sparse probability table over tuples of symbol sequences at a fixed
// horizon. Observable sequences have length H; latent sequences carry one
// extra step (r_0..r_H). Keys concatenate the per-process index sequences in
// roster order, so std::map iteration is the canonical entry order.
struct SequenceDistribution {
  int horizon = 0;
  std::vector<ProcessVar> processes;
  std::map<std::vector<int>, double> table;

  int seq_len(std::size_t i) const {
    return horizon + (processes[i].role == Role::Latent ? 1 : 0);
  }

  int offset_of(const std::string& id) const {
    int off = 0;
    for (std::size_t i = 0; i < processes.size(); ++i) {
      if (processes[i].id == id) return off;
      off += seq_len(i);
    }
    throw std::invalid_argument("SequenceDistribution: unknown process '" + id + "'");
  }

  const ProcessVar& var(const std::string& id) const {
    for (const auto& p : processes)
      if (p.id == id) return p;
    throw std::invalid_argument("SequenceDistribution: unknown process '" + id + "'");
  }

  double total_mass() const {
    double s = 0.0;
    for (const auto& [k, v] : table) s += v;
    return s;
  }
};

// Pr(y_{0:t} | x_{0:t}) for every output sequence, via repeated operator
// application: <1| T^(y_{t-1}|x_{t-1}) ... T^(y_0|x_0) |prior>.
inline std::map<std::vector<int>, double> interface_eval(const Transducer& t,
                                                         std::span<const int> xseq) {
  for (int x : xseq)
    if (x < 0 || x >= t.in.size())
      throw std::invalid_argument("interface_eval: input symbol out of alphabet");
  std::map<std::vector<int>, std::vector<double>> states;
  states[{}] = t.prior;
  for (int x : xseq) {
    std::map<std::vector<int>, std::vector<double>> next;
    for (const auto& [yseq, v] : states)
      for (int y = 0; y < t.out.size(); ++y) {
        std::vector<double> w(t.latent.size(), 0.0);
        double mass = 0.0;
        for (int r = 0; r < t.latent.size(); ++r) {
          if (v[r] == 0.0) continue;
          for (int rp = 0; rp < t.latent.size(); ++rp) {
            const double inc = t.kernel.at(x, r, y, rp) * v[r];
            w[rp] += inc;
            mass += inc;
          }
        }
        if (mass > kPruneEps) {
          auto key = yseq;
          key.push_back(y);
          next.emplace(std::move(key), std::move(w));
        }
      }
    states = std::move(next);
  }
  std::map<std::vector<int>, double> dist;
  for (const auto& [yseq, v] : states) dist[yseq] = vec_sum(v);
  return dist;
}

inline double sequence_probability(const Transducer& t, std::span<const int> xseq,
                                   std::span<const int> yseq) {
  if (xseq.size() != yseq.size())
    throw std::invalid_argument("sequence_probability: length mismatch");
  std::vector<double> v = t.prior;
  for (std::size_t i = 0; i < xseq.size(); ++i) {
    std::vector<double> w(t.latent.size(), 0.0);
    for (int r = 0; r < t.latent.size(); ++r) {
      if (v[r] == 0.0) continue;
      for (int rp = 0; rp < t.latent.size(); ++rp)
        w[rp] += t.kernel.at(xseq[i], r, yseq[i], rp) * v[r];
    }
    v = std::move(w);
  }
  return vec_sum(v);
}

// Family of conditional output distributions for every input sequence up to
// the horizon. The consistency condition of a well-formed interface is that
// marginalizing the last output from the length-(t+1) member recovers the
// length-t member.
struct Interface {
  int horizon = 0;
  Alphabet in, out;
  // x-sequence (length 0..horizon) -> distribution over same-length y-sequences
  std::map<std::vector<int>, std::map<std::vector<int>, double>> table;

  const std::map<std::vector<int>, double>& at(const std::vector<int>& xseq) const {
    auto it = table.find(xseq);
    if (it == table.end()) throw std::invalid_argument("Interface: input sequence not tabulated");
    return it->second;
  }
};

inline Interface interface_from_transducer(const Transducer& t, int horizon) {
  Interface iface{horizon, t.in, t.out, {}};
  // DFS over input prefixes, carrying per-output-prefix latent vectors.
  struct Frame {
    std::vector<int> xseq;
    std::map<std::vector<int>, std::vector<double>> states;
  };
  std::vector<Frame> stack;
  stack.push_back({{}, {{{}, t.prior}}});
  while (!stack.empty()) {
    Frame f = std::move(stack.back());
    stack.pop_back();
    auto& dist = iface.table[f.xseq];
    for (const auto& [yseq, v] : f.states) dist[yseq] = vec_sum(v);
    if (static_cast<int>(f.xseq.size()) == horizon) continue;
    for (int x = 0; x < t.in.size(); ++x) {
      Frame g;
      g.xseq = f.xseq;
      g.xseq.push_back(x);
      for (const auto& [yseq, v] : f.states)
        for (int y = 0; y < t.out.size(); ++y) {
          std::vector<double> w(t.latent.size(), 0.0);
          double mass = 0.0;
          for (int r = 0; r < t.latent.size(); ++r) {
            if (v[r] == 0.0) continue;
            for (int rp = 0; rp < t.latent.size(); ++rp) {
              const double inc = t.kernel.at(x, r, y, rp) * v[r];
              w[rp] += inc;
              mass += inc;
            }
          }
          if (mass > kPruneEps) {
            auto key = yseq;
            key.push_back(y);
            g.states.emplace(std::move(key), std::move(w));
          }
        }
      stack.push_back(std::move(g));
    }
  }
  return iface;
}

// Largest deviation from the length-consistency condition.
inline double interface_consistency_residual(const Interface& iface) {
  double worst = 0.0;
  for (const auto& [xseq, dist] : iface.table) {
    if (xseq.empty()) continue;
    std::vector<int> xprefix(xseq.begin(), xseq.end() - 1);
    std::map<std::vector<int>, double> marg;
    for (const auto& [yseq, p] : dist) {
      std::vector<int> yprefix(yseq.begin(), yseq.end() - 1);
      marg[yprefix] += p;
    }
    const auto& want = iface.at(xprefix);
    for (const auto& [yp, p] : marg) {
      auto it = want.find(yp);
      const double q = it == want.end() ? 0.0 : it->second;
      worst = std::max(worst, std::abs(p - q));
    }
    for (const auto& [yp, q] : want)
      if (!marg.count(yp)) worst = std::max(worst, q);
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Joint process of a network

// Drive for one external input: either an IID per-step distribution or a
// fixed symbol sequence of length H.
struct ExternalDrive {
  std::vector<double> iid;
  std::vector<int> fixed;
  bool is_fixed() const { return !fixed.empty(); }
};

// Exact joint distribution over all node output sequences (and latent
// sequences when requested), built by forward recursion with
// zero-probability pruning. External inputs are summed out.
inline SequenceDistribution joint_process(
    const TransducerNetwork& net,
    const std::map<std::string, ExternalDrive>& drives, int horizon,
    bool include_latents = false) {
  if (horizon < 1) throw std::invalid_argument("joint_process: horizon must be >= 1");
  validate_network(net);
  for (const auto& in : net.inputs) {
    auto it = drives.find(in.id);
    if (it == drives.end())
      throw std::invalid_argument("joint_process: missing drive for input '" + in.id + "'");
    if (it->second.is_fixed()) {
      if (static_cast<int>(it->second.fixed.size()) != horizon)
        throw std::invalid_argument("joint_process: fixed drive length != horizon");
    } else if (static_cast<int>(it->second.iid.size()) != in.alphabet.size()) {
      throw std::invalid_argument("joint_process: drive size mismatch for '" + in.id + "'");
    }
  }

  const int n_nodes = static_cast<int>(net.nodes.size());
  // state: per-node output history, per-node latent history (or just the
  // current latent when latents are not tracked)
  struct State {
    std::vector<std::vector<int>> obs;
    std::vector<std::vector<int>> lat;
    auto operator<=>(const State&) const = default;
  };
  std::map<State, double> frontier;
  {
    // expand the product prior
    std::vector<int> radix;
    for (const auto& n : net.nodes) radix.push_back(n.machine.latent.size());
    std::size_t total = 1;
    for (int r : radix) total *= r;
    for (std::size_t j = 0; j < total; ++j) {
      const auto rs = unpack_index(j, radix);
      double p = 1.0;
      for (int i = 0; i < n_nodes; ++i) p *= net.nodes[i].machine.prior[rs[i]];
      if (p <= kPruneEps) continue;
      State s;
      s.obs.resize(n_nodes);
      s.lat.resize(n_nodes);
      for (int i = 0; i < n_nodes; ++i) s.lat[i] = {rs[i]};
      frontier[s] += p;
    }
  }

  for (int t = 0; t < horizon; ++t) {
    std::map<State, double> next;
    for (const auto& [state, p0] : frontier) {
      // enumerate external symbols for this step
      std::vector<std::pair<std::map<std::string, int>, double>> externals{{{}, 1.0}};
      for (const auto& in : net.inputs) {
        const auto& d = drives.at(in.id);
        std::vector<std::pair<std::map<std::string, int>, double>> grown;
        for (const auto& [assign, w] : externals) {
          if (d.is_fixed()) {
            auto a = assign;
            a[in.id] = d.fixed[t];
            grown.emplace_back(std::move(a), w);
          } else {
            for (int s = 0; s < in.alphabet.size(); ++s) {
              if (d.iid[s] <= kPruneEps) continue;
              auto a = assign;
              a[in.id] = s;
              grown.emplace_back(std::move(a), w * d.iid[s]);
            }
          }
        }
        externals = std::move(grown);
      }
      for (const auto& [ext, w_ext] : externals) {
        // depth-first expansion over node (output, next latent) choices;
        // parents precede children, so inputs are always determined
        struct Choice {
          std::vector<int> ys, rps;
          double w;
        };
        std::vector<Choice> partial{{{}, {}, p0 * w_ext}};
        for (int i = 0; i < n_nodes; ++i) {
          const auto& nd = net.nodes[i];
          std::vector<Choice> grown;
          for (const auto& c : partial) {
            std::vector<int> digits, radices;
            for (const auto& par : nd.parents) {
              auto eit = ext.find(par);
              if (eit != ext.end()) {
                digits.push_back(eit->second);
                for (const auto& e : net.inputs)
                  if (e.id == par) radices.push_back(e.alphabet.size());
              } else {
                for (int jj = 0; jj < i; ++jj)
                  if (net.nodes[jj].id == par) {
                    digits.push_back(c.ys[jj]);
                    radices.push_back(net.nodes[jj].machine.out.size());
                  }
              }
            }
            const int xi = digits.empty() ? 0 : static_cast<int>(pack_index(digits, radices));
            const int r = state.lat[i].back();
            for (int y = 0; y < nd.machine.out.size(); ++y)
              for (int rp = 0; rp < nd.machine.latent.size(); ++rp) {
                const double kv = nd.machine.kernel.at(xi, r, y, rp);
                if (kv <= kPruneEps) continue;
                Choice g = c;
                g.ys.push_back(y);
                g.rps.push_back(rp);
                g.w = c.w * kv;
                grown.push_back(std::move(g));
              }
          }
          partial = std::move(grown);
        }
        for (const auto& c : partial) {
          if (c.w <= kPruneEps) continue;
          State s = state;
          for (int i = 0; i < n_nodes; ++i) {
            s.obs[i].push_back(c.ys[i]);
            if (include_latents)
              s.lat[i].push_back(c.rps[i]);
            else
              s.lat[i] = {c.rps[i]};
          }
          next[s] += c.w;
        }
      }
    }
    frontier = std::move(next);
  }

  SequenceDistribution d;
  d.horizon = horizon;
  for (const auto& n : net.nodes) d.processes.push_back({n.id, n.machine.out, Role::Observable});
  if (include_latents)
    for (const auto& n : net.nodes)
      d.processes.push_back({n.id + ".R", n.machine.latent, Role::Latent});
  for (const auto& [state, p] : frontier) {
    if (p <= kPruneEps) continue;
    std::vector<int> key;
    for (int i = 0; i < n_nodes; ++i)
      key.insert(key.end(), state.obs[i].begin(), state.obs[i].end());
    if (include_latents)
      for (int i = 0; i < n_nodes; ++i)
        key.insert(key.end(), state.lat[i].begin(), state.lat[i].end());
    d.table[key] += p;
  }
  return d;
}

// ---------------------------------------------------------------------------
// Table transformations

inline SequenceDistribution marginalize(const SequenceDistribution& d,
                                        const std::set<std::string>& keep) {
  if (keep.empty()) throw std::invalid_argument("marginalize: empty keep set");
  SequenceDistribution out;
  out.horizon = d.horizon;
  std::vector<std::pair<int, int>> spans;  // (offset, len) for kept processes
  int off = 0;
  for (std::size_t i = 0; i < d.processes.size(); ++i) {
    if (keep.count(d.processes[i].id)) {
      out.processes.push_back(d.processes[i]);
      spans.emplace_back(off, d.seq_len(i));
    }
    off += d.seq_len(i);
  }
  if (out.processes.size() != keep.size())
    throw std::invalid_argument("marginalize: keep set contains unknown process ids");
  for (const auto& [key, p] : d.table) {
    std::vector<int> k;
    for (auto [o, l] : spans) k.insert(k.end(), key.begin() + o, key.begin() + o + l);
    out.table[k] += p;
  }
  return out;
}

// Conditions on fixed sequence values for a subset of processes. The
// conditioned processes stay in the roster (as point masses).
inline SequenceDistribution condition(
    const SequenceDistribution& d,
    const std::map<std::string, std::vector<int>>& on) {
  if (on.empty()) throw std::invalid_argument("condition: empty conditioning set");
  std::vector<std::tuple<int, int, const std::vector<int>*>> checks;
  for (const auto& [id, val] : on) {
    int off = d.offset_of(id);
    int len = 0;
    for (std::size_t i = 0; i < d.processes.size(); ++i)
      if (d.processes[i].id == id) len = d.seq_len(i);
    if (static_cast<int>(val.size()) != len)
      throw std::invalid_argument("condition: value length mismatch for '" + id + "'");
    checks.emplace_back(off, len, &val);
  }
  SequenceDistribution out;
  out.horizon = d.horizon;
  out.processes = d.processes;
  double mass = 0.0;
  for (const auto& [key, p] : d.table) {
    bool match = true;
    for (const auto& [o, l, val] : checks)
      for (int i = 0; i < l && match; ++i)
        if (key[o + i] != (*val)[i]) match = false;
    if (match) {
      out.table[key] = p;
      mass += p;
    }
  }
  if (mass <= kPruneEps)
    throw std::invalid_argument("condition: conditioning value has zero probability");
  for (auto& [k, p] : out.table) p /= mass;
  return out;
}

// ---------------------------------------------------------------------------
// Feedback loop (two-interface product)

// Joint distribution of an agent-environment loop by stepwise simulation.
// The environment emits y_t from (x_t, r_t); the agent emits x_{t+1} from
// (y_t, s_t); the joint initial distribution Pr(X_0, S_0) is supplied
// explicitly (it is not assumed to factorize).
inline SequenceDistribution feedback_joint(const Transducer& env, const Transducer& agent,
                                           const Matrix& init_xs, int horizon) {
  if (!(agent.in == env.out) || !(agent.out == env.in))
    throw std::invalid_argument("feedback_joint: agent/environment alphabets do not interlock");
  if (init_xs.rows != env.in.size() || init_xs.cols != agent.latent.size())
    throw std::invalid_argument("feedback_joint: Pr(X0,S0) has wrong shape");
  if (horizon < 1) throw std::invalid_argument("feedback_joint: horizon must be >= 1");

  struct State {
    std::vector<int> xs, ys;
    int r, s;
    auto operator<=>(const State&) const = default;
  };
  std::map<State, double> frontier;
  for (int x0 = 0; x0 < env.in.size(); ++x0)
    for (int s0 = 0; s0 < agent.latent.size(); ++s0) {
      const double pi = init_xs.at(x0, s0);
      if (pi <= kPruneEps) continue;
      for (int r0 = 0; r0 < env.latent.size(); ++r0) {
        if (env.prior[r0] <= kPruneEps) continue;
        frontier[{{x0}, {}, r0, s0}] += pi * env.prior[r0];
      }
    }
  for (int t = 0; t < horizon; ++t) {
    std::map<State, double> next;
    for (const auto& [st, p] : frontier) {
      const int x = st.xs.back();
      for (int y = 0; y < env.out.size(); ++y)
        for (int rp = 0; rp < env.latent.size(); ++rp) {
          const double ev = env.kernel.at(x, st.r, y, rp);
          if (ev <= kPruneEps) continue;
          if (t == horizon - 1) {
            State g = st;
            g.ys.push_back(y);
            g.r = rp;
            next[g] += p * ev;
          } else {
            for (int xn = 0; xn < agent.out.size(); ++xn)
              for (int sp = 0; sp < agent.latent.size(); ++sp) {
                const double av = agent.kernel.at(y, st.s, xn, sp);
                if (av <= kPruneEps) continue;
                State g = st;
                g.ys.push_back(y);
                g.xs.push_back(xn);
                g.r = rp;
                g.s = sp;
                next[g] += p * ev * av;
              }
          }
        }
    }
    frontier = std::move(next);
  }
  SequenceDistribution d;
  d.horizon = horizon;
  d.processes = {{"X", env.in, Role::Observable}, {"Y", env.out, Role::Observable}};
  for (const auto& [st, p] : frontier) {
    if (p <= kPruneEps) continue;
    std::vector<int> key = st.xs;
    key.insert(key.end(), st.ys.begin(), st.ys.end());
    d.table[key] += p;
  }
  return d;
}

// Same joint via the product of the two interface factorizations:
// Pr(x, y) = I_E(y|x) * I_A(x|y).
inline SequenceDistribution feedback_joint_product(const Transducer& env,
                                                   const Transducer& agent,
                                                   const Matrix& init_xs, int horizon) {
  if (!(agent.in == env.out) || !(agent.out == env.in))
    throw std::invalid_argument("feedback_joint_product: alphabets do not interlock");
  SequenceDistribution d;
  d.horizon = horizon;
  d.processes = {{"X", env.in, Role::Observable}, {"Y", env.out, Role::Observable}};
  const int nx = env.in.size(), ny = env.out.size();
  std::vector<int> xr(horizon, nx), yr(horizon, ny);
  const std::size_t nxs = static_cast<std::size_t>(std::pow(nx, horizon));
  const std::size_t nys = static_cast<std::size_t>(std::pow(ny, horizon));
  for (std::size_t jx = 0; jx < nxs; ++jx) {
    const auto xs = unpack_index(jx, xr);
    for (std::size_t jy = 0; jy < nys; ++jy) {
      const auto ys = unpack_index(jy, yr);
      const double pe = sequence_probability(env, xs, ys);
      if (pe <= kPruneEps) continue;
      // agent interface: alpha recursion over its latent states
      std::vector<double> alpha(agent.latent.size());
      for (int s = 0; s < agent.latent.size(); ++s) alpha[s] = init_xs.at(xs[0], s);
      for (int i = 0; i + 1 < horizon; ++i) {
        std::vector<double> beta(agent.latent.size(), 0.0);
        for (int s = 0; s < agent.latent.size(); ++s) {
          if (alpha[s] == 0.0) continue;
          for (int sp = 0; sp < agent.latent.size(); ++sp)
            beta[sp] += alpha[s] * agent.kernel.at(ys[i], s, xs[i + 1], sp);
        }
        alpha = std::move(beta);
      }
      const double pa = vec_sum(alpha);
      const double p = pe * pa;
      if (p <= kPruneEps) continue;
      std::vector<int> key = xs;
      key.insert(key.end(), ys.begin(), ys.end());
      d.table[key] = p;
    }
  }
  return d;
}

}  // namespace stx
