#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "stx/compose.hpp"
#include "stx/process.hpp"

namespace stx {

// Conditional future predictions: future input sequence -> distribution over
// same-length future outputs.
using FutureSignature = std::map<std::vector<int>, std::map<std::vector<int>, double>>;

namespace detail {

inline double signature_distance(const FutureSignature& a, const FutureSignature& b) {
  double worst = 0.0;
  for (const auto& [xf, da] : a) {
    auto it = b.find(xf);
    if (it == b.end()) return 1.0;
    const auto& db = it->second;
    double tv = 0.0;
    for (const auto& [yf, p] : da) {
      auto jt = db.find(yf);
      tv += std::abs(p - (jt == db.end() ? 0.0 : jt->second));
    }
    for (const auto& [yf, q] : db)
      if (!da.count(yf)) tv += q;
    worst = std::max(worst, 0.5 * tv);
  }
  return worst;
}

inline void enumerate_sequences(int alphabet, int length,
                                const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> radix(length, alphabet);
  std::size_t total = 1;
  for (int i = 0; i < length; ++i) total *= alphabet;
  for (std::size_t j = 0; j < total; ++j) fn(unpack_index(j, radix));
}

// Predictions after a given history: for every future input sequence of the
// requested length, Pr(y_f | x_f, history) = p(y_p y_f | x_p x_f) / p(y_p | x_p).
inline FutureSignature history_signature(const Interface& iface, const std::vector<int>& xp,
                                         const std::vector<int>& yp, double p_hist,
                                         int future_len) {
  FutureSignature sig;
  enumerate_sequences(iface.in.size(), future_len, [&](const std::vector<int>& xf) {
    std::vector<int> xs = xp;
    xs.insert(xs.end(), xf.begin(), xf.end());
    const auto& dist = iface.at(xs);
    auto& out = sig[xf];
    for (const auto& [ys, p] : dist) {
      if (!std::equal(yp.begin(), yp.end(), ys.begin())) continue;
      std::vector<int> yf(ys.begin() + yp.size(), ys.end());
      out[yf] = p / p_hist;
    }
  });
  return sig;
}

}  // namespace detail

// Finite-horizon causal-state machine of an interface. Histories start at
// depth 1; the start distribution over states is the empirical mass of the
// depth-H_past histories under uniform driving inputs.
struct EpsilonTransducer {
  Alphabet in, out;
  int h_past = 0, h_future = 0;
  double tol = kDefaultTol;

  struct State {
    int id = 0;
    std::vector<int> rep_x, rep_y;  // representative history
    FutureSignature signature;
  };
  std::vector<State> states;
  std::map<std::tuple<int, int, int>, int> transitions;      // (state, x, y) -> state
  std::map<std::pair<int, int>, std::vector<double>> emission;  // (state, x) -> dist over y
  // history (x-seq, y-seq) -> state, for every enumerated positive-probability history
  std::map<std::pair<std::vector<int>, std::vector<int>>, int> history_assignment;
  std::vector<double> prior;

  // Runs the machine as an ordinary transducer with the empirical prior.
  Transducer as_transducer() const {
    std::vector<std::string> syms;
    for (const auto& s : states) syms.push_back("s" + std::to_string(s.id));
    Alphabet lat("S", std::move(syms));
    StochasticKernel k(KernelDims{in.size(), lat.size(), out.size(), lat.size()});
    for (const auto& s : states)
      for (int x = 0; x < in.size(); ++x) {
        const auto& em = emission.at({s.id, x});
        for (int y = 0; y < out.size(); ++y) {
          if (em[y] <= kPruneEps) continue;
          auto it = transitions.find({s.id, x, y});
          if (it == transitions.end())
            throw std::runtime_error("EpsilonTransducer: unresolved transition");
          k.at(x, s.id, y, it->second) = em[y];
        }
      }
    return Transducer(in, out, lat, std::move(k), prior);
  }
};

// Groups histories (x_{0:t}, y_{0:t}), 1 <= t <= H_past, by their conditional
// future predictions at depth H_future. Clustering compares against each
// state's representative only, in a fixed lexicographic order, so the result
// is deterministic under float tolerance.
inline EpsilonTransducer causal_states(const Interface& iface, int h_past, int h_future,
                                       double tol = kDefaultTol) {
  if (h_past < 1 || h_future < 1)
    throw std::invalid_argument("causal_states: horizons must be >= 1");
  if (h_past + h_future > iface.horizon)
    throw std::invalid_argument("causal_states: horizon budget exceeded");

  EpsilonTransducer eps;
  eps.in = iface.in;
  eps.out = iface.out;
  eps.h_past = h_past;
  eps.h_future = h_future;
  eps.tol = tol;

  auto classify = [&](const std::vector<int>& xp, const std::vector<int>& yp,
                      double p_hist, bool allow_new) -> int {
    const int budget = std::min(h_future, iface.horizon - static_cast<int>(xp.size()));
    const FutureSignature sig = detail::history_signature(iface, xp, yp, p_hist, budget);
    for (const auto& s : eps.states) {
      FutureSignature ref = s.signature;
      if (budget < h_future)
        ref = detail::history_signature(iface, s.rep_x, s.rep_y,
                                        iface.at(s.rep_x).at(s.rep_y), budget);
      if (detail::signature_distance(sig, ref) <= tol) return s.id;
    }
    if (!allow_new) throw std::runtime_error("causal_states: unclassifiable history");
    const int id = static_cast<int>(eps.states.size());
    eps.states.push_back({id, xp, yp, sig});
    return id;
  };

  for (int t = 1; t <= h_past; ++t) {
    detail::enumerate_sequences(iface.in.size(), t, [&](const std::vector<int>& xp) {
      const auto& dist = iface.at(xp);
      for (const auto& [yp, p] : dist) {
        if (p <= kPruneEps) continue;
        const int id = classify(xp, yp, p, /*allow_new=*/true);
        eps.history_assignment[{xp, yp}] = id;
      }
    });
  }

  // emissions from the representative history
  for (const auto& s : eps.states) {
    const double p_hist = iface.at(s.rep_x).at(s.rep_y);
    for (int x = 0; x < iface.in.size(); ++x) {
      std::vector<int> xs = s.rep_x;
      xs.push_back(x);
      std::vector<double> em(iface.out.size(), 0.0);
      for (const auto& [ys, p] : iface.at(xs)) {
        if (!std::equal(s.rep_y.begin(), s.rep_y.end(), ys.begin())) continue;
        em[ys.back()] += p / p_hist;
      }
      eps.emission[{s.id, x}] = std::move(em);
    }
  }

  // transitions by appending one (x, y) to the shallowest member; histories
  // that overrun H_past are classified with a truncated future budget
  for (const auto& s : eps.states) {
    for (int x = 0; x < iface.in.size(); ++x) {
      const auto& em = eps.emission.at({s.id, x});
      for (int y = 0; y < iface.out.size(); ++y) {
        if (em[y] <= kPruneEps) continue;
        std::vector<int> xs = s.rep_x, ys = s.rep_y;
        xs.push_back(x);
        ys.push_back(y);
        int next;
        auto it = eps.history_assignment.find({xs, ys});
        if (it != eps.history_assignment.end()) {
          next = it->second;
        } else {
          next = classify(xs, ys, iface.at(xs).at(ys), /*allow_new=*/false);
        }
        eps.transitions[{s.id, x, y}] = next;
      }
    }
  }

  // empirical prior from the deepest history layer under uniform inputs
  eps.prior.assign(eps.states.size(), 0.0);
  double norm = 0.0;
  const double px = std::pow(1.0 / iface.in.size(), h_past);
  for (const auto& [hist, id] : eps.history_assignment) {
    if (static_cast<int>(hist.first.size()) != h_past) continue;
    const double w = px * iface.at(hist.first).at(hist.second);
    eps.prior[id] += w;
    norm += w;
  }
  for (auto& p : eps.prior) p /= norm;
  return eps;
}

// True iff for every (r, x, y) carrying emission probability above tol there
// is exactly one successor state with kernel mass above tol.
inline bool is_unifilar(const Transducer& t, double tol = kDefaultTol) {
  for (int x = 0; x < t.in.size(); ++x)
    for (int r = 0; r < t.latent.size(); ++r)
      for (int y = 0; y < t.out.size(); ++y) {
        double mass = 0.0;
        int successors = 0;
        for (int rp = 0; rp < t.latent.size(); ++rp) {
          const double v = t.kernel.at(x, r, y, rp);
          mass += v;
          if (v > tol) ++successors;
        }
        if (mass > tol && successors != 1) return false;
      }
  return true;
}

struct CompositeVerdict {
  bool bijection = false;
  int product_states = 0;   // |R| * |S| of the raw Kronecker machine
  int reachable_states = 0;  // reachable from the start support within H_past steps
  int minimal_states = 0;    // reachable states merged by prediction equality
  int direct_states = 0;     // causal states computed from the composite interface
  std::string detail;
};

// Checks that the composed machine of two causal-state machines carries the
// causal states of the composite interface: reachable product states, merged
// by prediction equality, must be in prediction-preserving bijection with
// the causal states computed directly from the composite interface.
inline CompositeVerdict verify_composite_causal_states(const Transducer& t_eps,
                                                       const Transducer& u_eps, int horizon,
                                                       double tol = kDefaultTol) {
  const Transducer m = compose_pair(t_eps, u_eps);
  const int h_past = horizon / 2;
  const int h_future = horizon - h_past;

  CompositeVerdict v;
  v.product_states = m.latent.size();

  // reachable within 1..h_past steps from the start support
  std::set<int> support;
  for (int q = 0; q < m.latent.size(); ++q)
    if (m.prior[q] > kPruneEps) support.insert(q);
  std::set<int> reachable;
  std::set<int> layer = support;
  for (int step = 0; step < h_past; ++step) {
    std::set<int> next;
    for (int q : layer)
      for (int x = 0; x < m.in.size(); ++x)
        for (int y = 0; y < m.out.size(); ++y)
          for (int qp = 0; qp < m.latent.size(); ++qp)
            if (m.kernel.at(x, q, y, qp) > kPruneEps) next.insert(qp);
    for (int q : next) reachable.insert(q);
    layer = std::move(next);
  }
  v.reachable_states = static_cast<int>(reachable.size());

  // per-state prediction signatures (point prior at the state)
  auto state_signature = [&](int q) {
    Transducer mq = m;
    mq.prior.assign(m.latent.size(), 0.0);
    mq.prior[q] = 1.0;
    FutureSignature sig;
    detail::enumerate_sequences(m.in.size(), h_future, [&](const std::vector<int>& xf) {
      sig[xf] = interface_eval(mq, xf);
    });
    return sig;
  };
  std::vector<std::pair<int, FutureSignature>> classes;
  for (int q : reachable) {
    FutureSignature sig = state_signature(q);
    bool merged = false;
    for (auto& [rep, ref] : classes)
      if (detail::signature_distance(sig, ref) <= tol) {
        merged = true;
        break;
      }
    if (!merged) classes.emplace_back(q, std::move(sig));
  }
  v.minimal_states = static_cast<int>(classes.size());

  const Interface iface = interface_from_transducer(m, horizon);
  const EpsilonTransducer direct = causal_states(iface, h_past, h_future, tol);
  v.direct_states = static_cast<int>(direct.states.size());

  // prediction-preserving matching must be a bijection
  std::set<int> used;
  bool all_matched = true;
  for (const auto& [rep, sig] : classes) {
    int match = -1;
    for (const auto& ds : direct.states)
      if (!used.count(ds.id) && detail::signature_distance(sig, ds.signature) <= tol) {
        match = ds.id;
        break;
      }
    if (match < 0) {
      all_matched = false;
      v.detail += "unmatched product class at state " + std::to_string(rep) + "; ";
    } else {
      used.insert(match);
    }
  }
  v.bijection = all_matched && v.minimal_states == v.direct_states;
  return v;
}

}  // namespace stx
