#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "stx/info.hpp"

namespace stx {

struct Module {
  std::vector<std::string> observables;
  std::vector<std::string> latents;
  double residual = 0.0;  // measure value at the peel step (0 for the head)
};

struct DecompositionResult {
  std::vector<Module> modules;  // causal order: module n is influenced only by modules < n
  std::string mode;             // "intransducibility" | "acausality"
  int horizon = 0;
  double tol = kDefaultTol;
  bool head_is_prime = true;
  std::vector<std::string> unassigned_latents;  // latents left in the head module
};

namespace detail {

// Hard guards: the subset search is exhaustive.
inline void check_search_guards(std::size_t n_obs, std::size_t n_lat) {
  if (n_obs > 12) throw GuardError("decompose: more than 12 observable processes");
  if (n_lat > 8) throw GuardError("decompose: more than 8 latent processes");
}

// Subsets of {0..n-1} ordered by size, then lexicographically on the sorted
// index tuple. Excludes the empty set; includes the full set.
inline std::vector<std::vector<int>> ordered_subsets(int n) {
  std::vector<std::vector<int>> out;
  for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask) {
    std::vector<int> s;
    for (int i = 0; i < n; ++i)
      if (mask & (std::size_t{1} << i)) s.push_back(i);
    out.push_back(std::move(s));
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  });
  return out;
}

// Memoized measure evaluation keyed by the participating process sets.
struct MeasureCache {
  const SequenceDistribution* d = nullptr;
  int horizon = 0;
  std::map<std::tuple<std::vector<std::string>, std::vector<std::string>,
                      std::vector<std::string>>,
           double>
      cache;

  double intrans(std::vector<std::string> in, std::vector<std::string> out,
                 std::vector<std::string> lat) {
    auto key = std::make_tuple(in, out, lat);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    const double v = intransducibility(*d, in, out, lat, horizon).total_bits;
    cache.emplace(std::move(key), v);
    return v;
  }

  double acaus(std::vector<std::string> in, std::vector<std::string> out) {
    if (in.empty()) return 0.0;  // any lone process is an input-agnostic emitter
    auto key = std::make_tuple(in, out, std::vector<std::string>{});
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    const double v = acausality(*d, in, out, horizon).total_bits;
    cache.emplace(std::move(key), v);
    return v;
  }
};

inline std::vector<std::string> pick(const std::vector<std::string>& ids,
                                     const std::vector<int>& idx) {
  std::vector<std::string> out;
  for (int i : idx) out.push_back(ids[i]);
  return out;
}

inline std::vector<std::string> drop(const std::vector<std::string>& ids,
                                     const std::vector<int>& idx) {
  std::set<int> s(idx.begin(), idx.end());
  std::vector<std::string> out;
  for (std::size_t i = 0; i < ids.size(); ++i)
    if (!s.count(static_cast<int>(i))) out.push_back(ids[i]);
  return out;
}

// Finds the smallest qualifying (O, O') peel candidate among the remaining
// processes, or nullopt when the remainder is prime. Tie-break: |O| first,
// then |O'|, then lexicographic on sorted index tuples of O, then of O'.
// O = everything is excluded (the terminal head covers it).
inline std::optional<std::tuple<std::vector<int>, std::vector<int>, double>>
find_peel_with_latents(MeasureCache& mc, const std::vector<std::string>& obs,
                       const std::vector<std::string>& lat, double tol) {
  const auto obs_subsets = ordered_subsets(static_cast<int>(obs.size()));
  std::vector<std::vector<int>> lat_subsets{{}};
  for (auto& s : ordered_subsets(static_cast<int>(lat.size()))) lat_subsets.push_back(s);
  // candidates ranked by |O|, then |O'|, then lex on O, then lex on O'
  std::vector<std::pair<int, int>> cand;
  for (std::size_t i = 0; i < obs_subsets.size(); ++i) {
    if (obs_subsets[i].size() == obs.size()) continue;
    for (std::size_t j = 0; j < lat_subsets.size(); ++j)
      cand.emplace_back(static_cast<int>(i), static_cast<int>(j));
  }
  std::stable_sort(cand.begin(), cand.end(), [&](const auto& a, const auto& b) {
    const auto ka = std::make_tuple(obs_subsets[a.first].size(), lat_subsets[a.second].size(),
                                    std::cref(obs_subsets[a.first]), std::cref(lat_subsets[a.second]));
    const auto kb = std::make_tuple(obs_subsets[b.first].size(), lat_subsets[b.second].size(),
                                    std::cref(obs_subsets[b.first]), std::cref(lat_subsets[b.second]));
    return ka < kb;
  });
  for (const auto& [i, j] : cand) {
    const auto& o = obs_subsets[i];
    const auto& op = lat_subsets[j];
    const double f = mc.intrans(drop(obs, o), pick(obs, o), pick(lat, op));
    if (f <= tol) return std::make_tuple(o, op, f);
  }
  return std::nullopt;
}

inline std::optional<std::pair<std::vector<int>, double>> find_peel_observable(
    MeasureCache& mc, const std::vector<std::string>& obs, double tol) {
  for (const auto& o : ordered_subsets(static_cast<int>(obs.size()))) {
    if (o.size() == obs.size()) continue;
    const double ac = mc.acaus(drop(obs, o), pick(obs, o));
    if (ac <= tol) return std::make_pair(o, ac);
  }
  return std::nullopt;
}

}  // namespace detail

inline bool is_prime_with_latents(const SequenceDistribution& d,
                                  const std::vector<std::string>& obs,
                                  const std::vector<std::string>& lat, int horizon,
                                  double tol = kDefaultTol) {
  detail::check_search_guards(obs.size(), lat.size());
  detail::MeasureCache mc{&d, horizon, {}};
  return !detail::find_peel_with_latents(mc, obs, lat, tol).has_value();
}

inline bool is_prime_observable(const SequenceDistribution& d,
                                const std::vector<std::string>& obs, int horizon,
                                double tol = kDefaultTol) {
  detail::check_search_guards(obs.size(), 0);
  detail::MeasureCache mc{&d, horizon, {}};
  return !detail::find_peel_observable(mc, obs, tol).has_value();
}

// Peels the smallest transducible (O, O') off the joint until the remainder
// is prime, prepending each module. Latents never claimed by a peeled module
// end up in the head module and are reported as unassigned.
inline DecompositionResult decompose_with_latents(const SequenceDistribution& d,
                                                  const std::vector<std::string>& obs,
                                                  const std::vector<std::string>& lat,
                                                  int horizon, double tol = kDefaultTol) {
  detail::check_search_guards(obs.size(), lat.size());
  detail::MeasureCache mc{&d, horizon, {}};
  DecompositionResult res;
  res.mode = "intransducibility";
  res.horizon = horizon;
  res.tol = tol;
  std::vector<std::string> rem_obs = obs, rem_lat = lat;
  while (true) {
    auto peel = detail::find_peel_with_latents(mc, rem_obs, rem_lat, tol);
    if (!peel) break;
    const auto& [o, op, f] = *peel;
    res.modules.insert(res.modules.begin(),
                       {detail::pick(rem_obs, o), detail::pick(rem_lat, op), f});
    rem_obs = detail::drop(rem_obs, o);
    rem_lat = detail::drop(rem_lat, op);
  }
  res.modules.insert(res.modules.begin(), {rem_obs, rem_lat, 0.0});
  res.unassigned_latents = rem_lat;
  return res;
}

inline DecompositionResult decompose_observable(const SequenceDistribution& d,
                                                const std::vector<std::string>& obs,
                                                int horizon, double tol = kDefaultTol) {
  detail::check_search_guards(obs.size(), 0);
  detail::MeasureCache mc{&d, horizon, {}};
  DecompositionResult res;
  res.mode = "acausality";
  res.horizon = horizon;
  res.tol = tol;
  std::vector<std::string> rem = obs;
  while (true) {
    auto peel = detail::find_peel_observable(mc, rem, tol);
    if (!peel) break;
    const auto& [o, ac] = *peel;
    res.modules.insert(res.modules.begin(), {detail::pick(rem, o), {}, ac});
    rem = detail::drop(rem, o);
  }
  res.modules.insert(res.modules.begin(), {rem, {}, 0.0});
  return res;
}

// Necessary-dependency edges between decomposed modules. The edge m -> m'
// is present iff the candidate parent's outputs still carry information
// about module m' once the other upstream outputs are conditioned on:
//   sum_{t=1}^{H} I[X(m')_{0:t}; X(m)_{0:t}, X(U)_{t:H} | X(U - m)_{0:t}] > tol,
// where U is the union of observables of modules before m'. For a sound
// decomposition the future-input part of the statistic vanishes, so this
// reduces to the direct past-past conditional-independence test.
inline std::vector<std::pair<int, int>> dependency_graph(const DecompositionResult& res,
                                                         const SequenceDistribution& d,
                                                         int horizon,
                                                         double tol = kDefaultTol) {
  std::vector<std::pair<int, int>> edges;
  for (std::size_t mp = 1; mp < res.modules.size(); ++mp) {
    std::vector<std::string> upstream;
    for (std::size_t m = 0; m < mp; ++m)
      for (const auto& id : res.modules[m].observables) upstream.push_back(id);
    for (std::size_t m = 0; m < mp; ++m) {
      std::vector<std::string> others;
      std::set<std::string> mine(res.modules[m].observables.begin(),
                                 res.modules[m].observables.end());
      for (const auto& id : upstream)
        if (!mine.count(id)) others.push_back(id);
      double extra = 0.0;
      for (int t = 1; t <= horizon; ++t) {
        std::vector<VariableSlice> A = detail::slices(res.modules[mp].observables, 0, t);
        std::vector<VariableSlice> B =
            detail::slices(res.modules[m].observables, 0, t);
        if (t < horizon)
          for (auto& sl : detail::slices(upstream, t, horizon)) B.push_back(sl);
        std::vector<VariableSlice> C = detail::slices(others, 0, t);
        extra += cmi(d, A, B, C);
      }
      if (extra > tol) edges.emplace_back(static_cast<int>(m), static_cast<int>(mp));
    }
  }
  return edges;
}

}  // namespace stx
