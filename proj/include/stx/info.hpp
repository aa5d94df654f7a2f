#pragma once

#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "stx/process.hpp"

namespace stx {

// Selects symbols [begin, end) of one process's sequence.
struct VariableSlice {
  std::string process;
  int begin = 0;
  int end = 0;
};

namespace detail {

// Precomputed extraction plan: absolute key positions for a slice group.
inline std::vector<int> slice_positions(const SequenceDistribution& d,
                                        const std::vector<VariableSlice>& group) {
  std::vector<int> pos;
  for (const auto& sl : group) {
    const int off = d.offset_of(sl.process);
    int len = 0;
    for (std::size_t i = 0; i < d.processes.size(); ++i)
      if (d.processes[i].id == sl.process) len = d.seq_len(i);
    if (sl.begin < 0 || sl.end < sl.begin || sl.end > len)
      throw std::invalid_argument("VariableSlice: range out of bounds for '" + sl.process + "'");
    for (int i = sl.begin; i < sl.end; ++i) pos.push_back(off + i);
  }
  return pos;
}

inline std::vector<int> extract(const std::vector<int>& key, const std::vector<int>& pos) {
  std::vector<int> out;
  out.reserve(pos.size());
  for (int p : pos) out.push_back(key[p]);
  return out;
}

}  // namespace detail

// Exact conditional mutual information I[A; B | C] in bits, evaluated
// directly on the table. Zero-probability marginals contribute nothing
// (0 log 0 = 0). Small negative float dust is clamped to zero.
inline double cmi(const SequenceDistribution& d, const std::vector<VariableSlice>& A,
                  const std::vector<VariableSlice>& B,
                  const std::vector<VariableSlice>& C = {}) {
  if (A.empty() || B.empty()) throw std::invalid_argument("cmi: A and B must be nonempty");
  const auto pa = detail::slice_positions(d, A);
  const auto pb = detail::slice_positions(d, B);
  const auto pc = detail::slice_positions(d, C);

  using Key = std::vector<int>;
  std::map<std::pair<std::pair<Key, Key>, Key>, double> pabc;
  std::map<std::pair<Key, Key>, double> pac, pbc;
  std::map<Key, double> pcm;
  for (const auto& [key, p] : d.table) {
    if (p <= kPruneEps) continue;
    Key a = detail::extract(key, pa);
    Key b = detail::extract(key, pb);
    Key c = detail::extract(key, pc);
    pabc[{{a, b}, c}] += p;
    pac[{a, c}] += p;
    pbc[{b, c}] += p;
    pcm[c] += p;
  }
  double total = 0.0;
  for (const auto& [abc, p] : pabc) {
    const auto& [ab, c] = abc;
    const double num = p * pcm[c];
    const double den = pac[{ab.first, c}] * pbc[{ab.second, c}];
    if (num > 0.0 && den > 0.0) total += p * std::log2(num / den);
  }
  if (total < 0.0 && total > -1e-9) total = 0.0;
  return total;
}

struct MeasureReport {
  std::string measure;
  int horizon = 0;
  double tolerance = kDefaultTol;
  double total_bits = 0.0;
  std::vector<double> per_t_terms;  // term for t = 1 .. H-1, in order
};

namespace detail {

inline std::vector<VariableSlice> slices(const std::vector<std::string>& ids, int a, int b) {
  std::vector<VariableSlice> out;
  for (const auto& id : ids) out.push_back({id, a, b});
  return out;
}

inline void require_disjoint(const std::vector<std::string>& a,
                             const std::vector<std::string>& b, const char* what) {
  std::set<std::string> sa(a.begin(), a.end());
  for (const auto& id : b)
    if (sa.count(id)) throw std::invalid_argument(std::string(what) + ": overlapping process sets");
}

}  // namespace detail

// Summed conditional mutual information between past outputs and future
// inputs given past inputs, truncated at the horizon:
//   AC = sum_{t=1}^{H-1} I[Y_{0:t}; X_{t:H} | X_{0:t}].
// Zero iff the joint is realizable by a feedforward transducer from X to Y
// (up to this horizon).
inline MeasureReport acausality(const SequenceDistribution& d,
                                const std::vector<std::string>& in_procs,
                                const std::vector<std::string>& out_procs, int horizon) {
  detail::require_disjoint(in_procs, out_procs, "acausality");
  if (in_procs.empty() || out_procs.empty())
    throw std::invalid_argument("acausality: empty process set");
  if (horizon > d.horizon) throw std::invalid_argument("acausality: horizon exceeds table");
  MeasureReport rep{"acausality", horizon, kDefaultTol, 0.0, {}};
  for (int t = 1; t < horizon; ++t) {
    const double term = cmi(d, detail::slices(out_procs, 0, t),
                            detail::slices(in_procs, t, horizon),
                            detail::slices(in_procs, 0, t));
    rep.per_t_terms.push_back(term);
    rep.total_bits += term;
  }
  if (rep.total_bits < 0.0) rep.total_bits = 0.0;
  return rep;
}

// Summed latent-shielding violation:
//   f = sum_{t=1}^{H-1} I[R_{t+1:H+1}, Y_{t:H}; Y_{0:t}, R_{0:t}, X_{0:t} | X_{t:H}, R_t].
// Zero iff (X, Y, R) is consistent with a transducer that maps X to Y with
// latent memory R (up to this horizon).
inline MeasureReport intransducibility(const SequenceDistribution& d,
                                       const std::vector<std::string>& in_procs,
                                       const std::vector<std::string>& out_procs,
                                       const std::vector<std::string>& latent_procs,
                                       int horizon) {
  detail::require_disjoint(in_procs, out_procs, "intransducibility");
  detail::require_disjoint(in_procs, latent_procs, "intransducibility");
  detail::require_disjoint(out_procs, latent_procs, "intransducibility");
  if (out_procs.empty()) throw std::invalid_argument("intransducibility: empty output set");
  if (horizon > d.horizon) throw std::invalid_argument("intransducibility: horizon exceeds table");
  for (const auto& id : latent_procs)
    if (d.var(id).role != Role::Latent)
      throw std::invalid_argument("intransducibility: '" + id + "' is not a latent process");

  MeasureReport rep{"intransducibility", horizon, kDefaultTol, 0.0, {}};
  for (int t = 1; t < horizon; ++t) {
    std::vector<VariableSlice> A = detail::slices(latent_procs, t + 1, horizon + 1);
    for (auto& sl : detail::slices(out_procs, t, horizon)) A.push_back(sl);
    std::vector<VariableSlice> B = detail::slices(out_procs, 0, t);
    for (auto& sl : detail::slices(latent_procs, 0, t)) B.push_back(sl);
    for (auto& sl : detail::slices(in_procs, 0, t)) B.push_back(sl);
    std::vector<VariableSlice> C = detail::slices(in_procs, t, horizon);
    for (auto& sl : detail::slices(latent_procs, t, t + 1)) C.push_back(sl);
    const double term = A.empty() || B.empty() ? 0.0 : cmi(d, A, B, C);
    rep.per_t_terms.push_back(term);
    rep.total_bits += term;
  }
  if (rep.total_bits < 0.0) rep.total_bits = 0.0;
  return rep;
}

struct AnticipationCheck {
  bool nonanticipatory = false;
  double total_bits = 0.0;
  double max_term = 0.0;  // largest single-t contribution
  int argmax_t = 0;
};

inline AnticipationCheck is_nonanticipatory(const SequenceDistribution& d,
                                            const std::vector<std::string>& in_procs,
                                            const std::vector<std::string>& out_procs,
                                            int horizon, double tol = kDefaultTol) {
  const MeasureReport rep = acausality(d, in_procs, out_procs, horizon);
  AnticipationCheck c;
  c.total_bits = rep.total_bits;
  c.nonanticipatory = rep.total_bits <= tol;
  for (std::size_t i = 0; i < rep.per_t_terms.size(); ++i)
    if (rep.per_t_terms[i] > c.max_term) {
      c.max_term = rep.per_t_terms[i];
      c.argmax_t = static_cast<int>(i) + 1;
    }
  return c;
}

}  // namespace stx
