#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "stx/decompose.hpp"
#include "stx/process.hpp"

namespace stx {

namespace detail {

inline std::set<std::string> with_latents(const SequenceDistribution& d,
                                          const std::vector<std::string>& obs_ids) {
  std::set<std::string> keep(obs_ids.begin(), obs_ids.end());
  for (const auto& id : obs_ids)
    for (const auto& p : d.processes)
      if (p.role == Role::Latent && p.id == id + ".R") keep.insert(p.id);
  return keep;
}

}  // namespace detail

// Keeps the upstream block order[0..cut_b) and marginalizes every
// downstream observable; downstream latents are dropped with them.
inline SequenceDistribution simplify_top(const SequenceDistribution& d,
                                         const std::vector<std::string>& causal_order,
                                         int cut_b) {
  if (cut_b < 1 || cut_b > static_cast<int>(causal_order.size()))
    throw std::invalid_argument("simplify_top: invalid cut index");
  std::vector<std::string> keep(causal_order.begin(), causal_order.begin() + cut_b);
  return marginalize(d, detail::with_latents(d, keep));
}

// Conditional interface over a block of processes given the value of the
// processes below it.
struct ConditionalInterface {
  int horizon = 0;
  std::vector<ProcessVar> given;
  std::vector<ProcessVar> target;
  // conditioning value (concatenated per-process index sequences, in `given`
  // order) -> normalized distribution over the target block
  std::map<std::vector<int>, SequenceDistribution> by_value;
};

// Treats the bottom block order[0..cut_a) as an externally supplied input:
// for every positive-probability value of the block, the normalized
// distribution over the remaining observables. Latents are dropped.
inline ConditionalInterface simplify_bottom(const SequenceDistribution& d,
                                            const std::vector<std::string>& causal_order,
                                            int cut_a) {
  if (cut_a < 0 || cut_a > static_cast<int>(causal_order.size()))
    throw std::invalid_argument("simplify_bottom: invalid cut index");
  std::vector<std::string> below(causal_order.begin(), causal_order.begin() + cut_a);
  std::vector<std::string> above(causal_order.begin() + cut_a, causal_order.end());

  ConditionalInterface ci;
  ci.horizon = d.horizon;
  for (const auto& id : below) ci.given.push_back(d.var(id));
  for (const auto& id : above) ci.target.push_back(d.var(id));

  const SequenceDistribution obs =
      marginalize(d, std::set<std::string>(causal_order.begin(), causal_order.end()));
  // group by block value
  std::vector<std::pair<int, int>> below_spans, above_spans;
  for (const auto& id : below) below_spans.emplace_back(obs.offset_of(id), obs.horizon);
  for (const auto& id : above) above_spans.emplace_back(obs.offset_of(id), obs.horizon);

  std::map<std::vector<int>, double> block_mass;
  for (const auto& [key, p] : obs.table) {
    std::vector<int> bk;
    for (auto [o, l] : below_spans) bk.insert(bk.end(), key.begin() + o, key.begin() + o + l);
    block_mass[bk] += p;
    auto& sub = ci.by_value[bk];
    if (sub.processes.empty()) {
      sub.horizon = d.horizon;
      sub.processes = ci.target;
    }
    std::vector<int> ak;
    for (auto [o, l] : above_spans) ak.insert(ak.end(), key.begin() + o, key.begin() + o + l);
    sub.table[ak] += p;
  }
  for (auto& [bk, sub] : ci.by_value) {
    const double m = block_mass[bk];
    for (auto& [k, p] : sub.table) p /= m;
  }
  return ci;
}

enum class PruneVerdict { MarginalizedOut, ConditionedOut, NotLumpable };

struct PruneResult {
  PruneVerdict verdict = PruneVerdict::NotLumpable;
  TransducerNetwork reduced;               // remaining nodes
  std::vector<std::string> exposed_inputs;  // cluster outputs that became inputs
};

// Removes a node cluster when it is lumpable: clusters with no outgoing
// edges are marginalized away; clusters with no incoming edges are
// conditioned out, their outputs becoming external inputs of the reduced
// network. Anything else is refused.
inline PruneResult prune_cluster(const TransducerNetwork& net,
                                 const std::set<std::string>& cluster) {
  validate_network(net);
  for (const auto& id : cluster) net.node(id);  // existence check
  bool outgoing = false, incoming = false;
  for (const auto& n : net.nodes) {
    const bool inside = cluster.count(n.id) > 0;
    for (const auto& p : n.parents) {
      const bool parent_inside = cluster.count(p) > 0;
      if (inside && !parent_inside) incoming = true;
      if (!inside && parent_inside) outgoing = true;
    }
  }

  PruneResult res;
  if (!outgoing) {
    res.verdict = PruneVerdict::MarginalizedOut;
    res.reduced.inputs = net.inputs;
    for (const auto& n : net.nodes)
      if (!cluster.count(n.id)) res.reduced.nodes.push_back(n);
  } else if (!incoming) {
    res.verdict = PruneVerdict::ConditionedOut;
    res.reduced.inputs = net.inputs;
    for (const auto& n : net.nodes) {
      if (cluster.count(n.id)) {
        bool used = false;
        for (const auto& m : net.nodes)
          if (!cluster.count(m.id))
            for (const auto& p : m.parents)
              if (p == n.id) used = true;
        if (used) {
          res.reduced.inputs.push_back({n.id, n.machine.out});
          res.exposed_inputs.push_back(n.id);
        }
        continue;
      }
      res.reduced.nodes.push_back(n);
    }
  } else {
    res.verdict = PruneVerdict::NotLumpable;
    res.reduced = net;
  }
  return res;
}

// One conditional interface per decomposed module, I[X(n) | X(0:n)]. Their
// chain product reconstructs the joint observable distribution.
inline std::vector<ConditionalInterface> module_interfaces(const DecompositionResult& res,
                                                           const SequenceDistribution& joint) {
  std::vector<ConditionalInterface> out;
  std::vector<std::string> upstream;
  for (const auto& mod : res.modules) {
    std::vector<std::string> order = upstream;
    for (const auto& id : mod.observables) order.push_back(id);
    std::set<std::string> keep(order.begin(), order.end());
    const SequenceDistribution marg = marginalize(joint, keep);
    out.push_back(simplify_bottom(marg, order, static_cast<int>(upstream.size())));
    for (const auto& id : mod.observables) upstream.push_back(id);
  }
  return out;
}

// Evaluates the chain product of module interfaces on a full observable
// assignment; used to verify exact reconstruction of the joint.
inline double chain_product_probability(const std::vector<ConditionalInterface>& parts,
                                        const std::map<std::string, std::vector<int>>& value) {
  double p = 1.0;
  for (const auto& ci : parts) {
    std::vector<int> bk;
    for (const auto& v : ci.given) {
      const auto& seq = value.at(v.id);
      bk.insert(bk.end(), seq.begin(), seq.end());
    }
    auto it = ci.by_value.find(bk);
    if (it == ci.by_value.end()) return 0.0;
    std::vector<int> ak;
    for (const auto& v : ci.target) {
      const auto& seq = value.at(v.id);
      ak.insert(ak.end(), seq.begin(), seq.end());
    }
    auto jt = it->second.table.find(ak);
    if (jt == it->second.table.end()) return 0.0;
    p *= jt->second;
  }
  return p;
}

}  // namespace stx
