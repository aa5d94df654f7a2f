#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "stx/coarse.hpp"
#include "stx/decompose.hpp"
#include "stx/epsilon.hpp"
#include "stx/info.hpp"
#include "stx/process.hpp"

namespace stx {

using json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Transducer: {"in": [...], "out": [...], "latent": [...], "prior": [...],
//              "kernel": [x][r][y][r']}

inline json to_json(const Transducer& t) {
  json j;
  j["in"] = t.in.symbols;
  j["out"] = t.out.symbols;
  j["latent"] = t.latent.symbols;
  j["prior"] = t.prior;
  json kx = json::array();
  for (int x = 0; x < t.in.size(); ++x) {
    json kr = json::array();
    for (int r = 0; r < t.latent.size(); ++r) {
      json ky = json::array();
      for (int y = 0; y < t.out.size(); ++y) {
        json krp = json::array();
        for (int rp = 0; rp < t.latent.size(); ++rp) krp.push_back(t.kernel.at(x, r, y, rp));
        ky.push_back(std::move(krp));
      }
      kr.push_back(std::move(ky));
    }
    kx.push_back(std::move(kr));
  }
  j["kernel"] = std::move(kx);
  return j;
}

inline Transducer transducer_from_json(const json& j) {
  Alphabet in("X", j.at("in").get<std::vector<std::string>>());
  Alphabet out("Y", j.at("out").get<std::vector<std::string>>());
  Alphabet lat("R", j.at("latent").get<std::vector<std::string>>());
  std::vector<double> prior;
  if (j.contains("prior")) prior = j.at("prior").get<std::vector<double>>();
  StochasticKernel k(KernelDims{in.size(), lat.size(), out.size(), lat.size()});
  const auto& kx = j.at("kernel");
  if (static_cast<int>(kx.size()) != in.size())
    throw std::invalid_argument("transducer JSON: kernel x-dimension mismatch");
  for (int x = 0; x < in.size(); ++x) {
    const auto& kr = kx.at(x);
    if (static_cast<int>(kr.size()) != lat.size())
      throw std::invalid_argument("transducer JSON: kernel r-dimension mismatch");
    for (int r = 0; r < lat.size(); ++r) {
      const auto& ky = kr.at(r);
      if (static_cast<int>(ky.size()) != out.size())
        throw std::invalid_argument("transducer JSON: kernel y-dimension mismatch");
      for (int y = 0; y < out.size(); ++y) {
        const auto& krp = ky.at(y);
        if (static_cast<int>(krp.size()) != lat.size())
          throw std::invalid_argument("transducer JSON: kernel r'-dimension mismatch");
        for (int rp = 0; rp < lat.size(); ++rp) k.at(x, r, y, rp) = krp.at(rp).get<double>();
      }
    }
  }
  return Transducer(std::move(in), std::move(out), std::move(lat), std::move(k),
                    std::move(prior));
}

// ---------------------------------------------------------------------------
// Network: {"inputs": [{"id","symbols"}], "nodes": [{"id","parents","transducer"}]}
// The "inputs" field is optional; node order must be a valid causal order.

inline json to_json(const TransducerNetwork& net) {
  json j;
  if (!net.inputs.empty()) {
    json ins = json::array();
    for (const auto& in : net.inputs)
      ins.push_back({{"id", in.id}, {"symbols", in.alphabet.symbols}});
    j["inputs"] = std::move(ins);
  }
  json nodes = json::array();
  for (const auto& n : net.nodes)
    nodes.push_back(
        {{"id", n.id}, {"parents", n.parents}, {"transducer", to_json(n.machine)}});
  j["nodes"] = std::move(nodes);
  return j;
}

inline TransducerNetwork network_from_json(const json& j) {
  TransducerNetwork net;
  if (j.contains("inputs"))
    for (const auto& e : j.at("inputs"))
      net.inputs.push_back({e.at("id").get<std::string>(),
                            Alphabet(e.at("id").get<std::string>(),
                                     e.at("symbols").get<std::vector<std::string>>())});
  for (const auto& e : j.at("nodes"))
    net.nodes.push_back({e.at("id").get<std::string>(),
                         transducer_from_json(e.at("transducer")),
                         e.at("parents").get<std::vector<std::string>>()});
  validate_network(net);
  return net;
}

// ---------------------------------------------------------------------------
// SequenceDistribution: entries sorted by canonical key for stable diffs.

inline json to_json(const SequenceDistribution& d) {
  json j;
  j["horizon"] = d.horizon;
  json procs = json::array();
  for (const auto& p : d.processes)
    procs.push_back({{"id", p.id},
                     {"alphabet", p.alphabet.symbols},
                     {"role", p.role == Role::Latent ? "latent" : "observable"}});
  j["processes"] = std::move(procs);
  json entries = json::array();
  for (const auto& [key, p] : d.table) {
    json seqs;
    int off = 0;
    for (std::size_t i = 0; i < d.processes.size(); ++i) {
      const int len = d.seq_len(i);
      json seq = json::array();
      for (int t = 0; t < len; ++t) seq.push_back(d.processes[i].alphabet.symbols[key[off + t]]);
      seqs[d.processes[i].id] = std::move(seq);
      off += len;
    }
    entries.push_back({{"seqs", std::move(seqs)}, {"p", p}});
  }
  j["entries"] = std::move(entries);
  return j;
}

inline SequenceDistribution distribution_from_json(const json& j) {
  SequenceDistribution d;
  d.horizon = j.at("horizon").get<int>();
  for (const auto& e : j.at("processes"))
    d.processes.push_back(
        {e.at("id").get<std::string>(),
         Alphabet(e.at("id").get<std::string>(), e.at("alphabet").get<std::vector<std::string>>()),
         e.at("role").get<std::string>() == "latent" ? Role::Latent : Role::Observable});
  for (const auto& e : j.at("entries")) {
    std::vector<int> key;
    for (std::size_t i = 0; i < d.processes.size(); ++i) {
      const auto& seq = e.at("seqs").at(d.processes[i].id);
      if (static_cast<int>(seq.size()) != d.seq_len(i))
        throw std::invalid_argument("distribution JSON: sequence length mismatch for '" +
                                    d.processes[i].id + "'");
      for (const auto& s : seq) key.push_back(d.processes[i].alphabet.index_of(s.get<std::string>()));
    }
    d.table[key] = e.at("p").get<double>();
  }
  return d;
}

// ---------------------------------------------------------------------------
// Reports

inline json to_json(const MeasureReport& r) {
  return json{{"measure", r.measure},
              {"horizon", r.horizon},
              {"tolerance", r.tolerance},
              {"total_bits", r.total_bits},
              {"per_t_terms", r.per_t_terms}};
}

inline json to_json(const DecompositionResult& r) {
  json mods = json::array();
  for (const auto& m : r.modules)
    mods.push_back({{"observables", m.observables},
                    {"latents", m.latents},
                    {"residual", m.residual}});
  return json{{"mode", r.mode},
              {"horizon", r.horizon},
              {"tolerance", r.tol},
              {"modules", std::move(mods)},
              {"unassigned_latents", r.unassigned_latents}};
}

inline json to_json(const EpsilonTransducer& e) {
  json states = json::array();
  for (const auto& s : e.states) {
    json rep_x = json::array(), rep_y = json::array();
    for (int x : s.rep_x) rep_x.push_back(e.in.symbols[x]);
    for (int y : s.rep_y) rep_y.push_back(e.out.symbols[y]);
    states.push_back({{"id", s.id},
                      {"representative", {{"x", std::move(rep_x)}, {"y", std::move(rep_y)}}}});
  }
  json transitions = json::array();
  for (const auto& [key, next] : e.transitions) {
    const auto& [s, x, y] = key;
    transitions.push_back(
        {{"state", s}, {"x", e.in.symbols[x]}, {"y", e.out.symbols[y]}, {"next", next}});
  }
  json emissions = json::array();
  for (const auto& [key, dist] : e.emission)
    emissions.push_back({{"state", key.first}, {"x", e.in.symbols[key.second]}, {"p", dist}});
  return json{{"in", e.in.symbols},       {"out", e.out.symbols},
              {"h_past", e.h_past},       {"h_future", e.h_future},
              {"tolerance", e.tol},       {"states", std::move(states)},
              {"transitions", std::move(transitions)},
              {"emissions", std::move(emissions)},
              {"prior", e.prior}};
}

inline json to_json(const ConditionalInterface& ci) {
  json given = json::array(), target = json::array();
  for (const auto& v : ci.given) given.push_back(v.id);
  for (const auto& v : ci.target) target.push_back(v.id);
  json blocks = json::array();
  for (const auto& [bk, dist] : ci.by_value) {
    json value;
    int off = 0;
    for (const auto& v : ci.given) {
      json seq = json::array();
      for (int t = 0; t < ci.horizon; ++t) seq.push_back(v.alphabet.symbols[bk[off + t]]);
      value[v.id] = std::move(seq);
      off += ci.horizon;
    }
    blocks.push_back({{"given", std::move(value)}, {"dist", to_json(dist)}});
  }
  return json{{"horizon", ci.horizon},
              {"given", std::move(given)},
              {"target", std::move(target)},
              {"blocks", std::move(blocks)}};
}

inline json to_json(const std::vector<Violation>& vs) {
  json arr = json::array();
  for (const auto& v : vs)
    arr.push_back({{"kind", v.kind},
                   {"index", std::vector<int>(v.index.begin(), v.index.end())},
                   {"residual", v.residual},
                   {"detail", v.detail}});
  return json{{"valid", vs.empty()}, {"violations", std::move(arr)}};
}

// Output distribution of a single interface evaluation, with the output
// sequence rendered as a concatenated symbol string.
inline json eval_to_json(const std::map<std::vector<int>, double>& dist,
                         const Alphabet& out) {
  json arr = json::array();
  for (const auto& [ys, p] : dist) {
    std::string s;
    for (int y : ys) s += out.symbols[y];
    arr.push_back({{"y", s}, {"p", p}});
  }
  return json{{"dist", std::move(arr)}};
}

// ---------------------------------------------------------------------------

inline json load_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::invalid_argument("cannot open '" + path + "'");
  return json::parse(f);
}

inline void save_json(const std::string& path, const json& j) {
  std::ofstream f(path);
  if (!f) throw std::invalid_argument("cannot write '" + path + "'");
  f << j.dump(2) << "\n";
}

}  // namespace stx
