// `stx` — command-line front end for the exact finite-horizon transducer
// toolkit. Every subcommand reads/writes the JSON formats published under
// schemas/ and produces byte-identical output for identical inputs.
//
// Exit codes: 0 success, 1 domain error (bad input), 2 size-guard violation,
// 64 unknown subcommand.

#include <cstdlib>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "stx/coarse.hpp"
#include "stx/compose.hpp"
#include "stx/decompose.hpp"
#include "stx/epsilon.hpp"
#include "stx/info.hpp"
#include "stx/json_io.hpp"
#include "stx/process.hpp"
#include "stx/selftest.hpp"

namespace {

using namespace stx;

constexpr int kMaxAlphabet = 4;
constexpr int kMaxLatent = 6;
constexpr int kMaxNodes = 6;
constexpr int kMaxHorizon = 8;

struct Options {
  bool unsafe_large = false;
  double tol = kDefaultTol;
  std::uint64_t seed = 0;
  int threads = 1;
};

void guard_horizon(int h, const Options& o) {
  if (!o.unsafe_large && h > kMaxHorizon)
    throw GuardError("horizon " + std::to_string(h) + " exceeds limit " +
                     std::to_string(kMaxHorizon) + " (use --unsafe-large to override)");
}

void guard_transducer(const Transducer& t, const Options& o) {
  if (o.unsafe_large) return;
  if (t.in.size() > kMaxAlphabet || t.out.size() > kMaxAlphabet)
    throw GuardError("alphabet size exceeds limit " + std::to_string(kMaxAlphabet) +
                     " (use --unsafe-large to override)");
  if (t.latent.size() > kMaxLatent)
    throw GuardError("latent size exceeds limit " + std::to_string(kMaxLatent) +
                     " (use --unsafe-large to override)");
}

void guard_network(const TransducerNetwork& net, const Options& o) {
  if (o.unsafe_large) return;
  if (static_cast<int>(net.nodes.size()) > kMaxNodes)
    throw GuardError("node count exceeds limit " + std::to_string(kMaxNodes) +
                     " (use --unsafe-large to override)");
  for (const auto& n : net.nodes) guard_transducer(n.machine, o);
}

// A machine file holds either a single transducer or a network (detected by
// the "nodes" key); networks are flattened to a single machine.
Transducer load_machine(const std::string& path, const Options& o) {
  const json j = load_json(path);
  if (j.contains("nodes")) {
    const TransducerNetwork net = network_from_json(j);
    guard_network(net, o);
    return network_flatten(net);
  }
  const Transducer t = transducer_from_json(j);
  guard_transducer(t, o);
  return t;
}

// Input sequences are given as concatenated symbols when every symbol is a
// single character (e.g. "0110"), or comma-separated otherwise.
std::vector<int> parse_sequence(const std::string& text, const Alphabet& a) {
  std::vector<int> out;
  bool single = true;
  for (const auto& s : a.symbols)
    if (s.size() != 1) single = false;
  if (single && text.find(',') == std::string::npos) {
    for (char c : text) out.push_back(a.index_of(std::string(1, c)));
    return out;
  }
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(a.index_of(tok));
  return out;
}

std::vector<std::string> split_ids(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ','))
    if (!tok.empty()) out.push_back(tok);
  return out;
}

// Cut specifications accept either a bare index "2" or a range "0..2",
// meaning the half-open block [0, 2).
int parse_cut(const std::string& text) {
  const auto pos = text.find("..");
  const std::string tail = pos == std::string::npos ? text : text.substr(pos + 2);
  return std::stoi(tail);
}

std::vector<std::string> observable_ids(const SequenceDistribution& d) {
  std::vector<std::string> out;
  for (const auto& p : d.processes)
    if (p.role == Role::Observable) out.push_back(p.id);
  return out;
}

std::vector<std::string> latent_ids(const SequenceDistribution& d) {
  std::vector<std::string> out;
  for (const auto& p : d.processes)
    if (p.role == Role::Latent) out.push_back(p.id);
  return out;
}

void emit(const json& j) { std::cout << j.dump(2) << "\n"; }

int run(int argc, char** argv) {
  CLI::App app{"exact finite-horizon stochastic transducer toolkit"};
  app.require_subcommand(1);

  Options opt;
  if (const char* env = std::getenv("STX_TOL")) opt.tol = std::strtod(env, nullptr);
  app.add_flag("--unsafe-large", opt.unsafe_large,
               "override the exhaustive-enumeration size guards");
  app.add_option("--tol", opt.tol, "numeric tolerance (also settable via STX_TOL)");
  app.add_option("--seed", opt.seed, "seed for randomized fixtures (default 0)");
  app.add_option("--threads", opt.threads, "cap on worker threads");

  // validate ----------------------------------------------------------------
  auto* c_validate = app.add_subcommand("validate", "check stochasticity of a machine file");
  std::string v_file;
  c_validate->add_option("--file", v_file, "transducer or network JSON")->required();

  // compose -----------------------------------------------------------------
  auto* c_compose = app.add_subcommand("compose", "compose two transducers");
  std::string comp_first, comp_second, comp_op = "pair";
  c_compose->add_option("--first", comp_first, "first machine (closer to the input)")
      ->required();
  c_compose->add_option("--second", comp_second, "second machine")->required();
  c_compose->add_option("--op", comp_op, "pair|series|parallel|convergent (default pair)");

  // flatten -----------------------------------------------------------------
  auto* c_flatten = app.add_subcommand("flatten", "flatten a network to one transducer");
  std::string f_net;
  c_flatten->add_option("--net", f_net, "network JSON")->required();

  // eval --------------------------------------------------------------------
  auto* c_eval = app.add_subcommand("eval", "output distribution for one input sequence");
  std::string e_net, e_input;
  c_eval->add_option("--net", e_net, "transducer or network JSON")->required();
  c_eval->add_option("--input", e_input, "input symbol sequence, e.g. 01")->required();

  // joint -------------------------------------------------------------------
  auto* c_joint = app.add_subcommand("joint", "exact joint process of a network");
  std::string j_net;
  int j_horizon = 0;
  bool j_latents = false;
  std::vector<std::string> j_drives;
  c_joint->add_option("--net", j_net, "network JSON")->required();
  c_joint->add_option("--horizon", j_horizon, "number of steps")->required();
  c_joint->add_flag("--latents", j_latents, "include latent-state sequences");
  c_joint->add_option("--drive", j_drives,
                      "fixed drive id=SEQ for an external input (default: uniform IID)");

  // feedback ----------------------------------------------------------------
  auto* c_feedback = app.add_subcommand("feedback", "closed-loop agent/environment joint");
  std::string fb_env, fb_agent;
  int fb_horizon = 0;
  c_feedback->add_option("--env", fb_env, "environment transducer JSON")->required();
  c_feedback->add_option("--agent", fb_agent, "agent transducer JSON")->required();
  c_feedback->add_option("--horizon", fb_horizon, "number of steps")->required();

  // measure -----------------------------------------------------------------
  auto* c_measure = app.add_subcommand("measure", "acausality / intransducibility of a joint");
  std::string m_kind, m_joint, m_in, m_out, m_latent;
  int m_horizon = 0;
  c_measure->add_option("--kind", m_kind, "acausality|intransducibility")->required();
  c_measure->add_option("--joint", m_joint, "SequenceDistribution JSON")->required();
  c_measure->add_option("--in", m_in, "comma-separated input process ids")->required();
  c_measure->add_option("--out", m_out, "comma-separated output process ids")->required();
  c_measure->add_option("--latent", m_latent, "comma-separated latent process ids");
  c_measure->add_option("--horizon", m_horizon, "number of steps")->required();

  // decompose ---------------------------------------------------------------
  auto* c_decompose = app.add_subcommand("decompose", "split a joint into prime modules");
  std::string d_joint, d_mode = "acausality", d_obs, d_latent;
  int d_horizon = 0;
  c_decompose->add_option("--joint", d_joint, "SequenceDistribution JSON")->required();
  c_decompose->add_option("--mode", d_mode, "acausality|intransducibility");
  c_decompose->add_option("--horizon", d_horizon, "number of steps")->required();
  c_decompose->add_option("--obs", d_obs,
                          "comma-separated observables (default: all observable processes)");
  c_decompose->add_option("--latent", d_latent,
                          "comma-separated latents (default: all latent processes)");

  // coarsegrain -------------------------------------------------------------
  auto* c_coarse = app.add_subcommand("coarsegrain", "marginalize or condition a causal block");
  std::string cg_joint, cg_keep, cg_cond, cg_order;
  c_coarse->add_option("--joint", cg_joint, "SequenceDistribution JSON")->required();
  c_coarse->add_option("--keep", cg_keep, "keep the bottom block, e.g. 0..2 or 2");
  c_coarse->add_option("--condition-on", cg_cond, "condition on the bottom block, e.g. 0..1");
  c_coarse->add_option("--order", cg_order,
                       "comma-separated causal order (default: file process order)");

  // epsilon -----------------------------------------------------------------
  auto* c_epsilon = app.add_subcommand("epsilon", "finite-horizon causal states");
  std::string ep_net;
  int ep_past = 0, ep_future = 0;
  c_epsilon->add_option("--net", ep_net, "transducer or network JSON")->required();
  c_epsilon->add_option("--h-past", ep_past, "history depth")->required();
  c_epsilon->add_option("--h-future", ep_future, "future depth")->required();

  // selftest ----------------------------------------------------------------
  auto* c_selftest = app.add_subcommand("selftest", "run the ten-criterion acceptance suite");

  // let global flags (--tol, --unsafe-large, ...) appear after the subcommand
  for (auto* sub : app.get_subcommands([](const CLI::App*) { return true; }))
    sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);  // prints help text, exit 0
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  if (c_validate->parsed()) {
    const json j = load_json(v_file);
    std::vector<Violation> all;
    if (j.contains("nodes")) {
      const TransducerNetwork net = network_from_json(j);
      guard_network(net, opt);
      for (const auto& n : net.nodes)
        for (auto v : validate_transducer(n.machine, opt.tol)) {
          v.detail = n.id + ": " + v.detail;
          all.push_back(std::move(v));
        }
    } else {
      const Transducer t = transducer_from_json(j);
      guard_transducer(t, opt);
      all = validate_transducer(t, opt.tol);
    }
    emit(to_json(all));
    return 0;
  }

  if (c_compose->parsed()) {
    const Transducer t = load_machine(comp_first, opt);
    const Transducer u = load_machine(comp_second, opt);
    Transducer v;
    if (comp_op == "pair") v = compose_pair(t, u);
    else if (comp_op == "series") v = compose_series(t, u);
    else if (comp_op == "parallel") v = compose_parallel(t, u);
    else if (comp_op == "convergent") v = compose_convergent(t, u);
    else throw std::invalid_argument("compose: unknown --op '" + comp_op + "'");
    emit(to_json(v));
    return 0;
  }

  if (c_flatten->parsed()) {
    const TransducerNetwork net = network_from_json(load_json(f_net));
    guard_network(net, opt);
    emit(to_json(network_flatten(net)));
    return 0;
  }

  if (c_eval->parsed()) {
    const Transducer t = load_machine(e_net, opt);
    const std::vector<int> xs = parse_sequence(e_input, t.in);
    guard_horizon(static_cast<int>(xs.size()), opt);
    emit(eval_to_json(interface_eval(t, xs), t.out));
    return 0;
  }

  if (c_joint->parsed()) {
    guard_horizon(j_horizon, opt);
    const TransducerNetwork net = network_from_json(load_json(j_net));
    guard_network(net, opt);
    std::map<std::string, ExternalDrive> drives;
    for (const auto& in : net.inputs) drives[in.id] = {uniform_dist(in.alphabet.size()), {}};
    for (const auto& spec : j_drives) {
      const auto eq = spec.find('=');
      if (eq == std::string::npos)
        throw std::invalid_argument("joint: --drive expects id=SEQ, got '" + spec + "'");
      const std::string id = spec.substr(0, eq);
      bool found = false;
      for (const auto& in : net.inputs)
        if (in.id == id) {
          drives[id] = {{}, parse_sequence(spec.substr(eq + 1), in.alphabet)};
          found = true;
        }
      if (!found) throw std::invalid_argument("joint: unknown external input '" + id + "'");
    }
    emit(to_json(joint_process(net, drives, j_horizon, j_latents)));
    return 0;
  }

  if (c_feedback->parsed()) {
    guard_horizon(fb_horizon, opt);
    const Transducer env = load_machine(fb_env, opt);
    const Transducer agent = load_machine(fb_agent, opt);
    Matrix init(env.in.size(), agent.latent.size());
    const double w = 1.0 / (env.in.size() * agent.latent.size());
    for (int x = 0; x < init.rows; ++x)
      for (int s = 0; s < init.cols; ++s) init.at(x, s) = w;
    emit(to_json(feedback_joint(env, agent, init, fb_horizon)));
    return 0;
  }

  if (c_measure->parsed()) {
    guard_horizon(m_horizon, opt);
    const SequenceDistribution d = distribution_from_json(load_json(m_joint));
    MeasureReport rep;
    if (m_kind == "acausality")
      rep = acausality(d, split_ids(m_in), split_ids(m_out), m_horizon);
    else if (m_kind == "intransducibility")
      rep = intransducibility(d, split_ids(m_in), split_ids(m_out), split_ids(m_latent),
                              m_horizon);
    else
      throw std::invalid_argument("measure: unknown --kind '" + m_kind + "'");
    emit(to_json(rep));
    return 0;
  }

  if (c_decompose->parsed()) {
    guard_horizon(d_horizon, opt);
    const SequenceDistribution d = distribution_from_json(load_json(d_joint));
    const auto obs = d_obs.empty() ? observable_ids(d) : split_ids(d_obs);
    DecompositionResult res;
    if (d_mode == "acausality") {
      res = decompose_observable(d, obs, d_horizon, opt.tol);
    } else if (d_mode == "intransducibility") {
      const auto lat = d_latent.empty() ? latent_ids(d) : split_ids(d_latent);
      res = decompose_with_latents(d, obs, lat, d_horizon, opt.tol);
    } else {
      throw std::invalid_argument("decompose: unknown --mode '" + d_mode + "'");
    }
    emit(to_json(res));
    return 0;
  }

  if (c_coarse->parsed()) {
    if (cg_keep.empty() == cg_cond.empty())
      throw std::invalid_argument("coarsegrain: give exactly one of --keep / --condition-on");
    const SequenceDistribution d = distribution_from_json(load_json(cg_joint));
    const auto order = cg_order.empty() ? observable_ids(d) : split_ids(cg_order);
    if (!cg_keep.empty())
      emit(to_json(simplify_top(d, order, parse_cut(cg_keep))));
    else
      emit(to_json(simplify_bottom(d, order, parse_cut(cg_cond))));
    return 0;
  }

  if (c_epsilon->parsed()) {
    guard_horizon(ep_past + ep_future, opt);
    const Transducer t = load_machine(ep_net, opt);
    const Interface iface = interface_from_transducer(t, ep_past + ep_future);
    emit(to_json(causal_states(iface, ep_past, ep_future, opt.tol)));
    return 0;
  }

  if (c_selftest->parsed()) {
    const auto results = selftest::run_all(opt.seed, std::cout);
    for (const auto& r : results)
      if (!r.pass) return 1;
    return 0;
  }

  return 64;  // unreachable: require_subcommand(1) enforces a choice
}

}  // namespace

int main(int argc, char** argv) {
  static const std::set<std::string> known{
      "validate", "compose",    "flatten",     "eval",    "joint",   "feedback",
      "measure",  "decompose",  "coarsegrain", "epsilon", "selftest"};
  // distinguish "unknown subcommand" (64) from other argument errors (1)
  bool has_sub = false;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "-h" || a == "--help") {
      has_sub = true;
      break;
    }
    if (!a.empty() && a[0] != '-') {
      if (known.count(a)) has_sub = true;
      break;
    }
  }
  if (argc < 2 || !has_sub) {
    std::cerr << "usage: stx <subcommand> [options]\n"
              << "subcommands: validate compose flatten eval joint feedback measure\n"
              << "             decompose coarsegrain epsilon selftest\n"
              << "run 'stx --help' for details\n";
    return 64;
  }
  try {
    return run(argc, argv);
  } catch (const stx::GuardError& e) {
    std::cerr << "guard: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
