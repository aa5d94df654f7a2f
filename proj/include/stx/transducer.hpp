#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "stx/alphabet.hpp"
#include "stx/common.hpp"

namespace stx {

struct KernelDims {
  int nx = 0, nr = 0, ny = 0, nrp = 0;
  bool operator==(const KernelDims&) const = default;
};

// 4-index stochastic kernel with entry (x, r, y, r') = Pr(Y=y, R'=r' | X=x, R=r),
// stored row-major in (x, r, y, r') order.
struct StochasticKernel {
  KernelDims dims;
  std::vector<double> p;

  StochasticKernel() = default;
  explicit StochasticKernel(KernelDims d)
      : dims(d),
        p(static_cast<std::size_t>(d.nx) * d.nr * d.ny * d.nrp, 0.0) {}

  std::size_t offset(int x, int r, int y, int rp) const {
    return ((static_cast<std::size_t>(x) * dims.nr + r) * dims.ny + y) * dims.nrp + rp;
  }
  double& at(int x, int r, int y, int rp) { return p[offset(x, r, y, rp)]; }
  double at(int x, int r, int y, int rp) const { return p[offset(x, r, y, rp)]; }

  // Sum over (y, r') for a fixed conditioning pair.
  double row_sum(int x, int r) const {
    double s = 0.0;
    for (int y = 0; y < dims.ny; ++y)
      for (int rp = 0; rp < dims.nrp; ++rp) s += at(x, r, y, rp);
    return s;
  }
};

// Stochastic input-output machine with latent memory (the POMDP-generalizing
// model). Immutable after construction by convention; all operations on it
// are pure.
struct Transducer {
  Alphabet in, out, latent;
  StochasticKernel kernel;
  std::vector<double> prior;  // over latent states; defaults to uniform

  Transducer() = default;
  Transducer(Alphabet in_, Alphabet out_, Alphabet latent_, StochasticKernel k,
             std::vector<double> prior_ = {})
      : in(std::move(in_)),
        out(std::move(out_)),
        latent(std::move(latent_)),
        kernel(std::move(k)),
        prior(std::move(prior_)) {
    if (prior.empty()) prior = uniform_dist(latent.size());
  }
};

struct Violation {
  std::string kind;            // "row_sum" | "negative" | "dims" | "prior"
  std::array<int, 4> index{};  // (x, r, y, r'); unused positions are -1
  double residual = 0.0;
  std::string detail;
};

inline std::vector<Violation> validate_transducer(const Transducer& t,
                                                  double tol = kDefaultTol) {
  std::vector<Violation> out;
  const KernelDims want{t.in.size(), t.latent.size(), t.out.size(), t.latent.size()};
  if (t.kernel.dims != want) {
    out.push_back({"dims", {-1, -1, -1, -1}, 0.0,
                   "kernel dims do not match alphabet sizes"});
    return out;  // indexing below would be meaningless
  }
  for (int x = 0; x < want.nx; ++x)
    for (int r = 0; r < want.nr; ++r) {
      for (int y = 0; y < want.ny; ++y)
        for (int rp = 0; rp < want.nrp; ++rp) {
          const double v = t.kernel.at(x, r, y, rp);
          if (v < -tol)
            out.push_back({"negative", {x, r, y, rp}, -v,
                           "negative kernel entry"});
        }
      const double s = t.kernel.row_sum(x, r);
      if (std::abs(s - 1.0) > tol)
        out.push_back({"row_sum", {x, r, -1, -1}, 1.0 - s,
                       "kernel row does not sum to 1"});
    }
  if (static_cast<int>(t.prior.size()) != t.latent.size()) {
    out.push_back({"prior", {-1, -1, -1, -1}, 0.0, "prior size mismatch"});
  } else {
    double s = vec_sum(t.prior);
    if (std::abs(s - 1.0) > tol)
      out.push_back({"prior", {-1, -1, -1, -1}, 1.0 - s, "prior does not sum to 1"});
    for (std::size_t i = 0; i < t.prior.size(); ++i)
      if (t.prior[i] < -tol)
        out.push_back({"prior", {static_cast<int>(i), -1, -1, -1}, -t.prior[i],
                       "negative prior entry"});
  }
  return out;
}

inline bool is_valid(const Transducer& t, double tol = kDefaultTol) {
  return validate_transducer(t, tol).empty();
}

// Per-(x, y) linear-operator view: a |R'| x |R| matrix with entry
// (r', r) = kernel(x, r, y, r'). Interface probabilities are products of
// these matrices sandwiched between the ones row vector and the prior.
inline Matrix kernel_operator(const Transducer& t, int x, int y) {
  if (x < 0 || x >= t.in.size()) throw std::invalid_argument("kernel_operator: bad input symbol");
  if (y < 0 || y >= t.out.size()) throw std::invalid_argument("kernel_operator: bad output symbol");
  Matrix m(t.kernel.dims.nrp, t.kernel.dims.nr);
  for (int r = 0; r < t.kernel.dims.nr; ++r)
    for (int rp = 0; rp < t.kernel.dims.nrp; ++rp) m.at(rp, r) = t.kernel.at(x, r, y, rp);
  return m;
}

inline Matrix kernel_operator(const Transducer& t, const std::string& x,
                              const std::string& y) {
  return kernel_operator(t, t.in.index_of(x), t.out.index_of(y));
}

// Rebuilds a mechanistically stationary transducer from a time-varying
// kernel family T(t), t = 0..H-1. The latent space is extended by a time
// index; mass moves strictly t -> t+1, and the prior starts at t = 0.
// States in the terminal layer t = H are never occupied before the horizon;
// their rows are filled with a uniform-output self-loop so the result is a
// well-formed transducer.
inline Transducer stationarize(const std::vector<StochasticKernel>& kernels,
                               const Alphabet& in, const Alphabet& out,
                               const Alphabet& latent,
                               std::vector<double> prior = {}) {
  if (kernels.empty()) throw std::invalid_argument("stationarize: empty kernel list");
  const int horizon = static_cast<int>(kernels.size());
  const KernelDims want{in.size(), latent.size(), out.size(), latent.size()};
  for (const auto& k : kernels)
    if (k.dims != want)
      throw std::invalid_argument("stationarize: kernel dims mismatch");
  if (prior.empty()) prior = uniform_dist(latent.size());

  const int nr = latent.size();
  const int layers = horizon + 1;
  std::vector<std::string> syms;
  for (int tt = 0; tt < layers; ++tt)
    for (int r = 0; r < nr; ++r)
      syms.push_back(latent.symbols[r] + "@" + std::to_string(tt));
  Alphabet big(latent.name + "xT", std::move(syms));

  auto enc = [nr](int tt, int r) { return tt * nr + r; };
  StochasticKernel k(KernelDims{in.size(), big.size(), out.size(), big.size()});
  for (int x = 0; x < want.nx; ++x)
    for (int tt = 0; tt < layers; ++tt)
      for (int r = 0; r < nr; ++r) {
        if (tt < horizon) {
          for (int y = 0; y < want.ny; ++y)
            for (int rp = 0; rp < want.nrp; ++rp)
              k.at(x, enc(tt, r), y, enc(tt + 1, rp)) = kernels[tt].at(x, r, y, rp);
        } else {
          for (int y = 0; y < want.ny; ++y)
            k.at(x, enc(tt, r), y, enc(tt, r)) = 1.0 / want.ny;
        }
      }

  std::vector<double> big_prior(big.size(), 0.0);
  for (int r = 0; r < nr; ++r) big_prior[enc(0, r)] = prior[r];
  return Transducer(in, out, big, std::move(k), std::move(big_prior));
}

}  // namespace stx
