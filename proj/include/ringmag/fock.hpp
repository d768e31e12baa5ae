#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "ringmag/types.hpp"

namespace ringmag {

// Occupation basis for N sites x 2 circulation modes at fixed total number M.
// State layout: (n+_0, n-_0, n+_1, n-_1, ...), enumerated lexicographically.
struct FockSpace {
  int sites = 0;
  int particles = 0;
  std::vector<std::vector<int>> states;
  std::map<std::vector<int>, int> index;

  int dim() const { return static_cast<int>(states.size()); }
};

namespace detail {
inline void enumerate_occ(int site, int sites, int left, std::vector<int>& acc,
                          std::vector<std::vector<int>>& out) {
  if (site == sites) {
    if (left == 0) out.push_back(acc);
    return;
  }
  for (int np = 0; np <= left; ++np) {
    for (int nm = 0; nm + np <= left; ++nm) {
      acc[2 * site] = np;
      acc[2 * site + 1] = nm;
      enumerate_occ(site + 1, sites, left - np - nm, acc, out);
    }
  }
  acc[2 * site] = 0;
  acc[2 * site + 1] = 0;
}
}  // namespace detail

inline FockSpace make_fock_space(int sites, int particles) {
  if (sites < 1 || particles < 0)
    throw std::invalid_argument("fock: need sites >= 1, particles >= 0");
  FockSpace f;
  f.sites = sites;
  f.particles = particles;
  std::vector<int> acc(2 * sites, 0);
  detail::enumerate_occ(0, sites, particles, acc, f.states);
  for (int k = 0; k < f.dim(); ++k) f.index[f.states[k]] = k;
  // dimension must equal C(M + 2N - 1, M)
  const int modes = 2 * sites;
  double expect = 1.0;
  for (int i = 1; i <= particles; ++i)
    expect *= static_cast<double>(modes - 1 + i) / i;
  if (static_cast<long long>(expect + 0.5) != f.dim())
    throw std::runtime_error("fock: basis enumeration lost states");
  return f;
}

// Indices of unit-filled states (one boson per site), ordered so that entry k
// is the spin configuration with bit j of k set iff site j holds the (+l)
// boson (spin up).
inline std::vector<int> mott_states(const FockSpace& f) {
  if (f.particles != f.sites)
    throw std::invalid_argument("mott_states: requires unit filling M = N");
  std::vector<int> out(static_cast<std::size_t>(1) << f.sites, -1);
  for (int k = 0; k < f.dim(); ++k) {
    const auto& s = f.states[k];
    bool mott = true;
    std::uint64_t bits = 0;
    for (int j = 0; j < f.sites; ++j) {
      const int tot = s[2 * j] + s[2 * j + 1];
      if (tot != 1) {
        mott = false;
        break;
      }
      if (s[2 * j] == 1) bits |= (std::uint64_t{1} << j);
    }
    if (mott) out[bits] = k;
  }
  for (int v : out)
    if (v < 0) throw std::runtime_error("mott_states: incomplete manifold");
  return out;
}

}  // namespace ringmag
