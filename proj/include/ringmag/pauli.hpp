#pragma once

#include <bit>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "ringmag/types.hpp"

namespace ringmag {

// Tensor product of single-site Pauli operators, given by disjoint site
// masks. Configuration bits follow the global convention: bit j set <=>
// site j is up (sigma_z eigenvalue +1).
struct PauliString {
  std::uint32_t x = 0;
  std::uint32_t y = 0;
  std::uint32_t z = 0;

  std::uint32_t flips() const { return x | y; }
  int weight() const { return std::popcount(x | y | z); }
};

inline PauliString single_site_string(int axis, int site) {
  PauliString p;
  const std::uint32_t bit = std::uint32_t{1} << site;
  if (axis == 0)
    p.x = bit;
  else if (axis == 1)
    p.y = bit;
  else if (axis == 2)
    p.z = bit;
  else
    throw std::invalid_argument("pauli: axis must be 0, 1 or 2");
  return p;
}

inline PauliString two_site_string(int axis_a, int site_a, int axis_b,
                                   int site_b) {
  if (site_a == site_b)
    throw std::invalid_argument("pauli: two-site string needs distinct sites");
  PauliString p = single_site_string(axis_a, site_a);
  const PauliString q = single_site_string(axis_b, site_b);
  p.x |= q.x;
  p.y |= q.y;
  p.z |= q.z;
  return p;
}

// P|m> = string_amplitude(p, m) |m ^ p.flips()>.
// sigma_y sends up -> +i down and down -> -i up; sigma_z gives -1 on down.
inline Complex string_amplitude(const PauliString& p, std::uint64_t m) {
  static const Complex table[4] = {Complex(1, 0), Complex(0, 1), Complex(-1, 0),
                                   Complex(0, -1)};
  const int k =
      std::popcount(m & p.y) - std::popcount(static_cast<std::uint64_t>(p.y) & ~m);
  Complex amp = table[k & 3];
  if (std::popcount(static_cast<std::uint64_t>(p.z) & ~m) & 1) amp = -amp;
  return amp;
}

// True when every z-basis matrix element of the string is real (even number
// of sigma_y factors).
inline bool string_is_real(const PauliString& p) {
  return (std::popcount(p.y) & 1) == 0;
}

// Exact expansion of a 2^n x 2^n operator in the tensor Pauli basis.
// Weight-0/1/2 coefficients are returned structured; anything of weight >= 3
// is reported only through its largest magnitude (consistency check for
// nearest-neighbour effective Hamiltonians).
struct PauliDecomposition {
  int sites = 0;
  double c0 = 0.0;
  std::vector<Eigen::Vector3d> fields;
  // key (i, j) with i < j; entry (a, b) multiplies sigma_a_i sigma_b_j
  std::map<std::pair<int, int>, Eigen::Matrix3d> pair_terms;
  double max_weight3 = 0.0;
  double max_imag = 0.0;

  Eigen::Matrix3d pair(int i, int j) const {
    const auto it = pair_terms.find({i, j});
    return it == pair_terms.end() ? Eigen::Matrix3d::Zero().eval() : it->second;
  }
};

inline PauliDecomposition pauli_decompose(const MatrixXcd& H, int sites) {
  if (sites < 1 || sites > 8)
    throw std::invalid_argument("pauli_decompose: need 1 <= sites <= 8");
  const std::int64_t dim = std::int64_t{1} << sites;
  if (H.rows() != dim || H.cols() != dim)
    throw std::invalid_argument("pauli_decompose: dimension mismatch");

  PauliDecomposition out;
  out.sites = sites;
  out.fields.assign(sites, Eigen::Vector3d::Zero());

  std::vector<int> digits(sites, 0);
  const std::int64_t n_strings = std::int64_t{1} << (2 * sites);
  for (std::int64_t code = 0; code < n_strings; ++code) {
    PauliString p;
    std::int64_t c = code;
    for (int j = 0; j < sites; ++j, c >>= 2) {
      digits[j] = static_cast<int>(c & 3);
      if (digits[j]) {
        const PauliString s = single_site_string(digits[j] - 1, j);
        p.x |= s.x;
        p.y |= s.y;
        p.z |= s.z;
      }
    }
    // tr(P H) / 2^n; P has one entry per column
    Complex acc(0, 0);
    const std::uint64_t fl = p.flips();
    for (std::uint64_t m = 0; m < static_cast<std::uint64_t>(dim); ++m)
      acc += std::conj(string_amplitude(p, m)) * H(m ^ fl, m);
    const Complex coeff = acc / static_cast<double>(dim);
    out.max_imag = std::max(out.max_imag, std::abs(coeff.imag()));

    const int w = p.weight();
    if (w >= 3) {
      out.max_weight3 = std::max(out.max_weight3, std::abs(coeff));
      continue;
    }
    if (w == 0) {
      out.c0 = coeff.real();
    } else if (w == 1) {
      for (int j = 0; j < sites; ++j)
        if (digits[j]) out.fields[j][digits[j] - 1] = coeff.real();
    } else {
      int i = -1, j = -1;
      for (int s = 0; s < sites; ++s)
        if (digits[s]) (i < 0 ? i : j) = s;
      auto it = out.pair_terms.find({i, j});
      if (it == out.pair_terms.end())
        it = out.pair_terms.emplace(std::make_pair(i, j), Eigen::Matrix3d::Zero().eval())
                 .first;
      it->second(digits[i] - 1, digits[j] - 1) = coeff.real();
    }
  }
  return out;
}

}  // namespace ringmag
