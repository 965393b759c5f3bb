// Copyright 2026 The pcefold Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "pcefold/ansatz.hpp"
#include "pcefold/encoding.hpp"
#include "pcefold/error.hpp"

namespace pcefold {

using Complex = std::complex<double>;

inline constexpr int kMaxQubits = 24;

/// Dense n-qubit state. Qubit 0 is the least-significant bit of the index.
class StateVector {
 public:
  explicit StateVector(int n) : n_(n) {
    if (n < 1) throw Error(Errc::InvalidArgument, "need at least one qubit");
    if (n > kMaxQubits) throw Error(Errc::RegisterTooLarge, std::to_string(n) + " qubits exceeds the cap");
    amps_.assign(std::size_t{1} << n, Complex{0.0, 0.0});
    amps_[0] = 1.0;
  }

  int n() const { return n_; }
  std::size_t dim() const { return amps_.size(); }
  std::span<const Complex> amplitudes() const { return amps_; }
  std::span<Complex> amplitudes() { return amps_; }

  double norm() const {
    double s = 0.0;
    for (const auto& a : amps_) s += std::norm(a);
    return std::sqrt(s);
  }

  /// exp(-i theta Y / 2)
  void apply_ry(int q, double theta) {
    ry_one(amps_.data(), amps_.size(), q, std::cos(0.5 * theta), std::sin(0.5 * theta));
  }

  /// R_y(theta) on every qubit. Qubits below kBlockBits are rotated one
  /// cache-sized block at a time; the rest two at a time, so each pass over
  /// the amplitudes applies a 4x4 product rotation.
  void apply_ry_all(double theta) {
    const double c = std::cos(0.5 * theta), s = std::sin(0.5 * theta);
    const int low = std::min(n_, kBlockBits);
    const std::size_t block = std::size_t{1} << low;
    for (std::size_t base = 0; base < amps_.size(); base += block) {
      Complex* v = amps_.data() + base;
      int q = 0;
      for (; q + 1 < low; q += 2) ry_pair(v, block, q, c, s);
      if (q < low) ry_one(v, block, q, c, s);
    }
    int q = low;
    for (; q + 1 < n_; q += 2) ry_pair(amps_.data(), amps_.size(), q, c, s);
    if (q < n_) ry_one(amps_.data(), amps_.size(), q, c, s);
  }

  /// MS(theta) on each pair in order. Runs of consecutive pairs that act
  /// only on qubits below kBlockBits share one blocked pass.
  void apply_ms_list(std::span<const QubitPair> pairs, double theta) {
    const double c = std::cos(0.5 * theta), s = std::sin(0.5 * theta);
    const int low = std::min(n_, kBlockBits);
    const std::size_t block = std::size_t{1} << low;
    std::size_t g = 0;
    while (g < pairs.size()) {
      std::size_t end = g;
      while (end < pairs.size() && pairs[end].b < low) ++end;
      if (end > g) {
        for (std::size_t base = 0; base < amps_.size(); base += block)
          for (std::size_t k = g; k < end; ++k) ms_kernel(amps_.data() + base, block, pairs[k].a, pairs[k].b, c, s);
        g = end;
      } else {
        ms_kernel(amps_.data(), amps_.size(), pairs[g].a, pairs[g].b, c, s);
        ++g;
      }
    }
  }

  /// exp(-i theta/4 (XX + YY)): identity on |00>, |11>; on {|01>, |10>}
  /// cos(theta/2) on the diagonal and -i sin(theta/2) off it.
  void apply_ms(int a, int b, double theta) {
    ms_kernel(amps_.data(), amps_.size(), std::min(a, b), std::max(a, b), std::cos(0.5 * theta), std::sin(0.5 * theta));
  }

  void apply_h(int q) {
    const double r = 1.0 / std::sqrt(2.0);
    const std::size_t bit = std::size_t{1} << q;
    for (std::size_t k = 0; k < amps_.size() / 2; ++k) {
      const std::size_t i = insert_zero(k, q);
      const Complex a0 = amps_[i], a1 = amps_[i | bit];
      amps_[i] = r * (a0 + a1);
      amps_[i | bit] = r * (a0 - a1);
    }
  }

  void apply_sdg(int q) {
    const std::size_t bit = std::size_t{1} << q;
    for (std::size_t k = 0; k < amps_.size() / 2; ++k) {
      auto& v = amps_[insert_zero(k, q) | bit];
      v = {v.imag(), -v.real()};
    }
  }

  /// Rotate so that a computational-basis measurement reads the given
  /// Pauli on every qubit (H for X, S-dagger then H for Y).
  void rotate_to_basis(Pauli basis) {
    if (basis == Pauli::ZZ) return;
    for (int q = 0; q < n_; ++q) {
      if (basis == Pauli::YY) apply_sdg(q);
      apply_h(q);
    }
  }

  std::vector<double> probabilities() const {
    std::vector<double> p(amps_.size());
    for (std::size_t i = 0; i < amps_.size(); ++i) p[i] = std::norm(amps_[i]);
    return p;
  }

 private:
  /// Spreads k around a zero at bit position q.
  static std::size_t insert_zero(std::size_t k, int q) {
    const std::size_t low = k & ((std::size_t{1} << q) - 1);
    return ((k ^ low) << 1) | low;
  }

  static void ry_one(Complex* v, std::size_t dim, int q, double c, double s) {
    const std::size_t bit = std::size_t{1} << q;
    for (std::size_t k = 0; k < dim / 2; ++k) {
      const std::size_t i = insert_zero(k, q);
      const Complex a0 = v[i], a1 = v[i | bit];
      v[i] = c * a0 - s * a1;
      v[i | bit] = s * a0 + c * a1;
    }
  }

  static void ry_pair(Complex* v, std::size_t dim, int q, double c, double s) {
    const std::size_t b0 = std::size_t{1} << q, b1 = b0 << 1;
    for (std::size_t k = 0; k < dim / 4; ++k) {
      const std::size_t i = insert_zero(insert_zero(k, q), q + 1);
      const Complex a00 = v[i], a01 = v[i | b0], a10 = v[i | b1], a11 = v[i | b0 | b1];
      // rotate qubit q, then qubit q + 1
      const Complex x00 = c * a00 - s * a01, x01 = s * a00 + c * a01;
      const Complex x10 = c * a10 - s * a11, x11 = s * a10 + c * a11;
      v[i] = c * x00 - s * x10;
      v[i | b1] = s * x00 + c * x10;
      v[i | b0] = c * x01 - s * x11;
      v[i | b0 | b1] = s * x01 + c * x11;
    }
  }

  /// a < b required. Maps x -> c x - i s y on each {|01>, |10>} pair.
  static void ms_kernel(Complex* v, std::size_t dim, int a, int b, double c, double s) {
    const std::size_t ba = std::size_t{1} << a, bb = std::size_t{1} << b;
    for (std::size_t k = 0; k < dim / 4; ++k) {
      const std::size_t base = insert_zero(insert_zero(k, a), b);
      const Complex x = v[base | ba], y = v[base | bb];
      v[base | ba] = {c * x.real() + s * y.imag(), c * x.imag() - s * y.real()};
      v[base | bb] = {c * y.real() + s * x.imag(), c * y.imag() - s * x.real()};
    }
  }

  static constexpr int kBlockBits = 12;

  int n_;
  std::vector<Complex> amps_;
};

inline StateVector simulate(const CircuitSpec& spec, std::span<const double> params) {
  if (params.size() != spec.param_count()) {
    throw Error(Errc::ParamLengthMismatch, "expected " + std::to_string(spec.param_count()) + " parameters");
  }
  if (spec.n > kMaxQubits) throw Error(Errc::RegisterTooLarge, "register too large");
  StateVector psi(spec.n);
  for (int l = 0; l < spec.p; ++l) {
    psi.apply_ry_all(params[CircuitSpec::theta_index(l)]);
    const double phi = params[CircuitSpec::phi_index(l)];
    for (const auto& sub : spec.layers[l].sublayers) psi.apply_ms_list(sub, phi);
  }
  psi.apply_ry_all(params[CircuitSpec::theta_index(spec.p)]);
  return psi;
}

enum class EvSource { exact, sampled };

struct EvVector {
  std::vector<double> values;
  EvSource source = EvSource::exact;
  int shots = 0;

  std::size_t size() const { return values.size(); }
};

namespace detail {

/// In-place Walsh-Hadamard transform: out[mask] = sum_x in[x] (-1)^{|x & mask|}.
inline void walsh_hadamard(std::vector<double>& v) {
  for (std::size_t h = 1; h < v.size(); h <<= 1) {
    for (std::size_t i = 0; i < v.size(); i += h << 1) {
      for (std::size_t j = i; j < i + h; ++j) {
        const double x = v[j], y = v[j + h];
        v[j] = x + y;
        v[j + h] = x - y;
      }
    }
  }
}

inline void check_encoding(const StateVector& psi, const EncodingMap& enc) {
  if (enc.n != psi.n()) throw Error(Errc::QubitMismatch, "encoding register differs from state register");
}

}  // namespace detail

/// Exact <P_k> for every slot. Each measurement setting is one basis
/// rotation followed by a Walsh-Hadamard transform of the outcome
/// distribution, which yields every ZZ-type parity at once.
inline EvVector expectations(const StateVector& psi, const EncodingMap& enc) {
  detail::check_encoding(psi, enc);
  EvVector ev;
  ev.values.assign(enc.slots.size(), 0.0);
  for (Pauli basis : {Pauli::XX, Pauli::YY, Pauli::ZZ}) {
    bool needed = false;
    for (const auto& s : enc.slots) needed |= (s.species == basis);
    if (!needed) continue;
    std::vector<double> spectrum;
    if (basis == Pauli::ZZ) {
      spectrum = psi.probabilities();
    } else {
      StateVector rotated = psi;
      rotated.rotate_to_basis(basis);
      spectrum = rotated.probabilities();
    }
    detail::walsh_hadamard(spectrum);
    for (std::size_t k = 0; k < enc.slots.size(); ++k) {
      const auto& s = enc.slots[k];
      if (s.species != basis) continue;
      const std::size_t mask = (std::size_t{1} << s.a) | (std::size_t{1} << s.b);
      ev.values[k] = std::clamp(spectrum[mask], -1.0, 1.0);
    }
  }
  return ev;
}

/// Shot-sampled estimate: `shots` computational-basis samples in each of the
/// X, Y and Z settings; each correlator is the mean parity of its two bits.
inline EvVector sample_expectations(const StateVector& psi, const EncodingMap& enc, int shots, std::uint64_t seed) {
  detail::check_encoding(psi, enc);
  if (shots < 1) throw Error(Errc::ZeroShots, "shots must be >= 1");
  EvVector ev;
  ev.values.assign(enc.slots.size(), 0.0);
  ev.source = EvSource::sampled;
  ev.shots = shots;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (Pauli basis : {Pauli::XX, Pauli::YY, Pauli::ZZ}) {
    bool needed = false;
    for (const auto& s : enc.slots) needed |= (s.species == basis);
    if (!needed) continue;
    StateVector rotated = psi;
    rotated.rotate_to_basis(basis);
    std::vector<double> cdf = rotated.probabilities();
    for (std::size_t i = 1; i < cdf.size(); ++i) cdf[i] += cdf[i - 1];
    const double total = cdf.back();
    std::vector<std::uint32_t> counts(cdf.size(), 0);
    for (int s = 0; s < shots; ++s) {
      const double u = unit(rng) * total;
      auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
      if (it == cdf.end()) --it;
      ++counts[static_cast<std::size_t>(it - cdf.begin())];
    }
    // sparse pass over observed outcomes only
    std::vector<std::pair<std::size_t, std::uint32_t>> seen;
    for (std::size_t i = 0; i < counts.size(); ++i)
      if (counts[i]) seen.emplace_back(i, counts[i]);
    for (std::size_t k = 0; k < enc.slots.size(); ++k) {
      const auto& sl = enc.slots[k];
      if (sl.species != basis) continue;
      long long acc = 0;
      for (const auto& [x, c] : seen) {
        const bool parity = (((x >> sl.a) ^ (x >> sl.b)) & 1u) != 0;
        acc += parity ? -static_cast<long long>(c) : static_cast<long long>(c);
      }
      ev.values[k] = std::clamp(static_cast<double>(acc) / shots, -1.0, 1.0);
    }
  }
  return ev;
}

}  // namespace pcefold
