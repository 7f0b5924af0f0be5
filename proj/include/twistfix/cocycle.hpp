#pragma once

#include "twistfix/group.hpp"
#include "twistfix/phase.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace twistfix {

using RationalMatrix = std::vector<std::vector<Rational>>;

/// A 2-cocycle omega: G x G -> T on a finite abelian group, stored as exact phases.
///
/// Two presentations are supported: a rational bicharacter matrix M with
/// omega(s, t) = exp(2 pi i sum_ij s_i M_ij t_j), or a full |G|^2 table.
/// Internally every value is a numerator over one common denominator.
class Cocycle {
 public:
  /// M_ij must have a denominator dividing gcd(n_i, n_j) so omega is well defined on the
  /// quotient; otherwise std::invalid_argument.
  static Cocycle from_matrix(const Group& g, const RationalMatrix& m);
  /// Row-major |G| x |G| table. The table is rescaled by the constant coboundary
  /// conj(omega(e, e)) so that omega(e, e) = 1. No cocycle check is done here; see validate().
  static Cocycle from_table(const Group& g, const std::vector<Phase>& table);
  static Cocycle trivial(const Group& g);

  const Group& group() const noexcept { return group_; }
  Phase operator()(std::size_t s, std::size_t t) const {
    return Phase(num_[s * group_.size() + t], den_);
  }
  Complex value(std::size_t s, std::size_t t) const { return (*this)(s, t).value(); }
  /// Numerator of omega(s, t) over denominator().
  std::int64_t numerator(std::size_t s, std::size_t t) const { return num_[s * group_.size() + t]; }
  std::int64_t denominator() const noexcept { return den_; }

  const std::optional<RationalMatrix>& matrix() const noexcept { return matrix_; }
  std::vector<Phase> table() const;

  /// Pointwise product omega * omega'.
  Cocycle operator*(const Cocycle& other) const;
  /// Same group and the same phase at every pair.
  friend bool operator==(const Cocycle& a, const Cocycle& b);

 private:
  Cocycle(Group g, std::int64_t den, std::vector<std::int64_t> num, std::optional<RationalMatrix> m);

  Group group_;
  std::int64_t den_ = 1;
  std::vector<std::int64_t> num_;
  std::optional<RationalMatrix> matrix_;
};

struct CocycleValidation {
  bool valid = true;
  /// First (s, t, r) in lexicographic order violating
  /// omega(s,t) omega(s+t,r) = omega(s,t+r) omega(t,r).
  std::optional<std::array<std::size_t, 3>> failing_triple;
};

CocycleValidation validate(const Cocycle& omega);

/// h(s)(t) as an exact phase table.
class Bicharacter {
 public:
  Bicharacter(Group g, std::int64_t den, std::vector<std::int64_t> num);
  const Group& group() const noexcept { return group_; }
  Phase operator()(std::size_t s, std::size_t t) const {
    return Phase(num_[s * group_.size() + t], den_);
  }
  bool is_trivial() const;
  /// True iff each h(s) is a character and s -> h(s) is a homomorphism.
  bool is_bicharacter() const;
  friend bool operator==(const Bicharacter& a, const Bicharacter& b);

 private:
  Group group_;
  std::int64_t den_;
  std::vector<std::int64_t> num_;
};

/// h_omega(s)(t) = omega(s,t) conj(omega(t,s)).
Bicharacter antisymmetrize(const Cocycle& omega);

/// S_omega = ker h_omega, as sorted element indices.
std::vector<std::size_t> symmetrizer(const Cocycle& omega);

/// Similarity test via h_omega = h_omega'. Throws std::invalid_argument on group mismatch.
bool similar(const Cocycle& a, const Cocycle& b);

/// omega(s,t) = c(s) c(t) conj(c(s+t)). Requires c(e) = 1.
Cocycle coboundary(const Group& g, const std::vector<Phase>& c);

/// Searches for c with b = a * coboundary(c), |G| <= 16. The search walks the cyclic
/// generators: c(e_j) ranges over the n_j candidate roots forced by the cyclic relation
/// and the rest of c is propagated, so exactly prod n_j candidates are tried.
std::optional<std::vector<Phase>> find_similarity(const Cocycle& a, const Cocycle& b);

/// M - M^T for a matrix-form cocycle (the reported normal form of the class).
RationalMatrix antisymmetric_part(const Cocycle& omega);

/// For rank >= 2: M with the single entry M_10 = 1/gcd(n_0, n_1), giving the
/// clock-and-shift relation between the first two generators.
Cocycle standard_cocycle(const Group& g);

/// Parses "[[0,0],[1/4,0]]".
RationalMatrix parse_rational_matrix(std::string_view text);

}  // namespace twistfix
