#pragma once

#include "twistfix/phase.hpp"

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace twistfix {

using Element = std::vector<std::int64_t>;

/// Result of adding two points of a truncated lattice window. Sums are never wrapped.
struct WindowSum {
  Element value;
  bool out_of_window = false;
};

/// A finite abelian group Z_{n1} x ... x Z_{nk}, or a truncated window {-R..R}^k of Z^k.
///
/// Finite-group elements are addressed by a mixed-radix index (first coordinate most
/// significant); all arithmetic on indices is exact. Every group here is discrete and
/// abelian, so the modular function is identically 1.
class Group {
 public:
  /// Throws std::invalid_argument when any order is < 1 or the list is empty.
  static Group finite(std::vector<std::int64_t> orders);
  /// Throws std::invalid_argument unless rank >= 1 and radius >= 1.
  static Group lattice(int rank, int radius);

  bool is_lattice() const noexcept { return lattice_; }
  std::size_t size() const noexcept { return size_; }
  std::size_t rank() const noexcept { return orders_.size(); }
  /// Cyclic orders (finite case); for a window each entry is 2R+1.
  const std::vector<std::int64_t>& orders() const noexcept { return orders_; }
  int radius() const noexcept { return radius_; }

  Element element(std::size_t index) const;
  std::size_t index(const Element& g) const;
  bool contains(const Element& g) const;

  std::size_t identity() const;
  /// Finite groups only.
  std::size_t add(std::size_t a, std::size_t b) const;
  std::size_t neg(std::size_t a) const;
  std::size_t sub(std::size_t a, std::size_t b) const { return add(a, neg(b)); }
  std::size_t order_of(std::size_t a) const;

  /// Lattice windows flag sums that leave the window; finite groups reduce mod n_j.
  WindowSum add(const Element& a, const Element& b) const;

  double modular_weight(std::size_t) const noexcept { return 1.0; }

  /// exp(2 pi i sum_j g_j h_j / n_j): the character h evaluated at g (finite groups only).
  Phase dual_pair(std::size_t g, std::size_t h) const;

  /// "Z4xZ4", "lattice:k=2,R=16".
  std::string name() const;

  /// Index of the generator e_j (1 in coordinate j, 0 elsewhere).
  std::size_t generator(std::size_t j) const;

  friend bool operator==(const Group& a, const Group& b) {
    return a.lattice_ == b.lattice_ && a.orders_ == b.orders_ && a.radius_ == b.radius_;
  }
  friend bool operator!=(const Group& a, const Group& b) { return !(a == b); }

 private:
  Group() = default;
  void build_tables();

  bool lattice_ = false;
  int radius_ = 0;
  std::vector<std::int64_t> orders_;
  std::size_t size_ = 0;
  // Immutable after construction; shared between copies.
  std::shared_ptr<const std::vector<std::uint32_t>> add_table_;
  std::shared_ptr<const std::vector<std::uint32_t>> neg_table_;
};

/// Parses "Z4xZ4", "Z2xZ3", "Z6" or "lattice:k=2,R=16".
Group parse_group(std::string_view spec);

/// G x H with the orders of G first.
Group product(const Group& g, const Group& h);

/// Throws std::invalid_argument unless both are the same finite group.
void require_same_group(const Group& a, const Group& b, std::string_view what);

}  // namespace twistfix
