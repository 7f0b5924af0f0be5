#include "twistfix/group.hpp"

#include <charconv>
#include <numeric>
#include <stdexcept>

namespace twistfix {

namespace {

constexpr std::size_t kTableLimit = 4096;

std::int64_t mod(std::int64_t a, std::int64_t n) {
  const auto r = a % n;
  return r < 0 ? r + n : r;
}

std::int64_t parse_positive(std::string_view s, std::string_view spec) {
  std::int64_t v = 0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (s.empty() || ec != std::errc() || ptr != end) {
    throw std::invalid_argument("malformed group spec '" + std::string(spec) + "'");
  }
  return v;
}

}  // namespace

Group Group::finite(std::vector<std::int64_t> orders) {
  if (orders.empty()) throw std::invalid_argument("group needs at least one cyclic factor");
  Group g;
  std::size_t size = 1;
  for (auto n : orders) {
    if (n < 1) throw std::invalid_argument("cyclic order must be >= 1, got " + std::to_string(n));
    size *= static_cast<std::size_t>(n);
  }
  g.orders_ = std::move(orders);
  g.size_ = size;
  g.build_tables();
  return g;
}

Group Group::lattice(int rank, int radius) {
  if (rank < 1) throw std::invalid_argument("lattice rank must be >= 1");
  if (radius < 1) throw std::invalid_argument("lattice window radius must be >= 1");
  Group g;
  g.lattice_ = true;
  g.radius_ = radius;
  g.orders_.assign(static_cast<std::size_t>(rank), 2 * radius + 1);
  g.size_ = 1;
  for (auto n : g.orders_) g.size_ *= static_cast<std::size_t>(n);
  return g;
}

void Group::build_tables() {
  if (size_ > kTableLimit) return;
  auto add = std::make_shared<std::vector<std::uint32_t>>(size_ * size_);
  auto neg = std::make_shared<std::vector<std::uint32_t>>(size_);
  for (std::size_t a = 0; a < size_; ++a) {
    const auto ea = element(a);
    Element n(ea.size());
    for (std::size_t j = 0; j < ea.size(); ++j) n[j] = mod(-ea[j], orders_[j]);
    (*neg)[a] = static_cast<std::uint32_t>(index(n));
    for (std::size_t b = 0; b < size_; ++b) {
      const auto eb = element(b);
      Element s(ea.size());
      for (std::size_t j = 0; j < ea.size(); ++j) s[j] = mod(ea[j] + eb[j], orders_[j]);
      (*add)[a * size_ + b] = static_cast<std::uint32_t>(index(s));
    }
  }
  add_table_ = std::move(add);
  neg_table_ = std::move(neg);
}

Element Group::element(std::size_t index) const {
  if (index >= size_) throw std::out_of_range("group element index");
  Element e(orders_.size());
  for (std::size_t j = orders_.size(); j-- > 0;) {
    const auto n = static_cast<std::size_t>(orders_[j]);
    e[j] = static_cast<std::int64_t>(index % n);
    index /= n;
  }
  if (lattice_) {
    for (auto& c : e) c -= radius_;
  }
  return e;
}

bool Group::contains(const Element& g) const {
  if (g.size() != orders_.size()) return false;
  for (std::size_t j = 0; j < g.size(); ++j) {
    if (lattice_) {
      if (g[j] < -radius_ || g[j] > radius_) return false;
    } else if (g[j] < 0 || g[j] >= orders_[j]) {
      return false;
    }
  }
  return true;
}

std::size_t Group::index(const Element& g) const {
  if (g.size() != orders_.size()) throw std::invalid_argument("element has wrong rank");
  std::size_t idx = 0;
  for (std::size_t j = 0; j < g.size(); ++j) {
    std::int64_t c = g[j];
    if (lattice_) {
      if (c < -radius_ || c > radius_) throw std::out_of_range("element outside lattice window");
      c += radius_;
    } else {
      c = mod(c, orders_[j]);
    }
    idx = idx * static_cast<std::size_t>(orders_[j]) + static_cast<std::size_t>(c);
  }
  return idx;
}

std::size_t Group::identity() const { return index(Element(orders_.size(), 0)); }

std::size_t Group::add(std::size_t a, std::size_t b) const {
  if (lattice_) throw std::logic_error("index addition is defined for finite groups only");
  if (add_table_) return (*add_table_)[a * size_ + b];
  const auto ea = element(a);
  const auto eb = element(b);
  Element s(ea.size());
  for (std::size_t j = 0; j < s.size(); ++j) s[j] = ea[j] + eb[j];
  return index(s);
}

std::size_t Group::neg(std::size_t a) const {
  if (lattice_) throw std::logic_error("index negation is defined for finite groups only");
  if (neg_table_) return (*neg_table_)[a];
  auto e = element(a);
  for (auto& c : e) c = -c;
  return index(e);
}

std::size_t Group::order_of(std::size_t a) const {
  const auto e = element(a);
  std::int64_t ord = 1;
  for (std::size_t j = 0; j < e.size(); ++j) {
    const auto n = orders_[j];
    const auto o = n / std::gcd(n, e[j]);
    ord = std::lcm(ord, o);
  }
  return static_cast<std::size_t>(ord);
}

WindowSum Group::add(const Element& a, const Element& b) const {
  if (a.size() != orders_.size() || b.size() != orders_.size()) {
    throw std::invalid_argument("element has wrong rank");
  }
  WindowSum out;
  out.value.resize(a.size());
  for (std::size_t j = 0; j < a.size(); ++j) {
    const auto s = a[j] + b[j];
    if (lattice_) {
      out.value[j] = s;
      if (s < -radius_ || s > radius_) out.out_of_window = true;
    } else {
      out.value[j] = mod(s, orders_[j]);
    }
  }
  return out;
}

Phase Group::dual_pair(std::size_t g, std::size_t h) const {
  if (lattice_) throw std::logic_error("dual pairing is defined for finite groups only");
  const auto eg = element(g);
  const auto eh = element(h);
  Rational q(0);
  for (std::size_t j = 0; j < eg.size(); ++j) q += Rational(eg[j] * eh[j], orders_[j]);
  return Phase(q);
}

std::string Group::name() const {
  if (lattice_) {
    return "lattice:k=" + std::to_string(orders_.size()) + ",R=" + std::to_string(radius_);
  }
  std::string s;
  for (std::size_t j = 0; j < orders_.size(); ++j) {
    if (j) s += 'x';
    s += 'Z' + std::to_string(orders_[j]);
  }
  return s;
}

std::size_t Group::generator(std::size_t j) const {
  Element e(orders_.size(), 0);
  e.at(j) = 1;
  return index(e);
}

Group parse_group(std::string_view spec) {
  if (spec.starts_with("lattice:")) {
    auto rest = spec.substr(8);
    int k = -1;
    int r = -1;
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const auto item = rest.substr(0, comma);
      const auto eq = item.find('=');
      if (eq == std::string_view::npos) throw std::invalid_argument("malformed group spec '" + std::string(spec) + "'");
      const auto key = item.substr(0, eq);
      const auto val = parse_positive(item.substr(eq + 1), spec);
      if (key == "k") {
        k = static_cast<int>(val);
      } else if (key == "R") {
        r = static_cast<int>(val);
      } else {
        throw std::invalid_argument("unknown lattice parameter '" + std::string(key) + "'");
      }
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (k < 0 || r < 0) throw std::invalid_argument("lattice spec needs k and R: '" + std::string(spec) + "'");
    return Group::lattice(k, r);
  }
  std::vector<std::int64_t> orders;
  std::string_view rest = spec;
  while (true) {
    const auto x = rest.find('x');
    auto factor = rest.substr(0, x);
    if (factor.empty() || factor.front() != 'Z') {
      throw std::invalid_argument("malformed group spec '" + std::string(spec) + "'");
    }
    factor.remove_prefix(1);
    orders.push_back(parse_positive(factor, spec));
    if (x == std::string_view::npos) break;
    rest.remove_prefix(x + 1);
  }
  return Group::finite(std::move(orders));
}

Group product(const Group& g, const Group& h) {
  if (g.is_lattice() || h.is_lattice()) throw std::invalid_argument("product of lattice windows is not supported");
  auto orders = g.orders();
  orders.insert(orders.end(), h.orders().begin(), h.orders().end());
  return Group::finite(std::move(orders));
}

void require_same_group(const Group& a, const Group& b, std::string_view what) {
  if (a != b) {
    throw std::invalid_argument(std::string(what) + ": group mismatch (" + a.name() + " vs " + b.name() + ")");
  }
}

}  // namespace twistfix
