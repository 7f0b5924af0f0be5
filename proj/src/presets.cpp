#include "twistfix/presets.hpp"

#include "twistfix/twisted_algebra.hpp"

#include <stdexcept>
#include <string>

namespace twistfix {

namespace {

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.emplace_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

GAlgebra dual_action(const Cocycle& omega) {
  const auto& g = omega.group();
  auto alg = StarAlgebra::twisted_group_algebra(omega);
  const auto n = static_cast<Eigen::Index>(g.size());
  std::vector<Matrix> maps;
  CovariantPair pair;
  pair.pi_basis = alg.basis();
  for (std::size_t chi = 0; chi < g.size(); ++chi) {
    Matrix m = Matrix::Zero(n, n);
    for (std::size_t t = 0; t < g.size(); ++t) {
      m(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(t)) = g.dual_pair(t, chi).value();
    }
    maps.push_back(m);
    // On l^2(G) multiplication by chi implements the dual action on lambda_omega(delta_t).
    pair.unitaries.push_back(m);
  }
  return GAlgebra(std::move(alg), g, std::move(maps), std::move(pair));
}

Preset make_preset(std::string_view spec) {
  const auto parts = split(spec, ':');
  const auto& kind = parts.front();
  if (kind == "dual" && (parts.size() == 2 || parts.size() == 3)) {
    const auto g = parse_group(parts[1]);
    if (g.is_lattice()) throw std::invalid_argument("dual presets need a finite group");
    Cocycle omega = Cocycle::trivial(g);
    if (parts.size() == 3) {
      if (parts[2] != "std") throw std::invalid_argument("unknown cocycle '" + parts[2] + "' in preset (expected 'std')");
      if (g.rank() < 2) throw std::invalid_argument("the standard cocycle needs a group of rank >= 2");
      omega = standard_cocycle(g);
    }
    auto act = dual_action(omega);
    auto R = act.algebra().basis();
    return {std::string(spec), std::move(act), std::move(R), true};
  }
  if (kind == "swap" && parts.size() == 1) {
    auto alg = StarAlgebra::matrix_blocks({1, 1});
    Matrix swap(2, 2);
    swap << 0, 1, 1, 0;
    auto act = GAlgebra::from_generator_maps(std::move(alg), Group::finite({2}), {swap});
    auto R = act.algebra().basis();
    return {"swap", std::move(act), std::move(R), false};
  }
  if (kind == "trivial" && parts.size() == 3) {
    const auto g = parse_group(parts[1]);
    int d = 0;
    try {
      d = std::stoi(parts[2]);
    } catch (const std::exception&) {
      throw std::invalid_argument("trivial preset needs a matrix size, got '" + parts[2] + "'");
    }
    if (d < 1 || d > 8) throw std::invalid_argument("trivial preset matrix size must be in 1..8");
    auto alg = StarAlgebra::matrix_blocks({d});
    const auto n = static_cast<Eigen::Index>(alg.dim());
    std::vector<Matrix> gens(g.rank(), Matrix::Identity(n, n));
    auto act = GAlgebra::from_generator_maps(std::move(alg), g, gens);
    auto R = act.algebra().basis();
    return {std::string(spec), std::move(act), std::move(R), false};
  }
  if (kind == "inner" && parts.size() == 2 && parts[1] == "Z2") {
    auto alg = StarAlgebra::matrix_blocks({2});
    // Ad diag(1, -1) fixes E_00, E_11 and negates E_01, E_10.
    Matrix m = Matrix::Identity(4, 4);
    m(1, 1) = -1.0;
    m(2, 2) = -1.0;
    auto act = GAlgebra::from_generator_maps(std::move(alg), Group::finite({2}), {m});
    auto R = act.algebra().basis();
    return {"inner:Z2", std::move(act), std::move(R), false};
  }
  throw std::invalid_argument("unknown preset '" + std::string(spec) +
                              "' (expected dual:<group>[:std], swap, trivial:<group>:<d>, inner:Z2)");
}

Preset tensor_preset(const Preset& a, const Preset& b) {
  auto act = tensor_action(a.action, b.action);
  auto R = act.algebra().basis();
  return {"tensor(" + a.name + "," + b.name + ")", std::move(act), std::move(R), a.dual && b.dual};
}

Preset inflate_preset(const Preset& p, const Group& g) {
  const auto q = reduction_map(g, p.action.group());
  auto act = inflate_action(p.action, g, q);
  return {"inflate(" + p.name + "," + g.name() + ")", std::move(act), p.R, false};
}

}  // namespace twistfix
