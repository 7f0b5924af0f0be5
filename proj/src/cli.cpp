#include "twistfix/cli.hpp"

#include "twistfix/cocycle.hpp"
#include "twistfix/deformation.hpp"
#include "twistfix/errors.hpp"
#include "twistfix/presets.hpp"
#include "twistfix/proper.hpp"
#include "twistfix/sq_modules.hpp"
#include "twistfix/twisted_algebra.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iterator>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace twistfix::cli {

namespace {

using nlohmann::json;

constexpr const char* kSchema = "twistfix/1";

/// Bad user input: exit status 1.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A report under construction: JSON body plus the list of failed checks.
struct Report {
  json body = json::object();
  std::vector<std::string> failed;

  void check(const std::string& name, bool ok) {
    body["checks"][name] = ok;
    if (!ok) failed.push_back(name);
  }
};

/// Options shared by every subcommand.
struct Common {
  std::uint64_t seed = 1;
  std::string out;
  std::string format;
  std::string config;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Parses inline JSON (text starting with '{' or '[') or the contents of a file.
json parse_json(const std::string& text_or_path, const std::string& what) {
  const auto first = text_or_path.find_first_not_of(" \t\r\n");
  const bool inline_text = first != std::string::npos && (text_or_path[first] == '{' || text_or_path[first] == '[');
  const std::string text = inline_text ? text_or_path : read_file(text_or_path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError("malformed " + what + " JSON at byte " + std::to_string(e.byte) + ": " + e.what());
  }
}

void reject_unknown_keys(const json& obj, const std::vector<std::string>& allowed, const std::string& what) {
  if (!obj.is_object()) throw InputError(what + " must be a JSON object");
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw InputError("unknown key '" + key + "' in " + what);
    }
  }
}

Rational json_rational(const json& v) {
  if (v.is_number_integer()) return Rational(v.get<std::int64_t>());
  if (v.is_string()) return parse_rational(v.get<std::string>());
  throw InputError("expected a rational number (integer or \"p/q\"), got " + v.dump());
}

Complex json_complex(const json& v) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
    return {v[0].get<double>(), v[1].get<double>()};
  }
  throw InputError("expected a complex number (x or [re, im]), got " + v.dump());
}

Matrix json_matrix(const json& v, Eigen::Index d, const std::string& what) {
  if (!v.is_array() || static_cast<Eigen::Index>(v.size()) != d) {
    throw InputError(what + " must be a " + std::to_string(d) + "x" + std::to_string(d) + " array");
  }
  Matrix m(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    const auto& row = v[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != d) {
      throw InputError(what + " row " + std::to_string(i) + " must have " + std::to_string(d) + " entries");
    }
    for (Eigen::Index j = 0; j < d; ++j) m(i, j) = json_complex(row[static_cast<std::size_t>(j)]);
  }
  return m;
}

json rational_json(const Rational& q) { return to_string(q); }

json rational_matrix_json(const RationalMatrix& m) {
  json out = json::array();
  for (const auto& row : m) {
    json r = json::array();
    for (const auto& q : row) r.push_back(rational_json(q));
    out.push_back(r);
  }
  return out;
}

json element_json(const Group& g, std::size_t idx) { return g.element(idx); }

Group group_arg(const std::string& spec) {
  if (spec.empty()) throw InputError("--group is required");
  return parse_group(spec);
}

/// Cocycle from --matrix (with --group) or from a cocycle JSON {"group", "matrix" | "table"}.
Cocycle cocycle_arg(const std::string& group, const std::string& matrix, const std::string& cocycle_json) {
  if (!cocycle_json.empty()) {
    if (!group.empty() || !matrix.empty()) throw InputError("give either --cocycle or --group/--matrix, not both");
    const json spec = parse_json(cocycle_json, "cocycle");
    reject_unknown_keys(spec, {"group", "matrix", "table"}, "cocycle");
    if (!spec.contains("group") || !spec["group"].is_string()) throw InputError("cocycle needs a \"group\" string");
    const Group g = parse_group(spec["group"].get<std::string>());
    if (spec.contains("matrix") == spec.contains("table")) {
      throw InputError("cocycle needs exactly one of \"matrix\" and \"table\"");
    }
    if (spec.contains("matrix")) {
      const auto& m = spec["matrix"];
      if (m.is_string()) return Cocycle::from_matrix(g, parse_rational_matrix(m.get<std::string>()));
      if (!m.is_array()) throw InputError("\"matrix\" must be an array of rows");
      RationalMatrix rm;
      for (const auto& row : m) {
        if (!row.is_array()) throw InputError("\"matrix\" rows must be arrays");
        std::vector<Rational> r;
        for (const auto& v : row) r.push_back(json_rational(v));
        rm.push_back(std::move(r));
      }
      return Cocycle::from_matrix(g, rm);
    }
    const auto& t = spec["table"];
    if (!t.is_array() || t.size() != g.size()) throw InputError("\"table\" must have |G| rows");
    std::vector<Phase> table;
    for (const auto& row : t) {
      if (!row.is_array() || row.size() != g.size()) throw InputError("\"table\" rows must have |G| entries");
      for (const auto& v : row) table.emplace_back(json_rational(v));
    }
    return Cocycle::from_table(g, table);
  }
  const Group g = group_arg(group);
  if (matrix.empty()) return Cocycle::trivial(g);
  return Cocycle::from_matrix(g, parse_rational_matrix(matrix));
}

/// Action JSON: {"preset": spec} or {"group", "blocks", "action", "R"} where "action" lists one
/// unitary u_j per cyclic generator (alpha_j = Ad u_j on the block-diagonal algebra) and the
/// optional "R" lists generating elements (default: the matrix-unit basis).
Preset action_arg(const std::string& action, const std::string& preset) {
  if (action.empty() == preset.empty()) throw InputError("give exactly one of --action and --preset");
  if (!preset.empty()) return make_preset(preset);
  const json spec = parse_json(action, "action");
  if (spec.is_object() && spec.contains("preset")) {
    reject_unknown_keys(spec, {"preset"}, "action");
    if (!spec["preset"].is_string()) throw InputError("\"preset\" must be a string");
    return make_preset(spec["preset"].get<std::string>());
  }
  reject_unknown_keys(spec, {"group", "blocks", "action", "R"}, "action");
  for (const char* key : {"group", "blocks", "action"}) {
    if (!spec.contains(key)) throw InputError(std::string("action needs \"") + key + "\"");
  }
  if (!spec["group"].is_string()) throw InputError("\"group\" must be a string");
  const Group g = parse_group(spec["group"].get<std::string>());
  if (g.is_lattice()) throw InputError("action JSON describes finite groups only");
  if (!spec["blocks"].is_array() || spec["blocks"].empty()) throw InputError("\"blocks\" must be a nonempty array");
  std::vector<int> blocks;
  for (const auto& b : spec["blocks"]) {
    if (!b.is_number_integer() || b.get<int>() < 1) throw InputError("block sizes must be positive integers");
    blocks.push_back(b.get<int>());
  }
  auto algebra = StarAlgebra::matrix_blocks(blocks);
  const auto d = algebra.rep_dim();
  if (!spec["action"].is_array() || spec["action"].size() != g.rank()) {
    throw InputError("\"action\" must list one unitary per generator (" + std::to_string(g.rank()) + ")");
  }
  std::vector<Matrix> maps;
  for (std::size_t j = 0; j < g.rank(); ++j) {
    const Matrix u = json_matrix(spec["action"][j], d, "action[" + std::to_string(j) + "]");
    if ((u * u.adjoint() - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() > 1e-10) {
      throw InputError("action[" + std::to_string(j) + "] is not unitary");
    }
    Matrix map(static_cast<Eigen::Index>(algebra.dim()), static_cast<Eigen::Index>(algebra.dim()));
    for (std::size_t i = 0; i < algebra.dim(); ++i) {
      const Matrix image = u * algebra.basis()[i] * u.adjoint();
      if (algebra.distance(image) > 1e-10) {
        throw InputError("action[" + std::to_string(j) + "] does not preserve the block algebra");
      }
      map.col(static_cast<Eigen::Index>(i)) = algebra.coords(image);
    }
    maps.push_back(std::move(map));
  }
  std::vector<Matrix> R;
  if (spec.contains("R")) {
    if (!spec["R"].is_array() || spec["R"].empty()) throw InputError("\"R\" must be a nonempty array of matrices");
    for (std::size_t i = 0; i < spec["R"].size(); ++i) {
      Matrix x = json_matrix(spec["R"][i], d, "R[" + std::to_string(i) + "]");
      if (algebra.distance(x) > 1e-10) throw InputError("R[" + std::to_string(i) + "] is not in the algebra");
      R.push_back(std::move(x));
    }
  } else {
    R = algebra.basis();
  }
  try {
    auto act = GAlgebra::from_generator_maps(std::move(algebra), g, maps);
    return Preset{"custom", std::move(act), std::move(R), false};
  } catch (const InconsistentAction& e) {
    throw InputError(std::string("inconsistent action: ") + e.what());
  }
}

// ---------------------------------------------------------------------------------------------
// cocycle / twisted

Report cocycle_analyze(const Cocycle& omega, std::uint64_t seed) {
  Report r;
  const auto& g = omega.group();
  r.body["group"] = g.name();
  const auto v = validate(omega);
  r.body["valid"] = v.valid;
  r.check("cocycle_identity", v.valid);
  if (!v.valid) {
    json triple = json::array();
    for (auto idx : *v.failing_triple) triple.push_back(element_json(g, idx));
    r.body["failing_triple"] = triple;
    return r;
  }
  const auto sym = symmetrizer(omega);
  json sym_elems = json::array();
  for (auto idx : sym) sym_elems.push_back(element_json(g, idx));
  r.body["symmetrizer"] = sym_elems;
  r.body["symmetrizer_order"] = sym.size();
  if (omega.matrix()) r.body["antisymmetric_part"] = rational_matrix_json(antisymmetric_part(omega));
  const auto dec = decompose(omega, seed);
  r.body["blocks"] = dec.blocks;
  r.body["center_dim"] = dec.center_dim;
  std::size_t total = 0;
  for (int b : dec.blocks) total += static_cast<std::size_t>(b) * static_cast<std::size_t>(b);
  r.check("block_dimension_count", total == g.size());
  r.check("center_matches_symmetrizer", dec.center_dim == sym.size());
  r.body["classical_fixed_dim"] = classical_fixed_points(omega).dimension;
  return r;
}

Report cocycle_similar(const Cocycle& a, const Cocycle& b) {
  Report r;
  if (a.group() != b.group()) throw InputError("the two cocycles live on different groups");
  r.body["group"] = a.group().name();
  const auto va = validate(a);
  const auto vb = validate(b);
  r.check("cocycle_identity", va.valid && vb.valid);
  if (!va.valid || !vb.valid) return r;
  const bool sim = similar(a, b);
  r.body["similar"] = sim;
  if (a.group().size() <= 16) {
    const auto witness = find_similarity(a, b);
    r.body["witness_found"] = witness.has_value();
    r.check("search_agrees_with_criterion", witness.has_value() == sim);
  }
  return r;
}

Report twisted_decompose(const Cocycle& omega, std::uint64_t seed) {
  Report r;
  r.body["group"] = omega.group().name();
  const auto dec = decompose(omega, seed);
  r.body["blocks"] = dec.blocks;
  r.body["center_dim"] = dec.center_dim;
  r.body["algebra_dim"] = omega.group().size();
  std::size_t total = 0;
  for (int b : dec.blocks) total += static_cast<std::size_t>(b) * static_cast<std::size_t>(b);
  r.check("block_dimension_count", total == omega.group().size());
  return r;
}

Report twisted_fixedpoints(const Cocycle& omega) {
  Report r;
  r.body["group"] = omega.group().name();
  const auto fp = classical_fixed_points(omega);
  r.body["dimension"] = fp.dimension;
  r.check("fixed_dimension_one", fp.dimension == 1);
  return r;
}

// ---------------------------------------------------------------------------------------------
// proper

Report proper_analyze(const Preset& p, std::uint64_t seed) {
  Report r;
  const auto& act = p.action;
  const auto& R = p.R;
  const auto& g = act.group();
  r.body["action"] = p.name;
  r.body["group"] = g.name();
  r.body["algebra_dim"] = act.algebra().dim();
  r.body["generators"] = R.size();

  const auto rep = crossed_rep(act);
  r.body["crossed_dim"] = rep.crossed_dim;
  r.body["faithful"] = rep.faithful;

  const auto p1 = p1_check(R, act);
  double p1_max = 0.0;
  for (const auto& pair : p1.pairs) p1_max = std::max(p1_max, pair.total);
  r.body["p1"] = {{"pairs", p1.pairs.size()}, {"max_total", p1_max}, {"passed", p1.passed}};
  r.check("p1_integrable", p1.passed);

  const auto gram = gram_positivity(R, act);
  r.body["gram_min"] = gram.min_eigenvalue;
  r.body["gram_norm"] = gram.norm;
  r.check("gram_positive", gram.min_eigenvalue >= -1e-10 * std::max(1.0, gram.norm));

  double fixed_defect = 0.0;
  double hermitian_defect = 0.0;
  for (std::size_t i = 0; i < R.size(); ++i) {
    for (std::size_t j = 0; j < R.size(); ++j) {
      const Matrix m = fix_inner(R[i], R[j], act);
      const double scale = std::max(1.0, m.norm());
      for (std::size_t t = 0; t < g.size(); ++t) fixed_defect = std::max(fixed_defect, (act.act(t, m) - m).norm() / scale);
      if (j >= i) {
        hermitian_defect = std::max(hermitian_defect, (m.adjoint() - fix_inner(R[j], R[i], act)).norm() / scale);
      }
    }
  }
  r.body["fix_inner_fixed_defect"] = fixed_defect;
  r.body["fix_inner_hermitian_defect"] = hermitian_defect;
  r.check("fix_inner_fixed", fixed_defect <= 1e-10);
  r.check("fix_inner_hermitian", hermitian_defect <= 1e-10);

  const auto sat = saturation_check(R, act);
  r.body["saturated"] = sat.saturated;
  r.body["ideal_dim"] = sat.ideal_dim;
  r.body["full_dim"] = sat.full_dim;

  const auto fp = fixed_point_algebra(R, act, seed);
  r.body["fix_blocks"] = fp.blocks;
  r.body["fix_dim"] = fp.dimension;

  const auto meq = module_equivalence_check(R, act, seed);
  r.body["module_equivalence"] = {{"ideal_dim_R", meq.ideal_dim_R},
                                  {"ideal_dim_R_tilde", meq.ideal_dim_R_tilde},
                                  {"ideal_dim_A0", meq.ideal_dim_A0},
                                  {"formula_defect", meq.formula_defect},
                                  {"equivalent", meq.equivalent}};
  r.check("module_equivalence", meq.equivalent);

  const double imp = imprimitivity_check(R, act);
  r.body["imprimitivity_defect"] = imp;
  r.check("imprimitivity", imp < 1e-10);

  r.body["dual"] = p.dual;
  if (p.dual) {
    r.check("dual_saturated", sat.saturated);
    r.check("dual_crossed_dim", rep.crossed_dim == g.size() * g.size());
    r.check("dual_fix_blocks", fp.blocks == std::vector<int>{1});
  }
  return r;
}

// ---------------------------------------------------------------------------------------------
// deform

GridSpec grid_arg(int n, int N, double L) {
  GridSpec spec{n, N, L};
  validate(spec);
  return spec;
}

double max_abs(const std::vector<Complex>& v) {
  double m = 0.0;
  for (const auto& x : v) m = std::max(m, std::abs(x));
  return m;
}

std::vector<std::size_t> sample_points(std::size_t total, int count, std::mt19937_64& rng) {
  std::vector<std::size_t> all(total);
  for (std::size_t i = 0; i < total; ++i) all[i] = i;
  if (static_cast<std::size_t>(count) >= total) return all;
  // Partial Fisher-Yates with our own index draws keeps the sample platform independent.
  for (std::size_t i = 0; i < static_cast<std::size_t>(count); ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng() % (total - i));
    std::swap(all[i], all[j]);
  }
  all.resize(static_cast<std::size_t>(count));
  std::sort(all.begin(), all.end());
  return all;
}

void write_csv(std::ostream& os, const GridFunction& f) {
  os << (f.spec.n == 1 ? "x0,re,im\n" : "x0,x1,re,im\n");
  os << std::setprecision(17);
  const auto N = static_cast<std::size_t>(f.spec.N);
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    if (f.spec.n == 1) {
      os << static_cast<double>(i) * f.spec.spacing();
    } else {
      os << static_cast<double>(i / N) * f.spec.spacing() << ',' << static_cast<double>(i % N) * f.spec.spacing();
    }
    os << ',' << f.values[i].real() << ',' << f.values[i].imag() << '\n';
  }
}

struct DeformArgs {
  int n = 2;
  int N = 128;
  double L = 16.0;
  double theta = 0.5;
  std::string f = "gaussian:1.5";
  std::string g = "gaussian:2.0";
  int points = 0;
  double tol = 1e-4;
  int samples = 3;
};

Report deform_product(const DeformArgs& a, std::uint64_t seed, GridFunction& product) {
  Report r;
  const auto spec = grid_arg(a.n, a.N, a.L);
  const auto J = SkewMatrix::standard(a.n, a.theta);
  const auto pf = parse_profile(a.f, spec);
  const auto pg = parse_profile(a.g, spec);
  const auto f = sample(spec, pf);
  const auto g = sample(spec, pg);
  auto res = deformed_product(f, g, J);
  r.body["grid"] = {{"n", spec.n}, {"N", spec.N}, {"L", spec.L}};
  r.body["theta"] = a.theta;
  r.body["f"] = a.f;
  r.body["g"] = a.g;
  r.body["max_abs"] = max_abs(res.value.values);
  r.body["high_frequency_mass"] = res.high_frequency_mass;
  r.body["warnings"] = res.warnings;
  if (J.is_zero()) {
    double err = 0.0;
    double scale = 0.0;
    for (std::size_t i = 0; i < f.values.size(); ++i) {
      const Complex pw = f.values[i] * g.values[i];
      err = std::max(err, std::abs(res.value.values[i] - pw));
      scale = std::max(scale, std::abs(pw));
    }
    const double rel = err / std::max(scale, 1e-300);
    r.body["pointwise_error"] = rel;
    r.body["equals_pointwise"] = rel <= 1e-10;
    r.check("pointwise_product", rel <= 1e-10);
  }
  if (a.points > 0) {
    std::mt19937_64 rng(seed);
    const auto pts = sample_points(spec.points(), a.points, rng);
    const auto quad = deformed_product_quad(pf, pg, spec, J, pts);
    const double rel = relative_error(res.value, quad, pts);
    r.body["oracle"] = {{"points", pts.size()}, {"relative_error", rel}, {"tolerance", a.tol}};
    r.check("oracle_agreement", rel <= a.tol);
  }
  product = std::move(res.value);
  return r;
}

Report deform_check(const DeformArgs& a, std::uint64_t seed) {
  Report r;
  const auto spec = grid_arg(a.n, a.N, a.L);
  const auto J = SkewMatrix::standard(a.n, a.theta);
  r.body["grid"] = {{"n", spec.n}, {"N", spec.N}, {"L", spec.L}};
  r.body["theta"] = a.theta;
  if (a.samples < 1) throw InputError("--samples must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> width(1.5, 2.0);
  std::uniform_int_distribution<int> shift(-spec.N / 32, spec.N / 32);
  std::uniform_int_distribution<int> freq(-1, 1);
  std::vector<GridFunction> samples;
  for (int i = 0; i < a.samples; ++i) {
    std::vector<int> s(static_cast<std::size_t>(spec.n));
    std::vector<int> k(static_cast<std::size_t>(spec.n));
    for (auto& v : s) v = shift(rng);
    for (auto& v : k) v = freq(rng);
    auto f = translate(sample(spec, gaussian(width(rng), spec)), s);
    const auto wave = sample(spec, plane_wave(k, spec));
    for (std::size_t p = 0; p < f.values.size(); ++p) f.values[p] *= wave.values[p];
    samples.push_back(std::move(f));
  }
  const auto defects = check_star_algebra(J, samples);
  r.body["involution_defect"] = defects.involution;
  r.body["associativity_defect"] = defects.associativity;
  r.check("involution", defects.involution < 1e-8);
  r.check("associativity", defects.associativity < 1e-8);

  std::uniform_int_distribution<int> wave_freq(-spec.N / 8, spec.N / 8);
  double wave_defect = 0.0;
  for (int trial = 0; trial < 4; ++trial) {
    std::vector<int> x(static_cast<std::size_t>(spec.n));
    std::vector<int> y(static_cast<std::size_t>(spec.n));
    std::vector<int> xy(static_cast<std::size_t>(spec.n));
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] = wave_freq(rng);
      y[i] = wave_freq(rng);
      xy[i] = x[i] + y[i];
    }
    const auto prod = deformed_product(sample(spec, plane_wave(x, spec)), sample(spec, plane_wave(y, spec)), J);
    const auto expect = sample(spec, plane_wave(xy, spec));
    const Complex phase = omega_J(J, x, y, spec.L);
    for (std::size_t p = 0; p < expect.values.size(); ++p) {
      wave_defect = std::max(wave_defect, std::abs(prod.value.values[p] - phase * expect.values[p]));
    }
  }
  r.body["plane_wave_defect"] = wave_defect;
  r.check("plane_wave_law", wave_defect <= 1e-10);
  return r;
}

// ---------------------------------------------------------------------------------------------
// torus

Report torus_subset(int k, int grid, const std::string& mask_spec, int bumps, std::uint64_t seed) {
  Report r;
  const auto mask = parse_mask(mask_spec, k, grid);
  const auto rep = example_subset(mask, grid, bumps, seed);
  r.body["mask"] = rep.mask;
  r.body["k"] = rep.k;
  r.body["grid"] = rep.grid;
  r.body["bumps"] = rep.bumps;
  r.body["inner_products"] = rep.inner_products;
  r.body["off_support_max"] = rep.off_support_max;
  r.body["commutator_max"] = rep.commutator_max;
  r.body["separated_pairs"] = rep.separated_pairs;
  r.body["tested_pairs"] = rep.tested_pairs;
  r.body["complement_separated"] = rep.complement_separated;
  r.body["complement_tested"] = rep.complement_tested;
  r.body["coverage_min"] = rep.coverage_min;
  r.body["saturated"] = rep.saturated;
  r.check("vanishes_off_support", rep.off_support_max <= 1e-10);
  r.check("commutative", rep.commutator_max <= 1e-10);
  r.check("complement_not_separated", rep.complement_separated == 0);
  r.check("separates_points", rep.separated_pairs == rep.tested_pairs);
  return r;
}

Report torus_bundle(int m, int grid, int sections) {
  Report r;
  r.body["m"] = m;
  r.body["grid"] = grid;
  r.body["sections"] = sections;
  const auto bundle = ClutchingBundle::make(m, grid);
  try {
    const auto fam = clutching_sections(m, grid, sections);
    const auto rep = fixedpoint_bundle_report(bundle, fam);
    r.body["chern"] = rep.chern;
    r.body["min_fiber_dim"] = rep.min_fiber_dim;
    r.body["max_fiber_dim"] = rep.max_fiber_dim;
    r.body["seam_defect"] = rep.seam_defect;
    r.body["min_gram_eigenvalue"] = rep.min_gram_eigenvalue;
    r.check("seam_matching", rep.seam_defect <= 1e-10);
    r.check("fiber_algebra_full", true);
    r.check("chern_equals_twist", rep.chern == m);
  } catch (const RankDeficient& e) {
    r.body["error"] = e.what();
    r.check("fiber_gram_invertible", false);
  } catch (const NotFull& e) {
    r.body["error"] = e.what();
    r.check("fiber_algebra_full", false);
  } catch (const ResolutionError& e) {
    r.body["error"] = e.what();
    r.check("chern_resolution", false);
  }
  return r;
}

// ---------------------------------------------------------------------------------------------
// driver

/// Expands --config <file> into option arguments of the selected subcommand.
std::vector<std::string> expand_config(const std::vector<std::string>& args, CLI::App& app) {
  std::vector<std::string> out;
  std::string config_path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw InputError("--config needs a file");
      config_path = args[++i];
    } else if (args[i].starts_with("--config=")) {
      config_path = args[i].substr(9);
    } else {
      out.push_back(args[i]);
    }
  }
  if (config_path.empty()) return out;
  if (out.size() < 2) throw InputError("--config needs a subcommand (e.g. 'proper analyze --config f.json')");
  CLI::App* group = app.get_subcommand_no_throw(out[0]);
  CLI::App* cmd = group ? group->get_subcommand_no_throw(out[1]) : nullptr;
  if (!cmd) throw InputError("unknown command '" + out[0] + " " + out[1] + "'");
  const json cfg = parse_json(read_file(config_path), "config");
  if (!cfg.is_object()) throw InputError("config must be a JSON object");
  std::vector<std::string> injected;
  for (const auto& [key, value] : cfg.items()) {
    const std::string name = "--" + key;
    if (key == "config" || !cmd->get_option_no_throw(name)) throw InputError("unknown config key '" + key + "'");
    if (value.is_boolean()) {
      if (value.get<bool>()) injected.push_back(name);
    } else if (value.is_string()) {
      injected.push_back(name);
      injected.push_back(value.get<std::string>());
    } else if (value.is_number()) {
      injected.push_back(name);
      injected.push_back(value.dump());
    } else {
      injected.push_back(name);
      injected.push_back(value.dump());
    }
  }
  // Config values come first so explicit flags given later take precedence for single options.
  std::vector<std::string> merged(out.begin(), out.begin() + 2);
  merged.insert(merged.end(), injected.begin(), injected.end());
  merged.insert(merged.end(), out.begin() + 2, out.end());
  return merged;
}

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--seed", c.seed, "Seed for randomized steps (recorded in the report)");
  cmd->add_option("--out", c.out, "Write the report (or CSV samples) to this file");
  cmd->add_option("--format", c.format, "json or csv (csv: deform product samples only)")
      ->check(CLI::IsMember({"json", "csv"}));
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"twistfix: twisted group algebras, proper actions and fixed-point algebras"};
  app.name("twistfix");
  app.require_subcommand(1);
  // Options may repeat through --config expansion; the last value wins.
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  Common common;
  std::string group, matrix, cocycle, group2, matrix2, cocycle2, action, preset, preset2, mask = "full";
  DeformArgs deform;
  int k = 2, grid = 64, bumps = 12, m = 0, sections = 4;

  auto* cocycle_cmd = app.add_subcommand("cocycle", "2-cocycles on finite abelian groups")->require_subcommand(1);
  auto* twisted_cmd = app.add_subcommand("twisted", "Twisted group algebras")->require_subcommand(1);
  auto* proper_cmd = app.add_subcommand("proper", "Proper actions and fixed-point algebras")->require_subcommand(1);
  auto* deform_cmd = app.add_subcommand("deform", "Deformed products on R^n")->require_subcommand(1);
  auto* torus_cmd = app.add_subcommand("torus", "Sequence modules and torus examples")->require_subcommand(1);

  auto add_cocycle_opts = [&](CLI::App* cmd) {
    cmd->add_option("--group", group, "Group spec, e.g. Z4xZ4");
    cmd->add_option("--matrix", matrix, "Bicharacter matrix, e.g. [[0,0],[1/4,0]]");
    cmd->add_option("--cocycle", cocycle, "Cocycle JSON (inline or file)");
  };
  auto* c_analyze = cocycle_cmd->add_subcommand("analyze", "Validate and analyze a cocycle");
  add_cocycle_opts(c_analyze);
  auto* c_similar = cocycle_cmd->add_subcommand("similar", "Compare two cocycles up to coboundaries");
  add_cocycle_opts(c_similar);
  c_similar->add_option("--matrix2", matrix2, "Second bicharacter matrix (same group)");
  c_similar->add_option("--cocycle2", cocycle2, "Second cocycle JSON");
  auto* t_decompose = twisted_cmd->add_subcommand("decompose", "Wedderburn blocks of C[G, omega]");
  add_cocycle_opts(t_decompose);
  auto* t_fixed = twisted_cmd->add_subcommand("fixedpoints", "Fixed points of the dual action");
  add_cocycle_opts(t_fixed);

  auto add_action_opts = [&](CLI::App* cmd) {
    cmd->add_option("--action", action, "Action JSON (inline or file)");
    cmd->add_option("--preset", preset, "Preset action, e.g. dual:Z2, swap, trivial:Z2:1, inner:Z2");
  };
  auto* p_analyze = proper_cmd->add_subcommand("analyze", "Frame report for a G-algebra");
  add_action_opts(p_analyze);
  auto* p_tensor = proper_cmd->add_subcommand("tensor", "Frame report for a tensor product of two actions");
  add_action_opts(p_tensor);
  p_tensor->add_option("--preset2", preset2, "Second preset")->required();
  auto* p_inflate = proper_cmd->add_subcommand("inflate", "Frame report for an inflated action");
  add_action_opts(p_inflate);
  p_inflate->add_option("--group", group, "Group G reducing coordinatewise onto the action's group")->required();

  auto add_grid_opts = [&](CLI::App* cmd) {
    cmd->add_option("--n", deform.n, "Dimension (1 or 2)");
    cmd->add_option("--N", deform.N, "Grid points per axis (power of two)");
    cmd->add_option("--L", deform.L, "Period length");
    cmd->add_option("--theta", deform.theta, "Deformation parameter");
  };
  auto* d_product = deform_cmd->add_subcommand("product", "Deformed product of two profiles");
  add_grid_opts(d_product);
  d_product->add_option("--f", deform.f, "First profile (gaussian:s, wave:a0,a1, const:c)");
  d_product->add_option("--g", deform.g, "Second profile");
  d_product->add_option("--points", deform.points, "Oracle comparison points (0 disables)");
  d_product->add_option("--tol", deform.tol, "Relative tolerance for the oracle comparison")
      ->check(CLI::PositiveNumber);
  auto* d_check = deform_cmd->add_subcommand("check", "*-algebra identities and plane-wave law");
  add_grid_opts(d_check);
  d_check->add_option("--samples", deform.samples, "Number of random sample functions");

  auto* s_subset = torus_cmd->add_subcommand("subset", "Fixed-point algebra of an open subset");
  s_subset->add_option("--k", k, "Torus dimension (1 or 2)");
  s_subset->add_option("--grid", grid, "Grid points per axis");
  s_subset->add_option("--mask", mask, "full, disk:r, strip:a,b or bitmap:<path>");
  s_subset->add_option("--bumps", bumps, "Number of bump generators");
  auto* s_bundle = torus_cmd->add_subcommand("bundle", "Fixed-point algebra of the bundle C + L_m");
  s_bundle->add_option("--m", m, "Twist integer");
  s_bundle->add_option("--grid", grid, "Grid points per axis (>= 16)");
  s_bundle->add_option("--sections", sections, "Number of sections");

  for (auto* cmd : {c_analyze, c_similar, t_decompose, t_fixed, p_analyze, p_tensor, p_inflate, d_product, d_check,
                    s_subset, s_bundle}) {
    add_common(cmd, common);
  }

  std::string command;
  Report report;
  GridFunction product;
  try {
    auto expanded = expand_config(args, app);
    std::vector<std::string> reversed(expanded.rbegin(), expanded.rend());
    try {
      app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
      out << app.help();
      return kExitOk;
    } catch (const CLI::ParseError& e) {
      throw InputError(e.what());
    }
    for (auto* grp : app.get_subcommands()) {
      for (auto* sub : grp->get_subcommands()) command = grp->get_name() + " " + sub->get_name();
    }
    const bool csv = common.format == "csv" || (common.format.empty() && common.out.ends_with(".csv"));
    if (csv && command != "deform product") throw InputError("csv output is only available for 'deform product'");

    if (command == "cocycle analyze") {
      report = cocycle_analyze(cocycle_arg(group, matrix, cocycle), common.seed);
    } else if (command == "cocycle similar") {
      const auto a = cocycle_arg(group, matrix, cocycle);
      const auto b = cocycle2.empty() ? cocycle_arg(group.empty() ? a.group().name() : group, matrix2, "")
                                      : cocycle_arg("", "", cocycle2);
      report = cocycle_similar(a, b);
    } else if (command == "twisted decompose") {
      report = twisted_decompose(cocycle_arg(group, matrix, cocycle), common.seed);
    } else if (command == "twisted fixedpoints") {
      report = twisted_fixedpoints(cocycle_arg(group, matrix, cocycle));
    } else if (command == "proper analyze") {
      report = proper_analyze(action_arg(action, preset), common.seed);
    } else if (command == "proper tensor") {
      report = proper_analyze(tensor_preset(action_arg(action, preset), make_preset(preset2)), common.seed);
    } else if (command == "proper inflate") {
      report = proper_analyze(inflate_preset(action_arg(action, preset), group_arg(group)), common.seed);
    } else if (command == "deform product") {
      report = deform_product(deform, common.seed, product);
    } else if (command == "deform check") {
      report = deform_check(deform, common.seed);
    } else if (command == "torus subset") {
      report = torus_subset(k, grid, mask, bumps, common.seed);
    } else if (command == "torus bundle") {
      report = torus_bundle(m, grid, sections);
    } else {
      throw InputError("unknown command");
    }

    report.body["schema"] = kSchema;
    report.body["command"] = command;
    report.body["seed"] = common.seed;
    report.body["passed"] = report.failed.empty();
    if (!report.body.contains("checks")) report.body["checks"] = json::object();
    const std::string text = report.body.dump(2) + "\n";

    if (csv) {
      if (common.out.empty()) throw InputError("csv output needs --out <file>");
      std::ofstream file(common.out, std::ios::binary);
      if (!file) throw InputError("cannot write '" + common.out + "'");
      write_csv(file, product);
      out << text;
    } else if (!common.out.empty()) {
      std::ofstream file(common.out, std::ios::binary);
      if (!file) throw InputError("cannot write '" + common.out + "'");
      file << text;
    } else {
      out << text;
    }
    if (!report.failed.empty()) {
      for (const auto& name : report.failed) err << "check failed: " << name << "\n";
      return kExitCheck;
    }
    return kExitOk;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const InconsistentAction& e) {
    err << "error: inconsistent action: " << e.what() << "\n";
    return kExitInput;
  } catch (const InconsistentAlgebra& e) {
    err << "error: inconsistent algebra: " << e.what() << "\n";
    return kExitInput;
  } catch (const IllConditioned& e) {
    err << "check failed: well_conditioned (" << e.what() << ")\n";
    return kExitCheck;
  } catch (const NotStrictlyConvergent& e) {
    err << "check failed: strict_convergence (" << e.what() << ")\n";
    return kExitCheck;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }
}

}  // namespace twistfix::cli
