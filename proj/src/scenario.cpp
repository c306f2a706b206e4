#include "cstress/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <random>
#include <set>
#include <sstream>

#include "cstress/poly_parse.hpp"
#include "cstress/ritz.hpp"
#include "cstress/virtual_work.hpp"

namespace cstress {

namespace {

using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------- config file

struct Entry {
  std::string value;
  int line = 0;
};

using Section = std::map<std::string, Entry>;

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"", {"scenario", "seed", "cases"}},
      {"domain", {"kind", "extents", "radius", "order", "dirichlet", "cap"}},
      {"material", {"mu", "lambda", "alpha1", "alpha2"}},
      {"fields", {"u", "du", "f", "u0"}},
      {"solver", {"degree", "flavor", "perturbations"}},
      {"patch", {"A"}},
      {"output", {"dir", "tractions"}},
      {"tolerance", {}},
  };
  return keys;
}

class Reader {
 public:
  Reader(std::istream& in, std::string path) : path_(std::move(path)) {
    std::string raw;
    std::string section;
    int line = 0;
    while (std::getline(in, raw)) {
      ++line;
      std::string s = raw;
      const auto hash = s.find_first_of("#;");
      if (hash != std::string::npos) s.erase(hash);
      s = trim(s);
      if (s.empty()) continue;
      if (s.front() == '[') {
        if (s.back() != ']') fail(line, "unterminated section header");
        section = trim(s.substr(1, s.size() - 2));
        if (!known_keys().count(section)) fail(line, "unknown section [" + section + "]");
        continue;
      }
      const auto eq = s.find('=');
      if (eq == std::string::npos) fail(line, "expected 'key = value'");
      const std::string key = trim(s.substr(0, eq));
      const std::string value = trim(s.substr(eq + 1));
      if (key.empty()) fail(line, "empty key");
      const auto& allowed = known_keys().at(section);
      if (section != "tolerance" && !allowed.count(key))
        fail(line, "unknown key '" + key + "'" + (section.empty() ? "" : " in [" + section + "]"));
      auto& sec = sections_[section];
      if (sec.count(key)) fail(line, "duplicate key '" + key + "'");
      sec[key] = {value, line};
    }
  }

  [[noreturn]] void fail(int line, const std::string& msg) const {
    throw ConfigError(path_ + ":" + std::to_string(line) + ": " + msg);
  }
  [[noreturn]] void fail(const Entry& e, const std::string& msg) const { fail(e.line, msg); }

  const Entry* find(const std::string& section, const std::string& key) const {
    const auto s = sections_.find(section);
    if (s == sections_.end()) return nullptr;
    const auto k = s->second.find(key);
    return k == s->second.end() ? nullptr : &k->second;
  }

  const Section* section(const std::string& name) const {
    const auto s = sections_.find(name);
    return s == sections_.end() ? nullptr : &s->second;
  }

  double number(const Entry& e) const {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(e.value, &used);
    } catch (const std::exception&) {
      fail(e, "expected a number, got '" + e.value + "'");
    }
    if (used != e.value.size() || !std::isfinite(v)) fail(e, "expected a number, got '" + e.value + "'");
    return v;
  }

  long long integer(const Entry& e) const {
    const double v = number(e);
    if (v != std::floor(v)) fail(e, "expected an integer, got '" + e.value + "'");
    return static_cast<long long>(v);
  }

  std::vector<double> numbers(const Entry& e) const {
    std::vector<double> out;
    std::string token;
    std::istringstream is(e.value);
    while (is >> token) {
      if (token.back() == ',') token.pop_back();
      if (token.empty()) continue;
      out.push_back(number({token, e.line}));
    }
    return out;
  }

 private:
  std::string path_;
  std::map<std::string, Section> sections_;
};

ScenarioKind scenario_kind(const std::string& s) {
  if (s == "verify-identities") return ScenarioKind::kVerifyIdentities;
  if (s == "compare-bc") return ScenarioKind::kCompareBc;
  if (s == "missing-term-map") return ScenarioKind::kMissingTermMap;
  if (s == "solve") return ScenarioKind::kSolve;
  if (s == "patch-test") return ScenarioKind::kPatchTest;
  throw std::invalid_argument("unknown scenario '" + s + "'");
}

// Returns the degree of a field spec, validating it.
int field_spec_degree(const std::string& spec) {
  if (spec.rfind("random:", 0) == 0) {
    const std::string d = spec.substr(7);
    int deg = -1;
    try {
      std::size_t used = 0;
      deg = std::stoi(d, &used);
      if (used != d.size()) deg = -1;
    } catch (const std::exception&) {
      deg = -1;
    }
    if (deg < 0) throw std::invalid_argument("malformed random field '" + spec + "'");
    return deg;
  }
  return parse_vector(spec).degree();
}

// ------------------------------------------------------------------- helpers

Json to_json(const Vec3& v) { return Json::array({v[0], v[1], v[2]}); }

Json to_json(const Mat3& A) {
  Json j = Json::array();
  for (std::size_t i = 0; i < 3; ++i) j.push_back(to_json(row(A, i)));
  return j;
}

std::string literal(const PolyVector& v) {
  return "[" + to_string(v[0]) + ", " + to_string(v[1]) + ", " + to_string(v[2]) + "]";
}

Json to_json(const SurfaceWorkTerms& t) {
  return Json{{"traction_mt", t.traction_mt},         {"missing", t.missing},
              {"moment_mt", t.moment_mt},             {"moment_corrected", t.moment_corrected},
              {"edge_jump", t.edge_jump},             {"edge_curvature", t.edge_curvature},
              {"corrected", t.corrected()},           {"mt", t.mt()},
              {"mt_corrected_style", t.mt_corrected_style()}};
}

Json to_json(const DomainGeometry& d) {
  Json j;
  j["kind"] = d.kind == DomainKind::kBox ? "box" : "ball";
  if (d.kind == DomainKind::kBox)
    j["extents"] = to_json(d.spec.extents);
  else
    j["radius"] = d.spec.radius;
  j["quadrature_order"] = d.spec.quadrature_order;
  j["volume"] = d.volume;
  Json patches = Json::array();
  for (const auto& p : d.patches)
    patches.push_back({{"name", p.name}, {"dirichlet", p.dirichlet}, {"area", p.area}, {"nodes", p.nodes.size()}});
  j["patches"] = patches;
  Json edges = Json::array();
  for (const auto& e : d.edges) edges.push_back({{"name", e.name}, {"length", e.length}, {"nodes", e.nodes.size()}});
  j["edges"] = edges;
  return j;
}

class Checks {
 public:
  Checks(const ScenarioConfig& cfg, double scale) : cfg_(cfg), scale_(scale) {}

  // |actual - expected| <= tol
  void at_most(const std::string& name, double actual, double default_tol, double expected = 0.0) {
    Check c{name, expected, actual, tolerance(name, default_tol) * scale_, false, false};
    c.pass = std::abs(actual - expected) <= c.tolerance;
    list.push_back(c);
  }
  // |actual| > tol
  void at_least(const std::string& name, double actual, double threshold) {
    Check c{name, 0.0, actual, tolerance(name, threshold), true, false};
    c.pass = std::abs(actual) > c.tolerance;
    list.push_back(c);
  }
  bool configured(const std::string& name) const { return cfg_.tolerance.count(name) > 0; }
  double tolerance(const std::string& name, double fallback) {
    used_.insert(name);
    const auto it = cfg_.tolerance.find(name);
    return it == cfg_.tolerance.end() ? fallback : it->second;
  }
  void finish() const {
    for (const auto& [k, v] : cfg_.tolerance)
      if (!used_.count(k))
        throw ConfigError(cfg_.path + ": tolerance '" + k + "' is not used by scenario " +
                          to_string(cfg_.scenario));
  }

  std::vector<Check> list;

 private:
  const ScenarioConfig& cfg_;
  double scale_;
  std::set<std::string> used_;
};

struct Fields {
  explicit Fields(const ScenarioConfig& cfg) : rng(cfg.seed) {
    for (const char* name : {"u", "du", "u0"}) {
      const auto it = cfg.fields.find(name);
      if (it == cfg.fields.end()) continue;
      const std::string& spec = it->second;
      PolyVector v = spec.rfind("random:", 0) == 0 ? random_vector(rng, field_spec_degree(spec))
                                                    : parse_vector(spec);
      values.emplace(name, v);
      report[name] = {{"spec", spec}, {"value", literal(v)}};
    }
    const auto f = cfg.fields.find("f");
    if (f != cfg.fields.end() && f->second != "manufactured") {
      body_force = parse_vector(f->second);
      report["f"] = {{"spec", f->second}, {"value", literal(*body_force)}};
    } else {
      report["f"] = {{"spec", "manufactured"}};
    }
  }

  const PolyVector* get(const std::string& name) const {
    const auto it = values.find(name);
    return it == values.end() ? nullptr : &it->second;
  }

  std::mt19937_64 rng;
  std::map<std::string, PolyVector> values;
  std::optional<PolyVector> body_force;
  Json report;
};

const PolyVector& require(const Fields& f, const ScenarioConfig& cfg, const std::string& name) {
  const PolyVector* v = f.get(name);
  if (!v) throw ConfigError(cfg.path + ": scenario " + to_string(cfg.scenario) + " needs field '" + name + "'");
  return *v;
}

int max_field_degree(const ScenarioConfig& cfg) {
  int d = 0;
  for (const auto& [k, v] : cfg.fields)
    if (v != "manufactured") d = std::max(d, field_spec_degree(v));
  return d;
}

DomainGeometry build_domain(const ScenarioConfig& cfg, int field_degree) {
  DomainSpec spec = cfg.domain;
  spec.field_degree = field_degree;
  if (!cfg.order_given) spec.quadrature_order = std::max(8, required_quadrature_order(field_degree));
  try {
    return make_domain(spec);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(cfg.path + ": " + e.what());
  }
}

// Closure assertions are pinned at degree 3; higher degrees get a wider band.
double closure_tolerance(int degree) { return degree <= 3 ? 1e-8 : 1e-6; }

// ----------------------------------------------------------------- scenarios

Vec3 contraction_oracle(const Ten3& C, const Mat3& B, std::size_t i) {
  double s = 0.0;
  for (std::size_t j = 0; j < 3; ++j)
    for (std::size_t p = 0; p < 3; ++p) s += C(i, j, p) * B(p, j);
  return Vec3::unit(i) * s;
}

void verify_identities(const ScenarioConfig& cfg, Fields& fields, Checks& checks, Json& results) {
  const int cases = cfg.cases > 0 ? cfg.cases : 200;
  const MaterialParams& p = cfg.material;
  std::mt19937_64& rng = fields.rng;
  std::uniform_real_distribution<double> unit(-1.0, 1.0);

  double curl_grad = 0, div_curl = 0, skw_grad = 0, anti_axl = 0, contraction = 0, trace_free = 0,
         el = 0;
  for (int c = 0; c < cases; ++c) {
    const PolyScalar s = random_scalar(rng, 5);
    const PolyVector u = random_vector(rng, 5);
    curl_grad = std::max(curl_grad, curl_vector(grad(s)).max_abs_coefficient());
    div_curl = std::max(div_curl, div_vector(curl_vector(u)).max_abs_coefficient());
    const PolyMatrix g = grad_vector(u);
    skw_grad = std::max(skw_grad, (skw(g) - 0.5 * anti(curl_vector(u))).max_abs_coefficient());
    trace_free = std::max(trace_free, trace(couple_stress(p, u)).max_abs_coefficient());
    el = std::max(el, el_residual(p, u, manufactured_body_force(p, u)).max_abs_coefficient());

    Vec3 v;
    for (std::size_t i = 0; i < 3; ++i) v[i] = unit(rng);
    anti_axl = std::max(anti_axl, max_abs(axl(anti(v)) - v));
    anti_axl = std::max(anti_axl, max_abs(anti(axl(anti(v))) - anti(v)));

    Ten3 C;
    Mat3 B;
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) {
        B(i, j) = unit(rng);
        for (std::size_t k = 0; k < 3; ++k) C(i, j, k) = unit(rng);
      }
    const Vec3 dc = double_contract(C, B);
    Vec3 oracle;
    for (std::size_t i = 0; i < 3; ++i) oracle += contraction_oracle(C, B, i);
    contraction = std::max(contraction, max_abs(dc - oracle));
  }

  // Energy derivative against central differences on the configured domain.
  const DomainGeometry domain = build_domain(cfg, 3);
  const int pairs = std::min(cases, 30);
  const double h = 1e-4;
  double energy_fd = 0.0;
  for (int c = 0; c < pairs; ++c) {
    const PolyVector u = random_vector(rng, 3), du = random_vector(rng, 3);
    const double fd =
        (total_energy(p, u + h * du, domain) - total_energy(p, u - h * du, domain)) / (2.0 * h);
    const double iw = internal_work(p, u, du, domain);
    energy_fd = std::max(energy_fd, std::abs(fd - iw) / std::max(1.0, std::abs(iw)));
  }

  results["cases"] = cases;
  results["energy_pairs"] = pairs;
  results["curl_grad"] = curl_grad;
  results["div_curl"] = div_curl;
  results["skw_grad"] = skw_grad;
  results["anti_axl"] = anti_axl;
  results["contraction"] = contraction;
  results["trace_free"] = trace_free;
  results["el_residual"] = el;
  results["energy_derivative"] = energy_fd;
  for (const char* k : {"curl_grad", "div_curl", "skw_grad", "anti_axl", "contraction", "trace_free",
                        "el_residual"})
    checks.at_most(k, results[k].get<double>(), 1e-12);
  checks.at_most("energy_derivative", energy_fd, 1e-6);
}

void compare_bc(const ScenarioConfig& cfg, const Fields& fields, Checks& checks, Json& results,
                Json& warnings, ScenarioResult& out) {
  const PolyVector& u = require(fields, cfg, "u");
  const PolyVector& du = require(fields, cfg, "du");
  const int degree = std::max(u.degree(), du.degree());
  const DomainGeometry domain = build_domain(cfg, max_field_degree(cfg));
  const BalanceReport r = balance_report(cfg.material, u, du, domain, fields.body_force, true);

  results["internal"] = r.internal;
  results["divergence"] = r.divergence;
  results["body_force"] = r.body_force;
  results["equilibrium"] = r.equilibrium;
  results["closed"] = r.closed;
  results["scale"] = r.scale;
  results["residual_corrected"] = r.relative_residual_corrected();
  results["residual_mt"] = r.relative_residual_mt();
  results["residual_corrected_quadrature_delta"] = r.residual_corrected_quadrature_delta.value_or(0.0);
  results["residual_mt_quadrature_delta"] = r.residual_mt_quadrature_delta.value_or(0.0);
  results["mt_closure_applicable"] = r.mt_closure_applicable;
  results["discrepancy"] = r.discrepancy;
  results["missing_work"] = r.total.missing;
  results["edge_work"] = r.total.edges();
  results["missing_plus_edges"] = r.missing_plus_edges;
  results["accounting_error"] = r.accounting_error / r.scale;
  results["total"] = to_json(r.total);
  results["neumann"] = to_json(r.neumann);
  Json patches = Json::object();
  for (const auto& pw : r.patches) patches[pw.patch] = to_json(pw.terms);
  results["patches"] = patches;
  results["quadrature"] = {{"order", r.quadrature_order},
                           {"volume_nodes", r.volume_nodes},
                           {"surface_nodes", r.surface_nodes},
                           {"edge_nodes", r.edge_nodes}};

  const double tol = closure_tolerance(degree);
  checks.at_most("residual_corrected", r.relative_residual_corrected(), tol);
  checks.at_most("accounting", r.accounting_error / r.scale, tol);
  if (r.mt_closure_applicable)
    checks.at_most("residual_mt", r.relative_residual_mt(), tol);
  else
    warnings.push_back("classical traction set evaluated on a domain with edges; its closure is reported, not asserted");
  if (checks.configured("discrepancy_min")) checks.at_least("discrepancy_min", r.discrepancy, 0.0);
  if (checks.configured("missing_work_min")) checks.at_least("missing_work_min", r.total.missing, 0.0);

  if (cfg.dump_tractions) {
    const StressState state(cfg.material, u);
    const auto all = domain.all_patches();
    out.tractions = sample_tractions(state, domain, all);
  }
}

void missing_term_map(const ScenarioConfig& cfg, const Fields& fields, Checks& checks, Json& results,
                      ScenarioResult& out) {
  const PolyVector& u = require(fields, cfg, "u");
  const DomainGeometry domain = build_domain(cfg, max_field_degree(cfg));
  const StressState state(cfg.material, u);
  const PolyVector* du = fields.get("du");

  double extension_gap = 0.0;
  Json patches = Json::object();
  for (const auto& patch : domain.patches) {
    double max_m = 0.0, l1 = 0.0, work = 0.0, max_tangential = 0.0, max_normal = 0.0;
    for (const auto& q : patch.nodes) {
      const BoundaryTractions bt = boundary_tractions(state, patch, q.x);
      const Vec3& m = bt.missing;
      max_m = std::max(max_m, norm(m));
      l1 += q.w * norm(m);
      if (du) work += q.w * dot(m, du->evaluate(q.x));
      const double mn = dot(m, bt.normal);
      max_normal = std::max(max_normal, std::abs(mn));
      max_tangential = std::max(max_tangential, norm(m - mn * bt.normal));
      if (patch.shape == PatchShape::kSpherical) {
        const Vec3 lin = missing_term(state, patch, q.x, NormalExtension::kLinear);
        extension_gap = std::max(extension_gap, norm(lin - m));
      }
    }
    Json j{{"max_norm", max_m}, {"integral_norm", l1}, {"max_normal", max_normal},
           {"max_tangential", max_tangential}};
    if (du) j["work"] = work;
    patches[patch.name] = j;
  }
  results["patches"] = patches;
  double max_missing = 0.0;
  for (const auto& [name, j] : patches.items()) max_missing = std::max(max_missing, j["max_norm"].get<double>());
  results["max_missing"] = max_missing;
  if (checks.configured("missing_max_min")) checks.at_least("missing_max_min", max_missing, 0.0);

  Json edges = Json::object();
  double smooth_jump = 0.0;
  for (const auto& edge : domain.edges) {
    double side0 = 0.0, side1 = 0.0, jump = 0.0, curvature = 0.0;
    for (const auto& q : edge.nodes) {
      const EdgeJump ej = edge_jump(state, domain, edge, q);
      side0 = std::max(side0, norm(ej.side[0]));
      side1 = std::max(side1, norm(ej.side[1]));
      jump = std::max(jump, norm(ej.jump));
      curvature = std::max(curvature, norm(ej.curvature_jump));
    }
    if (!edge.geometric) smooth_jump = std::max(smooth_jump, jump);
    edges[edge.name] = {{"geometric", edge.geometric},
                        {"max_side", Json::array({side0, side1})},
                        {"max_jump", jump},
                        {"max_curvature_jump", curvature}};
  }
  results["edges"] = edges;

  if (domain.kind == DomainKind::kBall) {
    results["extension_gap"] = extension_gap;
    checks.at_most("extension_independence", extension_gap, 1e-8);
    if (!domain.edges.empty()) {
      results["smooth_edge_jump"] = smooth_jump;
      checks.at_most("smooth_edge_jump", smooth_jump, 1e-12);
    }
  }

  if (cfg.dump_tractions) {
    const auto all = domain.all_patches();
    out.tractions = sample_tractions(state, domain, all);
  }
}

void solve_scenario(const ScenarioConfig& cfg, Fields& fields, Checks& checks, Json& results) {
  const PolyVector* exact = fields.get("u");
  const PolyVector* given_u0 = fields.get("u0");
  const PolyVector u0 = given_u0 ? *given_u0 : exact ? *exact : PolyVector{};
  const int degree = std::max(max_field_degree(cfg), cfg.basis_degree);
  const DomainGeometry domain = build_domain(cfg, degree);
  const BasisSpec basis = make_basis(cfg.basis_degree, domain);

  TractionLoads loads;
  std::optional<StressState> state;
  if (exact) {
    state.emplace(cfg.material, *exact);
    loads = manufactured_loads(*state, domain, cfg.flavor);
  }
  if (fields.body_force) loads.body_force = fields.body_force;

  const QuadraticForm form = assemble(cfg.material, basis, domain, loads);
  ConstraintSet constraints = geometric_constraints(basis, domain, u0);
  const bool gauge = domain.dirichlet_patches().empty();
  if (gauge) constraints.append(gauge_constraints(basis, domain));
  const SolveReport rep = solve_equilibrium(form, constraints);

  results["basis_degree"] = cfg.basis_degree;
  results["basis_size"] = basis.size();
  results["flavor"] = to_string(cfg.flavor);
  results["gauge"] = gauge;
  results["stiffness_asymmetry"] = form.max_asymmetry;
  results["stiffness_min_eigenvalue"] = form.min_eigenvalue;
  results["stiffness_max_eigenvalue"] = form.max_eigenvalue;
  results["constraint_rows"] = constraints.rows.rows();
  results["constraint_rank"] = rep.constraint_rank;
  results["free_dimension"] = rep.free_dimension;
  results["condition_estimate"] = rep.condition_estimate;
  results["energy"] = rep.energy;
  results["strain_energy"] = rep.strain_energy;
  results["constraint_residual"] = rep.constraint_residual;
  results["optimality_residual"] = rep.optimality_residual;
  results["solution"] = literal(rep.solution);

  checks.at_most("constraint_residual", rep.constraint_residual, 1e-9);
  checks.at_most("optimality_residual", rep.optimality_residual, 1e-9);

  // Minimality against random feasible perturbations.
  const ConstraintBasis cb = constraint_basis(constraints, form.stiffness.rows());
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  int violations = 0;
  const double slack = 1e-12 * std::max(1.0, std::abs(rep.energy));
  for (int i = 0; i < cfg.perturbations && cb.null_space.cols() > 0; ++i) {
    Eigen::VectorXd y(cb.null_space.cols());
    for (Eigen::Index k = 0; k < y.size(); ++k) y(k) = unit(fields.rng);
    const double amplitude = std::pow(10.0, -3.0 * unit(fields.rng) - 3.0);
    const Eigen::VectorXd c = rep.coefficients + amplitude * (cb.null_space * y);
    if (potential(form, c) < rep.energy - slack) ++violations;
  }
  results["perturbations"] = cfg.perturbations;
  results["minimality_violations"] = violations;
  checks.at_most("minimality_violations", violations, 0.0);

  if (exact) {
    double node_error = 0.0;
    for (const auto& q : domain.volume_nodes)
      node_error = std::max(node_error, norm(rep.solution.evaluate(q.x) - exact->evaluate(q.x)));
    const StressState hs(cfg.material, rep.solution);
    double traction_error = 0.0, moment_error = 0.0;
    for (std::size_t pi : domain.neumann_patches())
      for (const auto& q : domain.patches[pi].nodes) {
        const BoundaryTractions a = boundary_tractions(hs, domain.patches[pi], q.x);
        const BoundaryTractions b = boundary_tractions(*state, domain.patches[pi], q.x);
        traction_error = std::max(traction_error, norm(a.traction_corrected - b.traction_corrected));
        moment_error = std::max(moment_error, norm(a.moment_corrected - b.moment_corrected));
      }
    results["recovery_error"] = node_error;
    results["coefficient_error"] = (rep.solution - *exact).max_abs_coefficient();
    results["traction_roundtrip_error"] = traction_error;
    results["moment_roundtrip_error"] = moment_error;
    const bool consistent = cfg.flavor == TractionFlavor::kCorrected && !fields.body_force &&
                            exact->degree() <= cfg.basis_degree;
    if (consistent) checks.at_most("recovery_error", node_error, 1e-7);
    if (checks.configured("deviation_min")) checks.at_least("deviation_min", node_error, 0.0);
  }
}

void patch_test_scenario(const ScenarioConfig& cfg, Fields& fields, Checks& checks, Json& results) {
  const DomainGeometry domain = build_domain(cfg, 2);
  std::vector<Mat3> strains;
  if (cfg.strain) {
    strains.push_back(*cfg.strain);
  } else {
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    const int cases = cfg.cases > 0 ? cfg.cases : 5;
    for (int c = 0; c < cases; ++c) {
      Mat3 B;
      for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) B(i, j) = unit(fields.rng);
      strains.push_back(sym(B));
    }
  }
  double disp = 0.0, trac = 0.0, missing = 0.0;
  Json list = Json::array();
  for (const Mat3& A : strains) {
    const PatchTestResult r = patch_test(cfg.material, domain, A);
    disp = std::max(disp, r.displacement_error);
    trac = std::max(trac, r.traction_error);
    missing = std::max(missing, r.missing_max);
    list.push_back({{"A", to_json(A)},
                    {"displacement_error", r.displacement_error},
                    {"traction_error", r.traction_error},
                    {"missing_max", r.missing_max},
                    {"condition_estimate", r.solve.condition_estimate}});
  }
  results["cases"] = list;
  results["displacement_error"] = disp;
  results["traction_error"] = trac;
  results["missing_max"] = missing;
  checks.at_most("displacement_error", disp, 1e-9);
  checks.at_most("traction_error", trac, 1e-9);
  checks.at_most("missing_max", missing, 1e-9);
}

void flatten(const Json& j, const std::string& prefix, std::vector<std::pair<std::string, double>>& out) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it)
      flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "." + std::to_string(i), out);
  } else if (j.is_boolean()) {
    out.emplace_back(prefix, j.get<bool>() ? 1.0 : 0.0);
  } else if (j.is_number()) {
    out.emplace_back(prefix, j.get<double>());
  }
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Json check_json(const Check& c) {
  return {{"name", c.name},           {"expected", c.expected},
          {"actual", c.actual},       {"tolerance", c.tolerance},
          {"bound", c.lower_bound ? "lower" : "upper"}, {"pass", c.pass}};
}

}  // namespace

std::string to_string(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::kVerifyIdentities: return "verify-identities";
    case ScenarioKind::kCompareBc: return "compare-bc";
    case ScenarioKind::kMissingTermMap: return "missing-term-map";
    case ScenarioKind::kSolve: return "solve";
    case ScenarioKind::kPatchTest: return "patch-test";
  }
  return "?";
}

ScenarioConfig parse_config(std::istream& in, const std::string& path) {
  const Reader r(in, path);
  ScenarioConfig cfg;
  cfg.path = path;

  const Entry* sc = r.find("", "scenario");
  if (!sc) throw ConfigError(path + ": missing required key 'scenario'");
  try {
    cfg.scenario = scenario_kind(sc->value);
  } catch (const std::invalid_argument& e) {
    r.fail(*sc, e.what());
  }
  if (const Entry* e = r.find("", "seed")) {
    const long long s = r.integer(*e);
    if (s < 0) r.fail(*e, "seed must be non-negative");
    cfg.seed = static_cast<std::uint64_t>(s);
  }
  if (const Entry* e = r.find("", "cases")) {
    cfg.cases = static_cast<int>(r.integer(*e));
    if (cfg.cases < 1) r.fail(*e, "cases must be positive");
  }

  if (const Entry* e = r.find("domain", "kind")) {
    if (e->value == "box")
      cfg.domain.kind = DomainKind::kBox;
    else if (e->value == "ball")
      cfg.domain.kind = DomainKind::kBall;
    else
      r.fail(*e, "domain kind must be 'box' or 'ball'");
  }
  if (const Entry* e = r.find("domain", "extents")) {
    const auto v = r.numbers(*e);
    if (v.size() != 3) r.fail(*e, "extents needs three numbers");
    cfg.domain.extents = {v[0], v[1], v[2]};
  }
  if (const Entry* e = r.find("domain", "radius")) cfg.domain.radius = r.number(*e);
  if (const Entry* e = r.find("domain", "order")) {
    cfg.domain.quadrature_order = static_cast<int>(r.integer(*e));
    cfg.order_given = true;
  }
  if (const Entry* e = r.find("domain", "cap")) cfg.domain.cap_angle = r.number(*e);
  if (const Entry* e = r.find("domain", "dirichlet")) {
    std::string list = e->value;
    std::replace(list.begin(), list.end(), ',', ' ');
    std::istringstream is(list);
    std::string name;
    while (is >> name) cfg.domain.dirichlet.push_back(name);
  }

  for (auto [key, target] : {std::pair{"mu", &cfg.material.mu}, std::pair{"lambda", &cfg.material.lambda},
                             std::pair{"alpha1", &cfg.material.alpha1}, std::pair{"alpha2", &cfg.material.alpha2}})
    if (const Entry* e = r.find("material", key)) *target = r.number(*e);
  try {
    cfg.material.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path + ": " + e.what());
  }

  if (const Section* s = r.section("fields")) {
    for (const auto& [key, entry] : *s) {
      if (key == "f" && entry.value == "manufactured") {
        cfg.fields[key] = entry.value;
        continue;
      }
      if (key == "f" && entry.value.rfind("random:", 0) == 0) r.fail(entry, "f must be a literal or 'manufactured'");
      int degree = 0;
      try {
        degree = field_spec_degree(entry.value);
      } catch (const ParseError& e) {
        r.fail(entry, std::string("field ") + key + ": " + e.what());
      } catch (const std::exception& e) {
        r.fail(entry, std::string("field ") + key + ": " + e.what());
      }
      if (degree > kFieldDegreeCap)
        r.fail(entry, "field " + key + " has degree " + std::to_string(degree) + " above the cap " +
                          std::to_string(kFieldDegreeCap));
      cfg.fields[key] = entry.value;
    }
  }

  if (const Entry* e = r.find("solver", "degree")) {
    cfg.basis_degree = static_cast<int>(r.integer(*e));
    if (cfg.basis_degree < 1 || cfg.basis_degree > kMaxDegree / 2)
      r.fail(*e, "basis degree must lie in [1, " + std::to_string(kMaxDegree / 2) + "]");
  }
  if (const Entry* e = r.find("solver", "flavor")) {
    if (e->value == "corrected")
      cfg.flavor = TractionFlavor::kCorrected;
    else if (e->value == "mt")
      cfg.flavor = TractionFlavor::kMindlinTiersten;
    else
      r.fail(*e, "flavor must be 'corrected' or 'mt'");
  }
  if (const Entry* e = r.find("solver", "perturbations")) {
    cfg.perturbations = static_cast<int>(r.integer(*e));
    if (cfg.perturbations < 0) r.fail(*e, "perturbations must be non-negative");
  }

  if (const Entry* e = r.find("patch", "A")) {
    const auto v = r.numbers(*e);
    if (v.size() != 9) r.fail(*e, "A needs nine numbers (row-major)");
    Mat3 A;
    for (std::size_t i = 0; i < 9; ++i) A(i / 3, i % 3) = v[i];
    if (max_abs(A - transpose(A)) > 1e-14 * std::max(1.0, max_abs(A))) r.fail(*e, "A must be symmetric");
    cfg.strain = A;
  }

  if (const Entry* e = r.find("output", "dir")) cfg.out_dir = e->value;
  if (const Entry* e = r.find("output", "tractions")) {
    if (e->value == "true")
      cfg.dump_tractions = true;
    else if (e->value == "false")
      cfg.dump_tractions = false;
    else
      r.fail(*e, "tractions must be true or false");
  }

  if (const Section* s = r.section("tolerance"))
    for (const auto& [key, entry] : *s) {
      const double v = r.number(entry);
      if (v < 0.0) r.fail(entry, "tolerance must be non-negative");
      cfg.tolerance[key] = v;
    }

  // Scenario defaults for fields that were not given.
  auto default_field = [&](const char* key, const char* value) {
    if (!cfg.fields.count(key)) cfg.fields[key] = value;
  };
  switch (cfg.scenario) {
    case ScenarioKind::kCompareBc:
      default_field("u", "random:3");
      default_field("du", "random:3");
      break;
    case ScenarioKind::kMissingTermMap:
      default_field("u", "random:3");
      break;
    default:
      break;
  }
  return cfg;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config");
  return parse_config(in, path);
}

bool ScenarioResult::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

std::vector<Check> ScenarioResult::failures() const {
  std::vector<Check> out;
  for (const auto& c : checks)
    if (!c.pass) out.push_back(c);
  return out;
}

ScenarioResult run_scenario(const ScenarioConfig& cfg, double tol_scale) {
  if (!(tol_scale > 0.0)) throw std::invalid_argument("tolerance scale must be positive");
  ScenarioResult out;
  Fields fields(cfg);
  Checks checks(cfg, tol_scale);
  Json results = Json::object();
  Json warnings = Json::array();

  switch (cfg.scenario) {
    case ScenarioKind::kVerifyIdentities: verify_identities(cfg, fields, checks, results); break;
    case ScenarioKind::kCompareBc: compare_bc(cfg, fields, checks, results, warnings, out); break;
    case ScenarioKind::kMissingTermMap: missing_term_map(cfg, fields, checks, results, out); break;
    case ScenarioKind::kSolve: solve_scenario(cfg, fields, checks, results); break;
    case ScenarioKind::kPatchTest: patch_test_scenario(cfg, fields, checks, results); break;
  }
  checks.finish();
  out.checks = checks.list;

  Json& rep = out.report;
  rep["scenario"] = to_string(cfg.scenario);
  rep["config"] = cfg.path;
  rep["seed"] = cfg.seed;
  rep["tolerance_scale"] = tol_scale;
  rep["material"] = {{"mu", cfg.material.mu}, {"lambda", cfg.material.lambda},
                     {"alpha1", cfg.material.alpha1}, {"alpha2", cfg.material.alpha2}};
  if (cfg.scenario != ScenarioKind::kVerifyIdentities && cfg.scenario != ScenarioKind::kPatchTest) {
    int degree = max_field_degree(cfg);
    if (cfg.scenario == ScenarioKind::kSolve) degree = std::max(degree, cfg.basis_degree);
    rep["domain"] = to_json(build_domain(cfg, degree));
  }
  rep["fields"] = fields.report;
  rep["results"] = results;
  Json cl = Json::array(), fl = Json::array();
  for (const auto& c : out.checks) {
    cl.push_back(check_json(c));
    if (!c.pass) fl.push_back(check_json(c));
  }
  rep["checks"] = cl;
  rep["failures"] = fl;
  rep["warnings"] = warnings;
  rep["pass"] = out.pass();

  out.summary.emplace_back("seed", static_cast<double>(cfg.seed));
  flatten(results, "", out.summary);
  for (const auto& c : out.checks) {
    out.summary.emplace_back("check." + c.name + ".actual", c.actual);
    out.summary.emplace_back("check." + c.name + ".tolerance", c.tolerance);
    out.summary.emplace_back("check." + c.name + ".pass", c.pass ? 1.0 : 0.0);
  }
  out.summary.emplace_back("pass", out.pass() ? 1.0 : 0.0);
  return out;
}

std::string summary_body(const ScenarioResult& result) {
  std::string s = "name,value\n";
  for (const auto& [k, v] : result.summary) s += k + "," + format_double(v) + "\n";
  return s;
}

void write_outputs(const ScenarioResult& result, const ScenarioConfig& config, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);

  std::ofstream(fs::path(dir) / "report.json") << result.report.dump(2) << "\n";

  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ofstream csv(fs::path(dir) / "summary.csv");
  csv << "# generated " << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ") << "\n" << summary_body(result);

  if (config.dump_tractions) {
    std::ofstream t(fs::path(dir) / "tractions.csv");
    t << "patch,flavor,x,y,z,nx,ny,nz,tx,ty,tz,gx,gy,gz\n";
    for (const auto& s : result.tractions) {
      t << s.patch << "," << to_string(s.flavor);
      for (const Vec3* v : {&s.point, &s.normal, &s.t, &s.g})
        for (std::size_t i = 0; i < 3; ++i) t << "," << format_double((*v)[i]);
      t << "\n";
    }
  }
}

}  // namespace cstress
