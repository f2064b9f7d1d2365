// Copyright 2026 The qtopo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qtopo/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include "qtopo/blockenc.hpp"
#include "qtopo/error.hpp"

namespace qtopo::cli {

using nlohmann::json;

namespace {

// Fixed-precision number for CSV cells.
std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(12) << v;
  return os.str();
}

std::string opt_num(const std::optional<double>& v) {
  return v ? num(*v) : std::string();
}

json opt_json(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

// Rejects keys of `patch` that the preset does not have.
void check_keys(const json& patch, const json& shape, const std::string& path) {
  if (!patch.is_object()) return;
  for (const auto& [key, value] : patch.items()) {
    const std::string here = path.empty() ? key : path + "." + key;
    QTOPO_REQUIRE(shape.contains(key), ConfigError,
                  "unknown config key '" + here + "'");
    if (shape[key].is_object()) check_keys(value, shape[key], here);
  }
}

template <typename T>
std::optional<T> opt_get(const json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return j[key].get<T>();
}

grover::OracleBackend oracle_backend(const std::string& name) {
  if (name == "exact_phase") return grover::OracleBackend::kExactPhase;
  if (name == "coherent_qae") return grover::OracleBackend::kCoherentQae;
  throw ConfigError("unknown oracle backend '" + name + "'");
}

qae::Backend qae_backend(const std::string& name) {
  if (name == "emulated") return qae::Backend::kEmulated;
  if (name == "coherent") return qae::Backend::kCoherent;
  throw ConfigError("unknown QAE backend '" + name + "'");
}

struct Context {
  fem::MbbDomain domain;
  qsvt::Filter filter;
  qae::ScalingConstants constants;
};

Context make_context(const ExperimentConfig& cfg) {
  Context ctx{make_domain(cfg.domain), make_filter(cfg.poly), {}};
  ctx.constants = qae::compute_scaling(ctx.domain, make_spec(cfg.poly));
  ctx.constants.alpha_eff =
      qae::calibrate_alpha(ctx.domain, ctx.constants, ctx.filter);
  return ctx;
}

json scaling_json(const qae::ScalingConstants& c, int n_el) {
  return {{"delta", c.delta},
          {"beta", c.beta},
          {"gamma", c.gamma},
          {"alpha_eff", c.alpha_eff},
          {"calibration",
           {{"config", std::string(static_cast<std::size_t>(n_el), '1')},
            {"formula", "t(all-solid) / compliance_direct(all-solid)"}}}};
}

json filter_json(const qsvt::Filter& f) {
  json j = {{"name", qsvt::filter_name(f)}};
  if (const auto* p = std::get_if<qsvt::FilterPoly>(&f)) {
    j["degree"] = p->degree;
    j["achieved_error"] = p->achieved_error;
    j["scale"] = p->scale;
  }
  return j;
}

Report skeleton(const ExperimentConfig& cfg) {
  Report r;
  r.json["experiment"] = cfg.experiment;
  r.json["config"] = to_json(cfg);
  r.json["scaling"] = nullptr;
  return r;
}

Report run_fig9b(const ExperimentConfig& cfg) {
  Report rep = skeleton(cfg);
  const Context even = make_context(cfg);
  const qsvt::Filter odd = qsvt::ExactOdd{cfg.poly.mu};
  qae::ScalingConstants odd_c = even.constants;
  odd_c.alpha_eff = qae::calibrate_alpha(even.domain, odd_c, odd);

  const auto& d = even.domain;
  std::ostringstream csv;
  csv << "config,feasible,direct,simp,qsvt_odd,qsvt_even,theta_even,"
         "saturated\n";
  json rows = json::array();
  for (const auto& x : fem::enumerate_configs(d.n_el(), cfg.search.volume_k)) {
    const auto direct = fem::compliance_direct(d, x);
    const auto simp = fem::compliance_direct(d, x, 1e-3, 3.0);
    const auto pe = qae::phase_of_config(d, x, even.constants, even.filter);
    const auto po = qae::phase_of_config(d, x, odd_c, odd);
    const double even_c = pe.t_value / even.constants.alpha_eff;
    const double odd_est = po.t_value / odd_c.alpha_eff;
    const bool saturated = !pe.compliance_estimate.has_value();
    rows.push_back({{"config", config_json(x, d.n_y())},
                    {"feasible", direct.has_value()},
                    {"direct", opt_json(direct)},
                    {"simp", opt_json(simp)},
                    {"qsvt_odd", odd_est},
                    {"qsvt_even", even_c},
                    {"theta_even", pe.theta},
                    {"saturated", saturated}});
    csv << x.to_string() << ',' << (direct ? 1 : 0) << ',' << opt_num(direct)
        << ',' << opt_num(simp) << ',' << num(odd_est) << ',' << num(even_c)
        << ',' << num(pe.theta) << ',' << (saturated ? 1 : 0) << '\n';
  }
  rep.json["scaling"] = scaling_json(even.constants, d.n_el());
  rep.json["scaling_odd"] = scaling_json(odd_c, d.n_el());
  rep.json["filter"] = filter_json(even.filter);
  rep.json["rows"] = std::move(rows);
  rep.csv = csv.str();
  return rep;
}

Report run_fig10(const ExperimentConfig& cfg) {
  Report rep = skeleton(cfg);
  const Context ctx = make_context(cfg);
  const auto x = fem::StructureConfig::from_string(cfg.qae.config);
  QTOPO_REQUIRE(x.size() == ctx.domain.n_el(), ConfigError,
                "qae.config length must equal n_x * n_y");
  qae::QaeParams params;
  params.n_p = cfg.qae.n_p;
  params.filter = ctx.filter;
  params.backend = qae_backend(cfg.qae.backend);
  params.constants = ctx.constants;
  const auto rec = qae::phase_of_config(ctx.domain, x, ctx.constants, ctx.filter);
  const auto dist = qae::qae_distribution(ctx.domain, x, params);

  std::ostringstream csv;
  csv << "integer,bits,probability\n";
  json outcomes = json::array();
  for (std::size_t p = 0; p < dist.probabilities.size(); ++p) {
    const std::string bits = qsim::to_bits(p, dist.n_p);
    outcomes.push_back({{"integer", p},
                        {"bits", bits},
                        {"probability", dist.probabilities[p]}});
    csv << p << ',' << bits << ',' << num(dist.probabilities[p]) << '\n';
  }
  rep.json["scaling"] = scaling_json(ctx.constants, ctx.domain.n_el());
  rep.json["filter"] = filter_json(ctx.filter);
  rep.json["structure"] = config_json(x, ctx.domain.n_y());
  rep.json["n_p"] = dist.n_p;
  rep.json["outcomes"] = std::move(outcomes);
  rep.json["theta"] = rec.theta;
  rep.json["t"] = rec.t_value;
  rep.json["compliance_estimate"] = opt_json(rec.compliance_estimate);
  rep.json["saturated"] = !rec.compliance_estimate.has_value();
  rep.json["compliance_direct"] = opt_json(fem::compliance_direct(ctx.domain, x));
  rep.csv = csv.str();
  return rep;
}

grover::SearchParams search_params(const ExperimentConfig& cfg) {
  grover::SearchParams p;
  p.theta0 = cfg.search.theta0;
  p.volume_k = cfg.search.volume_k;
  p.r = cfg.search.r;
  p.oracle_backend = oracle_backend(cfg.search.oracle);
  p.n_p = cfg.qae.n_p;
  return p;
}

Report run_grover(const ExperimentConfig& cfg, const RunHooks& hooks) {
  Report rep = skeleton(cfg);
  const Context ctx = make_context(cfg);
  const auto& d = ctx.domain;
  const auto rows = fem::enumerate_thetas(d, ctx.filter, cfg.search.volume_k);
  const auto table = grover::theta_table(rows);
  const auto params = search_params(cfg);
  std::function<void(const qsim::QuantumState&)> dump;
  if (!hooks.statevector_path.empty())
    dump = [&](const qsim::QuantumState& s) {
      qsim::dump_statevector_csv(s, hooks.statevector_path);
    };
  const auto res = grover::run_grover(
      d, params, table, grover::CoherentSetup{ctx.filter, ctx.constants.beta},
      dump);

  std::vector<const fem::ThetaRow*> order;
  for (const auto& r : rows) order.push_back(&r);
  std::stable_sort(order.begin(), order.end(), [&](auto* a, auto* b) {
    return res.distribution[a->config.index()] >
           res.distribution[b->config.index()];
  });

  std::ostringstream csv;
  csv << "rank,config,probability,theta,marked,feasible\n";
  json dist = json::array();
  int rank = 0;
  for (const auto* r : order) {
    const double prob = res.distribution[r->config.index()];
    const bool marked = r->theta < params.theta0;
    dist.push_back({{"config", config_json(r->config, d.n_y())},
                    {"probability", prob},
                    {"theta", r->theta},
                    {"marked", marked},
                    {"feasible", r->compliance.has_value()}});
    csv << ++rank << ',' << r->config.to_string() << ',' << num(prob) << ','
        << num(r->theta) << ',' << (marked ? 1 : 0) << ','
        << (r->compliance ? 1 : 0) << '\n';
  }
  json marked = json::array();
  for (const auto& m : res.marked_set) marked.push_back(config_json(m, d.n_y()));

  const double n = static_cast<double>(rows.size());
  const double m = static_cast<double>(res.marked_set.size());
  const double closed =
      std::pow(std::sin((2 * res.r_used + 1) * std::asin(std::sqrt(m / n))), 2);

  rep.json["scaling"] = scaling_json(ctx.constants, d.n_el());
  rep.json["filter"] = filter_json(ctx.filter);
  rep.json["search_space"] = rows.size();
  rep.json["marked_set"] = std::move(marked);
  rep.json["r_used"] = res.r_used;
  rep.json["success_probability"] = res.success_probability;
  rep.json["closed_form_success"] = closed;
  rep.json["distribution"] = std::move(dist);
  rep.csv = csv.str();
  return rep;
}

Report run_minimize(const ExperimentConfig& cfg) {
  Report rep = skeleton(cfg);
  const Context ctx = make_context(cfg);
  const auto& d = ctx.domain;
  const auto rows = fem::enumerate_thetas(d, ctx.filter, cfg.search.volume_k);
  const auto table = grover::theta_table(rows);
  const auto params = search_params(cfg);
  const auto res = grover::minimize_compliance(
      d, params, cfg.search.seed, table,
      grover::CoherentSetup{ctx.filter, ctx.constants.beta});

  const fem::ThetaRow* argmin = nullptr;
  for (const auto& r : rows)
    if (r.compliance && (!argmin || *r.compliance < *argmin->compliance))
      argmin = &r;

  std::ostringstream csv;
  csv << "level,threshold,samples,iterations,found,found_theta\n";
  json trace = json::array();
  for (std::size_t i = 0; i < res.trace.size(); ++i) {
    const auto& s = res.trace[i];
    trace.push_back(
        {{"threshold", s.threshold},
         {"samples", s.samples},
         {"iterations", s.iterations},
         {"found", s.found ? config_json(*s.found, d.n_y()) : json(nullptr)},
         {"found_theta", opt_json(s.found_theta)}});
    csv << i << ',' << num(s.threshold) << ',' << s.samples << ','
        << s.iterations << ',' << (s.found ? s.found->to_string() : "") << ','
        << opt_num(s.found_theta) << '\n';
  }
  if (res.budget_exhausted)
    throw BudgetExhausted("no configuration below theta0 = " +
                          num(params.theta0) + " within the search budget");

  rep.json["scaling"] = scaling_json(ctx.constants, d.n_el());
  rep.json["filter"] = filter_json(ctx.filter);
  rep.json["best"] = config_json(*res.best, d.n_y());
  rep.json["best_theta"] = *res.best_theta;
  rep.json["best_compliance"] =
      opt_json(fem::compliance_direct(d, *res.best));
  rep.json["bruteforce_argmin"] =
      argmin ? config_json(argmin->config, d.n_y()) : json(nullptr);
  rep.json["matches_bruteforce"] = argmin && argmin->config == *res.best;
  rep.json["total_iterations"] = res.total_iterations;
  rep.json["trace"] = std::move(trace);
  rep.csv = csv.str();
  return rep;
}

json poly_json(const qsvt::FilterPoly& p) {
  return {{"mu", p.spec.mu},
          {"y0", p.spec.y0},
          {"eps", p.spec.eps},
          {"mode", p.mode == qsvt::FitMode::kChop ? "chop" : "certified"},
          {"degree", p.degree},
          {"achieved_error", p.achieved_error},
          {"scale", p.scale},
          {"coefficients", p.coefficients}};
}

qsvt::FitMode fit_mode(const PolyConfig& poly) {
  return poly.mode == "polynomial" ? qsvt::FitMode::kCertified
                                   : qsvt::FitMode::kChop;
}

Report run_poly(const ExperimentConfig& cfg) {
  Report rep = skeleton(cfg);
  const auto spec = make_spec(cfg.poly);
  const auto p = qsvt::fit_even_poly(spec, fit_mode(cfg.poly));
  std::vector<double> xs;
  for (int i = 0; i <= 2000; ++i) xs.push_back(-1.0 + i / 1000.0);
  for (int i = 0; i <= 200; ++i) xs.push_back(spec.mu * (-2.0 + i / 50.0));
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  std::ostringstream csv;
  csv << "x,target,poly\n";
  for (double x : xs)
    csv << num(x) << ',' << num(qsvt::target_even(x, spec)) << ','
        << num(qsvt::eval_poly(p, x)) << '\n';
  rep.json["poly"] = poly_json(p);
  rep.csv = csv.str();
  return rep;
}

struct ScanPoint {
  double mu, eps, y0;
  int degree = 0;
  double error = 0.0;
};

Report run_scan(const ExperimentConfig& cfg) {
  Report rep = skeleton(cfg);
  std::vector<ScanPoint> pts;
  for (double mu : cfg.scan.mu)
    for (double eps : cfg.scan.eps)
      for (double y0 : cfg.scan.y0) pts.push_back({mu, eps, y0});
  const auto mode = fit_mode(cfg.poly);
  for (const auto& p : pts) make_spec({p.mu, p.y0, p.eps, cfg.poly.mode});

#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto f = qsvt::fit_even_poly({pts[i].mu, pts[i].y0, pts[i].eps}, mode);
    pts[i].degree = f.degree;
    pts[i].error = f.achieved_error;
  }

  std::ostringstream csv;
  csv << "mu,eps,y0,degree,achieved_error\n";
  json rows = json::array();
  for (const auto& p : pts) {
    rows.push_back({{"mu", p.mu},
                    {"eps", p.eps},
                    {"y0", p.y0},
                    {"degree", p.degree},
                    {"achieved_error", p.error}});
    csv << num(p.mu) << ',' << num(p.eps) << ',' << num(p.y0) << ','
        << p.degree << ',' << num(p.error) << '\n';
  }

  // degree * mu spread per (eps, y0), and monotonicity in eps per (mu, y0).
  json summary = json::object();
  json spread = json::array();
  for (double eps : cfg.scan.eps)
    for (double y0 : cfg.scan.y0) {
      double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
      for (const auto& p : pts)
        if (p.eps == eps && p.y0 == y0) {
          lo = std::min(lo, p.degree * p.mu);
          hi = std::max(hi, p.degree * p.mu);
        }
      spread.push_back({{"eps", eps}, {"y0", y0}, {"max_over_min", hi / lo}});
    }
  json mono = json::array();
  for (double mu : cfg.scan.mu)
    for (double y0 : cfg.scan.y0) {
      std::vector<std::pair<double, int>> seq;
      for (const auto& p : pts)
        if (p.mu == mu && p.y0 == y0) seq.emplace_back(p.eps, p.degree);
      std::sort(seq.begin(), seq.end(),
                [](auto a, auto b) { return a.first > b.first; });
      bool inc = true;
      for (std::size_t i = 1; i < seq.size(); ++i)
        inc = inc && seq[i].second >= seq[i - 1].second;
      mono.push_back({{"mu", mu}, {"y0", y0}, {"monotone_in_log_inv_eps", inc}});
    }
  summary["degree_times_mu"] = std::move(spread);
  summary["degree_vs_eps"] = std::move(mono);
  rep.json["rows"] = std::move(rows);
  rep.json["summary"] = std::move(summary);
  rep.csv = csv.str();
  return rep;
}

Report run_mbb(const ExperimentConfig& cfg) {
  Report rep = skeleton(cfg);
  const auto d = make_domain(cfg.domain);
  std::ostringstream csv;
  csv << "config,volume_fraction,feasible,compliance\n";
  json rows = json::array();
  for (const auto& x : fem::enumerate_configs(d.n_el(), cfg.search.volume_k)) {
    const auto c = fem::compliance_direct(d, x);
    rows.push_back({{"config", config_json(x, d.n_y())},
                    {"volume_fraction", fem::volume_fraction(x)},
                    {"feasible", c.has_value()},
                    {"compliance", opt_json(c)}});
    csv << x.to_string() << ',' << num(fem::volume_fraction(x)) << ','
        << (c ? 1 : 0) << ',' << opt_num(c) << '\n';
  }
  rep.json["n_dof"] = d.n_dof();
  rep.json["fixed_dofs"] = d.fixed_dofs();
  rep.json["rows"] = std::move(rows);
  rep.csv = csv.str();
  return rep;
}

Report run_verify(const ExperimentConfig& cfg) {
  Report rep = skeleton(cfg);
  const auto d = make_domain(cfg.domain);
  std::ostringstream csv;
  csv << "check,config,value\n";

  // Block-encoding equality on every configuration.
  const auto layout = blockenc::blockencoding_layout(d);
  const auto be = blockenc::global_blockencoding(d, layout);
  std::vector<qsim::Index> all(std::size_t{1} << d.n_el());
  std::iota(all.begin(), all.end(), qsim::Index{0});
  const auto blocks = blockenc::extract_blocks(be, all);
  double worst = 0.0;
  for (const auto& [x, block] : blocks) {
    const auto cfgx = fem::StructureConfig::from_index(x, d.n_el());
    const double e =
        blockenc::block_error(be, block, fem::assemble_global(d, cfgx));
    worst = std::max(worst, e);
    csv << "block_error," << cfgx.to_string() << ',' << num(e) << '\n';
  }
  const double defect =
      blockenc::unitarity_defect(be.circuit, layout, 3, cfg.search.seed);
  csv << "unitarity_defect,," << num(defect) << '\n';
  rep.json["blockenc"] = {{"configs", blocks.size()},
                          {"qubits", layout.total_qubits()},
                          {"gates", be.circuit.size()},
                          {"scale", be.scale},
                          {"max_block_error", worst},
                          {"unitarity_defect", defect},
                          {"pass", worst <= 1e-10 && defect <= 1e-10}};

  // Coherent oracle against the exact phase oracle on on-grid phases.
  const int n_p = cfg.qae.n_p;
  qsim::RegisterLayout syn{{"g", 1}, {"p", n_p}, {"h", 1}, {"a", 1},
                           {"d", 1}, {"c", 2}};
  const double grid = std::ldexp(1.0, -n_p);
  grover::ThetaTable on_grid;
  for (qsim::Index x = 0; x < 4; ++x)
    on_grid[x] = std::min(0.5, (std::ldexp(1.0, n_p - 2) + x) * grid);
  const auto oracle = grover::oracle_from_preparation(
      grover::rotation_preparation(on_grid, syn), syn, cfg.search.theta0);
  const qsim::RegisterLayout small{{"c", 2}};
  const auto exact = grover::exact_phase_oracle(on_grid, cfg.search.theta0,
                                                small["c"], {0, 1, 2, 3});
  double dev = 0.0;
  for (qsim::Index x = 0; x < 4; ++x) {
    const qsim::Index in = syn.encode({{"c", x}});
    auto s = qsim::QuantumState::basis(syn, in);
    qsim::apply(s, oracle);
    auto e = qsim::QuantumState::basis(small, x);
    qsim::apply(e, exact);
    for (qsim::Index i = 0; i < s.amplitudes().size(); ++i) {
      const qsim::Amplitude want = i == in ? e.amplitude(x) : 0.0;
      dev = std::max(dev, std::abs(s.amplitude(i) - want));
    }
  }
  csv << "oracle_on_grid_deviation,," << num(dev) << '\n';
  rep.json["oracle_on_grid"] = {{"n_p", n_p},
                                {"theta0", cfg.search.theta0},
                                {"max_deviation", dev},
                                {"pass", dev <= 1e-9}};
  rep.csv = csv.str();
  return rep;
}

Report run_resources(const ExperimentConfig& cfg) {
  Report rep = skeleton(cfg);
  rep.json["resources"] = resources(make_domain(cfg.domain), cfg.qae.n_p);
  std::ostringstream csv;
  csv << "register,qubits\n";
  for (const auto& [k, v] : rep.json["resources"]["registers"].items())
    csv << k << ',' << v.get<int>() << '\n';
  rep.csv = csv.str();
  return rep;
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {
      "fig9b", "fig10", "fig11",  "fig12",    "fig15",    "fig16",    "fig17",
      "verify", "minimize", "mbb", "poly", "resources"};
  return names;
}

ExperimentConfig default_config(const std::string& experiment) {
  const auto& names = experiment_names();
  QTOPO_REQUIRE(std::find(names.begin(), names.end(), experiment) != names.end(),
                ConfigError, "unknown experiment '" + experiment + "'");
  ExperimentConfig c;
  c.experiment = experiment;
  if (experiment == "fig9b") {
    c.poly = {1e-4, 0.1, 1e-3, "exact"};
  } else if (experiment == "fig10") {
    c.poly.mode = "polynomial";
  } else if (experiment == "fig11") {
    c.qae.n_p = 8;
  } else if (experiment == "fig12") {
    c.domain.n_x = c.domain.n_y = 3;
    c.poly.mu = 1e-5;
    c.qae.n_p = 9;
    c.qae.config = "111110000";
    c.search.theta0 = 0.251;
    c.search.volume_k = 5;
    c.search.r = 2;
  } else if (experiment == "minimize") {
    c.qae.n_p = 20;
  } else if (experiment == "fig15") {
    c.poly = {0.01, 0.5, 1e-3, "polynomial-chop"};
    c.scan = {{0.04, 0.02, 0.01, 0.005}, {1e-2, 1e-3, 1e-4}, {0.5}};
  } else if (experiment == "fig16") {
    c.poly = {0.01, 0.5, 1e-3, "polynomial-chop"};
    c.scan = {{0.02, 0.01}, {1e-2, 1e-3, 1e-4, 1e-5, 1e-6}, {0.5}};
  } else if (experiment == "fig17") {
    c.poly = {0.01, 0.5, 1e-3, "polynomial-chop"};
    c.scan = {{0.01}, {1e-3}, {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9}};
  } else if (experiment == "poly") {
    c.poly = {0.01, 0.5, 1e-3, "polynomial-chop"};
  }
  return c;
}

void ExperimentConfig::validate() const {
  default_config(experiment);
  QTOPO_REQUIRE(domain.boundary == "mbb", ConfigError,
                "only the 'mbb' boundary preset is available");
  QTOPO_REQUIRE(domain.n_x >= 1 && domain.n_y >= 1, ConfigError,
                "n_x and n_y must be positive");
  QTOPO_REQUIRE(domain.n_x * domain.n_y <= 24, GuardViolation,
                "at most 24 elements are supported");
  make_spec(poly);
  QTOPO_REQUIRE(poly.mode == "exact" || poly.mode == "polynomial" ||
                    poly.mode == "polynomial-chop",
                ConfigError, "poly.mode must be exact, polynomial or "
                             "polynomial-chop");
  qae_backend(qae.backend);
  oracle_backend(search.oracle);
  QTOPO_REQUIRE(qae.n_p >= 2 && qae.n_p <= 20, ConfigError,
                "qae.n_p must lie in [2, 20]");
  const bool scan = experiment == "fig15" || experiment == "fig16" ||
                    experiment == "fig17";
  QTOPO_REQUIRE(!scan || (!this->scan.mu.empty() && !this->scan.eps.empty() &&
                          !this->scan.y0.empty()),
                ConfigError, "scan lists must be non-empty");
}

json to_json(const ExperimentConfig& c) {
  return {{"experiment", c.experiment},
          {"domain",
           {{"n_x", c.domain.n_x},
            {"n_y", c.domain.n_y},
            {"young_modulus", c.domain.young_modulus},
            {"poisson_ratio", c.domain.poisson_ratio},
            {"boundary", c.domain.boundary}}},
          {"poly",
           {{"mu", c.poly.mu},
            {"y0", c.poly.y0},
            {"eps", c.poly.eps},
            {"mode", c.poly.mode}}},
          {"qae",
           {{"n_p", c.qae.n_p},
            {"backend", c.qae.backend},
            {"config", c.qae.config}}},
          {"search",
           {{"theta0", c.search.theta0},
            {"volume_k", c.search.volume_k ? json(*c.search.volume_k)
                                           : json(nullptr)},
            {"r", c.search.r ? json(*c.search.r) : json(nullptr)},
            {"seed", c.search.seed},
            {"oracle", c.search.oracle}}},
          {"scan",
           {{"mu", c.scan.mu}, {"eps", c.scan.eps}, {"y0", c.scan.y0}}},
          {"output", {{"report", c.output.report}, {"csv", c.output.csv}}}};
}

ExperimentConfig config_from_json(const json& j, const std::string& fallback) {
  QTOPO_REQUIRE(j.is_object(), ConfigError, "config must be a JSON object");
  try {
    const std::string name = j.value("experiment", fallback);
    json full = to_json(default_config(name));
    check_keys(j, full, "");
    // null clears optional fields; keep it as an explicit null.
    full.merge_patch(j);
    ExperimentConfig c;
    c.experiment = full.at("experiment").get<std::string>();
    const auto& d = full.at("domain");
    c.domain = {d.at("n_x").get<int>(), d.at("n_y").get<int>(),
                d.at("young_modulus").get<double>(),
                d.at("poisson_ratio").get<double>(),
                d.at("boundary").get<std::string>()};
    const auto& p = full.at("poly");
    c.poly = {p.at("mu").get<double>(), p.at("y0").get<double>(),
              p.at("eps").get<double>(), p.at("mode").get<std::string>()};
    const auto& q = full.at("qae");
    c.qae = {q.at("n_p").get<int>(), q.at("backend").get<std::string>(),
             q.at("config").get<std::string>()};
    const auto& s = full.at("search");
    c.search.theta0 = s.at("theta0").get<double>();
    c.search.volume_k = opt_get<int>(s, "volume_k");
    c.search.r = opt_get<int>(s, "r");
    c.search.seed = s.value("seed", std::uint64_t{0});
    c.search.oracle = s.value("oracle", std::string("exact_phase"));
    const auto& sc = full.at("scan");
    c.scan = {sc.value("mu", std::vector<double>{}),
              sc.value("eps", std::vector<double>{}),
              sc.value("y0", std::vector<double>{})};
    const auto& o = full.at("output");
    c.output = {o.value("report", std::string()), o.value("csv", std::string())};
    c.validate();
    return c;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
}

fem::MbbDomain make_domain(const DomainSpec& spec) {
  QTOPO_REQUIRE(spec.boundary == "mbb", ConfigError,
                "only the 'mbb' boundary preset is available");
  fem::Material m{spec.young_modulus, spec.poisson_ratio};
  m.validate();
  return fem::MbbDomain::mbb(spec.n_x, spec.n_y, m);
}

qsvt::PolySpec make_spec(const PolyConfig& poly) {
  qsvt::PolySpec s{poly.mu, poly.y0, poly.eps};
  s.validate();
  return s;
}

qsvt::Filter make_filter(const PolyConfig& poly) {
  const auto spec = make_spec(poly);
  if (poly.mode == "exact") return qsvt::ExactEven{spec};
  if (poly.mode == "polynomial")
    return qsvt::fit_even_poly(spec, qsvt::FitMode::kCertified);
  if (poly.mode == "polynomial-chop")
    return qsvt::fit_even_poly(spec, qsvt::FitMode::kChop);
  throw ConfigError("unknown poly.mode '" + poly.mode + "'");
}

json config_json(const fem::StructureConfig& config, int n_y) {
  json grid = json::array();
  std::istringstream rows(config.glyph_grid(n_y));
  for (std::string line; std::getline(rows, line);) grid.push_back(line);
  return {{"bits", config.to_string()}, {"grid", std::move(grid)}};
}

Report run_experiment(const ExperimentConfig& config, const RunHooks& hooks) {
  config.validate();
  const auto& e = config.experiment;
  QTOPO_REQUIRE(hooks.statevector_path.empty() || e == "fig11" || e == "fig12",
                ConfigError, "statevector dumps are available for fig11/fig12");
  if (e == "fig9b") return run_fig9b(config);
  if (e == "fig10") return run_fig10(config);
  if (e == "fig11" || e == "fig12") return run_grover(config, hooks);
  if (e == "fig15" || e == "fig16" || e == "fig17") return run_scan(config);
  if (e == "minimize") return run_minimize(config);
  if (e == "verify") return run_verify(config);
  if (e == "mbb") return run_mbb(config);
  if (e == "poly") return run_poly(config);
  return run_resources(config);
}

void write_report(const Report& report, const OutputConfig& output) {
  if (!output.report.empty()) {
    std::ofstream f(output.report);
    QTOPO_REQUIRE(f.good(), ConfigError,
                  "cannot write report to '" + output.report + "'");
    f << report.json.dump(2) << '\n';
  }
  if (!output.csv.empty()) {
    std::ofstream f(output.csv);
    QTOPO_REQUIRE(f.good(), ConfigError,
                  "cannot write CSV to '" + output.csv + "'");
    f << report.csv;
  }
}

json resources(const fem::MbbDomain& domain, int n_p) {
  QTOPO_REQUIRE(n_p >= 1, ConfigError, "n_p must be positive");
  const int n_c = domain.n_el();
  const int n_l = blockenc::l_width(n_c);
  const int n_d = blockenc::d_width(domain.n_dof());
  const json singles = {{"g", 1}, {"h", 1}, {"q", 1},
                        {"v", 1}, {"z", 1}, {"b", 1}};
  json regs = {{"c", n_c}, {"p", n_p}, {"l", n_l}, {"d", n_d}};
  for (const auto& [k, v] : singles.items()) regs[k] = v;
  const int full = n_c + n_p + n_l + n_d + static_cast<int>(singles.size());
  const int coherent = qae::coherent_layout(domain, n_p, true).total_qubits();
  return {{"n_el", n_c},
          {"n_dof", domain.n_dof()},
          {"registers", std::move(regs)},
          {"singles_count", singles.size()},
          {"totals",
           {{"full_circuit", full},
            {"emulated", n_c},
            {"coherent_simulated", coherent}}}};
}

}  // namespace qtopo::cli
