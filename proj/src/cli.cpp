#include "fracspec/cli.hpp"

#include <boost/math/special_functions/trigamma.hpp>
#include <cmath>
#include <charconv>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include "CLI11.hpp"
#include "fracspec/errors.hpp"
#include "fracspec/filtering.hpp"
#include "fracspec/hilbert_system.hpp"
#include "fracspec/inference.hpp"
#include "fracspec/kl_sampler.hpp"
#include "fracspec/parallel.hpp"
#include "fracspec/quad_oracle.hpp"
#include "fracspec/secondkind.hpp"
#include "fracspec/smallball.hpp"
#include "fracspec/spectra.hpp"

namespace fracspec::cli {

using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;

enum class Type { Num, Int, Str, Bool, List };

struct Param {
  std::string key;
  Type type;
  json def;
};

const std::map<std::string, std::vector<Param>>& schema() {
  static const std::map<std::string, std::vector<Param>> s = {
      {"eigen",
       {{"kernel", Type::Str, "fbm"},
        {"hurst", Type::List, json::array({0.75})},
        {"grid", Type::Int, 4000},
        {"count", Type::Int, 30},
        {"richardson", Type::Bool, true}}},
      {"sample",
       {{"hurst", Type::List, json::array({0.75})},
        {"terms", Type::Int, 300},
        {"grid", Type::Int, 4000},
        {"points", Type::Int, 101},
        {"paths", Type::Int, 4},
        {"T", Type::Num, 1.0},
        {"basis", Type::Str, "oracle"}}},
      {"smallball",
       {{"hurst", Type::List, json::array({0.5})},
        {"eps", Type::List, json::array({0.5, 0.4, 0.3, 0.25})},
        {"terms", Type::Int, 500},
        {"grid", Type::Int, 4000}}},
      {"secondkind",
       {{"hurst", Type::Num, 0.75},
        {"eps", Type::List, json::array({0.1, 0.05, 0.025, 0.0125})},
        {"n", Type::Int, 2000},
        {"grading", Type::Num, 3.0},
        {"bracket", Type::Bool, true},
        {"t_max", Type::Num, 32.0},
        {"bracket_n", Type::Int, 2048},
        {"bracket_eps", Type::Num, 1.0}}},
      {"filter",
       {{"mode", Type::Str, "steady"},
        {"h1", Type::Num, 0.7},
        {"h2", Type::Num, 0.5},
        {"beta", Type::Num, -1.0},
        {"mu", Type::Num, 1.0},
        {"eps", Type::Num, 0.5},
        {"T", Type::Num, 50.0}}},
      {"fisher",
       {{"mode", Type::Str, "whittle"},
        {"theta", Type::List, json::array({0.5, 1.0, 2.0, 5.0})},
        {"step", Type::Num, 1e-4},
        {"hurst", Type::List, json::array({0.8, 0.9, 0.95})},
        {"sigma", Type::List, json::array({0.5, 1.0, 2.0})},
        {"eps", Type::Num, 1.0},
        {"theta0", Type::Num, 1.0},
        {"T", Type::Num, 100.0},
        {"dt", Type::Num, 0.01},
        {"reps", Type::Int, 500},
        {"masters", Type::Int, 20},
        {"exact", Type::Bool, false}}},
      {"hilbert",
       {{"kernel", Type::Str, "synthetic"},
        {"nu_lo", Type::Num, 30.0},
        {"nu_hi", Type::Num, 60.0},
        {"count", Type::Int, 5},
        {"deviation_nu", Type::List, json::array({50.0, 100.0})}}},
  };
  return s;
}

const std::vector<Param>& params_of(const std::string& sub) {
  auto it = schema().find(sub);
  if (it == schema().end()) throw ConfigError("unknown subcommand '" + sub + "'");
  return it->second;
}

double parse_num(const std::string& s, const std::string& key) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw ConfigError("parameter '" + key + "' expects a number, got '" + s + "'");
  }
  if (pos != s.size()) throw ConfigError("parameter '" + key + "' expects a number, got '" + s + "'");
  return v;
}

json coerce(const Param& p, const json& v) {
  const std::string& k = p.key;
  switch (p.type) {
    case Type::Num:
      if (v.is_number()) return v.get<double>();
      if (v.is_string()) return parse_num(v.get<std::string>(), k);
      break;
    case Type::Int: {
      double d;
      if (v.is_number())
        d = v.get<double>();
      else if (v.is_string())
        d = parse_num(v.get<std::string>(), k);
      else
        break;
      if (d != std::floor(d) || std::abs(d) > 1e15) throw ConfigError("parameter '" + k + "' expects an integer");
      return static_cast<long long>(d);
    }
    case Type::Str:
      if (v.is_string()) return v;
      break;
    case Type::Bool:
      if (v.is_boolean()) return v;
      if (v.is_string()) {
        const auto s = v.get<std::string>();
        if (s == "true" || s == "1") return true;
        if (s == "false" || s == "0") return false;
      }
      break;
    case Type::List: {
      json out = json::array();
      if (v.is_number()) {
        out.push_back(v.get<double>());
        return out;
      }
      if (v.is_array()) {
        for (const auto& e : v) {
          if (!e.is_number()) throw ConfigError("parameter '" + k + "' expects a list of numbers");
          out.push_back(e.get<double>());
        }
        if (out.empty()) break;
        return out;
      }
      if (v.is_string()) {
        std::stringstream ss(v.get<std::string>());
        std::string item;
        while (std::getline(ss, item, ',')) out.push_back(parse_num(item, k));
        if (out.empty()) break;
        return out;
      }
      break;
    }
  }
  throw ConfigError("parameter '" + k + "' has the wrong type");
}

std::vector<double> list_of(const json& params, const std::string& key) { return params.at(key).get<std::vector<double>>(); }
double num(const json& params, const std::string& key) { return params.at(key).get<double>(); }
int integer(const json& params, const std::string& key) { return static_cast<int>(params.at(key).get<long long>()); }

json cell(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<json>> rows;
  json summary = json::object();
};

std::string fmt_cell(const json& v) {
  if (v.is_null()) return "";
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number_unsigned()) return std::to_string(v.get<unsigned long long>());
  if (v.is_number_float()) {
    char buf[40];
    const auto r = std::to_chars(buf, buf + sizeof buf, v.get<double>());
    return std::string(buf, r.ptr);
  }
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

std::uint64_t need_seed(const RunConfig& cfg) {
  if (!cfg.seed) throw ConfigError("subcommand '" + cfg.subcommand + "' is stochastic and needs --seed");
  return *cfg.seed;
}

// sum of fbm_eigenvalue(h, n) over n > N
double asymptotic_tail(const HurstParam& h, int N) {
  const int M = N + 200000;
  double s = 0.0;
  for (int n = M; n > N; --n) s += fbm_eigenvalue(h, n);
  const double nu = fbm_nu(h, M) + 0.5 * kPi;
  return s + h.kappa() / (2.0 * h.h() * kPi) * std::pow(nu, -2.0 * h.h());
}

Table run_eigen(const RunConfig& cfg) {
  const auto& p = cfg.params;
  const std::string kernel = p.at("kernel");
  const int grid = integer(p, "grid"), count = integer(p, "count");
  if (kernel != "fbm" && kernel != "brownian" && kernel != "frac_noise")
    throw ConfigError("kernel must be fbm, brownian or frac_noise");
  OracleOptions opt;
  opt.richardson = p.at("richardson");
  Table t;
  t.columns = {"H", "n", "lambda_oracle", "lambda_asym", "rel_err", "err_estimate", "tol"};
  auto hs = list_of(p, "hurst");
  if (kernel == "brownian") hs = {0.5};
  json cal = json::array();
  for (double hv : hs) {
    HurstParam h(hv);
    const KernelSpec k = kernel == "brownian" ? KernelSpec::brownian()
                         : kernel == "fbm"    ? KernelSpec::fbm(hv)
                                              : KernelSpec::frac_noise(hv);
    const auto pairs = oracle_eigenpairs(k, grid, count, opt);
    for (const auto& e : pairs) {
      double asym = NAN;
      if (kernel == "brownian")
        asym = brownian_eigenpair(e.index).lam_n;
      else if (kernel == "fbm")
        asym = fbm_eigenvalue(h, e.index);
      t.rows.push_back({hv, e.index, e.lam, cell(asym), cell(asym / e.lam - 1.0), cell(e.err ? *e.err : NAN), 1e-9});
    }
    if (kernel == "fbm" && count >= 10) {
      const auto c = calibrate_enumeration(h, pairs);
      cal.push_back({{"H", hv}, {"shift", c.shift}, {"residual", c.residual}});
    }
  }
  if (!cal.empty()) t.summary["calibration"] = cal;
  return t;
}

Table run_sample(const RunConfig& cfg) {
  const auto& p = cfg.params;
  const std::uint64_t seed = need_seed(cfg);
  const auto hs = list_of(p, "hurst");
  if (hs.size() != 1) throw ConfigError("sample takes a single hurst value");
  const HurstParam h(hs[0]);
  const int terms = integer(p, "terms"), grid = integer(p, "grid"), points = integer(p, "points"),
            paths = integer(p, "paths");
  const double T = num(p, "T");
  const std::string basis = p.at("basis");
  if (points < 2 || paths < 1) throw ConfigError("points must be >= 2 and paths >= 1");
  if (!(T > 0.0)) throw ConfigError("T must be positive");
  std::vector<double> tg(points);
  for (int i = 0; i < points; ++i) tg[i] = T * i / (points - 1);

  std::optional<KlBasis> kb;
  if (basis == "oracle") {
    OracleOptions opt;
    opt.richardson = false;
    auto pairs = oracle_eigenpairs(KernelSpec::fbm(h.h()), grid, terms, opt);
    for (auto& e : pairs) e = scale_eigenpair(T, e, h);
    kb.emplace(pairs, terms, tg);
  } else if (basis == "asymptotic") {
    if (T != 1.0) throw ConfigError("asymptotic basis lives on [0,1]");
    std::vector<AsymptoticEigenpair> pairs;
    for (int n = 1; n <= terms; ++n) pairs.push_back(fbm_eigenpair(h, n));
    kb.emplace(pairs, terms, tg);
  } else {
    throw ConfigError("basis must be oracle or asymptotic");
  }
  std::vector<PathSample> out(paths);
  parallel_for(paths, cfg.jobs, [&](int i) { out[i] = kb->sample(derive_seed(seed, static_cast<std::uint64_t>(i))); });
  Table t;
  t.columns = {"path", "seed", "t", "value", "tol"};
  for (int i = 0; i < paths; ++i)
    for (int j = 0; j < points; ++j) t.rows.push_back({i, out[i].seed, tg[j], out[i].values[j], 1e-12});
  t.summary["n_terms"] = terms;
  return t;
}

Table run_smallball(const RunConfig& cfg) {
  const auto& p = cfg.params;
  const auto hs = list_of(p, "hurst");
  const auto eps = list_of(p, "eps");
  const int terms = integer(p, "terms"), grid = integer(p, "grid");
  Table t;
  t.columns = {"H", "eps", "P_oracle", "log_law_residual", "cm", "ratio", "tol"};
  json fits = json::array();
  for (double hv : hs) {
    const HurstParam h(hv);
    std::vector<double> lams;
    double tail = 0.0;
    if (hv == 0.5) {
      for (int n = 1; n <= terms; ++n) lams.push_back(brownian_eigenpair(n).lam_n);
      tail = boost::math::trigamma(terms + 0.5) / (kPi * kPi);
    } else {
      OracleOptions opt;
      opt.richardson = false;
      const int m = std::min(terms, grid / 10);
      for (const auto& e : oracle_eigenpairs(KernelSpec::fbm(hv), grid, m, opt)) lams.push_back(e.lam);
      tail = asymptotic_tail(h, m);
    }
    SmallBallOptions so;
    so.tail_sum = tail;
    std::vector<double> probs(eps.size());
    parallel_for(static_cast<int>(eps.size()), cfg.jobs, [&](int i) { probs[i] = smallball_oracle(lams, eps[i], so); });
    const auto bg = beta_gamma(h);
    for (std::size_t i = 0; i < eps.size(); ++i) {
      const double r = std::log(probs[i]) + bg.beta * std::pow(eps[i], -1.0 / hv) - bg.gamma * std::log(eps[i]);
      double cm = NAN, ratio = NAN;
      if (hv == 0.5) {
        cm = cameron_martin(eps[i]).value;
        ratio = probs[i] / cm;
      }
      t.rows.push_back({hv, eps[i], probs[i], r, cell(cm), cell(ratio), 1e-8});
    }
    if (eps.size() >= 4) {
      std::vector<std::pair<double, double>> pr;
      for (std::size_t i = 0; i < eps.size(); ++i) pr.emplace_back(eps[i], probs[i]);
      const auto fit = smallball_loglaw_check(h, pr);
      fits.push_back({{"H", hv},
                      {"fitted_constant", fit.fitted_constant},
                      {"eps_slope", fit.eps_slope},
                      {"drift_shrinks", fit.drift_shrinks},
                      {"beta", bg.beta},
                      {"gamma", bg.gamma}});
    }
  }
  if (!fits.empty()) t.summary["loglaw"] = fits;
  return t;
}

Table run_secondkind(const RunConfig& cfg) {
  const auto& p = cfg.params;
  const HurstParam h(num(p, "hurst"));
  const auto eps = list_of(p, "eps");
  Table t;
  t.columns = {"H", "eps", "T", "u_eps_boundary", "bracketA", "bracketB", "slope", "tol"};
  const auto u = u_eps_boundary_sweep(h, eps, integer(p, "n"), num(p, "grading"));
  double slope = NAN;
  if (u.size() >= 2) {
    std::vector<double> x, y;
    for (const auto& r : u) {
      x.push_back(r.eps);
      y.push_back(r.value);
    }
    slope = loglog_slope(x, y);
    t.summary["u_slope"] = slope;
  }
  for (const auto& r : u) t.rows.push_back({h.h(), r.eps, 1.0, r.value, nullptr, nullptr, cell(slope), 1e-9});
  if (p.at("bracket").get<bool>()) {
    const double be = num(p, "bracket_eps"), tmax = num(p, "t_max");
    const auto c = martingale_bracket(h, be, tmax, integer(p, "bracket_n"));
    std::vector<double> x, y;
    double agree = 0.0;
    for (std::size_t i = 0; i < c.t.size(); ++i) {
      if (c.t[i] >= 4.0 && c.t[i] <= 32.0) {
        x.push_back(c.t[i]);
        y.push_back(c.derivative[i]);
      }
      if (c.t[i] >= 0.5) agree = std::max(agree, std::abs(c.bracket_b[i] / c.bracket_a[i] - 1.0));
    }
    const double dslope = x.size() >= 2 ? loglog_slope(x, y) : NAN;
    t.summary["bracket_slope"] = cell(dslope);
    t.summary["bracket_agreement"] = agree;
    if (tmax >= 32.0) {
      const auto g = growth_conditions_check(c);
      t.summary["first_condition_to_zero"] = g.first_trends_to_zero;
      t.summary["integral_cauchy"] = g.integral_cauchy;
    }
    // dyadic sample of the curve
    for (double tt = 0.5; tt <= tmax * (1 + 1e-12); tt *= 2.0) {
      std::size_t best = 0;
      for (std::size_t i = 0; i < c.t.size(); ++i)
        if (std::abs(c.t[i] - tt) < std::abs(c.t[best] - tt)) best = i;
      t.rows.push_back({h.h(), be, c.t[best], nullptr, c.bracket_a[best], c.bracket_b[best], cell(dslope), 1e-9});
    }
  }
  return t;
}

FilterModel model_from(const json& p) {
  FilterModel m;
  m.beta = num(p, "beta");
  m.mu = num(p, "mu");
  m.eps = num(p, "eps");
  m.h1 = HurstParam(num(p, "h1"));
  m.h2 = HurstParam(num(p, "h2"));
  m.validate();
  return m;
}

Table run_filter(const RunConfig& cfg) {
  const auto& p = cfg.params;
  const std::string mode = p.at("mode");
  Table t;
  if (mode == "census") {
    struct Set {
      double h1, h2, beta, mu, eps;
    };
    const std::vector<Set> sets = {{0.8, 0.5, 0.0, 1.0, 1.0},  {0.7, 0.5, -1.0, 1.0, 0.5}, {0.9, 0.6, 1.0, 2.0, 0.1},
                                   {0.6, 0.55, -0.5, 1.0, 2.0}, {0.75, 0.3, 0.0, 0.5, 1.0}, {0.95, 0.7, 2.0, 1.0, 0.3},
                                   {0.5, 0.8, 0.0, 1.0, 1.0},  {0.5, 0.7, -1.0, 1.0, 0.5}, {0.6, 0.9, 1.0, 2.0, 0.1},
                                   {0.55, 0.6, -0.5, 1.0, 2.0}, {0.3, 0.75, 0.0, 0.5, 1.0}, {0.7, 0.95, 2.0, 1.0, 0.3}};
    std::vector<ZeroResult> res(sets.size());
    parallel_for(static_cast<int>(sets.size()), cfg.jobs, [&](int i) {
      FilterModel m;
      m.h1 = HurstParam(sets[i].h1);
      m.h2 = HurstParam(sets[i].h2);
      m.beta = sets[i].beta;
      m.mu = sets[i].mu;
      m.eps = sets[i].eps;
      res[i] = find_zero_first_quadrant(m);
    });
    t.columns = {"H1", "H2", "beta", "mu", "eps", "winding", "expected", "z0_re", "z0_im", "tol"};
    bool all = true;
    for (std::size_t i = 0; i < sets.size(); ++i) {
      const auto& s = sets[i];
      const int expected = s.h1 > s.h2 ? 1 : 0;
      all = all && res[i].winding == expected;
      t.rows.push_back({s.h1, s.h2, s.beta, s.mu, s.eps, res[i].winding, expected,
                        cell(res[i].z0 ? res[i].z0->real() : NAN), cell(res[i].z0 ? res[i].z0->imag() : NAN), 1e-9});
    }
    FilterModel eq;
    eq.h1 = eq.h2 = HurstParam(0.7);
    eq.beta = 1.0;
    eq.mu = 1.0;
    eq.eps = 1.0;
    const auto z = find_zero_first_quadrant(eq);
    t.summary["census_match"] = all;
    t.summary["equal_hurst_t0"] = z.z0 ? z.z0->real() : NAN;
    t.summary["equal_hurst_expected"] = std::sqrt(2.0);
    return t;
  }
  if (mode != "steady") throw ConfigError("filter mode must be steady or census");
  const FilterModel m = model_from(p);
  t.columns = {"H1", "H2", "beta", "mu", "eps", "P_formula", "P_crosscheck", "rel_diff", "tol"};
  double formula = NAN, cross = NAN;
  if (m.h1.h() == m.h2.h()) {
    formula = klb_steady_state(m.h1, m);
    t.summary["KLeB"] = formula;
    if (m.h1.h() == 0.5) {
      cross = steady_state_bm(m);
      t.summary["PTinf"] = cross;
      t.summary["riccati"] = riccati_error(m, num(p, "T"));
    }
  } else if (m.h2.h() == 0.5) {
    formula = steady_state_white(m.h1, m);
    t.summary["Pinfty1"] = formula;
    if (m.beta < 0.0) {
      cross = stationary_spectral_error(m.h1, m);
      t.summary["sfla"] = cross;
    }
  } else {
    throw RegimeError("steady-state formulas cover equal Hurst exponents or white observation noise only");
  }
  const double rd = std::abs(formula / cross - 1.0);
  t.summary["rel_diff"] = cell(rd);
  t.rows.push_back({m.h1.h(), m.h2.h(), m.beta, m.mu, m.eps, formula, cell(cross), cell(rd), 1e-9});
  return t;
}

Table run_fisher(const RunConfig& cfg) {
  const auto& p = cfg.params;
  const std::string mode = p.at("mode");
  Table t;
  if (mode == "mle") {
    const std::uint64_t seed = need_seed(cfg);
    const int masters = integer(p, "masters");
    if (masters < 1) throw ConfigError("masters must be positive");
    OuOptions o;
    o.exact = p.at("exact");
    t.columns = {"master", "seed", "mean", "std", "skew", "kurt_excess", "pass", "tol"};
    int passed = 0;
    for (int i = 0; i < masters; ++i) {
      const auto ms = derive_seed(seed, static_cast<std::uint64_t>(i));
      const auto r = mc_asymptotic_normality(num(p, "theta0"), num(p, "T"), num(p, "dt"), integer(p, "reps"), ms,
                                             cfg.jobs, o);
      passed += r.pass();
      t.rows.push_back({i, ms, r.mean, r.std, r.skew, r.kurt_excess, r.pass(), 1e-10});
    }
    t.summary["pass_count"] = passed;
    t.summary["masters"] = masters;
    return t;
  }
  if (mode == "rates") {
    const double eps = num(p, "eps");
    t.columns = {"H", "sigma", "eps", "m11", "m12", "m22", "rate_H", "rate_sigma", "tol"};
    for (double hv : list_of(p, "hurst"))
      for (double s : list_of(p, "sigma")) {
        const MixedTheta th{HurstParam(hv), s};
        const auto M = rate_matrix(eps, th);
        const auto r = minimax_rates(eps, hv);
        t.rows.push_back({hv, s, eps, M(0, 0), M(0, 1), M(1, 1), r.first, r.second, 1e-12});
      }
    return t;
  }
  if (mode != "whittle" && mode != "mixed" && mode != "info")
    throw ConfigError("fisher mode must be whittle, mixed, info, mle or rates");
  t.columns = {"kind", "H", "sigma", "theta", "value", "reference", "rel_err", "tol"};
  if (mode != "mixed") {
    const auto th = list_of(p, "theta");
    std::vector<double> v(th.size());
    const double step = num(p, "step");
    parallel_for(static_cast<int>(th.size()), cfg.jobs,
                 [&](int i) { v[i] = whittle_rate(ou_spectral_density, th[i], step); });
    for (std::size_t i = 0; i < th.size(); ++i) {
      const double ref = 1.0 / (2.0 * th[i]);
      t.rows.push_back({"whittle", nullptr, nullptr, th[i], v[i], ref, std::abs(v[i] / ref - 1.0), 1e-9});
    }
  }
  if (mode != "whittle") {
    const auto hs = list_of(p, "hurst");
    const auto ss = list_of(p, "sigma");
    const double eps = num(p, "eps");
    const int n = static_cast<int>(hs.size() * ss.size());
    std::vector<Eigen::Matrix2d> I(n);
    parallel_for(n, cfg.jobs, [&](int k) {
      const MixedTheta th{HurstParam(hs[k / ss.size()]), ss[k % ss.size()]};
      I[k] = mixed_fisher_matrix(th, eps);
    });
    bool spd = true;
    for (int k = 0; k < n; ++k) {
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(I[k]);
      const double mn = es.eigenvalues()(0);
      spd = spd && mn > 0.0 && std::abs(I[k](0, 1) - I[k](1, 0)) <= 1e-14 * I[k].norm();
      const double h = hs[k / ss.size()], s = ss[k % ss.size()];
      t.rows.push_back({"fisher_I11", h, s, nullptr, I[k](0, 0), nullptr, nullptr, 1e-8});
      t.rows.push_back({"fisher_I12", h, s, nullptr, I[k](0, 1), nullptr, nullptr, 1e-8});
      t.rows.push_back({"fisher_I22", h, s, nullptr, I[k](1, 1), nullptr, nullptr, 1e-8});
      t.rows.push_back({"fisher_min_eig", h, s, nullptr, mn, nullptr, nullptr, 1e-8});
    }
    t.summary["fisher_spd"] = spd;
  }
  return t;
}

Table run_hilbert(const RunConfig& cfg) {
  const auto& p = cfg.params;
  const std::string kernel = p.at("kernel");
  SpecFamily fam;
  if (kernel == "synthetic")
    fam = [](double nu) { return HilbertSystemSpec::synthetic(nu); };
  else if (kernel == "zero")
    fam = [](double nu) { return HilbertSystemSpec::zero_kernel(nu); };
  else
    throw ConfigError("hilbert kernel must be synthetic or zero");
  const auto roots = find_nu_roots(fam, num(p, "nu_lo"), num(p, "nu_hi"), integer(p, "count"));
  Table t;
  t.columns = {"n", "nu_root", "residual", "scale", "prediction", "gap", "tol"};
  for (const auto& r : roots) t.rows.push_back({r.n, r.nu, r.residual, r.scale, r.asymptotic_prediction, r.gap(), 1e-9});
  t.summary["spec"] = json::parse(fam(num(p, "nu_lo")).to_json());
  json dev = json::array();
  for (double nu : list_of(p, "deviation_nu")) {
    const auto s = fam(nu);
    const auto sol = solve_pq(s);
    const auto d = deviation_metrics(s, sol);
    dev.push_back({{"nu", nu},
                   {"p_sup", d.p_sup},
                   {"q_sup", d.q_sup},
                   {"contraction", sol.contraction},
                   {"iterations", sol.iterations}});
  }
  t.summary["deviation"] = dev;
  return t;
}

}  // namespace

json RunConfig::to_json() const {
  json j;
  j["subcommand"] = subcommand;
  j["params"] = params;
  j["seed"] = seed ? json(*seed) : json(nullptr);
  j["output"] = output;
  j["format"] = format;
  j["jobs"] = jobs;
  return j;
}

RunConfig RunConfig::from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const std::vector<std::string> known = {"subcommand", "params", "seed", "output", "format", "jobs"};
  for (const auto& [k, v] : j.items())
    if (std::find(known.begin(), known.end(), k) == known.end()) throw ConfigError("unknown config key '" + k + "'");
  RunConfig c;
  try {
    c.subcommand = j.at("subcommand").get<std::string>();
    if (j.contains("params")) c.params = j.at("params");
    if (j.contains("seed") && !j.at("seed").is_null()) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("output")) c.output = j.at("output").get<std::string>();
    if (j.contains("format")) c.format = j.at("format").get<std::string>();
    if (j.contains("jobs")) c.jobs = j.at("jobs").get<int>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  return c;
}

std::vector<std::string> param_keys(const std::string& subcommand) {
  std::vector<std::string> out;
  for (const auto& p : params_of(subcommand)) out.push_back(p.key);
  return out;
}

RunConfig resolve(const RunConfig& cfg) {
  const auto& ps = params_of(cfg.subcommand);
  if (!cfg.params.is_object()) throw ConfigError("params must be an object");
  for (const auto& [k, v] : cfg.params.items()) {
    bool found = false;
    for (const auto& p : ps) found = found || p.key == k;
    if (!found) throw ConfigError("unknown parameter '" + k + "' for " + cfg.subcommand);
  }
  RunConfig r = cfg;
  r.params = json::object();
  for (const auto& p : ps) r.params[p.key] = coerce(p, cfg.params.contains(p.key) ? cfg.params.at(p.key) : p.def);
  if (r.format != "csv" && r.format != "json") throw ConfigError("format must be csv or json");
  if (r.jobs < 1) throw ConfigError("jobs must be at least 1");
  return r;
}

std::string render(const RunConfig& raw) {
  const RunConfig cfg = resolve(raw);
  Table t;
  const auto& s = cfg.subcommand;
  if (s == "eigen")
    t = run_eigen(cfg);
  else if (s == "sample")
    t = run_sample(cfg);
  else if (s == "smallball")
    t = run_smallball(cfg);
  else if (s == "secondkind")
    t = run_secondkind(cfg);
  else if (s == "filter")
    t = run_filter(cfg);
  else if (s == "fisher")
    t = run_fisher(cfg);
  else
    t = run_hilbert(cfg);

  std::ostringstream os;
  if (cfg.format == "json") {
    json j;
    j["config"] = cfg.to_json();
    j["columns"] = t.columns;
    j["rows"] = t.rows;
    j["summary"] = t.summary;
    os << j.dump(2) << '\n';
    return os.str();
  }
  os << "# config: " << cfg.to_json().dump() << '\n';
  if (!t.summary.empty()) os << "# summary: " << t.summary.dump() << '\n';
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
  os << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << fmt_cell(row[i]);
    os << '\n';
  }
  return os.str();
}

namespace {
int report(std::ostream& err, const std::string& kind, const std::string& msg, int code) {
  err << json{{"error", kind}, {"message", msg}, {"exit", code}}.dump() << '\n';
  return code;
}
}  // namespace

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    const std::string text = render(cfg);
    if (cfg.output.empty() || cfg.output == "-") {
      out << text;
    } else {
      std::ofstream f(cfg.output, std::ios::binary);
      if (!f) throw ConfigError("cannot open output file '" + cfg.output + "'");
      f << text;
    }
    return 0;
  } catch (const ConfigError& e) {
    return report(err, e.kind(), e.what(), 2);
  } catch (const Error& e) {
    return report(err, e.kind(), e.what(), 3);
  } catch (const std::exception& e) {
    return report(err, "numerical", e.what(), 3);
  }
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {
      "brownian-exact",    "fbm-asymptotics", "cm-smallball",  "blowup-law",       "kleb-identity",
      "zero-census",       "information-rates", "mle-normality", "hilbert-pipeline", "reproducibility"};
  return names;
}

RunConfig preset(const std::string& name) {
  RunConfig c;
  if (name == "brownian-exact") {
    c.subcommand = "eigen";
    c.params = {{"kernel", "brownian"}, {"grid", 2000}, {"count", 5}};
  } else if (name == "fbm-asymptotics") {
    c.subcommand = "eigen";
    c.params = {{"kernel", "fbm"}, {"hurst", json::array({0.6, 0.75, 0.9})}, {"grid", 4000}, {"count", 50}};
  } else if (name == "cm-smallball") {
    c.subcommand = "smallball";
    c.params = {{"hurst", json::array({0.5})}, {"eps", json::array({0.5, 0.4, 0.3, 0.25})}, {"terms", 500}};
  } else if (name == "blowup-law") {
    c.subcommand = "secondkind";
    c.params = {{"hurst", 0.75}, {"eps", json::array({0.1, 0.05, 0.025, 0.0125})}, {"t_max", 32.0}};
  } else if (name == "kleb-identity") {
    c.subcommand = "filter";
    c.params = {{"mode", "steady"}, {"h1", 0.5}, {"h2", 0.5}, {"beta", -1.0}, {"mu", 1.0}, {"eps", 1.0}};
  } else if (name == "zero-census") {
    c.subcommand = "filter";
    c.params = {{"mode", "census"}};
  } else if (name == "information-rates") {
    c.subcommand = "fisher";
    c.params = {{"mode", "info"}};
  } else if (name == "mle-normality") {
    c.subcommand = "fisher";
    c.params = {{"mode", "mle"}, {"theta0", 1.0}, {"T", 100.0}, {"reps", 500}, {"masters", 20}};
    c.seed = 20240611;
  } else if (name == "hilbert-pipeline") {
    c.subcommand = "hilbert";
    c.params = {{"kernel", "synthetic"}, {"nu_lo", 30.0}, {"nu_hi", 60.0}, {"count", 5}};
  } else if (name == "reproducibility") {
    c.subcommand = "sample";
    c.params = {{"hurst", json::array({0.75})}, {"terms", 100}, {"grid", 1000}, {"points", 51}, {"paths", 8}};
    c.seed = 7;
  } else {
    throw ConfigError("unknown preset '" + name + "'");
  }
  return c;
}

int main(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"fracspec: numerics for fractional Gaussian processes"};
  app.fallthrough();
  app.require_subcommand(0, 1);
  std::optional<std::uint64_t> seed;
  std::string output, format = "csv", config_file;
  int jobs = 1;
  app.add_option("--seed", seed, "master seed (required for sample and fisher --mode mle)");
  app.add_option("-o,--output", output, "output file (default stdout)");
  app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--config", config_file, "JSON file with subcommand parameters");

  std::map<std::string, std::map<std::string, std::string>> values;
  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, ps] : schema()) {
    auto* sub = app.add_subcommand(name, "run the " + name + " module");
    subs[name] = sub;
    for (const auto& p : ps) {
      std::string flag = "--" + p.key;
      std::string dashed = p.key;
      std::replace(dashed.begin(), dashed.end(), '_', '-');
      if (dashed != p.key) flag += ",--" + dashed;
      auto def = p.def;
      std::string dstr = p.type == Type::List ? "" : fmt_cell(def);
      if (p.type == Type::List)
        for (std::size_t i = 0; i < def.size(); ++i) dstr += (i ? "," : "") + fmt_cell(def[i]);
      sub->add_option(flag, values[name][p.key], "default " + dstr);
    }
  }
  auto* pre = app.add_subcommand("preset", "run or inspect a shipped preset");
  std::string preset_name;
  bool list = false, show = false;
  pre->add_option("name", preset_name, "preset name");
  pre->add_flag("--list", list, "list preset names");
  pre->add_flag("--show", show, "print the preset config as JSON");

  if (argc <= 1) {
    err << app.help();
    return 2;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    return report(err, "config", e.what(), 2);
  }

  try {
    RunConfig cfg;
    if (pre->parsed()) {
      if (list) {
        for (const auto& n : preset_names()) out << n << '\n';
        return 0;
      }
      if (preset_name.empty()) throw ConfigError("preset needs a name or --list");
      cfg = preset(preset_name);
      if (show) {
        out << cfg.to_json().dump(2) << '\n';
        return 0;
      }
    } else {
      std::string name;
      for (const auto& [n, sub] : subs)
        if (sub->parsed()) name = n;
      json j;
      if (!config_file.empty()) {
        std::ifstream f(config_file);
        if (!f) throw ConfigError("cannot read config file '" + config_file + "'");
        try {
          j = json::parse(f);
        } catch (const json::exception& e) {
          throw ConfigError(std::string("config file is not valid JSON: ") + e.what());
        }
        if (!j.is_object()) throw ConfigError("config file must hold a JSON object");
      }
      // a full run config, as printed by preset --show
      const bool full = j.contains("subcommand");
      if (full) {
        cfg = RunConfig::from_json(j);
        if (!name.empty() && name != cfg.subcommand)
          throw ConfigError("config file is for '" + cfg.subcommand + "', not '" + name + "'");
        name = cfg.subcommand;
      }
      if (name.empty()) {
        err << app.help();
        return 2;
      }
      cfg.subcommand = name;
      if (!config_file.empty() && !full) cfg.params = j;
      if (const auto it = subs.find(name); it != subs.end())
        for (const auto& [k, v] : values[name])
          if (it->second->count("--" + k) > 0) cfg.params[k] = v;
    }
    if (seed) cfg.seed = seed;
    if (!output.empty()) cfg.output = output;
    if (app.count("--format")) cfg.format = format;
    if (app.count("--jobs")) cfg.jobs = jobs;
    return run(cfg, out, err);
  } catch (const ConfigError& e) {
    return report(err, e.kind(), e.what(), 2);
  }
}

}  // namespace fracspec::cli
