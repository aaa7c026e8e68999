#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "sbm/sbm.hpp"

namespace {

using json = nlohmann::ordered_json;

enum class Format { json, csv };

struct Output {
  std::string format;
  std::string path;

  [[nodiscard]] Format resolve(Format fallback) const {
    if (format.empty()) return fallback;
    return format == "csv" ? Format::csv : Format::json;
  }
};

struct DataArgs {
  std::string input;
  std::string column = "0";
  bool header = false;
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_.open(path);
      if (!file_) throw sbm::InputError("cannot write '" + path + "'");
    }
  }
  std::ostream& out() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

void write_json(const std::string& path, const json& doc) {
  Sink sink(path);
  sink.out() << doc.dump(2) << "\n";
}

json meta(std::string_view command, json config, std::optional<std::uint64_t> seed = {}) {
  json m;
  m["tool"] = "sbm";
  m["version"] = sbm::version;
  m["command"] = command;
  m["seed"] = seed ? json(*seed) : json(nullptr);
  m["rng"] = sbm::rng_description();
  m["config"] = std::move(config);
  return m;
}

template <class Derived>
json to_json(const Eigen::MatrixBase<Derived>& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

sbm::io::CsvData load(const DataArgs& a, std::optional<std::string> label_column = {}) {
  return sbm::io::ingest_csv(a.input, sbm::io::CsvOptions{a.column, a.header, label_column});
}

json data_echo(const DataArgs& a) {
  return {{"input", a.input}, {"column", a.column}, {"header", a.header}};
}

json fit_json(const sbm::frechet::Fit& f) {
  return {{"alpha", f.params.alpha},
          {"sigma", f.params.sigma},
          {"k", f.k},
          {"r", f.r},
          {"n", f.n},
          {"m_effective", f.m_effective()},
          {"scheme", sbm::to_string(f.scheme)},
          {"truncation", f.truncation},
          {"solver",
           {{"iterations", f.solver.iterations},
            {"residual", f.solver.residual},
            {"bracket", {f.solver.bracket_low, f.solver.bracket_high}}}}};
}

std::vector<std::string> parse_list(const std::string& text) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto comma = std::min(text.find(',', pos), text.size());
    if (comma > pos) out.push_back(text.substr(pos, comma - pos));
    pos = comma + 1;
  }
  return out;
}

// --grid: comma list of integers or inclusive ranges a:b[:step]
std::vector<std::size_t> parse_grid(const std::string& text) {
  std::vector<std::size_t> out;
  std::size_t pos = 0;
  auto to_size = [&](const std::string& s) -> std::size_t {
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(s, &used);
    } catch (const std::exception&) {
      throw sbm::InputError("bad grid entry '" + s + "'");
    }
    if (used != s.size() || v < 0) throw sbm::InputError("bad grid entry '" + s + "'");
    return static_cast<std::size_t>(v);
  };
  while (pos <= text.size()) {
    const auto comma = std::min(text.find(',', pos), text.size());
    const std::string tok = text.substr(pos, comma - pos);
    pos = comma + 1;
    if (tok.empty()) continue;
    std::vector<std::string> parts;
    std::size_t p = 0;
    while (true) {
      const auto c = tok.find(':', p);
      parts.push_back(tok.substr(p, c == std::string::npos ? std::string::npos : c - p));
      if (c == std::string::npos) break;
      p = c + 1;
    }
    if (parts.size() == 1) {
      out.push_back(to_size(parts[0]));
    } else if (parts.size() <= 3) {
      const std::size_t a = to_size(parts[0]), b = to_size(parts[1]);
      const std::size_t step = parts.size() == 3 ? to_size(parts[2]) : 1;
      if (step == 0 || b < a) throw sbm::InputError("bad grid range '" + tok + "'");
      for (std::size_t v = a; v <= b; v += step) out.push_back(v);
    } else {
      throw sbm::InputError("bad grid entry '" + tok + "'");
    }
  }
  if (out.empty()) throw sbm::InputError("empty grid");
  return out;
}

// ---- blocks ----

struct BlocksArgs {
  DataArgs data;
  std::size_t r = 0;
  std::string scheme = "sliding";
  std::optional<double> truncation;
  Output out;
};

void run_blocks(const BlocksArgs& a) {
  const auto data = load(a.data);
  auto sample = sbm::block_maxima(data.series, a.r, sbm::parse_scheme(a.scheme));
  if (a.truncation) sample = sbm::left_truncate(std::move(sample), *a.truncation);
  if (a.out.resolve(Format::csv) == Format::csv) {
    Sink sink(a.out.path);
    auto& os = sink.out();
    os << "index,maximum\n";
    for (std::size_t i = 0; i < sample.size(); ++i) os << i << ',' << num(sample.maxima[i]) << '\n';
    return;
  }
  json cfg = data_echo(a.data);
  cfg["block_size"] = a.r;
  cfg["scheme"] = a.scheme;
  cfg["truncation"] = a.truncation ? json(*a.truncation) : json(nullptr);
  json doc{{"meta", meta("blocks", cfg)},
           {"scheme", sbm::to_string(sample.scheme)},
           {"r", sample.r},
           {"n", sample.n},
           {"k", sample.k},
           {"maxima", sample.maxima}};
  write_json(a.out.path, doc);
}

// ---- fit / return-level ----

struct FitArgs {
  DataArgs data;
  std::size_t r = 0;
  std::string scheme = "sliding";
  double truncation = sbm::default_truncation();
  Output out;
};

json fit_echo(const FitArgs& a) {
  json cfg = data_echo(a.data);
  cfg["block_size"] = a.r;
  cfg["scheme"] = a.scheme;
  cfg["truncation"] = a.truncation;
  return cfg;
}

sbm::frechet::Fit do_fit(const FitArgs& a) {
  const auto data = load(a.data);
  return sbm::frechet::fit_series(data.series, a.r, sbm::parse_scheme(a.scheme), a.truncation);
}

void run_fit(const FitArgs& a) {
  const auto f = do_fit(a);
  if (a.out.resolve(Format::json) == Format::csv) {
    Sink sink(a.out.path);
    sink.out() << "alpha,sigma,k,r,n,scheme,truncation,iterations\n"
               << num(f.params.alpha) << ',' << num(f.params.sigma) << ',' << f.k << ',' << f.r
               << ',' << f.n << ',' << sbm::to_string(f.scheme) << ',' << num(f.truncation) << ','
               << f.solver.iterations << '\n';
    return;
  }
  json doc{{"meta", meta("fit", fit_echo(a))}};
  doc.update(fit_json(f));
  write_json(a.out.path, doc);
}

struct ReturnLevelArgs {
  FitArgs fit;
  std::vector<double> T = {20, 40, 80};
  double confidence = 0.95;
  std::optional<double> alpha;
};

void run_return_level(const ReturnLevelArgs& a) {
  const auto f = do_fit(a.fit);
  std::vector<sbm::returnlevel::Estimate> est;
  for (double T : a.T) est.push_back(sbm::returnlevel::ci(f, T, a.confidence, a.alpha));
  if (a.fit.out.resolve(Format::json) == Format::csv) {
    Sink sink(a.fit.out.path);
    auto& os = sink.out();
    os << "T,estimate,variance_factor,ci_low,ci_high,level,alpha_for_variance,alpha,sigma\n";
    for (const auto& e : est) {
      os << num(e.T) << ',' << num(e.point) << ',' << num(e.variance_factor) << ','
         << num(e.ci_low) << ',' << num(e.ci_high) << ',' << num(e.level) << ','
         << num(e.alpha_for_variance) << ',' << num(f.params.alpha) << ','
         << num(f.params.sigma) << '\n';
    }
    return;
  }
  json cfg = fit_echo(a.fit);
  cfg["T"] = a.T;
  cfg["confidence"] = a.confidence;
  cfg["alpha"] = a.alpha ? json(*a.alpha) : json(nullptr);
  json levels = json::array();
  for (const auto& e : est) {
    levels.push_back({{"T", e.T},
                      {"estimate", e.point},
                      {"variance_factor", e.variance_factor},
                      {"ci_low", e.ci_low},
                      {"ci_high", e.ci_high},
                      {"level", e.level},
                      {"alpha_for_variance", e.alpha_for_variance},
                      {"m_effective", e.m_effective}});
  }
  json doc{{"meta", meta("return-level", cfg)}, {"fit", fit_json(f)}, {"levels", levels}};
  write_json(a.fit.out.path, doc);
}

// ---- asymptotics ----

struct AsymptoticsArgs {
  double alpha = 1.0;
  bool table1 = false;
  bool verify = false;
  std::optional<double> rho;
  double lambda = 1.0;
  std::uint64_t seed = 1;
  std::uint64_t draws = 1000000;
  unsigned threads = 0;
  Output out;
};

constexpr double kTable1T[] = {50, 100, 200, 500, 1000, 5000, 10000};
constexpr double kVerifyTol = 1e-8;

struct VerifyRow {
  sbm::marshall_olkin::HCase c;
  double closed, quadrature, quad_error, mc, mc_se;
};

// (row, col) of Sigma_Y and the prefactor p with sigma = 2 p H
struct SigmaSlot {
  int i, j;
  double p;
};

SigmaSlot slot_of(sbm::marshall_olkin::HCase c, double a) {
  using sbm::marshall_olkin::HCase;
  switch (c) {
    case HCase::h11_11: return {0, 0, 1 / (a * a)};
    case HCase::h00_11: return {1, 1, 1.0};
    case HCase::h11_00: return {2, 2, 1 / (a * a)};
    case HCase::h01_11: return {0, 1, -1 / a};
    case HCase::h11_10: return {0, 2, 1 / (a * a)};
    case HCase::h01_10: return {1, 2, -1 / a};
  }
  return {0, 0, 1.0};
}

void run_asymptotics(const AsymptoticsArgs& a) {
  namespace as = sbm::asymptotics;
  namespace mo = sbm::marshall_olkin;
  const auto t = as::tables(a.alpha);
  const auto bounds = as::ratio_bounds(a.alpha);
  const double ratio_shape = t.sigma_sliding(0, 0) / t.fisher_inv_disjoint(0, 0);
  const double ratio_scale = t.sigma_sliding(1, 1) / t.fisher_inv_disjoint(1, 1);
  std::optional<as::BiasVector> bias;
  if (a.rho) bias = as::bias_iid(a.alpha, *a.rho, a.lambda);

  std::vector<VerifyRow> rows;
  double max_dev = 0.0;
  if (a.verify) {
    const unsigned threads = a.threads ? a.threads : std::max(1u, std::thread::hardware_concurrency());
    const auto mc = mo::mc_sigma_Y_oracle(a.seed, a.alpha, a.draws, threads);
    for (auto c : mo::all_cases) {
      const auto q = mo::cov_H_integral_quadrature_detailed(c);
      const auto s = slot_of(c, a.alpha);
      VerifyRow row{c, mo::cov_H_integral_closed(c), q.value, q.error,
                    mc.estimate(s.i, s.j) / (2 * s.p), mc.std_error(s.i, s.j) / (2 * std::abs(s.p))};
      max_dev = std::max(max_dev, std::abs(row.quadrature - row.closed));
      rows.push_back(row);
    }
  }

  if (a.out.resolve(Format::json) == Format::csv) {
    Sink sink(a.out.path);
    auto& os = sink.out();
    os << "section,row,column,value\n";
    auto mat = [&](const char* name, const auto& m) {
      for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) os << name << ',' << i << ',' << j << ',' << num(m(i, j)) << '\n';
      }
    };
    mat("sigma_Y", t.sigma_Y);
    mat("M", t.M);
    mat("sigma", t.sigma_sliding);
    mat("fisher_inverse", t.fisher_inv_disjoint);
    os << "ratio,diagonal,shape," << num(ratio_shape) << '\n'
       << "ratio,diagonal,scale," << num(ratio_scale) << '\n'
       << "ratio,bounds,low," << num(bounds.first) << '\n'
       << "ratio,bounds,high," << num(bounds.second) << '\n';
    if (bias) os << "bias,iid,shape," << num(bias->shape) << "\nbias,iid,scale," << num(bias->scale) << '\n';
    if (a.table1) {
      for (double T : kTable1T) {
        const double s = sbm::returnlevel::variance_factor(T, a.alpha, sbm::Scheme::sliding);
        const double d = sbm::returnlevel::variance_factor(T, a.alpha, sbm::Scheme::disjoint);
        os << "table1," << num(T) << ",sliding," << num(s) << '\n'
           << "table1," << num(T) << ",disjoint," << num(d) << '\n'
           << "table1," << num(T) << ",ratio," << num(s / d) << '\n';
      }
    }
    for (const auto& r : rows) {
      const auto name = mo::name_of(r.c);
      os << "verify," << name << ",closed," << num(r.closed) << '\n'
         << "verify," << name << ",quadrature," << num(r.quadrature) << '\n'
         << "verify," << name << ",monte_carlo," << num(r.mc) << '\n'
         << "verify," << name << ",monte_carlo_se," << num(r.mc_se) << '\n';
    }
  } else {
    json cfg{{"alpha", a.alpha}, {"table1", a.table1}, {"verify", a.verify}};
    cfg["rho"] = a.rho ? json(*a.rho) : json(nullptr);
    cfg["lambda"] = a.lambda;
    if (a.verify) cfg["draws"] = a.draws;
    json doc{{"meta", meta("asymptotics", cfg, a.verify ? std::optional(a.seed) : std::nullopt)},
             {"alpha0", a.alpha},
             {"sigma_Y", to_json(t.sigma_Y)},
             {"M", to_json(t.M)},
             {"sigma", to_json(t.sigma_sliding)},
             {"fisher_inverse", to_json(t.fisher_inv_disjoint)},
             {"diagonal_ratios", {{"shape", ratio_shape}, {"scale", ratio_scale}}},
             {"ratio_bounds", {{"low", bounds.first}, {"high", bounds.second}}}};
    if (bias) doc["bias"] = {{"shape", bias->shape}, {"scale", bias->scale}, {"rho", bias->rho}, {"lambda", bias->lambda}};
    if (a.table1) {
      json grid = json::array();
      for (double T : kTable1T) {
        const double s = sbm::returnlevel::variance_factor(T, a.alpha, sbm::Scheme::sliding);
        const double d = sbm::returnlevel::variance_factor(T, a.alpha, sbm::Scheme::disjoint);
        grid.push_back({{"T", T}, {"sliding", s}, {"disjoint", d}, {"ratio", s / d}});
      }
      doc["table1"] = grid;
    }
    if (a.verify) {
      json vr = json::array();
      for (const auto& r : rows) {
        vr.push_back({{"case", mo::name_of(r.c)},
                      {"closed", r.closed},
                      {"quadrature", r.quadrature},
                      {"quadrature_deviation", std::abs(r.quadrature - r.closed)},
                      {"quadrature_error_estimate", r.quad_error},
                      {"monte_carlo", r.mc},
                      {"monte_carlo_se", r.mc_se}});
      }
      doc["verify"] = {{"rows", vr},
                       {"max_quadrature_deviation", max_dev},
                       {"tolerance", kVerifyTol},
                       {"pass", max_dev <= kVerifyTol}};
    }
    write_json(a.out.path, doc);
  }
  if (a.verify && !(max_dev <= kVerifyTol)) {
    throw sbm::EstimationError("quadrature deviates from closed forms by " + num(max_dev));
  }
}

// ---- simulate ----

struct SimulateArgs {
  std::string model = "iid";
  std::string dist = "frechet";
  double alpha = 1.0;
  double beta = 0.5;
  std::size_t n = 1000;
  std::size_t reps = 3000;
  std::uint64_t seed = 1;
  std::string grid;
  std::string estimators = "sliding,disjoint,hill";
  double truncation = sbm::default_truncation();
  unsigned threads = 0;
  bool trajectory = false;
  std::string meta_path;
  Output out;
};

// m = floor(n / r) for r = 2..50, duplicates dropped
std::vector<std::size_t> default_m_grid(std::size_t n) {
  std::vector<std::size_t> out;
  std::set<std::size_t> seen;
  for (std::size_t r = 2; r <= 50 && r <= n; ++r) {
    const std::size_t m = n / r;
    if (m >= 2 && seen.insert(m).second) out.push_back(m);
  }
  return out;
}

void run_simulate(const SimulateArgs& a) {
  namespace sim = sbm::simulate;
  sim::GeneratorSpec spec;
  spec.family = sim::parse_family(a.model);
  spec.innovation = sim::parse_innovation(a.dist);
  spec.alpha = a.alpha;
  spec.beta = spec.family == sim::Family::armax ? a.beta : 0.0;
  spec.validate();

  json cfg{{"model", a.model},
           {"dist", a.dist},
           {"alpha", a.alpha},
           {"beta", spec.beta},
           {"burn_in", spec.burn_in},
           {"n", a.n},
           {"truncation", a.truncation},
           {"trajectory", a.trajectory}};
  const Format fmt = a.out.resolve(Format::csv);

  if (a.trajectory) {
    std::vector<std::size_t> grid;
    if (a.grid.empty()) {
      for (std::size_t r = 2; r <= 50; ++r) grid.push_back(r);
    } else {
      grid = parse_grid(a.grid);
    }
    auto rng = sbm::make_stream(a.seed, 0);
    const auto series = sim::generate(rng, spec, a.n);
    const auto traj = sim::trajectory(series, grid, a.truncation);
    cfg["grid_r"] = grid;
    const json m = meta("simulate", cfg, a.seed);
    auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
    if (fmt == Format::csv) {
      Sink sink(a.out.path);
      auto& os = sink.out();
      os << "r,m,sliding,disjoint,hill\n";
      auto cell = [](const std::optional<double>& v) { return v ? num(*v) : std::string(); };
      for (const auto& p : traj) {
        os << p.r << ',' << p.m << ',' << cell(p.sliding) << ',' << cell(p.disjoint) << ','
           << cell(p.hill) << '\n';
      }
      if (!a.meta_path.empty()) write_json(a.meta_path, {{"meta", m}});
    } else {
      json rows = json::array();
      for (const auto& p : traj) {
        rows.push_back({{"r", p.r}, {"m", p.m}, {"sliding", opt(p.sliding)},
                        {"disjoint", opt(p.disjoint)}, {"hill", opt(p.hill)}, {"error", p.error}});
      }
      write_json(a.out.path, {{"meta", m}, {"trajectory", rows}});
    }
    return;
  }

  sim::McConfig config;
  config.n = a.n;
  config.reps = a.reps;
  config.seed = a.seed;
  config.truncation = a.truncation;
  config.threads = a.threads ? a.threads : std::max(1u, std::thread::hardware_concurrency());
  config.grid = a.grid.empty() ? default_m_grid(a.n) : parse_grid(a.grid);
  config.estimators.clear();
  for (const auto& e : parse_list(a.estimators)) config.estimators.push_back(sim::parse_estimator(e));
  const auto res = sim::run_mc(config, spec);

  cfg["reps"] = a.reps;
  cfg["grid_m"] = config.grid;
  cfg["estimators"] = parse_list(a.estimators);
  json m = meta("simulate", cfg, a.seed);
  m["variance"] = "population form, denominator = successful replications; mse = bias2 + variance";
  m["streams"] = "replication i uses stream (seed, i)";

  auto cell_json = [](const sim::McCell& c) {
    return json{{"estimator", sim::to_string(c.estimator)},
                {"m", c.m},
                {"r", c.r},
                {"mean", c.mean},
                {"mean_sigma", c.mean_sigma},
                {"bias2", c.bias2},
                {"variance", c.variance},
                {"mse", c.mse},
                {"reps", c.reps},
                {"failures", c.failures},
                {"valid", c.valid}};
  };
  if (fmt == Format::csv) {
    {
      Sink sink(a.out.path);
      auto& os = sink.out();
      os << "estimator,m,r,mean,bias2,variance,mse,reps,failures,valid\n";
      for (const auto& c : res.cells) {
        os << sim::to_string(c.estimator) << ',' << c.m << ',' << c.r << ',' << num(c.mean) << ','
           << num(c.bias2) << ',' << num(c.variance) << ',' << num(c.mse) << ',' << c.reps << ','
           << c.failures << ',' << (c.valid ? "true" : "false") << '\n';
      }
    }
    std::string mp = a.meta_path;
    if (mp.empty() && !a.out.path.empty() && a.out.path != "-") mp = a.out.path + ".meta.json";
    if (!mp.empty()) {
      json header{{"meta", m},
                  {"columns", {"estimator", "m", "r", "mean", "bias2", "variance", "mse", "reps",
                               "failures", "valid"}},
                  {"data", a.out.path}};
      write_json(mp, header);
    }
  } else {
    json cells = json::array();
    for (const auto& c : res.cells) cells.push_back(cell_json(c));
    write_json(a.out.path, {{"meta", m}, {"alpha0", res.alpha0}, {"cells", cells}});
  }
}

// ---- backtest ----

struct BacktestArgs {
  DataArgs data;
  std::optional<std::string> date_column;
  bool returns = false;
  std::string sign = "positive";
  std::size_t window = 2500;
  std::size_t r = 62;
  std::size_t step = 0;
  std::vector<double> T = {20, 40, 80};
  double confidence = 0.95;
  double truncation = sbm::default_truncation();
  Output out;
};

void run_backtest(const BacktestArgs& a) {
  namespace bt = sbm::backtest;
  const auto data = load(a.data, a.date_column);
  const auto sign = sbm::io::parse_sign(a.sign);
  sbm::TimeSeries series;
  std::vector<std::string> labels;
  if (a.returns) {
    std::vector<double> v(data.series.values().begin(), data.series.values().end());
    if (sign == sbm::io::Sign::negative) {
      for (double& x : v) x = -x;
    }
    series = sbm::TimeSeries(std::move(v));
    labels = data.labels;
  } else {
    series = sbm::io::log_returns(data.series, sign);
    // a return is labelled by the later of its two prices
    if (!data.labels.empty()) labels.assign(data.labels.begin() + 1, data.labels.end());
  }

  bt::Config config;
  config.window = a.window;
  config.r = a.r;
  config.step = a.step;
  config.T_list = a.T;
  config.sign = sign;
  config.level = a.confidence;
  config.truncation = a.truncation;
  const auto rep = bt::run(series, config, labels);

  if (a.out.resolve(Format::json) == Format::csv) {
    Sink sink(a.out.path);
    auto& os = sink.out();
    os << "index,label,window_end,failed,alpha,sigma,realized_max";
    for (double T : a.T) os << ",rl_" << num(T) << ",exceeded_" << num(T);
    os << '\n';
    for (const auto& roll : rep.rolls) {
      os << roll.index << ',' << roll.label << ',' << roll.window_end << ','
         << (roll.failed ? "true" : "false") << ',';
      if (roll.failed) {
        os << ",," << num(roll.realized_max);
        for (std::size_t t = 0; t < a.T.size(); ++t) os << ",,";
      } else {
        os << num(roll.alpha) << ',' << num(roll.sigma) << ',' << num(roll.realized_max);
        for (std::size_t t = 0; t < a.T.size(); ++t) {
          os << ',' << num(roll.levels[t].point) << ',' << (roll.exceeded[t] ? 1 : 0);
        }
      }
      os << '\n';
    }
    return;
  }

  json cfg = data_echo(a.data);
  cfg["date_column"] = a.date_column ? json(*a.date_column) : json(nullptr);
  cfg["returns"] = a.returns;
  cfg["sign"] = a.sign;
  cfg["window"] = a.window;
  cfg["block_size"] = a.r;
  cfg["step"] = config.effective_step();
  cfg["T"] = a.T;
  cfg["confidence"] = a.confidence;
  cfg["truncation"] = a.truncation;
  json rolls = json::array();
  for (const auto& roll : rep.rolls) {
    json lv = json::array();
    for (std::size_t t = 0; t < roll.levels.size(); ++t) {
      const auto& e = roll.levels[t];
      lv.push_back({{"T", e.T},
                    {"estimate", e.point},
                    {"ci_low", e.ci_low},
                    {"ci_high", e.ci_high},
                    {"exceeded", static_cast<bool>(roll.exceeded[t])}});
    }
    json jr{{"index", roll.index},
            {"label", roll.label},
            {"train_begin", roll.train_begin},
            {"window_end", roll.window_end},
            {"failed", roll.failed},
            {"realized_max", roll.realized_max},
            {"levels", lv}};
    if (roll.failed) {
      jr["error"] = roll.error;
    } else {
      jr["alpha"] = roll.alpha;
      jr["sigma"] = roll.sigma;
    }
    rolls.push_back(std::move(jr));
  }
  json totals = json::array();
  for (std::size_t t = 0; t < a.T.size(); ++t) {
    totals.push_back({{"T", a.T[t]}, {"exceedances", rep.exceedances[t]}, {"expected", rep.expected[t]}});
  }
  json doc{{"meta", meta("backtest", cfg)},
           {"n_returns", series.size()},
           {"successful", rep.successful},
           {"failed", rep.failed},
           {"totals", totals},
           {"rolls", rolls}};
  write_json(a.out.path, doc);
}

void add_output(CLI::App* sub, Output& out) {
  sub->add_option("--format", out.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  sub->add_option("--output,-o", out.path, "Output file (default stdout)");
}

void add_data(CLI::App* sub, DataArgs& d) {
  sub->add_option("--input,-i", d.input, "CSV file")->required();
  sub->add_option("--column", d.column, "Column index (0-based) or header name")->capture_default_str();
  sub->add_flag("--header", d.header, "First non-blank line is a header");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Extreme-value inference with sliding and disjoint block maxima", "sbm"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(sbm::version));

  BlocksArgs blocks;
  auto* c_blocks = app.add_subcommand("blocks", "Extract sliding or disjoint block maxima");
  add_data(c_blocks, blocks.data);
  c_blocks->add_option("--block-size,-r", blocks.r, "Block size")->required()->check(CLI::PositiveNumber);
  c_blocks->add_option("--scheme", blocks.scheme)->check(CLI::IsMember({"sliding", "disjoint"}))->capture_default_str();
  c_blocks->add_option("--truncation", blocks.truncation, "Apply max(x, c) to the maxima");
  add_output(c_blocks, blocks.out);

  FitArgs fit;
  auto* c_fit = app.add_subcommand("fit", "Frechet quasi-likelihood fit to block maxima");
  add_data(c_fit, fit.data);
  c_fit->add_option("--block-size,-r", fit.r, "Block size (1 fits the column as given)")->required()->check(CLI::PositiveNumber);
  c_fit->add_option("--scheme", fit.scheme)->check(CLI::IsMember({"sliding", "disjoint"}))->capture_default_str();
  c_fit->add_option("--truncation", fit.truncation, "Left truncation constant")->capture_default_str();
  add_output(c_fit, fit.out);

  ReturnLevelArgs rl;
  auto* c_rl = app.add_subcommand("return-level", "Return levels with normal confidence intervals");
  add_data(c_rl, rl.fit.data);
  c_rl->add_option("--block-size,-r", rl.fit.r, "Block size")->required()->check(CLI::PositiveNumber);
  c_rl->add_option("--scheme", rl.fit.scheme)->check(CLI::IsMember({"sliding", "disjoint"}))->capture_default_str();
  c_rl->add_option("--truncation", rl.fit.truncation)->capture_default_str();
  c_rl->add_option("-T", rl.T, "Return periods in blocks (comma list)")->delimiter(',')->capture_default_str();
  c_rl->add_option("--confidence", rl.confidence)->capture_default_str();
  c_rl->add_option("--alpha", rl.alpha, "Shape used in the variance (default: fitted)");
  add_output(c_rl, rl.fit.out);

  AsymptoticsArgs as;
  auto* c_as = app.add_subcommand("asymptotics", "Asymptotic covariance matrices and tables");
  c_as->add_option("--alpha", as.alpha, "Shape alpha0")->capture_default_str();
  c_as->add_flag("--table1", as.table1, "Return-level variance grid");
  c_as->add_flag("--verify", as.verify, "Closed form vs quadrature vs Monte Carlo");
  c_as->add_option("--rho", as.rho, "Second-order index (<= 0) for the bias vector");
  c_as->add_option("--lambda", as.lambda, "Bias scale")->capture_default_str();
  c_as->add_option("--seed", as.seed, "Monte Carlo seed")->capture_default_str();
  c_as->add_option("--n", as.draws, "Monte Carlo draws")->capture_default_str();
  c_as->add_option("--threads", as.threads, "Worker threads (0 = all cores)");
  add_output(c_as, as.out);

  SimulateArgs sim;
  auto* c_sim = app.add_subcommand("simulate", "Monte Carlo study of shape estimators");
  c_sim->add_option("--model", sim.model)->check(CLI::IsMember({"iid", "armax"}))->capture_default_str();
  c_sim->add_option("--dist", sim.dist)->check(CLI::IsMember({"frechet", "pareto", "abs_t", "t"}))->capture_default_str();
  c_sim->add_option("--alpha", sim.alpha)->capture_default_str();
  c_sim->add_option("--beta", sim.beta, "ARMAX coefficient")->capture_default_str();
  c_sim->add_option("--n", sim.n, "Series length")->capture_default_str();
  c_sim->add_option("--reps", sim.reps)->capture_default_str();
  c_sim->add_option("--seed", sim.seed)->capture_default_str();
  c_sim->add_option("--grid", sim.grid, "Effective sizes m (r with --trajectory): list or a:b[:step]");
  c_sim->add_option("--estimators", sim.estimators)->capture_default_str();
  c_sim->add_option("--truncation", sim.truncation)->capture_default_str();
  c_sim->add_option("--threads", sim.threads, "Worker threads (0 = all cores)");
  c_sim->add_flag("--trajectory", sim.trajectory, "Estimates along r for one simulated path");
  c_sim->add_option("--meta", sim.meta_path, "Metadata JSON (default <output>.meta.json)");
  add_output(c_sim, sim.out);

  BacktestArgs btest;
  auto* c_bt = app.add_subcommand("backtest", "Rolling out-of-sample return-level check");
  add_data(c_bt, btest.data);
  c_bt->add_option("--date-column", btest.date_column, "Column used to label rolls");
  c_bt->add_flag("--returns", btest.returns, "Input is already a return series");
  c_bt->add_option("--sign", btest.sign)->check(CLI::IsMember({"positive", "negative"}))->capture_default_str();
  c_bt->add_option("--window", btest.window)->capture_default_str();
  c_bt->add_option("--block-size,-r", btest.r)->capture_default_str()->check(CLI::PositiveNumber);
  c_bt->add_option("--step", btest.step, "Roll increment (default: block size)");
  c_bt->add_option("-T", btest.T)->delimiter(',')->capture_default_str();
  c_bt->add_option("--confidence", btest.confidence)->capture_default_str();
  c_bt->add_option("--truncation", btest.truncation)->capture_default_str();
  add_output(c_bt, btest.out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (c_blocks->parsed()) run_blocks(blocks);
    else if (c_fit->parsed()) run_fit(fit);
    else if (c_rl->parsed()) run_return_level(rl);
    else if (c_as->parsed()) run_asymptotics(as);
    else if (c_sim->parsed()) run_simulate(sim);
    else if (c_bt->parsed()) run_backtest(btest);
  } catch (const sbm::InputError& e) {
    std::cerr << "sbm: " << e.what() << '\n';
    return 2;
  } catch (const sbm::EstimationError& e) {
    std::cerr << "sbm: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "sbm: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
