#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "threshnet/dist.hpp"
#include "threshnet/error.hpp"
#include "threshnet/graph.hpp"
#include "threshnet/limits.hpp"
#include "threshnet/motifs.hpp"
#include "threshnet/quadrature.hpp"
#include "threshnet/random.hpp"
#include "threshnet/runner.hpp"
#include "threshnet/spatial.hpp"
#include "threshnet/stats.hpp"

namespace threshnet::cli {

inline const std::vector<std::string>& commands() {
  static const std::vector<std::string> names{"degree", "pair",   "triangles", "motif",
                                              "local",  "limits", "spatial",   "clt-check"};
  return names;
}

enum class Format { csv, json };

struct RunConfig {
  std::string command;
  std::string dist = "uniform:0,1";
  double theta = 1.0;
  std::uint64_t n = 1000;
  std::uint64_t R = 1;
  std::uint64_t seed = 1;
  std::optional<std::string> motif;
  int d = 2;
  double beta = 1.0;
  double lambda = 1.0;
  double r = 1.0;
  std::string mode = "mixture";
  std::optional<double> x0;
  std::optional<double> Cr;
  std::string table = "summary";
  std::uint64_t grid = 0;  // 0: command default
  std::uint64_t mc = 1'000'000;
  std::size_t quad_nodes = 256;
  std::optional<std::string> out;
  std::optional<std::string> samples;
  std::optional<Format> format;

  Format output_format() const {
    if (format) return *format;
    return out && out->ends_with(".json") ? Format::json : Format::csv;
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["command"] = command;
    j["dist"] = dist;
    j["theta"] = theta;
    if (command != "spatial" && command != "clt-check" && (command != "limits" || table == "degree-pmf")) j["n"] = n;
    if (command != "limits") j["R"] = R;
    j["seed"] = seed;
    if (motif) j["motif"] = *motif;
    if (command == "spatial" || command == "clt-check") {
      j["d"] = d;
      j["beta"] = beta;
      j["lambda"] = lambda;
      j["r"] = r;
      j["mode"] = mode;
      if (x0) j["x0"] = *x0;
      if (Cr) j["Cr"] = *Cr;
    }
    if (command == "limits") j["table"] = table;
    if (grid != 0) j["grid"] = grid;
    if (command == "motif") j["mc"] = mc;
    j["quad_nodes"] = quad_nodes;
    return j;
  }
};

namespace detail {

inline std::uint64_t parse_count(std::string_view text, std::string_view key) {
  std::uint64_t v = 0;
  const auto* last = text.data() + text.size();
  if (auto [ptr, ec] = std::from_chars(text.data(), last, v); ec == std::errc() && ptr == last && !text.empty()) {
    return v;
  }
  // Config files may carry integral values as JSON floats.
  const double x = threshnet::detail::parse_real(text, key);
  if (!(x >= 0.0) || x != std::floor(x) || x > 9007199254740992.0) {
    throw UsageError("--" + std::string(key) + " must be a non-negative integer, got '" + std::string(text) + "'");
  }
  return static_cast<std::uint64_t>(x);
}

inline double parse_finite(std::string_view text, std::string_view key) {
  const double x = threshnet::detail::parse_real(text, key);
  if (!std::isfinite(x)) throw UsageError("--" + std::string(key) + " must be finite");
  return x;
}

inline const std::vector<std::string>& keys() {
  static const std::vector<std::string> k{"dist", "theta", "n",    "R",    "seed",    "motif", "d",
                                          "beta", "lambda", "r",   "mode", "x0",      "Cr",    "table",
                                          "grid", "mc",     "quad_nodes", "out", "samples", "format"};
  return k;
}

inline void apply(RunConfig& cfg, const std::string& key, const std::string& v) {
  if (key == "dist") {
    cfg.dist = v;
  } else if (key == "theta") {
    cfg.theta = parse_finite(v, key);
  } else if (key == "n") {
    cfg.n = parse_count(v, key);
  } else if (key == "R") {
    cfg.R = parse_count(v, key);
  } else if (key == "seed") {
    cfg.seed = parse_count(v, key);
  } else if (key == "motif") {
    cfg.motif = v;
  } else if (key == "d") {
    cfg.d = static_cast<int>(std::min<std::uint64_t>(parse_count(v, key), 1000));
  } else if (key == "beta") {
    cfg.beta = parse_finite(v, key);
  } else if (key == "lambda") {
    cfg.lambda = parse_finite(v, key);
  } else if (key == "r") {
    cfg.r = parse_finite(v, key);
  } else if (key == "mode") {
    cfg.mode = v;
  } else if (key == "x0") {
    cfg.x0 = parse_finite(v, key);
  } else if (key == "Cr") {
    cfg.Cr = parse_finite(v, key);
  } else if (key == "table") {
    cfg.table = v;
  } else if (key == "grid") {
    cfg.grid = parse_count(v, key);
  } else if (key == "mc") {
    cfg.mc = parse_count(v, key);
  } else if (key == "quad_nodes") {
    cfg.quad_nodes = static_cast<std::size_t>(parse_count(v, key));
  } else if (key == "out") {
    cfg.out = v;
  } else if (key == "samples") {
    cfg.samples = v;
  } else if (key == "format") {
    if (v == "csv") {
      cfg.format = Format::csv;
    } else if (v == "json") {
      cfg.format = Format::json;
    } else {
      throw UsageError("--format must be csv or json, got '" + v + "'");
    }
  } else {
    throw UsageError("unknown configuration key '" + key + "'");
  }
}

inline std::string json_scalar(const nlohmann::json& v, const std::string& key) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number()) return v.dump();
  throw UsageError("config key '" + key + "' must be a string or number");
}

}  // namespace detail

/// Validates ranges and per-command required keys. Runs before any output
/// file is opened.
inline void validate(const RunConfig& cfg) {
  const auto& cmds = commands();
  if (std::find(cmds.begin(), cmds.end(), cfg.command) == cmds.end()) {
    throw UsageError("unknown command '" + cfg.command + "'");
  }
  (void)WeightDistribution::parse(cfg.dist);
  if (cfg.quad_nodes < 16) throw UsageError("--quad_nodes must be at least 16");
  const bool simulates = cfg.command != "limits";
  if (simulates && cfg.R == 0) throw UsageError("--R must be at least 1");
  const auto& c = cfg.command;
  if ((c == "degree" || c == "triangles" || c == "motif" || c == "local" || c == "pair") && cfg.n == 0) {
    throw UsageError("--n must be at least 1");
  }
  if (c == "triangles" && cfg.n < 3) throw UsageError("triangles needs --n >= 3");
  if (c == "local" && cfg.n < 3) throw UsageError("local needs --n >= 3");
  if (c == "motif") {
    if (!cfg.motif) throw UsageError("motif needs --motif \"k=..;edges=..\"");
    (void)parse_motif(*cfg.motif);
    if (cfg.mc == 0) throw UsageError("--mc must be at least 1");
  }
  if (c == "limits") {
    static const std::vector<std::string> tables{"degree-pmf", "limit-degree-cdf", "h1", "summary"};
    if (std::find(tables.begin(), tables.end(), cfg.table) == tables.end()) {
      throw UsageError("--table must be one of degree-pmf, limit-degree-cdf, h1, summary");
    }
    if (cfg.table == "degree-pmf" && cfg.n == 0) throw UsageError("degree-pmf needs --n >= 1");
  }
  if (c == "spatial" || c == "clt-check") {
    spatial::SpatialConfig sc{cfg.d, cfg.beta, cfg.theta, cfg.lambda, cfg.r};
    try {
      sc.validate();
    } catch (const DomainError& e) {
      throw UsageError(e.what());
    }
    if (cfg.mode != "direct" && cfg.mode != "mixture") throw UsageError("--mode must be direct or mixture");
  }
  if (c == "clt-check") {
    if (!cfg.Cr) throw UsageError("clt-check needs --Cr (the centering value C_r)");
    if (!(*cfg.Cr > 0.0)) throw UsageError("--Cr must be positive");
  }
}

/// Tabular output of the limits command.
struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

inline void write_csv(std::ostream& os, const Table& t) {
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
  os << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << threshnet::detail::format_real(row[i]);
    os << '\n';
  }
}

inline nlohmann::json table_json(const Table& t, const RunConfig& cfg) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : t.rows) {
    nlohmann::json r = nlohmann::json::array();
    for (const double v : row) r.push_back(std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr));
    rows.push_back(std::move(r));
  }
  return {{"table", t.name}, {"config", cfg.to_json()}, {"columns", t.columns}, {"rows", rows}};
}

inline QuadratureOptions quad_options(const RunConfig& cfg) {
  QuadratureOptions q;
  q.nodes = cfg.quad_nodes;
  return q;
}

inline Table limits_table(const RunConfig& cfg) {
  const limits::LimitConfig lc(WeightDistribution::parse(cfg.dist), cfg.theta, quad_options(cfg));
  Table t;
  t.name = cfg.table;
  if (cfg.table == "degree-pmf") {
    t.columns = {"k", "pmf"};
    for (std::uint64_t k = 0; k <= cfg.n; ++k) {
      t.rows.push_back({static_cast<double>(k), limits::degree_pmf_exact(lc, cfg.n, k)});
    }
  } else if (cfg.table == "limit-degree-cdf") {
    const std::uint64_t m = cfg.grid ? cfg.grid : 100;
    t.columns = {"t", "cdf"};
    for (std::uint64_t i = 0; i <= m; ++i) {
      const double x = static_cast<double>(i) / static_cast<double>(m);
      t.rows.push_back({x, limits::limit_degree_cdf(lc, x)});
    }
  } else if (cfg.table == "h1") {
    const std::uint64_t m = cfg.grid ? cfg.grid : 100;
    t.columns = {"u", "x", "h1"};
    for (std::uint64_t i = 0; i < m; ++i) {
      const double u = (static_cast<double>(i) + 0.5) / static_cast<double>(m);
      const double x = lc.dist.quantile(u);
      t.rows.push_back({u, x, limits::h1_of(lc, x)});
    }
  } else {
    // Quantities are indexed by row: alpha_F, F3, zeta1, assumption1, cond_cov, cond_corr.
    t.columns = {"alpha_F", "F3", "zeta1", "assumption1", "cond_cov", "cond_corr"};
    std::vector<double> row{limits::alpha_F(lc), limits::F3(lc), limits::zeta1_exact(lc),
                            check_assumption1(lc.dist, cfg.theta).holds ? 1.0 : 0.0};
    try {
      const auto cc = limits::cond_corr_limit(lc);
      row.push_back(cc.cov);
      row.push_back(cc.corr);
    } catch (const DegenerateConditioningError&) {
      row.push_back(std::nan(""));
      row.push_back(std::nan(""));
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

inline double choose2(double n) { return n * (n - 1.0) / 2.0; }
inline double choose3(double n) { return n * (n - 1.0) * (n - 2.0) / 6.0; }

inline void attach_ks(ReplicateReport& rep, const std::string& name, const auto& cdf) {
  const double d = stats::ks_statistic(rep.samples, cdf);
  rep.gof = GofResult{name, d, stats::ks_pvalue(rep.samples.size(), d)};
}

/// Runs a simulating command in-process. Output bytes depend only on cfg.
inline ReplicateReport build_report(const RunConfig& cfg) {
  validate(cfg);
  const auto dist = WeightDistribution::parse(cfg.dist);
  const auto quad = quad_options(cfg);
  const double theta = cfg.theta;
  const std::size_t n = static_cast<std::size_t>(cfg.n);
  const double nn = static_cast<double>(n);
  const limits::LimitConfig lc(dist, theta, quad);
  Experiment exp;
  exp.name = cfg.command;
  exp.config = cfg.to_json();
  nlohmann::json extras = nlohmann::json::object();
  const auto& c = cfg.command;

  if (c == "degree") {
    exp.replicate = [&](RandomStream& s, std::uint64_t) {
      const auto g = generate(dist, n, theta, s);
      return static_cast<double>(degree(g, 0)) / nn;
    };
    auto rep = run_replicates(exp, cfg.R, cfg.seed);
    attach_ks(rep, "ks_limit_degree", [&](double t) { return limits::limit_degree_cdf(lc, t); });
    rep.extras = {{"n", n}};
    return rep;
  }

  if (c == "pair") {
    std::vector<double> d2(cfg.R);
    std::vector<char> edge(cfg.R);
    exp.replicate = [&](RandomStream& s, std::uint64_t i) {
      const auto p = pair_degree_experiment(dist, n, theta, s);
      d2[i] = static_cast<double>(p.d2) / nn;
      edge[i] = p.edge ? 1 : 0;
      return static_cast<double>(p.d1) / nn;
    };
    auto rep = run_replicates(exp, cfg.R, cfg.seed);
    std::vector<double> c1;
    std::vector<double> c2;
    for (std::size_t i = 0; i < rep.samples.size(); ++i) {
      if (edge[i]) {
        c1.push_back(rep.samples[i]);
        c2.push_back(d2[i]);
      }
    }
    extras["n"] = n;
    extras["corr"] = rep.samples.size() >= 2 ? stats::correlation(rep.samples, d2) : 0.0;
    extras["edge_count"] = c1.size();
    extras["cond_corr"] = c1.size() >= 2 ? nlohmann::json(stats::correlation(c1, c2)) : nlohmann::json(nullptr);
    extras["assumption1"] = check_assumption1(dist, theta).holds;
    try {
      extras["cond_corr_limit"] = limits::cond_corr_limit(lc).corr;
    } catch (const DegenerateConditioningError&) {
      extras["cond_corr_limit"] = nullptr;
    }
    rep.extras = extras;
    attach_ks(rep, "ks_limit_degree", [&](double t) { return limits::limit_degree_cdf(lc, t); });
    return rep;
  }

  if (c == "triangles") {
    std::vector<double> counts(cfg.R);
    exp.replicate = [&](RandomStream& s, std::uint64_t i) {
      const auto g = generate(dist, n, theta, s);
      counts[i] = static_cast<double>(count_triangles(g));
      return counts[i] / choose3(nn);
    };
    auto rep = run_replicates(exp, cfg.R, cfg.seed);
    const double f3 = limits::F3(lc);
    const double z1 = limits::zeta1_exact(lc);
    extras["n"] = n;
    extras["T_n"] = counts[0];
    extras["T_n/C(n,3)"] = rep.samples[0];
    extras["F3"] = f3;
    extras["zeta1"] = z1;
    rep.extras = extras;
    // A degree-3 U-statistic has asymptotic variance 9 zeta_1 / n.
    extras["clt_sd"] = 3.0 * std::sqrt(z1);
    rep.extras = extras;
    if (cfg.R >= 2 && z1 > 0.0) {
      const double scale = std::sqrt(nn) / (3.0 * std::sqrt(z1));
      std::vector<double> z(rep.samples.size());
      for (std::size_t i = 0; i < z.size(); ++i) z[i] = (rep.samples[i] - f3) * scale;
      const double d = stats::ks_statistic(z, stats::normal_cdf);
      rep.gof = GofResult{"ks_normal_standardized", d, stats::ks_pvalue(z.size(), d)};
    }
    return rep;
  }

  if (c == "motif") {
    const auto motif = parse_motif(*cfg.motif);
    const double scale = std::pow(nn, static_cast<double>(motif.k()));
    std::vector<double> counts(cfg.R);
    exp.replicate = [&](RandomStream& s, std::uint64_t i) {
      const auto g = generate(dist, n, theta, s);
      counts[i] = static_cast<double>(count_motifs(g, motif));
      return counts[i] / scale;
    };
    auto rep = run_replicates(exp, cfg.R, cfg.seed);
    // A stream past the replicate range keeps the estimate independent of them.
    auto mc_stream = RandomStream::for_replicate(cfg.seed, cfg.R);
    const auto est = motif_density(dist, motif, theta, cfg.mc, mc_stream);
    extras["n"] = n;
    extras["motif"] = motif.to_string();
    extras["symmetry_count"] = motif.symmetry_count();
    extras["T_n"] = counts[0];
    extras["occurrences"] = counts[0] / static_cast<double>(motif.symmetry_count());
    extras["F_hat"] = est.value;
    extras["F_hat_stderr"] = est.std_error;
    rep.extras = extras;
    return rep;
  }

  if (c == "local") {
    exp.replicate = [&](RandomStream& s, std::uint64_t) {
      const auto g = generate(dist, n, theta, s);
      return static_cast<double>(count_local_triangles(g, 0)) / choose2(nn);
    };
    auto rep = run_replicates(exp, cfg.R, cfg.seed);
    const limits::H1Law law(lc, cfg.grid ? cfg.grid : 2000);
    attach_ks(rep, "ks_h1_law", [&](double t) { return law.cdf(t); });
    rep.extras = {{"n", n}};
    return rep;
  }

  const spatial::SpatialConfig sc{cfg.d, cfg.beta, theta, cfg.lambda, cfg.r};
  const double scale = cfg.lambda * spatial::c_d(cfg.d);

  if (c == "spatial") {
    const bool direct = cfg.mode == "direct";
    exp.replicate = [&](RandomStream& s, std::uint64_t) {
      return static_cast<double>(direct ? spatial::sample_delta_direct(sc, dist, cfg.x0, s)
                                        : spatial::sample_delta_mixture(sc, dist, cfg.x0, s, quad));
    };
    auto rep = run_replicates(exp, cfg.R, cfg.seed);
    std::function<double(std::uint64_t)> pmf;
    if (cfg.x0) {
      const double mean = spatial::lambda_r(sc, dist, *cfg.x0, quad);
      extras["expected_mean"] = mean;
      pmf = [mean](std::uint64_t k) { return stats::poisson_pmf(mean, k); };
    } else {
      QuadratureOptions outer = quad;
      outer.abs_tol = std::max(outer.abs_tol, 1e-11);
      outer.rel_tol = std::max(outer.rel_tol, 1e-11);
      extras["expected_mean"] =
          scale * integrate_dF(dist, [&](double x) { return spatial::C_r_of_x(sc, dist, x, cfg.r, quad); }, outer);
      if (spatial::finite_limit_regime(sc, dist)) {
        extras["limit_mean"] =
            scale * integrate_dF(dist, [&](double x) { return spatial::C_limit(sc, dist, x, quad); }, outer);
      }
      pmf = [&](std::uint64_t k) { return spatial::mixture_pmf(sc, dist, k, cfg.r, quad); };
    }
    try {
      const auto chi = stats::count_gof(rep.samples, pmf);
      rep.gof = GofResult{"chi_square_poisson", chi.statistic, chi.p_value};
    } catch (const DomainError&) {
      rep.gof.reset();  // too few observations for a valid chi-square
    }
    rep.extras = extras;
    return rep;
  }

  // clt-check
  const double centering = *cfg.Cr;
  exp.replicate = [&](RandomStream& s, std::uint64_t) {
    return spatial::clt_standardized_sample(sc, dist, centering, s, quad);
  };
  auto rep = run_replicates(exp, cfg.R, cfg.seed);
  attach_ks(rep, "ks_normal", stats::normal_cdf);
  rep.extras = {{"centering", centering}, {"poisson_mean", scale * centering}};
  return rep;
}

inline void write_report_csv(std::ostream& os, const ReplicateReport& rep) {
  using threshnet::detail::format_real;
  os << "key,value\n";
  os << "experiment," << rep.experiment << '\n';
  os << "seed," << rep.seed << '\n';
  os << "R," << rep.replicates << '\n';
  os << "mean," << format_real(rep.mean) << '\n';
  os << "variance," << format_real(rep.variance) << '\n';
  os << "stderr," << format_real(rep.std_error) << '\n';
  if (rep.gof) {
    os << "gof," << rep.gof->name << '\n';
    os << "gof_stat," << format_real(rep.gof->statistic) << '\n';
    os << "gof_pvalue," << format_real(rep.gof->p_value) << '\n';
  }
  for (const auto& [k, v] : rep.extras.items()) {
    os << k << ',';
    if (v.is_number_float()) {
      os << format_real(v.get<double>());
    } else if (v.is_string()) {
      os << v.get<std::string>();
    } else {
      os << v.dump();
    }
    os << '\n';
  }
}

/// Sample ECDF as plot-ready points (value, fraction <= value).
inline void write_ecdf_csv(std::ostream& os, std::vector<double> samples) {
  std::sort(samples.begin(), samples.end());
  os << "value,ecdf\n";
  const double n = static_cast<double>(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (i + 1 < samples.size() && samples[i + 1] == samples[i]) continue;
    os << threshnet::detail::format_real(samples[i]) << ',' << threshnet::detail::format_real((i + 1.0) / n)
       << '\n';
  }
}

inline void write_samples_csv(std::ostream& os, const std::vector<double>& samples) {
  os << "replicate,value\n";
  for (std::size_t i = 0; i < samples.size(); ++i) os << i << ',' << threshnet::detail::format_real(samples[i]) << '\n';
}

/// Writes through a temporary sibling and renames, so a failed run never
/// leaves a truncated file behind.
inline void write_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw UsageError("cannot open '" + path + "' for writing");
    f << content;
    if (!f.flush()) throw UsageError("write to '" + path + "' failed");
  }
  std::filesystem::rename(tmp, path);
}

/// Runs cfg and writes its artifacts: the report (or table) to cfg.out or
/// `out`, plus an ECDF table next to a report file.
inline void dispatch(const RunConfig& cfg, std::ostream& out) {
  validate(cfg);
  std::map<std::string, std::string> files;
  std::string main;
  if (cfg.command == "limits") {
    const auto table = limits_table(cfg);
    std::ostringstream os;
    if (cfg.output_format() == Format::json) {
      os << table_json(table, cfg).dump(2) << '\n';
    } else {
      write_csv(os, table);
    }
    main = os.str();
  } else {
    auto rep = build_report(cfg);
    if (cfg.samples) {
      std::ostringstream os;
      write_samples_csv(os, rep.samples);
      files[*cfg.samples] = os.str();
      rep.samples_path = *cfg.samples;
    }
    if (cfg.out) {
      std::ostringstream os;
      write_ecdf_csv(os, rep.samples);
      files[*cfg.out + ".ecdf.csv"] = os.str();
    }
    std::ostringstream os;
    if (cfg.output_format() == Format::json) {
      os << to_json(rep).dump(2) << '\n';
    } else {
      write_report_csv(os, rep);
    }
    main = os.str();
  }
  for (const auto& [path, content] : files) write_atomic(path, content);
  if (cfg.out) {
    write_atomic(*cfg.out, main);
  } else {
    out << main;
  }
}

/// Parses argv into a RunConfig. Keys from --config fill in anything the
/// flags leave unset.
inline RunConfig parse_args(int argc, const char* const* argv) {
  CLI::App app{"threshnet: simulate and check limits of threshold random graphs"};
  app.require_subcommand(0, 1);
  std::map<std::string, std::string> flags;
  std::string config_path;
  std::vector<CLI::Option*> options;

  auto add_common = [&](CLI::App* a) {
    a->add_option("--config", config_path, "flat JSON object of configuration keys");
    for (const auto& key : detail::keys()) options.push_back(a->add_option("--" + key, flags[key]));
  };
  add_common(&app);
  std::vector<CLI::App*> subs;
  for (const auto& name : commands()) {
    auto* sub = app.add_subcommand(name);
    add_common(sub);
    subs.push_back(sub);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    throw;
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  RunConfig cfg;
  for (auto* sub : subs) {
    if (sub->parsed()) cfg.command = sub->get_name();
  }
  std::map<std::string, bool> given;
  for (auto* opt : options) {
    if (opt->count() > 0) given[opt->get_name().substr(2)] = true;
  }
  if (!config_path.empty()) {
    std::ifstream f(config_path);
    if (!f) throw UsageError("cannot read config file '" + config_path + "'");
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(f);
    } catch (const nlohmann::json::parse_error& e) {
      throw UsageError("config file is not valid JSON: " + std::string(e.what()));
    }
    if (!j.is_object()) throw UsageError("config file must hold a JSON object");
    for (const auto& [key, v] : j.items()) {
      if (key == "command") {
        if (cfg.command.empty()) cfg.command = detail::json_scalar(v, key);
        continue;
      }
      if (!given.contains(key)) detail::apply(cfg, key, detail::json_scalar(v, key));
    }
  }
  for (const auto& [key, _] : given) detail::apply(cfg, key, flags[key]);
  if (cfg.command.empty()) throw UsageError("no command given; expected one of degree, pair, triangles, motif, "
                                            "local, limits, spatial, clt-check");
  return cfg;
}

/// Exit codes: 0 success, 1 usage or domain error, 2 numeric or capacity error.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  try {
    dispatch(parse_args(argc, argv), out);
    return 0;
  } catch (const CLI::CallForHelp&) {
    out << "usage: threshnet <degree|pair|triangles|motif|local|limits|spatial|clt-check> [--key value ...]\n"
        << "keys:";
    for (const auto& k : detail::keys()) out << " --" << k;
    out << " --config\n";
    return 0;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return 1;
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << '\n';
    return 1;
  } catch (const CapacityError& e) {
    err << "capacity error: " << e.what() << '\n';
    return 2;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace threshnet::cli
