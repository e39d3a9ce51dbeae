// Copyright 2026 The mudiv Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Experiment runner: flat key = value configs, one CSV per curve, and a
// plain-text summary of the headline numbers.

#pragma once

#include <algorithm>
#include <array>
#include <cerrno>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "mudiv/channel.hpp"
#include "mudiv/dedicated.hpp"
#include "mudiv/errors.hpp"
#include "mudiv/mc.hpp"
#include "mudiv/muvdiv.hpp"
#include "mudiv/snrfb.hpp"
#include "mudiv/specfun.hpp"

namespace mudiv::cli {

enum class Experiment {
  fig_sched_snr,
  fig_rd_vs_ru,
  fig_kop_fdd,
  fig_kop_vs_snr,
  fig_rates_fdd,
  fig_se_and_rd,
  fig_kop_tdd,
  fig_rates_tdd,
  fig_kop_multiantenna,
};

struct ExperimentInfo {
  Experiment id;
  std::string_view name;
  std::string_view description;
};

inline constexpr std::array<ExperimentInfo, 9> kExperiments{{
    {Experiment::fig_sched_snr, "fig_sched_snr",
     "Average scheduled SNR in dB scale plotted against the number of feedback users."},
    {Experiment::fig_rd_vs_ru, "fig_rd_vs_ru", "A plot of the downlink rate against the uplink rate in a FDD system."},
    {Experiment::fig_kop_fdd, "fig_kop_fdd",
     "Optimal number of feedback users against the blocklength in a FDD system for the 2 SNR feedback methods."},
    {Experiment::fig_kop_vs_snr, "fig_kop_vs_snr",
     "K_ap^df in both the FDD and TDD systems plotted against the average SNR."},
    {Experiment::fig_rates_fdd, "fig_rates_fdd",
     "Weighted sum rates of both the feedback methods against the number of feedback users in a FDD system."},
    {Experiment::fig_se_and_rd, "fig_se_and_rd",
     "Spectral efficiency and downlink rate plotted against the number of feedback users in a TDD system."},
    {Experiment::fig_kop_tdd, "fig_kop_tdd",
     "Optimal number of feedback users against the blocklength in a TDD system for the 2 SNR feedback methods."},
    {Experiment::fig_rates_tdd, "fig_rates_tdd",
     "Downlink rates of both the feedback methods against the number of feedback users in a TDD system."},
    {Experiment::fig_kop_multiantenna, "fig_kop_multiantenna",
     "Optimal number of feedback users against the spatial dimension in a broadcast channel using single user "
     "multiantenna techniques and dedicated feedback."},
}};

inline std::string_view to_string(Experiment e) { return kExperiments[static_cast<std::size_t>(e)].name; }

inline std::optional<Experiment> parse_experiment(std::string_view name) {
  for (const auto& info : kExperiments)
    if (info.name == name) return info.id;
  return std::nullopt;
}

/// Config problem: `line()` is set for syntax errors, `key()` for bad values.
class ConfigError : public DomainError {
 public:
  ConfigError(const std::string& what, std::size_t line, std::string key)
      : DomainError(what), line_(line), key_(std::move(key)) {}
  std::size_t line() const { return line_; }
  const std::string& key() const { return key_; }

 private:
  std::size_t line_;
  std::string key_;
};

struct ExperimentSpec {
  Experiment name = Experiment::fig_sched_snr;
  SystemParams params;                // p and t_check are overwritten per grid point
  std::vector<double> snr_db;         // empty: the experiment's own sweep
  std::vector<std::uint64_t> blocklength;
  McConfig mc{2000, 1, 0.997, 1};
  std::filesystem::path output_dir = "mudiv_out";
  SumRateVariant sumrate_variant = SumRateVariant::Joint;
};

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

inline double to_real(const std::string& key, const std::string& v, std::size_t line) {
  char* end = nullptr;
  errno = 0;
  const double x = std::strtod(v.c_str(), &end);
  if (v.empty() || *end != '\0' || errno == ERANGE || !std::isfinite(x))
    throw ConfigError("invalid number for '" + key + "': " + v, line, key);
  return x;
}

inline std::uint64_t to_count(const std::string& key, const std::string& v, std::size_t line, std::uint64_t min) {
  if (v.empty() || v.find_first_not_of("0123456789") != std::string::npos)
    throw ConfigError("invalid integer for '" + key + "': " + v, line, key);
  errno = 0;
  const auto x = std::strtoull(v.c_str(), nullptr, 10);
  if (errno == ERANGE) throw ConfigError("integer out of range for '" + key + "'", line, key);
  if (x < min) throw ConfigError("'" + key + "' must be >= " + std::to_string(min), line, key);
  return x;
}

}  // namespace detail

/// Sets one key on `spec`; `line` is reported in errors (0 for command-line options).
inline void apply_option(ExperimentSpec& spec, const std::string& key, const std::string& value, std::size_t line = 0) {
  using namespace detail;
  if (key == "experiment") {
    const auto e = parse_experiment(value);
    if (!e) throw ConfigError("unknown experiment: " + value, line, key);
    spec.name = *e;
  } else if (key == "snr_db") {
    spec.snr_db.clear();
    for (const auto& item : split_list(value)) spec.snr_db.push_back(to_real(key, item, line));
  } else if (key == "blocklength") {
    spec.blocklength.clear();
    for (const auto& item : split_list(value)) spec.blocklength.push_back(to_count(key, item, line, 1));
  } else if (key == "l_fb") {
    spec.params.l_fb = to_count(key, value, line, 1);
  } else if (key == "lambda_r") {
    const double x = to_real(key, value, line);
    if (x < 0) throw ConfigError("'lambda_r' must be >= 0", line, key);
    spec.params.lambda_r = x;
  } else if (key == "k_total") {
    spec.params.k_total = to_count(key, value, line, 1);
  } else if (key == "trials") {
    spec.mc.trials = to_count(key, value, line, 1);
  } else if (key == "seed") {
    spec.mc.seed = to_count(key, value, line, 0);
  } else if (key == "workers") {
    spec.mc.workers = static_cast<unsigned>(to_count(key, value, line, 1));
  } else if (key == "output_dir") {
    if (value.empty()) throw ConfigError("'output_dir' must not be empty", line, key);
    spec.output_dir = value;
  } else if (key == "sumrate_variant") {
    if (value == "joint")
      spec.sumrate_variant = SumRateVariant::Joint;
    else if (value == "uplink_unconditional")
      spec.sumrate_variant = SumRateVariant::UplinkUnconditional;
    else
      throw ConfigError("unknown sumrate_variant: " + value, line, key);
  } else {
    throw ConfigError("unknown key: " + key, line, key);
  }
}

/// Parses flat `key = value` text with `#` comments into a spec; unset keys
/// keep their defaults.
inline ExperimentSpec validate_config(std::string_view raw) {
  ExperimentSpec spec;
  std::stringstream in{std::string(raw)};
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (const auto hash = text.find('#'); hash != std::string::npos) text.erase(hash);
    const std::string body = detail::trim(text);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line) + ": expected key = value", line, "");
    const std::string key = detail::trim(body.substr(0, eq));
    if (key.empty()) throw ConfigError("line " + std::to_string(line) + ": missing key", line, "");
    try {
      apply_option(spec, key, detail::trim(body.substr(eq + 1)), line);
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(line) + ": " + e.what(), line, key);
    }
  }
  return spec;
}

inline ExperimentSpec load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot read config file: " + file.string(), 0, "");
  std::stringstream ss;
  ss << in.rdbuf();
  return validate_config(ss.str());
}

/// MUDIV_WORKERS, when set to a positive integer, replaces the worker hint.
inline void apply_environment(ExperimentSpec& spec) {
  if (const char* w = std::getenv("MUDIV_WORKERS"); w && *w)
    spec.mc.workers = static_cast<unsigned>(detail::to_count("MUDIV_WORKERS", w, 0, 1));
}

struct RunResult {
  std::vector<std::filesystem::path> csv_files;
  std::filesystem::path summary_file;
  std::string summary;
};

namespace detail {

inline std::string num(double x) {
  if (!std::isfinite(x)) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

inline std::string num(std::uint64_t x) { return std::to_string(x); }

inline std::string db_tag(double db) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", db);
  std::string s = buf;
  for (auto& c : s)
    if (c == '-') c = 'm';
  return s;
}

class Csv {
 public:
  Csv(const std::filesystem::path& path, std::vector<std::string> header) : out_(path, std::ios::binary) {
    if (!out_) throw ResourceError("cannot write " + path.string());
    row(header);
  }
  void row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) out_ << (i ? "," : "") << fields[i];
    out_ << "\n";
  }

 private:
  std::ofstream out_;
};

class Runner {
 public:
  explicit Runner(const ExperimentSpec& spec)
      : spec_(spec), dir_(spec.output_dir / std::string(to_string(spec.name))) {
    std::filesystem::create_directories(dir_);
  }

  RunResult run() {
    switch (spec_.name) {
      case Experiment::fig_sched_snr: sched_snr(); break;
      case Experiment::fig_rd_vs_ru: rd_vs_ru(); break;
      case Experiment::fig_kop_fdd: kop(Duplex::FDD); break;
      case Experiment::fig_kop_vs_snr: kop_vs_snr(); break;
      case Experiment::fig_rates_fdd: rates(Duplex::FDD); break;
      case Experiment::fig_se_and_rd: se_and_rd(); break;
      case Experiment::fig_kop_tdd: kop(Duplex::TDD); break;
      case Experiment::fig_rates_tdd: rates(Duplex::TDD); break;
      case Experiment::fig_kop_multiantenna: multiantenna(); break;
    }
    result_.summary_file = dir_ / "summary.txt";
    std::ofstream out(result_.summary_file, std::ios::binary);
    if (!out) throw ResourceError("cannot write " + result_.summary_file.string());
    out << summary_.str();
    result_.summary = summary_.str();
    return result_;
  }

 private:
  std::vector<double> snrs(std::vector<double> fallback) const { return spec_.snr_db.empty() ? fallback : spec_.snr_db; }
  std::vector<std::uint64_t> blocks(std::vector<std::uint64_t> fallback) const {
    return spec_.blocklength.empty() ? fallback : spec_.blocklength;
  }

  SystemParams at(double db, std::uint64_t t) const {
    SystemParams p = spec_.params;
    p.p = db_to_linear(db);
    p.t_check = t;
    p.validate();
    return p;
  }

  SdfOptions sdf_options() const {
    SdfOptions o;
    o.variant = spec_.sumrate_variant;
    return o;
  }

  Csv csv(const std::string& file, std::vector<std::string> header) {
    result_.csv_files.push_back(dir_ / file);
    return Csv(dir_ / file, std::move(header));
  }

  void head() {
    summary_ << "experiment = " << to_string(spec_.name) << "\n";
    summary_ << "l_fb = " << spec_.params.l_fb << "\nlambda_r = " << num(spec_.params.lambda_r)
             << "\nk_total = " << spec_.params.k_total << "\ntrials = " << spec_.mc.trials
             << "\nseed = " << spec_.mc.seed << "\n";
  }

  void sched_snr() {
    head();
    const std::uint64_t k_total = spec_.params.k_total;
    auto f = csv("sched_snr.csv", {"k (users)", "mean_snr_db (dB; harmonic)", "mc_mean_snr_db (dB; monte_carlo)",
                                   "mc_std_error (linear; monte_carlo)", "seed"});
    const auto mc = estimate_vector(spec_.mc, k_total, [&](std::uint64_t, Stream& s, std::span<double> out) {
      double best = 0;
      for (std::uint64_t i = 0; i < k_total; ++i) {
        best = std::max(best, s.exponential());
        out[i] = best;
      }
    });
    for (std::uint64_t k = 1; k <= k_total; ++k)
      f.row({num(k), num(10 * std::log10(harmonic(k))), num(10 * std::log10(mc[k - 1].mean)),
             num(mc[k - 1].std_error), num(spec_.mc.seed)});
    summary_ << "mean_snr_db[k=1] = " << num(10 * std::log10(harmonic(1))) << "\n";
    summary_ << "mean_snr_db[k=" << k_total << "] = " << num(10 * std::log10(harmonic(k_total))) << "\n";
  }

  void rd_vs_ru() {
    head();
    for (double db : snrs({10}))
      for (auto t : blocks({100, 300})) {
        const auto p = at(db, t);
        auto f = csv("rd_vs_ru_p" + db_tag(db) + "dB_T" + std::to_string(t) + ".csv",
                     {"k (users)", "r_u (bits/symbol; exact)", "r_d (bits/symbol; quadrature)",
                      "objective (bits/symbol; exact)"});
        const auto curve = fdd_rate_curve(p, SpectralEfficiencyMethod::Quadrature);
        for (const auto& e : curve.entries) f.row({num(e.k), num(e.r_u), num(e.r_d), num(e.objective)});
        const auto opt = fdd_optimize_exact(p);
        summary_ << "k_op_df[T=" << t << ",p_db=" << num(db) << "] = " << opt.k_star << "\n";
      }
  }

  void kop(Duplex duplex) {
    head();
    const std::string tag(to_string(duplex));
    auto f = csv("kop_" + tag + ".csv",
                 {"blocklength (symbols)", "p_db (dB)", "k_op (users; exact_scan)", "k_ap (users; lambert_approx)",
                  "k_ap_continuous (users; lambert_approx)", "k_op_sdf (users; grid_monte_carlo)",
                  "n_op_sdf (slots; grid_monte_carlo)", "seed"});
    for (double db : snrs({0, 10}))
      for (auto t : blocks({100, 150, 200, 250, 300})) {
        const auto p = at(db, t);
        const auto op = duplex == Duplex::FDD ? fdd_optimize_exact(p) : tdd_optimize_exact(p);
        const auto ap = duplex == Duplex::FDD ? fdd_k_ap(p) : tdd_k_ap(p);
        const auto sdf = sdf_optimize(p, duplex, spec_.mc, sdf_options());
        f.row({num(t), num(db), num(op.k_star), num(ap.k_star), num(ap.k_continuous), num(sdf.k_star),
               num(*sdf.n_star), num(spec_.mc.seed)});
        summary_ << "k_op_df[T=" << t << ",p_db=" << num(db) << "] = " << op.k_star << "\n";
        summary_ << "k_ap_df[T=" << t << ",p_db=" << num(db) << "] = " << ap.k_star << "\n";
        summary_ << "k_op_sdf[T=" << t << ",p_db=" << num(db) << "] = " << sdf.k_star << " (n = " << *sdf.n_star
                 << ")\n";
      }
  }

  void kop_vs_snr() {
    head();
    std::vector<double> sweep;
    for (int db = 0; db <= 40; db += 2) sweep.push_back(db);
    auto f = csv("kop_vs_snr.csv",
                 {"blocklength (symbols)", "p_db (dB)", "k_ap_fdd (users; lambert_approx)",
                  "k_ap_fdd_continuous (users; lambert_approx)", "k_ap_tdd (users; lambert_approx)",
                  "k_ap_tdd_continuous (users; lambert_approx)", "k_op_fdd (users; exact_scan)",
                  "k_op_tdd (users; exact_scan)"});
    for (auto t : blocks({100, 300}))
      for (double db : snrs(sweep)) {
        const auto p = at(db, t);
        const auto fa = fdd_k_ap(p);
        const auto ta = tdd_k_ap(p);
        f.row({num(t), num(db), num(fa.k_star), num(fa.k_continuous), num(ta.k_star), num(ta.k_continuous),
               num(fdd_optimize_exact(p).k_star), num(tdd_optimize_exact(p).k_star)});
      }
    summary_ << "sweep = k_ap against p_db in " << result_.csv_files.back().filename().string() << "\n";
  }

  void rates(Duplex duplex) {
    head();
    const std::string tag(to_string(duplex));
    const std::string unit = duplex == Duplex::FDD ? "weighted_sum_rate" : "downlink_rate";
    for (double db : snrs({10}))
      for (auto t : blocks({300})) {
        const auto p = at(db, t);
        auto f = csv("rates_" + tag + "_p" + db_tag(db) + "dB_T" + std::to_string(t) + ".csv",
                     {"k (users)", unit + "_df (bits/symbol; quadrature)",
                      unit + "_sdf (bits/symbol; monte_carlo_best_n)", "n_sdf (slots; grid)", "seed"});
        const std::uint64_t k_max = p.k_max();
        std::map<std::uint64_t, NoSingletonTable> tables;
        for (std::uint64_t k = 1; k <= p.k_total; ++k) {
          double df = std::numeric_limits<double>::quiet_NaN();
          if (k <= k_max)
            df = duplex == Duplex::FDD ? fdd_weighted_objective(p, k, SpectralEfficiencyMethod::Quadrature)
                                       : tdd_downlink_rate(p, k, SpectralEfficiencyMethod::Quadrature);
          double best = std::numeric_limits<double>::quiet_NaN();
          std::uint64_t best_n = 0;
          for (std::uint64_t n = 1; n <= sdf_n_max(p, k); ++n) {
            auto it = tables.find(n);
            if (it == tables.end()) it = tables.emplace(n, NoSingletonTable(n, p.k_total)).first;
            const double v = sdf_rates(p, duplex, k, n, spec_.mc, it->second, sdf_options()).objective;
            if (best_n == 0 || v > best) {
              best = v;
              best_n = n;
            }
          }
          f.row({num(k), num(df), num(best), best_n ? num(best_n) : "", num(spec_.mc.seed)});
        }
        summary_ << "k_op_df[T=" << t << ",p_db=" << num(db) << "] = "
                 << (duplex == Duplex::FDD ? fdd_optimize_exact(p) : tdd_optimize_exact(p)).k_star << "\n";
      }
  }

  void se_and_rd() {
    head();
    for (double db : snrs({10}))
      for (auto t : blocks({300})) {
        const auto p = at(db, t);
        auto f = csv("se_and_rd_p" + db_tag(db) + "dB_T" + std::to_string(t) + ".csv",
                     {"k (users)", "spectral_efficiency (bits/symbol; quadrature)",
                      "downlink_rate (bits/symbol; quadrature)"});
        for (std::uint64_t k = 1; k <= p.k_max(); ++k)
          f.row({num(k), num(c_df_quadrature(k, p.p)), num(tdd_downlink_rate(p, k, SpectralEfficiencyMethod::Quadrature))});
        summary_ << "k_op_df[T=" << t << ",p_db=" << num(db) << "] = " << tdd_optimize_exact(p).k_star << "\n";
      }
  }

  void multiantenna() {
    head();
    for (double db : snrs({10}))
      for (auto t : blocks({300})) {
        const auto p = at(db, t);
        auto f = csv("kop_multiantenna_p" + db_tag(db) + "dB_T" + std::to_string(t) + ".csv",
                     {"n (antennas)", "mimo_k_op (users; monte_carlo_scan)", "mimo_k_op_gauss (users; gaussian_max_scan)",
                      "mimo_k_ap (users; lambert_approx)", "simo_k_op (users; monte_carlo_scan)",
                      "simo_k_ap (users; growth_rate_scan)", "seed"});
        for (unsigned n : {1u, 2u, 4u, 8u}) {
          const auto mimo = mimo_optimize(p, n);
          const auto mimo_mc = mimo_optimize_mc(p, n, spec_.mc);
          const auto simo_mc = simo_optimize_mc(p, n, spec_.mc);
          const auto simo = simo_optimize(p, n);
          f.row({num(std::uint64_t{n}), num(mimo_mc.k_star), num(mimo.scan.k_star), num(mimo.closed_form.k_star),
                 num(simo_mc.k_star), num(simo.k_star), num(spec_.mc.seed)});
          summary_ << "mimo_k_op[n=" << n << "] = " << mimo_mc.k_star << "\n";
          summary_ << "simo_k_op[n_r=" << n << "] = " << simo_mc.k_star << "\n";
        }
      }
  }

  const ExperimentSpec& spec_;
  std::filesystem::path dir_;
  RunResult result_;
  std::ostringstream summary_;
};

}  // namespace detail

/// Runs one experiment, writing `<output_dir>/<experiment>/*.csv` and `summary.txt`.
inline RunResult run_experiment(const ExperimentSpec& spec) { return detail::Runner(spec).run(); }

}  // namespace mudiv::cli
