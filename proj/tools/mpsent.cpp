#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mpsent/bnk.hpp"
#include "mpsent/econometrics.hpp"
#include "mpsent/io/csv.hpp"
#include "mpsent/io/text_io.hpp"
#include "mpsent/svar.hpp"
#include "mpsent/synth.hpp"
#include "mpsent/text.hpp"

#ifndef MPSENT_VERSION
#define MPSENT_VERSION "0.0.0"
#endif

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using mpsent::ErrorCode;
using mpsent::fail;
using mpsent::require;
using mpsent::io::format_double;

struct Flags {
  std::string config;
  std::uint64_t seed = 0;
  std::string out;
  int draws = 0;
  int rotations = 0;
  double delta = 0.0;
  int bootstrap = 0;
  int block_len = 0;
  int horizons = 0;
  unsigned threads = 1;
  CLI::App* leaf = nullptr;

  bool given(const std::string& name) const {
    const auto* o = leaf ? leaf->get_option_no_throw(name) : nullptr;
    return o && o->count() > 0;
  }
};

std::string fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

/// One module block of the config. Reads record the effective value; keys
/// outside the allowed list are rejected.
class Params {
 public:
  Params(const json& block, std::string name, std::vector<std::string> allowed)
      : block_(block.is_null() ? json::object() : block), name_(std::move(name)) {
    require(block_.is_object(), ErrorCode::InvalidArgument, "config: '" + name_ + "' must be an object");
    for (const auto& [k, v] : block_.items())
      if (std::find(allowed.begin(), allowed.end(), k) == allowed.end())
        fail(ErrorCode::InvalidArgument, "config: unknown key '" + name_ + "." + k + "'");
  }

  template <class T>
  T get(const std::string& key, T def) {
    T v = def;
    if (block_.contains(key)) {
      try {
        v = block_.at(key).get<T>();
      } catch (const json::exception&) {
        fail(ErrorCode::InvalidArgument, "config: bad value for '" + name_ + "." + key + "'");
      }
    }
    effective_[key] = v;
    return v;
  }

  /// Value from the config unless the flag was given on the command line.
  template <class T>
  T get(const std::string& key, T def, const Flags& flags, const std::string& flag, T flag_value) {
    if (flags.given(flag)) {
      effective_[key] = flag_value;
      return flag_value;
    }
    return get(key, def);
  }

  bool has(const std::string& key) const { return block_.contains(key); }
  const json& raw(const std::string& key) const {
    static const json null;
    return block_.contains(key) ? block_.at(key) : null;
  }
  void record(const std::string& key, json v) { effective_[key] = std::move(v); }
  const std::string& name() const { return name_; }
  const json& effective() const { return effective_; }

 private:
  json block_;
  std::string name_;
  json effective_ = json::object();
};

class Run {
 public:
  Run(std::string command, const Flags& flags) : command_(std::move(command)), flags_(flags) {
    if (!flags.config.empty()) {
      const fs::path p(flags.config);
      const std::string text = mpsent::io::read_file(p.string());
      try {
        config_ = json::parse(text);
      } catch (const json::parse_error& e) {
        fail(ErrorCode::ParseError, "config: " + std::string(e.what()));
      }
      require(config_.is_object(), ErrorCode::InvalidArgument, "config: top level must be an object");
      base_ = p.parent_path();
    }
    static const std::set<std::string> top = {"seed", "out", "threads", "bnk", "svar", "taylor", "lp", "text", "synth"};
    for (const auto& [k, v] : config_.items())
      require(top.count(k) > 0, ErrorCode::InvalidArgument, "config: unknown top-level key '" + k + "'");
    try {
      seed_ = flags.given("--seed") ? flags.seed : config_.value("seed", std::uint64_t{42});
      threads_ = flags.given("--threads") ? flags.threads : config_.value("threads", 1u);
      if (flags.given("--out"))
        out_ = flags.out;
      else if (config_.contains("out"))
        out_ = resolve(config_.at("out").get<std::string>());
      else
        out_ = "out";
    } catch (const json::exception&) {
      fail(ErrorCode::InvalidArgument, "config: seed, threads and out must be an unsigned integer and a string");
    }
    require(threads_ >= 1, ErrorCode::InvalidArgument, "threads must be >= 1");
  }

  std::uint64_t seed() const { return seed_; }
  unsigned threads() const { return threads_; }
  const Flags& flags() const { return flags_; }
  const fs::path& out_dir() const { return out_; }

  Params block(const std::string& name, std::vector<std::string> allowed) const {
    return Params(config_.contains(name) ? config_.at(name) : json(), name, std::move(allowed));
  }

  fs::path resolve(const std::string& p) const {
    const fs::path path(p);
    return path.is_absolute() || base_.empty() ? path : (base_ / path).lexically_normal();
  }

  /// Reads an input file named by a config key and records its hash.
  std::string input(Params& params, const std::string& key) {
    require(params.has(key), ErrorCode::InvalidArgument, "config: '" + params.name() + "." + key + "' is required");
    const std::string rel = params.get<std::string>(key, "");
    const fs::path path = resolve(rel);
    std::string content = mpsent::io::read_file(path.string());
    inputs_.push_back({{"key", params.name() + "." + key}, {"path", rel}, {"fnv1a64", fnv1a64(content)},
                       {"bytes", content.size()}});
    return content;
  }

  void emit(const std::string& name, const std::string& content) {
    fs::create_directories(out_);
    mpsent::io::write_file((out_ / name).string(), content);
    outputs_.push_back(name);
  }

  void emit_json(const std::string& name, const json& j) { emit(name, j.dump(2) + "\n"); }

  void finish(const std::string& module, const json& effective) {
    json m;
    m["command"] = command_;
    m["version"] = MPSENT_VERSION;
    m["seed"] = seed_;
    m["config"] = json::object();
    m["config"][module] = effective;
    m["inputs"] = inputs_;
    std::sort(outputs_.begin(), outputs_.end());
    m["outputs"] = outputs_;
    emit_json("manifest.json", m);
  }

 private:
  std::string command_;
  const Flags& flags_;
  json config_ = json::object();
  fs::path base_;
  fs::path out_ = "out";
  std::uint64_t seed_ = 42;
  unsigned threads_ = 1;
  json inputs_ = json::array();
  std::vector<std::string> outputs_;
};

std::string csv_row(std::initializer_list<std::string> cells) {
  std::string out;
  for (const auto& c : cells) {
    if (!out.empty()) out += ',';
    out += mpsent::io::quote_field(c);
  }
  return out + "\n";
}

// bnk ----------------------------------------------------------------------

mpsent::bnk::Calibration read_calibration(Params& p) {
  mpsent::bnk::Calibration c;
  for (auto [key, field] : std::initializer_list<std::pair<const char*, double mpsent::bnk::Calibration::*>>{
           {"beta", &mpsent::bnk::Calibration::beta},         {"sigma", &mpsent::bnk::Calibration::sigma},
           {"kappa", &mpsent::bnk::Calibration::kappa},       {"rho_r", &mpsent::bnk::Calibration::rho_r},
           {"phi_pi", &mpsent::bnk::Calibration::phi_pi},     {"phi_x", &mpsent::bnk::Calibration::phi_x},
           {"phi_s", &mpsent::bnk::Calibration::phi_s},       {"m_h", &mpsent::bnk::Calibration::m_h},
           {"m_f", &mpsent::bnk::Calibration::m_f},           {"m_s", &mpsent::bnk::Calibration::m_s},
           {"rho_s", &mpsent::bnk::Calibration::rho_s},       {"lambda_x", &mpsent::bnk::Calibration::lambda_x},
           {"lambda_pi", &mpsent::bnk::Calibration::lambda_pi}, {"lambda_a", &mpsent::bnk::Calibration::lambda_a},
           {"theta", &mpsent::bnk::Calibration::theta}})
    c.*field = p.get(key, c.*field);
  c.tau = p.get("tau", c.tau);
  mpsent::bnk::validate(c);
  return c;
}

const std::vector<std::string> kBnkKeys = {"beta", "sigma", "kappa", "rho_r", "phi_pi", "phi_x", "phi_s", "tau",
                                           "m_h", "m_f", "m_s", "rho_s", "lambda_x", "lambda_pi", "lambda_a",
                                           "theta", "shocks", "eps", "horizons", "law", "stack_horizon"};

std::vector<mpsent::bnk::ShockKind> read_shocks(Params& p) {
  std::vector<std::string> names;
  for (auto k : mpsent::bnk::kAllShocks) names.emplace_back(mpsent::bnk::to_string(k));
  names = p.get("shocks", names);
  std::vector<mpsent::bnk::ShockKind> out;
  for (const auto& n : names) out.push_back(mpsent::bnk::parse_shock(n));
  return out;
}

/// Without an explicit eps the policy shocks are easings (-1) and the
/// narrative shock is a positive innovation (+1).
double read_eps(Params& p, mpsent::bnk::ShockKind k) {
  if (p.has("eps")) return p.get("eps", 1.0);
  return k == mpsent::bnk::ShockKind::Narrative ? 1.0 : -1.0;
}

void record_eps(Params& p, const std::vector<mpsent::bnk::ShockKind>& shocks) {
  if (p.has("eps")) return;
  json e = json::object();
  for (auto k : shocks) e[mpsent::bnk::to_string(k)] = read_eps(p, k);
  p.record("eps", e);
}

json impact_json(const mpsent::bnk::ImpactResponse& r) {
  return {{"r0", r.r0}, {"x0", r.x0}, {"pi0", r.pi0}, {"s0", r.s0}, {"er1", r.er1},
          {"ex1", r.ex1}, {"epi1", r.epi1}, {"dominance", r.dominance}};
}

void bnk_solve(Run& run) {
  Params p = run.block("bnk", kBnkKeys);
  const auto c = read_calibration(p);
  const auto shocks = read_shocks(p);
  record_eps(p, shocks);
  json out;
  out["determinate"] = mpsent::bnk::check_determinacy(c);
  const auto m = mpsent::bnk::solve_stable_mode(c);
  out["stable_mode"] = {{"alpha", m.alpha},   {"g1_mode", m.g1_mode}, {"g2_mode", m.g2_mode}, {"beta_g", m.beta_g},
                        {"g1_imp", m.g1_imp}, {"g2_imp", m.g2_imp},   {"residual", m.residual}};
  out["narrative_bracket"] = mpsent::bnk::narrative_bracket(c, m);
  if (c.rho_s == 0.0) {
    json imp = json::object();
    for (auto k : shocks) imp[mpsent::bnk::to_string(k)] = impact_json(mpsent::bnk::impact_responses(c, k, read_eps(p, k)));
    out["impact"] = imp;
  } else {
    out["impact"] = nullptr;  // closed forms assume rho_s = 0
  }
  run.emit_json("solve.json", out);
  run.finish("bnk", p.effective());
}

void bnk_irf(Run& run) {
  Params p = run.block("bnk", kBnkKeys);
  const auto c = read_calibration(p);
  const auto shocks = read_shocks(p);
  record_eps(p, shocks);
  const int horizons = p.get("horizons", std::max(40, c.tau + 10), run.flags(), "--horizons", run.flags().horizons);
  mpsent::bnk::PathOptions opt;
  const std::string law = p.get<std::string>("law", "full");
  if (law == "contemporaneous")
    opt.law = mpsent::bnk::SentimentLaw::Contemporaneous;
  else
    require(law == "full", ErrorCode::InvalidArgument, "bnk.law must be 'full' or 'contemporaneous'");
  opt.stack_horizon = p.get("stack_horizon", 0);

  std::string csv = "shock,variable,horizon,value\n";
  const std::vector<std::pair<const char*, mpsent::bnk::Role>> vars = {
      {"r", mpsent::bnk::Role::R},     {"x", mpsent::bnk::Role::X},     {"pi", mpsent::bnk::Role::Pi},
      {"s", mpsent::bnk::Role::S},     {"e_r", mpsent::bnk::Role::ER},  {"e_x", mpsent::bnk::Role::EX},
      {"e_pi", mpsent::bnk::Role::EPi}};
  for (auto k : shocks) {
    const auto set = mpsent::bnk::solve_path(c, k, read_eps(p, k), horizons, opt);
    for (const auto& [name, role] : vars) {
      const auto& v = set.path(role);
      for (Eigen::Index h = 0; h < v.size(); ++h)
        csv += csv_row({mpsent::bnk::to_string(k), name, std::to_string(h), format_double(v(h))});
    }
  }
  run.emit("irf.csv", csv);
  run.finish("bnk", p.effective());
}

// svar ---------------------------------------------------------------------

struct SvarContext {
  Params params;
  mpsent::svar::IdentifiedSet set;
  int horizons = 20;
};

const char* shock_name(std::size_t k) { return mpsent::bnk::to_string(mpsent::bnk::kAllShocks[k]); }

SvarContext svar_identify(Run& run) {
  Params p = run.block("svar", {"data", "p", "draws", "rotations", "delta", "shrink", "horizons", "standardize",
                                "shock", "weighting"});
  const Flags& f = run.flags();
  auto frame = mpsent::io::parse_frame(run.input(p, "data"));
  const auto cols = p.get("standardize", std::vector<std::string>{});
  if (!cols.empty()) frame = mpsent::standardize(frame, cols);
  mpsent::svar::IdentifyOptions opt;
  opt.p = p.get("p", opt.p);
  opt.draws = p.get("draws", opt.draws, f, "--draws", f.draws);
  opt.rotations = p.get("rotations", opt.rotations, f, "--rotations", f.rotations);
  opt.delta = p.get("delta", opt.delta, f, "--delta", f.delta);
  opt.shrink = p.get("shrink", opt.shrink);
  opt.threads = run.threads();
  const int horizons = p.get("horizons", 20, f, "--horizons", f.horizons);
  require(horizons >= 1, ErrorCode::InvalidArgument, "svar.horizons must be >= 1");
  const auto roles = mpsent::svar::VariableRoleMap::from_names(frame.names());
  auto set = mpsent::svar::identify(frame, roles, opt, run.seed());
  return {std::move(p), std::move(set), horizons};
}

mpsent::svar::Weighting read_weighting(Params& p) {
  const std::string w = p.get<std::string>("weighting", "loose");
  if (w == "uniform") return mpsent::svar::Weighting::Uniform;
  require(w == "loose", ErrorCode::InvalidArgument, "svar.weighting must be 'loose' or 'uniform'");
  return mpsent::svar::Weighting::Loose;
}

json band_json(const mpsent::svar::Band& b) { return {{"median", b.median}, {"lo68", b.lo}, {"hi68", b.hi}}; }

std::string band_cells(const mpsent::svar::Band& b) {
  return format_double(b.median) + "," + format_double(b.lo) + "," + format_double(b.hi);
}

json diagnostics_json(const mpsent::svar::IdentifiedSet& set, int horizons) {
  const auto d = mpsent::svar::shock_diagnostics(set);
  const auto rob = mpsent::svar::delta_robustness(set, horizons);
  json j;
  j["accepted"] = d.accepted;
  j["rotations_tried"] = set.rotations_tried;
  j["acceptance_rate"] = d.acceptance_rate;
  j["ess"] = json::object();
  for (std::size_t k = 0; k < 3; ++k) j["ess"][shock_name(k)] = d.ess[k];
  constexpr std::array<std::pair<std::size_t, std::size_t>, 3> pairs{{{0, 1}, {0, 2}, {1, 2}}};
  j["correlation"] = json::object();
  for (std::size_t q = 0; q < 3; ++q)
    j["correlation"][std::string(shock_name(pairs[q].first)) + "/" + shock_name(pairs[q].second)] =
        band_json(d.pair_correlation[q]);
  j["autocorrelation"] = json::object();
  for (std::size_t k = 0; k < 3; ++k) j["autocorrelation"][shock_name(k)] = band_json(d.autocorrelation[k]);
  j["delta_robustness"] = {{"max_median_gap", rob.max_median_gap},
                           {"mean_band_width_weighted", rob.mean_band_width_weighted},
                           {"mean_band_width_uniform", rob.mean_band_width_uniform}};
  return j;
}

std::string shocks_csv(const mpsent::svar::IdentifiedSet& set) {
  const auto hd = mpsent::svar::historical_decomposition(set);
  std::string csv = "date,shock,median,lo68,hi68\n";
  for (std::size_t k = 0; k < 3; ++k)
    for (std::size_t t = 0; t < hd.dates.size(); ++t)
      csv += mpsent::format_date(hd.dates[t]) + "," + shock_name(k) + "," + band_cells(hd.shocks[k][t]) + "\n";
  return csv;
}

void svar_identify_cmd(Run& run) {
  auto ctx = svar_identify(run);
  const auto w = read_weighting(ctx.params);
  const auto s = mpsent::svar::irf(ctx.set, ctx.horizons, w);
  std::string csv = "shock,variable,horizon,median,lo68,hi68\n";
  for (std::size_t k = 0; k < 3; ++k)
    for (std::size_t v = 0; v < s.cells[k].size(); ++v)
      for (std::size_t h = 0; h < s.cells[k][v].size(); ++h)
        csv += std::string(shock_name(k)) + "," + mpsent::io::quote_field(ctx.set.names[v]) + "," +
               std::to_string(h) + "," + band_cells(s.cells[k][v][h]) + "\n";
  run.emit("irf.csv", csv);
  run.emit("shocks.csv", shocks_csv(ctx.set));
  run.emit_json("diagnostics.json", diagnostics_json(ctx.set, ctx.horizons));
  run.finish("svar", ctx.params.effective());
}

void svar_fevd_cmd(Run& run) {
  auto ctx = svar_identify(run);
  const auto f = mpsent::svar::fevd(ctx.set, ctx.horizons);
  std::string csv = "shock,variable,horizon,median,lo68,hi68\n";
  for (std::size_t k = 0; k < 3; ++k)
    for (std::size_t v = 0; v < f.shares[k].size(); ++v)
      for (std::size_t h = 0; h < f.shares[k][v].size(); ++h)
        csv += std::string(shock_name(k)) + "," + mpsent::io::quote_field(ctx.set.names[v]) + "," +
               std::to_string(h + 1) + "," + band_cells(f.shares[k][v][h]) + "\n";
  run.emit("fevd.csv", csv);
  run.finish("svar", ctx.params.effective());
}

void svar_hd_cmd(Run& run) {
  auto ctx = svar_identify(run);
  const auto hd = mpsent::svar::historical_decomposition(ctx.set);
  std::string csv = "date,component,variable,median,lo68,hi68\n";
  for (std::size_t t = 0; t < hd.dates.size(); ++t) {
    const std::string date = mpsent::format_date(hd.dates[t]);
    for (std::size_t v = 0; v < ctx.set.names.size(); ++v) {
      const std::string var = mpsent::io::quote_field(ctx.set.names[v]);
      for (std::size_t k = 0; k < 3; ++k)
        csv += date + "," + shock_name(k) + "," + var + "," + band_cells(hd.contributions[k][v][t]) + "\n";
      csv += date + ",remainder," + var + "," + format_double(hd.remainder[v][t]) + ",,\n";
    }
  }
  run.emit("hd.csv", csv);
  run.emit("shocks.csv", shocks_csv(ctx.set));
  run.finish("svar", ctx.params.effective());
}

void svar_counterfactual_cmd(Run& run) {
  auto ctx = svar_identify(run);
  const auto shock = mpsent::bnk::parse_shock(ctx.params.get<std::string>("shock", "anticipated"));
  const auto cf = mpsent::svar::counterfactual_irf(ctx.set, ctx.set.roles, shock, ctx.horizons);
  std::string csv = "shock,scenario,variable,horizon,median,lo68,hi68\n";
  for (const auto& [scenario, cells] : {std::pair{"baseline", &cf.baseline}, std::pair{"counterfactual", &cf.counterfactual}})
    for (std::size_t v = 0; v < cells->size(); ++v)
      for (std::size_t h = 0; h < (*cells)[v].size(); ++h)
        csv += std::string(mpsent::bnk::to_string(shock)) + "," + scenario + "," +
               mpsent::io::quote_field(ctx.set.names[v]) + "," + std::to_string(h) + "," +
               band_cells((*cells)[v][h]) + "\n";
  run.emit("counterfactual.csv", csv);
  run.finish("svar", ctx.params.effective());
}

void svar_diagnostics_cmd(Run& run) {
  auto ctx = svar_identify(run);
  run.emit_json("diagnostics.json", diagnostics_json(ctx.set, ctx.horizons));
  run.finish("svar", ctx.params.effective());
}

// taylor -------------------------------------------------------------------

const std::vector<std::string> kTaylorKeys = {"data", "instruments", "custom", "hac_bandwidth", "bootstrap",
                                              "block_len", "leakage"};

struct TaylorContext {
  Params params;
  mpsent::econ::RegressionData data;
  mpsent::econ::HacOptions hac;
  std::string instruments;
};

TaylorContext taylor_data(Run& run) {
  Params p = run.block("taylor", kTaylorKeys);
  const auto frame = mpsent::io::parse_frame(run.input(p, "data"));
  const std::string set = p.get<std::string>("instruments", "rich");
  const auto kind = mpsent::econ::parse_instrument_set(set);
  std::vector<mpsent::econ::LaggedColumn> custom;
  if (p.has("custom")) {
    try {
      custom = p.raw("custom").get<std::vector<mpsent::econ::LaggedColumn>>();
    } catch (const json::exception&) {
      fail(ErrorCode::InvalidArgument, "config: taylor.custom must be a list of [column, lag] pairs");
    }
    p.record("custom", p.raw("custom"));
  }
  mpsent::econ::HacOptions hac{p.get("hac_bandwidth", 4)};
  auto d = mpsent::econ::taylor_regression(frame, kind, mpsent::econ::TaylorColumns{}, custom);
  return {std::move(p), std::move(d), hac, set};
}

json coef_json(const mpsent::econ::GmmResult& r, bool iid) {
  json a = json::array();
  for (Eigen::Index i = 0; i < r.coef.size(); ++i) {
    json c = {{"name", r.names.at(static_cast<std::size_t>(i))}, {"coef", r.coef(i)}, {"se", r.se(i)}};
    if (iid) c["se_iid"] = r.se_iid(i);
    a.push_back(c);
  }
  return a;
}

mpsent::econ::BootstrapJOptions bootstrap_options(Run& run, Params& p) {
  const Flags& f = run.flags();
  mpsent::econ::BootstrapJOptions o;
  o.resamples = p.get("bootstrap", o.resamples, f, "--bootstrap", f.bootstrap);
  o.block_len = p.get("block_len", o.block_len, f, "--block-len", f.block_len);
  o.threads = run.threads();
  return o;
}

void taylor_ols(Run& run) {
  auto ctx = taylor_data(run);
  mpsent::econ::RegressionData d = ctx.data;
  d.Z.resize(0, 0);
  d.z_names.clear();
  const auto r = mpsent::econ::ols_hac(d, ctx.hac);
  json out;
  out["estimator"] = "ols";
  out["nobs"] = r.nobs;
  out["hac_bandwidth"] = ctx.hac.bandwidth;
  out["coefficients"] = coef_json(r, true);
  run.emit_json("ols.json", out);
  run.finish("taylor", ctx.params.effective());
}

json bootstrap_json(const mpsent::econ::BootstrapJ& b, const mpsent::econ::BootstrapJOptions& o) {
  return {{"resamples", o.resamples}, {"block_len", o.block_len}, {"j_obs", b.j_obs}, {"p_value", b.p_value},
          {"used", b.used},           {"failed", b.failed},       {"unreliable", b.unreliable}};
}

void taylor_gmm(Run& run) {
  auto ctx = taylor_data(run);
  const auto opt = bootstrap_options(run, ctx.params);
  const auto r = mpsent::econ::gmm_two_step(ctx.data, ctx.hac);
  json out;
  out["estimator"] = "gmm2";
  out["instruments"] = ctx.instruments;
  out["instrument_names"] = ctx.data.z_names;
  out["nobs"] = r.nobs;
  out["hac_bandwidth"] = ctx.hac.bandwidth;
  out["coefficients"] = coef_json(r, false);
  out["j"] = r.j;
  out["j_df"] = r.j_df;
  out["first_stage_f"] = mpsent::econ::first_stage_f(ctx.data, ctx.hac);
  out["j_pvalue"] = nullptr;
  if (r.j_df > 0 && opt.resamples > 0) {
    const auto b = mpsent::econ::bootstrap_j(ctx.data, ctx.hac, opt, run.seed());
    out["j_pvalue"] = b.p_value;
    out["bootstrap"] = bootstrap_json(b, opt);
  }
  run.emit_json("gmm.json", out);
  run.finish("taylor", ctx.params.effective());
}

void taylor_bootstrap_j(Run& run) {
  auto ctx = taylor_data(run);
  const auto opt = bootstrap_options(run, ctx.params);
  const auto b = mpsent::econ::bootstrap_j(ctx.data, ctx.hac, opt, run.seed());
  json out = bootstrap_json(b, opt);
  out["instruments"] = ctx.instruments;
  out["j_star"] = b.j_star;
  run.emit_json("bootstrap_j.json", out);
  run.finish("taylor", ctx.params.effective());
}

void taylor_leakage(Run& run) {
  Params p = run.block("taylor", kTaylorKeys);
  Params lp(p.raw("leakage"), "taylor.leakage", {"T", "reps", "ks", "leak", "leak_horizon", "delta", "rho_s", "rho_m",
                                                 "kappa_u", "sd_u", "sd_s", "leak_noise"});
  mpsent::econ::LeakageConfig cfg;
  cfg.dgp = mpsent::synth::leakage_dgp(lp.get("leak", 10.0), lp.get("leak_horizon", 16));
  cfg.dgp.delta = lp.get("delta", cfg.dgp.delta);
  cfg.dgp.rho_s = lp.get("rho_s", cfg.dgp.rho_s);
  cfg.dgp.rho_m = lp.get("rho_m", cfg.dgp.rho_m);
  cfg.dgp.kappa_u = lp.get("kappa_u", cfg.dgp.kappa_u);
  cfg.dgp.sd_u = lp.get("sd_u", cfg.dgp.sd_u);
  cfg.dgp.sd_s = lp.get("sd_s", cfg.dgp.sd_s);
  cfg.dgp.leak_noise = lp.get("leak_noise", cfg.dgp.leak_noise);
  cfg.T = lp.get("T", cfg.T);
  cfg.reps = lp.get("reps", cfg.reps);
  cfg.ks = lp.get("ks", cfg.ks);
  cfg.threads = run.threads();
  const auto table = mpsent::econ::leakage_experiment(cfg, run.seed());
  std::string csv = "instruments,k,mean,mc_se,bias,theta,failed\n";
  for (const auto& r : table.rows)
    csv += r.instruments + "," + std::to_string(r.k) + "," + format_double(r.mean) + "," + format_double(r.mc_se) +
           "," + format_double(r.bias) + "," + format_double(r.theta) + "," + std::to_string(r.failed) + "\n";
  run.emit("leakage.csv", csv);
  p.record("leakage", lp.effective());
  run.finish("taylor", p.effective());
}

// lp -----------------------------------------------------------------------

void lp_run(Run& run) {
  Params p = run.block("lp", {"data", "outcome", "shock", "controls", "horizons", "shock_lags", "control_lags",
                              "hac_bandwidth"});
  const auto frame = mpsent::io::parse_frame(run.input(p, "data"));
  require(p.has("outcome") && p.has("shock"), ErrorCode::InvalidArgument, "config: lp.outcome and lp.shock are required");
  const auto outcome = p.get<std::string>("outcome", "");
  const auto shock = p.get<std::string>("shock", "");
  const auto controls = p.get("controls", std::vector<std::string>{});
  mpsent::econ::LpOptions opt;
  opt.horizons = p.get("horizons", opt.horizons, run.flags(), "--horizons", run.flags().horizons);
  opt.shock_lags = p.get("shock_lags", opt.shock_lags);
  opt.control_lags = p.get("control_lags", opt.control_lags);
  opt.hac.bandwidth = p.get("hac_bandwidth", opt.hac.bandwidth);
  const auto r = mpsent::econ::lp_irf(frame, outcome, shock, controls, opt);
  std::string csv = "horizon,beta,se,lo68,hi68,lo90,hi90,nobs\n";
  for (std::size_t i = 0; i < r.horizon.size(); ++i)
    csv += std::to_string(r.horizon[i]) + "," + format_double(r.beta[i]) + "," + format_double(r.se[i]) + "," +
           format_double(r.lo68[i]) + "," + format_double(r.hi68[i]) + "," + format_double(r.lo90[i]) + "," +
           format_double(r.hi90[i]) + "," + std::to_string(r.nobs[i]) + "\n";
  run.emit("lp.csv", csv);
  run.finish("lp", p.effective());
}

// text ---------------------------------------------------------------------

const std::vector<std::string> kTextKeys = {"corpus", "lexicon", "labels", "sentence_labels", "base_begin", "base_end"};

mpsent::Date read_date(Params& p, const std::string& key, const mpsent::Date& def) {
  const std::string s = p.get<std::string>(key, mpsent::format_date(def));
  const auto d = mpsent::parse_date(s);
  if (!d) fail(ErrorCode::InvalidArgument, "config: text." + key + " is not a date: '" + s + "'");
  return *d;
}

void text_tone(Run& run) {
  Params p = run.block("text", kTextKeys);
  const auto docs = mpsent::io::parse_corpus(run.input(p, "corpus"));
  const auto lex = mpsent::text::parse_lexicon(run.input(p, "lexicon"));
  std::string csv = "period,words,positive,negative,tone\n";
  for (const auto& pt : mpsent::text::tone_series(docs, lex))
    csv += mpsent::format_date(pt.period) + "," + std::to_string(pt.counts.words) + "," +
           std::to_string(pt.counts.positive) + "," + std::to_string(pt.counts.negative) + "," +
           format_double(pt.value) + "\n";
  run.emit("tone.csv", csv);
  if (p.has("sentence_labels")) {
    const auto labels = mpsent::io::parse_sentence_labels(run.input(p, "sentence_labels"));
    std::map<mpsent::Date, std::vector<mpsent::text::SentenceLabel>> by_q;
    for (const auto& [d, l] : labels) by_q[mpsent::text::quarter_of(d)].push_back(l);
    std::string lcsv = "period,sentences,label_tone\n";
    for (const auto& [q, ls] : by_q)
      lcsv += mpsent::format_date(q) + "," + std::to_string(ls.size()) + "," +
              format_double(mpsent::text::label_tone_index(ls)) + "\n";
    run.emit("label_tone.csv", lcsv);
  }
  run.finish("text", p.effective());
}

void text_uncertainty(Run& run) {
  Params p = run.block("text", kTextKeys);
  const auto docs = mpsent::io::parse_corpus(run.input(p, "corpus"));
  const auto lex = mpsent::text::parse_lexicon(run.input(p, "lexicon"));
  require(!docs.empty(), ErrorCode::InvalidArgument, "text: corpus is empty");
  const auto groups = mpsent::text::group_by_quarter(docs);
  const auto begin = read_date(p, "base_begin", groups.begin()->first);
  const auto end = read_date(p, "base_end", groups.rbegin()->first);
  std::string csv = "period,raw,index\n";
  for (const auto& pt : mpsent::text::uncertainty_index(docs, lex, begin, end))
    csv += mpsent::format_date(pt.period) + "," + format_double(pt.raw) + "," + format_double(pt.index) + "\n";
  run.emit("uncertainty.csv", csv);
  run.finish("text", p.effective());
}

void text_alpha(Run& run) {
  Params p = run.block("text", kTextKeys);
  const auto labels = mpsent::io::parse_labels(run.input(p, "labels"));
  json out;
  out["alpha"] = mpsent::text::krippendorff_alpha(labels);
  out["units"] = labels.size();
  out["coders"] = labels.empty() ? 0 : labels.front().size();
  run.emit_json("alpha.json", out);
  run.finish("text", p.effective());
}

// synth --------------------------------------------------------------------

std::string shocks_table(const std::vector<mpsent::Date>& dates, const std::vector<std::string>& names,
                         const Eigen::MatrixXd& shocks) {
  return mpsent::io::format_frame(mpsent::TimeSeriesFrame(dates, names, shocks));
}

void synth_var(Run& run) {
  Params p = run.block("synth", {"var", "taylor"});
  Params v(p.raw("var"), "synth.var", {"dgp", "T", "burn_in", "s_to_y", "survey_noise", "attention", "rho",
                                       "loading", "noise"});
  const std::string kind = v.get<std::string>("dgp", "sign");
  mpsent::synth::VarDgp dgp;
  std::vector<std::string> shock_names;
  if (kind == "sign") {
    dgp = mpsent::synth::make_sign_dgp(v.get("s_to_y", 0.30), v.get("survey_noise", 1.0), v.get("attention", 0.6)).dgp;
    shock_names = {"a", "u", "n", "c1", "c2", "c3", "v1", "v2", "v3"};
  } else if (kind == "lp") {
    dgp = mpsent::synth::make_lp_dgp(v.get("rho", 0.7), v.get("loading", 1.0), v.get("noise", 1.0));
    shock_names = {"e", "v"};
  } else {
    fail(ErrorCode::InvalidArgument, "config: synth.var.dgp must be 'sign' or 'lp'");
  }
  const Eigen::Index T = v.get("T", Eigen::Index{200});
  const Eigen::Index burn = v.get("burn_in", Eigen::Index{100});
  const auto s = mpsent::synth::simulate_var(dgp, T, burn, run.seed());
  run.emit("data.csv", mpsent::io::format_frame(s.frame));
  run.emit("shocks.csv", shocks_table(s.frame.dates(), shock_names, s.shocks));
  p.record("var", v.effective());
  run.finish("synth", p.effective());
}

void synth_taylor(Run& run) {
  Params p = run.block("synth", {"var", "taylor"});
  Params t(p.raw("taylor"), "synth.taylor",
           {"preset", "T", "c", "rho", "alpha", "gamma", "beta", "delta", "sd_u", "rho_s", "m_s", "lambda_x",
            "lambda_pi", "psi", "sd_s", "rho_m", "sd_m", "kappa_u", "rstar_mean", "rstar_rho", "sd_rstar", "leak",
            "leak_horizon", "leak_noise", "burn_in"});
  const std::string preset = t.get<std::string>("preset", "default");
  mpsent::synth::TaylorDgp d;
  if (preset == "leakage")
    d = mpsent::synth::leakage_dgp();
  else
    require(preset == "default", ErrorCode::InvalidArgument, "config: synth.taylor.preset must be 'default' or 'leakage'");
  using D = mpsent::synth::TaylorDgp;
  for (auto [key, field] : std::initializer_list<std::pair<const char*, double D::*>>{
           {"c", &D::c},           {"rho", &D::rho},           {"alpha", &D::alpha},
           {"gamma", &D::gamma},   {"beta", &D::beta},         {"delta", &D::delta},
           {"sd_u", &D::sd_u},     {"rho_s", &D::rho_s},       {"m_s", &D::m_s},
           {"lambda_x", &D::lambda_x}, {"lambda_pi", &D::lambda_pi}, {"psi", &D::psi},
           {"sd_s", &D::sd_s},     {"rho_m", &D::rho_m},       {"sd_m", &D::sd_m},
           {"kappa_u", &D::kappa_u}, {"rstar_mean", &D::rstar_mean}, {"rstar_rho", &D::rstar_rho},
           {"sd_rstar", &D::sd_rstar}, {"leak", &D::leak},     {"leak_noise", &D::leak_noise}})
    d.*field = t.get(key, d.*field);
  d.leak_horizon = t.get("leak_horizon", d.leak_horizon);
  d.burn_in = t.get("burn_in", d.burn_in);
  const Eigen::Index T = t.get("T", Eigen::Index{110});
  const auto s = mpsent::synth::simulate_taylor_panel(d, T, run.seed());
  run.emit("data.csv", mpsent::io::format_frame(s.frame));
  run.emit("shocks.csv", shocks_table(s.frame.dates(), {"u", "e"}, s.shocks));
  p.record("taylor", t.effective());
  run.finish("synth", p.effective());
}

// driver -------------------------------------------------------------------

void print_error(const std::string& code, const std::string& message, const std::optional<fs::path>& out) {
  const json rec = {{"error", code}, {"message", message}};
  std::cerr << rec.dump() << "\n";
  if (!out) return;
  std::error_code ec;
  fs::create_directories(*out, ec);
  if (!ec) {
    try {
      mpsent::io::write_file((*out / "error.json").string(), rec.dump(2) + "\n");
    } catch (const std::exception&) {
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monetary policy and sentiment toolkit"};
  app.set_version_flag("--version", MPSENT_VERSION);
  app.require_subcommand(1);
  Flags flags;
  std::map<CLI::App*, std::pair<std::string, std::function<void(Run&)>>> handlers;

  auto leaf = [&](CLI::App* group, const std::string& name, const std::string& help, std::function<void(Run&)> fn) {
    auto* sub = group->add_subcommand(name, help);
    sub->add_option("--config", flags.config, "JSON config file")->check(CLI::ExistingFile);
    sub->add_option("--seed", flags.seed, "64-bit seed");
    sub->add_option("--out", flags.out, "output directory");
    sub->add_option("--draws", flags.draws, "posterior draws")->check(CLI::PositiveNumber);
    sub->add_option("--rotations", flags.rotations, "rotations per draw")->check(CLI::PositiveNumber);
    sub->add_option("--delta", flags.delta, "loose-weight bandwidth")->check(CLI::PositiveNumber);
    sub->add_option("--bootstrap", flags.bootstrap, "bootstrap resamples")->check(CLI::NonNegativeNumber);
    sub->add_option("--block-len", flags.block_len, "bootstrap block length")->check(CLI::PositiveNumber);
    sub->add_option("--horizons", flags.horizons, "response horizons")->check(CLI::NonNegativeNumber);
    sub->add_option("--threads", flags.threads, "worker threads")->check(CLI::PositiveNumber);
    handlers[sub] = {group->get_name() + " " + name, std::move(fn)};
  };

  auto* bnk = app.add_subcommand("bnk", "behavioral New Keynesian model")->require_subcommand(1);
  leaf(bnk, "solve", "stable mode and impact responses", bnk_solve);
  leaf(bnk, "irf", "perfect-foresight impulse responses", bnk_irf);
  auto* svar = app.add_subcommand("svar", "sign-restricted SVAR")->require_subcommand(1);
  leaf(svar, "identify", "identified set, IRF bands and shocks", svar_identify_cmd);
  leaf(svar, "fevd", "variance decomposition", svar_fevd_cmd);
  leaf(svar, "hd", "historical decomposition", svar_hd_cmd);
  leaf(svar, "counterfactual", "responses with the sentiment channel shut", svar_counterfactual_cmd);
  leaf(svar, "diagnostics", "acceptance, ESS and shock correlations", svar_diagnostics_cmd);
  auto* taylor = app.add_subcommand("taylor", "Taylor rule estimation")->require_subcommand(1);
  leaf(taylor, "ols", "OLS with HAC errors", taylor_ols);
  leaf(taylor, "gmm", "two-step GMM", taylor_gmm);
  leaf(taylor, "bootstrap-j", "block wild bootstrap of the J statistic", taylor_bootstrap_j);
  leaf(taylor, "leakage", "look-ahead leakage Monte Carlo", taylor_leakage);
  auto* lp = app.add_subcommand("lp", "local projections")->require_subcommand(1);
  leaf(lp, "run", "impulse responses by local projection", lp_run);
  auto* text = app.add_subcommand("text", "text indices")->require_subcommand(1);
  leaf(text, "tone", "quarterly tone index", text_tone);
  leaf(text, "uncertainty", "quarterly uncertainty index", text_uncertainty);
  leaf(text, "alpha", "Krippendorff's alpha", text_alpha);
  auto* synth = app.add_subcommand("synth", "synthetic data")->require_subcommand(1);
  leaf(synth, "var", "simulate a structural VAR", synth_var);
  leaf(synth, "taylor", "simulate a Taylor-rule panel", synth_taylor);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << app.help();
    print_error("Usage", e.what(), std::nullopt);
    return 2;
  }

  std::optional<fs::path> out;
  try {
    for (auto& [sub, h] : handlers) {
      if (!sub->parsed()) continue;
      flags.leaf = sub;
      Run run(h.first, flags);
      out = run.out_dir();
      h.second(run);
      return 0;
    }
    print_error("Usage", "no subcommand", std::nullopt);
    return 2;
  } catch (const mpsent::Error& e) {
    print_error(mpsent::to_string(e.code()), e.what(), out ? out : (flags.out.empty() ? std::nullopt
                                                                                        : std::optional<fs::path>(flags.out)));
  } catch (const std::exception& e) {
    print_error("Internal", e.what(), out);
  }
  return 1;
}
