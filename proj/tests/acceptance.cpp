// Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any fails.
#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "mpsent/bnk.hpp"
#include "mpsent/econometrics.hpp"
#include "mpsent/io/csv.hpp"
#include "mpsent/svar.hpp"
#include "mpsent/synth.hpp"
#include "mpsent/text.hpp"

namespace fs = std::filesystem;
using namespace mpsent;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

int failures = 0;

void criterion(int id, const char* title, double budget_s, const std::function<Outcome()>& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = fn();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (budget_s > 0.0 && secs > budget_s) {
    o.pass = false;
    o.detail += fmt(" (over the %.0f s budget)", budget_s);
  }
  if (!o.pass) ++failures;
  std::printf("%s %2d  %-34s %7.2fs  %s\n", o.pass ? "PASS" : "FAIL", id, title, secs, o.detail.c_str());
  std::fflush(stdout);
}

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

MeanSe mean_se(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  double m = 0.0;
  for (double x : v) m += x;
  m /= n;
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return {m, std::sqrt(ss / (n - 1.0) / n)};
}

bnk::Calibration cell(double m_h, double phi_s) {
  bnk::Calibration c;
  c.m_h = m_h;
  c.phi_s = phi_s;
  return c;
}

Outcome stable_mode_constants() {
  const auto m = bnk::solve_stable_mode(bnk::Calibration{});
  const bool ok = std::abs(m.alpha - 0.639) <= 0.01 && std::abs(m.beta_g - 0.71) <= 0.01 &&
                  std::abs(m.g1_mode + 2.27) <= 0.02 && std::abs(m.g2_mode + 0.74) <= 0.02 &&
                  std::abs(m.g1_imp + 2.52) <= 0.02 && std::abs(m.g2_imp + 0.82) <= 0.02;
  return {ok, fmt("alpha=%.4f G1=%.3f G2=%.3f beta_g=%.4f g1=%.3f g2=%.3f", m.alpha, m.g1_mode, m.g2_mode, m.beta_g,
                  m.g1_imp, m.g2_imp)};
}

Outcome narrative_shrink() {
  const bnk::Calibration c;
  const double b = bnk::narrative_bracket(c, bnk::solve_stable_mode(c));
  return {std::abs(b - 0.83) <= 0.01, fmt("bracket=%.4f", b)};
}

Outcome sign_table() {
  int checked = 0, bad = 0;
  auto check = [&](bnk::Sign s, double v) {
    ++checked;
    if (!bnk::satisfies(s, v)) ++bad;
  };
  for (double m_h : {0.8, 1.0})
    for (double phi_s : {0.0, 0.5})
      for (bnk::ShockKind k : bnk::kAllShocks) {
        if (phi_s == 0.0 && k == bnk::ShockKind::Narrative) continue;
        const double eps = k == bnk::ShockKind::Narrative ? 1.0 : -1.0;
        const bool rate_restricted = !(phi_s == 0.0 && k == bnk::ShockKind::AnticipatedMP);
        const bnk::SignPattern p = bnk::sign_pattern(k);
        bnk::Calibration simple = cell(m_h, phi_s);
        simple.tau = 1;
        const auto ir = bnk::impact_responses(simple, k, eps);
        if (rate_restricted) check(p[bnk::Role::R], ir.r0);
        check(p[bnk::Role::S], ir.s0);
        check(p[bnk::Role::ER], ir.er1);
        check(p[bnk::Role::EX], ir.ex1);
        check(p[bnk::Role::EPi], ir.epi1);
        const bnk::Calibration c = cell(m_h, phi_s);
        const auto path = bnk::solve_path(c, k, eps, 40);
        const Eigen::Index he = k == bnk::ShockKind::AnticipatedMP ? c.tau - 1 : 0;
        if (rate_restricted) check(p[bnk::Role::R], path.r(0));
        check(p[bnk::Role::S], path.s(0));
        check(p[bnk::Role::ER], path.e_r(he));
        check(p[bnk::Role::EX], path.e_x(he));
        check(p[bnk::Role::EPi], path.e_pi(he));
      }
  const bnk::Calibration c;
  const auto a = bnk::solve_path(c, bnk::ShockKind::AnticipatedMP, -1.0, 40);
  Eigen::Index trough = 0;
  a.r.minCoeff(&trough);
  const bool lean = a.r(0) > 0.0 && trough >= c.tau;
  return {bad == 0 && lean,
          fmt("%d/%d restricted signs hold; anticipated easing r0=%.4f, trough at h=%d", checked - bad, checked, a.r(0),
              static_cast<int>(trough))};
}

Outcome closed_form_agreement() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  bnk::PathOptions opt;
  opt.law = bnk::SentimentLaw::Contemporaneous;
  int points = 0;
  double worst = 0.0;
  while (points < 20) {
    bnk::Calibration c;
    c.tau = 1;
    c.m_h = 0.5 + 0.5 * u(rng);
    c.m_f = 0.5 + 0.5 * u(rng);
    c.kappa = 0.05 + 0.3 * u(rng);
    c.sigma = 0.5 + 1.5 * u(rng);
    c.rho_r = 0.5 + 0.45 * u(rng);
    c.phi_pi = 1.1 + u(rng);
    c.phi_x = 0.5 * u(rng);
    c.phi_s = u(rng);
    if (!bnk::check_determinacy(c)) continue;
    for (bnk::ShockKind k : bnk::kAllShocks) {
      const auto ir = bnk::impact_responses(c, k, 1.0);
      const auto p = bnk::solve_path(c, k, 1.0, 20, opt);
      for (double d : {p.r(0) - ir.r0, p.x(0) - ir.x0, p.pi(0) - ir.pi0, p.s(0) - ir.s0, p.e_r(0) - ir.er1,
                       p.e_x(0) - ir.ex1, p.e_pi(0) - ir.epi1})
        worst = std::max(worst, std::abs(d));
    }
    ++points;
  }
  return {worst <= 1e-8, fmt("20 determinate calibrations, max |path - closed form| = %.2e", worst)};
}

struct SvarRun {
  synth::SignDgp dgp;
  svar::VariableRoleMap roles;
  svar::IdentifiedSet set;
};

const SvarRun& svar_run() {
  static const SvarRun run = [] {
    SvarRun r{synth::make_sign_dgp(), {}, {}};
    const auto sample = synth::simulate_var(r.dgp.dgp, 200, 200, 42);
    r.roles = svar::VariableRoleMap::from_names(sample.frame.names());
    svar::IdentifyOptions opt;
    opt.p = 1;
    opt.draws = 100;
    opt.rotations = 2000;
    r.set = svar::identify(sample.frame, r.roles, opt, 7);
    return r;
  }();
  return run;
}

Outcome svar_recovery() {
  const auto& r = svar_run();
  const auto& set = r.set;
  const auto irf = svar::irf(set, 1);
  int inside = 0, total = 0;
  for (std::size_t k = 0; k < 3; ++k) {
    const auto& pat = set.options.patterns[k];
    for (bnk::Role role : bnk::kAllRoles) {
      if (pat[role] == bnk::Sign::Unrestricted) continue;
      const auto v = *r.roles.index(role);
      const auto& b = irf.cells[k][static_cast<std::size_t>(v)][0];
      const double truth = r.dgp.B(v, static_cast<Eigen::Index>(k));
      ++total;
      if (b.lo <= truth && truth <= b.hi) ++inside;
    }
  }
  const auto fevd = svar::fevd(set, 20);
  const auto hd = svar::historical_decomposition(set);
  const double m = static_cast<double>(set.accepted.size());
  const double min_ess = *std::min_element(set.ess.begin(), set.ess.end());
  const bool ok = !set.accepted.empty() && 3 * inside >= 2 * total && fevd.max_sum_error <= 1e-8 &&
                  hd.max_reconstruction_error <= 1e-8 && min_ess > 0.5 * m;
  return {ok, fmt("accepted=%zu, true impact inside 68%% band %d/%d, FEVD sum err %.1e, HD err %.1e, min ESS %.0f",
                  set.accepted.size(), inside, total, fevd.max_sum_error, hd.max_reconstruction_error, min_ess)};
}

Outcome delta_robustness() {
  const auto d = svar::delta_robustness(svar_run().set, 20);
  return {d.mean_band_width_weighted <= d.mean_band_width_uniform,
          fmt("max median gap %.4f; mean 68%% width weighted %.5f vs uniform %.5f", d.max_median_gap,
              d.mean_band_width_weighted, d.mean_band_width_uniform)};
}

Outcome counterfactual() {
  const auto& r = svar_run();
  const auto cf = svar::counterfactual_irf(r.set, r.roles, bnk::ShockKind::AnticipatedMP, 12);
  const auto y = static_cast<std::size_t>(*r.roles.y);
  double peak_base = 0.0, peak_cf = 0.0;
  for (std::size_t h = 0; h <= 12; ++h) {
    peak_base = std::max(peak_base, std::abs(cf.baseline[y][h].median));
    peak_cf = std::max(peak_cf, std::abs(cf.counterfactual[y][h].median));
  }
  return {cf.max_impact_gap == 0.0 && peak_cf < peak_base,
          fmt("h=0 gap %.1e; peak output response h<=12: baseline %.4f, shut channel %.4f", cf.max_impact_gap,
              peak_base, peak_cf)};
}

Outcome gmm_vs_ols() {
  const synth::TaylorDgp d;
  std::vector<double> ols, gmm;
  for (std::uint64_t rep = 0; rep < 200; ++rep) {
    const auto s = synth::simulate_taylor_panel(d, 110, derive_seed(42, {8, rep}));
    const auto rd = econ::taylor_regression(s.frame, econ::InstrumentSetKind::Rich);
    econ::RegressionData od = rd;
    od.Z.resize(0, 0);
    ols.push_back(econ::ols_hac(od, {4}).coef(5));
    gmm.push_back(econ::gmm_two_step(rd, {4}).coef(5));
  }
  const auto o = mean_se(ols), g = mean_se(gmm);
  const double zo = (o.mean - d.delta) / o.se, zg = (g.mean - d.delta) / g.se;
  return {std::abs(zg) < 2.0 && std::abs(zo) > 4.0,
          fmt("delta=%.2f; GMM mean %.4f (%.2f SE), OLS mean %.4f (%.2f SE)", d.delta, g.mean, zg, o.mean, zo)};
}

Outcome bootstrap_size() {
  const synth::TaylorDgp d;
  int reject = 0, failed = 0;
  for (std::uint64_t rep = 0; rep < 200; ++rep) {
    const auto s = synth::simulate_taylor_panel(d, 110, derive_seed(42, {9, rep}));
    const auto rd = econ::taylor_regression(s.frame, econ::InstrumentSetKind::Rich);
    const auto bj = econ::bootstrap_j(rd, {4}, {199, 4, 1}, derive_seed(42, {99, rep}));
    if (bj.p_value < 0.05) ++reject;
    failed += bj.failed;
  }
  const double rate = reject / 200.0;
  return {rate >= 0.02 && rate <= 0.10, fmt("5%% rejection rate %.3f over 200 reps (B=199), %d failed resamples", rate,
                                            failed)};
}

Outcome leakage() {
  const auto t = econ::leakage_experiment(econ::LeakageConfig{}, 42);
  const auto& m1 = t.at("macro", 1);
  const auto& m4 = t.at("macro", 4);
  const double gap = (std::abs(m1.theta) - std::abs(m4.theta)) * t.delta;
  const double gap_se = std::hypot(m1.mc_se, m4.mc_se);
  bool score_ok = true;
  for (int k : {1, 2, 3, 4}) {
    const auto& s = t.at("score", k);
    score_ok = score_ok && std::abs(s.bias) > 2.0 * s.mc_se;
  }
  const double ratio = std::abs(t.at("score", 4).bias) / std::abs(t.at("score", 1).bias);
  score_ok = score_ok && ratio >= 0.75;
  return {gap > 2.0 * gap_se && score_ok,
          fmt("macro |theta| k=1 %.4f vs k=4 %.4f (gap %.1f SE); score bias k=1 %.4f, k=4 %.4f (ratio %.2f)",
              std::abs(m1.theta), std::abs(m4.theta), gap / gap_se, t.at("score", 1).bias, t.at("score", 4).bias,
              ratio)};
}

Outcome lp_recovery() {
  const double rho = 0.7;
  const auto dgp = synth::make_lp_dgp(rho, 1.0, 1.0);
  int cover = 0, total = 0;
  for (std::uint64_t rep = 0; rep < 100; ++rep) {
    const auto s = synth::simulate_var(dgp, 200, 100, derive_seed(42, {11, rep}));
    econ::LpOptions opt;
    opt.horizons = 8;
    const auto r = econ::lp_irf(s.frame, "y", "e", {"y"}, opt);
    for (int h = 0; h <= 8; ++h) {
      const double truth = std::pow(rho, h);
      ++total;
      if (r.lo90[static_cast<std::size_t>(h)] <= truth && truth <= r.hi90[static_cast<std::size_t>(h)]) ++cover;
    }
  }
  const double rate = static_cast<double>(cover) / total;
  return {rate >= 0.80, fmt("90%% band covers the true response in %.3f of rep x horizon cells (h<=8)", rate)};
}

double alpha_oracle(const text::LabelMatrix& m) {
  std::vector<std::vector<std::string>> units;
  std::vector<std::string> pooled;
  for (const auto& u : m) {
    std::vector<std::string> v;
    for (const auto& l : u)
      if (l) v.push_back(*l);
    if (v.size() >= 2) {
      pooled.insert(pooled.end(), v.begin(), v.end());
      units.push_back(std::move(v));
    }
  }
  const double n = static_cast<double>(pooled.size());
  double d_o = 0.0, d_e = 0.0;
  for (const auto& v : units) {
    double dis = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i)
      for (std::size_t j = 0; j < v.size(); ++j) dis += i != j && v[i] != v[j];
    d_o += dis / static_cast<double>(v.size() - 1);
  }
  for (std::size_t i = 0; i < pooled.size(); ++i)
    for (std::size_t j = 0; j < pooled.size(); ++j) d_e += i != j && pooled[i] != pooled[j];
  return 1.0 - (d_o / n) / (d_e / (n * (n - 1.0)));
}

text::LabelMatrix labels(std::initializer_list<std::initializer_list<const char*>> rows) {
  text::LabelMatrix m;
  for (const auto& r : rows) {
    std::vector<std::optional<std::string>> u;
    for (const char* c : r) u.push_back(c ? std::optional<std::string>(c) : std::nullopt);
    m.push_back(std::move(u));
  }
  return m;
}

Outcome text_formulas() {
  const auto lex = text::parse_lexicon("[positive]\nstrong\nimproved\nrobust\n[negative]\nweak\n"
                                       "[uncertainty]\nuncertain\ndownside risk\nrisk\n");
  std::string filler;
  for (int i = 0; i < 95; ++i) filler += " the";
  const Date d{std::chrono::year{2020}, std::chrono::month{1}, std::chrono::day{5}};
  const std::string tone_text = "Strong growth, improved jobs and robust demand offset weak exports" + filler.substr(0, 40);
  const double tone = text::tone_index({{"a", d, tone_text}}, lex);
  std::vector<text::SentenceLabel> sl(5, text::SentenceLabel::Positive);
  sl.insert(sl.end(), 2, text::SentenceLabel::Negative);
  sl.insert(sl.end(), 3, text::SentenceLabel::Neutral);
  const double label_tone = text::label_tone_index(sl);
  const double unc = text::uncertainty_raw(text::count_terms("Uncertain times and downside risk" + filler, lex));
  const double a_same = text::krippendorff_alpha(labels({{"pos", "pos", "pos"}, {"neg", "neg", "neg"}, {"neu", "neu", nullptr}}));
  const auto four = labels({{"pos", "pos"}, {"neg", "pos"}, {"neu", "neu"}, {"neg", "neg"}});
  const double a4 = text::krippendorff_alpha(four), oracle = alpha_oracle(four);
  const bool ok = tone == 0.1 && label_tone == 0.3 && unc == 2.0 && a_same == 1.0 && std::abs(a4 - oracle) <= 1e-12;
  return {ok, fmt("tone %.17g, label tone %.17g, uncertainty %.17g, alpha(identical) %.17g, alpha(4-unit) %.15f vs "
                  "oracle %.15f",
                  tone, label_tone, unc, a_same, a4, oracle)};
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + MPSENT_CLI + "\" " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file()) out[fs::relative(e.path(), dir).string()] = io::read_file(e.path().string());
  return out;
}

Outcome cli_determinism() {
  const fs::path root = fs::temp_directory_path() / "mpsent-acceptance-cli";
  fs::remove_all(root);
  const fs::path cfg(MPSENT_EXAMPLES);
  const std::vector<std::pair<std::string, std::string>> runs = {
      {"bnk solve", "bnk.json"},          {"bnk irf", "bnk.json"},
      {"svar identify", "svar.json"},     {"svar fevd", "svar.json"},
      {"svar hd", "svar.json"},           {"svar counterfactual", "svar.json"},
      {"svar diagnostics", "svar.json"},  {"taylor ols", "taylor.json"},
      {"taylor gmm", "taylor.json"},      {"taylor bootstrap-j", "taylor.json"},
      {"taylor leakage", "taylor.json"},  {"lp run", "lp.json"},
      {"text tone", "text.json"},         {"text uncertainty", "text.json"},
      {"text alpha", "text.json"},        {"synth var", "synth_var.json"},
      {"synth taylor", "synth_taylor.json"}};
  int identical = 0;
  std::string bad;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto& [cmd, file] = runs[i];
    std::vector<std::map<std::string, std::string>> snaps;
    for (const char* variant : {"a", "b", "c"}) {
      const fs::path out = root / std::to_string(i) / variant;
      const std::string threads = std::string(variant) == "c" ? " --threads 3" : " --threads 1";
      const int rc = run_cli(cmd + " --config \"" + (cfg / file).string() + "\" --out \"" + out.string() + "\"" + threads);
      if (rc != 0) return {false, cmd + " exited with " + std::to_string(rc)};
      snaps.push_back(snapshot(out));
    }
    if (snaps[0] == snaps[1] && snaps[0] == snaps[2] && snaps[0].count("manifest.json"))
      ++identical;
    else
      bad += " " + cmd;
  }
  fs::remove_all(root);
  return {bad.empty(), fmt("%d/%zu subcommands byte-identical across two runs and 1 vs 3 threads%s", identical,
                           runs.size(), bad.c_str())};
}

}  // namespace

int main() {
  criterion(1, "stable-mode constants", 1.0, stable_mode_constants);
  criterion(2, "narrative shrink factor", 1.0, narrative_shrink);
  criterion(3, "sign-table conformance", 5.0, sign_table);
  criterion(4, "closed-form / path agreement", 0.0, closed_form_agreement);
  criterion(5, "SVAR identification recovery", 600.0, svar_recovery);
  criterion(6, "delta robustness", 0.0, delta_robustness);
  criterion(7, "channel-shutdown counterfactual", 0.0, counterfactual);
  criterion(8, "GMM consistency, OLS bias", 120.0, gmm_vs_ols);
  criterion(9, "bootstrap J size", 600.0, bootstrap_size);
  criterion(10, "leakage attenuation", 300.0, leakage);
  criterion(11, "local projection recovery", 0.0, lp_recovery);
  criterion(12, "text formulas", 0.0, text_formulas);
  criterion(13, "CLI determinism", 0.0, cli_determinism);
  std::printf("%d of 13 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
