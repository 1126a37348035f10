#include "oodcp/sim.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <thread>

#include "oodcp/conformal.hpp"

namespace oodcp {

namespace {

double half_normal_density(double v, double scale) {
  return std::sqrt(2.0 / std::numbers::pi) / scale *
         std::exp(-v * v / (2.0 * scale * scale));
}

// Order statistic quantile tolerant of +inf entries (full-set lengths).
double order_quantile(std::vector<double> values, double level) {
  std::sort(values.begin(), values.end());
  const double scaled =
      level * static_cast<double>(values.size()) - kRankSlack;
  auto k = static_cast<std::size_t>(std::max(std::ceil(scaled), 1.0));
  k = std::min(k, values.size());
  return values[k - 1];
}

MetricStats summarize(std::vector<double> values) {
  MetricStats stats;
  double sum = 0.0;
  for (double v : values) sum += v;
  stats.mean = sum / static_cast<double>(values.size());
  stats.q25 = order_quantile(values, 0.25);
  stats.q50 = order_quantile(values, 0.50);
  stats.q75 = order_quantile(values, 0.75);
  stats.values = std::move(values);
  return stats;
}

unsigned thread_budget(std::size_t jobs) {
  unsigned budget = std::thread::hardware_concurrency();
  if (budget == 0) budget = 1;
  if (const char* env = std::getenv("OODCP_THREADS")) {
    char* end = nullptr;
    const long parsed = std::strtol(env, &end, 10);
    if (end != env && parsed > 0) {
      budget = std::min<unsigned>(budget, static_cast<unsigned>(parsed));
    }
  }
  return static_cast<unsigned>(
      std::min<std::size_t>(budget, std::max<std::size_t>(jobs, 1)));
}

// Split `total` into `parts` nearly equal counts, remainder to the front.
std::vector<std::size_t> split_evenly(std::size_t total, std::size_t parts) {
  std::vector<std::size_t> out(parts, total / parts);
  for (std::size_t i = 0; i < total % parts; ++i) ++out[i];
  return out;
}

}  // namespace

double ExperimentConfig::resolved_rho() const {
  if (rho_oracle_scale) {
    return *rho_oracle_scale * score_law_divergence(sigma_sy, sigma_ty,
                                                    family());
  }
  return rho;
}

std::vector<std::string> ExperimentConfig::violations() const {
  std::vector<std::string> out;
  if (dims == 0) out.push_back("dims must be >= 1");
  if (!w_star.empty() && w_star.size() != dims) {
    out.push_back("w_star must have dims entries");
  }
  if (mu_list.empty()) out.push_back("mu_list must name at least one source");
  for (std::size_t i = 0; i < mu_list.size(); ++i) {
    if (mu_list[i].size() != dims) {
      out.push_back("mu_list[" + std::to_string(i) +
                    "] must have dims entries");
    }
  }
  if (!(sigma_sx > 0.0)) out.push_back("sigma_sx must be > 0");
  if (!(sigma_sy > 0.0)) out.push_back("sigma_sy must be > 0");
  if (!(sigma_ty > 0.0)) out.push_back("sigma_ty must be > 0");
  if (!target_mix.empty()) {
    if (target_mix.size() != mu_list.size()) {
      out.push_back("target_mix must have one weight per source");
    }
    double sum = 0.0;
    bool negative = false;
    for (double w : target_mix) {
      if (w < 0.0) negative = true;
      sum += w;
    }
    if (negative) out.push_back("target_mix weights must be >= 0");
    if (std::abs(sum - 1.0) > 1e-9) out.push_back("target_mix must sum to 1");
  }
  if (m_train <= dims + 1) out.push_back("m_train must exceed dims + 1");
  if (!mu_list.empty() && n_calib < mu_list.size()) {
    out.push_back("n_calib must cover every source");
  }
  if (m_test == 0) out.push_back("m_test must be >= 1");
  if (alpha_list.empty()) out.push_back("alpha_list must be non-empty");
  for (double a : alpha_list) {
    if (!(a > 0.0 && a < 1.0)) {
      out.push_back("alpha_list entries must lie in (0, 1)");
      break;
    }
  }
  if (family_name != "chi2" && family_name != "tv" && family_name != "kl") {
    out.push_back("family must be chi2, tv or kl");
  } else if (rho_oracle_scale) {
    if (!(*rho_oracle_scale >= 0.0)) {
      out.push_back("rho_oracle_scale must be >= 0");
    }
  } else if (!(rho >= 0.0) || std::isnan(rho)) {
    out.push_back("rho must be >= 0");
  }
  if (epsilon_grid < 10) out.push_back("epsilon_grid must be >= 10");
  if (n_trials == 0) out.push_back("n_trials must be >= 1");
  return out;
}

void ExperimentConfig::validate() const {
  const auto problems = violations();
  if (problems.empty()) return;
  std::string message = "invalid experiment config:";
  for (const auto& p : problems) message += "\n  - " + p;
  throw ConfigError(message);
}

Dataset draw_linear_gaussian(const std::vector<double>& mu, double sigma_x,
                             double sigma_y, const std::vector<double>& w,
                             double b, std::size_t count, RandomStream& rng) {
  if (mu.size() != w.size()) {
    throw LengthMismatch("draw_linear_gaussian: mu and w disagree on dims");
  }
  const std::size_t dims = mu.size();
  Dataset data;
  data.dims = dims;
  data.x.resize(count * dims);
  data.y.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    double signal = b;
    for (std::size_t j = 0; j < dims; ++j) {
      const double xij = mu[j] + sigma_x * rng.normal();
      data.x[i * dims + j] = xij;
      signal += w[j] * xij;
    }
    data.y[i] = signal + sigma_y * rng.normal();
  }
  return data;
}

Dataset draw_target_mixture(const ExperimentConfig& config, std::size_t count,
                            RandomStream& rng) {
  const std::vector<double> mix =
      config.target_mix.empty()
          ? std::vector<double>(config.n_sources(),
                                1.0 / static_cast<double>(config.n_sources()))
          : config.target_mix;
  const std::vector<double> w =
      config.w_star.empty() ? std::vector<double>(config.dims, 1.0)
                            : config.w_star;
  Dataset data;
  data.dims = config.dims;
  data.x.resize(count * config.dims);
  data.y.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t source = rng.categorical(mix);
    const auto& mu = config.mu_list[source];
    double signal = config.b_star;
    for (std::size_t j = 0; j < config.dims; ++j) {
      const double xij = mu[j] + config.sigma_sx * rng.normal();
      data.x[i * config.dims + j] = xij;
      signal += w[j] * xij;
    }
    data.y[i] = signal + config.sigma_ty * rng.normal();
  }
  return data;
}

LinearModel fit_least_squares(const Dataset& data) {
  const std::size_t n = data.size();
  const std::size_t p = data.dims + 1;
  if (n < p) {
    throw RankDeficient("fit_least_squares: " + std::to_string(n) +
                        " rows cannot identify " + std::to_string(p) +
                        " coefficients");
  }
  Eigen::MatrixXd design(n, p);
  Eigen::VectorXd response(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < data.dims; ++j) {
      design(i, j) = data.x[i * data.dims + j];
    }
    design(i, data.dims) = 1.0;
    response(i) = data.y[i];
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  if (qr.rank() < static_cast<Eigen::Index>(p)) {
    throw RankDeficient("fit_least_squares: design matrix is rank deficient");
  }
  const Eigen::VectorXd solution = qr.solve(response);
  LinearModel model;
  model.weights.assign(solution.data(), solution.data() + data.dims);
  model.intercept = solution(data.dims);
  return model;
}

double predict(const LinearModel& model, std::span<const double> x) {
  if (x.size() != model.weights.size()) {
    throw LengthMismatch("predict: feature size mismatch");
  }
  double value = model.intercept;
  for (std::size_t j = 0; j < x.size(); ++j) {
    value += model.weights[j] * x[j];
  }
  return value;
}

double absolute_residual(const LinearModel& model, std::span<const double> x,
                         double y) {
  return std::abs(predict(model, x) - y);
}

double score_law_divergence(double sigma_source, double sigma_target,
                            const DivergenceFamily& family) {
  if (!(sigma_source > 0.0) || !(sigma_target > 0.0)) {
    throw Error("score_law_divergence: scales must be > 0");
  }
  if (family.kind() == DivergenceKind::kKullbackLeibler) {
    // KL between the half-normal score laws; the fold preserves density
    // ratios, so this equals the zero-mean Gaussian form.
    const double ratio2 =
        sigma_target * sigma_target / (sigma_source * sigma_source);
    return std::log(sigma_source / sigma_target) + 0.5 * ratio2 - 0.5;
  }
  // Composite Simpson quadrature of s_source(v) f(s_target(v) / s_source(v))
  // over [0, 12 max scale]; the tail beyond carries negligible mass.
  constexpr int kPanels = 1 << 14;  // 16384 >= 1e4
  const double upper = 12.0 * std::max(sigma_source, sigma_target);
  const double h = upper / kPanels;
  auto integrand = [&](double v) {
    const double qs = half_normal_density(v, sigma_source);
    const double qt = half_normal_density(v, sigma_target);
    return qs * family.value(qt / qs);
  };
  double sum = integrand(0.0) + integrand(upper);
  for (int i = 1; i < kPanels; ++i) {
    sum += (i % 2 == 1 ? 4.0 : 2.0) * integrand(h * i);
  }
  return sum * h / 3.0;
}

TrialResult run_trial(const ExperimentConfig& config, std::uint64_t trial_index,
                      const std::vector<std::optional<EpsilonChoice>>* plans) {
  config.validate();
  const std::size_t d = config.n_sources();
  const std::vector<double> w =
      config.w_star.empty() ? std::vector<double>(config.dims, 1.0)
                            : config.w_star;
  RandomStream rng(config.seed, trial_index);

  // Training pool: an even split across sources.
  const auto train_counts = split_evenly(config.m_train, d);
  Dataset train;
  train.dims = config.dims;
  for (std::size_t s = 0; s < d; ++s) {
    const Dataset part =
        draw_linear_gaussian(config.mu_list[s], config.sigma_sx,
                             config.sigma_sy, w, config.b_star,
                             train_counts[s], rng);
    train.x.insert(train.x.end(), part.x.begin(), part.x.end());
    train.y.insert(train.y.end(), part.y.begin(), part.y.end());
  }
  const LinearModel model = fit_least_squares(train);

  // Calibration scores per source.
  const auto calib_counts = split_evenly(config.n_calib, d);
  CalibrationBundle bundle;
  bundle.scores_by_domain.resize(d);
  for (std::size_t s = 0; s < d; ++s) {
    const Dataset part =
        draw_linear_gaussian(config.mu_list[s], config.sigma_sx,
                             config.sigma_sy, w, config.b_star,
                             calib_counts[s], rng);
    auto& scores = bundle.scores_by_domain[s];
    scores.reserve(part.size());
    for (std::size_t i = 0; i < part.size(); ++i) {
      scores.push_back(absolute_residual(model, part.row(i), part.y[i]));
    }
  }
  const std::vector<double> pooled = bundle.pooled();
  const MinCdf envelope = bundle.min_cdf();
  const auto sizes = bundle.sample_sizes();

  // Fresh target sample, scored once.
  const Dataset test = draw_target_mixture(config, config.m_test, rng);
  std::vector<double> test_scores(test.size());
  for (std::size_t i = 0; i < test.size(); ++i) {
    test_scores[i] = absolute_residual(model, test.row(i), test.y[i]);
  }

  RobustConfig robust_cfg{config.family(), config.resolved_rho(), 0.5,
                          config.epsilon_grid, std::nullopt};
  TrialResult result;
  for (std::size_t a = 0; a < config.alpha_list.size(); ++a) {
    const double alpha = config.alpha_list[a];
    robust_cfg.alpha = alpha;

    const double t_scp = scp_threshold(pooled, alpha);
    std::optional<EpsilonChoice> choice =
        plans ? (*plans)[a] : plan_epsilon(sizes, robust_cfg);
    const double t_ood =
        choice ? apply_epsilon_choice(envelope, sizes, robust_cfg, *choice)
                     .threshold
               : kInf;

    std::size_t hit_scp = 0;
    std::size_t hit_ood = 0;
    for (double s : test_scores) {
      if (s <= t_scp) ++hit_scp;
      if (s <= t_ood) ++hit_ood;
    }
    const auto count = static_cast<double>(test_scores.size());
    result.scp_coverage.push_back(static_cast<double>(hit_scp) / count);
    result.ood_coverage.push_back(static_cast<double>(hit_ood) / count);
    result.scp_length.push_back(2.0 * t_scp);
    result.ood_length.push_back(2.0 * t_ood);
  }
  return result;
}

ExperimentSummary run_experiment(const ExperimentConfig& config,
                                 std::vector<TrialResult>* trials_out) {
  config.validate();

  // The epsilon program depends only on the size profile, which is fixed by
  // the config; plan once per alpha instead of once per trial.
  const std::size_t d = config.n_sources();
  const auto calib_counts = split_evenly(config.n_calib, d);
  std::vector<std::uint64_t> sizes(calib_counts.begin(), calib_counts.end());
  RobustConfig robust_cfg{config.family(), config.resolved_rho(), 0.5,
                          config.epsilon_grid, std::nullopt};
  std::vector<std::optional<EpsilonChoice>> plans;
  plans.reserve(config.alpha_list.size());
  for (double alpha : config.alpha_list) {
    robust_cfg.alpha = alpha;
    plans.push_back(plan_epsilon(sizes, robust_cfg));
  }

  std::vector<TrialResult> trials(config.n_trials);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= config.n_trials) return;
      trials[i] = run_trial(config, i, &plans);
    }
  };
  const unsigned threads = thread_budget(config.n_trials);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  ExperimentSummary summary;
  summary.seed = config.seed;
  for (std::size_t a = 0; a < config.alpha_list.size(); ++a) {
    AlphaSummary alpha_summary;
    alpha_summary.alpha = config.alpha_list[a];
    std::vector<double> scp_cov, ood_cov, scp_len, ood_len;
    scp_cov.reserve(trials.size());
    ood_cov.reserve(trials.size());
    scp_len.reserve(trials.size());
    ood_len.reserve(trials.size());
    for (const auto& trial : trials) {
      scp_cov.push_back(trial.scp_coverage[a]);
      ood_cov.push_back(trial.ood_coverage[a]);
      scp_len.push_back(trial.scp_length[a]);
      ood_len.push_back(trial.ood_length[a]);
    }
    alpha_summary.scp_coverage = summarize(std::move(scp_cov));
    alpha_summary.ood_coverage = summarize(std::move(ood_cov));
    alpha_summary.scp_length = summarize(std::move(scp_len));
    alpha_summary.ood_length = summarize(std::move(ood_len));
    summary.per_alpha.push_back(std::move(alpha_summary));
  }
  if (trials_out) *trials_out = std::move(trials);
  return summary;
}

}  // namespace oodcp
