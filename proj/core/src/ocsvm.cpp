#include "kst/ocsvm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

#include "kst/error.hpp"
#include "kst/random.hpp"

namespace kst {
namespace {

constexpr double kMarginSlack = 1e-7;
constexpr double kMinCurvature = 1e-12;

double quadratic_objective(std::span<const double> alphas, std::span<const double> gradient) {
  double sum = 0.0;
  for (std::size_t i = 0; i < alphas.size(); ++i) sum += alphas[i] * gradient[i];
  return 0.5 * sum;
}

double median_of(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 == 1 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

std::string fmt17(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

}  // namespace

void OcsvmConfig::validate() const {
  if (!(nu > 0.0 && nu <= 1.0)) throw Error(ErrorCode::InfeasibleNu, "nu must lie in (0, 1]");
  if (subset_count == 0) throw Error(ErrorCode::InvalidArgument, "subset_count must be positive");
  if (static_cast<double>(subset_count) * nu < 1.0 - 1e-12) {
    throw Error(ErrorCode::InfeasibleNu, "subset_count * nu must be at least 1 (box and simplex are disjoint)");
  }
  if (subset_scheme == SubsetScheme::Random && set_size == 0) {
    throw Error(ErrorCode::InvalidArgument, "set_size must be positive");
  }
  if (!(solver_tolerance > 0.0)) throw Error(ErrorCode::InvalidArgument, "solver tolerance must be positive");
  if (const auto* cv = std::get_if<CrossValidated>(&rho_calibration)) {
    if (!(cv->target_alpha > 0.0 && cv->target_alpha < 1.0)) {
      throw Error(ErrorCode::InvalidArgument, "target_alpha must lie in (0, 1)");
    }
    if (cv->validation_subsets == 0) throw Error(ErrorCode::InvalidArgument, "need validation subsets");
    if (cv->folds > 1 && cv->validation_subsets < cv->folds) {
      throw Error(ErrorCode::InvalidArgument, "need at least one validation subset per fold");
    }
  }
}

std::vector<IndexSet> sample_subset_indices(std::size_t population, std::size_t subset_count,
                                            std::size_t set_size, std::uint64_t seed) {
  if (set_size == 0) throw Error(ErrorCode::InvalidArgument, "set_size must be positive");
  if (set_size > population) {
    throw Error(ErrorCode::InsufficientData, "set size " + std::to_string(set_size) + " exceeds sample of " +
                                                 std::to_string(population));
  }
  std::vector<IndexSet> subsets;
  subsets.reserve(subset_count);
  for (std::size_t i = 0; i < subset_count; ++i) {
    Rng rng = Rng::derive(seed, i);
    subsets.push_back(rng.sample_without_replacement(population, set_size));
  }
  return subsets;
}

std::vector<IndexSet> nested_subset_indices(std::size_t population, std::size_t subset_count, std::uint64_t seed) {
  if (subset_count > population) {
    throw Error(ErrorCode::InsufficientData, "nested subsets need subset_count <= sample size");
  }
  Rng rng(seed);
  const auto order = rng.sample_without_replacement(population, subset_count);
  std::vector<IndexSet> subsets;
  subsets.reserve(subset_count);
  for (std::size_t i = 0; i < subset_count; ++i) {
    subsets.emplace_back(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(i + 1));
  }
  return subsets;
}

std::vector<SampleSet> sample_subsets(const SampleSet& x, std::size_t subset_count, std::size_t set_size,
                                      std::uint64_t seed) {
  const auto indices = sample_subset_indices(x.size(), subset_count, set_size, seed);
  std::vector<SampleSet> subsets;
  subsets.reserve(indices.size());
  for (const auto& idx : indices) subsets.push_back(x.subset(idx));
  return subsets;
}

DualSolution solve_dual(const Eigen::MatrixXd& q, double nu, double tolerance, std::size_t max_iterations,
                        const SolverObserver& observer) {
  const auto l = static_cast<std::size_t>(q.rows());
  if (l == 0 || q.cols() != q.rows()) throw Error(ErrorCode::InvalidArgument, "Gram matrix must be square and non-empty");
  if (!(nu > 0.0 && nu <= 1.0) || static_cast<double>(l) * nu < 1.0 - 1e-12) {
    throw Error(ErrorCode::InfeasibleNu, "l * nu = " + std::to_string(static_cast<double>(l) * nu) + " < 1");
  }
  const double upper = 1.0 / (nu * static_cast<double>(l));

  std::vector<double> alphas(l, 1.0 / static_cast<double>(l));
  std::vector<double> gradient(l);
  for (std::size_t r = 0; r < l; ++r) {
    double g = 0.0;
    for (std::size_t c = 0; c < l; ++c) g += q(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) * alphas[c];
    gradient[r] = g;
  }

  std::size_t iteration = 0;
  while (true) {
    std::size_t up = l;
    std::size_t low = l;
    for (std::size_t k = 0; k < l; ++k) {
      if (alphas[k] < upper && (up == l || gradient[k] < gradient[up])) up = k;
      if (alphas[k] > 0.0 && (low == l || gradient[k] > gradient[low])) low = k;
    }
    const double gap = (up == l || low == l) ? 0.0 : gradient[low] - gradient[up];
    if (gap <= tolerance) {
      const double objective = quadratic_objective(alphas, gradient);
      return DualSolution{std::move(alphas), objective, std::max(gap, 0.0), iteration};
    }
    if (iteration >= max_iterations) {
      const double objective = quadratic_objective(alphas, gradient);
      throw SolverDidNotConverge(std::move(alphas), objective, gap, iteration);
    }

    const auto i = static_cast<Eigen::Index>(up);
    const auto j = static_cast<Eigen::Index>(low);
    const double curvature = std::max(q(i, i) + q(j, j) - 2.0 * q(i, j), kMinCurvature);
    const double room_up = upper - alphas[up];
    const double room_low = alphas[low];
    double step = gap / curvature;
    if (step >= room_up || step >= room_low) {
      step = std::min(room_up, room_low);
      if (room_up <= room_low) {
        alphas[up] = upper;
        alphas[low] -= step;
        if (room_up == room_low) alphas[low] = 0.0;
      } else {
        alphas[low] = 0.0;
        alphas[up] += step;
      }
    } else {
      alphas[up] += step;
      alphas[low] -= step;
    }
    for (std::size_t k = 0; k < l; ++k) {
      const auto kk = static_cast<Eigen::Index>(k);
      gradient[k] += step * (q(kk, i) - q(kk, j));
    }
    ++iteration;
    if (observer) observer(iteration, quadratic_objective(alphas, gradient));
  }
}

DualSolution solve_dual(const SetGram& gram, const OcsvmConfig& config) {
  config.validate();
  if (gram.size() != config.subset_count) {
    throw Error(ErrorCode::DimensionMismatch, "Gram has " + std::to_string(gram.size()) + " rows but config expects " +
                                                  std::to_string(config.subset_count));
  }
  return solve_dual(gram.values, config.nu, config.solver_tolerance, config.iteration_cap());
}

RhoEstimate kkt_rho(std::span<const double> alphas, const Eigen::MatrixXd& q, double upper_bound) {
  const auto l = alphas.size();
  std::vector<double> scores(l);
  for (std::size_t r = 0; r < l; ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < l; ++c) s += alphas[c] * q(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(r));
    scores[r] = s;
  }
  std::vector<double> margin;
  for (std::size_t r = 0; r < l; ++r) {
    if (alphas[r] > kMarginSlack && alphas[r] < upper_bound - kMarginSlack) margin.push_back(scores[r]);
  }
  if (!margin.empty()) return {median_of(std::move(margin)), false};
  double weighted = 0.0;
  for (std::size_t r = 0; r < l; ++r) weighted += alphas[r] * scores[r];
  return {weighted, true};
}

double validation_quantile(std::vector<double> scores, double target_alpha) {
  if (scores.empty()) throw Error(ErrorCode::InvalidArgument, "no validation scores");
  auto rank = static_cast<std::size_t>(std::ceil(target_alpha * static_cast<double>(scores.size()) - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, scores.size());
  std::nth_element(scores.begin(), scores.begin() + static_cast<std::ptrdiff_t>(rank - 1), scores.end());
  return scores[rank - 1];
}

namespace {

// Subsets plus solved dual; rho is left at zero.
PooledOcsvm fit_alphas(const PooledSetKernel& pool, std::span<const std::size_t> train_rows, const OcsvmConfig& config,
                       std::uint64_t seed) {
  auto local = config.subset_scheme == SubsetScheme::Nested
                   ? nested_subset_indices(train_rows.size(), config.subset_count, seed)
                   : sample_subset_indices(train_rows.size(), config.subset_count, config.set_size, seed);
  PooledOcsvm model;
  model.subsets.reserve(local.size());
  for (auto& subset : local) {
    for (auto& row : subset) row = train_rows[row];
    model.subsets.push_back(std::move(subset));
  }
  const SetGram gram = pool.set_gram(model.subsets);
  auto solution = solve_dual(gram.values, config.nu, config.solver_tolerance, config.iteration_cap());
  model.alphas = std::move(solution.alphas);
  model.objective_value = solution.objective;
  model.kkt_gap = solution.kkt_gap;
  model.iterations = solution.iterations;
  return model;
}

void append_scores(const PooledOcsvm& model, const PooledSetKernel& pool, std::span<const std::size_t> rows,
                   std::size_t count, std::size_t size, std::uint64_t seed, std::vector<double>& scores) {
  for (auto& subset : sample_subset_indices(rows.size(), count, size, seed)) {
    for (auto& row : subset) row = rows[row];
    scores.push_back(decision_value(model, pool, subset));
  }
}

}  // namespace

PooledOcsvm train_pooled(const PooledSetKernel& pool, std::span<const std::size_t> train_rows,
                         const OcsvmConfig& config, std::uint64_t seed) {
  config.validate();
  if (train_rows.empty()) throw Error(ErrorCode::EmptySet, "no training points");

  PooledOcsvm model = fit_alphas(pool, train_rows, config, derive_seed(seed, 0));
  const auto* cv = std::get_if<CrossValidated>(&config.rho_calibration);
  if (cv == nullptr) {
    const auto estimate = kkt_rho(model.alphas, pool.set_gram(model.subsets).values, config.upper_bound());
    model.rho = estimate.rho;
    model.rho_fallback = estimate.fallback;
    return model;
  }

  const bool nested = config.subset_scheme == SubsetScheme::Nested;
  std::vector<double> scores;
  scores.reserve(cv->validation_subsets);
  if (cv->folds <= 1) {
    const std::size_t size = nested ? std::min(config.subset_count, train_rows.size()) : config.set_size;
    append_scores(model, pool, train_rows, cv->validation_subsets, size, derive_seed(seed, 1), scores);
  } else {
    const std::size_t n = train_rows.size();
    const std::size_t folds = cv->folds;
    const std::size_t smallest_fold = n / folds;
    if (!nested && (smallest_fold < config.set_size || n - (n + folds - 1) / folds < config.set_size)) {
      throw Error(ErrorCode::InsufficientData, std::to_string(folds) + " folds of " + std::to_string(n) +
                                                   " points leave fewer than set_size=" +
                                                   std::to_string(config.set_size) + " points per side");
    }
    Rng shuffle_rng = Rng::derive(seed, 2);
    const auto order = shuffle_rng.sample_without_replacement(n, n);
    for (std::size_t f = 0; f < folds; ++f) {
      const std::size_t begin = f * n / folds;
      const std::size_t end = (f + 1) * n / folds;
      std::vector<std::size_t> held_out;
      std::vector<std::size_t> rest;
      for (std::size_t i = 0; i < n; ++i) (i >= begin && i < end ? held_out : rest).push_back(train_rows[order[i]]);
      const PooledOcsvm fold_model = fit_alphas(pool, rest, config, derive_seed(derive_seed(seed, 3), f));
      const std::size_t count = cv->validation_subsets / folds + (f < cv->validation_subsets % folds ? 1 : 0);
      const std::size_t size = nested ? std::min(config.subset_count, held_out.size()) : config.set_size;
      append_scores(fold_model, pool, held_out, count, size, derive_seed(derive_seed(seed, 4), f), scores);
    }
  }
  model.rho = validation_quantile(std::move(scores), cv->target_alpha);
  model.rho_fallback = false;
  return model;
}

double decision_value(const PooledOcsvm& model, const PooledSetKernel& pool, std::span<const std::size_t> test_rows) {
  double score = 0.0;
  for (std::size_t i = 0; i < model.alphas.size(); ++i) {
    if (model.alphas[i] == 0.0) continue;
    score += model.alphas[i] * pool.set_kernel(model.subsets[i], test_rows);
  }
  return score;
}

OcsvmModel train(const SampleSet& x, const OcsvmConfig& config, const BaseKernelSpec& spec, std::uint64_t seed) {
  config.validate();
  if (config.subset_scheme == SubsetScheme::Random && x.size() < config.set_size) {
    throw Error(ErrorCode::InsufficientData, "sample of " + std::to_string(x.size()) + " is smaller than set size " +
                                                 std::to_string(config.set_size));
  }
  const PooledSetKernel pool(x.points(), spec);
  std::vector<std::size_t> rows(x.size());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  PooledOcsvm pooled = train_pooled(pool, rows, config, seed);

  std::vector<SampleSet> subsets;
  subsets.reserve(pooled.subsets.size());
  for (const auto& idx : pooled.subsets) subsets.push_back(x.subset(idx));
  return OcsvmModel{std::move(pooled.alphas), pooled.rho, std::move(subsets), spec, pooled.objective_value,
                    config.nu, config.set_size, pooled.rho_fallback};
}

ScoredDecision decide(const OcsvmModel& model, const SampleSet& y) {
  if (y.dim() != model.dim()) {
    throw Error(ErrorCode::DimensionMismatch,
                "model dimension " + std::to_string(model.dim()) + " vs test dimension " + std::to_string(y.dim()));
  }
  double value = 0.0;
  for (std::size_t i = 0; i < model.alphas.size(); ++i) {
    if (model.alphas[i] == 0.0) continue;
    value += model.alphas[i] * set_kernel(model.training_subsets[i], y, model.kernel);
  }
  const double score = value - model.rho;
  return {decision_from_score(score), score};
}

void write_model(std::ostream& out, const OcsvmModel& model) {
  out << "kst-ocsvm v1\n";
  out << "nu " << fmt17(model.nu) << '\n';
  out << "subset_count " << model.alphas.size() << '\n';
  out << "set_size " << model.set_size << '\n';
  out << "dimension " << model.dim() << '\n';
  out << "sigma " << fmt17(model.kernel.sigma()) << '\n';
  out << "rho " << fmt17(model.rho) << '\n';
  out << "rho_fallback " << (model.rho_fallback ? 1 : 0) << '\n';
  out << "objective " << fmt17(model.objective_value) << '\n';
  out << "alphas";
  for (const double a : model.alphas) out << ' ' << fmt17(a);
  out << '\n';
  for (std::size_t s = 0; s < model.training_subsets.size(); ++s) {
    const SampleSet& subset = model.training_subsets[s];
    out << "subset " << s << ' ' << subset.size() << '\n';
    for (std::size_t r = 0; r < subset.size(); ++r) {
      const auto p = subset.point(r);
      for (std::size_t c = 0; c < p.size(); ++c) {
        if (c > 0) out << ' ';
        out << fmt17(p[c]);
      }
      out << '\n';
    }
  }
}

OcsvmModel read_model(std::istream& in) {
  std::string line;
  auto next_line = [&](const char* what) -> std::istringstream {
    if (!std::getline(in, line)) throw Error(ErrorCode::ParseError, std::string("model file truncated before ") + what);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return std::istringstream(line);
  };
  auto number = [](std::istringstream& fields, const char* what) {
    std::string token;
    if (!(fields >> token)) throw Error(ErrorCode::ParseError, std::string("missing value for ") + what);
    char* end = nullptr;
    const double value = std::strtod(token.c_str(), &end);
    if (end == token.c_str() || *end != '\0') throw Error(ErrorCode::ParseError, "bad number '" + token + "'");
    return value;
  };
  auto keyed = [&](const char* key) {
    auto fields = next_line(key);
    std::string name;
    fields >> name;
    if (name != key) throw Error(ErrorCode::ParseError, std::string("expected '") + key + "', got '" + name + "'");
    return number(fields, key);
  };

  if (next_line("header").str() != "kst-ocsvm v1") throw Error(ErrorCode::ParseError, "not a kst-ocsvm v1 model");
  const double nu = keyed("nu");
  const auto count = static_cast<std::size_t>(keyed("subset_count"));
  const auto set_size = static_cast<std::size_t>(keyed("set_size"));
  const auto dim = static_cast<std::size_t>(keyed("dimension"));
  const double sigma = keyed("sigma");
  const double rho = keyed("rho");
  const bool fallback = keyed("rho_fallback") != 0.0;
  const double objective = keyed("objective");

  auto alpha_fields = next_line("alphas");
  std::string tag;
  alpha_fields >> tag;
  if (tag != "alphas") throw Error(ErrorCode::ParseError, "expected 'alphas'");
  std::vector<double> alphas;
  alphas.reserve(count);
  for (std::size_t i = 0; i < count; ++i) alphas.push_back(number(alpha_fields, "alpha"));

  std::vector<SampleSet> subsets;
  subsets.reserve(count);
  for (std::size_t s = 0; s < count; ++s) {
    auto header = next_line("subset");
    std::size_t index = 0;
    std::size_t rows = 0;
    header >> tag >> index >> rows;
    if (tag != "subset" || index != s || rows == 0) throw Error(ErrorCode::ParseError, "bad subset header '" + line + "'");
    PointMatrix points(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(dim));
    for (std::size_t r = 0; r < rows; ++r) {
      auto coords = next_line("subset row");
      for (std::size_t c = 0; c < dim; ++c) {
        points(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = number(coords, "coordinate");
      }
    }
    subsets.emplace_back(std::move(points));
  }
  return OcsvmModel{std::move(alphas), rho, std::move(subsets), BaseKernelSpec::gaussian(sigma), objective,
                    nu, set_size, fallback};
}

}  // namespace kst
