#include "causamix/ica.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "causamix/assignment.hpp"
#include "causamix/errors.hpp"
#include "causamix/parallel.hpp"

namespace causamix {

namespace {

std::uint64_t round_seed(std::uint64_t seed, int round) {
  std::uint64_t x = seed + 0x9e3779b97f4a7c15ULL * (round + 1);
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  return x;
}

// Numerically safe log(cosh(s)).
double log_cosh(double s) {
  double a = std::abs(s);
  return a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0);
}

// Centered data as columns. Throws when the sample is too small or its
// covariance is rank-deficient.
Eigen::MatrixXd centered_columns(const Eigen::MatrixXd& data) {
  int n = static_cast<int>(data.rows());
  int d = static_cast<int>(data.cols());
  if (d < 1) throw DegenerateData("data has no columns");
  if (n < 10 * d) {
    throw DegenerateData("need at least 10 samples per dimension, got " +
                         std::to_string(n) + " for " + std::to_string(d));
  }
  Eigen::MatrixXd x = (data.rowwise() - data.colwise().mean()).transpose();
  Eigen::MatrixXd cov = x * x.transpose() / static_cast<double>(n);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(cov);
  const auto& sv = svd.singularValues();
  if (sv(0) <= 0.0 || sv(d - 1) <= 1e-12 * sv(0)) {
    throw DegenerateData("data covariance is rank-deficient");
  }
  return x;
}

// Symmetric whitening pair: `unmix` maps centered columns to unit
// covariance, `remix` inverts it. Callers check degeneracy first, so the
// eigenvalues are safely positive.
struct Whitener {
  Eigen::MatrixXd unmix, remix;
};

Whitener make_whitener(const Eigen::MatrixXd& x) {
  int n = static_cast<int>(x.cols());
  Eigen::MatrixXd cov = x * x.transpose() / static_cast<double>(n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
  Eigen::VectorXd root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  Whitener w;
  w.unmix = root.cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
  w.remix = es.eigenvectors() * root.asDiagonal();
  return w;
}

// Gradient-descent core. `x` holds centered samples as columns; returns the
// k x d unmixing-direction matrix.
Eigen::MatrixXd rica_core(const Eigen::MatrixXd& x, const IcaConfig& cfg) {
  int d = static_cast<int>(x.rows());
  int n = static_cast<int>(x.cols());
  int k = cfg.n_sources;
  if (k < 1) throw Error("n_sources must be set");

  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd r(k, d);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < d; ++j) r(i, j) = gauss(rng) / std::sqrt(d);
  }

  double inv_n = 1.0 / static_cast<double>(n);
  bool kurtosis = cfg.contrast == IcaContrast::Kurtosis;
  auto objective = [&](const Eigen::MatrixXd& m) {
    Eigen::MatrixXd s = m * x;
    Eigen::MatrixXd e = m.transpose() * s - x;
    double pen = 0.0;
    if (kurtosis) {
      // Sum of empirical kurtosis cumulants. Cumulants are multilinear in
      // the mixing, so for equally sub-Gaussian sources the minimum sits at
      // the true directions; raw fourth moments do not have that property.
      for (int i = 0; i < s.rows(); ++i) {
        double m2 = s.row(i).squaredNorm() * inv_n;
        double m4 = s.row(i).array().pow(4).sum() * inv_n;
        pen += m4 - 3.0 * m2 * m2;
      }
    } else {
      for (int i = 0; i < s.rows(); ++i) {
        for (int j = 0; j < s.cols(); ++j) pen += inv_n * log_cosh(s(i, j));
      }
    }
    return 0.5 * cfg.recon_weight * inv_n * e.squaredNorm() + cfg.lambda * pen;
  };

  double f = objective(r);
  if (!std::isfinite(f)) throw Diverged("initial objective is not finite");
  double step = 1.0;
  double window_ref = f;
  for (int it = 0; it < cfg.iterations; ++it) {
    Eigen::MatrixXd s = r * x;
    Eigen::MatrixXd e = r.transpose() * s - x;
    Eigen::MatrixXd pgrad(k, d);
    if (kurtosis) {
      for (int i = 0; i < k; ++i) {
        double m2 = s.row(i).squaredNorm() * inv_n;
        pgrad.row(i) =
            4.0 * inv_n * (s.row(i).array().pow(3).matrix() * x.transpose()) -
            12.0 * m2 * inv_n * (s.row(i) * x.transpose());
      }
    } else {
      pgrad = inv_n * (s.array().tanh().matrix() * x.transpose());
    }
    Eigen::MatrixXd grad =
        cfg.recon_weight * inv_n * (s * e.transpose() + r * e * x.transpose()) +
        cfg.lambda * pgrad;
    if (!grad.allFinite()) throw Diverged("gradient is not finite");

    step *= 2.0;
    bool moved = false;
    for (int h = 0; h < 60; ++h) {
      Eigen::MatrixXd trial = r - step * grad;
      double ft = objective(trial);
      if (std::isfinite(ft) && ft < f) {
        r = trial;
        f = ft;
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;
    if ((it + 1) % 25 == 0) {
      if (window_ref - f < 1e-10 * std::max(1.0, std::abs(window_ref))) break;
      window_ref = f;
    }
  }
  return r;
}

std::vector<std::string> make_labels(const std::vector<std::string>& names,
                                     int d) {
  if (!names.empty()) {
    if (static_cast<int>(names.size()) != d) {
      throw ShapeMismatch("variable name count does not match data width");
    }
    return names;
  }
  std::vector<std::string> out;
  for (int i = 0; i < d; ++i) out.push_back("v" + std::to_string(i));
  return out;
}

// Greedy or exact maximum-|cosine| matching of `cur` columns onto `ref`
// columns. Returns, per ref column, the matched cur column index.
std::vector<int> match_columns(const Eigen::MatrixXd& ref,
                               const Eigen::MatrixXd& cur, bool hungarian,
                               std::vector<std::string>* warnings) {
  int k = static_cast<int>(ref.cols());
  Eigen::MatrixXd cos(k, k);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      double den = ref.col(i).norm() * cur.col(j).norm();
      cos(i, j) = den > 0.0 ? std::abs(ref.col(i).dot(cur.col(j))) / den : 0.0;
    }
  }
  std::vector<int> match(k, -1);
  if (hungarian) {
    match = min_cost_assignment(-cos);
    return match;
  }
  std::vector<char> ref_done(k, 0), cur_done(k, 0);
  for (int pick = 0; pick < k; ++pick) {
    int bi = -1, bj = -1;
    double best = -1.0, second = -1.0;
    for (int i = 0; i < k; ++i) {
      if (ref_done[i]) continue;
      for (int j = 0; j < k; ++j) {
        if (cur_done[j]) continue;
        if (cos(i, j) > best) {
          second = best;
          best = cos(i, j);
          bi = i;
          bj = j;
        } else if (cos(i, j) > second) {
          second = cos(i, j);
        }
      }
    }
    if (second >= 0.0 && best - second < 1e-9) {
      std::ostringstream msg;
      msg << "column alignment ambiguous: |cosine| " << best
          << " matched more than once";
      warnings->push_back(msg.str());
    }
    ref_done[bi] = 1;
    cur_done[bj] = 1;
    match[bi] = bj;
  }
  return match;
}

}  // namespace

MixingMatrix reconstruction_ica(const Eigen::MatrixXd& data,
                                const IcaConfig& cfg,
                                const std::vector<std::string>& var_names) {
  Eigen::MatrixXd x = centered_columns(data);
  MixingMatrix out;
  if (cfg.whiten) {
    Whitener w = make_whitener(x);
    Eigen::MatrixXd r = rica_core(w.unmix * x, cfg);
    out.values = w.remix * r.transpose();
  } else {
    Eigen::MatrixXd r = rica_core(x, cfg);
    out.values = r.transpose();
  }
  out.row_labels = make_labels(var_names, static_cast<int>(data.cols()));
  out.kind = cfg.kind;
  return normalize_columns(out);
}

BootstrapEstimate bootstrap_estimate(const Eigen::MatrixXd& data,
                                     const IcaConfig& cfg,
                                     const std::vector<std::string>& var_names) {
  int rounds = cfg.bootstrap_rounds;
  if (rounds < 1) throw Error("bootstrap needs at least one round");
  if (cfg.bootstrap_fraction <= 0.0 || cfg.bootstrap_fraction > 1.0) {
    throw Error("bootstrap fraction must lie in (0,1]");
  }
  int n = static_cast<int>(data.rows());
  int m = std::max(1, static_cast<int>(cfg.bootstrap_fraction * n));

  std::vector<Eigen::MatrixXd> raw(rounds);
  std::vector<std::string> errors(rounds);
  parallel_for(rounds, worker_count(), [&](int round) {
    std::uint64_t rs = round_seed(cfg.seed, round);
    std::mt19937_64 rng(rs);
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), rng);
    Eigen::MatrixXd sub(m, data.cols());
    for (int i = 0; i < m; ++i) sub.row(i) = data.row(idx[i]);
    IcaConfig rc = cfg;
    rc.seed = rs;
    try {
      raw[round] = reconstruction_ica(sub, rc, var_names).values;
    } catch (const Error& e) {
      errors[round] = e.what();
    }
  });
  for (int round = 0; round < rounds; ++round) {
    if (!errors[round].empty()) {
      throw Diverged("bootstrap round " + std::to_string(round) + ": " +
                     errors[round]);
    }
  }

  BootstrapEstimate out;
  const Eigen::MatrixXd& ref = raw[0];
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(ref.rows(), ref.cols());
  Eigen::MatrixXd sumsq = sum;
  for (int round = 0; round < rounds; ++round) {
    std::vector<int> match =
        round == 0 ? std::vector<int>()
                   : match_columns(ref, raw[round], cfg.hungarian_alignment,
                                   &out.warnings);
    Eigen::MatrixXd aligned(ref.rows(), ref.cols());
    for (int c = 0; c < ref.cols(); ++c) {
      Eigen::VectorXd col =
          round == 0 ? raw[round].col(c) : raw[round].col(match[c]);
      double den = col.squaredNorm();
      double scale = den > 0.0 ? ref.col(c).dot(col) / den : 1.0;
      aligned.col(c) = scale * col;
    }
    sum += aligned;
    sumsq += aligned.cwiseProduct(aligned);
  }
  out.mean.values = sum / rounds;
  out.mean.row_labels = make_labels(var_names, static_cast<int>(data.cols()));
  out.mean.kind = cfg.kind;
  if (rounds > 1) {
    Eigen::MatrixXd var =
        (sumsq - rounds * out.mean.values.cwiseProduct(out.mean.values)) /
        (rounds - 1);
    out.std_dev = var.cwiseMax(0.0).cwiseSqrt();
  } else {
    out.std_dev = Eigen::MatrixXd::Zero(ref.rows(), ref.cols());
  }
  return out;
}

MixingMatrix prune_estimate(const MixingMatrix& mean,
                            const Eigen::MatrixXd& std_dev,
                            const IcaConfig& cfg) {
  if (mean.values.rows() != std_dev.rows() ||
      mean.values.cols() != std_dev.cols()) {
    throw ShapeMismatch("mean and std shapes differ");
  }
  int rounds = cfg.bootstrap_rounds;
  double thr = cfg.prune_threshold;
  double t_crit = 0.0;
  if (rounds > 1) {
    boost::math::students_t dist(rounds - 1);
    t_crit = boost::math::quantile(dist, cfg.confidence);
  }
  MixingMatrix out = mean;
  for (int r = 0; r < out.rows(); ++r) {
    for (int c = 0; c < out.cols(); ++c) {
      double m = std::abs(out.values(r, c));
      double sd = std_dev(r, c);
      bool keep;
      if (sd == 0.0 || rounds < 2) {
        keep = m > thr;
      } else {
        keep = (m - thr) / (sd / std::sqrt(rounds)) > t_crit;
      }
      if (!keep) out.values(r, c) = 0.0;
    }
  }
  return out;
}

LingamResult ica_lingam_baseline(const Eigen::MatrixXd& data,
                                 const IcaConfig& cfg) {
  int d = static_cast<int>(data.cols());
  if (d > 8) {
    throw CombinatorialCap("causal-order search supports at most 8 variables");
  }
  IcaConfig sq = cfg;
  sq.n_sources = d;
  Eigen::MatrixXd x = centered_columns(data);
  Eigen::MatrixXd w;
  if (sq.whiten) {
    Whitener wh = make_whitener(x);
    w = rica_core(wh.unmix * x, sq) * wh.unmix;
  } else {
    w = rica_core(x, sq);
  }

  // Permute rows so the diagonal dominates, then scale rows to unit diagonal.
  std::vector<int> row_to_col = min_cost_assignment(-w.cwiseAbs());
  Eigen::MatrixXd wp(d, d);
  for (int i = 0; i < d; ++i) wp.row(row_to_col[i]) = w.row(i);
  for (int i = 0; i < d; ++i) {
    if (std::abs(wp(i, i)) < 1e-9) {
      throw SingularSubmatrix("unmixing estimate has a vanishing pivot");
    }
    wp.row(i) /= wp(i, i);
  }
  Eigen::MatrixXd b = Eigen::MatrixXd::Identity(d, d) - wp;
  b.diagonal().setZero();

  std::vector<int> perm(d);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int> best_perm = perm;
  double best_mass = std::numeric_limits<double>::infinity();
  do {
    double mass = 0.0;
    for (int i = 0; i < d; ++i) {
      for (int j = i; j < d; ++j) {
        mass += b(perm[i], perm[j]) * b(perm[i], perm[j]);
      }
    }
    if (mass < best_mass) {
      best_mass = mass;
      best_perm = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  LingamResult out;
  out.b = b;
  out.order = best_perm;
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) {
      out.b(best_perm[i], best_perm[j]) = 0.0;
    }
  }
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      if (std::abs(out.b(i, j)) <= cfg.prune_threshold) out.b(i, j) = 0.0;
    }
  }
  return out;
}

}  // namespace causamix
