#include "causamix/eval.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>
#include <variant>

#include "causamix/assignment.hpp"
#include "causamix/errors.hpp"
#include "causamix/io.hpp"
#include "causamix/parallel.hpp"
#include "causamix/recovery.hpp"
#include "causamix/synth.hpp"

namespace causamix {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

Eigen::MatrixXd adjacency_over(const WeightedDag& dag,
                               const std::vector<int>& row_ids,
                               const std::vector<int>& col_ids) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(row_ids.size(), col_ids.size());
  for (size_t i = 0; i < row_ids.size(); ++i) {
    for (size_t j = 0; j < col_ids.size(); ++j) {
      out(i, j) = dag.weight(col_ids[j], row_ids[i]);
    }
  }
  return out;
}

}  // namespace

MetricReport structure_metrics(const Eigen::MatrixXd& recovered,
                               const Eigen::MatrixXd& truth) {
  if (recovered.rows() != truth.rows() || recovered.cols() != truth.cols()) {
    throw ShapeMismatch("adjacency shapes differ: " +
                        std::to_string(recovered.rows()) + "x" +
                        std::to_string(recovered.cols()) + " vs " +
                        std::to_string(truth.rows()) + "x" +
                        std::to_string(truth.cols()));
  }
  int tp = 0, fp = 0, fn = 0, diff = 0, true_edges = 0;
  for (int i = 0; i < truth.rows(); ++i) {
    for (int j = 0; j < truth.cols(); ++j) {
      bool r = recovered(i, j) != 0.0;
      bool t = truth(i, j) != 0.0;
      true_edges += t;
      diff += r != t;
      tp += r && t;
      fp += r && !t;
      fn += !r && t;
    }
  }
  MetricReport m;
  m.shd = diff;
  m.zero_true_edges = true_edges == 0;
  m.shd_per_edge = true_edges > 0 ? diff / static_cast<double>(true_edges) : kNan;
  m.precision = tp + fp > 0 ? tp / static_cast<double>(tp + fp) : 0.0;
  m.recall = tp + fn > 0 ? tp / static_cast<double>(tp + fn) : 0.0;
  m.f1 = m.precision + m.recall > 0.0
             ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
             : 0.0;
  return m;
}

Eigen::MatrixXd weighted_adjacency(const WeightedDag& dag) {
  std::vector<int> ids = dag.node_ids();
  return adjacency_over(dag, ids, ids);
}

Eigen::MatrixXd underlying_adjacency(const SemMeModel& me) {
  std::vector<int> ids = me.underlying_ids();
  return adjacency_over(me.dag, ids, ids);
}

Eigen::MatrixXd observed_adjacency(const SemUrModel& ur) {
  std::vector<int> ids = ur.x_ids();
  return adjacency_over(ur.dag, ids, ids);
}

Eigen::MatrixXd latent_loadings(const SemUrModel& ur) {
  return adjacency_over(ur.dag, ur.x_ids(), ur.h_ids());
}

namespace {

template <class Model>
ClosestMember closest_impl(const Eigen::MatrixXd& recovered,
                           const std::vector<Model>& members,
                           Eigen::MatrixXd (*adj_of)(const Model&)) {
  ClosestMember out;
  double best = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < members.size(); ++i) {
    Eigen::MatrixXd adj = adj_of(members[i]);
    if (adj.rows() != recovered.rows() || adj.cols() != recovered.cols()) {
      throw ShapeMismatch("recovered adjacency does not match the class");
    }
    double d = (recovered - adj).norm();
    if (d < best) {
      best = d;
      out.index = static_cast<int>(i);
    }
  }
  out.distance = best;
  out.report =
      structure_metrics(recovered, adj_of(members[out.index]));
  out.report.mode = ComparisonMode::VsClosestDogMember;
  out.member = AnyModel(members[out.index]);
  return out;
}

}  // namespace

ClosestMember closest_dog_member(const Eigen::MatrixXd& recovered_adjacency,
                                 const SemMeModel& truth, long long cap) {
  return closest_impl<SemMeModel>(recovered_adjacency,
                                  dog_equivalence_members(truth, cap),
                                  &underlying_adjacency);
}

ClosestMember closest_dog_member(const Eigen::MatrixXd& recovered_a,
                                 const SemUrModel& truth, long long cap) {
  return closest_impl<SemUrModel>(recovered_a,
                                  dog_equivalence_members(truth, cap),
                                  &observed_adjacency);
}

ClosestMember closest_dog_member(const AnyModel& recovered,
                                 const AnyModel& truth, long long cap) {
  if (std::holds_alternative<SemMeModel>(recovered)) {
    if (!std::holds_alternative<SemMeModel>(truth)) {
      throw ShapeMismatch("model classes differ");
    }
    return closest_dog_member(underlying_adjacency(std::get<SemMeModel>(recovered)),
                              std::get<SemMeModel>(truth), cap);
  }
  if (!std::holds_alternative<SemUrModel>(truth)) {
    throw ShapeMismatch("model classes differ");
  }
  return closest_dog_member(observed_adjacency(std::get<SemUrModel>(recovered)),
                            std::get<SemUrModel>(truth), cap);
}

BMatch match_b_columns(const Eigen::MatrixXd& recovered,
                       const Eigen::MatrixXd& truth) {
  if (recovered.rows() != truth.rows()) {
    throw ShapeMismatch("loading matrices must share their row count");
  }
  int rows = static_cast<int>(truth.rows());
  int nr = static_cast<int>(recovered.cols());
  int nt = static_cast<int>(truth.cols());
  int n = std::max(nr, nt);
  auto rcol = [&](int j) -> Eigen::VectorXd {
    if (j < nr) return recovered.col(j);
    return Eigen::VectorXd::Zero(rows);
  };
  auto tcol = [&](int j) -> Eigen::VectorXd {
    if (j < nt) return truth.col(j);
    return Eigen::VectorXd::Zero(rows);
  };

  Eigen::MatrixXd cost(n, n);
  for (int r = 0; r < n; ++r) {
    Eigen::VectorXd br = rcol(r);
    double den = br.squaredNorm();
    for (int t = 0; t < n; ++t) {
      Eigen::VectorXd bt = tcol(t);
      double c = bt.squaredNorm();
      if (den > 0.0) {
        double dot = br.dot(bt);
        c -= dot * dot / den;
      }
      cost(r, t) = std::max(c, 0.0);
    }
  }
  std::vector<int> rec_to_truth(n, -1);
  if (n <= 32) {
    rec_to_truth = min_cost_assignment(cost);
  } else {
    std::vector<char> rdone(n, 0), tdone(n, 0);
    for (int pick = 0; pick < n; ++pick) {
      int bi = -1, bj = -1;
      double best = std::numeric_limits<double>::infinity();
      for (int r = 0; r < n; ++r) {
        if (rdone[r]) continue;
        for (int t = 0; t < n; ++t) {
          if (tdone[t]) continue;
          if (cost(r, t) < best) {
            best = cost(r, t);
            bi = r;
            bj = t;
          }
        }
      }
      rdone[bi] = 1;
      tdone[bj] = 1;
      rec_to_truth[bi] = bj;
    }
  }

  BMatch out;
  out.truth_to_recovered.assign(n, -1);
  out.scales.assign(n, 1.0);
  std::vector<int> truth_to_rec(n, -1);
  for (int r = 0; r < n; ++r) truth_to_rec[rec_to_truth[r]] = r;
  Eigen::MatrixXd aligned = Eigen::MatrixXd::Zero(rows, n);
  Eigen::MatrixXd padded = Eigen::MatrixXd::Zero(rows, n);
  for (int t = 0; t < n; ++t) {
    padded.col(t) = tcol(t);
    int r = truth_to_rec[t];
    out.truth_to_recovered[t] = r >= 0 && r < nr ? r : -1;
    Eigen::VectorXd br = r >= 0 ? rcol(r) : Eigen::VectorXd::Zero(rows);
    double den = br.squaredNorm();
    double s = 1.0;
    // A truth-side padding column stays unscaled so a spurious recovered
    // column keeps its support and is scored against zeros.
    if (padded.col(t).squaredNorm() > 0.0 && den > 0.0) {
      s = br.dot(padded.col(t)) / den;
    }
    out.scales[t] = s;
    aligned.col(t) = s * br;
  }
  out.report = structure_metrics(aligned, padded);
  out.report.mode = ComparisonMode::BMatrixMatched;
  return out;
}

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

std::uint64_t trial_seed(std::uint64_t master, int cell, int trial) {
  return splitmix(splitmix(master + 0x9e3779b97f4a7c15ULL * (cell + 1)) +
                  static_cast<std::uint64_t>(trial));
}

std::uint64_t sub_seed(std::uint64_t seed, int tag) {
  return splitmix(seed + static_cast<std::uint64_t>(tag) * 0xda942042e4dd58b5ULL);
}

struct TrialScore {
  bool ok = false;
  double f1 = kNan;
  double precision = kNan;
  double recall = kNan;
  double shd_per_edge = kNan;
  double b_f1 = kNan;
};

const std::vector<std::string> kMetricNames = {"f1", "precision", "recall",
                                               "shd_per_edge", "b_f1"};

double metric_value(const TrialScore& s, const std::string& name) {
  if (name == "f1") return s.f1;
  if (name == "precision") return s.precision;
  if (name == "recall") return s.recall;
  if (name == "shd_per_edge") return s.shd_per_edge;
  return s.b_f1;
}

Eigen::MatrixXd apply_threshold(Eigen::MatrixXd m, double tol) {
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      if (std::abs(m(i, j)) <= tol) m(i, j) = 0.0;
    }
  }
  return m;
}

Eigen::MatrixXd unpermute_square(const Eigen::MatrixXd& adj,
                                 const std::vector<int>& row_perm) {
  Eigen::MatrixXd out(adj.rows(), adj.cols());
  for (int i = 0; i < adj.rows(); ++i) {
    for (int j = 0; j < adj.cols(); ++j) {
      out(row_perm[i], row_perm[j]) = adj(i, j);
    }
  }
  return out;
}

Eigen::MatrixXd unpermute_rows(const Eigen::MatrixXd& m,
                               const std::vector<int>& row_perm) {
  Eigen::MatrixXd out(m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i) out.row(row_perm[i]) = m.row(i);
  return out;
}

void fill_score(TrialScore* s, const MetricReport& r) {
  s->ok = true;
  s->f1 = r.f1;
  s->precision = r.precision;
  s->recall = r.recall;
  s->shd_per_edge = r.shd_per_edge;
}

TrialScore score_recovery(const RecoveryResult& res, const AnyModel& truth,
                          const std::vector<int>& row_perm, double thr,
                          long long cap) {
  const Candidate& cand = res.best[res.best_index];
  Eigen::MatrixXd adj =
      unpermute_square(apply_threshold(cand.recon.adjacency, thr), row_perm);
  TrialScore s;
  if (std::holds_alternative<SemMeModel>(truth)) {
    ClosestMember cm = closest_dog_member(adj, std::get<SemMeModel>(truth), cap);
    fill_score(&s, cm.report);
  } else {
    const SemUrModel& ur = std::get<SemUrModel>(truth);
    ClosestMember cm = closest_dog_member(adj, ur, cap);
    fill_score(&s, cm.report);
    Eigen::MatrixXd loads =
        unpermute_rows(apply_threshold(cand.recon.loadings, thr), row_perm);
    const SemUrModel& member = std::get<SemUrModel>(*cm.member);
    s.b_f1 = match_b_columns(loads, latent_loadings(member)).report.f1;
  }
  return s;
}

std::map<std::string, TrialScore> run_case1_trial(
    const ExperimentProtocol& proto, int size, int latent, double d,
    std::uint64_t seed) {
  GenConfig g;
  g.p_e = proto.p_e;
  g.signed_weights = proto.signed_weights;
  g.seed = seed;
  AnyModel truth{SemMeModel{}};
  MixingMatrix mix;
  if (proto.model_class == "me") {
    g.p = size;
    g.frac_unobserved = proto.frac_unobserved;
    SemMeModel m = gen_sem_me(g);
    mix = mixing_me(m);
    truth = m;
  } else {
    g.q = size;
    g.l = latent;
    SemUrModel m = gen_sem_ur(g);
    mix = mixing_ur(m);
    truth = m;
  }
  ShuffledMixing shuf = shuffle_mixing(mix, sub_seed(seed, 1));
  MixingMatrix noisy = perturb_mixing(shuf.mix, d, sub_seed(seed, 2));
  RecoverConfig rc;
  rc.edge_threshold = proto.edge_threshold;
  rc.class_cap = proto.class_cap;
  rc.workers = 1;

  std::map<std::string, TrialScore> out;
  try {
    RecoveryResult res = recover_dog(noisy, rc);
    out["dog"] = score_recovery(res, truth, shuf.row_perm,
                                proto.edge_threshold, proto.class_cap);
  } catch (const Error&) {
    out["dog"] = TrialScore{};
  }
  try {
    RecoveryResult res = recover_aog_baseline(
        noisy, static_cast<unsigned>(sub_seed(seed, 3)), rc);
    out["aog"] = score_recovery(res, truth, shuf.row_perm,
                                proto.edge_threshold, proto.class_cap);
  } catch (const Error&) {
    out["aog"] = TrialScore{};
  }
  return out;
}

std::map<std::string, TrialScore> run_case2_trial(
    const ExperimentProtocol& proto, int q, int l, double n_per_var,
    std::uint64_t seed) {
  GenConfig g;
  g.q = q;
  g.l = l;
  g.p_e = proto.p_e;
  g.signed_weights = proto.signed_weights;
  g.seed = seed;
  SemUrModel ur = gen_sem_ur(g);
  AnyModel truth = ur;
  int n = static_cast<int>(std::llround(n_per_var)) * q;
  DataMatrix data = sample_data(ur, n, sub_seed(seed, 1));

  IcaConfig ic = proto.ica;
  ic.kind = MixingKind::Ur;
  ic.n_sources = q + l;
  ic.seed = sub_seed(seed, 2);

  std::map<std::string, TrialScore> out;
  std::vector<int> ident(q);
  std::iota(ident.begin(), ident.end(), 0);
  RecoverConfig rc;
  rc.edge_threshold = proto.edge_threshold;
  rc.class_cap = proto.class_cap;
  rc.workers = 1;

  bool have_est = false;
  MixingMatrix est;
  try {
    BootstrapEstimate boot = bootstrap_estimate(data.values, ic, data.col_names);
    PrunedRecovery pick = recover_pruned(boot, ic, rc);
    est = pick.estimate;
    have_est = true;
    out["dog"] = score_recovery(pick.recovery, truth, ident,
                                proto.edge_threshold, proto.class_cap);
  } catch (const Error&) {
    out["dog"] = TrialScore{};
    out["aog"] = TrialScore{};
  }
  if (have_est) {
    try {
      RecoveryResult res = recover_aog_baseline(
          est, static_cast<unsigned>(sub_seed(seed, 3)), rc);
      out["aog"] = score_recovery(res, truth, ident, proto.edge_threshold,
                                  proto.class_cap);
    } catch (const Error&) {
      out["aog"] = TrialScore{};
    }
  }
  try {
    LingamResult lr = ica_lingam_baseline(data.values, ic);
    TrialScore s;
    fill_score(&s, structure_metrics(lr.b, observed_adjacency(ur)));
    out["lingam"] = s;
  } catch (const Error&) {
    out["lingam"] = TrialScore{};
  }
  return out;
}

std::string score_key(int size, const std::string& noise, int trial,
                      const std::string& method) {
  return std::to_string(size) + "|" + noise + "|" + std::to_string(trial) +
         "|" + method;
}

std::string trial_row(int size, const std::string& noise, int trial,
                      const std::string& method, const TrialScore& s) {
  std::ostringstream row;
  row << size << "," << noise << "," << trial << "," << method << ","
      << (s.ok ? "ok" : "fail");
  for (const std::string& m : kMetricNames) {
    row << "," << format_double(metric_value(s, m));
  }
  return row.str();
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(field);
  return out;
}

void load_finished_trials(const std::string& path,
                          std::map<std::string, TrialScore>* done) {
  std::ifstream in(path);
  if (!in) return;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f = split_csv(line);
    if (f.size() != 5 + kMetricNames.size()) continue;
    TrialScore s;
    s.ok = f[4] == "ok";
    s.f1 = std::stod(f[5]);
    s.precision = std::stod(f[6]);
    s.recall = std::stod(f[7]);
    s.shd_per_edge = std::stod(f[8]);
    s.b_f1 = std::stod(f[9]);
    (*done)[f[0] + "|" + f[1] + "|" + f[2] + "|" + f[3]] = s;
  }
}

}  // namespace

PrunedRecovery recover_pruned(const BootstrapEstimate& boot,
                              const IcaConfig& cfg, const RecoverConfig& rc,
                              const std::vector<double>& grid) {
  if (grid.empty()) throw Error("prune grid is empty");
  bool have = false;
  PrunedRecovery best;
  std::exception_ptr last;
  for (double thr : grid) {
    IcaConfig pc = cfg;
    pc.prune_threshold = thr;
    try {
      MixingMatrix est = prune_estimate(boot.mean, boot.std_dev, pc);
      RecoveryResult res = recover_dog(est, rc);
      if (!have || res.edge_count <= best.recovery.edge_count) {
        best.estimate = std::move(est);
        best.recovery = std::move(res);
        best.prune_threshold = thr;
        have = true;
      }
    } catch (const Error&) {
      last = std::current_exception();
    }
  }
  if (!have) std::rethrow_exception(last);
  return best;
}

ExperimentProtocol protocol_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("invalid protocol JSON: ") + e.what());
  }
  ExperimentProtocol p;
  p.case_name = j.value("case", std::string("case1"));
  if (p.case_name != "case1" && p.case_name != "case2") {
    throw Error("unknown experiment case: " + p.case_name);
  }
  p.model_class = j.value("model_class",
                          p.case_name == "case2" ? std::string("ur")
                                                 : std::string("me"));
  if (p.model_class != "me" && p.model_class != "ur") {
    throw Error("unknown model class: " + p.model_class);
  }
  if (j.contains("sizes")) p.sizes = j.at("sizes").get<std::vector<int>>();
  if (j.contains("latents")) p.latents = j.at("latents").get<std::vector<int>>();
  if (j.contains("noise_grid")) {
    p.noise_grid = j.at("noise_grid").get<std::vector<double>>();
  }
  p.trials = j.value("trials", 50);
  p.p_e = j.value("p_e", 0.4);
  p.frac_unobserved = j.value("frac_unobserved", 0.8);
  p.signed_weights = j.value("signed_weights", false);
  p.edge_threshold = j.value("edge_threshold", kEdgeThresholdNoisy);
  p.class_cap = j.value("class_cap", kClassCap);
  p.master_seed = j.value("seed", static_cast<std::uint64_t>(0));
  p.out_path = j.value("out", std::string());
  p.workers = j.value("workers", 0);
  if (j.contains("ica")) {
    const nlohmann::json& i = j.at("ica");
    p.ica.bootstrap_rounds = i.value("rounds", p.ica.bootstrap_rounds);
    p.ica.bootstrap_fraction = i.value("fraction", p.ica.bootstrap_fraction);
    p.ica.lambda = i.value("lambda", p.ica.lambda);
    p.ica.recon_weight = i.value("recon_weight", p.ica.recon_weight);
    p.ica.iterations = i.value("iterations", p.ica.iterations);
    p.ica.prune_threshold = i.value("prune_threshold", p.ica.prune_threshold);
    p.ica.confidence = i.value("confidence", p.ica.confidence);
    p.ica.hungarian_alignment = i.value("hungarian", p.ica.hungarian_alignment);
  }
  return p;
}

std::string results_to_csv(const ResultsTable& table) {
  std::ostringstream out;
  out << "method,model_class,size,noise_param,metric,mean,std,n_trials,"
         "n_failures\n";
  for (const ResultRow& r : table.rows) {
    out << r.method << "," << r.model_class << "," << r.size << ","
        << format_double(r.noise_param) << "," << r.metric << ","
        << format_double(r.mean) << "," << format_double(r.stddev) << ","
        << r.n_trials << "," << r.n_failures << "\n";
  }
  return out.str();
}

ResultsTable run_experiment(const ExperimentProtocol& proto_in) {
  ExperimentProtocol proto = proto_in;
  if (proto.case_name == "case2") proto.model_class = "ur";
  if (proto.sizes.empty()) throw Error("protocol lists no sizes");
  if (proto.noise_grid.empty()) throw Error("protocol lists no noise levels");
  if (proto.trials < 1) throw Error("protocol needs at least one trial");
  if (proto.latents.empty()) proto.latents.assign(proto.sizes.size(), 1);
  if (proto.latents.size() != proto.sizes.size()) {
    throw Error("latents must parallel sizes");
  }
  bool case2 = proto.case_name == "case2";
  std::vector<std::string> methods = {"dog", "aog"};
  if (case2) methods.push_back("lingam");
  int workers = proto.workers > 0 ? proto.workers : worker_count();

  std::map<std::string, TrialScore> done;
  std::string trials_path =
      proto.out_path.empty() ? std::string() : proto.out_path + ".trials.csv";
  if (!trials_path.empty()) load_finished_trials(trials_path, &done);
  std::ofstream trials_out;
  if (!trials_path.empty()) {
    bool fresh = !std::filesystem::exists(trials_path) || done.empty();
    trials_out.open(trials_path, fresh ? std::ios::trunc : std::ios::app);
    if (fresh) {
      trials_out << "size,noise_param,trial,method,status";
      for (const std::string& m : kMetricNames) trials_out << "," << m;
      trials_out << "\n";
    }
  }

  ResultsTable table;
  for (size_t si = 0; si < proto.sizes.size(); ++si) {
    int size = proto.sizes[si];
    int latent = proto.latents[si];
    for (size_t ni = 0; ni < proto.noise_grid.size(); ++ni) {
      double noise = proto.noise_grid[ni];
      std::string noise_str = format_double(noise);
      int cell = static_cast<int>(si * proto.noise_grid.size() + ni);

      std::vector<int> todo;
      for (int t = 0; t < proto.trials; ++t) {
        bool missing = false;
        for (const std::string& m : methods) {
          if (done.count(score_key(size, noise_str, t, m)) == 0) missing = true;
        }
        if (missing) todo.push_back(t);
      }
      std::vector<std::map<std::string, TrialScore>> fresh(todo.size());
      parallel_for(static_cast<int>(todo.size()), workers, [&](int i) {
        std::uint64_t seed = trial_seed(proto.master_seed, cell, todo[i]);
        fresh[i] = case2 ? run_case2_trial(proto, size, latent, noise, seed)
                         : run_case1_trial(proto, size, latent, noise, seed);
      });
      for (size_t i = 0; i < todo.size(); ++i) {
        for (const std::string& m : methods) {
          std::string key = score_key(size, noise_str, todo[i], m);
          if (done.count(key) > 0) continue;
          done[key] = fresh[i][m];
          if (trials_out.is_open()) {
            trials_out << trial_row(size, noise_str, todo[i], m, fresh[i][m])
                       << "\n";
            trials_out.flush();
          }
        }
      }

      for (const std::string& m : methods) {
        int failures = 0;
        std::map<std::string, std::vector<double>> values;
        for (int t = 0; t < proto.trials; ++t) {
          const TrialScore& s = done.at(score_key(size, noise_str, t, m));
          if (!s.ok) {
            ++failures;
            continue;
          }
          for (const std::string& name : kMetricNames) {
            double v = metric_value(s, name);
            if (std::isfinite(v)) values[name].push_back(v);
          }
        }
        for (const std::string& name : kMetricNames) {
          const std::vector<double>& vs = values[name];
          if (name == "b_f1" && vs.empty()) continue;
          ResultRow row;
          row.method = m;
          row.model_class = proto.model_class;
          row.size = size;
          row.noise_param = noise;
          row.metric = name;
          row.n_trials = static_cast<int>(vs.size());
          row.n_failures = failures;
          if (!vs.empty()) {
            double mean = std::accumulate(vs.begin(), vs.end(), 0.0) / vs.size();
            double var = 0.0;
            for (double v : vs) var += (v - mean) * (v - mean);
            row.mean = mean;
            row.stddev = vs.size() > 1 ? std::sqrt(var / (vs.size() - 1)) : 0.0;
          } else {
            row.mean = kNan;
            row.stddev = kNan;
          }
          table.rows.push_back(row);
        }
      }
    }
  }

  if (!proto.out_path.empty()) {
    write_file(proto.out_path, results_to_csv(table));
  }
  return table;
}

}  // namespace causamix
