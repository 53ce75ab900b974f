#include <CLI11.hpp>
#include <iostream>
#include <json.hpp>
#include <string>
#include <variant>
#include <vector>

#include "causamix/eval.hpp"
#include "causamix/faithfulness.hpp"
#include "causamix/grouping.hpp"
#include "causamix/ica.hpp"
#include "causamix/io.hpp"
#include "causamix/mapping.hpp"
#include "causamix/mixing.hpp"
#include "causamix/recovery.hpp"
#include "causamix/synth.hpp"

namespace {

using namespace causamix;

nlohmann::json report_to_json(const FaithfulnessReport& r) {
  nlohmann::json out;
  out["passed"] = r.passed;
  out["violations"] = nlohmann::json::array();
  for (const Violation& v : r.violations) {
    nlohmann::json jv;
    jv["part"] = v.part;
    jv["variable"] = v.variable;
    jv["partner"] = v.partner;
    jv["witnesses"] = v.witnesses;
    jv["witnesses2"] = v.witnesses2;
    jv["detail"] = v.detail;
    out["violations"].push_back(jv);
  }
  out["warnings"] = r.warnings;
  return out;
}

nlohmann::json metrics_to_json(const MetricReport& m) {
  nlohmann::json out;
  out["shd"] = m.shd;
  out["shd_per_edge"] = m.shd_per_edge;
  out["precision"] = m.precision;
  out["recall"] = m.recall;
  out["f1"] = m.f1;
  out["zero_true_edges"] = m.zero_true_edges;
  switch (m.mode) {
    case ComparisonMode::VsTruth: out["mode"] = "vs_truth"; break;
    case ComparisonMode::VsClosestDogMember:
      out["mode"] = "vs_closest_dog_member";
      break;
    case ComparisonMode::BMatrixMatched: out["mode"] = "b_matrix_matched"; break;
  }
  return out;
}

void emit(const nlohmann::json& j, const std::string& out_path) {
  std::string text = j.dump(2) + "\n";
  if (out_path.empty()) {
    std::cout << text;
  } else {
    write_file(out_path, text);
  }
}

struct GenArgs {
  std::string model_class = "me";
  GenConfig cfg;
  std::string out = "model.json";
  std::string mixing_path;
  std::string overall_path;
  std::string data_path;
  int samples = 1000;
  bool shuffle = false;
};

void run_gen(const GenArgs& a) {
  AnyModel model{SemMeModel{}};
  MixingMatrix mix;
  if (a.model_class == "me") {
    SemMeModel m = gen_sem_me(a.cfg);
    mix = mixing_me(m);
    model = m;
  } else {
    SemUrModel m = gen_sem_ur(a.cfg);
    mix = mixing_ur(m);
    model = m;
  }
  save_model(model, a.out);
  if (!a.overall_path.empty()) {
    if (a.model_class != "me") throw Error("--overall applies to me models");
    save_matrix(overall_mixing_me(std::get<SemMeModel>(model)), a.overall_path);
  }
  if (!a.mixing_path.empty()) {
    if (a.shuffle) {
      ShuffledMixing shuf = shuffle_mixing(mix, a.cfg.seed);
      save_matrix(shuf.mix, a.mixing_path);
      nlohmann::json perms;
      perms["row_perm"] = shuf.row_perm;
      perms["col_perm"] = shuf.col_perm;
      write_file(a.mixing_path + ".perm.json", perms.dump(2) + "\n");
    } else {
      save_matrix(mix, a.mixing_path);
    }
  }
  if (!a.data_path.empty()) {
    DataMatrix data =
        a.model_class == "me"
            ? sample_data(std::get<SemMeModel>(model), a.samples, a.cfg.seed)
            : sample_data(std::get<SemUrModel>(model), a.samples, a.cfg.seed);
    save_data(data.values, data.col_names, a.data_path);
  }
  std::cout << "wrote " << a.out << "\n";
}

struct RecoverArgs {
  std::string input;
  std::string model_class = "me";
  RecoverConfig cfg;
  std::string baseline;
  unsigned seed = 0;
  std::string out;
};

void run_recover(const RecoverArgs& a) {
  MixingKind kind = a.model_class == "me" ? MixingKind::Me : MixingKind::Ur;
  MixingMatrix mix = load_matrix(a.input, kind);
  RecoveryResult res;
  if (a.baseline.empty()) {
    res = recover_dog(mix, a.cfg);
  } else if (a.baseline == "aog") {
    res = recover_aog_baseline(mix, a.seed, a.cfg);
  } else {
    throw Error("unknown baseline: " + a.baseline);
  }
  const Candidate& best = res.best[res.best_index];

  nlohmann::json summary;
  summary["edge_count"] = res.edge_count;
  summary["minimizers"] = res.best.size();
  summary["prune_worst"] = res.prune_worst;
  summary["edge_threshold"] = res.edge_threshold;
  summary["groups"] = nlohmann::json::array();
  for (const Group& g : res.grouping.groups) {
    summary["groups"].push_back(g.members);
  }
  summary["centers"] = best.centers;
  summary["has_model"] = best.model.has_value();
  if (!a.out.empty()) {
    if (best.model) save_model(*best.model, a.out + ".model.json");
    write_file(a.out + ".summary.json", summary.dump(2) + "\n");
  }
  std::cout << summary.dump(2) << "\n";
}

struct AuditArgs {
  std::string input;
  int cap = kSubsetCap;
  bool bottleneck = false;
  int bottleneck_cap = kBottleneckCap;
  std::string out;
};

void run_audit(const AuditArgs& a) {
  AnyModel model = load_model(a.input);
  FaithfulnessReport report;
  if (std::holds_alternative<SemMeModel>(model)) {
    if (a.bottleneck) throw Error("--bottleneck applies to ur models");
    report = check_faithfulness(std::get<SemMeModel>(model), a.cap);
  } else {
    const SemUrModel& ur = std::get<SemUrModel>(model);
    report = check_faithfulness(ur, a.cap);
    if (a.bottleneck) {
      report = merge(report, check_bottleneck_faithfulness(ur, a.bottleneck_cap));
    }
  }
  emit(report_to_json(report), a.out);
}

struct MapArgs {
  std::string input;
  std::string choice;
  std::string out;
  bool verify = false;
};

void run_map(const MapArgs& a) {
  AnyModel model = load_model(a.input);
  if (std::holds_alternative<SemUrModel>(model)) {
    const SemUrModel& ur = std::get<SemUrModel>(model);
    if (a.choice.empty()) {
      throw Error("mapping a ur model needs --choice (one bit per non-root "
                  "observed node, ascending; 1 = unobserved)");
    }
    SemMeModel me =
        map_ur_to_me(ur, ObservabilityChoice::from_bitstring(a.choice));
    if (!a.out.empty()) save_model(AnyModel{me}, a.out);
    if (a.verify) {
      TransposeMatch match = verify_transpose(ur, me);
      nlohmann::json j;
      j["permutation_me"] = match.permutation_me;
      j["permutation_ur"] = match.permutation_ur;
      std::cout << j.dump(2) << "\n";
    } else if (a.out.empty()) {
      std::cout << model_to_json(AnyModel{me}) << "\n";
    }
  } else {
    if (!a.choice.empty()) {
      throw Error("--choice applies to ur inputs; the reverse direction is "
                  "determined by the model");
    }
    SemUrModel ur = map_me_to_ur(std::get<SemMeModel>(model));
    if (!a.out.empty()) {
      save_model(AnyModel{ur}, a.out);
    } else {
      std::cout << model_to_json(AnyModel{ur}) << "\n";
    }
  }
}

struct IcaArgs {
  std::string input;
  IcaConfig cfg;
  std::string kind = "ur";
  std::string out = "mixing_mean.csv";
  std::string std_out;
  std::string pruned_out;
};

void run_ica(const IcaArgs& a) {
  Eigen::MatrixXd data = load_data(a.input);
  IcaConfig cfg = a.cfg;
  cfg.kind = a.kind == "ur" ? MixingKind::Ur : MixingKind::Overall;
  BootstrapEstimate est = bootstrap_estimate(data, cfg);
  save_matrix(est.mean, a.out);
  if (!a.std_out.empty()) {
    MixingMatrix sd = est.mean;
    sd.values = est.std_dev;
    save_matrix(sd, a.std_out);
  }
  if (!a.pruned_out.empty()) {
    save_matrix(prune_estimate(est.mean, est.std_dev, cfg), a.pruned_out);
  }
  for (const std::string& w : est.warnings) std::cerr << "warning: " << w << "\n";
  std::cout << "wrote " << a.out << "\n";
}

struct EvalArgs {
  std::string recovered;
  std::string truth;
  bool closest = false;
  long long cap = kClassCap;
  std::string out;
};

void run_eval(const EvalArgs& a) {
  AnyModel rec = load_model(a.recovered);
  AnyModel truth = load_model(a.truth);
  nlohmann::json j;
  if (a.closest) {
    ClosestMember cm = closest_dog_member(rec, truth, a.cap);
    j = metrics_to_json(cm.report);
    j["member_index"] = cm.index;
    j["distance"] = cm.distance;
    if (std::holds_alternative<SemUrModel>(rec)) {
      BMatch bm = match_b_columns(
          latent_loadings(std::get<SemUrModel>(rec)),
          latent_loadings(std::get<SemUrModel>(*cm.member)));
      j["b"] = metrics_to_json(bm.report);
    }
  } else {
    if (std::holds_alternative<SemMeModel>(rec) !=
        std::holds_alternative<SemMeModel>(truth)) {
      throw Error("model classes differ");
    }
    if (std::holds_alternative<SemMeModel>(rec)) {
      j = metrics_to_json(
          structure_metrics(underlying_adjacency(std::get<SemMeModel>(rec)),
                            underlying_adjacency(std::get<SemMeModel>(truth))));
    } else {
      const SemUrModel& r = std::get<SemUrModel>(rec);
      const SemUrModel& t = std::get<SemUrModel>(truth);
      j = metrics_to_json(
          structure_metrics(observed_adjacency(r), observed_adjacency(t)));
      BMatch bm = match_b_columns(latent_loadings(r), latent_loadings(t));
      j["b"] = metrics_to_json(bm.report);
    }
  }
  emit(j, a.out);
}

struct BenchArgs {
  std::string protocol;
  std::string out;
  int workers = -1;
  long long seed = -1;
};

void run_bench(const BenchArgs& a) {
  ExperimentProtocol proto = protocol_from_json(read_file(a.protocol));
  if (!a.out.empty()) proto.out_path = a.out;
  if (a.workers >= 0) proto.workers = a.workers;
  if (a.seed >= 0) proto.master_seed = static_cast<std::uint64_t>(a.seed);
  ResultsTable table = run_experiment(proto);
  if (proto.out_path.empty()) {
    std::cout << results_to_csv(table);
  } else {
    std::cout << "wrote " << proto.out_path << " ("
              << table.rows.size() << " rows)\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"causal discovery for linear models with measurement error "
               "or unobserved root causes"};
  app.require_subcommand(1);

  GenArgs gen;
  CLI::App* sub_gen = app.add_subcommand("gen", "generate a random model");
  sub_gen->add_option("--model-class", gen.model_class, "me or ur")
      ->check(CLI::IsMember({"me", "ur"}));
  sub_gen->add_option("--p", gen.cfg.p, "underlying variable count (me)");
  sub_gen->add_option("--q", gen.cfg.q, "observed count (ur)");
  sub_gen->add_option("--l", gen.cfg.l, "latent count (ur)");
  sub_gen->add_option("--p-e", gen.cfg.p_e, "edge probability");
  sub_gen->add_option("--frac-unobserved", gen.cfg.frac_unobserved,
                      "share of unobserved underlying variables (me)");
  sub_gen->add_option("--weight-low", gen.cfg.weight_low);
  sub_gen->add_option("--weight-high", gen.cfg.weight_high);
  sub_gen->add_flag("--signed", gen.cfg.signed_weights,
                    "random sign on each weight");
  sub_gen->add_option("--seed", gen.cfg.seed);
  sub_gen->add_option("--out", gen.out, "model JSON path");
  sub_gen->add_option("--mixing", gen.mixing_path, "mixing matrix CSV path");
  sub_gen->add_option("--overall", gen.overall_path,
                      "overall (noise-to-observation) matrix CSV path (me)");
  sub_gen->add_option("--data", gen.data_path, "sampled data CSV path");
  sub_gen->add_option("--samples", gen.samples, "rows for --data");
  sub_gen->add_flag("--shuffle", gen.shuffle,
                    "permute mixing rows/columns (permutation saved alongside)");
  sub_gen->callback([&] { run_gen(gen); });

  RecoverArgs rec;
  CLI::App* sub_rec =
      app.add_subcommand("recover", "recover a structure from a mixing matrix");
  sub_rec->add_option("--input", rec.input, "mixing matrix CSV")->required();
  sub_rec->add_option("--model-class", rec.model_class, "me or ur")
      ->check(CLI::IsMember({"me", "ur"}));
  sub_rec->add_option("--edge-threshold", rec.cfg.edge_threshold);
  sub_rec->add_option("--class-cap", rec.cfg.class_cap);
  sub_rec->add_option("--baseline", rec.baseline,
                      "aog: score one random center assignment instead");
  sub_rec->add_option("--seed", rec.seed, "baseline center seed");
  sub_rec->add_option("--out", rec.out,
                      "prefix for .model.json and .summary.json");
  sub_rec->callback([&] { run_recover(rec); });

  AuditArgs audit;
  CLI::App* sub_audit =
      app.add_subcommand("audit", "check the faithfulness assumptions");
  sub_audit->add_option("--input", audit.input, "model JSON")->required();
  sub_audit->add_option("--cap", audit.cap, "subset size cap");
  sub_audit->add_flag("--bottleneck", audit.bottleneck,
                      "also check rank vs vertex bottlenecks (ur)");
  sub_audit->add_option("--bottleneck-cap", audit.bottleneck_cap);
  sub_audit->add_option("--out", audit.out, "report JSON path");
  sub_audit->callback([&] { run_audit(audit); });

  MapArgs map_args;
  CLI::App* sub_map =
      app.add_subcommand("map", "convert between the two model classes");
  sub_map->add_option("--input", map_args.input, "model JSON")->required();
  sub_map->add_option("--choice", map_args.choice,
                      "observability bit per non-root observed node (1 = "
                      "unobserved), ur inputs only");
  sub_map->add_option("--out", map_args.out, "converted model JSON path");
  sub_map->add_flag("--verify", map_args.verify,
                    "verify the transpose relation of the mapped pair");
  sub_map->callback([&] { run_map(map_args); });

  IcaArgs ica;
  CLI::App* sub_ica =
      app.add_subcommand("ica", "estimate a mixing matrix from data");
  sub_ica->add_option("--input", ica.input, "data CSV (rows = samples)")
      ->required();
  sub_ica->add_option("--n-sources", ica.cfg.n_sources, "source count")
      ->required();
  sub_ica->add_option("--rounds", ica.cfg.bootstrap_rounds);
  sub_ica->add_option("--fraction", ica.cfg.bootstrap_fraction);
  sub_ica->add_option("--lambda", ica.cfg.lambda, "sparsity weight");
  sub_ica->add_option("--recon-weight", ica.cfg.recon_weight);
  sub_ica->add_option("--iterations", ica.cfg.iterations);
  sub_ica->add_option("--prune-threshold", ica.cfg.prune_threshold);
  sub_ica->add_option("--confidence", ica.cfg.confidence);
  sub_ica->add_flag("--hungarian", ica.cfg.hungarian_alignment,
                    "exact column alignment");
  sub_ica->add_option("--kind", ica.kind, "ur or me (overall estimate)")
      ->check(CLI::IsMember({"ur", "me"}));
  sub_ica->add_option("--seed", ica.cfg.seed);
  sub_ica->add_option("--out", ica.out, "mean estimate CSV");
  sub_ica->add_option("--std-out", ica.std_out, "per-entry std CSV");
  sub_ica->add_option("--pruned-out", ica.pruned_out, "pruned estimate CSV");
  sub_ica->callback([&] { run_ica(ica); });

  EvalArgs eval;
  CLI::App* sub_eval = app.add_subcommand("eval", "score one model against another");
  sub_eval->add_option("--recovered", eval.recovered, "model JSON")->required();
  sub_eval->add_option("--truth", eval.truth, "model JSON")->required();
  sub_eval->add_flag("--closest", eval.closest,
                     "compare with the nearest member of the truth's class");
  sub_eval->add_option("--cap", eval.cap, "class enumeration cap");
  sub_eval->add_option("--out", eval.out, "metrics JSON path");
  sub_eval->callback([&] { run_eval(eval); });

  BenchArgs bench;
  CLI::App* sub_bench =
      app.add_subcommand("bench", "run an experiment protocol");
  sub_bench->add_option("--protocol", bench.protocol, "protocol JSON")
      ->required();
  sub_bench->add_option("--out", bench.out, "aggregate CSV path (overrides "
                                            "the protocol)");
  sub_bench->add_option("--workers", bench.workers);
  sub_bench->add_option("--seed", bench.seed, "master seed override");
  sub_bench->callback([&] { run_bench(bench); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
