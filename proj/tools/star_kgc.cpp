// Command-line driver: training, evaluation, baselines, ensembling.
//
// Exit codes: 0 success; 1 argument error; 2 missing/unreadable file;
// 3 configuration conflict; 4 runtime failure (including gradcheck fail).
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "star/checkpoint.hpp"
#include "star/ensemble.hpp"
#include "star/eval.hpp"
#include "star/training.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace star;

namespace {

constexpr int kExitArgs = 1;
constexpr int kExitMissingFile = 2;
constexpr int kExitConfig = 3;
constexpr int kExitRuntime = 4;

struct DataArgs {
  std::string dir, train, dev, test, entity_text, relation_text;
  void add_to(CLI::App* cmd) {
    cmd->add_option("--data-dir", dir,
                    "directory holding train.tsv/dev.tsv/test.tsv/"
                    "entity2text.tsv/relation2text.tsv");
    cmd->add_option("--train-file", train);
    cmd->add_option("--dev-file", dev);
    cmd->add_option("--test-file", test);
    cmd->add_option("--entity-text", entity_text);
    cmd->add_option("--relation-text", relation_text);
  }
  KnowledgeGraph load(LoadReport* rep = nullptr) const {
    std::string tr = train, dv = dev, te = test, et = entity_text,
                rt = relation_text;
    if (!dir.empty()) {
      if (tr.empty()) tr = dir + "/train.tsv";
      if (dv.empty()) dv = dir + "/dev.tsv";
      if (te.empty()) te = dir + "/test.tsv";
      if (et.empty()) et = dir + "/entity2text.tsv";
      if (rt.empty()) rt = dir + "/relation2text.tsv";
    }
    if (tr.empty() || dv.empty() || te.empty())
      throw CLI::ValidationError("--data-dir or explicit split files required");
    return load_graph(tr, dv, te, et, rt, rep);
  }
};

uint64_t resolve_seed(uint64_t flag_seed, bool flag_given) {
  if (flag_given) return flag_seed;
  if (const char* env = std::getenv("STAR_KGC_SEED")) return std::stoull(env);
  return flag_seed;
}

void write_manifest(const std::string& out_dir, const std::string& subcommand,
                    const ordered_json& config) {
  fs::create_directories(out_dir);
  ordered_json m;
  m["subcommand"] = subcommand;
  m["config"] = config;
  auto now = std::chrono::system_clock::now();
  m["timestamp_unix"] =
      std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch())
          .count();
  std::ofstream os(out_dir + "/manifest.json");
  os << m.dump(2) << "\n";
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << content;
}

// Entity representation container ("SKER"): d, n, column-major doubles.
void save_reps(const std::string& path, const std::vector<Eigen::VectorXd>& reps) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path);
  os.write("SKER", 4);
  uint64_t d = reps.empty() ? 0 : static_cast<uint64_t>(reps[0].size());
  uint64_t n = reps.size();
  os.write(reinterpret_cast<const char*>(&d), 8);
  os.write(reinterpret_cast<const char*>(&n), 8);
  for (const auto& r : reps)
    os.write(reinterpret_cast<const char*>(r.data()),
             static_cast<std::streamsize>(8 * d));
}

std::vector<Eigen::VectorXd> load_reps(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot read " + path);
  char magic[4];
  is.read(magic, 4);
  if (std::string(magic, 4) != "SKER")
    throw std::runtime_error("bad entity-reps magic: " + path);
  uint64_t d, n;
  is.read(reinterpret_cast<char*>(&d), 8);
  is.read(reinterpret_cast<char*>(&n), 8);
  std::vector<Eigen::VectorXd> reps(n);
  for (auto& r : reps) {
    r.resize(static_cast<Eigen::Index>(d));
    is.read(reinterpret_cast<char*>(r.data()), static_cast<std::streamsize>(8 * d));
  }
  if (!is) throw std::runtime_error("truncated entity reps: " + path);
  return reps;
}

void write_rank_records(const std::string& path,
                        const std::vector<RankRecord>& records,
                        const KnowledgeGraph& kg) {
  std::ofstream os(path);
  for (const RankRecord& r : records) {
    ordered_json j;
    j["query_index"] = r.query.query_index;
    j["head"] = kg.entity_keys[r.query.source.head];
    j["relation"] = kg.relation_keys[r.query.source.rel];
    j["tail"] = kg.entity_keys[r.query.source.tail];
    j["direction"] =
        r.query.dir == Direction::PredictTail ? "predict-tail" : "predict-head";
    j["rank"] = r.rank;
    j["gold_score"] = r.gold_score;
    ordered_json top = ordered_json::array();
    for (const auto& [e, s] : r.top_k)
      top.push_back({{"entity", kg.entity_keys[e]}, {"score", s}});
    j["top_k"] = top;
    os << j.dump() << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "desk-scale knowledge-graph completion: Siamese text encoder with "
      "structure-augmented scoring, geometric baselines, and a self-adaptive "
      "ensemble.\n"
      "Exit codes: 0 ok, 1 argument error, 2 missing file, 3 config "
      "conflict, 4 runtime failure."};
  app.require_subcommand(1);

  uint64_t seed = 42;
  bool seed_given = false;
  app.add_option("--seed", seed, "global seed (env STAR_KGC_SEED; flag wins)")
      ->each([&](const std::string&) { seed_given = true; });
  std::string out_dir = "out";
  app.add_option("--out", out_dir, "output directory");
  int jobs = static_cast<int>(std::thread::hardware_concurrency());
  app.add_option("--jobs", jobs, "evaluation parallelism");

  // ---- train ----
  auto* cmd_train = app.add_subcommand("train", "fine-tune the Siamese text model");
  DataArgs train_data;
  train_data.add_to(cmd_train);
  EncoderConfig enc_cfg;
  TrainConfig train_cfg;
  std::string distance = "negl2";
  bool no_dev_hits = false;
  cmd_train->add_option("--d-h", enc_cfg.d_h);
  cmd_train->add_option("--layers", enc_cfg.n_layers);
  cmd_train->add_option("--heads", enc_cfg.n_heads);
  cmd_train->add_option("--d-ff", enc_cfg.d_ff);
  cmd_train->add_option("--max-len-hr", enc_cfg.max_len_hr);
  cmd_train->add_option("--max-len-t", enc_cfg.max_len_t);
  cmd_train->add_option("--epochs", train_cfg.epochs);
  cmd_train->add_option("--batch-size", train_cfg.batch_size);
  cmd_train->add_option("--negatives", train_cfg.n_negatives);
  cmd_train->add_option("--margin", train_cfg.margin);
  cmd_train->add_option("--gamma", train_cfg.gamma);
  cmd_train->add_option("--lr", train_cfg.learning_rate);
  cmd_train->add_option("--dropout", train_cfg.dropout);
  cmd_train->add_option("--distance", distance)
      ->check(CLI::IsMember({"negl2", "bilinear", "cosine"}));
  cmd_train->add_flag("--no-dev-hits", no_dev_hits,
                      "skip the per-epoch dev Hits@10 pass");

  // ---- eval ----
  auto* cmd_eval = app.add_subcommand("eval", "ranked link-prediction evaluation");
  DataArgs eval_data;
  eval_data.add_to(cmd_eval);
  std::string eval_model, eval_geo, basis = "sc", eval_scorer = "star";
  std::string eval_split = "test", eval_direction = "both";
  std::string scores_out, ranks_out;
  bool no_self_loop = false, no_cache = false;
  cmd_eval->add_option("--model", eval_model, "star checkpoint");
  cmd_eval->add_option("--geo", eval_geo, "geometric checkpoint");
  cmd_eval->add_option("--scorer", eval_scorer)
      ->check(CLI::IsMember({"star", "cross", "geo"}));
  cmd_eval->add_option("--ranking-basis", basis)
      ->check(CLI::IsMember({"sc", "sd", "sum", "prod"}));
  cmd_eval->add_option("--distance", distance)
      ->check(CLI::IsMember({"negl2", "bilinear", "cosine"}));
  cmd_eval->add_option("--split", eval_split)->check(CLI::IsMember({"test", "dev"}));
  cmd_eval->add_option("--direction", eval_direction)
      ->check(CLI::IsMember({"both", "tail", "head"}));
  cmd_eval->add_flag("--no-self-loop-filter", no_self_loop);
  cmd_eval->add_flag("--no-cache", no_cache,
                     "re-encode candidates per query instead of caching");
  cmd_eval->add_option("--scores", scores_out, "score-matrix output path");
  cmd_eval->add_option("--ranks", ranks_out, "rank-record JSONL output path");

  // ---- train-geo ----
  auto* cmd_geo = app.add_subcommand("train-geo", "train a geometric baseline");
  DataArgs geo_data;
  geo_data.add_to(cmd_geo);
  GeoConfig geo_cfg;
  std::string geo_kind = "transe";
  cmd_geo->add_option("--kind", geo_kind)->check(CLI::IsMember({"transe", "rotate"}));
  cmd_geo->add_option("--d-g", geo_cfg.d_g);
  cmd_geo->add_option("--margin", geo_cfg.margin);
  cmd_geo->add_option("--lr", geo_cfg.learning_rate);
  cmd_geo->add_option("--epochs", geo_cfg.epochs);
  cmd_geo->add_option("--negatives", geo_cfg.n_negatives);
  cmd_geo->add_option("--p-norm", geo_cfg.p_norm)->check(CLI::IsMember({1, 2}));

  // ---- precompute ----
  auto* cmd_pre = app.add_subcommand("precompute", "cache entity representations");
  DataArgs pre_data;
  pre_data.add_to(cmd_pre);
  std::string pre_model;
  cmd_pre->add_option("--model", pre_model, "star checkpoint")->required();

  // ---- ensemble-train / ensemble-eval ----
  auto* cmd_et = app.add_subcommand("ensemble-train", "fit the blend-weight MLP");
  auto* cmd_ee = app.add_subcommand("ensemble-eval", "evaluate blended rankings");
  DataArgs et_data, ee_data;
  et_data.add_to(cmd_et);
  ee_data.add_to(cmd_ee);
  EnsembleConfig ens_cfg;
  std::string star_scores, geo_scores, reps_path, alpha_path;
  double fixed_alpha = -1.0;
  for (auto* cmd : {cmd_et, cmd_ee}) {
    cmd->add_option("--star-scores", star_scores)->required();
    cmd->add_option("--geo-scores", geo_scores)->required();
    cmd->add_option("--reps", reps_path)->required();
    cmd->add_option("--k", ens_cfg.k);
    cmd->add_option("--m-sim", ens_cfg.m_sim);
  }
  cmd_et->add_option("--margin", ens_cfg.margin);
  cmd_et->add_option("--lr", ens_cfg.learning_rate);
  cmd_et->add_option("--epochs", ens_cfg.epochs);
  cmd_et->add_option("--negatives", ens_cfg.n_negatives);
  cmd_et->add_option("--hidden", ens_cfg.hidden);
  cmd_ee->add_option("--alpha", alpha_path, "trained blend-weight checkpoint");
  cmd_ee->add_option("--fixed-alpha", fixed_alpha, "bypass the MLP");

  // ---- probe ----
  auto* cmd_probe = app.add_subcommand("probe", "inductive dataset surgery");
  DataArgs probe_data;
  probe_data.add_to(cmd_probe);
  int probe_kind = 1, n_removed = 10;
  cmd_probe->add_option("--probe", probe_kind)->check(CLI::IsMember({1, 2, 3}));
  cmd_probe->add_option("--n-removed", n_removed, "probe 2 only");

  // ---- cost-report ----
  auto* cmd_cost = app.add_subcommand("cost-report", "quadratic cost model");
  double cL = 64, cE = 100, cR = 5, cQ = -1;
  cmd_cost->add_option("--L", cL);
  cmd_cost->add_option("--entities", cE);
  cmd_cost->add_option("--relations", cR);
  cmd_cost->add_option("--queries", cQ, "query count; omit for whole graph");

  // ---- gradcheck ----
  auto* cmd_grad = app.add_subcommand("gradcheck", "finite-difference audit");
  DataArgs grad_data;
  grad_data.add_to(cmd_grad);
  int grad_coords = 200;
  double grad_eps = 1e-5;
  cmd_grad->add_option("--coords", grad_coords);
  cmd_grad->add_option("--eps", grad_eps);
  cmd_grad->add_option("--d-h", enc_cfg.d_h);
  cmd_grad->add_option("--layers", enc_cfg.n_layers);

  CLI11_PARSE(app, argc, argv);
  seed = resolve_seed(seed, seed_given);
  enc_cfg.seed = seed;
  train_cfg.seed = seed;
  geo_cfg.seed = seed;
  ens_cfg.seed = seed;
  train_cfg.metric = parse_distance_metric(distance);
  geo_cfg.kind = parse_geo_kind(geo_kind);

  try {
    if (cmd_train->parsed()) {
      KnowledgeGraph kg = train_data.load();
      ordered_json cfg_json{{"seed", seed},
                            {"d_h", enc_cfg.d_h},
                            {"layers", enc_cfg.n_layers},
                            {"heads", enc_cfg.n_heads},
                            {"d_ff", enc_cfg.d_ff},
                            {"epochs", train_cfg.epochs},
                            {"batch_size", train_cfg.batch_size},
                            {"negatives", train_cfg.n_negatives},
                            {"margin", train_cfg.margin},
                            {"gamma", train_cfg.gamma},
                            {"lr", train_cfg.learning_rate},
                            {"dropout", train_cfg.dropout},
                            {"distance", distance}};
      write_manifest(out_dir, "train", cfg_json);
      std::ofstream log(out_dir + "/train_log.jsonl");
      DevMetric dev_metric = nullptr;
      if (!no_dev_hits)
        dev_metric = [&](StarModel& m) {
          StarScorer scorer(m, RankingBasis::SC, train_cfg.metric, true);
          EvalOptions o;
          o.seed = seed;
          o.jobs = jobs;
          return evaluate(scorer, kg, kg.dev, o).report.overall.hits10;
        };
      StarModel model = train_star(
          kg, enc_cfg, train_cfg,
          [&](const EpochLog& l, StarModel& m) {
            ordered_json j{{"epoch", l.epoch},
                           {"loss_c", l.loss_c},
                           {"loss_d", l.loss_d}};
            if (l.dev_hits10 >= 0.0) j["dev_hits10"] = l.dev_hits10;
            log << j.dump() << "\n";
            log.flush();
            std::cerr << j.dump() << "\n";
            save_star_model(out_dir + "/star.ckpt", m);
          },
          dev_metric);
      save_star_model(out_dir + "/star.ckpt", model);
      std::cout << "wrote " << out_dir << "/star.ckpt\n";
    } else if (cmd_eval->parsed()) {
      KnowledgeGraph kg = eval_data.load();
      EvalOptions opts;
      opts.self_loop_filter = !no_self_loop;
      opts.use_cache = !no_cache;
      opts.seed = seed;
      opts.jobs = jobs;
      if (eval_direction == "tail") opts.direction = Direction::PredictTail;
      if (eval_direction == "head") opts.direction = Direction::PredictHead;
      const std::vector<Triple>& split = eval_split == "dev" ? kg.dev : kg.test;

      std::unique_ptr<Scorer> scorer;
      StarModel model;
      GeoEmbeddings geo;
      if (eval_scorer == "geo") {
        if (eval_geo.empty())
          throw CLI::ValidationError("--scorer geo requires --geo");
        geo = load_geo(eval_geo);
        scorer = std::make_unique<GeoScorer>(geo);
      } else {
        if (eval_model.empty())
          throw CLI::ValidationError("--scorer star/cross requires --model");
        model = load_star_model(eval_model);
        if (eval_scorer == "cross")
          scorer = std::make_unique<CrossScorer>(model);
        else
          scorer = std::make_unique<StarScorer>(model, parse_ranking_basis(basis),
                                                parse_distance_metric(distance),
                                                opts.use_cache);
      }
      write_manifest(out_dir, "eval",
                     ordered_json{{"seed", seed},
                                  {"scorer", eval_scorer},
                                  {"ranking_basis", basis},
                                  {"distance", distance},
                                  {"split", eval_split},
                                  {"direction", eval_direction},
                                  {"self_loop_filter", opts.self_loop_filter},
                                  {"use_cache", opts.use_cache}});
      EvalResult res = evaluate(*scorer, kg, split, opts);
      std::string js = res.report.to_json(&kg);
      write_text(out_dir + "/metrics.json", js + "\n");
      std::cout << js << "\n";
      if (!scores_out.empty()) save_score_matrix(scores_out, res.matrix);
      if (!ranks_out.empty()) write_rank_records(ranks_out, res.records, kg);
    } else if (cmd_geo->parsed()) {
      KnowledgeGraph kg = geo_data.load();
      write_manifest(out_dir, "train-geo",
                     ordered_json{{"seed", seed},
                                  {"kind", geo_kind},
                                  {"d_g", geo_cfg.d_g},
                                  {"margin", geo_cfg.margin},
                                  {"lr", geo_cfg.learning_rate},
                                  {"epochs", geo_cfg.epochs},
                                  {"negatives", geo_cfg.n_negatives},
                                  {"p_norm", geo_cfg.p_norm}});
      std::ofstream log(out_dir + "/geo_log.jsonl");
      GeoEmbeddings g = train_geo(kg, geo_cfg, [&](const GeoEpochLog& l) {
        log << ordered_json{{"epoch", l.epoch}, {"loss", l.loss}}.dump() << "\n";
      });
      save_geo(out_dir + "/geo.ckpt", g);
      std::cout << "wrote " << out_dir << "/geo.ckpt\n";
    } else if (cmd_pre->parsed()) {
      KnowledgeGraph kg = pre_data.load();
      StarModel model = load_star_model(pre_model);
      write_manifest(out_dir, "precompute",
                     ordered_json{{"seed", seed}, {"model", pre_model}});
      EntityRepCache cache;
      CostCounter cost;
      precompute_entity_reps(model, kg, cache, &cost);
      save_reps(out_dir + "/entity_reps.bin", cache.reps);
      std::cout << "wrote " << out_dir << "/entity_reps.bin ("
                << cost.siamese_calls.load() << " encoder calls)\n";
    } else if (cmd_et->parsed()) {
      KnowledgeGraph kg = et_data.load();
      ScoreMatrix sm = load_score_matrix(star_scores);
      ScoreMatrix gm = load_score_matrix(geo_scores);
      std::vector<Eigen::VectorXd> reps = load_reps(reps_path);
      write_manifest(out_dir, "ensemble-train",
                     ordered_json{{"seed", seed},
                                  {"k", ens_cfg.k},
                                  {"margin", ens_cfg.margin},
                                  {"lr", ens_cfg.learning_rate},
                                  {"epochs", ens_cfg.epochs},
                                  {"negatives", ens_cfg.n_negatives},
                                  {"m_sim", ens_cfg.m_sim},
                                  {"hidden", ens_cfg.hidden}});
      EnsembleTrainReport rep;
      AlphaParams alpha = train_ensemble(kg, sm, gm, reps, ens_cfg, &rep);
      save_alpha(out_dir + "/alpha.ckpt", alpha, ens_cfg.hidden);
      ordered_json j{{"used_queries", rep.used_queries},
                     {"skipped_gold_outside_topk", rep.skipped_gold_outside_topk},
                     {"skipped_unseen", rep.skipped_unseen},
                     {"final_loss", rep.final_loss}};
      write_text(out_dir + "/ensemble_train_report.json", j.dump(2) + "\n");
      std::cout << j.dump(2) << "\n";
    } else if (cmd_ee->parsed()) {
      KnowledgeGraph kg = ee_data.load();
      ScoreMatrix sm = load_score_matrix(star_scores);
      ScoreMatrix gm = load_score_matrix(geo_scores);
      if (sm.blocks.size() != gm.blocks.size())
        throw CLI::ValidationError("score matrices cover different query sets");
      std::vector<Eigen::VectorXd> reps = load_reps(reps_path);
      AlphaParams alpha;
      const AlphaParams* alpha_ptr = nullptr;
      if (fixed_alpha >= 0.0) {
        ens_cfg.mode = EnsembleMode::FixedAlpha;
        ens_cfg.fixed_alpha = fixed_alpha;
      } else if (!alpha_path.empty()) {
        alpha = load_alpha(alpha_path);
        alpha_ptr = &alpha;
      } else {
        throw CLI::ValidationError("need --alpha or --fixed-alpha");
      }
      write_manifest(out_dir, "ensemble-eval",
                     ordered_json{{"seed", seed},
                                  {"k", ens_cfg.k},
                                  {"fixed_alpha", fixed_alpha},
                                  {"alpha", alpha_path}});
      std::vector<int> ranks;
      for (size_t i = 0; i < sm.blocks.size(); ++i) {
        std::mt19937_64 rng(seed + i);
        ranks.push_back(ensemble_rerank(kg, sm.blocks[i], gm.blocks[i],
                                        alpha_ptr, reps, ens_cfg, rng)
                            .gold_rank);
      }
      MetricsCore m = metrics_from_ranks(ranks);
      ordered_json j{{"n", m.n},       {"mr", m.mr},       {"mrr", m.mrr},
                     {"hits1", m.hits1}, {"hits3", m.hits3}, {"hits10", m.hits10}};
      write_text(out_dir + "/ensemble_metrics.json", j.dump(2) + "\n");
      std::cout << j.dump(2) << "\n";
    } else if (cmd_probe->parsed()) {
      KnowledgeGraph kg = probe_data.load();
      ProbeSpec spec;
      spec.kind = probe_kind == 1   ? ProbeKind::Probe1
                  : probe_kind == 2 ? ProbeKind::Probe2
                                    : ProbeKind::Probe3;
      spec.seed = seed;
      spec.n_removed = n_removed;
      write_manifest(out_dir, "probe",
                     ordered_json{{"seed", seed},
                                  {"probe", probe_kind},
                                  {"n_removed", n_removed}});
      ProbeResult p = build_probe(kg, spec);
      auto dump_split = [&](const std::string& name,
                            const std::vector<Triple>& triples) {
        std::ofstream os(out_dir + "/" + name);
        for (const Triple& t : triples)
          os << p.graph.entity_keys[t.head] << "\t"
             << p.graph.relation_keys[t.rel] << "\t"
             << p.graph.entity_keys[t.tail] << "\n";
      };
      dump_split("train.tsv", p.graph.train);
      dump_split("dev.tsv", p.graph.dev);
      dump_split("test.tsv", p.graph.test);
      if (spec.kind == ProbeKind::Probe2) dump_split("support.tsv", p.support);
      ordered_json j{{"train", p.graph.train.size()},
                     {"dev", p.graph.dev.size()},
                     {"test", p.graph.test.size()},
                     {"support", p.support.size()},
                     {"removed", p.removed.size()}};
      write_text(out_dir + "/probe_report.json", j.dump(2) + "\n");
      std::cout << j.dump(2) << "\n";
    } else if (cmd_cost->parsed()) {
      CostPrediction p = cQ > 0 ? predicted_cost(cL, cE, cQ)
                                : predicted_whole_graph_cost(cL, cE, cR);
      ordered_json j{{"cross", p.cross},
                     {"siamese", p.siamese},
                     {"ratio", p.ratio()},
                     {"whole_graph_ratio", whole_graph_cost_ratio(cE, cR)}};
      std::cout << j.dump(2) << "\n";
    } else if (cmd_grad->parsed()) {
      KnowledgeGraph kg = grad_data.load();
      StarModel model = StarModel::init(enc_cfg, kg);
      std::mt19937_64 rng(seed);
      TrainBatch batch;
      for (size_t i = 0; i < 2 && i < kg.train.size(); ++i)
        batch.push_back(
            {kg.train[i], sample_negatives(kg, kg.train[i], 2, rng)});
      double err = gradient_check(model, kg, batch, train_cfg, grad_coords,
                                  grad_eps, seed);
      bool ok = err < 1e-4;
      std::cout << "max relative error " << err << " -> "
                << (ok ? "PASS" : "FAIL") << " (tolerance 1e-4)\n";
      return ok ? 0 : kExitRuntime;
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::runtime_error& e) {
    std::string msg = e.what();
    std::cerr << "error: " << msg << "\n";
    return msg.find("cannot") != std::string::npos ||
                   msg.find("No such") != std::string::npos
               ? kExitMissingFile
               : kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}
