#include "ritype/cli.hpp"

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <unordered_map>

#include <CLI11.hpp>
#include <json.hpp>

#include "ritype/common.hpp"
#include "ritype/csv.hpp"
#include "ritype/dataset.hpp"
#include "ritype/discriminant.hpp"
#include "ritype/hcluster.hpp"
#include "ritype/report.hpp"
#include "ritype/synth.hpp"

namespace ritype::cli {

namespace {

namespace fs = std::filesystem;

// Reorders partition rows to the id order of the rating matrix; the two
// files must cover exactly the same ids.
Partition align_partition(const Partition& part, const std::vector<std::string>& ids) {
  if (part.ids.size() != ids.size())
    throw InputError("partition covers " + std::to_string(part.ids.size()) + " ids but the ratings cover " +
                     std::to_string(ids.size()));
  std::unordered_map<std::string, int> by_id;
  for (std::size_t i = 0; i < part.ids.size(); ++i) by_id[part.ids[i]] = part.labels[i];
  Partition out;
  out.k = part.k;
  out.ids = ids;
  for (const auto& id : ids) {
    auto it = by_id.find(id);
    if (it == by_id.end()) throw InputError("partition is missing id: " + id);
    out.labels.push_back(it->second);
  }
  return out;
}

DiscriminantModel fit_model(const FeatureMatrix& ratings, const Partition& part, Priors priors) {
  DiscriminantModel model = solve_discriminants(scatter(ratings, part));
  model.priors = priors;
  return finalize_model(std::move(model), ratings, part);
}

// Refits without each row in turn and classifies the held-out row.
Partition leave_one_out(const FeatureMatrix& ratings, const Partition& part, Priors priors) {
  std::vector<int> sizes(static_cast<std::size_t>(part.k), 0);
  for (int label : part.labels) ++sizes[static_cast<std::size_t>(label - 1)];
  for (int g = 0; g < part.k; ++g)
    if (sizes[static_cast<std::size_t>(g)] < 3)
      throw StatError("leave-one-out needs at least three members per cluster; cluster " +
                      std::to_string(g + 1) + " has " +
                      std::to_string(sizes[static_cast<std::size_t>(g)]));

  std::size_t n = ratings.n_rows(), p = ratings.n_cols();
  Partition predicted;
  predicted.ids = ratings.row_ids;
  predicted.k = part.k;
  for (std::size_t hold = 0; hold < n; ++hold) {
    FeatureMatrix sub;
    sub.col_labels = ratings.col_labels;
    sub.values = Mat(n - 1, p);
    Partition sub_part;
    sub_part.k = part.k;
    std::size_t r = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == hold) continue;
      sub.row_ids.push_back(ratings.row_ids[i]);
      sub_part.ids.push_back(part.ids[i]);
      sub_part.labels.push_back(part.labels[i]);
      for (std::size_t j = 0; j < p; ++j) sub.values(r, j) = ratings.values(i, j);
      ++r;
    }
    DiscriminantModel model = fit_model(sub, sub_part, priors);
    std::vector<double> row(p);
    for (std::size_t j = 0; j < p; ++j) row[j] = ratings.values(hold, j);
    predicted.labels.push_back(classify(model, row));
  }
  return predicted;
}

struct SummarizeOpts {
  std::string ratings, counts, out;
};

void run_summarize(const SummarizeOpts& opt) {
  if (opt.ratings.empty() == opt.counts.empty())
    throw ParamError("need exactly one of --ratings or --counts");
  const IndicatorRegistry& registry = bundled::indicators();
  RatingCountTable counts;
  if (!opt.counts.empty()) {
    counts = load_counts_file(opt.counts);
  } else {
    FeatureMatrix ratings = load_ratings_file(opt.ratings, registry);
    counts = tabulate(ratings);
  }
  std::vector<SummaryRow> rows = build_summary(counts, registry);

  fs::path base(opt.out);
  if (base.extension() == ".md" || base.extension() == ".csv") base.replace_extension();
  csv::write_text_file(base.string() + ".md", markdown_summary(rows));
  csv::write_file(base.string() + ".csv", csv_summary(rows));
}

struct ClusterOpts {
  std::string attributes, linkage = "ward-d2", out, dendrogram, reference;
  int k = 0;
};

void run_cluster(const ClusterOpts& opt) {
  std::vector<InstitutionRecord> records = load_institutions_file(opt.attributes);
  FeatureMatrix features = encode_attributes(records);
  Dendrogram tree = ward_cluster(euclidean_distances(features), ward_variant_from_string(opt.linkage));
  Partition part = cut(tree, opt.k);
  csv::write_file(opt.out, partition_to_csv(part));
  csv::write_text_file(opt.dendrogram, to_dot(tree));
  if (!opt.reference.empty()) {
    Partition reference = partition_from_csv_file(opt.reference);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", adjusted_rand(part, reference));
    std::cout << "ARI: " << buf << "\n";
  }
}

struct DiscriminateOpts {
  std::string ratings, partition, out_model, report, priors = "equal";
  bool loo = false;
};

void run_discriminate(const DiscriminateOpts& opt) {
  const IndicatorRegistry& registry = bundled::indicators();
  FeatureMatrix ratings = load_ratings_file(opt.ratings, registry);
  Partition part = align_partition(partition_from_csv_file(opt.partition), ratings.row_ids);
  Priors priors = priors_from_string(opt.priors);

  DiscriminantModel model = fit_model(ratings, part, priors);
  ConfusionTable resub = confusion(part, classify_all(model, ratings));
  ConfusionTable loo_table;
  if (opt.loo) loo_table = confusion(part, leave_one_out(ratings, part, priors));

  csv::write_text_file(opt.out_model, model_to_json(model));
  csv::write_text_file(opt.report,
                       markdown_report(model, resub, registry, opt.loo ? &loo_table : nullptr));
}

struct PipelineOpts {
  std::string attributes, ratings, out_dir;
  int k = 0;
};

void run_pipeline(const PipelineOpts& opt) {
  const std::string attr_text = csv::read_text_file(opt.attributes);
  const std::string rating_text = csv::read_text_file(opt.ratings);

  std::vector<InstitutionRecord> records = load_institutions(csv::parse(attr_text));
  FeatureMatrix features = encode_attributes(records);
  Dendrogram tree = ward_cluster(euclidean_distances(features), WardVariant::ward_d2);
  Partition part = cut(tree, opt.k);

  fs::path dir(opt.out_dir);
  csv::write_file((dir / "partition.csv").string(), partition_to_csv(part));
  csv::write_text_file((dir / "dendrogram.dot").string(), to_dot(tree));

  const IndicatorRegistry& registry = bundled::indicators();
  FeatureMatrix ratings = load_ratings(csv::parse(rating_text), registry);
  Partition aligned = align_partition(part, ratings.row_ids);
  DiscriminantModel model = fit_model(ratings, aligned, Priors::equal);
  ConfusionTable resub = confusion(aligned, classify_all(model, ratings));

  csv::write_text_file((dir / "model.json").string(), model_to_json(model));
  csv::write_text_file((dir / "report.md").string(),
                       markdown_report(model, resub, registry, nullptr));

  nlohmann::ordered_json run;
  nlohmann::ordered_json in_attr, in_ratings;
  in_attr["path"] = opt.attributes;
  in_attr["fnv1a64"] = fnv1a64_hex(attr_text);
  in_ratings["path"] = opt.ratings;
  in_ratings["fnv1a64"] = fnv1a64_hex(rating_text);
  run["inputs"] = nlohmann::ordered_json::object();
  run["inputs"]["attributes"] = in_attr;
  run["inputs"]["ratings"] = in_ratings;
  run["options"] = nlohmann::ordered_json::object();
  run["options"]["k"] = opt.k;
  run["options"]["linkage"] = "ward-d2";
  run["options"]["priors"] = "equal";
  run["options"]["impute_mean"] = false;
  run["artifacts"] = nlohmann::ordered_json::object();
  run["artifacts"]["partition"] = "partition.csv";
  run["artifacts"]["dendrogram"] = "dendrogram.dot";
  run["artifacts"]["model"] = "model.json";
  run["artifacts"]["report"] = "report.md";
  const SignificanceTest& overall = model.significance.front();
  run["metrics"] = nlohmann::ordered_json::object();
  run["metrics"]["k"] = opt.k;
  run["metrics"]["accuracy"] = resub.accuracy;
  run["metrics"]["wilks_lambda"] = overall.wilks_lambda;
  run["metrics"]["F"] = overall.f;
  run["metrics"]["df1"] = overall.df1;
  run["metrics"]["df2"] = overall.df2;
  run["metrics"]["p_value"] = overall.p_value;
  run["regularization"] = nlohmann::ordered_json::object();
  run["regularization"]["applied"] = model.regularization_applied;
  run["regularization"]["ridge"] = model.regularization;
  run["regularization"]["log"] = model.regularization_log;
  run["notes"] = model.warnings;
  csv::write_text_file((dir / "run.json").string(), run.dump(2) + "\n");
}

struct SynthOpts {
  std::string config, out;
  std::uint64_t seed = 0;
  bool seed_given = false;
};

void run_synth(const SynthOpts& opt) {
  SynthConfig cfg = synth_config_from_json(csv::read_text_file(opt.config));
  if (opt.seed_given) cfg.seed = opt.seed;
  SynthData data = generate(cfg);
  fs::path dir(opt.out);
  csv::write_file((dir / "ratings.csv").string(), ratings_to_csv(data.ratings));
  csv::write_file((dir / "partition.csv").string(), partition_to_csv(data.partition));
}

}  // namespace

int run(std::vector<std::string> args) {
  CLI::App app{"Typology toolkit: Ward clustering and canonical discriminant analysis"};
  app.name("ritype");
  app.require_subcommand(1);

  SummarizeOpts summarize_opts;
  CLI::App* summarize = app.add_subcommand("summarize", "Level counts and summary statistics per indicator");
  CLI::Option* ratings_src = summarize->add_option("--ratings", summarize_opts.ratings, "Rating matrix CSV");
  summarize->add_option("--counts", summarize_opts.counts, "Level count CSV")->excludes(ratings_src);
  summarize->add_option("--out", summarize_opts.out, "Output base path; writes .md and .csv")->required();
  summarize->callback([&] { run_summarize(summarize_opts); });

  ClusterOpts cluster_opts;
  CLI::App* cluster = app.add_subcommand("cluster", "Ward clustering of binary attributes");
  cluster->add_option("--attributes", cluster_opts.attributes, "Attribute CSV")->required();
  cluster->add_option("--k", cluster_opts.k, "Number of clusters")->required();
  cluster->add_option("--linkage", cluster_opts.linkage, "ward-d2 (default) or ward-d")
      ->check(CLI::IsMember({"ward-d2", "ward-d"}));
  cluster->add_option("--out", cluster_opts.out, "Partition CSV output")->required();
  cluster->add_option("--dendrogram", cluster_opts.dendrogram, "DOT output")->required();
  cluster->add_option("--reference", cluster_opts.reference, "Partition CSV to compare (prints ARI)");
  cluster->callback([&] { run_cluster(cluster_opts); });

  DiscriminateOpts discriminate_opts;
  CLI::App* discriminate = app.add_subcommand("discriminate", "Canonical discriminant analysis of ratings over a partition");
  discriminate->add_option("--ratings", discriminate_opts.ratings, "Rating matrix CSV")->required();
  discriminate->add_option("--partition", discriminate_opts.partition, "Partition CSV")->required();
  discriminate->add_option("--out-model", discriminate_opts.out_model, "Model JSON output")->required();
  discriminate->add_option("--report", discriminate_opts.report, "Markdown report output")->required();
  discriminate->add_option("--priors", discriminate_opts.priors, "equal (default) or proportional")
      ->check(CLI::IsMember({"equal", "proportional"}));
  discriminate->add_flag("--loo", discriminate_opts.loo, "Add leave-one-out cross-validation");
  discriminate->callback([&] { run_discriminate(discriminate_opts); });

  PipelineOpts pipeline_opts;
  CLI::App* pipeline = app.add_subcommand("pipeline", "Cluster attributes, then discriminate ratings");
  pipeline->add_option("--attributes", pipeline_opts.attributes, "Attribute CSV")->required();
  pipeline->add_option("--ratings", pipeline_opts.ratings, "Rating matrix CSV")->required();
  pipeline->add_option("--k", pipeline_opts.k, "Number of clusters")->required();
  pipeline->add_option("--out-dir", pipeline_opts.out_dir, "Output directory")->required();
  pipeline->callback([&] { run_pipeline(pipeline_opts); });

  SynthOpts synth_opts;
  CLI::App* synth = app.add_subcommand("synth", "Generate a synthetic rating matrix from a config");
  synth->add_option("--config", synth_opts.config, "Config JSON")->required();
  CLI::Option* seed_opt = synth->add_option("--seed", synth_opts.seed, "Override the config seed");
  synth->add_option("--out", synth_opts.out, "Output directory")->required();
  synth->callback([&] {
    synth_opts.seed_given = seed_opt->count() > 0;
    run_synth(synth_opts);
  });

  try {
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "ERROR:3: " << e.what() << "\n";
    return 3;
  } catch (const InputError& e) {
    std::cerr << "ERROR:2: " << e.what() << "\n";
    return 2;
  } catch (const ParamError& e) {
    std::cerr << "ERROR:3: " << e.what() << "\n";
    return 3;
  } catch (const StatError& e) {
    std::cerr << "ERROR:4: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "ERROR:1: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace ritype::cli
