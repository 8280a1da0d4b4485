// lakern command-line tool: builds substitution matrices, computes and
// normalizes kernel Gram matrices, trains/applies the SVM and runs the
// evaluation protocols. Every command writes a JSON run manifest next
// to its output.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lakern/align.hpp"
#include "lakern/eig.hpp"
#include "lakern/evaluation.hpp"
#include "lakern/kernels.hpp"
#include "lakern/manifest.hpp"
#include "lakern/matrix_builders.hpp"
#include "lakern/substitution.hpp"
#include "lakern/svm.hpp"
#include "lakern/token.hpp"

namespace {

using namespace lakern;

Dataset load_instances(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return parse_instances(in);
}

SubstitutionMatrix load_subst(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return SubstitutionMatrix::load(in);
}

GramMatrix load_gram(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return GramMatrix::load(in);
}

void require_matching_ids(const GramMatrix& g, const Dataset& ds) {
  if (g.ids() != ds.ids())
    throw std::runtime_error(
        "gram instance ids do not match the instance file (same file and "
        "order required)");
}

std::vector<double> parse_double_list(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::stod(item));
  }
  if (out.empty()) throw std::runtime_error("empty list '" + csv + "'");
  return out;
}

std::vector<std::pair<double, double>> parse_gap_list(
    const std::string& csv) {
  std::vector<std::pair<double, double>> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto slash = item.find('/');
    if (slash == std::string::npos)
      throw std::runtime_error("gap entry '" + item +
                               "' must look like open/extend");
    out.push_back({std::stod(item.substr(0, slash)),
                   std::stod(item.substr(slash + 1))});
  }
  if (out.empty()) throw std::runtime_error("empty gap list");
  return out;
}

std::vector<std::size_t> parse_size_list(const std::string& csv) {
  std::vector<std::size_t> out;
  for (double v : parse_double_list(csv))
    out.push_back(static_cast<std::size_t>(v));
  return out;
}

struct KernelFlags {
  std::string kernel = "la";
  std::string subst_path;
  double beta = 1.0;
  double gap_open = 1.2;
  double gap_extend = 0.2;
  std::size_t subseq_length = 4;
  double decay = 0.5;

  void attach(CLI::App* cmd) {
    cmd->add_option("--kernel", kernel, "la | shortest-path | gap-weighted")
        ->check(CLI::IsMember({"la", "shortest-path", "gap-weighted"}))
        ->capture_default_str();
    cmd->add_option("--subst", subst_path,
                    "substitution matrix TSV (required for la)");
    cmd->add_option("--beta", beta, "LA scaling parameter")
        ->capture_default_str();
    cmd->add_option("--gap-open", gap_open, "LA gap opening cost")
        ->capture_default_str();
    cmd->add_option("--gap-extend", gap_extend, "LA gap extension cost")
        ->capture_default_str();
    cmd->add_option("--subseq-length", subseq_length,
                    "gap-weighted subsequence length")
        ->capture_default_str();
    cmd->add_option("--decay", decay, "gap-weighted decay factor")
        ->capture_default_str();
  }

  std::function<double(std::size_t, std::size_t)> make_cell(
      const Dataset& ds, std::optional<SubstitutionMatrix>& subst) const {
    if (kernel == "la") {
      if (subst_path.empty())
        throw std::runtime_error("--kernel la requires --subst");
      subst = load_subst(subst_path);
      const AlignParams params{beta, gap_open, gap_extend};
      if (auto w = params.warning()) std::cerr << "warning: " << *w << '\n';
      return LaCell(ds, *subst, params);
    }
    if (kernel == "shortest-path") return ShortestPathCell(ds);
    return GapWeightedCell(ds, subseq_length, decay);
  }

  void record(RunManifest& manifest) const {
    manifest.parameter("kernel", kernel);
    if (kernel == "la") {
      manifest.parameter("beta", beta);
      manifest.parameter("gap_open", gap_open);
      manifest.parameter("gap_extend", gap_extend);
    } else if (kernel == "gap-weighted") {
      manifest.parameter("subseq_length", subseq_length);
      manifest.parameter("decay", decay);
    }
  }
};

TrainConfig::Weighting parse_weighting(const std::string& name) {
  if (name == "none") return TrainConfig::Weighting::none;
  if (name == "inverse")
    return TrainConfig::Weighting::inverse_class_probability;
  throw std::runtime_error("unknown weighting '" + name + "'");
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << content;
}

std::vector<ReportRow> cv_report_rows(const CvResult& cv) {
  std::vector<ReportRow> rows;
  for (std::size_t f = 0; f < cv.folds.size(); ++f)
    rows.push_back({"fold" + std::to_string(f), cv.folds[f].metrics});
  rows.push_back({"aggregate", cv.aggregate});
  return rows;
}

int run(int argc, char** argv) {
  CLI::App app{"Local alignment kernels for dependency-path relation "
               "classification"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  // ---- build-subst ----
  auto* build = app.add_subcommand(
      "build-subst", "Build a substitution matrix over a dataset vocabulary");
  std::string bs_source, bs_measure = "dice", bs_corpus, bs_taxonomy;
  std::string bs_instances, bs_out;
  std::uint64_t bs_seed = 1;
  std::size_t bs_window = 2;
  build->add_option("--source", bs_source,
                    "distributional | taxonomy | random")
      ->required()
      ->check(CLI::IsMember({"distributional", "taxonomy", "random"}));
  build->add_option("--measure", bs_measure,
                    "dice|cosine|l2 or wup|lch|res|jcn|lin");
  build->add_option("--corpus", bs_corpus, "plain-text corpus file");
  build->add_option("--taxonomy", bs_taxonomy, "taxonomy TSV file");
  build->add_option("--instances", bs_instances, "instance file")->required();
  build->add_option("--window", bs_window, "context window radius")
      ->capture_default_str();
  build->add_option("--seed", bs_seed, "seed for --source random")
      ->capture_default_str();
  build->add_option("--out", bs_out, "output matrix TSV")->required();

  // ---- gram ----
  auto* gram_cmd =
      app.add_subcommand("gram", "Compute a kernel Gram matrix");
  std::string g_instances, g_out;
  KernelFlags g_kernel;
  bool g_normalize = false;
  unsigned g_threads = 1;
  gram_cmd->add_option("--instances", g_instances, "instance file")
      ->required();
  g_kernel.attach(gram_cmd);
  gram_cmd->add_flag("--normalize", g_normalize,
                     "cosine-normalize the matrix");
  gram_cmd->add_option("--threads", g_threads, "worker threads (0 = all)")
      ->capture_default_str();
  gram_cmd->add_option("--out", g_out, "output gram file")->required();

  // ---- cv ----
  auto* cv_cmd = app.add_subcommand(
      "cv", "k-fold cross-validation with C-grid selection");
  std::string cv_instances, cv_gram, cv_out, cv_cgrid, cv_weighting =
      "inverse";
  KernelFlags cv_kernel;
  std::size_t cv_folds = 10;
  std::uint64_t cv_seed = 1;
  bool cv_normalize = false, cv_stratified = false;
  unsigned cv_threads = 1;
  cv_cmd->add_option("--instances", cv_instances, "instance file")
      ->required();
  cv_cmd->add_option("--gram", cv_gram,
                     "precomputed gram file (else computed from --kernel)");
  cv_kernel.attach(cv_cmd);
  cv_cmd->add_flag("--normalize", cv_normalize,
                   "cosine-normalize before training");
  cv_cmd->add_flag("--stratified", cv_stratified, "stratified folds");
  cv_cmd->add_option("--folds", cv_folds)->capture_default_str();
  cv_cmd->add_option("--seed", cv_seed)->capture_default_str();
  cv_cmd->add_option("--c-grid", cv_cgrid,
                     "comma-separated C values (default 2^-6..2^12 by x4)");
  cv_cmd->add_option("--weighting", cv_weighting, "inverse | none")
      ->capture_default_str();
  cv_cmd->add_option("--threads", cv_threads)->capture_default_str();
  cv_cmd->add_option("--out", cv_out, "report TSV")->required();

  // ---- sweep ----
  auto* sweep_cmd = app.add_subcommand(
      "sweep", "Cross-validate over a beta x gap grid of LA parameters");
  std::string sw_instances, sw_subst, sw_out, sw_cgrid;
  std::string sw_beta = "1", sw_gaps = "1.2/0.2", sw_weighting = "inverse";
  std::size_t sw_folds = 10;
  std::uint64_t sw_seed = 1;
  unsigned sw_threads = 1;
  bool sw_no_normalize = false;
  sweep_cmd->add_option("--instances", sw_instances)->required();
  sweep_cmd->add_option("--subst", sw_subst)->required();
  sweep_cmd->add_option("--beta", sw_beta, "comma-separated beta grid")
      ->capture_default_str();
  sweep_cmd
      ->add_option("--gaps", sw_gaps,
                   "comma-separated open/extend pairs, e.g. 1.2/0.2,1/1")
      ->capture_default_str();
  sweep_cmd->add_option("--folds", sw_folds)->capture_default_str();
  sweep_cmd->add_option("--seed", sw_seed)->capture_default_str();
  sweep_cmd->add_option("--c-grid", sw_cgrid);
  sweep_cmd->add_option("--weighting", sw_weighting)->capture_default_str();
  sweep_cmd->add_option("--threads", sw_threads)->capture_default_str();
  sweep_cmd->add_flag("--no-normalize", sw_no_normalize,
                      "skip Gram normalization");
  sweep_cmd->add_option("--out", sw_out, "report TSV")->required();

  // ---- curve ----
  auto* curve_cmd = app.add_subcommand(
      "curve", "Learning curve against a fixed test set");
  std::string cu_train, cu_test, cu_sizes, cu_out, cu_cgrid,
      cu_weighting = "inverse";
  KernelFlags cu_kernel;
  std::uint64_t cu_seed = 1;
  bool cu_no_normalize = false;
  unsigned cu_threads = 1;
  curve_cmd->add_option("--train", cu_train, "training instance file")
      ->required();
  curve_cmd->add_option("--test", cu_test, "test instance file")->required();
  curve_cmd->add_option("--sizes", cu_sizes, "ascending training sizes")
      ->required();
  cu_kernel.attach(curve_cmd);
  curve_cmd->add_option("--seed", cu_seed)->capture_default_str();
  curve_cmd->add_option("--c-grid", cu_cgrid);
  curve_cmd->add_option("--weighting", cu_weighting)->capture_default_str();
  curve_cmd->add_option("--threads", cu_threads)->capture_default_str();
  curve_cmd->add_flag("--no-normalize", cu_no_normalize);
  curve_cmd->add_option("--out", cu_out, "report TSV")->required();

  // ---- train ----
  auto* train_cmd =
      app.add_subcommand("train", "Train an SVM on a precomputed gram");
  std::string tr_gram, tr_instances, tr_out, tr_weighting = "inverse";
  double tr_c = 1.0, tr_tolerance = 1e-6;
  std::uint64_t tr_seed = 1;
  train_cmd->add_option("--gram", tr_gram)->required();
  train_cmd->add_option("--instances", tr_instances)->required();
  train_cmd->add_option("--c", tr_c, "penalty C")->capture_default_str();
  train_cmd->add_option("--tolerance", tr_tolerance)->capture_default_str();
  train_cmd->add_option("--weighting", tr_weighting)->capture_default_str();
  train_cmd->add_option("--seed", tr_seed)->capture_default_str();
  train_cmd->add_option("--out", tr_out, "model file")->required();

  // ---- predict ----
  auto* predict_cmd = app.add_subcommand(
      "predict", "Classify instances with a trained model");
  std::string pr_model, pr_train, pr_instances, pr_out;
  KernelFlags pr_kernel;
  bool pr_normalize = false;
  predict_cmd->add_option("--model", pr_model)->required();
  predict_cmd
      ->add_option("--train-instances", pr_train,
                   "instance file the model was trained on")
      ->required();
  predict_cmd->add_option("--instances", pr_instances, "instances to label")
      ->required();
  pr_kernel.attach(predict_cmd);
  predict_cmd->add_flag(
      "--normalize", pr_normalize,
      "normalize kernel rows (use when the training gram was normalized)");
  predict_cmd->add_option("--out", pr_out, "predictions TSV")->required();

  // ---- export ----
  auto* export_cmd = app.add_subcommand(
      "export", "Export a gram matrix for external SVM tools");
  std::string ex_gram, ex_instances, ex_out, ex_format = "precomputed";
  export_cmd->add_option("--gram", ex_gram)->required();
  export_cmd->add_option("--instances", ex_instances)->required();
  export_cmd->add_option("--format", ex_format)
      ->check(CLI::IsMember({"precomputed"}))
      ->capture_default_str();
  export_cmd->add_option("--out", ex_out)->required();

  // ---- psd-check ----
  auto* psd_cmd = app.add_subcommand(
      "psd-check", "Report the smallest eigenvalue of a gram matrix");
  std::string psd_gram;
  std::size_t psd_bound = 2000;
  psd_cmd->add_option("--gram", psd_gram)->required();
  psd_cmd->add_option("--bound", psd_bound, "dense eigensolver size bound")
      ->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  if (build->parsed()) {
    RunManifest manifest("build-subst");
    manifest.parameter("source", bs_source);
    manifest.input("instances", bs_instances);
    const Dataset ds = load_instances(bs_instances);
    SubstitutionMatrix matrix;
    if (bs_source == "distributional") {
      if (bs_corpus.empty())
        throw std::runtime_error("--source distributional needs --corpus");
      manifest.parameter("measure", bs_measure);
      manifest.parameter("window", bs_window);
      manifest.input("corpus", bs_corpus);
      std::ifstream corpus(bs_corpus);
      if (!corpus) throw std::runtime_error("cannot open '" + bs_corpus + "'");
      matrix = build_distributional_matrix(
          ds, corpus, parse_distributional_measure(bs_measure),
          WindowSpec{bs_window});
    } else if (bs_source == "taxonomy") {
      if (bs_taxonomy.empty())
        throw std::runtime_error("--source taxonomy needs --taxonomy");
      manifest.parameter("measure", bs_measure);
      manifest.input("taxonomy", bs_taxonomy);
      std::ifstream tin(bs_taxonomy);
      if (!tin) throw std::runtime_error("cannot open '" + bs_taxonomy + "'");
      const Taxonomy taxonomy = Taxonomy::load(tin);
      matrix =
          build_taxonomy_matrix(ds, taxonomy, parse_taxonomy_measure(bs_measure));
    } else {
      manifest.parameter("seed", bs_seed);
      matrix = SubstitutionMatrix::random(ds.word_vocabulary(), bs_seed);
    }
    std::ofstream out(bs_out);
    if (!out) throw std::runtime_error("cannot write '" + bs_out + "'");
    matrix.save(out);
    manifest.output(bs_out);
    manifest.write(bs_out + ".manifest.json");
    std::cout << bs_out << '\n' << bs_out + ".manifest.json" << '\n';
    return 0;
  }

  if (gram_cmd->parsed()) {
    RunManifest manifest("gram");
    manifest.input("instances", g_instances);
    g_kernel.record(manifest);
    manifest.parameter("normalize", g_normalize);
    manifest.parameter("threads", g_threads);
    const Dataset ds = load_instances(g_instances);
    std::optional<SubstitutionMatrix> subst;
    auto cell = g_kernel.make_cell(ds, subst);
    if (subst) manifest.input("subst", g_kernel.subst_path);
    GramMatrix g = compute_gram(ds, cell, g_threads);
    if (g_normalize) g = normalize_gram(g);
    std::ofstream out(g_out);
    if (!out) throw std::runtime_error("cannot write '" + g_out + "'");
    g.save(out);
    manifest.output(g_out);
    manifest.write(g_out + ".manifest.json");
    std::cout << g_out << '\n' << g_out + ".manifest.json" << '\n';
    return 0;
  }

  if (cv_cmd->parsed()) {
    RunManifest manifest("cv");
    manifest.input("instances", cv_instances);
    manifest.parameter("folds", cv_folds);
    manifest.parameter("seed", cv_seed);
    manifest.parameter("stratified", cv_stratified);
    manifest.parameter("weighting", cv_weighting);
    const Dataset ds = load_instances(cv_instances);
    GramMatrix g;
    if (!cv_gram.empty()) {
      manifest.input("gram", cv_gram);
      g = load_gram(cv_gram);
      require_matching_ids(g, ds);
    } else {
      cv_kernel.record(manifest);
      std::optional<SubstitutionMatrix> subst;
      auto cell = cv_kernel.make_cell(ds, subst);
      if (subst) manifest.input("subst", cv_kernel.subst_path);
      g = compute_gram(ds, cell, cv_threads);
    }
    if (cv_normalize) g = normalize_gram(g);
    const auto c_grid =
        cv_cgrid.empty() ? default_c_grid() : parse_double_list(cv_cgrid);
    manifest.parameter("c_grid", c_grid);
    const FoldPlan plan = kfold_split(ds, cv_folds, cv_seed, cv_stratified);
    manifest.note("fold_plan_digest", plan.digest());
    manifest.note("ttest_basis", "per-fold f_score");
    TrainConfig base;
    base.weighting = parse_weighting(cv_weighting);
    const CvResult cv = cross_validate(g, ds.labels_pm1(), plan, c_grid, base);
    std::size_t degenerate = 0;
    for (const auto& fold : cv.folds) degenerate += fold.degenerate;
    if (degenerate)
      std::cerr << "warning: " << degenerate
                << " fold(s) had single-class training portions and were "
                   "scored with the constant classifier\n";
    manifest.note("degenerate_folds", degenerate);
    std::ofstream out(cv_out);
    if (!out) throw std::runtime_error("cannot write '" + cv_out + "'");
    write_report(cv_report_rows(cv), out);
    manifest.output(cv_out);
    manifest.write(cv_out + ".manifest.json");
    std::cout << cv_out << '\n' << cv_out + ".manifest.json" << '\n';
    return 0;
  }

  if (sweep_cmd->parsed()) {
    RunManifest manifest("sweep");
    manifest.input("instances", sw_instances);
    manifest.input("subst", sw_subst);
    const Dataset ds = load_instances(sw_instances);
    const SubstitutionMatrix subst = load_subst(sw_subst);
    SweepOptions opt;
    opt.folds = sw_folds;
    opt.seed = sw_seed;
    if (!sw_cgrid.empty()) opt.c_grid = parse_double_list(sw_cgrid);
    opt.weighting = parse_weighting(sw_weighting);
    opt.normalize = !sw_no_normalize;
    opt.threads = sw_threads;
    const auto beta_grid = parse_double_list(sw_beta);
    const auto gap_grid = parse_gap_list(sw_gaps);
    manifest.parameter("beta_grid", beta_grid);
    manifest.parameter("gaps", sw_gaps);
    manifest.parameter("folds", sw_folds);
    manifest.parameter("seed", sw_seed);
    manifest.parameter("c_grid", opt.c_grid);
    manifest.parameter("normalize", opt.normalize);
    manifest.note("fold_plan_digest",
                  kfold_split(ds, opt.folds, opt.seed).digest());
    const auto cells = parameter_sweep(ds, subst, beta_grid, gap_grid, opt);
    std::vector<ReportRow> rows;
    for (const auto& cell : cells)
      rows.push_back({cell.label, cell.cv.aggregate});
    std::ofstream out(sw_out);
    if (!out) throw std::runtime_error("cannot write '" + sw_out + "'");
    write_report(rows, out);
    manifest.output(sw_out);
    manifest.write(sw_out + ".manifest.json");
    std::cout << sw_out << '\n' << sw_out + ".manifest.json" << '\n';
    return 0;
  }

  if (curve_cmd->parsed()) {
    RunManifest manifest("curve");
    manifest.input("train", cu_train);
    manifest.input("test", cu_test);
    manifest.parameter("seed", cu_seed);
    cu_kernel.record(manifest);
    const Dataset train_ds = load_instances(cu_train);
    const Dataset test_ds = load_instances(cu_test);
    std::vector<LabeledInstance> combined;
    for (const auto& inst : train_ds) {
      auto copy = inst;
      copy.id = "train:" + copy.id;
      combined.push_back(std::move(copy));
    }
    for (const auto& inst : test_ds) {
      auto copy = inst;
      copy.id = "test:" + copy.id;
      combined.push_back(std::move(copy));
    }
    const Dataset all(std::move(combined));
    std::optional<SubstitutionMatrix> subst;
    auto cell = cu_kernel.make_cell(all, subst);
    if (subst) manifest.input("subst", cu_kernel.subst_path);
    GramMatrix g = compute_gram(all, cell, cu_threads);
    if (!cu_no_normalize) g = normalize_gram(g);
    const auto sizes = parse_size_list(cu_sizes);
    manifest.parameter("sizes", sizes);
    const auto c_grid =
        cu_cgrid.empty() ? default_c_grid() : parse_double_list(cu_cgrid);
    manifest.parameter("c_grid", c_grid);
    TrainConfig base;
    base.weighting = parse_weighting(cu_weighting);
    const auto points = learning_curve(g, all.labels_pm1(), train_ds.size(),
                                       sizes, cu_seed, c_grid, base);
    std::vector<ReportRow> rows;
    for (const auto& pt : points)
      rows.push_back({"size=" + std::to_string(pt.size), pt.metrics});
    std::ofstream out(cu_out);
    if (!out) throw std::runtime_error("cannot write '" + cu_out + "'");
    write_report(rows, out);
    manifest.output(cu_out);
    manifest.write(cu_out + ".manifest.json");
    std::cout << cu_out << '\n' << cu_out + ".manifest.json" << '\n';
    return 0;
  }

  if (train_cmd->parsed()) {
    RunManifest manifest("train");
    manifest.input("gram", tr_gram);
    manifest.input("instances", tr_instances);
    manifest.parameter("C", tr_c);
    manifest.parameter("tolerance", tr_tolerance);
    manifest.parameter("weighting", tr_weighting);
    manifest.parameter("seed", tr_seed);
    const Dataset ds = load_instances(tr_instances);
    const GramMatrix g = load_gram(tr_gram);
    require_matching_ids(g, ds);
    TrainConfig cfg;
    cfg.C = tr_c;
    cfg.tolerance = tr_tolerance;
    cfg.weighting = parse_weighting(tr_weighting);
    cfg.seed = tr_seed;
    const TrainedModel model = train(g, ds.labels_pm1(), cfg);
    if (!model.converged)
      std::cerr << "warning: solver stopped after " << model.passes
                << " passes with KKT residual " << model.kkt_residual
                << '\n';
    std::map<std::string, std::string> meta{
        {"normalized", g.normalized() ? "1" : "0"},
        {"C", std::to_string(tr_c)},
        {"weighting", tr_weighting}};
    std::ofstream out(tr_out);
    if (!out) throw std::runtime_error("cannot write '" + tr_out + "'");
    save_model(model, meta, g.ids(), out);
    manifest.note("converged", model.converged);
    manifest.note("kkt_residual", model.kkt_residual);
    manifest.note("support_count", model.support_ids.size());
    manifest.output(tr_out);
    manifest.write(tr_out + ".manifest.json");
    std::cout << tr_out << '\n' << tr_out + ".manifest.json" << '\n';
    return 0;
  }

  if (predict_cmd->parsed()) {
    RunManifest manifest("predict");
    manifest.input("model", pr_model);
    manifest.input("train_instances", pr_train);
    manifest.input("instances", pr_instances);
    pr_kernel.record(manifest);
    manifest.parameter("normalize", pr_normalize);
    std::ifstream min(pr_model);
    if (!min) throw std::runtime_error("cannot open '" + pr_model + "'");
    const SavedModel model = load_model(min);
    const Dataset train_ds = load_instances(pr_train);
    const Dataset test_ds = load_instances(pr_instances);

    std::map<std::string, std::size_t> train_pos;
    for (std::size_t i = 0; i < train_ds.size(); ++i)
      train_pos[train_ds[i].id] = i;
    std::vector<std::size_t> support_idx;
    for (const auto& [id, coef] : model.coefficients) {
      auto it = train_pos.find(id);
      if (it == train_pos.end())
        throw std::runtime_error("model references unknown training id '" +
                                 id + "'");
      support_idx.push_back(it->second);
    }

    SubstitutionMatrix subst;
    if (pr_kernel.kernel == "la") {
      if (pr_kernel.subst_path.empty())
        throw std::runtime_error("--kernel la requires --subst");
      subst = load_subst(pr_kernel.subst_path);
      manifest.input("subst", pr_kernel.subst_path);
    }
    const AlignParams params{pr_kernel.beta, pr_kernel.gap_open,
                             pr_kernel.gap_extend};
    auto kernel_value = [&](const PathSequence& a, const PathSequence& b) {
      if (pr_kernel.kernel == "la") return la_kernel(a, b, subst, params);
      if (pr_kernel.kernel == "shortest-path")
        return shortest_path_kernel(a, b);
      return gap_weighted_kernel(a, b, pr_kernel.subseq_length,
                                 pr_kernel.decay);
    };

    std::vector<double> support_diag;
    if (pr_normalize)
      for (auto i : support_idx)
        support_diag.push_back(
            kernel_value(train_ds[i].path, train_ds[i].path));

    std::ofstream out(pr_out);
    if (!out) throw std::runtime_error("cannot write '" + pr_out + "'");
    out << "id\tlabel\tdecision\n";
    for (const auto& inst : test_ds) {
      std::vector<double> row(support_idx.size());
      for (std::size_t j = 0; j < support_idx.size(); ++j)
        row[j] = kernel_value(inst.path, train_ds[support_idx[j]].path);
      if (pr_normalize) {
        const double self = kernel_value(inst.path, inst.path);
        row = normalize_row(row, self, support_diag);
      }
      double decision = model.bias;
      for (std::size_t j = 0; j < row.size(); ++j)
        decision += model.coefficients[j].second * row[j];
      out << inst.id << '\t' << (decision > 0.0 ? 1 : 0) << '\t' << decision
          << '\n';
    }
    manifest.output(pr_out);
    manifest.write(pr_out + ".manifest.json");
    std::cout << pr_out << '\n' << pr_out + ".manifest.json" << '\n';
    return 0;
  }

  if (export_cmd->parsed()) {
    RunManifest manifest("export");
    manifest.input("gram", ex_gram);
    manifest.input("instances", ex_instances);
    manifest.parameter("format", ex_format);
    const Dataset ds = load_instances(ex_instances);
    const GramMatrix g = load_gram(ex_gram);
    require_matching_ids(g, ds);
    std::ofstream out(ex_out);
    if (!out) throw std::runtime_error("cannot write '" + ex_out + "'");
    export_precomputed(g, ds.labels_pm1(), out);
    manifest.output(ex_out);
    manifest.write(ex_out + ".manifest.json");
    std::cout << ex_out << '\n' << ex_out + ".manifest.json" << '\n';
    return 0;
  }

  if (psd_cmd->parsed()) {
    const GramMatrix g = load_gram(psd_gram);
    const double lambda_min = min_eigenvalue(g, psd_bound);
    std::printf("min_eigenvalue\t%.12g\n", lambda_min);
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
