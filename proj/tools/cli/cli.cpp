#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <numeric>
#include <set>
#include <sstream>

#include "deepbarcode/deepbarcode.hpp"
#include "manifest.hpp"

namespace fs = std::filesystem;

namespace deepbarcode::cli {
namespace {

constexpr const char* kVersion = DEEPBARCODE_VERSION;

class Stopwatch {
 public:
  double lap_ms() {
    const auto now = std::chrono::steady_clock::now();
    const double ms = std::chrono::duration<double, std::milli>(now - last_).count();
    last_ = now;
    return ms;
  }

 private:
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

const std::set<std::string, std::less<>> kPathFlags{
    "--in",           "--out",         "--model",   "--train",   "--test",
    "--train-labels", "--test-labels", "--out-dir", "--manifest"};

const std::set<std::string, std::less<>> kOutputFileFlags{"--out", "--manifest"};

/// Applies `rewrite(flag, value)` to the value of every flag in `flags`,
/// in both "--flag value" and "--flag=value" spellings.
template <typename Fn>
std::vector<std::string> rewrite_flag_values(std::vector<std::string> args,
                                             const std::set<std::string, std::less<>>& flags,
                                             Fn rewrite) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    const auto eq = args[i].find('=');
    if (eq != std::string::npos && args[i].starts_with("--")) {
      const std::string flag = args[i].substr(0, eq);
      if (flags.contains(flag)) {
        args[i] = flag + "=" + rewrite(flag, args[i].substr(eq + 1));
      }
    } else if (flags.contains(args[i]) && i + 1 < args.size()) {
      args[i + 1] = rewrite(args[i], args[i + 1]);
      ++i;
    }
  }
  return args;
}

std::vector<std::string> absolutize(const std::vector<std::string>& args) {
  return rewrite_flag_values(args, kPathFlags, [](const std::string&, const std::string& v) {
    return fs::absolute(v).string();
  });
}

RunManifest start_manifest(const std::string& command, const std::vector<std::string>& args) {
  RunManifest m;
  m.tool_version = kVersion;
  m.command = command;
  m.args = absolutize(args);
  return m;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    fail(ErrorKind::Io, "cannot create directory " + dir.string() + ": " + ec.message());
  }
}

fs::path manifest_path_or(const std::string& explicit_path, fs::path fallback) {
  return explicit_path.empty() ? std::move(fallback) : fs::path(explicit_path);
}

struct BinarizeOptions {
  std::string in, out, method = "minmax", manifest;
  unsigned threads = 0;
};

int cmd_binarize(const BinarizeOptions& o, const std::vector<std::string>& args,
                 std::ostream& out) {
  const auto method = parse_binarization_method(o.method);
  Stopwatch sw;
  auto m = start_manifest("binarize", args);
  m.config = {{"method", std::string(to_string(method))}, {"threads", o.threads}};
  const auto features = load_features(o.in);
  m.timings_ms.emplace_back("load", sw.lap_ms());
  const auto codes = binarize_matrix(features, method, o.threads);
  m.timings_ms.emplace_back("binarize", sw.lap_ms());
  save_barcodes(codes, o.out);
  m.timings_ms.emplace_back("write", sw.lap_ms());
  m.add_input("features", o.in);
  m.add_output("barcodes", o.out);
  save_manifest(m, manifest_path_or(o.manifest, o.out + ".manifest.json"));
  out << "rows=" << codes.rows() << " bits_per_row=" << codes.bits_per_row() << "\n";
  return 0;
}

struct PcaFitOptions {
  std::string in, out, solver = "auto", manifest;
  std::size_t k = 0;
};

PcaSolver parse_solver(const std::string& name) {
  if (name == "svd") return PcaSolver::Svd;
  if (name == "covariance") return PcaSolver::Covariance;
  return PcaSolver::Auto;
}

int cmd_pca_fit(const PcaFitOptions& o, const std::vector<std::string>& args, std::ostream& out) {
  Stopwatch sw;
  auto m = start_manifest("pca fit", args);
  m.config = {{"k", o.k}, {"solver", o.solver}};
  const auto train = load_features(o.in);
  m.timings_ms.emplace_back("load", sw.lap_ms());
  const auto model = pca_fit(train, o.k, parse_solver(o.solver));
  m.timings_ms.emplace_back("fit", sw.lap_ms());
  save_pca_model(model, o.out);
  m.timings_ms.emplace_back("write", sw.lap_ms());
  m.add_input("features", o.in);
  m.add_output("model", o.out);
  save_manifest(m, manifest_path_or(o.manifest, o.out + ".manifest.json"));
  const auto ratios = explained_variance_ratio(model);
  out << "dim=" << model.dim() << " k=" << model.components()
      << " explained=" << format_real(std::accumulate(ratios.begin(), ratios.end(), 0.0))
      << "\n";
  return 0;
}

struct PcaTransformOptions {
  std::string model, in, out, manifest;
  unsigned threads = 0;
};

int cmd_pca_transform(const PcaTransformOptions& o, const std::vector<std::string>& args,
                      std::ostream& out) {
  Stopwatch sw;
  auto m = start_manifest("pca transform", args);
  m.config = {{"threads", o.threads}};
  const auto model = load_pca_model(o.model);
  const auto features = load_features(o.in);
  m.timings_ms.emplace_back("load", sw.lap_ms());
  const auto reduced = pca_transform(model, features, o.threads);
  m.timings_ms.emplace_back("transform", sw.lap_ms());
  save_features(reduced, o.out);
  m.timings_ms.emplace_back("write", sw.lap_ms());
  m.add_input("model", o.model);
  m.add_input("features", o.in);
  m.add_output("features", o.out);
  save_manifest(m, manifest_path_or(o.manifest, o.out + ".manifest.json"));
  out << "rows=" << reduced.rows() << " cols=" << reduced.cols() << "\n";
  return 0;
}

struct SearchOptions {
  std::string train, test, train_labels, test_labels, out_dir, manifest;
  std::string mode = "twostage", metric = "l1", method = "minmax";
  std::size_t n = 1;
  std::size_t n_pca = 0;
  bool has_n_pca = false;
  unsigned threads = 0;
};

std::string format_results(std::span<const QueryResult> results) {
  std::string text = "# query_row train_row distance\n";
  for (std::size_t q = 0; q < results.size(); ++q) {
    text += std::to_string(q) + " " + std::to_string(results[q].final_index) + " " +
            format_real(results[q].final_distance) + "\n";
  }
  return text;
}

int cmd_search(const SearchOptions& o, const std::vector<std::string>& args, std::ostream& out) {
  SearchConfig config;
  config.mode = parse_search_mode(o.mode);
  config.metric = parse_distance_metric(o.metric);
  config.method = parse_binarization_method(o.method);
  config.n_candidates = o.n;
  if (o.has_n_pca) {
    config.n_pca = o.n_pca;
  }
  validate(config);

  Stopwatch sw;
  auto m = start_manifest("search", args);
  m.config = {{"mode", std::string(to_string(config.mode))},
              {"metric", std::string(to_string(config.metric))},
              {"method", std::string(to_string(config.method))},
              {"n", config.n_candidates},
              {"n_pca", config.n_pca ? nlohmann::ordered_json(*config.n_pca)
                                     : nlohmann::ordered_json(nullptr)},
              {"threads", o.threads}};
  const auto train = load_features(o.train);
  const auto test = load_features(o.test);
  const auto train_labels = load_labels(o.train_labels);
  const auto test_labels = load_labels(o.test_labels);
  train_labels.check_aligned(train.rows(), "train labels");
  test_labels.check_aligned(test.rows(), "test labels");
  m.timings_ms.emplace_back("load", sw.lap_ms());

  const auto results = run_search(train, test, config, o.threads);
  m.timings_ms.emplace_back("search", sw.lap_ms());
  const auto report = evaluate(test_labels, labels_from_results(results, train_labels));
  m.timings_ms.emplace_back("evaluate", sw.lap_ms());

  const fs::path dir(o.out_dir);
  ensure_dir(dir);
  write_file_atomic(dir / "results.txt", format_results(results));
  write_file_atomic(dir / "report.kv", format_report_kv(report));
  m.timings_ms.emplace_back("write", sw.lap_ms());

  m.add_input("train", o.train);
  m.add_input("test", o.test);
  m.add_input("train_labels", o.train_labels);
  m.add_input("test_labels", o.test_labels);
  m.add_output("results", dir / "results.txt");
  m.add_output("report", dir / "report.kv");
  save_manifest(m, manifest_path_or(o.manifest, dir / "manifest.json"));
  out << format_report_text(report);
  return 0;
}

struct SynthOptions {
  SyntheticSpec spec;
  std::string out_dir, manifest;
};

int cmd_synth(const SynthOptions& o, const std::vector<std::string>& args, std::ostream& out) {
  Stopwatch sw;
  auto m = start_manifest("synth", args);
  const auto& s = o.spec;
  m.config = {{"generator", std::string(kSyntheticGenerator)},
              {"classes", s.classes},
              {"per_class", s.per_class},
              {"test_per_class", s.test_per_class},
              {"dim", s.dim},
              {"separation", s.separation},
              {"seed", s.seed}};
  const auto data = generate(s);
  m.timings_ms.emplace_back("generate", sw.lap_ms());
  const fs::path dir(o.out_dir);
  ensure_dir(dir);
  save_features(data.train, dir / "train.dft");
  save_labels(data.train_labels, dir / "train.labels");
  save_features(data.test, dir / "test.dft");
  save_labels(data.test_labels, dir / "test.labels");
  m.timings_ms.emplace_back("write", sw.lap_ms());
  for (const char* name : {"train.dft", "train.labels", "test.dft", "test.labels"}) {
    m.add_output(name, dir / name);
  }
  save_manifest(m, manifest_path_or(o.manifest, dir / "manifest.json"));
  out << "train=" << data.train.rows() << "x" << data.train.cols()
      << " test=" << data.test.rows() << "x" << data.test.cols() << "\n";
  return 0;
}

int report_mismatches(const std::vector<std::string>& bad, std::ostream& err,
                      const std::string& what) {
  for (const auto& line : bad) {
    err << line << "\n";
  }
  fail(ErrorKind::Data, std::to_string(bad.size()) + " " + what + " do not match the manifest");
}

int cmd_verify(const std::string& manifest_path, std::ostream& out, std::ostream& err) {
  const auto m = load_manifest(manifest_path);
  auto records = m.inputs;
  records.insert(records.end(), m.outputs.begin(), m.outputs.end());
  const auto bad = digest_mismatches(records);
  if (!bad.empty()) {
    return report_mismatches(bad, err, "files");
  }
  out << "verified " << records.size() << " files\n";
  return 0;
}

int cmd_replay(const std::string& manifest_path, const std::string& out_dir, std::ostream& out,
               std::ostream& err) {
  const auto m = load_manifest(manifest_path);
  if (const auto bad = digest_mismatches(m.inputs); !bad.empty()) {
    return report_mismatches(bad, err, "inputs");
  }
  const fs::path dir = fs::absolute(out_dir);
  ensure_dir(dir);
  auto args = rewrite_flag_values(m.args, kOutputFileFlags,
                                  [&](const std::string&, const std::string& v) {
                                    return (dir / fs::path(v).filename()).string();
                                  });
  args = rewrite_flag_values(args, {"--out-dir"},
                             [&](const std::string&, const std::string&) { return dir.string(); });
  std::ostringstream inner_out;
  if (const int rc = run_cli(args, inner_out, err); rc != 0) {
    return rc;
  }
  std::vector<FileRecord> replayed;
  for (const auto& r : m.outputs) {
    replayed.push_back({r.role, (dir / fs::path(r.path).filename()).string(), r.sha256});
  }
  if (const auto bad = digest_mismatches(replayed); !bad.empty()) {
    return report_mismatches(bad, err, "outputs");
  }
  out << inner_out.str() << "replayed " << m.command << ": " << replayed.size()
      << " outputs identical\n";
  return 0;
}

int exit_code(ErrorKind kind) {
  return kind == ErrorKind::Config || kind == ErrorKind::Usage ? 2 : 1;
}

}  // namespace

int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Deep barcodes: binarize embeddings, search by Hamming distance, evaluate"};
  app.name("deepbarcode");
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  const std::vector<std::string> methods{"minmax", "zerothresh"};
  const std::vector<std::string> metrics{"l1", "l2"};
  const std::vector<std::string> modes{"realvalued", "reducedreal", "barcode", "twostage",
                                       "reducedbarcode"};

  BinarizeOptions bo;
  auto* binarize = app.add_subcommand("binarize", "Convert a feature file to barcodes");
  binarize->add_option("--in", bo.in, "Input feature file (DFT1)")->required();
  binarize->add_option("--out", bo.out, "Output barcode file (DBC1)")->required();
  binarize->add_option("--method", bo.method, "Binarization rule")
      ->check(CLI::IsMember(methods))
      ->capture_default_str();
  binarize->add_option("--threads", bo.threads, "Worker threads (0 = all cores)");
  binarize->add_option("--manifest", bo.manifest, "Manifest path (default <out>.manifest.json)");

  auto* pca = app.add_subcommand("pca", "Fit or apply a PCA model");
  pca->require_subcommand(1);
  PcaFitOptions fo;
  auto* fit = pca->add_subcommand("fit", "Fit PCA on a feature file");
  fit->add_option("--in", fo.in, "Training feature file")->required();
  fit->add_option("--k,--n-pca", fo.k, "Number of components")->required();
  fit->add_option("--out", fo.out, "Output model file (DPC1)")->required();
  fit->add_option("--solver", fo.solver, "Eigensolver")
      ->check(CLI::IsMember({"auto", "svd", "covariance"}))
      ->capture_default_str();
  fit->add_option("--manifest", fo.manifest, "Manifest path (default <out>.manifest.json)");
  PcaTransformOptions to;
  auto* transform = pca->add_subcommand("transform", "Project a feature file");
  transform->add_option("--model", to.model, "Model file (DPC1)")->required();
  transform->add_option("--in", to.in, "Input feature file")->required();
  transform->add_option("--out", to.out, "Output feature file")->required();
  transform->add_option("--threads", to.threads, "Worker threads (0 = all cores)");
  transform->add_option("--manifest", to.manifest, "Manifest path (default <out>.manifest.json)");

  SearchOptions so;
  auto* search = app.add_subcommand("search", "Run a retrieval experiment and evaluate it");
  search->add_option("--train", so.train, "Training feature file")->required();
  search->add_option("--test", so.test, "Query feature file")->required();
  search->add_option("--train-labels", so.train_labels, "Training label file")->required();
  search->add_option("--test-labels", so.test_labels, "Query label file")->required();
  search->add_option("--out-dir", so.out_dir, "Directory for results, report and manifest")
      ->required();
  search->add_option("--mode", so.mode, "Search mode")
      ->check(CLI::IsMember(modes))
      ->capture_default_str();
  search->add_option("--metric", so.metric, "Real-valued distance")
      ->check(CLI::IsMember(metrics))
      ->capture_default_str();
  search->add_option("--method", so.method, "Binarization rule")
      ->check(CLI::IsMember(methods))
      ->capture_default_str();
  search->add_option("--n", so.n, "Stage-1 candidates")->capture_default_str();
  auto* n_pca = search->add_option("--n-pca,--k", so.n_pca, "PCA components (reduced modes)");
  search->add_option("--threads", so.threads, "Worker threads (0 = all cores)");
  search->add_option("--manifest", so.manifest, "Manifest path (default <out-dir>/manifest.json)");

  SynthOptions yo;
  auto* synth = app.add_subcommand("synth", "Generate labeled Gaussian clusters");
  synth->add_option("--classes", yo.spec.classes)->capture_default_str();
  synth->add_option("--per-class", yo.spec.per_class, "Training rows per class")
      ->capture_default_str();
  synth->add_option("--test-per-class", yo.spec.test_per_class, "Query rows per class")
      ->capture_default_str();
  synth->add_option("--dim", yo.spec.dim)->capture_default_str();
  synth->add_option("--separation", yo.spec.separation, "Distance between class means")
      ->capture_default_str();
  synth->add_option("--seed", yo.spec.seed)->capture_default_str();
  synth->add_option("--out-dir", yo.out_dir, "Output directory")->required();
  synth->add_option("--manifest", yo.manifest, "Manifest path (default <out-dir>/manifest.json)");

  std::string manifest_in, replay_dir;
  auto* verify = app.add_subcommand("verify", "Check recorded digests of a run");
  verify->add_option("--manifest", manifest_in, "Manifest file")->required();
  auto* replay = app.add_subcommand("replay", "Re-run a recorded command and compare outputs");
  replay->add_option("--manifest", manifest_in, "Manifest file")->required();
  replay->add_option("--out-dir", replay_dir, "Directory for the replayed outputs")->required();

  const std::vector<std::string> original = args;
  std::reverse(args.begin(), args.end());
  try {
    app.parse(std::move(args));
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*binarize) return cmd_binarize(bo, original, out);
    if (*fit) return cmd_pca_fit(fo, original, out);
    if (*transform) return cmd_pca_transform(to, original, out);
    if (*search) {
      so.has_n_pca = n_pca->count() > 0;
      return cmd_search(so, original, out);
    }
    if (*synth) return cmd_synth(yo, original, out);
    if (*verify) return cmd_verify(manifest_in, out, err);
    if (*replay) return cmd_replay(manifest_in, replay_dir, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace deepbarcode::cli
