// rstkit command-line interface.
#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "rstkit/canonical.hpp"
#include "rstkit/decoder.hpp"
#include "rstkit/dwa.hpp"
#include "rstkit/eval.hpp"
#include "rstkit/preprocess.hpp"
#include "rstkit/report.hpp"
#include "rstkit/score_file.hpp"
#include "rstkit/segmenter.hpp"
#include "rstkit/treebank_io.hpp"

namespace fs = std::filesystem;
using namespace rstkit;

namespace {

// Relative inputs that do not exist are looked up under $RSTKIT_DATA_DIR.
std::string resolve_input(const std::string& path) {
  if (path == "-" || fs::exists(path) || fs::path(path).is_absolute()) return path;
  if (const char* dir = std::getenv("RSTKIT_DATA_DIR"); dir && *dir) {
    const auto candidate = fs::path(dir) / path;
    if (fs::exists(candidate)) return candidate.string();
  }
  return path;
}

std::string read_input(const std::string& path) {
  if (path == "-") {
    std::ostringstream s;
    s << std::cin.rdbuf();
    return s.str();
  }
  return read_file(path);
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
  } else {
    write_file(path, text);
  }
}

// A directory is read as .rs3 files, anything else as canonical JSONL.
Corpus load_corpus(const std::string& input, bool split_forests, std::size_t* files_read = nullptr) {
  const auto path = resolve_input(input);
  if (path != "-" && fs::is_directory(path)) return load_rs3_directory(path, split_forests, files_read);
  if (path != "-" && !fs::exists(path)) throw Error(ErrorKind::Io, path + ": no such file or directory");
  auto corpus = read_canonical_string(read_input(path), path == "-" ? "stdin" : fs::path(path).stem().string());
  if (files_read) *files_read = corpus.documents.size();
  return corpus;
}

void sort_by_id(Corpus& corpus) {
  std::stable_sort(corpus.documents.begin(), corpus.documents.end(),
                   [](const DocumentRecord& a, const DocumentRecord& b) { return a.id < b.id; });
}

template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < n;) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

std::vector<Metric> parse_metrics(const std::string& list) {
  std::vector<Metric> out;
  std::stringstream in(list);
  for (std::string item; std::getline(in, item, ',');)
    if (!item.empty()) out.push_back(parse_metric(item));
  if (out.empty()) throw Error(ErrorKind::InvalidArgument, "no metrics selected");
  return out;
}

// Loss log: one row per step, K comma-separated positive numbers. A first
// row that does not parse as numbers is taken as a header.
Eigen::MatrixXd read_loss_csv(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    std::stringstream cells(line);
    bool numeric = true;
    for (std::string cell; std::getline(cells, cell, ',');) {
      std::size_t pos = 0;
      double v = 0;
      try {
        v = std::stod(cell, &pos);
      } catch (const std::exception&) {
        numeric = false;
        break;
      }
      while (pos < cell.size() && std::isspace(static_cast<unsigned char>(cell[pos]))) ++pos;
      if (pos != cell.size()) {
        numeric = false;
        break;
      }
      row.push_back(v);
    }
    if (!numeric) {
      if (rows.empty() && line_no == 1) continue;
      throw Error(ErrorKind::ParseError, "loss log line " + std::to_string(line_no) + ": not a numeric row");
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw Error(ErrorKind::DimensionMismatch, "loss log line " + std::to_string(line_no) + ": expected " +
                                                    std::to_string(rows.front().size()) + " columns");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(ErrorKind::EmptyDataset, "loss log has no rows");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return m;
}

struct Options {
  // shared
  std::string input;
  std::string output;
  bool split_forests = false;
  bool csv = false;
  bool by_genre = false;
  std::uint64_t seed = 20240101;
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  // preprocess
  std::string remap;
  bool drop_single_edu = false;
  // stats
  std::string sents;
  // segmenter
  std::string model;
  int epochs = 30;
  double learning_rate = 0.05;
  double l2 = 0.0;
  int hash_bits = 16;
  std::string optimizer = "adam";
  // parse
  std::string scores;
  std::string baseline;
  std::string label;
  bool oracle = false;
  std::size_t beam = 0;
  std::string segmenter;
  // eval
  std::string pred;
  bool end_to_end = false;
  std::string metrics = "S,N,R,Full";
  // dwa
  std::size_t window = 12;
  double temperature = 2.0;
  int tasks = 0;
};

int cmd_convert(const Options& o) {
  std::size_t files = 0;
  auto corpus = load_corpus(o.input, o.split_forests, &files);
  PreprocessReport report;
  report.source_documents = files;
  corpus = preprocess(std::move(corpus), {}, report);
  write_output(o.output, write_canonical_string(corpus));
  std::cerr << report.summary();
  return 0;
}

int cmd_preprocess(const Options& o) {
  std::size_t files = 0;
  auto corpus = load_corpus(o.input, o.split_forests, &files);
  PreprocessOptions opts;
  if (!o.remap.empty()) opts.remap = o.remap == "default" ? RemapTable::rrt_default() : RemapTable::load(resolve_input(o.remap));
  opts.drop_single_edu = o.drop_single_edu;
  PreprocessReport report;
  report.source_documents = files;
  corpus = preprocess(std::move(corpus), opts, report);
  sort_by_id(corpus);
  write_output(o.output, write_canonical_string(corpus));
  std::cerr << report.summary();
  return 0;
}

int cmd_remap_table(const Options& o) {
  write_output(o.output, RemapTable::rrt_default().dump());
  return 0;
}

int cmd_stats(const Options& o) {
  auto corpus = load_corpus(o.input, o.split_forests);
  if (!o.sents.empty()) attach_sentences(corpus, load_sentence_file(resolve_input(o.sents)));
  const bool with_sentences =
      !o.sents.empty() || (!corpus.documents.empty() &&
                           std::all_of(corpus.documents.begin(), corpus.documents.end(),
                                       [](const DocumentRecord& d) { return d.sentence_starts.has_value(); }));
  std::map<std::string, CorpusStats> rows;
  if (o.by_genre) rows = genre_breakdown(corpus, with_sentences);
  rows.emplace(corpus.name.empty() ? "all" : corpus.name, corpus_stats(corpus, with_sentences));
  const auto table = stats_table(rows);
  write_output(o.output, o.csv ? table.csv() : table.text());
  return 0;
}

int cmd_train_segmenter(const Options& o) {
  const auto corpus = load_corpus(o.input, o.split_forests);
  const HashedWindowFeatures extractor(o.hash_bits);
  const auto data = make_dataset(corpus, extractor);
  Segmenter seg;
  seg.hash_bits = o.hash_bits;
  seg.model = SegmenterModel(2, extractor.dimension());
  crf::TrainConfig<double> config;
  config.epochs = o.epochs;
  config.learning_rate = o.learning_rate;
  config.l2 = o.l2;
  config.seed = o.seed;
  if (o.optimizer == "adam") {
    config.optimizer = crf::Optimizer::adam;
  } else if (o.optimizer == "sgd") {
    config.optimizer = crf::Optimizer::sgd;
  } else {
    throw Error(ErrorKind::InvalidArgument, "unknown optimizer '" + o.optimizer + "'");
  }
  const auto result = crf::train(seg.model, std::span<const TrainingSequence>(data), config);
  save_segmenter(o.model, seg);
  std::cerr << "trained on " << data.size() << " documents, final loss "
            << (result.loss_curve.empty() ? 0.0 : result.loss_curve.back()) << ", token accuracy "
            << percent(100.0 * crf::token_accuracy(seg.model, std::span<const TrainingSequence>(data))) << "%\n";
  return 0;
}

int cmd_segment(const Options& o) {
  const auto seg = load_segmenter(resolve_input(o.model));
  auto corpus = load_corpus(o.input, o.split_forests);
  parallel_for(corpus.documents.size(), o.threads, [&](std::size_t i) {
    auto& doc = corpus.documents[i];
    doc.edus = doc.tokens.empty() ? std::vector<EduSpan>{} : seg.segment(doc.tokens);
    doc.tree.reset();
  });
  sort_by_id(corpus);
  write_output(o.output, write_canonical_string(corpus));
  return 0;
}

int cmd_parse(const Options& o) {
  const int sources = !o.scores.empty() + !o.baseline.empty() + o.oracle;
  if (sources != 1)
    throw Error(ErrorKind::InvalidArgument, "choose exactly one of --scores, --baseline, --oracle");
  if (!o.baseline.empty() && o.baseline != "right-branching")
    throw Error(ErrorKind::InvalidArgument, "unknown baseline '" + o.baseline + "'");
  if (o.oracle && !o.segmenter.empty())
    throw Error(ErrorKind::InvalidArgument, "--oracle needs gold segmentation and cannot be combined with --segmenter");
  auto corpus = load_corpus(o.input, o.split_forests);

  std::optional<ScoreTable> table;
  LabelInventory labels;
  std::optional<RelationLabel> fixed_label;
  if (!o.scores.empty()) {
    table = load_score_file(resolve_input(o.scores));
    labels = table->labels;
  } else {
    labels = LabelInventory::from_corpus(corpus);
    if (!o.baseline.empty()) {
      if (!o.label.empty()) {
        fixed_label = split_label(o.label);
        if (!labels.index_of(*fixed_label)) {
          std::vector<std::string> names(labels.names().begin(), labels.names().end());
          names.push_back(o.label);
          std::sort(names.begin(), names.end());
          labels = LabelInventory(names);
        }
      } else {
        fixed_label = labels.size() ? majority_label(corpus) : RelationLabel{"elaboration", Nuclearity::NS};
        if (!labels.size()) labels = LabelInventory({merge_label(*fixed_label)});
      }
    }
  }
  const DecodeConfig config = o.beam > 0 ? DecodeConfig::beam(labels, o.beam) : DecodeConfig::greedy(labels);
  std::optional<Segmenter> seg;
  if (!o.segmenter.empty()) seg = load_segmenter(resolve_input(o.segmenter));

  parallel_for(corpus.documents.size(), o.threads, [&](std::size_t i) {
    auto& doc = corpus.documents[i];
    if (seg) doc.edus = doc.tokens.empty() ? std::vector<EduSpan>{} : seg->segment(doc.tokens);
    if (doc.edus.empty()) throw Error(ErrorKind::SchemaViolation, doc.id + ": document has no EDUs");
    std::unique_ptr<ScoreProvider> provider;
    if (table) {
      provider = std::make_unique<TableScoreProvider>(*table, doc.id);
    } else if (fixed_label) {
      provider = std::make_unique<RightBranchingProvider>(*fixed_label, labels);
    } else {
      if (!doc.tree) throw Error(ErrorKind::MissingTree, doc.id + ": --oracle needs gold trees");
      provider = std::make_unique<OracleProvider>(*doc.tree, labels);
    }
    try {
      doc.tree = decode(doc.edus.size(), *provider, config).with_edus(doc.edus);
    } catch (const Error& e) {
      throw Error(e.kind(), doc.id + ": " + e.what());
    }
  });
  sort_by_id(corpus);
  write_output(o.output, write_canonical_string(corpus));
  return 0;
}

int cmd_eval(const Options& o) {
  const auto gold = load_corpus(o.input, o.split_forests);
  const auto pred = load_corpus(o.pred, o.split_forests);
  const auto metrics = parse_metrics(o.metrics);
  const auto report = evaluate(gold, pred, o.end_to_end);
  std::map<std::string, ParsevalScores> rows;
  std::map<std::string, SegScores> seg;
  if (o.by_genre) {
    rows = report.by_genre;
    seg = report.segmentation_by_genre;
  }
  rows["all"] = report.total;
  seg["all"] = report.segmentation;
  const auto table = parseval_table(rows, metrics, o.end_to_end ? &seg : nullptr);
  write_output(o.output, o.csv ? table.csv() : table.text());
  return 0;
}

int cmd_dwa_sim(const Options& o) {
  const Eigen::MatrixXd log = read_loss_csv(read_input(resolve_input(o.input)));
  if (o.tasks != 0 && o.tasks != log.cols())
    throw Error(ErrorKind::DimensionMismatch, "--k " + std::to_string(o.tasks) + " but the loss log has " +
                                                  std::to_string(log.cols()) + " columns");
  dwa::DwaConfig config;
  config.tasks = log.cols();
  config.window = o.window;
  config.temperature = o.temperature;
  const Eigen::MatrixXd weights = dwa::replay<double>(log, config);
  std::ostringstream out;
  out << std::setprecision(17) << "step";
  for (Eigen::Index k = 0; k < weights.cols(); ++k) out << ",lambda_" << (k + 1);
  out << '\n';
  for (Eigen::Index i = 0; i < weights.rows(); ++i) {
    out << i;
    for (Eigen::Index k = 0; k < weights.cols(); ++k) out << ',' << weights(i, k);
    out << '\n';
  }
  write_output(o.output, out.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rstkit: RST treebank preprocessing, segmentation, decoding and evaluation"};
  app.require_subcommand(1);
  Options o;

  const auto out_opt = [&](CLI::App* c) { c->add_option("-o,--output", o.output, "output path (default stdout)"); };
  const auto forests = [&](CLI::App* c) {
    c->add_flag("--split-forests", o.split_forests, "emit one document per tree of a multi-tree .rs3 file");
  };
  const auto threads = [&](CLI::App* c) { c->add_option("--threads", o.threads, "worker threads")->check(CLI::PositiveNumber); };

  auto* convert = app.add_subcommand("convert", "read .rs3 files, binarize, write canonical JSONL");
  convert->add_option("input", o.input, ".rs3 directory")->required();
  out_opt(convert);
  forests(convert);

  auto* pre = app.add_subcommand("preprocess", "case-fold, remap labels and filter trees");
  pre->add_option("input", o.input, ".rs3 directory or canonical file")->required();
  out_opt(pre);
  forests(pre);
  pre->add_option("--remap", o.remap, "remap table path, or 'default' for the built-in table");
  pre->add_flag("--drop-single-edu", o.drop_single_edu, "drop trees with a single EDU");

  auto* remap = app.add_subcommand("remap-table", "print the built-in remap table");
  out_opt(remap);

  auto* stats = app.add_subcommand("stats", "corpus statistics");
  stats->add_option("input", o.input, ".rs3 directory or canonical file")->required();
  out_opt(stats);
  forests(stats);
  stats->add_option("--sents", o.sents, "sentence boundary file");
  stats->add_flag("--by-genre", o.by_genre, "one row per genre");
  stats->add_flag("--csv", o.csv, "CSV output");

  auto* train = app.add_subcommand("train-segmenter", "train the CRF EDU segmenter");
  train->add_option("input", o.input, "canonical training file")->required();
  train->add_option("-m,--model", o.model, "model output path")->required();
  train->add_option("--epochs", o.epochs)->check(CLI::PositiveNumber);
  train->add_option("--lr", o.learning_rate)->check(CLI::PositiveNumber);
  train->add_option("--l2", o.l2)->check(CLI::NonNegativeNumber);
  train->add_option("--bits", o.hash_bits, "feature hash bits")->check(CLI::Range(4, 24));
  train->add_option("--optimizer", o.optimizer)->check(CLI::IsMember({"adam", "sgd"}));
  train->add_option("--seed", o.seed, "shuffling seed");

  auto* segment = app.add_subcommand("segment", "predict EDUs with a trained segmenter");
  segment->add_option("model", o.model, "segmenter model")->required();
  segment->add_option("input", o.input, "canonical file")->required();
  out_opt(segment);
  threads(segment);

  auto* parse = app.add_subcommand("parse", "decode trees from scores, a baseline or the gold oracle");
  parse->add_option("input", o.input, "canonical file")->required();
  out_opt(parse);
  parse->add_option("--scores", o.scores, "score file");
  parse->add_option("--baseline", o.baseline, "baseline provider")->check(CLI::IsMember({"right-branching"}));
  parse->add_option("--label", o.label, "fixed label for the baseline, e.g. elaboration_NS");
  parse->add_flag("--oracle", o.oracle, "decode the gold trees");
  parse->add_option("--beam", o.beam, "beam width (0 = greedy)");
  parse->add_option("--segmenter", o.segmenter, "predict EDUs first with this model");
  threads(parse);

  auto* eval = app.add_subcommand("eval", "Parseval and segmentation scores");
  eval->add_option("gold", o.input, "gold canonical file or .rs3 directory")->required();
  eval->add_option("pred", o.pred, "predicted canonical file")->required();
  out_opt(eval);
  eval->add_flag("--end-to-end", o.end_to_end, "predictions carry their own segmentation");
  eval->add_flag("--by-genre", o.by_genre, "one row per genre");
  eval->add_option("--metrics", o.metrics, "comma-separated subset of S,N,R,Full");
  eval->add_flag("--csv", o.csv, "CSV output");

  auto* dwa_sim = app.add_subcommand("dwa-sim", "replay a loss log through DWA weighting");
  dwa_sim->add_option("losses", o.input, "CSV, one row per step, one column per task")->required();
  out_opt(dwa_sim);
  dwa_sim->add_option("--b", o.window, "window size")->check(CLI::PositiveNumber);
  dwa_sim->add_option("--temp", o.temperature, "temperature")->check(CLI::PositiveNumber);
  dwa_sim->add_option("--k", o.tasks, "expected task count")->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::string msg = e.what();
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    std::cerr << "rstkit: error: Usage: " << msg << '\n';
    return 1;
  }

  try {
    const auto* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    if (name == "convert") return cmd_convert(o);
    if (name == "preprocess") return cmd_preprocess(o);
    if (name == "remap-table") return cmd_remap_table(o);
    if (name == "stats") return cmd_stats(o);
    if (name == "train-segmenter") return cmd_train_segmenter(o);
    if (name == "segment") return cmd_segment(o);
    if (name == "parse") return cmd_parse(o);
    if (name == "eval") return cmd_eval(o);
    if (name == "dwa-sim") return cmd_dwa_sim(o);
    throw std::logic_error("unhandled subcommand " + name);
  } catch (const Error& e) {
    std::string msg = e.what();
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    std::cerr << "rstkit: error: " << error_kind_name(e.kind()) << ": " << msg << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::string msg = e.what();
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    std::cerr << "rstkit: error: Internal: " << msg << '\n';
    return 2;
  }
}
