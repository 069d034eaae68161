#include "rfm/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "rfm/config.hpp"
#include "rfm/engine.hpp"
#include "rfm/error.hpp"
#include "rfm/evaluation.hpp"
#include "rfm/fmap.hpp"
#include "rfm/image.hpp"
#include "rfm/similarity.hpp"

namespace rfm {

namespace fs = std::filesystem;

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string mean_pm_std(const MeanStd& ms) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f\xC2\xB1%.3f", ms.mean, ms.stddev);
  return buf;
}

void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw Error(ErrorCode::io_failure, "cannot create directory '" + dir.string() + "'");
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) ensure_directory(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::io_failure, "cannot create '" + path.string() + "'");
  out << text;
  if (!out) throw Error(ErrorCode::io_failure, "write failed for '" + path.string() + "'");
}

// Sibling path: "dir/matrix.csv" + "_cohorts" -> "dir/matrix_cohorts.csv".
fs::path with_suffix(const fs::path& path, const std::string& suffix) {
  fs::path out = path;
  out.replace_filename(path.stem().string() + suffix + path.extension().string());
  return out;
}

std::vector<fs::path> list_fmaps(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error(ErrorCode::io_failure, "'" + dir.string() + "' is not a directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".fmap") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

std::pair<int, int> parse_size(const std::string& text) {
  const auto x = text.find('x');
  int w = 0, h = 0;
  if (x == std::string::npos || std::sscanf(text.c_str(), "%dx%d", &w, &h) != 2 || w < 1 || h < 1) {
    throw Error(ErrorCode::invalid_argument, "size must be WxH with positive integers, got '" + text + "'");
  }
  return {w, h};
}

PipelineConfig config_from(const std::string& path) {
  return path.empty() ? PipelineConfig{} : load_config(path);
}

// ---- preprocess -------------------------------------------------------------

struct PreprocessArgs {
  std::vector<std::string> inputs;
  std::string out;
  std::string config;
  std::string size;
};

void preprocess(const PreprocessArgs& a) {
  PipelineConfig cfg = config_from(a.config);
  if (!a.size.empty()) std::tie(cfg.resize_width, cfg.resize_height) = parse_size(a.size);
  cfg.validate();

  std::set<std::string> stems;
  std::vector<std::pair<std::string, GrayImage>> results;
  for (const auto& in : a.inputs) {
    const std::string stem = fs::path(in).stem().string();
    if (!stems.insert(stem).second) throw Error(ErrorCode::invalid_argument, "duplicate input name '" + stem + "'");
    results.emplace_back(stem, resize_bspline(normalize_levels(load_image(in)), cfg.resize_width, cfg.resize_height));
  }
  ensure_directory(a.out);
  for (const auto& [stem, img] : results) save_png(img, fs::path(a.out) / (stem + ".png"));
}

// ---- extract ----------------------------------------------------------------

struct ExtractArgs {
  std::string image;
  std::string out;
  std::string config;
  std::string features;
  int kernel = 0;
  int ng = 0;
  int threads = -1;
};

void extract(const ExtractArgs& a) {
  PipelineConfig cfg = config_from(a.config);
  if (!a.features.empty()) cfg.features = parse_feature_selection(a.features);
  if (a.kernel != 0) cfg.kernel = a.kernel;
  if (a.ng != 0) cfg.ng = a.ng;
  if (a.threads >= 0) cfg.threads = static_cast<unsigned>(a.threads);
  cfg.validate();

  const GrayImage img = load_image(a.image);
  const FeatureMapStack stack = extract_maps(img, cfg.rfm(), cfg.threads);
  std::vector<std::pair<fs::path, std::vector<unsigned char>>> encoded;
  for (const auto& [index, map] : stack.maps()) {
    const auto name = feature_table()[static_cast<std::size_t>(index)].name;
    encoded.emplace_back(fs::path(a.out) / (std::string(name) + ".fmap"), encode_fmap(map, name));
  }
  ensure_directory(a.out);
  for (const auto& [path, bytes] : encoded) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorCode::io_failure, "write failed for '" + path.string() + "'");
  }
}

// ---- rank -------------------------------------------------------------------

struct RankArgs {
  std::string maps;
  std::string sms;
  std::string out;
  std::string config;
  int nmi_bins = 0;
};

FeatureMapStack load_stack(const fs::path& dir) {
  std::vector<std::pair<int, FloatMap>> maps;
  for (const auto& file : list_fmaps(dir)) {
    NamedMap nm = read_fmap(file);
    const auto index = feature_index(nm.name);
    if (!index) throw Error(ErrorCode::invalid_argument, "'" + file.string() + "' holds unknown feature '" + nm.name + "'");
    maps.emplace_back(*index, std::move(nm.map));
  }
  if (maps.empty()) throw Error(ErrorCode::empty_collection, "no feature maps in '" + dir.string() + "'");
  std::sort(maps.begin(), maps.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  for (std::size_t i = 1; i < maps.size(); ++i) {
    if (maps[i].first == maps[i - 1].first) throw Error(ErrorCode::invalid_argument, "duplicate feature in '" + dir.string() + "'");
  }
  const int w = maps.front().second.width();
  const int h = maps.front().second.height();
  return FeatureMapStack(w, h, std::move(maps));
}

void rank(const RankArgs& a, std::ostream& out) {
  PipelineConfig cfg = config_from(a.config);
  if (a.nmi_bins != 0) cfg.nmi_bins = a.nmi_bins;
  cfg.validate();

  std::vector<FeatureMapStack> stacks;
  std::vector<FloatMap> sms;
  for (const auto& file : list_fmaps(a.sms)) {
    const std::string id = file.stem().string();
    const fs::path dir = fs::path(a.maps) / id;
    if (!fs::is_directory(dir)) throw Error(ErrorCode::invalid_argument, "no feature maps for saliency map '" + id + "'");
    stacks.push_back(load_stack(dir));
    sms.push_back(read_fmap(file).map);
  }
  if (sms.empty()) throw Error(ErrorCode::empty_collection, "no saliency maps in '" + a.sms + "'");
  const RfmRanking ranking = rank_rfms(stacks, sms, cfg.nmi_bins);

  std::ostringstream csv;
  csv << "family,rank,feature,mean_cc,mean_nmi,selected\n";
  const auto emit = [&](const char* family, const std::vector<RankedFeature>& rows, int selected) {
    for (std::size_t r = 0; r < rows.size(); ++r) {
      csv << family << ',' << r + 1 << ',' << feature_table()[static_cast<std::size_t>(rows[r].feature)].name << ','
          << num(rows[r].mean.cc) << ',' << num(rows[r].mean.nmi) << ',' << (rows[r].feature == selected ? 1 : 0)
          << '\n';
    }
  };
  emit("glcm", ranking.glcm, ranking.selected_glcm);
  emit("glrlm", ranking.glrlm, ranking.selected_glrlm);
  write_text(a.out, csv.str());
  out << "selected glcm=" << feature_table()[static_cast<std::size_t>(ranking.selected_glcm)].name
      << " glrlm=" << feature_table()[static_cast<std::size_t>(ranking.selected_glrlm)].name << '\n';
}

// ---- ccmatrix ---------------------------------------------------------------

struct CcMatrixArgs {
  std::string sms;
  std::string labels;
  std::string out;
};

std::map<std::string, Cohort> read_labels(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io_failure, "cannot open '" + path.string() + "'");
  std::string line;
  std::getline(in, line);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "id,cohort") throw Error(ErrorCode::malformed_file, path.string() + ": header must be 'id,cohort'");
  std::map<std::string, Cohort> labels;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    const std::string where = path.string() + ":" + std::to_string(line_no);
    if (comma == std::string::npos || comma == 0 || line.find(',', comma + 1) != std::string::npos) {
      throw Error(ErrorCode::malformed_file, where + ": expected 'id,cohort'");
    }
    Cohort c{};
    try {
      c = parse_cohort(line.substr(comma + 1));
    } catch (const Error& e) {
      throw Error(ErrorCode::malformed_file, where + ": " + e.what());
    }
    if (!labels.emplace(line.substr(0, comma), c).second) {
      throw Error(ErrorCode::malformed_file, where + ": duplicate id");
    }
  }
  return labels;
}

void ccmatrix(const CcMatrixArgs& a) {
  const auto labels = read_labels(a.labels);
  struct Sample {
    std::string id;
    Cohort cohort;
    FloatMap map;
  };
  std::vector<Sample> samples;
  for (const auto& file : list_fmaps(a.sms)) {
    const std::string id = file.stem().string();
    const auto it = labels.find(id);
    if (it == labels.end()) throw Error(ErrorCode::invalid_argument, "saliency map '" + id + "' has no label");
    samples.push_back({id, it->second, read_fmap(file).map});
  }
  if (samples.size() != labels.size()) {
    throw Error(ErrorCode::invalid_argument, "label file lists ids without saliency maps");
  }
  // Display order: healthy, pneumonia, covid; ids ascending within a cohort.
  std::stable_sort(samples.begin(), samples.end(),
                   [](const Sample& x, const Sample& y) { return index_of(x.cohort) < index_of(y.cohort); });
  std::vector<FloatMap> maps;
  std::vector<Cohort> cohorts;
  for (const auto& s : samples) {
    maps.push_back(s.map);
    cohorts.push_back(s.cohort);
  }
  const CcMatrix m = sm_cc_matrix(maps, cohorts);

  std::ostringstream matrix;
  matrix << "id";
  for (const auto& s : samples) matrix << ',' << s.id;
  matrix << '\n';
  for (std::size_t i = 0; i < m.n; ++i) {
    matrix << samples[i].id;
    for (std::size_t j = 0; j < m.n; ++j) matrix << ',' << num(m.at(i, j));
    matrix << '\n';
  }
  std::ostringstream means;
  means << "cohort_a,cohort_b,pairs,mean_cc\n";
  for (const auto& cm : m.cohort_means) {
    means << to_string(cm.first) << ',' << to_string(cm.second) << ',' << cm.pairs << ',' << num(cm.mean) << '\n';
  }
  write_text(a.out, matrix.str());
  write_text(with_suffix(a.out, "_cohorts"), means.str());
}

// ---- metrics ----------------------------------------------------------------

struct MetricsArgs {
  std::vector<std::string> pred;
  std::vector<std::string> baseline;
  std::string out;
  std::string long_out;
};

constexpr const char* kMetricNames[4] = {"Sensitivity", "Specificity", "Accuracy", "AUC"};

double metric_value(const ClassScores& s, int metric) {
  switch (metric) {
    case 0: return s.sensitivity;
    case 1: return s.specificity;
    case 2: return s.accuracy;
    default: return s.auc;
  }
}

std::vector<ClassMetrics> metrics_for(const std::vector<std::string>& files) {
  std::vector<ClassMetrics> all;
  for (const auto& f : files) all.push_back(class_metrics(read_predictions_csv(f)));
  return all;
}

std::vector<double> column(const std::vector<ClassMetrics>& versions, Cohort c, int metric) {
  std::vector<double> values;
  for (const auto& v : versions) values.push_back(metric_value(v[c], metric));
  return values;
}

void metrics(const MetricsArgs& a) {
  if (!a.baseline.empty() && a.baseline.size() != a.pred.size()) {
    throw Error(ErrorCode::invalid_argument, "--baseline needs one file per --pred file");
  }
  const auto versions = metrics_for(a.pred);
  const auto baseline = metrics_for(a.baseline);

  std::ostringstream table;
  table << "metric,healthy,pneumonia,covid\n";
  for (int m = 0; m < 4; ++m) {
    table << kMetricNames[m];
    for (Cohort c : kCohorts) table << ',' << mean_pm_std(mean_std(column(versions, c, m)));
    table << '\n';
  }

  std::ostringstream detail;
  detail << "class,metric,mean,std,versions" << (baseline.empty() ? "" : ",baseline_mean,baseline_std,p_value") << '\n';
  for (Cohort c : kCohorts) {
    for (int m = 0; m < 4; ++m) {
      const auto values = column(versions, c, m);
      const MeanStd ms = mean_std(values);
      detail << to_string(c) << ',' << kMetricNames[m] << ',' << num(ms.mean) << ',' << num(ms.stddev) << ','
             << values.size();
      if (!baseline.empty()) {
        const auto base = column(baseline, c, m);
        const MeanStd bs = mean_std(base);
        detail << ',' << num(bs.mean) << ',' << num(bs.stddev) << ',' << num(wilcoxon_signed_rank(values, base).p_value);
      }
      detail << '\n';
    }
  }
  write_text(a.out, table.str());
  if (!a.long_out.empty()) write_text(a.long_out, detail.str());
}

// ---- roc --------------------------------------------------------------------

struct RocArgs {
  std::vector<std::string> pred;
  std::string out;
  double power = 1.0;
};

void roc(const RocArgs& a, std::ostream& out) {
  if (!(a.power > 0.0) || !std::isfinite(a.power)) throw Error(ErrorCode::invalid_argument, "--power-scale must be > 0");
  std::vector<PredictionSet> sets;
  for (const auto& f : a.pred) sets.push_back(read_predictions_csv(f));

  const auto display = [&](double v) { return a.power == 1.0 ? v : std::pow(v, a.power); };
  std::ostringstream csv;
  csv << "class,fpr,tpr_mean,tpr_std,tpr_lower,tpr_upper\n";
  for (Cohort c : kCohorts) {
    std::vector<RocCurve> curves;
    std::vector<double> aucs;
    for (const auto& s : sets) {
      curves.push_back(roc_auc(s, c));
      aucs.push_back(curves.back().auc);
    }
    RocBand band;
    if (curves.size() >= 2) {
      band = roc_band(curves);
    } else {
      band.fpr = roc_grid();
      band.mean = resample_tpr(curves.front());
      band.stddev.assign(band.mean.size(), 0.0);
      band.lower = band.mean;
      band.upper = band.mean;
    }
    for (std::size_t g = 0; g < band.fpr.size(); ++g) {
      csv << to_string(c) << ',' << num(band.fpr[g]) << ',' << num(display(band.mean[g])) << ','
          << num(band.stddev[g]) << ',' << num(display(band.lower[g])) << ',' << num(display(band.upper[g])) << '\n';
    }
    const MeanStd ms = mean_std(aucs);
    out << "auc " << to_string(c) << ' ' << num(ms.mean) << ' ' << num(ms.stddev) << '\n';
  }
  write_text(a.out, csv.str());
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Radiomic feature maps, saliency-guided selection and classifier evaluation", "rfmap"};
  app.require_subcommand(1);

  PreprocessArgs pre;
  auto* c_pre = app.add_subcommand("preprocess", "Normalize to 256 levels and resize with cubic B-splines");
  c_pre->add_option("inputs", pre.inputs, "Input PNG/PGM images")->required();
  c_pre->add_option("--out", pre.out, "Output directory")->required();
  c_pre->add_option("--config", pre.config, "key=value config file");
  c_pre->add_option("--size", pre.size, "Target size WxH (default from config, 256x256)");

  ExtractArgs ex;
  auto* c_ex = app.add_subcommand("extract", "Write one FMAP file per selected texture feature");
  c_ex->add_option("image", ex.image, "Input PNG/PGM image")->required();
  c_ex->add_option("--out", ex.out, "Output directory")->required();
  c_ex->add_option("--config", ex.config, "key=value config file");
  c_ex->add_option("--features", ex.features, "all | glcm | glrlm | comma-separated names");
  c_ex->add_option("--kernel", ex.kernel, "Window side length (odd, >= 3)");
  c_ex->add_option("--ng", ex.ng, "Quantization gray levels");
  c_ex->add_option("--threads", ex.threads, "Worker threads, 0 = all cores");

  RankArgs rk;
  auto* c_rk = app.add_subcommand("rank", "Rank feature maps by mean correlation with saliency maps");
  c_rk->add_option("--maps", rk.maps, "Directory of per-image feature map directories")->required();
  c_rk->add_option("--sms", rk.sms, "Directory of <id>.fmap saliency maps")->required();
  c_rk->add_option("--out", rk.out, "Ranking CSV")->required();
  c_rk->add_option("--config", rk.config, "key=value config file");
  c_rk->add_option("--nmi-bins", rk.nmi_bins, "Bins per map for normalized MI");

  CcMatrixArgs cm;
  auto* c_cm = app.add_subcommand("ccmatrix", "Saliency cross-correlation matrix with cohort-pair means");
  c_cm->add_option("--sms", cm.sms, "Directory of <id>.fmap saliency maps")->required();
  c_cm->add_option("--labels", cm.labels, "CSV with header id,cohort")->required();
  c_cm->add_option("--out", cm.out, "Matrix CSV; cohort means go to <stem>_cohorts.csv")->required();

  MetricsArgs mt;
  auto* c_mt = app.add_subcommand("metrics", "Per-class sensitivity, specificity, accuracy and AUC");
  c_mt->add_option("--pred", mt.pred, "Predictions CSV, one per model version")->required();
  c_mt->add_option("--out", mt.out, "Summary table CSV")->required();
  c_mt->add_option("--long", mt.long_out, "Full-precision per-class CSV");
  c_mt->add_option("--baseline", mt.baseline, "Paired baseline predictions for Wilcoxon p-values");

  RocArgs rc;
  auto* c_rc = app.add_subcommand("roc", "ROC mean and +/-1 std bands across prediction files");
  c_rc->add_option("--pred", rc.pred, "Predictions CSV, one per model version")->required();
  c_rc->add_option("--out", rc.out, "ROC band CSV")->required();
  c_rc->add_option("--power-scale", rc.power, "Display exponent applied to emitted TPR values");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: code=usage message=" << e.what() << '\n';
    return kExitValidation;
  }

  try {
    if (c_pre->parsed()) preprocess(pre);
    if (c_ex->parsed()) extract(ex);
    if (c_rk->parsed()) rank(rk, out);
    if (c_cm->parsed()) ccmatrix(cm);
    if (c_mt->parsed()) metrics(mt);
    if (c_rc->parsed()) roc(rc, out);
  } catch (const Error& e) {
    err << "error: code=" << to_string(e.code()) << " message=" << e.what() << '\n';
    return e.kind() == ErrorKind::io ? kExitIo : kExitValidation;
  } catch (const fs::filesystem_error& e) {
    err << "error: code=io_failure message=" << e.what() << '\n';
    return kExitIo;
  }
  return kExitOk;
}

}  // namespace rfm
