#include "qforest/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

#include "qforest/error.hpp"

namespace qforest::data {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr const char* kCacheMagic = "qforest-dataset";
constexpr int kCacheVersion = 1;

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool parse_double(std::string_view tok, double& out) {
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc{} && ptr == last && std::isfinite(out);
}

double parse_field(std::string_view tok, std::size_t line, std::size_t col) {
  double v = 0.0;
  if (!parse_double(trim(tok), v)) {
    throw IngestError("unparseable token '" + std::string(tok) + "' in column " + std::to_string(col + 1), line);
  }
  return v;
}

int parse_integral(double v, std::size_t line, const char* what) {
  if (v != std::floor(v)) throw IngestError(std::string(what) + " must be an integer", line);
  return static_cast<int>(v);
}

std::vector<std::string_view> split_on(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    const std::size_t start = i;
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return in;
}

}  // namespace

std::array<std::size_t, 2> Dataset::class_counts() const {
  std::array<std::size_t, 2> c{0, 0};
  for (const auto& s : samples) ++c[static_cast<std::size_t>(s.label)];
  return c;
}

std::size_t Dataset::rows_with_missing() const {
  std::set<std::size_t> rows;
  for (const auto& c : missing) rows.insert(c.row);
  return rows.size();
}

bool Dataset::has_unimputed_cells() const {
  return std::any_of(missing.begin(), missing.end(),
                     [&](const Cell& c) { return std::isnan(samples[c.row].features[c.col]); });
}

Dataset Dataset::subset(const std::vector<std::size_t>& indices) const {
  Dataset out{name, num_features, {}, {}};
  out.samples.reserve(indices.size());
  std::vector<std::vector<std::size_t>> new_rows(samples.size());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] >= samples.size()) throw StructuralError("subset index out of range");
    out.samples.push_back(samples[indices[i]]);
    new_rows[indices[i]].push_back(i);
  }
  for (const auto& c : missing) {
    for (std::size_t r : new_rows[c.row]) out.missing.push_back({r, c.col});
  }
  std::sort(out.missing.begin(), out.missing.end());
  return out;
}

Dataset Dataset::project(const std::vector<std::size_t>& columns) const {
  Dataset out{name, columns.size(), {}, {}};
  out.samples.reserve(samples.size());
  for (std::size_t c : columns) {
    if (c >= num_features) throw StructuralError("projection column out of range");
  }
  for (const auto& s : samples) {
    Sample p{std::vector<double>(columns.size()), s.label};
    for (std::size_t j = 0; j < columns.size(); ++j) p.features[j] = s.features[columns[j]];
    out.samples.push_back(std::move(p));
  }
  for (const auto& c : missing) {
    for (std::size_t j = 0; j < columns.size(); ++j) {
      if (columns[j] == c.col) out.missing.push_back({c.row, j});
    }
  }
  std::sort(out.missing.begin(), out.missing.end());
  return out;
}

bool Dataset::same_values(const Dataset& other) const {
  if (name != other.name || num_features != other.num_features || missing != other.missing ||
      samples.size() != other.samples.size()) {
    return false;
  }
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& a = samples[i];
    const auto& b = other.samples[i];
    if (a.label != b.label || a.features.size() != b.features.size()) return false;
    for (std::size_t j = 0; j < a.features.size(); ++j) {
      const double x = a.features[j];
      const double y = b.features[j];
      if (std::isnan(x) != std::isnan(y)) return false;
      if (!std::isnan(x) && std::memcmp(&x, &y, sizeof x) != 0) return false;
    }
  }
  return true;
}

// --- ingest -----------------------------------------------------------------

Dataset parse_cleveland(std::istream& in) {
  Dataset d{"cleveland", kHeartFeatures, {}, {}};
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = trim(raw);
    if (line.empty()) continue;
    const auto fields = split_on(line, ',');
    if (fields.size() != kHeartFeatures + 1) {
      throw IngestError("expected 14 comma-separated fields, got " + std::to_string(fields.size()), line_no);
    }
    Sample s{std::vector<double>(kHeartFeatures), 0};
    for (std::size_t j = 0; j < kHeartFeatures; ++j) {
      if (trim(fields[j]) == "?") {
        s.features[j] = kNaN;
        d.missing.push_back({d.samples.size(), j});
      } else {
        s.features[j] = parse_field(fields[j], line_no, j);
      }
    }
    if (trim(fields[kHeartFeatures]) == "?") throw IngestError("missing target", line_no);
    const int target = parse_integral(parse_field(fields[kHeartFeatures], line_no, kHeartFeatures), line_no, "target");
    if (target < 0 || target > 4) throw IngestError("target must be in 0..4", line_no);
    s.label = target == 0 ? 0 : 1;
    d.samples.push_back(std::move(s));
  }
  return d;
}

Dataset parse_statlog(std::istream& in) {
  Dataset d{"statlog", kHeartFeatures, {}, {}};
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = trim(raw);
    if (line.empty()) continue;
    const auto fields = split_ws(line);
    if (fields.size() != kHeartFeatures + 1) {
      throw IngestError("expected 14 whitespace-separated fields, got " + std::to_string(fields.size()), line_no);
    }
    Sample s{std::vector<double>(kHeartFeatures), 0};
    for (std::size_t j = 0; j <= kHeartFeatures; ++j) {
      if (fields[j] == "?") throw IngestError("missing value marker in Statlog data", line_no);
    }
    for (std::size_t j = 0; j < kHeartFeatures; ++j) s.features[j] = parse_field(fields[j], line_no, j);
    const int label = parse_integral(parse_field(fields[kHeartFeatures], line_no, kHeartFeatures), line_no, "label");
    if (label != 1 && label != 2) throw IngestError("label must be 1 or 2", line_no);
    s.label = label - 1;
    d.samples.push_back(std::move(s));
  }
  return d;
}

Dataset load_cleveland_raw(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_cleveland(in);
}

Dataset load_cleveland(const std::filesystem::path& path) { return impute_group_median(load_cleveland_raw(path)); }

Dataset load_statlog(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_statlog(in);
}

// --- imputation ---------------------------------------------------------------

double median(std::vector<double> values) {
  if (values.empty()) return kNaN;
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

Medians compute_medians(const Dataset& reference) {
  Medians m;
  for (auto& v : m.by_label) v.assign(reference.num_features, kNaN);
  m.pooled.assign(reference.num_features, kNaN);
  for (std::size_t j = 0; j < reference.num_features; ++j) {
    std::array<std::vector<double>, 2> by_label;
    std::vector<double> pooled;
    for (const auto& s : reference.samples) {
      const double v = s.features[j];
      if (std::isnan(v)) continue;
      by_label[static_cast<std::size_t>(s.label)].push_back(v);
      pooled.push_back(v);
    }
    m.by_label[0][j] = median(std::move(by_label[0]));
    m.by_label[1][j] = median(std::move(by_label[1]));
    m.pooled[j] = median(std::move(pooled));
  }
  return m;
}

Dataset impute(Dataset target, const Medians& medians, bool use_labels) {
  for (auto& s : target.samples) {
    for (std::size_t j = 0; j < s.features.size(); ++j) {
      if (!std::isnan(s.features[j])) continue;
      const double fill = use_labels ? medians.by_label[static_cast<std::size_t>(s.label)][j] : medians.pooled[j];
      if (std::isnan(fill)) {
        throw IngestError("feature " + std::to_string(j) + " has no observed values" +
                          (use_labels ? " for class " + std::to_string(s.label) : std::string{}));
      }
      s.features[j] = fill;
    }
  }
  return target;
}

Dataset impute_group_median(Dataset dataset) {
  const Medians m = compute_medians(dataset);
  return impute(std::move(dataset), m, true);
}

// --- standardisation ------------------------------------------------------------

Standardizer fit_standardizer(const Dataset& train) {
  if (train.empty()) throw ConfigError("cannot standardise against an empty training set");
  const std::size_t m = train.num_features;
  const double n = static_cast<double>(train.size());
  Standardizer st{std::vector<double>(m, 0.0), std::vector<double>(m, 0.0)};
  for (std::size_t j = 0; j < m; ++j) {
    double sum = 0.0;
    for (const auto& s : train.samples) sum += s.features[j];
    const double mean = sum / n;
    double ss = 0.0;
    for (const auto& s : train.samples) ss += (s.features[j] - mean) * (s.features[j] - mean);
    st.mean[j] = mean;
    st.stddev[j] = std::sqrt(ss / n);
  }
  return st;
}

Dataset Standardizer::apply(Dataset d) const {
  if (d.num_features != mean.size()) throw StructuralError("standardizer feature count mismatch");
  for (auto& s : d.samples) {
    for (std::size_t j = 0; j < s.features.size(); ++j) {
      const double centred = s.features[j] - mean[j];
      s.features[j] = stddev[j] > 0.0 ? centred / stddev[j] : centred;
    }
  }
  return d;
}

Standardized standardize(const Dataset& train, const std::vector<Dataset>& others) {
  Standardized out;
  out.stats = fit_standardizer(train);
  out.train = out.stats.apply(train);
  out.others.reserve(others.size());
  for (const auto& o : others) out.others.push_back(out.stats.apply(o));
  return out;
}

// --- splitting ----------------------------------------------------------------

namespace {

std::array<std::vector<std::size_t>, 2> shuffled_by_class(const Dataset& d, std::uint64_t seed) {
  std::array<std::vector<std::size_t>, 2> idx;
  for (std::size_t i = 0; i < d.size(); ++i) idx[static_cast<std::size_t>(d.samples[i].label)].push_back(i);
  std::mt19937_64 rng(seed);
  for (auto& v : idx) std::shuffle(v.begin(), v.end(), rng);
  return idx;
}

}  // namespace

std::vector<Split> stratified_kfold(const Dataset& dataset, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw ConfigError("k-fold needs k >= 2");
  const auto counts = dataset.class_counts();
  for (int c = 0; c < 2; ++c) {
    if (counts[c] > 0 && counts[c] < k) {
      throw ConfigError("class " + std::to_string(c) + " has " + std::to_string(counts[c]) +
                        " members, fewer than k=" + std::to_string(k));
    }
  }
  const auto by_class = shuffled_by_class(dataset, seed);
  std::vector<std::size_t> fold_of(dataset.size());
  std::size_t next = 0;
  for (const auto& members : by_class) {
    for (std::size_t i : members) {
      fold_of[i] = next;
      next = (next + 1) % k;
    }
  }
  std::vector<Split> folds(k);
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    for (std::size_t f = 0; f < k; ++f) (f == fold_of[i] ? folds[f].test : folds[f].train).push_back(i);
  }
  return folds;
}

Split holdout_split(const Dataset& dataset, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw ConfigError("train fraction must lie in (0, 1)");
  const auto by_class = shuffled_by_class(dataset, seed);
  Split s;
  for (const auto& members : by_class) {
    const auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(members.size())));
    for (std::size_t i = 0; i < members.size(); ++i) (i < n_train ? s.train : s.test).push_back(members[i]);
  }
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.test.begin(), s.test.end());
  return s;
}

// --- canonical cache ------------------------------------------------------------

void write_dataset(std::ostream& out, const Dataset& d) {
  const auto counts = d.class_counts();
  out << kCacheMagic << ' ' << kCacheVersion << '\n';
  out << "name " << d.name << '\n';
  out << "N " << d.size() << '\n';
  out << "m " << d.num_features << '\n';
  out << "labels " << counts[0] << ' ' << counts[1] << '\n';
  out << "missing " << d.missing.size() << '\n';
  for (const auto& c : d.missing) out << c.row << ' ' << c.col << '\n';
  out << "rows\n";
  out << std::setprecision(17);
  for (const auto& s : d.samples) {
    for (double v : s.features) {
      if (std::isnan(v)) out << '?';
      else out << v;
      out << ',';
    }
    out << s.label << '\n';
  }
}

Dataset read_dataset(std::istream& in) {
  std::size_t line_no = 0;
  std::string line;
  auto next_line = [&]() -> std::string& {
    if (!std::getline(in, line)) throw IngestError("unexpected end of dataset cache", line_no);
    ++line_no;
    return line;
  };
  auto expect_key = [&](const char* key) {
    std::istringstream ss(next_line());
    std::string k;
    ss >> k;
    if (k != key) throw IngestError(std::string("expected '") + key + "'", line_no);
    std::string rest;
    std::getline(ss >> std::ws, rest);
    return rest;
  };

  {
    std::istringstream ss(next_line());
    std::string magic;
    int version = 0;
    ss >> magic >> version;
    if (magic != kCacheMagic) throw IngestError("not a dataset cache file", line_no);
    if (version != kCacheVersion) throw IngestError("unsupported dataset cache version " + std::to_string(version), line_no);
  }
  Dataset d;
  d.name = expect_key("name");
  const std::size_t n = std::stoul(expect_key("N"));
  d.num_features = std::stoul(expect_key("m"));
  std::size_t c0 = 0;
  std::size_t c1 = 0;
  std::istringstream(expect_key("labels")) >> c0 >> c1;
  const std::size_t n_missing = std::stoul(expect_key("missing"));
  for (std::size_t i = 0; i < n_missing; ++i) {
    Cell c{};
    std::istringstream(next_line()) >> c.row >> c.col;
    d.missing.push_back(c);
  }
  expect_key("rows");
  for (std::size_t i = 0; i < n; ++i) {
    const auto fields = split_on(trim(next_line()), ',');
    if (fields.size() != d.num_features + 1) throw IngestError("wrong field count in cached row", line_no);
    Sample s{std::vector<double>(d.num_features), 0};
    for (std::size_t j = 0; j < d.num_features; ++j) {
      s.features[j] = fields[j] == "?" ? kNaN : parse_field(fields[j], line_no, j);
    }
    s.label = parse_integral(parse_field(fields.back(), line_no, d.num_features), line_no, "label");
    if (s.label != 0 && s.label != 1) throw IngestError("cached label must be 0 or 1", line_no);
    d.samples.push_back(std::move(s));
  }
  const auto counts = d.class_counts();
  if (counts[0] != c0 || counts[1] != c1) throw IngestError("label counts disagree with header");
  return d;
}

void save_dataset(const std::filesystem::path& path, const Dataset& dataset) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  write_dataset(out, dataset);
  if (!out) throw IoError("write failed for " + path.string());
}

Dataset load_dataset(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_dataset(in);
}

}  // namespace qforest::data
