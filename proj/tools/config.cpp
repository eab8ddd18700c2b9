#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "experiment.hpp"

namespace alchemy::cli {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  for (std::size_t pos; (pos = s.find(sep, start)) != std::string_view::npos; start = pos + 1)
    parts.emplace_back(trim(s.substr(start, pos - start)));
  parts.emplace_back(trim(s.substr(start)));
  return parts;
}

std::vector<std::string> tokens(std::string_view s) {
  std::istringstream in{std::string(s)};
  std::vector<std::string> out;
  for (std::string t; in >> t;) out.push_back(t);
  return out;
}

std::string strip_comment(std::string_view line) {
  const auto hash = line.find('#');
  return std::string(trim(hash == std::string_view::npos ? line : line.substr(0, hash)));
}

template <typename T>
T parse_number(std::string_view text, std::string_view what) {
  text = trim(text);
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw ConfigError(std::string(what) + ": cannot parse '" + std::string(text) + "' as a number");
  return value;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

std::pair<std::string, std::string> key_value(std::string_view token, std::string_view context) {
  const auto eq = token.find('=');
  if (eq == std::string_view::npos)
    throw ConfigError(std::string(context) + ": expected key=value, got '" + std::string(token) + "'");
  return {std::string(token.substr(0, eq)), std::string(token.substr(eq + 1))};
}

Window parse_window(std::string_view text) {
  const auto parts = split(text, ',');
  if (parts.size() != 2) throw ConfigError("window must be 'm,r', got '" + std::string(text) + "'");
  return Window{parse_number<int>(parts[0], "window"), parse_number<int>(parts[1], "window")};
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{
      "command",         "space.k",         "space.matrix",       "space.metric_base", "space.file",
      "potential",       "reference",       "target",             "past",              "fiber.pinned",
      "cylinders",       "n_range",         "normalization",      "arith",             "tolerance.perron",
      "tolerance.variational", "tolerance.audit", "gibbs.depth",  "gibbs.n_max",       "seed",
      "audit.enumeration_n",   "audit.chains", "transform.series"};
  return keys;
}

IndexMatrix parse_matrix_rows(const std::vector<std::string>& rows, int k) {
  if (static_cast<int>(rows.size()) != k)
    throw ConfigError("transition matrix needs " + std::to_string(k) + " rows, got " + std::to_string(rows.size()));
  IndexMatrix m(k, k);
  for (int i = 0; i < k; ++i) {
    const auto cells = tokens(rows[static_cast<std::size_t>(i)]);
    if (static_cast<int>(cells.size()) != k)
      throw ConfigError("transition matrix row " + std::to_string(i) + " needs " + std::to_string(k) + " entries");
    for (int j = 0; j < k; ++j) m(i, j) = parse_number<int>(cells[static_cast<std::size_t>(j)], "transition matrix");
  }
  return m;
}

ShiftSpace build(int k, std::optional<IndexMatrix> matrix, double metric_base) {
  if (k < 1) throw ConfigError("alphabet size must be positive");
  try {
    return build_shift(k, matrix ? *matrix : IndexMatrix::Ones(k, k), metric_base);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("shift space: ") + e.what());
  }
}

}  // namespace

KeyValues parse_key_values(std::string_view text) {
  KeyValues out;
  std::istringstream in{std::string(text)};
  int number = 0;
  for (std::string raw; std::getline(in, raw);) {
    ++number;
    const std::string line = strip_comment(raw);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(number) + ": expected 'key = value'");
    std::string key(trim(std::string_view(line).substr(0, eq)));
    std::string value(trim(std::string_view(line).substr(eq + 1)));
    if (key.empty()) throw ConfigError("line " + std::to_string(number) + ": empty key");
    out[key] = value;
  }
  return out;
}

std::string ExperimentConfig::hash() const {
  std::uint64_t h = 1469598103934665603ULL;
  for (const auto& [key, value] : entries)
    for (char c : key + "=" + value + "\n") {
      h ^= static_cast<unsigned char>(c);
      h *= 1099511628211ULL;
    }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Word parse_word(std::string_view text, int alphabet_size) {
  text = trim(text);
  if (text.empty()) throw ConfigError("empty word");
  Word word;
  if (text.find(',') != std::string_view::npos) {
    for (const auto& part : split(text, ',')) word.push_back(parse_number<int>(part, "word"));
  } else {
    if (alphabet_size > 10) throw ConfigError("words over more than 10 symbols must be comma-separated");
    for (char c : text) {
      if (!std::isdigit(static_cast<unsigned char>(c)))
        throw ConfigError("word '" + std::string(text) + "' contains '" + std::string(1, c) + "'");
      word.push_back(c - '0');
    }
  }
  for (Symbol s : word)
    if (s < 0 || s >= alphabet_size)
      throw ConfigError("word '" + std::string(text) + "': symbol " + std::to_string(s) + " outside alphabet 0.." +
                        std::to_string(alphabet_size - 1));
  return word;
}

std::vector<int> parse_n_range(std::string_view text) {
  text = trim(text);
  std::vector<int> ns;
  if (auto dots = text.find(".."); dots != std::string_view::npos) {
    std::string_view rest = text.substr(dots + 2);
    int step = 1;
    if (auto slash = rest.find('/'); slash != std::string_view::npos) {
      step = parse_number<int>(rest.substr(slash + 1), "n_range step");
      rest = rest.substr(0, slash);
    }
    const int a = parse_number<int>(text.substr(0, dots), "n_range");
    const int b = parse_number<int>(rest, "n_range");
    if (step < 1) throw ConfigError("n_range step must be positive");
    for (int n = a; n <= b; n += step) ns.push_back(n);
  } else {
    for (const auto& part : split(text, ',')) ns.push_back(parse_number<int>(part, "n_range"));
  }
  if (ns.empty()) throw ConfigError("n_range is empty");
  if (ns.front() < 1) throw ConfigError("n_range must start at n >= 1");
  if (std::adjacent_find(ns.begin(), ns.end(), std::greater_equal<>()) != ns.end())
    throw ConfigError("n_range must be strictly increasing");
  return ns;
}

std::vector<TwoSidedCylinder> parse_cylinders(const ShiftSpace& space, std::string_view text) {
  std::vector<TwoSidedCylinder> out;
  for (const auto& item : split(text, ';')) {
    if (item.empty()) continue;
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw ConfigError("cylinder '" + item + "' must be written first:word");
    const int first = parse_number<int>(std::string_view(item).substr(0, colon), "cylinder start");
    Word symbols = parse_word(std::string_view(item).substr(colon + 1), space.alphabet_size());
    try {
      out.push_back(make_cylinder(space, first, std::move(symbols)));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  return out;
}

ShiftSpace parse_shift_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::optional<int> k;
  double metric_base = 0.5;
  std::vector<std::string> rows;
  bool in_matrix = false;
  for (std::string raw; std::getline(in, raw);) {
    const std::string line = strip_comment(raw);
    if (line.empty()) continue;
    const auto parts = tokens(line);
    if (in_matrix && std::isdigit(static_cast<unsigned char>(parts.front().front()))) {
      rows.push_back(line);
    } else if (parts.front() == "k" && parts.size() == 2) {
      k = parse_number<int>(parts[1], "k");
    } else if (parts.front() == "metric_base" && parts.size() == 2) {
      metric_base = parse_number<double>(parts[1], "metric_base");
    } else if (parts.front() == "matrix" && parts.size() == 1) {
      in_matrix = true;
    } else {
      throw ConfigError("shift file: unexpected line '" + line + "'");
    }
  }
  if (!k) throw ConfigError("shift file: missing 'k'");
  std::optional<IndexMatrix> matrix;
  if (in_matrix) matrix = parse_matrix_rows(rows, *k);
  return build(*k, matrix, metric_base);
}

PotentialEntry parse_entry(std::string_view text) {
  text = trim(text);
  bool negative = false;
  std::string_view body = text;
  if (!body.empty() && (body.front() == '-' || body.front() == '+')) {
    negative = body.front() == '-';
    body.remove_prefix(1);
  }
  try {
    if (body.starts_with("log(") && body.ends_with(")")) {
      Rational q = parse_rational(body.substr(4, body.size() - 5));
      if (q <= 0) throw ConfigError("log argument must be positive in '" + std::string(text) + "'");
      if (negative) q = Rational(1) / q;
      return PotentialEntry{log_of(q), q};
    }
    const Rational v = parse_rational(text);
    if (v == 0) return PotentialEntry{0.0, Rational(1)};
    return PotentialEntry{to_double(v), std::nullopt};
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    throw ConfigError("cannot parse potential value '" + std::string(text) + "'");
  }
}

LocallyConstantPotential parse_potential_text(const ShiftSpace& space, std::string_view text) {
  std::istringstream in{std::string(text)};
  std::optional<Window> window;
  std::vector<std::pair<Word, PotentialEntry>> table;
  for (std::string raw; std::getline(in, raw);) {
    const std::string line = strip_comment(raw);
    if (line.empty()) continue;
    const auto parts = tokens(line);
    if (!window) {
      if (parts.size() != 3 || parts[0] != "window") throw ConfigError("potential file must start with 'window m r'");
      window = Window{parse_number<int>(parts[1], "window"), parse_number<int>(parts[2], "window")};
      continue;
    }
    if (parts.size() != 2) throw ConfigError("potential file: expected 'word value', got '" + line + "'");
    table.emplace_back(parse_word(parts[0], space.alphabet_size()), parse_entry(parts[1]));
  }
  if (!window) throw ConfigError("potential file is empty");
  try {
    return from_table(space, *window, table);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("potential table: ") + e.what());
  }
}

LocallyConstantPotential parse_potential_spec(const ShiftSpace& space, std::string_view spec,
                                              const std::filesystem::path& base_dir, std::mt19937_64& rng) {
  const auto parts = tokens(spec);
  if (parts.empty()) throw ConfigError("empty potential description");
  const std::string& kind = parts.front();
  const std::string context = "potential '" + kind + "'";
  try {
    if (kind == "zero") return constant_potential(space, 0.0, Rational(1));
    if (kind == "constant") {
      if (parts.size() != 2) throw ConfigError("constant potential takes one value, e.g. 'constant log(1/2)'");
      const PotentialEntry e = parse_entry(parts[1]);
      return constant_potential(space, e.value, e.exp_value);
    }
    if (kind == "bernoulli") {
      if (parts.size() != 2) throw ConfigError("bernoulli takes p=<prob> or weights=<w0,w1,...>");
      auto [key, value] = key_value(parts[1], context);
      std::vector<Rational> weights;
      if (key == "p") {
        if (space.alphabet_size() != 2) throw ConfigError("bernoulli p= needs two symbols; use weights=");
        const Rational p = parse_rational(value);
        weights = {p, Rational(1) - p};
      } else if (key == "weights") {
        for (const auto& w : split(value, ',')) weights.push_back(parse_rational(w));
      } else {
        throw ConfigError(context + ": unknown option '" + key + "'");
      }
      return bernoulli_potential(space, weights);
    }
    if (kind == "random") {
      Window window{0, 2};
      double low = -1.0, high = 1.0;
      for (std::size_t j = 1; j < parts.size(); ++j) {
        auto [key, value] = key_value(parts[j], context);
        if (key == "window") window = parse_window(value);
        else if (key == "low") low = parse_number<double>(value, "low");
        else if (key == "high") high = parse_number<double>(value, "high");
        else throw ConfigError(context + ": unknown option '" + key + "'");
      }
      return random_potential(space, window, rng, low, high);
    }
    if (kind == "table") {
      if (parts.size() < 2) throw ConfigError("table needs window=m,r followed by word:value entries");
      auto [key, value] = key_value(parts[1], context);
      if (key != "window") throw ConfigError("table must start with window=m,r");
      std::vector<std::pair<Word, PotentialEntry>> table;
      for (std::size_t j = 2; j < parts.size(); ++j) {
        const auto colon = parts[j].find(':');
        if (colon == std::string::npos) throw ConfigError("table entry '" + parts[j] + "' must be word:value");
        table.emplace_back(parse_word(std::string_view(parts[j]).substr(0, colon), space.alphabet_size()),
                           parse_entry(std::string_view(parts[j]).substr(colon + 1)));
      }
      return from_table(space, parse_window(value), table);
    }
    if (kind.starts_with("file=") || kind == "file") {
      const std::string name = kind == "file" ? (parts.size() == 2 ? parts[1] : "") : kind.substr(5);
      if (name.empty()) throw ConfigError("file potential needs a path");
      const std::filesystem::path path = base_dir / name;
      return parse_potential_text(space, read_file(path));
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(context + ": " + e.what());
  }
  throw ConfigError("unknown potential kind '" + kind + "'");
}

ExperimentConfig build_config(KeyValues entries, const std::filesystem::path& base_dir, const Overrides& overrides) {
  if (overrides.seed) entries["seed"] = std::to_string(*overrides.seed);
  if (overrides.arith) entries["arith"] = *overrides.arith;
  for (const auto& [key, value] : entries)
    if (!known_keys().contains(key)) throw ConfigError("unknown config key '" + key + "'");

  ExperimentConfig cfg;
  cfg.entries = entries;
  cfg.base_dir = base_dir;
  auto get = [&](const std::string& key) -> std::optional<std::string> {
    if (auto it = entries.find(key); it != entries.end()) return it->second;
    return std::nullopt;
  };

  if (auto file = get("space.file")) {
    if (get("space.k") || get("space.matrix")) throw ConfigError("give either space.file or space.k/space.matrix");
    cfg.space = parse_shift_text(read_file(base_dir / *file));
  } else {
    const auto k = get("space.k");
    if (!k) throw ConfigError("missing space.k (or space.file)");
    std::optional<IndexMatrix> matrix;
    const int size = parse_number<int>(*k, "space.k");
    if (auto m = get("space.matrix")) matrix = parse_matrix_rows(split(*m, ';'), size);
    const double base = get("space.metric_base") ? parse_number<double>(*get("space.metric_base"), "metric_base") : 0.5;
    cfg.space = build(size, matrix, base);
  }

  if (auto s = get("seed")) cfg.seed = parse_number<std::uint64_t>(*s, "seed");
  if (auto a = get("arith")) {
    if (*a != "exact" && *a != "float") throw ConfigError("arith must be exact or float");
    cfg.exact = *a == "exact";
  }
  if (auto n = get("normalization")) {
    if (*n == "raw") cfg.normalization = Normalization::raw;
    else if (*n == "pressure") cfg.normalization = Normalization::pressure;
    else throw ConfigError("normalization must be raw or pressure");
  }
  if (auto t = get("tolerance.perron")) cfg.thermo.perron.tolerance = parse_number<double>(*t, "tolerance.perron");
  if (auto t = get("tolerance.variational"))
    cfg.thermo.variational_tolerance = parse_number<double>(*t, "tolerance.variational");
  if (auto t = get("tolerance.audit")) cfg.audit.tolerance = parse_number<double>(*t, "tolerance.audit");
  if (auto v = get("gibbs.depth")) cfg.gibbs_depth = parse_number<int>(*v, "gibbs.depth");
  if (auto v = get("gibbs.n_max")) cfg.gibbs_n_max = parse_number<int>(*v, "gibbs.n_max");
  if (auto v = get("audit.enumeration_n")) cfg.audit.enumeration_n = parse_number<int>(*v, "audit.enumeration_n");
  if (auto v = get("audit.chains")) cfg.audit.chains = parse_number<int>(*v, "audit.chains");
  if (cfg.gibbs_depth < 0 || cfg.gibbs_n_max < 1) throw ConfigError("gibbs.depth must be >= 0 and gibbs.n_max >= 1");
  if (cfg.audit.enumeration_n < 1 || cfg.audit.chains < 0) throw ConfigError("audit settings out of range");

  std::mt19937_64 rng(cfg.seed);
  for (auto [key, slot] : {std::pair{"potential", &cfg.potential}, std::pair{"reference", &cfg.reference},
                           std::pair{"target", &cfg.target}})
    if (auto spec = get(key)) *slot = parse_potential_spec(cfg.space, *spec, base_dir, rng);

  if (auto p = get("past")) {
    try {
      cfg.past = PastWord(cfg.space, parse_word(*p, cfg.space.alphabet_size()));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  if (auto p = get("fiber.pinned")) {
    cfg.pinned = parse_word(*p, cfg.space.alphabet_size());
    if (cfg.past) {
      Word spliced = cfg.past->suffix(1);
      spliced.insert(spliced.end(), cfg.pinned.begin(), cfg.pinned.end());
      try {
        require_admissible(cfg.space, spliced, "past followed by fiber.pinned");
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
    }
  }
  if (auto c = get("cylinders")) cfg.cylinders = parse_cylinders(cfg.space, *c);
  if (auto n = get("n_range")) cfg.ns = parse_n_range(*n);
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path, const Overrides& overrides) {
  return build_config(parse_key_values(read_file(path)), path.parent_path(), overrides);
}

}  // namespace alchemy::cli
