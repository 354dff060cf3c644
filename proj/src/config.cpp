#include "heatda/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <fmt/format.h>

namespace heatda {

const char* to_string(PerturbationTarget target) {
  switch (target) {
    case PerturbationTarget::ObservationOnly: return "observation";
    case PerturbationTarget::SourceOnly: return "source";
    case PerturbationTarget::Both: return "both";
  }
  return "unknown";
}

RunConfig RunConfig::defaults(Variant variant) {
  RunConfig c;
  c.variant = variant;
  c.levels = {8, 16, 32, 64};
  c.deltas = {0.0};
  c.seed = 1;
  c.directory = "results";
  c.name = "report";
  if (variant == Variant::Unstable) {
    c.solution = "U1";
    c.boundary_condition = "none";
    c.T = 1.0;
    c.T1 = 0.25;
    c.T2 = 0.75;
    c.omega = {0.375, 0.625, 0.375, 0.625};
    c.B = {0.25, 0.75, 0.25, 0.75};
    c.norms = {NormKind::L2H1};
  } else {
    c.solution = "S1";
    c.boundary_condition = "dirichlet";
    c.T = 0.5;
    c.T1 = 0.25;
    c.T2 = 0.5;
    c.omega = {0.25, 0.75, 0.25, 0.75};
    c.B = Region::unit_square();
    c.norms = {NormKind::CinT_L2, NormKind::L2H1, NormKind::H1Hm1};
  }
  return c;
}

ExperimentSetup RunConfig::setup() const {
  ExperimentSetup s;
  s.variant = variant;
  s.solution_id = solution;
  s.levels = levels;
  s.ct = ct;
  s.T = T;
  s.T1 = T1;
  s.T2 = T2;
  s.omega = omega;
  s.window_region = B;
  s.norms = norms;
  s.seed = seed;
  s.method = solver;
  s.target = target;
  return s;
}

void RunConfig::validate() const {
  const char* expected = variant == Variant::Unstable ? "none" : "dirichlet";
  require(boundary_condition == expected, ErrorKind::Validation,
          fmt::format("problem.boundary_condition: {} takes '{}', got '{}'", to_string(variant), expected,
                      boundary_condition));
  require(!deltas.empty(), ErrorKind::Validation, "data.delta: list is empty");
  for (double d : deltas) {
    require(d >= 0.0 && std::isfinite(d), ErrorKind::Validation, "data.delta: amplitudes must be non-negative");
  }
  require(!name.empty() && name.find('/') == std::string::npos, ErrorKind::Validation,
          "output.name: must be a plain file stem");
  setup().validate();
}

std::string RunConfig::csv_path(std::string_view command) const {
  return fmt::format("{}/{}_{}.csv", directory, name, command);
}

std::string RunConfig::svg_path(std::string_view command, std::string_view kind) const {
  return fmt::format("{}/{}_{}_{}.svg", directory, name, command, kind);
}

namespace {

std::string join_ints(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + std::to_string(v[i]);
  return out;
}

std::string join_doubles(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += fmt::format("{}{}", i ? ", " : "", v[i]);
  return out;
}

std::string box(const Region& r) { return fmt::format("{} {} {} {}", r.x0, r.x1, r.y0, r.y1); }

}  // namespace

std::string RunConfig::render() const {
  std::string norm_list;
  for (std::size_t i = 0; i < norms.size(); ++i) norm_list += fmt::format("{}{}", i ? ", " : "", to_string(norms[i]));
  std::string out;
  out += fmt::format("[problem]\nvariant = {}\nsolution = {}\nboundary_condition = {}\n", to_string(variant), solution,
                     boundary_condition);
  out += fmt::format("[discretization]\nlevels = {}\nct = {}\nsolver = {}\n", join_ints(levels), ct,
                     heatda::to_string(solver));
  out += fmt::format("[time]\nT = {}\nT1 = {}\nT2 = {}\n", T, T1, T2);
  out += fmt::format("[geometry]\nomega = {}\nB = {}\n", box(omega), box(B));
  out += fmt::format("[data]\ndelta = {}\nseed = {}\ntarget = {}\n", join_doubles(deltas), seed,
                     heatda::to_string(target));
  out += fmt::format("[output]\ndirectory = {}\nname = {}\nsvg = {}\nnorms = {}\n", directory, name,
                     svg ? "true" : "false", norm_list);
  return out;
}

namespace {

struct Entry {
  std::string section;
  std::string key;
  std::string value;
  int line;
};

std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : value) {
    if (c == ',' || std::isspace(static_cast<unsigned char>(c))) {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

class ValueParser {
 public:
  ValueParser(const std::string& source, const Entry& e) : source_(source), e_(e) {}

  [[noreturn]] void bad(const std::string& what) const {
    fail(ErrorKind::Validation, fmt::format("{}:{}: {}.{}: {}", source_, e_.line, e_.section, e_.key, what));
  }

  double number(const std::string& text) const {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) {
      bad(fmt::format("'{}' is not a number", text));
    }
    return v;
  }

  double number() const { return number(e_.value); }

  long long integer(const std::string& text) const {
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) bad(fmt::format("'{}' is not an integer", text));
    return v;
  }

  std::uint64_t unsigned_integer() const {
    std::uint64_t v = 0;
    const std::string& text = e_.value;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
      bad(fmt::format("'{}' is not an unsigned 64-bit integer", text));
    }
    return v;
  }

  std::vector<int> int_list() const {
    std::vector<int> out;
    for (const auto& item : split_list(e_.value)) {
      const long long v = integer(item);
      if (v < 2 || v > 4096) bad(fmt::format("mesh level {} is outside [2, 4096]", v));
      out.push_back(static_cast<int>(v));
    }
    if (out.empty()) bad("empty list");
    return out;
  }

  std::vector<double> number_list() const {
    std::vector<double> out;
    for (const auto& item : split_list(e_.value)) out.push_back(number(item));
    if (out.empty()) bad("empty list");
    return out;
  }

  Region region() const {
    const auto items = split_list(e_.value);
    if (items.size() != 4) bad("expected four numbers 'x0 x1 y0 y1'");
    return {number(items[0]), number(items[1]), number(items[2]), number(items[3])};
  }

  bool boolean() const {
    const std::string v = lower(e_.value);
    if (v == "true" || v == "yes" || v == "1" || v == "on") return true;
    if (v == "false" || v == "no" || v == "0" || v == "off") return false;
    bad(fmt::format("'{}' is not a boolean", e_.value));
  }

  template <typename F>
  auto parsed(F&& f) const {
    try {
      return f(e_.value);
    } catch (const Error& err) {
      bad(err.what());
    }
  }

 private:
  const std::string& source_;
  const Entry& e_;
};

SolveMethod parse_solver(const std::string& s) {
  const std::string v = lower(s);
  if (v == "auto") return SolveMethod::Auto;
  if (v == "direct") return SolveMethod::Direct;
  if (v == "iterative" || v == "minres") return SolveMethod::Iterative;
  fail(ErrorKind::InvalidArgument, fmt::format("unknown solver '{}' (auto, direct, iterative)", s));
}

PerturbationTarget parse_target(const std::string& s) {
  const std::string v = lower(s);
  if (v == "both") return PerturbationTarget::Both;
  if (v == "observation") return PerturbationTarget::ObservationOnly;
  if (v == "source") return PerturbationTarget::SourceOnly;
  fail(ErrorKind::InvalidArgument, fmt::format("unknown target '{}' (both, observation, source)", s));
}

const std::map<std::string, std::vector<std::string>>& known_keys() {
  static const std::map<std::string, std::vector<std::string>> keys{
      {"problem", {"variant", "solution", "boundary_condition"}},
      {"discretization", {"levels", "ct", "solver"}},
      {"time", {"T", "T1", "T2"}},
      {"geometry", {"omega", "B"}},
      {"data", {"delta", "seed", "target"}},
      {"output", {"directory", "name", "svg", "norms"}},
  };
  return keys;
}

}  // namespace

RunConfig parse_config(std::string_view text, const std::string& source) {
  std::vector<Entry> entries;
  std::string section;
  int line_no = 0;
  std::istringstream in{std::string(text)};
  for (std::string raw; std::getline(in, raw);) {
    ++line_no;
    std::string line = trim(raw);
    const std::size_t comment = line.find_first_of("#;");
    if (comment != std::string::npos) line = trim(line.substr(0, comment));
    if (line.empty()) continue;
    auto where = [&](const std::string& what) {
      fail(ErrorKind::Validation, fmt::format("{}:{}: {}", source, line_no, what));
    };
    if (line.front() == '[') {
      if (line.back() != ']') where(fmt::format("malformed section header '{}'", line));
      section = trim(line.substr(1, line.size() - 2));
      if (!known_keys().count(section)) where(fmt::format("unknown section [{}]", section));
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) where(fmt::format("expected 'key = value', got '{}'", line));
    if (section.empty()) where("key outside of any [section]");
    Entry e{section, trim(line.substr(0, eq)), trim(line.substr(eq + 1)), line_no};
    const auto& keys = known_keys().at(section);
    if (std::find(keys.begin(), keys.end(), e.key) == keys.end()) {
      where(fmt::format("unknown key '{}' in [{}]", e.key, section));
    }
    if (e.value.empty()) where(fmt::format("{}.{}: empty value", section, e.key));
    for (const auto& prev : entries) {
      if (prev.section == e.section && prev.key == e.key) {
        where(fmt::format("{}.{}: duplicate key (first set on line {})", section, e.key, prev.line));
      }
    }
    entries.push_back(std::move(e));
  }

  Variant variant = Variant::Unstable;
  for (const auto& e : entries) {
    if (e.section == "problem" && e.key == "variant") {
      variant = ValueParser(source, e).parsed([](const std::string& v) { return parse_variant(v); });
    }
  }
  RunConfig c = RunConfig::defaults(variant);
  std::map<std::string, int> lines;
  for (const auto& e : entries) {
    const ValueParser p(source, e);
    const std::string field = e.section + "." + e.key;
    lines[field] = e.line;
    if (field == "problem.variant") {
      continue;
    } else if (field == "problem.solution") {
      c.solution = e.value;
    } else if (field == "problem.boundary_condition") {
      c.boundary_condition = lower(e.value);
    } else if (field == "discretization.levels") {
      c.levels = p.int_list();
    } else if (field == "discretization.ct") {
      c.ct = p.number();
    } else if (field == "discretization.solver") {
      c.solver = p.parsed(parse_solver);
    } else if (field == "time.T") {
      c.T = p.number();
      if (variant == Variant::Stable && !lines.count("time.T2")) c.T2 = c.T;
    } else if (field == "time.T1") {
      c.T1 = p.number();
    } else if (field == "time.T2") {
      c.T2 = p.number();
    } else if (field == "geometry.omega") {
      c.omega = p.region();
    } else if (field == "geometry.B") {
      c.B = p.region();
    } else if (field == "data.delta") {
      c.deltas = p.number_list();
    } else if (field == "data.seed") {
      c.seed = p.unsigned_integer();
    } else if (field == "data.target") {
      c.target = p.parsed(parse_target);
    } else if (field == "output.directory") {
      c.directory = e.value;
    } else if (field == "output.name") {
      c.name = e.value;
    } else if (field == "output.svg") {
      c.svg = p.boolean();
    } else if (field == "output.norms") {
      c.norms.clear();
      for (const auto& item : split_list(e.value)) {
        c.norms.push_back(p.parsed([&](const std::string&) { return parse_norm_kind(item); }));
      }
    }
  }
  // A stable run whose T was set after T2 was defaulted keeps T2 = T.
  if (variant == Variant::Stable && !lines.count("time.T2")) c.T2 = c.T;

  try {
    c.validate();
  } catch (const Error& e) {
    const std::string msg = e.what();
    const std::size_t colon = msg.find(':');
    const std::string field = colon == std::string::npos ? "" : msg.substr(0, colon);
    const auto it = lines.find(field);
    if (it != lines.end()) fail(ErrorKind::Validation, fmt::format("{}:{}: {}", source, it->second, msg));
    fail(ErrorKind::Validation, fmt::format("{}: {}", source, msg));
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, fmt::format("cannot read config file {}", path));
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), path);
}

}  // namespace heatda
