#include "lpq/scenario.hpp"

#include <charconv>
#include <cctype>
#include <fstream>
#include <sstream>

namespace lpq {

namespace {

struct Entry {
  std::string value;
  int line = 0, col = 0, kcol = 0;
  bool quoted = false;
};
using Section = std::map<std::string, Entry>;

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::string fmt(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

template <class T>
std::string join(const std::vector<T>& v) {
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    if constexpr (std::is_floating_point_v<T>)
      s += fmt(v[i]);
    else
      s += std::to_string(v[i]);
  }
  return s;
}

class Reader {
public:
  Reader(std::string origin) : origin_(std::move(origin)) {}

  [[noreturn]] void fail(const Entry& e, const std::string& msg, int extra = 0) const {
    throw ConfigError(origin_, e.line, e.col + extra, msg);
  }
  [[noreturn]] void fail_key(const Entry& e, const std::string& msg) const {
    throw ConfigError(origin_, e.line, e.kcol, msg);
  }

  double number(const Entry& e) const {
    double v = 0;
    const char* b = e.value.data();
    const char* end = b + e.value.size();
    auto r = std::from_chars(b, end, v);
    if (r.ec != std::errc() || r.ptr != end) fail(e, "expected a number, got '" + e.value + "'");
    return v;
  }

  long integer(const Entry& e) const {
    long v = 0;
    const char* b = e.value.data();
    const char* end = b + e.value.size();
    auto r = std::from_chars(b, end, v);
    if (r.ec != std::errc() || r.ptr != end) fail(e, "expected an integer, got '" + e.value + "'");
    return v;
  }

  std::vector<double> numbers(const Entry& e) const {
    std::vector<double> out;
    size_t pos = 0;
    const std::string& s = e.value;
    while (pos <= s.size()) {
      size_t comma = s.find(',', pos);
      if (comma == std::string::npos) comma = s.size();
      std::string tok = trim(s.substr(pos, comma - pos));
      Entry sub{tok, e.line, e.col + static_cast<int>(pos), false};
      if (tok.empty()) fail(sub, "empty list element");
      out.push_back(number(sub));
      pos = comma + 1;
    }
    return out;
  }

  std::vector<long> integers(const Entry& e) const {
    std::vector<long> out;
    size_t pos = 0;
    const std::string& s = e.value;
    while (pos <= s.size()) {
      size_t comma = s.find(',', pos);
      if (comma == std::string::npos) comma = s.size();
      std::string tok = trim(s.substr(pos, comma - pos));
      Entry sub{tok, e.line, e.col + static_cast<int>(pos), false};
      if (tok.empty()) fail(sub, "empty list element");
      out.push_back(integer(sub));
      pos = comma + 1;
    }
    return out;
  }

  const std::string& origin() const { return origin_; }

private:
  std::string origin_;
};

std::map<std::string, Section> tokenize(const std::string& text, const std::string& origin, int& last_line) {
  std::map<std::string, Section> out;
  std::istringstream in(text);
  std::string raw, section;
  int ln = 0;
  while (std::getline(in, raw)) {
    ++ln;
    // strip comments outside quotes
    bool q = false;
    size_t cut = raw.size();
    for (size_t i = 0; i < raw.size(); ++i) {
      if (raw[i] == '"') q = !q;
      if (!q && (raw[i] == '#' || raw[i] == ';')) {
        cut = i;
        break;
      }
    }
    std::string line = raw.substr(0, cut);
    size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    int col0 = static_cast<int>(first) + 1;
    if (line[first] == '[') {
      size_t close = line.find(']', first);
      if (close == std::string::npos) throw ConfigError(origin, ln, col0, "unterminated section header");
      section = trim(line.substr(first + 1, close - first - 1));
      if (section != "domain" && section != "operator" && section != "hypotheses" && section != "run")
        throw ConfigError(origin, ln, col0 + 1, "unknown section [" + section + "]");
      if (!trim(line.substr(close + 1)).empty())
        throw ConfigError(origin, ln, static_cast<int>(close) + 2, "trailing characters after section header");
      out[section];
      continue;
    }
    size_t eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(origin, ln, col0, "expected 'key = value'");
    if (section.empty()) throw ConfigError(origin, ln, col0, "entry outside of any section");
    std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError(origin, ln, col0, "missing key");
    size_t vstart = line.find_first_not_of(" \t", eq + 1);
    Entry e;
    e.line = ln;
    e.kcol = col0;
    if (vstart == std::string::npos) throw ConfigError(origin, ln, static_cast<int>(eq) + 2, "missing value");
    e.col = static_cast<int>(vstart) + 1;
    if (line[vstart] == '"') {
      size_t close = line.find('"', vstart + 1);
      if (close == std::string::npos) throw ConfigError(origin, ln, e.col, "unterminated string");
      e.value = line.substr(vstart + 1, close - vstart - 1);
      e.quoted = true;
      e.col += 1;
      if (!trim(line.substr(close + 1)).empty())
        throw ConfigError(origin, ln, static_cast<int>(close) + 2, "trailing characters after string");
    } else {
      e.value = trim(line.substr(vstart));
    }
    auto& sec = out[section];
    if (sec.count(key)) throw ConfigError(origin, ln, col0, "duplicate key '" + key + "'");
    sec[key] = e;
  }
  last_line = ln;
  return out;
}

// "12" -> (0, 1); exactly `n` digits 1..lim
bool digits(const std::string& s, size_t n, int lim, std::vector<int>& out) {
  if (s.size() != n) return false;
  out.clear();
  for (char ch : s) {
    if (ch < '1' || ch > '9' || ch - '0' > lim) return false;
    out.push_back(ch - '1');
  }
  return true;
}

}  // namespace

Scenario parse_scenario(const std::string& text, const std::string& origin) {
  int last = 0;
  auto secs = tokenize(text, origin, last);
  Reader rd(origin);
  Scenario sc;
  auto need = [&](const std::string& sec, const std::string& key) -> const Entry& {
    auto s = secs.find(sec);
    if (s == secs.end()) throw ConfigError(origin, last, 1, "missing section [" + sec + "]");
    auto k = s->second.find(key);
    if (k == s->second.end()) throw ConfigError(origin, last, 1, "missing key '" + key + "' in [" + sec + "]");
    return k->second;
  };
  auto get = [&](const std::string& sec, const std::string& key) -> const Entry* {
    auto s = secs.find(sec);
    if (s == secs.end()) return nullptr;
    auto k = s->second.find(key);
    return k == s->second.end() ? nullptr : &k->second;
  };

  // [domain]
  const Entry& ed = need("domain", "d");
  long d = rd.integer(ed);
  if (d < 1 || d > 9) rd.fail(ed, "dimension must be between 1 and 9");
  auto axes = [&](const Entry& e) {
    auto v = rd.numbers(e);
    if (v.size() == 1) v.assign(d, v[0]);
    if (static_cast<long>(v.size()) != d) rd.fail(e, "expected 1 or " + std::to_string(d) + " values");
    return v;
  };
  const Entry& elo = need("domain", "lower");
  const Entry& ehi = need("domain", "upper");
  const Entry& ecell = need("domain", "cells");
  std::vector<double> lo = axes(elo), hi = axes(ehi);
  std::vector<long> cl = rd.integers(ecell);
  if (cl.size() == 1) cl.assign(d, cl[0]);
  if (static_cast<long>(cl.size()) != d) rd.fail(ecell, "expected 1 or " + std::to_string(d) + " values");
  try {
    sc.grid = BoxDomain(lo, hi, std::vector<int>(cl.begin(), cl.end()));
  } catch (const std::exception& ex) {
    rd.fail(ecell, ex.what());
  }
  for (const auto& [k, e] : secs["domain"])
    if (k != "d" && k != "lower" && k != "upper" && k != "cells") rd.fail_key(e, "unknown key '" + k + "' in [domain]");

  // [operator]
  const Entry& em = need("operator", "m");
  long m = rd.integer(em);
  if (m < 1 || m > 9) rd.fail(em, "system size must be between 1 and 9");
  sc.sys = CoefficientSystem(static_cast<int>(d), static_cast<int>(m));
  CoefficientSystem& sys = sc.sys;
  std::vector<std::pair<int, int>> qset;
  for (const auto& [key, e] : secs["operator"]) {
    if (key == "m") continue;
    auto setf = [&](MatrixField& f, int i, int j) {
      if (!e.quoted) rd.fail(e, "expressions must be quoted");
      try {
        f.set(i, j, e.value, static_cast<int>(d));
      } catch (const ParseError& pe) {
        rd.fail(e, pe.what(), static_cast<int>(pe.offset()));
      }
    };
    std::vector<std::string> parts;
    {
      std::string cur;
      for (char ch : key) {
        if (ch == '.') {
          parts.push_back(cur);
          cur.clear();
        } else {
          cur += ch;
        }
      }
      parts.push_back(cur);
    }
    std::vector<int> hk, ij;
    if (parts[0] == "table") {
      if (!e.quoted) rd.fail(e, "table paths must be quoted");
      std::string block = key.substr(6);
      sc.tables[block] = e.value;
      continue;
    }
    if (parts[0] == "q" && parts.size() == 2 && digits(parts[1], 2, static_cast<int>(d), hk)) {
      setf(sys.Q, hk[0], hk[1]);
      qset.emplace_back(hk[0], hk[1]);
    } else if (parts[0] == "a" && parts.size() == 3 && digits(parts[1], 2, static_cast<int>(d), hk) &&
               digits(parts[2], 2, static_cast<int>(m), ij)) {
      if (sys.A.empty()) sys.A.assign(d, std::vector<MatrixField>(d, MatrixField(static_cast<int>(m), static_cast<int>(m))));
      setf(sys.A[hk[0]][hk[1]], ij[0], ij[1]);
    } else if ((parts[0] == "b" || parts[0] == "c") && parts.size() == 3 &&
               digits(parts[1], 1, static_cast<int>(d), hk) && digits(parts[2], 2, static_cast<int>(m), ij)) {
      auto& vec = parts[0] == "b" ? sys.B : sys.C;
      if (vec.empty()) vec.assign(d, MatrixField(static_cast<int>(m), static_cast<int>(m)));
      setf(vec[hk[0]], ij[0], ij[1]);
    } else if ((parts[0] == "v" || parts[0] == "w") && parts.size() == 2 &&
               digits(parts[1], 2, static_cast<int>(m), ij)) {
      setf(parts[0] == "v" ? sys.V : sys.W, ij[0], ij[1]);
    } else {
      rd.fail_key(e, "unknown or out-of-range coefficient key '" + key + "'");
    }
  }
  // an off-diagonal q given once is mirrored
  for (auto [h, k] : qset)
    if (h != k && !sys.Q.entries[static_cast<size_t>(k) * d + h])
      sys.Q.entries[static_cast<size_t>(k) * d + h] = sys.Q.entries[static_cast<size_t>(h) * d + k];
  for (const auto& [block, path] : sc.tables) {
    const Entry& e = secs["operator"]["table." + block];
    std::vector<int> hk;
    MatrixField* f = nullptr;
    int rows = static_cast<int>(m);
    if (block == "q") {
      f = &sys.Q;
      rows = static_cast<int>(d);
    } else if (block == "v") {
      f = &sys.V;
    } else if (block == "w") {
      f = &sys.W;
    } else if (block.size() == 3 && (block[0] == 'b' || block[0] == 'c') && block[1] == '.' &&
               digits(block.substr(2), 1, static_cast<int>(d), hk)) {
      auto& vec = block[0] == 'b' ? sys.B : sys.C;
      if (vec.empty()) vec.assign(d, MatrixField(static_cast<int>(m), static_cast<int>(m)));
      f = &vec[hk[0]];
    } else if (block.size() == 4 && block[0] == 'a' && block[1] == '.' && digits(block.substr(2), 2, static_cast<int>(d), hk)) {
      if (sys.A.empty()) sys.A.assign(d, std::vector<MatrixField>(d, MatrixField(static_cast<int>(m), static_cast<int>(m))));
      f = &sys.A[hk[0]][hk[1]];
    } else {
      rd.fail_key(e, "unknown table block '" + block + "'");
    }
    try {
      f->table = load_table_csv(path, rows, rows, sc.grid.node_count());
    } catch (const std::exception& ex) {
      rd.fail(e, ex.what());
    }
  }
  if (sys.Q.is_zero()) throw ConfigError(origin, em.line, em.col, "diffusion matrix q is not given");
  if (sys.V.is_zero()) throw ConfigError(origin, em.line, em.col, "potential v is not given");

  // [hypotheses]
  if (const Entry* e = get("hypotheses", "mode")) {
    if (e->value == "fixed" || e->value == "fixed_gamma")
      sc.mode.kind = HypMode::Kind::Fixed;
    else if (e->value == "refined")
      sc.mode.kind = HypMode::Kind::Refined;
    else if (e->value == "kernel")
      sc.mode.kind = HypMode::Kind::Kernel;
    else
      rd.fail(*e, "mode must be fixed, refined or kernel");
  }
  for (const auto& [k, e] : secs["hypotheses"]) {
    if (k == "mode") continue;
    double v = rd.number(e);
    if (k == "gamma") {
      if (!(v > 0)) rd.fail(e, "gamma must be positive");
      sc.mode.gamma = v;
    } else if (k == "Cgamma" || k == "cgamma") {
      sc.mode.Cgamma = v;
    } else if (k == "a") {
      sc.mode.a = v;
    } else if (k == "b") {
      sc.mode.b = v;
    } else if (k == "beta") {
      sc.mode.beta = v;
    } else if (k == "c") {
      sc.mode.c = v;
    } else {
      rd.fail_key(e, "unknown key '" + k + "' in [hypotheses]");
    }
  }

  // [run]
  RunParams& r = sc.run;
  for (const auto& [k, e] : secs["run"]) {
    if (k == "name") {
      sc.name = e.value;
    } else if (k == "family") {
      sc.family = e.value;
    } else if (k == "seed") {
      long s = rd.integer(e);
      if (s < 0) rd.fail(e, "seed must be nonnegative");
      r.seed = static_cast<unsigned long>(s);
      r.has_seed = true;
    } else if (k == "p") {
      r.p = rd.numbers(e);
      for (double p : r.p)
        if (!(p > 1)) rd.fail(e, "every p must exceed 1");
    } else if (k == "t_final") {
      r.t_final = rd.number(e);
      if (!(r.t_final > 0)) rd.fail(e, "t_final must be positive");
    } else if (k == "dt") {
      r.dt = rd.number(e);
      if (!(r.dt > 0)) rd.fail(e, "dt must be positive");
    } else if (k == "scheme") {
      try {
        r.scheme = parse_scheme(e.value);
      } catch (const std::exception& ex) {
        rd.fail(e, ex.what());
      }
    } else if (k == "samples") {
      r.samples = static_cast<int>(rd.integer(e));
    } else if (k == "checkpoints") {
      r.checkpoints = static_cast<int>(rd.integer(e));
    } else if (k == "kmax") {
      r.kmax = static_cast<int>(rd.integer(e));
    } else if (k == "refine_iters") {
      r.refine_iters = static_cast<int>(rd.integer(e));
    } else if (k == "refine_horizon") {
      r.refine_horizon = rd.number(e);
    } else if (k == "tol_scale") {
      r.tol_scale = rd.number(e);
    } else if (k == "kernel_times") {
      r.kernel_times = rd.numbers(e);
    } else if (k == "kernel_source") {
      r.kernel_source = rd.numbers(e);
      if (static_cast<long>(r.kernel_source.size()) != d) rd.fail(e, "kernel_source needs d coordinates");
    } else if (k == "distance_source") {
      r.distance_source = rd.numbers(e);
      if (static_cast<long>(r.distance_source.size()) != d) rd.fail(e, "distance_source needs d coordinates");
    } else if (k == "stencil") {
      r.stencil = static_cast<int>(rd.integer(e));
      if (r.stencil != 4 && r.stencil != 8 && r.stencil != 16) rd.fail(e, "stencil must be 4, 8 or 16");
    } else if (k == "nittka_grids") {
      auto v = rd.integers(e);
      r.nittka_grids.assign(v.begin(), v.end());
    } else if (k == "nittka_samples") {
      r.nittka_samples = static_cast<int>(rd.integer(e));
    } else if (k == "reference_grid") {
      r.reference_grid = static_cast<int>(rd.integer(e));
    } else if (k == "probe_pairs") {
      r.probe_pairs = static_cast<int>(rd.integer(e));
    } else {
      rd.fail_key(e, "unknown key '" + k + "' in [run]");
    }
  }
  if (!r.has_seed) throw ConfigError(origin, last, 1, "[run] seed is mandatory");
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, 0, 0, "cannot open scenario file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str(), path);
}

std::string to_text(const Scenario& s) {
  std::ostringstream os;
  const BoxDomain& g = s.grid;
  os << "[domain]\n";
  os << "d = " << g.d << "\n";
  os << "lower = " << join(g.lower) << "\n";
  os << "upper = " << join(g.upper) << "\n";
  os << "cells = " << join(g.n) << "\n\n";
  os << "[operator]\n";
  const CoefficientSystem& sys = s.sys;
  os << "m = " << sys.m << "\n";
  auto field = [&](const std::string& prefix, const MatrixField& f) {
    if (f.table) return;
    for (int i = 0; i < f.rows; ++i)
      for (int j = 0; j < f.cols; ++j) {
        const Expr& e = f.entries[static_cast<size_t>(i) * f.cols + j];
        if (e) os << prefix << i + 1 << j + 1 << " = \"" << print_expr(e) << "\"\n";
      }
  };
  field("q.", sys.Q);
  for (size_t h = 0; h < sys.A.size(); ++h)
    for (size_t k = 0; k < sys.A[h].size(); ++k)
      field("a." + std::to_string(h + 1) + std::to_string(k + 1) + ".", sys.A[h][k]);
  for (size_t h = 0; h < sys.B.size(); ++h) field("b." + std::to_string(h + 1) + ".", sys.B[h]);
  for (size_t h = 0; h < sys.C.size(); ++h) field("c." + std::to_string(h + 1) + ".", sys.C[h]);
  field("v.", sys.V);
  field("w.", sys.W);
  for (const auto& [block, path] : s.tables) os << "table." << block << " = \"" << path << "\"\n";
  os << "\n[hypotheses]\n";
  os << "mode = " << (s.mode.kind == HypMode::Kind::Fixed ? "fixed" : s.mode.kind == HypMode::Kind::Refined ? "refined" : "kernel")
     << "\n";
  switch (s.mode.kind) {
    case HypMode::Kind::Fixed:
      os << "gamma = " << fmt(s.mode.gamma) << "\nCgamma = " << fmt(s.mode.Cgamma) << "\n";
      break;
    case HypMode::Kind::Refined:
      os << "a = " << fmt(s.mode.a) << "\nb = " << fmt(s.mode.b) << "\n";
      break;
    case HypMode::Kind::Kernel:
      os << "beta = " << fmt(s.mode.beta) << "\nc = " << fmt(s.mode.c) << "\n";
      break;
  }
  const RunParams& r = s.run;
  os << "\n[run]\n";
  os << "name = " << s.name << "\n";
  if (!s.family.empty()) os << "family = " << s.family << "\n";
  os << "seed = " << r.seed << "\n";
  if (!r.p.empty()) os << "p = " << join(r.p) << "\n";
  os << "t_final = " << fmt(r.t_final) << "\n";
  if (r.dt > 0) os << "dt = " << fmt(r.dt) << "\n";
  os << "scheme = " << scheme_name(r.scheme) << "\n";
  os << "samples = " << r.samples << "\n";
  os << "checkpoints = " << r.checkpoints << "\n";
  os << "kmax = " << r.kmax << "\n";
  os << "refine_iters = " << r.refine_iters << "\n";
  os << "refine_horizon = " << fmt(r.refine_horizon) << "\n";
  os << "tol_scale = " << fmt(r.tol_scale) << "\n";
  if (!r.kernel_times.empty()) os << "kernel_times = " << join(r.kernel_times) << "\n";
  if (!r.kernel_source.empty()) os << "kernel_source = " << join(r.kernel_source) << "\n";
  if (!r.distance_source.empty()) os << "distance_source = " << join(r.distance_source) << "\n";
  os << "stencil = " << r.stencil << "\n";
  if (!r.nittka_grids.empty()) os << "nittka_grids = " << join(r.nittka_grids) << "\n";
  os << "nittka_samples = " << r.nittka_samples << "\n";
  os << "reference_grid = " << r.reference_grid << "\n";
  os << "probe_pairs = " << r.probe_pairs << "\n";
  return os.str();
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string scenario_hash(const Scenario& s) { return hex64(fnv1a(to_text(s))); }

void apply_overrides(Scenario& s, const Overrides& o) {
  if (o.grid > 0) {
    if (!s.tables.empty()) throw ConfigError("--grid", 0, 0, "cannot regrid a scenario with raw tables");
    if (o.grid < 2) throw ConfigError("--grid", 0, 0, "grid must be at least 2");
    s.grid = BoxDomain(s.grid.lower, s.grid.upper, std::vector<int>(s.grid.d, o.grid));
  }
  if (o.dt > 0) s.run.dt = o.dt;
  if (!o.p.empty()) s.run.p = o.p;
  if (o.seed >= 0) {
    s.run.seed = static_cast<unsigned long>(o.seed);
    s.run.has_seed = true;
  }
}

std::vector<double> parse_number_list(const std::string& text) {
  Reader rd("--p");
  Entry e{trim(text), 0, 1, false};
  return rd.numbers(e);
}

}  // namespace lpq
