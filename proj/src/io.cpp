#include "bmo/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace bmo {

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream is(line);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

double parse_real(const std::string& tok, const std::string& what) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("bad " + what + ": " + tok);
  }
  if (pos != tok.size()) throw std::invalid_argument("bad " + what + ": " + tok);
  return v;
}

long long parse_int(const std::string& tok, const std::string& what) {
  std::size_t pos = 0;
  long long v = 0;
  try {
    v = std::stoll(tok, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("bad " + what + ": " + tok);
  }
  if (pos != tok.size()) throw std::invalid_argument("bad " + what + ": " + tok);
  return v;
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot write " + path);
  out << text;
  if (!out) throw std::invalid_argument("write failed: " + path);
}

std::string expect_prefix(const std::string& line, const std::string& prefix,
                          const std::string& path) {
  if (line.rfind(prefix, 0) != 0)
    throw std::invalid_argument(path + ": expected '" + prefix + "'");
  return line.substr(prefix.size());
}

}  // namespace

void save_space(const Space& X, const std::string& path) {
  std::ostringstream out;
  out << "bmo-space 1\n";
  out << "label: " << X.label() << "\n";
  out << "n: " << X.size() << "\n";
  out << "weights:";
  for (int i = 0; i < X.size(); ++i) out << ' ' << fmt17(X.weight(i));
  out << "\ndist:\n";
  for (int i = 1; i < X.size(); ++i) {
    for (int j = 0; j < i; ++j) out << (j ? " " : "") << fmt17(X.dist(i, j));
    out << "\n";
  }
  write_text(path, out.str());
}

Space load_space(const std::string& path) {
  const auto lines = read_lines(path);
  if (lines.empty() || lines[0] != "bmo-space 1")
    throw std::invalid_argument(path + ": not a space file (want 'bmo-space 1')");
  if (lines.size() < 2) throw std::invalid_argument(path + ": truncated");
  if (lines[1].rfind("generator: ", 0) == 0) {
    auto toks = split_ws(lines[1].substr(11));
    if (toks.empty()) throw std::invalid_argument(path + ": empty generator");
    const std::string name = toks.front();
    toks.erase(toks.begin());
    return space_from_generator(name, toks);
  }
  if (lines.size() < 5) throw std::invalid_argument(path + ": truncated");
  const std::string label = expect_prefix(lines[1], "label: ", path);
  const long long n = parse_int(expect_prefix(lines[2], "n: ", path), "point count");
  if (n < 1 || n > 1000000) throw std::invalid_argument(path + ": bad point count");
  const auto wtoks = split_ws(expect_prefix(lines[3], "weights:", path));
  if (static_cast<long long>(wtoks.size()) != n)
    throw std::invalid_argument(path + ": weight count mismatch");
  std::vector<double> w;
  for (const auto& t : wtoks) w.push_back(parse_real(t, "weight"));
  if (lines[4] != "dist:") throw std::invalid_argument(path + ": expected 'dist:'");
  if (static_cast<long long>(lines.size()) < 4 + n)
    throw std::invalid_argument(path + ": truncated distance rows");
  std::vector<double> d(static_cast<std::size_t>(n) * n, 0.0);
  for (long long i = 1; i < n; ++i) {
    const auto row = split_ws(lines[4 + i]);
    if (static_cast<long long>(row.size()) != i)
      throw std::invalid_argument(path + ": distance row " + std::to_string(i) +
                                  " needs " + std::to_string(i) + " entries");
    for (long long j = 0; j < i; ++j) {
      const double v = parse_real(row[j], "distance");
      d[i * n + j] = v;
      d[j * n + i] = v;
    }
  }
  return Space::from_matrix(label, static_cast<int>(n), std::move(d), std::move(w));
}

Space space_from_generator(const std::string& name,
                           const std::vector<std::string>& params) {
  auto optional_real = [&](std::size_t i, double dflt) {
    return params.size() > i ? parse_real(params[i], "generator parameter") : dflt;
  };
  auto optional_flag = [&](std::size_t i) {
    return params.size() > i && parse_int(params[i], "generator flag") != 0;
  };
  auto need_int = [&](std::size_t i, const std::string& what) {
    if (params.size() <= i) throw std::invalid_argument("generator needs " + what);
    return static_cast<int>(parse_int(params[i], what));
  };
  if (name == "grid_1d")
    return Space::grid_1d(need_int(0, "point count"), optional_real(1, 0.0),
                          optional_flag(2));
  if (name == "grid_2d")
    return Space::grid_2d(need_int(0, "width"), need_int(1, "height"),
                          optional_real(2, 0.0), optional_flag(3));
  if (name == "path") return Space::path_graph(need_int(0, "point count"), optional_flag(1));
  if (name == "tree") return Space::binary_tree(need_int(0, "depth"), optional_flag(1));
  throw std::invalid_argument("unknown generator: " + name);
}

void save_field(const Field& f, const std::string& path) {
  std::ostringstream out;
  for (std::size_t i = 0; i < f.size(); ++i)
    out << i << ' ' << fmt17(f[i]) << "\n";
  write_text(path, out.str());
}

Field load_field(const Space& X, const std::string& path) {
  Field f(X.size(), 0.0);
  std::vector<char> seen(X.size(), 0);
  for (const auto& line : read_lines(path)) {
    const auto toks = split_ws(line);
    if (toks.empty()) continue;
    if (toks.size() != 2)
      throw std::invalid_argument(path + ": want 'id value' per line");
    const long long id = parse_int(toks[0], "point id");
    if (id < 0 || id >= X.size())
      throw std::invalid_argument(path + ": point id out of range");
    if (seen[id]) throw std::invalid_argument(path + ": duplicate id " + toks[0]);
    seen[id] = 1;
    f[id] = parse_real(toks[1], "value");
  }
  for (int i = 0; i < X.size(); ++i)
    if (!seen[i])
      throw std::invalid_argument(path + ": missing id " + std::to_string(i));
  return f;
}

void save_set(const std::vector<int>& ids, const std::string& path) {
  std::ostringstream out;
  for (int i : ids) out << i << "\n";
  write_text(path, out.str());
}

PointSet load_set(const Space& X, const std::string& path) {
  std::vector<int> ids;
  for (const auto& line : read_lines(path)) {
    const auto toks = split_ws(line);
    if (toks.empty()) continue;
    if (toks.size() != 1) throw std::invalid_argument(path + ": one id per line");
    const long long id = parse_int(toks[0], "point id");
    if (id < 0 || id >= X.size())
      throw std::invalid_argument(path + ": point id out of range");
    ids.push_back(static_cast<int>(id));
  }
  return make_point_set(X, std::move(ids));
}

void save_map(const PointMap& F, const std::string& path) {
  std::ostringstream out;
  for (std::size_t i = 0; i < F.size(); ++i) out << i << ' ' << F[i] << "\n";
  write_text(path, out.str());
}

PointMap load_map(const Space& X, const std::string& path) {
  PointMap F(X.size(), -1);
  for (const auto& line : read_lines(path)) {
    const auto toks = split_ws(line);
    if (toks.empty()) continue;
    if (toks.size() != 2)
      throw std::invalid_argument(path + ": want 'source image' per line");
    const long long src = parse_int(toks[0], "source id");
    const long long dst = parse_int(toks[1], "image id");
    if (src < 0 || src >= X.size() || dst < 0 || dst >= X.size())
      throw std::invalid_argument(path + ": id out of range");
    if (F[src] != -1) throw std::invalid_argument(path + ": duplicate source " + toks[0]);
    F[src] = static_cast<int>(dst);
  }
  for (int i = 0; i < X.size(); ++i)
    if (F[i] == -1)
      throw std::invalid_argument(path + ": missing source " + std::to_string(i));
  return F;
}

Report::Report(const std::string& title) { buf_ = "bmo-report " + title + "\n"; }

void Report::kv(const std::string& key, const std::string& value) {
  buf_ += key + ": " + value + "\n";
}

void Report::table(const std::string& name, const std::vector<std::string>& columns) {
  buf_ += "table " + name + ":";
  for (const auto& c : columns) buf_ += "\t" + c;
  buf_ += "\n";
}

void Report::row(const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i)
    buf_ += (i ? "\t" : "") + cells[i];
  buf_ += "\n";
}

void Report::save(const std::string& path) const { write_text(path, buf_); }

}  // namespace bmo
