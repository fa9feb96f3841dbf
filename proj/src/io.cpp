#include "maternsim/io.hpp"

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace maternsim {

namespace fs = std::filesystem;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void atomic_write_text(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out << content;
    if (!out) throw IoError("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("rename to " + path.string() + " failed: " + ec.message());
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string sha256_file(const fs::path& path) {
  const std::string data = read_text(path);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr))
    throw IoError("sha256 failed for " + path.string());
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xF]);
  }
  return out;
}

namespace {

fs::path meta_path(const fs::path& path) { return path.string() + ".meta.json"; }

json window_to_json(const Window& w) {
  return json{{"lower", w.lower()}, {"upper", w.upper()}};
}

Window window_from_json(const json& j) {
  return Window(j.at("lower").get<std::vector<double>>(),
                j.at("upper").get<std::vector<double>>());
}

double parse_double(const std::string& field, std::size_t line_no, const fs::path& path) {
  double v = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  const auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end)
    throw IoError(path.string() + ":" + std::to_string(line_no) + ": bad numeric field '" +
                  field + "'");
  return v;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

json read_meta(const fs::path& path) {
  const fs::path mp = meta_path(path);
  json meta;
  try {
    meta = json::parse(read_text(mp));
  } catch (const json::exception& e) {
    throw IoError(mp.string() + ": invalid metadata JSON (" + e.what() + ")");
  }
  return meta;
}

std::string mark_kind(const MarkedPointPattern& pat) {
  if (pat.empty()) return "scalar";
  if (pat.mark(0).is_scalar()) return "scalar";
  if (pat.mark(0).is_pair()) return "pair";
  return "scaled_kernel";
}

void write_meta(const fs::path& path, json meta, const json& extra) {
  if (extra.is_object())
    for (const auto& [k, v] : extra.items()) meta[k] = v;
  atomic_write_text(meta_path(path), meta.dump(2) + "\n");
}

std::string coord_header(int d, const char* prefix) {
  std::string h;
  for (int ax = 0; ax < d; ++ax) {
    if (ax) h += ',';
    h += prefix + std::to_string(ax + 1);
  }
  return h;
}

}  // namespace

void write_pattern_csv(const fs::path& path, const PointPattern& pat, const json& extra_meta) {
  const int d = pat.dim();
  std::string body = coord_header(d, "x") + "\n";
  for (std::size_t i = 0; i < pat.size(); ++i) {
    const auto p = pat.point(i);
    for (int ax = 0; ax < d; ++ax) {
      if (ax) body += ',';
      body += format_double(p[ax]);
    }
    body += '\n';
  }
  atomic_write_text(path, body);
  json meta{{"kind", "point_pattern"},
            {"dim", d},
            {"count", pat.size()},
            {"mark_kind", "none"},
            {"window", window_to_json(pat.window())}};
  write_meta(path, std::move(meta), extra_meta);
}

void write_pattern_csv(const fs::path& path, const MarkedPointPattern& pat,
                       const json& extra_meta) {
  const int d = pat.dim();
  const std::string kind = mark_kind(pat);
  std::string header = coord_header(d, "x");
  if (kind == "scalar") header += ",mark";
  if (kind == "pair") header += ",mark_a,mark_b";
  if (kind == "scaled_kernel") header += ",mark_u,mark_shape," + coord_header(d, "mark_c");
  std::string body = header + "\n";
  for (std::size_t i = 0; i < pat.size(); ++i) {
    const auto p = pat.point(i);
    for (int ax = 0; ax < d; ++ax) {
      if (ax) body += ',';
      body += format_double(p[ax]);
    }
    const MarkValue& m = pat.mark(i);
    if (m.is_scalar()) {
      body += ',' + format_double(m.scalar());
    } else if (m.is_pair()) {
      body += ',' + format_double(m.pair().a) + ',' + format_double(m.pair().b);
    } else {
      body += ',' + format_double(m.kernel().u) + ',' + to_string(m.kernel().shape);
      for (int ax = 0; ax < d; ++ax) body += ',' + format_double(m.kernel().centre[ax]);
    }
    body += '\n';
  }
  atomic_write_text(path, body);
  json meta{{"kind", "point_pattern"},
            {"dim", d},
            {"count", pat.size()},
            {"mark_kind", kind},
            {"window", window_to_json(pat.base().window())}};
  write_meta(path, std::move(meta), extra_meta);
}

PointPattern read_pattern_csv(const fs::path& path) {
  const json meta = read_meta(path);
  const Window w = window_from_json(meta.at("window"));
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  std::size_t line_no = 0;
  PointPattern pat(w);
  std::vector<double> p(w.dim());
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 || line.empty()) continue;  // header
    const auto fields = split_csv_line(line);
    if (static_cast<int>(fields.size()) < w.dim())
      throw IoError(path.string() + ":" + std::to_string(line_no) + ": too few fields");
    for (int ax = 0; ax < w.dim(); ++ax) p[ax] = parse_double(fields[ax], line_no, path);
    pat.push_back(p);
  }
  return pat;
}

MarkedPointPattern read_marked_pattern_csv(const fs::path& path) {
  const json meta = read_meta(path);
  const Window w = window_from_json(meta.at("window"));
  const std::string kind = meta.value("mark_kind", "scalar");
  const int d = w.dim();
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  std::size_t line_no = 0;
  MarkedPointPattern pat(w);
  std::vector<double> p(d);
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 || line.empty()) continue;
    const auto fields = split_csv_line(line);
    const std::size_t need = d + (kind == "scalar"          ? 1
                                  : kind == "pair"          ? 2
                                  : kind == "scaled_kernel" ? 2 + d
                                                            : 0);
    if (fields.size() < need)
      throw IoError(path.string() + ":" + std::to_string(line_no) + ": too few fields");
    for (int ax = 0; ax < d; ++ax) p[ax] = parse_double(fields[ax], line_no, path);
    if (kind == "scalar") {
      pat.push_back(p, MarkValue(parse_double(fields[d], line_no, path)));
    } else if (kind == "pair") {
      pat.push_back(p, MarkValue(PairMark{parse_double(fields[d], line_no, path),
                                          parse_double(fields[d + 1], line_no, path)}));
    } else {
      ScaledKernelMark k;
      k.u = parse_double(fields[d], line_no, path);
      k.shape = shape_from_string(fields[d + 1]);
      k.centre.resize(d);
      for (int ax = 0; ax < d; ++ax)
        k.centre[ax] = parse_double(fields[d + 2 + ax], line_no, path);
      pat.push_back(p, MarkValue(std::move(k)));
    }
  }
  return pat;
}

void write_field_csv(const fs::path& path, const GridField& field, const json& extra_meta) {
  const Grid& grid = field.grid();
  const int d = grid.dim();
  std::string body = coord_header(d, "x") + ",value\n";
  std::vector<double> c(d);
  for (std::size_t i = 0; i < grid.cell_count(); ++i) {
    grid.cell_centre(i, c);
    for (int ax = 0; ax < d; ++ax) {
      if (ax) body += ',';
      body += format_double(c[ax]);
    }
    body += ',' + format_double(field.values()[i]) + '\n';
  }
  atomic_write_text(path, body);
  json meta{{"kind", "grid_field"},
            {"dim", d},
            {"cells_per_axis", grid.cells_per_axis()},
            {"window", window_to_json(grid.window())}};
  write_meta(path, std::move(meta), extra_meta);
}

GridField read_field_csv(const fs::path& path) {
  const json meta = read_meta(path);
  const Window w = window_from_json(meta.at("window"));
  Grid grid(w, meta.at("cells_per_axis").get<std::vector<int>>());
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  std::size_t line_no = 0;
  std::vector<double> values;
  values.reserve(grid.cell_count());
  const int d = grid.dim();
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 || line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (static_cast<int>(fields.size()) < d + 1)
      throw IoError(path.string() + ":" + std::to_string(line_no) + ": too few fields");
    values.push_back(parse_double(fields[d], line_no, path));
  }
  if (values.size() != grid.cell_count())
    throw IoError(path.string() + ": expected " + std::to_string(grid.cell_count()) +
                  " value rows, found " + std::to_string(values.size()));
  return GridField(std::move(grid), std::move(values));
}

}  // namespace maternsim
