#include "opd/io.hpp"

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "opd/surface.hpp"

namespace opd {

namespace {

bool is_pfm_space(char c) {
  return c == ' ' || c == '\n' || c == '\r' || c == '\t';
}

// Reads one whitespace-delimited header token starting at pos.
std::string next_token(std::string_view bytes, size_t& pos) {
  while (pos < bytes.size() && is_pfm_space(bytes[pos])) ++pos;
  const size_t start = pos;
  while (pos < bytes.size() && !is_pfm_space(bytes[pos])) ++pos;
  if (start == pos) throw std::runtime_error("pfm: truncated header");
  return std::string(bytes.substr(start, pos - start));
}

double parse_number(const std::string& token, const char* what) {
  char* end = nullptr;
  const double v = std::strtod(token.c_str(), &end);
  if (end != token.c_str() + token.size())
    throw std::runtime_error(std::string("pfm: bad ") + what + " '" + token +
                             "'");
  return v;
}

float load_f32(const unsigned char* b, bool little_endian) {
  uint32_t bits;
  if (little_endian)
    bits = uint32_t(b[0]) | uint32_t(b[1]) << 8 | uint32_t(b[2]) << 16 |
           uint32_t(b[3]) << 24;
  else
    bits = uint32_t(b[3]) | uint32_t(b[2]) << 8 | uint32_t(b[1]) << 16 |
           uint32_t(b[0]) << 24;
  float f;
  std::memcpy(&f, &bits, 4);
  return f;
}

void store_f32_le(float f, std::string& out) {
  uint32_t bits;
  std::memcpy(&bits, &f, 4);
  out.push_back(static_cast<char>(bits & 0xff));
  out.push_back(static_cast<char>((bits >> 8) & 0xff));
  out.push_back(static_cast<char>((bits >> 16) & 0xff));
  out.push_back(static_cast<char>((bits >> 24) & 0xff));
}

}  // namespace

DepthMap read_pfm(std::string_view bytes) {
  size_t pos = 0;
  const std::string magic = next_token(bytes, pos);
  if (magic != "Pf")
    throw std::runtime_error("pfm: expected grayscale identifier 'Pf', got '" +
                             magic + "'");
  const double width_d = parse_number(next_token(bytes, pos), "width");
  const double height_d = parse_number(next_token(bytes, pos), "height");
  const double scale = parse_number(next_token(bytes, pos), "scale");
  if (width_d < 1 || height_d < 1 || width_d != std::floor(width_d) ||
      height_d != std::floor(height_d))
    throw std::runtime_error("pfm: bad dimensions");
  if (scale == 0.0) throw std::runtime_error("pfm: zero scale");
  const int width = static_cast<int>(width_d);
  const int height = static_cast<int>(height_d);

  // Exactly one whitespace byte separates the scale from the payload.
  if (pos >= bytes.size() || !is_pfm_space(bytes[pos]))
    throw std::runtime_error("pfm: missing header terminator");
  ++pos;

  const size_t expected = static_cast<size_t>(width) * height * 4;
  if (bytes.size() - pos < expected)
    throw std::runtime_error(
        "pfm: truncated payload (expected " + std::to_string(expected) +
        " bytes, got " + std::to_string(bytes.size() - pos) + ")");
  if (bytes.size() - pos > expected)
    throw std::runtime_error("pfm: trailing data after payload");

  const bool little_endian = scale < 0.0;
  DepthMap depth(width, height);
  const auto* payload =
      reinterpret_cast<const unsigned char*>(bytes.data()) + pos;
  for (int file_row = 0; file_row < height; ++file_row) {
    const int y = height - 1 - file_row;  // pfm rows run bottom to top
    for (int x = 0; x < width; ++x) {
      const float f = load_f32(
          payload + (static_cast<size_t>(file_row) * width + x) * 4,
          little_endian);
      depth.at(x, y) = (std::isfinite(f) && f > 0.0f)
                           ? static_cast<double>(f)
                           : DepthMap::invalid_value();
    }
  }
  return depth;
}

std::string write_pfm(const DepthMap& depth) {
  if (depth.empty()) throw std::invalid_argument("write_pfm: empty map");
  std::string out = "Pf\n" + std::to_string(depth.width()) + " " +
                    std::to_string(depth.height()) + "\n-1.0\n";
  out.reserve(out.size() + static_cast<size_t>(depth.width()) *
                               depth.height() * 4);
  for (int file_row = 0; file_row < depth.height(); ++file_row) {
    const int y = depth.height() - 1 - file_row;
    for (int x = 0; x < depth.width(); ++x) {
      const float f = depth.is_valid(x, y)
                          ? static_cast<float>(depth.at(x, y))
                          : 0.0f;
      store_f32_le(f, out);
    }
  }
  return out;
}

Intrinsics read_intrinsics(std::string_view text) {
  Intrinsics K;
  bool seen[5] = {false, false, false, false, false};
  const char* names[5] = {"fx", "fy", "cx", "cy", "skew"};
  double* fields[5] = {&K.fx, &K.fy, &K.cx, &K.cy, &K.skew};

  size_t line_no = 0;
  size_t pos = 0;
  while (pos <= text.size()) {
    const size_t eol = text.find('\n', pos);
    std::string_view line =
        text.substr(pos, eol == std::string_view::npos ? text.size() - pos
                                                       : eol - pos);
    ++line_no;
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;

    const size_t hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    const auto trim = [](std::string_view s) {
      while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
        s.remove_prefix(1);
      while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.remove_suffix(1);
      return s;
    };
    line = trim(line);
    if (line.empty()) continue;

    const size_t eq = line.find('=');
    if (eq == std::string_view::npos)
      throw std::runtime_error("intrinsics: line " + std::to_string(line_no) +
                               ": expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));

    int field = -1;
    for (int i = 0; i < 5; ++i)
      if (key == names[i]) field = i;
    if (field < 0)
      throw std::runtime_error("intrinsics: line " + std::to_string(line_no) +
                               ": unknown key '" + key + "'");
    if (seen[field])
      throw std::runtime_error("intrinsics: line " + std::to_string(line_no) +
                               ": duplicate key '" + key + "'");
    char* end = nullptr;
    const double v = std::strtod(value.c_str(), &end);
    if (value.empty() || end != value.c_str() + value.size())
      throw std::runtime_error("intrinsics: line " + std::to_string(line_no) +
                               ": bad value for '" + key + "'");
    *fields[field] = v;
    seen[field] = true;
  }

  for (int i = 0; i < 4; ++i)
    if (!seen[i])
      throw std::runtime_error(std::string("intrinsics: missing key '") +
                               names[i] + "'");
  K.require_valid();
  return K;
}

std::string write_intrinsics(const Intrinsics& K) {
  K.require_valid();
  std::string out;
  out += "fx = " + format_g17(K.fx) + "\n";
  out += "fy = " + format_g17(K.fy) + "\n";
  out += "cx = " + format_g17(K.cx) + "\n";
  out += "cy = " + format_g17(K.cy) + "\n";
  out += "skew = " + format_g17(K.skew) + "\n";
  return out;
}

std::string export_ply(const OrientedPointCloud& cloud) {
  std::string out = "ply\nformat ascii 1.0\nelement vertex " +
                    std::to_string(cloud.points.size()) + "\n";
  out +=
      "property float x\nproperty float y\nproperty float z\n"
      "property float nx\nproperty float ny\nproperty float nz\n";
  if (cloud.has_color)
    out += "property uchar red\nproperty uchar green\nproperty uchar blue\n";
  out += "end_header\n";
  for (const OrientedPoint& p : cloud.points) {
    out += format_g9(p.position.x()) + " " + format_g9(p.position.y()) + " " +
           format_g9(p.position.z()) + " " + format_g9(p.normal.x()) + " " +
           format_g9(p.normal.y()) + " " + format_g9(p.normal.z());
    if (cloud.has_color)
      out += " " + std::to_string(p.color[0]) + " " +
             std::to_string(p.color[1]) + " " + std::to_string(p.color[2]);
    out += "\n";
  }
  return out;
}

DepthMap read_csv_depth(std::string_view text) {
  std::vector<std::vector<double>> rows;
  size_t pos = 0;
  size_t line_no = 0;
  while (pos < text.size()) {
    const size_t eol = text.find('\n', pos);
    std::string_view line =
        text.substr(pos, eol == std::string_view::npos ? text.size() - pos
                                                       : eol - pos);
    pos = eol == std::string_view::npos ? text.size() : eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() && pos >= text.size()) break;  // trailing newline

    std::vector<double> row;
    size_t cell_start = 0;
    while (true) {
      const size_t comma = line.find(',', cell_start);
      std::string cell(line.substr(
          cell_start, comma == std::string_view::npos ? line.size() - cell_start
                                                      : comma - cell_start));
      // trim spaces
      while (!cell.empty() && std::isspace(static_cast<unsigned char>(cell.front())))
        cell.erase(cell.begin());
      while (!cell.empty() && std::isspace(static_cast<unsigned char>(cell.back())))
        cell.pop_back();
      if (cell.empty()) {
        row.push_back(DepthMap::invalid_value());
      } else {
        char* end = nullptr;
        const double v = std::strtod(cell.c_str(), &end);
        if (end != cell.c_str() + cell.size())
          throw std::runtime_error("csv: row " + std::to_string(line_no) +
                                   ": unparseable cell '" + cell + "'");
        row.push_back(v);
      }
      if (comma == std::string_view::npos) break;
      cell_start = comma + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw std::runtime_error("csv: row " + std::to_string(line_no) +
                               " has " + std::to_string(row.size()) +
                               " cells, expected " +
                               std::to_string(rows.front().size()));
    rows.push_back(std::move(row));
  }
  if (rows.empty() || rows.front().empty())
    throw std::runtime_error("csv: empty input");

  DepthMap depth(static_cast<int>(rows.front().size()),
                 static_cast<int>(rows.size()));
  for (int y = 0; y < depth.height(); ++y)
    for (int x = 0; x < depth.width(); ++x)
      depth.at(x, y) = rows[y][x];
  return depth;
}

OrientedPointCloud oriented_cloud(const DepthMap& depth, const Intrinsics& K,
                                  bool include_unoriented) {
  const PointMap points = back_project_map(depth, K);
  const NormalMap units = unit_normals(estimate_normals(depth, K));
  OrientedPointCloud cloud;
  for (int y = 0; y < depth.height(); ++y) {
    for (int x = 0; x < depth.width(); ++x) {
      if (!points.is_valid(x, y)) continue;
      if (units.is_valid(x, y)) {
        cloud.points.push_back({points.at(x, y), units.at(x, y), {0, 0, 0}});
      } else if (include_unoriented) {
        cloud.points.push_back({points.at(x, y), Vec3::Zero(), {0, 0, 0}});
      }
    }
  }
  return cloud;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
  std::string data((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  if (in.bad()) throw std::runtime_error("read failed for '" + path + "'");
  return data;
}

void write_file_atomic(const std::string& path, std::string_view data) {
  const std::string tmp = path + ".tmp";
  try {
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out)
        throw std::runtime_error("cannot open '" + tmp + "' for writing");
      out.write(data.data(), static_cast<std::streamsize>(data.size()));
      out.flush();
      if (!out) throw std::runtime_error("write failed for '" + tmp + "'");
    }
    std::filesystem::rename(tmp, path);
  } catch (...) {
    std::error_code ec;
    std::filesystem::remove(tmp, ec);
    throw;
  }
}

std::string format_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string format_g9(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

}  // namespace opd
