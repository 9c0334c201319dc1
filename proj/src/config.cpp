#include "opd/config.hpp"

#include <cctype>
#include <cstdlib>

#include "opd/io.hpp"

namespace opd {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  return s;
}

double to_double(const std::string& key, const std::string& value) {
  char* end = nullptr;
  const double v = std::strtod(value.c_str(), &end);
  if (value.empty() || end != value.c_str() + value.size())
    throw std::runtime_error("config: bad numeric value for '" + key + "'");
  return v;
}

int to_int(const std::string& key, const std::string& value) {
  const double v = to_double(key, value);
  if (v != std::floor(v))
    throw std::runtime_error("config: '" + key + "' must be an integer");
  return static_cast<int>(v);
}

uint64_t to_seed(const std::string& key, const std::string& value) {
  char* end = nullptr;
  const unsigned long long v = std::strtoull(value.c_str(), &end, 10);
  if (value.empty() || end != value.c_str() + value.size())
    throw std::runtime_error("config: bad seed value for '" + key + "'");
  return v;
}

Vec3 to_vec3(const std::string& key, const std::string& value) {
  Vec3 out;
  size_t start = 0;
  for (int i = 0; i < 3; ++i) {
    const size_t comma = value.find(',', start);
    if ((i < 2) != (comma != std::string::npos))
      throw std::runtime_error("config: '" + key +
                               "' must be three comma-separated numbers");
    const std::string part(
        trim(std::string_view(value).substr(
            start, comma == std::string::npos ? value.size() - start
                                              : comma - start)));
    out[i] = to_double(key, part);
    start = comma + 1;
  }
  return out;
}

}  // namespace

std::map<std::string, std::string> parse_key_values(std::string_view text) {
  std::map<std::string, std::string> out;
  size_t pos = 0;
  size_t line_no = 0;
  while (pos <= text.size()) {
    const size_t eol = text.find('\n', pos);
    std::string_view line =
        text.substr(pos, eol == std::string_view::npos ? text.size() - pos
                                                       : eol - pos);
    ++line_no;
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;

    const size_t hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const size_t eq = line.find('=');
    if (eq == std::string_view::npos)
      throw std::runtime_error("config: line " + std::to_string(line_no) +
                               ": expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty())
      throw std::runtime_error("config: line " + std::to_string(line_no) +
                               ": empty key");
    if (!out.emplace(key, value).second)
      throw std::runtime_error("config: line " + std::to_string(line_no) +
                               ": duplicate key '" + key + "'");
  }
  return out;
}

SimilarityMode parse_similarity_mode(std::string_view s) {
  if (s == "normalized_align") return SimilarityMode::kNormalizedAlign;
  if (s == "raw_dot") return SimilarityMode::kRawDot;
  throw std::runtime_error(
      "config: similarity_mode must be 'normalized_align' or 'raw_dot'");
}

Reduction parse_reduction(std::string_view s) {
  if (s == "sum") return Reduction::kSum;
  if (s == "mean") return Reduction::kMean;
  throw std::runtime_error("config: reduction must be 'sum' or 'mean'");
}

std::string to_string(SimilarityMode mode) {
  return mode == SimilarityMode::kNormalizedAlign ? "normalized_align"
                                                  : "raw_dot";
}

std::string to_string(Reduction reduction) {
  return reduction == Reduction::kSum ? "sum" : "mean";
}

RunConfig RunConfig::parse(std::string_view text) {
  const auto kv = parse_key_values(text);
  RunConfig cfg;

  const auto get = [&kv](const char* key) -> const std::string* {
    const auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  };

  // camera.*
  {
    Intrinsics K;
    bool any = false;
    bool all = true;
    const auto read = [&](const char* key, double* field, bool required) {
      if (const std::string* v = get(key)) {
        *field = to_double(key, *v);
        any = true;
      } else if (required) {
        all = false;
      }
    };
    read("camera.fx", &K.fx, true);
    read("camera.fy", &K.fy, true);
    read("camera.cx", &K.cx, true);
    read("camera.cy", &K.cy, true);
    read("camera.skew", &K.skew, false);
    if (any) {
      if (!all)
        throw std::runtime_error(
            "config: camera requires fx, fy, cx and cy");
      K.require_valid();
      cfg.camera = K;
    }
  }

  if (const std::string* v = get("image.width"))
    cfg.width = to_int("image.width", *v);
  if (const std::string* v = get("image.height"))
    cfg.height = to_int("image.height", *v);

  if (const std::string* v = get("scene.type")) {
    const auto require = [&](const char* key) -> const std::string& {
      const std::string* s = get(key);
      if (!s)
        throw std::runtime_error(std::string("config: missing key '") + key +
                                 "' for scene.type = " + *v);
      return *s;
    };
    if (*v == "plane") {
      PlaneScene s;
      s.normal = to_vec3("scene.normal", require("scene.normal"));
      s.offset = to_double("scene.offset", require("scene.offset"));
      cfg.scene = s;
    } else if (*v == "sphere") {
      SphereScene s;
      s.center = to_vec3("scene.center", require("scene.center"));
      s.radius = to_double("scene.radius", require("scene.radius"));
      cfg.scene = s;
    } else if (*v == "sinusoid") {
      SinusoidScene s;
      s.base_depth = to_double("scene.base_depth", require("scene.base_depth"));
      s.amplitude = to_double("scene.amplitude", require("scene.amplitude"));
      s.freq_x = to_double("scene.freq_x", require("scene.freq_x"));
      s.freq_y = to_double("scene.freq_y", require("scene.freq_y"));
      cfg.scene = s;
    } else {
      throw std::runtime_error(
          "config: scene.type must be plane, sphere or sinusoid");
    }
    require_valid(*cfg.scene);
  }

  if (get("noise.sigma") || get("noise.seed")) {
    NoiseSpec spec;
    if (const std::string* v = get("noise.sigma"))
      spec.sigma = to_double("noise.sigma", *v);
    if (const std::string* v = get("noise.seed"))
      spec.seed = to_seed("noise.seed", *v);
    if (!(spec.sigma >= 0.0) || !std::isfinite(spec.sigma))
      throw std::runtime_error("config: noise.sigma must be finite and >= 0");
    cfg.noise = spec;
  }

  if (const std::string* v = get("loss.alpha1"))
    cfg.loss.alpha1 = to_double("loss.alpha1", *v);
  if (const std::string* v = get("loss.alpha2"))
    cfg.loss.alpha2 = to_double("loss.alpha2", *v);
  if (const std::string* v = get("loss.beta"))
    cfg.loss.beta = to_double("loss.beta", *v);
  if (const std::string* v = get("loss.lambda"))
    cfg.loss.lambda = to_double("loss.lambda", *v);
  if (const std::string* v = get("loss.similarity_mode"))
    cfg.loss.similarity_mode = parse_similarity_mode(*v);
  if (const std::string* v = get("loss.reduction"))
    cfg.loss.reduction = parse_reduction(*v);
  cfg.loss.require_valid();

  if (const std::string* v = get("fit.learning_rate"))
    cfg.fit.learning_rate = to_double("fit.learning_rate", *v);
  if (const std::string* v = get("fit.iterations"))
    cfg.fit.iterations = to_int("fit.iterations", *v);
  if (const std::string* v = get("fit.record_every"))
    cfg.fit.record_every = to_int("fit.record_every", *v);
  if (const std::string* v = get("fit.seed"))
    cfg.fit.seed = to_seed("fit.seed", *v);
  cfg.fit.loss = cfg.loss;

  // Reject unknown keys so typos fail loudly.
  static const char* known[] = {
      "camera.fx",       "camera.fy",        "camera.cx",
      "camera.cy",       "camera.skew",      "image.width",
      "image.height",    "scene.type",       "scene.normal",
      "scene.offset",    "scene.center",     "scene.radius",
      "scene.base_depth", "scene.amplitude", "scene.freq_x",
      "scene.freq_y",    "noise.sigma",      "noise.seed",
      "loss.alpha1",     "loss.alpha2",      "loss.beta",
      "loss.lambda",     "loss.similarity_mode", "loss.reduction",
      "fit.learning_rate", "fit.iterations", "fit.record_every",
      "fit.seed"};
  for (const auto& [key, value] : kv) {
    bool ok = false;
    for (const char* k : known)
      if (key == k) ok = true;
    if (!ok)
      throw std::runtime_error("config: unknown key '" + key + "'");
  }

  return cfg;
}

RunConfig RunConfig::load(const std::string& path) {
  try {
    return parse(read_file(path));
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

}  // namespace opd
