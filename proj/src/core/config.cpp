#include "core/config.hpp"

#include <fstream>
#include <functional>
#include <initializer_list>
#include <sstream>
#include <utility>

#include "core/error.hpp"
#include "core/shaper.hpp"
#include "json.hpp"

namespace tailnest {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                const std::string& where) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* key : allowed) {
      if (item.key() == key) {
        known = true;
        break;
      }
    }
    require(known, Errc::parse, "unknown key \"" + item.key() + "\" in " + where);
  }
}

const json& need(const json& obj, const char* key, const std::string& where) {
  const auto it = obj.find(key);
  require(it != obj.end(), Errc::parse, where + " needs \"" + key + "\"");
  return *it;
}

int get_int(const json& v, const std::string& what) {
  require(v.is_number_integer(), Errc::parse, what + " must be an integer");
  if (v.is_number_unsigned()) {
    const std::uint64_t n = v.get<std::uint64_t>();
    require(n <= 1000000000u, Errc::parse, what + " is out of range");
    return static_cast<int>(n);
  }
  const std::int64_t n = v.get<std::int64_t>();
  require(n >= -1000000000 && n <= 1000000000, Errc::parse, what + " is out of range");
  return static_cast<int>(n);
}

double get_double(const json& v, const std::string& what) {
  require(v.is_number(), Errc::parse, what + " must be a number");
  return v.get<double>();
}

std::string get_string(const json& v, const std::string& what) {
  require(v.is_string(), Errc::parse, what + " must be a string");
  return v.get<std::string>();
}

std::vector<double> get_double_array(const json& v, std::size_t expect, const std::string& what) {
  require(v.is_array(), Errc::parse, what + " must be an array of numbers");
  require(v.size() == expect, Errc::parse, what + " needs " + std::to_string(expect) +
                                               " entries, got " + std::to_string(v.size()));
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& e : v) {
    require(e.is_number(), Errc::parse, what + " must be an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

// entry f describes the face spanned by the coordinates in f; the matching
// vertex has its zeros exactly there, so the two indexings are complements
std::vector<double> face_to_vertex(const std::vector<double>& face, int r) {
  std::vector<double> out(face.size());
  const Vertex full = full_mask(r);
  for (std::size_t f = 0; f < face.size(); ++f) out[full ^ Vertex(f)] = face[f];
  return out;
}

std::vector<double> ones_profile(int r) { return std::vector<double>(std::size_t{1} << r, 1.0); }

MarginSpec parse_margins(const json& mj, int r) {
  require(mj.is_object(), Errc::parse, "\"margins\" must be an object");
  const std::string kind = get_string(need(mj, "kind", "\"margins\""), "\"margins.kind\"");
  if (kind == "identity") {
    check_keys(mj, {"kind"}, "identity margins");
    return MarginSpec::identity();
  }
  if (kind == "pareto") {
    check_keys(mj, {"kind", "alpha"}, "pareto margins");
    return MarginSpec::pareto(
        get_double_array(need(mj, "alpha", "\"margins\""), std::size_t(r), "\"margins.alpha\""));
  }
  fail(Errc::parse, "\"margins.kind\" must be \"identity\" or \"pareto\"");
}

NestSequence parse_levels(const json& arr, int r, int k) {
  require(arr.is_array(), Errc::parse, "\"levels\" must be an array");
  std::vector<std::pair<std::vector<double>, std::vector<double>>> levels;
  levels.reserve(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const json& lv = arr[i];
    const std::string where = "level " + std::to_string(i + 1);
    require(lv.is_object(), Errc::parse, where + " must be an object");
    check_keys(lv, {"u", "x"}, where);
    levels.emplace_back(
        get_double_array(need(lv, "u", where), std::size_t(r), where + " \"u\""),
        get_double_array(need(lv, "x", where), std::size_t{1} << r, where + " \"x\""));
  }
  return NestSequence::build_from_profiles(r, k, std::move(levels));
}

Model build_from_recipe(const json& j, const json& bj, int r, int k, LoadInfo* info) {
  require(bj.is_object(), Errc::parse, "\"builder\" must be an object");
  const std::string method = get_string(need(bj, "method", "\"builder\""), "\"builder.method\"");
  const std::size_t faces = std::size_t{1} << r;

  const auto face_array = [&](const char* key) {
    return face_to_vertex(
        get_double_array(need(bj, key, "\"builder\""), faces, std::string("\"builder.") + key + "\""),
        r);
  };
  const auto face_array_or_ones = [&](const char* key) {
    if (!bj.contains(key)) return ones_profile(r);
    return face_to_vertex(
        get_double_array(bj.at(key), faces, std::string("\"builder.") + key + "\""), r);
  };
  const auto scales_array = [&]() {
    const json& sj = need(bj, "scales", "\"builder\"");
    require(sj.is_array() && !sj.empty(), Errc::parse,
            "\"builder.scales\" must be a nonempty array");
    return get_double_array(sj, sj.size(), "\"builder.scales\"");
  };
  const auto depth_of = [&]() {
    return get_int(need(j, "depth", "builder \"" + method + "\""), "\"depth\"");
  };
  const auto no_depth = [&]() {
    require(!j.contains("depth"), Errc::parse,
            "builder \"" + method + "\" derives the depth from its scales");
  };
  const auto base_or_default = [&]() {
    return bj.contains("base") ? get_double(bj.at("base"), "\"builder.base\"") : 0.5;
  };

  Model m;
  if (method == "increasing") {
    check_keys(bj, {"method", "a", "b", "base"}, "the increasing builder");
    const TailSpec spec = TailSpec::make(r, k, face_array_or_ones("a"), face_array("b"));
    BuildResult res = build_increasing(spec, depth_of(), base_or_default());
    if (info) info->base = res.base;
    m.seq = std::move(res.seq);
  } else if (method == "subsequence") {
    check_keys(bj, {"method", "b", "scales", "coefficients"}, "the subsequence builder");
    no_depth();
    const TailSpec spec = TailSpec::make(r, k, ones_profile(r), face_array("b"));
    const std::vector<double> scales = scales_array();
    const std::vector<double> coeff = get_double_array(
        need(bj, "coefficients", "\"builder\""), scales.size(), "\"builder.coefficients\"");
    SubsequenceResult res = build_subsequence_targets(spec, scales, coeff);
    if (info) info->retained = std::move(res.retained);
    m.seq = std::move(res.seq);
  } else if (method == "eventually_constant") {
    check_keys(bj, {"method", "a", "b", "scales"}, "the eventually constant builder");
    no_depth();
    const TailSpec spec = TailSpec::make(r, k, face_array_or_ones("a"), face_array("b"));
    m.seq = build_eventually_constant(spec, scales_array());
  } else if (method == "degree_one") {
    check_keys(bj, {"method", "a", "base"}, "the degree-one builder");
    require(k == 1, Errc::validation, "the degree-one builder needs order 1");
    std::vector<double> b(faces, 1.0);
    b[full_mask(r)] = 0.0;
    const TailSpec spec = TailSpec::make(r, k, face_array_or_ones("a"), std::move(b));
    BuildResult res = build_degree_one(spec, depth_of(), base_or_default());
    if (info) info->base = res.base;
    m.seq = std::move(res.seq);
  } else if (method == "pareto") {
    check_keys(bj, {"method", "alpha", "scale_base", "a", "b"}, "the pareto builder");
    require(!j.contains("margins"), Errc::parse, "the pareto builder fixes the margins");
    const std::vector<double> alpha = get_double_array(need(bj, "alpha", "\"builder\""),
                                                       std::size_t(r), "\"builder.alpha\"");
    const double scale_base =
        get_double(need(bj, "scale_base", "\"builder\""), "\"builder.scale_base\"");
    ParetoResult res =
        build_pareto(alpha, scale_base, k, face_array_or_ones("a"), face_array("b"), depth_of());
    m.seq = std::move(res.seq);
    m.margins = std::move(res.margins);
  } else {
    fail(Errc::parse, "unknown builder method \"" + method + "\"");
  }
  return m;
}

Model load_model_impl(const std::string& text, LoadInfo* info) {
  if (info) *info = {};
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(Errc::parse, std::string("invalid JSON: ") + e.what());
  }
  require(j.is_object(), Errc::parse, "the top level must be an object");
  check_keys(j,
             {"dimension", "order", "depth", "seed", "dimension_cap", "levels", "builder",
              "margins"},
             "the top level");
  const int r = get_int(need(j, "dimension", "the model"), "\"dimension\"");
  const int k = get_int(need(j, "order", "the model"), "\"order\"");
  int cap = kDefaultDimensionCap;
  if (j.contains("dimension_cap")) cap = get_int(j.at("dimension_cap"), "\"dimension_cap\"");
  require(cap >= 1 && cap <= kMaxDimensionHard, Errc::bounds,
          "\"dimension_cap\" must lie in [1, " + std::to_string(kMaxDimensionHard) + "]");
  require(r >= 1, Errc::bounds, "\"dimension\" must be at least 1");
  require(r <= cap, Errc::bounds,
          "dimension " + std::to_string(r) + " exceeds the cap " + std::to_string(cap));
  require(k >= 0 && k <= r, Errc::bounds, "\"order\" must lie in [0, dimension]");

  const bool has_levels = j.contains("levels");
  const bool has_builder = j.contains("builder");
  require(has_levels != has_builder, Errc::parse,
          "provide exactly one of \"levels\" and \"builder\"");

  Model m;
  if (has_levels) {
    m.seq = parse_levels(j.at("levels"), r, k);
    if (j.contains("depth")) {
      require(get_int(j.at("depth"), "\"depth\"") == m.seq.depth(), Errc::parse,
              "\"depth\" disagrees with the number of levels");
    }
  } else {
    m = build_from_recipe(j, j.at("builder"), r, k, info);
  }
  if (j.contains("seed")) {
    const json& sv = j.at("seed");
    require(sv.is_number_unsigned(), Errc::parse, "\"seed\" must be a nonnegative integer");
    m.seed = sv.get<std::uint64_t>();
  }
  if (j.contains("margins")) m.margins = parse_margins(j.at("margins"), r);
  return m;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), Errc::io, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  require(!in.bad(), Errc::io, "cannot read " + path);
  return std::move(buf).str();
}

ValidationReport report_from(const std::function<Model()>& loader) {
  ValidationReport rep;
  try {
    const Model m = loader();
    std::ostringstream out;
    out << "ok: dimension=" << m.seq.dimension() << " order=" << m.seq.order()
        << " depth=" << m.seq.depth() << " margins="
        << (m.margins.kind == MarginSpec::Kind::pareto ? "pareto" : "identity")
        << " deep_mass_bound=" << m.seq.deep_mass_bound();
    rep.valid = true;
    rep.message = out.str();
  } catch (const Error& e) {
    rep.valid = false;
    rep.message = e.what();
  }
  return rep;
}

}  // namespace

Model load_model_json(const std::string& text, LoadInfo* info) {
  return load_model_impl(text, info);
}

Model load_model_file(const std::string& path, LoadInfo* info) {
  return load_model_impl(read_file(path), info);
}

std::string serialize_model(const Model& m) {
  ordered_json j;
  j["dimension"] = m.seq.dimension();
  j["order"] = m.seq.order();
  j["seed"] = m.seed;
  ordered_json levels = ordered_json::array();
  for (int l = 0; l < m.seq.depth(); ++l) {
    const Level& lv = m.seq.level(l);
    ordered_json entry;
    entry["u"] = lv.u;
    entry["x"] = lv.x;
    levels.push_back(std::move(entry));
  }
  j["levels"] = std::move(levels);
  ordered_json margins;
  if (m.margins.kind == MarginSpec::Kind::pareto) {
    margins["kind"] = "pareto";
    margins["alpha"] = m.margins.alpha;
  } else {
    margins["kind"] = "identity";
  }
  j["margins"] = std::move(margins);
  return j.dump(2) + "\n";
}

ValidationReport validate_model_json(const std::string& text) {
  return report_from([&] { return load_model_json(text); });
}

ValidationReport validate_model_file(const std::string& path) {
  return report_from([&] { return load_model_file(path); });
}

}  // namespace tailnest
