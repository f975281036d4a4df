#include "printmap/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace printmap {

namespace {

void require_keys(const nlohmann::json& j, const std::string& where,
                  const std::set<std::string>& allowed) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& item : j.items())
    if (!allowed.count(item.key()))
      throw ConfigError(where + ": unknown key \"" + item.key() + "\"");
}

void check_prob(double v, const std::string& name) {
  if (!(v >= 0.0 && v <= 1.0)) throw ConfigError(name + " must be in [0,1]");
}

void check_range(double lo, double hi, double min_ok, double max_ok, const std::string& name) {
  if (!(lo >= min_ok && hi <= max_ok && lo <= hi))
    throw ConfigError(name + " must be an ordered range within [" + std::to_string(min_ok) + "," +
                      std::to_string(max_ok) + "]");
}

std::array<double, 2> range_of(const nlohmann::json& j, const std::string& key) {
  const auto& v = j.at(key);
  if (!v.is_array() || v.size() != 2) throw ConfigError(key + " must be a [min, max] pair");
  return {v[0].get<double>(), v[1].get<double>()};
}

}  // namespace

void validate_gen_config(const GenConfig& cfg) {
  if (cfg.target_w < 1 || cfg.target_h < 1) throw ConfigError("target size must be positive");
  const auto& sc = cfg.scenario;
  check_prob(sc.p_defective, "scenario.p_defective");
  check_prob(sc.p_streak, "scenario.p_streak");
  double share_sum = sc.p_streak;
  for (double s : sc.banding_shares) {
    check_prob(s, "scenario.banding_shares[]");
    share_sum += s;
  }
  if (std::abs(share_sum - 1.0) > 1e-9)
    throw ConfigError("scenario: p_streak + banding_shares must sum to 1");
  if (sc.defect_count_min < 1 || sc.defect_count_max < sc.defect_count_min)
    throw ConfigError("scenario.defect_count must satisfy 1 <= min <= max");
  check_prob(sc.full_span_prob, "scenario.full_span_prob");
  if (!(sc.partial_min_frac > 0.0 && sc.partial_min_frac <= 1.0))
    throw ConfigError("scenario.partial_min_frac must be in (0,1]");

  const auto& st = cfg.streak;
  check_range(st.amp_min, st.amp_max, 0.0, 1.0, "streak.amplitude");
  if (st.width_min < 1 || st.width_max < st.width_min)
    throw ConfigError("streak.width must satisfy 1 <= min <= max");
  check_range(st.gray_min, st.gray_max, 0.0, 1.0, "streak.gray");
  if (!(st.modulation >= 0.0 && st.modulation < 1.0))
    throw ConfigError("streak.modulation must be in [0,1)");
  if (!(st.edge_floor > 0.0 && st.edge_floor <= 1.0))
    throw ConfigError("streak.edge_floor must be in (0,1]");

  const auto& bd = cfg.banding;
  check_range(bd.amp_min, bd.amp_max, 0.0, 1.0, "banding.amplitude");
  if (bd.width_min < 2 || bd.width_max < bd.width_min)
    throw ConfigError("banding.width must satisfy 2 <= min <= max");
  if (!(bd.lobe_frac_min > 0.0 && bd.lobe_frac_max < 0.5 && bd.lobe_frac_min <= bd.lobe_frac_max))
    throw ConfigError("banding.lobe_frac must be an ordered range inside (0,0.5)");
  check_prob(bd.p_excess, "banding.p_excess");

  if (cfg.noise.cell_size <= 0.0) throw ConfigError("noise.cell_size must be positive");
  if (cfg.noise.octaves < 1) throw ConfigError("noise.octaves must be at least 1");
  if (cfg.noise.persistence <= 0.0) throw ConfigError("noise.persistence must be positive");
}

StreakTextureParams texture_params(const GenConfig& cfg) {
  StreakTextureParams p;
  p.modulation = cfg.streak.modulation;
  p.edge_floor = cfg.streak.edge_floor;
  p.noise = cfg.noise;
  return p;
}

nlohmann::json gen_config_to_json(const GenConfig& cfg) {
  nlohmann::json j;
  j["class_scheme"] = scheme_name(cfg.scheme);
  j["target"] = {{"width", cfg.target_w}, {"height", cfg.target_h}};
  j["scenario"] = {{"p_defective", cfg.scenario.p_defective},
                   {"p_streak", cfg.scenario.p_streak},
                   {"banding_shares", cfg.scenario.banding_shares},
                   {"defect_count", {cfg.scenario.defect_count_min, cfg.scenario.defect_count_max}},
                   {"full_span_prob", cfg.scenario.full_span_prob},
                   {"partial_min_frac", cfg.scenario.partial_min_frac}};
  j["streak"] = {{"amplitude", {cfg.streak.amp_min, cfg.streak.amp_max}},
                 {"width", {cfg.streak.width_min, cfg.streak.width_max}},
                 {"gray", {cfg.streak.gray_min, cfg.streak.gray_max}},
                 {"modulation", cfg.streak.modulation},
                 {"edge_floor", cfg.streak.edge_floor}};
  j["banding"] = {{"amplitude", {cfg.banding.amp_min, cfg.banding.amp_max}},
                  {"width", {cfg.banding.width_min, cfg.banding.width_max}},
                  {"lobe_frac", {cfg.banding.lobe_frac_min, cfg.banding.lobe_frac_max}},
                  {"p_excess", cfg.banding.p_excess}};
  j["noise"] = {{"cell_size", cfg.noise.cell_size},
                {"octaves", cfg.noise.octaves},
                {"persistence", cfg.noise.persistence}};
  j["master_seed"] = cfg.master_seed;
  if (!cfg.printscan_model.empty()) j["printscan_model"] = cfg.printscan_model;
  return j;
}

GenConfig gen_config_from_json(const nlohmann::json& j) {
  GenConfig cfg;
  require_keys(j, "config",
               {"class_scheme", "target", "scenario", "streak", "banding", "noise", "master_seed",
                "printscan_model"});

  if (j.contains("class_scheme")) cfg.scheme = scheme_from_name(j.at("class_scheme").get<std::string>());
  if (j.contains("target")) {
    const auto& t = j.at("target");
    require_keys(t, "target", {"width", "height"});
    cfg.target_w = t.at("width").get<int>();
    cfg.target_h = t.at("height").get<int>();
  }
  if (j.contains("scenario")) {
    const auto& s = j.at("scenario");
    require_keys(s, "scenario",
                 {"p_defective", "p_streak", "banding_shares", "defect_count", "full_span_prob",
                  "partial_min_frac"});
    auto& sc = cfg.scenario;
    if (s.contains("p_defective")) sc.p_defective = s.at("p_defective").get<double>();
    if (s.contains("p_streak")) sc.p_streak = s.at("p_streak").get<double>();
    if (s.contains("banding_shares")) {
      const auto& sh = s.at("banding_shares");
      if (!sh.is_array() || sh.size() != 4)
        throw ConfigError("scenario.banding_shares must hold 4 values");
      for (int i = 0; i < 4; ++i) sc.banding_shares[i] = sh[i].get<double>();
    }
    if (s.contains("defect_count")) {
      const auto& dc = s.at("defect_count");
      if (!dc.is_array() || dc.size() != 2)
        throw ConfigError("scenario.defect_count must be a [min, max] pair");
      sc.defect_count_min = dc[0].get<int>();
      sc.defect_count_max = dc[1].get<int>();
    }
    if (s.contains("full_span_prob")) sc.full_span_prob = s.at("full_span_prob").get<double>();
    if (s.contains("partial_min_frac")) sc.partial_min_frac = s.at("partial_min_frac").get<double>();
  }
  if (j.contains("streak")) {
    const auto& s = j.at("streak");
    require_keys(s, "streak", {"amplitude", "width", "gray", "modulation", "edge_floor"});
    auto& st = cfg.streak;
    if (s.contains("amplitude")) {
      const auto r = range_of(s, "amplitude");
      st.amp_min = r[0];
      st.amp_max = r[1];
    }
    if (s.contains("width")) {
      const auto r = range_of(s, "width");
      st.width_min = static_cast<int>(r[0]);
      st.width_max = static_cast<int>(r[1]);
    }
    if (s.contains("gray")) {
      const auto r = range_of(s, "gray");
      st.gray_min = r[0];
      st.gray_max = r[1];
    }
    if (s.contains("modulation")) st.modulation = s.at("modulation").get<double>();
    if (s.contains("edge_floor")) st.edge_floor = s.at("edge_floor").get<double>();
  }
  if (j.contains("banding")) {
    const auto& b = j.at("banding");
    require_keys(b, "banding", {"amplitude", "width", "lobe_frac", "p_excess"});
    auto& bd = cfg.banding;
    if (b.contains("amplitude")) {
      const auto r = range_of(b, "amplitude");
      bd.amp_min = r[0];
      bd.amp_max = r[1];
    }
    if (b.contains("width")) {
      const auto r = range_of(b, "width");
      bd.width_min = static_cast<int>(r[0]);
      bd.width_max = static_cast<int>(r[1]);
    }
    if (b.contains("lobe_frac")) {
      const auto r = range_of(b, "lobe_frac");
      bd.lobe_frac_min = r[0];
      bd.lobe_frac_max = r[1];
    }
    if (b.contains("p_excess")) bd.p_excess = b.at("p_excess").get<double>();
  }
  if (j.contains("noise")) {
    const auto& n = j.at("noise");
    require_keys(n, "noise", {"cell_size", "octaves", "persistence"});
    if (n.contains("cell_size")) cfg.noise.cell_size = n.at("cell_size").get<double>();
    if (n.contains("octaves")) cfg.noise.octaves = n.at("octaves").get<int>();
    if (n.contains("persistence")) cfg.noise.persistence = n.at("persistence").get<double>();
  }
  if (j.contains("master_seed")) cfg.master_seed = j.at("master_seed").get<std::uint64_t>();
  if (j.contains("printscan_model")) cfg.printscan_model = j.at("printscan_model").get<std::string>();

  validate_gen_config(cfg);
  return cfg;
}

GenConfig load_gen_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("config " + path.string() + ": " + e.what());
  }
  try {
    return gen_config_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
}

void save_gen_config(const std::filesystem::path& path, const GenConfig& cfg) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write config " + path.string());
  out << gen_config_to_json(cfg).dump(2) << "\n";
  if (!out) throw IoError("failed writing config " + path.string());
}

}  // namespace printmap
