#include "qfolio/manifest.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "qfolio/error.hpp"

namespace qfolio {

namespace {

DateRange range_field(const nlohmann::json& j, const char* key) {
  const auto& v = j.at(key);
  std::optional<DateRange> r;
  if (v.is_string()) {
    r = parse_range(v.get<std::string>());
  } else {
    const auto start = Date::parse(v.at("start").get<std::string>());
    const auto end = Date::parse(v.at("end").get<std::string>());
    if (start && end) r = DateRange{*start, *end};
  }
  if (!r) throw Error(ErrorCode::InvalidConfig, std::string(key) + " is not a valid date range");
  return *r;
}

nlohmann::json range_json(const DateRange& r) { return {{"start", r.start.iso()}, {"end", r.end.iso()}}; }

}  // namespace

std::filesystem::path ExperimentManifest::prices_path() const {
  return prices.is_absolute() ? prices : base_dir / prices;
}

void ExperimentManifest::validate() const {
  const auto fail = [](const std::string& what) { throw Error(ErrorCode::InvalidConfig, what); };
  if (name.empty() || name.find('/') != std::string::npos) fail("name must be a non-empty path component");
  if (universe.empty()) fail("universe is empty");
  if (std::set<std::string>(universe.begin(), universe.end()).size() != universe.size())
    fail("universe contains duplicates");
  if (families.empty()) fail("families is empty");
  if (depths.empty()) fail("depths is empty");
  if (seeds.empty()) fail("seeds is empty");
  for (auto d : depths)
    if (d == 0) fail("depths must be >= 1");
  if (data_window.end < data_window.start) fail("data_window ends before it starts");
  if (future_window && future_window->end < future_window->start) fail("future_window ends before it starts");
  if (alpha && !(*alpha > 0.0)) throw Error(ErrorCode::NonPositivePenalty, "alpha must be > 0");
  if (budget < 1 || budget > universe.size())
    throw Error(ErrorCode::BudgetOutOfRange, "budget must lie in [1, universe size]");
  optimizer.validate();
}

ExperimentManifest parse_manifest(const nlohmann::json& j, const std::filesystem::path& base_dir) {
  ExperimentManifest m;
  try {
    m.base_dir = base_dir;
    m.name = j.at("name").get<std::string>();
    m.prices = j.at("prices").get<std::string>();
    m.universe = j.at("universe").get<std::vector<std::string>>();
    m.data_window = range_field(j, "data_window");
    if (j.contains("future_window") && !j.at("future_window").is_null()) m.future_window = range_field(j, "future_window");
    m.q = j.value("q", 0.5);
    if (j.contains("alpha")) {
      const auto& a = j.at("alpha");
      if (a.is_string()) {
        if (a.get<std::string>() != "n/2") throw Error(ErrorCode::InvalidConfig, "alpha must be a number or \"n/2\"");
      } else {
        m.alpha = a.get<double>();
      }
    }
    m.budget = j.at("budget").get<std::size_t>();
    for (const auto& f : j.at("families")) {
      const auto fam = parse_family(f.get<std::string>());
      if (!fam) throw Error(ErrorCode::InvalidConfig, "unknown family " + f.get<std::string>());
      m.families.push_back(*fam);
    }
    m.depths = j.at("depths").get<std::vector<std::size_t>>();
    m.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    if (j.contains("optimizer")) m.optimizer = j.at("optimizer").get<OptimizerConfig>();
    m.optimizer.shots = j.value("shots", m.optimizer.shots);
    m.optimizer.seed = 0;
    if (j.contains("manual_portfolios"))
      m.manual_portfolios = j.at("manual_portfolios").get<std::vector<std::vector<std::string>>>();
    if (j.contains("output_dir")) m.output_dir = j.at("output_dir").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("manifest: ") + e.what());
  }
  return m;
}

ExperimentManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidConfig, "cannot open manifest " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::InvalidConfig, path.string() + ": " + e.what());
  }
  return parse_manifest(j, std::filesystem::absolute(path).parent_path());
}

nlohmann::json to_json(const ExperimentManifest& m) {
  nlohmann::json families = nlohmann::json::array();
  for (auto f : m.families) families.push_back(to_string(f));
  nlohmann::json optimizer = m.optimizer;
  optimizer.erase("seed");
  optimizer.erase("shots");

  nlohmann::json j{{"name", m.name},
                   {"prices", std::filesystem::absolute(m.prices_path()).lexically_normal().string()},
                   {"universe", m.universe},
                   {"data_window", range_json(m.data_window)},
                   {"future_window", m.future_window ? range_json(*m.future_window) : nlohmann::json(nullptr)},
                   {"q", m.q},
                   {"budget", m.budget},
                   {"families", families},
                   {"depths", m.depths},
                   {"seeds", m.seeds},
                   {"shots", m.optimizer.shots},
                   {"optimizer", optimizer},
                   {"manual_portfolios", m.manual_portfolios},
                   {"output_dir", m.output_dir.string()}};
  j["alpha"] = m.alpha ? nlohmann::json(*m.alpha) : nlohmann::json("n/2");
  return j;
}

}  // namespace qfolio
