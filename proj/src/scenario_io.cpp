#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "scplan/scenario.hpp"

namespace scplan {

namespace {

struct CatalogEntry {
  const char* name;
  DemandKind demand;
  Perturbation perturbation;
  bool stochastic_lead;
};

const std::vector<CatalogEntry>& catalog() {
  using P = Perturbation;
  static const std::vector<CatalogEntry> entries = {
      {"N0", DemandKind::seasonal, P::none(), true},
      {"N20", DemandKind::seasonal, P::gaussian(20), true},
      {"N40", DemandKind::seasonal, P::gaussian(40), true},
      {"N60", DemandKind::seasonal, P::gaussian(60), true},
      {"N0cl", DemandKind::seasonal, P::none(), false},
      {"N20cl", DemandKind::seasonal, P::gaussian(20), false},
      {"N40cl", DemandKind::seasonal, P::gaussian(40), false},
      {"N60cl", DemandKind::seasonal, P::gaussian(60), false},
      {"rN0", DemandKind::regular, P::none(), true},
      {"rN50", DemandKind::regular, P::gaussian(50), true},
      {"rN100", DemandKind::regular, P::gaussian(100), true},
      {"rU200", DemandKind::regular, P::uniform(-200, 200), true},
      {"rN0cl", DemandKind::regular, P::none(), false},
      {"rN50cl", DemandKind::regular, P::gaussian(50), false},
      {"rN100cl", DemandKind::regular, P::gaussian(100), false},
      {"rU200cl", DemandKind::regular, P::uniform(-200, 200), false},
      {"N20stc", DemandKind::seasonal, P::gaussian(20), true},
  };
  return entries;
}

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

template <typename T>
std::string join(const std::vector<T>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    if constexpr (std::is_same_v<T, std::string>)
      out += values[i];
    else
      out += format_number(static_cast<double>(values[i]));
  }
  return out;
}

std::string join_nested(const std::vector<std::vector<double>>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += "; ";
    for (std::size_t k = 0; k < values[i].size(); ++k) {
      if (k) out += " ";
      out += format_number(values[i][k]);
    }
  }
  return out;
}

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) parts.push_back(trim(item));
  if (!text.empty() && text.back() == sep) parts.emplace_back();
  return parts;
}

double parse_double(const std::string& token, const std::string& key) {
  char* end = nullptr;
  const double v = std::strtod(token.c_str(), &end);
  if (token.empty() || end != token.c_str() + token.size())
    throw ConfigError("scenario key '" + key + "': cannot parse number '" + token + "'");
  return v;
}

std::vector<double> parse_list(const std::string& text, const std::string& key) {
  std::vector<double> out;
  if (trim(text).empty()) return out;
  for (const auto& token : split(text, ',')) out.push_back(parse_double(token, key));
  return out;
}

std::vector<std::vector<double>> parse_nested(const std::string& text, const std::string& key,
                                              std::size_t expected) {
  std::vector<std::vector<double>> out;
  for (const auto& group : split(text, ';')) {
    std::vector<double> row;
    std::stringstream ss(group);
    std::string token;
    while (ss >> token) row.push_back(parse_double(token, key));
    out.push_back(std::move(row));
  }
  if (out.size() != expected)
    throw ConfigError("scenario key '" + key + "': expected " + std::to_string(expected) +
                      " ';'-separated groups, got " + std::to_string(out.size()));
  return out;
}

class Section {
 public:
  Section(const boost::property_tree::ptree& root, std::string name) : name_(std::move(name)) {
    auto child = root.get_child_optional(name_);
    if (!child) throw ConfigError("scenario file lacks section [" + name_ + "]");
    tree_ = *child;
  }

  std::string text(const std::string& key) const {
    auto v = tree_.get_optional<std::string>(key);
    if (!v) throw ConfigError("scenario section [" + name_ + "] lacks key '" + key + "'");
    return trim(*v);
  }
  std::string text_or(const std::string& key, const std::string& fallback) const {
    auto v = tree_.get_optional<std::string>(key);
    return v ? trim(*v) : fallback;
  }
  bool has(const std::string& key) const { return tree_.count(key) > 0; }
  double number(const std::string& key) const { return parse_double(text(key), key); }
  int integer(const std::string& key) const {
    const double v = number(key);
    if (v != static_cast<int>(v))
      throw ConfigError("scenario key '" + key + "' must be an integer");
    return static_cast<int>(v);
  }
  std::vector<double> list(const std::string& key) const { return parse_list(text(key), key); }

 private:
  std::string name_;
  boost::property_tree::ptree tree_;
};

}  // namespace

const std::vector<std::string>& builtin_scenario_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& e : catalog()) out.emplace_back(e.name);
    return out;
  }();
  return names;
}

ScenarioSpec builtin_scenario(const std::string& name) {
  const auto& entries = catalog();
  const auto it = std::find_if(entries.begin(), entries.end(),
                               [&](const CatalogEntry& e) { return name == e.name; });
  if (it == entries.end()) throw ConfigError("unknown scenario '" + name + "'");

  ScenarioSpec s;
  s.name = name;
  s.chain = default_chain();
  s.demand.kind = it->demand;
  s.demand.perturbation = it->perturbation;
  s.lead_time.kind =
      it->stochastic_lead ? LeadTimeSpec::Kind::stochastic : LeadTimeSpec::Kind::constant;
  if (name == "N20stc") s.chain.stock_cost = {1, 2, 1, 2, 5, 6, 5, 6};
  return s;
}

ValidationResult validate_scenario(const ScenarioSpec& scenario) {
  ValidationResult result = validate_config(scenario.chain);
  if (auto msg = check_demand_spec(scenario.demand); !msg.empty())
    result.violations.push_back(msg);
  if (auto msg = check_lead_time_spec(scenario.lead_time); !msg.empty())
    result.violations.push_back(msg);
  if (result.ok()) {
    const std::size_t avg = static_cast<std::size_t>(scenario.lead_time.average);
    for (const auto& p : scenario.chain.initial_production)
      if (p.size() > avg)
        result.violations.push_back("initial production defined beyond the average lead time");
    for (const auto& t : scenario.chain.initial_transport)
      if (t.size() > avg)
        result.violations.push_back("initial transport defined beyond the average lead time");
  }
  return result;
}

void require_valid(const ScenarioSpec& scenario) {
  const auto result = validate_scenario(scenario);
  if (result.ok()) return;
  std::string message = "invalid scenario '" + scenario.name + "':";
  for (const auto& v : result.violations) message += "\n  - " + v;
  throw ConfigError(message);
}

ScenarioSpec read_scenario(std::istream& in) {
  boost::property_tree::ptree root;
  try {
    boost::property_tree::read_ini(in, root);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("malformed scenario file: ") + e.what());
  }

  ScenarioSpec s;
  s.name = Section(root, "scenario").text("name");

  const Section chain(root, "chain");
  ChainConfig& c = s.chain;
  for (double v : chain.list("echelon_layout")) c.echelon_layout.push_back(static_cast<int>(v));
  c.node_names = chain.has("node_names") ? split(chain.text("node_names"), ',')
                                         : default_node_names(c.echelon_layout);
  if (chain.has("links")) {
    for (const auto& token : split(chain.text("links"), ',')) {
      const auto dash = token.find('-');
      if (dash == std::string::npos) throw ConfigError("link '" + token + "' is not src-dst");
      c.links.push_back({static_cast<int>(parse_double(token.substr(0, dash), "links")),
                         static_cast<int>(parse_double(token.substr(dash + 1), "links"))});
    }
  } else {
    c.links = layered_links(c.echelon_layout);
  }
  c.horizon = chain.integer("horizon");
  for (double v : chain.list("is_factory")) c.is_factory.push_back(v != 0.0);
  c.processing_ratio = chain.list("processing_ratio");
  c.stock_cost = chain.list("stock_cost");
  c.production_cost = chain.list("production_cost");
  c.processing_cost = chain.list("processing_cost");
  c.transport_cost = chain.number("transport_cost");
  c.excess_penalty = chain.number("excess_penalty");
  c.unmet_penalty = chain.number("unmet_penalty");
  c.production_cap = chain.list("production_cap");
  c.processing_cap = chain.list("processing_cap");
  c.stock_cap = chain.list("stock_cap");
  c.transport_cap = chain.has("transport_cap") ? chain.list("transport_cap") : c.stock_cap;
  c.initial_stock = chain.list("initial_stock");
  c.initial_production = parse_nested(chain.text("initial_production"), "initial_production",
                                      c.node_names.size());
  c.initial_transport =
      parse_nested(chain.text("initial_transport"), "initial_transport", c.links.size());
  const std::string units = chain.text_or("factory_cut_units", "raw");
  if (units == "raw")
    c.factory_cut_units = FactoryCutUnits::raw;
  else if (units == "product")
    c.factory_cut_units = FactoryCutUnits::product;
  else
    throw ConfigError("factory_cut_units must be 'raw' or 'product'");

  const Section demand(root, "demand");
  DemandSpec& d = s.demand;
  const std::string kind = demand.text("kind");
  if (kind == "seasonal")
    d.kind = DemandKind::seasonal;
  else if (kind == "regular")
    d.kind = DemandKind::regular;
  else
    throw ConfigError("demand kind must be 'seasonal' or 'regular'");
  d.sin_min = demand.number("sin_min");
  d.sin_max = demand.number("sin_max");
  d.clip_min = demand.number("clip_min");
  d.clip_max = demand.number("clip_max");
  d.peaks = demand.integer("peaks");
  d.regular_mean = demand.number("regular_mean");
  const std::string pert = demand.text("perturbation");
  if (pert == "none") {
    d.perturbation = Perturbation::none();
  } else if (pert == "gaussian") {
    d.perturbation = Perturbation::gaussian(demand.number("perturbation_sigma"));
  } else if (pert == "uniform") {
    d.perturbation = Perturbation::uniform(demand.number("perturbation_low"),
                                           demand.number("perturbation_high"));
  } else {
    throw ConfigError("perturbation must be 'none', 'gaussian' or 'uniform'");
  }

  const Section lead(root, "lead_time");
  const std::string lead_kind = lead.text("kind");
  if (lead_kind == "constant")
    s.lead_time.kind = LeadTimeSpec::Kind::constant;
  else if (lead_kind == "stochastic")
    s.lead_time.kind = LeadTimeSpec::Kind::stochastic;
  else
    throw ConfigError("lead_time kind must be 'constant' or 'stochastic'");
  s.lead_time.average = lead.integer("average");
  s.lead_time.maximum = lead.integer("maximum");
  return s;
}

ScenarioSpec load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file '" + path + "'");
  return read_scenario(in);
}

void write_scenario(std::ostream& out, const ScenarioSpec& s) {
  const ChainConfig& c = s.chain;
  std::vector<std::string> links;
  for (const auto& l : c.links) links.push_back(std::to_string(l.source) + "-" + std::to_string(l.dest));
  std::vector<double> factory_flags;
  for (bool f : c.is_factory) factory_flags.push_back(f ? 1.0 : 0.0);

  out << "[scenario]\nname = " << s.name << "\n\n[chain]\n";
  out << "echelon_layout = " << join(c.echelon_layout) << "\n";
  out << "node_names = " << join(c.node_names) << "\n";
  out << "links = " << join(links) << "\n";
  out << "horizon = " << c.horizon << "\n";
  out << "is_factory = " << join(factory_flags) << "\n";
  out << "processing_ratio = " << join(c.processing_ratio) << "\n";
  out << "stock_cost = " << join(c.stock_cost) << "\n";
  out << "production_cost = " << join(c.production_cost) << "\n";
  out << "processing_cost = " << join(c.processing_cost) << "\n";
  out << "transport_cost = " << format_number(c.transport_cost) << "\n";
  out << "excess_penalty = " << format_number(c.excess_penalty) << "\n";
  out << "unmet_penalty = " << format_number(c.unmet_penalty) << "\n";
  out << "production_cap = " << join(c.production_cap) << "\n";
  out << "processing_cap = " << join(c.processing_cap) << "\n";
  out << "stock_cap = " << join(c.stock_cap) << "\n";
  out << "transport_cap = " << join(c.transport_cap) << "\n";
  out << "initial_stock = " << join(c.initial_stock) << "\n";
  out << "; one ';'-separated group per node, units arriving at steps 1, 2, ...\n";
  out << "initial_production = " << join_nested(c.initial_production) << "\n";
  out << "; one ';'-separated group per link\n";
  out << "initial_transport = " << join_nested(c.initial_transport) << "\n";
  out << "factory_cut_units = "
      << (c.factory_cut_units == FactoryCutUnits::raw ? "raw" : "product") << "\n\n";

  const DemandSpec& d = s.demand;
  out << "[demand]\nkind = " << (d.kind == DemandKind::seasonal ? "seasonal" : "regular") << "\n";
  out << "sin_min = " << format_number(d.sin_min) << "\n";
  out << "sin_max = " << format_number(d.sin_max) << "\n";
  out << "clip_min = " << format_number(d.clip_min) << "\n";
  out << "clip_max = " << format_number(d.clip_max) << "\n";
  out << "peaks = " << d.peaks << "\n";
  out << "regular_mean = " << format_number(d.regular_mean) << "\n";
  switch (d.perturbation.kind) {
    case Perturbation::Kind::none:
      out << "perturbation = none\n";
      break;
    case Perturbation::Kind::gaussian:
      out << "perturbation = gaussian\nperturbation_sigma = "
          << format_number(d.perturbation.sigma) << "\n";
      break;
    case Perturbation::Kind::uniform:
      out << "perturbation = uniform\nperturbation_low = " << format_number(d.perturbation.low)
          << "\nperturbation_high = " << format_number(d.perturbation.high) << "\n";
      break;
  }
  out << "\n[lead_time]\nkind = "
      << (s.lead_time.kind == LeadTimeSpec::Kind::constant ? "constant" : "stochastic") << "\n";
  out << "average = " << s.lead_time.average << "\n";
  out << "maximum = " << s.lead_time.maximum << "\n";
}

ScenarioSpec resolve_scenario(const std::string& name_or_path) {
  const auto& names = builtin_scenario_names();
  if (std::find(names.begin(), names.end(), name_or_path) != names.end())
    return builtin_scenario(name_or_path);
  if (std::filesystem::exists(name_or_path)) return load_scenario_file(name_or_path);
  throw ConfigError("unknown scenario '" + name_or_path + "'");
}

}  // namespace scplan
