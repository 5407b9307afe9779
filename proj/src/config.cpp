#include "dtwist/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

namespace dtwist {

namespace {

std::string trim(const std::string& s)
{
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v)
{
    std::string s = trim(v);
    std::size_t used = 0;
    double x = 0.0;
    try {
        x = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (s.empty() || used != s.size()) throw ConfigError(key + ": not a number: '" + v + "'");
    return x;
}

long to_long(const std::string& key, const std::string& v)
{
    std::string s = trim(v);
    long x = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (s.empty() || ec != std::errc() || p != s.data() + s.size())
        throw ConfigError(key + ": not an integer: '" + v + "'");
    return x;
}

bool to_bool(const std::string& key, const std::string& v)
{
    std::string s = trim(v);
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    throw ConfigError(key + ": not a boolean: '" + v + "'");
}

std::vector<double> to_list(const std::string& key, const std::string& v)
{
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_double(key, item));
    if (out.empty()) throw ConfigError(key + ": empty list");
    return out;
}

// shortest text that reads back to the same double
std::string fmt(double x)
{
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, p);
}

struct Field {
    std::string key;
    std::function<void(RunConfig&, const std::string&, const std::string&)> set;
    std::function<nlohmann::json(const RunConfig&)> get;
    std::function<std::string(const RunConfig&)> text;
};

#define DT_REAL(name, member)                                                                     \
    Field{name, [](RunConfig& c, const std::string& k, const std::string& v) { c.member = to_double(k, v); }, \
          [](const RunConfig& c) { return nlohmann::json(c.member); },                           \
          [](const RunConfig& c) { return fmt(c.member); }}
#define DT_INT(name, member, type)                                                                \
    Field{name,                                                                                   \
          [](RunConfig& c, const std::string& k, const std::string& v) {                          \
              c.member = static_cast<type>(to_long(k, v));                                        \
          },                                                                                      \
          [](const RunConfig& c) { return nlohmann::json(c.member); },                           \
          [](const RunConfig& c) { return std::to_string(c.member); }}
#define DT_BOOL(name, member)                                                                     \
    Field{name, [](RunConfig& c, const std::string& k, const std::string& v) { c.member = to_bool(k, v); }, \
          [](const RunConfig& c) { return nlohmann::json(c.member); },                           \
          [](const RunConfig& c) { return std::string(c.member ? "true" : "false"); }}

const std::vector<Field>& fields()
{
    static const std::vector<Field> f = {
        DT_REAL("params.omega", params.omega),
        DT_REAL("params.delta", params.delta),
        DT_REAL("params.C", params.bigC),
        DT_REAL("params.B", params.bigB),
        DT_INT("params.M", params.truncation_M, long),
        Field{"params.alpha1",
              [](RunConfig& c, const std::string& k, const std::string& v) {
                  if (trim(v) == "auto") {
                      c.params.alpha1_policy = Alpha1Policy::half_abs_K1;
                  } else {
                      c.params.alpha1_policy = Alpha1Policy::explicit_value;
                      c.params.alpha1_value = to_double(k, v);
                  }
              },
              [](const RunConfig& c) {
                  return c.params.alpha1_policy == Alpha1Policy::half_abs_K1 ? nlohmann::json("auto")
                                                                             : nlohmann::json(c.params.alpha1_value);
              },
              [](const RunConfig& c) {
                  return c.params.alpha1_policy == Alpha1Policy::half_abs_K1 ? std::string("auto")
                                                                             : fmt(c.params.alpha1_value);
              }},
        DT_BOOL("params.swap_gamma", params.swap_gamma),
        DT_BOOL("params.rigid", rigid),
        DT_REAL("params.quadrature_tolerance", quadrature_tolerance),

        DT_REAL("tolerances.invariance", tol.invariance),
        DT_REAL("tolerances.linearity_deviation", tol.linearity_deviation),
        DT_REAL("tolerances.linearity_slope", tol.linearity_slope),
        DT_REAL("tolerances.recurrence", tol.recurrence),
        DT_REAL("tolerances.zero_seed", tol.zero_seed),
        DT_REAL("tolerances.jump", tol.jump),
        DT_REAL("tolerances.offmidpoint_jump", tol.offmidpoint_jump),
        DT_REAL("tolerances.wandering", tol.wandering),
        DT_REAL("tolerances.inverse", tol.inverse),
        DT_REAL("tolerances.det", tol.det),
        DT_REAL("tolerances.twist", tol.twist),
        DT_REAL("tolerances.periodicity", tol.periodicity),
        DT_REAL("tolerances.phi_mean_slack", tol.phi_mean_slack),
        DT_REAL("tolerances.conjugacy", tol.conjugacy),
        DT_REAL("tolerances.manifold", tol.manifold),
        DT_REAL("tolerances.ratio", tol.ratio),
        DT_REAL("tolerances.side", tol.side),
        DT_REAL("tolerances.collinearity", tol.collinearity),
        DT_REAL("tolerances.convergence", tol.convergence),
        DT_REAL("tolerances.term_sum", tol.term_sum),
        DT_REAL("tolerances.plateau", tol.plateau),

        Field{"output.dir", [](RunConfig& c, const std::string&, const std::string& v) { c.output_dir = trim(v); },
              [](const RunConfig& c) { return nlohmann::json(c.output_dir); },
              [](const RunConfig& c) { return c.output_dir; }},
        DT_BOOL("output.sequences_csv", write_sequences),
        DT_BOOL("output.gaps_csv", write_gaps),

        DT_INT("verify.samples", verify_samples, long),
        DT_INT("verify.seed", seed, std::uint64_t),
        DT_INT("verify.rotation_n", rotation_n, long),
        DT_INT("verify.jump_samples", jump_samples, long),
        DT_INT("verify.structural_samples", structural_samples, long),

        DT_INT("regularity.grid", regularity_grid, int),
        DT_REAL("regularity.c_factor", c_factor),
        DT_REAL("regularity.min_ratio", min_c_ratio),

        DT_INT("portrait.orbits", portrait_orbits, long),
        DT_INT("portrait.steps", portrait_steps, long),
        DT_INT("portrait.curve_samples", portrait_curve_samples, long),
        DT_REAL("portrait.r_spread", portrait_r_spread),

        DT_INT("manifolds.k_max", manifold_k_max, long),
        DT_INT("manifolds.family", manifold_family, long),
        DT_INT("manifolds.convergence_n", convergence_n, long),
        DT_REAL("manifolds.convergence_s", convergence_s),
        DT_INT("manifolds.segment_points", segment_points, int),

        Field{"diffusion.offsets",
              [](RunConfig& c, const std::string& k, const std::string& v) { c.diffusion_offsets = to_list(k, v); },
              [](const RunConfig& c) { return nlohmann::json(c.diffusion_offsets); },
              [](const RunConfig& c) {
                  std::string s;
                  for (double x : c.diffusion_offsets) s += (s.empty() ? "" : ", ") + fmt(x);
                  return s;
              }},
        DT_INT("diffusion.steps", diffusion_steps, long),
        DT_INT("diffusion.gap", diffusion_gap, long),
        DT_REAL("diffusion.position", diffusion_position),
    };
    return f;
}

#undef DT_REAL
#undef DT_INT
#undef DT_BOOL

const Field& find_field(const std::string& key)
{
    for (const auto& f : fields())
        if (f.key == key) return f;
    throw ConfigError("unknown config key '" + key + "'");
}

} // namespace

void apply_setting(RunConfig& c, const std::string& key, const std::string& value)
{
    find_field(trim(key)).set(c, trim(key), value);
}

void apply_setting(RunConfig& c, const std::string& assignment)
{
    auto eq = assignment.find('=');
    if (eq == std::string::npos) throw ConfigError("expected key=value, got '" + assignment + "'");
    apply_setting(c, assignment.substr(0, eq), assignment.substr(eq + 1));
}

RunConfig parse_config(std::istream& is)
{
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        pt::read_ini(is, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    RunConfig c;
    for (const auto& [section, body] : tree) {
        if (body.empty()) throw ConfigError("key '" + section + "' outside any section");
        for (const auto& [key, node] : body) apply_setting(c, section + "." + key, node.data());
    }
    return c;
}

RunConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    return parse_config(in);
}

std::vector<std::string> config_keys()
{
    std::vector<std::string> keys;
    for (const auto& f : fields()) keys.push_back(f.key);
    return keys;
}

nlohmann::json config_json(const RunConfig& c)
{
    nlohmann::json j = nlohmann::json::object();
    for (const auto& f : fields()) {
        auto dot = f.key.find('.');
        j[f.key.substr(0, dot)][f.key.substr(dot + 1)] = f.get(c);
    }
    return j;
}

std::string default_config_ini()
{
    RunConfig c;
    std::ostringstream os;
    std::string section;
    for (const auto& f : fields()) {
        auto dot = f.key.find('.');
        std::string s = f.key.substr(0, dot);
        if (s != section) {
            if (!section.empty()) os << '\n';
            os << '[' << s << "]\n";
            section = s;
        }
        os << f.key.substr(dot + 1) << " = " << f.text(c) << '\n';
    }
    return os.str();
}

} // namespace dtwist
