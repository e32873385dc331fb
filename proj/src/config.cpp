#include "recodyn/config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "recodyn/errors.hpp"

namespace recodyn {

namespace {
std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}
} // namespace

ProtocolConfig ProtocolConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    ProtocolConfig cfg;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected 'key = value'");
        cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    cfg.validate();
    return cfg;
}

void ProtocolConfig::set(const std::string& key, const std::string& value) {
    try {
        if (key == "bins") bins = std::stoi(value);
        else if (key == "response_bins") response_bins = std::stoi(value);
        else if (key == "scheme") {
            if (value == "equal_frequency") scheme = BinScheme::EqualFrequency;
            else if (value == "equal_width") scheme = BinScheme::EqualWidth;
            else throw ConfigError("unknown scheme '" + value + "'");
        }
        else if (key == "k_max") k_max = std::stoi(value);
        else if (key == "shortlist_cap") shortlist_cap = std::stoi(value);
        else if (key == "c1_pool") c1_pool = std::stoi(value);
        else if (key == "z") z = std::stod(value);
        else if (key == "replicates") replicates = std::stoi(value);
        else if (key == "min_cell") min_cell = std::stoi(value);
        else if (key == "max_depth") max_depth = std::stoi(value);
        else if (key == "refine_factor") refine_factor = std::stod(value);
        else if (key == "reliability_min_avg_cell") reliability_min_avg_cell = std::stod(value);
        else if (key == "exhaustive_budget") exhaustive_budget = static_cast<std::size_t>(std::stoull(value));
        else if (key == "beam_width") beam_width = std::stoi(value);
        else if (key == "seed") seed = std::stoull(value);
        else if (key == "threads") threads = std::stoi(value);
        else if (key == "sigma_eps") sigma_eps = std::stod(value);
        else if (key == "rho") rho = std::stod(value);
        else throw ConfigError("unknown config key '" + key + "'");
    } catch (const std::invalid_argument&) {
        throw ConfigError("bad value '" + value + "' for key '" + key + "'");
    } catch (const std::out_of_range&) {
        throw ConfigError("out-of-range value '" + value + "' for key '" + key + "'");
    }
}

std::map<std::string, std::string> ProtocolConfig::items() const {
    std::ostringstream z_, rf, rel, sig, rh;
    z_ << z; rf << refine_factor; rel << reliability_min_avg_cell; sig << sigma_eps; rh << rho;
    return {
        {"bins", std::to_string(bins)},
        {"response_bins", std::to_string(response_bins)},
        {"scheme", scheme == BinScheme::EqualFrequency ? "equal_frequency" : "equal_width"},
        {"k_max", std::to_string(k_max)},
        {"shortlist_cap", std::to_string(shortlist_cap)},
        {"c1_pool", std::to_string(c1_pool)},
        {"z", z_.str()},
        {"replicates", std::to_string(replicates)},
        {"min_cell", std::to_string(min_cell)},
        {"max_depth", std::to_string(max_depth)},
        {"refine_factor", rf.str()},
        {"reliability_min_avg_cell", rel.str()},
        {"exhaustive_budget", std::to_string(exhaustive_budget)},
        {"beam_width", std::to_string(beam_width)},
        {"seed", std::to_string(seed)},
        {"threads", std::to_string(threads)},
        {"sigma_eps", sig.str()},
        {"rho", rh.str()},
    };
}

std::string ProtocolConfig::to_text() const {
    std::ostringstream os;
    for (const auto& [k, v] : items()) os << k << " = " << v << "\n";
    return os.str();
}

void ProtocolConfig::validate() const {
    if (bins < 2 || response_bins < 2) throw ConfigError("bins must be >= 2");
    if (k_max < 1) throw ConfigError("k_max must be >= 1");
    if (replicates < 2) throw ConfigError("replicates must be >= 2");
    if (z <= 0) throw ConfigError("z must be positive");
    if (max_depth < 0) throw ConfigError("max_depth must be >= 0");
    if (refine_factor < 1.0) throw ConfigError("refine_factor must be >= 1");
    if (beam_width < 1) throw ConfigError("beam_width must be >= 1");
    if (exhaustive_budget < 1) throw ConfigError("exhaustive_budget must be >= 1");
    if (threads < 1) throw ConfigError("threads must be >= 1");
}

} // namespace recodyn
