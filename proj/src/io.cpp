#include "qsc/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace qsc {

ModeGrid ExperimentConfig::make_grid() const
{
    if (!times.empty())
        return ModeGrid(times);
    return ModeGrid(horizon, n_steps);
}

SchemeOptions ExperimentConfig::make_scheme() const
{
    if (scheme == "picard")
        return SchemeOptions::picard();
    return SchemeOptions::euler();
}

DriverMode ExperimentConfig::make_driver() const
{
    return driver == "explicit" ? DriverMode::Explicit : DriverMode::Implicit;
}

std::vector<int> ExperimentConfig::make_anchors() const
{
    if (!anchors.empty())
        return anchors;
    std::vector<int> all;
    for (int k = 0; k < n_steps; ++k)
        all.push_back(k);
    return all;
}

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep))
        out.push_back(trim(item));
    return out;
}

double to_double(const std::string& key, const std::string& v)
{
    try {
        size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size())
            throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': expected a number, got '" + v + "'");
    }
}

long to_long(const std::string& key, const std::string& v)
{
    try {
        size_t pos = 0;
        const long x = std::stol(v, &pos);
        if (pos != v.size())
            throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': expected an integer, got '" + v + "'");
    }
}

} // namespace

ExperimentConfig parse_config_text(const std::string& text)
{
    ExperimentConfig cfg;
    std::map<std::string, std::string> kv;
    std::string section;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line[0] == '#' || line[0] == ';')
            continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("config line " + std::to_string(lineno) +
                                  ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key =
            (section.empty() ? "" : section + ".") + trim(line.substr(0, eq));
        kv[key] = trim(line.substr(eq + 1));
    }

    bool steps_set = false;
    bool modes_set = false;
    for (const auto& [key, v] : kv) {
        if (key == "grid.T")
            cfg.horizon = to_double(key, v);
        else if (key == "grid.n_steps") {
            cfg.n_steps = static_cast<int>(to_long(key, v));
            steps_set = true;
        } else if (key == "grid.n_modes") {
            cfg.n_modes = static_cast<int>(to_long(key, v));
            modes_set = true;
        } else if (key == "grid.times") {
            cfg.times.clear();
            for (const auto& t : split(v, ','))
                cfg.times.push_back(to_double(key, t));
        } else if (key == "coefficients.d")
            cfg.data.d_name = v;
        else if (key == "coefficients.d_lambda")
            cfg.data.d_lambda = to_double(key, v);
        else if (key == "coefficients.f")
            cfg.data.f_name = v;
        else if (key == "coefficients.f_lambda")
            cfg.data.f_lambda = to_double(key, v);
        else if (key == "data.terminal")
            cfg.data.terminal_name = v;
        else if (key == "data.terminal_scale")
            cfg.data.terminal_scale = to_double(key, v);
        else if (key == "data.source")
            cfg.data.source_name = v;
        else if (key == "data.source_scale")
            cfg.data.source_scale = to_double(key, v);
        else if (key == "run.probes")
            cfg.probe_kind = v;
        else if (key == "run.scheme")
            cfg.scheme = v;
        else if (key == "run.driver")
            cfg.driver = v;
        else if (key == "run.seed") {
            cfg.seed = static_cast<uint64_t>(to_long(key, v));
            cfg.data.seed = cfg.seed;
        } else if (key == "run.trials")
            cfg.trials = static_cast<int>(to_long(key, v));
        else if (key == "run.jobs")
            cfg.jobs = static_cast<int>(to_long(key, v));
        else if (key == "run.out")
            cfg.out_dir = v;
        else if (key == "run.anchors") {
            cfg.anchors.clear();
            for (const auto& a : split(v, ','))
                cfg.anchors.push_back(static_cast<int>(to_long(key, a)));
        } else if (key == "tolerances.exact")
            cfg.tol_exact = to_double(key, v);
        else if (key == "tolerances.derived")
            cfg.tol_derived = to_double(key, v);
        else
            throw ConfigError("unknown config key '" + key + "'");
    }

    if (!cfg.times.empty()) {
        cfg.n_steps = static_cast<int>(cfg.times.size()) - 1;
        cfg.horizon = cfg.times.back();
        if (!modes_set)
            cfg.n_modes = cfg.n_steps;
    }
    if (steps_set && !modes_set)
        cfg.n_modes = cfg.n_steps;
    if (modes_set && !steps_set && cfg.times.empty())
        cfg.n_steps = cfg.n_modes;
    if (cfg.n_modes != cfg.n_steps)
        cfg.warnings.push_back("n_modes decoupled from n_steps (" +
                               std::to_string(cfg.n_modes) + " vs " +
                               std::to_string(cfg.n_steps) + ")");
    if (cfg.n_modes < 0 || cfg.n_modes > kMaxModes)
        throw ConfigError("config: n_modes out of range [0, " + std::to_string(kMaxModes) +
                          "]");
    const std::set<std::string> schemes{"euler", "picard"};
    if (!schemes.count(cfg.scheme))
        throw ConfigError("config key 'run.scheme': unknown value '" + cfg.scheme + "'");
    const std::set<std::string> drivers{"implicit", "explicit"};
    if (!drivers.count(cfg.driver))
        throw ConfigError("config key 'run.driver': unknown value '" + cfg.driver + "'");
    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

ResultRow ResultRow::from_report(const IdentityReport& r, int n, int steps, uint64_t seed,
                                 double order)
{
    return {r.name, n, steps, seed, r.abs_error, r.rel_error, order, r.pass};
}

namespace {

std::string fmt(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

} // namespace

void write_results_csv(const std::string& path, const std::vector<ResultRow>& rows)
{
    std::ofstream out(path);
    if (!out)
        throw ConfigError("cannot write '" + path + "'");
    out << "# " << kResultsVersion << "\n";
    out << "name,n,N,seed,abs_error,rel_error,order,pass\n";
    for (const auto& r : rows)
        out << r.name << ',' << r.n_modes << ',' << r.n_steps << ',' << r.seed << ','
            << fmt(r.abs_error) << ',' << fmt(r.rel_error) << ',' << fmt(r.order) << ','
            << (r.pass ? 1 : 0) << "\n";
}

std::vector<ResultRow> read_results_csv(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line) || line != std::string("# ") + kResultsVersion)
        throw ConfigError("'" + path + "': missing or mismatched results version header");
    std::getline(in, line); // column header
    std::vector<ResultRow> rows;
    while (std::getline(in, line)) {
        if (trim(line).empty())
            continue;
        const auto f = split(line, ',');
        if (f.size() != 8)
            throw ConfigError("'" + path + "': malformed row '" + line + "'");
        ResultRow r;
        r.name = f[0];
        r.n_modes = static_cast<int>(to_long("n", f[1]));
        r.n_steps = static_cast<int>(to_long("N", f[2]));
        r.seed = static_cast<uint64_t>(to_long("seed", f[3]));
        r.abs_error = to_double("abs_error", f[4]);
        r.rel_error = to_double("rel_error", f[5]);
        r.order = to_double("order", f[6]);
        r.pass = to_long("pass", f[7]) != 0;
        rows.push_back(std::move(r));
    }
    return rows;
}

void write_manifest(const std::string& path, const std::string& subcommand,
                    const ExperimentConfig& cfg)
{
    nlohmann::json j;
    j["version"] = kResultsVersion;
    j["subcommand"] = subcommand;
    j["grid"] = {{"T", cfg.horizon}, {"n_steps", cfg.n_steps}, {"n_modes", cfg.n_modes}};
    if (!cfg.times.empty())
        j["grid"]["times"] = cfg.times;
    j["coefficients"] = {{"d", cfg.data.d_name},
                         {"d_lambda", cfg.data.d_lambda},
                         {"f", cfg.data.f_name},
                         {"f_lambda", cfg.data.f_lambda}};
    j["data"] = {{"terminal", cfg.data.terminal_name},
                 {"terminal_scale", cfg.data.terminal_scale},
                 {"source", cfg.data.source_name},
                 {"source_scale", cfg.data.source_scale}};
    j["run"] = {{"probes", cfg.probe_kind}, {"scheme", cfg.scheme},
                {"driver", cfg.driver},     {"seed", cfg.seed},
                {"trials", cfg.trials},     {"jobs", cfg.jobs}};
    j["tolerances"] = {{"exact", cfg.tol_exact}, {"derived", cfg.tol_derived}};
    j["warnings"] = cfg.warnings;
    std::ofstream out(path);
    if (!out)
        throw ConfigError("cannot write '" + path + "'");
    out << j.dump(2) << "\n";
}

void dump_vector_process(const std::string& path, const VectorProcess& p)
{
    std::ofstream out(path);
    if (!out)
        throw ConfigError("cannot write '" + path + "'");
    out << "# " << kResultsVersion << " step,basis,re,im\n";
    for (int k = 0; k < p.n_steps(); ++k)
        for (Eigen::Index i = 0; i < p.at(k).size(); ++i)
            out << k << ',' << i << ',' << fmt(p.at(k)(i).real()) << ','
                << fmt(p.at(k)(i).imag()) << "\n";
}

void dump_matrix(const std::string& path, const Mat& m)
{
    std::ofstream out(path);
    if (!out)
        throw ConfigError("cannot write '" + path + "'");
    out << "# " << kResultsVersion << " row,col,re,im\n";
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            out << i << ',' << j << ',' << fmt(m(i, j).real()) << ',' << fmt(m(i, j).imag())
                << "\n";
}

} // namespace qsc
