// SPDX-License-Identifier: Apache-2.0
// JSON configuration ingestion and canonical output.
#include "cranspar/harness.hpp"

#include "cranspar/errors.hpp"

#include "json.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace cranspar::harness {

using nlohmann::json;

namespace {

const std::set<std::string>& known_keys()
{
    static const std::set<std::string> keys = {
        "radius_m",          "min_distance_m",  "pathloss_exponent", "num_rrh",
        "num_ue",            "data_power_dbm",  "data_power_mw",     "pilot_power_dbm",
        "pilot_power_mw",    "noise_power_dbm", "noise_power_mw",    "training_length",
        "estimator",         "pilot_kind",      "pdf",               "ppp_density",
        "delta",             "n_max",           "bisection_tol_m",   "grid_points",
        "trials",            "seed",            "error_variance_override"};
    return keys;
}

// Collects problems instead of stopping at the first one.
class Reader {
public:
    Reader(const json& doc, std::vector<std::string>& errors) : doc_(doc), errors_(errors) {}

    bool has(const char* key) const { return doc_.contains(key) && !doc_.at(key).is_null(); }

    double number(const char* key, double fallback)
    {
        if (!has(key)) {
            return fallback;
        }
        const json& v = doc_.at(key);
        if (!v.is_number()) {
            errors_.push_back(std::string(key) + " must be a number");
            return fallback;
        }
        return v.get<double>();
    }

    long long integer(const char* key, long long fallback)
    {
        if (!has(key)) {
            return fallback;
        }
        const json& v = doc_.at(key);
        if (v.is_number_integer()) {
            return v.get<long long>();
        }
        if (v.is_number_float()) {
            const double d = v.get<double>();
            if (std::isfinite(d) && d == std::floor(d) && std::abs(d) < 9e15) {
                return static_cast<long long>(d);
            }
        }
        errors_.push_back(std::string(key) + " must be an integer");
        return fallback;
    }

    std::uint64_t unsigned_integer(const char* key, std::uint64_t fallback)
    {
        if (!has(key)) {
            return fallback;
        }
        const json& v = doc_.at(key);
        if (v.is_number_unsigned()) {
            return v.get<std::uint64_t>();
        }
        errors_.push_back(std::string(key) + " must be a non-negative integer");
        return fallback;
    }

    std::string text(const char* key, const std::string& fallback)
    {
        if (!has(key)) {
            return fallback;
        }
        const json& v = doc_.at(key);
        if (!v.is_string()) {
            errors_.push_back(std::string(key) + " must be a string");
            return fallback;
        }
        return v.get<std::string>();
    }

    // A power given either in dBm or mW, never both.
    double power(const char* base, double fallback_mw)
    {
        const std::string dbm = std::string(base) + "_dbm";
        const std::string mw = std::string(base) + "_mw";
        if (has(dbm.c_str()) && has(mw.c_str())) {
            errors_.push_back("give either " + dbm + " or " + mw + ", not both");
            return fallback_mw;
        }
        if (has(dbm.c_str())) {
            return dbm_to_mw(number(dbm.c_str(), mw_to_dbm(fallback_mw)));
        }
        return number(mw.c_str(), fallback_mw);
    }

    std::vector<double> power_list(const char* base, int count, double fallback_mw)
    {
        const std::string dbm = std::string(base) + "_dbm";
        const std::string mw = std::string(base) + "_mw";
        if (has(dbm.c_str()) && has(mw.c_str())) {
            errors_.push_back("give either " + dbm + " or " + mw + ", not both");
            return std::vector<double>(static_cast<std::size_t>(std::max(count, 0)), fallback_mw);
        }
        const bool in_dbm = has(dbm.c_str());
        const std::string key = in_dbm ? dbm : mw;
        auto convert = [in_dbm](double x) { return in_dbm ? dbm_to_mw(x) : x; };
        if (!has(key.c_str())) {
            return std::vector<double>(static_cast<std::size_t>(std::max(count, 0)), fallback_mw);
        }
        const json& v = doc_.at(key);
        if (v.is_number()) {
            return std::vector<double>(static_cast<std::size_t>(std::max(count, 0)), convert(v.get<double>()));
        }
        if (v.is_array()) {
            std::vector<double> out;
            for (const json& e : v) {
                if (!e.is_number()) {
                    errors_.push_back(key + " entries must be numbers");
                    return {};
                }
                out.push_back(convert(e.get<double>()));
            }
            return out;
        }
        errors_.push_back(key + " must be a number or a list of numbers");
        return {};
    }

private:
    const json& doc_;
    std::vector<std::string>& errors_;
};

int narrow(long long v, const char* key, std::vector<std::string>& errors)
{
    if (v < 0 || v > 1'000'000'000) {
        errors.push_back(std::string(key) + " out of range");
        return 0;
    }
    return static_cast<int>(v);
}

} // namespace

ScenarioConfig parse_config(std::string_view json_text)
{
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError({std::string("malformed JSON: ") + e.what()});
    }
    if (!doc.is_object()) {
        throw ConfigError({"configuration must be a JSON object"});
    }

    std::vector<std::string> errors;
    for (const auto& item : doc.items()) {
        if (known_keys().count(item.key()) == 0) {
            errors.push_back("unknown key '" + item.key() + "'");
        }
    }

    const NetworkConfig defaults = NetworkConfig::table1();
    Reader in(doc, errors);
    ScenarioConfig out;
    NetworkConfig& net = out.network;
    net.radius_m = in.number("radius_m", defaults.radius_m);
    net.min_dist_m = in.number("min_distance_m", defaults.min_dist_m);
    net.alpha = in.number("pathloss_exponent", defaults.alpha);
    net.num_rrh = narrow(in.integer("num_rrh", defaults.num_rrh), "num_rrh", errors);
    net.num_ue = narrow(in.integer("num_ue", defaults.num_ue), "num_ue", errors);
    net.training_len = narrow(in.integer("training_length", net.num_ue), "training_length", errors);
    net.data_power_mw = in.power_list("data_power", net.num_ue, defaults.data_power_mw.front());
    net.pilot_power_total_mw = in.power("pilot_power", defaults.pilot_power_total_mw);
    net.noise_power_mw = in.power("noise_power", defaults.noise_power_mw);
    if (in.has("error_variance_override")) {
        net.error_variance_override = in.number("error_variance_override", 0.0);
    }

    const std::string estimator = in.text("estimator", "ls");
    if (estimator == "ls") {
        out.estimator = Estimator::LS;
    } else if (estimator == "mmse") {
        out.estimator = Estimator::MMSE;
    } else {
        errors.push_back("estimator must be \"ls\" or \"mmse\"");
    }

    const std::string pilots = in.text("pilot_kind", "orthogonal");
    if (pilots == "orthogonal") {
        out.pilot_kind = PilotKind::Orthogonal;
    } else if (pilots == "nonorthogonal") {
        out.pilot_kind = PilotKind::NonOrthogonalSurrogate;
    } else {
        errors.push_back("pilot_kind must be \"orthogonal\" or \"nonorthogonal\"");
    }

    const std::string pdf = in.text("pdf", "disc_approx");
    const double density = in.number("ppp_density", 0.0);
    if (pdf == "disc_approx") {
        out.pdf = DistancePdf::disc_approx();
    } else if (pdf == "iut1") {
        out.pdf = DistancePdf::iut1();
    } else if (pdf == "ppp") {
        out.pdf = DistancePdf::poisson(density);
    } else {
        errors.push_back("pdf must be \"disc_approx\", \"iut1\" or \"ppp\"");
    }
    if (!(std::isfinite(density) && density >= 0.0)) {
        errors.push_back("ppp_density must be >= 0 (0 selects 1/(pi r^2))");
    }

    out.solver.delta = in.number("delta", out.solver.delta);
    out.solver.n_max = narrow(in.integer("n_max", out.solver.n_max), "n_max", errors);
    out.solver.bisection_tol = in.number("bisection_tol_m", out.solver.bisection_tol);
    out.solver.grid_points = narrow(in.integer("grid_points", out.solver.grid_points), "grid_points", errors);
    out.trials = narrow(in.integer("trials", out.trials), "trials", errors);
    out.seed = in.unsigned_integer("seed", out.seed);

    if (out.trials == 1) {
        errors.emplace_back("trials must be 0 (bound only) or >= 2");
    }
    for (auto& v : net.violations()) {
        errors.push_back(std::move(v));
    }
    if (out.pilot_kind == PilotKind::Orthogonal && net.training_len < net.num_ue) {
        errors.emplace_back("orthogonal pilots need training_length >= num_ue");
    }
    if (out.pilot_kind == PilotKind::NonOrthogonalSurrogate && net.training_len > net.num_ue) {
        errors.emplace_back("non-orthogonal pilots need training_length <= num_ue");
    }
    try {
        out.solver.validate();
    } catch (const ConfigError& e) {
        errors.insert(errors.end(), e.violations().begin(), e.violations().end());
    }
    if (!errors.empty()) {
        throw ConfigError(std::move(errors));
    }
    return out;
}

ScenarioConfig load_config(const std::filesystem::path& path)
{
    std::ifstream file(path, std::ios::binary);
    if (!file) {
        throw IoError("cannot read configuration file " + path.string());
    }
    std::ostringstream text;
    text << file.rdbuf();
    return parse_config(text.str());
}

std::vector<std::string> config_warnings(const ScenarioConfig& cfg)
{
    std::vector<std::string> w;
    const auto stats = analysis::retained_error(cfg.bound_inputs());
    if (stats.contamination_probability_exceeds_one) {
        std::ostringstream os;
        os << "training_length " << cfg.network.training_len << " is below num_ue/2; the contamination factor 2(1 - tau/K) = "
           << 2.0 * (1.0 - static_cast<double>(cfg.network.training_len) / cfg.network.num_ue)
           << " exceeds 1 and is used as written";
        w.push_back(os.str());
    }
    return w;
}

std::string resolved_config_json(const ScenarioConfig& cfg)
{
    const NetworkConfig& n = cfg.network;
    json j;
    j["radius_m"] = n.radius_m;
    j["min_distance_m"] = n.min_dist_m;
    j["pathloss_exponent"] = n.alpha;
    j["num_rrh"] = n.num_rrh;
    j["num_ue"] = n.num_ue;
    j["training_length"] = n.training_len;
    j["data_power_mw"] = n.data_power_mw;
    j["pilot_power_mw"] = n.pilot_power_total_mw;
    j["noise_power_mw"] = n.noise_power_mw;
    if (n.error_variance_override) {
        j["error_variance_override"] = *n.error_variance_override;
    }
    j["estimator"] = to_string(cfg.estimator);
    j["pilot_kind"] = to_string(cfg.pilot_kind);
    j["pdf"] = to_string(cfg.pdf.kind);
    j["ppp_density"] = cfg.pdf.ppp_density;
    j["delta"] = cfg.solver.delta;
    j["n_max"] = cfg.solver.n_max;
    j["bisection_tol_m"] = cfg.solver.bisection_tol;
    j["grid_points"] = cfg.solver.grid_points;
    j["trials"] = cfg.trials;
    j["seed"] = cfg.seed;
    return j.dump(2);
}

std::string content_hash(std::string_view content)
{
    const std::string header = "blob " + std::to_string(content.size()) + '\0';
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    const bool ok = ctx != nullptr && EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr) == 1 &&
                    EVP_DigestUpdate(ctx, header.data(), header.size()) == 1 &&
                    EVP_DigestUpdate(ctx, content.data(), content.size()) == 1 &&
                    EVP_DigestFinal_ex(ctx, digest, &length) == 1;
    EVP_MD_CTX_free(ctx);
    if (!ok) {
        throw IoError("SHA-1 digest failed");
    }
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < length; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xF];
    }
    return out;
}

std::vector<double> linspace(double lo, double hi, int n)
{
    if (n < 1) {
        throw ConfigError({"grid needs at least one point"});
    }
    if (n == 1) {
        return {lo};
    }
    std::vector<double> out(static_cast<std::size_t>(n));
    const double step = (hi - lo) / static_cast<double>(n - 1);
    for (int i = 0; i < n; ++i) {
        out[static_cast<std::size_t>(i)] = lo + step * static_cast<double>(i);
    }
    out.back() = hi;
    return out;
}

std::vector<double> parse_d0_grid(std::string_view text)
{
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    for (std::size_t pos = text.find(':'); pos != std::string_view::npos; pos = text.find(':', start)) {
        parts.push_back(text.substr(start, pos - start));
        start = pos + 1;
    }
    parts.push_back(text.substr(start));
    if (parts.size() != 3) {
        throw ConfigError({"d0 grid must look like lo:hi:n, got '" + std::string(text) + "'"});
    }

    std::vector<std::string> errors;
    auto to_double = [&](std::string_view s, const char* what) {
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
            errors.push_back(std::string("d0 grid ") + what + " is not a number");
        }
        return v;
    };
    const double lo = to_double(parts[0], "lower end");
    const double hi = to_double(parts[1], "upper end");
    int n = 0;
    const auto [ptr, ec] = std::from_chars(parts[2].data(), parts[2].data() + parts[2].size(), n);
    if (ec != std::errc() || ptr != parts[2].data() + parts[2].size() || n < 1) {
        errors.emplace_back("d0 grid point count must be a positive integer");
    }
    if (errors.empty() && lo > hi) {
        errors.emplace_back("d0 grid lower end exceeds upper end");
    }
    if (errors.empty() && n == 1 && lo != hi) {
        errors.emplace_back("a single-point d0 grid needs lo == hi");
    }
    if (!errors.empty()) {
        throw ConfigError(std::move(errors));
    }
    return linspace(lo, hi, n);
}

std::string format_double(double value)
{
    char buffer[64];
    const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
    if (ec != std::errc()) {
        throw IoError("double formatting failed");
    }
    return std::string(buffer, ptr);
}

} // namespace cranspar::harness
