#include "taxkin/io.hpp"

#include "taxkin/error.hpp"
#include "taxkin/version.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <regex>
#include <set>
#include <sstream>

namespace taxkin {

using nlohmann::json;

namespace {

// ---------------------------------------------------------------- TOML-style

class TomlLikeParser {
public:
    explicit TomlLikeParser(std::string_view text) : text_(text) {}

    json parse()
    {
        json root = json::object();
        std::string section;
        while (pos_ < text_.size()) {
            skip_blank_and_comments(true);
            if (pos_ >= text_.size()) {
                break;
            }
            if (text_[pos_] == '[') {
                ++pos_;
                section = read_key();
                skip_inline_space();
                expect(']');
                end_of_line();
                continue;
            }
            const std::size_t key_line = line_;
            std::string key = read_key();
            if (key.empty()) {
                error("expected a key");
            }
            skip_inline_space();
            expect('=');
            skip_inline_space();
            json value = read_value();
            end_of_line();
            const std::string full = section.empty() ? key : section + "." + key;
            if (root.contains(full)) {
                line_ = key_line;
                error("duplicate key '" + full + "'");
            }
            root[full] = std::move(value);
        }
        return root;
    }

private:
    [[noreturn]] void error(const std::string& what) const
    {
        fail(ErrorCategory::parse, "line " + std::to_string(line_) + ": " + what);
    }

    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

    void advance()
    {
        if (peek() == '\n') {
            ++line_;
        }
        ++pos_;
    }

    void skip_inline_space()
    {
        while (peek() == ' ' || peek() == '\t' || peek() == '\r') {
            advance();
        }
    }

    void skip_blank_and_comments(bool newlines)
    {
        while (pos_ < text_.size()) {
            const char c = peek();
            if (c == ' ' || c == '\t' || c == '\r' || (newlines && c == '\n')) {
                advance();
            } else if (c == '#') {
                while (pos_ < text_.size() && peek() != '\n') {
                    advance();
                }
            } else {
                break;
            }
        }
    }

    void expect(char c)
    {
        if (peek() != c) {
            error(std::string("expected '") + c + "'");
        }
        advance();
    }

    void end_of_line()
    {
        skip_blank_and_comments(false);
        if (pos_ < text_.size() && peek() != '\n') {
            error(std::string("unexpected '") + peek() + "' after value");
        }
    }

    std::string read_key()
    {
        skip_inline_space();
        std::string key;
        while (pos_ < text_.size()) {
            const char c = peek();
            if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-') {
                key.push_back(c);
                advance();
            } else {
                break;
            }
        }
        return key;
    }

    json read_value()
    {
        const char c = peek();
        if (c == '[') {
            advance();
            json array = json::array();
            skip_blank_and_comments(true);
            if (peek() == ']') {
                advance();
                return array;
            }
            while (true) {
                skip_blank_and_comments(true);
                array.push_back(read_value());
                skip_blank_and_comments(true);
                if (peek() == ',') {
                    advance();
                    skip_blank_and_comments(true);
                    if (peek() == ']') {
                        advance();
                        return array;
                    }
                    continue;
                }
                if (peek() == ']') {
                    advance();
                    return array;
                }
                error("expected ',' or ']' in array");
            }
        }
        if (c == '"' || c == '\'') {
            const char quote = c;
            advance();
            std::string s;
            while (pos_ < text_.size() && peek() != quote && peek() != '\n') {
                s.push_back(peek());
                advance();
            }
            if (peek() != quote) {
                error("unterminated string");
            }
            advance();
            return s;
        }
        std::string token;
        while (pos_ < text_.size()) {
            const char t = peek();
            if (t == ',' || t == ']' || t == '\n' || t == '#' || t == ' ' || t == '\t' || t == '\r') {
                break;
            }
            token.push_back(t);
            advance();
        }
        if (token == "true") {
            return true;
        }
        if (token == "false") {
            return false;
        }
        double value = 0.0;
        if (!parse_number(token, value)) {
            error("cannot parse value '" + token + "'");
        }
        if (token.find_first_of("./eE") == std::string::npos) {
            return static_cast<std::int64_t>(value);
        }
        return value;
    }

public:
    // Accepts plain decimal numbers and "a/b" fractions.
    static bool parse_number(std::string_view token, double& out)
    {
        auto plain = [](std::string_view s, double& v) {
            while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
                s.remove_prefix(1);
            }
            while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
                s.remove_suffix(1);
            }
            if (!s.empty() && s.front() == '+') {
                s.remove_prefix(1);
            }
            if (s.empty()) {
                return false;
            }
            const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
            return ec == std::errc() && end == s.data() + s.size();
        };
        const auto slash = token.find('/');
        if (slash == std::string_view::npos) {
            return plain(token, out);
        }
        double num = 0.0;
        double den = 0.0;
        if (!plain(token.substr(0, slash), num) || !plain(token.substr(slash + 1), den) || den == 0.0) {
            return false;
        }
        out = num / den;
        return true;
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
};

// ---------------------------------------------------------------- config schema

void flatten(const json& node, const std::string& prefix, std::map<std::string, json>& out)
{
    for (const auto& [key, value] : node.items()) {
        const std::string full = prefix.empty() ? key : prefix + "." + key;
        if (value.is_object()) {
            flatten(value, full, out);
        } else {
            out[full] = value;
        }
    }
}

double as_number(const json& value, const std::string& key)
{
    if (value.is_number()) {
        return value.get<double>();
    }
    if (value.is_string()) {
        double v = 0.0;
        if (TomlLikeParser::parse_number(value.get<std::string>(), v)) {
            return v;
        }
    }
    fail(ErrorCategory::parse, "key '" + key + "': expected a number, got " + value.dump());
}

std::vector<double> as_numbers(const json& value, const std::string& key)
{
    require(value.is_array(), ErrorCategory::parse, "key '" + key + "': expected an array, got " + value.dump());
    std::vector<double> out;
    out.reserve(value.size());
    for (std::size_t i = 0; i < value.size(); ++i) {
        out.push_back(as_number(value[i], key + "[" + std::to_string(i + 1) + "]"));
    }
    return out;
}

std::int64_t as_integer(const json& value, const std::string& key)
{
    const double v = as_number(value, key);
    require(std::floor(v) == v && std::abs(v) < 1e15, ErrorCategory::parse,
            "key '" + key + "': expected an integer, got " + value.dump());
    return static_cast<std::int64_t>(v);
}

std::vector<double> expand_income_rule(const std::string& rule, int n)
{
    static const std::regex pattern(
        R"(^\s*([0-9]*\.?[0-9]+(?:[eE][-+]?[0-9]+)?)\s*\*\s*j\s*(?:([-+])\s*([0-9]*\.?[0-9]+(?:[eE][-+]?[0-9]+)?))?\s*$)");
    std::smatch match;
    require(std::regex_match(rule, match, pattern), ErrorCategory::parse,
            "key 'incomes_rule': expected '<a>*j' or '<a>*j + <b>', got '" + rule + "'");
    double scale = 0.0;
    double offset = 0.0;
    TomlLikeParser::parse_number(match[1].str(), scale);
    if (match[2].matched) {
        TomlLikeParser::parse_number(match[3].str(), offset);
        if (match[2].str() == "-") {
            offset = -offset;
        }
    }
    return linear_incomes(n, scale, offset);
}

const std::map<std::string, std::string>& key_aliases()
{
    static const std::map<std::string, std::string> aliases{
        {"exchange_amount", "S"},
        {"shares", "sector_shares"},
        {"tax_rates", "tau"},
    };
    return aliases;
}

const std::set<std::string>& known_keys()
{
    static const std::set<std::string> keys{
        "n", "m", "S", "incomes", "incomes_rule", "r", "tau_min", "tau_max", "tau", "theta_ev", "sector_shares",
        "ic.mode", "ic.profile", "ic.mu", "ic.x",
        "integ.dt", "integ.max_time", "integ.stationarity_tol", "integ.drift_tol",
        "sweep.eta", "output.trajectory_stride",
    };
    return keys;
}

}  // namespace

json parse_toml_like(std::string_view text)
{
    return TomlLikeParser(text).parse();
}

RunConfig parse_config(const json& document)
{
    require(document.is_object(), ErrorCategory::parse, "configuration must be an object");
    if (document.contains("config") && document.contains("engine_version")) {
        return parse_config(document.at("config"));
    }

    std::map<std::string, json> flat;
    flatten(document, "", flat);
    std::map<std::string, json> keys;
    for (auto& [key, value] : flat) {
        const auto alias = key_aliases().find(key);
        const std::string canonical = alias != key_aliases().end() ? alias->second : key;
        require(known_keys().count(canonical) == 1, ErrorCategory::parse, "unknown key '" + key + "'");
        require(keys.count(canonical) == 0, ErrorCategory::parse, "key '" + canonical + "' given twice");
        keys[canonical] = value;
    }
    auto has = [&](const std::string& k) { return keys.count(k) == 1; };
    auto get = [&](const std::string& k) -> const json& { return keys.at(k); };

    RunConfig rc;
    ModelConfig& model = rc.model;

    // r may be a list or a rule string
    if (has("r")) {
        const auto target = get("r").is_string() ? "incomes_rule" : "incomes";
        require(!has(target), ErrorCategory::parse, std::string("both 'r' and '") + target + "' given");
        keys[target] = get("r");
    }

    std::optional<int> n;
    if (has("n")) {
        n = static_cast<int>(as_integer(get("n"), "n"));
        require(*n >= 2, ErrorCategory::invalid_config, "n must be at least 2 (got " + std::to_string(*n) + ")");
    }
    if (has("incomes")) {
        model.incomes = as_numbers(get("incomes"), "incomes");
        if (has("incomes_rule")) {
            rc.warnings.push_back("both 'incomes' and 'incomes_rule' given; using the explicit list");
        }
    } else if (has("incomes_rule")) {
        require(get("incomes_rule").is_string(), ErrorCategory::parse, "key 'incomes_rule' must be a string");
        require(n.has_value(), ErrorCategory::parse, "key 'incomes_rule' requires 'n'");
        model.incomes = expand_income_rule(get("incomes_rule").get<std::string>(), *n);
    } else {
        fail(ErrorCategory::parse, "missing key 'incomes' (or 'incomes_rule')");
    }
    if (n) {
        require(static_cast<int>(model.incomes.size()) == *n, ErrorCategory::invalid_config,
                "n = " + std::to_string(*n) + " but " + std::to_string(model.incomes.size()) + " incomes given");
    }

    require(has("S"), ErrorCategory::parse, "missing key 'S'");
    model.exchange_amount = as_number(get("S"), "S");

    if (has("tau")) {
        model.tax_rates = as_numbers(get("tau"), "tau");
        if (has("tau_min") || has("tau_max")) {
            rc.warnings.push_back("both 'tau' and 'tau_min'/'tau_max' given; using the explicit list");
        }
    } else {
        require(has("tau_min") && has("tau_max"), ErrorCategory::parse,
                "missing tax schedule: give 'tau' or both 'tau_min' and 'tau_max'");
    }
    if (has("tau_min")) {
        model.tau_min = as_number(get("tau_min"), "tau_min");
    }
    if (has("tau_max")) {
        model.tau_max = as_number(get("tau_max"), "tau_max");
    }

    require(has("theta_ev"), ErrorCategory::parse, "missing key 'theta_ev'");
    model.theta_ev = as_numbers(get("theta_ev"), "theta_ev");
    require(has("sector_shares"), ErrorCategory::parse, "missing key 'sector_shares'");
    model.sector_shares = as_numbers(get("sector_shares"), "sector_shares");
    if (has("m")) {
        const auto m = as_integer(get("m"), "m");
        require(m == static_cast<std::int64_t>(model.theta_ev.size()), ErrorCategory::invalid_config,
                "m = " + std::to_string(m) + " but " + std::to_string(model.theta_ev.size())
                    + " theta_ev values given");
    }

    auto& integ = rc.integration;
    if (has("integ.dt")) {
        integ.dt = as_number(get("integ.dt"), "integ.dt");
    }
    if (has("integ.max_time")) {
        integ.max_time = as_number(get("integ.max_time"), "integ.max_time");
    }
    if (has("integ.stationarity_tol")) {
        integ.stationarity_tol = as_number(get("integ.stationarity_tol"), "integ.stationarity_tol");
    }
    if (has("integ.drift_tol")) {
        integ.drift_tol = as_number(get("integ.drift_tol"), "integ.drift_tol");
    }

    auto& ic = rc.initial;
    if (has("ic.mode")) {
        require(get("ic.mode").is_string(), ErrorCategory::parse, "key 'ic.mode' must be a string");
        ic.mode = parse_initial_mode(get("ic.mode").get<std::string>());
    }
    if (has("ic.profile")) {
        ic.profile = as_numbers(get("ic.profile"), "ic.profile");
    }
    if (has("ic.mu")) {
        ic.target_mu = as_number(get("ic.mu"), "ic.mu");
    }
    if (has("ic.x")) {
        const json& rows = get("ic.x");
        require(rows.is_array() && !rows.empty(), ErrorCategory::parse, "key 'ic.x' must be an n x m array");
        const auto cols = rows.front().is_array() ? rows.front().size() : 0;
        Eigen::MatrixXd x(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
        for (std::size_t j = 0; j < rows.size(); ++j) {
            const auto row = as_numbers(rows[j], "ic.x[" + std::to_string(j + 1) + "]");
            require(row.size() == cols, ErrorCategory::parse, "key 'ic.x': ragged rows");
            for (std::size_t a = 0; a < cols; ++a) {
                x(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(a)) = row[a];
            }
        }
        ic.state = std::move(x);
    }
    if (ic.mode == InitialMode::explicit_state) {
        require(ic.state.has_value(), ErrorCategory::parse, "ic.mode = explicit requires 'ic.x'");
    }
    if (ic.mode == InitialMode::class_profile) {
        require(!ic.profile.empty(), ErrorCategory::parse, "ic.mode = class-profile requires 'ic.profile'");
    }

    if (has("sweep.eta")) {
        rc.sweep_etas = as_numbers(get("sweep.eta"), "sweep.eta");
    }
    if (has("output.trajectory_stride")) {
        rc.trajectory_stride = as_integer(get("output.trajectory_stride"), "output.trajectory_stride");
        require(*rc.trajectory_stride >= 1, ErrorCategory::invalid_config, "output.trajectory_stride must be >= 1");
    }

    auto model_warnings = validate(model);
    rc.warnings.insert(rc.warnings.end(), model_warnings.begin(), model_warnings.end());
    validate(rc.integration);
    make_initial_state(rc.initial, rc.model);
    return rc;
}

RunConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    require(static_cast<bool>(in), ErrorCategory::io, "cannot open config file '" + path.string() + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    const std::string text = buffer.str();

    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    json document;
    try {
        if (ext == ".json") {
            document = json::parse(text);
        } else if (ext == ".toml" || ext == ".cfg" || ext == ".conf" || ext == ".ini") {
            document = parse_toml_like(text);
        } else {
            fail(ErrorCategory::parse, "unrecognized config extension '" + ext + "' (use .json or .toml)");
        }
    } catch (const json::parse_error& e) {
        fail(ErrorCategory::parse, path.string() + ": " + e.what());
    } catch (const Error& e) {
        if (e.category() == ErrorCategory::parse) {
            throw Error(ErrorCategory::parse, path.string() + ": " + e.detail());
        }
        throw;
    }
    return parse_config(document);
}

json to_json(const RunConfig& config)
{
    const auto& model = config.model;
    json out;
    out["n"] = model.classes();
    out["m"] = model.sectors();
    out["incomes"] = model.incomes;
    out["S"] = model.exchange_amount;
    if (model.explicit_tax_rates()) {
        out["tau"] = model.tax_rates;
    } else {
        out["tau_min"] = model.tau_min;
        out["tau_max"] = model.tau_max;
    }
    out["theta_ev"] = model.theta_ev;
    out["sector_shares"] = model.sector_shares;

    json ic;
    ic["mode"] = std::string(to_string(config.initial.mode));
    if (!config.initial.profile.empty()) {
        ic["profile"] = config.initial.profile;
    }
    if (config.initial.target_mu) {
        ic["mu"] = *config.initial.target_mu;
    }
    if (config.initial.state) {
        json rows = json::array();
        const auto& x = *config.initial.state;
        for (Eigen::Index j = 0; j < x.rows(); ++j) {
            json row = json::array();
            for (Eigen::Index a = 0; a < x.cols(); ++a) {
                row.push_back(x(j, a));
            }
            rows.push_back(std::move(row));
        }
        ic["x"] = std::move(rows);
    }
    out["ic"] = std::move(ic);

    out["integ"] = {
        {"dt", config.integration.dt},
        {"max_time", config.integration.max_time},
        {"stationarity_tol", config.integration.stationarity_tol},
        {"drift_tol", config.integration.drift_tol},
    };
    if (!config.sweep_etas.empty()) {
        out["sweep"]["eta"] = config.sweep_etas;
    }
    if (config.trajectory_stride) {
        out["output"]["trajectory_stride"] = *config.trajectory_stride;
    }
    return out;
}

namespace {

json optional_array(const std::vector<std::optional<double>>& values)
{
    json out = json::array();
    for (const auto& v : values) {
        out.push_back(v ? json(*v) : json(nullptr));
    }
    return out;
}

json vector_array(const Eigen::VectorXd& v)
{
    return json(std::vector<double>(v.data(), v.data() + v.size()));
}

}  // namespace

json to_json(const MetricsReport& report)
{
    json out;
    out["class_marginals"] = vector_array(report.class_marginals);
    out["sector_marginals"] = vector_array(report.sector_marginals);
    out["mu_total"] = report.mu_total;
    out["sector_mean_income"] = optional_array(report.sector_mean_income);
    out["gini_total"] = report.gini_total;
    out["gini_per_sector"] = optional_array(report.gini_per_sector);
    out["income_gap"] = report.income_gap ? json(*report.income_gap) : json(nullptr);
    return out;
}

json to_json(const RunManifest& manifest)
{
    json out;
    out["engine_version"] = std::string(engine_version);
    out["command"] = manifest.command;
    out["timestamp"] = manifest.timestamp;
    out["outputs"] = manifest.outputs;
    out["config"] = to_json(manifest.config);
    return out;
}

std::string format_full(double value)
{
    char buf[64];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, ec == std::errc() ? end : buf);
}

std::string format_report(double value)
{
    char buf[64];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 4);
    return std::string(buf, ec == std::errc() ? end : buf);
}

void write_state_csv(std::ostream& out, const PopulationState& x)
{
    out << "j,alpha,x\n";
    for (int j = 0; j < x.classes(); ++j) {
        for (int a = 0; a < x.sectors(); ++a) {
            out << j + 1 << ',' << a + 1 << ',' << format_full(x(j, a)) << '\n';
        }
    }
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows)
{
    out << "eta_pct,theta1_pct,theta2_pct,theta3_pct,gap_pct,gini,converged,residual\n";
    for (const auto& row : rows) {
        out << format_report(100.0 * row.eta) << ',' << format_report(100.0 * row.theta[0]) << ','
            << format_report(100.0 * row.theta[1]) << ',' << format_report(100.0 * row.theta[2]) << ','
            << format_report(100.0 * row.income_gap) << ',' << format_report(row.gini_total) << ','
            << (row.converged ? "true" : "false") << ',' << format_report(row.residual) << '\n';
    }
}

void write_compare_csv(std::ostream& out, const Eigen::VectorXd& delta)
{
    out << "class,delta_fraction\n";
    for (Eigen::Index j = 0; j < delta.size(); ++j) {
        out << j + 1 << ',' << format_report(delta(j)) << '\n';
    }
}

void write_trajectory_header(std::ostream& out, int classes, int sectors)
{
    out << 't';
    for (int j = 0; j < classes; ++j) {
        for (int a = 0; a < sectors; ++a) {
            out << ",x_" << j + 1 << '_' << a + 1;
        }
    }
    out << ",sum_x,mu\n";
}

void write_trajectory_row(std::ostream& out, double t, const PopulationState& x, const Eigen::VectorXd& incomes)
{
    out << format_full(t);
    for (int j = 0; j < x.classes(); ++j) {
        for (int a = 0; a < x.sectors(); ++a) {
            out << ',' << format_full(x(j, a));
        }
    }
    out << ',' << format_full(x.total()) << ',' << format_full(x.global_income(incomes)) << '\n';
}

void write_file(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    require(static_cast<bool>(out), ErrorCategory::io, "cannot write '" + path.string() + "'");
    out << text;
    require(static_cast<bool>(out), ErrorCategory::io, "write failed for '" + path.string() + "'");
}

}  // namespace taxkin
