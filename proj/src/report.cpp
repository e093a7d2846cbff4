#include "oulevy/report.hpp"

#include <nlohmann/json.hpp>

#include <charconv>
#include <cmath>
#include <sstream>

namespace oulevy {

namespace {

using nlohmann::json;

json vector_json(const Vector& v)
{
    json out = json::array();
    for (Eigen::Index k = 0; k < v.size(); ++k)
        out.push_back(v[k]);
    return out;
}

std::string optional_number(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

std::string csv_quote(const std::string& field)
{
    std::string out = "\"";
    for (char c : field) {
        if (c == '"')
            out += '"';
        out += c;
    }
    return out + '"';
}

} // namespace

std::string format_number(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string decay_csv(const DecayTable& table)
{
    std::ostringstream out;
    out << decay_csv_header << '\n';
    for (const auto& row : table.rows) {
        out << format_number(row.t) << ',' << format_number(row.projection.value) << ','
            << format_number(row.projection.std_err) << ',' << format_number(row.coupling_upper.value) << ','
            << optional_number(row.bound_coupling1) << ',' << optional_number(row.bound_z3) << ',' << table.seed
            << '\n';
    }
    return out.str();
}

std::string bound_params_json(const BoundParams& p)
{
    // Insertion order is fixed by nlohmann's sorted object keys.
    json j{{"C", p.scale},     {"displacement", p.displacement}, {"lambda0", p.lambda0},
           {"lambda", p.lambda}, {"delta", p.delta},             {"d", p.d}};
    return j.dump();
}

std::string bounds_csv(const std::vector<BoundCurve>& curves)
{
    std::ostringstream out;
    out << bounds_csv_header << '\n';
    for (const auto& curve : curves) {
        const std::string params = csv_quote(bound_params_json(curve.params));
        for (std::size_t i = 0; i < curve.times.size(); ++i)
            out << format_number(curve.times[i]) << ',' << bound_name(curve.kind) << ','
                << format_number(curve.values[i]) << ',' << params << '\n';
    }
    return out.str();
}

std::string transcript_json_line(const CouplingTranscript& tr)
{
    json a = json::array();
    for (const auto& s : tr.shifts)
        a.push_back(vector_json(s));
    json steps = json::array();
    for (const auto& p : tr.pairs)
        steps.push_back(static_cast<int>(p.step));
    json j{{"times", tr.jump_times}, {"a", a}, {"dU", steps}, {"t_couple", nullptr}, {"coupled", tr.coupled()}};
    if (tr.coupled_at)
        j["t_couple"] = *tr.coupled_at;
    return j.dump();
}

std::string suite_report_json(const std::vector<SuiteReport>& reports, std::uint64_t seed, std::uint64_t replicas)
{
    json suites = json::array();
    bool all = true;
    for (const auto& r : reports) {
        json props = json::array();
        for (const auto& p : r.properties)
            props.push_back({{"name", p.name}, {"statistic", p.statistic}, {"threshold", p.threshold}, {"pass", p.pass}});
        suites.push_back({{"suite", r.suite}, {"pass", r.pass()}, {"properties", props}});
        all = all && r.pass();
    }
    json j{{"seed", seed}, {"replicas", replicas}, {"pass", all}, {"suites", suites}};
    return j.dump(2) + "\n";
}

} // namespace oulevy
