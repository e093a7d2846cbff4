#include "oulevy/config.hpp"
#include "oulevy/tvlab.hpp"

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace oulevy {

namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>> known_keys{
    {"model", {"family", "n_modes", "delta", "d", "q", "lam", "sigma"}},
    {"levy", {"rho0", "c", "center", "radius", "level", "scale", "alpha", "r0", "eta"}},
    {"run", {"seed", "replicas", "times", "x", "y"}},
    {"bounds", {"kinds", "scale", "ball_center", "ball_radius"}},
    {"output", {"directory", "formats"}},
};

double to_double(const std::string& key, const std::string& text)
{
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size())
            throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("config key '" + key + "': expected a number, got '" + text + "'");
    }
}

std::uint64_t to_u64(const std::string& key, const std::string& text)
{
    if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos)
        throw std::invalid_argument("config key '" + key + "': expected an unsigned integer, got '" + text + "'");
    try {
        return std::stoull(text);
    } catch (const std::exception&) {
        throw std::invalid_argument("config key '" + key + "': value out of range '" + text + "'");
    }
}

class Section {
public:
    Section(const pt::ptree& root, const std::string& name) : name_(name)
    {
        if (auto child = root.get_child_optional(name))
            tree_ = *child;
    }

    std::optional<std::string> text(const std::string& key) const
    {
        if (auto v = tree_.get_optional<std::string>(key))
            return boost::algorithm::trim_copy(*v);
        return std::nullopt;
    }

    std::string full(const std::string& key) const { return name_ + "." + key; }

    double number(const std::string& key, double fallback) const
    {
        auto v = text(key);
        return v ? to_double(full(key), *v) : fallback;
    }

private:
    std::string name_;
    pt::ptree tree_;
};

void check_keys(const pt::ptree& root)
{
    for (const auto& [section, body] : root) {
        auto it = known_keys.find(section);
        if (it == known_keys.end())
            throw std::invalid_argument("unknown config section [" + section + "]");
        if (!body.data().empty())
            throw std::invalid_argument("config key '" + section + "' outside of any section");
        for (const auto& [key, value] : body)
            if (!it->second.count(key))
                throw std::invalid_argument("unknown config key '" + section + "." + key + "'");
    }
}

LevySpec parse_levy(const Section& s, int n_modes)
{
    LevySpec spec;
    const std::string family = s.text("rho0").value_or("constant");
    if (family == "constant") {
        spec.rho0 = Constant{s.number("c", 1.0)};
    } else if (family == "indicator_ball") {
        spec.rho0 = IndicatorBall{parse_vector(s.text("center").value_or("zero"), n_modes), s.number("radius", 1.0),
                                  s.number("level", 1.0)};
    } else if (family == "bounded_lipschitz") {
        spec.rho0 = BoundedLipschitz{s.number("c", 1.0), s.number("scale", 1.0)};
    } else if (family == "stable_like") {
        spec.rho0 = StableLike{s.number("alpha", 0.5), s.number("r0", 1.0)};
    } else {
        throw std::invalid_argument("unknown levy.rho0 '" + family + "'");
    }
    spec.eta = s.number("eta", 0.0);
    return spec;
}

std::vector<std::string> split_words(const std::string& text)
{
    std::vector<std::string> out;
    boost::algorithm::split(out, text, boost::is_any_of(","));
    for (auto& w : out)
        boost::algorithm::trim(w);
    out.erase(std::remove(out.begin(), out.end(), std::string()), out.end());
    return out;
}

} // namespace

std::vector<double> parse_list(const std::string& text)
{
    std::vector<double> out;
    for (const auto& w : split_words(text))
        out.push_back(to_double("list", w));
    return out;
}

Vector parse_vector(const std::string& text, int n_modes)
{
    const std::string t = boost::algorithm::trim_copy(text);
    if (t == "zero")
        return Vector::Zero(n_modes);
    std::string unit = t;
    double factor = 1.0;
    if (auto star = t.find('*'); star != std::string::npos) {
        factor = to_double("vector", boost::algorithm::trim_copy(t.substr(0, star)));
        unit = boost::algorithm::trim_copy(t.substr(star + 1));
    }
    if (unit.size() > 1 && unit[0] == 'e' && unit.find_first_not_of("0123456789", 1) == std::string::npos) {
        const int k = std::stoi(unit.substr(1));
        if (k < 1 || k > n_modes)
            throw std::invalid_argument("unit vector '" + t + "' out of range for " + std::to_string(n_modes) + " modes");
        Vector v = Vector::Zero(n_modes);
        v[k - 1] = factor;
        return v;
    }
    const auto values = parse_list(t);
    if (static_cast<int>(values.size()) != n_modes)
        throw std::invalid_argument("vector '" + t + "' has " + std::to_string(values.size()) + " entries, expected " +
                                    std::to_string(n_modes));
    return Eigen::Map<const Vector>(values.data(), n_modes);
}

ExperimentConfig parse_config(std::istream& in)
{
    pt::ptree root;
    try {
        pt::read_ini(in, root);
    } catch (const pt::ini_parser_error& e) {
        throw std::invalid_argument(std::string("config parse error: ") + e.what());
    }
    check_keys(root);

    ExperimentConfig cfg;
    const Section model(root, "model");
    cfg.model.family = model.text("family").value_or("gaussian52");
    cfg.model.n_modes = static_cast<int>(model.number("n_modes", cfg.model.n_modes));
    cfg.model.delta = model.number("delta", cfg.model.delta);
    cfg.model.d = model.number("d", cfg.model.d);
    if (auto q = model.text("q"))
        cfg.model.q = parse_list(*q);
    if (auto lam = model.text("lam"))
        cfg.model.lam = parse_list(*lam);
    if (auto sigma = model.text("sigma"))
        cfg.model.sigma = parse_list(*sigma);
    if (cfg.model.family == "custom")
        cfg.model.n_modes = static_cast<int>(cfg.model.q.size());
    const int n = build_model(cfg).n_modes();

    cfg.levy = parse_levy(Section(root, "levy"), n);

    const Section run(root, "run");
    if (auto seed = run.text("seed"))
        cfg.run.seed = to_u64(run.full("seed"), *seed);
    if (auto replicas = run.text("replicas"))
        cfg.run.replicas = to_u64(run.full("replicas"), *replicas);
    if (auto times = run.text("times"))
        cfg.run.times = parse_list(*times);
    for (std::size_t i = 0; i < cfg.run.times.size(); ++i) {
        if (!(cfg.run.times[i] >= 0.0))
            throw std::invalid_argument("run.times must be non-negative");
        if (i > 0 && !(cfg.run.times[i] > cfg.run.times[i - 1]))
            throw std::invalid_argument("run.times must be strictly increasing");
    }
    cfg.run.x = parse_vector(run.text("x").value_or("zero"), n);
    cfg.run.y = parse_vector(run.text("y").value_or("e1"), n);

    const Section bounds(root, "bounds");
    if (auto kinds = bounds.text("kinds"))
        cfg.bounds.kinds = split_words(*kinds);
    for (const auto& kind : cfg.bounds.kinds)
        parse_bound_kind(kind);
    cfg.bounds.scale = bounds.number("scale", 0.0);
    cfg.bounds.ball.center = parse_vector(bounds.text("ball_center").value_or("zero"), n);
    cfg.bounds.ball.radius = bounds.number("ball_radius", 10.0);
    if (!(cfg.bounds.ball.radius > 0.0))
        throw std::invalid_argument("bounds.ball_radius must be positive");

    const Section output(root, "output");
    cfg.output.directory = output.text("directory").value_or("");
    if (auto formats = output.text("formats"))
        cfg.output.formats = split_words(*formats);
    return cfg;
}

ExperimentConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open config file '" + path + "'");
    return parse_config(in);
}

std::vector<std::string> preset_names() { return {"gaussian52-small", "z3-exponential"}; }

ExperimentConfig preset_config(std::string_view name)
{
    std::istringstream text;
    if (name == "gaussian52-small") {
        text.str("[model]\nfamily = gaussian52\nn_modes = 8\ndelta = 1\nd = 2\n"
                 "[levy]\nrho0 = constant\nc = 1\neta = 0\n"
                 "[run]\nseed = 1\nreplicas = 100000\ntimes = 4, 8, 16, 32, 64\nx = zero\ny = e1\n"
                 "[bounds]\nkinds = coupling_ii, polynomial_52\nball_center = zero\nball_radius = 10\n");
    } else if (name == "z3-exponential") {
        text.str("[model]\nfamily = gaussian52\nn_modes = 4\ndelta = 1\nd = 2\n"
                 "[levy]\nrho0 = bounded_lipschitz\nc = 1\nscale = 1\neta = 0\n"
                 "[run]\nseed = 1\nreplicas = 100000\ntimes = 2, 4, 6, 8\nx = zero\ny = e1\n"
                 "[bounds]\nkinds = exponential_z3, coupling_ii\nball_center = zero\nball_radius = 10\n");
    } else {
        throw std::invalid_argument("unknown preset '" + std::string(name) + "'");
    }
    return parse_config(text);
}

DiagonalModel build_model(const ExperimentConfig& cfg)
{
    const auto& m = cfg.model;
    if (m.family == "gaussian52")
        return make_gaussian_model(m.n_modes, m.delta, m.d);
    if (m.family == "wiener_surrogate")
        return make_wiener_surrogate(m.n_modes);
    if (m.family == "custom") {
        const auto n = static_cast<Eigen::Index>(m.q.size());
        auto as_vector = [](const std::vector<double>& v) { return Vector(Eigen::Map<const Vector>(v.data(), v.size())); };
        Vector sigma = m.sigma.empty() ? Vector::Ones(n) : as_vector(m.sigma);
        return DiagonalModel(as_vector(m.q), as_vector(m.lam), sigma);
    }
    throw std::invalid_argument("unknown model.family '" + m.family + "'");
}

} // namespace oulevy
