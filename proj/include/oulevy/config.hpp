#pragma once

#include "oulevy/levy.hpp"
#include "oulevy/model.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace oulevy {

// Experiment description read from an INI file with the sections
// [model], [levy], [run], [bounds] and [output].
struct ExperimentConfig {
    struct ModelBlock {
        std::string family = "gaussian52"; // gaussian52 | wiener_surrogate | custom
        int n_modes = 16;
        double delta = 1.0;
        double d = 2.0;
        std::vector<double> q, lam, sigma; // custom family only
    } model;

    LevySpec levy;

    struct RunBlock {
        std::optional<std::uint64_t> seed;
        std::uint64_t replicas = 100000;
        std::vector<double> times;
        Vector x;
        Vector y;
    } run;

    struct BoundsBlock {
        std::vector<std::string> kinds;
        double scale = 0.0; // 0 fits C at the earliest grid time
        Ball ball;          // ball for the delta functionals
    } bounds;

    struct OutputBlock {
        std::string directory;
        std::vector<std::string> formats{"csv"};
    } output;
};

ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::string& path);

// Built-in presets: "gaussian52-small" and "z3-exponential".
ExperimentConfig preset_config(std::string_view name);
std::vector<std::string> preset_names();

// `zero`, `e<k>`, `<s>*e<k>` (k one-based) or n comma-separated numbers.
Vector parse_vector(const std::string& text, int n_modes);
std::vector<double> parse_list(const std::string& text);

DiagonalModel build_model(const ExperimentConfig& cfg);

} // namespace oulevy
