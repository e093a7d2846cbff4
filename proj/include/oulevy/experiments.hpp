#pragma once

#include "oulevy/config.hpp"
#include "oulevy/coupling.hpp"
#include "oulevy/tvlab.hpp"

#include <optional>
#include <vector>

namespace oulevy {

struct DecayRow {
    double t = 0.0;
    TvEstimate projection;     // lower estimate of |P_t(x,.) - P_t(y,.)|
    TvEstimate coupling_upper; // 2 P(Mineka chains not coupled by t)
    std::optional<double> bound_coupling1;
    std::optional<double> bound_z3;
};

struct DecayTable {
    std::uint64_t seed = 0;
    std::vector<DecayRow> rows;
    std::optional<BoundParams> coupling1; // with the constant actually used
    std::optional<BoundParams> z3;
};

// TV decay of the transition kernels from run.x and run.y over run.times.
// Bound constants come from bounds.scale, or are fitted to the projection
// estimate at the earliest time when bounds.scale is 0.
DecayTable tv_decay(const ExperimentConfig& cfg, unsigned threads);

// Curves for bounds.kinds on run.times, with C = bounds.scale (1 when 0).
std::vector<BoundCurve> bound_tables(const ExperimentConfig& cfg, unsigned threads);

// Parameters shared by every curve of one configuration, without delta_eval.
BoundParams base_bound_params(const ExperimentConfig& cfg, const JumpMeasure& nu);

// Transcripts of `count` independent Mineka couplings from run.x and run.y
// over (0, t].
std::vector<CouplingTranscript> coupling_traces(const ExperimentConfig& cfg, double t, std::uint64_t count,
                                                unsigned threads);

} // namespace oulevy
