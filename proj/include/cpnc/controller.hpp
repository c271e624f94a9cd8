#pragma once

#include "cpnc/genome.hpp"
#include "cpnc/robot.hpp"

#include <cstddef>

namespace cpnc {

/// Exponentially decaying Kohonen learning rate, restarted at every learning episode.
struct LearningSchedule {
    double eta0 = 0.3;
    double eta_end = 0.01;
    int horizon = 200;

    friend bool operator==(const LearningSchedule&, const LearningSchedule&) = default;
};

/// Throws ConfigError unless 0 < eta_end < eta0 <= 1 and horizon > 0.
void validate_schedule(const LearningSchedule& sched);

/// eta0 * exp(-lambda * step), lambda chosen so the rate reaches eta_end at `horizon`.
double learning_rate(int step, const LearningSchedule& sched);

/// Index of the Kohonen prototype nearest to `s` (Euclidean); lowest index on ties.
std::size_t winner(const Genome& g, const SensorVector& s);

struct CpnOutput {
    std::size_t winner = 0;
    WheelCommand command;
};

/// Shifted sigmoid on the winner's Grossberg row: 1/(1+exp(-slope*w)) - 0.5.
CpnOutput cpn_forward(const Genome& g, const SensorVector& s);

/// Moves the winning prototype toward `s` by `eta`; all other genes are untouched.
void kohonen_update(Genome& g, const SensorVector& s, double eta);
Genome kohonen_updated(const Genome& g, const SensorVector& s, double eta);

/// Dense 16-9-2 network over the same genes, no biases.
WheelCommand ffn_forward(const Genome& g, const SensorVector& s);

WheelCommand forward(ControllerKind kind, const Genome& g, const SensorVector& s);

} // namespace cpnc
