#include "cpnc/controller.hpp"

#include "cpnc/error.hpp"

#include <cmath>

namespace cpnc {

namespace {

double sigmoid(double slope, double x) { return 1.0 / (1.0 + std::exp(-slope * x)); }

double squared_distance(const KohonenRow& row, const SensorVector& s)
{
    double acc = 0.0;
    for (std::size_t j = 0; j < kInputs; ++j) {
        const double d = s[j] - row[j];
        acc += d * d;
    }
    return acc;
}

} // namespace

void validate_schedule(const LearningSchedule& sched)
{
    if (!(0.0 < sched.eta_end && sched.eta_end < sched.eta0 && sched.eta0 <= 1.0) || sched.horizon <= 0) {
        throw ConfigError("learning schedule: need 0 < eta_end < eta0 <= 1 and horizon > 0");
    }
}

double learning_rate(int step, const LearningSchedule& sched)
{
    const double lambda = std::log(sched.eta0 / sched.eta_end) / sched.horizon;
    return sched.eta0 * std::exp(-lambda * step);
}

std::size_t winner(const Genome& g, const SensorVector& s)
{
    std::size_t best = 0;
    double best_d = squared_distance(g.kohonen[0], s);
    for (std::size_t i = 1; i < kNeurons; ++i) {
        const double d = squared_distance(g.kohonen[i], s);
        if (d < best_d) {
            best = i;
            best_d = d;
        }
    }
    return best;
}

CpnOutput cpn_forward(const Genome& g, const SensorVector& s)
{
    const std::size_t k = winner(g, s);
    return {k, {sigmoid(g.slope, g.grossberg[k][0]) - 0.5, sigmoid(g.slope, g.grossberg[k][1]) - 0.5}};
}

void kohonen_update(Genome& g, const SensorVector& s, double eta)
{
    auto& row = g.kohonen[winner(g, s)];
    for (std::size_t j = 0; j < kInputs; ++j) {
        row[j] += eta * (s[j] - row[j]);
    }
}

Genome kohonen_updated(const Genome& g, const SensorVector& s, double eta)
{
    Genome out = g;
    kohonen_update(out, s, eta);
    return out;
}

WheelCommand ffn_forward(const Genome& g, const SensorVector& s)
{
    std::array<double, kNeurons> hidden{};
    for (std::size_t i = 0; i < kNeurons; ++i) {
        double net = 0.0;
        for (std::size_t j = 0; j < kInputs; ++j) {
            net += g.kohonen[i][j] * s[j];
        }
        hidden[i] = sigmoid(g.slope, net);
    }
    std::array<double, kOutputs> out{};
    for (std::size_t o = 0; o < kOutputs; ++o) {
        double net = 0.0;
        for (std::size_t i = 0; i < kNeurons; ++i) {
            net += g.grossberg[i][o] * hidden[i];
        }
        out[o] = sigmoid(g.slope, net) - 0.5;
    }
    return {out[0], out[1]};
}

WheelCommand forward(ControllerKind kind, const Genome& g, const SensorVector& s)
{
    return kind == ControllerKind::CPNC ? cpn_forward(g, s).command : ffn_forward(g, s);
}

} // namespace cpnc
