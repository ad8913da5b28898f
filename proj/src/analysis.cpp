#include "analysis.hpp"

#include <cmath>

#include "errors.hpp"

namespace bansa {

namespace {

double frobenius_distance(const AttentionMap& a, const AttentionMap& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        fail(ErrorCode::shape_mismatch, "attention maps differ in shape");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            const double d = a(i, j) - b(i, j);
            acc += d * d;
        }
    }
    return std::sqrt(acc);
}

// Biquad coefficients for a second-order Butterworth low-pass via the
// bilinear transform. DC gain is exactly 1 in exact arithmetic.
struct Biquad {
    double b0, b1, b2, a1, a2;
};

Biquad butterworth_lowpass(double cutoff) {
    constexpr double pi = 3.14159265358979323846;
    const double k = std::tan(pi * cutoff);
    const double sqrt2 = std::sqrt(2.0);
    const double norm = 1.0 / (1.0 + sqrt2 * k + k * k);
    Biquad q;
    q.b0 = k * k * norm;
    q.b1 = 2.0 * q.b0;
    q.b2 = q.b0;
    q.a1 = 2.0 * (k * k - 1.0) * norm;
    q.a2 = (1.0 - sqrt2 * k + k * k) * norm;
    return q;
}

// Filter one scalar sequence; the state starts at steady state for x[0] so a
// constant sequence passes through unchanged.
std::vector<double> filter_sequence(const Biquad& q, std::span<const double> xs) {
    std::vector<double> ys(xs.size());
    double x1 = xs[0], x2 = xs[0];
    double y1 = xs[0], y2 = xs[0];
    for (std::size_t n = 0; n < xs.size(); ++n) {
        const double y = q.b0 * xs[n] + q.b1 * x1 + q.b2 * x2 - q.a1 * y1 - q.a2 * y2;
        x2 = x1;
        x1 = xs[n];
        y2 = y1;
        y1 = y;
        ys[n] = y;
    }
    return ys;
}

void require_consistent(const TrajectoryRecord& traj, std::size_t min_states) {
    if (traj.states.size() < min_states) {
        fail(ErrorCode::invalid_input, "trajectory has too few states");
    }
    const auto& first = traj.states.front();
    for (const auto& s : traj.states) {
        if (s.tokens != first.tokens || s.dim != first.dim) {
            fail(ErrorCode::shape_mismatch, "trajectory states differ in shape");
        }
    }
}

}  // namespace

double pairwise_attention_distance(std::span<const AttentionMap> maps) {
    if (maps.size() < 2) {
        fail(ErrorCode::invalid_input, "pairwise distance needs at least two maps");
    }
    double total = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < maps.size(); ++i) {
        for (std::size_t j = i + 1; j < maps.size(); ++j) {
            total += frobenius_distance(maps[i], maps[j]);
            pairs += 1;
        }
    }
    return total / static_cast<double>(pairs);
}

double trajectory_distance(const TrajectoryRecord& a, const TrajectoryRecord& b) {
    require_consistent(a, 1);
    require_consistent(b, 1);
    if (a.states.size() != b.states.size() ||
        a.states.front().tokens != b.states.front().tokens ||
        a.states.front().dim != b.states.front().dim) {
        fail(ErrorCode::shape_mismatch, "trajectories differ in shape");
    }
    double acc = 0.0;
    std::size_t count = 0;
    for (std::size_t s = 0; s < a.states.size(); ++s) {
        const auto& da = a.states[s].data.data();
        const auto& db = b.states[s].data.data();
        for (std::size_t i = 0; i < da.size(); ++i) {
            const double d = da[i] - db[i];
            acc += d * d;
            count += 1;
        }
    }
    return std::sqrt(acc / static_cast<double>(count));
}

double pairwise_trajectory_distance(std::span<const TrajectoryRecord> trajectories) {
    if (trajectories.size() < 2) {
        fail(ErrorCode::invalid_input, "pairwise distance needs at least two trajectories");
    }
    double total = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < trajectories.size(); ++i) {
        for (std::size_t j = i + 1; j < trajectories.size(); ++j) {
            total += trajectory_distance(trajectories[i], trajectories[j]);
            pairs += 1;
        }
    }
    return total / static_cast<double>(pairs);
}

double trajectory_variation(const TrajectoryRecord& trajectory, double cutoff) {
    if (!(cutoff > 0.0 && cutoff < 0.5)) {
        fail(ErrorCode::invalid_input, "cutoff must lie in (0, 0.5)");
    }
    require_consistent(trajectory, 3);

    const Biquad q = butterworth_lowpass(cutoff);
    const std::size_t steps = trajectory.states.size();
    const std::size_t coords = trajectory.states.front().data.size();

    std::vector<double> sequence(steps);
    double total = 0.0;
    for (std::size_t c = 0; c < coords; ++c) {
        for (std::size_t s = 0; s < steps; ++s) {
            sequence[s] = trajectory.states[s].data.data()[c];
        }
        const std::vector<double> filtered = filter_sequence(q, sequence);
        for (std::size_t s = 1; s < steps; ++s) {
            const double d = filtered[s] - filtered[s - 1];
            total += d * d;
        }
    }
    return total / static_cast<double>(coords * (steps - 1));
}

double intra_frame_variance(const LatentState& state) {
    if (state.tokens == 0 || state.dim == 0) {
        fail(ErrorCode::invalid_input, "latent state is empty");
    }
    if (state.dim < 2) {
        return 0.0;
    }
    double total = 0.0;
    for (std::size_t i = 0; i < state.tokens; ++i) {
        const auto row = state.data.row(i);
        double mean = 0.0;
        for (double v : row) mean += v;
        mean /= static_cast<double>(state.dim);
        double ss = 0.0;
        for (double v : row) {
            const double d = v - mean;
            ss += d * d;
        }
        total += ss / static_cast<double>(state.dim - 1);
    }
    return total / static_cast<double>(state.tokens);
}

GroupDistanceSummary group_summary(std::span<const AttentionMap> low_group,
                                   std::span<const AttentionMap> high_group) {
    if (low_group.size() < 2 || high_group.size() < 2) {
        fail(ErrorCode::invalid_input, "each group needs at least two maps");
    }
    GroupDistanceSummary summary;
    summary.intra_low = pairwise_attention_distance(low_group);
    summary.intra_high = pairwise_attention_distance(high_group);

    double cross = 0.0;
    for (const auto& a : low_group) {
        for (const auto& b : high_group) {
            cross += frobenius_distance(a, b);
        }
    }
    summary.cross = cross / static_cast<double>(low_group.size() * high_group.size());
    return summary;
}

}  // namespace bansa
